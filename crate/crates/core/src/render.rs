//! Deterministic SVG rendering of tiling documents: the bare tiling, circle
//! patterns, per-vertex heatmaps, and sector decompositions.
//!
//! Output is plain SVG 1.1 with a viewBox fitted to the vertex bounding box
//! plus a 5% margin and all coordinates printed with four decimals, so the
//! same document renders to identical bytes on every platform.

use std::fmt::Write as _;

use crate::document::TilingDocument;
use crate::error::{Error, Result};
use crate::graph::Color;
use crate::labeling::{labeling_from_realization, lift_to_zd, Realization};
use crate::nonlinear::circle_pattern_extract;
use crate::tiling;
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layer {
    Tiling,
    Pattern,
    Heatmap,
    Sectors,
}

impl std::str::FromStr for Layer {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "tiling" => Ok(Layer::Tiling),
            "pattern" => Ok(Layer::Pattern),
            "heatmap" => Ok(Layer::Heatmap),
            "sectors" => Ok(Layer::Sectors),
            other => Err(format!("unknown layer '{other}'")),
        }
    }
}

/// 256-step linear color ramp from deep blue (44, 60, 96) to warm yellow
/// (244, 200, 66); input clamped to [0, 1].
pub fn ramp(t: f64) -> (u8, u8, u8) {
    let step = (t.clamp(0.0, 1.0) * 255.0).floor() / 255.0;
    let lerp = |a: f64, b: f64| (a + (b - a) * step).round() as u8;
    (lerp(44.0, 244.0), lerp(60.0, 200.0), lerp(96.0, 66.0))
}

const PALETTE: [&str; 10] = [
    "#4c72b0", "#dd8452", "#55a868", "#c44e52", "#8172b3", "#937860", "#da8bc3", "#8c8c8c",
    "#ccb974", "#64b5cd",
];

struct Canvas {
    body: String,
    min: C64,
    max: C64,
}

impl Canvas {
    fn new(points: &[C64]) -> Result<Canvas> {
        if points.is_empty() {
            return Err(Error::MissingPosition(0));
        }
        let mut min = points[0];
        let mut max = points[0];
        for z in points {
            min = C64::new(min.re.min(z.re), min.im.min(z.im));
            max = C64::new(max.re.max(z.re), max.im.max(z.im));
        }
        Ok(Canvas {
            body: String::new(),
            min,
            max,
        })
    }

    fn grow(&mut self, pad: f64) {
        self.min -= C64::new(pad, pad);
        self.max += C64::new(pad, pad);
    }

    /// Flip the y axis so mathematical orientation renders upright.
    fn xy(&self, z: C64) -> (f64, f64) {
        (z.re, self.max.im + self.min.im - z.im)
    }

    fn finish(self) -> String {
        let w = self.max.re - self.min.re;
        let h = self.max.im - self.min.im;
        let m = 0.05 * w.max(h);
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{:.4} {:.4} {:.4} {:.4}\">\n{}</svg>\n",
            self.min.re - m,
            self.min.im - m,
            w + 2.0 * m,
            h + 2.0 * m,
            self.body
        )
    }

    fn line(&mut self, a: C64, b: C64, stroke: &str, width: f64) {
        let (x1, y1) = self.xy(a);
        let (x2, y2) = self.xy(b);
        writeln!(
            self.body,
            "<line x1=\"{x1:.4}\" y1=\"{y1:.4}\" x2=\"{x2:.4}\" y2=\"{y2:.4}\" stroke=\"{stroke}\" stroke-width=\"{width:.4}\"/>"
        )
        .unwrap();
    }

    fn circle(&mut self, c: C64, r: f64, fill: &str, stroke: &str, width: f64) {
        let (cx, cy) = self.xy(c);
        writeln!(
            self.body,
            "<circle cx=\"{cx:.4}\" cy=\"{cy:.4}\" r=\"{r:.4}\" fill=\"{fill}\" stroke=\"{stroke}\" stroke-width=\"{width:.4}\"/>"
        )
        .unwrap();
    }
}

/// Render one layer of a document to SVG text. The heatmap layer requires a
/// named function payload; the pattern layer extracts circles from one
/// (default payload name "z"); sectors require slope data.
pub fn render_svg(doc: &TilingDocument, layer: Layer, function: Option<&str>) -> Result<String> {
    let (graph, slopes) = doc.to_graph()?;
    let positions: Vec<Option<C64>> = (0..graph.vertex_count())
        .map(|v| graph.positions().and_then(|p| p[v]))
        .collect();
    let placed: Vec<C64> = positions.iter().flatten().copied().collect();
    let mut canvas = Canvas::new(&placed)?;

    let edge_layer = |canvas: &mut Canvas, stroke: &str, width: f64| {
        for &(u, v) in graph.edges() {
            if let (Some(a), Some(b)) = (positions[u], positions[v]) {
                canvas.line(a, b, stroke, width);
            }
        }
    };

    match layer {
        Layer::Tiling => {
            edge_layer(&mut canvas, "#333333", 0.03);
            for v in 0..graph.vertex_count() {
                if let Some(z) = positions[v] {
                    match graph.color(v) {
                        Color::Black => canvas.circle(z, 0.08, "#111111", "none", 0.0),
                        Color::White => canvas.circle(z, 0.08, "#ffffff", "#111111", 0.02),
                    }
                }
            }
        }
        Layer::Pattern => {
            let name = function.unwrap_or("z");
            // Default to the isoradial pattern of the embedding itself when
            // no kite solution is stored.
            let z = match doc.function(name) {
                Ok(z) => z,
                Err(Error::MissingPayload(_)) if function.is_none() => (0..graph.vertex_count())
                    .filter_map(|v| positions[v].map(|p| (v, p)))
                    .collect(),
                Err(e) => return Err(e),
            };
            let p = Realization::from_graph(&graph)?;
            let labeling = labeling_from_realization(&graph, &p)?;
            let pattern = circle_pattern_extract(&graph, &labeling, &z, 1e-7)?;
            let pts: Vec<C64> = pattern
                .circles
                .values()
                .map(|&(re, im, _)| C64::new(re, im))
                .chain(pattern.points.values().map(|&(re, im)| C64::new(re, im)))
                .collect();
            canvas = Canvas::new(&pts)?;
            let pad = pattern
                .circles
                .values()
                .map(|&(_, _, r)| r)
                .fold(0.0, f64::max);
            canvas.grow(pad);
            for &(re, im, r) in pattern.circles.values() {
                canvas.circle(C64::new(re, im), r, "none", "#4c72b0", 0.02);
            }
            for &(re, im) in pattern.points.values() {
                canvas.circle(C64::new(re, im), 0.04, "#c44e52", "none", 0.0);
            }
        }
        Layer::Heatmap => {
            let name = function.ok_or_else(|| Error::MissingPayload("<function>".into()))?;
            let f = doc.function(name)?;
            let lo = f.values().map(|z| z.re).fold(f64::INFINITY, f64::min);
            let hi = f.values().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
            let span = (hi - lo).max(1e-300);
            edge_layer(&mut canvas, "#dddddd", 0.02);
            for (v, z) in &f {
                if let Some(pos) = positions[*v] {
                    let (r, g, b) = ramp((z.re - lo) / span);
                    canvas.circle(pos, 0.22, &format!("rgb({r},{g},{b})"), "none", 0.0);
                }
            }
        }
        Layer::Sectors => {
            let slopes = slopes.ok_or_else(|| Error::MissingPayload("slopes".into()))?;
            let p = Realization::from_graph(&graph)?;
            let labeling = labeling_from_realization(&graph, &p)?;
            let x0 = tiling::base_vertex(&graph)?;
            let lift = lift_to_zd(&graph, &labeling, &slopes, x0)?;
            edge_layer(&mut canvas, "#dddddd", 0.02);
            for (v, n) in &lift {
                if let Some(pos) = positions[*v] {
                    let color = match slopes.sector_of(n) {
                        Some(m) => PALETTE[(m - 1) as usize % PALETTE.len()],
                        None => "#000000",
                    };
                    canvas.circle(pos, 0.18, color, "none", 0.0);
                }
            }
        }
    }
    Ok(canvas.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::labeling::SlopeData;
    use crate::special::greens_function;

    fn square_doc(r: i64) -> TilingDocument {
        let patch = tiling::square_patch_radius(r).unwrap();
        let p = Realization::from_graph(&patch).unwrap();
        let labeling = labeling_from_realization(&patch, &p).unwrap();
        let slopes = SlopeData::from_labeling(&labeling).unwrap();
        TilingDocument::from_graph(&patch, Some(&slopes))
    }

    #[test]
    fn tiling_and_sector_layers_are_deterministic() {
        let doc = square_doc(3);
        let a = render_svg(&doc, Layer::Tiling, None).unwrap();
        let b = render_svg(&doc, Layer::Tiling, None).unwrap();
        assert_eq!(a, b);
        assert!(a.starts_with("<svg"));
        assert!(a.contains("viewBox"));
        let s = render_svg(&doc, Layer::Sectors, None).unwrap();
        assert!(s.contains(PALETTE[0]));
    }

    #[test]
    fn heatmap_of_greens_function_grows_radially() {
        let patch = tiling::square_patch_radius(20).unwrap();
        let p = Realization::from_graph(&patch).unwrap();
        let labeling = labeling_from_realization(&patch, &p).unwrap();
        let slopes = SlopeData::from_labeling(&labeling).unwrap();
        let x0 = tiling::vertex_at(&patch, C64::new(0.0, 0.0)).unwrap();
        let green = greens_function(&patch, &labeling, &slopes, x0).unwrap();

        // Monotone growth with distance, coarse-grained: everything within
        // radius 5 sits below everything beyond radius 15.
        let near_max = green
            .iter()
            .filter(|(v, _)| p.position(**v).norm() <= 5.0)
            .map(|(_, z)| z.re)
            .fold(f64::NEG_INFINITY, f64::max);
        let far_min = green
            .iter()
            .filter(|(v, _)| p.position(**v).norm() >= 15.0)
            .map(|(_, z)| z.re)
            .fold(f64::INFINITY, f64::min);
        assert!(near_max < far_min, "near {near_max} vs far {far_min}");

        let mut doc = TilingDocument::from_graph(&patch, Some(&slopes));
        doc.insert_function("green", &green, None);
        let svg = render_svg(&doc, Layer::Heatmap, Some("green")).unwrap();
        assert!(svg.contains("rgb("));
        assert!(render_svg(&doc, Layer::Heatmap, Some("missing")).is_err());
    }

    #[test]
    fn pattern_layer_renders_isoradial_circles() {
        let patch = tiling::dual_kagome_patch(2).unwrap();
        let p = Realization::from_graph(&patch).unwrap();
        let labeling = labeling_from_realization(&patch, &p).unwrap();
        let slopes = SlopeData::from_labeling(&labeling).unwrap();
        let z: crate::linear::VertexFunction = (0..patch.vertex_count())
            .map(|v| (v, p.position(v)))
            .collect();
        let mut doc = TilingDocument::from_graph(&patch, Some(&slopes));
        doc.insert_function("z", &z, None);
        let svg = render_svg(&doc, Layer::Pattern, None).unwrap();
        assert!(svg.matches("<circle").count() > patch.faces().len() / 2);
    }

    #[test]
    fn ramp_endpoints() {
        assert_eq!(ramp(0.0), (44, 60, 96));
        assert_eq!(ramp(1.0), (244, 200, 66));
        assert_eq!(ramp(-3.0), ramp(0.0));
    }
}
