//! Nonlinear theory on quad-graphs: the cross-ratio system for vertex maps
//! `z`, the Hirota system for radius/rotation variables `w`, the
//! correspondence between the two, and circle-pattern extraction.
//!
//! On a face `(x0, y0, x1, y1)` with labels `alpha0`, `alpha1` the
//! cross-ratio equation fixes `q(z(x0), z(y0), z(x1), z(y1)) =
//! alpha0^2/alpha1^2`, the cross-ratio of the corresponding parallelogram;
//! the Hirota equation reads
//! `alpha0 w(x0)w(y0) + alpha1 w(y0)w(x1) - alpha0 w(x1)w(y1) - alpha1
//! w(y1)w(x0) = 0`. The relation `z(y) - z(x) = alpha(x, y) w(x) w(y)`
//! integrates a Hirota solution to a cross-ratio solution and conversely
//! factors `z`-differences into `w`-values, unique up to a black-white
//! scaling.
//!
//! A cross-ratio solution comes from a circle pattern exactly when all its
//! face images are kites; equivalently the associated `w` takes unimodular
//! values on one color class and positive real values on the other. Circles
//! sit at the white values of `z`, their radii are the incident edge
//! lengths, and the intersection angle of two neighboring circles is read
//! off the argument of the face cross-ratio.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Color, QuadGraph};
use crate::labeling::EdgeLabeling;
use crate::linear::VertexFunction;
use crate::C64;

/// Cross-ratio of four complex numbers:
/// `(z0 - z1)(z2 - z3) / ((z1 - z2)(z3 - z0))`.
pub fn cross_ratio(z0: C64, z1: C64, z2: C64, z3: C64) -> Result<C64> {
    let den = (z1 - z2) * (z3 - z0);
    let scale = [z0, z1, z2, z3].iter().map(|z| z.norm()).fold(1.0, f64::max);
    if den.norm() < 1e-30 * scale * scale {
        return Err(Error::DegenerateStep(vec![]));
    }
    Ok((z0 - z1) * (z2 - z3) / den)
}

/// Per-face cross-ratio coefficients induced by a labeling,
/// `Q = alpha0^2 / alpha1^2` on the black diagonal (reciprocal on the white).
#[derive(Debug, Clone)]
pub struct CrossRatioData {
    primal: Vec<C64>,
}

impl CrossRatioData {
    pub fn from_labeling(d: &QuadGraph, labeling: &EdgeLabeling) -> Result<Self> {
        let primal = (0..d.faces().len())
            .map(|fi| {
                let (a0, a1) = labeling.face_labels(d, fi)?;
                Ok((a0 * a0) / (a1 * a1))
            })
            .collect::<Result<_>>()?;
        Ok(Self { primal })
    }

    /// Coefficient on the black diagonal of a face.
    pub fn primal(&self, face: usize) -> C64 {
        self.primal[face]
    }

    /// Coefficient on the white diagonal of a face.
    pub fn dual(&self, face: usize) -> C64 {
        1.0 / self.primal[face]
    }
}

/// Max deviation of the face cross-ratios of `z` from the labeling-induced
/// coefficients.
pub fn check_cross_ratio_solution(
    d: &QuadGraph,
    labeling: &EdgeLabeling,
    z: &VertexFunction,
) -> Result<f64> {
    let data = CrossRatioData::from_labeling(d, labeling)?;
    let mut worst = 0.0f64;
    for (fi, f) in d.faces().iter().enumerate() {
        let g = |v: usize| z.get(&v).copied().ok_or(Error::MissingValue(v));
        let q = cross_ratio(g(f.x0)?, g(f.y0)?, g(f.x1)?, g(f.y1)?)?;
        worst = worst.max((q - data.primal(fi)).norm());
    }
    Ok(worst)
}

/// Max Hirota residual
/// `|alpha0 w(x0)w(y0) + alpha1 w(y0)w(x1) - alpha0 w(x1)w(y1) - alpha1 w(y1)w(x0)|`
/// over the faces.
pub fn check_hirota_solution(
    d: &QuadGraph,
    labeling: &EdgeLabeling,
    w: &VertexFunction,
) -> Result<f64> {
    let mut worst = 0.0f64;
    for (fi, f) in d.faces().iter().enumerate() {
        let (a0, a1) = labeling.face_labels(d, fi)?;
        let g = |v: usize| w.get(&v).copied().ok_or(Error::MissingValue(v));
        let (w0, w1, w2, w3) = (g(f.x0)?, g(f.y0)?, g(f.x1)?, g(f.y1)?);
        let r = (a0 * w0 * w1 + a1 * w1 * w2 - a0 * w2 * w3 - a1 * w3 * w0).norm();
        worst = worst.max(r);
    }
    Ok(worst)
}

/// Integrate `z(y) - z(x) = alpha(x, y) w(x) w(y)` over a spanning tree from
/// the lowest vertex, then report the closure defect around every face; the
/// defect vanishes exactly when `w` solves the Hirota system.
pub fn z_from_w(
    d: &QuadGraph,
    labeling: &EdgeLabeling,
    w: &VertexFunction,
    z0: C64,
    tol: f64,
) -> Result<VertexFunction> {
    let root = *w.keys().next().ok_or(Error::MissingValue(0))?;
    let mut z = VertexFunction::new();
    z.insert(root, z0);
    let mut queue = VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        let zu = z[&u];
        let wu = *w.get(&u).ok_or(Error::MissingValue(u))?;
        for v in d.neighbors(u) {
            if z.contains_key(&v) {
                continue;
            }
            let wv = *w.get(&v).ok_or(Error::MissingValue(v))?;
            let alpha = labeling.alpha(d, u, v)?;
            z.insert(v, zu + alpha * wu * wv);
            queue.push_back(v);
        }
    }
    // Face closure defects.
    for (fi, f) in d.faces().iter().enumerate() {
        let cycle = [f.x0, f.y0, f.x1, f.y1, f.x0];
        let mut acc = C64::new(0.0, 0.0);
        for e in cycle.windows(2) {
            let alpha = labeling.alpha(d, e[0], e[1])?;
            acc += alpha * w[&e[0]] * w[&e[1]];
        }
        if acc.norm() > tol {
            return Err(Error::ClosureDefect {
                face: fi,
                defect: acc.norm(),
            });
        }
    }
    Ok(z)
}

/// Recover `w` from a cross-ratio solution `z` through
/// `w(x) w(y) = (z(y) - z(x)) / alpha(x, y)`, unique up to a black-white
/// scaling; normalized so `w` is 1 at the base white vertex. Fails when the
/// edge ratios are inconsistent (`z` does not solve the system).
pub fn w_from_z(
    d: &QuadGraph,
    labeling: &EdgeLabeling,
    z: &VertexFunction,
    tol: f64,
) -> Result<VertexFunction> {
    let root = *z
        .keys()
        .find(|&&v| d.color(v) == Color::White)
        .ok_or(Error::MissingValue(0))?;
    let mut w = VertexFunction::new();
    w.insert(root, C64::new(1.0, 0.0));
    let mut queue = VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        let wu = w[&u];
        let zu = *z.get(&u).ok_or(Error::MissingValue(u))?;
        for v in d.neighbors(u) {
            let zv = *z.get(&v).ok_or(Error::MissingValue(v))?;
            let alpha = labeling.alpha(d, u, v)?;
            let product = (zv - zu) / alpha;
            if product.norm() < 1e-14 {
                return Err(Error::ZeroValue(v));
            }
            let wv = product / wu;
            match w.get(&v) {
                None => {
                    w.insert(v, wv);
                    queue.push_back(v);
                }
                Some(&old) => {
                    let defect = (old - wv).norm();
                    if defect > tol * old.norm().max(1.0) {
                        return Err(Error::PropagationMismatch { vertex: v, defect });
                    }
                }
            }
        }
    }
    Ok(w)
}

/// A circle pattern: circles at white vertices, intersection points at black
/// vertices, intersection angles per face (assigned to the dual edge).
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CirclePattern {
    /// White vertex id -> (center re, center im, radius).
    pub circles: BTreeMap<usize, (f64, f64, f64)>,
    /// Black vertex id -> intersection point.
    pub points: BTreeMap<usize, (f64, f64)>,
    /// Per face: intersection angle `phi` of the two circles at its white
    /// diagonal, in `(0, pi)`.
    pub angles: Vec<f64>,
    /// Whether the white values of the associated Hirota variable were the
    /// radii carriers under the declared coloring (false: roles swapped).
    pub swapped_colors: bool,
}

/// Extract the circle pattern of a kite solution `z`: accepts when the
/// associated `w` is unimodular on one color class and real positive on the
/// other (within `tol`), and reads centers, radii, and intersection angles
/// off the geometry. The worst face is reported on rejection.
pub fn circle_pattern_extract(
    d: &QuadGraph,
    labeling: &EdgeLabeling,
    z: &VertexFunction,
    tol: f64,
) -> Result<CirclePattern> {
    let w = w_from_z(d, labeling, z, tol.max(1e-9))?;

    // Try the declared coloring first, then the swapped roles.
    let defect_for = |whites_are_radii: bool| -> (f64, usize) {
        let mut worst = (0.0f64, 0usize);
        for (&v, val) in &w {
            let white = d.color(v) == Color::White;
            let radius_role = white == whites_are_radii;
            let defect = if radius_role {
                // real positive
                if val.re <= 0.0 {
                    val.norm()
                } else {
                    val.im.abs()
                }
            } else {
                (val.norm() - 1.0).abs()
            };
            if defect > worst.0 {
                worst = (defect, v);
            }
        }
        worst
    };
    let direct = defect_for(true);
    let swapped = defect_for(false);
    let (defect, face_hint, swapped_colors) = if direct.0 <= swapped.0 {
        (direct.0, direct.1, false)
    } else {
        (swapped.0, swapped.1, true)
    };
    if defect > tol {
        return Err(Error::NotKite {
            face: d.faces_at(face_hint).first().copied().unwrap_or(0),
            defect,
        });
    }

    // Centers sit at the radius-carrying color class.
    let center_color = if swapped_colors {
        Color::Black
    } else {
        Color::White
    };
    let mut circles = BTreeMap::new();
    let mut points = BTreeMap::new();
    for v in 0..d.vertex_count() {
        let Some(&zv) = z.get(&v) else { continue };
        if d.color(v) == center_color {
            // Radius: incident edge lengths, kite-consistent within tol.
            let mut radii: Vec<f64> = d
                .neighbors(v)
                .iter()
                .filter_map(|n| z.get(n).map(|zn| (zn - zv).norm()))
                .collect();
            radii.sort_by(f64::total_cmp);
            let r = radii[radii.len() / 2];
            for (fi, rr) in radii.iter().enumerate() {
                if (rr - r).abs() > tol * r.max(1.0) {
                    return Err(Error::NotKite {
                        face: fi,
                        defect: (rr - r).abs(),
                    });
                }
            }
            circles.insert(v, (zv.re, zv.im, r));
        } else {
            points.insert(v, (zv.re, zv.im));
        }
    }

    // Angles from the face cross-ratio: q = exp(2 i phi) with phi the
    // intersection angle at the primal edge; the dual edge carries pi - phi.
    let mut angles = Vec::with_capacity(d.faces().len());
    for f in d.faces() {
        let q = cross_ratio(z[&f.x0], z[&f.y0], z[&f.x1], z[&f.y1])?;
        let q = if swapped_colors { 1.0 / q } else { q };
        let mut phi = q.arg() / 2.0;
        if phi <= 0.0 {
            phi += std::f64::consts::PI;
        }
        // phi is the angle carried by the center-center (dual) edge.
        angles.push(std::f64::consts::PI - phi);
    }
    Ok(CirclePattern {
        circles,
        points,
        angles,
        swapped_colors,
    })
}

/// Angle-sum defects of an extracted pattern: at every interior intersection
/// point the face angles `pi - phi` add to a multiple of `pi`
/// (multiplicatively, `prod exp(2 i phi) = 1`), and at every interior center
/// the intersection angles do the same exactly when the pattern is
/// integrable.
pub fn pattern_angle_defects(d: &QuadGraph, pattern: &CirclePattern) -> (f64, f64) {
    let mut at_points = 0.0f64;
    let mut at_centers = 0.0f64;
    for v in 0..d.vertex_count() {
        let Ok(flower) = d.flower(v) else { continue };
        if !flower.closed {
            continue;
        }
        let mut prod = C64::new(1.0, 0.0);
        for petal in &flower.entries {
            let phi_dual = pattern.angles[petal.face];
            prod *= C64::from_polar(1.0, 2.0 * phi_dual);
        }
        let defect = (prod - 1.0).norm();
        let center_color = if pattern.swapped_colors {
            Color::Black
        } else {
            Color::White
        };
        if d.color(v) == center_color {
            at_centers = at_centers.max(defect);
        } else {
            at_points = at_points.max(defect);
        }
    }
    (at_points, at_centers)
}
