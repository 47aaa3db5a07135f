//! Rhombic tiling generators: square-lattice patches, the dual of the kagome
//! lattice (double of a triangular patch), and quasiperiodic d = 5 patches
//! from a de Bruijn multigrid.
//!
//! Every generator returns a bipartite quad-graph with exact vertex
//! positions whose faces are unit rhombi, so its edge labeling is unimodular
//! and quasicrystallic.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graph::{interior_double, CellDecomposition, Color, QuadGraph};
use crate::num::SplitMix64;
use crate::C64;

/// Square-lattice patch on `[-r, r]^2` viewed as a quad-graph: vertices are
/// integer points colored by coordinate-sum parity (even = black), faces the
/// unit squares. Edge labels are `{±1, ±i}`.
pub fn square_patch_radius(r: i64) -> Result<QuadGraph> {
    square_window(-r, r, -r, r, true)
}

/// `w x h` square-lattice patch on `[0, w] x [0, h]`.
pub fn square_patch(w: i64, h: i64) -> Result<QuadGraph> {
    square_window(0, w, 0, h, true)
}

/// Rectangular window of the square lattice. `even_is_black` picks which
/// parity class plays the primal role.
pub fn square_window(
    x_lo: i64,
    x_hi: i64,
    y_lo: i64,
    y_hi: i64,
    even_is_black: bool,
) -> Result<QuadGraph> {
    assert!(x_hi > x_lo && y_hi > y_lo);
    let w = (x_hi - x_lo) as usize + 1;
    let idx = |x: i64, y: i64| ((y - y_lo) as usize) * w + (x - x_lo) as usize;
    let mut colors = Vec::new();
    let mut positions = Vec::new();
    for y in y_lo..=y_hi {
        for x in x_lo..=x_hi {
            let even = (x + y).rem_euclid(2) == 0;
            colors.push(if even == even_is_black {
                Color::Black
            } else {
                Color::White
            });
            positions.push(Some(C64::new(x as f64, y as f64)));
        }
    }
    let mut faces = Vec::new();
    for y in y_lo..y_hi {
        for x in x_lo..x_hi {
            let t = [idx(x, y), idx(x + 1, y), idx(x + 1, y + 1), idx(x, y + 1)];
            let face = if colors[t[0]] == Color::Black {
                t
            } else {
                [t[1], t[2], t[3], t[0]]
            };
            faces.push(face);
        }
    }
    QuadGraph::new(colors, faces, Some(positions), None)
}

/// Dual of the kagome lattice: the double of a triangular-lattice patch,
/// scaled so that all quad edges have unit length. Faces are 60/120 degree
/// rhombi and the labels are `exp((2k-1) i pi / 6)`, `k = 1, 2, 3`, up to
/// sign.
pub fn dual_kagome_patch(radius: i64) -> Result<QuadGraph> {
    let omega = C64::from_polar(1.0, std::f64::consts::FRAC_PI_3);
    let pos = |a: i64, b: i64| (C64::new(a as f64, 0.0) + omega * b as f64) * 3f64.sqrt();
    let rmax = radius as f64 * 3f64.sqrt() + 1e-9;

    let span = 2 * radius + 2;
    let mut ids: BTreeMap<(i64, i64), usize> = BTreeMap::new();
    let mut positions: Vec<C64> = Vec::new();
    let mut id_of = |a: i64, b: i64, positions: &mut Vec<C64>| {
        *ids.entry((a, b)).or_insert_with(|| {
            positions.push(pos(a, b));
            positions.len() - 1
        })
    };
    let mut faces = Vec::new();
    for a in -span..span {
        for b in -span..span {
            let up = [(a, b), (a + 1, b), (a, b + 1)];
            let down = [(a + 1, b), (a + 1, b + 1), (a, b + 1)];
            for tri in [up, down] {
                if tri.iter().all(|&(x, y)| pos(x, y).norm() <= rmax) {
                    let face: Vec<usize> = tri
                        .iter()
                        .map(|&(x, y)| id_of(x, y, &mut positions))
                        .collect();
                    faces.push(face);
                }
            }
        }
    }
    let g = CellDecomposition::new(positions.len(), faces, Some(positions))?;
    interior_double(&g)
}

/// Quasiperiodic rhombic patch with five edge directions `exp(2 pi i k / 5)`
/// from a de Bruijn multigrid: five families of `2r + 1` parallel lines with
/// seed-jittered offsets are dualized, one rhombus per line intersection.
/// Non-generic offset draws (triple intersections) are re-jittered; the
/// number of retries is reported in the result.
pub fn penrose_patch(radius: i64, seed: u64) -> Result<(QuadGraph, u32)> {
    const DIRS: usize = 5;
    let zeta: Vec<C64> = (0..DIRS)
        .map(|k| C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / DIRS as f64))
        .collect();
    let mut rng = SplitMix64::new(seed);
    const GENERIC_TOL: f64 = 1e-6;

    'attempt: for attempt in 0..8u32 {
        let gamma: Vec<f64> = (0..DIRS).map(|_| rng.in_range(0.05, 0.95)).collect();
        let t = |z: C64, m: usize| (z * zeta[m].conj()).re - gamma[m];

        let mut faces_by_key: BTreeMap<(usize, i64, usize, i64), [Vec<i64>; 4]> = BTreeMap::new();
        let line_range = radius + 1;
        for k in 0..DIRS {
            for l in (k + 1)..DIRS {
                let det = (zeta[k].conj() * zeta[l]).im; // sin of the angle between
                for i in -line_range..=line_range {
                    for j in -line_range..=line_range {
                        // Intersection of line i of family k and line j of family l.
                        let ck = i as f64 + gamma[k];
                        let cl = j as f64 + gamma[l];
                        let x = (ck * zeta[l].im - cl * zeta[k].im) / det;
                        let y = (cl * zeta[k].re - ck * zeta[l].re) / det;
                        let z = C64::new(x, y);
                        // Convexity of the disk window keeps the kept
                        // crossings contiguous along every line, hence the
                        // dual patch connected.
                        if z.norm() > radius as f64 {
                            continue;
                        }
                        let mut base = vec![0i64; DIRS];
                        for m in 0..DIRS {
                            if m == k {
                                base[m] = i;
                            } else if m == l {
                                base[m] = j;
                            } else {
                                let tm = t(z, m);
                                if (tm - tm.round()).abs() < GENERIC_TOL {
                                    continue 'attempt; // non-generic: re-jitter
                                }
                                base[m] = tm.ceil() as i64;
                            }
                        }
                        // Four cells around the intersection; counterclockwise
                        // when the k and l steps are positively oriented.
                        let (k1, l1) = if det > 0.0 { (k, l) } else { (l, k) };
                        let mut corners: [Vec<i64>; 4] = [
                            base.clone(),
                            base.clone(),
                            base.clone(),
                            base.clone(),
                        ];
                        corners[1][k1] += 1;
                        corners[2][k1] += 1;
                        corners[2][l1] += 1;
                        corners[3][l1] += 1;
                        faces_by_key.insert((k, i, l, j), corners);
                    }
                }
            }
        }

        let mut vertex_ids: BTreeMap<Vec<i64>, usize> = BTreeMap::new();
        for corners in faces_by_key.values() {
            for c in corners {
                let next = vertex_ids.len();
                vertex_ids.entry(c.clone()).or_insert(next);
            }
        }
        let mut positions = vec![None; vertex_ids.len()];
        for (kvec, &id) in &vertex_ids {
            let p: C64 = kvec
                .iter()
                .zip(&zeta)
                .map(|(&n, &z)| z * n as f64)
                .sum();
            positions[id] = Some(p);
        }
        let face_tuples: Vec<[usize; 4]> = faces_by_key
            .values()
            .map(|corners| {
                let ids: Vec<usize> = corners.iter().map(|c| vertex_ids[c]).collect();
                [ids[0], ids[1], ids[2], ids[3]]
            })
            .collect();
        let n = vertex_ids.len();
        match QuadGraph::from_faces(face_tuples, n, Some(positions)) {
            Ok(q) => return Ok((q, attempt)),
            Err(_) => continue 'attempt,
        }
    }
    Err(Error::NonGenericOffsets(seed))
}

/// Vertex whose position matches `target` within 1e-6, if any.
pub fn vertex_at(d: &QuadGraph, target: C64) -> Option<usize> {
    let p = d.positions()?;
    (0..d.vertex_count()).find(|&v| p[v].map(|z| (z - target).norm() < 1e-6).unwrap_or(false))
}

/// Black vertex closest to the origin (lowest id on ties); the canonical
/// base vertex of a patch.
pub fn base_vertex(d: &QuadGraph) -> Result<usize> {
    let p = d.positions().ok_or(Error::MissingPosition(0))?;
    (0..d.vertex_count())
        .filter(|&v| d.is_black(v) && p[v].is_some())
        .min_by(|&a, &b| p[a].unwrap().norm().total_cmp(&p[b].unwrap().norm()))
        .ok_or(Error::MissingPosition(0))
}
