//! Linearization bridge between the nonlinear and linear theories: discrete
//! derivatives and antiderivatives of discrete holomorphic functions, and
//! tangent vectors to one-parameter families of cross-ratio / Hirota
//! solutions.
//!
//! Differentiating a family `z_eps` (cross-ratio variables) and `w_eps`
//! (Hirota variables) through the trivial solution `z_0 = p`, `w_0 = 1`
//! produces a pair `g = dz/deps`, `f = d(log w)/deps` linked by
//!
//! ```text
//! g(y) - g(x) = (f(x) + f(y)) (p(y) - p(x))
//! ```
//!
//! on every directed edge; `f` is the discrete derivative of `g` and both
//! solve the discrete Cauchy-Riemann equations. Summing the right-hand side
//! around a face telescopes to the Cauchy-Riemann residual of `f`, which is
//! why the edge relation integrates exactly when `f` is discrete
//! holomorphic. For the power-function family in the exponent the tangent
//! at the isoradial point is the discrete logarithm.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::QuadGraph;
use crate::labeling::{Realization, SlopeData};
use crate::linear::{check_cauchy_riemann, VertexFunction};
use crate::special::{is_even, CoveringPoint, DiscreteLog, DiscretePower, PowerParameters};
use crate::tiling;
use crate::C64;

use std::collections::VecDeque;

/// Solve `g(y) - g(x) = (f(x) + f(y)) (p(y) - p(x))` for `f`, given `g` and
/// a seed value at the lowest vertex carrying `g`. Fails when the edge
/// equations are inconsistent beyond `tol` (i.e. `g` is not discrete
/// holomorphic); the result is unique up to an alternating (black-white)
/// additive constant absorbed by the seed.
pub fn discrete_derivative(
    d: &QuadGraph,
    p: &Realization,
    g: &VertexFunction,
    f0: C64,
    tol: f64,
) -> Result<VertexFunction> {
    let root = *g.keys().next().ok_or(Error::MissingValue(0))?;
    let mut f = VertexFunction::new();
    f.insert(root, f0);
    let mut queue = VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        let fu = f[&u];
        let gu = *g.get(&u).ok_or(Error::MissingValue(u))?;
        for v in d.neighbors(u) {
            let gv = *g.get(&v).ok_or(Error::MissingValue(v))?;
            let alpha = p.position(v) - p.position(u);
            let fv = (gv - gu) / alpha - fu;
            match f.get(&v) {
                None => {
                    f.insert(v, fv);
                    queue.push_back(v);
                }
                Some(&old) => {
                    let defect = (old - fv).norm();
                    if defect > tol * old.norm().max(1.0) {
                        return Err(Error::PropagationMismatch { vertex: v, defect });
                    }
                }
            }
        }
    }
    Ok(f)
}

/// Integrate `g(y) - g(x) = (f(x) + f(y)) (p(y) - p(x))` along a spanning
/// tree from the lowest vertex; face closure defects above `tol` are
/// rejected (they equal the Cauchy-Riemann residual of `f`).
pub fn discrete_antiderivative(
    d: &QuadGraph,
    p: &Realization,
    f: &VertexFunction,
    g0: C64,
    tol: f64,
) -> Result<VertexFunction> {
    let root = *f.keys().next().ok_or(Error::MissingValue(0))?;
    let mut g = VertexFunction::new();
    g.insert(root, g0);
    let mut queue = VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        let gu = g[&u];
        let fu = *f.get(&u).ok_or(Error::MissingValue(u))?;
        for v in d.neighbors(u) {
            if g.contains_key(&v) {
                continue;
            }
            let fv = *f.get(&v).ok_or(Error::MissingValue(v))?;
            let alpha = p.position(v) - p.position(u);
            g.insert(v, gu + (fu + fv) * alpha);
            queue.push_back(v);
        }
    }
    for (fi, face) in d.faces().iter().enumerate() {
        let cycle = [face.x0, face.y0, face.x1, face.y1, face.x0];
        let mut acc = C64::new(0.0, 0.0);
        for e in cycle.windows(2) {
            let alpha = p.position(e[1]) - p.position(e[0]);
            acc += (f[&e[0]] + f[&e[1]]) * alpha;
        }
        if acc.norm() > tol {
            return Err(Error::ClosureDefect {
                face: fi,
                defect: acc.norm(),
            });
        }
    }
    Ok(g)
}

/// Report of a tangent-vector computation on the power-function family.
#[derive(Debug, Clone, Serialize)]
pub struct TangentReport {
    pub gamma: f64,
    pub h: f64,
    /// Cauchy-Riemann residual of the Hirota-side tangent `f`.
    pub f_residual: f64,
    /// Cauchy-Riemann residual of the cross-ratio-side tangent `g`.
    pub g_residual: f64,
    /// Max defect of the edge relation between `f` and `g`.
    pub pairing_defect: f64,
    /// Parity leakage of `f`: for circle-pattern families `f` is real at
    /// even-parity points and purely imaginary at odd ones.
    pub parity_defect: f64,
    /// At gamma = 1/2: max deviation of `f/2` from the discrete logarithm.
    pub log_match_error: Option<f64>,
    /// Ratio of the worst `f` residual at step `h` to the one at `h/2`
    /// (quadratic convergence gives about 4).
    pub richardson_ratio: f64,
}

/// Central-difference tangents of the power family at `gamma`, on the
/// first-quadrant window `[0, size]^2` of the square lattice (d = 2 slope
/// data expected). `f` is the logarithmic central difference
/// `log(w_+ / w_-) / 2h` (which never references the base solve and is
/// accurate to O(h^2)), `g` the plain central difference `(z_+ - z_-) / 2h`.
pub fn tangent_check(
    slopes: &SlopeData,
    gamma: f64,
    h: f64,
    size: i64,
) -> Result<TangentReport> {
    if slopes.dimension() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: slopes.dimension(),
        });
    }
    let window = tiling::square_window(0, size, 0, size, true)?;
    let p = Realization::from_graph(&window)?;
    let coords = |v: usize| {
        let pos = p.position(v);
        vec![pos.re.round() as i64, pos.im.round() as i64]
    };

    let tangents = |hh: f64| -> Result<(VertexFunction, VertexFunction)> {
        // Central stencil, shifted one-sided when gamma ± hh leaves (0, 1).
        let (ga, gb) = if gamma + hh >= 1.0 {
            (gamma - 2.0 * hh, gamma)
        } else if gamma - hh <= 0.0 {
            (gamma, gamma + 2.0 * hh)
        } else {
            (gamma - hh, gamma + hh)
        };
        let mut plus = DiscretePower::new(slopes.clone(), PowerParameters::new(gb)?);
        let mut minus = DiscretePower::new(slopes.clone(), PowerParameters::new(ga)?);
        let span = gb - ga;
        let mut f = VertexFunction::new();
        let mut g = VertexFunction::new();
        for v in 0..window.vertex_count() {
            let pt = CoveringPoint::new(1, coords(v));
            let wp = plus.value_w(&pt)?;
            let wm = minus.value_w(&pt)?;
            f.insert(v, (wp / wm).ln() / span);
            let zp = plus.value_z(&pt)?;
            let zm = minus.value_z(&pt)?;
            g.insert(v, (zp - zm) / span);
        }
        Ok((f, g))
    };

    let (f, g) = tangents(h)?;
    let f_residual = check_cauchy_riemann(&window, &p, &f)?;
    let g_residual = check_cauchy_riemann(&window, &p, &g)?;
    let (f_half, _) = tangents(h / 2.0)?;
    let half_residual = check_cauchy_riemann(&window, &p, &f_half)?;
    let richardson_ratio = f_residual / half_residual.max(1e-300);

    let mut pairing_defect = 0.0f64;
    for &(u, v) in window.edges() {
        let alpha = p.position(v) - p.position(u);
        let lhs = g[&v] - g[&u];
        let rhs = (f[&u] + f[&v]) * alpha;
        pairing_defect = pairing_defect.max((lhs - rhs).norm());
    }

    let mut parity_defect = 0.0f64;
    for (v, val) in &f {
        if is_even(&coords(*v)) {
            parity_defect = parity_defect.max(val.im.abs());
        } else {
            parity_defect = parity_defect.max(val.re.abs());
        }
    }

    let log_match_error = if (gamma - 0.5).abs() < 1e-12 {
        let mut log = DiscreteLog::new(slopes.clone());
        let mut worst = 0.0f64;
        for (v, val) in &f {
            let lg = log.value(&CoveringPoint::new(1, coords(*v)))?;
            worst = worst.max((val / 2.0 - lg).norm());
        }
        Some(worst)
    } else {
        None
    };

    Ok(TangentReport {
        gamma,
        h,
        f_residual,
        g_residual,
        pairing_defect,
        parity_defect,
        log_match_error,
        richardson_ratio,
    })
}
