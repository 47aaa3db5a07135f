//! Isomonodromic special functions: the discrete logarithm on a branched
//! covering of lattice octants, the lattice Green's function it induces, and
//! the discrete power functions in Hirota and cross-ratio variables.
//!
//! For a quasicrystallic slope set `{±alpha_1, ..., ±alpha_d}` the relevant
//! domain is the union of the `2d` octants `S_m` picked out by `d`
//! consecutive slopes. The covering `S~` stacks copies of these octants
//! indexed by an unreduced sector index `m ∈ Z`, carrying the logarithm
//! branch `log(eps_k alpha_k) = i theta_r` on each semi-axis.
//!
//! The discrete logarithm is the unique discrete holomorphic function on an
//! octant with axis values
//!
//! ```text
//! f_0 = 0,   f_{2n} = sum_{l=1}^{n} 2/(2l - 1),   f_{2n+1} = log(eps_k alpha_k),
//! ```
//!
//! equivalently the solution of `n (f_{n+1} - f_{n-1}) = 1 - (-1)^n` with
//! those initial values. Restricted to even-parity (black) points it is real,
//! sector-independent, and equals `2 pi` times the Green's function of the
//! primal graph; odd-parity (white) values are purely imaginary and climb by
//! `2 pi i` per full turn of the covering.
//!
//! The discrete power function `w^{2 gamma - 1}` solves the Hirota system
//! with axis values `w_{2n} = prod_{l=1}^{n} (l - 1 + gamma)/(l - gamma)`,
//! `w_{2n+1} = (eps_k alpha_k)^{2 gamma - 1}`; its cross-ratio partner
//! `z^{2 gamma}` starts from `z(eps_k e_k) = (eps_k alpha_k)^{2 gamma}` and
//! obeys `n (z_{n+1} - z_n)(z_n - z_{n-1})/(z_{n+1} - z_{n-1}) = gamma z_n`
//! along the axes. At `gamma = 1/2` both collapse to the trivial solution,
//! and the gamma-derivative of the Hirota power function is the discrete
//! logarithm.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::graph::QuadGraph;
use crate::labeling::{Brick, EdgeLabeling, SlopeData};
use crate::linear::{BrickFunction, VertexFunction};
use crate::num::{Dd, Field};
use crate::C64;

/// Even-index axis value of the discrete logarithm:
/// `f_{2n} = sum_{l=1}^{n} 2 / (2l - 1)`, exact over any field.
pub fn log_axis_even<T: Field>(n: usize) -> T {
    let mut acc = T::zero();
    for l in 1..=n {
        acc = acc + T::from_usize(2).unwrap() / T::from_usize(2 * l - 1).unwrap();
    }
    acc
}

/// Even-index axis values `f_0, f_2, ..., f_{2n}` produced by the recursion
/// `n (f_{n+1} - f_{n-1}) = 1 - (-1)^n` instead of the closed form.
pub fn log_axis_even_by_recursion<T: Field>(n: usize) -> Vec<T> {
    let mut out = vec![T::zero()];
    for m in 1..=n {
        // odd index 2m - 1 in the recursion steps the even chain
        let step = T::from_usize(2).unwrap() / T::from_usize(2 * m - 1).unwrap();
        let prev = out.last().unwrap().clone();
        out.push(prev + step);
    }
    out
}

/// Even-index axis value of the Hirota power function:
/// `w_{2n} = prod_{l=1}^{n} (l - 1 + gamma) / (l - gamma)`.
pub fn power_axis_even<T: Field>(gamma: &T, n: usize) -> T {
    let mut acc = T::one();
    for l in 1..=n {
        let num = T::from_usize(l - 1).unwrap() + gamma.clone();
        let den = T::from_usize(l).unwrap() - gamma.clone();
        acc = acc * num / den;
    }
    acc
}

/// Even-index values `w_0, w_2, ..., w_{2n}` from the axis recursion
/// `n (w_{n+1} - w_{n-1}) / (w_{n+1} + w_{n-1}) = (gamma - 1/2)(1 - (-1)^n)`.
pub fn power_axis_even_by_recursion<T: Field>(gamma: &T, n: usize) -> Vec<T> {
    let mut out = vec![T::one()];
    let two = T::from_usize(2).unwrap();
    let one = T::one();
    for m in 1..=n {
        // odd index 2m - 1: (2m-1)(w - u) = (2 gamma - 1)(w + u)
        let idx = T::from_usize(2 * m - 1).unwrap();
        let tg = two.clone() * gamma.clone() - one.clone();
        let prev = out.last().unwrap().clone();
        let w = prev * (idx.clone() + tg.clone()) / (idx - tg);
        out.push(w);
    }
    out
}

/// Point of the branched covering: an unreduced sector index and a lattice
/// point inside (the closure of) the octant of that sector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoveringPoint {
    pub sector: i64,
    pub point: Vec<i64>,
}

impl CoveringPoint {
    pub fn new(sector: i64, point: Vec<i64>) -> Self {
        Self { sector, point }
    }
}

/// Parity of a lattice point: even (`black`) when the coordinate sum is even.
pub fn is_even(n: &[i64]) -> bool {
    n.iter().sum::<i64>().rem_euclid(2) == 0
}

fn local_coords(slopes: &SlopeData, pt: &CoveringPoint) -> Result<Vec<i64>> {
    if pt.point.len() != slopes.dimension() {
        return Err(Error::DimensionMismatch {
            expected: slopes.dimension(),
            got: pt.point.len(),
        });
    }
    if !slopes.sector_contains(pt.sector, &pt.point) {
        return Err(Error::OutsideSector(pt.point.clone(), pt.sector));
    }
    Ok(pt.point.iter().map(|&x| x.abs()).collect())
}

/// Memoized first-octant fill shared by the three lattice systems. Values
/// are stored in local (absolute) coordinates per sector index.
struct OctantMemo {
    values: HashMap<Vec<i64>, C64>,
}

impl OctantMemo {
    fn new() -> Self {
        Self {
            values: HashMap::new(),
        }
    }
}

enum FillRule {
    /// w(u) = w(a) (b_k w(c) - b_j w(b)) / (b_k w(b) - b_j w(c))
    Hirota,
    /// cross-ratio q(z(a), z(b), z(u), z(c)) = b_j^2 / b_k^2
    CrossRatio,
}

/// Deterministic choice of the elementary-step direction pair: among the
/// nonzero coordinates, the pair with the largest label separation
/// `|beta_j - beta_k|`. The fill is an upward recursion, and this keeps its
/// per-level error amplification smallest.
fn best_pair(nonzero: &[usize], betas: &[C64]) -> (usize, usize) {
    let mut best = (nonzero[0], nonzero[1]);
    let mut sep = -1.0f64;
    for a in 0..nonzero.len() {
        for b in (a + 1)..nonzero.len() {
            let (j, k) = (nonzero[a], nonzero[b]);
            let s = (betas[j] - betas[k]).norm();
            if s > sep {
                sep = s;
                best = (j, k);
            }
        }
    }
    best
}

fn fill_value(
    u: &[i64],
    betas: &[C64],
    rule: &FillRule,
    memo: &mut OctantMemo,
    axis: &dyn Fn(usize, i64) -> C64,
) -> Result<C64> {
    if let Some(&v) = memo.values.get(u) {
        return Ok(v);
    }
    let nonzero: Vec<usize> = (0..u.len()).filter(|&k| u[k] != 0).collect();
    let v = if nonzero.len() <= 1 {
        match nonzero.first() {
            None => axis(0, 0),
            Some(&k) => axis(k, u[k]),
        }
    } else {
        let (j, k) = best_pair(&nonzero, betas);
        let mut a = u.to_vec();
        a[j] -= 1;
        a[k] -= 1;
        let mut b = u.to_vec();
        b[k] -= 1; // a + e_j
        let mut c = u.to_vec();
        c[j] -= 1; // a + e_k
        let fa = fill_value(&a, betas, rule, memo, axis)?;
        let fb = fill_value(&b, betas, rule, memo, axis)?;
        let fc = fill_value(&c, betas, rule, memo, axis)?;
        match rule {
            FillRule::Hirota => {
                let den = betas[k] * fb - betas[j] * fc;
                if den.norm() < 1e-14 {
                    return Err(Error::DegenerateStep(u.to_vec()));
                }
                fa * (betas[k] * fc - betas[j] * fb) / den
            }
            FillRule::CrossRatio => {
                let q = (betas[j] / betas[k]).powi(2);
                let den = (fa - fb) + q * (fc - fa);
                if den.norm() < 1e-14 * (fa.norm() + fb.norm() + fc.norm()).max(1.0) {
                    return Err(Error::DegenerateStep(u.to_vec()));
                }
                ((fa - fb) * fc + q * fb * (fc - fa)) / den
            }
        }
    };
    memo.values.insert(u.to_vec(), v);
    Ok(v)
}

/// The discrete logarithm on the branched covering of octants.
///
/// For rhombic slope sets the elementary step ratio is exactly
/// `i cot((theta_k - theta_j)/2)`, so even-parity values stay exactly real
/// and odd-parity values exactly imaginary; the fill runs in split real
/// arithmetic to preserve this in floating point.
pub struct DiscreteLog {
    slopes: SlopeData,
    /// Per sector: the single real coordinate of each value (real part at
    /// even parity, imaginary part at odd parity), in double-double.
    memos: HashMap<i64, HashMap<Vec<i64>, Dd>>,
}

impl DiscreteLog {
    pub fn new(slopes: SlopeData) -> Self {
        Self {
            slopes,
            memos: HashMap::new(),
        }
    }

    pub fn slopes(&self) -> &SlopeData {
        &self.slopes
    }

    /// Axis sequence `f_0, ..., f_N` of the semi-axis `k` in sector `m`.
    pub fn axis_sequence(&self, m: i64, k: usize, len: usize) -> Vec<C64> {
        let branch = self.slopes.axis_log(m, k);
        (0..=len)
            .map(|n| {
                if n % 2 == 0 {
                    C64::new(log_axis_even::<f64>(n / 2), 0.0)
                } else {
                    branch
                }
            })
            .collect()
    }

    /// Branch argument `theta_r` of semi-axis `k` in sector `m`, as an exact
    /// double-double extension of the stored representative arguments.
    fn theta_dd(slopes: &SlopeData, m: i64, k: usize) -> Dd {
        let d = slopes.dimension() as i64;
        let r = slopes.branch_index(m, k);
        let base = slopes.theta_m((r - 1).rem_euclid(d) + 1);
        let q = (r - 1).div_euclid(d);
        Dd::from_f64(base).add(Dd::PI.mul_i64(q))
    }

    fn even_axis_dd(n: usize) -> Dd {
        let mut acc = Dd::ZERO;
        for l in 1..=n {
            acc = acc.add(Dd::from_f64(2.0).div(Dd::from_f64((2 * l - 1) as f64)));
        }
        acc
    }

    fn split_fill(
        u: &[i64],
        cots: &[Vec<Dd>],
        thetas: &[Dd],
        memo: &mut HashMap<Vec<i64>, Dd>,
    ) -> Dd {
        if let Some(&v) = memo.get(u) {
            return v;
        }
        let nonzero: Vec<usize> = (0..u.len()).filter(|&k| u[k] != 0).collect();
        let v = match nonzero.len() {
            0 => Dd::ZERO,
            1 => {
                let k = nonzero[0];
                let n = u[k];
                if n % 2 == 0 {
                    Self::even_axis_dd((n / 2) as usize)
                } else {
                    thetas[k]
                }
            }
            _ => {
                // Smallest |cot| pair: best-conditioned step.
                let (mut j, mut k) = (nonzero[0], nonzero[1]);
                let mut best = f64::INFINITY;
                for a in 0..nonzero.len() {
                    for b in (a + 1)..nonzero.len() {
                        let c = cots[nonzero[a]][nonzero[b]].hi.abs();
                        if c < best {
                            best = c;
                            (j, k) = (nonzero[a], nonzero[b]);
                        }
                    }
                }
                let mut a = u.to_vec();
                a[j] -= 1;
                a[k] -= 1;
                let mut b = u.to_vec();
                b[k] -= 1; // a + e_j
                let mut c = u.to_vec();
                c[j] -= 1; // a + e_k
                let fa = Self::split_fill(&a, cots, thetas, memo);
                let fb = Self::split_fill(&b, cots, thetas, memo);
                let fc = Self::split_fill(&c, cots, thetas, memo);
                // rho = i cot((theta_k - theta_j)/2); multiplying the
                // opposite-parity difference by i flips the sign for even
                // targets and keeps it for odd ones.
                let step = cots[j][k].mul(fb.sub(fc));
                if is_even(u) {
                    fa.sub(step)
                } else {
                    fa.add(step)
                }
            }
        };
        memo.insert(u.to_vec(), v);
        v
    }

    /// Value at a covering point, propagated from the axis data by the
    /// elementary Cauchy-Riemann step inside the octant.
    pub fn value(&mut self, pt: &CoveringPoint) -> Result<C64> {
        let u = local_coords(&self.slopes, pt)?;
        let m = pt.sector;
        let d = self.slopes.dimension();
        let thetas: Vec<Dd> = (0..d).map(|k| Self::theta_dd(&self.slopes, m, k)).collect();
        let cots: Vec<Vec<Dd>> = (0..d)
            .map(|j| {
                (0..d)
                    .map(|k| {
                        if j == k {
                            Dd::ZERO
                        } else {
                            thetas[k].sub(thetas[j]).mul(Dd::from_f64(0.5)).cot()
                        }
                    })
                    .collect()
            })
            .collect();
        let memo = self.memos.entry(m).or_default();
        let v = Self::split_fill(&u, &cots, &thetas, memo).to_f64();
        Ok(if is_even(&u) {
            C64::new(v, 0.0)
        } else {
            C64::new(0.0, v)
        })
    }

    /// Window of local-coordinate values `[0, depth]^d` for sector `m`.
    pub fn octant_window(&mut self, m: i64, depth: i64) -> Result<BrickFunction> {
        let d = self.slopes.dimension();
        let brick = Brick {
            lo: vec![0; d],
            hi: vec![depth; d],
        };
        let eps = self.slopes.signs(m);
        let mut values = Vec::with_capacity(brick.len());
        for u in brick.points() {
            let n: Vec<i64> = u.iter().zip(&eps).map(|(&x, &e)| x * e as i64).collect();
            values.push(self.value(&CoveringPoint::new(m, n))?);
        }
        Ok(BrickFunction::new(brick, values))
    }
}

/// Axis data of the discrete logarithm in sector `m`, all `d` semi-axes up
/// to index `depth` (local coordinates; the shared origin value is 0).
pub fn discrete_log_axes(slopes: &SlopeData, m: i64, depth: usize) -> crate::linear::AxisData {
    let log = DiscreteLog::new(slopes.clone());
    let d = slopes.dimension();
    crate::linear::AxisData {
        origin: C64::new(0.0, 0.0),
        positive: (0..d)
            .map(|k| log.axis_sequence(m, k, depth)[1..].to_vec())
            .collect(),
        negative: vec![Vec::new(); d],
    }
}

/// Green's function of the primal (black) graph of a quasicrystallic rhombic
/// patch: the discrete logarithm pulled back through the lattice lift and
/// divided by `2 pi`. Discrete harmonic away from the base vertex, with
/// Laplacian 1 there.
pub fn greens_function(
    d: &QuadGraph,
    labeling: &EdgeLabeling,
    slopes: &SlopeData,
    x0: usize,
) -> Result<VertexFunction> {
    if !d.is_black(x0) {
        return Err(Error::BaseNotBlack(x0));
    }
    let values = discrete_log_on_patch(d, labeling, slopes, x0)?;
    Ok(values
        .into_iter()
        .filter(|(v, _)| d.is_black(*v))
        .map(|(v, z)| (v, z / std::f64::consts::TAU))
        .collect())
}

/// Discrete logarithm on all patch vertices through the lift, using the
/// smallest sector index in `[1, 2d]` containing each lifted point. Black
/// values are sector-independent; white values carry that branch choice.
pub fn discrete_log_on_patch(
    d: &QuadGraph,
    labeling: &EdgeLabeling,
    slopes: &SlopeData,
    x0: usize,
) -> Result<VertexFunction> {
    let lift = crate::labeling::lift_to_zd(d, labeling, slopes, x0)?;
    let mut log = DiscreteLog::new(slopes.clone());
    let mut out = VertexFunction::new();
    for (v, n) in &lift {
        let m = slopes
            .sector_of(n)
            .ok_or_else(|| Error::OutsideSector(n.clone(), 0))?;
        out.insert(*v, log.value(&CoveringPoint::new(m, n.clone()))?);
    }
    Ok(out)
}

/// Exponent and axis phases of a discrete power function.
#[derive(Debug, Clone)]
pub struct PowerParameters {
    gamma: f64,
    /// Axis phases `rho_k`; `None` selects the canonical power-function
    /// choice `i rho_k = (2 gamma - 1) log(eps_k alpha_k)` per sector.
    rho: Option<Vec<f64>>,
}

impl PowerParameters {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(Error::GammaOutOfRange(gamma));
        }
        Ok(Self { gamma, rho: None })
    }

    pub fn with_phases(gamma: f64, rho: Vec<f64>) -> Result<Self> {
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(Error::GammaOutOfRange(gamma));
        }
        Ok(Self {
            gamma,
            rho: Some(rho),
        })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

/// The discrete power functions `w^{2 gamma - 1}` (Hirota variables) and
/// `z^{2 gamma}` (cross-ratio variables) on the branched covering.
pub struct DiscretePower {
    slopes: SlopeData,
    params: PowerParameters,
    memo_w: HashMap<i64, OctantMemo>,
    memo_z: HashMap<i64, OctantMemo>,
}

impl DiscretePower {
    pub fn new(slopes: SlopeData, params: PowerParameters) -> Self {
        Self {
            slopes,
            params,
            memo_w: HashMap::new(),
            memo_z: HashMap::new(),
        }
    }

    pub fn gamma(&self) -> f64 {
        self.params.gamma
    }

    fn odd_axis_w(&self, m: i64, k: usize) -> C64 {
        match &self.params.rho {
            Some(rho) => C64::new(0.0, rho[k]).exp(),
            None => {
                let log_branch = self.slopes.axis_log(m, k);
                (log_branch * (2.0 * self.params.gamma - 1.0)).exp()
            }
        }
    }

    fn axis_z(&self, m: i64, k: usize, n: i64) -> C64 {
        // z_0 = 0, z_1 = (eps_k alpha_k)^{2 gamma}, then
        // n (z_{n+1} - z_n)(z_n - z_{n-1}) / (z_{n+1} - z_{n-1}) = gamma z_n.
        let gamma = self.params.gamma;
        let mut prev = C64::new(0.0, 0.0);
        if n == 0 {
            return prev;
        }
        let mut cur = (self.slopes.axis_log(m, k) * 2.0 * gamma).exp();
        for step in 1..n {
            let s = step as f64;
            let diff = cur - prev;
            let num = cur * (diff * s - prev * gamma);
            let den = diff * s - cur * gamma;
            let next = num / den;
            prev = cur;
            cur = next;
        }
        cur
    }

    /// Hirota-variable power function at a covering point.
    pub fn value_w(&mut self, pt: &CoveringPoint) -> Result<C64> {
        let u = local_coords(&self.slopes, pt)?;
        let m = pt.sector;
        let betas = self.slopes.sector_labels(m);
        let gamma = self.params.gamma;
        let odd: Vec<C64> = (0..self.slopes.dimension())
            .map(|k| self.odd_axis_w(m, k))
            .collect();
        let memo = self.memo_w.entry(m).or_insert_with(OctantMemo::new);
        let axis = move |k: usize, n: i64| {
            if n % 2 == 0 {
                C64::new(power_axis_even(&gamma, (n / 2) as usize), 0.0)
            } else {
                odd[k]
            }
        };
        fill_value(&u, &betas, &FillRule::Hirota, memo, &axis)
    }

    /// Cross-ratio-variable power function at a covering point.
    pub fn value_z(&mut self, pt: &CoveringPoint) -> Result<C64> {
        let u = local_coords(&self.slopes, pt)?;
        let m = pt.sector;
        let betas = self.slopes.sector_labels(m);
        let axes: Vec<Vec<C64>> = (0..self.slopes.dimension())
            .map(|k| {
                let len = *u.iter().max().unwrap_or(&0) + 1;
                (0..=len).map(|n| self.axis_z(m, k, n)).collect()
            })
            .collect();
        let memo = self.memo_z.entry(m).or_insert_with(OctantMemo::new);
        let axis = move |k: usize, n: i64| axes[k][n as usize];
        fill_value(&u, &betas, &FillRule::CrossRatio, memo, &axis)
    }

    /// Local-coordinate window `[0, depth]^d` of `w` for sector `m`.
    pub fn octant_window_w(&mut self, m: i64, depth: i64) -> Result<BrickFunction> {
        self.window_with(m, depth, |s, pt| s.value_w(pt))
    }

    /// Local-coordinate window `[0, depth]^d` of `z` for sector `m`.
    pub fn octant_window_z(&mut self, m: i64, depth: i64) -> Result<BrickFunction> {
        self.window_with(m, depth, |s, pt| s.value_z(pt))
    }

    fn window_with(
        &mut self,
        m: i64,
        depth: i64,
        mut value: impl FnMut(&mut Self, &CoveringPoint) -> Result<C64>,
    ) -> Result<BrickFunction> {
        let d = self.slopes.dimension();
        let brick = Brick {
            lo: vec![0; d],
            hi: vec![depth; d],
        };
        let eps = self.slopes.signs(m);
        let mut values = Vec::with_capacity(brick.len());
        for u in brick.points() {
            let n: Vec<i64> = u.iter().zip(&eps).map(|(&x, &e)| x * e as i64).collect();
            values.push(value(self, &CoveringPoint::new(m, n))?);
        }
        Ok(BrickFunction::new(brick, values))
    }
}

/// Which isomonodromic constraint to evaluate.
#[derive(Debug, Clone, Copy)]
pub enum ConstraintKind {
    /// `sum n_l (f(n+e_l) - f(n-e_l)) = 1 - (-1)^{|n|}`
    CauchyRiemann,
    /// `sum n_l (w_+ - w_-)/(w_+ + w_-) = (gamma - 1/2)(1 - (-1)^{|n|})`
    Hirota { gamma: f64 },
    /// `sum n_j (z_+ - z)(z - z_-)/(z_+ - z_-) = gamma z`
    CrossRatio { gamma: f64 },
}

/// Max constraint residual of a first-octant window (local coordinates),
/// taken over all points whose needed neighbors lie in the window.
pub fn constraint_residual(f: &BrickFunction, kind: ConstraintKind) -> f64 {
    let brick = f.brick();
    let d = brick.dimension();
    let mut worst = 0.0f64;
    'points: for n in brick.points() {
        for l in 0..d {
            if n[l] > 0 {
                let mut up = n.clone();
                up[l] += 1;
                if !brick.contains(&up) {
                    continue 'points;
                }
            }
        }
        let parity_term = 1.0 - if is_even(&n) { 1.0 } else { -1.0 };
        let mut lhs = C64::new(0.0, 0.0);
        let mut ok = true;
        for l in 0..d {
            if n[l] == 0 {
                continue;
            }
            let mut up = n.clone();
            up[l] += 1;
            let mut dn = n.clone();
            dn[l] -= 1;
            let (fp, fm) = (f.value(&up), f.value(&dn));
            let nl = n[l] as f64;
            match kind {
                ConstraintKind::CauchyRiemann => lhs += (fp - fm) * nl,
                ConstraintKind::Hirota { .. } => {
                    let den = fp + fm;
                    if den.norm() < 1e-14 {
                        ok = false;
                        break;
                    }
                    lhs += (fp - fm) / den * nl;
                }
                ConstraintKind::CrossRatio { .. } => {
                    let fc = f.value(&n);
                    let den = fp - fm;
                    if den.norm() < 1e-14 {
                        ok = false;
                        break;
                    }
                    lhs += (fp - fc) * (fc - fm) / den * nl;
                }
            }
        }
        if !ok {
            continue;
        }
        let rhs = match kind {
            ConstraintKind::CauchyRiemann => C64::new(parity_term, 0.0),
            ConstraintKind::Hirota { gamma } => C64::new((gamma - 0.5) * parity_term, 0.0),
            ConstraintKind::CrossRatio { gamma } => f.value(&n) * gamma,
        };
        worst = worst.max((lhs - rhs).norm());
    }
    worst
}

/// Max deviation of the covering values of two adjacent sectors on the
/// shared part of their octants, up to `depth` in each coordinate.
pub fn sector_overlap_defect(
    slopes: &SlopeData,
    log: &mut DiscreteLog,
    m1: i64,
    m2: i64,
    depth: i64,
) -> Result<f64> {
    let d = slopes.dimension();
    let e1 = slopes.signs(m1);
    let e2 = slopes.signs(m2);
    let brick = Brick {
        lo: (0..d)
            .map(|k| if e1[k] == e2[k] && e1[k] < 0 { -depth } else { 0 })
            .collect(),
        hi: (0..d)
            .map(|k| if e1[k] == e2[k] && e1[k] > 0 { depth } else { 0 })
            .collect(),
    };
    let mut worst = 0.0f64;
    for n in brick.points() {
        let a = log.value(&CoveringPoint::new(m1, n.clone()))?;
        let b = log.value(&CoveringPoint::new(m2, n.clone()))?;
        worst = worst.max((a - b).norm());
    }
    Ok(worst)
}
