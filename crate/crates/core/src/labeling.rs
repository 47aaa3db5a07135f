//! Edge labelings of quad-graphs, parallelogram/rhombic realizations, the
//! Cauchy-Riemann weights they induce, slope data of quasicrystallic
//! embeddings, and the lift onto a multidimensional lattice.
//!
//! A labeling assigns a complex number to every directed edge so that
//! reversal flips the sign and opposite, equally directed sides of a face
//! carry equal values. Such labelings are exactly the edge vectors
//! `alpha(x, y) = p(y) - p(x)` of parallelogram realizations; unimodular
//! labels give rhombic realizations. When the label set is finite,
//! `A = {±alpha_1, ..., ±alpha_d}`, the quad-graph lifts into `Z^d` by
//! sending each edge with slope `±alpha_k` to the lattice step `±e_k`.

use std::collections::{BTreeMap, HashMap, VecDeque};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::graph::{Color, QuadGraph};
use crate::C64;

/// Absolute tolerance for recognizing two labels as equal.
pub const LABEL_TOL: f64 = 1e-9;
/// Two non-opposite labels closer to parallel than this are rejected.
pub const PARALLEL_TOL: f64 = 1e-12;

/// Labels of directed edges, stored once per undirected edge in the
/// black-to-white direction.
#[derive(Debug, Clone)]
pub struct EdgeLabeling {
    /// `alpha(black -> white)` per edge id of the underlying quad-graph.
    values: Vec<C64>,
}

impl EdgeLabeling {
    pub fn from_black_to_white(values: Vec<C64>) -> Self {
        Self { values }
    }

    /// Label of the directed edge `from -> to`.
    pub fn alpha(&self, d: &QuadGraph, from: usize, to: usize) -> Result<C64> {
        let id = d
            .edge_id(from, to)
            .ok_or(Error::MissingWeight(from, to))?;
        let v = self.values[id];
        Ok(if d.is_black(from) { v } else { -v })
    }

    /// The two labels `(alpha0, alpha1)` of a face: `alpha0` on side
    /// `(x0, y0)`, `alpha1` on side `(x0, y1)`.
    pub fn face_labels(&self, d: &QuadGraph, face: usize) -> Result<(C64, C64)> {
        let f = &d.faces()[face];
        Ok((
            self.alpha(d, f.x0, f.y0)?,
            self.alpha(d, f.x0, f.y1)?,
        ))
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }
}

/// A realization `p: V(D) -> C` whose faces are parallelograms; `rhombic`
/// records that all edges are unit within tolerance.
#[derive(Debug, Clone)]
pub struct Realization {
    positions: Vec<C64>,
    rhombic: bool,
}

impl Realization {
    pub fn new(positions: Vec<C64>, d: &QuadGraph) -> Result<Self> {
        let mut rhombic = true;
        for &(u, v) in d.edges() {
            let len = (positions[v] - positions[u]).norm();
            if (len - 1.0).abs() > LABEL_TOL {
                rhombic = false;
            }
        }
        Ok(Self { positions, rhombic })
    }

    pub fn position(&self, v: usize) -> C64 {
        self.positions[v]
    }

    pub fn positions(&self) -> &[C64] {
        &self.positions
    }

    pub fn is_rhombic(&self) -> bool {
        self.rhombic
    }

    /// Realization attached to a quad-graph that stores full positions.
    pub fn from_graph(d: &QuadGraph) -> Result<Self> {
        let p = d
            .positions()
            .ok_or(Error::MissingPosition(0))?
            .iter()
            .enumerate()
            .map(|(v, z)| z.ok_or(Error::MissingPosition(v)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(p, d)
    }
}

/// Read the labeling off a realization via `alpha(x, y) = p(y) - p(x)`,
/// failing when some face is not a parallelogram within tolerance.
pub fn labeling_from_realization(d: &QuadGraph, p: &Realization) -> Result<EdgeLabeling> {
    let mut values = Vec::with_capacity(d.edges().len());
    for &(u, v) in d.edges() {
        let (b, w) = if d.is_black(u) { (u, v) } else { (v, u) };
        values.push(p.position(w) - p.position(b));
    }
    let labeling = EdgeLabeling::from_black_to_white(values);
    for (fi, f) in d.faces().iter().enumerate() {
        // Opposite and equally directed sides carry equal labels:
        // alpha(x0,y0) = alpha(y1,x1) and alpha(y0,x1) = alpha(x0,y1).
        let a = labeling.alpha(d, f.x0, f.y0)?;
        let a_op = labeling.alpha(d, f.y1, f.x1)?;
        let b = labeling.alpha(d, f.y0, f.x1)?;
        let b_op = labeling.alpha(d, f.x0, f.y1)?;
        let defect = (a - a_op).norm().max((b - b_op).norm());
        if defect > LABEL_TOL {
            return Err(Error::NotParallelogram { face: fi, defect });
        }
    }
    Ok(labeling)
}

/// Weights on primal and dual edges, one reciprocal pair per face.
#[derive(Debug, Clone)]
pub struct WeightFunction {
    /// Per face: weight on the black diagonal; the white diagonal carries the
    /// reciprocal.
    primal: Vec<C64>,
}

impl WeightFunction {
    pub fn primal(&self, face: usize) -> C64 {
        self.primal[face]
    }

    pub fn dual(&self, face: usize) -> C64 {
        1.0 / self.primal[face]
    }

    pub fn from_primal(primal: Vec<C64>) -> Self {
        Self { primal }
    }

    /// Weight of the edge `(u, v)` of `G` or `G*`, looked up through the face
    /// whose diagonal it is.
    pub fn of_diagonal(&self, d: &QuadGraph, u: usize, v: usize) -> Result<C64> {
        for (fi, f) in d.faces().iter().enumerate() {
            if (f.x0 == u && f.x1 == v) || (f.x0 == v && f.x1 == u) {
                return Ok(self.primal(fi));
            }
            if (f.y0 == u && f.y1 == v) || (f.y0 == v && f.y1 == u) {
                return Ok(self.dual(fi));
            }
        }
        Err(Error::MissingWeight(u, v))
    }
}

/// Cauchy-Riemann weights induced by a labeling:
/// `nu(y0, y1) = 1 / nu(x0, x1) = i (alpha1 + alpha0) / (alpha1 - alpha0)`.
/// For rhombic labelings the weights are real positive, `nu = tan(phi/2)`.
pub fn weights_from_labeling(d: &QuadGraph, labeling: &EdgeLabeling) -> Result<WeightFunction> {
    let mut primal = Vec::with_capacity(d.faces().len());
    for fi in 0..d.faces().len() {
        let (a0, a1) = labeling.face_labels(d, fi)?;
        if (a1 - a0).norm() <= PARALLEL_TOL * (a0.norm() + a1.norm()).max(1.0) {
            return Err(Error::DegenerateFace(fi));
        }
        let dual = C64::i() * (a1 + a0) / (a1 - a0);
        primal.push(1.0 / dual);
    }
    Ok(WeightFunction { primal })
}

/// Rhombus half-angle form `nu = tan(phi/2)`, `phi` in `(0, pi)`.
pub fn angle_from_weight(nu: C64) -> f64 {
    2.0 * nu.re.atan()
}

/// Multiplicative integrability test: at every interior black vertex the
/// star product of `(1 + i nu) / (1 - i nu)` over primal edges equals 1, and
/// dually at white vertices. For weights from a rhombic labeling each factor
/// is `exp(i phi)`, so this is the angle-sum condition.
pub fn check_integrability(d: &QuadGraph, weights: &WeightFunction, tol: f64) -> (bool, f64) {
    let mut worst = 0.0f64;
    for v in 0..d.vertex_count() {
        let Ok(flower) = d.flower(v) else { continue };
        if !flower.closed {
            continue;
        }
        let mut prod = C64::new(1.0, 0.0);
        for petal in &flower.entries {
            let nu = match d.color(v) {
                Color::Black => weights.primal(petal.face),
                Color::White => weights.dual(petal.face),
            };
            prod *= (1.0 + C64::i() * nu) / (1.0 - C64::i() * nu);
        }
        worst = worst.max((prod - 1.0).norm());
    }
    (worst <= tol, worst)
}

/// Angle-sum defect at interior vertices of a rhombic realization: the
/// rhombus angles around every interior vertex add to a full turn.
pub fn angle_sum_defect(d: &QuadGraph, weights: &WeightFunction) -> f64 {
    let mut worst = 0.0f64;
    for v in 0..d.vertex_count() {
        let Ok(flower) = d.flower(v) else { continue };
        if !flower.closed {
            continue;
        }
        let sum: f64 = flower
            .entries
            .iter()
            .map(|petal| {
                let nu = match d.color(v) {
                    Color::Black => weights.primal(petal.face),
                    Color::White => weights.dual(petal.face),
                };
                angle_from_weight(nu)
            })
            .sum();
        let defect = (sum / std::f64::consts::TAU - (sum / std::f64::consts::TAU).round()).abs()
            * std::f64::consts::TAU;
        worst = worst.max(defect);
    }
    worst
}

/// Slope data of a quasicrystallic labeling: representatives
/// `alpha_1, ..., alpha_d` sorted by principal argument so that the circular
/// order on the unit circle is `alpha_1, ..., alpha_d, -alpha_1, ...,
/// -alpha_d`, together with argument assignments `theta_m` satisfying
/// `theta_{m+d} = theta_m + pi`.
#[derive(Debug, Clone, PartialEq)]
pub struct SlopeData {
    labels: Vec<C64>,
    thetas: Vec<f64>,
}

impl SlopeData {
    /// Collect the distinct labels of a labeling (up to `LABEL_TOL`), pair
    /// them into `±alpha_k`, and order by principal argument. Rejects label
    /// sets containing a parallel non-opposite pair.
    pub fn from_labeling(labeling: &EdgeLabeling) -> Result<Self> {
        let mut reps: Vec<C64> = Vec::new();
        for &a in labeling.values() {
            let covered = reps
                .iter()
                .any(|&r| (r - a).norm() <= LABEL_TOL || (r + a).norm() <= LABEL_TOL);
            if !covered {
                reps.push(a);
            }
        }
        Self::from_representatives(reps)
    }

    /// Build from one representative per `±` pair.
    pub fn from_representatives(reps: Vec<C64>) -> Result<Self> {
        for i in 0..reps.len() {
            for j in (i + 1)..reps.len() {
                let cross = (reps[i].conj() * reps[j]).im.abs();
                if cross < PARALLEL_TOL {
                    return Err(Error::ParallelSlopes(i, j));
                }
            }
        }
        // Sort all 2d points by principal argument in [0, 2 pi); the first d
        // form a half-plane fan and are the canonical representatives.
        let mut points: Vec<C64> = reps.iter().flat_map(|&a| [a, -a]).collect();
        let principal = |z: &C64| {
            let t = z.arg();
            if t < 0.0 {
                t + std::f64::consts::TAU
            } else {
                t
            }
        };
        points.sort_by(|a, b| principal(a).total_cmp(&principal(b)));
        let d = reps.len();
        let labels: Vec<C64> = points[..d].to_vec();
        let thetas: Vec<f64> = labels.iter().map(principal).collect();
        Ok(Self { labels, thetas })
    }

    pub fn dimension(&self) -> usize {
        self.labels.len()
    }

    /// Canonical representatives `alpha_1..alpha_d` (1-based in formulas,
    /// 0-based through this accessor).
    pub fn labels(&self) -> &[C64] {
        &self.labels
    }

    /// `alpha_m` for any integer `m` (1-based), extended by
    /// `alpha_{k+d} = -alpha_k` and `2d`-periodicity.
    pub fn alpha_m(&self, m: i64) -> C64 {
        let d = self.dimension() as i64;
        let r = (m - 1).rem_euclid(2 * d);
        if r < d {
            self.labels[r as usize]
        } else {
            -self.labels[(r - d) as usize]
        }
    }

    /// Argument assignment `theta_m`, strictly increasing in `m` with
    /// `theta_{m+d} = theta_m + pi`.
    pub fn theta_m(&self, m: i64) -> f64 {
        let d = self.dimension() as i64;
        let r = (m - 1).rem_euclid(d);
        let q = (m - 1).div_euclid(d);
        self.thetas[r as usize] + q as f64 * std::f64::consts::PI
    }

    /// Sign vector of the sector with index `m`: the set
    /// `A_m = {alpha_m, ..., alpha_{m+d-1}}` contains `eps_k(m) * alpha_k`.
    pub fn signs(&self, m: i64) -> Vec<i8> {
        let d = self.dimension() as i64;
        let mm = (m - 1).rem_euclid(2 * d) + 1;
        (1..=d)
            .map(|k| {
                if mm <= d {
                    if k < mm {
                        -1
                    } else {
                        1
                    }
                } else if k < mm - d {
                    1
                } else {
                    -1
                }
            })
            .collect()
    }

    /// For sector `m` and axis `k` (0-based), the index `r` in
    /// `[m, m+d-1]` with `alpha_r = eps_k alpha_k`, carrying the branch
    /// `log(eps_k alpha_k) = i theta_r`.
    pub fn branch_index(&self, m: i64, k: usize) -> i64 {
        let d = self.dimension() as i64;
        for r in m..(m + d) {
            if (r - 1).rem_euclid(d) == k as i64 {
                return r;
            }
        }
        unreachable!("every residue class appears among d consecutive indices")
    }

    /// Branch value `log(eps_k(m) alpha_k)` for the semi-axis `k` of sector
    /// `m`; for unimodular labels this is `i theta_r`.
    pub fn axis_log(&self, m: i64, k: usize) -> C64 {
        let r = self.branch_index(m, k);
        let modulus = self.labels[k].norm();
        C64::new(modulus.ln(), self.theta_m(r))
    }

    /// Match a complex label against the slope set: returns `(k, sign)` with
    /// `value ~ sign * alpha_k` (0-based `k`).
    pub fn classify(&self, value: C64) -> Result<(usize, i8)> {
        for (k, &a) in self.labels.iter().enumerate() {
            if (value - a).norm() <= LABEL_TOL {
                return Ok((k, 1));
            }
            if (value + a).norm() <= LABEL_TOL {
                return Ok((k, -1));
            }
        }
        Err(Error::UnknownSlope {
            re: value.re,
            im: value.im,
        })
    }

    /// Does the lattice point lie in the closed octant of sector `m`?
    pub fn sector_contains(&self, m: i64, n: &[i64]) -> bool {
        let eps = self.signs(m);
        n.iter()
            .zip(&eps)
            .all(|(&nk, &ek)| nk == 0 || (nk > 0) == (ek > 0))
    }

    /// Smallest sector index in `[1, 2d]` containing the point.
    pub fn sector_of(&self, n: &[i64]) -> Option<i64> {
        (1..=2 * self.dimension() as i64).find(|&m| self.sector_contains(m, n))
    }

    /// Effective positive-octant labels `beta_k = eps_k(m) alpha_k` of a
    /// sector.
    pub fn sector_labels(&self, m: i64) -> Vec<C64> {
        let eps = self.signs(m);
        self.labels
            .iter()
            .zip(&eps)
            .map(|(&a, &e)| if e > 0 { a } else { -a })
            .collect()
    }

    /// Generic version of the labels for scalar-generic kernels.
    pub fn labels_as<S: crate::num::Scalar>(&self) -> Vec<Complex<S>> {
        self.labels
            .iter()
            .map(|a| {
                Complex::new(
                    S::from_f64(a.re).expect("scalar conversion"),
                    S::from_f64(a.im).expect("scalar conversion"),
                )
            })
            .collect()
    }
}

/// Axis-aligned box in `Z^d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Brick {
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
}

impl Brick {
    pub fn dimension(&self) -> usize {
        self.lo.len()
    }

    pub fn contains(&self, n: &[i64]) -> bool {
        n.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(&x, (&l, &h))| l <= x && x <= h)
    }

    pub fn len(&self) -> usize {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(&l, &h)| (h - l + 1) as usize)
            .product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Row-major offset of a point.
    pub fn offset(&self, n: &[i64]) -> usize {
        let mut off = 0usize;
        for k in 0..self.dimension() {
            let w = (self.hi[k] - self.lo[k] + 1) as usize;
            off = off * w + (n[k] - self.lo[k]) as usize;
        }
        off
    }

    pub fn points(&self) -> BrickIter {
        BrickIter {
            brick: self.clone(),
            cur: Some(self.lo.clone()),
        }
    }
}

pub struct BrickIter {
    brick: Brick,
    cur: Option<Vec<i64>>,
}

impl Iterator for BrickIter {
    type Item = Vec<i64>;

    fn next(&mut self) -> Option<Vec<i64>> {
        let cur = self.cur.take()?;
        let mut next = cur.clone();
        for k in (0..self.brick.dimension()).rev() {
            next[k] += 1;
            if next[k] <= self.brick.hi[k] {
                self.cur = Some(next);
                return Some(cur);
            }
            next[k] = self.brick.lo[k];
        }
        self.cur = None;
        Some(cur)
    }
}

/// Coordinate-wise bounding brick of a point set (its hull under completing
/// elementary squares).
pub fn compute_hull<'a, I: IntoIterator<Item = &'a [i64]>>(points: I) -> Result<Brick> {
    let mut it = points.into_iter();
    let first = it.next().ok_or(Error::EmptyHull)?;
    let mut lo = first.to_vec();
    let mut hi = first.to_vec();
    for p in it {
        if p.len() != lo.len() {
            return Err(Error::DimensionMismatch {
                expected: lo.len(),
                got: p.len(),
            });
        }
        for k in 0..p.len() {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    Ok(Brick { lo, hi })
}

/// Lift of the quad-graph onto `Z^d`: `P(x0) = 0` and
/// `P(y) - P(x) = ±e_k` whenever `alpha(x, y) = ±alpha_k`. Fails when some
/// edge label is outside the slope set or the recursion is inconsistent.
pub fn lift_to_zd(
    d: &QuadGraph,
    labeling: &EdgeLabeling,
    slopes: &SlopeData,
    x0: usize,
) -> Result<BTreeMap<usize, Vec<i64>>> {
    let dim = slopes.dimension();
    let mut lift: HashMap<usize, Vec<i64>> = HashMap::new();
    lift.insert(x0, vec![0; dim]);
    let mut queue = VecDeque::from([x0]);
    while let Some(u) = queue.pop_front() {
        let pu = lift[&u].clone();
        for v in d.neighbors(u) {
            let (k, sign) = slopes.classify(labeling.alpha(d, u, v)?)?;
            let mut pv = pu.clone();
            pv[k] += sign as i64;
            match lift.get(&v) {
                None => {
                    lift.insert(v, pv);
                    queue.push_back(v);
                }
                Some(existing) => {
                    if *existing != pv {
                        return Err(Error::InconsistentLift(v));
                    }
                }
            }
        }
    }
    Ok(lift.into_iter().collect())
}

/// Faces of the lifted surface must be coordinate unit squares; returns the
/// two step directions of each face on success.
pub fn check_lift_faces(
    d: &QuadGraph,
    lift: &BTreeMap<usize, Vec<i64>>,
) -> Result<Vec<(usize, usize)>> {
    let mut out = Vec::with_capacity(d.faces().len());
    for (fi, f) in d.faces().iter().enumerate() {
        let get = |v: usize| lift.get(&v).ok_or(Error::MissingValue(v));
        let (p0, p1) = (get(f.x0)?, get(f.x1)?);
        let (q0, q1) = (get(f.y0)?, get(f.y1)?);
        let mut dirs = Vec::new();
        for k in 0..p0.len() {
            let a = q0[k] - p0[k];
            let b = q1[k] - p0[k];
            if (a != 0 && b != 0) || a.abs() > 1 || b.abs() > 1 {
                return Err(Error::InconsistentLift(f.x0));
            }
            if a != 0 {
                dirs.push(k);
            }
            if b != 0 {
                dirs.push(k);
            }
            if p1[k] - p0[k] != a + b {
                return Err(Error::InconsistentLift(f.x1));
            }
        }
        if dirs.len() != 2 || dirs[0] == dirs[1] {
            return Err(Error::InconsistentLift(fi));
        }
        out.push((dirs[0], dirs[1]));
    }
    Ok(out)
}

/// Vertices reachable from `x0` along directed edges with slopes in
/// `A_m = {alpha_m, ..., alpha_{m+d-1}}`, for each sector index
/// `m = 1..2d`.
pub fn sector_decomposition(
    d: &QuadGraph,
    labeling: &EdgeLabeling,
    slopes: &SlopeData,
    x0: usize,
) -> Result<BTreeMap<i64, Vec<usize>>> {
    let dim = slopes.dimension() as i64;
    let mut out = BTreeMap::new();
    for m in 1..=(2 * dim) {
        let allowed = slopes.sector_labels(m);
        let mut seen = vec![false; d.vertex_count()];
        seen[x0] = true;
        let mut queue = VecDeque::from([x0]);
        while let Some(u) = queue.pop_front() {
            for v in d.neighbors(u) {
                if seen[v] {
                    continue;
                }
                let a = labeling.alpha(d, u, v)?;
                if allowed.iter().any(|&b| (a - b).norm() <= LABEL_TOL) {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        out.insert(
            m,
            (0..d.vertex_count()).filter(|&v| seen[v]).collect(),
        );
    }
    Ok(out)
}
