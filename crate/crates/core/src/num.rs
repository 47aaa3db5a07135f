//! Scalar abstraction and small numeric helpers.
//!
//! The lattice-equation kernels are generic over the floating scalar so the
//! same code runs on `f32` and `f64`; the axis recursions are additionally
//! generic over any commutative field, which lets the tests replay them in
//! exact rational arithmetic. Concrete aliases for the common case live at
//! the crate root ([`crate::Real`], [`crate::C64`]).

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, Num, NumAssign};

/// Floating scalar: `f32` or `f64`.
pub trait Scalar:
    Float + FloatConst + NumAssign + FromPrimitive + std::fmt::Debug + std::fmt::Display + 'static
{
}

impl<T> Scalar for T where
    T: Float + FloatConst + NumAssign + FromPrimitive + std::fmt::Debug + std::fmt::Display + 'static
{
}

/// Field-like scalar for exact recursions: covers floats and `Ratio<BigInt>`.
pub trait Field: Num + FromPrimitive + Clone {}

impl<T> Field for T where T: Num + FromPrimitive + Clone {}

/// Double-double scalar: an unevaluated sum `hi + lo` carrying roughly 32
/// significant digits. The octant fill of the discrete logarithm is an
/// upward recursion whose error amplification grows with the lattice depth
/// and the slope count; running it in double-double keeps the emitted `f64`
/// values correct to the last bit at desk scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };
    /// pi to double-double accuracy.
    pub const PI: Dd = Dd {
        hi: std::f64::consts::PI,
        lo: 1.2246467991473532e-16,
    };

    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    fn two_sum(a: f64, b: f64) -> Dd {
        let s = a + b;
        let bb = s - a;
        let err = (a - (s - bb)) + (b - bb);
        Dd { hi: s, lo: err }
    }

    fn quick_two_sum(a: f64, b: f64) -> Dd {
        let s = a + b;
        Dd { hi: s, lo: b - (s - a) }
    }

    fn two_prod(a: f64, b: f64) -> Dd {
        let p = a * b;
        let err = a.mul_add(b, -p);
        Dd { hi: p, lo: err }
    }

    pub fn add(self, other: Dd) -> Dd {
        let s = Dd::two_sum(self.hi, other.hi);
        let lo = s.lo + self.lo + other.lo;
        Dd::quick_two_sum(s.hi, lo)
    }

    pub fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    pub fn sub(self, other: Dd) -> Dd {
        self.add(other.neg())
    }

    pub fn mul(self, other: Dd) -> Dd {
        let p = Dd::two_prod(self.hi, other.hi);
        let lo = p.lo + self.hi * other.lo + self.lo * other.hi;
        Dd::quick_two_sum(p.hi, lo)
    }

    pub fn div(self, other: Dd) -> Dd {
        let q1 = self.hi / other.hi;
        let r = self.sub(other.mul(Dd::from_f64(q1)));
        let q2 = r.hi / other.hi;
        let r = r.sub(other.mul(Dd::from_f64(q2)));
        let q3 = r.hi / other.hi;
        Dd::quick_two_sum(q1, q2).add(Dd::from_f64(q3))
    }

    pub fn mul_i64(self, n: i64) -> Dd {
        self.mul(Dd::from_f64(n as f64))
    }

    /// Sine by Taylor series; accurate for |x| up to about pi/2 and usable
    /// to |x| < pi.
    pub fn sin(self) -> Dd {
        let x2 = self.mul(self).neg(); // -x^2
        let mut term = self;
        let mut acc = self;
        for k in 1..=24u32 {
            let denom = (2 * k) * (2 * k + 1);
            term = term.mul(x2).div(Dd::from_f64(denom as f64));
            acc = acc.add(term);
        }
        acc
    }

    /// Cosine by Taylor series; same range as [`Dd::sin`].
    pub fn cos(self) -> Dd {
        let x2 = self.mul(self).neg();
        let mut term = Dd::ONE;
        let mut acc = Dd::ONE;
        for k in 1..=24u32 {
            let denom = (2 * k - 1) * (2 * k);
            term = term.mul(x2).div(Dd::from_f64(denom as f64));
            acc = acc.add(term);
        }
        acc
    }

    /// Cotangent, for arguments in `(-pi, 0) ∪ (0, pi)`.
    pub fn cot(self) -> Dd {
        self.cos().div(self.sin())
    }
}

/// SplitMix64: tiny deterministic generator used for fuzz-style tests and
/// sampling spectral parameters. Identical streams on every platform.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1).
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Uniform in [lo, hi).
    pub fn in_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Uniform point on the unit circle.
    pub fn unit(&mut self) -> Complex<f64> {
        Complex::from_polar(1.0, self.in_range(0.0, std::f64::consts::TAU))
    }

    /// Uniform in the square [-1,1] x [-1,1].
    pub fn complex_box(&mut self) -> Complex<f64> {
        Complex::new(self.in_range(-1.0, 1.0), self.in_range(-1.0, 1.0))
    }
}

/// Spectral-parameter samples on a circle of radius `r`, jittered from a seed.
/// Rational-function identities checked at enough generic points certify the
/// identity itself, so the exact sample positions only need determinism.
pub fn lambda_samples(count: usize, r: f64, seed: u64) -> Vec<Complex<f64>> {
    let mut rng = SplitMix64::new(seed);
    (0..count)
        .map(|k| {
            let theta = (k as f64 + 0.3 * rng.next_f64()) * std::f64::consts::TAU / count as f64;
            Complex::from_polar(r, theta)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splitmix_is_deterministic() {
        let a: Vec<u64> = (0..4).map(|_| SplitMix64::new(7).next_u64()).collect();
        let b = SplitMix64::new(7).next_u64();
        assert_eq!(a[0], b);
    }

    #[test]
    fn lambda_samples_stay_on_circle() {
        for z in lambda_samples(12, 3.0, 1) {
            assert!((z.norm() - 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn double_double_trig_hits_known_values() {
        let six = Dd::PI.div(Dd::from_f64(6.0));
        let s = six.sin();
        assert_eq!(s.hi, 0.5);
        assert!(s.lo.abs() < 1e-17);
        let four = Dd::PI.div(Dd::from_f64(4.0));
        let c = four.cot();
        assert_eq!(c.hi, 1.0);
        assert!(c.lo.abs() < 1e-17);
        // Arithmetic keeps the low limb: (1 + 1e-20) - 1 survives.
        let tiny = Dd::from_f64(1e-20);
        let back = Dd::ONE.add(tiny).sub(Dd::ONE);
        assert_eq!(back.to_f64(), 1e-20);
    }
}
