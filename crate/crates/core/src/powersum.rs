//! Pure power sums `S(ν) = Σ_k z_k^ν` of unimodular tuples.
//!
//! Angles are measured in turns: `z_k = e(θ_k + α)` with `e(x) = exp(2πix)`.
//! For an `n`-tuple the horizon is `ν = 1..n² − n` and `m = n² − n + 1`.
//!
//! Besides evaluation this module holds the Fejér-kernel certificate behind
//! the bound `max_ν |S(ν)| ≥ √(n − 1)`, the Newton-Girard coefficients used
//! to detect regular `n`-gons, the Fabrykowski tuple built from a perfect
//! difference set, and the reverse direction: recovering the difference set
//! from a tuple attaining the bound.

use std::ops::Range;

use num_complex::Complex;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::gcd;
use crate::pds::{canonical_form, CanonicalForm, PerfectDifferenceSet};
use crate::Real;

/// Profile tolerance: `|S(ν)|` against `√(n − 1)`.
pub const PROFILE_TOL: f64 = 1e-9;
/// Default tolerance of [`recover_structure`].
pub const RECOVERY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PowerSumError {
    #[error("a tuple needs at least 2 points, got {0}")]
    TooFewPoints(usize),
    #[error("non-finite angle")]
    NonFinite,
    #[error("record says n = {n} but has {len} angles")]
    CountMismatch { n: usize, len: usize },
    #[error("ν = {nu} outside 1..={max}")]
    NuOutOfRange { nu: u64, max: u64 },
    #[error("exponent multiset at ν = {nu} is not uniform over a subgroup")]
    NonUniformExponents { nu: u64 },
}

/// `n²`−`n` for an `n`-tuple: the last exponent of the horizon.
pub fn horizon(n: usize) -> usize {
    n * n - n
}

/// `e(x) = exp(2πix)` for `x` in turns.
pub fn unit<T: Real>(turns: T) -> Complex<T> {
    let angle = T::TAU() * turns.wrap_turns();
    Complex::new(angle.cos(), angle.sin())
}

/// `n ≥ 2` angles `θ_k ∈ [0, 1)` and a global phase `α ∈ [0, 1)`, all in
/// turns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "TupleRecord<T>",
    into = "TupleRecord<T>",
    bound(
        serialize = "T: Real + Serialize",
        deserialize = "T: Real + Deserialize<'de>"
    )
)]
pub struct UnimodularTuple<T> {
    thetas: Vec<T>,
    alpha_turns: T,
}

/// JSON shape `{"n": …, "alpha_turns": …, "thetas": […]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct TupleRecord<T> {
    n: usize,
    alpha_turns: T,
    thetas: Vec<T>,
}

impl<T: Real> TryFrom<TupleRecord<T>> for UnimodularTuple<T> {
    type Error = PowerSumError;

    fn try_from(r: TupleRecord<T>) -> Result<Self, PowerSumError> {
        if r.n != r.thetas.len() {
            return Err(PowerSumError::CountMismatch {
                n: r.n,
                len: r.thetas.len(),
            });
        }
        Self::new(r.thetas, r.alpha_turns)
    }
}

impl<T: Real> From<UnimodularTuple<T>> for TupleRecord<T> {
    fn from(t: UnimodularTuple<T>) -> Self {
        TupleRecord {
            n: t.thetas.len(),
            alpha_turns: t.alpha_turns,
            thetas: t.thetas,
        }
    }
}

impl<T: Real> UnimodularTuple<T> {
    /// Angles are reduced into `[0, 1)`.
    pub fn new(thetas: Vec<T>, alpha_turns: T) -> Result<Self, PowerSumError> {
        if thetas.len() < 2 {
            return Err(PowerSumError::TooFewPoints(thetas.len()));
        }
        if !alpha_turns.is_finite() || thetas.iter().any(|t| !t.is_finite()) {
            return Err(PowerSumError::NonFinite);
        }
        Ok(UnimodularTuple {
            thetas: thetas.into_iter().map(Real::wrap_turns).collect(),
            alpha_turns: alpha_turns.wrap_turns(),
        })
    }

    /// Vertices `c + k/n` of a regular `n`-gon.
    pub fn regular_ngon(n: usize, rotation: T) -> Result<Self, PowerSumError> {
        let thetas = (0..n)
            .map(|k| rotation + T::of_usize(k) / T::of_usize(n))
            .collect();
        Self::new(thetas, T::zero())
    }

    /// `n` copies of the same point.
    pub fn coincident(n: usize, theta: T) -> Result<Self, PowerSumError> {
        Self::new(vec![theta; n], T::zero())
    }

    /// I.i.d. uniform angles, zero phase.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self, PowerSumError> {
        let thetas = (0..n).map(|_| T::of(rng.gen::<f64>())).collect();
        Self::new(thetas, T::zero())
    }

    pub fn n(&self) -> usize {
        self.thetas.len()
    }

    pub fn thetas(&self) -> &[T] {
        &self.thetas
    }

    pub fn alpha_turns(&self) -> T {
        self.alpha_turns
    }

    pub fn with_alpha(&self, alpha_turns: T) -> Self {
        UnimodularTuple {
            thetas: self.thetas.clone(),
            alpha_turns: alpha_turns.wrap_turns(),
        }
    }

    /// Adds `c` to every angle.
    pub fn rotated(&self, c: T) -> Self {
        UnimodularTuple {
            thetas: self.thetas.iter().map(|&t| (t + c).wrap_turns()).collect(),
            alpha_turns: self.alpha_turns,
        }
    }

    /// Adds `delta` to angle `k`.
    pub fn perturbed(&self, k: usize, delta: T) -> Self {
        let mut thetas = self.thetas.clone();
        thetas[k] = (thetas[k] + delta).wrap_turns();
        UnimodularTuple {
            thetas,
            alpha_turns: self.alpha_turns,
        }
    }

    /// `z_k = e(θ_k + α)`.
    pub fn points(&self) -> Vec<Complex<T>> {
        self.thetas
            .iter()
            .map(|&t| unit(t + self.alpha_turns))
            .collect()
    }
}

/// `S(ν)` for `ν ∈ range` (with `range.start ≥ 1`), by running products
/// `z_k^ν = z_k^(ν−1)·z_k`. The first power is taken by squaring.
pub fn power_sums_complex<T: Real>(t: &UnimodularTuple<T>, range: Range<usize>) -> Vec<Complex<T>> {
    assert!(range.start >= 1, "power sums start at ν = 1");
    let z = t.points();
    let mut pw: Vec<Complex<T>> = z.iter().map(|zk| zk.powu(range.start as u32)).collect();
    let mut out = Vec::with_capacity(range.len());
    for _ in range {
        out.push(
            pw.iter()
                .fold(Complex::new(T::zero(), T::zero()), |a, &b| a + b),
        );
        for (p, zk) in pw.iter_mut().zip(&z) {
            *p *= zk;
        }
    }
    out
}

/// `|S(ν)|` and `ε_ν = |S(ν)|² − (n − 1)` for `ν = 1..=nu_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerSumProfile<T> {
    pub n: usize,
    /// `n² − n + 1`.
    pub m: usize,
    pub abs_values: Vec<T>,
    pub epsilons: Vec<T>,
    pub max_abs: T,
}

impl<T: Real> PowerSumProfile<T> {
    fn from_sums(n: usize, sums: &[Complex<T>]) -> Self {
        let base = T::of_usize(n - 1);
        let abs_values: Vec<T> = sums.iter().map(|s| s.norm()).collect();
        let epsilons = sums.iter().map(|s| s.norm_sqr() - base).collect();
        let max_abs = abs_values.iter().copied().fold(T::zero(), T::max);
        PowerSumProfile {
            n,
            m: horizon(n) + 1,
            abs_values,
            epsilons,
            max_abs,
        }
    }

    /// `|S(ν)|` for 1-based `ν`.
    pub fn abs_at(&self, nu: usize) -> T {
        self.abs_values[nu - 1]
    }

    pub fn min_abs(&self) -> T {
        self.abs_values.iter().copied().fold(T::infinity(), T::min)
    }

    /// `max_ν | |S(ν)| − √(n − 1) |`.
    pub fn deviation_from_bound(&self) -> T {
        let target = T::of_usize(self.n - 1).sqrt();
        self.abs_values
            .iter()
            .map(|&a| (a - target).abs())
            .fold(T::zero(), T::max)
    }
}

/// Profile over `ν = 1..=nu_max`.
pub fn power_sums<T: Real>(t: &UnimodularTuple<T>, nu_max: usize) -> PowerSumProfile<T> {
    PowerSumProfile::from_sums(t.n(), &power_sums_complex(t, 1..nu_max + 1))
}

/// Profile over the full horizon `ν = 1..=n² − n`.
pub fn profile<T: Real>(t: &UnimodularTuple<T>) -> PowerSumProfile<T> {
    power_sums(t, horizon(t.n()))
}

/// Same as [`power_sums`], with `ν` split into `chunks` ranges evaluated in
/// parallel.
pub fn power_sums_par<T: Real>(
    t: &UnimodularTuple<T>,
    nu_max: usize,
    chunks: usize,
) -> PowerSumProfile<T> {
    let chunks = chunks.clamp(1, nu_max.max(1));
    let step = nu_max.div_ceil(chunks);
    let sums: Vec<Complex<T>> = (0..chunks)
        .into_par_iter()
        .flat_map_iter(|c| {
            let lo = 1 + c * step;
            let hi = (lo + step).min(nu_max + 1);
            power_sums_complex(t, lo..hi.max(lo))
        })
        .collect();
    PowerSumProfile::from_sums(t.n(), &sums)
}

/// `F_m(t) = (1/m)(sin πmt / sin πt)²`, with the limit `m` at integers.
pub fn fejer_kernel<T: Real>(m: usize, t: T) -> T {
    let mf = T::of_usize(m);
    let x = t - t.round();
    let den = (T::PI() * x).sin();
    if den == T::zero() {
        return mf;
    }
    let r = (T::PI() * mf * x).sin() / den;
    r * r / mf
}

/// Weighted sum `W = Σ_{ν=1}^{n²−n} (1 − ν/m) ε_ν` with `m = n² − n + 1`.
/// Non-negativity of the Fejér kernel forces `W ≥ 0`; in particular some
/// `ε_ν ≥ 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FejerCertificate<T> {
    pub n: usize,
    pub m: usize,
    pub weighted_sum: T,
    /// 1-based `ν` of the largest `ε_ν`.
    pub argmax_nu: usize,
    pub max_epsilon: T,
    /// `1e−9·n²`.
    pub tolerance: T,
    /// `W ≥ −tolerance`.
    pub holds: bool,
}

pub fn fejer_certificate<T: Real>(t: &UnimodularTuple<T>) -> FejerCertificate<T> {
    let n = t.n();
    let p = profile(t);
    let mf = T::of_usize(p.m);
    let weighted_sum = p
        .epsilons
        .iter()
        .enumerate()
        .map(|(i, &e)| (T::one() - T::of_usize(i + 1) / mf) * e)
        .fold(T::zero(), |a, b| a + b);
    let tolerance = T::of(1e-9) * T::of_usize(n * n);
    let max_epsilon = p.epsilons.iter().copied().fold(T::neg_infinity(), T::max);
    // Smallest ν attaining the maximum up to rounding, so ties are stable.
    let argmax = p
        .epsilons
        .iter()
        .position(|&e| e >= max_epsilon - tolerance)
        .unwrap_or(0);
    FejerCertificate {
        n,
        m: p.m,
        weighted_sum,
        argmax_nu: argmax + 1,
        max_epsilon,
        tolerance,
        holds: weighted_sum >= -tolerance,
    }
}

/// Coefficients `a_1..a_n` of `x^n + a_1 x^(n−1) + … + a_n` from power sums
/// `S(1..n)` via `S(ν) + a_1 S(ν−1) + … + a_(ν−1) S(1) + ν a_ν = 0`.
pub fn newton_girard_coeffs<T: Real>(sums: &[Complex<T>]) -> Vec<Complex<T>> {
    let mut a: Vec<Complex<T>> = Vec::with_capacity(sums.len());
    for nu in 1..=sums.len() {
        let mut acc = sums[nu - 1];
        for i in 1..nu {
            acc += a[i - 1] * sums[nu - i - 1];
        }
        a.push(-acc / T::of_usize(nu));
    }
    a
}

/// `|S(ν)| ≤ tol` for `ν = 1..n − 1`: the points form a regular `n`-gon.
pub fn is_regular_ngon<T: Real>(t: &UnimodularTuple<T>, tol: T) -> bool {
    let n = t.n();
    power_sums_complex(t, 1..n).iter().all(|s| s.norm() <= tol)
}

/// Geometric test: sorted angles are spaced `1/n` apart within `tol`.
pub fn is_regular_ngon_geometric<T: Real>(t: &UnimodularTuple<T>, tol: T) -> bool {
    let n = t.n();
    let mut th = t.thetas().to_vec();
    th.sort_by(|a, b| a.partial_cmp(b).expect("finite angles"));
    let gap = T::one() / T::of_usize(n);
    (0..n).all(|k| {
        let next = if k + 1 < n {
            th[k + 1]
        } else {
            th[0] + T::one()
        };
        (next - th[k] - gap).abs() <= tol
    })
}

/// `θ_k = a_k / m`, `m = q² + q + 1`, with the given phase.
pub fn fabrykowski_tuple<T: Real>(
    pds: &PerfectDifferenceSet,
    alpha_turns: T,
) -> UnimodularTuple<T> {
    let m = T::of(pds.modulus() as f64);
    let thetas = pds
        .residues()
        .iter()
        .map(|&a| T::of(a as f64) / m)
        .collect();
    UnimodularTuple::new(thetas, alpha_turns).expect("a difference set has at least 2 residues")
}

/// `|S(ν)|²` of the Fabrykowski tuple of `pds`, computed exactly.
///
/// `|S(ν)|² = n + Σ_d ζ^(νd)` over the ordered differences `d`, with
/// `ζ = e(1/m)`. The differences cover each nonzero residue once, so with
/// `g = gcd(ν, m)` the exponents `νd mod m` cover every nonzero multiple of
/// `g` exactly `g` times and 0 exactly `g − 1` times. The full sum over the
/// multiples of `g` vanishes, leaving `n − 1`. The exponent histogram is
/// checked, not assumed.
pub fn exact_abs_squared(pds: &PerfectDifferenceSet, nu: u64) -> Result<u64, PowerSumError> {
    let m = pds.modulus();
    if nu == 0 || nu >= m {
        return Err(PowerSumError::NuOutOfRange { nu, max: m - 1 });
    }
    let mut hist = vec![0u64; m as usize];
    for d in pds.differences() {
        hist[crate::arith::mul_mod(nu, d, m) as usize] += 1;
    }
    let g = gcd(nu, m);
    let uniform = hist.iter().enumerate().all(|(r, &c)| {
        let expected = match r as u64 {
            0 => g - 1,
            r if r % g == 0 => g,
            _ => 0,
        };
        c == expected
    });
    if !uniform {
        return Err(PowerSumError::NonUniformExponents { nu });
    }
    Ok(pds.len() as u64 - 1)
}

/// Sorted `λ`: a leading 0 plus the `n² − n` differences `θ_k − θ_l mod 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DifferenceSpectrum<T> {
    pub lambdas: Vec<T>,
}

pub fn difference_spectrum<T: Real>(t: &UnimodularTuple<T>) -> DifferenceSpectrum<T> {
    let th = t.thetas();
    let mut lambdas = Vec::with_capacity(horizon(th.len()) + 1);
    lambdas.push(T::zero());
    for (k, &a) in th.iter().enumerate() {
        for (l, &b) in th.iter().enumerate() {
            if k != l {
                lambdas.push((a - b).wrap_turns());
            }
        }
    }
    lambdas.sort_by(|a, b| a.partial_cmp(b).expect("finite angles"));
    DifferenceSpectrum { lambdas }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RecoveryStatus {
    IsMinimizer,
    NotMinimizer,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryResult<T> {
    pub status: RecoveryStatus,
    /// Phase of `z_1`.
    pub alpha_turns: T,
    /// Recovered set, present iff the status is `IsMinimizer`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pds: Option<PerfectDifferenceSet>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub canonical: Option<CanonicalForm>,
    /// `max_ν | |S(ν)| − √(n − 1) |`.
    pub profile_deviation: T,
    /// Largest distance (turns) of `θ_k − θ_1` from the lattice `j/m`.
    pub residual: T,
}

/// Decides whether `t` attains `|S(ν)| = √(n − 1)` on the whole horizon and,
/// if so, recovers the perfect difference set of order `n − 1` with
/// `z_k = α e(a_k / m)`, taking `α = z_1`.
pub fn recover_structure<T: Real>(t: &UnimodularTuple<T>, tol: T) -> RecoveryResult<T> {
    let n = t.n();
    let q = (n - 1) as u64;
    let m = horizon(n) + 1;
    let mf = T::of_usize(m);
    let profile_deviation = profile(t).deviation_from_bound();

    let th = t.thetas();
    let alpha_turns = (th[0] + t.alpha_turns()).wrap_turns();
    let mut residual = T::zero();
    let mut lattice = Vec::with_capacity(n);
    for &theta in th {
        let shifted = (theta - th[0]).wrap_turns();
        let j = (shifted * mf).round();
        residual = residual.max((shifted - j / mf).abs());
        let j = j.to_i64().unwrap_or(0).rem_euclid(m as i64);
        lattice.push(j);
    }

    let pds = if profile_deviation <= tol && residual <= tol {
        PerfectDifferenceSet::new(q, &lattice).ok()
    } else {
        None
    };
    let status = if pds.is_some() {
        RecoveryStatus::IsMinimizer
    } else {
        RecoveryStatus::NotMinimizer
    };
    RecoveryResult {
        status,
        alpha_turns,
        canonical: pds.as_ref().map(canonical_form),
        pds,
        profile_deviation,
        residual,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pds::singer_construct;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    type Tup = UnimodularTuple<f64>;

    fn pds(q: u64, set: &[i64]) -> PerfectDifferenceSet {
        PerfectDifferenceSet::new(q, set).unwrap()
    }

    #[test]
    fn tuple_validation() {
        assert_eq!(
            Tup::new(vec![0.1], 0.0).unwrap_err(),
            PowerSumError::TooFewPoints(1)
        );
        assert_eq!(
            Tup::new(vec![0.1, f64::NAN], 0.0).unwrap_err(),
            PowerSumError::NonFinite
        );
        let t = Tup::new(vec![1.25, -0.25], 2.5).unwrap();
        assert_eq!(t.thetas(), &[0.25, 0.75]);
        assert_eq!(t.alpha_turns(), 0.5);
    }

    #[test]
    fn tuple_json() {
        let t = Tup::new(vec![0.0, 0.5], 0.25).unwrap();
        let s = serde_json::to_string(&t).unwrap();
        assert_eq!(s, r#"{"n":2,"alpha_turns":0.25,"thetas":[0.0,0.5]}"#);
        assert_eq!(serde_json::from_str::<Tup>(&s).unwrap(), t);
        assert!(
            serde_json::from_str::<Tup>(r#"{"n":3,"alpha_turns":0,"thetas":[0,0.5]}"#).is_err()
        );
    }

    #[test]
    fn regular_triangle_profile() {
        let t = Tup::regular_ngon(3, 0.0).unwrap();
        let p = power_sums(&t, 3);
        assert!(p.abs_at(1) < 1e-12 && p.abs_at(2) < 1e-12);
        assert!((p.abs_at(3) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn coincident_points() {
        let t = Tup::coincident(4, 0.3).unwrap();
        for a in power_sums(&t, 12).abs_values {
            assert!((a - 4.0).abs() < 1e-12);
        }
    }

    #[test]
    fn fabrykowski_examples() {
        let d = pds(2, &[0, 1, 3]);
        let t: Tup = fabrykowski_tuple(&d, 0.0);
        assert_eq!(t.thetas(), &[0.0, 1.0 / 7.0, 3.0 / 7.0]);
        let p = profile(&t);
        assert_eq!(p.abs_values.len(), 6);
        for a in &p.abs_values {
            assert!((a - 2f64.sqrt()).abs() < 1e-12);
        }
        let t2: Tup = fabrykowski_tuple(&pds(1, &[0, 1]), 0.0);
        assert_eq!(t2.thetas(), &[0.0, 1.0 / 3.0]);
        for a in profile(&t2).abs_values {
            assert!((a - 1.0).abs() < 1e-12);
        }
        for alpha in [0.1, 0.77, 0.5] {
            let p2 = profile(&t.with_alpha(alpha));
            assert!((p2.max_abs - p.max_abs).abs() < 1e-12);
        }
    }

    #[test]
    fn fejer_kernel_values() {
        assert_eq!(fejer_kernel(7, 0.0), 7.0);
        assert_eq!(fejer_kernel(7, 3.0), 7.0);
        assert!(fejer_kernel(2, 0.5f64).abs() < 1e-15);
        // Oracle: the cosine series Σ_{|ν|<m} (1 − |ν|/m) e(νt).
        let series = |m: usize, t: f64| {
            let mut s = 1.0;
            for nu in 1..m {
                s += 2.0
                    * (1.0 - nu as f64 / m as f64)
                    * (std::f64::consts::TAU * nu as f64 * t).cos();
            }
            s
        };
        for m in [1usize, 2, 5, 13, 43] {
            for i in 0..200 {
                let t = -1.3 + i as f64 * 0.0137;
                let f = fejer_kernel(m, t);
                assert!(f >= 0.0);
                assert!((f - series(m, t)).abs() < 1e-9 * m as f64, "m={m} t={t}");
            }
        }
    }

    #[test]
    fn certificate_cases() {
        let fab: Tup = fabrykowski_tuple(&pds(2, &[0, 1, 3]), 0.0);
        let c = fejer_certificate(&fab);
        assert!(c.holds);
        assert!(c.weighted_sum.abs() < 1e-12);
        assert!(c.max_epsilon.abs() < 1e-12);

        // Regular n-gon: S(ν) = 0 unless n | ν, where it is n.
        for n in 2..7usize {
            let t = Tup::regular_ngon(n, 0.1).unwrap();
            let p = profile(&t);
            for (i, &e) in p.epsilons.iter().enumerate() {
                let nu = i + 1;
                let expected = if nu % n == 0 {
                    (n * n - (n - 1)) as f64
                } else {
                    -((n - 1) as f64)
                };
                assert!((e - expected).abs() < 1e-9, "n={n} ν={nu}");
            }
            let c = fejer_certificate(&t);
            assert!(c.holds && c.weighted_sum >= 0.0);
            assert_eq!(c.argmax_nu, n);
        }
    }

    /// Coefficients of Π (x − z_k), leading 1 dropped.
    fn expand(z: &[Complex<f64>]) -> Vec<Complex<f64>> {
        let mut c = vec![Complex::new(1.0, 0.0)];
        for &zk in z {
            let mut next = vec![Complex::new(0.0, 0.0); c.len() + 1];
            for (i, &ci) in c.iter().enumerate() {
                next[i] += ci;
                next[i + 1] -= ci * zk;
            }
            c = next;
        }
        c[1..].to_vec()
    }

    #[test]
    fn newton_girard_examples() {
        let c = |re: f64| Complex::new(re, 0.0);
        let a = newton_girard_coeffs(&[c(0.0), c(0.0), c(3.0)]);
        assert_eq!(a, vec![c(0.0), c(0.0), c(-1.0)]);
        assert_eq!(newton_girard_coeffs(&[c(2.0)]), vec![c(-2.0)]);
        // Rotated pentagon: a_1..a_4 vanish, a_5 = −w with |w| = 1.
        let t = Tup::regular_ngon(5, 0.123).unwrap();
        let a = newton_girard_coeffs(&power_sums_complex(&t, 1..6));
        for ai in &a[..4] {
            assert!(ai.norm() < 1e-12);
        }
        assert!((a[4].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn newton_girard_matches_expansion() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 2..9 {
            for _ in 0..20 {
                let t = Tup::random(n, &mut rng).unwrap().with_alpha(rng.gen());
                let a = newton_girard_coeffs(&power_sums_complex(&t, 1..n + 1));
                let e = expand(&t.points());
                for (x, y) in a.iter().zip(&e) {
                    assert!((x - y).norm() <= 1e-9 * y.norm().max(1.0), "n={n}");
                }
            }
        }
    }

    #[test]
    fn newton_girard_single_point() {
        let z = unit(0.3f64);
        let a = newton_girard_coeffs(&[z]);
        assert!((a[0] + z).norm() < 1e-15);
        assert_eq!(expand(&[z]), vec![-z]);
    }

    #[test]
    fn ngon_detection() {
        assert!(is_regular_ngon(
            &Tup::new(vec![0.0, 1.0 / 3.0, 2.0 / 3.0], 0.0).unwrap(),
            1e-9
        ));
        let sq = Tup::new(vec![0.0, 0.25, 0.5, 0.75], 0.0)
            .unwrap()
            .rotated(0.137);
        assert!(is_regular_ngon(&sq, 1e-9));
        assert!(is_regular_ngon_geometric(&sq, 1e-9));
        let bad = Tup::new(vec![0.0, 1.0 / 3.0, 0.5], 0.0).unwrap();
        assert!(power_sums(&bad, 1).abs_at(1) > 0.1);
        assert!(!is_regular_ngon(&bad, 1e-9));
        assert!(!is_regular_ngon_geometric(&bad, 1e-9));
    }

    #[test]
    fn exact_values() {
        let d = pds(2, &[0, 1, 3]);
        assert_eq!(exact_abs_squared(&d, 1), Ok(2));
        assert_eq!(exact_abs_squared(&d, 6), Ok(2));
        let t: Tup = fabrykowski_tuple(&d, 0.0);
        assert!((profile(&t).abs_at(6).powi(2) - 2.0).abs() < 1e-12);
        assert_eq!(exact_abs_squared(&pds(1, &[0, 1]), 2), Ok(1));
        assert_eq!(
            exact_abs_squared(&d, 0),
            Err(PowerSumError::NuOutOfRange { nu: 0, max: 6 })
        );
        assert_eq!(
            exact_abs_squared(&d, 7),
            Err(PowerSumError::NuOutOfRange { nu: 7, max: 6 })
        );
        // m = 21 is composite: ν = 7 and ν = 3 share factors with it.
        let d4 = singer_construct(4).unwrap();
        for nu in [3, 7, 9, 14] {
            assert_eq!(exact_abs_squared(&d4, nu), Ok(4));
        }
    }

    #[test]
    fn spectrum_examples() {
        let t: Tup = fabrykowski_tuple(&pds(2, &[0, 1, 3]), 0.0);
        let s = difference_spectrum(&t);
        assert_eq!(s.lambdas.len(), 7);
        for (j, l) in s.lambdas.iter().enumerate() {
            assert!((l - j as f64 / 7.0).abs() < 1e-12);
        }
        let z = difference_spectrum(&Tup::new(vec![0.0, 0.0], 0.0).unwrap());
        assert_eq!(z.lambdas, vec![0.0, 0.0, 0.0]);

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let r = Tup::random(3, &mut rng).unwrap();
        let s = difference_spectrum(&r);
        assert_eq!(s.lambdas.len(), 7);
        assert!(s.lambdas.windows(2).all(|w| w[0] <= w[1]));
        let mut mirrored: Vec<f64> = s.lambdas[1..].iter().map(|l| 1.0 - l).collect();
        mirrored.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (a, b) in mirrored.iter().zip(&s.lambdas[1..]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn recovery_examples() {
        let d = pds(2, &[0, 1, 3]);
        let t: Tup = fabrykowski_tuple(&d, 0.2931);
        let r = recover_structure(&t, RECOVERY_TOL);
        assert_eq!(r.status, RecoveryStatus::IsMinimizer);
        assert_eq!(r.canonical.unwrap().residues, vec![0, 1, 3]);
        assert!((r.alpha_turns - 0.2931).abs() < 1e-12);

        for n in 3..7 {
            let g = Tup::regular_ngon(n, 0.0).unwrap();
            assert_eq!(
                recover_structure(&g, RECOVERY_TOL).status,
                RecoveryStatus::NotMinimizer
            );
        }

        let bumped = t.perturbed(1, 1e-3);
        let r = recover_structure(&bumped, RECOVERY_TOL);
        assert_eq!(r.status, RecoveryStatus::NotMinimizer);
        assert!(r.pds.is_none());
        assert!(r.profile_deviation > 1e-4);
    }

    #[test]
    fn recovery_with_rotation_and_shuffle() {
        let d = singer_construct(3).unwrap();
        let t: Tup = fabrykowski_tuple(&d, 0.0);
        let mut th = t.thetas().to_vec();
        th.reverse();
        let shuffled = Tup::new(th, 0.4).unwrap().rotated(0.61);
        let r = recover_structure(&shuffled, RECOVERY_TOL);
        assert_eq!(r.status, RecoveryStatus::IsMinimizer);
        assert_eq!(r.canonical, Some(canonical_form(&d)));
    }

    #[test]
    fn parallel_profile_matches_serial() {
        let d = singer_construct(7).unwrap();
        let t: Tup = fabrykowski_tuple(&d, 0.3);
        let serial = profile(&t);
        for chunks in [1, 2, 3, 7, 100] {
            let par = power_sums_par(&t, horizon(t.n()), chunks);
            for (a, b) in serial.abs_values.iter().zip(&par.abs_values) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn f32_profile() {
        let d = pds(2, &[0, 1, 3]);
        let t: UnimodularTuple<f32> = fabrykowski_tuple(&d, 0.0);
        let p = profile(&t);
        assert!((p.max_abs - 2f32.sqrt()).abs() < 1e-5);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn tuple() -> impl Strategy<Value = Tup> {
            (2usize..8)
                .prop_flat_map(|n| (proptest::collection::vec(0.0f64..1.0, n), 0.0f64..1.0))
                .prop_map(|(th, a)| Tup::new(th, a).unwrap())
        }

        proptest! {
            #[test]
            fn lower_bound_and_certificate(t in tuple()) {
                let c = fejer_certificate(&t);
                prop_assert!(c.holds, "W = {}", c.weighted_sum);
                prop_assert!(c.max_epsilon >= -c.tolerance);
                let bound = ((t.n() - 1) as f64).sqrt();
                prop_assert!(profile(&t).max_abs >= bound - 1e-9);
            }

            #[test]
            fn phase_invariance(t in tuple(), a in 0.0f64..1.0) {
                let p = profile(&t);
                let p2 = profile(&t.with_alpha(a));
                for (x, y) in p.abs_values.iter().zip(&p2.abs_values) {
                    prop_assert!((x - y).abs() < 1e-12);
                }
            }

            #[test]
            fn ngon_tests_agree(n in 2usize..9, rot in 0.0f64..1.0, bump in prop_oneof![Just(0.0), 0.01f64..0.2]) {
                let t = Tup::regular_ngon(n, rot).unwrap().perturbed(0, bump);
                prop_assert_eq!(is_regular_ngon(&t, 1e-9), is_regular_ngon_geometric(&t, 1e-9));
            }
        }
    }
}
