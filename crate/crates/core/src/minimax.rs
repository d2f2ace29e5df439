//! Multi-start numerical minimization of
//! `f(θ) = max_{ν=1..n²−n} |S(ν)|` over unimodular `n`-tuples.
//!
//! Each restart draws uniform angles with `θ_1 = 0` fixed (the objective is
//! rotation invariant), runs gradient descent with backtracking on the
//! log-sum-exp surrogate of `max_ν |S(ν)|²` through an increasing schedule of
//! sharpness parameters `β`, and finishes on the exact objective with a
//! trust-region sequential linear programming loop and a coordinate sweep.
//! A few basin-hopping moves (resample one angle, search again, keep if
//! better) follow unless the restart already sits on the lower bound.
//!
//! The run gathers evidence only: it can reach `√(n − 1)` when a perfect
//! difference set of order `n − 1` exists and otherwise reports the gap it
//! observed.

use microlp::{ComparisonOp, OptimizationDirection, Problem};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::powersum::{horizon, recover_structure, RecoveryResult, UnimodularTuple, RECOVERY_TOL};
use crate::Real;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OptimizerError {
    #[error("invalid optimizer configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig<T> {
    pub n: usize,
    pub restarts: usize,
    /// Iteration cap per smoothing stage and per polish loop.
    pub max_iters: usize,
    pub seed: u64,
    /// Strictly increasing surrogate sharpness schedule.
    pub smoothing_betas: Vec<T>,
    /// Smallest trust radius / coordinate step of the polish, in turns.
    pub polish_tol: T,
    /// Basin-hopping moves per restart: one angle is resampled and the
    /// local search rerun, keeping the result only if it improves.
    #[serde(default)]
    pub hops: usize,
    /// Worker threads for the restarts; 0 uses the rayon default.
    #[serde(default)]
    pub threads: usize,
    /// Keep per-iteration traces.
    #[serde(default)]
    pub trace: bool,
}

impl<T: Real> OptimizerConfig<T> {
    pub fn new(n: usize) -> Self {
        OptimizerConfig {
            n,
            restarts: 50,
            max_iters: 500,
            seed: 0,
            smoothing_betas: [1.0, 4.0, 16.0, 64.0].map(T::of).to_vec(),
            polish_tol: T::of(1e-13),
            hops: 10,
            threads: 0,
            trace: false,
        }
    }

    pub fn validate(&self) -> Result<(), OptimizerError> {
        let bad = |s: &str| Err(OptimizerError::InvalidConfig(s.to_string()));
        if self.n < 2 {
            return bad("n must be at least 2");
        }
        if self.restarts == 0 {
            return bad("restarts must be at least 1");
        }
        if self
            .smoothing_betas
            .iter()
            .any(|b| *b <= T::zero() || !b.is_finite())
        {
            return bad("betas must be positive and finite");
        }
        if self.smoothing_betas.windows(2).any(|w| w[0] >= w[1]) {
            return bad("betas must be strictly increasing");
        }
        if self.polish_tol.is_nan() || self.polish_tol <= T::zero() {
            return bad("polish_tol must be positive");
        }
        Ok(())
    }
}

/// One iterate of a restart. `beta` is `None` during the polish.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow<T> {
    pub restart: usize,
    pub iter: usize,
    pub beta: Option<T>,
    pub value: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "T: Real + Serialize",
    deserialize = "T: Real + Deserialize<'de>"
))]
pub struct OptimizerReport<T> {
    pub config: OptimizerConfig<T>,
    pub best_value: T,
    pub best_restart: usize,
    pub best_tuple: UnimodularTuple<T>,
    pub per_restart_values: Vec<T>,
    pub recovered: RecoveryResult<T>,
    /// `√(n − 1)`.
    pub lower_bound: T,
    /// `best_value − √(n − 1)`.
    pub gap_to_bound: T,
    /// Evaluated points whose objective fell below `√(n − 1)` by more than
    /// the guard tolerance. Nonzero means a numerical fault.
    pub bound_violations: usize,
    pub evaluations: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub traces: Vec<TraceRow<T>>,
}

/// `|S(ν)|²` for `ν = 1..=n² − n`, optionally with the gradients
/// `∂|S(ν)|²/∂θ_j = −4πν Im(conj(S(ν)) z_j^ν)`.
fn squared_sums<T: Real>(t: &UnimodularTuple<T>, with_grad: bool) -> (Vec<T>, Vec<Vec<T>>) {
    let n = t.n();
    let big_n = horizon(n);
    let z = t.points();
    let mut pw = z.clone();
    let mut sq = Vec::with_capacity(big_n);
    let mut grads = Vec::with_capacity(if with_grad { big_n } else { 0 });
    let four_pi = T::of(4.0) * T::PI();
    for nu in 1..=big_n {
        let s = pw
            .iter()
            .fold(Complex::new(T::zero(), T::zero()), |a, &b| a + b);
        sq.push(s.norm_sqr());
        if with_grad {
            let scale = -four_pi * T::of_usize(nu);
            grads.push(pw.iter().map(|p| scale * (s.conj() * p).im).collect());
        }
        for (p, zk) in pw.iter_mut().zip(&z) {
            *p *= zk;
        }
    }
    (sq, grads)
}

/// `max_{ν=1..n²−n} |S(ν)|`.
pub fn objective<T: Real>(t: &UnimodularTuple<T>) -> T {
    let (sq, _) = squared_sums(t, false);
    sq.into_iter().fold(T::zero(), T::max).sqrt()
}

/// Stable `(1/β) log Σ exp(β x_ν)` and its softmax weights.
fn log_sum_exp<T: Real>(x: &[T], beta: T) -> (T, Vec<T>) {
    let mx = x.iter().copied().fold(T::neg_infinity(), T::max);
    let w: Vec<T> = x.iter().map(|&v| (beta * (v - mx)).exp()).collect();
    let z = w.iter().copied().fold(T::zero(), |a, b| a + b);
    (mx + z.ln() / beta, w.into_iter().map(|v| v / z).collect())
}

/// `(1/β) log Σ_ν exp(β |S(ν)|²)`: a smooth upper bound on `max_ν |S(ν)|²`
/// that decreases to it as `β → ∞`.
pub fn smoothed_objective<T: Real>(t: &UnimodularTuple<T>, beta: T) -> T {
    let (sq, _) = squared_sums(t, false);
    log_sum_exp(&sq, beta).0
}

/// [`smoothed_objective`] and its gradient with respect to the angles.
pub fn smoothed_objective_with_gradient<T: Real>(t: &UnimodularTuple<T>, beta: T) -> (T, Vec<T>) {
    let (sq, grads) = squared_sums(t, true);
    let (value, w) = log_sum_exp(&sq, beta);
    let mut g = vec![T::zero(); t.n()];
    for (wi, gi) in w.iter().zip(&grads) {
        for (acc, &d) in g.iter_mut().zip(gi) {
            *acc += *wi * d;
        }
    }
    (value, g)
}

struct Restart<'a, T> {
    idx: usize,
    cfg: &'a OptimizerConfig<T>,
    bound: T,
    guard: T,
    evaluations: u64,
    violations: usize,
    trace: Vec<TraceRow<T>>,
    iter: usize,
}

impl<T: Real> Restart<'_, T> {
    fn tuple(&self, x: &[T]) -> UnimodularTuple<T> {
        UnimodularTuple::new(x.to_vec(), T::zero()).expect("finite angles")
    }

    /// `max_ν |S(ν)|²` with the lower-bound guard.
    fn max_sq(&mut self, x: &[T]) -> T {
        let (sq, _) = squared_sums(&self.tuple(x), false);
        self.evaluations += 1;
        let v = sq.into_iter().fold(T::zero(), T::max);
        if v.sqrt() < self.bound - self.guard {
            self.violations += 1;
        }
        v
    }

    fn record(&mut self, beta: Option<T>, max_sq: T) {
        if self.cfg.trace {
            self.trace.push(TraceRow {
                restart: self.idx,
                iter: self.iter,
                beta,
                value: max_sq.sqrt(),
            });
        }
        self.iter += 1;
    }

    /// Gradient descent with Armijo backtracking on the surrogate.
    fn descend(&mut self, x: &mut [T], beta: T) {
        let mut step = T::of(1e-4);
        let armijo = T::of(1e-4);
        for _ in 0..self.cfg.max_iters {
            let (f, mut g) = smoothed_objective_with_gradient(&self.tuple(x), beta);
            self.evaluations += 1;
            g[0] = T::zero();
            let gn2 = g.iter().map(|&v| v * v).fold(T::zero(), |a, b| a + b);
            if gn2.sqrt() < T::of(1e-12) {
                break;
            }
            let mut accepted = false;
            while step > T::of(1e-18) {
                let trial: Vec<T> = x.iter().zip(&g).map(|(&xi, &gi)| xi - step * gi).collect();
                let ft = smoothed_objective(&self.tuple(&trial), beta);
                self.evaluations += 1;
                if ft <= f - armijo * step * gn2 {
                    x.copy_from_slice(&trial);
                    accepted = true;
                    step *= T::of(2.0);
                    break;
                }
                step *= T::of(0.5);
            }
            if !accepted {
                break;
            }
            let m = self.max_sq(x);
            self.record(Some(beta), m);
        }
    }

    /// Trust-region SLP on `max_ν |S(ν)|²`: minimize `s` subject to
    /// `f_ν + ∇f_ν·d ≤ s`, `|d_j| ≤ Δ` for the free angles `j ≥ 2`.
    fn polish_slp(&mut self, x: &mut [T]) {
        let n = x.len();
        let tol = self.cfg.polish_tol.to_f64_lossy();
        let mut radius = 1e-2f64;
        let mut current = self.max_sq(x);
        for _ in 0..self.cfg.max_iters {
            if radius < tol {
                break;
            }
            let (sq, grads) = squared_sums(&self.tuple(x), true);
            self.evaluations += 1;
            let mut lp = Problem::new(OptimizationDirection::Minimize);
            let d: Vec<_> = (1..n).map(|_| lp.add_var(0.0, (-radius, radius))).collect();
            let s = lp.add_var(1.0, (f64::NEG_INFINITY, f64::INFINITY));
            for (f, g) in sq.iter().zip(&grads) {
                let mut expr: Vec<(microlp::Variable, f64)> = d
                    .iter()
                    .zip(&g[1..])
                    .map(|(&v, gj)| (v, gj.to_f64_lossy()))
                    .collect();
                expr.push((s, -1.0));
                lp.add_constraint(expr, ComparisonOp::Le, -f.to_f64_lossy());
            }
            let Some(sol) = lp.solve().ok().and_then(|o| o.into_solution().ok()) else {
                radius *= 0.25;
                continue;
            };
            let predicted = current.to_f64_lossy() - sol.objective();
            if predicted <= 1e-15 * current.to_f64_lossy().max(1.0) {
                break;
            }
            let mut trial = x.to_vec();
            let mut longest = 0f64;
            for (j, &v) in d.iter().enumerate() {
                let dv = sol.var_value(v);
                longest = longest.max(dv.abs());
                trial[j + 1] += T::of(dv);
            }
            let value = self.max_sq(&trial);
            let rho = (current - value).to_f64_lossy() / predicted;
            if rho > 0.1 {
                x.copy_from_slice(&trial);
                current = value;
                self.record(None, current);
                if rho > 0.75 && longest > 0.99 * radius {
                    radius = (radius * 2.0).min(0.1);
                }
            } else {
                radius *= 0.25;
            }
        }
    }

    /// Coordinate sweeps on the exact objective with shrinking steps.
    fn polish_coordinates(&mut self, x: &mut [T]) {
        let mut h = T::of(1e-4);
        let mut current = self.max_sq(x);
        let mut sweeps = 0;
        while h >= self.cfg.polish_tol && sweeps < self.cfg.max_iters {
            sweeps += 1;
            let mut improved = false;
            for j in 1..x.len() {
                for sign in [T::one(), -T::one()] {
                    let old = x[j];
                    x[j] = old + sign * h;
                    let v = self.max_sq(x);
                    if v < current {
                        current = v;
                        improved = true;
                        break;
                    }
                    x[j] = old;
                }
            }
            if improved {
                self.record(None, current);
            } else {
                h *= T::of(0.5);
            }
        }
    }

    /// Smoothing schedule and both polish stages; returns the wrapped angles
    /// and `max_ν |S(ν)|²`.
    fn local_search(&mut self, mut x: Vec<T>) -> (Vec<T>, T) {
        for &beta in &self.cfg.smoothing_betas {
            self.descend(&mut x, beta);
        }
        self.polish_slp(&mut x);
        self.polish_coordinates(&mut x);
        let wrapped: Vec<T> = x.iter().map(|v| v.wrap_turns()).collect();
        let value = self.max_sq(&wrapped);
        (wrapped, value)
    }

    fn run(&mut self) -> (T, Vec<T>) {
        let n = self.cfg.n;
        let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.seed);
        rng.set_stream(self.idx as u64);
        let mut x: Vec<T> = UnimodularTuple::<T>::random(n, &mut rng)
            .expect("n ≥ 2")
            .thetas()
            .to_vec();
        x[0] = T::zero();
        let (mut best, mut best_sq) = self.local_search(x);
        // Nothing beats the proven lower bound, so reaching it ends the restart.
        let target = self.bound + T::of(1e-9);
        for _ in 0..self.cfg.hops {
            if best_sq.sqrt() <= target || n < 3 {
                break;
            }
            let mut y = best.clone();
            y[rng.gen_range(1..n)] = T::of(rng.gen::<f64>());
            let (cand, v) = self.local_search(y);
            if v < best_sq {
                best = cand;
                best_sq = v;
            }
        }
        (best_sq.sqrt(), best)
    }
}

struct RestartResult<T> {
    value: T,
    thetas: Vec<T>,
    evaluations: u64,
    violations: usize,
    trace: Vec<TraceRow<T>>,
}

/// Runs all restarts (in parallel, deterministically: restart `i` draws from
/// stream `i` of a ChaCha generator seeded with `config.seed`).
pub fn minimize<T: Real>(
    config: &OptimizerConfig<T>,
) -> Result<OptimizerReport<T>, OptimizerError> {
    config.validate()?;
    let n = config.n;
    let bound = T::of_usize(n - 1).sqrt();
    let guard = T::of(1e-9).max(T::epsilon() * T::of(1e4));

    let one = |idx: usize| -> RestartResult<T> {
        let mut r = Restart {
            idx,
            cfg: config,
            bound,
            guard,
            evaluations: 0,
            violations: 0,
            trace: Vec::new(),
            iter: 0,
        };
        let (value, thetas) = r.run();
        RestartResult {
            value,
            thetas,
            evaluations: r.evaluations,
            violations: r.violations,
            trace: r.trace,
        }
    };
    let results: Vec<RestartResult<T>> = if config.threads == 0 {
        (0..config.restarts).into_par_iter().map(one).collect()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(config.threads)
            .build()
            .expect("thread pool")
            .install(|| (0..config.restarts).into_par_iter().map(one).collect())
    };

    let per_restart_values: Vec<T> = results.iter().map(|r| r.value).collect();
    let best_restart = per_restart_values.iter().enumerate().fold(0, |b, (i, &v)| {
        if v < per_restart_values[b] {
            i
        } else {
            b
        }
    });
    let best = &results[best_restart];
    let best_tuple = UnimodularTuple::new(best.thetas.clone(), T::zero()).expect("finite angles");
    let recovered = recover_structure(&best_tuple, T::of(RECOVERY_TOL));
    Ok(OptimizerReport {
        config: config.clone(),
        best_value: best.value,
        best_restart,
        best_tuple,
        gap_to_bound: best.value - bound,
        lower_bound: bound,
        bound_violations: results.iter().map(|r| r.violations).sum(),
        evaluations: results.iter().map(|r| r.evaluations).sum(),
        traces: results.into_iter().flat_map(|r| r.trace).collect(),
        per_restart_values,
        recovered,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pds::PerfectDifferenceSet;
    use crate::powersum::{fabrykowski_tuple, RecoveryStatus};

    type Tup = UnimodularTuple<f64>;

    fn fab3() -> Tup {
        fabrykowski_tuple(&PerfectDifferenceSet::new(2, &[0, 1, 3]).unwrap(), 0.0)
    }

    #[test]
    fn objective_examples() {
        assert!((objective(&fab3()) - 2f64.sqrt()).abs() < 1e-9);
        for n in 2..7 {
            assert!((objective(&Tup::coincident(n, 0.2).unwrap()) - n as f64).abs() < 1e-9);
            assert!((objective(&Tup::regular_ngon(n, 0.4).unwrap()) - n as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn smoothed_limits() {
        let t = fab3();
        // All six |S(ν)|² equal 2: value = 2 + ln(6)/β exactly.
        for beta in [1.0, 10.0, 1e3, 1e6] {
            let v = smoothed_objective(&t, beta);
            assert!((v - (2.0 + 6f64.ln() / beta)).abs() < 1e-9);
        }
        assert!((smoothed_objective(&t, 1e9).sqrt() - 2f64.sqrt()).abs() < 1e-8);

        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let r = Tup::random(4, &mut rng).unwrap();
        let profile = crate::powersum::profile(&r);
        let sq: Vec<f64> = profile.abs_values.iter().map(|a| a * a).collect();
        let beta = 0.01;
        let direct = (sq.iter().map(|x| (beta * x).exp()).sum::<f64>()).ln() / beta;
        assert!((smoothed_objective(&r, beta) - direct).abs() < 1e-9);
        // Decreasing in β toward the max.
        let mut prev = f64::INFINITY;
        for beta in [0.1, 1.0, 10.0, 100.0] {
            let v = smoothed_objective(&r, beta);
            assert!(v <= prev && v >= profile.max_abs.powi(2) - 1e-12);
            prev = v;
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let n = rng.gen_range(2..7);
            let t = Tup::random(n, &mut rng).unwrap();
            let beta = 2.0;
            let (_, g) = smoothed_objective_with_gradient(&t, beta);
            let h = 1e-6;
            for (j, &gj) in g.iter().enumerate() {
                let fd = (smoothed_objective(&t.perturbed(j, h), beta)
                    - smoothed_objective(&t.perturbed(j, -h), beta))
                    / (2.0 * h);
                assert!((fd - gj).abs() <= 1e-5 * gj.abs().max(1.0), "{fd} vs {gj}");
            }
        }
    }

    #[test]
    fn config_validation() {
        let mut c = OptimizerConfig::<f64>::new(3);
        assert!(c.validate().is_ok());
        c.smoothing_betas = vec![4.0, 4.0];
        assert!(c.validate().is_err());
        c.smoothing_betas = vec![1.0];
        c.restarts = 0;
        assert!(c.validate().is_err());
        assert!(minimize(&OptimizerConfig::<f64>::new(1)).is_err());
    }

    #[test]
    fn n3_reaches_bound_and_recovers() {
        let mut c = OptimizerConfig::<f64>::new(3);
        c.restarts = 8;
        c.seed = 1;
        let r = minimize(&c).unwrap();
        assert!(
            (r.best_value - 2f64.sqrt()).abs() < 1e-6,
            "{}",
            r.best_value
        );
        assert_eq!(r.recovered.status, RecoveryStatus::IsMinimizer);
        assert_eq!(r.bound_violations, 0);
        assert!(r.gap_to_bound >= -1e-6);
    }

    #[test]
    fn reproducible_across_thread_counts() {
        let mut c = OptimizerConfig::<f64>::new(4);
        c.restarts = 6;
        c.seed = 9;
        c.max_iters = 100;
        c.threads = 1;
        let a = minimize(&c).unwrap();
        c.threads = 4;
        let b = minimize(&c).unwrap();
        assert_eq!(a.per_restart_values, b.per_restart_values);
        assert_eq!(a.best_tuple, b.best_tuple);
    }

    #[test]
    fn gauge_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let t = Tup::random(5, &mut rng).unwrap();
            let c = rng.gen::<f64>();
            assert!((objective(&t) - objective(&t.rotated(c))).abs() < 1e-12);
        }
    }

    #[test]
    fn trace_rows_when_enabled() {
        let mut c = OptimizerConfig::<f64>::new(3);
        c.restarts = 2;
        c.trace = true;
        let r = minimize(&c).unwrap();
        assert!(!r.traces.is_empty());
        assert!(r.traces.iter().any(|t| t.beta.is_none()));
        assert!(r.traces.iter().any(|t| t.restart == 1));
    }
}
