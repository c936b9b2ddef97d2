//! See-saw lower bounds on the optimal average QRAC success probability.
//!
//! The loop alternates two steps, each of which never lowers the objective:
//!
//! * **states**: with measurements fixed, each `|ψ_x⟩` becomes the top
//!   eigenvector of `R_x = (1/n) Σ_y M^y_{x_y}`, which is optimal;
//! * **measurements**: with states fixed, a closed-form proposal (Helstrom
//!   for two outcomes, square-root measurement otherwise) is accepted only if
//!   it does not lower the score, then pairwise refinement redistributes each
//!   `M_b + M_c` optimally between outcomes `b` and `c`.
//!
//! Every reported value is the objective of an explicit, validated
//! [`StrategyQ`], so it is a certified lower bound.
//!
//! Randomness comes from `ChaCha8Rng::seed_from_u64(seed + restart)`; restarts
//! run in parallel and the reduction picks the best objective, lowest restart
//! index on ties.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::classical::string_digits;
use crate::error::{QracError, Result};
use crate::linalg::{check_dim, eigh, Basis, Ket, Operator, C64, MAX_DIM};
use crate::qrac2::Qrac2Code;
use crate::qrac3::Qrac3Code;

/// Hermiticity tolerance for POVM elements.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Smallest eigenvalue tolerated in a POVM element.
pub const POSITIVITY_TOL: f64 = 1e-10;
/// Completeness tolerance `‖Σ_b M_b - I‖`.
pub const COMPLETENESS_TOL: f64 = 1e-9;
/// Eigenvalues at or below this are dropped in pseudo-inverses and square roots.
pub const EIGEN_CUTOFF: f64 = 1e-12;
/// A restart stops once one full iteration gains less than this.
pub const CONVERGENCE_TOL: f64 = 1e-10;
/// Upper limit on the number of encoded strings `d^n`.
pub const MAX_STRINGS: usize = 1 << 14;

const REFINE_SWEEPS: usize = 1;

/// A `d`-outcome measurement.
#[derive(Clone, Debug, PartialEq)]
pub struct Povm {
    effects: Vec<Operator>,
}

impl Povm {
    /// Wraps effects after checking Hermiticity, positivity and completeness.
    pub fn new(effects: Vec<Operator>) -> Result<Self> {
        let p = Povm { effects };
        p.validate()?;
        Ok(p)
    }

    /// Projective measurement onto a basis.
    pub fn projective(basis: &Basis) -> Self {
        Povm {
            effects: basis.kets().iter().map(Ket::projector).collect(),
        }
    }

    pub fn effects(&self) -> &[Operator] {
        &self.effects
    }

    pub fn effect(&self, b: usize) -> &Operator {
        &self.effects[b]
    }

    pub fn outcomes(&self) -> usize {
        self.effects.len()
    }

    pub fn validate(&self) -> Result<()> {
        let d = self
            .effects
            .first()
            .map(Operator::dim)
            .ok_or_else(|| QracError::InvalidArgument("empty POVM".into()))?;
        let mut sum = Operator::zeros(d);
        for (b, m) in self.effects.iter().enumerate() {
            if m.dim() != d {
                return Err(QracError::DimensionMismatch {
                    expected: d,
                    got: m.dim(),
                });
            }
            let herm = m.hermiticity_deviation();
            if herm > HERMITIAN_TOL {
                return Err(QracError::Numerical(format!(
                    "POVM element {b} not Hermitian (deviation {herm:e})"
                )));
            }
            let low = eigh(m)?.values[0];
            if low < -POSITIVITY_TOL {
                return Err(QracError::Numerical(format!(
                    "POVM element {b} has eigenvalue {low:e}"
                )));
            }
            sum = &sum + m;
        }
        let gap = sum.max_abs_diff(&Operator::identity(d));
        if gap > COMPLETENESS_TOL {
            return Err(QracError::Numerical(format!(
                "POVM elements sum to identity only within {gap:e}"
            )));
        }
        Ok(())
    }
}

/// Encoding states for every input string plus one measurement per question.
#[derive(Clone, Debug, PartialEq)]
pub struct StrategyQ {
    n: usize,
    d: usize,
    /// Indexed like [`string_digits`]: `x_0` most significant.
    states: Vec<Ket>,
    measurements: Vec<Povm>,
    digits: Vec<Vec<usize>>,
}

fn check_size(n: usize, d: usize) -> Result<usize> {
    check_dim(d)?;
    if n < 1 {
        return Err(QracError::InvalidArgument("n must be at least 1".into()));
    }
    if d > MAX_DIM {
        return Err(QracError::InstanceTooLarge(format!(
            "d = {d} exceeds {MAX_DIM}"
        )));
    }
    (d as u64)
        .checked_pow(n as u32)
        .filter(|&s| s <= MAX_STRINGS as u64)
        .map(|s| s as usize)
        .ok_or_else(|| {
            QracError::InstanceTooLarge(format!("d^n = {d}^{n} exceeds {MAX_STRINGS} strings"))
        })
}

impl StrategyQ {
    pub fn new(n: usize, d: usize, states: Vec<Ket>, measurements: Vec<Povm>) -> Result<Self> {
        let strings = check_size(n, d)?;
        if states.len() != strings || measurements.len() != n {
            return Err(QracError::InvalidArgument(format!(
                "expected {strings} states and {n} measurements, got {} and {}",
                states.len(),
                measurements.len()
            )));
        }
        let s = StrategyQ {
            n,
            d,
            states,
            measurements,
            digits: (0..strings).map(|i| string_digits(i, n, d)).collect(),
        };
        s.validate()?;
        Ok(s)
    }

    /// The `2^(d) -> 1` MUB family with projective measurements.
    pub fn from_qrac2(d: usize) -> Result<Self> {
        let code = Qrac2Code::new(d)?;
        let states = (0..d * d)
            .map(|i| code.state(i / d, i % d).clone())
            .collect();
        let measurements = (0..2).map(|y| Povm::projective(code.basis(y))).collect();
        StrategyQ::new(2, d, states, measurements)
    }

    /// The `3^(d) -> 1` family with projective measurements onto the three bases.
    pub fn from_qrac3(code: &Qrac3Code) -> Result<Self> {
        let d = code.d();
        let mut states = Vec::with_capacity(d * d * d);
        for i in 0..d * d * d {
            let x = string_digits(i, 3, d);
            states.push(code.encode3(x[0], x[1], x[2])?);
        }
        let measurements = code.bases().iter().map(Povm::projective).collect();
        StrategyQ::new(3, d, states, measurements)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn states(&self) -> &[Ket] {
        &self.states
    }

    pub fn measurements(&self) -> &[Povm] {
        &self.measurements
    }

    /// Checks state norms and every POVM.
    pub fn validate(&self) -> Result<()> {
        for (i, s) in self.states.iter().enumerate() {
            if s.dim() != self.d {
                return Err(QracError::DimensionMismatch {
                    expected: self.d,
                    got: s.dim(),
                });
            }
            if (s.norm_sqr() - 1.0).abs() > 1e-10 {
                return Err(QracError::Numerical(format!("state {i} not normalized")));
            }
        }
        for m in &self.measurements {
            if m.outcomes() != self.d {
                return Err(QracError::InvalidArgument(format!(
                    "POVM has {} outcomes, expected {}",
                    m.outcomes(),
                    self.d
                )));
            }
            m.validate()?;
        }
        Ok(())
    }

    fn trials(&self) -> f64 {
        (self.n * self.states.len()) as f64
    }

    /// `R_x = (1/n) Σ_y M^y_{x_y}`.
    fn reward_operator(&self, x: &[usize]) -> Operator {
        let mut r = Operator::zeros(self.d);
        for (y, &v) in x.iter().enumerate() {
            r = &r + self.measurements[y].effect(v);
        }
        r.scale(1.0 / self.n as f64)
    }

    /// Score operators `S_b = Σ_{x: x_y = b} |ψ_x⟩⟨ψ_x| / (n d^n)` for question `y`.
    fn score_operators(&self, y: usize) -> Vec<Operator> {
        let norm = 1.0 / self.trials();
        let mut s = vec![Operator::zeros(self.d); self.d];
        for (x, psi) in self.digits.iter().zip(&self.states) {
            s[x[y]] = &s[x[y]] + &psi.projector().scale(norm);
        }
        s
    }
}

/// `(1/(n d^n)) Σ_x Σ_y ⟨ψ_x| M^y_{x_y} |ψ_x⟩`.
pub fn objective(s: &StrategyQ) -> f64 {
    let mut acc = 0.0;
    for (x, psi) in s.digits.iter().zip(&s.states) {
        for (y, &v) in x.iter().enumerate() {
            acc += s.measurements[y].effect(v).expectation(psi);
        }
    }
    acc / s.trials()
}

/// Replaces every state by a top eigenvector of its reward operator.
///
/// A state is only replaced when that strictly raises its own reward, so the
/// objective cannot drop through eigensolver rounding.
pub fn state_update(s: &StrategyQ) -> Result<StrategyQ> {
    let mut next = s.clone();
    for (i, x) in s.digits.iter().enumerate() {
        let r = s.reward_operator(x);
        let candidate = Ket::new(eigh(&r)?.top_vector())?;
        if r.expectation(&candidate) > r.expectation(&s.states[i]) {
            next.states[i] = candidate;
        }
    }
    Ok(next)
}

fn povm_score(effects: &[Operator], scores: &[Operator]) -> f64 {
    effects
        .iter()
        .zip(scores)
        .map(|(m, s)| m.trace_product(s))
        .sum()
}

/// Helstrom measurement for two outcomes: `M_0` projects onto the
/// non-negative part of `S_0 - S_1` (the kernel goes to outcome 0).
fn helstrom(scores: &[Operator]) -> Result<Vec<Operator>> {
    let d = scores[0].dim();
    let e = eigh(&(&scores[0] - &scores[1]))?;
    let m0 = e.map_spectrum(|l| if l >= -EIGEN_CUTOFF { 1.0 } else { 0.0 });
    let m1 = &Operator::identity(d) - &m0;
    Ok(vec![m0, m1])
}

/// Square-root measurement `T^{-1/2} S_b T^{-1/2}` with `T = Σ_b S_b`; the
/// complement of the support of `T` is added to outcome 0.
fn square_root_measurement(scores: &[Operator]) -> Result<Vec<Operator>> {
    let d = scores[0].dim();
    let total = scores.iter().fold(Operator::zeros(d), |acc, s| &acc + s);
    let e = eigh(&total)?;
    let inv_sqrt = e.psd_power(-0.5, EIGEN_CUTOFF);
    let support = e.support_projector(EIGEN_CUTOFF);
    let mut effects: Vec<Operator> = scores
        .iter()
        .map(|s| (&(&inv_sqrt * s) * &inv_sqrt).hermitian_part())
        .collect();
    effects[0] = &effects[0] + &(&Operator::identity(d) - &support);
    Ok(effects)
}

/// Optimal split of `M_b + M_c` between outcomes `b` and `c`.
///
/// With `E = M_b + M_c`, any admissible `M_b'` is `E^{1/2} Q E^{1/2}` with
/// `0 <= Q <= Π_E`, and the gain `tr(M_b'(S_b - S_c))` is maximized by the
/// positive spectral projector of `E^{1/2}(S_b - S_c)E^{1/2}`.
fn refine_pair(effects: &mut [Operator], scores: &[Operator], b: usize, c: usize) -> Result<()> {
    let sum = &effects[b] + &effects[c];
    let root = eigh(&sum)?.psd_power(0.5, EIGEN_CUTOFF);
    let diff = &scores[b] - &scores[c];
    let k = &(&root * &diff) * &root;
    let positive = eigh(&k)?.map_spectrum(|l| if l > 0.0 { 1.0 } else { 0.0 });
    let new_b = (&(&root * &positive) * &root).hermitian_part();
    let new_c = &sum - &new_b;
    let before = effects[b].trace_product(&scores[b]) + effects[c].trace_product(&scores[c]);
    let after = new_b.trace_product(&scores[b]) + new_c.trace_product(&scores[c]);
    if after > before {
        effects[b] = new_b;
        effects[c] = new_c;
    }
    Ok(())
}

fn refine(effects: &mut [Operator], scores: &[Operator]) -> Result<()> {
    let d = effects.len();
    for _ in 0..REFINE_SWEEPS {
        let start = povm_score(effects, scores);
        for b in 0..d {
            for c in (b + 1)..d {
                refine_pair(effects, scores, b, c)?;
            }
        }
        if povm_score(effects, scores) - start < 1e-15 {
            break;
        }
    }
    Ok(())
}

fn propose(scores: &[Operator], current: &Povm) -> Result<Vec<Operator>> {
    let proposal = if scores.len() == 2 {
        helstrom(scores)?
    } else {
        square_root_measurement(scores)?
    };
    let mut effects = if povm_score(&proposal, scores) >= povm_score(current.effects(), scores) {
        proposal
    } else {
        current.effects().to_vec()
    };
    refine(&mut effects, scores)?;
    Ok(effects)
}

/// Outcome of a measurement step.
#[derive(Clone, Debug)]
pub struct MeasurementStep {
    pub strategy: StrategyQ,
    /// Questions whose proposal failed numerically and kept the old POVM.
    pub flagged: Vec<usize>,
}

/// Improves every question's POVM for the current states; never lowers the objective.
pub fn measurement_update(s: &StrategyQ) -> Result<MeasurementStep> {
    let mut next = s.clone();
    let mut flagged = Vec::new();
    for y in 0..s.n {
        let scores = s.score_operators(y);
        let current = &s.measurements[y];
        match propose(&scores, current) {
            Ok(effects) => {
                let improves =
                    povm_score(&effects, &scores) >= povm_score(current.effects(), &scores);
                let candidate = Povm { effects };
                if improves && candidate.validate().is_ok() {
                    next.measurements[y] = candidate;
                }
            }
            Err(_) => flagged.push(y),
        }
    }
    Ok(MeasurementStep {
        strategy: next,
        flagged,
    })
}

fn random_ket(rng: &mut ChaCha8Rng, d: usize) -> Result<Ket> {
    Ket::new(
        (0..d)
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect(),
    )
}

/// Haar-like random orthonormal basis by Gram-Schmidt on Gaussian vectors.
fn random_basis(rng: &mut ChaCha8Rng, d: usize) -> Result<Basis> {
    let mut kets: Vec<Ket> = Vec::with_capacity(d);
    while kets.len() < d {
        let mut v: Vec<C64> = random_ket(rng, d)?.amps().to_vec();
        for k in &kets {
            let overlap: C64 = k.amps().iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (vi, ki) in v.iter_mut().zip(k.amps()) {
                *vi -= overlap * ki;
            }
        }
        if v.iter().map(|z| z.norm_sqr()).sum::<f64>() > 1e-8 {
            kets.push(Ket::new(v)?);
        }
    }
    Basis::new(kets)
}

/// Random initial strategy for one restart.
pub fn random_strategy(n: usize, d: usize, seed: u64) -> Result<StrategyQ> {
    let strings = check_size(n, d)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let states = (0..strings)
        .map(|_| random_ket(&mut rng, d))
        .collect::<Result<Vec<_>>>()?;
    let measurements = (0..n)
        .map(|_| random_basis(&mut rng, d).map(|b| Povm::projective(&b)))
        .collect::<Result<Vec<_>>>()?;
    StrategyQ::new(n, d, states, measurements)
}

/// Parameters of a see-saw run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SeesawConfig {
    pub n: usize,
    pub d: usize,
    pub restarts: usize,
    pub max_iters: usize,
    pub seed: u64,
}

/// One restart's outcome.
#[derive(Clone, Debug)]
pub struct RestartOutcome {
    pub objective: f64,
    pub iterations: usize,
    pub trace: Vec<f64>,
    pub flagged: usize,
    pub strategy: StrategyQ,
}

/// Runs a single restart from `random_strategy(n, d, sub_seed)`.
pub fn run_restart(n: usize, d: usize, max_iters: usize, sub_seed: u64) -> Result<RestartOutcome> {
    let mut s = random_strategy(n, d, sub_seed)?;
    let mut f = objective(&s);
    let mut trace = vec![f];
    let mut flagged = 0;
    let mut iterations = 0;
    while iterations < max_iters {
        let step = measurement_update(&state_update(&s)?)?;
        flagged += step.flagged.len();
        s = step.strategy;
        let next = objective(&s);
        trace.push(next);
        iterations += 1;
        let gain = next - f;
        f = next;
        if gain < CONVERGENCE_TOL {
            break;
        }
    }
    Ok(RestartOutcome {
        objective: f,
        iterations,
        trace,
        flagged,
        strategy: s,
    })
}

/// Result of a see-saw run: the best restart plus per-restart statistics.
#[derive(Clone, Debug)]
pub struct SeesawReport {
    pub config: SeesawConfig,
    pub best: f64,
    pub best_restart: usize,
    /// Iterations used by the best restart.
    pub iterations: usize,
    /// Objective trace of the best restart.
    pub trace: Vec<f64>,
    pub restart_objectives: Vec<f64>,
    pub restart_iterations: Vec<usize>,
    pub restart_traces: Vec<Vec<f64>>,
    pub flagged: usize,
    /// The strategy achieving `best`.
    pub certificate: StrategyQ,
}

impl SeesawReport {
    /// Largest decrease between consecutive entries of any restart's trace
    /// (zero when every trace is monotone).
    pub fn max_trace_drop(&self) -> f64 {
        self.restart_traces
            .iter()
            .flat_map(|t| t.windows(2).map(|w| w[0] - w[1]))
            .fold(0.0, f64::max)
    }
}

/// Best-of-`restarts` see-saw lower bound for `n^(d) -> 1`.
pub fn seesaw_run(
    n: usize,
    d: usize,
    restarts: usize,
    max_iters: usize,
    seed: u64,
) -> Result<SeesawReport> {
    if restarts < 1 {
        return Err(QracError::InvalidArgument(
            "restarts must be at least 1".into(),
        ));
    }
    check_size(n, d)?;
    let outcomes = (0..restarts)
        .into_par_iter()
        .map(|k| run_restart(n, d, max_iters, seed.wrapping_add(k as u64)))
        .collect::<Result<Vec<_>>>()?;
    let best_restart = outcomes.iter().enumerate().fold(0, |best, (k, o)| {
        if o.objective > outcomes[best].objective {
            k
        } else {
            best
        }
    });
    let restart_objectives = outcomes.iter().map(|o| o.objective).collect();
    let restart_iterations = outcomes.iter().map(|o| o.iterations).collect();
    let restart_traces = outcomes.iter().map(|o| o.trace.clone()).collect();
    let flagged = outcomes.iter().map(|o| o.flagged).sum();
    let best = outcomes
        .into_iter()
        .nth(best_restart)
        .expect("restarts >= 1");
    best.strategy.validate()?;
    Ok(SeesawReport {
        config: SeesawConfig {
            n,
            d,
            restarts,
            max_iters,
            seed,
        },
        best: best.objective,
        best_restart,
        iterations: best.iterations,
        trace: best.trace,
        restart_objectives,
        restart_iterations,
        restart_traces,
        flagged,
        certificate: best.strategy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::computational_basis;
    use crate::qrac2::success2_closed;

    #[test]
    fn qrac2_family_objective() {
        for d in 2..=6 {
            let s = StrategyQ::from_qrac2(d).unwrap();
            assert!((objective(&s) - success2_closed(d).unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn qrac3_family_objective() {
        for d in [2, 3, 4] {
            let code = Qrac3Code::new(d).unwrap();
            let s = StrategyQ::from_qrac3(&code).unwrap();
            assert!((objective(&s) - code.summary().average).abs() < 1e-9);
        }
    }

    #[test]
    fn uniform_guessing() {
        let d = 3;
        let base = StrategyQ::from_qrac2(d).unwrap();
        let flat = Povm::new(vec![Operator::identity(d).scale(1.0 / d as f64); d]).unwrap();
        let s = StrategyQ::new(2, d, base.states().to_vec(), vec![flat.clone(), flat]).unwrap();
        assert!((objective(&s) - 1.0 / d as f64).abs() < 1e-14);
    }

    #[test]
    fn single_symbol_identity_decoding() {
        let d = 4;
        let z = computational_basis(d).unwrap();
        let s = StrategyQ::new(1, d, z.kets().to_vec(), vec![Povm::projective(&z)]).unwrap();
        assert!((objective(&s) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn fixed_point_is_stable() {
        let s = StrategyQ::from_qrac2(2).unwrap();
        let f = objective(&s);
        let after_states = state_update(&s).unwrap();
        assert!((objective(&after_states) - f).abs() < 1e-10);
        let step = measurement_update(&after_states).unwrap();
        assert!(step.flagged.is_empty());
        assert!((objective(&step.strategy) - f).abs() < 1e-9);
    }

    #[test]
    fn random_start_improves() {
        let s = random_strategy(2, 2, 11).unwrap();
        let f0 = objective(&s);
        let f1 = objective(&state_update(&s).unwrap());
        assert!(f1 > f0);
    }

    #[test]
    fn measurement_step_keeps_validity_and_monotone() {
        for seed in 0..5 {
            let s = state_update(&random_strategy(2, 3, seed).unwrap()).unwrap();
            let f = objective(&s);
            let next = measurement_update(&s).unwrap().strategy;
            next.validate().unwrap();
            assert!(objective(&next) >= f - 1e-12);
        }
    }

    #[test]
    fn malformed_strategies_rejected() {
        let z = computational_basis(2).unwrap();
        assert!(StrategyQ::new(2, 2, z.kets().to_vec(), vec![Povm::projective(&z); 2]).is_err());
        let bad = vec![Operator::identity(2), Operator::identity(2)];
        assert!(Povm::new(bad).is_err());
        assert!(seesaw_run(2, 2, 0, 10, 1).is_err());
        assert!(seesaw_run(20, 4, 1, 10, 1).is_err());
    }

    #[test]
    fn zero_iterations_reports_initial_objective() {
        let r = seesaw_run(2, 2, 1, 0, 1).unwrap();
        assert_eq!(r.iterations, 0);
        assert_eq!(r.trace.len(), 1);
        assert!((0.0..=1.0).contains(&r.best));
        assert_eq!(r.best, objective(&random_strategy(2, 2, 1).unwrap()));
    }

    #[test]
    fn deterministic() {
        let a = seesaw_run(2, 3, 4, 50, 7).unwrap();
        let b = seesaw_run(2, 3, 4, 50, 7).unwrap();
        assert_eq!(a.trace, b.trace);
        assert_eq!(a.restart_objectives, b.restart_objectives);
    }

    #[test]
    fn qubit_bound() {
        let r = seesaw_run(2, 2, 5, 200, 3).unwrap();
        let target = success2_closed(2).unwrap();
        assert!(r.best >= target - 1e-4 && r.best <= target + 1e-6);
        assert!(r.max_trace_drop() <= 1e-12);
    }
}
