//! The `3^(d) -> 1` family built from three bases: computational, Fourier,
//! and the chirped third basis `{|f_l⟩}`.
//!
//! For every `a` a base state `|ψ_{00a}⟩ ∝ |0⟩ + (r+it)|e_0⟩ + (r-it)|f_a⟩`
//! is chosen so that all three questions succeed with equal probability.
//! Equality pins `t` to a root of a quadratic whose coefficients depend on
//! `r`; `r` is then optimized by a grid scan plus golden-section refinement.
//! The remaining `d³ - d` encodings are Weyl translates of the base states.

use rayon::prelude::*;

use crate::classical::classical_success;
use crate::error::{QracError, Result};
use crate::linalg::{
    apply_weyl, check_dim, chirp_factor, computational_basis, fourier_basis, modulo,
    mub_overlap_check, outcome_prob, third_mub, third_mub_phase, Basis, Ket, C64,
};
use crate::SuccessSummary;

/// Discriminants in `(-DISC_SLACK, 0)` are rounding noise at the edge of the
/// feasible `r` interval and are treated as zero.
const DISC_SLACK: f64 = 1e-12;
/// Below this the leading coefficient is treated as vanishing.
const LINEAR_TOL: f64 = 1e-14;
/// Smallest admissible `N_{3,d}²`. The ansatz vector vanishes at isolated
/// `(r, t)`; near those points the closed-form ratio is 0/0 and its rounding
/// error grows like `1e-16 / N²`.
pub const NORM_TOL: f64 = 1e-6;

/// `ξ_a = (1/d) Σ_k ω^{ak + k²(1+δ_d)/2} = ⟨e_0|f_a⟩`.
pub fn xi(d: usize, a: usize) -> Result<C64> {
    check_dim(d)?;
    if a >= d {
        return Err(QracError::OutOfRange { symbol: a, d });
    }
    let sum: C64 = (0..d).map(|k| third_mub_phase(d, k, a)).sum();
    Ok(sum / d as f64)
}

/// Which root of the quadratic in `t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Plus,
    Minus,
}

/// Coefficients of `A t² + B t + C = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadratic {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Quadratic {
    pub fn eval(&self, t: f64) -> f64 {
        (self.a * t + self.b) * t + self.c
    }

    pub fn discriminant(&self) -> f64 {
        self.b * self.b - 4.0 * self.a * self.c
    }
}

/// Coefficients enforcing `P_0(x_0 = 0) = P_1(x_1 = 0)` for the ansatz at `(d, a, r)`.
pub fn quadratic_coeffs(d: usize, a: usize, r: f64) -> Result<Quadratic> {
    let x = xi(d, a)?;
    Ok(coeffs_from_xi(d, x, r))
}

fn coeffs_from_xi(d: usize, x: C64, r: f64) -> Quadratic {
    let sd = (d as f64).sqrt();
    let m2 = x.norm_sqr();
    Quadratic {
        a: 1.0 + m2 - 2.0 * x.re,
        b: 2.0 * x.im * (2.0 * r + 1.0 / sd),
        c: r * r * (m2 + 2.0 * x.re + 1.0 - 4.0 / d as f64)
            + (2.0 * r / sd) * (x.re - 1.0)
            + 1.0 / d as f64
            - 1.0,
    }
}

fn roots(q: &Quadratic) -> Result<Vec<(Branch, f64)>> {
    if q.a.abs() < LINEAR_TOL {
        if q.b.abs() < LINEAR_TOL {
            return Err(QracError::Numerical(
                "degenerate quadratic: A and B both vanish".into(),
            ));
        }
        return Ok(vec![(Branch::Plus, -q.c / q.b)]);
    }
    let mut disc = q.discriminant();
    if disc < 0.0 {
        if disc > -DISC_SLACK {
            disc = 0.0;
        } else {
            return Ok(Vec::new());
        }
    }
    let s = disc.sqrt();
    Ok(vec![
        (Branch::Plus, (-q.b + s) / (2.0 * q.a)),
        (Branch::Minus, (-q.b - s) / (2.0 * q.a)),
    ])
}

/// Real roots `t_±(r)`; empty when the discriminant is negative.
pub fn t_solutions(d: usize, a: usize, r: f64) -> Result<Vec<(Branch, f64)>> {
    roots(&quadratic_coeffs(d, a, r)?)
}

fn norm_sqr_from_xi(d: usize, x: C64, r: f64, t: f64) -> f64 {
    let sd = (d as f64).sqrt();
    1.0 + 4.0 * r / sd
        + 2.0 * r * r
        + 2.0 * t * t
        + 2.0 * x.re * (r * r - t * t)
        + 4.0 * r * t * x.im
}

/// `N_{3,d}²` from its closed form.
pub fn norm_sqr(d: usize, a: usize, r: f64, t: f64) -> Result<f64> {
    Ok(norm_sqr_from_xi(d, xi(d, a)?, r, t))
}

fn objective_from_xi(d: usize, x: C64, r: f64, t: f64) -> f64 {
    let n2 = norm_sqr_from_xi(d, x, r, t);
    if n2 <= NORM_TOL {
        return f64::NEG_INFINITY;
    }
    (1.0 + 2.0 * r / (d as f64).sqrt()).powi(2) / n2
}

/// `P_0(x_0 = 0) = (1 + 2r/√d)² / N_{3,d}²`.
pub fn objective(d: usize, a: usize, r: f64, t: f64) -> Result<f64> {
    Ok(objective_from_xi(d, xi(d, a)?, r, t))
}

/// Unnormalized `|0⟩ + (r+it)|e_0⟩ + (r-it)|f_a⟩`.
pub fn raw_base_amplitudes(d: usize, a: usize, r: f64, t: f64) -> Vec<C64> {
    let s = 1.0 / (d as f64).sqrt();
    let plus = C64::new(r, t);
    let minus = C64::new(r, -t);
    (0..d)
        .map(|k| {
            let zero = if k == 0 { 1.0 } else { 0.0 };
            C64::new(zero, 0.0) + plus * s + minus * third_mub_phase(d, k, a) * s
        })
        .collect()
}

/// The ansatz state `|ψ_{00a}⟩`, normalized with the closed-form `N_{3,d}`.
pub fn base_state(d: usize, a: usize, r: f64, t: f64) -> Result<Ket> {
    let n2 = norm_sqr(d, a, r, t)?;
    if n2 <= NORM_TOL {
        return Err(QracError::DegenerateNormalization(n2));
    }
    let n = n2.sqrt();
    Ket::new(
        raw_base_amplitudes(d, a, r, t)
            .into_iter()
            .map(|z| z / n)
            .collect(),
    )
}

/// Parameters of one optimized base state.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct Ansatz3 {
    pub d: usize,
    pub a: usize,
    pub r: f64,
    pub t: f64,
    pub branch: Branch,
}

impl Ansatz3 {
    pub fn state(&self) -> Result<Ket> {
        base_state(self.d, self.a, self.r, self.t)
    }

    pub fn objective(&self) -> Result<f64> {
        objective(self.d, self.a, self.r, self.t)
    }
}

/// The 1-D search over `r`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanConfig {
    pub r_min: f64,
    pub r_max: f64,
    pub step: f64,
    /// Golden-section stopping width.
    pub tol: f64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            r_min: -3.0,
            r_max: 3.0,
            step: 1e-3,
            tol: 1e-10,
        }
    }
}

fn branch_objective(d: usize, x: C64, r: f64, branch: Branch) -> Option<(f64, f64)> {
    let q = coeffs_from_xi(d, x, r);
    let linear = q.a.abs() < LINEAR_TOL;
    let (_, t) = roots(&q)
        .ok()?
        .into_iter()
        .find(|(b, _)| *b == branch || linear)?;
    let p = objective_from_xi(d, x, r, t);
    p.is_finite().then_some((p, t))
}

fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = hi - INV_PHI * (hi - lo);
    let mut e = lo + INV_PHI * (hi - lo);
    let mut fc = f(c);
    let mut fe = f(e);
    while hi - lo > tol {
        if fc >= fe {
            hi = e;
            e = c;
            fe = fc;
            c = hi - INV_PHI * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = e;
            fc = fe;
            e = lo + INV_PHI * (hi - lo);
            fe = f(e);
        }
    }
    0.5 * (lo + hi)
}

/// Best base state for index `a` over the configured `r` range and both branches.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct OptimizedBase {
    pub ansatz: Ansatz3,
    /// `p_a`, the common success probability of the three questions.
    pub probability: f64,
    /// Distance of the optimal `r` from the nearer end of the scan range.
    pub boundary_margin: f64,
}

/// Maximizes `(1 + 2r/√d)² / N²` subject to a real `t_±(r)`.
pub fn optimize_base(d: usize, a: usize, cfg: &ScanConfig) -> Result<OptimizedBase> {
    let x = xi(d, a)?;
    let steps = ((cfg.r_max - cfg.r_min) / cfg.step).round() as i64;
    let mut best: Option<(f64, f64, Branch)> = None;
    for i in 0..=steps {
        let r = cfg.r_min + i as f64 * cfg.step;
        for branch in [Branch::Plus, Branch::Minus] {
            if let Some((p, _)) = branch_objective(d, x, r, branch) {
                // strict comparison keeps the earlier candidate, so t_+ wins exact ties
                if best.is_none_or(|(bp, _, _)| p > bp) {
                    best = Some((p, r, branch));
                }
            }
        }
    }
    let (grid_p, grid_r, branch) = best.ok_or(QracError::Infeasible { d, a })?;

    let f = |r: f64| {
        branch_objective(d, x, r, branch)
            .map(|(p, _)| p)
            .unwrap_or(f64::NEG_INFINITY)
    };
    let lo = (grid_r - cfg.step).max(cfg.r_min);
    let hi = (grid_r + cfg.step).min(cfg.r_max);
    let refined = golden_max(f, lo, hi, cfg.tol);
    let (r, p) = if f(refined) >= grid_p {
        (refined, f(refined))
    } else {
        (grid_r, grid_p)
    };
    let (_, t) = branch_objective(d, x, r, branch).ok_or(QracError::Infeasible { d, a })?;
    Ok(OptimizedBase {
        ansatz: Ansatz3 { d, a, r, t, branch },
        probability: p,
        boundary_margin: (r - cfg.r_min).min(cfg.r_max - r),
    })
}

/// `max_{r, t_±} p(r, t)` for base index `a`, with the default scan.
pub fn success_for_a(d: usize, a: usize) -> Result<(f64, Ansatz3)> {
    let o = optimize_base(d, a, &ScanConfig::default())?;
    Ok((o.probability, o.ansatz))
}

/// Success probabilities `[P_0(x0), P_1(x1), P_2(x2)]` of `state` for the given targets.
pub fn question_probs(state: &Ket, bases: &[Basis; 3], targets: [usize; 3]) -> Result<[f64; 3]> {
    Ok([
        outcome_prob(state, &bases[0], targets[0])?,
        outcome_prob(state, &bases[1], targets[1])?,
        outcome_prob(state, &bases[2], targets[2])?,
    ])
}

/// Relabeled third symbol `f = β + a - (1+δ_d)α (mod d)` after acting with `X^α Z^β` on `|ψ_{00a}⟩`.
pub fn orbit_label(d: usize, alpha: usize, beta: usize, a: usize) -> usize {
    let c = chirp_factor(d) as i64;
    modulo(beta as i64 + a as i64 - c * alpha as i64, d)
}

/// Base index whose orbit reaches `(x0, x1, x2)`.
pub fn base_index(d: usize, x0: usize, x1: usize, x2: usize) -> usize {
    let c = chirp_factor(d) as i64;
    modulo(x2 as i64 - x1 as i64 + c * x0 as i64, d)
}

/// A fully optimized `3^(d) -> 1` code.
#[derive(Clone, Debug)]
pub struct Qrac3Code {
    d: usize,
    bases: [Basis; 3],
    base: Vec<OptimizedBase>,
    base_states: Vec<Ket>,
    /// Measured deviation of the Fourier/third pair from unbiasedness.
    pub mub_deviation: f64,
}

impl Qrac3Code {
    pub fn new(d: usize) -> Result<Self> {
        Self::with_config(d, &ScanConfig::default())
    }

    pub fn with_config(d: usize, cfg: &ScanConfig) -> Result<Self> {
        check_dim(d)?;
        let bases = [computational_basis(d)?, fourier_basis(d)?, third_mub(d)?];
        let mub_deviation = mub_overlap_check(&bases[1], &bases[2])?;
        let base = (0..d)
            .into_par_iter()
            .map(|a| optimize_base(d, a, cfg))
            .collect::<Result<Vec<_>>>()?;
        let base_states = base
            .iter()
            .map(|o| o.ansatz.state())
            .collect::<Result<Vec<_>>>()?;
        Ok(Qrac3Code {
            d,
            bases,
            base,
            base_states,
            mub_deviation,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn bases(&self) -> &[Basis; 3] {
        &self.bases
    }

    pub fn optimized(&self) -> &[OptimizedBase] {
        &self.base
    }

    pub fn per_a(&self) -> Vec<f64> {
        self.base.iter().map(|o| o.probability).collect()
    }

    pub fn summary(&self) -> SuccessSummary {
        SuccessSummary::from_values(&self.per_a())
    }

    pub fn base_state(&self, a: usize) -> &Ket {
        &self.base_states[a]
    }

    /// Smallest distance of any optimal `r` from the scan boundary.
    pub fn boundary_margin(&self) -> f64 {
        self.base
            .iter()
            .map(|o| o.boundary_margin)
            .fold(f64::INFINITY, f64::min)
    }

    /// `X^{x0} Z^{x1} |ψ_{00a}⟩` with `a` chosen so the orbit label equals `x2`.
    pub fn encode3(&self, x0: usize, x1: usize, x2: usize) -> Result<Ket> {
        for x in [x0, x1, x2] {
            if x >= self.d {
                return Err(QracError::OutOfRange {
                    symbol: x,
                    d: self.d,
                });
            }
        }
        let a = base_index(self.d, x0, x1, x2);
        Ket::new(apply_weyl(self.d, x0, x1, self.base_states[a].amps()))
    }

    /// Direct evaluation of the three question probabilities for `(x0, x1, x2)`.
    pub fn correct_probs(&self, x0: usize, x1: usize, x2: usize) -> Result<[f64; 3]> {
        question_probs(&self.encode3(x0, x1, x2)?, &self.bases, [x0, x1, x2])
    }

    /// Largest `|P_i - p_a|` over the three questions at the optimized base states.
    pub fn question_spread(&self) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for (a, o) in self.base.iter().enumerate() {
            let probs = question_probs(&self.base_states[a], &self.bases, [0, 0, a])?;
            for p in probs {
                worst = worst.max((p - o.probability).abs());
            }
        }
        Ok(worst)
    }

    /// Largest deviation between orbit-translated success probabilities and
    /// those of the base state, over all `(α, β, a)`.
    pub fn orbit_deviation(&self) -> Result<f64> {
        let d = self.d;
        let mut worst: f64 = 0.0;
        for a in 0..d {
            let reference = question_probs(&self.base_states[a], &self.bases, [0, 0, a])?;
            for alpha in 0..d {
                for beta in 0..d {
                    let moved = Ket::new(apply_weyl(d, alpha, beta, self.base_states[a].amps()))?;
                    let probs = question_probs(
                        &moved,
                        &self.bases,
                        [alpha, beta, orbit_label(d, alpha, beta, a)],
                    )?;
                    for (p, q) in probs.iter().zip(&reference) {
                        worst = worst.max((p - q).abs());
                    }
                }
            }
        }
        Ok(worst)
    }
}

/// Average and worst case over base indices, with the per-`a` list.
#[derive(Clone, Debug, PartialEq)]
pub struct Success3 {
    pub summary: SuccessSummary,
    pub per_a: Vec<f64>,
}

pub fn success3(d: usize) -> Result<Success3> {
    let code = Qrac3Code::new(d)?;
    Ok(Success3 {
        summary: code.summary(),
        per_a: code.per_a(),
    })
}

/// `p^Q_{3,d} / p^C_{3,d}` using the average.
pub fn advantage3(d: usize) -> Result<f64> {
    Ok(success3(d)?.summary.average / classical_success(3, d)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xi_examples() {
        let x2 = xi(2, 0).unwrap();
        assert!((x2 - C64::new(0.5, 0.5)).norm() < 1e-14);
        let x3 = xi(3, 0).unwrap();
        assert!((x3 - C64::new(0.0, 1.0 / 3f64.sqrt())).norm() < 1e-14);
        for d in [2, 3, 4, 5, 6, 7, 8, 11, 16] {
            for a in 0..d {
                assert!((xi(d, a).unwrap().norm() - 1.0 / (d as f64).sqrt()).abs() < 1e-10);
            }
        }
        assert!(xi(3, 3).is_err());
    }

    #[test]
    fn xi_is_basis_overlap() {
        for d in [3, 4, 9] {
            let e = fourier_basis(d).unwrap();
            let f = third_mub(d).unwrap();
            for a in 0..d {
                assert!((e.ket(0).inner(f.ket(a)) - xi(d, a).unwrap()).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn ansatz_collapses_to_zero_ket() {
        let s = base_state(5, 2, 0.0, 0.0).unwrap();
        assert!((s.fidelity(&Ket::basis_state(5, 0).unwrap()) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn coefficients_d2() {
        let q = quadratic_coeffs(2, 0, 0.0).unwrap();
        assert!((q.a - 0.5).abs() < 1e-14);
        assert!((q.b - 1.0 / 2f64.sqrt()).abs() < 1e-14);
        assert!((q.c + 0.5).abs() < 1e-14);
        let ts = t_solutions(2, 0, 0.0).unwrap();
        let s = 1.5f64.sqrt();
        let h = 1.0 / 2f64.sqrt();
        assert_eq!(ts.len(), 2);
        assert!((ts[0].1 - (-h + s)).abs() < 1e-14);
        assert!((ts[1].1 - (-h - s)).abs() < 1e-14);
    }

    #[test]
    fn leading_coefficient_identity() {
        for d in 2..10 {
            for a in 0..d {
                let x = xi(d, a).unwrap();
                let q = quadratic_coeffs(d, a, 0.3).unwrap();
                assert!((q.a - (C64::new(1.0, 0.0) - x).norm_sqr()).abs() < 1e-14);
                assert!(q.a > 0.0);
            }
        }
    }

    #[test]
    fn negative_discriminant_is_empty() {
        // d = 4, a = 1 becomes infeasible just past r = 1
        assert!(t_solutions(4, 1, 1.1).unwrap().is_empty());
        assert_eq!(t_solutions(4, 1, 0.5).unwrap().len(), 2);
    }

    #[test]
    fn roots_equalize_questions() {
        let d = 4;
        let bases = [
            computational_basis(d).unwrap(),
            fourier_basis(d).unwrap(),
            third_mub(d).unwrap(),
        ];
        for a in 0..d {
            for r in [-0.4, 0.2, 0.7] {
                for (_, t) in t_solutions(d, a, r).unwrap() {
                    let q = quadratic_coeffs(d, a, r).unwrap();
                    assert!(q.eval(t).abs() < 1e-9);
                    let st = base_state(d, a, r, t).unwrap();
                    let p = question_probs(&st, &bases, [0, 0, a]).unwrap();
                    assert!((p[0] - p[1]).abs() < 1e-9 && (p[1] - p[2]).abs() < 1e-9);
                    assert!((p[0] - objective(d, a, r, t).unwrap()).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn formula_norm_matches_direct() {
        for (d, a, r, t) in [(2, 1, 0.5, -0.2), (5, 3, -1.2, 0.9), (9, 4, 2.0, 1.5)] {
            let direct: f64 = raw_base_amplitudes(d, a, r, t)
                .iter()
                .map(|z| z.norm_sqr())
                .sum();
            assert!((direct - norm_sqr(d, a, r, t).unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn degenerate_normalization_rejected() {
        // d = 2, a = 0: r = -1/√2, t = 1/√2 cancels every component
        let h = 1.0 / 2f64.sqrt();
        assert!(norm_sqr(2, 0, -h, h).unwrap().abs() < 1e-14);
        assert!(matches!(
            base_state(2, 0, -h, h),
            Err(QracError::DegenerateNormalization(_))
        ));
    }

    #[test]
    fn qubit_cube_recovered() {
        let s = success3(2).unwrap();
        let cube = 0.5 * (1.0 + 1.0 / 3f64.sqrt());
        assert!((s.summary.average - cube).abs() < 1e-6);
    }

    #[test]
    fn qutrit_value() {
        let s = success3(3).unwrap();
        assert!((s.summary.average - 0.6971).abs() < 5e-4);
        assert!(s.summary.worst < s.summary.average);
    }

    #[test]
    fn grid_refinement_stable() {
        for (d, a) in [(3, 0), (4, 2), (5, 1)] {
            let coarse = optimize_base(d, a, &ScanConfig::default()).unwrap();
            let fine = optimize_base(
                d,
                a,
                &ScanConfig {
                    step: 1e-4,
                    ..ScanConfig::default()
                },
            )
            .unwrap();
            assert!(
                (coarse.probability - fine.probability).abs() < 1e-8,
                "({d}, {a})"
            );
        }
    }

    #[test]
    fn equal_question_property() {
        for d in 2..=8 {
            let code = Qrac3Code::new(d).unwrap();
            assert!(code.question_spread().unwrap() < 1e-8, "d = {d}");
            for o in code.optimized() {
                let q = quadratic_coeffs(d, o.ansatz.a, o.ansatz.r).unwrap();
                assert!(q.eval(o.ansatz.t).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn orbit_examples() {
        let code = Qrac3Code::new(3).unwrap();
        for a in 0..3 {
            let s = code.encode3(0, 0, a).unwrap();
            assert!((s.fidelity(code.base_state(a)) - 1.0).abs() < 1e-12);
        }
        let p = code.correct_probs(1, 2, 0).unwrap();
        let a = base_index(3, 1, 2, 0);
        let base = question_probs(code.base_state(a), code.bases(), [0, 0, a]).unwrap();
        for (x, y) in p.iter().zip(&base) {
            assert!((x - y).abs() < 1e-9);
        }
        assert!(code.encode3(3, 0, 0).is_err());
    }

    #[test]
    fn orbit_labels_invert() {
        for d in 2..=9 {
            for x0 in 0..d {
                for x1 in 0..d {
                    for x2 in 0..d {
                        let a = base_index(d, x0, x1, x2);
                        assert_eq!(orbit_label(d, x0, x1, a), x2);
                    }
                }
            }
        }
    }

    #[test]
    fn encodings_distinct() {
        for d in 2..=5 {
            let code = Qrac3Code::new(d).unwrap();
            let mut states = Vec::new();
            for x0 in 0..d {
                for x1 in 0..d {
                    for x2 in 0..d {
                        states.push(code.encode3(x0, x1, x2).unwrap());
                    }
                }
            }
            for i in 0..states.len() {
                for j in (i + 1)..states.len() {
                    assert!(states[i].fidelity(&states[j]) < 1.0 - 1e-9, "d = {d}");
                }
            }
        }
    }
}
