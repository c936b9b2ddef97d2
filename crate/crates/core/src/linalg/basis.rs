use std::f64::consts::PI;

use super::{check_dim, chirp_factor, omega_pow, Ket, C64, ORTHO_TOL};
use crate::error::{QracError, Result};

/// An ordered orthonormal basis of `d` kets.
#[derive(Clone, Debug, PartialEq)]
pub struct Basis {
    kets: Vec<Ket>,
}

impl Basis {
    /// Wraps `kets`, rejecting families that are not orthonormal within [`ORTHO_TOL`].
    pub fn new(kets: Vec<Ket>) -> Result<Self> {
        let d = kets.len();
        check_dim(d)?;
        if let Some(k) = kets.iter().find(|k| k.dim() != d) {
            return Err(QracError::DimensionMismatch {
                expected: d,
                got: k.dim(),
            });
        }
        let basis = Basis { kets };
        let dev = basis.orthonormality_deviation();
        if dev > ORTHO_TOL {
            return Err(QracError::Numerical(format!(
                "basis not orthonormal (deviation {dev:e})"
            )));
        }
        Ok(basis)
    }

    pub fn dim(&self) -> usize {
        self.kets.len()
    }

    pub fn ket(&self, l: usize) -> &Ket {
        &self.kets[l]
    }

    pub fn kets(&self) -> &[Ket] {
        &self.kets
    }

    /// `max_{i,j} | |⟨b_i|b_j⟩| - δ_ij |`.
    pub fn orthonormality_deviation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.kets.iter().enumerate() {
            for (j, b) in self.kets.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((a.inner(b).norm() - target).abs());
            }
        }
        worst
    }

    /// Full outcome distribution `|⟨b_l|ψ⟩|²` over `l`.
    pub fn distribution(&self, state: &Ket) -> Result<Vec<f64>> {
        (0..self.dim())
            .map(|l| outcome_prob(state, self, l))
            .collect()
    }
}

/// `{|l⟩}`: one-hot kets.
pub fn computational_basis(d: usize) -> Result<Basis> {
    check_dim(d)?;
    let kets = (0..d)
        .map(|l| Ket::basis_state(d, l))
        .collect::<Result<Vec<_>>>()?;
    Ok(Basis { kets })
}

/// `|e_l⟩ = d^{-1/2} Σ_k ω^{kl} |k⟩`.
pub fn fourier_basis(d: usize) -> Result<Basis> {
    check_dim(d)?;
    let s = 1.0 / (d as f64).sqrt();
    let kets = (0..d)
        .map(|l| Ket::new((0..d).map(|k| omega_pow(d, (k * l) as i64) * s).collect()))
        .collect::<Result<Vec<_>>>()?;
    Basis::new(kets)
}

/// Amplitude `⟨k|f_l⟩ · √d = exp(2πi kl/d + πi k²(1+δ_d)/d)`.
///
/// The chirp exponent is reduced modulo `2d` before evaluation so large `k`
/// keeps full precision.
pub(crate) fn third_mub_phase(d: usize, k: usize, l: usize) -> C64 {
    let c = chirp_factor(d);
    let chirp = (c * k * k) % (2 * d);
    let linear = (k * l) % d;
    let angle = 2.0 * PI * linear as f64 / d as f64 + PI * chirp as f64 / d as f64;
    C64::from_polar(1.0, angle)
}

/// Third basis `|f_l⟩ = d^{-1/2} Σ_k ω^{kl + k²(1+δ_d)/2} |k⟩`, with the
/// half-integer exponent pinned to `exp(+πi k²(1+δ_d)/d)`.
pub fn third_mub(d: usize) -> Result<Basis> {
    check_dim(d)?;
    let s = 1.0 / (d as f64).sqrt();
    let kets = (0..d)
        .map(|l| Ket::new((0..d).map(|k| third_mub_phase(d, k, l) * s).collect()))
        .collect::<Result<Vec<_>>>()?;
    Basis::new(kets)
}

/// `|⟨b_l|state⟩|²`.
pub fn outcome_prob(state: &Ket, basis: &Basis, l: usize) -> Result<f64> {
    if state.dim() != basis.dim() {
        return Err(QracError::DimensionMismatch {
            expected: basis.dim(),
            got: state.dim(),
        });
    }
    if l >= basis.dim() {
        return Err(QracError::OutOfRange {
            symbol: l,
            d: basis.dim(),
        });
    }
    Ok(basis.ket(l).fidelity(state).clamp(0.0, 1.0))
}

/// `max_{i,j} | |⟨b1_i|b2_j⟩|² - 1/d |`; zero for a mutually unbiased pair.
pub fn mub_overlap_check(b1: &Basis, b2: &Basis) -> Result<f64> {
    if b1.dim() != b2.dim() {
        return Err(QracError::DimensionMismatch {
            expected: b1.dim(),
            got: b2.dim(),
        });
    }
    let inv_d = 1.0 / b1.dim() as f64;
    let mut worst: f64 = 0.0;
    for a in b1.kets() {
        for b in b2.kets() {
            worst = worst.max((a.fidelity(b) - inv_d).abs());
        }
    }
    Ok(worst)
}
