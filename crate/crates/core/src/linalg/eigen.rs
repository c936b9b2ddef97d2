//! Hermitian eigendecomposition by cyclic complex Jacobi rotations.
//!
//! Each rotation first removes the phase of the pivot `h_pq` with a diagonal
//! unitary and then applies the classical real Jacobi rotation, so the whole
//! update is `H <- U† H U` with `U` unitary.

use super::{Operator, C64};
use crate::error::{QracError, Result};

const OFF_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 100;

/// Eigenpairs of a Hermitian operator, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Column `j` is the eigenvector of `values[j]`.
    pub vectors: Operator,
}

impl HermitianEigen {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn vector(&self, j: usize) -> Vec<C64> {
        (0..self.dim()).map(|i| self.vectors.get(i, j)).collect()
    }

    /// Eigenvector of the largest eigenvalue.
    pub fn top_vector(&self) -> Vec<C64> {
        self.vector(self.dim() - 1)
    }

    /// `Σ_j f(λ_j) |v_j⟩⟨v_j|`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> Operator {
        let d = self.dim();
        let weights: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        Operator::from_fn(d, |i, k| {
            let mut acc = C64::new(0.0, 0.0);
            for (j, &w) in weights.iter().enumerate() {
                if w != 0.0 {
                    acc += self.vectors.get(i, j) * self.vectors.get(k, j).conj() * w;
                }
            }
            acc
        })
    }

    /// `A^{p}` restricted to eigenvalues above `cutoff`, others mapped to zero.
    pub fn psd_power(&self, p: f64, cutoff: f64) -> Operator {
        self.map_spectrum(|l| if l > cutoff { l.powf(p) } else { 0.0 })
    }

    /// Projector onto the span of eigenvectors with eigenvalue above `cutoff`.
    pub fn support_projector(&self, cutoff: f64) -> Operator {
        self.map_spectrum(|l| if l > cutoff { 1.0 } else { 0.0 })
    }
}

fn off_diagonal_norm(h: &Operator) -> f64 {
    let d = h.dim();
    let mut s = 0.0;
    for i in 0..d {
        for j in 0..d {
            if i != j {
                s += h.get(i, j).norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Eigendecomposition of a Hermitian matrix.
///
/// The input is symmetrized as `(H + H†)/2` first. Fails only if the sweep
/// limit is reached without the off-diagonal norm dropping below
/// `1e-12 · max(1, ‖H‖_F)`.
pub fn eigh(input: &Operator) -> Result<HermitianEigen> {
    let d = input.dim();
    let mut h = input.hermitian_part();
    let mut v = Operator::identity(d);
    let scale = {
        let mut s = 0.0;
        for i in 0..d {
            for j in 0..d {
                s += h.get(i, j).norm_sqr();
            }
        }
        s.sqrt().max(1.0)
    };

    let mut converged = off_diagonal_norm(&h) <= OFF_TOL * scale;
    let mut sweeps = 0;
    while !converged {
        if sweeps == MAX_SWEEPS {
            return Err(QracError::Numerical(format!(
                "Jacobi eigensolver did not converge in {MAX_SWEEPS} sweeps"
            )));
        }
        for p in 0..d {
            for q in (p + 1)..d {
                let hpq = h.get(p, q);
                let mag = hpq.norm();
                if mag == 0.0 {
                    continue;
                }
                let phase = hpq / mag;
                let app = h.get(p, p).re;
                let aqq = h.get(q, q).re;
                let theta = (aqq - app) / (2.0 * mag);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // U restricted to (p, q): [[c, s], [-s e^{-iφ}, c e^{-iφ}]]
                let upp = C64::new(c, 0.0);
                let upq = C64::new(s, 0.0);
                let uqp = -phase.conj() * s;
                let uqq = phase.conj() * c;

                for k in 0..d {
                    let hkp = h.get(k, p);
                    let hkq = h.get(k, q);
                    h.set(k, p, hkp * upp + hkq * uqp);
                    h.set(k, q, hkp * upq + hkq * uqq);
                }
                for k in 0..d {
                    let hpk = h.get(p, k);
                    let hqk = h.get(q, k);
                    h.set(p, k, upp.conj() * hpk + uqp.conj() * hqk);
                    h.set(q, k, upq.conj() * hpk + uqq.conj() * hqk);
                }
                h.set(p, q, C64::new(0.0, 0.0));
                h.set(q, p, C64::new(0.0, 0.0));
                h.set(p, p, C64::new(h.get(p, p).re, 0.0));
                h.set(q, q, C64::new(h.get(q, q).re, 0.0));

                for k in 0..d {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, vkp * upp + vkq * uqp);
                    v.set(k, q, vkp * upq + vkq * uqq);
                }
            }
        }
        sweeps += 1;
        converged = off_diagonal_norm(&h) <= OFF_TOL * scale;
    }

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| h.get(a, a).re.total_cmp(&h.get(b, b).re));
    let values = order.iter().map(|&j| h.get(j, j).re).collect();
    let vectors = Operator::from_fn(d, |i, j| v.get(i, order[j]));
    Ok(HermitianEigen { values, vectors })
}
