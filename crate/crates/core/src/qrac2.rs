//! The `2^(d) -> 1` family built from the computational and Fourier bases.
//!
//! Alice encodes `(x0, x1)` as `X^{x0} Z^{x1} (|0⟩ + |e_0⟩)/N_{2,d}`; Bob
//! measures in `{|l⟩}` to learn `x0` and in `{|e_l⟩}` to learn `x1`.

use crate::classical::classical_success;
use crate::error::{QracError, Result};
use crate::linalg::{
    apply_weyl, check_dim, computational_basis, fourier_basis, omega_pow, outcome_prob, Basis, Ket,
    C64,
};
use crate::SuccessSummary;

/// `N_{2,d} = sqrt(2 + 2/√d)`.
pub fn normalization2(d: usize) -> f64 {
    (2.0 + 2.0 / (d as f64).sqrt()).sqrt()
}

fn base_amplitudes(d: usize) -> Vec<C64> {
    let e0 = 1.0 / (d as f64).sqrt();
    let n = normalization2(d);
    (0..d)
        .map(|k| C64::new((if k == 0 { 1.0 } else { 0.0 } + e0) / n, 0.0))
        .collect()
}

fn check_symbol(x: usize, d: usize) -> Result<()> {
    if x >= d {
        Err(QracError::OutOfRange { symbol: x, d })
    } else {
        Ok(())
    }
}

/// The encoding state `|ψ_{x0 x1}⟩`.
pub fn encode2(d: usize, x0: usize, x1: usize) -> Result<Ket> {
    check_dim(d)?;
    check_symbol(x0, d)?;
    check_symbol(x1, d)?;
    Ket::new(apply_weyl(d, x0, x1, &base_amplitudes(d)))
}

/// `P_0(l)` from the expanded form `|δ_{l,x0} + ω^{x1(l-x0)}/√d|² / N²`.
pub fn computational_distribution_closed(d: usize, x0: usize, x1: usize, l: usize) -> f64 {
    let delta = if l == x0 { 1.0 } else { 0.0 };
    let phase = omega_pow(d, x1 as i64 * (l as i64 - x0 as i64));
    let amp = C64::new(delta, 0.0) + phase / (d as f64).sqrt();
    amp.norm_sqr() / normalization2(d).powi(2)
}

/// `P_1(l)` from `|ω^{-l x0}/√d + ω^{-x0 x1} δ_{x1,l}|² / N²`.
pub fn fourier_distribution_closed(d: usize, x0: usize, x1: usize, l: usize) -> f64 {
    let delta = if l == x1 { 1.0 } else { 0.0 };
    let amp = omega_pow(d, -((l * x0) as i64)) / (d as f64).sqrt()
        + omega_pow(d, -((x0 * x1) as i64)) * delta;
    amp.norm_sqr() / normalization2(d).powi(2)
}

/// `(1 + 1/√d)/2`.
pub fn success2_closed(d: usize) -> Result<f64> {
    check_dim(d)?;
    Ok(0.5 * (1.0 + 1.0 / (d as f64).sqrt()))
}

/// All `d²` encoding states with the two measurement bases.
#[derive(Clone, Debug)]
pub struct Qrac2Code {
    d: usize,
    states: Vec<Ket>,
    bases: [Basis; 2],
}

impl Qrac2Code {
    pub fn new(d: usize) -> Result<Self> {
        check_dim(d)?;
        let mut states = Vec::with_capacity(d * d);
        for x0 in 0..d {
            for x1 in 0..d {
                states.push(encode2(d, x0, x1)?);
            }
        }
        Ok(Qrac2Code {
            d,
            states,
            bases: [computational_basis(d)?, fourier_basis(d)?],
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn state(&self, x0: usize, x1: usize) -> &Ket {
        &self.states[x0 * self.d + x1]
    }

    /// Basis Bob uses for question `y` (0: computational, 1: Fourier).
    pub fn basis(&self, y: usize) -> &Basis {
        &self.bases[y]
    }

    /// Probability that Bob's answer to question `y` is correct on `(x0, x1)`.
    pub fn correct_prob(&self, x0: usize, x1: usize, y: usize) -> Result<f64> {
        let target = if y == 0 { x0 } else { x1 };
        outcome_prob(self.state(x0, x1), self.basis(y), target)
    }

    /// Average and worst case over all encodings and both questions.
    pub fn summary(&self) -> Result<SuccessSummary> {
        let mut probs = Vec::with_capacity(2 * self.states.len());
        for x0 in 0..self.d {
            for x1 in 0..self.d {
                for y in 0..2 {
                    probs.push(self.correct_prob(x0, x1, y)?);
                }
            }
        }
        Ok(SuccessSummary::from_values(&probs))
    }
}

/// Enumerates every encoding and question; both entries equal [`success2_closed`].
pub fn success2_simulated(d: usize) -> Result<SuccessSummary> {
    Qrac2Code::new(d)?.summary()
}

/// `p^Q_{2,d} / p^C_{2,d}`.
pub fn advantage2(d: usize) -> Result<f64> {
    Ok(success2_closed(d)? / classical_success(2, d)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{weyl_x, weyl_z};

    #[test]
    fn qubit_square_code() {
        let psi = encode2(2, 0, 0).unwrap();
        let s = 1.0 / 2f64.sqrt();
        let n = normalization2(2);
        assert!((psi.amps()[0].re - (1.0 + s) / n).abs() < 1e-12);
        assert!((psi.amps()[1].re - s / n).abs() < 1e-12);
        let plus = fourier_basis(2).unwrap();
        let p = outcome_prob(&psi, &plus, 0).unwrap();
        assert!((p - 0.5 * (1.0 + s)).abs() < 1e-12);
    }

    #[test]
    fn ququart_base_state() {
        let psi = encode2(4, 0, 0).unwrap();
        let expect = [
            1.5 / 3f64.sqrt(),
            0.5 / 3f64.sqrt(),
            0.5 / 3f64.sqrt(),
            0.5 / 3f64.sqrt(),
        ];
        for (a, e) in psi.amps().iter().zip(expect) {
            assert!((a.re - e).abs() < 1e-12 && a.im.abs() < 1e-12);
        }
        assert!((expect[0] - 0.8660).abs() < 5e-5 && (expect[1] - 0.2887).abs() < 5e-5);
    }

    #[test]
    fn shift_permutes_amplitudes() {
        for d in [3, 5, 8] {
            let mut a: Vec<f64> = encode2(d, 0, 0)
                .unwrap()
                .amps()
                .iter()
                .map(|z| z.norm())
                .collect();
            let mut b: Vec<f64> = encode2(d, 1, 0)
                .unwrap()
                .amps()
                .iter()
                .map(|z| z.norm())
                .collect();
            a.sort_by(f64::total_cmp);
            b.sort_by(f64::total_cmp);
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn encoding_matches_weyl_matrices() {
        let d = 5;
        let x = weyl_x(d).unwrap();
        let z = weyl_z(d).unwrap();
        let base = encode2(d, 0, 0).unwrap();
        for x0 in 0..d {
            for x1 in 0..d {
                let u = &x.pow(x0 as u32) * &z.pow(x1 as u32);
                let via_matrix = base.apply(&u).unwrap();
                let fid = via_matrix.fidelity(&encode2(d, x0, x1).unwrap());
                assert!((fid - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn closed_values() {
        assert!((success2_closed(2).unwrap() - 0.85355).abs() < 5e-6);
        assert_eq!(success2_closed(4).unwrap(), 0.75);
        assert!((success2_closed(6).unwrap() - 0.70412).abs() < 5e-6);
        assert!(success2_closed(1).is_err());
    }

    #[test]
    fn simulated_values() {
        let s2 = success2_simulated(2).unwrap();
        assert!((s2.average - 0.85355339).abs() < 1e-8 && (s2.worst - s2.average).abs() < 1e-10);
        let s4 = success2_simulated(4).unwrap();
        assert!((s4.average - 0.75).abs() < 1e-10 && (s4.worst - 0.75).abs() < 1e-10);
        let s9 = success2_simulated(9).unwrap();
        assert!((s9.average - s9.worst).abs() < 1e-10);
    }

    #[test]
    fn expanded_distributions_match() {
        for d in [2, 3, 4, 7] {
            let code = Qrac2Code::new(d).unwrap();
            for x0 in 0..d {
                for x1 in 0..d {
                    let p0 = code.basis(0).distribution(code.state(x0, x1)).unwrap();
                    let p1 = code.basis(1).distribution(code.state(x0, x1)).unwrap();
                    for l in 0..d {
                        assert!(
                            (p0[l] - computational_distribution_closed(d, x0, x1, l)).abs() < 1e-10
                        );
                        assert!((p1[l] - fourier_distribution_closed(d, x0, x1, l)).abs() < 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn advantage_values() {
        assert!((advantage2(6).unwrap() - (6.0 + 6f64.sqrt()) / 7.0).abs() < 1e-12);
        assert!((advantage2(6).unwrap() - 1.207).abs() < 5e-4);
        assert!((advantage2(2).unwrap() - 1.138).abs() < 5e-4);
        let gap = success2_closed(4).unwrap() - classical_success(2, 4).unwrap().value;
        assert!((gap - 0.125).abs() < 1e-12);
    }

    #[test]
    fn symbols_checked() {
        assert!(matches!(
            encode2(3, 3, 0),
            Err(QracError::OutOfRange { .. })
        ));
        assert!(matches!(
            encode2(3, 0, 5),
            Err(QracError::OutOfRange { .. })
        ));
    }
}
