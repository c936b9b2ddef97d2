//! Classical random access codes `n^(d) -> 1`.
//!
//! The average success of majority encoding with identity decoding is
//! computed exactly by summing over integer partitions of `n`: every string
//! has a frequency signature, and all strings sharing a signature contribute
//! `max(signature) / n` each.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{QracError, Result};

/// Largest `d^n` that [`majority_strategy_success`] will enumerate.
pub const MAJORITY_LIMIT: u64 = 100_000_000;
/// Largest number of encoding tables `d^(d^n)` that [`brute_force_optimal`] will enumerate.
pub const ORACLE_TABLE_LIMIT: u64 = 1 << 24;
/// Largest `n` accepted by the exact partition sum.
pub const MAX_EXACT_N: usize = 80;

/// A partition of `n` into positive parts, stored non-increasing.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    parts: Vec<usize>,
}

impl Partition {
    /// Sorts `parts` non-increasing; rejects empty input and zero parts.
    pub fn new(mut parts: Vec<usize>) -> Result<Self> {
        if parts.is_empty() || parts.contains(&0) {
            return Err(QracError::InvalidArgument(
                "partition parts must be positive and non-empty".into(),
            ));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Partition { parts })
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn n(&self) -> usize {
        self.parts.iter().sum()
    }

    /// Largest part, i.e. the majority frequency.
    pub fn max_part(&self) -> usize {
        self.parts[0]
    }

    /// Number of parts, i.e. distinct symbols used by a matching string.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Multiplicity of each distinct part value.
    pub fn multiplicities(&self) -> BTreeMap<usize, usize> {
        let mut m = BTreeMap::new();
        for &p in &self.parts {
            *m.entry(p).or_insert(0) += 1;
        }
        m
    }
}

/// All partitions of `n`, largest first part first.
pub fn partitions(n: usize) -> Result<Vec<Partition>> {
    if n < 1 {
        return Err(QracError::InvalidArgument("n must be at least 1".into()));
    }
    let mut out = Vec::new();
    let mut current = Vec::new();
    fill_partitions(n, n, &mut current, &mut out);
    Ok(out)
}

fn fill_partitions(rest: usize, cap: usize, current: &mut Vec<usize>, out: &mut Vec<Partition>) {
    if rest == 0 {
        out.push(Partition {
            parts: current.clone(),
        });
        return;
    }
    for part in (1..=cap.min(rest)).rev() {
        current.push(part);
        fill_partitions(rest - part, part, current, out);
        current.pop();
    }
}

fn factorial(k: usize) -> BigUint {
    (1..=k).fold(BigUint::one(), |acc, i| acc * BigUint::from(i))
}

/// Number of strings in `{0..d-1}^n` whose frequency signature is `p`.
///
/// `n!/(Π k_i!) · (Π_l C(l)!)^{-1} · d(d-1)…(d-m+1)`; zero when `p` has more
/// parts than the alphabet has symbols.
pub fn count_strings(p: &Partition, d: usize) -> BigUint {
    if p.len() > d {
        return BigUint::zero();
    }
    let mut denom = p
        .parts()
        .iter()
        .fold(BigUint::one(), |acc, &k| acc * factorial(k));
    for &c in p.multiplicities().values() {
        denom *= factorial(c);
    }
    let falling = (0..p.len()).fold(BigUint::one(), |acc, m| acc * BigUint::from(d - m));
    factorial(p.n()) / denom * falling
}

/// An exact success probability together with its float rendering.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactProbability {
    pub exact: BigRational,
    pub value: f64,
}

impl ExactProbability {
    fn new(exact: BigRational) -> Self {
        let value = exact.to_f64().unwrap_or(f64::NAN);
        ExactProbability { exact, value }
    }
}

fn check_classical(n: usize, d: usize) -> Result<()> {
    if n < 1 {
        return Err(QracError::InvalidArgument("n must be at least 1".into()));
    }
    if d < 2 {
        return Err(QracError::InvalidDimension(d));
    }
    Ok(())
}

/// `p^C_{n,d} = (1/(n d^n)) Σ_j max(X_j) N_{X_j}`, evaluated exactly.
pub fn classical_success(n: usize, d: usize) -> Result<ExactProbability> {
    check_classical(n, d)?;
    if n > MAX_EXACT_N {
        return Err(QracError::InstanceTooLarge(format!(
            "n = {n} exceeds the partition-sum limit {MAX_EXACT_N}"
        )));
    }
    let mut weighted = BigUint::zero();
    let mut total = BigUint::zero();
    for p in partitions(n)? {
        let count = count_strings(&p, d);
        weighted += &count * BigUint::from(p.max_part());
        total += count;
    }
    let strings = BigUint::from(d).pow(n as u32);
    if total != strings {
        return Err(QracError::Numerical(format!(
            "partition counts sum to {total}, expected {strings}"
        )));
    }
    let denom = BigInt::from(strings) * BigInt::from(n);
    Ok(ExactProbability::new(BigRational::new(
        BigInt::from(weighted),
        denom,
    )))
}

/// Closed forms for `n = 2` and `n = 3` as exact rationals.
pub fn closed_form_exact(n: usize, d: usize) -> Result<BigRational> {
    if d < 2 {
        return Err(QracError::InvalidDimension(d));
    }
    let one = BigRational::one();
    let dd = BigRational::from_integer(BigInt::from(d));
    match n {
        2 => Ok((&one + &one / &dd) / BigRational::from_integer(2.into())),
        3 => {
            let three = BigRational::from_integer(3.into());
            Ok((&one + &three / &dd - &one / (&dd * &dd)) / three)
        }
        _ => Err(QracError::Unsupported(format!(
            "closed form known only for n = 2, 3 (got n = {n})"
        ))),
    }
}

/// `n = 2: (1 + 1/d)/2`, `n = 3: (1 + 3/d - 1/d²)/3`.
pub fn closed_form_success(n: usize, d: usize) -> Result<f64> {
    if d < 2 {
        return Err(QracError::InvalidDimension(d));
    }
    let d = d as f64;
    match n {
        2 => Ok(0.5 * (1.0 + 1.0 / d)),
        3 => Ok((1.0 + 3.0 / d - 1.0 / (d * d)) / 3.0),
        _ => Err(QracError::Unsupported(format!(
            "closed form known only for n = 2, 3 (got n = {n})"
        ))),
    }
}

fn checked_pow(d: usize, n: usize) -> Option<u64> {
    (d as u64).checked_pow(u32::try_from(n).ok()?)
}

/// Simulates majority encoding with identity decoding over all `d^n` strings.
///
/// Ties go to the lowest symbol; this does not change the average.
pub fn majority_strategy_success(n: usize, d: usize) -> Result<f64> {
    check_classical(n, d)?;
    let total = checked_pow(d, n)
        .filter(|&t| t <= MAJORITY_LIMIT)
        .ok_or_else(|| {
            QracError::InstanceTooLarge(format!("d^n = {d}^{n} exceeds {MAJORITY_LIMIT}"))
        })?;
    let mut digits = vec![0usize; n];
    let mut freq = vec![0usize; d];
    freq[0] = n;
    let mut hits: u64 = 0;
    for _ in 0..total {
        let (sent, _) =
            freq.iter().enumerate().fold(
                (0, 0),
                |best, (s, &c)| if c > best.1 { (s, c) } else { best },
            );
        hits += digits.iter().filter(|&&x| x == sent).count() as u64;
        // odometer increment with incremental frequency update
        for digit in digits.iter_mut().rev() {
            freq[*digit] -= 1;
            *digit += 1;
            if *digit == d {
                *digit = 0;
                freq[0] += 1;
            } else {
                freq[*digit] += 1;
                break;
            }
        }
    }
    Ok(hits as f64 / (n as f64 * total as f64))
}

/// A deterministic classical strategy: Alice's encoding table and one
/// decoding table per question.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassicalStrategy {
    pub n: usize,
    pub d: usize,
    /// `encode[i]` is the symbol sent for the string with index `i`
    /// (`x_0` most significant).
    pub encode: Vec<usize>,
    /// `decode[y][m]` is Bob's guess for `x_y` on receiving `m`.
    pub decode: Vec<Vec<usize>>,
}

/// Digits of string index `i`, `x_0` most significant.
pub fn string_digits(mut i: usize, n: usize, d: usize) -> Vec<usize> {
    let mut x = vec![0; n];
    for slot in x.iter_mut().rev() {
        *slot = i % d;
        i /= d;
    }
    x
}

impl ClassicalStrategy {
    pub fn new(n: usize, d: usize, encode: Vec<usize>, decode: Vec<Vec<usize>>) -> Result<Self> {
        check_classical(n, d)?;
        let strings = checked_pow(d, n)
            .ok_or_else(|| QracError::InstanceTooLarge(format!("{d}^{n}")))?
            as usize;
        let ok = encode.len() == strings
            && encode.iter().all(|&m| m < d)
            && decode.len() == n
            && decode
                .iter()
                .all(|t| t.len() == d && t.iter().all(|&v| v < d));
        if !ok {
            return Err(QracError::InvalidArgument(
                "strategy tables are incomplete or out of range".into(),
            ));
        }
        Ok(ClassicalStrategy {
            n,
            d,
            encode,
            decode,
        })
    }

    /// Number of (string, question) pairs answered correctly.
    pub fn correct_count(&self) -> u64 {
        let mut hits = 0;
        for (i, &m) in self.encode.iter().enumerate() {
            let x = string_digits(i, self.n, self.d);
            for (decode, &xy) in self.decode.iter().zip(&x) {
                if decode[m] == xy {
                    hits += 1;
                }
            }
        }
        hits
    }

    pub fn success_probability(&self) -> f64 {
        self.correct_count() as f64 / (self.n * self.encode.len()) as f64
    }
}

/// Result of the exhaustive search.
#[derive(Clone, Debug, PartialEq)]
pub struct OptimalStrategy {
    /// Correct (string, question) pairs of the best strategy.
    pub correct: u64,
    /// `n · d^n`.
    pub trials: u64,
    pub strategy: ClassicalStrategy,
}

impl OptimalStrategy {
    pub fn probability(&self) -> f64 {
        self.correct as f64 / self.trials as f64
    }

    pub fn exact(&self) -> BigRational {
        BigRational::new(self.correct.into(), self.trials.into())
    }
}

/// Score of one encoding table under optimal (plurality) decoding.
fn plurality_score(
    table: &[usize],
    digits: &[Vec<usize>],
    n: usize,
    d: usize,
    counts: &mut [u64],
) -> u64 {
    counts.iter_mut().for_each(|c| *c = 0);
    // counts[(y * d + m) * d + v] = #{x : e(x) = m, x_y = v}
    for (x, &m) in digits.iter().zip(table) {
        for (y, &v) in x.iter().enumerate() {
            counts[(y * d + m) * d + v] += 1;
        }
    }
    let mut score = 0;
    for ym in 0..n * d {
        score += counts[ym * d..(ym + 1) * d]
            .iter()
            .max()
            .copied()
            .unwrap_or(0);
    }
    score
}

fn plurality_decode(table: &[usize], digits: &[Vec<usize>], n: usize, d: usize) -> Vec<Vec<usize>> {
    let mut decode = vec![vec![0; d]; n];
    for (y, dec) in decode.iter_mut().enumerate() {
        for (m, slot) in dec.iter_mut().enumerate() {
            let mut counts = vec![0u64; d];
            for (x, &e) in digits.iter().zip(table) {
                if e == m {
                    counts[x[y]] += 1;
                }
            }
            // lowest value wins ties
            let mut best = 0;
            for v in 1..d {
                if counts[v] > counts[best] {
                    best = v;
                }
            }
            *slot = best;
        }
    }
    decode
}

/// Exhaustive search over every encoding table, decoding each optimally.
///
/// Deterministic: among equally good tables the one with the lowest index
/// (base-`d` reading of the table, entry 0 most significant) is returned.
pub fn brute_force_optimal(n: usize, d: usize) -> Result<OptimalStrategy> {
    check_classical(n, d)?;
    let too_large = || {
        QracError::InstanceTooLarge(format!(
            "d^(d^n) for (n, d) = ({n}, {d}) exceeds {ORACLE_TABLE_LIMIT}"
        ))
    };
    let strings = checked_pow(d, n).ok_or_else(too_large)?;
    let tables = checked_pow(d, strings as usize)
        .filter(|&t| t <= ORACLE_TABLE_LIMIT)
        .ok_or_else(too_large)?;
    let strings = strings as usize;
    let digits: Vec<Vec<usize>> = (0..strings).map(|i| string_digits(i, n, d)).collect();

    let (score, index) = (0..tables)
        .into_par_iter()
        .map_init(
            || vec![0u64; n * d * d],
            |counts, t| {
                let table = string_digits(t as usize, strings, d);
                (plurality_score(&table, &digits, n, d, counts), t)
            },
        )
        .reduce(
            || (0, u64::MAX),
            |a, b| {
                if a.0 > b.0 || (a.0 == b.0 && a.1 < b.1) {
                    a
                } else {
                    b
                }
            },
        );
    let encode = string_digits(index as usize, strings, d);
    let decode = plurality_decode(&encode, &digits, n, d);
    let strategy = ClassicalStrategy::new(n, d, encode, decode)?;
    debug_assert_eq!(strategy.correct_count(), score);
    Ok(OptimalStrategy {
        correct: score,
        trials: (n * strings) as u64,
        strategy,
    })
}
