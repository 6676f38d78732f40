//! Sign constants of the mixed Lipschitz–Killing forms.
//!
//! `c1` is the exponent of the sign in front of the mixed form, `c2` the
//! parity of the shuffle that groups principal directions face by face, and
//! `c3` the parity of moving the normals `u_j` to the end of the wedge. The
//! defining sums are evaluated literally; the reduced expressions obtained
//! by dropping even terms are kept separately so they can be checked against
//! the defining sums.

use crate::error::{validation, Result};

/// Value of `c1` stated for a single set (q = 1). The general formula gives
/// `2 d r` there, which is even; [`SignCalc::c1`] follows the general formula.
pub const SINGLE_SET_C1_STATED: i64 = 1;

/// Dimension and order tuple `(r_1, ..., r_q)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignCalc {
    d: usize,
    r: Vec<usize>,
}

/// Values and parities of the three sign exponents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SignParities {
    pub c1: i64,
    pub c2: i64,
    pub c3: i64,
    pub c1_parity: u8,
    pub c2_parity: u8,
    pub c3_parity: u8,
}

impl SignParities {
    /// Parity of `c1 + c2 + c3 + (d-1) q(q-1)/2`, which must vanish.
    pub fn closing_parity(&self, d: usize, q: usize) -> u8 {
        let total = self.c1 + self.c2 + self.c3 + (d as i64 - 1) * binom2(q as i64);
        total.rem_euclid(2) as u8
    }
}

pub fn sign_parities(d: usize, r: &[usize]) -> Result<SignParities> {
    Ok(SignCalc::new(d, r.to_vec())?.parities())
}

fn binom2(q: i64) -> i64 {
    q * (q - 1) / 2
}

fn parity(x: i64) -> u8 {
    x.rem_euclid(2) as u8
}

impl SignCalc {
    pub fn new(d: usize, r: Vec<usize>) -> Result<Self> {
        if d == 0 {
            return validation("sign calculus needs d >= 1");
        }
        if r.is_empty() {
            return validation("sign calculus needs at least one order");
        }
        if let Some(bad) = r.iter().find(|&&ri| ri > d) {
            return validation(format!("order {bad} exceeds dimension {d}"));
        }
        Ok(Self { d, r })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn orders(&self) -> &[usize] {
        &self.r
    }

    pub fn q(&self) -> usize {
        self.r.len()
    }

    fn di(&self) -> i64 {
        self.d as i64
    }

    fn ri(&self) -> Vec<i64> {
        self.r.iter().map(|&x| x as i64).collect()
    }

    /// Partial sums `R_i = r_1 + ... + r_i`.
    fn partial_sums(&self) -> Vec<i64> {
        self.ri()
            .iter()
            .scan(0, |acc, &x| {
                *acc += x;
                Some(*acc)
            })
            .collect()
    }

    /// `k = r_1 + ... + r_q - (q-1) d` (may be out of range for arbitrary tuples).
    pub fn k(&self) -> i64 {
        self.ri().iter().sum::<i64>() - (self.q() as i64 - 1) * self.di()
    }

    /// `c1 = d Σ r_i + d Σ i r_i + Σ_{i<j} r_i r_j`.
    pub fn c1(&self) -> i64 {
        let d = self.di();
        let r = self.ri();
        let sum: i64 = r.iter().sum();
        let weighted: i64 = r.iter().enumerate().map(|(i, x)| (i as i64 + 1) * x).sum();
        let mut cross = 0;
        for i in 0..r.len() {
            for j in i + 1..r.len() {
                cross += r[i] * r[j];
            }
        }
        d * sum + d * weighted + cross
    }

    /// `c2 = Σ_j (d-1-r_j)(R_q - R_j)`.
    pub fn c2(&self) -> i64 {
        let d = self.di();
        let r = self.ri();
        let big = self.partial_sums();
        let total = *big.last().expect("q >= 1");
        r.iter()
            .zip(&big)
            .map(|(rj, bj)| (d - 1 - rj) * (total - bj))
            .sum()
    }

    /// `c3 = Σ_{j=2}^q (j-1)(d-1-r_j)`; empty for `q = 1`.
    pub fn c3(&self) -> i64 {
        let d = self.di();
        self.ri()
            .iter()
            .enumerate()
            .skip(1)
            .map(|(j, rj)| j as i64 * (d - 1 - rj))
            .sum()
    }

    pub fn parities(&self) -> SignParities {
        let (c1, c2, c3) = (self.c1(), self.c2(), self.c3());
        SignParities {
            c1,
            c2,
            c3,
            c1_parity: parity(c1),
            c2_parity: parity(c2),
            c3_parity: parity(c3),
        }
    }

    /// The successive expressions for `c1` modulo even terms, starting from
    /// the exponent `(k-1)(q-1)d + Σ_{i>=2} (d-r_i)(k_i-(i-2)d-1)` with
    /// `k_i = R_i - (i-1) d`. Every entry is congruent to [`Self::c1`] mod 2.
    pub fn c1_reduction_chain(&self) -> Vec<i64> {
        let d = self.di();
        let q = self.q() as i64;
        let r = self.ri();
        let big = self.partial_sums();
        let rq = *big.last().expect("q >= 1");
        let sum: i64 = r.iter().sum();
        let weighted: i64 = r.iter().enumerate().map(|(i, x)| (i as i64 + 1) * x).sum();
        let k = self.k();

        let start: i64 = (k - 1) * (q - 1) * d
            + (1..r.len())
                .map(|i| {
                    let idx = i as i64 + 1;
                    let ki = big[i] - (idx - 1) * d;
                    (d - r[i]) * (ki - (idx - 2) * d - 1)
                })
                .sum::<i64>();
        let line1 = (q - 1) * d * rq
            + r.iter()
                .zip(&big)
                .map(|(ri, bi)| (d - ri) * (bi - d - 1))
                .sum::<i64>();
        let line2 = (q - 1) * d * rq
            + d * big.iter().sum::<i64>()
            + r.iter().zip(&big).map(|(ri, bi)| ri * bi).sum::<i64>()
            + (d - 1) * sum;
        let mut upper = 0;
        for i in 0..r.len() {
            for j in i..r.len() {
                upper += r[i] * r[j];
            }
        }
        let line3 = (q - 1) * d * rq
            + d * r
                .iter()
                .enumerate()
                .map(|(i, x)| (q - i as i64) * x)
                .sum::<i64>()
            + upper
            + (d - 1) * sum;
        let mut strict = 0;
        for i in 0..r.len() {
            for j in i + 1..r.len() {
                strict += r[i] * r[j];
            }
        }
        let line4 = ((q - 1) * d + d * (q + 1) + 1 + (d - 1)) * sum + d * weighted + strict;
        vec![start, line1, line2, line3, line4]
    }

    /// Successive reduced expressions for `c2`.
    pub fn c2_reduction_chain(&self) -> Vec<i64> {
        let d = self.di();
        let q = self.q() as i64;
        let r = self.ri();
        let big = self.partial_sums();
        let rq = *big.last().expect("q >= 1");
        let sum: i64 = r.iter().sum();
        let weighted: i64 = r.iter().enumerate().map(|(i, x)| (i as i64 + 1) * x).sum();
        let mut strict = 0;
        for i in 0..r.len() {
            for j in i + 1..r.len() {
                strict += r[i] * r[j];
            }
        }
        let a = q * (d - 1) * rq
            + (d - 1) * big.iter().sum::<i64>()
            + rq * sum
            + r.iter().zip(&big).map(|(ri, bi)| ri * bi).sum::<i64>();
        let b = q * (d - 1) * rq + (d - 1) * ((q + 1) * sum - weighted) + rq + sum + strict;
        let c = (d - 1) * sum + (d - 1) * weighted + strict;
        vec![a, b, c]
    }

    /// Reduced expression `(d-1) q(q-1)/2 + Σ i r_i + Σ r_i` for `c3`.
    pub fn c3_reduced(&self) -> i64 {
        let d = self.di();
        let r = self.ri();
        let sum: i64 = r.iter().sum();
        let weighted: i64 = r.iter().enumerate().map(|(i, x)| (i as i64 + 1) * x).sum();
        (d - 1) * binom2(self.q() as i64) + weighted + sum
    }
}
