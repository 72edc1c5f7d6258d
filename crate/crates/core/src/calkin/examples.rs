//! Closed-form example and counterexample tables.

use serde::{Deserialize, Serialize};

use super::profile::band_counts;
use crate::seqkit::{pow_int, tensor_prefix, DecreasingSeq};
use crate::{Error, Result};

/// One row of the non-stability counterexample for the geometric space:
/// `alpha_n = (w (x) w)(n) / n` against `beta = r0 (x) w`, sampled at
/// `n(r) = r r0 (r r0 + 1) / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleRow {
    pub r0: usize,
    pub r: usize,
    pub n: usize,
    pub alpha: f64,
    pub beta: f64,
    pub ratio: f64,
    /// `alpha_n`, `beta_n` read off the sequences themselves.
    pub alpha_direct: f64,
    pub beta_direct: f64,
}

/// Tabulates `alpha_{n(r)} / beta_{n(r)}` from the closed forms
/// `alpha_{M(M+1)/2} = 2 w^(M-1) / (M(M+1))` and `beta_{r0 m} = w^(m-1)`,
/// and cross-checks both against directly computed sequence terms.
pub fn counterexample_table(
    omega: f64,
    r0_list: &[usize],
    r_list: &[usize],
) -> Result<Vec<CounterexampleRow>> {
    super::profile::check_omega(omega)?;
    if let Some(r) = r_list.iter().find(|&&r| r == 0 || r % 2 == 1) {
        return Err(Error::InvalidArgument(format!("r = {r} must be a positive even integer")));
    }
    if r0_list.contains(&0) {
        return Err(Error::InvalidArgument("r0 must be positive".into()));
    }
    let w = DecreasingSeq::geometric(omega, 1)?;
    let mut rows = Vec::new();
    for &r0 in r0_list {
        let n_max = r_list.iter().map(|&r| r * r0 * (r * r0 + 1) / 2).max().unwrap_or(0);
        let ww = tensor_prefix(&w, &w, n_max)?;
        let beta_seq = w.repeated(r0, n_max)?;
        for &r in r_list {
            let big_m = r * r0;
            let n = big_m * (big_m + 1) / 2;
            let m = r * (r0 * r + 1) / 2;
            debug_assert_eq!(n, r0 * m);
            let alpha = 2.0 / (big_m * (big_m + 1)) as f64 * pow_int(omega, big_m as u64 - 1);
            let beta = pow_int(omega, m as u64 - 1);
            rows.push(CounterexampleRow {
                r0,
                r,
                n,
                alpha,
                beta,
                ratio: alpha / beta,
                alpha_direct: ww.prefix()[n - 1] / n as f64,
                beta_direct: beta_seq.prefix()[n - 1],
            });
        }
    }
    Ok(rows)
}

/// Partial sums for `lambda_j = j^(-1/p)`: summable at exponent `2p`,
/// harmonic at exponent `p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct L2pDemo {
    pub p: f64,
    pub n: usize,
    /// `(N_k, sum lambda^(2p), sum lambda^p, H_{N_k})` at checkpoints.
    pub rows: Vec<(usize, f64, f64, f64)>,
    pub sum_2p: f64,
    pub sum_p: f64,
    /// `max_k |sum lambda^p - H_{N_k}|` over checkpoints.
    pub harmonic_gap: f64,
    /// Integral bound `1/N` on the `2p`-tail.
    pub tail_bound_2p: f64,
    pub strictly_decreasing: bool,
}

pub fn l2p_not_lp_demo(p: f64, n: usize) -> Result<L2pDemo> {
    if !(p > 2.0) {
        return Err(Error::InvalidArgument(format!("p = {p} must exceed 2")));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("N must be positive".into()));
    }
    let lambda = |j: usize| (j as f64).powf(-1.0 / p);
    let mut strictly_decreasing = true;
    let (mut s2p, mut sp, mut h) = (0.0, 0.0, 0.0);
    let mut rows = Vec::new();
    let mut next_checkpoint = 1;
    for j in 1..=n {
        let l = lambda(j);
        if j > 1 && !(l < lambda(j - 1) && l > 0.0) {
            strictly_decreasing = false;
        }
        s2p += l.powf(2.0 * p);
        sp += l.powf(p);
        h += 1.0 / j as f64;
        if j == next_checkpoint || j == n {
            rows.push((j, s2p, sp, h));
            next_checkpoint *= 10;
        }
    }
    let harmonic_gap = rows.iter().map(|r| (r.2 - r.3).abs()).fold(0.0, f64::max);
    Ok(L2pDemo {
        p,
        n,
        rows,
        sum_2p: s2p,
        sum_p: sp,
        harmonic_gap,
        tail_bound_2p: 1.0 / n as f64,
        strictly_decreasing,
    })
}

/// Band counts of `n^(-lambda)` at `omega = 1/e` against `e^(j mu)`,
/// `mu = 1/lambda`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerEnvelope {
    pub lambda: f64,
    /// `(j, K_j, K_j / e^(j mu))`.
    pub rows: Vec<(usize, f64, f64)>,
    /// Observed `min_j K_j / e^(j mu)` and `max_j K_j / e^(j mu)`.
    pub c_lower: f64,
    pub c_upper: f64,
    /// First `j` from which
    /// `(e^((j+1)mu) - e^(j mu)) / 2 <= K_j <= e^((j+1)mu) - e^(j mu)`
    /// holds for every later band; `None` if it fails at the last band.
    pub bracket_from: Option<usize>,
}

pub fn power_band_envelope(lambda: f64, depth: usize) -> Result<PowerEnvelope> {
    let a = DecreasingSeq::power(lambda, 1)?;
    let (k, _) = band_counts(&a, (-1f64).exp(), depth)?;
    let mu = 1.0 / lambda;
    let rows: Vec<(usize, f64, f64)> =
        k.iter().enumerate().map(|(j, &kj)| (j, kj, kj / (j as f64 * mu).exp())).collect();
    let c_lower = rows.iter().map(|r| r.2).fold(f64::INFINITY, f64::min);
    let c_upper = rows.iter().map(|r| r.2).fold(0.0, f64::max);
    let in_bracket = |j: usize| {
        let width = ((j + 1) as f64 * mu).exp() - (j as f64 * mu).exp();
        // counts are integers: allow the rounding of the closed-form width
        0.5 * width <= k[j] && k[j] <= width * (1.0 + 1e-12)
    };
    let bracket_from = (0..=depth).rev().take_while(|&j| in_bracket(j)).last();
    Ok(PowerEnvelope { lambda, rows, c_lower, c_upper, bracket_from })
}
