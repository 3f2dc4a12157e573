//! Kushilevitz-Mansour recovery of the significant Fourier coefficients of a
//! signed function, by prefix-bucket recursion.
//!
//! For a prefix `rho` of length `k`, the bucket weight is
//! `W(rho) = sum_z g^(rho z)^2`, and
//! `W(rho) = E[ g(x1 y) g(x2 y) (-1)^{rho.(x1 xor x2)} ]` over uniform
//! `x1, x2` in `{0,1}^k` and `y` in `{0,1}^{m-k}`. Prefixes whose estimated
//! weight exceeds `1/(8 theta^2)` are split one bit at a time; all prefixes of
//! one length are estimated from a shared sample stream. The surviving
//! full-length strings are then filtered by a direct coefficient estimate at
//! `3/(4 theta)`.
//!
//! Every `s` with `|g^(s)| >= 1/theta` has all prefix weights at least
//! `1/theta^2`, so it survives the recursion; the leaf filter is run at
//! accuracy `1/(8 theta)`, which keeps kept coefficients above `5/(8 theta)`
//! and dropped ones below `7/(8 theta)`.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::estimate::estimate_fourier_coefficient;
use super::{wht_spectrum, SignedFunction, MAX_EXACT_BITS};
use crate::bits::{low_mask, Bits};
use crate::error::{Error, Result};
use crate::rng::{self, Op};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KmMode {
    /// Exact spectrum when `m <= 20`, Monte Carlo otherwise.
    Auto,
    Exact,
    MonteCarlo,
}

impl std::str::FromStr for KmMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(KmMode::Auto),
            "exact" => Ok(KmMode::Exact),
            "mc" | "monte_carlo" | "monte-carlo" => Ok(KmMode::MonteCarlo),
            _ => Err(Error::invalid(format!("unknown KM mode {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KmParams {
    pub theta: f64,
    pub delta: f64,
    /// Samples per bucket-weight estimate.
    pub sample_budget: u64,
    pub mode: KmMode,
    /// Recursion aborts once more prefixes than this are alive; `ceil(64 theta^2)` by default.
    pub frontier_cap: usize,
}

/// `ceil(64 theta^4 ln(8 m theta^2 / delta))`.
pub fn km_weight_budget(theta: f64, delta: f64, m: usize) -> u64 {
    let k = 64.0 * theta.powi(4) * (8.0 * m as f64 * theta * theta / delta).ln();
    if k >= u64::MAX as f64 {
        u64::MAX
    } else {
        k.ceil() as u64
    }
}

impl KmParams {
    /// Half of `delta` goes to the weight stage (through the budget formula),
    /// the other half to the leaf filter.
    pub fn new(theta: f64, delta: f64, m: usize) -> Result<Self> {
        if theta.is_nan() || theta < 1.0 || !theta.is_finite() {
            return Err(Error::invalid(format!("theta = {theta} must be >= 1")));
        }
        if !(delta > 0.0 && delta < 0.5) {
            return Err(Error::invalid(format!("delta = {delta} must lie in (0, 1/2)")));
        }
        Ok(KmParams {
            theta,
            delta,
            sample_budget: km_weight_budget(theta, delta / 2.0, m),
            mode: KmMode::Auto,
            frontier_cap: (64.0 * theta * theta).ceil() as usize,
        })
    }

    pub fn with_mode(mut self, mode: KmMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_sample_budget(mut self, budget: u64) -> Self {
        self.sample_budget = budget.max(1);
        self
    }

    pub fn with_frontier_cap(mut self, cap: usize) -> Self {
        self.frontier_cap = cap;
        self
    }

    /// Membership threshold on `|g^(s)|`.
    pub fn keep_threshold(&self) -> f64 {
        0.75 / self.theta
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KmOutcome {
    pub set: Vec<Bits>,
    pub exact: bool,
    pub weight_estimates: u64,
    pub samples: u64,
    pub max_frontier: usize,
}

/// Estimated significant set `L~`; see the module docs for the guarantees.
pub fn km_significant_set(g: &SignedFunction, params: &KmParams, seed: u64) -> Result<KmOutcome> {
    let m = g.m();
    let exact = match params.mode {
        KmMode::Exact => {
            if m > MAX_EXACT_BITS {
                return Err(Error::Capacity(format!("exact KM needs m <= {MAX_EXACT_BITS}, got {m}")));
            }
            true
        }
        KmMode::Auto => m <= MAX_EXACT_BITS,
        KmMode::MonteCarlo => false,
    };
    if exact {
        let spec = wht_spectrum(g)?;
        let thr = params.keep_threshold();
        let set = spec
            .iter()
            .filter(|(_, c)| c.abs() >= thr)
            .map(|(s, _)| *s)
            .collect();
        return Ok(KmOutcome {
            set,
            exact: true,
            weight_estimates: 0,
            samples: 0,
            max_frontier: 0,
        });
    }
    monte_carlo(g, params, seed)
}

fn monte_carlo(g: &SignedFunction, params: &KmParams, seed: u64) -> Result<KmOutcome> {
    let m = g.m();
    let theta = params.theta;
    let weight_threshold = 1.0 / (8.0 * theta * theta);
    let cap = params.frontier_cap;
    let budget = params.sample_budget;
    let weight_seed = rng::derive(seed, &[Op::KmWeight as u64]);
    let table = SignTable::build(g);

    let mut frontier: Vec<u64> = vec![0];
    let mut estimates = 0u64;
    let mut levels = 0u64;
    let mut max_frontier = 1usize;
    for k in 1..=m {
        let children: Vec<u64> = frontier.iter().flat_map(|&p| [p << 1, (p << 1) | 1]).collect();
        let weights = level_weights(g, table.as_ref(), &children, k, budget, weight_seed);
        estimates += children.len() as u64;
        levels += 1;
        frontier = children
            .into_iter()
            .zip(weights)
            .filter(|&(_, w)| w > weight_threshold)
            .map(|(rho, _)| rho)
            .collect();
        if frontier.len() > cap {
            return Err(Error::Capacity(format!(
                "KM frontier reached {} live prefixes at depth {k} (cap {cap}); sparsity promise violated",
                frontier.len()
            )));
        }
        max_frontier = max_frontier.max(frontier.len());
        if frontier.is_empty() {
            break;
        }
    }

    let leaf_seed = rng::derive(seed, &[Op::KmLeaf as u64]);
    let leaf_delta = params.delta / 2.0 / frontier.len().max(1) as f64;
    let leaf_accuracy = (1.0 / (8.0 * theta)).min(1.0);
    let thr = params.keep_threshold();
    let leaves: Vec<(Bits, f64, u64)> = frontier
        .par_iter()
        .map(|&s| {
            let s = Bits::new(m, s)?;
            let est = estimate_fourier_coefficient(g, &s, leaf_accuracy, leaf_delta, leaf_seed)?;
            Ok((s, est.value, est.samples))
        })
        .collect::<Result<_>>()?;
    let leaf_samples: u64 = leaves.iter().map(|l| l.2).sum();
    let set = leaves
        .into_iter()
        .filter(|(_, a, _)| a.abs() >= thr)
        .map(|(s, _, _)| s)
        .collect();
    Ok(KmOutcome {
        set,
        exact: false,
        weight_estimates: estimates,
        samples: levels.saturating_mul(budget).saturating_add(leaf_samples),
        max_frontier,
    })
}

/// `g` as a packed bit table (`1` where `g = -1`), for inputs small enough to tabulate.
struct SignTable(Vec<u64>);

/// Largest input size whose signs are cached during Monte Carlo recursion.
const SIGN_TABLE_BITS: usize = 20;

impl SignTable {
    fn build(g: &SignedFunction) -> Option<SignTable> {
        let m = g.m();
        if m > SIGN_TABLE_BITS {
            return None;
        }
        let mut words = vec![0u64; (1usize << m).div_ceil(64)];
        for x in 0..1u64 << m {
            if g.eval(x) < 0 {
                words[(x >> 6) as usize] |= 1 << (x & 63);
            }
        }
        Some(SignTable(words))
    }

    #[inline]
    fn bit(&self, x: u64) -> u64 {
        (self.0[(x >> 6) as usize] >> (x & 63)) & 1
    }
}

/// Monte Carlo estimates of `W(rho)` for every length-`k` prefix in `prefixes`,
/// all computed from one shared stream of `samples` draws of `(x1, x2, y)`.
fn level_weights(
    g: &SignedFunction,
    table: Option<&SignTable>,
    prefixes: &[u64],
    k: usize,
    samples: u64,
    seed: u64,
) -> Vec<f64> {
    let negatives = match table {
        Some(t) => count_negatives(|x| t.bit(x), g.m(), prefixes, k, samples, seed),
        None => count_negatives(|x| u64::from(g.eval(x) < 0), g.m(), prefixes, k, samples, seed),
    };
    negatives
        .into_iter()
        .map(|neg| (samples as f64 - 2.0 * neg as f64) / samples as f64)
        .collect()
}

/// Per prefix, the number of samples where `g(x1 y) g(x2 y) (-1)^{rho.(x1 xor x2)}` is `-1`.
#[inline(always)]
fn count_negatives<F: Fn(u64) -> u64 + Sync>(
    sign: F,
    m: usize,
    prefixes: &[u64],
    k: usize,
    samples: u64,
    seed: u64,
) -> Vec<u64> {
    let suffix = m - k;
    let mk = low_mask(k);
    let my = low_mask(suffix);
    // Random bits per sample; several samples share one 64-bit draw when they fit.
    let width = (m + k) as u32;
    let per_word = if width <= 64 { 64 / u64::from(width) } else { 0 };
    let add = |neg: &mut [u64], x1: u64, x2: u64, y: u64| {
        let gg = sign((x1 << suffix) | y) ^ sign((x2 << suffix) | y);
        let d = x1 ^ x2;
        for (n, &rho) in neg.iter_mut().zip(prefixes) {
            *n += gg ^ (u64::from((d & rho).count_ones()) & 1);
        }
    };
    rng::chunks(samples)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(chunk, count)| {
            let mut r = rng::stream(seed, Op::KmWeight, k as u64, chunk);
            let mut neg = vec![0u64; prefixes.len()];
            if per_word == 0 {
                for _ in 0..count {
                    let (w1, w2, w3) = (r.random::<u64>(), r.random::<u64>(), r.random::<u64>());
                    add(&mut neg, w1 & mk, w2 & mk, w3 & my);
                }
                return neg;
            }
            let mut left = count;
            while left > 0 {
                let take = per_word.min(left);
                let mut w = r.random::<u64>();
                for _ in 0..take {
                    let x2 = w.checked_shr(k as u32).unwrap_or(0) & mk;
                    let y = w.checked_shr(2 * k as u32).unwrap_or(0) & my;
                    add(&mut neg, w & mk, x2, y);
                    w = w.checked_shr(width).unwrap_or(0);
                }
                left -= take;
            }
            neg
        })
        .reduce(
            || vec![0u64; prefixes.len()],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        )
}
