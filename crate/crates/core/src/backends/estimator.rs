//! Importance-sampling estimator for `<phi|A|phi>`.
//!
//! Draw `x ~ |<x|phi>|^2` and average `Y(x) = <x|A|phi> / <x|phi>`, where
//! `<x|A|phi> = sum_j conj(beta_j(x)) <gamma_j(x)|phi>` because `A` is
//! Hermitian. `E[Y] = <phi|A|phi>` and `E|Y|^2 = |A phi|^2 <= 1`.

use std::f64::consts::FRAC_PI_4;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::ct::CTState;
use super::ecs::{EcsOperation, PhasePermutation};
use crate::error::{Error, Result};
use crate::rng::{self, Op};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TailPath {
    /// `|Y| <= 1` is certified, so Hoeffding applies to `Re Y`.
    Hoeffding,
    MedianOfMeans,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CtEcsEstimate {
    pub value: f64,
    pub samples: u64,
    pub path: TailPath,
}

/// `ceil(2 ln(2/delta) / epsilon^2)`.
pub fn hoeffding_count(epsilon: f64, delta: f64) -> u64 {
    (2.0 * (2.0 / delta).ln() / (epsilon * epsilon)).ceil() as u64
}

/// `(groups, group size) = (18 ceil(ln(1/delta)), ceil(6/epsilon^2))`.
pub fn median_of_means_shape(epsilon: f64, delta: f64) -> (u64, u64) {
    (18 * (1.0 / delta).ln().ceil().max(1.0) as u64, (6.0 / (epsilon * epsilon)).ceil() as u64)
}

const COS8: [f64; 8] = [
    1.0,
    std::f64::consts::FRAC_1_SQRT_2,
    0.0,
    -std::f64::consts::FRAC_1_SQRT_2,
    -1.0,
    -std::f64::consts::FRAC_1_SQRT_2,
    0.0,
    std::f64::consts::FRAC_1_SQRT_2,
];

/// Phase of `Y(x)` in units of `pi/4` when `A` is a phase permutation; `None` when `Y(x) = 0`.
#[inline]
fn y_eighths(phi: &CTState, a: &PhasePermutation, x: u64) -> Option<u8> {
    let (b, gx) = a.forward(x);
    let ag = phi.amplitude_eighths(gx)?;
    let ax = phi.amplitude_eighths(x).expect("samples lie in the support");
    Some(ag.wrapping_sub(ax).wrapping_sub(b) & 7)
}

/// `Y(x)` in general.
pub fn y_value(phi: &CTState, a: &EcsOperation, x: u64) -> Complex64 {
    if let EcsOperation::BasisPreserving(p) = a {
        return match y_eighths(phi, p, x) {
            Some(e) => Complex64::from_polar(1.0, FRAC_PI_4 * f64::from(e)),
            None => Complex64::new(0.0, 0.0),
        };
    }
    let ax = phi.amplitude(x);
    assert!(ax.norm_sqr() > 0.0, "Y evaluated outside the support");
    let num: Complex64 = a
        .column(x)
        .into_iter()
        .filter(|(b, _)| b.norm_sqr() > 0.0)
        .map(|(b, g)| b.conj() * phi.amplitude(g))
        .sum();
    num / ax
}

fn check_args(phi: &CTState, a: &EcsOperation, epsilon: f64, delta: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::invalid(format!("epsilon {epsilon} must be positive")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid(format!("delta {delta} not in (0, 1)")));
    }
    if phi.n() != a.n() {
        return Err(Error::DimensionMismatch(format!("{}-qubit operation on {} qubits", a.n(), phi.n())));
    }
    Ok(())
}

/// Estimate of `<phi|A|phi>` within `epsilon` with probability at least `1 - delta`.
pub fn estimate_ct_ecs(phi: &CTState, a: &EcsOperation, epsilon: f64, delta: f64, seed: u64) -> Result<CtEcsEstimate> {
    check_args(phi, a, epsilon, delta)?;
    match a {
        EcsOperation::BasisPreserving(p) if phi.flat_magnitude().is_some() => {
            let samples = hoeffding_count(epsilon, delta);
            // Per-chunk histograms of the phase of Y keep the reduction exact.
            let hist: [u64; 9] = rng::chunks(samples)
                .collect::<Vec<_>>()
                .into_par_iter()
                .map(|(chunk, count)| {
                    let mut r = rng::stream(seed, Op::CtEcs, 0, chunk);
                    let mut h = [0u64; 9];
                    for _ in 0..count {
                        let x = phi.sample(&mut r);
                        match y_eighths(phi, p, x) {
                            Some(e) => h[e as usize] += 1,
                            None => h[8] += 1,
                        }
                    }
                    h
                })
                .reduce(
                    || [0u64; 9],
                    |mut a, b| {
                        a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                        a
                    },
                );
            let total: f64 = (0..8).map(|e| hist[e] as f64 * COS8[e]).sum();
            Ok(CtEcsEstimate {
                value: total / samples as f64,
                samples,
                path: TailPath::Hoeffding,
            })
        }
        _ => {
            let (groups, size) = median_of_means_shape(epsilon, delta);
            let mut means: Vec<f64> = (0..groups)
                .into_par_iter()
                .map(|g| {
                    let mut r = rng::stream(seed, Op::CtEcs, 1, g);
                    let sum: f64 = (0..size).map(|_| y_value(phi, a, phi.sample(&mut r)).re).sum();
                    sum / size as f64
                })
                .collect();
            means.sort_by(f64::total_cmp);
            let mid = means.len() / 2;
            let value = if means.len().is_multiple_of(2) {
                0.5 * (means[mid - 1] + means[mid])
            } else {
                means[mid]
            };
            Ok(CtEcsEstimate {
                value,
                samples: groups * size,
                path: TailPath::MedianOfMeans,
            })
        }
    }
}

/// Exact moments of `Y` under `x ~ |<x|phi>|^2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct YMoments {
    pub mean_re: f64,
    pub mean_im: f64,
    pub second_moment: f64,
    pub max_abs: f64,
}

/// Enumerates the support of `phi` (at most `2^20` states).
pub fn enumerate_y(phi: &CTState, a: &EcsOperation) -> Result<YMoments> {
    if phi.support_size() > 1 << 20 {
        return Err(Error::Capacity("Y enumeration limited to 2^20 support states".into()));
    }
    if phi.n() != a.n() {
        return Err(Error::DimensionMismatch("operation and state sizes differ".into()));
    }
    let mut mean = Complex64::new(0.0, 0.0);
    let mut second = 0.0;
    let mut max_abs: f64 = 0.0;
    for x in phi.support() {
        let w = phi.amplitude(x).norm_sqr();
        let y = y_value(phi, a, x);
        mean += y * w;
        second += w * y.norm_sqr();
        max_abs = max_abs.max(y.norm());
    }
    Ok(YMoments {
        mean_re: mean.re,
        mean_im: mean.im,
        second_moment: second,
        max_abs,
    })
}
