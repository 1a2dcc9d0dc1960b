//! Differential Rényi and Shannon entropies of sampled densities, and the
//! corresponding entropy powers for any extended index.
//!
//! Internally entropies are accumulated in nats (the power prefactors are
//! stated for nats); bits appear only at the API boundary. The index
//! `p = ∞` evaluates through the peak value of the density; the crate
//! treats `N_∞` and the occasionally-seen `N_{∞/2}` notation as the same
//! object.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{quadrature, SampledDensity};

pub const LOG2_E: f64 = std::f64::consts::LOG2_E;

/// Extended Rényi order: any finite p > 0, or infinity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum EntropyIndex {
    Finite(f64),
    Infinity,
}

impl EntropyIndex {
    pub fn finite(p: f64) -> Result<Self> {
        if !(p > 0.0) || !p.is_finite() {
            return Err(Error::OutOfRange(format!("entropy index must be finite > 0, got {p}")));
        }
        Ok(EntropyIndex::Finite(p))
    }

    pub fn shannon() -> Self {
        EntropyIndex::Finite(1.0)
    }

    pub fn value(&self) -> f64 {
        match self {
            EntropyIndex::Finite(p) => *p,
            EntropyIndex::Infinity => f64::INFINITY,
        }
    }
}

impl std::fmt::Display for EntropyIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EntropyIndex::Finite(p) => write!(f, "{p}"),
            EntropyIndex::Infinity => write!(f, "inf"),
        }
    }
}

/// Entropy and entropy power at one index.
///
/// `diverged` marks the two degenerate outcomes: a non-integrable `∫F^p`
/// (entropy and power `+∞`) and an unbounded peak at `p = ∞` (entropy `-∞`,
/// power `0`). `tail_exponent` carries the fitted tail power law when the
/// divergence detector fired.
#[derive(Debug, Clone, Copy)]
pub struct EntropyResult {
    pub entropy_bits: f64,
    pub power: f64,
    pub index: EntropyIndex,
    pub diverged: bool,
    pub tail_exponent: Option<f64>,
}

/// Hölder conjugate of an index with p >= 1.
pub fn holder_conjugate(idx: EntropyIndex) -> Result<EntropyIndex> {
    match idx {
        EntropyIndex::Infinity => Ok(EntropyIndex::Finite(1.0)),
        EntropyIndex::Finite(p) if (p - 1.0).abs() < 1e-14 => Ok(EntropyIndex::Infinity),
        EntropyIndex::Finite(p) if p > 1.0 => Ok(EntropyIndex::Finite(p / (p - 1.0))),
        EntropyIndex::Finite(p) => Err(Error::OutOfRange(format!(
            "Hölder conjugate requires p >= 1, got {p}"
        ))),
    }
}

/// Tail decay estimate of a density, from log-log fits over the outer 10%
/// of bins on each side of the mode.
#[derive(Debug, Clone, Copy)]
pub struct TailEstimate {
    /// Fitted |y|^(-beta) exponent; the slower-decaying side when both fit.
    pub exponent: Option<f64>,
    /// Edge values are not small relative to the peak, so the grid looks
    /// like the full (compact) support rather than a truncated tail.
    pub compact_support: bool,
}

/// Slack on the integrability threshold: `beta * p <= 1 + margin` is treated
/// as divergent, so near-critical integrals whose truncation error would
/// dominate are flagged rather than silently misreported.
const TAIL_MARGIN: f64 = 0.05;
/// Edge value above this fraction of the peak means compact support.
const COMPACT_SUPPORT_RATIO: f64 = 1e-6;
/// Values below this fraction of the peak are treated as numerical noise
/// and excluded from tail fitting. Round-off floors of large FFTs reach
/// ~1e-26 of the peak in the density, so the cut sits above that.
const TAIL_FLOOR_RATIO: f64 = 1e-23;

fn side_exponent(dist: &[f64], vals: &[f64]) -> Option<f64> {
    // Least squares of ln F against ln distance-from-mode.
    let pts: Vec<(f64, f64)> = dist
        .iter()
        .zip(vals)
        .filter(|(d, v)| **d > 0.0 && **v > 0.0)
        .map(|(d, v)| (d.ln(), v.ln()))
        .collect();
    if pts.len() < 8 {
        return None;
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-12 {
        return None;
    }
    let slope = (n * sxy - sx * sy) / denom;
    Some(-slope)
}

/// Fit the outer tails of a density with a power law.
///
/// Each side is fitted over the outermost stretch of bins that still sit
/// above the numerical noise floor, so FFT round-off plateaus in the far
/// field do not masquerade as slowly decaying tails.
pub fn tail_estimate(f: &SampledDensity) -> TailEstimate {
    let n = f.grid.n;
    let mode = f.mode();
    let peak = f.max_value();
    if peak <= 0.0 {
        return TailEstimate { exponent: None, compact_support: true };
    }
    let floor = TAIL_FLOOR_RATIO * peak;

    let mode_k = {
        let mut best = 0;
        for (k, &v) in f.values.iter().enumerate() {
            if v > f.values[best] {
                best = k;
            }
        }
        best
    };

    // Outermost above-floor bin on each side.
    let left_start = f.values.iter().position(|v| *v > floor);
    let right_start = f.values.iter().rposition(|v| *v > floor);
    let (left_start, right_start) = match (left_start, right_start) {
        (Some(a), Some(b)) => (a, b),
        _ => return TailEstimate { exponent: None, compact_support: true },
    };
    if f.values[left_start].min(f.values[right_start]) > COMPACT_SUPPORT_RATIO * peak {
        return TailEstimate { exponent: None, compact_support: true };
    }

    let mut exps: Vec<f64> = Vec::new();
    if mode_k > left_start {
        let len = (n / 10).min((mode_k - left_start) / 2).max(8).min(mode_k - left_start);
        let ks = left_start..left_start + len;
        let dist: Vec<f64> = ks.clone().map(|k| (f.grid.coord(k) - mode).abs()).collect();
        let vals: Vec<f64> = ks.map(|k| f.values[k]).collect();
        if let Some(b) = side_exponent(&dist, &vals) {
            exps.push(b);
        }
    }
    if right_start > mode_k {
        let len = (n / 10).min((right_start - mode_k) / 2).max(8).min(right_start - mode_k);
        let ks = right_start + 1 - len..=right_start;
        let dist: Vec<f64> = ks.clone().map(|k| (f.grid.coord(k) - mode).abs()).collect();
        let vals: Vec<f64> = ks.map(|k| f.values[k]).collect();
        if let Some(b) = side_exponent(&dist, &vals) {
            exps.push(b);
        }
    }
    let exponent = exps.into_iter().fold(None, |acc: Option<f64>, b| {
        Some(acc.map_or(b, |a| a.min(b)))
    });
    TailEstimate { exponent, compact_support: false }
}

/// Whether `∫ F^p` (p < 1) fails the tail-integrability test.
fn diverges_at(f: &SampledDensity, p: f64) -> (bool, Option<f64>) {
    let est = tail_estimate(f);
    if est.compact_support {
        return (false, None);
    }
    match est.exponent {
        Some(beta) if beta > 0.0 => (beta * p <= 1.0 + TAIL_MARGIN, Some(beta)),
        Some(beta) => (true, Some(beta)), // non-decaying fitted tail
        None => (false, None),
    }
}

/// Whether the second moment `∫ y² F` fails the same test (needs tail decay
/// faster than |y|^-3).
pub fn second_moment_diverges(f: &SampledDensity) -> bool {
    let est = tail_estimate(f);
    if est.compact_support {
        return false;
    }
    match est.exponent {
        Some(beta) => beta <= 3.0 + TAIL_MARGIN,
        None => false,
    }
}

/// Scaling ratio of symmetric second differences of ln F at the mode below
/// which the peak is declared unbounded. A smooth peak has a locally
/// quadratic log-density, so doubling the stencil width quadruples the
/// second difference; singular peaks (e.g. log-divergent ones) scale much
/// more slowly.
const PEAK_SCALING_LIMIT: f64 = 3.0;

/// Detect a density whose grid maximum keeps growing under refinement,
/// e.g. a log-divergent peak, from how the curvature of ln F at the mode
/// responds to widening the finite-difference stencil.
pub fn peak_unbounded(f: &SampledDensity) -> bool {
    let n = f.grid.n;
    if n < 16 {
        return false;
    }
    let mut j0 = 0;
    for (k, &v) in f.values.iter().enumerate() {
        if v > f.values[j0] {
            j0 = k;
        }
    }
    if j0 < 4 || j0 + 4 >= n {
        return false; // mode at the boundary; nothing to resolve
    }
    let stencil = [f.values[j0 - 4], f.values[j0 - 2], f.values[j0], f.values[j0 + 2], f.values[j0 + 4]];
    if stencil.iter().any(|v| *v <= 0.0) {
        return false;
    }
    let l = |v: f64| v.ln();
    let d2_narrow = l(stencil[1]) - 2.0 * l(stencil[2]) + l(stencil[3]);
    let d2_wide = l(stencil[0]) - 2.0 * l(stencil[2]) + l(stencil[4]);
    if d2_narrow.abs() < 1e-9 {
        return false; // flat top
    }
    d2_wide / d2_narrow < PEAK_SCALING_LIMIT
}

fn power_prefactor(p: f64) -> f64 {
    // p^{1/(1-p)}: tends to 1/e as p -> 1 and to 1 as p -> ∞, so the same
    // expression covers the Shannon and sup-norm limits continuously.
    (p.ln() / (1.0 - p)).exp()
}

/// Entropy and entropy power of a normalized density at one extended index.
pub fn evaluate(f: &SampledDensity, idx: EntropyIndex) -> EntropyResult {
    let d = f.dim as f64;
    let two_pi = 2.0 * std::f64::consts::PI;
    match idx {
        EntropyIndex::Infinity => {
            if peak_unbounded(f) {
                return EntropyResult {
                    entropy_bits: f64::NEG_INFINITY,
                    power: 0.0,
                    index: idx,
                    diverged: true,
                    tail_exponent: None,
                };
            }
            let max = f.max_value();
            let entropy_nats = -max.ln();
            EntropyResult {
                entropy_bits: entropy_nats * LOG2_E,
                power: (2.0 * entropy_nats / d).exp() / two_pi,
                index: idx,
                diverged: false,
                tail_exponent: None,
            }
        }
        EntropyIndex::Finite(p) if (p - 1.0).abs() < 1e-12 => {
            let integrand: Vec<f64> = f
                .values
                .iter()
                .map(|&v| if v > 0.0 { -v * v.ln() } else { 0.0 })
                .collect();
            let h_nats = quadrature(f.grid.dx, &integrand);
            EntropyResult {
                entropy_bits: h_nats * LOG2_E,
                power: (2.0 * h_nats / d).exp() / (two_pi * std::f64::consts::E),
                index: idx,
                diverged: false,
                tail_exponent: None,
            }
        }
        EntropyIndex::Finite(p) => {
            let mut tail_exponent = None;
            if p < 1.0 {
                let (div, beta) = diverges_at(f, p);
                tail_exponent = beta;
                if div {
                    return EntropyResult {
                        entropy_bits: f64::INFINITY,
                        power: f64::INFINITY,
                        index: idx,
                        diverged: true,
                        tail_exponent,
                    };
                }
            }
            // Max-normalized accumulation keeps F^p in range for large p.
            let max = f.max_value();
            if max <= 0.0 {
                return EntropyResult {
                    entropy_bits: f64::INFINITY,
                    power: f64::INFINITY,
                    index: idx,
                    diverged: true,
                    tail_exponent,
                };
            }
            let scaled: Vec<f64> = f.values.iter().map(|&v| (v / max).powf(p)).collect();
            let ln_integral = p * max.ln() + quadrature(f.grid.dx, &scaled).ln();
            let entropy_nats = ln_integral / (1.0 - p);
            EntropyResult {
                entropy_bits: entropy_nats * LOG2_E,
                power: power_prefactor(p) * (2.0 * entropy_nats / d).exp() / two_pi,
                index: idx,
                diverged: false,
                tail_exponent,
            }
        }
    }
}

/// Differential Rényi entropy in bits (Shannon at p = 1).
pub fn renyi_entropy(f: &SampledDensity, idx: EntropyIndex) -> EntropyResult {
    evaluate(f, idx)
}

/// Rényi entropy power.
pub fn entropy_power(f: &SampledDensity, idx: EntropyIndex) -> EntropyResult {
    evaluate(f, idx)
}
