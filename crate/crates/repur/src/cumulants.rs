//! Cumulants of the information random variable, obtained either from a
//! tower of entropy powers through a Grünwald–Letnikov finite-difference
//! scheme or directly from the moments of an information scan, plus the
//! shifted-gamma reference cumulants and the Gram–Charlier reconstruction
//! of the information PDF built from them.

use crate::error::{Error, Result};
use crate::grid::{Grid1D, SampledDensity};
use crate::infoscan::{self, InformationScan};
use crate::renyi::{self, EntropyIndex, LOG2_E};
use serde::Serialize;

/// Default index resolution of the finite-difference tower.
pub const DEFAULT_DELTA: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CumulantSource {
    Gldf,
    Scan,
}

/// Cumulants κ₁..κ_m of the information variable, in bitsⁿ.
#[derive(Debug, Clone, Serialize)]
pub struct CumulantSet {
    /// kappa[n-1] holds κₙ.
    pub kappa: Vec<f64>,
    pub delta: f64,
    pub dim: u32,
    pub source: CumulantSource,
}

impl CumulantSet {
    /// 1-based accessor for κₙ.
    pub fn kappa(&self, n: usize) -> f64 {
        self.kappa[n - 1]
    }

    pub fn order(&self) -> usize {
        self.kappa.len()
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    let mut out = 1.0;
    for j in 0..k {
        out *= (n - j) as f64 / (j + 1) as f64;
    }
    out
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn check_delta(delta: f64) -> Result<()> {
    if !(1e-3..=0.1).contains(&delta) {
        return Err(Error::OutOfRange(format!(
            "index resolution must lie in [1e-3, 0.1], got {delta}"
        )));
    }
    Ok(())
}

/// Cumulants from a tower of entropy powers `powers[k] = N_{1+kΔ}`,
/// k = 0..n_max-1, via alternating binomial differences of ln N plus the
/// dimension-dependent reference constant.
pub fn cumulants_gldf(powers: &[f64], delta: f64, dim: u32, n_max: usize) -> Result<CumulantSet> {
    check_delta(delta)?;
    if powers.len() < n_max {
        return Err(Error::InsufficientTower { needed: n_max, got: powers.len() });
    }
    for (k, &p) in powers.iter().take(n_max).enumerate() {
        if !(p > 0.0) || !p.is_finite() {
            return Err(Error::NonFinitePower { k, value: p });
        }
    }
    let d = dim as f64;
    let ln_powers: Vec<f64> = powers.iter().take(n_max).map(|p| p.ln()).collect();
    let mut kappa = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let mut sum = 0.0;
        for k in 0..n {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            sum += sign * binomial(n - 1, k) * ln_powers[k];
        }
        let ln2pi = if n == 1 { (2.0 * std::f64::consts::PI).ln() } else { 0.0 };
        let value = (n as f64 * d / 2.0) * LOG2_E.powi(n as i32) / delta.powi(n as i32 - 1) * sum
            + (d / 2.0) * LOG2_E.powi(n as i32) * (factorial(n - 1) + ln2pi);
        kappa.push(value);
    }
    Ok(CumulantSet { kappa, delta, dim: dim as u32, source: CumulantSource::Gldf })
}

/// Entropy-power tower `N_{1+kΔ}`, k = 0..n_max-1, for a density.
pub fn power_tower(density: &SampledDensity, delta: f64, n_max: usize) -> Result<Vec<f64>> {
    check_delta(delta)?;
    let mut tower = Vec::with_capacity(n_max);
    for k in 0..n_max {
        let idx = EntropyIndex::finite(1.0 + k as f64 * delta)?;
        let res = renyi::entropy_power(density, idx);
        if res.diverged || !(res.power > 0.0) || !res.power.is_finite() {
            return Err(Error::NonFinitePower { k, value: res.power });
        }
        tower.push(res.power);
    }
    Ok(tower)
}

/// GLDF cumulants of a density, building the tower internally.
pub fn cumulants_for_density(
    density: &SampledDensity,
    delta: f64,
    n_max: usize,
) -> Result<CumulantSet> {
    let tower = power_tower(density, delta, n_max)?;
    cumulants_gldf(&tower, delta, density.dim, n_max)
}

/// One Richardson step against a tower at Δ/2; removes the first-order
/// finite-difference bias.
pub fn cumulants_for_density_richardson(
    density: &SampledDensity,
    delta: f64,
    n_max: usize,
) -> Result<CumulantSet> {
    let coarse = cumulants_for_density(density, delta, n_max)?;
    let fine = cumulants_for_density(density, delta / 2.0, n_max)?;
    let kappa = fine
        .kappa
        .iter()
        .zip(&coarse.kappa)
        .map(|(f, c)| 2.0 * f - c)
        .collect();
    Ok(CumulantSet { kappa, delta, dim: coarse.dim, source: CumulantSource::Gldf })
}

/// Cumulants from the raw moments of an information scan, via the
/// moment-cumulant recursion.
pub fn cumulants_from_scan(scan: &InformationScan, n_max: usize) -> Result<CumulantSet> {
    let mass = infoscan::scan_mass(scan);
    if mass < 1.0 - 1e-4 {
        return Err(Error::OutOfRange(format!("scan mass {mass} below 1 - 1e-4")));
    }
    let moments: Vec<f64> = (1..=n_max as u32)
        .map(|n| infoscan::scan_moment(scan, n) / mass)
        .collect();
    let mut kappa: Vec<f64> = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let mut k_n = moments[n - 1];
        for j in 1..n {
            k_n -= binomial(n - 1, j - 1) * kappa[j - 1] * moments[n - j - 1];
        }
        kappa.push(k_n);
    }
    Ok(CumulantSet { kappa, delta: 0.0, dim: 1, source: CumulantSource::Scan })
}

/// Varentropy κ₂ through the scan path.
pub fn varentropy(density: &SampledDensity) -> Result<f64> {
    let scan = infoscan::information_scan(density, 32768)?;
    Ok(cumulants_from_scan(&scan, 2)?.kappa(2))
}

/// Cumulants of the information variable of a Gaussian density: the
/// shifted-gamma closed form. Only κ₁ depends on σ.
pub fn gaussian_reference_cumulants(sigma: f64, n: usize) -> f64 {
    if n == 1 {
        0.5 * LOG2_E + 0.5 * (2.0 * std::f64::consts::PI * sigma * sigma).log2()
    } else {
        0.5 * LOG2_E.powi(n as i32) * factorial(n - 1)
    }
}

/// Associated Laguerre polynomial L_k^{(δ)}(x) by the three-term
/// recurrence; k ≤ 12.
pub fn laguerre(k: usize, delta: f64, x: f64) -> Result<f64> {
    if k > 12 {
        return Err(Error::OrderUnsupported(k));
    }
    let mut prev = 1.0;
    if k == 0 {
        return Ok(prev);
    }
    let mut cur = 1.0 + delta - x;
    for j in 1..k {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0 + delta - x) * cur - (jf + delta) * prev) / (jf + 1.0);
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Gram–Charlier model of the information PDF around the shifted-gamma
/// reference G(x | a, 1/2, log₂e) with a = κ₁ - ½log₂e.
///
/// The truncated series is an approximation: a set with κ₂ ≠ γ₂ but
/// vanishing higher corrections does not represent an exactly known PDF,
/// only the Gaussian case (all corrections zero) is exact.
#[derive(Debug, Clone, Serialize)]
pub struct GramCharlierModel {
    pub a: f64,
    pub alpha: f64,
    pub beta: f64,
    /// corrections[j] = κ_{j+2} - γ_{j+2}.
    pub corrections: Vec<f64>,
    pub order: usize,
}

impl GramCharlierModel {
    /// Shifted-gamma reference density at x (per bit).
    pub fn reference(&self, x: f64) -> f64 {
        let u = (x - self.a) / self.beta;
        if u <= 0.0 {
            return 0.0;
        }
        // Γ(1/2) = √π; alpha is fixed at 1/2 in this matching.
        u.powf(self.alpha - 1.0) * (-u).exp() / (std::f64::consts::PI.sqrt() * self.beta)
    }

    /// Reconstructed density at x, before clipping.
    pub fn raw(&self, x: f64) -> f64 {
        let g = self.reference(x);
        if g == 0.0 {
            return 0.0;
        }
        let u = (x - self.a) / self.beta;
        let mut factor = 1.0;
        for (j, &c) in self.corrections.iter().enumerate() {
            let k = j + 2;
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let lag = laguerre(k, -0.5 - k as f64, u).expect("order bounded by 4");
            factor += sign * c * (x - self.a).powi(-(k as i32)) * lag;
        }
        g * factor
    }

    /// Sample the clipped reconstruction on a grid; returns the values and
    /// the clipped (negative-lobe) mass.
    ///
    /// Each bin gets the exact reference mass (erf CDF of the gamma with
    /// shape 1/2) times the correction factor at the bin center. Center
    /// sampling of the reference would misstate the u^{-1/2} singularity
    /// at the onset, and sub-sampling the corrections would hit their
    /// (x-a)^{-k} blow-up arbitrarily close to it.
    pub fn sample(&self, grid: &Grid1D) -> (Vec<f64>, f64) {
        let cdf = |x: f64| {
            let u = (x - self.a) / self.beta;
            if u <= 0.0 {
                0.0
            } else {
                statrs::function::erf::erf(u.sqrt())
            }
        };
        let mut clipped = 0.0;
        let values = grid
            .coords()
            .map(|x| {
                let base = (cdf(x + 0.5 * grid.dx) - cdf(x - 0.5 * grid.dx)) / grid.dx;
                if base == 0.0 {
                    return 0.0;
                }
                let factor = if self.reference(x) > 0.0 { self.raw(x) / self.reference(x) } else { 1.0 };
                let v = base * factor;
                if v < 0.0 {
                    clipped += -v * grid.dx;
                    0.0
                } else {
                    v
                }
            })
            .collect();
        (values, clipped)
    }
}

/// Build a Gram–Charlier model of order 2, 3 or 4 from measured cumulants.
pub fn gram_charlier_reconstruct(kappa: &CumulantSet, order: usize) -> Result<GramCharlierModel> {
    if !(2..=4).contains(&order) {
        return Err(Error::OrderUnsupported(order));
    }
    if kappa.order() < order {
        return Err(Error::InsufficientTower { needed: order, got: kappa.order() });
    }
    let beta = LOG2_E;
    let a = kappa.kappa(1) - 0.5 * LOG2_E;
    let corrections = (2..=order)
        .map(|k| kappa.kappa(k) - gaussian_reference_cumulants(1.0, k))
        .collect();
    Ok(GramCharlierModel { a, alpha: 0.5, beta, corrections, order })
}
