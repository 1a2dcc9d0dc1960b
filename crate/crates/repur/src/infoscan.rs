//! Information scan of a density: the distribution of the information
//! random variable `i = -log2 F(y)` under the probability measure F, as a
//! cumulative distribution f(x) and a PDF g(x), plus its onset point,
//! Laplace-transform consistency diagnostics and equimeasurability tests.

use crate::error::{Error, Result};
use crate::grid::{format_sig, integrate, quadrature, Grid1D, SampledDensity};

/// Default number of information bins.
pub const DEFAULT_SCAN_BINS: usize = 1024;
/// Width of the scanned information window above the onset, in bits.
pub const SCAN_WINDOW_BITS: f64 = 40.0;

/// Distribution of the information value of a density.
///
/// `x_grid` holds the bin centers in bits; `g` is a probability-weighted
/// histogram normalized per bin width (not a numerical derivative of `f`,
/// which would be noisy at the integrable singularities g develops at
/// stationary points of F). Mass deeper than the window is folded into the
/// last bin and reported as `overflow_mass`; zero-density samples carry no
/// mass and contribute `dropped_mass` (identically zero for exact zeros).
#[derive(Debug, Clone)]
pub struct InformationScan {
    pub x_grid: Grid1D,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
    pub onset: f64,
    pub overflow_mass: f64,
    pub dropped_mass: f64,
}

/// Onset point a⁺ of the information PDF: `2^{-a⁺} = max F`.
pub fn onset_point(f: &SampledDensity) -> f64 {
    -f.max_value().log2()
}

/// Scan a normalized density into an information histogram over
/// `[onset, onset + 40]` bits.
pub fn information_scan(density: &SampledDensity, bins: usize) -> Result<InformationScan> {
    if bins < 64 {
        return Err(Error::OutOfRange(format!("need at least 64 scan bins, got {bins}")));
    }
    let peak = density.max_value();
    if peak <= 0.0 {
        return Err(Error::ZeroMass);
    }
    let onset = -peak.log2();
    let db = SCAN_WINDOW_BITS / bins as f64;
    let x_grid = Grid1D::new(onset + 0.5 * db, db, bins)?;

    let mut g = vec![0.0; bins];
    let mut overflow_mass = 0.0;
    let dropped_mass = 0.0;
    let dy = density.grid.dx;
    for &v in &density.values {
        if v <= 0.0 {
            continue;
        }
        let i = -v.log2();
        let mass = v * dy;
        let idx = ((i - onset) / db).floor();
        let k = if idx < 0.0 {
            0
        } else if idx >= bins as f64 {
            overflow_mass += mass;
            bins - 1
        } else {
            idx as usize
        };
        g[k] += mass;
    }
    let mut f = Vec::with_capacity(bins);
    let mut cum = 0.0;
    for gk in g.iter_mut() {
        cum += *gk;
        f.push(cum);
        *gk /= db;
    }
    Ok(InformationScan { x_grid, f, g, onset, overflow_mass, dropped_mass })
}

/// Total mass of the scan, `Σ g·db`.
pub fn scan_mass(scan: &InformationScan) -> f64 {
    scan.g.iter().sum::<f64>() * scan.x_grid.dx
}

/// Raw moment `∫ xⁿ g(x) dx` of the scan.
pub fn scan_moment(scan: &InformationScan, n: u32) -> f64 {
    scan.x_grid
        .coords()
        .zip(&scan.g)
        .map(|(x, g)| x.powi(n as i32) * g)
        .sum::<f64>()
        * scan.x_grid.dx
}

/// Both sides of `∫ g(x) 2^{(1-p)x} dx = ∫ F^p dy`.
#[derive(Debug, Clone, Copy)]
pub struct LaplacePair {
    pub lhs: f64,
    pub rhs: f64,
}

/// Number of bins used by the internal consistency scan; fine enough that
/// the histogram discretization stays below the 1e-3 agreement target.
const CONSISTENCY_BINS: usize = 32768;

/// Check the moment-generating identity of the information variable
/// against the direct Rényi integral, for p in (0, 2].
pub fn laplace_consistency(density: &SampledDensity, p: f64) -> Result<LaplacePair> {
    if !(p > 0.0 && p <= 2.0) {
        return Err(Error::OutOfRange(format!("p must lie in (0, 2], got {p}")));
    }
    let scan = information_scan(density, CONSISTENCY_BINS)?;
    let db = scan.x_grid.dx;
    let lhs = scan
        .x_grid
        .coords()
        .zip(&scan.g)
        .map(|(x, g)| g * ((1.0 - p) * x).exp2())
        .sum::<f64>()
        * db;
    let powered: Vec<f64> = density.values.iter().map(|v| v.powf(p)).collect();
    let rhs = quadrature(density.grid.dx, &powered);
    Ok(LaplacePair { lhs, rhs })
}

/// Whether two densities are equimeasurable: their decreasing
/// rearrangements, read as level functions of cumulative mass, agree in
/// sup norm within `tol` at sampled mass quantiles.
pub fn equimeasurable(f1: &SampledDensity, f2: &SampledDensity, tol: f64) -> bool {
    let level1 = level_function(f1);
    let level2 = level_function(f2);
    let samples = 1024;
    for k in 1..samples {
        let q = k as f64 / samples as f64;
        let v1 = level_at(&level1, q);
        let v2 = level_at(&level2, q);
        if (v1 - v2).abs() > tol {
            return false;
        }
    }
    true
}

/// Sorted-descending (value, cumulative mass) pairs.
fn level_function(f: &SampledDensity) -> Vec<(f64, f64)> {
    let mut vals: Vec<f64> = f.values.clone();
    vals.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let total: f64 = vals.iter().sum::<f64>() * f.grid.dx;
    let mut out = Vec::with_capacity(vals.len());
    let mut cum = 0.0;
    for v in vals {
        cum += v * f.grid.dx / total;
        out.push((v, cum));
    }
    out
}

fn level_at(level: &[(f64, f64)], q: f64) -> f64 {
    let idx = level.partition_point(|&(_, c)| c < q);
    level.get(idx).map_or(0.0, |&(v, _)| v)
}

/// Positions (bits) of local maxima of g after a width-3 moving average.
/// Diagnostic only; bin-width accuracy.
pub fn detect_peaks(scan: &InformationScan) -> Vec<f64> {
    let n = scan.g.len();
    if n < 3 {
        return Vec::new();
    }
    let mut smooth = vec![0.0; n];
    for k in 0..n {
        let lo = k.saturating_sub(1);
        let hi = (k + 1).min(n - 1);
        smooth[k] = (scan.g[lo] + scan.g[k] + scan.g[hi]) / (hi - lo + 1) as f64;
    }
    let mut peaks = Vec::new();
    let floor = 1e-12 * smooth.iter().cloned().fold(0.0, f64::max);
    for k in 1..n - 1 {
        if smooth[k] > floor && smooth[k] > smooth[k - 1] && smooth[k] >= smooth[k + 1] {
            peaks.push(scan.x_grid.coord(k));
        }
    }
    // The onset bin can be a one-sided maximum.
    if smooth[0] > floor && smooth[0] > smooth[1] {
        peaks.insert(0, scan.x_grid.coord(0));
    }
    peaks
}

/// Write a scan as CSV with columns `x_bits, f, g`.
pub fn write_scan_csv<W: std::io::Write>(writer: W, scan: &InformationScan) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["x_bits", "f", "g"])?;
    for (k, (f, g)) in scan.f.iter().zip(&scan.g).enumerate() {
        w.write_record([format_sig(scan.x_grid.coord(k)), format_sig(*f), format_sig(*g)])?;
    }
    w.flush()?;
    Ok(())
}

/// Shannon entropy of the density via the scan's first moment; used by
/// consistency tests against the direct integral.
pub fn scan_entropy_bits(density: &SampledDensity) -> Result<f64> {
    let scan = information_scan(density, CONSISTENCY_BINS)?;
    Ok(scan_moment(&scan, 1))
}

/// Closed-form information PDF of a Gaussian density: a shifted gamma in
/// `z = 2 ln2 · x - ln(2πσ²)`, with CDF `erf(sqrt(z/2))`.
pub fn gaussian_scan_reference(sigma: f64, x: f64) -> f64 {
    let z = 2.0 * std::f64::consts::LN_2 * x - (2.0 * std::f64::consts::PI * sigma * sigma).ln();
    if z <= 0.0 {
        return 0.0;
    }
    2.0 * std::f64::consts::LN_2 * (-z / 2.0).exp() / (2.0 * std::f64::consts::PI * z).sqrt()
}

/// Verify the scan stays close to `integrate(density)` in mass.
pub fn scan_is_complete(scan: &InformationScan, density: &SampledDensity) -> bool {
    (scan_mass(scan) - integrate(density)).abs() < 1e-6
}
