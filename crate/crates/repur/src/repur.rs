//! The one-parameter family of entropy-power uncertainty products
//! `N_{1+t}(|ψ|²) N_{1+r}(|ψ̂|²) >= ħ²/4` with `t = -r/(2r+1)`: conjugate
//! index pairing, single-row evaluation with saturation detection, parallel
//! sweeps over an index grid, and the variance chain it strengthens.

use rayon::prelude::*;
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::grid::{density_from_amplitude, format_sig, quadrature, round_sig, SampledAmplitude, SampledDensity};
use crate::renyi::{evaluate, second_moment_diverges, EntropyIndex, EntropyResult};
use crate::transform::fourier_conjugate;

/// Point of the extended index line `[-1/2, ∞]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal {
    Finite(f64),
    Inf,
}

impl ExtReal {
    pub fn as_f64(&self) -> f64 {
        match self {
            ExtReal::Finite(v) => *v,
            ExtReal::Inf => f64::INFINITY,
        }
    }

    fn fmt_csv(&self) -> String {
        match self {
            ExtReal::Finite(v) => format_sig(*v),
            ExtReal::Inf => "INF".into(),
        }
    }
}

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtReal::Finite(v) => s.serialize_f64(round_sig(*v)),
            ExtReal::Inf => {
                let mut m = s.serialize_map(Some(1))?;
                m.serialize_entry("kind", "inf")?;
                m.end()
            }
        }
    }
}

/// Extended-real value of a REPUR product: a number, +∞, or the
/// regularization-dependent 0·∞ case, which is reported as such and never
/// collapsed to a number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Product {
    Finite(f64),
    Inf,
    Indeterminate,
}

impl Product {
    pub fn fmt_csv(&self) -> String {
        match self {
            Product::Finite(v) => format_sig(*v),
            Product::Inf => "INF".into(),
            Product::Indeterminate => "INDETERMINATE".into(),
        }
    }
}

impl Serialize for Product {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Product::Finite(v) => s.serialize_f64(round_sig(*v)),
            Product::Inf => {
                let mut m = s.serialize_map(Some(1))?;
                m.serialize_entry("kind", "inf")?;
                m.end()
            }
            Product::Indeterminate => {
                let mut m = s.serialize_map(Some(1))?;
                m.serialize_entry("kind", "indeterminate")?;
                m.end()
            }
        }
    }
}

/// Conjugate pair on the index line: `t = -r/(2r+1)`, with the endpoints
/// `r = -1/2 <-> t = ∞` identified. The map is an involution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConjugatePair {
    pub r: ExtReal,
    pub t: ExtReal,
}

pub fn conjugate_index(r: ExtReal) -> Result<ConjugatePair> {
    let t = match r {
        ExtReal::Inf => ExtReal::Finite(-0.5),
        ExtReal::Finite(v) if (v + 0.5).abs() < 1e-14 => ExtReal::Inf,
        ExtReal::Finite(v) if v > -0.5 && v.is_finite() => ExtReal::Finite(-v / (2.0 * v + 1.0)),
        ExtReal::Finite(v) => {
            return Err(Error::OutOfRange(format!("index r must lie in [-1/2, ∞], got {v}")))
        }
    };
    Ok(ConjugatePair { r, t })
}

fn entropy_index(offset: ExtReal) -> EntropyIndex {
    match offset {
        ExtReal::Inf => EntropyIndex::Infinity,
        ExtReal::Finite(v) => EntropyIndex::Finite(1.0 + v),
    }
}

fn serialize_extended<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_infinite() {
        let mut m = s.serialize_map(Some(1))?;
        m.serialize_entry("kind", "inf")?;
        m.end()
    } else {
        s.serialize_f64(round_sig(*v))
    }
}

/// One evaluated member of the family.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RepurRow {
    pub r: ExtReal,
    pub t: ExtReal,
    #[serde(serialize_with = "serialize_extended")]
    pub power_x: f64,
    #[serde(serialize_with = "serialize_extended")]
    pub power_p: f64,
    pub product: Product,
    pub gap: Product,
    pub saturated: bool,
}

/// Relative tolerance against ħ²/4 below which a row counts as saturated.
pub const SATURATION_RTOL: f64 = 1e-3;

fn degenerate_zero(e: &EntropyResult) -> bool {
    e.diverged && e.power == 0.0
}

fn degenerate_inf(e: &EntropyResult) -> bool {
    e.diverged && e.power.is_infinite()
}

fn classify(x: &EntropyResult, p: &EntropyResult) -> Product {
    let any_inf = degenerate_inf(x) || degenerate_inf(p);
    let any_zero = degenerate_zero(x) || degenerate_zero(p);
    match (any_inf, any_zero) {
        (true, true) => Product::Indeterminate,
        (true, false) => Product::Inf,
        (false, true) => Product::Finite(0.0),
        (false, false) => Product::Finite(x.power * p.power),
    }
}

fn row_from_densities(fx: &SampledDensity, fp: &SampledDensity, pair: ConjugatePair, hbar: f64) -> RepurRow {
    let ex = evaluate(fx, entropy_index(pair.t));
    let ep = evaluate(fp, entropy_index(pair.r));
    let product = classify(&ex, &ep);
    let bound = hbar * hbar / 4.0;
    let gap = match product {
        Product::Finite(v) => Product::Finite(v - bound),
        other => other,
    };
    let saturated = matches!(product, Product::Finite(v) if (v - bound).abs() <= SATURATION_RTOL * bound);
    RepurRow {
        r: pair.r,
        t: pair.t,
        power_x: ex.power,
        power_p: ep.power,
        product,
        gap,
        saturated,
    }
}

/// Evaluate one member of the family for a normalized wavefunction.
pub fn repur_product(psi: &SampledAmplitude, r: ExtReal, hbar: f64) -> Result<RepurRow> {
    let pair = conjugate_index(r)?;
    let psi_hat = fourier_conjugate(psi, hbar)?;
    let fx = density_from_amplitude(psi);
    let fp = density_from_amplitude(&psi_hat);
    Ok(row_from_densities(&fx, &fp, pair, hbar))
}

/// Sweep results over an index grid, ordered as given.
#[derive(Debug, Clone, Serialize)]
pub struct RepurTable {
    pub rows: Vec<RepurRow>,
    pub hbar: f64,
    pub state_label: String,
}

/// The default index grid: 41 points log-spaced in `1+r` over [0.5, 100]
/// (the first is the exact `r = -1/2` endpoint) plus the mirrored `r = ∞`
/// row, evaluated as the swapped-side pairing instead of a numerical limit.
pub fn default_r_grid() -> Vec<ExtReal> {
    let mut grid = Vec::with_capacity(42);
    let lo = 0.5f64.ln();
    let hi = 100.0f64.ln();
    for k in 0..41 {
        let one_plus_r = (lo + (hi - lo) * k as f64 / 40.0).exp();
        let r = if k == 0 { -0.5 } else { one_plus_r - 1.0 };
        grid.push(ExtReal::Finite(r));
    }
    grid.push(ExtReal::Inf);
    grid
}

/// Evaluate the family across an index grid. The transform is done once;
/// rows are evaluated in parallel and reported in input order.
pub fn repur_sweep(
    psi: &SampledAmplitude,
    r_grid: &[ExtReal],
    hbar: f64,
    state_label: &str,
) -> Result<RepurTable> {
    let pairs: Vec<ConjugatePair> = r_grid.iter().map(|r| conjugate_index(*r)).collect::<Result<_>>()?;
    let psi_hat = fourier_conjugate(psi, hbar)?;
    let fx = density_from_amplitude(psi);
    let fp = density_from_amplitude(&psi_hat);
    let rows: Vec<RepurRow> = pairs
        .par_iter()
        .map(|pair| row_from_densities(&fx, &fp, *pair, hbar))
        .collect();
    Ok(RepurTable { rows, hbar, state_label: to_owned_label(state_label) })
}

fn to_owned_label(label: &str) -> String {
    label.to_string()
}

/// Write a sweep as CSV with INF / INDETERMINATE markers for extended values.
pub fn write_sweep_csv<W: std::io::Write>(writer: W, table: &RepurTable) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["r", "t", "power_x", "power_p", "product", "gap", "saturated"])?;
    for row in &table.rows {
        w.write_record([
            row.r.fmt_csv(),
            row.t.fmt_csv(),
            format_sig(row.power_x),
            format_sig(row.power_p),
            row.product.fmt_csv(),
            row.gap.fmt_csv(),
            row.saturated.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Variance chain report: `σ_x² σ_p² >= N₁(x) N₁(p) >= ħ²/4`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct VurChain {
    pub sigma2_x: f64,
    pub sigma2_p: f64,
    pub shannon_product: f64,
    pub bound: f64,
    pub chain_ok: bool,
}

fn density_variance(d: &SampledDensity) -> f64 {
    if second_moment_diverges(d) {
        return f64::INFINITY;
    }
    let m1: Vec<f64> = d.grid.coords().zip(&d.values).map(|(x, v)| x * v).collect();
    let mean = quadrature(d.grid.dx, &m1);
    let m2: Vec<f64> = d
        .grid
        .coords()
        .zip(&d.values)
        .map(|(x, v)| (x - mean) * (x - mean) * v)
        .collect();
    quadrature(d.grid.dx, &m2)
}

/// Variances by quadrature (reported +∞ when the second moment fails tail
/// convergence) against the Shannon entropy-power product and the bound.
pub fn vur_chain(psi: &SampledAmplitude, hbar: f64) -> Result<VurChain> {
    let psi_hat = fourier_conjugate(psi, hbar)?;
    let fx = density_from_amplitude(psi);
    let fp = density_from_amplitude(&psi_hat);
    let sigma2_x = density_variance(&fx);
    let sigma2_p = density_variance(&fp);
    let n1x = evaluate(&fx, EntropyIndex::shannon()).power;
    let n1p = evaluate(&fp, EntropyIndex::shannon()).power;
    let shannon_product = n1x * n1p;
    let bound = hbar * hbar / 4.0;
    let slack = 1e-4;
    let var_product = sigma2_x * sigma2_p;
    let upper_ok = var_product.is_infinite() || var_product >= shannon_product * (1.0 - slack);
    let lower_ok = shannon_product >= bound * (1.0 - slack);
    Ok(VurChain {
        sigma2_x,
        sigma2_p,
        shannon_product,
        bound,
        chain_ok: upper_ok && lower_ok,
    })
}
