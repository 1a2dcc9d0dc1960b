//! Uniform 1-D grids carrying sampled probability densities and complex
//! amplitudes, with quadrature, norms and normalization.
//!
//! Everything downstream works on these two containers: `SampledDensity`
//! holds a nonnegative function with unit mass, `SampledAmplitude` a complex
//! wavefunction with unit L2 norm. Values are immutable after construction;
//! all operations are pure functions returning new containers.

use std::io::{Read, Write};

use crate::error::{Error, Result};

/// Relative tolerance for validating uniform spacing of CSV input.
pub const CSV_SPACING_RTOL: f64 = 1e-8;

/// Uniform 1-D grid: coordinates are `x0 + k*dx` for `k` in `[0, n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    pub x0: f64,
    pub dx: f64,
    pub n: usize,
}

impl Grid1D {
    pub fn new(x0: f64, dx: f64, n: usize) -> Result<Self> {
        if !(dx > 0.0) || !dx.is_finite() || !x0.is_finite() {
            return Err(Error::InvalidGrid(format!("need finite x0 and dx > 0, got x0={x0}, dx={dx}")));
        }
        if n < 8 {
            return Err(Error::InvalidGrid(format!("need n >= 8, got n={n}")));
        }
        Ok(Grid1D { x0, dx, n })
    }

    #[inline]
    pub fn coord(&self, k: usize) -> f64 {
        self.x0 + k as f64 * self.dx
    }

    pub fn coords(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |k| self.coord(k))
    }

    /// Rightmost sample coordinate.
    pub fn x_last(&self) -> f64 {
        self.coord(self.n - 1)
    }

    pub fn approx_eq(&self, other: &Grid1D, rtol: f64) -> bool {
        let scale = self.dx.abs().max(other.dx.abs());
        self.n == other.n
            && (self.dx - other.dx).abs() <= rtol * scale
            && (self.x0 - other.x0).abs() <= rtol * scale * self.n as f64
    }
}

/// Composite quadrature of sampled values over a uniform grid.
///
/// Simpson's rule when the sample count is odd (even interval count);
/// trapezoid otherwise. The convergence-order test in this module documents
/// the achieved accuracy in place of a formal error bound.
pub fn quadrature(dx: f64, values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    if n % 2 == 1 {
        // Simpson: weights 1,4,2,4,...,2,4,1 times dx/3.
        let mut sum = values[0] + values[n - 1];
        let mut four = 0.0;
        let mut two = 0.0;
        for (k, &v) in values.iter().enumerate().take(n - 1).skip(1) {
            if k % 2 == 1 {
                four += v;
            } else {
                two += v;
            }
        }
        sum += 4.0 * four + 2.0 * two;
        sum * dx / 3.0
    } else {
        let inner: f64 = values[1..n - 1].iter().sum();
        (0.5 * (values[0] + values[n - 1]) + inner) * dx
    }
}

/// Nonnegative sampled function intended to be a PDF on its grid.
///
/// `dim` is the analytic dimension parameter D carried through entropy-power
/// formulas; all sampled numerics in this crate are one-dimensional.
#[derive(Debug, Clone)]
pub struct SampledDensity {
    pub grid: Grid1D,
    pub values: Vec<f64>,
    pub dim: u32,
}

impl SampledDensity {
    pub fn new(grid: Grid1D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n {
            return Err(Error::InvalidGrid(format!(
                "value count {} does not match grid n {}",
                values.len(),
                grid.n
            )));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidGrid("density values must be finite and >= 0".into()));
        }
        Ok(SampledDensity { grid, values, dim: 1 })
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().cloned().fold(0.0, f64::max)
    }

    /// Coordinate of the (first) largest sample.
    pub fn mode(&self) -> f64 {
        let mut best = 0;
        for (k, &v) in self.values.iter().enumerate() {
            if v > self.values[best] {
                best = k;
            }
        }
        self.grid.coord(best)
    }
}

/// Complex wavefunction sampled on a uniform grid.
#[derive(Debug, Clone)]
pub struct SampledAmplitude {
    pub grid: Grid1D,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
    pub dim: u32,
}

impl SampledAmplitude {
    pub fn new(grid: Grid1D, re: Vec<f64>, im: Vec<f64>) -> Result<Self> {
        if re.len() != grid.n || im.len() != grid.n {
            return Err(Error::InvalidGrid("amplitude arrays must match grid n".into()));
        }
        if re.iter().chain(im.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidGrid("amplitude values must be finite".into()));
        }
        Ok(SampledAmplitude { grid, re, im, dim: 1 })
    }

    pub fn from_real(grid: Grid1D, re: Vec<f64>) -> Result<Self> {
        let im = vec![0.0; re.len()];
        Self::new(grid, re, im)
    }

    /// |a_k|^2 without any normalization.
    pub fn abs2(&self) -> Vec<f64> {
        self.re
            .iter()
            .zip(&self.im)
            .map(|(r, i)| r * r + i * i)
            .collect()
    }

    /// Rescale so the L2 norm is exactly 1 on the grid.
    pub fn normalize(&self) -> Result<SampledAmplitude> {
        let norm2 = quadrature(self.grid.dx, &self.abs2());
        if norm2 <= 1e-300 {
            return Err(Error::ZeroMass);
        }
        let s = norm2.sqrt().recip();
        let mut out = self.clone();
        for v in out.re.iter_mut().chain(out.im.iter_mut()) {
            *v *= s;
        }
        Ok(out)
    }
}

/// Total mass of a sampled density by composite quadrature.
pub fn integrate(d: &SampledDensity) -> f64 {
    quadrature(d.grid.dx, &d.values)
}

/// Rescale a density so it integrates to 1 on its grid.
pub fn normalize(d: &SampledDensity) -> Result<SampledDensity> {
    let mass = integrate(d);
    if mass <= 1e-300 {
        return Err(Error::ZeroMass);
    }
    let mut out = d.clone();
    let s = mass.recip();
    for v in out.values.iter_mut() {
        *v *= s;
    }
    Ok(out)
}

/// L^p norm of an amplitude: `(∫ |a|^p dx)^(1/p)`.
pub fn lp_norm(a: &SampledAmplitude, p: f64) -> Result<f64> {
    if !(p > 0.0) {
        return Err(Error::NonPositiveOrder(p));
    }
    let pow: Vec<f64> = a
        .re
        .iter()
        .zip(&a.im)
        .map(|(r, i)| (r * r + i * i).sqrt().powf(p))
        .collect();
    Ok(quadrature(a.grid.dx, &pow).powf(1.0 / p))
}

/// |ψ|^2 as a density on the same grid. No renormalization is applied, so
/// the mass equals the squared L2 norm of the amplitude.
pub fn density_from_amplitude(a: &SampledAmplitude) -> SampledDensity {
    SampledDensity {
        grid: a.grid,
        values: a.abs2(),
        dim: a.dim,
    }
}

fn parse_grid<I: Iterator<Item = f64>>(xs: I) -> Result<Grid1D> {
    let xs: Vec<f64> = xs.collect();
    if xs.len() < 8 {
        return Err(Error::CsvFormat(format!("need at least 8 rows, got {}", xs.len())));
    }
    let dx = xs[1] - xs[0];
    if !(dx > 0.0) {
        return Err(Error::CsvFormat("x column must be strictly increasing".into()));
    }
    for w in xs.windows(2) {
        let step = w[1] - w[0];
        if (step - dx).abs() > CSV_SPACING_RTOL * dx.abs() {
            return Err(Error::CsvFormat(format!(
                "non-uniform spacing: step {} vs {} exceeds relative tolerance {CSV_SPACING_RTOL}",
                step, dx
            )));
        }
    }
    Grid1D::new(xs[0], dx, xs.len())
}

fn read_columns<R: Read>(reader: R, cols: usize) -> Result<Vec<Vec<f64>>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let mut out: Vec<Vec<f64>> = vec![Vec::new(); cols];
    for record in rdr.records() {
        let record = record?;
        if record.len() != cols {
            return Err(Error::CsvFormat(format!(
                "expected {cols} columns, got {}",
                record.len()
            )));
        }
        for (c, field) in record.iter().enumerate() {
            let v: f64 = field
                .trim()
                .parse()
                .map_err(|_| Error::CsvFormat(format!("not a number: {field:?}")))?;
            out[c].push(v);
        }
    }
    Ok(out)
}

/// Read a two-column `(x, value)` density CSV with a header row.
pub fn read_density_csv<R: Read>(reader: R) -> Result<SampledDensity> {
    let cols = read_columns(reader, 2)?;
    let grid = parse_grid(cols[0].iter().cloned())?;
    SampledDensity::new(grid, cols[1].clone())
}

/// Read a three-column `(x, re, im)` amplitude CSV with a header row.
pub fn read_amplitude_csv<R: Read>(reader: R) -> Result<SampledAmplitude> {
    let cols = read_columns(reader, 3)?;
    let grid = parse_grid(cols[0].iter().cloned())?;
    SampledAmplitude::new(grid, cols[1].clone(), cols[2].clone())
}

pub fn write_density_csv<W: Write>(writer: W, d: &SampledDensity) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["x", "value"])?;
    for (k, v) in d.values.iter().enumerate() {
        w.write_record([format_sig(d.grid.coord(k)), format_sig(*v)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_amplitude_csv<W: Write>(writer: W, a: &SampledAmplitude) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["x", "re", "im"])?;
    for k in 0..a.grid.n {
        w.write_record([
            format_sig(a.grid.coord(k)),
            format_sig(a.re[k]),
            format_sig(a.im[k]),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Serialize a float with 12 significant digits; used by every CSV/JSON
/// surface so repeated runs are byte-identical.
pub fn format_sig(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if v.is_infinite() {
        return if v > 0.0 { "INF".into() } else { "-INF".into() };
    }
    if v.is_nan() {
        return "NAN".into();
    }
    let formatted = format!("{:.*e}", 11, v);
    // Trim trailing zeros in the mantissa for compactness.
    if let Some((mant, exp)) = formatted.split_once('e') {
        let mant = mant.trim_end_matches('0').trim_end_matches('.');
        format!("{mant}e{exp}")
    } else {
        formatted
    }
}

/// Round to 12 significant digits; the JSON mirror of [`format_sig`].
pub fn round_sig(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    format!("{:.*e}", 11, v).parse().unwrap_or(v)
}
