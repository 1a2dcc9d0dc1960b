//! Unitary continuous Fourier transform between conjugate wavefunctions,
//! in the hbar-scaled quantum convention, plus the norm-preserving rescale
//! that maps the quantum pair onto the unit-frequency transform pair.
//!
//! The conjugate grid is `p_j = (j - n/2) * dp` with `dp = 2π ħ / (n dx)`,
//! so a forward transform followed by [`fourier_inverse`] targeting the
//! original left edge reproduces the input. Grids need not be symmetric
//! about zero: a phase factor corrects for the actual `x0`.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::grid::{density_from_amplitude, quadrature, Grid1D, SampledAmplitude};

/// Fraction of bins at each grid edge inspected by the coarseness check.
const EDGE_FRACTION: f64 = 0.01;
/// Mass allowed in the edge bins of the conjugate density.
const EDGE_MASS_LIMIT: f64 = 1e-8;

fn require_pow2(n: usize) -> Result<()> {
    if !n.is_power_of_two() {
        return Err(Error::PowerOfTwoRequired(n));
    }
    Ok(())
}

fn edge_mass_check(psi_hat: &SampledAmplitude) -> Result<()> {
    let d = density_from_amplitude(psi_hat);
    let total = quadrature(d.grid.dx, &d.values);
    if total <= 0.0 {
        return Ok(());
    }
    let edge = ((d.grid.n as f64 * EDGE_FRACTION).ceil() as usize).max(1);
    let mut mass = 0.0;
    for k in 0..edge {
        mass += d.values[k] + d.values[d.grid.n - 1 - k];
    }
    mass *= d.grid.dx;
    if mass / total > EDGE_MASS_LIMIT {
        return Err(Error::GridTooCoarse { edge_mass: mass / total });
    }
    Ok(())
}

/// Forward transform `ψ(x) -> ψ̂(p)` with kernel `e^{-i p x / ħ} / √(2πħ)`.
pub fn fourier_conjugate(psi: &SampledAmplitude, hbar: f64) -> Result<SampledAmplitude> {
    let n = psi.grid.n;
    require_pow2(n)?;
    if !(hbar > 0.0) {
        return Err(Error::OutOfRange(format!("hbar must be > 0, got {hbar}")));
    }
    let dx = psi.grid.dx;
    let dp = 2.0 * std::f64::consts::PI * hbar / (n as f64 * dx);
    let p0 = -(n as f64 / 2.0) * dp;

    // Alternating signs shift the frequency origin to the array center.
    let mut buf: Vec<Complex64> = (0..n)
        .map(|k| {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            Complex64::new(psi.re[k] * sign, psi.im[k] * sign)
        })
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);

    let scale = dx / (2.0 * std::f64::consts::PI * hbar).sqrt();
    let mut re = Vec::with_capacity(n);
    let mut im = Vec::with_capacity(n);
    for (j, v) in buf.iter().enumerate() {
        let p = p0 + j as f64 * dp;
        // Phase correction for the physical left edge of the input grid.
        let phase = Complex64::from_polar(scale, -p * psi.grid.x0 / hbar);
        let out = phase * v;
        re.push(out.re);
        im.push(out.im);
    }
    let grid = Grid1D::new(p0, dp, n)?;
    let mut out = SampledAmplitude::new(grid, re, im)?;
    out.dim = psi.dim;
    edge_mass_check(&out)?;
    Ok(out)
}

/// Inverse transform `ψ̂(p) -> ψ(x)` with kernel `e^{+i p x / ħ} / √(2πħ)`,
/// reconstructing onto a grid whose left edge is `x0`.
pub fn fourier_inverse(psi_hat: &SampledAmplitude, hbar: f64, x0: f64) -> Result<SampledAmplitude> {
    let n = psi_hat.grid.n;
    require_pow2(n)?;
    if !(hbar > 0.0) {
        return Err(Error::OutOfRange(format!("hbar must be > 0, got {hbar}")));
    }
    let dp = psi_hat.grid.dx;
    let dx = 2.0 * std::f64::consts::PI * hbar / (n as f64 * dp);

    let mut buf: Vec<Complex64> = (0..n)
        .map(|j| {
            let p = psi_hat.grid.coord(j);
            Complex64::from_polar(1.0, p * x0 / hbar) * Complex64::new(psi_hat.re[j], psi_hat.im[j])
        })
        .collect();
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);

    let scale = dp / (2.0 * std::f64::consts::PI * hbar).sqrt();
    let mut re = Vec::with_capacity(n);
    let mut im = Vec::with_capacity(n);
    for (k, v) in buf.iter().enumerate() {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        re.push(scale * sign * v.re);
        im.push(scale * sign * v.im);
    }
    let grid = Grid1D::new(x0, dx, n)?;
    let mut out = SampledAmplitude::new(grid, re, im)?;
    out.dim = psi_hat.dim;
    Ok(out)
}

/// Map ψ onto the unit-frequency transform pair:
/// `f(x) = (2πħ)^{D/4} ψ(√(2πħ) x)`. The grid contracts by `√(2πħ)` and the
/// values scale so the L2 norm is preserved exactly.
pub fn beckner_rescale(psi: &SampledAmplitude, hbar: f64) -> Result<SampledAmplitude> {
    if !(hbar > 0.0) {
        return Err(Error::OutOfRange(format!("hbar must be > 0, got {hbar}")));
    }
    let s = (2.0 * std::f64::consts::PI * hbar).sqrt();
    let amp = s.sqrt();
    let grid = Grid1D::new(psi.grid.x0 / s, psi.grid.dx / s, psi.grid.n)?;
    let re = psi.re.iter().map(|v| v * amp).collect();
    let im = psi.im.iter().map(|v| v * amp).collect();
    let mut out = SampledAmplitude::new(grid, re, im)?;
    out.dim = psi.dim;
    Ok(out)
}

/// Undo [`beckner_rescale`].
pub fn beckner_unrescale(f: &SampledAmplitude, hbar: f64) -> Result<SampledAmplitude> {
    if !(hbar > 0.0) {
        return Err(Error::OutOfRange(format!("hbar must be > 0, got {hbar}")));
    }
    let s = (2.0 * std::f64::consts::PI * hbar).sqrt();
    let amp = s.sqrt().recip();
    let grid = Grid1D::new(f.grid.x0 * s, f.grid.dx * s, f.grid.n)?;
    let re = f.re.iter().map(|v| v * amp).collect();
    let im = f.im.iter().map(|v| v * amp).collect();
    let mut out = SampledAmplitude::new(grid, re, im)?;
    out.dim = f.dim;
    Ok(out)
}
