//! Built-in analytic states with closed-form oracles: Gaussian packets,
//! vacuum + squeezed-vacuum superpositions, the Cauchy power-law-tail wave
//! packet, and synthetic core-plus-tail test densities. Includes the
//! modified Bessel function K0 the Cauchy momentum amplitude needs.

use crate::error::{Error, Result};
use crate::grid::{normalize, Grid1D, SampledAmplitude, SampledDensity};

/// K0 power series paired with I0, valid and accurate for small arguments:
/// `K0(u) = -(ln(u/2)+γ) I0(u) + Σ_{k>=1} (u²/4)^k / (k!)² H_k`.
fn k0_series(u: f64) -> f64 {
    const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
    let q = u * u / 4.0;
    let mut term = 1.0; // q^k / (k!)^2
    let mut i0 = 1.0;
    let mut h = 0.0; // harmonic number H_k
    let mut sum = 0.0;
    for k in 1..200 {
        term *= q / ((k * k) as f64);
        h += 1.0 / k as f64;
        i0 += term;
        sum += term * h;
        if term * (h + 1.0) < 1e-18 * (sum.abs() + 1.0) {
            break;
        }
    }
    -(0.5 * u).ln().mul_add(i0, EULER_GAMMA * i0) + sum
}

/// Truncated asymptotic series `K0(u) ~ e^-u sqrt(π/2u) Σ (-1)^k μ_k/(8u)^k k!`
/// summed to its smallest term; good to 1e-10 for u >= 12.
fn k0_asymptotic(u: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut prev = f64::INFINITY;
    for k in 0..40u32 {
        let odd = (2 * k + 1) as f64;
        let next = term * -(odd * odd) / (8.0 * u * (k + 1) as f64);
        if next.abs() >= prev {
            break;
        }
        sum += next;
        prev = next.abs();
        term = next;
        if next.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    (std::f64::consts::PI / (2.0 * u)).sqrt() * (-u).exp() * sum
}

/// Trapezoidal quadrature of `∫0^∞ e^{-u cosh t} dt`. The integrand's even,
/// doubly-exponentially decaying extension makes the trapezoid rule converge
/// spectrally, so this doubles as the reference oracle in tests.
fn k0_integral(u: f64, h: f64) -> f64 {
    // e^{-u cosh t} underflows past u cosh t ~ 745.
    let t_max = (745.0 / u).acosh() + h;
    let mut sum = 0.5 * (-u).exp();
    let mut t = h;
    while t <= t_max {
        sum += (-u * t.cosh()).exp();
        t += h;
    }
    sum * h
}

/// Modified Bessel function of the second kind, order zero.
///
/// Piecewise evaluation: power series for u <= 7, the integral
/// representation for 7 < u < 12, asymptotic series beyond. The seams sit
/// where both neighbors agree to better than 1e-10, keeping the relative
/// error under 1e-9 everywhere.
pub fn bessel_k0(u: f64) -> Result<f64> {
    if !(u > 0.0) {
        return Err(Error::OutOfRange(format!("bessel_k0 requires u > 0, got {u}")));
    }
    Ok(if u <= 7.0 {
        k0_series(u)
    } else if u < 12.0 {
        k0_integral(u, 0.1)
    } else {
        k0_asymptotic(u)
    })
}

fn next_pow2(n: usize) -> usize {
    n.next_power_of_two()
}

/// Real Gaussian wave packet whose position density has variance sigma².
///
/// The grid spans ±48σ around the center with n = 2048. The generous
/// half-width buys momentum resolution (dp scales as 1/L): entropy powers
/// at indices up to ~100 on the conjugate side stay accurate to well below
/// the 1e-3 saturation tolerance.
pub fn gaussian_state(sigma: f64, center: f64, hbar: f64) -> Result<SampledAmplitude> {
    if !(sigma > 0.0) {
        return Err(Error::OutOfRange(format!("sigma must be > 0, got {sigma}")));
    }
    if !(hbar > 0.0) {
        return Err(Error::OutOfRange(format!("hbar must be > 0, got {hbar}")));
    }
    let n = 2048usize;
    let half = 48.0 * sigma;
    let grid = Grid1D::new(center - half, 2.0 * half / n as f64, n)?;
    let re: Vec<f64> = grid
        .coords()
        .map(|x| (-(x - center) * (x - center) / (4.0 * sigma * sigma)).exp())
        .collect();
    SampledAmplitude::from_real(grid, re)?.normalize()
}

/// Vacuum + squeezed-vacuum superposition in the position and momentum
/// quadrature representations, with its closed-form quadrature variances.
#[derive(Debug, Clone)]
pub struct SqueezedState {
    pub psi: SampledAmplitude,
    pub psihat: SampledAmplitude,
    pub var_x: f64,
    pub var_p: f64,
}

/// Build the superposition of the vacuum and a squeezed vacuum with
/// squeezing parameter zeta, directly from the closed-form quadrature PDFs
/// (two Gaussian components with width ratio e^{2ζ}; real amplitudes).
pub fn squeezed_superposition(zeta: f64, omega: f64, hbar: f64) -> Result<SqueezedState> {
    if !zeta.is_finite() || zeta.abs() > 4.0 {
        return Err(Error::OutOfRange(format!("|zeta| must be <= 4, got {zeta}")));
    }
    if !(omega > 0.0) || !(hbar > 0.0) {
        return Err(Error::OutOfRange(format!(
            "omega and hbar must be > 0, got omega={omega}, hbar={hbar}"
        )));
    }
    // Half-widths of ~50 component sigmas on both sides: tail coverage
    // plus the fine conjugate spacing that high-index entropy powers need.
    let sx = (hbar / (2.0 * omega)).sqrt();
    let sp = (hbar * omega / 2.0).sqrt();
    let half = 50.0 * sx * (-zeta).exp().max(1.0);
    let p_needed = 50.0 * sp * zeta.exp().max(1.0);
    let dx_max = std::f64::consts::PI * hbar / p_needed;
    let n = next_pow2(((2.0 * half / dx_max).ceil() as usize).max(2048));
    let grid = Grid1D::new(-half, 2.0 * half / n as f64, n)?;

    let psi = {
        let re: Vec<f64> = grid
            .coords()
            .map(|x| {
                let q = omega * x * x / (2.0 * hbar);
                (-q).exp() + (0.5 * zeta).exp() * (-q * (2.0 * zeta).exp()).exp()
            })
            .collect();
        SampledAmplitude::from_real(grid, re)?.normalize()?
    };

    let dp = 2.0 * std::f64::consts::PI * hbar / (n as f64 * grid.dx);
    let pgrid = Grid1D::new(-(n as f64 / 2.0) * dp, dp, n)?;
    let psihat = {
        let re: Vec<f64> = pgrid
            .coords()
            .map(|p| {
                let q = p * p / (2.0 * hbar * omega);
                (-q).exp() + (-0.5 * zeta).exp() * (-q * (-2.0 * zeta).exp()).exp()
            })
            .collect();
        SampledAmplitude::from_real(pgrid, re)?.normalize()?
    };

    let n2 = 1.0 / (2.0 + 2.0 / zeta.cosh().sqrt());
    let sech_root = zeta.cosh().recip().sqrt();
    let var_x = n2 * (hbar / omega)
        * (0.5 * (1.0 + (-2.0 * zeta).exp()) + sech_root * (1.0 - zeta.tanh()));
    let var_p = n2 * hbar * omega
        * (0.5 * (1.0 + (2.0 * zeta).exp()) + sech_root * (1.0 + zeta.tanh()));

    Ok(SqueezedState { psi, psihat, var_x, var_p })
}

/// Cauchy power-law-tail wave packet and its closed-form momentum amplitude.
#[derive(Debug, Clone)]
pub struct CauchyState {
    pub psi: SampledAmplitude,
    pub psihat_analytic: SampledAmplitude,
}

pub const CAUCHY_DEFAULT_HALF_WIDTH_FACTOR: f64 = 1e4;
pub const CAUCHY_DEFAULT_N: usize = 1 << 21;

/// `ψ(x) = sqrt(γ/π) / sqrt(γ² + (x-m)²)` on a wide grid centered at the
/// median, with the analytic momentum amplitude
/// `ψ̂(p) = e^{-imp/ħ} sqrt(2γ/π²ħ) K0(γ|p|/ħ)` on the conjugate grid.
/// The very wide, dense default grid keeps the heavy-tail truncation error
/// below the entropy tolerances used downstream.
pub fn cauchy_pltwp(gamma: f64, m: f64, hbar: f64) -> Result<CauchyState> {
    cauchy_pltwp_sized(gamma, m, hbar, CAUCHY_DEFAULT_HALF_WIDTH_FACTOR, CAUCHY_DEFAULT_N)
}

/// [`cauchy_pltwp`] with explicit half-width (in units of γ) and sample
/// count; used by the convergence study.
pub fn cauchy_pltwp_sized(
    gamma: f64,
    m: f64,
    hbar: f64,
    half_width_factor: f64,
    n: usize,
) -> Result<CauchyState> {
    if !(gamma > 0.0) || !(hbar > 0.0) {
        return Err(Error::OutOfRange(format!(
            "gamma and hbar must be > 0, got gamma={gamma}, hbar={hbar}"
        )));
    }
    if !m.is_finite() {
        return Err(Error::OutOfRange(format!("median must be finite, got {m}")));
    }
    let half = half_width_factor * gamma;
    let grid = Grid1D::new(m - half, 2.0 * half / n as f64, n)?;
    let amp = (gamma / std::f64::consts::PI).sqrt();
    let re: Vec<f64> = grid
        .coords()
        .map(|x| amp / (gamma * gamma + (x - m) * (x - m)).sqrt())
        .collect();
    let psi = SampledAmplitude::from_real(grid, re)?;

    let dp = 2.0 * std::f64::consts::PI * hbar / (n as f64 * grid.dx);
    let pgrid = Grid1D::new(-(n as f64 / 2.0) * dp, dp, n)?;
    let scale = (2.0 * gamma / (std::f64::consts::PI * std::f64::consts::PI * hbar)).sqrt();
    // The p = 0 sample of the log-singular K0 is evaluated at half a bin.
    let u_floor = gamma * dp / (2.0 * hbar);
    let mut re = Vec::with_capacity(n);
    let mut im = Vec::with_capacity(n);
    for p in pgrid.coords() {
        let u = (gamma * p.abs() / hbar).max(u_floor);
        let mag = scale * bessel_k0(u)?;
        let phase = -m * p / hbar;
        re.push(mag * phase.cos());
        im.push(mag * phase.sin());
    }
    let psihat_analytic = SampledAmplitude::new(pgrid, re, im)?;
    Ok(CauchyState { psi, psihat_analytic })
}

/// Prescribed asymptotic tail law for [`synthetic_tail_density`].
#[derive(Debug, Clone, Copy)]
pub enum TailModel {
    /// `F(y) -> c |y|^-(1+alpha)` with alpha in (0, 2).
    PowerLaw { alpha: f64, c: f64 },
    /// `F(y) -> d 2^(-beta |y|^a)`.
    Stretched { a: f64, beta: f64, d: f64 },
}

/// Gaussian core of width core_sigma spliced C¹ (in log space, cubic
/// Hermite over [1.5σ, 3σ]) onto the exact prescribed tail beyond 3σ, then
/// renormalized. When the requested tail is itself the matching Gaussian
/// the log density is quadratic, the Hermite segment reproduces it exactly,
/// and the output is exactly Gaussian.
pub fn synthetic_tail_density(model: TailModel, core_sigma: f64) -> Result<SampledDensity> {
    if !(core_sigma > 0.0) {
        return Err(Error::OutOfRange(format!("core_sigma must be > 0, got {core_sigma}")));
    }
    match model {
        TailModel::PowerLaw { alpha, c } => {
            if !(alpha > 0.0 && alpha < 2.0) {
                return Err(Error::OutOfRange(format!("power-law alpha must be in (0,2), got {alpha}")));
            }
            if !(c > 0.0) {
                return Err(Error::OutOfRange(format!("power-law c must be > 0, got {c}")));
            }
        }
        TailModel::Stretched { a, beta, d } => {
            if !(a > 0.0 && beta > 0.0 && d > 0.0) {
                return Err(Error::OutOfRange(format!(
                    "stretched parameters must be > 0, got a={a}, beta={beta}, d={d}"
                )));
            }
        }
    }
    let s = core_sigma;
    let ln2 = std::f64::consts::LN_2;
    let ln_core = |y: f64| -> f64 {
        -(s * (2.0 * std::f64::consts::PI).sqrt()).ln() - y * y / (2.0 * s * s)
    };
    let dln_core = |y: f64| -> f64 { -y / (s * s) };
    let (ln_tail, dln_tail): (Box<dyn Fn(f64) -> f64>, Box<dyn Fn(f64) -> f64>) = match model {
        TailModel::PowerLaw { alpha, c } => (
            Box::new(move |y: f64| c.ln() - (1.0 + alpha) * y.ln()),
            Box::new(move |y: f64| -(1.0 + alpha) / y),
        ),
        TailModel::Stretched { a, beta, d } => (
            Box::new(move |y: f64| d.ln() - beta * ln2 * y.powf(a)),
            Box::new(move |y: f64| -beta * ln2 * a * y.powf(a - 1.0)),
        ),
    };

    let y1 = 1.5 * s;
    let y2 = 3.0 * s;
    let (f1, d1) = (ln_core(y1), dln_core(y1));
    let (f2, d2) = (ln_tail(y2), dln_tail(y2));
    if ![f1, d1, f2, d2].iter().all(|v| v.is_finite()) {
        return Err(Error::SpliceFailure(format!(
            "non-finite log-density data at the splice knots: {f1}, {d1}, {f2}, {d2}"
        )));
    }
    let w = y2 - y1;
    let hermite = move |y: f64| -> f64 {
        let t = (y - y1) / w;
        let h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
        let h10 = t * (1.0 - t) * (1.0 - t);
        let h01 = t * t * (3.0 - 2.0 * t);
        let h11 = t * t * (t - 1.0);
        h00 * f1 + h10 * w * d1 + h01 * f2 + h11 * w * d2
    };

    let (half, n) = match model {
        TailModel::PowerLaw { .. } => (1e4 * s, 1usize << 18),
        TailModel::Stretched { a, beta, .. } => {
            // Reach ~48 bits below the tail prefactor so information scans
            // see a long clean asymptotic stretch.
            let y48 = (48.0 / beta).powf(1.0 / a);
            ((14.0 * s).max(1.25 * y48 + 3.0 * s), 1usize << 17)
        }
    };
    let grid = Grid1D::new(-half, 2.0 * half / n as f64, n)?;
    let values: Vec<f64> = grid
        .coords()
        .map(|x| {
            let y = x.abs();
            let lf = if y <= y1 {
                ln_core(y)
            } else if y >= y2 {
                ln_tail(y)
            } else {
                hermite(y)
            };
            lf.exp()
        })
        .collect();
    let raw = SampledDensity::new(grid, values)?;
    normalize(&raw).map_err(|_| Error::SpliceFailure("spliced density has no mass".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{density_from_amplitude, integrate, lp_norm, quadrature};
    use crate::renyi::{entropy_power, EntropyIndex};
    use crate::transform::fourier_conjugate;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn variance(d: &SampledDensity) -> f64 {
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

    #[test]
    fn k0_reference_values() {
        assert_relative_eq!(bessel_k0(1.0).unwrap(), 0.421024438241, max_relative = 1e-9);
        assert_relative_eq!(bessel_k0(0.1).unwrap(), 2.427069, max_relative = 1e-6);
    }

    #[test]
    fn k0_matches_integral_oracle_everywhere() {
        // Oracle: the integral representation at a finer step than the
        // implementation ever uses.
        for &u in &[
            1e-3, 0.01, 0.1, 0.5, 1.0, 2.0, 3.0, 5.0, 6.9, 7.1, 8.0, 9.5, 11.0, 11.9, 12.1, 15.0,
            20.0, 50.0, 100.0, 300.0,
        ] {
            let got = bessel_k0(u).unwrap();
            let oracle = k0_integral(u, 0.05);
            assert_relative_eq!(got, oracle, max_relative = 1e-9);
        }
    }

    #[test]
    fn k0_large_argument_asymptotics() {
        let u = 50.0;
        let scaled = bessel_k0(u).unwrap() * u.exp() * (2.0 * u / PI).sqrt();
        // Next-order corrections: 1 - 1/8u + 9/128u².
        let expected = 1.0 - 1.0 / (8.0 * u) + 9.0 / (128.0 * u * u);
        assert!((scaled - expected).abs() < 1e-6, "{scaled} vs {expected}");
    }

    #[test]
    fn k0_rejects_nonpositive() {
        assert!(bessel_k0(0.0).is_err());
        assert!(bessel_k0(-1.0).is_err());
    }

    #[test]
    fn k0_integral_over_orders_is_half_pi() {
        // ∫0^∞ K0(u) du = π/2, computed over a log-spaced composite grid.
        let mut total = 0.0;
        let mut lo = 1e-6f64;
        while lo < 60.0 {
            let hi = (lo * 1.3).min(60.0);
            let n = 33;
            let h = (hi - lo) / (n - 1) as f64;
            let vals: Vec<f64> = (0..n).map(|k| bessel_k0(lo + k as f64 * h).unwrap()).collect();
            total += quadrature(h, &vals);
            lo = hi;
        }
        // The [0, 1e-6] head contributes ~1e-5 ln-ish mass.
        assert!((total - PI / 2.0).abs() < 1e-4, "{total}");
    }

    #[test]
    fn gaussian_state_moments() {
        let psi = gaussian_state(1.0, 0.0, 1.0).unwrap();
        let d = density_from_amplitude(&psi);
        assert!((integrate(&d) - 1.0).abs() < 1e-10);
        assert!((variance(&d) - 1.0).abs() < 1e-8);
        let dhat = density_from_amplitude(&fourier_conjugate(&psi, 1.0).unwrap());
        assert!((variance(&dhat) - 0.25).abs() < 1e-6);
    }

    #[test]
    fn gaussian_state_entropy_power_is_variance() {
        let psi = gaussian_state(2.0, 0.5, 1.0).unwrap();
        let d = density_from_amplitude(&psi);
        let n1 = entropy_power(&d, EntropyIndex::shannon());
        assert_relative_eq!(n1.power, 4.0, max_relative = 1e-5);
    }

    #[test]
    fn squeezed_zero_is_vacuum() {
        let st = squeezed_superposition(0.0, 1.0, 1.0).unwrap();
        let d = density_from_amplitude(&st.psi);
        assert!((integrate(&d) - 1.0).abs() < 1e-8);
        assert_relative_eq!(variance(&d), 0.5, max_relative = 1e-8);
        assert_relative_eq!(st.var_x * st.var_p, 0.25, max_relative = 1e-12);
        // Closed-form and numerical variances agree.
        assert_relative_eq!(variance(&d), st.var_x, max_relative = 1e-3);
    }

    #[test]
    fn squeezed_variances_match_closed_form() {
        for zeta in [0.5, 1.0, 2.0, -1.0] {
            let st = squeezed_superposition(zeta, 1.0, 1.0).unwrap();
            let dx = density_from_amplitude(&st.psi);
            let dp = density_from_amplitude(&st.psihat);
            assert!((integrate(&dx) - 1.0).abs() < 1e-8, "zeta {zeta}");
            assert!((integrate(&dp) - 1.0).abs() < 1e-8, "zeta {zeta}");
            assert_relative_eq!(variance(&dx), st.var_x, max_relative = 1e-3);
            assert_relative_eq!(variance(&dp), st.var_p, max_relative = 1e-3);
        }
    }

    #[test]
    fn squeezed_momentum_density_matches_transform() {
        // The closed-form momentum PDF is the transform of the closed-form
        // position amplitude.
        let st = squeezed_superposition(1.0, 1.0, 1.0).unwrap();
        let via_fft = density_from_amplitude(&fourier_conjugate(&st.psi, 1.0).unwrap());
        let direct = density_from_amplitude(&st.psihat);
        assert!(via_fft.grid.approx_eq(&direct.grid, 1e-9));
        let peak = direct.max_value();
        for (a, b) in via_fft.values.iter().zip(&direct.values) {
            assert!((a - b).abs() < 1e-8 * peak);
        }
    }

    #[test]
    fn squeezed_peak_grows_with_zeta() {
        let p1 = density_from_amplitude(&squeezed_superposition(1.0, 1.0, 1.0).unwrap().psi).max_value();
        let p2 = density_from_amplitude(&squeezed_superposition(2.0, 1.0, 1.0).unwrap().psi).max_value();
        assert!(p2 > p1);
    }

    #[test]
    fn squeezed_rejects_large_zeta() {
        assert!(matches!(
            squeezed_superposition(4.5, 1.0, 1.0),
            Err(Error::OutOfRange(_))
        ));
    }

    #[test]
    fn cauchy_position_density_peak() {
        let st = cauchy_pltwp_sized(1.0, 0.0, 1.0, 2e3, 1 << 17).unwrap();
        let d = density_from_amplitude(&st.psi);
        assert_relative_eq!(d.max_value(), 1.0 / PI, max_relative = 1e-12);
        assert!((integrate(&d) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn cauchy_momentum_amplitude_matches_fft() {
        let st = cauchy_pltwp(1.0, 0.0, 1.0).unwrap();
        let fft = fourier_conjugate(&st.psi, 1.0).unwrap();
        let ana = &st.psihat_analytic;
        assert!(fft.grid.approx_eq(&ana.grid, 1e-9));

        // Pointwise at a few fixed momenta.
        let dp = ana.grid.dx;
        for target in [0.5, 1.0, 2.0] {
            let j = ((target - ana.grid.x0) / dp).round() as usize;
            let got = (fft.re[j] * fft.re[j] + fft.im[j] * fft.im[j]).sqrt();
            let want = (ana.re[j] * ana.re[j] + ana.im[j] * ana.im[j]).sqrt();
            assert_relative_eq!(got, want, max_relative = 1e-4);
        }

        // Relative agreement across the central 90% of momentum mass.
        let d = density_from_amplitude(ana);
        let total = integrate(&d);
        let mut cum = 0.0;
        let mut lo = 0;
        let mut hi = d.grid.n - 1;
        for (k, v) in d.values.iter().enumerate() {
            cum += v * d.grid.dx;
            if cum < 0.05 * total {
                lo = k;
            }
            if cum <= 0.95 * total {
                hi = k;
            }
        }
        let center = d.grid.n / 2;
        for k in lo..=hi {
            if k.abs_diff(center) <= 8 {
                // Nearest the log singularity the FFT sees the Dirichlet-
                // smeared peak while the closed form is evaluated pointwise;
                // those bins carry negligible mass and are skipped.
                continue;
            }
            let got = (fft.re[k] * fft.re[k] + fft.im[k] * fft.im[k]).sqrt();
            let want = (ana.re[k] * ana.re[k] + ana.im[k] * ana.im[k]).sqrt();
            assert!(
                (got - want).abs() <= 1e-3 * want,
                "bin {k}: fft {got} vs analytic {want}"
            );
        }
    }

    #[test]
    fn cauchy_momentum_l1_norm() {
        // ∫|ψ̂| dp = sqrt(2 ħ/γ), finite despite the log peak.
        let st = cauchy_pltwp(1.0, 0.0, 1.0).unwrap();
        let l1 = lp_norm(&st.psihat_analytic, 1.0).unwrap();
        assert_relative_eq!(l1, 2.0f64.sqrt(), max_relative = 1e-3);
    }

    #[test]
    fn cauchy_median_phase() {
        let st = cauchy_pltwp_sized(1.0, 2.0, 1.0, 2e3, 1 << 17).unwrap();
        // |ψ̂| is independent of the median; the phase winds with slope -m/ħ.
        let ana = &st.psihat_analytic;
        let j = ana.grid.n / 2 + 100;
        let p = ana.grid.coord(j);
        let phase = ana.im[j].atan2(ana.re[j]);
        let expected = -2.0 * p;
        let wrapped = (phase - expected).rem_euclid(2.0 * PI);
        assert!(wrapped.min(2.0 * PI - wrapped) < 1e-9);
    }

    #[test]
    fn synthetic_stretched_gaussian_is_exact() {
        let d = synthetic_tail_density(
            TailModel::Stretched {
                a: 2.0,
                beta: std::f64::consts::LOG2_E / 2.0,
                d: 1.0 / (2.0 * PI).sqrt(),
            },
            1.0,
        )
        .unwrap();
        let norm = 1.0 / (2.0 * PI).sqrt();
        for (x, v) in d.grid.coords().zip(&d.values) {
            let want = norm * (-x * x / 2.0).exp();
            assert!((v - want).abs() <= 1e-9 * want.max(1e-280), "x={x}: {v} vs {want}");
        }
    }

    #[test]
    fn synthetic_power_law_tail_is_exact() {
        let d = synthetic_tail_density(TailModel::PowerLaw { alpha: 1.0, c: 1.0 / PI }, 0.05).unwrap();
        // Beyond the splice the tail is c |y|^-2 up to the single overall
        // normalization constant.
        let probe = |y: f64| -> f64 {
            let k = ((y - d.grid.x0) / d.grid.dx).round() as usize;
            d.values[k] * (d.grid.coord(k).abs()).powi(2)
        };
        let r1 = probe(10.0);
        let r2 = probe(250.0);
        assert_relative_eq!(r1, r2, max_relative = 1e-9);
        assert!((integrate(&d) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn synthetic_splice_is_smooth() {
        let alpha = 0.8;
        let d = synthetic_tail_density(TailModel::PowerLaw { alpha, c: 0.3 }, 1.0).unwrap();
        // C1 at the knots: the centered log-density slope matches the
        // analytic one-sided derivative to first order in dx.
        let slope_at = |y: f64| -> f64 {
            let k = ((y - d.grid.x0) / d.grid.dx).round() as usize;
            (d.values[k + 1].ln() - d.values[k - 1].ln()) / (2.0 * d.grid.dx)
        };
        let d1 = -1.5; // core: -y/sigma² at y = 1.5
        let d2 = -(1.0 + alpha) / 3.0; // tail at y = 3
        assert!((slope_at(1.5) - d1).abs() < 0.1, "{}", slope_at(1.5));
        assert!((slope_at(3.0) - d2).abs() < 0.1, "{}", slope_at(3.0));
        assert!(d.grid.n.is_power_of_two());
    }

    #[test]
    fn synthetic_rejects_bad_parameters() {
        assert!(synthetic_tail_density(TailModel::PowerLaw { alpha: 2.5, c: 1.0 }, 1.0).is_err());
        assert!(synthetic_tail_density(TailModel::Stretched { a: -1.0, beta: 1.0, d: 1.0 }, 1.0).is_err());
    }
}
