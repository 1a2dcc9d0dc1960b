//! Tail fits on the information PDF g(x) in log scale: a power-law family
//! (heavy algebraic tails of F) and a stretched family (Laplacian and
//! Gaussian tails), plus residual-based model selection between them.

use crate::error::{Error, Result};
use crate::infoscan::InformationScan;
use serde::Serialize;

/// Fitted tail family. Both constants are the combined two-sided sums;
/// asymmetry between the sides is unidentifiable from g alone, so the
/// sides are assumed equal.
#[derive(Debug, Clone, Copy, Serialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum FittedTail {
    /// `F(y) -> (c_sum/2) |y|^-(1+alpha)` on each side.
    PowerLaw { alpha: f64, c_sum: f64 },
    /// `F(y) -> (d_sum/2) 2^(-beta |y|^a)` on each side.
    Stretched { a: f64, beta: f64, d_sum: f64 },
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct TailFit {
    #[serde(flatten)]
    pub model: FittedTail,
    /// Fit window in bits.
    pub window: (f64, f64),
    /// RMS of the log2 g residuals over the window.
    pub residual: f64,
    /// Set by model selection when the residual margin is below 10%.
    pub ambiguous: bool,
}

/// Populated (x, log2 g) points of the scan inside the window. The last
/// bin is skipped when it holds folded overflow mass.
fn window_points(scan: &InformationScan, window: (f64, f64)) -> Result<Vec<(f64, f64)>> {
    let (lo, hi) = window;
    if !(hi > lo) {
        return Err(Error::OutOfRange(format!("empty fit window [{lo}, {hi}]")));
    }
    let mut last = scan.g.len();
    if scan.overflow_mass > 0.0 {
        last -= 1;
    }
    let mut points = Vec::new();
    for k in 0..last {
        let x = scan.x_grid.coord(k);
        if x >= lo && x <= hi && scan.g[k] > 0.0 {
            points.push((x, scan.g[k].log2()));
        }
    }
    if points.len() < 10 {
        return Err(Error::InsufficientTail(format!(
            "{} populated bins in [{lo:.2}, {hi:.2}], need 10",
            points.len()
        )));
    }
    Ok(points)
}

/// Least-squares line b + s x through the points; returns (b, s, rms).
fn fit_line(points: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    let s = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let b = (sy - s * sx) / n;
    let rms = (points.iter().map(|&(x, y)| (y - b - s * x).powi(2)).sum::<f64>() / n).sqrt();
    (b, s, rms)
}

/// Fit `g(x) = 2^{-alpha x/(1+alpha)} (ln2/(1+alpha)) (C+^{1/(1+alpha)} +
/// C-^{1/(1+alpha)})` by a line in log scale. The slope s = -alpha/(1+alpha)
/// must land in (-2/3, 0), the image of alpha in (0, 2).
pub fn fit_power_tail(scan: &InformationScan, window: (f64, f64)) -> Result<TailFit> {
    let points = window_points(scan, window)?;
    let (b, s, rms) = fit_line(&points);
    if !(-2.0 / 3.0 < s && s < 0.0) {
        return Err(Error::DegenerateFit { slope: s });
    }
    let alpha = -s / (1.0 + s);
    // Intercept: b = log2(ln2/(1+alpha) * sum), sum = 2 C^{1/(1+alpha)}.
    let sum = b.exp2() * (1.0 + alpha) / std::f64::consts::LN_2;
    let c = (sum / 2.0).powf(1.0 + alpha);
    Ok(TailFit {
        model: FittedTail::PowerLaw { alpha, c_sum: 2.0 * c },
        window,
        residual: rms,
        ambiguous: false,
    })
}

const STRETCH_MAX_EVALS: usize = 200;

/// Fit `g(x) = 2^{-x}/(a beta^{1/a}) * 2 (x + log2 D)^{1/a - 1}`.
///
/// In log scale with h = log2 g + x this is h = c0 + q log2(x + L) with
/// q = 1/a - 1 and L = log2 D: linear in (c0, q) at fixed L, so the search
/// is a bracketed golden-section over L with a linear solve inside,
/// seeded by the slope of h (which isolates the log correction).
pub fn fit_stretched_tail(scan: &InformationScan, window: (f64, f64)) -> Result<TailFit> {
    let points = window_points(scan, window)?;
    let shifted: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x, y + x)).collect();
    let x_lo = shifted.first().unwrap().0;

    let evals = std::cell::Cell::new(0usize);
    let solve = |l: f64| -> (f64, f64, f64) {
        evals.set(evals.get() + 1);
        let logpts: Vec<(f64, f64)> = shifted.iter().map(|&(x, h)| ((x + l).log2(), h)).collect();
        fit_line(&logpts)
    };

    // Coarse bracket over admissible offsets, then golden-section.
    let lo = -x_lo + 1e-3;
    let hi = 40.0;
    let coarse = 41;
    let mut best = (f64::INFINITY, lo);
    for j in 0..coarse {
        let l = lo + (hi - lo) * j as f64 / (coarse - 1) as f64;
        let (_, _, rms) = solve(l);
        if rms < best.0 {
            best = (rms, l);
        }
    }
    let step = (hi - lo) / (coarse - 1) as f64;
    let (mut a1, mut b1) = ((best.1 - step).max(lo), (best.1 + step).min(hi));
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut c1, mut d1) = (b1 - phi * (b1 - a1), a1 + phi * (b1 - a1));
    let (mut fc, mut fd) = (solve(c1).2, solve(d1).2);
    while b1 - a1 > 1e-5 {
        if evals.get() >= STRETCH_MAX_EVALS {
            return Err(Error::NoConvergence(STRETCH_MAX_EVALS));
        }
        if fc < fd {
            b1 = d1;
            d1 = c1;
            fd = fc;
            c1 = b1 - phi * (b1 - a1);
            fc = solve(c1).2;
        } else {
            a1 = c1;
            c1 = d1;
            fc = fd;
            d1 = a1 + phi * (b1 - a1);
            fd = solve(d1).2;
        }
    }
    let l = 0.5 * (a1 + b1);
    let (c0, q, rms) = solve(l);
    if q <= -1.0 {
        return Err(Error::DegenerateFit { slope: q });
    }
    let a = 1.0 / (1.0 + q);
    // c0 = 1 - log2(a beta^{1/a})  =>  beta = (2^{1-c0}/a)^a.
    let beta = ((1.0 - c0).exp2() / a).powf(a);
    let d = l.exp2();
    Ok(TailFit {
        model: FittedTail::Stretched { a, beta, d_sum: 2.0 * d },
        window,
        residual: rms,
        ambiguous: false,
    })
}

/// Clearance above the onset before tail formulas are trusted, in bits.
pub const TAIL_CLEARANCE_BITS: f64 = 5.0;

/// Select between the two tail families on an automatically chosen window:
/// the upper 30% of populated bins, at least `TAIL_CLEARANCE_BITS` past
/// the onset. The smaller-residual fit wins; a margin under 10% is flagged
/// ambiguous.
pub fn classify_tail(scan: &InformationScan) -> Result<TailFit> {
    let mut last = scan.g.len();
    if scan.overflow_mass > 0.0 {
        last -= 1;
    }
    let floor = scan.onset + TAIL_CLEARANCE_BITS;
    let populated: Vec<usize> = (0..last)
        .filter(|&k| scan.g[k] > 0.0 && scan.x_grid.coord(k) >= floor)
        .collect();
    if populated.len() < 30 {
        return Err(Error::InsufficientTail(format!(
            "{} populated bins beyond onset + {TAIL_CLEARANCE_BITS} bits, need 30",
            populated.len()
        )));
    }
    // The topmost populated bin is only partially filled when the density
    // grid truncates mid-bin; leave it out of the window.
    let populated = &populated[..populated.len() - 1];
    let start = populated[populated.len() - populated.len() * 3 / 10];
    let window = (scan.x_grid.coord(start), scan.x_grid.coord(*populated.last().unwrap()));
    let power = fit_power_tail(scan, window);
    let stretched = fit_stretched_tail(scan, window);
    match (power, stretched) {
        (Ok(p), Ok(s)) => {
            let (mut winner, loser) = if p.residual <= s.residual { (p, s) } else { (s, p) };
            winner.ambiguous = loser.residual - winner.residual < 0.1 * loser.residual;
            Ok(winner)
        }
        (Ok(p), Err(_)) => Ok(p),
        (Err(_), Ok(s)) => Ok(s),
        (Err(e), Err(_)) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Grid1D, SampledDensity};
    use crate::infoscan::information_scan;
    use crate::renyi::LOG2_E;
    use crate::states::{synthetic_tail_density, TailModel};
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn cauchy_scan() -> crate::infoscan::InformationScan {
        let n = 1 << 20;
        let grid = Grid1D::new(-1e4, 2e4 / n as f64, n).unwrap();
        let values = grid.coords().map(|y| 1.0 / (PI * (1.0 + y * y))).collect();
        let d = SampledDensity::new(grid, values).unwrap();
        // Coarse enough that every window bin collects several density
        // samples; sparser bins bias log-scale slopes.
        information_scan(&d, 512).unwrap()
    }

    fn gaussian_scan(sigma: f64) -> crate::infoscan::InformationScan {
        // High occupancy per bin matters: with only a few density samples
        // per info bin the counts alias against the y lattice and flatten
        // the log-scale profile.
        let n = 1 << 18;
        let hw = 16.0 * sigma;
        let grid = Grid1D::new(-hw, 2.0 * hw / n as f64, n).unwrap();
        let norm = 1.0 / (sigma * (2.0 * PI).sqrt());
        let values = grid
            .coords()
            .map(|y| norm * (-y * y / (2.0 * sigma * sigma)).exp())
            .collect();
        let d = SampledDensity::new(grid, values).unwrap();
        information_scan(&d, 512).unwrap()
    }

    fn laplace_scan(lambda: f64) -> crate::infoscan::InformationScan {
        let n = 1 << 17;
        let hw = 45.0 / lambda;
        let grid = Grid1D::new(-hw, 2.0 * hw / n as f64, n).unwrap();
        let values = grid
            .coords()
            .map(|y: f64| 0.5 * lambda * (-lambda * y.abs()).exp())
            .collect();
        let d = SampledDensity::new(grid, values).unwrap();
        information_scan(&d, 32768).unwrap()
    }

    #[test]
    fn cauchy_power_fit() {
        let fit = fit_power_tail(&cauchy_scan(), (8.0, 20.0)).unwrap();
        let FittedTail::PowerLaw { alpha, c_sum } = fit.model else {
            panic!("expected power law")
        };
        assert_relative_eq!(alpha, 1.0, epsilon = 0.05);
        assert_relative_eq!(c_sum / 2.0, 1.0 / PI, max_relative = 0.10);
        assert!(fit.residual < 0.05);
    }

    #[test]
    fn synthetic_pareto_fit() {
        let d = synthetic_tail_density(TailModel::PowerLaw { alpha: 1.5, c: 0.2 }, 1.0).unwrap();
        let scan = information_scan(&d, 256).unwrap();
        let fit = fit_power_tail(&scan, (10.0, 24.0)).unwrap();
        let FittedTail::PowerLaw { alpha, .. } = fit.model else {
            panic!("expected power law")
        };
        assert_relative_eq!(alpha, 1.5, epsilon = 0.05);
    }

    #[test]
    fn gaussian_rejects_power_model() {
        let cauchy_res = fit_power_tail(&cauchy_scan(), (8.0, 20.0)).unwrap().residual;
        match fit_power_tail(&gaussian_scan(1.0), (8.0, 20.0)) {
            Err(Error::DegenerateFit { .. }) => {}
            Ok(fit) => assert!(fit.residual >= 5.0 * cauchy_res),
            Err(e) => panic!("unexpected error {e}"),
        }
    }

    #[test]
    fn gaussian_stretched_fit() {
        let scan = gaussian_scan(1.0);
        let hi = scan.onset + 38.0;
        let fit = fit_stretched_tail(&scan, (scan.onset + 5.0, hi)).unwrap();
        let FittedTail::Stretched { a, beta, d_sum } = fit.model else {
            panic!("expected stretched")
        };
        assert_relative_eq!(a, 2.0, epsilon = 0.1);
        // Exact parameterization: beta = log2e/(2 sigma^2), D = 1/sqrt(2 pi sigma^2).
        assert_relative_eq!(beta, LOG2_E / 2.0, max_relative = 0.2);
        assert_relative_eq!(d_sum / 2.0, 1.0 / (2.0 * PI).sqrt(), max_relative = 0.3);
    }

    #[test]
    fn laplace_stretched_fit() {
        let scan = laplace_scan(1.0);
        let fit = fit_stretched_tail(&scan, (scan.onset + 5.0, scan.onset + 38.0)).unwrap();
        let FittedTail::Stretched { a, .. } = fit.model else {
            panic!("expected stretched")
        };
        assert_relative_eq!(a, 1.0, epsilon = 0.1);
    }

    #[test]
    fn decay_ordering() {
        let g = fit_stretched_tail(&gaussian_scan(1.0), (7.0, 38.0)).unwrap();
        let l = fit_stretched_tail(&laplace_scan(1.0), (7.0, 38.0)).unwrap();
        let a_of = |fit: &TailFit| match fit.model {
            FittedTail::Stretched { a, .. } => a,
            _ => unreachable!(),
        };
        assert!(a_of(&g) > a_of(&l));
    }

    #[test]
    fn classify_examples() {
        let c = classify_tail(&cauchy_scan()).unwrap();
        assert!(matches!(c.model, FittedTail::PowerLaw { .. }), "{c:?}");
        assert!(!c.ambiguous);

        let g = classify_tail(&gaussian_scan(1.0)).unwrap();
        match g.model {
            FittedTail::Stretched { a, .. } => assert_relative_eq!(a, 2.0, epsilon = 0.2),
            _ => panic!("expected stretched, got {g:?}"),
        }

        let uniform = {
            let grid = Grid1D::new(0.0, 1.0 / 512.0, 512).unwrap();
            SampledDensity::new(grid, vec![1.0; 512]).unwrap()
        };
        let scan = information_scan(&uniform, 1024).unwrap();
        assert!(matches!(classify_tail(&scan), Err(Error::InsufficientTail(_))));
    }

    #[test]
    fn slope_inversion_is_exact_on_synthetic_lines() {
        // Noise-free synthetic line with slope s = -alpha/(1+alpha).
        for alpha in [0.25, 0.5, 1.0, 1.5, 1.9] {
            let s = -alpha / (1.0 + alpha);
            let grid = Grid1D::new(8.0, 12.0 / 256.0, 256).unwrap();
            let g = grid.coords().map(|x| (s * x - 3.0).exp2()).collect::<Vec<_>>();
            let scan = crate::infoscan::InformationScan {
                x_grid: grid,
                f: vec![1.0; 256],
                g,
                onset: 0.0,
                overflow_mass: 0.0,
                dropped_mass: 0.0,
            };
            let fit = fit_power_tail(&scan, (8.0, 20.0)).unwrap();
            let FittedTail::PowerLaw { alpha: got, .. } = fit.model else {
                panic!()
            };
            assert_relative_eq!(got, alpha, max_relative = 1e-10);
            assert!(fit.residual < 1e-12);
        }
    }

    #[test]
    fn fits_invariant_under_rearrangement() {
        let n = 1 << 18;
        let grid = Grid1D::new(-1e3, 2e3 / n as f64, n).unwrap();
        let values: Vec<f64> = grid.coords().map(|y| 1.0 / (PI * (1.0 + y * y))).collect();
        let base = SampledDensity::new(grid, values.clone()).unwrap();
        let mut rev = values;
        rev.reverse();
        let mirrored = SampledDensity::new(grid, rev).unwrap();
        let f1 = fit_power_tail(&information_scan(&base, 4096).unwrap(), (8.0, 17.0)).unwrap();
        let f2 = fit_power_tail(&information_scan(&mirrored, 4096).unwrap(), (8.0, 17.0)).unwrap();
        let (FittedTail::PowerLaw { alpha: a1, c_sum: c1 }, FittedTail::PowerLaw { alpha: a2, c_sum: c2 }) =
            (f1.model, f2.model)
        else {
            panic!()
        };
        assert_relative_eq!(a1, a2, max_relative = 1e-12);
        assert_relative_eq!(c1, c2, max_relative = 1e-12);
    }

    #[test]
    fn too_few_bins_rejected() {
        let scan = gaussian_scan(1.0);
        assert!(matches!(
            fit_power_tail(&scan, (39.42, 39.5)),
            Err(Error::InsufficientTail(_))
        ));
    }
}
