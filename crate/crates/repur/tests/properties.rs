//! Property suites: invariances of the entropy powers and scans, entropy
//! monotonicity in the order, scaling covariance, transform round trips,
//! and the rescaled-transform entropy identity.

use proptest::prelude::*;
use repur::grid::{Grid1D, SampledDensity};
use repur::infoscan::information_scan;
use repur::renyi::{evaluate, EntropyIndex};
use repur::states::{cauchy_pltwp, gaussian_state};
use repur::transform::{beckner_rescale, fourier_conjugate, fourier_inverse};
use std::f64::consts::PI;

fn mixture_density(w: f64, mu1: f64, s1: f64, mu2: f64, s2: f64) -> SampledDensity {
    let n = 4096;
    let grid = Grid1D::new(-30.0, 60.0 / n as f64, n).unwrap();
    let bump = |x: f64, mu: f64, s: f64| (-(x - mu) * (x - mu) / (2.0 * s * s)).exp() / s;
    let values: Vec<f64> = grid
        .coords()
        .map(|x| w * bump(x, mu1, s1) + (1.0 - w) * bump(x, mu2, s2))
        .collect();
    repur::grid::normalize(&SampledDensity::new(grid, values).unwrap()).unwrap()
}

fn mirrored(f: &SampledDensity) -> SampledDensity {
    let mut values = f.values.clone();
    values.reverse();
    SampledDensity::new(f.grid.clone(), values).unwrap()
}

fn entropy_bits(f: &SampledDensity, p: f64) -> f64 {
    let res = evaluate(f, EntropyIndex::finite(p).unwrap());
    assert!(!res.diverged, "unexpected divergence at p={p}");
    res.entropy_bits
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    // Entropy powers depend only on the level sets of the density, so any
    // rearrangement of the sampled values leaves them unchanged.
    #[test]
    fn rearrangement_invariance_of_powers(
        w in 0.2f64..0.8,
        mu1 in -5.0f64..0.0,
        s1 in 0.3f64..2.0,
        mu2 in 0.0f64..5.0,
        s2 in 0.3f64..2.0,
    ) {
        let f = mixture_density(w, mu1, s1, mu2, s2);
        let g = mirrored(&f);
        for p in [0.6, 1.0, 2.0, 5.0] {
            let a = evaluate(&f, EntropyIndex::finite(p).unwrap()).power;
            let b = evaluate(&g, EntropyIndex::finite(p).unwrap()).power;
            prop_assert!((a / b - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rearrangement_invariance_of_scans(
        w in 0.2f64..0.8,
        mu in 0.5f64..5.0,
        s1 in 0.3f64..2.0,
        s2 in 0.3f64..2.0,
    ) {
        let f = mixture_density(w, -mu, s1, mu, s2);
        let g = mirrored(&f);
        let sf = information_scan(&f, 256).unwrap();
        let sg = information_scan(&g, 256).unwrap();
        prop_assert!((sf.onset - sg.onset).abs() < 1e-12);
        for (a, b) in sf.g.iter().zip(&sg.g) {
            prop_assert!((a - b).abs() < 1e-12 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn entropy_nonincreasing_in_order(
        w in 0.2f64..0.8,
        mu1 in -5.0f64..0.0,
        s1 in 0.3f64..2.0,
        mu2 in 0.0f64..5.0,
        s2 in 0.3f64..2.0,
    ) {
        let f = mixture_density(w, mu1, s1, mu2, s2);
        let orders = [0.6, 0.8, 1.0, 1.5, 2.0, 4.0, 8.0];
        let entropies: Vec<f64> = orders.iter().map(|&p| entropy_bits(&f, p)).collect();
        for pair in entropies.windows(2) {
            prop_assert!(pair[1] <= pair[0] + 1e-9);
        }
    }

    // Under y -> lambda * y the power picks up lambda^2 and the entropy
    // shifts by log2(lambda); on matched grids this holds to roundoff.
    #[test]
    fn power_scales_quadratically(
        lambda in 0.3f64..3.0,
        s1 in 0.3f64..2.0,
        mu in -3.0f64..3.0,
    ) {
        let f = mixture_density(0.5, mu, s1, -mu, s1);
        let grid = Grid1D::new(f.grid.x0 * lambda, f.grid.dx * lambda, f.grid.n).unwrap();
        let values: Vec<f64> = f.values.iter().map(|v| v / lambda).collect();
        let g = SampledDensity::new(grid, values).unwrap();
        for p in [0.75, 1.0, 2.0] {
            let a = evaluate(&f, EntropyIndex::finite(p).unwrap());
            let b = evaluate(&g, EntropyIndex::finite(p).unwrap());
            prop_assert!((b.power / (lambda * lambda * a.power) - 1.0).abs() < 1e-9);
            prop_assert!((b.entropy_bits - a.entropy_bits - lambda.log2()).abs() < 1e-9);
        }
    }

    #[test]
    fn fourier_round_trip(
        sigma in 0.4f64..3.0,
        center in -2.0f64..2.0,
        hbar in 0.3f64..2.0,
    ) {
        let psi = gaussian_state(sigma, center, hbar).unwrap();
        let psi_hat = fourier_conjugate(&psi, hbar).unwrap();
        let back = fourier_inverse(&psi_hat, hbar, psi.grid.x0).unwrap();
        let mut err2 = 0.0;
        for k in 0..psi.grid.n {
            let dr = back.re[k] - psi.re[k];
            let di = back.im[k] - psi.im[k];
            err2 += (dr * dr + di * di) * psi.grid.dx;
        }
        prop_assert!(err2.sqrt() < 1e-9);
    }
}

// The unit-frequency transform of the rescaled amplitude carries the same
// entropies as the momentum density up to the rescaling constant:
// I_p(|f1|^2) = I_p(|psi_hat|^2) - (1/2) log2(2 pi hbar).
#[test]
fn rescaled_transform_entropy_identity() {
    let cases: Vec<(repur::grid::SampledAmplitude, f64)> = vec![
        (gaussian_state(1.0, 0.0, 1.0).unwrap(), 1.0),
        (gaussian_state(0.6, 1.5, 2.3).unwrap(), 2.3),
        (cauchy_pltwp(1.0, 0.0, 1.0).unwrap().psi, 1.0),
    ];
    for (psi, hbar) in cases {
        let psi_hat = fourier_conjugate(&psi, hbar).unwrap();
        let f = beckner_rescale(&psi, hbar).unwrap();
        let f1 = fourier_conjugate(&f, 1.0 / (2.0 * PI)).unwrap();
        let lhs_density = repur::grid::density_from_amplitude(&f1);
        let rhs_density = repur::grid::density_from_amplitude(&psi_hat);
        let shift = 0.5 * (2.0 * PI * hbar).log2();
        for p in [0.75, 1.0, 1.5, 2.0] {
            let lhs = entropy_bits(&lhs_density, p);
            let rhs = entropy_bits(&rhs_density, p) - shift;
            assert!(
                (lhs - rhs).abs() < 1e-4,
                "p={p}, hbar={hbar}: lhs {lhs} vs rhs {rhs}"
            );
        }
    }
}
