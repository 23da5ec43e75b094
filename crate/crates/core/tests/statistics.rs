//! Ensemble checks of the models and estimators.
//!
//! Checks that compare many bins at once use a family-wise bound
//! (Šidák, 1% overall) instead of a per-bin 3σ, which would raise false
//! alarms on a fraction of runs by construction.

use std::f64::consts::FRAC_PI_8;

use bispec_core::estimate::{increment_moments, wk_lag_sums};
use bispec_core::model::{gen_white_noise_with, oracle_tone};
use bispec_core::polar::properness_test;
use bispec_core::rng;
use bispec_core::study::{increment_orthogonality, interior_bins, periodogram_moments, run_section5_experiment, Section5Config};
use bispec_core::*;

/// Two-sided normal quantile giving family-wise level `alpha` over `m`
/// comparisons, by bisection on the complementary error function.
fn family_z(alpha: f64, m: usize) -> f64 {
    let per = 1.0 - (1.0 - alpha).powf(1.0 / m as f64);
    let tail = |z: f64| erfc(z / std::f64::consts::SQRT_2);
    let (mut lo, mut hi) = (0.0, 10.0);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if tail(mid) > per {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Complementary error function (Numerical Recipes `erfcc`, rel. error < 1.2e-7).
fn erfc(x: f64) -> f64 {
    let z = x.abs();
    let t = 1.0 / (1.0 + 0.5 * z);
    let r = t * (-z * z - 1.26551223
        + t * (1.00002368
            + t * (0.37409196
                + t * (0.09678418
                    + t * (-0.18628806
                        + t * (0.27886807 + t * (-1.13520398 + t * (1.48851587 + t * (-0.82215223 + t * 0.17087277)))))))))
        .exp();
    if x >= 0.0 {
        r
    } else {
        2.0 - r
    }
}

#[test]
fn white_noise_periodogram_is_unbiased() {
    let spec = WhiteNoiseSpec { s0: 2.0, phi: 0.6, theta: -0.7, seed: 0 };
    let n = 64;
    let m = periodogram_moments(&spec, n, 1000, 77).unwrap();
    let truth = spec.density();
    let z = family_z(0.01, 4 * n);
    for k in 0..n {
        let (mu, se) = (m.mean[k], m.stderr[k]);
        for (got, want, s) in [(mu.a, truth.a, se.a), (mu.b, truth.b, se.b), (mu.c, truth.c, se.c), (mu.d, truth.d, se.d)] {
            assert!((got - want).abs() <= z * s + 1e-12, "bin {k}: {got} vs {want} (se {s})");
        }
    }
}

#[test]
fn increments_are_j_proper() {
    let spec = WhiteNoiseSpec { s0: 1.0, phi: 0.2, theta: FRAC_PI_8, seed: 0 };
    let n = 128;
    let bins: Vec<usize> = interior_bins(n).collect();
    let z = family_z(0.01, 2 * 4 * bins.len());
    for axis in [Axis::I, Axis::K] {
        let m = increment_orthogonality(&spec, n, 500, 5, axis).unwrap();
        for &k in &bins {
            let (mu, se) = (m.mean[k], m.stderr[k]);
            for (c, s) in [(mu.a, se.a), (mu.b, se.b), (mu.c, se.c), (mu.d, se.d)] {
                assert!(c.abs() <= z * s + 1e-12, "{axis:?} bin {k}: {c} (se {s})");
            }
        }
    }
}

#[test]
fn lag_sums_match_increment_moments_over_an_ensemble() {
    let spec = WhiteNoiseSpec { s0: 1.0, phi: 0.5, theta: 0.3, seed: 0 };
    let n = 128;
    let bins = [1usize, 17, 40, 63];
    let reps = 500;
    let mut lag = vec![(Quaternion::ZERO, Quaternion::ZERO); bins.len()];
    let mut inc = lag.clone();
    for r in 0..reps {
        let x = gen_white_noise_with(&spec, n, &mut rng::stream(31, r)).unwrap();
        for (i, &k) in bins.iter().enumerate() {
            let (a, b) = wk_lag_sums(&x, &x, k).unwrap();
            let (c, d) = increment_moments(&x, &x, k).unwrap();
            lag[i].0 += a / reps as f64;
            lag[i].1 += b / reps as f64;
            inc[i].0 += c / reps as f64;
            inc[i].1 += d / reps as f64;
        }
    }
    for (i, &k) in bins.iter().enumerate() {
        assert!(lag[i].0.abs_diff(inc[i].0) < 1e-10, "bin {k}");
        assert!(lag[i].1.abs_diff(inc[i].1) < 1e-10, "bin {k}");
        // and the pair assembles the density Γww = S0 + j S1 + k S2
        let g = inc[i].0 + inc[i].1 * Quaternion::J;
        let truth = spec.density();
        assert!((g.a - truth.a).abs() < 0.1 * truth.a, "bin {k}");
    }
}

#[test]
fn tone_periodogram_is_exact_on_grid() {
    let n = 256;
    let tone = MonochromaticSpec { amplitude: 0.8, theta: 0.9, chi: -0.3, nu0: 40.0 / 256.0 };
    let x = gen_monochromatic(&tone, n).unwrap();
    let p = polarization_periodogram(&x);
    let theory = oracle_tone(&tone, n).unwrap();
    for k in 0..n {
        assert!(p.spectrum[k].abs_diff(theory.density[k]) < 1e-9, "bin {k}");
    }
    assert!((p.dop(40).unwrap() - 1.0).abs() < 1e-12);
    let (theta, chi) = poincare_angles(p.spectrum[40]).unwrap();
    assert!((theta - 0.9).abs() < 1e-9 && (chi + 0.3).abs() < 1e-9);
}

#[test]
fn section5_estimates_track_theory() {
    let report = run_section5_experiment(&Section5Config { seed: 3, ..Default::default() }).unwrap();
    let k0 = report.tone_bin;
    let theory = report.theoretical.stokes(k0).normalized().unwrap();
    let est = report.periodogram.stokes(k0).normalized().unwrap();
    for (a, b) in theory.iter().zip(est) {
        // per-run spread is about 0.02 for M = 20
        assert!((a - b).abs() < 0.1);
    }
    // UP split of the theoretical density at the tone bin
    let g = report.theoretical.density[k0];
    let up = up_decompose(g).unwrap();
    assert!((up.unpolarized - (1.0 - 0.989) * g.a).abs() < 1e-5 * g.a);
    // noise-only bins: averaged multitaper s3 scatters around 0
    let noise = report.noise_bins();
    let s3: Vec<f64> = noise.iter().map(|&k| report.multitaper.stokes(k).normalized().unwrap()[2]).collect();
    let mean = s3.iter().sum::<f64>() / s3.len() as f64;
    let sd = (s3.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (s3.len() - 1) as f64).sqrt();
    // neighbouring bins are correlated by the tapers, so allow a wide margin
    assert!(mean.abs() < 9.0 * sd / (s3.len() as f64).sqrt(), "mean s3 {mean}, sd {sd}");
    // multitaper S0 scatters less than the periodogram across noise bins
    let spread = |e: &SpectralDensityEstimate| {
        let v: Vec<f64> = noise.iter().map(|&k| e.spectrum[k].a).collect();
        let m = v.iter().sum::<f64>() / v.len() as f64;
        v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64
    };
    assert!(spread(&report.multitaper) < spread(&report.periodogram));
}

#[test]
fn properness_of_noise() {
    let proper = WhiteNoiseSpec { s0: 1.0, phi: 0.0, theta: 0.0, seed: 0 };
    let improper = WhiteNoiseSpec { s0: 10.0, phi: 0.2, theta: FRAC_PI_8, seed: 0 };
    let n = 128;
    let averaged = |spec: &WhiteNoiseSpec, m: usize| -> Vec<Quaternion> {
        let mut sum = vec![Quaternion::ZERO; n];
        for r in 0..m {
            let x = gen_white_noise_with(spec, n, &mut rng::stream(41, r as u64)).unwrap();
            for (acc, g) in sum.iter_mut().zip(polarization_periodogram(&x).bins()) {
                *acc += *g;
            }
        }
        sum
    };
    let interior: Vec<usize> = interior_bins(n).collect();
    let flagged = |density: &[Quaternion], threshold: f64| {
        let flags = properness_test(density, threshold);
        interior.iter().filter(|&&k| flags[k]).count() as f64 / interior.len() as f64
    };
    let m = 50;
    assert!(flagged(&averaged(&proper, m), 4.0 / (m as f64).sqrt()) < 0.05);
    let m = 2000;
    assert!(flagged(&averaged(&improper, m), 4.0 / (m as f64).sqrt()) > 0.95);
}
