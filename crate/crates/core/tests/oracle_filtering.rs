//! Estimator behavior against independent oracles: a Jacobi eigensolver,
//! trimmed means, exact probability mass functions, and Monte Carlo
//! repetition over seeds.

mod support;

use robust_sco::contamination::{corrupt, AdversarySpec};
use robust_sco::estimators::{
    bucketed_filter_mean, check_good_set, check_stability, covariance_diagnostics,
    estimate_sigma_lower_bound, filter_mean, stability_delta, top_eigenvector_dense, FilterConfig,
    GoodSetConfig, PowerOptions, StabilityConfig,
};
use robust_sco::linalg::SymMat;
use robust_sco::problems::{FunctionDistribution, SampleFunction, SpikeVariant};
use robust_sco::rng::rng_from_seed;
use support::*;

#[test]
fn power_iteration_matches_jacobi_on_random_psd() {
    // Random 8x8 PSD matrices; the dense full-spectrum Jacobi solver is the
    // oracle.
    for seed in 0..10u64 {
        let b = gaussian_points(8, &[0.0; 8], 1.0, 1000 + seed);
        let mut rows = vec![vec![0.0; 8]; 8];
        for (i, row) in rows.iter_mut().enumerate() {
            for j in 0..8 {
                let mut acc = 0.0;
                for r in &b {
                    acc += r[i] * r[j];
                }
                row[j] = acc / 8.0;
            }
        }
        let oracle_top = jacobi_eigenvalues(rows.clone())[0];
        let est = top_eigenvector_dense(&rows, &PowerOptions::new()).unwrap();
        let rel = (est.value - oracle_top).abs() / oracle_top;
        assert!(
            rel <= 1e-6,
            "seed {seed}: power {} vs jacobi {oracle_top}",
            est.value
        );
    }
}

#[test]
fn covariance_diagnostics_match_dense_oracle() {
    let pts = gaussian_points(400, &[1.0, -2.0, 0.0, 3.0, 0.5, -1.0], 1.0, 77);
    // Matching the oracle to 1e-8 needs a tighter Rayleigh tolerance than
    // the filtering default.
    let opts = PowerOptions {
        tol: 1e-14,
        max_iter: 10_000,
        ..PowerOptions::new()
    };
    let diag = covariance_diagnostics(&pts, &opts).unwrap();
    let eigs = jacobi_eigenvalues(dense_covariance(&pts));
    let top = eigs[0];
    let trace: f64 = eigs.iter().sum();
    assert!((diag.spectral_norm - top).abs() / top <= 1e-8);
    assert!((diag.trace - trace).abs() / trace <= 1e-10);
    assert!((diag.stable_rank - trace / top).abs() / (trace / top) <= 1e-8);
}

#[test]
fn clean_gaussian_filter_error_beats_the_stability_bound() {
    // d = 5, sigma = 1, n = 1000, eps = 0.05: error at most
    // 5 * sigma * (sqrt{eps} + sqrt{d/n}) in at least 95 of 100 seeded trials.
    let d = 5;
    let n = 1000;
    let eps = 0.05_f64;
    let bound = 5.0 * (eps.sqrt() + (d as f64 / n as f64).sqrt());
    let mu = vec![0.4, -0.2, 0.0, 1.0, -0.7];
    let cfg = FilterConfig::new(eps, 0.1).unwrap();
    let mut ok = 0;
    for trial in 0..100u64 {
        let pts = gaussian_points(n, &mu, 1.0, 40_000 + trial);
        let report = filter_mean(&pts, &cfg).unwrap();
        if l2_dist(&report.estimate, &mu) <= bound {
            ok += 1;
        }
    }
    assert!(ok >= 95, "only {ok}/100 trials within {bound}");
}

#[test]
fn filter_error_stays_bounded_as_outliers_recede() {
    // floor(eps n) planted outliers at distance R: the filter error stays
    // bounded as R grows to 1e6 while the plain mean error grows like eps*R.
    let d = 5;
    let n = 500;
    let eps = 0.1_f64;
    let k = (eps * n as f64) as usize;
    let cfg = FilterConfig::new(eps, 0.1).unwrap();
    let cap = 5.0 * (eps.sqrt() + (d as f64 / n as f64).sqrt());
    for (i, r) in [1e2, 1e4, 1e6].into_iter().enumerate() {
        let mut pts = gaussian_points(n, &[0.0; 5], 1.0, 900 + i as u64);
        for p in pts.iter_mut().take(k) {
            *p = vec![0.0; 5];
            p[0] = r;
        }
        let filtered = filter_mean(&pts, &cfg).unwrap();
        let filt_err = l2_dist(&filtered.estimate, &[0.0; 5]);
        let mean_err = l2_dist(&sample_mean(&pts), &[0.0; 5]);
        assert!(
            filt_err <= cap,
            "R = {r}: filter error {filt_err} above {cap}"
        );
        assert!(
            mean_err >= 0.5 * eps * r,
            "R = {r}: mean error {mean_err} unexpectedly small"
        );
    }
}

#[test]
fn bucketed_filter_tracks_the_plain_filter_on_clean_data() {
    // Paired Monte Carlo: on clean Gaussian data the bucketed variant's mean
    // error stays within a factor two of the plain filter's.
    let d = 5;
    let n = 1000;
    let cfg = FilterConfig::new(0.02, 0.1).unwrap();
    let mu = vec![0.0; 5];
    let mut plain_total = 0.0;
    let mut bucketed_total = 0.0;
    for trial in 0..100u64 {
        let pts = gaussian_points(n, &mu, 1.0, 52_000 + trial);
        plain_total += l2_dist(&filter_mean(&pts, &cfg).unwrap().estimate, &mu);
        bucketed_total += l2_dist(
            &bucketed_filter_mean(&pts, &cfg, trial).unwrap().estimate,
            &mu,
        );
    }
    assert!(
        bucketed_total <= 2.0 * plain_total,
        "bucketed mean error {} vs plain {}",
        bucketed_total / 100.0,
        plain_total / 100.0
    );
    let _ = d;
}

#[test]
fn sigma_lower_bound_underestimates_on_clean_gaussians() {
    let n = 2000;
    let cfg = FilterConfig::new(0.05, 0.1).unwrap();
    for trial in 0..20u64 {
        let pts = gaussian_points(n, &[0.0; 10], 1.0, 61_000 + trial);
        let est = estimate_sigma_lower_bound(&pts, &cfg).unwrap();
        assert!(
            est.sigma_hat <= 1.0,
            "trial {trial}: sigma_hat {}",
            est.sigma_hat
        );
        assert!(
            est.sigma_hat > 0.05,
            "trial {trial}: sigma_hat collapsed to {}",
            est.sigma_hat
        );
    }
}

#[test]
fn good_set_holds_for_clean_gaussian_gradients() {
    // n = 20 d / eps keeps the empirical moments well inside the default
    // constants; at least 95 of 100 seeded trials must pass.
    let d = 5;
    let eps = 0.05;
    let n = (20.0 * d as f64 / eps) as usize;
    let pop = vec![0.3, -0.5, 0.0, 0.2, 0.9];
    let subset: Vec<usize> = (0..n).collect();
    let mut ok = 0;
    for trial in 0..100u64 {
        let grads = gaussian_points(n, &pop, 1.0, 73_000 + trial);
        let rep =
            check_good_set(&grads, &subset, &pop, 1.0, eps, &GoodSetConfig::default()).unwrap();
        if rep.passes {
            ok += 1;
        }
    }
    assert!(ok >= 95, "only {ok}/100 good-set checks passed");
}

#[test]
fn stability_holds_for_clean_gaussians_at_the_reference_delta() {
    let d = 5;
    let n = 2000;
    let eps = 0.05_f64;
    let delta = 4.0 * (eps.sqrt() + (d as f64 * (d as f64).ln() / n as f64).sqrt());
    let mu = vec![0.0; 5];
    let subset: Vec<usize> = (0..n).collect();
    for trial in 0..20u64 {
        let pts = gaussian_points(n, &mu, 1.0, 81_000 + trial);
        let rep = check_stability(
            &pts,
            &subset,
            &mu,
            1.0,
            eps,
            delta,
            &StabilityConfig {
                probes: 200,
                seed: trial,
                power: PowerOptions::new(),
            },
        )
        .unwrap();
        assert!(rep.passes, "trial {trial}: {rep:?}");
    }
}

#[test]
fn projected_second_moments_probe_the_covariance_spectral_norm() {
    // Equivalence of the two covariance-bound formulations: the maximum of
    // v' Cov v over unit probes never exceeds the spectral norm and the probe
    // set (100 random directions plus the estimated top eigenvector) reaches
    // at least 90% of it.
    let n = 10_000;
    let mut pts = gaussian_points(n, &[0.0; 8], 1.0, 4242);
    for p in pts.iter_mut() {
        p[0] *= 1.5;
        p[7] *= 0.5;
    }
    let nf = n as f64;
    let weights = vec![1.0 / nf; n];
    let mean = sample_mean(&pts);
    let cov = SymMat::weighted_covariance(&pts, &weights, &mean, 1.0);
    let eig = robust_sco::estimators::top_eigenvector(&cov, &PowerOptions::new()).unwrap();
    let spectral = eig.value;

    let mut rng = rng_from_seed(99);
    let mut probes: Vec<Vec<f64>> = (0..100).map(|_| random_unit(8, &mut rng)).collect();
    probes.push(eig.vector.clone());
    let mut max_quad: f64 = 0.0;
    for v in &probes {
        let mv = cov.matvec(v);
        let quad: f64 = v.iter().zip(mv.iter()).map(|(a, b)| a * b).sum();
        max_quad = max_quad.max(quad);
    }
    assert!(max_quad <= spectral * (1.0 + 1e-9));
    assert!(max_quad >= 0.9 * spectral);
}

#[test]
fn swapped_centered_spikes_are_indistinguishable_from_biased_ones() {
    // The sign-flip adversary on the centered spike law must reproduce the
    // biased law: TV distance of the empirical gradient distribution at most
    // 0.01 against the exact pmf, and a two-sample chi-square test at
    // significance 0.01 cannot tell it from clean biased draws.
    let n = 100_000;
    let mass: f64 = 0.04;
    let sigma: f64 = 1.0;
    let centered =
        FunctionDistribution::spike_1d(sigma, mass, 1.0, SpikeVariant::Centered).unwrap();
    let biased = FunctionDistribution::spike_1d(sigma, mass, 1.0, SpikeVariant::Biased).unwrap();

    let clean = centered.sample_functions(n, 1234).unwrap();
    let swapped = corrupt(&clean, &AdversarySpec::TvSwap, mass, centered.domain(), 99).unwrap();
    let fresh = biased.sample_functions(n, 4321).unwrap();

    let spike_value = sigma / mass.sqrt();
    let count = |fns: &[SampleFunction<f64>]| -> (f64, f64) {
        let mut zero = 0.0;
        let mut pos = 0.0;
        for f in fns {
            match f {
                SampleFunction::Spike { value, .. } if *value == 0.0 => zero += 1.0,
                SampleFunction::Spike { value, .. } if (*value - spike_value).abs() < 1e-9 => {
                    pos += 1.0
                }
                other => panic!("unexpected sample {other:?}"),
            }
        }
        (zero, pos)
    };

    let (a0, a1) = count(swapped.functions());
    // TV against the exact biased pmf {0: 1-mass, spike: mass}.
    let tv = 0.5 * ((a0 / n as f64 - (1.0 - mass)).abs() + (a1 / n as f64 - mass).abs());
    assert!(tv <= 0.01, "TV distance {tv}");

    // Two-sample chi-square on the support {0, spike}, df = 1, alpha = 0.01.
    let (b0, b1) = count(&fresh);
    let total = 2.0 * n as f64;
    let p0 = (a0 + b0) / total;
    let p1 = (a1 + b1) / total;
    let nn = n as f64;
    let chi2 = (a0 - nn * p0).powi(2) / (nn * p0)
        + (a1 - nn * p1).powi(2) / (nn * p1)
        + (b0 - nn * p0).powi(2) / (nn * p0)
        + (b1 - nn * p1).powi(2) / (nn * p1);
    assert!(
        chi2 <= 6.635,
        "chi-square statistic {chi2} rejects at alpha = 0.01"
    );
}

#[test]
fn stability_delta_formula() {
    let d = stability_delta(0.04_f64, 16, 400, 0.1);
    let expected = 0.2 + 0.2 + (10.0_f64.ln() / 400.0).sqrt();
    assert!((d - expected).abs() < 1e-12);
}
