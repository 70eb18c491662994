mod common;

use prelog_core::bounds::{
    capacity_lower_bound, coherent_avg_upper_bound, default_upsilon_grid, miso_prelog_lower,
    optimize_upsilon, phase_noise_lower_bound, phase_noise_upper_bound, prelog_lower_bound, prelog_report,
    BoundCurve, BoundKind,
};
use prelog_core::grid::log_grid;
use prelog_core::spectra::{spectral_log_integral, zero_set_measure, SpectralDensity};
use prelog_core::{FadingModel, MarginalLaw};
use proptest::prelude::*;

fn density() -> impl Strategy<Value = SpectralDensity> {
    any::<u64>().prop_map(|seed| common::random_density(&mut common::seeded(seed)))
}

fn law() -> impl Strategy<Value = MarginalLaw> {
    prop_oneof![Just(MarginalLaw::Rayleigh), Just(MarginalLaw::OnOff)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn refined_grid_never_worse(s in density(), law in law(), k in 0i32..12, extra in 2usize..40) {
        let model = FadingModel::new("random", s, law).unwrap();
        let snr = 10f64.powi(k);
        let coarse = log_grid(1e-3, 4.0, 15).unwrap();
        let mut fine = coarse.clone();
        fine.extend(log_grid(1e-2, 3.0, extra).unwrap());
        let a = optimize_upsilon(&model, snr, &coarse).unwrap();
        let b = optimize_upsilon(&model, snr, &fine).unwrap();
        prop_assert!(b.value >= a.value);
    }

    #[test]
    fn lower_bound_below_coherent_bound(s in density(), law in law(), k in 0i32..12, u in 1e-3f64..4.0) {
        let model = FadingModel::new("random", s, law).unwrap();
        let snr = 10f64.powi(k);
        let lb = capacity_lower_bound(&model, snr, u).unwrap();
        let ub = coherent_avg_upper_bound(&model, snr).unwrap();
        prop_assert!(lb <= ub + 1e-9, "{lb} > {ub}");
    }

    #[test]
    fn lower_bound_matches_closed_form(s in density(), k in 0i32..12, u in 1e-3f64..4.0) {
        let snr = 10f64.powi(k);
        let model = FadingModel::new("random", s.clone(), MarginalLaw::Rayleigh).unwrap();
        let p = (-u * u).exp();
        let expect = p * snr.ln() - p * (1.0 - (u * u).ln()) - common::quadrature_log_integral(&s, snr);
        let got = capacity_lower_bound(&model, snr, u).unwrap();
        prop_assert!((got - expect).abs() < 1e-9 * (1.0 + expect.abs()));
    }

    #[test]
    fn miso_is_max_of_antennas(seeds in proptest::collection::vec(any::<u64>(), 1..6)) {
        let spectra: Vec<SpectralDensity> =
            seeds.iter().map(|s| common::random_density(&mut common::seeded(*s))).collect();
        let masses = vec![0.0; spectra.len()];
        let miso = miso_prelog_lower(&spectra, &masses).unwrap();
        let per: f64 = spectra
            .iter()
            .map(|s| prelog_lower_bound(&FadingModel::new("a", s.clone(), MarginalLaw::Rayleigh).unwrap()).unwrap())
            .fold(0.0, f64::max);
        prop_assert_eq!(miso, per);
        // a single antenna reduces to the SISO bound
        prop_assert_eq!(miso_prelog_lower(&spectra[..1], &[0.0]).unwrap(), zero_set_measure(&spectra[0]));
    }

    #[test]
    fn phase_noise_slope(a in 4.0f64..12.0, b in 4.0f64..12.0) {
        prop_assume!((a - b).abs() > 0.5);
        let (lo, hi) = (10f64.powf(a.min(b)), 10f64.powf(a.max(b)));
        let slope = (phase_noise_lower_bound(hi).unwrap() - phase_noise_lower_bound(lo).unwrap())
            / (hi.ln() - lo.ln());
        prop_assert!((0.49..=0.51).contains(&slope), "{slope}");
        prop_assert!(phase_noise_lower_bound(hi).unwrap() <= phase_noise_upper_bound(hi).unwrap());
    }
}

#[test]
fn lower_ratio_increases_for_rayleigh_bands() {
    let snrs = [1e4, 1e6, 1e8, 1e10, 1e12];
    for w in [0.05, 0.1, 0.2, 0.3] {
        let model = FadingModel::rayleigh_band(w).unwrap();
        let report = prelog_report(&model, &snrs, &default_upsilon_grid()).unwrap();
        let ratios: Vec<f64> = report.finite_ratios.iter().map(|p| p.ratio).collect();
        assert!(ratios.windows(2).all(|p| p[1] > p[0]), "W={w}: {ratios:?}");
        assert!(ratios.iter().all(|r| *r <= 1.0 - 2.0 * w + 0.02));
    }
}

#[test]
fn lower_curve_matches_pointwise_optimum() {
    let model = FadingModel::onoff(0.1).unwrap();
    let snrs = log_grid(10.0, 1e9, 9).unwrap();
    let grid = default_upsilon_grid();
    let curve = BoundCurve::evaluate(&model, BoundKind::LowerLb, &snrs, &grid).unwrap();
    for (p, &snr) in curve.points.iter().zip(&snrs) {
        let best = optimize_upsilon(&model, snr, &grid).unwrap();
        assert_eq!(p.snr, snr);
        assert_eq!(p.value, best.value);
        assert_eq!(p.upsilon_star, Some(best.upsilon));
    }
}

#[test]
fn coherent_bound_is_capacity_of_known_fading_at_full_support() {
    // p = 1 reduces to log(1 + snr)
    let model = FadingModel::rayleigh_band(0.2).unwrap();
    for snr in [0.5, 10.0, 1e6] {
        assert!((coherent_avg_upper_bound(&model, snr).unwrap() - snr.ln_1p()).abs() < 1e-14);
    }
    let onoff = FadingModel::onoff(0.1).unwrap();
    assert!((coherent_avg_upper_bound(&onoff, 1e4).unwrap() - 0.5 * (2e4f64).ln_1p()).abs() < 1e-12);
}

#[test]
fn lower_bound_integral_term_uses_spectrum() {
    let model = FadingModel::rayleigh_band(0.25).unwrap();
    let snr: f64 = 100.0;
    let u: f64 = 1.0;
    let p = (-u * u).exp();
    let expect = p * snr.ln() - p - spectral_log_integral(model.spectrum(), snr).unwrap();
    assert!((capacity_lower_bound(&model, snr, u).unwrap() - expect).abs() < 1e-14);
}
