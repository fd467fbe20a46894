use eitgap::bandstructure::{band_scan, bloch_k_analytic_for, DEFAULT_SLABS};
use eitgap::reflection::{reflection_spectrum, sample_scatter, summarize};
use eitgap::{hz_to_angular, MediumParams, ModulatedMedium, PeriodCell, Sample, StaticDrive};
use proptest::prelude::*;

fn medium(lossless: bool, coupling_hz: f64) -> MediumParams {
    let m = MediumParams::from_wavelength(
        hz_to_angular(coupling_hz),
        hz_to_angular(10e6),
        hz_to_angular(1e3),
        0.04,
        780e-9,
    )
    .unwrap();
    if lossless {
        m.lossless()
    } else {
        m
    }
}

fn modulated(m: MediumParams, group_index: f64, delta_s_hz: f64) -> ModulatedMedium {
    let delta = hz_to_angular(1e9);
    ModulatedMedium::new(
        m,
        StaticDrive {
            omega_c: m.control_for_group_index(group_index).unwrap(),
            omega_s: (hz_to_angular(delta_s_hz) * delta).sqrt(),
            delta,
            delta_k: 0.0,
        },
    )
    .unwrap()
}

#[test]
fn analytic_and_numeric_bands_agree_near_resonance() {
    // Δ_s far inside the transparency window; compare both components in
    // units of the gap-centre attenuation, away from the square-root edges.
    let mm = modulated(medium(true, 400e6), 1000.0, 40e3);
    let cell = PeriodCell::new(&mm, DEFAULT_SLABS).unwrap();
    let ds = mm.light_shift();
    let kappa0 = bloch_k_analytic_for(0.0, &mm).unwrap().k_imag;
    let omegas: Vec<f64> = (-200..=200)
        .map(|i| 0.01 * ds * i as f64)
        .filter(|w| ((w.abs() / ds) - 1.0).abs() > 0.05)
        .collect();
    for (an, num) in band_scan(&omegas, &cell, &mm).unwrap() {
        let dr = (an.k_real - num.k_real).abs() / kappa0;
        let di = (an.k_imag - num.k_imag).abs() / kappa0;
        assert!(dr < 1e-2 && di < 1e-2, "omega/ds = {}: {dr:e} {di:e}", an.omega / ds);
        assert_eq!(an.in_gap, num.in_gap, "omega/ds = {}", an.omega / ds);
    }
}

#[test]
fn reflection_symmetry_approaches_exact_in_linear_regime() {
    // The lossless response is odd in ω only to first order in
    // Δ_s·ω/Ω_c²; the spectrum's asymmetry shrinks with that ratio.
    let asym = |coupling_hz: f64| {
        let mm = modulated(medium(true, coupling_hz), 1000.0, 400e3);
        let s = Sample::new(mm, DEFAULT_SLABS).unwrap();
        let ds = mm.light_shift();
        let grid: Vec<f64> = (-300..=300).map(|i| 0.01 * ds * i as f64).collect();
        let sp = reflection_spectrum(&grid, &s).unwrap();
        let peak = summarize(&sp).unwrap().peak_reflectivity;
        (0..sp.len())
            .map(|i| (sp[i].reflectivity - sp[sp.len() - 1 - i].reflectivity).abs())
            .fold(0.0, f64::max)
            / peak
    };
    let coarse = asym(400e6);
    let fine = asym(1600e6);
    assert!(fine < coarse / 10.0, "{coarse:e} -> {fine:e}");
    assert!(fine < 2e-3);
}

#[test]
fn peak_sits_inside_analytic_gap() {
    let mm = modulated(medium(false, 400e6), 1000.0, 400e3);
    let s = Sample::new(mm, DEFAULT_SLABS).unwrap();
    let ds = mm.light_shift();
    let grid: Vec<f64> = (-300..=300).map(|i| 0.01 * ds * i as f64).collect();
    let sum = summarize(&reflection_spectrum(&grid, &s).unwrap()).unwrap();
    assert!(sum.peak_omega.abs() < ds);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn spectra_are_passive(
        omega_frac in -5.0f64..5.0,
        group_index in 100.0f64..5000.0,
        ds_khz in 10.0f64..1000.0,
        periods in 1u64..200_000,
    ) {
        let mm = modulated(medium(false, 400e6), group_index, ds_khz * 1e3);
        let s = Sample::new(mm, 16).unwrap().with_periods(periods).unwrap();
        let p = sample_scatter(omega_frac * mm.light_shift(), &s).unwrap();
        prop_assert!(p.reflectivity + p.transmissivity <= 1.0 + 1e-9);
        prop_assert!(p.absorption >= -1e-9);
    }

    #[test]
    fn lossless_spectra_conserve_flux(
        omega_frac in -5.0f64..5.0,
        ds_khz in 10.0f64..1000.0,
        periods in 1u64..200_000,
    ) {
        let mm = modulated(medium(true, 400e6), 1000.0, ds_khz * 1e3);
        let s = Sample::new(mm, 16).unwrap().with_periods(periods).unwrap();
        let p = sample_scatter(omega_frac * mm.light_shift(), &s).unwrap();
        prop_assert!(p.absorption.abs() < 1e-9);
    }
}
