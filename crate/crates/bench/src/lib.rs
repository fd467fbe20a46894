//! Fixtures shared by the solver benchmarks.

use eitgap::{
    hz_to_angular, DriveSchedule, GridSpec, MediumParams, ModulatedMedium, PolaritonState, Ramp, StaticDrive,
};

/// 4 cm cold-atom sample: g√N = 400 MHz, c/v_g = 1000, Δ_s = 400 kHz.
pub fn reflection_medium() -> ModulatedMedium {
    let m = MediumParams::from_wavelength(
        hz_to_angular(400e6),
        hz_to_angular(10e6),
        hz_to_angular(1e3),
        0.04,
        780e-9,
    )
    .expect("valid medium");
    let delta = hz_to_angular(1e9);
    ModulatedMedium::new(
        m,
        StaticDrive {
            omega_c: m.control_for_group_index(1000.0).expect("group index > 1"),
            omega_s: (hz_to_angular(400e3) * delta).sqrt(),
            delta,
            delta_k: 0.0,
        },
    )
    .expect("valid drive")
}

/// `n` detunings evenly spread over ±`span` light shifts.
pub fn detunings(mm: &ModulatedMedium, span: f64, n: usize) -> Vec<f64> {
    let ds = mm.light_shift();
    (0..n)
        .map(|i| span * ds * (2.0 * i as f64 / (n - 1) as f64 - 1.0))
        .collect()
}

/// Constant-drive polariton problem: v_g = 50 m/s, Δ_s = 2·10⁶ s⁻¹, with
/// wavevector mismatch `delta_k`.
pub fn polariton_problem(points: usize, delta_k: f64) -> (MediumParams, DriveSchedule, PolaritonState) {
    let oc = hz_to_angular(5e6);
    let g = (oc * oc * (eitgap::SPEED_OF_LIGHT - 50.0) / 50.0).sqrt();
    let m = MediumParams::from_wavelength(g, hz_to_angular(6e6), 0.0, 0.04, 780e-9).expect("valid medium");
    let delta = hz_to_angular(1e9);
    let sched = DriveSchedule::new(&m, Ramp::constant(oc), Ramp::constant((2e6 * delta).sqrt()), delta, delta_k)
        .expect("valid schedule");
    let grid = GridSpec::new(-0.1, 0.14, points).expect("valid grid");
    let state = PolaritonState::gaussian(grid, 0.02, 0.004, 0.0, 0.0).expect("valid pulse");
    (m, sched, state)
}
