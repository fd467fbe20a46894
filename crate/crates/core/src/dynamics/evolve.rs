use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::{GridSpec, PolaritonState};
use crate::medium::{mixing_angle, DriveSchedule, MediumParams};
use crate::{Error, Result, SPEED_OF_LIGHT};

/// Coefficients held fixed during one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepParams {
    pub theta: f64,
    /// Light-shift amplitude Δ_s (rad/s).
    pub delta_s: f64,
    pub delta_k: f64,
    pub gamma_bc: f64,
}

impl StepParams {
    fn group_velocity(&self) -> f64 {
        SPEED_OF_LIGHT * self.theta.cos().powi(2)
    }

    /// Real-time coupling rate Δ_s·sin²θ (χ·cos²θ).
    fn coupling(&self) -> f64 {
        self.delta_s * self.theta.sin().powi(2)
    }

    fn damping(&self, dt: f64) -> f64 {
        (-self.gamma_bc * self.theta.sin().powi(2) * dt).exp()
    }
}

/// FFT plans and per-grid tables for stepping one grid size.
pub struct Stepper {
    grid: GridSpec,
    k: Vec<f64>,
    z: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
    /// Per-mode propagator for the last (v_g·dt, coupling·dt, damping) key.
    cache: Option<([u64; 3], Vec<[Complex64; 3]>)>,
}

impl Stepper {
    pub fn new(grid: GridSpec) -> Self {
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(grid.n_points);
        let ifft = planner.plan_fft_inverse(grid.n_points);
        let len = fft.get_inplace_scratch_len().max(ifft.get_inplace_scratch_len());
        Self {
            grid,
            k: grid.wavenumbers(),
            z: grid.positions(),
            fft,
            ifft,
            scratch: vec![Complex64::new(0.0, 0.0); len],
            cache: None,
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn to_k(&mut self, v: &mut [Complex64]) {
        self.fft.process_with_scratch(v, &mut self.scratch);
    }

    pub fn to_z(&mut self, v: &mut [Complex64]) {
        self.ifft.process_with_scratch(v, &mut self.scratch);
        let inv = 1.0 / self.grid.n_points as f64;
        v.iter_mut().for_each(|x| *x *= inv);
    }

    /// Norm of spectra produced by [`Stepper::to_k`] (Parseval).
    pub fn spectral_norm(&self, v: &[Complex64]) -> f64 {
        v.iter().map(|x| x.norm_sqr()).sum::<f64>() * self.grid.dz() / self.grid.n_points as f64
    }

    /// One exact step on spectra, valid for Δk = 0: each Fourier mode is
    /// multiplied by exp(−i·dt·[[k v_g, b], [b, −k v_g]]).
    pub fn advance_k(&mut self, kp: &mut [Complex64], km: &mut [Complex64], p: &StepParams, dt: f64) {
        debug_assert_eq!(p.delta_k, 0.0);
        let adv = p.group_velocity() * dt;
        let beta = p.coupling() * dt;
        let damp = p.damping(dt);
        let key = [adv.to_bits(), beta.to_bits(), damp.to_bits()];
        if self.cache.as_ref().map(|c| c.0) != Some(key) {
            let i = Complex64::i();
            let table = self
                .k
                .iter()
                .map(|&k| {
                    let a = k * adv;
                    let phi = a.hypot(beta);
                    let (s, c) = phi.sin_cos();
                    let sinc = if phi == 0.0 { 1.0 } else { s / phi };
                    [
                        damp * (c - i * a * sinc),
                        damp * (-i * beta * sinc),
                        damp * (c + i * a * sinc),
                    ]
                })
                .collect();
            self.cache = Some((key, table));
        }
        let table = &self.cache.as_ref().unwrap().1;
        for ((p, m), u) in kp.iter_mut().zip(km.iter_mut()).zip(table) {
            let (a, b) = (*p, *m);
            *p = u[0] * a + u[1] * b;
            *m = u[1] * a + u[2] * b;
        }
    }

    /// One Strang step on real-space envelopes: half coupling, exact
    /// advection, half coupling, then damping. Handles Δk ≠ 0.
    pub fn advance_split(&mut self, zp: &mut [Complex64], zm: &mut [Complex64], p: &StepParams, dt: f64) {
        let half = 0.5 * p.coupling() * dt;
        self.couple(zp, zm, half, p.delta_k);
        self.to_k(zp);
        self.to_k(zm);
        let adv = p.group_velocity() * dt;
        for ((a, b), &k) in zp.iter_mut().zip(zm.iter_mut()).zip(&self.k) {
            let ph = Complex64::from_polar(1.0, -k * adv);
            *a *= ph;
            *b *= ph.conj();
        }
        self.to_z(zp);
        self.to_z(zm);
        self.couple(zp, zm, half, p.delta_k);
        let damp = p.damping(dt);
        if damp != 1.0 {
            zp.iter_mut().chain(zm.iter_mut()).for_each(|x| *x *= damp);
        }
    }

    fn couple(&self, zp: &mut [Complex64], zm: &mut [Complex64], angle: f64, delta_k: f64) {
        let (s, c) = angle.sin_cos();
        let i = Complex64::i();
        for ((a, b), &z) in zp.iter_mut().zip(zm.iter_mut()).zip(&self.z) {
            let ph = Complex64::from_polar(1.0, 2.0 * delta_k * z);
            let (x, y) = (*a, *b);
            *a = c * x - i * s * ph * y;
            *b = -i * s * ph.conj() * x + c * y;
        }
    }
}

/// Advances `state` by one step with fixed coefficients.
pub fn step(state: &PolaritonState, dt: f64, params: &StepParams) -> Result<PolaritonState> {
    state.validate()?;
    if !(dt > 0.0) {
        return Err(Error::invalid("dt", "must be positive"));
    }
    let mut stepper = Stepper::new(state.grid);
    let mut out = state.clone();
    if params.delta_k == 0.0 {
        stepper.to_k(&mut out.psi_plus);
        stepper.to_k(&mut out.psi_minus);
        stepper.advance_k(&mut out.psi_plus, &mut out.psi_minus, params, dt);
        stepper.to_z(&mut out.psi_plus);
        stepper.to_z(&mut out.psi_minus);
    } else {
        stepper.advance_split(&mut out.psi_plus, &mut out.psi_minus, params, dt);
    }
    out.time += dt;
    if !out.norm().is_finite() {
        return Err(Error::numerical("non-finite state after step 0"));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolveOptions {
    /// Keep a state copy every this many steps (0: first and last only).
    pub snapshot_stride: usize,
    /// Stretched time already elapsed at `t0`, carried into the records.
    pub tau0: f64,
    /// Width of the boundary zones watched for wrap-around; `None` uses two
    /// RMS widths of the initial state.
    pub wrap_zone: Option<f64>,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            snapshot_stride: 0,
            tau0: 0.0,
            wrap_zone: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub step: usize,
    pub time: f64,
    pub tau: f64,
    pub theta: f64,
    pub omega_c: f64,
    pub omega_s: f64,
    pub state: PolaritonState,
}

/// Per-step record, taken at the end of each step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub time: f64,
    pub tau: f64,
    pub theta: f64,
    pub omega_c: f64,
    pub omega_s: f64,
    pub delta_s: f64,
    pub norm: f64,
    pub forward_norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub snapshots: Vec<Snapshot>,
    pub trace: Vec<TraceRow>,
    pub final_state: PolaritonState,
    pub final_tau: f64,
    pub warnings: Vec<String>,
}

/// Integrates from `t0` to `t1` in steps of `dt` (which must divide the
/// interval), sampling the drives at each step midpoint.
pub fn evolve(
    state: &PolaritonState,
    schedule: &DriveSchedule,
    medium: &MediumParams,
    t0: f64,
    t1: f64,
    dt: f64,
    options: &EvolveOptions,
) -> Result<Trajectory> {
    state.validate()?;
    if !(t1 > t0) || !(dt > 0.0) {
        return Err(Error::invalid("dt", "need t1 > t0 and dt > 0"));
    }
    let span = t1 - t0;
    let n_steps = (span / dt).round();
    if n_steps < 1.0 || (n_steps * dt - span).abs() > 1e-9 * span {
        return Err(Error::invalid("dt", format!("{dt:e} s does not divide the interval {span:e} s")));
    }
    let n_steps = n_steps as usize;
    let dt = span / n_steps as f64;

    let grid = state.grid;
    let wrap_zone = options
        .wrap_zone
        .unwrap_or_else(|| 2.0 * super::measure(state, 0.0).rms_width)
        .max(grid.dz());
    let mut wrap_warned = false;
    let mut warnings = Vec::new();
    let mut check_wrap = |s: &PolaritonState, warnings: &mut Vec<String>| {
        if wrap_warned {
            return;
        }
        let total = s.norm();
        let edge = s.norm_within(grid.z_min, grid.z_min + wrap_zone)
            + s.norm_within(grid.z_max - wrap_zone, grid.z_max);
        if total > 0.0 && edge > 1e-4 * total {
            wrap_warned = true;
            warnings.push(format!(
                "wrap-around: {:.2e} of the norm within {:.3e} m of the boundary at t = {:.6e} s",
                edge / total,
                wrap_zone,
                s.time
            ));
        }
    };

    let mut stepper = Stepper::new(grid);
    let split = schedule.delta_k != 0.0;
    let mut plus = state.psi_plus.clone();
    let mut minus = state.psi_minus.clone();
    if !split {
        stepper.to_k(&mut plus);
        stepper.to_k(&mut minus);
    }

    let sample = |t: f64| {
        let oc = schedule.omega_c.eval(t);
        let os = schedule.omega_s.eval(t);
        (oc, os, mixing_angle(oc, medium), os * os / schedule.delta)
    };
    let snapshot = |step: usize, time: f64, tau: f64, plus: &[Complex64], minus: &[Complex64], stepper: &mut Stepper| {
        let mut s = PolaritonState {
            grid,
            psi_plus: plus.to_vec(),
            psi_minus: minus.to_vec(),
            time,
        };
        if !split {
            stepper.to_z(&mut s.psi_plus);
            stepper.to_z(&mut s.psi_minus);
        }
        let (oc, os, theta, _) = sample(time);
        Snapshot {
            step,
            time,
            tau,
            theta,
            omega_c: oc,
            omega_s: os,
            state: s,
        }
    };

    let mut snapshots = vec![snapshot(0, t0, options.tau0, &plus, &minus, &mut stepper)];
    check_wrap(&snapshots[0].state, &mut warnings);
    let mut trace = Vec::with_capacity(n_steps);
    let mut tau = options.tau0;

    for i in 0..n_steps {
        let t_mid = t0 + (i as f64 + 0.5) * dt;
        let (oc, os, theta, delta_s) = sample(t_mid);
        let params = StepParams {
            theta,
            delta_s,
            delta_k: schedule.delta_k,
            gamma_bc: medium.gamma_bc,
        };
        if split {
            stepper.advance_split(&mut plus, &mut minus, &params, dt);
        } else {
            stepper.advance_k(&mut plus, &mut minus, &params, dt);
        }
        tau += theta.cos().powi(2) * dt;
        let time = t0 + (i + 1) as f64 * dt;
        let (fwd, bwd) = if split {
            let dz = grid.dz();
            (
                plus.iter().map(|v| v.norm_sqr()).sum::<f64>() * dz,
                minus.iter().map(|v| v.norm_sqr()).sum::<f64>() * dz,
            )
        } else {
            (stepper.spectral_norm(&plus), stepper.spectral_norm(&minus))
        };
        let norm = fwd + bwd;
        if !norm.is_finite() {
            return Err(Error::numerical(format!("non-finite state at step {i} (t = {time:e} s)")));
        }
        trace.push(TraceRow {
            time,
            tau,
            theta,
            omega_c: oc,
            omega_s: os,
            delta_s,
            norm,
            forward_norm: fwd,
        });
        let last = i + 1 == n_steps;
        if last || (options.snapshot_stride > 0 && (i + 1) % options.snapshot_stride == 0) {
            let snap = snapshot(i + 1, time, tau, &plus, &minus, &mut stepper);
            check_wrap(&snap.state, &mut warnings);
            snapshots.push(snap);
        }
    }

    let final_state = snapshots.last().expect("final snapshot").state.clone();
    Ok(Trajectory {
        snapshots,
        trace,
        final_state,
        final_tau: tau,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{analytic_evolution, measure};
    use crate::medium::{Ramp, RampSegment, RampShape};
    use std::f64::consts::{FRAC_PI_2, PI};

    fn rel_l2(a: &[Complex64], b: &[Complex64]) -> f64 {
        let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
        let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
        (num / den).sqrt()
    }

    fn diff(a: &PolaritonState, b: &PolaritonState) -> f64 {
        let mut x = a.psi_plus.clone();
        x.extend_from_slice(&a.psi_minus);
        let mut y = b.psi_plus.clone();
        y.extend_from_slice(&b.psi_minus);
        rel_l2(&x, &y)
    }

    // Slow-light medium: coupling 1e10 rad/s.
    fn medium(gamma_bc: f64) -> MediumParams {
        MediumParams::new(1e10, 1e7, gamma_bc, 0.04, 8e6).unwrap()
    }

    fn constant_schedule(m: &MediumParams, oc: f64, os: f64, delta_k: f64) -> DriveSchedule {
        DriveSchedule::new(m, Ramp::constant(oc), Ramp::constant(os), 1e9, delta_k).unwrap()
    }

    #[test]
    fn decoupled_gaussian_translates() {
        let grid = GridSpec::new(-0.1, 0.1, 1024).unwrap();
        let s0 = PolaritonState::gaussian(grid, -0.03, 0.004, 0.0, 0.0).unwrap();
        let theta = 1.4;
        let p = StepParams {
            theta,
            delta_s: 0.0,
            delta_k: 0.0,
            gamma_bc: 0.0,
        };
        let vg = SPEED_OF_LIGHT * theta.cos().powi(2);
        let dt = 0.05 / vg;
        let s1 = step(&s0, dt, &p).unwrap();
        let expect = PolaritonState::gaussian(grid, 0.02, 0.004, 0.0, dt).unwrap();
        assert!(diff(&s1, &expect) < 1e-10);
        assert!((s1.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn plane_wave_rotates_forward_into_backward() {
        let grid = GridSpec::new(0.0, 1.0, 64).unwrap();
        let mut s = PolaritonState::zeros(grid, 0.0);
        s.psi_plus.iter_mut().for_each(|v| *v = Complex64::new(1.0, 0.0));
        let theta: f64 = 1.5;
        let ds = 3e5;
        let chi = ds * theta.tan().powi(2);
        let p = StepParams {
            theta,
            delta_s: ds,
            delta_k: 0.0,
            gamma_bc: 0.0,
        };
        let dt = 0.37e-6;
        let tau = dt * theta.cos().powi(2);
        let out = step(&s, dt, &p).unwrap();
        for i in 0..grid.n_points {
            assert!((out.psi_plus[i] - Complex64::new((chi * tau).cos(), 0.0)).norm() < 1e-12);
            assert!((out.psi_minus[i] - Complex64::new(0.0, -(chi * tau).sin())).norm() < 1e-12);
        }
    }

    #[test]
    fn damping_only_limit() {
        let grid = GridSpec::new(-0.1, 0.1, 256).unwrap();
        let s = PolaritonState::gaussian(grid, 0.0, 0.01, 0.0, 0.0).unwrap();
        let p = StepParams {
            theta: FRAC_PI_2,
            delta_s: 0.0,
            delta_k: 0.0,
            gamma_bc: 1e3,
        };
        let out = step(&s, 1e-4, &p).unwrap();
        assert!((out.norm() - (-2.0 * 1e3 * 1e-4f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn evolve_matches_closed_form_over_two_cycles() {
        let m = medium(0.0);
        let grid = GridSpec::new(-0.02, 0.02, 1024).unwrap();
        let s0 = PolaritonState::gaussian(grid, 0.0, 0.002, 0.0, 0.0).unwrap();
        let oc = 2e7;
        let ds = 1e6;
        let sched = constant_schedule(&m, oc, (ds * 1e9f64).sqrt(), 0.0);
        let theta = mixing_angle(oc, &m);
        let chi = ds * theta.tan().powi(2);
        let tau_end = 4.0 * PI / chi;
        let t_end = tau_end / theta.cos().powi(2);
        let n = 2000;
        let traj = evolve(&s0, &sched, &m, 0.0, t_end, t_end / n as f64, &EvolveOptions::default()).unwrap();

        let mut stepper = Stepper::new(grid);
        let mut k0 = s0.psi_plus.clone();
        stepper.to_k(&mut k0);
        let (mut p, mut q) = analytic_evolution(&k0, &grid.wavenumbers(), traj.final_tau, chi);
        stepper.to_z(&mut p);
        stepper.to_z(&mut q);
        let oracle = PolaritonState {
            grid,
            psi_plus: p,
            psi_minus: q,
            time: t_end,
        };
        assert!(diff(&traj.final_state, &oracle) < 1e-8);
        assert!((traj.final_tau / tau_end - 1.0).abs() < 1e-12);
    }

    #[test]
    fn strang_split_converges_to_exact_step() {
        // v_g·k·T and the coupling angle are both of order one for the
        // pulse's wavenumbers, so neither term dominates the splitting error.
        let grid = GridSpec::new(-0.03, 0.03, 512).unwrap();
        let s0 = PolaritonState::gaussian(grid, 0.0, 0.003, 0.0, 0.0).unwrap();
        let vg = 1500.0;
        let p = StepParams {
            theta: (vg / SPEED_OF_LIGHT).sqrt().acos(),
            delta_s: 2e5,
            delta_k: 0.0,
            gamma_bc: 0.0,
        };
        let total = 2e-6;
        let exact = step(&s0, total, &p).unwrap();
        let mut errs = Vec::new();
        for n in [16, 32] {
            let mut st = Stepper::new(grid);
            let (mut a, mut b) = (s0.psi_plus.clone(), s0.psi_minus.clone());
            for _ in 0..n {
                st.advance_split(&mut a, &mut b, &p, total / n as f64);
            }
            let s = PolaritonState {
                grid,
                psi_plus: a,
                psi_minus: b,
                time: total,
            };
            errs.push(diff(&s, &exact));
        }
        let order = (errs[0] / errs[1]).log2();
        assert!(order > 1.8 && order < 2.2, "order {order}, errors {errs:?}");
    }

    #[test]
    fn phase_mismatch_preserves_norm() {
        let m = medium(0.0);
        let grid = GridSpec::new(-0.02, 0.02, 512).unwrap();
        let s0 = PolaritonState::gaussian(grid, 0.0, 0.002, 0.0, 0.0).unwrap();
        let sched = constant_schedule(&m, 2e7, 3e7, 40.0);
        let traj = evolve(&s0, &sched, &m, 0.0, 2e-5, 1e-8, &EvolveOptions::default()).unwrap();
        assert!((traj.final_state.norm() - 1.0).abs() < 1e-10);
        // A mismatched grating converts less than the matched one.
        let matched = evolve(
            &s0,
            &constant_schedule(&m, 2e7, 3e7, 0.0),
            &m,
            0.0,
            2e-5,
            1e-8,
            &EvolveOptions::default(),
        )
        .unwrap();
        let back = |t: &Trajectory| t.trace.iter().map(|r| 1.0 - r.forward_norm / r.norm).fold(0.0, f64::max);
        assert!(back(&traj) < back(&matched));
    }

    fn ramped(m: &MediumParams) -> DriveSchedule {
        let oc = Ramp::new(vec![
            RampSegment::new(0.0, 4e-5, 2e7, 1e7, RampShape::Smoothstep),
            RampSegment::hold(4e-5, 1e-4, 1e7),
        ])
        .unwrap();
        let os = Ramp::new(vec![
            RampSegment::hold(0.0, 1e-5, 0.0),
            RampSegment::new(1e-5, 5e-5, 0.0, 3e7, RampShape::Smoothstep),
            RampSegment::hold(5e-5, 1e-4, 3e7),
        ])
        .unwrap();
        DriveSchedule::new(m, oc, os, 1e9, 0.0).unwrap()
    }

    #[test]
    fn time_dependent_run_conserves_norm() {
        let m = medium(0.0);
        let grid = GridSpec::new(-0.05, 0.05, 512).unwrap();
        let s0 = PolaritonState::gaussian(grid, 0.0, 0.003, 0.0, 0.0).unwrap();
        let traj = evolve(&s0, &ramped(&m), &m, 0.0, 1e-4, 1e-8, &EvolveOptions::default()).unwrap();
        assert_eq!(traj.trace.len(), 10_000);
        let drift = traj.trace.iter().map(|r| (r.norm - 1.0).abs()).fold(0.0, f64::max);
        assert!(drift < 1e-9, "drift {drift}");
    }

    #[test]
    fn halving_dt_converges() {
        let m = medium(0.0);
        let grid = GridSpec::new(-0.05, 0.05, 512).unwrap();
        let s0 = PolaritonState::gaussian(grid, 0.0, 0.003, 0.0, 0.0).unwrap();
        let run = |dt| evolve(&s0, &ramped(&m), &m, 0.0, 1e-4, dt, &EvolveOptions::default()).unwrap();
        let a = run(2e-8);
        let b = run(1e-8);
        assert!(diff(&a.final_state, &b.final_state) < 1e-6);
    }

    #[test]
    fn zero_state_stays_zero_and_snapshots_follow_stride() {
        let m = medium(10.0);
        let grid = GridSpec::new(-0.05, 0.05, 128).unwrap();
        let s0 = PolaritonState::zeros(grid, 0.0);
        let opts = EvolveOptions {
            snapshot_stride: 10,
            ..Default::default()
        };
        let traj = evolve(&s0, &ramped(&m), &m, 0.0, 1e-4, 1e-6, &opts).unwrap();
        assert!(traj.final_state.norm() == 0.0);
        assert_eq!(traj.snapshots.len(), 11);
        assert_eq!(traj.snapshots.last().unwrap().step, 100);
        assert!(evolve(&s0, &ramped(&m), &m, 0.0, 1e-4, 3e-6, &opts).is_err());
    }

    #[test]
    fn group_velocity_from_centroid() {
        let m = medium(0.0);
        let oc = 1e9;
        let grid = GridSpec::new(-0.2, 0.2, 1024).unwrap();
        let s0 = PolaritonState::gaussian(grid, -0.1, 0.01, 0.0, 0.0).unwrap();
        let sched = constant_schedule(&m, oc, 0.0, 0.0);
        let vg = SPEED_OF_LIGHT * mixing_angle(oc, &m).cos().powi(2);
        let t = 0.2 / vg;
        let traj = evolve(&s0, &sched, &m, 0.0, t, t / 50.0, &EvolveOptions::default()).unwrap();
        let moved = measure(&traj.final_state, 0.0).centroid + 0.1;
        assert!((moved / (vg * t) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn wrap_is_reported() {
        let m = medium(0.0);
        let grid = GridSpec::new(-0.2, 0.2, 512).unwrap();
        let s0 = PolaritonState::gaussian(grid, 0.1, 0.01, 0.0, 0.0).unwrap();
        let oc = 1e9;
        let vg = SPEED_OF_LIGHT * mixing_angle(oc, &m).cos().powi(2);
        let t = 0.1 / vg;
        let opts = EvolveOptions {
            snapshot_stride: 5,
            ..Default::default()
        };
        let traj = evolve(&s0, &constant_schedule(&m, oc, 0.0, 0.0), &m, 0.0, t, t / 50.0, &opts).unwrap();
        assert_eq!(traj.warnings.len(), 1);
    }
}
