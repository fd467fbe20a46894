//! Store → release into the band gap → trap → release scenario, plus the
//! validity inequalities that decide whether trapping should work.
//!
//! Stage semantics of the standard schedule:
//!
//! * `[0, t_store]`: control on at Ω_c^in, standing wave off; the pulse
//!   propagates at v_g^in.
//! * `[t_store, t_hold]`: the control ramps to zero and the pulse is stored
//!   as a Raman coherence.
//! * `[t_hold, t_release]`: dark storage.
//! * from `t_release`: the standing wave ramps on and the control ramps to
//!   Ω_c^0 at the same time (or later).
//! * from `t_trap_end`: the standing wave ramps off, and the pulse leaves
//!   at v_g^0 until `t_final`.

use crate::dynamics::{evolve, measure, EvolveOptions, GridSpec, PolaritonState, Snapshot, TraceRow};
use crate::medium::{group_velocity, mixing_angle, DriveSchedule, MediumParams, Ramp, RampSegment, RampShape};
use crate::{Error, Result, SPEED_OF_LIGHT};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseSpec {
    /// Initial centre z₀ (m).
    pub center: f64,
    /// RMS width of |Ψ₊|² (m).
    pub rms_width: f64,
    /// Pulse duration T (s).
    pub duration: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StageTimes {
    pub t_store: f64,
    pub t_hold: f64,
    pub t_release: f64,
    pub t_trap_end: f64,
    pub t_final: f64,
}

impl StageTimes {
    fn as_array(&self) -> [f64; 5] {
        [self.t_store, self.t_hold, self.t_release, self.t_trap_end, self.t_final]
    }

    /// Trapping window t_int = t_trap_end − t_release.
    pub fn interaction_time(&self) -> f64 {
        self.t_trap_end - self.t_release
    }
}

/// Pass margins for "≫" and "≪" conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Margins {
    pub much_greater: f64,
    pub much_less: f64,
}

impl Default for Margins {
    fn default() -> Self {
        Self {
            much_greater: 10.0,
            much_less: 0.1,
        }
    }
}

/// Drive amplitudes for [`Scenario::standard`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StandardDrive {
    pub omega_c_in: f64,
    pub omega_c_0: f64,
    /// Standing-wave single-beam amplitude during trapping.
    pub omega_s_0: f64,
    pub delta: f64,
    pub delta_k: f64,
    /// Duration of every switching ramp (s).
    pub ramp: f64,
    pub shape: RampShape,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub medium: MediumParams,
    pub schedule: DriveSchedule,
    pub pulse: PulseSpec,
    pub stages: StageTimes,
    pub omega_c_in: f64,
    pub omega_c_0: f64,
    pub grid: GridSpec,
    /// Upper bound on the time step; `None` picks one from the drives.
    pub dt_max: Option<f64>,
    pub snapshot_stride: usize,
    pub margins: Margins,
}

impl Scenario {
    pub fn new(
        medium: MediumParams,
        schedule: DriveSchedule,
        pulse: PulseSpec,
        stages: StageTimes,
        omega_c_in: f64,
        omega_c_0: f64,
        grid: GridSpec,
    ) -> Result<Self> {
        let s = Self {
            medium,
            schedule,
            pulse,
            stages,
            omega_c_in,
            omega_c_0,
            grid,
            dt_max: None,
            snapshot_stride: 0,
            margins: Margins::default(),
        };
        s.validate()?;
        Ok(s)
    }

    /// Builds the standard staged schedule described in the module docs.
    pub fn standard(
        medium: MediumParams,
        drive: StandardDrive,
        pulse: PulseSpec,
        stages: StageTimes,
        grid: GridSpec,
    ) -> Result<Self> {
        let r = drive.ramp;
        let st = stages;
        if !(r > 0.0) {
            return Err(Error::invalid("ramp", "must be positive"));
        }
        if st.t_release + r >= st.t_trap_end || st.t_trap_end + r >= st.t_final {
            return Err(Error::InvalidScenario(
                "switching ramps must finish inside their stages".into(),
            ));
        }
        check_increasing(&st)?;
        let sh = drive.shape;
        let omega_c = Ramp::new(vec![
            RampSegment::hold(0.0, st.t_store, drive.omega_c_in),
            RampSegment::new(st.t_store, st.t_hold, drive.omega_c_in, 0.0, sh),
            RampSegment::hold(st.t_hold, st.t_release, 0.0),
            RampSegment::new(st.t_release, st.t_release + r, 0.0, drive.omega_c_0, sh),
            RampSegment::hold(st.t_release + r, st.t_final, drive.omega_c_0),
        ])?;
        let omega_s = Ramp::new(vec![
            RampSegment::hold(0.0, st.t_release, 0.0),
            RampSegment::new(st.t_release, st.t_release + r, 0.0, drive.omega_s_0, sh),
            RampSegment::hold(st.t_release + r, st.t_trap_end, drive.omega_s_0),
            RampSegment::new(st.t_trap_end, st.t_trap_end + r, drive.omega_s_0, 0.0, sh),
            RampSegment::hold(st.t_trap_end + r, st.t_final, 0.0),
        ])?;
        let schedule = DriveSchedule::new(&medium, omega_c, omega_s, drive.delta, drive.delta_k)?;
        Self::new(medium, schedule, pulse, stages, drive.omega_c_in, drive.omega_c_0, grid)
    }

    pub fn validate(&self) -> Result<()> {
        self.medium.validate()?;
        let st = &self.stages;
        check_increasing(st)?;
        let p = &self.pulse;
        if !(p.rms_width > 0.0 && p.duration > 0.0) {
            return Err(Error::InvalidScenario("pulse width and duration must be positive".into()));
        }
        let len = self.medium.length;
        if p.center - 3.0 * p.rms_width < 0.0 || p.center + 3.0 * p.rms_width > len {
            return Err(Error::InvalidScenario(
                "pulse (centre ± 3 RMS widths) must start inside the medium".into(),
            ));
        }
        if self.grid.z_min > 0.0 || self.grid.z_max < len {
            return Err(Error::InvalidScenario("grid must contain the medium [0, L]".into()));
        }
        if !(self.omega_c_in > 0.0 && self.omega_c_0 > 0.0) {
            return Err(Error::InvalidScenario("omega_c_in and omega_c_0 must be positive".into()));
        }
        let sched = &self.schedule;
        if sched.omega_s.max_on(0.0, st.t_release) > 0.0 {
            return Err(Error::InvalidScenario("standing wave must be off before t_release".into()));
        }
        if sched.omega_c.max_on(st.t_hold, st.t_release) > 0.0 {
            return Err(Error::InvalidScenario(
                "control field must be off between t_hold and t_release".into(),
            ));
        }
        let c_on = sched.omega_c.onset_after(st.t_hold);
        let s_on = sched.omega_s.onset_after(st.t_release);
        if let (Some(c), Some(s)) = (c_on, s_on) {
            if s > c {
                return Err(Error::InvalidScenario(
                    "standing wave must switch on before or together with the control field".into(),
                ));
            }
        }
        if let Some(dt) = self.dt_max {
            if !(dt > 0.0) {
                return Err(Error::invalid("dt_max", "must be positive"));
            }
        }
        Ok(())
    }

    /// Light-shift amplitude |Δ_s| during trapping.
    pub fn trap_light_shift(&self) -> f64 {
        let os = self.schedule.omega_s.max_on(self.stages.t_release, self.stages.t_trap_end);
        (os * os / self.schedule.delta).abs()
    }

    /// χ = Δ_s·tan²θ⁰ during trapping, in stretched-time units.
    pub fn trap_coupling(&self) -> f64 {
        self.trap_light_shift() * (self.medium.coupling / self.omega_c_0).powi(2)
    }

    /// Start of the constant-drive part of the trapping window: the last
    /// ramp breakpoint inside (t_release, t_trap_end).
    pub fn plateau_start(&self) -> f64 {
        let st = &self.stages;
        self.schedule
            .breakpoints()
            .into_iter()
            .filter(|&t| t > st.t_release && t < st.t_trap_end)
            .fold(st.t_release, f64::max)
    }

    fn default_dt(&self) -> f64 {
        let mut dt = self.pulse.duration / 100.0;
        let ds = self.trap_light_shift();
        if ds > 0.0 {
            // Resolve the forward/backward oscillation.
            dt = dt.min(std::f64::consts::PI / (16.0 * ds));
        }
        dt
    }

    /// Step count for [t0, t1]: at most `dt_max` per step and less than
    /// 0.01 rad change of θ per step.
    fn steps_for(&self, t0: f64, t1: f64) -> usize {
        let dt_max = self.dt_max.unwrap_or_else(|| self.default_dt());
        let mut n = ((t1 - t0) / dt_max).ceil().max(1.0) as usize;
        let theta = |t: f64| mixing_angle(self.schedule.omega_c.eval(t), &self.medium);
        loop {
            let h = (t1 - t0) / n as f64;
            let worst = (0..n)
                .map(|i| (theta(t0 + (i + 1) as f64 * h) - theta(t0 + i as f64 * h)).abs())
                .fold(0.0, f64::max);
            if worst < 1e-2 || n >= 1 << 24 {
                return n;
            }
            n *= 2;
        }
    }
}

fn check_increasing(st: &StageTimes) -> Result<()> {
    let t = st.as_array();
    if !t.iter().all(|v| v.is_finite()) || t[0] <= 0.0 || t.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidScenario(
            "stage times must be finite and strictly increasing after t = 0".into(),
        ));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckKind {
    /// value ≫ bound: pass at ratio ≥ margin, warn above 1, else fail.
    MuchGreater,
    /// value ≪ bound: pass at ratio ≤ margin, warn below 1, else fail.
    MuchLess,
    /// value ≲ bound: pass at ratio ≤ 1, else fail.
    AtMost,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Warn,
    Fail,
}

impl CheckStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            CheckStatus::Pass => "pass",
            CheckStatus::Warn => "warn",
            CheckStatus::Fail => "fail",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub kind: CheckKind,
    pub value: f64,
    pub bound: f64,
    /// value / bound.
    pub ratio: f64,
    pub status: CheckStatus,
}

impl Check {
    fn new(name: &'static str, kind: CheckKind, value: f64, bound: f64, margins: &Margins) -> Self {
        let ratio = if bound.is_infinite() { 0.0 } else { value / bound };
        // Equality up to rounding counts as violating a strict "≫"/"≪".
        let eq = 1e-9;
        let status = match kind {
            CheckKind::MuchGreater if ratio >= margins.much_greater => CheckStatus::Pass,
            CheckKind::MuchGreater if ratio > 1.0 + eq => CheckStatus::Warn,
            CheckKind::MuchLess if ratio <= margins.much_less => CheckStatus::Pass,
            CheckKind::MuchLess if ratio < 1.0 - eq => CheckStatus::Warn,
            CheckKind::AtMost if ratio <= 1.0 => CheckStatus::Pass,
            _ => CheckStatus::Fail,
        };
        Self {
            name,
            kind,
            value,
            bound,
            ratio,
            status,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidityReport {
    pub checks: Vec<Check>,
}

impl ValidityReport {
    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.status == CheckStatus::Pass)
    }

    pub fn any_fail(&self) -> bool {
        self.checks.iter().any(|c| c.status == CheckStatus::Fail)
    }
}

pub fn validity_report(scenario: &Scenario) -> ValidityReport {
    let m = &scenario.medium;
    let st = &scenario.stages;
    let mg = &scenario.margins;
    let t = scenario.pulse.duration;
    let t_int = st.interaction_time();
    let ds = scenario.trap_light_shift();
    let vg_in = group_velocity(scenario.omega_c_in, m);
    let vg_0 = group_velocity(scenario.omega_c_0, m);
    let speed = vg_in / vg_0;
    let od_bound = if m.gamma_ab > 0.0 {
        m.coupling.powi(2) * m.length / (m.gamma_ab * SPEED_OF_LIGHT) * speed * t
    } else {
        f64::INFINITY
    };
    let raman_bound = if m.gamma_bc > 0.0 { 1.0 / m.gamma_bc } else { f64::INFINITY };
    let window = if m.gamma_ab > 0.0 {
        scenario.omega_c_0.powi(2) / m.gamma_ab
    } else {
        f64::INFINITY
    };
    use CheckKind::*;
    ValidityReport {
        checks: vec![
            Check::new("release_bandwidth", MuchGreater, ds * t, 1.0 / speed, mg),
            Check::new("distortion", MuchLess, t_int / t, ds * t * speed * speed, mg),
            Check::new("optical_depth_bound", AtMost, t_int, od_bound, mg),
            Check::new("raman_lifetime", AtMost, t_int, raman_bound, mg),
            Check::new("transparency_window", MuchLess, ds, window, mg),
            Check::new("pulse_fits", AtMost, vg_in * t, m.length, mg),
        ],
    }
}

/// Summary numbers of one protocol run.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolMetrics {
    pub initial_norm: f64,
    /// In-medium norm at t_release, t_trap_end and t_final.
    pub in_medium_release: f64,
    pub in_medium_trap_end: f64,
    pub in_medium_final: f64,
    /// N_in(t_trap_end) / N_in(t_release).
    pub trapped_fraction: f64,
    /// Largest centroid excursion from its t_release value over the
    /// trapping-window snapshots (m).
    pub centroid_drift: f64,
    /// Forward-fraction period in stretched time, from 0.5 crossings on the
    /// constant-drive plateau; `None` with fewer than three crossings.
    pub oscillation_period: Option<f64>,
    /// π/χ.
    pub expected_period: f64,
    /// Largest |norm/initial − 1| over all steps.
    pub max_norm_drift: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolResult {
    pub snapshots: Vec<Snapshot>,
    pub trace: Vec<TraceRow>,
    pub final_state: PolaritonState,
    pub warnings: Vec<String>,
    pub metrics: ProtocolMetrics,
}

pub fn run_protocol(scenario: &Scenario) -> Result<ProtocolResult> {
    scenario.validate()?;
    let st = &scenario.stages;
    let len = scenario.medium.length;
    let p = &scenario.pulse;
    let mut state = PolaritonState::gaussian(scenario.grid, p.center, p.rms_width, 0.0, 0.0)?;
    let initial_norm = state.norm();
    let wrap_zone = Some(2.0 * p.rms_width);

    let stages = [
        ("input", 0.0, st.t_store),
        ("storage", st.t_store, st.t_hold),
        ("hold", st.t_hold, st.t_release),
        ("trap", st.t_release, st.t_trap_end),
        ("release", st.t_trap_end, st.t_final),
    ];
    let mut snapshots = Vec::new();
    let mut trace = Vec::new();
    let mut warnings = Vec::new();
    let mut tau = 0.0;
    let mut release_state = None;
    let mut trap_end_state = None;
    let mut trap_snaps = (0, 0);
    for (i, &(name, t0, t1)) in stages.iter().enumerate() {
        let n = scenario.steps_for(t0, t1);
        let opts = EvolveOptions {
            snapshot_stride: scenario.snapshot_stride,
            tau0: tau,
            wrap_zone,
        };
        let traj = evolve(&state, &scenario.schedule, &scenario.medium, t0, t1, (t1 - t0) / n as f64, &opts)
            .map_err(|e| match e {
                Error::NumericalFailure { context } => Error::numerical(format!("stage {name}: {context}")),
                other => other,
            })?;
        warnings.extend(traj.warnings.iter().map(|w| format!("stage {name}: {w}")));
        let skip = usize::from(i > 0);
        if name == "trap" {
            trap_snaps.0 = snapshots.len();
            release_state = Some(state.clone());
        }
        snapshots.extend(traj.snapshots.into_iter().skip(skip));
        if name == "trap" {
            trap_snaps.1 = snapshots.len();
        }
        trace.extend(traj.trace);
        tau = traj.final_tau;
        state = traj.final_state;
        state.time = t1;
        if name == "trap" {
            trap_end_state = Some(state.clone());
        }
    }
    let (release_state, trap_end_state) = release_state.zip(trap_end_state).expect("trap stage ran");

    let in_release = release_state.norm_within(0.0, len);
    let in_trap_end = trap_end_state.norm_within(0.0, len);
    let in_final = state.norm_within(0.0, len);
    let c0 = measure(&release_state, 0.0).centroid;
    let mut drift = (measure(&trap_end_state, 0.0).centroid - c0).abs();
    for s in &snapshots[trap_snaps.0..trap_snaps.1] {
        drift = drift.max((measure(&s.state, 0.0).centroid - c0).abs());
    }
    let plateau = scenario.plateau_start();
    let period = oscillation_period(
        trace
            .iter()
            .filter(|r| r.time > plateau && r.time <= st.t_trap_end)
            .map(|r| (r.tau, r.forward_norm / r.norm)),
    );
    let chi = scenario.trap_coupling();
    let max_norm_drift = trace
        .iter()
        .map(|r| (r.norm / initial_norm - 1.0).abs())
        .fold(0.0, f64::max);

    Ok(ProtocolResult {
        snapshots,
        trace,
        final_state: state,
        warnings,
        metrics: ProtocolMetrics {
            initial_norm,
            in_medium_release: in_release,
            in_medium_trap_end: in_trap_end,
            in_medium_final: in_final,
            trapped_fraction: in_trap_end / in_release,
            centroid_drift: drift,
            oscillation_period: period,
            expected_period: if chi > 0.0 { std::f64::consts::PI / chi } else { f64::INFINITY },
            max_norm_drift,
        },
    })
}

/// Period of f(τ) = ½ + A·cos(2χτ + φ) from its crossings of ½; adjacent
/// crossings are half a period apart.
pub fn oscillation_period(samples: impl IntoIterator<Item = (f64, f64)>) -> Option<f64> {
    let mut crossings = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for (tau, f) in samples {
        if let Some((t0, f0)) = prev {
            let (a, b) = (f0 - 0.5, f - 0.5);
            if a != 0.0 && a.signum() != b.signum() {
                crossings.push(t0 + (tau - t0) * a / (a - b));
            }
        }
        prev = Some((tau, f));
    }
    if crossings.len() < 3 {
        return None;
    }
    let span = crossings.last().unwrap() - crossings[0];
    Some(2.0 * span / (crossings.len() - 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hz_to_angular;

    /// Dense cold-atom cloud, 4 cm, v_g^in = 40 m/s, v_g^0 = 50 m/s.
    fn scenario(delta_s_t: f64, gamma_bc_hz: f64, steps_t: f64) -> Scenario {
        let t = 100e-6;
        let len = 0.04;
        let oc0 = hz_to_angular(5e6);
        // Exact inversions of v_g = c·Ω_c²/(Ω_c² + g²N).
        let g = (oc0 * oc0 * (SPEED_OF_LIGHT - 50.0) / 50.0).sqrt();
        let medium =
            MediumParams::from_wavelength(g, hz_to_angular(6e6), hz_to_angular(gamma_bc_hz), len, 780e-9)
                .unwrap();
        let oc_in = (40.0 * g * g / (SPEED_OF_LIGHT - 40.0)).sqrt();
        let delta = hz_to_angular(1e9);
        let ds = delta_s_t / t;
        let drive = StandardDrive {
            omega_c_in: oc_in,
            omega_c_0: oc0,
            omega_s_0: (ds * delta).sqrt(),
            delta,
            delta_k: 0.0,
            ramp: 0.5 * t,
            shape: RampShape::Smoothstep,
        };
        let stages = StageTimes {
            t_store: t,
            t_hold: 3.0 * t,
            t_release: 4.0 * t,
            t_trap_end: 4.0 * t + steps_t * t,
            t_final: 7.0 * t + steps_t * t,
        };
        let pulse = PulseSpec {
            center: 0.35 * len,
            rms_width: 0.1 * len,
            duration: t,
        };
        let grid = GridSpec::new(-2.5 * len, 3.5 * len, 2048).unwrap();
        Scenario::standard(medium, drive, pulse, stages, grid).unwrap()
    }

    #[test]
    fn default_regime_passes_every_check() {
        let r = validity_report(&scenario(200.0, 1.0, 10.0));
        for c in &r.checks {
            assert_eq!(c.status, CheckStatus::Pass, "{c:?}");
        }
        assert!(r.all_pass());
    }

    #[test]
    fn unbounded_raman_lifetime() {
        let r = validity_report(&scenario(200.0, 0.0, 10.0));
        let c = r.get("raman_lifetime").unwrap();
        assert!(c.bound.is_infinite());
        assert_eq!(c.status, CheckStatus::Pass);
    }

    #[test]
    fn equality_fails_release_condition() {
        let s = scenario(50.0 / 40.0, 1.0, 10.0);
        let c = validity_report(&s).get("release_bandwidth").cloned().unwrap();
        assert!((c.ratio - 1.0).abs() < 1e-9);
        assert_eq!(c.status, CheckStatus::Fail);
    }

    #[test]
    fn velocity_ratio_boosts_release_condition() {
        // v_g^in/v_g^0 = 15 multiplies the ratio by 15 relative to equal
        // velocities.
        let mut s = scenario(200.0, 1.0, 10.0);
        let base = validity_report(&s).get("release_bandwidth").unwrap().ratio;
        let g2 = s.medium.coupling.powi(2);
        let vg0 = group_velocity(s.omega_c_0, &s.medium);
        s.omega_c_in = (15.0 * vg0 * g2 / (SPEED_OF_LIGHT - 15.0 * vg0)).sqrt();
        let boosted = validity_report(&s).get("release_bandwidth").unwrap().ratio;
        let vg_in = group_velocity(s.omega_c_in, &s.medium);
        assert!((vg_in / vg0 - 15.0).abs() < 1e-9);
        assert!((boosted / base - 15.0 / 0.8).abs() < 1e-6);
    }

    #[test]
    fn rejects_bad_release_order_and_early_standing_wave() {
        let s = scenario(200.0, 1.0, 10.0);
        let st = s.stages;
        let late_s = Ramp::new(vec![
            RampSegment::hold(0.0, st.t_release + 1e-5, 0.0),
            RampSegment::new(st.t_release + 1e-5, st.t_release + 6e-5, 0.0, 1e7, RampShape::Linear),
            RampSegment::hold(st.t_release + 6e-5, st.t_final, 1e7),
        ])
        .unwrap();
        let mut bad = s.clone();
        bad.schedule.omega_s = late_s;
        assert!(matches!(bad.validate(), Err(Error::InvalidScenario(_))));

        let mut early = s.clone();
        early.schedule.omega_s = Ramp::constant(1e7);
        assert!(early.validate().is_err());

        let mut outside = s.clone();
        outside.pulse.center = 0.01;
        assert!(outside.validate().is_err());
    }

    #[test]
    fn period_from_synthetic_crossings() {
        let chi = 3.0;
        let samples = (0..2000).map(|i| {
            let tau = i as f64 * 0.01;
            (tau, (chi * tau + 0.2).cos().powi(2))
        });
        let p = oscillation_period(samples).unwrap();
        assert!((p / (std::f64::consts::PI / chi) - 1.0).abs() < 1e-4);
        assert!(oscillation_period([(0.0, 1.0), (1.0, 0.9)]).is_none());
    }

    #[test]
    fn short_trap_run_is_deterministic_and_traps() {
        let s = scenario(200.0, 1.0, 2.0);
        let a = run_protocol(&s).unwrap();
        let b = run_protocol(&s).unwrap();
        assert_eq!(a.metrics, b.metrics);
        assert!(a.metrics.trapped_fraction > 0.9, "{:?}", a.metrics);
        let p = a.metrics.oscillation_period.unwrap();
        assert!((p / a.metrics.expected_period - 1.0).abs() < 0.05);
    }
}
