//! Physical parameters of the atomic ensemble, time-dependent drive
//! schedules and the local linear response of the light-shifted EIT medium.

use num_complex::Complex64;

use crate::{Error, Result, SPEED_OF_LIGHT};

/// Static constants of the atomic ensemble.
///
/// `coupling` is the collective coupling g√N; the individual dipole moment,
/// quantization volume and atom number never appear separately.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MediumParams {
    /// g√N (rad/s).
    pub coupling: f64,
    /// Optical coherence decay rate γ_ab (rad/s).
    pub gamma_ab: f64,
    /// Raman (ground-state) coherence decay rate γ_bc (rad/s).
    pub gamma_bc: f64,
    /// Medium length L (m).
    pub length: f64,
    /// Carrier wavenumber k₀ = ν/c (rad/m).
    pub carrier_wavenumber: f64,
}

impl MediumParams {
    pub fn new(
        coupling: f64,
        gamma_ab: f64,
        gamma_bc: f64,
        length: f64,
        carrier_wavenumber: f64,
    ) -> Result<Self> {
        let params = Self {
            coupling,
            gamma_ab,
            gamma_bc,
            length,
            carrier_wavenumber,
        };
        params.validate()?;
        Ok(params)
    }

    /// Builds the parameters from a vacuum carrier wavelength.
    pub fn from_wavelength(
        coupling: f64,
        gamma_ab: f64,
        gamma_bc: f64,
        length: f64,
        wavelength: f64,
    ) -> Result<Self> {
        if !(wavelength > 0.0 && wavelength.is_finite()) {
            return Err(Error::invalid("wavelength", "must be positive and finite"));
        }
        Self::new(
            coupling,
            gamma_ab,
            gamma_bc,
            length,
            2.0 * std::f64::consts::PI / wavelength,
        )
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.coupling,
            self.gamma_ab,
            self.gamma_bc,
            self.length,
            self.carrier_wavenumber,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(Error::invalid("medium", "all parameters must be finite"));
        }
        if self.coupling <= 0.0 {
            return Err(Error::invalid("coupling", "must be > 0"));
        }
        if self.length <= 0.0 {
            return Err(Error::invalid("length", "must be > 0"));
        }
        if self.carrier_wavenumber <= 0.0 {
            return Err(Error::invalid("carrier_wavenumber", "must be > 0"));
        }
        if self.gamma_bc < 0.0 {
            return Err(Error::invalid("gamma_bc", "must be >= 0"));
        }
        if self.gamma_ab < self.gamma_bc {
            return Err(Error::invalid("gamma_ab", "must be >= gamma_bc"));
        }
        Ok(())
    }

    /// Carrier angular frequency ν = k₀c (rad/s).
    pub fn carrier_frequency(&self) -> f64 {
        self.carrier_wavenumber * SPEED_OF_LIGHT
    }

    /// Same medium with both decay rates set to zero.
    pub fn lossless(&self) -> Self {
        Self {
            gamma_ab: 0.0,
            gamma_bc: 0.0,
            ..*self
        }
    }

    /// Control Rabi frequency giving group index c/v_g = `group_index`.
    ///
    /// Inverts v_g = c/(1 + g²N/Ω_c²); requires `group_index > 1`.
    pub fn control_for_group_index(&self, group_index: f64) -> Result<f64> {
        if !(group_index > 1.0) {
            return Err(Error::invalid("group_index", "must be > 1"));
        }
        Ok(self.coupling / (group_index - 1.0).sqrt())
    }
}

/// Time profile of one ramp segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RampShape {
    Hold,
    Linear,
    /// 3s² − 2s³ in normalized segment time; zero slope at both ends.
    Smoothstep,
}

impl Default for RampShape {
    fn default() -> Self {
        RampShape::Smoothstep
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RampSegment {
    pub t_start: f64,
    pub t_end: f64,
    pub v_start: f64,
    pub v_end: f64,
    pub shape: RampShape,
}

impl RampSegment {
    pub fn new(t_start: f64, t_end: f64, v_start: f64, v_end: f64, shape: RampShape) -> Self {
        Self {
            t_start,
            t_end,
            v_start,
            v_end,
            shape,
        }
    }

    pub fn hold(t_start: f64, t_end: f64, value: f64) -> Self {
        Self::new(t_start, t_end, value, value, RampShape::Hold)
    }

    fn eval(&self, t: f64) -> f64 {
        let s = ((t - self.t_start) / (self.t_end - self.t_start)).clamp(0.0, 1.0);
        let w = match self.shape {
            RampShape::Hold => 0.0,
            RampShape::Linear => s,
            RampShape::Smoothstep => s * s * (3.0 - 2.0 * s),
        };
        self.v_start + (self.v_end - self.v_start) * w
    }
}

/// Piecewise time function made of contiguous [`RampSegment`]s.
///
/// Outside the covered span the function is extended by its boundary
/// values, so a schedule is defined for every t.
#[derive(Debug, Clone, PartialEq)]
pub struct Ramp {
    segments: Vec<RampSegment>,
}

impl Ramp {
    /// Validates contiguity, continuity and non-negativity.
    pub fn new(segments: Vec<RampSegment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::invalid("ramp", "needs at least one segment"));
        }
        for (i, seg) in segments.iter().enumerate() {
            let vals = [seg.t_start, seg.t_end, seg.v_start, seg.v_end];
            if !vals.iter().all(|v| v.is_finite()) {
                return Err(Error::invalid("ramp", format!("segment {i} is not finite")));
            }
            if seg.t_start >= seg.t_end {
                return Err(Error::invalid("ramp", format!("segment {i} has t_start >= t_end")));
            }
            if seg.v_start < 0.0 || seg.v_end < 0.0 {
                return Err(Error::invalid("ramp", format!("segment {i} has a negative value")));
            }
            if seg.shape == RampShape::Hold && seg.v_start != seg.v_end {
                return Err(Error::invalid(
                    "ramp",
                    format!("hold segment {i} must have v_start == v_end"),
                ));
            }
        }
        for (i, pair) in segments.windows(2).enumerate() {
            let (a, b) = (&pair[0], &pair[1]);
            let scale = a.t_end.abs().max(b.t_start.abs()).max(f64::MIN_POSITIVE);
            if (a.t_end - b.t_start).abs() > 1e-12 * scale {
                return Err(Error::invalid(
                    "ramp",
                    format!("gap or overlap between segments {i} and {}", i + 1),
                ));
            }
            let vscale = a.v_end.abs().max(b.v_start.abs()).max(1.0);
            if (a.v_end - b.v_start).abs() > 1e-12 * vscale {
                return Err(Error::invalid(
                    "ramp",
                    format!("discontinuous value between segments {i} and {}", i + 1),
                ));
            }
        }
        Ok(Self { segments })
    }

    /// A ramp with the same value at all times.
    pub fn constant(value: f64) -> Self {
        Self {
            segments: vec![RampSegment::hold(0.0, 1.0, value.max(0.0))],
        }
    }

    pub fn segments(&self) -> &[RampSegment] {
        &self.segments
    }

    pub fn eval(&self, t: f64) -> f64 {
        let first = &self.segments[0];
        if t <= first.t_start {
            return first.v_start;
        }
        // Segments are few; a linear scan beats anything cleverer here.
        for seg in &self.segments {
            if t <= seg.t_end {
                return seg.eval(t);
            }
        }
        self.segments.last().map(|s| s.v_end).unwrap_or(0.0)
    }

    /// Segment boundaries in increasing order.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut pts = Vec::with_capacity(self.segments.len() + 1);
        pts.push(self.segments[0].t_start);
        pts.extend(self.segments.iter().map(|s| s.t_end));
        pts
    }

    /// Largest value reached on [t0, t1].
    pub fn max_on(&self, t0: f64, t1: f64) -> f64 {
        // Every shape is monotone within a segment, so endpoints and
        // interior breakpoints are enough.
        let mut best = self.eval(t0).max(self.eval(t1));
        for t in self.breakpoints() {
            if t > t0 && t < t1 {
                best = best.max(self.eval(t));
            }
        }
        best
    }

    /// Earliest time ≥ `after` at which the ramp leaves zero, if any.
    pub fn onset_after(&self, after: f64) -> Option<f64> {
        if self.eval(after) > 0.0 {
            return Some(after);
        }
        for seg in &self.segments {
            if seg.t_end <= after {
                continue;
            }
            if seg.v_start > 0.0 || seg.v_end > 0.0 {
                return Some(seg.t_start.max(after));
            }
        }
        None
    }
}

/// Time-dependent classical drives: the control field Ω_c(t) and the
/// single-beam standing-wave amplitude Ω_s(t).
#[derive(Debug, Clone, PartialEq)]
pub struct DriveSchedule {
    pub omega_c: Ramp,
    pub omega_s: Ramp,
    /// Standing-wave detuning Δ (rad/s, nonzero).
    pub delta: f64,
    /// Standing-wave wavenumber k_s (rad/m).
    pub k_s: f64,
    /// Phase mismatch Δk = k_s − k₀ (rad/m).
    pub delta_k: f64,
}

impl DriveSchedule {
    pub fn new(
        medium: &MediumParams,
        omega_c: Ramp,
        omega_s: Ramp,
        delta: f64,
        delta_k: f64,
    ) -> Result<Self> {
        if delta == 0.0 {
            return Err(Error::ZeroDetuning);
        }
        if !delta.is_finite() || !delta_k.is_finite() {
            return Err(Error::invalid("delta", "must be finite"));
        }
        let k_s = medium.carrier_wavenumber + delta_k;
        if k_s <= 0.0 {
            return Err(Error::invalid("delta_k", "standing-wave wavenumber must stay positive"));
        }
        Ok(Self {
            omega_c,
            omega_s,
            delta,
            k_s,
            delta_k,
        })
    }

    /// Light-shift amplitude Δ_s(t) = Ω_s(t)²/Δ.
    pub fn light_shift_at(&self, t: f64) -> f64 {
        let om = self.omega_s.eval(t);
        om * om / self.delta
    }

    /// All ramp breakpoints of both drives, sorted and deduplicated.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut pts = self.omega_c.breakpoints();
        pts.extend(self.omega_s.breakpoints());
        pts.sort_by(|a, b| a.total_cmp(b));
        pts.dedup();
        pts
    }
}

/// Δ_s = Ω_s²/Δ, signed like Δ.
pub fn light_shift_amplitude(omega_s: f64, delta: f64) -> Result<f64> {
    if delta == 0.0 {
        return Err(Error::ZeroDetuning);
    }
    Ok(omega_s * omega_s / delta)
}

/// Local light shift 4·Ω_s(t)²·cos²(k_s z)/Δ of the standing wave
/// 2Ω_s cos(k_s z).
pub fn spatial_light_shift(z: f64, t: f64, schedule: &DriveSchedule) -> Result<f64> {
    let amp = light_shift_amplitude(schedule.omega_s.eval(t), schedule.delta)?;
    let c = (schedule.k_s * z).cos();
    Ok(4.0 * amp * c * c)
}

/// v_g = c/(1 + g²N/Ω_c²). Returns 0 for Ω_c = 0.
pub fn group_velocity(omega_c: f64, medium: &MediumParams) -> f64 {
    let oc2 = omega_c * omega_c;
    let g2 = medium.coupling * medium.coupling;
    SPEED_OF_LIGHT * oc2 / (oc2 + g2)
}

/// Mixing angle θ with tan²θ = g²N/Ω_c², in [0, π/2].
pub fn mixing_angle(omega_c: f64, medium: &MediumParams) -> f64 {
    medium.coupling.atan2(omega_c.max(0.0))
}

/// Complex offset of the local wavenumber from its vacuum value,
/// (g²N/c)·(ω₂ + iγ_bc)/(Ω_c² − (ω₂ + iγ_bc)(ω + iγ_ab)) with the
/// two-photon detuning ω₂ = ω − `shift`.
///
/// `omega` is the probe detuning from the bare one-photon resonance.
pub fn wavenumber_shift(omega: f64, shift: f64, omega_c: f64, medium: &MediumParams) -> Complex64 {
    let g2_over_c = medium.coupling * medium.coupling / SPEED_OF_LIGHT;
    let one_photon = Complex64::new(omega, medium.gamma_ab);
    if omega_c == 0.0 {
        // Two-level limit; also avoids 0/0 at ω₂ = 0 with γ_bc = 0.
        return -g2_over_c / one_photon;
    }
    let two_photon = Complex64::new(omega - shift, medium.gamma_bc);
    g2_over_c * two_photon / (omega_c * omega_c - two_photon * one_photon)
}

/// Susceptibility-like response χ, defined through the local index
/// n = 1 + χ/2, i.e. k = (k₀ + ω/c)(1 + χ/2).
pub fn eit_response(omega: f64, shift: f64, omega_c: f64, medium: &MediumParams) -> Complex64 {
    let k_vac = medium.carrier_wavenumber + omega / SPEED_OF_LIGHT;
    2.0 * wavenumber_shift(omega, shift, omega_c, medium) / k_vac
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hz_to_angular;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn fig2_medium() -> MediumParams {
        MediumParams::from_wavelength(
            hz_to_angular(400e6),
            hz_to_angular(10e6),
            hz_to_angular(1e3),
            0.04,
            780e-9,
        )
        .unwrap()
    }

    fn schedule(omega_s: f64, delta: f64) -> DriveSchedule {
        let m = fig2_medium();
        DriveSchedule::new(&m, Ramp::constant(1e7), Ramp::constant(omega_s), delta, 0.0).unwrap()
    }

    #[test]
    fn light_shift_examples() {
        assert_eq!(light_shift_amplitude(0.0, 3.0).unwrap(), 0.0);
        assert_relative_eq!(light_shift_amplitude(2e6, 1e7).unwrap(), 4e5, max_relative = 1e-15);
        assert_eq!(light_shift_amplitude(1.0, 0.0), Err(Error::ZeroDetuning));
        // Sign follows the detuning.
        assert!(light_shift_amplitude(2e6, -1e7).unwrap() < 0.0);
        // 20 MHz single-beam Rabi frequency at 1 GHz detuning is a 400 kHz shift.
        let ds = light_shift_amplitude(hz_to_angular(20e6), hz_to_angular(1e9)).unwrap();
        assert_relative_eq!(ds, hz_to_angular(400e3), max_relative = 1e-12);
    }

    #[test]
    fn spatial_light_shift_profile() {
        let s = schedule(2e6, 1e7);
        let amp = 4e5;
        let node = PI / (2.0 * s.k_s);
        assert!(spatial_light_shift(node, 0.0, &s).unwrap().abs() < 1e-6 * amp);
        assert_relative_eq!(spatial_light_shift(0.0, 0.0, &s).unwrap(), 4.0 * amp, max_relative = 1e-15);

        let period = PI / s.k_s;
        let n = 1000;
        let mean: f64 = (0..n)
            .map(|i| spatial_light_shift((i as f64 + 0.5) * period / n as f64, 0.0, &s).unwrap())
            .sum::<f64>()
            / n as f64;
        assert_relative_eq!(mean, 2.0 * amp, max_relative = 1e-12);
    }

    #[test]
    fn spatial_light_shift_is_periodic() {
        let s = schedule(3e6, -2e7);
        let period = PI / s.k_s;
        for i in 0..50 {
            let z = i as f64 * 1.37e-8;
            let a = spatial_light_shift(z, 0.0, &s).unwrap();
            let b = spatial_light_shift(z + period, 0.0, &s).unwrap();
            assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
        }
    }

    #[test]
    fn group_velocity_examples() {
        let m = fig2_medium();
        assert_relative_eq!(group_velocity(m.coupling, &m), SPEED_OF_LIGHT / 2.0, max_relative = 1e-15);
        assert_eq!(group_velocity(0.0, &m), 0.0);
        let oc = m.control_for_group_index(1000.0).unwrap();
        assert_relative_eq!(oc, m.coupling / 999f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(SPEED_OF_LIGHT / group_velocity(oc, &m), 1000.0, max_relative = 1e-12);
        let fast = group_velocity(1e6 * m.coupling, &m) / SPEED_OF_LIGHT;
        assert!((1.0 - fast).abs() < 1e-11);
    }

    #[test]
    fn mixing_angle_examples() {
        let m = fig2_medium();
        assert_relative_eq!(mixing_angle(m.coupling, &m), PI / 4.0, max_relative = 1e-15);
        assert_eq!(mixing_angle(0.0, &m), PI / 2.0);
        let oc = m.control_for_group_index(1000.0).unwrap();
        let th = mixing_angle(oc, &m);
        assert_relative_eq!(th.cos().powi(2), 1e-3, max_relative = 1e-12);
    }

    #[test]
    fn velocity_and_angle_are_consistent() {
        let m = fig2_medium();
        // Below Ω_c ≈ 1e-3·g√N the representation error of θ itself
        // (one ulp of π/2 over cosθ) exceeds the tolerance.
        for oc in [1e7, 3.3e7, m.coupling, 1e12] {
            let th = mixing_angle(oc, &m);
            let vg = group_velocity(oc, &m);
            assert_relative_eq!(vg * (1.0 + th.tan().powi(2)), SPEED_OF_LIGHT, max_relative = 1e-12);
            assert_relative_eq!(th.cos().powi(2), vg / SPEED_OF_LIGHT, max_relative = 1e-12);
        }
    }

    #[test]
    fn transparent_at_two_photon_resonance() {
        let m = MediumParams { gamma_bc: 0.0, ..fig2_medium() };
        let shift = 1.3e6;
        let chi = eit_response(shift, shift, 5e7, &m);
        assert_eq!(chi, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn slope_matches_group_index() {
        // Central finite difference of the lossless response around ω = 0.
        let m = fig2_medium().lossless();
        let oc = m.control_for_group_index(1000.0).unwrap();
        let h = 1e3;
        let slope = (wavenumber_shift(h, 0.0, oc, &m) - wavenumber_shift(-h, 0.0, oc, &m)).re / (2.0 * h);
        let expected = (SPEED_OF_LIGHT / group_velocity(oc, &m) - 1.0) / SPEED_OF_LIGHT;
        assert_relative_eq!(slope, expected, max_relative = 1e-9);
    }

    #[test]
    fn two_level_limit_absorbs_at_line_center() {
        let m = fig2_medium();
        let dk = wavenumber_shift(0.0, 0.0, 0.0, &m);
        assert!(dk.im > 0.0);
        let expected = -(m.coupling * m.coupling / SPEED_OF_LIGHT) / Complex64::new(0.0, m.gamma_ab);
        assert_relative_eq!(dk.im, expected.im, max_relative = 1e-14);
    }

    #[test]
    fn response_is_passive() {
        let m = fig2_medium();
        let oc = m.control_for_group_index(1000.0).unwrap();
        for i in -2000..=2000 {
            let w = i as f64 * hz_to_angular(50e3);
            for shift in [0.0, hz_to_angular(1.6e6)] {
                assert!(eit_response(w, shift, oc, &m).im >= 0.0, "w={w}");
            }
        }
        for i in -200..=200 {
            let w = i as f64 * hz_to_angular(5e6);
            assert!(eit_response(w, 0.0, oc, &m).im >= 0.0);
        }
    }

    #[test]
    fn lossless_response_is_real_and_odd() {
        let m = fig2_medium().lossless();
        let oc = m.control_for_group_index(1000.0).unwrap();
        for i in 1..200 {
            let w = i as f64 * 1e4;
            let p = wavenumber_shift(w, 0.0, oc, &m);
            let n = wavenumber_shift(-w, 0.0, oc, &m);
            assert_eq!(p.im, 0.0);
            assert_relative_eq!(p.re, -n.re, max_relative = 1e-14);
        }
    }

    #[test]
    fn ramp_evaluation_and_validation() {
        let r = Ramp::new(vec![
            RampSegment::hold(0.0, 1.0, 2.0),
            RampSegment::new(1.0, 3.0, 2.0, 0.0, RampShape::Smoothstep),
            RampSegment::new(3.0, 4.0, 0.0, 1.0, RampShape::Linear),
        ])
        .unwrap();
        assert_eq!(r.eval(-5.0), 2.0);
        assert_eq!(r.eval(0.5), 2.0);
        assert_relative_eq!(r.eval(2.0), 1.0, max_relative = 1e-15);
        assert_relative_eq!(r.eval(3.5), 0.5, max_relative = 1e-15);
        assert_eq!(r.eval(10.0), 1.0);
        assert_eq!(r.breakpoints(), vec![0.0, 1.0, 3.0, 4.0]);
        assert_eq!(r.onset_after(1.5), Some(1.5));
        assert_eq!(r.onset_after(3.0), Some(3.0));
        assert_eq!(r.max_on(2.5, 3.5), r.eval(3.5));
        assert_eq!(r.max_on(0.5, 2.5), 2.0);

        assert!(Ramp::new(vec![]).is_err());
        assert!(Ramp::new(vec![RampSegment::new(0.0, 1.0, 1.0, 2.0, RampShape::Hold)]).is_err());
        assert!(Ramp::new(vec![RampSegment::hold(1.0, 1.0, 0.0)]).is_err());
        assert!(Ramp::new(vec![RampSegment::hold(0.0, 1.0, -1.0)]).is_err());
        // Gap between segments.
        assert!(Ramp::new(vec![RampSegment::hold(0.0, 1.0, 1.0), RampSegment::hold(1.5, 2.0, 1.0)]).is_err());
        // Jump in value.
        assert!(Ramp::new(vec![RampSegment::hold(0.0, 1.0, 1.0), RampSegment::hold(1.0, 2.0, 3.0)]).is_err());
    }

    #[test]
    fn smoothstep_is_continuous_across_segments() {
        let r = Ramp::new(vec![
            RampSegment::new(0.0, 1.0, 0.0, 5.0, RampShape::Smoothstep),
            RampSegment::new(1.0, 2.0, 5.0, 1.0, RampShape::Smoothstep),
        ])
        .unwrap();
        let eps = 1e-9;
        assert!((r.eval(1.0 - eps) - r.eval(1.0 + eps)).abs() < 1e-6);
    }

    #[test]
    fn medium_validation() {
        assert!(MediumParams::new(0.0, 1.0, 0.0, 1.0, 1.0).is_err());
        assert!(MediumParams::new(1.0, 1.0, 2.0, 1.0, 1.0).is_err());
        assert!(MediumParams::new(1.0, 1.0, 0.0, -1.0, 1.0).is_err());
        assert!(MediumParams::new(1.0, 1.0, 0.0, 1.0, 0.0).is_err());
        let m = fig2_medium();
        assert_relative_eq!(m.carrier_frequency(), m.carrier_wavenumber * SPEED_OF_LIGHT);
        assert!(DriveSchedule::new(&m, Ramp::constant(1.0), Ramp::constant(1.0), 0.0, 0.0).is_err());
    }
}
