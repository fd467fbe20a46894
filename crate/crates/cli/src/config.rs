//! TOML configuration. Frequencies are entered in Hz and converted to rad/s
//! here; lengths are in metres and times in seconds.

use std::path::Path;

use eitgap::protocol::{Margins, PulseSpec, StageTimes, StandardDrive};
use eitgap::{
    hz_to_angular, DriveSchedule, GridSpec, MediumParams, ModulatedMedium, Ramp, RampSegment, RampShape,
    Scenario, StaticDrive, SPEED_OF_LIGHT,
};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub medium: Option<MediumConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub drive: Option<DriveConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<SpectrumConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pulse: Option<PulseConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub evolve: Option<EvolveConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario: Option<ScenarioConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MediumConfig {
    /// Collective coupling g√N (Hz).
    pub coupling_hz: f64,
    pub gamma_ab_hz: f64,
    pub gamma_bc_hz: f64,
    pub length_m: f64,
    /// Probe carrier wavelength (m).
    pub wavelength_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveConfig {
    /// Standing-wave detuning Δ (Hz); must be nonzero.
    pub delta_hz: f64,
    /// Wavevector mismatch Δk (rad/m).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_k_per_m: Option<f64>,
    /// Constant control Rabi frequency (Hz). Alternative: `group_index`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub control_hz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group_index: Option<f64>,
    /// Constant single-beam standing-wave Rabi frequency (Hz). Alternative:
    /// `light_shift_hz`, the amplitude Ω_s²/Δ.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub standing_hz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub light_shift_hz: Option<f64>,
    /// Piecewise control schedule for `evolve`; overrides the constant.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub control_ramp: Option<Vec<RampConfig>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub standing_ramp: Option<Vec<RampConfig>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShapeConfig {
    Hold,
    Linear,
    Smoothstep,
}

impl From<ShapeConfig> for RampShape {
    fn from(s: ShapeConfig) -> Self {
        match s {
            ShapeConfig::Hold => RampShape::Hold,
            ShapeConfig::Linear => RampShape::Linear,
            ShapeConfig::Smoothstep => RampShape::Smoothstep,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RampConfig {
    pub t_start_s: f64,
    pub t_end_s: f64,
    pub start_hz: f64,
    pub end_hz: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shape: Option<ShapeConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumConfig {
    /// Probe detuning range from the light-shifted resonance (Hz).
    pub detuning_min_hz: f64,
    pub detuning_max_hz: f64,
    pub points: usize,
    /// Slabs per modulation period.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slabs: Option<usize>,
    /// Overrides the period count floor(L/a).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub periods: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub z_min_m: f64,
    pub z_max_m: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseConfig {
    pub center_m: f64,
    pub rms_width_m: f64,
    pub duration_s: f64,
    /// Carrier offset of the envelope (rad/m).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wavenumber_per_m: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveConfig {
    pub t_start_s: f64,
    pub t_end_s: f64,
    pub dt_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub t_store_s: f64,
    pub t_hold_s: f64,
    pub t_release_s: f64,
    pub t_trap_end_s: f64,
    pub t_final_s: f64,
    pub ramp_s: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ramp_shape: Option<ShapeConfig>,
    /// Input-stage control (Hz). Alternative: `group_velocity_in_m_s`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub control_in_hz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group_velocity_in_m_s: Option<f64>,
    /// Release-stage control (Hz). Alternative: `group_velocity_release_m_s`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub control_release_hz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group_velocity_release_m_s: Option<f64>,
    /// Trapping standing wave (Hz). Alternative: `light_shift_hz`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub standing_hz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub light_shift_hz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt_max_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub margin_much_greater: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub margin_much_less: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Output directory, relative to the working directory.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snapshot_stride: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub svg: Option<bool>,
    /// Write the binary trajectory dump.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub binary: Option<bool>,
    /// Write the per-grid-point trajectory CSV.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trajectory_csv: Option<bool>,
}

fn block<'a, T>(b: &'a Option<T>, name: &str) -> CliResult<&'a T> {
    b.as_ref().ok_or_else(|| CliError::Config(format!("missing required block [{name}]")))
}

fn finite(key: &str, v: f64) -> CliResult<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Config(format!("`{key}` must be finite")))
    }
}

fn positive(key: &str, v: f64) -> CliResult<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(CliError::Config(format!("`{key}` must be a positive number, got {v}")))
    }
}

fn non_negative(key: &str, v: f64) -> CliResult<f64> {
    if v.is_finite() && v >= 0.0 {
        Ok(v)
    } else {
        Err(CliError::Config(format!("`{key}` must be >= 0, got {v}")))
    }
}

/// Exactly one of two alternative keys.
fn one_of(a: (&str, Option<f64>), b: (&str, Option<f64>)) -> CliResult<Result<f64, f64>> {
    match (a.1, b.1) {
        (Some(x), None) => Ok(Ok(x)),
        (None, Some(y)) => Ok(Err(y)),
        (None, None) => Err(CliError::Config(format!("missing key `{}` (or `{}`)", a.0, b.0))),
        (Some(_), Some(_)) => Err(CliError::Config(format!("`{}` and `{}` are mutually exclusive", a.0, b.0))),
    }
}

impl Config {
    pub fn parse(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always representable as TOML")
    }

    pub fn output(&self) -> OutputConfig {
        self.output.clone().unwrap_or_default()
    }

    pub fn medium_params(&self) -> CliResult<MediumParams> {
        let m = block(&self.medium, "medium")?;
        let p = MediumParams::from_wavelength(
            hz_to_angular(positive("medium.coupling_hz", m.coupling_hz)?),
            hz_to_angular(non_negative("medium.gamma_ab_hz", m.gamma_ab_hz)?),
            hz_to_angular(non_negative("medium.gamma_bc_hz", m.gamma_bc_hz)?),
            positive("medium.length_m", m.length_m)?,
            positive("medium.wavelength_m", m.wavelength_m)?,
        )
        .map_err(|e| CliError::from_core("medium", e))?;
        Ok(p)
    }

    fn drive_block(&self) -> CliResult<&DriveConfig> {
        block(&self.drive, "drive")
    }

    /// Δ (rad/s) and Δk (rad/m).
    pub fn detuning(&self) -> CliResult<(f64, f64)> {
        let d = self.drive_block()?;
        let delta = finite("drive.delta_hz", d.delta_hz)?;
        if delta == 0.0 {
            return Err(CliError::Config("`drive.delta_hz` must be nonzero".into()));
        }
        let dk = finite("drive.delta_k_per_m", d.delta_k_per_m.unwrap_or(0.0))?;
        Ok((hz_to_angular(delta), dk))
    }

    /// Static control and standing-wave amplitudes (rad/s).
    fn static_amplitudes(&self, m: &MediumParams, delta: f64) -> CliResult<(f64, f64)> {
        let d = self.drive_block()?;
        let oc = match one_of(("drive.control_hz", d.control_hz), ("drive.group_index", d.group_index))? {
            Ok(hz) => hz_to_angular(positive("drive.control_hz", hz)?),
            Err(n) => m
                .control_for_group_index(finite("drive.group_index", n)?)
                .map_err(|e| CliError::from_core("drive", e))?,
        };
        let os = standing_amplitude(
            ("drive.standing_hz", d.standing_hz),
            ("drive.light_shift_hz", d.light_shift_hz),
            delta,
        )?;
        Ok((oc, os))
    }

    pub fn modulated_medium(&self) -> CliResult<ModulatedMedium> {
        let m = self.medium_params()?;
        let (delta, delta_k) = self.detuning()?;
        let (omega_c, omega_s) = self.static_amplitudes(&m, delta)?;
        ModulatedMedium::new(
            m,
            StaticDrive {
                omega_c,
                omega_s,
                delta,
                delta_k,
            },
        )
        .map_err(|e| CliError::from_core("drive", e))
    }

    /// Probe detunings (rad/s) of the `[spectrum]` block.
    pub fn spectrum_grid(&self) -> CliResult<Vec<f64>> {
        let s = block(&self.spectrum, "spectrum")?;
        let lo = finite("spectrum.detuning_min_hz", s.detuning_min_hz)?;
        let hi = finite("spectrum.detuning_max_hz", s.detuning_max_hz)?;
        if !(hi > lo) {
            return Err(CliError::Config(
                "`spectrum.detuning_max_hz` must exceed `spectrum.detuning_min_hz`".into(),
            ));
        }
        if s.points < 2 {
            return Err(CliError::Config("`spectrum.points` must be at least 2".into()));
        }
        let n = s.points;
        Ok((0..n)
            .map(|i| hz_to_angular(lo + (hi - lo) * i as f64 / (n - 1) as f64))
            .collect())
    }

    pub fn slabs(&self) -> usize {
        self.spectrum
            .as_ref()
            .and_then(|s| s.slabs)
            .unwrap_or(eitgap::bandstructure::DEFAULT_SLABS)
    }

    pub fn periods(&self) -> Option<u64> {
        self.spectrum.as_ref().and_then(|s| s.periods)
    }

    pub fn grid(&self) -> CliResult<GridSpec> {
        let g = block(&self.grid, "grid")?;
        GridSpec::new(
            finite("grid.z_min_m", g.z_min_m)?,
            finite("grid.z_max_m", g.z_max_m)?,
            g.points,
        )
        .map_err(|e| CliError::from_core("grid", e))
    }

    pub fn pulse(&self) -> CliResult<(PulseSpec, f64)> {
        let p = block(&self.pulse, "pulse")?;
        let spec = PulseSpec {
            center: finite("pulse.center_m", p.center_m)?,
            rms_width: positive("pulse.rms_width_m", p.rms_width_m)?,
            duration: positive("pulse.duration_s", p.duration_s)?,
        };
        let k0 = finite("pulse.wavenumber_per_m", p.wavenumber_per_m.unwrap_or(0.0))?;
        Ok((spec, k0))
    }

    /// Drive schedule for `evolve`: ramps if given, constants otherwise.
    pub fn schedule(&self, m: &MediumParams) -> CliResult<DriveSchedule> {
        let (delta, delta_k) = self.detuning()?;
        let d = self.drive_block()?;
        let omega_c = match &d.control_ramp {
            Some(r) => ramp("drive.control_ramp", r)?,
            None => Ramp::constant(self.static_amplitudes(m, delta)?.0),
        };
        let omega_s = match &d.standing_ramp {
            Some(r) => ramp("drive.standing_ramp", r)?,
            None => Ramp::constant(standing_amplitude(
                ("drive.standing_hz", d.standing_hz),
                ("drive.light_shift_hz", d.light_shift_hz),
                delta,
            )?),
        };
        DriveSchedule::new(m, omega_c, omega_s, delta, delta_k).map_err(|e| CliError::from_core("drive", e))
    }

    pub fn evolve_window(&self) -> CliResult<(f64, f64, f64)> {
        let e = block(&self.evolve, "evolve")?;
        let t0 = finite("evolve.t_start_s", e.t_start_s)?;
        let t1 = finite("evolve.t_end_s", e.t_end_s)?;
        if !(t1 > t0) {
            return Err(CliError::Config("`evolve.t_end_s` must exceed `evolve.t_start_s`".into()));
        }
        Ok((t0, t1, positive("evolve.dt_s", e.dt_s)?))
    }

    pub fn scenario(&self) -> CliResult<Scenario> {
        let s = block(&self.scenario, "scenario")?;
        let m = self.medium_params()?;
        let (delta, delta_k) = self.detuning()?;
        let (pulse, _) = self.pulse()?;
        let control = |a: (&str, Option<f64>), b: (&str, Option<f64>)| -> CliResult<f64> {
            Ok(match one_of(a, b)? {
                Ok(hz) => hz_to_angular(positive(a.0, hz)?),
                Err(v) => {
                    let v = positive(b.0, v)?;
                    if v >= SPEED_OF_LIGHT {
                        return Err(CliError::Config(format!("`{}` must be below c", b.0)));
                    }
                    m.control_for_group_index(SPEED_OF_LIGHT / v)
                        .map_err(|e| CliError::from_core("scenario", e))?
                }
            })
        };
        let drive = StandardDrive {
            omega_c_in: control(
                ("scenario.control_in_hz", s.control_in_hz),
                ("scenario.group_velocity_in_m_s", s.group_velocity_in_m_s),
            )?,
            omega_c_0: control(
                ("scenario.control_release_hz", s.control_release_hz),
                ("scenario.group_velocity_release_m_s", s.group_velocity_release_m_s),
            )?,
            omega_s_0: standing_amplitude(
                ("scenario.standing_hz", s.standing_hz),
                ("scenario.light_shift_hz", s.light_shift_hz),
                delta,
            )?,
            delta,
            delta_k,
            ramp: positive("scenario.ramp_s", s.ramp_s)?,
            shape: s.ramp_shape.map(RampShape::from).unwrap_or_default(),
        };
        let stages = StageTimes {
            t_store: finite("scenario.t_store_s", s.t_store_s)?,
            t_hold: finite("scenario.t_hold_s", s.t_hold_s)?,
            t_release: finite("scenario.t_release_s", s.t_release_s)?,
            t_trap_end: finite("scenario.t_trap_end_s", s.t_trap_end_s)?,
            t_final: finite("scenario.t_final_s", s.t_final_s)?,
        };
        let mut sc = Scenario::standard(m, drive, pulse, stages, self.grid()?)
            .map_err(|e| CliError::from_core("scenario", e))?;
        if let Some(dt) = s.dt_max_s {
            sc.dt_max = Some(positive("scenario.dt_max_s", dt)?);
        }
        let d = Margins::default();
        sc.margins = Margins {
            much_greater: positive(
                "scenario.margin_much_greater",
                s.margin_much_greater.unwrap_or(d.much_greater),
            )?,
            much_less: positive("scenario.margin_much_less", s.margin_much_less.unwrap_or(d.much_less))?,
        };
        sc.snapshot_stride = self.output().snapshot_stride.unwrap_or(0);
        Ok(sc)
    }
}

/// Ω_s from either its Rabi frequency or its light-shift amplitude Ω_s²/Δ.
fn standing_amplitude(a: (&str, Option<f64>), b: (&str, Option<f64>), delta: f64) -> CliResult<f64> {
    Ok(match one_of(a, b)? {
        Ok(hz) => hz_to_angular(non_negative(a.0, hz)?),
        Err(shift_hz) => {
            let ds = hz_to_angular(finite(b.0, shift_hz)?);
            if ds != 0.0 && ds.signum() != delta.signum() {
                return Err(CliError::Config(format!(
                    "`{}` must have the sign of `drive.delta_hz`",
                    b.0
                )));
            }
            (ds * delta).sqrt()
        }
    })
}

fn ramp(key: &str, segs: &[RampConfig]) -> CliResult<Ramp> {
    if segs.is_empty() {
        return Err(CliError::Config(format!("`{key}` needs at least one segment")));
    }
    let out = segs
        .iter()
        .map(|s| {
            Ok(RampSegment::new(
                finite(key, s.t_start_s)?,
                finite(key, s.t_end_s)?,
                hz_to_angular(non_negative(key, s.start_hz)?),
                hz_to_angular(non_negative(key, s.end_hz)?),
                s.shape.map(RampShape::from).unwrap_or_default(),
            ))
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ramp::new(out).map_err(|e| CliError::Config(format!("`{key}`: {e}")))
}
