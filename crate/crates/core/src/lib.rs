//! Light propagation in an EIT medium whose two-photon resonance is
//! periodically light-shifted by an off-resonant standing wave.
//!
//! The crate covers two regimes:
//!
//! * static: the complex Bloch wavevector of the modulated medium
//!   ([`bandstructure`]) and the reflection spectrum of a finite sample
//!   ([`reflection`]);
//! * dynamic: forward/backward dark-state polaritons under time-dependent
//!   control and standing-wave fields ([`dynamics`]), and the
//!   store / release / trap scenario built on top of it ([`protocol`]).
//!
//! All internal frequencies are angular (rad/s), lengths in metres and
//! times in seconds.

pub mod bandstructure;
mod error;
pub mod medium;
pub mod protocol;
pub mod quad;
pub mod reflection;
pub mod smatrix;

pub mod dynamics;

pub use num_complex::Complex64;

pub use bandstructure::{BandEdges, BandPoint, ModulatedMedium, PeriodCell, StaticDrive};
pub use dynamics::{FieldView, GridSpec, PolaritonState, Trajectory};
pub use error::{Error, Result};
pub use medium::{DriveSchedule, MediumParams, Ramp, RampSegment, RampShape};
pub use protocol::{CheckKind, CheckStatus, ProtocolResult, Scenario, ValidityReport};
pub use reflection::{Sample, SpectrumPoint};

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Converts an ordinary frequency in Hz to angular frequency in rad/s.
#[inline]
pub fn hz_to_angular(hz: f64) -> f64 {
    2.0 * std::f64::consts::PI * hz
}

/// Inverse of [`hz_to_angular`].
#[inline]
pub fn angular_to_hz(rad_per_s: f64) -> f64 {
    rad_per_s / (2.0 * std::f64::consts::PI)
}
