//! Forward/backward dark-state polaritons under time-dependent drives.
//!
//! In real time the envelopes obey
//!
//! ```text
//! ∂ₜΨ± = ∓v_g ∂_zΨ± − i·Δ_s·sin²θ·e^{±2iΔk z}·Ψ∓ − γ_bc·sin²θ·Ψ±
//! ```
//!
//! with v_g = c·cos²θ. Dividing by cos²θ gives the stretched-time form with
//! coupling rate χ = Δ_s·tan²θ. The spatial domain is periodic and
//! advection is done exactly in Fourier space.

mod evolve;
mod io;
mod propagator;

use num_complex::Complex64;

use crate::medium::{DriveSchedule, MediumParams};
use crate::quad::adaptive_simpson;
use crate::{Error, Result};

pub use evolve::{evolve, step, EvolveOptions, Snapshot, StepParams, Stepper, TraceRow, Trajectory};
pub use io::{read_binary, write_binary, BINARY_MAGIC, BINARY_VERSION};
pub use propagator::{analytic_evolution, polariton_propagator};

/// Uniform periodic grid on [z_min, z_max).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub z_min: f64,
    pub z_max: f64,
    pub n_points: usize,
}

impl GridSpec {
    pub fn new(z_min: f64, z_max: f64, n_points: usize) -> Result<Self> {
        if !(z_min.is_finite() && z_max.is_finite()) || z_max <= z_min {
            return Err(Error::invalid("grid", "need finite z_min < z_max"));
        }
        if n_points < 64 || !n_points.is_power_of_two() {
            return Err(Error::invalid("n_points", "must be a power of two and at least 64"));
        }
        Ok(Self {
            z_min,
            z_max,
            n_points,
        })
    }

    pub fn dz(&self) -> f64 {
        (self.z_max - self.z_min) / self.n_points as f64
    }

    pub fn extent(&self) -> f64 {
        self.z_max - self.z_min
    }

    pub fn z(&self, i: usize) -> f64 {
        self.z_min + i as f64 * self.dz()
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.z(i)).collect()
    }

    /// Angular wavenumbers in FFT order.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let n = self.n_points;
        let base = 2.0 * std::f64::consts::PI / self.extent();
        (0..n)
            .map(|j| {
                let m = if j < n / 2 { j as f64 } else { j as f64 - n as f64 };
                m * base
            })
            .collect()
    }
}

/// Polariton envelopes on a grid. The excitation norm is
/// Σ(|Ψ₊|² + |Ψ₋|²)·dz.
#[derive(Debug, Clone, PartialEq)]
pub struct PolaritonState {
    pub grid: GridSpec,
    pub psi_plus: Vec<Complex64>,
    pub psi_minus: Vec<Complex64>,
    pub time: f64,
}

impl PolaritonState {
    pub fn zeros(grid: GridSpec, time: f64) -> Self {
        let zero = vec![Complex64::new(0.0, 0.0); grid.n_points];
        Self {
            grid,
            psi_plus: zero.clone(),
            psi_minus: zero,
            time,
        }
    }

    /// Forward Gaussian with unit norm; `rms_width` is the RMS width of
    /// |Ψ₊|² and `k0` an optional carrier wavenumber.
    pub fn gaussian(grid: GridSpec, center: f64, rms_width: f64, k0: f64, time: f64) -> Result<Self> {
        if !(rms_width > 0.0) {
            return Err(Error::invalid("rms_width", "must be positive"));
        }
        let mut s = Self::zeros(grid, time);
        for (i, v) in s.psi_plus.iter_mut().enumerate() {
            let x = grid.z(i) - center;
            let env = (-x * x / (4.0 * rms_width * rms_width)).exp();
            *v = Complex64::from_polar(env, k0 * x);
        }
        let n = s.norm();
        if n == 0.0 {
            return Err(Error::invalid("pulse", "pulse does not overlap the grid"));
        }
        let scale = n.sqrt().recip();
        s.psi_plus.iter_mut().for_each(|v| *v *= scale);
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.grid.n_points;
        if self.psi_plus.len() != n || self.psi_minus.len() != n {
            return Err(Error::invalid("state", "array lengths must equal n_points"));
        }
        Ok(())
    }

    pub fn forward_norm(&self) -> f64 {
        self.psi_plus.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.dz()
    }

    pub fn backward_norm(&self) -> f64 {
        self.psi_minus.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.dz()
    }

    pub fn norm(&self) -> f64 {
        self.forward_norm() + self.backward_norm()
    }

    /// Norm carried by grid points with z in [z0, z1].
    pub fn norm_within(&self, z0: f64, z1: f64) -> f64 {
        let dz = self.grid.dz();
        (0..self.grid.n_points)
            .filter(|&i| {
                let z = self.grid.z(i);
                z >= z0 && z <= z1
            })
            .map(|i| self.psi_plus[i].norm_sqr() + self.psi_minus[i].norm_sqr())
            .sum::<f64>()
            * dz
    }
}

/// Photonic and Raman-coherence parts of the polaritons.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldView {
    pub e_plus: Vec<Complex64>,
    pub e_minus: Vec<Complex64>,
    /// √N·σ_bc, same scaling as the field envelopes.
    pub sigma_bc_plus: Vec<Complex64>,
    pub sigma_bc_minus: Vec<Complex64>,
}

/// Ê± = cosθ·Ψ± and √N·σ±_bc = −sinθ·Ψ±, so that
/// Ψ± = cosθ·Ê± − sinθ·√N·σ±_bc.
pub fn fields_from_polariton(state: &PolaritonState, theta: f64) -> FieldView {
    let (s, c) = theta.sin_cos();
    let scale = |v: &[Complex64], f: f64| v.iter().map(|z| z * f).collect::<Vec<_>>();
    FieldView {
        e_plus: scale(&state.psi_plus, c),
        e_minus: scale(&state.psi_minus, c),
        sigma_bc_plus: scale(&state.psi_plus, -s),
        sigma_bc_minus: scale(&state.psi_minus, -s),
    }
}

/// τ(t₁) − τ(t₀) = ∫cos²θ dt, integrated piecewise between ramp breakpoints.
pub fn stretched_time(schedule: &DriveSchedule, medium: &MediumParams, t0: f64, t1: f64) -> Result<f64> {
    if !(t1 >= t0) {
        return Err(Error::invalid("t1", "must not precede t0"));
    }
    if t1 == t0 {
        return Ok(0.0);
    }
    // cos²θ = Ω_c²/(Ω_c² + g²N), exactly zero when the control is off.
    let g2 = medium.coupling * medium.coupling;
    let cos2 = |t: f64| {
        let oc = schedule.omega_c.eval(t);
        oc * oc / (oc * oc + g2)
    };
    let mut cuts = vec![t0];
    cuts.extend(schedule.breakpoints().into_iter().filter(|&b| b > t0 && b < t1));
    cuts.push(t1);
    let tol = 1e-13 * (t1 - t0);
    Ok(cuts
        .windows(2)
        .map(|w| adaptive_simpson(&cos2, w[0], w[1], tol * (w[1] - w[0]) / (t1 - t0), 48))
        .sum())
}

/// Summary numbers for one state.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    pub norm: f64,
    pub forward_norm: f64,
    pub backward_norm: f64,
    pub centroid: f64,
    pub rms_width: f64,
    /// |Ê₊|² + |Ê₋|² at each grid point (the optical-wavelength average of
    /// the total intensity).
    pub intensity: Vec<f64>,
}

pub fn measure(state: &PolaritonState, theta: f64) -> Diagnostics {
    let dz = state.grid.dz();
    let dens: Vec<f64> = state
        .psi_plus
        .iter()
        .zip(&state.psi_minus)
        .map(|(p, m)| p.norm_sqr() + m.norm_sqr())
        .collect();
    let norm = dens.iter().sum::<f64>() * dz;
    let (centroid, rms_width) = if norm > 0.0 {
        let mean = dens.iter().enumerate().map(|(i, d)| d * state.grid.z(i)).sum::<f64>() * dz / norm;
        let var = dens
            .iter()
            .enumerate()
            .map(|(i, d)| d * (state.grid.z(i) - mean).powi(2))
            .sum::<f64>()
            * dz
            / norm;
        (mean, var.sqrt())
    } else {
        (f64::NAN, f64::NAN)
    };
    let c2 = theta.cos().powi(2);
    Diagnostics {
        norm,
        forward_norm: state.forward_norm(),
        backward_norm: state.backward_norm(),
        centroid,
        rms_width,
        intensity: dens.iter().map(|d| c2 * d).collect(),
    }
}
