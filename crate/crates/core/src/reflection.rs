//! Reflection and transmission of a finite modulated sample.
//!
//! The sample is N_p = ⌊L/a⌋ identical periods between two vacuum
//! half-spaces. One period is computed as a transfer matrix (well
//! conditioned over a single period), converted to a scattering matrix and
//! raised to the N_p-th power by star-product doubling, so the deep-gap
//! regime never forms e^{κL}-sized intermediates.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::bandstructure::{period_response, ModulatedMedium, PeriodCell};
use crate::smatrix::{interface_transfer, Mat2, SMatrix};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumPoint {
    /// Detuning from the light-shifted two-photon resonance (rad/s).
    pub omega: f64,
    pub r: Complex64,
    pub t: Complex64,
    pub reflectivity: f64,
    pub transmissivity: f64,
    /// 1 − |r|² − |t|².
    pub absorption: f64,
}

/// A finite slab of the modulated medium.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub medium: ModulatedMedium,
    pub cell: PeriodCell,
    /// Number of whole periods; the sub-period remainder of L is dropped.
    pub periods: u64,
}

impl Sample {
    pub fn new(medium: ModulatedMedium, slab_count: usize) -> Result<Self> {
        let cell = PeriodCell::new(&medium, slab_count)?;
        let periods = (medium.medium.length / cell.period_a).floor();
        if !(periods >= 1.0) {
            return Err(Error::invalid("length", "medium is shorter than one lattice period"));
        }
        Ok(Self {
            medium,
            cell,
            periods: periods as u64,
        })
    }

    /// Overrides the number of periods (the physical length becomes
    /// `periods · a`).
    pub fn with_periods(mut self, periods: u64) -> Result<Self> {
        if periods == 0 {
            return Err(Error::invalid("periods", "must be >= 1"));
        }
        self.periods = periods;
        Ok(self)
    }

    /// Length actually simulated, N_p·a.
    pub fn effective_length(&self) -> f64 {
        self.periods as f64 * self.cell.period_a
    }

    /// Scattering matrix of a single period in the background basis,
    /// together with the background wavenumber.
    pub fn period_smatrix(&self, omega: f64) -> (SMatrix, Complex64) {
        let resp = period_response(omega, &self.cell, &self.medium);
        // e^{ik_bg a} = −e^{iφ} with φ = k_bg a − π.
        let phase = -(Complex64::i() * resp.phase_excess).exp();
        let y = resp.y;
        let x = Mat2::new(1.0 + y.m[0][0], y.m[0][1], y.m[1][0], 1.0 + y.m[1][1]);
        let t = Mat2::diag(phase, 1.0 / phase) * x;
        (SMatrix::from_transfer(&t), resp.k_bg)
    }
}

/// Amplitudes for a unit wave incident from the left.
pub fn sample_scatter(omega: f64, sample: &Sample) -> Result<SpectrumPoint> {
    let (period, k_bg) = sample.period_smatrix(omega);
    let k_vac = Complex64::new(sample.medium.vacuum_wavenumber(omega), 0.0);
    let entry = SMatrix::from_transfer(&interface_transfer(k_vac, k_bg));
    let exit = SMatrix::from_transfer(&interface_transfer(k_bg, k_vac));
    let total = entry.star(&period.power(sample.periods)).star(&exit);
    if !total.is_finite() {
        return Err(Error::numerical(format!(
            "non-finite scattering amplitudes at omega = {omega:e} rad/s"
        )));
    }
    let reflectivity = total.r_left.norm_sqr();
    let transmissivity = total.t_fwd.norm_sqr();
    Ok(SpectrumPoint {
        omega,
        r: total.r_left,
        t: total.t_fwd,
        reflectivity,
        transmissivity,
        absorption: 1.0 - reflectivity - transmissivity,
    })
}

/// [`sample_scatter`] over a sorted grid; output keeps grid order.
pub fn reflection_spectrum(omegas: &[f64], sample: &Sample) -> Result<Vec<SpectrumPoint>> {
    if omegas.iter().any(|w| !w.is_finite()) {
        return Err(Error::invalid("omega_grid", "contains non-finite values"));
    }
    if omegas.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::invalid("omega_grid", "must be sorted ascending"));
    }
    omegas.par_iter().map(|&w| sample_scatter(w, sample)).collect()
}

/// Peak and half-maximum width of a reflection spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumSummary {
    pub peak_omega: f64,
    pub peak_reflectivity: f64,
    /// Full width between the half-maximum crossings around the peak,
    /// linearly interpolated; `None` if a side never drops below half.
    pub fwhm: Option<f64>,
}

pub fn summarize(points: &[SpectrumPoint]) -> Option<SpectrumSummary> {
    let (ip, peak) = points
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.reflectivity.total_cmp(&b.1.reflectivity))?;
    let half = 0.5 * peak.reflectivity;
    let cross = |i: usize, j: usize| {
        let (a, b) = (&points[i], &points[j]);
        let f = (half - a.reflectivity) / (b.reflectivity - a.reflectivity);
        a.omega + f * (b.omega - a.omega)
    };
    let left = (0..ip).rev().find(|&i| points[i].reflectivity < half).map(|i| cross(i, i + 1));
    let right = (ip + 1..points.len())
        .find(|&i| points[i].reflectivity < half)
        .map(|i| cross(i - 1, i));
    Some(SpectrumSummary {
        peak_omega: peak.omega,
        peak_reflectivity: peak.reflectivity,
        fwhm: left.zip(right).map(|(l, r)| r - l),
    })
}
