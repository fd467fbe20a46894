//! Complex Bloch wavevector of the standing-wave-modulated EIT medium.
//!
//! Two independent routes are provided:
//!
//! * [`bloch_k_analytic`]: the closed-form near-resonance dispersion
//!   relation cos(Ka) = cosh((g²N/Ω_c²)·a·√(Δ_s² − ω²)/c), lossless;
//! * [`bloch_k_numeric`]: half-trace of the one-period transfer matrix built
//!   from slabs of the full lossy EIT response.
//!
//! Both report K − k_s folded into (−π/a, π/a] with a non-negative
//! imaginary part. The spectral coordinate ω is the probe detuning from the
//! light-shifted two-photon resonance, i.e. from ω_ab shifted by the mean
//! standing-wave light shift 2Δ_s; at that origin the gap is centred at
//! ω = 0 as in the closed form.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::medium::{light_shift_amplitude, wavenumber_shift, MediumParams};
use crate::smatrix::Mat2;
use crate::{Error, Result, SPEED_OF_LIGHT};

/// Time-independent drive used by the static (band, reflection) solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StaticDrive {
    /// Control Rabi frequency Ω_c (rad/s).
    pub omega_c: f64,
    /// Single-beam standing-wave Rabi frequency Ω_s (rad/s).
    pub omega_s: f64,
    /// Standing-wave detuning Δ (rad/s, nonzero).
    pub delta: f64,
    /// Phase mismatch k_s − k₀ (rad/m).
    pub delta_k: f64,
}

/// A medium together with the static drive that modulates it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulatedMedium {
    pub medium: MediumParams,
    pub drive: StaticDrive,
}

impl ModulatedMedium {
    pub fn new(medium: MediumParams, drive: StaticDrive) -> Result<Self> {
        medium.validate()?;
        if drive.delta == 0.0 {
            return Err(Error::ZeroDetuning);
        }
        if !(drive.omega_c >= 0.0) || !(drive.omega_s >= 0.0) {
            return Err(Error::invalid("drive", "Rabi frequencies must be >= 0"));
        }
        if !drive.delta.is_finite() || !drive.delta_k.is_finite() {
            return Err(Error::invalid("drive", "must be finite"));
        }
        if medium.carrier_wavenumber + drive.delta_k <= 0.0 {
            return Err(Error::invalid("delta_k", "standing-wave wavenumber must stay positive"));
        }
        Ok(Self { medium, drive })
    }

    pub fn k_s(&self) -> f64 {
        self.medium.carrier_wavenumber + self.drive.delta_k
    }

    /// Lattice period a = π/k_s.
    pub fn period(&self) -> f64 {
        PI / self.k_s()
    }

    /// Δ_s = Ω_s²/Δ.
    pub fn light_shift(&self) -> f64 {
        // Δ ≠ 0 is checked at construction.
        light_shift_amplitude(self.drive.omega_s, self.drive.delta).unwrap_or(0.0)
    }

    /// Spatial mean of the light shift 4Δ_s cos²(k_s z).
    pub fn mean_shift(&self) -> f64 {
        2.0 * self.light_shift()
    }

    pub fn local_shift(&self, z: f64) -> f64 {
        let c = (self.k_s() * z).cos();
        4.0 * self.light_shift() * c * c
    }

    /// g²N/Ω_c² (≈ c/v_g for slow light).
    pub fn slowdown(&self) -> Result<f64> {
        if self.drive.omega_c <= 0.0 {
            return Err(Error::invalid("omega_c", "must be > 0 for a finite slowdown"));
        }
        let r = self.medium.coupling / self.drive.omega_c;
        Ok(r * r)
    }

    /// Probe detuning from the bare one-photon resonance for a detuning
    /// `omega` measured from the light-shifted two-photon resonance.
    pub fn absolute_detuning(&self, omega: f64) -> f64 {
        omega + self.mean_shift()
    }

    /// Vacuum wavenumber of the probe at detuning `omega`.
    pub fn vacuum_wavenumber(&self, omega: f64) -> f64 {
        self.medium.carrier_wavenumber + self.absolute_detuning(omega) / SPEED_OF_LIGHT
    }

    /// Offset of the local wavenumber from the vacuum one for a local light
    /// shift `shift`.
    pub fn local_wavenumber_shift(&self, omega: f64, shift: f64) -> Complex64 {
        wavenumber_shift(self.absolute_detuning(omega), shift, self.drive.omega_c, &self.medium)
    }

    /// The same setup with the standing wave switched off.
    pub fn unmodulated(&self) -> Self {
        Self {
            drive: StaticDrive {
                omega_s: 0.0,
                ..self.drive
            },
            ..*self
        }
    }
}

/// One point of the band structure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandPoint {
    /// Detuning from the light-shifted two-photon resonance (rad/s).
    pub omega: f64,
    /// Re(K) − k_s folded into (−π/a, π/a] (rad/m).
    pub k_real: f64,
    /// Im(K) ≥ 0 (rad/m).
    pub k_imag: f64,
    pub in_gap: bool,
}

/// Slab discretization of one lattice period.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodCell {
    pub period_a: f64,
    pub slab_count: usize,
    /// Light shift at each slab midpoint.
    pub shifts: Vec<f64>,
    /// Excess attenuation (rad/m) above which a frequency counts as in-gap.
    pub gap_threshold: f64,
    /// Circulant kernel that undoes the sinc roll-off of a staircase.
    desinc: Vec<f64>,
}

pub const DEFAULT_SLABS: usize = 64;

impl PeriodCell {
    pub fn new(mm: &ModulatedMedium, slab_count: usize) -> Result<Self> {
        if slab_count < 8 || slab_count % 2 != 0 {
            return Err(Error::invalid("slab_count", "must be even and >= 8"));
        }
        let period_a = mm.period();
        let width = period_a / slab_count as f64;
        let shifts = (0..slab_count)
            .map(|j| mm.local_shift((j as f64 + 0.5) * width))
            .collect();
        Ok(Self {
            period_a,
            slab_count,
            shifts,
            gap_threshold: 1e-9 * mm.k_s(),
            desinc: desinc_kernel(slab_count),
        })
    }

    pub fn with_gap_threshold(mut self, threshold: f64) -> Self {
        self.gap_threshold = threshold;
        self
    }

    pub fn slab_width(&self) -> f64 {
        self.period_a / self.slab_count as f64
    }
}

/// A staircase with values v_j has Fourier coefficients equal to the DFT of
/// v times sinc(πn/M). Filtering the midpoint samples by 1/sinc(πn/M) makes
/// the staircase carry the sampled profile's harmonics exactly, which
/// removes the O(1/M²) error in the Bragg coupling.
fn desinc_kernel(m: usize) -> Vec<f64> {
    let mf = m as f64;
    (0..m)
        .map(|j| {
            (0..m)
                .map(|n| {
                    let nn = if n <= m / 2 { n as f64 } else { n as f64 - mf };
                    let x = PI * nn / mf;
                    let inv_sinc = if nn == 0.0 { 1.0 } else { x / x.sin() };
                    inv_sinc * (2.0 * PI * nn * j as f64 / mf).cos()
                })
                .sum::<f64>()
                / mf
        })
        .collect()
}

/// One period expressed relative to a uniform background medium.
///
/// With background wavenumber k_bg the period transfer matrix is
/// diag(e^{ik_bg a}, e^{−ik_bg a})·(I + y). Keeping `y` separate is what
/// makes the half-trace accurate near the zone edge, where cos(Ka) ≈ −1
/// and the physics lives in the deviation.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PeriodResponse {
    pub y: Mat2,
    /// Background wavenumber k_bg (slab average).
    pub k_bg: Complex64,
    /// k_bg·a − π.
    pub phase_excess: Complex64,
    /// Mean offset of the slab wavenumbers from vacuum.
    pub mean_shift: Complex64,
}

fn expm1_i(x: Complex64) -> Complex64 {
    // e^{ix} − 1 without cancellation for small x.
    let half = 0.5 * x;
    2.0 * Complex64::i() * half.sin() * (Complex64::i() * half).exp()
}

pub(crate) fn period_response(omega: f64, cell: &PeriodCell, mm: &ModulatedMedium) -> PeriodResponse {
    let i = Complex64::i();
    let m = cell.slab_count;
    let d = cell.slab_width();

    let samples: Vec<Complex64> = cell
        .shifts
        .iter()
        .map(|&s| mm.local_wavenumber_shift(omega, s))
        .collect();
    let offsets: Vec<Complex64> = (0..m)
        .map(|j| {
            (0..m)
                .map(|l| cell.desinc[(j + m - l) % m] * samples[l])
                .sum::<Complex64>()
        })
        .collect();
    let mean_shift = offsets.iter().sum::<Complex64>() / m as f64;
    let k_vac = mm.vacuum_wavenumber(omega);
    let k_bg = k_vac + mean_shift;

    let mut y = Mat2::new(0.0.into(), 0.0.into(), 0.0.into(), 0.0.into());
    for (j, off) in offsets.iter().enumerate() {
        let dev = off - mean_shift;
        if dev == Complex64::new(0.0, 0.0) {
            continue;
        }
        let k_j = k_bg + dev;
        let rho = k_j / k_bg;
        let rho_m1 = dev / k_bg;
        let s = (k_j * d).sin();
        let second = i * s * rho_m1 * rho_m1 / (2.0 * rho);
        let cross = 0.5 * i * s * rho_m1 * (rho + 1.0) / rho;
        let z0 = j as f64 * d;
        let z1 = z0 + d;
        let yj = Mat2::new(
            expm1_i(dev * d) + (-i * k_bg * d).exp() * second,
            (-i * k_bg * (z0 + z1)).exp() * cross,
            -(i * k_bg * (z0 + z1)).exp() * cross,
            expm1_i(-dev * d) - (i * k_bg * d).exp() * second,
        );
        let prod = yj * y;
        for r in 0..2 {
            for c in 0..2 {
                y.m[r][c] = yj.m[r][c] + y.m[r][c] + prod.m[r][c];
            }
        }
    }

    let a = cell.period_a;
    let vac_excess = PI * (mm.absolute_detuning(omega) / SPEED_OF_LIGHT - mm.drive.delta_k) / mm.k_s();
    PeriodResponse {
        y,
        k_bg,
        phase_excess: vac_excess + mean_shift * a,
        mean_shift,
    }
}

/// Transfer matrix of one period in the (forward, backward) amplitude basis
/// of the background medium.
///
/// Its determinant is 1 and its half-trace is cos(Ka). For an unmodulated
/// cell it is diag(e^{ika}, e^{−ika}).
pub fn period_matrix(omega: f64, cell: &PeriodCell, mm: &ModulatedMedium) -> Mat2 {
    let resp = period_response(omega, cell, mm);
    let phase = (Complex64::i() * resp.k_bg * cell.period_a).exp();
    let one = Mat2::IDENTITY;
    let x = Mat2::new(
        one.m[0][0] + resp.y.m[0][0],
        resp.y.m[0][1],
        resp.y.m[1][0],
        one.m[1][1] + resp.y.m[1][1],
    );
    Mat2::diag(phase, 1.0 / phase) * x
}

/// Bloch wavevector from the period transfer matrix.
pub fn bloch_k_numeric(omega: f64, cell: &PeriodCell, mm: &ModulatedMedium) -> BandPoint {
    let resp = period_response(omega, cell, mm);
    let a = cell.period_a;
    let phi = resp.phase_excess;
    let eip = (Complex64::i() * phi).exp();
    // 1 − cos(qa), where Ka = π + qa.
    let half_sin = (0.5 * phi).sin();
    let w = 2.0 * half_sin * half_sin - 0.5 * (eip * resp.y.m[0][0] + resp.y.m[1][1] / eip);
    let mut qa = 2.0 * (w / 2.0).sqrt().asin();
    if qa.im < 0.0 {
        qa = -qa;
    }
    let q = qa / a;
    let mut k_real = q.re;
    if q.im <= cell.gap_threshold {
        // Effectively real K: the branch sign is not fixed by the losses,
        // so follow the detuning (forward Bloch wave).
        k_real = if omega >= 0.0 { q.re.abs() } else { -q.re.abs() };
    }
    if k_real <= -PI / a {
        k_real += 2.0 * PI / a;
    }
    BandPoint {
        omega,
        k_real,
        k_imag: q.im.max(0.0),
        in_gap: q.im - resp.mean_shift.im > cell.gap_threshold,
    }
}

/// Closed-form lossless band structure near two-photon resonance.
///
/// `slowdown` is g²N/Ω_c², `delta_s` the light-shift amplitude Δ_s.
/// Evaluated without forming cosh/arccosh so the gap-centre attenuation
/// slowdown·Δ_s/c is exact to rounding.
pub fn bloch_k_analytic(omega: f64, delta_s: f64, slowdown: f64, period_a: f64) -> Result<BandPoint> {
    if !(period_a > 0.0) {
        return Err(Error::invalid("period_a", "must be > 0"));
    }
    if !(slowdown > 0.0) {
        return Err(Error::invalid("slowdown", "must be > 0"));
    }
    let scale = slowdown / SPEED_OF_LIGHT;
    let ds = delta_s.abs();
    if omega.abs() < ds {
        let kappa = scale * ((ds - omega) * (ds + omega)).sqrt();
        return Ok(BandPoint {
            omega,
            k_real: 0.0,
            k_imag: kappa,
            in_gap: true,
        });
    }
    let qa = scale * period_a * ((omega.abs() - ds) * (omega.abs() + ds)).sqrt();
    let mut r = qa.rem_euclid(2.0 * PI);
    if r > PI {
        r = 2.0 * PI - r;
    }
    let k = r / period_a;
    Ok(BandPoint {
        omega,
        k_real: if omega >= 0.0 { k } else { -k },
        k_imag: 0.0,
        in_gap: false,
    })
}

/// cos(Ka) as written in the closed form; used for cross-checks.
pub fn analytic_half_trace(omega: f64, delta_s: f64, slowdown: f64, period_a: f64) -> Complex64 {
    let arg = Complex64::new(delta_s * delta_s - omega * omega, 0.0).sqrt() * slowdown * period_a / SPEED_OF_LIGHT;
    arg.cosh()
}

/// Evaluates the analytic route at the parameters of `mm`.
pub fn bloch_k_analytic_for(omega: f64, mm: &ModulatedMedium) -> Result<BandPoint> {
    bloch_k_analytic(omega, mm.light_shift(), mm.slowdown()?, mm.period())
}

/// Analytic and numeric band points over a frequency grid, in grid order.
pub fn band_scan(
    omegas: &[f64],
    cell: &PeriodCell,
    mm: &ModulatedMedium,
) -> Result<Vec<(BandPoint, BandPoint)>> {
    let slowdown = mm.slowdown()?;
    let ds = mm.light_shift();
    let a = mm.period();
    omegas
        .par_iter()
        .map(|&w| {
            let an = bloch_k_analytic(w, ds, slowdown, a)?;
            let nu = bloch_k_numeric(w, cell, mm);
            if !(nu.k_real.is_finite() && nu.k_imag.is_finite()) {
                return Err(Error::numerical(format!("non-finite Bloch wavevector at omega = {w}")));
            }
            Ok((an, nu))
        })
        .collect()
}

/// Outcome of the numeric gap search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GapSearch {
    Resolved { lower: f64, upper: f64 },
    /// No attenuation band stands out above the background loss
    /// (e.g. the grating is washed out by Raman decoherence).
    NoGapResolved,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandEdges {
    /// (−|Δ_s|, +|Δ_s|).
    pub analytic: (f64, f64),
    pub numeric: GapSearch,
}

/// Analytic band edges, plus numeric edges found by bisecting the in-gap
/// flag of [`bloch_k_numeric`] outward from ω = 0.
pub fn band_edges(cell: &PeriodCell, mm: &ModulatedMedium) -> Result<BandEdges> {
    let ds = mm.light_shift().abs();
    if !(ds > 0.0) {
        return Err(Error::invalid("light_shift", "band edges need a nonzero light shift"));
    }
    let analytic = (-ds, ds);
    let in_gap = |w: f64| bloch_k_numeric(w, cell, mm).in_gap;
    if !in_gap(0.0) {
        return Ok(BandEdges {
            analytic,
            numeric: GapSearch::NoGapResolved,
        });
    }

    let step = 0.05 * ds;
    let max_steps = 200;
    let find = |dir: f64| -> Option<f64> {
        let mut inside = 0.0;
        for n in 1..=max_steps {
            let w = dir * step * n as f64;
            if !in_gap(w) {
                let (mut lo, mut hi) = (inside, w);
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    if in_gap(mid) {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                    if (hi - lo).abs() < 1e-9 * ds {
                        break;
                    }
                }
                return Some(0.5 * (lo + hi));
            }
            inside = w;
        }
        None
    };
    let numeric = match (find(-1.0), find(1.0)) {
        (Some(lower), Some(upper)) => GapSearch::Resolved { lower, upper },
        _ => GapSearch::NoGapResolved,
    };
    Ok(BandEdges { analytic, numeric })
}
