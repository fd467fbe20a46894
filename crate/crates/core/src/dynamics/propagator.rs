//! Closed-form evolution for constant coefficients.

use num_complex::Complex64;

use crate::smatrix::Mat2;
use crate::SPEED_OF_LIGHT;

/// Exact stretched-time propagator for one Fourier component,
/// exp(−iτ·[[kc, χ], [χ, −kc]]), acting on (Ψ₊, Ψ₋).
pub fn polariton_propagator(k: f64, chi: f64, tau: f64) -> Mat2 {
    let a = k * SPEED_OF_LIGHT;
    let zeta = a.hypot(chi);
    let (s, c) = (zeta * tau).sin_cos();
    // sin(ζτ)/ζ, with the ζ → 0 limit τ.
    let sinc = if zeta * tau.abs() < 1e-300 { tau } else { s / zeta };
    let i = Complex64::i();
    Mat2::new(
        c - i * a * sinc,
        -i * chi * sinc,
        -i * chi * sinc,
        c + i * a * sinc,
    )
}

/// Spectra of Ψ₊ and Ψ₋ after stretched time τ, starting from a purely
/// forward polariton with spectrum `psi_plus_k0` at wavenumbers `ks`.
pub fn analytic_evolution(
    psi_plus_k0: &[Complex64],
    ks: &[f64],
    tau: f64,
    chi: f64,
) -> (Vec<Complex64>, Vec<Complex64>) {
    assert_eq!(psi_plus_k0.len(), ks.len(), "spectrum and wavenumber grid differ in length");
    let i = Complex64::i();
    psi_plus_k0
        .iter()
        .zip(ks)
        .map(|(&p0, &k)| {
            let kc = k * SPEED_OF_LIGHT;
            let zeta = kc.hypot(chi);
            if zeta == 0.0 {
                return (p0, Complex64::new(0.0, 0.0));
            }
            let (s, c) = (zeta * tau).sin_cos();
            let plus = (c - i * (kc / zeta) * s) * p0;
            let minus = -i * (chi / zeta) * s * p0;
            (plus, minus)
        })
        .unzip()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    /// exp(−iHτ) by Taylor series with scaling and squaring.
    fn brute_force(k: f64, chi: f64, tau: f64) -> Mat2 {
        let i = Complex64::i();
        let a = k * SPEED_OF_LIGHT;
        let mut squarings = 0;
        let mut scale = tau * a.hypot(chi);
        while scale > 0.1 {
            scale *= 0.5;
            squarings += 1;
        }
        let h = tau / f64::powi(2.0, squarings);
        let g = Mat2::new(-i * a * h, -i * chi * h, -i * chi * h, i * a * h);
        let mut term = Mat2::IDENTITY;
        let mut sum = Mat2::IDENTITY;
        for n in 1..30 {
            term = term * g;
            let f = 1.0 / n as f64;
            term = Mat2::new(term.m[0][0] * f, term.m[0][1] * f, term.m[1][0] * f, term.m[1][1] * f);
            sum = Mat2::new(
                sum.m[0][0] + term.m[0][0],
                sum.m[0][1] + term.m[0][1],
                sum.m[1][0] + term.m[1][0],
                sum.m[1][1] + term.m[1][1],
            );
        }
        for _ in 0..squarings {
            sum = sum * sum;
        }
        sum
    }

    #[test]
    fn general_propagator_matches_series() {
        for &(k, chi, tau) in &[
            (0.0, 1e6, 1e-6),
            (3e-3, 2e6, 2.5e-6),
            (-1e-2, 5e5, 4e-6),
            (1e-2, 0.0, 1e-6),
            (2e-3, -3e6, 1e-6),
        ] {
            let u = polariton_propagator(k, chi, tau);
            let b = brute_force(k, chi, tau);
            for r in 0..2 {
                for c in 0..2 {
                    assert!((u.m[r][c] - b.m[r][c]).norm() < 1e-11, "{k} {chi} {tau}");
                }
            }
        }
    }

    #[test]
    fn general_propagator_reduces_to_closed_form() {
        let ks: Vec<f64> = (-20..=20).map(|j| j as f64 * 1e-3).collect();
        let p0: Vec<Complex64> = ks.iter().map(|k| Complex64::new(1.0 + k, 0.5 - k)).collect();
        let (chi, tau) = (1.3e6, 2.1e-6);
        let (plus, minus) = analytic_evolution(&p0, &ks, tau, chi);
        for j in 0..ks.len() {
            let v = polariton_propagator(ks[j], chi, tau).apply([p0[j], Complex64::new(0.0, 0.0)]);
            assert!((v[0] - plus[j]).norm() < 1e-13);
            assert!((v[1] - minus[j]).norm() < 1e-13);
        }
    }

    #[test]
    fn per_mode_norm_is_conserved() {
        let ks: Vec<f64> = (-50..=50).map(|j| j as f64 * 7e-4).collect();
        let p0 = vec![Complex64::new(0.6, -0.8); ks.len()];
        for tau in [0.0, 1e-7, 3.3e-6, 1e-4] {
            let (plus, minus) = analytic_evolution(&p0, &ks, tau, 4e5);
            for j in 0..ks.len() {
                assert!((plus[j].norm_sqr() + minus[j].norm_sqr() - 1.0).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn full_conversion_at_quarter_cycle() {
        let chi = 2e6;
        let tau = FRAC_PI_2 / chi;
        let (plus, minus) = analytic_evolution(&[Complex64::new(1.0, 0.0)], &[0.0], tau, chi);
        assert!(plus[0].norm() < 1e-15);
        assert!((minus[0] - Complex64::new(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn no_coupling_is_free_advection() {
        let ks = [0.0, 1e-3, -2e-3];
        let p0 = [Complex64::new(1.0, 0.0); 3];
        let tau = 1.7e-6;
        let (plus, minus) = analytic_evolution(&p0, &ks, tau, 0.0);
        for j in 0..3 {
            let expect = Complex64::from_polar(1.0, -ks[j] * SPEED_OF_LIGHT * tau);
            assert!((plus[j] - expect).norm() < 1e-13);
            assert_eq!(minus[j], Complex64::new(0.0, 0.0));
        }
        let u = polariton_propagator(0.0, 0.0, PI);
        assert_eq!(u, Mat2::IDENTITY);
    }
}
