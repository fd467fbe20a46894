//! 2×2 transfer and scattering matrices for one-dimensional stacks.
//!
//! Amplitudes are (forward, backward). A transfer matrix maps the pair on
//! the left port to the pair on the right port. A scattering matrix maps the
//! incoming waves (forward on the left, backward on the right) to the
//! outgoing ones (backward on the left, forward on the right):
//!
//! ```text
//! [ b_left  ]   [ r_left   t_back  ] [ a_left  ]
//! [ a_right ] = [ t_fwd    r_right ] [ b_right ]
//! ```
//!
//! Transfer products grow like e^{κL} inside a band gap; Redheffer star
//! products of scattering matrices stay bounded, which is why stacks are
//! always composed in scattering form.

use std::ops::Mul;

use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2 {
    pub m: [[Complex64; 2]; 2],
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2 {
        m: [[ONE, ZERO], [ZERO, ONE]],
    };

    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Self { m: [[a, b], [c, d]] }
    }

    pub fn diag(a: Complex64, d: Complex64) -> Self {
        Self::new(a, ZERO, ZERO, d)
    }

    pub fn trace(&self) -> Complex64 {
        self.m[0][0] + self.m[1][1]
    }

    pub fn det(&self) -> Complex64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn is_finite(&self) -> bool {
        self.m.iter().flatten().all(|z| z.is_finite())
    }

    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        [
            self.m[0][0] * v[0] + self.m[0][1] * v[1],
            self.m[1][0] * v[0] + self.m[1][1] * v[1],
        ]
    }
}

impl Mul for Mat2 {
    type Output = Mat2;

    fn mul(self, rhs: Mat2) -> Mat2 {
        let a = &self.m;
        let b = &rhs.m;
        Mat2::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}

/// Transfer matrix of an interface from a medium with wavenumber `k_left`
/// to one with `k_right` (continuity of E and dE/dz, normal incidence).
pub fn interface_transfer(k_left: Complex64, k_right: Complex64) -> Mat2 {
    let ratio = k_left / k_right;
    let p = 0.5 * (ONE + ratio);
    let q = 0.5 * (ONE - ratio);
    Mat2::new(p, q, q, p)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SMatrix {
    pub r_left: Complex64,
    pub t_fwd: Complex64,
    pub t_back: Complex64,
    pub r_right: Complex64,
}

impl SMatrix {
    /// Scattering matrix of a section of zero length.
    pub const IDENTITY: SMatrix = SMatrix {
        r_left: ZERO,
        t_fwd: ONE,
        t_back: ONE,
        r_right: ZERO,
    };

    pub fn from_transfer(t: &Mat2) -> Self {
        let [[t11, t12], [t21, t22]] = t.m;
        let inv = ONE / t22;
        SMatrix {
            r_left: -t21 * inv,
            t_fwd: t11 - t12 * t21 * inv,
            t_back: inv,
            r_right: t12 * inv,
        }
    }

    /// Inverse of [`SMatrix::from_transfer`]; only meaningful when the
    /// section does not exponentially attenuate.
    pub fn to_transfer(&self) -> Mat2 {
        let inv = ONE / self.t_back;
        Mat2::new(
            self.t_fwd - self.r_right * self.r_left * inv,
            self.r_right * inv,
            -self.r_left * inv,
            inv,
        )
    }

    /// Redheffer star product: `self` on the left, `right` on the right.
    pub fn star(&self, right: &SMatrix) -> SMatrix {
        let den = ONE - self.r_right * right.r_left;
        let inv = ONE / den;
        SMatrix {
            r_left: self.r_left + self.t_back * right.r_left * self.t_fwd * inv,
            t_fwd: right.t_fwd * self.t_fwd * inv,
            t_back: self.t_back * right.t_back * inv,
            r_right: right.r_right + right.t_fwd * self.r_right * right.t_back * inv,
        }
    }

    /// `n` identical copies composed by repeated doubling
    /// (⌈log₂ n⌉ squarings plus at most as many extra products).
    pub fn power(&self, n: u64) -> SMatrix {
        let mut acc = SMatrix::IDENTITY;
        let mut base = *self;
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.star(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.star(&base);
            }
        }
        acc
    }

    /// `n` copies composed one at a time; reference for [`SMatrix::power`].
    pub fn power_sequential(&self, n: u64) -> SMatrix {
        (0..n).fold(SMatrix::IDENTITY, |acc, _| acc.star(self))
    }

    pub fn is_finite(&self) -> bool {
        [self.r_left, self.t_fwd, self.t_back, self.r_right]
            .iter()
            .all(|z| z.is_finite())
    }
}
