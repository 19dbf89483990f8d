//! Points of the Riemann sphere and the maps between its charts.
//!
//! The stereographic convention is `z = e^{i phi} tan(theta/2)`, so `z = 0` is
//! the north pole (Bloch vector `+z`) and the point at infinity is the south
//! pole. Infinity is always an explicit variant.

use num_complex::Complex64;
use std::f64::consts::PI;

/// An extended complex number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Extended {
    Finite(Complex64),
    Infinity,
}

impl Extended {
    pub fn finite(re: f64, im: f64) -> Self {
        Extended::Finite(Complex64::new(re, im))
    }

    /// Builds a point from homogeneous coordinates `(num : den)`.
    pub fn from_ratio(num: Complex64, den: Complex64) -> Self {
        if den == Complex64::new(0.0, 0.0) {
            return Extended::Infinity;
        }
        let z = num / den;
        if z.re.is_finite() && z.im.is_finite() {
            Extended::Finite(z)
        } else {
            Extended::Infinity
        }
    }

    pub fn from_angles(theta: f64, phi: f64) -> Self {
        if theta >= PI {
            return Extended::Infinity;
        }
        Extended::from_ratio(
            Complex64::from_polar((theta / 2.0).sin(), phi),
            Complex64::new((theta / 2.0).cos(), 0.0),
        )
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Extended::Infinity)
    }

    pub fn as_finite(&self) -> Option<Complex64> {
        match self {
            Extended::Finite(z) => Some(*z),
            Extended::Infinity => None,
        }
    }

    /// Polar angle and azimuth. The azimuth is in `[0, 2pi)`, and is zero at
    /// the poles.
    pub fn angles(&self) -> (f64, f64) {
        match self {
            Extended::Infinity => (PI, 0.0),
            Extended::Finite(z) => {
                let r = z.norm();
                let theta = 2.0 * r.atan();
                let phi = if r == 0.0 { 0.0 } else { wrap_angle(z.arg()) };
                (theta, phi)
            }
        }
    }

    /// Unit Bloch vector.
    pub fn bloch(&self) -> [f64; 3] {
        match self {
            Extended::Infinity => [0.0, 0.0, -1.0],
            Extended::Finite(z) => {
                let r2 = z.norm_sqr();
                let s = 1.0 + r2;
                [2.0 * z.re / s, 2.0 * z.im / s, (1.0 - r2) / s]
            }
        }
    }

    pub fn from_bloch(v: [f64; 3]) -> Self {
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        let (x, y, z) = (v[0] / n, v[1] / n, v[2] / n);
        // (x + iy) / (1 + z) is the projection from the south pole.
        Extended::from_ratio(Complex64::new(x, y), Complex64::new(1.0 + z, 0.0))
    }

    /// Diametrically opposite point, `z -> -1/conj(z)`.
    pub fn antipode(&self) -> Self {
        match self {
            Extended::Infinity => Extended::Finite(Complex64::new(0.0, 0.0)),
            Extended::Finite(z) => Extended::from_ratio(Complex64::new(-1.0, 0.0), z.conj()),
        }
    }

    /// Euclidean distance between the Bloch vectors (range `[0, 2]`).
    pub fn chordal(&self, other: &Extended) -> f64 {
        match (self, other) {
            (Extended::Infinity, Extended::Infinity) => 0.0,
            (Extended::Finite(a), Extended::Infinity) | (Extended::Infinity, Extended::Finite(a)) => {
                2.0 / (1.0 + a.norm_sqr()).sqrt()
            }
            (Extended::Finite(a), Extended::Finite(b)) => {
                2.0 * (a - b).norm() / ((1.0 + a.norm_sqr()) * (1.0 + b.norm_sqr())).sqrt()
            }
        }
    }

    /// Applies the Mobius map `z -> (p z + q) / (r z + s)`.
    pub fn mobius(&self, m: [[Complex64; 2]; 2]) -> Self {
        let (num, den) = match self {
            Extended::Infinity => (m[0][0], m[1][0]),
            Extended::Finite(z) => (m[0][0] * z + m[0][1], m[1][0] * z + m[1][1]),
        };
        Extended::from_ratio(num, den)
    }
}

/// Wraps an angle into `[0, 2pi)`.
pub fn wrap_angle(a: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let w = a.rem_euclid(two_pi);
    if w >= two_pi {
        0.0
    } else {
        w
    }
}

/// Distance between two angles measured on the circle.
pub fn circular_distance(a: f64, b: f64) -> f64 {
    let d = wrap_angle(a - b);
    d.min(2.0 * PI - d)
}
