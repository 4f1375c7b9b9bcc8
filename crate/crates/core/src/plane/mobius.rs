use std::f64::consts::PI;
use std::ops::Mul;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// An element of `PSL(2,R)`, stored as a real matrix `[[a, b], [c, d]]` that
/// acts on the upper half-plane. On the unit disk it acts through the
/// Cayley transform `z ↦ (z − i)/(z + i)`, which sends `i` to the origin.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MobiusIsometry {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl MobiusIsometry {
    pub const IDENTITY: Self = Self {
        a: 1.0,
        b: 0.0,
        c: 0.0,
        d: 1.0,
    };

    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self { a, b, c, d }
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    pub fn inverse(&self) -> Self {
        Self {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    /// Rotation of the disk about the origin by `theta` (counter-clockwise).
    pub fn rotation(theta: f64) -> Self {
        let (s, c) = (theta / 2.0).sin_cos();
        Self {
            a: c,
            b: s,
            c: -s,
            d: c,
        }
    }

    /// Translation of the disk by hyperbolic distance `l` along the real
    /// diameter, towards `+1`.
    pub fn translation(l: f64) -> Self {
        Self {
            a: (l / 2.0).exp(),
            b: 0.0,
            c: 0.0,
            d: (-l / 2.0).exp(),
        }
    }

    /// Rotation by `theta` about the disk point `z`.
    pub fn rotation_about(z: Complex64, theta: f64) -> Self {
        let to = Self::moving_to_origin(z);
        to.inverse() * Self::rotation(theta) * to
    }

    /// An isometry sending the disk point `z` to the origin.
    pub fn moving_to_origin(z: Complex64) -> Self {
        let r = z.norm();
        if r == 0.0 {
            return Self::IDENTITY;
        }
        let dist = 2.0 * r.atanh();
        let arg = z.arg();
        Self::rotation(arg) * Self::translation(-dist) * Self::rotation(-arg)
    }

    /// The `SU(1,1)` form `(α, β)`: on the disk `z ↦ (αz + β)/(β̄z + ᾱ)`.
    pub fn su11(&self) -> (Complex64, Complex64) {
        let alpha = Complex64::new(self.a + self.d, self.b - self.c) * 0.5;
        let beta = Complex64::new(self.a - self.d, -(self.b + self.c)) * 0.5;
        (alpha, beta)
    }

    pub fn apply_disk(&self, z: Complex64) -> Complex64 {
        let (al, be) = self.su11();
        (al * z + be) / (be.conj() * z + al.conj())
    }

    /// Action on boundary angles.
    pub fn apply_angle(&self, theta: f64) -> f64 {
        normalize_angle(self.apply_disk(Complex64::from_polar(1.0, theta)).arg())
    }

    /// Image of the origin, `β/ᾱ`.
    pub fn origin_image(&self) -> Complex64 {
        let (al, be) = self.su11();
        be / al.conj()
    }

    /// `cosh d(0, g·0) = (a² + b² + c² + d²)/2`.
    pub fn cosh_displacement(&self) -> f64 {
        0.5 * (self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d)
    }

    /// `d(0, g·0)`.
    pub fn displacement(&self) -> f64 {
        self.cosh_displacement().max(1.0).acosh()
    }

    /// Spatial coordinates `(x₁, x₂)` of `g·0` on the hyperboloid, `2αβ`.
    pub fn hyperboloid_xy(&self) -> (f64, f64) {
        let (al, be) = self.su11();
        let p = al * be * 2.0;
        (p.re, p.im)
    }

    /// Largest entry difference to `±other`.
    pub fn distance_to(&self, other: &Self) -> f64 {
        let plus = (self.a - other.a)
            .abs()
            .max((self.b - other.b).abs())
            .max((self.c - other.c).abs())
            .max((self.d - other.d).abs());
        let minus = (self.a + other.a)
            .abs()
            .max((self.b + other.b).abs())
            .max((self.c + other.c).abs())
            .max((self.d + other.d).abs());
        plus.min(minus)
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::IDENTITY, |acc, _| acc * *self)
    }
}

impl Mul for MobiusIsometry {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }
}

/// Angle in `[0, 2π)`.
pub fn normalize_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(2.0 * PI);
    if t >= 2.0 * PI {
        0.0
    } else {
        t
    }
}

/// Hyperbolic distance in the disk.
pub fn disk_distance(z: Complex64, w: Complex64) -> f64 {
    let num = (z - w).norm();
    let den = (Complex64::new(1.0, 0.0) - z.conj() * w).norm();
    2.0 * (num / den).min(1.0).atanh()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn elementary_isometries() {
        let r = MobiusIsometry::rotation(0.7);
        assert!((r.apply_disk(c(0.5, 0.0)) - Complex64::from_polar(0.5, 0.7)).norm() < 1e-14);
        let t = MobiusIsometry::translation(2.0);
        let z = t.apply_disk(c(0.0, 0.0));
        assert!((z.re - 1f64.tanh()).abs() < 1e-14 && z.im.abs() < 1e-15);
        assert!((t.displacement() - 2.0).abs() < 1e-12);
        let p = c(0.3, -0.4);
        assert!(MobiusIsometry::moving_to_origin(p).apply_disk(p).norm() < 1e-14);
        let rot = MobiusIsometry::rotation_about(p, 1.1);
        assert!((rot.apply_disk(p) - p).norm() < 1e-14);
        assert!((rot.det() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn action_preserves_distance() {
        let g = MobiusIsometry::rotation(0.3)
            * MobiusIsometry::translation(1.7)
            * MobiusIsometry::rotation(2.0);
        let (x, y) = (c(0.1, 0.5), c(-0.6, 0.2));
        let d0 = disk_distance(x, y);
        assert!((disk_distance(g.apply_disk(x), g.apply_disk(y)) - d0).abs() < 1e-12);
        assert!((g.displacement() - disk_distance(c(0.0, 0.0), g.origin_image())).abs() < 1e-12);
        let (al, be) = g.su11();
        assert!((al.norm_sqr() - be.norm_sqr() - 1.0).abs() < 1e-12);
        let (x1, x2) = g.hyperboloid_xy();
        let z = g.origin_image();
        let s = 1.0 - z.norm_sqr();
        assert!((x1 - 2.0 * z.re / s).abs() < 1e-9 && (x2 - 2.0 * z.im / s).abs() < 1e-9);
    }
}
