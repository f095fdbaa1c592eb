//! 2x2 real derivative matrices and their closed-form singular values.

use std::ops::Mul;

use serde::{Deserialize, Serialize};

/// `[[a, b], [c, d]]` = `[[du/dx, du/dy], [dv/dx, dv/dy]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Jacobian2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Jacobian2 {
    pub const IDENTITY: Jacobian2 = Jacobian2 { a: 1.0, b: 0.0, c: 0.0, d: 1.0 };

    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self { a, b, c, d }
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self::new(self.a * s, self.b * s, self.c * s, self.d * s)
    }

    /// Adjugate divided by the determinant. `None` for a singular matrix.
    pub fn inverse(&self) -> Option<Self> {
        let det = self.det();
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        Some(Self::new(self.d / det, -self.b / det, -self.c / det, self.a / det))
    }

    pub fn apply(&self, v: (f64, f64)) -> (f64, f64) {
        (self.a * v.0 + self.b * v.1, self.c * v.0 + self.d * v.1)
    }

    /// Singular values `(s1, s2)`, `s1 >= s2 >= 0`, from the invariants of `J^T J`:
    /// `s1^2 + s2^2 = |J|_F^2` and `s1 s2 = |det J|`. The two square roots
    /// `sqrt(|J|_F^2 +- 2 det)` are expanded as sums of squares so neither
    /// suffers cancellation.
    pub fn singular_values(&self) -> (f64, f64) {
        let plus = (self.a + self.d).hypot(self.c - self.b);
        let minus = (self.a - self.d).hypot(self.c + self.b);
        let s1 = 0.5 * (plus + minus);
        if s1 == 0.0 {
            return (0.0, 0.0);
        }
        let s2 = self.det().abs() / s1;
        (s1, s2)
    }

    pub fn max_abs_diff(&self, other: &Jacobian2) -> f64 {
        (self.a - other.a)
            .abs()
            .max((self.b - other.b).abs())
            .max((self.c - other.c).abs())
            .max((self.d - other.d).abs())
    }

    pub fn max_abs(&self) -> f64 {
        self.a.abs().max(self.b.abs()).max(self.c.abs()).max(self.d.abs())
    }
}

impl Mul for Jacobian2 {
    type Output = Jacobian2;

    fn mul(self, r: Jacobian2) -> Jacobian2 {
        Jacobian2::new(
            self.a * r.a + self.b * r.c,
            self.a * r.b + self.b * r.d,
            self.c * r.a + self.d * r.c,
            self.c * r.b + self.d * r.d,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singular_values_known() {
        let (s1, s2) = Jacobian2::new(2.0, 0.0, 0.0, 1.0).singular_values();
        assert_eq!((s1, s2), (2.0, 1.0));
        let th: f64 = 0.7;
        let rot = Jacobian2::new(th.cos(), -th.sin(), th.sin(), th.cos());
        let (s1, s2) = rot.singular_values();
        assert!((s1 - 1.0).abs() < 1e-15 && (s2 - 1.0).abs() < 1e-15);
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let (s1, s2) = Jacobian2::new(2.0, 1.0, 1.0, 1.0).singular_values();
        assert!((s1 - phi * phi).abs() < 1e-14);
        assert!((s2 - 1.0 / (phi * phi)).abs() < 1e-14);
    }

    #[test]
    fn singular_values_match_power_iteration() {
        // brute force: sample unit vectors densely, max/min of |Jv|
        let j = Jacobian2::new(0.3, -1.7, 2.2, 0.4);
        let (mut hi, mut lo) = (0.0f64, f64::INFINITY);
        for k in 0..200_000 {
            let t = k as f64 * std::f64::consts::PI / 200_000.0;
            let (x, y) = j.apply((t.cos(), t.sin()));
            let n = x.hypot(y);
            hi = hi.max(n);
            lo = lo.min(n);
        }
        let (s1, s2) = j.singular_values();
        assert!((s1 - hi).abs() < 1e-8);
        assert!((s2 - lo).abs() < 1e-8);
    }

    #[test]
    fn inverse_round_trip() {
        let j = Jacobian2::new(2.0, 1.0, 1.0, 1.0);
        let inv = j.inverse().unwrap();
        assert_eq!(inv, Jacobian2::new(1.0, -1.0, -1.0, 2.0));
        assert_eq!(j * inv, Jacobian2::IDENTITY);
        assert!(Jacobian2::new(1.0, 2.0, 2.0, 4.0).inverse().is_none());
    }
}
