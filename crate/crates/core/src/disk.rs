//! Poincaré disk model: hyperbolic distance, the Möbius isometries
//! `T_a(z) = (a + z) / (1 + conj(a) z)` and explicit Lipschitz constants for
//! `a -> T_a(z)` on compact sub-disks.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of the open unit disk, stored as `z` together with
/// `eta = 1 - |z|^2`.
///
/// Beltrami coefficients of long compositions approach the unit circle
/// exponentially fast, so `|z|` rounds to one long before `eta` underflows.
/// Distances and Möbius maps are computed from `eta` rather than from `|z|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDiskCoeff", into = "RawDiskCoeff")]
pub struct DiskCoeff {
    z: Complex64,
    eta: f64,
}

#[derive(Serialize, Deserialize)]
struct RawDiskCoeff {
    re: f64,
    im: f64,
    /// `1 - |z|^2`.
    eta: f64,
}

impl TryFrom<RawDiskCoeff> for DiskCoeff {
    type Error = Error;

    fn try_from(r: RawDiskCoeff) -> Result<Self> {
        DiskCoeff::from_parts(Complex64::new(r.re, r.im), r.eta)
    }
}

impl From<DiskCoeff> for RawDiskCoeff {
    fn from(d: DiskCoeff) -> Self {
        RawDiskCoeff { re: d.z.re, im: d.z.im, eta: d.eta }
    }
}

impl DiskCoeff {
    pub const ZERO: DiskCoeff = DiskCoeff { z: Complex64::new(0.0, 0.0), eta: 1.0 };

    pub fn new(re: f64, im: f64) -> Result<Self> {
        Self::from_complex(Complex64::new(re, im))
    }

    pub fn from_complex(z: Complex64) -> Result<Self> {
        let r = z.norm();
        if !(r < 1.0) {
            return Err(Error::OutsideDisk(z.re, z.im));
        }
        Ok(Self { z, eta: (1.0 - r) * (1.0 + r) })
    }

    /// From `z` and an independently computed `eta = 1 - |z|^2`. Near the
    /// circle `eta` is the accurate one and `z` is rescaled to modulus
    /// `sqrt(1 - eta)`; near the center `z` is kept and `eta` recomputed.
    pub fn from_parts(z: Complex64, eta: f64) -> Result<Self> {
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(Error::LeftDiffeoRegime(eta));
        }
        let n = z.norm();
        if n < 0.5 {
            return Self::from_complex(z);
        }
        let z = if n.is_finite() { z * ((1.0 - eta).sqrt() / n) } else { Complex64::new((1.0 - eta).sqrt(), 0.0) };
        Ok(Self { z, eta })
    }

    /// Rounding can push a value computed from in-disk inputs onto the unit
    /// circle; pull it back to the largest representable modulus below one.
    pub(crate) fn from_complex_clamped(z: Complex64) -> Self {
        let n = z.norm();
        if n < 1.0 {
            Self { z, eta: (1.0 - n) * (1.0 + n) }
        } else {
            let r = 1.0 - f64::EPSILON;
            Self { z: z * (r / n), eta: (1.0 - r) * (1.0 + r) }
        }
    }

    pub fn re(&self) -> f64 {
        self.z.re
    }

    pub fn im(&self) -> f64 {
        self.z.im
    }

    pub fn modulus(&self) -> f64 {
        self.z.norm()
    }

    /// `1 - |z|^2`, accurate even when `|z|` rounds to one.
    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn as_complex(&self) -> Complex64 {
        self.z
    }

    /// Hyperbolic distance to the origin, `log((1 + |z|) / (1 - |z|))`.
    pub fn radius(&self) -> f64 {
        let r = self.modulus();
        if r < 0.5 {
            2.0 * r.atanh()
        } else {
            2.0 * (1.0 + r).ln() - self.eta.ln()
        }
    }

    /// Multiply by a unimodular factor (a hyperbolic rotation about 0).
    pub fn rotated(&self, u: UnitModulus) -> Self {
        Self { z: self.z * u.as_complex(), eta: self.eta }
    }
}

/// A point of the unit circle, renormalized on construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitModulus(Complex64);

impl UnitModulus {
    pub const ONE: UnitModulus = UnitModulus(Complex64::new(1.0, 0.0));

    pub fn new(re: f64, im: f64) -> Result<Self> {
        Self::from_complex(Complex64::new(re, im))
    }

    pub fn from_complex(z: Complex64) -> Result<Self> {
        let n = z.norm();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::InvalidParameter(format!("cannot normalize {z} to unit modulus")));
        }
        Ok(Self(z / n))
    }

    pub fn from_angle(phi: f64) -> Self {
        Self(Complex64::from_polar(1.0, phi))
    }

    pub fn angle(&self) -> f64 {
        self.0.arg()
    }

    pub fn as_complex(&self) -> Complex64 {
        self.0
    }

    /// Angular distance in `[0, pi]`.
    pub fn angle_to(&self, other: &UnitModulus) -> f64 {
        (self.0 * other.0.conj()).arg().abs()
    }
}

/// Hyperbolic distance `log((1 + t) / (1 - t))`, `t = |z - w| / |1 - conj(w) z|`.
///
/// With this normalization (curvature -1, density `2|dz| / (1 - |z|^2)`)
/// `hyp_dist(mu, 0) = log K` for `K = (1 + |mu|) / (1 - |mu|)`. Evaluated as
/// `2 asinh(|z - w| / sqrt(eta_z eta_w))`, with the radial part of `z - w`
/// taken from the `eta` values so points near the circle keep their distance.
pub fn hyp_dist(z: DiskCoeff, w: DiskCoeff) -> f64 {
    let (rz, rw) = (z.modulus(), w.modulus());
    let diff = if rz > 0.5 && rw > 0.5 {
        let (uz, uw) = (z.z / rz, w.z / rw);
        (uz - uw) * rz + uw * ((w.eta - z.eta) / (rz + rw))
    } else {
        z.z - w.z
    };
    let num = diff.norm();
    if num == 0.0 {
        return 0.0;
    }
    2.0 * (num / (z.eta.sqrt() * w.eta.sqrt())).asinh()
}

/// `T_a(z) = (a + z) / (1 + conj(a) z)`, with
/// `1 - |T_a(z)|^2 = (1 - |a|^2)(1 - |z|^2) / |1 + conj(a) z|^2`.
pub fn mobius_t(a: DiskCoeff, z: DiskCoeff) -> DiskCoeff {
    let den = Complex64::new(1.0, 0.0) + a.z.conj() * z.z;
    let w = (a.z + z.z) / den;
    let eta = (a.eta * z.eta / den.norm_sqr()).min(1.0);
    match DiskCoeff::from_parts(w, eta) {
        Ok(d) => d,
        // eta underflowed: keep the direction and let callers detect eta == 0
        Err(_) => DiskCoeff { z: w / w.norm(), eta: 0.0 },
    }
}

/// Euclidean radius `delta` with `K <= beta^2  <=>  |mu| <= delta`.
pub fn delta_from_beta(beta: f64) -> Result<f64> {
    if !(beta >= 1.0) || !beta.is_finite() {
        return Err(Error::InvalidParameter(format!("beta = {beta} must be >= 1")));
    }
    let b2 = beta * beta;
    Ok((b2 - 1.0) / (b2 + 1.0))
}

/// Largest conformal factor of the hyperbolic metric on the Euclidean disk of
/// radius `r`, i.e. hyperbolic length <= this * Euclidean length there.
pub fn metric_factor(r: f64) -> f64 {
    2.0 / (1.0 - r * r)
}

/// Constants bounding `[T_a(z), T_b(z)] <= c1 [a, b]` for `|a|, |b| <= delta_prime`
/// and `|z| <= delta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LipschitzConstants {
    pub delta: f64,
    pub delta_prime: f64,
    /// Sharp Euclidean bound on `|T_a(z)|` over the two disks.
    pub delta_dprime: f64,
    /// Lower bound on `|(1 + conj(a) z)(1 + conj(b) z)|`.
    pub q1: f64,
    /// `|a conj(b) - conj(a) b| <= q2 |a - b|`.
    pub q2: f64,
    /// `|T_a(z) - T_b(z)| <= c1_euclidean |a - b|`.
    pub c1_euclidean: f64,
    /// Hyperbolic constant `c1_euclidean * 2 / (1 - delta_bar^2)`.
    pub c1: f64,
}

impl LipschitzConstants {
    pub fn delta_bar(&self) -> f64 {
        self.delta.max(self.delta_prime).max(self.delta_dprime)
    }
}

pub fn lipschitz_constants(beta: f64, delta_prime: f64) -> Result<LipschitzConstants> {
    let delta = delta_from_beta(beta)?;
    if !(0.0..1.0).contains(&delta_prime) {
        return Err(Error::InvalidParameter(format!(
            "delta_prime = {delta_prime} must lie in [0, 1)"
        )));
    }
    let delta_dprime = (delta + delta_prime) / (1.0 + delta * delta_prime);
    let q1 = (1.0 - delta_prime * delta).powi(2);
    let q2 = 2.0 * delta_prime;
    // numerator of T_a(z) - T_b(z) is (a-b) + (a b* - a* b) z + (b* - a*) z^2
    // with |z| <= delta, so the z-terms contribute q2 * delta + delta^2
    let c1_euclidean = (1.0 + q2 * delta + delta * delta) / q1;
    let delta_bar = delta.max(delta_prime).max(delta_dprime);
    let c1 = c1_euclidean * metric_factor(delta_bar);
    Ok(LipschitzConstants { delta, delta_prime, delta_dprime, q1, q2, c1_euclidean, c1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dc(re: f64, im: f64) -> DiskCoeff {
        DiskCoeff::new(re, im).unwrap()
    }

    #[test]
    fn construction_rejects_boundary() {
        assert!(DiskCoeff::new(1.0, 0.0).is_err());
        assert!(DiskCoeff::new(0.6, 0.8).is_err());
        assert!(DiskCoeff::new(0.6, 0.79).is_ok());
        let u = UnitModulus::new(3.0, 4.0).unwrap();
        assert!((u.as_complex().norm() - 1.0).abs() < 1e-12);
        assert!(UnitModulus::new(0.0, 0.0).is_err());
    }

    #[test]
    fn hyp_dist_examples() {
        assert_eq!(hyp_dist(DiskCoeff::ZERO, DiskCoeff::ZERO), 0.0);
        assert!((hyp_dist(DiskCoeff::ZERO, dc(0.5, 0.0)) - 3f64.ln()).abs() < 1e-14);
        assert!((hyp_dist(DiskCoeff::ZERO, dc(1.0 / 3.0, 0.0)) - 2f64.ln()).abs() < 1e-14);
        let (z, w) = (dc(0.1, -0.4), dc(-0.3, 0.2));
        assert!((hyp_dist(z, w) - hyp_dist(w, z)).abs() < 1e-15);
    }

    #[test]
    fn mobius_examples() {
        let a = dc(0.3, -0.2);
        let z = dc(-0.5, 0.1);
        let id = mobius_t(DiskCoeff::ZERO, z);
        assert!((id.as_complex() - z.as_complex()).norm() < 1e-15);
        assert!((mobius_t(a, DiskCoeff::ZERO).as_complex() - a.as_complex()).norm() < 1e-15);
        let neg = dc(-0.3, 0.2);
        assert!(mobius_t(a, neg).modulus() < 1e-15);
    }

    #[test]
    fn delta_examples() {
        assert_eq!(delta_from_beta(1.0).unwrap(), 0.0);
        assert!((delta_from_beta(3f64.sqrt()).unwrap() - 0.5).abs() < 1e-15);
        assert!((delta_from_beta(2.0).unwrap() - 0.6).abs() < 1e-15);
        assert!(delta_from_beta(0.9).is_err());
    }

    #[test]
    fn lipschitz_examples() {
        let c = lipschitz_constants(1.0, 0.2).unwrap();
        assert_eq!(c.delta, 0.0);
        let c = lipschitz_constants(3f64.sqrt(), 0.5).unwrap();
        assert!((c.delta - 0.5).abs() < 1e-15);
        assert!((c.q1 - 0.5625).abs() < 1e-15);
        assert!((c.q2 - 1.0).abs() < 1e-15);
        assert!((c.c1_euclidean - 1.75 / 0.5625).abs() < 1e-12);
        assert!((c.delta_dprime - 0.8).abs() < 1e-15);
        assert!(c.delta_dprime >= c.delta.max(c.delta_prime));
        assert!((c.c1 - c.c1_euclidean * 2.0 / (1.0 - 0.64)).abs() < 1e-12);
        assert!(lipschitz_constants(2.0, 1.0).is_err());
    }

    #[test]
    fn far_points_keep_their_distance() {
        // two points on the same ray at hyperbolic radii 60 and 61
        let at = |s: f64| {
            let eta = 4.0 * (-s).exp() / (1.0 + (-s).exp()).powi(2);
            DiskCoeff::from_parts(Complex64::new(0.6, 0.8), eta).unwrap()
        };
        let (z, w) = (at(60.0), at(61.0));
        assert!((z.radius() - 60.0).abs() < 1e-12);
        assert!((hyp_dist(z, w) - 1.0).abs() < 1e-9);
        assert!((hyp_dist(DiskCoeff::ZERO, w) - 61.0).abs() < 1e-9);
        // an isometry moves both and keeps the gap
        let a = dc(0.3, -0.5);
        assert!((hyp_dist(mobius_t(a, z), mobius_t(a, w)) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn serde_keeps_eta() {
        let z = DiskCoeff::from_parts(Complex64::new(1.0, 0.0), 1e-40).unwrap();
        let back: DiskCoeff = serde_json::from_str(&serde_json::to_string(&z).unwrap()).unwrap();
        assert_eq!(back.eta(), 1e-40);
        assert!(serde_json::from_str::<DiskCoeff>(r#"{"re":1,"im":0,"eta":0}"#).is_err());
    }

    #[test]
    fn unit_angle_distance() {
        let a = UnitModulus::from_angle(3.0);
        let b = UnitModulus::from_angle(-3.0);
        assert!((a.angle_to(&b) - (2.0 * std::f64::consts::PI - 6.0)).abs() < 1e-12);
    }
}
