//! Catalog of orientation-preserving diffeomorphisms of the torus with
//! analytic Jacobians, closed-form inverses and orbit derivatives.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jacobian::Jacobian2;
use crate::torus::{wrap_delta, TorusPoint, INJECTIVITY_RADIUS};

/// Step of the central-difference cross-check.
pub const FD_STEP: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MapSpec {
    /// `(x, y) -> (x + wx, y + wy)`.
    Translation { omega: [f64; 2] },
    /// Toral automorphism by an integer matrix of determinant one.
    Linear { matrix: [[i64; 2]; 2] },
    /// `(x, y) -> (x + w1, y + w2 + a sin(2 pi m x))`.
    Skew { omega: [f64; 2], amplitude: f64, frequency: i64 },
    /// `x' = x + y + (k / 2pi) sin(2 pi x)`, `y' = y + (k / 2pi) sin(2 pi x)`.
    StandardMap { k: f64 },
    /// A translation after a smooth radial twist supported in `B(center, radius)`:
    /// points at distance `d` from the center rotate about it by
    /// `strength * exp(1 - 1 / (1 - (d / radius)^2))`.
    PerturbedTranslation { omega: [f64; 2], center: [f64; 2], radius: f64, strength: f64 },
}

/// `Df^n = exp(log_scale) * matrix`, with `matrix` rescaled to unit largest
/// singular value after every factor. `log_det` accumulates `log det Df`
/// factor by factor so the smallest singular value stays accurate even when
/// `det(matrix)` underflows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitDerivative {
    pub matrix: Jacobian2,
    pub log_scale: f64,
    pub log_det: f64,
}

impl OrbitDerivative {
    pub const IDENTITY: OrbitDerivative =
        OrbitDerivative { matrix: Jacobian2::IDENTITY, log_scale: 0.0, log_det: 0.0 };

    /// Left-multiply by one more derivative factor.
    pub fn push(&self, factor: &Jacobian2) -> OrbitDerivative {
        let m = *factor * self.matrix;
        let (s1, _) = m.singular_values();
        OrbitDerivative {
            matrix: m.scaled(1.0 / s1),
            log_scale: self.log_scale + s1.ln(),
            log_det: self.log_det + factor.det().ln(),
        }
    }

    /// `later . self`, the derivative along the concatenated orbit segment.
    pub fn then(&self, later: &OrbitDerivative) -> OrbitDerivative {
        let m = later.matrix * self.matrix;
        let (s1, _) = m.singular_values();
        OrbitDerivative {
            matrix: m.scaled(1.0 / s1),
            log_scale: self.log_scale + later.log_scale + s1.ln(),
            log_det: self.log_det + later.log_det,
        }
    }

    /// `log` of the largest singular value of `Df^n`.
    pub fn log_sigma1(&self) -> f64 {
        self.log_scale + self.matrix.singular_values().0.ln()
    }

    /// `log K_{f^n} = log(s1 / s2) = 2 log s1 - log det`.
    pub fn log_dilatation(&self) -> f64 {
        (2.0 * self.log_sigma1() - self.log_det).max(0.0)
    }

    /// `log max(s1, det)`, the log of the full exterior-power norm.
    pub fn log_exterior_norm(&self) -> f64 {
        self.log_sigma1().max(self.log_det)
    }

    pub fn reconstruct(&self) -> Jacobian2 {
        self.matrix.scaled(self.log_scale.exp())
    }
}

impl MapSpec {
    pub fn validate(&self) -> Result<()> {
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        match self {
            MapSpec::Translation { omega } => {
                if !finite(omega) {
                    return Err(Error::InvalidParameter("translation vector must be finite".into()));
                }
            }
            MapSpec::Linear { matrix } => {
                let det = matrix[0][0] * matrix[1][1] - matrix[0][1] * matrix[1][0];
                if det != 1 {
                    return Err(Error::InvalidParameter(format!(
                        "linear map must have determinant 1, got {det}"
                    )));
                }
            }
            MapSpec::Skew { omega, amplitude, .. } => {
                if !finite(omega) || !amplitude.is_finite() {
                    return Err(Error::InvalidParameter("skew parameters must be finite".into()));
                }
            }
            MapSpec::StandardMap { k } => {
                if !k.is_finite() {
                    return Err(Error::InvalidParameter("standard map k must be finite".into()));
                }
            }
            MapSpec::PerturbedTranslation { omega, center, radius, strength } => {
                if !finite(omega) || !finite(center) || !strength.is_finite() {
                    return Err(Error::InvalidParameter("twist parameters must be finite".into()));
                }
                if !(*radius > 0.0 && *radius < INJECTIVITY_RADIUS) {
                    return Err(Error::InvalidParameter(format!(
                        "twist radius {radius} must lie in (0, 1/2)"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Short human-readable descriptor used in reports.
    pub fn label(&self) -> String {
        match self {
            MapSpec::Translation { omega } => format!("translation({}, {})", omega[0], omega[1]),
            MapSpec::Linear { matrix } => format!("linear({:?})", matrix),
            MapSpec::Skew { omega, amplitude, frequency } => {
                format!("skew({}, {}, a={amplitude}, m={frequency})", omega[0], omega[1])
            }
            MapSpec::StandardMap { k } => format!("standard_map({k})"),
            MapSpec::PerturbedTranslation { omega, center, radius, strength } => format!(
                "perturbed_translation(({}, {}), c=({}, {}), rho={radius}, s={strength})",
                omega[0], omega[1], center[0], center[1]
            ),
        }
    }

    /// The Arnold cat map `[[2, 1], [1, 1]]`.
    pub fn cat_map() -> Self {
        MapSpec::Linear { matrix: [[2, 1], [1, 1]] }
    }

    pub fn eval(&self, p: &TorusPoint) -> TorusPoint {
        let (x, y) = (p.x(), p.y());
        match self {
            MapSpec::Translation { omega } => TorusPoint::new(x + omega[0], y + omega[1]),
            MapSpec::Linear { matrix: m } => TorusPoint::new(
                m[0][0] as f64 * x + m[0][1] as f64 * y,
                m[1][0] as f64 * x + m[1][1] as f64 * y,
            ),
            MapSpec::Skew { omega, amplitude, frequency } => TorusPoint::new(
                x + omega[0],
                y + omega[1] + amplitude * (TAU * *frequency as f64 * x).sin(),
            ),
            MapSpec::StandardMap { k } => {
                let kick = k / TAU * (TAU * x).sin();
                TorusPoint::new(x + y + kick, y + kick)
            }
            MapSpec::PerturbedTranslation { omega, center, radius, strength } => {
                let c = TorusPoint::from(*center);
                let (vx, vy) = c.delta_to(p);
                let phi = twist_angle(vx.hypot(vy), *radius, *strength);
                if phi == 0.0 {
                    return TorusPoint::new(x + omega[0], y + omega[1]);
                }
                let (s, co) = phi.sin_cos();
                TorusPoint::new(
                    c.x() + co * vx - s * vy + omega[0],
                    c.y() + s * vx + co * vy + omega[1],
                )
            }
        }
    }

    pub fn jacobian(&self, p: &TorusPoint) -> Jacobian2 {
        match self {
            MapSpec::Translation { .. } => Jacobian2::IDENTITY,
            MapSpec::Linear { matrix: m } => {
                Jacobian2::new(m[0][0] as f64, m[0][1] as f64, m[1][0] as f64, m[1][1] as f64)
            }
            MapSpec::Skew { amplitude, frequency, .. } => {
                let w = TAU * *frequency as f64;
                Jacobian2::new(1.0, 0.0, amplitude * w * (w * p.x()).cos(), 1.0)
            }
            MapSpec::StandardMap { k } => {
                let s = k * (TAU * p.x()).cos();
                Jacobian2::new(1.0 + s, 1.0, s, 1.0)
            }
            MapSpec::PerturbedTranslation { center, radius, strength, .. } => {
                let (vx, vy) = TorusPoint::from(*center).delta_to(p);
                let d = vx.hypot(vy);
                let phi = twist_angle(d, *radius, *strength);
                if phi == 0.0 {
                    return Jacobian2::IDENTITY;
                }
                // grad(phi) = g * v with g = phi'(d) / d
                let u2 = (d / radius).powi(2);
                let g = -2.0 * phi / (radius * radius * (1.0 - u2).powi(2));
                let shear = Jacobian2::new(
                    1.0 - g * vx * vy,
                    -g * vy * vy,
                    g * vx * vx,
                    1.0 + g * vx * vy,
                );
                let (s, c) = phi.sin_cos();
                Jacobian2::new(c, -s, s, c) * shear
            }
        }
    }

    /// Central-difference Jacobian, a cross-check for [`MapSpec::jacobian`].
    pub fn fd_jacobian(&self, p: &TorusPoint, h: f64) -> Jacobian2 {
        fd_jacobian_of(|q| self.eval(q), p, h)
    }

    pub fn iterate(&self, p: &TorusPoint, n: usize) -> TorusPoint {
        (0..n).fold(*p, |q, _| self.eval(&q))
    }

    /// `p, f(p), ..., f^n(p)`.
    pub fn orbit(&self, p: &TorusPoint, n: usize) -> Vec<TorusPoint> {
        let mut out = Vec::with_capacity(n + 1);
        let mut q = *p;
        out.push(q);
        for _ in 0..n {
            q = self.eval(&q);
            out.push(q);
        }
        out
    }

    pub fn inverse_eval(&self, q: &TorusPoint) -> TorusPoint {
        let (x, y) = (q.x(), q.y());
        match self {
            MapSpec::Translation { omega } => TorusPoint::new(x - omega[0], y - omega[1]),
            MapSpec::Linear { matrix: m } => {
                // adjugate of a determinant-one matrix
                let (a, b, c, d) = (m[0][0] as f64, m[0][1] as f64, m[1][0] as f64, m[1][1] as f64);
                TorusPoint::new(d * x - b * y, -c * x + a * y)
            }
            MapSpec::Skew { omega, amplitude, frequency } => {
                let x0 = x - omega[0];
                TorusPoint::new(
                    x0,
                    y - omega[1] - amplitude * (TAU * *frequency as f64 * x0).sin(),
                )
            }
            MapSpec::StandardMap { k } => {
                let x0 = x - y;
                TorusPoint::new(x0, y - k / TAU * (TAU * x0).sin())
            }
            MapSpec::PerturbedTranslation { omega, center, radius, strength } => {
                // the twist preserves the distance to its center, so it is
                // undone by rotating back through the same angle
                let q0 = TorusPoint::new(x - omega[0], y - omega[1]);
                let c = TorusPoint::from(*center);
                let (vx, vy) = c.delta_to(&q0);
                let phi = twist_angle(vx.hypot(vy), *radius, *strength);
                if phi == 0.0 {
                    return q0;
                }
                let (s, co) = (-phi).sin_cos();
                TorusPoint::new(c.x() + co * vx - s * vy, c.y() + s * vx + co * vy)
            }
        }
    }

    /// `Df^n_p` as a chain-rule product along the orbit, renormalized after
    /// every factor.
    pub fn orbit_jacobian(&self, p: &TorusPoint, n: usize) -> Result<OrbitDerivative> {
        if n == 0 {
            return Err(Error::InvalidParameter("orbit_jacobian needs n >= 1".into()));
        }
        Ok(*self.orbit_jacobians(p, n).last().expect("n >= 1"))
    }

    /// Prefix products `Df^1_p, ..., Df^n_p`.
    pub fn orbit_jacobians(&self, p: &TorusPoint, n: usize) -> Vec<OrbitDerivative> {
        let mut out = Vec::with_capacity(n);
        let mut acc = OrbitDerivative::IDENTITY;
        let mut q = *p;
        for _ in 0..n {
            acc = acc.push(&self.jacobian(&q));
            out.push(acc);
            q = self.eval(&q);
        }
        out
    }
}

/// Rotation angle of the twist at distance `d` from its center.
fn twist_angle(d: f64, radius: f64, strength: f64) -> f64 {
    if d >= radius || strength == 0.0 {
        return 0.0;
    }
    let u2 = (d / radius).powi(2);
    strength * (1.0 - 1.0 / (1.0 - u2)).exp()
}

pub(crate) fn fd_jacobian_of<F: Fn(&TorusPoint) -> TorusPoint>(f: F, p: &TorusPoint, h: f64) -> Jacobian2 {
    let diff = |a: TorusPoint, b: TorusPoint| (wrap_delta(a.x() - b.x()), wrap_delta(a.y() - b.y()));
    let (ux, vx) = diff(f(&p.shifted(h, 0.0)), f(&p.shifted(-h, 0.0)));
    let (uy, vy) = diff(f(&p.shifted(0.0, h)), f(&p.shifted(0.0, -h)));
    let s = 0.5 / h;
    Jacobian2::new(ux * s, uy * s, vx * s, vy * s)
}

/// Central-difference Jacobian of `f^n`.
pub fn fd_orbit_jacobian(f: &MapSpec, p: &TorusPoint, n: usize, h: f64) -> Jacobian2 {
    fd_jacobian_of(|q| f.iterate(q, n), p, h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus::{sample_points, SampleMode};

    fn catalog() -> Vec<MapSpec> {
        vec![
            MapSpec::Translation { omega: [0.3, 0.4] },
            MapSpec::cat_map(),
            MapSpec::Linear { matrix: [[1, 1], [0, 1]] },
            MapSpec::Skew { omega: [0.2, 0.1], amplitude: 0.15, frequency: 2 },
            MapSpec::StandardMap { k: 1.5 },
            MapSpec::StandardMap { k: 6.0 },
            MapSpec::PerturbedTranslation {
                omega: [0.1, 0.3],
                center: [0.5, 0.5],
                radius: 0.2,
                strength: 1.2,
            },
        ]
    }

    fn close(p: TorusPoint, x: f64, y: f64) -> bool {
        let d = crate::torus::torus_distance(&p, &TorusPoint::new(x, y));
        d < 1e-12
    }

    #[test]
    fn eval_examples() {
        let t = MapSpec::Translation { omega: [0.3, 0.4] };
        assert!(close(t.eval(&TorusPoint::new(0.9, 0.9)), 0.2, 0.3));
        assert!(close(MapSpec::cat_map().eval(&TorusPoint::new(0.5, 0.5)), 0.5, 0.0));
        let s0 = MapSpec::StandardMap { k: 0.0 };
        let p = TorusPoint::new(0.7, 0.6);
        assert!(close(s0.eval(&p), 0.3, 0.6));
    }

    #[test]
    fn jacobian_examples() {
        let p = TorusPoint::new(0.1, 0.2);
        assert_eq!(MapSpec::Translation { omega: [0.3, 0.4] }.jacobian(&p), Jacobian2::IDENTITY);
        assert_eq!(MapSpec::cat_map().jacobian(&p), Jacobian2::new(2.0, 1.0, 1.0, 1.0));
    }

    #[test]
    fn analytic_jacobian_matches_central_difference() {
        let pts = sample_points(SampleMode::Random { count: 200, seed: 11 }).unwrap();
        for f in catalog() {
            for p in &pts {
                let err = f.jacobian(p).max_abs_diff(&f.fd_jacobian(p, FD_STEP));
                assert!(err < 1e-6, "{} at {:?}: {err}", f.label(), p);
            }
        }
    }

    #[test]
    fn orientation_and_area_preservation() {
        let pts = sample_points(SampleMode::Random { count: 10_000, seed: 12 }).unwrap();
        for f in catalog() {
            for p in &pts {
                let det = f.jacobian(p).det();
                assert!(det > 0.0);
                assert!((det - 1.0).abs() < 1e-12, "{} det {det}", f.label());
            }
        }
    }

    #[test]
    fn inverse_round_trip() {
        let pts = sample_points(SampleMode::Random { count: 1000, seed: 13 }).unwrap();
        for f in catalog() {
            for q in &pts {
                let back = f.eval(&f.inverse_eval(q));
                assert!(crate::torus::torus_distance(&back, q) < 1e-10, "{}", f.label());
                let fwd = f.inverse_eval(&f.eval(q));
                assert!(crate::torus::torus_distance(&fwd, q) < 1e-10, "{}", f.label());
            }
        }
        let t = MapSpec::Translation { omega: [0.3, 0.4] };
        assert!(close(t.inverse_eval(&TorusPoint::new(0.1, 0.1)), 0.8, 0.7));
    }

    #[test]
    fn orbit_jacobian_translation_and_linear() {
        let p = TorusPoint::new(0.3, 0.6);
        let t = MapSpec::Translation { omega: [0.3, 0.4] }.orbit_jacobian(&p, 10).unwrap();
        assert_eq!(t.matrix, Jacobian2::IDENTITY);
        assert_eq!(t.log_scale, 0.0);
        let od = MapSpec::cat_map().orbit_jacobian(&p, 3).unwrap();
        let a3 = od.reconstruct();
        // A^3 = [[13, 8], [8, 5]]
        let want = Jacobian2::new(13.0, 8.0, 8.0, 5.0);
        assert!(a3.max_abs_diff(&want) < 1e-12);
        assert!((od.matrix.singular_values().0 - 1.0).abs() < 1e-9);
        assert!(MapSpec::cat_map().orbit_jacobian(&p, 0).is_err());
    }

    #[test]
    fn orbit_jacobian_matches_fd_of_composition() {
        let f = MapSpec::StandardMap { k: 1.5 };
        for p in sample_points(SampleMode::Random { count: 50, seed: 14 }).unwrap() {
            let od = f.orbit_jacobian(&p, 3).unwrap().reconstruct();
            let fd = fd_orbit_jacobian(&f, &p, 3, FD_STEP);
            let rel = od.max_abs_diff(&fd) / od.max_abs();
            assert!(rel < 1e-4, "rel {rel}");
        }
    }

    #[test]
    fn cocycle_property() {
        let pts = sample_points(SampleMode::Random { count: 100, seed: 15 }).unwrap();
        for f in catalog() {
            for p in &pts {
                let (m, n) = (4, 7);
                let whole = f.orbit_jacobian(p, m + n).unwrap();
                let first = f.orbit_jacobian(p, m).unwrap();
                let second = f.orbit_jacobian(&f.iterate(p, m), n).unwrap();
                let joined = first.then(&second);
                let scale = (joined.log_scale - whole.log_scale).exp();
                let rel = joined.matrix.scaled(scale).max_abs_diff(&whole.matrix);
                assert!(rel < 1e-8, "{} rel {rel}", f.label());
            }
        }
    }

    #[test]
    fn long_orbits_do_not_overflow() {
        let od = MapSpec::cat_map().orbit_jacobian(&TorusPoint::new(0.1, 0.2), 2000).unwrap();
        let log_lambda = ((3.0 + 5f64.sqrt()) / 2.0).ln();
        assert!((od.log_sigma1() / 2000.0 - log_lambda).abs() < 1e-12);
        assert!((od.log_dilatation() / 4000.0 - log_lambda).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(MapSpec::Linear { matrix: [[1, 1], [1, 1]] }.validate().is_err());
        assert!(MapSpec::Linear { matrix: [[0, 1], [1, 0]] }.validate().is_err());
        let bad = MapSpec::PerturbedTranslation {
            omega: [0.1, 0.1],
            center: [0.5, 0.5],
            radius: 0.6,
            strength: 1.0,
        };
        assert!(bad.validate().is_err());
        for f in catalog() {
            f.validate().unwrap();
        }
    }

    #[test]
    fn map_descriptor_json() {
        let f: MapSpec = serde_json::from_str(r#"{"kind":"standard_map","k":1.5}"#).unwrap();
        assert_eq!(f, MapSpec::StandardMap { k: 1.5 });
        assert!(serde_json::from_str::<MapSpec>(r#"{"kind":"bakers","k":1.5}"#).is_err());
    }
}
