//! Complex dilatation of torus maps in the global conformal coordinate
//! `z = x + iy`: Beltrami coefficients, their composition law, dilatation,
//! exterior-power norms and empirical Hölder constants.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::disk::{hyp_dist, mobius_t, DiskCoeff, UnitModulus};
use crate::error::{Error, Result};
use crate::jacobian::Jacobian2;
use crate::maps::{MapSpec, OrbitDerivative};
use crate::torus::{sample_points, torus_distance, SampleMode, TorusPoint};

/// Multiplier applied to empirical Hölder constants wherever an upper bound
/// is needed.
pub const HOLDER_SAFETY_FACTOR: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeltramiSample {
    pub mu: DiskCoeff,
    pub theta: UnitModulus,
}

impl BeltramiSample {
    pub const CONFORMAL: BeltramiSample =
        BeltramiSample { mu: DiskCoeff::ZERO, theta: UnitModulus::ONE };
}

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct DilatationValue(pub f64);

impl DilatationValue {
    pub fn value(&self) -> f64 {
        self.0
    }
}

/// Wirtinger derivatives `(f_z, f_zbar)` of the linear map `J`.
pub fn wirtinger(j: &Jacobian2) -> (Complex64, Complex64) {
    let fz = Complex64::new(0.5 * (j.a + j.d), 0.5 * (j.c - j.b));
    let fzbar = Complex64::new(0.5 * (j.a - j.d), 0.5 * (j.c + j.b));
    (fz, fzbar)
}

/// Rejects coefficients whose `1 - |mu|^2` has underflowed.
fn regime_checked(mu: DiskCoeff) -> Result<DiskCoeff> {
    if !(mu.eta() > 0.0) {
        return Err(Error::LeftDiffeoRegime(mu.eta()));
    }
    Ok(mu)
}

/// `mu = f_zbar / f_z`, `theta = conj(f_z) / f_z`.
pub fn beltrami_from_jacobian(j: &Jacobian2) -> Result<BeltramiSample> {
    let det = j.det();
    if !(det > 0.0) {
        return Err(Error::Orientation(det));
    }
    beltrami_with_det(j, det)
}

/// `1 - |mu|^2 = det / |f_z|^2`, exact in terms of the determinant.
fn beltrami_with_det(j: &Jacobian2, det: f64) -> Result<BeltramiSample> {
    let (fz, fzbar) = wirtinger(j);
    let mu = DiskCoeff::from_parts(fzbar / fz, (det / fz.norm_sqr()).min(1.0))?;
    let theta = UnitModulus::from_complex(fz.conj() / fz)?;
    Ok(BeltramiSample { mu, theta })
}

/// Beltrami sample of `f^n` from its renormalized orbit derivative, with the
/// determinant taken from the accumulated `log_det` instead of the
/// cancellation-prone `ad - bc` of the rescaled matrix.
pub fn beltrami_of_orbit(od: &OrbitDerivative) -> Result<BeltramiSample> {
    beltrami_with_det(&od.matrix, (od.log_det - 2.0 * od.log_scale).exp())
}

/// `K = (1 + |mu|) / (1 - |mu|)`.
pub fn k_from_mu(mu: DiskCoeff) -> DilatationValue {
    DilatationValue(mu.radius().exp())
}

/// `K = s1 / s2`, ratio of the singular values of `J`.
pub fn k_from_singular(j: &Jacobian2) -> Result<DilatationValue> {
    let det = j.det();
    if det == 0.0 {
        return Err(Error::Degenerate);
    }
    if det < 0.0 {
        return Err(Error::Orientation(det));
    }
    let (s1, s2) = j.singular_values();
    if s2 == 0.0 {
        return Err(Error::Degenerate);
    }
    Ok(DilatationValue(s1 / s2))
}

/// `mu_{g o f}(p)` by the quotient
/// `(mu_f + theta_f mu_g(f p)) / (1 + conj(mu_f) theta_f mu_g(f p))`.
pub fn compose_beltrami(f_at_p: &BeltramiSample, g_at_fp: &BeltramiSample) -> DiskCoeff {
    let a = f_at_p.mu.as_complex();
    let w = f_at_p.theta.as_complex() * g_at_fp.mu.as_complex();
    DiskCoeff::from_complex_clamped((a + w) / (Complex64::new(1.0, 0.0) + a.conj() * w))
}

/// The same composition written as `T_{mu_f(p)}(theta_f(p) mu_g(f p))`.
pub fn compose_beltrami_mobius(f_at_p: &BeltramiSample, g_at_fp: &BeltramiSample) -> DiskCoeff {
    mobius_t(f_at_p.mu, g_at_fp.mu.rotated(f_at_p.theta))
}

/// Beltrami sample of `g o f` at `p`, including its rotation factor:
/// `theta_{g o f} = theta_g theta_f conj(w) / w` with
/// `w = 1 + conj(mu_f) theta_f mu_g`.
pub fn compose_samples(f_at_p: &BeltramiSample, g_at_fp: &BeltramiSample) -> Result<BeltramiSample> {
    let mu = compose_beltrami_mobius(f_at_p, g_at_fp);
    let w = Complex64::new(1.0, 0.0)
        + f_at_p.mu.as_complex().conj() * f_at_p.theta.as_complex() * g_at_fp.mu.as_complex();
    let theta = UnitModulus::from_complex(
        g_at_fp.theta.as_complex() * f_at_p.theta.as_complex() * w.conj() / w,
    )?;
    Ok(BeltramiSample { mu: regime_checked(mu)?, theta })
}

/// Beltrami sample of the map at a point.
pub fn sample_at(f: &MapSpec, p: &TorusPoint) -> Result<BeltramiSample> {
    beltrami_from_jacobian(&f.jacobian(p))
}

/// Fold `mu_{f^{k+1}}(x) = T_{mu_f(x)}(theta_f(x) mu_{f^k}(f x))` backwards
/// along `orbit[..]`, starting from `tail` as the coefficient at the end.
fn fold_back(samples: &[BeltramiSample], tail: DiskCoeff) -> Result<DiskCoeff> {
    let mut mu = tail;
    for s in samples.iter().rev() {
        mu = regime_checked(compose_beltrami_mobius(s, &BeltramiSample { mu, theta: UnitModulus::ONE }))?;
    }
    Ok(mu)
}

/// `mu_{f^n}(p)` from the composition recursion along the orbit of `p`.
/// `n = 0` gives the identity's coefficient, zero.
pub fn iterate_beltrami(f: &MapSpec, p: &TorusPoint, n: usize) -> Result<DiskCoeff> {
    let orbit = f.orbit(p, n.saturating_sub(1));
    let samples = if n == 0 {
        Vec::new()
    } else {
        orbit.iter().map(|q| sample_at(f, q)).collect::<Result<Vec<_>>>()?
    };
    fold_back(&samples, DiskCoeff::ZERO)
}

/// Both sides of `log K_{g o f^-1}(f p) = [mu_g(p), mu_f(p)]`, the left one
/// from the matrix `J_g(p) J_f(p)^-1` and the right one from hyperbolic distance.
pub fn log_k_identity_check(j_g: &Jacobian2, j_f: &Jacobian2) -> Result<(f64, f64)> {
    let inv = j_f.inverse().ok_or(Error::Degenerate)?;
    let lhs = k_from_singular(&(*j_g * inv))?.value().ln();
    let rhs = hyp_dist(beltrami_from_jacobian(j_g)?.mu, beltrami_from_jacobian(j_f)?.mu);
    Ok((lhs, rhs))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExteriorNorms {
    /// Norm on the first exterior power, the largest singular value.
    pub norm1: f64,
    /// Norm on the second exterior power, the determinant.
    pub norm2: f64,
    /// Norm on the full exterior algebra.
    pub full: f64,
}

pub fn exterior_norm(j: &Jacobian2) -> Result<ExteriorNorms> {
    let det = j.det();
    if !(det > 0.0) {
        return Err(Error::Orientation(det));
    }
    let (s1, _) = j.singular_values();
    Ok(ExteriorNorms { norm1: s1, norm2: det, full: s1.max(det) })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HolderEstimate {
    pub alpha: f64,
    /// Empirical sup of `[mu(p), mu(q)] / d(p, q)^alpha`.
    pub c_mu: f64,
    /// Empirical sup of `angle(theta(p), theta(q)) / d(p, q)^alpha`.
    pub c_theta: f64,
    pub pairs: usize,
}

/// Empirical Hölder constants of `mu_f` and `theta_f`.
///
/// Pairs are `p` uniform and `q = p + h e^{i phi}` with `log10 h` uniform in
/// `[-4, log10(1/2)]`, so short-range behavior is probed as well as global
/// oscillation. The values are suprema over samples, hence lower bounds.
pub fn holder_estimate(f: &MapSpec, alpha: f64, sample_count: usize, seed: u64) -> Result<HolderEstimate> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidParameter(format!("Hölder exponent {alpha} outside (0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = (-4.0, 0.5f64.log10());
    let (mut c_mu, mut c_theta) = (0.0f64, 0.0f64);
    for _ in 0..sample_count {
        let p = TorusPoint::new(rng.gen(), rng.gen());
        let h = 10f64.powf(rng.gen_range(lo..hi));
        let phi = rng.gen_range(0.0..std::f64::consts::TAU);
        let q = p.shifted(h * phi.cos(), h * phi.sin());
        let d = torus_distance(&p, &q);
        if d == 0.0 {
            continue;
        }
        let (sp, sq) = (sample_at(f, &p)?, sample_at(f, &q)?);
        let scale = d.powf(alpha);
        c_mu = c_mu.max(hyp_dist(sp.mu, sq.mu) / scale);
        c_theta = c_theta.max(sp.theta.angle_to(&sq.theta) / scale);
    }
    Ok(HolderEstimate { alpha, c_mu, c_theta, pairs: sample_count })
}

/// `sup |mu_f|` over the `m x m` midpoint lattice and the given extra points.
pub fn sup_mu_modulus(f: &MapSpec, m: usize, extra: &[TorusPoint]) -> Result<f64> {
    let nodes = crate::torus::midpoint_nodes(m)?;
    let mut best = 0.0f64;
    for p in nodes.iter().chain(extra) {
        best = best.max(sample_at(f, p)?.mu.modulus());
    }
    Ok(best)
}

/// Termwise evaluation of the telescoping bound
/// `[mu_{f^{n+1}}(p_0), mu_{f^{n+1}}(q_0)] <= sum_s [T_{mu_f(p_s)}(theta_f(p_s) nu_s),
/// T_{mu_f(q_s)}(theta_f(q_s) nu_s)]`, `nu_s = mu_{f^{n-s}}(q_{s+1})`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TelescopingTerms {
    pub n: usize,
    pub lhs: f64,
    pub terms: Vec<f64>,
    pub rhs: f64,
}

impl TelescopingTerms {
    pub fn margin(&self) -> f64 {
        self.rhs - self.lhs
    }
}

pub fn telescoping_terms(f: &MapSpec, p0: &TorusPoint, q0: &TorusPoint, n: usize) -> Result<TelescopingTerms> {
    let p_orbit = f.orbit(p0, n);
    let q_orbit = f.orbit(q0, n);
    let sp = p_orbit.iter().map(|x| sample_at(f, x)).collect::<Result<Vec<_>>>()?;
    let sq = q_orbit.iter().map(|x| sample_at(f, x)).collect::<Result<Vec<_>>>()?;
    // nu[j] = mu_{f^{n+1-j}}(q_j) for j = 1..=n+1; stored at index j - 1
    let mut nu = vec![DiskCoeff::ZERO; n + 1];
    for j in (1..=n).rev() {
        nu[j - 1] = regime_checked(compose_beltrami_mobius(&sq[j], &BeltramiSample { mu: nu[j], theta: UnitModulus::ONE }))?;
    }
    let lhs = hyp_dist(fold_back(&sp, DiskCoeff::ZERO)?, fold_back(&sq, DiskCoeff::ZERO)?);
    let terms: Vec<f64> = (0..=n)
        .map(|s| {
            let z = nu[s];
            let left = mobius_t(sp[s].mu, z.rotated(sp[s].theta));
            let right = mobius_t(sq[s].mu, z.rotated(sq[s].theta));
            hyp_dist(left, right)
        })
        .collect();
    let rhs = terms.iter().sum();
    Ok(TelescopingTerms { n, lhs, terms, rhs })
}

/// One row of a grid dump of the dilatation field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldRow {
    pub x: f64,
    pub y: f64,
    pub mu_re: f64,
    pub mu_im: f64,
    pub theta_arg: f64,
    #[serde(rename = "K")]
    pub k: f64,
}

/// `mu`, `theta` and `K` on the `m x m` lattice.
pub fn mu_field(f: &MapSpec, m: usize) -> Result<Vec<FieldRow>> {
    sample_points(SampleMode::Grid(m))?
        .into_iter()
        .map(|p| {
            let s = sample_at(f, &p)?;
            Ok(FieldRow {
                x: p.x(),
                y: p.y(),
                mu_re: s.mu.re(),
                mu_im: s.mu.im(),
                theta_arg: s.theta.angle(),
                k: k_from_mu(s.mu).value(),
            })
        })
        .collect()
}
