//! Finite families of permuted domains and the diagnostics that go with
//! them: disjointness and permutation checks, bounded geometry, area budget,
//! accumulation, `xi(n)`, the sum-of-diameters bound and the dilatation cap
//! on the complement `S`.
//!
//! A finite family can never be dense and its permutation is only defined up
//! to a truncation horizon, so every report here describes a finite analogue
//! of the infinite conditions and says so.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dilatation::{holder_estimate, iterate_beltrami, sup_mu_modulus, HolderEstimate, HOLDER_SAFETY_FACTOR};
use crate::disk::{delta_from_beta, hyp_dist, lipschitz_constants, metric_factor, LipschitzConstants};
use crate::error::{Error, Result};
use crate::maps::MapSpec;
use crate::torus::{sample_points, torus_distance, SampleMode, TorusPoint, INJECTIVITY_RADIUS, KAPPA, TOTAL_AREA};

pub const DEFAULT_BOUNDARY_SAMPLES: usize = 64;

/// Pairs sampled for the Hölder constants inside [`lemma_constants`].
pub const HOLDER_PAIRS: usize = 10_000;

/// Lattice size of the `sup |mu_f|` scan.
pub const SUP_SCAN_GRID: usize = 64;

fn default_boundary_count() -> usize {
    DEFAULT_BOUNDARY_SAMPLES
}

/// A domain sandwiched as `B(center, inradius) ⊆ D ⊆ B(center, circumradius)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub label: i64,
    pub center: TorusPoint,
    pub inradius: f64,
    pub circumradius: f64,
    pub diameter: f64,
    #[serde(default = "default_boundary_count")]
    pub boundary_count: usize,
}

impl Domain {
    pub fn new(label: i64, center: TorusPoint, inradius: f64, circumradius: f64, diameter: f64) -> Result<Self> {
        let d = Domain {
            label,
            center,
            inradius,
            circumradius,
            diameter,
            boundary_count: DEFAULT_BOUNDARY_SAMPLES,
        };
        d.check()?;
        Ok(d)
    }

    /// Round disk of the given radius.
    pub fn disk(label: i64, center: TorusPoint, radius: f64) -> Result<Self> {
        Self::new(label, center, radius, radius, 2.0 * radius)
    }

    fn check(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(format!("domain {}: {msg}", self.label)));
        if !(self.inradius > 0.0 && self.inradius <= self.circumradius) {
            return bad(format!("need 0 < r <= R, got r = {}, R = {}", self.inradius, self.circumradius));
        }
        // contained in an embedded disk
        if self.circumradius > INJECTIVITY_RADIUS {
            return bad(format!("R = {} exceeds the injectivity radius", self.circumradius));
        }
        if !(self.diameter >= self.inradius && self.diameter <= 2.0 * self.circumradius * (1.0 + 1e-12)) {
            return bad(format!("diameter {} outside [r, 2R]", self.diameter));
        }
        if self.boundary_count == 0 {
            return bad("needs at least one boundary sample".into());
        }
        Ok(())
    }

    pub fn ratio(&self) -> f64 {
        self.circumradius / self.inradius
    }

    /// `k` equally spaced points on the circumscribed circle.
    pub fn boundary_samples_n(&self, k: usize) -> Vec<TorusPoint> {
        (0..k)
            .map(|i| {
                let t = std::f64::consts::TAU * i as f64 / k as f64;
                self.center.shifted(self.circumradius * t.cos(), self.circumradius * t.sin())
            })
            .collect()
    }

    pub fn boundary_samples(&self) -> Vec<TorusPoint> {
        self.boundary_samples_n(self.boundary_count)
    }

    pub fn area_lower_bound(&self) -> f64 {
        KAPPA * self.inradius * self.inradius
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawCollection {
    domains: Vec<Domain>,
    #[serde(default)]
    permutation: Vec<(i64, i64)>,
    #[serde(default = "one")]
    alpha: f64,
    #[serde(default)]
    truncation_note: String,
}

fn one() -> f64 {
    1.0
}

/// A finite family of domains with the label map `sigma`, `f(D_k) = D_{sigma(k)}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCollection", into = "RawCollection")]
pub struct DomainCollection {
    domains: Vec<Domain>,
    index: BTreeMap<i64, usize>,
    permutation: BTreeMap<i64, i64>,
    pub alpha: f64,
    pub truncation_note: String,
}

impl TryFrom<RawCollection> for DomainCollection {
    type Error = Error;

    fn try_from(raw: RawCollection) -> Result<Self> {
        DomainCollection::new(raw.domains, raw.permutation, raw.alpha, raw.truncation_note)
    }
}

impl From<DomainCollection> for RawCollection {
    fn from(c: DomainCollection) -> Self {
        RawCollection {
            permutation: c.permutation.iter().map(|(k, v)| (*k, *v)).collect(),
            domains: c.domains,
            alpha: c.alpha,
            truncation_note: c.truncation_note,
        }
    }
}

impl DomainCollection {
    pub fn new(
        domains: Vec<Domain>,
        permutation: Vec<(i64, i64)>,
        alpha: f64,
        truncation_note: String,
    ) -> Result<Self> {
        let mut index = BTreeMap::new();
        for (i, d) in domains.iter().enumerate() {
            d.check()?;
            if index.insert(d.label, i).is_some() {
                return Err(Error::InvalidParameter(format!("duplicate label {}", d.label)));
            }
        }
        let mut map = BTreeMap::new();
        let mut targets = BTreeSet::new();
        for (k, v) in permutation {
            if map.insert(k, v).is_some() {
                return Err(Error::InvalidParameter(format!("label {k} has two images")));
            }
            if !targets.insert(v) {
                return Err(Error::InvalidParameter(format!("permutation is not injective at image {v}")));
            }
        }
        Ok(Self { domains, index, permutation: map, alpha, truncation_note })
    }

    pub fn domains(&self) -> &[Domain] {
        &self.domains
    }

    pub fn len(&self) -> usize {
        self.domains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.domains.is_empty()
    }

    pub fn get(&self, label: i64) -> Option<&Domain> {
        self.index.get(&label).map(|&i| &self.domains[i])
    }

    pub fn sigma(&self, label: i64) -> Option<i64> {
        self.permutation.get(&label).copied()
    }

    pub fn permutation(&self) -> &BTreeMap<i64, i64> {
        &self.permutation
    }

    /// `xi(n)`: the sum of the `n + 1` largest `diameter^alpha`.
    pub fn xi(&self, alpha: f64, n: usize) -> Result<f64> {
        let d: Vec<f64> = self.domains.iter().map(|d| d.diameter).collect();
        xi_of_diameters(&d, alpha, n)
    }

    /// Labels `t, sigma(t), ..., sigma^n(t)`.
    pub fn chain(&self, t: i64, n: usize) -> Result<Vec<i64>> {
        if self.get(t).is_none() {
            return Err(Error::BrokenChain(format!("start label {t} not present")));
        }
        let mut out = vec![t];
        let mut cur = t;
        for _ in 0..n {
            cur = self
                .sigma(cur)
                .ok_or_else(|| Error::BrokenChain(format!("sigma({cur}) undefined")))?;
            if self.get(cur).is_none() {
                return Err(Error::BrokenChain(format!("label {cur} not present")));
            }
            out.push(cur);
        }
        Ok(out)
    }

    /// Labels with no preimage under `sigma`, in label order.
    pub fn chain_heads(&self) -> Vec<i64> {
        let images: BTreeSet<i64> = self.permutation.values().copied().collect();
        self.index.keys().copied().filter(|k| !images.contains(k)).collect()
    }
}

/// Sum of the `n + 1` largest values of `d^alpha`. `alpha = 0` counts domains.
pub fn xi_of_diameters(diameters: &[f64], alpha: f64, n: usize) -> Result<f64> {
    if diameters.len() < n + 1 {
        return Err(Error::InsufficientFamily { have: diameters.len(), need: n + 1 });
    }
    if !(alpha >= 0.0) {
        return Err(Error::InvalidParameter(format!("alpha {alpha} must be >= 0")));
    }
    let mut v: Vec<f64> = diameters.iter().map(|d| d.powf(alpha)).collect();
    v.sort_by(|a, b| b.total_cmp(a));
    Ok(v[..=n].iter().sum())
}

pub fn beta_of(c: &DomainCollection) -> Result<f64> {
    if c.is_empty() {
        return Err(Error::InsufficientFamily { have: 0, need: 1 });
    }
    Ok(c.domains.iter().map(Domain::ratio).fold(1.0, f64::max))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollectionReport {
    pub domain_count: usize,
    /// Pairs `(j, k)` with `d(p_j, p_k) <= R_j + R_k`, sorted.
    pub disjointness_violations: Vec<(i64, i64)>,
    /// Labels whose sigma-orbit returns to itself or leaves the family.
    pub orbit_violations: Vec<String>,
    /// Max over the 100 x 100 lattice of the distance to the nearest domain.
    pub covering_radius: f64,
    /// `sum kappa r_k^2`, which disjoint domains keep below the total area.
    pub area_sum: f64,
    pub passed: bool,
    pub truncation_note: String,
}

pub fn verify_collection(c: &DomainCollection) -> CollectionReport {
    let ds = &c.domains;
    let mut disjoint = Vec::new();
    for j in 0..ds.len() {
        for k in j + 1..ds.len() {
            if torus_distance(&ds[j].center, &ds[k].center) <= ds[j].circumradius + ds[k].circumradius {
                let (a, b) = (ds[j].label.min(ds[k].label), ds[j].label.max(ds[k].label));
                disjoint.push((a, b));
            }
        }
    }
    disjoint.sort_unstable();

    let mut orbit = Vec::new();
    for d in ds {
        let mut seen = BTreeSet::from([d.label]);
        let mut cur = d.label;
        while let Some(next) = c.sigma(cur) {
            if c.get(next).is_none() {
                orbit.push(format!("sigma({cur}) = {next} is not in the family"));
                break;
            }
            if !seen.insert(next) {
                orbit.push(format!("orbit of {} repeats at {next}", d.label));
                break;
            }
            cur = next;
        }
    }

    let probes = sample_points(SampleMode::Grid(100)).expect("nonzero grid");
    let covering_radius = if ds.is_empty() {
        f64::INFINITY
    } else {
        probes
            .iter()
            .map(|x| {
                ds.iter()
                    .map(|d| (torus_distance(x, &d.center) - d.inradius).max(0.0))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    };
    let area_sum: f64 = ds.iter().map(Domain::area_lower_bound).sum();
    let passed = disjoint.is_empty() && orbit.is_empty() && area_sum <= TOTAL_AREA;
    CollectionReport {
        domain_count: ds.len(),
        disjointness_violations: disjoint,
        orbit_violations: orbit,
        covering_radius,
        area_sum,
        passed,
        truncation_note: truncation_text(c),
    }
}

fn truncation_text(c: &DomainCollection) -> String {
    let base = format!(
        "finite family of {} domains; density and all-time disjointness of iterates are only checked up to this truncation",
        c.len()
    );
    if c.truncation_note.is_empty() {
        base
    } else {
        format!("{base}; {}", c.truncation_note)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PermutationFailure {
    pub label: i64,
    pub image_label: i64,
    /// Distance from `f(p_k)` to `p_{sigma(k)}`.
    pub center_error: f64,
    /// Min and max distance of the mapped boundary from the image center.
    pub image_inradius: f64,
    pub image_circumradius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PermutationReport {
    pub tolerance: f64,
    pub tested: usize,
    /// Labels with `sigma` undefined (the end of a truncated chain).
    pub untested: Vec<i64>,
    pub failures: Vec<PermutationFailure>,
    pub passed: bool,
}

/// Checks `f(D_k) ≈ D_{sigma(k)}` by re-sandwiching the mapped boundary about
/// the mapped center: the image boundary must lie in the annulus
/// `r_{sigma(k)} - tol <= |x - p_{sigma(k)}| <= R_{sigma(k)} + tol` and the
/// mapped center must be within `tol` of `p_{sigma(k)}`.
pub fn verify_permutation(f: &MapSpec, c: &DomainCollection, tol: f64) -> Result<PermutationReport> {
    if c.permutation.is_empty() && c.len() > 1 {
        return Err(Error::IncompletePermutation("no sigma entries".into()));
    }
    let mut failures = Vec::new();
    let mut untested = Vec::new();
    let mut tested = 0;
    for d in &c.domains {
        let Some(target) = c.sigma(d.label) else {
            untested.push(d.label);
            continue;
        };
        let img = c.get(target).ok_or_else(|| {
            Error::IncompletePermutation(format!("sigma({}) = {target} is not in the family", d.label))
        })?;
        tested += 1;
        let mapped_center = f.eval(&d.center);
        let center_error = torus_distance(&mapped_center, &img.center);
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for b in d.boundary_samples() {
            let r = torus_distance(&f.eval(&b), &img.center);
            lo = lo.min(r);
            hi = hi.max(r);
        }
        if center_error > tol || hi > img.circumradius + tol || lo < img.inradius - tol {
            failures.push(PermutationFailure {
                label: d.label,
                image_label: target,
                center_error,
                image_inradius: lo,
                image_circumradius: hi,
            });
        }
    }
    Ok(PermutationReport { tolerance: tol, tested, untested, passed: failures.is_empty(), failures })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NullSequenceReport {
    pub epsilon: f64,
    /// Domains with diameter `>= epsilon`.
    pub large_count: usize,
    pub area_sum: f64,
    /// False when `sum kappa r^2` exceeds the total area, which no family of
    /// disjoint domains can do.
    pub passed: bool,
}

pub fn null_sequence_check(c: &DomainCollection, epsilon: f64) -> NullSequenceReport {
    let large_count = c.domains.iter().filter(|d| d.diameter >= epsilon).count();
    let area_sum: f64 = c.domains.iter().map(Domain::area_lower_bound).sum();
    NullSequenceReport { epsilon, large_count, area_sum, passed: area_sum <= TOTAL_AREA }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityEntry {
    pub scale: f64,
    pub satisfied: bool,
    /// A witness domain of diameter `< scale` within `scale` of the probe.
    pub witness: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub probe: TorusPoint,
    pub entries: Vec<DensityEntry>,
    pub note: String,
}

/// For each scale `s`, is there a domain of diameter `< s` within distance `s`
/// of `probe`? The distance to a domain is measured to its inscribed ball.
pub fn density_diagnostic(c: &DomainCollection, probe: &TorusPoint, scales: &[f64]) -> Result<DensityReport> {
    if let Some(d) = c.domains.iter().find(|d| torus_distance(probe, &d.center) < d.inradius) {
        return Err(Error::NotInS(d.label));
    }
    let entries = scales
        .iter()
        .map(|&s| {
            let witness = c
                .domains
                .iter()
                .filter(|d| d.diameter < s && (torus_distance(probe, &d.center) - d.inradius).max(0.0) <= s)
                .min_by(|a, b| torus_distance(probe, &a.center).total_cmp(&torus_distance(probe, &b.center)))
                .map(|d| d.label);
            DensityEntry { scale: s, satisfied: witness.is_some(), witness }
        })
        .collect();
    Ok(DensityReport { probe: *probe, entries, note: truncation_text(c) })
}

/// Constants of the sum-of-diameters bound and the `xi` route:
/// `C = c1 * Ĉ_mu + (2 delta / (1 - delta^2)) * Ĉ_theta` with both Hölder
/// estimates multiplied by [`HOLDER_SAFETY_FACTOR`], and
/// `C' = 2 log beta + log sup K_f`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaConstants {
    pub beta: f64,
    pub delta: f64,
    pub delta_prime: f64,
    pub lipschitz: LipschitzConstants,
    pub holder: HolderEstimate,
    pub safety_factor: f64,
    pub c_tilde1: f64,
    pub c_tilde2: f64,
    pub c: f64,
    pub sup_k: f64,
    pub c_prime: f64,
}

pub fn lemma_constants(f: &MapSpec, c: &DomainCollection, alpha: f64, seed: u64) -> Result<LemmaConstants> {
    let beta = beta_of(c)?;
    let delta = delta_from_beta(beta)?;
    let centers: Vec<TorusPoint> = c.domains.iter().map(|d| d.center).collect();
    let delta_prime = sup_mu_modulus(f, SUP_SCAN_GRID, &centers)?;
    let lipschitz = lipschitz_constants(beta, delta_prime)?;
    let holder = holder_estimate(f, alpha, HOLDER_PAIRS, seed)?;
    let c_tilde1 = lipschitz.c1 * HOLDER_SAFETY_FACTOR * holder.c_mu;
    let c_tilde2 = delta * metric_factor(delta) * HOLDER_SAFETY_FACTOR * holder.c_theta;
    let sup_k = (1.0 + delta_prime) / (1.0 - delta_prime);
    Ok(LemmaConstants {
        beta,
        delta,
        delta_prime,
        lipschitz,
        holder,
        safety_factor: HOLDER_SAFETY_FACTOR,
        c_tilde1,
        c_tilde2,
        c: c_tilde1 + c_tilde2,
        sup_k,
        c_prime: 2.0 * beta.ln() + sup_k.ln(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SumDiamReport {
    pub start: i64,
    pub n: usize,
    pub chain: Vec<i64>,
    /// `max over boundary samples q of [mu_{f^{n+1}}(p), mu_{f^{n+1}}(q)]`, `p` the center.
    pub lhs: f64,
    /// `C * sum over the chain of diameter^alpha`.
    pub rhs: f64,
    pub margin: f64,
    pub passed: bool,
}

pub fn sum_diam_check(f: &MapSpec, c: &DomainCollection, alpha: f64, n: usize, t: i64) -> Result<SumDiamReport> {
    let k = lemma_constants(f, c, alpha, 0)?;
    sum_diam_check_with(f, c, alpha, n, t, &k)
}

pub fn sum_diam_check_with(
    f: &MapSpec,
    c: &DomainCollection,
    alpha: f64,
    n: usize,
    t: i64,
    constants: &LemmaConstants,
) -> Result<SumDiamReport> {
    let chain = c.chain(t, n)?;
    let start = c.get(t).expect("chain checked the start label");
    let mu_p = iterate_beltrami(f, &start.center, n + 1)?;
    let mut lhs = 0.0f64;
    for q in start.boundary_samples() {
        lhs = lhs.max(hyp_dist(mu_p, iterate_beltrami(f, &q, n + 1)?));
    }
    let sum: f64 = chain
        .iter()
        .map(|l| c.get(*l).expect("chain labels present").diameter.powf(alpha))
        .sum();
    let rhs = constants.c * sum;
    Ok(SumDiamReport { start: t, n, chain, lhs, rhs, margin: rhs - lhs, passed: lhs <= rhs })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundedDilatationReport {
    pub n_max: usize,
    pub samples: usize,
    /// `max K_{f^n}(p)` over sampled `p` in `S` and `1 <= n <= n_max`.
    pub max_k: f64,
    pub beta_squared: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Tolerance on `max K <= beta^2`.
pub const DILATATION_CAP_TOL: f64 = 1e-6;

pub fn bounded_dilatation_diagnostic(
    f: &MapSpec,
    c: &DomainCollection,
    n_max: usize,
    samples_in_s: usize,
    seed: u64,
) -> Result<BoundedDilatationReport> {
    if n_max == 0 || samples_in_s == 0 {
        return Err(Error::InvalidParameter("need n_max >= 1 and at least one sample".into()));
    }
    let beta = beta_of(c)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let budget = samples_in_s.saturating_mul(50).max(1000);
    let mut pts = Vec::with_capacity(samples_in_s);
    for _ in 0..budget {
        let p = TorusPoint::new(rng.gen(), rng.gen());
        if c.domains.iter().all(|d| torus_distance(&p, &d.center) >= d.circumradius) {
            pts.push(p);
            if pts.len() == samples_in_s {
                break;
            }
        }
    }
    if pts.is_empty() {
        return Err(Error::SamplingFailed(budget));
    }
    let mut max_log_k = 0.0f64;
    for p in &pts {
        for od in f.orbit_jacobians(p, n_max) {
            max_log_k = max_log_k.max(od.log_dilatation());
        }
    }
    let max_k = max_log_k.exp();
    let beta_squared = beta * beta;
    Ok(BoundedDilatationReport {
        n_max,
        samples: pts.len(),
        max_k,
        beta_squared,
        tolerance: DILATATION_CAP_TOL,
        passed: max_k <= beta_squared + DILATATION_CAP_TOL,
    })
}

/// Largest integer coefficient and denominator searched for rational relations.
const RELATION_HEIGHT: i64 = 20;
const RELATION_DENOMINATOR: i64 = 1000;
const RELATION_TOL: f64 = 1e-12;

/// Best rational approximation of `x` with denominator `<= max_den` within
/// `tol`, found along the continued-fraction convergents.
pub fn rational_approximation(x: f64, max_den: i64, tol: f64) -> Option<(i64, i64)> {
    let (mut h0, mut h1) = (1i64, x.floor() as i64);
    let (mut k0, mut k1) = (0i64, 1i64);
    let mut rest = x - x.floor();
    loop {
        if (x - h1 as f64 / k1 as f64).abs() <= tol {
            return Some((h1, k1));
        }
        if rest.abs() < f64::EPSILON {
            return None;
        }
        let inv = 1.0 / rest;
        let a = inv.floor();
        rest = inv - a;
        let a = a as i64;
        let (h2, k2) = (a.checked_mul(h1)?.checked_add(h0)?, a.checked_mul(k1)?.checked_add(k0)?);
        if k2 > max_den {
            return None;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
    }
}

/// Rejects `omega` when `a w1 + b w2` is a rational with small denominator
/// for some small integers `(a, b) != (0, 0)`.
pub fn check_rationally_independent(omega: [f64; 2]) -> Result<()> {
    for a in -RELATION_HEIGHT..=RELATION_HEIGHT {
        for b in -RELATION_HEIGHT..=RELATION_HEIGHT {
            if (a, b) == (0, 0) || (a, b) < (0, 0) {
                continue;
            }
            let v = a as f64 * omega[0] + b as f64 * omega[1];
            if let Some((p, q)) = rational_approximation(v, RELATION_DENOMINATOR, RELATION_TOL) {
                return Err(Error::RationallyDependent(format!(
                    "{a} * {} + {b} * {} = {p}/{q}",
                    omega[0], omega[1]
                )));
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FamilyParams {
    pub omega: [f64; 2],
    pub count: usize,
    /// Radius rule `r_k = c rho^k`.
    pub c: f64,
    pub rho: f64,
    #[serde(default)]
    pub origin: [f64; 2],
}

/// Separation kept between disjoint disks beyond the sum of their radii.
pub const FAMILY_MARGIN: f64 = 1e-6;

/// Round disks on the orbit `p_k = p_0 + k omega` with radii `c rho^k`,
/// `sigma(k) = k + 1`. `c` is halved until all closures are pairwise disjoint.
pub fn build_translation_family(params: &FamilyParams) -> Result<DomainCollection> {
    let FamilyParams { omega, count, c, rho, origin } = *params;
    if count == 0 {
        return Err(Error::InvalidParameter("family needs at least one domain".into()));
    }
    if !(c > 0.0 && c <= INJECTIVITY_RADIUS) || !(rho > 0.0 && rho < 1.0) {
        return Err(Error::InvalidParameter(format!("radius rule needs 0 < c <= 1/2, 0 < rho < 1; got c = {c}, rho = {rho}")));
    }
    check_rationally_independent(omega)?;
    let p0 = TorusPoint::from(origin);
    let centers: Vec<TorusPoint> = (0..count)
        .map(|k| p0.shifted(k as f64 * omega[0], k as f64 * omega[1]))
        .collect();
    // largest c making every pair disjoint: d_jk > c (rho^j + rho^k) + margin
    let mut scale = c;
    loop {
        if scale < 1e-9 {
            return Err(Error::ConstructionFailed(format!("no disjoint radii down to c = {scale}")));
        }
        let radius = |k: usize| scale * rho.powi(k as i32);
        let ok = (0..count).all(|j| {
            (j + 1..count).all(|k| torus_distance(&centers[j], &centers[k]) > radius(j) + radius(k) + FAMILY_MARGIN)
        });
        if ok {
            let domains = centers
                .iter()
                .enumerate()
                .map(|(k, p)| Domain::disk(k as i64, *p, radius(k)))
                .collect::<Result<Vec<_>>>()?;
            let perm = (0..count.saturating_sub(1)).map(|k| (k as i64, k as i64 + 1)).collect();
            return DomainCollection::new(
                domains,
                perm,
                1.0,
                format!(
                    "orbit of ({}, {}) under translation by ({}, {}), {count} steps, r_k = {scale} * {rho}^k; sigma undefined at the last label",
                    origin[0], origin[1], omega[0], omega[1]
                ),
            );
        }
        scale *= 0.5;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_disks(r: f64) -> DomainCollection {
        DomainCollection::new(
            vec![
                Domain::disk(0, TorusPoint::new(0.0, 0.0), r).unwrap(),
                Domain::disk(1, TorusPoint::new(0.5, 0.5), r).unwrap(),
            ],
            vec![],
            1.0,
            String::new(),
        )
        .unwrap()
    }

    pub(crate) fn sqrt_family(count: usize) -> DomainCollection {
        build_translation_family(&FamilyParams {
            omega: [2f64.sqrt() - 1.0, 3f64.sqrt() - 1.0],
            count,
            c: 0.01,
            rho: 0.98,
            origin: [0.0, 0.0],
        })
        .unwrap()
    }

    #[test]
    fn collection_disjointness() {
        assert!(verify_collection(&two_disks(0.1)).passed);
        let r = verify_collection(&two_disks(0.4));
        assert!(!r.passed);
        assert_eq!(r.disjointness_violations, vec![(0, 1)]);
    }

    #[test]
    fn collection_rejects_bad_labels() {
        let d = Domain::disk(0, TorusPoint::new(0.0, 0.0), 0.1).unwrap();
        assert!(DomainCollection::new(vec![d.clone(), d.clone()], vec![], 1.0, String::new()).is_err());
        let e = Domain::disk(1, TorusPoint::new(0.5, 0.0), 0.1).unwrap();
        assert!(DomainCollection::new(vec![d, e], vec![(0, 1), (1, 1)], 1.0, String::new()).is_err());
        assert!(Domain::new(0, TorusPoint::new(0.0, 0.0), 0.2, 0.1, 0.3).is_err());
        assert!(Domain::disk(0, TorusPoint::new(0.0, 0.0), 0.6).is_err());
    }

    #[test]
    fn sigma_cycle_reported() {
        let c = DomainCollection::new(
            vec![
                Domain::disk(0, TorusPoint::new(0.0, 0.0), 0.1).unwrap(),
                Domain::disk(1, TorusPoint::new(0.5, 0.5), 0.1).unwrap(),
            ],
            vec![(0, 1), (1, 0)],
            1.0,
            String::new(),
        )
        .unwrap();
        let r = verify_collection(&c);
        assert_eq!(r.orbit_violations.len(), 2);
        assert!(!r.passed);
    }

    #[test]
    fn beta_examples() {
        assert_eq!(beta_of(&two_disks(0.1)).unwrap(), 1.0);
        let one = DomainCollection::new(
            vec![Domain::new(0, TorusPoint::new(0.2, 0.2), 0.01, 0.03, 0.05).unwrap()],
            vec![],
            1.0,
            String::new(),
        )
        .unwrap();
        assert!((beta_of(&one).unwrap() - 3.0).abs() < 1e-12);
        let three = DomainCollection::new(
            [(1.0, 0.0), (1.5, 0.3), (2.2, 0.6)]
                .iter()
                .enumerate()
                .map(|(i, (ratio, x))| {
                    Domain::new(i as i64, TorusPoint::new(*x, 0.5), 0.02, 0.02 * ratio, 0.04).unwrap()
                })
                .collect(),
            vec![],
            1.0,
            String::new(),
        )
        .unwrap();
        assert!((beta_of(&three).unwrap() - 2.2).abs() < 1e-12);
        let empty = DomainCollection::new(vec![], vec![], 1.0, String::new()).unwrap();
        assert!(beta_of(&empty).is_err());
    }

    #[test]
    fn null_sequence_examples() {
        let dom: Vec<Domain> = (0..200)
            .map(|k| {
                let r = 0.01 * 2f64.powf(-(k as f64) / 20.0);
                Domain::disk(k, TorusPoint::new(k as f64 * 0.37, k as f64 * 0.61), r).unwrap()
            })
            .collect();
        // geometric series: pi 1e-4 sum 2^{-k/10}
        let q = 2f64.powf(-0.1);
        let want = std::f64::consts::PI * 1e-4 * (1.0 - q.powi(200)) / (1.0 - q);
        let c = DomainCollection::new(dom, vec![], 1.0, String::new()).unwrap();
        let r = null_sequence_check(&c, 0.015);
        assert!(r.passed && (r.area_sum - want).abs() < 1e-12);
        // 0.02 * 2^{-k/20} >= 0.015 for k <= 8
        assert_eq!(r.large_count, 9);
        let big: Vec<Domain> = (0..4)
            .map(|k| Domain::disk(k, TorusPoint::new(0.25 * k as f64, 0.0), 0.3).unwrap())
            .collect();
        let r = null_sequence_check(&DomainCollection::new(big, vec![], 1.0, String::new()).unwrap(), 0.1);
        assert!(!r.passed && (r.area_sum - 4.0 * std::f64::consts::PI * 0.09).abs() < 1e-12);
        let empty = DomainCollection::new(vec![], vec![], 1.0, String::new()).unwrap();
        assert!(null_sequence_check(&empty, 0.1).passed);
    }

    #[test]
    fn xi_examples() {
        let l: Vec<f64> = (0..10).map(|k| 2f64.powi(-k)).collect();
        assert!((xi_of_diameters(&l, 1.0, 2).unwrap() - 1.75).abs() < 1e-15);
        assert_eq!(xi_of_diameters(&l, 0.0, 5).unwrap(), 6.0);
        assert!(matches!(xi_of_diameters(&l, 1.0, 10), Err(Error::InsufficientFamily { .. })));
        let l: Vec<f64> = (0..101).map(|k| 2f64.powi(-k)).collect();
        let tail = 1.0 / (1.0 - 2f64.powf(-0.5));
        for n in [1, 10, 100] {
            assert!(xi_of_diameters(&l, 0.5, n).unwrap() <= tail);
        }
        assert!(xi_of_diameters(&l, 0.5, 100).unwrap() / 100.0 <= 0.035);
    }

    #[test]
    fn density_examples() {
        let c = two_disks(0.05);
        let r = density_diagnostic(&c, &TorusPoint::new(0.25, 0.25), &[0.05, 0.01]).unwrap();
        assert!(r.entries.iter().all(|e| !e.satisfied));
        assert!(density_diagnostic(&c, &TorusPoint::new(0.25, 0.25), &[]).unwrap().entries.is_empty());
        assert!(matches!(
            density_diagnostic(&c, &TorusPoint::new(0.01, 0.0), &[0.1]),
            Err(Error::NotInS(0))
        ));
    }

    #[test]
    fn rational_detection() {
        assert!(check_rationally_independent([0.5, 0.0]).is_err());
        assert!(check_rationally_independent([0.3, 0.7 - 0.3]).is_err());
        assert!(check_rationally_independent([2f64.sqrt() - 1.0, 2.0 * (2f64.sqrt() - 1.0)]).is_err());
        assert!(check_rationally_independent([2f64.sqrt() - 1.0, 3f64.sqrt() - 1.0]).is_ok());
        assert_eq!(rational_approximation(0.75, 1000, 1e-12), Some((3, 4)));
        assert_eq!(rational_approximation(2f64.sqrt(), 1000, 1e-12), None);
    }

    #[test]
    fn family_examples() {
        let fam = sqrt_family(200);
        assert_eq!(fam.len(), 200);
        let rep = verify_collection(&fam);
        assert!(rep.passed, "{rep:?}");
        assert_eq!(beta_of(&fam).unwrap(), 1.0);
        let t = MapSpec::Translation { omega: [2f64.sqrt() - 1.0, 3f64.sqrt() - 1.0] };
        let perm = verify_permutation(&t, &fam, 1e-9).unwrap();
        assert!(perm.tested == 199 && perm.untested == vec![199]);
        // centers land exactly, but an isometry keeps r_k while the target has rho r_k
        assert_eq!(perm.failures.len(), 199);
        for fl in &perm.failures {
            let r = fam.get(fl.label).unwrap().circumradius;
            assert!(fl.center_error < 1e-12);
            assert!((fl.image_circumradius - r).abs() < 1e-12);
        }
        let single = build_translation_family(&FamilyParams {
            omega: [2f64.sqrt() - 1.0, 3f64.sqrt() - 1.0],
            count: 1,
            c: 0.1,
            rho: 0.9,
            origin: [0.0, 0.0],
        })
        .unwrap();
        assert!(verify_collection(&single).passed);
        let bad = build_translation_family(&FamilyParams {
            omega: [0.5, 0.0],
            count: 3,
            c: 0.1,
            rho: 0.9,
            origin: [0.0, 0.0],
        });
        assert!(matches!(bad, Err(Error::RationallyDependent(_))));
    }

    #[test]
    fn cat_map_breaks_permutation() {
        let fam = sqrt_family(50);
        let rep = verify_permutation(&MapSpec::cat_map(), &fam, 1e-6).unwrap();
        assert!(!rep.passed);
        assert_eq!(rep.failures.len(), 49);
    }

    #[test]
    fn translation_dilatation_is_one() {
        let fam = sqrt_family(200);
        let t = MapSpec::Translation { omega: [2f64.sqrt() - 1.0, 3f64.sqrt() - 1.0] };
        let r = bounded_dilatation_diagnostic(&t, &fam, 30, 200, 4).unwrap();
        assert_eq!(r.max_k, 1.0);
        assert!(r.passed);
        let r = bounded_dilatation_diagnostic(&MapSpec::cat_map(), &fam, 5, 50, 4).unwrap();
        let lambda = (3.0 + 5f64.sqrt()) / 2.0;
        assert!((r.max_k / lambda.powi(10) - 1.0).abs() < 1e-9);
        assert!(!r.passed);
    }

    #[test]
    fn sampling_error_when_covered() {
        let c = DomainCollection::new(
            vec![Domain::disk(0, TorusPoint::new(0.5, 0.5), 0.5).unwrap(), Domain::disk(1, TorusPoint::new(0.0, 0.0), 0.5).unwrap()],
            vec![],
            1.0,
            String::new(),
        )
        .unwrap();
        let t = MapSpec::Translation { omega: [0.1, 0.2] };
        assert!(matches!(bounded_dilatation_diagnostic(&t, &c, 2, 10, 0), Err(Error::SamplingFailed(_))));
    }

    #[test]
    fn chain_and_sum_diam_translation() {
        let fam = sqrt_family(30);
        assert_eq!(fam.chain(0, 3).unwrap(), vec![0, 1, 2, 3]);
        assert!(matches!(fam.chain(28, 5), Err(Error::BrokenChain(_))));
        assert_eq!(fam.chain_heads(), vec![0]);
        let t = MapSpec::Translation { omega: [2f64.sqrt() - 1.0, 3f64.sqrt() - 1.0] };
        let r = sum_diam_check(&t, &fam, 1.0, 10, 0).unwrap();
        assert_eq!(r.lhs, 0.0);
        assert!(r.passed);
    }

    #[test]
    fn collection_json_round_trip() {
        let fam = sqrt_family(5);
        let s = serde_json::to_string(&fam).unwrap();
        let back: DomainCollection = serde_json::from_str(&s).unwrap();
        assert_eq!(back, fam);
        let dup = r#"{"domains":[{"label":0,"center":[0,0],"inradius":0.1,"circumradius":0.1,"diameter":0.2},
                                 {"label":0,"center":[0.5,0],"inradius":0.1,"circumradius":0.1,"diameter":0.2}]}"#;
        assert!(serde_json::from_str::<DomainCollection>(dup).is_err());
    }
}
