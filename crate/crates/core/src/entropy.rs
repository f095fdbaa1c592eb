//! Bowen separated-set entropy estimates and the two integral upper bounds
//! (mean dilatation of `f^n`, mean exterior-power norm of `Df^n`).
//!
//! Greedy separated sets are maximal, not maximum, so every count here is a
//! lower bound for `N(n, eps)`. The integral bounds are upper bounds for the
//! entropy, so a lower-bound estimator is the side that can expose a
//! violation.

use serde::{Deserialize, Serialize};

use crate::domains::{self, DomainCollection};
use crate::error::{Error, Result};
use crate::maps::MapSpec;
use crate::torus::{midpoint_nodes, sample_points, torus_distance, SampleMode, TorusPoint};

/// `d_n(p, q) = max_{1 <= i <= n} d(f^i p, f^i q)`.
pub fn bowen_distance(f: &MapSpec, p: &TorusPoint, q: &TorusPoint, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("bowen distance needs n >= 1".into()));
    }
    let (mut a, mut b) = (*p, *q);
    let mut best = 0.0f64;
    for _ in 0..n {
        a = f.eval(&a);
        b = f.eval(&b);
        best = best.max(torus_distance(&a, &b));
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparatedReport {
    pub n: usize,
    pub epsilon: f64,
    pub count: usize,
    pub candidate_count: usize,
    pub seed: Option<u64>,
}

/// Candidate orbits `x, f(x), ..., f^depth(x)` stored flat, shared by every
/// `(n, eps)` query up to `depth`.
pub struct BowenOrbits {
    depth: usize,
    points: Vec<TorusPoint>,
}

impl BowenOrbits {
    pub fn new(f: &MapSpec, candidates: &[TorusPoint], depth: usize) -> Self {
        let mut points = Vec::with_capacity(candidates.len() * (depth + 1));
        for c in candidates {
            points.extend(f.orbit(c, depth));
        }
        Self { depth, points }
    }

    pub fn len(&self) -> usize {
        self.points.len() / (self.depth + 1)
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn orbit(&self, k: usize) -> &[TorusPoint] {
        let w = self.depth + 1;
        &self.points[k * w..(k + 1) * w]
    }

    /// Greedy `(n, eps)`-separated subset in candidate order. `n = 0` uses the
    /// plain metric `d`; `n >= 1` uses `d_n` (iterates `1..=n`).
    pub fn greedy_count(&self, n: usize, eps: f64) -> usize {
        assert!(n <= self.depth, "query depth {n} exceeds stored depth {}", self.depth);
        let (first, last) = if n == 0 { (0, 0) } else { (1, n) };
        // bucket retained points by their last iterate; a conflicting pair must
        // be within eps there, so only the 3x3 neighborhood needs checking
        let cells = ((1.0 / eps).floor() as usize).clamp(1, 4096);
        let cell_of = |p: &TorusPoint| {
            let i = ((p.x() * cells as f64) as usize).min(cells - 1);
            let j = ((p.y() * cells as f64) as usize).min(cells - 1);
            (i, j)
        };
        let mut grid: Vec<Vec<usize>> = vec![Vec::new(); cells * cells];
        let mut count = 0;
        let span: Vec<isize> = if cells >= 3 { vec![-1, 0, 1] } else { (0..cells as isize).collect() };
        for k in 0..self.len() {
            let ok = self.orbit(k);
            let (ci, cj) = cell_of(&ok[last]);
            let mut separated = true;
            'search: for &di in &span {
                for &dj in &span {
                    let (i, j) = if cells >= 3 {
                        (
                            (ci as isize + di).rem_euclid(cells as isize) as usize,
                            (cj as isize + dj).rem_euclid(cells as isize) as usize,
                        )
                    } else {
                        (di as usize, dj as usize)
                    };
                    for &r in &grid[i * cells + j] {
                        let or = self.orbit(r);
                        if (first..=last).rev().all(|t| torus_distance(&ok[t], &or[t]) < eps) {
                            separated = false;
                            break 'search;
                        }
                    }
                }
            }
            if separated {
                grid[ci * cells + cj].push(k);
                count += 1;
            }
        }
        count
    }
}

/// Greedy maximal `(n, eps)`-separated set over `candidates`.
pub fn separated_count(f: &MapSpec, n: usize, epsilon: f64, candidates: &[TorusPoint]) -> Result<SeparatedReport> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidParameter(format!("epsilon {epsilon} must be positive")));
    }
    if candidates.is_empty() {
        return Err(Error::EmptyRequest);
    }
    if n == 0 {
        return Err(Error::InvalidParameter("separated sets need n >= 1".into()));
    }
    let orbits = BowenOrbits::new(f, candidates, n);
    Ok(SeparatedReport {
        n,
        epsilon,
        count: orbits.greedy_count(n, epsilon),
        candidate_count: candidates.len(),
        seed: None,
    })
}

/// `m x m` lattice with one seeded uniform offset per cell.
pub fn jittered_candidates(m: usize, seed: u64) -> Result<Vec<TorusPoint>> {
    sample_points(SampleMode::JitteredGrid { m, seed })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyEstimate {
    pub epsilon: f64,
    /// Least-squares slope of `log count` against `n`.
    pub slope: f64,
    pub intercept: f64,
    pub counts: Vec<SeparatedReport>,
}

/// Least-squares `(slope, intercept)`.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::DegenerateFit("need at least two points".into()));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateFit("all abscissae coincide".into()));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

pub fn entropy_estimate(
    f: &MapSpec,
    epsilon: f64,
    n_range: &[usize],
    candidates: &[TorusPoint],
) -> Result<EntropyEstimate> {
    if n_range.len() < 3 {
        return Err(Error::DegenerateFit(format!("n_range has {} values, need 3", n_range.len())));
    }
    if n_range.contains(&0) {
        return Err(Error::InvalidParameter("n_range entries must be >= 1".into()));
    }
    if !(epsilon > 0.0) {
        return Err(Error::InvalidParameter(format!("epsilon {epsilon} must be positive")));
    }
    if candidates.is_empty() {
        return Err(Error::EmptyRequest);
    }
    let depth = *n_range.iter().max().expect("nonempty");
    let orbits = BowenOrbits::new(f, candidates, depth);
    let counts: Vec<SeparatedReport> = n_range
        .iter()
        .map(|&n| SeparatedReport {
            n,
            epsilon,
            count: orbits.greedy_count(n, epsilon),
            candidate_count: candidates.len(),
            seed: None,
        })
        .collect();
    if let Some(z) = counts.iter().find(|r| r.count == 0) {
        return Err(Error::DegenerateFit(format!("zero count at n = {}", z.n)));
    }
    let xs: Vec<f64> = counts.iter().map(|r| r.n as f64).collect();
    let ys: Vec<f64> = counts.iter().map(|r| (r.count as f64).ln()).collect();
    let (slope, intercept) = fit_line(&xs, &ys)?;
    Ok(EntropyEstimate { epsilon, slope, intercept, counts })
}

/// `log(mean(exp(v)))` with a max shift.
pub fn log_mean_exp(values: &[f64]) -> f64 {
    let m = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    let s: f64 = values.iter().map(|v| (v - m).exp()).sum();
    m + (s / values.len() as f64).ln()
}

/// Both integral bounds at one depth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegralBounds {
    pub n: usize,
    /// `(1 / 2n) log mean K_{f^n}`.
    pub dilatation_bound: f64,
    /// `(1 / n) log mean |(Df^n)^wedge|`.
    pub przytycki_bound: f64,
}

/// Both bounds for every `n` in `ns`, from one pass of prefix orbit
/// derivatives per node.
pub fn integral_bounds(f: &MapSpec, ns: &[usize], nodes: &[TorusPoint]) -> Result<Vec<IntegralBounds>> {
    if nodes.is_empty() {
        return Err(Error::EmptyRequest);
    }
    if ns.contains(&0) {
        return Err(Error::InvalidParameter("bounds need n >= 1".into()));
    }
    let depth = ns.iter().copied().max().unwrap_or(0);
    let mut log_k = vec![Vec::with_capacity(nodes.len()); ns.len()];
    let mut log_ext = vec![Vec::with_capacity(nodes.len()); ns.len()];
    for p in nodes {
        let prefix = f.orbit_jacobians(p, depth);
        for (slot, &n) in ns.iter().enumerate() {
            let od = &prefix[n - 1];
            log_k[slot].push(od.log_dilatation());
            log_ext[slot].push(od.log_exterior_norm());
        }
    }
    Ok(ns
        .iter()
        .enumerate()
        .map(|(slot, &n)| IntegralBounds {
            n,
            dilatation_bound: log_mean_exp(&log_k[slot]) / (2.0 * n as f64),
            przytycki_bound: log_mean_exp(&log_ext[slot]) / n as f64,
        })
        .collect())
}

pub fn dilatation_bound(f: &MapSpec, n: usize, nodes: &[TorusPoint]) -> Result<f64> {
    Ok(integral_bounds(f, &[n], nodes)?[0].dilatation_bound)
}

pub fn przytycki_bound(f: &MapSpec, n: usize, nodes: &[TorusPoint]) -> Result<f64> {
    Ok(integral_bounds(f, &[n], nodes)?[0].przytycki_bound)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundChainParams {
    pub n_range: Vec<usize>,
    pub epsilons: Vec<f64>,
    /// Midpoint-rule lattice size for the integrals.
    pub quadrature: usize,
    /// Jittered lattice size for separated-set candidates.
    pub candidates: usize,
    pub seed: u64,
    pub alpha: f64,
}

impl Default for BoundChainParams {
    fn default() -> Self {
        Self {
            n_range: vec![2, 3, 4, 5, 6],
            epsilons: vec![0.2],
            quadrature: 64,
            candidates: 200,
            seed: 0,
            alpha: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainRecord {
    pub n: usize,
    /// `max over eps of (1/n) log(N(n, eps) / N_d(eps))`, `N_d` the count in
    /// the plain metric on the same candidates.
    pub entropy_rate: f64,
    pub counts: Vec<SeparatedReport>,
    pub dilatation_bound: f64,
    pub przytycki_bound: f64,
    pub slack: f64,
    pub xi_rate: Option<f64>,
    /// `max log K_{f^n}(f p)` over sampled domain points.
    pub max_log_k_on_domains: Option<f64>,
    /// `C xi(n) + C'`.
    pub xi_route_bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundChain {
    pub map: String,
    pub params: BoundChainParams,
    pub quadrature_nodes: usize,
    pub candidate_count: usize,
    pub base_counts: Vec<SeparatedReport>,
    pub records: Vec<ChainRecord>,
    pub constants: Option<domains::LemmaConstants>,
    pub flags: Vec<String>,
    pub note: String,
}

/// Default statistical slack `(2 / n) log 2`.
pub fn default_slack(n: usize) -> f64 {
    2.0 / n as f64 * 2f64.ln()
}

pub fn bound_chain(f: &MapSpec, params: &BoundChainParams, collection: Option<&DomainCollection>) -> Result<BoundChain> {
    f.validate()?;
    if params.n_range.is_empty() || params.n_range.contains(&0) {
        return Err(Error::InvalidParameter("n_range must be nonempty with entries >= 1".into()));
    }
    if params.epsilons.is_empty() || params.epsilons.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::InvalidParameter("epsilon list must be nonempty and positive".into()));
    }
    let nodes = midpoint_nodes(params.quadrature)?;
    let candidates = jittered_candidates(params.candidates, params.seed)?;
    let depth = *params.n_range.iter().max().expect("nonempty");
    let orbits = BowenOrbits::new(f, &candidates, depth);
    let base_counts: Vec<SeparatedReport> = params
        .epsilons
        .iter()
        .map(|&eps| SeparatedReport {
            n: 0,
            epsilon: eps,
            count: orbits.greedy_count(0, eps),
            candidate_count: candidates.len(),
            seed: Some(params.seed),
        })
        .collect();
    let bounds = integral_bounds(f, &params.n_range, &nodes)?;

    let constants = match collection {
        Some(c) => Some(domains::lemma_constants(f, c, params.alpha, params.seed)?),
        None => None,
    };
    let domain_points: Vec<TorusPoint> = collection
        .map(|c| {
            c.domains()
                .iter()
                .flat_map(|d| std::iter::once(d.center).chain(d.boundary_samples_n(8)))
                .map(|p| f.eval(&p))
                .collect()
        })
        .unwrap_or_default();
    let domain_prefix: Vec<Vec<crate::maps::OrbitDerivative>> =
        domain_points.iter().map(|p| f.orbit_jacobians(p, depth)).collect();

    let mut records = Vec::with_capacity(params.n_range.len());
    let mut flags = Vec::new();
    for (slot, &n) in params.n_range.iter().enumerate() {
        let counts: Vec<SeparatedReport> = params
            .epsilons
            .iter()
            .map(|&eps| SeparatedReport {
                n,
                epsilon: eps,
                count: orbits.greedy_count(n, eps),
                candidate_count: candidates.len(),
                seed: Some(params.seed),
            })
            .collect();
        let entropy_rate = counts
            .iter()
            .zip(&base_counts)
            .map(|(c, b)| (c.count as f64 / b.count as f64).ln() / n as f64)
            .fold(f64::NEG_INFINITY, f64::max);
        let slack = default_slack(n);
        let b = bounds[slot];
        if entropy_rate > b.dilatation_bound + slack {
            flags.push(format!(
                "n = {n}: entropy rate {entropy_rate} exceeds dilatation bound {} + slack {slack}",
                b.dilatation_bound
            ));
        }
        if entropy_rate > b.przytycki_bound + slack {
            flags.push(format!(
                "n = {n}: entropy rate {entropy_rate} exceeds exterior-norm bound {} + slack {slack}",
                b.przytycki_bound
            ));
        }
        let (mut xi_rate, mut max_log_k, mut route) = (None, None, None);
        if let (Some(c), Some(k)) = (collection, constants.as_ref()) {
            if c.len() > n {
                let xi = c.xi(params.alpha, n)?;
                xi_rate = Some(xi / n as f64);
                let bound = k.c * xi + k.c_prime;
                let worst = domain_prefix
                    .iter()
                    .map(|pre| pre[n - 1].log_dilatation())
                    .fold(0.0f64, f64::max);
                if worst > bound {
                    flags.push(format!(
                        "n = {n}: max log K on domains {worst} exceeds C xi(n) + C' = {bound}"
                    ));
                }
                max_log_k = Some(worst);
                route = Some(bound);
            }
        }
        records.push(ChainRecord {
            n,
            entropy_rate,
            counts,
            dilatation_bound: b.dilatation_bound,
            przytycki_bound: b.przytycki_bound,
            slack,
            xi_rate,
            max_log_k_on_domains: max_log_k,
            xi_route_bound: route,
        });
    }
    Ok(BoundChain {
        map: f.label(),
        params: params.clone(),
        quadrature_nodes: nodes.len(),
        candidate_count: candidates.len(),
        base_counts,
        records,
        constants,
        flags,
        note: "separated counts are greedy maximal sets, i.e. lower bounds for N(n, eps); \
               integrals use the midpoint rule; finite n and eps only, no certification"
            .into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn log_lambda() -> f64 {
        ((3.0 + 5f64.sqrt()) / 2.0).ln()
    }

    #[test]
    fn bowen_distance_examples() {
        let t = MapSpec::Translation { omega: [0.31, 0.17] };
        let p = TorusPoint::new(0.1, 0.2);
        let q = TorusPoint::new(0.4, 0.3);
        for n in 1..6 {
            assert!((bowen_distance(&t, &p, &q, n).unwrap() - torus_distance(&p, &q)).abs() < 1e-12);
        }
        let id = MapSpec::Translation { omega: [0.0, 0.0] };
        assert_eq!(bowen_distance(&id, &p, &q, 3).unwrap(), torus_distance(&p, &q));
    }

    #[test]
    fn bowen_distance_cat_map_integer_oracle() {
        // A^i (0.001, 0) via exact integer powers of A
        let (mut a, mut b, mut c, mut d) = (1i64, 0i64, 0i64, 1i64);
        let mut want = 0.0f64;
        for _ in 0..5 {
            (a, b, c, d) = (2 * a + c, 2 * b + d, a + c, b + d);
            let v = TorusPoint::new(a as f64 * 0.001, c as f64 * 0.001);
            want = want.max(torus_distance(&TorusPoint::new(0.0, 0.0), &v));
        }
        let _ = (b, d);
        let got = bowen_distance(&MapSpec::cat_map(), &TorusPoint::new(0.0, 0.0), &TorusPoint::new(0.001, 0.0), 5)
            .unwrap();
        assert!((got - want).abs() < 1e-12, "{got} vs {want}");
    }

    #[test]
    fn greedy_count_matches_brute_force() {
        let f = MapSpec::StandardMap { k: 1.5 };
        let cands = sample_points(SampleMode::Random { count: 600, seed: 5 }).unwrap();
        for (n, eps) in [(1, 0.1), (3, 0.15), (4, 0.3), (2, 0.45)] {
            let mut kept: Vec<TorusPoint> = Vec::new();
            for c in &cands {
                if kept.iter().all(|k| bowen_distance(&f, c, k, n).unwrap() >= eps) {
                    kept.push(*c);
                }
            }
            let r = separated_count(&f, n, eps, &cands).unwrap();
            assert_eq!(r.count, kept.len(), "n = {n}, eps = {eps}");
        }
    }

    #[test]
    fn identity_packing() {
        let id = MapSpec::Translation { omega: [0.0, 0.0] };
        let g = sample_points(SampleMode::Grid(8)).unwrap();
        assert_eq!(separated_count(&id, 1, 0.5, &g).unwrap().count, 4);
    }

    #[test]
    fn translation_counts_flat() {
        let t = MapSpec::Translation { omega: [0.31, 0.17] };
        let cands = jittered_candidates(60, 1).unwrap();
        let base = separated_count(&t, 1, 0.1, &cands).unwrap().count;
        for n in [2, 5, 9] {
            assert_eq!(separated_count(&t, n, 0.1, &cands).unwrap().count, base);
        }
        let est = entropy_estimate(&t, 0.1, &[2, 3, 4, 5], &cands).unwrap();
        assert!(est.slope.abs() <= 0.02);
    }

    #[test]
    fn separated_errors() {
        let t = MapSpec::Translation { omega: [0.31, 0.17] };
        assert!(separated_count(&t, 1, 0.0, &[TorusPoint::new(0.0, 0.0)]).is_err());
        assert!(separated_count(&t, 1, 0.1, &[]).is_err());
        assert!(entropy_estimate(&t, 0.1, &[1, 2], &[TorusPoint::new(0.0, 0.0)]).is_err());
    }

    #[test]
    fn log_mean_exp_stable() {
        let v = [1000.0, 1000.0];
        assert!((log_mean_exp(&v) - 1000.0).abs() < 1e-12);
        let v = [0.0, 2f64.ln()];
        assert!((log_mean_exp(&v) - 1.5f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn bound_examples() {
        let nodes = midpoint_nodes(16).unwrap();
        let t = MapSpec::Translation { omega: [0.31, 0.17] };
        for n in [1, 5, 20] {
            assert_eq!(dilatation_bound(&t, n, &nodes).unwrap(), 0.0);
            assert_eq!(przytycki_bound(&t, n, &nodes).unwrap(), 0.0);
        }
        for n in [1, 10, 48] {
            assert!((dilatation_bound(&MapSpec::cat_map(), n, &nodes).unwrap() - log_lambda()).abs() < 1e-9);
            assert!((przytycki_bound(&MapSpec::cat_map(), n, &nodes).unwrap() - log_lambda()).abs() < 1e-9);
        }
        // n-fold shear [[1, n], [0, 1]]: K = s1^2 with s1^2 = (n^2 + 2 + n sqrt(n^2 + 4)) / 2
        let shear = MapSpec::StandardMap { k: 0.0 };
        let n = 40.0f64;
        let want = ((n * n + 2.0 + n * (n * n + 4.0).sqrt()) / 2.0).ln() / (2.0 * n);
        let got = dilatation_bound(&shear, 40, &nodes).unwrap();
        assert!((got - want).abs() < 1e-12);
        assert!(got <= 0.12);
    }

    #[test]
    fn przytycki_below_dilatation_for_area_preserving() {
        let nodes = midpoint_nodes(24).unwrap();
        for f in [
            MapSpec::StandardMap { k: 1.5 },
            MapSpec::Skew { omega: [0.2, 0.1], amplitude: 0.15, frequency: 2 },
        ] {
            for b in integral_bounds(&f, &[1, 3, 8], &nodes).unwrap() {
                // mean sqrt(K) <= sqrt(mean K) when J = 1
                assert!(b.przytycki_bound <= b.dilatation_bound + 1e-12);
            }
        }
    }
}
