//! Run configuration, the five commands and their report files.
//!
//! Every command writes a JSON report (schema-versioned, embedding the
//! resolved config) and a CSV table. `Format` restricts output to one of
//! them. Exit status: 0 when every check passes, 2 when a check is flagged,
//! 1 on usage, parse or I/O errors.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dilatation::mu_field;
use crate::domains::{
    self, beta_of, bounded_dilatation_diagnostic, build_translation_family, density_diagnostic, lemma_constants,
    null_sequence_check, sum_diam_check_with, verify_collection, verify_permutation, DomainCollection, FamilyParams,
};
use crate::entropy::{self, bound_chain, entropy_estimate, integral_bounds, jittered_candidates, BoundChainParams};
use crate::error::{Error, Result};
use crate::maps::MapSpec;
use crate::torus::{midpoint_nodes, TorusPoint};

pub const SCHEMA_VERSION: &str = "surface-entropy.report/1";

fn default_n_range() -> Vec<usize> {
    vec![2, 3, 4, 5, 6]
}
fn default_epsilons() -> Vec<f64> {
    vec![0.2]
}
fn default_quadrature() -> usize {
    64
}
fn default_candidates() -> usize {
    200
}
fn default_grid() -> usize {
    32
}
fn default_alpha() -> f64 {
    1.0
}

/// Parameters of `check-domains`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DomainChecks {
    /// Tolerance of the permutation check.
    pub tol: f64,
    /// Threshold of the null-sequence count.
    pub epsilon: f64,
    /// Probe of the density diagnostic; defaults to `f` of the last center.
    pub probe: Option<[f64; 2]>,
    pub scales: Vec<f64>,
    pub xi_n: Vec<usize>,
    pub sum_diam_n: Vec<usize>,
    /// Start label of the sum-of-diameters chain; defaults to the first chain head.
    pub start: Option<i64>,
    pub n_max: usize,
    pub samples: usize,
}

impl Default for DomainChecks {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            epsilon: 0.01,
            probe: None,
            scales: vec![0.2, 0.1, 0.05, 0.02],
            xi_n: vec![1, 10, 50, 100],
            sum_diam_n: vec![1, 5, 10],
            start: None,
            n_max: 20,
            samples: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub map: Option<MapSpec>,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_n_range")]
    pub n_range: Vec<usize>,
    #[serde(default = "default_epsilons")]
    pub epsilons: Vec<f64>,
    #[serde(default = "default_quadrature")]
    pub quadrature: usize,
    #[serde(default = "default_candidates")]
    pub candidates: usize,
    /// Lattice size of `mu-field`.
    #[serde(default = "default_grid")]
    pub grid: usize,
    #[serde(default)]
    pub family_file: Option<PathBuf>,
    #[serde(default)]
    pub family: Option<FamilyParams>,
    #[serde(default)]
    pub domains: DomainChecks,
}

impl RunConfig {
    /// Parses TOML, or JSON when the text starts with `{`.
    pub fn parse(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            serde_json::from_str(text).map_err(|e| Error::Config(format!("json: {e}")))
        } else {
            toml::from_str(text).map_err(|e| Error::Config(format!("toml: {e}")))
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })?;
        // family files are looked up next to the config
        if let (Some(f), Some(dir)) = (&cfg.family_file, path.parent()) {
            if f.is_relative() {
                cfg.family_file = Some(dir.join(f));
            }
        }
        Ok(cfg)
    }

    pub fn map(&self) -> Result<&MapSpec> {
        let m = self.map.as_ref().ok_or_else(|| Error::Config("missing [map] table".into()))?;
        m.validate().map_err(|e| Error::Config(format!("map: {e}")))?;
        Ok(m)
    }

    fn chain_params(&self) -> BoundChainParams {
        BoundChainParams {
            n_range: self.n_range.clone(),
            epsilons: self.epsilons.clone(),
            quadrature: self.quadrature,
            candidates: self.candidates,
            seed: self.seed,
            alpha: self.alpha,
        }
    }

    /// The family from `family_file`, else built from `[family]`.
    pub fn collection(&self) -> Result<Option<DomainCollection>> {
        if let Some(path) = &self.family_file {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read family {}: {e}", path.display())))?;
            let c = serde_json::from_str(&text)
                .map_err(|e| Error::Config(format!("family {}: {e}", path.display())))?;
            return Ok(Some(c));
        }
        self.family.as_ref().map(build_translation_family).transpose()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Entropy,
    BoundChain,
    CheckDomains,
    MuField,
    BuildFamily,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Entropy => "entropy",
            Command::BoundChain => "bound_chain",
            Command::CheckDomains => "check_domains",
            Command::MuField => "mu_field",
            Command::BuildFamily => "build_family",
        }
    }
}

#[derive(Debug, Serialize)]
struct Report<'a, T: Serialize> {
    schema: &'static str,
    command: &'static str,
    config: &'a RunConfig,
    passed: bool,
    flags: &'a [String],
    result: T,
}

/// Files written and checks flagged by one command.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub flags: Vec<String>,
}

impl Outcome {
    pub fn exit_code(&self) -> u8 {
        if self.flags.is_empty() {
            0
        } else {
            2
        }
    }
}

/// `{:.16e}`: 17 significant digits, round-trips every finite `f64`.
pub fn fmt_f64(x: f64) -> String {
    // adding zero folds -0.0 into 0.0
    format!("{:.16e}", x + 0.0)
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

/// Writes through a temporary file in `dir` and renames into place.
pub fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    let path = dir.join(name);
    tmp.persist(&path).map_err(|e| Error::Io(e.error))?;
    Ok(path)
}

struct Emitter<'a> {
    cmd: Command,
    cfg: &'a RunConfig,
    out: &'a Path,
    format: Option<Format>,
    files: Vec<PathBuf>,
}

impl<'a> Emitter<'a> {
    fn report<T: Serialize>(&mut self, flags: &[String], result: T) -> Result<()> {
        if self.format == Some(Format::Csv) {
            return Ok(());
        }
        let r = Report {
            schema: SCHEMA_VERSION,
            command: self.cmd.name(),
            config: self.cfg,
            passed: flags.is_empty(),
            flags,
            result,
        };
        let mut text = serde_json::to_string_pretty(&r)?;
        text.push('\n');
        self.files.push(write_atomic(self.out, &format!("{}.json", self.cmd.name()), text.as_bytes())?);
        Ok(())
    }

    fn table(&mut self, name: &str, csv: String) -> Result<()> {
        if self.format == Some(Format::Json) {
            return Ok(());
        }
        self.files.push(write_atomic(self.out, name, csv.as_bytes())?);
        Ok(())
    }

    fn finish(self, flags: Vec<String>) -> Outcome {
        Outcome { files: self.files, flags }
    }
}

pub fn run(cmd: Command, cfg: &RunConfig, out: &Path, format: Option<Format>) -> Result<Outcome> {
    let em = Emitter { cmd, cfg, out, format, files: Vec::new() };
    match cmd {
        Command::Entropy => cmd_entropy(cfg, em),
        Command::BoundChain => cmd_bound_chain(cfg, em),
        Command::CheckDomains => cmd_check_domains(cfg, em),
        Command::MuField => cmd_mu_field(cfg, em),
        Command::BuildFamily => cmd_build_family(cfg, em),
    }
}

#[derive(Debug, Serialize)]
struct EntropyResult {
    map: String,
    candidate_count: usize,
    estimates: Vec<entropy::EntropyEstimate>,
    /// Integral bounds at the largest `n`, against which slopes are checked.
    upper_bound: f64,
    slack: f64,
}

fn cmd_entropy(cfg: &RunConfig, mut em: Emitter) -> Result<Outcome> {
    let f = cfg.map()?;
    let candidates = jittered_candidates(cfg.candidates, cfg.seed)?;
    let estimates = cfg
        .epsilons
        .iter()
        .map(|&eps| {
            let mut e = entropy_estimate(f, eps, &cfg.n_range, &candidates)?;
            for r in &mut e.counts {
                r.seed = Some(cfg.seed);
            }
            Ok(e)
        })
        .collect::<Result<Vec<_>>>()?;
    let n_top = *cfg.n_range.iter().max().expect("entropy_estimate checked n_range");
    let b = integral_bounds(f, &[n_top], &midpoint_nodes(cfg.quadrature)?)?[0];
    let upper_bound = b.dilatation_bound.min(b.przytycki_bound);
    let slack = entropy::default_slack(n_top);
    let mut flags = Vec::new();
    for e in &estimates {
        if e.slope > upper_bound + slack {
            flags.push(format!(
                "eps = {}: slope {} exceeds the integral bound {upper_bound} + slack {slack} at n = {n_top}",
                e.epsilon, e.slope
            ));
        }
    }
    let mut csv = String::from("epsilon,n,count,candidate_count,seed\n");
    for e in &estimates {
        for r in &e.counts {
            writeln!(csv, "{},{},{},{},{}", fmt_f64(r.epsilon), r.n, r.count, r.candidate_count, cfg.seed).unwrap();
        }
    }
    em.report(
        &flags,
        EntropyResult { map: f.label(), candidate_count: candidates.len(), estimates, upper_bound, slack },
    )?;
    em.table("entropy_counts.csv", csv)?;
    Ok(em.finish(flags))
}

fn cmd_bound_chain(cfg: &RunConfig, mut em: Emitter) -> Result<Outcome> {
    let f = cfg.map()?;
    let collection = cfg.collection()?;
    let chain = bound_chain(f, &cfg.chain_params(), collection.as_ref())?;
    let mut csv = String::from(
        "n,entropy_rate,dilatation_bound,przytycki_bound,slack,xi_rate,max_log_k_on_domains,xi_route_bound\n",
    );
    for r in &chain.records {
        writeln!(
            csv,
            "{},{},{},{},{},{},{},{}",
            r.n,
            fmt_f64(r.entropy_rate),
            fmt_f64(r.dilatation_bound),
            fmt_f64(r.przytycki_bound),
            fmt_f64(r.slack),
            fmt_opt(r.xi_rate),
            fmt_opt(r.max_log_k_on_domains),
            fmt_opt(r.xi_route_bound)
        )
        .unwrap();
    }
    let flags = chain.flags.clone();
    em.report(&flags, &chain)?;
    em.table("bound_chain.csv", csv)?;
    Ok(em.finish(flags))
}

#[derive(Debug, Serialize)]
struct XiRow {
    n: usize,
    xi: f64,
    xi_over_n: f64,
}

#[derive(Debug, Serialize)]
struct DomainsResult {
    map: String,
    beta: f64,
    collection: domains::CollectionReport,
    permutation: domains::PermutationReport,
    null_sequence: domains::NullSequenceReport,
    density: domains::DensityReport,
    xi: Vec<XiRow>,
    constants: domains::LemmaConstants,
    sum_diam: Vec<domains::SumDiamReport>,
    /// `n` values skipped because the chain from the start label is too short.
    sum_diam_skipped: Vec<usize>,
    bounded_dilatation: domains::BoundedDilatationReport,
}

fn cmd_check_domains(cfg: &RunConfig, mut em: Emitter) -> Result<Outcome> {
    let f = cfg.map()?;
    let c = cfg
        .collection()?
        .ok_or_else(|| Error::Config("check-domains needs family_file or a [family] table".into()))?;
    let d = &cfg.domains;
    let mut flags = Vec::new();

    let collection = verify_collection(&c);
    for (j, k) in &collection.disjointness_violations {
        flags.push(format!("domains {j} and {k} are not disjoint"));
    }
    flags.extend(collection.orbit_violations.iter().cloned());
    if collection.area_sum > crate::torus::TOTAL_AREA {
        flags.push(format!("inscribed areas sum to {} > 1", collection.area_sum));
    }
    let beta = beta_of(&c)?;
    let permutation = verify_permutation(f, &c, d.tol)?;
    for fl in &permutation.failures {
        flags.push(format!(
            "f(D_{}) does not match D_{}: center error {}, image radii [{}, {}] vs [{}, {}]",
            fl.label,
            fl.image_label,
            fl.center_error,
            fl.image_inradius,
            fl.image_circumradius,
            c.get(fl.image_label).map_or(f64::NAN, |x| x.inradius),
            c.get(fl.image_label).map_or(f64::NAN, |x| x.circumradius),
        ));
    }
    let null_sequence = null_sequence_check(&c, d.epsilon);
    let probe = match d.probe {
        Some(p) => TorusPoint::from(p),
        None => {
            let last = c.domains().last().ok_or(Error::InsufficientFamily { have: 0, need: 1 })?;
            f.eval(&last.center)
        }
    };
    let density = density_diagnostic(&c, &probe, &d.scales)?;
    let xi = d
        .xi_n
        .iter()
        .filter(|&&n| n >= 1 && n < c.len())
        .map(|&n| {
            let v = c.xi(cfg.alpha, n)?;
            Ok(XiRow { n, xi: v, xi_over_n: v / n as f64 })
        })
        .collect::<Result<Vec<_>>>()?;
    let constants = lemma_constants(f, &c, cfg.alpha, cfg.seed)?;
    let start = match d.start {
        Some(s) => s,
        None => *c.chain_heads().first().ok_or_else(|| Error::BrokenChain("no chain head".into()))?,
    };
    let mut sum_diam = Vec::new();
    let mut sum_diam_skipped = Vec::new();
    for &n in &d.sum_diam_n {
        match sum_diam_check_with(f, &c, cfg.alpha, n, start, &constants) {
            Ok(r) => {
                if !r.passed {
                    flags.push(format!("sum of diameters from {start}, n = {n}: lhs {} > rhs {}", r.lhs, r.rhs));
                }
                sum_diam.push(r);
            }
            Err(Error::BrokenChain(_)) => sum_diam_skipped.push(n),
            Err(e) => return Err(e),
        }
    }
    let bounded_dilatation = bounded_dilatation_diagnostic(f, &c, d.n_max, d.samples, cfg.seed)?;
    if !bounded_dilatation.passed {
        flags.push(format!(
            "max K on S is {} > beta^2 = {}",
            bounded_dilatation.max_k, bounded_dilatation.beta_squared
        ));
    }

    let mut csv = String::from("label,x,y,inradius,circumradius,diameter,sigma\n");
    for dom in c.domains() {
        writeln!(
            csv,
            "{},{},{},{},{},{},{}",
            dom.label,
            fmt_f64(dom.center.x()),
            fmt_f64(dom.center.y()),
            fmt_f64(dom.inradius),
            fmt_f64(dom.circumradius),
            fmt_f64(dom.diameter),
            c.sigma(dom.label).map(|s| s.to_string()).unwrap_or_default()
        )
        .unwrap();
    }
    em.report(
        &flags,
        DomainsResult {
            map: f.label(),
            beta,
            collection,
            permutation,
            null_sequence,
            density,
            xi,
            constants,
            sum_diam,
            sum_diam_skipped,
            bounded_dilatation,
        },
    )?;
    em.table("check_domains.csv", csv)?;
    Ok(em.finish(flags))
}

fn cmd_mu_field(cfg: &RunConfig, mut em: Emitter) -> Result<Outcome> {
    let f = cfg.map()?;
    if cfg.grid == 0 {
        return Err(Error::Config("grid must be at least 1".into()));
    }
    let rows = mu_field(f, cfg.grid)?;
    let mut csv = String::from("x,y,mu_re,mu_im,theta_arg,K\n");
    for r in &rows {
        writeln!(
            csv,
            "{},{},{},{},{},{}",
            fmt_f64(r.x),
            fmt_f64(r.y),
            fmt_f64(r.mu_re),
            fmt_f64(r.mu_im),
            fmt_f64(r.theta_arg),
            fmt_f64(r.k)
        )
        .unwrap();
    }
    em.report(&[], &rows)?;
    em.table("mu_field.csv", csv)?;
    Ok(em.finish(Vec::new()))
}

fn cmd_build_family(cfg: &RunConfig, mut em: Emitter) -> Result<Outcome> {
    let params = cfg.family.as_ref().ok_or_else(|| Error::Config("build-family needs a [family] table".into()))?;
    let c = build_translation_family(params)?;
    let report = verify_collection(&c);
    let flags: Vec<String> = if report.passed { Vec::new() } else { vec!["built family fails verification".into()] };
    // the family itself is data for later runs, written regardless of format
    let mut text = serde_json::to_string_pretty(&c)?;
    text.push('\n');
    em.files.push(write_atomic(em.out, "family.json", text.as_bytes())?);
    let mut csv = String::from("label,x,y,radius,sigma\n");
    for d in c.domains() {
        writeln!(
            csv,
            "{},{},{},{},{}",
            d.label,
            fmt_f64(d.center.x()),
            fmt_f64(d.center.y()),
            fmt_f64(d.inradius),
            c.sigma(d.label).map(|s| s.to_string()).unwrap_or_default()
        )
        .unwrap();
    }
    em.report(&flags, &report)?;
    em.table("build_family.csv", csv)?;
    Ok(em.finish(flags))
}
