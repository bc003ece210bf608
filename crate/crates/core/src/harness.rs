//! Experiment driver: Monte-Carlo inequality sweeps over random states,
//! the Table 1 crossover between the two pure-state coherence bounds,
//! pointwise bound comparisons and the index-of-coincidence saturation
//! check.
//!
//! Sweeps are deterministic: each trial's seed is derived from the master
//! seed and the trial coordinates `(d, M, ensemble, trial)`, and rows are
//! merged in cell and trial order regardless of how many threads run.

use std::collections::BTreeMap;
use std::fmt;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer};

use crate::bounds::{self, BoundId, BoundReport, Mim6Table, MubBoundParams};
use crate::error::{Error, Result};
use crate::io::{self, fmt_f64, json_f64, StateFile};
use crate::measures::{self, GeomBounds, NumericCgOptions, ProbDist};
use crate::mub::{self, construct_mub, MubSet};
use crate::states::{self, derive_seed, DensityMatrix, PureState};

/// Environment variable capping harness parallelism; `0` means automatic.
pub const THREADS_ENV: &str = "MUBCOH_THREADS";

/// Tolerance for the per-basis entropy chain `H₁ ≥ -ln J ≥ H_∞`.
pub const CHAIN_TOL: f64 = 1e-10;

const MAX_COUNTEREXAMPLES: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ensemble {
    /// Haar-random pure states.
    Pure,
    /// Full-rank Ginibre states.
    Mixed,
    /// Ginibre states of the given rank.
    MixedRank(usize),
}

impl Ensemble {
    fn code(self) -> u64 {
        match self {
            Ensemble::Pure => 1,
            Ensemble::Mixed => 2,
            Ensemble::MixedRank(r) => 1000 + r as u64,
        }
    }

    fn rank(self, d: usize) -> usize {
        match self {
            Ensemble::Pure => 1,
            Ensemble::Mixed => d,
            Ensemble::MixedRank(r) => r,
        }
    }

    pub fn sample(self, d: usize, seed: u64) -> Result<TrialState> {
        match self {
            Ensemble::Pure => Ok(TrialState::Pure(states::sample_pure(d, seed)?)),
            _ => Ok(TrialState::Mixed(states::sample_density(
                d,
                self.rank(d),
                seed,
            )?)),
        }
    }
}

impl fmt::Display for Ensemble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ensemble::Pure => f.write_str("pure"),
            Ensemble::Mixed => f.write_str("mixed"),
            Ensemble::MixedRank(r) => write!(f, "mixed-rank-{r}"),
        }
    }
}

impl FromStr for Ensemble {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pure" => Ok(Ensemble::Pure),
            "mixed" | "mixed-full-rank" => Ok(Ensemble::Mixed),
            _ => s
                .strip_prefix("mixed-rank-")
                .and_then(|r| r.parse().ok())
                .filter(|&r: &usize| r >= 1)
                .map(Ensemble::MixedRank)
                .ok_or_else(|| Error::InvalidParameter(format!("unknown ensemble {s:?}"))),
        }
    }
}

impl<'de> Deserialize<'de> for Ensemble {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A sampled or injected state.
#[derive(Clone, Debug, PartialEq)]
pub enum TrialState {
    Pure(PureState),
    Mixed(DensityMatrix),
}

impl TrialState {
    pub fn dim(&self) -> usize {
        match self {
            TrialState::Pure(p) => p.dim(),
            TrialState::Mixed(r) => r.dim(),
        }
    }

    pub fn is_pure(&self) -> bool {
        matches!(self, TrialState::Pure(_))
    }

    pub fn density(&self) -> DensityMatrix {
        match self {
            TrialState::Pure(p) => p.to_density(),
            TrialState::Mixed(r) => r.clone(),
        }
    }

    fn to_file(&self) -> StateFile {
        match self {
            TrialState::Pure(p) => StateFile::Pure(p.clone()),
            TrialState::Mixed(r) => StateFile::Density(r.clone()),
        }
    }
}

/// When to run the numerical geometric-coherence oracle on mixed states.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NumericCgMode {
    Never,
    /// Only when the conservative check of the averaged geometric coherence
    /// bound fails.
    #[default]
    OnFailure,
    Always,
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub csv: Option<PathBuf>,
    pub summary: Option<PathBuf>,
    pub counterexamples: Option<PathBuf>,
}

fn default_tol() -> f64 {
    bounds::DEFAULT_TOL
}

fn default_numeric_starts() -> usize {
    NumericCgOptions::default().starts
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub dims: Vec<usize>,
    /// Values of M per dimension; defaults to `2..=number of bases`.
    #[serde(default, rename = "M_values", alias = "m_values")]
    pub m_values: BTreeMap<usize, Vec<usize>>,
    pub ensembles: Vec<Ensemble>,
    pub trials: u64,
    pub master_seed: u64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// MUB files overriding the built-in construction for some dimensions.
    #[serde(default)]
    pub mub_files: BTreeMap<usize, PathBuf>,
    #[serde(default)]
    pub numeric_cg: NumericCgMode,
    #[serde(default = "default_numeric_starts")]
    pub numeric_starts: usize,
    #[serde(default)]
    pub output: OutputConfig,
    /// Keep every row in the returned [`SweepResult`].
    #[serde(default)]
    pub keep_reports: bool,
}

impl SweepConfig {
    pub fn new(dims: Vec<usize>, ensembles: Vec<Ensemble>, trials: u64, master_seed: u64) -> Self {
        Self {
            dims,
            m_values: BTreeMap::new(),
            ensembles,
            trials,
            master_seed,
            tol: bounds::DEFAULT_TOL,
            mub_files: BTreeMap::new(),
            numeric_cg: NumericCgMode::default(),
            numeric_starts: default_numeric_starts(),
            output: OutputConfig::default(),
            keep_reports: false,
        }
    }

    pub fn from_json(content: &[u8]) -> Result<Self> {
        Ok(serde_json::from_slice(content)?)
    }

    /// Resolves relative paths against `base`.
    pub fn load(path: &Path) -> Result<Self> {
        let mut config = Self::from_json(&std::fs::read(path)?)?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in config.mub_files.values_mut() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(config)
    }

    fn mub_set(&self, d: usize) -> Result<MubSet> {
        match self.mub_files.get(&d) {
            Some(path) => {
                let set = mub::parse_mub_file(&std::fs::read(path)?)?;
                if set.dim() != d {
                    return Err(Error::DimensionMismatch {
                        expected: d,
                        found: set.dim(),
                    });
                }
                Ok(set)
            }
            None => construct_mub(d),
        }
    }

    /// Checks every cell before any computation starts.
    pub fn validate(&self) -> Result<Vec<(MubSet, Vec<usize>)>> {
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be at least 1".into()));
        }
        if self.dims.is_empty() || self.ensembles.is_empty() {
            return Err(Error::InvalidParameter(
                "dims and ensembles must be nonempty".into(),
            ));
        }
        if self.tol.is_nan() || self.tol < 0.0 {
            return Err(Error::InvalidParameter(format!("bad tolerance {}", self.tol)));
        }
        if let Some(d) = self.m_values.keys().find(|d| !self.dims.contains(d)) {
            return Err(Error::InvalidParameter(format!(
                "M values given for dimension {d} which is not swept"
            )));
        }
        let mut cells = Vec::with_capacity(self.dims.len());
        for &d in &self.dims {
            if d < 2 {
                return Err(Error::BadDimension(d));
            }
            let set = self.mub_set(d)?;
            let ms = match self.m_values.get(&d) {
                Some(ms) => ms.clone(),
                None => (2..=set.len()).collect(),
            };
            if ms.is_empty() {
                return Err(Error::InvalidParameter(format!("no M values for d = {d}")));
            }
            if let Some(&m) = ms.iter().find(|&&m| m == 0 || m > set.len()) {
                return Err(Error::InvalidParameter(format!(
                    "M = {m} is not available for d = {d} ({} bases)",
                    set.len()
                )));
            }
            for e in &self.ensembles {
                if let Ensemble::MixedRank(r) = e {
                    if *r > d {
                        return Err(Error::BadRank { rank: *r, dim: d });
                    }
                }
            }
            cells.push((set, ms));
        }
        Ok(cells)
    }
}

/// Per-basis quantities of one state.
#[derive(Clone, Debug)]
pub struct BasisStats {
    pub probs: ProbDist,
    pub shannon: f64,
    pub min_entropy: f64,
    pub ic: f64,
    pub pmax: f64,
    pub argmax: usize,
    pub coherence: f64,
    /// Exact for pure states, otherwise the two-sided estimate.
    pub geometric: GeomBounds,
}

/// How a row's verdict was reached.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Violated,
    /// The conservative left-hand side failed but the numerical oracle passed.
    Inconclusive,
}

#[derive(Clone, Debug)]
pub struct SweepRow {
    pub ensemble: Ensemble,
    pub trial: u64,
    pub seed: u64,
    pub report: BoundReport,
    pub verdict: Verdict,
    /// Averaged numerical geometric coherence, when the oracle ran.
    pub numeric_lhs: Option<f64>,
}

/// Everything produced by evaluating one state against the first M bases.
#[derive(Clone, Debug)]
pub struct Evaluation {
    pub reports: Vec<BoundReport>,
    pub verdicts: Vec<Verdict>,
    pub numeric_lhs: Option<f64>,
    pub chain: ChainSummary,
}

/// Precomputed data for one MUB set.
pub struct CellContext {
    set: MubSet,
    mim6: Mim6Table,
}

impl CellContext {
    pub fn new(set: MubSet) -> Result<Self> {
        let mim6 = Mim6Table::for_mub(&set)?;
        Ok(Self { set, mim6 })
    }

    pub fn set(&self) -> &MubSet {
        &self.set
    }

    pub fn basis_stats(&self, m: usize, state: &TrialState) -> Result<(Vec<BasisStats>, f64, f64)> {
        let d = self.set.dim();
        if state.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: state.dim(),
            });
        }
        let (purity, entropy) = match state {
            TrialState::Pure(_) => (1.0, 0.0),
            TrialState::Mixed(rho) => (states::purity(rho), states::von_neumann_entropy(rho)),
        };
        let mut stats = Vec::with_capacity(m);
        for basis in &self.set.bases()[..m] {
            let probs = match state {
                TrialState::Pure(psi) => measures::probabilities_pure(basis, psi)?,
                TrialState::Mixed(rho) => measures::probabilities(basis, rho)?,
            };
            let shannon = measures::shannon_entropy(&probs);
            let ic = measures::index_of_coincidence(&probs);
            let pmax = probs.max();
            let geometric = if state.is_pure() {
                let exact = (1.0 - pmax).max(0.0);
                let mut g = measures::geom_bounds_from_stats(d, ic, purity, pmax)?;
                g.upper = exact;
                g
            } else {
                measures::geom_bounds_from_stats(d, ic, purity, pmax)?
            };
            stats.push(BasisStats {
                argmax: probs.argmax(),
                min_entropy: measures::min_entropy(&probs),
                coherence: measures::coherence_from_entropies(shannon, entropy),
                probs,
                shannon,
                ic,
                pmax,
                geometric,
            });
        }
        Ok((stats, purity, entropy))
    }

    /// Evaluates every applicable bound for the first `m` bases.
    pub fn evaluate(
        &self,
        m: usize,
        state: &TrialState,
        tol: f64,
        numeric: NumericCgMode,
        numeric_starts: usize,
        label: &str,
    ) -> Result<Evaluation> {
        if m == 0 || m > self.set.len() {
            return Err(Error::InvalidParameter(format!(
                "M = {m} not available ({} bases)",
                self.set.len()
            )));
        }
        let d = self.set.dim();
        let (stats, purity, entropy) = self.basis_stats(m, state)?;
        let params = MubBoundParams {
            d,
            m,
            purity,
            entropy,
        };
        let mf = m as f64;
        let mean = |f: &dyn Fn(&BasisStats) -> f64| stats.iter().map(f).sum::<f64>() / mf;

        let avg_c1 = mean(&|s| s.coherence);
        let avg_hmin = mean(&|s| s.min_entropy);
        let ic_sum: f64 = stats.iter().map(|s| s.ic).sum();
        let pmax_sum: f64 = stats.iter().map(|s| s.pmax).sum();
        let argmax: Vec<usize> = stats.iter().map(|s| s.argmax).collect();

        let mut reports = Vec::with_capacity(11);
        let mut verdicts = Vec::with_capacity(11);
        let mut numeric_lhs = None;
        let mut push = |r: BoundReport, v: Option<Verdict>| {
            let v = v.unwrap_or(if r.holds { Verdict::Holds } else { Verdict::Violated });
            reports.push(r);
            verdicts.push(v);
        };

        push(
            bounds::check_lower_bound(BoundId::Prop1, avg_c1, bounds::prop1_rhs(&params), tol, &params, label),
            None,
        );

        let prop2_rhs = bounds::prop2_rhs(&params)?;
        match state {
            TrialState::Pure(_) => {
                let avg_cg = mean(&|s| s.geometric.upper);
                push(
                    bounds::check_lower_bound(BoundId::Prop2, avg_cg, prop2_rhs, tol, &params, label),
                    None,
                );
            }
            TrialState::Mixed(rho) => {
                let conservative = mean(&|s| s.geometric.lower);
                let report = bounds::check_lower_bound(
                    BoundId::Prop2,
                    conservative,
                    prop2_rhs,
                    tol,
                    &params,
                    label,
                );
                let run_numeric = match numeric {
                    NumericCgMode::Never => false,
                    NumericCgMode::OnFailure => !report.holds,
                    NumericCgMode::Always => true,
                };
                if run_numeric {
                    let opts = NumericCgOptions {
                        starts: numeric_starts.max(1),
                        ..Default::default()
                    };
                    let mut total = 0.0;
                    for basis in &self.set.bases()[..m] {
                        total += measures::geometric_coherence_numeric(basis, rho, &opts)?.value;
                    }
                    numeric_lhs = Some(total / mf);
                }
                if report.holds {
                    push(report, None);
                } else {
                    match numeric_lhs {
                        Some(num) if num - prop2_rhs >= -tol => {
                            let mut r = report;
                            r.lhs = num;
                            r.slack = num - prop2_rhs;
                            r.holds = true;
                            push(r, Some(Verdict::Inconclusive));
                        }
                        _ => push(report, None),
                    }
                }
            }
        }

        push(
            bounds::check_upper_bound(
                BoundId::IcSum,
                ic_sum,
                bounds::ic_sum_rhs(d, m, purity).state_dependent,
                tol,
                &params,
                label,
            ),
            None,
        );
        push(
            bounds::check_lower_bound(BoundId::Prop3, avg_hmin, bounds::prop3_rhs(d, m), tol, &params, label),
            None,
        );
        push(
            bounds::check_lower_bound(BoundId::Rmub12, avg_hmin, bounds::rmub12_rhs(d, m), tol, &params, label),
            None,
        );
        push(
            bounds::check_upper_bound(BoundId::Mim6, pmax_sum, self.mim6.rhs(&argmax), tol, &params, label),
            None,
        );

        if state.is_pure() {
            let avg_cg = mean(&|s| s.geometric.upper);
            push(
                bounds::check_lower_bound(BoundId::Prop1Pure, avg_c1, bounds::prop1_pure_rhs(d, m), tol, &params, label),
                None,
            );
            push(
                bounds::check_lower_bound(BoundId::PatiMub, avg_c1, bounds::pati_mub_rhs(d, m), tol, &params, label),
                None,
            );
            push(
                bounds::check_lower_bound(BoundId::Prop2Pure, avg_cg, bounds::prop2_pure_rhs(d, m), tol, &params, label),
                None,
            );
            push(
                bounds::check_lower_bound(
                    BoundId::Prop2LpPure,
                    avg_cg,
                    bounds::prop2_pure_lp_rhs(d, m),
                    tol,
                    &params,
                    label,
                ),
                None,
            );
            push(
                bounds::check_upper_bound(
                    BoundId::MaxprobSum,
                    pmax_sum,
                    bounds::maxprob_sum_rhs(d, m),
                    tol,
                    &params,
                    label,
                ),
                None,
            );
        }

        let mut chain = ChainSummary::default();
        for s in &stats {
            chain.record(s);
        }
        Ok(Evaluation {
            reports,
            verdicts,
            numeric_lhs,
            chain,
        })
    }
}

/// Margins of the per-basis chain `H₁ ≥ -ln J ≥ H_∞`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChainSummary {
    pub checks: u64,
    pub violations: u64,
    /// Smallest `H₁ + ln J` seen.
    pub min_shannon_gap: f64,
    /// Smallest `-ln J - H_∞` seen.
    pub min_collision_gap: f64,
}

impl Default for ChainSummary {
    fn default() -> Self {
        Self {
            checks: 0,
            violations: 0,
            min_shannon_gap: f64::INFINITY,
            min_collision_gap: f64::INFINITY,
        }
    }
}

impl ChainSummary {
    fn record(&mut self, s: &BasisStats) {
        let collision = -s.ic.ln();
        let g1 = s.shannon - collision;
        let g2 = collision - s.min_entropy;
        self.checks += 1;
        if g1 < -CHAIN_TOL || g2 < -CHAIN_TOL {
            self.violations += 1;
        }
        self.min_shannon_gap = self.min_shannon_gap.min(g1);
        self.min_collision_gap = self.min_collision_gap.min(g2);
    }

    fn merge(&mut self, other: &ChainSummary) {
        self.checks += other.checks;
        self.violations += other.violations;
        self.min_shannon_gap = self.min_shannon_gap.min(other.min_shannon_gap);
        self.min_collision_gap = self.min_collision_gap.min(other.min_collision_gap);
    }
}

/// Slack statistics for one bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundSummary {
    pub count: u64,
    pub min_slack: f64,
    pub mean_slack: f64,
    pub violations: u64,
    pub inconclusive: u64,
    slack_sum: f64,
}

impl Default for BoundSummary {
    fn default() -> Self {
        Self {
            count: 0,
            min_slack: f64::INFINITY,
            mean_slack: 0.0,
            violations: 0,
            inconclusive: 0,
            slack_sum: 0.0,
        }
    }
}

impl BoundSummary {
    fn record(&mut self, row: &SweepRow) {
        self.count += 1;
        self.min_slack = self.min_slack.min(row.report.slack);
        self.slack_sum += row.report.slack;
        self.mean_slack = self.slack_sum / self.count as f64;
        match row.verdict {
            Verdict::Violated => self.violations += 1,
            Verdict::Inconclusive => self.inconclusive += 1,
            Verdict::Holds => {}
        }
    }

    fn merge(&mut self, other: &BoundSummary) {
        self.count += other.count;
        self.min_slack = self.min_slack.min(other.min_slack);
        self.slack_sum += other.slack_sum;
        self.mean_slack = if self.count > 0 {
            self.slack_sum / self.count as f64
        } else {
            0.0
        };
        self.violations += other.violations;
        self.inconclusive += other.inconclusive;
    }
}

/// A reproducible violation: the state and the MUB set it was measured in.
#[derive(Clone, Debug, PartialEq)]
pub struct Counterexample {
    pub bound_id: BoundId,
    pub d: usize,
    pub m: usize,
    pub ensemble: Ensemble,
    pub trial: u64,
    pub seed: u64,
    pub lhs: f64,
    pub rhs: f64,
    pub mub: MubSet,
    pub state: StateFile,
}

#[derive(Clone, Debug)]
pub struct CellResult {
    pub d: usize,
    pub m: usize,
    pub ensemble: Ensemble,
    /// Empty unless the sweep keeps its reports.
    pub rows: Vec<SweepRow>,
    pub summary: BTreeMap<BoundId, BoundSummary>,
}

#[derive(Clone, Debug, Default)]
pub struct SweepResult {
    pub cells: Vec<CellResult>,
    pub summary: BTreeMap<BoundId, BoundSummary>,
    pub chain: ChainSummary,
    pub counterexamples: Vec<Counterexample>,
}

impl SweepResult {
    pub fn violations(&self) -> u64 {
        self.summary.values().map(|s| s.violations).sum()
    }

    pub fn inconclusive(&self) -> u64 {
        self.summary.values().map(|s| s.inconclusive).sum()
    }

    /// Summary JSON: per-bound count, min/mean slack, violations.
    pub fn summary_json(&self) -> String {
        let mut out = String::from("{\n  \"bounds\": {\n");
        let n = self.summary.len();
        for (k, (id, s)) in self.summary.iter().enumerate() {
            let _ = writeln!(
                out,
                "    \"{id}\": {{\"count\": {}, \"min_slack\": {}, \"mean_slack\": {}, \"violations\": {}, \"inconclusive\": {}}}{}",
                s.count,
                json_f64(s.min_slack),
                json_f64(s.mean_slack),
                s.violations,
                s.inconclusive,
                if k + 1 < n { "," } else { "" }
            );
        }
        let _ = write!(
            out,
            "  }},\n  \"entropy_chain\": {{\"checks\": {}, \"violations\": {}, \"min_shannon_gap\": {}, \"min_collision_gap\": {}}},\n  \"violations\": {},\n  \"inconclusive\": {}\n}}\n",
            self.chain.checks,
            self.chain.violations,
            json_f64(self.chain.min_shannon_gap),
            json_f64(self.chain.min_collision_gap),
            self.violations(),
            self.inconclusive()
        );
        out
    }
}

/// Receives rows in deterministic order as cells complete.
pub trait RowSink {
    fn write_rows(&mut self, rows: &[SweepRow]) -> Result<()>;
}

pub const CSV_HEADER: &str = "bound_id,d,M,ensemble,trial,lhs,rhs,slack,holds,purity,entropy,seed";

pub struct CsvSink<W: Write> {
    out: W,
}

impl<W: Write> CsvSink<W> {
    pub fn new(mut out: W) -> Result<Self> {
        writeln!(out, "{CSV_HEADER}")?;
        Ok(Self { out })
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}

impl<W: Write> RowSink for CsvSink<W> {
    fn write_rows(&mut self, rows: &[SweepRow]) -> Result<()> {
        for row in rows {
            let r = &row.report;
            writeln!(
                self.out,
                "{},{},{},{},{},{},{},{},{},{},{},{}",
                r.bound_id,
                r.d,
                r.m,
                row.ensemble,
                row.trial,
                fmt_f64(r.lhs),
                fmt_f64(r.rhs),
                fmt_f64(r.slack),
                r.holds,
                fmt_f64(r.purity),
                fmt_f64(r.entropy),
                row.seed
            )?;
        }
        Ok(())
    }
}

/// Builds a pool honouring [`THREADS_ENV`].
pub fn thread_pool() -> Result<rayon::ThreadPool> {
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) => v.trim().parse::<usize>().map_err(|_| {
            Error::InvalidParameter(format!("{THREADS_ENV} must be an integer, got {v:?}"))
        })?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidParameter(e.to_string()))
}

/// Runs a sweep, writing the outputs named in `config.output`.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepResult> {
    let mut csv = match &config.output.csv {
        Some(path) => Some(CsvSink::new(BufWriter::new(File::create(path)?))?),
        None => None,
    };
    let result = match csv.as_mut() {
        Some(sink) => run_sweep_with_sink(config, Some(sink))?,
        None => run_sweep_with_sink(config, None)?,
    };
    if let Some(sink) = csv {
        sink.into_inner().flush()?;
    }
    if let Some(path) = &config.output.summary {
        std::fs::write(path, result.summary_json())?;
    }
    if let Some(path) = &config.output.counterexamples {
        if !result.counterexamples.is_empty() {
            std::fs::write(path, counterexamples_json(&result.counterexamples))?;
        }
    }
    Ok(result)
}

struct TrialOutcome {
    rows: Vec<SweepRow>,
    chain: ChainSummary,
    state: TrialState,
}

/// Runs a sweep, streaming rows to `sink` cell by cell. No files are
/// written here.
pub fn run_sweep_with_sink(
    config: &SweepConfig,
    mut sink: Option<&mut dyn RowSink>,
) -> Result<SweepResult> {
    let cells = config.validate()?;
    let pool = thread_pool()?;
    let mut result = SweepResult::default();

    for (set, ms) in cells {
        let d = set.dim();
        let ctx = CellContext::new(set)?;
        for &m in &ms {
            for &ensemble in &config.ensembles {
                let label = ensemble.to_string();
                let outcomes: Vec<Result<TrialOutcome>> = pool.install(|| {
                    (0..config.trials)
                        .into_par_iter()
                        .map(|trial| {
                            let seed = derive_seed(
                                config.master_seed,
                                &[d as u64, m as u64, ensemble.code(), trial],
                            );
                            let state = ensemble.sample(d, seed)?;
                            let eval = ctx.evaluate(
                                m,
                                &state,
                                config.tol,
                                config.numeric_cg,
                                config.numeric_starts,
                                &label,
                            )?;
                            let rows = eval
                                .reports
                                .into_iter()
                                .zip(eval.verdicts)
                                .map(|(report, verdict)| SweepRow {
                                    ensemble,
                                    trial,
                                    seed,
                                    numeric_lhs: (report.bound_id == BoundId::Prop2)
                                        .then_some(eval.numeric_lhs)
                                        .flatten(),
                                    report,
                                    verdict,
                                })
                                .collect();
                            Ok(TrialOutcome {
                                rows,
                                chain: eval.chain,
                                state,
                            })
                        })
                        .collect()
                });

                let mut cell = CellResult {
                    d,
                    m,
                    ensemble,
                    rows: Vec::new(),
                    summary: BTreeMap::new(),
                };
                let mut cell_rows = Vec::new();
                for outcome in outcomes {
                    let outcome = outcome?;
                    result.chain.merge(&outcome.chain);
                    for row in &outcome.rows {
                        cell.summary.entry(row.report.bound_id).or_default().record(row);
                        if row.verdict == Verdict::Violated
                            && result.counterexamples.len() < MAX_COUNTEREXAMPLES
                        {
                            result.counterexamples.push(Counterexample {
                                bound_id: row.report.bound_id,
                                d,
                                m,
                                ensemble,
                                trial: row.trial,
                                seed: row.seed,
                                lhs: row.report.lhs,
                                rhs: row.report.rhs,
                                mub: ctx.set().truncated(m)?,
                                state: outcome.state.to_file(),
                            });
                        }
                    }
                    cell_rows.extend(outcome.rows);
                }
                if let Some(s) = sink.as_deref_mut() {
                    s.write_rows(&cell_rows)?;
                }
                for (id, s) in &cell.summary {
                    result.summary.entry(*id).or_default().merge(s);
                }
                if config.keep_reports {
                    cell.rows = cell_rows;
                }
                result.cells.push(cell);
            }
        }
    }
    Ok(result)
}

pub fn counterexamples_json(items: &[Counterexample]) -> String {
    let mut out = String::from("{\n  \"counterexamples\": [\n");
    for (k, c) in items.iter().enumerate() {
        let _ = write!(
            out,
            "    {{\n      \"bound_id\": \"{}\",\n      \"d\": {},\n      \"M\": {},\n      \"ensemble\": \"{}\",\n      \"trial\": {},\n      \"seed\": {},\n      \"lhs\": {},\n      \"rhs\": {},\n      \"mub\": ",
            c.bound_id, c.d, c.m, c.ensemble, c.trial, c.seed, json_f64(c.lhs), json_f64(c.rhs)
        );
        mub::write_mub(&mut out, &c.mub, "      ");
        out.push_str(",\n      \"state\": ");
        io::write_state(&mut out, &c.state, "      ");
        out.push_str(if k + 1 < items.len() { "\n    },\n" } else { "\n    }\n" });
    }
    out.push_str("  ]\n}\n");
    out
}

#[derive(Deserialize)]
struct RawCounterexample {
    bound_id: String,
    d: usize,
    #[serde(rename = "M")]
    m: usize,
    ensemble: String,
    trial: u64,
    seed: u64,
    lhs: Option<f64>,
    rhs: Option<f64>,
    mub: serde_json::Value,
    state: serde_json::Value,
}

#[derive(Deserialize)]
struct RawCounterexamples {
    counterexamples: Vec<RawCounterexample>,
}

/// Reads a counterexample dump back for re-evaluation.
pub fn parse_counterexamples(content: &[u8]) -> Result<Vec<Counterexample>> {
    let raw: RawCounterexamples = serde_json::from_slice(content)?;
    raw.counterexamples
        .into_iter()
        .map(|c| {
            Ok(Counterexample {
                bound_id: c.bound_id.parse()?,
                d: c.d,
                m: c.m,
                ensemble: c.ensemble.parse()?,
                trial: c.trial,
                seed: c.seed,
                lhs: c.lhs.unwrap_or(f64::NAN),
                rhs: c.rhs.unwrap_or(f64::NAN),
                mub: mub::parse_mub_value(c.mub)?,
                state: io::parse_state_value(c.state)?,
            })
        })
        .collect()
}

// --- Table 1 ----------------------------------------------------------------

/// Smallest `M ≥ 2` at which the pure-state bound `ln(Md/(d+M-1))` is at
/// least `(ln d)/M`. The former increases and the latter decreases in `M`,
/// so every larger `M` also qualifies.
pub fn crossover_m(d: usize) -> usize {
    let mut m = 2;
    while bounds::prop1_pure_rhs(d, m) < bounds::pati_mub_rhs(d, m) {
        m += 1;
    }
    m
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Table1Row {
    pub m1: usize,
    pub d_low: usize,
    pub d_high: usize,
}

/// Maximal runs of consecutive `d ∈ [2, d_max]` sharing the same crossover.
pub fn table1_intervals(d_max: usize) -> Result<Vec<Table1Row>> {
    if d_max < 2 {
        return Err(Error::BadDimension(d_max));
    }
    let mut rows: Vec<Table1Row> = Vec::new();
    for d in 2..=d_max {
        let m1 = crossover_m(d);
        match rows.last_mut() {
            Some(last) if last.m1 == m1 => last.d_high = d,
            _ => rows.push(Table1Row {
                m1,
                d_low: d,
                d_high: d,
            }),
        }
    }
    Ok(rows)
}

// --- comparisons ------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Winner {
    First,
    Second,
    Tie,
}

impl Winner {
    fn of(a: f64, b: f64) -> Self {
        if a > b {
            Winner::First
        } else if b > a {
            Winner::Second
        } else {
            Winner::Tie
        }
    }
}

/// A pair of competing lower bounds at one `(d, M)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pair {
    pub first: f64,
    pub second: f64,
    pub winner: Winner,
}

impl Pair {
    fn new(first: f64, second: f64) -> Self {
        Self {
            first,
            second,
            winner: Winner::of(first, second),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComparisonRow {
    pub d: usize,
    pub m: usize,
    /// `prop1_pure` against `pati_mub`.
    pub coherence: Pair,
    /// `prop2_pure` against `prop2_lp_pure`.
    pub geometric: Pair,
    /// `prop3` against `rmub12`.
    pub min_entropy: Pair,
}

pub fn compare_bounds(d: usize, ms: &[usize]) -> Result<Vec<ComparisonRow>> {
    if d < 2 {
        return Err(Error::BadDimension(d));
    }
    ms.iter()
        .map(|&m| {
            if m == 0 {
                return Err(Error::InvalidParameter("M must be at least 1".into()));
            }
            Ok(ComparisonRow {
                d,
                m,
                coherence: Pair::new(bounds::prop1_pure_rhs(d, m), bounds::pati_mub_rhs(d, m)),
                geometric: Pair::new(
                    bounds::prop2_pure_rhs(d, m),
                    bounds::prop2_pure_lp_rhs(d, m),
                ),
                min_entropy: Pair::new(bounds::prop3_rhs(d, m), bounds::rmub12_rhs(d, m)),
            })
        })
        .collect()
}

// --- saturation -------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SaturationEntry {
    pub d: usize,
    pub trials: u64,
    /// `max |Σ_t J_t - (tr ρ² + 1)|` over full-rank mixed states.
    pub max_mixed_deviation: f64,
    /// The same over pure states, where the target is 2.
    pub max_pure_deviation: f64,
    /// Averaged relative entropy of coherence at `I/d`, all `d + 1` bases.
    pub mixed_state_avg_coherence: f64,
    /// Slack of the averaged-coherence bound at `I/d`.
    pub mixed_state_prop1_slack: f64,
}

impl SaturationEntry {
    pub fn passed(&self, tol: f64) -> bool {
        self.max_mixed_deviation <= tol
            && self.max_pure_deviation <= tol
            && self.mixed_state_prop1_slack.abs() <= tol
    }
}

/// Checks that the index-of-coincidence bound is an equality for a
/// complete set of `d + 1` MUBs.
pub fn saturation_suite(dims: &[usize], trials: u64, seed: u64) -> Result<Vec<SaturationEntry>> {
    let pool = thread_pool()?;
    dims.iter()
        .map(|&d| {
            let set = construct_mub(d)?;
            let full = set.len();
            let deviation = |state: &TrialState| -> Result<f64> {
                let rho = state.density();
                let mut total = 0.0;
                for b in set.bases() {
                    total += measures::index_of_coincidence(&measures::probabilities(b, &rho)?);
                }
                Ok((total - (states::purity(&rho) + 1.0)).abs())
            };
            let max_over = |ensemble: Ensemble| -> Result<f64> {
                let devs: Vec<Result<f64>> = pool.install(|| {
                    (0..trials)
                        .into_par_iter()
                        .map(|t| {
                            let s = derive_seed(seed, &[d as u64, ensemble.code(), t]);
                            deviation(&ensemble.sample(d, s)?)
                        })
                        .collect()
                });
                devs.into_iter().try_fold(0.0_f64, |m, v| Ok(m.max(v?)))
            };
            let max_mixed_deviation = max_over(Ensemble::Mixed)?;
            let max_pure_deviation = max_over(Ensemble::Pure)?;

            let mixed = DensityMatrix::maximally_mixed(d);
            let mut c1 = 0.0;
            for b in set.bases() {
                c1 += measures::rel_entropy_coherence(b, &mixed)?;
            }
            let avg = c1 / full as f64;
            let params = MubBoundParams::maximally_mixed(d, full)?;
            Ok(SaturationEntry {
                d,
                trials,
                max_mixed_deviation,
                max_pure_deviation,
                mixed_state_avg_coherence: avg,
                mixed_state_prop1_slack: avg - bounds::prop1_rhs(&params),
            })
        })
        .collect()
}
