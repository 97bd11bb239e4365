//! Seeded trial suites over the law catalog, reports, and sharpness search.
//!
//! # Trial seeds
//!
//! Trial `t` of law `L` at p-grid index `i` and block size `n` draws its
//! inputs from
//!
//! ```text
//! trial_seed = splitmix64(fnv1a64(L.id ++ 0xff ++ le64(i) ++ le64(n) ++ le64(t) ++ le64(master_seed)))
//! ```
//!
//! Input matrix `k` of the trial uses
//! `random_matrix(kind, dim, splitmix64(trial_seed ^ k * 0x9e3779b97f4a7c15))`,
//! where `kind` cycles through the generator mix by trial index. Block-grid
//! laws pick their grid as `grids[(trial_seed >> 32) % grids.len()]`.
//! Results depend only on these values, never on execution order.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laws::{self, evaluate_law, evaluate_law_exploratory, InputDescriptor, Law, LawCheck, LawId, LawInput, LawKind, Verdict};
use crate::matrix::ComplexMatrix;
use crate::optimize::OptimizerConfig;
use crate::random::{random_matrix, MatrixKind};
use crate::spectral::PNorm;

pub const SEED_DERIVATION: &str = "trial_seed = splitmix64(fnv1a64(law_id ++ 0xff ++ le64(p_index) ++ le64(dim) ++ le64(trial) ++ le64(master_seed))); matrix k seed = splitmix64(trial_seed ^ k * 0x9e3779b97f4a7c15)";

pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn fnv1a64(bytes: impl IntoIterator<Item = u8>) -> u64 {
    bytes.into_iter().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3))
}

pub fn trial_seed(law: LawId, p_index: usize, dim: usize, trial: usize, master_seed: u64) -> u64 {
    let bytes = law
        .as_str()
        .bytes()
        .chain([0xff])
        .chain((p_index as u64).to_le_bytes())
        .chain((dim as u64).to_le_bytes())
        .chain((trial as u64).to_le_bytes())
        .chain(master_seed.to_le_bytes());
    splitmix64(fnv1a64(bytes))
}

fn matrix_seed(trial_seed: u64, k: usize) -> u64 {
    splitmix64(trial_seed ^ (k as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// Integer weights of the input generators, cycled by trial index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeneratorMix {
    pub ginibre: u32,
    pub hermitian: u32,
    pub unitary: u32,
    pub nilpotent_upper: u32,
}

impl Default for GeneratorMix {
    fn default() -> Self {
        Self {
            ginibre: 2,
            hermitian: 1,
            unitary: 1,
            nilpotent_upper: 1,
        }
    }
}

impl GeneratorMix {
    pub fn cycle(&self) -> Vec<MatrixKind> {
        [
            (MatrixKind::Ginibre, self.ginibre),
            (MatrixKind::Hermitian, self.hermitian),
            (MatrixKind::Unitary, self.unitary),
            (MatrixKind::NilpotentUpper, self.nilpotent_upper),
        ]
        .into_iter()
        .flat_map(|(k, w)| std::iter::repeat_n(k, w as usize))
        .collect()
    }

    pub fn kind_for_trial(&self, trial: usize) -> MatrixKind {
        let cycle = self.cycle();
        cycle[trial % cycle.len()]
    }
}

fn default_p_grid() -> Vec<PNorm> {
    [1.0, 1.25, 1.5, 2.0, 3.0, 4.0, 10.0]
        .iter()
        .map(|&p| PNorm::finite(p).expect("valid"))
        .chain([PNorm::INFINITY])
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SuiteConfig {
    pub p_grid: Vec<PNorm>,
    pub dims: Vec<usize>,
    /// Trials per (law, p, dim) cell.
    pub trials: usize,
    pub master_seed: u64,
    pub generator_mix: GeneratorMix,
    pub optimizer: OptimizerConfig,
    /// Restrict to these laws; all laws when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub laws: Option<Vec<LawId>>,
    /// Block grids used by the block-partition laws.
    pub grids: Vec<usize>,
    /// Also evaluate laws at grid exponents outside their asserted domain.
    pub explore_outside_domain: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            p_grid: default_p_grid(),
            dims: vec![1, 2, 3, 5, 8],
            trials: 100,
            master_seed: 0,
            generator_mix: GeneratorMix::default(),
            optimizer: OptimizerConfig::default(),
            laws: None,
            grids: vec![2, 3],
            explore_outside_domain: false,
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.to_string()));
        if self.trials == 0 {
            return bad("trials must be at least 1");
        }
        if self.p_grid.is_empty() {
            return bad("p_grid is empty");
        }
        if self.dims.is_empty() || self.dims.contains(&0) {
            return bad("dims must be non-empty and positive");
        }
        if self.grids.is_empty() || self.grids.contains(&0) {
            return bad("grids must be non-empty and positive");
        }
        if self.generator_mix.cycle().is_empty() {
            return bad("generator_mix has no positive weight");
        }
        self.optimizer.validate()
    }

    pub fn selected_laws(&self) -> Vec<&'static Law> {
        match &self.laws {
            None => laws::list_laws().iter().collect(),
            Some(ids) => laws::list_laws().iter().filter(|l| ids.contains(&l.id)).collect(),
        }
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(s).map_err(|e| Error::Format {
            field: "suite config".into(),
            msg: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// One work item of a suite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Trial {
    pub law: &'static Law,
    pub p_index: usize,
    pub p: PNorm,
    pub dim: usize,
    pub trial: usize,
    pub kind: MatrixKind,
    pub trial_seed: u64,
    pub grid: Option<usize>,
    pub exploratory: bool,
}

impl Trial {
    pub fn inputs(&self) -> Result<LawInput> {
        trial_inputs(self.law, self.kind, self.dim, self.trial_seed, self.grid)
    }

    fn descriptor(&self) -> InputDescriptor {
        InputDescriptor::Generated {
            kind: self.kind,
            dim: self.dim,
            trial_seed: self.trial_seed,
            grid: self.grid,
        }
    }

    /// CLI invocation that rebuilds this exact check.
    pub fn reproduce_command(&self) -> String {
        let mut cmd = format!(
            "pradius check --law {} --p {} --dim {} --trial-seed {} --kind {}",
            self.law.id, self.p, self.dim, self.trial_seed, self.kind
        );
        if let Some(g) = self.grid {
            cmd.push_str(&format!(" --grid {g}"));
        }
        cmd
    }

    pub fn run(&self, cfg: &OptimizerConfig) -> Result<LawCheck> {
        let input = self.inputs()?;
        let mut check = if self.exploratory {
            evaluate_law_exploratory(self.law, &input, self.p, cfg)?
        } else {
            evaluate_law(self.law, &input, self.p, cfg)?
        };
        check.input = self.descriptor();
        Ok(check)
    }
}

/// Inputs of one trial, a pure function of its arguments.
pub fn trial_inputs(law: &Law, kind: MatrixKind, dim: usize, trial_seed: u64, grid: Option<usize>) -> Result<LawInput> {
    let grid_used = grid.unwrap_or(2);
    let n = law.input_dim(dim, grid_used);
    let matrices = (0..law.arity)
        .map(|k| random_matrix(kind, n, matrix_seed(trial_seed, k)))
        .collect::<Result<Vec<_>>>()?;
    let mut input = LawInput::new(matrices);
    if let Some(g) = grid {
        input = input.with_grid(g);
    }
    Ok(input)
}

fn is_block_law(law: &Law) -> bool {
    matches!(law.id, LawId::BkUpper | LawId::BkLower)
}

/// All work items of a suite, in report order.
pub fn plan(cfg: &SuiteConfig) -> Vec<Trial> {
    let mut out = Vec::new();
    for law in cfg.selected_laws() {
        for (p_index, &p) in cfg.p_grid.iter().enumerate() {
            let in_domain = law.p_domain.contains(p);
            if !in_domain && !(cfg.explore_outside_domain && law.evaluable_at(p)) {
                continue;
            }
            for &dim in &cfg.dims {
                for trial in 0..cfg.trials {
                    let seed = trial_seed(law.id, p_index, dim, trial, cfg.master_seed);
                    let grid = is_block_law(law).then(|| cfg.grids[((seed >> 32) % cfg.grids.len() as u64) as usize]);
                    out.push(Trial {
                        law,
                        p_index,
                        p,
                        dim,
                        trial,
                        kind: cfg.generator_mix.kind_for_trial(trial),
                        trial_seed: seed,
                        grid,
                        exploratory: !in_domain,
                    });
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Fail,
    Uncertified,
}

/// Where a trial came from; enough to regenerate its inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRef {
    pub p: PNorm,
    pub dim: usize,
    pub trial: usize,
    pub kind: MatrixKind,
    pub trial_seed: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub grid: Option<usize>,
}

impl From<&Trial> for TrialRef {
    fn from(t: &Trial) -> Self {
        Self {
            p: t.p,
            dim: t.dim,
            trial: t.trial,
            kind: t.kind,
            trial_seed: t.trial_seed,
            grid: t.grid,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureRecord {
    pub law_id: LawId,
    pub outcome: Outcome,
    pub instance: TrialRef,
    pub reproduce: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub check: Option<LawCheck>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub message: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Tally {
    pub trials: usize,
    pub passes: usize,
    pub failures: usize,
    pub uncertified: usize,
    pub equality_witnesses: usize,
    pub min_slack: Option<f64>,
    pub max_abs_slack: Option<f64>,
    pub max_eps_budget: Option<f64>,
}

impl Tally {
    fn record(&mut self, outcome: &std::result::Result<LawCheck, String>) {
        self.trials += 1;
        match outcome {
            Err(_) => self.uncertified += 1,
            Ok(c) => {
                if c.verdict.passed() {
                    self.passes += 1;
                } else {
                    self.failures += 1;
                }
                if c.verdict == Verdict::EqualityWitness {
                    self.equality_witnesses += 1;
                }
                self.min_slack = Some(self.min_slack.map_or(c.slack, |m| m.min(c.slack)));
                self.max_abs_slack = Some(self.max_abs_slack.map_or(c.slack.abs(), |m| m.max(c.slack.abs())));
                self.max_eps_budget = Some(self.max_eps_budget.map_or(c.eps_budget, |m| m.max(c.eps_budget)));
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub p: PNorm,
    pub dim: usize,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub exploratory: bool,
    #[serde(flatten)]
    pub tally: Tally,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LawSummary {
    pub law_id: LawId,
    pub kind: LawKind,
    pub p_domain: String,
    #[serde(flatten)]
    pub tally: Tally,
    /// Exploratory checks outside the p-domain, and how many of them
    /// violated the statement.
    pub exploratory: usize,
    pub exploratory_violations: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub min_slack_instance: Option<TrialRef>,
    pub cells: Vec<CellSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub config: SuiteConfig,
    pub laws: Vec<LawSummary>,
    pub failures: Vec<FailureRecord>,
    pub version: String,
    pub seed_derivation: String,
    /// Seconds spent; the only field that differs between identical runs.
    pub wall_clock_s: f64,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Format {
            field: "report".into(),
            msg: e.to_string(),
        })
    }

    /// One row per (law, p, dim) cell. Reals use 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "law_id,p,dim,exploratory,trials,passes,failures,uncertified,equality_witnesses,min_slack,max_abs_slack,max_eps_budget\n",
        );
        let num = |x: Option<f64>| x.map(|v| format!("{v:.16e}")).unwrap_or_default();
        for law in &self.laws {
            for c in &law.cells {
                let t = &c.tally;
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},{},{},{}\n",
                    law.law_id,
                    c.p,
                    c.dim,
                    c.exploratory,
                    t.trials,
                    t.passes,
                    t.failures,
                    t.uncertified,
                    t.equality_witnesses,
                    num(t.min_slack),
                    num(t.max_abs_slack),
                    num(t.max_eps_budget),
                ));
            }
        }
        out
    }
}

/// Runs a suite on the current rayon pool.
pub fn run_suite(cfg: &SuiteConfig) -> Result<Report> {
    cfg.validate()?;
    let start = Instant::now();
    let trials = plan(cfg);
    let outcomes: Vec<std::result::Result<LawCheck, String>> = trials
        .par_iter()
        .map(|t| match t.run(&cfg.optimizer) {
            Ok(c) => Ok(Ok(c)),
            Err(e @ Error::Uncertified { .. }) => Ok(Err(e.to_string())),
            Err(e) => Err(e),
        })
        .collect::<Result<_>>()?;
    let mut report = aggregate(cfg, &trials, outcomes);
    report.wall_clock_s = start.elapsed().as_secs_f64();
    Ok(report)
}

/// Runs a suite on a dedicated pool of `threads` workers.
pub fn run_suite_with_threads(cfg: &SuiteConfig, threads: usize) -> Result<Report> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidConfig(e.to_string()))?;
    pool.install(|| run_suite(cfg))
}

fn aggregate(cfg: &SuiteConfig, trials: &[Trial], outcomes: Vec<std::result::Result<LawCheck, String>>) -> Report {
    let mut summaries: Vec<LawSummary> = Vec::new();
    let mut failures = Vec::new();

    for (t, outcome) in trials.iter().zip(outcomes) {
        if summaries.last().is_none_or(|s| s.law_id != t.law.id) {
            summaries.push(LawSummary {
                law_id: t.law.id,
                kind: t.law.kind,
                p_domain: t.law.p_domain.to_string(),
                tally: Tally::default(),
                exploratory: 0,
                exploratory_violations: 0,
                min_slack_instance: None,
                cells: Vec::new(),
            });
        }
        let summary = summaries.last_mut().expect("pushed above");
        if summary.cells.last().is_none_or(|c| c.p != t.p || c.dim != t.dim) {
            summary.cells.push(CellSummary {
                p: t.p,
                dim: t.dim,
                exploratory: t.exploratory,
                tally: Tally::default(),
            });
        }
        summary.cells.last_mut().expect("pushed above").tally.record(&outcome);

        if t.exploratory {
            summary.exploratory += 1;
            if matches!(&outcome, Ok(c) if !c.verdict.passed()) {
                summary.exploratory_violations += 1;
            }
            continue;
        }

        let prev_min = summary.tally.min_slack;
        summary.tally.record(&outcome);
        if let Ok(c) = &outcome {
            if prev_min.is_none_or(|m| c.slack < m) {
                summary.min_slack_instance = Some(TrialRef::from(t));
            }
        }
        let record = |outcome, check, message| FailureRecord {
            law_id: t.law.id,
            outcome,
            instance: TrialRef::from(t),
            reproduce: t.reproduce_command(),
            check,
            message,
        };
        match outcome {
            Ok(c) if !c.verdict.passed() => failures.push(record(Outcome::Fail, Some(c), None)),
            Err(msg) => failures.push(record(Outcome::Uncertified, None, Some(msg))),
            Ok(_) => {}
        }
    }

    // plan order is already (law, p, dim, trial); the sort keeps that
    // contract independent of how the plan is built
    let law_pos = |id: LawId| LawId::ALL.iter().position(|&x| x == id).unwrap_or(usize::MAX);
    let p_pos = |p: PNorm| cfg.p_grid.iter().position(|&x| x == p).unwrap_or(usize::MAX);
    failures.sort_by_key(|f| (law_pos(f.law_id), p_pos(f.instance.p), f.instance.dim, f.instance.trial));

    Report {
        config: cfg.clone(),
        laws: summaries,
        failures,
        version: format!("pradius {}", env!("CARGO_PKG_VERSION")),
        seed_derivation: SEED_DERIVATION.to_string(),
        wall_clock_s: 0.0,
    }
}

/// Parameters of a sharpness search.
#[derive(Debug, Clone, PartialEq)]
pub struct SharpnessParams {
    pub law: LawId,
    pub p: PNorm,
    pub dim: usize,
    pub restarts: usize,
    pub steps: usize,
    pub master_seed: u64,
    pub optimizer: OptimizerConfig,
    /// Starting inputs for the first restart; random when absent.
    pub start: Option<Vec<ComplexMatrix>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharpnessResult {
    pub best: LawCheck,
    pub restart: usize,
    pub accepted_steps: usize,
    pub evaluations: usize,
}

const STEP_START: f64 = 0.5;
const STEP_END: f64 = 1e-3;

fn normalized(ms: Vec<ComplexMatrix>) -> Vec<ComplexMatrix> {
    let scale = ms.iter().map(ComplexMatrix::frobenius_norm).fold(0.0, f64::max);
    if scale > 0.0 {
        ms.iter().map(|m| m.scale_real(1.0 / scale)).collect()
    } else {
        ms
    }
}

/// Random-restart hill climb that looks for inputs of minimal slack.
///
/// Each step adds a Ginibre perturbation, with a step size decaying
/// geometrically from 0.5 to 1e-3, to every input matrix. It rescales the
/// tuple to unit maximal Frobenius norm and keeps the move if the slack
/// drops. Every law in the catalog is homogeneous, so the rescaling does
/// not change verdicts.
pub fn sharpness_search(params: &SharpnessParams) -> Result<SharpnessResult> {
    let law = laws::law(params.law);
    if law.is_equality() {
        return Err(Error::EqualityLaw(law.id.as_str()));
    }
    if !law.p_domain.contains(params.p) {
        return Err(Error::OutOfDomain {
            law: law.id.as_str(),
            p: params.p.to_string(),
        });
    }
    params.optimizer.validate()?;
    let grid = is_block_law(law).then_some(2);
    let n = law.input_dim(params.dim, 2);
    let with_grid = |ms: Vec<ComplexMatrix>| {
        let input = LawInput::new(ms);
        match grid {
            Some(g) => input.with_grid(g),
            None => input,
        }
    };

    let mut best: Option<(LawCheck, usize)> = None;
    let mut evaluations = 0;
    let mut accepted = 0;
    for restart in 0..params.restarts.max(1) {
        let seed = trial_seed(law.id, 0, params.dim, restart, params.master_seed);
        let start = match (&params.start, restart) {
            (Some(ms), 0) => ms.clone(),
            _ => (0..law.arity)
                .map(|k| random_matrix(MatrixKind::Ginibre, n, matrix_seed(seed, k)))
                .collect::<Result<_>>()?,
        };
        let mut current = normalized(start);
        let mut current_check = evaluate_law(law, &with_grid(current.clone()), params.p, &params.optimizer)?;
        evaluations += 1;

        for step in 0..params.steps {
            let frac = step as f64 / params.steps.max(1) as f64;
            let sigma = STEP_START * (STEP_END / STEP_START).powf(frac);
            let step_seed = splitmix64(seed ^ (step as u64 + 1).wrapping_mul(0xd1b5_4a32_d192_ed03));
            let proposal = current
                .iter()
                .enumerate()
                .map(|(k, m)| {
                    let g = random_matrix(MatrixKind::Ginibre, n, matrix_seed(step_seed, k))?;
                    m.try_add(&g.scale_real(sigma))
                })
                .collect::<Result<Vec<_>>>()?;
            let proposal = normalized(proposal);
            evaluations += 1;
            let check = match evaluate_law(law, &with_grid(proposal.clone()), params.p, &params.optimizer) {
                Ok(c) => c,
                Err(Error::Uncertified { .. }) => continue,
                Err(e) => return Err(e),
            };
            if check.slack < current_check.slack {
                current = proposal;
                current_check = check;
                accepted += 1;
            }
        }
        if best.as_ref().is_none_or(|(b, _)| current_check.slack < b.slack) {
            best = Some((current_check, restart));
        }
    }
    let (best, restart) = best.expect("at least one restart");
    Ok(SharpnessResult {
        best,
        restart,
        accepted_steps: accepted,
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(law: LawId, p: f64, dims: Vec<usize>, trials: usize) -> SuiteConfig {
        SuiteConfig {
            p_grid: vec![PNorm::new(p).unwrap()],
            dims,
            trials,
            laws: Some(vec![law]),
            ..SuiteConfig::default()
        }
    }

    #[test]
    fn seed_derivation_is_stable() {
        // frozen values: changing them silently breaks recorded reports
        assert_eq!(splitmix64(0), 0xe220_a839_7b1d_cdaf);
        let a = trial_seed(LawId::T32, 0, 2, 0, 0);
        assert_eq!(a, trial_seed(LawId::T32, 0, 2, 0, 0));
        assert_ne!(a, trial_seed(LawId::T32, 1, 2, 0, 0));
        assert_ne!(a, trial_seed(LawId::T36, 0, 2, 0, 0));
        assert_ne!(a, trial_seed(LawId::T32, 0, 2, 1, 0));
        assert_ne!(a, trial_seed(LawId::T32, 0, 2, 0, 1));
    }

    #[test]
    fn generator_mix_cycle() {
        let mix = GeneratorMix::default();
        let kinds: Vec<_> = (0..5).map(|t| mix.kind_for_trial(t)).collect();
        assert_eq!(
            kinds,
            [
                MatrixKind::Ginibre,
                MatrixKind::Ginibre,
                MatrixKind::Hermitian,
                MatrixKind::Unitary,
                MatrixKind::NilpotentUpper
            ]
        );
        assert_eq!(mix.kind_for_trial(5), MatrixKind::Ginibre);
    }

    #[test]
    fn config_validation() {
        assert!(SuiteConfig::default().validate().is_ok());
        assert!(SuiteConfig { trials: 0, ..SuiteConfig::default() }.validate().is_err());
        assert!(SuiteConfig { dims: vec![0], ..SuiteConfig::default() }.validate().is_err());
        let zero_mix = GeneratorMix {
            ginibre: 0,
            hermitian: 0,
            unitary: 0,
            nilpotent_upper: 0,
        };
        assert!(SuiteConfig {
            generator_mix: zero_mix,
            ..SuiteConfig::default()
        }
        .validate()
        .is_err());
        assert!(SuiteConfig::from_json_str(r#"{"trials": 3, "bogus": 1}"#).is_err());
        let cfg = SuiteConfig::from_json_str(r#"{"trials": 3, "p_grid": [1, 2.5, "inf"]}"#).unwrap();
        assert_eq!(cfg.trials, 3);
        assert_eq!(cfg.p_grid[2], PNorm::INFINITY);
        assert_eq!(cfg.dims, SuiteConfig::default().dims);
    }

    #[test]
    fn plan_respects_domains() {
        let cfg = SuiteConfig {
            trials: 1,
            dims: vec![2],
            ..SuiteConfig::default()
        };
        let plan = plan(&cfg);
        assert!(plan.iter().all(|t| t.law.p_domain.contains(t.p) && !t.exploratory));
        let t36 = plan.iter().filter(|t| t.law.id == LawId::T36).count();
        assert_eq!(t36, 4); // p in {2, 3, 4, 10}
    }

    #[test]
    fn t32_hermitian_equal_inputs_witness() {
        let cfg = small(LawId::T32, 2.0, vec![1], 1);
        let t = &plan(&cfg)[0];
        let a = random_matrix(MatrixKind::Hermitian, 1, 5).unwrap();
        let c = evaluate_law(t.law, &LawInput::new(vec![a.clone(), a]), t.p, &cfg.optimizer).unwrap();
        assert_eq!(c.verdict, Verdict::EqualityWitness);
    }

    #[test]
    fn small_suite_is_deterministic_and_round_trips() {
        let cfg = SuiteConfig {
            p_grid: vec![PNorm::ONE, PNorm::TWO, PNorm::INFINITY],
            dims: vec![1, 2],
            trials: 2,
            laws: Some(vec![LawId::Eq3, LawId::L14, LawId::T32, LawId::BkLower]),
            ..SuiteConfig::default()
        };
        let a = run_suite(&cfg).unwrap();
        let b = run_suite_with_threads(&cfg, 2).unwrap();
        let strip = |mut r: Report| {
            r.wall_clock_s = 0.0;
            r
        };
        let (a, b) = (strip(a), strip(b));
        assert_eq!(a, b);
        assert!(a.all_passed(), "{:?}", a.failures);
        assert_eq!(a.laws.len(), 4);
        assert_eq!(Report::from_json_str(&a.to_json_pretty()).unwrap(), a);
        let csv = a.to_csv();
        assert_eq!(csv.lines().count(), 1 + 3 * 2 * 3 + 2 * 2);
    }

    #[test]
    fn failures_carry_reproduction_data() {
        let cfg = small(LawId::T23Hi, 3.0, vec![1], 3);
        let report = run_suite(&cfg).unwrap();
        assert!(!report.failures.is_empty());
        let f = &report.failures[0];
        assert_eq!(f.outcome, Outcome::Fail);
        let trial = plan(&cfg).into_iter().find(|t| t.trial == f.instance.trial).unwrap();
        let again = trial.run(&cfg.optimizer).unwrap();
        assert_eq!(Some(&again), f.check.as_ref());
        assert!(f.reproduce.contains(&format!("--trial-seed {}", f.instance.trial_seed)));
    }

    #[test]
    fn exploratory_checks_never_fail() {
        let cfg = SuiteConfig {
            p_grid: vec![PNorm::finite(1.5).unwrap()],
            dims: vec![2],
            trials: 2,
            laws: Some(vec![LawId::R35]),
            explore_outside_domain: true,
            ..SuiteConfig::default()
        };
        let r = run_suite(&cfg).unwrap();
        assert!(r.failures.is_empty());
        assert_eq!(r.laws[0].exploratory, 2);
        assert_eq!(r.laws[0].tally.trials, 0);
        assert!(r.laws[0].cells[0].exploratory);
    }

    #[test]
    fn uncertified_is_distinct_from_fail() {
        let cfg = SuiteConfig {
            optimizer: OptimizerConfig {
                eps: 1e-14,
                max_evals: 10,
            },
            ..small(LawId::L14, 2.0, vec![3], 1)
        };
        let r = run_suite(&cfg).unwrap();
        assert_eq!(r.failures.len(), 1);
        assert_eq!(r.failures[0].outcome, Outcome::Uncertified);
        assert_eq!(r.laws[0].tally.uncertified, 1);
        assert_eq!(r.laws[0].tally.failures, 0);
    }

    #[test]
    fn sharpness_rejects_equalities() {
        let params = SharpnessParams {
            law: LawId::L14,
            p: PNorm::TWO,
            dim: 2,
            restarts: 1,
            steps: 1,
            master_seed: 0,
            optimizer: OptimizerConfig::default(),
            start: None,
        };
        assert_eq!(sharpness_search(&params), Err(Error::EqualityLaw("L14")));
    }

    #[test]
    fn sharpness_drives_t42_slack_down() {
        let params = SharpnessParams {
            law: LawId::T42,
            p: PNorm::TWO,
            dim: 2,
            restarts: 2,
            steps: 150,
            master_seed: 1,
            optimizer: OptimizerConfig::default(),
            start: None,
        };
        let r = sharpness_search(&params).unwrap();
        assert!(r.best.slack <= 1e-4, "slack {}", r.best.slack);
        assert!(r.best.slack >= -r.best.eps_budget);
        // the recorded witness re-evaluates to the same check
        let InputDescriptor::Explicit { matrices, .. } = &r.best.input else {
            panic!("sharpness witnesses carry explicit matrices");
        };
        let ms: Vec<_> = matrices.iter().map(|v| ComplexMatrix::from_json(v).unwrap()).collect();
        let again = evaluate_law(laws::law(LawId::T42), &LawInput::new(ms), PNorm::TWO, &params.optimizer).unwrap();
        assert_eq!(again, r.best);
    }
}
