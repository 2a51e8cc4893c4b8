//! Batch command-line surface: corpus loading, verification campaigns and
//! machine-readable reports.
//!
//! Exit codes: 0 pass, 1 fail (with a concrete counterexample in the
//! report), 2 usage or validation error, 3 cap exceeded.

pub mod corpus;
pub mod report;

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::definable::sweep::{dagger_check, eval_psi_semantic, SweepMode};
use crate::definable::{DefinableError, MonomialBasis, PsiParams};
use crate::definable::formulas::build_psi;
use crate::folang::print::print as print_formula;
use crate::matgroup::{GroupError, GroupTable, DEFAULT_CLOSURE_CAP};
use crate::tower::{check_reductions, lift_all_cyclic_targets, Tower, TowerError, DEFAULT_TOWER_CAP};

use corpus::{builtin_entries, find_entry, parse_corpus, CorpusEntry, CorpusError};
use report::{body, Counterexample, Report, ReportBody, ReportItem, Verdict};

/// Environment variable overriding the default worker count.
pub const WORKERS_ENV: &str = "HONDA_VERIFY_WORKERS";

#[derive(Parser, Debug)]
#[command(
    name = "honda-verify",
    version,
    about = "Exhaustive commutator-property verification on finite matrix groups"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Worker threads (default: HONDA_VERIFY_WORKERS, else all cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Write the report (or sentence text for `psi print`) to this file.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Optional TOML config file; command-line flags win on conflict.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check the Honda property: every cyclic generator of every commutator
    /// is itself a commutator.
    Honda(HondaArgs),
    /// Check the strong Honda property over generator pairs (witnesses
    /// restricted to the subgroup the pair generates).
    StrongHonda(StrongHondaArgs),
    /// Build, print and check the definable-subgroup commutator sentence.
    Psi(PsiArgs),
    /// Build a congruence tower, verify every level, and lift commutator
    /// witnesses to the top.
    Lift(LiftArgs),
    /// Inspect or validate a group corpus.
    Corpus(CorpusArgs),
}

#[derive(Args, Debug)]
pub struct HondaArgs {
    /// Corpus file (defaults to the built-in corpus).
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Check one named corpus entry.
    #[arg(long)]
    pub entry: Option<String>,
    /// Check every corpus entry.
    #[arg(long)]
    pub all: bool,
    /// Inline group: ring modulus (with --n and --gen).
    #[arg(long)]
    pub modulus: Option<u64>,
    /// Inline group: matrix dimension.
    #[arg(long)]
    pub n: Option<usize>,
    /// Inline group: one generator as row-major integers, e.g. "1 1 0 1".
    #[arg(long)]
    pub gen: Vec<String>,
    /// Closure cap (elements).
    #[arg(long)]
    pub cap: Option<u64>,
}

#[derive(Args, Debug)]
pub struct StrongHondaArgs {
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    #[arg(long)]
    pub entry: Option<String>,
    /// First generator index (omit to sweep all pairs).
    #[arg(long)]
    pub a: Option<u32>,
    /// Second generator index.
    #[arg(long)]
    pub b: Option<u32>,
    #[arg(long)]
    pub cap: Option<u64>,
}

#[derive(Args, Debug)]
pub struct PsiArgs {
    #[command(subcommand)]
    pub action: PsiAction,
}

#[derive(Subcommand, Debug)]
pub enum PsiAction {
    /// Emit the sentence text (byte-stable).
    Print(PsiParamsArgs),
    /// Model-check the sentence semantically over one ring.
    Eval(PsiParamsArgs),
    /// Run the direct subgroup-by-subgroup criterion check.
    Dagger(PsiParamsArgs),
    /// Run both checks and compare.
    Xcheck(PsiParamsArgs),
}

#[derive(Args, Debug, Clone)]
pub struct PsiParamsArgs {
    /// Ring modulus.
    #[arg(long)]
    pub modulus: Option<u64>,
    /// Matrix dimension.
    #[arg(long)]
    pub n: Option<usize>,
    /// Complexity bound (degree of the defining polynomials), at least n.
    #[arg(long)]
    pub r: Option<usize>,
    /// First exponent.
    #[arg(long)]
    pub s: Option<i64>,
    /// Second exponent.
    #[arg(long)]
    pub t: Option<i64>,
    /// Sweep mode.
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Seed for sampled mode.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Sample count for sampled mode.
    #[arg(long)]
    pub samples: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exhaustive,
    Sampled,
}

#[derive(Args, Debug)]
pub struct LiftArgs {
    /// Tower prime.
    #[arg(long)]
    pub p: Option<u64>,
    /// Number of levels.
    #[arg(long)]
    pub levels: Option<usize>,
    /// Matrix dimension (default 2).
    #[arg(long)]
    pub n: Option<usize>,
    /// Cap on the top-level group order.
    #[arg(long)]
    pub cap: Option<u64>,
    /// Write the full lift traces (JSON) to this file.
    #[arg(long)]
    pub traces: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CorpusArgs {
    #[command(subcommand)]
    pub action: CorpusAction,
}

#[derive(Subcommand, Debug)]
pub enum CorpusAction {
    /// List the corpus entries with their orders.
    List {
        #[arg(long)]
        corpus: Option<PathBuf>,
    },
    /// Parse and realize every entry, validating closure.
    Validate {
        #[arg(long)]
        corpus: Option<PathBuf>,
    },
}

/// Optional config-file values; flags win on conflict.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub modulus: Option<u64>,
    pub n: Option<usize>,
    pub r: Option<usize>,
    pub s: Option<i64>,
    pub t: Option<i64>,
    pub p: Option<u64>,
    pub levels: Option<usize>,
    pub mode: Option<String>,
    pub seed: Option<u64>,
    pub samples: Option<u64>,
    pub cap: Option<u64>,
    pub workers: Option<usize>,
    pub corpus: Option<String>,
    pub entry: Option<String>,
}

#[derive(Debug)]
pub enum CmdError {
    Usage(String),
    Cap(String),
}

impl CmdError {
    fn exit_code(&self) -> i32 {
        match self {
            CmdError::Usage(_) => 2,
            CmdError::Cap(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CmdError::Usage(m) | CmdError::Cap(m) => m,
        }
    }
}

impl From<CorpusError> for CmdError {
    fn from(e: CorpusError) -> Self {
        match e {
            CorpusError::BadGroup {
                source: GroupError::ClosureCapExceeded { cap },
                ..
            } => CmdError::Cap(format!("closure exceeded the cap of {cap} elements")),
            other => CmdError::Usage(other.to_string()),
        }
    }
}

impl From<DefinableError> for CmdError {
    fn from(e: DefinableError) -> Self {
        match e {
            DefinableError::ExhaustiveCapExceeded { .. } | DefinableError::PointSpaceTooLarge { .. } => {
                CmdError::Cap(e.to_string())
            }
            other => CmdError::Usage(other.to_string()),
        }
    }
}

impl From<TowerError> for CmdError {
    fn from(e: TowerError) -> Self {
        match e {
            TowerError::CapExceeded { .. } => CmdError::Cap(e.to_string()),
            TowerError::Group(GroupError::ClosureCapExceeded { cap }) => {
                CmdError::Cap(format!("closure exceeded the cap of {cap} elements"))
            }
            other => CmdError::Usage(other.to_string()),
        }
    }
}

/// Everything a finished invocation produced.
#[derive(Debug)]
pub struct CliOutcome {
    pub exit_code: i32,
    pub report: Option<Report>,
    /// Raw text output (sentence text for `psi print`, error messages).
    pub text: Option<String>,
}

fn load_file_config(path: &Option<PathBuf>) -> Result<FileConfig, CmdError> {
    match path {
        None => Ok(FileConfig::default()),
        Some(p) => {
            let raw = std::fs::read_to_string(p)
                .map_err(|e| CmdError::Usage(format!("cannot read config {}: {e}", p.display())))?;
            toml::from_str(&raw).map_err(|e| CmdError::Usage(format!("bad config file: {e}")))
        }
    }
}

fn load_entries(path: &Option<PathBuf>, file_cfg: &FileConfig) -> Result<Vec<CorpusEntry>, CmdError> {
    let effective = path
        .clone()
        .or_else(|| file_cfg.corpus.as_ref().map(PathBuf::from));
    match effective {
        None => Ok(builtin_entries()),
        Some(p) => {
            let raw = std::fs::read_to_string(&p)
                .map_err(|e| CmdError::Usage(format!("cannot read corpus {}: {e}", p.display())))?;
            Ok(parse_corpus(&raw)?)
        }
    }
}

fn corpus_label(path: &Option<PathBuf>, file_cfg: &FileConfig) -> String {
    path.clone()
        .or_else(|| file_cfg.corpus.as_ref().map(PathBuf::from))
        .map(|p| p.display().to_string())
        .unwrap_or_else(|| "builtin".to_owned())
}

fn cmd_honda(args: &HondaArgs, file_cfg: &FileConfig) -> Result<ReportBody, CmdError> {
    let mut b = body("honda");
    let cap = args.cap.or(file_cfg.cap).unwrap_or(DEFAULT_CLOSURE_CAP as u64) as usize;
    b.config.cap = Some(cap as u64);

    let groups: Vec<(String, GroupTable)> = if args.modulus.is_some() || !args.gen.is_empty() {
        let modulus = args
            .modulus
            .or(file_cfg.modulus)
            .ok_or_else(|| CmdError::Usage("inline groups need --modulus".into()))?;
        let n = args
            .n
            .or(file_cfg.n)
            .ok_or_else(|| CmdError::Usage("inline groups need --n".into()))?;
        let mut gens = Vec::new();
        for (i, g) in args.gen.iter().enumerate() {
            let values: Vec<i64> = g
                .split_whitespace()
                .map(|w| w.parse())
                .collect::<Result<_, _>>()
                .map_err(|_| CmdError::Usage(format!("generator {i} is not a list of integers")))?;
            gens.push(values);
        }
        let entry = CorpusEntry {
            name: "inline".to_owned(),
            line: 0,
            modulus,
            dim: n,
            generators: gens,
            elements: Vec::new(),
        };
        b.config.modulus = Some(modulus);
        b.config.n = Some(n);
        vec![("inline".to_owned(), entry.realize(cap)?)]
    } else {
        let entries = load_entries(&args.corpus, file_cfg)?;
        b.config.corpus = Some(corpus_label(&args.corpus, file_cfg));
        let selected: Vec<&CorpusEntry> = if args.all {
            entries.iter().collect()
        } else {
            let name = args
                .entry
                .clone()
                .or_else(|| file_cfg.entry.clone())
                .ok_or_else(|| CmdError::Usage("pass --entry NAME or --all".into()))?;
            b.config.entry = Some(name.clone());
            vec![find_entry(&entries, &name)?]
        };
        selected
            .into_iter()
            .map(|e| Ok((e.name.clone(), e.realize(cap)?)))
            .collect::<Result<_, CmdError>>()?
    };

    let mut elements = 0u64;
    let mut pairs = 0u64;
    let mut commutators = 0u64;
    for (name, table) in &groups {
        let report = table.check_honda();
        elements += report.group_order as u64;
        pairs += report.pairs_checked;
        commutators += report.commutator_count as u64;
        let verdict = if report.pass { Verdict::Pass } else { Verdict::Fail };
        if let Some((gamma, delta)) = &report.counterexample {
            b.counterexamples.push(Counterexample::HondaPair {
                group: name.clone(),
                gamma: gamma.entries().to_vec(),
                delta: delta.entries().to_vec(),
            });
            b.verdict = Verdict::Fail;
        }
        b.items.push(ReportItem {
            name: name.clone(),
            verdict,
            detail: Some(format!("order {}", table.order())),
        });
    }
    b.statistics.groups_checked = Some(groups.len() as u64);
    b.statistics.elements_scanned = Some(elements);
    b.statistics.pairs_checked = Some(pairs);
    b.statistics.commutators = Some(commutators);
    Ok(b)
}

fn cmd_strong_honda(args: &StrongHondaArgs, file_cfg: &FileConfig) -> Result<ReportBody, CmdError> {
    use rayon::prelude::*;

    let mut b = body("strong-honda");
    let cap = args.cap.or(file_cfg.cap).unwrap_or(DEFAULT_CLOSURE_CAP as u64) as usize;
    let entries = load_entries(&args.corpus, file_cfg)?;
    b.config.corpus = Some(corpus_label(&args.corpus, file_cfg));
    let name = args
        .entry
        .clone()
        .or_else(|| file_cfg.entry.clone())
        .ok_or_else(|| CmdError::Usage("pass --entry NAME".into()))?;
    b.config.entry = Some(name.clone());
    let table = find_entry(&entries, &name)?.realize(cap)?;
    let order = table.order() as u32;

    let pairs: Vec<(u32, u32)> = match (args.a, args.b) {
        (Some(a), Some(bb)) => {
            if a >= order || bb >= order {
                return Err(CmdError::Usage(format!(
                    "indices must be below the group order {order}"
                )));
            }
            vec![(a, bb)]
        }
        (None, None) => (0..order)
            .flat_map(|a| (0..order).map(move |b| (a, b)))
            .collect(),
        _ => return Err(CmdError::Usage("pass both --a and --b, or neither".into())),
    };

    let results: Vec<(u32, u32, bool, u64, Option<Vec<u64>>)> = pairs
        .par_iter()
        .map(|&(a, bb)| {
            let r = table
                .check_strong_honda(a, bb)
                .expect("indices are below the group order");
            (
                a,
                bb,
                r.pass,
                r.certs.len() as u64,
                r.failure.map(|m| m.entries().to_vec()),
            )
        })
        .collect();

    let mut witnesses = 0;
    for (a, bb, pass, certs, failure) in &results {
        witnesses += certs;
        if !pass {
            b.verdict = Verdict::Fail;
            b.counterexamples.push(Counterexample::StrongHondaPair {
                group: name.clone(),
                a: table.element(*a).entries().to_vec(),
                b: table.element(*bb).entries().to_vec(),
                delta: failure.clone().unwrap_or_default(),
            });
        }
    }
    b.statistics.groups_checked = Some(1);
    b.statistics.elements_scanned = Some(order as u64);
    b.statistics.pairs_checked = Some(results.len() as u64);
    b.statistics.witnesses_found = Some(witnesses);
    Ok(b)
}

fn psi_params(args: &PsiParamsArgs, file_cfg: &FileConfig) -> Result<(u64, PsiParams, SweepMode), CmdError> {
    let modulus = args
        .modulus
        .or(file_cfg.modulus)
        .ok_or_else(|| CmdError::Usage("pass --modulus".into()))?;
    let n = args.n.or(file_cfg.n).unwrap_or(2);
    let r = args.r.or(file_cfg.r).unwrap_or(n);
    let s = args.s.or(file_cfg.s).ok_or_else(|| CmdError::Usage("pass --s".into()))?;
    let t = args.t.or(file_cfg.t).ok_or_else(|| CmdError::Usage("pass --t".into()))?;
    let params = PsiParams::new(n, s, t, r).map_err(CmdError::from)?;
    let mode_arg = args.mode.or_else(|| match file_cfg.mode.as_deref() {
        Some("exhaustive") => Some(ModeArg::Exhaustive),
        Some("sampled") => Some(ModeArg::Sampled),
        _ => None,
    });
    let mode = match mode_arg.unwrap_or(ModeArg::Exhaustive) {
        ModeArg::Exhaustive => SweepMode::Exhaustive,
        ModeArg::Sampled => SweepMode::Sampled {
            seed: args.seed.or(file_cfg.seed).unwrap_or(0),
            count: args.samples.or(file_cfg.samples).unwrap_or(10_000),
        },
    };
    Ok((modulus, params, mode))
}

fn echo_psi(b: &mut ReportBody, modulus: u64, params: &PsiParams, mode: SweepMode) {
    b.config.modulus = Some(modulus);
    b.config.n = Some(params.n);
    b.config.r = Some(params.r);
    b.config.s = Some(params.s);
    b.config.t = Some(params.t);
    match mode {
        SweepMode::Exhaustive => b.config.mode = Some("exhaustive".into()),
        SweepMode::Sampled { seed, count } => {
            b.config.mode = Some("sampled".into());
            b.config.seed = Some(seed);
            b.config.samples = Some(count);
        }
    }
}

fn ring_of(modulus: u64) -> Result<crate::ring::ResidueRing, CmdError> {
    crate::ring::ResidueRing::new(modulus).map_err(|e| CmdError::Usage(e.to_string()))
}

fn cmd_psi(args: &PsiArgs, file_cfg: &FileConfig) -> Result<(Option<ReportBody>, Option<String>), CmdError> {
    match &args.action {
        PsiAction::Print(p) => {
            let n = p.n.or(file_cfg.n).unwrap_or(2);
            let r = p.r.or(file_cfg.r).unwrap_or(n);
            let s = p.s.or(file_cfg.s).ok_or_else(|| CmdError::Usage("pass --s".into()))?;
            let t = p.t.or(file_cfg.t).ok_or_else(|| CmdError::Usage("pass --t".into()))?;
            let params = PsiParams::new(n, s, t, r).map_err(CmdError::from)?;
            let basis = MonomialBasis::build_low_degree(params.n, params.r).map_err(CmdError::from)?;
            let sentence = build_psi(&params, &basis);
            Ok((None, Some(print_formula(&sentence))))
        }
        PsiAction::Eval(p) => {
            let (modulus, params, mode) = psi_params(p, file_cfg)?;
            let mut b = body("psi-eval");
            echo_psi(&mut b, modulus, &params, mode);
            let ring = ring_of(modulus)?;
            let r = eval_psi_semantic(ring, &params, mode).map_err(CmdError::from)?;
            b.verdict = if r.truth { Verdict::Pass } else { Verdict::Fail };
            b.statistics.alphas_visited = Some(r.alphas_visited);
            b.statistics.guard_true_alphas = Some(r.guard_true_alphas);
            b.statistics.distinct_member_sets = Some(r.distinct_member_sets);
            b.statistics.distinct_groups = Some(r.distinct_guarded_subgroups);
            b.statistics.triples_checked = Some(r.triples_checked);
            if let Some(ce) = r.counterexample {
                b.counterexamples.push(Counterexample::Alpha {
                    alpha: ce.alpha,
                    gamma: ce.gamma,
                    delta: ce.delta,
                });
            }
            Ok((Some(b), None))
        }
        PsiAction::Dagger(p) => {
            let (modulus, params, mode) = psi_params(p, file_cfg)?;
            let mut b = body("psi-dagger");
            echo_psi(&mut b, modulus, &params, mode);
            let ring = ring_of(modulus)?;
            let r = dagger_check(ring, &params, mode).map_err(CmdError::from)?;
            b.verdict = if r.pass { Verdict::Pass } else { Verdict::Fail };
            b.statistics.alphas_visited = Some(r.alphas_visited);
            b.statistics.guard_true_alphas = Some(r.guard_true_alphas);
            b.statistics.distinct_member_sets = Some(r.distinct_member_sets);
            b.statistics.distinct_groups = Some(r.distinct_groups);
            b.statistics.triples_checked = Some(r.triples_checked);
            b.statistics.witnesses_found = Some(r.witnesses_found);
            b.statistics.disagreements = Some(r.guard_group_mismatches);
            if let Some(ce) = r.counterexample {
                b.counterexamples.push(Counterexample::Alpha {
                    alpha: ce.alpha,
                    gamma: ce.gamma,
                    delta: ce.delta,
                });
            }
            Ok((Some(b), None))
        }
        PsiAction::Xcheck(p) => {
            let (modulus, params, mode) = psi_params(p, file_cfg)?;
            let mut b = body("psi-xcheck");
            echo_psi(&mut b, modulus, &params, mode);
            let ring = ring_of(modulus)?;
            let eval = eval_psi_semantic(ring, &params, mode).map_err(CmdError::from)?;
            let dagger = dagger_check(ring, &params, mode).map_err(CmdError::from)?;
            let agree = eval.truth == dagger.pass;
            b.statistics.alphas_visited = Some(eval.alphas_visited);
            b.statistics.guard_true_alphas = Some(eval.guard_true_alphas);
            b.statistics.distinct_groups = Some(dagger.distinct_groups);
            b.statistics.disagreements = Some(u64::from(!agree));
            b.verdict = if agree && eval.truth && dagger.pass {
                Verdict::Pass
            } else {
                Verdict::Fail
            };
            if !agree {
                b.counterexamples.push(Counterexample::Inconsistency {
                    detail: format!(
                        "sentence evaluation says {} but the subgroup criterion says {}",
                        eval.truth, dagger.pass
                    ),
                });
            }
            b.items.push(ReportItem {
                name: "eval".into(),
                verdict: if eval.truth { Verdict::Pass } else { Verdict::Fail },
                detail: None,
            });
            b.items.push(ReportItem {
                name: "dagger".into(),
                verdict: if dagger.pass { Verdict::Pass } else { Verdict::Fail },
                detail: None,
            });
            Ok((Some(b), None))
        }
    }
}

fn cmd_lift(args: &LiftArgs, file_cfg: &FileConfig) -> Result<ReportBody, CmdError> {
    let mut b = body("lift");
    let p = args.p.or(file_cfg.p).ok_or_else(|| CmdError::Usage("pass --p".into()))?;
    let levels = args
        .levels
        .or(file_cfg.levels)
        .ok_or_else(|| CmdError::Usage("pass --levels".into()))?;
    let n = args.n.or(file_cfg.n).unwrap_or(2);
    let cap = args.cap.or(file_cfg.cap).unwrap_or(DEFAULT_TOWER_CAP as u64) as usize;
    b.config.p = Some(p);
    b.config.levels = Some(levels);
    b.config.n = Some(n);
    b.config.cap = Some(cap as u64);

    let tower = Tower::build_with_cap(p, n, levels, cap).map_err(CmdError::from)?;

    for k in 1..=tower.depth() {
        let honda = tower.level_honda(k);
        b.items.push(ReportItem {
            name: format!("level-{k}-honda"),
            verdict: if honda.pass { Verdict::Pass } else { Verdict::Fail },
            detail: Some(format!("order {}", honda.group_order)),
        });
        if !honda.pass {
            b.verdict = Verdict::Fail;
        }
    }

    let reductions = check_reductions(&tower, 2048);
    if !(reductions.surjective && reductions.constant_fibers && reductions.homomorphism_ok) {
        b.verdict = Verdict::Fail;
        b.counterexamples.push(Counterexample::Inconsistency {
            detail: format!("reduction maps failed verification: {reductions:?}"),
        });
    }
    b.statistics.level_sizes = Some(reductions.level_sizes.iter().map(|&x| x as u64).collect());

    let batch = lift_all_cyclic_targets(&tower);
    for trace in &batch.traces {
        if !trace.verify() {
            b.verdict = Verdict::Fail;
            b.counterexamples.push(Counterexample::Inconsistency {
                detail: format!("trace for target {} fails re-verification", trace.delta_top),
            });
        }
    }
    for &delta in &batch.failures {
        b.verdict = Verdict::Fail;
        b.counterexamples.push(Counterexample::LiftFailure {
            delta_index: delta as u64,
            level: 1,
        });
    }
    b.statistics.lift_targets = Some(batch.targets as u64);
    b.statistics.lifts_succeeded = Some(batch.lifted as u64);
    b.statistics.backtracks = Some(batch.total_backtracks);

    if let Some(path) = &args.traces {
        let json = serde_json::to_string_pretty(&batch).expect("traces serialize");
        std::fs::write(path, json)
            .map_err(|e| CmdError::Usage(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(b)
}

fn cmd_corpus(args: &CorpusArgs, file_cfg: &FileConfig) -> Result<ReportBody, CmdError> {
    match &args.action {
        CorpusAction::List { corpus } => {
            let mut b = body("corpus-list");
            let entries = load_entries(corpus, file_cfg)?;
            b.config.corpus = Some(corpus_label(corpus, file_cfg));
            for e in &entries {
                let table = e.realize(DEFAULT_CLOSURE_CAP)?;
                b.items.push(ReportItem {
                    name: e.name.clone(),
                    verdict: Verdict::Pass,
                    detail: Some(format!(
                        "modulus {} dim {} order {}",
                        e.modulus,
                        e.dim,
                        table.order()
                    )),
                });
            }
            b.statistics.groups_checked = Some(entries.len() as u64);
            Ok(b)
        }
        CorpusAction::Validate { corpus } => {
            let mut b = body("corpus-validate");
            let entries = load_entries(corpus, file_cfg)?;
            b.config.corpus = Some(corpus_label(corpus, file_cfg));
            for e in &entries {
                e.realize(DEFAULT_CLOSURE_CAP)?;
                b.items.push(ReportItem {
                    name: e.name.clone(),
                    verdict: Verdict::Pass,
                    detail: None,
                });
            }
            b.statistics.groups_checked = Some(entries.len() as u64);
            Ok(b)
        }
    }
}

fn effective_workers(cli_workers: Option<usize>, file_cfg: &FileConfig) -> usize {
    cli_workers
        .or(file_cfg.workers)
        .or_else(|| {
            std::env::var(WORKERS_ENV)
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
        .max(1)
}

/// Parses and runs one invocation. Produces the report (when the command
/// makes one) without printing; the caller decides where output goes.
pub fn execute(cli: Cli) -> CliOutcome {
    let file_cfg = match load_file_config(&cli.config) {
        Ok(c) => c,
        Err(e) => {
            return CliOutcome {
                exit_code: e.exit_code(),
                report: None,
                text: Some(e.message().to_owned()),
            }
        }
    };
    let workers = effective_workers(cli.workers, &file_cfg);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("thread pool");

    let start = Instant::now();
    let result: Result<(Option<ReportBody>, Option<String>), CmdError> = pool.install(|| {
        match &cli.command {
            Command::Honda(a) => cmd_honda(a, &file_cfg).map(|b| (Some(b), None)),
            Command::StrongHonda(a) => cmd_strong_honda(a, &file_cfg).map(|b| (Some(b), None)),
            Command::Psi(a) => cmd_psi(a, &file_cfg),
            Command::Lift(a) => cmd_lift(a, &file_cfg).map(|b| (Some(b), None)),
            Command::Corpus(a) => cmd_corpus(a, &file_cfg).map(|b| (Some(b), None)),
        }
    });
    let wall = start.elapsed().as_millis() as u64;

    match result {
        Err(e) => CliOutcome {
            exit_code: e.exit_code(),
            report: None,
            text: Some(e.message().to_owned()),
        },
        Ok((None, text)) => {
            if let (Some(path), Some(t)) = (&cli.out, &text) {
                if let Err(e) = std::fs::write(path, t) {
                    return CliOutcome {
                        exit_code: 2,
                        report: None,
                        text: Some(format!("cannot write {}: {e}", path.display())),
                    };
                }
            }
            CliOutcome {
                exit_code: 0,
                report: None,
                text,
            }
        }
        Ok((Some(bodyv), _)) => {
            let report = Report::new(bodyv, wall, workers);
            let rendered = match cli.format {
                Format::Json => report.to_json(),
                Format::Csv => report.to_csv(),
            };
            let exit_code = if report.passed() { 0 } else { 1 };
            if let Some(path) = &cli.out {
                if let Err(e) = std::fs::write(path, &rendered) {
                    return CliOutcome {
                        exit_code: 2,
                        report: Some(report),
                        text: Some(format!("cannot write {}: {e}", path.display())),
                    };
                }
                CliOutcome {
                    exit_code,
                    report: Some(report),
                    text: None,
                }
            } else {
                CliOutcome {
                    exit_code,
                    report: Some(report),
                    text: Some(rendered),
                }
            }
        }
    }
}

/// Test and tooling entry: run with explicit argv (no program name).
pub fn execute_args<I, S>(args: I) -> CliOutcome
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let argv: Vec<String> = std::iter::once("honda-verify".to_owned())
        .chain(args.into_iter().map(Into::into))
        .collect();
    match Cli::try_parse_from(argv) {
        Ok(cli) => execute(cli),
        Err(e) => CliOutcome {
            exit_code: 2,
            report: None,
            text: Some(e.to_string()),
        },
    }
}

/// Binary entry point: parse from the process arguments, print the output,
/// return the exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse_from(std::env::args()) {
        Ok(cli) => cli,
        Err(e) => {
            // clap renders its own help/version output with exit code 0.
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let out_requested = cli.out.is_some();
    let outcome = execute(cli);
    if let Some(text) = &outcome.text {
        if outcome.exit_code == 2 || outcome.exit_code == 3 {
            eprintln!("error: {text}");
        } else if !out_requested {
            println!("{text}");
        }
    }
    outcome.exit_code
}
