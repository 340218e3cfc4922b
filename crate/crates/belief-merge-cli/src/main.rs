//! `bmerge` — belief merging and its inverse problems from the command line.
//!
//! Commands read a profile file of named propositional bases with an optional
//! target formula and metric. Output is key-sorted JSON (or DOT for `graph
//! --emit dot`) and is byte-identical across runs given the same inputs and
//! seed. Every obtainable verdict is re-checked by a forward merge before it
//! is printed. Exit codes: 0 when a verdict was computed (including
//! unobtainable), 1 for internal errors, 2 for usage or validation problems.

use std::collections::{BTreeMap, BTreeSet};
use std::env;
use std::fmt::Write as _;
use std::fs;
use std::io::Read as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use belief_merge::distance::{merge_equals, merge_weighted, Metric, WeightPair};
use belief_merge::logic::{dnf_string, is_satisfiable, models, parse};
use belief_merge::maxsets::{check_or, maxset_family, split_selected, synthesize, OrCheck};
use belief_merge::priority::{
    is_berge_acyclic, label_acyclic, merge_priority_masks, merge_with_family, orderings_for,
    relax_consistent, relax_entailed, verify_partition, PriorityPartition, BRUTEFORCE_BASE_CAP,
};
use belief_merge::segraph::{
    assign_values, build_se_graph, find_alternating_cycle, is_obtainable_graph, reduce,
    AlternatingCycle, EdgeMark, SeGraph, SingletonReport,
};
use belief_merge::weights::{
    invert_weights, local_search_weights, oracle_weights, verify_search_ratio, DistanceProfile,
    Ratio, SearchOutcome, SearchParams, WeightVerdict,
};
use belief_merge::{Formula, Interpretation, MergeError, VariableUniverse};

// ---------------------------------------------------------------------------
// Command line
// ---------------------------------------------------------------------------

#[derive(Parser)]
#[command(
    name = "bmerge",
    version,
    about = "Belief merging and its inverse problems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Forward merge of the profile's bases.
    Merge(MergeArgs),
    /// Find weights making the weighted merge of two bases equal the target.
    InvertWeights(InvertWeightsArgs),
    /// Find a priority ordering whose merge equals the target.
    InvertPriority(InvertPriorityArgs),
    /// List the maximal consistent subsets of the profile's bases.
    Maxsets(ProfileArg),
    /// Test whether the target is a union of maxset model classes.
    Check(ProfileArg),
    /// Synthesize bases whose maxset family matches a given set list.
    Synth(SynthArgs),
    /// Emit the selected/excluded graph of the profile and target.
    Graph(GraphArgs),
    /// Relaxed orderings when the exact target is out of reach.
    Relax(ProfileArg),
}

#[derive(Args)]
struct ProfileArg {
    /// Profile file: `base <name>: <formula>` lines with optional
    /// `target: <formula>` and `metric: drastic|hamming`.
    profile: PathBuf,
}

#[derive(Args)]
struct MergeArgs {
    #[command(flatten)]
    profile: ProfileArg,
    /// Merge operator to apply.
    #[arg(long, value_enum)]
    semantics: Semantics,
    /// Weights `w1,w2` for the weighted operator.
    #[arg(long)]
    weights: Option<String>,
    /// Priority classes, e.g. `1:A,C;2:B,D`, for the prioritized operator.
    #[arg(long)]
    partition: Option<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Semantics {
    Weighted,
    Priority,
}

#[derive(Args)]
struct InvertWeightsArgs {
    #[command(flatten)]
    profile: ProfileArg,
    /// Decision procedure to run.
    #[arg(long, value_enum, default_value_t = WeightMethod::Exact)]
    method: WeightMethod,
    /// RNG seed for the local search.
    #[arg(long, default_value_t = SearchParams::default().seed)]
    seed: u64,
    /// Iteration budget for the local search.
    #[arg(long, default_value_t = SearchParams::default().max_iters)]
    maxiter: u64,
    /// Restart interval for the local search.
    #[arg(long, default_value_t = SearchParams::default().restart_interval)]
    restart: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum WeightMethod {
    Exact,
    Oracle,
    LocalSearch,
}

#[derive(Args)]
struct InvertPriorityArgs {
    #[command(flatten)]
    profile: ProfileArg,
    /// Decision procedure to run.
    #[arg(long, value_enum, default_value_t = PriorityMethod::Auto)]
    method: PriorityMethod,
}

#[derive(Clone, Copy, ValueEnum)]
enum PriorityMethod {
    Auto,
    Bruteforce,
    Graph,
    Acyclic,
}

#[derive(Args)]
struct SynthArgs {
    /// JSON file holding an array of arrays of base names (`-` for stdin).
    input: PathBuf,
}

#[derive(Args)]
struct GraphArgs {
    #[command(flatten)]
    profile: ProfileArg,
    /// Output format.
    #[arg(long, value_enum, default_value_t = EmitKind::Dot)]
    emit: EmitKind,
}

#[derive(Clone, Copy, ValueEnum)]
enum EmitKind {
    Dot,
    Json,
}

// ---------------------------------------------------------------------------
// Failure and exit codes
// ---------------------------------------------------------------------------

enum Failure {
    /// Bad invocation or invalid input — exit code 2.
    Usage(String),
    /// A broken invariant inside the tool — exit code 1.
    Internal(String),
}

type CliResult<T> = Result<T, Failure>;

fn lift(e: MergeError) -> Failure {
    match e {
        MergeError::Internal(_) => Failure::Internal(e.to_string()),
        _ => Failure::Usage(e.to_string()),
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Merge(a) => cmd_merge(a),
        Command::InvertWeights(a) => cmd_invert_weights(a),
        Command::InvertPriority(a) => cmd_invert_priority(a),
        Command::Maxsets(a) => cmd_maxsets(a),
        Command::Check(a) => cmd_check(a),
        Command::Synth(a) => cmd_synth(a),
        Command::Graph(a) => cmd_graph(a),
        Command::Relax(a) => cmd_relax(a),
    }
}

// ---------------------------------------------------------------------------
// Profiles
// ---------------------------------------------------------------------------

struct Profile {
    names: Vec<String>,
    bases: Vec<Formula>,
    target: Option<Formula>,
    metric: Metric,
    universe: VariableUniverse,
}

impl Profile {
    fn load(path: &Path) -> CliResult<Profile> {
        let text = fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
        Profile::parse_text(&text)
    }

    fn parse_text(text: &str) -> CliResult<Profile> {
        let mut names: Vec<String> = Vec::new();
        let mut bases: Vec<Formula> = Vec::new();
        let mut target: Option<Formula> = None;
        let mut metric: Option<Metric> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(p) => &raw[..p],
                None => raw,
            };
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let lineno = idx + 1;
            if let Some(rest) = line.strip_prefix("base ") {
                let Some((name, formula)) = rest.split_once(':') else {
                    return Err(usage(format!(
                        "line {lineno}: expected `base <name>: <formula>`"
                    )));
                };
                let name = name.trim();
                if name.is_empty()
                    || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
                {
                    return Err(usage(format!(
                        "line {lineno}: base name `{name}` may use letters, digits and underscores only"
                    )));
                }
                if names.iter().any(|n| n == name) {
                    return Err(usage(format!(
                        "line {lineno}: duplicate base name `{name}`"
                    )));
                }
                let f =
                    parse(formula).map_err(|e| usage(format!("line {lineno}: {e}")))?;
                names.push(name.to_string());
                bases.push(f);
            } else if let Some(rest) = line.strip_prefix("target:") {
                if target.is_some() {
                    return Err(usage(format!("line {lineno}: duplicate target line")));
                }
                target =
                    Some(parse(rest).map_err(|e| usage(format!("line {lineno}: {e}")))?);
            } else if let Some(rest) = line.strip_prefix("metric:") {
                if metric.is_some() {
                    return Err(usage(format!("line {lineno}: duplicate metric line")));
                }
                metric = Some(match rest.trim() {
                    "drastic" => Metric::Drastic,
                    "hamming" => Metric::Hamming,
                    other => {
                        return Err(usage(format!(
                            "line {lineno}: unknown metric `{other}` (use drastic or hamming)"
                        )))
                    }
                });
            } else {
                return Err(usage(format!(
                    "line {lineno}: unrecognized directive `{line}`"
                )));
            }
        }
        if bases.is_empty() {
            return Err(usage("profile declares no bases"));
        }
        let mut formulas: Vec<&Formula> = bases.iter().collect();
        if let Some(t) = &target {
            formulas.push(t);
        }
        let mut universe = VariableUniverse::from_formulas(formulas);
        if let Ok(cap) = env::var("BMERGE_ENUM_CAP") {
            let parsed: usize = cap.trim().parse().map_err(|_| {
                usage(format!("BMERGE_ENUM_CAP must be a positive integer, got `{cap}`"))
            })?;
            if parsed == 0 {
                return Err(usage("BMERGE_ENUM_CAP must be positive"));
            }
            universe = universe.with_cap(parsed);
        }
        universe.check_enumerable().map_err(lift)?;
        for (name, f) in names.iter().zip(&bases) {
            if models(f, &universe).map_err(lift)?.is_empty() {
                return Err(usage(format!("base {name} is unsatisfiable")));
            }
        }
        Ok(Profile {
            names,
            bases,
            target,
            metric: metric.unwrap_or(Metric::Hamming),
            universe,
        })
    }

    fn require_target(&self) -> CliResult<&Formula> {
        self.target
            .as_ref()
            .ok_or_else(|| usage("this command needs a `target:` line in the profile"))
    }

    fn index_of(&self, name: &str) -> CliResult<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| usage(format!("unknown base name `{name}`")))
    }

    /// Renders a partition with base names, e.g. `1:A,C;2:B,D`.
    fn partition_string(&self, p: &PriorityPartition) -> String {
        p.classes()
            .iter()
            .enumerate()
            .map(|(k, class)| {
                let members: Vec<&str> =
                    class.iter().map(|&i| self.names[i].as_str()).collect();
                format!("{}:{}", k + 1, members.join(","))
            })
            .collect::<Vec<_>>()
            .join(";")
    }

    /// Parses `1:A,C;2:B,D` against the profile's base names.
    fn parse_partition(&self, spec: &str) -> CliResult<PriorityPartition> {
        let mut numbered: Vec<(usize, BTreeSet<usize>)> = Vec::new();
        for part in spec.split(';') {
            let Some((k, list)) = part.split_once(':') else {
                return Err(usage(format!(
                    "partition class `{part}` must look like `1:A,B`"
                )));
            };
            let k: usize = k
                .trim()
                .parse()
                .map_err(|_| usage(format!("bad class number `{}`", k.trim())))?;
            let mut class = BTreeSet::new();
            for name in list.split(',') {
                class.insert(self.index_of(name.trim())?);
            }
            numbered.push((k, class));
        }
        numbered.sort_by_key(|&(k, _)| k);
        if numbered.iter().enumerate().any(|(pos, &(k, _))| k != pos + 1) {
            return Err(usage(
                "partition classes must be numbered 1..k without gaps or repeats",
            ));
        }
        let classes: Vec<BTreeSet<usize>> = numbered.into_iter().map(|(_, c)| c).collect();
        PriorityPartition::new(classes, self.bases.len()).map_err(lift)
    }

    fn mask_set(&self, f: &Formula) -> CliResult<BTreeSet<u64>> {
        Ok(models(f, &self.universe)
            .map_err(lift)?
            .iter()
            .map(|i| i.mask())
            .collect())
    }
}

// ---------------------------------------------------------------------------
// JSON helpers
// ---------------------------------------------------------------------------

fn interp_json(i: &Interpretation) -> Value {
    let mut map = serde_json::Map::new();
    for (name, &v) in i.universe().names().iter().zip(i.values()) {
        map.insert(name.clone(), json!(u8::from(v)));
    }
    Value::Object(map)
}

fn models_json(ms: &[Interpretation]) -> Value {
    Value::Array(ms.iter().map(interp_json).collect())
}

/// Prints to stdout, exiting quietly if the reader closed the pipe.
fn emit(text: &str) {
    use std::io::Write as _;
    let mut out = std::io::stdout().lock();
    if out.write_all(text.as_bytes()).is_err() || out.flush().is_err() {
        std::process::exit(0);
    }
}

fn print_json(v: &Value) {
    let mut text = serde_json::to_string_pretty(v).expect("serializable value");
    text.push('\n');
    emit(&text);
}

fn mark_str(mark: EdgeMark) -> &'static str {
    match mark {
        EdgeMark::Selected => "selected",
        EdgeMark::Excluded => "excluded",
    }
}

// ---------------------------------------------------------------------------
// merge
// ---------------------------------------------------------------------------

fn cmd_merge(a: MergeArgs) -> CliResult<()> {
    let p = Profile::load(&a.profile.profile)?;
    if a.semantics != Semantics::Weighted && a.weights.is_some() {
        return Err(usage("--weights applies to weighted semantics only"));
    }
    if a.semantics != Semantics::Priority && a.partition.is_some() {
        return Err(usage("--partition applies to priority semantics only"));
    }
    let out = match a.semantics {
        Semantics::Weighted => {
            if p.bases.len() != 2 {
                return Err(usage(format!(
                    "weighted merging needs exactly two bases, the profile has {}",
                    p.bases.len()
                )));
            }
            let spec = a
                .weights
                .ok_or_else(|| usage("--weights w1,w2 is required for weighted semantics"))?;
            let w = parse_weights(&spec)?;
            let ms = merge_weighted(&p.bases[0], &p.bases[1], w, p.metric, &p.universe)
                .map_err(lift)?;
            json!({ "dnf": dnf_string(&ms), "models": models_json(&ms) })
        }
        Semantics::Priority => {
            let spec = a
                .partition
                .ok_or_else(|| usage("--partition is required for priority semantics"))?;
            let partition = p.parse_partition(&spec)?;
            let (ms, family, minimal) =
                merge_with_family(&p.bases, &partition, &p.universe).map_err(lift)?;
            let maxsets: Vec<Value> = family
                .sets()
                .iter()
                .map(|s| json!(s.iter().map(|&i| p.names[i].clone()).collect::<Vec<_>>()))
                .collect();
            json!({
                "dnf": dnf_string(&ms),
                "maxsets": maxsets,
                "minimal": minimal,
                "models": models_json(&ms),
            })
        }
    };
    print_json(&out);
    Ok(())
}

fn parse_weights(spec: &str) -> CliResult<WeightPair> {
    let Some((a, b)) = spec.split_once(',') else {
        return Err(usage(format!("--weights expects `w1,w2`, got `{spec}`")));
    };
    let w1: u64 = a
        .trim()
        .parse()
        .map_err(|_| usage(format!("bad weight `{}`", a.trim())))?;
    let w2: u64 = b
        .trim()
        .parse()
        .map_err(|_| usage(format!("bad weight `{}`", b.trim())))?;
    WeightPair::new(w1, w2).map_err(lift)
}

// ---------------------------------------------------------------------------
// invert-weights
// ---------------------------------------------------------------------------

fn cmd_invert_weights(a: InvertWeightsArgs) -> CliResult<()> {
    let p = Profile::load(&a.profile.profile)?;
    if p.bases.len() != 2 {
        return Err(usage(format!(
            "weight inversion needs exactly two bases, the profile has {}",
            p.bases.len()
        )));
    }
    let r = p.require_target()?.clone();
    let (k1, k2) = (&p.bases[0], &p.bases[1]);
    let out = match a.method {
        WeightMethod::Exact => {
            let prof = DistanceProfile::from_formulas(k1, k2, &r, p.metric, &p.universe)
                .map_err(lift)?;
            match invert_weights(&prof).map_err(lift)? {
                WeightVerdict::Obtainable(w) => weights_obtainable_json(&p, w, &r)?,
                WeightVerdict::Unobtainable(v) => json!({
                    "verdict": "unobtainable",
                    "violated_condition": v.condition,
                    "witnesses": v
                        .witnesses
                        .iter()
                        .map(|d| json!([d.d1, d.d2]))
                        .collect::<Vec<_>>(),
                }),
            }
        }
        WeightMethod::Oracle => {
            let prof = DistanceProfile::from_formulas(k1, k2, &r, p.metric, &p.universe)
                .map_err(lift)?;
            match oracle_weights(&prof) {
                Some(w) => weights_obtainable_json(&p, w, &r)?,
                None => json!({ "verdict": "unobtainable" }),
            }
        }
        WeightMethod::LocalSearch => {
            let params = SearchParams {
                seed: a.seed,
                max_iters: a.maxiter,
                restart_interval: a.restart,
                walk_probability: SearchParams::default().walk_probability,
            };
            match local_search_weights(&r, k1, k2, p.metric, &p.universe, params)
                .map_err(lift)?
            {
                // Two result models with a defined p-ratio pin the only
                // candidate ratio, so a failed verification refutes them all.
                SearchOutcome::Ratio(ratio) => {
                    match verify_search_ratio(ratio, &r, k1, k2, p.metric, &p.universe)
                        .map_err(lift)?
                    {
                        Some(w) => weights_obtainable_json(&p, w, &r)?,
                        None => json!({ "verdict": "unobtainable" }),
                    }
                }
                SearchOutcome::Unobtainable => json!({ "verdict": "unobtainable" }),
                SearchOutcome::Unknown { midpoint, .. } => {
                    let verified = if *midpoint.numer() > 0 {
                        verify_search_ratio(midpoint, &r, k1, k2, p.metric, &p.universe)
                            .map_err(lift)?
                    } else {
                        None
                    };
                    match verified {
                        Some(w) => weights_obtainable_json(&p, w, &r)?,
                        None => json!({ "verdict": "unknown" }),
                    }
                }
            }
        }
    };
    print_json(&out);
    Ok(())
}

fn weights_obtainable_json(p: &Profile, w: WeightPair, r: &Formula) -> CliResult<Value> {
    if !merge_equals(&p.bases[0], &p.bases[1], w, p.metric, &p.universe, r).map_err(lift)? {
        return Err(Failure::Internal(
            "weights failed forward-merge re-verification".to_string(),
        ));
    }
    let ratio = Ratio::new(w.w1() as i64, w.w2() as i64);
    Ok(json!({
        "verdict": "obtainable",
        "w1": w.w1(),
        "w2": w.w2(),
        "ratio": format!("{}/{}", ratio.numer(), ratio.denom()),
    }))
}

// ---------------------------------------------------------------------------
// invert-priority
// ---------------------------------------------------------------------------

fn cmd_invert_priority(a: InvertPriorityArgs) -> CliResult<()> {
    let p = Profile::load(&a.profile.profile)?;
    let r = p.require_target()?.clone();
    // Merges of satisfiable bases are satisfiable, so an unsatisfiable
    // target is out of reach for every method.
    if !is_satisfiable(&r).map_err(lift)? {
        print_json(&json!({ "verdict": "unobtainable" }));
        return Ok(());
    }
    let out = match a.method {
        PriorityMethod::Acyclic => acyclic_verdict(&p, &r)?,
        PriorityMethod::Graph => graph_verdict(&p, &r)?.ok_or_else(|| {
            usage("the graph method needs every maxset to have at most two bases")
        })?,
        PriorityMethod::Bruteforce => bruteforce_verdict(&p, &r)?,
        PriorityMethod::Auto => {
            let labeled = acyclic_verdict(&p, &r)?;
            if labeled["verdict"] != "unknown" {
                labeled
            } else if let Some(v) = graph_verdict(&p, &r)? {
                v
            } else if p.bases.len() <= BRUTEFORCE_BASE_CAP {
                bruteforce_verdict(&p, &r)?
            } else {
                return Err(usage(
                    "no inversion method applies: the maxsets are not binary and the profile is too large for brute force",
                ));
            }
        }
    };
    print_json(&out);
    Ok(())
}

/// Labeling pass. A produced partition is verified, hence sound for any
/// family; a failure is a proof only over Berge-acyclic families.
fn acyclic_verdict(p: &Profile, r: &Formula) -> CliResult<Value> {
    let family = maxset_family(&p.bases, &p.universe).map_err(lift)?;
    let acyclic = is_berge_acyclic(&family);
    match label_acyclic(r, &p.bases, &p.universe).map_err(lift)? {
        Some(partition) => partition_obtainable_json(p, r, &partition),
        None if acyclic => Ok(json!({ "verdict": "unobtainable" })),
        None => Ok(json!({ "verdict": "unknown" })),
    }
}

/// Graph pass; `None` means the family has a maxset of three or more bases
/// and the method does not apply.
fn graph_verdict(p: &Profile, r: &Formula) -> CliResult<Option<Value>> {
    let family = maxset_family(&p.bases, &p.universe).map_err(lift)?;
    if family.sets().iter().any(|s| s.len() > 2) {
        return Ok(None);
    }
    match check_or(r, &p.bases, &p.universe).map_err(lift)? {
        OrCheck::NotOrOfMaxsets { counterexample } => Ok(Some(json!({
            "verdict": "unobtainable",
            "counterexample": interp_json(&counterexample),
        }))),
        OrCheck::OrOfMaxsets { selected } => {
            let chosen: BTreeSet<usize> = selected.iter().copied().collect();
            let excluded: Vec<usize> =
                (0..family.len()).filter(|i| !chosen.contains(i)).collect();
            let (graph, report) =
                build_se_graph(&family, &selected, &excluded).map_err(lift)?;
            let red = reduce(&graph).map_err(lift)?;
            if red.obtainable() {
                let Some(vals) = assign_values(&graph).map_err(lift)? else {
                    return Err(Failure::Internal(
                        "graph reduction succeeded but no assignment was found".to_string(),
                    ));
                };
                let partition = assemble_partition(p.bases.len(), &vals, &report)
                    .map_err(|e| Failure::Internal(format!("partition assembly: {e}")))?;
                Ok(Some(partition_obtainable_json(p, r, &partition)?))
            } else {
                let Some(cycle) = find_alternating_cycle(&graph).map_err(lift)? else {
                    return Err(Failure::Internal(
                        "graph reduction failed but no alternating cycle exists".to_string(),
                    ));
                };
                Ok(Some(json!({
                    "verdict": "unobtainable",
                    "certificate": cycle_json(p, &graph, &cycle),
                })))
            }
        }
    }
}

fn bruteforce_verdict(p: &Profile, r: &Formula) -> CliResult<Value> {
    if p.bases.len() > BRUTEFORCE_BASE_CAP {
        return Err(usage(format!(
            "brute force handles at most {BRUTEFORCE_BASE_CAP} bases, the profile has {}",
            p.bases.len()
        )));
    }
    let all = orderings_for(r, &p.bases, &p.universe, BRUTEFORCE_BASE_CAP).map_err(lift)?;
    match all.first() {
        Some(partition) => {
            let mut v = partition_obtainable_json(p, r, partition)?;
            v["all_orderings_count"] = json!(all.len());
            Ok(v)
        }
        None => Ok(json!({ "verdict": "unobtainable", "all_orderings_count": 0 })),
    }
}

fn partition_obtainable_json(
    p: &Profile,
    r: &Formula,
    partition: &PriorityPartition,
) -> CliResult<Value> {
    if !verify_partition(r, &p.bases, partition, &p.universe).map_err(lift)? {
        return Err(Failure::Internal(
            "partition failed forward-merge re-verification".to_string(),
        ));
    }
    Ok(json!({
        "verdict": "obtainable",
        "partition": p.partition_string(partition),
    }))
}

/// Turns a value assignment on the graph plus the singleton report into a
/// priority partition: value classes in ascending order, selected singletons
/// in class 1, excluded singletons in a final class of their own.
fn assemble_partition(
    num_bases: usize,
    vals: &BTreeMap<u32, u32>,
    report: &SingletonReport,
) -> Result<PriorityPartition, MergeError> {
    let used: Vec<u32> = vals
        .values()
        .copied()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let has_one = used.first().copied() == Some(1);
    let offset = usize::from(!has_one);
    let mut classes: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); used.len() + offset];
    for (&node, &v) in vals {
        let rank = used.binary_search(&v).expect("assigned value") + offset;
        classes[rank].insert(node as usize);
    }
    for &b in &report.selected {
        classes[0].insert(b);
    }
    if !report.excluded.is_empty() {
        classes.push(report.excluded.iter().copied().collect());
    }
    classes.retain(|c| !c.is_empty());
    PriorityPartition::new(classes, num_bases)
}

fn cycle_json(p: &Profile, g: &SeGraph, c: &AlternatingCycle) -> Value {
    let nodes: Vec<Value> = c
        .nodes
        .iter()
        .map(|&v| json!(p.names[v as usize].clone()))
        .collect();
    let edges: Vec<Value> = c
        .edge_ids
        .iter()
        .enumerate()
        .map(|(i, &id)| {
            let e = &g.edges()[id];
            json!([
                p.names[c.nodes[i] as usize],
                p.names[c.nodes[i + 1] as usize],
                mark_str(e.mark),
            ])
        })
        .collect();
    json!({ "edges": edges, "length": c.edge_ids.len(), "nodes": nodes })
}

// ---------------------------------------------------------------------------
// maxsets / check / synth
// ---------------------------------------------------------------------------

fn cmd_maxsets(a: ProfileArg) -> CliResult<()> {
    let p = Profile::load(&a.profile)?;
    let family = maxset_family(&p.bases, &p.universe).map_err(lift)?;
    let sets: Vec<Value> = family
        .sets()
        .iter()
        .zip(family.witnesses())
        .map(|(s, w)| {
            json!({
                "bases": s.iter().map(|&i| p.names[i].clone()).collect::<Vec<_>>(),
                "witness": interp_json(w),
            })
        })
        .collect();
    print_json(&json!({ "maxsets": sets }));
    Ok(())
}

fn cmd_check(a: ProfileArg) -> CliResult<()> {
    let p = Profile::load(&a.profile)?;
    let r = p.require_target()?;
    let family = maxset_family(&p.bases, &p.universe).map_err(lift)?;
    let out = match check_or(r, &p.bases, &p.universe).map_err(lift)? {
        OrCheck::OrOfMaxsets { selected } => {
            let chosen: Vec<Value> = selected
                .iter()
                .map(|&i| {
                    json!(family.sets()[i]
                        .iter()
                        .map(|&b| p.names[b].clone())
                        .collect::<Vec<_>>())
                })
                .collect();
            json!({ "or_of_maxsets": true, "selected": chosen })
        }
        OrCheck::NotOrOfMaxsets { counterexample } => json!({
            "or_of_maxsets": false,
            "counterexample": interp_json(&counterexample),
        }),
    };
    print_json(&out);
    Ok(())
}

fn cmd_synth(a: SynthArgs) -> CliResult<()> {
    let text = if a.input.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| usage(format!("cannot read stdin: {e}")))?;
        s
    } else {
        fs::read_to_string(&a.input)
            .map_err(|e| usage(format!("cannot read {}: {e}", a.input.display())))?
    };
    let sets: Vec<Vec<String>> = serde_json::from_str(&text).map_err(|e| {
        usage(format!("input must be a JSON array of arrays of base names: {e}"))
    })?;
    let bases = synthesize(&sets).map_err(lift)?;
    let mut obj = serde_json::Map::new();
    for (name, f) in &bases {
        obj.insert(name.clone(), json!(f.to_string()));
    }
    print_json(&json!({ "bases": Value::Object(obj) }));
    Ok(())
}

// ---------------------------------------------------------------------------
// graph
// ---------------------------------------------------------------------------

fn cmd_graph(a: GraphArgs) -> CliResult<()> {
    let p = Profile::load(&a.profile.profile)?;
    let r = p.require_target()?;
    let family = maxset_family(&p.bases, &p.universe).map_err(lift)?;
    let (selected, excluded) = split_selected(&family, r, &p.universe).map_err(lift)?;
    let (graph, report) = build_se_graph(&family, &selected, &excluded).map_err(lift)?;
    let obtainable = is_obtainable_graph(&graph).map_err(lift)?;
    let assignment = if obtainable {
        assign_values(&graph).map_err(lift)?
    } else {
        None
    };
    match a.emit {
        EmitKind::Dot => {
            emit(&render_dot(&p, &graph, &report, assignment.as_ref()));
        }
        EmitKind::Json => {
            let mut nodes = serde_json::Map::new();
            for &v in graph.nodes() {
                let value = assignment
                    .as_ref()
                    .and_then(|m| m.get(&v))
                    .map_or(Value::Null, |&x| json!(x));
                nodes.insert(p.names[v as usize].clone(), value);
            }
            let edges: Vec<Value> = graph
                .edges()
                .iter()
                .map(|e| {
                    json!([
                        p.names[e.a as usize],
                        p.names[e.b as usize],
                        mark_str(e.mark),
                    ])
                })
                .collect();
            print_json(&json!({
                "edges": edges,
                "nodes": Value::Object(nodes),
                "obtainable": obtainable,
                "singletons": {
                    "excluded": report.excluded.iter().map(|&b| p.names[b].clone()).collect::<Vec<_>>(),
                    "selected": report.selected.iter().map(|&b| p.names[b].clone()).collect::<Vec<_>>(),
                },
            }));
        }
    }
    Ok(())
}

fn render_dot(
    p: &Profile,
    g: &SeGraph,
    report: &SingletonReport,
    vals: Option<&BTreeMap<u32, u32>>,
) -> String {
    let mut out = String::from("graph bmerge {\n");
    for &v in g.nodes() {
        let name = &p.names[v as usize];
        let label = match vals.and_then(|m| m.get(&v)) {
            Some(val) => format!("{name}={val}"),
            None => name.clone(),
        };
        let _ = writeln!(out, "  \"{name}\" [label=\"{label}\"];");
    }
    for &b in report.selected.iter().chain(report.excluded.iter()) {
        let name = &p.names[b];
        let _ = writeln!(out, "  \"{name}\" [label=\"{name}\"];");
    }
    for e in g.edges() {
        let an = &p.names[e.a as usize];
        let bn = &p.names[e.b as usize];
        let _ = match e.mark {
            EdgeMark::Selected => writeln!(out, "  \"{an}\" -- \"{bn}\";"),
            EdgeMark::Excluded => {
                writeln!(out, "  \"{an}\" -- \"{bn}\" [label=\"X\", style=dashed];")
            }
        };
    }
    out.push_str("}\n");
    out
}

// ---------------------------------------------------------------------------
// relax
// ---------------------------------------------------------------------------

fn cmd_relax(a: ProfileArg) -> CliResult<()> {
    let p = Profile::load(&a.profile)?;
    let r = p.require_target()?;
    let family = maxset_family(&p.bases, &p.universe).map_err(lift)?;
    let r_masks = p.mask_set(r)?;
    let consistent = relax_consistent(r, &p.bases, &p.universe).map_err(lift)?;
    let entailed = relax_entailed(r, &p.bases, &p.universe).map_err(lift)?;
    let consistent_json = match &consistent {
        Some(partition) => {
            let merged: BTreeSet<u64> =
                merge_priority_masks(&family, partition).into_iter().collect();
            if merged.is_disjoint(&r_masks) {
                return Err(Failure::Internal(
                    "consistent fallback does not intersect the target".to_string(),
                ));
            }
            json!({ "partition": p.partition_string(partition) })
        }
        None => Value::Null,
    };
    let entailed_json = match &entailed {
        Some(partition) => {
            let merged: BTreeSet<u64> =
                merge_priority_masks(&family, partition).into_iter().collect();
            if !r_masks.is_subset(&merged) {
                return Err(Failure::Internal(
                    "entailed fallback is not implied by the target".to_string(),
                ));
            }
            json!({ "partition": p.partition_string(partition) })
        }
        None => Value::Null,
    };
    let warning = if consistent.is_none() && entailed.is_none() {
        json!("sources unreliable")
    } else {
        Value::Null
    };
    print_json(&json!({
        "consistent": consistent_json,
        "entailed": entailed_json,
        "warning": warning,
    }));
    Ok(())
}
