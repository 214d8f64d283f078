//! Command-line front end: parsing, frame tooling, forcing, validity sweeps,
//! blended model construction, IZF checks, and the de Jongh pipeline.
//!
//! Exit codes: 0 when a verdict was produced (including countermodels and
//! margin-too-small reports), 1 when a check ran and failed, 2 on usage or
//! resource errors.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use kripke_blend::acceptance;
use kripke_blend::blended::{izf_check, BlendedModel, IzfAxiom, IzfVerdict};
use kripke_blend::config::RunConfig;
use kripke_blend::dejongh::{
    chi, counting_check, derive_distinguishers, dejongh_countermodel, excluded_middle_demo,
    faithful_substitution, psi, Logic, PipelineOutcome,
};
use kripke_blend::formulas::{parse_prop, parse_set, SetFormula};
use kripke_blend::frames::{enumerate_class, Frame, FrameClass, FrameJson};
use kripke_blend::propositional::{
    axiom, force_prop, logic_member, valid_in_frame, AxiomScheme, Valuation,
};
use kripke_blend::report;
use kripke_blend::universes::Universe;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Parser)]
#[command(
    name = "kripke-blend",
    version,
    about = "Kripke semantics for intermediate logics and blended models of set theory"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,
    /// Element budget for blended constructions (env: KRIPKE_BLEND_BUDGET).
    #[arg(long, global = true)]
    budget: Option<u64>,
    /// Valuation-sweep budget for validity checks.
    #[arg(long, global = true)]
    sweep_budget: Option<u64>,
    /// Carrier budget for universe construction.
    #[arg(long, global = true)]
    universe_budget: Option<u64>,
    /// Rank cutoff for blended constructions.
    #[arg(long, global = true)]
    rank: Option<usize>,
    /// Sample count for randomized property checks.
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Seed for randomized sweeps.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Parallelism hint for partitionable sweeps.
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a formula and print its canonical form.
    Parse {
        /// Propositional formula text.
        #[arg(long, conflicts_with = "set")]
        prop: Option<String>,
        /// Set-theoretic formula text.
        #[arg(long)]
        set: Option<String>,
    },
    /// Validate a frame, print signatures, list upsets, or enumerate trees.
    Frame {
        /// Frame JSON file to validate.
        #[arg(long)]
        input: Option<PathBuf>,
        /// List the upsets of this node's cone (requires --input).
        #[arg(long)]
        upsets: Option<u64>,
        /// Enumerate trees up to this many nodes.
        #[arg(long)]
        enumerate: Option<usize>,
        /// Frame class filter for enumeration: trees|linear|splitting:N|depth:N.
        #[arg(long, default_value = "trees")]
        class: String,
    },
    /// Evaluate the propositional forcing relation at a node.
    Force {
        #[arg(long)]
        frame: PathBuf,
        /// Valuation JSON file: {"p": [node, ...], ...}.
        #[arg(long)]
        valuation: PathBuf,
        #[arg(long)]
        node: u64,
        #[arg(long)]
        formula: String,
    },
    /// Brute-force frame validity over all persistent valuations.
    Valid {
        #[arg(long)]
        frame: PathBuf,
        #[arg(long)]
        formula: String,
    },
    /// Print an intermediate-logic axiom scheme instance: lc|t:N|bd:N.
    Axiom {
        #[arg(long)]
        scheme: String,
    },
    /// Check a formula against every frame of a class up to a size bound.
    LogicMember {
        #[arg(long)]
        class: String,
        #[arg(long)]
        formula: String,
        #[arg(long)]
        bound: usize,
    },
    /// Build a cumulative level V_k or validate a universe file.
    Universe {
        #[arg(long)]
        vk: Option<usize>,
        /// Universe JSON file (nested arrays; [] is the empty set).
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Construct a blended model and print its domain report.
    Blend {
        #[arg(long)]
        frame: PathBuf,
        /// Universe per end-node in ascending label order: "2,3" for V_2,
        /// V_3 or "s2,s3" for transitive slices.
        #[arg(long)]
        universes: String,
    },
    /// Check a truncated IZF axiom on a blended model.
    IzfCheck {
        #[arg(long)]
        frame: PathBuf,
        #[arg(long)]
        universes: String,
        /// One of: extensionality, empty, pairing, union, powerset,
        /// separation, collection, set-induction.
        #[arg(long)]
        axiom: String,
        /// Scheme formula for separation (free var x), collection (free x,
        /// y) or set-induction (free x).
        #[arg(long)]
        formula: Option<String>,
        #[arg(long, default_value_t = 1)]
        margin: usize,
    },
    /// Print the upset-counting sentence psi_n.
    Psi {
        #[arg(long)]
        n: usize,
    },
    /// Print the node identifier chi_v and its truth set.
    Chi {
        #[arg(long)]
        frame: PathBuf,
        #[arg(long)]
        universes: String,
        #[arg(long)]
        node: u64,
    },
    /// Build the faithful substitution realizing a valuation.
    Faithful {
        #[arg(long)]
        frame: PathBuf,
        #[arg(long)]
        universes: String,
        #[arg(long)]
        valuation: PathBuf,
    },
    /// Search for a countermodel certificate of phi over a logic's frames.
    Dejongh {
        /// ipc|lc|t:N|bd:N.
        #[arg(long)]
        logic: String,
        #[arg(long)]
        formula: String,
        #[arg(long, default_value_t = 4)]
        bound: usize,
    },
    /// The excluded-middle demonstration on the fork.
    EmDemo,
    /// Run the acceptance criteria.
    Selftest {
        /// Run a single criterion by number.
        #[arg(long)]
        criterion: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut config = RunConfig::from_env();
    if let Some(b) = cli.budget {
        config.element_budget = b;
    }
    if let Some(b) = cli.sweep_budget {
        config.sweep_budget = b;
    }
    if let Some(b) = cli.universe_budget {
        config.universe_budget = b;
    }
    if let Some(r) = cli.rank {
        config.rank = r;
    }
    if let Some(s) = cli.samples {
        config.samples = s;
    }
    if let Some(s) = cli.seed {
        config.seed = s;
    }
    if let Some(j) = cli.jobs {
        config.jobs = j;
    }
    if let Err(e) = config.validate() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match run(cli.command, &config, cli.format) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn emit<T: serde::Serialize>(format: Format, value: &T, text: impl FnOnce() -> String) -> Result<()> {
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(value)?),
        Format::Text => println!("{}", text()),
    }
    Ok(())
}

fn load_frame(path: &PathBuf) -> Result<Frame> {
    let raw = std::fs::read_to_string(path)
        .with_context(|| format!("reading frame file {}", path.display()))?;
    let json: FrameJson = serde_json::from_str(&raw).context("parsing frame JSON")?;
    Ok(Frame::from_json(&json)?)
}

fn load_valuation(path: &PathBuf, frame: &Frame) -> Result<Valuation> {
    let raw = std::fs::read_to_string(path)
        .with_context(|| format!("reading valuation file {}", path.display()))?;
    let labels: BTreeMap<String, Vec<u64>> =
        serde_json::from_str(&raw).context("parsing valuation JSON")?;
    Ok(Valuation::from_labels(frame, &labels)?)
}

fn parse_class(raw: &str) -> Result<FrameClass> {
    match raw {
        "trees" | "all" => Ok(FrameClass::AllTrees),
        "linear" => Ok(FrameClass::Linear),
        other => {
            if let Some(n) = other.strip_prefix("splitting:") {
                Ok(FrameClass::Splitting(n.parse().context("splitting arity")?))
            } else if let Some(n) = other.strip_prefix("depth:") {
                Ok(FrameClass::Depth(n.parse().context("depth bound")?))
            } else {
                bail!("unknown frame class `{other}`")
            }
        }
    }
}

fn parse_logic(raw: &str) -> Result<Logic> {
    match raw {
        "ipc" => Ok(Logic::Ipc),
        "lc" => Ok(Logic::Lc),
        other => {
            let indexed = |n: &str, what: &str| -> Result<usize> {
                let n: usize = n.parse().with_context(|| format!("{what} index"))?;
                if n == 0 {
                    bail!("{what} is indexed from 1");
                }
                Ok(n)
            };
            if let Some(n) = other.strip_prefix("t:") {
                Ok(Logic::T(indexed(n, "T")?))
            } else if let Some(n) = other.strip_prefix("bd:") {
                Ok(Logic::Bd(indexed(n, "BD")?))
            } else {
                bail!("unknown logic `{other}`")
            }
        }
    }
}

fn parse_universes(raw: &str, frame: &Frame, config: &RunConfig) -> Result<BTreeMap<usize, Universe>> {
    let tokens: Vec<&str> = raw.split(',').map(str::trim).collect();
    let mut ends: Vec<usize> = frame.iter_mask(frame.ends()).collect();
    ends.sort_by_key(|&e| frame.label(e));
    if tokens.len() != ends.len() {
        bail!(
            "frame has {} end-nodes but {} universes were given",
            ends.len(),
            tokens.len()
        );
    }
    let mut out = BTreeMap::new();
    for (tok, &e) in tokens.iter().zip(&ends) {
        let universe = if let Some(c) = tok.strip_prefix('s') {
            Universe::transitive_slice(c.parse().context("slice size")?)
        } else {
            let k: usize = tok.parse().context("universe height")?;
            Universe::build_vk(k, config.universe_budget)?
        };
        out.insert(e, universe);
    }
    Ok(out)
}

fn build_model(
    frame_path: &PathBuf,
    universes: &str,
    config: &RunConfig,
) -> Result<(Frame, BlendedModel)> {
    let frame = load_frame(frame_path)?;
    let map = parse_universes(universes, &frame, config)?;
    let model =
        BlendedModel::construct(frame.clone(), map, config.rank, config.element_budget)?;
    Ok((frame, model))
}

fn parse_izf_axiom(name: &str, formula: Option<&str>) -> Result<IzfAxiom> {
    let need = |text: Option<&str>, what: &str| -> Result<SetFormula> {
        let raw = text.ok_or_else(|| anyhow!("axiom `{what}` needs --formula"))?;
        Ok(parse_set(raw)?)
    };
    Ok(match name {
        "extensionality" => IzfAxiom::Extensionality,
        "empty" | "empty-set" => IzfAxiom::EmptySet,
        "pairing" => IzfAxiom::Pairing,
        "union" => IzfAxiom::Union,
        "powerset" | "power-set" => IzfAxiom::PowerSet,
        "separation" => IzfAxiom::Separation(need(formula, "separation")?),
        "collection" => IzfAxiom::Collection(need(formula, "collection")?),
        "set-induction" => IzfAxiom::SetInduction(need(formula, "set-induction")?),
        other => bail!("unknown axiom `{other}`"),
    })
}

/// Returns Ok(true) for exit 0, Ok(false) for exit 1 (a check failed).
fn run(command: Command, config: &RunConfig, format: Format) -> Result<bool> {
    match command {
        Command::Parse { prop, set } => {
            match (prop, set) {
                (Some(text), None) => {
                    let f = parse_prop(&text)?;
                    let letters: Vec<String> = f.letters().into_iter().collect();
                    emit(
                        format,
                        &serde_json::json!({ "canonical": f.to_string(), "letters": letters }),
                        || format!("{f}"),
                    )?;
                }
                (None, Some(text)) => {
                    let f = parse_set(&text)?.canonicalize();
                    let free: Vec<String> = f.free_vars().into_iter().collect();
                    emit(
                        format,
                        &serde_json::json!({
                            "canonical": f.to_string(),
                            "free_variables": free,
                            "sentence": f.is_sentence(),
                        }),
                        || format!("{f}"),
                    )?;
                }
                _ => bail!("pass exactly one of --prop or --set"),
            }
            Ok(true)
        }
        Command::Frame { input, upsets, enumerate, class } => {
            if let Some(path) = input {
                let frame = load_frame(&path)?;
                if let Some(label) = upsets {
                    let v = frame
                        .index_of_label(label)
                        .ok_or_else(|| anyhow!("unknown node {label}"))?;
                    let count = frame.upset_count(v);
                    if count > 1 << 20 {
                        bail!("node {label} has {count} upsets; too many to list");
                    }
                    let sets: Vec<Vec<u64>> =
                        frame.upsets(v).into_iter().map(|m| frame.mask_to_labels(m)).collect();
                    emit(
                        format,
                        &serde_json::json!({ "node": label, "count": sets.len(), "upsets": sets }),
                        || format!("U_{label} = {} upsets: {sets:?}", sets.len()),
                    )?;
                } else {
                    let signatures: BTreeMap<u64, (usize, Vec<u64>)> = frame
                        .nodes()
                        .map(|v| {
                            let (u, ends) = frame.node_signature(v);
                            (frame.label(v), (u, frame.mask_to_labels(ends)))
                        })
                        .collect();
                    emit(
                        format,
                        &serde_json::json!({
                            "frame": frame.to_json(),
                            "nodes": frame.len(),
                            "depth": frame.depth(),
                            "signatures": signatures,
                            "signature_injective": frame.signature_injective(),
                        }),
                        || {
                            format!(
                                "valid tree: {} nodes, depth {}, signatures {:?}",
                                frame.len(),
                                frame.depth(),
                                signatures
                            )
                        },
                    )?;
                }
            } else if let Some(n) = enumerate {
                if n > 16 {
                    bail!("enumeration is capped at 16 nodes ({n} would take too long)");
                }
                let frames: Vec<FrameJson> = enumerate_class(parse_class(&class)?, n)
                    .into_iter()
                    .map(|f| f.to_json())
                    .collect();
                emit(format, &frames, || format!("{} frames", frames.len()))?;
            } else {
                bail!("pass --input or --enumerate");
            }
            Ok(true)
        }
        Command::Force { frame, valuation, node, formula } => {
            let f = load_frame(&frame)?;
            let v = load_valuation(&valuation, &f)?;
            let phi = parse_prop(&formula)?;
            let idx = f.index_of_label(node).ok_or_else(|| anyhow!("unknown node {node}"))?;
            let forced = force_prop(&f, &v, idx, &phi)?;
            emit(
                format,
                &serde_json::json!({ "node": node, "formula": phi.to_string(), "forced": forced }),
                || format!("node {node} {} {phi}", if forced { "forces" } else { "does not force" }),
            )?;
            Ok(true)
        }
        Command::Valid { frame, formula } => {
            let f = load_frame(&frame)?;
            let phi = parse_prop(&formula)?;
            let verdict = valid_in_frame(&f, &phi, config.sweep_budget)?;
            let json = report::validity_json(&f, &phi.to_string(), &verdict);
            emit(format, &json, || {
                if verdict.is_valid() {
                    format!("{phi} is valid in the frame")
                } else {
                    format!("{phi} has a countermodel: {}", serde_json::to_string(&json).unwrap())
                }
            })?;
            Ok(true)
        }
        Command::Axiom { scheme } => {
            let phi = match parse_logic(&scheme)? {
                Logic::Ipc => bail!("ipc has no extra axiom; pick lc, t:N or bd:N"),
                Logic::Lc => axiom(AxiomScheme::Lc),
                Logic::T(n) => axiom(AxiomScheme::T(n)),
                Logic::Bd(n) => axiom(AxiomScheme::Bd(n)),
            };
            emit(format, &serde_json::json!({ "scheme": scheme, "formula": phi.to_string() }), || {
                format!("{phi}")
            })?;
            Ok(true)
        }
        Command::LogicMember { class, formula, bound } => {
            let phi = parse_prop(&formula)?;
            let verdict = logic_member(parse_class(&class)?, &phi, bound, config.sweep_budget)?;
            let json = report::member_json(&phi.to_string(), &class, bound, &verdict);
            emit(format, &json, || serde_json::to_string(&json).unwrap())?;
            Ok(true)
        }
        Command::Universe { vk, input } => {
            let universe = match (vk, input) {
                (Some(k), None) => Universe::build_vk(k, config.universe_budget)?,
                (None, Some(path)) => {
                    let raw = std::fs::read_to_string(&path)?;
                    let json: serde_json::Value = serde_json::from_str(&raw)?;
                    Universe::from_json(&json)?
                }
                _ => bail!("pass exactly one of --vk or --input"),
            };
            emit(
                format,
                &serde_json::json!({
                    "size": universe.len(),
                    "height": universe.height(),
                    "carrier": universe.to_json(),
                }),
                || format!("universe of {} sets, height {}", universe.len(), universe.height()),
            )?;
            Ok(true)
        }
        Command::Blend { frame, universes } => {
            let (_, model) = build_model(&frame, &universes, config)?;
            let json = report::model_report(&model)?;
            emit(format, &json, || serde_json::to_string_pretty(&json).unwrap())?;
            Ok(true)
        }
        Command::IzfCheck { frame, universes, axiom, formula, margin } => {
            let (_, model) = build_model(&frame, &universes, config)?;
            let ax = parse_izf_axiom(&axiom, formula.as_deref())?;
            let verdict = izf_check(&model, &ax, margin)?;
            let json = report::izf_json(ax.name(), formula, margin, &verdict);
            emit(format, &json, || format!("{}: {} ({})", json.axiom, json.verdict, json.detail))?;
            Ok(!matches!(verdict, IzfVerdict::Failed { .. }))
        }
        Command::Psi { n } => {
            if n == 0 {
                bail!("psi is defined for n >= 1");
            }
            let phi = psi(n);
            emit(format, &serde_json::json!({ "n": n, "formula": phi.to_string() }), || {
                format!("{phi}")
            })?;
            Ok(true)
        }
        Command::Chi { frame, universes, node } => {
            let (f, model) = build_model(&frame, &universes, config)?;
            let counting = counting_check(&model)?;
            if !counting.ok() {
                bail!("model fails the counting check; raise the rank or change universes");
            }
            let dist = derive_distinguishers(&model)?;
            let idx = f.index_of_label(node).ok_or_else(|| anyhow!("unknown node {node}"))?;
            let sentence = chi(&model, idx, &dist)?;
            let mask = model.truth_set(&sentence)?;
            let truth: Vec<u64> = f.mask_to_labels(mask);
            let cone: Vec<u64> = f.mask_to_labels(f.cone(idx));
            emit(
                format,
                &serde_json::json!({
                    "node": node,
                    "chi": sentence.to_string(),
                    "truth_set": truth,
                    "cone": cone,
                    "identifies_cone": truth == cone,
                }),
                || format!("chi_{node} = {sentence}\ntruth set {truth:?}"),
            )?;
            Ok(mask == f.cone(idx))
        }
        Command::Faithful { frame, universes, valuation } => {
            let (f, model) = build_model(&frame, &universes, config)?;
            let v = load_valuation(&valuation, &f)?;
            let counting = counting_check(&model)?;
            if !counting.ok() {
                bail!("model fails the counting check; raise the rank or change universes");
            }
            let dist = derive_distinguishers(&model)?;
            let sigma = faithful_substitution(&model, &v, &dist)?;
            let images: BTreeMap<String, String> =
                sigma.iter().map(|(p, s)| (p.clone(), s.to_string())).collect();
            emit(
                format,
                &serde_json::json!({
                    "valuation": v.to_labels(&f),
                    "sigma": images,
                    "verified": true,
                }),
                || {
                    images
                        .iter()
                        .map(|(p, s)| format!("sigma({p}) = {s}"))
                        .collect::<Vec<_>>()
                        .join("\n")
                },
            )?;
            Ok(true)
        }
        Command::Dejongh { logic, formula, bound } => {
            let phi = parse_prop(&formula)?;
            let outcome = dejongh_countermodel(
                parse_logic(&logic)?,
                &phi,
                bound,
                config.sweep_budget,
                config.element_budget,
            )?;
            match outcome {
                PipelineOutcome::Certificate(cert) => {
                    let json = report::certificate_json(&cert);
                    emit(format, &json, || serde_json::to_string_pretty(&json).unwrap())?;
                    Ok(true)
                }
                PipelineOutcome::NotRefutedUpToBound { frames_checked } => {
                    emit(
                        format,
                        &serde_json::json!({
                            "verdict": "not-refuted-up-to-bound",
                            "frames_checked": frames_checked,
                        }),
                        || format!("not refuted on {frames_checked} frames (evidence, not proof)"),
                    )?;
                    Ok(true)
                }
            }
        }
        Command::EmDemo => {
            let demo = excluded_middle_demo(config.element_budget)?;
            emit(format, &demo, || format!("{demo:#?}"))?;
            Ok(demo.expected_pattern())
        }
        Command::Selftest { criterion } => {
            let results = match criterion {
                Some(id) => vec![acceptance::run_criterion(id, config)],
                None => acceptance::run_all(config),
            };
            let mut all_ok = true;
            for r in &results {
                println!("{}", r.line());
                all_ok &= r.passed;
            }
            if format == Format::Json {
                let json: Vec<_> = results
                    .iter()
                    .map(|r| {
                        serde_json::json!({
                            "id": r.id,
                            "name": r.name,
                            "passed": r.passed,
                            "details": r.details,
                        })
                    })
                    .collect();
                println!("{}", serde_json::to_string_pretty(&json)?);
            }
            Ok(all_ok)
        }
    }
}
