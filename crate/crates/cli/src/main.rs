use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use sqfree::admissible_max::admissible_max_exact;
use sqfree::constructions::{
    dense_q_step, expected_sample_size, greedy_squarefree_sums, overp_base_point, overp_sequence,
    property_p_sequence, sample_counterexample, CandidateOrder, DenseQConfig, DenseQState, DenseQStep,
    GrowthFn, OverPConfig, OverPSequenceConfig, PropertyPConfig, SamplerConfig, ThresholdSchedule,
};
use sqfree::large_sieve::{optimize_q, sieve_bound, Flavor, OmegaProfile, SieveBoundQuery};
use sqfree::properties::{
    admissibility_certificate, check_q_prefix, check_squarefree_sums, property_p_evidence, Cutoff,
    FiniteSet, NamedSequence, QSource, QStrategy, SumsVerdict, WitnessOutcome,
};
use sqfree::sieve::{count_power_free_upto, PrimeTable};
use sqfree_cli::appendix::run_appendix_trials;
use sqfree_cli::figure::{figure_shift_data, status_label, to_csv};
use sqfree_cli::oeis::{
    crosscheck, find_in_cache, read_bfile, CrosscheckOptions, Manifest, Outcome, CACHE_ENV, DEFAULT_MANIFEST,
};

#[derive(Parser)]
#[command(name = "sqfree", version, about = "Experiments with k-free integers and their translates")]
struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count k-free integers in [1, x].
    SieveCount {
        #[arg(long)]
        x: u64,
        #[arg(long, default_value_t = 2)]
        k: u32,
    },
    /// Largest survivor count in [1, x] after removing one class mod p^k per prime.
    AdmissibleMax {
        #[arg(long)]
        x: u64,
        #[arg(long, default_value_t = 2)]
        k: u32,
        /// Seconds before the search reports a lower bound.
        #[arg(long, default_value_t = 60.0)]
        budget_secs: f64,
    },
    /// CSV of A(x) and Q(x) minus the main term x/ζ(k).
    FigureShift {
        #[arg(long)]
        xmax: u64,
        #[arg(long, default_value_t = 2)]
        k: u32,
        /// Seconds allowed per A(x).
        #[arg(long, default_value_t = 10.0)]
        budget_secs: f64,
        /// Write to this file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a prefix of one of the named sequences.
    VerifyNamed {
        /// A1 = 2^j+1, A2 = 2^j-1, A3 = j!+1, A4 = j!-1 (OEIS ids accepted too).
        #[arg(long)]
        tag: NamedSequence,
        /// Number of leading terms.
        #[arg(long)]
        prefix: usize,
        #[arg(long, value_enum, default_value_t = Mode::QWitness)]
        mode: Mode,
        #[arg(long, value_enum, default_value_t = Strategy::Crt)]
        strategy: Strategy,
        #[arg(long, default_value_t = 0.1)]
        theta: f64,
        /// Sieve translates by primes up to this bound only.
        #[arg(long)]
        cutoff: Option<u64>,
        #[arg(long, default_value_t = 2)]
        k: u32,
    },
    /// Run one of the constructions.
    Construct {
        #[command(subcommand)]
        which: Construction,
    },
    /// Evaluate (N + Q^2) / Σ h(q) or (N + Q^(2k)) / Σ h(q).
    SieveBound {
        #[arg(long)]
        n: u64,
        /// Fixed Q; omit together with --optimize to search 1..=QMAX.
        #[arg(long)]
        q: Option<u64>,
        #[arg(long)]
        optimize: Option<u64>,
        #[arg(long, value_enum, default_value_t = Omega::One)]
        omega: Omega,
        #[arg(long, value_enum, default_value_t = FlavorArg::Power)]
        flavor: FlavorArg,
        #[arg(long, default_value_t = 2)]
        k: u32,
        /// Interval offset M; the bound does not depend on it.
        #[arg(long, allow_hyphen_values = true)]
        offset: Option<i64>,
    },
    /// Compare b-files with computed values.
    Crosscheck {
        /// B-file path; its name must carry the sequence id.
        #[arg(long)]
        bfile: Vec<PathBuf>,
        /// Sequence id looked up in the cache directory.
        #[arg(long)]
        id: Vec<String>,
        /// Check every id of the manifest found in the cache directory.
        #[arg(long)]
        all: bool,
        /// Defaults to the SQFREE_OEIS_CACHE environment variable.
        #[arg(long)]
        cache_dir: Option<PathBuf>,
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[arg(long, allow_hyphen_values = true)]
        min_index: Option<i64>,
        #[arg(long, allow_hyphen_values = true)]
        max_index: Option<i64>,
        /// Seconds allowed per A(x).
        #[arg(long, default_value_t = 10.0)]
        budget_secs: f64,
    },
    /// Randomized checks of the per-prime large sieve inequality and Plancherel identity.
    VerifyAppendix {
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum Construction {
    /// Sequence with property P and growth at most j f(j).
    P {
        /// identity, linear:c, jlogj, const:c or power:e
        #[arg(long, default_value = "identity")]
        growth: GrowthFn,
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 2)]
        k: u32,
        /// Also report, for n up to this value, how many terms a have n + a k-free.
        #[arg(long)]
        evidence: Option<u64>,
    },
    /// Greedy sequence with all pairwise sums k-free.
    GreedySums {
        #[arg(long)]
        count: usize,
        /// Do not require a + a to be k-free.
        #[arg(long)]
        no_diagonal: bool,
        #[arg(long, default_value_t = 2)]
        k: u32,
    },
    /// Dense property-Q iteration; one extension step per --x value.
    DenseQ {
        #[arg(long)]
        anchor: u64,
        #[arg(long, required = true)]
        x: Vec<u64>,
        #[arg(long, default_value_t = 0.5)]
        epsilon: f64,
        /// Draw candidates at random instead of scanning in order.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1000)]
        draws: u64,
        #[arg(long, default_value_t = 2)]
        k: u32,
    },
    /// Random k-free set with inclusion probability C ln n ln ln n / n.
    SampleCounter {
        #[arg(long, default_value_t = 5.0)]
        c: f64,
        #[arg(long)]
        x_max: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        k: u32,
        /// Print only the size and expectation.
        #[arg(long)]
        summary: bool,
    },
    /// Multiples of ∏_{p <= P} p^k whose small offsets avoid larger prime powers.
    Overp {
        /// Single base point for this threshold.
        #[arg(long)]
        threshold: Option<u64>,
        /// Number of anchors for the double-exponential schedule.
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long, default_value_t = 3.0)]
        scale: f64,
        /// Explicit thresholds instead of the schedule.
        #[arg(long, value_delimiter = ',')]
        custom: Option<Vec<u64>>,
        #[arg(long, default_value_t = 1_000_000)]
        budget: u64,
        #[arg(long, default_value_t = 2)]
        k: u32,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    QWitness,
    Admissible,
    Sums,
}

#[derive(Clone, Copy, ValueEnum)]
enum Strategy {
    Plain,
    Half,
    Crt,
}

#[derive(Clone, Copy, ValueEnum)]
enum Omega {
    One,
    EsSumfree,
}

#[derive(Clone, Copy, ValueEnum)]
enum FlavorArg {
    Linear,
    Power,
}

/// Text lines, or a JSON value, plus whether the run counts as a failure.
struct Output {
    text: String,
    json: Value,
    failed: bool,
}

impl Output {
    fn ok(text: String, json: Value) -> Self {
        Output { text, json, failed: false }
    }
}

fn budget(secs: f64) -> anyhow::Result<Duration> {
    Duration::try_from_secs_f64(secs).map_err(|e| anyhow!("invalid budget {secs}: {e}"))
}

fn run(command: Command) -> anyhow::Result<Output> {
    match command {
        Command::SieveCount { x, k } => {
            let table = PrimeTable::covering(x, k)?;
            let count = count_power_free_upto(x, k, &table)?;
            Ok(Output::ok(count.to_string(), json!({ "x": x, "k": k, "count": count })))
        }
        Command::AdmissibleMax { x, k, budget_secs } => {
            let r = admissible_max_exact(x, k, budget(budget_secs)?)?;
            let classes: Vec<String> =
                r.witness.iter().map(|(p, c)| format!("{} mod {} (p = {p})", c.residue(), c.modulus())).collect();
            let text = format!(
                "A({x}) = {} [{}]\nwitness: {}\nshift lower bound: {}\nsieve upper bound: {}",
                r.value,
                status_label(r.status),
                if classes.is_empty() { "none".into() } else { classes.join(", ") },
                r.shift_lower,
                r.sieve_upper
            );
            let witness: Vec<Value> = r
                .witness
                .iter()
                .map(|(p, c)| json!({ "prime": p, "residue": c.residue(), "modulus": c.modulus() }))
                .collect();
            Ok(Output::ok(
                text,
                json!({
                    "x": x, "k": k, "value": r.value, "status": status_label(r.status),
                    "witness": witness, "shift_lower": r.shift_lower, "sieve_upper": r.sieve_upper,
                }),
            ))
        }
        Command::FigureShift { xmax, k, budget_secs, out } => {
            let rows = figure_shift_data(xmax, k, budget(budget_secs)?)?;
            let csv = to_csv(&rows);
            let frontier = rows.iter().take_while(|r| r.status == sqfree::admissible_max::Status::Exact).count();
            match out {
                Some(path) => {
                    std::fs::write(&path, &csv).with_context(|| format!("writing {}", path.display()))?;
                    Ok(Output::ok(
                        format!("wrote {} rows to {} (exact through x = {frontier})", rows.len(), path.display()),
                        json!({ "rows": rows.len(), "path": path, "exact_through": frontier }),
                    ))
                }
                None => Ok(Output::ok(csv.trim_end().to_string(), json!({ "csv": csv, "exact_through": frontier }))),
            }
        }
        Command::VerifyNamed { tag, prefix, mode, strategy, theta, cutoff, k } => {
            verify_named(tag, prefix, mode, strategy, theta, cutoff, k)
        }
        Command::Construct { which } => construct(which),
        Command::SieveBound { n, q, optimize, omega, flavor, k, offset } => {
            let profile = match omega {
                Omega::One => OmegaProfile::constant_one(k),
                Omega::EsSumfree => OmegaProfile::es_sumfree(k),
            };
            let flavor = match flavor {
                FlavorArg::Linear => Flavor::Linear,
                FlavorArg::Power => Flavor::Power,
            };
            let (q, bound) = match (q, optimize) {
                (Some(q), None) => (q, sieve_bound(&SieveBoundQuery { n, q, profile, flavor, offset })?),
                (None, Some(top)) => optimize_q(n, &profile, flavor, 1..=top)?,
                _ => bail!("give exactly one of --q and --optimize"),
            };
            let approx = num_traits::ToPrimitive::to_f64(&bound).unwrap_or(f64::NAN);
            Ok(Output::ok(
                format!("Q = {q}\nbound = {bound} ≈ {approx:.6}"),
                json!({ "n": n, "q": q, "bound": bound.to_string(), "approx": approx }),
            ))
        }
        Command::Crosscheck { bfile, id, all, cache_dir, manifest, min_index, max_index, budget_secs } => {
            let cache = cache_dir.or_else(|| std::env::var_os(CACHE_ENV).map(PathBuf::from));
            let manifest = load_manifest(manifest.as_deref(), cache.as_deref())?;
            let mut paths = bfile;
            let mut ids = id;
            if all {
                ids.extend(manifest.rules.keys().cloned());
            }
            if !ids.is_empty() {
                let dir = cache.as_deref().ok_or_else(|| anyhow!("--id needs --cache-dir or {CACHE_ENV}"))?;
                for id in &ids {
                    paths.push(find_in_cache(dir, id)?);
                }
            }
            if paths.is_empty() {
                bail!("nothing to check: give --bfile, --id or --all");
            }
            let opts = CrosscheckOptions {
                range: (min_index.is_some() || max_index.is_some())
                    .then(|| (min_index.unwrap_or(i64::MIN), max_index.unwrap_or(i64::MAX))),
                a_budget: budget(budget_secs)?,
            };
            let mut text = Vec::new();
            let mut reports = Vec::new();
            let mut failed = false;
            for path in &paths {
                let b = read_bfile(path)?;
                let r = crosscheck(&b, &manifest, &opts)?;
                failed |= r.mismatches() > 0;
                text.push(format!(
                    "{}: {} match, {} mismatch, {} skipped",
                    r.id,
                    r.matches(),
                    r.mismatches(),
                    r.skipped()
                ));
                let mut mismatches = Vec::new();
                for row in &r.rows {
                    if let Outcome::Mismatch { computed } = &row.outcome {
                        text.push(format!("  index {}: b-file {} computed {}", row.index, row.expected, computed));
                        mismatches.push(json!({
                            "index": row.index, "expected": row.expected.to_string(), "computed": computed.to_string(),
                        }));
                    }
                }
                reports.push(json!({
                    "id": r.id, "matches": r.matches(), "mismatches": r.mismatches(),
                    "skipped": r.skipped(), "mismatch_rows": mismatches,
                }));
            }
            Ok(Output { text: text.join("\n"), json: json!({ "reports": reports }), failed })
        }
        Command::VerifyAppendix { trials, seed } => {
            let s = run_appendix_trials(trials, seed)?;
            let text = format!(
                "hand case: lhs = {:.12} rhs = {:.12}\ntrials: {}\ninequality failures: {}\nplancherel failures: {}\n\
                 max plancherel relative error: {:.3e}\nmin lhs/rhs: {:.6}",
                s.hand_case.lhs,
                s.hand_case.rhs,
                s.trials,
                s.inequality_failures,
                s.plancherel_failures,
                s.max_plancherel_error,
                s.min_ratio
            );
            let json = json!({
                "trials": s.trials, "inequality_failures": s.inequality_failures,
                "plancherel_failures": s.plancherel_failures, "max_plancherel_error": s.max_plancherel_error,
                "min_ratio": s.min_ratio, "hand_case": { "lhs": s.hand_case.lhs, "rhs": s.hand_case.rhs },
            });
            Ok(Output { text, json, failed: !s.passed() })
        }
    }
}

fn load_manifest(path: Option<&Path>, cache: Option<&Path>) -> anyhow::Result<Manifest> {
    let from_cache = cache.map(|d| d.join("manifest.txt")).filter(|p| p.is_file());
    let text = match path.map(Path::to_path_buf).or(from_cache) {
        Some(p) => std::fs::read_to_string(&p).with_context(|| format!("reading {}", p.display()))?,
        None => DEFAULT_MANIFEST.to_string(),
    };
    Ok(Manifest::parse(&text)?)
}

fn verify_named(
    tag: NamedSequence,
    prefix: usize,
    mode: Mode,
    strategy: Strategy,
    theta: f64,
    cutoff: Option<u64>,
    k: u32,
) -> anyhow::Result<Output> {
    let set = tag.prefix(prefix);
    match mode {
        Mode::QWitness => {
            let strategy = match strategy {
                Strategy::Plain => QStrategy::PlainScan,
                Strategy::Half => QStrategy::HalfInterval,
                Strategy::Crt => QStrategy::Crt { theta },
            };
            let cutoff = cutoff.map_or(Cutoff::Full, Cutoff::Primes);
            match check_q_prefix(&QSource::Named(tag), prefix, strategy, k, cutoff)? {
                WitnessOutcome::Found(r) => Ok(Output::ok(
                    format!("witness {}\ncertification {}", r.witness, r.certification),
                    json!({ "tag": tag.to_string(), "prefix": prefix, "witness": r.witness,
                            "certification": r.certification.to_string() }),
                )),
                WitnessOutcome::NoneFound { examined } => Ok(Output {
                    text: format!("no witness among {examined} candidates"),
                    json: json!({ "tag": tag.to_string(), "prefix": prefix, "witness": null, "examined": examined }),
                    failed: true,
                }),
            }
        }
        Mode::Admissible => {
            let cert = admissibility_certificate(&set, k, 13)?;
            let mut lines = vec![format!("{tag} prefix of {prefix} terms is admissible")];
            let mut classes = Vec::new();
            for (p, c) in cert.explicit() {
                lines.push(format!("  p = {p}: avoids {} mod {}", c.residue(), c.modulus()));
                let whole = tag.certificate(*p, k).ok();
                classes.push(json!({ "prime": p, "residue": c.residue(), "modulus": c.modulus(),
                                     "sequence_class": whole.map(|w| w.residue()) }));
            }
            lines.push(format!("  {}", cert.automatic_note()));
            Ok(Output::ok(lines.join("\n"), json!({ "tag": tag.to_string(), "prefix": prefix, "classes": classes })))
        }
        Mode::Sums => match check_squarefree_sums(&set, true, k)? {
            SumsVerdict::Pass => Ok(Output::ok(
                "all pairwise sums are k-free".into(),
                json!({ "tag": tag.to_string(), "prefix": prefix, "pass": true }),
            )),
            SumsVerdict::Violation { a, b, prime } => Ok(Output::ok(
                format!("{prime}^{k} divides {a} + {b}"),
                json!({ "tag": tag.to_string(), "prefix": prefix, "pass": false,
                        "a": a.to_string(), "b": b.to_string(), "prime": prime }),
            )),
        },
    }
}

fn join(v: impl IntoIterator<Item = impl ToString>) -> String {
    v.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn construct(which: Construction) -> anyhow::Result<Output> {
    match which {
        Construction::P { growth, count, k, evidence } => {
            let seq = property_p_sequence(&PropertyPConfig::new(growth, count, k))?;
            let mut text = format!("terms: {}\nthresholds: {}", join(&seq.terms), join(&seq.thresholds));
            let mut ev = Value::Null;
            if let Some(n_max) = evidence {
                let counts = property_p_evidence(&FiniteSet::from_u64s(&seq.terms)?, n_max, k)?;
                text.push_str(&format!("\nevidence: {}", join(counts.iter().map(|(n, c)| format!("{n}:{c}")))));
                ev = json!(counts);
            }
            Ok(Output::ok(
                text,
                json!({ "terms": seq.terms, "thresholds": seq.thresholds, "moduli": seq.moduli, "evidence": ev }),
            ))
        }
        Construction::GreedySums { count, no_diagonal, k } => {
            let g = greedy_squarefree_sums(count, !no_diagonal, k);
            let rejections: Vec<Value> = g
                .rejections
                .iter()
                .map(|r| json!({ "candidate": r.candidate, "partner": r.partner, "prime": r.prime }))
                .collect();
            Ok(Output::ok(
                format!("terms: {}\nrejected candidates: {}", join(&g.terms), g.rejections.len()),
                json!({ "terms": g.terms, "rejections": rejections }),
            ))
        }
        Construction::DenseQ { anchor, x, epsilon, seed, draws, k } => {
            let mut state = DenseQState::default();
            let mut lines = Vec::new();
            let mut steps = Vec::new();
            let order = seed.map_or(CandidateOrder::Increasing, |seed| CandidateOrder::Random { seed, draws });
            let base = DenseQConfig { epsilon, order, ..DenseQConfig::new(anchor, x[0], k) };
            dense_q_step(&mut state, &base)?;
            lines.push(format!("n_1 = {anchor}"));
            for &xi in &x {
                let cfg = DenseQConfig { x: xi, ..base.clone() };
                if let DenseQStep::Extended { anchor, modulus, candidates_tried, grid, slice_len } =
                    dense_q_step(&mut state, &cfg)?
                {
                    let worst = grid.iter().map(|g| g.deficit).fold(f64::NEG_INFINITY, f64::max);
                    lines.push(format!(
                        "n_{} = {anchor} (W = {modulus}, {candidates_tried} candidates, max density deficit {worst:.6})",
                        state.anchors.len()
                    ));
                    steps.push(json!({ "anchor": anchor, "modulus": modulus, "candidates_tried": candidates_tried,
                                       "max_deficit": worst, "slice_len": slice_len }));
                }
            }
            Ok(Output::ok(lines.join("\n"), json!({ "anchors": state.anchors, "steps": steps })))
        }
        Construction::SampleCounter { c, x_max, seed, k, summary } => {
            let cfg = SamplerConfig { c, x_max, seed, k };
            let set = sample_counterexample(&cfg)?;
            let expected = expected_sample_size(&cfg)?;
            let elems = set.to_u64s().ok_or_else(|| anyhow!("sample element exceeds 64 bits"))?;
            let mut text = format!("size {} (expected {expected:.3})", elems.len());
            if !summary {
                text.push('\n');
                text.push_str(&join(&elems));
            }
            Ok(Output::ok(text, json!({ "size": elems.len(), "expected": expected, "elements": elems })))
        }
        Construction::Overp { threshold, depth, scale, custom, budget, k } => match (threshold, depth) {
            (Some(p), None) => {
                let cfg = OverPConfig { candidate_budget: budget, ..OverPConfig::new(p, k) };
                let pt = overp_base_point(&cfg)?;
                Ok(Output::ok(
                    format!(
                        "n = {} = {} * W\ncandidates examined: {}\ncertification: {}",
                        pt.n, pt.multiplier, pt.candidates_examined, pt.certification
                    ),
                    json!({ "n": pt.n.to_string(), "multiplier": pt.multiplier, "modulus": pt.modulus.to_string(),
                            "candidates_examined": pt.candidates_examined,
                            "certification": pt.certification.to_string() }),
                ))
            }
            (None, Some(depth)) => {
                let mut cfg = OverPSequenceConfig::new(scale, depth, k);
                cfg.candidate_budget = budget;
                if let Some(list) = custom {
                    cfg.schedule = ThresholdSchedule::Custom(list);
                }
                let seq = overp_sequence(&cfg)?;
                let anchors: Vec<String> = seq.anchors.iter().map(|a| a.n.to_string()).collect();
                let mut text = format!(
                    "thresholds: {}\nanchors: {}\ninduced set ({} elements, {}): {}",
                    join(&seq.thresholds),
                    join(&anchors),
                    seq.induced.len(),
                    seq.induced_certification,
                    join(seq.induced.iter().take(50))
                );
                if seq.departure {
                    text.push_str("\nnote: custom thresholds depart from the double-exponential schedule");
                }
                Ok(Output::ok(
                    text,
                    json!({ "thresholds": seq.thresholds, "anchors": anchors, "induced": seq.induced,
                            "certification": seq.induced_certification.to_string(), "departure": seq.departure }),
                ))
            }
            _ => bail!("give exactly one of --threshold and --depth"),
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(out) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&out.json).expect("serializable"));
            } else if !out.text.is_empty() {
                println!("{}", out.text);
            }
            if out.failed {
                ExitCode::FAILURE
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
