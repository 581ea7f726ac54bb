//! Command-line front end: stream ingestion, algorithm selection, space
//! reports, instance generation and protocol simulation.
//!
//! Streams arrive on standard input in the line format of
//! [`stream_file`]; reports leave on standard output as stable key-value
//! lines (or one JSON object with `--json`).  Exit status 0 means every
//! requested check passed, 1 means an oracle check failed (a machine
//! parsable `FAIL ...` line precedes it), 2 means bad input.

mod report;
mod stream_file;

use std::io::Read;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_rational::Ratio;

use probstream::adversary::{
    gen_app_fooling_streams, gen_bucket_stream, gen_prime_family, BucketStreamConfig,
    PrimeFoolingFamily,
};
use probstream::buckets::{bucket_boundary_decimal, bucket_boundary_exact};
use probstream::protocols::{
    gt_from_app, gt_from_tpp, igt_from_swapp, sweep_gt_from_app, sweep_gt_from_tpp,
    sweep_igt_from_swapp, IgtConfig, SweepReport,
};
use probstream::sampling::seeded_rng;
use probstream::streaming::ApproxOutput;
use probstream::threshold::threshold_oracle;
use probstream::window::window_product;
use probstream::{
    amplify, exact_product, AmplifierConfig, AppAutomaton, Rational, RationalProbability,
    StreamParameters, StreamingAutomaton, SwappAutomaton, TppAutomaton, TppMode,
};

use report::Report;
use stream_file::{parse_fraction, parse_stream, render_stream, StreamFile};

#[derive(Parser)]
#[command(
    name = "probstream",
    version,
    about = "Exact streaming toolkit for products of rational probabilities"
)]
struct Cli {
    /// Emit the report as one JSON object instead of key-value lines.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Approximate the product of the stream on standard input.
    Approx {
        /// Approximation ratio as an exact fraction, e.g. 1/10.
        #[arg(long)]
        eps: String,
        /// Declared maximum stream length.
        #[arg(long)]
        n: u64,
        /// Maximum element bit size.
        #[arg(long)]
        b: u64,
        /// Significant digits of the decimal rendering.
        #[arg(long, default_value_t = 10)]
        digits: u32,
        /// Check the output against the exact product oracle.
        #[arg(long)]
        oracle: bool,
        /// Independent copies to run (odd); the output is their median.
        #[arg(long, default_value_t = 1)]
        copies: usize,
    },
    /// Decide whether the stream's product is below its threshold.
    Threshold {
        #[arg(long, value_enum)]
        mode: TppModeArg,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        b: u64,
        /// Threshold as a fraction; otherwise the file header or the first
        /// data line supplies it.
        #[arg(long)]
        threshold: Option<String>,
        #[arg(long)]
        oracle: bool,
    },
    /// Approximate the product of the last m elements at every step.
    Window {
        #[arg(long)]
        eps: String,
        /// Window size.
        #[arg(long)]
        m: u64,
        #[arg(long)]
        b: u64,
        #[arg(long, default_value_t = 10)]
        digits: u32,
        /// Report after every element instead of only at the end.
        #[arg(long)]
        trace: bool,
        #[arg(long)]
        oracle: bool,
    },
    /// Generate hard-instance stream files (self-verified before writing).
    Gen {
        #[arg(long, value_enum)]
        family: FamilyArg,
        /// Output path (single file) or prefix (multiple files).
        #[arg(long)]
        out: String,
        #[arg(long)]
        eps: Option<String>,
        #[arg(long)]
        b: Option<u64>,
        #[arg(long)]
        n: Option<u64>,
        /// Target bucket index (claim1).
        #[arg(long)]
        j: Option<u64>,
        /// Generate every admissible instance of the family.
        #[arg(long)]
        all: bool,
        /// Bucket stride (appfool).
        #[arg(long)]
        stride: Option<u64>,
        /// Bit-budget slack of the prime family, default 1/2.
        #[arg(long)]
        gamma: Option<String>,
        /// Word rank in the prime family (1-based).
        #[arg(long)]
        rank: Option<u64>,
        /// Append the distinguishing suffix of this rank's word (primes).
        #[arg(long)]
        suffix_of: Option<u64>,
    },
    /// Simulate a one-way protocol built from a streaming automaton.
    Protocol {
        #[arg(long, value_enum)]
        reduction: ReductionArg,
        #[arg(long)]
        eps: Option<String>,
        #[arg(long)]
        b: Option<u64>,
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        m: Option<u64>,
        /// Alice's input index (gt reductions).
        #[arg(long)]
        i: Option<u64>,
        /// Bob's input index (gt reductions).
        #[arg(long)]
        j: Option<u64>,
        /// Alice's word: comma-separated fractions (igt-swapp).
        #[arg(long)]
        alice: Option<String>,
        /// Bob's queried position, 1-based (igt-swapp).
        #[arg(long)]
        index: Option<u64>,
        /// Bob's candidate value (igt-swapp).
        #[arg(long)]
        a: Option<String>,
        /// Threshold automaton backing gt-tpp.
        #[arg(long, value_enum, default_value_t = TppModeArg::Primes)]
        mode: TppModeArg,
        #[arg(long)]
        gamma: Option<String>,
        /// Run the whole input domain and report correctness and cost.
        #[arg(long)]
        sweep: bool,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TppModeArg {
    Storeall,
    Primes,
}

impl From<TppModeArg> for TppMode {
    fn from(m: TppModeArg) -> Self {
        match m {
            TppModeArg::Storeall => TppMode::StoreAll,
            TppModeArg::Primes => TppMode::PrimeVector,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Claim1,
    Primes,
    Appfool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReductionArg {
    GtApp,
    GtTpp,
    IgtSwapp,
}

enum Failure {
    /// Bad parameters or malformed input: exit 2.
    Input(String),
    /// An oracle check failed: exit 1, after a machine-parsable line.
    Oracle(String),
}

impl From<probstream::Error> for Failure {
    fn from(e: probstream::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type CliResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Oracle(what)) => {
            println!("FAIL {what}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> CliResult {
    let seed = read_seed()?;
    match cli.cmd {
        Cmd::Approx {
            eps,
            n,
            b,
            digits,
            oracle,
            copies,
        } => cmd_approx(cli.json, &eps, n, b, digits, oracle, copies, seed),
        Cmd::Threshold {
            mode,
            n,
            b,
            threshold,
            oracle,
        } => cmd_threshold(cli.json, mode, n, b, threshold.as_deref(), oracle, seed),
        Cmd::Window {
            eps,
            m,
            b,
            digits,
            trace,
            oracle,
        } => cmd_window(cli.json, &eps, m, b, digits, trace, oracle, seed),
        Cmd::Gen {
            family,
            out,
            eps,
            b,
            n,
            j,
            all,
            stride,
            gamma,
            rank,
            suffix_of,
        } => {
            let args = GenArgs {
                family,
                out,
                eps,
                b,
                n,
                j,
                all,
                stride,
                gamma,
                rank,
                suffix_of,
            };
            cmd_gen(cli.json, args)
        }
        Cmd::Protocol {
            reduction,
            eps,
            b,
            n,
            m,
            i,
            j,
            alice,
            index,
            a,
            mode,
            gamma,
            sweep,
        } => {
            let args = ProtocolArgs {
                reduction,
                eps,
                b,
                n,
                m,
                i,
                j,
                alice,
                index,
                a,
                mode,
                gamma,
                sweep,
            };
            cmd_protocol(cli.json, args)
        }
    }
}

/// Seed of the injected random source for amplified or randomized runs.
fn read_seed() -> Result<u64, Failure> {
    match std::env::var("PROBSTREAM_SEED") {
        Ok(v) => v
            .parse::<u64>()
            .map_err(|_| Failure::Input(format!("PROBSTREAM_SEED is not a u64: {v:?}"))),
        Err(_) => Ok(0),
    }
}

fn parse_ratio_arg(text: &str, what: &str) -> Result<Rational, Failure> {
    let q = parse_fraction(text).map_err(|e| Failure::Input(format!("{what}: {e}")))?;
    Ok(q.into_ratio())
}

fn read_stdin_stream() -> Result<StreamFile, Failure> {
    let mut input = String::new();
    std::io::stdin()
        .read_to_string(&mut input)
        .map_err(|e| Failure::Input(format!("reading standard input: {e}")))?;
    parse_stream(&input).map_err(Failure::Input)
}

fn ratio_str(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn require<T>(v: Option<T>, flag: &str) -> Result<T, Failure> {
    v.ok_or_else(|| Failure::Input(format!("missing required flag {flag}")))
}

#[allow(clippy::too_many_arguments)]
fn cmd_approx(
    json: bool,
    eps: &str,
    n: u64,
    b: u64,
    digits: u32,
    oracle: bool,
    copies: usize,
    seed: u64,
) -> CliResult {
    let eps = parse_ratio_arg(eps, "--eps")?;
    let file = read_stdin_stream()?;
    if file.threshold.is_some() {
        return Err(Failure::Input(
            "a !threshold header makes no sense for approx".into(),
        ));
    }
    let params = StreamParameters::new(n, b)?;
    let app = AppAutomaton::new(params, eps.clone())?;

    let mut rng = seeded_rng(seed);
    let mut state = app.initial_state(&mut rng);
    for q in &file.elements {
        state = app.step(state, q)?;
    }

    let mut r = Report::new();
    r.push("algorithm", "approx");
    r.push("n", n);
    r.push("b", b);
    r.push("eps", ratio_str(&eps));
    r.push("copies", copies);
    r.push("elements", file.elements.len());
    r.push("output.base", ratio_str(app.base()));
    if state.saw_zero() {
        r.push("output.zero", true);
        r.push("output.exact", "0/1");
        r.push("output.decimal", "0");
    } else {
        r.push("output.zero", false);
        r.push("output.index_sum", state.index_sum());
        match bucket_boundary_exact(state.index_sum(), app.base()) {
            Ok(v) => r.push("output.exact", ratio_str(&v)),
            Err(_) => r.push("output.exact", "refused(cap)"),
        }
        r.push(
            "output.decimal",
            bucket_boundary_decimal(state.index_sum(), app.base(), digits),
        );
        r.push("output.decimal.inexact", true);
    }
    let space = app.space_report(&state);
    r.push("state.bits", space.actual_state_bits);
    r.push("state.formula_bound_bits", space.formula_bound_bits);
    r.push(
        "bound.per_element_index",
        ratio_str(&space.per_element_index_bound),
    );
    r.push("bound.state_sum", ratio_str(&space.state_sum_bound));

    if copies > 1 {
        // Redundant copies of a deterministic automaton: same output,
        // reported for its message-size effect.
        let amplified = amplify(
            AppAutomaton::new(params, eps.clone())?,
            AmplifierConfig::median(copies),
        )?;
        let mut rng = seeded_rng(seed);
        let mut amp_state = amplified.initial_state(&mut rng);
        for q in &file.elements {
            amp_state = amplified.step(amp_state, q)?;
        }
        r.push(
            "amplified.state.bits",
            amplified.serialize_state(&amp_state).len(),
        );
        r.push(
            "amplified.output_matches",
            amplified.output(&amp_state)? == app.output(&state)?,
        );
    }

    let mut pass = true;
    if oracle {
        let p = exact_product(&file.elements);
        r.push("oracle.product", ratio_str(&p));
        pass = app.guarantee_holds(&state, p.numer(), p.denom());
        r.push("oracle.pass", pass);
    }
    print!("{}", r.render(json));
    if !pass {
        return Err(Failure::Oracle("oracle.guarantee approx".into()));
    }
    Ok(())
}

fn cmd_threshold(
    json: bool,
    mode: TppModeArg,
    n: u64,
    b: u64,
    threshold_flag: Option<&str>,
    oracle: bool,
    seed: u64,
) -> CliResult {
    let file = read_stdin_stream()?;
    let flag_value = threshold_flag
        .map(|t| parse_fraction(t).map_err(|e| Failure::Input(format!("--threshold: {e}"))))
        .transpose()?;
    let (threshold, body) = match (flag_value, file.threshold) {
        (Some(_), Some(_)) => {
            return Err(Failure::Input(
                "threshold given both as --threshold and as a !threshold header".into(),
            ))
        }
        (Some(t), None) => (t, file.elements),
        (None, Some(t)) => (t, file.elements),
        (None, None) => {
            let mut elems = file.elements;
            if elems.is_empty() {
                return Err(Failure::Input(
                    "no threshold: supply --threshold, a !threshold header, or a first data line"
                        .into(),
                ));
            }
            let t = elems.remove(0);
            (t, elems)
        }
    };

    let params = StreamParameters::new(n, b)?;
    let tpp = TppAutomaton::new(params, mode.into())?;
    let mut rng = seeded_rng(seed);
    let mut state = tpp.initial_state(&mut rng);
    state = tpp.step(state, &threshold)?;
    for q in &body {
        state = tpp.step(state, q)?;
    }
    let decision = tpp.decide(&state)?;

    let mut r = Report::new();
    r.push("algorithm", "threshold");
    r.push(
        "mode",
        match mode {
            TppModeArg::Storeall => "storeall",
            TppModeArg::Primes => "primes",
        },
    );
    r.push("n", n);
    r.push("b", b);
    r.push("threshold", &threshold);
    r.push("elements", body.len());
    r.push("decision", u8::from(decision));
    r.push("early_exit", state.early_exit());
    r.push("saw_zero", state.saw_zero());
    r.push("small_factor_count", state.small_factor_count());
    let space = tpp.space_report(&state);
    r.push("state.bits", space.actual_state_bits);
    r.push("state.store_all_formula_bits", space.store_all_formula_bits);
    if let Some(tracked) = space.tracked_primes {
        r.push("state.tracked_primes", tracked);
    }
    if let Some(bound) = space.prime_count_bound {
        r.push("state.prime_count_bound", bound);
    }
    r.push(
        "state.exponent_magnitude_bound",
        space.exponent_magnitude_bound,
    );
    if let Some(cap) = space.effective_length_cap {
        r.push("state.effective_length_cap", cap);
    }

    let mut pass = true;
    if oracle {
        let expected = threshold_oracle(&threshold, &body);
        r.push("oracle.decision", u8::from(expected));
        pass = decision == expected;
        r.push("oracle.pass", pass);
    }
    print!("{}", r.render(json));
    if !pass {
        return Err(Failure::Oracle("oracle.decision threshold".into()));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_window(
    json: bool,
    eps: &str,
    m: u64,
    b: u64,
    digits: u32,
    trace: bool,
    oracle: bool,
    seed: u64,
) -> CliResult {
    let eps = parse_ratio_arg(eps, "--eps")?;
    let file = read_stdin_stream()?;
    if file.threshold.is_some() {
        return Err(Failure::Input(
            "a !threshold header makes no sense for window".into(),
        ));
    }
    let swapp = SwappAutomaton::new(m, b, eps.clone())?;
    let mut rng = seeded_rng(seed);
    let mut state = swapp.initial_state(&mut rng);

    let mut r = Report::new();
    r.push("algorithm", "window");
    r.push("m", m);
    r.push("b", b);
    r.push("eps", ratio_str(&eps));
    r.push("elements", file.elements.len());

    let mut all_pass = true;
    for (t, q) in file.elements.iter().enumerate() {
        state = swapp.step(state, q)?;
        let step_pass = if oracle {
            let w = window_product(&file.elements[..=t], m);
            let ok = swapp.guarantee_holds(&state, w.numer(), w.denom());
            all_pass &= ok;
            Some(ok)
        } else {
            None
        };
        if trace {
            let key = format!("step.{}", t + 1);
            match swapp.output(&state)? {
                ApproxOutput::Zero => r.push(format!("{key}.output.decimal"), "0"),
                ApproxOutput::Power { index_sum } => {
                    r.push(format!("{key}.output.index_sum"), &index_sum);
                    r.push(
                        format!("{key}.output.decimal"),
                        bucket_boundary_decimal(&index_sum, swapp.base(), digits),
                    );
                }
            }
            if let Some(ok) = step_pass {
                r.push(format!("{key}.oracle.pass"), ok);
            }
        }
    }

    match swapp.output(&state)? {
        ApproxOutput::Zero => {
            r.push("output.zero", true);
            r.push("output.exact", "0/1");
            r.push("output.decimal", "0");
        }
        ApproxOutput::Power { index_sum } => {
            r.push("output.zero", false);
            r.push("output.index_sum", &index_sum);
            match bucket_boundary_exact(&index_sum, swapp.base()) {
                Ok(v) => r.push("output.exact", ratio_str(&v)),
                Err(_) => r.push("output.exact", "refused(cap)"),
            }
            r.push(
                "output.decimal",
                bucket_boundary_decimal(&index_sum, swapp.base(), digits),
            );
            r.push("output.decimal.inexact", true);
        }
    }
    let space = swapp.space_report(&state);
    r.push("state.bits", space.actual_state_bits);
    r.push("state.encoded_bound_bits", space.encoded_bound_bits);
    r.push("state.slot_width_bits", space.slot_width_bits);
    r.push(
        "bound.per_slot_index",
        ratio_str(&space.per_slot_index_bound),
    );
    r.push("state.naive_formula_bits", space.naive_formula_bits);
    if oracle {
        let w = window_product(&file.elements, m);
        r.push("oracle.window_product", ratio_str(&w));
        r.push("oracle.pass", all_pass);
    }
    print!("{}", r.render(json));
    if !all_pass {
        return Err(Failure::Oracle("oracle.guarantee window".into()));
    }
    Ok(())
}

struct GenArgs {
    family: FamilyArg,
    out: String,
    eps: Option<String>,
    b: Option<u64>,
    n: Option<u64>,
    j: Option<u64>,
    all: bool,
    stride: Option<u64>,
    gamma: Option<String>,
    rank: Option<u64>,
    suffix_of: Option<u64>,
}

fn cmd_gen(json: bool, args: GenArgs) -> CliResult {
    let mut r = Report::new();
    r.push("algorithm", "gen");
    let out = &args.out;
    let mut written = Vec::new();
    match args.family {
        FamilyArg::Claim1 => {
            let eps = parse_ratio_arg(require(args.eps.as_deref(), "--eps")?, "--eps")?;
            let cfg =
                BucketStreamConfig::new(eps, require(args.b, "--b")?, require(args.n, "--n")?)?;
            r.push("family", "claim1");
            r.push("k", cfg.k());
            r.push("y", cfg.y());
            let targets: Vec<u64> = if args.all {
                (0..=cfg.y()).collect()
            } else {
                vec![require(args.j, "--j")?]
            };
            for j in targets {
                // gen_bucket_stream re-verifies bucket membership of the
                // exact product before returning.
                let stream = gen_bucket_stream(&cfg, j)?;
                let path = if args.all {
                    format!("{out}.j{j}")
                } else {
                    out.clone()
                };
                write_file(&path, &render_stream(None, &stream))?;
                written.push(path);
            }
        }
        FamilyArg::Primes => {
            let gamma = args
                .gamma
                .as_deref()
                .map(|g| parse_ratio_arg(g, "--gamma"))
                .transpose()?
                .unwrap_or_else(|| Ratio::new(1u8.into(), 2u8.into()));
            let fam: PrimeFoolingFamily =
                gen_prime_family(require(args.n, "--n")?, require(args.b, "--b")?, gamma)?;
            r.push("family", "primes");
            r.push("threshold", fam.threshold());
            r.push("size", fam.size());
            r.push("max_bit_size", fam.max_bit_size());
            r.push("bit_gate_asserted", fam.bit_gate_asserted());
            let ranks: Vec<u64> = if args.all {
                let count = fam
                    .word_count()
                    .ok_or_else(|| Failure::Input("family too large to enumerate".into()))?;
                (1..=count).collect()
            } else {
                vec![require(args.rank, "--rank")?]
            };
            for i in ranks {
                let mut elems = fam.family_word(i)?;
                if let Some(v) = args.suffix_of {
                    elems.extend(fam.family_suffix(&fam.family_word(v)?)?);
                }
                let path = if args.all {
                    format!("{out}.rank{i}")
                } else {
                    out.clone()
                };
                write_file(&path, &render_stream(Some(fam.threshold()), &elems))?;
                written.push(path);
            }
        }
        FamilyArg::Appfool => {
            let eps = parse_ratio_arg(require(args.eps.as_deref(), "--eps")?, "--eps")?;
            let cfg =
                BucketStreamConfig::new(eps, require(args.b, "--b")?, require(args.n, "--n")?)?;
            let stride = require(args.stride, "--stride")?;
            let fooling = gen_app_fooling_streams(&cfg, stride)?;
            r.push("family", "appfool");
            r.push("stride", stride);
            r.push("y", cfg.y());
            r.push("separation_verified", fooling.separation_verified);
            for (idx, stream) in fooling.streams.iter().enumerate() {
                let path = format!("{out}.s{idx}");
                write_file(&path, &render_stream(None, stream))?;
                written.push(path);
            }
        }
    }
    r.push("files", written.len());
    for (i, path) in written.iter().enumerate() {
        r.push(format!("file.{i}"), path);
    }
    print!("{}", r.render(json));
    Ok(())
}

fn write_file(path: &str, content: &str) -> Result<(), Failure> {
    std::fs::write(path, content).map_err(|e| Failure::Input(format!("writing {path}: {e}")))
}

struct ProtocolArgs {
    reduction: ReductionArg,
    eps: Option<String>,
    b: Option<u64>,
    n: Option<u64>,
    m: Option<u64>,
    i: Option<u64>,
    j: Option<u64>,
    alice: Option<String>,
    index: Option<u64>,
    a: Option<String>,
    mode: TppModeArg,
    gamma: Option<String>,
    sweep: bool,
}

fn cmd_protocol(json: bool, args: ProtocolArgs) -> CliResult {
    let mut r = Report::new();
    r.push("algorithm", "protocol");
    match args.reduction {
        ReductionArg::GtApp => {
            let eps = parse_ratio_arg(require(args.eps.as_deref(), "--eps")?, "--eps")?;
            let n = require(args.n, "--n")?;
            let b = require(args.b, "--b")?;
            let cfg = BucketStreamConfig::new(eps.clone(), b, n)?;
            let app = AppAutomaton::new(StreamParameters::new(2 * n, b)?, eps)?;
            r.push("reduction", "gt-app");
            r.push("index_bound", cfg.y() / 5);
            if args.sweep {
                push_sweep(&mut r, &sweep_gt_from_app(&app, &cfg)?);
            } else {
                let (i, j) = (require(args.i, "--i")?, require(args.j, "--j")?);
                let t = gt_from_app(&app, &cfg, i, j)?;
                r.push("alice", &t.alice_input);
                r.push("bob", &t.bob_input);
                r.push("message_bits", t.message_bits);
                r.push("decision", t.decision);
                r.push("bucket.alice", t.detail.bucket_alice);
                r.push("bucket.bob", t.detail.bucket_bob);
                r.push("bucket.gap", t.detail.gap);
                r.push("log", t.log_line("gt-app"));
            }
        }
        ReductionArg::GtTpp => {
            let n = require(args.n, "--n")?;
            let b = require(args.b, "--b")?;
            let gamma = args
                .gamma
                .as_deref()
                .map(|g| parse_ratio_arg(g, "--gamma"))
                .transpose()?
                .unwrap_or_else(|| Ratio::new(1u8.into(), 2u8.into()));
            let fam = gen_prime_family(n, b, gamma)?;
            let params = StreamParameters::new(4 * n + 2, fam.max_bit_size())?;
            let tpp = TppAutomaton::new(params, args.mode.into())?;
            r.push("reduction", "gt-tpp");
            r.push("family_size", fam.size());
            if args.sweep {
                push_sweep(&mut r, &sweep_gt_from_tpp(&tpp, &fam)?);
            } else {
                let (i, j) = (require(args.i, "--i")?, require(args.j, "--j")?);
                let t = gt_from_tpp(&tpp, &fam, i, j)?;
                r.push("alice", &t.alice_input);
                r.push("bob", &t.bob_input);
                r.push("message_bits", t.message_bits);
                r.push("decision", t.decision);
                r.push("ground_truth", t.detail.ground_truth);
                r.push("log", t.log_line("gt-tpp"));
            }
        }
        ReductionArg::IgtSwapp => {
            let eps = parse_ratio_arg(require(args.eps.as_deref(), "--eps")?, "--eps")?;
            let m = require(args.m, "--m")?;
            let b = require(args.b, "--b")?;
            let cfg = IgtConfig::new(eps.clone(), m, b)?;
            let swapp = SwappAutomaton::new(m, b, eps)?;
            r.push("reduction", "igt-swapp");
            r.push("alpha", cfg.alpha());
            r.push("c", cfg.c());
            r.push(
                "alphabet",
                cfg.alphabet()
                    .iter()
                    .map(|q| q.to_string())
                    .collect::<Vec<_>>()
                    .join(","),
            );
            if args.sweep {
                push_sweep(&mut r, &sweep_igt_from_swapp(&swapp, &cfg)?);
            } else {
                let word: Vec<RationalProbability> = require(args.alice.as_deref(), "--alice")?
                    .split(',')
                    .map(|s| parse_fraction(s.trim()).map_err(Failure::Input))
                    .collect::<Result<_, _>>()?;
                let pos = require(args.index, "--index")?;
                let cand =
                    parse_fraction(require(args.a.as_deref(), "--a")?).map_err(Failure::Input)?;
                let t = igt_from_swapp(&swapp, &cfg, &word, pos, &cand)?;
                r.push("alice", &t.alice_input);
                r.push("bob", &t.bob_input);
                r.push("message_bits", t.message_bits);
                r.push("decision", t.decision);
                r.push("p1", ratio_str(&t.detail.p1));
                r.push("p2", ratio_str(&t.detail.p2));
                r.push("log", t.log_line("igt-swapp"));
            }
        }
    }
    print!("{}", r.render(json));
    Ok(())
}

fn push_sweep(r: &mut Report, s: &SweepReport) {
    r.push("sweep.runs", s.runs);
    r.push("sweep.correct", s.correct);
    r.push("sweep.all_correct", s.all_correct());
    r.push("sweep.message_bits.max", s.max_message_bits);
    r.push(
        "sweep.message_bits.mean",
        format!("{:.2}", s.mean_message_bits()),
    );
    r.push("sweep.reference", &s.reference_description);
    r.push("sweep.reference_bits", format!("{:.2}", s.reference_bits));
}
