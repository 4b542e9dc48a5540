//! Experiment runner for the wiretap-with-discussion simulator.
//!
//! Subcommands: `run` (Monte Carlo reliability), `secrecy` (exhaustive view
//! enumeration), `bounds` (formula evaluation), `export-smt` (transcript ↔
//! wire-transcript conversion), `hash-check` and `ext-check` (standalone
//! exhaustive property sweeps).
//!
//! Exit codes: 0 when all checks pass, 1 when a measured value violates an
//! analytic bound, 2 on configuration errors. Given the same master seed,
//! output files are byte-identical across runs; `AWTP_PD_THREADS` caps the
//! worker pool without affecting results.

mod config;
mod output;

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use awtp_pd::adversary::{AdversaryConfig, AdversaryKind};
use awtp_pd::analysis::{
    estimate_reliability, min_delta_two_round, rate_upper_bound, smt_tr_lower_bound, table1_rate,
    verify_secrecy_exhaustive, BoundsQuery, Representation, SecurityReport, Table1Protocol,
    TrBoundVariant,
};
use awtp_pd::channel::{ReadWriteSets, Transcript};
use awtp_pd::extractor::uniformity_sweep;
use awtp_pd::field::PrimeModulus;
use awtp_pd::hash::max_collision_count;
use awtp_pd::protocol::{run_protocol, Message, ProtocolConfig};
use awtp_pd::smt::{awtp_to_smt, smt_to_awtp, WireTranscript};
use awtp_pd::tape::{derive_seed, SeededTape};

use crate::config::{load_file_config, parse_index_set, parse_ratio, parse_values, FileConfig};
use crate::output::{emit, render_bounds, render_results, BoundRow, Format, ResultRow};

type CliError = Box<dyn std::error::Error>;

enum Status {
    Pass,
    BoundViolated,
}

#[derive(Parser)]
#[command(name = "awtp-pd", version, about = "Adversarial wiretap with public discussion: simulator and analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo reliability estimation against a chosen adversary.
    Run(RunArgs),
    /// Exhaustive secrecy verification over all honest tapes.
    Secrecy(SecrecyArgs),
    /// Evaluate rate, round-complexity and transmission-rate bounds.
    Bounds(BoundsArgs),
    /// Convert transcripts to wire transcripts and back.
    ExportSmt(ExportArgs),
    /// Exhaustive collision-count sweep of the hash family.
    HashCheck(HashCheckArgs),
    /// Exhaustive uniformity sweep of the extractor.
    ExtCheck(ExtCheckArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// JSON experiment description; explicit flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Codeword length N.
    #[arg(long = "N")]
    n: Option<usize>,
    /// Field elements per codeword component.
    #[arg(long)]
    u: Option<usize>,
    /// Read budget rho_r, as "p/q" or a decimal.
    #[arg(long = "rho-r")]
    rho_r: Option<String>,
    /// Write budget rho_w.
    #[arg(long = "rho-w")]
    rho_w: Option<String>,
    /// Declared touched-fraction budget rho; defaults to max(rho_r, rho_w).
    #[arg(long)]
    rho: Option<String>,
    /// Prime modulus override (default: smallest prime above 2uN²).
    #[arg(long)]
    q: Option<u64>,
    /// Message length override in field elements.
    #[arg(long)]
    ell: Option<usize>,
    /// Adversary: passive | adv1 | substitution.
    #[arg(long)]
    adversary: Option<String>,
    /// Restricted read=write set: indices like "0,1", or "random".
    #[arg(long)]
    sets: Option<String>,
    /// Read set: indices or "random" (use with --write-set).
    #[arg(long = "read-set")]
    read_set: Option<String>,
    /// Write set: indices or "random" (use with --read-set).
    #[arg(long = "write-set")]
    write_set: Option<String>,
    /// Master seed; every tape derives from it.
    #[arg(long)]
    seed: Option<u64>,
    /// Measure through the wire representation instead of natively.
    #[arg(long)]
    smt: bool,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Output file (default: stdout).
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Number of Monte Carlo executions.
    #[arg(long)]
    trials: Option<u64>,
    /// Also write trial 0's transcript to this file.
    #[arg(long = "transcript-out")]
    transcript_out: Option<PathBuf>,
}

#[derive(Args)]
struct SecrecyArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// First message, comma-separated field values of length ell.
    #[arg(long)]
    m1: Option<String>,
    /// Second message.
    #[arg(long)]
    m2: Option<String>,
    /// Cap on the number of honest tapes to enumerate.
    #[arg(long)]
    budget: Option<u128>,
}

#[derive(Args)]
struct BoundsArgs {
    /// Touched fraction for the rate upper bound.
    #[arg(long)]
    rho: Option<f64>,
    /// Secrecy loss epsilon.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Failure probability delta.
    #[arg(long)]
    delta: Option<f64>,
    /// Total discussion bits n.
    #[arg(long = "pd-bits")]
    pd_bits: Option<f64>,
    /// log2 of the wiretap/wire alphabet.
    #[arg(long = "alphabet-bits")]
    alphabet_bits: Option<f64>,
    /// Emit the four comparison-table rows (needs --t, --N; optional --xi).
    #[arg(long)]
    table1: bool,
    /// Corrupted wires t.
    #[arg(long)]
    t: Option<u64>,
    /// Wires N.
    #[arg(long = "N")]
    n: Option<u64>,
    /// Rate slack xi.
    #[arg(long)]
    xi: Option<f64>,
    /// Minimum failure rate of two-round shapes (needs --M).
    #[arg(long = "two-round")]
    two_round: bool,
    /// Message space size |M|.
    #[arg(long = "M")]
    message_space: Option<f64>,
    /// Transmission-rate lower bound: epsec | perf | ggo10.
    #[arg(long = "smt-tr")]
    smt_tr: Option<String>,
    /// log2 |M| for the ggo10 bound.
    #[arg(long = "message-bits")]
    message_bits: Option<f64>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ExportArgs {
    /// Input transcript file.
    #[arg(long)]
    input: PathBuf,
    /// Output file.
    #[arg(long)]
    output: PathBuf,
    /// Convert a wire transcript back to a channel transcript.
    #[arg(long)]
    reverse: bool,
}

#[derive(Args)]
struct HashCheckArgs {
    /// Moduli to sweep.
    #[arg(long = "q", default_value = "5,7,11")]
    q_list: String,
    /// Largest input length to sweep.
    #[arg(long = "max-len", default_value_t = 3)]
    max_len: usize,
}

#[derive(Args)]
struct ExtCheckArgs {
    /// Moduli to sweep.
    #[arg(long = "q", default_value = "5,7,11")]
    q_list: String,
    /// Largest source length to sweep.
    #[arg(long = "max-n", default_value_t = 3)]
    max_n: usize,
}

fn main() {
    let cli = Cli::parse();
    if let Ok(threads) = std::env::var("AWTP_PD_THREADS") {
        match threads.parse::<usize>() {
            Ok(k) if k > 0 => {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(k)
                    .build_global();
            }
            _ => {
                eprintln!("error: AWTP_PD_THREADS must be a positive integer");
                std::process::exit(2);
            }
        }
    }
    let outcome = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Secrecy(args) => cmd_secrecy(args),
        Command::Bounds(args) => cmd_bounds(args),
        Command::ExportSmt(args) => cmd_export_smt(args),
        Command::HashCheck(args) => cmd_hash_check(args),
        Command::ExtCheck(args) => cmd_ext_check(args),
    };
    std::process::exit(match outcome {
        Ok(Status::Pass) => 0,
        Ok(Status::BoundViolated) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    })
}

/// Merged, validated experiment parameters.
struct Experiment {
    config: ProtocolConfig,
    sets: ReadWriteSets,
    kind: AdversaryKind,
    seed: u64,
    budget: u128,
    representation: Representation,
}

impl Experiment {
    fn build(common: &CommonArgs) -> Result<(Experiment, FileConfig), CliError> {
        let file = match &common.config {
            Some(path) => load_file_config(path)?,
            None => FileConfig::default(),
        };
        let n = common.n.or(file.n).ok_or("missing --N")?;
        let u = common.u.or(file.u).ok_or("missing --u")?;
        let rho_r = parse_ratio(pick(&common.rho_r, &file.rho_r).ok_or("missing --rho-r")?)?;
        let rho_w = parse_ratio(pick(&common.rho_w, &file.rho_w).ok_or("missing --rho-w")?)?;
        let rho = match pick(&common.rho, &file.rho) {
            Some(s) => parse_ratio(s)?,
            None => rho_r.max(rho_w),
        };
        let q = match common.q.or(file.q) {
            Some(q) => PrimeModulus::new(q)?,
            None => PrimeModulus::select(u as u64, n as u64),
        };
        let config = match common.ell.or(file.ell) {
            Some(ell) => ProtocolConfig::explicit(n, u, q, rho_r, rho_w, rho, ell)?,
            None => ProtocolConfig::new(n, u, rho_r, rho_w, rho)?.with_modulus(q)?,
        };
        let kind_name = pick(&common.adversary, &file.adversary).ok_or("missing --adversary")?;
        let kind = AdversaryKind::parse(kind_name)
            .ok_or_else(|| format!("unknown adversary {kind_name:?}"))?;
        let seed = common.seed.or(file.seed).unwrap_or(0);

        let mut set_tape = SeededTape::new(derive_seed(seed, 4, 0));
        let restricted_spec = pick(&common.sets, &file.sets);
        let read_spec = pick(&common.read_set, &file.read_set);
        let write_spec = pick(&common.write_set, &file.write_set);
        let sets = match (restricted_spec, read_spec, write_spec) {
            (Some(spec), None, None) => match spec {
                "random" => ReadWriteSets::random(n, rho_r, rho_w, true, &mut set_tape)?,
                list => ReadWriteSets::restricted(n, parse_index_set(list)?)?,
            },
            (None, Some(r), Some(w)) => match (r, w) {
                ("random", "random") => {
                    ReadWriteSets::random(n, rho_r, rho_w, false, &mut set_tape)?
                }
                ("random", _) | (_, "random") => {
                    return Err("mixing random and explicit sets is not supported".into())
                }
                (r, w) => ReadWriteSets::new(n, parse_index_set(r)?, parse_index_set(w)?)?,
            },
            (None, None, None) => ReadWriteSets::random(n, rho_r, rho_w, true, &mut set_tape)?,
            _ => return Err("give either --sets or both --read-set and --write-set".into()),
        };
        if !sets.fits_budgets(rho_r, rho_w) {
            return Err(format!(
                "sets exceed budgets: |read|={}, |write|={} vs floor(rho*N)",
                sets.read().len(),
                sets.write().len()
            )
            .into());
        }
        if sets.union_fraction() > rho {
            return Err(format!(
                "sets touch {} of N components, above the declared rho = {rho}",
                sets.union_fraction()
            )
            .into());
        }
        let budget = file.budget.unwrap_or(10_000_000);
        let representation = if common.smt {
            Representation::Smt
        } else {
            Representation::Native
        };
        Ok((
            Experiment {
                config,
                sets,
                kind,
                seed,
                budget,
                representation,
            },
            file,
        ))
    }

    fn base_row(&self, kind: &'static str) -> ResultRow {
        let config = &self.config;
        ResultRow {
            kind,
            n: config.n(),
            u: config.u(),
            q: config.q().get(),
            rho_r: config.rho_r().to_string(),
            rho_w: config.rho_w().to_string(),
            rho: config.rho().to_string(),
            ell: config.message_len(),
            adversary: self.kind.name().to_string(),
            representation: match self.representation {
                Representation::Native => "native",
                Representation::Smt => "smt",
            },
            seed: self.seed,
            trials: None,
            enumeration_size: None,
            measured_sd: None,
            sd_exact_numer: None,
            sd_exact_denom: None,
            measured_failure_rate: None,
            failures: None,
            bound_sd: None,
            bound_failure_rate: None,
            rate: config.rate().to_string(),
            rc_awtp: 1,
            rc_pd: 2,
            status: String::new(),
        }
    }
}

fn pick<'a>(flag: &'a Option<String>, file: &'a Option<String>) -> Option<&'a str> {
    flag.as_deref().or(file.as_deref())
}

fn cmd_run(args: RunArgs) -> Result<Status, CliError> {
    let (exp, file) = Experiment::build(&args.common)?;
    let trials = args.trials.or(file.trials).unwrap_or(10_000);
    let started = Instant::now();
    let report = estimate_reliability(
        &exp.config,
        exp.kind,
        &exp.sets,
        trials,
        exp.seed,
        exp.representation,
    )?;
    eprintln!(
        "run: {trials} trials, {} failures, wall time {:?}",
        report.failures.unwrap_or(0),
        started.elapsed()
    );

    if let Some(path) = &args.transcript_out {
        let transcript = replay_trial0(&exp)?;
        std::fs::write(path, transcript.encode())?;
    }

    // Three binomial standard deviations of sampling slack above the bound.
    let ok = report.failure_within_bound(3.0).unwrap_or(true);
    let mut row = exp.base_row("run");
    fill_report(&mut row, &report);
    row.status = if ok { "ok".into() } else { "bound_violated".into() };
    emit(
        args.common.output.as_deref(),
        &render_results(&[row], args.common.format),
    )?;
    Ok(if ok { Status::Pass } else { Status::BoundViolated })
}

fn replay_trial0(exp: &Experiment) -> Result<Transcript, CliError> {
    let mut alice = SeededTape::new(derive_seed(exp.seed, 0, 0));
    let mut bob = SeededTape::new(derive_seed(exp.seed, 1, 0));
    let mut msg_tape = SeededTape::new(derive_seed(exp.seed, 2, 0));
    let adversary =
        AdversaryConfig::new(exp.kind, exp.sets.clone(), derive_seed(exp.seed, 3, 0));
    let message = Message::uniform(&exp.config, &mut msg_tape);
    let (_, transcript) = run_protocol(&exp.config, &message, &adversary, &mut alice, &mut bob)?;
    Ok(transcript)
}

fn cmd_secrecy(args: SecrecyArgs) -> Result<Status, CliError> {
    let (exp, file) = Experiment::build(&args.common)?;
    let m1 = parse_values(pick(&args.m1, &file.m1).ok_or("missing --m1")?)?;
    let m2 = parse_values(pick(&args.m2, &file.m2).ok_or("missing --m2")?)?;
    let m1 = Message::from_values(&exp.config, &m1)?;
    let m2 = Message::from_values(&exp.config, &m2)?;
    let budget = args.budget.unwrap_or(exp.budget);
    let adversary = AdversaryConfig::new(
        exp.kind,
        exp.sets.clone(),
        derive_seed(exp.seed, 3, 0),
    );
    let started = Instant::now();
    let report = verify_secrecy_exhaustive(
        &exp.config,
        &m1,
        &m2,
        &adversary,
        budget,
        exp.representation,
    )?;
    eprintln!(
        "secrecy: enumerated {} honest tapes per message, wall time {:?}",
        report.enumeration_size.unwrap_or(0),
        started.elapsed()
    );

    let sd_zero = report.sd_exact.map(|f| f.is_zero()).unwrap_or(false);
    let condition = exp.config.satisfies_secrecy_condition();
    let (status, exit) = match (condition, sd_zero) {
        (true, true) => ("ok", Status::Pass),
        (true, false) => ("bound_violated", Status::BoundViolated),
        (false, false) => ("expected_leak", Status::Pass),
        (false, true) => ("ok", Status::Pass),
    };
    let mut row = exp.base_row("secrecy");
    fill_report(&mut row, &report);
    row.status = status.into();
    emit(
        args.common.output.as_deref(),
        &render_results(&[row], args.common.format),
    )?;
    Ok(exit)
}

fn fill_report(row: &mut ResultRow, report: &SecurityReport) {
    row.trials = report.trials;
    row.enumeration_size = report.enumeration_size.map(|s| s.to_string());
    row.measured_sd = report.measured_sd;
    row.sd_exact_numer = report.sd_exact.map(|f| f.numer.to_string());
    row.sd_exact_denom = report.sd_exact.map(|f| f.denom.to_string());
    row.measured_failure_rate = report.measured_failure_rate;
    row.failures = report.failures;
    row.bound_sd = report.bound_sd;
    row.bound_failure_rate = report.bound_failure_rate;
}

fn cmd_bounds(args: BoundsArgs) -> Result<Status, CliError> {
    let mut rows = Vec::new();
    if args.table1 {
        let t = args.t.ok_or("--table1 needs --t")?;
        let n = args.n.ok_or("--table1 needs --N")?;
        let xi = args.xi.unwrap_or(0.0);
        for protocol in Table1Protocol::ALL {
            rows.push(BoundRow {
                bound: format!("table1_{}", protocol.name()),
                params: format!("t={t};N={n};xi={xi}"),
                value: table1_rate(protocol, t, n, xi)?,
            });
        }
    } else if args.two_round {
        let m = args.message_space.ok_or("--two-round needs --M")?;
        rows.push(BoundRow {
            bound: "min_delta_two_round".into(),
            params: format!("M={m}"),
            value: min_delta_two_round(m)?,
        });
    } else if let Some(variant) = &args.smt_tr {
        let variant_enum = match variant.as_str() {
            "epsec" => TrBoundVariant::EpsilonSecrecy,
            "perf" => TrBoundVariant::PerfectSecrecy,
            "ggo10" => TrBoundVariant::Ggo10,
            other => return Err(format!("unknown transmission-rate bound {other:?}").into()),
        };
        let query = BoundsQuery {
            rho: 0.0,
            epsilon: args.epsilon.unwrap_or(0.0),
            delta: args.delta.unwrap_or(0.0),
            pd_bits: args.pd_bits.unwrap_or(0.0),
            alphabet_bits: args.alphabet_bits.unwrap_or(0.0),
            wires: args.n.ok_or("--smt-tr needs --N")?,
            corrupted: args.t.ok_or("--smt-tr needs --t")?,
            message_bits: args.message_bits.unwrap_or(0.0),
        };
        rows.push(BoundRow {
            bound: format!("smt_tr_{variant}"),
            params: format!(
                "N={};t={};epsilon={};delta={};pd_bits={};alphabet_bits={};message_bits={}",
                query.wires,
                query.corrupted,
                query.epsilon,
                query.delta,
                query.pd_bits,
                query.alphabet_bits,
                query.message_bits
            ),
            value: smt_tr_lower_bound(&query, variant_enum)?,
        });
    } else {
        let rho = args.rho.ok_or("give --rho (or one of --table1/--two-round/--smt-tr)")?;
        let query = BoundsQuery {
            rho,
            epsilon: args.epsilon.unwrap_or(0.0),
            delta: 0.0,
            pd_bits: args.pd_bits.unwrap_or(0.0),
            alphabet_bits: args.alphabet_bits.unwrap_or(0.0),
            wires: 0,
            corrupted: 0,
            message_bits: 0.0,
        };
        rows.push(BoundRow {
            bound: "rate_upper_bound".into(),
            params: format!(
                "rho={rho};epsilon={};pd_bits={};alphabet_bits={}",
                query.epsilon, query.pd_bits, query.alphabet_bits
            ),
            value: rate_upper_bound(&query)?,
        });
    }
    emit(args.output.as_deref(), &render_bounds(&rows, args.format))?;
    Ok(Status::Pass)
}

fn cmd_export_smt(args: ExportArgs) -> Result<Status, CliError> {
    let bytes = std::fs::read(&args.input)?;
    let converted = if args.reverse {
        smt_to_awtp(&WireTranscript::decode(&bytes)?)?.encode()
    } else {
        awtp_to_smt(&Transcript::decode(&bytes)?)?.encode()
    };
    std::fs::write(&args.output, converted)?;
    Ok(Status::Pass)
}

fn parse_q_list(s: &str) -> Result<Vec<PrimeModulus>, CliError> {
    s.split(',')
        .map(|part| {
            let q: u64 = part
                .trim()
                .parse()
                .map_err(|_| format!("invalid modulus {part:?}"))?;
            Ok(PrimeModulus::new(q)?)
        })
        .collect()
}

fn cmd_hash_check(args: HashCheckArgs) -> Result<Status, CliError> {
    let mut ok = true;
    for q in parse_q_list(&args.q_list)? {
        for len in 1..=args.max_len {
            let (max, saturated) = max_collision_count(q, len);
            let bound_ok = max <= len && (len < 2 || saturated);
            println!("q={q} len={len} max_collisions={max} saturated={saturated}");
            ok &= bound_ok;
        }
    }
    Ok(if ok { Status::Pass } else { Status::BoundViolated })
}

fn cmd_ext_check(args: ExtCheckArgs) -> Result<Status, CliError> {
    for q in parse_q_list(&args.q_list)? {
        match uniformity_sweep(q, args.max_n) {
            Ok(cases) => println!("q={q} max_n={} cases={cases} uniform=true", args.max_n),
            Err(awtp_pd::extractor::ExtractorError::NotUniform { n, m }) => {
                println!("q={q} n={n} m={m} uniform=false");
                return Ok(Status::BoundViolated);
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(Status::Pass)
}
