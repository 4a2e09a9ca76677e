//! Command-line runner for the protocol simulator.
//!
//! Exit codes: 0 success, 2 usage or validation failure, 3 I/O failure.
//! All output is deterministic given the flags and seed.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use entcert_core::bits::BitString;
use entcert_core::cert::{issue_batch, verify, Certificate, MasterKey};
use entcert_core::harness::{run_trials, AggregateStats, Scenario, ScenarioConfig};
use entcert_core::rng::{split_seed, RandomSource};

#[derive(Parser)]
#[command(name = "entcert", version, about = "Three-stage exchange with entangled-pair certificates: scenario runner and demos")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario described by a JSON config file.
    Run(RunArgs),
    /// Print the worked certificate-verification example.
    Demo,
    /// Measure Bell-pair correlation statistics for both parities.
    BellTest(BellTestArgs),
    /// Sweep certificate lengths against the guessing MITM and tabulate
    /// detection rates next to the analytic 1 - 2^-N.
    AttackSweep(SweepArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Path to the scenario config (JSON, exactly the ScenarioConfig fields).
    #[arg(long)]
    config: PathBuf,
    /// Override the config's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the config's trial count.
    #[arg(long)]
    trials: Option<usize>,
    /// Write per-trial records and the summary record to this file.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override any config field, e.g. --set message_len=32. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Args)]
struct BellTestArgs {
    /// Pairs to measure per Bell type.
    #[arg(long, default_value_t = 10_000)]
    pairs: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args)]
struct SweepArgs {
    /// Comma-separated certificate lengths, e.g. 1,4,8.
    #[arg(long = "n-values", default_value = "1,2,4,8")]
    n_values: String,
    #[arg(long, default_value_t = 20_000)]
    trials: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long = "message-len", default_value_t = 16)]
    message_len: usize,
}

enum CliError {
    Usage(String),
    Io(String),
}

impl From<entcert_core::Error> for CliError {
    fn from(e: entcert_core::Error) -> Self {
        match e {
            entcert_core::Error::Io(io) => CliError::Io(io.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Demo => cmd_demo(),
        Command::BellTest(args) => cmd_bell_test(args),
        Command::AttackSweep(args) => cmd_attack_sweep(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn load_config(args: &RunArgs) -> Result<ScenarioConfig, CliError> {
    let text = fs::read_to_string(&args.config)
        .map_err(|e| CliError::Io(format!("{}: {e}", args.config.display())))?;
    let mut value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("{}: {e}", args.config.display())))?;
    let obj = value
        .as_object_mut()
        .ok_or_else(|| CliError::Usage("config must be a JSON object".into()))?;

    if let Some(seed) = args.seed {
        obj.insert("seed".into(), seed.into());
    }
    if let Some(trials) = args.trials {
        obj.insert("trials".into(), trials.into());
    }
    for pair in &args.set {
        let (key, raw) = pair
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("--set expects KEY=VALUE, got {pair:?}")))?;
        // Try the value as JSON first so numbers and booleans come through
        // typed; fall back to a plain string (enum variants, bit strings).
        let parsed = serde_json::Value::from_str(raw)
            .unwrap_or_else(|_| serde_json::Value::String(raw.to_string()));
        obj.insert(key.to_string(), parsed);
    }

    let config: ScenarioConfig = serde_json::from_value(value)
        .map_err(|e| CliError::Usage(format!("config: {e}")))?;
    config.validate()?;
    Ok(config)
}

fn format_opt_rate(rate: Option<f64>, ci: Option<f64>) -> String {
    match (rate, ci) {
        (Some(r), Some(c)) => format!("{r:.6} ± {c:.6}"),
        _ => "n/a".to_string(),
    }
}

fn print_summary(scenario: Scenario, stats: &AggregateStats) {
    let name = serde_json::to_value(scenario)
        .expect("scenario serializes")
        .as_str()
        .expect("scenario is a string")
        .to_string();
    println!("scenario        {name}");
    println!("trials          {}", stats.trials);
    println!(
        "detection_rate  {}",
        format_opt_rate(stats.detection_rate, stats.detection_ci)
    );
    println!(
        "mean_bob_ber    {:.6} ± {:.6}",
        stats.mean_bob_ber, stats.bob_ber_ci
    );
    println!(
        "mean_eve_match  {}",
        format_opt_rate(stats.mean_eve_match, stats.eve_match_ci)
    );
}

fn cmd_run(args: RunArgs) -> Result<(), CliError> {
    let config = load_config(&args)?;
    let (results, stats) = run_trials(&config)?;
    if let Some(path) = &args.out {
        let file = fs::File::create(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        entcert_core::harness::write_records(file, &results, &stats)?;
    }
    print_summary(config.scenario, &stats);
    Ok(())
}

fn print_case(label: &str, key: &MasterKey, alice: &Certificate, bob: &Certificate) {
    let auth = verify(key, alice, bob).expect("fixture lengths match");
    let verdict = if auth.authentic {
        "Authentic"
    } else {
        "Not Authentic"
    };
    println!("{label}");
    println!("  Master key:           {}", key.bits());
    println!("  Alice's certificate:  {}", alice.bits());
    println!("  Bob's certificate:    {}", bob.bits());
    println!("  XOR residue:          {}", auth.residue);
    println!("  Verdict:              {verdict}");
}

fn cmd_demo() -> Result<(), CliError> {
    let key = MasterKey::from_bits("1001".parse().expect("fixture key"));
    let (alice_view, _bob_view) = issue_batch(&key);
    let pair_names: Vec<String> = (0..alice_view.len())
        .map(|k| format!("β0{}", alice_view.pair(k).bell().parity()))
        .collect();

    println!("Entangled-certificate authentication, worked example");
    println!("Issued Bell pairs:      [{}]", pair_names.join(" "));
    println!();
    print_case(
        "Case 1",
        &key,
        &Certificate::from_bits("0101".parse().expect("fixture")),
        &Certificate::from_bits("1100".parse().expect("fixture")),
    );
    println!();
    print_case(
        "Case 2",
        &key,
        &Certificate::from_bits("0001".parse().expect("fixture")),
        &Certificate::from_bits("1100".parse().expect("fixture")),
    );
    Ok(())
}

fn cmd_bell_test(args: BellTestArgs) -> Result<(), CliError> {
    use entcert_core::cert::collapse_certificate;

    println!("pairs per type  {}", args.pairs);
    for parity in [0u8, 1u8] {
        let mut equal = 0u64;
        let mut ones_a = 0u64;
        for i in 0..args.pairs {
            let mut rng =
                RandomSource::from_seed(split_seed(args.seed, (parity as u64) << 32 | i));
            let key = MasterKey::from_bits(
                BitString::from_bits([parity]).expect("parity is a bit"),
            );
            let (alice, bob) = issue_batch(&key);
            let ca = collapse_certificate(&alice, &mut rng)?;
            let cb = collapse_certificate(&bob, &mut rng)?;
            equal += (ca.bits().bit(0) == cb.bits().bit(0)) as u64;
            ones_a += ca.bits().bit(0) as u64;
        }
        println!(
            "parity {parity}: equal-outcome fraction {:.6}, marginal P(1) {:.6}",
            equal as f64 / args.pairs as f64,
            ones_a as f64 / args.pairs as f64
        );
    }
    Ok(())
}

fn cmd_attack_sweep(args: SweepArgs) -> Result<(), CliError> {
    let n_values: Vec<usize> = args
        .n_values
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| CliError::Usage(format!("invalid certificate length {s:?}")))
        })
        .collect::<Result<_, _>>()?;
    if n_values.is_empty() {
        return Err(CliError::Usage("n-values must be nonempty".into()));
    }
    if n_values.contains(&0) {
        return Err(CliError::Usage(
            "invalid certificate length 0: the guessing attack needs at least 1 bit".into(),
        ));
    }

    println!(" N  empirical  analytic   ±95%");
    for n in n_values {
        let config = ScenarioConfig {
            scenario: Scenario::MitmGuessCert,
            message_len: args.message_len,
            cert_len: n,
            trials: args.trials,
            seed: args.seed,
            angles: None,
            placement_mode: entcert_core::cert::PlacementMode::KeyedBlock,
            intercept_stage: None,
        };
        let (_, stats) = run_trials(&config)?;
        let analytic = 1.0 - 0.5f64.powi(n as i32);
        println!(
            "{n:>2}  {:.6}   {analytic:.6}   {:.6}",
            stats.detection_rate.expect("certified scenario reports detection"),
            stats.detection_ci.expect("certified scenario reports a ci"),
        );
    }
    Ok(())
}
