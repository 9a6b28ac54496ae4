use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use coded_shuffle::goldens::{self, GoldenData};
use coded_shuffle::instance::InstanceError;
use coded_shuffle::par::Exec;
use coded_shuffle::report::{self, RunError, RunOptions};
use coded_shuffle::sweep::{self, SweepConfig};
use coded_shuffle::{InstanceDescriptor, SystemInstance};
use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const SWEEP_HELP: &str = "\
CSV columns: d,sample,seed,lower_bound,uncoded,osct,fsct
  d            load bias, six decimals
  sample       sample index, or `mean` on the per-d average row
  seed         instance seed (empty on mean rows)
  remaining    normalized loads, six decimals; empty when the scheme is not selected

Config (JSON, every field optional): {\"K\":4, \"d\":[\"0\",\"1/64\",...], \"samples\":50,
\"N\":64, \"Q\":64, \"seed\":2024, \"schemes\":[\"uncoded\",\"osct\",\"fsct\"]}";

#[derive(Parser)]
#[command(name = "coded-shuffle", version, about = "Coded shuffle loads and verified transmissions for pre-set placement")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute loads for an instance and verify decoding end to end.
    Run {
        /// Instance JSON.
        instance: PathBuf,
        /// Comma-separated subset of uncoded,osct,fsct.
        #[arg(long, default_value = "uncoded,osct,fsct")]
        schemes: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Skip encode/decode verification.
        #[arg(long)]
        no_verify: bool,
        /// Write one JSON line per message block.
        #[arg(long, value_name = "PATH")]
        transcript: Option<PathBuf>,
        #[arg(long, default_value_t = 16, value_parser = clap::value_parser!(u32).range(1..=16))]
        field_bits: u32,
        /// Sub-symbols per smallest segment unit.
        #[arg(long, default_value_t = 1)]
        sub_symbols: usize,
        /// Disable data-parallel execution.
        #[arg(long)]
        sequential: bool,
    },
    /// Load-bias sweep over random instances, CSV on stdout.
    #[command(after_help = SWEEP_HELP)]
    Sweep {
        /// Sweep config JSON; defaults apply when omitted.
        config: Option<PathBuf>,
        /// Overrides the config seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        sequential: bool,
    },
    /// Check the worked examples.
    Goldens {
        /// Print golden identifiers and exit.
        #[arg(long)]
        list: bool,
        /// Directory with example1.json / example2.json overriding the embedded copies.
        #[arg(long)]
        data_dir: Option<PathBuf>,
    },
    /// Generate an instance from a descriptor JSON (`-` for stdin).
    Gen {
        descriptor: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn read_input(path: &Path) -> Result<String> {
    let mut s = String::new();
    if path == Path::new("-") {
        io::stdin().read_to_string(&mut s)?;
    } else {
        s = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    }
    Ok(s)
}

fn exec_of(sequential: bool) -> Exec {
    if sequential {
        Exec::Sequential
    } else {
        Exec::default()
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_run(
    path: &Path,
    schemes: &str,
    seed: u64,
    no_verify: bool,
    transcript: Option<&Path>,
    field_bits: u32,
    sub_symbols: usize,
    sequential: bool,
) -> Result<ExitCode> {
    let inst = match SystemInstance::load_json(path) {
        Ok(i) => i,
        Err(e @ InstanceError::Io { .. }) => return Err(e.into()),
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(ExitCode::from(2));
        }
    };
    let opts = RunOptions {
        schemes: report::parse_schemes(schemes).map_err(anyhow::Error::msg)?,
        verify: !no_verify,
        seed,
        field_bits,
        sub_symbols: sub_symbols.max(1),
        exec: exec_of(sequential),
    };
    let out = match report::run(&inst, &opts) {
        Ok(o) => o,
        Err(e @ (RunError::Decode(_) | RunError::LoadMismatch { .. } | RunError::Coverage { .. })) => {
            eprintln!("error: {e}");
            return Ok(ExitCode::from(3));
        }
        Err(e) => return Err(e.into()),
    };
    if let Some(p) = transcript {
        let f = File::create(p).with_context(|| format!("creating {}", p.display()))?;
        out.transcript.write_jsonl(BufWriter::new(f))?;
    }
    println!("{}", serde_json::to_string_pretty(&out.report)?);
    Ok(ExitCode::SUCCESS)
}

fn cmd_sweep(config: Option<&Path>, seed: Option<u64>, sequential: bool) -> Result<ExitCode> {
    let mut cfg: SweepConfig = match config {
        Some(p) => serde_json::from_str(&read_input(p)?).context("parsing sweep config")?,
        None => SweepConfig::default(),
    };
    if let Some(s) = seed {
        cfg.seed = s;
    }
    eprintln!("sweep: K={} N={} Q={} samples={} seed={} points={}", cfg.k, cfg.n, cfg.q, cfg.samples, cfg.seed, cfg.d.len());
    let rows = sweep::run_sweep(&cfg, exec_of(sequential))?;
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    sweep::write_csv(&rows, &mut out)?;
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_goldens(list: bool, data_dir: Option<&Path>) -> Result<ExitCode> {
    if list {
        for g in goldens::GOLDENS {
            println!("{}\t{}", g.id, g.about);
        }
        return Ok(ExitCode::SUCCESS);
    }
    let data = match data_dir {
        Some(d) => match GoldenData::from_dir(d) {
            Ok(data) => data,
            Err(e) => {
                println!("FAIL data: {e}");
                return Ok(ExitCode::from(1));
            }
        },
        None => GoldenData::embedded(),
    };
    let outcomes = goldens::run_goldens(&data);
    let failed = outcomes.iter().filter(|o| o.result.is_err()).count();
    for o in &outcomes {
        match &o.result {
            Ok(()) => println!("PASS {}", o.id),
            Err(why) => println!("FAIL {}: {why}", o.id),
        }
    }
    println!("{} passed, {failed} failed", outcomes.len() - failed);
    Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_gen(descriptor: &Path, output: Option<&Path>) -> Result<ExitCode> {
    let desc: InstanceDescriptor = serde_json::from_str(&read_input(descriptor)?).context("parsing descriptor")?;
    let inst = match desc.generate() {
        Ok(i) => i,
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(ExitCode::from(2));
        }
    };
    match output {
        Some(p) => inst.save_json(p)?,
        None => println!("{}", inst.to_json_string()),
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run { instance, schemes, seed, no_verify, transcript, field_bits, sub_symbols, sequential } => cmd_run(
            instance,
            schemes,
            *seed,
            *no_verify,
            transcript.as_deref(),
            *field_bits,
            *sub_symbols,
            *sequential,
        ),
        Command::Sweep { config, seed, sequential } => cmd_sweep(config.as_deref(), *seed, *sequential),
        Command::Goldens { list, data_dir } => cmd_goldens(*list, data_dir.as_deref()),
        Command::Gen { descriptor, output } => cmd_gen(descriptor, output.as_deref()),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e:#}");
        ExitCode::from(1)
    })
}
