use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use locpriv::experiments::{self, ScenarioConfig};
use locpriv::{Error, Result};

#[derive(Parser)]
#[command(name = "locpriv", version, about = "Privacy-region obfuscation and home-identification attacks")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON scenario config.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Master seed (overrides the config).
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,
    /// Output directory (overrides the config).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    /// Replicates per setting (overrides the config).
    #[arg(long, global = true, value_name = "N")]
    replicates: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Two-balls vs calibrated random-radius over the comparison settings.
    Table1,
    /// Posterior MSE against the number of tracks.
    Curve,
    /// Match random-radius SP moments to each two-balls setting.
    Calibrate,
    /// One attack on simulated exits.
    Attack,
    /// Cut recorded tracks (`t,x,y` CSV) of one user.
    Obfuscate {
        /// Track files, in addition to those in the config.
        tracks: Vec<PathBuf>,
    },
    /// Attack wall time against the number of tracks.
    Bench,
}

fn load_config(c: &Common) -> Result<ScenarioConfig> {
    let mut cfg = match (&c.config, c.seed) {
        (Some(path), seed) => ScenarioConfig::load(path, seed)?,
        (None, Some(seed)) => ScenarioConfig::new(seed),
        (None, None) => {
            return Err(Error::Config(
                "a seed is required: pass --seed or set master_seed in --config".into(),
            ))
        }
    };
    if let Some(n) = c.replicates {
        cfg.n_replicates = n;
    }
    if let Some(dir) = &c.out {
        cfg.out_dir = dir.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.common.threads {
        if n == 0 {
            return Err(Error::Config("--threads must be >= 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(e.to_string()))?;
    }
    let mut cfg = load_config(&cli.common)?;
    let out = cfg.out_dir.clone();
    match cli.command {
        Command::Table1 => {
            let res = experiments::run_table1(&cfg)?;
            res.write(&out)?;
            println!("setting  r  R  alpha beta  mean_sp  tb_median  rr_median  ratio");
            for m in &res.summary {
                let p = m.params;
                println!(
                    "{:>7} {:>2} {:>2} {:>6} {:>4} {:>8.2} {:>10.3} {:>10.3} {:>6.1}",
                    m.setting,
                    p.r,
                    p.big_r,
                    p.alpha,
                    p.beta,
                    m.sp_mean,
                    m.tb_median,
                    m.rr_median,
                    m.ratio()
                );
            }
            res.check_diagnostics(&cfg)?;
        }
        Command::Curve => {
            let res = experiments::run_curve(&cfg)?;
            res.write(&out)?;
            println!("strategy    n  mse_median  mse_q05  mse_q95");
            for r in &res.summary {
                println!("{:>8} {:>4} {:>11.4} {:>8.4} {:>8.4}", r.strategy, r.n, r.median, r.q05, r.q95);
            }
            res.check_diagnostics(&cfg)?;
        }
        Command::Calibrate => {
            let res = experiments::run_calibrate(&cfg)?;
            res.write(&out)?;
            for c in &res.rows {
                let g = c.result.matched_gamma;
                println!(
                    "setting {}: sp mean {:.4} var {:.4} -> Gamma({:.4}, {:.4})",
                    c.setting, c.result.sp_mean, c.result.sp_var, g.alpha, g.beta
                );
            }
        }
        Command::Attack => {
            let res = experiments::run_attack(&cfg)?;
            res.write(&out)?;
            let r = &res.report;
            println!(
                "{} n={} method={:?} mean=({:.4}, {:.4}) mse={:.5} time={:.3}s",
                res.obs.strategy.tag(),
                res.obs.len(),
                r.method,
                r.posterior_mean.x,
                r.posterior_mean.y,
                r.posterior_mse,
                r.wall_time
            );
            res.check_diagnostics(&cfg)?;
        }
        Command::Obfuscate { tracks } => {
            cfg.obfuscate.tracks.extend(tracks);
            let res = experiments::run_obfuscate(&cfg)?;
            res.write(&out)?;
            print!("{}", res.report_csv());
        }
        Command::Bench => {
            let res = experiments::run_bench(&cfg)?;
            res.write(&out)?;
            for tag in ["TB", "RR"] {
                for (n, t) in res.medians(tag) {
                    println!("{tag} n={n:<4} median {t:.4}s");
                }
                let (slope, intercept) = res.linear_fit(tag);
                println!("{tag} fit: {intercept:.4}s + {slope:.2e}s per track");
            }
        }
    }
    eprintln!("outputs written to {}", out.display());
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
