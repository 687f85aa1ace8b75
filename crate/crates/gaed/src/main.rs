use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use gaed::automorphism::{self, SUPPORTED_EXPONENTS};
use gaed::code::{self, LinearCode};
use gaed::graph::{build_extended_pcm, prune_extended, VnKind};
use gaed::sim::{csv_string, SimConfig, Simulation};

#[derive(Parser)]
#[command(
    name = "gaed",
    version,
    about = "Generalized-automorphism ensemble decoding over BI-AWGN"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte-Carlo FER/BER sweep from a JSON config.
    Sim {
        /// JSON configuration file.
        #[arg(long)]
        config: PathBuf,
        /// Override the config's master seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the config's worker count (0 = all cores).
        #[arg(long)]
        workers: Option<usize>,
        /// Write CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit the extended PCM and its pruned form for a (T, H) pair.
    Transform {
        /// Transformation matrix file (dense 0/1 text).
        #[arg(long)]
        t: PathBuf,
        /// Parity-check matrix file (.alist or dense text).
        #[arg(long)]
        pcm: PathBuf,
        /// Accept a T that fails automorphism verification.
        #[arg(long)]
        force: bool,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print code parameters and transformation diagnostics.
    Inspect {
        /// Parity-check matrix file (.alist or dense text).
        #[arg(long)]
        pcm: PathBuf,
        /// Optional transformation matrix file (dense 0/1 text).
        #[arg(long)]
        t: Option<PathBuf>,
    },
    /// Run a brute-force ML sweep (k <= 20) from a JSON config.
    Oracle {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Sim {
            config,
            seed,
            workers,
            out,
        } => run_sim(config, seed, workers, out, false),
        Command::Oracle {
            config,
            seed,
            workers,
            out,
        } => run_sim(config, seed, workers, out, true),
        Command::Transform { t, pcm, force, out } => run_transform(t, pcm, force, out),
        Command::Inspect { pcm, t } => run_inspect(pcm, t),
    }
}

fn load_config(path: &PathBuf, seed: Option<u64>, workers: Option<usize>) -> Result<SimConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config {}", path.display()))?;
    let mut cfg = SimConfig::from_json(&text)
        .with_context(|| format!("cannot parse config {}", path.display()))?;
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    if let Some(workers) = workers {
        cfg.workers = workers;
    }
    Ok(cfg)
}

fn run_sim(
    config: PathBuf,
    seed: Option<u64>,
    workers: Option<usize>,
    out: Option<PathBuf>,
    ml_oracle: bool,
) -> Result<()> {
    let cfg = load_config(&config, seed, workers)?;
    let sim = Simulation::load(cfg)?;
    let rows = if ml_oracle {
        eprintln!("# ML oracle on {}", sim.code().n());
        sim.run_ml_sweep()?
    } else {
        eprintln!("# {}", sim.label());
        sim.run_sweep()
    };
    let csv = csv_string(&rows);
    match out {
        Some(path) => std::fs::write(&path, csv)
            .with_context(|| format!("cannot write {}", path.display()))?,
        None => print!("{csv}"),
    }
    Ok(())
}

fn run_transform(t: PathBuf, pcm: PathBuf, force: bool, out: Option<PathBuf>) -> Result<()> {
    let h = code::load_pcm(&pcm)?;
    let t_text = std::fs::read_to_string(&t)
        .with_context(|| format!("cannot read {}", t.display()))?;
    let t_matrix = code::parse_dense(&t_text)?;
    if t_matrix.rows() != h.cols() || t_matrix.cols() != h.cols() {
        bail!(
            "T is {}x{} but the code has length {}",
            t_matrix.rows(),
            t_matrix.cols(),
            h.cols()
        );
    }
    let code = LinearCode::from_pcm(h.clone())?;
    if !force && !automorphism::verify_automorphism(&t_matrix, &code) {
        bail!(
            "{} is not an automorphism of {}; pass --force to transform anyway",
            t.display(),
            pcm.display()
        );
    }

    let extended = build_extended_pcm(&t_matrix, &h);
    let pruned = prune_extended(&t_matrix, &h)?;
    let mut report = String::new();
    report.push_str("# H_iGAED\n");
    report.push_str(&code::write_dense(&extended));
    report.push_str("# H_iGAED_p\n");
    report.push_str(&code::write_dense(pruned.h_pruned()));
    report.push_str("# vn_map\n");
    for (vn, kind) in pruned.vn_map().iter().enumerate() {
        match kind {
            VnKind::Channel { bit, merged: Some(j) } => {
                report.push_str(&format!("{vn} channel {bit} merged {j}\n"));
            }
            VnKind::Channel { bit, merged: None } => {
                report.push_str(&format!("{vn} channel {bit}\n"));
            }
            VnKind::Erased { preprocessed } => {
                report.push_str(&format!("{vn} erased {preprocessed}\n"));
            }
        }
    }
    report.push_str("# readout\n");
    let readout: Vec<String> = pruned.readout().iter().map(|v| v.to_string()).collect();
    report.push_str(&readout.join(" "));
    report.push('\n');

    match out {
        Some(path) => std::fs::write(&path, report)
            .with_context(|| format!("cannot write {}", path.display()))?,
        None => print!("{report}"),
    }
    Ok(())
}

fn run_inspect(pcm: PathBuf, t: Option<PathBuf>) -> Result<()> {
    let h = code::load_pcm(&pcm)?;
    let code = LinearCode::from_pcm(h)?;
    println!("code:    {}", pcm.display());
    println!("n:       {}", code.n());
    println!("k:       {}", code.k());
    println!("rows:    {}", code.h().rows());
    println!("rank:    {}", code.rank());
    println!("rate:    {:.4}", code.rate());
    match code.min_distance() {
        Ok(d) => println!("d_min:   {d}"),
        Err(_) => println!("d_min:   skipped (k > 20)"),
    }

    if let Some(t_path) = t {
        let t_text = std::fs::read_to_string(&t_path)
            .with_context(|| format!("cannot read {}", t_path.display()))?;
        let t_matrix = code::parse_dense(&t_text)?;
        if t_matrix.rows() != code.n() || t_matrix.cols() != code.n() {
            bail!(
                "T is {}x{} but the code has length {}",
                t_matrix.rows(),
                t_matrix.cols(),
                code.n()
            );
        }
        println!("t:       {}", t_path.display());
        for exp in SUPPORTED_EXPONENTS {
            match automorphism::power(&t_matrix, exp) {
                Ok(m) => {
                    let delta = automorphism::weight_over_permutation(&m);
                    let verdict = if automorphism::verify_automorphism(&m, &code) {
                        "automorphism"
                    } else {
                        "not an automorphism"
                    };
                    println!("T^{exp:<2}     delta = {delta:<4} {verdict}");
                }
                Err(_) => println!("T^{exp:<2}     singular"),
            }
        }
    }
    Ok(())
}
