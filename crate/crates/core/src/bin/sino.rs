use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sino::app::{self, ExperimentConfig};
use sino::{Result, SinoError};

#[derive(Parser)]
#[command(name = "sino", version, about = "Spectral-inspired neural operator experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate the train/val/test trajectories.
    Generate(Common),
    /// Train a model on the generated data.
    Train {
        #[command(flatten)]
        common: Common,
        /// Continue from `train/last.ckpt` if present.
        #[arg(long)]
        resume: bool,
    },
    /// Evaluate a checkpoint on the test split.
    Evaluate {
        #[command(flatten)]
        common: Common,
        /// Defaults to `<out>/train/best.ckpt`.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
    /// Train and test the full model and its five ablations.
    Ablate(Common),
    /// Roll a trained teacher out into a synthetic dataset.
    DistillGenerate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        teacher: PathBuf,
        #[arg(long)]
        n_traj: Option<usize>,
    },
    /// Train and evaluate over a width × K grid or training-set sizes.
    Sweep(Common),
}

#[derive(Args)]
struct Common {
    /// TOML experiment file.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// E1 … E7, or E1-desk … E7-desk.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Training seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    no_pi: bool,
    #[arg(long)]
    no_filter: bool,
    #[arg(long)]
    no_freq2vec: bool,
    #[arg(long)]
    no_linear: bool,
    #[arg(long)]
    euler: bool,
}

impl Common {
    fn load(&self) -> Result<ExperimentConfig> {
        let mut cfg = match (&self.config, &self.preset) {
            (Some(path), _) => ExperimentConfig::load(path)?,
            (None, Some(name)) => ExperimentConfig::preset(name)?,
            (None, None) => return Err(SinoError::Config("give --config PATH or --preset NAME".into())),
        };
        if let Some(out) = &self.out {
            cfg.out_dir = out.clone();
        }
        if let Some(seed) = self.seed {
            cfg.train.seed = seed;
        }
        let a = &mut cfg.model.ablation;
        a.no_pi |= self.no_pi;
        a.no_filter |= self.no_filter;
        a.no_freq2vec |= self.no_freq2vec;
        a.no_linear |= self.no_linear;
        a.euler_time |= self.euler;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate(c) => {
            let cfg = c.load()?;
            let m = app::cmd_generate(&cfg)?;
            for f in &m.files {
                println!("{} {} trajectories crc32 {}", f.file, f.trajectories, f.crc32);
            }
        }
        Command::Train { common, resume } => {
            let cfg = common.load()?;
            let s = app::cmd_train(&cfg, resume)?;
            println!("best validation rel l2 {:.6e}", s.best_val);
            println!("{}", s.best.display());
        }
        Command::Evaluate { common, checkpoint } => {
            let cfg = common.load()?;
            let ckpt = checkpoint.unwrap_or_else(|| app::train_dir(&cfg).join("best.ckpt"));
            let (_, s) = app::cmd_evaluate(&cfg, &ckpt)?;
            println!("test rel l2 {:.6e} ({} failed rollouts)", s.rel_l2, s.failures);
            if let (Some(n), Some(f)) = (s.superres_native, s.superres_fine) {
                println!("super-resolution: native {n:.6e}, fine {f:.6e}");
            }
        }
        Command::Ablate(c) => {
            let cfg = c.load()?;
            print!("{}", app::ablation_csv(&app::cmd_ablate(&cfg)?));
        }
        Command::DistillGenerate { common, teacher, n_traj } => {
            let cfg = common.load()?;
            let n = n_traj.unwrap_or(cfg.distill.n_traj);
            let ds = app::cmd_distill_generate(&cfg, &teacher, n)?;
            println!("{} of {n} trajectories written", ds.len());
        }
        Command::Sweep(c) => {
            let cfg = c.load()?;
            print!("{}", app::sweep_csv(&app::cmd_sweep(&cfg)?));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Some(n) = std::env::var("SINO_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global() {
            log::warn!("SINO_THREADS ignored: {e}");
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
