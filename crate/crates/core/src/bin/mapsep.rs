use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mapsep::io::{fit, generate, load_dataset, write_dataset, ResultRecord, RunConfig};
use mapsep::oracle::{check_fixtures, GoldenFixtures};
use mapsep::search::score;
use mapsep::separability::certify_partition;
use mapsep::{bell, enumerate_partitions, Dataset, Error, Method, ModelKind, ModelSpec, Partition, Result};

#[derive(Parser)]
#[command(name = "mapsep", version, about = "Exact MAP partitions for conjugate Normal mixtures, with separability certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Find the MAP partition and certify every pair of its blocks.
    /// Exits with status 2 if some pair is not separable.
    Fit {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        data: PathBuf,
        #[arg(long, value_enum)]
        method: Option<Method>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        budget: Option<u64>,
        /// Write the result record here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score a labelled partition.
    Score {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        data: PathBuf,
        /// JSON array of block labels, inline or as a file path.
        #[arg(long)]
        partition: String,
    },
    /// Certify every block pair of a labelled partition.
    Certify {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        partition: String,
    },
    /// Re-check a result record against its data.
    Verify {
        #[arg(long)]
        record: PathBuf,
        #[arg(long)]
        data: PathBuf,
    },
    /// Sample a dataset from the model.
    Generate {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        n: usize,
        /// Data dimension when no hyperparameter file is given.
        #[arg(long, default_value_t = 1)]
        dim: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// CSV output path; stdout if absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Where to write the generating labels as JSON.
        #[arg(long)]
        truth: Option<PathBuf>,
    },
    /// Print the number of partitions of n items.
    Enumerate {
        #[arg(long)]
        n: usize,
        /// Also print every partition as a label array (n ≤ 12).
        #[arg(long)]
        list: bool,
    },
    /// Recompute the golden fixtures with the quadrature oracle and diff them.
    OracleCheck {
        /// Fixture file; the bundled fixtures if absent.
        #[arg(long)]
        fixtures: Option<PathBuf>,
        /// Write regenerated fixtures to this path.
        #[arg(long)]
        write: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Run configuration JSON; the flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    model: Option<ModelKind>,
    /// Hyperparameter JSON for the chosen model.
    #[arg(long)]
    params: Option<PathBuf>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Perturb duplicate rows by multiples of this amount.
    #[arg(long)]
    jitter: Option<f64>,
}

fn read(path: &Path) -> Result<String> {
    Ok(std::fs::read_to_string(path)?)
}

impl RunArgs {
    fn config(&self, dim: usize) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => serde_json::from_str::<RunConfig>(&read(p)?)?,
            None => {
                let kind = self
                    .model
                    .ok_or_else(|| Error::Usage("pass --model or --config".into()))?;
                RunConfig::new(default_spec(kind, dim))
            }
        };
        if let Some(p) = &self.params {
            cfg.model = ModelSpec::from_json(&read(p)?, self.model)?;
        } else if let Some(kind) = self.model {
            if kind != cfg.model.kind() {
                cfg.model = default_spec(kind, dim);
            }
        }
        if let Some(a) = self.alpha {
            cfg.alpha = a;
        }
        if self.jitter.is_some() {
            cfg.jitter = self.jitter;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn load(&self, data: &Path) -> Result<(RunConfig, Dataset)> {
        // the jitter may come from the config file, so read it first
        let probe = self.config.as_ref().map(|p| read(p)).transpose()?;
        let file_jitter = probe
            .map(|t| serde_json::from_str::<RunConfig>(&t).map(|c| c.jitter))
            .transpose()?
            .flatten();
        let dataset = load_dataset(data, self.jitter.or(file_jitter))?;
        let cfg = self.config(dataset.dim())?;
        cfg.check_dim(dataset.dim())?;
        Ok((cfg, dataset))
    }
}

/// Unit-scale isotropic hyperparameters.
fn default_spec(kind: ModelKind, dim: usize) -> ModelSpec {
    ModelSpec::isotropic(kind, dim, 1.0, 1.0, dim as f64 + 1.0)
}

fn parse_partition(arg: &str) -> Result<Partition> {
    let text = if arg.trim_start().starts_with('[') {
        arg.to_string()
    } else {
        read(Path::new(arg))?
    };
    let labels: Vec<usize> = serde_json::from_str(&text)?;
    Partition::from_labels(&labels)
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, format!("{text}\n"))?,
        None => println!("{text}"),
    }
    Ok(())
}

fn pretty<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Fit {
            run,
            data,
            method,
            seed,
            budget,
            out,
        } => {
            let (mut cfg, dataset) = run.load(&data)?;
            if let Some(m) = method {
                cfg.method = m;
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(b) = budget {
                cfg.budget = b;
            }
            let record = fit(&cfg, &dataset)?;
            emit(&record.to_json(), out.as_deref())?;
            if !record.all_separable {
                eprintln!("MAP partition has a block pair that is not T-linearly separable");
                return Ok(ExitCode::from(2));
            }
        }
        Command::Score { run, data, partition } => {
            let (cfg, dataset) = run.load(&data)?;
            let p = parse_partition(&partition)?;
            let scored = score(&cfg.build_model()?, &cfg.prior()?, &dataset, &p)?;
            println!("{}", pretty(&scored));
        }
        Command::Certify { run, data, partition } => {
            let (cfg, dataset) = run.load(&data)?;
            let p = parse_partition(&partition)?;
            if p.n() != dataset.n() {
                return Err(Error::Usage(format!(
                    "partition has {} labels but data has {} rows",
                    p.n(),
                    dataset.n()
                )));
            }
            let table = certify_partition(&cfg.build_model()?, &dataset, &p)?;
            println!("{}", pretty(&table));
        }
        Command::Verify { record, data } => {
            let rec = ResultRecord::from_json(&read(&record)?)?;
            let dataset = load_dataset(&data, rec.config.jitter)?;
            let v = rec.verify(&dataset)?;
            println!("{}", pretty(&v));
            if !v.ok {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Generate {
            run,
            n,
            dim,
            seed,
            out,
            truth,
        } => {
            let cfg = run.config(dim)?;
            let g = generate(&cfg, n, seed)?;
            match &out {
                Some(p) => write_dataset(&g.data, std::fs::File::create(p)?)?,
                None => write_dataset(&g.data, std::io::stdout().lock())?,
            }
            if let Some(p) = truth {
                std::fs::write(p, serde_json::to_string(&g.truth)? + "\n")?;
            }
        }
        Command::Enumerate { n, list } => {
            println!("{}", bell(n));
            if list {
                for p in enumerate_partitions(n, mapsep::partition::DEFAULT_ENUMERATION_CAP)? {
                    println!("{}", serde_json::to_string(&p)?);
                }
            }
        }
        Command::OracleCheck { fixtures, write } => {
            let fx = match &fixtures {
                Some(p) => GoldenFixtures::from_json(&read(p)?)?,
                None => GoldenFixtures::bundled()?,
            };
            let checks = check_fixtures(&fx)?;
            let mut failed = 0;
            for c in &checks {
                println!(
                    "{} {:<24} frozen {:>18.12} oracle {:>18.12} (±{:.1e}) closed-form {:>18.12}",
                    if c.pass { "ok  " } else { "FAIL" },
                    c.name,
                    c.frozen,
                    c.oracle,
                    c.oracle_error,
                    c.closed_form
                );
                failed += usize::from(!c.pass);
            }
            if let Some(p) = write {
                std::fs::write(p, pretty(&fx.regenerate()?) + "\n")?;
            }
            if failed > 0 {
                eprintln!("{failed} of {} fixtures differ", checks.len());
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error [{}]: {e}", e.code());
            ExitCode::FAILURE
        }
    }
}
