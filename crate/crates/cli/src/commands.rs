//! Subcommand definitions and their implementations.

use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use spherenet::analysis::gap::required_resolution;
use spherenet::analysis::{assess, averaging_gap, su2_export, AssessOptions};
use spherenet::geometry::{sample_generator_set, GeneratorSet, Rotation, UnitVector};
use spherenet::netgen::{enumerate_net, log2_word_count, sample_words_net, word_count, DEFAULT_CAP};
use spherenet::params::{theorem_params, DEFAULT_C_N};

use crate::report::{ReportFile, ReportInput};
use crate::{netfile, su2file, write_atomic};

#[derive(Debug, Parser)]
#[command(name = "spherenet", version, about = "Random-rotation nets on spheres")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the construction parameters for a target scale.
    Params(ParamsArgs),
    /// Build the net x0·S^l and write it as a net file.
    Generate(GenerateArgs),
    /// Measure a net and write a JSON report.
    Analyze(AnalyzeArgs),
    /// Top eigenvalues of the averaging operator on S^2, per harmonic degree.
    Gap(GapArgs),
    /// Write the points of a net on S^3 as SU(2) matrices.
    Su2(Su2Args),
}

#[derive(Debug, Args)]
pub struct ParamsArgs {
    /// Sphere dimension.
    #[arg(long)]
    pub n: usize,
    /// Target scale, in (0, 1/(3n)).
    #[arg(long)]
    pub eps: f64,
    /// Failure probability, in (0, 1).
    #[arg(long, default_value_t = 0.01)]
    pub delta: f64,
    /// The constant C_n of the covering-radius bound.
    #[arg(long = "c-n", default_value_t = DEFAULT_C_N)]
    pub c_n: f64,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub n: usize,
    /// Number of random generators.
    #[arg(long)]
    pub k: usize,
    /// Word length.
    #[arg(long)]
    pub l: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Largest number of words to enumerate in full.
    #[arg(long, default_value_t = DEFAULT_CAP)]
    pub cap: u64,
    /// Draw this many random words instead of enumerating all of them.
    #[arg(long, value_name = "M")]
    pub sample: Option<u64>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Net file to measure.
    #[arg(long)]
    pub net: PathBuf,
    #[arg(long, default_value_t = 100_000)]
    pub probes: usize,
    #[arg(long = "max-degree", default_value_t = 6)]
    pub max_degree: usize,
    /// Seed for the covering-radius probes.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Where to write the JSON report.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GapArgs {
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long = "max-degree", default_value_t = 6)]
    pub max_degree: usize,
    /// Gauss–Legendre latitude nodes; defaults to the minimum for exactness.
    #[arg(long)]
    pub resolution: Option<usize>,
    #[arg(long = "identity-generators", hide = true)]
    pub identity_generators: bool,
}

#[derive(Debug, Args)]
pub struct Su2Args {
    #[arg(long)]
    pub net: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(cli: Cli) -> anyhow::Result<String> {
    match cli.command {
        Command::Params(a) => params(&a),
        Command::Generate(a) => generate(&a),
        Command::Analyze(a) => analyze(&a),
        Command::Gap(a) => gap(&a),
        Command::Su2(a) => su2(&a),
    }
}

fn params(a: &ParamsArgs) -> anyhow::Result<String> {
    let p = theorem_params(a.n, a.eps, a.delta, a.c_n)?;
    let mut out = String::new();
    writeln!(out, "n={}", p.n)?;
    writeln!(out, "eps={}", p.eps)?;
    writeln!(out, "delta={}", p.delta)?;
    writeln!(out, "c_n={}", p.c_n)?;
    writeln!(out, "a_n={:.10}", p.a_n)?;
    writeln!(out, "t={}", p.t)?;
    writeln!(out, "r={:.10}", p.r)?;
    writeln!(out, "k={}", p.k)?;
    writeln!(out, "l={}", p.l)?;
    writeln!(out, "l_without_n={}", p.l_without_n)?;
    writeln!(out, "log2_words={:.2}", p.log2_words)?;
    Ok(out)
}

fn generate(a: &GenerateArgs) -> anyhow::Result<String> {
    let gens = sample_generator_set::<f64>(a.n, a.k, a.seed)?;
    let x0 = UnitVector::north_pole(a.n)?;
    let net = match a.sample {
        Some(m) => {
            let mut rng = ChaCha20Rng::seed_from_u64(a.seed);
            rng.set_stream(1);
            sample_words_net(&gens, a.l, &x0, m, &mut rng)?
        }
        None => {
            if !word_count(a.k, a.l).is_some_and(|c| c <= a.cap) {
                bail!(
                    "(2k)^l = 2^{:.1} words exceeds the enumeration cap {}; use --sample <M> to draw M random words",
                    log2_word_count(a.k, a.l),
                    a.cap
                );
            }
            enumerate_net(&gens, a.l, &x0, a.cap)?
        }
    };
    write_atomic(&a.out, netfile::to_string(&net).as_bytes())?;
    Ok(format!(
        "mode={} distinct_points={} total_weight={}\n",
        net.meta().mode.as_str(),
        net.len(),
        net.total_weight()
    ))
}

fn analyze(a: &AnalyzeArgs) -> anyhow::Result<String> {
    let text = std::fs::read_to_string(&a.net).with_context(|| format!("cannot read {}", a.net.display()))?;
    let net = netfile::parse(&text).with_context(|| format!("malformed net file {}", a.net.display()))?;
    let report = assess(
        &net,
        &AssessOptions {
            probes: a.probes,
            max_degree: a.max_degree,
            seed: a.seed,
        },
    )?;

    let mut out = String::new();
    writeln!(out, "points={} total_weight={}", net.len(), net.total_weight())?;
    writeln!(out, "covering_radius_est={:.6} ({} probes)", report.covering_radius_est, report.covering_probes)?;
    for (d, v) in &report.discrepancy {
        writeln!(out, "discrepancy[{d}]={v:.6}")?;
    }
    writeln!(out, "w1_lower_bound={:.6}", report.w1_lower_bound)?;

    let file = ReportFile::new(
        ReportInput {
            net: a.net.clone(),
            n: net.dim(),
            distinct_points: net.len(),
            total_weight: net.total_weight(),
            probes: a.probes,
            max_degree: a.max_degree,
            seed: a.seed,
        },
        report,
    );
    let json = file.to_json()?;
    if let Some(path) = &a.report {
        write_atomic(path, json.as_bytes())?;
    }
    Ok(out)
}

fn gap(a: &GapArgs) -> anyhow::Result<String> {
    let gens = if a.identity_generators {
        let id = Rotation::identity(2)?;
        GeneratorSet::from_rotations(vec![id; a.k], a.seed)?
    } else {
        sample_generator_set::<f64>(2, a.k, a.seed)?
    };
    let resolution = a.resolution.unwrap_or_else(|| required_resolution(a.max_degree));
    let tops = averaging_gap(&gens, a.max_degree, resolution)?;
    let mut out = String::from("degree top_eigenvalue\n");
    for (d, v) in tops {
        writeln!(out, "{d} {v:.12}")?;
    }
    Ok(out)
}

fn su2(a: &Su2Args) -> anyhow::Result<String> {
    let text = std::fs::read_to_string(&a.net).with_context(|| format!("cannot read {}", a.net.display()))?;
    let net = netfile::parse(&text).with_context(|| format!("malformed net file {}", a.net.display()))?;
    let mats = su2_export(&net)?;
    for (i, m) in mats.iter().enumerate() {
        let det = m.det();
        let det_err = ((det.re - 1.0).powi(2) + det.im * det.im).sqrt();
        if m.unitarity_residual() >= 1e-10 || det_err >= 1e-10 {
            bail!("point {} does not give a special unitary matrix", i + 1);
        }
    }
    write_atomic(&a.out, su2file::to_string(&mats).as_bytes())?;
    Ok(format!("matrices={}\n", mats.len()))
}
