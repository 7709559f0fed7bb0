use std::io::{ErrorKind, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use critspace::critical::{infinitesimal_generators, membership_breakdown, GeneratorResidual};
use critspace::ed_degree::{
    binary_segre_veronese_eddegree, flag_degree, flag_euler_characteristic, flag_hilbert, FlagWeight,
};
use critspace::experiments::{emit_report, run_campaign, CampaignSet, ReportFormat};
use critspace::exterior::{decomposable, so_generators_ext, AlternatingTensor};
use critspace::solvers::{
    binary_eigenvectors, cp_als, grassmann_critical_points, minor_residual, singular_tuples, SolveOutcome, SolverConfig,
};
use critspace::tensor::{PsTensor, VectorTuple};
use critspace::tensor_io::{parse_vectors, read_tensor, tensor_from_value, write_json, TensorData};
use critspace::{Error, Result};

#[derive(Parser)]
#[command(
    name = "critspace",
    version,
    about = "Critical spaces and critical points of distance functions to orbit varieties"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Membership residual of a point in the critical space of a tensor.
    Membership {
        #[arg(long)]
        tensor: PathBuf,
        /// Tensor JSON of the same shape, or {"vectors": [...]} for a rank-one / decomposable point.
        #[arg(long)]
        point: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Eigenvectors of a symmetric tensor (exact for binary forms).
    Eig(SolveArgs),
    /// Singular tuples of a partially symmetric tensor.
    Singular(SolveArgs),
    /// Critical planes of an alternating tensor on the Grassmannian.
    Grassmann(SolveArgs),
    /// CP-ALS rank-q approximation of a real ordinary tensor.
    Als {
        #[command(flatten)]
        solve: SolveArgs,
        #[arg(long, default_value_t = 1)]
        rank: usize,
    },
    /// ED degrees.
    Eddeg {
        #[command(subcommand)]
        variety: Eddeg,
    },
    /// Degree, Hilbert function and Euler characteristic of the complete flag variety.
    Flag {
        /// Must equal the number of weights when given.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, value_delimiter = ',', required = true)]
        a: Vec<u64>,
        #[arg(long = "hilbert-t", alias = "t")]
        hilbert_t: Option<u64>,
    },
    /// Run a verification campaign; exit code 0 iff all its assertions pass.
    Verify {
        campaign: String,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Report path; `.csv` selects CSV, anything else JSON. Stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the campaigns of a config file (the bundled one by default).
    ListCampaigns {
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum Eddeg {
    /// Binary Segre–Veronese variety with degrees d_1, …, d_k.
    Binary {
        #[arg(long = "d", alias = "degrees", value_delimiter = ',', required = true)]
        d: Vec<u64>,
    },
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    tensor: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    restarts: Option<usize>,
    /// Certification tolerance for Newton solvers; fit-change tolerance for CP-ALS.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl SolveArgs {
    fn config(&self, als: bool) -> SolverConfig {
        let mut cfg = SolverConfig {
            master_seed: self.seed,
            ..Default::default()
        };
        if als {
            cfg.restarts = 3;
            cfg.max_iters = 2000;
            cfg.newton_tol = 1e-14;
        }
        if let Some(r) = self.restarts {
            cfg.restarts = r;
        }
        if let Some(m) = self.max_iters {
            cfg.max_iters = m;
        }
        if let Some(t) = self.tol {
            if als {
                cfg.newton_tol = t;
            } else {
                cfg.certify_tol = t;
            }
        }
        cfg
    }
}

/// Writes to stdout; a closed pipe is not an error.
fn print_stdout(text: &str) -> Result<()> {
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != ErrorKind::BrokenPipe => Err(Error::Io {
            path: "<stdout>".into(),
            source: e,
        }),
        _ => Ok(()),
    }
}

fn emit(value: &Value, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => write_json(value, p),
        None => print_stdout(&format!("{}\n", serde_json::to_string_pretty(value)?)),
    }
}

fn big(n: &BigInt) -> Value {
    match n.to_u64() {
        Some(v) => json!(v),
        None => json!(n.to_string()),
    }
}

fn partial(t: TensorData, what: &str) -> Result<PsTensor> {
    match t {
        TensorData::Partial(f) => Ok(f),
        TensorData::Exterior(_) => Err(Error::InvalidInput(format!(
            "{what} needs a partially symmetric tensor"
        ))),
    }
}

fn outcome_json(command: &str, t: &TensorData, cfg: &SolverConfig, out: &SolveOutcome) -> Value {
    json!({
        "command": command,
        "tensor": t.describe(),
        "config": cfg,
        "counts": {
            "distinct": out.distinct_count(),
            "non_isotropic": out.points.len(),
            "isotropic": out.isotropic.len(),
        },
        "diagnostics": out.diagnostics,
        "points": out.points,
        "isotropic": out.isotropic,
    })
}

fn breakdown_json(b: &[GeneratorResidual]) -> Value {
    let residual = b.iter().map(|g| g.residual).fold(0.0, f64::max);
    json!({ "residual": residual, "breakdown": b })
}

fn membership(tensor: &Path, point: &Path) -> Result<Value> {
    let f = read_tensor(tensor)?;
    let text = std::fs::read_to_string(point).map_err(|source| Error::Io {
        path: point.to_path_buf(),
        source,
    })?;
    let raw: Value = serde_json::from_str(&text)?;
    let mut out = match (&f, parse_vectors(&raw)) {
        (TensorData::Partial(f), Some(vs)) => {
            let v = PsTensor::rank_one(&VectorTuple::new(vs?)?, f.shape())?;
            breakdown_json(&membership_breakdown(&v, &infinitesimal_generators(f)?))
        }
        (TensorData::Exterior(f), Some(vs)) => {
            let v = decomposable(&vs?)?;
            check_ext(&v, f)?;
            breakdown_json(&membership_breakdown(&v, &so_generators_ext(f)?))
        }
        (TensorData::Partial(f), None) => {
            let v = partial(tensor_from_value(raw)?, "a point of a partially symmetric space")?;
            if v.shape() != f.shape() {
                return Err(Error::ShapeMismatch("point and tensor shapes differ".into()));
            }
            breakdown_json(&membership_breakdown(&v, &infinitesimal_generators(f)?))
        }
        (TensorData::Exterior(f), None) => match tensor_from_value(raw)? {
            TensorData::Exterior(v) => {
                check_ext(&v, f)?;
                breakdown_json(&membership_breakdown(&v, &so_generators_ext(f)?))
            }
            TensorData::Partial(_) => return Err(Error::ShapeMismatch("point is not alternating".into())),
        },
    };
    out["tensor"] = json!(f.describe());
    Ok(out)
}

fn check_ext(v: &AlternatingTensor, f: &AlternatingTensor) -> Result<()> {
    if v.dim() != f.dim() || v.k() != f.k() {
        return Err(Error::ShapeMismatch(format!(
            "point in ∧^{}C^{}, tensor in ∧^{}C^{}",
            v.k(),
            v.dim(),
            f.k(),
            f.dim()
        )));
    }
    Ok(())
}

fn eig(args: &SolveArgs) -> Result<Value> {
    let t = read_tensor(&args.tensor)?;
    let cfg = args.config(false);
    let f = partial(t.clone(), "eig")?;
    if f.shape().num_factors() != 1 {
        return Err(Error::InvalidInput("eig needs a symmetric tensor (one factor)".into()));
    }
    if f.shape().dims()[0] != 2 {
        return Ok(outcome_json("eig", &t, &cfg, &singular_tuples(&f, &cfg)?));
    }
    let roots = binary_eigenvectors(&f)?;
    let points: Vec<Value> = roots
        .iter()
        .map(|r| {
            let tuple = VectorTuple::new(vec![r.point.clone()])?;
            let v = PsTensor::rank_one(&tuple, f.shape())?;
            Ok(json!({
                "root": r,
                "minor_residual": minor_residual(&f, &tuple)?,
                "membership_residual": critspace::critical::membership_residual(&v, &f)?,
            }))
        })
        .collect::<Result<_>>()?;
    Ok(json!({
        "command": "eig",
        "solver": "companion",
        "tensor": t.describe(),
        "counts": {
            "distinct": roots.len(),
            "with_multiplicity": roots.iter().map(|r| r.multiplicity).sum::<usize>(),
            "isotropic": roots.iter().filter(|r| r.isotropic).count(),
        },
        "points": points,
    }))
}

fn run(cli: Cli) -> Result<ExitCode> {
    let start = Instant::now();
    let (value, out, code) = match cli.command {
        Command::Membership { tensor, point, out } => (membership(&tensor, &point)?, out, ExitCode::SUCCESS),
        Command::Eig(args) => (eig(&args)?, args.out, ExitCode::SUCCESS),
        Command::Singular(args) => {
            let t = read_tensor(&args.tensor)?;
            let cfg = args.config(false);
            let outcome = singular_tuples(&partial(t.clone(), "singular")?, &cfg)?;
            (
                outcome_json("singular", &t, &cfg, &outcome),
                args.out,
                ExitCode::SUCCESS,
            )
        }
        Command::Grassmann(args) => {
            let t = read_tensor(&args.tensor)?;
            let TensorData::Exterior(f) = &t else {
                return Err(Error::InvalidInput("grassmann needs an exterior tensor".into()));
            };
            let cfg = args.config(false);
            let outcome = grassmann_critical_points(f, f.k(), &cfg)?;
            (
                outcome_json("grassmann", &t, &cfg, &outcome),
                args.out,
                ExitCode::SUCCESS,
            )
        }
        Command::Als { solve, rank } => {
            let t = read_tensor(&solve.tensor)?;
            let cfg = solve.config(true);
            let outcome = cp_als(&partial(t.clone(), "als")?, rank, &cfg)?;
            let value = json!({
                "command": "als",
                "tensor": t.describe(),
                "rank": rank,
                "config": cfg,
                "outcome": outcome,
            });
            (value, solve.out, ExitCode::SUCCESS)
        }
        Command::Eddeg {
            variety: Eddeg::Binary { d },
        } => {
            let value = json!({
                "degrees": d,
                "eddegree": big(&binary_segre_veronese_eddegree(&d)?),
            });
            (value, None, ExitCode::SUCCESS)
        }
        Command::Flag { n, a, hilbert_t } => {
            if let Some(n) = n {
                if n != a.len() {
                    return Err(Error::InvalidInput(format!("--n {n} but {} weights given", a.len())));
                }
            }
            let w = FlagWeight::new(a.clone())?;
            let degree = flag_degree(&w)?;
            let mut value = json!({
                "n": a.len(),
                "a": a,
                "dimension": w.variety_dimension(),
                "degree": big(&degree),
                "eddegree": big(&degree),
                "euler_characteristic": big(&flag_euler_characteristic(a.len())?),
            });
            if let Some(t) = hilbert_t {
                value["hilbert_t"] = json!(t);
                value["hilbert_value"] = big(&flag_hilbert(&w, t)?);
            }
            (value, None, ExitCode::SUCCESS)
        }
        Command::Verify {
            campaign,
            config,
            seed,
            out,
        } => {
            let set = match &config {
                Some(p) => CampaignSet::load(p)?,
                None => CampaignSet::builtin(),
            };
            let mut c = set.get(&campaign)?.clone();
            if let Some(s) = seed {
                c.cfg.master_seed = s;
            }
            let report = run_campaign(&c)?;
            for a in &report.assertions {
                eprintln!("{} {}: {}", if a.passed { "PASS" } else { "FAIL" }, a.name, a.detail);
            }
            let s = &report.summary;
            eprintln!(
                "{}: {} instances, {} passed, {} failed, {} inconclusive",
                report.campaign, s.instances, s.passed, s.failed, s.inconclusive
            );
            match &out {
                Some(p) => {
                    let format = match p.extension().and_then(|e| e.to_str()) {
                        Some("csv") => ReportFormat::Csv,
                        _ => ReportFormat::Json,
                    };
                    emit_report(&report, format, p)?;
                }
                None => print_stdout(&report.to_json())?,
            }
            eprintln!("elapsed {:.3}s", start.elapsed().as_secs_f64());
            let code = if report.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            };
            return Ok(code);
        }
        Command::ListCampaigns { config } => {
            let set = match &config {
                Some(p) => CampaignSet::load(p)?,
                None => CampaignSet::builtin(),
            };
            let mut text = String::new();
            for c in &set.campaigns {
                let kind = serde_json::to_value(c.kind)?;
                text += &format!(
                    "{:<18} {:<18} {}\n",
                    c.name,
                    kind.as_str().unwrap_or_default(),
                    c.description
                );
            }
            print_stdout(&text)?;
            return Ok(ExitCode::SUCCESS);
        }
    };
    emit(&value, out.as_deref())?;
    eprintln!("elapsed {:.3}s", start.elapsed().as_secs_f64());
    Ok(code)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
