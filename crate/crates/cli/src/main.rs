//! `mapcone`: Choi-matrix calculus and cone membership from the command line.
//!
//! Exit codes: 0 member or success, 1 non-member or failed check, 2 unknown,
//! 3 malformed input, 4 dimension mismatch, 5 any other error.

mod inputs;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand, ValueEnum};
use mapcone::calculus::{ampliation_crosscheck, check_one_sided_equivalences, Cone, Side};
use mapcone::json::{map_to_string, MatrixJson};
use mapcone::ppt_square::{equivalence_sampler, run_trials, write_ledger, Statement};
use mapcone::{compose, map_pairing, MembershipVerdict, SolverOptions, Status};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "mapcone", version, about = "Hermitian-preserving maps, their Choi matrices and cones of positive maps")]
struct Cli {
    #[command(flatten)]
    solver: SolverArgs,
    /// Emit machine-readable JSON.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SolverArgs {
    /// Numerical tolerance, scaled by the norm of the Choi matrix.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Seed for every stochastic step.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Random restarts of the Schmidt-rank seesaw.
    #[arg(long, global = true)]
    restarts: Option<usize>,
    /// Sweep cap of the seesaw.
    #[arg(long = "max-iter", global = true)]
    max_iter: Option<usize>,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

impl SolverArgs {
    fn options(&self) -> SolverOptions {
        let d = SolverOptions::default();
        SolverOptions {
            tol: self.tol.unwrap_or(d.tol),
            seed: self.seed.unwrap_or(d.seed),
            restarts: self.restarts.unwrap_or(d.restarts),
            max_iter: self.max_iter.unwrap_or(d.max_iter),
            threads: self.threads.unwrap_or(d.threads),
            ..d
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    Dual,
    Rdual,
    Ldual,
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    Right,
    Left,
}

/// Maps are builtin names (`sigma`, `tau`, `phi_abcd:1,1,1,1/3`, `phi_a:0.6`,
/// `phi_alpha:2`, `identity:3`, `transpose:2`, `corner:2`), inline JSON or
/// JSON files.
#[derive(Subcommand)]
enum Command {
    /// Bilinear pairing <φ, ψ> of two maps.
    Pair { phi: String, psi: String },
    /// Image φ(a) of a square matrix given as JSON.
    Apply { phi: String, matrix: String },
    /// Adjoint map φ*.
    Adjoint {
        phi: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Composition ψ∘φ.
    Compose {
        psi: String,
        phi: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Partial transpose of a bipartite matrix (or of a map's Choi matrix).
    Pt {
        matrix: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Tensor flip of a bipartite matrix (or of a map's Choi matrix).
    Flip {
        matrix: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Cone membership: cp, ccp, ppt, dec, eb/sp1, spK, pK, example-K or a cone JSON.
    Member {
        #[arg(long)]
        cone: String,
        phi: String,
    },
    /// Membership in the dual, right dual or left dual of a cone.
    DualMember {
        #[arg(long)]
        cone: String,
        #[arg(long, value_enum, default_value = "dual")]
        which: Which,
        phi: String,
    },
    /// Sampling test of the inclusions between a cone's dual and one-sided duals.
    OneSidedCheck {
        #[arg(long)]
        cone: String,
        #[arg(long, default_value_t = 60)]
        samples: usize,
        #[arg(long = "dimA", default_value_t = 2)]
        dim_a: usize,
        #[arg(long = "dimB", default_value_t = 2)]
        dim_b: usize,
        /// Maps tested before the random candidates.
        #[arg(long)]
        probe: Vec<String>,
    },
    /// Cross-check of the ampliation characterizations of one-sided duals.
    AmpliationCheck {
        #[arg(long)]
        cone: String,
        #[arg(long, value_enum, default_value = "right")]
        side: SideArg,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        phi: String,
    },
    /// Sampled trials of PPT∘PPT ⊂ SP1, or of one of its equivalent statements.
    Ppt2 {
        #[arg(long = "dimA", default_value_t = 2)]
        dim_a: usize,
        #[arg(long = "dimB", default_value_t = 2)]
        dim_b: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// One of i, ii, …, vii; without it the composition trials run.
        #[arg(long)]
        statement: Option<String>,
        /// JSON-lines trial ledger.
        #[arg(long)]
        ledger: Option<PathBuf>,
    },
    /// Replays the worked examples and prints expected against computed values.
    PaperExamples,
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn report_verdict(v: &MembershipVerdict, json: bool) -> Result<u8> {
    if json {
        print_json(v)?;
    } else {
        println!("{} (margin {:.3e})", v.status, v.gap);
        if let Some(cert) = &v.certificate {
            let kind = serde_json::to_value(cert)?.get("kind").and_then(|k| k.as_str().map(String::from));
            println!("  certificate: {}", kind.unwrap_or_default());
        }
        for n in &v.notes {
            println!("  note: {n}");
        }
    }
    Ok(v.status.exit_code() as u8)
}

fn run(cli: Cli) -> Result<u8> {
    let opts = cli.solver.options();
    let json = cli.json;
    match cli.command {
        Command::Pair { phi, psi } => {
            let value = map_pairing(&inputs::map(&phi)?, &inputs::map(&psi)?)?;
            if json {
                print_json(&serde_json::json!({ "pairing": value }))?;
            } else {
                println!("{value}");
            }
        }
        Command::Apply { phi, matrix } => {
            let phi = inputs::map(&phi)?;
            let out = phi.apply_matrix(&inputs::square(&matrix)?)?;
            println!("{}", serde_json::to_string(&MatrixJson::from_matrix(vec![phi.dim_b()], &out))?);
        }
        Command::Adjoint { phi, output } => {
            inputs::write_output(&map_to_string(&inputs::map(&phi)?.adjoint())?, output.as_deref())?;
        }
        Command::Compose { psi, phi, output } => {
            let c = compose(&inputs::map(&psi)?, &inputs::map(&phi)?)?;
            inputs::write_output(&map_to_string(&c)?, output.as_deref())?;
        }
        Command::Pt { matrix, output } => {
            let x = inputs::bipartite(&matrix)?.partial_transpose();
            inputs::write_output(&serde_json::to_string(&MatrixJson::from_bipartite(&x))?, output.as_deref())?;
        }
        Command::Flip { matrix, output } => {
            let x = inputs::bipartite(&matrix)?.flip();
            inputs::write_output(&serde_json::to_string(&MatrixJson::from_bipartite(&x))?, output.as_deref())?;
        }
        Command::Member { cone, phi } => {
            let v = inputs::cone(&cone)?.contains(&inputs::map(&phi)?, &opts)?;
            return report_verdict(&v, json);
        }
        Command::DualMember { cone, which, phi } => {
            let k = inputs::cone(&cone)?;
            let phi = inputs::map(&phi)?;
            let v = match which {
                Which::Dual => k.in_dual(&phi, &opts)?,
                Which::Rdual => k.in_rdual(&phi, &opts)?,
                Which::Ldual => k.in_ldual(&phi, &opts)?,
            };
            return report_verdict(&v, json);
        }
        Command::OneSidedCheck { cone, samples, dim_a, dim_b, probe } => {
            let k = inputs::cone(&cone)?;
            let dims = match &k {
                Cone::Augmented(a) => a.dims(),
                Cone::Builtin(_) => (dim_a, dim_b),
            };
            let probes = probe.iter().map(|p| inputs::map(p)).collect::<Result<Vec<_>>>()?;
            let report = check_one_sided_equivalences(&k, dims, samples, opts.seed, &probes, &opts)?;
            if json {
                print_json(&report)?;
            } else {
                for c in &report.checks {
                    let tag = if c.passed() { "PASS" } else { "FAIL" };
                    println!(
                        "{tag} {}: {} trials, {} violations, {} inconclusive",
                        c.name, c.trials, c.violations, c.inconclusive
                    );
                }
            }
            return Ok(u8::from(report.total_violations() > 0));
        }
        Command::AmpliationCheck { cone, side, samples, phi } => {
            let side = match side {
                SideArg::Right => Side::Right,
                SideArg::Left => Side::Left,
            };
            let report = ampliation_crosscheck(&inputs::cone(&cone)?, &inputs::map(&phi)?, side, samples, opts.seed, &opts)?;
            if json {
                print_json(&report)?;
            } else {
                for p in &report.predicates {
                    let holds = p.holds.map_or("inconclusive".to_string(), |h| h.to_string());
                    println!("{}: {holds} ({} trials)", p.label, p.trials);
                }
                println!("agree: {}", report.agree());
            }
            return Ok(u8::from(!report.agree()));
        }
        Command::Ppt2 { dim_a, dim_b, trials, statement, ledger } => {
            if let Some(s) = statement {
                let s: Statement = s.parse()?;
                if dim_a != dim_b {
                    return Err(mapcone::Error::DimensionMismatch(format!(
                        "statements concern maps on one algebra, got dimA={dim_a}, dimB={dim_b}"
                    ))
                    .into());
                }
                let report = equivalence_sampler(s, dim_a, trials, opts.seed, &opts)?;
                if json {
                    print_json(&report)?;
                } else {
                    println!(
                        "({s}) {}: {} passed, {} unknown, {} failed of {} trials",
                        report.inclusion, report.passed, report.unknown, report.failed, report.trials
                    );
                }
                return Ok(u8::from(report.failed > 0));
            }
            let records = run_trials(dim_a, dim_b, trials, opts.seed, &opts)?;
            if let Some(path) = &ledger {
                write_ledger(&records, std::fs::File::create(path)?)?;
            } else if json {
                write_ledger(&records, std::io::stdout().lock())?;
            }
            let count = |s: Status| records.iter().filter(|r| r.eb == s).count();
            let candidates = records.iter().filter(|r| r.is_candidate()).count();
            if !json || ledger.is_some() {
                println!(
                    "{} trials at ({dim_a},{dim_b}): {} entanglement breaking, {} unknown, {} candidate counterexamples",
                    records.len(),
                    count(Status::Member),
                    count(Status::Unknown),
                    candidates
                );
            }
            return Ok(u8::from(candidates > 0));
        }
        Command::PaperExamples => {
            let rows = mapcone::fixtures::run_all(&opts);
            if json {
                print_json(&rows)?;
            } else {
                let width = rows.iter().map(|r| r.name.chars().count()).max().unwrap_or(0);
                for r in &rows {
                    let tag = if r.passed { "PASS" } else { "FAIL" };
                    let pad = width - r.name.chars().count();
                    println!("{tag}  {}{}  expected: {}  computed: {}", r.name, " ".repeat(pad), r.expected, r.computed);
                }
                let passed = rows.iter().filter(|r| r.passed).count();
                println!("{passed}/{} fixtures passed", rows.len());
            }
            return Ok(u8::from(rows.iter().any(|r| !r.passed)));
        }
    }
    Ok(0)
}

fn error_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<mapcone::Error>() {
            return match e {
                mapcone::Error::Parse(_) | mapcone::Error::Json(_) | mapcone::Error::NotHermitian { .. } => 3,
                mapcone::Error::DimensionMismatch(_) => 4,
                _ => 5,
            };
        }
        if cause.downcast_ref::<serde_json::Error>().is_some() {
            return 3;
        }
    }
    5
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(error_code(&e))
        }
    }
}
