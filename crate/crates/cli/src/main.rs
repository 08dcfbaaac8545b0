//! Command-line surface: state file analysis, trajectories, fixtures.
//!
//! Output contract: the analysis payload goes to standard output (JSON for
//! reports and verdicts, a table for `basis`, files for `evolve`,
//! `construct`, and `random`); `--report` additionally writes a run report
//! wrapping the payload with the command line, the input digest, the
//! tolerance policy, and wall-clock duration. Exit codes: 0 success,
//! 2 input error, 3 resource cap exceeded.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use bosent::criteria::classify;
use bosent::dynamics::{dephase_closed_form, negativity_trajectory, DephasingParams};
use bosent::fock::sector_dims;
use bosent::io;
use bosent::negativity::{negativity_general, negativity_oracle, negativity_two_mode};
use bosent::partial_transpose::DEFAULT_EXTENDED_CAP;
use bosent::states::{embed_qutrit_block, horodecki_qutrit_state, noon_state, random_density};
use bosent::{Error, FockBasis, ModeBipartition, Result, TolerancePolicy};

#[derive(Debug, Parser)]
#[command(name = "bosent", version, about = "Mode entanglement of fixed-N bosonic states")]
struct Cli {
    /// Override every threshold in the tolerance policy with one value.
    #[arg(long, global = true)]
    tolerance: Option<f64>,

    /// Write a run report (command, input digest, payload, policy, timing)
    /// to this file in addition to the standard output.
    #[arg(long, global = true)]
    report: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    /// Exact sector decomposition.
    Sector,
    /// Two-mode closed form (M = 2, m = 1 only).
    TwoMode,
    /// Dense eigendecomposition on the extended space.
    Oracle,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KindArg {
    /// Two-qutrit bound-entangled state embedded in the k = 2 minor of
    /// (N = 4, M = 4, m = 2), maximally mixed fillers elsewhere.
    HorodeckiEmbed,
    /// (|N;0> + |0;N>)/sqrt(2) on two modes.
    Noon,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the sector table of a bipartition: k, d1, d2, block size.
    Basis {
        #[arg(long = "N")]
        n: u32,
        #[arg(long = "M")]
        modes: usize,
        #[arg(long)]
        m: usize,
    },
    /// Negativity of a state file, as a report JSON on standard output.
    Negativity {
        #[arg(long)]
        state: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::Sector)]
        method: MethodArg,
        /// Row cap for the oracle's extended operator.
        #[arg(long, default_value_t = DEFAULT_EXTENDED_CAP)]
        cap: usize,
    },
    /// Separability verdict of a state file, as JSON on standard output.
    Classify {
        #[arg(long)]
        state: PathBuf,
    },
    /// Dephasing trajectory: negativity CSV plus the final state.
    Evolve {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        gamma: f64,
        #[arg(long = "t-max")]
        t_max: f64,
        /// Number of grid intervals; the CSV has steps + 1 rows.
        #[arg(long)]
        steps: usize,
        /// Trajectory CSV path.
        #[arg(long)]
        out: PathBuf,
        /// Final-state file path (default: the CSV path with extension
        /// "final.json").
        #[arg(long = "final-state")]
        final_state: Option<PathBuf>,
    },
    /// Write a reference fixture as a state file.
    Construct {
        #[arg(long, value_enum)]
        kind: KindArg,
        /// Parameter of the bound-entangled family (horodecki-embed).
        #[arg(long, required_if_eq("kind", "horodecki-embed"))]
        a: Option<f64>,
        /// Particle number (noon).
        #[arg(long = "N", required_if_eq("kind", "noon"))]
        n: Option<u32>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a seeded random density matrix as a state file.
    Random {
        #[arg(long = "N")]
        n: u32,
        #[arg(long = "M")]
        modes: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        rank: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::DimensionCap { .. } => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn run(cli: &Cli) -> Result<()> {
    let started = Instant::now();
    let policy = match cli.tolerance {
        Some(tol) => TolerancePolicy::uniform(tol),
        None => TolerancePolicy::default(),
    };
    let (payload, input_digest) = dispatch(&cli.command, &policy)?;
    if let Some(path) = &cli.report {
        let report = json!({
            "command": std::env::args().collect::<Vec<String>>(),
            "input_digest": input_digest,
            "payload": payload,
            "policy": policy,
            "duration_ms": started.elapsed().as_millis() as u64,
        });
        std::fs::write(path, io::to_json_17(&report)?)?;
    }
    Ok(())
}

fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(7 + 2 * digest.len());
    out.push_str("sha256:");
    for byte in digest {
        out.push_str(&format!("{byte:02x}"));
    }
    out
}

/// Read, digest, and validate a state file.
fn load(path: &Path, policy: &TolerancePolicy) -> Result<(io::LoadedState, String)> {
    let bytes = std::fs::read(path)?;
    let digest = sha256_hex(&bytes);
    let text = std::str::from_utf8(&bytes)
        .map_err(|_| Error::StateFile(format!("{} is not UTF-8", path.display())))?;
    Ok((io::parse_state(text, policy)?, digest))
}

fn missing_flag(name: &'static str) -> Error {
    // Unreachable through clap (required_if_eq), kept for the no-panic
    // contract if dispatch is driven programmatically.
    Error::ParameterRange {
        name,
        value: f64::NAN,
        range: "required by this --kind",
    }
}

fn dispatch(command: &Command, policy: &TolerancePolicy) -> Result<(Value, Option<String>)> {
    match command {
        Command::Basis { n, modes, m } => {
            let shapes = sector_dims(*n, ModeBipartition::new(*modes, *m)?)?;
            let mut rows = Vec::new();
            let mut total = 0usize;
            println!("{:>4} {:>10} {:>10} {:>12}", "k", "d1", "d2", "d1*d2");
            for shape in &shapes {
                println!(
                    "{:>4} {:>10} {:>10} {:>12}",
                    shape.k,
                    shape.d1,
                    shape.d2,
                    shape.dim()
                );
                total += shape.dim();
                rows.push(json!({
                    "k": shape.k, "d1": shape.d1, "d2": shape.d2, "dim": shape.dim(),
                }));
            }
            println!("total {total}");
            Ok((json!({ "rows": rows, "total": total }), None))
        }

        Command::Negativity { state, method, cap } => {
            let (loaded, digest) = load(state, policy)?;
            let rho = loaded.to_density();
            let report = match method {
                MethodArg::Sector => negativity_general(&rho, policy)?,
                MethodArg::TwoMode => negativity_two_mode(&rho, policy)?,
                MethodArg::Oracle => negativity_oracle(&rho, policy, *cap)?,
            };
            let value = io::negativity_report_value(&report)?;
            println!("{}", io::to_json_17(&value)?);
            Ok((value, Some(digest)))
        }

        Command::Classify { state } => {
            let (loaded, digest) = load(state, policy)?;
            let verdict = classify(&loaded.to_density(), policy)?;
            let value = io::verdict_value(&verdict)?;
            println!("{}", io::to_json_17(&value)?);
            Ok((value, Some(digest)))
        }

        Command::Evolve {
            state,
            gamma,
            t_max,
            steps,
            out,
            final_state,
        } => {
            if *steps == 0 {
                return Err(Error::ParameterRange {
                    name: "steps",
                    value: 0.0,
                    range: "[1, inf)",
                });
            }
            let (loaded, digest) = load(state, policy)?;
            let rho = loaded.to_density();
            let grid: Vec<f64> = (0..=*steps)
                .map(|i| t_max * (i as f64 / *steps as f64))
                .collect();
            let trajectory = negativity_trajectory(&rho, *gamma, &grid, policy)?;
            std::fs::write(out, io::trajectory_csv(&trajectory))?;
            let params = DephasingParams::new(*gamma, *t_max)?;
            let final_rho = dephase_closed_form(&rho, &params)?;
            let final_path = final_state
                .clone()
                .unwrap_or_else(|| out.with_extension("final.json"));
            std::fs::write(&final_path, io::save_density(&final_rho)?)?;
            let value = json!({
                "out": out.display().to_string(),
                "final_state": final_path.display().to_string(),
                "points": trajectory.len(),
                "negativity_at_t_max": trajectory.last().map(|&(_, n)| n),
            });
            println!("{}", io::to_json_17(&value)?);
            Ok((value, Some(digest)))
        }

        Command::Construct { kind, a, n, out } => {
            let (contents, detail) = match kind {
                KindArg::Noon => {
                    let n = n.ok_or_else(|| missing_flag("N"))?;
                    let psi = noon_state(n)?;
                    (io::save_pure(&psi)?, json!({ "kind": "noon", "N": n }))
                }
                KindArg::HorodeckiEmbed => {
                    let a = a.ok_or_else(|| missing_flag("a"))?;
                    let basis = FockBasis::new(4, ModeBipartition::new(4, 2)?)?;
                    let sigma = horodecki_qutrit_state(a)?;
                    let rho = embed_qutrit_block(
                        &basis,
                        &sigma,
                        &[0.2; 5],
                        &BTreeMap::new(),
                        policy,
                    )?;
                    (
                        io::save_density(&rho)?,
                        json!({ "kind": "horodecki-embed", "a": a }),
                    )
                }
            };
            std::fs::write(out, contents)?;
            let value = json!({ "out": out.display().to_string(), "constructed": detail });
            println!("{}", io::to_json_17(&value)?);
            Ok((value, None))
        }

        Command::Random {
            n,
            modes,
            m,
            rank,
            seed,
            out,
        } => {
            let basis = FockBasis::new(*n, ModeBipartition::new(*modes, *m)?)?;
            let rho = random_density(&basis, *rank, *seed)?;
            std::fs::write(out, io::save_density(&rho)?)?;
            let value = json!({
                "out": out.display().to_string(),
                "N": n, "M": modes, "m": m, "rank": rank, "seed": seed,
            });
            println!("{}", io::to_json_17(&value)?);
            Ok((value, None))
        }
    }
}
