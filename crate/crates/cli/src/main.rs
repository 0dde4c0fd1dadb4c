//! stratlab: exact computations for the Ekedahl-Oort and Newton
//! stratifications of the signature (3,2) unitary moduli space.
//!
//! Exit codes: 0 success, 1 domain error (the error name comes from the
//! owning module), 2 malformed input.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use stratlab_core::crystal::CrystalModule;
use stratlab_core::error::{Error, Result};
use stratlab_core::finalseq::FinalSequence;
use stratlab_core::modp::{eo_class_from_eta, ModPModule};
use stratlab_core::polygons::admissible_polygons;
use stratlab_core::rat::json_rat;
use stratlab_core::strata::{
    classify_32, eo_p_rank_32, polygon_name_32, supersingular_witness,
};
use stratlab_core::weyl::{enumerate_w, CosetRep, Permutation};

#[derive(Parser)]
#[command(
    name = "stratlab",
    version,
    about = "Exact Ekedahl-Oort / Newton stratification calculator for unitary moduli of signature (3,2)",
    arg_required_else_help = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TableFormat {
    Md,
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// List the Ekedahl-Oort strata of a signature with their dimensions.
    EoList {
        /// Signature as "a,b".
        #[arg(long, default_value = "3,2")]
        signature: String,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Dimension of one Ekedahl-Oort stratum.
    EoDim {
        /// Index list of the representative, e.g. "3,4".
        #[arg(long)]
        gamma: String,
        #[arg(long, default_value = "3,2")]
        signature: String,
    },
    /// List the admissible Newton polygons of a signature.
    NewtonList {
        #[arg(long, default_value = "3,2")]
        signature: String,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Final sequence of a Siegel permutation.
    FinalSeq {
        /// Permutation in cycle notation, e.g. "(3,6,4)(5,7,8)".
        #[arg(long)]
        omega: String,
        #[arg(long)]
        q: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Generic first slope of a stratum, from its permutation or final
    /// sequence.
    GenericSlope {
        /// Permutation in cycle notation (requires --q).
        #[arg(long, conflicts_with = "phi")]
        omega: Option<String>,
        /// Final sequence as a comma list "0,0,1,1,2,2,3,3,4,5".
        #[arg(long)]
        phi: Option<String>,
        #[arg(long)]
        q: Option<usize>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Check the defining conditions of a module file.
    ModuleVerify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Isocrystal slopes of an integral module, by the exact power check
    /// and by the characteristic-polynomial oracle.
    ModuleSlopes {
        #[arg(long)]
        input: PathBuf,
        /// Search bound for the power check; defaults to 4q, or the
        /// STRATLAB_NMAX environment variable when set.
        #[arg(long)]
        n_max: Option<u32>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Ekedahl-Oort class of a module's mod-p fiber.
    ModuleClass {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Certify that gamma_{3,4} meets the supersingular locus at a prime.
    Witness {
        #[arg(long)]
        p: u64,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// The full interaction table between the two stratifications.
    Classify {
        #[arg(long, default_value = "3,2")]
        signature: String,
        #[arg(long, value_enum, default_value = "md")]
        format: TableFormat,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_malformed_input() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn parse_signature(s: &str) -> Result<(usize, usize)> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(Error::ParseError(format!(
            "signature must be \"a,b\", got '{s}'"
        )));
    }
    let a = parts[0]
        .trim()
        .parse()
        .map_err(|_| Error::ParseError(format!("'{}' is not an integer", parts[0])))?;
    let b = parts[1]
        .trim()
        .parse()
        .map_err(|_| Error::ParseError(format!("'{}' is not an integer", parts[1])))?;
    Ok((a, b))
}

fn parse_index_list(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| Error::ParseError(format!("'{t}' is not an integer")))
        })
        .collect()
}

enum Module {
    Crystal(CrystalModule),
    ModP(ModPModule),
}

/// Loads a module file, detecting the kind by its matrix keys: "A_F" for
/// integral modules, "F" for mod-p modules. Integral modules must pass
/// all seven defining conditions; the first failure is reported as an
/// invariant violation.
fn load_module(path: &Path) -> Result<Module> {
    let value = read_json(path)?;
    let obj = value
        .as_object()
        .ok_or_else(|| Error::SchemaViolation("module file must hold a JSON object".into()))?;
    if obj.contains_key("A_F") {
        let m = CrystalModule::from_json_value(&value)?;
        let report = m.verify_axioms();
        if let Some(bad) = report.first_failure() {
            return Err(Error::InvariantViolation(format!(
                "condition ({}) {}: {}",
                bad.id, bad.name, bad.detail
            )));
        }
        Ok(Module::Crystal(m))
    } else if obj.contains_key("F") {
        Ok(Module::ModP(ModPModule::from_json_value(&value)?))
    } else {
        Err(Error::SchemaViolation(
            "unrecognized module schema: expected an A_F (integral) or F (mod-p) matrix".into(),
        ))
    }
}

fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::ParseError(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::ParseError(format!("{}: {e}", path.display())))
}

fn gamma_json(rep: &CosetRep, p_rank: Option<u32>) -> Value {
    let mut obj = json!({
        "u": rep.u(),
        "label": rep.label(),
        "dimension": rep.dimension(),
        "one_line": rep.permutation().images(),
        "cycles": rep.permutation().cycle_string(),
    });
    if let Some(f) = p_rank {
        obj["p_rank"] = json!(f);
    }
    obj
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::EoList { signature, format } => {
            let (a, b) = parse_signature(&signature)?;
            let reps = enumerate_w(a, b);
            match format {
                Format::Text => {
                    for rep in &reps {
                        let p_rank = eo_p_rank_32(rep)
                            .map(|f| format!("  p-rank {f}"))
                            .unwrap_or_default();
                        println!(
                            "{:<10} dim {}{}  {}",
                            rep.label(),
                            rep.dimension(),
                            p_rank,
                            rep.permutation().cycle_string()
                        );
                    }
                }
                Format::Json => {
                    let rows: Vec<Value> = reps
                        .iter()
                        .map(|r| gamma_json(r, eo_p_rank_32(r).ok()))
                        .collect();
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&Value::Array(rows)).unwrap()
                    );
                }
            }
            Ok(())
        }

        Command::EoDim { gamma, signature } => {
            let (a, b) = parse_signature(&signature)?;
            let u = parse_index_list(&gamma)?;
            if u.len() != b {
                return Err(Error::ParseError(format!(
                    "gamma needs {b} indices for signature ({a},{b})"
                )));
            }
            let rep = CosetRep::new(a, b, u)?;
            println!("{}", rep.dimension());
            Ok(())
        }

        Command::NewtonList { signature, format } => {
            let (a, b) = parse_signature(&signature)?;
            let polys = admissible_polygons(a, b)?;
            match format {
                Format::Text => {
                    for p in &polys {
                        let name = if (a, b) == (3, 2) {
                            format!("{:<9}", polygon_name_32(p).replace("beta_", "β_"))
                        } else {
                            String::new()
                        };
                        println!(
                            "{name}{:<22} p-rank {}  first slope {}",
                            p.to_string(),
                            p.p_rank(),
                            stratlab_core::rat::display_rat(&p.first_slope())
                        );
                    }
                }
                Format::Json => {
                    let rows: Vec<Value> = polys
                        .iter()
                        .map(|p| {
                            let mut obj = json!({
                                "display": p.to_string(),
                                "q": p.q(),
                                "factors": p.factors(),
                                "p_rank": p.p_rank(),
                                "first_slope": json_rat(&p.first_slope()),
                            });
                            if (a, b) == (3, 2) {
                                obj["name"] = json!(polygon_name_32(p));
                            }
                            obj
                        })
                        .collect();
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&Value::Array(rows)).unwrap()
                    );
                }
            }
            Ok(())
        }

        Command::FinalSeq { omega, q, format } => {
            let w = Permutation::from_cycles(&omega, 2 * q)?;
            let f = FinalSequence::from_permutation(&w, q)?;
            match format {
                Format::Text => println!("{f}"),
                Format::Json => println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({
                        "q": q,
                        "omega": w.cycle_string(),
                        "phi": f.tuple(),
                    }))
                    .unwrap()
                ),
            }
            Ok(())
        }

        Command::GenericSlope {
            omega,
            phi,
            q,
            format,
        } => {
            let f = match (omega, phi) {
                (Some(cycles), None) => {
                    let q =
                        q.ok_or_else(|| Error::ParseError("--omega requires --q".into()))?;
                    let w = Permutation::from_cycles(&cycles, 2 * q)?;
                    FinalSequence::from_permutation(&w, q)?
                }
                (None, Some(list)) => {
                    let tuple = parse_index_list(&list)?;
                    if tuple.len() % 2 != 0 || tuple.is_empty() {
                        return Err(Error::ParseError(
                            "--phi needs the 2q values phi(1..2q)".into(),
                        ));
                    }
                    FinalSequence::from_tuple(tuple.len() / 2, &tuple)?
                }
                _ => {
                    return Err(Error::ParseError(
                        "exactly one of --omega or --phi is required".into(),
                    ))
                }
            };
            let (d, c) = f.stable_sets();
            let lambda = f.generic_first_slope();
            match format {
                Format::Text => println!("{}", stratlab_core::rat::display_rat(&lambda)),
                Format::Json => println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({
                        "phi": f.tuple(),
                        "D": d,
                        "C": c,
                        "lambda": json_rat(&lambda),
                    }))
                    .unwrap()
                ),
            }
            Ok(())
        }

        Command::ModuleVerify { input, format } => {
            // Schema-level load only: this verb exists to report on broken
            // modules, so the axioms are checked here, not by the loader.
            let value = read_json(&input)?;
            let obj = value.as_object().ok_or_else(|| {
                Error::SchemaViolation("module file must hold a JSON object".into())
            })?;
            if obj.contains_key("A_F") {
                let m = CrystalModule::from_json_value(&value)?;
                let report = m.verify_axioms();
                match format {
                    Format::Text => print!("{report}"),
                    Format::Json => {
                        let entries: Vec<Value> = report
                            .entries
                            .iter()
                            .map(|e| {
                                json!({
                                    "condition": e.id,
                                    "name": e.name,
                                    "passed": e.passed,
                                    "detail": e.detail,
                                })
                            })
                            .collect();
                        println!(
                            "{}",
                            serde_json::to_string_pretty(&json!({
                                "all_passed": report.all_passed(),
                                "checks": entries,
                            }))
                            .unwrap()
                        );
                    }
                }
                if let Some(bad) = report.first_failure() {
                    return Err(Error::InvariantViolation(format!(
                        "condition ({}) {}: {}",
                        bad.id, bad.name, bad.detail
                    )));
                }
            } else {
                // Mod-p modules validate fully at construction.
                let m = ModPModule::from_json_value(&value)?;
                match format {
                    Format::Text => {
                        println!(
                            "mod-p module over GF({}^{}), dim {}: FV = VF = 0, ker F = im V, ker V = im F",
                            m.field().p(),
                            m.field().degree(),
                            m.dim()
                        );
                        println!(
                            "splitting: {}  pairing: {}",
                            if m.splitting().is_some() {
                                "present"
                            } else {
                                "absent"
                            },
                            if m.pairing().is_some() {
                                "present"
                            } else {
                                "absent"
                            },
                        );
                    }
                    Format::Json => println!(
                        "{}",
                        serde_json::to_string_pretty(&json!({
                            "all_passed": true,
                            "kind": "modp",
                            "dim": m.dim(),
                            "p": m.field().p(),
                            "field_degree": m.field().degree(),
                            "splitting": m.splitting().is_some(),
                            "pairing": m.pairing().is_some(),
                        }))
                        .unwrap()
                    ),
                }
            }
            Ok(())
        }

        Command::ModuleSlopes {
            input,
            n_max,
            format,
        } => {
            let Module::Crystal(m) = load_module(&input)? else {
                return Err(Error::InvariantViolation(
                    "slope computation needs an integral module (A_F schema)".into(),
                ));
            };
            let bound = n_max
                .or_else(|| {
                    std::env::var("STRATLAB_NMAX")
                        .ok()
                        .and_then(|s| s.parse().ok())
                })
                .unwrap_or_else(|| m.default_n_max());
            let power = m.isoclinic_check(bound);
            let oracle = m.newton_slopes()?;
            match format {
                Format::Text => {
                    match power {
                        Some((n, s)) => println!(
                            "power check:      A_F^{n} = p^{s} · unit  =>  isoclinic of slope {}",
                            stratlab_core::rat::display_rat(&stratlab_core::rat::rat(
                                s as i64, n as i64
                            ))
                        ),
                        None => println!("power check:      not isoclinic within N <= {bound}"),
                    }
                    println!("char-poly oracle: slopes {oracle}");
                }
                Format::Json => {
                    let slopes: Vec<Value> = oracle
                        .entries()
                        .iter()
                        .map(|(s, h)| json!([json_rat(s), h]))
                        .collect();
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&json!({
                            "isoclinic": power.map(|(n, s)| json!({
                                "N": n,
                                "s": s,
                                "slope": json_rat(&stratlab_core::rat::rat(s as i64, n as i64)),
                            })),
                            "n_max": bound,
                            "newton_slopes": slopes,
                        }))
                        .unwrap()
                    );
                }
            }
            Ok(())
        }

        Command::ModuleClass { input, format } => {
            let fiber = match load_module(&input)? {
                Module::Crystal(m) => m.reduce_mod_p()?,
                Module::ModP(m) => m,
            };
            let eta = fiber.unitary_eta()?;
            let q = fiber.q();
            let b = *eta.values().last().unwrap_or(&0);
            let gamma = eo_class_from_eta(&eta, q - b, b)?;
            match format {
                Format::Text => {
                    println!("eta   = {eta}");
                    println!(
                        "class = {}  {}",
                        gamma.label(),
                        gamma.permutation().cycle_string()
                    );
                }
                Format::Json => println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({
                        "eta": eta.values(),
                        "signature": [q - b, b],
                        "gamma": gamma_json(&gamma, None),
                    }))
                    .unwrap()
                ),
            }
            Ok(())
        }

        Command::Witness { p, format } => {
            let report = supersingular_witness(p)?;
            match format {
                Format::Text => print!("{report}"),
                Format::Json => {
                    let legs: Vec<Value> = report
                        .legs
                        .iter()
                        .map(|l| json!({"name": l.name, "detail": l.detail}))
                        .collect();
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&json!({
                            "p": report.p,
                            "certified": true,
                            "legs": legs,
                        }))
                        .unwrap()
                    );
                }
            }
            Ok(())
        }

        Command::Classify { signature, format } => {
            let (a, b) = parse_signature(&signature)?;
            if (a, b) != (3, 2) {
                return Err(Error::WrongSignature {
                    want_a: 3,
                    want_b: 2,
                    got_a: a,
                    got_b: b,
                });
            }
            let table = classify_32()?;
            match format {
                TableFormat::Md => print!("{}", table.to_markdown()),
                TableFormat::Csv => print!("{}", table.to_csv()),
                TableFormat::Json => println!(
                    "{}",
                    serde_json::to_string_pretty(&table.to_json_value()).unwrap()
                ),
            }
            Ok(())
        }
    }
}
