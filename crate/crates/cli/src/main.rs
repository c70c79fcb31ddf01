//! `tamemono`: command-line front end. Every subcommand reads JSON, calls one
//! library operation and prints the result.
//!
//! Exit status: 0 on success, 1 when findings (inadmissible input, failed
//! checks) are reported, 2 on parse and usage errors.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::json;

use tame_monodromy::abvar::{self, AbelianType, Finding};
use tame_monodromy::linalg::CycloMatrixJson;
use tame_monodromy::poly::{factor_cyclotomic, q_poly};
use tame_monodromy::verify::{self, HarnessConfig, Mutation};
use tame_monodromy::weight_filt::weight_filtration;
use tame_monodromy::{Error, IntPoly, JordanSpec, MultFunc, QZElem};

#[derive(Parser)]
#[command(name = "tamemono", version, about = "Monodromy invariants of tamely ramified abelian varieties")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum MutationArg {
    CorruptConductor,
}

#[derive(Subcommand)]
enum Command {
    /// List admissibility violations of an abelian type.
    Validate {
        input: PathBuf,
        /// Also warn when e differs from the lcm of the support orders.
        #[arg(long)]
        strict: bool,
    },
    /// Toric, unipotent and abelian ranks with the base change conductor.
    Ranks { input: PathBuf },
    /// Base change conductor c(A).
    Conductor { input: PathBuf },
    /// Jordan form of the monodromy on H¹.
    H1 { input: PathBuf },
    /// Characteristic polynomial of the monodromy on H¹.
    Charpoly { input: PathBuf },
    /// Largest Jordan blocks of the monodromy on Hᵍ.
    Hg { input: PathBuf },
    /// Base change along a tame extension.
    BaseChange {
        input: PathBuf,
        #[arg(long)]
        degree: u64,
        /// Declare the degree prime to the residue characteristic.
        #[arg(long)]
        prime_to_p: bool,
    },
    /// Product of two abelian types.
    Product { a: PathBuf, b: PathBuf },
    /// Dual abelian type.
    Dual { input: PathBuf },
    /// Isogeny-invariant pair (m_tor, m_ab + m_dual_ab).
    IsogenyKey { input: PathBuf },
    /// Limit mixed Hodge structure bookkeeping (residue characteristic zero).
    Mhs { input: PathBuf },
    /// Weight gradeds of Hᵍ from the explicit matrix.
    HgWeight {
        input: PathBuf,
        /// Largest dimension C(2g, g) to build.
        #[arg(long, env = "MONODROMY_ORACLE_CAP", default_value_t = 70)]
        cap: usize,
    },
    /// Full report for an abelian type.
    Report { input: PathBuf },
    /// Largest Jordan blocks of an exterior power of a Jordan spec.
    Wedge {
        input: PathBuf,
        #[arg(long)]
        j: usize,
    },
    /// Weight filtration of a nilpotent matrix.
    WeightFiltration {
        input: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        center: i64,
    },
    /// Product of cyclotomic polynomials attached to a complete function.
    Qpoly { input: PathBuf },
    /// Cyclotomic factorization of an integer polynomial.
    FactorCyclotomic { input: PathBuf },
    /// Randomized verification of all invariants.
    Verify {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        cases: u64,
        #[arg(long, env = "MONODROMY_MAX_G", default_value_t = 4)]
        max_g: u64,
        #[arg(long, env = "MONODROMY_MAX_E", default_value_t = 12)]
        max_e: u64,
        /// Largest C(2g, g) checked against the explicit Hᵍ matrix.
        #[arg(long, env = "MONODROMY_ORACLE_CAP", default_value_t = 20)]
        oracle_cap: usize,
        #[arg(long, value_enum)]
        mutate: Option<MutationArg>,
    },
    /// Amplitude of Λʲ Jord_m(ξ) by brute force against j(m − j) and m(m − j).
    Onejord {
        #[arg(long, default_value_t = 8)]
        max_m: u64,
        /// Eigenvalue exponent of ξ.
        #[arg(long, default_value = "1/3")]
        exponent: String,
    },
}

/// Failure modes mapped to exit codes.
enum Failure {
    Findings(Vec<Finding>),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        match e {
            Error::Inadmissible(v) => Failure::Findings(
                v.into_iter()
                    .map(|x| Finding::new(&kind_name(&x.kind), x.message))
                    .collect(),
            ),
            Error::Inconsistent(msg) => Failure::Findings(vec![Finding::new("inconsistent", msg)]),
            other => Failure::Usage(other.to_string()),
        }
    }
}

fn kind_name<T: Serialize>(k: &T) -> String {
    serde_json::to_value(k)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

type CmdResult = Result<(), Failure>;

fn read_input(path: &Path) -> Result<String, Failure> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::Usage(format!("stdin: {e}")))?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
    }
}

fn load<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let s = read_input(path)?;
    serde_json::from_str(&s).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

/// Writes a line to stdout; a closed pipe is not an error.
fn out(s: &str) {
    let _ = writeln!(io::stdout().lock(), "{s}");
}

fn print_json<T: Serialize>(v: &T) {
    out(&serde_json::to_string_pretty(v).expect("serializable"));
}

/// Prints `text` or the JSON value depending on the format.
fn emit<T: Serialize>(fmt: Format, v: &T, text: impl FnOnce() -> String) {
    match fmt {
        Format::Json => print_json(v),
        Format::Text => out(&text()),
    }
}

fn findings_or_ok(findings: Vec<Finding>) -> CmdResult {
    if findings.is_empty() {
        Ok(())
    } else {
        Err(Failure::Findings(findings))
    }
}

fn lines<K: std::fmt::Display, V: std::fmt::Display>(m: &BTreeMap<K, V>) -> String {
    m.iter().map(|(k, v)| format!("{k}: {v}")).collect::<Vec<_>>().join("\n")
}

fn run(cli: Cli) -> CmdResult {
    let fmt = cli.format;
    match cli.command {
        Command::Validate { input, strict } => {
            let a: AbelianType = load(&input)?;
            if strict {
                for w in abvar::strict_warnings(&a) {
                    eprintln!("warning: {w}");
                }
            }
            let v = abvar::validate(&a);
            if v.is_empty() {
                emit(fmt, &json!({ "violations": [] }), || "admissible".into());
                Ok(())
            } else {
                Err(Error::Inadmissible(v).into())
            }
        }
        Command::Ranks { input } => {
            let r = abvar::ranks(&load(&input)?)?;
            emit(fmt, &r, || {
                format!(
                    "t = {}\nu = {}\na = {}\nt_pot = {}\na_pot = {}\nc = {}",
                    r.t, r.u, r.a, r.t_pot, r.a_pot, r.c
                )
            });
            Ok(())
        }
        Command::Conductor { input } => {
            let c = abvar::conductor(&load(&input)?)?;
            emit(fmt, &c.to_string(), || c.to_string());
            Ok(())
        }
        Command::H1 { input } => {
            let s = abvar::h1_monodromy(&load(&input)?)?;
            emit(fmt, &s, || s.to_string());
            Ok(())
        }
        Command::Charpoly { input } => {
            let p = abvar::h1_charpoly(&load(&input)?)?;
            emit(fmt, &p, || p.to_string());
            Ok(())
        }
        Command::Hg { input } => {
            let h = abvar::hg_analysis(&load(&input)?)?;
            emit(fmt, &h, || {
                format!(
                    "pole candidate: {}\nmax block at candidate: {}\nglobal max block: {}\nper eigenvalue:\n{}",
                    h.pole_candidate,
                    h.max_block_at_candidate,
                    h.global_max_block,
                    lines(&h.per_eigenvalue)
                )
            });
            findings_or_ok(h.findings)
        }
        Command::BaseChange {
            input,
            degree,
            prime_to_p,
        } => {
            let b = abvar::base_change(&load(&input)?, degree, prime_to_p)?;
            print_json(&b);
            Ok(())
        }
        Command::Product { a, b } => {
            let p = abvar::product(&load(&a)?, &load(&b)?)?;
            print_json(&p);
            Ok(())
        }
        Command::Dual { input } => {
            let d = abvar::dual(&load(&input)?)?;
            print_json(&d);
            Ok(())
        }
        Command::IsogenyKey { input } => {
            let a: AbelianType = load(&input)?;
            if let v @ [_, ..] = abvar::validate(&a).as_slice() {
                return Err(Error::Inadmissible(v.to_vec()).into());
            }
            let (tor, ab_sum) = abvar::isogeny_key(&a);
            emit(fmt, &json!({ "tor": tor, "ab_sum": ab_sum }), || {
                format!("tor: {tor}\nab_sum: {ab_sum}")
            });
            Ok(())
        }
        Command::Mhs { input } => {
            let s = abvar::mhs_summary(&load(&input)?)?;
            emit(fmt, &s, || {
                format!(
                    "Gr_0: {}\nGr_-1 (1,0): {}\nGr_-1 (0,1): {}\nGr_-2: {}",
                    s.gr_0, s.gr_m1_hodge_10, s.gr_m1_hodge_01, s.gr_m2
                )
            });
            Ok(())
        }
        Command::HgWeight { input, cap } => {
            let p = abvar::hg_weight_profile(&load(&input)?, cap)?;
            emit(fmt, &p, || {
                let gr: Vec<String> = p
                    .graded
                    .iter()
                    .map(|(i, m)| {
                        let parts: Vec<String> = m.iter().map(|(x, d)| format!("{x}↦{d}")).collect();
                        format!("Gr_{i}: {{{}}}", parts.join(", "))
                    })
                    .collect();
                format!(
                    "{}\npole candidate: {}\nlargest α: {}\namplitude: {}",
                    gr.join("\n"),
                    p.pole_candidate,
                    p.top_alpha.map_or("none".into(), |a| a.to_string()),
                    p.amplitude
                )
            });
            findings_or_ok(p.findings)
        }
        Command::Report { input } => {
            let r = abvar::report(&load(&input)?)?;
            print_json(&r);
            findings_or_ok(r.findings)
        }
        Command::Wedge { input, j } => {
            let s: JordanSpec = load(&input)?;
            let r = s.wedge_max_ranks(j)?;
            emit(fmt, &r, || lines(&r));
            Ok(())
        }
        Command::WeightFiltration { input, center } => {
            let m: CycloMatrixJson = load(&input)?;
            let f = weight_filtration(&m.to_matrix()?, center)?;
            emit(fmt, &f, || {
                let gr: Vec<String> = f.graded_dims().iter().map(|(i, d)| format!("Gr_{i}: {d}")).collect();
                format!("center: {}\namplitude: {}\n{}", f.center(), f.amplitude(), gr.join("\n"))
            });
            Ok(())
        }
        Command::Qpoly { input } => {
            let f: MultFunc = load(&input)?;
            let p = q_poly(&f)?;
            emit(fmt, &p, || p.to_string());
            Ok(())
        }
        Command::FactorCyclotomic { input } => {
            let p: IntPoly = load(&input)?;
            let f = factor_cyclotomic(&p)?;
            emit(fmt, &f, || {
                if f.factors.is_empty() {
                    "1".into()
                } else {
                    f.factors
                        .iter()
                        .map(|(d, c)| if *c == 1 { format!("Φ_{d}") } else { format!("Φ_{d}^{c}") })
                        .collect::<Vec<_>>()
                        .join(" ")
                }
            });
            Ok(())
        }
        Command::Verify {
            seed,
            cases,
            max_g,
            max_e,
            oracle_cap,
            mutate,
        } => {
            if max_g == 0 || max_e == 0 || oracle_cap == 0 {
                return Err(Failure::Usage("caps must be positive".into()));
            }
            let cfg = HarnessConfig {
                seed,
                cases,
                max_g,
                max_e,
                oracle_cap,
                mutation: mutate.map(|MutationArg::CorruptConductor| Mutation::CorruptConductor),
            };
            let r = verify::verify_harness(&cfg);
            print_json(&r);
            if r.findings.is_empty() {
                Ok(())
            } else {
                // findings are already part of the report
                Err(Failure::Findings(Vec::new()))
            }
        }
        Command::Onejord { max_m, exponent } => {
            let x: QZElem = exponent.parse().map_err(|e: Error| Failure::Usage(e.to_string()))?;
            let rows = verify::onejord_table(max_m, x)?;
            let failures: Vec<Finding> = rows
                .iter()
                .filter(|r| !r.formula_holds())
                .map(|r| {
                    Finding::new(
                        "onejord",
                        format!("m = {}, j = {}: amplitude {} ≠ j(m − j) = {}", r.m, r.j, r.brute_force, r.formula),
                    )
                })
                .collect();
            emit(fmt, &rows, || {
                let mut out = vec!["m  j  brute  j(m-j)  m(m-j)".to_string()];
                for r in &rows {
                    out.push(format!(
                        "{:<2} {:<2} {:<6} {:<7} {:<6}{}",
                        r.m,
                        r.j,
                        r.brute_force,
                        r.formula,
                        r.alternative,
                        if r.alternative_holds() { "" } else { " (m(m-j) differs)" }
                    ));
                }
                out.join("\n")
            });
            findings_or_ok(failures)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Findings(f)) => {
            if !f.is_empty() {
                print_json(&json!({ "findings": f }));
            }
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
