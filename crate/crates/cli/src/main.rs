//! Command-line front end: bound evaluation, (d, t) sweep tables, design
//! verification, and tightness reports for the built-in POVMs.
//!
//! Results go to stdout, diagnostics to stderr. Exit codes: 0 success,
//! 2 argument error, 3 parse error, 4 validation or design failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use tdesign_core::json::{
    design_report_to_json, fmt_f64, parse_ensemble, parse_povm, tightness_to_json,
};
use tdesign_core::{
    asymptote, basis_povm, check_t_design, closed_form_bound, icosahedron_povm, mutual_information,
    octahedron_povm, optimize_knots, qutrit_sic_povm, tetrahedron_povm, tightness_report,
    validate_povm, BoundResult, Error as CoreError, Order, Povm, SearchConfig,
};

#[derive(Parser)]
#[command(
    name = "tdesign",
    version,
    about = "Upper bounds on the informational power of quantum t-design measurements"
)]
struct Cli {
    /// Seed threaded through every stochastic subroutine.
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the bound W_t(d) for one dimension and design order.
    Bound {
        /// Hilbert space dimension, at least 2.
        #[arg(short = 'd', long)]
        dim: u32,
        /// Design order: 1..=8 or "inf".
        #[arg(short = 't', long)]
        order: Order,
        #[arg(long, value_enum, default_value_t = Unit::Nat)]
        unit: Unit,
        /// Run the knot optimizer even when a closed form exists.
        #[arg(long)]
        numeric: bool,
    },
    /// Sweep W_t(d) over dimensions and orders.
    Table {
        /// Comma-separated dimensions, each at least 2.
        #[arg(short = 'd', long, value_delimiter = ',', required = true)]
        dims: Vec<u32>,
        /// Comma-separated orders from 1..=8 or "inf".
        #[arg(short = 't', long, value_delimiter = ',', required = true)]
        orders: Vec<Order>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Check the design order of a built-in or serialized POVM.
    VerifyDesign {
        /// Built-in name (tetrahedron, octahedron, icosahedron, qutrit-sic,
        /// basis:<d>) or a path to a POVM JSON file.
        spec: String,
        /// Largest moment to check; defaults to the tensor-power budget.
        #[arg(long)]
        tmax: Option<u32>,
    },
    /// Compare the bound of a built-in design with the best ensemble found.
    Tightness {
        /// One of: tetrahedron, octahedron, icosahedron, qutrit-sic.
        name: String,
        /// Random restarts of the ensemble search (designs without an
        /// antipodal shortcut).
        #[arg(long, default_value_t = 32)]
        restarts: u32,
    },
    /// Mutual information of a serialized ensemble and POVM pair.
    Mutinfo {
        #[arg(long)]
        ensemble: PathBuf,
        #[arg(long)]
        povm: PathBuf,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Unit {
    Nat,
    Bit,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

struct Failure {
    code: u8,
    msg: String,
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        msg: msg.into(),
    }
}

fn core_failure(err: CoreError) -> Failure {
    let code = match &err {
        CoreError::Parse(_) => 3,
        CoreError::TensorCap { .. } => 2,
        _ => 4,
    };
    Failure {
        code,
        msg: err.to_string(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Bound {
            dim,
            order,
            unit,
            numeric,
        } => cmd_bound(dim, order, unit, numeric, cli.seed),
        Command::Table {
            dims,
            orders,
            format,
        } => cmd_table(dims, orders, format, cli.seed),
        Command::VerifyDesign { spec, tmax } => cmd_verify_design(&spec, tmax),
        Command::Tightness { name, restarts } => cmd_tightness(&name, restarts, cli.seed),
        Command::Mutinfo { ensemble, povm } => cmd_mutinfo(&ensemble, &povm),
    }
}

fn check_dim(d: u32) -> Result<(), Failure> {
    if d < 2 {
        return Err(usage(format!("dimension must be at least 2, got {d}")));
    }
    Ok(())
}

fn check_order(t: Order) -> Result<(), Failure> {
    match t {
        Order::Finite(ft) if ft == 0 || ft > 8 => {
            Err(usage(format!("order must be in 1..=8 or 'inf', got {ft}")))
        }
        _ => Ok(()),
    }
}

/// Closed form when one exists; the knot optimizer for t in 6..=8.
fn evaluate_bound(d: u32, t: Order, seed: u64) -> Result<BoundResult, Failure> {
    match t {
        Order::Finite(ft) if (6..=8).contains(&ft) => {
            optimize_knots(d, ft, seed).map_err(core_failure)
        }
        _ => closed_form_bound(d, t).map_err(core_failure),
    }
}

fn cmd_bound(d: u32, t: Order, unit: Unit, numeric: bool, seed: u64) -> Result<(), Failure> {
    check_dim(d)?;
    check_order(t)?;
    let result = if numeric {
        match t {
            Order::Infinite => {
                return Err(usage("the infinite-order bound has no knots to optimize"))
            }
            Order::Finite(ft) => optimize_knots(d, ft, seed).map_err(core_failure)?,
        }
    } else {
        if let Order::Finite(ft) = t {
            if (6..=8).contains(&ft) {
                eprintln!("note: no closed form for t={ft}; running the knot optimizer");
            }
        }
        evaluate_bound(d, t, seed)?
    };
    let (value, unit_name) = match unit {
        Unit::Nat => (result.nats, "nat"),
        Unit::Bit => (result.bits(), "bit"),
    };
    println!("W_{}({}) = {:.8} {}", result.t, d, value, unit_name);
    if !result.knots.is_empty() {
        let knots = result
            .knots
            .iter()
            .map(|k| format!("{k:.8}"))
            .collect::<Vec<_>>()
            .join(" ");
        println!("knots: {knots}");
    }
    println!("source: {}", result.source.as_str());
    Ok(())
}

struct Row {
    result: BoundResult,
    asymptote_nats: Option<f64>,
}

fn cmd_table(
    mut dims: Vec<u32>,
    mut orders: Vec<Order>,
    format: Format,
    seed: u64,
) -> Result<(), Failure> {
    for &d in &dims {
        check_dim(d)?;
    }
    for &t in &orders {
        check_order(t)?;
    }
    dims.sort_unstable();
    dims.dedup();
    orders.sort_unstable();
    orders.dedup();

    let mut rows = Vec::with_capacity(dims.len() * orders.len());
    for &d in &dims {
        for &t in &orders {
            let result = evaluate_bound(d, t, seed)?;
            // t = 1 diverges and t in 6..=8 has no published limit; those
            // cells stay blank.
            rows.push(Row {
                result,
                asymptote_nats: asymptote(t).ok(),
            });
        }
    }

    match format {
        Format::Csv => {
            println!("d,t,W_nats,W_bits,asymptote_nats,source");
            for row in &rows {
                let asy = row.asymptote_nats.map(fmt_f64).unwrap_or_default();
                println!(
                    "{},{},{},{},{},{}",
                    row.result.d,
                    row.result.t,
                    fmt_f64(row.result.nats),
                    fmt_f64(row.result.bits()),
                    asy,
                    row.result.source.as_str()
                );
            }
        }
        Format::Json => {
            let mut out = String::from("{\"rows\":[");
            for (i, row) in rows.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                let t = match row.result.t {
                    Order::Finite(ft) => ft.to_string(),
                    Order::Infinite => "\"inf\"".to_string(),
                };
                let asy = row
                    .asymptote_nats
                    .map(fmt_f64)
                    .unwrap_or_else(|| "null".to_string());
                out.push_str(&format!(
                    "{{\"d\":{},\"t\":{},\"W_nats\":{},\"W_bits\":{},\"asymptote_nats\":{},\"source\":\"{}\"}}",
                    row.result.d,
                    t,
                    fmt_f64(row.result.nats),
                    fmt_f64(row.result.bits()),
                    asy,
                    row.result.source.as_str()
                ));
            }
            out.push_str("]}");
            println!("{out}");
        }
    }
    Ok(())
}

/// Largest order whose moment check stays within the tensor-power budget,
/// capped at 6.
fn default_tmax(d: usize) -> u32 {
    let mut t = 1u32;
    let mut pow = (d as u128) * (d as u128);
    while t < 6 && pow <= 1024 {
        t += 1;
        pow *= d as u128;
    }
    t
}

/// Resolves a built-in POVM name; `None` means "not a built-in".
fn builtin_povm(name: &str) -> Option<Result<Povm, Failure>> {
    match name {
        "tetrahedron" => Some(Ok(tetrahedron_povm())),
        "octahedron" => Some(Ok(octahedron_povm())),
        "icosahedron" => Some(Ok(icosahedron_povm())),
        "qutrit-sic" => Some(Ok(qutrit_sic_povm())),
        _ => name.strip_prefix("basis:").map(|digits| {
            let d: usize = digits
                .parse()
                .map_err(|_| usage(format!("bad basis dimension {digits:?}")))?;
            basis_povm(d).map_err(core_failure)
        }),
    }
}

fn read_file(path: &std::path::Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

fn cmd_verify_design(spec: &str, tmax: Option<u32>) -> Result<(), Failure> {
    let povm = match builtin_povm(spec) {
        Some(p) => p?,
        None => {
            let text = read_file(std::path::Path::new(spec))?;
            let povm = parse_povm(&text).map_err(core_failure)?;
            let validation = validate_povm(&povm);
            if !validation.is_valid() {
                return Err(Failure {
                    code: 4,
                    msg: format!(
                        "not a valid POVM: min eigenvalue {:.3e}, completeness residual {:.3e}",
                        validation.min_eigenvalue, validation.completeness_residual
                    ),
                });
            }
            povm
        }
    };
    let tmax = match tmax {
        Some(0) => return Err(usage("tmax must be at least 1")),
        Some(t) => t,
        None => default_tmax(povm.dim()),
    };
    let report = check_t_design(&povm, tmax).map_err(core_failure)?;
    println!("{}", design_report_to_json(&report));
    Ok(())
}

fn cmd_tightness(name: &str, restarts: u32, seed: u64) -> Result<(), Failure> {
    let t = match name {
        "tetrahedron" => 2,
        "octahedron" => 3,
        "icosahedron" => 5,
        "qutrit-sic" => 2,
        _ => {
            return Err(usage(format!(
                "tightness supports tetrahedron, octahedron, icosahedron, qutrit-sic; got {name:?}"
            )))
        }
    };
    if restarts == 0 {
        return Err(usage("restarts must be at least 1"));
    }
    let povm = match builtin_povm(name) {
        Some(p) => p?,
        None => unreachable!("name validated above"),
    };
    let config = SearchConfig {
        restarts,
        seed,
        ..SearchConfig::default()
    };
    let report = tightness_report(&povm, name, t, &config).map_err(core_failure)?;
    println!("{}", tightness_to_json(&report));
    Ok(())
}

fn cmd_mutinfo(
    ensemble_path: &std::path::Path,
    povm_path: &std::path::Path,
) -> Result<(), Failure> {
    let ensemble = parse_ensemble(&read_file(ensemble_path)?).map_err(core_failure)?;
    let povm = parse_povm(&read_file(povm_path)?).map_err(core_failure)?;
    let mi = mutual_information(&ensemble, &povm).map_err(core_failure)?;
    println!(
        "{{\"nats\":{},\"bits\":{}}}",
        fmt_f64(mi),
        fmt_f64(mi / std::f64::consts::LN_2)
    );
    Ok(())
}
