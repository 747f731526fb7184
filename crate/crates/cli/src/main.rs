//! Command-line front end for the monodromic-module engine.
//!
//! Exit codes: 0 success, 1 a validation or consistency check failed,
//! 2 the input could not be parsed, 3 the input is outside the supported
//! class (for example a monodromy with an irrational eigenvalue).

use clap::{Parser, Subcommand, ValueEnum};
use mhc_core::corpus::alpha_candidates;
use mhc_core::eigen::{generalized_eigenspaces, EigenError};
use mhc_core::filtops::{
    can_var, fmt_exponent, nearby_cycles, realized_exponents, v_filtration, vanishing_cycles,
    FiltrationTable, Window,
};
use mhc_core::fourier::{
    compare_tables, double_fourier_check, fourier_transform, hodge_closed_formula,
    hodge_via_gluing, irr_hodge,
};
use mhc_core::gluing::{localize_shriek, localize_star, reconstruct_from_gluing, xi_stable};
use mhc_core::infinity::{
    check_infinity_localization, check_infinity_specializability, compare_chart_tables,
    irr_infinity, table_slice, Chart,
};
use mhc_core::matrix::Matrix;
use mhc_core::monomod::MonodromicModule;
use mhc_core::rational::Rational;
use mhc_core::rescale::{infinity_oracle, irr_from_oracle};
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "mhc", version, about = "Exact computations with monodromic filtered modules")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Star,
    Shriek,
}

#[derive(Clone, Copy, ValueEnum)]
enum Route {
    Gluing,
    Formula,
}

#[derive(Clone, Copy, ValueEnum)]
enum CheckKind {
    Specializability,
    Localization,
    All,
}

#[derive(Subcommand)]
enum Verb {
    /// Check a module file against all structural invariants.
    Validate { input: PathBuf },
    /// Fourier transform of a module.
    Fourier {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Hodge filtration of the Fourier transform, by either route.
    Hodge {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "gluing")]
        route: Route,
        #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
        range: Option<Window>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Irregular Hodge filtration of the transform at a rational parameter.
    IrrHodge {
        input: PathBuf,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        alpha: Rational,
        #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
        range: Option<Window>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Compare the rescaling-family oracle against the closed formulas.
    OracleCheck {
        input: PathBuf,
        /// Also compare the two descriptions of the chart at infinity.
        #[arg(long)]
        infinity: bool,
        #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
        range: Option<Window>,
    },
    /// Irregular filtration on the chart at infinity, with optional checks.
    Infinity {
        input: PathBuf,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        alpha: Rational,
        #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
        range: Option<Window>,
        #[arg(long, value_enum)]
        check: Option<CheckKind>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Localization along one axis.
    Localize {
        input: PathBuf,
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        axis: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Stabilized maximal extension along the first axis.
    Xi {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Rebuild the module from its gluing data and print the result.
    Reconstruct {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Full dossier: decomposition, V-filtration, cycles, transform,
    /// both Hodge routes, irregular filtrations, infinity tables, checks.
    Report {
        input: PathBuf,
        #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
        range: Option<Window>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

enum Failure {
    Check(Vec<String>),
    Parse(String),
    Unsupported(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Check(_) => 1,
            Failure::Parse(_) => 2,
            Failure::Unsupported(_) => 3,
        }
    }

    fn print(&self) {
        match self {
            Failure::Check(lines) => {
                for l in lines {
                    eprintln!("check failed: {l}");
                }
            }
            Failure::Parse(msg) => eprintln!("parse error: {msg}"),
            Failure::Unsupported(msg) => eprintln!("unsupported input: {msg}"),
        }
    }
}

fn parse_range(s: &str) -> Result<Window, String> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| format!("expected a..b, got {s}"))?;
    let lo: i64 = a.trim().parse().map_err(|e| format!("bad range start: {e}"))?;
    let hi: i64 = b.trim().parse().map_err(|e| format!("bad range end: {e}"))?;
    if lo > hi {
        return Err(format!("empty range {s}"));
    }
    Ok(Window::new(lo, hi))
}

fn load_module(path: &PathBuf) -> Result<MonodromicModule, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))?;
    let m = MonodromicModule::from_json(&text)
        .map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))?;
    m.validate().map_err(|issues| {
        Failure::Check(issues.into_iter().map(|i| i.to_string()).collect())
    })?;
    Ok(m)
}

/// Aligned text table for a filtration table: one row per jump,
/// columns (piece exponent, level, dimension gained).
fn print_filtration_table(table: &FiltrationTable) {
    println!("{:<18} {:>6} {:>8}", "exponent", "level", "gained");
    for (key, f) in table {
        for (p, gained) in f.jump_multiset() {
            println!("{:<18} {:>6} {:>8}", fmt_exponent(key), p, gained);
        }
    }
}

fn filtration_table_json(table: &FiltrationTable) -> serde_json::Value {
    serde_json::Value::Array(
        table
            .iter()
            .map(|(key, f)| {
                serde_json::json!({
                    "exponent": key.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
                    "jumps": f
                        .jump_multiset()
                        .iter()
                        .map(|(p, gained)| serde_json::json!({"level": p, "gained": gained}))
                        .collect::<Vec<_>>(),
                })
            })
            .collect(),
    )
}

fn print_module(m: &MonodromicModule, format: Format) {
    match format {
        Format::Json => println!("{}", m.to_json()),
        Format::Text => {
            println!("rank {} module, {} window pieces", m.rank(), m.pieces().len());
            println!("{:<18} {:>5}  {:<16} {}", "exponent", "dim", "jumps", "Jordan types");
            for (key, piece) in m.pieces() {
                let jumps = piece
                    .filtration
                    .jump_multiset()
                    .iter()
                    .map(|(p, g)| format!("{p}:{g}"))
                    .collect::<Vec<_>>()
                    .join(" ");
                let jordan = piece
                    .nilpotents
                    .iter()
                    .map(|n| format!("{:?}", n.jordan_type()))
                    .collect::<Vec<_>>()
                    .join(" ");
                println!("{:<18} {:>5}  {:<16} {}", format!("{key}"), piece.dim, jumps, jordan);
            }
        }
    }
}

fn run_validate(input: &PathBuf) -> Result<(), Failure> {
    let text = std::fs::read_to_string(input)
        .map_err(|e| Failure::Parse(format!("{}: {e}", input.display())))?;
    // A plain square matrix is accepted as an Euler-operator presentation:
    // it must split into rational generalized eigenspaces to define a
    // monodromic module at all.
    if let Ok(value) = serde_json::from_str::<serde_json::Value>(&text) {
        if let Some(euler) = value.get("euler") {
            let rows: Vec<Vec<Rational>> = serde_json::from_value(euler.clone())
                .map_err(|e| Failure::Parse(format!("bad euler matrix: {e}")))?;
            let n = rows.len();
            let flat: Vec<Rational> = rows
                .iter()
                .inspect(|r| assert_eq!(r.len(), n, "euler matrix must be square"))
                .flatten()
                .cloned()
                .collect();
            let m = Matrix::new(n, n, flat);
            return match generalized_eigenspaces(&m) {
                Ok(spaces) => {
                    println!("ok: euler operator splits into {} rational eigenspaces", spaces.len());
                    for (value, space) in spaces {
                        println!("  eigenvalue {:<8} dim {}", value.to_string(), space.dim());
                    }
                    Ok(())
                }
                Err(EigenError::NonRationalEigenvalue { residual_degree }) => {
                    Err(Failure::Unsupported(format!(
                        "euler operator has an irrational eigenvalue (irreducible factor of degree {residual_degree})"
                    )))
                }
                Err(e) => Err(Failure::Parse(e.to_string())),
            };
        }
    }
    let m = MonodromicModule::from_json(&text)
        .map_err(|e| Failure::Parse(format!("{}: {e}", input.display())))?;
    match m.validate() {
        Ok(()) => {
            println!("ok: rank {} module with {} window pieces", m.rank(), m.pieces().len());
            Ok(())
        }
        Err(issues) => Err(Failure::Check(issues.into_iter().map(|i| i.to_string()).collect())),
    }
}

fn run_oracle_check(m: &MonodromicModule, with_infinity: bool, w: Window) -> Result<(), Failure> {
    let mut mismatches = Vec::new();
    println!("{:<10} {:>6}  {}", "alpha", "level", "status");
    for alpha in alpha_candidates(m) {
        let oracle = irr_from_oracle(m, &alpha);
        let formula = irr_hodge(m, &alpha, w);
        let mut levels: Vec<i64> = Vec::new();
        for f in oracle.values().chain(formula.values()) {
            levels.extend(f.jump_multiset().iter().map(|(p, _)| *p));
        }
        levels.sort();
        levels.dedup();
        for p in levels {
            let keys: std::collections::BTreeSet<_> =
                oracle.keys().chain(formula.keys()).cloned().collect();
            let equal = keys.iter().all(|k| {
                let a = oracle.get(k).map(|f| f.at(p));
                let b = formula.get(k).map(|f| f.at(p));
                a == b
            });
            println!(
                "{:<10} {:>6}  {}",
                alpha.to_string(),
                p,
                if equal { "equal" } else { "MISMATCH" }
            );
            if !equal {
                mismatches.push(format!("oracle vs formula at alpha {alpha}, level {p}"));
            }
        }
        if with_infinity {
            let chart = Chart::new(m);
            let table = irr_infinity(&chart, &alpha, w, 4);
            for p in -3..=3 {
                let a = table_slice(&table, p);
                let b = infinity_oracle(&chart, &alpha, p, w, 4);
                let diff = compare_chart_tables(&a, &b);
                println!(
                    "{:<10} {:>6}  {}",
                    format!("{alpha} (inf)"),
                    p,
                    if diff.is_empty() { "equal" } else { "MISMATCH" }
                );
                mismatches.extend(
                    diff.into_iter()
                        .map(|d| format!("infinity tables at alpha {alpha}, level {p}: {d}")),
                );
            }
        }
    }
    if mismatches.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(mismatches))
    }
}

fn run_infinity(
    m: &MonodromicModule,
    alpha: &Rational,
    w: Window,
    check: Option<CheckKind>,
    format: Format,
) -> Result<(), Failure> {
    let chart = Chart::new(m);
    let table = irr_infinity(&chart, alpha, w, 4);
    match format {
        Format::Text => print_filtration_table(&table),
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&filtration_table_json(&table)).unwrap()
        ),
    }
    let mut errors = Vec::new();
    if matches!(check, Some(CheckKind::Specializability) | Some(CheckKind::All)) {
        match check_infinity_specializability(&chart, alpha, w, 4, 1) {
            Ok(()) => println!("specializability: ok"),
            Err(e) => {
                println!("specializability: FAILED");
                errors.extend(e);
            }
        }
    }
    if matches!(check, Some(CheckKind::Localization) | Some(CheckKind::All)) {
        match check_infinity_localization(&chart, alpha, w, 4, 1) {
            Ok(()) => println!("localization: ok"),
            Err(e) => {
                println!("localization: FAILED");
                errors.extend(e);
            }
        }
    }
    if errors.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(errors))
    }
}

fn run_report(m: &MonodromicModule, w: Window, format: Format) -> Result<(), Failure> {
    let mut dossier = serde_json::Map::new();
    let mut checks: Vec<(String, Result<(), Vec<String>>)> = Vec::new();

    // 1. decomposition over the window
    let decomposition: Vec<serde_json::Value> = realized_exponents(m, w)
        .into_iter()
        .map(|e| {
            let piece = m.piece_at(&e);
            serde_json::json!({
                "gamma": e.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
                "dims": piece.dim,
                "filtration_jumps": piece
                    .filtration
                    .jump_multiset()
                    .iter()
                    .map(|(p, g)| serde_json::json!([p, g]))
                    .collect::<Vec<_>>(),
            })
        })
        .collect();
    dossier.insert("decomposition".into(), serde_json::Value::Array(decomposition.clone()));

    // 2. V-filtration dims along each axis at integer cuts
    let mut vsection = Vec::new();
    for axis in 0..m.rank() {
        for c in w.lo..=w.hi {
            let gamma = Rational::from_int(c);
            let total: usize = v_filtration(m, axis, &gamma, w).iter().map(|(_, p)| p.dim).sum();
            vsection.push(serde_json::json!({"axis": axis, "gamma": c, "dim": total}));
        }
    }
    dossier.insert("v_filtration".into(), serde_json::Value::Array(vsection.clone()));

    // 3. nearby/vanishing cycles and the boundary maps along each axis
    let mut cycles = Vec::new();
    for axis in 0..m.rank() {
        let psi = nearby_cycles(m, axis, &Rational::zero());
        let phi = vanishing_cycles(m, axis);
        let cv = can_var(m, axis);
        let boundary: Vec<serde_json::Value> = cv
            .iter()
            .map(|(k, (c, v))| {
                serde_json::json!({
                    "key": format!("{k}"),
                    "can_rank": c.rank(),
                    "var_rank": v.rank(),
                })
            })
            .collect();
        cycles.push(serde_json::json!({
            "axis": axis,
            "nearby_pieces": psi.module.pieces().len(),
            "vanishing_pieces": phi.module.pieces().len(),
            "boundary": boundary,
        }));
    }
    dossier.insert("cycles".into(), serde_json::Value::Array(cycles.clone()));

    // 4. Fourier transform
    let mhat = fourier_transform(m);
    dossier.insert(
        "fourier_transform".into(),
        serde_json::from_str(&mhat.to_json()).unwrap(),
    );

    // 5. both Hodge routes
    let gluing = hodge_via_gluing(m, w);
    let formula = hodge_closed_formula(m, w);
    checks.push(("hodge routes agree".into(), compare_tables(&gluing, &formula)));
    dossier.insert("hodge".into(), filtration_table_json(&formula));

    // 6. irregular filtration at every jump parameter
    let mut irr = serde_json::Map::new();
    for alpha in alpha_candidates(m) {
        irr.insert(alpha.to_string(), filtration_table_json(&irr_hodge(m, &alpha, w)));
        let oracle = irr_from_oracle(m, &alpha);
        let same = oracle == irr_hodge(m, &alpha, w);
        checks.push((
            format!("rescaling oracle at alpha {alpha}"),
            if same { Ok(()) } else { Err(vec![format!("oracle differs at alpha {alpha}")]) },
        ));
    }
    dossier.insert("irregular_hodge".into(), serde_json::Value::Object(irr.clone()));

    // 7. infinity tables and their checks
    let chart = Chart::new(m);
    let mut infinity = serde_json::Map::new();
    for alpha in alpha_candidates(m) {
        infinity.insert(
            alpha.to_string(),
            filtration_table_json(&irr_infinity(&chart, &alpha, w, 4)),
        );
        checks.push((
            format!("infinity specializability at alpha {alpha}"),
            check_infinity_specializability(&chart, &alpha, w, 4, 1),
        ));
        checks.push((
            format!("infinity localization at alpha {alpha}"),
            check_infinity_localization(&chart, &alpha, w, 4, 1),
        ));
    }
    dossier.insert("infinity".into(), serde_json::Value::Object(infinity.clone()));

    // 8. global checks
    checks.push(("double transform".into(), double_fourier_check(m)));
    let star = localize_star(m, 0);
    checks.push((
        "star localization idempotent".into(),
        if localize_star(&star, 0) == star { Ok(()) } else { Err(vec!["not idempotent".into()]) },
    ));

    let mut failed = Vec::new();
    let check_json: Vec<serde_json::Value> = checks
        .iter()
        .map(|(name, r)| {
            serde_json::json!({"name": name, "ok": r.is_ok()})
        })
        .collect();
    for (name, r) in &checks {
        if let Err(e) = r {
            failed.extend(e.iter().map(|s| format!("{name}: {s}")));
        }
    }
    dossier.insert("checks".into(), serde_json::Value::Array(check_json));

    match format {
        Format::Json => {
            println!(
                "{}",
                serde_json::to_string_pretty(&serde_json::Value::Object(dossier)).unwrap()
            );
        }
        Format::Text => {
            println!("== decomposition ==");
            println!("{:<18} {:>5}  jumps", "gamma", "dim");
            for row in &decomposition {
                let gamma: Vec<String> = row["gamma"]
                    .as_array()
                    .unwrap()
                    .iter()
                    .map(|v| v.as_str().unwrap().to_string())
                    .collect();
                let jumps: Vec<String> = row["filtration_jumps"]
                    .as_array()
                    .unwrap()
                    .iter()
                    .map(|j| format!("{}:{}", j[0], j[1]))
                    .collect();
                println!("({:<16} {:>5}  {}", format!("{})", gamma.join(", ")), row["dims"], jumps.join(" "));
            }
            println!("\n== V-filtration (integer cuts) ==");
            for row in &vsection {
                println!("axis {}  gamma >= {:>3}  dim {}", row["axis"], row["gamma"], row["dim"]);
            }
            println!("\n== cycles ==");
            for row in &cycles {
                println!(
                    "axis {}: nearby pieces {}, vanishing pieces {}",
                    row["axis"], row["nearby_pieces"], row["vanishing_pieces"]
                );
            }
            println!("\n== Fourier transform ==");
            print_module(&mhat, Format::Text);
            println!("\n== Hodge filtration of the transform ==");
            print_filtration_table(&formula);
            for alpha in alpha_candidates(m) {
                println!("\n== irregular Hodge, alpha = {alpha} ==");
                print_filtration_table(&irr_hodge(m, &alpha, w));
                println!("\n== infinity chart, alpha = {alpha} ==");
                print_filtration_table(&irr_infinity(&chart, &alpha, w, 4));
            }
            println!("\n== checks ==");
            for (name, r) in &checks {
                println!("{:<44} {}", name, if r.is_ok() { "ok" } else { "FAILED" });
            }
        }
    }

    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(failed))
    }
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    match cli.verb {
        Verb::Validate { input } => run_validate(&input),
        Verb::Fourier { input, format } => {
            let m = load_module(&input)?;
            print_module(&fourier_transform(&m), format);
            Ok(())
        }
        Verb::Hodge { input, route, range, format } => {
            let m = load_module(&input)?;
            let w = range.unwrap_or_default();
            let table = match route {
                Route::Gluing => hodge_via_gluing(&m, w),
                Route::Formula => hodge_closed_formula(&m, w),
            };
            match format {
                Format::Text => print_filtration_table(&table),
                Format::Json => println!(
                    "{}",
                    serde_json::to_string_pretty(&filtration_table_json(&table)).unwrap()
                ),
            }
            Ok(())
        }
        Verb::IrrHodge { input, alpha, range, format } => {
            let m = load_module(&input)?;
            let table = irr_hodge(&m, &alpha, range.unwrap_or_default());
            match format {
                Format::Text => print_filtration_table(&table),
                Format::Json => println!(
                    "{}",
                    serde_json::to_string_pretty(&filtration_table_json(&table)).unwrap()
                ),
            }
            Ok(())
        }
        Verb::OracleCheck { input, infinity, range } => {
            let m = load_module(&input)?;
            run_oracle_check(&m, infinity, range.unwrap_or(Window::new(-4, 4)))
        }
        Verb::Infinity { input, alpha, range, check, format } => {
            let m = load_module(&input)?;
            run_infinity(&m, &alpha, range.unwrap_or(Window::new(-4, 4)), check, format)
        }
        Verb::Localize { input, mode, axis, format } => {
            let m = load_module(&input)?;
            if axis >= m.rank() {
                return Err(Failure::Parse(format!(
                    "axis {axis} out of range for a rank {} module",
                    m.rank()
                )));
            }
            let out = match mode {
                Mode::Star => localize_star(&m, axis),
                Mode::Shriek => localize_shriek(&m, axis),
            };
            print_module(&out, format);
            Ok(())
        }
        Verb::Xi { input, format } => {
            let m = load_module(&input)?;
            let (k0, xi) = xi_stable(&m);
            if format == Format::Text {
                println!("stabilizes at k = {k0}");
            }
            print_module(&xi, format);
            Ok(())
        }
        Verb::Reconstruct { input, format } => {
            let m = load_module(&input)?;
            print_module(&reconstruct_from_gluing(&m).module, format);
            Ok(())
        }
        Verb::Report { input, range, format } => {
            let m = load_module(&input)?;
            run_report(&m, range.unwrap_or(Window::new(-4, 4)), format)
        }
    }
}

fn main() {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => {}
        Err(f) => {
            f.print();
            std::process::exit(f.code());
        }
    }
}
