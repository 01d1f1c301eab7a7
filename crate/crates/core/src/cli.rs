//! Command-line front end. [`run`] parses an argument vector and returns the
//! exit code with the text for standard output and standard error.

use crate::census::{self, CensusReport, Mode};
use crate::constants::{
    c_p_prime_from_exponents, decimal_string, density_bruteforce, euler_product, local_factor, tau2_component,
    tau_loc2_exact, FactorKind, ProductKind,
};
use crate::descent::{self, assemble_unique_torsor, decide, witness_search, Decision, TorsorAssembly};
use crate::error::Error;
use crate::localsolve::{real_soluble, torsor_exponent_set, torsor_real_signs, x_soluble_at_odd_p};
use crate::model::{reduce, CanonicalSurface, RawCoefficients};
use crate::twoadic::verify::{check_tables, random_tuples};
use crate::twoadic::x_soluble_at_2;
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde_json::{json, Map, Value};
use std::path::PathBuf;

pub const EXIT_OK: i32 = 0;
pub const EXIT_REFUSED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandOutcome {
    pub exit_code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Parser)]
#[command(name = "chatelet", version, about = "Solubility of Y^2 + Z^2 = (aT^2 + b)(cT^2 + d)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide local solubility and the existence of a rational point.
    #[command(allow_negative_numbers = true)]
    Decide(DecideArgs),
    /// Count surfaces in a height box.
    Census(CensusArgs),
    /// Evaluate a density constant.
    Constants(ConstantsArgs),
    /// Cross-check deciders and densities against brute force.
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Run a one-parameter family.
    #[command(subcommand)]
    Family(FamilyCommand),
}

#[derive(Args)]
struct DecideArgs {
    a: i64,
    b: i64,
    c: i64,
    d: i64,
    #[arg(long)]
    json: bool,
    /// Include the local data behind the verdict.
    #[arg(long)]
    explain: bool,
    /// Search for an explicit point up to this height.
    #[arg(long, value_name = "H")]
    witness_height: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum CensusMode {
    Exhaustive,
    Sample,
}

#[derive(Args)]
struct CensusArgs {
    #[arg(long, value_name = "P")]
    pmax: u64,
    #[arg(long, value_enum, default_value = "exhaustive")]
    mode: CensusMode,
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    workers: Option<usize>,
    /// Write the report to FILE; a `.csv` suffix selects CSV.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Include wall-clock time in the report.
    #[arg(long)]
    timing: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Constant {
    Tau,
    TauLoc,
    Thm12Ratio,
    HasseRatio,
    #[value(name = "tau-loc-2")]
    TauLoc2,
    Table6,
}

#[derive(Args)]
struct ConstantsArgs {
    #[arg(long, value_enum)]
    what: Constant,
    #[arg(long, default_value_t = 1_000_000)]
    prime_bound: u64,
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum VerifyCommand {
    /// Brute-force 2-adic density against the exact value.
    TwoAdic {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        json: bool,
    },
    /// Brute-force p-adic density against the local factors.
    PAdic {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        json: bool,
    },
    /// Table deciders against the residue search on random tuples.
    Tables {
        #[arg(long)]
        samples: usize,
        #[arg(long)]
        depth: u32,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        bound: i64,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Subcommand)]
enum FamilyCommand {
    /// The surfaces `X(1, 1 - k, -1, k)`.
    #[command(allow_negative_numbers = true)]
    Iskovskikh {
        #[arg(long)]
        kmin: i64,
        #[arg(long)]
        kmax: i64,
        #[arg(long)]
        json: bool,
    },
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run<I, T>(argv: I) -> CommandOutcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                CommandOutcome { exit_code: code, stdout: text, stderr: String::new() }
            } else {
                CommandOutcome { exit_code: code, stdout: String::new(), stderr: text }
            };
        }
    };
    let (json_mode, result) = match cli.command {
        Command::Decide(args) => (args.json, cmd_decide(&args)),
        Command::Census(args) => (args.json, cmd_census(&args)),
        Command::Constants(args) => (args.json, cmd_constants(&args)),
        Command::Verify(v) => match v {
            VerifyCommand::TwoAdic { k, json } => (json, cmd_verify_padic(2, k)),
            VerifyCommand::PAdic { p, k, json } => (json, cmd_verify_padic(p, k)),
            VerifyCommand::Tables { samples, depth, seed, bound, json } => {
                (json, cmd_verify_tables(samples, depth, seed, bound))
            }
        },
        Command::Family(FamilyCommand::Iskovskikh { kmin, kmax, json }) => (json, cmd_iskovskikh(kmin, kmax)),
    };
    match result {
        Ok((value, exit_code)) => CommandOutcome { exit_code, stdout: render(&value, json_mode), stderr: String::new() },
        Err(e) => {
            let mut body = json!({ "error": e.to_string() });
            if let Error::BudgetExceeded { estimated, budget } = e {
                body["estimated_cost"] = json!(estimated.to_string());
                body["budget"] = json!(budget.to_string());
            }
            CommandOutcome {
                exit_code: EXIT_REFUSED,
                stdout: render(&body, json_mode),
                stderr: format!("refused: {e}\n"),
            }
        }
    }
}

type CmdResult = Result<(Value, i32), Error>;

fn render(v: &Value, json_mode: bool) -> String {
    if json_mode {
        let mut s = serde_json::to_string(v).unwrap_or_default();
        s.push('\n');
        s
    } else {
        let mut s = String::new();
        human(v, "", &mut s);
        s
    }
}

/// `key: value` lines, nesting by indentation.
fn human(v: &Value, indent: &str, out: &mut String) {
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                match x {
                    Value::Object(_) | Value::Array(_) if !is_flat(x) => {
                        out.push_str(&format!("{indent}{k}:\n"));
                        human(x, &format!("{indent}  "), out);
                    }
                    _ => out.push_str(&format!("{indent}{k}: {}\n", scalar(x))),
                }
            }
        }
        Value::Array(items) => {
            for x in items {
                if is_flat(x) {
                    out.push_str(&format!("{indent}- {}\n", scalar(x)));
                } else {
                    out.push_str(&format!("{indent}-\n"));
                    human(x, &format!("{indent}  "), out);
                }
            }
        }
        _ => out.push_str(&format!("{indent}{}\n", scalar(v))),
    }
}

fn is_flat(v: &Value) -> bool {
    match v {
        Value::Array(xs) => xs.iter().all(|x| !x.is_object() && !x.is_array()),
        Value::Object(_) => false,
        _ => true,
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(xs) => xs.iter().map(scalar).collect::<Vec<_>>().join(" "),
        other => other.to_string(),
    }
}

fn rational_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn decision_json(s: &CanonicalSurface, d: &Decision) -> Value {
    let mut m = Map::new();
    m.insert("status".into(), json!(d.status()));
    m.insert("canonical".into(), json!(s.coefficients()));
    match d {
        Decision::LocalObstruction(place) => {
            m.insert("obstruction".into(), json!(place.to_string()));
        }
        Decision::RationalPoint(reason) => {
            m.insert("reason".into(), serde_json::to_value(reason).unwrap_or(Value::Null));
        }
        Decision::HasseFailure { epsilon } => {
            m.insert("epsilon".into(), json!([epsilon.eps1, epsilon.eps2]));
        }
    }
    Value::Object(m)
}

fn explain(s: &CanonicalSurface) -> Result<Value, Error> {
    let mut local = Map::new();
    local.insert("inf".into(), json!(real_soluble(s)));
    local.insert("2".into(), json!(x_soluble_at_2(s)?));
    let mut primes: Vec<u64> = Vec::new();
    for x in [s.m, s.n] {
        for p in crate::arith::factorize(x as i128)?.primes() {
            primes.push(p as u64);
        }
    }
    primes.sort_unstable();
    for p in &primes {
        local.insert(p.to_string(), json!(x_soluble_at_odd_p(s, *p)));
    }
    let mut out = json!({
        "m": s.m,
        "n": s.n,
        "primed": s.primed(),
        "delta": s.delta.to_string(),
        "delta_prime": s.delta_prime.to_string(),
        "local": local,
    });
    if local.values().all(|v| v == &json!(true)) {
        out["torsor_real_signs"] = json!(torsor_real_signs(s)?);
        let mut sets = Map::new();
        for p in descent::analysed_primes(s)? {
            sets.insert(p.to_string(), json!(torsor_exponent_set(s, p)?.pairs));
        }
        out["exponent_sets"] = Value::Object(sets);
        out["assembly"] = match assemble_unique_torsor(s)? {
            TorsorAssembly::Shortcut(r) => json!({ "shortcut": r }),
            TorsorAssembly::Unique { sign, exponents, sign_class } => json!({
                "sign": sign,
                "exponents": exponents.iter().map(|(p, k)| (p.to_string(), json!([k.0, k.1]))).collect::<Map<_, _>>(),
                "epsilon": [sign_class.eps1, sign_class.eps2],
            }),
        };
    }
    Ok(out)
}

fn cmd_decide(args: &DecideArgs) -> CmdResult {
    let s = reduce(RawCoefficients::new(args.a, args.b, args.c, args.d))?;
    let d = decide(&s)?;
    let mut v = decision_json(&s, &d);
    v["input"] = json!([args.a, args.b, args.c, args.d]);
    if let Some(h) = args.witness_height {
        v["witness"] = match d {
            Decision::RationalPoint(_) => match witness_search(&s, h)? {
                Some(w) => json!({
                    "u": w.u.to_string(), "v": w.v.to_string(),
                    "t": w.t.to_string(), "y": w.y.to_string(), "z": w.z.to_string(),
                }),
                None => Value::Null,
            },
            _ => Value::Null,
        };
    }
    if args.explain {
        v["explain"] = explain(&s)?;
    }
    Ok((v, EXIT_OK))
}

fn report_json(r: &CensusReport) -> Value {
    let mut v = serde_json::to_value(r).unwrap_or(Value::Null);
    if let Mode::Sample { count, .. } = r.mode {
        v["samples"] = json!(count);
    }
    v
}

fn cmd_census(args: &CensusArgs) -> CmdResult {
    let workers = args
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1));
    let reports = match args.mode {
        CensusMode::Exhaustive => census::run_exhaustive(&(1..=args.pmax).collect::<Vec<_>>(), workers)?,
        CensusMode::Sample => vec![census::run_sample(args.pmax, args.samples, args.seed, workers)?],
    };
    let reports: Vec<CensusReport> =
        reports.into_iter().map(|r| if args.timing { r } else { r.without_timing() }).collect();
    let last = reports.last().ok_or_else(|| Error::Domain("empty census".into()))?;
    let value = report_json(last);
    if let Some(path) = &args.out {
        let io = |e: std::io::Error| Error::Domain(format!("cannot write {}: {e}", path.display()));
        if path.extension().is_some_and(|x| x.eq_ignore_ascii_case("csv")) {
            census::write_csv(&reports, std::fs::File::create(path).map_err(io)?)?;
        } else {
            std::fs::write(path, serde_json::to_string_pretty(&value).unwrap_or_default()).map_err(io)?;
        }
    }
    Ok((value, EXIT_OK))
}

fn constant_json(name: &str, exact: Option<&BigRational>, value: String, bound: Option<u64>, tail: Option<f64>) -> Value {
    json!({
        "name": name,
        "exact": exact.map(rational_string),
        "value": value,
        "prime_bound": bound,
        "tail_bound": tail,
    })
}

const EXACT_PLACES: usize = 20;

fn cmd_constants(args: &ConstantsArgs) -> CmdResult {
    let product = |kind: ProductKind| -> CmdResult {
        let v = euler_product(kind, args.prime_bound)?;
        Ok((constant_json(kind.name(), None, v.decimal(), Some(v.prime_bound), Some(v.tail_bound)), EXIT_OK))
    };
    match args.what {
        Constant::Tau => product(ProductKind::Tau),
        Constant::TauLoc => product(ProductKind::TauLoc),
        Constant::Thm12Ratio => product(ProductKind::Thm12Ratio),
        Constant::HasseRatio => product(ProductKind::HasseRatio),
        Constant::TauLoc2 => {
            let r = tau_loc2_exact()?;
            Ok((constant_json("tau_loc_2", Some(&r), decimal_string(&r, EXACT_PLACES), None, None), EXIT_OK))
        }
        Constant::Table6 => {
            let mut rows = Vec::new();
            for j in 0..4 {
                let r = tau2_component(1, j)?;
                let name = format!("tau_2(1,{j})");
                rows.push(constant_json(&name, Some(&r), decimal_string(&r, EXACT_PLACES), None, None));
            }
            Ok((json!(rows), EXIT_OK))
        }
    }
}

fn cmd_verify_padic(p: u64, k: u32) -> CmdResult {
    let density = density_bruteforce(p, k)?;
    let mut v = json!({ "p": p, "k": k, "density": density });
    let mut compare = |label: &str, r: BigRational| {
        let x = r.to_f64().unwrap_or(f64::NAN);
        v[label] = json!({ "exact": rational_string(&r), "value": x, "difference": density - x });
    };
    if p == 2 {
        compare("tau_loc_2", tau_loc2_exact()?);
    } else if p % 4 == 1 {
        compare("a_p", local_factor(p, FactorKind::AP));
    } else {
        let u2 = BigRational::new(1.into(), (p as u128 * p as u128).into());
        let a = local_factor(p, FactorKind::AP);
        let two = BigRational::from_integer(2.into());
        compare("closed_form", &a + &two * local_factor(p, FactorKind::CPPrime) * &u2);
        compare("exponent_sum", &a + &two * c_p_prime_from_exponents(p) * &u2);
    }
    Ok((v, EXIT_OK))
}

fn cmd_verify_tables(samples: usize, depth: u32, seed: u64, bound: i64) -> CmdResult {
    if bound < 1 {
        return Err(Error::Domain("bound must be positive".into()));
    }
    let report = check_tables(&random_tuples(seed, samples, bound), depth)?;
    let code = if report.disagreements.is_empty() { EXIT_OK } else { EXIT_REFUSED };
    Ok((serde_json::to_value(&report).unwrap_or(Value::Null), code))
}

fn cmd_iskovskikh(kmin: i64, kmax: i64) -> CmdResult {
    if kmin > kmax {
        return Err(Error::Domain("kmin exceeds kmax".into()));
    }
    let mut entries = Vec::new();
    for k in (kmin..=kmax).filter(|k| *k != 0 && *k != 1) {
        let b = 1i64.checked_sub(k).ok_or(Error::Overflow("family iskovskikh"))?;
        let s = reduce(RawCoefficients::new(1, b, -1, k))?;
        let d = decide(&s)?;
        let mut e = decision_json(&s, &d);
        e["k"] = json!(k);
        entries.push(e);
    }
    Ok((json!({ "family": "iskovskikh", "entries": entries }), EXIT_OK))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> CommandOutcome {
        run(std::iter::once("chatelet").chain(args.iter().copied()))
    }

    #[test]
    fn decide_hasse_failure() {
        let out = run_args(&["decide", "1", "-2", "-1", "3", "--json"]);
        assert_eq!(out.exit_code, 0);
        let v: Value = serde_json::from_str(&out.stdout).unwrap();
        assert_eq!(v["status"], "hasse_failure");
        assert_eq!(v["epsilon"], json!([1, 1]));
    }

    #[test]
    fn decide_with_witness_and_explanation() {
        let out = run_args(&["decide", "1", "-1", "-1", "2", "--json", "--witness-height", "10", "--explain"]);
        let v: Value = serde_json::from_str(&out.stdout).unwrap();
        assert_eq!(v["status"], "rational_point");
        assert_eq!(v["witness"]["t"], "544");
        assert_eq!(v["explain"]["local"]["inf"], true);
    }

    #[test]
    fn family_examples() {
        let out = run_args(&["family", "iskovskikh", "--kmin", "2", "--kmax", "4", "--json"]);
        let v: Value = serde_json::from_str(&out.stdout).unwrap();
        let statuses: Vec<_> = v["entries"].as_array().unwrap().iter().map(|e| e["status"].clone()).collect();
        assert_eq!(statuses, vec![json!("rational_point"), json!("hasse_failure"), json!("rational_point")]);
    }

    #[test]
    fn tau_loc_2_constant() {
        let out = run_args(&["constants", "--what", "tau-loc-2", "--json"]);
        let v: Value = serde_json::from_str(&out.stdout).unwrap();
        assert_eq!(v["exact"], "4751/9216");
        assert!(v["value"].as_str().unwrap().starts_with("0.51551649"));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run_args(&["decide", "1", "2", "--bogus"]).exit_code, EXIT_USAGE);
        assert_eq!(run_args(&["frobnicate"]).exit_code, EXIT_USAGE);
        assert_eq!(run_args(&["decide", "0", "1", "1", "1"]).exit_code, EXIT_REFUSED);
        let big = run_args(&["verify", "two-adic", "--k", "9", "--json"]);
        assert_eq!(big.exit_code, EXIT_REFUSED);
        assert!(big.stdout.contains("estimated_cost"));
        assert_eq!(run_args(&["--help"]).exit_code, EXIT_OK);
    }

    #[test]
    fn human_mode_mirrors_fields() {
        let out = run_args(&["decide", "1", "-2", "-1", "3"]);
        assert!(out.stdout.contains("status: hasse_failure"));
        assert!(out.stdout.contains("epsilon: 1 1"));
    }
}
