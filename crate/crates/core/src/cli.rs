//! Command-line front end.
//!
//! Distributions are read from a JSON file of the form
//!
//! ```json
//! {
//!   "alphabets": { "A": ["0", "1"], "B": ["0", "1", "e"], "E": ["0", "1", "e"] },
//!   "pmf": [ { "A": "0", "B": "0", "E": "e", "p": 0.1875 }, ... ]
//! }
//! ```
//!
//! Variable order follows the `alphabets` object; unlisted cells have mass 0.
//! Exit codes: 0 success, 1 malformed input or flags, 2 probabilistic
//! invariant breach.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::binning::{run_erasure_encoder_scheme, run_sw_binning, SimReport};
use crate::erasure::{make_erasure_joint, ErasureParams};
use crate::error::Error;
use crate::optimize::OptimizerConfig;
use crate::orderings::{check_stochastic_degradation, search_less_noisy_violation, Direction, OrderingVerdict};
use crate::prob::{Alphabet, Channel, JointPmf};
use crate::regions::{coded_inner_bound_sample, coded_v_channels, maximize_equivocation, SwitchConfig};

#[derive(Debug, Parser)]
#[command(name = "secrecy-region", version, about = "Compression-equivocation regions with side information")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Entropies and (conditional) mutual informations of every variable.
    Measures {
        #[arg(short, long)]
        input: PathBuf,
    },
    /// Region computations.
    Region {
        #[command(subcommand)]
        kind: RegionKind,
    },
    /// Degradation and less-noisy checks between B and E.
    Order {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        check: OrderCheck,
        #[command(flatten)]
        opt: OptArgs,
    },
    /// Monte Carlo simulations.
    Simulate {
        #[command(subcommand)]
        kind: SimKind,
    },
    /// Built-in distributions.
    Preset {
        #[command(subcommand)]
        kind: PresetKind,
    },
}

#[derive(Debug, Args)]
struct OptArgs {
    #[arg(long, default_value_t = 64)]
    starts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl OptArgs {
    fn config(&self) -> OptimizerConfig {
        OptimizerConfig {
            starts: self.starts,
            seed: self.seed,
            ..Default::default()
        }
    }
}

#[derive(Debug, Subcommand)]
enum RegionKind {
    /// Uncoded side information at Bob (variables A, B, E).
    Uncoded {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long, default_value = "none", value_parser = parse_switches)]
        switches: SwitchConfig,
        #[command(flatten)]
        opt: OptArgs,
    },
    /// Helper-coded side information (variables A, C, E; B is read as C if C is absent).
    Coded {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long, default_value_t = 4)]
        v_grid: usize,
        #[command(flatten)]
        opt: OptArgs,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OrderCheck {
    DegradedEb,
    DegradedBe,
    LessNoisyEb,
    LessNoisyBe,
}

#[derive(Debug, Subcommand)]
enum SimKind {
    /// Random binning with MAP decoding at Bob.
    Binning {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        rate: f64,
        #[arg(long)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Erasure scheme that sends exactly Bob's erased bits.
    ErasureScheme {
        #[arg(long)]
        pb: f64,
        #[arg(long)]
        pe: f64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Subcommand)]
enum PresetKind {
    /// Uniform bit with independent erasures at Bob and Eve.
    Erasure {
        #[arg(long)]
        pb: f64,
        #[arg(long)]
        pe: f64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn parse_switches(s: &str) -> Result<SwitchConfig, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Failure with its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn malformed(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self {
            code: if e.is_invariant_breach() { 2 } else { 1 },
            message: e.to_string(),
        }
    }
}

/// Formats with 12 significant digits in positional notation.
pub fn fmt_num(x: f64) -> String {
    if !x.is_finite() {
        return "null".into();
    }
    if x == 0.0 {
        return "0".into();
    }
    let exp = x.abs().log10().floor() as i64;
    let prec = (11 - exp).max(0) as usize;
    format!("{x:.prec$}")
}

/// Pretty JSON with every float printed by [`fmt_num`].
pub fn render_json(v: &Value) -> String {
    let mut out = String::new();
    render_into(v, 0, &mut out);
    out.push('\n');
    out
}

fn render_into(v: &Value, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth + 1);
    let close = "  ".repeat(depth);
    match v {
        Value::Number(n) => match (n.as_i64(), n.as_u64()) {
            (Some(i), _) => write!(out, "{i}").unwrap(),
            (_, Some(u)) => write!(out, "{u}").unwrap(),
            _ => out.push_str(&fmt_num(n.as_f64().unwrap_or(f64::NAN))),
        },
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) if items.iter().all(|i| i.is_number()) => {
            out.push('[');
            for (k, item) in items.iter().enumerate() {
                if k > 0 {
                    out.push_str(", ");
                }
                render_into(item, depth + 1, out);
            }
            out.push(']');
        }
        Value::Array(items) => {
            out.push_str("[\n");
            for (k, item) in items.iter().enumerate() {
                out.push_str(&pad);
                render_into(item, depth + 1, out);
                out.push_str(if k + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&close);
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            out.push_str("{\n");
            for (k, (key, item)) in map.iter().enumerate() {
                out.push_str(&pad);
                out.push_str(&Value::String(key.clone()).to_string());
                out.push_str(": ");
                render_into(item, depth + 1, out);
                out.push_str(if k + 1 < map.len() { ",\n" } else { "\n" });
            }
            out.push_str(&close);
            out.push('}');
        }
        other => out.push_str(&other.to_string()),
    }
}

/// Float JSON value; integers stay integers only when passed as such.
fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

/// Parses a distribution file body.
pub fn parse_distribution(text: &str) -> Result<JointPmf, Error> {
    let malformed = |m: String| Error::InvalidParameter(format!("malformed distribution: {m}"));
    let root: Value = serde_json::from_str(text).map_err(|e| malformed(e.to_string()))?;
    let alphabets = root
        .get("alphabets")
        .and_then(Value::as_object)
        .ok_or_else(|| malformed("missing `alphabets` object".into()))?;
    let mut vars = Vec::with_capacity(alphabets.len());
    for (name, symbols) in alphabets {
        let symbols = symbols
            .as_array()
            .ok_or_else(|| malformed(format!("alphabet `{name}` is not a list")))?
            .iter()
            .map(|s| {
                s.as_str()
                    .map(str::to_string)
                    .ok_or_else(|| malformed(format!("alphabet `{name}` has a non-string symbol")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        vars.push(Alphabet::new(name.clone(), symbols)?);
    }
    if vars.is_empty() {
        return Err(malformed("no variables declared".into()));
    }
    let records = root
        .get("pmf")
        .and_then(Value::as_array)
        .ok_or_else(|| malformed("missing `pmf` list".into()))?;
    let shape: Vec<usize> = vars.iter().map(Alphabet::len).collect();
    let mut mass = vec![0.0; shape.iter().product()];
    let mut seen = vec![false; mass.len()];
    for (r, rec) in records.iter().enumerate() {
        let obj = rec
            .as_object()
            .ok_or_else(|| malformed(format!("record {r} is not an object")))?;
        if let Some(extra) = obj.keys().find(|k| *k != "p" && !alphabets.contains_key(*k)) {
            return Err(Error::UnknownVariable(extra.clone()));
        }
        let mut cell = 0;
        for v in &vars {
            let label = obj
                .get(v.name())
                .and_then(Value::as_str)
                .ok_or_else(|| malformed(format!("record {r} lacks a label for `{}`", v.name())))?;
            let k = v.index_of(label).ok_or_else(|| Error::UnknownSymbol {
                variable: v.name().to_string(),
                symbol: label.to_string(),
            })?;
            cell = cell * v.len() + k;
        }
        let p = obj
            .get("p")
            .and_then(Value::as_f64)
            .ok_or_else(|| malformed(format!("record {r} lacks a numeric `p`")))?;
        if seen[cell] {
            return Err(malformed(format!("record {r} repeats an earlier cell")));
        }
        seen[cell] = true;
        mass[cell] = p;
    }
    JointPmf::new(vars, mass)
}

/// Serializes a joint as a distribution file, listing nonzero cells only.
pub fn distribution_json(joint: &JointPmf) -> Value {
    let mut alphabets = Map::new();
    for v in joint.variables() {
        alphabets.insert(v.name().into(), json!(v.symbols()));
    }
    let mut records = Vec::new();
    crate::prob::for_each_cell(&joint.shape(), |d, c| {
        let p = joint.mass()[c];
        if p > 0.0 {
            let mut rec = Map::new();
            for (v, &k) in joint.variables().iter().zip(d) {
                rec.insert(v.name().into(), json!(v.symbols()[k]));
            }
            rec.insert("p".into(), num(p));
            records.push(Value::Object(rec));
        }
    });
    json!({ "alphabets": alphabets, "pmf": records })
}

fn channel_json(ch: &Channel) -> Value {
    let rows: Vec<Value> = ch
        .input_tuples()
        .iter()
        .zip(ch.rows())
        .map(|(d, row)| {
            let mut given = Map::new();
            for (a, &k) in ch.from_vars().iter().zip(d) {
                given.insert(a.name().into(), json!(a.symbols()[k]));
            }
            json!({ "given": given, "p": row.iter().map(|&p| num(p)).collect::<Vec<_>>() })
        })
        .collect();
    json!({
        "from": ch.from_names(),
        "to": ch.to().name(),
        "symbols": ch.to().symbols(),
        "rows": rows,
    })
}

fn report_json(r: &SimReport) -> Value {
    json!({
        "trials": r.trials,
        "p_e_hat": num(r.p_e_hat),
        "equiv_hat": num(r.equiv_hat),
        "equiv_stderr": num(r.equiv_stderr),
        "seed": r.seed,
    })
}

fn verdict_json(check: &str, v: &OrderingVerdict) -> Value {
    let mut m = Map::new();
    m.insert("check".into(), json!(check));
    m.insert("kind".into(), json!(v.kind()));
    match v {
        OrderingVerdict::Degraded { certificate, physical } => {
            m.insert("certificate".into(), channel_json(certificate));
            m.insert("physically_degraded".into(), json!(physical));
        }
        OrderingVerdict::NotDegraded => {}
        OrderingVerdict::LessNoisyFalsified { witness, gap } => {
            m.insert("witness".into(), channel_json(witness));
            m.insert("gap".into(), num(*gap));
        }
        OrderingVerdict::LessNoisyNotFalsified { budget_used } => {
            m.insert("budget_used".into(), json!(budget_used));
        }
    }
    Value::Object(m)
}

fn measures_json(joint: &JointPmf) -> Result<Value, Error> {
    let names = joint.variable_names();
    let mut entropy = Map::new();
    let mut cond_entropy = Map::new();
    let mut mi = Map::new();
    let mut cmi = Map::new();
    for &x in &names {
        entropy.insert(x.into(), num(joint.entropy(&[x], &[])?));
    }
    for &x in &names {
        for &y in &names {
            if x != y {
                cond_entropy.insert(format!("{x}|{y}"), num(joint.entropy(&[x], &[y])?));
            }
        }
    }
    for (i, &x) in names.iter().enumerate() {
        for &y in &names[i + 1..] {
            mi.insert(format!("{x};{y}"), num(joint.mutual_information(&[x], &[y], &[])?));
            for &z in &names {
                if z != x && z != y {
                    cmi.insert(
                        format!("{x};{y}|{z}"),
                        num(joint.mutual_information(&[x], &[y], &[z])?),
                    );
                }
            }
        }
    }
    Ok(json!({
        "variables": names,
        "joint_entropy": num(joint.entropy(&names, &[])?),
        "entropy": entropy,
        "conditional_entropy": cond_entropy,
        "mutual_information": mi,
        "conditional_mutual_information": cmi,
    }))
}

fn read_distribution(path: &Path) -> Result<JointPmf, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::malformed(format!("cannot read {}: {e}", path.display())))?;
    Ok(parse_distribution(&text)?)
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<(), Failure> {
    let io_fail = |e: std::io::Error| Failure::malformed(format!("write failed: {e}"));
    let text = match cli.command {
        Command::Measures { input } => render_json(&measures_json(&read_distribution(&input)?)?),
        Command::Region {
            kind: RegionKind::Uncoded { input, switches, opt },
        } => {
            let joint = read_distribution(&input)?;
            let r = maximize_equivocation(&joint, switches, &opt.config())?;
            render_json(&json!({
                "switches": switches.to_string(),
                "r_a_min": num(joint.entropy(&["A"], &["B"])?),
                "delta_star": num(r.delta_star),
                "best_objective": num(r.best_objective),
                "starts_agreeing": r.starts_agreeing,
                "starts": r.objective_trace.len(),
                "best_u": channel_json(&r.best_u),
            }))
        }
        Command::Region {
            kind: RegionKind::Coded { input, v_grid, opt },
        } => {
            let mut joint = read_distribution(&input)?;
            if !joint.has_variable("C") && joint.has_variable("B") {
                joint = joint.rename("B", "C")?;
            }
            let cfg = opt.config();
            let mut csv = String::from("r_a,r_c,delta_star\n");
            for v in coded_v_channels(&joint, v_grid, opt.seed)? {
                let s = coded_inner_bound_sample(&joint, &v, &cfg)?;
                writeln!(
                    csv,
                    "{},{},{}",
                    fmt_num(s.corner.r_a),
                    fmt_num(s.corner.r_c.unwrap_or(0.0)),
                    fmt_num(s.delta_star)
                )
                .expect("string write");
            }
            csv
        }
        Command::Order { input, check, opt } => {
            let joint = read_distribution(&input)?;
            let (name, verdict) = match check {
                OrderCheck::DegradedEb => (
                    "degraded-eb",
                    check_stochastic_degradation(&joint, Direction::EWrtB)?,
                ),
                OrderCheck::DegradedBe => (
                    "degraded-be",
                    check_stochastic_degradation(&joint, Direction::BWrtE)?,
                ),
                OrderCheck::LessNoisyEb => (
                    "less-noisy-eb",
                    search_less_noisy_violation(&joint, Direction::EWrtB, &opt.config())?,
                ),
                OrderCheck::LessNoisyBe => (
                    "less-noisy-be",
                    search_less_noisy_violation(&joint, Direction::BWrtE, &opt.config())?,
                ),
            };
            render_json(&verdict_json(name, &verdict))
        }
        Command::Simulate {
            kind: SimKind::Binning { input, n, rate, trials, seed },
        } => {
            let joint = read_distribution(&input)?;
            render_json(&report_json(&run_sw_binning(&joint, n, rate, trials, seed)?))
        }
        Command::Simulate {
            kind: SimKind::ErasureScheme { pb, pe, n, trials, seed },
        } => {
            let params = ErasureParams::new(pb, pe)?;
            render_json(&report_json(&run_erasure_encoder_scheme(params, n, trials, seed)?))
        }
        Command::Preset {
            kind: PresetKind::Erasure { pb, pe, output },
        } => {
            let body = render_json(&distribution_json(&make_erasure_joint(ErasureParams::new(pb, pe)?)));
            if let Some(path) = output {
                std::fs::write(&path, body)
                    .map_err(|e| Failure::malformed(format!("cannot write {}: {e}", path.display())))?;
                return Ok(());
            }
            body
        }
    };
    out.write_all(text.as_bytes()).map_err(io_fail)
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run_command<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if code == 0 { out } else { err };
            let _ = sink.write_all(rendered.as_bytes());
            return code;
        }
    };
    match execute(cli, out) {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}
