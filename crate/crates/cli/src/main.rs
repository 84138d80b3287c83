//! `sixr`: mobility conditions and numerical mobility checks for closed 6R
//! linkages.
//!
//! Every command prints one JSON report on stdout. `--out` receives the
//! command's artifact: the parameter file for `family`, the curve CSV for
//! `trace`, the hypothesis stream for `diagram enumerate`, and a copy of the
//! report otherwise.
//!
//! Exit codes: 0 conditions hold or trace succeeded, 1 conditions excluded,
//! rigidity certificate or no curve found, 2 input error.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use sixr::diagram::{self, BondHypothesis, Verdict};
use sixr::families::{self, Builtin, Family};
use sixr::mobility::{self, ConfigCurve, TraceOptions};
use sixr::quadpoly::{self, QuadPoly, QuadSign};
use sixr::tpoly::TPoly;
use sixr::{Cplx, LinkageParams, RawParams, Scalar, Surd, F256};

#[derive(Parser, Debug)]
#[command(name = "sixr", version, about = "Necessary mobility conditions and curve tracing for closed 6R linkages")]
struct Cli {
    /// Relative tolerance for float comparisons.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol: f64,
    /// Exact rational/surd arithmetic for check and quad.
    #[arg(long, global = true)]
    exact: bool,
    /// Where to write the command's artifact.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Rigidity certificate and far-pair bounds, or evaluation of a hypothesis.
    Check {
        params: PathBuf,
        #[arg(long)]
        hypothesis: Option<PathBuf>,
    },
    /// Coefficients of a quad polynomial.
    Quad {
        params: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=6))]
        index: u8,
        #[arg(long, value_enum, default_value_t = SignArg::Plus)]
        sign: SignArg,
    },
    #[command(subcommand)]
    Diagram(DiagramCommand),
    /// Writes a family sample or a builtin instance.
    Family {
        #[arg(long, required_unless_present = "builtin", conflicts_with = "builtin")]
        name: Option<String>,
        #[arg(long)]
        builtin: Option<String>,
    },
    /// Finds a closure configuration and traces the configuration curve.
    Trace {
        params: PathBuf,
        #[arg(long, default_value_t = mobility::DEFAULT_STEPS)]
        steps: usize,
        #[arg(long, default_value_t = mobility::DEFAULT_STEP)]
        step_size: f64,
        #[arg(long, default_value_t = mobility::DEFAULT_ATTEMPTS)]
        attempts: usize,
        /// JSON file `{"polynomials": ["t1 - t4", ...]}`.
        #[arg(long)]
        verify_poly: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum DiagramCommand {
    /// All hypotheses satisfying the coverage rule.
    Enumerate,
    /// The condition system induced by a hypothesis file.
    Conditions { hypothesis: PathBuf },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SignArg {
    Plus,
    Minus,
}

impl From<SignArg> for QuadSign {
    fn from(s: SignArg) -> Self {
        match s {
            SignArg::Plus => QuadSign::Plus,
            SignArg::Minus => QuadSign::Minus,
        }
    }
}

#[derive(Serialize)]
struct CommandReport {
    command: Vec<String>,
    inputs_digest: String,
    results: Value,
    exit_code: u8,
}

/// Input files read by a command, hashed into the report digest.
#[derive(Default)]
struct Inputs {
    hasher: Sha256,
}

impl Inputs {
    fn read(&mut self, path: &Path) -> Result<String> {
        let bytes = fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
        self.hasher.update((bytes.len() as u64).to_le_bytes());
        self.hasher.update(&bytes);
        String::from_utf8(bytes).with_context(|| format!("{} is not UTF-8", path.display()))
    }

    fn digest(self) -> String {
        hex::encode(self.hasher.finalize())
    }
}

/// JSON number, or a string for values JSON cannot carry.
fn num(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else if v.is_nan() {
        json!("nan")
    } else if v > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

fn write_out(path: &Path, contents: &[u8]) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
}

fn parse_raw(text: &str, path: &Path) -> Result<RawParams> {
    RawParams::from_json(text).with_context(|| format!("invalid parameter file {}", path.display()))
}

fn check_report<S: Scalar>(p: &LinkageParams<S>, cli: &Cli, hypothesis: Option<&BondHypothesis>) -> Result<(Value, u8)> {
    if let Some(h) = hypothesis {
        let report = diagram::evaluate(h, p, cli.tol)?;
        let code = if report.verdict == Verdict::NecessaryConditionsHold { 0 } else { 1 };
        return Ok((serde_json::to_value(report)?, code));
    }
    let certificate = diagram::rigidity_certificate(p, cli.tol);
    let bennett: Vec<Value> = (1..=6)
        .map(|i| {
            let (res, ok) = diagram::bennett_residuals(p, i, cli.tol);
            json!({
                "index": i,
                "joints": [i, (i + 1) % 6 + 1],
                "s_residual": num(res[0]),
                "b_residual": num(res[1]),
                "holds": ok[0] && ok[1],
            })
        })
        .collect();
    let far: Vec<Value> = (1..=3)
        .map(|k| {
            let bound = quadpoly::far_bound(p, k, cli.tol);
            let side = |sign| {
                let (a, b) = (quadpoly::quad(p, k, sign), quadpoly::quad(p, k + 3, sign));
                json!({
                    "gcd_degree": quadpoly::gcd_degree(&a, &b, cli.tol),
                    "coefficient_distance": num(quadpoly::coefficient_distance(&a, &b)),
                    "relative_resultant": num(quadpoly::relative_resultant(&a, &b)),
                })
            };
            json!({
                "pair": [k, k + 3],
                "bound": bound.total(),
                "plus": side(QuadSign::Plus),
                "minus": side(QuadSign::Minus),
            })
        })
        .collect();
    let rigid = certificate.is_some();
    let results = json!({
        "rigid": rigid,
        "certificate": certificate,
        "bennett": bennett,
        "far_pairs": far,
    });
    Ok((results, if rigid { 1 } else { 0 }))
}

fn cmd_check(cli: &Cli, inputs: &mut Inputs, params: &Path, hypothesis: Option<&Path>) -> Result<(Value, u8)> {
    let raw = parse_raw(&inputs.read(params)?, params)?;
    let hyp = match hypothesis {
        Some(path) => Some(BondHypothesis::from_json(&inputs.read(path)?).with_context(|| format!("invalid hypothesis {}", path.display()))?),
        None => None,
    };
    if let Some(h) = &hyp {
        let uncovered = h.uncovered();
        if !uncovered.is_empty() {
            bail!("hypothesis leaves joints {uncovered:?} unconnected");
        }
    }
    let (mut results, code) = if cli.exact {
        check_report(&raw.to_params::<Surd>()?, cli, hyp.as_ref())?
    } else {
        check_report(&raw.to_params::<F256>()?, cli, hyp.as_ref())?
    };
    results["field"] = json!(if cli.exact { "exact" } else { "f256" });
    Ok((results, code))
}

fn quad_json<S: Scalar>(q: &QuadPoly<S>, fmt: impl Fn(&S) -> String) -> Value {
    let c = |z: &Cplx<S>| json!({ "re": fmt(&z.re), "im": fmt(&z.im) });
    json!({ "a1": c(&q.a1), "a0": c(&q.a0) })
}

fn cmd_quad(cli: &Cli, inputs: &mut Inputs, params: &Path, index: u8, sign: SignArg) -> Result<(Value, u8)> {
    let raw = parse_raw(&inputs.read(params)?, params)?;
    let (index, sign) = (index as usize, QuadSign::from(sign));
    if cli.exact && !raw.is_exact() {
        bail!("--exact needs rational or surd inputs");
    }
    let (coeffs, mode) = if raw.is_exact() {
        let p = raw.to_params::<Surd>()?;
        (quad_json(&quadpoly::quad(&p, index, sign), |v| v.to_string()), "exact")
    } else {
        let p = raw.to_params::<F256>()?;
        (quad_json(&quadpoly::quad(&p, index, sign), |v| v.to_sci_string(30)), "f256")
    };
    Ok((json!({ "index": index, "sign": sign, "mode": mode, "coefficients": coeffs }), 0))
}

fn cmd_enumerate(cli: &Cli) -> Result<(Value, u8)> {
    let all: Vec<BondHypothesis> = diagram::enumerate().collect();
    if let Some(path) = &cli.out {
        let mut text = String::new();
        for h in &all {
            text.push_str(&serde_json::to_string(h)?);
            text.push('\n');
        }
        write_out(path, text.as_bytes())?;
    }
    let known: Vec<Value> = diagram::known_diagrams()
        .iter()
        .map(|(name, h)| json!({ "name": name, "hypothesis": h, "position": all.iter().position(|g| g == h) }))
        .collect();
    Ok((json!({ "raw_count": diagram::RAW_COUNT, "count": all.len(), "known_diagrams": known }), 0))
}

fn cmd_conditions(inputs: &mut Inputs, path: &Path) -> Result<(Value, u8)> {
    let h = BondHypothesis::from_json(&inputs.read(path)?).with_context(|| format!("invalid hypothesis {}", path.display()))?;
    let system = diagram::conditions_for(&h)?;
    Ok((json!({ "hypothesis": h, "equations": system.equation_count(), "system": system }), 0))
}

fn cmd_family(cli: &Cli, name: Option<&str>, builtin: Option<&str>) -> Result<(Value, u8)> {
    let (label, params, checked) = match (name, builtin) {
        (Some(name), _) => {
            let family: Family = name.parse()?;
            let seed = cli.seed.unwrap_or(0);
            (json!({ "family": family, "seed": seed }), families::sample(family, seed)?, vec![family])
        }
        (None, Some(b)) => {
            let which: Builtin = b.parse()?;
            (json!({ "builtin": which }), families::builtin_instance(which), Family::ALL.to_vec())
        }
        (None, None) => bail!("either --name or --builtin is required"),
    };
    let document = params.to_document();
    let text = serde_json::to_string_pretty(&document)? + "\n";
    if let Some(path) = &cli.out {
        write_out(path, text.as_bytes())?;
    }
    let membership: Vec<_> = checked.iter().map(|&f| families::membership(&params, f, 0.0)).collect();
    let members: Vec<Family> = membership.iter().filter(|m| m.member).map(|m| m.family).collect();
    let results = json!({
        "source": label,
        "params": document,
        "members_of": members,
        "membership": membership,
    });
    Ok((results, 0))
}

fn load_polys(inputs: &mut Inputs, path: &Path) -> Result<Vec<TPoly>> {
    #[derive(serde::Deserialize)]
    #[serde(deny_unknown_fields)]
    struct PolyFile {
        polynomials: Vec<String>,
    }
    let file: PolyFile =
        serde_json::from_str(&inputs.read(path)?).with_context(|| format!("invalid polynomial file {}", path.display()))?;
    file.polynomials.iter().map(|s| s.parse::<TPoly>().map_err(|e| anyhow!(e))).collect()
}

fn curve_json(curve: &ConfigCurve) -> Value {
    let pairs: serde_json::Map<String, Value> = (1..=3)
        .map(|k| (format!("{k}-{}", k + 3), num(curve.max_angle_difference(k, k + 3))))
        .collect();
    json!({
        "points": curve.len(),
        "closed": curve.closed,
        "termination": curve.termination,
        "max_residual": num(curve.max_residual()),
        "min_rank_gap": num(curve.min_rank_gap()),
        "max_far_pair_angle_difference": pairs,
    })
}

fn cmd_trace(
    cli: &Cli,
    inputs: &mut Inputs,
    params: &Path,
    opts: TraceOptions,
    attempts: usize,
    verify: Option<&Path>,
) -> Result<(Value, u8)> {
    let raw = parse_raw(&inputs.read(params)?, params)?;
    let polys = match verify {
        Some(path) => load_polys(inputs, path)?,
        None => Vec::new(),
    };
    if !(opts.step_size > 0.0) || opts.steps == 0 || attempts == 0 {
        bail!("--steps, --step-size and --attempts must be positive");
    }
    let p = raw.to_params::<f64>()?;
    let seed = cli.seed.unwrap_or(0);
    let Some(start) = mobility::find_seed(&p, attempts, seed) else {
        let msg = format!("no closure configuration with rank gap above {:e} in {attempts} attempts", mobility::RANK_GAP);
        return Ok((json!({ "seed": seed, "start": null, "diagnostic": msg }), 1));
    };
    let curve = match mobility::trace_with(&p, &start, &opts) {
        Ok(c) => c,
        Err(e) => return Ok((json!({ "seed": seed, "start": start, "diagnostic": e.to_string() }), 1)),
    };
    if let Some(path) = &cli.out {
        let mut csv = Vec::new();
        curve.write_csv(&mut csv)?;
        write_out(path, &csv)?;
    }
    let mut results = json!({ "seed": seed, "start": start, "curve": curve_json(&curve) });
    if verify.is_some() {
        results["verification"] = serde_json::to_value(mobility::verify_curve(&p, &curve, &polys))?;
    }
    let code = match curve.termination {
        mobility::Termination::CorrectorFailure { .. } => 1,
        _ => 0,
    };
    Ok((results, code))
}

fn run(cli: &Cli, inputs: &mut Inputs) -> Result<(Value, u8)> {
    if !(cli.tol >= 0.0) {
        bail!("--tol must be non-negative");
    }
    match &cli.command {
        Command::Check { params, hypothesis } => cmd_check(cli, inputs, params, hypothesis.as_deref()),
        Command::Quad { params, index, sign } => cmd_quad(cli, inputs, params, *index, *sign),
        Command::Diagram(DiagramCommand::Enumerate) => cmd_enumerate(cli),
        Command::Diagram(DiagramCommand::Conditions { hypothesis }) => cmd_conditions(inputs, hypothesis),
        Command::Family { name, builtin } => cmd_family(cli, name.as_deref(), builtin.as_deref()),
        Command::Trace { params, steps, step_size, attempts, verify_poly } => {
            let opts = TraceOptions { steps: *steps, step_size: *step_size, reverse: false };
            cmd_trace(cli, inputs, params, opts, *attempts, verify_poly.as_deref())
        }
    }
}

fn emit(report: &CommandReport) -> ExitCode {
    match serde_json::to_string_pretty(report) {
        // a closed stdout (e.g. `| head`) is not worth a panic
        Ok(text) => drop(writeln!(io::stdout().lock(), "{text}")),
        Err(e) => eprintln!("cannot serialize report: {e}"),
    }
    ExitCode::from(report.exit_code)
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            let report = CommandReport {
                command: argv,
                inputs_digest: Inputs::default().digest(),
                results: json!({ "error": e.to_string().lines().next().unwrap_or_default().trim_start_matches("error: ") }),
                exit_code: 2,
            };
            return emit(&report);
        }
    };
    let mut inputs = Inputs::default();
    let (results, exit_code) = match run(&cli, &mut inputs) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            (json!({ "error": format!("{e:#}") }), 2)
        }
    };
    let report = CommandReport { command: argv, inputs_digest: inputs.digest(), results, exit_code };
    let copies_report = matches!(cli.command, Command::Check { .. } | Command::Quad { .. } | Command::Diagram(DiagramCommand::Conditions { .. }));
    if copies_report {
        if let Some(path) = &cli.out {
            let written = serde_json::to_string_pretty(&report).map_err(anyhow::Error::from).and_then(|t| write_out(path, t.as_bytes()));
            if let Err(e) = written {
                eprintln!("error: {e:#}");
                return ExitCode::from(2);
            }
        }
    }
    emit(&report)
}
