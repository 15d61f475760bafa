//! `bessel` command line: single evaluations, accuracy scans, timing
//! benchmarks, and the pulsar GW signal run. Exit codes: 0 ok, 2 bad input,
//! 3 numeric failure.

use bessel_asym::gw::{ft_signal, GwParams};
use bessel_asym::{
    eval_j, eval_j_method, oracle, BesselQuery, DispatchPolicy, Error, ExpansionResult, Method,
    PrecisionConfig,
};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "bessel", version, about = "Bessel J_nu(x) at large order/argument")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate J_nu(x) once and print the result
    Eval {
        nu: f64,
        x: f64,
        /// Force a specific method instead of automatic dispatch
        #[arg(long)]
        method: Option<String>,
        /// Also print an oracle comparison at this many digits
        #[arg(long)]
        oracle_digits: Option<u32>,
        #[command(flatten)]
        common: CommonFlags,
    },
    /// Evaluate a grid of x values and emit CSV
    Scan {
        #[arg(long)]
        nu: f64,
        /// Grid as start:stop:step
        #[arg(long)]
        x: String,
        /// Comma-separated method names, or "auto"
        #[arg(long, default_value = "auto")]
        methods: String,
        /// Include oracle values and per-method relative errors (on/off)
        #[arg(long, default_value = "off")]
        oracle: String,
        /// Output path; stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: CommonFlags,
    },
    /// Time each method over a grid and report median/p99 latency
    Bench {
        #[arg(long)]
        nu: f64,
        #[arg(long)]
        x: String,
        #[arg(long, default_value = "auto")]
        methods: String,
        /// Evaluations discarded before timing starts
        #[arg(long, default_value_t = 3)]
        warmup: u32,
        #[command(flatten)]
        common: CommonFlags,
    },
    /// Run the GW signal triple sum from a parameter file
    Gw {
        /// key = value parameter file; "desk" and "physical" load presets
        param_file: String,
        /// Per-term breakdown CSV path
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: CommonFlags,
    },
}

#[derive(Args)]
struct CommonFlags {
    /// Target relative error
    #[arg(long)]
    precision: Option<f64>,
    /// key = value file overriding dispatch thresholds and term counts
    #[arg(long)]
    policy_file: Option<PathBuf>,
}

/// Input problems exit 2, numeric failures exit 3.
enum CliError {
    Input(String),
    Numeric(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidInput(_) => CliError::Input(e.to_string()),
            other => CliError::Numeric(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Numeric(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Eval { nu, x, method, oracle_digits, common } => {
            cmd_eval(nu, x, method, oracle_digits, &common)
        }
        Command::Scan { nu, x, methods, oracle, out, common } => {
            let oracle_on = parse_on_off(&oracle)?;
            cmd_scan(nu, &parse_grid(&x)?, &parse_methods(&methods)?, oracle_on, out, &common)
        }
        Command::Bench { nu, x, methods, warmup, common } => {
            cmd_bench(nu, &parse_grid(&x)?, &parse_methods(&methods)?, warmup, &common)
        }
        Command::Gw { param_file, out, common } => cmd_gw(&param_file, out, &common),
    }
}

fn precision_config(common: &CommonFlags) -> Result<PrecisionConfig, CliError> {
    let mut cfg = PrecisionConfig::default();
    if let Some(p) = common.precision {
        cfg.target_rel_error = p;
    }
    cfg.validate().map_err(Error::from)?;
    Ok(cfg)
}

fn dispatch_policy(common: &CommonFlags) -> Result<DispatchPolicy, CliError> {
    let mut policy = DispatchPolicy::default();
    let Some(path) = &common.policy_file else {
        return Ok(policy);
    };
    let text = std::fs::read_to_string(path)?;
    for (line_no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Input(format!(
                "{}:{}: expected key = value",
                path.display(),
                line_no + 1
            )));
        };
        let v: f64 = value.trim().parse().map_err(|_| {
            CliError::Input(format!("{}:{}: bad number", path.display(), line_no + 1))
        })?;
        match key.trim() {
            "transition_halfwidth" => policy.transition_halfwidth = v,
            "small_arg_coeff" => policy.small_arg_coeff = v,
            "meissel_first_terms" => policy.meissel_first_terms = v as u32,
            "meissel_second_terms" => policy.meissel_second_terms = v as u32,
            "meissel_third_terms" => policy.meissel_third_terms = v as u32,
            "debye_terms" => policy.debye_terms = v as u32,
            "epsilon_terms" => policy.epsilon_terms = v as u32,
            other => {
                return Err(CliError::Input(format!(
                    "{}:{}: unknown policy key {other:?}",
                    path.display(),
                    line_no + 1
                )))
            }
        }
    }
    Ok(policy)
}

fn parse_on_off(s: &str) -> Result<bool, CliError> {
    match s {
        "on" => Ok(true),
        "off" => Ok(false),
        other => Err(CliError::Input(format!("expected on/off, got {other:?}"))),
    }
}

fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::Input(format!("grid must be start:stop:step, got {spec:?}")));
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| p.parse().map_err(|_| CliError::Input(format!("bad grid number {p:?}"))))
        .collect::<Result<_, _>>()?;
    let (start, stop, step) = (nums[0], nums[1], nums[2]);
    if !(step > 0.0) || !(stop > start) {
        return Err(CliError::Input("grid needs step > 0 and stop > start".into()));
    }
    let count = ((stop - start) / step).floor() as usize + 1;
    Ok((0..count).map(|i| start + i as f64 * step).collect())
}

/// Method selector for scan/bench. "auto" is dispatch; "watson" resolves to
/// the below/above variant per point.
#[derive(Clone, Copy, PartialEq)]
enum Selector {
    Auto,
    Watson,
    Fixed(Method),
}

impl Selector {
    fn label(self) -> &'static str {
        match self {
            Selector::Auto => "auto",
            Selector::Watson => "watson",
            Selector::Fixed(m) => m.name(),
        }
    }
}

fn parse_methods(list: &str) -> Result<Vec<Selector>, CliError> {
    list.split(',')
        .map(|name| {
            let name = name.trim();
            match name {
                "auto" => Ok(Selector::Auto),
                "watson" => Ok(Selector::Watson),
                _ => Method::from_name(name)
                    .map(Selector::Fixed)
                    .ok_or_else(|| CliError::Input(format!("unknown method {name:?}"))),
            }
        })
        .collect()
}

fn eval_selector(
    q: &BesselQuery,
    sel: Selector,
    policy: &DispatchPolicy,
) -> Result<ExpansionResult, Error> {
    match sel {
        Selector::Auto => eval_j(q, policy),
        Selector::Watson => {
            let m = if q.argument < q.order { Method::WatsonBelow } else { Method::WatsonAbove };
            eval_j_method(q, m, policy)
        }
        Selector::Fixed(m) => eval_j_method(q, m, policy),
    }
}

fn cmd_eval(
    nu: f64,
    x: f64,
    method: Option<String>,
    oracle_digits: Option<u32>,
    common: &CommonFlags,
) -> Result<(), CliError> {
    let cfg = precision_config(common)?;
    let policy = dispatch_policy(common)?;
    let query = BesselQuery::with_policy(nu, x, cfg).map_err(Error::from)?;
    let result = match method {
        Some(name) => {
            let sel = parse_methods(&name)?;
            if sel.len() != 1 {
                return Err(CliError::Input("--method takes a single name".into()));
            }
            eval_selector(&query, sel[0], &policy)?
        }
        None => eval_j(&query, &policy)?,
    };
    println!("J_{nu}({x}) = {:.17e}", result.value);
    println!("method       = {}", result.method);
    println!("terms_used   = {}", result.terms_used);
    match result.est_error {
        Some(e) => println!("est_error    = {e:.3e}"),
        None => println!("est_error    = n/a"),
    }
    println!("rigorous     = {}", result.rigorous);
    println!("elapsed      = {:.1} us", result.elapsed.as_secs_f64() * 1e6);
    if result.precision_loss {
        eprintln!("warning: precision loss flagged for this evaluation");
    }
    if let Some(digits) = oracle_digits {
        let o = oracle::exact_j(nu, x, digits)?;
        let ov = o.to_f64();
        let rel = if ov != 0.0 { ((result.value - ov) / ov).abs() } else { f64::NAN };
        println!("oracle       = {ov:.17e} ({} digits)", o.achieved_digits);
        println!("rel_error    = {rel:.3e}");
    }
    Ok(())
}

struct ScanRow {
    x: f64,
    per_method: Vec<Result<ExpansionResult, Error>>,
    oracle: Option<f64>,
    auto: Result<ExpansionResult, Error>,
}

fn cmd_scan(
    nu: f64,
    grid: &[f64],
    methods: &[Selector],
    oracle_on: bool,
    out: Option<PathBuf>,
    common: &CommonFlags,
) -> Result<(), CliError> {
    let cfg = precision_config(common)?;
    let policy = dispatch_policy(common)?;
    let digits = cfg.resolved_oracle_digits();
    if oracle_on {
        // refuse the whole grid rather than emit partial truth
        for &x in grid {
            if !oracle::in_range(x, digits) {
                return Err(CliError::Input(format!(
                    "oracle cannot certify x = {x} at {digits} digits; \
                     rerun with --oracle off or a smaller grid"
                )));
            }
        }
    }
    let rows: Vec<ScanRow> = grid
        .par_iter()
        .map(|&x| {
            let query = BesselQuery::with_policy(nu, x, cfg.clone())?;
            let per_method: Vec<_> = methods
                .iter()
                .filter(|s| **s != Selector::Auto)
                .map(|&s| eval_selector(&query, s, &policy))
                .collect();
            let oracle = if oracle_on {
                Some(oracle::exact_j(nu, x, digits)?.to_f64())
            } else {
                None
            };
            Ok(ScanRow { x, per_method, oracle, auto: eval_j(&query, &policy) })
        })
        .collect::<Result<_, Error>>()?;

    let mut csv = String::new();
    writeln!(csv, "# bessel-asym {} scan", env!("CARGO_PKG_VERSION")).unwrap();
    writeln!(csv, "# nu = {nu}, oracle = {oracle_on}, oracle_digits = {digits}").unwrap();
    writeln!(csv, "# policy: {policy:?}").unwrap();
    let fixed: Vec<Selector> = methods.iter().copied().filter(|s| *s != Selector::Auto).collect();
    let mut header = String::from("x");
    for s in &fixed {
        write!(header, ",{}_value", s.label()).unwrap();
        if oracle_on {
            write!(header, ",{}_rel_err", s.label()).unwrap();
        }
    }
    if oracle_on {
        header.push_str(",oracle_value");
    }
    header.push_str(",auto_value,auto_method,auto_elapsed_us,flags");
    writeln!(csv, "{header}").unwrap();

    for row in &rows {
        let mut flags = Vec::new();
        write!(csv, "{}", row.x).unwrap();
        for (s, r) in fixed.iter().zip(&row.per_method) {
            match r {
                Ok(res) => {
                    write!(csv, ",{:.17e}", res.value).unwrap();
                    if res.precision_loss {
                        flags.push(format!("{}:precision_loss", s.label()));
                    }
                    if oracle_on {
                        let o = row.oracle.unwrap();
                        let rel = if o != 0.0 { ((res.value - o) / o).abs() } else { f64::NAN };
                        write!(csv, ",{rel:.3e}").unwrap();
                    }
                }
                Err(e) => {
                    write!(csv, ",NaN").unwrap();
                    if oracle_on {
                        write!(csv, ",NaN").unwrap();
                    }
                    flags.push(format!("{}:{}", s.label(), compact(e)));
                }
            }
        }
        if let Some(o) = row.oracle {
            write!(csv, ",{o:.17e}").unwrap();
        }
        match &row.auto {
            Ok(res) => write!(
                csv,
                ",{:.17e},{},{:.1}",
                res.value,
                res.method,
                res.elapsed.as_secs_f64() * 1e6
            )
            .unwrap(),
            Err(e) => {
                write!(csv, ",NaN,none,0.0").unwrap();
                flags.push(format!("auto:{}", compact(e)));
            }
        }
        writeln!(csv, ",{}", if flags.is_empty() { "ok".into() } else { flags.join(";") })
            .unwrap();
    }

    match out {
        Some(path) => std::fs::write(path, csv)?,
        None => print!("{csv}"),
    }
    Ok(())
}

/// One-token rendering of an error for a CSV flag cell.
fn compact(e: &Error) -> &'static str {
    match e {
        Error::InvalidInput(_) => "invalid_input",
        Error::WrongRegime { .. } => "wrong_regime",
        Error::OutOfValidity(_) => "out_of_validity",
        Error::OutOfRange(_) => "out_of_range",
        Error::CapExceeded(_) => "cap_exceeded",
        Error::PoleInParameters(_) => "pole",
        Error::NoMethodApplicable { .. } => "no_method",
    }
}

fn cmd_bench(
    nu: f64,
    grid: &[f64],
    methods: &[Selector],
    warmup: u32,
    common: &CommonFlags,
) -> Result<(), CliError> {
    let cfg = precision_config(common)?;
    let policy = dispatch_policy(common)?;
    println!("# bessel-asym {} bench", env!("CARGO_PKG_VERSION"));
    println!("# host: {} {}, {} cpus", std::env::consts::OS, std::env::consts::ARCH,
        std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1));
    println!("# nu = {nu}, grid points = {}, warmup = {warmup}", grid.len());
    println!("method,points_ok,median_us,p99_us");
    if grid.is_empty() {
        return Ok(());
    }
    for &sel in methods {
        let mut samples: Vec<f64> = Vec::with_capacity(grid.len());
        let mut ok = 0usize;
        for (i, &x) in grid.iter().enumerate() {
            let query = BesselQuery::with_policy(nu, x, cfg.clone()).map_err(Error::from)?;
            for _ in 0..warmup.min(if i == 0 { warmup } else { 0 }) {
                let _ = eval_selector(&query, sel, &policy);
            }
            let t = Instant::now();
            let r = eval_selector(&query, sel, &policy);
            let us = t.elapsed().as_secs_f64() * 1e6;
            if r.is_ok() {
                ok += 1;
                samples.push(us);
            }
        }
        if samples.is_empty() {
            println!("{},0,NaN,NaN", sel.label());
            continue;
        }
        samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = samples[samples.len() / 2];
        let p99 = samples[((samples.len() as f64 * 0.99) as usize).min(samples.len() - 1)];
        println!("{},{ok},{median:.1},{p99:.1}", sel.label());
    }
    // oracle single-point reference at the first grid point
    let x0 = grid[0];
    let digits = cfg.resolved_oracle_digits();
    if oracle::in_range(x0, digits) {
        let t = Instant::now();
        let _ = oracle::exact_j(nu, x0, digits).map_err(Error::from)?;
        println!(
            "# oracle reference at x = {x0}: {:.1} us at {digits} digits",
            t.elapsed().as_secs_f64() * 1e6
        );
    }
    Ok(())
}

fn cmd_gw(param_file: &str, out: Option<PathBuf>, common: &CommonFlags) -> Result<(), CliError> {
    let policy = dispatch_policy(common)?;
    let params = match param_file {
        "desk" => GwParams::desk_preset(),
        "physical" => GwParams::physical_preset(),
        path => GwParams::from_key_value(&std::fs::read_to_string(path)?).map_err(Error::from)?,
    };
    let result = ft_signal(&params, &policy).map_err(Error::from)?;
    println!("h_tilde = {:.12e} + {:.12e} i", result.total.re, result.total.im);
    println!("|h_tilde| = {:.12e}", result.total.norm());
    println!("terms = {}, tail estimate = {:.3e}", result.terms.len(), result.tail_estimate);
    if result.truncation_warning {
        eprintln!(
            "warning: last l-shell still contributes {:.3e} of the total; raise l_max",
            result.tail_estimate
        );
    }
    if let Some(path) = out {
        let mut csv = String::new();
        writeln!(csv, "# bessel-asym {} gw breakdown", env!("CARGO_PKG_VERSION")).unwrap();
        writeln!(csv, "# f0 = {}, omega = {}, l_max = {}, n = [{}, {}]",
            params.f0, params.omega, params.l_max, params.n_min, params.n_max).unwrap();
        writeln!(
            csv,
            "n,l,m,psi0_re,psi0_im,psi1_re,psi1_im,psi2_re,psi2_im,psi3,psi4,product_re,product_im"
        )
        .unwrap();
        for t in &result.terms {
            writeln!(
                csv,
                "{},{},{},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
                t.n, t.l, t.m, t.psi0.re, t.psi0.im, t.psi1.re, t.psi1.im,
                t.psi2.re, t.psi2.im, t.psi3, t.psi4, t.product.re, t.product.im
            )
            .unwrap();
        }
        std::fs::write(path, csv)?;
    }
    Ok(())
}
