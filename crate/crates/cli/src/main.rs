use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::Zero;
use serde_json::{json, Map, Value};

use padic_path::gauss::{coset_cap, quad_char_integral_ball_capped, COSET_CAP_ENV};
use padic_path::propagators::SqrtBranch;
use padic_path::{
    gauss_full, k_oscillator_td, parse_rational, run_check, Amplitude, Check, Error,
    OscillatorBoundaryData, OscillatorValue, Place, Prime, Rational, System,
};

#[derive(Parser)]
#[command(
    name = "padic-path",
    version,
    about = "Exact Feynman kernels and Gauss integrals over R and Q_p"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form Gauss integral of chi_v(a x^2 + b x) over Q_v
    Gauss(GaussArgs),
    /// Exact integral of chi_p(alpha x^2 + beta x) over the ball |x|_p <= p^N
    BallIntegral(BallArgs),
    /// Evaluate a propagator on a grid of parameters
    Kernel(KernelArgs),
    /// Run a seeded invariant suite
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct GaussArgs {
    #[arg(long, value_parser = parse_place)]
    place: Place,
    #[arg(long, value_parser = parse_q, allow_hyphen_values = true)]
    a: Rational,
    #[arg(long, value_parser = parse_q, allow_hyphen_values = true, default_value = "0")]
    b: Rational,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct BallArgs {
    #[arg(long, value_parser = parse_prime)]
    p: Prime,
    #[arg(long, value_parser = parse_q, allow_hyphen_values = true)]
    alpha: Rational,
    #[arg(long, value_parser = parse_q, allow_hyphen_values = true)]
    beta: Rational,
    /// Radius exponent: the ball is |x|_p <= p^N
    #[arg(long = "N", visible_alias = "n", allow_hyphen_values = true)]
    n: i64,
    /// Largest number of cosets to enumerate
    #[arg(long)]
    cap: Option<u64>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SystemKind {
    Free,
    ConstField,
    Desitter,
    Osc,
}

#[derive(Args)]
struct KernelArgs {
    #[arg(long, value_enum)]
    system: SystemKind,
    /// Places, comma separated: inf or primes
    #[arg(long, value_parser = parse_place, value_delimiter = ',', required = true)]
    place: Vec<Place>,
    /// Elapsed times t'' - t'
    #[arg(long = "T", value_parser = parse_grid, value_delimiter = ',', allow_hyphen_values = true)]
    t: Vec<Vec<Rational>>,
    /// Initial positions q'
    #[arg(long, value_parser = parse_grid, value_delimiter = ',', allow_hyphen_values = true, default_value = "0")]
    q0: Vec<Vec<Rational>>,
    /// Final positions q''
    #[arg(long, value_parser = parse_grid, value_delimiter = ',', allow_hyphen_values = true, default_value = "0")]
    q1: Vec<Vec<Rational>>,
    /// Field strength for const-field
    #[arg(long, value_parser = parse_grid, value_delimiter = ',', allow_hyphen_values = true, default_value = "0")]
    a: Vec<Vec<Rational>>,
    /// Cosmological constant for desitter
    #[arg(long, value_parser = parse_grid, value_delimiter = ',', allow_hyphen_values = true, default_value = "0")]
    lam: Vec<Vec<Rational>>,
    #[command(flatten)]
    osc: OscArgs,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

/// Boundary data of the oscillator; suffix 0 is t', suffix 1 is t''.
#[derive(Args)]
struct OscArgs {
    #[arg(long, value_parser = parse_q, allow_hyphen_values = true, default_value = "0")]
    gamma0: Rational,
    #[arg(long, value_parser = parse_q, allow_hyphen_values = true, default_value = "0")]
    gamma1: Rational,
    #[arg(long, value_parser = parse_q, allow_hyphen_values = true, default_value = "1")]
    gamma_dot0: Rational,
    #[arg(long, value_parser = parse_q, allow_hyphen_values = true, default_value = "1")]
    gamma_dot1: Rational,
    #[arg(long, value_parser = parse_q, allow_hyphen_values = true, default_value = "1")]
    s0: Rational,
    #[arg(long, value_parser = parse_q, allow_hyphen_values = true, default_value = "1")]
    s1: Rational,
    #[arg(long, value_parser = parse_q, allow_hyphen_values = true, default_value = "0")]
    s_dot0: Rational,
    #[arg(long, value_parser = parse_q, allow_hyphen_values = true, default_value = "0")]
    s_dot1: Rational,
    /// p-adic digits kept in sin, tan and the square root
    #[arg(long, default_value_t = 30)]
    precision: i64,
    /// Require gamma-dot s^2 to agree at both ends
    #[arg(long)]
    check_wronskian: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_parser = parse_check)]
    check: Check,
    /// Places, comma separated; defaults depend on the check
    #[arg(long, value_parser = parse_place, value_delimiter = ',')]
    place: Vec<Place>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// Largest number of cosets any ball integral may enumerate
    #[arg(long)]
    cap: Option<u64>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

fn parse_q(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn parse_place(s: &str) -> Result<Place, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_prime(s: &str) -> Result<Prime, String> {
    let n: u64 = s.parse().map_err(|_| format!("not a prime: {s:?}"))?;
    Prime::new(n).map_err(|e| e.to_string())
}

fn parse_check(s: &str) -> Result<Check, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// A rational, or an inclusive range `lo:hi:step`.
fn parse_grid(s: &str) -> Result<Vec<Rational>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [single] => Ok(vec![parse_q(single)?]),
        [lo, hi, step] => {
            let (lo, hi, step) = (parse_q(lo)?, parse_q(hi)?, parse_q(step)?);
            if step <= Rational::zero() {
                return Err(format!("range step must be positive in {s:?}"));
            }
            let mut out = Vec::new();
            let mut x = lo;
            while x <= hi {
                out.push(x.clone());
                x += &step;
                if out.len() > 100_000 {
                    return Err(format!("range {s:?} has too many points"));
                }
            }
            Ok(out)
        }
        _ => Err(format!("expected a rational or lo:hi:step, got {s:?}")),
    }
}

fn flat(grid: &[Vec<Rational>]) -> Vec<Rational> {
    grid.iter().flatten().cloned().collect()
}

struct Row {
    inputs: Vec<(&'static str, String)>,
    exact: Option<Amplitude>,
    re: f64,
    im: f64,
    extra: Vec<(&'static str, String)>,
}

impl Row {
    fn exact(inputs: Vec<(&'static str, String)>, amp: Amplitude) -> Row {
        let z = amp.render::<f64>();
        Row {
            inputs,
            exact: Some(amp),
            re: z.re,
            im: z.im,
            extra: Vec::new(),
        }
    }

    fn to_json(&self) -> Value {
        let inputs: Map<String, Value> = self
            .inputs
            .iter()
            .map(|(k, v)| (k.to_string(), Value::String(v.clone())))
            .collect();
        let mut row = Map::new();
        row.insert("inputs".into(), Value::Object(inputs));
        let (m, ph) = match &self.exact {
            Some(a) => (
                json!(a.modulus_sq().to_string()),
                json!(a.phase().to_string()),
            ),
            None => (Value::Null, Value::Null),
        };
        row.insert("modulus_sq".into(), m);
        row.insert("phase".into(), ph);
        row.insert("re".into(), json!(self.re));
        row.insert("im".into(), json!(self.im));
        for (k, v) in &self.extra {
            row.insert(k.to_string(), json!(v));
        }
        Value::Object(row)
    }
}

fn write_rows(rows: &[Row], format: Format) -> io::Result<()> {
    let mut out = io::stdout().lock();
    match format {
        Format::Json => {
            let doc = Value::Array(rows.iter().map(Row::to_json).collect());
            writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            if let Some(first) = rows.first() {
                let mut header: Vec<&str> = first.inputs.iter().map(|(k, _)| *k).collect();
                header.extend(["modulus_sq", "phase", "re", "im"]);
                header.extend(first.extra.iter().map(|(k, _)| *k));
                w.write_record(&header)?;
            }
            for r in rows {
                let mut rec: Vec<String> = r.inputs.iter().map(|(_, v)| v.clone()).collect();
                match &r.exact {
                    Some(a) => rec.extend([a.modulus_sq().to_string(), a.phase().to_string()]),
                    None => rec.extend([String::new(), String::new()]),
                }
                rec.extend([r.re.to_string(), r.im.to_string()]);
                rec.extend(r.extra.iter().map(|(_, v)| v.clone()));
                w.write_record(&rec)?;
            }
            w.flush()
        }
    }
}

fn cmd_gauss(args: &GaussArgs) -> Result<Vec<Row>, Error> {
    let amp = gauss_full(args.place, &args.a, &args.b)?;
    let inputs = vec![
        ("place", args.place.to_string()),
        ("a", args.a.to_string()),
        ("b", args.b.to_string()),
    ];
    Ok(vec![Row::exact(inputs, amp)])
}

fn cmd_ball_integral(args: &BallArgs) -> Result<Vec<Row>, Error> {
    let cap = args.cap.unwrap_or_else(coset_cap);
    let amp = quad_char_integral_ball_capped(args.p, &args.alpha, &args.beta, args.n, cap)?;
    let inputs = vec![
        ("p", args.p.to_string()),
        ("alpha", args.alpha.to_string()),
        ("beta", args.beta.to_string()),
        ("N", args.n.to_string()),
    ];
    Ok(vec![Row::exact(inputs, amp)])
}

fn cmd_kernel(args: &KernelArgs) -> Result<Vec<Row>, Error> {
    let (q0s, q1s) = (flat(&args.q0), flat(&args.q1));
    if args.system == SystemKind::Osc {
        return oscillator_rows(args, &q0s, &q1s);
    }
    let ts = flat(&args.t);
    if ts.is_empty() {
        return Err(Error::InvalidArgument(
            "--T is required for this system".into(),
        ));
    }
    let coupling = match args.system {
        SystemKind::ConstField => flat(&args.a),
        SystemKind::Desitter => flat(&args.lam),
        _ => vec![Rational::zero()],
    };
    let mut rows = Vec::new();
    for &v in &args.place {
        for c in &coupling {
            let (system, key) = match args.system {
                SystemKind::ConstField => (System::ConstantField { a: c.clone() }, Some("a")),
                SystemKind::Desitter => (System::DeSitter { lam: c.clone() }, Some("lam")),
                _ => (System::Free, None),
            };
            for t in &ts {
                for q0 in &q0s {
                    for q1 in &q1s {
                        let mut inputs = vec![
                            ("place", v.to_string()),
                            ("system", system.name().to_string()),
                        ];
                        if let Some(key) = key {
                            inputs.push((key, c.to_string()));
                        }
                        inputs.extend([
                            ("T", t.to_string()),
                            ("q0", q0.to_string()),
                            ("q1", q1.to_string()),
                        ]);
                        rows.push(Row::exact(inputs, system.kernel(v, t, q0, q1)?));
                    }
                }
            }
        }
    }
    Ok(rows)
}

fn oscillator_rows(
    args: &KernelArgs,
    q0s: &[Rational],
    q1s: &[Rational],
) -> Result<Vec<Row>, Error> {
    let o = &args.osc;
    let mut rows = Vec::new();
    for &v in &args.place {
        for x0 in q0s {
            for x1 in q1s {
                let data = OscillatorBoundaryData {
                    x1: x0.clone(),
                    x2: x1.clone(),
                    gamma1: o.gamma0.clone(),
                    gamma2: o.gamma1.clone(),
                    gamma_dot1: o.gamma_dot0.clone(),
                    gamma_dot2: o.gamma_dot1.clone(),
                    s1: o.s0.clone(),
                    s2: o.s1.clone(),
                    s_dot1: o.s_dot0.clone(),
                    s_dot2: o.s_dot1.clone(),
                    check_wronskian: o.check_wronskian,
                };
                let inputs = vec![
                    ("place", v.to_string()),
                    ("system", "osc".to_string()),
                    ("gamma0", o.gamma0.to_string()),
                    ("gamma1", o.gamma1.to_string()),
                    ("gamma_dot0", o.gamma_dot0.to_string()),
                    ("gamma_dot1", o.gamma_dot1.to_string()),
                    ("s0", o.s0.to_string()),
                    ("s1", o.s1.to_string()),
                    ("s_dot0", o.s_dot0.to_string()),
                    ("s_dot1", o.s_dot1.to_string()),
                    ("q0", x0.to_string()),
                    ("q1", x1.to_string()),
                ];
                let row = match k_oscillator_td(v, &data, o.precision)? {
                    OscillatorValue::Exact { amplitude, branch } => {
                        let mut row = Row::exact(inputs, amplitude);
                        row.extra.push(("sqrt_branch", branch_label(&branch)));
                        row
                    }
                    OscillatorValue::Approximate(z) => Row {
                        inputs,
                        exact: None,
                        re: z.re,
                        im: z.im,
                        extra: vec![("sqrt_branch", branch_label(&SqrtBranch::Positive))],
                    },
                };
                rows.push(row);
            }
        }
    }
    Ok(rows)
}

fn branch_label(b: &SqrtBranch) -> String {
    match b {
        SqrtBranch::Canonical(root) => {
            format!(
                "canonical {} + O({}^{})",
                root.to_rational(),
                root.prime(),
                root.precision()
            )
        }
        SqrtBranch::Positive => "positive".to_string(),
    }
}

fn default_places(check: Check) -> Vec<Place> {
    let list: &[&str] = match check {
        Check::Overlap => &["3", "5"],
        _ => &["inf", "2", "3", "5", "7"],
    };
    list.iter().map(|s| s.parse().unwrap()).collect()
}

/// Returns whether every suite passed.
fn cmd_verify(args: &VerifyArgs) -> Result<bool, Error> {
    if let Some(cap) = args.cap {
        // Set before any worker thread starts.
        std::env::set_var(COSET_CAP_ENV, cap.to_string());
    }
    let places = if args.place.is_empty() {
        default_places(args.check)
    } else {
        args.place.clone()
    };
    let mut reports = Vec::new();
    for v in places {
        reports.push(run_check(args.check, v, args.trials, args.seed)?);
    }
    let mut out = io::stdout().lock();
    let emit = |out: &mut io::StdoutLock, text: String| {
        writeln!(out, "{text}").map_err(|e| Error::InvalidArgument(e.to_string()))
    };
    match args.format {
        Format::Json => {
            let doc: Vec<Value> = reports
                .iter()
                .map(|r| {
                    json!({
                        "check": r.check.to_string(),
                        "place": r.place.to_string(),
                        "seed": args.seed,
                        "trials": r.trials,
                        "passed": r.passed(),
                        "failures": r.failures,
                    })
                })
                .collect();
            emit(
                &mut out,
                serde_json::to_string_pretty(&doc).expect("json value"),
            )?;
        }
        Format::Csv => {
            emit(
                &mut out,
                "check,place,seed,trials,failures,result".to_string(),
            )?;
            for r in &reports {
                let verdict = if r.passed() { "pass" } else { "fail" };
                emit(
                    &mut out,
                    format!(
                        "{},{},{},{},{},{verdict}",
                        r.check,
                        r.place,
                        args.seed,
                        r.trials,
                        r.failures.len()
                    ),
                )?;
            }
        }
    }
    for r in reports.iter().filter(|r| !r.passed()) {
        for f in &r.failures {
            eprintln!("{} at {}: {f}", r.check, r.place);
        }
    }
    Ok(reports.iter().all(|r| r.passed()))
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::ResourceLimit { .. } => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Gauss(a) => cmd_gauss(a).map(|rows| (rows, a.format)),
        Command::BallIntegral(a) => cmd_ball_integral(a).map(|rows| (rows, a.format)),
        Command::Kernel(a) => cmd_kernel(a).map(|rows| (rows, a.format)),
        Command::Verify(a) => {
            return match cmd_verify(a) {
                Ok(true) => ExitCode::SUCCESS,
                Ok(false) => ExitCode::from(1),
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(exit_code(&e))
                }
            };
        }
    };
    match result {
        Ok((rows, format)) => match write_rows(&rows, format) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
