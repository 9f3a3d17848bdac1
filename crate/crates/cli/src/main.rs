use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use balayage::balayage::{dyadic_balayage, PoissonBalayage};
use balayage::characterization::restricted_sup_dyadic;
use balayage::constructions::{
    balayage_measure_from_function, dyadic_counterexample, dyadic_epsilon_recipe, dyadic_log,
    poisson_epsilon_recipe, poisson_staircase,
};
use balayage::measure::{carleson_constant, Measure};
use balayage::norms::{
    bmo_estimate_poisson, bmo_estimate_step, bmod_norm_sq, l1_norm, l2_norm_sq, poisson_l1_norm,
    poisson_l2_norm_sq, BmoParams,
};
use balayage::paraproduct::{
    adjoint_matrix, diag_matrix, operator_norm_ratios, paraproduct_matrix,
    verify_paraproduct_identity, HaarBasisSlice,
};
use balayage::rational::{fmt_q, parse_q, pow2, qi, to_f64, Q};
use balayage::report::NormReport;
use balayage::verify::{self, VerifyOptions};
use balayage::{square_function, DyadicInterval, Error, StepFunction, Window};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

#[derive(Parser)]
#[command(name = "balayage", version, about = "Carleson constants, balayages, BMO norms and dyadic paraproducts")]
struct Cli {
    /// Print a machine-readable JSON summary instead of the text report
    #[arg(long, global = true)]
    json: bool,
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,
    /// Floating tolerance for identity checks
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a measure or step function as JSON
    Gen {
        #[command(subcommand)]
        what: Gen,
    },
    /// Dyadic Carleson constant of a measure
    Carleson { file: PathBuf },
    /// Evaluate the dyadic or Poisson balayage of a measure
    Balayage {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Kind::Poisson)]
        kind: Kind,
        /// Comma-separated evaluation points
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        eval: Vec<f64>,
        /// Write `t,value` rows over `--range` to this file
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long, num_args = 2, allow_hyphen_values = true, value_names = ["A", "B"])]
        range: Vec<f64>,
        #[arg(long)]
        step: Option<f64>,
    },
    /// Norms of a step function, or of the balayage of a measure
    Norm {
        #[arg(value_enum)]
        which: NormKind,
        #[arg(long)]
        input: PathBuf,
        /// Scale range of the BMO grid estimate
        #[arg(long, num_args = 2, allow_hyphen_values = true, value_names = ["L", "M"])]
        scales: Vec<i32>,
    },
    /// Paraproduct matrices of a symbol on a Haar basis slice
    Paraproduct {
        file: PathBuf,
        /// Slice window as `scale:position`
        #[arg(long, default_value = "0:0", allow_hyphen_values = true)]
        window: String,
        #[arg(long, default_value_t = 4)]
        depth: u32,
        #[arg(long, value_enum)]
        matrix: Option<MatrixKind>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Run a named verification
    Verify {
        #[arg(value_enum)]
        name: VerifyName,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        depth: Option<u32>,
        /// Largest family parameter (m, N or j)
        #[arg(long)]
        max: Option<u32>,
    },
    /// Table of constants and norms across a family
    Sweep {
        #[arg(value_enum)]
        family: Family,
        #[arg(long)]
        from: u32,
        #[arg(long)]
        to: u32,
        /// Staircase scaling
        #[arg(long, default_value = "1")]
        h: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand, Clone)]
enum Gen {
    /// Poisson staircase; with `--eps`, the normalized measure with small balayage
    Staircase {
        #[arg(long)]
        m: Option<u32>,
        #[arg(long, default_value = "1")]
        h: String,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Dyadic symbol `b_N(2^K ·)`; with `--eps`, the normalized measure with small balayage
    Counterexample {
        #[arg(long)]
        n: Option<u32>,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        k: i32,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// The dyadic log `S[b_N]`
    Dyadiclog {
        #[arg(long)]
        n: u32,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// The measure `μ_f` whose dyadic balayage is `S[f]`
    MeasureFromFn {
        #[arg(long)]
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Dyadic,
    Poisson,
}

#[derive(Clone, Copy, ValueEnum)]
enum NormKind {
    Bmo,
    Bmod,
    L1,
    L2,
}

#[derive(Clone, Copy, ValueEnum)]
enum MatrixKind {
    Pi,
    Adjoint,
    Diag,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Staircase,
    DyadicCounterexample,
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifyName {
    Bala,
    Dbala,
    Dcounter,
    Paraid,
    Diagpart,
    Rademacher,
    Pcounter,
    Dbalay,
    Balay,
    Lemma41,
}

impl VerifyName {
    fn as_str(self) -> &'static str {
        match self {
            VerifyName::Bala => "bala",
            VerifyName::Dbala => "dbala",
            VerifyName::Dcounter => "dcounter",
            VerifyName::Paraid => "paraid",
            VerifyName::Diagpart => "diagpart",
            VerifyName::Rademacher => "rademacher",
            VerifyName::Pcounter => "pcounter",
            VerifyName::Dbalay => "dbalay",
            VerifyName::Balay => "balay",
            VerifyName::Lemma41 => "lemma41",
        }
    }
}

enum Failure {
    Usage(String),
    Input(String),
    Verdict,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_) => Failure::Input(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

/// Either input kind accepted by `norm`.
enum Object {
    Step(StepFunction),
    Measure(Measure),
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn read_measure(path: &Path) -> Result<Measure, Failure> {
    Measure::from_json(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn read_step(path: &Path) -> Result<StepFunction, Failure> {
    StepFunction::from_json(&read(path)?)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn read_object(path: &Path) -> Result<Object, Failure> {
    let text = read(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let bad = |e: Error| Failure::Input(format!("{}: {e}", path.display()));
    if value.get("breakpoints").is_some() {
        StepFunction::from_json(&text).map(Object::Step).map_err(bad)
    } else {
        Measure::from_json(&text).map(Object::Measure).map_err(bad)
    }
}

fn write(path: &Path, contents: &str) -> Outcome {
    fs::write(path, contents).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn rational(s: &str) -> Result<Q, Failure> {
    parse_q(s).map_err(|e| Failure::Usage(e.to_string()))
}

/// Writes JSON to `output` or stdout.
fn emit(json: String, output: Option<&PathBuf>, what: &str) -> Outcome {
    match output {
        Some(p) => {
            write(p, &json)?;
            eprintln!("wrote {what} to {}", p.display());
        }
        None => println!("{json}"),
    }
    Ok(())
}

fn gen(what: Gen) -> Outcome {
    match what {
        Gen::Staircase { m, h, eps, output } => {
            let mu = match (m, eps) {
                (_, Some(eps)) => {
                    let r = poisson_epsilon_recipe(eps)?;
                    eprintln!("m = {}, h = 2^-{}, L1 = {}", r.m, r.h_exp, fmt_q(&r.l1));
                    r.measure()?
                }
                (Some(m), None) => poisson_staircase(m, &rational(&h)?)?,
                (None, None) => return Err(Failure::Usage("staircase needs --m or --eps".into())),
            };
            emit(mu.to_json(), output.as_ref(), "measure")
        }
        Gen::Counterexample { n, k, eps, output } => match (n, eps) {
            (_, Some(eps)) => {
                let r = dyadic_epsilon_recipe(eps)?;
                eprintln!("N = {}, K = {}, |S|_2^2 = {}", r.n, r.k, fmt_q(&r.l2_sq));
                emit(r.measure()?.to_json(), output.as_ref(), "measure")
            }
            (Some(n), None) => {
                let b = dyadic_counterexample(n)?.dilate(k);
                emit(b.to_json(), output.as_ref(), "step function")
            }
            (None, None) => Err(Failure::Usage("counterexample needs --n or --eps".into())),
        },
        Gen::Dyadiclog { n, output } => emit(dyadic_log(n).to_json(), output.as_ref(), "step function"),
        Gen::MeasureFromFn { input, output } => {
            let f = read_step(&input)?;
            let mu = balayage_measure_from_function(&f, Window::covering(&f, 0))?;
            emit(mu.to_json(), output.as_ref(), "measure")
        }
    }
}

fn print_report(name: &str, r: &NormReport, json: bool) {
    if json {
        println!("{}", r.to_json());
        return;
    }
    match &r.exact {
        Some(q) => println!("{name} = {} ({})", fmt_q(q), r.value),
        None => println!("{name} = {:.16e} ({:?})", r.value, r.method),
    }
    if let Some(w) = &r.witness {
        println!("witness {}", serde_json::to_string(w).unwrap_or_default());
    }
}

fn carleson(file: &Path, json: bool) -> Outcome {
    let m = read_measure(file)?;
    let r = carleson_constant(&m);
    if json {
        println!("{}", r.to_json());
    } else {
        println!("Carl = {} ({})", fmt_q(r.exact.as_ref().expect("exact")), r.value);
        match r.dyadic_witness() {
            Some(i) => println!("witness {i} (scale {}, position {})", i.scale, i.pos),
            None => println!("witness none (zero measure)"),
        }
    }
    Ok(())
}

fn grid(range: &[f64], step: f64) -> Result<Vec<f64>, Failure> {
    let (a, b) = (range[0], range[1]);
    if !(step > 0.0) || !(b >= a) {
        return Err(Failure::Usage("need a <= b and step > 0".into()));
    }
    let n = ((b - a) / step + 1e-9).floor() as usize + 1;
    Ok((0..n).map(|i| a + i as f64 * step).collect())
}

fn balayage_cmd(
    file: &Path,
    kind: Kind,
    eval: &[f64],
    csv: Option<&PathBuf>,
    range: &[f64],
    step: Option<f64>,
    json: bool,
) -> Outcome {
    let m = read_measure(file)?;
    let f: Box<dyn Fn(f64) -> f64> = match kind {
        Kind::Dyadic => {
            let s = dyadic_balayage(&m);
            Box::new(move |t| s.eval_f64(t))
        }
        Kind::Poisson => {
            let p = PoissonBalayage::new(&m);
            Box::new(move |t| p.eval(t))
        }
    };
    if let Some(path) = csv {
        let Some(step) = step else {
            return Err(Failure::Usage("--csv needs --range A B and --step S".into()));
        };
        if range.len() != 2 {
            return Err(Failure::Usage("--csv needs --range A B".into()));
        }
        let mut out = String::from("t,value\n");
        for t in grid(range, step)? {
            out.push_str(&format!("{:.16e},{:.16e}\n", t, f(t)));
        }
        write(path, &out)?;
        eprintln!("wrote {}", path.display());
    }
    if eval.is_empty() && csv.is_none() {
        return Err(Failure::Usage("give --eval points or --csv with --range and --step".into()));
    }
    let values: Vec<(f64, f64)> = eval.iter().map(|&t| (t, f(t))).collect();
    if json {
        let rows: Vec<_> = values.iter().map(|(t, v)| json!({"t": t, "value": v})).collect();
        println!("{}", serde_json::Value::Array(rows));
    } else {
        for (t, v) in values {
            println!("{t} {v:.16e}");
        }
    }
    Ok(())
}

fn bmo_params(scales: &[i32]) -> Result<BmoParams, Failure> {
    match scales {
        [] => Ok(BmoParams::default()),
        [l, m] if l <= m => Ok(BmoParams::scales(*l, *m)),
        _ => Err(Failure::Usage("--scales needs L <= M".into())),
    }
}

fn norm(which: NormKind, input: &Path, scales: &[i32], json: bool) -> Outcome {
    let params = bmo_params(scales)?;
    let obj = read_object(input)?;
    let (name, r) = match (which, &obj) {
        (NormKind::Bmo, Object::Step(f)) => ("bmo", bmo_estimate_step(f, &params)?),
        (NormKind::Bmo, Object::Measure(m)) => {
            ("bmo", bmo_estimate_poisson(&PoissonBalayage::new(m), &params)?)
        }
        (NormKind::Bmod, Object::Step(f)) => ("bmod^2", bmod_norm_sq(f)),
        (NormKind::Bmod, Object::Measure(m)) => ("bmod^2", bmod_norm_sq(&dyadic_balayage(m))),
        (NormKind::L1, Object::Step(f)) => ("l1", l1_norm(f)),
        (NormKind::L1, Object::Measure(m)) => ("l1", poisson_l1_norm(m)),
        (NormKind::L2, Object::Step(f)) => ("l2^2", l2_norm_sq(f)),
        (NormKind::L2, Object::Measure(m)) => ("l2^2", poisson_l2_norm_sq(&PoissonBalayage::new(m))),
    };
    print_report(name, &r, json);
    Ok(())
}

fn paraproduct(
    file: &Path,
    window: &str,
    depth: u32,
    matrix: Option<MatrixKind>,
    csv: Option<&PathBuf>,
    json: bool,
) -> Outcome {
    let b = read_step(file)?;
    let w = DyadicInterval::parse_label(window).map_err(|e| Failure::Usage(e.to_string()))?;
    if depth == 0 || depth > 10 {
        return Err(Failure::Usage("--depth must be in 1..=10".into()));
    }
    let slice = HaarBasisSlice::new(w, depth);
    let identity = verify_paraproduct_identity(&b, &slice)?;
    let ratios = operator_norm_ratios(&b, &slice)?;
    if let Some(path) = csv {
        let m = match matrix.unwrap_or(MatrixKind::Pi) {
            MatrixKind::Pi => paraproduct_matrix(&b, &slice)?,
            MatrixKind::Adjoint => adjoint_matrix(&b, &slice)?,
            MatrixKind::Diag => diag_matrix(&b, &slice),
        };
        write(path, &m.to_csv())?;
        eprintln!("wrote {}", path.display());
    }
    if json {
        println!("{}", json!({"identity": identity, "norms": ratios}));
    } else {
        println!(
            "{} identity: residual {:.3e}, exact mismatches {} of {}",
            if identity.pass { "PASS" } else { "FAIL" },
            identity.residual,
            identity.exact_mismatches,
            identity.checked
        );
        println!(
            "|pi_b| = {:.6}, |pi_S| = {:.6}, |pi_S + pi_S*| = {:.6}, |off-diagonal| = {:.6}",
            ratios.pi_b, ratios.pi_s, ratios.pi_s_sym, ratios.off_diag
        );
        println!("bmod(b) = {:.6}, bmod(S[b]) = {:.6}", ratios.bmod_b, ratios.bmod_s);
    }
    if identity.pass {
        Ok(())
    } else {
        Err(Failure::Verdict)
    }
}

fn verify_cmd(
    name: VerifyName,
    samples: Option<usize>,
    depth: Option<u32>,
    max: Option<u32>,
    cli: &Cli,
) -> Outcome {
    let mut o = VerifyOptions::for_name(name.as_str());
    o.seed = cli.seed;
    o.tol = cli.tol;
    o.samples = samples.unwrap_or(o.samples);
    o.depth = depth.unwrap_or(o.depth);
    o.max_param = max.unwrap_or(o.max_param);
    let v = verify::run(name.as_str(), &o)?;
    if cli.json {
        println!("{}", serde_json::to_string(&v).expect("verdict serializes"));
    } else {
        println!("{}", v.line());
        for n in &v.notes {
            println!("  {n}");
        }
    }
    if v.pass {
        Ok(())
    } else {
        Err(Failure::Verdict)
    }
}

fn cell(x: f64) -> String {
    format!("{x:.16e}")
}

/// One row: `param, carl, bmo_estimate, bmod, l1, l2, restricted_sup`.
fn sweep_row(family: Family, p: u32, h: &Q) -> Result<Vec<String>, Failure> {
    match family {
        Family::Staircase => {
            let mu = poisson_staircase(p, h)?;
            let carl = carleson_constant(&mu).exact.expect("exact");
            let pb = PoissonBalayage::new(&mu);
            // dyadic h: move the scale range with the measure
            let e = -balayage::rational::floor_log2(h);
            let params = if pow2(-e) == *h {
                BmoParams::default().dilated(e)
            } else {
                BmoParams::default()
            };
            let bmo = bmo_estimate_poisson(&pb, &params)?.value;
            let bmod = bmod_norm_sq(&dyadic_balayage(&mu)).value;
            let l1 = balayage::balayage::poisson_l1(&mu);
            let l2 = poisson_l2_norm_sq(&pb).value.sqrt();
            let sup = restricted_sup_dyadic(&mu)?.value;
            Ok(vec![
                p.to_string(),
                fmt_q(&carl),
                cell(bmo),
                cell(bmod),
                fmt_q(&l1),
                cell(l2),
                cell(sup),
            ])
        }
        Family::DyadicCounterexample => {
            let b = dyadic_counterexample(p)?;
            let mu = balayage_measure_from_function(&b, Window::covering(&b, 0))?;
            let carl = carleson_constant(&mu).exact.expect("exact");
            let s = square_function(&b, Window::covering(&b, 0))?.value;
            let bmo = bmo_estimate_step(&s, &BmoParams::default())?.value;
            let bmod = bmod_norm_sq(&b).exact.expect("exact");
            let l1 = s.l1_norm();
            let l2 = to_f64(&s.l2_norm_sq()).sqrt();
            let sup = restricted_sup_dyadic(&mu)?.value;
            Ok(vec![
                p.to_string(),
                fmt_q(&carl),
                cell(bmo),
                fmt_q(&bmod),
                fmt_q(&l1),
                cell(l2),
                cell(sup),
            ])
        }
    }
}

fn sweep(family: Family, from: u32, to: u32, h: &str, output: Option<&PathBuf>) -> Outcome {
    if from > to {
        return Err(Failure::Usage(format!("empty range {from}..={to}")));
    }
    let h = rational(h)?;
    if h <= qi(0) {
        return Err(Failure::Usage("h must be positive".into()));
    }
    let mut out = String::from("param,carl,bmo_estimate,bmod,l1,l2,restricted_sup\n");
    for p in from..=to {
        out.push_str(&sweep_row(family, p, &h)?.join(","));
        out.push('\n');
    }
    match output {
        Some(path) => {
            write(path, &out)?;
            eprintln!("wrote {}", path.display());
        }
        None => print!("{out}"),
    }
    Ok(())
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Gen { what } => gen(what.clone()),
        Command::Carleson { file } => carleson(file, cli.json),
        Command::Balayage {
            file,
            kind,
            eval,
            csv,
            range,
            step,
        } => balayage_cmd(file, *kind, eval, csv.as_ref(), range, *step, cli.json),
        Command::Norm { which, input, scales } => norm(*which, input, scales, cli.json),
        Command::Paraproduct {
            file,
            window,
            depth,
            matrix,
            csv,
        } => paraproduct(file, window, *depth, *matrix, csv.as_ref(), cli.json),
        Command::Verify {
            name,
            samples,
            depth,
            max,
        } => verify_cmd(*name, *samples, *depth, *max, cli),
        Command::Sweep {
            family,
            from,
            to,
            h,
            output,
        } => sweep(*family, *from, *to, h, output.as_ref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verdict) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: malformed input: {msg}");
            ExitCode::from(3)
        }
    }
}
