use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{error::ErrorKind, Args, Parser, Subcommand, ValueEnum};
use lambert_tsallis::domain::{boundary_samples, classify, cut_set, BoundaryExport, CutKind, CutSet};
use lambert_tsallis::inverse::{EvalOptions, MainBranch};
use lambert_tsallis::tsallis_map::{f_eval, q_roots};
use lambert_tsallis::verify::{default_grid, run_grid, verify, GridReport, VerificationReport, VerifyOptions};
use lambert_tsallis::{Error, Kappa, Params};
use num_complex::Complex64;
use serde_json::{json, Value};

mod num;

use num::{g15, opt, round_json};

#[derive(Parser)]
#[command(name = "lambert-tsallis", version, about = "Main branch of the generalized Lambert-Tsallis function")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide whether a main branch exists and summarize the critical points and cut.
    #[command(allow_negative_numbers = true)]
    Classify {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Evaluate f (mode f) or the main branch W (mode w) at re + i im.
    #[command(allow_negative_numbers = true)]
    Eval {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_enum, default_value_t = Mode::W)]
        mode: Mode,
        re: f64,
        im: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Export the upper half of the boundary of the fundamental domain.
    #[command(allow_negative_numbers = true)]
    Boundary {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 512)]
        samples: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Run the winding, round-trip, sign and table checks for one pair or a grid.
    #[command(allow_negative_numbers = true)]
    Verify {
        #[arg(long, required_unless_present = "grid", requires = "gamma", conflicts_with = "grid")]
        kappa: Option<Kappa>,
        #[arg(long, requires = "kappa")]
        gamma: Option<f64>,
        /// Parameter grid to sweep instead of a single pair.
        #[arg(long, value_enum)]
        grid: Option<Grid>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct ParamArgs {
    /// Decimal or `inf`.
    #[arg(long)]
    kappa: Kappa,
    #[arg(long)]
    gamma: f64,
}

#[derive(Args)]
struct Common {
    #[arg(long, value_enum, default_value_t = Format::Plain)]
    format: Format,
    /// Write to this file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for all random sampling.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Plain,
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    F,
    W,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Grid {
    Default,
}

enum Fail {
    Usage(String),
    NoBranch(String),
    Eval(String),
    Verify(String),
    Io(String),
}

impl Fail {
    fn code(&self) -> u8 {
        match self {
            Fail::Usage(_) => 64,
            Fail::NoBranch(_) => 2,
            Fail::Eval(_) => 3,
            Fail::Verify(_) => 4,
            Fail::Io(_) => 74,
        }
    }

    fn message(&self) -> &str {
        match self {
            Fail::Usage(m) | Fail::NoBranch(m) | Fail::Eval(m) | Fail::Verify(m) | Fail::Io(m) => m,
        }
    }
}

/// Text to emit, plus a failure that still wants its output printed.
struct Output {
    text: String,
    fail: Option<Fail>,
}

impl Output {
    fn ok(text: String) -> Output {
        Output { text, fail: None }
    }
}

fn params_of(a: &ParamArgs) -> Result<Params, Fail> {
    Params::new(a.kappa, a.gamma).map_err(|e| Fail::Usage(e.to_string()))
}

fn kappa_label(k: Kappa) -> String {
    match k {
        Kappa::Finite(x) if k.is_integer() => format!("{} (integer)", g15(x)),
        Kappa::Finite(x) => g15(x),
        Kappa::Infinite => "inf".into(),
    }
}

fn kappa_json(k: Kappa) -> Value {
    match k {
        Kappa::Finite(x) => json!(x),
        Kappa::Infinite => json!("inf"),
    }
}

fn complex_str(z: Complex64) -> String {
    if z.im == 0.0 {
        return g15(z.re);
    }
    let sign = if z.im < 0.0 { '-' } else { '+' };
    format!("{}{sign}{}i", g15(z.re), g15(z.im.abs()))
}

fn complex_json(z: Complex64) -> Value {
    json!({"re": z.re, "im": z.im})
}

fn render_json(mut v: Value) -> String {
    round_json(&mut v);
    let mut s = serde_json::to_string_pretty(&v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn cut_str(c: &CutSet) -> String {
    match c.kind {
        CutKind::Empty => "empty".into(),
        CutKind::HalfLine => format!("(-inf, {}]", g15(c.hi)),
        CutKind::Interval => format!("[{}, {}]", g15(c.lo), g15(c.hi)),
    }
}

fn cut_kind(c: &CutSet) -> &'static str {
    match c.kind {
        CutKind::Empty => "empty",
        CutKind::HalfLine => "half_line",
        CutKind::Interval => "interval",
    }
}

fn cmd_classify(a: &ParamArgs, common: &Common) -> Result<Output, Fail> {
    let p = params_of(a)?;
    let class = classify(&p);
    let (a1, a2) = q_roots(&p);
    let cut = cut_set(&p).ok();
    let identity = p.kappa.is_one() && p.gamma == 1.0;
    let reduced = p.reduced();
    let text = match common.format {
        Format::Plain => {
            let mut s = String::new();
            let _ = writeln!(s, "kappa: {}", kappa_label(p.kappa));
            let _ = writeln!(s, "gamma: {}", g15(p.gamma));
            if let Some(r) = reduced {
                let _ = writeln!(s, "reduced: kappa={} gamma={}", kappa_label(r.kappa), g15(r.gamma));
            }
            let _ = writeln!(s, "class: {}", class.tag());
            let _ = writeln!(s, "exists: {}", class.exists());
            let _ = writeln!(s, "D(0): {}", g15(p.disc0()));
            let _ = writeln!(s, "alpha1: {}", complex_str(a1));
            let _ = writeln!(s, "alpha2: {}", complex_str(a2));
            let _ = writeln!(s, "cut: {}", cut.as_ref().map_or("none".into(), cut_str));
            if identity {
                let _ = writeln!(s, "note: f is the identity map");
            }
            s
        }
        Format::Json => render_json(json!({
            "params": {"kappa": kappa_json(p.kappa), "gamma": p.gamma},
            "kappa_integer": p.kappa.is_integer(),
            "reduced": reduced.map(|r| json!({"kappa": kappa_json(r.kappa), "gamma": r.gamma})),
            "class": class.tag(),
            "exists": class.exists(),
            "disc0": p.disc0(),
            "alpha1": complex_json(a1),
            "alpha2": complex_json(a2),
            "cut": cut.as_ref().map(|c| json!({
                "kind": cut_kind(c),
                "lo": c.lo.is_finite().then_some(c.lo),
                "hi": c.hi.is_finite().then_some(c.hi),
            })),
            "identity": identity,
        })),
        Format::Csv => {
            let (kind, lo, hi) = match &cut {
                Some(c) => (cut_kind(c), c.lo, c.hi),
                None => ("none", f64::NAN, f64::NAN),
            };
            let fin = |x: f64| if x.is_nan() { String::new() } else { g15(x) };
            format!(
                "kappa,gamma,class,exists,disc0,alpha1_re,alpha1_im,alpha2_re,alpha2_im,cut_kind,cut_lo,cut_hi\n{},{},{},{},{},{},{},{},{},{},{},{}\n",
                p.kappa,
                g15(p.gamma),
                class.tag(),
                class.exists(),
                g15(p.disc0()),
                g15(a1.re),
                g15(a1.im),
                g15(a2.re),
                g15(a2.im),
                kind,
                fin(lo),
                fin(hi)
            )
        }
    };
    let fail = (!class.exists()).then(|| Fail::NoBranch(format!("no main branch: {}", class.tag())));
    Ok(Output { text, fail })
}

fn eval_error(e: Error) -> Fail {
    match e {
        Error::NoBranch(c) => Fail::NoBranch(format!("no main branch: {}", c.tag())),
        e => Fail::Eval(e.to_string()),
    }
}

fn cmd_eval(a: &ParamArgs, mode: Mode, re: f64, im: f64, common: &Common) -> Result<Output, Fail> {
    let p = params_of(a)?;
    let input = Complex64::new(re, im);
    let (value, residual, iterations, critical) = match mode {
        Mode::F => (f_eval(&p, input).map_err(eval_error)?, None, None, None),
        Mode::W => {
            let mb = MainBranch::new(&p).map_err(eval_error)?;
            let r = mb.eval(input, &EvalOptions::from_env()).map_err(eval_error)?;
            (r.z, Some(r.residual), Some(r.iterations), Some(r.critical))
        }
    };
    let mode_tag = if mode == Mode::F { "f" } else { "w" };
    let text = match common.format {
        Format::Plain => {
            let mut s = format!("value: {}\n", complex_str(value));
            if let Some(r) = residual {
                let _ = writeln!(s, "residual: {}", g15(r));
            }
            if critical == Some(true) {
                let _ = writeln!(s, "note: critical value, returned the critical point");
            }
            s
        }
        Format::Json => render_json(json!({
            "mode": mode_tag,
            "params": {"kappa": kappa_json(p.kappa), "gamma": p.gamma},
            "input": complex_json(input),
            "value": complex_json(value),
            "residual": residual,
            "iterations": iterations,
            "critical": critical,
        })),
        Format::Csv => format!(
            "mode,in_re,in_im,re,im,residual\n{mode_tag},{},{},{},{},{}\n",
            g15(re),
            g15(im),
            g15(value.re),
            g15(value.im),
            opt(residual)
        ),
    };
    Ok(Output::ok(text))
}

fn boundary_text(e: &BoundaryExport, format: Format) -> String {
    match format {
        Format::Json => render_json(serde_json::to_value(e).expect("export serializes")),
        Format::Csv => {
            let mut s = String::from("theta,r_minus,r_plus,x_minus,y_minus,x_plus,y_plus\n");
            for p in &e.samples {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{}",
                    g15(p.theta),
                    opt(p.r_minus),
                    opt(p.r_plus),
                    opt(p.x_minus),
                    opt(p.y_minus),
                    opt(p.x_plus),
                    opt(p.y_plus)
                );
            }
            s
        }
        Format::Plain => {
            let mut s = String::new();
            let _ = writeln!(s, "# case: {}", e.case.tag());
            if let Some(t) = e.theta_star {
                let _ = writeln!(s, "# theta_star: {}", g15(t));
            }
            if let Some(y) = e.y0 {
                let _ = writeln!(s, "# y0: {}", g15(y));
            }
            for a in &e.asymptotes {
                let _ = writeln!(s, "# asymptote: slope_angle={} offset={}", g15(a.slope_angle), g15(a.offset));
            }
            let _ = writeln!(s, "# theta r_minus r_plus x_minus y_minus x_plus y_plus");
            let cell = |x: Option<f64>| x.map_or("nan".into(), g15);
            for p in &e.samples {
                let _ = writeln!(
                    s,
                    "{} {} {} {} {} {} {}",
                    g15(p.theta),
                    cell(p.r_minus),
                    cell(p.r_plus),
                    cell(p.x_minus),
                    cell(p.y_minus),
                    cell(p.x_plus),
                    cell(p.y_plus)
                );
            }
            s
        }
    }
}

fn cmd_boundary(a: &ParamArgs, samples: usize, common: &Common) -> Result<Output, Fail> {
    let p = params_of(a)?;
    if samples == 0 {
        return Err(Fail::Usage("--samples must be positive".into()));
    }
    let work = match p.reduced() {
        Some(r) => {
            eprintln!(
                "note: negative kappa; boundary is given for kappa={} gamma={} in the variable z/(1 + z/({}))",
                r.kappa,
                g15(r.gamma),
                p.kappa
            );
            r
        }
        None => p,
    };
    let e = boundary_samples(&work, samples).map_err(eval_error)?;
    Ok(Output::ok(boundary_text(&e, common.format)))
}

fn report_text(r: &VerificationReport, format: Format) -> String {
    match format {
        Format::Json => render_json(serde_json::to_value(r).expect("report serializes")),
        Format::Csv => {
            let w: Vec<String> = r.windings.iter().map(|w| w.value.map_or("?".into(), |v| v.to_string())).collect();
            format!(
                "kappa,gamma,class,case,windings,realness_defect,residual_max,sign_violations,lemma_failures,refused,errors,pass\n{},{},{},{},{},{},{},{},{},{},{},{}\n",
                r.params.kappa,
                g15(r.params.gamma),
                r.class,
                r.case.map_or("", |c| c.tag()),
                w.join(";"),
                opt(r.realness_defect),
                opt(r.residual_max),
                r.sign_violations,
                r.lemma_failures.len(),
                r.refused.map_or(String::new(), |b| b.to_string()),
                r.errors.len(),
                r.pass
            )
        }
        Format::Plain => {
            let mut s = String::new();
            let _ = writeln!(s, "params: kappa={} gamma={}", kappa_label(r.params.kappa), g15(r.params.gamma));
            let _ = writeln!(s, "class: {}", r.class);
            if let Some(c) = r.case {
                let _ = writeln!(s, "case: {}", c.tag());
            }
            for w in &r.windings {
                let v = match (&w.value, &w.error) {
                    (Some(v), _) => v.to_string(),
                    (None, Some(e)) => format!("unresolved ({e})"),
                    (None, None) => "unresolved".into(),
                };
                let _ = writeln!(s, "winding at {}: {v}", complex_str(w.probe));
            }
            if let Some(d) = r.realness_defect {
                let _ = writeln!(s, "boundary image defect: {}", g15(d));
            }
            if let Some(m) = r.residual_max {
                let _ = writeln!(s, "round-trip max: {}", g15(m));
            }
            if r.class != "domain_obstruction" && r.class != "two_to_one" {
                let _ = writeln!(s, "sign violations: {}", r.sign_violations);
            }
            if let Some(b) = r.refused {
                let _ = writeln!(s, "evaluation refused: {b}");
            }
            let _ = writeln!(s, "table failures: {}", r.lemma_failures.len());
            for f in r.lemma_failures.iter().take(5) {
                let _ = writeln!(s, "  {f}");
            }
            for e in &r.errors {
                let _ = writeln!(s, "error: {e}");
            }
            let _ = writeln!(s, "result: {}", if r.pass { "consistent" } else { "INCONSISTENT" });
            s
        }
    }
}

fn grid_text(g: &GridReport, format: Format) -> String {
    let windings = |w: &[Option<i64>]| w.iter().map(|v| v.map_or("?".into(), |v| v.to_string())).collect::<Vec<_>>();
    match format {
        Format::Json => render_json(serde_json::to_value(g).expect("grid serializes")),
        Format::Csv => {
            let mut s = String::from("index,kappa,gamma,class,distance,skipped,windings,realness_defect,bijective,consistent,error\n");
            for c in &g.cells {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{},{},{},{},{}",
                    c.index,
                    c.params.kappa,
                    g15(c.params.gamma),
                    c.class,
                    g15(c.distance),
                    c.skipped,
                    windings(&c.windings).join(";"),
                    opt(c.realness_defect),
                    c.bijective.map_or(String::new(), |b| b.to_string()),
                    c.consistent,
                    c.error.as_deref().unwrap_or("").replace(',', ";")
                );
            }
            s
        }
        Format::Plain => {
            let mut s = String::new();
            for c in &g.cells {
                let status = if c.skipped {
                    "skipped".to_string()
                } else if c.consistent {
                    format!("ok windings=[{}]", windings(&c.windings).join(","))
                } else {
                    format!("INCONSISTENT windings=[{}] {}", windings(&c.windings).join(","), c.error.as_deref().unwrap_or(""))
                };
                let _ = writeln!(s, "{:4} kappa={} gamma={} {} {status}", c.index, c.params.kappa, g15(c.params.gamma), c.class);
            }
            let _ = writeln!(s, "cells: {} probed: {} inconsistent: {}", g.cells.len(), g.probed, g.inconsistent);
            s
        }
    }
}

fn cmd_verify(kappa: Option<Kappa>, gamma: Option<f64>, grid: Option<Grid>, common: &Common) -> Result<Output, Fail> {
    if grid.is_some() {
        let g = run_grid(&default_grid());
        let fail = (g.inconsistent > 0).then(|| Fail::Verify(format!("{} inconsistent cells", g.inconsistent)));
        return Ok(Output { text: grid_text(&g, common.format), fail });
    }
    let (Some(k), Some(g)) = (kappa, gamma) else {
        return Err(Fail::Usage("verify needs --kappa and --gamma, or --grid".into()));
    };
    let p = Params::new(k, g).map_err(|e| Fail::Usage(e.to_string()))?;
    let r = verify(&p, &VerifyOptions { seed: common.seed, ..VerifyOptions::default() });
    let fail = (!r.pass).then(|| Fail::Verify("checks disagree with the classification".into()));
    Ok(Output { text: report_text(&r, common.format), fail })
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), Fail> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Fail::Io(format!("{}: {e}", path.display()))),
        None => {
            let mut so = std::io::stdout().lock();
            match so.write_all(text.as_bytes()).and_then(|_| so.flush()) {
                // a closed pipe (`| head`) is not an error
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Fail::Io(e.to_string())),
                _ => Ok(()),
            }
        }
    }
}

fn run(cli: Cli) -> Result<(), Fail> {
    let (out, common) = match &cli.cmd {
        Cmd::Classify { params, common } => (cmd_classify(params, common), common),
        Cmd::Eval { params, mode, re, im, common } => (cmd_eval(params, *mode, *re, *im, common), common),
        Cmd::Boundary { params, samples, common } => (cmd_boundary(params, *samples, common), common),
        Cmd::Verify { kappa, gamma, grid, common } => (cmd_verify(*kappa, *gamma, *grid, common), common),
    };
    let out = out?;
    emit(&out.text, common.out.as_ref())?;
    out.fail.map_or(Ok(()), Err)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(64),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
