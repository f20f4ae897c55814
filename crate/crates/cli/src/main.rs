//! `mathieu`: CSV front end for the mathieu-core library.

mod validate;

use std::f64::consts::PI;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use mathieu_core::evaluator::radius_map;
use mathieu_core::scattering::{sig17, window_points};
use mathieu_core::*;

const CACHE_ENV: &str = "MATHIEU_TABLE_CACHE";

#[derive(Parser, Debug)]
#[command(name = "mathieu", version, about = "Mathieu functions, radial series/WKB evaluation and slit/strip Green functions")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Characteristic values and Fourier coefficients as CSV `class,n,p,value`
    Tables(TablesArgs),
    /// Angular functions ce_n / se_n and their derivatives on [0, 2 pi]
    Angular(AngularArgs),
    /// Normalised radial ratio Me1/Me1'(0) or Ne1/Ne1(0), dispatched
    Radial(RadialArgs),
    /// ODE residual of the dispatched radial functions
    Residual(ResidualArgs),
    /// WKB solution of the cosh well y'' = (V0 cosh 2x - E) y
    Wkbdemo(WkbArgs),
    /// Green function of a slit or strip on a Cartesian window
    Green(GreenArgs),
    /// Far-field intensity behind a slit against the single-slit pattern
    Farfield(FarArgs),
    /// Identity, boundary-condition and reciprocity checks (exit 2 on breach)
    Validate(ValidateArgs),
}

#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
struct ThetaArg {
    /// Mathieu parameter theta
    #[arg(long)]
    theta: Option<f64>,
    /// Slit width over wavelength; theta = (pi R / 2)^2
    #[arg(long)]
    a_over_lambda: Option<f64>,
}

impl ThetaArg {
    fn value(&self) -> anyhow::Result<f64> {
        let th = match (self.theta, self.a_over_lambda) {
            (Some(t), _) => t,
            (None, Some(r)) => theta_from_ratio(r)?,
            (None, None) => bail!("one of --theta or --a-over-lambda is required"),
        };
        if !(th >= 0.0 && th.is_finite()) {
            bail!("theta must be finite and >= 0, got {th}");
        }
        Ok(th)
    }
}

fn theta_from_ratio(r: f64) -> anyhow::Result<f64> {
    if !(r > 0.0 && r.is_finite()) {
        bail!("--a-over-lambda must be positive, got {r}");
    }
    Ok((PI * r / 2.0).powi(2))
}

#[derive(Args, Debug, Clone)]
struct TableArgs {
    /// Fourier truncation order of the coefficient tables
    #[arg(long, default_value_t = 200)]
    pmax: usize,
    /// Directory for cached tables (falls back to $MATHIEU_TABLE_CACHE)
    #[arg(long)]
    cache: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct EvalArgs {
    /// Orders below this always use the series
    #[arg(long, default_value_t = 6)]
    n0: usize,
    /// Series while 1/h >= eps0
    #[arg(long, default_value_t = 0.005)]
    eps0: f64,
    /// Inside formula while 2 theta cosh(2u)/h < eps1
    #[arg(long, default_value_t = 0.1)]
    eps1: f64,
}

impl EvalArgs {
    fn config(&self) -> anyhow::Result<EvaluatorConfig> {
        let cfg = EvaluatorConfig { n0: self.n0, eps0: self.eps0, eps1: self.eps1, ..EvaluatorConfig::default() };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args, Debug, Clone)]
struct OutArg {
    /// Write CSV here instead of stdout
    #[arg(long, short)]
    out: Option<PathBuf>,
}

impl OutArg {
    fn writer(&self) -> anyhow::Result<Box<dyn Write>> {
        Ok(match &self.out {
            Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("cannot create {}", p.display()))?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ClassArg {
    Even,
    Odd,
}

impl From<ClassArg> for SymmetryClass {
    fn from(c: ClassArg) -> Self {
        match c {
            ClassArg::Even => SymmetryClass::Even,
            ClassArg::Odd => SymmetryClass::Odd,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GeometryArg {
    Slit,
    Strip,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BcArg {
    Neumann,
    Dirichlet,
}

impl From<BcArg> for BoundaryCondition {
    fn from(b: BcArg) -> Self {
        match b {
            BcArg::Neumann => BoundaryCondition::Neumann,
            BcArg::Dirichlet => BoundaryCondition::Dirichlet,
        }
    }
}

#[derive(Args, Debug)]
struct TablesArgs {
    #[command(flatten)]
    theta: ThetaArg,
    #[arg(long, default_value_t = 100)]
    nmax: usize,
    #[command(flatten)]
    table: TableArgs,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args, Debug)]
struct AngularArgs {
    #[command(flatten)]
    theta: ThetaArg,
    #[arg(long, value_enum, default_value_t = ClassArg::Even)]
    class: ClassArg,
    /// Largest order printed
    #[arg(long, default_value_t = 5)]
    nmax: usize,
    #[arg(long, default_value_t = 361)]
    samples: usize,
    #[command(flatten)]
    table: TableArgs,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args, Debug)]
struct RadialArgs {
    #[command(flatten)]
    theta: ThetaArg,
    #[arg(long, value_enum, default_value_t = ClassArg::Even)]
    class: ClassArg,
    #[arg(long, default_value_t = 10)]
    nmax: usize,
    #[arg(long, default_value_t = 3.0)]
    umax: f64,
    #[arg(long, default_value_t = 301)]
    samples: usize,
    #[command(flatten)]
    eval: EvalArgs,
    #[command(flatten)]
    table: TableArgs,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args, Debug)]
struct ResidualArgs {
    #[command(flatten)]
    theta: ThetaArg,
    #[arg(long, default_value_t = 100)]
    nmax: usize,
    #[arg(long, default_value_t = 3.0)]
    umax: f64,
    #[arg(long, default_value_t = 300)]
    samples: usize,
    #[command(flatten)]
    eval: EvalArgs,
    #[command(flatten)]
    table: TableArgs,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args, Debug)]
struct WkbArgs {
    #[arg(long, default_value_t = 1.0)]
    v0: f64,
    #[arg(long, default_value_t = -20.0, allow_hyphen_values = true)]
    energy: f64,
    #[arg(long, default_value_t = 4.0)]
    xmax: f64,
    #[arg(long, default_value_t = 801)]
    samples: usize,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args, Debug)]
struct GreenArgs {
    #[arg(long, value_enum)]
    geometry: GeometryArg,
    #[arg(long, value_enum)]
    bc: BcArg,
    #[arg(long, default_value_t = 2.0)]
    a_over_lambda: f64,
    #[arg(long, allow_hyphen_values = true)]
    source_x: f64,
    #[arg(long, allow_hyphen_values = true)]
    source_y: f64,
    /// x0,x1,y0,y1
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "-5,5,-5,5")]
    window: Vec<f64>,
    /// NxM samples along x and y
    #[arg(long, default_value = "101x101")]
    samples: String,
    /// Number of modes in the series
    #[arg(long, default_value_t = 60)]
    nterms: usize,
    /// Focal distance in the coordinate units (the slit width)
    #[arg(long, default_value_t = 2.0)]
    focal_length: f64,
    #[command(flatten)]
    eval: EvalArgs,
    #[command(flatten)]
    table: TableArgs,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args, Debug)]
struct FarArgs {
    /// Angle of incidence in (0, pi); the source sits at v = v0 - pi
    #[arg(long, default_value_t = PI / 2.0)]
    v0: f64,
    #[arg(long, default_value_t = 5.0)]
    u0: f64,
    #[arg(long, default_value_t = 5.0)]
    um: f64,
    #[arg(long, default_value_t = 721)]
    samples: usize,
    #[arg(long, default_value_t = 2.0)]
    a_over_lambda: f64,
    #[arg(long, value_enum, default_value_t = BcArg::Neumann)]
    bc: BcArg,
    #[arg(long, default_value_t = 60)]
    nterms: usize,
    #[command(flatten)]
    eval: EvalArgs,
    #[command(flatten)]
    table: TableArgs,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    /// Modes used for the half-plane identity
    #[arg(long, default_value_t = 400)]
    nterms: usize,
    /// Random source/field pairs per geometry for reciprocity
    #[arg(long, default_value_t = 20)]
    pairs: usize,
    #[command(flatten)]
    table: TableArgs,
}

fn load_table(theta: f64, nmax: usize, t: &TableArgs) -> anyhow::Result<CoefficientTable> {
    let pmax = t.pmax.max(nmax + 40);
    if pmax != t.pmax {
        eprintln!("warning: --pmax raised from {} to {pmax} to cover order {nmax}", t.pmax);
    }
    let dir = t.cache.clone().or_else(|| std::env::var_os(CACHE_ENV).map(PathBuf::from));
    let table = match dir {
        Some(d) => build_tables_cached(theta, nmax, pmax, &d)?,
        None => build_tables(theta, nmax, pmax)?,
    };
    if let Some(w) = &table.truncation_warning {
        eprintln!("warning: {w}");
    }
    Ok(table)
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
    }
}

fn positive(name: &str, v: f64) -> anyhow::Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        bail!("{name} must be positive, got {v}");
    }
    Ok(())
}

fn class_label(c: SymmetryClass) -> &'static str {
    match c {
        SymmetryClass::Even => "even",
        SymmetryClass::Odd => "odd",
    }
}

fn tables(a: &TablesArgs) -> anyhow::Result<()> {
    let th = a.theta.value()?;
    let t = load_table(th, a.nmax, &a.table)?;
    let mut w = a.out.writer()?;
    writeln!(w, "class,n,p,value")?;
    for (label, chars) in [("a", &t.char_even), ("b", &t.char_odd)] {
        for (n, v) in chars.iter().enumerate() {
            if label == "b" && n == 0 {
                continue;
            }
            writeln!(w, "{label},{n},,{}", sig17(*v))?;
        }
    }
    for (label, class, coeffs) in [("A", SymmetryClass::Even, &t.coeff_even), ("B", SymmetryClass::Odd, &t.coeff_odd)] {
        for (n, c) in coeffs.iter().enumerate() {
            if class == SymmetryClass::Odd && n == 0 {
                continue;
            }
            for (j, v) in c.iter().enumerate() {
                writeln!(w, "{label},{n},{},{}", class.offset(n) + 2 * j, sig17(*v))?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn angular(a: &AngularArgs) -> anyhow::Result<()> {
    let th = a.theta.value()?;
    let class: SymmetryClass = a.class.into();
    let t = load_table(th, a.nmax, &a.table)?;
    let mut w = a.out.writer()?;
    writeln!(w, "class,n,v,value,deriv")?;
    let lo = if class == SymmetryClass::Odd { 1 } else { 0 };
    for n in lo..=a.nmax {
        for v in linspace(0.0, 2.0 * PI, a.samples) {
            let (f, fp) = angular_pair(&t, class, n, v)?;
            writeln!(w, "{},{n},{},{},{}", class_label(class), sig17(v), sig17(f), sig17(fp))?;
        }
    }
    w.flush()?;
    Ok(())
}

fn radial(a: &RadialArgs) -> anyhow::Result<()> {
    let th = a.theta.value()?;
    positive("--umax", a.umax)?;
    let class: SymmetryClass = a.class.into();
    let cfg = a.eval.config()?;
    let t = load_table(th, a.nmax, &a.table)?;
    let ev = Evaluator::new(&t, cfg)?;
    let mut w = a.out.writer()?;
    writeln!(w, "n,u,k_abs_x,re,im")?;
    let mut fallbacks = 0;
    let lo = if class == SymmetryClass::Odd { 1 } else { 0 };
    for n in lo..=a.nmax {
        for u in linspace(0.0, a.umax, a.samples) {
            let r = ev.evaluate(class, n, u)?;
            fallbacks += r.fell_back as usize;
            writeln!(w, "{n},{},{},{},{}", sig17(u), sig17(radius_map(th, u)?), sig17(r.ratio.re), sig17(r.ratio.im))?;
        }
    }
    w.flush()?;
    if fallbacks > 0 {
        eprintln!("warning: {fallbacks} points fell back to the series after a WKB precision error");
    }
    Ok(())
}

fn residual(a: &ResidualArgs) -> anyhow::Result<()> {
    let th = a.theta.value()?;
    positive("--umax", a.umax)?;
    let cfg = a.eval.config()?;
    let t = load_table(th, a.nmax, &a.table)?;
    let ev = Evaluator::new(&t, cfg)?;
    // u = 0 is excluded: the residual needs a centred stencil
    let grid: Vec<f64> = (1..=a.samples).map(|i| a.umax * i as f64 / a.samples as f64).collect();
    let mut w = a.out.writer()?;
    writeln!(w, "class,n,u,branch,eps")?;
    let mut masked = 0;
    for class in [SymmetryClass::Even, SymmetryClass::Odd] {
        let lo = if class == SymmetryClass::Odd { 1 } else { 0 };
        for n in lo..=a.nmax {
            let rep = ev.residual(class, n, &grid)?;
            masked += rep.masked;
            for ((u, e), b) in grid.iter().zip(&rep.eps).zip(&rep.branches) {
                let e = e.map(sig17).unwrap_or_default();
                writeln!(w, "{},{n},{},{},{e}", class_label(class), sig17(*u), b.label())?;
            }
        }
    }
    w.flush()?;
    if masked > 0 {
        eprintln!("note: {masked} points near nodes have no residual");
    }
    Ok(())
}

fn wkbdemo(a: &WkbArgs) -> anyhow::Result<()> {
    positive("--v0", a.v0)?;
    positive("--xmax", a.xmax)?;
    let prob = WkbDemoProblem::new(a.v0, a.energy);
    let ctx = prob.context()?;
    let mut w = a.out.writer()?;
    writeln!(w, "x,psi,regime")?;
    for x in linspace(0.0, a.xmax, a.samples) {
        let (psi, regime) = wkb::demo_with_context(&prob, &ctx, x)?;
        writeln!(w, "{},{},{}", sig17(x), sig17(psi), regime.label())?;
    }
    w.flush()?;
    Ok(())
}

fn parse_samples(s: &str) -> anyhow::Result<(usize, usize)> {
    let (a, b) = s.split_once(['x', 'X']).with_context(|| format!("--samples expects NxM, got {s:?}"))?;
    let (nx, ny): (usize, usize) = (a.trim().parse()?, b.trim().parse()?);
    if nx == 0 || ny == 0 {
        bail!("--samples needs positive counts, got {s:?}");
    }
    Ok((nx, ny))
}

fn green(a: &GreenArgs) -> anyhow::Result<()> {
    let th = theta_from_ratio(a.a_over_lambda)?;
    positive("--focal-length", a.focal_length)?;
    let (nx, ny) = parse_samples(&a.samples)?;
    let win: [f64; 4] = a.window.as_slice().try_into().map_err(|_| anyhow!("--window expects four values x0,x1,y0,y1, got {}", a.window.len()))?;
    let geometry = match a.geometry {
        GeometryArg::Slit => Geometry::Slit,
        GeometryArg::Strip => Geometry::Strip,
    };
    let focal = a.focal_length;
    let source = to_elliptic(a.source_x, a.source_y, focal)?;
    let mut pr = GreenProblem::new(geometry, a.bc.into(), 2.0 * PI * a.a_over_lambda / focal, focal, source);
    pr.n_terms = a.nterms;
    pr.validate()?;
    let cfg = a.eval.config()?;
    let t = load_table(th, a.nterms, &a.table)?;
    let solver = GreenSolver::new(pr, &t, cfg)?;
    let grid = solver.grid(&window_points(win, nx, ny)?)?;
    let mut w = a.out.writer()?;
    grid.write_csv(&mut w)?;
    w.flush()?;
    if let Some(msg) = grid.meta.truncation_warning() {
        eprintln!("warning: {msg}");
    }
    if grid.meta.skipped > 0 {
        eprintln!("warning: {} points coincide with the source and are NaN", grid.meta.skipped);
    }
    Ok(())
}

fn farfield(a: &FarArgs) -> anyhow::Result<()> {
    let th = theta_from_ratio(a.a_over_lambda)?;
    positive("--u0", a.u0)?;
    positive("--um", a.um)?;
    if a.samples == 0 {
        bail!("--samples must be positive");
    }
    let cfg = a.eval.config()?;
    let t = load_table(th, a.nterms, &a.table)?;
    let mut pr = GreenProblem::new(Geometry::Slit, a.bc.into(), PI * a.a_over_lambda, 2.0, EllipticPoint::new(a.u0, -PI / 2.0)?);
    pr.n_terms = a.nterms;
    let alphas: Vec<f64> = (1..=a.samples).map(|i| PI * i as f64 / (a.samples + 1) as f64).collect();
    let ff = far_field(pr, &t, cfg, a.um, a.v0, &alphas)?;
    let mut w = a.out.writer()?;
    writeln!(w, "alpha,I_norm,I_fraunhofer")?;
    for i in 0..alphas.len() {
        writeln!(w, "{},{},{}", sig17(ff.alpha[i]), sig17(ff.intensity[i]), sig17(ff.fraunhofer[i]))?;
    }
    w.flush()?;
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match &cli.cmd {
        Command::Tables(a) => tables(a)?,
        Command::Angular(a) => angular(a)?,
        Command::Radial(a) => radial(a)?,
        Command::Residual(a) => residual(a)?,
        Command::Wkbdemo(a) => wkbdemo(a)?,
        Command::Green(a) => green(a)?,
        Command::Farfield(a) => farfield(a)?,
        Command::Validate(a) => {
            let t = load_table((PI).powi(2), a.nterms.max(60), &a.table)?;
            return Ok(if validate::run(&t, a.nterms, a.pairs)? { ExitCode::SUCCESS } else { ExitCode::from(2) });
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(c) => c,
        Err(e) => {
            if e.downcast_ref::<io::Error>().map(|io| io.kind() == io::ErrorKind::BrokenPipe).unwrap_or(false) {
                return ExitCode::SUCCESS;
            }
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
