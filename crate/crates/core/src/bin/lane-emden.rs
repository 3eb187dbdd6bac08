use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use lane_emden_nodal::asymptotics::{
    extrapolate, negative_limit, positive_limit, profile_distance, rescale_negative,
    rescale_positive, sweep, RescaledProfile,
};
use lane_emden_nodal::config::{Format, RunConfig};
use lane_emden_nodal::disk_green::{antipodal_root, reflection_defects, solve_antipodal, stationarity_residual};
use lane_emden_nodal::limit_profiles::AsymptoticConstants;
use lane_emden_nodal::nodal_solver::{solve_ground, solve_nodal, RadialProfile};
use lane_emden_nodal::report::{
    evaluate, render_constants, render_report, ConstantsRecord, GroundRecord, NodalRecord, Status,
    SweepReport,
};
use lane_emden_nodal::Error;

/// Least-energy nodal radial solutions of the Lane-Emden problem on the unit
/// disk, their large-exponent asymptotics, and the limit Green system.
#[derive(Parser)]
#[command(name = "lane-emden", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand)]
enum Command {
    /// Print the limit constants and their identity residuals.
    Constants,
    /// Solve for the nodal solution at one exponent.
    Solve,
    /// Solve for the positive ground state at one exponent.
    Ground,
    /// Sweep a grid of exponents, extrapolate, and check against the limits.
    Sweep,
    /// Rescaled profiles z^- and z^+ at one exponent against their limits.
    Profiles,
    /// Solve the antipodal stationarity system.
    Antipodal,
    /// Full report: constants, antipodal system and sweep verdicts.
    Report {
        /// Re-evaluate a saved sweep report instead of running a sweep.
        #[arg(long)]
        input: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Opts {
    /// Exponent p > 1.
    #[arg(long, global = true)]
    p: Option<f64>,
    /// Comma-separated, strictly increasing exponents.
    #[arg(long, global = true, value_delimiter = ',')]
    grid: Option<Vec<f64>>,
    #[arg(long, global = true)]
    rtol: Option<f64>,
    #[arg(long, global = true)]
    atol: Option<f64>,
    #[arg(long = "event-tol", global = true)]
    event_tol: Option<f64>,
    /// Relative tolerance of the energy quadratures.
    #[arg(long = "quad-tol", global = true)]
    quad_tol: Option<f64>,
    /// Smallest exponent used by the extrapolation fit.
    #[arg(long = "min-p", global = true)]
    min_p: Option<f64>,
    /// Initial guess "a,b" for the antipodal system.
    #[arg(long, global = true)]
    guess: Option<String>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Flat key = value file; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Solver(String),
    Acceptance,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidInput(m) => Failure::Usage(m),
            other => Failure::Solver(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Solver(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Solver(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn build_config(opts: &Opts) -> Result<RunConfig, Failure> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &opts.config {
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        cfg.apply_file(&text)?;
    }
    let mut set = |k: &str, v: Option<String>| -> Result<(), Failure> {
        if let Some(v) = v {
            cfg.set(k, &v)?;
        }
        Ok(())
    };
    let s = |x: Option<f64>| x.map(|v| v.to_string());
    set("p", s(opts.p))?;
    set(
        "grid",
        opts.grid
            .as_ref()
            .map(|g| g.iter().map(f64::to_string).collect::<Vec<_>>().join(",")),
    )?;
    set("rtol", s(opts.rtol))?;
    set("atol", s(opts.atol))?;
    set("event-tol", s(opts.event_tol))?;
    set("quad-tol", s(opts.quad_tol))?;
    set("min-p", s(opts.min_p))?;
    set("guess", opts.guess.clone())?;
    if let Some(out) = &opts.out {
        cfg.out = Some(out.clone());
    }
    if let Some(f) = opts.format {
        cfg.format = f;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn require_p(cfg: &RunConfig) -> Result<f64, Failure> {
    cfg.p.ok_or_else(|| Failure::Usage("--p is required".into()))
}

fn out_dir(cfg: &RunConfig) -> Result<Option<&Path>, Failure> {
    match &cfg.out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            Ok(Some(dir.as_path()))
        }
        None => Ok(None),
    }
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Outcome {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

fn print_json<T: serde::Serialize>(value: &T) -> Outcome {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn write_profile_csv<P: RadialProfile>(path: &Path, profile: &P, center: f64) -> Outcome {
    let mut f = std::io::BufWriter::new(fs::File::create(path)?);
    writeln!(f, "r,u,du")?;
    writeln!(f, "0,{center:.17e},0")?;
    for s in profile.ln_breakpoints() {
        let (u, w) = profile.eval_log(s);
        let r = s.exp();
        writeln!(f, "{r:.17e},{u:.17e},{:.17e}", w / r)?;
    }
    Ok(())
}

fn write_rescaled_csv<F: Fn(f64) -> f64>(path: &Path, prof: &RescaledProfile, limit: F) -> Outcome {
    let mut f = std::io::BufWriter::new(fs::File::create(path)?);
    writeln!(f, "x,z,limit")?;
    for (x, z) in prof.sample_points.iter().zip(&prof.values) {
        writeln!(f, "{x:.10e},{z:.17e},{:.17e}", limit(*x))?;
    }
    Ok(())
}

fn cmd_constants(cfg: &RunConfig) -> Outcome {
    let rec = ConstantsRecord::new(AsymptoticConstants::compute()?);
    match cfg.format {
        Format::Json => print_json(&rec)?,
        Format::Csv => print!("{}", render_constants(&rec)),
    }
    if let Some(dir) = out_dir(cfg)? {
        write_json(&dir.join("constants.json"), &rec)?;
    }
    if rec.residuals.iter().any(|r| !(r.residual < 1e-10)) {
        return Err(Failure::Acceptance);
    }
    Ok(())
}

fn cmd_solve(cfg: &RunConfig) -> Outcome {
    let p = require_p(cfg)?;
    let sol = solve_nodal(p, &cfg.sweep.solver)?;
    let rec = NodalRecord::from(&sol);
    match cfg.format {
        Format::Json => print_json(&rec)?,
        Format::Csv => {
            println!("p                   {}", rec.p);
            println!("nodal_radius        {:.12e}", rec.nodal_radius);
            println!("peak_radius         {:.12e}", rec.peak_radius);
            println!("norm_minus          {:.12}", rec.norm_minus);
            println!("norm_plus           {:.12}", rec.norm_plus);
            println!("energy              {:.12}", rec.energy);
            println!("scaled_nodal_radius {:.12}", rec.scaled_nodal_radius);
            println!("peak_ratio          {:.12}", rec.peak_ratio);
            println!("nehari_residual     {:.3e}", rec.nehari_residual);
            println!("pohozaev_residual   {:.3e}", rec.pohozaev_residual);
        }
    }
    if let Some(dir) = out_dir(cfg)? {
        write_json(&dir.join(format!("nodal_p{p}.json")), &rec)?;
        if cfg.format == Format::Csv {
            write_profile_csv(&dir.join(format!("nodal_p{p}.csv")), &sol.profile, sol.center_value)?;
        }
    }
    Ok(())
}

fn cmd_ground(cfg: &RunConfig) -> Outcome {
    let p = require_p(cfg)?;
    let g = solve_ground(p, &cfg.sweep.solver)?;
    let rec = GroundRecord::from(&g);
    match cfg.format {
        Format::Json => print_json(&rec)?,
        Format::Csv => {
            println!("p               {}", rec.p);
            println!("sup_norm        {:.12}", rec.sup_norm);
            println!("energy          {:.12}", rec.energy);
            println!("nehari_residual {:.3e}", rec.nehari_residual);
        }
    }
    if let Some(dir) = out_dir(cfg)? {
        write_json(&dir.join(format!("ground_p{p}.json")), &rec)?;
        if cfg.format == Format::Csv {
            write_profile_csv(&dir.join(format!("ground_p{p}.csv")), &g.profile, g.sup_norm)?;
        }
    }
    Ok(())
}

fn run_sweep(cfg: &RunConfig, consts: &AsymptoticConstants) -> Result<SweepReport, Failure> {
    let table = sweep(&cfg.grid, &cfg.sweep)?;
    let fit = extrapolate(&table, cfg.model, cfg.min_p);
    Ok(SweepReport::new(table, fit, consts))
}

fn emit_sweep(cfg: &RunConfig, report: &SweepReport) -> Outcome {
    match cfg.format {
        Format::Json => print_json(report)?,
        Format::Csv => print!("{}", render_report(report)),
    }
    if let Some(dir) = out_dir(cfg)? {
        let mut csv = Vec::new();
        report.table.write_csv(&mut csv)?;
        fs::write(dir.join("table.csv"), csv)?;
        write_json(&dir.join("report.json"), report)?;
        report.table.write_gnuplot(&dir.join("plots"))?;
    }
    Ok(())
}

fn verdict_outcome(status: Status) -> Outcome {
    match status {
        Status::Pass => Ok(()),
        _ => Err(Failure::Acceptance),
    }
}

fn cmd_sweep(cfg: &RunConfig) -> Outcome {
    let consts = AsymptoticConstants::compute()?;
    let report = run_sweep(cfg, &consts)?;
    emit_sweep(cfg, &report)?;
    verdict_outcome(report.overall())
}

fn cmd_profiles(cfg: &RunConfig) -> Outcome {
    let p = require_p(cfg)?;
    let consts = AsymptoticConstants::compute()?;
    let sol = solve_nodal(p, &cfg.sweep.solver)?;
    let step = cfg.sweep.sample_step;
    let w = cfg.sweep.negative_window;
    let neg = rescale_negative(&sol, w, (w / step).round() as usize + 1)?;
    let win = cfg.sweep.positive_window(&consts);
    let pos = rescale_positive(&sol, win, ((win.1 - win.0) / step).round() as usize + 1)?;
    let zl = positive_limit(&consts);
    let (ng, nd) = profile_distance(&neg, negative_limit, (0.0, w))?;
    let (pg, pd) = profile_distance(&pos, &zl, win)?;
    println!("p = {p}, l_p = {:.8} (l = {:.8})", sol.peak_ratio(), consts.l);
    println!("z^- vs -U on [0, {w}]: sup gap {ng:.6e}, slope gap {nd:.6e}");
    println!(
        "z^+ vs Z_l(. + l) on [{:.4}, {}]: sup gap {pg:.6e}, slope gap {pd:.6e}",
        win.0, win.1
    );
    if let Some(dir) = out_dir(cfg)? {
        write_rescaled_csv(&dir.join(format!("z_minus_p{p}.csv")), &neg, negative_limit)?;
        write_rescaled_csv(&dir.join(format!("z_plus_p{p}.csv")), &pos, &zl)?;
    }
    Ok(())
}

#[derive(serde::Serialize)]
struct AntipodalRecord {
    schema: &'static str,
    a: f64,
    b: f64,
    closed_form: f64,
    residual: (f64, f64),
    even_defect: f64,
    odd_defect: f64,
}

fn antipodal(cfg: &RunConfig) -> Result<AntipodalRecord, Failure> {
    let (a, b) = solve_antipodal(cfg.antipodal_guess, cfg.root_tol)?;
    let (even_defect, odd_defect) = reflection_defects(a, b)?;
    Ok(AntipodalRecord {
        schema: "antipodal-v1",
        a,
        b,
        closed_form: antipodal_root(),
        residual: stationarity_residual(a, b),
        even_defect,
        odd_defect,
    })
}

fn render_antipodal(r: &AntipodalRecord) -> String {
    format!(
        "a = {:.15}\nb = {:.15}\nsqrt(sqrt(5) - 2) = {:.15}\nresidual = ({:.3e}, {:.3e})\nreflection defects: even {:.3e}, odd {:.3e}\n",
        r.a, r.b, r.closed_form, r.residual.0, r.residual.1, r.even_defect, r.odd_defect
    )
}

fn cmd_antipodal(cfg: &RunConfig) -> Outcome {
    let rec = antipodal(cfg)?;
    match cfg.format {
        Format::Json => print_json(&rec)?,
        Format::Csv => print!("{}", render_antipodal(&rec)),
    }
    if let Some(dir) = out_dir(cfg)? {
        write_json(&dir.join("antipodal.json"), &rec)?;
    }
    Ok(())
}

fn cmd_report(cfg: &RunConfig, input: Option<&Path>) -> Outcome {
    let consts = AsymptoticConstants::compute()?;
    let report = match input {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            let mut saved: SweepReport = serde_json::from_str(&text)?;
            saved.verdicts = evaluate(&saved.table, saved.extrapolation.as_ref(), &consts);
            saved
        }
        None => run_sweep(cfg, &consts)?,
    };
    let constants = ConstantsRecord::new(consts);
    let anti = antipodal(cfg)?;
    if cfg.format == Format::Json {
        print_json(&serde_json::json!({
            "schema": "report-v1",
            "constants": constants,
            "antipodal": anti,
            "sweep": report,
        }))?;
    } else {
        println!("== constants\n{}", render_constants(&constants));
        println!("== antipodal system\n{}", render_antipodal(&anti));
        println!("== sweep\n{}", render_report(&report));
    }
    if let Some(dir) = out_dir(cfg)? {
        write_json(&dir.join("report.json"), &report)?;
    }
    let constants_ok = constants.residuals.iter().all(|r| r.residual < 1e-10);
    let anti_ok = anti.residual.0.abs() < 1e-12
        && anti.residual.1.abs() < 1e-12
        && anti.even_defect < 1e-10
        && anti.odd_defect < 1e-10;
    if !(constants_ok && anti_ok) {
        return Err(Failure::Acceptance);
    }
    verdict_outcome(report.overall())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let result = build_config(&cli.opts).and_then(|cfg| match &cli.command {
        Command::Constants => cmd_constants(&cfg),
        Command::Solve => cmd_solve(&cfg),
        Command::Ground => cmd_ground(&cfg),
        Command::Sweep => cmd_sweep(&cfg),
        Command::Profiles => cmd_profiles(&cfg),
        Command::Antipodal => cmd_antipodal(&cfg),
        Command::Report { input } => cmd_report(&cfg, input.as_deref()),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Solver(m)) => {
            eprintln!("solver failure: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Acceptance) => {
            eprintln!("acceptance check failed");
            ExitCode::from(3)
        }
    }
}
