//! Command-line front end.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid arguments, 3 every
//! equilibrium candidate failed to converge.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::conditions::{evaluate, require_density};
use crate::error::Error;
use crate::geometry::{SegmentShape, Side};
use crate::solver::{find_all_equilibria, no_solution_region, Equilibrium, SearchOptions};
use crate::stability::{classify, degenerate_probe, potential_nonarchimedean, StabilityKind};
use crate::sweep::{csv_string, export_curve, format_sig12, sweep_branches, ExportFormat};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NO_CONVERGENCE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "paraboloid-float", version, about = "Floating equilibria of a paraboloid segment")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Find and classify all equilibria for a density.
    Solve(SolveArgs),
    /// Sample the branches of E = 0 over the waterline abscissa.
    Sweep(SweepArgs),
    /// Report the abscissae without any non-archimedean equilibrium.
    Region(RegionArgs),
    /// Evaluate conditions and the Hessian at a given (X, b).
    #[command(allow_negative_numbers = true)]
    Classify(ClassifyArgs),
}

#[derive(Debug, Clone, Copy, Args)]
#[group(required = true, multiple = false)]
pub struct ShapeArgs {
    /// Axis length a.
    #[arg(long)]
    pub axis: Option<f64>,
    /// Base angle φ in degrees; a = tan²(φ)/4.
    #[arg(long = "base-angle")]
    pub base_angle: Option<f64>,
}

impl ShapeArgs {
    fn shape(&self) -> Result<SegmentShape, Error> {
        match (self.axis, self.base_angle) {
            (Some(a), _) => SegmentShape::new(a),
            (None, Some(phi)) => SegmentShape::from_base_angle_deg(phi),
            (None, None) => unreachable!("clap enforces one shape argument"),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Write data here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct RefineArgs {
    /// Re-sample steep branch cells at step/100 (default).
    #[arg(long, overrides_with = "no_refine")]
    pub refine: bool,
    /// Use the plain grid only.
    #[arg(long = "no-refine", overrides_with = "refine")]
    pub no_refine: bool,
}

impl RefineArgs {
    fn enabled(&self) -> bool {
        !self.no_refine
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub shape: ShapeArgs,
    /// Relative density σ in (0, 1).
    #[arg(long)]
    pub density: f64,
    /// Spacing of the X grid.
    #[arg(long, default_value_t = 0.01)]
    pub step: f64,
    #[command(flatten)]
    pub refine: RefineArgs,
    /// Residual bound for |E| and |F|/V.
    #[arg(long, default_value_t = 1e-8)]
    pub tolerance: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub shape: ShapeArgs,
    /// Spacing of the X grid.
    #[arg(long, default_value_t = 0.01)]
    pub step: f64,
    #[command(flatten)]
    pub refine: RefineArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct RegionArgs {
    #[command(flatten)]
    pub shape: ShapeArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    Left,
    Right,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub shape: ShapeArgs,
    /// Waterline abscissa.
    #[arg(long = "X")]
    pub x: f64,
    /// Slope of the waterplane, negative.
    #[arg(long)]
    pub b: f64,
    /// Relative density σ in (0, 1).
    #[arg(long)]
    pub density: f64,
    /// Dry side of the waterplane; the right hand uses density 1 − σ.
    #[arg(long, value_enum, default_value_t = SideArg::Left)]
    pub side: SideArg,
    #[command(flatten)]
    pub out: OutputArgs,
}

enum Failure {
    Usage(String),
    Io(io::Error),
    NoConvergence(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(text.as_bytes()) } else { stdout.write_all(text.as_bytes()) };
            return code;
        }
    };
    let outcome = match &cli.command {
        Command::Solve(a) => cmd_solve(a, stdout, stderr),
        Command::Sweep(a) => cmd_sweep(a, stdout, stderr),
        Command::Region(a) => cmd_region(a, stdout),
        Command::Classify(a) => cmd_classify(a, stdout),
    };
    match outcome {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Io(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_IO
        }
        Err(Failure::NoConvergence(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_NO_CONVERGENCE
        }
    }
}

fn emit(out: &OutputArgs, data: &[u8], stdout: &mut dyn Write) -> Result<(), Failure> {
    match &out.output {
        Some(path) => File::create(path)?.write_all(data)?,
        None => stdout.write_all(data)?,
    }
    Ok(())
}

fn json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut v = serde_json::to_vec_pretty(value).expect("serializable output");
    v.push(b'\n');
    v
}

fn fixed(v: Option<f64>) -> String {
    match v {
        Some(v) if v.is_finite() => format!("{v:.8}"),
        Some(v) => v.to_string(),
        None => "-".into(),
    }
}

fn sig(v: Option<f64>) -> String {
    v.map(format_sig12).unwrap_or_default()
}

fn side_label(e: &Equilibrium) -> &'static str {
    match e.side {
        crate::solver::Position::LeftHand => "left-hand",
        crate::solver::Position::RightHand => "right-hand",
        crate::solver::Position::Horizontal => "horizontal",
    }
}

fn case_label(e: &Equilibrium) -> &'static str {
    match e.case_kind {
        crate::solver::CaseKind::Archimedean => "archimedean",
        crate::solver::CaseKind::NonArchimedean => "non-archimedean",
        crate::solver::CaseKind::Horizontal => "horizontal",
    }
}

fn check_density(sigma: f64) -> Result<(), Failure> {
    require_density(sigma).map_err(|_| Failure::Usage(format!("density must lie in (0,1), got {sigma}")))
}

fn cmd_solve(args: &SolveArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), Failure> {
    check_density(args.density)?;
    let shape = args.shape.shape()?;
    if !(args.tolerance.is_finite() && args.tolerance > 0.0) {
        return Err(Failure::Usage(format!("tolerance must be positive, got {}", args.tolerance)));
    }
    let opts = SearchOptions {
        sweep_step: args.step,
        refine_steep: args.refine.enabled(),
        residual_tol: args.tolerance,
        ..SearchOptions::default()
    };
    let result = find_all_equilibria(&shape, args.density, &opts)?;
    let d = &result.diagnostics;
    for f in &d.failures {
        writeln!(stderr, "warning: {f}")?;
    }
    if d.candidates > 0 && d.failures.len() >= d.candidates {
        return Err(Failure::NoConvergence(format!(
            "all {} non-archimedean candidates failed to converge",
            d.candidates
        )));
    }

    let data = match args.out.format {
        Format::Json => json_bytes(&json!({
            "input": {
                "a": shape.axis(),
                "base_angle_deg": args.shape.base_angle,
                "sigma": args.density,
                "step": opts.sweep_step,
                "refine": opts.refine_steep,
                "tolerance": opts.residual_tol,
            },
            "equilibria": result.equilibria,
            "diagnostics": result.diagnostics,
        })),
        Format::Csv => {
            let mut s = String::from("side,case,X,b,c,sigma,tilt_deg,stability,lambda_min,lambda_max,res_e,res_f\n");
            for e in &result.equilibria {
                let (l1, l2) = e.stability.eigenvalues;
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{},{},{},{},{},{}",
                    side_label(e),
                    case_label(e),
                    sig(e.x),
                    sig(e.b),
                    sig(e.c),
                    format_sig12(e.sigma),
                    format_sig12(e.tilt_deg),
                    e.stability.label(),
                    format_sig12(l1),
                    format_sig12(l2),
                    format_sig12(e.residuals.e),
                    format_sig12(e.residuals.f_rel)
                );
            }
            s.into_bytes()
        }
        Format::Table => {
            let mut s = format!("a = {:.8}, sigma = {:.8}\n", shape.axis(), args.density);
            if result.equilibria.is_empty() {
                s.push_str("no equilibria found\n");
            } else {
                let _ = writeln!(
                    s,
                    "{:<11} {:<16} {:>12} {:>14} {:>12} {:>10} {:>13} {:<24} {:>12} {:>12} {:>15} {:>15}",
                    "side", "case", "X", "b", "c", "sigma", "tilt_deg", "stability", "lambda_min", "lambda_max",
                    "|E|", "|F|/V"
                );
                for e in &result.equilibria {
                    let (l1, l2) = e.stability.eigenvalues;
                    let b = if e.b.is_none() { "-inf".into() } else { fixed(e.b) };
                    let _ = writeln!(
                        s,
                        "{:<11} {:<16} {:>12} {:>14} {:>12} {:>10.8} {:>13.8} {:<24} {:>12.8} {:>12.8} {:>15.8e} {:>15.8e}",
                        side_label(e),
                        case_label(e),
                        fixed(e.x),
                        b,
                        fixed(e.c),
                        e.sigma,
                        e.tilt_deg,
                        e.stability.label(),
                        l1,
                        l2,
                        e.residuals.e,
                        e.residuals.f_rel
                    );
                }
            }
            let non_arch = result
                .equilibria
                .iter()
                .filter(|e| e.case_kind == crate::solver::CaseKind::NonArchimedean)
                .count();
            let _ = writeln!(s, "{} equilibria ({non_arch} non-archimedean)", result.equilibria.len());
            s.into_bytes()
        }
    };
    emit(&args.out, &data, stdout)
}

fn cmd_sweep(args: &SweepArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), Failure> {
    let shape = args.shape.shape()?;
    let curve = sweep_branches(&shape, args.step, args.refine.enabled())?;
    writeln!(
        stderr,
        "{} points on {} branches, {} gaps",
        curve.points.len(),
        curve.branch_count(),
        curve.gaps.len()
    )?;
    let data = match args.out.format {
        Format::Csv => csv_string(&curve).into_bytes(),
        Format::Json => {
            let mut buf = Vec::new();
            export_curve(&curve, ExportFormat::Json, &mut buf)?;
            buf
        }
        Format::Table => {
            let mut s = format!("{:>12} {:>16} {:>12} {:>6} {:<24} {}\n", "X", "b", "sigma", "branch", "stability", "case");
            for p in &curve.points {
                let _ = writeln!(
                    s,
                    "{:>12.8} {:>16.8} {:>12.8} {:>6} {:<24} {}",
                    p.x,
                    p.b,
                    p.sigma,
                    p.branch,
                    p.stability.label(),
                    p.case.letter()
                );
            }
            for (lo, hi) in &curve.gaps {
                let _ = writeln!(s, "gap: [{lo:.8}, {hi:.8}]");
            }
            s.into_bytes()
        }
    };
    emit(&args.out, &data, stdout)
}

fn cmd_region(args: &RegionArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let shape = args.shape.shape()?;
    let r = no_solution_region(&shape);
    let case = serde_json::to_value(r.case).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
    let data = match args.out.format {
        Format::Json => json_bytes(&json!({ "input": { "a": shape.axis() }, "region": r })),
        Format::Csv => format!(
            "a,a1,gamma,delta,X1,X2,case\n{},{},{},{},{},{},{}\n",
            format_sig12(shape.axis()),
            format_sig12(r.a1),
            format_sig12(r.gamma),
            format_sig12(r.delta),
            sig(r.x1),
            sig(r.x2),
            case
        )
        .into_bytes(),
        Format::Table => {
            let interval = match (r.case, r.interval) {
                (_, None) => "none".to_string(),
                (crate::solver::RegionCase::WholeLeftHalf, Some((lo, hi))) => format!("({lo:.8}, {hi:.8})"),
                (crate::solver::RegionCase::UpToCenter, Some((lo, hi))) => format!("[{lo:.8}, {hi:.8})"),
                (_, Some((lo, hi))) => format!("[{lo:.8}, {hi:.8}]"),
            };
            format!(
                "a        {:.8}\na1       {:.8}\ngamma    {:.8}\ndelta    {:.8}\nX1       {}\nX2       {}\ncase     {case}\nregion   {interval}\n",
                shape.axis(),
                r.a1,
                r.gamma,
                r.delta,
                fixed(r.x1),
                fixed(r.x2)
            )
            .into_bytes()
        }
    };
    emit(&args.out, &data, stdout)
}

fn cmd_classify(args: &ClassifyArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    check_density(args.density)?;
    let shape = args.shape.shape()?;
    let side = match args.side {
        SideArg::Left => Side::LeftHand,
        SideArg::Right => Side::RightHand,
    };
    let sigma_eff = side.effective_density(args.density);
    let cond = evaluate(&shape, args.x, args.b, sigma_eff)?;
    let pe = potential_nonarchimedean(&shape, args.x, args.b, sigma_eff)?;
    let mut verdict = classify(&pe.hessian);
    if verdict.kind == StabilityKind::Degenerate {
        verdict.degenerate = degenerate_probe(&shape, args.x, args.b, sigma_eff).ok();
    }
    let h = pe.hessian;
    let data = match args.out.format {
        Format::Json => json_bytes(&json!({
            "input": { "a": shape.axis(), "X": args.x, "b": args.b, "sigma": args.density, "side": side },
            "E": cond.e,
            "F": cond.f,
            "sigma_implied": cond.sigma_implied,
            "gradient": pe.grad,
            "hessian": h,
            "stability": verdict,
        })),
        Format::Csv => format!(
            "E,F,sigma_implied,grad_X,grad_b,h_XX,h_Xb,h_bb,lambda_min,lambda_max,stability\n{},{},{},{},{},{},{},{},{},{},{}\n",
            format_sig12(cond.e),
            format_sig12(cond.f),
            format_sig12(cond.sigma_implied),
            format_sig12(pe.grad[0]),
            format_sig12(pe.grad[1]),
            format_sig12(h[0][0]),
            format_sig12(h[0][1]),
            format_sig12(h[1][1]),
            format_sig12(verdict.eigenvalues.0),
            format_sig12(verdict.eigenvalues.1),
            verdict.label()
        )
        .into_bytes(),
        Format::Table => {
            let mut s = format!(
                "E              {:.8e}\nF              {:.8e}\nsigma_implied  {:.8}\ngradient       ({:.8e}, {:.8e})\nhessian        [[{:.8}, {:.8}], [{:.8}, {:.8}]]\neigenvalues    ({:.8}, {:.8})\nstability      {}\n",
                cond.e,
                cond.f,
                cond.sigma_implied,
                pe.grad[0],
                pe.grad[1],
                h[0][0],
                h[0][1],
                h[1][0],
                h[1][1],
                verdict.eigenvalues.0,
                verdict.eigenvalues.1,
                verdict.label()
            );
            if let Some(d) = verdict.degenerate {
                let _ = writeln!(
                    s,
                    "null_direction ({:.8}, {:.8})\ncubic          {:.8}",
                    d.null_direction.0, d.null_direction.1, d.cubic_coefficient
                );
            }
            s.into_bytes()
        }
    };
    emit(&args.out, &data, stdout)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let mut full = vec!["paraboloid-float"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn density_out_of_range() {
        let (code, _, err) = run_str(&["solve", "--axis", "1", "--density", "1.5"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("density must lie in (0,1)"));
    }

    #[test]
    fn shape_flags_are_exclusive() {
        let (code, _, _) = run_str(&["region", "--axis", "1", "--base-angle", "60"]);
        assert_eq!(code, EXIT_USAGE);
        let (code, _, _) = run_str(&["region"]);
        assert_eq!(code, EXIT_USAGE);
    }

    #[test]
    fn region_table() {
        let (code, out, _) = run_str(&["region", "--axis", "2.5"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("X1       -1.14"), "{out}");
        assert!(out.contains("case     bounded"));
    }

    #[test]
    fn classify_accepts_negative_values() {
        let (code, out, err) = run_str(&[
            "classify", "--axis", "3.17690918", "--X", "-1.03304236", "--b", "-1.12424322", "--density", "0.51",
        ]);
        assert_eq!(code, EXIT_OK, "{err}");
        assert!(out.contains("stability      stable"));
    }

    #[test]
    fn bad_output_path_is_io_error() {
        let (code, _, _) =
            run_str(&["region", "--axis", "2.5", "--output", "/nonexistent-dir/x/region.txt"]);
        assert_eq!(code, EXIT_IO);
    }
}
