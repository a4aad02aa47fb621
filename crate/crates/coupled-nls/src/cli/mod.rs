//! Command-line front end: `scalar`, `constants`, `beta`, `solve`, `sweep`
//! and `verify`. Results go to stdout or files, logs to stderr.
//!
//! Exit codes: 0 success, 1 verification failure, 2 invalid input,
//! 3 non-convergence.

pub mod config;
pub mod output;
pub mod verify;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use log::{info, warn};
use rayon::prelude::*;

use crate::beta::{beta_bounds, beta_estimate, decay_in_radius, sobolev_constant, BetaProblem};
use crate::energy::{coercivity_constants, grad_lower_bound};
use crate::error::Error;
use crate::scalar::{gn_constant, lambda_scalar, mass_threshold_b, reference_ground_state, scalar_energy_m, ScalarParams};
use crate::solver::minimize_ground;

pub use config::RunConfig;
use output::{write_profiles, write_results, write_table, ResultRow};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NONCONVERGED: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "coupled-nls", version, about = "Normalized ground states of coupled NLS systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, Default, ValueEnum)]
pub enum Format {
    #[default]
    Table,
    Csv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum VerifyLevel {
    Fast,
    Full,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Scalar ground state U_p, and λ, m for a given μ and mass.
    Scalar {
        #[arg(long, default_value_t = 3)]
        dim: usize,
        #[arg(long)]
        p: f64,
        #[arg(long, requires = "a")]
        mu: Option<f64>,
        #[arg(long, requires = "mu")]
        a: Option<f64>,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Thresholds and constants for the parameters of a config file.
    Constants {
        config: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Coupling threshold β_{p,μ,a,N,r}.
    Beta {
        #[arg(long, default_value_t = 3)]
        dim: usize,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 1.0)]
        mu: f64,
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        #[arg(long)]
        r: f64,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Solve one configuration; writes the result row and the profiles.
    Solve {
        config: PathBuf,
        /// Result CSV (overrides `output` in the config; stdout if neither).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Profile CSV (default: next to the result file).
        #[arg(long)]
        profiles: Option<PathBuf>,
    },
    /// Solve a family of configurations varying one of a, b, beta.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        vary: String,
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        values: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the bundled verification suites.
    Verify {
        #[arg(value_enum, default_value_t = VerifyLevel::Fast)]
        level: VerifyLevel,
    },
}

fn input_error(e: impl std::fmt::Display) -> i32 {
    eprintln!("error: {e}");
    EXIT_INPUT
}

fn exit_for(e: &Error) -> i32 {
    match e {
        Error::Solver(_) => EXIT_NONCONVERGED,
        _ => EXIT_INPUT,
    }
}

/// Parse `args` (program name first) and run; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Scalar { dim, p, mu, a, format } => cmd_scalar(out, dim, p, mu.zip(a), format),
        Command::Constants { config, format } => cmd_constants(out, &config, format),
        Command::Beta { dim, p, mu, a, r, format } => cmd_beta(out, dim, p, mu, a, r, format),
        Command::Solve { config, out: path, profiles } => cmd_solve(out, &config, path, profiles),
        Command::Sweep { config, vary, values, out: path } => cmd_sweep(out, &config, &vary, &values, path),
        Command::Verify { level } => cmd_verify(
            out,
            match level {
                VerifyLevel::Fast => verify::Level::Fast,
                VerifyLevel::Full => verify::Level::Full,
            },
        ),
    };
    match outcome {
        Ok(code) => code,
        Err(CmdError::Lib(e)) => {
            eprintln!("error: {e}");
            exit_for(&e)
        }
        Err(CmdError::Io(e)) => input_error(e),
    }
}

#[derive(Debug)]
enum CmdError {
    Lib(Error),
    Io(io::Error),
}

impl From<Error> for CmdError {
    fn from(e: Error) -> Self {
        CmdError::Lib(e)
    }
}

impl From<io::Error> for CmdError {
    fn from(e: io::Error) -> Self {
        CmdError::Io(e)
    }
}

type CmdResult = std::result::Result<i32, CmdError>;

fn cmd_scalar(out: &mut dyn Write, dim: usize, p: f64, mu_a: Option<(f64, f64)>, format: Format) -> CmdResult {
    let u = reference_ground_state(dim, p)?;
    let mut rows = vec![
        ("mass_sq".to_string(), u.mass_sq),
        ("grad_sq".to_string(), u.grad_sq),
        ("pnorm_pow".to_string(), u.pnorm_pow),
        ("shoot_height".to_string(), u.shoot_height),
    ];
    if let Some((mu, a)) = mu_a {
        let sp = ScalarParams::new(dim, p, mu, a)?;
        rows.push(("lambda".into(), lambda_scalar(&sp, u.mass_sq)?));
        rows.push(("m".into(), scalar_energy_m(&sp, u.mass_sq)?));
    }
    write_table(out, &rows, matches!(format, Format::Csv))?;
    Ok(EXIT_OK)
}

fn cmd_constants(out: &mut dyn Write, path: &Path, format: Format) -> CmdResult {
    let cfg = RunConfig::load(path)?;
    let p = cfg.params;
    let up = reference_ground_state(p.dim, p.p)?;
    let uq = reference_ground_state(p.dim, p.q)?;
    let ur = reference_ground_state(p.dim, p.r())?;
    let (tau, c0) = coercivity_constants(&p)?;
    let (gp, gq, gr) = (gn_constant(p.dim, p.p, &up)?, gn_constant(p.dim, p.q, &uq)?, gn_constant(p.dim, p.r(), &ur)?);
    let sp = ScalarParams::new(p.dim, p.p, p.mu1, p.a)?;
    let sq = ScalarParams::new(p.dim, p.q, p.mu2, p.b)?;
    let mut rows = vec![
        ("b_star".to_string(), mass_threshold_b(p.dim, p.p, p.q, p.mu1, p.mu2, p.a, up.mass_sq, uq.mass_sq)?),
        ("lambda_p".into(), lambda_scalar(&sp, up.mass_sq)?),
        ("lambda_q".into(), lambda_scalar(&sq, uq.mass_sq)?),
        ("m_p".into(), scalar_energy_m(&sp, up.mass_sq)?),
        ("m_q".into(), scalar_energy_m(&sq, uq.mass_sq)?),
        ("tau".into(), tau),
        ("C0".into(), c0),
        ("gn_p".into(), gp),
        ("gn_q".into(), gq),
        ("gn_r".into(), gr),
        ("delta_lower".into(), grad_lower_bound(&p, gp, gq, gr)?),
    ];
    if p.dim >= 3 {
        rows.push(("S_N".into(), sobolev_constant(p.dim)?));
        let b1 = beta_estimate(&BetaProblem::new(p.dim, p.p, p.mu1, p.a, p.r1)?)?;
        let b2 = beta_estimate(&BetaProblem::new(p.dim, p.q, p.mu2, p.b, p.r2)?)?;
        rows.push(("beta_p_r1".into(), b1.value));
        rows.push(("beta_q_r2".into(), b2.value));
    } else {
        rows.push(("beta_p_r1".into(), 0.0));
        rows.push(("beta_q_r2".into(), 0.0));
    }
    write_table(out, &rows, matches!(format, Format::Csv))?;
    Ok(EXIT_OK)
}

fn cmd_beta(out: &mut dyn Write, dim: usize, p: f64, mu: f64, a: f64, r: f64, format: Format) -> CmdResult {
    let bp = BetaProblem::new(dim, p, mu, a, r)?;
    let est = beta_estimate(&bp)?;
    let mut rows = vec![("beta".to_string(), est.value)];
    if dim >= 3 {
        rows.push(("kappa".into(), est.kappa));
        rows.push(("error".into(), est.error));
        rows.push(("truncation".into(), est.truncation));
        let u = reference_ground_state(dim, p)?;
        match beta_bounds(&bp, sobolev_constant(dim)?, &u) {
            Ok((lo, hi)) => {
                rows.push(("lower".into(), lo));
                rows.push(("upper".into(), hi));
            }
            Err(e) => warn!("no bounds: {e}"),
        }
    } else {
        if let Some(note) = &est.note {
            info!("{note}");
        }
        for (radius, b) in decay_in_radius(&bp, &[20.0, 40.0, 80.0], 0.01)? {
            rows.push((format!("beta_R{radius}"), b));
        }
    }
    write_table(out, &rows, matches!(format, Format::Csv))?;
    Ok(EXIT_OK)
}

fn create(path: &Path) -> io::Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new)
}

fn profiles_path(results: &Path) -> PathBuf {
    let stem = results.file_stem().and_then(|s| s.to_str()).unwrap_or("result");
    results.with_file_name(format!("{stem}_profiles.csv"))
}

fn cmd_solve(out: &mut dyn Write, path: &Path, target: Option<PathBuf>, profiles: Option<PathBuf>) -> CmdResult {
    let cfg = RunConfig::load(path)?;
    let target = target.or_else(|| cfg.output.as_ref().map(PathBuf::from));
    info!("{} {}: {:?}", cfg.mode, path.display(), cfg.params);
    let sc = cfg.solve_config();
    let (row, result) = match minimize_ground(&sc) {
        Ok(r) => (ResultRow::from_result(&cfg.params, &r), Some(r)),
        Err(e @ Error::Solver(_)) => {
            warn!("{e}");
            (ResultRow::failed(&cfg.params), None)
        }
        Err(e) => return Err(e.into()),
    };
    match &target {
        Some(t) => {
            let mut f = create(t)?;
            write_results(&mut f, std::slice::from_ref(&row))?;
            f.flush()?;
        }
        None => write_results(out, std::slice::from_ref(&row))?,
    }
    let ppath = profiles.or_else(|| target.as_deref().map(profiles_path));
    if let (Some(p), Some(r)) = (ppath, &result) {
        let mut f = create(&p)?;
        write_profiles(&mut f, r)?;
        f.flush()?;
    }
    if row.converged {
        Ok(EXIT_OK)
    } else {
        warn!("solve did not converge (residual {:e})", row.residual);
        Ok(EXIT_NONCONVERGED)
    }
}

fn cmd_sweep(out: &mut dyn Write, path: &Path, key: &str, values: &[f64], target: Option<PathBuf>) -> CmdResult {
    let base = RunConfig::load(path)?;
    let cfgs = values
        .iter()
        .map(|&v| base.varied(key, v))
        .collect::<crate::Result<Vec<_>>>()?;
    info!("sweep over {key}: {} runs", cfgs.len());
    let rows: Vec<ResultRow> = cfgs
        .par_iter()
        .map(|c| match minimize_ground(&c.solve_config()) {
            Ok(r) => ResultRow::from_result(&c.params, &r),
            Err(e) => {
                warn!("a = {}, b = {}, beta = {}: {e}", c.params.a, c.params.b, c.params.beta);
                ResultRow::failed(&c.params)
            }
        })
        .collect();
    match &target {
        Some(t) => {
            let mut f = create(t)?;
            write_results(&mut f, &rows)?;
            f.flush()?;
        }
        None => write_results(out, &rows)?,
    }
    let bad = rows.iter().filter(|r| !r.converged).count();
    if bad > 0 {
        warn!("{bad} of {} runs did not converge", rows.len());
    }
    Ok(EXIT_OK)
}

fn cmd_verify(out: &mut dyn Write, level: verify::Level) -> CmdResult {
    let mut failed = 0;
    for suite in verify::suites(level) {
        let s = suite();
        writeln!(
            out,
            "{} [{}] {} ({:.1} s)",
            if s.passed() { "PASS" } else { "FAIL" },
            s.id,
            s.name,
            s.seconds
        )?;
        for c in &s.checks {
            writeln!(out, "    {} {}: {}", if c.passed { "ok  " } else { "FAIL" }, c.name, c.detail)?;
        }
        if !s.passed() {
            failed += 1;
        }
    }
    if failed > 0 {
        writeln!(out, "{failed} suite(s) failed")?;
        Ok(EXIT_VERIFY)
    } else {
        Ok(EXIT_OK)
    }
}
