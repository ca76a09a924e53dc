//! Drivers for Stieltjes integration, the substitution rule, transport
//! verification and the five-dimensional isomorphism example, plus the
//! `stieltjes` command line.

pub mod error;
pub mod example37;
pub mod scenario;
pub mod stieltjes;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use stieltjes_core::integrator::{integrate, Integral, IntegratorConfig};
use stieltjes_core::transport::{theorem35_check, verify_measure_preserving};
use stieltjes_core::Scalar;

pub use error::{CliError, Result};
use scenario::{MeasureChoice, Scenario};
use stieltjes::{ls_integrate, riemann_restriction, rs_integrate, substitution_check, TagRule};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NOT_CONVERGED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "stieltjes",
    version,
    about = "Refinement-limit integration on algebras"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Scenario file describing region, measure, transport and integrand.
    #[arg(long, global = true)]
    pub scenario: Option<PathBuf>,
    /// Stop refining once successive levels differ by less than this.
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
    /// Deepest refinement level to try.
    #[arg(long, global = true)]
    pub max_level: Option<u32>,
    /// Exponent for norms.
    #[arg(long, global = true)]
    pub p: Option<f64>,
    /// Use exact rational arithmetic.
    #[arg(long, global = true)]
    pub exact: bool,
    /// Write the convergence trace here.
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, Subcommand, PartialEq, Eq)]
pub enum Command {
    /// Integrate the scenario integrand over its region.
    Integrate,
    /// Lebesgue-Stieltjes integral against the scenario's phi.
    Ls,
    /// Riemann-Stieltjes limit against the scenario's phi.
    Rs,
    /// Both sides of the substitution rule for the scenario's forward map.
    Subst,
    /// Check the transport against the source and target measures on grid boxes.
    VerifyTransport,
    /// Both sides of the change-of-measure identity along the transport.
    Theorem35,
    /// The five-dimensional isomorphism example.
    Example37,
    /// Compare the Riemann integral on [0,1] with the refinement-limit integral.
    Riemann,
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = write!(err, "{}", e.render());
            return code;
        }
    };
    match execute(&cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INVALID
        }
    }
}

fn settings(cli: &Cli, scenario: Option<&Scenario>) -> IntegratorConfig {
    let mut cfg = scenario
        .map(Scenario::integrator_config)
        .unwrap_or_default();
    if let Some(t) = cli.tolerance {
        cfg.tolerance = t;
    }
    if let Some(m) = cli.max_level {
        cfg.max_level = m;
    }
    if let Some(p) = cli.p {
        cfg.p = p;
    }
    if cli.exact {
        cfg.exact = true;
    }
    cfg
}

fn show(x: &Scalar, exact: bool) -> String {
    match x {
        Scalar::Exact(_) if exact => format!("{x} ({})", x.to_decimal_string(15)),
        _ => x.to_decimal_string(15),
    }
}

fn io_err(path: &Path, source: std::io::Error) -> CliError {
    CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// `out.csv` with tag `lhs` becomes `out-lhs.csv`.
pub fn suffixed(path: &Path, tag: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}-{tag}.{}", ext.to_string_lossy()),
        None => format!("{stem}-{tag}"),
    };
    path.with_file_name(name)
}

struct Reporter<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
    exact: bool,
    csv: Option<PathBuf>,
}

impl Reporter<'_> {
    fn line(&mut self, s: impl AsRef<str>) -> Result<()> {
        writeln!(self.out, "{}", s.as_ref()).map_err(|e| io_err(Path::new("<stdout>"), e))
    }

    /// Prints a value with its convergence status and routes the trace to
    /// the CSV target (or standard output when none was given).
    fn integral(&mut self, name: &str, r: &Integral, tag: Option<&str>) -> Result<()> {
        self.line(format!("{name} = {}", show(&r.value, self.exact)))?;
        let last = r.trace.rows.last();
        let status = match (r.converged(), last) {
            (true, Some(row)) => format!(
                "  converged at level {} (|delta| = {:.3e})",
                row.level,
                row.delta.as_ref().map_or(0.0, Scalar::to_f64)
            ),
            (false, Some(row)) => format!(
                "  NOT converged: stopped at level {} with |delta| = {:.3e}, tolerance {:e}",
                row.level,
                row.delta.as_ref().map_or(f64::NAN, Scalar::to_f64),
                r.trace.tolerance
            ),
            (_, None) => "  no levels evaluated".into(),
        };
        self.line(status)?;
        for w in &r.trace.warnings {
            let _ = writeln!(self.err, "warning: {w}");
        }
        match &self.csv {
            Some(path) => {
                let path = match tag {
                    Some(t) => suffixed(path, t),
                    None => path.clone(),
                };
                let file = std::fs::File::create(&path).map_err(|e| io_err(&path, e))?;
                r.trace.write_csv(file, self.exact)?;
                self.line(format!("  trace written to {}", path.display()))?;
            }
            None => {
                let csv = r.trace.to_csv_string(self.exact);
                write!(self.out, "{csv}").map_err(|e| io_err(Path::new("<stdout>"), e))?;
            }
        }
        Ok(())
    }

    fn warn(&mut self, w: &Option<String>) {
        if let Some(w) = w {
            let _ = writeln!(self.err, "warning: {w}");
        }
    }
}

fn agreement(diff: &Scalar, tolerance: f64) -> bool {
    diff.to_f64() <= 10.0 * tolerance
}

fn verdict(rep: &mut Reporter, converged: bool, diff: &Scalar, tolerance: f64) -> Result<i32> {
    rep.line(format!("|difference| = {:.3e}", diff.to_f64()))?;
    if !converged {
        rep.line("result: not converged")?;
        return Ok(EXIT_NOT_CONVERGED);
    }
    if agreement(diff, tolerance) {
        rep.line("result: agree")?;
        Ok(EXIT_OK)
    } else {
        rep.line(format!("result: MISMATCH beyond {:e}", 10.0 * tolerance))?;
        Ok(EXIT_INVALID)
    }
}

fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let scenario = match (&cli.scenario, cli.command) {
        (Some(p), _) => Some(Scenario::load(p)?),
        (None, Command::Example37) => None,
        (None, _) => {
            return Err(CliError::Validation(
                "this command needs --scenario <file>".into(),
            ))
        }
    };
    let cfg = settings(cli, scenario.as_ref());
    cfg.validate()?;
    let mut rep = Reporter {
        out,
        err,
        exact: cfg.exact,
        csv: cli.csv.clone(),
    };
    let tag = scenario
        .as_ref()
        .and_then(|s| s.config.tag)
        .unwrap_or(TagRule::Midpoint);

    let Some(s) = scenario else {
        // example37 without a scenario
        let report = example37::run(&cfg)?;
        rep.line(report.to_string())?;
        if let Some(path) = &cli.csv {
            std::fs::write(path, report.to_csv()).map_err(|e| io_err(path, e))?;
        }
        return Ok(if !report.converged() {
            EXIT_NOT_CONVERGED
        } else if report.agree() {
            EXIT_OK
        } else {
            EXIT_INVALID
        });
    };

    let code = match cli.command {
        Command::Integrate => {
            let m = s.measure(s.config.measure.unwrap_or(MeasureChoice::Lebesgue))?;
            let r = integrate(s.require_integrand()?, &s.region, &m, &cfg)?;
            rep.integral("integral", &r, None)?;
            if r.converged() {
                EXIT_OK
            } else {
                EXIT_NOT_CONVERGED
            }
        }
        Command::Ls => {
            let r = ls_integrate(one_dim(&s)?, s.require_phi()?, &cfg)?;
            rep.integral("ls", &r, None)?;
            if r.converged() {
                EXIT_OK
            } else {
                EXIT_NOT_CONVERGED
            }
        }
        Command::Rs => {
            let f = stieltjes::integrand_as_unary(one_dim(&s)?);
            let r = rs_integrate(&f, s.require_phi()?, tag, &cfg)?;
            rep.integral("rs", &r, None)?;
            if r.converged() {
                EXIT_OK
            } else {
                EXIT_NOT_CONVERGED
            }
        }
        Command::Subst => {
            let f = one_dim(&s)?;
            let big_f = s.forward_exprs.first().ok_or_else(|| {
                CliError::Validation("subst needs a coordinatewise `forward` expression".into())
            })?;
            let iv = s.region.interval();
            let r = substitution_check(f, big_f, s.inverse_exprs.first(), iv.c(), iv.d(), &cfg)?;
            rep.warn(&r.warning);
            rep.integral("lhs (f dF)", &r.lhs, Some("lhs"))?;
            rep.integral("rhs (f o F^-1 dy)", &r.rhs, Some("rhs"))?;
            verdict(&mut rep, r.converged(), &r.difference, cfg.tolerance)?
        }
        Command::VerifyTransport => {
            let t = s.require_transport()?;
            let mu1 = s.measure(s.config.source_measure.unwrap_or(MeasureChoice::Lebesgue))?;
            let mu2 = s.measure(s.config.target_measure.unwrap_or(MeasureChoice::Lebesgue))?;
            let report = verify_measure_preserving(t, &mu1, &mu2, &s.verify_options())?;
            rep.line(report.to_string())?;
            if report.pass {
                EXIT_OK
            } else {
                EXIT_INVALID
            }
        }
        Command::Theorem35 => {
            let t = s.require_transport()?;
            let mu1 = s.measure(s.config.source_measure.unwrap_or(MeasureChoice::Lebesgue))?;
            let mu2 = s.measure(s.config.target_measure.unwrap_or(MeasureChoice::Lebesgue))?;
            let r = theorem35_check(s.require_integrand()?, t, &mu1, &mu2, &cfg)?;
            rep.warn(&r.warning);
            rep.integral("lhs (source)", &r.lhs, Some("lhs"))?;
            rep.integral("rhs (target)", &r.rhs, Some("rhs"))?;
            let converged = r.lhs.converged() && r.rhs.converged();
            verdict(&mut rep, converged, &r.difference, cfg.tolerance)?
        }
        Command::Example37 => {
            return Err(CliError::Validation(
                "example37 uses built-in fixtures; drop --scenario".into(),
            ))
        }
        Command::Riemann => {
            let r = riemann_restriction(one_dim(&s)?, tag, &cfg)?;
            rep.integral("riemann", &r.riemann, Some("riemann"))?;
            rep.integral("refinement limit", &r.categorical, Some("limit"))?;
            verdict(&mut rep, r.converged(), &r.difference, cfg.tolerance)?
        }
    };
    Ok(code)
}

fn one_dim(s: &Scenario) -> Result<&stieltjes_core::integrator::Integrand> {
    if s.region.dim() != 1 {
        return Err(CliError::Validation(format!(
            "this command works on one-dimensional regions, the scenario has dim {}",
            s.region.dim()
        )));
    }
    s.require_integrand()
}
