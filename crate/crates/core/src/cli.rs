//! Command-line front end.
//!
//! Exit codes: 0 success, 1 I/O error, 2 invalid input, 3 an audited
//! property failed. Data goes to stdout (or `--out`), diagnostics to stderr,
//! and nothing is written to the data stream unless the whole output was
//! produced.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use serde::Serialize;

use crate::achievability::{tdma_tin_gdof, tdma_tin_rate, IcConfig};
use crate::bounds::{
    genie_params, gdof_ub, gdof_ub_single, sum_capacity_ub, TxPermutation,
};
use crate::channel::{
    db_to_linear, linear_to_db, validate_scenario_with_cap, AlphaMatrix, ChannelScenario,
    ChannelSpec, DEFAULT_ALPHA_CAP,
};
use crate::error::Error;
use crate::experiments::{
    gap_audit, gdof_convergence_probe, sandwich_audit, sweep_fig2, GapAuditConfig, RhoSource,
    SandwichConfig, SweepConfig, SweepSummary,
};
use crate::regime::{classify_tol, psi};
use crate::report::{emit_summary, emit_table, fmt_sig, Format, Tabular};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_AUDIT_FAILED: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// TDMA-TIN rate, sum-capacity upper bound and their gap at one point
    Eval,
    /// Regime membership (extended and GSJ) with witnesses
    Classify,
    /// Per-permutation sum-capacity bound profile
    Bound,
    /// Per-permutation GDoF bound profile and the TDMA-TIN GDoF
    Gdof,
    /// Regime sweep over (alpha21, alpha12) with alpha11=alpha22=1, alpha13=alpha23=beta
    Sweep,
    /// Constant-gap audit on random in-regime channels
    GapAudit,
    /// Rate/GDoF sandwich audit on unrestricted random channels
    SandwichAudit,
    /// Normalized rate and bound against the GDoF values over an SNR list
    Converge,
}

/// TDMA-TIN and genie-aided bounds for the 3x2 Gaussian X channel.
///
/// Reals are printed with 12 significant digits. CSV commands (sweep,
/// gap-audit, converge) write records by default; with `--format json` they
/// print a summary instead. When `--out` is given for a CSV command, records
/// go to the file and the JSON summary to stdout.
#[derive(Debug, Parser)]
#[command(name = "xtin", version)]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,

    /// Scenario JSON: {"rho_db": x, "alpha": [[..3],[..3]]} or {"rho_db": x, "gains": [[[re,im] x3] x2]}
    #[arg(long)]
    pub scenario: Option<PathBuf>,

    /// Transmit SNR in dB; a comma list for gap-audit, sandwich-audit and converge
    /// [defaults: gap-audit 20,40,60; converge 40,60,90; sandwich-audit log-uniform 10..90]
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub rho_db: Vec<f64>,

    /// Exponents a11,a12,a13,a21,a22,a23 (row = receiver); overrides the scenario channel
    #[arg(long)]
    pub alpha: Option<String>,

    /// Largest accepted exponent
    #[arg(long, default_value_t = DEFAULT_ALPHA_CAP)]
    pub alpha_cap: f64,

    /// Exponent of the Tx3 links in the sweep
    #[arg(long, default_value_t = 0.75)]
    pub beta: f64,

    /// Sweep grid step
    #[arg(long, default_value_t = 0.005)]
    pub step: f64,

    /// Sweep grid upper edge for both axes
    #[arg(long, default_value_t = 0.75)]
    pub range_max: f64,

    /// Number of samples [defaults: gap-audit 1000, sandwich-audit 100000]
    #[arg(long)]
    pub n: Option<usize>,

    /// Sampler seed [defaults: gap-audit 7, sandwich-audit 1]
    #[arg(long)]
    pub seed: Option<u64>,

    /// gap-audit: draw from the beta family (alpha11=alpha22=1, alpha13=alpha23=beta)
    /// instead of the free box (0,2]^6
    #[arg(long)]
    pub beta_family: bool,

    /// Write data output to this file instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Output format [default: csv for sweep, gap-audit, converge; json otherwise]
    #[arg(long, value_enum)]
    pub format: Option<Format>,

    /// Slack added to both regime inequalities (classify, sweep)
    #[arg(long, default_value_t = 0.0)]
    pub tolerance: f64,
}

/// Everything that ends a command early, mapped onto an exit code.
#[derive(Debug)]
enum Failure {
    Invalid(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Invalid(e)
    }
}

/// Output of a successful command.
struct Output {
    /// Written to `--out` when given, else stdout.
    data: Vec<u8>,
    /// Always written to stdout, after `data` went to `--out`.
    summary: Option<Vec<u8>>,
    audit_passed: bool,
}

impl Output {
    fn data(data: Vec<u8>) -> Self {
        Output {
            data,
            summary: None,
            audit_passed: true,
        }
    }
}

pub fn main() -> i32 {
    run(
        std::env::args_os(),
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    )
}

pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{}", e.render());
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{}", e.render());
                    EXIT_INVALID
                }
            };
        }
    };
    match execute(&cli) {
        Ok(out) => match write_output(&cli, out.data, out.summary, stdout) {
            Ok(()) if out.audit_passed => EXIT_OK,
            Ok(()) => {
                let _ = writeln!(stderr, "error: audited property failed");
                EXIT_AUDIT_FAILED
            }
            Err(msg) => {
                let _ = writeln!(stderr, "error: {msg}");
                EXIT_IO
            }
        },
        Err(Failure::Invalid(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_INVALID
        }
        Err(Failure::Io(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_IO
        }
    }
}

fn write_output(
    cli: &Cli,
    data: Vec<u8>,
    summary: Option<Vec<u8>>,
    stdout: &mut dyn Write,
) -> std::result::Result<(), String> {
    match &cli.out {
        Some(path) => {
            std::fs::write(path, &data).map_err(|e| format!("{}: {e}", path.display()))?;
            if let Some(s) = summary {
                stdout.write_all(&s).map_err(|e| e.to_string())?;
            }
        }
        None => stdout.write_all(&data).map_err(|e| e.to_string())?,
    }
    stdout.flush().map_err(|e| e.to_string())
}

fn execute(cli: &Cli) -> std::result::Result<Output, Failure> {
    if !(cli.tolerance >= 0.0) {
        return Err(Error::InvalidArgument("--tolerance must be >= 0".into()).into());
    }
    match cli.command {
        Command::Eval => cmd_eval(cli),
        Command::Classify => cmd_classify(cli),
        Command::Bound => cmd_bound(cli),
        Command::Gdof => cmd_gdof(cli),
        Command::Sweep => cmd_sweep(cli),
        Command::GapAudit => cmd_gap_audit(cli),
        Command::SandwichAudit => cmd_sandwich(cli),
        Command::Converge => cmd_converge(cli),
    }
}

fn format_or(cli: &Cli, default: Format) -> Format {
    cli.format.unwrap_or(default)
}

/// Scenario from `--scenario`, with `--rho-db` and `--alpha` applied on top.
fn load_scenario(cli: &Cli, need_rho: bool) -> std::result::Result<(Option<f64>, AlphaMatrix), Failure> {
    let mut scenario = match &cli.scenario {
        Some(path) => Some(
            ChannelScenario::load(path)
                .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))??,
        ),
        None => None,
    };
    let rho_override = match cli.rho_db.as_slice() {
        [] => None,
        [db] => Some(db_to_linear(*db)),
        _ => {
            return Err(Error::InvalidArgument("this command takes a single --rho-db".into()).into())
        }
    };
    if let Some(text) = &cli.alpha {
        let alpha = AlphaMatrix::parse_flat(text)?;
        let rho = rho_override.or(scenario.map(|s| s.rho));
        scenario = Some(ChannelScenario::from_alpha(rho.unwrap_or(f64::NAN), *alpha.rows()));
    } else if let (Some(s), Some(rho)) = (scenario.as_mut(), rho_override) {
        s.rho = rho;
    }
    let scenario = scenario.ok_or_else(|| {
        Error::InvalidArgument("a channel is required: pass --scenario or --alpha".into())
    })?;

    match scenario.channel {
        // exponents alone suffice for GDoF-level commands
        ChannelSpec::Alpha(rows) if !need_rho && scenario.rho.is_nan() => {
            Ok((None, AlphaMatrix::with_cap(rows, cli.alpha_cap)?))
        }
        _ => {
            if scenario.rho.is_nan() {
                return Err(Error::InvalidArgument("--rho-db is required".into()).into());
            }
            let alpha = validate_scenario_with_cap(&scenario, cli.alpha_cap)?;
            Ok((Some(scenario.rho), alpha))
        }
    }
}

fn rho_list(cli: &Cli, default_db: &[f64]) -> Vec<f64> {
    let db = if cli.rho_db.is_empty() {
        default_db
    } else {
        &cli.rho_db
    };
    db.iter().map(|&d| db_to_linear(d)).collect()
}

#[derive(Serialize)]
struct EvalOut {
    rho: f64,
    rho_db: f64,
    alpha: AlphaMatrix,
    rate_bits: f64,
    rate_argmax: IcConfig,
    ub_bits: f64,
    ub_argmin: TxPermutation,
    gap_bits: f64,
    d_tt: f64,
    gdof_ub: f64,
}

fn cmd_eval(cli: &Cli) -> std::result::Result<Output, Failure> {
    let (rho, alpha) = load_scenario(cli, true)?;
    let rho = rho.expect("rho required");
    let rate = tdma_tin_rate(rho, &alpha);
    let ub = sum_capacity_ub(rho, &alpha);
    let out = EvalOut {
        rho,
        rho_db: linear_to_db(rho),
        alpha,
        rate_bits: rate.value,
        rate_argmax: rate.argmax,
        ub_bits: ub.value,
        ub_argmin: ub.argmin,
        gap_bits: ub.value - rate.value,
        d_tt: tdma_tin_gdof(&alpha).value,
        gdof_ub: gdof_ub(&alpha).value,
    };
    Ok(Output::data(emit_summary(&out, format_or(cli, Format::Json))?))
}

#[derive(Serialize)]
struct ClassifyOut {
    extended: bool,
    gsj: bool,
    gdof: Option<f64>,
    witness_extended: Option<TxPermutation>,
    witness_gsj: Option<TxPermutation>,
    tolerance: f64,
}

fn cmd_classify(cli: &Cli) -> std::result::Result<Output, Failure> {
    let (_, alpha) = load_scenario(cli, false)?;
    let v = classify_tol(&alpha, cli.tolerance);
    let out = ClassifyOut {
        extended: v.in_extended,
        gsj: v.in_gsj,
        gdof: v.gdof_value,
        witness_extended: v.witness_extended,
        witness_gsj: v.witness_gsj,
        tolerance: cli.tolerance,
    };
    Ok(Output::data(emit_summary(&out, format_or(cli, Format::Json))?))
}

#[derive(Serialize)]
struct BoundRow {
    perm: TxPermutation,
    case: u8,
    d: u8,
    c_sq: f64,
    bound_bits: f64,
}

impl Tabular for BoundRow {
    fn header() -> &'static [&'static str] {
        &["perm", "case", "d", "c_sq", "bound_bits"]
    }
    fn row(&self) -> Vec<String> {
        vec![
            self.perm.to_string(),
            self.case.to_string(),
            self.d.to_string(),
            fmt_sig(self.c_sq),
            fmt_sig(self.bound_bits),
        ]
    }
}

#[derive(Serialize)]
struct BoundOut {
    rho: f64,
    value: f64,
    argmin: TxPermutation,
    per_perm: Vec<BoundRow>,
}

fn cmd_bound(cli: &Cli) -> std::result::Result<Output, Failure> {
    let (rho, alpha) = load_scenario(cli, true)?;
    let rho = rho.expect("rho required");
    let ub = sum_capacity_ub(rho, &alpha);
    let rows: Vec<BoundRow> = ub
        .per_perm
        .iter()
        .map(|&(perm, bound_bits)| {
            let g = genie_params(&alpha, perm, rho);
            BoundRow {
                perm,
                case: g.case_id(),
                d: g.d,
                c_sq: g.c_sq,
                bound_bits,
            }
        })
        .collect();
    let data = match format_or(cli, Format::Json) {
        Format::Csv => emit_table(&rows, Format::Csv),
        Format::Json => emit_summary(
            &BoundOut {
                rho,
                value: ub.value,
                argmin: ub.argmin,
                per_perm: rows,
            },
            Format::Json,
        )?,
    };
    Ok(Output::data(data))
}

#[derive(Serialize)]
struct GdofRow {
    perm: TxPermutation,
    case: u8,
    psi: f64,
    gdof_ub: f64,
}

impl Tabular for GdofRow {
    fn header() -> &'static [&'static str] {
        &["perm", "case", "psi", "gdof_ub"]
    }
    fn row(&self) -> Vec<String> {
        vec![
            self.perm.to_string(),
            self.case.to_string(),
            fmt_sig(self.psi),
            fmt_sig(self.gdof_ub),
        ]
    }
}

#[derive(Serialize)]
struct GdofOut {
    d_tt: f64,
    d_tt_argmax: IcConfig,
    gdof_ub: f64,
    argmin: TxPermutation,
    per_perm: Vec<GdofRow>,
}

fn cmd_gdof(cli: &Cli) -> std::result::Result<Output, Failure> {
    let (_, alpha) = load_scenario(cli, false)?;
    let tt = tdma_tin_gdof(&alpha);
    let ub = gdof_ub(&alpha);
    let rows: Vec<GdofRow> = ub
        .per_perm
        .iter()
        .map(|&(perm, _)| {
            let v = perm.view(&alpha);
            // Appendix case label: 1 when Tx i3 enters the genie, 2 otherwise
            let case = if v.a(2, 3) > v.a(2, 1) { 1 } else { 2 };
            GdofRow {
                perm,
                case,
                psi: psi(&alpha, perm),
                gdof_ub: gdof_ub_single(&alpha, perm),
            }
        })
        .collect();
    let data = match format_or(cli, Format::Json) {
        Format::Csv => emit_table(&rows, Format::Csv),
        Format::Json => emit_summary(
            &GdofOut {
                d_tt: tt.value,
                d_tt_argmax: tt.argmax,
                gdof_ub: ub.value,
                argmin: ub.argmin,
                per_perm: rows,
            },
            Format::Json,
        )?,
    };
    Ok(Output::data(data))
}

/// CSV records to data; JSON summary either as the data (json) or alongside
/// it on stdout when records go to `--out`.
fn records_and_summary<R: Tabular + Serialize, S: Serialize>(
    cli: &Cli,
    rows: &[R],
    summary: &S,
    passed: bool,
) -> Output {
    let summary = crate::report::to_json(summary);
    match format_or(cli, Format::Csv) {
        Format::Csv => Output {
            data: emit_table(rows, Format::Csv),
            summary: cli.out.as_ref().map(|_| summary),
            audit_passed: passed,
        },
        Format::Json => Output {
            data: summary,
            summary: None,
            audit_passed: passed,
        },
    }
}

fn cmd_sweep(cli: &Cli) -> std::result::Result<Output, Failure> {
    let cfg = SweepConfig {
        beta: cli.beta,
        step: cli.step,
        range_max: cli.range_max,
        tolerance: cli.tolerance,
    };
    let records = sweep_fig2(&cfg)?;
    let summary = SweepSummary::new(&cfg, &records);
    Ok(records_and_summary(cli, &records, &summary, summary.passed()))
}

fn cmd_gap_audit(cli: &Cli) -> std::result::Result<Output, Failure> {
    let cfg = GapAuditConfig::new(
        cli.n.unwrap_or(1000),
        rho_list(cli, &[20.0, 40.0, 60.0]),
        cli.seed.unwrap_or(7),
        !cli.beta_family,
    );
    let audit = gap_audit(&cfg)?;
    Ok(records_and_summary(
        cli,
        &audit.rows,
        &audit.report,
        audit.report.passed(),
    ))
}

fn cmd_sandwich(cli: &Cli) -> std::result::Result<Output, Failure> {
    let mut cfg = SandwichConfig::new(cli.n.unwrap_or(100_000), cli.seed.unwrap_or(1));
    if !cli.rho_db.is_empty() {
        cfg.rho = RhoSource::List(rho_list(cli, &[]));
    }
    let report = sandwich_audit(&cfg)?;
    let passed = report.passed();
    Ok(Output {
        data: emit_summary(&report, format_or(cli, Format::Json))?,
        summary: None,
        audit_passed: passed,
    })
}

#[derive(Serialize)]
struct ConvergeSummary {
    alpha: AlphaMatrix,
    rows: usize,
    within_corridor: bool,
    ub_above_rate: bool,
}

fn cmd_converge(cli: &Cli) -> std::result::Result<Output, Failure> {
    let rhos = rho_list(cli, &[40.0, 60.0, 90.0]);
    // the SNR list belongs to the probe, not to the scenario
    let probe_cli = Cli {
        rho_db: Vec::new(),
        scenario: cli.scenario.clone(),
        alpha: cli.alpha.clone(),
        out: None,
        format: None,
        n: None,
        seed: None,
        ..*cli
    };
    let (_, alpha) = load_scenario(&probe_cli, false)?;
    let rows = gdof_convergence_probe(&alpha, &rhos)?;
    let summary = ConvergeSummary {
        alpha,
        rows: rows.len(),
        within_corridor: rows.iter().all(|r| (r.rate_norm - r.d_tt).abs() <= r.corridor),
        ub_above_rate: rows.iter().all(|r| r.ub_norm >= r.rate_norm),
    };
    let passed = summary.ub_above_rate;
    Ok(records_and_summary(cli, &rows, &summary, passed))
}
