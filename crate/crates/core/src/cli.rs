//! Command-line front end: `resonances`, `scan`, `deform` and `bound`.
//!
//! Exit codes: 0 on success, 1 when a computation fails, 2 for usage errors.
//! CSV numbers carry 9 significant digits; JSON numbers are written in their
//! shortest round-trip form.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::darboux::{default_window, deform1, deform1_state, deform2, deform2_state};
use crate::error::Error;
use crate::gamow::{GamowFunction, Variant};
use crate::numerics::ShootingSolver;
use crate::potentials::{PotentialKind, PotentialSpec};
use crate::resonances::{
    analytic_resonances, bound_states, measure_peak, refine_pole, refine_resonance,
    sample_transmission, BoundWavefunction, Parity, Resonance,
};
use crate::scattering::{fbw_sum, FbwPeak};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Compute(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Compute(_) | CliError::Io(_) => EXIT_FAILURE,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter { .. } => CliError::Usage(e.to_string()),
            other => CliError::Compute(other.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(name = "gamow", version, about = "Resonances, Gamow-Siegert functions and Darboux deformations of square wells and barriers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Analytic, graphical and refined resonances side by side.
    Resonances(ResonancesArgs),
    /// Sample the transmission coefficient and measure its peaks.
    Scan(ScanArgs),
    /// Sample a first-order (complex) or second-order (real) deformed potential.
    Deform(DeformArgs),
    /// Bound states of a well.
    Bound(BoundArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

fn parse_kind(s: &str) -> Result<PotentialKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_variant(s: &str) -> Result<Variant, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Args, Debug, Default)]
pub struct Common {
    /// `well` or `barrier`.
    #[arg(long, value_parser = parse_kind)]
    pub kind: Option<PotentialKind>,
    /// Strength V0 > 0.
    #[arg(long, allow_hyphen_values = true)]
    pub v0: Option<f64>,
    /// Width b > 0.
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<f64>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output file (stdout if absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// TOML file supplying defaults; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ResonancesArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub count: Option<usize>,
    /// Newton tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Samples of the local transmission scan around each resonance.
    #[arg(long)]
    pub samples: Option<usize>,
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, allow_hyphen_values = true)]
    pub e_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub e_max: Option<f64>,
    #[arg(long)]
    pub samples: Option<usize>,
    /// Where to write the peak table in CSV mode (stderr if absent).
    #[arg(long)]
    pub peaks_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct DeformArgs {
    #[command(flatten)]
    pub common: Common,
    /// 1 (complex Ṽ) or 2 (real V₂).
    #[arg(long)]
    pub order: Option<u8>,
    /// Resonance index (m ≥ 0 for wells, n ≥ 1 for barriers).
    #[arg(long)]
    pub pole: Option<u32>,
    /// decaying, capture or decreasing.
    #[arg(long, value_parser = parse_variant)]
    pub variant: Option<Variant>,
    /// Explicit kinetic parameter (real part) instead of --pole.
    #[arg(long, requires = "k_im", allow_hyphen_values = true)]
    pub k_re: Option<f64>,
    #[arg(long, requires = "k_re", allow_hyphen_values = true)]
    pub k_im: Option<f64>,
    /// Half-width of the sampling window.
    #[arg(long, allow_hyphen_values = true)]
    pub window: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    /// Emit only (Re Ṽ, Im Ṽ) pairs (order 1).
    #[arg(long)]
    pub argand: bool,
    /// Add columns for the deformed image of this bound state (wells).
    #[arg(long)]
    pub bound_state: Option<usize>,
    /// Write shooting-method levels of the sampled V₂ to this CSV file.
    #[arg(long)]
    pub levels_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BoundArgs {
    #[command(flatten)]
    pub common: Common,
    /// Write normalised wavefunctions sampled on a grid to this CSV file.
    #[arg(long)]
    pub wavefunctions: Option<PathBuf>,
    #[arg(long)]
    pub points: Option<usize>,
}

/// Values a `--config` file may provide.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    kind: Option<String>,
    v0: Option<f64>,
    b: Option<f64>,
    format: Option<Format>,
    out: Option<PathBuf>,
    count: Option<usize>,
    tol: Option<f64>,
    max_iter: Option<usize>,
    samples: Option<usize>,
    e_min: Option<f64>,
    e_max: Option<f64>,
    peaks_out: Option<PathBuf>,
    order: Option<u8>,
    pole: Option<u32>,
    variant: Option<String>,
    k_re: Option<f64>,
    k_im: Option<f64>,
    window: Option<f64>,
    points: Option<usize>,
    bound_state: Option<usize>,
    levels_out: Option<PathBuf>,
    wavefunctions: Option<PathBuf>,
}

fn load_config(path: Option<&Path>) -> CliResult<FileConfig> {
    let Some(path) = path else {
        return Ok(FileConfig::default());
    };
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    toml::from_str(&text)
        .map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
}

fn required<T>(value: Option<T>, field: &str) -> CliResult<T> {
    value.ok_or_else(|| CliError::Usage(format!("missing required parameter `{field}`")))
}

/// Potential, format and output path after merging flags over the config file.
struct Resolved {
    spec: PotentialSpec,
    format: Format,
    out: Option<PathBuf>,
    file: FileConfig,
}

fn resolve(common: &Common) -> CliResult<Resolved> {
    let file = load_config(common.config.as_deref())?;
    let kind = match common.kind {
        Some(k) => k,
        None => match &file.kind {
            Some(s) => s.parse().map_err(|e: Error| CliError::Usage(e.to_string()))?,
            None => return Err(CliError::Usage("missing required parameter `kind`".into())),
        },
    };
    let v0 = required(common.v0.or(file.v0), "v0")?;
    let b = required(common.b.or(file.b), "b")?;
    let spec = PotentialSpec::new(kind, v0, b)?;
    Ok(Resolved {
        spec,
        format: common.format.or(file.format).unwrap_or(Format::Csv),
        out: common.out.clone().or_else(|| file.out.clone()),
        file,
    })
}

fn usage(field: &str, reason: impl std::fmt::Display) -> CliError {
    CliError::Usage(format!("invalid parameter `{field}`: {reason}"))
}

/// `%g`-style rendering with 9 significant digits.
pub fn format_number(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific notation");
    let exp: i32 = exp.parse().expect("exponent");
    if (-5..9).contains(&exp) {
        let fixed = format!("{:.*}", (8 - exp) as usize, x);
        trim_zeros(&fixed).to_string()
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn opt_number(x: Option<f64>) -> String {
    x.map(format_number).unwrap_or_default()
}

fn open_output(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(fs::File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w)
}

fn csv_error(e: csv::Error) -> CliError {
    CliError::Io(io::Error::other(e))
}

fn write_csv<W: Write>(w: W, header: &[&str], rows: &[Vec<String>]) -> CliResult<()> {
    let mut out = csv_writer(w);
    out.write_record(header).map_err(csv_error)?;
    for row in rows {
        out.write_record(row).map_err(csv_error)?;
    }
    out.flush()?;
    Ok(())
}

fn write_json<W: Write>(mut w: W, value: &Value) -> CliResult<()> {
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| CliError::Io(io::Error::other(e)))?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn spec_json(spec: &PotentialSpec) -> Value {
    json!({ "kind": spec.kind(), "v0": spec.strength(), "b": spec.width() })
}

fn complex_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

/// Parse `args` (program name first) and run; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(command: &Command) -> CliResult<()> {
    match command {
        Command::Resonances(a) => cmd_resonances(a),
        Command::Scan(a) => cmd_scan(a),
        Command::Deform(a) => cmd_deform(a),
        Command::Bound(a) => cmd_bound(a),
    }
}

struct ResonanceRow {
    analytic: Resonance,
    peak: Option<Resonance>,
    pole: Resonance,
    iterations: usize,
}

impl ResonanceRow {
    fn gaps(&self) -> Option<(f64, f64, f64, f64)> {
        let p = self.peak?;
        let ge = self.analytic.energy - p.energy;
        let gw = self.analytic.half_width() - p.half_width();
        Some((ge, gw, ge / p.energy, gw / p.half_width()))
    }
}

fn cmd_resonances(args: &ResonancesArgs) -> CliResult<()> {
    let r = resolve(&args.common)?;
    let count = required(args.count.or(r.file.count).or(Some(8)), "count")?;
    if count == 0 {
        return Err(usage("count", "must be at least 1"));
    }
    let tol = args.tol.or(r.file.tol).unwrap_or(1e-12);
    let max_iter = args.max_iter.or(r.file.max_iter).unwrap_or(100);
    let samples = args.samples.or(r.file.samples).unwrap_or(4000);
    if samples < 100 {
        return Err(usage("samples", "need at least 100"));
    }

    let spec = r.spec;
    let mut rows = Vec::with_capacity(count);
    for seed in analytic_resonances(&spec, count)? {
        let (pole, iterations) = refine_resonance(&spec, &seed, tol, max_iter)?;
        let peak = measure_peak(&spec, &seed, samples).ok();
        rows.push(ResonanceRow {
            analytic: seed,
            peak,
            pole,
            iterations,
        });
    }

    let out = open_output(r.out.as_deref())?;
    match r.format {
        Format::Csv => {
            let header = [
                "index",
                "e_peak",
                "half_width_peak",
                "e_pole",
                "half_width_pole",
                "e_analytic",
                "half_width_analytic",
                "gap_e",
                "gap_half_width",
                "rel_gap_e",
                "rel_gap_half_width",
                "isolated",
                "above_spacing",
                "iterations",
            ];
            let table: Vec<Vec<String>> = rows
                .iter()
                .map(|row| {
                    let gaps = row.gaps();
                    let validity = row.analytic.validity;
                    vec![
                        row.analytic.index.to_string(),
                        opt_number(row.peak.map(|p| p.energy)),
                        opt_number(row.peak.map(|p| p.half_width())),
                        format_number(row.pole.energy),
                        format_number(row.pole.half_width()),
                        format_number(row.analytic.energy),
                        format_number(row.analytic.half_width()),
                        opt_number(gaps.map(|g| g.0)),
                        opt_number(gaps.map(|g| g.1)),
                        opt_number(gaps.map(|g| g.2)),
                        opt_number(gaps.map(|g| g.3)),
                        validity.map(|v| v.isolated.to_string()).unwrap_or_default(),
                        validity.map(|v| v.above_spacing.to_string()).unwrap_or_default(),
                        row.iterations.to_string(),
                    ]
                })
                .collect();
            write_csv(out, &header, &table)
        }
        Format::Json => {
            let results: Vec<Value> = rows
                .iter()
                .map(|row| {
                    let gaps = row.gaps();
                    json!({
                        "index": row.analytic.index,
                        "e_peak": row.peak.map(|p| p.energy),
                        "half_width_peak": row.peak.map(|p| p.half_width()),
                        "e_pole": row.pole.energy,
                        "half_width_pole": row.pole.half_width(),
                        "k_pole": row.pole.k.map(complex_json),
                        "e_analytic": row.analytic.energy,
                        "half_width_analytic": row.analytic.half_width(),
                        "gap_e": gaps.map(|g| g.0),
                        "gap_half_width": gaps.map(|g| g.1),
                        "rel_gap_e": gaps.map(|g| g.2),
                        "rel_gap_half_width": gaps.map(|g| g.3),
                    })
                })
                .collect();
            let diagnostics = json!({
                "validity": rows.iter().map(|r| r.analytic.validity).collect::<Vec<_>>(),
                "iterations": rows.iter().map(|r| r.iterations).collect::<Vec<_>>(),
            });
            let doc = json!({
                "config": {
                    "command": "resonances",
                    "potential": spec_json(&spec),
                    "count": count,
                    "tol": tol,
                    "max_iter": max_iter,
                    "samples": samples,
                },
                "results": results,
                "diagnostics": diagnostics,
            });
            write_json(out, &doc)
        }
    }
}

fn cmd_scan(args: &ScanArgs) -> CliResult<()> {
    let r = resolve(&args.common)?;
    let e_min = required(args.e_min.or(r.file.e_min), "e_min")?;
    let e_max = required(args.e_max.or(r.file.e_max), "e_max")?;
    let samples = args.samples.or(r.file.samples).unwrap_or(20_000);
    let peaks_out = args.peaks_out.clone().or_else(|| r.file.peaks_out.clone());

    let scan = sample_transmission(&r.spec, e_min, e_max, samples)?;
    let accepted: Vec<_> = scan.accepted().copied().collect();
    let fbw: Vec<FbwPeak> = accepted
        .iter()
        .filter_map(|p| FbwPeak::new(p.center, p.width()?).ok())
        .collect();
    let omega: Vec<f64> = scan.energies.iter().map(|&e| fbw_sum(e, &fbw)).collect();
    let rejected = scan.peaks.len() - accepted.len();

    let out = open_output(r.out.as_deref())?;
    match r.format {
        Format::Csv => {
            let rows: Vec<Vec<String>> = scan
                .energies
                .iter()
                .zip(&scan.transmission)
                .zip(&omega)
                .map(|((e, t), w)| vec![format_number(*e), format_number(*t), format_number(*w)])
                .collect();
            write_csv(out, &["e", "t", "omega_n"], &rows)?;
            let peak_rows: Vec<Vec<String>> = accepted
                .iter()
                .map(|p| {
                    vec![
                        format_number(p.center),
                        opt_number(p.width().map(|w| 0.5 * w)),
                        opt_number(p.left_half),
                        opt_number(p.right_half),
                        format_number(p.peak_value),
                    ]
                })
                .collect();
            let header = ["center", "half_width", "left_half", "right_half", "peak_value"];
            match &peaks_out {
                Some(path) => write_csv(BufWriter::new(fs::File::create(path)?), &header, &peak_rows)?,
                None => write_csv(io::stderr().lock(), &header, &peak_rows)?,
            }
        }
        Format::Json => {
            let samples_json: Vec<Value> = scan
                .energies
                .iter()
                .zip(&scan.transmission)
                .zip(&omega)
                .map(|((e, t), w)| json!([e, t, w]))
                .collect();
            let doc = json!({
                "config": {
                    "command": "scan",
                    "potential": spec_json(&r.spec),
                    "e_min": e_min,
                    "e_max": e_max,
                    "samples": samples,
                },
                "results": {
                    "columns": ["e", "t", "omega_n"],
                    "samples": samples_json,
                    "peaks": accepted,
                },
                "diagnostics": { "accepted": accepted.len(), "rejected": rejected },
            });
            write_json(out, &doc)?;
        }
    }
    if accepted.is_empty() {
        return Err(Error::NoPeaks { e_min, e_max }.into());
    }
    Ok(())
}

fn transformation(args: &DeformArgs, spec: &PotentialSpec, file: &FileConfig) -> CliResult<GamowFunction> {
    let variant = match args.variant {
        Some(v) => v,
        None => match &file.variant {
            Some(s) => s.parse().map_err(|e: Error| CliError::Usage(e.to_string()))?,
            None => Variant::Decreasing,
        },
    };
    let explicit = match (args.k_re.or(file.k_re), args.k_im.or(file.k_im)) {
        (Some(re), Some(im)) => Some(Complex64::new(re, im)),
        (None, None) => None,
        _ => return Err(usage("k_im", "--k-re and --k-im go together")),
    };
    if let Some(k) = explicit {
        return Ok(match variant {
            Variant::Decreasing if k.im > 0.0 => GamowFunction::decreasing(spec, k)?,
            Variant::Decreasing => GamowFunction::build(spec, k, variant)?,
            _ => {
                let pole = refine_pole(spec, k, 1e-12, 100)?;
                GamowFunction::build(spec, pole.kinetic(), variant)?
            }
        });
    }
    let first = match spec.kind() {
        PotentialKind::Well => 0,
        PotentialKind::Barrier => 1,
    };
    let index = args.pole.or(file.pole).unwrap_or(first);
    if index < first {
        return Err(usage("pole", format!("barrier resonances start at n = 1, got {index}")));
    }
    let seeds = analytic_resonances(spec, (index - first + 1) as usize)?;
    let seed = seeds.last().expect("at least one seed");
    let (pole, _) = refine_resonance(spec, seed, 1e-12, 100)?;
    Ok(GamowFunction::build(spec, pole.kinetic(), variant)?)
}

fn cmd_deform(args: &DeformArgs) -> CliResult<()> {
    let r = resolve(&args.common)?;
    let spec = r.spec;
    let order = args.order.or(r.file.order).unwrap_or(1);
    if !(order == 1 || order == 2) {
        return Err(usage("order", format!("must be 1 or 2, got {order}")));
    }
    let points = args.points.or(r.file.points).unwrap_or(4001);
    if points < 2 {
        return Err(usage("points", "need at least 2"));
    }
    let levels_out = args.levels_out.clone().or_else(|| r.file.levels_out.clone());
    if levels_out.is_some() && order != 2 {
        return Err(usage("levels_out", "only available for --order 2"));
    }
    if args.argand && order != 1 {
        return Err(usage("argand", "only available for --order 1"));
    }
    let bound_index = args.bound_state.or(r.file.bound_state);
    let g = transformation(args, &spec, &r.file)?;
    let k = g.kinetic();
    let window = match args.window.or(r.file.window) {
        Some(w) if w.is_finite() && w > 0.0 => w,
        Some(w) => return Err(usage("window", format!("must be > 0, got {w}"))),
        None => default_window(&spec, k),
    };
    let xs: Vec<f64> = (0..points)
        .map(|i| -window + 2.0 * window * i as f64 / (points - 1) as f64)
        .collect();

    let bound = match bound_index {
        Some(n) => {
            if spec.kind() != PotentialKind::Well {
                return Err(usage("bound_state", "bound states exist only for wells"));
            }
            let states = bound_states(&spec)?;
            let state = states
                .get(n)
                .ok_or_else(|| usage("bound_state", format!("the well has {} bound states", states.len())))?;
            Some(BoundWavefunction::normalized(&spec, state))
        }
        None => None,
    };

    let mut header: Vec<&str> = Vec::new();
    let mut columns: Vec<Vec<f64>> = Vec::new();
    let mut diagnostics = json!({
        "k": complex_json(k),
        "energy": complex_json(g.energy()),
        "variant": g.variant(),
        "window": window,
    });

    if order == 1 {
        let d = deform1(&g);
        let values = d.sample(&xs)?;
        if !args.argand {
            header.push("x");
            columns.push(xs.clone());
        }
        header.extend(["re_v", "im_v"]);
        columns.push(values.iter().map(|v| v.re).collect());
        columns.push(values.iter().map(|v| v.im).collect());
        if let Some(psi) = bound {
            let y = deform1_state(&g, psi);
            let ys = xs.iter().map(|&x| y.evaluate(x).map(|v| v.0)).collect::<Result<Vec<_>, _>>()?;
            header.extend(["re_y", "im_y"]);
            columns.push(ys.iter().map(|v| v.re).collect());
            columns.push(ys.iter().map(|v| v.im).collect());
        }
    } else {
        let d = deform2(&g)?;
        let values = d.sample(&xs)?;
        let max_im = xs
            .iter()
            .map(|&x| d.evaluate_complex(x).map(|z| z.im.abs()))
            .try_fold(0.0f64, |m, v| v.map(|v| m.max(v)))?;
        header.extend(["x", "v2", "v"]);
        columns.push(xs.clone());
        columns.push(values);
        columns.push(xs.iter().map(|&x| spec.evaluate(x)).collect());
        if let Some(psi) = bound {
            let state = deform2_state(&d, psi)?;
            let ps = xs.iter().map(|&x| state.evaluate(x).map(|v| v.0)).collect::<Result<Vec<_>, _>>()?;
            header.extend(["re_psi", "im_psi"]);
            columns.push(ps.iter().map(|v| v.re).collect());
            columns.push(ps.iter().map(|v| v.im).collect());
        }
        diagnostics["max_abs_im_v2"] = json!(max_im);
        diagnostics["distortion_groups"] = json!(d.distortion_groups(20_000)?);

        if let Some(path) = &levels_out {
            let solver = ShootingSolver::new(
                |x| d.evaluate(x).unwrap_or(f64::NAN),
                -window,
                window,
                (window * 400.0).max(24_000.0) as usize,
                &[-spec.half_width(), spec.half_width()],
            );
            let floor = values_min(&columns[1]).min(spec.inside_value()) - 1.0;
            let levels = solver.levels(floor, -1e-9, 1e-10);
            let base: Vec<f64> = match spec.kind() {
                PotentialKind::Well => bound_states(&spec)?.iter().map(|s| s.energy).collect(),
                PotentialKind::Barrier => Vec::new(),
            };
            let n = levels.len().max(base.len());
            let rows: Vec<Vec<String>> = (0..n)
                .map(|i| {
                    let l = levels.get(i).copied();
                    let b = base.get(i).copied();
                    let diff = l.zip(b).map(|(l, b)| l - b);
                    vec![i.to_string(), opt_number(l), opt_number(b), opt_number(diff)]
                })
                .collect();
            write_csv(
                BufWriter::new(fs::File::create(path)?),
                &["n", "e_shooting", "e_base", "difference"],
                &rows,
            )?;
            diagnostics["shooting_levels"] = json!(levels);
        }
    }

    let out = open_output(r.out.as_deref())?;
    match r.format {
        Format::Csv => {
            let rows: Vec<Vec<String>> = (0..xs.len())
                .map(|i| columns.iter().map(|c| format_number(c[i])).collect())
                .collect();
            write_csv(out, &header, &rows)
        }
        Format::Json => {
            let mut results = serde_json::Map::new();
            for (name, col) in header.iter().zip(&columns) {
                results.insert((*name).to_string(), json!(col));
            }
            let doc = json!({
                "config": {
                    "command": "deform",
                    "potential": spec_json(&spec),
                    "order": order,
                    "points": points,
                    "argand": args.argand,
                    "bound_state": bound_index,
                },
                "results": results,
                "diagnostics": diagnostics,
            });
            write_json(out, &doc)
        }
    }
}

fn values_min(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::INFINITY, f64::min)
}

fn cmd_bound(args: &BoundArgs) -> CliResult<()> {
    let r = resolve(&args.common)?;
    let spec = r.spec;
    if spec.kind() != PotentialKind::Well {
        return Err(usage("kind", "bound states exist only for wells"));
    }
    let states = bound_states(&spec)?;
    let wavefunctions = args.wavefunctions.clone().or_else(|| r.file.wavefunctions.clone());
    if let Some(path) = &wavefunctions {
        let points = args.points.or(r.file.points).unwrap_or(2001);
        if points < 2 {
            return Err(usage("points", "need at least 2"));
        }
        // far enough for the most weakly bound tail to drop by e^-20
        let kappa = (-states.last().expect("a well binds at least one state").energy).sqrt();
        let window = spec.half_width() + 10.0 / kappa;
        let wfs: Vec<BoundWavefunction> =
            states.iter().map(|s| BoundWavefunction::normalized(&spec, s)).collect();
        let mut header = vec!["x".to_string()];
        header.extend((0..states.len()).map(|n| format!("psi_{n}")));
        let rows: Vec<Vec<String>> = (0..points)
            .map(|i| {
                let x = -window + 2.0 * window * i as f64 / (points - 1) as f64;
                let mut row = vec![format_number(x)];
                row.extend(wfs.iter().map(|w| format_number(w.evaluate(x).0)));
                row
            })
            .collect();
        let header: Vec<&str> = header.iter().map(String::as_str).collect();
        write_csv(BufWriter::new(fs::File::create(path)?), &header, &rows)?;
    }

    let out = open_output(r.out.as_deref())?;
    let parity = |p: Parity| match p {
        Parity::Even => "even",
        Parity::Odd => "odd",
    };
    match r.format {
        Format::Csv => {
            let rows: Vec<Vec<String>> = states
                .iter()
                .map(|s| {
                    vec![
                        s.index.to_string(),
                        parity(s.parity).to_string(),
                        format_number(s.rho),
                        format_number(s.energy),
                    ]
                })
                .collect();
            write_csv(out, &["n", "parity", "rho", "energy"], &rows)
        }
        Format::Json => {
            let doc = json!({
                "config": { "command": "bound", "potential": spec_json(&spec) },
                "results": states,
                "diagnostics": { "count": states.len(), "theta": spec.theta() },
            });
            write_json(out, &doc)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(format_number(6.798680), "6.79868");
        assert_eq!(format_number(1000.394784123), "1000.39478");
        assert_eq!(format_number(0.0), "0");
        assert_eq!(format_number(-15.673935347), "-15.6739353");
        assert_eq!(format_number(1.5e-7), "1.5e-7");
        assert_eq!(format_number(123456789012.0), "1.23456789e11");
        assert_eq!(format_number(9.9999999999), "10");
        assert_eq!(format_number(0.000123456789123), "0.000123456789");
    }

    #[test]
    fn formatted_numbers_round_trip_to_nine_digits() {
        for x in [6.798344, 0.521472, 1006.316546, 1.7634214e-3, -4.2e12] {
            let back: f64 = format_number(x).parse().unwrap();
            assert!((back - x).abs() <= 5e-9 * x.abs());
        }
    }

    #[test]
    fn library_errors_map_to_exit_codes() {
        let usage: CliError = Error::invalid("v0", "bad").into();
        assert_eq!(usage.exit_code(), EXIT_USAGE);
        let failure: CliError = Error::NoPeaks { e_min: 1.0, e_max: 2.0 }.into();
        assert_eq!(failure.exit_code(), EXIT_FAILURE);
    }

    #[test]
    fn config_rejects_unknown_keys() {
        assert!(toml::from_str::<FileConfig>("v0 = 1.0\nbogus = 2").is_err());
        let c: FileConfig = toml::from_str("kind = \"well\"\nv0 = 16.0\nb = 5.0\nformat = \"json\"").unwrap();
        assert_eq!(c.format, Some(Format::Json));
    }
}
