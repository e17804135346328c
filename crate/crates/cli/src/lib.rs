//! Command-line frontend for `hfavg-core`: Zeeman spectra, averaged shift
//! curves, theorem verification and field-independent-point search.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use hfavg_core::averaging::{load_document, verify_scheme, AveragingScheme, ResolvedScheme, BUILTIN_SCHEMES};
use hfavg_core::constants::GAUSS_PER_TESLA;
use hfavg_core::fieldpoint::{analytic_fip, find_fip, FieldIndependentPoint, FipOptions};
use hfavg_core::quadrupole::TrapGeometry;
use hfavg_core::species::{load_species_with, Strictness};
use hfavg_core::zeeman::BlockTemplate;
use hfavg_core::{builtin_scheme, Error as CoreError, LevelSpec, Projection, SpeciesDb};

/// Environment variable naming a default species file.
pub const SPECIES_ENV: &str = "HFAVG_SPECIES_PATH";

const DEFAULT_GEOMETRY: [f64; 4] = [1.0e7, 0.0, 0.0, 0.0];
const GEOMETRY_SEED: u64 = 0x5eed;

#[derive(Debug, Parser)]
#[command(name = "hfavg", version, about = "Hyperfine Zeeman and quadrupole shift averaging")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dressed-state energies of one level on a field grid.
    Spectrum(Opts),
    /// Component and averaged frequency shifts of a scheme on a field grid.
    Curve(Opts),
    /// Cancellation theorems and quadrupole sum rules, as JSON.
    Verify(Opts),
    /// Field-independent operating point of a scheme, as JSON.
    Fip(Opts),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct Opts {
    /// Species file merged over the built-in table.
    #[arg(long, env = SPECIES_ENV)]
    pub species: Option<PathBuf>,
    /// Built-in scheme key or path to a scheme file.
    #[arg(long)]
    pub scheme: Option<String>,
    /// `SPECIES/LABEL`, or `LABEL` when `--scheme` names the species.
    #[arg(long)]
    pub level: Option<String>,
    /// Lower field bound, G.
    #[arg(long, allow_negative_numbers = true)]
    pub b_lo: Option<f64>,
    /// Upper field bound, G.
    #[arg(long, allow_negative_numbers = true)]
    pub b_hi: Option<f64>,
    /// Grid points (scan points for `fip`).
    #[arg(long)]
    pub steps: Option<usize>,
    /// Trap geometry `A,eps,alpha,beta` (V/m², -, rad, rad).
    #[arg(long, allow_hyphen_values = true)]
    pub geom: Option<String>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write to this file instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Ignore unknown keys in input files.
    #[arg(long)]
    pub lax: bool,
    /// Report fields in tesla.
    #[arg(long)]
    pub tesla: bool,
    /// Geometries used by `verify`; the first is `--geom`, the rest are random.
    #[arg(long, default_value_t = 1)]
    pub geom_samples: usize,
    /// Add a metadata object to JSON output.
    #[arg(long)]
    pub stamp: bool,
}

/// Failure of a command, mapped onto the process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Usage, file or input-data problem. Exit code 2.
    Config(String),
    /// The physics has no answer for this input. Exit code 3.
    Domain(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Domain(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Domain(m) => write!(f, "error: {m}"),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        if e.is_config() {
            CliError::Config(e.to_string())
        } else {
            CliError::Domain(e.to_string())
        }
    }
}

fn config(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

/// Rendered output and whether every verification check passed.
#[derive(Debug)]
pub struct Output {
    pub text: String,
    pub all_passed: bool,
}

impl Output {
    fn ok(text: String) -> Self {
        Self { text, all_passed: true }
    }

    /// 0 on success, 1 when a verification check failed.
    pub fn exit_code(&self) -> i32 {
        if self.all_passed {
            0
        } else {
            1
        }
    }
}

/// Runs one command and renders its output without writing it anywhere.
pub fn run(cli: &Cli) -> Result<Output, CliError> {
    match &cli.command {
        Command::Spectrum(o) => spectrum(o),
        Command::Curve(o) => curve(o),
        Command::Verify(o) => verify(o),
        Command::Fip(o) => fip(o),
    }
}

/// Writes rendered output to `--out` or standard output.
pub fn emit(cli: &Cli, out: &Output) -> Result<(), CliError> {
    let opts = match &cli.command {
        Command::Spectrum(o) | Command::Curve(o) | Command::Verify(o) | Command::Fip(o) => o,
    };
    match &opts.out {
        Some(path) => std::fs::write(path, &out.text)
            .map_err(|e| config(format!("cannot write {}: {e}", path.display()))),
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(out.text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| config(format!("cannot write to standard output: {e}")))
        }
    }
}

impl Opts {
    fn strictness(&self) -> Strictness {
        if self.lax {
            Strictness::Lax
        } else {
            Strictness::Strict
        }
    }

    fn database(&self) -> Result<SpeciesDb, CliError> {
        Ok(match &self.species {
            Some(path) => load_species_with(path, self.strictness())?,
            None => SpeciesDb::builtin(),
        })
    }

    /// `(lo, hi, steps)` with per-command defaults filled in and validated.
    fn range(&self, defaults: (f64, f64, usize)) -> Result<(f64, f64, usize), CliError> {
        let lo = self.b_lo.unwrap_or(defaults.0);
        let hi = self.b_hi.unwrap_or(defaults.1);
        let steps = self.steps.unwrap_or(defaults.2);
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(config("field bounds must be finite"));
        }
        if lo < 0.0 {
            return Err(config(format!("--b-lo must be ≥ 0, got {lo}")));
        }
        if lo >= hi {
            return Err(config(format!("--b-lo ({lo}) must be below --b-hi ({hi})")));
        }
        if steps < 2 {
            return Err(config(format!("--steps must be at least 2, got {steps}")));
        }
        Ok((lo, hi, steps))
    }

    fn grid(&self, defaults: (f64, f64, usize)) -> Result<Vec<f64>, CliError> {
        let (lo, hi, n) = self.range(defaults)?;
        Ok((0..n)
            .map(|k| if k + 1 == n { hi } else { lo + (hi - lo) * k as f64 / (n - 1) as f64 })
            .collect())
    }

    fn geometry(&self) -> Result<TrapGeometry<f64>, CliError> {
        let [a, e, al, be] = match &self.geom {
            None => DEFAULT_GEOMETRY,
            Some(text) => {
                let parts: Vec<f64> = text
                    .split(',')
                    .map(|p| p.trim().parse::<f64>())
                    .collect::<Result<_, _>>()
                    .map_err(|_| config(format!("--geom expects four numbers A,eps,alpha,beta, got `{text}`")))?;
                <[f64; 4]>::try_from(parts)
                    .map_err(|_| config(format!("--geom expects four numbers A,eps,alpha,beta, got `{text}`")))?
            }
        };
        Ok(TrapGeometry::new(a, e, al, be)?)
    }

    fn format(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }

    fn field_unit(&self) -> (&'static str, f64) {
        if self.tesla {
            ("tesla", 1.0 / GAUSS_PER_TESLA)
        } else {
            ("gauss", 1.0)
        }
    }

    fn field_column(&self) -> &'static str {
        if self.tesla {
            "B_tesla"
        } else {
            "B_gauss"
        }
    }
}

/// Schemes named by `--scheme`: a built-in key, or every scheme in a file.
/// Species defined in a scheme file shadow the loaded table.
fn schemes(opts: &Opts, db: SpeciesDb) -> Result<(Vec<AveragingScheme>, SpeciesDb), CliError> {
    let Some(arg) = &opts.scheme else {
        let all = BUILTIN_SCHEMES.iter().map(|k| builtin_scheme(k)).collect::<Result<_, _>>()?;
        return Ok((all, db));
    };
    if BUILTIN_SCHEMES.contains(&arg.as_str()) {
        return Ok((vec![builtin_scheme(arg)?], db));
    }
    let path = Path::new(arg);
    if !path.exists() {
        return Err(config(format!(
            "`{arg}` is neither a built-in scheme ({}) nor a file",
            BUILTIN_SCHEMES.join(", ")
        )));
    }
    let doc = load_document(path, opts.strictness())?;
    if doc.schemes.is_empty() {
        return Err(config(format!("{arg} defines no schemes")));
    }
    Ok((doc.schemes, doc.species.merged_over(db)))
}

fn single_scheme(opts: &Opts, db: SpeciesDb) -> Result<(AveragingScheme, SpeciesDb), CliError> {
    if opts.scheme.is_none() {
        return Err(config("--scheme is required"));
    }
    let (mut list, db) = schemes(opts, db)?;
    if list.len() != 1 {
        let names: Vec<_> = list.iter().map(|s| s.name.as_str()).collect();
        return Err(config(format!("scheme file holds several schemes ({})", names.join(", "))));
    }
    Ok((list.remove(0), db))
}

fn num(x: f64) -> String {
    format!("{x:?}")
}

fn csv_text(header: &[String], rows: &[Vec<f64>]) -> Result<String, CliError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_writer(Vec::new());
    let io = |e: csv::Error| config(format!("csv output: {e}"));
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.write_record(row.iter().map(|&x| num(x))).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| config(format!("csv output: {e}")))?;
    String::from_utf8(bytes).map_err(|e| config(format!("csv output: {e}")))
}

fn stamp(opts: &Opts, mut doc: Value) -> Value {
    if opts.stamp {
        let unix = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        doc["meta"] = json!({
            "tool": "hfavg",
            "version": env!("CARGO_PKG_VERSION"),
            "generated_unix": unix,
        });
    }
    doc
}

fn json_text(doc: &Value) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("JSON values serialize");
    s.push('\n');
    s
}

fn table(opts: &Opts, header: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Output, CliError> {
    match opts.format(Format::Csv) {
        Format::Csv => {
            if opts.stamp {
                return Err(config("--stamp applies to JSON output only"));
            }
            Ok(Output::ok(csv_text(&header, &rows)?))
        }
        Format::Json => {
            let doc = stamp(opts, json!({ "columns": header, "rows": rows }));
            Ok(Output::ok(json_text(&doc)))
        }
    }
}

fn require_json(opts: &Opts) -> Result<(), CliError> {
    match opts.format(Format::Json) {
        Format::Json => Ok(()),
        Format::Csv => Err(config("this command writes JSON only")),
    }
}

fn find_level<'a>(opts: &Opts, db: &'a SpeciesDb) -> Result<&'a LevelSpec, CliError> {
    let arg = opts.level.as_deref().ok_or_else(|| config("--level is required"))?;
    if let Some((species, label)) = arg.split_once('/') {
        return Ok(db.level(species, label)?);
    }
    let species = match &opts.scheme {
        Some(key) if BUILTIN_SCHEMES.contains(&key.as_str()) => builtin_scheme(key)?.species,
        Some(_) => {
            return Err(config("use --level SPECIES/LABEL together with a scheme file"));
        }
        None => {
            return Err(config(format!("--level `{arg}` needs a species: write SPECIES/{arg}")));
        }
    };
    Ok(db.level(&species, arg)?)
}

fn spectrum(opts: &Opts) -> Result<Output, CliError> {
    let db = opts.database()?;
    let level = find_level(opts, &db)?;
    let grid = opts.grid((0.0, 1.0, 11))?;
    let f_max = level.f_values().next_back().expect("at least one F");
    let templates = f_max
        .projections()
        .map(|mf| BlockTemplate::<f64>::new(level, mf))
        .collect::<Result<Vec<_>, _>>()?;

    // columns ordered by F, then mF
    let mut columns: Vec<(u32, i32)> = level
        .f_values()
        .flat_map(|f| f.projections().map(move |m| (f.twice(), m.twice())))
        .collect();
    columns.sort();

    let (_, scale) = opts.field_unit();
    let mut header = vec![opts.field_column().to_owned()];
    header.extend(columns.iter().map(|(f, m)| format!("{}_F{f}_mF{m}", level.label)));
    let mut rows = Vec::with_capacity(grid.len());
    for &b in &grid {
        let mut energies = std::collections::BTreeMap::new();
        for t in &templates {
            for s in t.at(b)?.eigenstates() {
                energies.insert((s.f_label.twice(), s.mf.twice()), s.energy);
            }
        }
        let mut row = vec![b * scale];
        row.extend(columns.iter().map(|k| energies[k]));
        rows.push(row);
    }
    table(opts, header, rows)
}

fn curve(opts: &Opts) -> Result<Output, CliError> {
    let (scheme, db) = single_scheme(opts, opts.database()?)?;
    let resolved = scheme.resolve(&db)?;
    let prepared = resolved.prepare::<f64>()?;
    let grid = opts.grid((0.0, 8000.0, 81))?;
    let (_, scale) = opts.field_unit();

    let mut header = vec![opts.field_column().to_owned()];
    header.extend(resolved.components.iter().map(|c| c.id.clone()));
    header.push("avg".to_owned());
    let mut rows = Vec::with_capacity(grid.len());
    for &b in &grid {
        let mut row = vec![b * scale];
        row.extend(prepared.component_shifts_with_fs(b)?);
        row.push(prepared.shift_with_fs(b)?);
        rows.push(row);
    }
    table(opts, header, rows)
}

fn geometries(opts: &Opts) -> Result<Vec<TrapGeometry<f64>>, CliError> {
    if opts.geom_samples == 0 {
        return Err(config("--geom-samples must be at least 1"));
    }
    let first = opts.geometry()?;
    let mut rng = ChaCha8Rng::seed_from_u64(GEOMETRY_SEED);
    let mut out = vec![first];
    while out.len() < opts.geom_samples {
        let g = TrapGeometry::new(
            first.a_grad * rng.gen_range(0.1..10.0),
            rng.gen_range(-1.0..=1.0),
            rng.gen_range(0.0..std::f64::consts::TAU),
            rng.gen_range(0.0..std::f64::consts::PI),
        )?;
        out.push(g);
    }
    Ok(out)
}

fn verify(opts: &Opts) -> Result<Output, CliError> {
    require_json(opts)?;
    let (list, db) = schemes(opts, opts.database()?)?;
    let grid = opts.grid((0.0, 1.0e4, 11))?;
    let geoms = geometries(opts)?;

    let mut checks = Vec::new();
    let mut reports = Vec::new();
    let mut all_passed = true;
    for scheme in &list {
        let resolved = scheme.resolve(&db)?;
        let report = verify_scheme(&resolved, &geoms, &grid)?;
        all_passed &= report.all_passed();
        for c in &report.checks {
            let mut v = serde_json::to_value(c).expect("checks serialize");
            v["scheme"] = json!(scheme.name);
            checks.push(v);
        }
        reports.push(json!({
            "scheme": scheme.name,
            "components": report.component_ids,
            "completeness": report.completeness,
            "linear_slope_hz_per_gauss": report.linear_slope,
            "expected_slope_hz_per_gauss": report.expected_slope,
            "quadrupole_residual_hz": report.quadrupole_residual,
            "sum_rule_evaluations": report.sum_rule_evaluations,
        }));
    }
    let doc = stamp(
        opts,
        json!({
            "checks": checks,
            "schemes": reports,
            "geometry_samples": geoms.len(),
            "all_passed": all_passed,
        }),
    );
    Ok(Output {
        text: json_text(&doc),
        all_passed,
    })
}

/// The excited level carrying the fine-structure data.
fn fs_level<'a>(resolved: &ResolvedScheme<'a>) -> Result<&'a LevelSpec, CliError> {
    let level = resolved.components[0].transition.excited.level;
    if resolved
        .components
        .iter()
        .any(|c| c.transition.excited.level.label != level.label)
    {
        return Err(CliError::Domain(
            "field-independent point needs a single excited level".into(),
        ));
    }
    Ok(level)
}

fn point_json(p: &FieldIndependentPoint, opts: &Opts) -> Value {
    let (_, scale) = opts.field_unit();
    // slopes per field unit: Hz/G becomes Hz/T
    let per = 1.0 / scale;
    json!({
        "b_star": p.b_star * scale,
        "curvature": p.curvature * per * per,
        "component_slopes": p.component_slopes.iter().map(|(id, s)| json!({"id": id, "slope": s * per})).collect::<Vec<_>>(),
        "residual_slope": p.residual_slope.abs() * per,
        "bracket": [p.bracket.0 * scale, p.bracket.1 * scale],
    })
}

fn fip(opts: &Opts) -> Result<Output, CliError> {
    require_json(opts)?;
    let (scheme, db) = single_scheme(opts, opts.database()?)?;
    let resolved = scheme.resolve(&db)?;
    let level = fs_level(&resolved)?;
    let analytic = analytic_fip(&resolved, level)?;
    let (lo, hi, steps) = opts.range((1.0, 8000.0, 33))?;

    let numeric = if scheme.delta_m == Projection::ZERO {
        None
    } else {
        let options = FipOptions {
            scan_points: steps,
            ..FipOptions::default()
        };
        // the search needs a strictly positive lower bound
        let lo = if lo > 0.0 { lo } else { hi * 1e-6 };
        Some(find_fip(&resolved, lo, hi, options)?)
    };

    let (unit, scale) = opts.field_unit();
    let slope_unit = if opts.tesla { "Hz/T" } else { "Hz/G" };
    let doc = stamp(
        opts,
        json!({
            "scheme": scheme.name,
            "field_unit": unit,
            "slope_unit": slope_unit,
            "analytic_b_star": analytic.b_star * scale,
            "numeric_b_star": numeric.as_ref().map(|p| p.b_star * scale),
            "difference": numeric.as_ref().map(|p| (p.b_star - analytic.b_star) * scale),
            "analytic": point_json(&analytic, opts),
            "numeric": numeric.as_ref().map(|p| point_json(p, opts)),
        }),
    );
    Ok(Output::ok(json_text(&doc)))
}
