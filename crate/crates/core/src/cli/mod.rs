//! Command-line front end: `ingest-check`, `lifetable`, `ph`, `gompertz`, `synth`.
//!
//! Data files go to `--out`; short summaries go to stdout and diagnostics to
//! stderr. Exit codes: 0 success, 1 input error, 2 numerical failure,
//! 3 partial output (interior seasons skipped).

mod output;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

pub use output::{Artifact, Cell, Format};

use crate::age::AgeGrid;
use crate::gompertz::{
    equivalence_table, fit_gompertz, format_coefficients, format_rate_per_100k, GompertzCoefficients, GompertzData,
    GompertzError, SeasonalFit,
};
use crate::graduate::{assemble_surface, SurfaceBuild};
use crate::hazard::{estimate_ph_by_year, estimate_ph_pooled, ratio_matrix, season_pairs, HazardError, Pairing};
use crate::ingest::{parse_deaths, parse_exposures, IngestError};
use crate::lifetable::{build_life_table, death_rates, e0_series, seasonal_gap, AxConvention, LifeTableError, RADIX};
use crate::season::{Pseudoseason, SeasonKind, Sex};
use crate::synth::{generate, Scenario, SynthError, DEATHS_FILE, EXPOSURES_FILE};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_PARTIAL: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "pseudoseason", version, about = "Pseudoseasonal life tables, proportional hazards and Gompertz equivalent ages")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse the inputs and report pseudoseason coverage.
    IngestCheck(InputArgs),
    /// Life tables per (season, sex), the e(0) series and the summer-winter gap series.
    Lifetable(LifetableArgs),
    /// Winter:summer proportional hazards by year and pooled, plus the ratio matrix.
    Ph(PhArgs),
    /// Gompertz fits by Poisson regression and the equivalent-age table.
    Gompertz(GompertzArgs),
    /// Write a synthetic deaths/exposures pair from a scenario file.
    Synth(SynthArgs),
}

#[derive(Args, Debug)]
pub struct InputArgs {
    #[arg(long, value_name = "PATH")]
    pub deaths: PathBuf,
    #[arg(long, value_name = "PATH")]
    pub exposures: PathBuf,
}

#[derive(Args, Debug)]
pub struct OutputArgs {
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum SexArg {
    #[value(name = "F")]
    F,
    #[value(name = "M")]
    M,
    #[default]
    #[value(name = "both")]
    Both,
}

impl SexArg {
    fn sexes(self) -> Vec<Sex> {
        match self {
            SexArg::F => vec![Sex::Female],
            SexArg::M => vec![Sex::Male],
            SexArg::Both => Sex::ALL.to_vec(),
        }
    }

    fn name(self) -> &'static str {
        match self {
            SexArg::F => "F",
            SexArg::M => "M",
            SexArg::Both => "both",
        }
    }
}

#[derive(Args, Debug)]
pub struct LifetableArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Separation factors for closed intervals.
    #[arg(long, default_value = "cd", value_parser = ["midpoint", "cd"])]
    pub ax: String,
    #[arg(long, value_enum, default_value_t)]
    pub sex: SexArg,
    /// Only write tables for seasons with this label year.
    #[arg(long)]
    pub year: Option<i32>,
}

#[derive(Args, Debug)]
pub struct PhArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[arg(long, default_value_t = crate::hazard::DEFAULT_AGE_FLOOR)]
    pub age_floor: u32,
    #[arg(long, default_value = "prev-summer", value_parser = ["prev-summer", "next-summer"])]
    pub pairing: String,
    #[arg(long, value_enum, default_value_t)]
    pub sex: SexArg,
}

#[derive(Args, Debug)]
pub struct GompertzArgs {
    #[arg(long, value_name = "PATH", required_unless_present = "coefficients_from_file")]
    pub deaths: Option<PathBuf>,
    #[arg(long, value_name = "PATH", required_unless_present = "coefficients_from_file")]
    pub exposures: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
    #[arg(long, default_value_t = crate::gompertz::DEFAULT_FIT_FLOOR)]
    pub age_floor: u32,
    #[arg(long, value_enum, default_value_t)]
    pub sex: SexArg,
    /// Season to fit, e.g. `summer-2010` or `winter-2009`; repeatable.
    #[arg(long = "season", value_name = "SEASON", required_unless_present = "coefficients_from_file")]
    pub seasons: Vec<Pseudoseason>,
    /// Ages for the equivalent-age table.
    #[arg(long, value_delimiter = ',', default_value = "50,60,70,80,90")]
    pub ages: Vec<f64>,
    /// Build the equivalence table from `sex,season,alpha,beta` rows instead of fitting.
    #[arg(long, value_name = "PATH", conflicts_with_all = ["deaths", "exposures", "seasons"])]
    pub coefficients_from_file: Option<PathBuf>,
    /// Rounded, published-table style formatting.
    #[arg(long)]
    pub display: bool,
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    /// Scenario file (`key = value` lines); defaults apply when omitted.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
    /// Override the scenario seed.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

impl From<IngestError> for CliError {
    fn from(e: IngestError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<SynthError> for CliError {
    fn from(e: SynthError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<LifeTableError> for CliError {
    fn from(e: LifeTableError) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl From<HazardError> for CliError {
    fn from(e: HazardError) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl From<GompertzError> for CliError {
    fn from(e: GompertzError) -> Self {
        CliError::Numerical(e.to_string())
    }
}

/// Summer and winter coefficients for one sex.
pub type SeasonPairCoefficients = (Option<GompertzCoefficients>, Option<GompertzCoefficients>);

/// What a successful command produced.
#[derive(Debug, Default)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub partial: bool,
}

/// Parse `args` (including the program name) and run, returning the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{text}");
                    EXIT_INPUT
                }
            };
        }
    };
    match execute(&cli.command, stdout, stderr) {
        Ok(outcome) if outcome.partial => EXIT_PARTIAL,
        Ok(_) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(command: &Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<Outcome, CliError> {
    match command {
        Command::IngestCheck(args) => cmd_ingest_check(args, stdout, stderr),
        Command::Lifetable(args) => cmd_lifetable(args, stdout, stderr),
        Command::Ph(args) => cmd_ph(args, stdout, stderr),
        Command::Gompertz(args) => cmd_gompertz(args, stdout, stderr),
        Command::Synth(args) => cmd_synth(args, stdout),
    }
}

fn check_input(path: &Path, what: &str) -> Result<(), CliError> {
    if path.is_file() {
        Ok(())
    } else {
        Err(CliError::Input(format!("{what} file {} does not exist", path.display())))
    }
}

fn prepare_out(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Input(format!("cannot create {}: {e}", dir.display())))
}

fn load(input: &InputArgs, stderr: &mut dyn Write) -> Result<SurfaceBuild, CliError> {
    let deaths = parse_deaths(&input.deaths)?;
    let exposures = parse_exposures(&input.exposures)?;
    let build = assemble_surface(&deaths, &exposures);
    for season in &build.discarded_partial {
        let _ = writeln!(stderr, "note: {season} is only partly inside {}..{}; its months are discarded", build.first_month, build.last_month);
    }
    for s in &build.skipped {
        let _ = writeln!(stderr, "warning: skipping {} {}: {}", s.season, s.sex, s.reason);
    }
    if build.surface.is_empty() {
        return Err(CliError::Input(format!(
            "no complete pseudoseason in {}..{}",
            build.first_month, build.last_month
        )));
    }
    Ok(build)
}

fn meta(command: &str, inputs: Value, flags: Value) -> Value {
    json!({
        "tool": "pseudoseason",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "inputs": inputs,
        "flags": flags,
    })
}

fn input_meta(input: &InputArgs) -> Value {
    json!({"deaths": input.deaths.display().to_string(), "exposures": input.exposures.display().to_string()})
}

fn write_artifact(a: &Artifact, out: &OutputArgs, meta: &Value, outcome: &mut Outcome) -> Result<(), CliError> {
    let path = a
        .write(&out.out, out.format, meta)
        .map_err(|e| CliError::Input(format!("cannot write {} into {}: {e}", a.name, out.out.display())))?;
    outcome.files.push(path);
    Ok(())
}

fn cmd_ingest_check(args: &InputArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<Outcome, CliError> {
    check_input(&args.deaths, "deaths")?;
    check_input(&args.exposures, "exposures")?;
    let build = load(args, stderr)?;
    let s = &build.surface;
    let list = |v: Vec<String>| if v.is_empty() { "none".to_string() } else { v.join(", ") };
    let _ = writeln!(stdout, "span: {}..{}", build.first_month, build.last_month);
    let _ = writeln!(stdout, "sexes: {}", list(s.sexes().iter().map(|x| x.to_string()).collect()));
    let _ = writeln!(stdout, "complete summers: {}", s.seasons_of(SeasonKind::Summer).len());
    let _ = writeln!(stdout, "complete winters: {}", s.seasons_of(SeasonKind::Winter).len());
    if let (Some(first), Some(last)) = (s.seasons().first(), s.seasons().last()) {
        let _ = writeln!(stdout, "first season: {first}");
        let _ = writeln!(stdout, "last season: {last}");
    }
    let _ = writeln!(stdout, "discarded partial seasons: {}", list(build.discarded_partial.iter().map(|x| x.to_string()).collect()));
    let _ = writeln!(
        stdout,
        "skipped seasons: {}",
        list(build.skipped.iter().map(|x| format!("{} {}", x.season, x.sex)).collect())
    );
    Ok(Outcome { files: Vec::new(), partial: !build.skipped.is_empty() })
}

fn life_table_artifact(name: String, table: &crate::lifetable::LifeTable) -> Artifact {
    let mut a = Artifact::new(
        name,
        vec![
            "age_group",
            "age_lower_years",
            "width_years",
            "mx_per_person_year",
            "ax_years",
            "qx",
            "lx_survivors",
            "dx_deaths",
            "Lx_person_years",
            "Tx_person_years",
            "ex_years",
        ],
    );
    for r in &table.rows {
        a.push(vec![
            r.group.label().into(),
            r.group.lower().into(),
            r.group.width().map_or(Cell::Empty, Cell::from),
            r.mx.into(),
            r.ax.into(),
            r.qx.into(),
            r.lx.into(),
            r.dx.into(),
            r.person_years.into(),
            r.remaining.into(),
            r.ex.into(),
        ]);
    }
    a
}

pub fn cmd_lifetable(args: &LifetableArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<Outcome, CliError> {
    check_input(&args.input.deaths, "deaths")?;
    check_input(&args.input.exposures, "exposures")?;
    prepare_out(&args.output.out)?;
    let ax: AxConvention = args.ax.parse().map_err(CliError::Input)?;
    let build = load(&args.input, stderr)?;
    let surface = &build.surface;
    let sexes = args.sex.sexes();
    let meta = meta(
        "lifetable",
        input_meta(&args.input),
        json!({"ax": ax.name(), "sex": args.sex.name(), "year": args.year, "radix": RADIX}),
    );

    let mut outcome = Outcome { partial: !build.skipped.is_empty(), ..Default::default() };
    for (season, sex, _) in surface.iter() {
        if !sexes.contains(&sex) || args.year.is_some_and(|y| y != season.label_year) {
            continue;
        }
        let table = build_life_table(&death_rates(surface, season, sex)?, ax)?;
        if table.capped {
            let _ = writeln!(stderr, "warning: {season} {sex}: qx capped at 1; survivorship ends early");
        }
        write_artifact(&life_table_artifact(format!("lifetable_{season}_{sex}"), &table), &args.output, &meta, &mut outcome)?;
    }

    let series: Vec<_> = e0_series(surface, ax)?.into_iter().filter(|p| sexes.contains(&p.sex)).collect();
    let mut e0 = Artifact::new("e0_series", vec!["season", "kind", "label_year", "sex", "e0_years"]);
    for p in &series {
        e0.push(vec![p.season.to_string().into(), p.season.kind.name().into(), p.season.label_year.into(), p.sex.code().into(), p.e0.into()]);
    }
    write_artifact(&e0, &args.output, &meta, &mut outcome)?;

    let gaps = seasonal_gap(&series);
    let mut gap = Artifact::new(
        "gap_series",
        vec!["sex", "summer", "winter", "gap_years", "sex_mean_gap_years", "sex_sd_gap_years"],
    );
    for p in &gaps.points {
        let summary = gaps.summaries.iter().find(|s| s.sex == p.sex).expect("summary per sex");
        gap.push(vec![
            p.sex.code().into(),
            p.summer.to_string().into(),
            p.winter.to_string().into(),
            p.gap.into(),
            summary.mean.into(),
            summary.sd.into(),
        ]);
    }
    write_artifact(&gap, &args.output, &meta, &mut outcome)?;

    for s in &gaps.summaries {
        let _ = writeln!(stdout, "{} summer-winter e0 gap: {:.3} +/- {:.3} years over {} pairs", s.sex, s.mean, s.sd, s.n);
    }
    let _ = writeln!(stdout, "wrote {} files to {}", outcome.files.len(), args.output.out.display());
    Ok(outcome)
}

pub fn cmd_ph(args: &PhArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<Outcome, CliError> {
    check_input(&args.input.deaths, "deaths")?;
    check_input(&args.input.exposures, "exposures")?;
    prepare_out(&args.output.out)?;
    let pairing: Pairing = args.pairing.parse().map_err(CliError::Input)?;
    let build = load(&args.input, stderr)?;
    let surface = &build.surface;
    let n_ages = AgeGrid.at_or_above(args.age_floor).count();
    let meta = meta(
        "ph",
        input_meta(&args.input),
        json!({"age_floor": args.age_floor, "n_ages": n_ages, "pairing": pairing.name(), "sex": args.sex.name()}),
    );

    let mut by_year = Artifact::new("ph_by_year", vec!["sex", "winter", "summer", "p_ratio", "r2", "n_ages", "age_floor_years"]);
    let mut pooled = Artifact::new("ph_pooled", vec!["sex", "p_ratio", "r2", "n_ages", "n_cells", "n_pairs", "age_floor_years"]);
    let mut matrix = Artifact::new("ratio_matrix", vec!["sex", "year", "summer_year", "age_lower_years", "ratio", "flag"]);
    for sex in args.sex.sexes() {
        if season_pairs(surface, sex, pairing).is_empty() {
            let _ = writeln!(stderr, "note: no winter/summer pairs for {sex}");
            continue;
        }
        for y in estimate_ph_by_year(surface, sex, args.age_floor, pairing)? {
            by_year.push(vec![
                sex.code().into(),
                y.pair.winter.to_string().into(),
                y.pair.summer.to_string().into(),
                y.estimate.p.into(),
                y.estimate.r2.into(),
                y.estimate.n_ages.into(),
                args.age_floor.into(),
            ]);
        }
        let p = estimate_ph_pooled(surface, sex, args.age_floor, pairing)?;
        let n_pairs = season_pairs(surface, sex, pairing).len();
        pooled.push(vec![
            sex.code().into(),
            p.p.into(),
            p.r2.into(),
            p.n_ages.into(),
            p.n_cells.into(),
            n_pairs.into(),
            args.age_floor.into(),
        ]);
        let _ = writeln!(stdout, "{sex} pooled P = {:.4} (R2 {:.3}, {} pairs, {} ages)", p.p, p.r2, n_pairs, p.n_ages);

        let m = ratio_matrix(surface, sex, pairing)?;
        if m.flagged() > 0 {
            let _ = writeln!(stderr, "note: {sex} ratio matrix has {} flagged cells", m.flagged());
        }
        for row in &m.rows {
            for (g, cell) in AgeGrid.groups().zip(&row.cells) {
                matrix.push(vec![
                    sex.code().into(),
                    row.pair.winter.label_year.into(),
                    row.pair.summer.label_year.into(),
                    g.lower().into(),
                    cell.ratio.into(),
                    cell.flag.name().into(),
                ]);
            }
        }
    }
    let mut outcome = Outcome { partial: !build.skipped.is_empty(), ..Default::default() };
    for a in [&by_year, &pooled, &matrix] {
        write_artifact(a, &args.output, &meta, &mut outcome)?;
    }
    Ok(outcome)
}

/// Read `sex,season,alpha,beta` rows; `season` is `summer`, `winter` or a full id.
pub fn parse_coefficients(text: &str) -> Result<BTreeMap<Sex, SeasonPairCoefficients>, CliError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, h)) if h.trim() == "sex,season,alpha,beta" => {}
        _ => return Err(CliError::Input("coefficients file must start with `sex,season,alpha,beta`".into())),
    }
    let mut out: BTreeMap<Sex, SeasonPairCoefficients> = BTreeMap::new();
    for (i, line) in lines {
        let bad = |why: &str| CliError::Input(format!("coefficients line {}: {why}", i + 1));
        let f: Vec<&str> = line.split(',').map(str::trim).collect();
        if f.len() != 4 {
            return Err(bad("expected 4 fields"));
        }
        let sex = Sex::from_code(f[0]).ok_or_else(|| bad("sex must be F or M"))?;
        let kind = match f[1] {
            "summer" => SeasonKind::Summer,
            "winter" => SeasonKind::Winter,
            other => other.parse::<Pseudoseason>().map_err(|e| bad(&e.to_string()))?.kind,
        };
        let alpha: f64 = f[2].parse().map_err(|_| bad("bad alpha"))?;
        let beta: f64 = f[3].parse().map_err(|_| bad("bad beta"))?;
        let entry = out.entry(sex).or_default();
        let slot = if kind == SeasonKind::Summer { &mut entry.0 } else { &mut entry.1 };
        if slot.is_some() {
            return Err(bad("duplicate sex/season"));
        }
        *slot = Some(GompertzCoefficients::new(alpha, beta));
    }
    Ok(out)
}

fn equivalence_artifact(sex: Sex, summer: &GompertzCoefficients, winter: &GompertzCoefficients, ages: &[f64], display: bool) -> Result<Artifact, CliError> {
    let rows = equivalence_table(summer, winter, ages)?;
    let mut a = Artifact::new(
        format!("equivalence_{sex}"),
        vec!["age_years", "mx_summer_per_100k", "wea_years", "mx_winter_per_100k", "sea_years"],
    );
    for r in rows {
        a.push(if display {
            vec![
                format!("{}", r.age).into(),
                format_rate_per_100k(r.mx_summer).into(),
                format!("{:.2}", r.winter_equivalent_age).into(),
                format_rate_per_100k(r.mx_winter).into(),
                format!("{:.2}", r.summer_equivalent_age).into(),
            ]
        } else {
            vec![
                r.age.into(),
                (r.mx_summer * 1e5).into(),
                r.winter_equivalent_age.into(),
                (r.mx_winter * 1e5).into(),
                r.summer_equivalent_age.into(),
            ]
        });
    }
    Ok(a)
}

fn render_table(stdout: &mut dyn Write, sex: Sex, summer: &GompertzCoefficients, winter: &GompertzCoefficients, ages: &[f64]) -> Result<(), CliError> {
    let (sa, sb) = format_coefficients(summer);
    let (wa, wb) = format_coefficients(winter);
    let _ = writeln!(stdout, "{sex}: summer alpha={sa} beta={sb}; winter alpha={wa} beta={wb}");
    let _ = writeln!(stdout, "{:>5} {:>11} {:>7} {:>11} {:>7}", "age", "Mx summer", "w.e.a.", "Mx winter", "s.e.a.");
    for r in equivalence_table(summer, winter, ages)? {
        let _ = writeln!(
            stdout,
            "{:>5} {:>11} {:>7.2} {:>11} {:>7.2}",
            r.age,
            format_rate_per_100k(r.mx_summer),
            r.winter_equivalent_age,
            format_rate_per_100k(r.mx_winter),
            r.summer_equivalent_age
        );
    }
    Ok(())
}

pub fn cmd_gompertz(args: &GompertzArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<Outcome, CliError> {
    let sexes = args.sex.sexes();
    let mut fits_art = Artifact::new(
        "gompertz_fits",
        vec![
            "season",
            "sex",
            "alpha_log_per_person_year",
            "beta_per_year_of_age",
            "alpha_display",
            "beta_display",
            "deviance",
            "iterations",
            "converged",
            "gradient_norm",
            "n_groups",
            "age_floor_years",
        ],
    );
    // (summer, winter) per sex for the equivalence tables
    let mut pairs: BTreeMap<Sex, SeasonPairCoefficients> = BTreeMap::new();
    let meta_value;

    if let Some(path) = &args.coefficients_from_file {
        check_input(path, "coefficients")?;
        prepare_out(&args.output.out)?;
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
        pairs = parse_coefficients(&text)?;
        pairs.retain(|s, _| sexes.contains(s));
        for (&sex, (summer, winter)) in &pairs {
            for (kind, c) in [(SeasonKind::Summer, summer), (SeasonKind::Winter, winter)] {
                if let Some(c) = c {
                    let (ad, bd) = format_coefficients(c);
                    fits_art.push(vec![
                        kind.name().into(),
                        sex.code().into(),
                        c.alpha.into(),
                        c.beta.into(),
                        ad.into(),
                        bd.into(),
                        Cell::Empty,
                        Cell::Empty,
                        Cell::Empty,
                        Cell::Empty,
                        Cell::Empty,
                        Cell::Empty,
                    ]);
                }
            }
        }
        meta_value = meta(
            "gompertz",
            json!({"coefficients": path.display().to_string()}),
            json!({"sex": args.sex.name(), "ages": args.ages, "display": args.display}),
        );
    } else {
        let input = InputArgs {
            deaths: args.deaths.clone().expect("required by clap"),
            exposures: args.exposures.clone().expect("required by clap"),
        };
        check_input(&input.deaths, "deaths")?;
        check_input(&input.exposures, "exposures")?;
        prepare_out(&args.output.out)?;
        let build = load(&input, stderr)?;
        let surface = &build.surface;

        let mut fits = Vec::new();
        for &season in &args.seasons {
            for &sex in &sexes {
                let slice = surface
                    .get(season, sex)
                    .map_err(|_| CliError::Input(format!("{season} {sex} is not a complete season in the input")))?;
                let data = GompertzData::from_groups(&slice.deaths, &slice.exposure, args.age_floor)?;
                let fit = fit_gompertz(&data).map_err(|e| CliError::Numerical(format!("{season} {sex}: {e}")))?;
                fits.push(SeasonalFit { season, sex, age_floor: args.age_floor, fit });
            }
        }
        let summers: Vec<_> = args.seasons.iter().filter(|s| s.kind == SeasonKind::Summer).collect();
        let winters: Vec<_> = args.seasons.iter().filter(|s| s.kind == SeasonKind::Winter).collect();
        for f in &fits {
            let c = f.fit.coefficients;
            let (ad, bd) = format_coefficients(&c);
            fits_art.push(vec![
                f.season.to_string().into(),
                f.sex.code().into(),
                c.alpha.into(),
                c.beta.into(),
                ad.into(),
                bd.into(),
                f.fit.deviance.into(),
                f.fit.iterations.into(),
                f.fit.converged.into(),
                f.fit.gradient_norm.into(),
                f.fit.n_groups.into(),
                f.age_floor.into(),
            ]);
            if summers.len() == 1 && winters.len() == 1 {
                let entry = pairs.entry(f.sex).or_default();
                match f.season.kind {
                    SeasonKind::Summer => entry.0 = Some(c),
                    SeasonKind::Winter => entry.1 = Some(c),
                }
            }
        }
        if summers.len() != 1 || winters.len() != 1 {
            let _ = writeln!(stderr, "note: equivalence tables need exactly one summer and one winter --season; skipped");
        }
        meta_value = meta(
            "gompertz",
            input_meta(&input),
            json!({
                "seasons": args.seasons.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
                "sex": args.sex.name(),
                "age_floor": args.age_floor,
                "ages": args.ages,
                "display": args.display,
            }),
        );
    }

    let mut outcome = Outcome::default();
    write_artifact(&fits_art, &args.output, &meta_value, &mut outcome)?;
    for (&sex, (summer, winter)) in &pairs {
        match (summer, winter) {
            (Some(s), Some(w)) => {
                let a = equivalence_artifact(sex, s, w, &args.ages, args.display)?;
                write_artifact(&a, &args.output, &meta_value, &mut outcome)?;
                if args.display {
                    render_table(stdout, sex, s, w, &args.ages)?;
                }
            }
            _ => {
                let _ = writeln!(stderr, "note: {sex} lacks a summer or winter coefficient pair; no equivalence table");
            }
        }
    }
    let _ = writeln!(stdout, "wrote {} files to {}", outcome.files.len(), args.output.out.display());
    Ok(outcome)
}

pub fn cmd_synth(args: &SynthArgs, stdout: &mut dyn Write) -> Result<Outcome, CliError> {
    let mut scenario = match &args.config {
        Some(path) => {
            check_input(path, "scenario")?;
            Scenario::load(path)?
        }
        None => Scenario::default(),
    };
    if let Some(seed) = args.seed {
        scenario.seed = seed;
    }
    prepare_out(&args.out)?;
    let data = generate(&scenario)?;
    data.write_to(&args.out)?;
    let files = vec![args.out.join(DEATHS_FILE), args.out.join(EXPOSURES_FILE)];
    for f in &files {
        let _ = writeln!(stdout, "{}", f.display());
    }
    Ok(Outcome { files, partial: false })
}
