//! `hqr`: integral means, growth fits and verification runs from the shell.
//!
//! Exit status: 0 on success, 1 on a numerical failure (or a failed
//! criterion under `verify`), 2 on a usage error.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use hqr_core::analysis::{fit_growth_exponent, fit_holder_exponent, fit_log_power, RadiusWindow};
use hqr_core::boundary::{conjugate_signal, modulus_of_continuity};
use hqr_core::catalog::{catalog_listing, DEFAULT_M, DEFAULT_N};
use hqr_core::means::{geometric_r_grid, parse_exponent, radial_profile, PartOf};
use hqr_core::verify::{run_all, run_criterion, CriterionOutcome, DEFAULT_SEED};
use hqr_core::{
    BoundarySignal, CircleResolution, ExampleSpec, HarmonicMap, HqrError, Part, RadialProfile, Subject,
};

#[derive(Parser, Debug)]
#[command(name = "hqr", version, about = "Integral means and growth exponents of harmonic maps of the disk")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Radial profile of integral means, as `r,Mp` CSV.
    Means(Opts),
    /// Growth exponent of a profile, as a JSON fit report.
    Growth(Opts),
    /// Harmonic conjugate of a boundary signal, as `theta,value` CSV.
    Conjugate(Opts),
    /// Moduli of continuity and a Hölder fit.
    Holder(Opts),
    /// Sampled dilatation bound of a harmonic map, as JSON.
    Qr(Opts),
    /// Runs the acceptance criteria.
    Verify(VerifyOpts),
    /// Lists the catalog families.
    Catalog,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Model {
    PowerGrowth,
    LogPower,
}

#[derive(Args, Debug)]
struct Opts {
    /// Catalog address (see `hqr catalog`) or a CSV file.
    #[arg(long)]
    subject: String,
    /// Exponent of the mean: positive number, `a/b`, or `inf`.
    #[arg(long, default_value = "2")]
    p: String,
    /// Measured quantity: full, re, im or abs.
    #[arg(long, default_value = "full")]
    part: String,
    /// Radius grid r = 1 - 2^-j for j in a..b.
    #[arg(long, default_value = "1..12")]
    j: String,
    /// Fit window in the same j units; defaults to 3..j_max.
    #[arg(long)]
    window: Option<String>,
    /// Boundary samples (power of two).
    #[arg(long = "M")]
    m: Option<usize>,
    /// Truncation degree (power of two).
    #[arg(long = "N")]
    n: Option<usize>,
    /// Samples per circle (power of two); chosen per radius when omitted.
    #[arg(long)]
    circle: Option<usize>,
    #[arg(long, value_enum, default_value = "power-growth")]
    model: Model,
    /// Fit `omega / delta` against `log 1/delta` instead of `log omega` against `log delta`.
    #[arg(long)]
    log_correction: bool,
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args, Debug)]
struct VerifyOpts {
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Run a single criterion (1..10).
    #[arg(long)]
    criterion: Option<u8>,
    /// Print per-case details under each line.
    #[arg(long)]
    verbose: bool,
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

/// A bad invocation; mapped to exit status 2.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage<T>(msg: impl Into<String>) -> anyhow::Result<T> {
    Err(Usage(msg.into()).into())
}

fn parse_range(s: &str, what: &str) -> anyhow::Result<(u32, u32)> {
    let Some((a, b)) = s.split_once("..") else {
        return usage(format!("{what} must look like a..b, got `{s}`"));
    };
    match (a.trim().parse::<u32>(), b.trim().parse::<u32>()) {
        (Ok(a), Ok(b)) => Ok((a, b)),
        _ => usage(format!("{what} must look like a..b with integers, got `{s}`")),
    }
}

fn power_of_two(v: Option<usize>, what: &str) -> anyhow::Result<Option<usize>> {
    match v {
        Some(x) if x < 2 || !x.is_power_of_two() => usage(format!("{what} must be a power of two, got {x}")),
        other => Ok(other),
    }
}

/// Validated form of [`Opts`].
struct Config {
    subject: String,
    p: f64,
    part: Part,
    j: (u32, u32),
    window: (u32, u32),
    m: Option<usize>,
    n: Option<usize>,
    circle: CircleResolution,
    model: Model,
    log_correction: bool,
    output: Option<PathBuf>,
    format: Option<Format>,
}

impl Config {
    fn from_opts(o: Opts) -> anyhow::Result<Self> {
        let p = parse_exponent(&o.p).map_err(|e| Usage(e.to_string()))?;
        let part: Part = o.part.parse().map_err(|e: HqrError| Usage(e.to_string()))?;
        let j = parse_range(&o.j, "--j")?;
        if !(j.0 < j.1 && j.1 <= 14) {
            return usage(format!("--j needs j_min < j_max <= 14, got {}..{}", j.0, j.1));
        }
        let window = match &o.window {
            Some(w) => parse_range(w, "--window")?,
            None => (3.max(j.0), j.1),
        };
        if !(window.0 < window.1 && window.0 >= j.0 && window.1 <= j.1) {
            return usage(format!("--window {}..{} must lie inside --j {}..{}", window.0, window.1, j.0, j.1));
        }
        let circle = match power_of_two(o.circle, "--circle")? {
            Some(m) => CircleResolution::Fixed(m),
            None => CircleResolution::Auto,
        };
        Ok(Config {
            subject: o.subject,
            p,
            part,
            j,
            window,
            m: power_of_two(o.m, "--M")?,
            n: power_of_two(o.n, "--N")?,
            circle,
            model: o.model,
            log_correction: o.log_correction,
            output: o.output,
            format: o.format,
        })
    }

    fn r_grid(&self) -> Vec<f64> {
        geometric_r_grid(self.j.0, self.j.1)
    }

    fn fit_window(&self) -> RadiusWindow {
        RadiusWindow::from_j(self.window.0, self.window.1)
    }
}

/// What `--subject` resolved to.
enum Loaded {
    Catalog(Subject, String),
    Profile(RadialProfile),
}

fn looks_like_path(s: &str) -> bool {
    s.ends_with(".csv") || Path::new(s).is_file()
}

fn load(cfg: &Config) -> anyhow::Result<Loaded> {
    if looks_like_path(&cfg.subject) {
        let text = std::fs::read_to_string(&cfg.subject).with_context(|| format!("reading {}", cfg.subject))?;
        let first = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("");
        return Ok(if first.starts_with("# p=") || first.starts_with("# subject=") {
            Loaded::Profile(RadialProfile::read_csv(text.as_bytes())?)
        } else {
            Loaded::Catalog(Subject::Boundary(BoundarySignal::read_csv(text.as_bytes())?), cfg.subject.clone())
        });
    }
    let spec: ExampleSpec = cfg.subject.parse().map_err(|e: HqrError| Usage(e.to_string()))?;
    let spec = spec.with_resolution(cfg.n.or(Some(DEFAULT_N)), cfg.m.or(Some(DEFAULT_M)));
    let label = spec.to_string();
    match spec.build() {
        Ok(s) => Ok(Loaded::Catalog(s, label)),
        Err(e @ HqrError::Parse(_)) => Err(Usage(e.to_string()).into()),
        Err(e) => Err(e.into()),
    }
}

struct Labeled<'a> {
    label: String,
    inner: PartOf<'a, HarmonicMap>,
}

impl hqr_core::CircleSubject for Labeled<'_> {
    fn label(&self) -> String {
        self.label.clone()
    }

    fn sample_circle(&self, r: f64, m: usize) -> hqr_core::Result<Vec<hqr_core::Complex64>> {
        self.inner.sample_circle(r, m)
    }

    fn degree_hint(&self) -> Option<usize> {
        self.inner.degree_hint()
    }
}

fn profile_of(cfg: &Config) -> anyhow::Result<RadialProfile> {
    match load(cfg)? {
        Loaded::Profile(p) => Ok(p),
        Loaded::Catalog(s, label) => {
            let map = s.to_harmonic()?;
            let subject = Labeled {
                label: format!("{}({label})", cfg.part.label()),
                inner: PartOf::new(&map, cfg.part),
            };
            Ok(radial_profile(&subject, cfg.p, &cfg.r_grid(), cfg.circle)?)
        }
    }
}

fn boundary_of(cfg: &Config) -> anyhow::Result<BoundarySignal> {
    match load(cfg)? {
        Loaded::Catalog(Subject::Boundary(u), _) => Ok(u),
        _ => usage(format!("`{}` is not a boundary signal", cfg.subject)),
    }
}

fn sink(path: &Option<PathBuf>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json<T: serde::Serialize>(out: &mut dyn Write, value: &T) -> anyhow::Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn holder_deltas() -> Vec<f64> {
    (0..9).map(|i| 10f64.powf(-3.0 + 0.25 * i as f64)).collect()
}

fn run(cmd: Command) -> anyhow::Result<bool> {
    match cmd {
        Command::Catalog => {
            println!("{}", catalog_listing());
            Ok(true)
        }
        Command::Verify(v) => verify(v),
        Command::Means(o) => {
            let cfg = Config::from_opts(o)?;
            let prof = profile_of(&cfg)?;
            let mut out = sink(&cfg.output)?;
            match cfg.format.unwrap_or(Format::Csv) {
                Format::Csv => prof.write_csv(&mut out)?,
                Format::Json => write_json(&mut out, &prof)?,
            }
            out.flush()?;
            Ok(true)
        }
        Command::Growth(o) => {
            let cfg = Config::from_opts(o)?;
            let prof = profile_of(&cfg)?;
            let fit = match cfg.model {
                Model::PowerGrowth => fit_growth_exponent(&prof, cfg.fit_window())?,
                Model::LogPower => fit_log_power(&prof, cfg.fit_window())?,
            };
            let mut out = sink(&cfg.output)?;
            match cfg.format.unwrap_or(Format::Json) {
                Format::Json => write_json(&mut out, &fit)?,
                Format::Csv => write_flat(&mut out, &fit)?,
            }
            out.flush()?;
            Ok(true)
        }
        Command::Conjugate(o) => {
            let cfg = Config::from_opts(o)?;
            let v = conjugate_signal(&boundary_of(&cfg)?)?;
            let mut out = sink(&cfg.output)?;
            v.write_csv(&mut out)?;
            out.flush()?;
            Ok(true)
        }
        Command::Holder(o) => {
            let cfg = Config::from_opts(o)?;
            let u = boundary_of(&cfg)?;
            let s = match cfg.part {
                Part::Re | Part::Full => u,
                Part::Im => conjugate_signal(&u)?,
                Part::Abs => BoundarySignal::from_real(u.values().iter().map(|z| z.norm()).collect())?,
            };
            let moduli = modulus_of_continuity(&s, &holder_deltas())?;
            let fit = fit_holder_exponent(&moduli, cfg.log_correction)?;
            let mut out = sink(&cfg.output)?;
            match cfg.format.unwrap_or(Format::Csv) {
                Format::Csv => {
                    write_flat(&mut out, &fit)?;
                    writeln!(out, "delta,omega")?;
                    for (d, w) in &moduli {
                        writeln!(out, "{d:.16e},{w:.16e}")?;
                    }
                }
                Format::Json => write_json(
                    &mut out,
                    &serde_json::json!({ "fit": fit, "moduli": moduli }),
                )?,
            }
            out.flush()?;
            Ok(true)
        }
        Command::Qr(o) => {
            let cfg = Config::from_opts(o)?;
            let map = match load(&cfg)? {
                Loaded::Catalog(s, _) => s.to_harmonic()?,
                Loaded::Profile(_) => return usage("qr needs a map, not a profile"),
            };
            let n_theta = match cfg.circle {
                CircleResolution::Fixed(m) => m,
                CircleResolution::Auto => 1024,
            };
            let rep = map.qr_constants(&cfg.r_grid(), n_theta)?;
            let mut out = sink(&cfg.output)?;
            write_json(&mut out, &rep)?;
            out.flush()?;
            Ok(true)
        }
    }
}

/// Fit report as `# key=value` lines.
fn write_flat<T: serde::Serialize>(out: &mut dyn Write, value: &T) -> anyhow::Result<()> {
    let v = serde_json::to_value(value)?;
    let obj = v.as_object().ok_or_else(|| anyhow!("report is not a record"))?;
    for (k, x) in obj {
        match x {
            serde_json::Value::String(s) => writeln!(out, "# {k}={s}")?,
            other => writeln!(out, "# {k}={other}")?,
        }
    }
    Ok(())
}

fn verify(v: VerifyOpts) -> anyhow::Result<bool> {
    let outcomes: Vec<CriterionOutcome> = match v.criterion {
        Some(id) => match run_criterion(id, v.seed) {
            Some(o) => vec![o],
            None => bail!(Usage(format!("--criterion must be 1..10, got {id}"))),
        },
        None => run_all(v.seed),
    };
    let mut out = sink(&v.output)?;
    match v.format {
        Format::Csv => {
            writeln!(out, "# seed={}", v.seed)?;
            for o in &outcomes {
                writeln!(out, "{}", o.summary_line())?;
                if v.verbose {
                    for l in o.detail.lines() {
                        writeln!(out, "    {l}")?;
                    }
                }
            }
            let passed = outcomes.iter().filter(|o| o.passed).count();
            writeln!(out, "{passed}/{} criteria passed", outcomes.len())?;
        }
        Format::Json => write_json(&mut out, &serde_json::json!({ "seed": v.seed, "criteria": outcomes }))?,
    }
    out.flush()?;
    Ok(outcomes.iter().all(|o| o.passed))
}

fn init_threads() -> anyhow::Result<()> {
    if let Ok(s) = std::env::var("HQR_THREADS") {
        let n: usize = match s.trim().parse() {
            Ok(n) if n > 0 => n,
            _ => return usage(format!("HQR_THREADS must be a positive integer, got `{s}`")),
        };
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    // clap exits with status 2 on its own usage errors
    let cli = Cli::parse();
    match init_threads().and_then(|_| run(cli.command)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("hqr: {e:#}");
            if e.downcast_ref::<Usage>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::BufReader;

    #[test]
    fn ranges_parse() {
        assert_eq!(parse_range("1..12", "j").unwrap(), (1, 12));
        assert!(parse_range("1-12", "j").is_err());
        assert!(parse_range("a..3", "j").is_err());
    }

    #[test]
    fn powers_of_two() {
        assert_eq!(power_of_two(Some(4096), "M").unwrap(), Some(4096));
        assert!(power_of_two(Some(3000), "M").is_err());
        assert!(power_of_two(None, "M").unwrap().is_none());
    }

    #[test]
    fn reader_is_used_for_profiles() {
        let p = RadialProfile::new(1.0, "x", vec![(0.5, 1.0), (0.75, 2.0)]).unwrap();
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        let back = RadialProfile::read_csv(BufReader::new(&buf[..])).unwrap();
        assert_eq!(back, p);
    }
}
