//! Command-line driver.
//!
//! Every subcommand writes one artifact: CSV with `#` metadata lines for the
//! tabular outputs, or a JSON document with `meta` and `result` fields. The
//! `meta.config` object is the fully resolved configuration; feeding its
//! values back as flags reproduces `result` exactly. Wall-clock time lives
//! only in `meta.generated_at`.
//!
//! Flags can also come from `--config FILE`, a `key = value` file whose keys
//! are flag names without the leading dashes. Command-line flags win. Output
//! goes to `--output`, else to `$XXZ_OUTPUT_DIR/<subcommand>.<ext>` when that
//! variable is set, else to stdout.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand, ValueEnum};
use log::info;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::bands::{
    analytic_gap_report, band_table, partition_union, total_cluster_spectrum, xxz_cluster_union,
};
use crate::basis::Window;
use crate::bethe::droplet_band;
use crate::ensemble::{
    baseline_minimum, collect_stats, run_sample, EnsembleStats, FieldSpec, PRNG_ID,
};
use crate::error::{param_err, Error, Result};
use crate::hamiltonians::build_lattice_xn;
use crate::params::{Field, ModelParams};
use crate::spectra::{
    dense_spectrum, extremal_with, fiber_sweep, gap_certificate, hvz_check, theta_grid, End,
    FiberRow, GapCertificate, HvzReport, LanczosConfig, SpectrumResult, DEFAULT_DENSE_CAP,
};

pub const OUTPUT_DIR_ENV: &str = "XXZ_OUTPUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Distribution {
    Uniform,
    TwoPoint,
}

#[derive(Debug, Clone, Parser, Serialize)]
#[command(
    name = "xxz-spectra",
    version,
    about = "Bands and spectra of the Ising-phase XXZ chain in N-magnon sectors"
)]
pub struct Cli {
    /// key = value file supplying defaults for any flag
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    /// Output format; tables default to csv, reports to json
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Output file
    #[arg(long, short, global = true)]
    #[serde(skip)]
    pub output: Option<PathBuf>,

    /// Worker threads for independent tasks (default: all cores)
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Exit nonzero when a verification fails
    #[arg(long, global = true)]
    pub check: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
pub enum Command {
    /// Droplet bands, cluster bands and the analytic gap report
    Bands {
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = 3)]
        nmax: usize,
    },
    /// Lowest fiber eigenvalues against the droplet dispersion
    Fiber {
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 33)]
        theta_points: usize,
        #[arg(long, default_value_t = 40)]
        gap_cap: u32,
        #[arg(long, default_value_t = 1)]
        k_low: usize,
        /// Tolerance on |lowest - E_N(θ)| for --check
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Eigenvalues of the N-particle operator on the window [1, L]
    Spectrum {
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        window: usize,
        /// Whitespace-separated nonnegative field values for sites 1, 2, ...
        #[arg(long)]
        field_file: Option<PathBuf>,
        /// Number of lowest eigenvalues (0: all, dense)
        #[arg(long, default_value_t = 0)]
        count: usize,
        /// Also write the matrix as a coordinate list
        #[arg(long)]
        coo: Option<PathBuf>,
    },
    /// Rank-one gap certificate over a θ grid
    GapCheck {
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 30)]
        gap_cap: u32,
        /// θ = −π + 2πj/points, j = 0..points
        #[arg(long, default_value_t = 8)]
        theta_points: usize,
    },
    /// Two-cluster Weyl-product residuals over growing windows
    HvzCheck {
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        n: usize,
        /// Cluster split m (default: every 1 <= m < N)
        #[arg(long)]
        split: Option<usize>,
        #[arg(long, value_delimiter = ',', default_value = "10,20,40")]
        windows: Vec<usize>,
    },
    /// Random-field ensemble on the window [1, L]
    Ensemble {
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 60)]
        window: usize,
        #[arg(long, default_value_t = 100)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.5)]
        nu_max: f64,
        #[arg(long, value_enum, default_value_t = Distribution::Uniform)]
        distribution: Distribution,
        /// Probability of ν_max for the two-point distribution
        #[arg(long, default_value_t = 0.5)]
        p: f64,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Bands { .. } => "bands",
            Command::Fiber { .. } => "fiber",
            Command::Spectrum { .. } => "spectrum",
            Command::GapCheck { .. } => "gap-check",
            Command::HvzCheck { .. } => "hvz-check",
            Command::Ensemble { .. } => "ensemble",
        }
    }

    fn default_format(&self) -> Format {
        match self {
            Command::Bands { .. } | Command::Fiber { .. } | Command::Spectrum { .. } => Format::Csv,
            _ => Format::Json,
        }
    }
}

/// Reads `key = value` lines; `#` starts a comment.
pub fn read_config_file(path: &Path) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (no, line) in BufReader::new(File::open(path)?).lines().enumerate() {
        let line = line?;
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            Error::Parse(format!(
                "{}:{}: expected key = value",
                path.display(),
                no + 1
            ))
        })?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

/// Appends config-file entries as flags unless the flag is already given.
/// Keys may use `_` or `-`.
pub fn merge_config(args: Vec<String>, entries: &[(String, String)]) -> Vec<String> {
    let mut merged = args.clone();
    for (k, v) in entries {
        let k = k.replace('_', "-");
        let flag = format!("--{k}");
        let present = args
            .iter()
            .any(|a| a == &flag || a.starts_with(&format!("{flag}=")));
        if present || k == "config" {
            continue;
        }
        match v.as_str() {
            "true" => merged.push(flag),
            "false" => {}
            _ => {
                merged.push(flag);
                merged.push(v.clone());
            }
        }
    }
    merged
}

/// Parses `args` (including the program name), honouring `--config`.
pub fn parse_args(args: Vec<String>) -> std::result::Result<Cli, clap::Error> {
    let path = args
        .iter()
        .enumerate()
        .find_map(|(i, a)| match a.strip_prefix("--config") {
            Some("") => args.get(i + 1).map(PathBuf::from),
            Some(rest) => rest.strip_prefix('=').map(PathBuf::from),
            None => None,
        });
    let Some(path) = path else {
        return Cli::try_parse_from(args);
    };
    let entries = read_config_file(&path).map_err(|e| {
        clap::Error::raw(
            clap::error::ErrorKind::Io,
            format!("cannot read config {}: {e}\n", path.display()),
        )
    })?;
    Cli::try_parse_from(merge_config(args, &entries))
}

/// Runs `items` through `f` on `threads` workers; results keep the input order.
pub fn fan_out<T, R, F>(threads: Option<usize>, items: &[T], f: F) -> Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Result<R> + Sync + Send,
{
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        builder = builder.num_threads(t.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Representation(format!("thread pool: {e}")))?;
    pool.install(|| items.par_iter().map(&f).collect())
}

/// [`crate::ensemble::ensemble_run`] with samples spread over `threads` workers.
pub fn ensemble_parallel(
    p: &ModelParams,
    spec: &FieldSpec,
    window: Window,
    n_samples: u64,
    master_seed: u64,
    threads: Option<usize>,
) -> Result<EnsembleStats> {
    if n_samples == 0 {
        return Err(param_err("samples", "at least one sample is required"));
    }
    let baseline = baseline_minimum(p, window)?;
    let indices: Vec<u64> = (0..n_samples).collect();
    let samples = fan_out(threads, &indices, |&i| {
        run_sample(p, spec, window, master_seed, i, baseline)
    })?;
    collect_stats(p, spec, window, master_seed, baseline, samples)
}

/// Result of one subcommand before serialization.
pub struct Artifact {
    pub passed: bool,
    pub json: serde_json::Value,
    /// Header and rows for CSV output.
    pub table: Option<(Vec<String>, Vec<Vec<String>>)>,
}

/// Shortest decimal that parses back to `x`.
fn num(x: f64) -> String {
    x.to_string()
}

fn read_field_file(path: &Path) -> Result<Field> {
    let text = std::fs::read_to_string(path)?;
    let values = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(str::split_whitespace)
        .map(|t| {
            t.parse::<f64>()
                .map_err(|e| Error::Parse(format!("field value `{t}`: {e}")))
        })
        .collect::<Result<Vec<_>>>()?;
    Field::new(1, values)
}

fn gap_grid(points: usize) -> Vec<f64> {
    (0..points)
        .map(|j| -std::f64::consts::PI + 2.0 * std::f64::consts::PI * j as f64 / points as f64)
        .collect()
}

/// Executes the subcommand and returns the artifact without writing it.
pub fn execute(cli: &Cli) -> Result<Artifact> {
    let threads = cli.threads;
    match &cli.command {
        Command::Bands { delta, nmax } => {
            let p = ModelParams::new(*delta, 1)?;
            if *nmax == 0 {
                return Err(param_err("nmax", "must be at least 1"));
            }
            let rows = band_table(&p, *nmax)?;
            let mut passed = true;
            let mut per_n = Vec::new();
            for n in 1..=*nmax {
                let pn = p.with_n(n)?;
                for k in 1..=n {
                    let closed = crate::bands::cluster_band(&pn, k)?;
                    let brute = partition_union(&pn, k)?;
                    passed &= brute.len() == 1
                        && (brute.bands()[0].lo - closed.lo).abs() <= 1e-12
                        && (brute.bands()[0].hi - closed.hi).abs() <= 1e-12;
                }
                per_n.push(json!({
                    "n": n,
                    "droplet_band": droplet_band(&pn),
                    "total_cluster_spectrum": total_cluster_spectrum(&pn)?,
                    "gap_report": analytic_gap_report(&pn),
                }));
            }
            let union = xxz_cluster_union(&p, *nmax)?;
            passed &= union.distance(&crate::bands::xxz_union_closed_form(*delta, *nmax)) <= 1e-12;
            Ok(Artifact {
                passed,
                json: json!({ "cluster_bands": rows, "sectors": per_n, "union": union, "checks_pass": passed }),
                table: Some((
                    vec!["N".into(), "k".into(), "lo".into(), "hi".into()],
                    rows.iter()
                        .map(|r| vec![r.n.to_string(), r.k.to_string(), num(r.lo), num(r.hi)])
                        .collect(),
                )),
            })
        }
        Command::Fiber {
            delta,
            n,
            theta_points,
            gap_cap,
            k_low,
            tol,
        } => {
            let p = ModelParams::new(*delta, *n)?;
            let grid = theta_grid(*theta_points);
            let rows: Vec<FiberRow> = fan_out(threads, &grid, |&t| {
                fiber_sweep(&p, &[t], *gap_cap, *k_low).map(|mut v| v.remove(0))
            })?;
            let passed = rows.iter().all(|r| r.diff.abs() <= *tol);
            let mut header = vec!["theta".to_string(), "analytic_E".to_string()];
            header.extend((0..*k_low).map(|i| format!("numeric_{i}")));
            header.extend((0..*k_low).map(|i| format!("residual_{i}")));
            header.push("diff".into());
            let table = rows
                .iter()
                .map(|r| {
                    let mut row = vec![num(r.theta), num(r.analytic)];
                    row.extend(r.eigenvalues.iter().map(|&x| num(x)));
                    row.extend(r.residuals.iter().map(|&x| num(x)));
                    row.push(num(r.diff));
                    row
                })
                .collect();
            Ok(Artifact {
                passed,
                json: json!({ "rows": rows, "tolerance": tol, "checks_pass": passed }),
                table: Some((header, table)),
            })
        }
        Command::Spectrum {
            delta,
            n,
            window,
            field_file,
            count,
            coo,
        } => {
            let mut p = ModelParams::new(*delta, *n)?;
            if let Some(path) = field_file {
                p = p.with_field(read_field_file(path)?);
            }
            let h = build_lattice_xn(&p, Window::of_len(*window)?)?;
            if let Some(path) = coo {
                h.write_coo(BufWriter::new(File::create(path)?), &p)?;
            }
            let s: SpectrumResult = if *count == 0 || h.dim() <= DEFAULT_DENSE_CAP.min(1200) {
                let mut s = dense_spectrum(&h)?;
                if *count > 0 {
                    s.eigenvalues.truncate(*count);
                    s.meta.residuals.truncate(*count);
                }
                s
            } else {
                extremal_with(
                    &h,
                    *count,
                    End::Lowest,
                    &LanczosConfig::default().with_max_iter(10 * count + 800),
                )?
            };
            let lower_ok = s.eigenvalues[0] >= droplet_band(&p).lo - 1e-12;
            let enclosure = crate::bands::enclosure_bands(&p);
            let nu = p.field().max() * *n as f64;
            let enclosure_ok = s.eigenvalues.iter().all(|&x| {
                enclosure
                    .iter()
                    .any(|b| b.lo - 1e-12 <= x && x <= b.hi + nu + 1e-12)
            });
            let passed = lower_ok && enclosure_ok;
            Ok(Artifact {
                passed,
                json: json!({
                    "spectrum": s,
                    "lower_bound_ok": lower_ok,
                    "enclosure_ok": enclosure_ok,
                    "field": p.field(),
                    "checks_pass": passed,
                }),
                table: Some((
                    vec!["index".into(), "eigenvalue".into(), "residual".into()],
                    s.eigenvalues
                        .iter()
                        .zip(&s.meta.residuals)
                        .enumerate()
                        .map(|(i, (&e, &r))| vec![i.to_string(), num(e), num(r)])
                        .collect(),
                )),
            })
        }
        Command::GapCheck {
            delta,
            n,
            gap_cap,
            theta_points,
        } => {
            let p = ModelParams::new(*delta, *n)?;
            let grid = gap_grid(*theta_points);
            let certs: Vec<GapCertificate> =
                fan_out(threads, &grid, |&t| gap_certificate(&p, t, *gap_cap))?;
            let passed = certs
                .iter()
                .all(|c| c.below_threshold_count == 1 && c.bound_holds);
            let table = certs
                .iter()
                .map(|c| {
                    vec![
                        num(c.theta),
                        c.below_threshold_count.to_string(),
                        num(c.lowest_eigenvalue),
                        num(c.analytic_energy),
                        num(c.perturbed_lower_bound),
                        c.bound_holds.to_string(),
                    ]
                })
                .collect();
            Ok(Artifact {
                passed,
                json: json!({ "certificates": certs, "checks_pass": passed }),
                table: Some((
                    [
                        "theta",
                        "below_threshold_count",
                        "lowest",
                        "analytic_E",
                        "perturbed_lower_bound",
                        "bound_holds",
                    ]
                    .map(String::from)
                    .to_vec(),
                    table,
                )),
            })
        }
        Command::HvzCheck {
            delta,
            n,
            split,
            windows,
        } => {
            let p = ModelParams::new(*delta, *n)?;
            let splits: Vec<usize> = match split {
                Some(m) => vec![*m],
                None => (1..*n).collect(),
            };
            let tasks: Vec<(usize, usize)> = splits
                .iter()
                .flat_map(|&m| windows.iter().map(move |&w| (m, w)))
                .collect();
            let reports: Vec<HvzReport> =
                fan_out(threads, &tasks, |&(m, w)| hvz_check(&p, m, w, None))?;
            let mut passed = reports.iter().all(|r| r.identity_discrepancy <= 1e-10);
            for &m in &splits {
                let series: Vec<f64> = reports
                    .iter()
                    .filter(|r| r.split == m)
                    .map(|r| r.residual)
                    .collect();
                passed &= series.windows(2).all(|w| w[1] <= w[0]);
            }
            let table = reports
                .iter()
                .map(|r| {
                    vec![
                        r.split.to_string(),
                        r.component_window.to_string(),
                        num(r.lambda),
                        num(r.mu),
                        num(r.energy),
                        num(r.residual),
                    ]
                })
                .collect();
            Ok(Artifact {
                passed,
                json: json!({ "reports": reports, "checks_pass": passed }),
                table: Some((
                    ["split", "window", "lambda", "mu", "energy", "residual"]
                        .map(String::from)
                        .to_vec(),
                    table,
                )),
            })
        }
        Command::Ensemble {
            delta,
            n,
            window,
            samples,
            seed,
            nu_max,
            distribution,
            p: prob,
        } => {
            let p = ModelParams::new(*delta, *n)?;
            let spec = match distribution {
                Distribution::Uniform => FieldSpec::Uniform { nu_max: *nu_max },
                Distribution::TwoPoint => FieldSpec::TwoPoint {
                    nu_max: *nu_max,
                    p: *prob,
                },
            };
            let stats = ensemble_parallel(
                &p,
                &spec,
                Window::of_len(*window)?,
                *samples,
                *seed,
                threads,
            )?;
            let passed = stats.all_checks_pass;
            let table = stats
                .samples
                .iter()
                .map(|s| {
                    vec![
                        s.index.to_string(),
                        num(s.min_eigenvalue),
                        num(s.max_eigenvalue),
                        num(s.ground_ipr),
                        s.all_ok().to_string(),
                    ]
                })
                .collect();
            Ok(Artifact {
                passed,
                json: serde_json::to_value(&stats)?,
                table: Some((
                    [
                        "index",
                        "min_eigenvalue",
                        "max_eigenvalue",
                        "ground_ipr",
                        "checks_ok",
                    ]
                    .map(String::from)
                    .to_vec(),
                    table,
                )),
            })
        }
    }
}

fn seeds(cmd: &Command) -> serde_json::Value {
    match cmd {
        Command::Ensemble { seed, .. } => json!({ "master_seed": seed, "prng": PRNG_ID }),
        _ => {
            json!({ "lanczos_start": "normalized all-ones plus fixed chacha8 perturbation, seed 0" })
        }
    }
}

/// Metadata embedded in every artifact.
pub fn metadata(cli: &Cli) -> Result<serde_json::Value> {
    let now = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    Ok(json!({
        "tool": "xxz-spectra",
        "version": env!("CARGO_PKG_VERSION"),
        "config": serde_json::to_value(cli)?,
        "seeds": seeds(&cli.command),
        "generated_at": now,
    }))
}

pub fn write_artifact<W: Write>(
    cli: &Cli,
    artifact: &Artifact,
    format: Format,
    mut out: W,
) -> Result<()> {
    let meta = metadata(cli)?;
    match (format, &artifact.table) {
        (Format::Csv, Some((header, rows))) => {
            for key in ["tool", "version", "config", "seeds", "generated_at"] {
                writeln!(out, "# {key}: {}", meta[key])?;
            }
            writeln!(out, "# checks_pass: {}", artifact.passed)?;
            let mut w = csv::Writer::from_writer(out);
            w.write_record(header)?;
            for r in rows {
                w.write_record(r)?;
            }
            w.flush()?;
        }
        _ => {
            serde_json::to_writer_pretty(
                &mut out,
                &json!({ "meta": meta, "result": artifact.json }),
            )?;
            writeln!(out)?;
        }
    }
    Ok(())
}

fn output_path(cli: &Cli, format: Format) -> Option<PathBuf> {
    if let Some(p) = &cli.output {
        return Some(p.clone());
    }
    let dir = std::env::var_os(OUTPUT_DIR_ENV)?;
    let ext = match format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    Some(PathBuf::from(dir).join(format!("{}.{ext}", cli.command.name())))
}

/// Runs a parsed command line and writes its artifact. Returns whether the
/// requested verifications passed; without `--check` this is always true.
pub fn run(cli: &Cli) -> Result<bool> {
    let artifact = execute(cli)?;
    let format = cli.format.unwrap_or_else(|| cli.command.default_format());
    match output_path(cli, format) {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent)?;
            }
            write_artifact(cli, &artifact, format, BufWriter::new(File::create(&path)?))?;
            info!("wrote {}", path.display());
        }
        None => write_artifact(cli, &artifact, format, io::stdout().lock())?,
    }
    Ok(!cli.check || artifact.passed)
}
