//! Scenario runner for the Dirac-oscillator QND simulator.
//!
//! Subcommands reproduce the paper-style experiments (`fig1`, `fig2`), scan
//! the relativistic parameter (`scan`), dump the analytic spectrum
//! (`spectrum`), print SI-scale estimates (`scales`), or run a custom
//! configuration (`custom`). Output is deterministic CSV (or JSON with
//! `--format json`); identical configs produce byte-identical files.

mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use num_complex::Complex64 as C64;

use dirac_qnd::error::Error as CoreError;
use dirac_qnd::scales::{self, Platform};
use dirac_qnd::scenario::{self, run_fw_optical, run_weak_scheme, FwOpticalConfig, WeakSchemeConfig};

use config::{parse_float_list, FileConfig};
use output::{fmt, Format};

#[derive(Parser)]
#[command(
    name = "dirac-qnd",
    version,
    about = "QND measurement simulator for the (1+1)D Dirac oscillator"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Optical probe of the FW quadrature (defaults: eps=0.1, alpha=0.5, beta=2, g=0.1)
    Fig1(RunArgs),
    /// Weak-scheme near-QND runs under the full Dirac Hamiltonian, one per epsilon
    Fig2(Fig2Args),
    /// Epsilon scan of the weak scheme with a t_max snapshot table
    Scan(ScanArgs),
    /// Analytic spectrum table with diagonalization residuals
    Spectrum(SpectrumArgs),
    /// Order-of-magnitude SI estimates for lab platforms
    Scales(ScalesArgs),
    /// Custom run of either scheme
    Custom(CustomArgs),
}

#[derive(Args, Clone)]
struct CommonOut {
    /// Output path; defaults to a scenario-specific name
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv | json
    #[arg(long)]
    format: Option<Format>,
    /// key = value config file; flags override file values
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct RunArgs {
    #[arg(long)]
    epsilon: Option<f64>,
    /// Initial coherent amplitude of the oscillator (real)
    #[arg(long)]
    alpha: Option<f64>,
    /// Spin amplitudes (real, normalized pair; default 1/sqrt(2) each)
    #[arg(long)]
    c1: Option<f64>,
    #[arg(long)]
    c2: Option<f64>,
    /// Probe coherent amplitude (real)
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    g: Option<f64>,
    #[arg(long)]
    omega_b: Option<f64>,
    #[arg(long)]
    osc_dim: Option<usize>,
    #[arg(long)]
    probe_dim: Option<usize>,
    /// Duration in oscillator periods (2 pi / omega)
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
    #[command(flatten)]
    out: CommonOut,
}

#[derive(Args, Clone)]
struct Fig2Args {
    /// Comma-separated epsilon list
    #[arg(long)]
    epsilon: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    c1: Option<f64>,
    #[arg(long)]
    c2: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    g: Option<f64>,
    #[arg(long)]
    omega_b: Option<f64>,
    #[arg(long)]
    probe_dim: Option<usize>,
    /// Duration in oscillator periods (2 pi / omega)
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
    /// Inner Strang step (natural units); default min(1e-3, 0.1/||H||)
    #[arg(long)]
    dt: Option<f64>,
    /// Cap on the adaptive per-sector oscillator cutoff
    #[arg(long)]
    max_osc_dim: Option<usize>,
    #[arg(long)]
    leakage_threshold: Option<f64>,
    /// Validate with a halved-step rerun (doubles runtime)
    #[arg(long)]
    self_check: Option<bool>,
    #[command(flatten)]
    out: CommonOut,
}

#[derive(Args, Clone)]
struct ScanArgs {
    #[arg(long)]
    eps_min: Option<f64>,
    #[arg(long)]
    eps_max: Option<f64>,
    /// Number of log-spaced grid points
    #[arg(long)]
    points: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    g: Option<f64>,
    #[arg(long)]
    probe_dim: Option<usize>,
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    max_osc_dim: Option<usize>,
    #[arg(long)]
    leakage_threshold: Option<f64>,
    #[command(flatten)]
    out: CommonOut,
}

#[derive(Args, Clone)]
struct SpectrumArgs {
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    osc_dim: Option<usize>,
    /// Label the table as FW-derived (same analytic content)
    #[arg(long, default_value_t = false)]
    fw: bool,
    #[command(flatten)]
    out: CommonOut,
}

#[derive(Args, Clone)]
struct ScalesArgs {
    /// electron | cold-atom | custom
    #[arg(long)]
    platform: Option<String>,
    #[arg(long)]
    mass_kg: Option<f64>,
    #[arg(long)]
    c_eff: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    n_excitation: Option<f64>,
    #[command(flatten)]
    out: CommonOut,
}

#[derive(Args, Clone)]
struct CustomArgs {
    /// fw_optical | weak
    #[arg(long)]
    scheme: Option<String>,
    #[command(flatten)]
    fig2: Fig2Args,
    #[arg(long)]
    osc_dim: Option<usize>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Ok(raw) = std::env::var("DIRAC_QND_THREADS") {
        if let Ok(n) = raw.parse::<usize>() {
            if n >= 1 {
                dirac_qnd::par::limit_threads(n);
            }
        }
    }
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(classify(&err))
        }
    }
}

/// Exit codes: 0 success, 2 config error, 3 truncation abort, 4 accuracy
/// abort, 1 anything else.
fn classify(err: &anyhow::Error) -> u8 {
    if let Some(core) = err.downcast_ref::<CoreError>() {
        return match core {
            CoreError::Config(_)
            | CoreError::Dimension(_)
            | CoreError::Domain(_)
            | CoreError::Contract(_) => 2,
            CoreError::Truncation { .. } | CoreError::LeakageAbort { .. } => 3,
            CoreError::AccuracyAbort { .. } => 4,
            CoreError::Assembly(_) | CoreError::Linalg(_) => 1,
        };
    }
    if err.to_string().contains("config") {
        return 2;
    }
    1
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Fig1(args) => cmd_fig1(args),
        Cmd::Fig2(args) => cmd_fig2(args, "fig2"),
        Cmd::Scan(args) => cmd_scan(args),
        Cmd::Spectrum(args) => cmd_spectrum(args),
        Cmd::Scales(args) => cmd_scales(args),
        Cmd::Custom(args) => cmd_custom(args),
    }
}

fn write_out(path: &PathBuf, content: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    std::fs::write(path, content).with_context(|| format!("writing {}", path.display()))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn spin_pair(file: &FileConfig, c1: Option<f64>, c2: Option<f64>) -> Result<(C64, C64)> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let c1 = file.get("c1", c1, s)?;
    let c2 = file.get("c2", c2, s)?;
    Ok((C64::new(c1, 0.0), C64::new(c2, 0.0)))
}

fn fig1_config(args: &RunArgs, file: &FileConfig) -> Result<(FwOpticalConfig, Vec<(String, String)>)> {
    let d = FwOpticalConfig::fig1_defaults();
    let (c1, c2) = spin_pair(file, args.c1, args.c2)?;
    let cfg = FwOpticalConfig {
        epsilon: file.get("epsilon", args.epsilon, d.epsilon)?,
        alpha: C64::new(file.get("alpha", args.alpha, d.alpha.re)?, 0.0),
        c1,
        c2,
        beta: C64::new(file.get("beta", args.beta, d.beta.re)?, 0.0),
        g: file.get("g", args.g, d.g)?,
        omega_b: file.get("omega_b", args.omega_b, d.omega_b)?,
        osc_dim: file.get_opt("osc_dim", args.osc_dim)?,
        probe_dim: file.get("probe_dim", args.probe_dim, d.probe_dim)?,
        t_max: file.get("t_max", args.t_max, 2.0)? * 2.0 * std::f64::consts::PI,
        samples: file.get("samples", args.samples, d.samples)?,
    };
    let header = vec![
        ("epsilon".into(), fmt(cfg.epsilon)),
        ("alpha".into(), fmt(cfg.alpha.re)),
        ("c1".into(), fmt(cfg.c1.re)),
        ("c2".into(), fmt(cfg.c2.re)),
        ("beta".into(), fmt(cfg.beta.re)),
        ("g".into(), fmt(cfg.g)),
        ("omega_b".into(), fmt(cfg.omega_b)),
        (
            "osc_dim".into(),
            cfg.osc_dim.map(|d| d.to_string()).unwrap_or_else(|| "auto".into()),
        ),
        ("probe_dim".into(), cfg.probe_dim.to_string()),
        ("t_max".into(), fmt(cfg.t_max)),
        ("samples".into(), cfg.samples.to_string()),
    ];
    Ok((cfg, header))
}

fn cmd_fig1(args: RunArgs) -> Result<()> {
    let file = FileConfig::load(args.out.config.as_deref())?;
    let (cfg, header) = fig1_config(&args, &file)?;
    let format = file.get("format", args.out.format, Format::Csv)?;
    let ts = run_fw_optical(&cfg)?;
    let path = args
        .out
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(default_name("fig1", format)));
    let content = match format {
        Format::Csv => output::timeseries_csv(&ts, "fig1", &header),
        Format::Json => output::timeseries_json(&ts, "fig1", &header)?,
    };
    write_out(&path, &content)?;

    // spectral summary of the Dirac-representation position track
    let xs = ts.series("x").expect("x series");
    let fc = scenario::frequency_content(&ts.times, &xs.mean, cfg.epsilon);
    println!(
        "x(t) spectral peaks: slow {:.3} (power {:.3e}), fast {:.3} (power {:.3e}); 2*omega/epsilon = {:.3}",
        fc.slow_peak, fc.slow_power, fc.fast_peak, fc.fast_power,
        2.0 / cfg.epsilon
    );
    Ok(())
}

fn fig2_config(
    args: &Fig2Args,
    file: &FileConfig,
    epsilon: f64,
) -> Result<(WeakSchemeConfig, Vec<(String, String)>)> {
    let d = WeakSchemeConfig::fig2_defaults(epsilon);
    let (c1, c2) = spin_pair(file, args.c1, args.c2)?;
    let cfg = WeakSchemeConfig {
        epsilon,
        alpha: C64::new(file.get("alpha", args.alpha, d.alpha.re)?, 0.0),
        c1,
        c2,
        beta: C64::new(file.get("beta", args.beta, d.beta.re)?, 0.0),
        g: file.get("g", args.g, d.g)?,
        omega_b: file.get("omega_b", args.omega_b, d.omega_b)?,
        probe_dim: file.get("probe_dim", args.probe_dim, d.probe_dim)?,
        t_max: file.get("t_max", args.t_max, 2.0)? * 2.0 * std::f64::consts::PI,
        samples: file.get("samples", args.samples, d.samples)?,
        dt: file.get_opt("dt", args.dt)?,
        max_osc_dim: file.get("max_osc_dim", args.max_osc_dim, d.max_osc_dim)?,
        leakage_threshold: file.get(
            "leakage_threshold",
            args.leakage_threshold,
            d.leakage_threshold,
        )?,
        self_check: file.get("self_check", args.self_check, d.self_check)?,
    };
    let header = vec![
        ("epsilon".into(), fmt(cfg.epsilon)),
        ("alpha".into(), fmt(cfg.alpha.re)),
        ("c1".into(), fmt(cfg.c1.re)),
        ("c2".into(), fmt(cfg.c2.re)),
        ("beta".into(), fmt(cfg.beta.re)),
        ("g".into(), fmt(cfg.g)),
        ("omega_b".into(), fmt(cfg.omega_b)),
        ("probe_dim".into(), cfg.probe_dim.to_string()),
        ("t_max".into(), fmt(cfg.t_max)),
        ("samples".into(), cfg.samples.to_string()),
        ("dt".into(), cfg.dt.map(fmt).unwrap_or_else(|| "auto".into())),
        ("max_osc_dim".into(), cfg.max_osc_dim.to_string()),
        ("leakage_threshold".into(), fmt(cfg.leakage_threshold)),
        ("self_check".into(), cfg.self_check.to_string()),
    ];
    Ok((cfg, header))
}

fn cmd_fig2(args: Fig2Args, label: &str) -> Result<()> {
    let file = FileConfig::load(args.out.config.as_deref())?;
    let format = file.get("format", args.out.format, Format::Csv)?;
    let eps_raw = file.get("epsilon", args.epsilon.clone(), "0.001,0.02,0.1".to_string())?;
    let eps_list = parse_float_list(&eps_raw)?;
    let base = args
        .out
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(default_name(label, format)));
    let stem = base
        .to_string_lossy()
        .trim_end_matches(".csv")
        .trim_end_matches(".json")
        .to_string();

    let mut summary_rows = Vec::new();
    let mut first_error: Option<anyhow::Error> = None;
    for &eps in &eps_list {
        let (cfg, header) = fig2_config(&args, &file, eps)?;
        match run_weak_scheme(&cfg) {
            Ok(ts) => {
                let ext = if format == Format::Csv { "csv" } else { "json" };
                let path = PathBuf::from(format!("{stem}_eps{eps:e}.{ext}"));
                let content = match format {
                    Format::Csv => output::timeseries_csv(&ts, label, &header),
                    Format::Json => output::timeseries_json(&ts, label, &header)?,
                };
                write_out(&path, &content)?;
                let row = scenario::scan_row_from_series(eps, &ts);
                summary_rows.push(vec![
                    fmt(eps),
                    fmt(row.x1_mean),
                    fmt(row.x1_var),
                    fmt(row.x2_mean),
                    fmt(row.x2_var),
                    fmt(row.x1_deviation),
                    fmt(row.max_leakage),
                ]);
            }
            Err(e) => {
                eprintln!("epsilon = {eps}: {e}");
                summary_rows.push(vec![fmt(eps); 1].into_iter().chain(vec!["aborted".to_string(); 6]).collect());
                if first_error.is_none() {
                    first_error = Some(e.into());
                }
            }
        }
    }
    let summary = output::table_csv(
        &format!("{label}_summary"),
        &[("epsilon_list".into(), eps_raw.clone())],
        &[
            "epsilon",
            "X1nr_mean",
            "X1nr_var",
            "X2nr_mean",
            "X2nr_var",
            "X1nr_max_deviation",
            "max_leakage",
        ],
        &summary_rows,
    );
    write_out(&PathBuf::from(format!("{stem}_summary.csv")), &summary)?;
    match first_error {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn cmd_scan(args: ScanArgs) -> Result<()> {
    let file = FileConfig::load(args.out.config.as_deref())?;
    let format = file.get("format", args.out.format, Format::Csv)?;
    let eps_min = file.get("eps_min", args.eps_min, 1e-3)?;
    let eps_max = file.get("eps_max", args.eps_max, 0.2)?;
    let points = file.get("points", args.points, 25usize)?;
    if points < 1 || eps_min <= 0.0 || eps_max < eps_min {
        anyhow::bail!(CoreError::Config(
            "scan grid needs eps_max >= eps_min > 0 and points >= 1".into()
        ));
    }
    let grid: Vec<f64> = if points == 1 {
        vec![eps_min]
    } else {
        let (l0, l1) = (eps_min.ln(), eps_max.ln());
        (0..points)
            .map(|j| (l0 + (l1 - l0) * j as f64 / (points - 1) as f64).exp())
            .collect()
    };

    let d = WeakSchemeConfig::fig2_defaults(eps_min);
    let base = WeakSchemeConfig {
        epsilon: eps_min,
        alpha: C64::new(file.get("alpha", args.alpha, 1.0)?, 0.0),
        c1: C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
        c2: C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
        beta: C64::new(file.get("beta", args.beta, 1.0)?, 0.0),
        g: file.get("g", args.g, 1.0)?,
        omega_b: 1.0,
        probe_dim: file.get("probe_dim", args.probe_dim, 10usize)?,
        t_max: file.get("t_max", args.t_max, 2.0)? * 2.0 * std::f64::consts::PI,
        samples: file.get("samples", args.samples, 64usize)?,
        dt: file.get_opt("dt", args.dt)?,
        max_osc_dim: file.get("max_osc_dim", args.max_osc_dim, d.max_osc_dim)?,
        leakage_threshold: file.get(
            "leakage_threshold",
            args.leakage_threshold,
            d.leakage_threshold,
        )?,
        self_check: false,
    };

    let results = scenario::run_scan_epsilon(&base, &grid);
    let mut rows = Vec::new();
    let mut first_error: Option<anyhow::Error> = None;
    for (eps, res) in results {
        match res {
            Ok(r) => rows.push(vec![
                fmt(eps),
                fmt(r.x1_mean),
                fmt(r.x1_var),
                fmt(r.x2_mean),
                fmt(r.x2_var),
                fmt(r.x1_deviation),
                fmt(r.max_leakage),
            ]),
            Err(e) => {
                eprintln!("epsilon = {eps}: {e}");
                rows.push(
                    vec![fmt(eps)]
                        .into_iter()
                        .chain(vec!["aborted".to_string(); 6])
                        .collect(),
                );
                if first_error.is_none() {
                    first_error = Some(e.into());
                }
            }
        }
    }
    let header = vec![
        ("eps_min".into(), fmt(eps_min)),
        ("eps_max".into(), fmt(eps_max)),
        ("points".into(), points.to_string()),
        ("alpha".into(), fmt(base.alpha.re)),
        ("beta".into(), fmt(base.beta.re)),
        ("g".into(), fmt(base.g)),
        ("t_max".into(), fmt(base.t_max)),
    ];
    let table = output::table_csv(
        "scan",
        &header,
        &[
            "epsilon",
            "X1nr_mean",
            "X1nr_var",
            "X2nr_mean",
            "X2nr_var",
            "X1nr_max_deviation",
            "max_leakage",
        ],
        &rows,
    );
    let path = args
        .out
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(default_name("scan", format)));
    write_out(&path, &table)?;
    match first_error {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn cmd_spectrum(args: SpectrumArgs) -> Result<()> {
    let file = FileConfig::load(args.out.config.as_deref())?;
    let format = file.get("format", args.out.format, Format::Csv)?;
    let epsilon = file.get("epsilon", args.epsilon, 0.1)?;
    let osc_dim = file.get("osc_dim", args.osc_dim, 60usize)?;
    let rows = scenario::spectrum_table(epsilon, osc_dim)?;
    let table_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.n.to_string(),
                fmt(r.e_plus),
                fmt(r.e_minus),
                fmt(r.omega_plus),
                fmt(r.omega_minus),
                fmt(r.residual),
            ]
        })
        .collect();
    let table = output::table_csv(
        if args.fw { "spectrum_fw" } else { "spectrum" },
        &[
            ("epsilon".into(), fmt(epsilon)),
            ("osc_dim".into(), osc_dim.to_string()),
        ],
        &["n", "E_plus", "E_minus", "omega_plus", "omega_minus", "residual"],
        &table_rows,
    );
    let path = args
        .out
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(default_name("spectrum", format)));
    write_out(&path, &table)?;
    Ok(())
}

fn cmd_scales(args: ScalesArgs) -> Result<()> {
    let file = FileConfig::load(args.out.config.as_deref())?;
    let platform = file.get("platform", args.platform.clone(), "electron".to_string())?;
    let inputs = match platform.as_str() {
        "electron" => scales::preset(Platform::Electron),
        "cold-atom" | "cold_atom" => scales::preset(Platform::ColdAtom),
        "custom" => scales::ScaleInputs {
            mass_kg: file
                .get_opt("mass_kg", args.mass_kg)?
                .ok_or_else(|| CoreError::Config("custom platform needs --mass-kg".into()))?,
            c_eff_m_per_s: file
                .get_opt("c_eff", args.c_eff)?
                .ok_or_else(|| CoreError::Config("custom platform needs --c-eff".into()))?,
            epsilon: file.get("epsilon", args.epsilon, 1e3)?,
            n_excitation: file.get("n_excitation", args.n_excitation, 1e4)?,
        },
        other => anyhow::bail!(CoreError::Config(format!(
            "unknown platform '{other}' (electron | cold-atom | custom)"
        ))),
    };
    let est = scales::estimate(inputs)?;
    println!("platform      = {platform}");
    println!("mass_kg       = {}", fmt(est.inputs.mass_kg));
    println!("c_eff_m_per_s = {}", fmt(est.inputs.c_eff_m_per_s));
    println!("epsilon       = {}", fmt(est.inputs.epsilon));
    println!("n_excitation  = {}", fmt(est.inputs.n_excitation));
    println!("omega_hz      = {}", fmt(est.omega_hz));
    println!("delta_x1_m    = {}", fmt(est.delta_x1_m));
    println!("energy_ev     = {}", fmt(est.energy_ev));
    if let Some(path) = args.out.out {
        let table = output::table_csv(
            "scales",
            &[("platform".into(), platform.clone())],
            &[
                "mass_kg",
                "c_eff_m_per_s",
                "epsilon",
                "n_excitation",
                "omega_hz",
                "delta_x1_m",
                "energy_ev",
            ],
            &[vec![
                fmt(est.inputs.mass_kg),
                fmt(est.inputs.c_eff_m_per_s),
                fmt(est.inputs.epsilon),
                fmt(est.inputs.n_excitation),
                fmt(est.omega_hz),
                fmt(est.delta_x1_m),
                fmt(est.energy_ev),
            ]],
        );
        write_out(&path, &table)?;
    }
    Ok(())
}

fn cmd_custom(args: CustomArgs) -> Result<()> {
    let file = FileConfig::load(args.fig2.out.config.as_deref())?;
    let scheme = file.get("scheme", args.scheme.clone(), "fw_optical".to_string())?;
    match scheme.as_str() {
        "fw_optical" | "fw" => {
            let run = RunArgs {
                epsilon: args.fig2.epsilon.as_deref().map(|s| s.parse()).transpose()?,
                alpha: args.fig2.alpha,
                c1: args.fig2.c1,
                c2: args.fig2.c2,
                beta: args.fig2.beta,
                g: args.fig2.g,
                omega_b: args.fig2.omega_b,
                osc_dim: args.osc_dim,
                probe_dim: args.fig2.probe_dim,
                t_max: args.fig2.t_max,
                samples: args.fig2.samples,
                out: args.fig2.out.clone(),
            };
            cmd_fig1(run)
        }
        "weak" => cmd_fig2(args.fig2, "custom_weak"),
        other => anyhow::bail!(CoreError::Config(format!(
            "unknown scheme '{other}' (fw_optical | weak)"
        ))),
    }
}

fn default_name(stem: &str, format: Format) -> String {
    match format {
        Format::Csv => format!("{stem}.csv"),
        Format::Json => format!("{stem}.json"),
    }
}
