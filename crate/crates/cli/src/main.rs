//! Command-line frontend: spectrum management, thermo tables, interconnection
//! curves, temperature queries, process simulation, entropy measurement,
//! accessibility-graph queries, and the certification suite.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use entropometer_core::entropy::{
    entropy_difference, entropy_value, irreversible_bound, QuadratureConfig,
};
use entropometer_core::extension::AccessibilityGraph;
use entropometer_core::harness::{run_suite, SuiteConfig};
use entropometer_core::interconnect::{
    df11, f11, temperature, DerivativeMethod, SePoint, TemperatureScale,
};
use entropometer_core::processes::{simulate_standard_process, ModelState};
use entropometer_core::spectra::{compose, EnergySpectrum};
use entropometer_core::thermo;

/// Format a float with 17 significant digits, locale-independent.
fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Parser)]
#[command(name = "entropometer", version, about = "Operational temperature and entropy on finite spectra")]
struct Cli {
    /// Boltzmann constant multiplying entropy/heat-capacity outputs
    /// (default 1: entropies in units of k)
    #[arg(long = "kB", default_value_t = 1.0, global = true)]
    k_b: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Spectrum management
    #[command(subcommand)]
    Spectrum(SpectrumCmd),
    /// Canonical thermodynamics tables
    #[command(subcommand)]
    Thermo(ThermoCmd),
    /// Interconnection-map curves
    #[command(subcommand)]
    F11(F11Cmd),
    /// Temperature of a stable-equilibrium point on a reference scale
    Temperature(TemperatureArgs),
    /// Standard weight processes
    #[command(subcommand)]
    Process(ProcessCmd),
    /// Operational entropy measurements
    #[command(subcommand)]
    Entropy(EntropyCmd),
    /// Accessibility-graph extension queries
    #[command(subcommand)]
    Extend(ExtendCmd),
    /// Certification suite
    #[command(subcommand)]
    Verify(VerifyCmd),
}

#[derive(Subcommand)]
enum SpectrumCmd {
    /// Print a JSON summary of a spectrum file
    Info { file: PathBuf },
    /// Compose two spectra and write the product spectrum
    Compose {
        file_a: PathBuf,
        file_b: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum ThermoCmd {
    /// CSV table of beta,lnZ,E,S,C over a beta grid
    Table {
        spectrum: PathBuf,
        /// Grid a:b:n — n points from a to b inclusive
        #[arg(long)]
        beta_grid: String,
    },
}

#[derive(Subcommand)]
enum F11Cmd {
    /// CSV curve E_B,E_C,df_analytic,df_fd over an E_B grid
    Curve {
        /// Anchor of system B as <spectrum-file>:<energy>
        #[arg(long)]
        b: String,
        /// Anchor of system C as <spectrum-file>:<energy>
        #[arg(long)]
        c: String,
        /// Grid a:b:n over E_B
        #[arg(long)]
        grid: String,
    },
}

#[derive(Args)]
struct TemperatureArgs {
    /// Queried point as <spectrum-file>:<energy>
    #[arg(long)]
    point: String,
    /// Reference scale as <spectrum-file>:<energy>:<Tref>, or "triple-point"
    #[arg(long, default_value = "triple-point")]
    reference: String,
}

#[derive(Subcommand)]
enum ProcessCmd {
    /// Run a standard weight process; outcome as one JSON line
    Run {
        #[arg(long)]
        a1: PathBuf,
        #[arg(long)]
        a2: PathBuf,
        /// Auxiliary anchor as <spectrum-file>:<energy>
        #[arg(long)]
        b: String,
        #[arg(long, default_value_t = 0.0)]
        sigma: f64,
    },
}

#[derive(Subcommand)]
enum EntropyCmd {
    /// Measure S(a2) − S(a1) through a reversible standard process
    Diff {
        #[arg(long)]
        a1: PathBuf,
        #[arg(long)]
        a2: PathBuf,
        /// Auxiliary anchor as <spectrum-file>:<energy>
        #[arg(long)]
        b: String,
        /// Reference scale as <spectrum-file>:<energy>:<Tref>, or "triple-point"
        #[arg(long, default_value = "triple-point")]
        reference: String,
    },
    /// Absolute entropy of a1 given reference state a0 with entropy s0
    Value {
        #[arg(long)]
        a1: PathBuf,
        #[arg(long)]
        a0: PathBuf,
        #[arg(long)]
        s0: f64,
        #[arg(long)]
        b: String,
        #[arg(long, default_value = "triple-point")]
        reference: String,
    },
    /// Bracket S(a2) − S(a1) between two irreversible protocols
    Bracket {
        #[arg(long)]
        a1: PathBuf,
        #[arg(long)]
        a2: PathBuf,
        /// Forward auxiliary anchor as <spectrum-file>:<energy>
        #[arg(long)]
        b: String,
        /// Backward auxiliary anchor; defaults to --b
        #[arg(long)]
        b_back: Option<String>,
        #[arg(long)]
        sigma_f: f64,
        #[arg(long)]
        sigma_b: f64,
        #[arg(long, default_value = "triple-point")]
        reference: String,
    },
}

#[derive(Subcommand)]
enum ExtendCmd {
    /// Entropy range of a node in an accessibility graph
    Range { graph: PathBuf, node: String },
    /// Validate a graph against the entropy-consistency conditions
    Check { graph: PathBuf },
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Run every certification check
    All {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        instances: usize,
        /// Write the full JSON report here
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_grid(spec: &str) -> Result<(f64, f64, usize)> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        bail!("grid must be a:b:n, got {spec:?}");
    }
    let a: f64 = parts[0].parse().context("grid start is not a number")?;
    let b: f64 = parts[1].parse().context("grid end is not a number")?;
    let n: usize = parts[2].parse().context("grid count is not an integer")?;
    if n < 1 {
        bail!("grid needs at least 1 point");
    }
    Ok((a, b, n))
}

fn grid_points(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Parse "<spectrum-file>:<energy>" (path may contain ':' — the energy is
/// the final segment).
fn parse_se_point(spec: &str) -> Result<SePoint> {
    let (path, energy) = spec
        .rsplit_once(':')
        .ok_or_else(|| anyhow!("expected <spectrum-file>:<energy>, got {spec:?}"))?;
    let energy: f64 = energy
        .parse()
        .with_context(|| format!("energy in {spec:?} is not a number"))?;
    let spectrum = EnergySpectrum::load(path)?;
    Ok(SePoint::new(spectrum, energy)?)
}

fn parse_scale(spec: &str) -> Result<TemperatureScale> {
    if spec == "triple-point" {
        return Ok(TemperatureScale::triple_point());
    }
    let (rest, t_ref) = spec
        .rsplit_once(':')
        .ok_or_else(|| anyhow!("expected <spectrum-file>:<energy>:<Tref> or triple-point"))?;
    let t_ref: f64 = t_ref
        .parse()
        .with_context(|| format!("Tref in {spec:?} is not a number"))?;
    Ok(TemperatureScale::new(parse_se_point(rest)?, t_ref)?)
}

#[derive(Deserialize)]
struct StateFile {
    spectrum: String,
    probs: Vec<f64>,
}

fn load_state(path: &Path) -> Result<ModelState> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read state file {}", path.display()))?;
    let raw: StateFile = serde_json::from_str(&text)
        .with_context(|| format!("malformed state file {}", path.display()))?;
    // resolve the spectrum path relative to the state file when needed
    let spectrum_path = {
        let direct = PathBuf::from(&raw.spectrum);
        if direct.exists() {
            direct
        } else {
            path.parent().unwrap_or(Path::new(".")).join(&raw.spectrum)
        }
    };
    let spectrum = EnergySpectrum::load(&spectrum_path)?;
    Ok(ModelState::new(spectrum, raw.probs)?)
}

/// ENTROPOMETER_TOL overrides the default measurement tolerances.
fn quad_config() -> Result<QuadratureConfig> {
    let mut quad = QuadratureConfig::default();
    if let Ok(tol) = std::env::var("ENTROPOMETER_TOL") {
        let tol: f64 = tol
            .parse()
            .context("ENTROPOMETER_TOL is not a number")?;
        if !(tol > 0.0) {
            bail!("ENTROPOMETER_TOL must be positive");
        }
        quad.abs_tol = tol;
        quad.cross_check_tol = tol.max(1e-8);
    }
    Ok(quad)
}

fn run(cli: Cli) -> Result<i32> {
    if !(cli.k_b > 0.0) {
        bail!("--kB must be positive");
    }
    let k_b = cli.k_b;
    match cli.command {
        Command::Spectrum(SpectrumCmd::Info { file }) => {
            let s = EnergySpectrum::load(&file)?;
            println!(
                "{{\"name\":{},\"levels\":{},\"microstates\":{},\"E_min\":{},\"E_inf\":{}}}",
                serde_json::to_string(s.name()).unwrap(),
                s.levels().len(),
                s.microstate_count(),
                fmt(s.min_energy()),
                fmt(s.infinite_temperature_energy()),
            );
        }
        Command::Spectrum(SpectrumCmd::Compose { file_a, file_b, out }) => {
            let a = EnergySpectrum::load(&file_a)?;
            let b = EnergySpectrum::load(&file_b)?;
            let c = compose(&a, &b)?;
            c.save(&out)?;
        }
        Command::Thermo(ThermoCmd::Table { spectrum, beta_grid }) => {
            let s = EnergySpectrum::load(&spectrum)?;
            let (a, b, n) = parse_grid(&beta_grid)?;
            println!("beta,lnZ,E,S,C");
            for beta in grid_points(a, b, n) {
                let p = thermo::thermo_point(&s, beta)?;
                println!(
                    "{},{},{},{},{}",
                    fmt(beta),
                    fmt(p.ln_z),
                    fmt(p.energy),
                    fmt(k_b * p.entropy),
                    fmt(k_b * p.heat_capacity)
                );
            }
        }
        Command::F11(F11Cmd::Curve { b, c, grid }) => {
            let b = parse_se_point(&b)?;
            let c = parse_se_point(&c)?;
            let (lo, hi, n) = parse_grid(&grid)?;
            println!("E_B,E_C,df_analytic,df_fd");
            for e_b in grid_points(lo, hi, n) {
                let e_c = f11(&b, &c, e_b)?;
                let da = df11(&b, &c, e_b, DerivativeMethod::Analytic)?;
                let dfd = df11(&b, &c, e_b, DerivativeMethod::FiniteDifference { step: None })?;
                println!("{},{},{},{}", fmt(e_b), fmt(e_c), fmt(da), fmt(dfd));
            }
        }
        Command::Temperature(args) => {
            let point = parse_se_point(&args.point)?;
            let scale = parse_scale(&args.reference)?;
            let t = temperature(&point, &scale, DerivativeMethod::Analytic)?;
            println!("{}", fmt(t));
        }
        Command::Process(ProcessCmd::Run { a1, a2, b, sigma }) => {
            let a1 = load_state(&a1)?;
            let a2 = load_state(&a2)?;
            let b = parse_se_point(&b)?;
            let outcome = simulate_standard_process(&a1, &a2, &b, sigma)?;
            println!(
                "{{\"E_B_initial\":{},\"E_B_final\":{},\"sigma\":{},\"reversible\":{}}}",
                fmt(outcome.e_b_initial),
                fmt(outcome.e_b_final),
                fmt(outcome.sigma),
                outcome.reversible
            );
        }
        Command::Entropy(EntropyCmd::Diff { a1, a2, b, reference }) => {
            let a1 = load_state(&a1)?;
            let a2 = load_state(&a2)?;
            let b = parse_se_point(&b)?;
            let scale = parse_scale(&reference)?;
            let m = entropy_difference(&a1, &a2, &b, &scale, &quad_config()?)?;
            println!(
                "{{\"delta_S\":{},\"E_B1\":{},\"E_B2rev\":{},\"err_estimate\":{}}}",
                fmt(k_b * m.delta_s),
                fmt(m.e_b_initial),
                fmt(m.e_b_final_rev),
                fmt(k_b * m.quadrature_error_estimate)
            );
        }
        Command::Entropy(EntropyCmd::Value { a1, a0, s0, b, reference }) => {
            let a1 = load_state(&a1)?;
            let a0 = load_state(&a0)?;
            let b = parse_se_point(&b)?;
            let scale = parse_scale(&reference)?;
            // s0 arrives in output units; the measurement works in units k
            let s = entropy_value(&a1, &a0, s0 / k_b, &b, &scale, &quad_config()?)?;
            println!("{{\"S\":{}}}", fmt(k_b * s));
        }
        Command::Entropy(EntropyCmd::Bracket {
            a1,
            a2,
            b,
            b_back,
            sigma_f,
            sigma_b,
            reference,
        }) => {
            let a1 = load_state(&a1)?;
            let a2 = load_state(&a2)?;
            let forward = parse_se_point(&b)?;
            let backward = match b_back {
                Some(spec) => parse_se_point(&spec)?,
                None => forward.clone(),
            };
            let scale = parse_scale(&reference)?;
            let br = irreversible_bound(
                &a1, &a2, &forward, sigma_f, &backward, sigma_b, &scale, &quad_config()?,
            )?;
            println!(
                "{{\"lower\":{},\"upper\":{}}}",
                fmt(k_b * br.lower),
                fmt(k_b * br.upper)
            );
        }
        Command::Extend(ExtendCmd::Range { graph, node }) => {
            let g = AccessibilityGraph::load(&graph)?;
            g.validate()?;
            let r = g.entropy_range(&node)?;
            println!(
                "{{\"node\":{},\"low\":{},\"high\":{}}}",
                serde_json::to_string(&node).unwrap(),
                fmt(k_b * r.low),
                fmt(k_b * r.high)
            );
        }
        Command::Extend(ExtendCmd::Check { graph }) => {
            let g = AccessibilityGraph::load(&graph)?;
            g.validate()?;
            println!(
                "{{\"nodes\":{},\"status\":\"consistent\"}}",
                g.node_count()
            );
        }
        Command::Verify(VerifyCmd::All { seed, instances, out }) => {
            let cfg = SuiteConfig {
                seed,
                n_instances: instances,
                ..SuiteConfig::default()
            };
            let reports = run_suite(&cfg);
            let mut all_pass = true;
            for r in &reports {
                println!(
                    "{} {} — max residual {} vs tolerance {} over {} instances",
                    if r.pass { "PASS" } else { "FAIL" },
                    r.name,
                    fmt(r.max_residual),
                    fmt(r.tolerance),
                    r.instances
                );
                all_pass &= r.pass;
            }
            if let Some(out) = out {
                let json = serde_json::to_string_pretty(&reports).unwrap();
                std::fs::write(&out, json)
                    .with_context(|| format!("cannot write {}", out.display()))?;
            }
            if !all_pass {
                return Ok(1);
            }
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
