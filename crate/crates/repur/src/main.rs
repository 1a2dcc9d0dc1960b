//! Command-line surface: state generation, entropy and entropy-power
//! evaluation, uncertainty-product sweeps, information scans, cumulants,
//! Gram–Charlier reconstruction, tail fits, and canned reproduction runs.

use std::collections::HashMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use repur::cumulants::{
    cumulants_for_density, cumulants_for_density_richardson, cumulants_from_scan,
    gram_charlier_reconstruct, CumulantSet, DEFAULT_DELTA,
};
use repur::grid::{
    density_from_amplitude, format_sig, round_sig, write_density_csv, Grid1D, SampledAmplitude,
    SampledDensity,
};
use repur::infoscan::{information_scan, write_scan_csv, InformationScan, DEFAULT_SCAN_BINS};
use repur::renyi::{self, EntropyIndex};
use repur::repur::{
    default_r_grid, repur_product, repur_sweep, write_sweep_csv, ExtReal, RepurTable,
};
use repur::states::{cauchy_pltwp, gaussian_state, squeezed_superposition};
use repur::tails::{classify_tail, fit_power_tail, fit_stretched_tail, FittedTail, TailFit};
use repur::transform::fourier_conjugate;
use repur::{Error, Result};

#[derive(Parser)]
#[command(name = "repur", about = "Rényi entropy powers and uncertainty products on 1-D grids")]
struct Cli {
    /// Emit JSON on stdout (and JSON error objects on stderr).
    #[arg(long, global = true)]
    json: bool,
    /// Emit CSV on stdout.
    #[arg(long, global = true)]
    csv: bool,
    /// Reduced Planck constant.
    #[arg(long, global = true)]
    hbar: Option<f64>,
    /// key=value configuration file; flags take precedence over it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StateKind {
    Gaussian,
    Cauchy,
    Squeezed,
    Uniform,
}

#[derive(Args)]
struct StateArgs {
    /// Reference state family.
    #[arg(long, value_enum)]
    state: StateKind,
    /// Gaussian width.
    #[arg(long)]
    sigma: Option<f64>,
    /// Gaussian center.
    #[arg(long)]
    center: Option<f64>,
    /// Cauchy half-width.
    #[arg(long)]
    gamma: Option<f64>,
    /// Cauchy location.
    #[arg(long)]
    m: Option<f64>,
    /// Squeeze parameter.
    #[arg(long)]
    zeta: Option<f64>,
    /// Oscillator frequency of the squeezed superposition.
    #[arg(long)]
    omega: Option<f64>,
    /// Uniform support length.
    #[arg(long)]
    length: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Emit the sampled density of a reference state as CSV.
    State {
        #[command(flatten)]
        state: StateArgs,
        /// Emit the momentum-side density instead.
        #[arg(long)]
        momentum: bool,
    },
    /// Rényi entropy of the state's density, in bits.
    Entropy {
        #[command(flatten)]
        state: StateArgs,
        /// Entropy index p > 0, or "inf".
        #[arg(long)]
        index: String,
        #[arg(long)]
        momentum: bool,
    },
    /// Rényi entropy power of the state's density.
    Power {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long)]
        index: String,
        #[arg(long)]
        momentum: bool,
    },
    /// Entropy-power uncertainty product at index r, or a full sweep.
    Repur {
        #[command(flatten)]
        state: StateArgs,
        /// Momentum-side index offset r in [-1/2, ∞), or "inf".
        #[arg(long)]
        r: Option<String>,
        /// Sweep the default index grid.
        #[arg(long)]
        sweep: bool,
    },
    /// Information scan (f, g) of the state's density.
    Scan {
        #[command(flatten)]
        state: StateArgs,
        /// Number of information bins.
        #[arg(long)]
        bins: Option<usize>,
        /// Moving-average width applied to g before output (odd, 1 = off).
        #[arg(long)]
        smooth: Option<usize>,
    },
    /// Cumulants of the information variable.
    Cumulants {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long)]
        delta: Option<f64>,
        /// Highest cumulant order.
        #[arg(long)]
        order: Option<usize>,
        /// gldf (entropy-power tower) or scan (information moments).
        #[arg(long, default_value = "gldf")]
        source: String,
        /// One Richardson step at delta/2 (gldf only).
        #[arg(long)]
        richardson: bool,
    },
    /// Gram–Charlier reconstruction of the information PDF.
    Reconstruct {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long)]
        order: Option<usize>,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        bins: Option<usize>,
    },
    /// Fit tail models to the information PDF.
    Tailfit {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long)]
        bins: Option<usize>,
        /// auto (model selection), power, or stretched.
        #[arg(long, default_value = "auto")]
        model: String,
        /// Explicit fit window (bits); both required together.
        #[arg(long)]
        window_lo: Option<f64>,
        #[arg(long)]
        window_hi: Option<f64>,
    },
    /// Canned reproduction runs.
    Reproduce {
        /// fig1, eq30, or fig-s3.
        target: String,
    },
}

struct Config {
    map: HashMap<String, String>,
}

impl Config {
    fn load(path: Option<&PathBuf>) -> Result<Self> {
        let mut map = HashMap::new();
        if let Some(path) = path {
            let text = std::fs::read_to_string(path)?;
            for line in text.lines() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (key, value) = line.split_once('=').ok_or_else(|| {
                    Error::OutOfRange(format!("config line is not key=value: {line}"))
                })?;
                map.insert(key.trim().to_string(), value.trim().to_string());
            }
        }
        Ok(Config { map })
    }

    fn f64(&self, key: &str, flag: Option<f64>, default: f64) -> Result<f64> {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.map.get(key) {
            Some(raw) => raw
                .parse()
                .map_err(|_| Error::OutOfRange(format!("config {key}={raw} is not a number"))),
            None => Ok(default),
        }
    }

    fn usize(&self, key: &str, flag: Option<usize>, default: usize) -> Result<usize> {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.map.get(key) {
            Some(raw) => raw
                .parse()
                .map_err(|_| Error::OutOfRange(format!("config {key}={raw} is not an integer"))),
            None => Ok(default),
        }
    }
}

enum Format {
    Plain,
    Json,
    Csv,
}

fn build_amplitude(args: &StateArgs, cfg: &Config, hbar: f64) -> Result<(String, SampledAmplitude)> {
    match args.state {
        StateKind::Gaussian => {
            let sigma = cfg.f64("sigma", args.sigma, 1.0)?;
            let center = cfg.f64("center", args.center, 0.0)?;
            Ok((format!("gaussian sigma={sigma}"), gaussian_state(sigma, center, hbar)?))
        }
        StateKind::Cauchy => {
            let gamma = cfg.f64("gamma", args.gamma, 1.0)?;
            let m = cfg.f64("m", args.m, 0.0)?;
            Ok((format!("cauchy gamma={gamma} m={m}"), cauchy_pltwp(gamma, m, hbar)?.psi))
        }
        StateKind::Squeezed => {
            let zeta = cfg.f64("zeta", args.zeta, 1.0)?;
            let omega = cfg.f64("omega", args.omega, 1.0)?;
            Ok((format!("squeezed zeta={zeta}"), squeezed_superposition(zeta, omega, hbar)?.psi))
        }
        StateKind::Uniform => Err(Error::OutOfRange(
            "the uniform state is a density without an amplitude realization".into(),
        )),
    }
}

fn build_density(
    args: &StateArgs,
    cfg: &Config,
    hbar: f64,
    momentum: bool,
) -> Result<(String, SampledDensity)> {
    if args.state == StateKind::Uniform {
        if momentum {
            return Err(Error::OutOfRange(
                "the uniform state has no momentum realization".into(),
            ));
        }
        let length = cfg.f64("length", args.length, 1.0)?;
        if !(length > 0.0) {
            return Err(Error::OutOfRange(format!("length must be > 0, got {length}")));
        }
        let n = 4096;
        let grid = Grid1D::new(0.0, length / n as f64, n)?;
        let density = SampledDensity::new(grid, vec![1.0 / length; n])?;
        return Ok((format!("uniform length={length}"), density));
    }
    let (label, psi) = build_amplitude(args, cfg, hbar)?;
    if momentum {
        let psihat = fourier_conjugate(&psi, hbar)?;
        Ok((format!("{label} (momentum)"), density_from_amplitude(&psihat)))
    } else {
        Ok((label, density_from_amplitude(&psi)))
    }
}

fn parse_entropy_index(raw: &str) -> Result<EntropyIndex> {
    if raw.eq_ignore_ascii_case("inf") || raw.eq_ignore_ascii_case("infinity") {
        return Ok(EntropyIndex::Infinity);
    }
    let p: f64 = raw
        .parse()
        .map_err(|_| Error::OutOfRange(format!("entropy index must be a number or inf, got {raw}")))?;
    EntropyIndex::finite(p)
}

fn parse_ext_real(raw: &str) -> Result<ExtReal> {
    if raw.eq_ignore_ascii_case("inf") || raw.eq_ignore_ascii_case("infinity") {
        return Ok(ExtReal::Inf);
    }
    let r: f64 = raw
        .parse()
        .map_err(|_| Error::OutOfRange(format!("index r must be a number or inf, got {raw}")))?;
    Ok(ExtReal::Finite(r))
}

fn smooth_values(values: &[f64], width: usize) -> Result<Vec<f64>> {
    if width == 0 || width % 2 == 0 {
        return Err(Error::OutOfRange(format!("smoothing width must be odd, got {width}")));
    }
    if width == 1 {
        return Ok(values.to_vec());
    }
    let half = width / 2;
    let n = values.len();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let lo = k.saturating_sub(half);
        let hi = (k + half).min(n - 1);
        out.push(values[lo..=hi].iter().sum::<f64>() / (hi - lo + 1) as f64);
    }
    Ok(out)
}

fn scalar_out(format: &Format, name: &str, value: f64) {
    match format {
        Format::Plain => println!("{}", format_sig(value)),
        Format::Json => println!("{}", json!({ name: round_sig(value) })),
        Format::Csv => println!("{name}\n{}", format_sig(value)),
    }
}

fn entropy_value(d: &SampledDensity, idx: EntropyIndex, want_power: bool) -> Result<f64> {
    let res = renyi::evaluate(d, idx);
    if res.diverged {
        return Err(Error::NonFinitePower { k: 0, value: res.power });
    }
    Ok(if want_power { res.power } else { res.entropy_bits })
}

fn scan_json(scan: &InformationScan) -> serde_json::Value {
    json!({
        "onset": round_sig(scan.onset),
        "bin_width": round_sig(scan.x_grid.dx),
        "overflow_mass": round_sig(scan.overflow_mass),
        "x_bits": scan.x_grid.coords().map(round_sig).collect::<Vec<_>>(),
        "f": scan.f.iter().map(|v| round_sig(*v)).collect::<Vec<_>>(),
        "g": scan.g.iter().map(|v| round_sig(*v)).collect::<Vec<_>>(),
    })
}

fn sweep_out(format: &Format, table: &RepurTable) -> Result<()> {
    match format {
        Format::Json => println!("{}", serde_json::to_string(table).expect("serializable")),
        _ => {
            let stdout = std::io::stdout();
            write_sweep_csv(stdout.lock(), table)?;
        }
    }
    Ok(())
}

fn tailfit_json(fit: &TailFit) -> serde_json::Value {
    let (model, params) = match fit.model {
        FittedTail::PowerLaw { alpha, c_sum } => (
            "power_law",
            json!({ "alpha": round_sig(alpha), "c_sum": round_sig(c_sum) }),
        ),
        FittedTail::Stretched { a, beta, d_sum } => (
            "stretched",
            json!({ "a": round_sig(a), "beta": round_sig(beta), "d_sum": round_sig(d_sum) }),
        ),
    };
    json!({
        "model": model,
        "params": params,
        "window": [round_sig(fit.window.0), round_sig(fit.window.1)],
        "residual": round_sig(fit.residual),
        "ambiguous": fit.ambiguous,
    })
}

fn cumulants_json(set: &CumulantSet) -> serde_json::Value {
    json!({
        "delta": round_sig(set.delta),
        "D": set.dim,
        "kappa": set.kappa.iter().map(|v| round_sig(*v)).collect::<Vec<_>>(),
        "source": match set.source {
            repur::cumulants::CumulantSource::Gldf => "gldf",
            repur::cumulants::CumulantSource::Scan => "scan",
        },
    })
}

fn run(cli: &Cli) -> Result<()> {
    let cfg = Config::load(cli.config.as_ref())?;
    let hbar = cfg.f64("hbar", cli.hbar, 1.0)?;
    if !(hbar > 0.0) {
        return Err(Error::OutOfRange(format!("hbar must be > 0, got {hbar}")));
    }
    let format = if cli.json {
        Format::Json
    } else if cli.csv {
        Format::Csv
    } else {
        Format::Plain
    };

    match &cli.command {
        Command::State { state, momentum } => {
            let (_, density) = build_density(state, &cfg, hbar, *momentum)?;
            match format {
                Format::Json => {
                    let values: Vec<f64> = density.values.iter().map(|v| round_sig(*v)).collect();
                    let coords: Vec<f64> = density.grid.coords().map(round_sig).collect();
                    println!("{}", json!({ "x": coords, "density": values }));
                }
                _ => {
                    let stdout = std::io::stdout();
                    write_density_csv(stdout.lock(), &density)?;
                }
            }
        }
        Command::Entropy { state, index, momentum } => {
            let (_, density) = build_density(state, &cfg, hbar, *momentum)?;
            let value = entropy_value(&density, parse_entropy_index(index)?, false)?;
            scalar_out(&format, "entropy_bits", value);
        }
        Command::Power { state, index, momentum } => {
            let (_, density) = build_density(state, &cfg, hbar, *momentum)?;
            let value = entropy_value(&density, parse_entropy_index(index)?, true)?;
            scalar_out(&format, "power", value);
        }
        Command::Repur { state, r, sweep } => {
            let (label, psi) = build_amplitude(state, &cfg, hbar)?;
            if *sweep {
                let table = repur_sweep(&psi, &default_r_grid(), hbar, &label)?;
                sweep_out(&format, &table)?;
            } else {
                let raw = r.as_deref().ok_or_else(|| {
                    Error::OutOfRange("either --r or --sweep is required".into())
                })?;
                let row = repur_product(&psi, parse_ext_real(raw)?, hbar)?;
                match format {
                    Format::Json => println!("{}", serde_json::to_string(&row).expect("serializable")),
                    Format::Csv => {
                        let table = RepurTable { rows: vec![row], hbar, state_label: label };
                        let stdout = std::io::stdout();
                        write_sweep_csv(stdout.lock(), &table)?;
                    }
                    Format::Plain => println!("{}", row.product.fmt_csv()),
                }
            }
        }
        Command::Scan { state, bins, smooth } => {
            let (_, density) = build_density(state, &cfg, hbar, false)?;
            let bins = cfg.usize("bins", *bins, DEFAULT_SCAN_BINS)?;
            let smooth = cfg.usize("smooth", *smooth, 1)?;
            let mut scan = information_scan(&density, bins)?;
            scan.g = smooth_values(&scan.g, smooth)?;
            match format {
                Format::Json => println!("{}", scan_json(&scan)),
                _ => {
                    let stdout = std::io::stdout();
                    write_scan_csv(stdout.lock(), &scan)?;
                }
            }
        }
        Command::Cumulants { state, delta, order, source, richardson } => {
            let (_, density) = build_density(state, &cfg, hbar, false)?;
            let delta = cfg.f64("delta", *delta, DEFAULT_DELTA)?;
            let order = cfg.usize("order", *order, 3)?;
            let set = match source.as_str() {
                "gldf" => {
                    if *richardson {
                        cumulants_for_density_richardson(&density, delta, order)?
                    } else {
                        cumulants_for_density(&density, delta, order)?
                    }
                }
                "scan" => {
                    let scan = information_scan(&density, 32768)?;
                    cumulants_from_scan(&scan, order)?
                }
                other => {
                    return Err(Error::OutOfRange(format!(
                        "source must be gldf or scan, got {other}"
                    )))
                }
            };
            match format {
                Format::Csv => {
                    println!("n,kappa");
                    for (k, v) in set.kappa.iter().enumerate() {
                        println!("{},{}", k + 1, format_sig(*v));
                    }
                }
                _ => println!("{}", cumulants_json(&set)),
            }
        }
        Command::Reconstruct { state, order, delta, bins } => {
            let (_, density) = build_density(state, &cfg, hbar, false)?;
            let delta = cfg.f64("delta", *delta, DEFAULT_DELTA)?;
            let order = cfg.usize("order", *order, 3)?;
            let bins = cfg.usize("bins", *bins, DEFAULT_SCAN_BINS)?;
            let set = cumulants_for_density(&density, delta, order)?;
            let model = gram_charlier_reconstruct(&set, order)?;
            let scan = information_scan(&density, bins)?;
            let (reconstructed, clipped) = model.sample(&scan.x_grid);
            match format {
                Format::Json => {
                    println!(
                        "{}",
                        json!({
                            "a": round_sig(model.a),
                            "order": model.order,
                            "clipped_mass": round_sig(clipped),
                            "x_bits": scan.x_grid.coords().map(round_sig).collect::<Vec<_>>(),
                            "g_reference": scan.x_grid.coords()
                                .map(|x| round_sig(model.reference(x)))
                                .collect::<Vec<_>>(),
                            "g_reconstructed": reconstructed.iter().map(|v| round_sig(*v)).collect::<Vec<_>>(),
                        })
                    );
                }
                _ => {
                    println!("x_bits,g_reference,g_reconstructed");
                    for (k, v) in reconstructed.iter().enumerate() {
                        let x = scan.x_grid.coord(k);
                        println!(
                            "{},{},{}",
                            format_sig(x),
                            format_sig(model.reference(x)),
                            format_sig(*v)
                        );
                    }
                }
            }
        }
        Command::Tailfit { state, bins, model, window_lo, window_hi } => {
            let (_, density) = build_density(state, &cfg, hbar, false)?;
            let bins = cfg.usize("bins", *bins, 512)?;
            let scan = information_scan(&density, bins)?;
            let fit = match (model.as_str(), window_lo, window_hi) {
                ("auto", None, None) => classify_tail(&scan)?,
                ("power", Some(lo), Some(hi)) => fit_power_tail(&scan, (*lo, *hi))?,
                ("stretched", Some(lo), Some(hi)) => fit_stretched_tail(&scan, (*lo, *hi))?,
                ("power" | "stretched", _, _) => {
                    return Err(Error::OutOfRange(
                        "--window-lo and --window-hi are required for explicit fits".into(),
                    ))
                }
                (other, _, _) => {
                    return Err(Error::OutOfRange(format!(
                        "model must be auto, power or stretched, got {other}"
                    )))
                }
            };
            println!("{}", tailfit_json(&fit));
        }
        Command::Reproduce { target } => reproduce(target, &cfg, hbar, &format)?,
    }
    Ok(())
}

/// Squeezed sweeps for zeta in {1, 2, 3}, prefixed by the zeta column.
fn reproduce_fig1(hbar: f64, format: &Format) -> Result<()> {
    let mut tables = Vec::new();
    for zeta in [1.0, 2.0, 3.0] {
        let st = squeezed_superposition(zeta, 1.0, hbar)?;
        tables.push((zeta, repur_sweep(&st.psi, &default_r_grid(), hbar, "squeezed")?));
    }
    match format {
        Format::Json => {
            let body: Vec<_> = tables
                .iter()
                .map(|(zeta, table)| json!({ "zeta": zeta, "table": table }))
                .collect();
            println!("{}", serde_json::to_string(&body).expect("serializable"));
        }
        _ => {
            println!("zeta,r,t,power_x,power_p,product,gap,saturated");
            let stdout = std::io::stdout();
            let mut out = stdout.lock();
            for (zeta, table) in &tables {
                let mut buf = Vec::new();
                write_sweep_csv(&mut buf, table)?;
                let text = String::from_utf8(buf).expect("csv is utf8");
                for line in text.lines().skip(1) {
                    writeln!(out, "{},{}", format_sig(*zeta), line)?;
                }
            }
        }
    }
    Ok(())
}

/// Cauchy Shannon product and its ratio to 0.0052 π⁴ ħ².
fn reproduce_eq30(hbar: f64, format: &Format) -> Result<()> {
    let st = cauchy_pltwp(1.0, 0.0, hbar)?;
    let row = repur_product(&st.psi, ExtReal::Finite(0.0), hbar)?;
    let product = match row.product {
        repur::repur::Product::Finite(v) => v,
        other => return Err(Error::OutOfRange(format!("expected finite product, got {other:?}"))),
    };
    let reference = 0.0052 * std::f64::consts::PI.powi(4) * hbar * hbar;
    match format {
        Format::Json => println!(
            "{}",
            json!({
                "product": round_sig(product),
                "reference": round_sig(reference),
                "ratio": round_sig(product / reference),
            })
        ),
        Format::Csv => println!(
            "product,reference,ratio\n{},{},{}",
            format_sig(product),
            format_sig(reference),
            format_sig(product / reference)
        ),
        Format::Plain => println!(
            "product = {}  reference = {}  ratio = {}",
            format_sig(product),
            format_sig(reference),
            format_sig(product / reference)
        ),
    }
    Ok(())
}

/// Cauchy sweeps over (gamma, m) combinations.
fn reproduce_fig_s3(hbar: f64, format: &Format) -> Result<()> {
    let mut tables = Vec::new();
    for gamma in [0.5, 1.0, 2.0] {
        for m in [0.0, 1.0] {
            let st = cauchy_pltwp(gamma, m, hbar)?;
            let label = format!("cauchy gamma={gamma} m={m}");
            tables.push((gamma, m, repur_sweep(&st.psi, &default_r_grid(), hbar, &label)?));
        }
    }
    match format {
        Format::Json => {
            let body: Vec<_> = tables
                .iter()
                .map(|(gamma, m, table)| json!({ "gamma": gamma, "m": m, "table": table }))
                .collect();
            println!("{}", serde_json::to_string(&body).expect("serializable"));
        }
        _ => {
            println!("gamma,m,r,t,power_x,power_p,product,gap,saturated");
            let stdout = std::io::stdout();
            let mut out = stdout.lock();
            for (gamma, m, table) in &tables {
                let mut buf = Vec::new();
                write_sweep_csv(&mut buf, table)?;
                let text = String::from_utf8(buf).expect("csv is utf8");
                for line in text.lines().skip(1) {
                    writeln!(out, "{},{},{}", format_sig(*gamma), format_sig(*m), line)?;
                }
            }
        }
    }
    Ok(())
}

fn reproduce(target: &str, _cfg: &Config, hbar: f64, format: &Format) -> Result<()> {
    match target {
        "fig1" => reproduce_fig1(hbar, format),
        "eq30" => reproduce_eq30(hbar, format),
        "fig-s3" | "figS3" | "figs3" => reproduce_fig_s3(hbar, format),
        other => Err(Error::OutOfRange(format!(
            "unknown reproduction target {other}; expected fig1, eq30 or fig-s3"
        ))),
    }
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        // A finite value was required but the computation diverged.
        Error::NonFinitePower { .. } => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    if let Ok(raw) = std::env::var("REPUR_THREADS") {
        if let Ok(n) = raw.parse::<usize>() {
            if n > 0 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            if cli.json {
                eprintln!("{}", json!({ "error": err.to_string() }));
            } else {
                eprintln!("error: {err}");
            }
            ExitCode::from(exit_code_for(&err))
        }
    }
}
