use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use nalgebra::Vector3;
use photon_wave::algebra::WaveVector;
use photon_wave::checks::{self, Options, DEFAULT_SEED};
use photon_wave::fieldgrid::{evolve_curl_reference, evolve_spectral, observables, FieldGrid};
use photon_wave::io::{self, RunConfig};
use photon_wave::ladder::{closure_derivation, momentum_bilinear, normal_order, render, Style};
use photon_wave::modes::{plane_waves, synthesize_field, evaluate, AmplitudeSet, ModeKey, Variant};
use photon_wave::polarization::{polarization_triad, Helicity};
use photon_wave::symmetry::{self as sym, BoostInput, BoostParams};
use photon_wave::zb::{self, Formalism};

/// `println!` that tolerates a closed stdout (e.g. piped into `head`).
macro_rules! say {
    ($($t:tt)*) => {{
        let _ = writeln!(std::io::stdout(), $($t)*);
    }};
}

#[derive(Parser)]
#[command(name = "photon-wave", version, about = "Photon wave-function toolkit")]
struct Cli {
    /// Tolerance override, `name=value`; repeatable.
    #[arg(long = "tol", value_name = "NAME=VALUE", value_parser = parse_tol, global = true)]
    tol: Vec<(String, f64)>,
    /// Seed for the randomized identity suites.
    #[arg(long, default_value_t = DEFAULT_SEED, global = true)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the matrix, polarization, mode and R/T identity suites.
    Identities {
        /// Restrict to these suites (`angular` is opt-in and slow).
        #[arg(long)]
        suite: Vec<String>,
    },
    /// Print the polarization triad of a wave vector, or run its suite.
    Polarization {
        #[arg(long, value_parser = parse_vec3)]
        k: Option<[f64; 3]>,
    },
    /// Write a field snapshot (`.csv`, anything else is binary).
    Synth {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Snapshot time; defaults to the config's t0.
        #[arg(long)]
        time: Option<f64>,
        #[arg(long, value_enum, default_value_t = VariantArg::Dual)]
        variant: VariantArg,
    },
    /// Evolve the t0 field over the config's times and write observables.
    Evolve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Method::Spectral)]
        method: Method,
    },
    /// Apply a transform and report commuting-diagram residuals.
    Symmetry {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum)]
        transform: Transform,
        /// Gauge angle.
        #[arg(long, default_value_t = 0.5)]
        theta: f64,
        #[arg(long, default_value_t = 0.5)]
        rapidity: f64,
        #[arg(long, value_parser = parse_vec3, default_value = "0,0,1")]
        axis: [f64; 3],
    },
    /// Write the momentum series and print its oscillation summary.
    Zb {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = FormalismArg::Dual)]
        formalism: FormalismArg,
        /// Add per-group columns.
        #[arg(long)]
        breakdown: bool,
    },
    /// Print symbolic derivations.
    Ladder {
        #[arg(long, value_enum)]
        derive: Derivation,
        /// Mode `n1,n2,n3:λ`; repeatable, defaults to `1,0,0:+1`.
        #[arg(long, value_parser = parse_mode)]
        mode: Vec<ModeKey>,
        /// 0 for energy, 1..=3 for momentum.
        #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..=3))]
        component: u8,
        /// Box edge lengths used for ω.
        #[arg(long, value_parser = parse_vec3, default_value = "1,1,1")]
        r#box: [f64; 3],
        #[arg(long)]
        unicode: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Spectral,
    Curl,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormalismArg {
    Dual,
    Traditional,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Dual,
    Photon,
    DualPhoton,
}

#[derive(Clone, Copy, ValueEnum)]
enum Transform {
    Parity,
    TimeReversal,
    Dual,
    Gauge,
    Boost,
}

#[derive(Clone, Copy, ValueEnum)]
enum Derivation {
    Momentum,
    Closure,
}

fn parse_tol(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s.split_once('=').ok_or("expected NAME=VALUE")?;
    let v: f64 = value.parse().map_err(|e| format!("{e}"))?;
    if !(v.is_finite() && v > 0.0) {
        return Err("tolerance must be positive".into());
    }
    Ok((name.to_string(), v))
}

fn parse_vec3(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{e}")))
        .collect::<Result<_, _>>()?;
    parts.try_into().map_err(|_| "expected three comma-separated numbers".to_string())
}

fn parse_mode(s: &str) -> Result<ModeKey, String> {
    let (n, l) = s.split_once(':').ok_or("expected n1,n2,n3:λ")?;
    let n: Vec<i64> = n
        .split(',')
        .map(|p| p.trim().parse::<i64>().map_err(|e| format!("{e}")))
        .collect::<Result<_, _>>()?;
    let n: [i64; 3] = n.try_into().map_err(|_| "expected three harmonics")?;
    let l: i64 = l.trim().trim_start_matches('+').parse().map_err(|e| format!("{e}"))?;
    let l = Helicity::from_value(l).ok_or("helicity must be -1, 0 or +1")?;
    ModeKey::new(n, l).map_err(|e| e.to_string())
}

/// A failed run: machine-readable kind plus message.
struct Failure {
    kind: &'static str,
    msg: String,
    code: u8,
}

impl From<photon_wave::Error> for Failure {
    fn from(e: photon_wave::Error) -> Self {
        Failure {
            kind: e.kind(),
            msg: e.to_string(),
            code: 2,
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        photon_wave::Error::Io(e).into()
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure {
        kind: "usage",
        msg: msg.into(),
        code: 2,
    }
}

fn violation(msg: impl Into<String>) -> Failure {
    Failure {
        kind: "tolerance",
        msg: msg.into(),
        code: 1,
    }
}

type Run = Result<(), Failure>;

struct Ctx {
    tol: BTreeMap<String, f64>,
    seed: u64,
}

impl Ctx {
    fn load(&self, path: &Path) -> Result<RunConfig, Failure> {
        let mut cfg = io::load_run_config(path)?;
        cfg.tolerances.extend(self.tol.clone());
        Ok(cfg)
    }

    fn options(&self) -> Options {
        Options {
            seed: self.seed,
            tolerances: self.tol.clone(),
        }
    }
}

/// `--out` wins, then the config's `[output]` entry for `key`.
fn output_path(out: Option<PathBuf>, cfg: &RunConfig, key: &str) -> Result<PathBuf, Failure> {
    out.or_else(|| cfg.output.get(key).cloned())
        .ok_or_else(|| usage(format!("no output path: pass --out or set output.{key}")))
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    Ok(BufWriter::new(File::create(path)?))
}

fn report_checks(list: &[checks::Check]) -> Run {
    for c in list {
        say!("{}", c.line());
    }
    let failed = list.iter().filter(|c| !c.passed()).count();
    say!("{}/{} passed", list.len() - failed, list.len());
    if failed > 0 {
        return Err(violation(format!("{failed} of {} checks failed", list.len())));
    }
    Ok(())
}

fn identities(ctx: &Ctx, suites: &[String]) -> Run {
    let default = ["algebra", "polarization", "modes", "rt"].map(String::from);
    let suites = if suites.is_empty() { &default[..] } else { suites };
    let opts = ctx.options();
    let mut all = Vec::new();
    for s in suites {
        all.extend(checks::run_suite(s, &opts)?);
    }
    report_checks(&all)
}

fn polarization(ctx: &Ctx, k: Option<[f64; 3]>) -> Run {
    let Some(k) = k else {
        return report_checks(&checks::polarization_suite(&ctx.options())?);
    };
    let triad = polarization_triad(&WaveVector::new(k))?;
    for l in [Helicity::Plus, Helicity::Zero, Helicity::Minus] {
        let e = triad.get(l);
        let parts: Vec<String> = e.iter().map(|z| format!("{:e}{:+e}i", z.re, z.im)).collect();
        say!("eps({}) = ({})", ["-1", "0", "+1"][(l.value() + 1) as usize], parts.join(", "));
    }
    Ok(())
}

fn synth(ctx: &Ctx, config: &Path, out: Option<PathBuf>, time: Option<f64>, variant: VariantArg) -> Run {
    let cfg = ctx.load(config)?;
    let path = output_path(out, &cfg, "field")?;
    let t = time.unwrap_or(cfg.time.t0);
    let variant = match variant {
        VariantArg::Dual => Variant::Dual,
        VariantArg::Photon => Variant::PhotonOnly,
        VariantArg::DualPhoton => Variant::DualPhotonOnly,
    };
    let field = synthesize_field(&cfg.amplitudes, &cfg.grid, t, variant)?;
    let mut w = create(&path)?;
    if path.extension().is_some_and(|e| e == "csv") {
        io::write_field_csv(&field, &mut w)?;
    } else {
        io::write_field_binary(&field, &mut w)?;
    }
    w.flush()?;
    let o = observables(&field);
    say!("t = {t:e}");
    say!("J0 = {:e}", o.j0);
    say!("J = {:e},{:e},{:e}", o.j[0], o.j[1], o.j[2]);
    Ok(())
}

fn evolve(ctx: &Ctx, config: &Path, out: Option<PathBuf>, method: Method) -> Run {
    let cfg = ctx.load(config)?;
    let path = output_path(out, &cfg, "observables")?;
    let t0 = cfg.time.t0;
    let start = synthesize_field(&cfg.amplitudes, &cfg.grid, t0, Variant::Dual)?;
    let step = |field: &FieldGrid, dt: f64| -> Result<FieldGrid, Failure> {
        Ok(match method {
            Method::Spectral => evolve_spectral(field, dt, 1),
            Method::Curl => evolve_curl_reference(field, dt, 1)?,
        })
    };
    let mut rows = Vec::new();
    for t in cfg.time.times() {
        rows.push((t, observables(&step(&start, t - t0)?)));
    }
    let mut w = create(&path)?;
    io::write_observables_csv(&rows, &mut w)?;
    w.flush()?;
    let j0 = rows[0].1.j0;
    let drift = rows.iter().map(|(_, o)| (o.j0 - j0).abs()).fold(0.0, f64::max) / j0.abs().max(f64::MIN_POSITIVE);
    let tol = cfg.tolerance("j0_drift", 1e-10);
    say!("samples = {}", rows.len());
    say!("j0_drift = {drift:e} (tol {tol:e})");
    if drift.is_nan() || drift > tol {
        return Err(violation(format!("J0 drift {drift:e} exceeds {tol:e}")));
    }
    Ok(())
}

fn symmetry(ctx: &Ctx, config: &Path, transform: Transform, theta: f64, rapidity: f64, axis: [f64; 3]) -> Run {
    let cfg = ctx.load(config)?;
    let (amps, grid, t) = (&cfg.amplitudes, &cfg.grid, cfg.time.t0);
    let synth = |a: &AmplitudeSet, t: f64| synthesize_field(a, grid, t, Variant::Dual);
    let mut lines: Vec<(&str, f64, f64)> = Vec::new();
    if let Transform::Boost = transform {
        let p = BoostParams::new(rapidity, axis)?;
        let boosted = sym::boost(BoostInput::Modes(amps), &p)?;
        let tol = cfg.tolerance("boost", 1e-10);
        lines.push(("symbol", boosted.symbol_residual(), tol));
        let field = synth(amps, t)?;
        if field.physicality_deviation() <= 1e-10 * field.max_abs().max(1.0) {
            let waves = plane_waves(amps, Variant::Dual)?;
            let mut worst = 0.0f64;
            for idx in [0, grid.len() / 3, 2 * grid.len() / 3] {
                let x = Vector3::from(grid.position(grid.coords(idx)));
                let (e, b) = sym::fields_of(&evaluate(&waves, t, &x));
                let (e2, b2) = sym::classical_field_boost(&e.map(|z| z.re), &b.map(|z| z.re), &p);
                let (t2, x2) = p.map_four_vector(t, &x);
                let (e3, b3) = sym::fields_of(&boosted.evaluate(t2, &x2));
                worst = worst
                    .max((e3.map(|z| z.re) - e2).amax())
                    .max((b3.map(|z| z.re) - b2).amax());
            }
            lines.push(("classical", worst, tol));
        } else {
            say!("classical skipped: field is not physical");
        }
    } else {
        let psi = synth(amps, t)?;
        let scale = psi.max_abs().max(1.0);
        let tol = cfg.tolerance("diagram", 1e-12);
        let (diagram, square, target) = match transform {
            Transform::Parity => (
                synth(&sym::parity_amplitudes(amps), t)?.max_abs_diff(&sym::parity_field(&psi)),
                sym::parity_field(&sym::parity_field(&psi)),
                psi.clone(),
            ),
            Transform::TimeReversal => (
                synth(&sym::time_reversal_amplitudes(amps), -t)?.max_abs_diff(&sym::time_reversal_field(&psi, t)),
                sym::time_reversal_field(&sym::time_reversal_field(&psi, t), -t),
                psi.clone(),
            ),
            Transform::Dual => (
                synth(&sym::dual_amplitudes(amps), t)?.max_abs_diff(&sym::dual_field(&psi)),
                sym::dual_field(&sym::dual_field(&psi)),
                psi.map(|v| -v),
            ),
            Transform::Gauge => (
                synth(&sym::gauge_amplitudes(amps, theta), t)?.max_abs_diff(&sym::gauge_field(&psi, theta)),
                sym::gauge_field(&sym::gauge_field(&psi, theta), -theta),
                psi.clone(),
            ),
            Transform::Boost => unreachable!(),
        };
        lines.push(("diagram", diagram / scale, tol));
        lines.push(("group", square.max_abs_diff(&target) / scale, tol));
    }
    let mut failed = Vec::new();
    for (name, r, tol) in &lines {
        let ok = *r <= *tol;
        say!("{} {name} residual={r:e} tol={tol:e}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            failed.push(*name);
        }
    }
    if !failed.is_empty() {
        return Err(violation(format!("residuals above tolerance: {}", failed.join(","))));
    }
    Ok(())
}

fn zb_scan(ctx: &Ctx, config: &Path, out: Option<PathBuf>, formalism: FormalismArg, breakdown: bool) -> Run {
    let cfg = ctx.load(config)?;
    let path = output_path(out, &cfg, "series")?;
    let formalism = match formalism {
        FormalismArg::Dual => Formalism::Dual,
        FormalismArg::Traditional => Formalism::Traditional,
    };
    let series = zb::momentum_series(&cfg.amplitudes, &cfg.time.times(), formalism)?;
    let mut w = create(&path)?;
    io::write_series_csv(&series, breakdown, &mut w)?;
    w.flush()?;
    let s = zb::zb_extract(&series)?;
    let scale = series.j.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
    let zero = cfg.tolerance("zb_zero", 1e-12) * scale.max(f64::MIN_POSITIVE);
    let fmt = |v: [f64; 3]| format!("{:e},{:e},{:e}", v[0], v[1], v[2]);
    say!("samples = {}", series.times.len());
    say!("constant = {}", fmt(s.constant));
    if s.zb_amplitude.iter().all(|a| a.abs() <= zero) {
        say!("zb_amplitude ≈ 0");
    } else {
        say!("zb_amplitude = {}", fmt(s.zb_amplitude));
        say!("frequency = {:e}", s.frequency);
    }
    Ok(())
}

fn ladder(derive: Derivation, modes: &[ModeKey], component: u8, box_len: [f64; 3], unicode: bool) -> Run {
    let style = if unicode { Style::Unicode } else { Style::Plain };
    let default = [ModeKey::new([1, 0, 0], Helicity::Plus)?];
    let modes = if modes.is_empty() { &default[..] } else { modes };
    match derive {
        Derivation::Momentum => {
            let p = normal_order(&momentum_bilinear(modes, component as usize, box_len)?);
            say!("{}", render(&p, style));
        }
        Derivation::Closure => {
            let mut bad = 0;
            for n in modes.iter().map(|m| m.n).collect::<std::collections::BTreeSet<_>>() {
                for line in closure_derivation(n)? {
                    bad += usize::from(!line.agrees());
                    say!("{}", line.render(style));
                }
            }
            if bad > 0 {
                return Err(violation(format!("{bad} closure lines disagree with the photon rules")));
            }
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Run {
    let ctx = Ctx {
        tol: cli.tol.into_iter().collect(),
        seed: cli.seed,
    };
    match cli.command {
        Command::Identities { suite } => identities(&ctx, &suite),
        Command::Polarization { k } => polarization(&ctx, k),
        Command::Synth { config, out, time, variant } => synth(&ctx, &config, out, time, variant),
        Command::Evolve { config, out, method } => evolve(&ctx, &config, out, method),
        Command::Symmetry { config, transform, theta, rapidity, axis } => {
            symmetry(&ctx, &config, transform, theta, rapidity, axis)
        }
        Command::Zb { config, out, formalism, breakdown } => zb_scan(&ctx, &config, out, formalism, breakdown),
        Command::Ladder { derive, mode, component, r#box, unicode } => ladder(derive, &mode, component, r#box, unicode),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help / --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.render().to_string();
            let first = msg.lines().next().unwrap_or("").trim_start_matches("error: ");
            eprintln!("error kind=usage msg={first:?}");
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error kind={} msg={:?}", f.kind, f.msg);
            ExitCode::from(f.code)
        }
    }
}
