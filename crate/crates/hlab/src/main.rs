use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use hlab_core::dyadic::{regularize_in, DEFAULT_ROOT_LEVEL};
use hlab_core::exponents::{beta_bar, mu_q, sigma, Regime};
use hlab_core::fractal::{box_dimension, cantor_set, CantorMode};
use hlab_core::potential::{bessel_potential_with, maximal, maximal_any_order, riesz_potential, riesz_potential_any_order, AdamsMode, DiamMode, KernelSpec};
use hlab_core::slicing::{phi_estimate, Identity};
use hlab_core::DistortionParams;

use hlab::cache::KernelCache;
use hlab::config::expand_config;
use hlab::error::{HlabError, Result};
use hlab::experiments::adams::{run_adams_check, AdamsConfig};
use hlab::experiments::counterexample::{run_counterexample, CounterexampleConfig, Probe};
use hlab::experiments::diam::{run_diam_check, DiamConfig};
use hlab::experiments::distortion::{run_distortion_experiment, ExperimentConfig, Scenario};
use hlab::experiments::nstar::run_nstar_slice_check;
use hlab::io::{grid_to_csv, point_set_to_csv, read_family, read_grid, read_point_set, write_json, write_text};
use hlab::report::Report;

#[derive(Parser, Debug)]
#[command(name = "hlab", version, about = "Dimension distortion of Sobolev and Bessel potential mappings")]
struct Cli {
    /// Output format for tabular results.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// key = value file; its entries act as flags placed before the
    /// command-line ones.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Critical exponent, image exponent, slice exponents.
    Exponents(ExponentsArgs),
    /// Regularize a cube family so the packing inequality holds.
    Regularize(RegularizeArgs),
    /// Box-counting dimension of a point set.
    EstimateDim(EstimateDimArgs),
    /// Apply a maximal, Riesz or Bessel operator to a grid function.
    Operators(OperatorsArgs),
    /// Empirical constants of the trace inequalities.
    AdamsCheck(AdamsArgs),
    /// Image-diameter bounds on random cubes.
    DiamCheck(DiamArgs),
    /// Probes of the lacunary counterexample.
    Counterexample(CounterexampleArgs),
    /// Cantor-set dimension distortion experiment.
    Distortion(DistortionArgs),
    /// Hölder splitting of the slice sum on regularized covers.
    Nstar(NstarArgs),
    /// Dyadic upper bound for the slice set function.
    Phi(PhiArgs),
    /// Write the endpoints of a Cantor construction as a point set.
    Cantor(CantorArgs),
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
struct ExponentsArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    p: f64,
    /// Smoothness order of a C^{k,a} map (slice exponents).
    #[arg(long)]
    k: Option<u32>,
    /// Target dimension (slice exponents).
    #[arg(long)]
    m: Option<u32>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    tau: Option<f64>,
    /// Hölder exponent `a` of the k-th derivative, in [0, 1).
    #[arg(long, default_value_t = 0.0)]
    holder_alpha: f64,
    /// Lorentz data: `alpha p >= n` suffices.
    #[arg(long)]
    lorentz: bool,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
struct RegularizeArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    #[arg(long, default_value_t = DEFAULT_ROOT_LEVEL)]
    root_level: i32,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
struct EstimateDimArgs {
    #[arg(long)]
    input: PathBuf,
    /// Inclusive level window `a..b`.
    #[arg(long, default_value = "4..10", value_parser = parse_levels)]
    levels: (i32, i32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum Operator {
    Maximal,
    Riesz,
    Bessel,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
struct OperatorsArgs {
    #[arg(long, value_enum)]
    op: Operator,
    #[arg(long)]
    input: PathBuf,
    /// Output grid CSV; standard output when absent.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Order of the operator: `beta` for maximal and Riesz, `alpha` for
    /// Bessel.
    #[arg(long, default_value_t = 0.0)]
    order: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AdamsModeArg {
    Riesz,
    Maximal,
    Lorentz,
}

impl From<AdamsModeArg> for AdamsMode {
    fn from(m: AdamsModeArg) -> Self {
        match m {
            AdamsModeArg::Riesz => AdamsMode::Riesz,
            AdamsModeArg::Maximal => AdamsMode::Maximal,
            AdamsModeArg::Lorentz => AdamsMode::Lorentz,
        }
    }
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
struct AdamsArgs {
    #[arg(long, value_enum, default_value_t = AdamsModeArg::Riesz)]
    mode: AdamsModeArg,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    s: Option<f64>,
    #[arg(long)]
    cells: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DiamModeArg {
    Riesz,
    Maximal,
    Lorentz,
}

impl From<DiamModeArg> for DiamMode {
    fn from(m: DiamModeArg) -> Self {
        match m {
            DiamModeArg::Riesz => DiamMode::Riesz,
            DiamModeArg::Maximal => DiamMode::Maximal,
            DiamModeArg::Lorentz => DiamMode::Lorentz,
        }
    }
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
struct DiamArgs {
    #[arg(long, value_enum, default_value_t = DiamModeArg::Riesz)]
    mode: DiamModeArg,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    cells: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProbeArg {
    Quotients,
    Besov,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
struct CounterexampleArgs {
    #[arg(long, default_value_t = 0.4)]
    sigma: f64,
    #[arg(long, default_value_t = 20)]
    terms: u32,
    #[arg(long, value_enum, default_value_t = ProbeArg::Quotients)]
    probe: ProbeArg,
    #[arg(long, default_value_t = 2024)]
    seed: u64,
    #[arg(long)]
    points: Option<usize>,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
struct ScenarioArgs {
    #[arg(long, default_value = "cantor_bessel")]
    scenario: String,
    #[arg(long, default_value_t = 2024)]
    seed: u64,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    /// Inclusive cover levels `a..b`.
    #[arg(long, value_parser = parse_levels)]
    levels: Option<(i32, i32)>,
    /// Exponent of the Hölder map.
    #[arg(long)]
    gamma: Option<f64>,
    /// Grid cells of the synthesized map.
    #[arg(long)]
    cells: Option<usize>,
    /// Directory that receives a copy of the report.
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

impl ScenarioArgs {
    fn config(&self) -> Result<ExperimentConfig> {
        let mut config = ExperimentConfig::new(Scenario::parse(&self.scenario)?, self.seed);
        if self.n.is_some() || self.alpha.is_some() || self.p.is_some() {
            let base = config.params;
            config.params = DistortionParams::new(
                self.n.unwrap_or(base.n),
                self.alpha.unwrap_or(base.alpha),
                self.p.unwrap_or(base.p),
            )?;
        }
        if config.params.n != 1 {
            return Err(usage("the Cantor scenarios are one-dimensional; use --n 1"));
        }
        if let Some(levels) = self.levels {
            config.levels = levels;
        }
        if let Some(gamma) = self.gamma {
            config.gamma = gamma;
        }
        if let Some(cells) = self.cells {
            config.grid.cells = cells;
        }
        Ok(config)
    }
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
struct DistortionArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
struct NstarArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Slice exponent, in (0, sigma].
    #[arg(long)]
    q: f64,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
struct PhiArgs {
    /// Point set CSV.
    #[arg(long)]
    input: PathBuf,
    /// Grid CSV of the map; the identity when absent.
    #[arg(long)]
    map: Option<PathBuf>,
    #[arg(long)]
    mu: f64,
    #[arg(long)]
    q: f64,
    #[arg(long, default_value = "4..9", value_parser = parse_levels)]
    levels: (i32, i32),
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
struct CantorArgs {
    #[arg(long, default_value_t = 1.0 / 3.0)]
    ratio: f64,
    #[arg(long, default_value_t = 12)]
    depth: u32,
    /// Sample this many points from the natural measure instead of taking
    /// endpoints.
    #[arg(long)]
    sample: Option<usize>,
    #[arg(long, default_value_t = 2024)]
    seed: u64,
    #[arg(long)]
    output: PathBuf,
}

fn parse_levels(s: &str) -> std::result::Result<(i32, i32), String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("expected a..b, got '{s}'"))?;
    let a: i32 = a.trim().parse().map_err(|e| format!("bad level '{a}': {e}"))?;
    let b: i32 = b.trim().parse().map_err(|e| format!("bad level '{b}': {e}"))?;
    if b < a {
        return Err(format!("empty level range {a}..{b}"));
    }
    Ok((a, b))
}

fn usage(msg: &str) -> HlabError {
    HlabError::Usage(msg.to_string())
}

/// Output of one subcommand: the JSON document and, when the command has a
/// table, its CSV rendering.
struct Output {
    json: String,
    csv: Option<String>,
}

impl Output {
    fn json(json: String) -> Self {
        Self { json, csv: None }
    }
}

fn csv_table(header: &str, rows: impl IntoIterator<Item = String>) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for r in rows {
        out.push_str(&r);
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
struct ExponentsResults {
    tau_star: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    tau: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sigma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    regime: Option<Regime>,
    fully_supercritical: bool,
    critical: bool,
    undercritical: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    mu_q: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    beta_bar: Option<f64>,
}

fn cmd_exponents(a: &ExponentsArgs) -> Result<Output> {
    let mut params = DistortionParams::new(a.n, a.alpha, a.p)?.lorentz(a.lorentz);
    if let Some(k) = a.k {
        params = params.with_k(k);
    }
    if let Some(m) = a.m {
        params = params.with_m(m);
    }
    params.check_regime()?;
    let tau_star = params.tau_star()?;
    let s = a.tau.map(|t| sigma(&params, t)).transpose()?;
    let regime = s.map(|s| s.regime);
    let (mu, bb) = match (a.k, a.m) {
        (Some(k), Some(m)) => {
            let bb = beta_bar(a.n, m, k, a.holder_alpha)?;
            let mu = a.q.map(|q| mu_q(a.n, m, k, a.holder_alpha, q)).transpose()?;
            (mu, Some(bb))
        }
        _ if a.q.is_some() => return Err(usage("--q needs --k and --m")),
        _ => (None, None),
    };
    let results = ExponentsResults {
        tau_star,
        tau: a.tau,
        sigma: s.map(|s| s.value),
        regime,
        fully_supercritical: tau_star <= 0.0,
        critical: regime == Some(Regime::Critical),
        undercritical: regime == Some(Regime::Undercritical),
        mu_q: mu,
        beta_bar: bb,
    };
    #[derive(Serialize)]
    struct Config {
        params: DistortionParams,
        q: Option<f64>,
        tau: Option<f64>,
        holder_alpha: f64,
    }
    let config = Config {
        params,
        q: a.q,
        tau: a.tau,
        holder_alpha: a.holder_alpha,
    };
    Ok(Output::json(Report::new("exponents", config, results).to_json()?))
}

fn cmd_regularize(a: &RegularizeArgs) -> Result<Output> {
    let family = read_family(&a.input)?;
    let regular = regularize_in(&family, a.root_level)?;
    write_json(&a.output, regular.family())?;
    #[derive(Serialize)]
    struct Config<'a> {
        input: &'a Path,
        output: &'a Path,
        root_level: i32,
    }
    #[derive(Serialize)]
    struct Results {
        input_cubes: usize,
        output_cubes: usize,
        input_weight: f64,
        output_weight: f64,
    }
    let results = Results {
        input_cubes: family.len(),
        output_cubes: regular.family().len(),
        input_weight: family.tau_weight(),
        output_weight: regular.family().tau_weight(),
    };
    let config = Config {
        input: &a.input,
        output: &a.output,
        root_level: a.root_level,
    };
    Ok(Output::json(Report::new("regularize", config, results).to_json()?))
}

fn cmd_estimate_dim(a: &EstimateDimArgs) -> Result<Output> {
    let points = read_point_set(&a.input)?;
    let est = box_dimension(&points, a.levels.0, a.levels.1)?;
    let csv = csv_table(
        "level,count,saturated",
        est.levels
            .iter()
            .zip(&est.counts)
            .map(|(l, c)| format!("{l},{c},{}", est.saturated.contains(l))),
    );
    #[derive(Serialize)]
    struct Config<'a> {
        input: &'a Path,
        levels: (i32, i32),
        points: usize,
    }
    let config = Config {
        input: &a.input,
        levels: a.levels,
        points: points.len(),
    };
    Ok(Output {
        json: Report::new("estimate-dim", config, est).to_json()?,
        csv: Some(csv),
    })
}

fn cmd_operators(a: &OperatorsArgs, cache: &KernelCache) -> Result<Output> {
    let f = read_grid(&a.input)?;
    let out = match a.op {
        Operator::Maximal if a.order < f.dim() as f64 => maximal(&f, a.order)?,
        Operator::Maximal => maximal_any_order(&f, a.order)?,
        Operator::Riesz if a.order < f.dim() as f64 => riesz_potential(&f, a.order)?,
        Operator::Riesz => riesz_potential_any_order(&f, a.order)?,
        Operator::Bessel => {
            let table = cache.table_for_grid(KernelSpec::bessel(a.order, f.dim())?, &f.spec())?;
            bessel_potential_with(&f, &table)?
        }
    };
    let csv = grid_to_csv(&out);
    if let Some(path) = &a.output {
        write_text(path, &csv)?;
    }
    #[derive(Serialize)]
    struct Config<'a> {
        op: Operator,
        order: f64,
        input: &'a Path,
        output: Option<&'a Path>,
    }
    #[derive(Serialize)]
    struct Results {
        cells: usize,
        sup: f64,
        integral: f64,
    }
    let results = Results {
        cells: out.len(),
        sup: out.sup_norm(),
        integral: out.integral(),
    };
    let config = Config {
        op: a.op,
        order: a.order,
        input: &a.input,
        output: a.output.as_deref(),
    };
    Ok(Output {
        json: Report::new("operators", config, results).to_json()?,
        csv: Some(csv),
    })
}

fn cmd_adams(a: &AdamsArgs, cache: &KernelCache) -> Result<Output> {
    let mut config = AdamsConfig::default_for(a.mode.into());
    if let Some(v) = a.trials {
        config.trials = v;
    }
    if let Some(v) = a.seed {
        config.seed = v;
    }
    if let Some(v) = a.alpha {
        config.alpha = v;
    }
    if let Some(v) = a.p {
        config.p = v;
        if a.s.is_none() && config.mode != AdamsMode::Riesz {
            config.s = v;
        }
    }
    if let Some(v) = a.s {
        config.s = v;
    }
    if let Some(v) = a.cells {
        config.cells = v;
    }
    let results = run_adams_check(&config, cache)?;
    let csv = csv_table(
        "trial,ratio",
        results.ratios.iter().enumerate().map(|(i, r)| format!("{i},{r:?}")),
    );
    Ok(Output {
        json: Report::new("adams-check", config, results).to_json()?,
        csv: Some(csv),
    })
}

fn cmd_diam(a: &DiamArgs, cache: &KernelCache) -> Result<Output> {
    let mut config = DiamConfig::default_for(a.mode.into());
    if let Some(v) = a.alpha {
        config.alpha = v;
    }
    if let Some(v) = a.p {
        config.p = v;
    }
    if let Some(v) = a.theta {
        config.theta = v;
    }
    if let Some(v) = a.trials {
        config.trials = v;
    }
    if let Some(v) = a.seed {
        config.seed = v;
    }
    if let Some(v) = a.cells {
        config.cells = v;
    }
    let results = run_diam_check(&config, cache)?;
    let csv = csv_table(
        "level,coord,lhs,rhs,ratio",
        results
            .trials
            .iter()
            .map(|t| format!("{},{},{:?},{:?},{:?}", t.level, t.coord, t.lhs, t.rhs, t.ratio)),
    );
    Ok(Output {
        json: Report::new("diam-check", config, results).to_json()?,
        csv: Some(csv),
    })
}

fn cmd_counterexample(a: &CounterexampleArgs) -> Result<Output> {
    let probe = match a.probe {
        ProbeArg::Quotients => Probe::Quotients,
        ProbeArg::Besov => Probe::Besov,
    };
    let mut config = CounterexampleConfig::new(probe, a.seed);
    config.sigma = a.sigma;
    config.terms = a.terms;
    if let Some(v) = a.points {
        config.points = v;
    }
    let results = run_counterexample(&config)?;
    let csv = match (&results.besov_series, &results.besov_control) {
        (Some(series), Some(control)) => csv_table(
            "scale,series_norm,control_norm",
            series
                .scales
                .iter()
                .zip(series.norms.iter().zip(&control.norms))
                .map(|(t, (a, b))| format!("{t:?},{a:?},{b:?}")),
        ),
        _ => csv_table(
            "x,oscillation,control_oscillation,truncation_gap,even",
            results.points.iter().map(|r| {
                format!(
                    "{:?},{:?},{:?},{:?},{}",
                    r.x, r.oscillation, r.control_oscillation, r.truncation_gap, r.even
                )
            }),
        ),
    };
    Ok(Output {
        json: Report::new("counterexample", config, results).to_json()?,
        csv: Some(csv),
    })
}

fn save_copy(dir: &Option<PathBuf>, name: &str, json: &str) -> Result<()> {
    if let Some(dir) = dir {
        std::fs::create_dir_all(dir).map_err(|e| HlabError::io(dir, e))?;
        write_text(&dir.join(name), json)?;
    }
    Ok(())
}

fn cmd_distortion(a: &DistortionArgs, cache: &KernelCache) -> Result<Output> {
    let config = a.scenario.config()?;
    let results = run_distortion_experiment(&config, cache)?;
    let csv = csv_table(
        "level,cover_size,regular_size,tau_sum,sigma_sum,predicted,raw_tau_sum,raw_sigma_sum,raw_predicted",
        results.levels.iter().map(|r| {
            format!(
                "{},{},{},{:?},{:?},{:?},{:?},{:?},{:?}",
                r.level,
                r.cover_size,
                r.regular_size,
                r.tau_sum,
                r.sigma_sum,
                r.predicted,
                r.raw_tau_sum,
                r.raw_sigma_sum,
                r.raw_predicted
            )
        }),
    );
    let json = Report::new("distortion", config, results).to_json()?;
    save_copy(&a.scenario.output_dir, "distortion.json", &json)?;
    Ok(Output { json, csv: Some(csv) })
}

fn cmd_nstar(a: &NstarArgs, cache: &KernelCache) -> Result<Output> {
    let config = a.scenario.config()?;
    let results = run_nstar_slice_check(&config, a.q, cache)?;
    let csv = csv_table(
        "level,cover_size,lhs,factor_tau,factor_sigma,rhs,raw_cover_size,raw_lhs,raw_factor_tau,raw_factor_sigma,raw_rhs,holds",
        results.levels.iter().map(|r| {
            format!(
                "{},{},{:?},{:?},{:?},{:?},{},{:?},{:?},{:?},{:?},{}",
                r.level,
                r.cover_size,
                r.split.lhs,
                r.split.factor_tau,
                r.split.factor_sigma,
                r.split.rhs,
                r.raw_cover_size,
                r.raw_split.lhs,
                r.raw_split.factor_tau,
                r.raw_split.factor_sigma,
                r.raw_split.rhs,
                r.holds && r.raw_holds
            )
        }),
    );
    #[derive(Serialize)]
    struct Config {
        #[serde(flatten)]
        experiment: ExperimentConfig,
        q: f64,
    }
    let json = Report::new("nstar", Config { experiment: config, q: a.q }, results).to_json()?;
    save_copy(&a.scenario.output_dir, "nstar.json", &json)?;
    Ok(Output { json, csv: Some(csv) })
}

fn cmd_phi(a: &PhiArgs) -> Result<Output> {
    let points = read_point_set(&a.input)?;
    let levels: Vec<i32> = (a.levels.0..=a.levels.1).collect();
    let est = match &a.map {
        Some(path) => {
            let v = read_grid(path)?;
            phi_estimate(&points, &v, a.mu, a.q, &levels)?
        }
        None => phi_estimate(&points, &Identity, a.mu, a.q, &levels)?,
    };
    let csv = csv_table(
        "level,phi_sum",
        est.per_level.iter().map(|(l, v)| format!("{l},{v:?}")),
    );
    #[derive(Serialize)]
    struct Config<'a> {
        input: &'a Path,
        map: Option<&'a Path>,
        mu: f64,
        q: f64,
        levels: (i32, i32),
    }
    let config = Config {
        input: &a.input,
        map: a.map.as_deref(),
        mu: a.mu,
        q: a.q,
        levels: a.levels,
    };
    Ok(Output {
        json: Report::new("phi", config, est).to_json()?,
        csv: Some(csv),
    })
}

fn cmd_cantor(a: &CantorArgs) -> Result<Output> {
    let mode = match a.sample {
        Some(count) => CantorMode::UniformSample { count },
        None => CantorMode::Endpoints,
    };
    let points = cantor_set(a.ratio, a.depth, mode, a.seed)?;
    write_text(&a.output, &point_set_to_csv(&points))?;
    #[derive(Serialize)]
    struct Config<'a> {
        ratio: f64,
        depth: u32,
        mode: CantorMode,
        seed: u64,
        output: &'a Path,
    }
    #[derive(Serialize)]
    struct Results {
        points: usize,
    }
    let config = Config {
        ratio: a.ratio,
        depth: a.depth,
        mode,
        seed: a.seed,
        output: &a.output,
    };
    Ok(Output::json(
        Report::new("cantor", config, Results { points: points.len() }).to_json()?,
    ))
}

fn run(cli: &Cli) -> Result<Output> {
    let cache = KernelCache::from_env();
    match &cli.command {
        Command::Exponents(a) => cmd_exponents(a),
        Command::Regularize(a) => cmd_regularize(a),
        Command::EstimateDim(a) => cmd_estimate_dim(a),
        Command::Operators(a) => cmd_operators(a, &cache),
        Command::AdamsCheck(a) => cmd_adams(a, &cache),
        Command::DiamCheck(a) => cmd_diam(a, &cache),
        Command::Counterexample(a) => cmd_counterexample(a),
        Command::Distortion(a) => cmd_distortion(a, &cache),
        Command::Nstar(a) => cmd_nstar(a, &cache),
        Command::Phi(a) => cmd_phi(a),
        Command::Cantor(a) => cmd_cantor(a),
    }
}

fn fail(err: &HlabError) -> ExitCode {
    eprintln!("{}", err.to_json());
    ExitCode::from(err.exit_code() as u8)
}

fn main() -> ExitCode {
    let argv = match expand_config(std::env::args().collect()) {
        Ok(argv) => argv,
        Err(e) => return fail(&e),
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let _ = e.print();
            return fail(&HlabError::Usage(e.kind().to_string()));
        }
    };
    let out = match run(&cli) {
        Ok(out) => out,
        Err(e) => return fail(&e),
    };
    let text = match (cli.format, out.csv) {
        (Format::Csv, Some(csv)) => csv,
        (Format::Csv, None) => {
            return fail(&usage("this command has no tabular output; use --format json"));
        }
        (Format::Json, _) => out.json,
    };
    let mut stdout = std::io::stdout().lock();
    if let Err(e) = stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()) {
        return fail(&HlabError::io("<stdout>", e));
    }
    ExitCode::SUCCESS
}
