//! Command-line front end: TOML experiment configs in, JSON/CSV artifacts
//! and a manifest out.
//!
//! Exit codes: 0 success, 2 invalid input, 3 numerical failure.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::blowup::{
    regularity_of_xi, trichotomy_mc, BlowupRegime, BlowupWeightSpec, EpsilonSequence,
};
use crate::criticality::{
    asymptotic_check, chi_exponents, classify, golden_table, Q,
};
use crate::equations::{EquationConfig, EquationKind, EquationSpec};
use crate::error::{Error, Result};
use crate::io::{self, num_rows, ArtifactDir, Manifest};
use crate::littlewood_paley::DyadicPartition;
use crate::random_ic::{block_growth_probe, sample_ic, GaussianIcSpec};
use crate::solver::{solve, Formulation, PicardConfig};
use crate::spectral::{SpectralField, TorusLattice};
use crate::stochastic::{
    default_window, exact_block_moments, mc_second_moment, singularity_fit, Chaos, Estimator,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum, Subcommand)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Criticality table for the catalogue or a configured equation.
    Classify,
    /// One Gaussian initial datum and its block-growth probe.
    Sample,
    /// Wick moments against Monte Carlo and the singularity fit.
    Probe,
    /// Picard solve of a mild formulation.
    Solve,
    /// Blow-up trichotomy Monte Carlo of the sine-series counterexample.
    Blowup,
    /// Asymptotics of the dyadic sums G.
    Asymptotics,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Classify => "classify",
            Command::Sample => "sample",
            Command::Probe => "probe",
            Command::Solve => "solve",
            Command::Blowup => "blowup",
            Command::Asymptotics => "asymptotics",
        }
    }

    fn stochastic(&self, cfg: &ExperimentConfig) -> bool {
        match self {
            Command::Sample | Command::Probe | Command::Blowup => true,
            Command::Solve => cfg
                .solver
                .as_ref()
                .map_or(true, |s| s.initial == InitialData::Gaussian),
            _ => false,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "roughstart", version, about = "Rough initial data for semilinear parabolic equations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Experiment configuration (TOML).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads; all cores when absent.
    #[arg(long, global = true, env = "ROUGHSTART_THREADS")]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub command: Option<Command>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub lattice: Option<LatticeSection>,
    #[serde(default)]
    pub equation: Option<EquationConfig>,
    #[serde(default)]
    pub ic: Option<IcSection>,
    #[serde(default)]
    pub solver: Option<SolverSection>,
    #[serde(default)]
    pub sample: Option<SampleSection>,
    #[serde(default)]
    pub probe: Option<ProbeSection>,
    #[serde(default)]
    pub blowup: Option<BlowupSection>,
    #[serde(default)]
    pub asymptotics: Option<AsymptoticsSection>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSection {
    #[serde(rename = "N")]
    pub n: usize,
}

impl Default for LatticeSection {
    fn default() -> Self {
        Self { n: 64 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IcSection {
    pub theta: f64,
    #[serde(default)]
    pub nu: Option<f64>,
    #[serde(default = "one")]
    pub amplitude: f64,
}

fn one() -> f64 {
    1.0
}

impl IcSection {
    fn to_spec(self, seed: u64) -> GaussianIcSpec {
        let s = GaussianIcSpec::new(self.theta, seed).with_amplitude(self.amplitude);
        match self.nu {
            Some(nu) => s.with_log(nu),
            None => s,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialData {
    #[default]
    Gaussian,
    /// `amplitude * sin(x_1)`.
    Sine,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverSection {
    pub formulation: Formulation,
    #[serde(default)]
    pub initial: InitialData,
    #[serde(default = "one")]
    pub sine_amplitude: f64,
    /// Writes the final field in the spectral JSON format.
    #[serde(default)]
    pub snapshot: bool,
    #[serde(flatten)]
    pub picard: PicardConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleSection {
    #[serde(default = "default_probe_samples")]
    pub samples: usize,
}

fn default_probe_samples() -> usize {
    64
}

impl Default for SampleSection {
    fn default() -> Self {
        Self {
            samples: default_probe_samples(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeSection {
    #[serde(default)]
    pub alpha: f64,
    #[serde(default = "default_chaos")]
    pub chaos: Chaos,
    /// Monte Carlo samples per `(t, j)` point.
    #[serde(default = "default_mc")]
    pub samples: usize,
    #[serde(default = "default_blocks")]
    pub blocks: Vec<i32>,
    #[serde(default = "default_times")]
    pub times: Vec<f64>,
    /// Fit window; `[4 N^-tau, 0.1]` when absent.
    #[serde(default)]
    pub window: Option<(f64, f64)>,
    #[serde(default = "default_points")]
    pub points: usize,
}

fn default_chaos() -> Chaos {
    Chaos::Eta1
}

fn default_mc() -> usize {
    200
}

fn default_blocks() -> Vec<i32> {
    vec![2, 4]
}

fn default_times() -> Vec<f64> {
    vec![1e-3, 1e-2]
}

fn default_points() -> usize {
    12
}

impl Default for ProbeSection {
    fn default() -> Self {
        Self {
            alpha: 0.0,
            chaos: default_chaos(),
            samples: default_mc(),
            blocks: default_blocks(),
            times: default_times(),
            window: None,
            points: default_points(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlowupSection {
    pub regime: BlowupRegime,
    #[serde(default = "default_lambda")]
    pub lambda: f64,
    #[serde(default = "default_eps")]
    pub epsilon: f64,
    #[serde(default)]
    pub epsilon_k: EpsilonSequence,
    #[serde(default = "default_kmax")]
    pub k_max: usize,
    #[serde(default = "default_blowup_samples")]
    pub samples: usize,
    #[serde(default = "default_eps_grid")]
    pub eps_grid: Vec<f64>,
    /// Replicas for the block-growth fit of the sine series; 0 skips it.
    #[serde(default = "default_xi_samples")]
    pub xi_samples: usize,
}

fn default_lambda() -> f64 {
    1.6
}

fn default_eps() -> f64 {
    0.1
}

fn default_kmax() -> usize {
    2000
}

fn default_blowup_samples() -> usize {
    500
}

fn default_eps_grid() -> Vec<f64> {
    vec![0.01, 0.05, 0.1]
}

fn default_xi_samples() -> usize {
    100
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AsymptoticsSection {
    #[serde(default = "default_triples")]
    pub triples: Vec<[f64; 3]>,
    #[serde(default = "default_range")]
    pub range: (f64, f64),
    #[serde(default = "default_fit_window")]
    pub fit_window: (f64, f64),
    #[serde(default = "default_asym_points")]
    pub points: usize,
}

fn default_triples() -> Vec<[f64; 3]> {
    vec![[0.0, 1.0, 2.0], [-0.8, 1.0, 2.0], [0.5, 2.0, 2.0]]
}

fn default_range() -> (f64, f64) {
    (1e-6, 1.0)
}

fn default_fit_window() -> (f64, f64) {
    (1e-6, 1e-2)
}

fn default_asym_points() -> usize {
    200
}

impl Default for AsymptoticsSection {
    fn default() -> Self {
        Self {
            triples: default_triples(),
            range: default_range(),
            fit_window: default_fit_window(),
            points: default_asym_points(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    fn section<'a, T>(&self, s: &'a Option<T>, name: &str, cmd: Command) -> Result<&'a T> {
        s.as_ref().ok_or_else(|| {
            Error::Config(format!("`{}` needs a [{name}] section", cmd.name()))
        })
    }

    fn seed(&self, cmd: Command) -> Result<u64> {
        self.seed
            .ok_or_else(|| Error::Config(format!("`{}` is stochastic and needs a seed", cmd.name())))
    }

    fn lattice(&self, d: usize) -> Result<TorusLattice> {
        TorusLattice::new(d, self.lattice.unwrap_or_default().n)
    }

    fn equation(&self, cmd: Command) -> Result<EquationSpec> {
        self.section(&self.equation, "equation", cmd)?.to_spec()
    }

    /// Checks that the sections needed by `cmd` are present.
    pub fn validate_for(&self, cmd: Command) -> Result<()> {
        if let Some(c) = self.command {
            if c != cmd {
                return Err(Error::Config(format!(
                    "config is for `{}`, command line asks for `{}`",
                    c.name(),
                    cmd.name()
                )));
            }
        }
        match cmd {
            Command::Classify | Command::Asymptotics => {}
            Command::Sample => {
                self.section(&self.ic, "ic", cmd)?;
            }
            Command::Probe => {
                self.equation(cmd)?;
                self.section(&self.ic, "ic", cmd)?;
            }
            Command::Solve => {
                self.equation(cmd)?;
                let s = self.section(&self.solver, "solver", cmd)?;
                if s.initial == InitialData::Gaussian {
                    self.section(&self.ic, "ic", cmd)?;
                }
            }
            Command::Blowup => {
                self.section(&self.blowup, "blowup", cmd)?;
            }
        }
        if cmd.stochastic(self) {
            self.seed(cmd)?;
        }
        Ok(())
    }
}

/// `Q` as `p/q`, or an integer.
fn show_q(x: Q) -> String {
    if x.is_integer() {
        x.to_integer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

fn rational(x: f64) -> Result<Q> {
    Q::approximate_float(x).ok_or_else(|| Error::InvalidParameter(format!("{x} is not representable")))
}

/// Runs `cmd` and writes its artifacts under `out`; returns the manifest path.
pub fn run(cmd: Command, cfg: &ExperimentConfig, out: &Path) -> Result<PathBuf> {
    cfg.validate_for(cmd)?;
    let mut dir = ArtifactDir::create(out)?;
    let mut resolved = cfg.clone();
    resolved.command = Some(cmd);
    resolved.output_dir = Some(out.to_path_buf());
    match cmd {
        Command::Classify => run_classify(cfg, &mut dir)?,
        Command::Sample => {
            resolved.sample = Some(cfg.sample.unwrap_or_default());
            run_sample(cfg, &mut dir)?
        }
        Command::Probe => {
            resolved.probe = Some(cfg.probe.clone().unwrap_or_default());
            run_probe(cfg, &mut dir)?
        }
        Command::Solve => run_solve(cfg, &mut dir)?,
        Command::Blowup => run_blowup(cfg, &mut dir)?,
        Command::Asymptotics => {
            resolved.asymptotics = Some(cfg.asymptotics.clone().unwrap_or_default());
            run_asymptotics(cfg, &mut dir)?
        }
    }
    if resolved.lattice.is_none() && matches!(cmd, Command::Sample | Command::Probe | Command::Solve) {
        resolved.lattice = Some(LatticeSection::default());
    }
    let config = serde_json::to_value(&resolved)?;
    dir.finish(Manifest::new(cmd.name(), cfg.seed, config))
}

#[derive(Serialize)]
struct ClassifyRow {
    equation: String,
    tau: String,
    sigma: String,
    a: String,
    b: String,
    alpha_min: String,
    delta: String,
    critical_space: String,
    regime: String,
}

fn run_classify(cfg: &ExperimentConfig, dir: &mut ArtifactDir) -> Result<()> {
    let specs: Vec<EquationSpec> = match &cfg.equation {
        Some(e) => vec![e.to_spec()?],
        None => [
            EquationKind::SurfaceGrowth,
            EquationKind::Kpz,
            EquationKind::KuramotoSivashinsky,
            EquationKind::ReactionDiffusion,
        ]
        .iter()
        .map(|&k| EquationSpec::catalogue(k, 1))
        .collect::<Result<_>>()?,
    };
    let theta = match &cfg.ic {
        Some(ic) => Some(rational(ic.theta)?),
        None => None,
    };
    let reports = specs
        .iter()
        .map(|s| classify(s, theta))
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<ClassifyRow> = reports
        .iter()
        .map(|r| -> Result<ClassifyRow> {
            Ok(ClassifyRow {
            equation: r.equation.clone(),
            tau: show_q(r.tau),
            sigma: show_q(r.sigma),
            a: show_q(r.a),
            b: show_q(r.b),
            alpha_min: show_q(r.alpha_min),
            delta: show_q(r.delta),
            critical_space: format!("C^{}", show_q(-r.sigma)),
            regime: serde_json::to_value(r.regime)?
                .as_str()
                .unwrap_or_default()
                .to_string(),
            })
        })
        .collect::<Result<_>>()?;
    let mut text = format!(
        "{:<22} {:>4} {:>5} {:>3} {:>3} {:>5} {:>5} {:>8}  {}\n",
        "equation", "tau", "sigma", "a", "b", "alpha", "delta", "critical", "regime"
    );
    for r in &rows {
        text.push_str(&format!(
            "{:<22} {:>4} {:>5} {:>3} {:>3} {:>5} {:>5} {:>8}  {}\n",
            r.equation, r.tau, r.sigma, r.a, r.b, r.alpha_min, r.delta, r.critical_space, r.regime
        ));
    }
    print!("{text}");
    let csv_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.equation.clone(),
                r.tau.clone(),
                r.sigma.clone(),
                r.a.clone(),
                r.b.clone(),
                r.alpha_min.clone(),
                r.delta.clone(),
                r.critical_space.clone(),
                r.regime.clone(),
            ]
        })
        .collect();
    dir.csv("classification.csv", &io::CLASSIFICATION, &csv_rows)?;
    dir.text("classification.txt", &text)?;
    dir.json("classification.json", &reports)?;
    if cfg.equation.is_none() {
        dir.json("golden_table.json", &golden_table())?;
    }
    Ok(())
}

fn run_sample(cfg: &ExperimentConfig, dir: &mut ArtifactDir) -> Result<()> {
    let cmd = Command::Sample;
    let ic = cfg.section(&cfg.ic, "ic", cmd)?.to_spec(cfg.seed(cmd)?);
    let d = match &cfg.equation {
        Some(e) => e.to_spec()?.d,
        None => 1,
    };
    let lat = cfg.lattice(d)?;
    let u0 = sample_ic(&ic, lat)?;
    dir.text("ic.json", &u0.to_json()?)?;
    let part = DyadicPartition::new(lat);
    let samples = cfg.sample.unwrap_or_default().samples;
    let probe = block_growth_probe(&ic, &part, samples)?;
    let rows: Vec<[f64; 6]> = probe
        .blocks
        .iter()
        .map(|b| [b.j as f64, b.mean, b.p05, b.p50, b.p95, probe.slope])
        .collect();
    dir.csv("ic_probe.csv", &io::IC_PROBE, &num_rows(rows))?;
    dir.json("ic_probe.json", &probe)?;
    println!(
        "block slope {:.4} (raw {:.4}, reference {:.4})",
        probe.slope, probe.raw_slope, probe.reference_slope
    );
    Ok(())
}

#[derive(Serialize)]
struct ProbeVerdict {
    alpha: f64,
    chaos: Chaos,
    beta_hat: f64,
    beta0: f64,
    /// `beta0` for `eta1`, `beta0 - 1` for `eta2`.
    bound: f64,
    pass: bool,
    window: (f64, f64),
    r2: f64,
}

fn run_probe(cfg: &ExperimentConfig, dir: &mut ArtifactDir) -> Result<()> {
    let cmd = Command::Probe;
    let spec = cfg.equation(cmd)?;
    let ic = cfg.section(&cfg.ic, "ic", cmd)?.to_spec(cfg.seed(cmd)?);
    let p = cfg.probe.clone().unwrap_or_default();
    let lat = cfg.lattice(spec.d)?;
    let part = DyadicPartition::new(lat);
    let mut rows = Vec::new();
    for &t in &p.times {
        let exact = exact_block_moments(&spec, &ic, &part, Chaos::Eta1, t)?;
        for &j in &p.blocks {
            if !part.indices().any(|i| i == j) {
                return Err(Error::InvalidParameter(format!("block {j} outside the partition")));
            }
            let mc = mc_second_moment(&spec, &ic, &part, j, t, p.samples)?;
            rows.push([t, j as f64, exact[(j + 1) as usize], mc.mean, mc.std_err]);
        }
    }
    dir.csv("moments.csv", &io::MOMENT_PROBE, &num_rows(rows))?;
    let window = p.window.unwrap_or_else(|| default_window(&spec, lat));
    let fit = singularity_fit(
        &spec,
        &ic,
        &part,
        p.chaos,
        p.alpha,
        Estimator::ExactMoments,
        window,
        p.points,
    )?;
    let chi = chi_exponents(&spec, rational(ic.theta)?);
    let beta0 = crate::criticality::qf(chi.beta0(rational(p.alpha)?));
    let bound = match p.chaos {
        Chaos::Eta1 => beta0,
        Chaos::Eta2 => beta0 - 1.0,
    };
    let verdict = ProbeVerdict {
        alpha: p.alpha,
        chaos: p.chaos,
        beta_hat: fit.exponent,
        beta0,
        bound,
        pass: fit.exponent <= bound + 0.1,
        window,
        r2: fit.r2,
    };
    println!(
        "beta_hat {:.4} vs bound {:.4}: {}",
        verdict.beta_hat,
        verdict.bound,
        if verdict.pass { "pass" } else { "fail" }
    );
    dir.json("verdict.json", &verdict)?;
    dir.json("singularity_fit.json", &fit)?;
    Ok(())
}

fn run_solve(cfg: &ExperimentConfig, dir: &mut ArtifactDir) -> Result<()> {
    let cmd = Command::Solve;
    let spec = cfg.equation(cmd)?;
    let s = cfg.section(&cfg.solver, "solver", cmd)?;
    let lat = cfg.lattice(spec.d)?;
    let u0 = match s.initial {
        InitialData::Gaussian => {
            let ic = cfg.section(&cfg.ic, "ic", cmd)?.to_spec(cfg.seed(cmd)?);
            sample_ic(&ic, lat)?
        }
        InitialData::Sine => {
            let c = Complex64::new(0.0, 0.5 * s.sine_amplitude);
            SpectralField::from_modes(lat, &[([1, 0], -c), ([-1, 0], c)])?
        }
    };
    let part = DyadicPartition::new(lat);
    let result = solve(s.formulation, &spec, &u0, &part, &s.picard)?;
    let rows: Vec<[f64; 4]> = result
        .iterate_norms
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let inc = if i == 0 { f64::NAN } else { result.increments[i - 1] };
            let ratio = if i < 2 { f64::NAN } else { result.ratios[i - 2] };
            [i as f64, n, inc, ratio]
        })
        .collect();
    dir.csv("iterates.csv", &io::ITERATE_NORMS, &num_rows(rows))?;
    dir.json("summary.json", &result.summary())?;
    if s.snapshot {
        dir.text("solution_T.json", &result.solution.last().to_json()?)?;
    }
    println!(
        "{:?}: converged on [0, {:e}] after {} iterations, residual {:.3e}",
        result.formulation,
        result.t_effective,
        result.increments.len(),
        result.residual
    );
    Ok(())
}

fn run_blowup(cfg: &ExperimentConfig, dir: &mut ArtifactDir) -> Result<()> {
    let cmd = Command::Blowup;
    let b = cfg.section(&cfg.blowup, "blowup", cmd)?;
    let spec = BlowupWeightSpec {
        regime: b.regime,
        lambda: b.lambda,
        epsilon: b.epsilon,
        epsilon_k: b.epsilon_k,
        k_max: b.k_max,
        seed: cfg.seed(cmd)?,
    };
    let report = trichotomy_mc(&spec, b.samples, &b.eps_grid)?;
    let rows: Vec<[f64; 4]> = report
        .modes
        .iter()
        .map(|m| [m.k as f64, m.sigma_k, m.p_analytic, m.p_empirical])
        .collect();
    dir.csv("modes.csv", &io::BLOWUP_MODES, &num_rows(rows))?;
    dir.json("trichotomy.json", &report)?;
    if b.xi_samples > 0 {
        let n = b.k_max.next_power_of_two();
        let part = DyadicPartition::new(TorusLattice::new(1, n)?);
        let probe = regularity_of_xi(&spec, &part, b.xi_samples)?;
        println!("Xi block slope {:.4}", probe.raw_slope);
        dir.json("xi_regularity.json", &probe)?;
    }
    match (&report.lemma1, &report.lemma2) {
        (Some(v), _) => println!(
            "lemma 1: P[inf tau <= eps/2] = {:.4} vs tail bound {:.4}: {}",
            v.fraction,
            v.tail_bound,
            if v.holds { "holds" } else { "violated" }
        ),
        (_, Some(v)) => println!(
            "lemma 2: divergent count signature {}",
            if v.divergent_signature { "present" } else { "absent" }
        ),
        _ => {}
    }
    Ok(())
}

fn run_asymptotics(cfg: &ExperimentConfig, dir: &mut ArtifactDir) -> Result<()> {
    let a = cfg.asymptotics.clone().unwrap_or_default();
    let mut rows = Vec::new();
    let mut reports = Vec::new();
    for &[nu, p, tau] in &a.triples {
        let r = asymptotic_check(nu, p, tau, a.range, a.fit_window, a.points)?;
        rows.extend(r.samples.iter().map(|s| [nu, p, tau, s.0, s.1, s.2]));
        println!(
            "G({nu},{p},{tau}): sup ratio {:.4}, slope {:.4} (target {:.4})",
            r.sup_ratio, r.slope, r.target_slope
        );
        reports.push(r);
    }
    dir.csv("asymptotics.csv", &io::ASYMPTOTICS, &num_rows(rows))?;
    dir.json("asymptotics.json", &reports)?;
    Ok(())
}

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_numerical() {
        EXIT_NUMERICAL
    } else {
        EXIT_VALIDATION
    }
}

/// Parses arguments, runs, and returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(manifest) => {
            eprintln!("wrote {}", manifest.display());
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn execute(cli: &Cli) -> Result<PathBuf> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Error::Config("--threads must be positive".into()));
        }
        // a pool may already exist when called repeatedly in one process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = Some(s);
    }
    let out = cli
        .out
        .clone()
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("roughstart-out").join(cli.command.name()));
    run(cli.command, &cfg, &out)
}
