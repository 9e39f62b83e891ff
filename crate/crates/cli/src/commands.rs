//! Argument definitions and the four subcommands.

use std::io::Write;
use std::path::{Path, PathBuf};

use besov_core::normest::{all_shells, besov_seminorm, bmo_norm, holder_norm, weak_lp_norm, GridSpec, Modulus};
use besov_core::quark::{counterexample_coeffs, synthesize, BumpFn};
use besov_core::restrict::{slice_truncated, strip_grid};
use besov_core::seqspace::{bpq_norm, construct_lambda, construct_weighted_lambda, construct_zeta};
use besov_core::{AdmissibleFn, BesovParams, CounterexampleSpec, DyadicSequence, GridFunction};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::{ExperimentConfig, Layer};
use crate::criteria::{run_scenario, scenario_defaults};
use crate::io::{self, MeasureReport};
use crate::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "besov", version, about = "Restriction counterexamples for Besov spaces")]
pub struct Cli {
    /// Plain-text `key = value` file; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a dyadic sequence and print its level count and b_{p,q} norm.
    Construct {
        kind: SequenceKind,
        #[command(flatten)]
        params: Params,
        /// Sequence CSV (`level,start,length,value`).
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// Also write the counterexample quark coefficients.
        #[arg(long)]
        coeffs_out: Option<PathBuf>,
    },
    /// Evaluate a norm of a grid or of synthesized coefficients.
    Measure {
        norm: NormKind,
        /// Grid JSON input.
        #[arg(long, conflicts_with = "coeffs", required_unless_present = "coeffs")]
        grid: Option<PathBuf>,
        /// Coefficient CSV input, synthesized on `[lower, upper]^N` at `level`.
        #[arg(long)]
        coeffs: Option<PathBuf>,
        #[command(flatten)]
        params: Params,
        /// Report path; `.csv` selects CSV, anything else JSON.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Run a verification scenario; exit 3 when a criterion fails.
    Verify {
        scenario: Scenario,
        #[command(flatten)]
        params: Params,
        /// Directory for the JSON verdicts and witness-curve CSV.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Directory for gnuplot `.dat` witness curves.
        #[arg(long)]
        plot_data: Option<PathBuf>,
    },
    /// Sample a function on a grid and write it as JSON.
    Sample {
        what: SampleKind,
        #[command(flatten)]
        params: Params,
        /// Coefficient CSV for `sample coeffs`.
        #[arg(long)]
        coeffs: Option<PathBuf>,
        #[arg(short, long)]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SequenceKind {
    Zeta,
    Lambda,
    Weighted,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum NormKind {
    Besov,
    Gbesov,
    Bmo,
    Weaklp,
    Holder,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Scenario {
    Fact1,
    #[value(name = "thm1_1")]
    Thm1_1,
    #[value(name = "thm1_2")]
    Thm1_2,
    #[value(name = "thm1_3")]
    Thm1_3,
    #[value(name = "thm1_4")]
    Thm1_4,
    Lemmas,
    Lemma35,
    All,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::Fact1 => "fact1",
            Scenario::Thm1_1 => "thm1_1",
            Scenario::Thm1_2 => "thm1_2",
            Scenario::Thm1_3 => "thm1_3",
            Scenario::Thm1_4 => "thm1_4",
            Scenario::Lemmas => "lemmas",
            Scenario::Lemma35 => "lemma35",
            Scenario::All => "all",
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SampleKind {
    /// The tensor bump `ψ`.
    Bump,
    /// `Σ_i |x_i - 1/2|`.
    Hat,
    Constant,
    /// Counterexample slice at `x_N = x`, truncated at `top`.
    Slice,
    /// Synthesis of `--coeffs`.
    Coeffs,
}

/// Configuration keys as flags. Values stay text until resolution, so `inf`
/// and fractions such as `1/2` are accepted everywhere.
#[derive(Debug, Clone, Default, Args)]
pub struct Params {
    #[arg(long, allow_hyphen_values = true)]
    pub n: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub s: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub p: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub q: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub jmax: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub samples: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub seed: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub grid_level: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub top: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub grid_samples: Option<String>,
    /// Weight, e.g. `logpow:c=1/4,b=-1` or `constant:1`.
    #[arg(long, allow_hyphen_values = true)]
    pub psi: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub slack: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub order: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub r: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub floor_level: Option<String>,
    /// `thm1_2` regime: all, holder, bmo or weaklp.
    #[arg(long, allow_hyphen_values = true)]
    pub mode: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub level: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub lower: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub upper: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub control_jmax: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub control_points: Option<String>,
}

impl Params {
    pub fn layer(&self) -> CliResult<Layer> {
        let mut l = Layer::default();
        let pairs = [
            ("n", &self.n),
            ("s", &self.s),
            ("p", &self.p),
            ("q", &self.q),
            ("jmax", &self.jmax),
            ("samples", &self.samples),
            ("seed", &self.seed),
            ("grid_level", &self.grid_level),
            ("top", &self.top),
            ("grid_samples", &self.grid_samples),
            ("psi", &self.psi),
            ("slack", &self.slack),
            ("order", &self.order),
            ("r", &self.r),
            ("alpha", &self.alpha),
            ("floor_level", &self.floor_level),
            ("mode", &self.mode),
            ("x", &self.x),
            ("level", &self.level),
            ("lower", &self.lower),
            ("upper", &self.upper),
            ("control_jmax", &self.control_jmax),
            ("control_points", &self.control_points),
        ];
        for (k, v) in pairs {
            if let Some(v) = v {
                l.set(k, v.as_str())?;
            }
        }
        Ok(l)
    }
}

fn resolve(config: Option<&Path>, extra: Option<Layer>, params: &Params) -> CliResult<ExperimentConfig> {
    let file = match config {
        Some(p) => Layer::read(p)?,
        None => Layer::default(),
    };
    let extra = extra.unwrap_or_default();
    ExperimentConfig::resolve(&[&extra, &file, &params.layer()?])
}

/// Runs one parsed command line, writing summaries to `stdout`.
pub fn run(cli: &Cli, stdout: &mut dyn Write) -> CliResult<()> {
    let config = cli.config.as_deref();
    match &cli.command {
        Command::Construct {
            kind,
            params,
            out,
            coeffs_out,
        } => construct(*kind, &resolve(config, None, params)?, out.as_deref(), coeffs_out.as_deref(), stdout),
        Command::Measure {
            norm,
            grid,
            coeffs,
            params,
            out,
        } => {
            let cfg = resolve(config, None, params)?;
            measure(*norm, &cfg, grid.as_deref(), coeffs.as_deref(), out.as_deref(), stdout)
        }
        Command::Verify {
            scenario,
            params,
            out,
            plot_data,
        } => {
            let cfg = resolve(config, Some(scenario_defaults(scenario.name())?), params)?;
            verify(scenario.name(), &cfg, out.as_deref(), plot_data.as_deref(), stdout)
        }
        Command::Sample {
            what,
            params,
            coeffs,
            out,
        } => sample(*what, &resolve(config, None, params)?, coeffs.as_deref(), out, stdout),
    }
}

fn build_sequence(kind: SequenceKind, cfg: &ExperimentConfig) -> CliResult<DyadicSequence> {
    Ok(match kind {
        SequenceKind::Zeta => construct_zeta(cfg.jmax)?,
        SequenceKind::Lambda => construct_lambda(cfg.p, cfg.q, cfg.jmax)?,
        SequenceKind::Weighted => construct_weighted_lambda(cfg.p, cfg.q, &cfg.psi, cfg.jmax)?,
    })
}

fn kind_name(kind: SequenceKind) -> &'static str {
    match kind {
        SequenceKind::Zeta => "zeta",
        SequenceKind::Lambda => "lambda",
        SequenceKind::Weighted => "weighted",
    }
}

fn unit() -> AdmissibleFn {
    AdmissibleFn::constant(1.0).expect("constant weight")
}

fn construct(
    kind: SequenceKind,
    cfg: &ExperimentConfig,
    out: Option<&Path>,
    coeffs_out: Option<&Path>,
    stdout: &mut dyn Write,
) -> CliResult<()> {
    let seq = build_sequence(kind, cfg)?;
    let coeffs = match coeffs_out {
        Some(_) => {
            let spec = CounterexampleSpec::new(cfg.n.max(2), cfg.s, cfg.p, cfg.q, unit(), seq.clone())?;
            Some(counterexample_coeffs(&spec)?)
        }
        None => None,
    };
    let command = format!("construct {}", kind_name(kind));
    let header = cfg.header(&command);
    if let Some(path) = out {
        io::write_sequence(io::create(path)?, &header, &seq)?;
    }
    if let (Some(path), Some(c)) = (coeffs_out, &coeffs) {
        io::write_coeffs(io::create(path)?, &header, c)?;
    }
    let norm = bpq_norm(&seq, cfg.p, cfg.q)?;
    let runs = seq.runs().iter().filter(|r| !r.is_empty()).count();
    writeln!(stdout, "{command}")?;
    writeln!(stdout, "levels = {}", seq.max_level())?;
    writeln!(stdout, "runs = {runs}")?;
    writeln!(stdout, "sweep_ends = {:?}", seq.sweep_ends())?;
    writeln!(stdout, "bpq_norm = {} (p = {}, q = {})", norm.total, cfg.p, cfg.q)?;
    Ok(())
}

fn norm_name(norm: NormKind) -> &'static str {
    match norm {
        NormKind::Besov => "besov",
        NormKind::Gbesov => "gbesov",
        NormKind::Bmo => "bmo",
        NormKind::Weaklp => "weaklp",
        NormKind::Holder => "holder",
    }
}

fn besov_params(cfg: &ExperimentConfig, n: usize) -> CliResult<BesovParams> {
    let params = BesovParams::new(n, cfg.s, cfg.p, cfg.q)?;
    Ok(match cfg.order {
        Some(m) => params.with_order(m)?,
        None => params,
    })
}

fn load_input(cfg: &ExperimentConfig, grid: Option<&Path>, coeffs: Option<&Path>) -> CliResult<GridFunction> {
    match (grid, coeffs) {
        (Some(g), None) => io::read_grid(&io::read_text(g)?),
        (None, Some(c)) => {
            let coeffs = io::read_coeffs(&io::read_text(c)?)?;
            let n = coeffs.dimension();
            let spec = GridSpec::new(vec![cfg.lower; n], vec![cfg.upper; n], cfg.level)?;
            let params = besov_params(cfg, n)?.with_psi(cfg.psi.clone());
            Ok(synthesize(&coeffs, &BumpFn::new(n)?, &params, &spec)?.grid)
        }
        _ => Err(CliError::Usage(String::from("give exactly one of --grid and --coeffs"))),
    }
}

fn measure(
    norm: NormKind,
    cfg: &ExperimentConfig,
    grid: Option<&Path>,
    coeffs: Option<&Path>,
    out: Option<&Path>,
    stdout: &mut dyn Write,
) -> CliResult<()> {
    let f = load_input(cfg, grid, coeffs)?;
    let n = f.spec().dim();
    let name = norm_name(norm);
    let report = match norm {
        NormKind::Besov | NormKind::Gbesov => {
            let mut params = besov_params(cfg, n)?;
            if matches!(norm, NormKind::Gbesov) {
                params = params.with_psi(cfg.psi.clone());
            }
            MeasureReport::from_norm(name, &besov_seminorm(&f, &params, all_shells(&f), Modulus::Shell)?)
        }
        NormKind::Bmo => MeasureReport::scalar(name, bmo_norm(&f, cfg.floor_level)?),
        NormKind::Weaklp => MeasureReport::scalar(name, weak_lp_norm(&f, cfg.r.unwrap_or(cfg.p))?),
        NormKind::Holder => {
            let alpha = cfg.alpha.unwrap_or(cfg.s);
            let order = cfg.order.unwrap_or(alpha.floor() as u32 + 1);
            MeasureReport::from_norm(name, &holder_norm(&f, alpha, order)?)
        }
    };
    let command = format!("measure {name}");
    if let Some(path) = out {
        let w = io::create(path)?;
        if path.extension().is_some_and(|e| e == "csv") {
            io::write_report_csv(w, &cfg.header(&command), &report)?;
        } else {
            io::write_report_json(w, cfg.to_json(&command), &report)?;
        }
    }
    writeln!(stdout, "{command}")?;
    writeln!(stdout, "total = {}", report.total)?;
    if let (Some(lp), Some(sn)) = (report.lp, report.seminorm) {
        writeln!(stdout, "lp = {lp}\nseminorm = {sn}")?;
    }
    for flag in &report.flags {
        writeln!(stdout, "warning: {flag}")?;
    }
    Ok(())
}

fn verify(
    scenario: &str,
    cfg: &ExperimentConfig,
    out: Option<&Path>,
    plot_data: Option<&Path>,
    stdout: &mut dyn Write,
) -> CliResult<()> {
    let outcome = run_scenario(scenario, cfg)?;
    let command = format!("verify {scenario}");
    for c in &outcome.criteria {
        writeln!(stdout, "{}", c.line())?;
    }
    let passed = outcome.criteria.iter().filter(|c| c.pass).count();
    writeln!(stdout, "{scenario}: {passed}/{} criteria passed", outcome.criteria.len())?;
    if let Some(dir) = out {
        let mut meta = cfg.to_json(&command);
        meta["criteria"] = serde_json::to_value(&outcome.criteria)?;
        meta["passed"] = serde_json::Value::Bool(outcome.passed());
        let mut w = io::create(&dir.join(format!("{scenario}.json")))?;
        serde_json::to_writer_pretty(&mut w, &meta)?;
        writeln!(w)?;
        w.flush()?;
        io::write_curves_csv(
            io::create(&dir.join(format!("{scenario}_curves.csv")))?,
            &cfg.header(&command),
            &outcome.curves,
        )?;
    }
    if let Some(dir) = plot_data {
        for set in &outcome.curves {
            io::write_dat(
                io::create(&dir.join(format!("{scenario}_{}.dat", set.scan)))?,
                &cfg.header(&command),
                set,
            )?;
        }
    }
    if outcome.passed() {
        Ok(())
    } else {
        let failed: Vec<&str> = outcome.criteria.iter().filter(|c| !c.pass).map(|c| c.id.as_str()).collect();
        Err(CliError::Criterion(format!("{scenario}: failed {}", failed.join(", "))))
    }
}

fn sample_name(what: SampleKind) -> &'static str {
    match what {
        SampleKind::Bump => "bump",
        SampleKind::Hat => "hat",
        SampleKind::Constant => "constant",
        SampleKind::Slice => "slice",
        SampleKind::Coeffs => "coeffs",
    }
}

fn sample(
    what: SampleKind,
    cfg: &ExperimentConfig,
    coeffs: Option<&Path>,
    out: &Path,
    stdout: &mut dyn Write,
) -> CliResult<()> {
    let boxed = |n: usize| GridSpec::new(vec![cfg.lower; n], vec![cfg.upper; n], cfg.level);
    let f = match what {
        SampleKind::Bump => {
            let b = BumpFn::new(cfg.n)?;
            GridFunction::sample(boxed(cfg.n)?, |x| b.eval(x))?
        }
        SampleKind::Hat => GridFunction::sample(boxed(cfg.n)?, |x| x.iter().map(|v| (v - 0.5).abs()).sum())?,
        SampleKind::Constant => GridFunction::sample(boxed(cfg.n)?, |_| 1.0)?,
        SampleKind::Slice => {
            let seq = construct_lambda(cfg.p, cfg.q, cfg.jmax)?;
            let spec = CounterexampleSpec::new(cfg.n.max(2), cfg.s, cfg.p, cfg.q, unit(), seq)?;
            let g = strip_grid(&spec, cfg.top, cfg.level)?;
            let sl = slice_truncated(&spec, cfg.x, &g, cfg.top)?;
            for w in &sl.warnings {
                writeln!(stdout, "warning: {w}")?;
            }
            sl.grid
        }
        SampleKind::Coeffs => {
            let path = coeffs.ok_or_else(|| CliError::Usage(String::from("`sample coeffs` needs --coeffs")))?;
            load_input(cfg, None, Some(path))?
        }
    };
    let command = format!("sample {}", sample_name(what));
    io::write_grid(io::create(out)?, cfg.to_json(&command), &f)?;
    writeln!(stdout, "{command}")?;
    writeln!(stdout, "nodes = {}", f.values().len())?;
    Ok(())
}
