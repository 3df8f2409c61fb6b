//! Subcommand definitions and dispatch.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use polarimeter::analysis::{
    cluster_concentration_experiment, compare, crossover_alpha, middle_class_transfer_experiment, ClusterParams,
    CrossoverResult, MiddleClassParams, Ordering, DEFAULT_TIE_TOLERANCE,
};
use polarimeter::axioms::{self, AxiomReport, ProbePlan};
use polarimeter::model::shape::{default_grid_for, uniform_grid, DEFAULT_D_MAX};
use polarimeter::thresholds::{critical_alpha, default_ratio_grid, feasible_alpha_interval, ThresholdEstimate};
use polarimeter::{evaluate_index, AntagonismSpec, Distribution};
use serde::Serialize;

use crate::error::{CliError, Result};
use crate::input::{parse_alienation_descriptor, parse_distribution_file, parse_range, parse_spec};

#[derive(Debug, Parser)]
#[command(
    name = "polarimeter",
    version,
    about = "Polarization indices, axiom checks and critical exponents"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Seed for randomized probes; recorded in every report.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the index of one distribution.
    Index {
        #[command(flatten)]
        dist: DistArgs,
        #[command(flatten)]
        spec: SpecArgs,
    },
    /// Rank two distributions under one antagonism function.
    Compare {
        #[command(flatten)]
        dist: DistArgs,
        #[arg(long)]
        dist2: PathBuf,
        #[command(flatten)]
        spec: SpecArgs,
        /// Relative tie tolerance.
        #[arg(long, default_value_t = DEFAULT_TIE_TOLERANCE)]
        tol: f64,
    },
    /// Scan the ranking of two distributions over a range of exponents.
    Sweep {
        #[command(flatten)]
        dist: DistArgs,
        #[arg(long)]
        dist2: PathBuf,
        #[arg(long, default_value = "linear")]
        alienation: String,
        #[arg(long, value_parser = parse_range, default_value = "0.025,1.6")]
        alpha_range: (f64, f64),
        /// Number of grid exponents.
        #[arg(long, default_value_t = 64)]
        grid: usize,
        /// Bisection tolerance for crossovers.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Check Condition H and Axioms 1-3.
    Axioms {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, value_enum, default_value_t = AxiomSelection::All)]
        axiom: AxiomSelection,
        #[arg(long, value_enum, default_value_t = ModeSelection::Both)]
        mode: ModeSelection,
        /// Random probes per randomized check.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Side-group sizes for the Axiom 1 search.
        #[arg(long, value_delimiter = ',', default_value = "2,3,5,10")]
        p_values: Vec<u64>,
        /// Side-group positions for the Axiom 1 search.
        #[arg(long, value_delimiter = ',', default_value = "0.5,1,2")]
        x_values: Vec<f64>,
        /// Lattice limit for the Axiom 3 characterization.
        #[arg(long, default_value_t = 200)]
        lattice: u64,
        /// Points of the convexity grid (default grid when omitted).
        #[arg(long)]
        grid: Option<usize>,
        /// Exit with status 1 when any check fails.
        #[arg(long)]
        strict: bool,
    },
    /// Estimate the largest exponent whose supremum stays below a bound.
    Thresholds {
        /// Ratio bound compared against the supremum of g.
        #[arg(long, conflicts_with = "alienation", required_unless_present = "alienation")]
        bound: Option<f64>,
        /// Derive the bound from this alienation function's ratio infimum.
        #[arg(long)]
        alienation: Option<String>,
        #[arg(long, default_value_t = 0.01)]
        tol: f64,
        #[arg(long, value_parser = parse_range, default_value = "0,4")]
        alpha_range: (f64, f64),
    },
    /// Ranking-reversal experiments.
    Experiments {
        #[arg(long, value_enum, default_value_t = ExperimentSelection::All)]
        experiment: ExperimentSelection,
        /// Repeat for several functions.
        #[arg(long, default_values_t = ["linear".to_string(), "power:2".to_string()])]
        alienation: Vec<String>,
        #[arg(long, value_parser = parse_range, default_value = "0.025,1.6")]
        alpha_range: (f64, f64),
        #[arg(long, default_value_t = 64)]
        grid: usize,
        /// Middle-class transfer offset from the extremes.
        #[arg(long, default_value_t = 0.1)]
        offset: f64,
        /// Cluster widths.
        #[arg(long, value_delimiter = ',', default_value = "0.2,0.1,0.05,0.02,0.01")]
        md: Vec<f64>,
    },
}

#[derive(Debug, Args)]
pub struct DistArgs {
    /// Distribution file: CSV with header `pi,y`, or JSON with `pi` and `y`.
    #[arg(long)]
    pub dist: PathBuf,
    /// Merge groups that share a characteristic value instead of rejecting them.
    #[arg(long)]
    pub merge_duplicates: bool,
}

#[derive(Debug, Args)]
pub struct SpecArgs {
    #[arg(long, conflicts_with = "spec", required_unless_present = "spec")]
    pub alpha: Option<f64>,
    #[arg(long, conflicts_with = "spec", default_value = "linear")]
    pub alienation: String,
    /// Combined form `alpha=<a>,<descriptor>`.
    #[arg(long)]
    pub spec: Option<String>,
}

impl SpecArgs {
    fn resolve(&self) -> Result<AntagonismSpec> {
        match (&self.spec, self.alpha) {
            (Some(text), _) => parse_spec(text),
            (None, Some(alpha)) => Ok(AntagonismSpec::new(
                alpha,
                parse_alienation_descriptor(&self.alienation)?,
            )?),
            (None, None) => Err(CliError::Usage("either --alpha or --spec is required".into())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AxiomSelection {
    All,
    H,
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
    #[value(name = "3")]
    Three,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeSelection {
    Both,
    Direct,
    Characterization,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExperimentSelection {
    All,
    MiddleClass,
    Clusters,
}

/// Rendered report plus whether a strict axiom check failed.
pub struct Outcome {
    pub bytes: Vec<u8>,
    pub strict_failure: bool,
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    command: &'a str,
    seed: u64,
    #[serde(flatten)]
    body: T,
}

fn render_json<T: Serialize>(command: &str, seed: u64, body: T) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(&Envelope { command, seed, body })?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn render_csv<R: Serialize>(rows: impl IntoIterator<Item = R>) -> Result<Vec<u8>> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer.serialize(row)?;
    }
    writer.into_inner().map_err(|e| CliError::Csv(e.into_error().into()))
}

fn load(args: &DistArgs) -> Result<Distribution> {
    parse_distribution_file(&args.dist, args.merge_duplicates)
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    let seed = cli.seed;
    let json = cli.format == Format::Json;
    let mut strict_failure = false;
    let bytes = match &cli.command {
        Command::Index { dist, spec } => {
            let dist = load(dist)?;
            let spec = spec.resolve()?;
            let p = evaluate_index(&dist, &spec)?;
            #[derive(Serialize)]
            struct Body<'a> {
                #[serde(rename = "P")]
                p: f64,
                alpha: f64,
                alienation: String,
                distribution: &'a Distribution,
            }
            #[derive(Serialize)]
            struct Row {
                seed: u64,
                alpha: f64,
                alienation: String,
                #[serde(rename = "P")]
                p: f64,
            }
            let alienation = spec.alienation().to_string();
            if json {
                render_json(
                    "index",
                    seed,
                    Body {
                        p,
                        alpha: spec.alpha(),
                        alienation,
                        distribution: &dist,
                    },
                )?
            } else {
                render_csv([Row {
                    seed,
                    alpha: spec.alpha(),
                    alienation,
                    p,
                }])?
            }
        }
        Command::Compare { dist, dist2, spec, tol } => {
            let d1 = load(dist)?;
            let d2 = parse_distribution_file(dist2, dist.merge_duplicates)?;
            let result = compare(&d1, &d2, &spec.resolve()?, *tol)?;
            #[derive(Serialize)]
            struct Row {
                seed: u64,
                alpha: f64,
                alienation: String,
                p1: f64,
                p2: f64,
                ordering: Ordering,
            }
            if json {
                render_json("compare", seed, &result)?
            } else {
                render_csv([Row {
                    seed,
                    alpha: result.spec.alpha(),
                    alienation: result.spec.alienation().to_string(),
                    p1: result.p1,
                    p2: result.p2,
                    ordering: result.ordering,
                }])?
            }
        }
        Command::Sweep {
            dist,
            dist2,
            alienation,
            alpha_range,
            grid,
            tol,
        } => {
            let d1 = load(dist)?;
            let d2 = parse_distribution_file(dist2, dist.merge_duplicates)?;
            let f = parse_alienation_descriptor(alienation)?;
            let result = crossover_alpha(&d1, &d2, &f, *alpha_range, *grid, *tol)?;
            if json {
                render_json("sweep", seed, &result)?
            } else {
                render_csv(sweep_rows(seed, &result))?
            }
        }
        Command::Axioms {
            spec,
            axiom,
            mode,
            samples,
            p_values,
            x_values,
            lattice,
            grid,
            strict,
        } => {
            let spec = spec.resolve()?;
            let plan = ProbePlan {
                sample_count: *samples,
                seed,
                ..ProbePlan::default()
            };
            let reports = run_axioms(&spec, &plan, *axiom, *mode, p_values, x_values, *lattice, *grid)?;
            strict_failure = *strict && reports.iter().any(AxiomReport::failed);
            #[derive(Serialize)]
            struct Body<'a> {
                spec: &'a AntagonismSpec,
                reports: &'a [AxiomReport],
            }
            #[derive(Serialize)]
            struct Row<'a> {
                seed: u64,
                axiom: String,
                mode: String,
                verdict: String,
                probes: usize,
                violations: usize,
                min_margin: Option<f64>,
                notes: &'a str,
            }
            if json {
                render_json(
                    "axioms",
                    seed,
                    Body {
                        spec: &spec,
                        reports: &reports,
                    },
                )?
            } else {
                render_csv(reports.iter().map(|r| Row {
                    seed,
                    axiom: format!("{:?}", r.axiom),
                    mode: format!("{:?}", r.mode),
                    verdict: format!("{:?}", r.verdict),
                    probes: r.probes,
                    violations: r.violations,
                    min_margin: r.min_margin,
                    notes: &r.notes,
                }))?
            }
        }
        Command::Thresholds {
            bound,
            alienation,
            tol,
            alpha_range,
        } => {
            let estimate: ThresholdEstimate = match (bound, alienation) {
                (Some(b), _) => critical_alpha(*b, *tol, *alpha_range)?,
                (None, Some(text)) => feasible_alpha_interval(&parse_alienation_descriptor(text)?, *tol)?,
                (None, None) => return Err(CliError::Usage("either --bound or --alienation is required".into())),
            };
            #[derive(Serialize)]
            struct Row {
                seed: u64,
                alpha: f64,
                m_alpha: f64,
            }
            if json {
                render_json("thresholds", seed, &estimate)?
            } else {
                render_csv(
                    estimate
                        .m_alpha_samples
                        .iter()
                        .map(|&(alpha, m_alpha)| Row { seed, alpha, m_alpha }),
                )?
            }
        }
        Command::Experiments {
            experiment,
            alienation,
            alpha_range,
            grid,
            offset,
            md,
        } => {
            let fns = alienation
                .iter()
                .map(|d| parse_alienation_descriptor(d))
                .collect::<Result<Vec<_>>>()?;
            if *grid < 2 {
                return Err(CliError::Usage("--grid needs at least 2 points".into()));
            }
            let alpha_grid = uniform_grid(alpha_range.0, alpha_range.1, *grid);
            let middle = matches!(experiment, ExperimentSelection::All | ExperimentSelection::MiddleClass)
                .then(|| {
                    let params = MiddleClassParams {
                        offset: *offset,
                        ..MiddleClassParams::default()
                    };
                    middle_class_transfer_experiment(&params, &fns, &alpha_grid)
                })
                .transpose()?;
            let clusters = matches!(experiment, ExperimentSelection::All | ExperimentSelection::Clusters)
                .then(|| cluster_concentration_experiment(&ClusterParams::default(), md, &fns, &alpha_grid))
                .transpose()?;
            if json {
                #[derive(Serialize)]
                struct Body<T, U> {
                    #[serde(skip_serializing_if = "Option::is_none")]
                    middle_class: Option<T>,
                    #[serde(skip_serializing_if = "Option::is_none")]
                    clusters: Option<U>,
                }
                render_json(
                    "experiments",
                    seed,
                    Body {
                        middle_class: middle,
                        clusters,
                    },
                )?
            } else {
                let mut rows = Vec::new();
                if let Some(t) = &middle {
                    for r in &t.results {
                        rows.extend(crossover_rows(seed, "middle_class", None, r));
                    }
                }
                if let Some(t) = &clusters {
                    for row in &t.rows {
                        for r in &row.results {
                            rows.extend(crossover_rows(seed, "clusters", Some(row.md), r));
                        }
                    }
                }
                render_csv(rows)?
            }
        }
    };
    Ok(Outcome { bytes, strict_failure })
}

#[allow(clippy::too_many_arguments)]
fn run_axioms(
    spec: &AntagonismSpec,
    plan: &ProbePlan,
    axiom: AxiomSelection,
    mode: ModeSelection,
    p_values: &[u64],
    x_values: &[f64],
    lattice: u64,
    grid: Option<usize>,
) -> Result<Vec<AxiomReport>> {
    let wants = |a: AxiomSelection| axiom == AxiomSelection::All || axiom == a;
    let direct = mode != ModeSelection::Characterization;
    let characterization = mode != ModeSelection::Direct;
    let f = spec.alienation();
    let mut reports = Vec::new();
    if wants(AxiomSelection::H) {
        reports.push(axioms::check_condition_h(spec, plan)?);
    }
    if wants(AxiomSelection::One) {
        if direct {
            reports.push(axioms::check_axiom1_direct(spec, p_values, x_values, plan)?);
        }
        if characterization {
            reports.push(axioms::check_axiom1_characterization(spec));
        }
    }
    if wants(AxiomSelection::Two) {
        if direct {
            reports.push(axioms::check_axiom2_direct(spec, plan)?);
        }
        if characterization {
            let convexity_grid = match grid {
                Some(n) => uniform_grid(0.0, f.domain_max().unwrap_or(DEFAULT_D_MAX), n),
                None => default_grid_for(f),
            };
            reports.push(axioms::check_axiom2_characterization(spec, &convexity_grid)?);
        }
    }
    if wants(AxiomSelection::Three) {
        if direct {
            reports.push(axioms::check_axiom3_direct(
                spec,
                &axioms::random_axiom3_configs(plan)?,
            )?);
        }
        if characterization {
            reports.push(axioms::check_axiom3_characterization(
                spec,
                lattice,
                lattice,
                &default_ratio_grid(f),
            )?);
        }
    }
    Ok(reports)
}

#[derive(Serialize)]
struct SweepRow {
    seed: u64,
    alienation: String,
    alpha: f64,
    p1: f64,
    p2: f64,
    ordering: Ordering,
}

fn sweep_rows(seed: u64, r: &CrossoverResult) -> impl Iterator<Item = SweepRow> + '_ {
    (0..r.alpha_grid.len()).map(move |k| SweepRow {
        seed,
        alienation: r.alienation.to_string(),
        alpha: r.alpha_grid[k],
        p1: r.p1[k],
        p2: r.p2[k],
        ordering: r.sign_series[k],
    })
}

#[derive(Serialize)]
struct CrossoverRow<'a> {
    seed: u64,
    experiment: &'a str,
    md: Option<f64>,
    alienation: String,
    crossover_alpha: Option<f64>,
    bracket_lo: Option<f64>,
    bracket_hi: Option<f64>,
    below: Option<Ordering>,
    above: Option<Ordering>,
}

/// One row per crossover, or a single empty row when there is none.
fn crossover_rows<'a>(seed: u64, experiment: &'a str, md: Option<f64>, r: &CrossoverResult) -> Vec<CrossoverRow<'a>> {
    let base = || CrossoverRow {
        seed,
        experiment,
        md,
        alienation: r.alienation.to_string(),
        crossover_alpha: None,
        bracket_lo: None,
        bracket_hi: None,
        below: None,
        above: None,
    };
    if r.crossovers.is_empty() {
        return vec![base()];
    }
    r.crossovers
        .iter()
        .map(|c| CrossoverRow {
            crossover_alpha: Some(c.alpha),
            bracket_lo: Some(c.bracket.0),
            bracket_hi: Some(c.bracket.1),
            below: Some(c.below),
            above: Some(c.above),
            ..base()
        })
        .collect()
}
