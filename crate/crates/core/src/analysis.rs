//! Pairwise comparisons, crossover exponents and two ranking-reversal
//! experiments: removing a middle class, and concentrating dispersed
//! groups into tight clusters.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::shape::uniform_grid;
use crate::model::{evaluate_index, Alienation, AntagonismSpec, Distribution};

/// Relative tolerance under which two index values count as tied.
pub const DEFAULT_TIE_TOLERANCE: f64 = 1e-12;
pub const DEFAULT_ALPHA_RANGE: (f64, f64) = (0.025, 1.6);
pub const DEFAULT_ALPHA_POINTS: usize = 64;
pub const DEFAULT_CROSSOVER_TOLERANCE: f64 = 1e-6;
const MAX_BISECTION_STEPS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Ordering {
    FirstHigher,
    SecondHigher,
    Tie,
}

impl Ordering {
    pub fn reversed(self) -> Self {
        match self {
            Ordering::FirstHigher => Ordering::SecondHigher,
            Ordering::SecondHigher => Ordering::FirstHigher,
            Ordering::Tie => Ordering::Tie,
        }
    }

    fn classify(p1: f64, p2: f64, tie_tolerance: f64) -> Self {
        if (p1 - p2).abs() <= tie_tolerance * p1.abs().max(p2.abs()) {
            Ordering::Tie
        } else if p1 > p2 {
            Ordering::FirstHigher
        } else {
            Ordering::SecondHigher
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonResult {
    pub p1: f64,
    pub p2: f64,
    pub ordering: Ordering,
    pub spec: AntagonismSpec,
}

pub fn compare(
    d1: &Distribution,
    d2: &Distribution,
    spec: &AntagonismSpec,
    tie_tolerance: f64,
) -> Result<ComparisonResult> {
    if !(tie_tolerance.is_finite() && tie_tolerance >= 0.0) {
        return Err(Error::InvalidParameter(format!("tie tolerance {tie_tolerance}")));
    }
    let p1 = evaluate_index(d1, spec)?;
    let p2 = evaluate_index(d2, spec)?;
    Ok(ComparisonResult {
        p1,
        p2,
        ordering: Ordering::classify(p1, p2, tie_tolerance),
        spec: spec.clone(),
    })
}

/// An exponent bracket whose endpoints carry opposite strict orderings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Crossover {
    pub alpha: f64,
    pub bracket: (f64, f64),
    /// Ordering at the lower end of the bracket.
    pub below: Ordering,
    pub above: Ordering,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossoverResult {
    pub alienation: Alienation,
    pub alpha_grid: Vec<f64>,
    pub p1: Vec<f64>,
    pub p2: Vec<f64>,
    pub sign_series: Vec<Ordering>,
    pub crossovers: Vec<Crossover>,
    pub tolerance: f64,
}

impl CrossoverResult {
    /// Ordering at the grid point nearest `alpha`.
    pub fn ordering_near(&self, alpha: f64) -> Option<Ordering> {
        let k = self
            .alpha_grid
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - alpha).abs().total_cmp(&(b.1 - alpha).abs()))?
            .0;
        Some(self.sign_series[k])
    }

    pub fn first_crossover_in(&self, lo: f64, hi: f64) -> Option<&Crossover> {
        self.crossovers.iter().find(|c| c.alpha > lo && c.alpha <= hi)
    }
}

/// `P(d1; α) − P(d2; α)` sign changes over a uniform grid of `grid_points`
/// exponents on `alpha_range`, each refined by bisection to `tolerance`.
pub fn crossover_alpha(
    d1: &Distribution,
    d2: &Distribution,
    f: &Alienation,
    alpha_range: (f64, f64),
    grid_points: usize,
    tolerance: f64,
) -> Result<CrossoverResult> {
    let (lo, hi) = alpha_range;
    if !(lo.is_finite() && hi.is_finite() && lo >= 0.0 && lo < hi) {
        return Err(Error::InvalidParameter(format!("alpha range ({lo}, {hi})")));
    }
    if grid_points < 2 {
        return Err(Error::GridTooSmall(grid_points));
    }
    crossover_on_grid(d1, d2, f, &uniform_grid(lo, hi, grid_points), tolerance)
}

/// As [`crossover_alpha`] on an explicit sorted grid.
pub fn crossover_on_grid(
    d1: &Distribution,
    d2: &Distribution,
    f: &Alienation,
    alpha_grid: &[f64],
    tolerance: f64,
) -> Result<CrossoverResult> {
    if alpha_grid.len() < 2 {
        return Err(Error::GridTooSmall(alpha_grid.len()));
    }
    if alpha_grid.iter().any(|a| !(a.is_finite() && *a >= 0.0)) || alpha_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidGrid);
    }
    if !(tolerance.is_finite() && tolerance > 0.0) {
        return Err(Error::InvalidParameter(format!("crossover tolerance {tolerance}")));
    }
    let at = |alpha: f64| -> Result<ComparisonResult> {
        compare(d1, d2, &AntagonismSpec::new(alpha, f.clone())?, DEFAULT_TIE_TOLERANCE)
    };
    let samples = alpha_grid.par_iter().map(|&a| at(a)).collect::<Result<Vec<_>>>()?;
    let sign_series: Vec<Ordering> = samples.iter().map(|s| s.ordering).collect();

    let strict: Vec<usize> = (0..sign_series.len())
        .filter(|&k| sign_series[k] != Ordering::Tie)
        .collect();
    let mut crossovers = Vec::new();
    for w in strict.windows(2) {
        let (i, j) = (w[0], w[1]);
        if sign_series[i] == sign_series[j] {
            continue;
        }
        let (mut a, mut b) = (alpha_grid[i], alpha_grid[j]);
        let below = sign_series[i];
        for _ in 0..MAX_BISECTION_STEPS {
            if b - a <= tolerance {
                break;
            }
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            match at(mid)?.ordering {
                Ordering::Tie => break,
                o if o == below => a = mid,
                _ => b = mid,
            }
        }
        crossovers.push(Crossover {
            alpha: 0.5 * (a + b),
            bracket: (a, b),
            below,
            above: sign_series[j],
        });
    }
    Ok(CrossoverResult {
        alienation: f.clone(),
        alpha_grid: alpha_grid.to_vec(),
        p1: samples.iter().map(|s| s.p1).collect(),
        p2: samples.iter().map(|s| s.p2).collect(),
        sign_series,
        crossovers,
        tolerance,
    })
}

/// `DEFAULT_ALPHA_POINTS` uniform exponents on `(0, 1.6]`.
pub fn default_alpha_grid() -> Vec<f64> {
    uniform_grid(DEFAULT_ALPHA_RANGE.0, DEFAULT_ALPHA_RANGE.1, DEFAULT_ALPHA_POINTS)
}

/// How the central group of the middle-class experiment is emptied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Transfer {
    /// The whole central group moves, half to each side.
    Full,
    /// `moved` individuals move to each side; the rest stay in the centre.
    Partial { moved: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MiddleClassParams {
    pub p: u64,
    pub q: u64,
    pub y_span: f64,
    pub offset: f64,
    pub transfer: Transfer,
}

impl Default for MiddleClassParams {
    fn default() -> Self {
        Self {
            p: 10,
            q: 10,
            y_span: 2.0,
            offset: 0.1,
            transfer: Transfer::Full,
        }
    }
}

pub const MAX_TRANSFER_OFFSET: f64 = 0.1;

impl MiddleClassParams {
    /// `D1 = ((p,q,p),(0, s/2, s))` and the post-transfer `D2`.
    pub fn distributions(&self) -> Result<(Distribution, Distribution)> {
        let Self {
            p,
            q,
            y_span: s,
            offset,
            transfer,
        } = *self;
        if p < 1 || q < 1 {
            return Err(Error::InvalidParameter(format!("need p, q >= 1, got ({p}, {q})")));
        }
        if !(s.is_finite() && s > 2.0 * MAX_TRANSFER_OFFSET) {
            return Err(Error::InvalidParameter(format!("y_span {s}")));
        }
        if !(offset.is_finite() && (0.0..=MAX_TRANSFER_OFFSET).contains(&offset)) {
            return Err(Error::InvalidParameter(format!(
                "offset {offset} outside (0, {MAX_TRANSFER_OFFSET}]"
            )));
        }
        let d1 = Distribution::new(vec![p, q, p], vec![0.0, 0.5 * s, s])?;
        let d2 = match transfer {
            Transfer::Full => {
                if q % 2 == 1 {
                    return Err(Error::OddCentralGroup(q));
                }
                Distribution::new(vec![p, q / 2, q / 2, p], vec![0.0, offset, s - offset, s])?
            }
            Transfer::Partial { moved } => {
                if moved < 1 || 2 * moved >= q {
                    return Err(Error::InvalidParameter(format!("partial transfer of {moved} from {q}")));
                }
                Distribution::new(
                    vec![p, moved, q - 2 * moved, moved, p],
                    vec![0.0, offset, 0.5 * s, s - offset, s],
                )?
            }
        };
        Ok((d1, d2))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MiddleClassTable {
    pub params: MiddleClassParams,
    pub d1: Distribution,
    pub d2: Distribution,
    pub results: Vec<CrossoverResult>,
}

pub fn middle_class_transfer_experiment(
    params: &MiddleClassParams,
    fn_list: &[Alienation],
    alpha_grid: &[f64],
) -> Result<MiddleClassTable> {
    let (d1, d2) = params.distributions()?;
    let results = fn_list
        .iter()
        .map(|f| crossover_on_grid(&d1, &d2, f, alpha_grid, DEFAULT_CROSSOVER_TOLERANCE))
        .collect::<Result<_>>()?;
    Ok(MiddleClassTable {
        params: *params,
        d1,
        d2,
        results,
    })
}

/// Dispersed equal groups versus the same population packed into clusters
/// of equal groups spread symmetrically over width `md` around each centre.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterParams {
    pub dispersed_groups: usize,
    pub dispersed_size: u64,
    pub dispersed_range: (f64, f64),
    pub centers: Vec<f64>,
    pub groups_per_cluster: usize,
    pub cluster_group_size: u64,
}

impl Default for ClusterParams {
    fn default() -> Self {
        Self {
            dispersed_groups: 12,
            dispersed_size: 100,
            dispersed_range: (1.0, 2.0),
            centers: vec![1.0, 2.0],
            groups_per_cluster: 10,
            cluster_group_size: 60,
        }
    }
}

impl ClusterParams {
    pub fn dispersed(&self) -> Result<Distribution> {
        let (lo, hi) = self.dispersed_range;
        if self.dispersed_groups < 2 || lo >= hi || !(lo.is_finite() && hi.is_finite()) {
            return Err(Error::InvalidParameter(
                "dispersed groups need n >= 2 on a proper range".into(),
            ));
        }
        Distribution::new(
            vec![self.dispersed_size; self.dispersed_groups],
            uniform_grid(lo, hi, self.dispersed_groups),
        )
    }

    pub fn clustered(&self, md: f64) -> Result<Distribution> {
        if !(md.is_finite() && md > 0.0) {
            return Err(Error::InvalidParameter(format!("md must be > 0, got {md}")));
        }
        if self.centers.is_empty() || self.groups_per_cluster < 2 {
            return Err(Error::InvalidParameter("need clusters of at least two groups".into()));
        }
        let y: Vec<f64> = self
            .centers
            .iter()
            .flat_map(|&c| uniform_grid(c - 0.5 * md, c + 0.5 * md, self.groups_per_cluster))
            .collect();
        Distribution::new(vec![self.cluster_group_size; y.len()], y)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterRow {
    pub md: f64,
    pub clustered: Distribution,
    pub results: Vec<CrossoverResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterTable {
    pub params: ClusterParams,
    pub dispersed: Distribution,
    pub rows: Vec<ClusterRow>,
}

/// Compares the dispersed distribution (first) with the clustered one
/// (second) for each spread in `md_values`.
pub fn cluster_concentration_experiment(
    params: &ClusterParams,
    md_values: &[f64],
    fn_list: &[Alienation],
    alpha_grid: &[f64],
) -> Result<ClusterTable> {
    let dispersed = params.dispersed()?;
    let rows = md_values
        .iter()
        .map(|&md| {
            let clustered = params.clustered(md)?;
            if clustered.total_population() != dispersed.total_population() {
                return Err(Error::InvalidParameter(format!(
                    "population totals differ: {} dispersed vs {} clustered",
                    dispersed.total_population(),
                    clustered.total_population()
                )));
            }
            let results = fn_list
                .iter()
                .map(|f| crossover_on_grid(&dispersed, &clustered, f, alpha_grid, DEFAULT_CROSSOVER_TOLERANCE))
                .collect::<Result<_>>()?;
            Ok(ClusterRow { md, clustered, results })
        })
        .collect::<Result<_>>()?;
    Ok(ClusterTable {
        params: params.clone(),
        dispersed,
        rows,
    })
}
