//! Checks for Condition H and Axioms 1–3.
//!
//! Each axiom has a direct checker that evaluates the index on the
//! configurations the axiom quantifies over, and (for Axioms 1–3) a
//! characterization checker that tests the equivalent condition on the
//! antagonism function:
//!
//! | axiom | characterization |
//! |-------|------------------|
//! | 1 | `α > 0` |
//! | 2 | `f` convex (sampled midpoint convexity) |
//! | 3 | `f(2d)/f(d) > g(p, q, α)` for all integer `p ≥ 1`, `q ≥ 2` |
//!
//! Direct checks of universally quantified statements can only refute:
//! they return `Fail` or `PassOnProbedSet`. Axiom 1 is `∀∃`, so its direct
//! pass only says that a suitable `(ε, q₀)` was found for every probed
//! `(p, x)`; certainty comes from the characterization. All strict
//! inequalities are compared without slack and the margins are reported.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::shape::SHAPE_TOLERANCE;
use crate::model::{evaluate_index, is_midpoint_convex, AntagonismSpec, Distribution};
use crate::thresholds::{alienation_ratio, g_value, sup_g};

/// Stored witnesses per report; the violation count is always complete.
pub const MAX_WITNESSES: usize = 16;
pub const EPSILON_RUNGS: u32 = 16;
pub const BALL_SAMPLES: usize = 9;
pub const MAX_LAMBDA: u64 = 50;
const STRUCTURED_LADDER: u32 = 10;
const SUP_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AxiomId {
    ConditionH,
    Axiom1,
    Axiom2,
    Axiom3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CheckMode {
    Direct,
    Characterization,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Pass,
    Fail,
    PassOnProbedSet,
}

/// A probed configuration. For every variant the checked statement is
/// `before < after`, except `ConditionH` (`before ≤ after`) and
/// `MidpointConvexity` (`before ≤ after + tolerance`).
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum Probe {
    /// `first` ranks weakly above `second` unscaled; `before`/`after` are
    /// the scaled indices of `second`/`first`.
    ConditionH {
        first: Distribution,
        second: Distribution,
        lambda: u64,
        unscaled: (f64, f64),
    },
    /// `P((p,q,q),(0,a,b))` vs `P((p,2q),(0,(a+b)/2))`.
    Axiom1 {
        p: u64,
        q: u64,
        a: f64,
        b: f64,
        epsilon: f64,
    },
    /// `P((p,q,r),(0,x,y))` vs `P((p,q,r),(0,x+Δ,y))`.
    Axiom2 {
        p: u64,
        q: u64,
        r: u64,
        x: f64,
        y: f64,
        delta: f64,
    },
    /// `P((p,q,p),(0,d,2d))` vs `P((p+Δ,q−2Δ,p+Δ),(0,d,2d))`.
    Axiom3 { p: u64, q: u64, d: f64, delta: u64 },
    /// `f((a+b)/2)` vs `(f(a)+f(b))/2`.
    MidpointConvexity { a: f64, b: f64, tolerance: f64 },
    /// `g(p,q,α)` vs `f(2d)/f(d)`.
    RatioBound { p: u64, q: u64, d: f64 },
}

impl Probe {
    /// Recomputes `(before, after)` from scratch.
    pub fn evaluate(&self, spec: &AntagonismSpec) -> Result<(f64, f64)> {
        match self {
            Probe::ConditionH {
                first, second, lambda, ..
            } => Ok((
                evaluate_index(&second.scale_population(*lambda)?, spec)?,
                evaluate_index(&first.scale_population(*lambda)?, spec)?,
            )),
            Probe::Axiom1 { p, q, a, b, .. } => {
                let before = Distribution::new(vec![*p, *q, *q], vec![0.0, *a, *b])?;
                let after = Distribution::new(vec![*p, 2 * q], vec![0.0, 0.5 * (a + b)])?;
                Ok((evaluate_index(&before, spec)?, evaluate_index(&after, spec)?))
            }
            Probe::Axiom2 { p, q, r, x, y, delta } => {
                let before = Distribution::new(vec![*p, *q, *r], vec![0.0, *x, *y])?;
                let after = Distribution::new(vec![*p, *q, *r], vec![0.0, x + delta, *y])?;
                Ok((evaluate_index(&before, spec)?, evaluate_index(&after, spec)?))
            }
            Probe::Axiom3 { p, q, d, delta } => {
                let (before, after) = axiom3_pair(*p, *q, *d, *delta)?;
                Ok((evaluate_index(&before, spec)?, evaluate_index(&after, spec)?))
            }
            Probe::MidpointConvexity { a, b, .. } => {
                let f = spec.alienation();
                Ok((f.evaluate(0.5 * (a + b))?, 0.5 * (f.evaluate(*a)? + f.evaluate(*b)?)))
            }
            Probe::RatioBound { p, q, d } => {
                Ok((g_value(*p, *q, spec.alpha())?, alienation_ratio(spec.alienation(), *d)?))
            }
        }
    }

    pub fn holds(&self, before: f64, after: f64) -> bool {
        match self {
            Probe::ConditionH { .. } => before <= after,
            Probe::MidpointConvexity { tolerance, .. } => before <= after + tolerance,
            _ => before < after,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub probe: Probe,
    pub before: f64,
    pub after: f64,
}

impl Witness {
    /// True when recomputation gives the same values and they still violate
    /// the checked statement.
    pub fn replay(&self, spec: &AntagonismSpec) -> Result<bool> {
        let (before, after) = self.probe.evaluate(spec)?;
        Ok(before == self.before && after == self.after && !self.probe.holds(before, after))
    }

    pub fn margin(&self) -> f64 {
        self.after - self.before
    }
}

/// `(ε, q₀)` found for one `(p, x)` by the Axiom-1 direct search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Axiom1Certificate {
    pub p: u64,
    pub x: f64,
    pub epsilon: f64,
    pub q0: u64,
}

/// Axiom-3 characterization figures on the probed lattice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioComparison {
    pub ratio_infimum: f64,
    pub ratio_argmin: f64,
    pub max_probed_g: f64,
    pub g_argmax: (u64, u64),
    /// Stabilized `M_α`, when the supremum search converged.
    pub sup_estimate: Option<f64>,
    /// `ratio_infimum − M_α`.
    pub sup_margin: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomReport {
    pub axiom: AxiomId,
    pub mode: CheckMode,
    pub verdict: Verdict,
    pub probes: usize,
    pub violations: usize,
    pub witnesses: Vec<Witness>,
    /// Smallest `after − before` over all probes.
    pub min_margin: Option<f64>,
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub certificates: Vec<Axiom1Certificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio_comparison: Option<RatioComparison>,
    pub notes: String,
}

impl AxiomReport {
    fn new(axiom: AxiomId, mode: CheckMode) -> Self {
        Self {
            axiom,
            mode,
            verdict: Verdict::PassOnProbedSet,
            probes: 0,
            violations: 0,
            witnesses: Vec::new(),
            min_margin: None,
            seed: None,
            certificates: Vec::new(),
            ratio_comparison: None,
            notes: String::new(),
        }
    }

    /// Folds evaluated probes in probe order.
    fn absorb(&mut self, outcomes: Vec<(Probe, f64, f64)>) {
        for (probe, before, after) in outcomes {
            self.probes += 1;
            let margin = after - before;
            self.min_margin = Some(self.min_margin.map_or(margin, |m| m.min(margin)));
            if !probe.holds(before, after) {
                self.violations += 1;
                if self.witnesses.len() < MAX_WITNESSES {
                    self.witnesses.push(Witness { probe, before, after });
                }
            }
        }
        if self.violations > 0 {
            self.verdict = Verdict::Fail;
        }
    }

    pub fn failed(&self) -> bool {
        self.verdict == Verdict::Fail
    }
}

/// Sampling plan for randomized probes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbePlan {
    pub population_range: (u64, u64),
    pub distance_range: (f64, f64),
    pub sample_count: usize,
    pub seed: u64,
}

impl Default for ProbePlan {
    fn default() -> Self {
        Self {
            population_range: (1, 20),
            distance_range: (0.1, 10.0),
            sample_count: 1000,
            seed: 0,
        }
    }
}

impl ProbePlan {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (pmin, pmax) = self.population_range;
        let (dmin, dmax) = self.distance_range;
        if pmin < 1 || pmin > pmax {
            return Err(Error::InvalidProbePlan(format!("population range ({pmin}, {pmax})")));
        }
        if !(dmin.is_finite() && dmax.is_finite() && dmin > 0.0 && dmin <= dmax) {
            return Err(Error::InvalidProbePlan(format!("distance range ({dmin}, {dmax})")));
        }
        if self.sample_count < 1 {
            return Err(Error::InvalidProbePlan("sample_count must be >= 1".into()));
        }
        Ok(())
    }

    fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

/// Uniform draw from the open interval `(0, 1)`.
fn open_unit(rng: &mut impl Rng) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}

fn draw_distance(rng: &mut impl Rng, (lo, hi): (f64, f64)) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.random_range(lo..=hi)
    }
}

fn evaluate_all(spec: &AntagonismSpec, probes: Vec<Probe>) -> Result<Vec<(Probe, f64, f64)>> {
    probes
        .into_par_iter()
        .map(|probe| {
            let (before, after) = probe.evaluate(spec)?;
            Ok((probe, before, after))
        })
        .collect()
}

fn random_distribution(rng: &mut impl Rng, plan: &ProbePlan) -> Result<Distribution> {
    let n = rng.random_range(2..=5usize);
    let pi: Vec<u64> = (0..n)
        .map(|_| rng.random_range(plan.population_range.0..=plan.population_range.1))
        .collect();
    let mut y: Vec<f64> = Vec::with_capacity(n);
    while y.len() < n {
        let v = draw_distance(rng, plan.distance_range);
        if !y.contains(&v) {
            y.push(v);
        } else if plan.distance_range.0 == plan.distance_range.1 {
            return Err(Error::InvalidProbePlan(
                "distance range too narrow for distinct values".into(),
            ));
        }
    }
    Distribution::new(pi, y)
}

/// Draws distribution pairs and `λ ∈ {1, …, 50}` and checks that the
/// weak ranking of each pair survives scaling both populations by `λ`.
pub fn check_condition_h(spec: &AntagonismSpec, plan: &ProbePlan) -> Result<AxiomReport> {
    plan.validate()?;
    let mut rng = plan.rng();
    let mut probes = Vec::with_capacity(plan.sample_count);
    for _ in 0..plan.sample_count {
        let d1 = random_distribution(&mut rng, plan)?;
        let d2 = random_distribution(&mut rng, plan)?;
        let lambda = rng.random_range(1..=MAX_LAMBDA);
        let (p1, p2) = (evaluate_index(&d1, spec)?, evaluate_index(&d2, spec)?);
        let (first, second, unscaled) = if p1 >= p2 {
            (d1, d2, (p1, p2))
        } else {
            (d2, d1, (p2, p1))
        };
        probes.push(Probe::ConditionH {
            first,
            second,
            lambda,
            unscaled,
        });
    }
    let mut report = AxiomReport::new(AxiomId::ConditionH, CheckMode::Direct);
    report.seed = Some(plan.seed);
    report.absorb(evaluate_all(spec, probes)?);
    report.notes = format!(
        "{} random pairs with 2..=5 groups, lambda in 1..={MAX_LAMBDA}",
        plan.sample_count
    );
    Ok(report)
}

/// Sample points strictly inside `B(x, ε)`.
fn ball_samples(x: f64, epsilon: f64) -> Vec<f64> {
    let half = (BALL_SAMPLES / 2) as f64;
    (0..BALL_SAMPLES)
        .map(|k| x + epsilon * 0.8 * (k as f64 - half) / half)
        .collect()
}

/// Evaluations spent, certificate if found, and the refuting rung otherwise.
type CaseOutcome = (usize, Option<Axiom1Certificate>, Vec<(Probe, f64, f64)>);

struct RungOutcome {
    q0: u64,
    probes: Vec<(Probe, f64, f64)>,
}

/// Largest `q₀ < p` such that every `q ≤ q₀` passes on the ball grid.
fn axiom1_rung(spec: &AntagonismSpec, p: u64, x: f64, epsilon: f64) -> Result<RungOutcome> {
    let points = ball_samples(x, epsilon);
    let mut probes = Vec::new();
    let mut q0 = 0;
    for q in 1..p {
        let mut all_hold = true;
        for (i, &a) in points.iter().enumerate() {
            for &b in &points[i + 1..] {
                let probe = Probe::Axiom1 { p, q, a, b, epsilon };
                let (before, after) = probe.evaluate(spec)?;
                all_hold &= probe.holds(before, after);
                probes.push((probe, before, after));
            }
        }
        if !all_hold {
            break;
        }
        q0 = q;
    }
    Ok(RungOutcome { q0, probes })
}

/// For each `(p, x)`, walks `ε = x/2, x/4, …, x/2¹⁶` looking for a `q₀`
/// such that merging the two `q`-groups increases the index for all
/// `q ≤ q₀` and all sampled `a < b` in `B(x, ε)`. A `(p, x)` is refuted
/// when every rung fails; the witnesses come from the smallest rung.
pub fn check_axiom1_direct(
    spec: &AntagonismSpec,
    p_values: &[u64],
    x_values: &[f64],
    plan: &ProbePlan,
) -> Result<AxiomReport> {
    if p_values.is_empty() || x_values.is_empty() {
        return Err(Error::EmptyProbeLists);
    }
    if let Some(p) = p_values.iter().find(|&&p| p <= 1) {
        return Err(Error::InvalidConfig(format!("Axiom 1 needs p > 1, got {p}")));
    }
    if let Some(x) = x_values.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
        return Err(Error::InvalidConfig(format!("Axiom 1 needs x > 0, got {x}")));
    }
    let cases: Vec<(u64, f64)> = p_values
        .iter()
        .flat_map(|&p| x_values.iter().map(move |&x| (p, x)))
        .collect();
    let results: Vec<CaseOutcome> = cases
        .par_iter()
        .map(|&(p, x)| {
            let mut evaluated = 0;
            let mut last_refutation = Vec::new();
            for rung in 1..=EPSILON_RUNGS {
                let epsilon = x / 2f64.powi(rung as i32);
                let outcome = axiom1_rung(spec, p, x, epsilon)?;
                evaluated += outcome.probes.len();
                if outcome.q0 >= 1 {
                    return Ok((
                        evaluated,
                        Some(Axiom1Certificate {
                            p,
                            x,
                            epsilon,
                            q0: outcome.q0,
                        }),
                        Vec::new(),
                    ));
                }
                last_refutation = outcome.probes;
            }
            Ok((evaluated, None, last_refutation))
        })
        .collect::<Result<_>>()?;

    let mut report = AxiomReport::new(AxiomId::Axiom1, CheckMode::Direct);
    report.seed = Some(plan.seed);
    let mut refuted = 0;
    let mut evaluated_total = 0;
    for (evaluated, certificate, refutation) in results {
        evaluated_total += evaluated;
        match certificate {
            Some(c) => report.certificates.push(c),
            None => {
                refuted += 1;
                report.absorb(refutation);
            }
        }
    }
    // violations and margins come from the smallest rung of refuted cases only
    report.probes = evaluated_total;
    report.verdict = if refuted > 0 {
        Verdict::Fail
    } else {
        Verdict::PassOnProbedSet
    };
    report.notes = format!(
        "{} (p, x) cases, {refuted} refuted; epsilon ladder x/2..x/2^{EPSILON_RUNGS}, {BALL_SAMPLES}x{BALL_SAMPLES} ball grid with a < b; \
         a direct pass is only relative to the probed set",
        p_values.len() * x_values.len()
    );
    Ok(report)
}

/// Passes iff `α > 0`.
pub fn check_axiom1_characterization(spec: &AntagonismSpec) -> AxiomReport {
    let mut report = AxiomReport::new(AxiomId::Axiom1, CheckMode::Characterization);
    report.probes = 1;
    if spec.alpha() > 0.0 {
        report.verdict = Verdict::Pass;
        report.notes = format!("alpha = {} > 0", spec.alpha());
    } else {
        report.verdict = Verdict::Fail;
        report.notes = "alpha = 0: identification is neutral".into();
    }
    report
}

/// Random `(p, q, r)` with `p > r`, `x < y < 2x`, `Δ ∈ (0, y − x)`,
/// plus structured probes `(n+2, n, n+1)`, `x = (z₀+z₁)/2`,
/// `y = 2x − z₀/(n+1)`, `Δ = (z₁−z₀)/2` that isolate the midpoint
/// inequality as `n` grows.
pub fn check_axiom2_direct(spec: &AntagonismSpec, plan: &ProbePlan) -> Result<AxiomReport> {
    plan.validate()?;
    let (pmin, pmax) = plan.population_range;
    if pmax < 2 || pmax == pmin {
        return Err(Error::InvalidProbePlan(
            "Axiom 2 needs a population range with p > r".into(),
        ));
    }
    let mut rng = plan.rng();
    let mut probes = Vec::new();
    for _ in 0..plan.sample_count {
        let r = rng.random_range(pmin..pmax);
        let p = rng.random_range(r + 1..=pmax);
        let q = rng.random_range(pmin..=pmax);
        let x = draw_distance(&mut rng, plan.distance_range);
        let y = x * (1.0 + open_unit(&mut rng));
        let delta = open_unit(&mut rng) * (y - x);
        if x + delta < y && y < 2.0 * x {
            probes.push(Probe::Axiom2 { p, q, r, x, y, delta });
        }
    }
    let structured = (plan.sample_count / 4).max(1);
    let mut attempts = 0;
    while probes.len() < plan.sample_count + structured && attempts < 100 * structured {
        attempts += 1;
        let z0 = draw_distance(&mut rng, plan.distance_range);
        let z1 = draw_distance(&mut rng, plan.distance_range);
        if z0 == z1 {
            continue;
        }
        let (z0, z1) = (z0.min(z1), z0.max(z1));
        let n = 1u64 << rng.random_range(0..=STRUCTURED_LADDER);
        let x = 0.5 * (z0 + z1);
        let y = 2.0 * x - z0 / (n + 1) as f64;
        let delta = 0.5 * (z1 - z0);
        if y - x < x && x < y && delta < y - x && x + delta < y {
            probes.push(Probe::Axiom2 {
                p: n + 2,
                q: n,
                r: n + 1,
                x,
                y,
                delta,
            });
        }
    }
    let mut report = AxiomReport::new(AxiomId::Axiom2, CheckMode::Direct);
    report.seed = Some(plan.seed);
    report.absorb(evaluate_all(spec, probes)?);
    report.notes = format!(
        "{} random probes plus structured (n+2, n, n+1) probes for n in 1..=2^{STRUCTURED_LADDER}",
        plan.sample_count
    );
    Ok(report)
}

/// Passes iff `f` is midpoint convex on `grid`.
pub fn check_axiom2_characterization(spec: &AntagonismSpec, grid: &[f64]) -> Result<AxiomReport> {
    let check = is_midpoint_convex(spec.alienation(), grid, SHAPE_TOLERANCE)?;
    let mut report = AxiomReport::new(AxiomId::Axiom2, CheckMode::Characterization);
    report.probes = grid.len() * (grid.len() - 1) / 2;
    report.min_margin = Some(-check.worst_excess);
    match check.witness {
        None => report.verdict = Verdict::Pass,
        Some((a, b)) => {
            let probe = Probe::MidpointConvexity {
                a,
                b,
                tolerance: SHAPE_TOLERANCE,
            };
            let (before, after) = probe.evaluate(spec)?;
            report.verdict = Verdict::Fail;
            report.violations = 1;
            report.witnesses.push(Witness { probe, before, after });
        }
    }
    report.notes = format!(
        "midpoint convexity over all pairs of {} grid points on [{}, {}], tolerance {SHAPE_TOLERANCE:e}",
        grid.len(),
        grid[0],
        grid[grid.len() - 1]
    );
    Ok(report)
}

/// One Axiom-3 configuration: `(p, q, p)` at `(0, d, 2d)` moving `Δ`
/// individuals from the centre to each extreme.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Axiom3Config {
    pub p: u64,
    pub q: u64,
    pub d: f64,
    pub delta: u64,
}

impl Axiom3Config {
    pub fn validate(&self) -> Result<()> {
        if self.p < 1 || self.q < 2 {
            return Err(Error::InvalidConfig(format!(
                "need p >= 1, q >= 2, got ({}, {})",
                self.p, self.q
            )));
        }
        if !(self.d.is_finite() && self.d > 0.0) {
            return Err(Error::InvalidConfig(format!("need d > 0, got {}", self.d)));
        }
        if self.delta < 1 || 2 * self.delta >= self.q {
            return Err(Error::InvalidConfig(format!(
                "transfer {} is outside (0, q/2) for q = {}",
                self.delta, self.q
            )));
        }
        Ok(())
    }
}

fn axiom3_pair(p: u64, q: u64, d: f64, delta: u64) -> Result<(Distribution, Distribution)> {
    let y = vec![0.0, d, 2.0 * d];
    let before = Distribution::new(vec![p, q, p], y.clone())?;
    let after = Distribution::new(vec![p + delta, q - 2 * delta, p + delta], y)?;
    Ok((before, after))
}

/// Random admissible Axiom-3 configurations drawn from the plan.
pub fn random_axiom3_configs(plan: &ProbePlan) -> Result<Vec<Axiom3Config>> {
    plan.validate()?;
    let (pmin, pmax) = plan.population_range;
    let q_lo = pmin.max(3);
    if pmax < q_lo {
        return Err(Error::InvalidProbePlan(
            "Axiom 3 needs populations up to at least 3".into(),
        ));
    }
    let mut rng = plan.rng();
    Ok((0..plan.sample_count)
        .map(|_| {
            let q = rng.random_range(q_lo..=pmax);
            Axiom3Config {
                p: rng.random_range(pmin..=pmax),
                q,
                d: draw_distance(&mut rng, plan.distance_range),
                delta: rng.random_range(1..=(q - 1) / 2),
            }
        })
        .collect())
}

pub fn check_axiom3_direct(spec: &AntagonismSpec, configs: &[Axiom3Config]) -> Result<AxiomReport> {
    if configs.is_empty() {
        return Err(Error::EmptyProbeLists);
    }
    for c in configs {
        c.validate()?;
    }
    let probes = configs
        .iter()
        .map(|c| Probe::Axiom3 {
            p: c.p,
            q: c.q,
            d: c.d,
            delta: c.delta,
        })
        .collect();
    let mut report = AxiomReport::new(AxiomId::Axiom3, CheckMode::Direct);
    report.absorb(evaluate_all(spec, probes)?);
    report.notes = format!("{} configurations at y = (0, d, 2d)", configs.len());
    Ok(report)
}

/// Checks `f(2d)/f(d) > g(p, q, α)` for every `d` in `d_grid`,
/// `1 ≤ p ≤ p_max`, `2 ≤ q ≤ q_max`, and reports the probed infimum of the
/// ratio next to the stabilized `M_α`.
pub fn check_axiom3_characterization(
    spec: &AntagonismSpec,
    p_max: u64,
    q_max: u64,
    d_grid: &[f64],
) -> Result<AxiomReport> {
    if p_max < 1 || q_max < 2 {
        return Err(Error::InvalidConfig(format!(
            "need p_max >= 1 and q_max >= 2, got ({p_max}, {q_max})"
        )));
    }
    if d_grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let alpha = spec.alpha();
    let (max_g, g_argmax) = (1..=p_max)
        .into_par_iter()
        .map(|p| {
            (2..=q_max)
                .map(|q| Ok((g_value(p, q, alpha)?, (p, q))))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .fold(
            (f64::NEG_INFINITY, (0, 0)),
            |best, cand| if cand.0 > best.0 { cand } else { best },
        );

    let mut ratio_infimum = f64::INFINITY;
    let mut ratio_argmin = d_grid[0];
    for &d in d_grid {
        if !(d.is_finite() && d > 0.0) {
            return Err(Error::DomainError(format!("ratio grid needs d > 0, got {d}")));
        }
        let ratio = alienation_ratio(spec.alienation(), d)?;
        if ratio < ratio_infimum {
            ratio_infimum = ratio;
            ratio_argmin = d;
        }
    }

    let mut report = AxiomReport::new(AxiomId::Axiom3, CheckMode::Characterization);
    report.probes = d_grid.len() * (p_max as usize) * (q_max as usize - 1);
    report.min_margin = Some(ratio_infimum - max_g);
    if ratio_infimum > max_g {
        report.verdict = Verdict::PassOnProbedSet;
    } else {
        let probe = Probe::RatioBound {
            p: g_argmax.0,
            q: g_argmax.1,
            d: ratio_argmin,
        };
        let (before, after) = probe.evaluate(spec)?;
        report.verdict = Verdict::Fail;
        report.witnesses.push(Witness { probe, before, after });
        report.violations = 1;
    }

    let sup = sup_g(alpha, SUP_TOLERANCE, (64, 64));
    let sup_estimate = sup.as_ref().ok().map(|s| s.value);
    report.ratio_comparison = Some(RatioComparison {
        ratio_infimum,
        ratio_argmin,
        max_probed_g: max_g,
        g_argmax,
        sup_estimate,
        sup_margin: sup_estimate.map(|m| ratio_infimum - m),
    });
    report.notes = match sup {
        Ok(s) if ratio_infimum >= s.value - SUP_TOLERANCE => format!(
            "lattice p <= {p_max}, q <= {q_max}, {} distances; ratio infimum {ratio_infimum} >= M_alpha {} - tol: \
             feasible beyond the probed lattice",
            d_grid.len(),
            s.value
        ),
        Ok(s) => format!(
            "lattice p <= {p_max}, q <= {q_max}, {} distances; ratio infimum {ratio_infimum} < M_alpha {}: \
             larger lattices violate the bound",
            d_grid.len(),
            s.value
        ),
        Err(e) => format!("lattice p <= {p_max}, q <= {q_max}; supremum not available: {e}"),
    };
    Ok(report)
}
