//! Boundary sweeps, seeded scatter generation and the numerical
//! verification suites. Everything here runs in `f64`.
//!
//! Batch functions parallelize over samples with rayon; each sample draws
//! from its own stream, and results are returned in sample order, so output
//! does not depend on the thread count.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::bell::{bell_scores, bv_from_schmidt, m_value, NONZERO_BV};
use crate::error::{domain, Error, Result};
use crate::families::{gghz, sample_stream, sghz, FamilyKind, FamilySpec};
use crate::measures::{discord_score, ggm, tangle_score, work_deficit_score, Arrow};
use crate::numerics::binary_entropy;
use crate::qstate::{schmidt_lambda1, PureState};

type State = PureState<f64>;

/// Identity checks (Eq.-style residuals, Bell monogamy, tangle sign).
pub const IDENTITY_TOL: f64 = 1e-9;
/// Slack for comparisons against interpolated boundary curves and for
/// optimizer-backed theorem checks.
pub const BOUNDARY_SLACK: f64 = 1e-6;
/// Parameter grid size for boundary curves.
pub const CURVE_POINTS: usize = 2000;
const INVERSION_TOL: f64 = 1e-14;

/// Which correlation measures to evaluate besides the Bell scores.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MeasureSet {
    pub ggm: bool,
    pub tangle: bool,
    pub discord: bool,
    pub work_deficit: bool,
    pub forward: bool,
    pub backward: bool,
}

impl MeasureSet {
    pub fn all() -> Self {
        Self {
            ggm: true,
            tangle: true,
            discord: true,
            work_deficit: true,
            forward: true,
            backward: true,
        }
    }

    pub fn bell_only() -> Self {
        Self {
            ggm: false,
            tangle: false,
            discord: false,
            work_deficit: false,
            forward: true,
            backward: true,
        }
    }

    pub fn with_ggm(mut self) -> Self {
        self.ggm = true;
        self
    }

    /// Parses a comma list from `{bv, ggm, tangle, discord, wd, all}`.
    pub fn parse_list(list: &str) -> Result<Self> {
        let mut set = Self::bell_only();
        for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            match item {
                "bv" => {}
                "ggm" => set.ggm = true,
                "tangle" => set.tangle = true,
                "discord" => set.discord = true,
                "wd" => set.work_deficit = true,
                "all" => {
                    let arrows = (set.forward, set.backward);
                    set = Self::all();
                    (set.forward, set.backward) = arrows;
                }
                other => return Err(domain!("unknown measure `{other}`")),
            }
        }
        Ok(set)
    }

    fn arrows(&self) -> impl Iterator<Item = Arrow> + '_ {
        [
            (self.forward, Arrow::Forward),
            (self.backward, Arrow::Backward),
        ]
        .into_iter()
        .filter_map(|(on, a)| on.then_some(a))
    }
}

/// One evaluated state. Unrequested measures are `None`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureRecord {
    pub sample_id: u64,
    /// `None` for states loaded from a file.
    pub family: Option<FamilySpec>,
    pub nodal: usize,
    pub lambda1: f64,
    pub ggm: Option<f64>,
    pub bv_one_vs_rest: f64,
    /// BV of `(nodal, i)` for every `i ≠ nodal`, ascending.
    pub bv_pairs: Vec<f64>,
    pub delta_bv: f64,
    pub tangle: Option<f64>,
    pub discord_fwd: Option<f64>,
    pub discord_bwd: Option<f64>,
    pub wd_fwd: Option<f64>,
    pub wd_bwd: Option<f64>,
    /// Names of optimizer-backed fields whose optimization hit the iteration cap.
    pub flags: Vec<String>,
}

impl MeasureRecord {
    pub fn max_pair_bv(&self) -> f64 {
        self.bv_pairs.iter().copied().fold(0.0, f64::max)
    }

    pub fn is_non_distributive(&self, threshold: f64) -> bool {
        self.bv_pairs.iter().all(|&b| b <= threshold)
    }

    pub fn axis_value(&self, axis: Axis) -> Option<f64> {
        match axis {
            Axis::Ggm => self.ggm,
            Axis::Tangle => self.tangle,
            Axis::DiscordFwd => self.discord_fwd,
            Axis::DiscordBwd => self.discord_bwd,
            Axis::WdFwd => self.wd_fwd,
            Axis::WdBwd => self.wd_bwd,
        }
    }
}

/// Evaluates the Bell scores and the requested measures of one state.
pub fn evaluate(
    psi: &State,
    family: Option<&FamilySpec>,
    sample_id: u64,
    nodal: usize,
    measures: &MeasureSet,
) -> Result<MeasureRecord> {
    let bell = bell_scores(psi, nodal)?;
    let mut rec = MeasureRecord {
        sample_id,
        family: family.cloned(),
        nodal,
        lambda1: schmidt_lambda1(psi, nodal)?,
        ggm: None,
        bv_one_vs_rest: bell.bv_one_vs_rest,
        bv_pairs: bell.bv_pairs.iter().map(|&(_, v)| v).collect(),
        delta_bv: bell.delta_bv,
        tangle: None,
        discord_fwd: None,
        discord_bwd: None,
        wd_fwd: None,
        wd_bwd: None,
        flags: Vec::new(),
    };
    if measures.ggm {
        rec.ggm = Some(ggm(psi)?);
    }
    if measures.tangle {
        rec.tangle = Some(tangle_score(psi, nodal)?.score);
    }
    for arrow in measures.arrows() {
        let suffix = match arrow {
            Arrow::Forward => "fwd",
            Arrow::Backward => "bwd",
        };
        if measures.discord {
            let s = discord_score(psi, nodal, arrow)?;
            if !s.converged {
                rec.flags.push(format!("discord_{suffix}"));
            }
            match arrow {
                Arrow::Forward => rec.discord_fwd = Some(s.score),
                Arrow::Backward => rec.discord_bwd = Some(s.score),
            }
        }
        if measures.work_deficit {
            let s = work_deficit_score(psi, nodal, arrow)?;
            if !s.converged {
                rec.flags.push(format!("wd_{suffix}"));
            }
            match arrow {
                Arrow::Forward => rec.wd_fwd = Some(s.score),
                Arrow::Backward => rec.wd_bwd = Some(s.score),
            }
        }
    }
    Ok(rec)
}

/// Options for [`scatter`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatterOptions {
    pub nodal: usize,
    pub measures: MeasureSet,
    /// Redraw (from the same stream) until the sample's tangle score is at least this.
    pub reject_tangle_below: Option<f64>,
}

/// Draws sample `index` of `spec`, honoring tangle rejection.
pub fn draw_sample(
    spec: &FamilySpec,
    index: u64,
    reject_tangle_below: Option<f64>,
) -> Result<State> {
    let seed = spec
        .seed
        .ok_or_else(|| domain!("scatter needs a seeded sampler"))?;
    if !spec.kind.is_sampler() {
        return Err(domain!("`{}` is not a sampler class", spec.kind));
    }
    let mut rng = sample_stream(seed, index);
    const MAX_REDRAWS: usize = 10_000;
    for _ in 0..MAX_REDRAWS {
        let psi = spec.kind.sample(spec.n_qubits, &mut rng)?;
        match reject_tangle_below {
            Some(eps) if tangle_score(&psi, 0)?.score < eps => continue,
            _ => return Ok(psi),
        }
    }
    Err(domain!(
        "no sample reached tangle {reject_tangle_below:?} after {MAX_REDRAWS} draws"
    ))
}

/// Seeded batch of measure records, ordered by sample id.
pub fn scatter(
    spec: &FamilySpec,
    samples: u64,
    opts: &ScatterOptions,
) -> Result<Vec<MeasureRecord>> {
    if samples == 0 {
        return Err(domain!("scatter needs at least one sample"));
    }
    (0..samples)
        .into_par_iter()
        .map(|i| {
            let psi = draw_sample(spec, i, opts.reject_tangle_below)?;
            evaluate(&psi, Some(spec), i, opts.nodal, &opts.measures)
        })
        .collect()
}

/// Abscissa of a boundary plot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    Ggm,
    Tangle,
    DiscordFwd,
    DiscordBwd,
    WdFwd,
    WdBwd,
}

impl Axis {
    pub const ALL: [Axis; 6] = [
        Axis::Ggm,
        Axis::Tangle,
        Axis::DiscordFwd,
        Axis::DiscordBwd,
        Axis::WdFwd,
        Axis::WdBwd,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Axis::Ggm => "ggm",
            Axis::Tangle => "tangle",
            Axis::DiscordFwd => "discord_fwd",
            Axis::DiscordBwd => "discord_bwd",
            Axis::WdFwd => "wd_fwd",
            Axis::WdBwd => "wd_bwd",
        }
    }

    /// Measures needed to populate this axis.
    pub fn measures(self) -> MeasureSet {
        let mut m = MeasureSet::bell_only();
        m.forward = matches!(self, Axis::DiscordFwd | Axis::WdFwd);
        m.backward = matches!(self, Axis::DiscordBwd | Axis::WdBwd);
        match self {
            Axis::Ggm => m.ggm = true,
            Axis::Tangle => m.tangle = true,
            Axis::DiscordFwd | Axis::DiscordBwd => m.discord = true,
            Axis::WdFwd | Axis::WdBwd => m.work_deficit = true,
        }
        m
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Axis::ALL
            .into_iter()
            .find(|a| {
                a.name() == s
                    || (s == "discord" && *a == Axis::DiscordFwd)
                    || (s == "wd" && *a == Axis::WdFwd)
            })
            .ok_or_else(|| domain!("unknown axis `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    /// Family parameter (λ for gGHZ, β for sGHZ).
    pub param: f64,
    pub x: f64,
    pub y: f64,
}

/// `(measure, δ_BV)` curve of a one-parameter family, sorted by `x` with
/// duplicate abscissae removed; evaluated by piecewise-linear interpolation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryCurve {
    pub family: FamilyKind,
    pub n_qubits: usize,
    pub axis: Axis,
    pub points: Vec<CurvePoint>,
}

impl BoundaryCurve {
    pub fn x_range(&self) -> (f64, f64) {
        (self.points[0].x, self.points[self.points.len() - 1].x)
    }

    /// Interpolated `δ_BV` at `x`, or `None` outside the curve's range.
    pub fn interpolate(&self, x: f64) -> Option<f64> {
        let (lo, hi) = self.x_range();
        if !(x >= lo && x <= hi) {
            return None;
        }
        let k = self.points.partition_point(|p| p.x < x);
        if k == 0 {
            return Some(self.points[0].y);
        }
        let (a, b) = (self.points[k - 1], self.points[k]);
        let t = (x - a.x) / (b.x - a.x);
        Some(a.y + t * (b.y - a.y))
    }

    /// Same curve shifted up by `dy`.
    pub fn raised(&self, dy: f64) -> Self {
        let mut c = self.clone();
        for p in &mut c.points {
            p.y += dy;
        }
        c
    }
}

/// Evenly spaced parameter grid over a family's domain (λ ∈ [1/2, 1] or β ∈ [0, 1]).
pub fn parameter_grid(family: FamilyKind, points: usize) -> Result<Vec<f64>> {
    let (lo, hi) = match family {
        FamilyKind::Gghz => (0.5, 1.0),
        FamilyKind::Sghz => (0.0, 1.0),
        other => return Err(domain!("no parameter grid for `{other}`")),
    };
    if points < 2 {
        return Err(domain!("a grid needs at least two points"));
    }
    Ok((0..points)
        .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
        .collect())
}

pub fn family_state(family: FamilyKind, n: usize, param: f64) -> Result<State> {
    match family {
        FamilyKind::Gghz => gghz(n, param, 0.0),
        FamilyKind::Sghz => sghz(n, param, 0.0),
        other => Err(domain!("`{other}` is not a one-parameter family")),
    }
}

fn family_spec(family: FamilyKind, n: usize, param: f64) -> FamilySpec {
    match family {
        FamilyKind::Sghz => FamilySpec::sghz(n, param, 0.0),
        _ => FamilySpec::gghz(n, param, 0.0),
    }
}

/// Minimum number of grid points accepted by [`sweep_boundary`].
pub const MIN_SWEEP_POINTS: usize = 100;
const DEDUP_TOL: f64 = 1e-13;

/// Traces `(axis measure, δ_BV)` over a family parameter grid, phases zero.
pub fn sweep_boundary(
    family: FamilyKind,
    n: usize,
    axis: Axis,
    grid: &[f64],
) -> Result<BoundaryCurve> {
    if grid.len() < MIN_SWEEP_POINTS {
        return Err(domain!(
            "a boundary sweep needs at least {MIN_SWEEP_POINTS} grid points"
        ));
    }
    let measures = axis.measures();
    let mut points = grid
        .par_iter()
        .map(|&param| {
            let psi = family_state(family, n, param)?;
            let rec = evaluate(&psi, Some(&family_spec(family, n, param)), 0, 0, &measures)?;
            let x = rec.axis_value(axis).expect("axis measure requested");
            Ok(CurvePoint {
                param,
                x,
                y: rec.delta_bv,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    // Monotone in grid order (either direction), up to round-off.
    let rising = points.windows(2).all(|w| w[1].x >= w[0].x - DEDUP_TOL);
    let falling = points.windows(2).all(|w| w[1].x <= w[0].x + DEDUP_TOL);
    if !rising && !falling {
        return Err(Error::Numerical(format!(
            "{family} {axis} is not monotone in the family parameter"
        )));
    }
    points.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.param.total_cmp(&b.param)));
    points.dedup_by(|b, a| (b.x - a.x).abs() <= DEDUP_TOL);
    if points.len() < 2 {
        return Err(domain!("curve collapsed to a single point"));
    }
    Ok(BoundaryCurve {
        family,
        n_qubits: n,
        axis,
        points,
    })
}

/// Aggregated outcome of a verification suite.
///
/// Each check yields a signed margin (negative means the relation is
/// broken); a check is a violation when its margin is below `-tolerance`.
/// `samples` counts states with at least one performed check, `violations`
/// counts states with a violated check, and `skipped` counts checks that
/// could not be performed (value outside the reference family's range).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub suite: String,
    pub samples: u64,
    pub skipped: u64,
    pub violations: u64,
    pub worst_margin: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Default)]
struct Tally {
    samples: u64,
    skipped: u64,
    violations: u64,
    worst: Option<f64>,
}

impl Tally {
    /// Records one state with its checked margins and skipped-check count.
    fn add(&mut self, margins: &[f64], skipped: u64, tolerance: f64) {
        self.skipped += skipped;
        if margins.is_empty() {
            return;
        }
        self.samples += 1;
        // `+ 0.0` folds a negated zero margin back to 0.
        let worst = margins.iter().copied().fold(f64::INFINITY, f64::min) + 0.0;
        if worst < -tolerance {
            self.violations += 1;
        }
        self.worst = Some(self.worst.map_or(worst, |w| w.min(worst)));
    }

    fn report(self, suite: impl Into<String>, tolerance: f64) -> VerificationReport {
        VerificationReport {
            suite: suite.into(),
            samples: self.samples,
            skipped: self.skipped,
            violations: self.violations,
            worst_margin: self.worst,
            tolerance,
            pass: self.violations == 0,
        }
    }
}

/// Margins and skip count for one state.
type Check = (Vec<f64>, u64);

fn run_checks(
    suite: &str,
    tolerance: f64,
    indices: impl IntoParallelIterator<Item = u64>,
    check: impl Fn(u64) -> Result<Check> + Sync + Send,
) -> Result<VerificationReport> {
    let results: Vec<Check> = indices.into_par_iter().map(check).collect::<Result<_>>()?;
    let mut tally = Tally::default();
    for (margins, skipped) in results {
        tally.add(&margins, skipped, tolerance);
    }
    Ok(tally.report(suite, tolerance))
}

/// Left and right sides of `M(ρ₁₂) − M(ρ₂₃) = 8{λ₁(1−λ₁) − λ₃(1−λ₃)}`.
pub fn eq15_sides(psi: &State) -> Result<(f64, f64)> {
    if psi.n_qubits() != 3 {
        return Err(domain!("the M-difference identity is for three qubits"));
    }
    let lhs = m_value(&psi.pair_state(0, 1)?)? - m_value(&psi.pair_state(1, 2)?)?;
    let l1 = schmidt_lambda1(psi, 0)?;
    let l3 = schmidt_lambda1(psi, 2)?;
    let rhs = 8.0 * (l1 * (1.0 - l1) - l3 * (1.0 - l3));
    Ok((lhs, rhs))
}

pub fn verify_eq15(samples: u64, seed: u64, tolerance: f64) -> Result<VerificationReport> {
    run_checks("eq15", tolerance, 0..samples, |i| {
        let psi: State = crate::families::haar_random(3, &mut sample_stream(seed, i))?;
        let (lhs, rhs) = eq15_sides(&psi)?;
        Ok((vec![-(lhs - rhs).abs()], 0))
    })
}

/// At most one nodal pair violates CHSH, for every choice of nodal qubit.
pub fn verify_bell_monogamy(
    n: usize,
    samples: u64,
    seed: u64,
    threshold: f64,
) -> Result<VerificationReport> {
    run_checks("bell_monogamy", threshold, 0..samples, |i| {
        let psi: State = crate::families::haar_random(n, &mut sample_stream(seed, i))?;
        let mut margins = Vec::with_capacity(n);
        for nodal in 0..n {
            let mut pairs: Vec<f64> = bell_scores(&psi, nodal)?
                .bv_pairs
                .iter()
                .map(|&(_, v)| v)
                .collect();
            pairs.sort_by(|a, b| b.total_cmp(a));
            margins.push(-pairs.get(1).copied().unwrap_or(0.0));
        }
        Ok((margins, 0))
    })
}

/// Three-tangle of W-class samples vanishes.
pub fn verify_w_tangle(samples: u64, seed: u64, tolerance: f64) -> Result<VerificationReport> {
    run_checks("w_tangle", tolerance, 0..samples, |i| {
        let psi: State = crate::families::w_class_random(&mut sample_stream(seed, i))?;
        Ok((vec![-tangle_score(&psi, 0)?.score.abs()], 0))
    })
}

/// Three-tangle of GHZ-class samples is nonnegative.
pub fn verify_ckw(samples: u64, seed: u64, tolerance: f64) -> Result<VerificationReport> {
    run_checks("ckw", tolerance, 0..samples, |i| {
        let psi: State = crate::families::ghz_class_random(&mut sample_stream(seed, i))?;
        Ok((vec![tangle_score(&psi, 0)?.score], 0))
    })
}

/// Records whose `(axis, δ_BV)` point lies below `curve − tolerance` are violations;
/// records outside the curve's `x` range are skipped.
pub fn check_lower_boundary(
    records: &[MeasureRecord],
    curve: &BoundaryCurve,
    tolerance: f64,
) -> Result<VerificationReport> {
    let mut tally = Tally::default();
    for rec in records {
        let x = rec
            .axis_value(curve.axis)
            .ok_or_else(|| domain!("record {} lacks the {} measure", rec.sample_id, curve.axis))?;
        match curve.interpolate(x) {
            Some(bound) => tally.add(&[rec.delta_bv - bound], 0, tolerance),
            None => tally.add(&[], 1, tolerance),
        }
    }
    if tally.samples == 0 {
        return Err(domain!("no record falls inside the curve's range"));
    }
    let suite = format!(
        "boundary_{}_{}_n{}",
        curve.family, curve.axis, curve.n_qubits
    );
    Ok(tally.report(suite, tolerance))
}

/// λ of the gGHZ state with GGM `e`.
pub fn gghz_lambda_from_ggm(e: f64) -> Option<f64> {
    (-INVERSION_TOL..=0.5 + INVERSION_TOL)
        .contains(&e)
        .then(|| (1.0 - e).clamp(0.5, 1.0))
}

/// λ of the gGHZ state with tangle score `tau = 4λ(1−λ)`.
pub fn gghz_lambda_from_tangle(tau: f64) -> Option<f64> {
    (-INVERSION_TOL..=1.0 + INVERSION_TOL)
        .contains(&tau)
        .then(|| 0.5 * (1.0 + (1.0 - tau.clamp(0.0, 1.0)).sqrt()))
}

/// λ ∈ [1/2, 1] with `H(λ) = h`, by bisection.
pub fn gghz_lambda_from_entropy(h: f64) -> Option<f64> {
    if !(-INVERSION_TOL..=1.0 + INVERSION_TOL).contains(&h) {
        return None;
    }
    let h = h.clamp(0.0, 1.0);
    let (mut lo, mut hi) = (0.5f64, 1.0f64);
    // H is decreasing on [1/2, 1]
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if binary_entropy(mid).ok()? > h {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < INVERSION_TOL {
            break;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Which theorem-style relation to check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Theorem {
    /// Symmetric states sit above gGHZ at matched GGM.
    SymmetricGgm,
    /// If the nodal qubit has the largest marginal eigenvalue, its pairs do not violate CHSH.
    NodalMaximal,
    /// Non-distributive states sit above gGHZ at matched tangle score.
    NonDistributiveTangle,
    /// Non-distributive states sit above gGHZ at matched discord and work-deficit scores.
    NonDistributiveDiscord,
}

impl Theorem {
    pub fn from_number(k: u8) -> Result<Self> {
        Ok(match k {
            1 => Theorem::SymmetricGgm,
            2 => Theorem::NodalMaximal,
            3 => Theorem::NonDistributiveTangle,
            4 => Theorem::NonDistributiveDiscord,
            _ => return Err(domain!("theorem must be 1-4, got {k}")),
        })
    }

    pub fn number(self) -> u8 {
        match self {
            Theorem::SymmetricGgm => 1,
            Theorem::NodalMaximal => 2,
            Theorem::NonDistributiveTangle => 3,
            Theorem::NonDistributiveDiscord => 4,
        }
    }

    pub fn default_tolerance(self) -> f64 {
        match self {
            Theorem::SymmetricGgm | Theorem::NodalMaximal => IDENTITY_TOL,
            Theorem::NonDistributiveTangle | Theorem::NonDistributiveDiscord => BOUNDARY_SLACK,
        }
    }
}

/// Options for [`verify_theorem`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoremOptions {
    pub tolerance: f64,
    /// Pair-BV threshold below which a pair counts as non-violating.
    pub nonzero_bv: f64,
    /// Cap on candidate draws per requested sample for filtered suites.
    pub max_draw_factor: u64,
}

impl TheoremOptions {
    pub fn for_theorem(t: Theorem) -> Self {
        Self {
            tolerance: t.default_tolerance(),
            nonzero_bv: NONZERO_BV,
            max_draw_factor: 100,
        }
    }
}

/// δ_BV of the n-qubit gGHZ state at eigenvalue `lambda`, through the pipeline.
pub fn gghz_delta_bv(n: usize, lambda: f64) -> Result<f64> {
    Ok(bell_scores(&gghz(n, lambda, 0.0)?, 0)?.delta_bv)
}

fn matched_margin(n: usize, delta_bv: f64, lambda: Option<f64>) -> Result<Option<f64>> {
    match lambda {
        Some(l) => Ok(Some(delta_bv - gghz_delta_bv(n, l)?)),
        None => Ok(None),
    }
}

/// Indices of the first `samples` non-distributive Haar states (nodal qubit 0).
fn non_distributive_indices(
    n: usize,
    samples: u64,
    seed: u64,
    opts: &TheoremOptions,
) -> Result<Vec<u64>> {
    let cap = samples.saturating_mul(opts.max_draw_factor.max(1));
    let mut found = Vec::with_capacity(samples as usize);
    let mut next = 0u64;
    const CHUNK: u64 = 1024;
    while (found.len() as u64) < samples && next < cap {
        let end = (next + CHUNK).min(cap);
        let keep: Vec<Option<u64>> = (next..end)
            .into_par_iter()
            .map(|i| {
                let psi: State = crate::families::haar_random(n, &mut sample_stream(seed, i))?;
                let pairs = bell_scores(&psi, 0)?;
                Ok(pairs
                    .bv_pairs
                    .iter()
                    .all(|&(_, v)| v <= opts.nonzero_bv)
                    .then_some(i))
            })
            .collect::<Result<_>>()?;
        found.extend(keep.into_iter().flatten());
        next = end;
    }
    if (found.len() as u64) < samples {
        return Err(domain!(
            "only {} non-distributive samples in {cap} draws, {samples} requested",
            found.len()
        ));
    }
    found.truncate(samples as usize);
    Ok(found)
}

/// Runs one theorem suite on `samples` seeded states of `n` qubits.
///
/// Theorem 2 relabels each sample so the nodal qubit is the one with the
/// largest marginal eigenvalue, so every draw is tested. Theorems 3 and 4
/// draw Haar states until `samples` non-distributive ones are found.
pub fn verify_theorem(
    theorem: Theorem,
    samples: u64,
    n: usize,
    seed: u64,
    opts: &TheoremOptions,
) -> Result<VerificationReport> {
    if n < 3 {
        return Err(domain!("theorem suites need n >= 3"));
    }
    let tol = opts.tolerance;
    let suite = format!("theorem{}_n{n}", theorem.number());
    match theorem {
        Theorem::SymmetricGgm => run_checks(&suite, tol, 0..samples, |i| {
            let psi: State = crate::families::symmetric_random(n, &mut sample_stream(seed, i))?;
            let e = ggm(&psi)?;
            let delta = bell_scores(&psi, 0)?.delta_bv;
            Ok(match matched_margin(n, delta, gghz_lambda_from_ggm(e))? {
                Some(m) => (vec![m], 0),
                None => (vec![], 1),
            })
        }),
        Theorem::NodalMaximal => {
            if n != 3 {
                return Err(domain!("theorem 2 is a three-qubit statement"));
            }
            run_checks(&suite, opts.nonzero_bv, 0..samples, |i| {
                let psi: State = crate::families::haar_random(3, &mut sample_stream(seed, i))?;
                let lambdas = (0..3)
                    .map(|q| schmidt_lambda1(&psi, q))
                    .collect::<Result<Vec<_>>>()?;
                let nodal = (0..3).fold(
                    0,
                    |best, q| if lambdas[q] > lambdas[best] { q } else { best },
                );
                let worst = bell_scores(&psi, nodal)?
                    .bv_pairs
                    .iter()
                    .fold(0.0f64, |a, &(_, v)| a.max(v));
                Ok((vec![-worst], 0))
            })
        }
        Theorem::NonDistributiveTangle | Theorem::NonDistributiveDiscord => {
            let indices = non_distributive_indices(n, samples, seed, opts)?;
            run_checks(&suite, tol, indices, |i| {
                let psi: State = crate::families::haar_random(n, &mut sample_stream(seed, i))?;
                let delta = bell_scores(&psi, 0)?.delta_bv;
                let scores = if theorem == Theorem::NonDistributiveTangle {
                    vec![tangle_score(&psi, 0)?.score]
                } else {
                    let mut v = Vec::with_capacity(4);
                    for arrow in [Arrow::Forward, Arrow::Backward] {
                        v.push(discord_score(&psi, 0, arrow)?.score);
                        v.push(work_deficit_score(&psi, 0, arrow)?.score);
                    }
                    v
                };
                let mut margins = Vec::with_capacity(scores.len());
                let mut skipped = 0;
                for s in scores {
                    let lambda = if theorem == Theorem::NonDistributiveTangle {
                        gghz_lambda_from_tangle(s)
                    } else {
                        gghz_lambda_from_entropy(s)
                    };
                    match matched_margin(n, delta, lambda)? {
                        Some(m) => margins.push(m),
                        None => skipped += 1,
                    }
                }
                Ok((margins, skipped))
            })
        }
    }
}

/// δ_BV of a gGHZ state in closed form, for cross-checks.
pub fn gghz_delta_bv_closed_form(lambda: f64) -> f64 {
    bv_from_schmidt(lambda)
}

/// Seeded sampler scatter against the sGHZ boundary curve on `axis`.
pub fn verify_boundary(
    class: FamilyKind,
    n: usize,
    axis: Axis,
    samples: u64,
    seed: u64,
    tolerance: f64,
) -> Result<VerificationReport> {
    let curve = sweep_boundary(
        FamilyKind::Sghz,
        n,
        axis,
        &parameter_grid(FamilyKind::Sghz, CURVE_POINTS)?,
    )?;
    let spec = FamilySpec::sampler(class, n, seed);
    let opts = ScatterOptions {
        nodal: 0,
        measures: axis.measures(),
        reject_tangle_below: None,
    };
    let records = scatter(&spec, samples, &opts)?;
    let mut report = check_lower_boundary(&records, &curve, tolerance)?;
    report.suite = format!("boundary_{}_{}_n{n}", class, axis);
    Ok(report)
}
