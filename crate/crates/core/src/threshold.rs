//! Critical noise parameters.
//!
//! The adaptive critical value at a level is the `p` where the logical
//! entropy crosses a target (one bit by default). The unoptimized threshold
//! is the largest `p` for which iterating the blind level map drives the
//! channel to the identity.

use serde::{Deserialize, Serialize};

use crate::adaptive::{exact_entropy, ExactOptions};
use crate::channel::{probs_to_diag, NoiseFamily, PauliProbVec};
use crate::error::{QecError, Result};
use crate::level::LevelMap;
use crate::mc::{mc_concatenate, McOptions};

pub const DEFAULT_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_TARGET: f64 = 1.0;
/// Diagonal entries above `1 - CONVERGED` count as the identity channel.
pub const CONVERGED: f64 = 1e-9;
/// Iteration cap for the blind map.
pub const MAX_ITERATIONS: usize = 100_000;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Exact,
    MonteCarlo,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::MonteCarlo => "monte-carlo",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub code: String,
    pub family: NoiseFamily,
    /// Concatenation level; 0 is the raw channel. `None` for the
    /// unoptimized threshold, which is a limit over all levels.
    pub level: Option<usize>,
    pub p_star: f64,
    pub target_entropy: f64,
    pub method: Method,
    /// One standard error for Monte Carlo points, 0 for exact ones.
    pub uncertainty: f64,
}

/// Bisection on `[lo, hi]` for the point where `classify` switches from
/// `false` to `true`, stopping when the bracket is narrower than `tol`.
fn bisect(mut lo: f64, mut hi: f64, tol: f64, mut classify: impl FnMut(f64) -> Result<bool>) -> Result<f64> {
    while hi - lo >= tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if classify(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Exact logical entropy of `family` at parameter `p` after `level` levels.
pub fn level_entropy(map: &LevelMap, family: NoiseFamily, p: f64, level: usize, opts: &ExactOptions) -> Result<f64> {
    exact_entropy(map, &family.probs(p)?, level, opts)
}

/// Exact critical parameter at one level, by bisection on `bracket`
/// (the family's default bracket if `None`). Entropy is assumed to rise
/// with `p` on the bracket.
pub fn entropy_critical_p(
    map: &LevelMap,
    family: NoiseFamily,
    level: usize,
    target: f64,
    tol: f64,
    opts: &ExactOptions,
    bracket: Option<(f64, f64)>,
) -> Result<CriticalPoint> {
    if !(tol > 0.0) {
        return Err(QecError::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let (lo, hi) = bracket.unwrap_or_else(|| family.search_bracket());
    if !(lo < hi) {
        return Err(QecError::InvalidArgument(format!("empty bracket [{lo}, {hi}]")));
    }
    let h = |p: f64| level_entropy(map, family, p, level, opts);
    let (h_lo, hi_h) = (h(lo)?, h(hi)?);
    if !(h_lo < target && hi_h >= target) {
        return Err(QecError::NoStraddle { lo, hi, h_lo, hi_h, target });
    }
    let p_star = bisect(lo, hi, tol, |p| Ok(h(p)? >= target))?;
    Ok(CriticalPoint {
        code: map.code().name().to_string(),
        family,
        level: Some(level),
        p_star,
        target_entropy: target,
        method: Method::Exact,
        uncertainty: 0.0,
    })
}

/// Fate of a channel under repeated application of the blind map.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Iteration {
    /// Reached the identity after this many steps.
    Converged(usize),
    /// Settled on a fixed point or cycle other than the identity, or hit the
    /// iteration cap.
    Diverged(usize),
}

fn near_identity(p: &PauliProbVec) -> bool {
    let d = probs_to_diag(p).0;
    d[1..].iter().all(|&v| v > 1.0 - CONVERGED)
}

/// Iterates the blind map from `p` until it reaches the identity or
/// provably will not.
pub fn iterate_blind_map(map: &LevelMap, p: &PauliProbVec) -> Result<Iteration> {
    let mut prev2: Option<PauliProbVec> = None;
    let mut cur = *p;
    for step in 0..MAX_ITERATIONS {
        if near_identity(&cur) {
            return Ok(Iteration::Converged(step));
        }
        let next = map.blind_map(&cur)?.normalized()?;
        let d = probs_to_diag(&next).0;
        let stuck = next.max_abs_diff(&cur) < 1e-15 || prev2.is_some_and(|q| next.max_abs_diff(&q) < 1e-15);
        if stuck || d[1..].iter().all(|v| v.abs() < 1e-12) {
            return Ok(Iteration::Diverged(step + 1));
        }
        prev2 = Some(cur);
        cur = next;
    }
    Ok(Iteration::Diverged(MAX_ITERATIONS))
}

/// Boundary between convergence and non-convergence of the iterated blind
/// map for `family`.
pub fn unoptimized_threshold(map: &LevelMap, family: NoiseFamily, tol: f64) -> Result<CriticalPoint> {
    if !(tol > 0.0) {
        return Err(QecError::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let (lo, hi) = family.search_bracket();
    let diverges =
        |p: f64| -> Result<bool> { Ok(matches!(iterate_blind_map(map, &family.probs(p)?)?, Iteration::Diverged(_))) };
    // Below about 1e-9 every channel already counts as the identity, so the
    // search starts well above that.
    let start = lo + 1e-6;
    match (diverges(start)?, diverges(hi)?) {
        (false, true) => {}
        (true, _) => return Err(QecError::NoTransition { lo: start, hi, behavior: "stays away from the identity" }),
        (false, false) => return Err(QecError::NoTransition { lo: start, hi, behavior: "reaches the identity" }),
    }
    let p_star = bisect(start, hi, tol, diverges)?;
    Ok(CriticalPoint {
        code: map.code().name().to_string(),
        family,
        level: None,
        p_star,
        target_entropy: f64::NAN,
        method: Method::Exact,
        uncertainty: 0.0,
    })
}

/// Settings for the stochastic root search.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McSearch {
    /// Options of the first round; later rounds multiply the sample count.
    pub mc: McOptions,
    pub rounds: usize,
    /// Sample multiplier between rounds.
    pub escalation: u64,
    /// Half-width of the first three-point stencil, relative to the guess.
    pub relative_width: f64,
}

impl McSearch {
    pub fn new(mc: McOptions) -> Self {
        McSearch { mc, rounds: 3, escalation: 4, relative_width: 5e-3 }
    }
}

/// Monte Carlo critical parameter at one level, refined from `guess`.
///
/// Each round estimates the entropy at `guess - w`, `guess`, `guess + w`
/// with the same seed, so the three estimates share their random numbers
/// and the fitted slope is much less noisy than the values. The root of the
/// fitted line becomes the next guess; the stencil narrows towards the
/// propagated uncertainty and the sample count grows.
pub fn mc_critical_p(
    map: &LevelMap,
    family: NoiseFamily,
    level: usize,
    target: f64,
    guess: f64,
    search: &McSearch,
) -> Result<CriticalPoint> {
    if search.rounds == 0 {
        return Err(QecError::InvalidArgument("stochastic search needs at least one round".into()));
    }
    let cap = family.max_param();
    let mut g = guess;
    let mut w = search.relative_width * guess;
    let mut mc = search.mc;
    let mut sigma = f64::NAN;
    for _ in 0..search.rounds {
        let pts = [(g - w).max(0.0), g, (g + w).min(cap)];
        let mut h = [0.0; 3];
        let mut err = 0.0;
        for (hv, &p) in h.iter_mut().zip(&pts) {
            let est = mc_concatenate(map, &family.probs(p)?, level, &mc)?;
            *hv = est.mean_entropy;
            err += est.std_error / 3.0;
        }
        let xm = pts.iter().sum::<f64>() / 3.0;
        let hm = h.iter().sum::<f64>() / 3.0;
        let sxx: f64 = pts.iter().map(|p| (p - xm).powi(2)).sum();
        let sxy: f64 = pts.iter().zip(&h).map(|(p, v)| (p - xm) * (v - hm)).sum();
        let slope = sxy / sxx;
        if !(slope > 0.0) {
            return Err(QecError::InvalidArgument(format!(
                "entropy does not increase across [{}, {}] at level {level}; slope {slope:e}",
                pts[0], pts[2]
            )));
        }
        let root = xm + (target - hm) / slope;
        g = root.clamp(pts[0] - 2.0 * w, pts[2] + 2.0 * w).clamp(0.0, cap);
        sigma = err / slope;
        w = (0.5 * w).max(3.0 * sigma);
        mc.samples = mc.samples.saturating_mul(search.escalation);
    }
    Ok(CriticalPoint {
        code: map.code().name().to_string(),
        family,
        level: Some(level),
        p_star: g,
        target_entropy: target,
        method: Method::MonteCarlo,
        uncertainty: sigma,
    })
}

/// Critical values for levels `0..=max_level` and the level-to-level drift
/// of the last two.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSeries {
    pub points: Vec<CriticalPoint>,
    /// `p*` of the last level minus `p*` of the one before.
    pub drift: Option<f64>,
}

impl ThresholdSeries {
    /// Last computed critical value, the running threshold estimate.
    pub fn estimate(&self) -> Option<f64> {
        self.points.last().map(|c| c.p_star)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesOptions {
    pub target: f64,
    pub tol: f64,
    pub exact: ExactOptions,
    /// Monte Carlo settings for levels beyond the exact budget; without them
    /// such levels are an error.
    pub mc: Option<McSearch>,
    /// Levels above this use Monte Carlo even if exact would fit.
    pub max_exact_level: usize,
}

impl Default for SeriesOptions {
    fn default() -> Self {
        SeriesOptions {
            target: DEFAULT_TARGET,
            tol: DEFAULT_TOLERANCE,
            exact: ExactOptions::default(),
            mc: None,
            max_exact_level: usize::MAX,
        }
    }
}

/// Bracket around the previous level's critical value, widened until it
/// straddles the target.
fn local_bracket(family: NoiseFamily, center: f64) -> [(f64, f64); 2] {
    let (lo, hi) = family.search_bracket();
    [((center * 0.98).max(lo), (center * 1.02).min(hi)), (lo, hi)]
}

/// Critical values level by level: exact while the budget allows, then
/// Monte Carlo if configured.
pub fn threshold_series(
    map: &LevelMap,
    family: NoiseFamily,
    max_level: usize,
    opts: &SeriesOptions,
) -> Result<ThresholdSeries> {
    let mut points: Vec<CriticalPoint> = Vec::new();
    let mut exact_ok = true;
    for level in 0..=max_level {
        let mut found = None;
        if exact_ok && level <= opts.max_exact_level {
            let brackets = match points.last() {
                Some(prev) => local_bracket(family, prev.p_star).to_vec(),
                None => vec![family.search_bracket()],
            };
            let mut miss = None;
            for b in brackets {
                match entropy_critical_p(map, family, level, opts.target, opts.tol, &opts.exact, Some(b)) {
                    Ok(c) => {
                        found = Some(c);
                        break;
                    }
                    Err(e @ QecError::NoStraddle { .. }) => miss = Some(e),
                    Err(QecError::BudgetExceeded { .. }) => {
                        exact_ok = false;
                        break;
                    }
                    Err(e) => return Err(e),
                }
            }
            if let (None, true, Some(e)) = (&found, exact_ok, miss) {
                return Err(e);
            }
        }
        let point = match found {
            Some(c) => c,
            None => {
                let search = opts
                    .mc
                    .as_ref()
                    .ok_or(QecError::BudgetExceeded { needed: f64::INFINITY, budget: opts.exact.budget })?;
                let guess = points.last().map_or(family.search_bracket().1 / 2.0, |c| c.p_star);
                mc_critical_p(map, family, level, opts.target, guess, search)?
            }
        };
        points.push(point);
    }
    let drift = match points.as_slice() {
        [.., a, b] => Some(b.p_star - a.p_star),
        _ => None,
    };
    Ok(ThresholdSeries { points, drift })
}
