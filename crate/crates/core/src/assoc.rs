//! The associated function h_M(t) = inf_{j >= 0} t^j M_j and its inverse
//! problems.
//!
//! For 0 < t < 1 the infimum is attained: the summand f(j) = j ln t + ln M_j
//! is convex in j (log-convexity of M), so the least minimizer is the first
//! index where the ratio r_j = ln(M_{j+1}/M_j) reaches -ln t. Evaluation
//! locates that index by exponential plus binary search on the ratio table
//! and then polishes a window around it with the same float expression the
//! brute-force definition uses. Non-strict minima are reported at their
//! least index: any value within [`TIE_REL_TOL`] (relative) of the float
//! minimum counts as attaining it.

use alloc::vec::Vec;

use crate::math;
use crate::weights::{WeightKind, WeightSequence};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AssocError {
    /// Recovery grid's argmax landed on an endpoint; the grid does not
    /// bracket the supremum.
    GridTooNarrow { argmax_index: usize },
    /// No ladder value produced a valid comparison envelope.
    BracketNotFound,
    /// Operation requires a Gevrey-kind sequence.
    NotGevrey,
}

impl core::fmt::Display for AssocError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            AssocError::GridTooNarrow { argmax_index } => {
                write!(f, "grid does not bracket the optimum (argmax at grid index {argmax_index})")
            }
            AssocError::BracketNotFound => write!(f, "no bracketing constants found in the ladder"),
            AssocError::NotGevrey => write!(f, "operation requires a Gevrey-type weight sequence"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for AssocError {}

/// Value of the associated function at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HmValue {
    /// ln h_M(t); negative infinity at t = 0.
    pub log_h: f64,
    /// Least index attaining the infimum (0 at t = 0 by convention).
    pub minimizer: u64,
}

/// Width of the float-polish window around the ratio crossing.
const POLISH_HALF_WIDTH: u64 = 64;

/// Relative band for equal-minimum detection. Analytic ties (e.g. factorials
/// at t = 1/4, where j = 3 and j = 4 give the same value) land within a few
/// ulps of each other in floats, on either side; indices this close to the
/// minimum are treated as tied and the least one is reported.
pub const TIE_REL_TOL: f64 = 1e-12;

/// Evaluates h_M(t) for t >= 0.
///
/// For explicit tables the minimizer search is clamped to the stored range;
/// the result is then the minimum over the available indices, which equals
/// h_M(t) whenever the true minimizer lies inside the table.
///
/// The minimizing index must stay below the weight-table ceiling (2^33);
/// for Gevrey(alpha, 0) that means roughly t > 2^(-33 alpha). Callers
/// working near 0 should floor t accordingly.
pub fn hm_eval(m: &mut WeightSequence, t: f64) -> HmValue {
    assert!(t.is_finite() && t >= 0.0, "t must be finite and nonnegative");
    if t == 0.0 {
        return HmValue { log_h: f64::NEG_INFINITY, minimizer: 0 };
    }
    let ln_t = math::ln(t);
    let target = -ln_t;

    // least index whose ratio reaches the target; f is nonincreasing before
    // it and nondecreasing after
    let guess = match m.ratio_len() {
        Some(rl) => {
            // explicit: ratios exist for j < rl, minimizer range 0..=rl
            if m.ratio(0) >= target {
                0
            } else if m.ratio(rl - 1) < target {
                rl
            } else {
                let mut a = 0u64;
                let mut b = rl - 1;
                while a < b {
                    let mid = a + (b - a) / 2;
                    if m.ratio(mid) >= target {
                        b = mid;
                    } else {
                        a = mid + 1;
                    }
                }
                a
            }
        }
        None => {
            if m.ratio(0) >= target {
                0
            } else {
                let mut span = 1u64;
                while m.ratio(span) < target {
                    span *= 2;
                }
                // least j in (span/2, span] with ratio >= target
                let mut a = span / 2 + 1;
                let mut b = span;
                while a < b {
                    let mid = a + (b - a) / 2;
                    if m.ratio(mid) >= target {
                        b = mid;
                    } else {
                        a = mid + 1;
                    }
                }
                a
            }
        }
    };

    // Polish: scan the window around the crossing with the plain expression
    // j * ln t + ln M_j and keep the least index of the float minimum. This
    // pins the reported minimizer to the brute-force answer even when
    // rounding shifts the argmin by a few indices.
    let j_lo = guess.saturating_sub(POLISH_HALF_WIDTH);
    let j_hi = match m.len() {
        Some(len) => (guess + POLISH_HALF_WIDTH).min(len - 1),
        None => guess + POLISH_HALF_WIDTH,
    };
    let mut buf = alloc::vec![0.0f64; (j_hi - j_lo + 1) as usize];
    m.log_m_block(j_lo, &mut buf);
    let mut best = f64::INFINITY;
    for (idx, &lm) in buf.iter().enumerate() {
        let j = j_lo + idx as u64;
        let f = j as f64 * ln_t + lm;
        if f < best {
            best = f;
        }
    }
    // least index within the tie band of the minimum; by convexity the tied
    // set is contiguous, so walk left until the band is exited (it may extend
    // past the polish window when |log h| is large)
    let tie = TIE_REL_TOL * math::fabs(best).max(1.0);
    let mut best_j = j_lo;
    for (idx, &lm) in buf.iter().enumerate() {
        let j = j_lo + idx as u64;
        let f = j as f64 * ln_t + lm;
        if f <= best + tie {
            best_j = j;
            break;
        }
    }
    if best_j == j_lo && j_lo > 0 {
        let mut hi = j_lo; // exclusive upper end of the next chunk
        'walk: while hi > 0 {
            let lo = hi.saturating_sub(POLISH_HALF_WIDTH);
            let mut chunk = alloc::vec![0.0f64; (hi - lo) as usize];
            m.log_m_block(lo, &mut chunk);
            for (idx, &lm) in chunk.iter().enumerate().rev() {
                let j = lo + idx as u64;
                let f = j as f64 * ln_t + lm;
                if f <= best + tie {
                    best_j = j;
                } else {
                    break 'walk;
                }
            }
            hi = lo;
        }
    }
    // the window always contains the analytic minimizer, and j = 0 gives 0,
    // so the minimum is never positive
    debug_assert!(best <= 0.0);
    HmValue { log_h: best, minimizer: best_j }
}

/// h_M(t) on the linear scale.
pub fn hm_value(m: &mut WeightSequence, t: f64) -> f64 {
    math::exp(hm_eval(m, t).log_h)
}

/// Recovers M_j = sup_{t > 0} t^{-j} h_M(t) over the given grid
/// (ascending, at least 3 points). Fails if the sup sits on a grid endpoint.
///
/// Returns the value on the linear scale; j = 0 returns exactly 1.
pub fn recover_mj(m: &mut WeightSequence, j: u64, t_grid: &[f64]) -> Result<f64, AssocError> {
    assert!(t_grid.len() >= 3, "recovery grid needs at least 3 points");
    assert!(t_grid.windows(2).all(|w| w[0] < w[1]), "recovery grid must be strictly ascending");
    assert!(t_grid[0] > 0.0, "recovery grid must be positive");
    if j == 0 {
        return Ok(1.0);
    }
    let mut best = f64::NEG_INFINITY;
    let mut best_idx = 0usize;
    for (i, &t) in t_grid.iter().enumerate() {
        let v = -(j as f64) * math::ln(t) + hm_eval(m, t).log_h;
        if v > best {
            best = v;
            best_idx = i;
        }
    }
    if best_idx == 0 || best_idx == t_grid.len() - 1 {
        return Err(AssocError::GridTooNarrow { argmax_index: best_idx });
    }
    Ok(math::exp(best))
}

/// Recovery with automatic grid placement and refinement history.
///
/// The optimum of t^{-j} h_M(t) sits where the minimizer of h_M crosses j,
/// i.e. for ln t in [-r_j, -r_{j-1}]; the grid covers that interval with
/// padding. Each refinement doubles the point count. Returns the final
/// value and the per-level history.
pub fn recover_mj_refined(
    m: &mut WeightSequence,
    j: u64,
    refinements: u32,
    points: usize,
) -> Result<(f64, Vec<f64>), AssocError> {
    if j == 0 {
        return Ok((1.0, alloc::vec![1.0; refinements as usize + 1]));
    }
    let r_hi = m.ratio(j);
    let r_lo = if j >= 1 { m.ratio(j - 1) } else { 0.0 };
    let lo = -r_hi - 2.0;
    let hi = (-r_lo + 2.0).min(-1e-3);
    let mut history = Vec::new();
    let mut n = points.max(8);
    let mut last = f64::NAN;
    for _ in 0..=refinements {
        let grid: Vec<f64> = (0..n)
            .map(|i| math::exp(lo + (hi - lo) * i as f64 / (n - 1) as f64))
            .collect();
        last = recover_mj(m, j, &grid)?;
        history.push(last);
        n = 2 * n;
    }
    Ok((last, history))
}

/// Witness that ln h_M(t) <= 2 ln h_M(rho t) held across a grid.
#[derive(Clone, Debug)]
pub struct RhoWitness {
    pub rho: f64,
    /// max over the grid of ln h_M(t) - 2 ln h_M(rho t)
    pub max_defect: f64,
    pub grid_len: usize,
}

#[derive(Clone, Debug)]
pub enum RhoSearch {
    /// Least ladder value that worked.
    Found(RhoWitness),
    /// Per-ladder-value defect table (rho, max defect).
    NotFound { defects: Vec<(f64, f64)> },
}

/// Searches the ladder (ascending, each > 1) for the least rho with
/// ln h_M(t) <= 2 ln h_M(rho t) + tol across the grid.
pub fn find_rho(m: &mut WeightSequence, t_grid: &[f64], rho_ladder: &[f64], tol: f64) -> RhoSearch {
    assert!(!t_grid.is_empty() && t_grid.iter().all(|&t| t > 0.0));
    assert!(!rho_ladder.is_empty() && rho_ladder.iter().all(|&r| r > 1.0), "rho ladder must be > 1");
    assert!(rho_ladder.windows(2).all(|w| w[0] < w[1]));
    let mut defects = Vec::with_capacity(rho_ladder.len());
    for &rho in rho_ladder {
        let mut max_defect = f64::NEG_INFINITY;
        for &t in t_grid {
            let lh = hm_eval(m, t).log_h;
            let lh2 = hm_eval(m, rho * t).log_h;
            let d = lh - 2.0 * lh2;
            if d > max_defect {
                max_defect = d;
            }
        }
        if max_defect <= tol {
            return RhoSearch::Found(RhoWitness { rho, max_defect, grid_len: t_grid.len() });
        }
        defects.push((rho, max_defect));
    }
    RhoSearch::NotFound { defects }
}

/// Two-sided comparison of h_M against the explicit envelope
/// eta(t) = exp(-(t |ln t|^beta)^(-1/alpha)) on a grid.
#[derive(Clone, Debug)]
pub struct EtaBracket {
    /// Largest ladder value with eta(a t) <= h_M(t) on the grid.
    pub a: f64,
    /// Smallest ladder value with h_M(t) <= eta(b t) on the grid.
    pub b: f64,
    pub grid_len: usize,
}

fn ln_eta(alpha: f64, beta: f64, s: f64) -> f64 {
    if s <= 0.0 {
        return f64::NEG_INFINITY;
    }
    let w = s * math::powf(math::fabs(math::ln(s)), beta);
    -math::powf(w, -1.0 / alpha)
}

/// Brackets h_M between scaled copies of the explicit envelope. The sequence
/// must be Gevrey-kind (alpha, beta are read from it). The ladder is tried
/// descending for the lower constant and ascending for the upper one, so the
/// reported bracket is the tightest available in the ladder.
pub fn eta_bracket(
    m: &mut WeightSequence,
    t_grid: &[f64],
    ladder: &[f64],
    tol: f64,
) -> Result<EtaBracket, AssocError> {
    let (alpha, beta) = match *m.kind() {
        WeightKind::Gevrey { alpha, beta } => (alpha, beta),
        WeightKind::Explicit => return Err(AssocError::NotGevrey),
    };
    assert!(!t_grid.is_empty() && t_grid.iter().all(|&t| t > 0.0));
    assert!(!ladder.is_empty() && ladder.iter().all(|&c| c > 0.0));
    assert!(ladder.windows(2).all(|w| w[0] < w[1]));

    let lh: Vec<f64> = t_grid.iter().map(|&t| hm_eval(m, t).log_h).collect();

    let mut a = None;
    for &c in ladder.iter().rev() {
        let ok = t_grid
            .iter()
            .zip(&lh)
            .all(|(&t, &h)| ln_eta(alpha, beta, c * t) <= h + tol);
        if ok {
            a = Some(c);
            break;
        }
    }
    let mut b = None;
    for &c in ladder.iter() {
        let ok = t_grid
            .iter()
            .zip(&lh)
            .all(|(&t, &h)| h <= ln_eta(alpha, beta, c * t) + tol);
        if ok {
            b = Some(c);
            break;
        }
    }
    match (a, b) {
        (Some(a), Some(b)) => Ok(EtaBracket { a, b, grid_len: t_grid.len() }),
        _ => Err(AssocError::BracketNotFound),
    }
}
