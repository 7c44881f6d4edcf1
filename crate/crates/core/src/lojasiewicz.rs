//! Division-bound diagnostics for reciprocals of polynomials.
//!
//! The central quantity is the Q-statistic
//!
//! ```text
//! ln Q = ln|D^J(1/phi)(x)| + ln h_M(lambda d(x)) - ln(|J|! M_|J|) - |J| ln sigma
//! ```
//!
//! with d(x) the distance to the zero set of phi. A weighted division bound
//! with constants (C, sigma) holds on a region exactly when Q <= C there, for
//! every point and derivative order. Sampling cannot decide that, so every
//! fitted verdict here is labeled heuristic; refutations, by contrast, rest
//! on exact closed forms and carry exact witnesses.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::assoc;
use crate::geometry::{self, Distance, GridBox, ZeroSet, ZeroSetReport};
use crate::math;
use crate::series::{self, MultiIndex, Polynomial};
use crate::weights::WeightSequence;

#[derive(Clone, Debug, PartialEq)]
pub enum LojaError {
    OnZeroSet { point: String },
    DegreeBudgetExceeded { requested: u64, cap: u64 },
    EmptyGrid { skipped: usize },
    AllPointsOnZeroSet,
    /// The declared zero set fails validation against phi.
    ZeroSetMismatch { detail: String },
    /// A verification step of the certification chain failed; the detail
    /// carries the witness.
    StepFailed { step: u8, detail: String },
    /// Two supposedly identical exact computations disagreed.
    CrossCheckFailed { detail: String },
    BadParameter { reason: &'static str },
    Geometry(geometry::GeometryError),
    Series(series::SeriesError),
}

impl From<geometry::GeometryError> for LojaError {
    fn from(e: geometry::GeometryError) -> Self {
        LojaError::Geometry(e)
    }
}

impl From<series::SeriesError> for LojaError {
    fn from(e: series::SeriesError) -> Self {
        LojaError::Series(e)
    }
}

impl core::fmt::Display for LojaError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            LojaError::OnZeroSet { point } => write!(f, "point {point} lies on the zero set"),
            LojaError::DegreeBudgetExceeded { requested, cap } => {
                write!(f, "derivative order {requested} exceeds the configured cap {cap}")
            }
            LojaError::EmptyGrid { skipped } => {
                write!(f, "no usable grid points ({skipped} skipped on the zero set)")
            }
            LojaError::AllPointsOnZeroSet => {
                write!(f, "no grid points with distance in (0, 1)")
            }
            LojaError::ZeroSetMismatch { detail } => write!(f, "zero set mismatch: {detail}"),
            LojaError::StepFailed { step, detail } => {
                write!(f, "verification step {step} failed: {detail}")
            }
            LojaError::CrossCheckFailed { detail } => write!(f, "cross-check failed: {detail}"),
            LojaError::BadParameter { reason } => write!(f, "{reason}"),
            LojaError::Geometry(e) => write!(f, "{e}"),
            LojaError::Series(e) => write!(f, "{e}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for LojaError {}

/// All heuristic verdicts compare constants across refinements against this
/// growth factor: a constant is treated as stable when it grows by less than
/// this factor per refinement (shrinking counts as stable), and a run is
/// divergent when every ladder entry grows by at least this factor at every
/// step.
pub const VERDICT_GROWTH_FACTOR: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    CertifiedHeuristic,
    Diverging,
    Inconclusive,
}

impl core::fmt::Display for Verdict {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Verdict::CertifiedHeuristic => write!(f, "certified-heuristic"),
            Verdict::Diverging => write!(f, "diverging"),
            Verdict::Inconclusive => write!(f, "inconclusive"),
        }
    }
}

/// A polynomial together with its validated zero set.
#[derive(Clone, Debug)]
pub struct TestFunction {
    phi: Polynomial,
    zero_set: ZeroSet,
    validation: ZeroSetReport,
}

impl TestFunction {
    /// Validates the declared zero set against phi on the probe box and
    /// rejects declarations phi does not vanish on, or that miss sampled
    /// zeros of phi.
    pub fn new(phi: Polynomial, zero_set: ZeroSet, probe: &GridBox) -> Result<Self, LojaError> {
        let validation = geometry::validate_zero_set(&phi, &zero_set, probe)?;
        if !validation.membership_ok {
            return Err(LojaError::ZeroSetMismatch {
                detail: validation.failures.join("; "),
            });
        }
        if let Some(p) = &validation.off_set_zero {
            return Err(LojaError::ZeroSetMismatch {
                detail: format!(
                    "phi vanishes at sampled point {} away from the declared set",
                    geometry::format_point(p)
                ),
            });
        }
        Ok(TestFunction { phi, zero_set, validation })
    }

    pub fn phi(&self) -> &Polynomial {
        &self.phi
    }

    pub fn zero_set(&self) -> &ZeroSet {
        &self.zero_set
    }

    pub fn validation(&self) -> &ZeroSetReport {
        &self.validation
    }
}

/// One evaluation of the Q-statistic, with its ingredients exposed.
#[derive(Clone, Debug)]
pub struct QStat {
    pub ln_q: f64,
    pub ln_deriv_abs: f64,
    pub deriv_sign: i8,
    pub ln_h: f64,
    pub dist: Distance,
    /// Minimizing index inside h_M at the scaled distance.
    pub minimizer: u64,
}

/// Evaluates ln Q at one point and derivative index. The derivative comes
/// from the exact series reciprocal; only the final combination is floating.
pub fn q_statistic(
    f: &TestFunction,
    m: &mut WeightSequence,
    x: &[BigRational],
    j: &MultiIndex,
    lambda: f64,
    sigma: f64,
    cap: u64,
) -> Result<QStat, LojaError> {
    if !(lambda > 0.0) || !(sigma > 0.0) {
        return Err(LojaError::BadParameter { reason: "lambda and sigma must be positive" });
    }
    let jt = j.total() as u64;
    if jt > cap {
        return Err(LojaError::DegreeBudgetExceeded { requested: jt, cap });
    }
    let dist = geometry::distance(x, &f.zero_set)?;
    if dist.is_zero() {
        return Err(LojaError::OnZeroSet { point: geometry::format_point(x) });
    }
    let g = series::reciprocal(&series::recenter(&f.phi, x, jt as u32)?, jt as u32)?;
    let deriv = g.derivative_at(j)?;
    let deriv_sign = if deriv.is_zero() {
        0
    } else if deriv.is_positive() {
        1
    } else {
        -1
    };
    let ln_deriv_abs = math::ln_big_rational_abs(&deriv);
    let h = assoc::hm_eval(m, lambda * dist.to_f64());
    let mut lf = math::LogFactorial::new();
    let ln_q = ln_deriv_abs + h.log_h - lf.get(jt) - m.log_m(jt) - jt as f64 * math::ln(sigma);
    Ok(QStat {
        ln_q,
        ln_deriv_abs,
        deriv_sign,
        ln_h: h.log_h,
        dist,
        minimizer: h.minimizer,
    })
}

/// Grid point and derivative index attaining a profile maximum.
#[derive(Clone, Debug)]
pub struct ProfileWitness {
    pub x: Vec<BigRational>,
    pub index: MultiIndex,
    pub ln_term: f64,
}

/// Per-order maxima of the sigma-free part of the Q-statistic:
/// s[j] = max over grid and |J| = j of ln|D^J(1/phi)| + ln h - ln(j! M_j).
/// A division bound with constants (C, sigma) holds on the sampled set
/// exactly when s[j] <= ln C + j ln sigma for every j.
#[derive(Clone, Debug)]
pub struct GrowthProfile {
    pub lambda: f64,
    pub j_max: u32,
    pub grid_len: usize,
    /// Grid points skipped because they lie on the zero set.
    pub skipped: usize,
    pub s: Vec<f64>,
    /// First witness attaining each s[j], in grid-then-rank order.
    pub witnesses: Vec<ProfileWitness>,
}

pub fn growth_profile(
    f: &TestFunction,
    m: &mut WeightSequence,
    lambda: f64,
    grid: &GridBox,
    j_max: u32,
) -> Result<GrowthProfile, LojaError> {
    if !(lambda > 0.0) {
        return Err(LojaError::BadParameter { reason: "lambda must be positive" });
    }
    let n = f.phi.nvars();
    if grid.nvars() != n {
        return Err(LojaError::Geometry(geometry::GeometryError::DimensionMismatch {
            expected: n,
            got: grid.nvars(),
        }));
    }
    let indices = series::multi_indices(n, j_max);
    let mut lf = math::LogFactorial::new();
    // ln(J! / |J|!) for the index, plus ln(|J|! M_|J|), assembled per index
    let mut fixed = Vec::with_capacity(indices.len());
    for idx in &indices {
        let jt = idx.total() as u64;
        let mut ln_index_fact = 0.0;
        for &e in idx.0.iter() {
            ln_index_fact += lf.get(e as u64);
        }
        fixed.push(ln_index_fact - lf.get(jt) - m.log_m(jt));
    }

    let mut s = alloc::vec![f64::NEG_INFINITY; j_max as usize + 1];
    let mut witnesses: Vec<Option<ProfileWitness>> = alloc::vec![None; j_max as usize + 1];
    let mut skipped = 0usize;
    let mut used = 0usize;
    let points = grid.points();
    for x in &points {
        let dist = geometry::distance(x, &f.zero_set)?;
        if dist.is_zero() {
            skipped += 1;
            continue;
        }
        used += 1;
        let ln_h = assoc::hm_eval(m, lambda * dist.to_f64()).log_h;
        let g = series::reciprocal_raw(&series::recenter(&f.phi, x, j_max)?, j_max)?;
        let ln_scale = math::ln_bigint_abs(g.scale());
        let ln_den = math::ln_bigint_abs(g.den());
        for ((idx, nj), fx) in g.indices().iter().zip(g.numerators()).zip(&fixed) {
            if nj.is_zero() {
                continue;
            }
            let jt = idx.total() as usize;
            // ln|D^J| = ln(J! |coeff|)
            let ln_c = ln_scale + math::ln_bigint_abs(nj) - (jt as f64 + 1.0) * ln_den;
            let term = ln_c + (fx + ln_h);
            if term > s[jt] {
                s[jt] = term;
                witnesses[jt] = Some(ProfileWitness {
                    x: x.clone(),
                    index: idx.clone(),
                    ln_term: term,
                });
            }
        }
    }
    if used == 0 {
        return Err(LojaError::EmptyGrid { skipped });
    }
    let witnesses = witnesses
        .into_iter()
        .enumerate()
        .map(|(jt, w)| {
            w.unwrap_or_else(|| ProfileWitness {
                x: points[0].clone(),
                index: MultiIndex(alloc::vec![0; n]),
                ln_term: s[jt],
            })
        })
        .collect();
    Ok(GrowthProfile { lambda, j_max, grid_len: points.len(), skipped, s, witnesses })
}

/// Envelope constants per sigma across refinement levels, with the stability
/// verdict. ln_c holds the final level.
#[derive(Clone, Debug)]
pub struct EnvelopeFit {
    pub sigma_ladder: Vec<f64>,
    pub ln_c: Vec<f64>,
    /// history[level][sigma index] = ln C at that refinement level.
    pub history: Vec<Vec<f64>>,
    pub growth_threshold: f64,
    pub verdict: Verdict,
}

/// Fits ln C(sigma) = max_j (s_j - j ln sigma) per refinement level and
/// judges stability: certified-heuristic when some sigma grows by less than
/// the threshold factor over the last refinement, diverging when every sigma
/// grows by at least the factor at every refinement, inconclusive otherwise.
pub fn fit_envelope(
    levels: &[GrowthProfile],
    sigma_ladder: &[f64],
) -> Result<EnvelopeFit, LojaError> {
    if levels.len() < 2 {
        return Err(LojaError::BadParameter { reason: "need at least two refinement levels" });
    }
    if sigma_ladder.is_empty() || sigma_ladder.iter().any(|&s| !(s > 0.0)) {
        return Err(LojaError::BadParameter { reason: "sigma ladder must be positive" });
    }
    let history: Vec<Vec<f64>> = levels
        .iter()
        .map(|p| {
            sigma_ladder
                .iter()
                .map(|&sig| {
                    let ls = math::ln(sig);
                    p.s.iter()
                        .enumerate()
                        .map(|(j, &sj)| sj - j as f64 * ls)
                        .fold(f64::NEG_INFINITY, f64::max)
                })
                .collect()
        })
        .collect();
    let thr = math::ln(VERDICT_GROWTH_FACTOR);
    let last = history.len() - 1;
    let stable_now = (0..sigma_ladder.len())
        .any(|i| history[last][i] - history[last - 1][i] < thr);
    let verdict = if stable_now {
        Verdict::CertifiedHeuristic
    } else {
        let all_steps_grow = (0..sigma_ladder.len()).all(|i| {
            (1..history.len()).all(|l| history[l][i] - history[l - 1][i] >= thr)
        });
        if all_steps_grow {
            Verdict::Diverging
        } else {
            Verdict::Inconclusive
        }
    };
    Ok(EnvelopeFit {
        sigma_ladder: sigma_ladder.to_vec(),
        ln_c: history[last].clone(),
        history,
        growth_threshold: thr,
        verdict,
    })
}

/// Probe result at one (t, sigma): the maximizing derivative half-order m
/// and the C that sigma would need at this t.
#[derive(Clone, Debug)]
pub struct ProbeEntry {
    pub sigma: f64,
    pub best_m: u64,
    pub required_ln_c: f64,
}

#[derive(Clone, Debug)]
pub struct ProbeRow {
    pub t: BigRational,
    pub ln_h: f64,
    pub entries: Vec<ProbeEntry>,
}

#[derive(Clone, Debug)]
pub struct ProbeReport {
    pub k: u32,
    pub lambda: f64,
    pub sigma_ladder: Vec<f64>,
    pub rows: Vec<ProbeRow>,
    pub growth_threshold: f64,
    pub verdict: Verdict,
    /// Number of exact closed-form vs series-reciprocal agreements checked.
    pub cross_checked: usize,
}

/// Ceiling for the upward scan over m; the maximizer for sensible ladders
/// sits far below.
const PROBE_M_CAP: u64 = 1 << 21;

/// How many half-orders are re-derived through the exact series reciprocal
/// at each t.
const PROBE_CHECK_M: u64 = 3;

/// Falsification probe for psi = x1^2 + x2^(2k) along x = (0, t).
///
/// The reciprocal has the exact axis derivatives
/// |D^(2m,0)(1/psi)(0,t)| = (2m)! t^(-2k(m+1)), so the factorial in Q
/// cancels and ln Q can be maximized over m by an upward scan (the sequence
/// is concave in m because the weight ratios increase). Each required
/// ln C(sigma, t) is the maximized ln Q; the verdict applies the stability
/// rule along the t-ladder.
pub fn axis_probe(
    k: u32,
    m: &mut WeightSequence,
    lambda: f64,
    sigma_ladder: &[f64],
    t_ladder: &[BigRational],
) -> Result<ProbeReport, LojaError> {
    if k < 1 {
        return Err(LojaError::BadParameter { reason: "k must be at least 1" });
    }
    if !(lambda > 0.0) {
        return Err(LojaError::BadParameter { reason: "lambda must be positive" });
    }
    if sigma_ladder.is_empty() || sigma_ladder.iter().any(|&s| !(s > 0.0)) {
        return Err(LojaError::BadParameter { reason: "sigma ladder must be positive" });
    }
    if t_ladder.is_empty()
        || t_ladder.iter().any(|t| !t.is_positive() || *t >= BigRational::one())
        || t_ladder.windows(2).any(|w| w[1] >= w[0])
    {
        return Err(LojaError::BadParameter {
            reason: "t ladder must be strictly decreasing within (0, 1)",
        });
    }

    let psi = axis_psi(k);
    let two_k = 2 * k as u64;
    let mut rows = Vec::with_capacity(t_ladder.len());
    let mut cross_checked = 0usize;
    for t in t_ladder {
        let ln_t = math::ln_big_rational_abs(t);
        let t_f = math::big_rational_to_f64(t);
        let ln_h = assoc::hm_eval(m, lambda * t_f).log_h;
        // ln Q(m) = -2k(m+1) ln t + ln h - ln M_2m - 2m ln sigma
        let mut entries = Vec::with_capacity(sigma_ladder.len());
        for &sigma in sigma_ladder {
            let ln_sigma = math::ln(sigma);
            let lnq = |mm: u64, w: &mut WeightSequence| {
                -(two_k as f64) * (mm as f64 + 1.0) * ln_t + ln_h
                    - w.log_m(2 * mm)
                    - 2.0 * mm as f64 * ln_sigma
            };
            let mut best_m = 0u64;
            let mut best = lnq(0, m);
            while best_m < PROBE_M_CAP {
                let nxt = lnq(best_m + 1, m);
                if nxt <= best {
                    break;
                }
                best = nxt;
                best_m += 1;
            }
            entries.push(ProbeEntry { sigma, best_m, required_ln_c: best });
        }

        // exact cross-check of the closed form against the series reciprocal
        let cap = (2 * PROBE_CHECK_M) as u32;
        let center = [BigRational::zero(), t.clone()];
        let g = series::reciprocal(&series::recenter(&psi, &center, cap)?, cap)?;
        for mm in 0..=PROBE_CHECK_M {
            let idx = MultiIndex(alloc::vec![2 * mm as u32, 0]);
            let got = g.derivative_at(&idx)?;
            let mut expect = t_pow_neg(t, two_k * (mm + 1));
            let mut fact = BigInt::one();
            for i in 1..=(2 * mm) {
                fact *= BigInt::from(i);
            }
            expect *= BigRational::from_integer(fact);
            if mm % 2 == 1 {
                expect = -expect;
            }
            if got != expect {
                return Err(LojaError::CrossCheckFailed {
                    detail: format!("axis derivative 2m={} at t={t}: {got} vs {expect}", 2 * mm),
                });
            }
            cross_checked += 1;
        }
        rows.push(ProbeRow { t: t.clone(), ln_h, entries });
    }

    let thr = math::ln(VERDICT_GROWTH_FACTOR);
    let nsig = sigma_ladder.len();
    let last = rows.len() - 1;
    let verdict = if rows.len() < 2 {
        Verdict::Inconclusive
    } else if (0..nsig).any(|i| {
        rows[last].entries[i].required_ln_c - rows[last - 1].entries[i].required_ln_c < thr
    }) {
        Verdict::CertifiedHeuristic
    } else if (0..nsig).all(|i| {
        (1..rows.len())
            .all(|r| rows[r].entries[i].required_ln_c - rows[r - 1].entries[i].required_ln_c >= thr)
    }) {
        Verdict::Diverging
    } else {
        Verdict::Inconclusive
    };

    Ok(ProbeReport {
        k,
        lambda,
        sigma_ladder: sigma_ladder.to_vec(),
        rows,
        growth_threshold: thr,
        verdict,
        cross_checked,
    })
}

/// x1^2 + x2^(2k)
pub fn axis_psi(k: u32) -> Polynomial {
    Polynomial::from_terms(
        2,
        [
            (MultiIndex(alloc::vec![2, 0]), BigRational::one()),
            (MultiIndex(alloc::vec![0, 2 * k]), BigRational::one()),
        ],
    )
    .expect("fixed shape")
}

/// x1^3 + x1 x2^(2k), the hyperplane product x1 (x1^2 + x2^(2k))
pub fn hyperplane_product(k: u32) -> Polynomial {
    Polynomial::from_terms(
        2,
        [
            (MultiIndex(alloc::vec![3, 0]), BigRational::one()),
            (MultiIndex(alloc::vec![1, 2 * k]), BigRational::one()),
        ],
    )
    .expect("fixed shape")
}

fn t_pow_neg(t: &BigRational, e: u64) -> BigRational {
    let mut acc = BigRational::one();
    for _ in 0..e {
        acc /= t;
    }
    acc
}

#[derive(Clone, Debug)]
pub struct StepSummary {
    pub samples: usize,
    /// Least slack seen in the step's inequality (positive means it held).
    pub worst_margin: f64,
    pub witness: Option<String>,
}

/// Result of the three-step certification chain for phi = x1 (x1^2 + x2^(2k)).
#[derive(Clone, Debug)]
pub struct CertifyReport {
    pub k: u32,
    pub delta: BigRational,
    pub lambda: f64,
    /// Splitting constant with M_(j+k) <= A^(j+k) M_j M_k over the tested range.
    pub a: f64,
    /// Fitted derivative-bound base for 1/phi on the grid.
    pub b: f64,
    pub sigma: f64,
    /// A^2 B lambda^2, the headline product form of the constant.
    pub c_product: f64,
    /// ln(A^2 B lambda^2 M_2), the envelope level the direct check uses
    /// (the M_2 factor rides along from splitting M_(p+2)).
    pub ln_c_envelope: f64,
    pub p_max: u32,
    pub steps: [StepSummary; 3],
    pub verdict: Verdict,
}

struct Complex {
    re: f64,
    im: f64,
}

impl Complex {
    fn mul(&self, o: &Complex) -> Complex {
        Complex {
            re: self.re * o.re - self.im * o.im,
            im: self.re * o.im + self.im * o.re,
        }
    }

    fn powu(&self, e: u32) -> Complex {
        let mut acc = Complex { re: 1.0, im: 0.0 };
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    fn abs(&self) -> f64 {
        math::sqrt(self.re * self.re + self.im * self.im)
    }
}

/// Angles per polydisc axis in the step (i) boundary sampling.
const POLYDISC_ANGLES: usize = 16;
/// Radius factors sampled per axis (boundary and interior).
const POLYDISC_RADII: [f64; 2] = [1.0, 0.5];
/// Conservative float slack for the sampled polydisc inequality.
pub const POLYDISC_SLACK: f64 = 1e-9;

/// Runs the three-step certification chain for phi = x1 psi,
/// psi = x1^2 + x2^(2k), zero set {x1 = 0}:
///
/// (i) with delta = 1/(2^(2k+1) + 4), sampled points of the polydisc
/// |z1 - x1| <= delta psi(x)^(1/2), |z2 - x2| <= delta psi(x)^(1/2k)
/// keep |psi(z)| >= psi(x)/2;
///
/// (ii) the reciprocal's Taylor coefficients at x obey the exact rational
/// bound |coeff_(i,j)| <= 2 delta^-(i+j) |x1|^-(i+j+2), equivalently
/// |D^(i,j)(1/psi)| <= 2 delta^-(i+j) i! j! |x1|^-(i+j+2);
///
/// (iii) B is fitted as the least base with
/// |D^P(1/phi)| <= B^(p+1) p! |x1|^-(p+2) on the grid (the grid keeps |x1|
/// away from 0, so the level absorbs one spare power of |x1|), A comes from
/// the splitting property of M, and the envelope with sigma = A B lambda and
/// ln C = ln(A^2 B lambda^2 M_2) is checked directly on the grid and once
/// more on its refinement.
///
/// Steps (i) and (ii) failing return StepFailed with a witness; the final
/// envelope's stability decides the (heuristic) verdict.
pub fn certify_hyperplane_product(
    k: u32,
    m: &mut WeightSequence,
    lambda: f64,
    grid: &GridBox,
    p_max: u32,
) -> Result<CertifyReport, LojaError> {
    if k < 2 {
        return Err(LojaError::BadParameter { reason: "k must be at least 2" });
    }
    if !(lambda > 0.0) {
        return Err(LojaError::BadParameter { reason: "lambda must be positive" });
    }
    if grid.nvars() != 2 {
        return Err(LojaError::BadParameter { reason: "grid must be two-dimensional" });
    }
    let points = grid.points();
    if points.iter().any(|p| p[0].clone().abs() >= BigRational::one()) {
        return Err(LojaError::BadParameter { reason: "grid must stay within |x1| < 1" });
    }

    let psi = axis_psi(k);
    let phi = hyperplane_product(k);
    let delta = BigRational::new(BigInt::one(), BigInt::from((1u64 << (2 * k + 1)) + 4));
    let delta_f = math::big_rational_to_f64(&delta);

    // step (i): sampled polydisc lower bound
    let mut s1_samples = 0usize;
    let mut s1_worst = f64::INFINITY;
    let mut s1_witness = None;
    for x in &points {
        let psi_x = math::big_rational_to_f64(&psi.eval(x)?);
        if psi_x == 0.0 {
            continue;
        }
        let x1 = math::big_rational_to_f64(&x[0]);
        let x2 = math::big_rational_to_f64(&x[1]);
        let r1 = delta_f * math::sqrt(psi_x);
        let r2 = delta_f * math::powf(psi_x, 1.0 / (2.0 * k as f64));
        for &scale in &POLYDISC_RADII {
            for a in 0..POLYDISC_ANGLES {
                let ta = 2.0 * core::f64::consts::PI * a as f64 / POLYDISC_ANGLES as f64;
                let z1 = Complex {
                    re: x1 + scale * r1 * math::cos(ta),
                    im: scale * r1 * math::sin(ta),
                };
                for b in 0..POLYDISC_ANGLES {
                    let tb = 2.0 * core::f64::consts::PI * b as f64 / POLYDISC_ANGLES as f64;
                    let z2 = Complex {
                        re: x2 + scale * r2 * math::cos(tb),
                        im: scale * r2 * math::sin(tb),
                    };
                    let z1sq = z1.powu(2);
                    let z2p = z2.powu(2 * k);
                    let psi_z = Complex { re: z1sq.re + z2p.re, im: z1sq.im + z2p.im };
                    let margin = psi_z.abs() / psi_x - 0.5;
                    s1_samples += 1;
                    if margin < s1_worst {
                        s1_worst = margin;
                        s1_witness = Some(format!(
                            "x={} angles=({a},{b}) scale={scale}",
                            geometry::format_point(x)
                        ));
                    }
                }
            }
        }
    }
    if s1_worst < -POLYDISC_SLACK {
        return Err(LojaError::StepFailed {
            step: 1,
            detail: format!(
                "polydisc modulus dropped to {:.3e} below psi(x)/2 at {}",
                s1_worst,
                s1_witness.unwrap_or_default()
            ),
        });
    }

    // step (ii): exact coefficient bounds for 1/psi. The test
    // |g_J| delta^p |x1|^(p+2) <= 2 runs entirely on the cleared-denominator
    // integers: with g_J = scale n_J / den^(p+1), x1 = xp/xq, delta = dn/dd,
    // it reads |scale n_J| dn^p xp^(p+2) <= 2 |den|^(p+1) dd^p xq^(p+2).
    let mut s2_samples = 0usize;
    let mut s2_worst = f64::INFINITY;
    let mut s2_witness = None;
    for x in &points {
        if x[0].is_zero() || psi.eval(x)?.is_zero() {
            continue;
        }
        let g = series::reciprocal_raw(&series::recenter(&psi, x, p_max)?, p_max)?;
        let ax1 = x[0].clone().abs();
        let scale_abs = g.scale().abs();
        let den_abs = g.den().abs();
        // graded ladders for the two sides of the integer inequality
        let mut left = &scale_abs * ax1.numer() * ax1.numer();
        let mut right = &den_abs * ax1.denom() * ax1.denom();
        let mut ln_right = math::ln_bigint_abs(&right);
        let two_right = |r: &BigInt| r * 2;
        let mut right2 = two_right(&right);
        let mut grade = 0u32;
        for (idx, nj) in g.indices().iter().zip(g.numerators()) {
            let p = idx.total();
            while grade < p {
                left = left * delta.numer() * ax1.numer();
                right = right * &den_abs * delta.denom() * ax1.denom();
                ln_right = math::ln_bigint_abs(&right);
                right2 = two_right(&right);
                grade += 1;
            }
            let margin = if nj.is_zero() {
                2.0
            } else {
                let lhs_int = nj.abs() * &left;
                if lhs_int > right2 {
                    return Err(LojaError::StepFailed {
                        step: 2,
                        detail: format!(
                            "coefficient bound violated at x={} J={}",
                            geometry::format_point(x),
                            idx
                        ),
                    });
                }
                2.0 - math::exp(math::ln_bigint_abs(&lhs_int) - ln_right)
            };
            s2_samples += 1;
            if margin < s2_worst {
                s2_worst = margin;
                s2_witness = Some(format!("x={} J={}", geometry::format_point(x), idx));
            }
        }
    }

    // step (iii): fit B, assemble the envelope constants, verify directly
    let mut lf = math::LogFactorial::new();
    let fit_b = |pts: &[Vec<BigRational>],
                 lf: &mut math::LogFactorial|
     -> Result<(f64, Vec<PointDerivs>), LojaError> {
        let mut cache = Vec::new();
        let mut lnb = f64::NEG_INFINITY;
        for x in pts {
            if x[0].is_zero() {
                continue;
            }
            let g = series::reciprocal_raw(&series::recenter(&phi, x, p_max)?, p_max)?;
            let ln_scale = math::ln_bigint_abs(g.scale());
            let ln_den = math::ln_bigint_abs(g.den());
            let ln_ax1 = math::ln_big_rational_abs(&x[0]);
            let mut terms = Vec::with_capacity(series::series_len(2, p_max));
            for (idx, nj) in g.indices().iter().zip(g.numerators()) {
                let p = idx.total() as u64;
                let ln_d = if nj.is_zero() {
                    f64::NEG_INFINITY
                } else {
                    lf.get(idx.0[0] as u64) + lf.get(idx.0[1] as u64)
                        + ln_scale + math::ln_bigint_abs(nj)
                        - (p as f64 + 1.0) * ln_den
                };
                terms.push((p, ln_d));
                if ln_d > f64::NEG_INFINITY {
                    let cand =
                        (ln_d - lf.get(p) + (p as f64 + 2.0) * ln_ax1) / (p as f64 + 1.0);
                    if cand > lnb {
                        lnb = cand;
                    }
                }
            }
            cache.push(PointDerivs { ln_ax1, terms });
        }
        Ok((lnb, cache))
    };

    let (lnb, coarse_cache) = fit_b(&points, &mut lf)?;
    let b = math::exp(lnb);
    let reg = crate::weights::check_regularity(m, (p_max as u64 + 2).max(2));
    let a = reg.moderate_growth_a;
    let sigma = a * b * lambda;
    let ln_sigma = math::ln(sigma);
    let c_product = a * a * b * lambda * lambda;
    let ln_c_envelope = 2.0 * math::ln(a) + lnb + 2.0 * math::ln(lambda) + m.log_m(2);

    let mut s3_samples = 0usize;
    let mut s3_worst = f64::INFINITY;
    let mut s3_witness = None;
    let check_level = |cache: &[PointDerivs],
                          m: &mut WeightSequence,
                          lf: &mut math::LogFactorial,
                          worst: &mut f64,
                          witness: &mut Option<String>,
                          samples: &mut usize| {
        for pd in cache {
            let d = math::exp(pd.ln_ax1);
            let ln_h = assoc::hm_eval(m, lambda * d).log_h;
            for &(p, ln_d) in &pd.terms {
                if ln_d == f64::NEG_INFINITY {
                    continue;
                }
                let ln_q =
                    ln_d + ln_h - lf.get(p) - m.log_m(p) - p as f64 * ln_sigma;
                let margin = ln_c_envelope - ln_q;
                *samples += 1;
                if margin < *worst {
                    *worst = margin;
                    *witness = Some(format!("p={p} ln|x1|={:.6}", pd.ln_ax1));
                }
            }
        }
    };
    check_level(&coarse_cache, m, &mut lf, &mut s3_worst, &mut s3_witness, &mut s3_samples);
    if s3_worst < -1e-6 {
        return Err(LojaError::StepFailed {
            step: 3,
            detail: format!(
                "envelope violated on the fitting grid by {:.3e} at {}",
                -s3_worst,
                s3_witness.unwrap_or_default()
            ),
        });
    }

    let refined = grid.refine();
    let refined_points = refined.points();
    let (lnb_fine, fine_cache) = fit_b(&refined_points, &mut lf)?;
    let mut fine_worst = f64::INFINITY;
    check_level(&fine_cache, m, &mut lf, &mut fine_worst, &mut s3_witness, &mut s3_samples);
    s3_worst = s3_worst.min(fine_worst);

    let thr = math::ln(VERDICT_GROWTH_FACTOR);
    let verdict = if lnb_fine - lnb < thr && fine_worst > -thr {
        Verdict::CertifiedHeuristic
    } else {
        Verdict::Inconclusive
    };

    Ok(CertifyReport {
        k,
        delta,
        lambda,
        a,
        b,
        sigma,
        c_product,
        ln_c_envelope,
        p_max,
        steps: [
            StepSummary { samples: s1_samples, worst_margin: s1_worst, witness: s1_witness },
            StepSummary { samples: s2_samples, worst_margin: s2_worst, witness: s2_witness },
            StepSummary { samples: s3_samples, worst_margin: s3_worst, witness: s3_witness },
        ],
        verdict,
    })
}

struct PointDerivs {
    ln_ax1: f64,
    /// (total order p, ln|D^P(1/phi)|) per index rank
    terms: Vec<(u64, f64)>,
}

/// Power-law lower-bound fit |phi(x)| >= C dist(x)^nu on grid points with
/// distance in (0, 1).
#[derive(Clone, Debug)]
pub struct ClassicalFit {
    pub nu: f64,
    pub ln_c: f64,
    pub c: f64,
    pub residual_rms: f64,
    /// Points where the fitted bound is tight to within 1e-9.
    pub binding_count: usize,
    pub used: usize,
    pub skipped: usize,
}

/// Fits the smallest exponent nu >= 1 making the power-law bound hold on the
/// usable points, then the best C for that nu. Points on the zero set or at
/// distance >= 1 are skipped.
pub fn classical_loja_fit(f: &TestFunction, grid: &GridBox) -> Result<ClassicalFit, LojaError> {
    let one = BigRational::one();
    let mut pairs = Vec::new();
    let mut skipped = 0usize;
    for x in grid.points() {
        let d = geometry::distance(&x, &f.zero_set)?;
        if d.is_zero() || d.dist2 >= one {
            skipped += 1;
            continue;
        }
        let v = f.phi.eval(&x)?;
        if v.is_zero() {
            return Err(LojaError::ZeroSetMismatch {
                detail: format!(
                    "phi vanishes at {} away from the declared set",
                    geometry::format_point(&x)
                ),
            });
        }
        pairs.push((d.ln(), math::ln_big_rational_abs(&v)));
    }
    if pairs.is_empty() {
        return Err(LojaError::AllPointsOnZeroSet);
    }
    let mut nu = 1.0f64;
    for &(u, v) in &pairs {
        let r = v / u;
        if r > nu {
            nu = r;
        }
    }
    let mut ln_c = f64::INFINITY;
    for &(u, v) in &pairs {
        ln_c = ln_c.min(v - nu * u);
    }
    let mut sq = 0.0;
    let mut binding = 0usize;
    for &(u, v) in &pairs {
        let r = v - nu * u - ln_c;
        sq += r * r;
        if r < 1e-9 {
            binding += 1;
        }
    }
    Ok(ClassicalFit {
        nu,
        ln_c,
        c: math::exp(ln_c),
        residual_rms: math::sqrt(sq / pairs.len() as f64),
        binding_count: binding,
        used: pairs.len(),
        skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{AxisGrid, Spacing};

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn qi(v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }

    fn x1_poly() -> Polynomial {
        Polynomial::from_terms(2, [(MultiIndex(alloc::vec![1, 0]), qi(1))]).unwrap()
    }

    fn off_axis_probe() -> GridBox {
        GridBox::new(alloc::vec![
            AxisGrid::new(q(1, 8), qi(1), 7, Spacing::Linear).unwrap(),
            AxisGrid::new(qi(-1), qi(1), 5, Spacing::Linear).unwrap(),
        ])
        .unwrap()
    }

    fn x1_fn() -> TestFunction {
        TestFunction::new(x1_poly(), ZeroSet::hyperplane(0), &off_axis_probe()).unwrap()
    }

    #[test]
    fn test_function_rejects_bad_declarations() {
        // x1 x2 declared as only {x1 = 0}: the probe grid sees zeros on the
        // x2 axis
        let phi = Polynomial::from_terms(2, [(MultiIndex(alloc::vec![1, 1]), qi(1))]).unwrap();
        let probe = GridBox::new(alloc::vec![
            AxisGrid::new(qi(-1), qi(1), 5, Spacing::Linear).unwrap(),
            AxisGrid::new(qi(-1), qi(1), 5, Spacing::Linear).unwrap(),
        ])
        .unwrap();
        let err = TestFunction::new(phi, ZeroSet::hyperplane(0), &probe).unwrap_err();
        assert!(matches!(err, LojaError::ZeroSetMismatch { .. }), "{err:?}");
        // x2^2 declared as {x1 = 0}: membership itself fails
        let phi2 = Polynomial::from_terms(2, [(MultiIndex(alloc::vec![0, 2]), qi(1))]).unwrap();
        let probe2 = off_axis_probe();
        let err2 = TestFunction::new(phi2, ZeroSet::hyperplane(0), &probe2).unwrap_err();
        assert!(matches!(err2, LojaError::ZeroSetMismatch { .. }));
    }

    #[test]
    fn q_statistic_spot_values_for_factorials() {
        let f = x1_fn();
        let mut m = WeightSequence::gevrey(1.0, 0.0).unwrap();
        // J = 0 at (1, 0): Q = |1/phi| h(1) = 1
        let s = q_statistic(
            &f,
            &mut m,
            &[qi(1), qi(0)],
            &MultiIndex(alloc::vec![0, 0]),
            1.0,
            1.0,
            8,
        )
        .unwrap();
        assert!(s.ln_q.abs() < 1e-12, "{}", s.ln_q);
        assert_eq!(s.deriv_sign, 1);
        // J = (1,0) at (1/2, 0): |D(1/x1)| = 4, h(1/2) = 1/2, so Q = 2
        let s2 = q_statistic(
            &f,
            &mut m,
            &[q(1, 2), qi(0)],
            &MultiIndex(alloc::vec![1, 0]),
            1.0,
            1.0,
            8,
        )
        .unwrap();
        assert!((s2.ln_q - math::ln(2.0)).abs() < 1e-12, "{}", s2.ln_q);
        assert_eq!(s2.deriv_sign, -1);
        assert_eq!(s2.minimizer, 1);
    }

    #[test]
    fn q_statistic_saturates_h_at_large_distance() {
        let f = x1_fn();
        let mut m = WeightSequence::gevrey(1.0, 0.0).unwrap();
        // lambda dist = 3 >= 1: h = 1, so Q = 1/|phi| = 1/3
        let s = q_statistic(
            &f,
            &mut m,
            &[qi(3), qi(2)],
            &MultiIndex(alloc::vec![0, 0]),
            1.0,
            1.0,
            4,
        )
        .unwrap();
        assert_eq!(s.ln_h, 0.0);
        assert!((s.ln_q + math::ln(3.0)).abs() < 1e-12);
    }

    #[test]
    fn q_statistic_guards() {
        let f = x1_fn();
        let mut m = WeightSequence::gevrey(1.0, 0.0).unwrap();
        let on = q_statistic(
            &f,
            &mut m,
            &[qi(0), qi(1)],
            &MultiIndex(alloc::vec![0, 0]),
            1.0,
            1.0,
            4,
        );
        assert!(matches!(on, Err(LojaError::OnZeroSet { .. })));
        let over = q_statistic(
            &f,
            &mut m,
            &[qi(1), qi(0)],
            &MultiIndex(alloc::vec![5, 0]),
            1.0,
            1.0,
            4,
        );
        assert!(matches!(over, Err(LojaError::DegreeBudgetExceeded { requested: 5, cap: 4 })));
    }

    #[test]
    fn q_statistic_sigma_slope_is_minus_j() {
        let f = x1_fn();
        let mut m = WeightSequence::gevrey(1.0, 0.0).unwrap();
        let idx = MultiIndex(alloc::vec![2, 0]);
        let x = [q(1, 3), qi(0)];
        let a = q_statistic(&f, &mut m, &x, &idx, 1.0, 1.0, 8).unwrap();
        let b = q_statistic(&f, &mut m, &x, &idx, 1.0, 4.0, 8).unwrap();
        assert!((a.ln_q - b.ln_q - 2.0 * math::ln(4.0)).abs() < 1e-12);
    }

    fn x1_grid() -> GridBox {
        GridBox::new(alloc::vec![
            AxisGrid::new(q(1, 32), q(1, 2), 6, Spacing::Geometric).unwrap(),
            AxisGrid::new(q(-1, 2), q(1, 2), 3, Spacing::Linear).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn growth_profile_matches_closed_form_for_reciprocal_x1() {
        let f = x1_fn();
        let mut m = WeightSequence::gevrey(1.0, 0.0).unwrap();
        let grid = x1_grid();
        let prof = growth_profile(&f, &mut m, 1.0, &grid, 5).unwrap();
        assert_eq!(prof.skipped, 0);
        assert_eq!(prof.s.len(), 6);
        // closed form: |D^(j,0)(1/x1)| = j! x1^-(j+1), so with M_j = j! the
        // profile is s_j = max over x1 of (j+1) ln(1/x1) + ln h(x1) - ln j!
        let mut lf = math::LogFactorial::new();
        for j in 0..=5u32 {
            let mut best = f64::NEG_INFINITY;
            for ax in grid.axes[0].points() {
                let xf = math::big_rational_to_f64(&ax);
                let cand = -(j as f64 + 1.0) * math::ln(xf)
                    + assoc::hm_eval(&mut m, xf).log_h
                    - lf.get(j as u64);
                best = best.max(cand);
            }
            assert!((prof.s[j as usize] - best).abs() < 1e-9, "j={j}");
            assert_eq!(prof.witnesses[j as usize].index.0[1], 0);
        }
    }

    #[test]
    fn growth_profile_skips_zero_set_and_reports_empty() {
        let f = x1_fn();
        let mut m = WeightSequence::gevrey(1.0, 0.0).unwrap();
        let on_axis = GridBox::new(alloc::vec![
            AxisGrid::new(qi(0), qi(0), 1, Spacing::Linear).unwrap(),
            AxisGrid::new(qi(-1), qi(1), 4, Spacing::Linear).unwrap(),
        ])
        .unwrap();
        let err = growth_profile(&f, &mut m, 1.0, &on_axis, 3).unwrap_err();
        assert!(matches!(err, LojaError::EmptyGrid { skipped: 4 }));
    }

    #[test]
    fn growth_profile_monotone_under_refinement() {
        let mut m = WeightSequence::gevrey(1.0, 0.0).unwrap();
        let phi = hyperplane_product(2);
        let probe = off_axis_probe();
        let f = TestFunction::new(phi, ZeroSet::hyperplane(0), &probe).unwrap();
        let grid = x1_grid();
        let coarse = growth_profile(&f, &mut m, 1.0, &grid, 4).unwrap();
        let fine = growth_profile(&f, &mut m, 1.0, &grid.refine(), 4).unwrap();
        for j in 0..=4usize {
            assert!(fine.s[j] >= coarse.s[j] - 1e-12, "j={j}");
        }
    }

    #[test]
    fn scaling_phi_shifts_profile_but_not_verdict() {
        let mut m = WeightSequence::gevrey(1.0, 0.0).unwrap();
        let grid = x1_grid();
        let f1 = x1_fn();
        let two_x1 =
            Polynomial::from_terms(2, [(MultiIndex(alloc::vec![1, 0]), qi(2))]).unwrap();
        let f2 = TestFunction::new(two_x1, ZeroSet::hyperplane(0), &off_axis_probe()).unwrap();
        let ladder = [1.0, 2.0, 4.0];
        let p1a = growth_profile(&f1, &mut m, 1.0, &grid, 4).unwrap();
        let p1b = growth_profile(&f1, &mut m, 1.0, &grid.refine(), 4).unwrap();
        let p2a = growth_profile(&f2, &mut m, 1.0, &grid, 4).unwrap();
        let p2b = growth_profile(&f2, &mut m, 1.0, &grid.refine(), 4).unwrap();
        for j in 0..=4usize {
            assert!((p2a.s[j] - (p1a.s[j] - math::ln(2.0))).abs() < 1e-9, "j={j}");
        }
        let e1 = fit_envelope(&[p1a, p1b], &ladder).unwrap();
        let e2 = fit_envelope(&[p2a, p2b], &ladder).unwrap();
        assert_eq!(e1.verdict, e2.verdict);
    }

    fn synthetic_profile(s: Vec<f64>) -> GrowthProfile {
        let j_max = s.len() as u32 - 1;
        let witnesses = s
            .iter()
            .map(|&v| ProfileWitness {
                x: alloc::vec![qi(1)],
                index: MultiIndex(alloc::vec![0]),
                ln_term: v,
            })
            .collect();
        GrowthProfile { lambda: 1.0, j_max, grid_len: 1, skipped: 0, s, witnesses }
    }

    #[test]
    fn envelope_of_flat_profiles_is_certified_at_one() {
        let levels = [
            synthetic_profile(alloc::vec![0.0; 9]),
            synthetic_profile(alloc::vec![0.0; 9]),
        ];
        let fit = fit_envelope(&levels, &[1.0, 2.0, 4.0]).unwrap();
        assert_eq!(fit.verdict, Verdict::CertifiedHeuristic);
        for &lc in &fit.ln_c {
            assert_eq!(lc, 0.0);
        }
        // nonincreasing in sigma
        for w in fit.ln_c.windows(2) {
            assert!(w[1] <= w[0] + 1e-12);
        }
    }

    #[test]
    fn envelope_of_factorial_profiles_diverges() {
        let mut lf = math::LogFactorial::new();
        let mut level = |jm: u64| {
            synthetic_profile((0..=jm).map(|j| lf.get(j)).collect())
        };
        let levels = [level(32), level(64), level(128)];
        let fit = fit_envelope(&levels, &[1.0, 2.0, 4.0, 8.0, 16.0]).unwrap();
        assert_eq!(fit.verdict, Verdict::Diverging);
    }

    #[test]
    fn envelope_needs_two_levels() {
        let levels = [synthetic_profile(alloc::vec![0.0; 3])];
        assert!(matches!(
            fit_envelope(&levels, &[1.0]),
            Err(LojaError::BadParameter { .. })
        ));
    }

    fn t_halving(from: (i64, i64), n: usize) -> Vec<BigRational> {
        let mut out = Vec::new();
        let mut cur = q(from.0, from.1);
        for _ in 0..n {
            out.push(cur.clone());
            cur /= qi(2);
        }
        out
    }

    #[test]
    fn axis_probe_diverges_for_quartic_axis_weight() {
        let mut m = WeightSequence::gevrey(1.0, 0.0).unwrap();
        let rep = axis_probe(2, &mut m, 1.0, &[1.0, 2.0, 4.0], &t_halving((1, 4), 4)).unwrap();
        assert_eq!(rep.verdict, Verdict::Diverging);
        assert_eq!(rep.cross_checked, 16);
        // required C strictly grows along t for every sigma
        for i in 0..3 {
            for r in 1..rep.rows.len() {
                assert!(
                    rep.rows[r].entries[i].required_ln_c
                        > rep.rows[r - 1].entries[i].required_ln_c
                );
            }
        }
    }

    #[test]
    fn axis_probe_stabilizes_for_quadratic_case() {
        let mut m = WeightSequence::gevrey(1.0, 0.0).unwrap();
        let rep = axis_probe(1, &mut m, 1.0, &[1.0, 2.0, 4.0], &t_halving((1, 4), 5)).unwrap();
        assert_eq!(rep.verdict, Verdict::CertifiedHeuristic);
        // at sigma = 4 > lambda the requirement eventually decreases
        let last = rep.rows.len() - 1;
        assert!(
            rep.rows[last].entries[2].required_ln_c
                < rep.rows[last - 1].entries[2].required_ln_c
        );
    }

    #[test]
    fn axis_probe_validates_ladders() {
        let mut m = WeightSequence::gevrey(1.0, 0.0).unwrap();
        assert!(axis_probe(0, &mut m, 1.0, &[1.0], &t_halving((1, 2), 2)).is_err());
        assert!(axis_probe(1, &mut m, 1.0, &[], &t_halving((1, 2), 2)).is_err());
        let increasing = alloc::vec![q(1, 8), q(1, 4)];
        assert!(axis_probe(1, &mut m, 1.0, &[1.0], &increasing).is_err());
        let too_big = alloc::vec![qi(2), qi(1)];
        assert!(axis_probe(1, &mut m, 1.0, &[1.0], &too_big).is_err());
    }

    fn certify_grid() -> GridBox {
        GridBox::new(alloc::vec![
            AxisGrid::new(q(1, 64), q(1, 2), 8, Spacing::Geometric).unwrap(),
            AxisGrid::new(q(-1, 2), q(1, 2), 5, Spacing::Linear).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn certification_chain_passes_for_quartic_product() {
        let mut m = WeightSequence::gevrey(1.0, 0.0).unwrap();
        let rep = certify_hyperplane_product(2, &mut m, 1.0, &certify_grid(), 10).unwrap();
        assert_eq!(rep.delta, q(1, 36));
        assert!(rep.a >= 1.0);
        assert!(rep.b > 0.0);
        assert!((rep.sigma - rep.a * rep.b * rep.lambda).abs() < 1e-12);
        assert!((rep.c_product - rep.a * rep.a * rep.b).abs() < 1e-9);
        for step in &rep.steps {
            assert!(step.samples > 0);
            assert!(step.worst_margin > -1e-6, "margin {}", step.worst_margin);
        }
        assert_eq!(rep.verdict, Verdict::CertifiedHeuristic);
    }

    #[test]
    fn certification_spot_value_matches_cauchy_bound() {
        // at x = (1/2, 0): |1/psi| = 4 <= 2 |x1|^-2 = 8
        let psi = axis_psi(2);
        let x = [q(1, 2), qi(0)];
        let v = psi.eval(&x).unwrap();
        assert_eq!(v, q(1, 4));
        let recip = series::reciprocal(&series::recenter(&psi, &x, 0).unwrap(), 0).unwrap();
        assert_eq!(*recip.coeff(&MultiIndex(alloc::vec![0, 0])).unwrap(), qi(4));
    }

    #[test]
    fn certification_rejects_small_k_and_wide_grids() {
        let mut m = WeightSequence::gevrey(1.0, 0.0).unwrap();
        assert!(certify_hyperplane_product(1, &mut m, 1.0, &certify_grid(), 6).is_err());
        let wide = GridBox::new(alloc::vec![
            AxisGrid::new(q(1, 2), qi(2), 4, Spacing::Linear).unwrap(),
            AxisGrid::new(q(-1, 2), q(1, 2), 3, Spacing::Linear).unwrap(),
        ])
        .unwrap();
        assert!(certify_hyperplane_product(2, &mut m, 1.0, &wide, 6).is_err());
    }

    #[test]
    fn classical_fit_quartic_axis_exponent() {
        let psi = axis_psi(2);
        let probe = GridBox::new(alloc::vec![
            AxisGrid::new(q(-1, 2), q(1, 2), 5, Spacing::Linear).unwrap(),
            AxisGrid::new(q(-1, 2), q(1, 2), 5, Spacing::Linear).unwrap(),
        ])
        .unwrap();
        let f = TestFunction::new(
            psi,
            ZeroSet::points(alloc::vec![alloc::vec![qi(0), qi(0)]]).unwrap(),
            &probe,
        )
        .unwrap();
        // grid must include axis points (0, t), where |psi| = dist^4
        let grid = GridBox::new(alloc::vec![
            AxisGrid::new(q(-1, 2), q(1, 2), 9, Spacing::Linear).unwrap(),
            AxisGrid::new(q(-1, 2), q(1, 2), 9, Spacing::Linear).unwrap(),
        ])
        .unwrap();
        let fit = classical_loja_fit(&f, &grid).unwrap();
        assert!((fit.nu - 4.0).abs() < 1e-9, "nu = {}", fit.nu);
        assert!((fit.c - 1.0).abs() < 1e-9, "c = {}", fit.c);
        assert!(fit.binding_count >= 1);
        assert!(fit.skipped >= 1); // the origin
    }

    #[test]
    fn classical_fit_hyperplane_is_exact_identity() {
        let f = x1_fn();
        let grid = GridBox::new(alloc::vec![
            AxisGrid::new(q(1, 16), q(1, 2), 6, Spacing::Geometric).unwrap(),
            AxisGrid::new(q(-1, 4), q(1, 4), 3, Spacing::Linear).unwrap(),
        ])
        .unwrap();
        let fit = classical_loja_fit(&f, &grid).unwrap();
        assert!((fit.nu - 1.0).abs() < 1e-12);
        assert!((fit.c - 1.0).abs() < 1e-9);
        assert!(fit.residual_rms < 1e-9);
    }

    #[test]
    fn classical_fit_requires_usable_points() {
        let f = x1_fn();
        let far = GridBox::new(alloc::vec![
            AxisGrid::new(qi(2), qi(3), 2, Spacing::Linear).unwrap(),
            AxisGrid::new(qi(0), qi(1), 2, Spacing::Linear).unwrap(),
        ])
        .unwrap();
        assert!(matches!(
            classical_loja_fit(&f, &far),
            Err(LojaError::AllPointsOnZeroSet)
        ));
    }

    #[test]
    fn headline_contrast_between_classical_and_probe() {
        // the quartic-axis weight passes the classical power-law fit yet the
        // probe diverges: the power law does not imply the weighted bound
        let mut m = WeightSequence::gevrey(1.0, 0.0).unwrap();
        let probe = axis_probe(2, &mut m, 1.0, &[1.0, 2.0, 4.0], &t_halving((1, 4), 4)).unwrap();
        assert_eq!(probe.verdict, Verdict::Diverging);

        let psi = axis_psi(2);
        let vprobe = GridBox::new(alloc::vec![
            AxisGrid::new(q(-1, 2), q(1, 2), 5, Spacing::Linear).unwrap(),
            AxisGrid::new(q(-1, 2), q(1, 2), 5, Spacing::Linear).unwrap(),
        ])
        .unwrap();
        let f = TestFunction::new(
            psi,
            ZeroSet::points(alloc::vec![alloc::vec![qi(0), qi(0)]]).unwrap(),
            &vprobe,
        )
        .unwrap();
        let grid = GridBox::new(alloc::vec![
            AxisGrid::new(q(-1, 2), q(1, 2), 9, Spacing::Linear).unwrap(),
            AxisGrid::new(q(-1, 2), q(1, 2), 9, Spacing::Linear).unwrap(),
        ])
        .unwrap();
        let classical = classical_loja_fit(&f, &grid).unwrap();
        assert!(classical.nu.is_finite() && classical.c > 0.0);
    }
}
