//! Weight sequences in the log domain.
//!
//! A weight sequence M = (M_j) with M_0 = 1 is represented through ln M_j and
//! the ratio table r_j = ln(M_{j+1}/M_j). Two kinds are supported:
//!
//! - Gevrey-type, M_j = j!^alpha * (ln(j+e))^(beta*j). Entries come from a
//!   lazily grown table of log-factorial partial sums: dense up to 2^20, then
//!   checkpointed every 4096 indices so that queries billions of indices out
//!   stay affordable. Ratios have a closed form and cost O(1).
//! - Explicit finite tables, validated eagerly at construction.
//!
//! All logs route through [`crate::math`], and the partial sums advance
//! through a single restartable stream rule, so independently built tables
//! (and block fills vs. single queries) agree bit for bit.

use alloc::vec::Vec;

use num_rational::BigRational;
use num_traits::FromPrimitive;

use crate::math::{self, LnStream};

/// Dense partial-sum table length. Equals [`math::EXACT_LN_THRESHOLD`] so
/// every dense index can restart a stream directly from libm's ln.
const DENSE_LEN: u64 = math::EXACT_LN_THRESHOLD;
const CKPT_STRIDE: u64 = 4096;
/// Hard ceiling on table growth; queries beyond this panic rather than
/// exhausting memory.
const MAX_INDEX: u64 = 1 << 33;

/// Slack for validity verdicts on float comparisons where analytic equality
/// is possible.
pub const CHECK_REL_TOL: f64 = 1e-9;
/// Tighter slack used during construction of log-domain tables.
const BUILD_REL_TOL: f64 = 1e-12;

#[inline]
fn slack(tol: f64, a: f64, b: f64) -> f64 {
    tol * math::fabs(a).max(math::fabs(b)).max(1.0)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WeightError {
    /// M_0 != 1.
    NonNormalized,
    /// First index j with M_{j+1} < M_j.
    NotIncreasing { index: usize },
    /// First index j with M_{j+1}/M_j > M_{j+2}/M_{j+1}.
    NotLogConvex { index: usize },
    InvalidParameter { reason: &'static str },
}

impl core::fmt::Display for WeightError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            WeightError::NonNormalized => write!(f, "weight sequence must start at M_0 = 1"),
            WeightError::NotIncreasing { index } => {
                write!(f, "weight sequence decreases at index {index}")
            }
            WeightError::NotLogConvex { index } => {
                write!(f, "weight sequence is not log-convex at index {index}")
            }
            WeightError::InvalidParameter { reason } => write!(f, "invalid weights: {reason}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for WeightError {}

#[derive(Clone, Debug, PartialEq)]
pub enum WeightKind {
    /// M_j = j!^alpha * (ln(j+e))^(beta*j)
    Gevrey { alpha: f64, beta: f64 },
    /// Finite table given by the caller.
    Explicit,
}

enum Tables {
    Gevrey {
        alpha: f64,
        beta: f64,
        /// s_dense[j] = sum_{i<=j} ln i for j < DENSE_LEN, grown on demand.
        s_dense: Vec<f64>,
        /// Stream positioned at index s_dense.len() - 1.
        dense_stream: LnStream,
        /// ckpts[k] = (last_ln, sum) at index (DENSE_LEN - 1) + (k+1)*CKPT_STRIDE.
        ckpts: Vec<(f64, f64)>,
        /// Stream positioned at the last checkpoint (or unused until the
        /// dense table is full).
        ckpt_stream: LnStream,
    },
    Explicit {
        logm: Vec<f64>,
        ratios: Vec<f64>,
    },
}

/// A validated weight sequence.
pub struct WeightSequence {
    kind: WeightKind,
    tables: Tables,
}

/// ln ln (j + e)
#[inline]
fn ll(j: u64) -> f64 {
    math::ln(math::ln(j as f64 + math::E))
}

fn gevrey_ratio(alpha: f64, beta: f64, j: u64) -> f64 {
    let jf = j as f64;
    alpha * math::ln(jf + 1.0) + beta * ((jf + 1.0) * ll(j + 1) - jf * ll(j))
}

impl WeightSequence {
    /// Gevrey-type sequence M_j = j!^alpha * (ln(j+e))^(beta*j).
    ///
    /// Requires alpha > 0 and finite beta; monotonicity and log-convexity of
    /// the resulting ratio table are spot-checked on an initial window and
    /// rejected with the first offending index.
    pub fn gevrey(alpha: f64, beta: f64) -> Result<Self, WeightError> {
        if !alpha.is_finite() || alpha <= 0.0 {
            return Err(WeightError::InvalidParameter { reason: "alpha must be positive and finite" });
        }
        if !beta.is_finite() {
            return Err(WeightError::InvalidParameter { reason: "beta must be finite" });
        }
        let mut prev = gevrey_ratio(alpha, beta, 0);
        if prev < -slack(BUILD_REL_TOL, prev, 0.0) {
            return Err(WeightError::NotIncreasing { index: 0 });
        }
        for j in 1..=256u64 {
            let r = gevrey_ratio(alpha, beta, j);
            if r < -slack(BUILD_REL_TOL, r, 0.0) {
                return Err(WeightError::NotIncreasing { index: j as usize });
            }
            if r < prev - slack(BUILD_REL_TOL, r, prev) {
                return Err(WeightError::NotLogConvex { index: (j - 1) as usize });
            }
            prev = r;
        }
        Ok(WeightSequence {
            kind: WeightKind::Gevrey { alpha, beta },
            tables: Tables::Gevrey {
                alpha,
                beta,
                s_dense: alloc::vec![0.0],
                dense_stream: LnStream::new(),
                ckpts: Vec::new(),
                ckpt_stream: LnStream::new(),
            },
        })
    }

    /// Finite sequence from linear-scale values.
    ///
    /// Validation is exact: values are dyadic rationals, so monotonicity is
    /// compared directly and log-convexity via the cross product
    /// M_j * M_{j+2} >= M_{j+1}^2 in big-rational arithmetic.
    pub fn explicit(values: &[f64]) -> Result<Self, WeightError> {
        if values.is_empty() {
            return Err(WeightError::InvalidParameter { reason: "empty weight table" });
        }
        if values.iter().any(|v| !v.is_finite() || *v <= 0.0) {
            return Err(WeightError::InvalidParameter { reason: "weights must be finite and positive" });
        }
        if values[0] != 1.0 {
            return Err(WeightError::NonNormalized);
        }
        for j in 0..values.len() - 1 {
            if values[j + 1] < values[j] {
                return Err(WeightError::NotIncreasing { index: j });
            }
        }
        let exact: Vec<BigRational> = values
            .iter()
            .map(|v| BigRational::from_f64(*v).expect("finite f64 is rational"))
            .collect();
        for j in 0..exact.len().saturating_sub(2) {
            if &exact[j] * &exact[j + 2] < &exact[j + 1] * &exact[j + 1] {
                return Err(WeightError::NotLogConvex { index: j });
            }
        }
        let logm: Vec<f64> = values.iter().map(|v| math::ln(*v)).collect();
        let ratios = diffs(&logm);
        Ok(WeightSequence { kind: WeightKind::Explicit, tables: Tables::Explicit { logm, ratios } })
    }

    /// Finite sequence from log-scale values ln M_j, for weights whose linear
    /// values overflow f64 (e.g. ln M_j = j^2 ln 2).
    ///
    /// Log-convexity here is checked on the given logs with a small relative
    /// slack, since exact linear values are not available.
    pub fn from_log_values(log_values: &[f64]) -> Result<Self, WeightError> {
        if log_values.is_empty() {
            return Err(WeightError::InvalidParameter { reason: "empty weight table" });
        }
        if log_values.iter().any(|v| !v.is_finite()) {
            return Err(WeightError::InvalidParameter { reason: "log-weights must be finite" });
        }
        if log_values[0] != 0.0 {
            return Err(WeightError::NonNormalized);
        }
        let ratios = diffs(log_values);
        for (j, r) in ratios.iter().enumerate() {
            if *r < -slack(BUILD_REL_TOL, *r, 0.0) {
                return Err(WeightError::NotIncreasing { index: j });
            }
        }
        for j in 0..ratios.len().saturating_sub(1) {
            if ratios[j + 1] < ratios[j] - slack(BUILD_REL_TOL, ratios[j + 1], ratios[j]) {
                return Err(WeightError::NotLogConvex { index: j });
            }
        }
        Ok(WeightSequence {
            kind: WeightKind::Explicit,
            tables: Tables::Explicit { logm: log_values.to_vec(), ratios },
        })
    }

    pub fn kind(&self) -> &WeightKind {
        &self.kind
    }

    /// Number of stored entries for explicit sequences; None when unbounded.
    pub fn len(&self) -> Option<u64> {
        match &self.tables {
            Tables::Gevrey { .. } => None,
            Tables::Explicit { logm, .. } => Some(logm.len() as u64),
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// ln M_j. Grows internal tables as needed; panics past the end of an
    /// explicit table or past the hard index ceiling.
    pub fn log_m(&mut self, j: u64) -> f64 {
        match &mut self.tables {
            Tables::Explicit { logm, .. } => {
                assert!((j as usize) < logm.len(), "index {j} past end of explicit weight table");
                logm[j as usize]
            }
            Tables::Gevrey { alpha, beta, .. } => {
                let (a, b) = (*alpha, *beta);
                let s = self.s_value(j);
                a * s + b * (j as f64) * ll(j)
            }
        }
    }

    /// ln(M_{j+1}/M_j). O(1) for Gevrey sequences (closed form).
    pub fn ratio(&mut self, j: u64) -> f64 {
        match &self.tables {
            Tables::Explicit { ratios, .. } => {
                assert!((j as usize) < ratios.len(), "ratio index {j} past end of explicit weight table");
                ratios[j as usize]
            }
            Tables::Gevrey { alpha, beta, .. } => gevrey_ratio(*alpha, *beta, j),
        }
    }

    /// Largest j for which [`Self::ratio`] is defined, when finite.
    pub fn ratio_len(&self) -> Option<u64> {
        match &self.tables {
            Tables::Gevrey { .. } => None,
            Tables::Explicit { ratios, .. } => Some(ratios.len() as u64),
        }
    }

    /// Fills `out[i] = ln M_{j0+i}`. Bitwise identical to calling
    /// [`Self::log_m`] per index, but amortizes table walks for long
    /// sequential sweeps.
    pub fn log_m_block(&mut self, j0: u64, out: &mut [f64]) {
        if out.is_empty() {
            return;
        }
        let j_end = j0 + (out.len() as u64 - 1);
        match &mut self.tables {
            Tables::Explicit { logm, .. } => {
                assert!((j_end as usize) < logm.len(), "block end {j_end} past end of explicit weight table");
                out.copy_from_slice(&logm[j0 as usize..=j_end as usize]);
            }
            Tables::Gevrey { alpha, beta, .. } => {
                let (a, b) = (*alpha, *beta);
                if j_end >= DENSE_LEN {
                    // push checkpoints across the whole span up front
                    self.grow_ckpts(Self::ckpt_count_for(j_end));
                }
                let mut cursor: Option<LnStream> = None;
                for (idx, j) in (j0..=j_end).enumerate() {
                    let s = if j < DENSE_LEN {
                        self.grow_dense(j);
                        match &self.tables {
                            Tables::Gevrey { s_dense, .. } => s_dense[j as usize],
                            _ => unreachable!(),
                        }
                    } else {
                        let st = match &mut cursor {
                            Some(st) if st.i() == j - 1 => st,
                            _ => {
                                cursor = Some(self.stream_at_or_before(j));
                                cursor.as_mut().unwrap()
                            }
                        };
                        while st.i() < j {
                            st.advance();
                        }
                        st.sum()
                    };
                    out[idx] = a * s + b * (j as f64) * ll(j);
                }
            }
        }
    }

    fn ckpt_count_for(j: u64) -> u64 {
        debug_assert!(j >= DENSE_LEN);
        (j - (DENSE_LEN - 1)) / CKPT_STRIDE
    }

    /// Partial sum S_j = sum_{i<=j} ln i.
    fn s_value(&mut self, j: u64) -> f64 {
        if j < DENSE_LEN {
            self.grow_dense(j);
            match &self.tables {
                Tables::Gevrey { s_dense, .. } => return s_dense[j as usize],
                _ => unreachable!(),
            }
        }
        let q = Self::ckpt_count_for(j);
        self.grow_ckpts(q);
        let mut st = self.stream_at_or_before(j);
        while st.i() < j {
            st.advance();
        }
        st.sum()
    }

    /// Restartable stream at the nearest stored state at or before j
    /// (dense boundary or a checkpoint). Requires checkpoints grown.
    fn stream_at_or_before(&self, j: u64) -> LnStream {
        debug_assert!(j >= DENSE_LEN);
        let base = DENSE_LEN - 1;
        let q = Self::ckpt_count_for(j);
        match &self.tables {
            Tables::Gevrey { s_dense, ckpts, .. } => {
                if q == 0 {
                    LnStream::restore(base, math::ln(base as f64), s_dense[base as usize])
                } else {
                    let (l, s) = ckpts[(q - 1) as usize];
                    LnStream::restore(base + q * CKPT_STRIDE, l, s)
                }
            }
            _ => unreachable!(),
        }
    }

    fn grow_dense(&mut self, j: u64) {
        debug_assert!(j < DENSE_LEN);
        match &mut self.tables {
            Tables::Gevrey { s_dense, dense_stream, .. } => {
                while (s_dense.len() as u64) <= j {
                    s_dense.push(dense_stream.advance());
                }
            }
            _ => unreachable!(),
        }
    }

    fn grow_ckpts(&mut self, q: u64) {
        assert!(
            DENSE_LEN - 1 + q * CKPT_STRIDE < MAX_INDEX,
            "weight index past supported ceiling ({MAX_INDEX})"
        );
        self.grow_dense(DENSE_LEN - 1);
        match &mut self.tables {
            Tables::Gevrey { s_dense, ckpts, ckpt_stream, .. } => {
                if ckpts.is_empty() && q > 0 && ckpt_stream.i() == 0 {
                    let base = DENSE_LEN - 1;
                    *ckpt_stream =
                        LnStream::restore(base, math::ln(base as f64), s_dense[base as usize]);
                }
                while (ckpts.len() as u64) < q {
                    for _ in 0..CKPT_STRIDE {
                        ckpt_stream.advance();
                    }
                    ckpts.push((ckpt_stream.last_ln(), ckpt_stream.sum()));
                }
            }
            _ => unreachable!(),
        }
    }
}

fn diffs(v: &[f64]) -> Vec<f64> {
    v.windows(2).map(|w| w[1] - w[0]).collect()
}

/// Diagnostics from [`check_regularity`].
#[derive(Clone, Debug)]
pub struct RegularityReport {
    /// Index range actually examined (clamped for explicit tables).
    pub tested_j_max: u64,
    /// M_0 = 1.
    pub normalized: bool,
    /// Ratios nondecreasing over the tested range.
    pub log_convex: bool,
    /// M_j * M_k <= M_{j+k} over the tested range.
    pub logprod_ok: bool,
    /// Least A >= 1 with M_{j+k} <= A^{j+k} M_j M_k over the tested range.
    pub moderate_growth_a: f64,
    /// Whether the constant above moved by less than x1.5 when the
    /// tested range was doubled to reach `tested_j_max`.
    pub moderate_growth_stable: bool,
    /// Least A with sum_{j>=k} M_j/((j+1) M_{j+1}) <= A M_k/M_{k+1} over
    /// k <= tested_j_max, including the tail estimate; None when the tail
    /// hypothesis could not be confirmed.
    pub snqa_a: Option<f64>,
    /// Where the tail sum was truncated.
    pub snqa_truncation: u64,
    /// Bound on the dropped tail.
    pub snqa_remainder: f64,
    /// Whether the quadratic-decay tail hypothesis held on the check window.
    pub snqa_tail_ok: bool,
    /// Partial sums of M_j/((j+1) M_{j+1}) for j = 0..=tested_j_max.
    pub qa_partial_sums: Vec<f64>,
}

/// Examines normalization, log-convexity, the product inequality, moderate
/// growth, and strong non-quasianalyticity over indices up to `j_max`
/// (clamped to the table length for explicit sequences; `j_max >= 2`).
///
/// The non-quasianalyticity sum is truncated at 4 * j_max; the dropped tail
/// is bounded by a_T * (T+1), which is valid when the terms a_j decay at
/// least like (j+1)^{-2}. That decay is verified on the window [T/2, T] and
/// reported in `snqa_tail_ok`; without it no constant is claimed.
pub fn check_regularity(m: &mut WeightSequence, j_max: u64) -> RegularityReport {
    assert!(j_max >= 2, "j_max must be at least 2");
    let jm = match m.len() {
        Some(len) => j_max.min(len - 1),
        None => j_max,
    };
    assert!(jm >= 2, "explicit table too short to examine (need M_0..M_2 and a ratio)");

    let logm: Vec<f64> = (0..=jm).map(|j| m.log_m(j)).collect();
    let normalized = logm[0] == 0.0;

    let ratio_end = match m.ratio_len() {
        Some(rl) => rl.min(4 * jm + 1),
        None => 4 * jm + 1,
    };
    let ratios: Vec<f64> = (0..ratio_end).map(|j| m.ratio(j)).collect();

    let mut log_convex = true;
    for j in 0..(jm.saturating_sub(1)) as usize {
        if j + 1 < ratios.len() && ratios[j + 1] < ratios[j] - slack(CHECK_REL_TOL, ratios[j + 1], ratios[j]) {
            log_convex = false;
            break;
        }
    }

    let mut logprod_ok = true;
    for s in 1..=jm as usize {
        for j in 0..=s / 2 {
            let lhs = logm[j] + logm[s - j];
            let rhs = logm[s];
            if lhs > rhs + slack(CHECK_REL_TOL, lhs, rhs) {
                logprod_ok = false;
            }
        }
    }
    // moderate growth over the full range and over the half range
    let a_of = |upto: usize, logm: &[f64]| -> f64 {
        let mut worst = 0.0f64;
        for s in 1..=upto {
            for j in 0..=s / 2 {
                let d = (logm[s] - logm[j] - logm[s - j]) / s as f64;
                if d > worst {
                    worst = d;
                }
            }
        }
        math::exp(worst)
    };
    let moderate_growth_a = a_of(jm as usize, &logm);
    let a_half = a_of((jm / 2).max(2) as usize, &logm);
    let moderate_growth_stable = moderate_growth_a <= 1.5 * a_half;

    // strong non-quasianalyticity: terms a_j = exp(-r_j) / (j+1)
    let t_end = ratio_end.saturating_sub(1);
    let terms: Vec<f64> = (0..=t_end).map(|j| math::exp(-ratios[j as usize]) / (j as f64 + 1.0)).collect();
    let mut qa_partial_sums = Vec::with_capacity(jm as usize + 1);
    let mut acc = 0.0f64;
    for &a in terms.iter().take(jm as usize + 1) {
        acc += a;
        qa_partial_sums.push(acc);
    }
    let mut snqa_tail_ok = t_end >= 2 * jm;
    let lo = t_end / 2;
    for j in lo..t_end {
        let cur = terms[j as usize] * ((j as f64 + 1.0) * (j as f64 + 1.0));
        let nxt = terms[j as usize + 1] * ((j as f64 + 2.0) * (j as f64 + 2.0));
        if nxt > cur * (1.0 + 1e-12) {
            snqa_tail_ok = false;
            break;
        }
    }
    let snqa_remainder = terms[t_end as usize] * (t_end as f64 + 1.0);
    let snqa_a = if snqa_tail_ok {
        // suffix sums over k <= jm
        let mut suffix = alloc::vec![0.0f64; t_end as usize + 2];
        for j in (0..=t_end as usize).rev() {
            suffix[j] = suffix[j + 1] + terms[j];
        }
        let mut worst = 0.0f64;
        for k in 0..=jm.min(ratios.len() as u64 - 1) as usize {
            let needed = (suffix[k] + snqa_remainder) * math::exp(ratios[k]);
            if needed > worst {
                worst = needed;
            }
        }
        Some(worst)
    } else {
        None
    };

    RegularityReport {
        tested_j_max: jm,
        normalized,
        log_convex,
        logprod_ok,
        moderate_growth_a,
        moderate_growth_stable,
        snqa_a,
        snqa_truncation: t_end,
        snqa_remainder,
        snqa_tail_ok,
        qa_partial_sums,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gevrey_rejects_bad_alpha() {
        assert!(matches!(
            WeightSequence::gevrey(0.0, 0.0),
            Err(WeightError::InvalidParameter { .. })
        ));
        assert!(matches!(
            WeightSequence::gevrey(-1.0, 0.0),
            Err(WeightError::InvalidParameter { .. })
        ));
        assert!(matches!(
            WeightSequence::gevrey(f64::NAN, 0.0),
            Err(WeightError::InvalidParameter { .. })
        ));
    }

    #[test]
    fn gevrey_rejects_strongly_negative_beta() {
        // ratio(0) = beta * lnln(1+e) < 0
        assert!(matches!(
            WeightSequence::gevrey(1.0, -10.0),
            Err(WeightError::NotIncreasing { index: 0 })
        ));
    }

    #[test]
    fn factorial_ratios_are_log_of_successors() {
        let mut m = WeightSequence::gevrey(1.0, 0.0).unwrap();
        for j in 0..40u64 {
            assert_eq!(m.ratio(j).to_bits(), math::ln(j as f64 + 1.0).to_bits());
        }
    }

    #[test]
    fn gevrey_two_matches_squared_factorial() {
        let mut m = WeightSequence::gevrey(2.0, 0.0).unwrap();
        let want = 2.0 * math::ln(6.0);
        let got = m.log_m(3);
        assert!((got - want).abs() <= 1e-12 * want.abs());
        assert_eq!(m.log_m(0), 0.0);
        assert_eq!(m.log_m(1), 0.0);
    }

    #[test]
    fn explicit_validation_errors_name_first_offender() {
        assert!(matches!(WeightSequence::explicit(&[2.0, 4.0]), Err(WeightError::NonNormalized)));
        assert!(matches!(
            WeightSequence::explicit(&[1.0, 2.0, 1.0]),
            Err(WeightError::NotIncreasing { index: 1 })
        ));
        assert!(matches!(
            WeightSequence::explicit(&[1.0, 1.0, 4.0, 8.0]),
            Err(WeightError::NotLogConvex { index: 1 })
        ));
    }

    #[test]
    fn explicit_geometric_sequence_is_accepted() {
        // equality cases in log-convexity must not be rejected by float noise
        let m = WeightSequence::explicit(&[1.0, 2.0, 4.0, 8.0, 16.0]).unwrap();
        assert_eq!(m.len(), Some(5));
    }

    #[test]
    fn explicit_factorials_accepted_and_indexed() {
        let mut m = WeightSequence::explicit(&[1.0, 1.0, 2.0, 6.0, 24.0]).unwrap();
        assert_eq!(m.log_m(0), 0.0);
        assert!((m.log_m(4) - math::ln(24.0)).abs() < 1e-14);
        assert!((m.ratio(3) - math::ln(4.0)).abs() < 1e-14);
    }

    #[test]
    fn log_values_constructor_checks_shape() {
        let logs: Vec<f64> = (0..20).map(|j| (j * j) as f64 * math::LN_2).collect();
        let m = WeightSequence::from_log_values(&logs).unwrap();
        assert_eq!(m.len(), Some(20));

        assert!(matches!(
            WeightSequence::from_log_values(&[1.0, 2.0]),
            Err(WeightError::NonNormalized)
        ));
        // logs [0, ln4, ln2]: decreasing step
        assert!(matches!(
            WeightSequence::from_log_values(&[0.0, 1.3862943611198906, 0.6931471805599453]),
            Err(WeightError::NotIncreasing { index: 1 }) | Err(WeightError::NotLogConvex { index: 0 })
        ));
    }

    #[test]
    fn block_fill_matches_single_queries() {
        let mut m = WeightSequence::gevrey(0.5, 0.25).unwrap();
        let mut buf = alloc::vec![0.0f64; 700];
        m.log_m_block(10, &mut buf);
        let mut m2 = WeightSequence::gevrey(0.5, 0.25).unwrap();
        for (i, &v) in buf.iter().enumerate() {
            assert_eq!(v.to_bits(), m2.log_m(10 + i as u64).to_bits(), "at {}", 10 + i);
        }
    }

    #[test]
    fn checkpoint_region_agrees_with_dense_rule() {
        let j = DENSE_LEN + 2 * CKPT_STRIDE + 137;
        let mut m = WeightSequence::gevrey(0.5, 0.0).unwrap();
        let direct = m.log_m(j);

        // block fill crossing the boundary must agree bitwise
        let start = DENSE_LEN - 4;
        let mut buf = alloc::vec![0.0f64; (j - start + 1) as usize];
        let mut m2 = WeightSequence::gevrey(0.5, 0.0).unwrap();
        m2.log_m_block(start, &mut buf);
        assert_eq!(buf[(j - start) as usize].to_bits(), direct.to_bits());

        // and a from-scratch instance must agree bitwise as well
        let mut m3 = WeightSequence::gevrey(0.5, 0.0).unwrap();
        assert_eq!(m3.log_m(j).to_bits(), direct.to_bits());
    }

    #[test]
    fn checkpoint_region_tracks_true_log_factorial() {
        // Stirling: ln j! = j ln j - j + 0.5 ln(2 pi j) + 1/(12 j) + O(j^-3)
        let j = DENSE_LEN + 12_345;
        let mut m = WeightSequence::gevrey(1.0, 0.0).unwrap();
        let got = m.log_m(j);
        let jf = j as f64;
        let stirling = jf * math::ln(jf) - jf
            + 0.5 * math::ln(2.0 * core::f64::consts::PI * jf)
            + 1.0 / (12.0 * jf);
        assert!(
            (got - stirling).abs() <= 1e-10 * stirling.abs(),
            "ln {j}! = {got} vs Stirling {stirling}"
        );
    }

    #[test]
    fn regularity_of_factorials() {
        let mut m = WeightSequence::gevrey(1.0, 0.0).unwrap();
        let rep = check_regularity(&mut m, 64);
        assert!(rep.normalized && rep.log_convex && rep.logprod_ok);
        assert!(rep.moderate_growth_a <= 2.0 + 1e-9, "A = {}", rep.moderate_growth_a);
        assert!(rep.moderate_growth_stable);
        assert!(rep.snqa_tail_ok);
        // sum of 1/(j+1)^2 = pi^2/6
        let a = rep.snqa_a.unwrap();
        let target = core::f64::consts::PI * core::f64::consts::PI / 6.0;
        assert!((a - target).abs() < 2e-2, "snqa constant {a} vs {target}");
        for w in rep.qa_partial_sums.windows(2) {
            assert!(w[1] >= w[0]);
        }
    }

    #[test]
    fn regularity_flags_super_gevrey_growth() {
        let logs: Vec<f64> = (0..=160).map(|j| (j * j) as f64 * math::LN_2).collect();
        let mut m = WeightSequence::from_log_values(&logs).unwrap();
        let rep = check_regularity(&mut m, 40);
        assert!(rep.normalized && rep.log_convex && rep.logprod_ok);
        // A grows like 2^(j/2) with the range; doubling is nowhere stable
        assert!(!rep.moderate_growth_stable, "A = {}", rep.moderate_growth_a);
        assert!(rep.moderate_growth_a > 1e3);
    }
}
