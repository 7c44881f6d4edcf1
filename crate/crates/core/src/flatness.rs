//! Model flat functions f(x) = exp(-x^(-1/alpha)) with exact derivative
//! polynomials, and envelope fits for their derivative and quotient bounds.
//!
//! Every derivative has the shape f^(j)(x) = P_j(u) e^(-u) with u = x^(-1/alpha)
//! and P_j rational. The tables are exact; floats enter only through the final
//! log-magnitude and through the weight-sequence side of a bound.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::assoc;
use crate::math;
use crate::weights::WeightSequence;

#[derive(Clone, Debug, PartialEq)]
pub enum FlatError {
    /// alpha must be a positive integer for the recurrence to stay rational.
    BadAlpha,
    NonpositiveSample,
    /// x^(-1/alpha) is irrational at this sample; pick perfect alpha-th powers.
    IrrationalPowerAtSample,
    EmptyInput { what: &'static str },
    NoFitInLadder { ladder_len: usize, min_violation: f64 },
}

impl core::fmt::Display for FlatError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            FlatError::BadAlpha => write!(f, "alpha must be a positive integer"),
            FlatError::NonpositiveSample => write!(f, "sample points must be positive"),
            FlatError::IrrationalPowerAtSample => {
                write!(f, "x^(-1/alpha) is irrational at a sample point")
            }
            FlatError::EmptyInput { what } => write!(f, "{what} must be nonempty"),
            FlatError::NoFitInLadder { ladder_len, min_violation } => write!(
                f,
                "no ladder entry fits ({ladder_len} candidates, best log-violation {min_violation:.3})"
            ),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for FlatError {}

/// A real carried as sign and log-magnitude. `sign == 0` means exact zero
/// (with `ln_abs` negative infinity).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogSigned {
    pub sign: i8,
    pub ln_abs: f64,
}

/// Derivative tables for f(x) = exp(-x^(-1/alpha)) (x > 0; 0 for x <= 0).
///
/// `polys[j]` holds P_j with f^(j)(x) = P_j(u) e^(-u), P_0 = 1, and
/// P_{j+1} = (1/alpha) u^(alpha+1) (P_j - P_j'), which is the chain rule for
/// du/dx = -(1/alpha) u^(alpha+1). `quot_polys[p]` holds the same table
/// seeded at u^alpha = 1/x, so D^(p,0)(f/x1) = Q_p(u) e^(-u).
pub struct FlatModel {
    alpha: u32,
    polys: Vec<Vec<BigRational>>,
    quot_polys: Vec<Vec<BigRational>>,
}

/// Applies the derivative recurrence once: (1/alpha) u^(alpha+1) (p - p').
fn advance(p: &[BigRational], alpha: u32) -> Vec<BigRational> {
    let a = alpha as usize;
    let inv_a = BigRational::new(BigInt::one(), BigInt::from(alpha));
    let mut out = alloc::vec![BigRational::zero(); p.len() + a + 1];
    for k in 0..p.len() {
        let mut r = p[k].clone();
        if k + 1 < p.len() {
            r -= &p[k + 1] * BigRational::from_integer(BigInt::from((k + 1) as u64));
        }
        out[k + a + 1] = r * &inv_a;
    }
    out
}

impl FlatModel {
    pub fn new(alpha: u32) -> Result<Self, FlatError> {
        if alpha == 0 {
            return Err(FlatError::BadAlpha);
        }
        let mut q0 = alloc::vec![BigRational::zero(); alpha as usize + 1];
        q0[alpha as usize] = BigRational::one();
        Ok(FlatModel {
            alpha,
            polys: alloc::vec![alloc::vec![BigRational::one()]],
            quot_polys: alloc::vec![q0],
        })
    }

    pub fn alpha(&self) -> u32 {
        self.alpha
    }

    /// P_j as a dense coefficient vector in u (index = power).
    pub fn poly(&mut self, j: u64) -> &[BigRational] {
        let j = j as usize;
        while self.polys.len() <= j {
            let next = advance(self.polys.last().expect("seeded"), self.alpha);
            self.polys.push(next);
        }
        &self.polys[j]
    }

    /// Q_p for the quotient f/x1, same recurrence seeded at Q_0 = u^alpha.
    pub fn quotient_poly(&mut self, p: u64) -> &[BigRational] {
        let p = p as usize;
        while self.quot_polys.len() <= p {
            let next = advance(self.quot_polys.last().expect("seeded"), self.alpha);
            self.quot_polys.push(next);
        }
        &self.quot_polys[p]
    }

    /// u = x^(-1/alpha) as an exact rational, or an error when it is not one.
    pub fn u_at(&self, x: &BigRational) -> Result<BigRational, FlatError> {
        if !x.is_positive() {
            return Err(FlatError::NonpositiveSample);
        }
        // x = n/d reduced, so u^alpha = d/n and both parts must be
        // perfect alpha-th powers
        let n = x.numer().magnitude();
        let d = x.denom().magnitude();
        if self.alpha == 1 {
            return Ok(BigRational::new(
                BigInt::from(d.clone()),
                BigInt::from(n.clone()),
            ));
        }
        let rn = d.nth_root(self.alpha);
        let rd = n.nth_root(self.alpha);
        if rn.pow(self.alpha) != *d || rd.pow(self.alpha) != *n {
            return Err(FlatError::IrrationalPowerAtSample);
        }
        Ok(BigRational::new(BigInt::from(rn), BigInt::from(rd)))
    }

    /// f^(j)(x) as sign and log-magnitude, exact up to the final float step.
    pub fn derivative_at(&mut self, j: u64, x: &BigRational) -> Result<LogSigned, FlatError> {
        let u = self.u_at(x)?;
        Ok(IntPoly::new(self.poly(j)).log_eval(&u))
    }

    /// D^(p,q)(f/x1) at (x1, anything): zero for q >= 1 since the quotient
    /// does not depend on x2.
    pub fn quotient_derivative_at(
        &mut self,
        p: u64,
        q: u64,
        x1: &BigRational,
    ) -> Result<LogSigned, FlatError> {
        if q >= 1 {
            return Ok(LogSigned { sign: 0, ln_abs: f64::NEG_INFINITY });
        }
        let u = self.u_at(x1)?;
        Ok(IntPoly::new(self.quotient_poly(p)).log_eval(&u))
    }
}

/// Cleared-denominator form of a rational polynomial, for repeated
/// log-magnitude evaluation without per-step gcd reduction.
struct IntPoly {
    coeffs: Vec<BigInt>,
    ln_den: f64,
}

impl IntPoly {
    fn new(poly: &[BigRational]) -> IntPoly {
        let mut den = BigInt::one();
        for c in poly {
            den = num_integer::Integer::lcm(&den, c.denom());
        }
        let coeffs = poly.iter().map(|c| c.numer() * (&den / c.denom())).collect();
        IntPoly { coeffs, ln_den: math::ln_bigint_abs(&den) }
    }

    /// P(u) e^(-u) at rational u as sign and log-magnitude. Integer Horner
    /// over the scaled numerator; only the final magnitude goes to floats.
    fn log_eval(&self, u: &BigRational) -> LogSigned {
        if self.coeffs.is_empty() {
            return LogSigned { sign: 0, ln_abs: f64::NEG_INFINITY };
        }
        let (p, q) = (u.numer(), u.denom());
        let deg = self.coeffs.len() - 1;
        let mut acc = self.coeffs[deg].clone();
        let mut qpow = BigInt::one();
        for j in (0..deg).rev() {
            qpow *= q;
            acc = acc * p + &self.coeffs[j] * &qpow;
        }
        if acc.is_zero() {
            return LogSigned { sign: 0, ln_abs: f64::NEG_INFINITY };
        }
        let sign = if acc.is_negative() { -1 } else { 1 };
        let ln_abs = math::ln_bigint_abs(&acc)
            - self.ln_den
            - deg as f64 * math::ln_bigint_abs(q)
            - math::big_rational_to_f64(u);
        LogSigned { sign, ln_abs }
    }
}

/// Leibniz assembly of D^(p,0)(f/x1) as a polynomial in u:
/// sum over i of C(p,i) P_i(u) times the (p-i)-th derivative of 1/x1,
/// rewritten through x1 = u^(-alpha). Equals `quotient_poly(p)` exactly;
/// kept as an independent construction for cross-checks.
pub fn quotient_poly_by_leibniz(model: &mut FlatModel, p: u64) -> Vec<BigRational> {
    let alpha = model.alpha as usize;
    let deg = p as usize * (alpha + 1) + alpha;
    let mut out = alloc::vec![BigRational::zero(); deg + 1];
    let mut binom = BigInt::one();
    let mut fact = BigInt::one(); // (p - i)! running value
    for k in 1..=p {
        fact *= BigInt::from(k);
    }
    for i in 0..=p {
        // C(p,i) * (-1)^(p-i) * (p-i)! * u^(alpha (p-i+1)) * P_i(u)
        let sign = if (p - i) % 2 == 0 { BigInt::one() } else { -BigInt::one() };
        let scale = BigRational::from_integer(&binom * &fact * sign);
        let shift = alpha * (p - i + 1) as usize;
        let poly: Vec<BigRational> = model.poly(i).to_vec();
        for (k, c) in poly.iter().enumerate() {
            if !c.is_zero() {
                out[k + shift] += c * &scale;
            }
        }
        // C(p,i+1) = C(p,i)(p-i)/(i+1); (p-i-1)! = (p-i)!/(p-i)
        if i < p {
            binom = binom * BigInt::from(p - i) / BigInt::from(i + 1);
            fact /= BigInt::from(p - i);
        }
    }
    out
}

/// Conservative float slack: the left side is inflated by this relative
/// amount before comparing against the envelope.
const BOUND_SLACK: f64 = 1e-9;

/// A tested (point, order) pair with the least envelope headroom.
#[derive(Clone, Debug)]
pub struct Binding {
    pub x: BigRational,
    pub order: u64,
    pub lhs_ln: f64,
    pub rhs_ln: f64,
}

/// Fitted constants for the derivative bound
/// |f^(i)(x)| <= c1 c2^i i! M_i h_M(c2 x).
#[derive(Clone, Debug)]
pub struct FlatFit {
    pub c1: f64,
    pub c2: f64,
    pub i_max: u64,
    pub grid_len: usize,
    pub binding: Binding,
}

/// Fitted constants for the quotient bound
/// |D^(p,0)(f/x1)(x)| <= c5 c6^p p! M_p h_M(c3 x).
#[derive(Clone, Debug)]
pub struct QuotientFit {
    pub c3: f64,
    pub c5: f64,
    pub c6: f64,
    pub p_max: u64,
    pub grid_len: usize,
    pub binding: Binding,
}

fn check_positive_grid(x_grid: &[BigRational]) -> Result<(), FlatError> {
    if x_grid.is_empty() {
        return Err(FlatError::EmptyInput { what: "x grid" });
    }
    if x_grid.iter().any(|x| !x.is_positive()) {
        return Err(FlatError::NonpositiveSample);
    }
    Ok(())
}

fn check_ladder(ladder: &[f64]) -> Result<(), FlatError> {
    if ladder.is_empty() {
        return Err(FlatError::EmptyInput { what: "constant ladder" });
    }
    Ok(())
}

fn lhs_with_slack(l: f64) -> f64 {
    l + BOUND_SLACK * math::fabs(l).max(1.0)
}

struct EnvelopeScan {
    /// max over (order, point) of lhs - (order-independent rhs parts)
    residual: f64,
    binding: Binding,
}

/// Largest residual ln|value| - (ln scale^order + ln order! + ln M_order +
/// ln h(dist_scale * x)) over the precomputed table.
fn scan_envelope(
    m: &mut WeightSequence,
    lhs: &[Vec<f64>],
    orders_fact_logm: &[f64],
    x_grid: &[BigRational],
    x_f: &[f64],
    ln_scale: f64,
    dist_scale: f64,
) -> EnvelopeScan {
    let mut residual = f64::NEG_INFINITY;
    let mut binding = Binding {
        x: x_grid[0].clone(),
        order: 0,
        lhs_ln: f64::NEG_INFINITY,
        rhs_ln: f64::NEG_INFINITY,
    };
    for (gi, xv) in x_f.iter().enumerate() {
        let lnh = assoc::hm_eval(m, dist_scale * xv).log_h;
        for (order, row) in lhs.iter().enumerate() {
            let l = row[gi];
            if l == f64::NEG_INFINITY {
                continue;
            }
            let fixed = orders_fact_logm[order] + order as f64 * ln_scale + lnh;
            let r = lhs_with_slack(l) - fixed;
            if r > residual {
                residual = r;
                binding = Binding {
                    x: x_grid[gi].clone(),
                    order: order as u64,
                    lhs_ln: l,
                    rhs_ln: fixed,
                };
            }
        }
    }
    EnvelopeScan { residual, binding }
}

/// Fits (c1, c2) from the ladder so the derivative bound holds at every grid
/// point and order up to i_max. Candidates are tried in ladder order, c2
/// outermost, and the first passing pair wins.
pub fn check_flat_bound(
    model: &mut FlatModel,
    m: &mut WeightSequence,
    x_grid: &[BigRational],
    i_max: u64,
    ladder: &[f64],
) -> Result<FlatFit, FlatError> {
    check_positive_grid(x_grid)?;
    check_ladder(ladder)?;

    let mut lhs = Vec::with_capacity(i_max as usize + 1);
    let us: Result<Vec<BigRational>, FlatError> =
        x_grid.iter().map(|x| model.u_at(x)).collect();
    let us = us?;
    for i in 0..=i_max {
        let poly = IntPoly::new(model.poly(i));
        let row: Vec<f64> = us.iter().map(|u| poly.log_eval(u).ln_abs).collect();
        lhs.push(row);
    }
    let x_f: Vec<f64> = x_grid.iter().map(math::big_rational_to_f64).collect();
    let mut lf = math::LogFactorial::new();
    let fixed: Vec<f64> = (0..=i_max).map(|i| lf.get(i) + m.log_m(i)).collect();

    let mut min_violation = f64::INFINITY;
    for &c2 in ladder {
        let scan = scan_envelope(m, &lhs, &fixed, x_grid, &x_f, math::ln(c2), c2);
        for &c1 in ladder {
            let viol = scan.residual - math::ln(c1);
            if viol <= 0.0 {
                let mut binding = scan.binding.clone();
                binding.rhs_ln += math::ln(c1);
                return Ok(FlatFit { c1, c2, i_max, grid_len: x_grid.len(), binding });
            }
            min_violation = min_violation.min(viol);
        }
    }
    Err(FlatError::NoFitInLadder { ladder_len: ladder.len(), min_violation })
}

/// Fits (c3, c5, c6) from the ladder so the quotient bound holds for
/// |P| <= p_max on the grid. Candidate order: c3, then c6, then c5; the first
/// passing triple wins.
pub fn check_quotient_bound(
    model: &mut FlatModel,
    m: &mut WeightSequence,
    x_grid: &[BigRational],
    p_max: u64,
    ladder: &[f64],
) -> Result<QuotientFit, FlatError> {
    check_positive_grid(x_grid)?;
    check_ladder(ladder)?;

    let us: Result<Vec<BigRational>, FlatError> =
        x_grid.iter().map(|x| model.u_at(x)).collect();
    let us = us?;
    let mut lhs = Vec::with_capacity(p_max as usize + 1);
    for p in 0..=p_max {
        let poly = IntPoly::new(model.quotient_poly(p));
        let row: Vec<f64> = us.iter().map(|u| poly.log_eval(u).ln_abs).collect();
        lhs.push(row);
    }
    let x_f: Vec<f64> = x_grid.iter().map(math::big_rational_to_f64).collect();
    let mut lf = math::LogFactorial::new();
    let fixed: Vec<f64> = (0..=p_max).map(|p| lf.get(p) + m.log_m(p)).collect();

    let mut min_violation = f64::INFINITY;
    for &c3 in ladder {
        for &c6 in ladder {
            let scan = scan_envelope(m, &lhs, &fixed, x_grid, &x_f, math::ln(c6), c3);
            for &c5 in ladder {
                let viol = scan.residual - math::ln(c5);
                if viol <= 0.0 {
                    let mut binding = scan.binding.clone();
                    binding.rhs_ln += math::ln(c5);
                    return Ok(QuotientFit {
                        c3,
                        c5,
                        c6,
                        p_max,
                        grid_len: x_grid.len(),
                        binding,
                    });
                }
                min_violation = min_violation.min(viol);
            }
        }
    }
    Err(FlatError::NoFitInLadder { ladder_len: ladder.len(), min_violation })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::WeightKind;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn qi(v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }

    fn upoly(coeffs: &[i64]) -> Vec<BigRational> {
        coeffs.iter().map(|&c| qi(c)).collect()
    }

    #[test]
    fn first_polys_match_hand_computation() {
        let mut m = FlatModel::new(1).unwrap();
        assert_eq!(m.poly(0), &upoly(&[1])[..]);
        assert_eq!(m.poly(1), &upoly(&[0, 0, 1])[..]); // u^2
        assert_eq!(m.poly(2), &upoly(&[0, 0, 0, -2, 1])[..]); // u^4 - 2u^3
    }

    /// Differentiates c u^k e^(-u) term by term:
    /// (c/alpha)(u^(k+alpha+1) - k u^(k+alpha)) e^(-u).
    fn differentiate_termwise(p: &[BigRational], alpha: u32) -> Vec<BigRational> {
        let a = alpha as usize;
        let mut out = alloc::vec![BigRational::zero(); p.len() + a + 1];
        let inv_a = BigRational::new(BigInt::one(), BigInt::from(alpha));
        for (k, c) in p.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            out[k + a + 1] += c * &inv_a;
            out[k + a] -= c * &inv_a * BigRational::from_integer(BigInt::from(k as u64));
        }
        out
    }

    #[test]
    fn recurrence_matches_termwise_differentiation() {
        for alpha in [1u32, 2, 3] {
            let mut m = FlatModel::new(alpha).unwrap();
            for j in 0..10u64 {
                let direct = differentiate_termwise(m.poly(j), alpha);
                assert_eq!(m.poly(j + 1), &direct[..], "alpha={alpha} j={j}");
            }
        }
    }

    #[test]
    fn degree_and_valuation_for_alpha_one() {
        let mut m = FlatModel::new(1).unwrap();
        for j in 1..=50u64 {
            let p = m.poly(j).to_vec();
            assert_eq!(p.len() - 1, 2 * j as usize, "deg P_{j}");
            assert!(!p.last().unwrap().is_zero());
            let val = p.iter().position(|c| !c.is_zero()).unwrap();
            assert_eq!(val, j as usize + 1, "valuation of P_{j}");
        }
    }

    #[test]
    fn derivative_values_match_closed_forms() {
        let mut m = FlatModel::new(1).unwrap();
        // f'(x) = x^(-2) e^(-1/x) at x = 1/3: ln = ln 9 - 3
        let d = m.derivative_at(1, &q(1, 3)).unwrap();
        assert_eq!(d.sign, 1);
        assert!((d.ln_abs - (math::ln(9.0) - 3.0)).abs() < 1e-12);
        // f''(x) = (u^4 - 2u^3) e^(-u) vanishes at u = 2, i.e. x = 1/2
        let d2 = m.derivative_at(2, &q(1, 2)).unwrap();
        assert_eq!(d2.sign, 0);
        assert_eq!(d2.ln_abs, f64::NEG_INFINITY);
        // and is positive at x = 1/4: P_2(4) = 128
        let d3 = m.derivative_at(2, &q(1, 4)).unwrap();
        assert_eq!(d3.sign, 1);
        assert!((d3.ln_abs - (math::ln(128.0) - 4.0)).abs() < 1e-12);
    }

    #[test]
    fn alpha_two_needs_perfect_squares() {
        let mut m = FlatModel::new(2).unwrap();
        let d = m.derivative_at(1, &q(1, 4)).unwrap(); // u = 2
        assert_eq!(d.sign, 1);
        assert_eq!(m.u_at(&q(1, 4)).unwrap(), qi(2));
        assert_eq!(m.u_at(&q(4, 9)).unwrap(), q(3, 2));
        assert_eq!(m.derivative_at(1, &q(1, 3)), Err(FlatError::IrrationalPowerAtSample));
        assert_eq!(m.derivative_at(0, &q(-1, 4)), Err(FlatError::NonpositiveSample));
    }

    #[test]
    fn log_magnitude_sinks_to_minus_infinity_at_zero() {
        let mut m = FlatModel::new(1).unwrap();
        let mut prev = f64::INFINITY;
        for k in 4..=30 {
            let x = BigRational::new(BigInt::one(), BigInt::one() << k);
            let d = m.derivative_at(3, &x).unwrap();
            assert!(d.ln_abs < prev, "not sinking at k={k}");
            prev = d.ln_abs;
        }
        assert!(prev < -1e8);
    }

    fn dyadic_ladder(kmax: u64) -> Vec<BigRational> {
        (1..=kmax)
            .map(|k| BigRational::new(BigInt::one(), BigInt::one() << k))
            .collect()
    }

    #[test]
    fn flat_bound_fits_factorial_weights() {
        let mut model = FlatModel::new(1).unwrap();
        let mut m = WeightSequence::gevrey(1.0, 0.0).unwrap();
        let grid = dyadic_ladder(24);
        let ladder = [0.5, 1.0, 2.0, 4.0, 8.0, 16.0];
        let fit = check_flat_bound(&mut model, &mut m, &grid, 8, &ladder).unwrap();
        assert!(fit.c1 > 0.0 && fit.c2 > 0.0);
        assert_eq!(fit.grid_len, 24);
        assert!(fit.binding.lhs_ln <= fit.binding.rhs_ln);
        // saturation: h = 1 once the scaled distance passes 1
        assert_eq!(assoc::hm_eval(&mut m, 2.0).log_h, 0.0);
        // re-check the bound at the binding point from scratch
        let d = model.derivative_at(fit.binding.order, &fit.binding.x).unwrap();
        let mut lf = math::LogFactorial::new();
        let rhs = math::ln(fit.c1)
            + fit.binding.order as f64 * math::ln(fit.c2)
            + lf.get(fit.binding.order)
            + m.log_m(fit.binding.order)
            + assoc::hm_eval(&mut m, fit.c2 * math::big_rational_to_f64(&fit.binding.x)).log_h;
        assert!(d.ln_abs <= rhs + 1e-9 * rhs.abs().max(1.0));
    }

    #[test]
    fn flat_bound_reports_no_fit_for_tiny_ladder() {
        let mut model = FlatModel::new(1).unwrap();
        let mut m = WeightSequence::gevrey(1.0, 0.0).unwrap();
        let grid = dyadic_ladder(8);
        let err = check_flat_bound(&mut model, &mut m, &grid, 4, &[1e-6]).unwrap_err();
        match err {
            FlatError::NoFitInLadder { ladder_len, min_violation } => {
                assert_eq!(ladder_len, 1);
                assert!(min_violation > 0.0);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn quotient_leibniz_matches_recurrence() {
        for alpha in [1u32, 2] {
            let mut m = FlatModel::new(alpha).unwrap();
            for p in 0..=8u64 {
                let via_leibniz = quotient_poly_by_leibniz(&mut m, p);
                let via_recurrence = m.quotient_poly(p).to_vec();
                let top = via_leibniz.len().max(via_recurrence.len());
                for k in 0..top {
                    let a = via_leibniz.get(k).cloned().unwrap_or_else(BigRational::zero);
                    let b = via_recurrence.get(k).cloned().unwrap_or_else(BigRational::zero);
                    assert_eq!(a, b, "alpha={alpha} p={p} power={k}");
                }
            }
        }
    }

    #[test]
    fn quotient_seed_is_reciprocal_of_x() {
        let mut m = FlatModel::new(1).unwrap();
        // Q_0 = u means f/x1 = u e^(-u); at x = 1/3, u = 3
        let d = m.quotient_derivative_at(0, 0, &q(1, 3)).unwrap();
        assert_eq!(d.sign, 1);
        assert!((d.ln_abs - (math::ln(3.0) - 3.0)).abs() < 1e-12);
    }

    #[test]
    fn x2_derivatives_vanish_structurally() {
        let mut m = FlatModel::new(1).unwrap();
        for p in 0..4 {
            for qq in 1..4 {
                let d = m.quotient_derivative_at(p, qq, &q(1, 5)).unwrap();
                assert_eq!(d.sign, 0);
                assert_eq!(d.ln_abs, f64::NEG_INFINITY);
            }
        }
    }

    #[test]
    fn quotient_bound_fits_factorial_weights() {
        let mut model = FlatModel::new(1).unwrap();
        let mut m = WeightSequence::gevrey(1.0, 0.0).unwrap();
        let grid = dyadic_ladder(20);
        let ladder = [0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0];
        let fit = check_quotient_bound(&mut model, &mut m, &grid, 8, &ladder).unwrap();
        assert!(fit.c3 > 0.0 && fit.c5 > 0.0 && fit.c6 > 0.0);
        assert!(fit.binding.lhs_ln <= fit.binding.rhs_ln);
    }

    #[test]
    fn empty_inputs_are_rejected() {
        let mut model = FlatModel::new(1).unwrap();
        let mut m = WeightSequence::gevrey(1.0, 0.0).unwrap();
        assert_eq!(
            check_flat_bound(&mut model, &mut m, &[], 2, &[1.0]).unwrap_err(),
            FlatError::EmptyInput { what: "x grid" }
        );
        assert_eq!(
            check_flat_bound(&mut model, &mut m, &[qi(1)], 2, &[]).unwrap_err(),
            FlatError::EmptyInput { what: "constant ladder" }
        );
        assert!(FlatModel::new(0).is_err());
    }

    #[test]
    fn fit_survives_grid_refinement() {
        let mut model = FlatModel::new(1).unwrap();
        let mut m = WeightSequence::gevrey(1.0, 0.0).unwrap();
        let ladder = [0.5, 1.0, 2.0, 4.0, 8.0, 16.0];
        let coarse = check_flat_bound(&mut model, &mut m, &dyadic_ladder(12), 6, &ladder).unwrap();
        // denser and deeper grid: the same pair must still pass (depth stays
        // above the weight-table ceiling for the scaled distances)
        let fine: Vec<BigRational> = (1..=26)
            .flat_map(|k| {
                [
                    BigRational::new(BigInt::one(), BigInt::one() << k),
                    BigRational::new(BigInt::from(3), BigInt::one() << (k + 1)),
                ]
            })
            .collect();
        let refit = check_flat_bound(&mut model, &mut m, &fine, 6, &[coarse.c2, coarse.c1])
            .map(|f| (f.c1, f.c2));
        match refit {
            Ok((c1, c2)) => {
                assert!(c1 <= coarse.c1.max(coarse.c2));
                assert!(c2 <= coarse.c2.max(coarse.c1));
            }
            Err(e) => panic!("coarse fit failed on refinement: {e}"),
        }
    }
}
