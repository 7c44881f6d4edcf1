//! Deterministic float kernels shared by every module.
//!
//! All transcendental evaluation goes through `libm`, never through the
//! platform math library, so results are identical across targets and across
//! `std`/`no_std` builds. Logarithms of big integers and rationals extract
//! the binary exponent exactly and only round once at the end.

use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

pub const LN_2: f64 = core::f64::consts::LN_2;
pub const E: f64 = core::f64::consts::E;

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn ln_1p(x: f64) -> f64 {
    libm::log1p(x)
}

#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline]
pub fn fabs(x: f64) -> f64 {
    libm::fabs(x)
}

#[inline]
pub fn floor(x: f64) -> f64 {
    libm::floor(x)
}

#[inline]
pub fn cos(x: f64) -> f64 {
    libm::cos(x)
}

#[inline]
pub fn sin(x: f64) -> f64 {
    libm::sin(x)
}

/// ln of a nonzero magnitude, exact in the exponent: the top 53 bits become a
/// float mantissa, the discarded shift re-enters as `shift * LN_2`.
pub fn ln_biguint(n: &BigUint) -> f64 {
    if n.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = n.bits();
    if bits <= 53 {
        return ln(n.to_f64().expect("<= 53 bits fits f64"));
    }
    let shift = bits - 53;
    let top = (n >> shift).to_f64().expect("53-bit window fits f64");
    ln(top) + shift as f64 * LN_2
}

/// ln |n|; negative infinity at zero.
pub fn ln_bigint_abs(n: &BigInt) -> f64 {
    ln_biguint(n.magnitude())
}

/// ln |q|; negative infinity at zero.
pub fn ln_big_rational_abs(q: &BigRational) -> f64 {
    if q.is_zero() {
        return f64::NEG_INFINITY;
    }
    ln_bigint_abs(q.numer()) - ln_bigint_abs(q.denom())
}

/// Nearest f64 to a big rational, falling back to the log route when either
/// part overflows the f64 range.
pub fn big_rational_to_f64(q: &BigRational) -> f64 {
    match (q.numer().to_f64(), q.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() && d != 0.0 => n / d,
        _ => {
            let v = exp(ln_big_rational_abs(q));
            if q.is_negative() {
                -v
            } else {
                v
            }
        }
    }
}

/// Below this index `LnStream` takes ln(i) straight from libm; above it the
/// stream advances incrementally by log1p(1/(i-1)).
pub const EXACT_LN_THRESHOLD: u64 = 1 << 20;

/// Sequential generator of ln(i) and S_i = sum_{k<=i} ln(k) with a
/// deterministic, restartable update rule.
///
/// Restarting from a saved `(i, l, s)` state reproduces the continuation bit
/// for bit, because the update at step i+1 depends only on i+1 (below
/// [`EXACT_LN_THRESHOLD`]) or on the carried `l` (above it). Every consumer
/// of log-factorial partial sums in this crate goes through this stream, so
/// independently computed tables agree exactly.
#[derive(Clone, Debug)]
pub struct LnStream {
    i: u64,
    l: f64,
    s: f64,
}

impl LnStream {
    pub fn new() -> Self {
        LnStream { i: 0, l: 0.0, s: 0.0 }
    }

    pub fn restore(i: u64, l: f64, s: f64) -> Self {
        LnStream { i, l, s }
    }

    #[inline]
    pub fn i(&self) -> u64 {
        self.i
    }

    /// Current ln(i).
    #[inline]
    pub fn last_ln(&self) -> f64 {
        self.l
    }

    /// Current partial sum S_i.
    #[inline]
    pub fn sum(&self) -> f64 {
        self.s
    }

    /// Steps to i+1 and returns the new partial sum S_{i+1}.
    #[inline]
    pub fn advance(&mut self) -> f64 {
        self.i += 1;
        if self.i < EXACT_LN_THRESHOLD {
            self.l = ln(self.i as f64);
        } else {
            self.l += ln_1p(1.0 / (self.i - 1) as f64);
        }
        self.s += self.l;
        self.s
    }
}

impl Default for LnStream {
    fn default() -> Self {
        Self::new()
    }
}

/// Memoized ln(j!) table, grown lazily through an [`LnStream`].
#[derive(Clone, Debug)]
pub struct LogFactorial {
    sums: Vec<f64>,
    stream: LnStream,
}

/// Growth guard; factorial indices in this crate stay far below.
const LOG_FACTORIAL_MAX: u64 = 1 << 24;

impl LogFactorial {
    pub fn new() -> Self {
        LogFactorial { sums: alloc::vec![0.0], stream: LnStream::new() }
    }

    /// ln(j!).
    pub fn get(&mut self, j: u64) -> f64 {
        assert!(j < LOG_FACTORIAL_MAX, "factorial index {j} out of supported range");
        while (self.sums.len() as u64) <= j {
            self.sums.push(self.stream.advance());
        }
        self.sums[j as usize]
    }
}

impl Default for LogFactorial {
    fn default() -> Self {
        Self::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn ln_stream_matches_direct_sums() {
        let mut st = LnStream::new();
        let mut direct = 0.0f64;
        for i in 1..=3000u64 {
            let s = st.advance();
            direct += ln(i as f64);
            assert!(
                (s - direct).abs() <= 1e-12 * direct.abs().max(1.0),
                "S_{i} drifted: {s} vs {direct}"
            );
        }
    }

    #[test]
    fn ln_stream_restart_is_bitwise() {
        let mut a = LnStream::new();
        for _ in 0..500 {
            a.advance();
        }
        let (i, l, s) = (a.i(), a.last_ln(), a.sum());
        let mut b = LnStream::restore(i, l, s);
        for _ in 0..500 {
            let va = a.advance();
            let vb = b.advance();
            assert_eq!(va.to_bits(), vb.to_bits());
        }
    }

    #[test]
    fn ln_stream_threshold_crossing_is_restartable() {
        let start = EXACT_LN_THRESHOLD - 3;
        let mut a = LnStream::restore(start, ln(start as f64), 123.0);
        let mut b = LnStream::restore(start, ln(start as f64), 123.0);
        for _ in 0..10 {
            assert_eq!(a.advance().to_bits(), b.advance().to_bits());
        }
    }

    #[test]
    fn ln_biguint_small_and_large() {
        let six = BigUint::from(6u32);
        assert!((ln_biguint(&six) - ln(6.0)).abs() < 1e-15);

        // 2^200: ln = 200 ln 2 exactly up to rounding
        let big = BigUint::one() << 200;
        let expect = 200.0 * LN_2;
        assert!((ln_biguint(&big) - expect).abs() <= 1e-12 * expect);
    }

    #[test]
    fn ln_rational_signs_and_zero() {
        let q = BigRational::new(BigInt::from(-3), BigInt::from(4));
        assert!((ln_big_rational_abs(&q) - ln(0.75)).abs() < 1e-15);
        assert_eq!(ln_big_rational_abs(&BigRational::zero()), f64::NEG_INFINITY);
    }

    #[test]
    fn log_factorial_values() {
        let mut lf = LogFactorial::new();
        assert_eq!(lf.get(0), 0.0);
        assert_eq!(lf.get(1), 0.0);
        assert!((lf.get(3) - ln(6.0)).abs() < 1e-14);
        assert!((lf.get(10) - ln(3628800.0)).abs() < 1e-12);
        // out-of-order access hits the memo, same bits
        let v = lf.get(7);
        assert_eq!(v.to_bits(), lf.get(7).to_bits());
    }
}
