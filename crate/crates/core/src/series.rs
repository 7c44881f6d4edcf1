//! Exact truncated multivariate Taylor arithmetic over big rationals.
//!
//! Polynomials are sparse maps from multi-indices to coefficients; truncated
//! series are dense coefficient vectors in graded order (total degree, then
//! ascending first exponent). Recentering, multiplication, reciprocal, and
//! derivative extraction are all exact; no floating point enters this module.
//!
//! The reciprocal runs on an integer core: with D the common denominator of
//! the input coefficients and den = D * f_0, the numerators n_J of the output
//! satisfy an integer recurrence. [`reciprocal_raw`] hands back that form so
//! magnitude tests and log extraction pay no gcd at all; [`reciprocal`]
//! materializes reduced rationals, one reduction per coefficient. The split
//! matters when reciprocals are taken at hundreds of grid points.

use alloc::vec::Vec;

use core::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::alloc::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SeriesError {
    DimensionMismatch { left: usize, right: usize },
    /// Reciprocal of a series vanishing at the expansion point.
    ZeroConstantTerm,
    /// Requested derivative order exceeds the truncation cap.
    DegreeCapExceeded { requested: u32, cap: u32 },
}

impl core::fmt::Display for SeriesError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            SeriesError::DimensionMismatch { left, right } => {
                write!(f, "dimension mismatch: {left} vs {right} variables")
            }
            SeriesError::ZeroConstantTerm => {
                write!(f, "reciprocal undefined: constant term is zero")
            }
            SeriesError::DegreeCapExceeded { requested, cap } => {
                write!(f, "derivative order {requested} exceeds truncation cap {cap}")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for SeriesError {}

/// Exponent vector of a monomial. Ordered by total degree, then by the
/// exponents lexicographically, which matches the dense series layout.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn zero(n: usize) -> Self {
        MultiIndex(alloc::vec![0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Product of component factorials.
    pub fn factorial(&self) -> BigInt {
        let mut acc = BigInt::one();
        for &e in &self.0 {
            for i in 2..=e as u64 {
                acc *= BigInt::from(i);
            }
        }
        acc
    }

    pub fn checked_sub(&self, rhs: &MultiIndex) -> Option<MultiIndex> {
        if self.0.len() != rhs.0.len() {
            return None;
        }
        let mut out = Vec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(&rhs.0) {
            if a < b {
                return None;
            }
            out.push(a - b);
        }
        Some(MultiIndex(out))
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total().cmp(&other.total()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl core::fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

fn binom(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as u64
}

/// Number of multi-indices in `n` variables with total degree <= d.
pub fn series_len(n: usize, d: u32) -> usize {
    binom(d as u64 + n as u64, n as u64) as usize
}

/// Dense-layout position of an exponent vector: grades first, ascending
/// first exponent within a grade.
pub fn rank_of(j: &[u32]) -> usize {
    let n = j.len() as u64;
    let s: u64 = j.iter().map(|&e| e as u64).sum();
    let mut r = if s == 0 { 0 } else { binom(s - 1 + n, n) };
    let mut rem = s;
    for (pos, &e) in j.iter().enumerate() {
        let after = n - pos as u64 - 1;
        if after == 0 {
            break;
        }
        for c in 0..e as u64 {
            r += binom(rem - c + after - 1, after - 1);
        }
        rem -= e as u64;
    }
    r as usize
}

/// All exponent vectors with total degree <= d, in rank order.
pub fn multi_indices(n: usize, d: u32) -> Vec<MultiIndex> {
    let mut out = Vec::with_capacity(series_len(n, d));
    let mut cur = alloc::vec![0u32; n];
    for s in 0..=d {
        emit_grade(&mut out, &mut cur, 0, s);
    }
    out
}

fn emit_grade(out: &mut Vec<MultiIndex>, cur: &mut Vec<u32>, pos: usize, rem: u32) {
    if pos + 1 == cur.len() {
        cur[pos] = rem;
        out.push(MultiIndex(cur.clone()));
        return;
    }
    for c in 0..=rem {
        cur[pos] = c;
        emit_grade(out, cur, pos + 1, rem - c);
    }
}

/// Sparse exact polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    n: usize,
    terms: BTreeMap<MultiIndex, BigRational>,
}

impl Polynomial {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "polynomials need at least one variable");
        Polynomial { n, terms: BTreeMap::new() }
    }

    pub fn from_terms<I>(n: usize, terms: I) -> Result<Self, SeriesError>
    where
        I: IntoIterator<Item = (MultiIndex, BigRational)>,
    {
        let mut p = Polynomial::new(n);
        for (j, c) in terms {
            p.add_term(j, c)?;
        }
        Ok(p)
    }

    pub fn add_term(&mut self, j: MultiIndex, c: BigRational) -> Result<(), SeriesError> {
        if j.len() != self.n {
            return Err(SeriesError::DimensionMismatch { left: self.n, right: j.len() });
        }
        let becomes_zero = {
            let entry = self.terms.entry(j.clone()).or_insert_with(BigRational::zero);
            *entry += c;
            entry.is_zero()
        };
        if becomes_zero {
            // keep the map free of zeros so degree/support queries are exact
            self.terms.remove(&j);
        }
        Ok(())
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|j| j.total()).max()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &BigRational)> {
        self.terms.iter()
    }

    pub fn eval(&self, x: &[BigRational]) -> Result<BigRational, SeriesError> {
        if x.len() != self.n {
            return Err(SeriesError::DimensionMismatch { left: self.n, right: x.len() });
        }
        let pows = power_tables(x, &max_exponents(self));
        let mut acc = BigRational::zero();
        for (j, c) in &self.terms {
            let mut t = c.clone();
            for (axis, &e) in j.0.iter().enumerate() {
                if e > 0 {
                    t *= &pows[axis][e as usize];
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    /// True when the polynomial vanishes identically on {x_axis = 0}
    /// (0-based axis), i.e. every term carries that variable.
    pub fn vanishes_on_hyperplane(&self, axis: usize) -> bool {
        assert!(axis < self.n);
        self.terms.keys().all(|j| j.0[axis] >= 1)
    }
}

fn max_exponents(p: &Polynomial) -> Vec<u32> {
    let mut m = alloc::vec![0u32; p.n];
    for j in p.terms.keys() {
        for (axis, &e) in j.0.iter().enumerate() {
            m[axis] = m[axis].max(e);
        }
    }
    m
}

fn power_tables(x: &[BigRational], max_exp: &[u32]) -> Vec<Vec<BigRational>> {
    x.iter()
        .zip(max_exp)
        .map(|(xi, &me)| {
            let mut row = Vec::with_capacity(me as usize + 1);
            row.push(BigRational::one());
            for e in 1..=me as usize {
                let next = &row[e - 1] * xi;
                row.push(next);
            }
            row
        })
        .collect()
}

/// Dense truncated Taylor series (coefficients, not derivatives).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    n: usize,
    cap: u32,
    coeffs: Vec<BigRational>,
}

impl TruncatedSeries {
    pub fn constant(n: usize, cap: u32, value: BigRational) -> Self {
        let mut coeffs = alloc::vec![BigRational::zero(); series_len(n, cap)];
        coeffs[0] = value;
        TruncatedSeries { n, cap, coeffs }
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn coeff(&self, j: &MultiIndex) -> Result<&BigRational, SeriesError> {
        if j.len() != self.n {
            return Err(SeriesError::DimensionMismatch { left: self.n, right: j.len() });
        }
        let total = j.total();
        if total > self.cap {
            return Err(SeriesError::DegreeCapExceeded { requested: total, cap: self.cap });
        }
        Ok(&self.coeffs[rank_of(&j.0)])
    }

    /// Coefficients paired with their exponent vectors, in rank order.
    pub fn iter_coeffs(&self) -> impl Iterator<Item = (MultiIndex, &BigRational)> {
        multi_indices(self.n, self.cap).into_iter().zip(self.coeffs.iter())
    }

    /// Evaluates the truncated polynomial at a rational point.
    pub fn eval(&self, u: &[BigRational]) -> Result<BigRational, SeriesError> {
        if u.len() != self.n {
            return Err(SeriesError::DimensionMismatch { left: self.n, right: u.len() });
        }
        let me = alloc::vec![self.cap; self.n];
        let pows = power_tables(u, &me);
        let mut acc = BigRational::zero();
        for (j, c) in self.iter_coeffs() {
            if c.is_zero() {
                continue;
            }
            let mut t = c.clone();
            for (axis, &e) in j.0.iter().enumerate() {
                if e > 0 {
                    t *= &pows[axis][e as usize];
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    /// D^J at the expansion point: J! times the coefficient.
    pub fn derivative_at(&self, j: &MultiIndex) -> Result<BigRational, SeriesError> {
        let c = self.coeff(j)?;
        Ok(c * BigRational::from_integer(j.factorial()))
    }
}

/// Taylor expansion of `p` around `center` truncated at total degree `cap`:
/// the series in u with p(center + u) = sum coeffs[J] u^J (exact when
/// cap >= deg p).
pub fn recenter(
    p: &Polynomial,
    center: &[BigRational],
    cap: u32,
) -> Result<TruncatedSeries, SeriesError> {
    if center.len() != p.n {
        return Err(SeriesError::DimensionMismatch { left: p.n, right: center.len() });
    }
    let pows = power_tables(center, &max_exponents(p));
    let mut coeffs = alloc::vec![BigRational::zero(); series_len(p.n, cap)];
    let mut k = alloc::vec![0u32; p.n];
    for (e, c) in &p.terms {
        // walk the sub-exponents K <= E with |K| <= cap
        k.iter_mut().for_each(|v| *v = 0);
        loop {
            let total: u32 = k.iter().sum();
            if total <= cap {
                // coefficient contribution: c * prod binom(E_i, K_i) * center_i^(E_i - K_i)
                let mut t = c.clone();
                for axis in 0..p.n {
                    let (ei, ki) = (e.0[axis], k[axis]);
                    let b = binom(ei as u64, ki as u64);
                    if b != 1 {
                        t *= BigRational::from_integer(BigInt::from(b));
                    }
                    if ei > ki {
                        t *= &pows[axis][(ei - ki) as usize];
                    }
                }
                coeffs[rank_of(&k)] += t;
            }
            // odometer over K <= E
            let mut axis = 0;
            loop {
                if axis == p.n {
                    break;
                }
                if k[axis] < e.0[axis] {
                    k[axis] += 1;
                    break;
                }
                k[axis] = 0;
                axis += 1;
            }
            if axis == p.n {
                break;
            }
        }
    }
    Ok(TruncatedSeries { n: p.n, cap, coeffs })
}

/// Product truncated at the smaller of the operand caps.
pub fn mul(a: &TruncatedSeries, b: &TruncatedSeries) -> Result<TruncatedSeries, SeriesError> {
    if a.n != b.n {
        return Err(SeriesError::DimensionMismatch { left: a.n, right: b.n });
    }
    let cap = a.cap.min(b.cap);
    let idx = multi_indices(a.n, cap);
    let sa: Vec<(usize, &MultiIndex, &BigRational)> = idx
        .iter()
        .enumerate()
        .filter(|(r, _)| !a.coeffs[*r].is_zero())
        .map(|(r, j)| (r, j, &a.coeffs[r]))
        .collect();
    let sb: Vec<(&MultiIndex, &BigRational)> = idx
        .iter()
        .enumerate()
        .filter(|(r, _)| !b.coeffs[*r].is_zero())
        .map(|(r, j)| (j, &b.coeffs[r]))
        .collect();
    let mut coeffs = alloc::vec![BigRational::zero(); series_len(a.n, cap)];
    for (_, ja, ca) in &sa {
        let ta = ja.total();
        for (jb, cb) in &sb {
            if ta + jb.total() > cap {
                continue;
            }
            let sum: Vec<u32> = ja.0.iter().zip(&jb.0).map(|(x, y)| x + y).collect();
            coeffs[rank_of(&sum)] += *ca * *cb;
        }
    }
    Ok(TruncatedSeries { n: a.n, cap, coeffs })
}

/// Reciprocal held in cleared-denominator form: the coefficient at rank r is
/// scale * num[r] / den^(|J_r| + 1). Magnitude tests and log extraction can
/// work on the integers directly; materializing rationals (and paying one gcd
/// per coefficient) is deferred to [`RawReciprocal::into_series`].
pub struct RawReciprocal {
    n: usize,
    cap: u32,
    idx: Vec<MultiIndex>,
    num: Vec<BigInt>,
    scale: BigInt,
    den: BigInt,
}

impl RawReciprocal {
    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.idx
    }

    /// Integer numerators n_J in rank order.
    pub fn numerators(&self) -> &[BigInt] {
        &self.num
    }

    /// The common-denominator clearing factor (positive).
    pub fn scale(&self) -> &BigInt {
        &self.scale
    }

    /// scale times the constant term of the inverted series; its (|J|+1)-th
    /// power is the denominator under num[r].
    pub fn den(&self) -> &BigInt {
        &self.den
    }

    pub fn into_series(self) -> TruncatedSeries {
        let mut den_pows: Vec<BigInt> = Vec::with_capacity(self.cap as usize + 2);
        den_pows.push(self.den.clone());
        for _ in 0..self.cap {
            let next = den_pows.last().unwrap() * &self.den;
            den_pows.push(next);
        }
        let coeffs: Vec<BigRational> = self
            .idx
            .iter()
            .zip(self.num.into_iter())
            .map(|(j, nj)| {
                BigRational::new(&self.scale * nj, den_pows[j.total() as usize].clone())
            })
            .collect();
        TruncatedSeries { n: self.n, cap: self.cap, coeffs }
    }
}

/// Multiplicative inverse truncated at min(cap, f.cap), kept in integer form.
/// Fails when the constant term vanishes.
pub fn reciprocal_raw(f: &TruncatedSeries, cap: u32) -> Result<RawReciprocal, SeriesError> {
    let cap = cap.min(f.cap);
    if f.coeffs[0].is_zero() {
        return Err(SeriesError::ZeroConstantTerm);
    }
    let idx = multi_indices(f.n, cap);

    // clear denominators: D = lcm of all, ft_K = f_K * D integer
    let mut d_lcm = BigInt::one();
    for (r, _) in idx.iter().enumerate() {
        let c = &f.coeffs[r];
        if !c.is_zero() {
            d_lcm = d_lcm.lcm(c.denom());
        }
    }
    let den = f.coeffs[0].numer() * (&d_lcm / f.coeffs[0].denom());

    // support weights w_K = ft_K * den^(|K|-1) for K != 0
    let mut den_pows: Vec<BigInt> = Vec::with_capacity(cap as usize + 2);
    den_pows.push(BigInt::one());
    for _ in 0..=cap {
        let next = den_pows.last().unwrap() * &den;
        den_pows.push(next);
    }
    let mut support: Vec<(&[u32], u32, BigInt)> = Vec::new();
    for (r, j) in idx.iter().enumerate() {
        if r == 0 || f.coeffs[r].is_zero() {
            continue;
        }
        let ft = f.coeffs[r].numer() * (&d_lcm / f.coeffs[r].denom());
        let w = &ft * &den_pows[(j.total() - 1) as usize];
        support.push((&j.0, j.total(), w));
    }

    // integer numerators: n_0 = 1, n_J = -sum w_K n_{J-K}
    let mut num: Vec<BigInt> = Vec::with_capacity(idx.len());
    num.push(BigInt::one());
    let mut sub = alloc::vec![0u32; f.n];
    for j in idx.iter().skip(1) {
        let jt = j.total();
        let mut acc = BigInt::zero();
        for (kexp, kt, w) in &support {
            if *kt > jt {
                break; // support is in rank order; higher grades cannot divide
            }
            let mut ok = true;
            for (s, (&jj, &kk)) in sub.iter_mut().zip(j.0.iter().zip(kexp.iter())) {
                if jj < kk {
                    ok = false;
                    break;
                }
                *s = jj - kk;
            }
            if ok {
                acc += w * &num[rank_of(&sub)];
            }
        }
        num.push(-acc);
    }

    Ok(RawReciprocal { n: f.n, cap, idx, num, scale: d_lcm, den })
}

/// Multiplicative inverse truncated at min(cap, f.cap), as reduced rationals.
/// Fails when the constant term vanishes.
pub fn reciprocal(f: &TruncatedSeries, cap: u32) -> Result<TruncatedSeries, SeriesError> {
    Ok(reciprocal_raw(f, cap)?.into_series())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(num: i64, den: i64) -> BigRational {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn qi(v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex(v.to_vec())
    }

    #[test]
    fn ranks_agree_with_enumeration() {
        for n in 1..=4usize {
            let idx = multi_indices(n, 7);
            assert_eq!(idx.len(), series_len(n, 7));
            for (r, j) in idx.iter().enumerate() {
                assert_eq!(rank_of(&j.0), r, "n = {n}, J = {:?}", j.0);
            }
            // rank order is sorted in the MultiIndex order
            for w in idx.windows(2) {
                assert!(w[0] < w[1]);
            }
        }
    }

    #[test]
    fn geometric_series() {
        // 1/(1 - u) = 1 + u + u^2 + ...
        let p = Polynomial::from_terms(
            1,
            [(mi(&[0]), qi(1)), (mi(&[1]), qi(-1))],
        )
        .unwrap();
        let s = recenter(&p, &[qi(0)], 12).unwrap();
        let r = reciprocal(&s, 12).unwrap();
        for (j, c) in r.iter_coeffs() {
            assert_eq!(*c, qi(1), "at {:?}", j.0);
        }
    }

    #[test]
    fn reciprocal_of_coordinate_shifted() {
        // D^(j,0) of 1/x1 at (c, *) is (-1)^j j! c^-(j+1)
        for c in [q(1, 3), qi(2), q(-3, 4), q(5, 7)] {
            let p = Polynomial::from_terms(2, [(mi(&[1, 0]), qi(1))]).unwrap();
            let s = recenter(&p, &[c.clone(), q(9, 11)], 9).unwrap();
            let r = reciprocal(&s, 9).unwrap();
            for j in 0..=9u32 {
                let got = r.derivative_at(&mi(&[j, 0])).unwrap();
                let mut want = BigRational::one();
                for i in 1..=j as i64 {
                    want *= qi(i);
                }
                if j % 2 == 1 {
                    want = -want;
                }
                let cpow = num_traits::pow::pow(c.clone(), j as usize + 1);
                want /= cpow;
                assert_eq!(got, want, "j = {j}, c = {c}");
                // mixed derivatives in the other variable vanish
                if j >= 1 {
                    let mixed = r.derivative_at(&mi(&[j - 1, 1])).unwrap();
                    assert_eq!(mixed, BigRational::zero());
                }
            }
        }
    }

    #[test]
    fn product_with_reciprocal_is_one() {
        let p = Polynomial::from_terms(
            2,
            [
                (mi(&[0, 0]), q(3, 2)),
                (mi(&[1, 0]), qi(-1)),
                (mi(&[0, 2]), q(1, 3)),
                (mi(&[2, 1]), qi(2)),
            ],
        )
        .unwrap();
        let s = recenter(&p, &[q(1, 5), q(-2, 7)], 8).unwrap();
        let r = reciprocal(&s, 8).unwrap();
        let prod = mul(&s, &r).unwrap();
        for (j, c) in prod.iter_coeffs() {
            if j.total() == 0 {
                assert_eq!(*c, BigRational::one());
            } else {
                assert_eq!(*c, BigRational::zero(), "at {:?}", j.0);
            }
        }
    }

    #[test]
    fn recentering_is_exact_for_polynomials() {
        let p = Polynomial::from_terms(
            2,
            [
                (mi(&[2, 0]), qi(1)),
                (mi(&[0, 4]), qi(1)),
                (mi(&[1, 1]), q(-2, 3)),
            ],
        )
        .unwrap();
        let center = [q(1, 2), q(-1, 3)];
        let s = recenter(&p, &center, 6).unwrap();
        for u in [[qi(0), qi(0)], [q(1, 7), q(2, 5)], [qi(-1), q(3, 2)]] {
            let direct =
                p.eval(&[&center[0] + &u[0], &center[1] + &u[1]]).unwrap();
            let via_series = s.eval(&u).unwrap();
            assert_eq!(direct, via_series);
        }
    }

    #[test]
    fn truncation_cap_tracks_minimum() {
        let p = Polynomial::from_terms(1, [(mi(&[0]), qi(2)), (mi(&[1]), qi(1))]).unwrap();
        let a = recenter(&p, &[qi(0)], 9).unwrap();
        let r = reciprocal(&a, 4).unwrap();
        assert_eq!(r.cap(), 4);
        let prod = mul(&a, &r).unwrap();
        assert_eq!(prod.cap(), 4);
        assert!(matches!(
            r.derivative_at(&mi(&[5])),
            Err(SeriesError::DegreeCapExceeded { requested: 5, cap: 4 })
        ));
    }

    #[test]
    fn reciprocal_requires_nonzero_constant() {
        let p = Polynomial::from_terms(1, [(mi(&[1]), qi(1))]).unwrap();
        let s = recenter(&p, &[qi(0)], 5).unwrap();
        assert!(matches!(reciprocal(&s, 5), Err(SeriesError::ZeroConstantTerm)));
    }

    #[test]
    fn dimension_mismatches_are_reported() {
        let p = Polynomial::from_terms(2, [(mi(&[1, 0]), qi(1))]).unwrap();
        assert!(matches!(
            recenter(&p, &[qi(1)], 3),
            Err(SeriesError::DimensionMismatch { left: 2, right: 1 })
        ));
        let a = TruncatedSeries::constant(1, 3, qi(1));
        let b = TruncatedSeries::constant(2, 3, qi(1));
        assert!(matches!(mul(&a, &b), Err(SeriesError::DimensionMismatch { .. })));
    }

    #[test]
    fn leibniz_on_products() {
        let f = Polynomial::from_terms(
            2,
            [(mi(&[2, 0]), qi(1)), (mi(&[0, 1]), q(1, 2)), (mi(&[0, 0]), qi(3))],
        )
        .unwrap();
        let g = Polynomial::from_terms(
            2,
            [(mi(&[1, 1]), qi(-2)), (mi(&[0, 2]), qi(1)), (mi(&[0, 0]), qi(1))],
        )
        .unwrap();
        let center = [q(2, 3), q(-1, 2)];
        let cap = 6u32;
        let sf = recenter(&f, &center, cap).unwrap();
        let sg = recenter(&g, &center, cap).unwrap();
        let prod = mul(&sf, &sg).unwrap();
        for p in multi_indices(2, 4) {
            let direct = prod.derivative_at(&p).unwrap();
            // sum over Q <= P of binom(P, Q) D^Q f D^(P-Q) g
            let mut acc = BigRational::zero();
            for qdx in multi_indices(2, p.total()) {
                if let Some(rest) = p.checked_sub(&qdx) {
                    let mut b = BigRational::one();
                    for (pp, qq) in p.0.iter().zip(&qdx.0) {
                        b *= qi(binom(*pp as u64, *qq as u64) as i64);
                    }
                    acc += b
                        * sf.derivative_at(&qdx).unwrap()
                        * sg.derivative_at(&rest).unwrap();
                }
            }
            assert_eq!(direct, acc, "at P = {:?}", p.0);
        }
    }

    #[test]
    fn hyperplane_vanishing() {
        let p = Polynomial::from_terms(
            2,
            [(mi(&[1, 0]), qi(1)), (mi(&[3, 2]), q(1, 2))],
        )
        .unwrap();
        assert!(p.vanishes_on_hyperplane(0));
        assert!(!p.vanishes_on_hyperplane(1));
    }

    #[test]
    fn add_term_cancels_to_zero() {
        let mut p = Polynomial::new(1);
        p.add_term(mi(&[2]), qi(5)).unwrap();
        p.add_term(mi(&[2]), qi(-5)).unwrap();
        assert!(p.is_zero());
        assert_eq!(p.degree(), None);
    }
}
