//! Rational zero sets, exact distances, and probe grids.
//!
//! Distances are carried as exact squared values; the square root and the
//! logarithm happen once, at the float boundary. Probe grids refine by
//! doubling intervals, and refined grids always contain the coarser points
//! (exactly for linear spacing; for geometric spacing the generating floats
//! coincide bitwise, so the snapped rationals coincide too).

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::math;
use crate::series::Polynomial;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GeometryError {
    DimensionMismatch { expected: usize, got: usize },
    EmptyShape { reason: &'static str },
    BadGrid { reason: &'static str },
}

impl core::fmt::Display for GeometryError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            GeometryError::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            GeometryError::EmptyShape { reason } => write!(f, "invalid zero set: {reason}"),
            GeometryError::BadGrid { reason } => write!(f, "invalid grid: {reason}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for GeometryError {}

/// Zero sets of the shapes the division examples use. Axes are 0-based here;
/// the JSON surface uses 1-based coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ZeroSet {
    /// {x : x_axis = 0}
    Hyperplane { axis: usize },
    Points { points: Vec<Vec<BigRational>> },
    Union { parts: Vec<ZeroSet> },
}

impl ZeroSet {
    pub fn hyperplane(axis: usize) -> Self {
        ZeroSet::Hyperplane { axis }
    }

    pub fn points(points: Vec<Vec<BigRational>>) -> Result<Self, GeometryError> {
        if points.is_empty() {
            return Err(GeometryError::EmptyShape { reason: "point set must be nonempty" });
        }
        let d = points[0].len();
        if d == 0 || points.iter().any(|p| p.len() != d) {
            return Err(GeometryError::EmptyShape { reason: "points must share a positive dimension" });
        }
        Ok(ZeroSet::Points { points })
    }

    pub fn union(parts: Vec<ZeroSet>) -> Result<Self, GeometryError> {
        if parts.is_empty() {
            return Err(GeometryError::EmptyShape { reason: "union must be nonempty" });
        }
        Ok(ZeroSet::Union { parts })
    }
}

/// Exact squared distance, converted to floats only on demand.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Distance {
    pub dist2: BigRational,
}

impl Distance {
    pub fn is_zero(&self) -> bool {
        self.dist2.is_zero()
    }

    /// ln dist, via exact exponent extraction on the squared value;
    /// negative infinity on the zero set.
    pub fn ln(&self) -> f64 {
        0.5 * math::ln_big_rational_abs(&self.dist2)
    }

    pub fn to_f64(&self) -> f64 {
        let n = self.dist2.numer().to_f64();
        let d = self.dist2.denom().to_f64();
        match (n, d) {
            (Some(n), Some(d)) if n.is_finite() && d.is_finite() && d != 0.0 => {
                math::sqrt(n / d)
            }
            _ => math::exp(self.ln()),
        }
    }

    /// The exact distance when the squared value is a perfect rational
    /// square (e.g. axis distances), for witness output.
    pub fn exact(&self) -> Option<BigRational> {
        if self.dist2.is_zero() {
            return Some(BigRational::zero());
        }
        let n = self.dist2.numer().magnitude();
        let d = self.dist2.denom().magnitude();
        let rn = n.sqrt();
        let rd = d.sqrt();
        if &(&rn * &rn) == n && &(&rd * &rd) == d {
            Some(BigRational::new(BigInt::from(rn), BigInt::from(rd)))
        } else {
            None
        }
    }
}

/// Euclidean distance from a rational point to a zero set, exact in the
/// squared value. Ties across union parts resolve identically regardless of
/// order (exact minimum).
pub fn distance(x: &[BigRational], z: &ZeroSet) -> Result<Distance, GeometryError> {
    match z {
        ZeroSet::Hyperplane { axis } => {
            if *axis >= x.len() {
                return Err(GeometryError::DimensionMismatch { expected: axis + 1, got: x.len() });
            }
            let v = &x[*axis];
            Ok(Distance { dist2: v * v })
        }
        ZeroSet::Points { points } => {
            if points.is_empty() {
                return Err(GeometryError::EmptyShape { reason: "point set must be nonempty" });
            }
            let mut best: Option<BigRational> = None;
            for p in points {
                if p.len() != x.len() {
                    return Err(GeometryError::DimensionMismatch { expected: p.len(), got: x.len() });
                }
                let mut d2 = BigRational::zero();
                for (xi, pi) in x.iter().zip(p) {
                    let diff = xi - pi;
                    d2 += &diff * &diff;
                }
                best = Some(match best {
                    None => d2,
                    Some(b) if d2 < b => d2,
                    Some(b) => b,
                });
            }
            Ok(Distance { dist2: best.expect("nonempty") })
        }
        ZeroSet::Union { parts } => {
            if parts.is_empty() {
                return Err(GeometryError::EmptyShape { reason: "union must be nonempty" });
            }
            let mut best: Option<BigRational> = None;
            for part in parts {
                let d = distance(x, part)?.dist2;
                best = Some(match best {
                    None => d,
                    Some(b) if d < b => d,
                    Some(b) => b,
                });
            }
            Ok(Distance { dist2: best.expect("nonempty") })
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Geometric,
}

/// One axis of a probe grid: `count` points from `lo` to `hi` inclusive.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxisGrid {
    pub lo: BigRational,
    pub hi: BigRational,
    pub count: usize,
    pub spacing: Spacing,
}

/// Dyadic mantissa width for snapped geometric grid points. Keeps exact
/// arithmetic downstream (series reciprocals at grid points) on small
/// integers instead of 52-bit float survivors.
const SNAP_BITS: i64 = 24;

impl AxisGrid {
    pub fn new(
        lo: BigRational,
        hi: BigRational,
        count: usize,
        spacing: Spacing,
    ) -> Result<Self, GeometryError> {
        if count == 0 {
            return Err(GeometryError::BadGrid { reason: "count must be at least 1" });
        }
        if lo > hi {
            return Err(GeometryError::BadGrid { reason: "lo must not exceed hi" });
        }
        if matches!(spacing, Spacing::Geometric) {
            let sl = lo.is_positive() as i8 - lo.is_negative() as i8;
            let sh = hi.is_positive() as i8 - hi.is_negative() as i8;
            if sl == 0 || sl != sh {
                return Err(GeometryError::BadGrid {
                    reason: "geometric spacing needs endpoints of one strict sign",
                });
            }
        }
        Ok(AxisGrid { lo, hi, count, spacing })
    }

    /// The axis points, ascending, endpoints exact.
    pub fn points(&self) -> Vec<BigRational> {
        if self.count == 1 {
            return alloc::vec![self.lo.clone()];
        }
        let n1 = self.count - 1;
        match self.spacing {
            Spacing::Linear => {
                let span = &self.hi - &self.lo;
                (0..=n1)
                    .map(|k| {
                        if k == 0 {
                            self.lo.clone()
                        } else if k == n1 {
                            self.hi.clone()
                        } else {
                            &self.lo
                                + &span * BigRational::new(BigInt::from(k), BigInt::from(n1))
                        }
                    })
                    .collect()
            }
            Spacing::Geometric => {
                let neg = self.lo.is_negative();
                let la = math::ln(math::fabs(math::big_rational_to_f64(&self.lo)));
                let lb = math::ln(math::fabs(math::big_rational_to_f64(&self.hi)));
                (0..=n1)
                    .map(|k| {
                        if k == 0 {
                            self.lo.clone()
                        } else if k == n1 {
                            self.hi.clone()
                        } else {
                            let frac = k as f64 / n1 as f64;
                            let mag = math::exp(la + (lb - la) * frac);
                            let snapped = dyadic_snap(mag, SNAP_BITS);
                            if neg {
                                -snapped
                            } else {
                                snapped
                            }
                        }
                    })
                    .collect()
            }
        }
    }

    /// Same range with doubled intervals (count -> 2*count - 1). The refined
    /// axis contains every coarse point.
    pub fn refine(&self) -> AxisGrid {
        AxisGrid {
            lo: self.lo.clone(),
            hi: self.hi.clone(),
            count: if self.count == 1 { 1 } else { 2 * self.count - 1 },
            spacing: self.spacing,
        }
    }
}

/// Rounds a positive float to `bits` significant dyadic bits, exactly.
fn dyadic_snap(m: f64, bits: i64) -> BigRational {
    debug_assert!(m > 0.0 && m.is_finite());
    let exact = BigRational::from_float(m).expect("finite float");
    let nb = exact.numer().magnitude().bits() as i64;
    let db = exact.denom().magnitude().bits() as i64;
    let shift = bits - (nb - db);
    let (num, den) = if shift >= 0 {
        (exact.numer() << shift as u64, exact.denom().clone())
    } else {
        (exact.numer().clone(), exact.denom() << (-shift) as u64)
    };
    // round to nearest, half away from zero (num, den > 0 here)
    let rounded = (BigInt::from(2) * num + &den).div_floor(&(BigInt::from(2) * &den));
    if shift >= 0 {
        BigRational::new(rounded, BigInt::one() << shift as u64)
    } else {
        BigRational::new(rounded << (-shift) as u64, BigInt::one())
    }
}

/// Rectangular probe grid, the cartesian product of axis grids. Point order
/// is row-major with the first axis slowest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridBox {
    pub axes: Vec<AxisGrid>,
}

impl GridBox {
    pub fn new(axes: Vec<AxisGrid>) -> Result<Self, GeometryError> {
        if axes.is_empty() {
            return Err(GeometryError::BadGrid { reason: "grid needs at least one axis" });
        }
        Ok(GridBox { axes })
    }

    pub fn nvars(&self) -> usize {
        self.axes.len()
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.count).product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn points(&self) -> Vec<Vec<BigRational>> {
        let per_axis: Vec<Vec<BigRational>> = self.axes.iter().map(|a| a.points()).collect();
        let mut out = Vec::with_capacity(self.len());
        let mut idx = alloc::vec![0usize; per_axis.len()];
        loop {
            out.push(idx.iter().zip(&per_axis).map(|(&i, pts)| pts[i].clone()).collect());
            let mut axis = per_axis.len();
            loop {
                if axis == 0 {
                    return out;
                }
                axis -= 1;
                idx[axis] += 1;
                if idx[axis] < per_axis[axis].len() {
                    break;
                }
                idx[axis] = 0;
            }
        }
    }

    pub fn refine(&self) -> GridBox {
        GridBox { axes: self.axes.iter().map(|a| a.refine()).collect() }
    }
}

/// Outcome of checking a declared zero set against a polynomial.
#[derive(Clone, Debug)]
pub struct ZeroSetReport {
    /// The polynomial vanishes on every declared piece.
    pub membership_ok: bool,
    /// Human-readable witnesses for membership failures.
    pub failures: Vec<String>,
    /// A sampled point off the declared set where the polynomial vanished.
    pub off_set_zero: Option<Vec<BigRational>>,
    pub samples_checked: usize,
    pub notes: Vec<String>,
}

impl ZeroSetReport {
    pub fn is_valid(&self) -> bool {
        self.membership_ok && self.off_set_zero.is_none()
    }
}

pub fn format_point(p: &[BigRational]) -> String {
    let mut s = String::from("(");
    for (i, c) in p.iter().enumerate() {
        if i > 0 {
            s.push_str(", ");
        }
        s.push_str(&format!("{c}"));
    }
    s.push(')');
    s
}

fn check_membership(phi: &Polynomial, z: &ZeroSet, failures: &mut Vec<String>) -> bool {
    match z {
        ZeroSet::Hyperplane { axis } => {
            if *axis >= phi.nvars() {
                failures.push(format!("hyperplane axis {} out of range", axis + 1));
                return false;
            }
            if phi.vanishes_on_hyperplane(*axis) {
                true
            } else {
                failures.push(format!(
                    "polynomial does not vanish identically on x{} = 0",
                    axis + 1
                ));
                false
            }
        }
        ZeroSet::Points { points } => {
            let mut ok = true;
            for p in points {
                match phi.eval(p) {
                    Ok(v) if v.is_zero() => {}
                    Ok(v) => {
                        failures.push(format!(
                            "polynomial is {v} (not 0) at declared zero {}",
                            format_point(p)
                        ));
                        ok = false;
                    }
                    Err(_) => {
                        failures.push(format!(
                            "dimension mismatch at declared zero {}",
                            format_point(p)
                        ));
                        ok = false;
                    }
                }
            }
            ok
        }
        ZeroSet::Union { parts } => {
            let mut ok = true;
            for part in parts {
                ok &= check_membership(phi, part, failures);
            }
            ok
        }
    }
}

/// Divides out one power of x_axis; requires every term to carry it.
fn divide_by_axis(phi: &Polynomial, axis: usize) -> Polynomial {
    let mut q = Polynomial::new(phi.nvars());
    for (j, c) in phi.terms() {
        let mut e = j.clone();
        e.0[axis] -= 1;
        q.add_term(e, c.clone()).expect("same dimension");
    }
    q
}

/// Checks that `phi` vanishes on the declared set (exactly) and samples the
/// probe box for zeros away from it. For a plain hyperplane declaration the
/// cofactor q with phi = x_axis * q is additionally sampled: when q has no
/// zeros on the box, the sampled zero set is exactly the hyperplane, and the
/// report records that argument.
pub fn validate_zero_set(
    phi: &Polynomial,
    z: &ZeroSet,
    probe: &GridBox,
) -> Result<ZeroSetReport, GeometryError> {
    if probe.nvars() != phi.nvars() {
        return Err(GeometryError::DimensionMismatch {
            expected: phi.nvars(),
            got: probe.nvars(),
        });
    }
    let mut failures = Vec::new();
    let membership_ok = check_membership(phi, z, &mut failures);

    let mut off_set_zero = None;
    let mut samples_checked = 0usize;
    for p in probe.points() {
        samples_checked += 1;
        let d = distance(&p, z)?;
        if d.is_zero() {
            continue;
        }
        let v = phi.eval(&p).map_err(|_| GeometryError::DimensionMismatch {
            expected: phi.nvars(),
            got: p.len(),
        })?;
        if v.is_zero() {
            off_set_zero = Some(p);
            break;
        }
    }

    let mut notes = Vec::new();
    if let ZeroSet::Hyperplane { axis } = z {
        if membership_ok {
            // zeros of the cofactor on the hyperplane itself do not enlarge
            // the zero set, so only off-hyperplane cofactor zeros count
            let q = divide_by_axis(phi, *axis);
            let mut q_zero = None;
            for p in probe.points() {
                if p[*axis].is_zero() {
                    continue;
                }
                if q.eval(&p).map(|v| v.is_zero()).unwrap_or(false) {
                    q_zero = Some(p);
                    break;
                }
            }
            match q_zero {
                None => notes.push(format!(
                    "phi factors as x{} times a cofactor with no zeros off the hyperplane \
                     on the sampled box; the sampled zero set is exactly x{} = 0",
                    axis + 1,
                    axis + 1
                )),
                Some(p) => notes.push(format!(
                    "cofactor of x{} vanishes at sampled point {}; \
                     zero set may exceed the hyperplane",
                    axis + 1,
                    format_point(&p)
                )),
            }
        }
    }

    Ok(ZeroSetReport { membership_ok, failures, off_set_zero, samples_checked, notes })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn qi(v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }

    #[test]
    fn hyperplane_distance_is_exact_coordinate() {
        let z = ZeroSet::hyperplane(0);
        let d = distance(&[q(3, 4), qi(5)], &z).unwrap();
        assert_eq!(d.exact().unwrap(), q(3, 4));
        assert_eq!(d.to_f64(), 0.75);
        assert!((d.ln() - math::ln(0.75)).abs() < 1e-15);
    }

    #[test]
    fn point_set_distance() {
        let z = ZeroSet::points(alloc::vec![alloc::vec![qi(0), qi(0)]]).unwrap();
        let d = distance(&[qi(3), qi(4)], &z).unwrap();
        assert_eq!(d.exact().unwrap(), qi(5));
    }

    #[test]
    fn union_takes_the_minimum() {
        let z = ZeroSet::union(alloc::vec![
            ZeroSet::hyperplane(0),
            ZeroSet::points(alloc::vec![alloc::vec![qi(2), qi(0)]]).unwrap(),
        ])
        .unwrap();
        let d = distance(&[qi(1), qi(0)], &z).unwrap();
        assert_eq!(d.exact().unwrap(), qi(1));
    }

    #[test]
    fn zero_on_set_nonzero_off() {
        let z = ZeroSet::hyperplane(1);
        assert!(distance(&[qi(7), qi(0)], &z).unwrap().is_zero());
        assert!(!distance(&[qi(0), q(1, 1000)], &z).unwrap().is_zero());
    }

    #[test]
    fn irrational_distances_have_no_exact_form() {
        let z = ZeroSet::points(alloc::vec![alloc::vec![qi(0), qi(0)]]).unwrap();
        let d = distance(&[qi(1), qi(1)], &z).unwrap();
        assert_eq!(d.exact(), None);
        assert!((d.to_f64() - math::sqrt(2.0)).abs() < 1e-15);
    }

    #[test]
    fn constructors_reject_empty_shapes() {
        assert!(ZeroSet::points(Vec::new()).is_err());
        assert!(ZeroSet::union(Vec::new()).is_err());
    }

    #[test]
    fn linear_axis_points_are_exact() {
        let ax = AxisGrid::new(q(-1, 2), q(1, 2), 5, Spacing::Linear).unwrap();
        let pts = ax.points();
        assert_eq!(pts, alloc::vec![q(-1, 2), q(-1, 4), qi(0), q(1, 4), q(1, 2)]);
    }

    #[test]
    fn linear_refinement_is_nested() {
        let ax = AxisGrid::new(q(-1, 3), qi(2), 7, Spacing::Linear).unwrap();
        let coarse = ax.points();
        let fine = ax.refine().points();
        assert_eq!(fine.len(), 13);
        for p in &coarse {
            assert!(fine.contains(p), "lost {p}");
        }
    }

    #[test]
    fn geometric_refinement_is_nested() {
        let ax = AxisGrid::new(q(1, 64), q(1, 2), 20, Spacing::Geometric).unwrap();
        let coarse = ax.points();
        let fine = ax.refine().points();
        assert_eq!(fine.len(), 39);
        for p in &coarse {
            assert!(fine.contains(p), "lost {p}");
        }
        // endpoints exact, interior ascending
        assert_eq!(coarse[0], q(1, 64));
        assert_eq!(coarse[19], q(1, 2));
        for w in coarse.windows(2) {
            assert!(w[0] < w[1]);
        }
    }

    #[test]
    fn negative_geometric_axes_work() {
        let ax = AxisGrid::new(q(-1, 2), q(-1, 64), 8, Spacing::Geometric).unwrap();
        let pts = ax.points();
        assert_eq!(pts[0], q(-1, 2));
        assert_eq!(pts[7], q(-1, 64));
        for w in pts.windows(2) {
            assert!(w[0] < w[1]);
        }
    }

    #[test]
    fn grid_box_cartesian_order() {
        let gb = GridBox::new(alloc::vec![
            AxisGrid::new(qi(0), qi(1), 2, Spacing::Linear).unwrap(),
            AxisGrid::new(qi(0), qi(2), 3, Spacing::Linear).unwrap(),
        ])
        .unwrap();
        let pts = gb.points();
        assert_eq!(pts.len(), 6);
        assert_eq!(pts[0], alloc::vec![qi(0), qi(0)]);
        assert_eq!(pts[1], alloc::vec![qi(0), qi(1)]);
        assert_eq!(pts[3], alloc::vec![qi(1), qi(0)]);
    }

    fn psi_times_x1() -> Polynomial {
        // x1^3 + x1 x2^4
        Polynomial::from_terms(
            2,
            [
                (crate::series::MultiIndex(alloc::vec![3, 0]), qi(1)),
                (crate::series::MultiIndex(alloc::vec![1, 4]), qi(1)),
            ],
        )
        .unwrap()
    }

    fn square_probe() -> GridBox {
        GridBox::new(alloc::vec![
            AxisGrid::new(qi(-1), qi(1), 9, Spacing::Linear).unwrap(),
            AxisGrid::new(qi(-1), qi(1), 9, Spacing::Linear).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn validate_accepts_hyperplane_factor() {
        let rep = validate_zero_set(&psi_times_x1(), &ZeroSet::hyperplane(0), &square_probe())
            .unwrap();
        assert!(rep.membership_ok);
        assert!(rep.off_set_zero.is_none());
        assert!(rep.is_valid());
        // x1^2 + x2^4 only vanishes at the origin, which lies on the
        // hyperplane, so the exactness note must fire
        assert_eq!(rep.notes.len(), 1);
        assert!(rep.notes[0].contains("exactly"), "{}", rep.notes[0]);
    }

    #[test]
    fn validate_accepts_point_zero() {
        let psi = Polynomial::from_terms(
            2,
            [
                (crate::series::MultiIndex(alloc::vec![2, 0]), qi(1)),
                (crate::series::MultiIndex(alloc::vec![0, 4]), qi(1)),
            ],
        )
        .unwrap();
        let z = ZeroSet::points(alloc::vec![alloc::vec![qi(0), qi(0)]]).unwrap();
        let rep = validate_zero_set(&psi, &z, &square_probe()).unwrap();
        assert!(rep.membership_ok && rep.off_set_zero.is_none());
    }

    #[test]
    fn validate_rejects_nonzero_point() {
        let phi = Polynomial::from_terms(
            2,
            [(crate::series::MultiIndex(alloc::vec![1, 0]), qi(1))],
        )
        .unwrap();
        let z = ZeroSet::points(alloc::vec![alloc::vec![qi(1), qi(1)]]).unwrap();
        let rep = validate_zero_set(&phi, &z, &square_probe()).unwrap();
        assert!(!rep.membership_ok);
        assert_eq!(rep.failures.len(), 1);
        assert!(rep.failures[0].contains("(1, 1)"), "{}", rep.failures[0]);
    }

    #[test]
    fn validate_detects_undeclared_zeros() {
        // phi = x1 x2 declared as just x1 = 0 misses the x2 axis
        let phi = Polynomial::from_terms(
            2,
            [(crate::series::MultiIndex(alloc::vec![1, 1]), qi(1))],
        )
        .unwrap();
        let rep = validate_zero_set(&phi, &ZeroSet::hyperplane(0), &square_probe()).unwrap();
        assert!(rep.membership_ok);
        assert!(rep.off_set_zero.is_some());
        assert!(!rep.is_valid());
    }
}
