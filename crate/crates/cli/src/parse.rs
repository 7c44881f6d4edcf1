//! Input grammars: exact rationals, ladders, grid specs, polynomial
//! expressions, zero-set JSON.

use carleman_core::geometry::{AxisGrid, GridBox, Spacing, ZeroSet};
use carleman_core::math;
use carleman_core::series::{MultiIndex, Polynomial};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Exact rational from "3/4", "-2", "0.25", or "2.5e-3". Decimal and
/// scientific forms convert exactly (powers of ten in the denominator).
pub fn rational(s: &str) -> Result<BigRational, String> {
    let s = s.trim();
    if s.is_empty() {
        return Err("empty number".into());
    }
    if let Some((n, d)) = s.split_once('/') {
        let numer: BigInt = n.trim().parse().map_err(|_| format!("bad numerator {n:?}"))?;
        let denom: BigInt = d.trim().parse().map_err(|_| format!("bad denominator {d:?}"))?;
        if denom.is_zero() {
            return Err(format!("zero denominator in {s:?}"));
        }
        return Ok(BigRational::new(numer, denom));
    }
    let (mantissa, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => {
            let exp: i64 = e.parse().map_err(|_| format!("bad exponent {e:?}"))?;
            (m, exp)
        }
        None => (s, 0),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    let digits = format!("{int_part}{frac_part}");
    if digits.is_empty() || digits == "-" || digits == "+" {
        return Err(format!("no digits in {s:?}"));
    }
    let numer: BigInt = digits.parse().map_err(|_| format!("bad number {s:?}"))?;
    let scale = exp - frac_part.len() as i64;
    let ten = BigInt::from(10);
    let mut q = BigRational::from_integer(numer);
    if scale >= 0 {
        q *= BigRational::from_integer(ten.pow(scale as u32));
    } else {
        q /= BigRational::from_integer(ten.pow((-scale) as u32));
    }
    Ok(q)
}

pub fn rational_list(s: &str) -> Result<Vec<BigRational>, String> {
    s.split(',').map(rational).collect()
}

pub fn f64_list(s: &str) -> Result<Vec<f64>, String> {
    Ok(rational_list(s)?.iter().map(math::big_rational_to_f64).collect())
}

pub fn f64_value(s: &str) -> Result<f64, String> {
    Ok(math::big_rational_to_f64(&rational(s)?))
}

/// "A,B" into (alpha, beta).
pub fn gevrey_pair(s: &str) -> Result<(f64, f64), String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("expected alpha,beta, got {s:?}"));
    }
    Ok((f64_value(parts[0])?, f64_value(parts[1])?))
}

/// One axis spec "x<i>:lo:hi:count" with an optional ",geom" suffix.
pub fn axis_spec(s: &str) -> Result<(usize, AxisGrid), String> {
    let (body, spacing) = match s.strip_suffix(",geom") {
        Some(b) => (b, Spacing::Geometric),
        None => (s, Spacing::Linear),
    };
    let parts: Vec<&str> = body.split(':').collect();
    if parts.len() != 4 {
        return Err(format!("expected x<i>:lo:hi:count in {s:?}"));
    }
    let axis = parts[0]
        .strip_prefix('x')
        .and_then(|t| t.parse::<usize>().ok())
        .filter(|&i| i >= 1)
        .ok_or_else(|| format!("bad axis label {:?} (use x1, x2, ...)", parts[0]))?;
    let lo = rational(parts[1])?;
    let hi = rational(parts[2])?;
    let count: usize = parts[3].parse().map_err(|_| format!("bad count {:?}", parts[3]))?;
    let grid = AxisGrid::new(lo, hi, count, spacing).map_err(|e| e.to_string())?;
    Ok((axis - 1, grid))
}

/// Assembles --grid specs (one per axis, 1-based labels) into a box; every
/// axis 1..=n must appear exactly once.
pub fn grid_box(specs: &[String]) -> Result<GridBox, String> {
    if specs.is_empty() {
        return Err("no --grid axes given".into());
    }
    let mut parsed: Vec<(usize, AxisGrid)> = Vec::with_capacity(specs.len());
    for s in specs {
        parsed.push(axis_spec(s)?);
    }
    let n = specs.len();
    let mut axes: Vec<Option<AxisGrid>> = vec![None; n];
    for (i, g) in parsed {
        if i >= n {
            return Err(format!("axis x{} outside the {}-axis grid", i + 1, n));
        }
        if axes[i].is_some() {
            return Err(format!("axis x{} given twice", i + 1));
        }
        axes[i] = Some(g);
    }
    let axes: Vec<AxisGrid> = axes.into_iter().map(|a| a.unwrap()).collect();
    GridBox::new(axes).map_err(|e| e.to_string())
}

/// Polynomial expressions like "x1^3 + x1*x2^4" or "2*x1 - 1/2*x2^2".
/// Terms are separated by top-level + and -, factors by *; a factor is a
/// rational constant or x<i> with an optional ^<exp>.
pub fn polynomial(expr: &str, nvars: Option<usize>) -> Result<Polynomial, String> {
    let compact: String = expr.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err("empty polynomial".into());
    }
    // split into signed terms
    let mut terms: Vec<(bool, String)> = Vec::new();
    let mut cur = String::new();
    let mut neg = false;
    let mut chars = compact.chars().peekable();
    let mut prev: Option<char> = None;
    while let Some(c) = chars.next() {
        let splits = (c == '+' || c == '-')
            && !matches!(prev, None | Some('e') | Some('E') | Some('+') | Some('-') | Some('*') | Some('/') | Some('^'));
        if splits {
            terms.push((neg, core::mem::take(&mut cur)));
            neg = c == '-';
        } else if cur.is_empty() && prev.is_none() && (c == '+' || c == '-') {
            neg = c == '-';
        } else {
            cur.push(c);
        }
        prev = Some(c);
    }
    terms.push((neg, cur));

    struct Parsed {
        neg: bool,
        coeff: BigRational,
        exps: Vec<(usize, u32)>,
    }
    let mut parsed_terms: Vec<Parsed> = Vec::new();
    let mut max_var = 0usize;
    for (neg, term) in terms {
        if term.is_empty() {
            return Err(format!("empty term in {expr:?}"));
        }
        let mut coeff = BigRational::one();
        let mut exps: Vec<(usize, u32)> = Vec::new();
        for factor in term.split('*') {
            if let Some(rest) = factor.strip_prefix('x') {
                let (var, exp) = match rest.split_once('^') {
                    Some((v, e)) => (
                        v.parse::<usize>().map_err(|_| format!("bad variable in {factor:?}"))?,
                        e.parse::<u32>().map_err(|_| format!("bad exponent in {factor:?}"))?,
                    ),
                    None => (rest.parse::<usize>().map_err(|_| format!("bad variable in {factor:?}"))?, 1),
                };
                if var == 0 {
                    return Err("variables are 1-based (x1, x2, ...)".into());
                }
                max_var = max_var.max(var);
                exps.push((var - 1, exp));
            } else {
                coeff *= rational(factor)?;
            }
        }
        parsed_terms.push(Parsed { neg, coeff, exps });
    }
    let n = match nvars {
        Some(n) if n >= max_var => n,
        Some(n) => return Err(format!("--nvars {n} below highest variable x{max_var}")),
        None => max_var.max(1),
    };
    let mut p = Polynomial::new(n);
    for t in parsed_terms {
        let mut idx = vec![0u32; n];
        for (v, e) in t.exps {
            idx[v] += e;
        }
        let c = if t.neg { -t.coeff } else { t.coeff };
        p.add_term(MultiIndex(idx), c).map_err(|e| e.to_string())?;
    }
    Ok(p)
}

fn zero_set_value(v: &serde_json::Value, nvars: usize) -> Result<ZeroSet, String> {
    let obj = v.as_object().ok_or("zero set must be a JSON object")?;
    if let Some(h) = obj.get("hyperplane") {
        let axis = h.as_u64().ok_or("hyperplane axis must be a 1-based integer")? as usize;
        if axis < 1 || axis > nvars {
            return Err(format!("hyperplane axis {axis} outside 1..={nvars}"));
        }
        return Ok(ZeroSet::hyperplane(axis - 1));
    }
    if let Some(pts) = obj.get("points") {
        let arr = pts.as_array().ok_or("points must be an array of points")?;
        let mut out = Vec::with_capacity(arr.len());
        for p in arr {
            let coords = p.as_array().ok_or("each point must be an array")?;
            let mut point = Vec::with_capacity(coords.len());
            for c in coords {
                let q = match c {
                    serde_json::Value::String(s) => rational(s)?,
                    serde_json::Value::Number(n) => {
                        rational(&n.to_string()).map_err(|e| format!("bad coordinate: {e}"))?
                    }
                    _ => return Err("coordinates must be numbers or rational strings".into()),
                };
                point.push(q);
            }
            out.push(point);
        }
        return ZeroSet::points(out).map_err(|e| e.to_string());
    }
    if let Some(parts) = obj.get("union") {
        let arr = parts.as_array().ok_or("union must be an array")?;
        let mut out = Vec::with_capacity(arr.len());
        for part in arr {
            out.push(zero_set_value(part, nvars)?);
        }
        return ZeroSet::union(out).map_err(|e| e.to_string());
    }
    Err("zero set object needs one of: hyperplane, points, union".into())
}

/// Zero-set JSON: {"hyperplane": 1} | {"points": [["0","0"]]} |
/// {"union": [...]}. Hyperplane axes are 1-based on the surface.
pub fn zero_set(s: &str, nvars: usize) -> Result<ZeroSet, String> {
    let v: serde_json::Value =
        serde_json::from_str(s).map_err(|e| format!("zero set is not valid JSON: {e}"))?;
    zero_set_value(&v, nvars)
}
