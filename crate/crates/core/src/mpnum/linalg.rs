use super::matrix::{LowerTriangular, SymMatrix};
use super::{max_abs, to_decimal, BigReal};
use crate::error::{Error, Result};
use crate::par::{self, Exec};
use rug::ops::Pow;
use rug::Float;

/// Decimal digits carried by a mantissa of `bits` bits (guard bits excluded).
pub(crate) fn digits_of_bits(bits: u32) -> i32 {
    (f64::from(bits.saturating_sub(16)) * std::f64::consts::LOG10_2).floor() as i32
}

/// `W = C Cᵀ`. Fails on the first non-positive pivot; never regularizes.
pub fn cholesky(w: &SymMatrix) -> Result<LowerTriangular> {
    let n = w.dim();
    let bits = w.prec();
    let mut rows: Vec<Vec<BigReal>> = (0..n).map(|i| vec![Float::new(bits); i + 1]).collect();
    for j in 0..n {
        let mut s = w.get(j, j).clone();
        for x in &rows[j][..j] {
            s -= x.clone().square();
        }
        if s.is_sign_negative() || s.is_zero() || s.is_nan() {
            return Err(Error::NotPositiveDefinite {
                row: j,
                pivot: to_decimal(&s, 12),
            });
        }
        let diag = s.sqrt();
        let col = {
            let rows = &rows;
            let diag = &diag;
            par::map_range(Exec::Parallel, j + 1..n, |i| {
                let mut acc = w.get(i, j).clone();
                for (a, b) in rows[i][..j].iter().zip(&rows[j][..j]) {
                    acc -= a * b;
                }
                acc / diag
            })
        };
        rows[j][j] = diag;
        for (off, v) in col.into_iter().enumerate() {
            rows[j + 1 + off][j] = v;
        }
    }
    Ok(LowerTriangular::from_packed(n, rows.into_iter().flatten().collect()))
}

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// Forward substitution for `C x = b`.
pub fn solve_lower(c: &LowerTriangular, b: &[BigReal]) -> Result<Vec<BigReal>> {
    check_len(c.dim(), b.len())?;
    let mut x: Vec<BigReal> = Vec::with_capacity(b.len());
    for (i, bi) in b.iter().enumerate() {
        let row = c.row(i);
        let mut acc = bi.clone();
        for (cij, xj) in row[..i].iter().zip(&x) {
            acc -= cij * xj;
        }
        x.push(acc / &row[i]);
    }
    Ok(x)
}

/// Back substitution for `Cᵀ x = b`.
pub fn solve_lower_transpose(c: &LowerTriangular, b: &[BigReal]) -> Result<Vec<BigReal>> {
    let n = c.dim();
    check_len(n, b.len())?;
    let mut x: Vec<BigReal> = b.to_vec();
    for i in (0..n).rev() {
        for k in i + 1..n {
            let (head, tail) = x.split_at_mut(k);
            head[i] -= c.get(k, i) * &tail[0];
        }
        x[i] /= c.get(i, i);
    }
    Ok(x)
}

/// Solves `A x = b` for positive definite `A`.
pub fn spd_solve(a: &SymMatrix, b: &[BigReal]) -> Result<Vec<BigReal>> {
    check_len(a.dim(), b.len())?;
    let c = cholesky(a)?;
    let y = solve_lower(&c, b)?;
    solve_lower_transpose(&c, &y)
}

/// `C⁻¹` for a lower triangular `C` with nonzero diagonal. Columns are
/// independent and computed in parallel.
pub fn invert_lower(c: &LowerTriangular) -> LowerTriangular {
    let n = c.dim();
    let bits = c.prec();
    let cols: Vec<Vec<BigReal>> = par::map_range(Exec::Parallel, 0..n, |j| {
        // entries X(i, j) for i = j..n
        let mut col: Vec<BigReal> = Vec::with_capacity(n - j);
        col.push(Float::with_val(bits, c.get(j, j).recip_ref()));
        for i in j + 1..n {
            let row = c.row(i);
            let mut acc = Float::new(bits);
            for (k, x) in col.iter().enumerate() {
                acc += &row[j + k] * x;
            }
            acc /= &row[i];
            col.push(-acc);
        }
        col
    });
    LowerTriangular::from_fn(n, |i, j| cols[j][i - j].clone())
}

/// Number of eigenvalues of `P` strictly below `sigma`, by Sylvester's law
/// of inertia applied to an unpivoted `LDLᵀ` of `P − σI`.
pub fn inertia(p: &SymMatrix, sigma: &BigReal) -> usize {
    let n = p.dim();
    let bits = p.prec();
    let tiny = {
        let scale = p.norm_inf();
        let two = Float::with_val(bits, 2);
        scale * two.pow(-(bits as i32))
    };
    let mut l: Vec<Vec<BigReal>> = vec![vec![Float::new(bits); n]; n];
    let mut d: Vec<BigReal> = Vec::with_capacity(n);
    let mut negatives = 0;
    for j in 0..n {
        let mut dj = Float::with_val(bits, p.get(j, j) - sigma);
        for k in 0..j {
            dj -= l[j][k].clone().square() * &d[k];
        }
        if dj.is_zero() {
            // a zero pivot is nudged upward; the count stays correct for
            // shifts that are not themselves eigenvalues
            dj = tiny.clone();
            if dj.is_zero() {
                dj = Float::with_val(bits, Float::i_exp(1, -(bits as i32)));
            }
        }
        if dj.is_sign_negative() {
            negatives += 1;
        }
        for i in j + 1..n {
            let mut acc = p.get(i, j).clone();
            for k in 0..j {
                acc -= Float::with_val(bits, &l[i][k] * &l[j][k]) * &d[k];
            }
            l[i][j] = acc / &dj;
        }
        d.push(dj);
    }
    negatives
}

/// Smallest eigenvalue with a certified bracket and a unit eigenvector.
#[derive(Debug, Clone)]
pub struct EigenPair {
    pub value: BigReal,
    pub vector: Vec<BigReal>,
    /// `lo <= λ_min <= hi` from the inertia counts.
    pub bracket: (BigReal, BigReal),
    /// The two smallest eigenvalues agree to half the working digits.
    pub degenerate: bool,
}

fn unit(v: Vec<BigReal>) -> Vec<BigReal> {
    let bits = v.first().map(|x| x.prec()).unwrap_or(64);
    let mut norm = Float::new(bits);
    for x in &v {
        norm += x * x;
    }
    let norm = norm.sqrt();
    v.into_iter().map(|x| x / &norm).collect()
}

fn residual_inf(p: &SymMatrix, lambda: &BigReal, v: &[BigReal]) -> BigReal {
    let pv = p.mul_vec(v);
    let r: Vec<BigReal> = pv
        .into_iter()
        .zip(v)
        .map(|(a, b)| a - Float::with_val(lambda.prec(), lambda * b))
        .collect();
    max_abs(&r)
}

/// Smallest eigenvalue of a symmetric matrix by inertia bisection, followed
/// by shifted inverse iteration for the eigenvector.
pub fn smallest_eigenvalue(p: &SymMatrix) -> Result<EigenPair> {
    const MAX_INVERSE_STEPS: usize = 12;

    let n = p.dim();
    let bits = p.prec();
    if n == 0 {
        return Err(Error::Invalid("empty matrix".into()));
    }
    if n == 1 {
        let v = p.get(0, 0).clone();
        return Ok(EigenPair {
            value: v.clone(),
            vector: vec![Float::with_val(bits, 1)],
            bracket: (v.clone(), v),
            degenerate: false,
        });
    }
    let digits = digits_of_bits(bits);
    let ten = Float::with_val(bits, 10);
    let two = Float::with_val(bits, 2);
    let mut scale = p.norm_inf();
    if scale.is_zero() {
        scale = Float::with_val(bits, 1);
    }

    // Gershgorin lower bound; the smallest diagonal is an upper bound.
    let mut lo: Option<BigReal> = None;
    let mut hi: Option<BigReal> = None;
    for i in 0..n {
        let mut radius = Float::new(bits);
        for j in 0..n {
            if j != i {
                radius += &*p.get(i, j).as_abs();
            }
        }
        let g = Float::with_val(bits, p.get(i, i) - &radius);
        if lo.as_ref().map_or(true, |l| g < *l) {
            lo = Some(g);
        }
        if hi.as_ref().map_or(true, |h| p.get(i, i) < h) {
            hi = Some(p.get(i, i).clone());
        }
    }
    let floor = Float::with_val(bits, &scale * two.clone().pow(-(bits as i32 - 8)));
    let mut lo = lo.unwrap() - &floor;
    let mut hi = hi.unwrap() + &floor;
    let mut widen = floor.clone();
    while inertia(p, &hi) == 0 {
        widen *= 2;
        hi += &widen;
    }
    let tol = Float::with_val(bits, &scale * two.pow(-(bits as i32 - 4)));
    let mut iterations = 0usize;
    while Float::with_val(bits, &hi - &lo) > tol {
        let mid = Float::with_val(bits, &lo + &hi) / 2;
        if mid == lo || mid == hi {
            break;
        }
        if inertia(p, &mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
        iterations += 1;
        if iterations > 8 * bits as usize {
            return Err(Error::NoConvergence(iterations));
        }
    }
    let value = Float::with_val(bits, &lo + &hi) / 2;

    let gap_probe = Float::with_val(bits, &value + &scale * ten.clone().pow(-(digits / 2)));
    let degenerate = inertia(p, &gap_probe) >= 2;

    let shift = Float::with_val(bits, &value - &scale * ten.clone().pow(-(digits / 3)));
    let shifted = p.shifted(&shift);
    let factor = cholesky(&shifted)?;
    let target = Float::with_val(bits, &scale * ten.pow(6 - digits));
    let mut v = unit(vec![Float::with_val(bits, 1); n]);
    for _ in 0..MAX_INVERSE_STEPS {
        let y = solve_lower(&factor, &v)?;
        v = unit(solve_lower_transpose(&factor, &y)?);
        if residual_inf(p, &value, &v) <= target {
            return Ok(EigenPair {
                value,
                vector: v,
                bracket: (lo, hi),
                degenerate,
            });
        }
    }
    if degenerate {
        // any vector in the eigenspace will do; accept the last iterate
        return Ok(EigenPair {
            value,
            vector: v,
            bracket: (lo, hi),
            degenerate,
        });
    }
    Err(Error::NoConvergence(MAX_INVERSE_STEPS))
}
