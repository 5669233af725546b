use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::matrix::IntMatrix;
use super::LatticeError;

/// Dense rational matrix as a list of rows.
pub type RatMatrix = Vec<Vec<BigRational>>;

pub fn to_rational(m: &IntMatrix) -> RatMatrix {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(|x| BigRational::from_integer(x.clone())).collect())
        .collect()
}

pub fn rat_vec(v: &[BigInt]) -> Vec<BigRational> {
    v.iter().map(|x| BigRational::from_integer(x.clone())).collect()
}

/// Fractional part in `[0, 1)`.
pub fn frac(q: &BigRational) -> BigRational {
    q - q.floor()
}

/// Reduced row echelon form in place; returns pivot columns.
fn rref(m: &mut RatMatrix, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let k = m[i][c].clone();
                let (top, bottom) = m.split_at_mut(i.max(r));
                let (src, dst) = if i < r {
                    (&bottom[0], &mut top[i])
                } else {
                    (&top[r], &mut bottom[0])
                };
                for (x, s) in dst.iter_mut().zip(src.iter()) {
                    *x -= &k * s;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    pivots
}

/// Rank over Q of a list of rational row vectors.
pub fn rational_rank(rows: &[Vec<BigRational>]) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut m = rows.to_vec();
    rref(&mut m, ncols).len()
}

/// Rank over Q of an integer matrix.
pub fn int_rank(m: &IntMatrix) -> usize {
    rational_rank(&to_rational(m))
}

/// Unique solution of `a x = b` when the columns of `a` are independent.
/// Returns `Ok(None)` when the system is inconsistent.
pub fn solve_rational(a: &[Vec<BigRational>], b: &[BigRational]) -> Result<Option<Vec<BigRational>>, LatticeError> {
    assert_eq!(a.len(), b.len(), "right-hand side has wrong length");
    let ncols = a.first().map_or(0, Vec::len);
    let mut aug: RatMatrix = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug, ncols + 1);
    if pivots.last() == Some(&ncols) {
        return Ok(None);
    }
    if pivots.len() < ncols {
        return Err(LatticeError::DependentColumns);
    }
    Ok(Some((0..ncols).map(|i| aug[i][ncols].clone()).collect()))
}

/// The coefficients expressing `b` in terms of the independent columns of
/// `a`, provided they are all nonnegative.
pub fn solve_rational_nonneg(
    a: &[Vec<BigRational>],
    b: &[BigRational],
) -> Result<Option<Vec<BigRational>>, LatticeError> {
    Ok(solve_rational(a, b)?.filter(|x| x.iter().all(|q| !q.is_negative())))
}

/// Sign constraint on an LP variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarSign {
    Nonneg,
    Free,
}

/// Whether `{x : a x = b, x_j >= 0 for Nonneg j}` is nonempty.
///
/// Exact phase-one simplex over the rationals with Bland's rule.
pub fn lp_feasible(a: &[Vec<BigRational>], b: &[BigRational], signs: &[VarSign]) -> bool {
    let m = a.len();
    assert_eq!(m, b.len());
    // split free variables into differences of nonnegative ones
    let mut cols: Vec<Vec<BigRational>> = Vec::new();
    for (j, s) in signs.iter().enumerate() {
        let col: Vec<BigRational> = a.iter().map(|r| r[j].clone()).collect();
        if *s == VarSign::Free {
            cols.push(col.iter().map(|x| -x).collect());
        }
        cols.push(col);
    }
    let nv = cols.len();
    // tableau rows: [vars | artificials | rhs], with rhs >= 0
    let width = nv + m + 1;
    let mut t: RatMatrix = (0..m)
        .map(|i| {
            let flip = b[i].is_negative();
            let mut row = vec![BigRational::zero(); width];
            for (j, c) in cols.iter().enumerate() {
                row[j] = if flip { -&c[i] } else { c[i].clone() };
            }
            row[nv + i] = BigRational::one();
            row[width - 1] = if flip { -&b[i] } else { b[i].clone() };
            row
        })
        .collect();
    let mut basis: Vec<usize> = (nv..nv + m).collect();
    // reduced costs for minimizing the sum of artificials
    let mut cost = vec![BigRational::zero(); width];
    for row in &t {
        for j in 0..nv {
            cost[j] -= &row[j];
        }
        cost[width - 1] -= &row[width - 1];
    }
    while let Some(enter) = (0..nv + m).find(|&j| cost[j].is_negative()) {
        let mut leave: Option<(usize, BigRational)> = None;
        for (i, row) in t.iter().enumerate() {
            if row[enter].is_positive() {
                let ratio = &row[width - 1] / &row[enter];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((r, _)) = leave else {
            // unbounded direction cannot occur for a bounded-below objective
            break;
        };
        let inv = t[r][enter].recip();
        for x in t[r].iter_mut() {
            *x = &*x * &inv;
        }
        let pivot_row = t[r].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i != r && !row[enter].is_zero() {
                let k = row[enter].clone();
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    *x -= &k * p;
                }
            }
        }
        if !cost[enter].is_zero() {
            let k = cost[enter].clone();
            for (x, p) in cost.iter_mut().zip(&pivot_row) {
                *x -= &k * p;
            }
        }
        basis[r] = enter;
    }
    cost[width - 1].is_zero()
}
