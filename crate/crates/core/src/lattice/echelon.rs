use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::matrix::IntMatrix;
use super::snf::smith_normal_form;
use super::Coefficients;

/// Incrementally maintained row-echelon basis of a submodule of `Z^n`
/// (or of the subspace of `Q^n` it spans).
///
/// Over `Z` every insertion is a unimodular change of generators, so the
/// stored rows always form a basis of the lattice generated so far and
/// membership is exact lattice membership.
#[derive(Clone, Debug)]
pub struct RowEchelon {
    ncols: usize,
    coefficients: Coefficients,
    rows: BTreeMap<usize, Vec<BigInt>>,
}

fn leading(v: &[BigInt]) -> Option<usize> {
    v.iter().position(|x| !x.is_zero())
}

fn primitive(v: &mut [BigInt]) {
    let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in v.iter_mut() {
            *x = &*x / &g;
        }
    }
}

fn normalize_sign(v: &mut [BigInt], p: usize) {
    if v[p].is_negative() {
        for x in v.iter_mut() {
            *x = -std::mem::take(x);
        }
    }
}

impl RowEchelon {
    pub fn new(ncols: usize, coefficients: Coefficients) -> Self {
        RowEchelon {
            ncols,
            coefficients,
            rows: BTreeMap::new(),
        }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces the entries of `v` right of column `from` modulo the pivots
    /// stored there.
    fn reduce_tail(rows: &BTreeMap<usize, Vec<BigInt>>, v: &mut [BigInt], from: usize) {
        for (&c, r) in rows.range(from + 1..) {
            if v[c].is_zero() {
                continue;
            }
            let q = v[c].div_floor(&r[c]);
            if !q.is_zero() {
                for (x, y) in v.iter_mut().zip(r) {
                    *x -= &q * y;
                }
            }
        }
    }

    /// Stores `row` at pivot `p` and restores the Hermite form of the rows
    /// above it.
    fn place(&mut self, p: usize, mut row: Vec<BigInt>) {
        normalize_sign(&mut row, p);
        Self::reduce_tail(&self.rows, &mut row, p);
        self.rows.insert(p, row);
        let above: Vec<usize> = self.rows.range(..p).map(|(&c, _)| c).collect();
        for c in above.into_iter().rev() {
            let mut r = self.rows.remove(&c).expect("pivot row");
            Self::reduce_tail(&self.rows, &mut r, c);
            self.rows.insert(c, r);
        }
    }

    /// Adds a generator. Returns whether the rank went up.
    pub fn insert(&mut self, mut v: Vec<BigInt>) -> bool {
        assert_eq!(v.len(), self.ncols, "vector has wrong length");
        loop {
            let Some(p) = leading(&v) else {
                return false;
            };
            let Some(row) = self.rows.get(&p) else {
                match self.coefficients {
                    Coefficients::Rationals => {
                        primitive(&mut v);
                        normalize_sign(&mut v, p);
                        self.rows.insert(p, v);
                    }
                    Coefficients::Integers => self.place(p, v),
                }
                return true;
            };
            match self.coefficients {
                Coefficients::Integers => {
                    let a = row[p].clone();
                    let b = v[p].clone();
                    if b.is_multiple_of(&a) {
                        let q = &b / &a;
                        for (x, r) in v.iter_mut().zip(row.iter()) {
                            *x -= &q * r;
                        }
                        Self::reduce_tail(&self.rows, &mut v, p);
                    } else {
                        let e = a.extended_gcd(&b);
                        let (g, s, t) = (e.gcd, e.x, e.y);
                        let (ag, bg) = (&a / &g, &b / &g);
                        let new_row: Vec<BigInt> = row.iter().zip(&v).map(|(r, x)| &s * r + &t * x).collect();
                        let mut rest: Vec<BigInt> = row.iter().zip(&v).map(|(r, x)| &ag * x - &bg * r).collect();
                        self.place(p, new_row);
                        Self::reduce_tail(&self.rows, &mut rest, p);
                        v = rest;
                    }
                }
                Coefficients::Rationals => {
                    let a = row[p].clone();
                    let b = v[p].clone();
                    for (x, r) in v.iter_mut().zip(row.iter()) {
                        *x = &a * &*x - &b * r;
                    }
                    primitive(&mut v);
                }
            }
        }
    }

    /// Whether `v` lies in the lattice (over Z) or the span (over Q).
    pub fn contains(&self, v: &[BigInt]) -> bool {
        assert_eq!(v.len(), self.ncols, "vector has wrong length");
        let mut v = v.to_vec();
        for (&p, row) in &self.rows {
            if v[p].is_zero() {
                continue;
            }
            match self.coefficients {
                Coefficients::Integers => {
                    if !v[p].is_multiple_of(&row[p]) {
                        return false;
                    }
                    let q = &v[p] / &row[p];
                    for (x, r) in v.iter_mut().zip(row) {
                        *x -= &q * r;
                    }
                }
                Coefficients::Rationals => {
                    let a = row[p].clone();
                    let b = v[p].clone();
                    for (x, r) in v.iter_mut().zip(row) {
                        *x = &a * &*x - &b * r;
                    }
                    primitive(&mut v);
                }
            }
        }
        v.iter().all(Zero::is_zero)
    }

    pub fn basis(&self) -> IntMatrix {
        IntMatrix::from_big_rows(self.rows.values().cloned().collect(), self.ncols)
    }

    /// Free rank and invariant factors of `Z^n / L` (over Q only the rank).
    pub fn quotient_invariants(&self) -> (usize, Vec<BigInt>) {
        let free = self.ncols - self.rank();
        match self.coefficients {
            Coefficients::Rationals => (free, Vec::new()),
            Coefficients::Integers => {
                let snf = smith_normal_form(&self.basis());
                (free, snf.invariant_factors())
            }
        }
    }
}
