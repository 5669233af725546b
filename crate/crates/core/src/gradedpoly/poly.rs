use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exponent vector of a monomial.
pub type Monomial = Vec<u32>;

/// Sparse multivariate polynomial with integer coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Monomial, BigInt>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, BigInt::one())
    }

    pub fn constant(nvars: usize, c: BigInt) -> Self {
        Self::monomial(nvars, vec![0; nvars], c)
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(nvars, e, BigInt::one())
    }

    pub fn monomial(nvars: usize, exps: Monomial, c: BigInt) -> Self {
        assert_eq!(exps.len(), nvars, "exponent vector has wrong length");
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(exps, c);
        }
        p
    }

    /// `sum_i coeffs[i] * x_{vars[i]}`.
    pub fn linear(nvars: usize, coeffs: &[(usize, BigInt)]) -> Self {
        let mut p = Self::zero(nvars);
        for (i, c) in coeffs {
            p.add_term(unit_exponent(nvars, *i), c.clone());
        }
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, BigInt)>) -> Self {
        let mut p = Self::zero(nvars);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, BigInt> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.iter().all(|(m, c)| c.is_one() && m.iter().all(|&e| e == 0))
    }

    pub fn coefficient(&self, m: &[u32]) -> BigInt {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, m: Monomial, c: BigInt) {
        assert_eq!(m.len(), self.nvars, "exponent vector has wrong length");
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(slot) => {
                slot.insert(c);
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += c;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &[u32]) -> Self {
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.iter().zip(m).map(|(a, b)| a + b).collect(), c.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one(self.nvars);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    pub fn uses_var(&self, i: usize) -> bool {
        self.terms.keys().any(|m| m[i] > 0)
    }

    /// Replaces `x_i` by `p` everywhere.
    pub fn substitute(&self, i: usize, p: &Poly) -> Self {
        if !self.uses_var(i) {
            return self.clone();
        }
        let mut powers = vec![Self::one(self.nvars)];
        let mut out = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            let k = m[i] as usize;
            while powers.len() <= k {
                let next = powers.last().unwrap() * p;
                powers.push(next);
            }
            let mut rest = m.clone();
            rest[i] = 0;
            out = out + powers[k].mul_monomial(&rest).scale(c);
        }
        out
    }

    /// Applies `x_i -> images[i]` to every variable at once.
    pub fn compose(&self, images: &[Poly], target_nvars: usize) -> Self {
        assert_eq!(images.len(), self.nvars);
        let mut out = Self::zero(target_nvars);
        for (m, c) in &self.terms {
            let mut t = Self::constant(target_nvars, c.clone());
            for (i, &e) in m.iter().enumerate() {
                if e > 0 {
                    t = &t * &images[i].pow(e);
                }
            }
            out = out + t;
        }
        out
    }

    /// Drops the listed variables, which must not occur.
    pub fn remove_vars(&self, keep: &[usize]) -> Self {
        Poly {
            nvars: keep.len(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    debug_assert!(m.iter().enumerate().all(|(i, &e)| e == 0 || keep.contains(&i)));
                    (keep.iter().map(|&i| m[i]).collect(), c.clone())
                })
                .collect(),
        }
    }

    /// Embeds into a larger ring, sending `x_i` to `x_{positions[i]}`.
    pub fn embed(&self, positions: &[usize], nvars: usize) -> Self {
        Poly {
            nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let mut e = vec![0; nvars];
                    for (i, &k) in m.iter().enumerate() {
                        e[positions[i]] += k;
                    }
                    (e, c.clone())
                })
                .collect(),
        }
    }

    /// Splits into pieces that are homogeneous for the given degrees.
    pub fn homogeneous_parts(&self, degrees: &[BigRational]) -> BTreeMap<BigRational, Poly> {
        let mut out: BTreeMap<BigRational, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(monomial_degree(m, degrees))
                .or_insert_with(|| Poly::zero(self.nvars))
                .terms
                .insert(m.clone(), c.clone());
        }
        out
    }

    /// The common degree of all terms, if there is one.
    pub fn homogeneous_degree(&self, degrees: &[BigRational]) -> Option<BigRational> {
        let parts = self.homogeneous_parts(degrees);
        match parts.len() {
            0 => Some(BigRational::zero()),
            1 => parts.into_keys().next(),
            _ => None,
        }
    }

    pub fn is_homogeneous(&self, degrees: &[BigRational]) -> bool {
        self.homogeneous_degree(degrees).is_some()
    }

    /// Multiplies through so the leading coefficient is positive.
    /// Whether `self = +-m * other` for some monomial `m`.
    pub fn is_monomial_multiple_of(&self, other: &Poly) -> bool {
        if self.terms.len() != other.terms.len() || other.is_zero() {
            return false;
        }
        let ((m0, c0), (n0, d0)) = (self.terms.iter().next().unwrap(), other.terms.iter().next().unwrap());
        if m0.iter().zip(n0).any(|(a, b)| a < b) {
            return false;
        }
        let shift: Vec<u32> = m0.iter().zip(n0).map(|(a, b)| a - b).collect();
        let sign = if c0 == d0 {
            BigInt::one()
        } else if *c0 == -d0 {
            -BigInt::one()
        } else {
            return false;
        };
        other.terms.iter().all(|(n, d)| {
            let m: Monomial = n.iter().zip(&shift).map(|(a, b)| a + b).collect();
            self.terms.get(&m) == Some(&(d * &sign))
        })
    }

    pub fn normalize_sign(&self) -> Self {
        match self.terms.iter().next_back() {
            Some((_, c)) if c.is_negative() => -self,
            _ => self.clone(),
        }
    }

    pub fn display<'a>(&'a self, names: &'a [String]) -> PolyDisplay<'a> {
        PolyDisplay { poly: self, names }
    }
}

fn unit_exponent(nvars: usize, i: usize) -> Monomial {
    let mut e = vec![0; nvars];
    e[i] = 1;
    e
}

pub fn monomial_degree(m: &[u32], degrees: &[BigRational]) -> BigRational {
    m.iter()
        .zip(degrees)
        .filter(|(e, _)| **e > 0)
        .fold(BigRational::zero(), |acc, (&e, d)| {
            acc + d * BigRational::from_integer(e.into())
        })
}

/// All exponent vectors of the given degree, in lexicographic order.
/// Every variable degree must be positive.
pub fn monomials_of_degree(degrees: &[BigRational], target: &BigRational) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut current = vec![0u32; degrees.len()];
    fill(degrees, 0, target.clone(), &mut current, &mut out);
    out.sort();
    out
}

fn fill(degrees: &[BigRational], i: usize, remaining: BigRational, current: &mut Monomial, out: &mut Vec<Monomial>) {
    if remaining.is_zero() {
        out.push(current.clone());
        return;
    }
    if i == degrees.len() || remaining.is_negative() {
        return;
    }
    let mut rest = remaining;
    let mut e = 0u32;
    while !rest.is_negative() {
        current[i] = e;
        fill(degrees, i + 1, rest.clone(), current, out);
        rest -= &degrees[i];
        e += 1;
    }
    current[i] = 0;
}

/// All degrees of monomials up to `max`, ascending.
pub fn occurring_degrees(degrees: &[BigRational], max: &BigRational) -> Vec<BigRational> {
    let mut reach = std::collections::BTreeSet::from([BigRational::zero()]);
    for d in degrees {
        let mut next = reach.clone();
        for r in &reach {
            let mut x = r + d;
            while &x <= max {
                next.insert(x.clone());
                x += d;
            }
        }
        reach = next;
    }
    reach.into_iter().collect()
}

impl Add for Poly {
    type Output = Poly;
    fn add(mut self, rhs: Poly) -> Poly {
        assert_eq!(self.nvars, rhs.nvars);
        for (m, c) in rhs.terms {
            self.add_term(m, c);
        }
        self
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        self.clone() + rhs.clone()
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        self + (-rhs)
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self.clone() + (-rhs)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = Poly::zero(self.nvars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.iter().zip(m2).map(|(a, b)| a + b).collect(), c1 * c2);
            }
        }
        out
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

pub struct PolyDisplay<'a> {
    poly: &'a Poly,
    names: &'a [String],
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        let mut terms: Vec<(&Monomial, &BigInt)> = self.poly.terms.iter().collect();
        terms.sort_by(|a, b| {
            let da: u32 = a.0.iter().sum();
            let db: u32 = b.0.iter().sum();
            db.cmp(&da).then_with(|| b.0.cmp(a.0))
        });
        for (k, (m, c)) in terms.into_iter().enumerate() {
            let factors: Vec<String> = m
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| {
                    if e == 1 {
                        self.names[i].clone()
                    } else {
                        format!("{}^{}", self.names[i], e)
                    }
                })
                .collect();
            let mag = c.abs();
            if k == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            match (factors.is_empty(), mag.is_one()) {
                (true, _) => write!(f, "{mag}")?,
                (false, true) => write!(f, "{}", factors.join("*"))?,
                (false, false) => write!(f, "{mag}*{}", factors.join("*"))?,
            }
        }
        Ok(())
    }
}
