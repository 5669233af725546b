use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::poly::{monomial_degree, monomials_of_degree, Monomial, Poly};
use super::GradedError;
use crate::lattice::{Coefficients, RowEchelon};

/// Free rank and invariant factors of one graded piece of a quotient ring.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GradedPieceReport {
    pub degree: BigRational,
    pub free_rank: usize,
    pub torsion: Vec<BigInt>,
}

impl GradedPieceReport {
    pub fn is_zero(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }
}

impl std::fmt::Display for GradedPieceReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        if self.free_rank > 0 {
            parts.push(if self.free_rank == 1 {
                "Z".to_string()
            } else {
                format!("Z^{}", self.free_rank)
            });
        }
        parts.extend(self.torsion.iter().map(|d| format!("Z/{d}")));
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// One graded piece of an ideal: its monomial basis and the submodule of
/// the ideal in that degree.
#[derive(Debug)]
pub struct Piece {
    degree: BigRational,
    monomials: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
    echelon: RowEchelon,
}

impl Piece {
    pub fn degree(&self) -> &BigRational {
        &self.degree
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    fn vector(&self, p: &Poly) -> Option<Vec<BigInt>> {
        let mut v = vec![BigInt::zero(); self.monomials.len()];
        for (m, c) in p.terms() {
            v[*self.index.get(m)?] = c.clone();
        }
        Some(v)
    }

    /// Membership of a polynomial homogeneous of this piece's degree.
    pub fn contains(&self, p: &Poly) -> bool {
        match self.vector(p) {
            Some(v) => self.echelon.contains(&v),
            None => false,
        }
    }

    pub fn report(&self) -> GradedPieceReport {
        let (free_rank, torsion) = self.echelon.quotient_invariants();
        GradedPieceReport {
            degree: self.degree.clone(),
            free_rank,
            torsion,
        }
    }
}

/// A homogeneous ideal in a positively graded polynomial ring, queried one
/// degree at a time.
#[derive(Debug)]
pub struct GradedIdeal {
    nvars: usize,
    degrees: Vec<BigRational>,
    generators: Vec<(Poly, BigRational)>,
    coefficients: Coefficients,
    cache: Mutex<HashMap<BigRational, Arc<Piece>>>,
}

impl GradedIdeal {
    pub fn new(
        degrees: Vec<BigRational>,
        generators: &[Poly],
        coefficients: Coefficients,
    ) -> Result<Self, GradedError> {
        if let Some(i) = degrees.iter().position(|d| !d.is_positive()) {
            return Err(GradedError::NonpositiveDegree(i));
        }
        let mut gens = Vec::with_capacity(generators.len());
        for (k, g) in generators.iter().enumerate() {
            if g.nvars() != degrees.len() {
                return Err(GradedError::VariableCount);
            }
            if g.is_zero() {
                continue;
            }
            let d = g.homogeneous_degree(&degrees).ok_or(GradedError::Inhomogeneous(k))?;
            gens.push((g.clone(), d));
        }
        Ok(GradedIdeal {
            nvars: degrees.len(),
            degrees,
            generators: gens,
            coefficients,
            cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn degrees(&self) -> &[BigRational] {
        &self.degrees
    }

    pub fn coefficients(&self) -> Coefficients {
        self.coefficients
    }

    pub fn generator_degrees(&self) -> impl Iterator<Item = &BigRational> {
        self.generators.iter().map(|(_, d)| d)
    }

    pub fn generators(&self) -> impl Iterator<Item = &Poly> {
        self.generators.iter().map(|(g, _)| g)
    }

    pub fn piece(&self, degree: &BigRational) -> Arc<Piece> {
        if let Some(p) = self.cache.lock().expect("cache lock").get(degree) {
            return Arc::clone(p);
        }
        let built = Arc::new(self.build_piece(degree));
        let mut cache = self.cache.lock().expect("cache lock");
        Arc::clone(cache.entry(degree.clone()).or_insert(built))
    }

    fn build_piece(&self, degree: &BigRational) -> Piece {
        let monomials = monomials_of_degree(&self.degrees, degree);
        let index: HashMap<Monomial, usize> = monomials.iter().cloned().enumerate().map(|(k, m)| (m, k)).collect();
        let mut echelon = RowEchelon::new(monomials.len(), self.coefficients);
        for (g, d) in &self.generators {
            if d > degree {
                continue;
            }
            for m in monomials_of_degree(&self.degrees, &(degree - d)) {
                let mut v = vec![BigInt::zero(); monomials.len()];
                for (e, c) in g.terms() {
                    let prod: Monomial = e.iter().zip(&m).map(|(a, b)| a + b).collect();
                    v[index[&prod]] = c.clone();
                }
                echelon.insert(v);
                if echelon.rank() == monomials.len() && self.coefficients == Coefficients::Rationals {
                    break;
                }
            }
        }
        Piece {
            degree: degree.clone(),
            monomials,
            index,
            echelon,
        }
    }

    /// Membership, tested separately on each homogeneous component.
    pub fn contains(&self, p: &Poly) -> bool {
        assert_eq!(p.nvars(), self.nvars, "polynomial lives in another ring");
        p.homogeneous_parts(&self.degrees)
            .iter()
            .all(|(d, part)| self.piece(d).contains(part))
    }

    /// Like `contains`, but ignoring components above `max_degree`.
    pub fn contains_up_to(&self, p: &Poly, max_degree: &BigRational) -> bool {
        p.homogeneous_parts(&self.degrees)
            .iter()
            .filter(|(d, _)| *d <= max_degree)
            .all(|(d, part)| self.piece(d).contains(part))
    }

    pub fn degree_of(&self, m: &[u32]) -> BigRational {
        monomial_degree(m, &self.degrees)
    }
}
