use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::piece::{GradedIdeal, GradedPieceReport};
use super::poly::{occurring_degrees, Poly};
use super::GradedError;
use crate::lattice::{smith_normal_form, Coefficients, IntMatrix};
use crate::parallel::Execution;

/// Where an ideal generator came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Provenance {
    Linear,
    StanleyReisner,
    Sector,
    Cone,
    Box,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Linear => "linear",
            Provenance::StanleyReisner => "stanley_reisner",
            Provenance::Sector => "sector",
            Provenance::Cone => "cone",
            Provenance::Box => "box",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "linear" => Provenance::Linear,
            "stanley_reisner" => Provenance::StanleyReisner,
            "sector" => Provenance::Sector,
            "cone" => Provenance::Cone,
            "box" => Provenance::Box,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Variable {
    pub name: String,
    pub degree: BigRational,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Generator {
    pub poly: Poly,
    pub provenance: Provenance,
    pub homogeneous: bool,
}

/// A graded polynomial ring modulo an explicitly generated ideal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingPresentation {
    pub variables: Vec<Variable>,
    pub generators: Vec<Generator>,
    pub coefficients: Coefficients,
}

/// Outcome of comparing two ideals degree by degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdealComparison {
    pub equal: bool,
    pub witness: Option<Witness>,
}

/// A generator of one ideal that the other ideal misses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub degree: BigRational,
    pub polynomial: Poly,
    /// `true` when the polynomial lies in the first ideal but not the second.
    pub from_first: bool,
}

impl RingPresentation {
    pub fn new(variables: Vec<Variable>, coefficients: Coefficients) -> Self {
        RingPresentation {
            variables,
            generators: Vec::new(),
            coefficients,
        }
    }

    pub fn nvars(&self) -> usize {
        self.variables.len()
    }

    pub fn names(&self) -> Vec<String> {
        self.variables.iter().map(|v| v.name.clone()).collect()
    }

    pub fn degrees(&self) -> Vec<BigRational> {
        self.variables.iter().map(|v| v.degree.clone()).collect()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name == name)
    }

    pub fn push(&mut self, poly: Poly, provenance: Provenance) {
        assert_eq!(poly.nvars(), self.nvars(), "generator lives in another ring");
        if poly.is_zero() {
            return;
        }
        let homogeneous = poly.is_homogeneous(&self.degrees());
        self.generators.push(Generator {
            poly,
            provenance,
            homogeneous,
        });
    }

    pub fn is_homogeneous(&self) -> bool {
        self.generators.iter().all(|g| g.homogeneous)
    }

    pub fn with_provenance(&self, provenance: Provenance) -> impl Iterator<Item = &Poly> {
        self.generators
            .iter()
            .filter(move |g| g.provenance == provenance)
            .map(|g| &g.poly)
    }

    pub fn ideal(&self) -> Result<GradedIdeal, GradedError> {
        let polys: Vec<Poly> = self.generators.iter().map(|g| g.poly.clone()).collect();
        GradedIdeal::new(self.degrees(), &polys, self.coefficients)
    }

    pub fn graded_piece(&self, degree: &BigRational) -> Result<GradedPieceReport, GradedError> {
        Ok(self.ideal()?.piece(degree).report())
    }

    /// Reports for every degree up to `max_degree` in which monomials exist.
    pub fn hilbert_table(
        &self,
        max_degree: &BigRational,
        exec: Execution,
    ) -> Result<Vec<GradedPieceReport>, GradedError> {
        let ideal = self.ideal()?;
        let degrees = occurring_degrees(&self.degrees(), max_degree);
        Ok(exec.map(&degrees, |d| ideal.piece(d).report()))
    }

    /// Whether the two ideals agree in every degree up to `max_degree`.
    pub fn ideal_equal_up_to(
        &self,
        other: &RingPresentation,
        max_degree: &BigRational,
    ) -> Result<IdealComparison, GradedError> {
        if self.variables != other.variables {
            return Err(GradedError::MismatchedVariables);
        }
        if self.coefficients != other.coefficients {
            return Err(GradedError::MismatchedCoefficients);
        }
        let first = self.ideal()?;
        let second = other.ideal()?;
        let mut witnesses: Vec<Witness> = Vec::new();
        for (from_first, gens, target) in [(true, &first, &second), (false, &second, &first)] {
            for g in gens.generators() {
                let d = gens.degree_of(g.terms().keys().next().expect("nonzero generator"));
                if &d <= max_degree && !target.piece(&d).contains(g) {
                    witnesses.push(Witness {
                        degree: d,
                        polynomial: g.clone(),
                        from_first,
                    });
                }
            }
        }
        let witness = witnesses.into_iter().min_by(|a, b| a.degree.cmp(&b.degree));
        Ok(IdealComparison {
            equal: witness.is_none(),
            witness,
        })
    }

    /// Simplifies the presentation without changing the ring: the linear
    /// relations among degree-one variables are diagonalized by a unimodular
    /// change of variables, and then every generator `c w + R` with `c = +-1`
    /// and `w` absent from `R` is used to substitute `w` away.
    pub fn eliminate(&self) -> RingPresentation {
        let mut p = self.diagonalize_linear();
        p.substitute_unit_variables();
        p
    }

    fn is_linear_form(&self, poly: &Poly) -> bool {
        poly.terms().keys().all(|m| {
            m.iter().sum::<u32>() == 1 && {
                let i = m.iter().position(|&e| e == 1).unwrap();
                self.variables[i].degree.is_one()
            }
        })
    }

    fn diagonalize_linear(&self) -> RingPresentation {
        let linear: Vec<&Poly> = self
            .generators
            .iter()
            .map(|g| &g.poly)
            .filter(|p| self.is_linear_form(p))
            .collect();
        if linear.is_empty() {
            return self.clone();
        }
        let vars: Vec<usize> = (0..self.nvars())
            .filter(|&i| linear.iter().any(|p| p.uses_var(i)))
            .collect();
        let rows: Vec<Vec<BigInt>> = linear
            .iter()
            .map(|p| {
                vars.iter()
                    .map(|&i| {
                        let mut e = vec![0; self.nvars()];
                        e[i] = 1;
                        p.coefficient(&e)
                    })
                    .collect()
            })
            .collect();
        let l = IntMatrix::from_big_rows(rows, vars.len());
        let snf = smith_normal_form(&l);
        let rank = snf.rank();
        let diag = snf.diagonal();
        let mut v = snf.v.clone();
        // surviving new variables: those with d_k != 1
        let survivors: Vec<usize> = (0..vars.len()).filter(|&k| k >= rank || !diag[k].is_one()).collect();
        for &k in &survivors {
            let col = v.column(k);
            if col.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
                v.negate_col(k);
            }
        }
        let others: Vec<usize> = (0..self.nvars()).filter(|i| !vars.contains(i)).collect();
        let mut variables: Vec<Variable> = survivors
            .iter()
            .enumerate()
            .map(|(j, _)| Variable {
                name: if survivors.len() == 1 {
                    "t".to_string()
                } else {
                    format!("t{}", j + 1)
                },
                degree: BigRational::one(),
            })
            .collect();
        variables.extend(others.iter().map(|&i| self.variables[i].clone()));
        let nt = survivors.len();
        let total = variables.len();
        let mut images: Vec<Poly> = vec![Poly::zero(total); self.nvars()];
        for (a, &i) in vars.iter().enumerate() {
            let coeffs: Vec<(usize, BigInt)> = survivors
                .iter()
                .enumerate()
                .map(|(j, &k)| (j, v[(a, k)].clone()))
                .collect();
            images[i] = Poly::linear(total, &coeffs);
        }
        for (j, &i) in others.iter().enumerate() {
            images[i] = Poly::var(total, nt + j);
        }
        let mut out = RingPresentation::new(variables, self.coefficients);
        for (j, &k) in survivors.iter().enumerate() {
            if k < rank {
                out.push(Poly::var(total, j).scale(&diag[k]), Provenance::Linear);
            }
        }
        for g in &self.generators {
            if self.is_linear_form(&g.poly) {
                continue;
            }
            out.push(g.poly.compose(&images, total), g.provenance);
        }
        out.dedup();
        out
    }

    fn unit_substitution(&self) -> Option<(usize, usize, Poly)> {
        for w in 0..self.nvars() {
            let mut lone = vec![0u32; self.nvars()];
            lone[w] = 1;
            for (k, g) in self.generators.iter().enumerate() {
                let c = g.poly.coefficient(&lone);
                if !c.abs().is_one() {
                    continue;
                }
                let rest = &g.poly - &Poly::monomial(self.nvars(), lone.clone(), c.clone());
                if rest.uses_var(w) {
                    continue;
                }
                return Some((w, k, rest.scale(&-c)));
            }
        }
        None
    }

    fn substitute_unit_variables(&mut self) {
        let mut removed: BTreeSet<usize> = BTreeSet::new();
        while let Some((w, k, image)) = self.unit_substitution() {
            self.generators.remove(k);
            let degrees = self.degrees();
            for g in &mut self.generators {
                g.poly = g.poly.substitute(w, &image);
                g.homogeneous = g.poly.is_homogeneous(&degrees);
            }
            self.generators.retain(|g| !g.poly.is_zero());
            removed.insert(w);
        }
        if removed.is_empty() {
            return;
        }
        let keep: Vec<usize> = (0..self.nvars()).filter(|i| !removed.contains(i)).collect();
        self.variables = keep.iter().map(|&i| self.variables[i].clone()).collect();
        for g in &mut self.generators {
            g.poly = g.poly.remove_vars(&keep);
        }
        self.dedup();
    }

    fn dedup(&mut self) {
        let mut seen = BTreeSet::new();
        self.generators.retain(|g| seen.insert(g.poly.normalize_sign()));
        let redundant: Vec<bool> = (0..self.generators.len())
            .map(|k| {
                let g = &self.generators[k].poly;
                self.generators
                    .iter()
                    .enumerate()
                    .any(|(j, h)| j != k && g.is_monomial_multiple_of(&h.poly))
            })
            .collect();
        let mut flags = redundant.into_iter();
        self.generators.retain(|_| !flags.next().unwrap());
    }
}

impl fmt::Display for RingPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = self.names();
        let ring = match self.coefficients {
            Coefficients::Integers => "Z",
            Coefficients::Rationals => "Q",
        };
        writeln!(f, "{ring}[{}] / (", names.join(", "))?;
        for g in &self.generators {
            writeln!(f, "  {}    [{}]", g.poly.display(&names), g.provenance.as_str())?;
        }
        write!(f, ")")
    }
}
