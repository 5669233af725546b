use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::matrix::IntMatrix;
use super::snf::{smith_normal_form, solve_integer, SnfDecomposition};
use super::LatticeError;

/// A finitely generated abelian group `Z^ngens / rowspan(relations)`.
///
/// Elements are kept in canonical coordinates taken from the Smith form of
/// the relation matrix: one coordinate per invariant factor `m > 1`, reduced
/// into `[0, m)`, followed by the free coordinates.
#[derive(Clone, Debug)]
pub struct AbGroup {
    ngens: usize,
    relations: IntMatrix,
    snf: SnfDecomposition,
    /// SNF positions carrying an invariant factor > 1.
    torsion_positions: Vec<usize>,
    invariant_factors: Vec<BigInt>,
    free_rank: usize,
}

/// Element of an [`AbGroup`] in canonical coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AbElement {
    coords: Vec<BigInt>,
}

impl AbElement {
    pub fn coords(&self) -> &[BigInt] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }
}

/// Cokernel of the relation rows `m` in `Z^{m.cols()}`.
pub fn coker(m: &IntMatrix) -> AbGroup {
    AbGroup::new(m.clone())
}

impl AbGroup {
    pub fn new(relations: IntMatrix) -> Self {
        let snf = smith_normal_form(&relations);
        let ngens = relations.cols();
        let diag = snf.diagonal();
        let torsion_positions: Vec<usize> = diag
            .iter()
            .enumerate()
            .filter(|(_, d)| **d > BigInt::one())
            .map(|(i, _)| i)
            .collect();
        let invariant_factors = torsion_positions.iter().map(|&i| diag[i].clone()).collect();
        let free_rank = ngens - snf.rank();
        AbGroup {
            ngens,
            relations,
            snf,
            torsion_positions,
            invariant_factors,
            free_rank,
        }
    }

    /// The free group `Z^n`.
    pub fn free(n: usize) -> Self {
        Self::new(IntMatrix::zeros(0, n))
    }

    pub fn ngens(&self) -> usize {
        self.ngens
    }

    pub fn relations(&self) -> &IntMatrix {
        &self.relations
    }

    pub fn snf(&self) -> &SnfDecomposition {
        &self.snf
    }

    pub fn invariant_factors(&self) -> &[BigInt] {
        &self.invariant_factors
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    /// Number of canonical coordinates.
    pub fn dim(&self) -> usize {
        self.torsion_positions.len() + self.free_rank
    }

    /// Order of the group, `None` when infinite.
    pub fn order(&self) -> Option<BigInt> {
        self.is_finite().then(|| self.invariant_factors.iter().product())
    }

    pub fn zero(&self) -> AbElement {
        AbElement {
            coords: vec![BigInt::zero(); self.dim()],
        }
    }

    /// Class of an integer vector in generator coordinates.
    pub fn canon(&self, x: &[BigInt]) -> AbElement {
        assert_eq!(x.len(), self.ngens, "vector has wrong length");
        let snf_coords = self.snf.v.vec_mul(x);
        self.element_from_snf(&snf_coords)
    }

    /// Class of the `i`-th generator.
    pub fn generator(&self, i: usize) -> AbElement {
        let mut e = vec![BigInt::zero(); self.ngens];
        e[i] = BigInt::one();
        self.canon(&e)
    }

    fn element_from_snf(&self, c: &[BigInt]) -> AbElement {
        let mut coords = Vec::with_capacity(self.dim());
        for (&p, m) in self.torsion_positions.iter().zip(&self.invariant_factors) {
            coords.push(c[p].mod_floor(m));
        }
        coords.extend(c[self.snf.rank()..].iter().cloned());
        AbElement { coords }
    }

    /// Reduces arbitrary canonical-length coordinates (torsion part not yet
    /// reduced) into canonical form.
    pub fn normalize(&self, coords: &[BigInt]) -> AbElement {
        assert_eq!(coords.len(), self.dim(), "coordinate vector has wrong length");
        let t = self.torsion_positions.len();
        let mut out: Vec<BigInt> = coords[..t]
            .iter()
            .zip(&self.invariant_factors)
            .map(|(c, m)| c.mod_floor(m))
            .collect();
        out.extend(coords[t..].iter().cloned());
        AbElement { coords: out }
    }

    /// A representative vector in generator coordinates.
    pub fn lift(&self, e: &AbElement) -> Vec<BigInt> {
        let mut c = vec![BigInt::zero(); self.ngens];
        for (&p, x) in self.torsion_positions.iter().zip(&e.coords) {
            c[p] = x.clone();
        }
        let t = self.torsion_positions.len();
        for (k, x) in e.coords[t..].iter().enumerate() {
            c[self.snf.rank() + k] = x.clone();
        }
        self.snf.v_inv.vec_mul(&c)
    }

    pub fn add(&self, a: &AbElement, b: &AbElement) -> AbElement {
        let s: Vec<BigInt> = a.coords.iter().zip(&b.coords).map(|(x, y)| x + y).collect();
        self.normalize(&s)
    }

    pub fn neg(&self, a: &AbElement) -> AbElement {
        let s: Vec<BigInt> = a.coords.iter().map(|x| -x).collect();
        self.normalize(&s)
    }

    pub fn scale(&self, k: &BigInt, a: &AbElement) -> AbElement {
        let s: Vec<BigInt> = a.coords.iter().map(|x| k * x).collect();
        self.normalize(&s)
    }

    /// Quotient by additional relations given in generator coordinates.
    pub fn quotient(&self, extra_relations: &IntMatrix) -> AbGroup {
        AbGroup::new(self.relations.vstack(extra_relations))
    }

    /// All elements of a finite group, in lexicographic coordinate order.
    pub fn enumerate(&self) -> Result<Vec<AbElement>, LatticeError> {
        if !self.is_finite() {
            return Err(LatticeError::InfiniteGroup);
        }
        let mut out = vec![Vec::new()];
        for m in &self.invariant_factors {
            let mut next = Vec::new();
            for prefix in &out {
                let mut k = BigInt::zero();
                while &k < m {
                    let mut p: Vec<BigInt> = prefix.clone();
                    p.push(k.clone());
                    next.push(p);
                    k += 1;
                }
            }
            out = next;
        }
        Ok(out.into_iter().map(|coords| AbElement { coords }).collect())
    }

    /// Coordinates of the `k`-th canonical basis element (torsion first,
    /// then free).
    pub fn basis_element(&self, k: usize) -> AbElement {
        let mut coords = vec![BigInt::zero(); self.dim()];
        coords[k] = BigInt::one();
        AbElement { coords }
    }
}

/// Image of `x` under the homomorphism induced by the integer matrix `f`
/// (columns indexed by generators of `src`, rows by generators of `dst`).
/// The caller is responsible for `f` mapping relations to relations.
pub fn hom_apply(f: &IntMatrix, src: &AbGroup, dst: &AbGroup, x: &AbElement) -> AbElement {
    assert_eq!(f.cols(), src.ngens());
    assert_eq!(f.rows(), dst.ngens());
    dst.canon(&f.mul_vec(&src.lift(x)))
}

/// Some preimage of `y` under the homomorphism induced by `f`, or `None`.
pub fn hom_preimage(f: &IntMatrix, src: &AbGroup, dst: &AbGroup, y: &AbElement) -> Option<AbElement> {
    assert_eq!(f.cols(), src.ngens());
    assert_eq!(f.rows(), dst.ngens());
    // f x + R^T z = lift(y)
    let system = f.hstack(&dst.relations().transpose());
    let sol = solve_integer(&system, &dst.lift(y))?;
    Some(src.canon(&sol[..src.ngens()]))
}
