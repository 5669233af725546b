//! Character groups of `G`, the classes `x_i` and `tilde x_i`, and the
//! integral Chow ring presentation together with its sector ideals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::fan::Fan;
use crate::gradedpoly::{Poly, Provenance, RingPresentation, Variable};
use crate::lattice::{solve_integer, AbElement, AbGroup, Coefficients, IntMatrix};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum CharringError {
    #[error("invariant-factor mismatch between X(G) and its rigidification")]
    InvariantFactorMismatch,
}

/// The character group `X(G)` of the full group, that of the rigidified
/// group, and the associated formula relating their classes.
#[derive(Clone, Debug)]
pub struct CharacterData {
    /// `Z^{n+r}` modulo the rows of `beta_aug^T`.
    pub x_full: AbGroup,
    /// `Z^n` modulo the rows of `bar beta^T`.
    pub x_rig: AbGroup,
    pub tilde_x: Vec<AbElement>,
    pub x: Vec<AbElement>,
    /// `(n+r) x n` matrix of `[m] -> [(m, 0)]` in generator coordinates.
    pub iota: IntMatrix,
    /// Identification `X_full -> X_rig` in canonical coordinates.
    pub psi: IntMatrix,
    /// Associated formula: `psi(tilde x_i) = sum_k f[k][i] x_k`.
    pub f: IntMatrix,
}

impl CharacterData {
    pub fn new(fan: &Fan) -> Result<Self, CharringError> {
        let n = fan.n();
        let d = fan.rank();
        let r = fan.torsion().len();
        let mut full_rows: Vec<Vec<BigInt>> = Vec::with_capacity(d + r);
        for j in 0..d + r {
            let mut row: Vec<BigInt> = (0..n).map(|i| fan.ray(i)[j].clone()).collect();
            row.resize(n + r, BigInt::zero());
            if j >= d {
                row[n + j - d] = fan.torsion()[j - d].clone();
            }
            full_rows.push(row);
        }
        let x_full = AbGroup::new(IntMatrix::from_big_rows(full_rows, n + r));
        let rig_rows: Vec<Vec<BigInt>> = (0..d)
            .map(|j| (0..n).map(|i| fan.ray(i)[j].clone()).collect())
            .collect();
        let x_rig = AbGroup::new(IntMatrix::from_big_rows(rig_rows, n));
        if x_full.invariant_factors() != x_rig.invariant_factors() || x_full.free_rank() != x_rig.free_rank() {
            return Err(CharringError::InvariantFactorMismatch);
        }
        let tilde_x: Vec<AbElement> = (0..n).map(|i| x_full.generator(i)).collect();
        let x: Vec<AbElement> = (0..n).map(|i| x_rig.generator(i)).collect();
        let mut iota = IntMatrix::zeros(n + r, n);
        for i in 0..n {
            iota[(i, i)] = BigInt::one();
        }

        let dim = x_rig.dim();
        let ntors = x_rig.invariant_factors().len();
        let mut psi = IntMatrix::identity(dim);
        if x_rig.free_rank() > 0 {
            // make psi . iota* orientation preserving on the free part
            let phi = Self::phi_matrix(&x_full, &x_rig, &iota, &psi);
            let free: Vec<usize> = (ntors..dim).collect();
            let block = IntMatrix::from_big_rows(
                free.iter()
                    .map(|&a| free.iter().map(|&b| phi[(a, b)].clone()).collect())
                    .collect(),
                free.len(),
            );
            if block.det().is_negative() {
                psi.negate_row(dim - 1);
            }
        }
        let mut data = CharacterData {
            x_full,
            x_rig,
            tilde_x,
            x,
            iota,
            psi,
            f: IntMatrix::zeros(n, n),
        };
        data.f = data.associated_formula();
        Ok(data)
    }

    /// Matrix of `psi . iota*` acting on canonical coordinates of `X_rig`.
    fn phi_matrix(x_full: &AbGroup, x_rig: &AbGroup, iota: &IntMatrix, psi: &IntMatrix) -> IntMatrix {
        let dim = x_rig.dim();
        let mut phi = IntMatrix::zeros(dim, dim);
        for b in 0..dim {
            let lifted = x_rig.lift(&x_rig.basis_element(b));
            let img = x_full.canon(&iota.mul_vec(&lifted));
            let coords = psi.mul_vec(img.coords());
            for (a, c) in coords.into_iter().enumerate() {
                phi[(a, b)] = c;
            }
        }
        phi
    }

    pub fn psi_apply(&self, e: &AbElement) -> AbElement {
        self.x_rig.normalize(&self.psi.mul_vec(e.coords()))
    }

    fn associated_formula(&self) -> IntMatrix {
        let n = self.x.len();
        let rel_t = self.x_rig.relations().transpose();
        let mut f = IntMatrix::zeros(n, n);
        for i in 0..n {
            let target = self.x_rig.lift(&self.psi_apply(&self.tilde_x[i]));
            let mut e = IntMatrix::zeros(n, 1);
            e[(i, 0)] = BigInt::one();
            if let Some(sol) = solve_integer(&e.hstack(&rel_t), &target) {
                f[(i, i)] = sol[0].clone();
                continue;
            }
            let sol = solve_integer(&IntMatrix::identity(n).hstack(&rel_t), &target).expect("the x_k generate X_rig");
            for k in 0..n {
                f[(k, i)] = sol[k].clone();
            }
        }
        f
    }

    /// Checks `psi(tilde x_i) = sum_k f[k][i] x_k` for every `i`.
    pub fn formula_holds(&self) -> bool {
        let n = self.x.len();
        (0..n).all(|i| {
            let lhs = self.psi_apply(&self.tilde_x[i]);
            let rhs = self.x_rig.canon(&self.f.column(i));
            lhs == rhs
        })
    }

    /// `tilde x_i` as a linear form in `x_1, ..., x_n`.
    pub fn tilde_poly(&self, i: usize, nvars: usize) -> Poly {
        let n = self.x.len();
        let coeffs: Vec<(usize, BigInt)> = (0..n).map(|k| (k, self.f[(k, i)].clone())).collect();
        Poly::linear(nvars, &coeffs)
    }
}

impl Fan {
    pub fn character_data(&self) -> Result<&CharacterData, CharringError> {
        self.char_cache()
            .get_or_init(|| CharacterData::new(self))
            .as_ref()
            .map_err(Clone::clone)
    }
}

pub fn character_data(fan: &Fan) -> Result<&CharacterData, CharringError> {
    fan.character_data()
}

/// The `d` linear relations `sum_i theta_j(bbar_i) x_i`, in `nvars` variables.
pub fn linear_ideal(fan: &Fan, nvars: usize) -> Vec<Poly> {
    (0..fan.rank())
        .map(|j| {
            let coeffs: Vec<(usize, BigInt)> = (0..fan.n()).map(|i| (i, fan.ray(i)[j].clone())).collect();
            Poly::linear(nvars, &coeffs)
        })
        .filter(|p| !p.is_zero())
        .collect()
}

/// Minimal ray sets `S`, disjoint from `base`, such that `S + base` spans no
/// cone. With `base = 0` these are the minimal non-faces.
pub fn minimal_nonfaces(fan: &Fan, base: u64) -> Vec<u64> {
    let n = fan.n();
    let free: Vec<usize> = (0..n).filter(|i| base >> i & 1 == 0).collect();
    let mut found: Vec<u64> = Vec::new();
    let max_size = (fan.rank() + 1).min(free.len());
    for size in 1..=max_size {
        let mut combo: Vec<usize> = (0..size).collect();
        loop {
            let mask = combo.iter().fold(0u64, |m, &k| m | 1u64 << free[k]);
            if !found.iter().any(|&s| s & !mask == 0) && !fan.is_face(mask | base) {
                found.push(mask);
            }
            // next combination
            let mut k = size;
            while k > 0 && combo[k - 1] == free.len() - size + k - 1 {
                k -= 1;
            }
            if k == 0 {
                break;
            }
            combo[k - 1] += 1;
            for j in k..size {
                combo[j] = combo[j - 1] + 1;
            }
        }
    }
    found
}

fn tilde_monomials(fan: &Fan, masks: &[u64], nvars: usize) -> Result<Vec<Poly>, CharringError> {
    let cd = fan.character_data()?;
    Ok(masks
        .iter()
        .map(|&m| {
            (0..fan.n())
                .filter(|i| m >> i & 1 == 1)
                .fold(Poly::one(nvars), |acc, i| &acc * &cd.tilde_poly(i, nvars))
        })
        .collect())
}

/// Stanley-Reisner generators `prod tilde x_i` over minimal non-faces.
pub fn sr_ideal(fan: &Fan, nvars: usize) -> Result<Vec<Poly>, CharringError> {
    tilde_monomials(fan, &minimal_nonfaces(fan, 0), nvars)
}

/// Generators of the sector ideal of box element `k`: products of
/// `tilde x_i` over minimal ray sets lying in no cone of the star of its
/// minimal cone.
pub fn sector_ideal(fan: &Fan, k: usize, nvars: usize) -> Result<Vec<Poly>, CharringError> {
    tilde_monomials(fan, &minimal_nonfaces(fan, fan.box_element(k).cone_mask()), nvars)
}

pub fn x_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

/// `Z[x_1..x_n] / (I + C)`.
pub fn sr_ring(fan: &Fan) -> Result<RingPresentation, CharringError> {
    let n = fan.n();
    let variables = x_names(n)
        .into_iter()
        .map(|name| Variable {
            name,
            degree: BigRational::one(),
        })
        .collect();
    let mut p = RingPresentation::new(variables, Coefficients::Integers);
    for g in linear_ideal(fan, n) {
        p.push(g, Provenance::Linear);
    }
    for g in sr_ideal(fan, n)? {
        p.push(g, Provenance::StanleyReisner);
    }
    Ok(p)
}
