//! Stacky fans, their box, box addition, and the correspondence between box
//! elements and group elements fixing a point.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::charring::{CharacterData, CharringError};
use crate::lattice::{
    frac, int_rank, lp_feasible, rat_vec, smith_normal_form, solve_rational, solve_rational_nonneg, AbGroup, IntMatrix,
    VarSign,
};

/// Largest supported ray count (cones are stored as bitmasks).
pub const MAX_RAYS: usize = 64;

/// Raw description of a stacky fan `(N, Sigma, beta)` with
/// `N = Z^rank + Z/m_1 + ... + Z/m_r`. Ray indices are 0-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StackyFan {
    pub rank: usize,
    pub torsion: Vec<BigInt>,
    pub rays: Vec<Vec<BigInt>>,
    pub max_cones: Vec<Vec<usize>>,
}

/// A violated hypothesis. Indices are stored 0-based and displayed 1-based.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum FanError {
    #[error("torsion order {0} must be at least 2")]
    BadTorsionOrder(BigInt),
    #[error("b_{} has length {found}, expected {expected}", .ray + 1)]
    RayLength { ray: usize, found: usize, expected: usize },
    #[error("torsion coordinate {} of b_{} is outside [0, m)", .coord + 1, .ray + 1)]
    TorsionOutOfRange { ray: usize, coord: usize },
    #[error("cone {} refers to missing ray {}", .cone + 1, .ray + 1)]
    RayIndexOutOfRange { cone: usize, ray: usize },
    #[error("cone {} repeats a ray", .cone + 1)]
    RepeatedRay { cone: usize },
    #[error("too many rays ({0}); at most 64 are supported")]
    TooManyRays(usize),
    #[error("b_{} has zero image in N/N_tors", .0 + 1)]
    ZeroRay(usize),
    #[error("ray {} lies in no cone", .0 + 1)]
    RayInNoCone(usize),
    #[error("cone {} is not simplicial", .0 + 1)]
    NotSimplicial(usize),
    #[error("Sigma does not span N_R")]
    DoesNotSpan,
    #[error("b_i do not generate N_tors")]
    TorsionNotGenerated,
    #[error("cones {} and {} do not meet in a common face", .0 + 1, .1 + 1)]
    NotAFan(usize, usize),
}

/// All hypothesis violations found for a fan.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub failures: Vec<FanError>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.failures.is_empty() {
            return write!(f, "valid");
        }
        for (k, e) in self.failures.iter().enumerate() {
            if k > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ValidationReport {}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum BoxError {
    #[error("no common cone")]
    NoCommonCone,
    #[error("does not fix a point of Z")]
    DoesNotFixPoint,
    #[error("invalid group element: {0}")]
    InvalidGroupElement(String),
}

fn mask_of(rays: &[usize]) -> u64 {
    rays.iter().fold(0u64, |m, &i| m | (1u64 << i))
}

fn rays_of(mask: u64) -> Vec<usize> {
    (0..64).filter(|i| mask >> i & 1 == 1).collect()
}

impl StackyFan {
    pub fn new(rank: usize, torsion: Vec<BigInt>, rays: Vec<Vec<BigInt>>, max_cones: Vec<Vec<usize>>) -> Self {
        StackyFan {
            rank,
            torsion,
            rays,
            max_cones,
        }
    }

    /// Convenience constructor from machine integers.
    pub fn from_small<R: AsRef<[i64]>, C: AsRef<[usize]>>(
        rank: usize,
        torsion: &[i64],
        rays: &[R],
        max_cones: &[C],
    ) -> Self {
        StackyFan {
            rank,
            torsion: torsion.iter().map(|&m| BigInt::from(m)).collect(),
            rays: rays
                .iter()
                .map(|r| r.as_ref().iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
            max_cones: max_cones.iter().map(|c| c.as_ref().to_vec()).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.rays.len()
    }

    fn structural_failures(&self) -> Vec<FanError> {
        let mut out = Vec::new();
        let width = self.rank + self.torsion.len();
        for m in &self.torsion {
            if *m < BigInt::from(2) {
                out.push(FanError::BadTorsionOrder(m.clone()));
            }
        }
        if self.n() > MAX_RAYS {
            out.push(FanError::TooManyRays(self.n()));
        }
        for (i, b) in self.rays.iter().enumerate() {
            if b.len() != width {
                out.push(FanError::RayLength {
                    ray: i,
                    found: b.len(),
                    expected: width,
                });
                continue;
            }
            for (l, m) in self.torsion.iter().enumerate() {
                let t = &b[self.rank + l];
                if t.is_negative() || t >= m {
                    out.push(FanError::TorsionOutOfRange { ray: i, coord: l });
                }
            }
        }
        for (c, cone) in self.max_cones.iter().enumerate() {
            for &r in cone {
                if r >= self.n() {
                    out.push(FanError::RayIndexOutOfRange { cone: c, ray: r });
                }
            }
            let mut sorted = cone.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != cone.len() {
                out.push(FanError::RepeatedRay { cone: c });
            }
        }
        out
    }

    fn bar_matrix(&self, rays: &[usize]) -> IntMatrix {
        let rows = (0..self.rank)
            .map(|j| rays.iter().map(|&i| self.rays[i][j].clone()).collect())
            .collect();
        IntMatrix::from_big_rows(rows, rays.len())
    }

    /// Checks every hypothesis required downstream and lists all failures.
    pub fn validate(&self) -> ValidationReport {
        let failures = self.structural_failures();
        if !failures.is_empty() {
            return ValidationReport { failures };
        }
        let mut failures = Vec::new();
        let n = self.n();
        for i in 0..n {
            if self.rays[i][..self.rank].iter().all(Zero::is_zero) {
                failures.push(FanError::ZeroRay(i));
            }
        }
        for i in 0..n {
            if !self.max_cones.iter().any(|c| c.contains(&i)) {
                failures.push(FanError::RayInNoCone(i));
            }
        }
        let mut all_simplicial = true;
        for (c, cone) in self.max_cones.iter().enumerate() {
            if int_rank(&self.bar_matrix(cone)) != cone.len() {
                failures.push(FanError::NotSimplicial(c));
                all_simplicial = false;
            }
        }
        let all: Vec<usize> = (0..n).collect();
        if int_rank(&self.bar_matrix(&all)) != self.rank {
            failures.push(FanError::DoesNotSpan);
        }
        if !self.torsion.is_empty() {
            let r = self.torsion.len();
            let mut rels: Vec<Vec<BigInt>> = (0..r)
                .map(|l| {
                    let mut row = vec![BigInt::zero(); r];
                    row[l] = self.torsion[l].clone();
                    row
                })
                .collect();
            rels.extend(self.rays.iter().map(|b| b[self.rank..].to_vec()));
            let quotient = AbGroup::new(IntMatrix::from_big_rows(rels, r));
            if quotient.order() != Some(BigInt::one()) {
                failures.push(FanError::TorsionNotGenerated);
            }
        }
        if all_simplicial {
            for a in 0..self.max_cones.len() {
                for b in a + 1..self.max_cones.len() {
                    if !self.meet_in_common_face(&self.max_cones[a], &self.max_cones[b]) {
                        failures.push(FanError::NotAFan(a, b));
                    }
                }
            }
        }
        ValidationReport { failures }
    }

    /// For simplicial cones s, t the intersection is the face spanned by
    /// the shared rays unless some point of s with positive weight outside
    /// the shared rays also lies in t.
    fn meet_in_common_face(&self, s: &[usize], t: &[usize]) -> bool {
        let only_s: Vec<usize> = s.iter().copied().filter(|i| !t.contains(i)).collect();
        let only_t: Vec<usize> = t.iter().copied().filter(|i| !s.contains(i)).collect();
        let shared: Vec<usize> = s.iter().copied().filter(|i| t.contains(i)).collect();
        if only_s.is_empty() || only_t.is_empty() {
            // one cone is a face of the other
            return true;
        }
        let nvars = only_s.len() + only_t.len() + shared.len();
        let mut a: Vec<Vec<BigRational>> = Vec::with_capacity(self.rank + 1);
        for j in 0..self.rank {
            let mut row = Vec::with_capacity(nvars);
            row.extend(
                only_s
                    .iter()
                    .map(|&i| BigRational::from_integer(self.rays[i][j].clone())),
            );
            row.extend(
                only_t
                    .iter()
                    .map(|&i| BigRational::from_integer(-self.rays[i][j].clone())),
            );
            row.extend(
                shared
                    .iter()
                    .map(|&i| BigRational::from_integer(self.rays[i][j].clone())),
            );
            a.push(row);
        }
        let mut norm = vec![BigRational::zero(); nvars];
        for x in norm.iter_mut().take(only_s.len()) {
            *x = BigRational::one();
        }
        a.push(norm);
        let mut b = vec![BigRational::zero(); self.rank];
        b.push(BigRational::one());
        let mut signs = vec![VarSign::Nonneg; only_s.len() + only_t.len()];
        signs.extend(std::iter::repeat_n(VarSign::Free, shared.len()));
        !lp_feasible(&a, &b, &signs)
    }

    /// Validates and returns the fan ready for computation.
    pub fn into_fan(self) -> Result<Fan, ValidationReport> {
        let report = self.validate();
        if !report.is_valid() {
            return Err(report);
        }
        let mut max_masks: Vec<u64> = self.max_cones.iter().map(|c| mask_of(c)).collect();
        max_masks.sort_unstable();
        max_masks.dedup();
        let snapshot: Vec<u64> = max_masks.clone();
        max_masks.retain(|&m| !snapshot.iter().any(|&o| o != m && o & m == m));
        Ok(Fan {
            data: self,
            max_masks,
            box_cache: OnceLock::new(),
            double_box_cache: OnceLock::new(),
            char_cache: OnceLock::new(),
        })
    }
}

/// An element `v` of `N` whose image lies in the half-open parallelepiped of
/// its minimal cone.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BoxElement {
    /// Coordinates in `Z^rank + Z/m_1 + ...`, torsion parts in `[0, m)`.
    pub v: Vec<BigInt>,
    /// Rays of the minimal cone containing the image of `v`, ascending.
    pub cone: Vec<usize>,
    /// Coefficients with `vbar = sum q_i bbar_i`, zero off the minimal cone.
    pub q: Vec<BigRational>,
}

impl BoxElement {
    pub fn is_identity(&self) -> bool {
        self.v.iter().all(Zero::is_zero)
    }

    pub fn cone_mask(&self) -> u64 {
        mask_of(&self.cone)
    }

    pub fn age(&self) -> BigRational {
        self.q.iter().fold(BigRational::zero(), |a, x| a + x)
    }

    fn sort_key_cmp(&self, other: &Self) -> Ordering {
        other
            .is_identity()
            .cmp(&self.is_identity())
            .then_with(|| self.cone.cmp(&other.cone))
            .then_with(|| self.q.cmp(&other.q))
            .then_with(|| self.v.cmp(&other.v))
    }
}

/// Phases of an element of `G`: `gamma_i = exp(2 pi i gamma[i])`, and
/// likewise for the torsion coordinates `s_l`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupElement {
    pub gamma: Vec<BigRational>,
    pub s: Vec<BigRational>,
}

/// Ordered pairs of box indices whose elements lie in a common cone.
#[derive(Clone, Debug)]
pub struct DoubleBox {
    size: usize,
    member: Vec<bool>,
    pairs: Vec<(usize, usize)>,
}

impl DoubleBox {
    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.member[i * self.size + j]
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// Pairs with `i <= j`.
    pub fn unordered_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.pairs.iter().copied().filter(|(i, j)| i <= j)
    }
}

struct BoxData {
    elements: Vec<BoxElement>,
    index: HashMap<Vec<BigInt>, usize>,
}

/// A validated stacky fan with lazily computed derived data.
pub struct Fan {
    data: StackyFan,
    max_masks: Vec<u64>,
    box_cache: OnceLock<BoxData>,
    double_box_cache: OnceLock<DoubleBox>,
    char_cache: OnceLock<Result<CharacterData, CharringError>>,
}

impl fmt::Debug for Fan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Fan").field("data", &self.data).finish()
    }
}

impl Fan {
    pub fn stacky(&self) -> &StackyFan {
        &self.data
    }

    pub fn n(&self) -> usize {
        self.data.n()
    }

    pub fn rank(&self) -> usize {
        self.data.rank
    }

    pub fn torsion(&self) -> &[BigInt] {
        &self.data.torsion
    }

    pub fn ray(&self, i: usize) -> &[BigInt] {
        &self.data.rays[i]
    }

    pub fn ray_bar(&self, i: usize) -> &[BigInt] {
        &self.data.rays[i][..self.data.rank]
    }

    /// Maximal cones as ray lists (non-maximal duplicates removed).
    pub fn max_cones(&self) -> Vec<Vec<usize>> {
        self.max_masks.iter().map(|&m| rays_of(m)).collect()
    }

    pub fn max_cone_masks(&self) -> &[u64] {
        &self.max_masks
    }

    /// Whether the rays in `mask` span a cone of the fan.
    pub fn is_face(&self, mask: u64) -> bool {
        self.max_masks.iter().any(|&m| m & mask == mask)
    }

    /// The d x k matrix whose columns are the images of the listed rays.
    pub fn bar_matrix(&self, rays: &[usize]) -> IntMatrix {
        self.data.bar_matrix(rays)
    }

    fn bar_rational_rows(&self, rays: &[usize]) -> Vec<Vec<BigRational>> {
        (0..self.rank())
            .map(|j| {
                rays.iter()
                    .map(|&i| BigRational::from_integer(self.data.rays[i][j].clone()))
                    .collect()
            })
            .collect()
    }

    /// The smallest cone containing the rational point `vbar`, if any.
    pub fn minimal_cone(&self, vbar: &[BigRational]) -> Option<Vec<usize>> {
        assert_eq!(vbar.len(), self.rank(), "point has wrong dimension");
        if vbar.iter().all(Zero::is_zero) {
            return Some(Vec::new());
        }
        for &m in &self.max_masks {
            let rays = rays_of(m);
            let a = self.bar_rational_rows(&rays);
            if let Some(q) = solve_rational_nonneg(&a, vbar).expect("maximal cones are simplicial") {
                return Some(
                    rays.iter()
                        .zip(&q)
                        .filter(|(_, x)| x.is_positive())
                        .map(|(&i, _)| i)
                        .collect(),
                );
            }
        }
        None
    }

    fn torsion_points(&self) -> Vec<Vec<BigInt>> {
        let mut out = vec![Vec::new()];
        for m in &self.data.torsion {
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
        out
    }

    /// Box elements lying over the half-open parallelepiped of the cone.
    pub fn box_of_cone(&self, cone: &[usize]) -> Vec<BoxElement> {
        let mut rays = cone.to_vec();
        rays.sort_unstable();
        assert!(self.is_face(mask_of(&rays)), "not a cone of the fan");
        let n = self.n();
        let d = self.rank();
        let b = self.bar_matrix(&rays);
        let k = rays.len();
        let snf = smith_normal_form(&b);
        let diag = snf.diagonal();
        let a = self.bar_rational_rows(&rays);
        // enumerate U^{-1} (c, 0) with 0 <= c_i < d_i
        let mut coset_coords: Vec<Vec<BigInt>> = vec![Vec::new()];
        for di in diag.iter().take(k) {
            let mut next = Vec::new();
            for prefix in &coset_coords {
                let mut c = BigInt::zero();
                while &c < di {
                    let mut p = prefix.clone();
                    p.push(c.clone());
                    next.push(p);
                    c += 1;
                }
            }
            coset_coords = next;
        }
        let torsion = self.torsion_points();
        let mut out = Vec::new();
        for c in coset_coords {
            let mut full = c;
            full.resize(d, BigInt::zero());
            let x = snf.u_inv.mul_vec(&full);
            let coeffs = solve_rational(&a, &rat_vec(&x))
                .expect("cone is simplicial")
                .expect("point lies in the span of the cone");
            let mut q = vec![BigRational::zero(); n];
            let mut vbar = x.clone();
            for (&i, qi) in rays.iter().zip(&coeffs) {
                let fl = qi.floor().to_integer();
                if !fl.is_zero() {
                    for (vj, bj) in vbar.iter_mut().zip(self.ray_bar(i)) {
                        *vj -= &fl * bj;
                    }
                }
                q[i] = frac(qi);
            }
            let min_cone: Vec<usize> = (0..n).filter(|&i| !q[i].is_zero()).collect();
            for t in &torsion {
                let mut v = vbar.clone();
                v.extend(t.iter().cloned());
                out.push(BoxElement {
                    v,
                    cone: min_cone.clone(),
                    q: q.clone(),
                });
            }
        }
        out.sort_by(|x, y| x.sort_key_cmp(y));
        out
    }

    fn box_data(&self) -> &BoxData {
        self.box_cache.get_or_init(|| {
            let mut seen: HashMap<Vec<BigInt>, BoxElement> = HashMap::new();
            for &m in &self.max_masks {
                for e in self.box_of_cone(&rays_of(m)) {
                    seen.entry(e.v.clone()).or_insert(e);
                }
            }
            let mut elements: Vec<BoxElement> = seen.into_values().collect();
            elements.sort_by(|x, y| x.sort_key_cmp(y));
            let index = elements.iter().enumerate().map(|(k, e)| (e.v.clone(), k)).collect();
            BoxData { elements, index }
        })
    }

    /// The whole box, identity first, in deterministic order.
    pub fn box_elements(&self) -> &[BoxElement] {
        &self.box_data().elements
    }

    pub fn box_element(&self, k: usize) -> &BoxElement {
        &self.box_data().elements[k]
    }

    pub fn box_len(&self) -> usize {
        self.box_data().elements.len()
    }

    /// Index of the box element with coordinates `v`, if it is one.
    pub fn box_index(&self, v: &[BigInt]) -> Option<usize> {
        self.box_data().index.get(v).copied()
    }

    /// Index of the identity element (always 0).
    pub fn identity(&self) -> usize {
        0
    }

    /// Reduces the torsion coordinates of an element of `N`.
    pub fn reduce(&self, v: &mut [BigInt]) {
        for (l, m) in self.data.torsion.iter().enumerate() {
            let x = &mut v[self.rank() + l];
            *x = x.mod_floor(m);
        }
    }

    /// Mask of the smallest cone containing both elements, if it exists.
    pub fn common_cone(&self, i: usize, j: usize) -> Option<u64> {
        let m = self.box_element(i).cone_mask() | self.box_element(j).cone_mask();
        self.is_face(m).then_some(m)
    }

    /// The box element representing `v_i + v_j`.
    pub fn box_add(&self, i: usize, j: usize) -> Result<usize, BoxError> {
        self.common_cone(i, j).ok_or(BoxError::NoCommonCone)?;
        let (a, b) = (self.box_element(i), self.box_element(j));
        let mut v: Vec<BigInt> = a.v.iter().zip(&b.v).map(|(x, y)| x + y).collect();
        for k in 0..self.n() {
            if &a.q[k] + &b.q[k] >= BigRational::one() {
                for (vj, bj) in v.iter_mut().zip(self.ray(k)) {
                    *vj -= bj;
                }
            }
        }
        self.reduce(&mut v);
        Ok(self
            .box_index(&v)
            .expect("box is closed under addition in a common cone"))
    }

    /// The group element of `G` corresponding to a box element.
    pub fn group_element(&self, k: usize) -> GroupElement {
        let e = self.box_element(k);
        let d = self.rank();
        let s = self
            .data
            .torsion
            .iter()
            .enumerate()
            .map(|(l, m)| {
                let twist = (0..self.n()).fold(BigRational::zero(), |acc, i| {
                    acc - &e.q[i] * BigRational::from_integer(self.data.rays[i][d + l].clone())
                });
                (frac(&twist) + BigRational::from_integer(e.v[d + l].clone())) / BigRational::from_integer(m.clone())
            })
            .collect();
        GroupElement { gamma: e.q.clone(), s }
    }

    /// The box element corresponding to a group element fixing a point.
    pub fn box_from_group(&self, g: &GroupElement) -> Result<usize, BoxError> {
        let n = self.n();
        let d = self.rank();
        let bad = |msg: &str| BoxError::InvalidGroupElement(msg.to_string());
        if g.gamma.len() != n || g.s.len() != self.data.torsion.len() {
            return Err(bad("wrong number of phases"));
        }
        let in_unit = |x: &BigRational| !x.is_negative() && *x < BigRational::one();
        if !g.gamma.iter().chain(&g.s).all(in_unit) {
            return Err(bad("phases must lie in [0, 1)"));
        }
        let mut vbar = Vec::with_capacity(d);
        for j in 0..d {
            let sum = (0..n).fold(BigRational::zero(), |acc, i| {
                acc + &g.gamma[i] * BigRational::from_integer(self.data.rays[i][j].clone())
            });
            if !sum.is_integer() {
                return Err(bad("free relations of G are violated"));
            }
            vbar.push(sum.to_integer());
        }
        let mut v = vbar;
        for (l, m) in self.data.torsion.iter().enumerate() {
            let mq = BigRational::from_integer(m.clone());
            let twist = (0..n).fold(BigRational::zero(), |acc, i| {
                acc + &g.gamma[i] * BigRational::from_integer(self.data.rays[i][d + l].clone())
            });
            if !(&mq * &g.s[l] + twist).is_integer() {
                return Err(bad("torsion relations of G are violated"));
            }
            v.push((&mq * &g.s[l]).floor().to_integer());
        }
        let support = mask_of(&(0..n).filter(|&i| !g.gamma[i].is_zero()).collect::<Vec<_>>());
        if !self.is_face(support) {
            return Err(BoxError::DoesNotFixPoint);
        }
        let k = self.box_index(&v).expect("fixed-point group elements land in the box");
        debug_assert_eq!(self.box_element(k).q, g.gamma);
        Ok(k)
    }

    /// All ordered pairs of box elements lying in a common cone.
    pub fn double_box(&self) -> &DoubleBox {
        self.double_box_cache.get_or_init(|| {
            let size = self.box_len();
            let mut member = vec![false; size * size];
            let mut pairs = Vec::new();
            for i in 0..size {
                for j in 0..size {
                    if self.common_cone(i, j).is_some() {
                        member[i * size + j] = true;
                        pairs.push((i, j));
                    }
                }
            }
            DoubleBox { size, member, pairs }
        })
    }

    pub(crate) fn char_cache(&self) -> &OnceLock<Result<CharacterData, CharringError>> {
        &self.char_cache
    }
}
