//! Logarithmic traces and restrictions, the index sets `B+` and `B-`,
//! inertial products and the presentations of the inertial Chow rings.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::charring::{linear_ideal, sector_ideal, sr_ideal, x_names, CharringError};
use crate::fan::Fan;
use crate::gradedpoly::{GradedError, GradedIdeal, Poly, Provenance, RingPresentation, Variable};
use crate::lattice::Coefficients;
use crate::parallel::Execution;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum InertialError {
    #[error("no common cone")]
    NoCommonCone,
    #[error("tuple does not multiply to identity")]
    NotIdentity,
    #[error("non-integral logarithmic restriction")]
    NonIntegral,
    #[error("bundle has {found} coefficients, expected {expected}")]
    BundleLength { found: usize, expected: usize },
    #[error("bundle coefficients must be nonnegative")]
    NegativeBundle,
    #[error("asymptotic products have no twisting class")]
    AsymptoticTwist,
    #[error(transparent)]
    Charring(#[from] CharringError),
    #[error(transparent)]
    Graded(#[from] GradedError),
}

/// `V = sum a_i L_i` with `a_i >= 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Bundle {
    pub a: Vec<BigInt>,
}

impl Bundle {
    pub fn new(a: Vec<BigInt>) -> Result<Self, InertialError> {
        if a.iter().any(Signed::is_negative) {
            return Err(InertialError::NegativeBundle);
        }
        Ok(Bundle { a })
    }

    pub fn from_small(a: &[i64]) -> Self {
        Bundle::new(a.iter().map(|&x| BigInt::from(x)).collect()).expect("nonnegative bundle")
    }

    /// `k (L_1 + ... + L_n)`.
    pub fn uniform(n: usize, k: i64) -> Self {
        Bundle {
            a: vec![BigInt::from(k); n],
        }
    }

    pub fn tangent(n: usize) -> Self {
        Self::uniform(n, 1)
    }

    fn check(&self, fan: &Fan) -> Result<(), InertialError> {
        if self.a.len() != fan.n() {
            return Err(InertialError::BundleLength {
                found: self.a.len(),
                expected: fan.n(),
            });
        }
        Ok(())
    }

    fn exponent(&self, i: usize) -> u32 {
        self.a[i].to_u32().expect("bundle coefficient fits in u32")
    }
}

/// A class `sum c_i L_i + c_0 1` in K-theory with rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct KClass {
    pub coeffs: Vec<BigRational>,
    pub trivial: BigRational,
}

impl KClass {
    pub fn zero(n: usize) -> Self {
        KClass {
            coeffs: vec![BigRational::zero(); n],
            trivial: BigRational::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.trivial.is_zero() && self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_integral(&self) -> bool {
        self.trivial.is_integer() && self.coeffs.iter().all(BigRational::is_integer)
    }

    pub fn is_nonnegative(&self) -> bool {
        !self.trivial.is_negative() && !self.coeffs.iter().any(Signed::is_negative)
    }

    /// The class `sum_{i in s} a_i L_i`.
    pub fn on_indices(bundle: &Bundle, s: &[usize]) -> Self {
        let mut k = KClass::zero(bundle.a.len());
        for &i in s {
            k.coeffs[i] = BigRational::from_integer(bundle.a[i].clone());
        }
        k
    }
}

impl fmt::Display for KClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| format!("{c}*L{}", i + 1))
            .collect();
        if !self.trivial.is_zero() {
            parts.push(format!("{}*1", self.trivial));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Which inertial product to use.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ProductKind {
    Orbifold,
    Virtual,
    VPlus(Bundle),
    VMinus(Bundle),
    PlusInfinity,
    MinusInfinity,
}

impl ProductKind {
    pub fn name(&self) -> &'static str {
        match self {
            ProductKind::Orbifold => "orbifold",
            ProductKind::Virtual => "virtual",
            ProductKind::VPlus(_) => "v-plus",
            ProductKind::VMinus(_) => "v-minus",
            ProductKind::PlusInfinity => "plus-inf",
            ProductKind::MinusInfinity => "minus-inf",
        }
    }

    pub fn coefficients(&self) -> Coefficients {
        match self {
            ProductKind::PlusInfinity | ProductKind::MinusInfinity => Coefficients::Rationals,
            _ => Coefficients::Integers,
        }
    }

    pub fn bundle(&self) -> Option<&Bundle> {
        match self {
            ProductKind::VPlus(b) | ProductKind::VMinus(b) => Some(b),
            _ => None,
        }
    }

    fn check(&self, fan: &Fan) -> Result<(), InertialError> {
        self.bundle().map_or(Ok(()), |b| b.check(fan))
    }
}

/// How the index set `B-` treats rays where `q_1 + q_2 = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MinusRule {
    /// Both coordinates nonzero and `q_1 + q_2 < 1`.
    Strict,
    /// Both coordinates nonzero and `q_1 + q_2 <= 1`.
    Inclusive,
}

pub fn q_vector(fan: &Fan, k: usize) -> &[BigRational] {
    &fan.box_element(k).q
}

pub fn age(fan: &Fan, k: usize) -> BigRational {
    fan.box_element(k).age()
}

/// `L(g)(V) = sum a_i q_i L_i`.
pub fn log_trace(fan: &Fan, k: usize, bundle: &Bundle) -> Result<KClass, InertialError> {
    bundle.check(fan)?;
    let mut out = KClass::zero(fan.n());
    for ((c, q), a) in out.coeffs.iter_mut().zip(q_vector(fan, k)).zip(&bundle.a) {
        *c = q * BigRational::from_integer(a.clone());
    }
    Ok(out)
}

/// `V(g) = sum_k L(g_k)(V|) + V^g - V|` for a tuple of box elements whose
/// group elements multiply to the identity.
pub fn log_restriction(fan: &Fan, tuple: &[usize], bundle: &Bundle) -> Result<KClass, InertialError> {
    bundle.check(fan)?;
    let n = fan.n();
    let groups: Vec<_> = tuple.iter().map(|&k| fan.group_element(k)).collect();
    let integral = |v: &dyn Fn(&crate::fan::GroupElement) -> BigRational| {
        groups
            .iter()
            .fold(BigRational::zero(), |acc, g| acc + v(g))
            .is_integer()
    };
    for i in 0..n {
        if !integral(&|g| g.gamma[i].clone()) {
            return Err(InertialError::NotIdentity);
        }
    }
    for l in 0..fan.torsion().len() {
        if !integral(&|g| g.s[l].clone()) {
            return Err(InertialError::NotIdentity);
        }
    }
    let mut out = KClass::zero(n);
    for i in 0..n {
        let a = BigRational::from_integer(bundle.a[i].clone());
        let total = tuple
            .iter()
            .fold(BigRational::zero(), |acc, &k| acc + &fan.box_element(k).q[i]);
        let fixed = if total.is_zero() {
            a.clone()
        } else {
            BigRational::zero()
        };
        out.coeffs[i] = &a * total + fixed - a;
    }
    if !out.is_integral() {
        return Err(InertialError::NonIntegral);
    }
    Ok(out)
}

fn pair_sums(fan: &Fan, i: usize, j: usize) -> Result<Vec<(BigRational, bool)>, InertialError> {
    fan.common_cone(i, j).ok_or(InertialError::NoCommonCone)?;
    let (a, b) = (&fan.box_element(i).q, &fan.box_element(j).q);
    Ok(a.iter()
        .zip(b)
        .map(|(x, y)| (x + y, !x.is_zero() && !y.is_zero()))
        .collect())
}

/// `B+ = {i : q_{1,i} + q_{2,i} >= 1}`.
pub fn b_plus(fan: &Fan, i: usize, j: usize) -> Result<Vec<usize>, InertialError> {
    Ok(pair_sums(fan, i, j)?
        .iter()
        .enumerate()
        .filter(|(_, (s, _))| *s >= BigRational::one())
        .map(|(k, _)| k)
        .collect())
}

/// `B- = {i : q_{1,i} + q_{2,i} < 1, both nonzero}`.
pub fn b_minus(fan: &Fan, i: usize, j: usize) -> Result<Vec<usize>, InertialError> {
    b_minus_with(fan, i, j, MinusRule::Strict)
}

pub fn b_minus_with(fan: &Fan, i: usize, j: usize, rule: MinusRule) -> Result<Vec<usize>, InertialError> {
    let one = BigRational::one();
    Ok(pair_sums(fan, i, j)?
        .iter()
        .enumerate()
        .filter(|(_, (s, both))| {
            *both
                && match rule {
                    MinusRule::Strict => *s < one,
                    MinusRule::Inclusive => *s <= one,
                }
        })
        .map(|(k, _)| k)
        .collect())
}

/// Rays where the two phases sum to exactly one.
pub fn b_equal_one(fan: &Fan, i: usize, j: usize) -> Result<Vec<usize>, InertialError> {
    Ok(pair_sums(fan, i, j)?
        .iter()
        .enumerate()
        .filter(|(_, (s, _))| s.is_one())
        .map(|(k, _)| k)
        .collect())
}

pub fn v_plus(fan: &Fan, i: usize, j: usize, bundle: &Bundle) -> Result<KClass, InertialError> {
    bundle.check(fan)?;
    Ok(KClass::on_indices(bundle, &b_plus(fan, i, j)?))
}

pub fn v_minus(fan: &Fan, i: usize, j: usize, bundle: &Bundle) -> Result<KClass, InertialError> {
    bundle.check(fan)?;
    Ok(KClass::on_indices(bundle, &b_minus(fan, i, j)?))
}

/// `prod tilde x_i^{e_i}` as a polynomial in `x_1..x_n`.
fn tilde_product(fan: &Fan, exps: &[(usize, u32)]) -> Result<Poly, InertialError> {
    let cd = fan.character_data()?;
    let n = fan.n();
    Ok(exps
        .iter()
        .filter(|(_, e)| *e > 0)
        .fold(Poly::one(n), |acc, &(i, e)| &acc * &cd.tilde_poly(i, n).pow(e)))
}

/// The twisting class of a pair, a polynomial in `x_1..x_n`.
pub fn twist(fan: &Fan, kind: &ProductKind, i: usize, j: usize) -> Result<Poly, InertialError> {
    kind.check(fan)?;
    let sums = pair_sums(fan, i, j)?;
    let one = BigRational::one();
    let mut exps: Vec<(usize, u32)> = sums
        .iter()
        .enumerate()
        .filter(|(_, (s, _))| *s > one)
        .map(|(k, _)| (k, 1))
        .collect();
    match kind {
        ProductKind::Orbifold => {}
        ProductKind::VPlus(b) => exps.extend(b_plus(fan, i, j)?.into_iter().map(|k| (k, b.exponent(k)))),
        ProductKind::VMinus(b) => exps.extend(b_minus(fan, i, j)?.into_iter().map(|k| (k, b.exponent(k)))),
        ProductKind::Virtual => exps.extend(b_minus(fan, i, j)?.into_iter().map(|k| (k, 1))),
        ProductKind::PlusInfinity | ProductKind::MinusInfinity => return Err(InertialError::AsymptoticTwist),
    }
    tilde_product(fan, &exps)
}

/// `y^{v_i} * y^{v_j} = coefficient * y^{v_target}`, or `None` for zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StarValue {
    pub target: usize,
    pub coefficient: Poly,
}

pub fn star_product(fan: &Fan, kind: &ProductKind, i: usize, j: usize) -> Result<Option<StarValue>, InertialError> {
    star_product_with(fan, kind, i, j, MinusRule::Strict)
}

/// As [`star_product`], with a choice of rule for `B-`.
pub fn star_product_with(
    fan: &Fan,
    kind: &ProductKind,
    i: usize,
    j: usize,
    rule: MinusRule,
) -> Result<Option<StarValue>, InertialError> {
    kind.check(fan)?;
    if fan.common_cone(i, j).is_none() {
        return Ok(None);
    }
    let target = fan.box_add(i, j).map_err(|_| InertialError::NoCommonCone)?;
    let plus = b_plus(fan, i, j)?;
    let minus = b_minus_with(fan, i, j, rule)?;
    let ones = |s: &[usize]| s.iter().map(|&k| (k, 1)).collect::<Vec<_>>();
    let exps: Vec<(usize, u32)> = match kind {
        ProductKind::Orbifold => ones(&plus),
        ProductKind::VPlus(b) => plus.iter().map(|&k| (k, b.exponent(k) + 1)).collect(),
        ProductKind::VMinus(b) => {
            let mut e: Vec<(usize, u32)> = minus.iter().map(|&k| (k, b.exponent(k))).collect();
            e.extend(ones(&plus));
            e
        }
        ProductKind::Virtual => {
            let mut e = ones(&minus);
            e.extend(ones(&plus));
            e
        }
        ProductKind::PlusInfinity => {
            if !plus.is_empty() {
                return Ok(None);
            }
            Vec::new()
        }
        ProductKind::MinusInfinity => {
            if !minus.is_empty() {
                return Ok(None);
            }
            ones(&plus)
        }
    };
    Ok(Some(StarValue {
        target,
        coefficient: tilde_product(fan, &exps)?,
    }))
}

/// Degree of the sector variable `w_v` that makes the product's box
/// relations homogeneous whenever that is possible.
pub fn sector_degree(fan: &Fan, kind: &ProductKind, k: usize) -> BigRational {
    let q = q_vector(fan, k);
    let one = BigRational::one();
    let age = fan.box_element(k).age();
    let weighted = |a: &dyn Fn(usize) -> BigRational| {
        (0..fan.n())
            .filter(|&i| !q[i].is_zero())
            .fold(BigRational::zero(), |acc, i| acc + a(i) * (&one - &q[i]))
    };
    match kind {
        ProductKind::Orbifold | ProductKind::PlusInfinity | ProductKind::MinusInfinity => age,
        ProductKind::VPlus(b) => (0..fan.n()).fold(BigRational::zero(), |acc, i| {
            acc + (&one + BigRational::from_integer(b.a[i].clone())) * &q[i]
        }),
        ProductKind::VMinus(b) => age + weighted(&|i| BigRational::from_integer(b.a[i].clone())),
        ProductKind::Virtual => age + weighted(&|_| one.clone()),
    }
}

/// Unordered pairs of nonidentity box elements lying in no common cone.
pub fn cone_relation_pairs(fan: &Fan) -> Vec<(usize, usize)> {
    let db = fan.double_box();
    let m = fan.box_len();
    (1..m)
        .flat_map(|i| (i..m).map(move |j| (i, j)))
        .filter(|&(i, j)| !db.contains(i, j))
        .collect()
}

/// Unordered pairs of nonidentity box elements in the double box.
pub fn box_relation_pairs(fan: &Fan) -> Vec<(usize, usize)> {
    fan.double_box()
        .unordered_pairs()
        .filter(|&(i, j)| i > 0 && j > 0)
        .collect()
}

/// Variables of the inertial presentation: `x_1..x_n` followed by one
/// `w_k` for each nonidentity box element `k`.
pub fn presentation_variables(fan: &Fan, kind: &ProductKind) -> Vec<Variable> {
    let mut vars: Vec<Variable> = x_names(fan.n())
        .into_iter()
        .map(|name| Variable {
            name,
            degree: BigRational::one(),
        })
        .collect();
    vars.extend((1..fan.box_len()).map(|k| Variable {
        name: format!("w{k}"),
        degree: sector_degree(fan, kind, k),
    }));
    vars
}

/// Position of `w_k` among the presentation variables.
pub fn w_var(fan: &Fan, k: usize) -> usize {
    fan.n() + k - 1
}

fn w_poly(fan: &Fan, k: usize, total: usize) -> Poly {
    if k == 0 {
        Poly::one(total)
    } else {
        Poly::var(total, w_var(fan, k))
    }
}

fn embed_x(fan: &Fan, p: &Poly, total: usize) -> Poly {
    let positions: Vec<usize> = (0..fan.n()).collect();
    p.embed(&positions, total)
}

pub fn cr_ideal(fan: &Fan) -> Vec<Poly> {
    let total = fan.n() + fan.box_len() - 1;
    cone_relation_pairs(fan)
        .into_iter()
        .map(|(i, j)| &w_poly(fan, i, total) * &w_poly(fan, j, total))
        .collect()
}

pub fn br_ideal(fan: &Fan, kind: &ProductKind) -> Result<Vec<Poly>, InertialError> {
    br_ideal_with(fan, kind, Execution::default())
}

pub fn br_ideal_with(fan: &Fan, kind: &ProductKind, exec: Execution) -> Result<Vec<Poly>, InertialError> {
    kind.check(fan)?;
    let total = fan.n() + fan.box_len() - 1;
    let pairs = box_relation_pairs(fan);
    let gens = exec.map(&pairs, |&(i, j)| -> Result<Poly, InertialError> {
        let lhs = &w_poly(fan, i, total) * &w_poly(fan, j, total);
        Ok(match star_product(fan, kind, i, j)? {
            None => lhs,
            Some(sv) => lhs - &embed_x(fan, &sv.coefficient, total) * &w_poly(fan, sv.target, total),
        })
    });
    let mut out: Vec<Poly> = Vec::with_capacity(gens.len());
    for g in gens {
        let g = g?;
        if !g.is_zero() && !out.contains(&g) {
            out.push(g);
        }
    }
    Ok(out)
}

/// `R / (CR + BR)` with `R` the Chow ring extended by the sector variables
/// modulo the sector ideals.
pub fn inertial_presentation(fan: &Fan, kind: &ProductKind) -> Result<RingPresentation, InertialError> {
    inertial_presentation_with(fan, kind, Execution::default())
}

pub fn inertial_presentation_with(
    fan: &Fan,
    kind: &ProductKind,
    exec: Execution,
) -> Result<RingPresentation, InertialError> {
    kind.check(fan)?;
    let n = fan.n();
    let total = n + fan.box_len() - 1;
    let mut p = RingPresentation::new(presentation_variables(fan, kind), kind.coefficients());
    for g in linear_ideal(fan, total) {
        p.push(g, Provenance::Linear);
    }
    for g in sr_ideal(fan, total)? {
        p.push(g, Provenance::StanleyReisner);
    }
    for k in 1..fan.box_len() {
        for g in sector_ideal(fan, k, total)? {
            p.push(&g * &w_poly(fan, k, total), Provenance::Sector);
        }
    }
    for g in cr_ideal(fan) {
        p.push(g, Provenance::Cone);
    }
    for g in br_ideal_with(fan, kind, exec)? {
        p.push(g, Provenance::Box);
    }
    Ok(p)
}

/// All products `y^{v_i} * y^{v_j}` of one inertial product.
#[derive(Clone, Debug)]
pub struct StarTable {
    size: usize,
    values: Vec<Option<StarValue>>,
}

impl StarTable {
    pub fn new(fan: &Fan, kind: &ProductKind, exec: Execution) -> Result<Self, InertialError> {
        Self::with_rule(fan, kind, MinusRule::Strict, exec)
    }

    pub fn with_rule(fan: &Fan, kind: &ProductKind, rule: MinusRule, exec: Execution) -> Result<Self, InertialError> {
        let size = fan.box_len();
        let pairs: Vec<(usize, usize)> = (0..size).flat_map(|i| (0..size).map(move |j| (i, j))).collect();
        let values = exec
            .map(&pairs, |&(i, j)| star_product_with(fan, kind, i, j, rule))
            .into_iter()
            .collect::<Result<Vec<_>, _>>()?;
        Ok(StarTable { size, values })
    }

    pub fn get(&self, i: usize, j: usize) -> Option<&StarValue> {
        self.values[i * self.size + j].as_ref()
    }

    pub fn size(&self) -> usize {
        self.size
    }

    fn times(&self, left: Option<(usize, Poly)>, k: usize) -> Option<(usize, Poly)> {
        let (t, c) = left?;
        let sv = self.get(t, k)?;
        Some((sv.target, &c * &sv.coefficient))
    }

    fn left_times(&self, i: usize, right: Option<(usize, Poly)>) -> Option<(usize, Poly)> {
        let (t, c) = right?;
        let sv = self.get(i, t)?;
        Some((sv.target, &c * &sv.coefficient))
    }

    fn pair(&self, i: usize, j: usize) -> Option<(usize, Poly)> {
        self.get(i, j).map(|sv| (sv.target, sv.coefficient.clone()))
    }
}

/// The module `sum_v Z[x]/J_v y^v` underlying every inertial Chow ring,
/// used to decide equality of products.
pub struct SectorModule {
    ideals: Vec<GradedIdeal>,
    max_degree: BigRational,
}

impl SectorModule {
    pub fn new(fan: &Fan, coefficients: Coefficients, max_degree: u32) -> Result<Self, InertialError> {
        let n = fan.n();
        let degrees = vec![BigRational::one(); n];
        let mut ideals = Vec::with_capacity(fan.box_len());
        for k in 0..fan.box_len() {
            let mut gens = linear_ideal(fan, n);
            gens.extend(sector_ideal(fan, k, n)?);
            ideals.push(GradedIdeal::new(degrees.clone(), &gens, coefficients)?);
        }
        Ok(SectorModule {
            ideals,
            max_degree: BigRational::from_integer(max_degree.into()),
        })
    }

    /// Whether `c y^{v_k}` vanishes (checked up to the degree bound).
    pub fn is_zero(&self, k: usize, c: &Poly) -> bool {
        self.ideals[k].contains_up_to(c, &self.max_degree)
    }

    pub fn equal(&self, a: &Option<(usize, Poly)>, b: &Option<(usize, Poly)>) -> bool {
        match (a, b) {
            (None, None) => true,
            (Some((k, c)), None) | (None, Some((k, c))) => self.is_zero(*k, c),
            (Some((k, c)), Some((l, d))) if k == l => self.is_zero(*k, &(c - d)),
            (Some((k, c)), Some((l, d))) => self.is_zero(*k, c) && self.is_zero(*l, d),
        }
    }
}

/// Failures of the ring axioms for one product.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LawReport {
    pub triples_checked: usize,
    pub associativity_failures: Vec<(usize, usize, usize)>,
    pub commutativity_failures: Vec<(usize, usize)>,
    pub unit_failures: Vec<usize>,
}

impl LawReport {
    pub fn passed(&self) -> bool {
        self.associativity_failures.is_empty()
            && self.commutativity_failures.is_empty()
            && self.unit_failures.is_empty()
    }
}

/// Checks associativity on every triple, and commutativity and the unit on
/// every pair, in the sector module truncated at `max_degree`.
pub fn check_laws(fan: &Fan, table: &StarTable, module: &SectorModule, exec: Execution) -> LawReport {
    let m = table.size();
    let mut report = LawReport::default();
    for i in 0..m {
        let expect = Some((i, Poly::one(fan.n())));
        if !module.equal(&table.pair(i, 0), &expect) || !module.equal(&table.pair(0, i), &expect) {
            report.unit_failures.push(i);
        }
        for j in i + 1..m {
            if !module.equal(&table.pair(i, j), &table.pair(j, i)) {
                report.commutativity_failures.push((i, j));
            }
        }
    }
    let firsts: Vec<usize> = (0..m).collect();
    let failures = exec.map(&firsts, |&i| {
        let mut bad = Vec::new();
        for j in 0..m {
            let ij = table.pair(i, j);
            for k in 0..m {
                let left = table.times(ij.clone(), k);
                let right = table.left_times(i, table.pair(j, k));
                if !module.equal(&left, &right) {
                    bad.push((i, j, k));
                }
            }
        }
        bad
    });
    report.triples_checked = m * m * m;
    report.associativity_failures = failures.into_iter().flatten().collect();
    report
}

/// Pairs where two products differ in the sector module.
pub fn table_differences(a: &StarTable, b: &StarTable, module: &SectorModule) -> Vec<(usize, usize)> {
    let m = a.size();
    (0..m)
        .flat_map(|i| (0..m).map(move |j| (i, j)))
        .filter(|&(i, j)| !module.equal(&a.pair(i, j), &b.pair(i, j)))
        .collect()
}
