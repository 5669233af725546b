//! Acceptance suite: one PASS/FAIL line per criterion, followed by
//! informational lines. Two criteria are known to be red against the
//! reference data (see README); the process fails only if the set of red
//! criteria or the reason for either red changes.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stacky_chow::charring::sr_ring;
use stacky_chow::fan::{Fan, GroupElement, StackyFan};
use stacky_chow::gradedpoly::{Poly, Provenance, RingPresentation};
use stacky_chow::inertial::{
    b_minus, b_plus, br_ideal, check_laws, inertial_presentation, log_restriction, log_trace, table_differences,
    v_minus, v_plus, w_var, Bundle, KClass, MinusRule, ProductKind, SectorModule, StarTable,
};
use stacky_chow::lattice::Coefficients;
use stacky_chow::parallel::Execution;
use stacky_chow_cli::document::{render, FanDocument, PresentationDocument};

type Check = Result<String, String>;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn ints(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

fn fixture_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn fixture(name: &str) -> (FanDocument, Fan) {
    let text = std::fs::read_to_string(fixture_path(name)).expect("fixture readable");
    let doc = FanDocument::parse(&text).expect("fixture parses");
    let fan = doc.stacky().into_fan().expect("fixture is a valid stacky fan");
    (doc, fan)
}

/// Box index of the element the fixture labels `label`.
fn by_label(doc: &FanDocument, label: &str) -> usize {
    *doc.labels
        .iter()
        .find(|(_, l)| l.as_str() == label)
        .unwrap_or_else(|| panic!("no box element labelled {label}"))
        .0
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

// ---------------------------------------------------------------- fans

/// Randomized valid stacky fans of rank at most 2 with at most 4 rays and
/// at most 30 box elements.
fn random_fans(count: usize, seed: u64) -> Vec<(String, Fan)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let mut attempts = 0;
    while out.len() < count {
        attempts += 1;
        assert!(attempts < 100_000, "random fan generator stalled");
        let sf = if rng.gen_bool(0.3) {
            random_rank1(&mut rng)
        } else {
            random_rank2(&mut rng)
        };
        let Some(sf) = sf else { continue };
        let Ok(fan) = sf.clone().into_fan() else { continue };
        if fan.character_data().is_err() || fan.box_len() > 30 || fan.box_len() < 2 {
            continue;
        }
        out.push((format!("random#{} {:?}", out.len() + 1, sf.rays), fan));
    }
    out
}

fn torsion_part(rng: &mut ChaCha8Rng, n: usize) -> (Vec<BigInt>, Vec<Vec<i64>>) {
    if rng.gen_bool(0.3) {
        let m: i64 = rng.gen_range(2..=3);
        (
            vec![BigInt::from(m)],
            (0..n).map(|_| vec![rng.gen_range(0..m)]).collect(),
        )
    } else {
        (Vec::new(), vec![Vec::new(); n])
    }
}

fn random_rank1(rng: &mut ChaCha8Rng) -> Option<StackyFan> {
    let (torsion, tors) = torsion_part(rng, 2);
    let rays = [rng.gen_range(1..=6i64), -rng.gen_range(1..=6i64)];
    let b: Vec<Vec<BigInt>> = rays
        .iter()
        .zip(&tors)
        .map(|(&r, t)| {
            let mut v = vec![r];
            v.extend(t);
            ints(&v)
        })
        .collect();
    Some(StackyFan::new(1, torsion, b, vec![vec![0], vec![1]]))
}

fn random_rank2(rng: &mut ChaCha8Rng) -> Option<StackyFan> {
    let n = rng.gen_range(3..=4usize);
    let mut dirs: Vec<(i64, i64)> = Vec::new();
    while dirs.len() < n {
        let d = (rng.gen_range(-3..=3i64), rng.gen_range(-3..=3i64));
        if d == (0, 0) || num_integer::gcd(d.0, d.1) != 1 || dirs.contains(&d) {
            continue;
        }
        dirs.push(d);
    }
    let angle = |d: &(i64, i64)| (d.1 as f64).atan2(d.0 as f64);
    dirs.sort_by(|a, b| angle(a).partial_cmp(&angle(b)).unwrap());
    // Consecutive rays must be less than a half turn apart, both for a
    // complete fan and so that every listed cone is strongly convex.
    for k in 0..n {
        let (a, b) = (dirs[k], dirs[(k + 1) % n]);
        if a.0 * b.1 - a.1 * b.0 <= 0 {
            return None;
        }
    }
    let mut cones: Vec<Vec<usize>> = (0..n).map(|k| vec![k, (k + 1) % n]).collect();
    if rng.gen_bool(0.25) {
        cones.remove(rng.gen_range(0..n));
    }
    let (torsion, tors) = torsion_part(rng, n);
    let b = dirs
        .iter()
        .zip(&tors)
        .map(|(&(x, y), t)| {
            let s = rng.gen_range(1..=2i64);
            let mut v = vec![s * x, s * y];
            v.extend(t);
            ints(&v)
        })
        .collect();
    Some(StackyFan::new(2, torsion, b, cones))
}

struct TestFans {
    p64: (FanDocument, Fan),
    p654: (FanDocument, Fan),
    p2456: (FanDocument, Fan),
    p1: (FanDocument, Fan),
    random: Vec<(String, Fan)>,
}

impl TestFans {
    /// Every fan used by the property criteria.
    fn all(&self) -> Vec<(&str, &Fan)> {
        let mut v: Vec<(&str, &Fan)> = vec![
            ("P(6,4)", &self.p64.1),
            ("P(6,5,4)", &self.p654.1),
            ("P(2,4,5,6)", &self.p2456.1),
            ("P1", &self.p1.1),
        ];
        v.extend(self.random.iter().map(|(n, f)| (n.as_str(), f)));
        v
    }

    /// The fans of the associativity suite.
    fn assoc(&self) -> Vec<(&str, &Fan)> {
        let mut v: Vec<(&str, &Fan)> = vec![("P(6,4)", &self.p64.1), ("P(6,5,4)", &self.p654.1)];
        v.extend(self.random.iter().map(|(n, f)| (n.as_str(), f)));
        v
    }
}

// ---------------------------------------------------------------- 1, 2

/// Label, box vector, gamma phases, torsion phase.
type PhaseRow = (&'static str, [i64; 2], [(i64, i64); 2], (i64, i64));

fn criterion1(t: &TestFans) -> Check {
    let (doc, fan) = &t.p64;
    ensure(fan.box_len() == 8, || format!("box has {} elements", fan.box_len()))?;
    let table: [PhaseRow; 8] = [
        ("v0", [0, 0], [(0, 1), (0, 1)], (0, 1)),
        ("v1", [1, 0], [(1, 2), (0, 1)], (1, 4)),
        ("v2", [1, 1], [(1, 2), (0, 1)], (3, 4)),
        ("v3", [0, 1], [(0, 1), (0, 1)], (1, 2)),
        ("v4", [-1, 0], [(0, 1), (1, 3)], (0, 1)),
        ("v5", [-1, 1], [(0, 1), (1, 3)], (1, 2)),
        ("v6", [-2, 0], [(0, 1), (2, 3)], (0, 1)),
        ("v7", [-2, 1], [(0, 1), (2, 3)], (1, 2)),
    ];
    for (label, v, gamma, s) in table {
        let k = fan
            .box_index(&ints(&v))
            .ok_or_else(|| format!("{v:?} is not in the box"))?;
        ensure(doc.labels.get(&k).map(String::as_str) == Some(label), || {
            format!("label of {v:?}")
        })?;
        let g = fan.group_element(k);
        let want = GroupElement {
            gamma: gamma.iter().map(|&(a, b)| q(a, b)).collect(),
            s: vec![q(s.0, s.1)],
        };
        ensure(g == want, || format!("{label}: phases {g:?}"))?;
        ensure(fan.box_from_group(&want) == Ok(k), || format!("{label}: inverse"))?;
    }
    Ok("8 elements, all phases exact".into())
}

fn criterion2(t: &TestFans) -> Check {
    let fan = &t.p64.1;
    let names = [[0, 0], [1, 1], [1, 0], [0, 1]];
    let idx: Vec<usize> = names.iter().map(|v| fan.box_index(&ints(v)).unwrap()).collect();
    // table[r][c] = index into `names` of names[r] + names[c]
    let table = [[0, 1, 2, 3], [1, 3, 0, 2], [2, 0, 3, 1], [3, 2, 1, 0]];
    for r in 0..4 {
        for c in 0..4 {
            let got = fan.box_add(idx[r], idx[c]).map_err(|e| e.to_string())?;
            ensure(got == idx[table[r][c]], || format!("{:?} + {:?}", names[r], names[c]))?;
        }
    }
    Ok("16 entries".into())
}

// ---------------------------------------------------------------- 3, 4

fn criterion3(t: &TestFans) -> Check {
    let fan = &t.p2456.1;
    let weights = [2i64, 4, 5, 6];
    let by_phase = |t: BigRational| {
        let gamma = weights.iter().map(|&w| {
            let x = &t * q(w, 1);
            &x - x.floor()
        });
        fan.box_from_group(&GroupElement {
            gamma: gamma.collect(),
            s: Vec::new(),
        })
        .map_err(|e| e.to_string())
    };
    let tangent = Bundle::tangent(4);
    let g = by_phase(q(1, 3))?;
    let lt = log_trace(fan, g, &tangent).map_err(|e| e.to_string())?;
    ensure(lt.coeffs == vec![q(2, 3), q(1, 3), q(2, 3), q(0, 1)], || {
        format!("log trace {lt}")
    })?;
    let tuple = [by_phase(q(1, 6))?, by_phase(q(1, 3))?, by_phase(q(1, 2))?];
    let lr = log_restriction(fan, &tuple, &tangent).map_err(|e| e.to_string())?;
    let mut l3 = KClass::zero(4);
    l3.coeffs[2] = BigRational::one();
    ensure(lr == l3, || format!("log restriction {lr}"))?;
    Ok(format!("L(g) = {lt}; V(g) = {lr}"))
}

fn criterion4(t: &TestFans) -> Check {
    let (doc, fan) = &t.p654;
    ensure(fan.box_len() == 12, || format!("box has {} elements", fan.box_len()))?;
    let table: [(&str, [(i64, i64); 3]); 11] = [
        ("v1", [(0, 1), (1, 2), (0, 1)]),
        ("v2", [(1, 2), (1, 4), (0, 1)]),
        ("v3", [(1, 2), (3, 4), (0, 1)]),
        ("v4", [(0, 1), (2, 3), (1, 3)]),
        ("v5", [(0, 1), (1, 6), (1, 3)]),
        ("v6", [(0, 1), (5, 6), (2, 3)]),
        ("v7", [(0, 1), (1, 3), (2, 3)]),
        ("v8", [(1, 5), (0, 1), (4, 5)]),
        ("v9", [(2, 5), (0, 1), (3, 5)]),
        ("v10", [(3, 5), (0, 1), (2, 5)]),
        ("v11", [(4, 5), (0, 1), (1, 5)]),
    ];
    for (label, qs) in table {
        let k = by_label(doc, label);
        let want: Vec<BigRational> = qs.iter().map(|&(a, b)| q(a, b)).collect();
        ensure(fan.box_element(k).q == want, || {
            format!("{label}: q = {:?}", fan.box_element(k).q)
        })?;
    }
    let (v1, v2, v3) = (by_label(doc, "v1"), by_label(doc, "v2"), by_label(doc, "v3"));
    let sets = |i, j| -> Result<(Vec<usize>, Vec<usize>), String> {
        let p = b_plus(fan, i, j).map_err(|e| e.to_string())?;
        let m = b_minus(fan, i, j).map_err(|e| e.to_string())?;
        Ok((p.iter().map(|r| r + 1).collect(), m.iter().map(|r| r + 1).collect()))
    };
    ensure(sets(v1, v2)? == (vec![], vec![2]), || "B(v1,v2)".into())?;
    ensure(sets(v2, v2)? == (vec![1], vec![2]), || "B(v2,v2)".into())?;
    ensure(sets(v2, v3)? == (vec![1, 2], vec![]), || "B(v2,v3)".into())?;
    for a in [[1i64, 2, 3], [4, 0, 7]] {
        let bundle = Bundle::from_small(&a);
        let class = |idx: &[usize]| {
            let mut k = KClass::zero(3);
            for &i in idx {
                k.coeffs[i - 1] = q(a[i - 1], 1);
            }
            k
        };
        let vp = |i, j| v_plus(fan, i, j, &bundle).map_err(|e| e.to_string());
        let vm = |i, j| v_minus(fan, i, j, &bundle).map_err(|e| e.to_string());
        ensure(vp(v1, v2)? == class(&[]) && vm(v1, v2)? == class(&[2]), || {
            "V(v1,v2)".into()
        })?;
        ensure(vp(v2, v2)? == class(&[1]) && vm(v2, v2)? == class(&[2]), || {
            "V(v2,v2)".into()
        })?;
        ensure(vp(v2, v3)? == class(&[1, 2]) && vm(v2, v3)? == class(&[]), || {
            "V(v2,v3)".into()
        })?;
    }
    Ok("12 elements; q-vectors, B+/B- and V+/V- exact".into())
}

// ---------------------------------------------------------------- 5

/// The box relations displayed for P(6,5,4): `(w_a w_b, target, c-indices)`
/// meaning `w_a w_b - w_target * prod_i c_1(L_i)^{a_i+1}`.
const P654_BR_DISPLAY: [(u8, u8, Option<u8>, &[usize]); 30] = [
    (1, 2, Some(3), &[]),
    (1, 3, Some(2), &[2]),
    (2, 3, None, &[1, 2]),
    (1, 1, None, &[2]),
    (2, 2, Some(1), &[1]),
    (3, 3, Some(1), &[1, 2]),
    (1, 4, Some(5), &[2]),
    (1, 5, Some(4), &[]),
    (1, 6, Some(7), &[2]),
    (1, 7, Some(6), &[]),
    (4, 5, Some(6), &[]),
    (4, 6, Some(1), &[2, 3]),
    (4, 7, None, &[2, 3]),
    (5, 6, None, &[2, 3]),
    (5, 7, Some(1), &[3]),
    (6, 7, Some(5), &[2, 3]),
    (4, 4, Some(7), &[2]),
    (5, 5, Some(7), &[]),
    (6, 6, Some(4), &[2, 3]),
    (7, 7, Some(4), &[3]),
    (8, 9, Some(10), &[3]),
    (8, 10, Some(11), &[3]),
    (8, 11, None, &[1, 3]),
    (9, 10, None, &[1, 3]),
    (9, 11, Some(8), &[1]),
    (10, 11, Some(9), &[1]),
    (8, 8, Some(9), &[3]),
    (9, 9, Some(11), &[3]),
    (10, 10, Some(8), &[1]),
    (11, 11, Some(10), &[1]),
];

fn normalized(gens: impl IntoIterator<Item = Poly>) -> BTreeSet<Poly> {
    gens.into_iter().map(|g| g.normalize_sign()).collect()
}

fn x_power_product(total: usize, idx: &[usize], a: &[i64]) -> Poly {
    idx.iter().fold(Poly::one(total), |acc, &i| {
        &acc * &Poly::var(total, i - 1).pow((a[i - 1] + 1) as u32)
    })
}

/// The displayed box relations, in the variables of our presentation
/// (`c_1(L_i) = x_i` because this fan is reduced).
fn p654_br_transcription(doc: &FanDocument, fan: &Fan, a: &[i64]) -> BTreeSet<Poly> {
    let total = fan.n() + fan.box_len() - 1;
    let w = |label: u8| Poly::var(total, w_var(fan, by_label(doc, &format!("v{label}"))));
    normalized(P654_BR_DISPLAY.iter().map(|&(l, r, target, idx)| {
        let rhs = x_power_product(total, idx, a);
        let rhs = match target {
            Some(t) => &rhs * &w(t),
            None => rhs,
        };
        &(&w(l) * &w(r)) - &rhs
    }))
}

/// Independent recomputation of the same relations from the displayed
/// q-vectors alone: targets by fractional parts, exponents from `q_1 + q_2 >= 1`.
fn p654_br_oracle(doc: &FanDocument, fan: &Fan, a: &[i64]) -> BTreeSet<Poly> {
    let qs: BTreeMap<u8, [BigRational; 3]> = [
        (1, [q(0, 1), q(1, 2), q(0, 1)]),
        (2, [q(1, 2), q(1, 4), q(0, 1)]),
        (3, [q(1, 2), q(3, 4), q(0, 1)]),
        (4, [q(0, 1), q(2, 3), q(1, 3)]),
        (5, [q(0, 1), q(1, 6), q(1, 3)]),
        (6, [q(0, 1), q(5, 6), q(2, 3)]),
        (7, [q(0, 1), q(1, 3), q(2, 3)]),
        (8, [q(1, 5), q(0, 1), q(4, 5)]),
        (9, [q(2, 5), q(0, 1), q(3, 5)]),
        (10, [q(3, 5), q(0, 1), q(2, 5)]),
        (11, [q(4, 5), q(0, 1), q(1, 5)]),
    ]
    .into_iter()
    .collect();
    let cones: [[usize; 2]; 3] = [[0, 1], [1, 2], [0, 2]];
    let support = |v: &[BigRational; 3]| -> Vec<usize> { (0..3).filter(|&i| !v[i].is_zero()).collect() };
    let total = fan.n() + fan.box_len() - 1;
    let w = |label: u8| Poly::var(total, w_var(fan, by_label(doc, &format!("v{label}"))));
    let mut out = Vec::new();
    for (&l, ql) in &qs {
        for (&r, qr) in qs.range(l..) {
            let joint: BTreeSet<usize> = support(ql).into_iter().chain(support(qr)).collect();
            if !cones.iter().any(|c| joint.iter().all(|i| c.contains(i))) {
                continue;
            }
            let sums: Vec<BigRational> = (0..3).map(|i| &ql[i] + &qr[i]).collect();
            let exceed: Vec<usize> = (0..3)
                .filter(|&i| sums[i] >= BigRational::one())
                .map(|i| i + 1)
                .collect();
            let frac: Vec<BigRational> = sums.iter().map(|s| s - s.floor()).collect();
            let target = qs
                .iter()
                .find(|(_, v)| v.as_slice() == frac.as_slice())
                .map(|(&k, _)| k);
            let rhs = x_power_product(total, &exceed, a);
            let rhs = match target {
                Some(t) => &rhs * &w(t),
                None => {
                    assert!(frac.iter().all(Zero::is_zero), "sum is neither a box element nor zero");
                    rhs
                }
            };
            out.push(&(&w(l) * &w(r)) - &rhs);
        }
    }
    normalized(out)
}

fn criterion5(t: &TestFans, notes: &mut Vec<String>) -> Check {
    let (doc, fan) = &t.p654;
    for a in [[0i64, 0, 0], [1, 2, 3]] {
        let ours = normalized(br_ideal(fan, &ProductKind::VPlus(Bundle::from_small(&a))).map_err(|e| e.to_string())?);
        let oracle = p654_br_oracle(doc, fan, &a);
        let display = p654_br_transcription(doc, fan, &a);
        ensure(ours == oracle, || {
            format!("a = {a:?}: differs from the independent recomputation")
        })?;
        ensure(ours == display, || {
            format!("a = {a:?}: differs from the displayed list")
        })?;
        ensure(ours.len() == 30, || format!("{} generators", ours.len()))?;
    }
    let p = inertial_presentation(fan, &ProductKind::VPlus(Bundle::from_small(&[0, 0, 0])))
        .map_err(|e| e.to_string())?
        .eliminate();
    let names = p.names();
    let w5 = format!("w{}", by_label(doc, "v5"));
    let k = p.var_index(&w5).ok_or("w5 eliminated")?;
    let derived: Vec<String> = p
        .generators
        .iter()
        .filter(|g| g.poly.terms().keys().any(|m| m[k] >= 3))
        .map(|g| g.poly.display(&names).to_string())
        .collect();
    notes.push(format!(
        "criterion 5: the final display's w5^4 line is not derived; after elimination the relations in w5 \
         (our {w5}) of degree >= 3 are [{}] at a = 0",
        derived.join(", ")
    ));
    Ok("30 generators equal to the display and to the recomputation at a = (0,0,0) and (1,2,3)".into())
}

// ---------------------------------------------------------------- 6

/// The displayed presentation of the +infinity product, with `w5^k` as the
/// displayed (or a corrected) power.
fn p654_inf_transcription(doc: &FanDocument, ours: &RingPresentation, w5_power: u32) -> RingPresentation {
    let total = ours.nvars();
    let var = |name: &str| -> Poly {
        if name == "t" {
            return Poly::var(total, ours.var_index("t").expect("t survives"));
        }
        let label = format!("v{}", &name[1..]);
        let ours_name = format!("w{}", by_label(doc, &label));
        Poly::var(
            total,
            ours.var_index(&ours_name)
                .unwrap_or_else(|| panic!("{ours_name} survives")),
        )
    };
    let m = |parts: &[(&str, u32)]| {
        parts
            .iter()
            .fold(Poly::one(total), |acc, (n, e)| &acc * &var(n).pow(*e))
    };
    let mut gens = vec![
        m(&[("t", 3)]),
        m(&[("t", 2), ("w1", 1)]),
        m(&[("t", 1), ("w2", 1)]),
        m(&[("t", 1), ("w5", 1)]),
        m(&[("t", 1), ("w8", 1)]),
        m(&[("t", 1), ("w9", 1)]),
        m(&[("t", 1), ("w10", 1)]),
        m(&[("t", 1), ("w11", 1)]),
    ];
    for (a, b) in [
        ("w1", "w8"),
        ("w1", "w9"),
        ("w1", "w10"),
        ("w1", "w11"),
        ("w2", "w5"),
        ("w2", "w8"),
        ("w2", "w9"),
        ("w2", "w10"),
        ("w2", "w11"),
        ("w5", "w8"),
        ("w5", "w9"),
        ("w5", "w10"),
        ("w5", "w11"),
        ("w8", "w9"),
        ("w8", "w10"),
        ("w8", "w11"),
        ("w9", "w10"),
        ("w9", "w11"),
        ("w10", "w11"),
    ] {
        gens.push(m(&[(a, 1), (b, 1)]));
    }
    for sq in ["w1", "w2", "w8", "w9", "w10", "w11"] {
        gens.push(m(&[(sq, 2)]));
    }
    gens.push(m(&[("w5", w5_power)]));
    let mut p = RingPresentation::new(ours.variables.clone(), Coefficients::Rationals);
    for g in gens {
        p.push(g, Provenance::Box);
    }
    p
}

fn criterion6(t: &TestFans, notes: &mut Vec<String>) -> Check {
    let (doc, fan) = &t.p654;
    let ours = inertial_presentation(fan, &ProductKind::PlusInfinity)
        .map_err(|e| e.to_string())?
        .eliminate();
    let bound = q(4, 1);
    let corrected = ours
        .ideal_equal_up_to(&p654_inf_transcription(doc, &ours, 3), &bound)
        .map_err(|e| e.to_string())?;
    notes.push(format!(
        "criterion 6 (informational): against the display with w5^3 in place of w5^4: {}",
        if corrected.equal {
            "equal up to degree 4"
        } else {
            "NOT equal"
        }
    ));
    let cmp = ours
        .ideal_equal_up_to(&p654_inf_transcription(doc, &ours, 4), &bound)
        .map_err(|e| e.to_string())?;
    match cmp.witness {
        None => Ok("equal up to degree 4".into()),
        Some(w) => Err(format!(
            "witness in degree {}: {} lies in the {} ideal only",
            w.degree,
            w.polynomial.display(&ours.names()),
            if w.from_first { "recomputed" } else { "displayed" }
        )),
    }
}

// ---------------------------------------------------------------- 7

/// Orders of the cokernel of an integer matrix from its determinantal
/// divisors (gcd of k-minors), for matrices with at most three columns.
fn cokernel_by_minors(rows: &[Vec<i64>]) -> (usize, Vec<i64>) {
    use num_integer::Integer;
    let ncols = rows[0].len();
    assert!(ncols <= 3);
    let det = |sel_r: &[usize], sel_c: &[usize]| -> i64 {
        match sel_r.len() {
            1 => rows[sel_r[0]][sel_c[0]],
            2 => {
                rows[sel_r[0]][sel_c[0]] * rows[sel_r[1]][sel_c[1]]
                    - rows[sel_r[0]][sel_c[1]] * rows[sel_r[1]][sel_c[0]]
            }
            3 => {
                let m = |i: usize, j: usize| rows[sel_r[i]][sel_c[j]];
                m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
                    + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0))
            }
            _ => unreachable!(),
        }
    };
    fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
        (0u32..1 << n)
            .filter(|m| m.count_ones() as usize == k)
            .map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect())
            .collect()
    }
    let mut divisors = vec![1i64];
    for k in 1..=ncols {
        let g = subsets(rows.len(), k)
            .iter()
            .flat_map(|r| subsets(ncols, k).into_iter().map(move |c| (r.clone(), c)))
            .fold(0i64, |g, (r, c)| g.gcd(&det(&r, &c)));
        if g == 0 {
            break;
        }
        divisors.push(g);
    }
    let rank = divisors.len() - 1;
    let torsion: Vec<i64> = (1..divisors.len())
        .map(|k| divisors[k] / divisors[k - 1])
        .filter(|&d| d != 1)
        .collect();
    (ncols - rank, torsion)
}

fn criterion7(t: &TestFans) -> Check {
    let p = sr_ring(&t.p64.1).map_err(|e| e.to_string())?;
    let table = p
        .hilbert_table(&q(3, 1), Execution::default())
        .map_err(|e| e.to_string())?;
    let shown: Vec<String> = table.iter().map(ToString::to_string).collect();
    ensure(shown == ["Z", "Z", "Z/24", "Z/24"], || format!("P(6,4): {shown:?}"))?;
    let mut checked = 0;
    for a in 2..=9i64 {
        for b in a + 1..=9 {
            if num_integer::gcd(a, b) != 1 {
                continue;
            }
            let fan = StackyFan::from_small(1, &[], &[[b], [-a]], &[[0], [1]])
                .into_fan()
                .map_err(|e| e.to_string())?;
            let report = sr_ring(&fan)
                .map_err(|e| e.to_string())?
                .graded_piece(&q(2, 1))
                .map_err(|e| e.to_string())?;
            // Degree-2 relations on the basis (x1^2, x1 x2, x2^2): the linear
            // form b x1 - a x2 times x1 and x2, and the product x1 x2.
            let oracle = cokernel_by_minors(&[vec![b, -a, 0], vec![0, b, -a], vec![0, 1, 0]]);
            let got = (
                report.free_rank,
                report
                    .torsion
                    .iter()
                    .map(|d| i64::try_from(d).unwrap())
                    .collect::<Vec<_>>(),
            );
            ensure(got == oracle && oracle == (0, vec![a * b]), || {
                format!("P({a},{b}): {report} vs {oracle:?}")
            })?;
            checked += 1;
        }
    }
    Ok(format!("P(6,4) table {shown:?}; {checked} weighted lines give Z/ab"))
}

// ---------------------------------------------------------------- 8, 9, 10

fn assoc_kinds(n: usize, rng: &mut ChaCha8Rng) -> Vec<ProductKind> {
    let mut random = || Bundle::from_small(&(0..n).map(|_| rng.gen_range(0..=3)).collect::<Vec<i64>>());
    vec![
        ProductKind::Orbifold,
        ProductKind::Virtual,
        ProductKind::VPlus(random()),
        ProductKind::VMinus(random()),
        ProductKind::PlusInfinity,
        ProductKind::MinusInfinity,
    ]
}

struct AssocRun {
    failures: Vec<String>,
    failing_kinds: BTreeSet<&'static str>,
    checked: usize,
}

fn run_assoc(t: &TestFans, rule: MinusRule) -> Result<AssocRun, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut run = AssocRun {
        failures: Vec::new(),
        failing_kinds: BTreeSet::new(),
        checked: 0,
    };
    for (name, fan) in t.assoc() {
        let modules = [
            SectorModule::new(fan, Coefficients::Integers, 6).map_err(|e| e.to_string())?,
            SectorModule::new(fan, Coefficients::Rationals, 6).map_err(|e| e.to_string())?,
        ];
        for kind in assoc_kinds(fan.n(), &mut rng) {
            let module = &modules[usize::from(kind.coefficients() == Coefficients::Rationals)];
            let table = StarTable::with_rule(fan, &kind, rule, Execution::default()).map_err(|e| e.to_string())?;
            let report = check_laws(fan, &table, module, Execution::default());
            run.checked += report.triples_checked;
            if !report.passed() {
                run.failing_kinds.insert(kind.name());
                run.failures.push(format!(
                    "{name} {}: {} non-associative triples (first {:?}), {} non-commuting pairs, {} unit failures",
                    kind.name(),
                    report.associativity_failures.len(),
                    report.associativity_failures.first(),
                    report.commutativity_failures.len(),
                    report.unit_failures.len()
                ));
            }
        }
    }
    Ok(run)
}

fn criterion8(t: &TestFans, notes: &mut Vec<String>) -> (Check, BTreeSet<&'static str>) {
    let literal = match run_assoc(t, MinusRule::Strict) {
        Ok(r) => r,
        Err(e) => return (Err(e), BTreeSet::new()),
    };
    match run_assoc(t, MinusRule::Inclusive) {
        Ok(r) if r.failures.is_empty() => notes.push(format!(
            "criterion 8 (informational): with B- taken as q1+q2 <= 1 every kind passes on all {} fans ({} triples)",
            t.assoc().len(),
            r.checked
        )),
        Ok(r) => notes.push(format!(
            "criterion 8 (informational): with B- taken as q1+q2 <= 1 there are still failures: {}",
            r.failures.join("; ")
        )),
        Err(e) => notes.push(format!("criterion 8 (informational): error {e}")),
    }
    let kinds = literal.failing_kinds.clone();
    let check = if literal.failures.is_empty() {
        Ok(format!(
            "{} fans x 6 kinds, {} triples",
            t.assoc().len(),
            literal.checked
        ))
    } else {
        for f in literal.failures.iter().take(4) {
            notes.push(format!("criterion 8 failure: {f}"));
        }
        Err(format!(
            "{} (fan, kind) combinations fail, kinds {:?}",
            literal.failures.len(),
            literal.failing_kinds
        ))
    };
    (check, kinds)
}

fn criterion9(t: &TestFans) -> Check {
    let mut count = 0;
    for (name, fan) in t.all() {
        let n = fan.n();
        let set = |k: ProductKind| br_ideal(fan, &k).map(normalized).map_err(|e| e.to_string());
        let orb = set(ProductKind::Orbifold)?;
        ensure(orb == set(ProductKind::VPlus(Bundle::uniform(n, 0)))?, || {
            format!("{name}: VPlus(0)")
        })?;
        ensure(orb == set(ProductKind::VMinus(Bundle::uniform(n, 0)))?, || {
            format!("{name}: VMinus(0)")
        })?;
        count += 1;
    }
    Ok(format!("{count} fans"))
}

fn criterion10(t: &TestFans) -> Check {
    let mut count = 0;
    for (name, fan) in t.all() {
        let a = fan.rank() as i64 + 1;
        let module = SectorModule::new(fan, Coefficients::Rationals, 6).map_err(|e| e.to_string())?;
        let table = |k: &ProductKind| StarTable::new(fan, k, Execution::default()).map_err(|e| e.to_string());
        let bundle = Bundle::uniform(fan.n(), a);
        for (finite, limit) in [
            (ProductKind::VPlus(bundle.clone()), ProductKind::PlusInfinity),
            (ProductKind::VMinus(bundle.clone()), ProductKind::MinusInfinity),
        ] {
            let diff = table_differences(&table(&finite)?, &table(&limit)?, &module);
            ensure(diff.is_empty(), || format!("{name} {}: pairs {diff:?}", finite.name()))?;
        }
        count += 1;
    }
    Ok(format!("{count} fans, a = dim + 1, both signs"))
}

// ---------------------------------------------------------------- 11

fn criterion11(t: &TestFans) -> Check {
    let mut elements = 0;
    for (name, fan) in t.all() {
        for k in 0..fan.box_len() {
            let g = fan.group_element(k);
            ensure(fan.box_from_group(&g) == Ok(k), || format!("{name}: box element {k}"))?;
            elements += 1;
        }
    }
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut docs = 0;
    for name in ["p64.json", "p654.json", "p2456.json", "p1.json"] {
        let text = std::fs::read_to_string(fixture_path(name)).map_err(|e| e.to_string())?;
        let doc = FanDocument::parse(&text).map_err(|e| e.to_string())?;
        let once = render(doc.to_value());
        let twice = render(FanDocument::parse(&once).map_err(|e| e.to_string())?.to_value());
        ensure(once == twice, || format!("{name}: fan document is not stable"))?;
        let path = dir.path().join(name);
        std::fs::write(&path, &once).map_err(|e| e.to_string())?;
        for args in [
            vec!["chow"],
            vec!["inertial", "--product", "orbifold"],
            vec![
                "inertial",
                "--product",
                "v-plus",
                "--bundle",
                &vec!["2"; doc.b.len()].join(","),
            ],
            vec!["inertial", "--product", "plus-inf", "--simplify"],
        ] {
            let mut argv = vec!["stacky-chow"];
            argv.extend(&args[..1]);
            let p = path.to_str().unwrap();
            argv.push(p);
            argv.extend(&args[1..]);
            let first = stacky_chow_cli::run(argv.clone());
            ensure(first.code == 0, || format!("{name} {args:?}: {}", first.stderr))?;
            let second = stacky_chow_cli::run(argv.clone());
            ensure(first == second, || {
                format!("{name} {args:?}: output differs between runs")
            })?;
            let parsed = PresentationDocument::parse(&first.stdout).map_err(|e| e.to_string())?;
            ensure(render(parsed.to_value()) == first.stdout, || {
                format!("{name} {args:?}: not byte-stable")
            })?;
            let ring = parsed.presentation().map_err(|e| e.to_string())?;
            let again = PresentationDocument::new(&ring, parsed.metadata.clone());
            ensure(again == parsed, || format!("{name} {args:?}: presentation round trip"))?;
            docs += 1;
        }
    }
    Ok(format!("{elements} box elements; {docs} documents byte-stable"))
}

// ---------------------------------------------------------------- driver

const EXPECTED_RED: [usize; 2] = [6, 8];

fn main() {
    let start = Instant::now();
    let fans = TestFans {
        p64: fixture("p64.json"),
        p654: fixture("p654.json"),
        p2456: fixture("p2456.json"),
        p1: fixture("p1.json"),
        random: random_fans(25, 0x5eed),
    };
    let mut notes: Vec<String> = Vec::new();
    let timed = |k: usize, f: &mut dyn FnMut() -> Check| -> Check {
        let t0 = Instant::now();
        let r = f();
        eprintln!("criterion {k} took {:.1?}", t0.elapsed());
        r
    };
    let mut failing_kinds = BTreeSet::new();
    let results: Vec<(usize, &str, Check)> = vec![
        (
            1,
            "box of P(6,4) and its phase table",
            timed(1, &mut || criterion1(&fans)),
        ),
        (2, "box addition table of P(6,4)", timed(2, &mut || criterion2(&fans))),
        (
            3,
            "logarithmic trace and restriction, weights (2,4,5,6)",
            timed(3, &mut || criterion3(&fans)),
        ),
        (4, "P(6,5,4) box, B+/B-, V+/V-", timed(4, &mut || criterion4(&fans))),
        (
            5,
            "P(6,5,4) VPlus box relations",
            timed(5, &mut || criterion5(&fans, &mut notes)),
        ),
        (
            6,
            "P(6,5,4) +infinity presentation over Q",
            timed(6, &mut || criterion6(&fans, &mut notes)),
        ),
        (7, "graded pieces of Chow rings", timed(7, &mut || criterion7(&fans))),
        (
            8,
            "associativity, commutativity, unit",
            timed(8, &mut || {
                let (c, k) = criterion8(&fans, &mut notes);
                failing_kinds = k;
                c
            }),
        ),
        (
            9,
            "orbifold = VPlus(0) = VMinus(0)",
            timed(9, &mut || criterion9(&fans)),
        ),
        (10, "asymptotic stabilization", timed(10, &mut || criterion10(&fans))),
        (11, "round trips", timed(11, &mut || criterion11(&fans))),
    ];
    let mut unexpected = Vec::new();
    for (k, title, res) in &results {
        match res {
            Ok(detail) => println!("criterion {k:>2}: PASS  {title}: {detail}"),
            Err(detail) => println!("criterion {k:>2}: FAIL  {title}: {detail}"),
        }
        if res.is_ok() == EXPECTED_RED.contains(k) {
            unexpected.push(*k);
        }
    }
    for n in &notes {
        println!("  note: {n}");
    }
    println!(
        "  note: {} random fans, total time {:.1?}",
        fans.random.len(),
        start.elapsed()
    );

    // The two reds must stay red for the documented reasons.
    let red6_reason = matches!(&results[5].2, Err(d) if d.contains("degree 3/2"));
    let red8_reason = failing_kinds.iter().all(|k| ["virtual", "v-minus"].contains(k));
    let corrected_ok = notes.iter().any(|n| n.contains("w5^3 in place of w5^4: equal"))
        && notes.iter().any(|n| n.contains("every kind passes"));
    if !unexpected.is_empty() || !red6_reason || !red8_reason || !corrected_ok {
        eprintln!(
            "acceptance outcome changed: unexpected {unexpected:?}, red 6 reason {red6_reason}, \
             red 8 reason {red8_reason}, corrected variants {corrected_ok}"
        );
        std::process::exit(1);
    }
}
