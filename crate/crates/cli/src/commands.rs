use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use serde_json::{json, Value};
use stacky_chow::charring::{sr_ring, x_names};
use stacky_chow::fan::Fan;
use stacky_chow::gradedpoly::{GradedPieceReport, RingPresentation};
use stacky_chow::inertial::{
    check_laws, inertial_presentation_with, star_product_with, Bundle, MinusRule, ProductKind, SectorModule, StarTable,
};
use stacky_chow::lattice::{Coefficients, IntMatrix};
use stacky_chow::parallel::Execution;

use crate::document::{
    coefficient_code, parse_rational, poly_terms, rational_string, BoxRow, FanDocument, Metadata, PieceDoc,
    PresentationDocument,
};
use crate::{CliError, Product};

/// Warning codes that may appear in presentation metadata.
pub const WARN_SECTOR_GRADING: &str = "sector-grading-convention";
pub const WARN_INHOMOGENEOUS: &str = "inhomogeneous-generators";

/// Result of a subcommand: a JSON value, its text rendering, and the exit
/// code the process should end with.
#[derive(Debug)]
pub struct Output {
    pub json: Value,
    pub text: String,
    pub code: i32,
}

impl Output {
    fn ok(json: Value, text: String) -> Self {
        Output { json, text, code: 0 }
    }
}

pub fn load(path: &std::path::Path) -> Result<FanDocument, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::Schema(format!("cannot read {}: {e}", path.display())))?;
    FanDocument::parse(&text)
}

pub fn build_fan(doc: &FanDocument) -> Result<Fan, CliError> {
    let fan = doc
        .stacky()
        .into_fan()
        .map_err(|r| CliError::Validation(r.to_string()))?;
    fan.character_data().map_err(|e| CliError::Validation(e.to_string()))?;
    Ok(fan)
}

fn strings<T: ToString>(v: &[T]) -> Vec<String> {
    v.iter().map(ToString::to_string).collect()
}

fn matrix_rows(m: &IntMatrix) -> Vec<Vec<String>> {
    (0..m.rows()).map(|i| strings(m.row(i))).collect()
}

pub fn box_rows(fan: &Fan, doc: &FanDocument) -> Vec<BoxRow> {
    (0..fan.box_len())
        .map(|k| {
            let e = fan.box_element(k);
            let g = fan.group_element(k);
            let rats = |v: &[BigRational]| v.iter().map(rational_string).collect::<Vec<_>>();
            BoxRow {
                index: k,
                label: doc.labels.get(&k).cloned(),
                v: strings(&e.v),
                cone: e.cone.iter().map(|r| r + 1).collect(),
                q: rats(&e.q),
                gamma: rats(&g.gamma),
                s: rats(&g.s),
                age: rational_string(&e.age()),
            }
        })
        .collect()
}

fn box_text(rows: &[BoxRow]) -> String {
    let mut out = String::from("index  label  v  cone  q  gamma  s  age\n");
    for r in rows {
        out.push_str(&format!(
            "{}  {}  ({})  [{}]  ({})  ({})  ({})  {}\n",
            r.index,
            r.label.as_deref().unwrap_or("-"),
            r.v.join(", "),
            r.cone.iter().map(ToString::to_string).collect::<Vec<_>>().join(" "),
            r.q.join(", "),
            r.gamma.join(", "),
            r.s.join(", "),
            r.age
        ));
    }
    out
}

pub fn cmd_validate(doc: &FanDocument) -> Output {
    let report = doc.stacky().validate();
    let mut failures: Vec<String> = report.failures.iter().map(ToString::to_string).collect();
    if failures.is_empty() {
        if let Ok(fan) = doc.stacky().into_fan() {
            if let Err(e) = fan.character_data() {
                failures.push(e.to_string());
            }
        }
    }
    let valid = failures.is_empty();
    let text = if valid {
        "valid\n".to_string()
    } else {
        failures.iter().map(|f| format!("invalid: {f}\n")).collect()
    };
    Output {
        json: json!({"schema": crate::document::SCHEMA, "valid": valid, "failures": failures}),
        text,
        code: if valid { 0 } else { 2 },
    }
}

pub fn cmd_box(doc: &FanDocument) -> Result<Output, CliError> {
    let fan = build_fan(doc)?;
    let rows = box_rows(&fan, doc);
    let text = box_text(&rows);
    Ok(Output::ok(
        json!({"schema": crate::document::SCHEMA, "box": serde_json::to_value(&rows).expect("rows serialize")}),
        text,
    ))
}

fn metadata(fan: &Fan, doc: &FanDocument, product: &str, bundle: Option<&Bundle>, simplified: bool) -> Metadata {
    let cd = fan.character_data().expect("checked when the fan was built");
    Metadata {
        product: product.into(),
        bundle: bundle.map(|b| strings(&b.a)),
        simplified,
        psi: matrix_rows(&cd.psi),
        f: matrix_rows(&cd.f),
        box_table: box_rows(fan, doc),
        hilbert: None,
        warnings: Vec::new(),
    }
}

fn piece_doc(r: &GradedPieceReport) -> PieceDoc {
    PieceDoc {
        degree: rational_string(&r.degree),
        free_rank: r.free_rank,
        torsion: strings(&r.torsion),
    }
}

fn hilbert(p: &RingPresentation, max: &BigRational, exec: Execution) -> Result<Vec<GradedPieceReport>, CliError> {
    p.hilbert_table(max, exec)
        .map_err(|e| CliError::Misuse(format!("cannot compute graded pieces: {e}")))
}

fn presentation_output(p: &RingPresentation, meta: Metadata) -> Output {
    let doc = PresentationDocument::new(p, meta);
    let mut text = format!("{p}\n");
    if let Some(h) = &doc.metadata.hilbert {
        text.push_str(&hilbert_text(h));
    }
    for w in &doc.metadata.warnings {
        text.push_str(&format!("warning: {w}\n"));
    }
    Output::ok(doc.to_value(), text)
}

fn hilbert_text(rows: &[PieceDoc]) -> String {
    rows.iter()
        .map(|r| {
            let report = GradedPieceReport {
                degree: parse_rational(&r.degree).expect("printed by us"),
                free_rank: r.free_rank,
                torsion: r.torsion.iter().map(|t| t.parse().expect("printed by us")).collect(),
            };
            format!("degree {}: {}\n", r.degree, report)
        })
        .collect()
}

pub fn cmd_chow(doc: &FanDocument) -> Result<Output, CliError> {
    let fan = build_fan(doc)?;
    let p = sr_ring(&fan).map_err(|e| CliError::Validation(e.to_string()))?;
    Ok(presentation_output(&p, metadata(&fan, doc, "chow", None, false)))
}

/// Options shared by the product-dependent subcommands.
#[derive(Clone, Debug)]
pub struct ProductOptions {
    pub product: Product,
    pub bundle: Option<Vec<BigInt>>,
    pub coeff: Option<Coefficients>,
    pub rule: MinusRule,
    pub exec: Execution,
}

pub fn product_kind(fan: &Fan, doc: &FanDocument, opts: &ProductOptions) -> Result<ProductKind, CliError> {
    let bundle = || -> Result<Bundle, CliError> {
        let a = opts.bundle.clone().or_else(|| doc.bundle.clone()).ok_or_else(|| {
            CliError::Misuse(format!(
                "bundle missing: --product {} needs --bundle",
                opts.product.name()
            ))
        })?;
        if a.len() != fan.n() {
            return Err(CliError::Misuse(format!(
                "bundle has {} coefficients but the fan has {} rays",
                a.len(),
                fan.n()
            )));
        }
        if a.iter().any(|x| x.is_negative() || x.to_u32().is_none()) {
            return Err(CliError::Misuse(
                "bundle coefficients must be small nonnegative integers".into(),
            ));
        }
        Bundle::new(a).map_err(|e| CliError::Misuse(e.to_string()))
    };
    Ok(match opts.product {
        Product::Orbifold => ProductKind::Orbifold,
        Product::Virtual => ProductKind::Virtual,
        Product::VPlus => ProductKind::VPlus(bundle()?),
        Product::VMinus => ProductKind::VMinus(bundle()?),
        Product::PlusInf => ProductKind::PlusInfinity,
        Product::MinusInf => ProductKind::MinusInfinity,
    })
}

fn coefficients(kind: &ProductKind, requested: Option<Coefficients>) -> Result<Coefficients, CliError> {
    match (kind, requested) {
        (ProductKind::PlusInfinity | ProductKind::MinusInfinity, Some(Coefficients::Integers)) => Err(
            CliError::Misuse("asymptotic products are only defined with rational coefficients (--coeff q)".into()),
        ),
        (_, Some(c)) => Ok(c),
        (_, None) => Ok(kind.coefficients()),
    }
}

fn build_inertial(
    fan: &Fan,
    kind: &ProductKind,
    opts: &ProductOptions,
    simplify: bool,
) -> Result<RingPresentation, CliError> {
    let mut p = inertial_presentation_with(fan, kind, opts.exec).map_err(|e| CliError::Misuse(e.to_string()))?;
    p.coefficients = coefficients(kind, opts.coeff)?;
    Ok(if simplify { p.eliminate() } else { p })
}

pub fn cmd_inertial(
    doc: &FanDocument,
    opts: &ProductOptions,
    simplify: bool,
    maxdeg: Option<&BigRational>,
) -> Result<Output, CliError> {
    let fan = build_fan(doc)?;
    let kind = product_kind(&fan, doc, opts)?;
    let p = build_inertial(&fan, &kind, opts, simplify)?;
    let mut meta = metadata(&fan, doc, kind.name(), kind.bundle(), simplify);
    if fan.box_len() > 1 {
        meta.warnings.push(WARN_SECTOR_GRADING.into());
    }
    if !p.is_homogeneous() {
        meta.warnings.push(WARN_INHOMOGENEOUS.into());
    }
    if let Some(max) = maxdeg {
        meta.hilbert = Some(hilbert(&p, max, opts.exec)?.iter().map(piece_doc).collect());
    }
    Ok(presentation_output(&p, meta))
}

/// Resolves a box element given by index or by label.
pub fn box_lookup(fan: &Fan, doc: &FanDocument, key: &str) -> Result<usize, CliError> {
    if let Some((&k, _)) = doc.labels.iter().find(|(_, l)| l.as_str() == key) {
        return Ok(k);
    }
    match key.parse::<usize>() {
        Ok(k) if k < fan.box_len() => Ok(k),
        _ => Err(CliError::Misuse(format!(
            "unknown box element `{key}` (use an index below {} or a label)",
            fan.box_len()
        ))),
    }
}

fn sector_name(doc: &FanDocument, k: usize) -> String {
    match doc.labels.get(&k) {
        Some(l) => format!("y^{l}"),
        None if k == 0 => "1".into(),
        None => format!("w{k}"),
    }
}

pub fn cmd_multiply(doc: &FanDocument, opts: &ProductOptions, left: &str, right: &str) -> Result<Output, CliError> {
    let fan = build_fan(doc)?;
    let kind = product_kind(&fan, doc, opts)?;
    let (i, j) = (box_lookup(&fan, doc, left)?, box_lookup(&fan, doc, right)?);
    let value = star_product_with(&fan, &kind, i, j, opts.rule).map_err(|e| CliError::Misuse(e.to_string()))?;
    let names = x_names(fan.n());
    let (result, text) = match value {
        None => (Value::Null, "0".to_string()),
        Some(sv) => {
            let w = if sv.target == 0 {
                String::new()
            } else {
                format!("w{}", sv.target)
            };
            let c = sv.coefficient.display(&names).to_string();
            let display = match (c.as_str(), w.is_empty()) {
                (_, true) => c.clone(),
                ("1", false) => w.clone(),
                _ if sv.coefficient.len() == 1 => format!("{c}*{w}"),
                _ => format!("({c})*{w}"),
            };
            (
                json!({
                    "target": sv.target,
                    "target_label": doc.labels.get(&sv.target),
                    "coefficient": serde_json::to_value(poly_terms(&sv.coefficient)).expect("terms serialize"),
                    "display": display,
                }),
                format!("{display} [{}]", sector_name(doc, sv.target)),
            )
        }
    };
    Ok(Output::ok(
        json!({
            "schema": crate::document::SCHEMA,
            "product": kind.name(),
            "left": i,
            "right": j,
            "variables": names,
            "result": result,
        }),
        text + "\n",
    ))
}

pub fn cmd_check_assoc(doc: &FanDocument, opts: &ProductOptions, maxdeg: &BigRational) -> Result<Output, CliError> {
    let fan = build_fan(doc)?;
    let kind = product_kind(&fan, doc, opts)?;
    let coeffs = coefficients(&kind, opts.coeff)?;
    let bound = maxdeg
        .floor()
        .to_integer()
        .to_u32()
        .ok_or_else(|| CliError::Misuse("--maxdeg out of range".into()))?;
    let table = StarTable::with_rule(&fan, &kind, opts.rule, opts.exec).map_err(|e| CliError::Misuse(e.to_string()))?;
    let module = SectorModule::new(&fan, coeffs, bound).map_err(|e| CliError::Misuse(e.to_string()))?;
    let report = check_laws(&fan, &table, &module, opts.exec);
    let witness = report.associativity_failures.first().copied();
    let text = match witness {
        None if report.passed() => format!(
            "pass: {} triples associative, commutative, unital\n",
            report.triples_checked
        ),
        _ => format!(
            "fail: {} associativity failures (first {:?}), {} commutativity failures, {} unit failures\n",
            report.associativity_failures.len(),
            witness,
            report.commutativity_failures.len(),
            report.unit_failures.len()
        ),
    };
    Ok(Output::ok(
        json!({
            "schema": crate::document::SCHEMA,
            "product": kind.name(),
            "coefficients": coefficient_code(coeffs),
            "maxdeg": rational_string(maxdeg),
            "passed": report.passed(),
            "triples_checked": report.triples_checked,
            "associativity_failures": report.associativity_failures.len(),
            "commutativity_failures": report.commutativity_failures.len(),
            "unit_failures": report.unit_failures.len(),
            "witness": witness.map(|(a, b, c)| vec![a, b, c]),
        }),
        text,
    ))
}

pub fn cmd_hilbert(
    doc: &FanDocument,
    opts: Option<&ProductOptions>,
    simplify: bool,
    maxdeg: &BigRational,
    exec: Execution,
) -> Result<Output, CliError> {
    let fan = build_fan(doc)?;
    let p = match opts {
        None => {
            let p = sr_ring(&fan).map_err(|e| CliError::Validation(e.to_string()))?;
            if simplify {
                p.eliminate()
            } else {
                p
            }
        }
        Some(o) => {
            let kind = product_kind(&fan, doc, o)?;
            build_inertial(&fan, &kind, o, simplify)?
        }
    };
    let rows: Vec<PieceDoc> = hilbert(&p, maxdeg, exec)?.iter().map(piece_doc).collect();
    let text = hilbert_text(&rows);
    Ok(Output::ok(
        json!({
            "schema": crate::document::SCHEMA,
            "coefficients": coefficient_code(p.coefficients),
            "maxdeg": rational_string(maxdeg),
            "pieces": serde_json::to_value(&rows).expect("rows serialize"),
        }),
        text,
    ))
}
