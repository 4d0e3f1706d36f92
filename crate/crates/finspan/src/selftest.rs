//! Self-test runner: the acceptance suite as library functions.
//!
//! Each criterion is a pure function of the seed (and search budget); the
//! assembled report contains no timing or environment data, so identical
//! seeds produce byte-identical reports.

use crate::corpus;
use crate::groupoid::{
    cardinality, discrete, disjoint_union, inertia, product, skeleton, Gpd,
};
use crate::linalg::{RatMatrix, Rational};
use crate::linearize::{linearize_span, norm_map, trace_form};
use crate::local_system::LocalSystem;
use crate::span::{compose, duality_spans, tensor, to_pointed_map, verify_self_duality, Span};
use crate::tft::{quantize_circle, quantize_object, DecoratedObject};
use rand::Rng;
use serde_json::{json, Value};

pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    pub pass: bool,
    pub details: String,
}

impl CriterionResult {
    fn ok(id: usize, name: &'static str, details: String) -> CriterionResult {
        CriterionResult {
            id,
            name,
            pass: true,
            details,
        }
    }

    fn fail(id: usize, name: &'static str, details: String) -> CriterionResult {
        CriterionResult {
            id,
            name,
            pass: false,
            details,
        }
    }
}

pub struct SelfTestReport {
    pub seed: u64,
    pub budget: u64,
    pub criteria: Vec<CriterionResult>,
}

impl SelfTestReport {
    pub fn all_pass(&self) -> bool {
        self.criteria.iter().all(|c| c.pass)
    }

    pub fn to_value(&self) -> Value {
        json!({
            "kind": "selftest_report",
            "seed": self.seed,
            "budget": self.budget,
            "all_pass": self.all_pass(),
            "criteria": self.criteria.iter().map(|c| json!({
                "id": c.id,
                "name": c.name,
                "pass": c.pass,
                "details": c.details,
            })).collect::<Vec<_>>(),
        })
    }
}

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

/// Criterion 1: homotopy cardinality values and exact additivity and
/// multiplicativity over 200 random coproduct/product pairs.
pub fn criterion_cardinality(seed: u64) -> CriterionResult {
    let name = "homotopy cardinality";
    if cardinality(&corpus::bz(2)) != q(1, 2) {
        return CriterionResult::fail(1, name, "cardinality(BZ/2) != 1/2".into());
    }
    for n in 0..10 {
        if cardinality(&discrete(n)) != q(n as i64, 1) {
            return CriterionResult::fail(1, name, format!("cardinality(discrete({n})) wrong"));
        }
    }
    let mut rng = corpus::seeded_rng(seed ^ 0x01);
    let corpus_list = corpus::groupoid_corpus();
    for i in 0..200 {
        let a = &corpus_list[rng.random_range(0..corpus_list.len())];
        let b = &corpus_list[rng.random_range(0..corpus_list.len())];
        if cardinality(&disjoint_union(a, b)) != cardinality(a) + cardinality(b) {
            return CriterionResult::fail(1, name, format!("additivity failed at pair {i}"));
        }
        if cardinality(&product(a, b)) != cardinality(a) * cardinality(b) {
            return CriterionResult::fail(1, name, format!("multiplicativity failed at pair {i}"));
        }
    }
    CriterionResult::ok(
        1,
        name,
        "BZ/2 = 1/2, discrete(n) = n, 200 pairs additive and multiplicative".into(),
    )
}

/// Independent pullback-count oracle for spans of finite sets.
fn discrete_composite_counts(s: &Span, t: &Span) -> RatMatrix {
    let rows = t.target().object_count();
    let cols = s.source().object_count();
    let mut m = RatMatrix::zeros(rows, cols);
    for z1 in 0..s.apex().object_count() {
        for z2 in 0..t.apex().object_count() {
            if s.right().obj(z1) == t.left().obj(z2) {
                let (x, y) = (s.left().obj(z1), t.right().obj(z2));
                let cur = m.get(y, x).clone();
                m.set(y, x, cur + q(1, 1));
            }
        }
    }
    m
}

/// Criterion 2: the discrete fragment agrees with finite pointed sets and
/// with ordinary pullback counting.
pub fn criterion_burnside(seed: u64) -> CriterionResult {
    let name = "finite-sets conformance";
    let mut rng = corpus::seeded_rng(seed ^ 0x02);
    for i in 0..200 {
        let a = discrete(rng.random_range(1..=6));
        let b = discrete(rng.random_range(1..=6));
        let c = discrete(rng.random_range(1..=6));
        let s = corpus::random_discrete_span(&mut rng, &a, &b, true);
        let t = corpus::random_discrete_span(&mut rng, &b, &c, true);
        let st = match compose(&s, &t) {
            Ok(x) => x,
            Err(e) => return CriterionResult::fail(2, name, format!("compose failed: {e}")),
        };
        let lin = linearize_span(&st);
        let via_product = linearize_span(&t).mul(&linearize_span(&s));
        let via_counts = discrete_composite_counts(&s, &t);
        if lin != via_product || lin != via_counts {
            return CriterionResult::fail(2, name, format!("matrix mismatch at pair {i}"));
        }
        let lhs = match to_pointed_map(&st) {
            Ok(x) => x,
            Err(e) => return CriterionResult::fail(2, name, format!("pointed map failed: {e}")),
        };
        let rhs = to_pointed_map(&s)
            .unwrap()
            .compose(&to_pointed_map(&t).unwrap());
        if lhs != rhs {
            return CriterionResult::fail(2, name, format!("pointed maps differ at pair {i}"));
        }
    }
    CriterionResult::ok(
        2,
        name,
        "200 pairs: matrices, pullback counts, and pointed maps agree".into(),
    )
}

/// Criterion 3: functoriality and monoidality of linearization over the
/// groupoid corpus, oracle = brute-force fiber enumeration.
pub fn criterion_functoriality(seed: u64) -> CriterionResult {
    let name = "linearization functoriality and monoidality";
    let mut rng = corpus::seeded_rng(seed ^ 0x03);
    let corpus_list = corpus::groupoid_corpus();
    for i in 0..100 {
        let a = corpus_list[rng.random_range(0..corpus_list.len())].clone();
        let b = corpus_list[rng.random_range(0..corpus_list.len())].clone();
        let c = corpus_list[rng.random_range(0..corpus_list.len())].clone();
        let s = corpus::random_span(&mut rng, &a, &b);
        let t = corpus::random_span(&mut rng, &b, &c);
        let st = match compose(&s, &t) {
            Ok(x) => x,
            Err(e) => return CriterionResult::fail(3, name, format!("compose failed: {e}")),
        };
        if linearize_span(&st) != linearize_span(&t).mul(&linearize_span(&s)) {
            return CriterionResult::fail(3, name, format!("functoriality failed at pair {i}"));
        }
        if linearize_span(&tensor(&s, &t))
            != linearize_span(&s).kronecker(&linearize_span(&t))
        {
            return CriterionResult::fail(3, name, format!("monoidality failed at pair {i}"));
        }
    }
    CriterionResult::ok(3, name, "100 pairs: product and Kronecker laws exact".into())
}

fn cotrace_square(x: &Gpd) -> RatMatrix {
    let (_, cotr) = duality_spans(x);
    let col = linearize_span(&cotr);
    let sk = skeleton(x);
    let sk_xx = skeleton(cotr.target());
    let n = x.object_count();
    let k = sk.components().len();
    let mut m = RatMatrix::zeros(k, k);
    for (pc, comp) in sk_xx.components().iter().enumerate() {
        let (i, j) = (
            sk.component_of(comp.rep / n),
            sk.component_of(comp.rep % n),
        );
        m.set(i, j, col.get(pc, 0).clone());
    }
    m
}

/// Unweighted fiber-component count, the negative control.
fn linearize_unweighted(s: &Span) -> RatMatrix {
    let sk_x = skeleton(s.source());
    let sk_y = skeleton(s.target());
    let mut m = RatMatrix::zeros(sk_y.components().len(), sk_x.components().len());
    for (j, comp) in sk_y.components().iter().enumerate() {
        let (fiber, incl) =
            crate::groupoid::homotopy_fiber(s.right(), comp.rep).expect("rep in range");
        let fsk = skeleton(&fiber);
        for fc in fsk.components() {
            let xc = sk_x.component_of(s.left().obj(incl.obj(fc.rep)));
            let cur = m.get(j, xc).clone();
            m.set(j, xc, cur + q(1, 1));
        }
    }
    m
}

/// Criterion 4: self-duality snakes hold on every corpus groupoid, at the
/// span level and at the matrix level, and the unweighted control fails.
pub fn criterion_self_duality(budget: u64) -> CriterionResult {
    let name = "self-duality";
    for g in corpus::groupoid_corpus() {
        match verify_self_duality(&g, budget) {
            Ok(true) => {}
            Ok(false) => {
                return CriterionResult::fail(4, name, format!("snake failed for {g:?}"))
            }
            Err(e) => return CriterionResult::fail(4, name, format!("search error: {e}")),
        }
        if g.object_count() > 0 && !trace_form(&g).mul(&cotrace_square(&g)).is_identity() {
            return CriterionResult::fail(4, name, format!("matrix snake failed for {g:?}"));
        }
    }
    // Negative control: unweighted counts break the snake for BZ/2.
    let x = corpus::bz(2);
    let (tr, cotr) = duality_spans(&x);
    let control = linearize_unweighted(&tr).get(0, 0) * linearize_unweighted(&cotr).get(0, 0);
    if control != q(2, 1) {
        return CriterionResult::fail(4, name, "negative control produced unexpected value".into());
    }
    CriterionResult::ok(
        4,
        name,
        "span and matrix snakes hold on the corpus; unweighted control fails as required".into(),
    )
}

/// Criterion 5: 1-semiadditivity of Q-vector spaces over the fixed group
/// list, with the character-formula oracle.
pub fn criterion_semiadditivity(seed: u64) -> CriterionResult {
    let name = "1-semiadditivity of Q-vector spaces";
    let mut rng = corpus::seeded_rng(seed ^ 0x05);
    let mut checked = 0usize;
    for (gname, table) in corpus::group_list() {
        for i in 0..10 {
            let rep = corpus::random_representation(&mut rng, &table, 5);
            let report = match norm_map(&rep) {
                Ok(r) => r,
                Err(e) => {
                    return CriterionResult::fail(5, name, format!("norm failed for {gname}: {e}"))
                }
            };
            if !report.is_iso {
                return CriterionResult::fail(
                    5,
                    name,
                    format!("norm not invertible for {gname} rep {i}"),
                );
            }
            let mut avg = Rational::zero();
            for g in 0..table.len() {
                avg += rep.action(g).trace();
            }
            let expected = avg * q(1, table.len() as i64);
            if q(report.colim_dim as i64, 1) != expected
                || q(report.lim_dim as i64, 1) != expected
            {
                return CriterionResult::fail(
                    5,
                    name,
                    format!("character oracle mismatch for {gname} rep {i}"),
                );
            }
            checked += 1;
        }
    }
    CriterionResult::ok(
        5,
        name,
        format!("{checked} representations: norm invertible, dimensions match the character oracle"),
    )
}

/// Criterion 6: the quantization dimension law - the circle value equals
/// the point dimension - on 50 decorated objects including the named ones.
pub fn criterion_quantization(seed: u64) -> CriterionResult {
    let name = "quantization dimension law";
    let mut cases: Vec<(String, DecoratedObject)> = Vec::new();
    let named: [(&str, DecoratedObject, Rational); 3] = [
        (
            "(BZ/2, trivial)",
            DecoratedObject::new(corpus::bz(2), corpus::trivial_rep(&corpus::cyclic(2))).unwrap(),
            q(1, 1),
        ),
        (
            "(BZ/2, regular)",
            DecoratedObject::new(corpus::bz(2), corpus::regular_rep(&corpus::cyclic(2))).unwrap(),
            q(1, 1),
        ),
        (
            "(BS3, standard)",
            DecoratedObject::new(corpus::bs3(), corpus::standard_rep_s3()).unwrap(),
            q(0, 1),
        ),
    ];
    for (label, obj, expected) in &named {
        match quantize_circle(obj) {
            Ok(v) if &v == expected => {}
            Ok(v) => {
                return CriterionResult::fail(
                    6,
                    name,
                    format!("{label} quantized to {v}, expected {expected}"),
                )
            }
            Err(e) => return CriterionResult::fail(6, name, format!("{label}: {e}")),
        }
        cases.push((label.to_string(), obj.clone()));
    }
    let mut rng = corpus::seeded_rng(seed ^ 0x06);
    let groups: Vec<_> = corpus::group_list()
        .into_iter()
        .filter(|(_, t)| t.len() <= 12)
        .collect();
    while cases.len() < 50 {
        let (gname, table) = &groups[rng.random_range(0..groups.len())];
        let rep = corpus::random_representation(&mut rng, table, 3);
        let obj = DecoratedObject::new(rep.base().clone(), rep).unwrap();
        cases.push((format!("random over {gname}"), obj));
    }
    for (label, obj) in &cases {
        let circle = match quantize_circle(obj) {
            Ok(v) => v,
            Err(e) => return CriterionResult::fail(6, name, format!("{label}: {e}")),
        };
        let point = quantize_object(obj).dim;
        if circle != q(point as i64, 1) {
            return CriterionResult::fail(
                6,
                name,
                format!("{label}: circle {circle} != point dimension {point}"),
            );
        }
    }
    // Trivial rank-one decorations count inertia components by cardinality.
    for g in [corpus::bz(2), corpus::bz(3), corpus::bs3()] {
        let obj = DecoratedObject::new(g.clone(), LocalSystem::trivial(g.clone(), 1)).unwrap();
        match quantize_circle(&obj) {
            Ok(v) if v == cardinality(&inertia(&g)) => {}
            Ok(v) => {
                return CriterionResult::fail(
                    6,
                    name,
                    format!("trivial decoration: circle {v} != inertia cardinality"),
                )
            }
            Err(e) => return CriterionResult::fail(6, name, format!("trivial decoration: {e}")),
        }
    }
    CriterionResult::ok(
        6,
        name,
        "50 decorated objects satisfy circle = point; trivial lines count inertia".into(),
    )
}

/// Runs criteria 1 through 6 and assembles the deterministic report.
/// (Criterion 7, byte-identical reports across runs, is checked externally
/// by running this twice.)
pub fn run(seed: u64, budget: u64) -> SelfTestReport {
    let criteria = vec![
        criterion_cardinality(seed),
        criterion_burnside(seed),
        criterion_functoriality(seed),
        criterion_self_duality(budget),
        criterion_semiadditivity(seed),
        criterion_quantization(seed),
    ];
    SelfTestReport {
        seed,
        budget,
        criteria,
    }
}
