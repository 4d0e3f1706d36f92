//! Groupoid constructions: frozen values from independent enumeration
//! oracles, validation fuzzing, and structural laws.

use finspan::corpus::{
    self, bs3, bz, cyclic, klein_four, symmetric, translation_groupoid,
};
use finspan::groupoid::{
    are_equivalent, cardinality, delooping, discrete, disjoint_union, homotopy_fiber, inertia,
    iso_comma, point_inclusion, product, skeleton, truncation_level, Axiom, FiniteGroupoid, Gpd,
    GroupAxiom, GroupoidError, GroupoidFunctor,
};
use finspan::linalg::Rational;
use rand::Rng;

const BUDGET: u64 = 10_000_000;

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

/// Independent cardinality oracle: count automorphisms of one object per
/// component by raw hom-set scanning, no skeleton machinery.
fn cardinality_oracle(x: &Gpd) -> Rational {
    let n = x.object_count();
    let mut seen = vec![false; n];
    let mut total = Rational::zero();
    for o in 0..n {
        if seen[o] {
            continue;
        }
        // Mark everything reachable (one hop is enough only in general via
        // fixpoint iteration).
        let mut stack = vec![o];
        seen[o] = true;
        while let Some(cur) = stack.pop() {
            for m in 0..x.morphism_count() {
                let (s, t) = (x.src(m), x.tgt(m));
                if s == cur && !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
                if t == cur && !seen[s] {
                    seen[s] = true;
                    stack.push(s);
                }
            }
        }
        let auts = (0..x.morphism_count())
            .filter(|&m| x.src(m) == o && x.tgt(m) == o)
            .count();
        total += q(1, auts as i64);
    }
    total
}

#[test]
fn discrete_basics() {
    assert_eq!(cardinality(&discrete(0)), q(0, 1));
    assert_eq!(cardinality(&discrete(1)), q(1, 1));
    assert_eq!(cardinality(&discrete(3)), q(3, 1));
    let to_point = GroupoidFunctor::terminal(&discrete(3), &discrete(1));
    assert_eq!(truncation_level(&to_point), 0);
}

#[test]
fn delooping_group_axioms() {
    let z2 = delooping(&cyclic(2)).unwrap();
    assert_eq!(z2.object_count(), 1);
    assert_eq!(z2.morphism_count(), 2);
    let sigma = 1;
    assert_eq!(z2.inverse_of(sigma), sigma);
    assert_eq!(z2.compose(sigma, sigma), z2.identity_of(0));

    let trivial = delooping(&cyclic(1)).unwrap();
    assert_eq!(cardinality(&trivial), q(1, 1));

    // A non-associative 3x3 Latin-square-like table.
    let bad = vec![vec![0, 1, 2], vec![1, 2, 0], vec![2, 1, 0]];
    assert_eq!(
        delooping(&bad).unwrap_err(),
        GroupoidError::NotAGroup(GroupAxiom::Associativity)
    );
}

#[test]
fn disjoint_union_cardinalities() {
    let x = bz(2);
    let u = disjoint_union(&x, &discrete(1));
    assert_eq!(cardinality(&u), q(3, 2));
    assert_eq!(cardinality(&u), cardinality_oracle(&u));

    let five = disjoint_union(&discrete(2), &discrete(3));
    assert!(are_equivalent(&five, &discrete(5), BUDGET).unwrap().is_some());

    let with_empty = disjoint_union(&x, &discrete(0));
    assert!(are_equivalent(&with_empty, &x, BUDGET).unwrap().is_some());
}

#[test]
fn product_cardinalities() {
    let x = product(&bz(2), &bz(3));
    assert_eq!(x.object_count(), 1);
    assert_eq!(x.morphism_count(), 6);
    assert_eq!(cardinality(&x), q(1, 6));
    assert_eq!(cardinality_oracle(&x), q(1, 6));

    let d6 = product(&discrete(2), &discrete(3));
    assert!(are_equivalent(&d6, &discrete(6), BUDGET).unwrap().is_some());

    let unit = product(&bs3(), &discrete(1));
    assert!(are_equivalent(&unit, &bs3(), BUDGET).unwrap().is_some());
}

#[test]
fn iso_comma_loop_space_of_bz2() {
    // * -> BZ/2 against itself: the loop space, a 2-element set.
    let x = bz(2);
    let i = point_inclusion(&x, 0).unwrap();
    let (p, _, _, filler) = iso_comma(&i, &i).unwrap();
    assert_eq!(p.object_count(), 2);
    assert_eq!(p.morphism_count(), 2);
    assert!(are_equivalent(&p, &discrete(2), BUDGET).unwrap().is_some());
    filler.validate().unwrap();
}

#[test]
fn iso_comma_of_identities_is_the_arrow_groupoid() {
    // iso_comma(id, id) on BZ/2 is the arrow groupoid: objects are the two
    // group elements, morphisms are pairs (u, v), and (1, sigma) connects
    // the two objects. It is equivalent to BZ/2 itself (cardinality 1/2),
    // as composing with the identity span demands.
    let x = bz(2);
    let id = GroupoidFunctor::identity(&x);
    let (p, pa, pb, filler) = iso_comma(&id, &id).unwrap();
    assert_eq!(p.object_count(), 2);
    assert_eq!(p.morphism_count(), 8);
    let sk = skeleton(&p);
    assert_eq!(sk.components().len(), 1);
    assert_eq!(sk.components()[0].aut.order(), 2);
    assert_eq!(cardinality(&p), q(1, 2));
    assert!(are_equivalent(&p, &x, BUDGET).unwrap().is_some());
    pa.validate().unwrap();
    pb.validate().unwrap();
    filler.validate().unwrap();

    // On a discrete groupoid the construction returns the groupoid itself.
    let d = discrete(3);
    let idd = GroupoidFunctor::identity(&d);
    let (pd, _, _, _) = iso_comma(&idd, &idd).unwrap();
    assert!(are_equivalent(&pd, &d, BUDGET).unwrap().is_some());
}

#[test]
fn iso_comma_weak_universal_property() {
    // For small cones over the cospan (delta, delta) on BZ/2, a mediating
    // functor into the iso-comma exists, and every mediator (triangles and
    // filler matched up to compatible natural isomorphisms) is naturally
    // isomorphic to the canonical one.
    let x = bz(2);
    let c = product(&x, &x);
    let f = GroupoidFunctor::diagonal(&x, &c);
    let g = GroupoidFunctor::diagonal(&x, &c);
    let (p, pa, pb, filler) = iso_comma(&f, &g).unwrap();
    filler.validate().unwrap();

    // Cones over Q = BZ/2 with identity legs: every choice of filler is a
    // cone here (the group is abelian), and each must have an essentially
    // unique mediator.
    let q1 = x.clone();
    let u1 = GroupoidFunctor::identity(&x);
    for gamma in 0..4 {
        let gamma1 = vec![c.hom(0, 0)[gamma]];
        check_mediators(&p, &pa, &pb, &filler, &f, &g, &q1, &u1, &u1, &gamma1);
    }

    // Random cones over Q = discrete(2): independent filler choices per point.
    let q2 = discrete(2);
    let u2 = GroupoidFunctor::new(q2.clone(), x.clone(), vec![0, 0], vec![0, 0]).unwrap();
    let mut rng = corpus::seeded_rng(67);
    for _ in 0..4 {
        let gamma2 = vec![
            c.hom(0, 0)[rng.random_range(0..4)],
            c.hom(0, 0)[rng.random_range(0..4)],
        ];
        check_mediators(&p, &pa, &pb, &filler, &f, &g, &q2, &u2, &u2, &gamma2);
    }
}

/// Asserts existence of the canonical mediator for the cone
/// `(q, u, v, gamma)` and that every mediator is naturally isomorphic to it.
#[allow(clippy::too_many_arguments)]
fn check_mediators(
    p: &Gpd,
    pa: &GroupoidFunctor,
    pb: &GroupoidFunctor,
    filler: &finspan::groupoid::NaturalIso,
    f: &GroupoidFunctor,
    g: &GroupoidFunctor,
    q: &Gpd,
    u: &GroupoidFunctor,
    v: &GroupoidFunctor,
    gamma: &[u32],
) {
    let canonical = canonical_mediator(p, pa, pb, filler, q, u, v, gamma);
    let mediators: Vec<GroupoidFunctor> = all_functors(q, p)
        .into_iter()
        .filter(|h| is_cone_morphism(h, pa, pb, filler, f, g, u, v, gamma))
        .collect();
    assert!(
        mediators
            .iter()
            .any(|h| functors_equal(h, &canonical)),
        "canonical mediator not found by enumeration"
    );
    for h in &mediators {
        assert!(
            naturally_isomorphic(p, h, &canonical),
            "mediator not isomorphic to the canonical one"
        );
    }
}

fn canonical_mediator(
    p: &Gpd,
    pa: &GroupoidFunctor,
    pb: &GroupoidFunctor,
    filler: &finspan::groupoid::NaturalIso,
    q: &Gpd,
    u: &GroupoidFunctor,
    v: &GroupoidFunctor,
    gamma: &[u32],
) -> GroupoidFunctor {
    // h(o) is the unique iso-comma object with the cone's labels.
    let obj_map: Vec<u32> = (0..q.object_count())
        .map(|o| {
            (0..p.object_count())
                .find(|&z| {
                    pa.obj(z) == u.obj(o)
                        && pb.obj(z) == v.obj(o)
                        && filler.component(z) == gamma[o] as usize
                })
                .expect("canonical mediator object") as u32
        })
        .collect();
    let mor_map: Vec<u32> = (0..q.morphism_count())
        .map(|m| {
            let (s, t) = (q.src(m), q.tgt(m));
            *p.hom(obj_map[s] as usize, obj_map[t] as usize)
                .iter()
                .find(|&&w| pa.mor(w as usize) == u.mor(m) && pb.mor(w as usize) == v.mor(m))
                .expect("canonical mediator morphism")
        })
        .collect();
    GroupoidFunctor::new(q.clone(), p.clone(), obj_map, mor_map).unwrap()
}

/// Exhaustive functor enumeration for tiny domains.
fn all_functors(q: &Gpd, p: &Gpd) -> Vec<GroupoidFunctor> {
    let n = q.object_count();
    let m = q.morphism_count();
    let mut out = Vec::new();
    let mut obj = vec![0usize; n];
    'outer: loop {
        // Enumerate morphism images bucket by bucket.
        let buckets: Vec<Vec<usize>> = (0..m)
            .map(|mi| {
                p.hom(obj[q.src(mi)], obj[q.tgt(mi)])
                    .iter()
                    .map(|&w| w as usize)
                    .collect()
            })
            .collect();
        if buckets.iter().all(|b| !b.is_empty()) {
            let mut pick = vec![0usize; m];
            loop {
                let mor_map: Vec<u32> = (0..m).map(|mi| buckets[mi][pick[mi]] as u32).collect();
                if let Ok(h) = GroupoidFunctor::new(
                    q.clone(),
                    p.clone(),
                    obj.iter().map(|&o| o as u32).collect(),
                    mor_map,
                ) {
                    out.push(h);
                }
                let mut i = 0;
                loop {
                    if i == m {
                        break;
                    }
                    pick[i] += 1;
                    if pick[i] < buckets[i].len() {
                        break;
                    }
                    pick[i] = 0;
                    i += 1;
                }
                if pick.iter().all(|&x| x == 0) {
                    break;
                }
            }
        }
        let mut i = 0;
        loop {
            if i == n {
                break 'outer;
            }
            obj[i] += 1;
            if obj[i] < p.object_count() {
                break;
            }
            obj[i] = 0;
            i += 1;
        }
        if n == 0 {
            break;
        }
    }
    out
}

/// Cone-morphism test: natural isomorphisms filling both triangles exist
/// whose pasting with the apex filler reproduces the cone filler.
#[allow(clippy::too_many_arguments)]
fn is_cone_morphism(
    h: &GroupoidFunctor,
    pa: &GroupoidFunctor,
    pb: &GroupoidFunctor,
    filler: &finspan::groupoid::NaturalIso,
    f: &GroupoidFunctor,
    g: &GroupoidFunctor,
    u: &GroupoidFunctor,
    v: &GroupoidFunctor,
    gamma: &[u32],
) -> bool {
    let q = h.domain();
    let a = pa.codomain();
    let b = pb.codomain();
    let c = f.codomain();
    let n = q.object_count();
    // Joint search over lambda and rho components.
    fn go(
        i: usize,
        n: usize,
        lambda: &mut Vec<u32>,
        rho: &mut Vec<u32>,
        ctx: &(
            &GroupoidFunctor,
            &GroupoidFunctor,
            &GroupoidFunctor,
            &finspan::groupoid::NaturalIso,
            &GroupoidFunctor,
            &GroupoidFunctor,
            &GroupoidFunctor,
            &GroupoidFunctor,
            &[u32],
            &Gpd,
            &Gpd,
            &Gpd,
        ),
    ) -> bool {
        let (h, pa, pb, filler, f, g, u, v, gamma, a, b, c) = *ctx;
        if i == n {
            let lam = finspan::groupoid::NaturalIso::new(
                pa.compose_with(h),
                u.clone(),
                lambda.clone(),
            );
            let rho_iso = finspan::groupoid::NaturalIso::new(
                pb.compose_with(h),
                v.clone(),
                rho.clone(),
            );
            let (Ok(_), Ok(_)) = (lam, rho_iso) else {
                return false;
            };
            // Filler pasting: g(rho) . filler(h(q)) . f(lambda)^{-1} = gamma.
            return (0..n).all(|o| {
                let pasted = c.compose(
                    g.mor(rho[o] as usize),
                    c.compose(
                        filler.component(h.obj(o)),
                        c.inverse_of(f.mor(lambda[o] as usize)),
                    ),
                );
                pasted == gamma[o] as usize
            });
        }
        for &l in a.hom(pa.obj(h.obj(i)), u.obj(i)) {
            for &r in b.hom(pb.obj(h.obj(i)), v.obj(i)) {
                lambda.push(l);
                rho.push(r);
                if go(i + 1, n, lambda, rho, ctx) {
                    return true;
                }
                lambda.pop();
                rho.pop();
            }
        }
        false
    }
    let mut lambda = Vec::with_capacity(n);
    let mut rho = Vec::with_capacity(n);
    go(
        0,
        n,
        &mut lambda,
        &mut rho,
        &(h, pa, pb, filler, f, g, u, v, gamma, a, b, c),
    )
}

fn functors_equal(a: &GroupoidFunctor, b: &GroupoidFunctor) -> bool {
    a.object_map() == b.object_map() && a.morphism_map() == b.morphism_map()
}

fn naturally_isomorphic(p: &Gpd, h1: &GroupoidFunctor, h2: &GroupoidFunctor) -> bool {
    let n = h1.domain().object_count();
    fn go(
        p: &Gpd,
        h1: &GroupoidFunctor,
        h2: &GroupoidFunctor,
        comps: &mut Vec<u32>,
        x: usize,
        n: usize,
    ) -> bool {
        if x == n {
            return finspan::groupoid::NaturalIso::new(h1.clone(), h2.clone(), comps.clone())
                .is_ok();
        }
        for &cm in p.hom(h1.obj(x), h2.obj(x)) {
            comps.push(cm);
            if go(p, h1, h2, comps, x + 1, n) {
                return true;
            }
            comps.pop();
        }
        false
    }
    let mut comps = Vec::with_capacity(n);
    go(p, h1, h2, &mut comps, 0, n)
}

#[test]
fn homotopy_fibers() {
    let x = bz(2);
    let id = GroupoidFunctor::identity(&x);
    let (fiber, _) = homotopy_fiber(&id, 0).unwrap();
    let sk = skeleton(&fiber);
    assert_eq!(sk.components().len(), 1);
    assert_eq!(sk.components()[0].aut.order(), 1);

    let i = point_inclusion(&x, 0).unwrap();
    let (fiber, _) = homotopy_fiber(&i, 0).unwrap();
    assert!(are_equivalent(&fiber, &discrete(2), BUDGET).unwrap().is_some());

    // BZ/2 -> BS3 induced by a transposition: the fiber is the coset set.
    let incl = bz2_into_bs3();
    let (fiber, _) = homotopy_fiber(&incl, 0).unwrap();
    assert!(are_equivalent(&fiber, &discrete(3), BUDGET).unwrap().is_some());

    assert_eq!(
        homotopy_fiber(&i, 7).unwrap_err(),
        GroupoidError::BadObjectIndex { index: 7, count: 1 }
    );
}

/// The subgroup inclusion Z/2 -> S3 through the transposition swapping the
/// first two letters, delooped.
fn bz2_into_bs3() -> GroupoidFunctor {
    let s3_table = symmetric(3);
    let s3 = bs3();
    let z2 = bz(2);
    // Find the permutation table index of the transposition (0 1).
    // perms_of(3) lists lexicographically: [0,1,2], [0,2,1], [1,0,2], ...
    let transposition = 2usize;
    assert_eq!(s3_table[transposition][transposition], 0);
    GroupoidFunctor::new(
        z2,
        s3,
        vec![0],
        vec![0, transposition as u32],
    )
    .unwrap()
}

#[test]
fn truncation_levels() {
    let x = bz(2);
    assert_eq!(truncation_level(&GroupoidFunctor::identity(&x)), -2);
    let i = point_inclusion(&x, 0).unwrap();
    assert_eq!(truncation_level(&i), 0);
    let q_map = GroupoidFunctor::terminal(&x, &discrete(1));
    assert_eq!(truncation_level(&q_map), 1);
    // The unique map out of the empty groupoid has empty fibers.
    let from_empty = GroupoidFunctor::new(discrete(0), x.clone(), vec![], vec![]).unwrap();
    assert_eq!(truncation_level(&from_empty), -1);
    // Identity on the empty groupoid is an equivalence.
    let empty_id = GroupoidFunctor::identity(&discrete(0));
    assert_eq!(truncation_level(&empty_id), -2);
}

#[test]
fn skeleton_shapes_and_witnesses() {
    let d3 = discrete(3);
    let sk = skeleton(&d3);
    assert_eq!(sk.components().len(), 3);
    assert!(sk.components().iter().all(|c| c.aut.order() == 1));

    let t = translation_groupoid(&cyclic(2));
    let sk = skeleton(&t);
    assert_eq!(sk.components().len(), 1);
    assert_eq!(sk.components()[0].aut.order(), 1);
    assert!(are_equivalent(&t, &discrete(1), BUDGET).unwrap().is_some());

    let two = disjoint_union(&bz(2), &bz(2));
    let sk = skeleton(&two);
    assert_eq!(sk.components().len(), 2);
    assert!(sk.components().iter().all(|c| c.aut.order() == 2));

    // Round-trip witnesses are valid natural isomorphisms.
    for g in corpus::groupoid_corpus() {
        let sk = skeleton(&g);
        sk.to_skeleton().validate().unwrap();
        sk.from_skeleton().validate().unwrap();
        let (unit, counit) = sk.round_trip_witnesses();
        unit.validate().unwrap();
        counit.validate().unwrap();
    }
}

#[test]
fn equivalence_decisions() {
    let x = bs3();
    let e = are_equivalent(&x, &x, BUDGET).unwrap().expect("reflexive");
    e.forward.validate().unwrap();
    e.backward.validate().unwrap();
    e.unit.validate().unwrap();
    e.counit.validate().unwrap();

    let t = translation_groupoid(&symmetric(3));
    let e = are_equivalent(&t, &discrete(1), BUDGET).unwrap().expect("contractible");
    e.unit.validate().unwrap();
    e.counit.validate().unwrap();

    // Z/4 and the Klein four group have order 4 but are not isomorphic.
    let a = bz(4);
    let b = delooping(&klein_four()).unwrap();
    assert!(are_equivalent(&a, &b, BUDGET).unwrap().is_none());
}

#[test]
fn equivalence_invariance_of_cardinality() {
    let mut rng = corpus::seeded_rng(11);
    let corpus_list = corpus::groupoid_corpus();
    for _ in 0..30 {
        let a = &corpus_list[rng.random_range(0..corpus_list.len())];
        let b = &corpus_list[rng.random_range(0..corpus_list.len())];
        let u = disjoint_union(a, b);
        let p = product(a, b);
        assert_eq!(
            cardinality(&u),
            cardinality(a) + cardinality(b),
            "additivity"
        );
        assert_eq!(
            cardinality(&p),
            cardinality(a) * cardinality(b),
            "multiplicativity"
        );
        if let Some(e) = are_equivalent(a, b, BUDGET).unwrap() {
            assert_eq!(cardinality(a), cardinality(b));
            e.unit.validate().unwrap();
        }
    }
}

#[test]
fn inertia_groupoids() {
    assert!(are_equivalent(&inertia(&discrete(3)), &discrete(3), BUDGET)
        .unwrap()
        .is_some());

    let li = inertia(&bz(2));
    let sk = skeleton(&li);
    assert_eq!(sk.components().len(), 2);
    assert!(sk.components().iter().all(|c| c.aut.order() == 2));

    // Conjugacy classes of S3: 1, transpositions, 3-cycles, with
    // centralizers S3, Z/2, Z/3.
    let ls = inertia(&bs3());
    let sk = skeleton(&ls);
    let mut orders: Vec<usize> = sk.components().iter().map(|c| c.aut.order()).collect();
    orders.sort_unstable();
    assert_eq!(orders, vec![2, 3, 6]);
    assert_eq!(cardinality(&ls), q(1, 1));
}

#[test]
fn inertia_agrees_with_iso_comma_of_diagonals() {
    for g in corpus::groupoid_corpus() {
        let xx = product(&g, &g);
        let diag = GroupoidFunctor::diagonal(&g, &xx);
        let (loops, _, _, _) = iso_comma(&diag, &diag).unwrap();
        assert!(
            are_equivalent(&inertia(&g), &loops, BUDGET).unwrap().is_some(),
            "inertia mismatch for {:?}",
            g
        );
    }
}

#[test]
fn validation_rejects_corrupted_tables() {
    // Build a valid Z/3 delooping and corrupt it in targeted ways.
    let base = || {
        let t = cyclic(3);
        let mut entries = Vec::new();
        for a in 0..3 {
            for b in 0..3 {
                entries.push((a, b, t[a][b]));
            }
        }
        (
            1usize,
            vec![(0usize, 0usize); 3],
            vec![0usize],
            entries,
            vec![0usize, 2, 1],
        )
    };

    // Valid input passes.
    let (n, mors, id, comp, inv) = base();
    FiniteGroupoid::from_table_parts(None, n, mors.clone(), id.clone(), comp.clone(), inv.clone())
        .unwrap();

    let axiom_of = |res: Result<Gpd, GroupoidError>| match res.unwrap_err() {
        GroupoidError::InvariantViolation { axiom, .. } => axiom,
        other => panic!("unexpected error {other:?}"),
    };

    // Missing compose entry: totality.
    let (n, mors, id, mut comp, inv) = base();
    comp.remove(4);
    assert_eq!(
        axiom_of(FiniteGroupoid::from_table_parts(None, n, mors, id, comp, inv)),
        Axiom::Totality
    );

    // Wrong associativity: swap one entry to break the triple law while
    // keeping totality (1*1 = 1 instead of 2).
    let (n, mors, id, mut comp, inv) = base();
    comp[4] = (1, 1, 1);
    let got = axiom_of(FiniteGroupoid::from_table_parts(None, n, mors, id, comp, inv));
    assert!(got == Axiom::Associativity || got == Axiom::Inverse || got == Axiom::Identity);

    // Broken inverse table.
    let (n, mors, id, comp, mut inv) = base();
    inv[1] = 1;
    assert_eq!(
        axiom_of(FiniteGroupoid::from_table_parts(None, n, mors, id, comp, inv)),
        Axiom::Inverse
    );

    // Identity not a unit: point identity at a non-identity morphism.
    let (n, mors, mut id, comp, inv) = base();
    id[0] = 1;
    assert_eq!(
        axiom_of(FiniteGroupoid::from_table_parts(None, n, mors, id, comp, inv)),
        Axiom::Identity
    );

    // Shape: out-of-range morphism endpoint.
    let res = FiniteGroupoid::from_table_parts(
        None,
        1,
        vec![(0, 5)],
        vec![0],
        vec![(0, 0, 0)],
        vec![0],
    );
    assert_eq!(axiom_of(res), Axiom::Shape);
}

#[test]
fn fuzzed_corruptions_are_rejected() {
    let mut rng = corpus::seeded_rng(23);
    let t = symmetric(3);
    let mut entries = Vec::new();
    for a in 0..6 {
        for b in 0..6 {
            entries.push((a, b, t[a][b]));
        }
    }
    let identity = vec![0usize];
    let inverse: Vec<usize> = (0..6)
        .map(|g| (0..6).find(|&h| t[g][h] == 0).unwrap())
        .collect();
    let mors = vec![(0usize, 0usize); 6];
    for _ in 0..200 {
        let mut comp = entries.clone();
        let mut id = identity.clone();
        let mut inv = inverse.clone();
        match rng.random_range(0..3) {
            0 => {
                let k = rng.random_range(0..comp.len());
                let new = rng.random_range(0..6);
                if comp[k].2 == new {
                    continue;
                }
                comp[k].2 = new;
            }
            1 => {
                let new = rng.random_range(1..6);
                id[0] = new;
            }
            _ => {
                let k = rng.random_range(0..6);
                let new = rng.random_range(0..6);
                if inv[k] == new {
                    continue;
                }
                inv[k] = new;
            }
        }
        assert!(
            FiniteGroupoid::from_table_parts(None, 1, mors.clone(), id, comp, inv).is_err(),
            "corruption slipped through"
        );
    }
}

#[test]
fn truncation_minus_two_iff_equivalence() {
    // Independent oracle: fully faithful + essentially surjective, checked
    // by raw hom-set comparison and component reachability.
    fn is_equivalence_oracle(f: &GroupoidFunctor) -> bool {
        let (dom, cod) = (f.domain(), f.codomain());
        // Fully faithful on every hom-set.
        for a in 0..dom.object_count() {
            for b in 0..dom.object_count() {
                let dom_hom = dom.hom(a, b);
                let cod_hom = cod.hom(f.obj(a), f.obj(b));
                if dom_hom.len() != cod_hom.len() {
                    return false;
                }
                let mut images: Vec<usize> =
                    dom_hom.iter().map(|&m| f.mor(m as usize)).collect();
                images.sort_unstable();
                images.dedup();
                if images.len() != dom_hom.len() {
                    return false;
                }
            }
        }
        // Essentially surjective: every codomain object sees some image.
        let cod_sk = skeleton(cod);
        let mut hit = vec![false; cod_sk.components().len()];
        for a in 0..dom.object_count() {
            hit[cod_sk.component_of(f.obj(a))] = true;
        }
        hit.into_iter().all(|h| h)
    }

    let mut rng = corpus::seeded_rng(47);
    let corpus_list = corpus::groupoid_corpus();
    let mut equivalences = 0;
    for _ in 0..40 {
        let a = corpus_list[rng.random_range(0..corpus_list.len())].clone();
        let b = corpus_list[rng.random_range(0..corpus_list.len())].clone();
        let f = corpus::random_functor(&mut rng, &a, &b);
        let oracle = is_equivalence_oracle(&f);
        assert_eq!(truncation_level(&f) == -2, oracle);
        if oracle {
            equivalences += 1;
        }
    }
    // Identity functors guarantee positives even if the random draw has none.
    for g in &corpus_list {
        let id = GroupoidFunctor::identity(g);
        assert!(is_equivalence_oracle(&id));
        assert_eq!(truncation_level(&id), -2);
    }
    let _ = equivalences;
}

#[test]
fn values_are_shareable_across_threads() {
    // Everything is immutable after construction; the types must be Send
    // and Sync so values can be shared between concurrent tasks.
    fn assert_send_sync<T: Send + Sync>() {}
    assert_send_sync::<FiniteGroupoid>();
    assert_send_sync::<GroupoidFunctor>();
    assert_send_sync::<finspan::groupoid::NaturalIso>();
    assert_send_sync::<finspan::groupoid::Skeleton>();
    assert_send_sync::<finspan::span::Span>();
    assert_send_sync::<finspan::local_system::LocalSystem>();
    assert_send_sync::<finspan::local_system::LSMap>();
    assert_send_sync::<finspan::tft::DecoratedSpan>();
    assert_send_sync::<finspan::linalg::RatMatrix>();

    // And results agree when computed from several threads at once.
    let g = bs3();
    let handles: Vec<_> = (0..4)
        .map(|_| {
            let g = g.clone();
            std::thread::spawn(move || cardinality(&inertia(&g)))
        })
        .collect();
    for h in handles {
        assert_eq!(h.join().unwrap(), q(1, 1));
    }
}

#[test]
fn exhausted_budgets_fail_loudly() {
    // A zero budget cannot even test one component matching; the failure is
    // an explicit error, never a silent "not equivalent".
    let a = bs3();
    let err = are_equivalent(&a, &a, 0).unwrap_err();
    assert_eq!(err, GroupoidError::SearchBudgetExceeded);
    // With a real budget the same query resolves.
    assert!(are_equivalent(&a, &a, 10_000_000).unwrap().is_some());
    // Mismatched component counts are decided without search, so even a
    // zero budget suffices there.
    assert!(are_equivalent(&a, &disjoint_union(&a, &bz(2)), 0)
        .unwrap()
        .is_none());
}

#[test]
fn cross_matched_components_still_yield_valid_witnesses() {
    // Components must be matched across the two groupoids in a different
    // order than they are listed; the assembled witnesses stay valid.
    let x = disjoint_union(&bz(2), &bz(3));
    let y = disjoint_union(&bz(3), &bz(2));
    let e = are_equivalent(&x, &y, BUDGET).unwrap().expect("equivalent");
    e.forward.validate().unwrap();
    e.backward.validate().unwrap();
    e.unit.validate().unwrap();
    e.counit.validate().unwrap();
    assert_eq!(cardinality(&x), cardinality(&y));

    let three = disjoint_union(&disjoint_union(&bz(3), &discrete(1)), &bz(2));
    let three_rev = disjoint_union(&bz(2), &disjoint_union(&discrete(1), &bz(3)));
    let e = are_equivalent(&three, &three_rev, BUDGET).unwrap().expect("equivalent");
    e.unit.validate().unwrap();
    e.counit.validate().unwrap();
}
