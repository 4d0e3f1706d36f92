//! The span category of finite groupoids.
//!
//! A span `X <- Z -> Y` is a morphism from `X` to `Y`; spans compose by the
//! iso-comma (homotopy pullback) construction and carry a monoidal product
//! by levelwise Cartesian products. Equivalence of spans over fixed feet is
//! decided on skeleta and returns a full witness.

use crate::groupoid::{
    self, discrete, iso_comma, product, same_groupoid, skeleton, truncation_level, Equivalence,
    Gpd, GroupoidError, GroupoidFunctor, MorId, NaturalIso, ObjId,
};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SpanError {
    #[error("span boundaries do not match")]
    MismatchedBoundary,
    #[error("search budget exceeded")]
    SearchBudgetExceeded,
    #[error("operation requires discrete groupoids")]
    NotDiscrete,
    #[error("left leg is not injective on objects")]
    LeftLegNotMono,
    #[error(transparent)]
    Groupoid(GroupoidError),
}

impl From<GroupoidError> for SpanError {
    fn from(e: GroupoidError) -> SpanError {
        match e {
            GroupoidError::SearchBudgetExceeded => SpanError::SearchBudgetExceeded,
            other => SpanError::Groupoid(other),
        }
    }
}

/// Two functors out of a shared apex.
#[derive(Clone)]
pub struct Span {
    apex: Gpd,
    left: GroupoidFunctor,
    right: GroupoidFunctor,
}

impl Span {
    pub fn new(
        apex: Gpd,
        left: GroupoidFunctor,
        right: GroupoidFunctor,
    ) -> Result<Span, SpanError> {
        if !same_groupoid(left.domain(), &apex) || !same_groupoid(right.domain(), &apex) {
            return Err(SpanError::MismatchedBoundary);
        }
        left.validate()?;
        right.validate()?;
        Ok(Span { apex, left, right })
    }

    pub(crate) fn trusted(apex: Gpd, left: GroupoidFunctor, right: GroupoidFunctor) -> Span {
        Span { apex, left, right }
    }

    pub fn apex(&self) -> &Gpd {
        &self.apex
    }

    pub fn left(&self) -> &GroupoidFunctor {
        &self.left
    }

    pub fn right(&self) -> &GroupoidFunctor {
        &self.right
    }

    pub fn source(&self) -> &Gpd {
        self.left.codomain()
    }

    pub fn target(&self) -> &Gpd {
        self.right.codomain()
    }
}

impl std::fmt::Debug for Span {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "Span({:?} <- {:?} -> {:?})",
            self.source(),
            self.apex,
            self.target()
        )
    }
}

/// The unit span: both legs the identity.
pub fn identity_span(x: &Gpd) -> Span {
    let id = GroupoidFunctor::identity(x);
    Span::trusted(x.clone(), id.clone(), id)
}

/// The span `X <- X -> Y` of a functor, with identity left leg.
pub fn from_map(f: &GroupoidFunctor) -> Span {
    Span::trusted(
        f.domain().clone(),
        GroupoidFunctor::identity(f.domain()),
        f.clone(),
    )
}

/// The dual span `Y <- X -> X` of a functor, reversing its direction.
pub fn dual_span(f: &GroupoidFunctor) -> Span {
    Span::trusted(
        f.domain().clone(),
        f.clone(),
        GroupoidFunctor::identity(f.domain()),
    )
}

/// Composition by homotopy pullback: the new apex is the iso-comma category
/// of `right(s)` against `left(t)`.
pub fn compose(s: &Span, t: &Span) -> Result<Span, SpanError> {
    if !same_groupoid(s.target(), t.source()) {
        return Err(SpanError::MismatchedBoundary);
    }
    let (apex, proj_s, proj_t, _filler) = iso_comma(&s.right, &t.left)?;
    Ok(Span::trusted(
        apex,
        s.left.compose_with(&proj_s),
        t.right.compose_with(&proj_t),
    ))
}

/// Monoidal product: apexes, feet, and legs are levelwise products.
pub fn tensor(s: &Span, t: &Span) -> Span {
    let apex = product(s.apex(), t.apex());
    let src = product(s.source(), t.source());
    let tgt = product(s.target(), t.target());
    Span::trusted(
        apex.clone(),
        GroupoidFunctor::pair(&apex, &src, &s.left, &t.left),
        GroupoidFunctor::pair(&apex, &tgt, &s.right, &t.right),
    )
}

/// The trace span `X x X <- X -> *` (left leg the diagonal) and the cotrace
/// span `* <- X -> X x X`, its reversal.
pub fn duality_spans(x: &Gpd) -> (Span, Span) {
    let xx = product(x, x);
    let pt = discrete(1);
    let diag = GroupoidFunctor::diagonal(x, &xx);
    let term = GroupoidFunctor::terminal(x, &pt);
    let tr = Span::trusted(x.clone(), diag.clone(), term.clone());
    let cotr = Span::trusted(x.clone(), term, diag);
    (tr, cotr)
}

/// Skeletonizes the apex and transports the legs; the result is equivalent
/// to the input span over the same feet.
pub fn normalize(s: &Span) -> Span {
    let light = groupoid::skeleton_light(s.apex());
    Span::trusted(
        light.skeletal.clone(),
        s.left.compose_with(&light.from_skeleton),
        s.right.compose_with(&light.from_skeleton),
    )
}

/// Left-leg truncation-class membership: `m`-truncated left legs span the
/// wide subcategory of spans allowed at level `m`.
pub fn member_of(s: &Span, m: i32) -> bool {
    assert!((-2..=1).contains(&m), "truncation level out of range");
    truncation_level(&s.left) <= m
}

/// A span is invertible iff both legs are equivalences; the underlying
/// functor is then `right . (left)^{-1}`.
pub fn is_invertible(s: &Span) -> Option<GroupoidFunctor> {
    if truncation_level(&s.left) != -2 || truncation_level(&s.right) != -2 {
        return None;
    }
    let inv = s.left.quasi_inverse().expect("-2-truncated legs are equivalences");
    Some(s.right.compose_with(&inv))
}

/// A map of finite pointed sets; `None` entries go to the basepoint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointedMap {
    pub source_size: usize,
    pub target_size: usize,
    pub map: Vec<Option<usize>>,
}

impl PointedMap {
    pub fn identity(n: usize) -> PointedMap {
        PointedMap {
            source_size: n,
            target_size: n,
            map: (0..n).map(Some).collect(),
        }
    }

    /// `then . self` in diagram order.
    pub fn compose(&self, then: &PointedMap) -> PointedMap {
        assert_eq!(self.target_size, then.source_size);
        PointedMap {
            source_size: self.source_size,
            target_size: then.target_size,
            map: self.map.iter().map(|v| v.and_then(|b| then.map[b])).collect(),
        }
    }
}

/// Sends a span of finite sets with injective left leg to the pointed map
/// that applies `right . left^{-1}` on the image and collapses the rest to
/// the basepoint.
pub fn to_pointed_map(s: &Span) -> Result<PointedMap, SpanError> {
    let is_discrete = |g: &Gpd| {
        g.morphism_count() == g.object_count()
            && (0..g.morphism_count()).all(|m| g.src(m) == g.tgt(m) && g.identity_of(g.src(m)) == m)
    };
    if !is_discrete(s.apex()) || !is_discrete(s.source()) || !is_discrete(s.target()) {
        return Err(SpanError::NotDiscrete);
    }
    let mut map = vec![None; s.source().object_count()];
    for z in 0..s.apex().object_count() {
        let a = s.left.obj(z);
        if map[a].is_some() {
            return Err(SpanError::LeftLegNotMono);
        }
        map[a] = Some(s.right.obj(z));
    }
    Ok(PointedMap {
        source_size: s.source().object_count(),
        target_size: s.target().object_count(),
        map,
    })
}

/// An equivalence of spans over identical feet: an equivalence of apexes
/// together with natural isomorphisms filling both leg triangles.
pub struct SpanEquivalence {
    pub apex_equivalence: Equivalence,
    /// `left(s') . e => left(s)`.
    pub left_witness: NaturalIso,
    /// `right(s') . e => right(s)`.
    pub right_witness: NaturalIso,
}

/// Per-component witness candidate produced during the equivalence search;
/// the decorated layer filters on it.
#[derive(Clone)]
pub(crate) struct ComponentWitness {
    pub rep_s: ObjId,
    pub rep_s2: ObjId,
    /// Morphism `left(s')(rep_s2) -> left(s)(rep_s)` in the source foot.
    pub a: MorId,
    /// Morphism `right(s')(rep_s2) -> right(s)(rep_s)` in the target foot.
    pub b: MorId,
    /// Rank map of automorphism groups `Aut(rep_s) -> Aut(rep_s2)`.
    pub theta: Vec<usize>,
}

pub(crate) fn spans_equivalent_filtered(
    s: &Span,
    s2: &Span,
    budget_limit: u64,
    mut filter: impl FnMut(&ComponentWitness) -> bool,
) -> Result<Option<SpanEquivalence>, SpanError> {
    assert!(
        same_groupoid(s.source(), s2.source()) && same_groupoid(s.target(), s2.target()),
        "spans_equivalent requires identical feet"
    );
    let x = s.source().clone();
    let y = s.target().clone();
    let sk = skeleton(s.apex());
    let sk2 = skeleton(s2.apex());
    let tables: Vec<groupoid::GroupTable> = sk
        .components()
        .iter()
        .map(|c| groupoid::GroupTable::from_aut(&c.aut))
        .collect();
    let tables2: Vec<groupoid::GroupTable> = sk2
        .components()
        .iter()
        .map(|c| groupoid::GroupTable::from_aut(&c.aut))
        .collect();
    let mut budget = groupoid::SearchBudget::new(budget_limit);

    let matching = {
        let filter = &mut filter;
        groupoid::match_components(
            tables.len(),
            tables2.len(),
            |i, j, budget| {
                let comp = &sk.components()[i];
                let comp2 = &sk2.components()[j];
                let (z, z2) = (comp.rep, comp2.rep);
                let p_z = s.left.obj(z);
                let p_z2 = s2.left.obj(z2);
                let q_z = s.right.obj(z);
                let q_z2 = s2.right.obj(z2);
                for &a in x.hom(p_z2, p_z) {
                    for &b in y.hom(q_z2, q_z) {
                        budget.charge(1)?;
                        // theta must conjugate both leg images through a and b.
                        let allowed: Vec<Vec<usize>> = (0..comp.aut.order())
                            .map(|r| {
                                let g = comp.aut.elements[r];
                                let conj_p = x.compose(
                                    x.inverse_of(a as usize),
                                    x.compose(s.left.mor(g), a as usize),
                                );
                                let conj_q = y.compose(
                                    y.inverse_of(b as usize),
                                    y.compose(s.right.mor(g), b as usize),
                                );
                                (0..comp2.aut.order())
                                    .filter(|&r2| {
                                        let h = comp2.aut.elements[r2];
                                        s2.left.mor(h) == conj_p && s2.right.mor(h) == conj_q
                                    })
                                    .collect()
                            })
                            .collect();
                        let theta = groupoid::constrained_iso_visit(
                            &tables[i],
                            &tables2[j],
                            &allowed,
                            budget,
                            &mut |theta| {
                                filter(&ComponentWitness {
                                    rep_s: z,
                                    rep_s2: z2,
                                    a: a as usize,
                                    b: b as usize,
                                    theta: theta.to_vec(),
                                })
                            },
                        )?;
                        if let Some(theta) = theta {
                            return Ok(Some(ComponentWitness {
                                rep_s: z,
                                rep_s2: z2,
                                a: a as usize,
                                b: b as usize,
                                theta,
                            }));
                        }
                    }
                }
                Ok(None)
            },
            &mut budget,
        )?
    };
    let Some(matching) = matching else {
        return Ok(None);
    };

    let match_of: Vec<usize> = matching.iter().map(|(j, _)| *j).collect();
    let thetas: Vec<Vec<usize>> = matching.iter().map(|(_, w)| w.theta.clone()).collect();
    let apex_equivalence =
        groupoid::equivalence_from_matching(s.apex(), s2.apex(), &sk, &sk2, &match_of, &thetas);

    // Leg triangle witnesses: at z the component is left(t(z)) . a.
    let mut left_comp = Vec::with_capacity(s.apex().object_count());
    let mut right_comp = Vec::with_capacity(s.apex().object_count());
    for z in 0..s.apex().object_count() {
        let c = sk.component_of(z);
        let w = &matching[c].1;
        let t = sk.transport(z);
        left_comp.push(x.compose(s.left.mor(t), w.a) as u32);
        right_comp.push(y.compose(s.right.mor(t), w.b) as u32);
    }
    let left_witness = NaturalIso::trusted(
        s2.left.compose_with(&apex_equivalence.forward),
        s.left.clone(),
        left_comp,
    );
    let right_witness = NaturalIso::trusted(
        s2.right.compose_with(&apex_equivalence.forward),
        s.right.clone(),
        right_comp,
    );
    Ok(Some(SpanEquivalence {
        apex_equivalence,
        left_witness,
        right_witness,
    }))
}

/// Decides whether two spans over identical feet are equivalent; on success
/// returns the apex equivalence and both leg-triangle witnesses.
pub fn spans_equivalent(
    s: &Span,
    s2: &Span,
    budget_limit: u64,
) -> Result<Option<SpanEquivalence>, SpanError> {
    spans_equivalent_filtered(s, s2, budget_limit, |_| true)
}

/// Checks the two snake identities exhibiting `X` as self-dual via its
/// trace and cotrace spans.
///
/// Convention: products are bracketed by construction order, and the
/// triple products `(X x X) x X` and `X x (X x X)` coincide index-for-index
/// under row-major flattening, so the associator is the identity relabeling.
/// Unit feet `X x *` and `* x X` are removed by post-composing the affected
/// leg with the projection. Each snake is composed once, normalized, and
/// compared with the identity span.
pub fn verify_self_duality(x: &Gpd, budget_limit: u64) -> Result<bool, SpanError> {
    let (tr, cotr) = duality_spans(x);
    let id_span = identity_span(x);

    // Snake 1: X -> X x (X x X) -> X through (id x cotr) then (tr x id).
    let a = tensor(&id_span, &cotr);
    let b = tensor(&tr, &id_span);
    let a_adj = Span::trusted(
        a.apex().clone(),
        GroupoidFunctor::projection(a.source(), 0).compose_with(&a.left),
        a.right.clone(),
    );
    let b_adj = Span::trusted(
        b.apex().clone(),
        b.left.clone(),
        GroupoidFunctor::projection(b.target(), 1).compose_with(&b.right),
    );
    let snake1 = normalize(&compose(&a_adj, &b_adj)?);
    if spans_equivalent(&snake1, &id_span, budget_limit)?.is_none() {
        return Ok(false);
    }

    // Snake 2: X -> (X x X) x X -> X through (cotr x id) then (id x tr).
    let a2 = tensor(&cotr, &id_span);
    let b2 = tensor(&id_span, &tr);
    let a2_adj = Span::trusted(
        a2.apex().clone(),
        GroupoidFunctor::projection(a2.source(), 1).compose_with(&a2.left),
        a2.right.clone(),
    );
    let b2_adj = Span::trusted(
        b2.apex().clone(),
        b2.left.clone(),
        GroupoidFunctor::projection(b2.target(), 0).compose_with(&b2.right),
    );
    let snake2 = normalize(&compose(&a2_adj, &b2_adj)?);
    Ok(spans_equivalent(&snake2, &id_span, budget_limit)?.is_some())
}
