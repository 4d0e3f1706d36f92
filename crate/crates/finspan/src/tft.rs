//! Decorated spans and the finite-path-integral quantization of
//! 1-dimensional topological field theories valued in Q-vector spaces.
//!
//! A decorated object is a finite groupoid with a local system; a decorated
//! span carries a local system on its apex, an invertible comparison with
//! the restricted source system (the Cartesian condition on the left leg),
//! and an arbitrary comparison on the right. Every object decorated with
//! pointwise finite-dimensional fibers is dualizable; quantization sends an
//! object to the colimit (coinvariants) of its system and the circle to a
//! cardinality-weighted trace sum.

use crate::groupoid::{
    discrete, iso_comma, product, same_groupoid, skeleton_light, Gpd, GroupoidFunctor,
};
use crate::linalg::{RatMatrix, Rational};
use crate::linearize::{colimit_ls, ColimitPresentation};
use crate::local_system::{
    dual_local_system, restrict, LSMap, LocalSystem, LocalSystemError,
};
use crate::span::{self, duality_spans, identity_span, tensor as span_tensor, Span, SpanError};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TftError {
    #[error("decorated span boundaries do not match")]
    MismatchedBoundary,
    #[error("composite scalar varies within a component (corrupted input)")]
    NonConstantScalar,
    #[error("expected an endomorphism of the monoidal unit: {0}")]
    NotUnitEndomorphism(String),
    #[error(transparent)]
    Span(SpanError),
    #[error(transparent)]
    LocalSystem(#[from] LocalSystemError),
}

impl From<SpanError> for TftError {
    fn from(e: SpanError) -> TftError {
        TftError::Span(e)
    }
}

/// A finite groupoid decorated with a local system of Q-vector spaces.
#[derive(Clone)]
pub struct DecoratedObject {
    pub space: Gpd,
    pub system: LocalSystem,
}

impl DecoratedObject {
    pub fn new(space: Gpd, system: LocalSystem) -> Result<DecoratedObject, TftError> {
        if !same_groupoid(&space, system.base()) {
            return Err(TftError::MismatchedBoundary);
        }
        Ok(DecoratedObject { space, system })
    }

    /// The monoidal unit: a point decorated with the line Q.
    pub fn unit() -> DecoratedObject {
        let pt = discrete(1);
        let system = LocalSystem::trivial(pt.clone(), 1);
        DecoratedObject { space: pt, system }
    }

    pub fn equal(a: &DecoratedObject, b: &DecoratedObject) -> bool {
        same_groupoid(&a.space, &b.space) && LocalSystem::equal(&a.system, &b.system)
    }

    /// Monoidal product of decorated objects.
    pub fn tensor(a: &DecoratedObject, b: &DecoratedObject) -> DecoratedObject {
        let space = product(&a.space, &b.space);
        let system = LocalSystem::tensor(&a.system, &b.system, &space);
        DecoratedObject { space, system }
    }
}

/// A span of decorated objects: the left comparison is invertible (the
/// Cartesian condition), the right comparison is arbitrary.
#[derive(Clone)]
pub struct DecoratedSpan {
    source: DecoratedObject,
    target: DecoratedObject,
    carrier: Span,
    apex_system: LocalSystem,
    left_dec: LSMap,
    right_dec: LSMap,
}

impl DecoratedSpan {
    pub fn new(
        source: DecoratedObject,
        target: DecoratedObject,
        carrier: Span,
        apex_system: LocalSystem,
        left_components: Vec<RatMatrix>,
        right_components: Vec<RatMatrix>,
    ) -> Result<DecoratedSpan, TftError> {
        if !same_groupoid(carrier.source(), &source.space)
            || !same_groupoid(carrier.target(), &target.space)
        {
            return Err(TftError::MismatchedBoundary);
        }
        let left_dec = LSMap::new(
            apex_system.clone(),
            restrict(&source.system, carrier.left())?,
            left_components,
        )?;
        let right_dec = LSMap::new(
            apex_system.clone(),
            restrict(&target.system, carrier.right())?,
            right_components,
        )?;
        if !left_dec.is_invertible() {
            return Err(TftError::LocalSystem(LocalSystemError::InvalidMap(
                "left comparison must be invertible (Cartesian condition)".into(),
            )));
        }
        apex_system.validate()?;
        Ok(DecoratedSpan {
            source,
            target,
            carrier,
            apex_system,
            left_dec,
            right_dec,
        })
    }

    pub(crate) fn trusted(
        source: DecoratedObject,
        target: DecoratedObject,
        carrier: Span,
        apex_system: LocalSystem,
        left_dec: LSMap,
        right_dec: LSMap,
    ) -> DecoratedSpan {
        DecoratedSpan {
            source,
            target,
            carrier,
            apex_system,
            left_dec,
            right_dec,
        }
    }

    pub fn source(&self) -> &DecoratedObject {
        &self.source
    }

    pub fn target(&self) -> &DecoratedObject {
        &self.target
    }

    pub fn carrier(&self) -> &Span {
        &self.carrier
    }

    pub fn apex_system(&self) -> &LocalSystem {
        &self.apex_system
    }

    pub fn left_dec(&self) -> &LSMap {
        &self.left_dec
    }

    pub fn right_dec(&self) -> &LSMap {
        &self.right_dec
    }

    pub fn identity(a: &DecoratedObject) -> DecoratedSpan {
        let carrier = identity_span(&a.space);
        DecoratedSpan::trusted(
            a.clone(),
            a.clone(),
            carrier,
            a.system.clone(),
            LSMap::identity(&a.system),
            LSMap::identity(&a.system),
        )
    }

    /// Validates every stored invariant (used by tests and the parser).
    pub fn validate(&self) -> Result<(), TftError> {
        self.apex_system.validate()?;
        self.left_dec.validate()?;
        self.right_dec.validate()?;
        if !self.left_dec.is_invertible() {
            return Err(TftError::LocalSystem(LocalSystemError::InvalidMap(
                "left comparison must be invertible (Cartesian condition)".into(),
            )));
        }
        Ok(())
    }
}

/// Composes two decorated spans: the carrier composes by homotopy pullback,
/// the apex system is pulled back from the first factor, and the right
/// comparison threads through the pullback square's invertible filler.
pub fn decorated_compose(
    d: &DecoratedSpan,
    e: &DecoratedSpan,
) -> Result<DecoratedSpan, TftError> {
    if !DecoratedObject::equal(&d.target, &e.source) {
        return Err(TftError::MismatchedBoundary);
    }
    let (apex, proj_d, proj_e, filler) = iso_comma(d.carrier.right(), e.carrier.left())
        .map_err(SpanError::from)?;
    let carrier = Span::trusted(
        apex.clone(),
        d.carrier.left().compose_with(&proj_d),
        e.carrier.right().compose_with(&proj_e),
    );
    let apex_system = restrict(&d.apex_system, &proj_d)?;
    let n = apex.object_count();

    let left_components: Vec<RatMatrix> = (0..n)
        .map(|o| d.left_dec.component(proj_d.obj(o)).clone())
        .collect();
    let left_dec = LSMap::trusted(
        apex_system.clone(),
        restrict(&d.source.system, carrier.left())?,
        left_components,
    );

    // Right comparison at (z, z', alpha):
    //   N(q_E z') <- L(z') <- M(p_E z') <- M(q_D z) <- L(z)
    // through e's comparisons and the action of the filler.
    let middle = &d.target.system;
    let e_left_inv: Vec<RatMatrix> = (0..e.carrier.apex().object_count())
        .map(|z2| {
            e.left_dec
                .component(z2)
                .inverse()
                .expect("left comparison is invertible")
        })
        .collect();
    let right_components: Vec<RatMatrix> = (0..n)
        .map(|o| {
            let z = proj_d.obj(o);
            let z2 = proj_e.obj(o);
            let alpha = filler.component(o);
            e.right_dec
                .component(z2)
                .mul(&e_left_inv[z2])
                .mul(&middle.action(alpha))
                .mul(d.right_dec.component(z))
        })
        .collect();
    let right_dec = LSMap::trusted(
        apex_system.clone(),
        restrict(&e.target.system, carrier.right())?,
        right_components,
    );

    Ok(DecoratedSpan::trusted(
        d.source.clone(),
        e.target.clone(),
        carrier,
        apex_system,
        left_dec,
        right_dec,
    ))
}

/// Monoidal product of decorated spans: everything is tensored pointwise.
pub fn decorated_tensor(d: &DecoratedSpan, e: &DecoratedSpan) -> DecoratedSpan {
    let source = DecoratedObject::tensor(&d.source, &e.source);
    let target = DecoratedObject::tensor(&d.target, &e.target);
    let carrier = span_tensor(&d.carrier, &e.carrier);
    let apex_system = LocalSystem::tensor(&d.apex_system, &e.apex_system, carrier.apex());
    let ne = e.carrier.apex().object_count();
    let kron_components = |a: &LSMap, b: &LSMap| -> Vec<RatMatrix> {
        (0..carrier.apex().object_count())
            .map(|o| a.component(o / ne).kronecker(b.component(o % ne)))
            .collect()
    };
    let left_dec = LSMap::trusted(
        apex_system.clone(),
        restrict(&source.system, carrier.left()).expect("bases agree by construction"),
        kron_components(&d.left_dec, &e.left_dec),
    );
    let right_dec = LSMap::trusted(
        apex_system.clone(),
        restrict(&target.system, carrier.right()).expect("bases agree by construction"),
        kron_components(&d.right_dec, &e.right_dec),
    );
    DecoratedSpan::trusted(source, target, carrier, apex_system, left_dec, right_dec)
}

/// Skeletonizes the carrier apex and transports the decorations.
pub fn normalize_decorated(d: &DecoratedSpan) -> DecoratedSpan {
    let light = skeleton_light(d.carrier.apex());
    let from = &light.from_skeleton;
    let carrier = Span::trusted(
        light.skeletal.clone(),
        d.carrier.left().compose_with(from),
        d.carrier.right().compose_with(from),
    );
    let apex_system = restrict(&d.apex_system, from).expect("restriction along skeleton");
    let reindex = |m: &LSMap, target: LocalSystem| {
        let comps = (0..light.skeletal.object_count())
            .map(|s| m.component(from.obj(s)).clone())
            .collect();
        LSMap::trusted(apex_system.clone(), target, comps)
    };
    let left_dec = reindex(
        &d.left_dec,
        restrict(&d.source.system, carrier.left()).expect("bases agree"),
    );
    let right_dec = reindex(
        &d.right_dec,
        restrict(&d.target.system, carrier.right()).expect("bases agree"),
    );
    DecoratedSpan::trusted(
        d.source.clone(),
        d.target.clone(),
        carrier,
        apex_system,
        left_dec,
        right_dec,
    )
}

/// Decides equivalence of two parallel decorated spans: a carrier span
/// equivalence whose transport carries the decorations to entrywise-equal
/// decorations. The transported comparison is pinned by the left (Cartesian)
/// decoration, so only the right comparison needs checking, at one anchor
/// per component.
pub fn decorated_equivalent(
    d: &DecoratedSpan,
    d2: &DecoratedSpan,
    budget_limit: u64,
) -> Result<bool, TftError> {
    if !DecoratedObject::equal(&d.source, &d2.source)
        || !DecoratedObject::equal(&d.target, &d2.target)
    {
        return Ok(false);
    }
    let lx = &d.source.system;
    let ly = &d.target.system;
    let witness = span::spans_equivalent_filtered(&d.carrier, &d2.carrier, budget_limit, |w| {
        let t = d.left_dec.component(w.rep_s);
        let t2 = d2.left_dec.component(w.rep_s2);
        let a_inv = lx.action(w.a).inverse().expect("system actions invertible");
        let t2_inv = t2.inverse().expect("Cartesian comparison invertible");
        let kappa = t2_inv.mul(&a_inv).mul(t);
        let lhs = d.right_dec.component(w.rep_s).clone();
        let rhs = ly
            .action(w.b)
            .mul(d2.right_dec.component(w.rep_s2))
            .mul(&kappa);
        lhs == rhs
    })?;
    Ok(witness.is_some())
}

/// Duality data for a decorated object: the pointwise dual system together
/// with evaluation and coevaluation decorated spans over the trace and
/// cotrace carriers.
pub struct DualityData {
    pub dual_system: LocalSystem,
    /// `(X, L) (x) (X, L^) -> unit`.
    pub ev: DecoratedSpan,
    /// `unit -> (X, L^) (x) (X, L)`.
    pub coev: DecoratedSpan,
}

/// Row vector of the evaluation pairing `V (x) V* -> Q` in coordinates
/// `e_i (x) f_j`.
fn pairing_row(d: usize) -> RatMatrix {
    let mut m = RatMatrix::zeros(1, d * d);
    for i in 0..d {
        m.set(0, i * d + i, Rational::one());
    }
    m
}

/// Column vector of the coevaluation `Q -> V* (x) V`.
fn pairing_col(d: usize) -> RatMatrix {
    let mut m = RatMatrix::zeros(d * d, 1);
    for i in 0..d {
        m.set(i * d + i, 0, Rational::one());
    }
    m
}

pub fn dual_data(a: &DecoratedObject) -> DualityData {
    let x = &a.space;
    let dual_system = dual_local_system(&a.system);
    let dual_obj = DecoratedObject {
        space: x.clone(),
        system: dual_system.clone(),
    };
    let (tr, cotr) = duality_spans(x);
    let unit = DecoratedObject::unit();

    // Evaluation: apex system (L (x) L^) restricted along the diagonal,
    // identity on the left, the pointwise pairing on the right.
    let ev_source = DecoratedObject::tensor(a, &dual_obj);
    let ev_apex = restrict(&ev_source.system, tr.left()).expect("diagonal restriction");
    let ev_left = LSMap::identity(&ev_apex);
    let ev_right_target = restrict(&unit.system, tr.right()).expect("terminal restriction");
    let ev_right_components = (0..x.object_count())
        .map(|o| pairing_row(a.system.dim(o)))
        .collect();
    let ev_right = LSMap::trusted(ev_apex.clone(), ev_right_target, ev_right_components);
    let ev = DecoratedSpan::trusted(
        ev_source,
        unit.clone(),
        tr,
        ev_apex,
        ev_left,
        ev_right,
    );

    // Coevaluation: trivial line on the apex, pointwise coevaluation on the
    // right into (L^ (x) L) restricted along the diagonal.
    let coev_target = DecoratedObject::tensor(&dual_obj, a);
    let coev_apex = LocalSystem::trivial(x.clone(), 1);
    let coev_left = LSMap::identity(&coev_apex);
    let coev_right_target =
        restrict(&coev_target.system, cotr.right()).expect("diagonal restriction");
    let coev_right_components = (0..x.object_count())
        .map(|o| pairing_col(a.system.dim(o)))
        .collect();
    let coev_right = LSMap::trusted(coev_apex.clone(), coev_right_target, coev_right_components);
    let coev = DecoratedSpan::trusted(
        unit,
        coev_target,
        cotr,
        coev_apex,
        coev_left,
        coev_right,
    );

    DualityData {
        dual_system,
        ev,
        coev,
    }
}

/// Rebases a decorated span along relabelings of its feet: the new legs are
/// `on_left . left` and `on_right . right`, and the component matrices are
/// reused unchanged (the relabeling must preserve fibers entrywise, as the
/// unit and associativity relabelings do).
fn reroot(
    d: &DecoratedSpan,
    new_source: DecoratedObject,
    on_left: Option<&GroupoidFunctor>,
    new_target: DecoratedObject,
    on_right: Option<&GroupoidFunctor>,
) -> DecoratedSpan {
    let left = match on_left {
        Some(f) => f.compose_with(d.carrier.left()),
        None => d.carrier.left().clone(),
    };
    let right = match on_right {
        Some(f) => f.compose_with(d.carrier.right()),
        None => d.carrier.right().clone(),
    };
    let carrier = Span::trusted(d.carrier.apex().clone(), left, right);
    let left_dec = LSMap::trusted(
        d.apex_system.clone(),
        restrict(&new_source.system, carrier.left()).expect("rebased restriction"),
        d.left_dec.components().to_vec(),
    );
    let right_dec = LSMap::trusted(
        d.apex_system.clone(),
        restrict(&new_target.system, carrier.right()).expect("rebased restriction"),
        d.right_dec.components().to_vec(),
    );
    DecoratedSpan::trusted(
        new_source,
        new_target,
        carrier,
        d.apex_system.clone(),
        left_dec,
        right_dec,
    )
}

/// Checks the decorated snake identities for `(X, L)` against its duality
/// data: both composites must be decorated-equivalent to the identity on
/// `(X, L)` and on `(X, L^)` respectively. Bracketing follows the carrier
/// convention: triple products agree index-for-index, unit feet are removed
/// by projections.
pub fn verify_duality(a: &DecoratedObject, budget_limit: u64) -> Result<bool, TftError> {
    let dd = dual_data(a);
    let dual_obj = DecoratedObject {
        space: a.space.clone(),
        system: dd.dual_system.clone(),
    };
    let id_a = DecoratedSpan::identity(a);
    let id_dual = DecoratedSpan::identity(&dual_obj);

    // Snake 1 on (X, L): (ev (x) id) . (id (x) coev).
    let s1 = decorated_tensor(&id_a, &dd.coev);
    let s2 = decorated_tensor(&dd.ev, &id_a);
    let s1 = reroot(
        &s1,
        a.clone(),
        Some(&GroupoidFunctor::projection(s1.carrier.source(), 0)),
        s1.target.clone(),
        None,
    );
    let s2 = reroot(
        &s2,
        s2.source.clone(),
        None,
        a.clone(),
        Some(&GroupoidFunctor::projection(s2.carrier.target(), 1)),
    );
    let snake1 = normalize_decorated(&decorated_compose(&s1, &s2)?);
    if !decorated_equivalent(&snake1, &id_a, budget_limit)? {
        return Ok(false);
    }

    // Snake 2 on (X, L^): (id (x) ev) . (coev (x) id).
    let s3 = decorated_tensor(&dd.coev, &id_dual);
    let s4 = decorated_tensor(&id_dual, &dd.ev);
    let s3 = reroot(
        &s3,
        dual_obj.clone(),
        Some(&GroupoidFunctor::projection(s3.carrier.source(), 1)),
        s3.target.clone(),
        None,
    );
    let s4 = reroot(
        &s4,
        s4.source.clone(),
        None,
        dual_obj.clone(),
        Some(&GroupoidFunctor::projection(s4.carrier.target(), 0)),
    );
    let snake2 = normalize_decorated(&decorated_compose(&s3, &s4)?);
    decorated_equivalent(&snake2, &id_dual, budget_limit)
}

/// Quantization of a decorated object: the colimit (coinvariants) of its
/// local system, with the per-object structure maps.
pub fn quantize_object(a: &DecoratedObject) -> ColimitPresentation {
    colimit_ls(&a.system)
}

/// The path-integral value of an endomorphism of the monoidal unit: the
/// cardinality-weighted sum, over apex components, of the locally constant
/// composite scalar `right . left^{-1}`.
pub fn counit_scalar(d: &DecoratedSpan) -> Result<Rational, TftError> {
    let is_unit = |obj: &DecoratedObject| {
        obj.space.object_count() == 1
            && obj.space.morphism_count() == 1
            && obj.system.dims() == [1]
    };
    if !is_unit(&d.source) || !is_unit(&d.target) {
        return Err(TftError::NotUnitEndomorphism(
            "both feet must be the point decorated with Q".into(),
        ));
    }
    let apex = d.carrier.apex();
    let light = skeleton_light(apex);
    let scalar_at = |z: usize| -> Result<Rational, TftError> {
        let l = d.left_dec.component(z);
        let r = d.right_dec.component(z);
        let l_inv = l
            .inverse()
            .ok_or(TftError::NonConstantScalar)?;
        Ok(r.mul(&l_inv).get(0, 0).clone())
    };
    let mut total = Rational::zero();
    for comp in &light.components {
        let value = scalar_at(comp.rep)?;
        for &member in &comp.members {
            if scalar_at(member)? != value {
                return Err(TftError::NonConstantScalar);
            }
        }
        total += Rational::new(1, comp.aut.order() as i64) * value;
    }
    Ok(total)
}

/// The symmetry decorated span `(X x X, A (x) B) -> (X x X, B (x) A)` over
/// the flip functor, with the Kronecker commutation matrix on the right.
fn swap_decorated(
    source: &DecoratedObject,
    target: &DecoratedObject,
    a_dims: &LocalSystem,
    b_dims: &LocalSystem,
) -> DecoratedSpan {
    let xy = &source.space;
    let flip = GroupoidFunctor::flip(xy, &target.space);
    let carrier = Span::trusted(xy.clone(), GroupoidFunctor::identity(xy), flip);
    let apex_system = source.system.clone();
    let left_dec = LSMap::identity(&apex_system);
    let n2 = b_dims.base().object_count();
    let right_components = (0..xy.object_count())
        .map(|o| {
            let (da, db) = (a_dims.dim(o / n2), b_dims.dim(o % n2));
            let mut k = RatMatrix::zeros(db * da, da * db);
            for s in 0..da {
                for t in 0..db {
                    k.set(t * da + s, s * db + t, Rational::one());
                }
            }
            k
        })
        .collect();
    let right_dec = LSMap::trusted(
        apex_system.clone(),
        restrict(&target.system, carrier.right()).expect("flip restriction"),
        right_components,
    );
    DecoratedSpan::trusted(
        source.clone(),
        target.clone(),
        carrier,
        apex_system,
        left_dec,
        right_dec,
    )
}

/// The circle invariant of a decorated object: the path integral of
/// `ev . swap . coev`, an endomorphism of the unit. Convention: the single
/// swap between coevaluation and evaluation is the flip of `X x X` with the
/// Kronecker commutation matrix; the composite apex is equivalent to the
/// inertia groupoid and the value is the weighted sum of monodromy traces.
pub fn quantize_circle(a: &DecoratedObject) -> Result<Rational, TftError> {
    let dd = dual_data(a);
    let dual_obj = DecoratedObject {
        space: a.space.clone(),
        system: dd.dual_system.clone(),
    };
    let swap = swap_decorated(
        dd.coev.target(),
        dd.ev.source(),
        &dual_obj.system,
        &a.system,
    );
    let half = normalize_decorated(&decorated_compose(&dd.coev, &swap)?);
    let circle = decorated_compose(&half, &dd.ev)?;
    counit_scalar(&circle)
}
