//! Exact span calculus on finite groupoids.
//!
//! A finite groupoid is a finite category in which every morphism is
//! invertible; it models a 1-truncated space with finite homotopy groups.
//! This crate implements, in exact rational arithmetic throughout:
//!
//! * finite groupoids, functors, natural isomorphisms, homotopy pullbacks
//!   (iso-comma construction), skeletonization and equivalence decision;
//! * the span category of finite groupoids, composed by homotopy pullback,
//!   with its monoidal product, dual spans, and trace/cotrace duality data;
//! * groupoid cardinality and the cardinality-weighted linearization of
//!   spans into exact rational matrices, together with (co)limits of local
//!   systems of Q-vector spaces and the norm map from coinvariants to
//!   invariants;
//! * decorated spans carrying local systems, duality data for pointwise
//!   dualizable systems, and the finite-path-integral quantization of
//!   1-dimensional topological field theories valued in Q-vector spaces.
//!
//! All operations are pure functions over immutable values; results are
//! deterministic for identical inputs. With the default `parallel` feature
//! the data-parallel inner loops (fiber enumeration, matrix assembly,
//! validation sweeps) run on rayon with a deterministic merge order; without
//! it they fall back to sequential loops with identical results.

pub mod corpus;
pub mod groupoid;
pub mod json;
pub mod linalg;
pub mod linearize;
pub mod local_system;
pub(crate) mod par;
pub mod selftest;
pub mod span;
pub mod tft;

pub use groupoid::{
    are_equivalent, cardinality, delooping, discrete, disjoint_union, homotopy_fiber, inertia,
    iso_comma, product, skeleton, truncation_level, Equivalence, FiniteGroupoid, Gpd,
    GroupoidError, GroupoidFunctor, NaturalIso, Skeleton,
};
pub use linalg::{rref_rank_kernel, LinSolver, LinalgError, RatMatrix, Rational};
pub use linearize::{
    colimit_ls, integrate, limit_ls, linearize_span, norm_map, trace_form, ColimitPresentation,
    LimitPresentation, LinearizeError, NormReport,
};
pub use local_system::{dual_local_system, restrict, LSMap, LocalSystem, LocalSystemError};
pub use span::{
    compose, dual_span, duality_spans, from_map, identity_span, is_invertible, member_of,
    normalize, spans_equivalent, tensor, to_pointed_map, verify_self_duality, PointedMap, Span,
    SpanEquivalence, SpanError,
};
pub use tft::{
    counit_scalar, decorated_compose, decorated_equivalent, decorated_tensor, dual_data,
    normalize_decorated, quantize_circle, quantize_object, verify_duality, DecoratedObject,
    DecoratedSpan, DualityData, TftError,
};

/// Default cap on exhaustive-search candidate extensions.
///
/// Group-isomorphism and functor searches count every candidate extension
/// they try; when the count would exceed the budget they abort with an
/// explicit error instead of silently reporting "not equivalent".
pub const DEFAULT_SEARCH_BUDGET: u64 = 10_000_000;
