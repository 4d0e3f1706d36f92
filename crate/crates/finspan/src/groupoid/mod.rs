//! Finite groupoids as explicit total data.
//!
//! A groupoid stores its object count, morphism endpoint lists, identity and
//! inverse tables, and a composition rule. Groupoids parsed from documents
//! keep a literal composition table; groupoids produced by constructions
//! (products, disjoint unions, iso-comma categories, inertia) keep a
//! structural rule that composes through the parents, which is what keeps
//! intermediate apexes of span composites tractable. Either way the visible
//! behaviour is the same total data: deterministic indices in construction
//! order.

mod build;
mod equiv;
mod functor;
mod skeleton;

pub use build::{
    action_groupoid, delooping, discrete, disjoint_union, homotopy_fiber, inertia, iso_comma,
    point_inclusion, product,
};
pub use equiv::{are_equivalent, Equivalence};
pub use functor::{GroupoidFunctor, NaturalIso};
pub use skeleton::{cardinality, skeleton, truncation_level, AutGroup, SkelComponent, Skeleton};

pub(crate) use equiv::{constrained_iso_visit, equivalence_from_matching, match_components, GroupTable, SearchBudget};
pub(crate) use skeleton::{skeleton_light, SkeletonLight};

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

pub type Gpd = Arc<FiniteGroupoid>;
pub type ObjId = usize;
pub type MorId = usize;

const UNDEFINED: u32 = u32::MAX;

/// Groupoid axioms named by the validator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Axiom {
    /// Index ranges and table shapes.
    Shape,
    /// Composition is defined on exactly the composable pairs.
    Totality,
    /// source(g.f) = source(f) and target(g.f) = target(g).
    Endpoints,
    /// identity(x) is a two-sided unit at x.
    Identity,
    /// inverse(f).f and f.inverse(f) are identities.
    Inverse,
    /// Composition is associative on composable triples.
    Associativity,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Axiom::Shape => "shape",
            Axiom::Totality => "totality",
            Axiom::Endpoints => "endpoints",
            Axiom::Identity => "identity",
            Axiom::Inverse => "inverse",
            Axiom::Associativity => "associativity",
        };
        f.write_str(s)
    }
}

/// Group axioms named when a multiplication table fails to be a group.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupAxiom {
    Closure,
    Associativity,
    Identity,
    Inverse,
}

impl fmt::Display for GroupAxiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            GroupAxiom::Closure => "closure",
            GroupAxiom::Associativity => "associativity",
            GroupAxiom::Identity => "identity",
            GroupAxiom::Inverse => "inverse",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GroupoidError {
    #[error("multiplication table is not a group: {0} fails")]
    NotAGroup(GroupAxiom),
    #[error("groupoid invariant violated: {axiom} ({detail})")]
    InvariantViolation { axiom: Axiom, detail: String },
    #[error("functors do not share a codomain")]
    MismatchedCodomain,
    #[error("object index {index} out of range (groupoid has {count} objects)")]
    BadObjectIndex { index: usize, count: usize },
    #[error("search budget exceeded")]
    SearchBudgetExceeded,
    #[error("invalid functor: {0}")]
    InvalidFunctor(String),
    #[error("invalid natural isomorphism: {0}")]
    InvalidNaturalIso(String),
    #[error("invalid group action: {0}")]
    InvalidAction(String),
    #[error("construction exceeds representable size: {0}")]
    TooLarge(String),
}

/// How composition is evaluated.
pub(crate) enum ComposeStore {
    /// Dense (g * n_mor + f) table; `UNDEFINED` marks non-composable pairs.
    Dense(Vec<u32>),
    /// Hash table keyed by (g, f); pairs not present are non-composable.
    Sparse(HashMap<(u32, u32), u32>),
    Product(build::ProductStore),
    Union(build::UnionStore),
    IsoComma(Box<build::IsoCommaStore>),
    Inertia(Box<build::InertiaStore>),
}

pub(crate) enum HomIndex {
    /// Compressed bucket layout keyed by `src * n + tgt`; morphism ids are
    /// ascending within each bucket.
    Dense { offsets: Vec<u32>, items: Vec<u32> },
    Sparse(HashMap<(u32, u32), Vec<u32>>),
}

static EMPTY_BUCKET: [u32; 0] = [];

impl HomIndex {
    fn build(n_objects: usize, mor_src: &[u32], mor_tgt: &[u32]) -> (HomIndex, Vec<u32>) {
        let mut rank = vec![0u32; mor_src.len()];
        let dense = n_objects
            .checked_mul(n_objects)
            .map(|sq| sq <= 4_000_000)
            .unwrap_or(false);
        if dense {
            let keys = n_objects * n_objects;
            let mut offsets = vec![0u32; keys + 1];
            for m in 0..mor_src.len() {
                offsets[mor_src[m] as usize * n_objects + mor_tgt[m] as usize + 1] += 1;
            }
            for k in 0..keys {
                offsets[k + 1] += offsets[k];
            }
            let mut cursor = offsets.clone();
            let mut items = vec![0u32; mor_src.len()];
            for m in 0..mor_src.len() {
                let key = mor_src[m] as usize * n_objects + mor_tgt[m] as usize;
                let pos = cursor[key];
                cursor[key] += 1;
                items[pos as usize] = m as u32;
                rank[m] = pos - offsets[key];
            }
            (HomIndex::Dense { offsets, items }, rank)
        } else {
            let mut buckets: HashMap<(u32, u32), Vec<u32>> = HashMap::new();
            for m in 0..mor_src.len() {
                let bucket = buckets.entry((mor_src[m], mor_tgt[m])).or_default();
                rank[m] = bucket.len() as u32;
                bucket.push(m as u32);
            }
            (HomIndex::Sparse(buckets), rank)
        }
    }

    fn bucket(&self, n_objects: usize, src: usize, tgt: usize) -> &[u32] {
        match self {
            HomIndex::Dense { offsets, items } => {
                let key = src * n_objects + tgt;
                &items[offsets[key] as usize..offsets[key + 1] as usize]
            }
            HomIndex::Sparse(map) => map
                .get(&(src as u32, tgt as u32))
                .map(|v| v.as_slice())
                .unwrap_or(&EMPTY_BUCKET),
        }
    }
}

pub struct FiniteGroupoid {
    label: Option<String>,
    n_objects: usize,
    mor_src: Vec<u32>,
    mor_tgt: Vec<u32>,
    identity: Vec<u32>,
    inverse: Vec<u32>,
    store: ComposeStore,
    hom: HomIndex,
    hom_rank: Vec<u32>,
}

impl FiniteGroupoid {
    pub(crate) fn from_store(
        label: Option<String>,
        n_objects: usize,
        mor_src: Vec<u32>,
        mor_tgt: Vec<u32>,
        identity: Vec<u32>,
        inverse: Vec<u32>,
        store: ComposeStore,
    ) -> FiniteGroupoid {
        assert!(mor_src.len() == mor_tgt.len() && inverse.len() == mor_src.len());
        assert!(identity.len() == n_objects);
        assert!(mor_src.len() < UNDEFINED as usize);
        let (hom, hom_rank) = HomIndex::build(n_objects, &mor_src, &mor_tgt);
        FiniteGroupoid {
            label,
            n_objects,
            mor_src,
            mor_tgt,
            identity,
            inverse,
            store,
            hom,
            hom_rank,
        }
    }

    /// Builds a table-backed groupoid and checks every axiom.
    pub fn from_table_parts(
        label: Option<String>,
        n_objects: usize,
        morphisms: Vec<(usize, usize)>,
        identity: Vec<usize>,
        compose_entries: Vec<(usize, usize, usize)>,
        inverse: Vec<usize>,
    ) -> Result<Gpd, GroupoidError> {
        let shape = |detail: String| GroupoidError::InvariantViolation {
            axiom: Axiom::Shape,
            detail,
        };
        let m = morphisms.len();
        if identity.len() != n_objects {
            return Err(shape(format!(
                "identity table has {} entries for {} objects",
                identity.len(),
                n_objects
            )));
        }
        if inverse.len() != m {
            return Err(shape(format!(
                "inverse table has {} entries for {} morphisms",
                inverse.len(),
                m
            )));
        }
        for (i, &(s, t)) in morphisms.iter().enumerate() {
            if s >= n_objects || t >= n_objects {
                return Err(shape(format!("morphism {i} has endpoint out of range")));
            }
        }
        for (x, &id) in identity.iter().enumerate() {
            if id >= m {
                return Err(shape(format!("identity of object {x} out of range")));
            }
        }
        for (i, &inv) in inverse.iter().enumerate() {
            if inv >= m {
                return Err(shape(format!("inverse of morphism {i} out of range")));
            }
        }
        let mut table = if m * m <= 16_000_000 {
            Some(vec![UNDEFINED; m * m])
        } else {
            None
        };
        let mut sparse: HashMap<(u32, u32), u32> = HashMap::new();
        for &(g, f, gf) in &compose_entries {
            if g >= m || f >= m || gf >= m {
                return Err(shape(format!("compose entry ({g},{f},{gf}) out of range")));
            }
            let prev = match &mut table {
                Some(t) => {
                    let slot = &mut t[g * m + f];
                    let prev = *slot != UNDEFINED;
                    *slot = gf as u32;
                    prev
                }
                None => sparse.insert((g as u32, f as u32), gf as u32).is_some(),
            };
            if prev {
                return Err(shape(format!("duplicate compose entry for ({g},{f})")));
            }
        }
        let store = match table {
            Some(t) => ComposeStore::Dense(t),
            None => ComposeStore::Sparse(sparse),
        };
        let g = FiniteGroupoid::from_store(
            label,
            n_objects,
            morphisms.iter().map(|&(s, _)| s as u32).collect(),
            morphisms.iter().map(|&(_, t)| t as u32).collect(),
            identity.iter().map(|&i| i as u32).collect(),
            inverse.iter().map(|&i| i as u32).collect(),
            store,
        );
        g.validate()?;
        Ok(Arc::new(g))
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn object_count(&self) -> usize {
        self.n_objects
    }

    pub fn morphism_count(&self) -> usize {
        self.mor_src.len()
    }

    pub fn src(&self, m: MorId) -> ObjId {
        self.mor_src[m] as ObjId
    }

    pub fn tgt(&self, m: MorId) -> ObjId {
        self.mor_tgt[m] as ObjId
    }

    pub fn identity_of(&self, x: ObjId) -> MorId {
        self.identity[x] as MorId
    }

    pub fn inverse_of(&self, m: MorId) -> MorId {
        self.inverse[m] as MorId
    }

    /// Morphisms from `src` to `tgt`, ascending by index.
    pub fn hom(&self, src: ObjId, tgt: ObjId) -> &[u32] {
        self.hom.bucket(self.n_objects, src, tgt)
    }

    /// Position of `m` within its hom-set.
    pub fn hom_rank(&self, m: MorId) -> usize {
        self.hom_rank[m] as usize
    }

    pub fn automorphisms(&self, x: ObjId) -> &[u32] {
        self.hom(x, x)
    }

    pub fn try_compose(&self, g: MorId, f: MorId) -> Option<MorId> {
        if self.tgt(f) != self.src(g) {
            return None;
        }
        Some(self.compose(g, f))
    }

    /// `g . f` for a composable pair (`target(f) = source(g)`).
    pub fn compose(&self, g: MorId, f: MorId) -> MorId {
        debug_assert_eq!(self.tgt(f), self.src(g), "composing non-composable pair");
        match &self.store {
            ComposeStore::Dense(t) => {
                let v = t[g * self.mor_src.len() + f];
                debug_assert!(v != UNDEFINED, "missing compose entry");
                v as MorId
            }
            ComposeStore::Sparse(map) => map[&(g as u32, f as u32)] as MorId,
            ComposeStore::Product(p) => p.compose(g, f),
            ComposeStore::Union(u) => u.compose(g, f),
            ComposeStore::IsoComma(ic) => ic.compose(self, g, f),
            ComposeStore::Inertia(inr) => inr.compose(g, f),
        }
    }

    /// True when a compose entry exists for `(g, f)`; only differs from
    /// composability on malformed table-backed input.
    fn has_entry(&self, g: MorId, f: MorId) -> bool {
        match &self.store {
            ComposeStore::Dense(t) => t[g * self.mor_src.len() + f] != UNDEFINED,
            ComposeStore::Sparse(map) => map.contains_key(&(g as u32, f as u32)),
            _ => self.tgt(f) == self.src(g),
        }
    }

    /// If this groupoid is a binary product, its factors.
    pub fn product_parts(&self) -> Option<(&Gpd, &Gpd)> {
        match &self.store {
            ComposeStore::Product(p) => Some((&p.left, &p.right)),
            _ => None,
        }
    }

    /// Checks every groupoid axiom, naming the first violated one.
    ///
    /// Axioms are checked in a fixed order (shape, totality, endpoints,
    /// identity, inverse, associativity) and within each axiom the smallest
    /// witness is reported, so the outcome is deterministic.
    pub fn validate(&self) -> Result<(), GroupoidError> {
        let m = self.morphism_count();
        let fail = |axiom: Axiom, detail: String| -> Result<(), GroupoidError> {
            Err(GroupoidError::InvariantViolation { axiom, detail })
        };

        for x in 0..self.n_objects {
            let id = self.identity_of(x);
            if self.src(id) != x || self.tgt(id) != x {
                return fail(
                    Axiom::Identity,
                    format!("identity of object {x} is not an endomorphism of {x}"),
                );
            }
        }

        // Totality: an entry exists iff the pair is composable.
        if let Some((g, f)) = crate::par::min_violation(m, |g| {
            (0..m).find_map(|f| {
                let composable = self.tgt(f) == self.src(g);
                (self.has_entry(g, f) != composable).then_some((g, f))
            })
        }) {
            let composable = self.tgt(f) == self.src(g);
            return fail(
                Axiom::Totality,
                if composable {
                    format!("missing compose entry for composable pair ({g},{f})")
                } else {
                    format!("compose entry present for non-composable pair ({g},{f})")
                },
            );
        }

        if let Some((g, f)) = crate::par::min_violation(m, |g| {
            (0..m).find_map(|f| {
                if self.tgt(f) != self.src(g) {
                    return None;
                }
                let gf = self.compose(g, f);
                (self.src(gf) != self.src(f) || self.tgt(gf) != self.tgt(g)).then_some((g, f))
            })
        }) {
            return fail(
                Axiom::Endpoints,
                format!("compose({g},{f}) has wrong endpoints"),
            );
        }

        for f in 0..m {
            let (s, t) = (self.src(f), self.tgt(f));
            if self.compose(f, self.identity_of(s)) != f || self.compose(self.identity_of(t), f) != f
            {
                return fail(Axiom::Identity, format!("identity is not a unit at morphism {f}"));
            }
        }

        for f in 0..m {
            let inv = self.inverse_of(f);
            if self.tgt(inv) != self.src(f) || self.src(inv) != self.tgt(f) {
                return fail(Axiom::Inverse, format!("inverse of {f} has wrong endpoints"));
            }
            if self.compose(inv, f) != self.identity_of(self.src(f))
                || self.compose(f, inv) != self.identity_of(self.tgt(f))
            {
                return fail(Axiom::Inverse, format!("inverse law fails at morphism {f}"));
            }
        }

        if let Some((h, g, f)) = crate::par::min_violation(m, |h| {
            let mut worst: Option<(usize, usize, usize)> = None;
            for g in 0..m {
                if self.tgt(g) != self.src(h) {
                    continue;
                }
                let hg = self.compose(h, g);
                for f in 0..m {
                    if self.tgt(f) != self.src(g) {
                        continue;
                    }
                    if self.compose(hg, f) != self.compose(h, self.compose(g, f)) {
                        worst = Some((h, g, f));
                        break;
                    }
                }
                if worst.is_some() {
                    break;
                }
            }
            worst
        }) {
            return fail(
                Axiom::Associativity,
                format!("associativity fails on triple ({h},{g},{f})"),
            );
        }

        Ok(())
    }

    /// Serializes the composition rule as explicit `(g, f, g.f)` triples.
    pub fn compose_entries(&self) -> Vec<(usize, usize, usize)> {
        let m = self.morphism_count();
        let mut out = Vec::new();
        for g in 0..m {
            let src_g = self.src(g);
            for s in 0..self.n_objects {
                for &f in self.hom(s, src_g) {
                    out.push((g, f as usize, self.compose(g, f as usize)));
                }
            }
        }
        out.sort_unstable();
        out
    }
}

impl fmt::Debug for FiniteGroupoid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "FiniteGroupoid({}: {} objects, {} morphisms)",
            self.label.as_deref().unwrap_or("?"),
            self.n_objects,
            self.morphism_count()
        )
    }
}

/// Extensional equality: same objects, endpoint tables, identities,
/// inverses, and the same composite for every composable pair.
impl PartialEq for FiniteGroupoid {
    fn eq(&self, other: &FiniteGroupoid) -> bool {
        if std::ptr::eq(self, other) {
            return true;
        }
        if self.n_objects != other.n_objects
            || self.mor_src != other.mor_src
            || self.mor_tgt != other.mor_tgt
            || self.identity != other.identity
            || self.inverse != other.inverse
        {
            return false;
        }
        let m = self.morphism_count();
        crate::par::min_violation(m, |g| {
            let src_g = self.src(g);
            for t in 0..self.n_objects {
                for &f in self.hom(t, src_g) {
                    if self.compose(g, f as usize) != other.compose(g, f as usize) {
                        return Some(g);
                    }
                }
            }
            None
        })
        .is_none()
    }
}

impl Eq for FiniteGroupoid {}

pub(crate) fn same_groupoid(a: &Gpd, b: &Gpd) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}
