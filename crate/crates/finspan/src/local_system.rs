//! Local systems of finite-dimensional Q-vector spaces over finite
//! groupoids, and maps between them.
//!
//! A local system assigns a dimension to every object and an invertible
//! matrix to every morphism, functorially. Systems obtained by restriction
//! along a functor are kept lazy: the action of a morphism is looked up
//! through the functor chain. This matters when restricting along the
//! projection out of a large iso-comma apex, where materializing one matrix
//! per morphism would dominate everything else.

use crate::groupoid::{same_groupoid, Gpd, GroupoidFunctor, MorId, ObjId};
use crate::linalg::RatMatrix;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LocalSystemError {
    #[error("base groupoid mismatch")]
    BaseMismatch,
    #[error("invalid local system: {0}")]
    Invalid(String),
    #[error("invalid map of local systems: {0}")]
    InvalidMap(String),
}

#[derive(Clone)]
enum ActionStore {
    Dense(Arc<Vec<RatMatrix>>),
    Restricted {
        inner: Arc<LocalSystem>,
        along: GroupoidFunctor,
    },
}

#[derive(Clone)]
pub struct LocalSystem {
    base: Gpd,
    dims: Arc<Vec<usize>>,
    store: ActionStore,
}

impl LocalSystem {
    /// Builds a dense local system and validates functoriality and
    /// invertibility.
    pub fn new(
        base: Gpd,
        dims: Vec<usize>,
        actions: Vec<RatMatrix>,
    ) -> Result<LocalSystem, LocalSystemError> {
        let l = LocalSystem::trusted_dense(base, dims, actions);
        l.validate()?;
        Ok(l)
    }

    pub(crate) fn trusted_dense(
        base: Gpd,
        dims: Vec<usize>,
        actions: Vec<RatMatrix>,
    ) -> LocalSystem {
        LocalSystem {
            base,
            dims: Arc::new(dims),
            store: ActionStore::Dense(Arc::new(actions)),
        }
    }

    /// The constant system of a fixed dimension with identity actions.
    pub fn trivial(base: Gpd, dim: usize) -> LocalSystem {
        let dims = vec![dim; base.object_count()];
        let actions = (0..base.morphism_count())
            .map(|_| RatMatrix::identity(dim))
            .collect();
        LocalSystem::trusted_dense(base, dims, actions)
    }

    pub fn base(&self) -> &Gpd {
        &self.base
    }

    pub fn dim(&self, x: ObjId) -> usize {
        self.dims[x]
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Action matrix of a morphism, shape `dim(target) x dim(source)`.
    pub fn action(&self, m: MorId) -> RatMatrix {
        match &self.store {
            ActionStore::Dense(actions) => actions[m].clone(),
            ActionStore::Restricted { inner, along } => inner.action(along.mor(m)),
        }
    }

    /// Resolves any restriction chain into a dense system.
    pub fn materialize(&self) -> LocalSystem {
        match &self.store {
            ActionStore::Dense(_) => self.clone(),
            ActionStore::Restricted { .. } => {
                let actions = (0..self.base.morphism_count())
                    .map(|m| self.action(m))
                    .collect();
                LocalSystem::trusted_dense(self.base.clone(), self.dims.as_ref().clone(), actions)
            }
        }
    }

    pub fn validate(&self) -> Result<(), LocalSystemError> {
        let bad = |msg: String| Err(LocalSystemError::Invalid(msg));
        let base = &self.base;
        if self.dims.len() != base.object_count() {
            return bad("one dimension per object required".into());
        }
        for m in 0..base.morphism_count() {
            let a = self.action(m);
            if a.rows() != self.dim(base.tgt(m)) || a.cols() != self.dim(base.src(m)) {
                return bad(format!(
                    "action of morphism {m} has shape {}x{}, expected {}x{} \
                     (dimensions must agree along every morphism)",
                    a.rows(),
                    a.cols(),
                    self.dim(base.tgt(m)),
                    self.dim(base.src(m))
                ));
            }
            if !a.is_square() || a.rank() != a.rows() {
                return bad(format!("action of morphism {m} is not invertible"));
            }
        }
        for x in 0..base.object_count() {
            if !self.action(base.identity_of(x)).is_identity() {
                return bad(format!("identity of object {x} does not act as the identity"));
            }
        }
        for g in 0..base.morphism_count() {
            let src_g = base.src(g);
            for s in 0..base.object_count() {
                for &f in base.hom(s, src_g) {
                    let lhs = self.action(base.compose(g, f as usize));
                    let rhs = self.action(g).mul(&self.action(f as usize));
                    if lhs != rhs {
                        return bad(format!("action not multiplicative at pair ({g},{f})"));
                    }
                }
            }
        }
        Ok(())
    }

    /// Kronecker tensor of two systems over the product base.
    pub fn tensor(a: &LocalSystem, b: &LocalSystem, product_base: &Gpd) -> LocalSystem {
        let (nb, mb) = (b.base.object_count(), b.base.morphism_count());
        debug_assert_eq!(product_base.object_count(), a.base.object_count() * nb);
        let dims = (0..product_base.object_count())
            .map(|o| a.dim(o / nb) * b.dim(o % nb))
            .collect();
        let actions = (0..product_base.morphism_count())
            .map(|m| a.action(m / mb).kronecker(&b.action(m % mb)))
            .collect();
        LocalSystem::trusted_dense(product_base.clone(), dims, actions)
    }

    /// Entrywise equality over a shared base.
    pub fn equal(a: &LocalSystem, b: &LocalSystem) -> bool {
        same_groupoid(&a.base, &b.base)
            && a.dims == b.dims
            && (0..a.base.morphism_count()).all(|m| a.action(m) == b.action(m))
    }
}

impl std::fmt::Debug for LocalSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "LocalSystem(base {:?}, dims {:?})", self.base, self.dims)
    }
}

/// Restriction of a local system along a functor into its base.
pub fn restrict(l: &LocalSystem, f: &GroupoidFunctor) -> Result<LocalSystem, LocalSystemError> {
    if !same_groupoid(f.codomain(), l.base()) {
        return Err(LocalSystemError::BaseMismatch);
    }
    let dims = (0..f.domain().object_count()).map(|x| l.dim(f.obj(x))).collect();
    Ok(LocalSystem {
        base: f.domain().clone(),
        dims: Arc::new(dims),
        store: ActionStore::Restricted {
            inner: Arc::new(l.clone()),
            along: f.clone(),
        },
    })
}

/// Pointwise dual system: same dimensions, inverse-transpose actions.
pub fn dual_local_system(l: &LocalSystem) -> LocalSystem {
    let base = l.base().clone();
    let actions = (0..base.morphism_count())
        .map(|m| {
            l.action(m)
                .inverse()
                .expect("local system actions are invertible")
                .transpose()
        })
        .collect();
    LocalSystem::trusted_dense(base, l.dims.as_ref().clone(), actions)
}

/// A map of local systems over a shared base: one matrix per object,
/// natural with respect to every morphism.
#[derive(Clone)]
pub struct LSMap {
    source: LocalSystem,
    target: LocalSystem,
    components: Arc<Vec<RatMatrix>>,
}

impl LSMap {
    pub fn new(
        source: LocalSystem,
        target: LocalSystem,
        components: Vec<RatMatrix>,
    ) -> Result<LSMap, LocalSystemError> {
        let map = LSMap::trusted(source, target, components);
        map.validate()?;
        Ok(map)
    }

    pub(crate) fn trusted(
        source: LocalSystem,
        target: LocalSystem,
        components: Vec<RatMatrix>,
    ) -> LSMap {
        LSMap {
            source,
            target,
            components: Arc::new(components),
        }
    }

    pub fn validate(&self) -> Result<(), LocalSystemError> {
        let bad = |msg: String| Err(LocalSystemError::InvalidMap(msg));
        if !same_groupoid(self.source.base(), self.target.base()) {
            return bad("source and target live over different bases".into());
        }
        let base = self.source.base();
        if self.components.len() != base.object_count() {
            return bad("one component per object required".into());
        }
        for x in 0..base.object_count() {
            let c = &self.components[x];
            if c.rows() != self.target.dim(x) || c.cols() != self.source.dim(x) {
                return bad(format!("component at object {x} has the wrong shape"));
            }
        }
        for m in 0..base.morphism_count() {
            let (s, t) = (base.src(m), base.tgt(m));
            let lhs = self.target.action(m).mul(&self.components[s]);
            let rhs = self.components[t].mul(&self.source.action(m));
            if lhs != rhs {
                return bad(format!("naturality fails at morphism {m}"));
            }
        }
        Ok(())
    }

    pub fn identity(l: &LocalSystem) -> LSMap {
        let components = (0..l.base().object_count())
            .map(|x| RatMatrix::identity(l.dim(x)))
            .collect();
        LSMap::trusted(l.clone(), l.clone(), components)
    }

    pub fn source(&self) -> &LocalSystem {
        &self.source
    }

    pub fn target(&self) -> &LocalSystem {
        &self.target
    }

    pub fn component(&self, x: ObjId) -> &RatMatrix {
        &self.components[x]
    }

    pub fn components(&self) -> &[RatMatrix] {
        &self.components
    }

    pub fn is_invertible(&self) -> bool {
        self.components
            .iter()
            .all(|c| c.is_square() && c.rank() == c.rows())
    }

    /// Componentwise inverse; `None` when some component is singular.
    pub fn inverse(&self) -> Option<LSMap> {
        let components: Option<Vec<RatMatrix>> =
            self.components.iter().map(|c| c.inverse()).collect();
        Some(LSMap::trusted(
            self.target.clone(),
            self.source.clone(),
            components?,
        ))
    }

    /// Vertical composite `other . self` (`self: A => B`, `other: B => C`).
    pub fn then(&self, other: &LSMap) -> LSMap {
        let components = (0..self.components.len())
            .map(|x| other.components[x].mul(&self.components[x]))
            .collect();
        LSMap::trusted(self.source.clone(), other.target.clone(), components)
    }

    /// Restriction along a functor into the base: components are reindexed,
    /// source and target become the restricted systems.
    pub fn restrict_along(&self, f: &GroupoidFunctor) -> Result<LSMap, LocalSystemError> {
        let source = restrict(&self.source, f)?;
        let target = restrict(&self.target, f)?;
        let components = (0..f.domain().object_count())
            .map(|x| self.components[f.obj(x)].clone())
            .collect();
        Ok(LSMap::trusted(source, target, components))
    }

    /// Entrywise equality of components.
    pub fn components_equal(a: &LSMap, b: &LSMap) -> bool {
        a.components.len() == b.components.len()
            && a.components
                .iter()
                .zip(b.components.iter())
                .all(|(x, y)| x == y)
    }
}

impl std::fmt::Debug for LSMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "LSMap({} components)", self.components.len())
    }
}
