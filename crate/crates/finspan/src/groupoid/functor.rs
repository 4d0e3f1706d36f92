//! Functors between finite groupoids and natural isomorphisms between
//! functors. In a groupoid every natural transformation is invertible.

use super::{same_groupoid, Gpd, GroupoidError, MorId, ObjId};
use std::fmt;
use std::sync::Arc;

#[derive(Clone)]
pub struct GroupoidFunctor {
    domain: Gpd,
    codomain: Gpd,
    object_map: Arc<Vec<u32>>,
    morphism_map: Arc<Vec<u32>>,
}

impl GroupoidFunctor {
    /// Builds a functor and checks that it preserves endpoints, identities,
    /// and all defined compositions.
    pub fn new(
        domain: Gpd,
        codomain: Gpd,
        object_map: Vec<u32>,
        morphism_map: Vec<u32>,
    ) -> Result<GroupoidFunctor, GroupoidError> {
        let f = GroupoidFunctor::trusted(domain, codomain, object_map, morphism_map);
        f.validate()?;
        Ok(f)
    }

    pub(crate) fn trusted(
        domain: Gpd,
        codomain: Gpd,
        object_map: Vec<u32>,
        morphism_map: Vec<u32>,
    ) -> GroupoidFunctor {
        debug_assert_eq!(object_map.len(), domain.object_count());
        debug_assert_eq!(morphism_map.len(), domain.morphism_count());
        GroupoidFunctor {
            domain,
            codomain,
            object_map: Arc::new(object_map),
            morphism_map: Arc::new(morphism_map),
        }
    }

    pub fn validate(&self) -> Result<(), GroupoidError> {
        let bad = |msg: String| Err(GroupoidError::InvalidFunctor(msg));
        let (dom, cod) = (&self.domain, &self.codomain);
        if self.object_map.len() != dom.object_count()
            || self.morphism_map.len() != dom.morphism_count()
        {
            return bad("map tables have the wrong length".into());
        }
        if self.object_map.iter().any(|&o| o as usize >= cod.object_count())
            || self.morphism_map.iter().any(|&m| m as usize >= cod.morphism_count())
        {
            return bad("map tables go out of range".into());
        }
        for m in 0..dom.morphism_count() {
            if cod.src(self.mor(m)) != self.obj(dom.src(m))
                || cod.tgt(self.mor(m)) != self.obj(dom.tgt(m))
            {
                return bad(format!("endpoints not preserved at morphism {m}"));
            }
        }
        for x in 0..dom.object_count() {
            if self.mor(dom.identity_of(x)) != cod.identity_of(self.obj(x)) {
                return bad(format!("identity not preserved at object {x}"));
            }
        }
        for g in 0..dom.morphism_count() {
            let src_g = dom.src(g);
            for s in 0..dom.object_count() {
                for &f in dom.hom(s, src_g) {
                    let lhs = self.mor(dom.compose(g, f as usize));
                    let rhs = cod.compose(self.mor(g), self.mor(f as usize));
                    if lhs != rhs {
                        return bad(format!("composition not preserved at ({g},{f})"));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn domain(&self) -> &Gpd {
        &self.domain
    }

    pub fn codomain(&self) -> &Gpd {
        &self.codomain
    }

    pub fn obj(&self, x: ObjId) -> ObjId {
        self.object_map[x] as ObjId
    }

    pub fn mor(&self, m: MorId) -> MorId {
        self.morphism_map[m] as MorId
    }

    pub fn object_map(&self) -> &[u32] {
        &self.object_map
    }

    pub fn morphism_map(&self) -> &[u32] {
        &self.morphism_map
    }

    pub fn identity(x: &Gpd) -> GroupoidFunctor {
        GroupoidFunctor::trusted(
            x.clone(),
            x.clone(),
            (0..x.object_count() as u32).collect(),
            (0..x.morphism_count() as u32).collect(),
        )
    }

    pub fn is_identity_functor(&self) -> bool {
        same_groupoid(&self.domain, &self.codomain)
            && self.object_map.iter().enumerate().all(|(i, &o)| i == o as usize)
            && self.morphism_map.iter().enumerate().all(|(i, &m)| i == m as usize)
    }

    /// `self . inner` (apply `inner` first).
    pub fn compose_with(&self, inner: &GroupoidFunctor) -> GroupoidFunctor {
        debug_assert!(same_groupoid(inner.codomain(), self.domain()));
        let object_map = crate::par::map_range(inner.object_map.len(), |o| {
            self.object_map[inner.object_map[o] as usize]
        });
        let morphism_map = crate::par::map_range(inner.morphism_map.len(), |m| {
            self.morphism_map[inner.morphism_map[m] as usize]
        });
        GroupoidFunctor::trusted(
            inner.domain.clone(),
            self.codomain.clone(),
            object_map,
            morphism_map,
        )
    }

    /// Componentwise product functor `A x B -> X x Y` of `f: A -> X` and
    /// `g: B -> Y`; the two product groupoids are passed explicitly.
    pub fn pair(
        dom_product: &Gpd,
        cod_product: &Gpd,
        f: &GroupoidFunctor,
        g: &GroupoidFunctor,
    ) -> GroupoidFunctor {
        let (nb, mb) = (g.domain.object_count(), g.domain.morphism_count());
        let (ny, my) = (g.codomain.object_count(), g.codomain.morphism_count());
        debug_assert_eq!(dom_product.object_count(), f.domain.object_count() * nb);
        debug_assert_eq!(cod_product.object_count(), f.codomain.object_count() * ny);
        let object_map = (0..dom_product.object_count())
            .map(|o| (f.obj(o / nb) * ny + g.obj(o % nb)) as u32)
            .collect();
        let morphism_map = (0..dom_product.morphism_count())
            .map(|m| (f.mor(m / mb) * my + g.mor(m % mb)) as u32)
            .collect();
        GroupoidFunctor::trusted(dom_product.clone(), cod_product.clone(), object_map, morphism_map)
    }

    /// Diagonal `X -> X x X`.
    pub fn diagonal(x: &Gpd, xx: &Gpd) -> GroupoidFunctor {
        let (n, m) = (x.object_count(), x.morphism_count());
        debug_assert_eq!(xx.object_count(), n * n);
        GroupoidFunctor::trusted(
            x.clone(),
            xx.clone(),
            (0..n).map(|o| (o * n + o) as u32).collect(),
            (0..m).map(|u| (u * m + u) as u32).collect(),
        )
    }

    /// The unique functor to the terminal groupoid.
    pub fn terminal(x: &Gpd, point: &Gpd) -> GroupoidFunctor {
        debug_assert_eq!(point.object_count(), 1);
        GroupoidFunctor::trusted(
            x.clone(),
            point.clone(),
            vec![0; x.object_count()],
            vec![0; x.morphism_count()],
        )
    }

    /// Projection `X x Y -> X` (side 0) or `X x Y -> Y` (side 1).
    pub fn projection(product: &Gpd, side: usize) -> GroupoidFunctor {
        let (x, y) = product.product_parts().expect("projection of a non-product");
        let (x, y) = (x.clone(), y.clone());
        let (ny, my) = (y.object_count(), y.morphism_count());
        let (object_map, morphism_map, cod) = if side == 0 {
            (
                (0..product.object_count()).map(|o| (o / ny) as u32).collect(),
                (0..product.morphism_count()).map(|m| (m / my) as u32).collect(),
                x,
            )
        } else {
            (
                (0..product.object_count()).map(|o| (o % ny) as u32).collect(),
                (0..product.morphism_count()).map(|m| (m % my) as u32).collect(),
                y,
            )
        };
        GroupoidFunctor::trusted(product.clone(), cod, object_map, morphism_map)
    }

    /// The symmetry `X x Y -> Y x X`.
    pub fn flip(xy: &Gpd, yx: &Gpd) -> GroupoidFunctor {
        let (x, y) = xy.product_parts().expect("flip of a non-product");
        let (ny, my) = (y.object_count(), y.morphism_count());
        let (nx, mx) = (x.object_count(), x.morphism_count());
        GroupoidFunctor::trusted(
            xy.clone(),
            yx.clone(),
            (0..xy.object_count())
                .map(|o| ((o % ny) * nx + o / ny) as u32)
                .collect(),
            (0..xy.morphism_count())
                .map(|m| ((m % my) * mx + m / my) as u32)
                .collect(),
        )
    }

    /// Quasi-inverse of an equivalence: picks, for every codomain object,
    /// the least essential preimage and lifts morphisms through full
    /// faithfulness. Returns `None` when a preimage or a lift is missing;
    /// callers must already know the functor is an equivalence (every
    /// homotopy fiber contractible) for the result to be a functor.
    pub fn quasi_inverse(&self) -> Option<GroupoidFunctor> {
        let (dom, cod) = (&self.domain, &self.codomain);
        // Essential preimage per codomain object: least (z, witness m: f z -> x).
        let mut pick: Vec<Option<(usize, usize)>> = vec![None; cod.object_count()];
        for z in 0..dom.object_count() {
            let fz = self.obj(z);
            for x in 0..cod.object_count() {
                if pick[x].is_none() {
                    if let Some(&m) = cod.hom(fz, x).first() {
                        pick[x] = Some((z, m as usize));
                    }
                }
            }
        }
        let pick: Vec<(usize, usize)> = pick.into_iter().collect::<Option<_>>()?;
        let mut object_map = Vec::with_capacity(cod.object_count());
        for &(z, _) in &pick {
            object_map.push(z as u32);
        }
        let mut morphism_map = Vec::with_capacity(cod.morphism_count());
        for h in 0..cod.morphism_count() {
            let (x, y) = (cod.src(h), cod.tgt(h));
            let (zx, mx) = pick[x];
            let (zy, my) = pick[y];
            // Unique u: zx -> zy with f(u) = my^{-1} . h . mx.
            let want = cod.compose(cod.inverse_of(my), cod.compose(h, mx));
            let u = dom
                .hom(zx, zy)
                .iter()
                .find(|&&u| self.mor(u as usize) == want)?;
            morphism_map.push(*u);
        }
        Some(GroupoidFunctor::trusted(
            cod.clone(),
            dom.clone(),
            object_map,
            morphism_map,
        ))
    }
}

impl fmt::Debug for GroupoidFunctor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "GroupoidFunctor({:?} -> {:?})",
            self.domain, self.codomain
        )
    }
}

/// A natural isomorphism between two functors with the same endpoints.
#[derive(Clone)]
pub struct NaturalIso {
    source: GroupoidFunctor,
    target: GroupoidFunctor,
    components: Arc<Vec<u32>>,
}

impl NaturalIso {
    pub fn new(
        source: GroupoidFunctor,
        target: GroupoidFunctor,
        components: Vec<u32>,
    ) -> Result<NaturalIso, GroupoidError> {
        let iso = NaturalIso::trusted(source, target, components);
        iso.validate()?;
        Ok(iso)
    }

    pub(crate) fn trusted(
        source: GroupoidFunctor,
        target: GroupoidFunctor,
        components: Vec<u32>,
    ) -> NaturalIso {
        NaturalIso {
            source,
            target,
            components: Arc::new(components),
        }
    }

    pub fn validate(&self) -> Result<(), GroupoidError> {
        let bad = |msg: String| Err(GroupoidError::InvalidNaturalIso(msg));
        if !same_groupoid(self.source.domain(), self.target.domain())
            || !same_groupoid(self.source.codomain(), self.target.codomain())
        {
            return bad("functors do not share endpoints".into());
        }
        let dom = self.source.domain();
        let cod = self.source.codomain();
        if self.components.len() != dom.object_count() {
            return bad("one component per object required".into());
        }
        for x in 0..dom.object_count() {
            let c = self.components[x] as usize;
            if c >= cod.morphism_count()
                || cod.src(c) != self.source.obj(x)
                || cod.tgt(c) != self.target.obj(x)
            {
                return bad(format!("component at object {x} has wrong endpoints"));
            }
        }
        for m in 0..dom.morphism_count() {
            let (x, y) = (dom.src(m), dom.tgt(m));
            let lhs = cod.compose(self.target.mor(m), self.components[x] as usize);
            let rhs = cod.compose(self.components[y] as usize, self.source.mor(m));
            if lhs != rhs {
                return bad(format!("naturality square fails at morphism {m}"));
            }
        }
        Ok(())
    }

    pub fn source(&self) -> &GroupoidFunctor {
        &self.source
    }

    pub fn target(&self) -> &GroupoidFunctor {
        &self.target
    }

    pub fn component(&self, x: ObjId) -> MorId {
        self.components[x] as MorId
    }

    pub fn components(&self) -> &[u32] {
        &self.components
    }

    pub fn identity(f: &GroupoidFunctor) -> NaturalIso {
        let cod = f.codomain().clone();
        let components = (0..f.domain().object_count())
            .map(|x| cod.identity_of(f.obj(x)) as u32)
            .collect();
        NaturalIso::trusted(f.clone(), f.clone(), components)
    }

    pub fn inverse(&self) -> NaturalIso {
        let cod = self.source.codomain().clone();
        let components = self
            .components
            .iter()
            .map(|&c| cod.inverse_of(c as usize) as u32)
            .collect();
        NaturalIso::trusted(self.target.clone(), self.source.clone(), components)
    }

    /// Vertical composite `other . self` (`self: F => G`, `other: G => H`).
    pub fn then(&self, other: &NaturalIso) -> NaturalIso {
        let cod = self.source.codomain().clone();
        let components = (0..self.components.len())
            .map(|x| cod.compose(other.components[x] as usize, self.components[x] as usize) as u32)
            .collect();
        NaturalIso::trusted(self.source.clone(), other.target.clone(), components)
    }

    /// Whisker with `h` on the outside: `h . F => h . G`.
    pub fn whisker_post(&self, h: &GroupoidFunctor) -> NaturalIso {
        let components = self
            .components
            .iter()
            .map(|&c| h.mor(c as usize) as u32)
            .collect();
        NaturalIso::trusted(
            h.compose_with(&self.source),
            h.compose_with(&self.target),
            components,
        )
    }

    /// Whisker with `h` on the inside: `F . h => G . h`.
    pub fn whisker_pre(&self, h: &GroupoidFunctor) -> NaturalIso {
        let components = (0..h.domain().object_count())
            .map(|x| self.components[h.obj(x)])
            .collect();
        NaturalIso::trusted(
            self.source.compose_with(h),
            self.target.compose_with(h),
            components,
        )
    }
}

impl fmt::Debug for NaturalIso {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NaturalIso({} components)", self.components.len())
    }
}
