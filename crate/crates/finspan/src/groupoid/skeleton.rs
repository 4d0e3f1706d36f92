//! Skeletonization: one representative object per connected component,
//! its automorphism group as an explicit multiplication table, and the
//! round-trip equivalence witnesses. The skeleton is the normal form behind
//! every decision procedure in this crate.

use super::build::dense_or_sparse;
use super::functor::{GroupoidFunctor, NaturalIso};
use super::{FiniteGroupoid, Gpd, MorId, ObjId};
use crate::linalg::Rational;
use crate::par;
use std::sync::Arc;

/// Automorphism group of a component representative, as ranks into the
/// hom-set `Hom(rep, rep)`.
#[derive(Clone)]
pub struct AutGroup {
    pub rep: ObjId,
    /// Ambient morphism ids, ascending.
    pub elements: Vec<MorId>,
    /// `table[i * n + j]` = rank of `elements[i] . elements[j]`.
    pub table: Vec<usize>,
    pub identity_rank: usize,
    pub inverse_rank: Vec<usize>,
}

impl AutGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn mul(&self, i: usize, j: usize) -> usize {
        self.table[i * self.elements.len() + j]
    }

    /// The multiplication table as nested rank rows.
    pub fn table_rows(&self) -> Vec<Vec<usize>> {
        let n = self.elements.len();
        (0..n).map(|i| self.table[i * n..(i + 1) * n].to_vec()).collect()
    }
}

#[derive(Clone)]
pub struct SkelComponent {
    pub rep: ObjId,
    pub members: Vec<ObjId>,
    pub aut: AutGroup,
}

pub(crate) struct SkeletonLight {
    pub components: Vec<SkelComponent>,
    pub comp_of: Vec<usize>,
    /// `transport[x]` is a chosen morphism `rep(component(x)) -> x`;
    /// the representative's transport is its identity.
    pub transport: Vec<MorId>,
    pub skeletal: Gpd,
    pub from_skeleton: GroupoidFunctor,
    pub aut_offset: Vec<usize>,
}

pub(crate) fn skeleton_light(x: &Gpd) -> SkeletonLight {
    let n = x.object_count();
    let m = x.morphism_count();

    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, mut a: usize) -> usize {
        while parent[a] != a {
            parent[a] = parent[parent[a]];
            a = parent[a];
        }
        a
    }
    for mi in 0..m {
        let (a, b) = (find(&mut parent, x.src(mi)), find(&mut parent, x.tgt(mi)));
        if a != b {
            // Union by least root keeps component order stable.
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            parent[hi] = lo;
        }
    }

    let mut members_of_root: Vec<Vec<ObjId>> = vec![Vec::new(); n];
    for o in 0..n {
        let r = find(&mut parent, o);
        members_of_root[r].push(o);
    }
    let mut components_members: Vec<Vec<ObjId>> = members_of_root
        .into_iter()
        .filter(|v| !v.is_empty())
        .collect();
    components_members.sort_by_key(|v| v[0]);

    let mut comp_of = vec![0usize; n];
    for (c, members) in components_members.iter().enumerate() {
        for &o in members {
            comp_of[o] = c;
        }
    }

    // Transports by breadth-first search from each representative, scanning
    // hom-buckets in (target, morphism) order for determinism.
    let mut transport: Vec<MorId> = vec![usize::MAX; n];
    for members in &components_members {
        let rep = members[0];
        transport[rep] = x.identity_of(rep);
        let mut queue = std::collections::VecDeque::from([rep]);
        while let Some(cur) = queue.pop_front() {
            for &y in members.iter() {
                if transport[y] != usize::MAX {
                    continue;
                }
                if let Some(&mor) = x.hom(cur, y).first() {
                    transport[y] = x.compose(mor as usize, transport[cur]);
                    queue.push_back(y);
                }
            }
        }
    }

    let components: Vec<SkelComponent> = components_members
        .into_iter()
        .map(|members| {
            let rep = members[0];
            let elements: Vec<MorId> = x.automorphisms(rep).iter().map(|&e| e as usize).collect();
            let k = elements.len();
            let mut table = vec![0usize; k * k];
            for i in 0..k {
                for j in 0..k {
                    table[i * k + j] = x.hom_rank(x.compose(elements[i], elements[j]));
                }
            }
            let identity_rank = x.hom_rank(x.identity_of(rep));
            let inverse_rank = elements.iter().map(|&e| x.hom_rank(x.inverse_of(e))).collect();
            SkelComponent {
                rep,
                members,
                aut: AutGroup {
                    rep,
                    elements,
                    table,
                    identity_rank,
                    inverse_rank,
                },
            }
        })
        .collect();

    // The skeletal groupoid: one object per component, automorphisms only.
    let n_comp = components.len();
    let mut aut_offset = Vec::with_capacity(n_comp);
    let mut total = 0usize;
    for c in &components {
        aut_offset.push(total);
        total += c.aut.order();
    }
    let mut mor_src = Vec::with_capacity(total);
    let mut identity = Vec::with_capacity(n_comp);
    let mut inverse = Vec::with_capacity(total);
    let mut entries = Vec::new();
    let mut from_obj = Vec::with_capacity(n_comp);
    let mut from_mor = Vec::with_capacity(total);
    for (c, comp) in components.iter().enumerate() {
        let off = aut_offset[c];
        let k = comp.aut.order();
        identity.push((off + comp.aut.identity_rank) as u32);
        from_obj.push(comp.rep as u32);
        for r in 0..k {
            mor_src.push(c as u32);
            inverse.push((off + comp.aut.inverse_rank[r]) as u32);
            from_mor.push(comp.aut.elements[r] as u32);
        }
        for i in 0..k {
            for j in 0..k {
                entries.push((
                    (off + i) as u32,
                    (off + j) as u32,
                    (off + comp.aut.mul(i, j)) as u32,
                ));
            }
        }
    }
    let skeletal = Arc::new(FiniteGroupoid::from_store(
        None,
        n_comp,
        mor_src.clone(),
        mor_src,
        identity,
        inverse,
        dense_or_sparse(total, entries),
    ));
    let from_skeleton = GroupoidFunctor::trusted(skeletal.clone(), x.clone(), from_obj, from_mor);

    SkeletonLight {
        components,
        comp_of,
        transport,
        skeletal,
        from_skeleton,
        aut_offset,
    }
}

/// Equivalence-class normal form of a groupoid, with round-trip witnesses.
pub struct Skeleton {
    light: SkeletonLight,
    to_skeleton: GroupoidFunctor,
    unit: NaturalIso,
    counit: NaturalIso,
}

impl Skeleton {
    pub fn components(&self) -> &[SkelComponent] {
        &self.light.components
    }

    pub fn component_of(&self, x: ObjId) -> usize {
        self.light.comp_of[x]
    }

    pub fn transport(&self, x: ObjId) -> MorId {
        self.light.transport[x]
    }

    pub fn skeletal_groupoid(&self) -> &Gpd {
        &self.light.skeletal
    }

    pub fn to_skeleton(&self) -> &GroupoidFunctor {
        &self.to_skeleton
    }

    pub fn from_skeleton(&self) -> &GroupoidFunctor {
        &self.light.from_skeleton
    }

    /// Witnesses: `from . to => id` on the original groupoid and
    /// `to . from => id` on the skeleton (the latter is the identity).
    pub fn round_trip_witnesses(&self) -> (&NaturalIso, &NaturalIso) {
        (&self.unit, &self.counit)
    }

    pub(crate) fn light(&self) -> &SkeletonLight {
        &self.light
    }
}

pub fn skeleton(x: &Gpd) -> Skeleton {
    let light = skeleton_light(x);
    let to_obj: Vec<u32> = light.comp_of.iter().map(|&c| c as u32).collect();
    let to_mor: Vec<u32> = {
        let light = &light;
        par::map_range(x.morphism_count(), |mi| {
            let (s, t) = (x.src(mi), x.tgt(mi));
            let conj = x.compose(
                x.inverse_of(light.transport[t]),
                x.compose(mi, light.transport[s]),
            );
            (light.aut_offset[light.comp_of[s]] + x.hom_rank(conj)) as u32
        })
    };
    let to_skeleton = GroupoidFunctor::trusted(x.clone(), light.skeletal.clone(), to_obj, to_mor);
    let round_trip = light.from_skeleton.compose_with(&to_skeleton);
    let unit = NaturalIso::trusted(
        round_trip,
        GroupoidFunctor::identity(x),
        light.transport.iter().map(|&t| t as u32).collect(),
    );
    let counit = NaturalIso::identity(&GroupoidFunctor::identity(&light.skeletal));
    Skeleton {
        light,
        to_skeleton,
        unit,
        counit,
    }
}

/// Homotopy cardinality: the sum over components of the reciprocal of the
/// automorphism group order, as an exact rational.
pub fn cardinality(x: &Gpd) -> Rational {
    let light = skeleton_light(x);
    let mut total = Rational::zero();
    for c in &light.components {
        total += Rational::new(1, c.aut.order() as i64);
    }
    total
}

/// Truncation level of a single groupoid, viewed as a space:
/// -2 contractible, -1 empty or contractible, 0 equivalent to a discrete
/// set, 1 otherwise.
pub(crate) fn groupoid_level(x: &Gpd) -> i32 {
    let light = skeleton_light(x);
    if light.components.is_empty() {
        return -1;
    }
    let all_trivial = light.components.iter().all(|c| c.aut.order() == 1);
    if all_trivial {
        if light.components.len() == 1 {
            -2
        } else {
            0
        }
    } else {
        1
    }
}

/// The least `m` in `{-2, -1, 0, 1}` such that every homotopy fiber of `f`
/// is `m`-truncated. Fibers over equivalent points are equivalent, so only
/// one fiber per codomain component is inspected.
pub fn truncation_level(f: &GroupoidFunctor) -> i32 {
    let cod_light = skeleton_light(f.codomain());
    let levels: Vec<i32> = par::map_range(cod_light.components.len(), |c| {
        let rep = cod_light.components[c].rep;
        let (fiber, _) = super::build::homotopy_fiber(f, rep).expect("rep in range");
        groupoid_level(&fiber)
    });
    levels.into_iter().max().unwrap_or(-2)
}
