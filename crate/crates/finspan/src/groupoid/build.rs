//! Groupoid constructors: discrete sets, deloopings, unions, products,
//! action groupoids, iso-comma categories (homotopy pullbacks), homotopy
//! fibers, and inertia groupoids.

use super::functor::{GroupoidFunctor, NaturalIso};
use super::{
    same_groupoid, ComposeStore, FiniteGroupoid, Gpd, GroupAxiom, GroupoidError, MorId, ObjId,
};
use crate::par;
use std::sync::Arc;

const SIZE_LIMIT: u64 = u32::MAX as u64 - 1;

fn bucket_of(offsets: &[u32], id: usize) -> usize {
    offsets.partition_point(|&o| o as usize <= id) - 1
}

pub(crate) fn dense_or_sparse(m: usize, entries: Vec<(u32, u32, u32)>) -> ComposeStore {
    if m * m <= 16_000_000 {
        let mut table = vec![super::UNDEFINED; m * m];
        for (g, f, gf) in entries {
            table[g as usize * m + f as usize] = gf;
        }
        ComposeStore::Dense(table)
    } else {
        ComposeStore::Sparse(entries.into_iter().map(|(g, f, gf)| ((g, f), gf)).collect())
    }
}

/// The discrete groupoid on `n` objects: identities only.
pub fn discrete(n: usize) -> Gpd {
    let ids: Vec<u32> = (0..n as u32).collect();
    let entries = (0..n as u32).map(|i| (i, i, i)).collect();
    Arc::new(FiniteGroupoid::from_store(
        Some(format!("discrete({n})")),
        n,
        ids.clone(),
        ids.clone(),
        ids.clone(),
        ids,
        dense_or_sparse(n, entries),
    ))
}

pub(crate) fn validate_group_table(
    table: &[Vec<usize>],
) -> Result<(usize, Vec<usize>), GroupoidError> {
    let n = table.len();
    if table.iter().any(|row| row.len() != n)
        || table.iter().any(|row| row.iter().any(|&v| v >= n))
    {
        return Err(GroupoidError::NotAGroup(GroupAxiom::Closure));
    }
    if n == 0 {
        return Err(GroupoidError::NotAGroup(GroupAxiom::Identity));
    }
    if par::min_violation(n, |a| {
        for b in 0..n {
            for c in 0..n {
                if table[table[a][b]][c] != table[a][table[b][c]] {
                    return Some((a, b, c));
                }
            }
        }
        None
    })
    .is_some()
    {
        return Err(GroupoidError::NotAGroup(GroupAxiom::Associativity));
    }
    let unit = (0..n).find(|&e| (0..n).all(|g| table[e][g] == g && table[g][e] == g));
    let Some(e) = unit else {
        return Err(GroupoidError::NotAGroup(GroupAxiom::Identity));
    };
    let mut inv = Vec::with_capacity(n);
    for g in 0..n {
        match (0..n).find(|&h| table[g][h] == e && table[h][g] == e) {
            Some(h) => inv.push(h),
            None => return Err(GroupoidError::NotAGroup(GroupAxiom::Inverse)),
        }
    }
    Ok((e, inv))
}

/// One-object groupoid with the given group as its automorphisms.
///
/// `table[a][b]` is the product `a * b`, composed as "apply `b`, then `a`".
pub fn delooping(table: &[Vec<usize>]) -> Result<Gpd, GroupoidError> {
    let (e, inv) = validate_group_table(table)?;
    let n = table.len();
    let mut entries = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            entries.push((a as u32, b as u32, table[a][b] as u32));
        }
    }
    Ok(Arc::new(FiniteGroupoid::from_store(
        None,
        1,
        vec![0; n],
        vec![0; n],
        vec![e as u32],
        inv.iter().map(|&i| i as u32).collect(),
        dense_or_sparse(n, entries),
    )))
}

pub(crate) struct UnionStore {
    pub left: Gpd,
    pub right: Gpd,
}

impl UnionStore {
    pub(crate) fn compose(&self, g: MorId, f: MorId) -> MorId {
        let ma = self.left.morphism_count();
        if g < ma {
            self.left.compose(g, f)
        } else {
            self.right.compose(g - ma, f - ma) + ma
        }
    }
}

/// Tagged disjoint union; `x`'s objects and morphisms come first.
pub fn disjoint_union(x: &Gpd, y: &Gpd) -> Gpd {
    let (na, ma) = (x.object_count() as u32, x.morphism_count() as u32);
    let shift_obj = |v: u32| v + na;
    let shift_mor = |v: u32| v + ma;
    let mor_src = (0..x.morphism_count())
        .map(|m| x.src(m) as u32)
        .chain((0..y.morphism_count()).map(|m| shift_obj(y.src(m) as u32)))
        .collect();
    let mor_tgt = (0..x.morphism_count())
        .map(|m| x.tgt(m) as u32)
        .chain((0..y.morphism_count()).map(|m| shift_obj(y.tgt(m) as u32)))
        .collect();
    let identity = (0..x.object_count())
        .map(|o| x.identity_of(o) as u32)
        .chain((0..y.object_count()).map(|o| shift_mor(y.identity_of(o) as u32)))
        .collect();
    let inverse = (0..x.morphism_count())
        .map(|m| x.inverse_of(m) as u32)
        .chain((0..y.morphism_count()).map(|m| shift_mor(y.inverse_of(m) as u32)))
        .collect();
    Arc::new(FiniteGroupoid::from_store(
        None,
        x.object_count() + y.object_count(),
        mor_src,
        mor_tgt,
        identity,
        inverse,
        ComposeStore::Union(UnionStore {
            left: x.clone(),
            right: y.clone(),
        }),
    ))
}

pub(crate) struct ProductStore {
    pub left: Gpd,
    pub right: Gpd,
}

impl ProductStore {
    pub(crate) fn compose(&self, g: MorId, f: MorId) -> MorId {
        let mb = self.right.morphism_count();
        let (u2, v2) = (g / mb, g % mb);
        let (u1, v1) = (f / mb, f % mb);
        self.left.compose(u2, u1) * mb + self.right.compose(v2, v1)
    }
}

/// Cartesian product; objects `(a, b)` are indexed `a * |obj(y)| + b`
/// and morphisms `(u, v)` are indexed `u * |mor(y)| + v`.
pub fn product(x: &Gpd, y: &Gpd) -> Gpd {
    let (nb, mb) = (y.object_count(), y.morphism_count());
    let n = x.object_count() * nb;
    let m = x.morphism_count() * mb;
    assert!((m as u64) < SIZE_LIMIT, "product too large");
    let mor_src = (0..m)
        .map(|i| (x.src(i / mb) * nb + y.src(i % mb)) as u32)
        .collect();
    let mor_tgt = (0..m)
        .map(|i| (x.tgt(i / mb) * nb + y.tgt(i % mb)) as u32)
        .collect();
    let identity = (0..n)
        .map(|o| (x.identity_of(o / nb) * mb + y.identity_of(o % nb)) as u32)
        .collect();
    let inverse = (0..m)
        .map(|i| (x.inverse_of(i / mb) * mb + y.inverse_of(i % mb)) as u32)
        .collect();
    Arc::new(FiniteGroupoid::from_store(
        None,
        n,
        mor_src,
        mor_tgt,
        identity,
        inverse,
        ComposeStore::Product(ProductStore {
            left: x.clone(),
            right: y.clone(),
        }),
    ))
}

/// Action groupoid of a group acting (on the left) on a finite set.
///
/// Objects are the set's points; the morphism `(g, p)` runs from `p` to
/// `action[g][p]` and is indexed `g * |set| + p`.
pub fn action_groupoid(
    table: &[Vec<usize>],
    action: &[Vec<usize>],
) -> Result<Gpd, GroupoidError> {
    let (e, inv) = validate_group_table(table)?;
    let n_grp = table.len();
    if action.len() != n_grp {
        return Err(GroupoidError::InvalidAction(
            "one permutation per group element required".into(),
        ));
    }
    let n_set = action.first().map_or(0, |row| row.len());
    if action.iter().any(|row| row.len() != n_set)
        || action.iter().any(|row| row.iter().any(|&p| p >= n_set))
    {
        return Err(GroupoidError::InvalidAction("ragged or out-of-range action".into()));
    }
    if (0..n_set).any(|p| action[e][p] != p) {
        return Err(GroupoidError::InvalidAction("unit must act as the identity".into()));
    }
    for a in 0..n_grp {
        for b in 0..n_grp {
            for p in 0..n_set {
                if action[table[a][b]][p] != action[a][action[b][p]] {
                    return Err(GroupoidError::InvalidAction(format!(
                        "action not compatible with multiplication at ({a},{b},{p})"
                    )));
                }
            }
        }
    }
    let m = n_grp * n_set;
    let mor_src = (0..m).map(|i| (i % n_set) as u32).collect();
    let mor_tgt = (0..m).map(|i| action[i / n_set][i % n_set] as u32).collect();
    let identity = (0..n_set).map(|p| (e * n_set + p) as u32).collect();
    let inverse = (0..m)
        .map(|i| {
            let (g, p) = (i / n_set, i % n_set);
            (inv[g] * n_set + action[g][p]) as u32
        })
        .collect();
    let mut entries = Vec::new();
    for g2 in 0..n_grp {
        for g1 in 0..n_grp {
            let g = table[g2][g1];
            for p in 0..n_set {
                // (g2, action[g1][p]) . (g1, p) = (g2 g1, p)
                entries.push((
                    (g2 * n_set + action[g1][p]) as u32,
                    (g1 * n_set + p) as u32,
                    (g * n_set + p) as u32,
                ));
            }
        }
    }
    Ok(Arc::new(FiniteGroupoid::from_store(
        None,
        n_set,
        mor_src,
        mor_tgt,
        identity,
        inverse,
        dense_or_sparse(m, entries),
    )))
}

pub(crate) struct IsoCommaStore {
    pub f: GroupoidFunctor,
    pub g: GroupoidFunctor,
    /// Morphisms are `(u, v, alpha)` with `alpha: f(a) -> g(b)` attached to
    /// the source; morphism `(u, v, r)` has index `mor_offsets[u * mB + v] + r`.
    pub mor_offsets: Vec<u32>,
}

impl IsoCommaStore {
    fn decode(&self, mb: usize, id: MorId) -> (usize, usize, usize) {
        let uv = bucket_of(&self.mor_offsets, id);
        (uv / mb, uv % mb, id - self.mor_offsets[uv] as usize)
    }

    pub(crate) fn compose(&self, _p: &FiniteGroupoid, g_id: MorId, f_id: MorId) -> MorId {
        let a = self.f.domain();
        let b = self.g.domain();
        let mb = b.morphism_count();
        let (u2, v2, _) = self.decode(mb, g_id);
        let (u1, v1, r1) = self.decode(mb, f_id);
        let u = a.compose(u2, u1);
        let v = b.compose(v2, v1);
        self.mor_offsets[u * mb + v] as usize + r1
    }
}

/// The iso-comma groupoid of a cospan `f: A -> C <- B : g` — the homotopy
/// pullback. Returns the groupoid, the two projections, and the invertible
/// natural transformation filling the square `f . pA => g . pB`.
pub fn iso_comma(
    f: &GroupoidFunctor,
    g: &GroupoidFunctor,
) -> Result<(Gpd, GroupoidFunctor, GroupoidFunctor, NaturalIso), GroupoidError> {
    if !same_groupoid(f.codomain(), g.codomain()) {
        return Err(GroupoidError::MismatchedCodomain);
    }
    let a = f.domain().clone();
    let b = g.domain().clone();
    let c = f.codomain().clone();
    let (na, nb) = (a.object_count(), b.object_count());
    let (ma, mb) = (a.morphism_count(), b.morphism_count());

    let mut obj_offsets = Vec::with_capacity(na * nb + 1);
    let mut acc: u64 = 0;
    for ai in 0..na {
        for bi in 0..nb {
            obj_offsets.push(acc as u32);
            acc += c.hom(f.obj(ai), g.obj(bi)).len() as u64;
            if acc > SIZE_LIMIT {
                return Err(GroupoidError::TooLarge("iso-comma object set".into()));
            }
        }
    }
    obj_offsets.push(acc as u32);
    let n_obj = acc as usize;

    let mut mor_offsets = Vec::with_capacity(ma * mb + 1);
    let mut acc: u64 = 0;
    for u in 0..ma {
        for v in 0..mb {
            mor_offsets.push(acc as u32);
            acc += c.hom(f.obj(a.src(u)), g.obj(b.src(v))).len() as u64;
            if acc > SIZE_LIMIT {
                return Err(GroupoidError::TooLarge("iso-comma morphism set".into()));
            }
        }
    }
    mor_offsets.push(acc as u32);
    let n_mor = acc as usize;

    let obj_encode = |ai: usize, bi: usize, rank: usize| -> u32 {
        obj_offsets[ai * nb + bi] + rank as u32
    };

    // One parallel pass computes, per morphism, the source and target
    // objects, the inverse morphism, and the projection entries. The output
    // buffer is filled in disjoint chunks; each chunk walks the (u, v)
    // buckets forward from its start index.
    #[derive(Clone, Copy, Default)]
    struct MorRow {
        src: u32,
        tgt: u32,
        inv: u32,
        pa: u32,
        pb: u32,
    }
    let mut rows: Vec<MorRow> = vec![MorRow::default(); n_mor];
    let chunk_size = (n_mor / 256).max(4096);
    par::fill_chunks(&mut rows, chunk_size, |start, chunk| {
        let mut uv = bucket_of(&mor_offsets, start);
        let mut cursor = start;
        let mut written = 0usize;
        while written < chunk.len() {
            let (u, v) = (uv / mb, uv % mb);
            let (sa, sb) = (a.src(u), b.src(v));
            let (ta, tb) = (a.tgt(u), b.tgt(v));
            let fu_inv = c.inverse_of(f.mor(u));
            let gv = g.mor(v);
            let bucket = c.hom(f.obj(sa), g.obj(sb));
            let inv_base = mor_offsets[a.inverse_of(u) * mb + b.inverse_of(v)];
            let base = mor_offsets[uv] as usize;
            let rank0 = cursor - base;
            for (rank, &alpha) in bucket.iter().enumerate().skip(rank0) {
                if written == chunk.len() {
                    break;
                }
                let alpha_t = c.compose(gv, c.compose(alpha as usize, fu_inv));
                chunk[written] = MorRow {
                    src: obj_encode(sa, sb, rank),
                    tgt: obj_encode(ta, tb, c.hom_rank(alpha_t)),
                    inv: inv_base + c.hom_rank(alpha_t) as u32,
                    pa: u as u32,
                    pb: v as u32,
                };
                written += 1;
                cursor += 1;
            }
            if written < chunk.len() {
                uv += 1;
            }
        }
    });
    let mor_src = par::map_range(n_mor, |i| rows[i].src);
    let mor_tgt = par::map_range(n_mor, |i| rows[i].tgt);
    let inverse = par::map_range(n_mor, |i| rows[i].inv);
    let proj_a_mor = par::map_range(n_mor, |i| rows[i].pa);
    let proj_b_mor = par::map_range(n_mor, |i| rows[i].pb);
    drop(rows);

    let mut identity = Vec::with_capacity(n_obj);
    let mut proj_a_obj = Vec::with_capacity(n_obj);
    let mut proj_b_obj = Vec::with_capacity(n_obj);
    let mut filler = Vec::with_capacity(n_obj);
    for ai in 0..na {
        for bi in 0..nb {
            let bucket = c.hom(f.obj(ai), g.obj(bi));
            let id_base = mor_offsets[a.identity_of(ai) * mb + b.identity_of(bi)];
            for (rank, &alpha) in bucket.iter().enumerate() {
                identity.push(id_base + rank as u32);
                proj_a_obj.push(ai as u32);
                proj_b_obj.push(bi as u32);
                filler.push(alpha);
            }
        }
    }

    let store = IsoCommaStore {
        f: f.clone(),
        g: g.clone(),
        mor_offsets,
    };
    let apex = Arc::new(FiniteGroupoid::from_store(
        None,
        n_obj,
        mor_src,
        mor_tgt,
        identity,
        inverse,
        ComposeStore::IsoComma(Box::new(store)),
    ));
    let proj_a = GroupoidFunctor::trusted(apex.clone(), a, proj_a_obj, proj_a_mor);
    let proj_b = GroupoidFunctor::trusted(apex.clone(), b, proj_b_obj, proj_b_mor);
    let left = f.compose_with(&proj_a);
    let right = g.compose_with(&proj_b);
    let filler = NaturalIso::trusted(left, right, filler);
    Ok((apex, proj_a, proj_b, filler))
}

/// Functor from the terminal groupoid picking out the object `x`.
pub fn point_inclusion(target: &Gpd, x: ObjId) -> Result<GroupoidFunctor, GroupoidError> {
    if x >= target.object_count() {
        return Err(GroupoidError::BadObjectIndex {
            index: x,
            count: target.object_count(),
        });
    }
    Ok(GroupoidFunctor::trusted(
        discrete(1),
        target.clone(),
        vec![x as u32],
        vec![target.identity_of(x) as u32],
    ))
}

/// Homotopy fiber of `f` over the object `y` of its codomain, with its
/// inclusion into the domain.
pub fn homotopy_fiber(
    f: &GroupoidFunctor,
    y: ObjId,
) -> Result<(Gpd, GroupoidFunctor), GroupoidError> {
    let point = point_inclusion(f.codomain(), y)?;
    let (fiber, incl, _, _) = iso_comma(f, &point)?;
    Ok((fiber, incl))
}

pub(crate) struct InertiaStore {
    pub base: Gpd,
    /// Morphisms `(u, phi)` with `phi` an automorphism of `src(u)`.
    pub mor_offsets: Vec<u32>,
}

impl InertiaStore {
    pub(crate) fn compose(&self, g_id: MorId, f_id: MorId) -> MorId {
        let u2 = bucket_of(&self.mor_offsets, g_id);
        let u1 = bucket_of(&self.mor_offsets, f_id);
        let r1 = f_id - self.mor_offsets[u1] as usize;
        self.mor_offsets[self.base.compose(u2, u1)] as usize + r1
    }
}

/// The inertia groupoid: objects are pairs `(x, phi)` of an object and an
/// automorphism; a morphism `(x, phi) -> (x', phi')` is `u: x -> x'` with
/// `phi' . u = u . phi`.
pub fn inertia(x: &Gpd) -> Gpd {
    let n = x.object_count();
    let m = x.morphism_count();
    let mut obj_offsets = Vec::with_capacity(n + 1);
    let mut acc = 0u32;
    for o in 0..n {
        obj_offsets.push(acc);
        acc += x.automorphisms(o).len() as u32;
    }
    obj_offsets.push(acc);
    let n_obj = acc as usize;

    let mut mor_offsets = Vec::with_capacity(m + 1);
    let mut acc = 0u32;
    for u in 0..m {
        mor_offsets.push(acc);
        acc += x.automorphisms(x.src(u)).len() as u32;
    }
    mor_offsets.push(acc);
    let n_mor = acc as usize;

    let mut mor_src = Vec::with_capacity(n_mor);
    let mut mor_tgt = Vec::with_capacity(n_mor);
    let mut inverse = Vec::with_capacity(n_mor);
    for u in 0..m {
        let (s, t) = (x.src(u), x.tgt(u));
        let u_inv = x.inverse_of(u);
        for (rank, &phi) in x.automorphisms(s).iter().enumerate() {
            let phi_t = x.compose(u, x.compose(phi as usize, u_inv));
            mor_src.push(obj_offsets[s] + rank as u32);
            mor_tgt.push(obj_offsets[t] + x.hom_rank(phi_t) as u32);
            inverse.push(mor_offsets[u_inv] + x.hom_rank(phi_t) as u32);
        }
    }
    let mut identity = Vec::with_capacity(n_obj);
    for o in 0..n {
        let id_base = mor_offsets[x.identity_of(o)];
        for rank in 0..x.automorphisms(o).len() {
            identity.push(id_base + rank as u32);
        }
    }
    Arc::new(FiniteGroupoid::from_store(
        None,
        n_obj,
        mor_src,
        mor_tgt,
        identity,
        inverse,
        ComposeStore::Inertia(Box::new(InertiaStore {
            base: x.clone(),
            mor_offsets,
        })),
    ))
}
