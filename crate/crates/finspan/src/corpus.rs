//! Reference groups, groupoids, representations, and seeded random
//! generators. Shared by the test suites and the `selftest` runner; all
//! randomness is deterministic given the caller's RNG.

use crate::groupoid::{
    self, action_groupoid, delooping, discrete, Gpd, GroupoidFunctor, MorId,
};
use crate::linalg::{RatMatrix, Rational};
use crate::local_system::LocalSystem;
use crate::span::Span;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type GroupMul = Vec<Vec<usize>>;

/// Cyclic group of order `n`.
pub fn cyclic(n: usize) -> GroupMul {
    (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect()
}

/// Direct product; element `(a, b)` has index `a * |h| + b`.
pub fn direct_product(g: &GroupMul, h: &GroupMul) -> GroupMul {
    let (n, m) = (g.len(), h.len());
    (0..n * m)
        .map(|x| {
            let (a1, b1) = (x / m, x % m);
            (0..n * m)
                .map(|y| {
                    let (a2, b2) = (y / m, y % m);
                    g[a1][a2] * m + h[b1][b2]
                })
                .collect()
        })
        .collect()
}

pub fn klein_four() -> GroupMul {
    direct_product(&cyclic(2), &cyclic(2))
}

fn perms_of(n: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..n {
        let mut next = Vec::new();
        for p in &out {
            for v in 0..n {
                if !p.contains(&v) {
                    let mut q = p.clone();
                    q.push(v);
                    next.push(q);
                }
            }
        }
        out = next;
    }
    out
}

/// Multiplication table of a set of permutations closed under composition,
/// composed as "apply the right factor first".
pub fn group_from_perms(perms: &[Vec<usize>]) -> GroupMul {
    let index = |p: &Vec<usize>| -> usize {
        perms
            .iter()
            .position(|q| q == p)
            .expect("permutation set is closed under composition")
    };
    perms
        .iter()
        .map(|a| {
            perms
                .iter()
                .map(|b| {
                    let ab: Vec<usize> = (0..b.len()).map(|x| a[b[x]]).collect();
                    index(&ab)
                })
                .collect()
        })
        .collect()
}

/// Symmetric group on `n` letters (permutations in lexicographic order).
pub fn symmetric(n: usize) -> GroupMul {
    group_from_perms(&perms_of(n))
}

/// Alternating group on 4 letters.
pub fn alternating4() -> GroupMul {
    let evens: Vec<Vec<usize>> = perms_of(4)
        .into_iter()
        .filter(|p| {
            let mut inv = 0;
            for i in 0..4 {
                for j in i + 1..4 {
                    if p[i] > p[j] {
                        inv += 1;
                    }
                }
            }
            inv % 2 == 0
        })
        .collect();
    group_from_perms(&evens)
}

/// Dihedral group of order `2n` (symmetries of the regular `n`-gon).
pub fn dihedral(n: usize) -> GroupMul {
    assert!(n >= 3);
    let mut perms = Vec::with_capacity(2 * n);
    for k in 0..n {
        perms.push((0..n).map(|x| (x + k) % n).collect::<Vec<usize>>());
    }
    for k in 0..n {
        perms.push((0..n).map(|x| (n + k - x) % n).collect::<Vec<usize>>());
    }
    group_from_perms(&perms)
}

/// Quaternion group of order 8: 1, -1, i, -i, j, -j, k, -k.
pub fn quaternion8() -> GroupMul {
    // Element 2a + s encodes axis a in {1, i, j, k} with sign (-1)^s.
    let axis_mul = |a: usize, b: usize| -> (usize, usize) {
        match (a, b) {
            (0, x) => (x, 0),
            (x, 0) => (x, 0),
            (x, y) if x == y => (0, 1),
            (1, 2) => (3, 0),
            (2, 1) => (3, 1),
            (2, 3) => (1, 0),
            (3, 2) => (1, 1),
            (3, 1) => (2, 0),
            (1, 3) => (2, 1),
            _ => unreachable!(),
        }
    };
    (0..8)
        .map(|x| {
            (0..8)
                .map(|y| {
                    let (ax, sx) = (x / 2, x % 2);
                    let (ay, sy) = (y / 2, y % 2);
                    let (az, sz) = axis_mul(ax, ay);
                    az * 2 + (sx + sy + sz) % 2
                })
                .collect()
        })
        .collect()
}

/// The fixed group list for the semiadditivity suite: one table per entry,
/// orders 2 through 24.
pub fn group_list() -> Vec<(&'static str, GroupMul)> {
    vec![
        ("C2", cyclic(2)),
        ("C3", cyclic(3)),
        ("C4", cyclic(4)),
        ("V4", klein_four()),
        ("C5", cyclic(5)),
        ("C6", cyclic(6)),
        ("S3", symmetric(3)),
        ("C8", cyclic(8)),
        ("D4", dihedral(4)),
        ("Q8", quaternion8()),
        ("C12", cyclic(12)),
        ("A4", alternating4()),
        ("D6", dihedral(6)),
        ("C2xC8", direct_product(&cyclic(2), &cyclic(8))),
        ("C24", cyclic(24)),
        ("S4", symmetric(4)),
    ]
}

pub fn bz(n: usize) -> Gpd {
    delooping(&cyclic(n)).expect("cyclic table is a group")
}

pub fn bs3() -> Gpd {
    delooping(&symmetric(3)).expect("S3 table is a group")
}

pub fn point() -> Gpd {
    discrete(1)
}

/// Action groupoid of a group translating on itself (equivalent to a point).
pub fn translation_groupoid(table: &GroupMul) -> Gpd {
    let action: Vec<Vec<usize>> = table.clone();
    action_groupoid(table, &action).expect("translation action is valid")
}

/// The small-groupoid corpus: discrete sets up to 4, deloopings of Z/2,
/// Z/3, S3, and action groupoids of group order at most 12.
pub fn groupoid_corpus() -> Vec<Gpd> {
    let s3 = symmetric(3);
    let natural_s3: Vec<Vec<usize>> = perms_of(3);
    let z4_on_two: Vec<Vec<usize>> = (0..4).map(|g| vec![g % 2, (g + 1) % 2]).collect();
    vec![
        discrete(1),
        discrete(2),
        discrete(3),
        discrete(4),
        bz(2),
        bz(3),
        bs3(),
        translation_groupoid(&cyclic(2)),
        translation_groupoid(&cyclic(3)),
        action_groupoid(&s3, &natural_s3).expect("natural S3 action"),
        action_groupoid(&cyclic(4), &z4_on_two).expect("Z4 action through Z2"),
    ]
}

/// Group homomorphism closure: extends generator images (group-element
/// indices) to the whole group, or reports an inconsistency.
pub fn extend_hom(
    src: &GroupMul,
    dst: &GroupMul,
    src_id: usize,
    dst_id: usize,
    gens: &[usize],
    images: &[usize],
) -> Option<Vec<usize>> {
    let n = src.len();
    let mut map = vec![usize::MAX; n];
    let mut known = Vec::new();
    let set = |map: &mut Vec<usize>, known: &mut Vec<usize>, x: usize, v: usize| -> bool {
        if map[x] == usize::MAX {
            map[x] = v;
            known.push(x);
            true
        } else {
            map[x] == v
        }
    };
    if !set(&mut map, &mut known, src_id, dst_id) {
        return None;
    }
    for (&g, &img) in gens.iter().zip(images) {
        if !set(&mut map, &mut known, g, img) {
            return None;
        }
    }
    let mut i = 0;
    while i < known.len() {
        for j in 0..=i {
            let (x, y) = (known[i], known[j]);
            let (xy_img, yx_img) = (dst[map[x]][map[y]], dst[map[y]][map[x]]);
            if !set(&mut map, &mut known, src[x][y], xy_img) {
                return None;
            }
            if !set(&mut map, &mut known, src[y][x], yx_img) {
                return None;
            }
        }
        i += 1;
    }
    if known.len() < n {
        return None;
    }
    // Full verification: the extension really is a homomorphism.
    for a in 0..n {
        for b in 0..n {
            if map[src[a][b]] != dst[map[a]][map[b]] {
                return None;
            }
        }
    }
    Some(map)
}

fn group_identity(table: &GroupMul) -> usize {
    let n = table.len();
    (0..n)
        .find(|&e| (0..n).all(|g| table[e][g] == g && table[g][e] == g))
        .expect("group table has a unit")
}

fn greedy_generators(table: &GroupMul) -> Vec<usize> {
    let n = table.len();
    let e = group_identity(table);
    let mut closed = vec![false; n];
    closed[e] = true;
    let mut members = vec![e];
    let mut gens = Vec::new();
    for g in 0..n {
        if closed[g] {
            continue;
        }
        gens.push(g);
        closed[g] = true;
        members.push(g);
        let mut i = 0;
        while i < members.len() {
            for j in 0..members.len() {
                let (x, y) = (members[i], members[j]);
                for p in [table[x][y], table[y][x]] {
                    if !closed[p] {
                        closed[p] = true;
                        members.push(p);
                    }
                }
            }
            i += 1;
        }
        if members.len() == n {
            break;
        }
    }
    gens
}

/// All degree-one rational representations (homomorphisms to {1, -1}).
pub fn sign_characters(table: &GroupMul) -> Vec<Vec<i64>> {
    let e = group_identity(table);
    let gens = greedy_generators(table);
    let c2 = cyclic(2);
    let mut out = Vec::new();
    for mask in 0..(1u32 << gens.len()) {
        let images: Vec<usize> = (0..gens.len()).map(|i| ((mask >> i) & 1) as usize).collect();
        if let Some(map) = extend_hom(table, &c2, e, 0, &gens, &images) {
            let chi: Vec<i64> = map.iter().map(|&v| if v == 0 { 1 } else { -1 }).collect();
            if !out.contains(&chi) {
                out.push(chi);
            }
        }
    }
    out
}

/// Local system on the delooping of `table` from one matrix per element.
pub fn rep_system(table: &GroupMul, mats: Vec<RatMatrix>) -> LocalSystem {
    let base = delooping(table).expect("corpus table is a group");
    let dim = mats.first().map_or(0, |m| m.rows());
    LocalSystem::trusted_dense(base, vec![dim], mats)
}

pub fn trivial_rep(table: &GroupMul) -> LocalSystem {
    rep_system(table, (0..table.len()).map(|_| RatMatrix::identity(1)).collect())
}

/// Left regular representation by permutation matrices.
pub fn regular_rep(table: &GroupMul) -> LocalSystem {
    let n = table.len();
    let mats = (0..n)
        .map(|g| {
            let mut m = RatMatrix::zeros(n, n);
            for h in 0..n {
                m.set(table[g][h], h, Rational::one());
            }
            m
        })
        .collect();
    rep_system(table, mats)
}

/// Sign representation of S3.
pub fn sign_rep_s3() -> LocalSystem {
    let table = symmetric(3);
    let perms = perms_of(3);
    let mats = perms
        .iter()
        .map(|p| {
            let mut inv = 0;
            for i in 0..3 {
                for j in i + 1..3 {
                    if p[i] > p[j] {
                        inv += 1;
                    }
                }
            }
            RatMatrix::from_i64_rows(&[&[if inv % 2 == 0 { 1 } else { -1 }]])
        })
        .collect();
    rep_system(&table, mats)
}

pub fn sign_rep_z2() -> LocalSystem {
    rep_system(
        &cyclic(2),
        vec![RatMatrix::identity(1), RatMatrix::from_i64_rows(&[&[-1]])],
    )
}

/// The 2-dimensional standard representation of S3 on the sum-zero plane,
/// basis `e0 - e1`, `e1 - e2`.
pub fn standard_rep_s3() -> LocalSystem {
    let perms = perms_of(3);
    // Coordinates of e_i - e_j in the chosen basis.
    fn coords(i: usize, j: usize) -> [i64; 2] {
        match (i, j) {
            (0, 1) => [1, 0],
            (1, 2) => [0, 1],
            (0, 2) => [1, 1],
            (1, 0) => [-1, 0],
            (2, 1) => [0, -1],
            (2, 0) => [-1, -1],
            _ => [0, 0],
        }
    }
    let mats = perms
        .iter()
        .map(|p| {
            let c1 = coords(p[0], p[1]);
            let c2 = coords(p[1], p[2]);
            RatMatrix::from_i64_rows(&[&[c1[0], c2[0]], &[c1[1], c2[1]]])
        })
        .collect();
    rep_system(&symmetric(3), mats)
}

/// Permutation representation on the cosets of the cyclic subgroup
/// generated by `g`; `None` if the index exceeds `max_dim`.
pub fn coset_rep(table: &GroupMul, g: usize, max_dim: usize) -> Option<Vec<RatMatrix>> {
    let n = table.len();
    let e = group_identity(table);
    let mut subgroup = vec![e];
    let mut cur = g;
    while cur != e {
        subgroup.push(cur);
        cur = table[cur][g];
    }
    let index = n / subgroup.len();
    if index > max_dim || index == 0 {
        return None;
    }
    // Left cosets, each labelled by its least element.
    let mut coset_of = vec![usize::MAX; n];
    let mut labels = Vec::new();
    for x in 0..n {
        if coset_of[x] != usize::MAX {
            continue;
        }
        let label = labels.len();
        labels.push(x);
        for &h in &subgroup {
            coset_of[table[x][h]] = label;
        }
    }
    let k = labels.len();
    let mats = (0..n)
        .map(|a| {
            let mut m = RatMatrix::zeros(k, k);
            for (c, &x) in labels.iter().enumerate() {
                m.set(coset_of[table[a][x]], c, Rational::one());
            }
            m
        })
        .collect();
    Some(mats)
}

fn random_unimodular(rng: &mut impl Rng, d: usize) -> RatMatrix {
    let mut lower = RatMatrix::identity(d);
    let mut upper = RatMatrix::identity(d);
    for i in 0..d {
        for j in 0..i {
            lower.set(i, j, Rational::from_integer(rng.random_range(-2..3)));
        }
        for j in i + 1..d {
            upper.set(i, j, Rational::from_integer(rng.random_range(-2..3)));
        }
        if rng.random_bool(0.5) {
            upper.set(i, i, Rational::from_integer(-1));
        }
    }
    lower.mul(&upper)
}

/// A random exact representation of the group: a direct sum of trivial
/// lines, sign characters, and coset permutation representations, of total
/// dimension at most `max_dim`, conjugated by a random unimodular matrix.
pub fn random_representation(
    rng: &mut impl Rng,
    table: &GroupMul,
    max_dim: usize,
) -> LocalSystem {
    let n = table.len();
    let signs = sign_characters(table);
    let mut blocks: Vec<Vec<RatMatrix>> = Vec::new();
    let mut dim = 0usize;
    let attempts = rng.random_range(1..4);
    for _ in 0..attempts {
        let room = max_dim - dim;
        if room == 0 {
            break;
        }
        match rng.random_range(0..3) {
            0 => {
                blocks.push((0..n).map(|_| RatMatrix::identity(1)).collect());
                dim += 1;
            }
            1 => {
                let chi = &signs[rng.random_range(0..signs.len())];
                blocks.push(
                    chi.iter()
                        .map(|&v| RatMatrix::from_i64_rows(&[&[v]]))
                        .collect(),
                );
                dim += 1;
            }
            _ => {
                let g = rng.random_range(0..n);
                if let Some(mats) = coset_rep(table, g, room) {
                    dim += mats[0].rows();
                    blocks.push(mats);
                }
            }
        }
    }
    if blocks.is_empty() {
        blocks.push((0..n).map(|_| RatMatrix::identity(1)).collect());
        dim = 1;
    }
    // Direct sum, then a change of basis.
    let mut mats: Vec<RatMatrix> = (0..n).map(|_| RatMatrix::zeros(dim, dim)).collect();
    let mut offset = 0;
    for block in &blocks {
        let d = block[0].rows();
        for (g, mat) in mats.iter_mut().enumerate() {
            for i in 0..d {
                for j in 0..d {
                    mat.set(offset + i, offset + j, block[g].get(i, j).clone());
                }
            }
        }
        offset += d;
    }
    let p = random_unimodular(rng, dim);
    let p_inv = p.inverse().expect("unimodular");
    let mats = mats.into_iter().map(|m| p.mul(&m).mul(&p_inv)).collect();
    rep_system(table, mats)
}

/// A random functor `a -> b`: each component of `a` is sent to a random
/// object of `b` through a random automorphism-group homomorphism (falling
/// back to the trivial one).
pub fn random_functor(rng: &mut impl Rng, a: &Gpd, b: &Gpd) -> GroupoidFunctor {
    assert!(b.object_count() > 0, "cannot map into the empty groupoid");
    let sk = groupoid::skeleton(a);
    let mut obj_map = vec![0u32; a.object_count()];
    let mut mor_map = vec![0u32; a.morphism_count()];
    // Per component: target object and a hom on automorphism ranks.
    let mut comp_target: Vec<usize> = Vec::new();
    let mut comp_hom: Vec<Vec<usize>> = Vec::new();
    for comp in sk.components() {
        let target = rng.random_range(0..b.object_count());
        let src_table: GroupMul = comp.aut.table_rows();
        let tgt_elems: Vec<MorId> = b.automorphisms(target).iter().map(|&m| m as usize).collect();
        let tgt_table: GroupMul = tgt_elems
            .iter()
            .map(|&x| tgt_elems.iter().map(|&y| b.hom_rank(b.compose(x, y))).collect())
            .collect();
        let src_id = comp.aut.identity_rank;
        let tgt_id = b.hom_rank(b.identity_of(target));
        let gens = greedy_generators(&src_table);
        let mut hom: Option<Vec<usize>> = None;
        for _ in 0..8 {
            let images: Vec<usize> = gens
                .iter()
                .map(|_| rng.random_range(0..tgt_elems.len()))
                .collect();
            if let Some(h) = extend_hom(&src_table, &tgt_table, src_id, tgt_id, &gens, &images) {
                hom = Some(h);
                break;
            }
        }
        let hom = hom.unwrap_or_else(|| vec![tgt_id; src_table.len()]);
        comp_target.push(target);
        comp_hom.push(hom);
    }
    for x in 0..a.object_count() {
        obj_map[x] = comp_target[sk.component_of(x)] as u32;
    }
    for m in 0..a.morphism_count() {
        let (s, t) = (a.src(m), a.tgt(m));
        let c = sk.component_of(s);
        let conj = a.compose(a.inverse_of(sk.transport(t)), a.compose(m, sk.transport(s)));
        let rank = a.hom_rank(conj);
        let image_rank = comp_hom[c][rank];
        mor_map[m] = b.automorphisms(comp_target[c])[image_rank];
    }
    GroupoidFunctor::trusted(a.clone(), b.clone(), obj_map, mor_map)
}

/// A random span between two given feet, with a corpus apex.
pub fn random_span(rng: &mut impl Rng, source: &Gpd, target: &Gpd) -> Span {
    let corpus = groupoid_corpus();
    let apex = corpus[rng.random_range(0..corpus.len())].clone();
    let left = random_functor(rng, &apex, source);
    let right = random_functor(rng, &apex, target);
    Span::trusted(apex, left, right)
}

/// A random span of discrete groupoids with at most `max` points per foot;
/// when `mono_left` is set the left leg is injective on objects.
pub fn random_discrete_span(
    rng: &mut impl Rng,
    source: &Gpd,
    target: &Gpd,
    mono_left: bool,
) -> Span {
    let max = source.object_count();
    let apex_size = if mono_left {
        rng.random_range(0..=max)
    } else {
        rng.random_range(0..=max + 2)
    };
    let apex = discrete(apex_size);
    let left_objs: Vec<u32> = if mono_left {
        let mut pool: Vec<u32> = (0..source.object_count() as u32).collect();
        let mut picked = Vec::new();
        for _ in 0..apex_size {
            let i = rng.random_range(0..pool.len());
            picked.push(pool.swap_remove(i));
        }
        picked
    } else {
        (0..apex_size)
            .map(|_| rng.random_range(0..source.object_count() as u32))
            .collect()
    };
    let right_objs: Vec<u32> = (0..apex_size)
        .map(|_| rng.random_range(0..target.object_count() as u32))
        .collect();
    let left = GroupoidFunctor::trusted(
        apex.clone(),
        source.clone(),
        left_objs.clone(),
        left_objs.iter().map(|&o| source.identity_of(o as usize) as u32).collect(),
    );
    let right = GroupoidFunctor::trusted(
        apex.clone(),
        target.clone(),
        right_objs.clone(),
        right_objs.iter().map(|&o| target.identity_of(o as usize) as u32).collect(),
    );
    Span::trusted(apex, left, right)
}

/// Deterministic RNG used across the self-test suites. ChaCha8 is pinned
/// so seeds reproduce byte-identically across platforms and releases.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}
