//! Equivalence of finite groupoids, decided on skeleta.
//!
//! Two groupoids are equivalent iff their skeleta match component by
//! component with isomorphic automorphism groups. Group isomorphisms are
//! found by exhaustive search over generator images with pruning; every
//! candidate extension is charged against a budget, and exceeding it is an
//! explicit error, never a silent "not equivalent".

use super::functor::{GroupoidFunctor, NaturalIso};
use super::skeleton::{skeleton, AutGroup, Skeleton};
use super::{Gpd, GroupoidError};

pub(crate) struct SearchBudget {
    remaining: u64,
}

impl SearchBudget {
    pub(crate) fn new(limit: u64) -> SearchBudget {
        SearchBudget { remaining: limit }
    }

    pub(crate) fn charge(&mut self, n: u64) -> Result<(), GroupoidError> {
        if self.remaining < n {
            Err(GroupoidError::SearchBudgetExceeded)
        } else {
            self.remaining -= n;
            Ok(())
        }
    }
}

/// Abstract multiplication table of an automorphism group, on ranks.
pub(crate) struct GroupTable {
    pub n: usize,
    pub mul: Vec<usize>,
    pub id: usize,
    pub order: Vec<usize>,
}

impl GroupTable {
    pub(crate) fn from_aut(aut: &AutGroup) -> GroupTable {
        let n = aut.order();
        let mut order = Vec::with_capacity(n);
        for g in 0..n {
            let mut pow = g;
            let mut k = 1;
            while pow != aut.identity_rank {
                pow = aut.mul(pow, g);
                k += 1;
            }
            order.push(k);
        }
        GroupTable {
            n,
            mul: aut.table.clone(),
            id: aut.identity_rank,
            order,
        }
    }

    fn mul_of(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.n + b]
    }

    /// Greedy generating sequence: scan elements in order, keep those not in
    /// the subgroup generated so far.
    pub(crate) fn generators(&self) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut closed = vec![false; self.n];
        closed[self.id] = true;
        let mut size = 1;
        for e in 0..self.n {
            if closed[e] {
                continue;
            }
            gens.push(e);
            // Close under multiplication.
            let mut members: Vec<usize> = (0..self.n).filter(|&x| closed[x]).collect();
            members.push(e);
            closed[e] = true;
            let mut i = 0;
            while i < members.len() {
                let x = members[i];
                for j in 0..members.len() {
                    let y = members[j];
                    for p in [self.mul_of(x, y), self.mul_of(y, x)] {
                        if !closed[p] {
                            closed[p] = true;
                            members.push(p);
                        }
                    }
                }
                i += 1;
            }
            size = members.len();
            if size == self.n {
                break;
            }
        }
        debug_assert_eq!(size, self.n);
        gens
    }
}

/// Extends generator images to a full homomorphism, or reports a conflict.
fn expand_hom(
    a: &GroupTable,
    b: &GroupTable,
    gens: &[usize],
    images: &[usize],
    budget: &mut SearchBudget,
) -> Result<Option<Vec<usize>>, GroupoidError> {
    let mut map = vec![usize::MAX; a.n];
    let mut known: Vec<usize> = Vec::with_capacity(a.n);
    let set = |map: &mut Vec<usize>, known: &mut Vec<usize>, x: usize, v: usize| -> bool {
        if map[x] == usize::MAX {
            map[x] = v;
            known.push(x);
            true
        } else {
            map[x] == v
        }
    };
    if !set(&mut map, &mut known, a.id, b.id) {
        return Ok(None);
    }
    for (&g, &img) in gens.iter().zip(images) {
        if !set(&mut map, &mut known, g, img) {
            return Ok(None);
        }
    }
    let mut i = 0;
    while i < known.len() {
        let mut j = 0;
        while j <= i {
            let (x, y) = (known[i], known[j]);
            for (p, q) in [
                (a.mul_of(x, y), b.mul_of(map[x], map[y])),
                (a.mul_of(y, x), b.mul_of(map[y], map[x])),
            ] {
                budget.charge(1)?;
                if !set(&mut map, &mut known, p, q) {
                    return Ok(None);
                }
            }
            j += 1;
        }
        i += 1;
    }
    if known.len() < a.n {
        return Ok(None);
    }
    Ok(Some(map))
}

/// Enumerates group isomorphisms `a -> b` whose image of every element `x`
/// lies in `allowed[x]` (candidate lists sorted ascending), stopping at the
/// first one the `accept` callback approves.
pub(crate) fn constrained_iso_visit(
    a: &GroupTable,
    b: &GroupTable,
    allowed: &[Vec<usize>],
    budget: &mut SearchBudget,
    accept: &mut dyn FnMut(&[usize]) -> bool,
) -> Result<Option<Vec<usize>>, GroupoidError> {
    if a.n != b.n {
        return Ok(None);
    }
    if allowed.iter().any(|c| c.is_empty()) {
        return Ok(None);
    }
    let gens = a.generators();
    let mut stack: Vec<usize> = Vec::with_capacity(gens.len());

    fn dfs(
        a: &GroupTable,
        b: &GroupTable,
        gens: &[usize],
        allowed: &[Vec<usize>],
        stack: &mut Vec<usize>,
        budget: &mut SearchBudget,
        accept: &mut dyn FnMut(&[usize]) -> bool,
    ) -> Result<Option<Vec<usize>>, GroupoidError> {
        if stack.len() == gens.len() {
            if let Some(map) = expand_hom(a, b, gens, stack, budget)? {
                let mut seen = vec![false; b.n];
                let bijective = map.iter().all(|&v| {
                    let fresh = !seen[v];
                    seen[v] = true;
                    fresh
                });
                let admissible = map
                    .iter()
                    .enumerate()
                    .all(|(x, &v)| allowed[x].binary_search(&v).is_ok());
                if bijective && admissible && accept(&map) {
                    return Ok(Some(map));
                }
            }
            return Ok(None);
        }
        let g = gens[stack.len()];
        for &cand in &allowed[g] {
            if b.order[cand] != a.order[g] {
                continue;
            }
            budget.charge(1)?;
            stack.push(cand);
            if let Some(found) = dfs(a, b, gens, allowed, stack, budget, accept)? {
                return Ok(Some(found));
            }
            stack.pop();
        }
        Ok(None)
    }

    dfs(a, b, &gens, allowed, &mut stack, budget, accept)
}

/// Plain isomorphism search: candidates restricted only by element order.
pub(crate) fn group_iso(
    a: &GroupTable,
    b: &GroupTable,
    budget: &mut SearchBudget,
) -> Result<Option<Vec<usize>>, GroupoidError> {
    if a.n != b.n {
        return Ok(None);
    }
    let allowed: Vec<Vec<usize>> = (0..a.n)
        .map(|x| (0..b.n).filter(|&y| b.order[y] == a.order[x]).collect())
        .collect();
    constrained_iso_visit(a, b, &allowed, budget, &mut |_| true)
}

/// Finds a perfect matching of `0..nx` to `0..ny` where edges (and their
/// witnesses) are produced lazily by `edge`. Deterministic: rows are
/// assigned in order, candidates tried ascending.
pub(crate) fn match_components<W: Clone>(
    nx: usize,
    ny: usize,
    mut edge: impl FnMut(usize, usize, &mut SearchBudget) -> Result<Option<W>, GroupoidError>,
    budget: &mut SearchBudget,
) -> Result<Option<Vec<(usize, W)>>, GroupoidError> {
    if nx != ny {
        return Ok(None);
    }
    let mut cache: Vec<Vec<Option<Option<W>>>> = vec![vec![None; ny]; nx];
    let mut used = vec![false; ny];
    let mut assignment: Vec<(usize, W)> = Vec::with_capacity(nx);

    fn go<W: Clone>(
        i: usize,
        nx: usize,
        ny: usize,
        edge: &mut impl FnMut(usize, usize, &mut SearchBudget) -> Result<Option<W>, GroupoidError>,
        cache: &mut Vec<Vec<Option<Option<W>>>>,
        used: &mut Vec<bool>,
        assignment: &mut Vec<(usize, W)>,
        budget: &mut SearchBudget,
    ) -> Result<bool, GroupoidError> {
        if i == nx {
            return Ok(true);
        }
        for j in 0..ny {
            if used[j] {
                continue;
            }
            if cache[i][j].is_none() {
                budget.charge(1)?;
                cache[i][j] = Some(edge(i, j, budget)?);
            }
            if let Some(Some(w)) = cache[i][j].clone() {
                used[j] = true;
                assignment.push((j, w));
                if go(i + 1, nx, ny, edge, cache, used, assignment, budget)? {
                    return Ok(true);
                }
                assignment.pop();
                used[j] = false;
            }
        }
        Ok(false)
    }

    if go(
        0,
        nx,
        ny,
        &mut edge,
        &mut cache,
        &mut used,
        &mut assignment,
        budget,
    )? {
        Ok(Some(assignment))
    } else {
        Ok(None)
    }
}

/// A full equivalence witness between two groupoids.
pub struct Equivalence {
    pub forward: GroupoidFunctor,
    pub backward: GroupoidFunctor,
    /// `backward . forward => id` on the domain.
    pub unit: NaturalIso,
    /// `forward . backward => id` on the codomain.
    pub counit: NaturalIso,
}

impl std::fmt::Debug for Equivalence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Equivalence({:?})", self.forward)
    }
}

/// Assembles a full equivalence from a component matching and per-component
/// automorphism-group isomorphisms (as rank maps).
pub(crate) fn equivalence_from_matching(
    x: &Gpd,
    y: &Gpd,
    sx: &Skeleton,
    sy: &Skeleton,
    matching: &[usize],
    thetas: &[Vec<usize>],
) -> Equivalence {
    let lx = sx.light();
    let ly = sy.light();
    let k = lx.components.len();

    let mut map_obj = vec![0u32; k];
    let mut map_mor = vec![0u32; lx.skeletal.morphism_count()];
    let mut inv_obj = vec![0u32; k];
    let mut inv_mor = vec![0u32; ly.skeletal.morphism_count()];
    for c in 0..k {
        let j = matching[c];
        map_obj[c] = j as u32;
        inv_obj[j] = c as u32;
        for (r, &tr) in thetas[c].iter().enumerate() {
            map_mor[lx.aut_offset[c] + r] = (ly.aut_offset[j] + tr) as u32;
            inv_mor[ly.aut_offset[j] + tr] = (lx.aut_offset[c] + r) as u32;
        }
    }
    let skel_map =
        GroupoidFunctor::trusted(lx.skeletal.clone(), ly.skeletal.clone(), map_obj, map_mor);
    let skel_map_inv =
        GroupoidFunctor::trusted(ly.skeletal.clone(), lx.skeletal.clone(), inv_obj, inv_mor);

    let forward = ly
        .from_skeleton
        .compose_with(&skel_map)
        .compose_with(sx.to_skeleton());
    let backward = lx
        .from_skeleton
        .compose_with(&skel_map_inv)
        .compose_with(sy.to_skeleton());

    // backward . forward sends x to its component representative; the chosen
    // transports are the natural identification with the identity functor.
    let unit = NaturalIso::trusted(
        backward.compose_with(&forward),
        GroupoidFunctor::identity(x),
        lx.transport.iter().map(|&t| t as u32).collect(),
    );
    let counit = NaturalIso::trusted(
        forward.compose_with(&backward),
        GroupoidFunctor::identity(y),
        ly.transport.iter().map(|&t| t as u32).collect(),
    );
    Equivalence {
        forward,
        backward,
        unit,
        counit,
    }
}

/// Decides equivalence of two finite groupoids; on success returns a full
/// witness (both functors and both round-trip natural isomorphisms).
pub fn are_equivalent(
    x: &Gpd,
    y: &Gpd,
    budget_limit: u64,
) -> Result<Option<Equivalence>, GroupoidError> {
    let sx = skeleton(x);
    let sy = skeleton(y);
    let mut budget = SearchBudget::new(budget_limit);
    let tables_x: Vec<GroupTable> = sx
        .components()
        .iter()
        .map(|c| GroupTable::from_aut(&c.aut))
        .collect();
    let tables_y: Vec<GroupTable> = sy
        .components()
        .iter()
        .map(|c| GroupTable::from_aut(&c.aut))
        .collect();
    let matching = match_components(
        tables_x.len(),
        tables_y.len(),
        |i, j, budget| group_iso(&tables_x[i], &tables_y[j], budget),
        &mut budget,
    )?;
    let Some(matching) = matching else {
        return Ok(None);
    };
    let (match_of, thetas): (Vec<usize>, Vec<Vec<usize>>) = matching.into_iter().unzip();
    Ok(Some(equivalence_from_matching(
        x, y, &sx, &sy, &match_of, &thetas,
    )))
}
