//! Cardinality-weighted linearization of spans, integration over finite
//! groupoids, (co)limits of local systems, and the norm map.
//!
//! Direction convention: the span `X <- Z -> Y` becomes a matrix
//! `Q^{pi0(X)} -> Q^{pi0(Y)}` (pull back along the left leg, push forward
//! along the right), so matrices compose in diagram order. The pushforward
//! weights every fiber component by its homotopy cardinality; the
//! unweighted alternative fails the snake identity (see the tests), which
//! pins this convention.

use crate::groupoid::{homotopy_fiber, skeleton_light, Gpd};
use crate::linalg::{rref_rank_kernel, RatMatrix, Rational};
use crate::local_system::LocalSystem;
use crate::par;
use crate::span::{duality_spans, Span};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LinearizeError {
    #[error("family length mismatch: {0}")]
    LengthMismatch(String),
    #[error("norm map failed to descend to coinvariants -> invariants")]
    DescentFailure,
}

/// Integrates a per-component family of vectors against the groupoid's
/// component cardinalities: the weighted sum over pi0 with weights
/// 1/|Aut|.
pub fn integrate(
    x: &Gpd,
    family: &[Vec<Rational>],
) -> Result<Vec<Rational>, LinearizeError> {
    let light = skeleton_light(x);
    if family.len() != light.components.len() {
        return Err(LinearizeError::LengthMismatch(format!(
            "{} vectors supplied for {} components",
            family.len(),
            light.components.len()
        )));
    }
    let d = family.first().map_or(0, |v| v.len());
    if family.iter().any(|v| v.len() != d) {
        return Err(LinearizeError::LengthMismatch(
            "family vectors have differing lengths".into(),
        ));
    }
    let mut out = vec![Rational::zero(); d];
    for (comp, vector) in light.components.iter().zip(family) {
        let weight = Rational::new(1, comp.aut.order() as i64);
        for (acc, v) in out.iter_mut().zip(vector) {
            *acc += &weight * v;
        }
    }
    Ok(out)
}

/// The matrix of a span on component bases: entry `(yc, xc)` sums the
/// homotopy cardinalities of the fiber components of the right leg over
/// `yc` whose left-leg image lies in `xc`.
pub fn linearize_span(s: &Span) -> RatMatrix {
    let sk_x = skeleton_light(s.source());
    let sk_y = skeleton_light(s.target());
    let cols = sk_x.components.len();
    let rows: Vec<Vec<Rational>> = par::map_range(sk_y.components.len(), |j| {
        let y_rep = sk_y.components[j].rep;
        let (fiber, incl) = homotopy_fiber(s.right(), y_rep).expect("component rep in range");
        let fiber_sk = skeleton_light(&fiber);
        let mut row = vec![Rational::zero(); cols];
        for comp in &fiber_sk.components {
            let apex_obj = incl.obj(comp.rep);
            let xc = sk_x.comp_of[s.left().obj(apex_obj)];
            row[xc] += Rational::new(1, comp.aut.order() as i64);
        }
        row
    });
    if sk_y.components.is_empty() {
        RatMatrix::zeros(0, cols)
    } else {
        RatMatrix::from_rows(rows)
    }
}

/// The trace form: the row linearization of the trace span reshaped into a
/// square matrix over `pi0(X)`, pairing components through the diagonal.
pub fn trace_form(x: &Gpd) -> RatMatrix {
    let (tr, _) = duality_spans(x);
    let lin = linearize_span(&tr);
    let xx = tr.source().clone();
    let sk_x = skeleton_light(x);
    let sk_xx = skeleton_light(&xx);
    let n = x.object_count();
    let k = sk_x.components.len();
    let mut out = RatMatrix::zeros(k, k);
    for (pc, comp) in sk_xx.components.iter().enumerate() {
        let (i, j) = (sk_x.comp_of[comp.rep / n], sk_x.comp_of[comp.rep % n]);
        out.set(i, j, lin.get(0, pc).clone());
    }
    out
}

/// Per-component data for a local system: the automorphism action on the
/// representative fiber.
struct ComponentAction {
    dim: usize,
    mats: Vec<RatMatrix>,
    identity_rank: usize,
}

fn component_actions(l: &LocalSystem) -> (crate::groupoid::SkeletonLight, Vec<ComponentAction>) {
    let light = skeleton_light(l.base());
    let actions = light
        .components
        .iter()
        .map(|c| ComponentAction {
            dim: l.dim(c.rep),
            mats: c.aut.elements.iter().map(|&e| l.action(e)).collect(),
            identity_rank: c.aut.identity_rank,
        })
        .collect();
    (light, actions)
}

/// Coinvariants presentation: the quotient dimension of each component's
/// fiber by the span of `v - g.v`, assembled over all components, with a
/// projection matrix per object of the base.
pub struct ColimitPresentation {
    pub dim: usize,
    pub projections: Vec<RatMatrix>,
}

/// Invariants presentation: the joint kernel of `g - id` per component,
/// with an inclusion matrix per object of the base.
pub struct LimitPresentation {
    pub dim: usize,
    pub inclusions: Vec<RatMatrix>,
}

fn coinvariants_of(action: &ComponentAction) -> (RatMatrix, Vec<usize>) {
    let d = action.dim;
    // Row space spanned by the columns of (g - id) over all group elements.
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    for (r, g) in action.mats.iter().enumerate() {
        if r == action.identity_rank {
            continue;
        }
        for j in 0..d {
            let mut row: Vec<Rational> = (0..d).map(|i| g.get(i, j).clone()).collect();
            row[j] = &row[j] - &Rational::one();
            rows.push(row);
        }
    }
    let mat = if rows.is_empty() {
        RatMatrix::zeros(0, d)
    } else {
        RatMatrix::from_rows(rows)
    };
    reduce_mod_rowspace(&mat, d)
}

/// Returns `(Q, free)` where `free` lists the non-pivot coordinates of the
/// row space of `mat` and `Q` maps a vector to its reduced free coordinates.
fn reduce_mod_rowspace(mat: &RatMatrix, d: usize) -> (RatMatrix, Vec<usize>) {
    // Reduced row echelon form via the public elimination interface: solve
    // is not enough, we need the rows, so run a small Gauss-Jordan here on
    // rational arithmetic (the matrices involved are component-sized).
    let mut rows: Vec<Vec<Rational>> = (0..mat.rows()).map(|i| mat.row(i).to_vec()).collect();
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0usize;
    for c in 0..d {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(p, r);
        let inv = rows[r][c].inverse().expect("pivot nonzero");
        for v in rows[r].iter_mut() {
            *v = &inv * v;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for j in 0..d {
                    let sub = &f * &rows[r][j];
                    rows[i][j] = &rows[i][j] - &sub;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    let free: Vec<usize> = (0..d).filter(|c| !pivots.contains(c)).collect();
    let mut q = RatMatrix::zeros(free.len(), d);
    for j in 0..d {
        // Reduce e_j modulo the row space, keep free coordinates.
        let mut v = vec![Rational::zero(); d];
        v[j] = Rational::one();
        for (ri, &pc) in pivots.iter().enumerate() {
            let coef = v[pc].clone();
            if !coef.is_zero() {
                for col in 0..d {
                    let sub = &coef * &rows[ri][col];
                    v[col] = &v[col] - &sub;
                }
            }
        }
        for (qi, &fc) in free.iter().enumerate() {
            q.set(qi, j, v[fc].clone());
        }
    }
    (q, free)
}

fn invariants_of(action: &ComponentAction) -> RatMatrix {
    let d = action.dim;
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    for (r, g) in action.mats.iter().enumerate() {
        if r == action.identity_rank {
            continue;
        }
        for i in 0..d {
            let mut row: Vec<Rational> = (0..d).map(|j| g.get(i, j).clone()).collect();
            row[i] = &row[i] - &Rational::one();
            rows.push(row);
        }
    }
    let mat = if rows.is_empty() {
        RatMatrix::zeros(0, d)
    } else {
        RatMatrix::from_rows(rows)
    };
    let (_, kernel, _) = rref_rank_kernel(&mat);
    kernel
}

/// Colimit (coinvariants) of a local system, with per-object projections
/// into the assembled colimit space.
pub fn colimit_ls(l: &LocalSystem) -> ColimitPresentation {
    let (light, actions) = component_actions(l);
    let per_comp: Vec<(RatMatrix, Vec<usize>)> =
        actions.iter().map(coinvariants_of).collect();
    let offsets: Vec<usize> = {
        let mut acc = 0;
        per_comp
            .iter()
            .map(|(q, _)| {
                let o = acc;
                acc += q.rows();
                o
            })
            .collect()
    };
    let total: usize = per_comp.iter().map(|(q, _)| q.rows()).sum();
    let base = l.base();
    let projections = (0..base.object_count())
        .map(|x| {
            let c = light.comp_of[x];
            let (q, _) = &per_comp[c];
            let back = l.action(base.inverse_of(light.transport[x]));
            let block = q.mul(&back);
            let mut m = RatMatrix::zeros(total, l.dim(x));
            for i in 0..block.rows() {
                for j in 0..block.cols() {
                    m.set(offsets[c] + i, j, block.get(i, j).clone());
                }
            }
            m
        })
        .collect();
    ColimitPresentation {
        dim: total,
        projections,
    }
}

/// Limit (invariants) of a local system, with per-object inclusions from
/// the assembled limit space.
pub fn limit_ls(l: &LocalSystem) -> LimitPresentation {
    let (light, actions) = component_actions(l);
    let per_comp: Vec<RatMatrix> = actions.iter().map(invariants_of).collect();
    let offsets: Vec<usize> = {
        let mut acc = 0;
        per_comp
            .iter()
            .map(|k| {
                let o = acc;
                acc += k.cols();
                o
            })
            .collect()
    };
    let total: usize = per_comp.iter().map(|k| k.cols()).sum();
    let base = l.base();
    let inclusions = (0..base.object_count())
        .map(|x| {
            let c = light.comp_of[x];
            let fwd = l.action(light.transport[x]);
            let block = fwd.mul(&per_comp[c]);
            let mut m = RatMatrix::zeros(l.dim(x), total);
            for i in 0..block.rows() {
                for j in 0..block.cols() {
                    m.set(i, offsets[c] + j, block.get(i, j).clone());
                }
            }
            m
        })
        .collect();
    LimitPresentation {
        dim: total,
        inclusions,
    }
}

/// The norm map of a local system: the blockwise sum of the action over
/// each automorphism group, descended to a map from coinvariants to
/// invariants, with the semiadditivity verdict.
pub struct NormReport {
    pub base: Gpd,
    pub system: LocalSystem,
    pub colim_dim: usize,
    pub lim_dim: usize,
    pub norm: RatMatrix,
    pub is_iso: bool,
}

pub fn norm_map(l: &LocalSystem) -> Result<NormReport, LinearizeError> {
    let (_light, actions) = component_actions(l);
    let mut blocks: Vec<RatMatrix> = Vec::with_capacity(actions.len());
    for action in &actions {
        let d = action.dim;
        let (q, free) = coinvariants_of(action);
        let kernel = invariants_of(action);
        let mut total = RatMatrix::zeros(d, d);
        for g in &action.mats {
            total = total.add(g);
        }
        // Solve kernel * x = total * e_s for each coinvariant basis vector.
        let (_, _, solver) = rref_rank_kernel(&kernel);
        let mut block = RatMatrix::zeros(kernel.cols(), free.len());
        for (col, &s) in free.iter().enumerate() {
            let mut e = vec![Rational::zero(); d];
            e[s] = Rational::one();
            let rhs = total.apply(&e);
            let x = solver
                .solve(&rhs)
                .map_err(|_| LinearizeError::DescentFailure)?
                .ok_or(LinearizeError::DescentFailure)?;
            for (row, v) in x.into_iter().enumerate() {
                block.set(row, col, v);
            }
        }
        // Well-definedness: the descended block must reproduce the sum.
        if kernel.mul(&block).mul(&q) != total {
            return Err(LinearizeError::DescentFailure);
        }
        blocks.push(block);
    }
    let colim_dim: usize = blocks.iter().map(|b| b.cols()).sum();
    let lim_dim: usize = blocks.iter().map(|b| b.rows()).sum();
    let mut norm = RatMatrix::zeros(lim_dim, colim_dim);
    let (mut ro, mut co) = (0, 0);
    for b in &blocks {
        for i in 0..b.rows() {
            for j in 0..b.cols() {
                norm.set(ro + i, co + j, b.get(i, j).clone());
            }
        }
        ro += b.rows();
        co += b.cols();
    }
    let is_iso = colim_dim == lim_dim && norm.rank() == lim_dim;
    Ok(NormReport {
        base: l.base().clone(),
        system: l.clone(),
        colim_dim,
        lim_dim,
        norm,
        is_iso,
    })
}
