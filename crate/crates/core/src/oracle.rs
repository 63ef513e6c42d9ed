//! A slow, independent computation of composite classes.
//!
//! The relation generated by `(P(f) p, q) ~ (p, Q(f) q)` is closed by
//! boolean transitive closure over an explicit matrix, with no shared code
//! path with the engine's coend.

use std::collections::HashMap;

use crate::fincat::Elem;
use crate::profunctor::{Composite, Coord, Profunctor};

/// One class: members `(diagonal object, left element, right element)`,
/// sorted.
pub type Class = Vec<(u32, Elem, Elem)>;

/// Classes of each residual point, in canonical order.
pub type Partition = Vec<Vec<Class>>;

fn canonical(mut classes: Vec<Class>) -> Vec<Class> {
    for c in &mut classes {
        c.sort();
    }
    classes.sort();
    classes
}

/// Brute-force classes of `left ⊗ right` over `over`, residual points
/// numbered like the engine's result (left coordinates without `over`, last
/// one fastest). Returns `None` when the pair does not compose.
pub fn composite_partition(left: &Profunctor, right: &Profunctor, over: &Coord) -> Option<Partition> {
    let ol = left.slot_of(over)?;
    let or = right.slot_of(over)?;
    let cat = left.slot(ol).cat.clone();
    if right.slot(or).cat != cat {
        return None;
    }
    let res_l: Vec<usize> = (0..left.coords().len()).filter(|&s| s != ol).collect();
    let res_r: Vec<usize> = (0..right.coords().len()).filter(|&s| s != or).collect();
    if res_l.len() != res_r.len() {
        return None;
    }
    let dims: Vec<u32> = res_l.iter().map(|&s| left.slot(s).cat.n_objects() as u32).collect();
    let n_res: usize = dims.iter().map(|&d| d as usize).product();

    let full = |res: &[usize], n: usize, at: usize, delta: &[u32], a: u32| {
        let mut c = vec![0; n];
        for (k, &s) in res.iter().enumerate() {
            c[s] = delta[k];
        }
        c[at] = a;
        c
    };

    let mut out = Vec::with_capacity(n_res);
    for r in 0..n_res {
        let mut delta = vec![0u32; dims.len()];
        let mut rem = r;
        for k in (0..dims.len()).rev() {
            delta[k] = (rem % dims[k] as usize) as u32;
            rem /= dims[k] as usize;
        }
        let lp = |a: u32| left.body().point(&full(&res_l, left.coords().len(), ol, &delta, a));
        let rp = |a: u32| right.body().point(&full(&res_r, right.coords().len(), or, &delta, a));

        let mut elems: Vec<(u32, Elem, Elem)> = Vec::new();
        for a in 0..cat.n_objects() as u32 {
            for l in left.value(lp(a)).elems() {
                for q in right.value(rp(a)).elems() {
                    elems.push((a, l.clone(), q.clone()));
                }
            }
        }
        let index: HashMap<&(u32, Elem, Elem), usize> = elems.iter().enumerate().map(|(i, e)| (e, i)).collect();
        let n = elems.len();
        let mut rel = vec![vec![false; n]; n];
        for (i, row) in rel.iter_mut().enumerate() {
            row[i] = true;
        }
        for f in 0..cat.n_arrows() as u32 {
            let (a, b) = (cat.src(f), cat.dst(f));
            for p in left.value(lp(b)).elems() {
                let pl = left.body().act_elem(ol, f, lp(b), p).expect("left action").clone();
                for q in right.value(rp(a)).elems() {
                    let qr = right.body().act_elem(or, f, rp(a), q).expect("right action").clone();
                    let i = index[&(a, pl.clone(), q.clone())];
                    let j = index[&(b, p.clone(), qr)];
                    rel[i][j] = true;
                    rel[j][i] = true;
                }
            }
        }
        for k in 0..n {
            let through = rel[k].clone();
            for row in rel.iter_mut().filter(|row| row[k]) {
                for (x, &y) in row.iter_mut().zip(&through) {
                    *x |= y;
                }
            }
        }
        let mut seen = vec![false; n];
        let mut classes = Vec::new();
        for i in 0..n {
            if seen[i] {
                continue;
            }
            let class: Class = (0..n).filter(|&j| rel[i][j]).map(|j| elems[j].clone()).collect();
            for j in 0..n {
                if rel[i][j] {
                    seen[j] = true;
                }
            }
            classes.push(class);
        }
        out.push(canonical(classes));
    }
    Some(out)
}

/// The engine's classes in the same canonical form.
pub fn engine_partition(c: &Composite) -> Partition {
    (0..c.result.n_points())
        .map(|r| {
            let classes = (0..c.result.value(r).len() as u32)
                .map(|k| c.members(r, k).map(|(a, l, q)| (a, l.clone(), q.clone())).collect())
                .collect();
            canonical(classes)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{random_composable_pair, rng, small_categories};
    use crate::profunctor::compose_over;
    use std::sync::Arc;

    #[test]
    fn agrees_with_the_engine_on_random_pairs() {
        let cats: Vec<_> = small_categories().into_iter().map(|(_, c)| Arc::new(c)).collect();
        let mut r = rng(11);
        for _ in 0..25 {
            let (p, q, o) = random_composable_pair(&cats, &mut r, 1);
            let c = compose_over(&p, &q, &o).unwrap();
            assert_eq!(composite_partition(&p, &q, &o).unwrap(), engine_partition(&c));
        }
    }
}
