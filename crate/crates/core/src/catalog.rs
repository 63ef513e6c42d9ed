//! A fixed catalogue of small finite categories and seeded random functors
//! over them, for exhaustive and randomized checks.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fincat::{validate_functor, Arrow, Elem, FinCat, FinSet, SetFunctor, SetMap, Slot, Variance};
use crate::profunctor::{Coord, Profunctor};

pub type CatalogRng = ChaCha8Rng;

pub fn rng(seed: u64) -> CatalogRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn named(objects: &[&str], arrows: &[(&str, u32, u32)], ids: &[u32], then: impl Fn(u32, u32) -> Option<u32>) -> FinCat {
    let arrows = arrows.iter().map(|&(n, s, d)| Arrow { name: Arc::from(n), src: s, dst: d }).collect();
    FinCat::generate(objects.iter().map(|o| Arc::from(*o)).collect(), arrows, ids.to_vec(), then)
        .expect("catalogue entries are categories")
}

/// Composition for categories given by arrow endpoints, identities and a
/// table of the non-identity composites `(f, g, f then g)`.
fn by_table(arrows: &[(&str, u32, u32)], ids: &[u32], table: &[(u32, u32, u32)]) -> impl Fn(u32, u32) -> Option<u32> {
    let ends: Vec<(u32, u32)> = arrows.iter().map(|&(_, s, d)| (s, d)).collect();
    let ids = ids.to_vec();
    let table = table.to_vec();
    move |f, g| {
        if ends[f as usize].1 != ends[g as usize].0 {
            return None;
        }
        if ids.contains(&f) {
            return Some(g);
        }
        if ids.contains(&g) {
            return Some(f);
        }
        table.iter().find(|&&(a, b, _)| a == f && b == g).map(|&(_, _, c)| c)
    }
}

fn tabled(objects: &[&str], arrows: &[(&str, u32, u32)], ids: &[u32], table: &[(u32, u32, u32)]) -> FinCat {
    named(objects, arrows, ids, by_table(arrows, ids, table))
}

/// Every category here has at most three objects and eight arrows.
pub fn small_categories() -> Vec<(&'static str, FinCat)> {
    let mono = |names: &[&str], mul: fn(u32, u32) -> u32| FinCat::monoid(names, mul).expect("monoid");
    vec![
        ("terminal", FinCat::terminal()),
        ("discrete-2", FinCat::discrete(2)),
        ("discrete-3", FinCat::discrete(3)),
        ("walking-arrow", FinCat::walking_arrow()),
        ("chain-3", FinCat::chain(3)),
        ("parallel-pair", FinCat::parallel_pair()),
        ("z2", FinCat::z2()),
        ("z3", FinCat::cyclic(3)),
        ("idempotent", mono(&["1", "e"], |f, g| f.max(g))),
        ("left-zero-2", mono(&["1", "a", "b"], |f, g| if f == 0 { g } else { f })),
        ("right-zero-2", mono(&["1", "a", "b"], |f, g| if g == 0 { f } else { g })),
        ("klein", mono(&["1", "a", "b", "ab"], |f, g| f ^ g)),
        ("nilpotent-3", mono(&["1", "a", "aa"], |f, g| (f + g).min(2))),
        ("maps-on-2", mono(&["id", "swap", "c0", "c1"], |f, g| {
            // maps on {0, 1} as (image of 0, image of 1); apply f, then g
            let t = [(0u32, 1u32), (1, 0), (0, 0), (1, 1)];
            let (f0, f1) = t[f as usize];
            let (g0, g1) = t[g as usize];
            let img = |x: u32| if x == 0 { g0 } else { g1 };
            let h = (img(f0), img(f1));
            t.iter().position(|&p| p == h).unwrap() as u32
        })),
        ("iso", tabled(
            &["0", "1"],
            &[("id0", 0, 0), ("id1", 1, 1), ("s", 0, 1), ("t", 1, 0)],
            &[0, 1],
            &[(2, 3, 0), (3, 2, 1)],
        )),
        ("cospan", FinCat::preorder(3, |i, j| j == 2 && i != 2)),
        ("span", FinCat::preorder(3, |i, j| i == 2 && j != 2)),
        ("arrow-and-point", FinCat::preorder(3, |i, j| i == 0 && j == 1)),
        ("split-idempotent", tabled(
            &["0", "1"],
            &[("id0", 0, 0), ("id1", 1, 1), ("s", 0, 1), ("r", 1, 0), ("e", 1, 1)],
            &[0, 1],
            &[(2, 3, 0), (3, 2, 4), (4, 4, 4), (4, 3, 3), (2, 4, 2)],
        )),
        ("loop-then-arrow", tabled(
            &["0", "1"],
            &[("id0", 0, 0), ("t", 0, 0), ("id1", 1, 1), ("f", 0, 1), ("tf", 0, 1)],
            &[0, 2],
            &[(1, 1, 0), (1, 3, 4), (1, 4, 3)],
        )),
        ("fork", tabled(
            &["0", "1", "2"],
            &[("id0", 0, 0), ("id1", 1, 1), ("id2", 2, 2), ("f", 0, 1), ("g", 0, 1), ("h", 1, 2), ("hf", 0, 2), ("hg", 0, 2)],
            &[0, 1, 2],
            &[(3, 5, 6), (4, 5, 7)],
        )),
        ("coequalized-fork", tabled(
            &["0", "1", "2"],
            &[("id0", 0, 0), ("id1", 1, 1), ("id2", 2, 2), ("f", 0, 1), ("g", 0, 1), ("h", 1, 2), ("hf", 0, 2)],
            &[0, 1, 2],
            &[(3, 5, 6), (4, 5, 6)],
        )),
    ]
}

fn tuple(parts: Vec<Elem>) -> Elem {
    parts.into_iter().rev().reduce(|acc, e| Elem::pair(e, acc)).unwrap_or(Elem::Unit)
}

fn untuple(e: &Elem, n: usize) -> Vec<&Elem> {
    let mut out = Vec::with_capacity(n);
    let mut cur = e;
    for i in 0..n {
        if i + 1 == n {
            out.push(cur);
        } else {
            let (h, t) = cur.as_pair().expect("tuple");
            out.push(h);
            cur = t;
        }
    }
    out
}

/// `prod_s hom(c_s, -)` (covariant slots) or `hom(-, c_s)` (contravariant
/// ones), with elements tuples of arrow names.
pub fn representable(slots: &[Slot], at: &[u32]) -> SetFunctor {
    let n = slots.len();
    let homs = |pt: &[u32]| -> Vec<Vec<u32>> {
        (0..n)
            .map(|s| match slots[s].variance {
                Variance::Covariant => slots[s].cat.hom(at[s], pt[s]).to_vec(),
                Variance::Contravariant => slots[s].cat.hom(pt[s], at[s]).to_vec(),
            })
            .collect()
    };
    SetFunctor::tabulate(
        slots.to_vec(),
        |pt| {
            let mut out = vec![Vec::new()];
            for (s, hs) in homs(pt).into_iter().enumerate() {
                let cat = &slots[s].cat;
                out = out
                    .into_iter()
                    .flat_map(|pre| hs.iter().map(move |&h| [pre.clone(), vec![Elem::arrow(cat.arrow_name(h))]].concat()))
                    .collect();
            }
            out.into_iter().map(tuple).collect()
        },
        |s, f, _, e| {
            let mut parts: Vec<Elem> = untuple(e, n).into_iter().cloned().collect();
            let cat = &slots[s].cat;
            let Elem::Arrow(h) = &parts[s] else { unreachable!() };
            let h = cat.arrow_index(h).expect("arrow of the slot");
            let moved = match slots[s].variance {
                Variance::Covariant => cat.then(h, f),
                Variance::Contravariant => cat.then(f, h),
            }
            .expect("composable");
            parts[s] = Elem::arrow(cat.arrow_name(moved));
            Ok(tuple(parts))
        },
    )
    .expect("representables are functors")
}

pub fn terminal_functor(slots: &[Slot]) -> SetFunctor {
    SetFunctor::tabulate(slots.to_vec(), |_| vec![Elem::Unit], |_, _, _, e| Ok(e.clone())).expect("constant")
}

/// Disjoint union, each summand tagged by its position.
pub fn coproduct(slots: &[Slot], parts: &[SetFunctor]) -> SetFunctor {
    let tag = |i: usize| Elem::arrow(&format!("#{i}"));
    SetFunctor::tabulate(
        slots.to_vec(),
        |pt| {
            parts
                .iter()
                .enumerate()
                .flat_map(|(i, f)| f.value(f.point(pt)).elems().iter().map(move |e| Elem::pair(tag(i), e.clone())))
                .collect()
        },
        |s, a, pt, e| {
            let (t, inner) = e.as_pair().expect("tagged");
            let Elem::Arrow(t) = t else { unreachable!() };
            let i: usize = t[1..].parse().expect("tag");
            let f = &parts[i];
            let img = f.act_elem(s, a, f.point(pt), inner).expect("element of the summand");
            Ok(Elem::pair(tag(i), img.clone()))
        },
    )
    .expect("coproducts of functors are functors")
}

/// A functor found by sampling small random tables until the laws hold.
/// Returns `None` when no attempt succeeds.
pub fn sampled_functor(slots: &[Slot], rng: &mut CatalogRng, attempts: usize) -> Option<SetFunctor> {
    let shape = SetFunctor::shape(slots.to_vec(), vec![FinSet::empty(); slots.iter().map(|s| s.cat.n_objects()).product()]);
    for _ in 0..attempts {
        let sizes: Vec<usize> = (0..shape.n_points()).map(|_| rng.gen_range(0..=2usize)).collect();
        let values: Vec<FinSet> =
            sizes.iter().map(|&k| FinSet::new((0..k).map(|i| Elem::arrow(&format!("e{i}"))).collect())).collect();
        let mut actions = Vec::with_capacity(slots.len());
        let mut ok = true;
        for (s, slot) in slots.iter().enumerate() {
            let mut table = Vec::new();
            let others = shape.n_points() / slot.cat.n_objects();
            for f in 0..slot.cat.n_arrows() as u32 {
                let (from, _) = slot.ends(f);
                for other in 0..others {
                    let p = point_from_other(&shape, s, other, from);
                    let q = shape.target_point(s, f, p);
                    let map: SetMap = if slot.cat.is_identity(f) {
                        (0..sizes[p] as u32).collect()
                    } else if sizes[q] == 0 {
                        ok &= sizes[p] == 0;
                        Vec::new()
                    } else {
                        (0..sizes[p]).map(|_| rng.gen_range(0..sizes[q]) as u32).collect()
                    };
                    table.push(map);
                }
            }
            actions.push(table);
        }
        if !ok {
            continue;
        }
        let f = SetFunctor::from_tables(slots.to_vec(), values, actions).expect("table sizes");
        if validate_functor(&f).is_ok() {
            return Some(f);
        }
    }
    None
}

fn point_from_other(f: &SetFunctor, s: usize, other: usize, obj: u32) -> usize {
    let st = f.stride(s);
    let dim = f.slots()[s].cat.n_objects();
    (other / st) * st * dim + obj as usize * st + other % st
}

/// A random functor: a coproduct of up to three summands, each a
/// representable, the terminal functor, or a sampled one.
pub fn random_functor(slots: &[Slot], rng: &mut CatalogRng) -> SetFunctor {
    let k = rng.gen_range(1..=3);
    let mut parts = Vec::with_capacity(k);
    while parts.len() < k {
        match rng.gen_range(0..4) {
            0 => parts.push(terminal_functor(slots)),
            1 => {
                if let Some(f) = sampled_functor(slots, rng, 64) {
                    parts.push(f);
                }
            }
            _ => {
                let at: Vec<u32> = slots.iter().map(|s| rng.gen_range(0..s.cat.n_objects() as u32)).collect();
                parts.push(representable(slots, &at));
            }
        }
    }
    if parts.len() == 1 {
        return parts.pop().unwrap();
    }
    coproduct(slots, &parts)
}

/// A random presheaf on `cat` (one contravariant slot).
pub fn random_presheaf(cat: &Arc<FinCat>, rng: &mut CatalogRng) -> SetFunctor {
    random_functor(&[Slot::new(cat.clone(), Variance::Contravariant)], rng)
}

/// Two profunctors that compose over `o`: both share residual coordinates
/// `d0, d1, ..`; `o` is contravariant in the first and covariant in the
/// second.
pub fn random_composable_pair(
    cats: &[Arc<FinCat>],
    rng: &mut CatalogRng,
    max_residual: usize,
) -> (Profunctor, Profunctor, Coord) {
    let over = cats.choose(rng).expect("cats").clone();
    let n_res = rng.gen_range(0..=max_residual);
    let mut coords: Vec<Coord> = Vec::new();
    let mut slots: Vec<Slot> = Vec::new();
    for i in 0..n_res {
        let v = if rng.gen_bool(0.5) { Variance::Covariant } else { Variance::Contravariant };
        coords.push(Coord::Hyp(crate::syntax::Name::new(format!("d{i}"))));
        slots.push(Slot::new(cats.choose(rng).unwrap().clone(), v));
    }
    let o = Coord::Hyp(crate::syntax::Name::new("o"));
    let mk = |variance, rng: &mut CatalogRng| {
        let mut c = coords.clone();
        let mut s = slots.clone();
        c.push(o.clone());
        s.push(Slot::new(over.clone(), variance));
        Profunctor::new(c, random_functor(&s, rng)).expect("layout")
    };
    let left = mk(Variance::Contravariant, rng);
    let right = mk(Variance::Covariant, rng);
    (left, right, o)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalogue_is_small_and_valid() {
        let cats = small_categories();
        assert!(cats.len() >= 20);
        for (name, c) in &cats {
            assert!(c.n_objects() <= 3 && c.n_arrows() <= 8, "{name}");
            c.validate().unwrap();
        }
        let mut names: Vec<_> = cats.iter().map(|(n, _)| *n).collect();
        names.dedup();
        assert_eq!(names.len(), cats.len());
    }

    #[test]
    fn random_functors_are_functors() {
        let mut r = rng(7);
        for (_, c) in small_categories() {
            let c = Arc::new(c);
            for _ in 0..4 {
                validate_functor(&random_presheaf(&c, &mut r)).unwrap();
            }
            let slots = [Slot::new(c.clone(), Variance::Covariant), Slot::new(c.clone(), Variance::Contravariant)];
            validate_functor(&random_functor(&slots, &mut r)).unwrap();
        }
    }

    #[test]
    fn seeds_reproduce() {
        let c = Arc::new(FinCat::parallel_pair());
        let a = random_presheaf(&c, &mut rng(3));
        let b = random_presheaf(&c, &mut rng(3));
        assert_eq!(a, b);
    }
}
