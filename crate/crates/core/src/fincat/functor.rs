use std::sync::Arc;

use super::{Elem, FinCat, FinError, FinSet, SetMap};
use crate::par;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variance {
    Covariant,
    Contravariant,
}

impl Variance {
    pub fn flip(self) -> Variance {
        match self {
            Variance::Covariant => Variance::Contravariant,
            Variance::Contravariant => Variance::Covariant,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Slot {
    pub cat: Arc<FinCat>,
    pub variance: Variance,
}

impl Slot {
    pub fn new(cat: Arc<FinCat>, variance: Variance) -> Slot {
        Slot { cat, variance }
    }

    /// The domain and codomain objects of the action of `f` in this slot.
    pub fn ends(&self, f: u32) -> (u32, u32) {
        let (s, d) = (self.cat.src(f), self.cat.dst(f));
        match self.variance {
            Variance::Covariant => (s, d),
            Variance::Contravariant => (d, s),
        }
    }
}

/// A functor from a product of finite categories (each slot either
/// covariant or contravariant) to finite sets.
///
/// Points are numbered in mixed radix with the last slot least significant.
/// The action of arrow `f` in slot `s` is stored once per assignment of the
/// other slots.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetFunctor {
    slots: Vec<Slot>,
    dims: Vec<usize>,
    strides: Vec<usize>,
    values: Vec<FinSet>,
    actions: Vec<Vec<SetMap>>,
}

fn layout(slots: &[Slot]) -> (Vec<usize>, Vec<usize>, usize) {
    let dims: Vec<usize> = slots.iter().map(|s| s.cat.n_objects()).collect();
    let mut strides = vec![1; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    let points = dims.iter().product();
    (dims, strides, points)
}

impl SetFunctor {
    /// Tabulates a functor. `values` gives the set at each point; `action`
    /// gives the image of an element under arrow `f` of slot `s`, where the
    /// point passed is the domain of that action.
    pub fn tabulate<V, A>(slots: Vec<Slot>, values: V, action: A) -> Result<SetFunctor, FinError>
    where
        V: Fn(&[u32]) -> Vec<Elem> + Sync + Send,
        A: Fn(usize, u32, &[u32], &Elem) -> Result<Elem, FinError> + Sync + Send,
    {
        let (dims, strides, points) = layout(&slots);
        let mut f = SetFunctor { slots, dims, strides, values: Vec::new(), actions: Vec::new() };
        f.values = par::map_indices(points, |p| FinSet::new(values(&f.coords(p))));
        let mut actions = Vec::with_capacity(f.slots.len());
        for s in 0..f.slots.len() {
            let others = f.others(s);
            let m = f.slots[s].cat.n_arrows();
            let table = par::try_map_indices(m * others, |i| {
                let (arrow, other) = ((i / others) as u32, i % others);
                let (from, _) = f.slots[s].ends(arrow);
                let p = f.point_from_other(s, other, from);
                let q = f.target_point(s, arrow, p);
                let pt = f.coords(p);
                let target = &f.values[q];
                f.values[p]
                    .elems()
                    .iter()
                    .map(|e| {
                        let img = action(s, arrow, &pt, e)?;
                        target.index_of(&img).ok_or_else(|| FinError::BadAction {
                            slot: s,
                            arrow: f.slots[s].cat.arrow_name(arrow).to_string(),
                            point: pt.clone(),
                            detail: format!("image `{img}` of `{e}` is not in the target set"),
                        })
                    })
                    .collect::<Result<SetMap, FinError>>()
            })?;
            actions.push(table);
        }
        f.actions = actions;
        Ok(f)
    }

    /// Assembles a functor from precomputed tables without checking them.
    pub fn from_tables(slots: Vec<Slot>, values: Vec<FinSet>, actions: Vec<Vec<SetMap>>) -> Result<SetFunctor, FinError> {
        let (dims, strides, points) = layout(&slots);
        if values.len() != points || actions.len() != slots.len() {
            return Err(FinError::Malformed(format!(
                "{} values and {} action tables for {points} points and {} slots",
                values.len(),
                actions.len(),
                slots.len()
            )));
        }
        let f = SetFunctor { slots, dims, strides, values, actions };
        for s in 0..f.slots.len() {
            if f.actions[s].len() != f.slots[s].cat.n_arrows() * f.others(s) {
                return Err(FinError::Malformed(format!("action table of slot {s} has the wrong size")));
            }
        }
        Ok(f)
    }

    /// Values without actions, for point arithmetic while a functor is
    /// being assembled.
    pub fn shape(slots: Vec<Slot>, values: Vec<FinSet>) -> SetFunctor {
        let (dims, strides, points) = layout(&slots);
        debug_assert_eq!(values.len(), points);
        SetFunctor { actions: vec![Vec::new(); slots.len()], slots, dims, strides, values }
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn n_points(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[FinSet] {
        &self.values
    }

    pub fn value(&self, p: usize) -> &FinSet {
        &self.values[p]
    }

    pub fn coords(&self, p: usize) -> Vec<u32> {
        (0..self.slots.len()).map(|s| self.coord(p, s)).collect()
    }

    pub fn coord(&self, p: usize, s: usize) -> u32 {
        ((p / self.strides[s]) % self.dims[s]) as u32
    }

    pub fn point(&self, coords: &[u32]) -> usize {
        debug_assert_eq!(coords.len(), self.slots.len());
        coords.iter().zip(&self.strides).map(|(&c, &st)| c as usize * st).sum()
    }

    pub fn stride(&self, s: usize) -> usize {
        self.strides[s]
    }

    /// The point `p` with slot `s` set to `obj`.
    pub fn with_coord(&self, p: usize, s: usize, obj: u32) -> usize {
        p - self.coord(p, s) as usize * self.strides[s] + obj as usize * self.strides[s]
    }

    fn others(&self, s: usize) -> usize {
        self.values.len() / self.dims[s].max(1)
    }

    fn other_index(&self, p: usize, s: usize) -> usize {
        let st = self.strides[s];
        (p / (st * self.dims[s])) * st + p % st
    }

    fn point_from_other(&self, s: usize, other: usize, obj: u32) -> usize {
        let st = self.strides[s];
        (other / st) * st * self.dims[s] + obj as usize * st + other % st
    }

    /// Codomain point of the action of `f` in slot `s` out of point `p`.
    pub fn target_point(&self, s: usize, f: u32, p: usize) -> usize {
        let (from, to) = self.slots[s].ends(f);
        debug_assert_eq!(self.coord(p, s), from);
        self.with_coord(p, s, to)
    }

    /// The action of `f` in slot `s` out of point `p`, whose slot `s`
    /// coordinate must be the domain of that action.
    pub fn action(&self, s: usize, f: u32, p: usize) -> &SetMap {
        debug_assert_eq!(self.coord(p, s), self.slots[s].ends(f).0);
        &self.actions[s][f as usize * self.others(s) + self.other_index(p, s)]
    }

    /// Image of element index `i` at point `p` under arrow `f` of slot `s`.
    pub fn act(&self, s: usize, f: u32, p: usize, i: u32) -> u32 {
        self.action(s, f, p)[i as usize]
    }

    /// Image of an element under arrow `f` of slot `s`, by value.
    pub fn act_elem(&self, s: usize, f: u32, p: usize, e: &Elem) -> Option<&Elem> {
        let i = self.values[p].index_of(e)?;
        let q = self.target_point(s, f, p);
        Some(self.values[q].get(self.act(s, f, p, i)))
    }

    /// Replaces one entry of an action table. Intended for building
    /// deliberately broken functors in tests.
    pub fn override_action(&mut self, s: usize, f: u32, p: usize, i: u32, image: u32) {
        let k = f as usize * self.others(s) + self.other_index(p, s);
        self.actions[s][k][i as usize] = image;
    }

    /// The same tables over new slots, each of which must see every arrow
    /// with the same endpoints as the slot it replaces. Used to pass to an
    /// opposite category with flipped variance.
    pub fn with_slots(&self, slots: Vec<Slot>) -> Result<SetFunctor, FinError> {
        let same = slots.len() == self.slots.len()
            && slots.iter().zip(&self.slots).all(|(new, old)| {
                new.cat.n_objects() == old.cat.n_objects()
                    && new.cat.n_arrows() == old.cat.n_arrows()
                    && (0..old.cat.n_arrows() as u32).all(|f| new.ends(f) == old.ends(f))
            });
        if !same {
            return Err(FinError::Interface("replacement slots do not match the action tables".into()));
        }
        Ok(SetFunctor { slots, ..self.clone() })
    }

    pub fn total_size(&self) -> usize {
        self.values.iter().map(|v| v.len()).sum()
    }

    fn describe(&self, p: usize) -> Vec<u32> {
        self.coords(p)
    }
}

/// Checks functoriality exhaustively: every action is a well-formed map,
/// identities act trivially, composites act as composites, and actions in
/// different slots commute.
pub fn validate_functor(f: &SetFunctor) -> Result<(), FinError> {
    let n = f.slots.len();
    for s in 0..n {
        let cat = &f.slots[s].cat;
        let m = cat.n_arrows() as u32;
        par::try_for_indices(f.n_points(), |p| {
            let obj = f.coord(p, s);
            for a in 0..m {
                if f.slots[s].ends(a).0 != obj {
                    continue;
                }
                let q = f.target_point(s, a, p);
                let map = f.action(s, a, p);
                if map.len() != f.values[p].len() || map.iter().any(|&j| j as usize >= f.values[q].len()) {
                    return Err(FinError::BadAction {
                        slot: s,
                        arrow: cat.arrow_name(a).to_string(),
                        point: f.describe(p),
                        detail: "map has the wrong shape".into(),
                    });
                }
            }
            let id = cat.id(obj);
            if f.action(s, id, p).iter().enumerate().any(|(i, &j)| i as u32 != j) {
                return Err(FinError::FunctorIdentity { slot: s, arrow: cat.arrow_name(id).to_string(), point: f.describe(p) });
            }
            // composable pairs in the order the action applies them
            for a in 0..m {
                if f.slots[s].ends(a).0 != obj {
                    continue;
                }
                let q = f.target_point(s, a, p);
                for b in 0..m {
                    if f.slots[s].ends(b).0 != f.coord(q, s) {
                        continue;
                    }
                    let composite = match f.slots[s].variance {
                        super::Variance::Covariant => cat.then(a, b),
                        super::Variance::Contravariant => cat.then(b, a),
                    }
                    .expect("composable in a validated category");
                    let first = f.action(s, a, p);
                    let second = f.action(s, b, q);
                    let whole = f.action(s, composite, p);
                    if (0..first.len()).any(|i| second[first[i] as usize] != whole[i]) {
                        return Err(FinError::FunctorComposition {
                            slot: s,
                            f: cat.arrow_name(a).to_string(),
                            g: cat.arrow_name(b).to_string(),
                            point: f.describe(p),
                        });
                    }
                }
            }
            Ok(())
        })?;
    }
    for s in 0..n {
        for t in s + 1..n {
            par::try_for_indices(f.n_points(), |p| {
                let (cs, ct) = (&f.slots[s].cat, &f.slots[t].cat);
                for a in 0..cs.n_arrows() as u32 {
                    if f.slots[s].ends(a).0 != f.coord(p, s) || cs.is_identity(a) {
                        continue;
                    }
                    let pa = f.target_point(s, a, p);
                    for b in 0..ct.n_arrows() as u32 {
                        if f.slots[t].ends(b).0 != f.coord(p, t) || ct.is_identity(b) {
                            continue;
                        }
                        let pb = f.target_point(t, b, p);
                        let via_a = (f.action(s, a, p), f.action(t, b, pa));
                        let via_b = (f.action(t, b, p), f.action(s, a, pb));
                        for i in 0..f.values[p].len() {
                            if via_a.1[via_a.0[i] as usize] != via_b.1[via_b.0[i] as usize] {
                                return Err(FinError::FunctorInterchange {
                                    s,
                                    t,
                                    f: cs.arrow_name(a).to_string(),
                                    g: ct.arrow_name(b).to_string(),
                                    point: f.describe(p),
                                });
                            }
                        }
                    }
                }
                Ok(())
            })?;
        }
    }
    Ok(())
}

/// `hom(a, b)` at the point `(b, a)`: covariant in the first slot,
/// contravariant in the second, acting by composition.
pub fn hom_functor(c: &Arc<FinCat>) -> SetFunctor {
    let slots = vec![Slot::new(c.clone(), Variance::Covariant), Slot::new(c.clone(), Variance::Contravariant)];
    SetFunctor::tabulate(
        slots,
        |pt| c.hom(pt[1], pt[0]).iter().map(|&h| Elem::Arrow(c.arrow(h).name.clone())).collect(),
        |s, f, _, e| {
            let Elem::Arrow(name) = e else { unreachable!("hom sets hold arrows") };
            let h = c.arrow_index(name).expect("arrow of this category");
            let img = if s == 0 { c.then(h, f) } else { c.then(f, h) };
            Ok(Elem::Arrow(c.arrow(img.expect("composable")).name.clone()))
        },
    )
    .expect("hom is a functor")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cat(c: FinCat) -> Arc<FinCat> {
        Arc::new(c)
    }

    #[test]
    fn hom_of_discrete() {
        let c = cat(FinCat::discrete(2));
        let h = hom_functor(&c);
        validate_functor(&h).unwrap();
        for b in 0..2u32 {
            for a in 0..2u32 {
                assert_eq!(h.value(h.point(&[b, a])).len(), usize::from(a == b));
            }
        }
    }

    #[test]
    fn hom_of_walking_arrow() {
        let c = cat(FinCat::walking_arrow());
        let h = hom_functor(&c);
        validate_functor(&h).unwrap();
        assert_eq!(h.value(h.point(&[1, 0])).len(), 1);
        assert_eq!(h.value(h.point(&[0, 1])).len(), 0);
    }

    #[test]
    fn hom_validates_on_standard_categories() {
        for c in [FinCat::terminal(), FinCat::z2(), FinCat::parallel_pair(), FinCat::chain(3), FinCat::cyclic(3)] {
            validate_functor(&hom_functor(&cat(c))).unwrap();
        }
    }

    #[test]
    fn constant_singleton_validates() {
        let c = cat(FinCat::parallel_pair());
        let f = SetFunctor::tabulate(
            vec![Slot::new(c.clone(), Variance::Covariant), Slot::new(c, Variance::Contravariant)],
            |_| vec![Elem::Unit],
            |_, _, _, e| Ok(e.clone()),
        )
        .unwrap();
        validate_functor(&f).unwrap();
        assert_eq!(f.n_points(), 4);
    }

    #[test]
    fn corrupted_action_is_caught() {
        let c = cat(FinCat::z2());
        let mut h = hom_functor(&c);
        let r = c.arrow_index("r1").unwrap();
        let p = h.point(&[0, 0]);
        h.override_action(0, r, p, 0, 0);
        let err = validate_functor(&h).unwrap_err();
        assert!(err.to_string().contains("r1") || err.to_string().contains("e"), "{err}");
    }

    #[test]
    fn point_indexing_round_trips() {
        let f = SetFunctor::tabulate(
            vec![
                Slot::new(cat(FinCat::discrete(2)), Variance::Covariant),
                Slot::new(cat(FinCat::discrete(3)), Variance::Contravariant),
            ],
            |_| vec![],
            |_, _, _, e| Ok(e.clone()),
        )
        .unwrap();
        for p in 0..f.n_points() {
            assert_eq!(f.point(&f.coords(p)), p);
        }
        assert_eq!(f.point(&[1, 2]), 5);
    }
}
