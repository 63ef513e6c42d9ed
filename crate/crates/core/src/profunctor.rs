//! Multivariable profunctors: set-valued functors whose slots are named
//! coordinates, covariant slots being inputs and contravariant ones outputs.
//! Composition is a coend over one shared coordinate.

use std::fmt;
use std::sync::Arc;

use crate::fincat::{coend, CoendResult, Elem, FinCat, FinError, FinSet, SetFunctor, SetMap, Slot, Variance};
use crate::par;
use crate::syntax::Name;

type Result<T> = std::result::Result<T, FinError>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Coord {
    Hyp(Name),
    /// The type of the expression itself.
    Result,
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coord::Hyp(n) => write!(f, "{n}"),
            Coord::Result => f.write_str("result"),
        }
    }
}

impl From<&Name> for Coord {
    fn from(n: &Name) -> Self {
        Coord::Hyp(n.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Profunctor {
    coords: Vec<Coord>,
    body: SetFunctor,
}

impl Profunctor {
    pub fn new(coords: Vec<Coord>, body: SetFunctor) -> Result<Profunctor> {
        if coords.len() != body.slots().len() {
            return Err(FinError::Interface(format!("{} coordinates for {} slots", coords.len(), body.slots().len())));
        }
        for (i, c) in coords.iter().enumerate() {
            if coords[..i].contains(c) {
                return Err(FinError::Interface(format!("coordinate `{c}` appears twice")));
            }
        }
        Ok(Profunctor { coords, body })
    }

    pub fn tabulate<V, A>(coords: Vec<Coord>, slots: Vec<Slot>, values: V, action: A) -> Result<Profunctor>
    where
        V: Fn(&[u32]) -> Vec<Elem> + Sync + Send,
        A: Fn(usize, u32, &[u32], &Elem) -> Result<Elem> + Sync + Send,
    {
        Profunctor::new(coords, SetFunctor::tabulate(slots, values, action)?)
    }

    pub fn coords(&self) -> &[Coord] {
        &self.coords
    }

    pub fn body(&self) -> &SetFunctor {
        &self.body
    }

    pub fn into_body(self) -> SetFunctor {
        self.body
    }

    pub fn slots(&self) -> &[Slot] {
        self.body.slots()
    }

    pub fn slot(&self, i: usize) -> &Slot {
        &self.body.slots()[i]
    }

    pub fn slot_of(&self, c: &Coord) -> Option<usize> {
        self.coords.iter().position(|d| d == c)
    }

    pub fn inputs(&self) -> Vec<&Coord> {
        self.with_variance(Variance::Covariant)
    }

    pub fn outputs(&self) -> Vec<&Coord> {
        self.with_variance(Variance::Contravariant)
    }

    fn with_variance(&self, v: Variance) -> Vec<&Coord> {
        self.coords.iter().zip(self.slots()).filter(|(_, s)| s.variance == v).map(|(c, _)| c).collect()
    }

    pub fn n_points(&self) -> usize {
        self.body.n_points()
    }

    pub fn value(&self, p: usize) -> &FinSet {
        self.body.value(p)
    }

    pub fn same_interface(&self, other: &Profunctor) -> bool {
        self.coords == other.coords && self.slots() == other.slots()
    }

    fn check_interface(&self, other: &Profunctor, what: &str) -> Result<()> {
        if self.same_interface(other) {
            Ok(())
        } else {
            Err(FinError::Interface(format!(
                "{what}: ({}) against ({})",
                describe_interface(self),
                describe_interface(other)
            )))
        }
    }
}

fn describe_interface(p: &Profunctor) -> String {
    p.coords
        .iter()
        .zip(p.slots())
        .map(|(c, s)| {
            let sign = if s.variance == Variance::Covariant { '+' } else { '-' };
            format!("{c}:{sign}{}obj/{}arr", s.cat.n_objects(), s.cat.n_arrows())
        })
        .collect::<Vec<_>>()
        .join(", ")
}

/// `hom(contra, cov)` on the given layout, constant in the other slots.
/// Elements are arrow names.
pub fn hom(coords: Vec<Coord>, slots: Vec<Slot>, cov: usize, contra: usize) -> Result<Profunctor> {
    let cat = slots[cov].cat.clone();
    if slots[contra].cat != cat {
        return Err(FinError::Interface("hom needs one category in both slots".into()));
    }
    let name = |h: u32| Elem::Arrow(cat.arrow(h).name.clone());
    let index = |e: &Elem| match e {
        Elem::Arrow(n) => cat.arrow_index(n).ok_or_else(|| FinError::NotInSet { elem: e.to_string(), point: vec![] }),
        _ => Err(FinError::NotInSet { elem: e.to_string(), point: vec![] }),
    };
    let unexpected = |f: u32, h: u32| FinError::MissingComposite { f: cat.arrow_name(f).into(), g: cat.arrow_name(h).into() };
    Profunctor::tabulate(
        coords,
        slots,
        |pt| cat.hom(pt[contra], pt[cov]).iter().map(|&h| name(h)).collect(),
        |s, f, _, e| {
            Ok(if s == cov {
                let h = index(e)?;
                name(cat.then(h, f).ok_or_else(|| unexpected(h, f))?)
            } else if s == contra {
                let h = index(e)?;
                name(cat.then(f, h).ok_or_else(|| unexpected(f, h))?)
            } else {
                e.clone()
            })
        },
    )
}

/// Renames coordinate `from` to `to`.
pub fn relabel(p: &Profunctor, from: &Coord, to: Coord) -> Result<Profunctor> {
    let i = p.slot_of(from).ok_or_else(|| FinError::Interface(format!("no coordinate `{from}`")))?;
    let mut coords = p.coords.clone();
    coords[i] = to;
    Profunctor::new(coords, p.body.clone())
}

/// Reorders the slots of `p` to follow `order`, a permutation of its
/// coordinates.
pub fn permute(p: &Profunctor, order: &[Coord]) -> Result<Profunctor> {
    if order == p.coords.as_slice() {
        return Ok(p.clone());
    }
    let map: Vec<usize> = order
        .iter()
        .map(|c| p.slot_of(c).ok_or_else(|| FinError::Interface(format!("no coordinate `{c}`"))))
        .collect::<Result<_>>()?;
    if map.len() != p.coords.len() {
        return Err(FinError::Interface("permutation drops coordinates".into()));
    }
    let old_pt = |pt: &[u32]| {
        let mut o = vec![0; pt.len()];
        for (k, &s) in map.iter().enumerate() {
            o[s] = pt[k];
        }
        p.body.point(&o)
    };
    let slots = map.iter().map(|&s| p.slot(s).clone()).collect();
    Profunctor::tabulate(
        order.to_vec(),
        slots,
        |pt| p.value(old_pt(pt)).elems().to_vec(),
        |k, f, pt, e| {
            let img = p.body.act_elem(map[k], f, old_pt(pt), e).expect("element of the value");
            Ok(img.clone())
        },
    )
}

/// Adds a dummy coordinate at position `at`; the values ignore it.
pub fn weaken(p: &Profunctor, coord: Coord, slot: Slot, at: usize) -> Result<Profunctor> {
    if p.slot_of(&coord).is_some() {
        return Err(FinError::Interface(format!("coordinate `{coord}` already present")));
    }
    let mut coords = p.coords.clone();
    coords.insert(at, coord);
    let mut slots = p.slots().to_vec();
    slots.insert(at, slot);
    let old_pt = |pt: &[u32]| {
        let mut o = pt.to_vec();
        o.remove(at);
        p.body.point(&o)
    };
    Profunctor::tabulate(
        coords,
        slots,
        |pt| p.value(old_pt(pt)).elems().to_vec(),
        |k, f, pt, e| {
            if k == at {
                return Ok(e.clone());
            }
            let s = if k < at { k } else { k - 1 };
            Ok(p.body.act_elem(s, f, old_pt(pt), e).expect("element of the value").clone())
        },
    )
}

/// Reinterprets coordinate `c` over the opposite category with flipped
/// variance. The tables are unchanged.
pub fn retype_flip(p: &Profunctor, c: &Coord) -> Result<Profunctor> {
    let i = p.slot_of(c).ok_or_else(|| FinError::Interface(format!("no coordinate `{c}`")))?;
    let mut slots = p.slots().to_vec();
    let old = &slots[i];
    slots[i] = Slot::new(Arc::new(old.cat.opposite()), old.variance.flip());
    Profunctor::new(p.coords.clone(), p.body.with_slots(slots)?)
}

/// Where a projected category sits in a product.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Precomposes coordinate `c` with a product projection: the new category
/// is `old x other` (`Side::Left`) or `other x old` (`Side::Right`) and the
/// value at a pair is the old value at the `old` component.
pub fn project(p: &Profunctor, c: &Coord, other: &Arc<FinCat>, side: Side) -> Result<Profunctor> {
    let i = p.slot_of(c).ok_or_else(|| FinError::Interface(format!("no coordinate `{c}`")))?;
    let old = p.slot(i).clone();
    let (n2, m2) = match side {
        Side::Left => (other.n_objects() as u32, other.n_arrows() as u32),
        Side::Right => (old.cat.n_objects() as u32, old.cat.n_arrows() as u32),
    };
    let cat = match side {
        Side::Left => old.cat.product(other),
        Side::Right => other.product(&old.cat),
    };
    let pick_obj = |o: u32| if side == Side::Left { o / n2 } else { o % n2 };
    let pick_arrow = |f: u32| if side == Side::Left { f / m2 } else { f % m2 };
    let mut slots = p.slots().to_vec();
    slots[i] = Slot::new(Arc::new(cat), old.variance);
    let old_pt = |pt: &[u32]| {
        let mut o = pt.to_vec();
        o[i] = pick_obj(o[i]);
        p.body.point(&o)
    };
    Profunctor::tabulate(
        p.coords.clone(),
        slots,
        |pt| p.value(old_pt(pt)).elems().to_vec(),
        |k, f, pt, e| {
            let f = if k == i { pick_arrow(f) } else { f };
            Ok(p.body.act_elem(k, f, old_pt(pt), e).expect("element of the value").clone())
        },
    )
}

/// The pointwise product of `p` and `q`, which agree on every coordinate
/// except `c`; the new category at `c` is the product of theirs and the
/// value at `(a, b)` is `P(a) x Q(b)`.
pub fn pair(p: &Profunctor, q: &Profunctor, c: &Coord) -> Result<Profunctor> {
    let i = p.slot_of(c).ok_or_else(|| FinError::Interface(format!("no coordinate `{c}`")))?;
    let compatible = p.coords == q.coords
        && p.slots().iter().zip(q.slots()).enumerate().all(|(k, (s, t))| if k == i { s.variance == t.variance } else { s == t });
    if !compatible {
        return Err(FinError::Interface(format!(
            "cannot pair ({}) with ({})",
            describe_interface(p),
            describe_interface(q)
        )));
    }
    let (a, b) = (p.slot(i).cat.clone(), q.slot(i).cat.clone());
    let (n2, m2) = (b.n_objects() as u32, b.n_arrows() as u32);
    let mut slots = p.slots().to_vec();
    slots[i] = Slot::new(Arc::new(a.product(&b)), p.slot(i).variance);
    let split = |pt: &[u32]| {
        let (mut x, mut y) = (pt.to_vec(), pt.to_vec());
        x[i] = pt[i] / n2;
        y[i] = pt[i] % n2;
        (p.body.point(&x), q.body.point(&y))
    };
    Profunctor::tabulate(
        p.coords.clone(),
        slots,
        |pt| {
            let (x, y) = split(pt);
            let (vx, vy) = (p.value(x), q.value(y));
            vx.elems().iter().flat_map(|l| vy.elems().iter().map(move |r| Elem::pair(l.clone(), r.clone()))).collect()
        },
        |k, f, pt, e| {
            let (x, y) = split(pt);
            let (l, r) = e.as_pair().expect("pair element");
            let (f1, f2) = if k == i { (f / m2, f % m2) } else { (f, f) };
            Ok(Elem::pair(
                p.body.act_elem(k, f1, x, l).expect("left component").clone(),
                q.body.act_elem(k, f2, y, r).expect("right component").clone(),
            ))
        },
    )
}

/// A composite `P o Q` over one coordinate, keeping the data needed to
/// define maps out of it elementwise.
#[derive(Clone, Debug)]
pub struct Composite {
    pub result: Profunctor,
    pub product: SetFunctor,
    pub coend: CoendResult,
    pub left: Profunctor,
    pub right: Profunctor,
    over_left: usize,
    over_right: usize,
}

impl Composite {
    /// The point of the left factor over result point `r` and diagonal `a`.
    pub fn left_point(&self, r: usize, a: u32) -> usize {
        let mut c = self.result.body.coords(r);
        c.insert(self.over_left, a);
        self.left.body.point(&c)
    }

    pub fn right_point(&self, r: usize, a: u32) -> usize {
        let mut c = self.result.body.coords(r);
        c.insert(self.over_right, a);
        self.right.body.point(&c)
    }

    /// The class of `(l, q)` over diagonal object `a` at result point `r`.
    pub fn class(&self, r: usize, a: u32, l: &Elem, q: &Elem) -> Result<Elem> {
        let dp = self.coend.diagonal_point(r, a);
        let e = Elem::pair(l.clone(), q.clone());
        let i = self.product.value(dp).index_of(&e).ok_or_else(|| FinError::NotInSet {
            elem: e.to_string(),
            point: self.product.coords(dp),
        })?;
        Ok(self.result.value(r).get(self.coend.class_of(r, a, i)).clone())
    }

    /// Members `(a, l, q)` of the class with index `c` at `r`.
    pub fn members(&self, r: usize, c: u32) -> impl Iterator<Item = (u32, &Elem, &Elem)> + '_ {
        self.coend.members(r, c).iter().map(move |&(a, i)| {
            let e = self.product.value(self.coend.diagonal_point(r, a)).get(i);
            let (l, q) = e.as_pair().expect("product elements are pairs");
            (a, l, q)
        })
    }
}

/// Number of elements the product underlying `compose_over(left, right,
/// over)` would hold, computed without building it.
pub fn product_size(left: &Profunctor, right: &Profunctor, over: &Coord) -> Option<usize> {
    let (ol, or) = (left.slot_of(over)?, right.slot_of(over)?);
    let mut sums: std::collections::HashMap<Vec<u32>, (usize, usize)> = std::collections::HashMap::new();
    for (p, k, side) in [(left, ol, 0), (right, or, 1)] {
        for pt in 0..p.n_points() {
            let mut c = p.body.coords(pt);
            c.remove(k);
            let e = sums.entry(c).or_default();
            if side == 0 {
                e.0 += p.value(pt).len();
            } else {
                e.1 += p.value(pt).len();
            }
        }
    }
    sums.values().try_fold(0usize, |acc, &(a, b)| acc.checked_add(a.checked_mul(b)?))
}

/// Composes `left` (with `over` an output) and `right` (with `over` an
/// input). Both must agree on all other coordinates, in order.
pub fn compose_over(left: &Profunctor, right: &Profunctor, over: &Coord) -> Result<Composite> {
    let ol = left.slot_of(over).ok_or_else(|| FinError::Interface(format!("left factor lacks `{over}`")))?;
    let or = right.slot_of(over).ok_or_else(|| FinError::Interface(format!("right factor lacks `{over}`")))?;
    let (sl, sr) = (left.slot(ol), right.slot(or));
    if sl.variance != Variance::Contravariant || sr.variance != Variance::Covariant || sl.cat != sr.cat {
        return Err(FinError::Interface(format!(
            "`{over}` must be an output of ({}) and an input of ({}) over one category",
            describe_interface(left),
            describe_interface(right)
        )));
    }
    let residual = |p: &Profunctor, skip: usize| -> (Vec<Coord>, Vec<Slot>) {
        let cs = p.coords.iter().enumerate().filter(|&(k, _)| k != skip).map(|(_, c)| c.clone()).collect();
        let ss = p.slots().iter().enumerate().filter(|&(k, _)| k != skip).map(|(_, s)| s.clone()).collect();
        (cs, ss)
    };
    let (lc, ls) = residual(left, ol);
    let (rc, rs) = residual(right, or);
    if lc != rc || ls != rs {
        return Err(FinError::Interface(format!(
            "factors disagree away from `{over}`: ({}) and ({})",
            describe_interface(left),
            describe_interface(right)
        )));
    }
    let nl = left.coords.len();
    // right slot index for each left slot other than `over`
    let to_right = |k: usize| {
        let r = if k < ol { k } else { k - 1 };
        if r < or {
            r
        } else {
            r + 1
        }
    };
    let mut slots = left.slots().to_vec();
    slots.push(sr.clone());
    let points = |pt: &[u32]| {
        let lp = left.body.point(&pt[..nl]);
        let mut rcoords: Vec<u32> = pt[..nl].iter().enumerate().filter(|&(k, _)| k != ol).map(|(_, &c)| c).collect();
        rcoords.insert(or, pt[nl]);
        (lp, right.body.point(&rcoords))
    };
    let product = SetFunctor::tabulate(
        slots,
        |pt| {
            let (lp, rp) = points(pt);
            let (vl, vr) = (left.value(lp), right.value(rp));
            vl.elems().iter().flat_map(|l| vr.elems().iter().map(move |r| Elem::pair(l.clone(), r.clone()))).collect()
        },
        |s, f, pt, e| {
            let (lp, rp) = points(pt);
            let (l, r) = e.as_pair().expect("pair element");
            let el = || left.body.act_elem(s, f, lp, l).expect("left component").clone();
            Ok(if s == nl {
                Elem::pair(l.clone(), right.body.act_elem(or, f, rp, r).expect("right component").clone())
            } else if s == ol {
                Elem::pair(el(), r.clone())
            } else {
                Elem::pair(el(), right.body.act_elem(to_right(s), f, rp, r).expect("right component").clone())
            })
        },
    )?;
    let coend = coend(&product, nl, ol)?;
    let result = Profunctor::new(lc, coend.apex.clone())?;
    Ok(Composite { result, product, coend, left: left.clone(), right: right.clone(), over_left: ol, over_right: or })
}

/// A natural transformation, given by one map per point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NatTrans {
    source: Profunctor,
    target: Profunctor,
    components: Vec<SetMap>,
}

impl NatTrans {
    pub fn new(source: Profunctor, target: Profunctor, components: Vec<SetMap>) -> Result<NatTrans> {
        source.check_interface(&target, "source and target")?;
        if components.len() != source.n_points() {
            return Err(FinError::Malformed(format!("{} components for {} points", components.len(), source.n_points())));
        }
        for (p, c) in components.iter().enumerate() {
            if c.len() != source.value(p).len() || c.iter().any(|&j| j as usize >= target.value(p).len()) {
                return Err(FinError::Malformed(format!("component at point {:?} is not a map", source.body.coords(p))));
            }
        }
        Ok(NatTrans { source, target, components })
    }

    /// Builds a transformation from an elementwise map; `f` receives the
    /// point index and a source element and returns a target element.
    pub fn tabulate(
        source: Profunctor,
        target: Profunctor,
        f: impl Fn(usize, &Elem) -> Result<Elem> + Sync + Send,
    ) -> Result<NatTrans> {
        source.check_interface(&target, "source and target")?;
        let components = par::try_map_indices(source.n_points(), |p| {
            source
                .value(p)
                .elems()
                .iter()
                .map(|e| {
                    let img = f(p, e)?;
                    target.value(p).index_of(&img).ok_or_else(|| FinError::NotInSet {
                        elem: img.to_string(),
                        point: target.body.coords(p),
                    })
                })
                .collect::<Result<SetMap>>()
        })?;
        Ok(NatTrans { source, target, components })
    }

    pub fn identity(p: &Profunctor) -> NatTrans {
        let components = (0..p.n_points()).map(|q| (0..p.value(q).len() as u32).collect()).collect();
        NatTrans { source: p.clone(), target: p.clone(), components }
    }

    /// The map out of a composite sending each member `(a, l, q)` of a class
    /// to `f(r, a, l, q)`, after checking that all members agree.
    pub fn from_classes(
        c: &Composite,
        target: Profunctor,
        f: impl Fn(usize, u32, &Elem, &Elem) -> Result<Elem> + Sync + Send,
    ) -> Result<NatTrans> {
        let source = c.result.clone();
        source.check_interface(&target, "composite and target")?;
        let components = par::try_map_indices(source.n_points(), |r| {
            (0..source.value(r).len() as u32)
                .map(|k| {
                    let mut image: Option<(Elem, Elem)> = None;
                    for (a, l, q) in c.members(r, k) {
                        let img = f(r, a, l, q)?;
                        let member = Elem::class(a, Elem::pair(l.clone(), q.clone()));
                        match &image {
                            None => image = Some((member, img)),
                            Some((first, prev)) if *prev != img => {
                                return Err(FinError::SplitClass {
                                    point: source.body.coords(r),
                                    left: format!("{first} -> {prev}"),
                                    right: format!("{member} -> {img}"),
                                })
                            }
                            Some(_) => {}
                        }
                    }
                    let (_, img) = image.expect("classes are nonempty");
                    target.value(r).index_of(&img).ok_or_else(|| FinError::NotInSet {
                        elem: img.to_string(),
                        point: target.body.coords(r),
                    })
                })
                .collect::<Result<SetMap>>()
        })?;
        Ok(NatTrans { source, target, components })
    }

    pub fn source(&self) -> &Profunctor {
        &self.source
    }

    pub fn target(&self) -> &Profunctor {
        &self.target
    }

    pub fn components(&self) -> &[SetMap] {
        &self.components
    }

    /// Image of `e` at point `p`.
    pub fn apply(&self, p: usize, e: &Elem) -> Option<&Elem> {
        let i = self.source.value(p).index_of(e)?;
        Some(self.target.value(p).get(self.components[p][i as usize]))
    }

    fn apply_or_err(&self, p: usize, e: &Elem) -> Result<Elem> {
        self.apply(p, e).cloned().ok_or_else(|| FinError::NotInSet { elem: e.to_string(), point: self.source.body.coords(p) })
    }

    /// `self` followed by `next`.
    pub fn vcomp(&self, next: &NatTrans) -> Result<NatTrans> {
        self.target.check_interface(&next.source, "vertical composite")?;
        if self.target.body.values() != next.source.body.values() {
            return Err(FinError::Interface("vertical composite: middle profunctors differ".into()));
        }
        let components = self
            .components
            .iter()
            .zip(&next.components)
            .map(|(a, b)| a.iter().map(|&i| b[i as usize]).collect())
            .collect();
        Ok(NatTrans { source: self.source.clone(), target: next.target.clone(), components })
    }

    /// True when every component is a bijection.
    pub fn is_iso(&self) -> bool {
        self.components.iter().enumerate().all(|(p, c)| {
            let n = self.target.value(p).len();
            if c.len() != n {
                return false;
            }
            let mut seen = vec![false; n];
            c.iter().all(|&j| !std::mem::replace(&mut seen[j as usize], true))
        })
    }

    /// Swaps the sense of coordinate `c` on both sides, as `retype_flip`.
    pub fn retype_flip(&self, c: &Coord) -> Result<NatTrans> {
        Ok(NatTrans {
            source: retype_flip(&self.source, c)?,
            target: retype_flip(&self.target, c)?,
            components: self.components.clone(),
        })
    }

    /// Renames a coordinate on both sides.
    pub fn relabel(&self, from: &Coord, to: Coord) -> Result<NatTrans> {
        Ok(NatTrans {
            source: relabel(&self.source, from, to.clone())?,
            target: relabel(&self.target, from, to)?,
            components: self.components.clone(),
        })
    }
}

/// Equality of transformations with the same source and target.
pub fn nat_eq(a: &NatTrans, b: &NatTrans) -> bool {
    a.source == b.source && a.target == b.target && a.components == b.components
}

/// Checks every naturality square exhaustively.
pub fn validate_nat(t: &NatTrans) -> Result<()> {
    let (s, g) = (&t.source.body, &t.target.body);
    par::try_for_indices(s.n_points(), |p| {
        for k in 0..s.slots().len() {
            let slot = &s.slots()[k];
            for f in 0..slot.cat.n_arrows() as u32 {
                if s.coord(p, k) != slot.ends(f).0 {
                    continue;
                }
                let q = s.target_point(k, f, p);
                for i in 0..s.value(p).len() as u32 {
                    let down_then_across = t.components[q][s.act(k, f, p, i) as usize];
                    let across_then_down = g.act(k, f, p, t.components[p][i as usize]);
                    if down_then_across != across_then_down {
                        return Err(FinError::NotNatural {
                            slot: k,
                            arrow: slot.cat.arrow_name(f).to_string(),
                            point: s.coords(p),
                            elem: s.value(p).get(i).to_string(),
                        });
                    }
                }
            }
        }
        Ok(())
    })
}

/// Horizontal composite: the map between composites induced by `theta` on
/// the left factors and `phi` on the right ones.
pub fn hcomp(theta: &NatTrans, phi: &NatTrans, src: &Composite, tgt: &Composite) -> Result<NatTrans> {
    NatTrans::from_classes(src, tgt.result.clone(), |r, a, l, q| {
        let l2 = theta.apply_or_err(src.left_point(r, a), l)?;
        let q2 = phi.apply_or_err(src.right_point(r, a), q)?;
        tgt.class(r, a, &l2, &q2)
    })
}

pub fn whisker_left(theta: &NatTrans, src: &Composite, tgt: &Composite) -> Result<NatTrans> {
    hcomp(theta, &NatTrans::identity(&src.right), src, tgt)
}

pub fn whisker_right(phi: &NatTrans, src: &Composite, tgt: &Composite) -> Result<NatTrans> {
    hcomp(&NatTrans::identity(&src.left), phi, src, tgt)
}

/// The pointwise product of two transformations, as in [`pair`].
pub fn pair_nat(theta: &NatTrans, phi: &NatTrans, c: &Coord) -> Result<NatTrans> {
    let source = pair(&theta.source, &phi.source, c)?;
    let target = pair(&theta.target, &phi.target, c)?;
    let i = source.slot_of(c).expect("paired coordinate");
    let n2 = phi.source.slot(i).cat.n_objects() as u32;
    NatTrans::tabulate(source.clone(), target, |p, e| {
        let pt = source.body.coords(p);
        let (mut x, mut y) = (pt.clone(), pt.clone());
        x[i] = pt[i] / n2;
        y[i] = pt[i] % n2;
        let (l, r) = e.as_pair().expect("pair element");
        Ok(Elem::pair(
            theta.apply_or_err(theta.source.body.point(&x), l)?,
            phi.apply_or_err(phi.source.body.point(&y), r)?,
        ))
    })
}

/// A transformation precomposed with a projection, as in [`project`].
pub fn project_nat(theta: &NatTrans, c: &Coord, other: &Arc<FinCat>, side: Side) -> Result<NatTrans> {
    let source = project(&theta.source, c, other, side)?;
    let target = project(&theta.target, c, other, side)?;
    let i = source.slot_of(c).expect("projected coordinate");
    let n2 = match side {
        Side::Left => other.n_objects() as u32,
        Side::Right => theta.source.slot(i).cat.n_objects() as u32,
    };
    NatTrans::tabulate(source.clone(), target, |p, e| {
        let mut pt = source.body.coords(p);
        pt[i] = if side == Side::Left { pt[i] / n2 } else { pt[i] % n2 };
        theta.apply_or_err(theta.source.body.point(&pt), e)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::{hom_functor, validate_functor};

    fn cat(c: FinCat) -> Arc<FinCat> {
        Arc::new(c)
    }

    /// hom as a profunctor with input `x` and output `y`.
    fn hom(c: &Arc<FinCat>, x: &str, y: &str) -> Profunctor {
        Profunctor::new(vec![Coord::Hyp(Name::new(x)), Coord::Hyp(Name::new(y))], hom_functor(c)).unwrap()
    }

    #[test]
    fn hom_is_a_unit_for_composition() {
        let c = cat(FinCat::parallel_pair());
        let p = hom(&c, "x", "y");
        let q = hom(&c, "y", "z");
        // (x input, y output) then (y input, z output)
        let q = permute(&q, &[Coord::Hyp(Name::new("z")), Coord::Hyp(Name::new("y"))]).unwrap();
        let p = permute(&p, &[Coord::Hyp(Name::new("x")), Coord::Hyp(Name::new("y"))]).unwrap();
        let p = weaken(&p, Coord::Hyp(Name::new("z")), Slot::new(c.clone(), Variance::Contravariant), 0).unwrap();
        let q = weaken(&q, Coord::Hyp(Name::new("x")), Slot::new(c.clone(), Variance::Covariant), 1).unwrap();
        let comp = compose_over(&p, &q, &Coord::Hyp(Name::new("y"))).unwrap();
        validate_functor(comp.result.body()).unwrap();
        for pt in 0..comp.result.n_points() {
            let cs = comp.result.body().coords(pt);
            assert_eq!(comp.result.value(pt).len(), c.hom(cs[0], cs[1]).len());
        }
    }

    #[test]
    fn flip_is_an_involution() {
        let c = cat(FinCat::walking_arrow());
        let p = hom(&c, "x", "y");
        let x = Coord::Hyp(Name::new("x"));
        let back = retype_flip(&retype_flip(&p, &x).unwrap(), &x).unwrap();
        assert_eq!(back, p);
        validate_functor(retype_flip(&p, &x).unwrap().body()).unwrap();
    }

    #[test]
    fn pairs_and_projections_are_functors() {
        let c = cat(FinCat::walking_arrow());
        let d = cat(FinCat::z2());
        let p = hom(&c, "x", "y");
        let y = Coord::Hyp(Name::new("y"));
        let pr = project(&p, &y, &d, Side::Right).unwrap();
        validate_functor(pr.body()).unwrap();
        let pl = project(&p, &y, &d, Side::Left).unwrap();
        validate_functor(pl.body()).unwrap();
        let pp = pair(&p, &p, &y).unwrap();
        validate_functor(pp.body()).unwrap();
        assert_eq!(pp.slot(1).cat.n_objects(), 4);
    }

    #[test]
    fn identity_is_natural_and_broken_maps_are_caught() {
        let c = cat(FinCat::walking_arrow());
        let p = hom(&c, "x", "y");
        let id = NatTrans::identity(&p);
        validate_nat(&id).unwrap();
        assert!(id.is_iso());
        assert!(nat_eq(&id.vcomp(&id).unwrap(), &id));
        let z = cat(FinCat::z2());
        let h = hom(&z, "x", "y");
        let constant = NatTrans::new(h.clone(), h.clone(), vec![vec![0, 0]]).unwrap();
        assert!(matches!(validate_nat(&constant), Err(FinError::NotNatural { .. })));
    }
}
