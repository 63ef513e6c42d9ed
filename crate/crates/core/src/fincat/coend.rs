use petgraph::unionfind::UnionFind;

use super::{Elem, FinError, SetFunctor, Slot, Variance};
use crate::par;

/// The coend of a functor over a covariant/contravariant slot pair.
///
/// For each residual point the disjoint union of the diagonal sets is laid
/// out flat (diagonal object major); `class_of` maps flat positions to class
/// indices in the apex value, and `members` lists each class.
#[derive(Clone, Debug)]
pub struct CoendResult {
    pub apex: SetFunctor,
    pub cov: usize,
    pub contra: usize,
    offsets: Vec<Vec<usize>>,
    class_of: Vec<Vec<u32>>,
    members: Vec<Vec<Vec<(u32, u32)>>>,
    diag_base: Vec<usize>,
    diag_step: usize,
}

impl CoendResult {
    /// The point of the source functor on the diagonal `a` over residual
    /// point `r`.
    pub fn diagonal_point(&self, r: usize, a: u32) -> usize {
        self.diag_base[r] + a as usize * self.diag_step
    }

    /// Class index of element `i` of the diagonal component `a` at `r`.
    pub fn class_of(&self, r: usize, a: u32, i: u32) -> u32 {
        self.class_of[r][self.offsets[r][a as usize] + i as usize]
    }

    /// Members `(diagonal object, element index)` of class `c` at `r`.
    pub fn members(&self, r: usize, c: u32) -> &[(u32, u32)] {
        &self.members[r][c as usize]
    }

    pub fn n_classes(&self, r: usize) -> usize {
        self.members[r].len()
    }

    /// The partition at `r`, each class a sorted list of `(object, index)`.
    pub fn partition(&self, r: usize) -> Vec<Vec<(u32, u32)>> {
        self.members[r].clone()
    }
}

/// Computes the coend of `p` over the slots `cov` (covariant) and `contra`
/// (contravariant), which must carry the same category.
///
/// Each arrow `f: a -> b` and element `e` of `P(cov = a, contra = b)` glues
/// the covariant image of `e` in the diagonal `b` to its contravariant image
/// in the diagonal `a`. Classes are represented by their smallest member.
pub fn coend(p: &SetFunctor, cov: usize, contra: usize) -> Result<CoendResult, FinError> {
    let slots = p.slots();
    if cov == contra
        || cov >= slots.len()
        || contra >= slots.len()
        || slots[cov].variance != Variance::Covariant
        || slots[contra].variance != Variance::Contravariant
        || slots[cov].cat != slots[contra].cat
    {
        return Err(FinError::CoendSlots { cov, contra });
    }
    let cat = slots[cov].cat.clone();
    let n = cat.n_objects() as u32;
    let residual: Vec<usize> = (0..slots.len()).filter(|&s| s != cov && s != contra).collect();
    let residual_slots: Vec<Slot> = residual.iter().map(|&s| slots[s].clone()).collect();
    let n_res: usize = residual_slots.iter().map(|s| s.cat.n_objects()).product();
    let diag_step = p.stride(cov) + p.stride(contra);
    let diag_base: Vec<usize> = (0..n_res)
        .map(|r| {
            let mut base = 0;
            let mut rem = r;
            for (k, &s) in residual.iter().enumerate().rev() {
                let d = residual_slots[k].cat.n_objects();
                base += (rem % d) * p.stride(s);
                rem /= d;
            }
            base
        })
        .collect();

    struct PointClasses {
        offsets: Vec<usize>,
        class_of: Vec<u32>,
        members: Vec<Vec<(u32, u32)>>,
        reps: Vec<Elem>,
    }

    let per_point = par::map_indices(n_res, |r| {
        let diag = |a: u32| diag_base[r] + a as usize * diag_step;
        let mut offsets = Vec::with_capacity(n as usize + 1);
        let mut total = 0;
        for a in 0..n {
            offsets.push(total);
            total += p.value(diag(a)).len();
        }
        offsets.push(total);
        let mut uf = UnionFind::<usize>::new(total);
        for f in 0..cat.n_arrows() as u32 {
            let (a, b) = (cat.src(f), cat.dst(f));
            // P(cov = a, contra = b)
            let off = diag_base[r] + a as usize * p.stride(cov) + b as usize * p.stride(contra);
            let left = p.action(cov, f, off);
            let right = p.action(contra, f, off);
            for i in 0..p.value(off).len() {
                uf.union(offsets[b as usize] + left[i] as usize, offsets[a as usize] + right[i] as usize);
            }
        }
        // classes in order of their smallest member
        let mut root_class = vec![u32::MAX; total];
        let mut class_of = vec![0; total];
        let mut members: Vec<Vec<(u32, u32)>> = Vec::new();
        let mut reps = Vec::new();
        for a in 0..n {
            for i in 0..(offsets[a as usize + 1] - offsets[a as usize]) {
                let flat = offsets[a as usize] + i;
                let root = uf.find_mut(flat);
                if root_class[root] == u32::MAX {
                    root_class[root] = members.len() as u32;
                    members.push(Vec::new());
                    reps.push(Elem::class(a, p.value(diag(a)).get(i as u32).clone()));
                }
                let c = root_class[root];
                class_of[flat] = c;
                members[c as usize].push((a, i as u32));
            }
        }
        PointClasses { offsets, class_of, members, reps }
    });

    let mut offsets = Vec::with_capacity(n_res);
    let mut class_of = Vec::with_capacity(n_res);
    let mut members = Vec::with_capacity(n_res);
    let mut reps = Vec::with_capacity(n_res);
    for pc in per_point {
        offsets.push(pc.offsets);
        class_of.push(pc.class_of);
        members.push(pc.members);
        reps.push(pc.reps);
    }

    let partial = CoendResult {
        apex: SetFunctor::shape(residual_slots.clone(), reps.iter().map(|r| super::FinSet::new(r.clone())).collect()),
        cov,
        contra,
        offsets,
        class_of,
        members,
        diag_base,
        diag_step,
    };
    // The residual action, computed on every member and checked to agree.
    let apex = SetFunctor::tabulate(
        residual_slots,
        |pt| {
            let r = partial.apex.point(pt);
            reps[r].clone()
        },
        |k, f, pt, e| {
            let s = residual[k];
            let r = partial.apex.point(pt);
            let rt = partial.apex.target_point(k, f, r);
            let c = partial.apex.value(r).index_of(e).expect("class of this point");
            let mut image = None;
            for &(a, i) in partial.members(r, c) {
                let dp = partial.diagonal_point(r, a);
                let j = p.act(s, f, dp, i);
                let img = partial.class_of(rt, a, j);
                match image {
                    None => image = Some(img),
                    Some(prev) if prev != img => {
                        return Err(FinError::CoendAction {
                            slot: k,
                            arrow: partial.apex.slots()[k].cat.arrow_name(f).to_string(),
                            point: pt.to_vec(),
                        })
                    }
                    Some(_) => {}
                }
            }
            let img = image.expect("classes are nonempty");
            Ok(partial.apex.value(rt).get(img).clone())
        },
    )?;
    Ok(CoendResult { apex, ..partial })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::fincat::{hom_functor, validate_functor, FinCat};

    #[test]
    fn discrete_coend_is_disjoint_union() {
        let c = Arc::new(FinCat::discrete(3));
        let h = hom_functor(&c);
        let r = coend(&h, 0, 1).unwrap();
        assert_eq!(r.apex.n_points(), 1);
        assert_eq!(r.apex.value(0).len(), 3);
    }

    #[test]
    fn constant_over_connected_category_has_one_class() {
        let c = Arc::new(FinCat::parallel_pair());
        let f = SetFunctor::tabulate(
            vec![Slot::new(c.clone(), Variance::Covariant), Slot::new(c, Variance::Contravariant)],
            |_| vec![Elem::Unit],
            |_, _, _, e| Ok(e.clone()),
        )
        .unwrap();
        let r = coend(&f, 0, 1).unwrap();
        assert_eq!(r.apex.value(0).len(), 1);
        assert_eq!(r.members(0, 0).len(), 2);
    }

    #[test]
    fn residual_action_is_functorial() {
        // hom(a, x) x hom(x, b) with x integrated out, laid out (b, x, x', a)
        let c = Arc::new(FinCat::walking_arrow());
        let h = hom_functor(&c);
        let slots = vec![
            Slot::new(c.clone(), Variance::Covariant),
            Slot::new(c.clone(), Variance::Contravariant),
            Slot::new(c.clone(), Variance::Covariant),
            Slot::new(c.clone(), Variance::Contravariant),
        ];
        let prod = SetFunctor::tabulate(
            slots,
            |pt| {
                let l = h.value(h.point(&[pt[2], pt[3]])).elems().to_vec();
                let r = h.value(h.point(&[pt[0], pt[1]])).elems().to_vec();
                l.iter().flat_map(|x| r.iter().map(move |y| Elem::pair(x.clone(), y.clone()))).collect()
            },
            |s, f, pt, e| {
                let (x, y) = e.as_pair().unwrap();
                Ok(match s {
                    0 | 1 => Elem::pair(x.clone(), h.act_elem(s, f, h.point(&[pt[0], pt[1]]), y).unwrap().clone()),
                    _ => Elem::pair(h.act_elem(s - 2, f, h.point(&[pt[2], pt[3]]), x).unwrap().clone(), y.clone()),
                })
            },
        )
        .unwrap();
        validate_functor(&prod).unwrap();
        let r = coend(&prod, 2, 1).unwrap();
        validate_functor(&r.apex).unwrap();
        for b in 0..2 {
            for a in 0..2 {
                let p = r.apex.point(&[b, a]);
                assert_eq!(r.apex.value(p).len(), c.hom(a, b).len());
            }
        }
    }

    #[test]
    fn wrong_slots_are_rejected() {
        let c = Arc::new(FinCat::walking_arrow());
        let h = hom_functor(&c);
        assert!(coend(&h, 1, 0).is_err());
    }
}
