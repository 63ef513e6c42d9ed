use std::collections::BTreeSet;
use std::sync::Arc;

use super::FinError;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Arrow {
    pub name: Arc<str>,
    pub src: u32,
    pub dst: u32,
}

/// A finite category given by explicit tables. Objects and arrows are
/// numbered; `then(f, g)` is the composite "first `f`, then `g`".
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FinCat {
    objects: Vec<Arc<str>>,
    arrows: Vec<Arrow>,
    identities: Vec<u32>,
    compose: Vec<Option<u32>>,
    homs: Vec<Vec<u32>>,
}

impl FinCat {
    /// Builds a category from raw tables without checking the laws.
    pub fn from_raw(
        objects: Vec<Arc<str>>,
        arrows: Vec<Arrow>,
        identities: Vec<u32>,
        compose: Vec<Option<u32>>,
    ) -> FinCat {
        let n = objects.len();
        let mut homs = vec![Vec::new(); n * n];
        for (i, a) in arrows.iter().enumerate() {
            if (a.src as usize) < n && (a.dst as usize) < n {
                homs[a.src as usize * n + a.dst as usize].push(i as u32);
            }
        }
        FinCat { objects, arrows, identities, compose, homs }
    }

    /// Builds a category from a composition function and validates it.
    pub fn generate(
        objects: Vec<Arc<str>>,
        arrows: Vec<Arrow>,
        identities: Vec<u32>,
        then: impl Fn(u32, u32) -> Option<u32>,
    ) -> Result<FinCat, FinError> {
        let m = arrows.len() as u32;
        let mut compose = Vec::with_capacity((m * m) as usize);
        for f in 0..m {
            for g in 0..m {
                compose.push(then(f, g));
            }
        }
        let c = FinCat::from_raw(objects, arrows, identities, compose);
        c.validate()?;
        Ok(c)
    }

    pub fn n_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn n_arrows(&self) -> usize {
        self.arrows.len()
    }

    pub fn object_name(&self, a: u32) -> &str {
        &self.objects[a as usize]
    }

    pub fn object_names(&self) -> &[Arc<str>] {
        &self.objects
    }

    pub fn arrow(&self, f: u32) -> &Arrow {
        &self.arrows[f as usize]
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn arrow_name(&self, f: u32) -> &str {
        &self.arrows[f as usize].name
    }

    pub fn src(&self, f: u32) -> u32 {
        self.arrows[f as usize].src
    }

    pub fn dst(&self, f: u32) -> u32 {
        self.arrows[f as usize].dst
    }

    pub fn id(&self, a: u32) -> u32 {
        self.identities[a as usize]
    }

    pub fn is_identity(&self, f: u32) -> bool {
        self.identities.get(self.src(f) as usize) == Some(&f)
    }

    /// First `f`, then `g`.
    pub fn then(&self, f: u32, g: u32) -> Option<u32> {
        self.compose[f as usize * self.arrows.len() + g as usize]
    }

    /// Arrows from `a` to `b`, in index order.
    pub fn hom(&self, a: u32, b: u32) -> &[u32] {
        &self.homs[a as usize * self.objects.len() + b as usize]
    }

    pub fn arrow_index(&self, name: &str) -> Option<u32> {
        self.arrows.iter().position(|a| &*a.name == name).map(|i| i as u32)
    }

    pub fn object_index(&self, name: &str) -> Option<u32> {
        self.objects.iter().position(|o| &**o == name).map(|i| i as u32)
    }

    pub fn is_discrete(&self) -> bool {
        (0..self.arrows.len() as u32).all(|f| self.is_identity(f))
    }

    /// Checks all category laws exhaustively, reporting the first violation.
    pub fn validate(&self) -> Result<(), FinError> {
        let n = self.objects.len();
        let m = self.arrows.len();
        if self.identities.len() != n {
            return Err(FinError::Malformed(format!("{} identities for {n} objects", self.identities.len())));
        }
        if self.compose.len() != m * m {
            return Err(FinError::Malformed(format!("composition table has {} entries, expected {}", self.compose.len(), m * m)));
        }
        let mut names = BTreeSet::new();
        for o in &self.objects {
            if !names.insert(o.clone()) {
                return Err(FinError::DuplicateObject(o.to_string()));
            }
        }
        names.clear();
        for a in &self.arrows {
            for o in [a.src, a.dst] {
                if o as usize >= n {
                    return Err(FinError::DanglingArrow { arrow: a.name.to_string(), object: o, count: n });
                }
            }
            if !names.insert(a.name.clone()) {
                return Err(FinError::DuplicateArrow(a.name.to_string()));
            }
        }
        for (o, &i) in self.identities.iter().enumerate() {
            if i as usize >= m || self.src(i) != o as u32 || self.dst(i) != o as u32 {
                let arrow = self.arrows.get(i as usize).map(|a| a.name.to_string()).unwrap_or_else(|| format!("#{i}"));
                return Err(FinError::BadIdentity { object: self.objects[o].to_string(), arrow });
            }
        }
        let name = |f: u32| self.arrow_name(f).to_string();
        for f in 0..m as u32 {
            for g in 0..m as u32 {
                let composable = self.dst(f) == self.src(g);
                match self.then(f, g) {
                    None if composable => return Err(FinError::MissingComposite { f: name(f), g: name(g) }),
                    Some(_) if !composable => return Err(FinError::SpuriousComposite { f: name(f), g: name(g) }),
                    Some(h) if h as usize >= m || self.src(h) != self.src(f) || self.dst(h) != self.dst(g) => {
                        let h = self.arrows.get(h as usize).map(|a| a.name.to_string()).unwrap_or_else(|| format!("#{h}"));
                        return Err(FinError::CompositeEndpoints { f: name(f), g: name(g), h });
                    }
                    _ => {}
                }
            }
        }
        for f in 0..m as u32 {
            let left = self.id(self.src(f));
            let right = self.id(self.dst(f));
            if self.then(left, f) != Some(f) {
                return Err(FinError::IdentityLaw { arrow: name(f), identity: name(left) });
            }
            if self.then(f, right) != Some(f) {
                return Err(FinError::IdentityLaw { arrow: name(f), identity: name(right) });
            }
        }
        for f in 0..m as u32 {
            for g in 0..m as u32 {
                let Some(fg) = self.then(f, g) else { continue };
                for h in 0..m as u32 {
                    let Some(gh) = self.then(g, h) else { continue };
                    if self.then(fg, h) != self.then(f, gh) {
                        return Err(FinError::NonAssociative { f: name(f), g: name(g), h: name(h) });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn opposite(&self) -> FinCat {
        let m = self.arrows.len();
        let arrows = self
            .arrows
            .iter()
            .map(|a| Arrow { name: a.name.clone(), src: a.dst, dst: a.src })
            .collect();
        let mut compose = vec![None; m * m];
        for f in 0..m {
            for g in 0..m {
                compose[f * m + g] = self.compose[g * m + f];
            }
        }
        FinCat::from_raw(self.objects.clone(), arrows, self.identities.clone(), compose)
    }

    /// Object `(i, j)` is numbered `i * n2 + j`; arrow `(f, g)` is `f * m2 + g`.
    pub fn product(&self, other: &FinCat) -> FinCat {
        let (n2, m2) = (other.n_objects() as u32, other.n_arrows() as u32);
        let mut objects = Vec::new();
        for a in &self.objects {
            for b in &other.objects {
                objects.push(Arc::from(format!("({a},{b})")));
            }
        }
        let mut arrows = Vec::new();
        for f in &self.arrows {
            for g in &other.arrows {
                arrows.push(Arrow {
                    name: Arc::from(format!("({},{})", f.name, g.name)),
                    src: f.src * n2 + g.src,
                    dst: f.dst * n2 + g.dst,
                });
            }
        }
        let identities = (0..self.n_objects() as u32)
            .flat_map(|i| (0..n2).map(move |j| (i, j)))
            .map(|(i, j)| self.id(i) * m2 + other.id(j))
            .collect();
        let m = arrows.len();
        let mut compose = vec![None; m * m];
        for x in 0..m as u32 {
            for y in 0..m as u32 {
                let (f, g) = (x / m2, x % m2);
                let (f2, g2) = (y / m2, y % m2);
                if let (Some(a), Some(b)) = (self.then(f, f2), other.then(g, g2)) {
                    compose[(x as usize) * m + y as usize] = Some(a * m2 + b);
                }
            }
        }
        FinCat::from_raw(objects, arrows, identities, compose)
    }

    pub fn terminal() -> FinCat {
        FinCat::discrete_named(&["*"])
    }

    pub fn discrete(n: usize) -> FinCat {
        let names: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        FinCat::discrete_named(&refs)
    }

    pub fn discrete_named(objects: &[&str]) -> FinCat {
        FinCat::preorder_named(objects, |i, j| i == j)
    }

    /// A preorder on `n` objects; `leq` is closed reflexively and transitively.
    pub fn preorder(n: usize, leq: impl Fn(u32, u32) -> bool) -> FinCat {
        let names: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        FinCat::preorder_named(&refs, leq)
    }

    fn preorder_named(objects: &[&str], leq: impl Fn(u32, u32) -> bool) -> FinCat {
        let n = objects.len();
        let mut rel = vec![false; n * n];
        for i in 0..n {
            for j in 0..n {
                rel[i * n + j] = i == j || leq(i as u32, j as u32);
            }
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if rel[i * n + k] && rel[k * n + j] {
                        rel[i * n + j] = true;
                    }
                }
            }
        }
        let mut arrows = Vec::new();
        let mut index = vec![u32::MAX; n * n];
        let mut identities = vec![0; n];
        for i in 0..n {
            for j in 0..n {
                if rel[i * n + j] {
                    index[i * n + j] = arrows.len() as u32;
                    let name = if i == j { format!("id{}", objects[i]) } else { format!("{}<={}", objects[i], objects[j]) };
                    if i == j {
                        identities[i] = arrows.len() as u32;
                    }
                    arrows.push(Arrow { name: Arc::from(name), src: i as u32, dst: j as u32 });
                }
            }
        }
        let ends: Vec<(u32, u32)> = arrows.iter().map(|a| (a.src, a.dst)).collect();
        FinCat::generate(objects.iter().map(|o| Arc::from(*o)).collect(), arrows, identities, |f, g| {
            let (a, b) = ends[f as usize];
            let (b2, c) = ends[g as usize];
            (b == b2).then(|| index[a as usize * n + c as usize])
        })
        .expect("preorders are categories")
    }

    /// The chain `0 <= 1 <= ... <= n-1`.
    pub fn chain(n: usize) -> FinCat {
        FinCat::preorder(n, |i, j| i <= j)
    }

    /// `0 -> 1`.
    pub fn walking_arrow() -> FinCat {
        FinCat::chain(2)
    }

    /// Two parallel arrows `f, g: 0 -> 1`.
    pub fn parallel_pair() -> FinCat {
        let objects = vec![Arc::from("0"), Arc::from("1")];
        let arrows = vec![
            Arrow { name: Arc::from("id0"), src: 0, dst: 0 },
            Arrow { name: Arc::from("id1"), src: 1, dst: 1 },
            Arrow { name: Arc::from("f"), src: 0, dst: 1 },
            Arrow { name: Arc::from("g"), src: 0, dst: 1 },
        ];
        FinCat::generate(objects, arrows, vec![0, 1], |f, g| match (f, g) {
            (0, 0) => Some(0),
            (1, 1) => Some(1),
            (0, h) if h >= 2 => Some(h),
            (h, 1) if h >= 2 => Some(h),
            _ => None,
        })
        .expect("parallel pair is a category")
    }

    /// A one-object category from a monoid. Element 0 is the unit and
    /// `mul(f, g)` is the composite "first `f`, then `g`".
    pub fn monoid(names: &[&str], mul: impl Fn(u32, u32) -> u32) -> Result<FinCat, FinError> {
        let arrows = names.iter().map(|n| Arrow { name: Arc::from(*n), src: 0, dst: 0 }).collect();
        FinCat::generate(vec![Arc::from("*")], arrows, vec![0], |f, g| Some(mul(f, g)))
    }

    /// The cyclic group of order `n` as a one-object category.
    pub fn cyclic(n: usize) -> FinCat {
        let names: Vec<String> = (0..n).map(|i| if i == 0 { "e".to_string() } else { format!("r{i}") }).collect();
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        FinCat::monoid(&refs, |f, g| (f + g) % n as u32).expect("groups are monoids")
    }

    pub fn z2() -> FinCat {
        FinCat::cyclic(2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_categories_validate() {
        for c in [
            FinCat::terminal(),
            FinCat::discrete(3),
            FinCat::walking_arrow(),
            FinCat::parallel_pair(),
            FinCat::z2(),
            FinCat::chain(3),
        ] {
            c.validate().unwrap();
            c.opposite().validate().unwrap();
            assert_eq!(c.opposite().opposite(), c);
        }
    }

    #[test]
    fn broken_identity_law_is_reported() {
        let c = FinCat::walking_arrow();
        let f = c.arrow_index("0<=1").unwrap();
        let id1 = c.id(1);
        let m = c.n_arrows();
        let mut compose = c.compose.clone();
        compose[f as usize * m + id1 as usize] = Some(c.id(0));
        let broken = FinCat::from_raw(c.objects.clone(), c.arrows.clone(), c.identities.clone(), compose);
        assert!(broken.validate().is_err());
    }

    #[test]
    fn opposite_of_walking_arrow_reverses_it() {
        let op = FinCat::walking_arrow().opposite();
        let f = op.arrow_index("0<=1").unwrap();
        assert_eq!((op.src(f), op.dst(f)), (1, 0));
    }

    #[test]
    fn product_counts() {
        let p = FinCat::discrete(2).product(&FinCat::discrete(3));
        p.validate().unwrap();
        assert!(p.is_discrete());
        assert_eq!(p.n_objects(), 6);
        let q = FinCat::walking_arrow().product(&FinCat::z2());
        q.validate().unwrap();
        assert_eq!(q.n_arrows(), 3 * 2);
        let t = FinCat::terminal().product(&FinCat::parallel_pair());
        assert_eq!(t.n_objects(), 2);
        assert_eq!(t.n_arrows(), 4);
    }

    #[test]
    fn monoid_rejects_non_associative_table() {
        // unit 0, and a*a = b, a*b = a, b*a = b, b*b = a
        let table = [[0, 1, 2], [1, 2, 1], [2, 2, 1]];
        assert!(FinCat::monoid(&["e", "a", "b"], |f, g| table[f as usize][g as usize]).is_err());
    }
}
