use std::fmt;
use std::sync::Arc;

/// An element of a finite set. Elements record how they were built, so maps
/// between constructed sets can be written elementwise.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Elem {
    Unit,
    Arrow(Arc<str>),
    Pair(Arc<(Elem, Elem)>),
    /// A coend class: the diagonal object and the representative element.
    Class(Arc<(u32, Elem)>),
}

impl Elem {
    pub fn arrow(name: &str) -> Elem {
        Elem::Arrow(Arc::from(name))
    }

    pub fn pair(a: Elem, b: Elem) -> Elem {
        Elem::Pair(Arc::new((a, b)))
    }

    pub fn class(obj: u32, e: Elem) -> Elem {
        Elem::Class(Arc::new((obj, e)))
    }

    pub fn as_pair(&self) -> Option<(&Elem, &Elem)> {
        match self {
            Elem::Pair(p) => Some((&p.0, &p.1)),
            _ => None,
        }
    }

    pub fn as_class(&self) -> Option<(u32, &Elem)> {
        match self {
            Elem::Class(c) => Some((c.0, &c.1)),
            _ => None,
        }
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Elem::Unit => f.write_str("*"),
            Elem::Arrow(a) => f.write_str(a),
            Elem::Pair(p) => write!(f, "({}, {})", p.0, p.1),
            Elem::Class(c) => write!(f, "[{}: {}]", c.0, c.1),
        }
    }
}

impl fmt::Debug for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A finite set: sorted, duplicate-free elements.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct FinSet(Arc<Vec<Elem>>);

impl FinSet {
    pub fn new(mut elems: Vec<Elem>) -> Self {
        elems.sort();
        elems.dedup();
        FinSet(Arc::new(elems))
    }

    pub fn empty() -> Self {
        FinSet::default()
    }

    pub fn singleton(e: Elem) -> Self {
        FinSet(Arc::new(vec![e]))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn elems(&self) -> &[Elem] {
        &self.0
    }

    pub fn get(&self, i: u32) -> &Elem {
        &self.0[i as usize]
    }

    pub fn index_of(&self, e: &Elem) -> Option<u32> {
        self.0.binary_search(e).ok().map(|i| i as u32)
    }

    pub fn contains(&self, e: &Elem) -> bool {
        self.index_of(e).is_some()
    }
}

impl fmt::Debug for FinSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.0.iter()).finish()
    }
}

/// A total map between finite sets, by element index.
pub type SetMap = Vec<u32>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sets_are_sorted_and_deduplicated() {
        let s = FinSet::new(vec![Elem::arrow("g"), Elem::arrow("f"), Elem::arrow("g")]);
        assert_eq!(s.len(), 2);
        assert_eq!(s.index_of(&Elem::arrow("f")), Some(0));
        assert_eq!(s.index_of(&Elem::Unit), None);
    }

    #[test]
    fn class_order_follows_object_then_element() {
        let a = Elem::class(0, Elem::arrow("z"));
        let b = Elem::class(1, Elem::arrow("a"));
        assert!(a < b);
        assert_eq!(b.to_string(), "[1: a]");
    }
}
