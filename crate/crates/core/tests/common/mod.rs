#![allow(dead_code)]

use std::path::{Path, PathBuf};

use proptest::prelude::*;

use c2_core::fincat::file::BaseAssignment;
use c2_core::fincat::FinCat;
use c2_core::syntax::{CoTermExpr, Expr, Name, StatementExpr, TermExpr, TypeExpr};

pub fn corpus_dir(sub: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(sub)
}

pub fn corpus_files(sub: &str) -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(corpus_dir(sub)).unwrap().map(|e| e.unwrap().path()).collect();
    files.retain(|p| p.extension().is_some_and(|e| e == "c2"));
    files.sort();
    files
}

pub fn mixed_bases() -> BaseAssignment {
    BaseAssignment::default()
        .with("A", FinCat::walking_arrow())
        .with("B", FinCat::discrete(2))
        .with("C", FinCat::z2())
}

const NAMES: [&str; 6] = ["x", "y", "z", "a", "b", "k"];

fn name() -> impl Strategy<Value = Name> {
    prop::sample::select(&NAMES[..]).prop_map(Name::new)
}

pub fn ty() -> impl Strategy<Value = TypeExpr> {
    let leaf = prop_oneof![
        Just(TypeExpr::Top),
        Just(TypeExpr::Bot),
        Just(TypeExpr::base("A")),
        Just(TypeExpr::base("B")),
    ];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| TypeExpr::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| TypeExpr::or(a, b)),
            inner.prop_map(TypeExpr::not),
        ]
    })
}

#[derive(Clone, Debug)]
enum Node {
    Leaf(u8),
    Un(u8, Box<Node>),
    Bin(u8, Box<Node>, Box<Node>),
}

fn node() -> impl Strategy<Value = Node> {
    any::<u8>().prop_map(Node::Leaf).prop_recursive(5, 48, 2, |inner| {
        prop_oneof![
            (any::<u8>(), inner.clone()).prop_map(|(t, n)| Node::Un(t, Box::new(n))),
            (any::<u8>(), inner.clone(), inner).prop_map(|(t, a, b)| Node::Bin(t, Box::new(a), Box::new(b))),
        ]
    })
}

/// Untyped syntax trees over a small name pool, so binders shadow and
/// capture-prone substitutions come up often.
struct Build<'a> {
    names: &'a [Name],
    types: &'a [TypeExpr],
}

impl Build<'_> {
    fn name(&self, t: u8) -> Name {
        self.names[t as usize % self.names.len()].clone()
    }

    fn ty(&self, t: u8) -> TypeExpr {
        self.types[t as usize % self.types.len()].clone()
    }

    fn term(&self, n: &Node) -> TermExpr {
        match n {
            Node::Leaf(t) if t % 4 == 0 => TermExpr::Unit,
            Node::Leaf(t) => TermExpr::Var(self.name(*t)),
            Node::Un(t, m) => match t % 4 {
                0 => TermExpr::Inl(Box::new(self.term(m))),
                1 => TermExpr::Inr(Box::new(self.term(m))),
                2 => TermExpr::NotIntro(Box::new(self.coterm(m))),
                _ => TermExpr::Mu(self.name(t / 4), Box::new(self.stmt_un(*t, m))),
            },
            Node::Bin(t, a, b) => match t % 2 {
                0 => TermExpr::Pair(Box::new(self.term(a)), Box::new(self.term(b))),
                _ => TermExpr::Mu(self.name(t / 2), Box::new(self.stmt(*t, a, b))),
            },
        }
    }

    fn coterm(&self, n: &Node) -> CoTermExpr {
        match n {
            Node::Leaf(t) if t % 4 == 0 => CoTermExpr::CoUnit,
            Node::Leaf(t) => CoTermExpr::CoVar(self.name(*t)),
            Node::Un(t, m) => match t % 4 {
                0 => CoTermExpr::Fst(Box::new(self.coterm(m))),
                1 => CoTermExpr::Snd(Box::new(self.coterm(m))),
                2 => CoTermExpr::NotElim(Box::new(self.term(m))),
                _ => CoTermExpr::MuTilde(self.name(t / 4), Box::new(self.stmt_un(*t, m))),
            },
            Node::Bin(t, a, b) => match t % 2 {
                0 => CoTermExpr::Case(Box::new(self.coterm(a)), Box::new(self.coterm(b))),
                _ => CoTermExpr::MuTilde(self.name(t / 2), Box::new(self.stmt(*t, a, b))),
            },
        }
    }

    fn stmt(&self, t: u8, a: &Node, b: &Node) -> StatementExpr {
        StatementExpr::cut(self.term(a), self.coterm(b), self.ty(t / 3))
    }

    fn stmt_un(&self, t: u8, m: &Node) -> StatementExpr {
        StatementExpr::cut(self.term(m), CoTermExpr::CoVar(self.name(t / 8)), self.ty(t / 5))
    }
}

fn build(n: &Node, sort: u8, types: &[TypeExpr]) -> Expr {
    let names: Vec<Name> = NAMES.iter().map(|s| Name::new(*s)).collect();
    let b = Build { names: &names, types };
    match (sort % 3, n) {
        (0, _) => Expr::Term(b.term(n)),
        (1, _) => Expr::CoTerm(b.coterm(n)),
        (_, Node::Bin(t, l, r)) => Expr::Statement(b.stmt(*t, l, r)),
        (_, _) => Expr::Statement(b.stmt_un(sort, n)),
    }
}

/// Random raw expressions of any sort.
pub fn expr() -> impl Strategy<Value = Expr> {
    (node(), any::<u8>(), prop::collection::vec(ty(), 1..4)).prop_map(|(n, s, ts)| build(&n, s, &ts))
}

pub fn term() -> impl Strategy<Value = TermExpr> {
    (node(), prop::collection::vec(ty(), 1..3)).prop_map(|(n, ts)| match build(&n, 0, &ts) {
        Expr::Term(t) => t,
        _ => unreachable!(),
    })
}

pub fn coterm() -> impl Strategy<Value = CoTermExpr> {
    (node(), prop::collection::vec(ty(), 1..3)).prop_map(|(n, ts)| match build(&n, 1, &ts) {
        Expr::CoTerm(k) => k,
        _ => unreachable!(),
    })
}

pub fn pool_name() -> impl Strategy<Value = Name> {
    name()
}
