//! Abstract syntax of the calculus: types, terms, co-terms, statements and
//! reduction witnesses, together with binding operations.
//!
//! Variables and covariables share one namespace. A binder `mu a. S` or
//! `mu~ x. S` shadows every occurrence of its name in `S`, whatever kind the
//! occurrence has; the kind of an occurrence comes from its syntactic
//! position (`Var` vs `CoVar`).

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// An identifier for a variable, covariable, type definition or declaration.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Name(Arc<str>);

impl Name {
    pub fn new(s: impl AsRef<str>) -> Self {
        Name(Arc::from(s.as_ref()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Name {
    fn from(s: &str) -> Self {
        Name::new(s)
    }
}

impl From<String> for Name {
    fn from(s: String) -> Self {
        Name::new(s)
    }
}

/// Whether a name occurs in term position or co-term position.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Kind {
    Variable,
    Covariable,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kind::Variable => f.write_str("variable"),
            Kind::Covariable => f.write_str("covariable"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TypeExpr {
    Top,
    Bot,
    And(Box<TypeExpr>, Box<TypeExpr>),
    Or(Box<TypeExpr>, Box<TypeExpr>),
    Not(Box<TypeExpr>),
    /// Atomic type, interpreted through a base assignment.
    Base(Name),
}

impl TypeExpr {
    pub fn base(name: &str) -> Self {
        TypeExpr::Base(Name::new(name))
    }

    pub fn and(a: TypeExpr, b: TypeExpr) -> Self {
        TypeExpr::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: TypeExpr, b: TypeExpr) -> Self {
        TypeExpr::Or(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: TypeExpr) -> Self {
        TypeExpr::Not(Box::new(a))
    }

    /// Base type names occurring in the type.
    pub fn base_names(&self, out: &mut BTreeSet<Name>) {
        match self {
            TypeExpr::Top | TypeExpr::Bot => {}
            TypeExpr::And(a, b) | TypeExpr::Or(a, b) => {
                a.base_names(out);
                b.base_names(out);
            }
            TypeExpr::Not(a) => a.base_names(out),
            TypeExpr::Base(n) => {
                out.insert(n.clone());
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TermExpr {
    Var(Name),
    Mu(Name, Box<StatementExpr>),
    Unit,
    Pair(Box<TermExpr>, Box<TermExpr>),
    Inl(Box<TermExpr>),
    Inr(Box<TermExpr>),
    /// `not+ K`: a term of `~A` built from a co-term of `A`.
    NotIntro(Box<CoTermExpr>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum CoTermExpr {
    CoVar(Name),
    MuTilde(Name, Box<StatementExpr>),
    CoUnit,
    Fst(Box<CoTermExpr>),
    Snd(Box<CoTermExpr>),
    Case(Box<CoTermExpr>, Box<CoTermExpr>),
    /// `not- M`: a co-term of `~A` built from a term of `A`.
    NotElim(Box<TermExpr>),
}

/// The cut `<term | coterm : cut_type>`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StatementExpr {
    pub term: TermExpr,
    pub coterm: CoTermExpr,
    pub cut_type: TypeExpr,
}

impl StatementExpr {
    pub fn cut(term: TermExpr, coterm: CoTermExpr, cut_type: TypeExpr) -> Self {
        StatementExpr { term, coterm, cut_type }
    }
}

/// The three syntactic sorts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sort {
    Term,
    CoTerm,
    Statement,
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sort::Term => f.write_str("term"),
            Sort::CoTerm => f.write_str("co-term"),
            Sort::Statement => f.write_str("statement"),
        }
    }
}

/// An arbitrary term, co-term or statement.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Term(TermExpr),
    CoTerm(CoTermExpr),
    Statement(StatementExpr),
}

impl Expr {
    pub fn sort(&self) -> Sort {
        match self {
            Expr::Term(_) => Sort::Term,
            Expr::CoTerm(_) => Sort::CoTerm,
            Expr::Statement(_) => Sort::Statement,
        }
    }

    pub fn free_vars(&self) -> BTreeSet<(Name, Kind)> {
        free_vars(self)
    }
}

impl From<TermExpr> for Expr {
    fn from(t: TermExpr) -> Self {
        Expr::Term(t)
    }
}

impl From<CoTermExpr> for Expr {
    fn from(k: CoTermExpr) -> Self {
        Expr::CoTerm(k)
    }
}

impl From<StatementExpr> for Expr {
    fn from(s: StatementExpr) -> Self {
        Expr::Statement(s)
    }
}

/// Short constructors used throughout the tests and generators.
pub mod build {
    use super::*;

    pub fn var(x: &str) -> TermExpr {
        TermExpr::Var(Name::new(x))
    }
    pub fn covar(a: &str) -> CoTermExpr {
        CoTermExpr::CoVar(Name::new(a))
    }
    pub fn mu(a: &str, s: StatementExpr) -> TermExpr {
        TermExpr::Mu(Name::new(a), Box::new(s))
    }
    pub fn mutilde(x: &str, s: StatementExpr) -> CoTermExpr {
        CoTermExpr::MuTilde(Name::new(x), Box::new(s))
    }
    pub fn cut(m: TermExpr, k: CoTermExpr, a: TypeExpr) -> StatementExpr {
        StatementExpr::cut(m, k, a)
    }
    pub fn pair(m: TermExpr, n: TermExpr) -> TermExpr {
        TermExpr::Pair(Box::new(m), Box::new(n))
    }
    pub fn inl(m: TermExpr) -> TermExpr {
        TermExpr::Inl(Box::new(m))
    }
    pub fn inr(m: TermExpr) -> TermExpr {
        TermExpr::Inr(Box::new(m))
    }
    pub fn not_intro(k: CoTermExpr) -> TermExpr {
        TermExpr::NotIntro(Box::new(k))
    }
    pub fn fst(k: CoTermExpr) -> CoTermExpr {
        CoTermExpr::Fst(Box::new(k))
    }
    pub fn snd(k: CoTermExpr) -> CoTermExpr {
        CoTermExpr::Snd(Box::new(k))
    }
    pub fn case(j: CoTermExpr, k: CoTermExpr) -> CoTermExpr {
        CoTermExpr::Case(Box::new(j), Box::new(k))
    }
    pub fn not_elim(m: TermExpr) -> CoTermExpr {
        CoTermExpr::NotElim(Box::new(m))
    }
    pub fn base(a: &str) -> TypeExpr {
        TypeExpr::base(a)
    }
}

/// A reduction witness. Every beta constructor carries an optional
/// annotation with the type of the redex cut, used when that type cannot be
/// read off the arguments.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ReductionExpr {
    Refl(Expr),
    Trans(Box<ReductionExpr>, Box<ReductionExpr>),
    BetaMu {
        coterm: CoTermExpr,
        binder: Name,
        body: StatementExpr,
        ann: Option<TypeExpr>,
    },
    BetaMuTilde {
        term: TermExpr,
        binder: Name,
        body: StatementExpr,
        ann: Option<TypeExpr>,
    },
    BetaFst {
        first: TermExpr,
        second: TermExpr,
        coterm: CoTermExpr,
        ann: Option<TypeExpr>,
    },
    BetaSnd {
        first: TermExpr,
        second: TermExpr,
        coterm: CoTermExpr,
        ann: Option<TypeExpr>,
    },
    BetaInl {
        left: CoTermExpr,
        right: CoTermExpr,
        term: TermExpr,
        ann: Option<TypeExpr>,
    },
    BetaInr {
        left: CoTermExpr,
        right: CoTermExpr,
        term: TermExpr,
        ann: Option<TypeExpr>,
    },
    BetaNot {
        term: TermExpr,
        coterm: CoTermExpr,
        ann: Option<TypeExpr>,
    },
    CongMu(Name, Box<ReductionExpr>),
    CongMuTilde(Name, Box<ReductionExpr>),
    CongCut(Box<ReductionExpr>, Box<ReductionExpr>, TypeExpr),
    CongPair(Box<ReductionExpr>, Box<ReductionExpr>),
    CongInl(Box<ReductionExpr>),
    CongInr(Box<ReductionExpr>),
    CongFst(Box<ReductionExpr>),
    CongSnd(Box<ReductionExpr>),
    CongCase(Box<ReductionExpr>, Box<ReductionExpr>),
    CongNotIntro(Box<ReductionExpr>),
    CongNotElim(Box<ReductionExpr>),
}

// ---------------------------------------------------------------------------
// Free variables

pub fn free_vars(e: &Expr) -> BTreeSet<(Name, Kind)> {
    let mut out = BTreeSet::new();
    let mut bound = Vec::new();
    match e {
        Expr::Term(t) => fv_term(t, &mut bound, &mut out),
        Expr::CoTerm(k) => fv_coterm(k, &mut bound, &mut out),
        Expr::Statement(s) => fv_stmt(s, &mut bound, &mut out),
    }
    out
}

/// Free names of an expression, ignoring kinds.
pub fn free_names(e: &Expr) -> BTreeSet<Name> {
    free_vars(e).into_iter().map(|(n, _)| n).collect()
}

fn fv_term(t: &TermExpr, bound: &mut Vec<Name>, out: &mut BTreeSet<(Name, Kind)>) {
    match t {
        TermExpr::Var(x) => {
            if !bound.contains(x) {
                out.insert((x.clone(), Kind::Variable));
            }
        }
        TermExpr::Mu(a, s) => {
            bound.push(a.clone());
            fv_stmt(s, bound, out);
            bound.pop();
        }
        TermExpr::Unit => {}
        TermExpr::Pair(m, n) => {
            fv_term(m, bound, out);
            fv_term(n, bound, out);
        }
        TermExpr::Inl(m) | TermExpr::Inr(m) => fv_term(m, bound, out),
        TermExpr::NotIntro(k) => fv_coterm(k, bound, out),
    }
}

fn fv_coterm(k: &CoTermExpr, bound: &mut Vec<Name>, out: &mut BTreeSet<(Name, Kind)>) {
    match k {
        CoTermExpr::CoVar(a) => {
            if !bound.contains(a) {
                out.insert((a.clone(), Kind::Covariable));
            }
        }
        CoTermExpr::MuTilde(x, s) => {
            bound.push(x.clone());
            fv_stmt(s, bound, out);
            bound.pop();
        }
        CoTermExpr::CoUnit => {}
        CoTermExpr::Fst(k) | CoTermExpr::Snd(k) => fv_coterm(k, bound, out),
        CoTermExpr::Case(j, k) => {
            fv_coterm(j, bound, out);
            fv_coterm(k, bound, out);
        }
        CoTermExpr::NotElim(m) => fv_term(m, bound, out),
    }
}

fn fv_stmt(s: &StatementExpr, bound: &mut Vec<Name>, out: &mut BTreeSet<(Name, Kind)>) {
    fv_term(&s.term, bound, out);
    fv_coterm(&s.coterm, bound, out);
}

/// Every name occurring anywhere in the expression, bound or free.
pub fn all_names(e: &Expr, out: &mut BTreeSet<Name>) {
    match e {
        Expr::Term(t) => names_term(t, out),
        Expr::CoTerm(k) => names_coterm(k, out),
        Expr::Statement(s) => names_stmt(s, out),
    }
}

fn names_term(t: &TermExpr, out: &mut BTreeSet<Name>) {
    match t {
        TermExpr::Var(x) => {
            out.insert(x.clone());
        }
        TermExpr::Mu(a, s) => {
            out.insert(a.clone());
            names_stmt(s, out);
        }
        TermExpr::Unit => {}
        TermExpr::Pair(m, n) => {
            names_term(m, out);
            names_term(n, out);
        }
        TermExpr::Inl(m) | TermExpr::Inr(m) => names_term(m, out),
        TermExpr::NotIntro(k) => names_coterm(k, out),
    }
}

fn names_coterm(k: &CoTermExpr, out: &mut BTreeSet<Name>) {
    match k {
        CoTermExpr::CoVar(a) => {
            out.insert(a.clone());
        }
        CoTermExpr::MuTilde(x, s) => {
            out.insert(x.clone());
            names_stmt(s, out);
        }
        CoTermExpr::CoUnit => {}
        CoTermExpr::Fst(k) | CoTermExpr::Snd(k) => names_coterm(k, out),
        CoTermExpr::Case(j, k) => {
            names_coterm(j, out);
            names_coterm(k, out);
        }
        CoTermExpr::NotElim(m) => names_term(m, out),
    }
}

fn names_stmt(s: &StatementExpr, out: &mut BTreeSet<Name>) {
    names_term(&s.term, out);
    names_coterm(&s.coterm, out);
}

// ---------------------------------------------------------------------------
// Fresh names

/// Returns `hint` if it is not in `avoid`, otherwise the hint's stem (with
/// any trailing digits removed) followed by the smallest positive integer
/// giving a name outside `avoid`.
pub fn fresh_name(avoid: &BTreeSet<Name>, hint: &Name) -> Name {
    if !avoid.contains(hint) {
        return hint.clone();
    }
    let stem = hint.as_str().trim_end_matches(|c: char| c.is_ascii_digit());
    let stem = if stem.is_empty() { hint.as_str() } else { stem };
    (1u64..)
        .map(|i| Name::new(format!("{stem}{i}")))
        .find(|n| !avoid.contains(n))
        .expect("unbounded suffix search")
}

// ---------------------------------------------------------------------------
// Alpha-equivalence

/// Binder correspondence used while comparing two expressions.
struct AlphaEnv<'a> {
    pairs: Vec<(&'a Name, &'a Name)>,
}

impl<'a> AlphaEnv<'a> {
    fn same_occurrence(&self, x: &Name, y: &Name) -> bool {
        for (l, r) in self.pairs.iter().rev() {
            let hit_l = *l == x;
            let hit_r = *r == y;
            if hit_l || hit_r {
                return hit_l && hit_r;
            }
        }
        x == y
    }
}

pub fn alpha_eq(a: &Expr, b: &Expr) -> bool {
    let mut env = AlphaEnv { pairs: Vec::new() };
    match (a, b) {
        (Expr::Term(x), Expr::Term(y)) => ae_term(x, y, &mut env),
        (Expr::CoTerm(x), Expr::CoTerm(y)) => ae_coterm(x, y, &mut env),
        (Expr::Statement(x), Expr::Statement(y)) => ae_stmt(x, y, &mut env),
        _ => false,
    }
}

fn ae_term<'a>(a: &'a TermExpr, b: &'a TermExpr, env: &mut AlphaEnv<'a>) -> bool {
    use TermExpr::*;
    match (a, b) {
        (Var(x), Var(y)) => env.same_occurrence(x, y),
        (Mu(x, s), Mu(y, t)) => {
            env.pairs.push((x, y));
            let r = ae_stmt(s, t, env);
            env.pairs.pop();
            r
        }
        (Unit, Unit) => true,
        (Pair(m1, n1), Pair(m2, n2)) => ae_term(m1, m2, env) && ae_term(n1, n2, env),
        (Inl(m1), Inl(m2)) | (Inr(m1), Inr(m2)) => ae_term(m1, m2, env),
        (NotIntro(k1), NotIntro(k2)) => ae_coterm(k1, k2, env),
        _ => false,
    }
}

fn ae_coterm<'a>(a: &'a CoTermExpr, b: &'a CoTermExpr, env: &mut AlphaEnv<'a>) -> bool {
    use CoTermExpr::*;
    match (a, b) {
        (CoVar(x), CoVar(y)) => env.same_occurrence(x, y),
        (MuTilde(x, s), MuTilde(y, t)) => {
            env.pairs.push((x, y));
            let r = ae_stmt(s, t, env);
            env.pairs.pop();
            r
        }
        (CoUnit, CoUnit) => true,
        (Fst(k1), Fst(k2)) | (Snd(k1), Snd(k2)) => ae_coterm(k1, k2, env),
        (Case(j1, k1), Case(j2, k2)) => ae_coterm(j1, j2, env) && ae_coterm(k1, k2, env),
        (NotElim(m1), NotElim(m2)) => ae_term(m1, m2, env),
        _ => false,
    }
}

fn ae_stmt<'a>(a: &'a StatementExpr, b: &'a StatementExpr, env: &mut AlphaEnv<'a>) -> bool {
    a.cut_type == b.cut_type && ae_term(&a.term, &b.term, env) && ae_coterm(&a.coterm, &b.coterm, env)
}

// ---------------------------------------------------------------------------
// Substitution

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SubstError {
    #[error("cannot substitute a {found} for the {kind} `{target}`")]
    KindMismatch { target: Name, kind: Kind, found: Sort },
}

/// One pending replacement of a free name. Occurrences of `target` in term
/// position are replaced by `term`, those in co-term position by `coterm`;
/// a missing side leaves that kind of occurrence untouched.
struct Replace<'a> {
    target: &'a Name,
    term: Option<&'a TermExpr>,
    coterm: Option<&'a CoTermExpr>,
    fv: BTreeSet<Name>,
}

impl<'a> Replace<'a> {
    fn new(target: &'a Name, term: Option<&'a TermExpr>, coterm: Option<&'a CoTermExpr>) -> Self {
        let mut fv = BTreeSet::new();
        if let Some(t) = term {
            fv.extend(free_names(&Expr::Term(t.clone())));
        }
        if let Some(k) = coterm {
            fv.extend(free_names(&Expr::CoTerm(k.clone())));
        }
        Replace { target, term, coterm, fv }
    }

    fn term(&self, t: &TermExpr) -> TermExpr {
        match t {
            TermExpr::Var(x) => match self.term {
                Some(r) if x == self.target => r.clone(),
                _ => t.clone(),
            },
            TermExpr::Mu(a, s) => {
                let (a, s) = self.binder(a, s);
                TermExpr::Mu(a, Box::new(s))
            }
            TermExpr::Unit => TermExpr::Unit,
            TermExpr::Pair(m, n) => TermExpr::Pair(Box::new(self.term(m)), Box::new(self.term(n))),
            TermExpr::Inl(m) => TermExpr::Inl(Box::new(self.term(m))),
            TermExpr::Inr(m) => TermExpr::Inr(Box::new(self.term(m))),
            TermExpr::NotIntro(k) => TermExpr::NotIntro(Box::new(self.coterm(k))),
        }
    }

    fn coterm(&self, k: &CoTermExpr) -> CoTermExpr {
        match k {
            CoTermExpr::CoVar(a) => match self.coterm {
                Some(r) if a == self.target => r.clone(),
                _ => k.clone(),
            },
            CoTermExpr::MuTilde(x, s) => {
                let (x, s) = self.binder(x, s);
                CoTermExpr::MuTilde(x, Box::new(s))
            }
            CoTermExpr::CoUnit => CoTermExpr::CoUnit,
            CoTermExpr::Fst(k) => CoTermExpr::Fst(Box::new(self.coterm(k))),
            CoTermExpr::Snd(k) => CoTermExpr::Snd(Box::new(self.coterm(k))),
            CoTermExpr::Case(j, k) => CoTermExpr::Case(Box::new(self.coterm(j)), Box::new(self.coterm(k))),
            CoTermExpr::NotElim(m) => CoTermExpr::NotElim(Box::new(self.term(m))),
        }
    }

    fn stmt(&self, s: &StatementExpr) -> StatementExpr {
        StatementExpr {
            term: self.term(&s.term),
            coterm: self.coterm(&s.coterm),
            cut_type: s.cut_type.clone(),
        }
    }

    fn binder(&self, b: &Name, body: &StatementExpr) -> (Name, StatementExpr) {
        if b == self.target {
            return (b.clone(), body.clone());
        }
        let body_fv = free_names(&Expr::Statement(body.clone()));
        if !body_fv.contains(self.target) || !self.fv.contains(b) {
            return (b.clone(), self.stmt(body));
        }
        let mut avoid = body_fv;
        avoid.extend(self.fv.iter().cloned());
        avoid.insert(self.target.clone());
        let fresh = fresh_name(&avoid, b);
        let renamed = rename_stmt(body, b, &fresh);
        (fresh, self.stmt(&renamed))
    }
}

/// Capture-avoiding replacement of the free name `old` by `new`, for
/// occurrences of either kind.
pub fn rename_stmt(s: &StatementExpr, old: &Name, new: &Name) -> StatementExpr {
    let t = TermExpr::Var(new.clone());
    let k = CoTermExpr::CoVar(new.clone());
    Replace::new(old, Some(&t), Some(&k)).stmt(s)
}

pub fn rename_expr(e: &Expr, old: &Name, new: &Name) -> Expr {
    let t = TermExpr::Var(new.clone());
    let k = CoTermExpr::CoVar(new.clone());
    let r = Replace::new(old, Some(&t), Some(&k));
    match e {
        Expr::Term(x) => Expr::Term(r.term(x)),
        Expr::CoTerm(x) => Expr::CoTerm(r.coterm(x)),
        Expr::Statement(x) => Expr::Statement(r.stmt(x)),
    }
}

/// Capture-avoiding substitution `e[replacement/target]`. A term replaces
/// the variable `target`; a co-term replaces the covariable `target`.
pub fn subst(e: &Expr, target: &Name, kind: Kind, replacement: &Expr) -> Result<Expr, SubstError> {
    let r = match (kind, replacement) {
        (Kind::Variable, Expr::Term(t)) => Replace::new(target, Some(t), None),
        (Kind::Covariable, Expr::CoTerm(k)) => Replace::new(target, None, Some(k)),
        (kind, other) => {
            return Err(SubstError::KindMismatch {
                target: target.clone(),
                kind,
                found: other.sort(),
            })
        }
    };
    Ok(match e {
        Expr::Term(x) => Expr::Term(r.term(x)),
        Expr::CoTerm(x) => Expr::CoTerm(r.coterm(x)),
        Expr::Statement(x) => Expr::Statement(r.stmt(x)),
    })
}

/// `s[m/x]` on statements.
pub fn subst_var_stmt(s: &StatementExpr, x: &Name, m: &TermExpr) -> StatementExpr {
    Replace::new(x, Some(m), None).stmt(s)
}

/// `s[k/a]` on statements.
pub fn subst_covar_stmt(s: &StatementExpr, a: &Name, k: &CoTermExpr) -> StatementExpr {
    Replace::new(a, None, Some(k)).stmt(s)
}

// ---------------------------------------------------------------------------
// Names inside reduction witnesses

impl ReductionExpr {
    /// Every name occurring anywhere in the witness.
    pub fn all_names(&self, out: &mut BTreeSet<Name>) {
        use ReductionExpr::*;
        let ty = |t: &TermExpr, out: &mut BTreeSet<Name>| names_term(t, out);
        match self {
            Refl(e) => all_names(e, out),
            Trans(p, q) | CongCut(p, q, _) | CongPair(p, q) | CongCase(p, q) => {
                p.all_names(out);
                q.all_names(out);
            }
            BetaMu { coterm, binder, body, .. } => {
                names_coterm(coterm, out);
                out.insert(binder.clone());
                names_stmt(body, out);
            }
            BetaMuTilde { term, binder, body, .. } => {
                ty(term, out);
                out.insert(binder.clone());
                names_stmt(body, out);
            }
            BetaFst { first, second, coterm, .. } | BetaSnd { first, second, coterm, .. } => {
                ty(first, out);
                ty(second, out);
                names_coterm(coterm, out);
            }
            BetaInl { left, right, term, .. } | BetaInr { left, right, term, .. } => {
                names_coterm(left, out);
                names_coterm(right, out);
                ty(term, out);
            }
            BetaNot { term, coterm, .. } => {
                ty(term, out);
                names_coterm(coterm, out);
            }
            CongMu(a, p) | CongMuTilde(a, p) => {
                out.insert(a.clone());
                p.all_names(out);
            }
            CongInl(p) | CongInr(p) | CongFst(p) | CongSnd(p) | CongNotIntro(p) | CongNotElim(p) => {
                p.all_names(out)
            }
        }
    }

    /// Replaces free occurrences of `old` by `new`. `new` must not occur
    /// anywhere in the witness, which rules out capture.
    pub fn rename_free(&self, old: &Name, new: &Name) -> ReductionExpr {
        use ReductionExpr::*;
        let rt = |t: &TermExpr| match rename_expr(&Expr::Term(t.clone()), old, new) {
            Expr::Term(t) => t,
            _ => unreachable!(),
        };
        let rk = |k: &CoTermExpr| match rename_expr(&Expr::CoTerm(k.clone()), old, new) {
            Expr::CoTerm(k) => k,
            _ => unreachable!(),
        };
        let rb = |b: &Name, s: &StatementExpr| {
            if b == old {
                s.clone()
            } else {
                rename_stmt(s, old, new)
            }
        };
        let r = |p: &ReductionExpr| Box::new(p.rename_free(old, new));
        match self {
            Refl(e) => Refl(rename_expr(e, old, new)),
            Trans(p, q) => Trans(r(p), r(q)),
            BetaMu { coterm, binder, body, ann } => BetaMu {
                coterm: rk(coterm),
                binder: binder.clone(),
                body: rb(binder, body),
                ann: ann.clone(),
            },
            BetaMuTilde { term, binder, body, ann } => BetaMuTilde {
                term: rt(term),
                binder: binder.clone(),
                body: rb(binder, body),
                ann: ann.clone(),
            },
            BetaFst { first, second, coterm, ann } => BetaFst {
                first: rt(first),
                second: rt(second),
                coterm: rk(coterm),
                ann: ann.clone(),
            },
            BetaSnd { first, second, coterm, ann } => BetaSnd {
                first: rt(first),
                second: rt(second),
                coterm: rk(coterm),
                ann: ann.clone(),
            },
            BetaInl { left, right, term, ann } => BetaInl {
                left: rk(left),
                right: rk(right),
                term: rt(term),
                ann: ann.clone(),
            },
            BetaInr { left, right, term, ann } => BetaInr {
                left: rk(left),
                right: rk(right),
                term: rt(term),
                ann: ann.clone(),
            },
            BetaNot { term, coterm, ann } => BetaNot {
                term: rt(term),
                coterm: rk(coterm),
                ann: ann.clone(),
            },
            CongMu(a, p) if a == old => CongMu(a.clone(), p.clone()),
            CongMu(a, p) => CongMu(a.clone(), r(p)),
            CongMuTilde(x, p) if x == old => CongMuTilde(x.clone(), p.clone()),
            CongMuTilde(x, p) => CongMuTilde(x.clone(), r(p)),
            CongCut(p, q, a) => CongCut(r(p), r(q), a.clone()),
            CongPair(p, q) => CongPair(r(p), r(q)),
            CongInl(p) => CongInl(r(p)),
            CongInr(p) => CongInr(r(p)),
            CongFst(p) => CongFst(r(p)),
            CongSnd(p) => CongSnd(r(p)),
            CongCase(p, q) => CongCase(r(p), r(q)),
            CongNotIntro(p) => CongNotIntro(r(p)),
            CongNotElim(p) => CongNotElim(r(p)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::build::*;
    use super::*;

    fn a() -> TypeExpr {
        base("A")
    }

    fn set(names: &[(&str, Kind)]) -> BTreeSet<(Name, Kind)> {
        names.iter().map(|(n, k)| (Name::new(n), *k)).collect()
    }

    #[test]
    fn free_vars_examples() {
        let s = cut(var("x"), covar("a"), a());
        assert_eq!(
            free_vars(&s.clone().into()),
            set(&[("x", Kind::Variable), ("a", Kind::Covariable)])
        );
        let m = mu("a", cut(var("x"), covar("a"), a()));
        assert_eq!(free_vars(&m.into()), set(&[("x", Kind::Variable)]));
        assert!(free_vars(&TermExpr::Unit.into()).is_empty());
    }

    #[test]
    fn alpha_eq_examples() {
        let l = mu("a", cut(var("x"), covar("a"), a()));
        let r = mu("b", cut(var("x"), covar("b"), a()));
        assert!(alpha_eq(&l.into(), &r.into()));
        assert!(!alpha_eq(&var("x").into(), &var("y").into()));
        assert!(!alpha_eq(
            &pair(var("x"), var("y")).into(),
            &pair(var("y"), var("x")).into()
        ));
    }

    #[test]
    fn alpha_eq_distinguishes_free_from_bound() {
        // mu a. <x | a>  vs  mu x. <x | x> must differ
        let l = mu("a", cut(var("x"), covar("a"), a()));
        let r = mu("x", cut(var("x"), covar("x"), a()));
        assert!(!alpha_eq(&l.into(), &r.into()));
    }

    #[test]
    fn subst_examples() {
        let k = mutilde("y", cut(var("y"), covar("b"), a()));
        let s: Expr = cut(var("x"), covar("a"), a()).into();
        let got = subst(&s, &Name::new("a"), Kind::Covariable, &k.clone().into()).unwrap();
        assert_eq!(got, cut(var("x"), k, a()).into());

        let m = pair(TermExpr::Unit, var("z"));
        let got = subst(&var("x").into(), &Name::new("x"), Kind::Variable, &m.clone().into()).unwrap();
        assert_eq!(got, m.into());

        let bound: Expr = mu("a", cut(var("x"), covar("a"), a())).into();
        let got = subst(&bound, &Name::new("a"), Kind::Covariable, &covar("c").into()).unwrap();
        assert_eq!(got, bound);
    }

    #[test]
    fn subst_kind_mismatch() {
        let e: Expr = var("x").into();
        let err = subst(&e, &Name::new("x"), Kind::Variable, &covar("a").into()).unwrap_err();
        assert!(matches!(err, SubstError::KindMismatch { .. }));
    }

    #[test]
    fn subst_avoids_capture() {
        // (mu b. <x | b>)[mu~ y.<y|b> / ...] style capture: replace x by a term mentioning b
        let e: Expr = mu("b", cut(var("x"), covar("b"), a())).into();
        let repl: Expr = mu("c", cut(var("w"), covar("b"), a())).into();
        let got = subst(&e, &Name::new("x"), Kind::Variable, &repl).unwrap();
        // the free b of the replacement must stay free
        assert!(got.free_vars().contains(&(Name::new("b"), Kind::Covariable)));
        let expected: Expr = mu("b1", cut(mu("c", cut(var("w"), covar("b"), a())), covar("b1"), a())).into();
        assert!(alpha_eq(&got, &expected));
    }

    #[test]
    fn fresh_name_scheme() {
        let avoid: BTreeSet<Name> = [Name::new("x")].into_iter().collect();
        assert_eq!(fresh_name(&avoid, &Name::new("x")), Name::new("x1"));
        assert_eq!(fresh_name(&BTreeSet::new(), &Name::new("y")), Name::new("y"));
        let avoid: BTreeSet<Name> = [Name::new("x"), Name::new("x1")].into_iter().collect();
        assert_eq!(fresh_name(&avoid, &Name::new("x")), Name::new("x2"));
    }

    #[test]
    fn reduction_rename_respects_binders() {
        let r = ReductionExpr::CongMu(
            Name::new("a"),
            Box::new(ReductionExpr::Refl(cut(var("x"), covar("a"), a()).into())),
        );
        let renamed = r.rename_free(&Name::new("a"), &Name::new("q"));
        assert_eq!(renamed, r);
        let renamed = r.rename_free(&Name::new("x"), &Name::new("q"));
        let expected = ReductionExpr::CongMu(
            Name::new("a"),
            Box::new(ReductionExpr::Refl(cut(var("q"), covar("a"), a()).into())),
        );
        assert_eq!(renamed, expected);
    }
}
