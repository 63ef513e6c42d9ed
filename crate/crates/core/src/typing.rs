//! Type checking for terms, co-terms, statements and reduction witnesses.
//!
//! Checking is bidirectional. `mu`, `mu~`, `inl`, `inr`, `fst` and `snd`
//! only check: their types cannot be read off their arguments. Cuts carry an
//! annotation, which is where the types of those forms come from.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::syntax::{
    alpha_eq, fresh_name, rename_stmt, subst_covar_stmt, subst_var_stmt, CoTermExpr, Expr, Kind,
    Name, ReductionExpr, Sort, StatementExpr, TermExpr, TypeExpr,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Polarity {
    Plus,
    Minus,
}

impl Polarity {
    pub fn kind(self) -> Kind {
        match self {
            Polarity::Plus => Kind::Variable,
            Polarity::Minus => Kind::Covariable,
        }
    }
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Polarity::Plus => f.write_str("+"),
            Polarity::Minus => f.write_str("-"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Hyp {
    pub name: Name,
    pub polarity: Polarity,
    pub ty: TypeExpr,
}

impl Hyp {
    pub fn new(name: &str, polarity: Polarity, ty: TypeExpr) -> Self {
        Hyp { name: Name::new(name), polarity, ty }
    }
}

/// A polarized context. Names are pairwise distinct; order is kept because
/// it fixes the coordinate order of interpretations.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Context {
    hyps: Vec<Hyp>,
}

impl Context {
    pub fn empty() -> Self {
        Context::default()
    }

    pub fn new(hyps: Vec<Hyp>) -> std::result::Result<Self, TypeError> {
        let mut seen = BTreeSet::new();
        for h in &hyps {
            if !seen.insert(h.name.clone()) {
                return Err(TypeError::DuplicateHypothesis { name: h.name.clone() });
            }
        }
        Ok(Context { hyps })
    }

    pub fn hyps(&self) -> &[Hyp] {
        &self.hyps
    }

    pub fn len(&self) -> usize {
        self.hyps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hyps.is_empty()
    }

    pub fn lookup(&self, name: &Name) -> Option<&Hyp> {
        self.hyps.iter().find(|h| &h.name == name)
    }

    pub fn contains(&self, name: &Name) -> bool {
        self.lookup(name).is_some()
    }

    pub fn names(&self) -> BTreeSet<Name> {
        self.hyps.iter().map(|h| h.name.clone()).collect()
    }

    /// Extends the context. Panics if the name is already bound; callers
    /// freshen binders first.
    pub fn extended(&self, name: Name, polarity: Polarity, ty: TypeExpr) -> Context {
        assert!(!self.contains(&name), "hypothesis `{name}` already in context");
        let mut hyps = self.hyps.clone();
        hyps.push(Hyp { name, polarity, ty });
        Context { hyps }
    }

    pub fn without(&self, name: &Name) -> Context {
        Context { hyps: self.hyps.iter().filter(|h| &h.name != name).cloned().collect() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Judgment {
    TermAt(TypeExpr),
    CoTermAt(TypeExpr),
    Absurd,
}

impl Judgment {
    pub fn sort(&self) -> Sort {
        match self {
            Judgment::TermAt(_) => Sort::Term,
            Judgment::CoTermAt(_) => Sort::CoTerm,
            Judgment::Absurd => Sort::Statement,
        }
    }

    pub fn ty(&self) -> Option<&TypeExpr> {
        match self {
            Judgment::TermAt(t) | Judgment::CoTermAt(t) => Some(t),
            Judgment::Absurd => None,
        }
    }
}

impl fmt::Display for Judgment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Judgment::TermAt(t) => write!(f, "+{}", crate::parser::pretty_type_atomic(t)),
            Judgment::CoTermAt(t) => write!(f, "-{}", crate::parser::pretty_type_atomic(t)),
            Judgment::Absurd => f.write_str("#"),
        }
    }
}

/// The typed endpoints of a reduction witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionTyping {
    pub source: Expr,
    pub target: Expr,
    pub judgment: Judgment,
    pub context: Context,
}

/// Inference rules, used for coverage accounting.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    VarR,
    VarL,
    Cut,
    MuIntro,
    MuTildeIntro,
    BetaMu,
    BetaMuTilde,
    Refl,
    Trans,
    CongMu,
    CongMuTilde,
    CongCut,
    TopIntro,
    BotIntro,
    AndIntro,
    AndElim1,
    AndElim2,
    OrElim,
    OrIntro1,
    OrIntro2,
    NotIntro,
    NotElim,
    BetaFst,
    BetaSnd,
    BetaInl,
    BetaInr,
    BetaNot,
    CongPair,
    CongInl,
    CongInr,
    CongFst,
    CongSnd,
    CongCase,
    CongNotIntro,
    CongNotElim,
}

impl Rule {
    pub const STRUCTURAL_TERMS: [Rule; 5] =
        [Rule::VarR, Rule::VarL, Rule::Cut, Rule::MuIntro, Rule::MuTildeIntro];
    pub const STRUCTURAL_REDUCTIONS: [Rule; 7] = [
        Rule::BetaMu,
        Rule::BetaMuTilde,
        Rule::Refl,
        Rule::Trans,
        Rule::CongMu,
        Rule::CongMuTilde,
        Rule::CongCut,
    ];
    pub const LOGICAL_TERMS: [Rule; 10] = [
        Rule::TopIntro,
        Rule::BotIntro,
        Rule::AndIntro,
        Rule::AndElim1,
        Rule::AndElim2,
        Rule::OrElim,
        Rule::OrIntro1,
        Rule::OrIntro2,
        Rule::NotIntro,
        Rule::NotElim,
    ];
    pub const LOGICAL_BETAS: [Rule; 5] =
        [Rule::BetaFst, Rule::BetaSnd, Rule::BetaInl, Rule::BetaInr, Rule::BetaNot];
    pub const CONGRUENCES: [Rule; 8] = [
        Rule::CongPair,
        Rule::CongInl,
        Rule::CongInr,
        Rule::CongFst,
        Rule::CongSnd,
        Rule::CongCase,
        Rule::CongNotIntro,
        Rule::CongNotElim,
    ];

    pub fn all() -> impl Iterator<Item = Rule> {
        Self::STRUCTURAL_TERMS
            .into_iter()
            .chain(Self::STRUCTURAL_REDUCTIONS)
            .chain(Self::LOGICAL_TERMS)
            .chain(Self::LOGICAL_BETAS)
            .chain(Self::CONGRUENCES)
    }

    pub fn label(self) -> &'static str {
        use Rule::*;
        match self {
            VarR => "var+",
            VarL => "var-",
            Cut => "cut",
            MuIntro => "mu",
            MuTildeIntro => "mu~",
            BetaMu => "beta_mu",
            BetaMuTilde => "beta_mu~",
            Refl => "refl",
            Trans => "trans",
            CongMu => "cong_mu",
            CongMuTilde => "cong_mu~",
            CongCut => "cong_cut",
            TopIntro => "+Top",
            BotIntro => "-Bot",
            AndIntro => "+and",
            AndElim1 => "-and1",
            AndElim2 => "-and2",
            OrElim => "-or",
            OrIntro1 => "+or1",
            OrIntro2 => "+or2",
            NotIntro => "+not",
            NotElim => "-not",
            BetaFst => "beta_fst",
            BetaSnd => "beta_snd",
            BetaInl => "beta_inl",
            BetaInr => "beta_inr",
            BetaNot => "beta_not",
            CongPair => "cong_pair",
            CongInl => "cong_inl",
            CongInr => "cong_inr",
            CongFst => "cong_fst",
            CongSnd => "cong_snd",
            CongCase => "cong_case",
            CongNotIntro => "cong_not+",
            CongNotElim => "cong_not-",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("unbound name `{name}`")]
    UnboundName { name: Name },
    #[error("`{name}` is declared {found} but used as a {expected}")]
    PolarityMismatch { name: Name, expected: Kind, found: Polarity },
    #[error("`{subject}` has type {found}, expected {expected}")]
    TypeMismatch { subject: Name, expected: TypeExpr, found: TypeExpr },
    #[error("`{constructor}` cannot be checked at {judgment}")]
    ConnectiveMismatch { constructor: &'static str, judgment: Judgment },
    #[error("cannot infer {what}")]
    CannotInfer { what: String },
    #[error("expected a {expected}, found a {found}")]
    SortMismatch { expected: Sort, found: Sort },
    #[error("cut annotated {annotation} but its {side} has type {found}")]
    CutAnnotation { annotation: TypeExpr, side: &'static str, found: TypeExpr },
    #[error("trans: the first step ends at {left} but the second starts at {right}")]
    EndpointMismatch { left: String, right: String },
    #[error("{rule}: {detail}")]
    BetaArgument { rule: Rule, detail: String },
    #[error("{rule} concludes {found}, but {expected} was required")]
    JudgmentMismatch { rule: Rule, expected: String, found: String },
    #[error("duplicate hypothesis `{name}`")]
    DuplicateHypothesis { name: Name },
}

impl TypeError {
    /// Stable identifier of the error class.
    pub fn class(&self) -> &'static str {
        match self {
            TypeError::UnboundName { .. } => "unbound-name",
            TypeError::PolarityMismatch { .. } => "polarity-mismatch",
            TypeError::TypeMismatch { .. } => "type-mismatch",
            TypeError::ConnectiveMismatch { .. } => "connective-mismatch",
            TypeError::CannotInfer { .. } => "cannot-infer",
            TypeError::SortMismatch { .. } => "sort-mismatch",
            TypeError::CutAnnotation { .. } => "cut-annotation",
            TypeError::EndpointMismatch { .. } => "endpoint-mismatch",
            TypeError::BetaArgument { .. } => "beta-argument",
            TypeError::JudgmentMismatch { .. } => "judgment-mismatch",
            TypeError::DuplicateHypothesis { .. } => "duplicate-hypothesis",
        }
    }
}

type Result<T> = std::result::Result<T, TypeError>;

/// The checker. With tracing enabled it counts every rule application.
#[derive(Default)]
pub struct Checker {
    trace: Option<RefCell<BTreeMap<Rule, usize>>>,
}

pub fn infer_expr(ctx: &Context, e: &Expr) -> Result<Judgment> {
    Checker::default().infer_expr(ctx, e)
}

pub fn check_expr(ctx: &Context, e: &Expr, expected: &Judgment) -> Result<()> {
    Checker::default().check_expr(ctx, e, expected)
}

/// Checks a reduction witness without an expected judgment.
pub fn check_reduction(ctx: &Context, r: &ReductionExpr) -> Result<ReductionTyping> {
    Checker::default().reduction(ctx, r, None)
}

/// Checks a reduction witness against an expected judgment.
pub fn check_reduction_at(ctx: &Context, r: &ReductionExpr, expected: &Judgment) -> Result<ReductionTyping> {
    Checker::default().reduction(ctx, r, Some(expected))
}

/// Chooses a name for a binder entering `ctx`: the binder itself unless it
/// clashes with a hypothesis. `extra` lists further names to avoid.
pub fn open_binder(ctx: &Context, binder: &Name, extra: &BTreeSet<Name>) -> Name {
    if !ctx.contains(binder) {
        return binder.clone();
    }
    let mut avoid = ctx.names();
    avoid.extend(extra.iter().cloned());
    fresh_name(&avoid, binder)
}

/// Opens the binder of `body` so that it can be pushed onto `ctx`,
/// renaming it when it clashes.
pub fn open_stmt(ctx: &Context, binder: &Name, body: &StatementExpr) -> (Name, StatementExpr) {
    let mut extra = BTreeSet::new();
    crate::syntax::all_names(&Expr::Statement(body.clone()), &mut extra);
    let b = open_binder(ctx, binder, &extra);
    if &b == binder {
        (b, body.clone())
    } else {
        let renamed = rename_stmt(body, binder, &b);
        (b, renamed)
    }
}

pub(crate) fn open_reduction(ctx: &Context, binder: &Name, body: &ReductionExpr) -> (Name, ReductionExpr) {
    let mut extra = BTreeSet::new();
    body.all_names(&mut extra);
    let b = open_binder(ctx, binder, &extra);
    if &b == binder {
        (b, body.clone())
    } else {
        let renamed = body.rename_free(binder, &b);
        (b, renamed)
    }
}

impl Checker {
    pub fn tracing() -> Self {
        Checker { trace: Some(RefCell::new(BTreeMap::new())) }
    }

    pub fn rule_counts(&self) -> BTreeMap<Rule, usize> {
        self.trace.as_ref().map(|t| t.borrow().clone()).unwrap_or_default()
    }

    fn note(&self, r: Rule) {
        if let Some(t) = &self.trace {
            *t.borrow_mut().entry(r).or_default() += 1;
        }
    }

    pub fn infer_expr(&self, ctx: &Context, e: &Expr) -> Result<Judgment> {
        match e {
            Expr::Term(t) => Ok(Judgment::TermAt(self.infer_term(ctx, t)?)),
            Expr::CoTerm(k) => Ok(Judgment::CoTermAt(self.infer_coterm(ctx, k)?)),
            Expr::Statement(s) => {
                self.check_stmt(ctx, s)?;
                Ok(Judgment::Absurd)
            }
        }
    }

    pub fn check_expr(&self, ctx: &Context, e: &Expr, expected: &Judgment) -> Result<()> {
        match (e, expected) {
            (Expr::Term(t), Judgment::TermAt(a)) => self.check_term(ctx, t, a),
            (Expr::CoTerm(k), Judgment::CoTermAt(a)) => self.check_coterm(ctx, k, a),
            (Expr::Statement(s), Judgment::Absurd) => self.check_stmt(ctx, s),
            (e, j) => Err(TypeError::SortMismatch { expected: j.sort(), found: e.sort() }),
        }
    }

    fn lookup<'c>(&self, ctx: &'c Context, name: &Name, kind: Kind) -> Result<&'c TypeExpr> {
        let h = ctx.lookup(name).ok_or_else(|| TypeError::UnboundName { name: name.clone() })?;
        if h.polarity.kind() != kind {
            return Err(TypeError::PolarityMismatch { name: name.clone(), expected: kind, found: h.polarity });
        }
        Ok(&h.ty)
    }

    pub fn infer_term(&self, ctx: &Context, t: &TermExpr) -> Result<TypeExpr> {
        match t {
            TermExpr::Var(x) => {
                self.note(Rule::VarR);
                Ok(self.lookup(ctx, x, Kind::Variable)?.clone())
            }
            TermExpr::Mu(a, _) => Err(TypeError::CannotInfer {
                what: format!("the type of the covariable `{a}` bound by mu"),
            }),
            TermExpr::Unit => {
                self.note(Rule::TopIntro);
                Ok(TypeExpr::Top)
            }
            TermExpr::Pair(m, n) => {
                self.note(Rule::AndIntro);
                let a = self.infer_term(ctx, m)?;
                let b = self.infer_term(ctx, n)?;
                Ok(TypeExpr::and(a, b))
            }
            TermExpr::Inl(_) | TermExpr::Inr(_) => {
                Err(TypeError::CannotInfer { what: "the other disjunct of an injection".into() })
            }
            TermExpr::NotIntro(k) => {
                self.note(Rule::NotIntro);
                Ok(TypeExpr::not(self.infer_coterm(ctx, k)?))
            }
        }
    }

    pub fn infer_coterm(&self, ctx: &Context, k: &CoTermExpr) -> Result<TypeExpr> {
        match k {
            CoTermExpr::CoVar(a) => {
                self.note(Rule::VarL);
                Ok(self.lookup(ctx, a, Kind::Covariable)?.clone())
            }
            CoTermExpr::MuTilde(x, _) => Err(TypeError::CannotInfer {
                what: format!("the type of the variable `{x}` bound by mu~"),
            }),
            CoTermExpr::CoUnit => {
                self.note(Rule::BotIntro);
                Ok(TypeExpr::Bot)
            }
            CoTermExpr::Fst(_) | CoTermExpr::Snd(_) => {
                Err(TypeError::CannotInfer { what: "the other conjunct of a projection".into() })
            }
            CoTermExpr::Case(j, k) => {
                self.note(Rule::OrElim);
                let a = self.infer_coterm(ctx, j)?;
                let b = self.infer_coterm(ctx, k)?;
                Ok(TypeExpr::or(a, b))
            }
            CoTermExpr::NotElim(m) => {
                self.note(Rule::NotElim);
                Ok(TypeExpr::not(self.infer_term(ctx, m)?))
            }
        }
    }

    pub fn check_term(&self, ctx: &Context, t: &TermExpr, ty: &TypeExpr) -> Result<()> {
        let mismatch = |c: &'static str| TypeError::ConnectiveMismatch {
            constructor: c,
            judgment: Judgment::TermAt(ty.clone()),
        };
        match t {
            TermExpr::Var(x) => {
                self.note(Rule::VarR);
                let found = self.lookup(ctx, x, Kind::Variable)?;
                if found != ty {
                    return Err(TypeError::TypeMismatch {
                        subject: x.clone(),
                        expected: ty.clone(),
                        found: found.clone(),
                    });
                }
                Ok(())
            }
            TermExpr::Mu(a, s) => {
                self.note(Rule::MuIntro);
                let (a, s) = open_stmt(ctx, a, s);
                self.check_stmt(&ctx.extended(a, Polarity::Minus, ty.clone()), &s)
            }
            TermExpr::Unit => {
                self.note(Rule::TopIntro);
                if *ty != TypeExpr::Top {
                    return Err(mismatch("()"));
                }
                Ok(())
            }
            TermExpr::Pair(m, n) => {
                self.note(Rule::AndIntro);
                let TypeExpr::And(a, b) = ty else { return Err(mismatch("(_, _)")) };
                self.check_term(ctx, m, a)?;
                self.check_term(ctx, n, b)
            }
            TermExpr::Inl(m) => {
                self.note(Rule::OrIntro1);
                let TypeExpr::Or(a, _) = ty else { return Err(mismatch("inl")) };
                self.check_term(ctx, m, a)
            }
            TermExpr::Inr(m) => {
                self.note(Rule::OrIntro2);
                let TypeExpr::Or(_, b) = ty else { return Err(mismatch("inr")) };
                self.check_term(ctx, m, b)
            }
            TermExpr::NotIntro(k) => {
                self.note(Rule::NotIntro);
                let TypeExpr::Not(a) = ty else { return Err(mismatch("not+")) };
                self.check_coterm(ctx, k, a)
            }
        }
    }

    pub fn check_coterm(&self, ctx: &Context, k: &CoTermExpr, ty: &TypeExpr) -> Result<()> {
        let mismatch = |c: &'static str| TypeError::ConnectiveMismatch {
            constructor: c,
            judgment: Judgment::CoTermAt(ty.clone()),
        };
        match k {
            CoTermExpr::CoVar(a) => {
                self.note(Rule::VarL);
                let found = self.lookup(ctx, a, Kind::Covariable)?;
                if found != ty {
                    return Err(TypeError::TypeMismatch {
                        subject: a.clone(),
                        expected: ty.clone(),
                        found: found.clone(),
                    });
                }
                Ok(())
            }
            CoTermExpr::MuTilde(x, s) => {
                self.note(Rule::MuTildeIntro);
                let (x, s) = open_stmt(ctx, x, s);
                self.check_stmt(&ctx.extended(x, Polarity::Plus, ty.clone()), &s)
            }
            CoTermExpr::CoUnit => {
                self.note(Rule::BotIntro);
                if *ty != TypeExpr::Bot {
                    return Err(mismatch("[]"));
                }
                Ok(())
            }
            CoTermExpr::Fst(k) => {
                self.note(Rule::AndElim1);
                let TypeExpr::And(a, _) = ty else { return Err(mismatch("fst")) };
                self.check_coterm(ctx, k, a)
            }
            CoTermExpr::Snd(k) => {
                self.note(Rule::AndElim2);
                let TypeExpr::And(_, b) = ty else { return Err(mismatch("snd")) };
                self.check_coterm(ctx, k, b)
            }
            CoTermExpr::Case(j, k) => {
                self.note(Rule::OrElim);
                let TypeExpr::Or(a, b) = ty else { return Err(mismatch("case")) };
                self.check_coterm(ctx, j, a)?;
                self.check_coterm(ctx, k, b)
            }
            CoTermExpr::NotElim(m) => {
                self.note(Rule::NotElim);
                let TypeExpr::Not(a) = ty else { return Err(mismatch("not-")) };
                self.check_term(ctx, m, a)
            }
        }
    }

    pub fn check_stmt(&self, ctx: &Context, s: &StatementExpr) -> Result<()> {
        self.note(Rule::Cut);
        let quiet = Checker::default();
        if let Ok(found) = quiet.infer_term(ctx, &s.term) {
            if found != s.cut_type {
                return Err(TypeError::CutAnnotation { annotation: s.cut_type.clone(), side: "term", found });
            }
        }
        if let Ok(found) = quiet.infer_coterm(ctx, &s.coterm) {
            if found != s.cut_type {
                return Err(TypeError::CutAnnotation {
                    annotation: s.cut_type.clone(),
                    side: "co-term",
                    found,
                });
            }
        }
        self.check_term(ctx, &s.term, &s.cut_type)?;
        self.check_coterm(ctx, &s.coterm, &s.cut_type)
    }

    pub fn reduction(&self, ctx: &Context, r: &ReductionExpr, expected: Option<&Judgment>) -> Result<ReductionTyping> {
        let typing = self.reduction_inner(ctx, r, expected)?;
        if let Some(j) = expected {
            if &typing.judgment != j {
                return Err(TypeError::JudgmentMismatch {
                    rule: rule_of(r),
                    expected: j.to_string(),
                    found: typing.judgment.to_string(),
                });
            }
        }
        Ok(typing)
    }

    fn reduction_inner(&self, ctx: &Context, r: &ReductionExpr, expected: Option<&Judgment>) -> Result<ReductionTyping> {
        use ReductionExpr as R;
        let done = |source: Expr, target: Expr, judgment: Judgment| {
            Ok(ReductionTyping { source, target, judgment, context: ctx.clone() })
        };
        let absurd_only = |rule: Rule| -> Result<()> {
            match expected {
                Some(j) if *j != Judgment::Absurd => Err(TypeError::JudgmentMismatch {
                    rule,
                    expected: j.to_string(),
                    found: "#".into(),
                }),
                _ => Ok(()),
            }
        };
        let shape = |rule: Rule, wanted: &str| -> TypeError {
            match expected {
                Some(j) => TypeError::JudgmentMismatch { rule, expected: j.to_string(), found: wanted.into() },
                None => TypeError::CannotInfer { what: format!("the judgment of {rule}; declare it") },
            }
        };
        let quiet = Checker::default();
        match r {
            R::Refl(u) => {
                self.note(Rule::Refl);
                let j = match expected {
                    Some(j) => {
                        self.check_expr(ctx, u, j)?;
                        j.clone()
                    }
                    None => self.infer_expr(ctx, u)?,
                };
                done(u.clone(), u.clone(), j)
            }
            R::Trans(p, q) => {
                self.note(Rule::Trans);
                let tp = self.reduction(ctx, p, expected)?;
                let tq = self.reduction(ctx, q, Some(&tp.judgment))?;
                if !alpha_eq(&tp.target, &tq.source) {
                    return Err(TypeError::EndpointMismatch {
                        left: crate::parser::pretty_expr(&tp.target),
                        right: crate::parser::pretty_expr(&tq.source),
                    });
                }
                done(tp.source, tq.target, tp.judgment)
            }
            R::BetaMu { coterm, binder, body, ann } => {
                self.note(Rule::BetaMu);
                absurd_only(Rule::BetaMu)?;
                let a = agree(
                    Rule::BetaMu,
                    ann.as_ref(),
                    &[("co-term", quiet.infer_coterm(ctx, coterm).ok())],
                    "the redex type",
                )?;
                self.check_coterm(ctx, coterm, &a)?;
                let (b, s) = open_stmt(ctx, binder, body);
                self.check_stmt(&ctx.extended(b, Polarity::Minus, a.clone()), &s)?;
                let source = StatementExpr::cut(TermExpr::Mu(binder.clone(), Box::new(body.clone())), coterm.clone(), a);
                let target = subst_covar_stmt(body, binder, coterm);
                done(source.into(), target.into(), Judgment::Absurd)
            }
            R::BetaMuTilde { term, binder, body, ann } => {
                self.note(Rule::BetaMuTilde);
                absurd_only(Rule::BetaMuTilde)?;
                let a = agree(
                    Rule::BetaMuTilde,
                    ann.as_ref(),
                    &[("term", quiet.infer_term(ctx, term).ok())],
                    "the redex type",
                )?;
                self.check_term(ctx, term, &a)?;
                let (b, s) = open_stmt(ctx, binder, body);
                self.check_stmt(&ctx.extended(b, Polarity::Plus, a.clone()), &s)?;
                let source = StatementExpr::cut(term.clone(), CoTermExpr::MuTilde(binder.clone(), Box::new(body.clone())), a);
                let target = subst_var_stmt(body, binder, term);
                done(source.into(), target.into(), Judgment::Absurd)
            }
            R::BetaFst { first, second, coterm, ann } | R::BetaSnd { first, second, coterm, ann } => {
                let is_fst = matches!(r, R::BetaFst { .. });
                let rule = if is_fst { Rule::BetaFst } else { Rule::BetaSnd };
                self.note(rule);
                absurd_only(rule)?;
                let (ann_a, ann_b) = split_ann(rule, ann.as_ref(), |t| match t {
                    TypeExpr::And(a, b) => Some(((**a).clone(), (**b).clone())),
                    _ => None,
                })?;
                let k_ty = quiet.infer_coterm(ctx, coterm).ok();
                let m_ty = quiet.infer_term(ctx, first).ok();
                let n_ty = quiet.infer_term(ctx, second).ok();
                let (a, b) = if is_fst {
                    (
                        agree(rule, ann_a.as_ref(), &[("first component", m_ty), ("co-term", k_ty)], "the first conjunct")?,
                        agree(rule, ann_b.as_ref(), &[("second component", n_ty)], "the second conjunct")?,
                    )
                } else {
                    (
                        agree(rule, ann_a.as_ref(), &[("first component", m_ty)], "the first conjunct")?,
                        agree(rule, ann_b.as_ref(), &[("second component", n_ty), ("co-term", k_ty)], "the second conjunct")?,
                    )
                };
                self.check_term(ctx, first, &a)?;
                self.check_term(ctx, second, &b)?;
                self.check_coterm(ctx, coterm, if is_fst { &a } else { &b })?;
                let pair = TermExpr::Pair(Box::new(first.clone()), Box::new(second.clone()));
                let (proj, target) = if is_fst {
                    (CoTermExpr::Fst(Box::new(coterm.clone())), StatementExpr::cut(first.clone(), coterm.clone(), a.clone()))
                } else {
                    (CoTermExpr::Snd(Box::new(coterm.clone())), StatementExpr::cut(second.clone(), coterm.clone(), b.clone()))
                };
                let source = StatementExpr::cut(pair, proj, TypeExpr::and(a, b));
                done(source.into(), target.into(), Judgment::Absurd)
            }
            R::BetaInl { left, right, term, ann } | R::BetaInr { left, right, term, ann } => {
                let is_inl = matches!(r, R::BetaInl { .. });
                let rule = if is_inl { Rule::BetaInl } else { Rule::BetaInr };
                self.note(rule);
                absurd_only(rule)?;
                let (ann_a, ann_b) = split_ann(rule, ann.as_ref(), |t| match t {
                    TypeExpr::Or(a, b) => Some(((**a).clone(), (**b).clone())),
                    _ => None,
                })?;
                let k_ty = quiet.infer_coterm(ctx, left).ok();
                let l_ty = quiet.infer_coterm(ctx, right).ok();
                let m_ty = quiet.infer_term(ctx, term).ok();
                let (a, b) = if is_inl {
                    (
                        agree(rule, ann_a.as_ref(), &[("left co-term", k_ty), ("term", m_ty)], "the left disjunct")?,
                        agree(rule, ann_b.as_ref(), &[("right co-term", l_ty)], "the right disjunct")?,
                    )
                } else {
                    (
                        agree(rule, ann_a.as_ref(), &[("left co-term", k_ty)], "the left disjunct")?,
                        agree(rule, ann_b.as_ref(), &[("right co-term", l_ty), ("term", m_ty)], "the right disjunct")?,
                    )
                };
                self.check_coterm(ctx, left, &a)?;
                self.check_coterm(ctx, right, &b)?;
                self.check_term(ctx, term, if is_inl { &a } else { &b })?;
                let case = CoTermExpr::Case(Box::new(left.clone()), Box::new(right.clone()));
                let (inj, target) = if is_inl {
                    (TermExpr::Inl(Box::new(term.clone())), StatementExpr::cut(term.clone(), left.clone(), a.clone()))
                } else {
                    (TermExpr::Inr(Box::new(term.clone())), StatementExpr::cut(term.clone(), right.clone(), b.clone()))
                };
                let source = StatementExpr::cut(inj, case, TypeExpr::or(a, b));
                done(source.into(), target.into(), Judgment::Absurd)
            }
            R::BetaNot { term, coterm, ann } => {
                self.note(Rule::BetaNot);
                absurd_only(Rule::BetaNot)?;
                let ann_a = match ann {
                    None => None,
                    Some(TypeExpr::Not(a)) => Some((**a).clone()),
                    Some(other) => {
                        return Err(TypeError::BetaArgument {
                            rule: Rule::BetaNot,
                            detail: format!("annotation {other} is not a negation"),
                        })
                    }
                };
                let a = agree(
                    Rule::BetaNot,
                    ann_a.as_ref(),
                    &[("term", quiet.infer_term(ctx, term).ok()), ("co-term", quiet.infer_coterm(ctx, coterm).ok())],
                    "the negated type",
                )?;
                self.check_term(ctx, term, &a)?;
                self.check_coterm(ctx, coterm, &a)?;
                let source = StatementExpr::cut(
                    TermExpr::NotIntro(Box::new(coterm.clone())),
                    CoTermExpr::NotElim(Box::new(term.clone())),
                    TypeExpr::not(a.clone()),
                );
                let target = StatementExpr::cut(term.clone(), coterm.clone(), a);
                done(source.into(), target.into(), Judgment::Absurd)
            }
            R::CongMu(binder, p) | R::CongMuTilde(binder, p) => {
                let is_mu = matches!(r, R::CongMu(..));
                let rule = if is_mu { Rule::CongMu } else { Rule::CongMuTilde };
                self.note(rule);
                let a = match (is_mu, expected) {
                    (true, Some(Judgment::TermAt(a))) | (false, Some(Judgment::CoTermAt(a))) => a.clone(),
                    _ => return Err(shape(rule, if is_mu { "a term" } else { "a co-term" })),
                };
                let (b, p) = open_reduction(ctx, binder, p);
                let pol = if is_mu { Polarity::Minus } else { Polarity::Plus };
                let inner = self.reduction(&ctx.extended(b.clone(), pol, a.clone()), &p, Some(&Judgment::Absurd))?;
                let (Expr::Statement(s), Expr::Statement(t)) = (inner.source, inner.target) else {
                    unreachable!("absurd reductions have statement endpoints")
                };
                if is_mu {
                    done(
                        TermExpr::Mu(b.clone(), Box::new(s)).into(),
                        TermExpr::Mu(b, Box::new(t)).into(),
                        Judgment::TermAt(a),
                    )
                } else {
                    done(
                        CoTermExpr::MuTilde(b.clone(), Box::new(s)).into(),
                        CoTermExpr::MuTilde(b, Box::new(t)).into(),
                        Judgment::CoTermAt(a),
                    )
                }
            }
            R::CongCut(p, q, a) => {
                self.note(Rule::CongCut);
                absurd_only(Rule::CongCut)?;
                let tp = self.reduction(ctx, p, Some(&Judgment::TermAt(a.clone())))?;
                let tq = self.reduction(ctx, q, Some(&Judgment::CoTermAt(a.clone())))?;
                let (Expr::Term(m), Expr::Term(n)) = (tp.source, tp.target) else { unreachable!() };
                let (Expr::CoTerm(k), Expr::CoTerm(l)) = (tq.source, tq.target) else { unreachable!() };
                done(
                    StatementExpr::cut(m, k, a.clone()).into(),
                    StatementExpr::cut(n, l, a.clone()).into(),
                    Judgment::Absurd,
                )
            }
            R::CongPair(p, q) => {
                self.note(Rule::CongPair);
                let (tp, tq) = match expected {
                    Some(Judgment::TermAt(TypeExpr::And(a, b))) => (
                        self.reduction(ctx, p, Some(&Judgment::TermAt((**a).clone())))?,
                        self.reduction(ctx, q, Some(&Judgment::TermAt((**b).clone())))?,
                    ),
                    Some(_) => return Err(shape(Rule::CongPair, "a term of a conjunction")),
                    None => (self.reduction(ctx, p, None)?, self.reduction(ctx, q, None)?),
                };
                let (Judgment::TermAt(a), Judgment::TermAt(b)) = (&tp.judgment, &tq.judgment) else {
                    return Err(shape(Rule::CongPair, "a term of a conjunction"));
                };
                let j = Judgment::TermAt(TypeExpr::and(a.clone(), b.clone()));
                let (Expr::Term(m1), Expr::Term(m2), Expr::Term(n1), Expr::Term(n2)) =
                    (tp.source, tp.target, tq.source, tq.target)
                else {
                    unreachable!()
                };
                done(
                    TermExpr::Pair(Box::new(m1), Box::new(n1)).into(),
                    TermExpr::Pair(Box::new(m2), Box::new(n2)).into(),
                    j,
                )
            }
            R::CongCase(p, q) => {
                self.note(Rule::CongCase);
                let (tp, tq) = match expected {
                    Some(Judgment::CoTermAt(TypeExpr::Or(a, b))) => (
                        self.reduction(ctx, p, Some(&Judgment::CoTermAt((**a).clone())))?,
                        self.reduction(ctx, q, Some(&Judgment::CoTermAt((**b).clone())))?,
                    ),
                    Some(_) => return Err(shape(Rule::CongCase, "a co-term of a disjunction")),
                    None => (self.reduction(ctx, p, None)?, self.reduction(ctx, q, None)?),
                };
                let (Judgment::CoTermAt(a), Judgment::CoTermAt(b)) = (&tp.judgment, &tq.judgment) else {
                    return Err(shape(Rule::CongCase, "a co-term of a disjunction"));
                };
                let j = Judgment::CoTermAt(TypeExpr::or(a.clone(), b.clone()));
                let (Expr::CoTerm(j1), Expr::CoTerm(j2), Expr::CoTerm(k1), Expr::CoTerm(k2)) =
                    (tp.source, tp.target, tq.source, tq.target)
                else {
                    unreachable!()
                };
                done(
                    CoTermExpr::Case(Box::new(j1), Box::new(k1)).into(),
                    CoTermExpr::Case(Box::new(j2), Box::new(k2)).into(),
                    j,
                )
            }
            R::CongInl(p) | R::CongInr(p) => {
                let is_inl = matches!(r, R::CongInl(_));
                let rule = if is_inl { Rule::CongInl } else { Rule::CongInr };
                self.note(rule);
                let Some(Judgment::TermAt(TypeExpr::Or(a, b))) = expected else {
                    return Err(shape(rule, "a term of a disjunction"));
                };
                let part = if is_inl { a } else { b };
                let tp = self.reduction(ctx, p, Some(&Judgment::TermAt((**part).clone())))?;
                let (Expr::Term(m), Expr::Term(n)) = (tp.source, tp.target) else { unreachable!() };
                let wrap = |t: TermExpr| if is_inl { TermExpr::Inl(Box::new(t)) } else { TermExpr::Inr(Box::new(t)) };
                done(wrap(m).into(), wrap(n).into(), expected.unwrap().clone())
            }
            R::CongFst(p) | R::CongSnd(p) => {
                let is_fst = matches!(r, R::CongFst(_));
                let rule = if is_fst { Rule::CongFst } else { Rule::CongSnd };
                self.note(rule);
                let Some(Judgment::CoTermAt(TypeExpr::And(a, b))) = expected else {
                    return Err(shape(rule, "a co-term of a conjunction"));
                };
                let part = if is_fst { a } else { b };
                let tp = self.reduction(ctx, p, Some(&Judgment::CoTermAt((**part).clone())))?;
                let (Expr::CoTerm(k), Expr::CoTerm(l)) = (tp.source, tp.target) else { unreachable!() };
                let wrap =
                    |t: CoTermExpr| if is_fst { CoTermExpr::Fst(Box::new(t)) } else { CoTermExpr::Snd(Box::new(t)) };
                done(wrap(k).into(), wrap(l).into(), expected.unwrap().clone())
            }
            R::CongNotIntro(p) => {
                self.note(Rule::CongNotIntro);
                let inner_j = match expected {
                    Some(Judgment::TermAt(TypeExpr::Not(a))) => Some(Judgment::CoTermAt((**a).clone())),
                    Some(_) => return Err(shape(Rule::CongNotIntro, "a term of a negation")),
                    None => None,
                };
                let tp = self.reduction(ctx, p, inner_j.as_ref())?;
                let Judgment::CoTermAt(a) = &tp.judgment else {
                    return Err(shape(Rule::CongNotIntro, "a term of a negation"));
                };
                let j = Judgment::TermAt(TypeExpr::not(a.clone()));
                let (Expr::CoTerm(k), Expr::CoTerm(l)) = (tp.source, tp.target) else { unreachable!() };
                done(TermExpr::NotIntro(Box::new(k)).into(), TermExpr::NotIntro(Box::new(l)).into(), j)
            }
            R::CongNotElim(p) => {
                self.note(Rule::CongNotElim);
                let inner_j = match expected {
                    Some(Judgment::CoTermAt(TypeExpr::Not(a))) => Some(Judgment::TermAt((**a).clone())),
                    Some(_) => return Err(shape(Rule::CongNotElim, "a co-term of a negation")),
                    None => None,
                };
                let tp = self.reduction(ctx, p, inner_j.as_ref())?;
                let Judgment::TermAt(a) = &tp.judgment else {
                    return Err(shape(Rule::CongNotElim, "a co-term of a negation"));
                };
                let j = Judgment::CoTermAt(TypeExpr::not(a.clone()));
                let (Expr::Term(m), Expr::Term(n)) = (tp.source, tp.target) else { unreachable!() };
                done(CoTermExpr::NotElim(Box::new(m)).into(), CoTermExpr::NotElim(Box::new(n)).into(), j)
            }
        }
    }
}

/// Reconciles an optional annotation with the types inferred for the
/// arguments of a beta rule.
fn agree(rule: Rule, ann: Option<&TypeExpr>, found: &[(&str, Option<TypeExpr>)], what: &str) -> Result<TypeExpr> {
    let mut chosen: Option<(&str, TypeExpr)> = ann.map(|a| ("annotation", a.clone()));
    for (label, ty) in found {
        let Some(ty) = ty else { continue };
        match &chosen {
            None => chosen = Some((label, ty.clone())),
            Some((other, prev)) if prev != ty => {
                return Err(TypeError::BetaArgument {
                    rule,
                    detail: format!("the {other} has type {prev} but the {label} has type {ty}"),
                })
            }
            Some(_) => {}
        }
    }
    chosen
        .map(|(_, t)| t)
        .ok_or_else(|| TypeError::CannotInfer { what: format!("{what} of {rule}; add a `: T` annotation") })
}

fn split_ann(
    rule: Rule,
    ann: Option<&TypeExpr>,
    split: impl Fn(&TypeExpr) -> Option<(TypeExpr, TypeExpr)>,
) -> Result<(Option<TypeExpr>, Option<TypeExpr>)> {
    match ann {
        None => Ok((None, None)),
        Some(t) => match split(t) {
            Some((a, b)) => Ok((Some(a), Some(b))),
            None => Err(TypeError::BetaArgument { rule, detail: format!("annotation {t} has the wrong connective") }),
        },
    }
}

fn rule_of(r: &ReductionExpr) -> Rule {
    use ReductionExpr as R;
    match r {
        R::Refl(_) => Rule::Refl,
        R::Trans(..) => Rule::Trans,
        R::BetaMu { .. } => Rule::BetaMu,
        R::BetaMuTilde { .. } => Rule::BetaMuTilde,
        R::BetaFst { .. } => Rule::BetaFst,
        R::BetaSnd { .. } => Rule::BetaSnd,
        R::BetaInl { .. } => Rule::BetaInl,
        R::BetaInr { .. } => Rule::BetaInr,
        R::BetaNot { .. } => Rule::BetaNot,
        R::CongMu(..) => Rule::CongMu,
        R::CongMuTilde(..) => Rule::CongMuTilde,
        R::CongCut(..) => Rule::CongCut,
        R::CongPair(..) => Rule::CongPair,
        R::CongInl(_) => Rule::CongInl,
        R::CongInr(_) => Rule::CongInr,
        R::CongFst(_) => Rule::CongFst,
        R::CongSnd(_) => Rule::CongSnd,
        R::CongCase(..) => Rule::CongCase,
        R::CongNotIntro(_) => Rule::CongNotIntro,
        R::CongNotElim(_) => Rule::CongNotElim,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::build::*;

    fn ctx(hyps: &[(&str, Polarity, TypeExpr)]) -> Context {
        Context::new(hyps.iter().map(|(n, p, t)| Hyp::new(n, *p, t.clone())).collect()).unwrap()
    }

    fn a() -> TypeExpr {
        base("A")
    }
    fn b() -> TypeExpr {
        base("B")
    }

    #[test]
    fn variable_and_cut() {
        let g = ctx(&[("x", Polarity::Plus, a())]);
        assert_eq!(infer_expr(&g, &var("x").into()).unwrap(), Judgment::TermAt(a()));
        let g = ctx(&[("x", Polarity::Plus, a()), ("k", Polarity::Minus, a())]);
        let s = cut(var("x"), covar("k"), a());
        assert_eq!(infer_expr(&g, &s.into()).unwrap(), Judgment::Absurd);
    }

    #[test]
    fn negation_intro_infers() {
        let g = ctx(&[("k", Polarity::Minus, a())]);
        assert_eq!(
            infer_expr(&g, &not_intro(covar("k")).into()).unwrap(),
            Judgment::TermAt(TypeExpr::not(a()))
        );
    }

    #[test]
    fn injections_need_checking() {
        let g = ctx(&[("m", Polarity::Plus, b())]);
        let e: Expr = inr(var("m")).into();
        let err = infer_expr(&g, &e).unwrap_err();
        assert_eq!(err.class(), "cannot-infer");
        assert!(err.to_string().contains("other disjunct"));
        check_expr(&g, &e, &Judgment::TermAt(TypeExpr::or(a(), b()))).unwrap();
    }

    #[test]
    fn counit_and_polarity() {
        check_expr(&Context::empty(), &CoTermExpr::CoUnit.into(), &Judgment::CoTermAt(TypeExpr::Bot)).unwrap();
        let g = ctx(&[("x", Polarity::Plus, a())]);
        let err = check_expr(&g, &covar("x").into(), &Judgment::CoTermAt(a())).unwrap_err();
        assert_eq!(err.class(), "polarity-mismatch");
    }

    #[test]
    fn beta_fst_endpoints() {
        let g = ctx(&[("m", Polarity::Plus, a()), ("n", Polarity::Plus, b()), ("k", Polarity::Minus, a())]);
        let r = ReductionExpr::BetaFst { first: var("m"), second: var("n"), coterm: covar("k"), ann: None };
        let t = check_reduction(&g, &r).unwrap();
        assert_eq!(t.source, cut(pair(var("m"), var("n")), fst(covar("k")), TypeExpr::and(a(), b())).into());
        assert_eq!(t.target, cut(var("m"), covar("k"), a()).into());
        assert_eq!(t.judgment, Judgment::Absurd);
    }

    #[test]
    fn refl_and_trans() {
        let g = ctx(&[("x", Polarity::Plus, a()), ("k", Polarity::Minus, a()), ("y", Polarity::Plus, a())]);
        let u: Expr = cut(var("x"), covar("k"), a()).into();
        let v: Expr = cut(var("y"), covar("k"), a()).into();
        let t = check_reduction(&g, &ReductionExpr::Refl(u.clone())).unwrap();
        assert_eq!(t.source, u);
        assert_eq!(t.target, u);
        let bad = ReductionExpr::Trans(Box::new(ReductionExpr::Refl(u)), Box::new(ReductionExpr::Refl(v)));
        assert_eq!(check_reduction(&g, &bad).unwrap_err().class(), "endpoint-mismatch");
    }

    #[test]
    fn beta_not_endpoints() {
        let g = ctx(&[("m", Polarity::Plus, a()), ("k", Polarity::Minus, a())]);
        let r = ReductionExpr::BetaNot { term: var("m"), coterm: covar("k"), ann: None };
        let t = check_reduction(&g, &r).unwrap();
        assert_eq!(
            t.source,
            cut(not_intro(covar("k")), not_elim(var("m")), TypeExpr::not(a())).into()
        );
        assert_eq!(t.target, cut(var("m"), covar("k"), a()).into());
    }

    #[test]
    fn beta_mu_substitutes() {
        let g = ctx(&[("x", Polarity::Plus, a()), ("k", Polarity::Minus, a())]);
        let r = ReductionExpr::BetaMu {
            coterm: covar("k"),
            binder: Name::new("a"),
            body: cut(var("x"), covar("a"), a()),
            ann: None,
        };
        let t = check_reduction(&g, &r).unwrap();
        assert_eq!(t.target, cut(var("x"), covar("k"), a()).into());
    }

    #[test]
    fn shadowing_binder_is_renamed() {
        // mu k. <x | k> where k is already a hypothesis of another type
        let g = ctx(&[("x", Polarity::Plus, a()), ("k", Polarity::Minus, b())]);
        let m = mu("k", cut(var("x"), covar("k"), a()));
        check_expr(&g, &m.into(), &Judgment::TermAt(a())).unwrap();
    }

    #[test]
    fn cut_annotation_mismatch() {
        let g = ctx(&[("x", Polarity::Plus, a()), ("k", Polarity::Minus, a())]);
        let s = cut(var("x"), covar("k"), b());
        assert_eq!(check_expr(&g, &s.into(), &Judgment::Absurd).unwrap_err().class(), "cut-annotation");
    }

    #[test]
    fn beta_argument_mismatch() {
        let g = ctx(&[("m", Polarity::Plus, a()), ("n", Polarity::Plus, b()), ("k", Polarity::Minus, b())]);
        let r = ReductionExpr::BetaFst { first: var("m"), second: var("n"), coterm: covar("k"), ann: None };
        assert_eq!(check_reduction(&g, &r).unwrap_err().class(), "beta-argument");
    }

    #[test]
    fn tracing_counts_rules() {
        let g = ctx(&[("x", Polarity::Plus, a()), ("k", Polarity::Minus, a())]);
        let c = Checker::tracing();
        c.check_expr(&g, &cut(var("x"), covar("k"), a()).into(), &Judgment::Absurd).unwrap();
        let counts = c.rule_counts();
        assert_eq!(counts.get(&Rule::Cut), Some(&1));
        assert_eq!(counts.get(&Rule::VarR), Some(&1));
        assert_eq!(counts.get(&Rule::VarL), Some(&1));
    }

    #[test]
    fn classes_the_parser_preempts() {
        let g = ctx(&[("x", Polarity::Plus, a())]);
        let e = check_expr(&g, &var("y").into(), &Judgment::TermAt(a())).unwrap_err();
        assert_eq!(e.class(), "unbound-name");
        let e = check_expr(&g, &var("x").into(), &Judgment::Absurd).unwrap_err();
        assert_eq!(e.class(), "sort-mismatch");
    }
}
