//! The three model modes and the degeneracy comparisons between them.
//!
//! `Prof` is the profunctor semantics itself. `Span` is the same
//! construction restricted to discrete base categories, where profunctors
//! are spans of sets. `Rel` truncates every set to its support, so each
//! cell becomes the unique map between subsingletons.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fincat::file::BaseAssignment;
use crate::fincat::{Elem, FinCat, SetFunctor};
use crate::profunctor::{nat_eq, NatTrans, Profunctor};
use crate::semantics::{ReductionCell, SemError, Semantics};
use crate::parser::Declaration;
use crate::syntax::{alpha_eq, CoTermExpr, Expr, Name, ReductionExpr, StatementExpr, TermExpr, TypeExpr};
use crate::typing::{Checker, Context, Hyp, Judgment, Polarity};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Prof,
    Span,
    Rel,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Prof => "prof",
            Mode::Span => "span",
            Mode::Rel => "rel",
        })
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "prof" => Ok(Mode::Prof),
            "span" => Ok(Mode::Span),
            "rel" => Ok(Mode::Rel),
            _ => Err(format!("unknown mode `{s}` (expected prof, span or rel)")),
        }
    }
}

#[derive(Debug, Clone, Error)]
pub enum ModelError {
    #[error("{0} mode needs discrete base categories; `{1}` is not discrete")]
    NotDiscrete(Mode, String),
    #[error(transparent)]
    Sem(#[from] SemError),
}

pub type Result<T> = std::result::Result<T, ModelError>;

/// A semantics together with the mode it is read in.
#[derive(Clone, Debug)]
pub struct Model {
    sem: Semantics,
    mode: Mode,
}

impl Model {
    pub fn new(bases: BaseAssignment, mode: Mode) -> Result<Model> {
        if mode != Mode::Prof {
            if !bases.default_category().is_discrete() {
                return Err(ModelError::NotDiscrete(mode, "default".into()));
            }
            if let Some((n, _)) = bases.named().find(|(_, c)| !c.is_discrete()) {
                return Err(ModelError::NotDiscrete(mode, n.to_string()));
            }
        }
        Ok(Model { sem: Semantics::new(bases), mode })
    }

    pub fn with_limit(mut self, limit: usize) -> Self {
        self.sem = self.sem.with_limit(limit);
        self
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn semantics(&self) -> &Semantics {
        &self.sem
    }

    pub fn interp(&self, ctx: &Context, e: &Expr, j: &Judgment) -> Result<Profunctor> {
        let p = self.sem.interp(ctx, e, j)?;
        Ok(match self.mode {
            Mode::Rel => truncate(&p),
            _ => p,
        })
    }

    pub fn reduction(&self, ctx: &Context, r: &ReductionExpr, j: Option<&Judgment>) -> Result<ReductionCell> {
        let c = self.sem.reduction(ctx, r, j)?;
        Ok(match self.mode {
            Mode::Rel => ReductionCell {
                source: truncate(&c.source),
                target: truncate(&c.target),
                cell: truncate_nat(&c.cell),
                typing: c.typing,
            },
            _ => c,
        })
    }
}

/// Each value replaced by `{*}` when inhabited and by the empty set
/// otherwise.
pub fn truncate(p: &Profunctor) -> Profunctor {
    let body = p.body();
    let f = SetFunctor::tabulate(
        body.slots().to_vec(),
        |pt| if body.value(body.point(pt)).is_empty() { vec![] } else { vec![Elem::Unit] },
        |_, _, _, _| Ok(Elem::Unit),
    )
    .expect("supports are functorial");
    Profunctor::new(p.coords().to_vec(), f).expect("same layout")
}

/// The unique transformation between the truncated endpoints.
pub fn truncate_nat(t: &NatTrans) -> NatTrans {
    let source = truncate(t.source());
    let target = truncate(t.target());
    let components = (0..source.n_points()).map(|p| vec![0; source.value(p).len()]).collect();
    NatTrans::new(source, target, components).expect("inhabited sources have inhabited targets")
}

/// Two reductions claimed to share source and target.
#[derive(Clone, Debug)]
pub struct ParallelPair {
    pub context: Context,
    pub judgment: Judgment,
    pub left: ReductionExpr,
    pub right: ReductionExpr,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct DegeneracyReport {
    pub examined: usize,
    /// Pairs whose cells really are parallel.
    pub parallel: usize,
    /// Parallel pairs whose cells differ.
    pub distinct: usize,
    /// Index of the first separated pair.
    pub first_distinct: Option<usize>,
}

/// Compares the two cells of every pair.
pub fn degeneracy(model: &Model, pairs: &[ParallelPair]) -> Result<DegeneracyReport> {
    let mut report = DegeneracyReport::default();
    for (i, p) in pairs.iter().enumerate() {
        let l = model.reduction(&p.context, &p.left, Some(&p.judgment))?;
        let r = model.reduction(&p.context, &p.right, Some(&p.judgment))?;
        report.examined += 1;
        if l.source != r.source || l.target != r.target {
            continue;
        }
        report.parallel += 1;
        if !nat_eq(&l.cell, &r.cell) {
            report.distinct += 1;
            report.first_distinct.get_or_insert(i);
        }
    }
    Ok(report)
}

fn stmts(depth: usize, vars: &[Name], covars: &[Name], ty: &TypeExpr, fresh: &mut usize) -> Vec<StatementExpr> {
    let mut terms: Vec<TermExpr> = vars.iter().cloned().map(TermExpr::Var).collect();
    let mut coterms: Vec<CoTermExpr> = covars.iter().cloned().map(CoTermExpr::CoVar).collect();
    if depth > 0 {
        *fresh += 1;
        let b = Name::new(format!("b{fresh}"));
        let mut inner_k = covars.to_vec();
        inner_k.push(b.clone());
        for s in stmts(depth - 1, vars, &inner_k, ty, fresh) {
            terms.push(TermExpr::Mu(b.clone(), Box::new(s)));
        }
        *fresh += 1;
        let y = Name::new(format!("y{fresh}"));
        let mut inner_v = vars.to_vec();
        inner_v.push(y.clone());
        for s in stmts(depth - 1, &inner_v, covars, ty, fresh) {
            coterms.push(CoTermExpr::MuTilde(y.clone(), Box::new(s)));
        }
    }
    let mut out = Vec::with_capacity(terms.len() * coterms.len());
    for m in &terms {
        for k in &coterms {
            out.push(StatementExpr::cut(m.clone(), k.clone(), ty.clone()));
        }
    }
    out
}

/// The context `[z:+C, k:-C]` the generated pairs live in.
pub fn pair_context() -> Context {
    Context::new(vec![Hyp::new("z", Polarity::Plus, TypeExpr::base("C")), Hyp::new("k", Polarity::Minus, TypeExpr::base("C"))])
        .expect("distinct names")
}

/// Parallel pairs from critical pairs with vacuous binders:
/// `<mu a. S | mu~ x. S : T>` reduces to `S` both by `beta_mu` and by
/// `beta_mu~`. `S` ranges over cuts of depth at most two in
/// [`pair_context`] and `T` over `Top` and `C`.
pub fn vacuous_critical_pairs(limit: usize) -> Vec<ParallelPair> {
    let ctx = pair_context();
    let c = TypeExpr::base("C");
    let mut fresh = 0;
    let bodies = stmts(2, &[Name::new("z")], &[Name::new("k")], &c, &mut fresh);
    let (a, x) = (Name::new("a"), Name::new("x"));
    let mut out = Vec::new();
    'outer: for s in &bodies {
        for t in [TypeExpr::Top, c.clone()] {
            if out.len() == limit {
                break 'outer;
            }
            out.push(ParallelPair {
                context: ctx.clone(),
                judgment: Judgment::Absurd,
                left: ReductionExpr::BetaMu {
                    coterm: CoTermExpr::MuTilde(x.clone(), Box::new(s.clone())),
                    binder: a.clone(),
                    body: s.clone(),
                    ann: Some(t.clone()),
                },
                right: ReductionExpr::BetaMuTilde {
                    term: TermExpr::Mu(a.clone(), Box::new(s.clone())),
                    binder: x.clone(),
                    body: s.clone(),
                    ann: Some(t),
                },
            });
        }
    }
    out
}

/// Pairs of reduction declarations with the same context and judgment and
/// alpha-equal endpoints. Declarations that do not check are skipped.
pub fn corpus_pairs(decls: &[Declaration]) -> Vec<ParallelPair> {
    let checker = Checker::default();
    let typed: Vec<_> = decls
        .iter()
        .filter_map(|d| match d {
            Declaration::ReductionDecl { context, judgment, reduction, .. } => {
                checker.reduction(context, reduction, Some(judgment)).ok().map(|t| (t, reduction))
            }
            _ => None,
        })
        .collect();
    let mut out = Vec::new();
    for (i, (t, l)) in typed.iter().enumerate() {
        for (u, r) in &typed[i + 1..] {
            if t.context == u.context
                && t.judgment == u.judgment
                && alpha_eq(&t.source, &u.source)
                && alpha_eq(&t.target, &u.target)
            {
                out.push(ParallelPair {
                    context: t.context.clone(),
                    judgment: t.judgment.clone(),
                    left: (*l).clone(),
                    right: (*r).clone(),
                });
            }
        }
    }
    out
}

/// How the connectives collapse under a model, checked on the identity
/// term at each type built from the listed base types.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ShapeReport {
    pub types: usize,
    /// `A /\ B` and `A \/ B` give the same profunctor.
    pub and_or_coincide: bool,
    /// `~A` has as many points, and as many inhabited ones, as `A`.
    pub negation_preserves_cardinality: bool,
}

fn identity(model: &Model, t: TypeExpr) -> Result<Profunctor> {
    let ctx = Context::new(vec![Hyp::new("x", Polarity::Plus, t.clone())]).expect("one name");
    model.interp(&ctx, &Expr::Term(TermExpr::Var(Name::new("x"))), &Judgment::TermAt(t))
}

fn cardinality(p: &Profunctor) -> (usize, usize) {
    let inhabited = (0..p.n_points()).filter(|&i| !p.value(i).is_empty()).count();
    (p.n_points(), inhabited)
}

pub fn connective_shape(model: &Model, names: &[Name]) -> Result<ShapeReport> {
    let mut r = ShapeReport { types: 0, and_or_coincide: true, negation_preserves_cardinality: true };
    for a in names {
        let ta = TypeExpr::Base(a.clone());
        let n = cardinality(&identity(model, TypeExpr::not(ta.clone()))?);
        r.negation_preserves_cardinality &= n == cardinality(&identity(model, ta.clone())?);
        for b in names {
            let tb = TypeExpr::Base(b.clone());
            let and = identity(model, TypeExpr::And(Box::new(ta.clone()), Box::new(tb.clone())))?;
            let or = identity(model, TypeExpr::Or(Box::new(ta.clone()), Box::new(tb)))?;
            r.and_or_coincide &= and == or;
            r.types += 1;
        }
    }
    Ok(r)
}

/// Discrete bases for the Span and Rel demos.
pub fn discrete_bases() -> BaseAssignment {
    BaseAssignment::uniform(FinCat::discrete(2))
}

/// Bases for the demos: `A` the walking arrow, `B` two points, `C` the
/// group of order two.
pub fn demo_bases() -> BaseAssignment {
    BaseAssignment::default()
        .with("A", FinCat::walking_arrow())
        .with("B", FinCat::discrete(2))
        .with("C", FinCat::z2())
}

/// The pinned separating pair, as source text.
pub const WITNESS: &str = "\
red witness_left [z:+C, k:-C] : # = beta_mu(mu~ x. <z | k : C>; a. <z | k : C> : Top)
red witness_right [z:+C, k:-C] : # = beta_mu~(mu a. <z | k : C>; x. <z | k : C> : Top)
";

/// A critical pair with two different reducts, each checked.
#[derive(Clone, Debug)]
pub struct LafontPair {
    pub context: Context,
    pub source: Expr,
    pub via_mu: ReductionCell,
    pub via_mu_tilde: ReductionCell,
}

/// `<mu a. <z | k : C> | mu~ x. <w | j : C> : Top>` reduces to either cut.
pub fn lafont(model: &Model) -> Result<LafontPair> {
    let c = TypeExpr::base("C");
    let context = Context::new(vec![
        Hyp::new("z", Polarity::Plus, c.clone()),
        Hyp::new("k", Polarity::Minus, c.clone()),
        Hyp::new("w", Polarity::Plus, c.clone()),
        Hyp::new("j", Polarity::Minus, c.clone()),
    ])
    .expect("distinct names");
    let s1 = StatementExpr::cut(TermExpr::Var(Name::new("z")), CoTermExpr::CoVar(Name::new("k")), c.clone());
    let s2 = StatementExpr::cut(TermExpr::Var(Name::new("w")), CoTermExpr::CoVar(Name::new("j")), c);
    let (a, x) = (Name::new("a"), Name::new("x"));
    let mu = TermExpr::Mu(a.clone(), Box::new(s1.clone()));
    let mut_ = CoTermExpr::MuTilde(x.clone(), Box::new(s2.clone()));
    let source = Expr::Statement(StatementExpr::cut(mu.clone(), mut_.clone(), TypeExpr::Top));
    let l = ReductionExpr::BetaMu { coterm: mut_, binder: a, body: s1, ann: Some(TypeExpr::Top) };
    let r = ReductionExpr::BetaMuTilde { term: mu, binder: x, body: s2, ann: Some(TypeExpr::Top) };
    let via_mu = model.reduction(&context, &l, Some(&Judgment::Absurd))?;
    let via_mu_tilde = model.reduction(&context, &r, Some(&Judgment::Absurd))?;
    Ok(LafontPair { context, source, via_mu, via_mu_tilde })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn span_mode_refuses_non_discrete_bases() {
        assert!(matches!(Model::new(demo_bases(), Mode::Span), Err(ModelError::NotDiscrete(Mode::Span, n)) if n == "A"));
        assert!(matches!(Model::new(demo_bases(), Mode::Rel), Err(ModelError::NotDiscrete(Mode::Rel, _))));
        assert!(Model::new(discrete_bases(), Mode::Span).is_ok());
        assert!(Model::new(discrete_bases(), Mode::Rel).is_ok());
    }

    #[test]
    fn modes_parse() {
        for m in [Mode::Prof, Mode::Span, Mode::Rel] {
            assert_eq!(m.to_string().parse::<Mode>().unwrap(), m);
        }
        assert!("set".parse::<Mode>().is_err());
    }

    #[test]
    fn truncation_keeps_support() {
        let sem = Semantics::new(demo_bases());
        let ctx = Context::new(vec![Hyp::new("x", Polarity::Plus, TypeExpr::base("A"))]).unwrap();
        let p = sem.interp(&ctx, &Expr::Term(TermExpr::Var(Name::new("x"))), &Judgment::TermAt(TypeExpr::base("A"))).unwrap();
        let t = truncate(&p);
        for i in 0..p.n_points() {
            assert_eq!(t.value(i).len(), usize::from(!p.value(i).is_empty()));
        }
        crate::fincat::validate_functor(t.body()).unwrap();
    }

    #[test]
    fn generated_pairs_are_parallel() {
        let pairs = vacuous_critical_pairs(40);
        assert_eq!(pairs.len(), 40);
        for bases in [demo_bases(), discrete_bases()] {
            let p = degeneracy(&Model::new(bases, Mode::Prof).unwrap(), &pairs).unwrap();
            assert_eq!(p.parallel, 40);
            assert!(p.distinct > 0);
        }
        let rel = Model::new(discrete_bases(), Mode::Rel).unwrap();
        assert_eq!(degeneracy(&rel, &pairs).unwrap().distinct, 0);
    }

    #[test]
    fn connectives_collapse_only_in_rel() {
        let names = [Name::new("A"), Name::new("C")];
        let rel = connective_shape(&Model::new(discrete_bases(), Mode::Rel).unwrap(), &names).unwrap();
        assert_eq!(rel, ShapeReport { types: 4, and_or_coincide: true, negation_preserves_cardinality: true });
        let prof = connective_shape(&Model::new(discrete_bases(), Mode::Prof).unwrap(), &names).unwrap();
        assert!(prof.negation_preserves_cardinality);
    }

    #[test]
    fn corpus_pairs_need_equal_endpoints() {
        let src = "red p [x:+A, k:-A] : # = refl(<x | k : A>)\n\
                   red q [x:+A, k:-A] : # = refl(<x | k : A>)\n\
                   red r [x:+A, k:-A] : # = beta_mu(k; a. <x | a : A>)\n";
        let file = crate::parser::parse(src).unwrap();
        let pairs = corpus_pairs(&file.declarations);
        assert_eq!(pairs.len(), 1);
        assert_eq!(degeneracy(&Model::new(discrete_bases(), Mode::Prof).unwrap(), &pairs).unwrap().distinct, 0);
    }

    #[test]
    fn lafont_reducts_differ() {
        let l = lafont(&Model::new(demo_bases(), Mode::Prof).unwrap()).unwrap();
        assert_eq!(l.via_mu.typing.source, l.via_mu_tilde.typing.source);
        assert_ne!(l.via_mu.typing.target, l.via_mu_tilde.typing.target);
    }
}
