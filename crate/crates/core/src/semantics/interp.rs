use std::sync::Arc;

use super::{Result, SemError, Semantics};
use crate::fincat::{Elem, FinCat, Slot, Variance};
use crate::profunctor::{compose_over, pair, product_size, project, relabel, retype_flip, Composite, Coord, Profunctor, Side};
use crate::syntax::{CoTermExpr, Expr, StatementExpr, TermExpr, TypeExpr};
use crate::typing::{open_stmt, Checker, Context, Judgment, Polarity};

fn shape(what: &str, ty: &TypeExpr) -> SemError {
    SemError::Mismatch(format!("{what} cannot have type {ty}"))
}

impl Semantics {
    pub(crate) fn context_layout(&self, ctx: &Context) -> (Vec<Coord>, Vec<Slot>) {
        let coords = ctx.hyps().iter().map(|h| Coord::Hyp(h.name.clone())).collect();
        let slots = ctx
            .hyps()
            .iter()
            .map(|h| {
                let v = match h.polarity {
                    Polarity::Plus => Variance::Covariant,
                    Polarity::Minus => Variance::Contravariant,
                };
                Slot::new(self.type_cat(&h.ty), v)
            })
            .collect();
        (coords, slots)
    }

    /// The layout of an expression with judgment `j` in `ctx`.
    pub(crate) fn layout(&self, ctx: &Context, j: &Judgment) -> (Vec<Coord>, Vec<Slot>) {
        let (mut coords, mut slots) = self.context_layout(ctx);
        match j {
            Judgment::TermAt(t) => {
                coords.push(Coord::Result);
                slots.push(Slot::new(self.type_cat(t), Variance::Contravariant));
            }
            Judgment::CoTermAt(t) => {
                coords.push(Coord::Result);
                slots.push(Slot::new(self.type_cat(t), Variance::Covariant));
            }
            Judgment::Absurd => {}
        }
        (coords, slots)
    }

    /// Type checks `e` against `j` and interprets it.
    pub fn interp(&self, ctx: &Context, e: &Expr, j: &Judgment) -> Result<Profunctor> {
        Checker::default().check_expr(ctx, e, j)?;
        self.interp_unchecked(ctx, e, j)
    }

    pub(crate) fn interp_unchecked(&self, ctx: &Context, e: &Expr, j: &Judgment) -> Result<Profunctor> {
        match (e, j) {
            (Expr::Term(m), Judgment::TermAt(t)) => self.term(ctx, m, t),
            (Expr::CoTerm(k), Judgment::CoTermAt(t)) => self.coterm(ctx, k, t),
            (Expr::Statement(s), Judgment::Absurd) => self.stmt(ctx, s),
            _ => Err(SemError::Mismatch(format!("expression sort does not match judgment {j}"))),
        }
    }

    fn hom_between(&self, coords: Vec<Coord>, slots: Vec<Slot>, cov: usize, contra: usize) -> Result<Profunctor> {
        Ok(crate::profunctor::hom(coords, slots, cov, contra)?)
    }

    fn singleton(&self, ctx: &Context, j: &Judgment) -> Result<Profunctor> {
        let (coords, slots) = self.layout(ctx, j);
        Ok(Profunctor::tabulate(coords, slots, |_| vec![Elem::Unit], |_, _, _, e| Ok(e.clone()))?)
    }

    pub(crate) fn term(&self, ctx: &Context, m: &TermExpr, ty: &TypeExpr) -> Result<Profunctor> {
        let j = Judgment::TermAt(ty.clone());
        match m {
            TermExpr::Var(x) => {
                let i = ctx.hyps().iter().position(|h| &h.name == x).ok_or_else(|| SemError::Mismatch(format!("`{x}` unbound")))?;
                let (coords, slots) = self.layout(ctx, &j);
                let n = coords.len() - 1;
                self.hom_between(coords, slots, i, n)
            }
            TermExpr::Mu(a, s) => {
                let (b, s) = open_stmt(ctx, a, s);
                let inner = self.stmt(&ctx.extended(b.clone(), Polarity::Minus, ty.clone()), &s)?;
                Ok(relabel(&inner, &Coord::Hyp(b), Coord::Result)?)
            }
            TermExpr::Unit => self.singleton(ctx, &j),
            TermExpr::Pair(l, r) => match ty {
                TypeExpr::And(a, b) => Ok(pair(&self.term(ctx, l, a)?, &self.term(ctx, r, b)?, &Coord::Result)?),
                _ => Err(shape("a pair", ty)),
            },
            TermExpr::Inl(n) => match ty {
                TypeExpr::Or(a, b) => Ok(project(&self.term(ctx, n, a)?, &Coord::Result, &self.type_cat(b), Side::Left)?),
                _ => Err(shape("an injection", ty)),
            },
            TermExpr::Inr(n) => match ty {
                TypeExpr::Or(a, b) => Ok(project(&self.term(ctx, n, b)?, &Coord::Result, &self.type_cat(a), Side::Right)?),
                _ => Err(shape("an injection", ty)),
            },
            TermExpr::NotIntro(k) => match ty {
                TypeExpr::Not(a) => Ok(retype_flip(&self.coterm(ctx, k, a)?, &Coord::Result)?),
                _ => Err(shape("a negation", ty)),
            },
        }
    }

    pub(crate) fn coterm(&self, ctx: &Context, k: &CoTermExpr, ty: &TypeExpr) -> Result<Profunctor> {
        let j = Judgment::CoTermAt(ty.clone());
        match k {
            CoTermExpr::CoVar(a) => {
                let i = ctx.hyps().iter().position(|h| &h.name == a).ok_or_else(|| SemError::Mismatch(format!("`{a}` unbound")))?;
                let (coords, slots) = self.layout(ctx, &j);
                let n = coords.len() - 1;
                self.hom_between(coords, slots, n, i)
            }
            CoTermExpr::MuTilde(x, s) => {
                let (b, s) = open_stmt(ctx, x, s);
                let inner = self.stmt(&ctx.extended(b.clone(), Polarity::Plus, ty.clone()), &s)?;
                Ok(relabel(&inner, &Coord::Hyp(b), Coord::Result)?)
            }
            CoTermExpr::CoUnit => self.singleton(ctx, &j),
            CoTermExpr::Fst(l) => match ty {
                TypeExpr::And(a, b) => Ok(project(&self.coterm(ctx, l, a)?, &Coord::Result, &self.type_cat(b), Side::Left)?),
                _ => Err(shape("a projection", ty)),
            },
            CoTermExpr::Snd(l) => match ty {
                TypeExpr::And(a, b) => Ok(project(&self.coterm(ctx, l, b)?, &Coord::Result, &self.type_cat(a), Side::Right)?),
                _ => Err(shape("a projection", ty)),
            },
            CoTermExpr::Case(l, r) => match ty {
                TypeExpr::Or(a, b) => Ok(pair(&self.coterm(ctx, l, a)?, &self.coterm(ctx, r, b)?, &Coord::Result)?),
                _ => Err(shape("a case", ty)),
            },
            CoTermExpr::NotElim(m) => match ty {
                TypeExpr::Not(a) => Ok(retype_flip(&self.term(ctx, m, a)?, &Coord::Result)?),
                _ => Err(shape("a negation", ty)),
            },
        }
    }

    pub(crate) fn stmt(&self, ctx: &Context, s: &StatementExpr) -> Result<Profunctor> {
        Ok(self.cut_composite(ctx, s)?.result)
    }

    /// The composite interpreting a cut, with its coend data.
    pub fn cut_composite(&self, ctx: &Context, s: &StatementExpr) -> Result<Composite> {
        let m = self.term(ctx, &s.term, &s.cut_type)?;
        let k = self.coterm(ctx, &s.coterm, &s.cut_type)?;
        self.compose(&m, &k, &Coord::Result)
    }

    /// [`compose_over`] guarded by the element limit.
    pub(crate) fn compose(&self, left: &Profunctor, right: &Profunctor, over: &Coord) -> Result<Composite> {
        let size = product_size(left, right, over).unwrap_or(usize::MAX);
        if size > self.limit {
            return Err(SemError::TooLarge { size, limit: self.limit });
        }
        Ok(compose_over(left, right, over)?)
    }
}

/// Index of an arrow element of `cat`.
pub(crate) fn arrow_of(cat: &Arc<FinCat>, e: &Elem) -> Result<u32> {
    match e {
        Elem::Arrow(n) => cat.arrow_index(n).ok_or_else(|| SemError::Mismatch(format!("`{n}` is not an arrow"))),
        other => Err(SemError::Mismatch(format!("`{other}` is not an arrow"))),
    }
}
