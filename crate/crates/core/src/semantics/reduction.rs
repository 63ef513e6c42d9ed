use super::gbeta::{Arg, Delayed};
use super::{Result, SemError, Semantics};
use crate::fincat::Elem;
use crate::profunctor::{hcomp, pair_nat, project_nat, Coord, NatTrans, Profunctor, Side};
use crate::syntax::{Expr, ReductionExpr, TypeExpr};
use crate::typing::{open_reduction, open_stmt, Checker, Context, Judgment, Polarity, ReductionTyping};

/// A checked reduction together with its interpretation.
#[derive(Clone, Debug)]
pub struct ReductionCell {
    pub typing: ReductionTyping,
    pub source: Profunctor,
    pub target: Profunctor,
    pub cell: NatTrans,
}

impl ReductionCell {
    /// True when the cell runs exactly between the interpretations of the
    /// endpoints.
    pub fn endpoints_match(&self) -> bool {
        self.cell.source() == &self.source && self.cell.target() == &self.target
    }
}

fn expect_pair<'a>(ty: &'a TypeExpr, what: &str) -> Result<(&'a TypeExpr, &'a TypeExpr)> {
    match ty {
        TypeExpr::And(a, b) | TypeExpr::Or(a, b) => Ok((a, b)),
        _ => Err(SemError::Mismatch(format!("{what} at non-binary type {ty}"))),
    }
}

impl Semantics {
    /// Checks `r` and interprets it, together with both endpoints.
    pub fn reduction(&self, ctx: &Context, r: &ReductionExpr, j: Option<&Judgment>) -> Result<ReductionCell> {
        let typing = Checker::default().reduction(ctx, r, j)?;
        let cell = self.cell(ctx, r, &typing.judgment)?;
        let source = self.interp_unchecked(ctx, &typing.source, &typing.judgment)?;
        let target = self.interp_unchecked(ctx, &typing.target, &typing.judgment)?;
        Ok(ReductionCell { typing, source, target, cell })
    }

    fn cell(&self, ctx: &Context, r: &ReductionExpr, j: &Judgment) -> Result<NatTrans> {
        use ReductionExpr as R;
        match r {
            R::Refl(u) => Ok(NatTrans::identity(&self.interp_unchecked(ctx, u, j)?)),
            R::Trans(p, q) => Ok(self.cell(ctx, p, j)?.vcomp(&self.cell(ctx, q, j)?)?),
            R::CongMu(b, p) | R::CongMuTilde(b, p) => {
                let (pol, ty) = match (r, j) {
                    (R::CongMu(..), Judgment::TermAt(t)) => (Polarity::Minus, t),
                    (R::CongMuTilde(..), Judgment::CoTermAt(t)) => (Polarity::Plus, t),
                    _ => return Err(SemError::Mismatch(format!("binder congruence at {j}"))),
                };
                let (b, p) = open_reduction(ctx, b, p);
                let inner = self.cell(&ctx.extended(b.clone(), pol, ty.clone()), &p, &Judgment::Absurd)?;
                Ok(inner.relabel(&Coord::Hyp(b), Coord::Result)?)
            }
            R::CongCut(p, q, a) => {
                let tp = self.cell(ctx, p, &Judgment::TermAt(a.clone()))?;
                let tq = self.cell(ctx, q, &Judgment::CoTermAt(a.clone()))?;
                let src = self.compose(tp.source(), tq.source(), &Coord::Result)?;
                let tgt = self.compose(tp.target(), tq.target(), &Coord::Result)?;
                Ok(hcomp(&tp, &tq, &src, &tgt)?)
            }
            R::CongPair(p, q) | R::CongCase(p, q) => {
                let (ty, mk): (_, fn(TypeExpr) -> Judgment) = match (r, j) {
                    (R::CongPair(..), Judgment::TermAt(t)) => (t, Judgment::TermAt),
                    (R::CongCase(..), Judgment::CoTermAt(t)) => (t, Judgment::CoTermAt),
                    _ => return Err(SemError::Mismatch(format!("pairing congruence at {j}"))),
                };
                let (a, b) = expect_pair(ty, "pairing congruence")?;
                let tp = self.cell(ctx, p, &mk(a.clone()))?;
                let tq = self.cell(ctx, q, &mk(b.clone()))?;
                Ok(pair_nat(&tp, &tq, &Coord::Result)?)
            }
            R::CongInl(p) | R::CongInr(p) | R::CongFst(p) | R::CongSnd(p) => {
                let (ty, mk): (_, fn(TypeExpr) -> Judgment) = match (r, j) {
                    (R::CongInl(_) | R::CongInr(_), Judgment::TermAt(t)) => (t, Judgment::TermAt),
                    (R::CongFst(_) | R::CongSnd(_), Judgment::CoTermAt(t)) => (t, Judgment::CoTermAt),
                    _ => return Err(SemError::Mismatch(format!("projection congruence at {j}"))),
                };
                let (a, b) = expect_pair(ty, "projection congruence")?;
                if matches!(r, R::CongInl(_) | R::CongFst(_)) {
                    let inner = self.cell(ctx, p, &mk(a.clone()))?;
                    Ok(project_nat(&inner, &Coord::Result, &self.type_cat(b), Side::Left)?)
                } else {
                    let inner = self.cell(ctx, p, &mk(b.clone()))?;
                    Ok(project_nat(&inner, &Coord::Result, &self.type_cat(a), Side::Right)?)
                }
            }
            R::CongNotIntro(p) | R::CongNotElim(p) => {
                let inner_j = match (r, j) {
                    (R::CongNotIntro(_), Judgment::TermAt(TypeExpr::Not(a))) => Judgment::CoTermAt((**a).clone()),
                    (R::CongNotElim(_), Judgment::CoTermAt(TypeExpr::Not(a))) => Judgment::TermAt((**a).clone()),
                    _ => return Err(SemError::Mismatch(format!("negation congruence at {j}"))),
                };
                Ok(self.cell(ctx, p, &inner_j)?.retype_flip(&Coord::Result)?)
            }
            R::BetaMu { binder, body, .. } | R::BetaMuTilde { binder, body, .. } => {
                let typing = Checker::default().reduction(ctx, r, Some(&Judgment::Absurd))?;
                let Expr::Statement(src) = &typing.source else { unreachable!() };
                let arg = match r {
                    R::BetaMu { coterm, .. } => Arg::CoTerm(coterm.clone()),
                    R::BetaMuTilde { term, .. } => Arg::Term(term.clone()),
                    _ => unreachable!(),
                };
                let (var, body) = open_stmt(ctx, binder, body);
                let d = Delayed::new(self, ctx.clone(), var, src.cut_type.clone(), arg);
                let cell = d.gbeta(&Expr::Statement(body), &Judgment::Absurd)?;
                // the delayed statement is the redex itself
                let source = self.stmt(ctx, src)?;
                if cell.source().body().values() != source.body().values() {
                    return Err(SemError::Mismatch("structural beta: source differs from the redex".into()));
                }
                Ok(NatTrans::new(source, cell.target().clone(), cell.components().to_vec())?)
            }
            R::BetaFst { .. } | R::BetaSnd { .. } | R::BetaInl { .. } | R::BetaInr { .. } | R::BetaNot { .. } => {
                let typing = Checker::default().reduction(ctx, r, Some(&Judgment::Absurd))?;
                let (Expr::Statement(s), Expr::Statement(t)) = (&typing.source, &typing.target) else { unreachable!() };
                let src = self.cut_composite(ctx, s)?;
                let tgt = self.cut_composite(ctx, t)?;
                let n2 = match &s.cut_type {
                    TypeExpr::And(_, b) | TypeExpr::Or(_, b) => self.type_cat(b).n_objects() as u32,
                    _ => 1,
                };
                let pair_of = |e: &Elem| e.as_pair().map(|(a, b)| (a.clone(), b.clone())).ok_or_else(|| SemError::Mismatch(format!("`{e}` is not a pair")));
                let cell = NatTrans::from_classes(&src, tgt.result.clone(), |rp, d, l, q| {
                    let lookup = |a: u32, x: &Elem, y: &Elem| tgt.class(rp, a, x, y);
                    match r {
                        R::BetaFst { .. } => {
                            let (m, _) = pair_of(l).map_err(to_fin)?;
                            lookup(d / n2, &m, q)
                        }
                        R::BetaSnd { .. } => {
                            let (_, n) = pair_of(l).map_err(to_fin)?;
                            lookup(d % n2, &n, q)
                        }
                        R::BetaInl { .. } => {
                            let (j, _) = pair_of(q).map_err(to_fin)?;
                            lookup(d / n2, l, &j)
                        }
                        R::BetaInr { .. } => {
                            let (_, k) = pair_of(q).map_err(to_fin)?;
                            lookup(d % n2, l, &k)
                        }
                        _ => lookup(d, q, l),
                    }
                })?;
                Ok(cell)
            }
        }
    }
}

fn to_fin(e: SemError) -> crate::fincat::FinError {
    crate::fincat::FinError::Malformed(e.to_string())
}
