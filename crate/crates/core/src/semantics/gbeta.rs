//! Structural beta through delayed substitution.
//!
//! For an argument `M : +A` substituted for `x` (or `K : -A` for `a`) and
//! an expression `V` mentioning it, `E_V` is the composite of the argument
//! with `V` over the substituted coordinate. `theta` maps `E_V` to the
//! interpretation of `V` with the argument substituted, by induction on
//! `V`; `iota` identifies the interpretation of the delayed form of `V`
//! with `E_V`. Their composite is the generalized beta cell.

use std::collections::BTreeSet;

use super::interp::arrow_of;
use super::{Result, SemError, Semantics};
use crate::fincat::{Elem, FinError};
use crate::profunctor::{
    hcomp, nat_eq, pair, pair_nat, project, project_nat, relabel, retype_flip, weaken, Composite, Coord, NatTrans, Profunctor,
    Side,
};
use crate::syntax::{all_names, fresh_name, rename_stmt, subst, CoTermExpr, Expr, Kind, Name, ReductionExpr, StatementExpr, TermExpr, TypeExpr};
use crate::typing::{Context, Judgment, Polarity};

type FinResult<T> = std::result::Result<T, FinError>;

/// The substituted argument.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Arg {
    /// A term replacing a variable.
    Term(TermExpr),
    /// A co-term replacing a covariable.
    CoTerm(CoTermExpr),
}

impl Arg {
    pub fn expr(&self) -> Expr {
        match self {
            Arg::Term(m) => Expr::Term(m.clone()),
            Arg::CoTerm(k) => Expr::CoTerm(k.clone()),
        }
    }
}

/// Locates a factor's point from a residual point and a diagonal object.
type PointOf = fn(&Composite, usize, u32) -> usize;

/// A pending substitution of `arg : ty` for `var` over context `gamma`.
#[derive(Clone, Debug)]
pub struct Delayed<'a> {
    sem: &'a Semantics,
    gamma: Context,
    var: Name,
    ty: TypeExpr,
    arg: Arg,
}

/// Both ways of building the beta cell of a term or co-term.
#[derive(Clone, Debug)]
pub struct CoincidenceReport {
    pub equal: bool,
    pub generalized: NatTrans,
    pub via_congruence: NatTrans,
}

fn bad(what: &str, e: &Elem) -> FinError {
    FinError::Malformed(format!("expected {what}, found `{e}`"))
}

fn as_pair(e: &Elem) -> FinResult<(&Elem, &Elem)> {
    e.as_pair().ok_or_else(|| bad("a pair", e))
}

fn as_class(e: &Elem) -> FinResult<(u32, &Elem)> {
    e.as_class().ok_or_else(|| bad("a coend class", e))
}

fn fin(e: SemError) -> FinError {
    match e {
        SemError::Fin(f) => f,
        other => FinError::Malformed(other.to_string()),
    }
}

fn binary(ty: &TypeExpr) -> Result<(&TypeExpr, &TypeExpr)> {
    match ty {
        TypeExpr::And(a, b) | TypeExpr::Or(a, b) => Ok((a, b)),
        _ => Err(SemError::Mismatch(format!("expected a binary connective, found {ty}"))),
    }
}

fn judgment_type(j: &Judgment) -> Result<&TypeExpr> {
    match j {
        Judgment::TermAt(t) | Judgment::CoTermAt(t) => Ok(t),
        Judgment::Absurd => Err(SemError::Mismatch("a statement has no type".into())),
    }
}

impl<'a> Delayed<'a> {
    pub fn new(sem: &'a Semantics, gamma: Context, var: Name, ty: TypeExpr, arg: Arg) -> Self {
        Delayed { sem, gamma, var, ty, arg }
    }

    fn polarity(&self) -> Polarity {
        match self.arg {
            Arg::Term(_) => Polarity::Plus,
            Arg::CoTerm(_) => Polarity::Minus,
        }
    }

    fn on_term_side(&self) -> bool {
        matches!(self.arg, Arg::Term(_))
    }

    /// The context in which `V` lives: `delta` followed by the variable.
    pub fn var_context(&self, delta: &Context) -> Context {
        delta.extended(self.var.clone(), self.polarity(), self.ty.clone())
    }

    fn arg_in(&self, delta: &Context) -> Result<Profunctor> {
        match &self.arg {
            Arg::Term(m) => self.sem.term(delta, m, &self.ty),
            Arg::CoTerm(k) => self.sem.coterm(delta, k, &self.ty),
        }
    }

    fn avoid(&self, delta: &Context, v: &Expr) -> BTreeSet<Name> {
        let mut out = delta.names();
        out.insert(self.var.clone());
        all_names(&self.arg.expr(), &mut out);
        all_names(v, &mut out);
        out
    }

    /// Opens a binder of `V` for the recursion, renaming it away from the
    /// context, the variable and the argument.
    fn open(&self, delta: &Context, binder: &Name, body: &StatementExpr, v: &Expr) -> (Name, StatementExpr) {
        let mut clash = delta.names();
        clash.insert(self.var.clone());
        all_names(&self.arg.expr(), &mut clash);
        if !clash.contains(binder) {
            return (binder.clone(), body.clone());
        }
        let b = fresh_name(&self.avoid(delta, v), binder);
        let renamed = rename_stmt(body, binder, &b);
        (b, renamed)
    }

    /// The composite `E_V` of the argument with `V` over the variable.
    pub fn composite(&self, delta: &Context, v: &Expr, j: &Judgment) -> Result<Composite> {
        let over = Coord::Hyp(self.var.clone());
        let vp = self.sem.interp_unchecked(&self.var_context(delta), v, j)?;
        let mut ap = relabel(&self.arg_in(delta)?, &Coord::Result, over.clone())?;
        if *j != Judgment::Absurd {
            let n = ap.coords().len();
            ap = weaken(&ap, Coord::Result, vp.slot(vp.coords().len() - 1).clone(), n)?;
        }
        if self.on_term_side() {
            self.sem.compose(&ap, &vp, &over)
        } else {
            self.sem.compose(&vp, &ap, &over)
        }
    }

    /// Splits a member of `E_V` into its `V` part and its argument part.
    fn split<'e>(&self, l: &'e Elem, q: &'e Elem) -> (&'e Elem, &'e Elem) {
        if self.on_term_side() {
            (q, l)
        } else {
            (l, q)
        }
    }

    fn class(&self, e: &Composite, r: usize, obj: u32, v: &Elem, a: &Elem) -> FinResult<Elem> {
        if self.on_term_side() {
            e.class(r, obj, a, v)
        } else {
            e.class(r, obj, v, a)
        }
    }

    fn v_factor<'e>(&self, e: &'e Composite) -> &'e Profunctor {
        if self.on_term_side() {
            &e.right
        } else {
            &e.left
        }
    }

    fn arg_factor<'e>(&self, e: &'e Composite) -> (&'e Profunctor, PointOf) {
        if self.on_term_side() {
            (&e.left, Composite::left_point)
        } else {
            (&e.right, Composite::right_point)
        }
    }

    /// `V` with the argument substituted.
    pub fn substituted(&self, v: &Expr) -> Result<Expr> {
        let kind = if self.on_term_side() { Kind::Variable } else { Kind::Covariable };
        Ok(subst(v, &self.var, kind, &self.arg.expr())?)
    }

    fn target(&self, delta: &Context, v: &Expr, j: &Judgment) -> Result<Profunctor> {
        self.sem.interp_unchecked(delta, &self.substituted(v)?, j)
    }

    /// `E_V` and the cell from it to the substituted interpretation.
    pub fn theta(&self, delta: &Context, v: &Expr, j: &Judgment) -> Result<(Composite, NatTrans)> {
        let ev = self.composite(delta, v, j)?;
        let th = self.theta_cases(delta, v, j, &ev)?;
        Ok((ev, th))
    }

    fn theta_cases(&self, delta: &Context, v: &Expr, j: &Judgment, ev: &Composite) -> Result<NatTrans> {
        let sem = self.sem;
        match v {
            Expr::Statement(s) => {
                let b = &s.cut_type;
                let (el, tl) = self.theta(delta, &Expr::Term(s.term.clone()), &Judgment::TermAt(b.clone()))?;
                let (er, tr) = self.theta(delta, &Expr::CoTerm(s.coterm.clone()), &Judgment::CoTermAt(b.clone()))?;
                let mid = sem.compose(&el.result, &er.result, &Coord::Result)?;
                let dist = NatTrans::from_classes(ev, mid.result.clone(), |r, a, l, q| {
                    let (vv, w) = self.split(l, q);
                    let (obj, inner) = as_class(vv)?;
                    let (lv, rv) = as_pair(inner)?;
                    let le = self.class(&el, mid.left_point(r, obj), a, lv, w)?;
                    let re = self.class(&er, mid.right_point(r, obj), a, rv, w)?;
                    mid.class(r, obj, &le, &re)
                })?;
                let tgt = sem.compose(tl.target(), tr.target(), &Coord::Result)?;
                Ok(dist.vcomp(&hcomp(&tl, &tr, &mid, &tgt)?)?)
            }
            Expr::Term(TermExpr::Var(y)) if *y == self.var && self.on_term_side() => self.bound_case(delta, v, j, ev),
            Expr::CoTerm(CoTermExpr::CoVar(y)) if *y == self.var && !self.on_term_side() => {
                self.bound_case(delta, v, j, ev)
            }
            Expr::Term(TermExpr::Var(_)) | Expr::CoTerm(CoTermExpr::CoVar(_)) => {
                let target = self.target(delta, v, j)?;
                Ok(NatTrans::from_classes(ev, target, |_, _, l, q| Ok(self.split(l, q).0.clone()))?)
            }
            Expr::Term(TermExpr::Unit) | Expr::CoTerm(CoTermExpr::CoUnit) => {
                let target = self.target(delta, v, j)?;
                Ok(NatTrans::from_classes(ev, target, |_, _, _, _| Ok(Elem::Unit))?)
            }
            Expr::Term(TermExpr::Mu(b, s)) | Expr::CoTerm(CoTermExpr::MuTilde(b, s)) => {
                let pol = if matches!(v, Expr::Term(_)) { Polarity::Minus } else { Polarity::Plus };
                let (b, s) = self.open(delta, b, s, v);
                let inner = delta.extended(b.clone(), pol, judgment_type(j)?.clone());
                let (_, ts) = self.theta(&inner, &Expr::Statement(s), &Judgment::Absurd)?;
                let bc = Coord::Hyp(b);
                let source = relabel(ts.source(), &bc, Coord::Result)?;
                if source.body().values() != ev.result.body().values() {
                    return Err(SemError::Mismatch("binder case: composites differ".into()));
                }
                let target = relabel(ts.target(), &bc, Coord::Result)?;
                Ok(NatTrans::new(ev.result.clone(), target, ts.components().to_vec())?)
            }
            Expr::Term(TermExpr::Pair(n1, n2)) => {
                let (b1, b2) = binary(judgment_type(j)?)?;
                let parts = (Expr::Term((**n1).clone()), Expr::Term((**n2).clone()));
                self.pair_case(delta, ev, parts, (Judgment::TermAt(b1.clone()), Judgment::TermAt(b2.clone())), b2)
            }
            Expr::CoTerm(CoTermExpr::Case(k1, k2)) => {
                let (b1, b2) = binary(judgment_type(j)?)?;
                let parts = (Expr::CoTerm((**k1).clone()), Expr::CoTerm((**k2).clone()));
                self.pair_case(delta, ev, parts, (Judgment::CoTermAt(b1.clone()), Judgment::CoTermAt(b2.clone())), b2)
            }
            Expr::Term(TermExpr::Inl(n)) | Expr::Term(TermExpr::Inr(n)) => {
                let (b1, b2) = binary(judgment_type(j)?)?;
                let left = matches!(v, Expr::Term(TermExpr::Inl(_)));
                let (inner_ty, other) = if left { (b1, b2) } else { (b2, b1) };
                let side = if left { Side::Left } else { Side::Right };
                self.projection_case(delta, ev, Expr::Term((**n).clone()), Judgment::TermAt(inner_ty.clone()), other, side)
            }
            Expr::CoTerm(CoTermExpr::Fst(k)) | Expr::CoTerm(CoTermExpr::Snd(k)) => {
                let (b1, b2) = binary(judgment_type(j)?)?;
                let left = matches!(v, Expr::CoTerm(CoTermExpr::Fst(_)));
                let (inner_ty, other) = if left { (b1, b2) } else { (b2, b1) };
                let side = if left { Side::Left } else { Side::Right };
                self.projection_case(delta, ev, Expr::CoTerm((**k).clone()), Judgment::CoTermAt(inner_ty.clone()), other, side)
            }
            Expr::Term(TermExpr::NotIntro(_)) | Expr::CoTerm(CoTermExpr::NotElim(_)) => {
                let TypeExpr::Not(b) = judgment_type(j)? else {
                    return Err(SemError::Mismatch("negation at a non-negated type".into()));
                };
                let b = (**b).clone();
                let (inner, inner_j) = match v {
                    Expr::Term(TermExpr::NotIntro(k)) => (Expr::CoTerm((**k).clone()), Judgment::CoTermAt(b)),
                    Expr::CoTerm(CoTermExpr::NotElim(m)) => (Expr::Term((**m).clone()), Judgment::TermAt(b)),
                    _ => unreachable!(),
                };
                let (e1, t1) = self.theta(delta, &inner, &inner_j)?;
                let mid = retype_flip(&e1.result, &Coord::Result)?;
                let ident = NatTrans::tabulate(ev.result.clone(), mid, |_, e| Ok(e.clone()))?;
                Ok(ident.vcomp(&t1.retype_flip(&Coord::Result)?)?)
            }
        }
    }

    /// The variable itself: the collapse of the argument against a hom.
    fn bound_case(&self, delta: &Context, v: &Expr, j: &Judgment, ev: &Composite) -> Result<NatTrans> {
        let target = self.target(delta, v, j)?;
        let (ap, point) = self.arg_factor(ev);
        let slot = ap.slot_of(&Coord::Hyp(self.var.clone())).expect("argument carries the variable");
        let cat = ap.slot(slot).cat.clone();
        Ok(NatTrans::from_classes(ev, target, |r, a, l, q| {
            let (h, m) = self.split(l, q);
            let f = arrow_of(&cat, h).map_err(fin)?;
            ap.body().act_elem(slot, f, point(ev, r, a), m).cloned().ok_or_else(|| bad("an argument element", m))
        })?)
    }

    fn pair_case(
        &self,
        delta: &Context,
        ev: &Composite,
        parts: (Expr, Expr),
        js: (Judgment, Judgment),
        second: &TypeExpr,
    ) -> Result<NatTrans> {
        let (e1, t1) = self.theta(delta, &parts.0, &js.0)?;
        let (e2, t2) = self.theta(delta, &parts.1, &js.1)?;
        let mid = pair(&e1.result, &e2.result, &Coord::Result)?;
        let n2 = self.sem.type_cat(second).n_objects() as u32;
        let dist = NatTrans::from_classes(ev, mid, |r, a, l, q| {
            let (vv, w) = self.split(l, q);
            let (v1, v2) = as_pair(vv)?;
            let mut c = ev.result.body().coords(r);
            let last = c.len() - 1;
            let obj = c[last];
            c[last] = obj / n2;
            let r1 = e1.result.body().point(&c);
            c[last] = obj % n2;
            let r2 = e2.result.body().point(&c);
            Ok(Elem::pair(self.class(&e1, r1, a, v1, w)?, self.class(&e2, r2, a, v2, w)?))
        })?;
        Ok(dist.vcomp(&pair_nat(&t1, &t2, &Coord::Result)?)?)
    }

    fn projection_case(
        &self,
        delta: &Context,
        ev: &Composite,
        inner: Expr,
        inner_j: Judgment,
        other: &TypeExpr,
        side: Side,
    ) -> Result<NatTrans> {
        let (e1, t1) = self.theta(delta, &inner, &inner_j)?;
        let other = self.sem.type_cat(other);
        let mid = project(&e1.result, &Coord::Result, &other, side)?;
        let ident = NatTrans::tabulate(ev.result.clone(), mid, |_, e| Ok(e.clone()))?;
        Ok(ident.vcomp(&project_nat(&t1, &Coord::Result, &other, side)?)?)
    }

    fn fresh_binder(&self, delta: &Context, v: &Expr, hint: &str) -> Name {
        fresh_name(&self.avoid(delta, v), &Name::new(hint))
    }

    fn binder_hint(v: &Expr) -> &'static str {
        if matches!(v, Expr::Term(_)) {
            "b"
        } else {
            "y"
        }
    }

    /// The redex delaying the substitution into `V`: a cut against the
    /// binder for a statement, wrapped in a binder of the sort of `V`
    /// otherwise.
    pub fn delayed_expr(&self, delta: &Context, v: &Expr, j: &Judgment) -> Result<Expr> {
        let cut_with = |s: StatementExpr| match &self.arg {
            Arg::CoTerm(k) => StatementExpr::cut(TermExpr::Mu(self.var.clone(), Box::new(s)), k.clone(), self.ty.clone()),
            Arg::Term(m) => StatementExpr::cut(m.clone(), CoTermExpr::MuTilde(self.var.clone(), Box::new(s)), self.ty.clone()),
        };
        Ok(match v {
            Expr::Statement(s) => Expr::Statement(cut_with(s.clone())),
            Expr::Term(n) => {
                let b = self.fresh_binder(delta, v, Self::binder_hint(v));
                let inner = StatementExpr::cut(n.clone(), CoTermExpr::CoVar(b.clone()), judgment_type(j)?.clone());
                Expr::Term(TermExpr::Mu(b, Box::new(cut_with(inner))))
            }
            Expr::CoTerm(l) => {
                let y = self.fresh_binder(delta, v, Self::binder_hint(v));
                let inner = StatementExpr::cut(TermExpr::Var(y.clone()), l.clone(), judgment_type(j)?.clone());
                Expr::CoTerm(CoTermExpr::MuTilde(y, Box::new(cut_with(inner))))
            }
        })
    }

    /// From the interpretation of the delayed redex to `E_V`.
    pub fn iota(&self, delta: &Context, v: &Expr, j: &Judgment, ev: &Composite) -> Result<NatTrans> {
        let source = self.sem.interp_unchecked(delta, &self.delayed_expr(delta, v, j)?, j)?;
        if let Expr::Statement(_) = v {
            return Ok(NatTrans::tabulate(source, ev.result.clone(), |_, e| Ok(e.clone()))?);
        }
        let vp = self.v_factor(ev);
        let last = vp.coords().len() - 1;
        let cat = vp.slot(last).cat.clone();
        let is_term = matches!(v, Expr::Term(_));
        let src = source.clone();
        Ok(NatTrans::tabulate(source, ev.result.clone(), move |p, e| {
            let (a, outer) = as_class(e)?;
            let (l, q) = as_pair(outer)?;
            let (inner, w) = self.split(l, q);
            let (b, hv) = as_class(inner)?;
            let (x, y) = as_pair(hv)?;
            let (h, val) = if is_term { (y, x) } else { (x, y) };
            let mut c = src.body().coords(p);
            c.push(b);
            let n = c.len();
            c.swap(n - 2, n - 1);
            c[n - 1] = b;
            c[n - 2] = a;
            let vpt = vp.body().point(&c);
            let f = arrow_of(&cat, h).map_err(fin)?;
            let moved = vp.body().act_elem(last, f, vpt, val).ok_or_else(|| bad("an element of V", val))?;
            self.class(ev, p, a, moved, w)
        })?)
    }

    /// The generalized beta cell for `V` over the outer context.
    pub fn gbeta(&self, v: &Expr, j: &Judgment) -> Result<NatTrans> {
        let (iota, theta) = self.parts(v, j)?;
        Ok(iota.vcomp(&theta)?)
    }

    /// `iota` and `theta` separately, with `E_V`.
    pub fn parts(&self, v: &Expr, j: &Judgment) -> Result<(NatTrans, NatTrans)> {
        let (ev, theta) = self.theta(&self.gamma, v, j)?;
        let iota = self.iota(&self.gamma, v, j, &ev)?;
        Ok((iota, theta))
    }

    /// Compares the generalized cell for a term or co-term `V` with the
    /// one obtained from the statement case under a binder congruence,
    /// followed by the collapse of that binder.
    pub fn coincidence(&self, v: &Expr, j: &Judgment) -> Result<CoincidenceReport> {
        let generalized = self.gbeta(v, j)?;
        let ty = judgment_type(j)?.clone();
        let b = self.fresh_binder(&self.gamma, v, Self::binder_hint(v));
        let body = match v {
            Expr::Term(n) => StatementExpr::cut(n.clone(), CoTermExpr::CoVar(b.clone()), ty.clone()),
            Expr::CoTerm(l) => StatementExpr::cut(TermExpr::Var(b.clone()), l.clone(), ty.clone()),
            Expr::Statement(_) => return Err(SemError::Mismatch("coincidence is stated for terms and co-terms".into())),
        };
        let beta = match &self.arg {
            Arg::CoTerm(k) => ReductionExpr::BetaMu {
                coterm: k.clone(),
                binder: self.var.clone(),
                body,
                ann: Some(self.ty.clone()),
            },
            Arg::Term(m) => ReductionExpr::BetaMuTilde {
                term: m.clone(),
                binder: self.var.clone(),
                body,
                ann: Some(self.ty.clone()),
            },
        };
        let r = if matches!(v, Expr::Term(_)) {
            ReductionExpr::CongMu(b, Box::new(beta))
        } else {
            ReductionExpr::CongMuTilde(b, Box::new(beta))
        };
        let cong = self.sem.reduction(&self.gamma, &r, Some(j))?;
        let eta = self.sem.eta(&self.gamma, &self.substituted(v)?, j)?;
        let via_congruence = cong.cell.vcomp(&eta)?;
        let equal = nat_eq(&generalized, &via_congruence);
        Ok(CoincidenceReport { equal, generalized, via_congruence })
    }
}

impl Semantics {
    /// The collapse of a binder cut against itself: `mu b. <N | b>` onto
    /// `N`, or `mu~ y. <y | L>` onto `L`.
    pub fn eta(&self, ctx: &Context, v: &Expr, j: &Judgment) -> Result<NatTrans> {
        let ty = judgment_type(j)?.clone();
        let mut avoid = ctx.names();
        all_names(v, &mut avoid);
        let (wrapped, is_term) = match v {
            Expr::Term(n) => {
                let b = fresh_name(&avoid, &Name::new("b"));
                let s = StatementExpr::cut(n.clone(), CoTermExpr::CoVar(b.clone()), ty);
                (Expr::Term(TermExpr::Mu(b, Box::new(s))), true)
            }
            Expr::CoTerm(l) => {
                let y = fresh_name(&avoid, &Name::new("y"));
                let s = StatementExpr::cut(TermExpr::Var(y.clone()), l.clone(), ty);
                (Expr::CoTerm(CoTermExpr::MuTilde(y, Box::new(s))), false)
            }
            Expr::Statement(_) => return Err(SemError::Mismatch("a statement has no binder to collapse".into())),
        };
        let source = self.interp_unchecked(ctx, &wrapped, j)?;
        let target = self.interp_unchecked(ctx, v, j)?;
        let last = target.coords().len() - 1;
        let cat = target.slot(last).cat.clone();
        let tgt = target.clone();
        Ok(NatTrans::tabulate(source, target, move |p, e| {
            let (b, inner) = as_class(e)?;
            let (x, y) = as_pair(inner)?;
            let (h, val) = if is_term { (y, x) } else { (x, y) };
            let mut c = tgt.body().coords(p);
            c[last] = b;
            let f = arrow_of(&cat, h).map_err(fin)?;
            tgt.body().act_elem(last, f, tgt.body().point(&c), val).cloned().ok_or_else(|| bad("an element", val))
        })?)
    }
}
