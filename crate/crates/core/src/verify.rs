//! Property checks run over declarations: functoriality, naturality,
//! endpoint agreement, co-Yoneda reduction, the coend oracle and the
//! agreement of the two constructions of structural beta.

use serde::Serialize;

use crate::fincat::{validate_functor, FinError, Variance};
use crate::models::{Mode, Model, ModelError};
use crate::oracle::{composite_partition, engine_partition};
use crate::profunctor::{compose_over, hom, permute, relabel, validate_nat, weaken, Coord, NatTrans, Profunctor};
use crate::semantics::{Arg, Delayed, Semantics};
use crate::syntax::{CoTermExpr, Expr, Name, ReductionExpr, StatementExpr, TermExpr};
use crate::typing::{open_stmt, Checker, Context, Judgment, Polarity};

/// The canonical map from `p` composed with the hom profunctor of
/// coordinate `c` back onto `p`: `[x, h]` goes to the action of `h` on `x`.
/// The composite carries `c` last, so the map lands in `p` with `c` moved
/// to the end.
pub fn coyoneda(p: &Profunctor, c: &Coord) -> Result<NatTrans, FinError> {
    let s = p.slot_of(c).ok_or_else(|| FinError::Interface(format!("no coordinate {c:?}")))?;
    let slot = p.slot(s).clone();
    let fresh = Coord::Hyp(Name::new("%yoneda"));
    let n = p.coords().len();
    let widened = weaken(p, fresh.clone(), slot.clone(), n)?;
    let mut hslots = widened.slots().to_vec();
    hslots[s].variance = slot.variance.flip();
    let coords = widened.coords().to_vec();
    let p_left = slot.variance == Variance::Contravariant;
    let composite = if p_left {
        compose_over(&widened, &hom(coords, hslots, s, n)?, c)?
    } else {
        compose_over(&hom(coords, hslots, n, s)?, &widened, c)?
    };
    let mut order: Vec<Coord> = p.coords().iter().filter(|x| *x != c).cloned().collect();
    order.push(c.clone());
    let target = relabel(&permute(p, &order)?, c, fresh)?;
    let cat = slot.cat.clone();
    NatTrans::from_classes(&composite, target, |r, a, l, q| {
        let (x, h, factor, at) = if p_left {
            (l, q, &composite.left, composite.left_point(r, a))
        } else {
            (q, l, &composite.right, composite.right_point(r, a))
        };
        let f = match h {
            crate::fincat::Elem::Arrow(name) => cat.arrow_index(name),
            _ => None,
        }
        .ok_or_else(|| FinError::NotInSet { elem: h.to_string(), point: vec![] })?;
        factor
            .body()
            .act_elem(s, f, at, x)
            .cloned()
            .ok_or_else(|| FinError::NotInSet { elem: x.to_string(), point: vec![] })
    })
}

/// True when the co-Yoneda map at `c` is a natural bijection.
pub fn coyoneda_holds(p: &Profunctor, c: &Coord) -> Result<bool, FinError> {
    let t = coyoneda(p, c)?;
    Ok(validate_nat(&t).is_ok() && t.is_iso())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Property {
    pub name: &'static str,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Property {
    fn from_result(name: &'static str, r: Result<(), String>) -> Property {
        match r {
            Ok(()) => Property { name, passed: true, detail: None },
            Err(d) => Property { name, passed: false, detail: Some(d) },
        }
    }
}

fn functor_prop(ps: &[&Profunctor]) -> Property {
    Property::from_result("functor", ps.iter().try_for_each(|p| validate_functor(p.body()).map_err(|e| e.to_string())))
}

fn coyoneda_prop(p: &Profunctor) -> Property {
    let r = p.coords().iter().try_for_each(|c| match coyoneda_holds(p, c) {
        Ok(true) => Ok(()),
        Ok(false) => Err(format!("not a bijection at {c:?}")),
        Err(e) => Err(format!("at {c:?}: {e}")),
    });
    Property::from_result("co-yoneda", r)
}

/// The outermost cut of `e`, opening at most one binder.
fn outer_cut(ctx: &Context, e: &Expr, j: &Judgment) -> Option<(Context, StatementExpr)> {
    match (e, j) {
        (Expr::Statement(s), _) => Some((ctx.clone(), s.clone())),
        (Expr::Term(TermExpr::Mu(b, s)), Judgment::TermAt(t)) => {
            let (b, s) = open_stmt(ctx, b, s);
            Some((ctx.extended(b, Polarity::Minus, t.clone()), s))
        }
        (Expr::CoTerm(CoTermExpr::MuTilde(b, s)), Judgment::CoTermAt(t)) => {
            let (b, s) = open_stmt(ctx, b, s);
            Some((ctx.extended(b, Polarity::Plus, t.clone()), s))
        }
        _ => None,
    }
}

fn oracle_prop(sem: &Semantics, ctx: &Context, s: &StatementExpr) -> Property {
    let r = sem.cut_composite(ctx, s).map_err(|e| e.to_string()).and_then(|c| {
        let oracle = composite_partition(&c.left, &c.right, &Coord::Result).ok_or("oracle refused the pair")?;
        if oracle == engine_partition(&c) {
            Ok(())
        } else {
            Err("class partitions differ".to_string())
        }
    });
    Property::from_result("oracle", r)
}

/// Properties of a checked term, co-term or statement.
pub fn verify_expr(model: &Model, ctx: &Context, e: &Expr, j: &Judgment) -> Result<Vec<Property>, ModelError> {
    let p = model.interp(ctx, e, j)?;
    let mut out = vec![functor_prop(&[&p]), coyoneda_prop(&p)];
    if let Some((inner, s)) = outer_cut(ctx, e, j) {
        out.push(oracle_prop(model.semantics(), &inner, &s));
    }
    Ok(out)
}

/// Properties of a checked reduction.
pub fn verify_reduction(
    model: &Model,
    ctx: &Context,
    r: &ReductionExpr,
    j: &Judgment,
) -> Result<Vec<Property>, ModelError> {
    let c = model.reduction(ctx, r, Some(j))?;
    let mut out = vec![
        functor_prop(&[&c.source, &c.target]),
        Property::from_result("naturality", validate_nat(&c.cell).map_err(|e| e.to_string())),
        Property::from_result(
            "endpoints",
            if c.endpoints_match() { Ok(()) } else { Err("cell endpoints differ from the interpretations".into()) },
        ),
    ];
    if let Some((inner, s)) = outer_cut(ctx, &c.typing.source, j) {
        out.push(oracle_prop(model.semantics(), &inner, &s));
    }
    if model.mode() != Mode::Rel {
        if let Some(p) = coincidence_prop(model.semantics(), ctx, r)? {
            out.push(p);
        }
    }
    Ok(out)
}

/// For a structural beta step, compares both constructions of the cell on
/// each side of the body's cut.
fn coincidence_prop(sem: &Semantics, ctx: &Context, r: &ReductionExpr) -> Result<Option<Property>, ModelError> {
    let (binder, body, arg) = match r {
        ReductionExpr::BetaMu { coterm, binder, body, .. } => (binder, body, Arg::CoTerm(coterm.clone())),
        ReductionExpr::BetaMuTilde { term, binder, body, .. } => (binder, body, Arg::Term(term.clone())),
        _ => return Ok(None),
    };
    let typing = Checker::default().reduction(ctx, r, Some(&Judgment::Absurd)).map_err(crate::semantics::SemError::from)?;
    let Expr::Statement(src) = &typing.source else { return Ok(None) };
    let (var, body) = open_stmt(ctx, binder, body);
    let d = Delayed::new(sem, ctx.clone(), var, src.cut_type.clone(), arg);
    let b = body.cut_type.clone();
    let sides = [
        (Expr::Term(body.term.clone()), Judgment::TermAt(b.clone())),
        (Expr::CoTerm(body.coterm.clone()), Judgment::CoTermAt(b)),
    ];
    let mut failures = Vec::new();
    for (v, j) in &sides {
        if !d.coincidence(v, j)?.equal {
            failures.push(crate::parser::pretty_expr(v));
        }
    }
    Ok(Some(Property::from_result(
        "coincidence",
        if failures.is_empty() { Ok(()) } else { Err(format!("cells differ for {}", failures.join(", "))) },
    )))
}

/// One generalized-beta instance: a pending substitution for `var` and a
/// body `v` of the given judgment, over the hypotheses of
/// `[x:+A, y:+B, k:-A, j:-B]` that either mentions.
#[derive(Clone, Debug)]
pub struct GbetaInstance {
    /// The last rule of `v`, or `bound-var`, `other-var`.
    pub class: &'static str,
    pub var: &'static str,
    pub arg: &'static str,
    pub v: &'static str,
    pub judgment: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct GbetaOutcome {
    pub class: &'static str,
    pub v: String,
    pub natural: bool,
    pub iota_iso: bool,
    /// Whether theta is a bijection; only asked of the bound variable.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bijective: Option<bool>,
    /// Agreement with the statement case; terms and co-terms only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coincides: Option<bool>,
}

impl GbetaOutcome {
    pub fn ok(&self) -> bool {
        self.natural && self.iota_iso && self.bijective != Some(false) && self.coincides != Some(false)
    }
}

const GBETA_COVAR: [(&str, &str, &str); 15] = [
    ("cut", "<x | a : A>", "#"),
    ("bound-var", "a", "-A"),
    ("other-var", "x", "+A"),
    ("mu", "mu b. <x | a : A>", "+A"),
    ("mu~", "mu~ w. <w | a : A>", "-A"),
    ("+Top", "()", "+Top"),
    ("-Bot", "[]", "-Bot"),
    ("+and", "(mu b. <x | a : A>, y)", "+A /\\ B"),
    ("-and1", "fst a", "-A /\\ B"),
    ("-and2", "snd a", "-B /\\ A"),
    ("-or", "case(a, j)", "-A \\/ B"),
    ("+or1", "inl (mu b. <x | a : A>)", "+A \\/ B"),
    ("+or2", "inr (mu b. <x | a : A>)", "+B \\/ A"),
    ("+not", "not+ a", "+~A"),
    ("-not", "not- (mu b. <x | a : A>)", "-~A"),
];

const GBETA_VAR: [(&str, &str, &str); 15] = [
    ("cut", "<z | k : A>", "#"),
    ("bound-var", "z", "+A"),
    ("other-var", "k", "-A"),
    ("mu", "mu b. <z | b : A>", "+A"),
    ("mu~", "mu~ w. <z | k : A>", "-A"),
    ("+Top", "()", "+Top"),
    ("-Bot", "[]", "-Bot"),
    ("+and", "(z, y)", "+A /\\ B"),
    ("-and1", "fst (mu~ w. <z | k : A>)", "-A /\\ B"),
    ("-and2", "snd (mu~ w. <z | k : A>)", "-B /\\ A"),
    ("-or", "case(mu~ w. <z | k : A>, j)", "-A \\/ B"),
    ("+or1", "inl z", "+A \\/ B"),
    ("+or2", "inr z", "+B \\/ A"),
    ("+not", "not+ (mu~ w. <z | k : A>)", "+~A"),
    ("-not", "not- z", "-~A"),
];

/// Every case class against two arguments for a covariable and two for a
/// variable.
pub fn gbeta_instances() -> Vec<GbetaInstance> {
    let mut out = Vec::new();
    for arg in ["k", "mu~ w. <w | k : A>"] {
        out.extend(GBETA_COVAR.iter().map(|&(class, v, judgment)| GbetaInstance { class, var: "a", arg, v, judgment }));
    }
    for arg in ["x", "mu b. <x | b : A>"] {
        out.extend(GBETA_VAR.iter().map(|&(class, v, judgment)| GbetaInstance { class, var: "z", arg, v, judgment }));
    }
    out
}

pub fn gbeta_context() -> Context {
    let a = crate::syntax::TypeExpr::base("A");
    let b = crate::syntax::TypeExpr::base("B");
    Context::new(vec![
        crate::typing::Hyp::new("x", Polarity::Plus, a.clone()),
        crate::typing::Hyp::new("y", Polarity::Plus, b.clone()),
        crate::typing::Hyp::new("k", Polarity::Minus, a),
        crate::typing::Hyp::new("j", Polarity::Minus, b),
    ])
    .expect("distinct names")
}

fn parse_judgment(s: &str) -> Judgment {
    let ty = |t: &str| crate::parser::parse_type(t).expect("instance type");
    match s.as_bytes()[0] {
        b'+' => Judgment::TermAt(ty(&s[1..])),
        b'-' => Judgment::CoTermAt(ty(&s[1..])),
        _ => Judgment::Absurd,
    }
}

/// Checks theta, iota and their composite for one instance; for terms and
/// co-terms also compares with the congruence construction.
pub fn check_gbeta(sem: &Semantics, inst: &GbetaInstance) -> Result<GbetaOutcome, crate::semantics::SemError> {
    use crate::parser::parse_expr;
    use crate::syntax::Sort;
    let gamma = gbeta_context();
    let parse_expr = |src: &str, sort, scope: &[&str]| {
        parse_expr(src, sort, scope).map_err(|e| crate::semantics::SemError::Mismatch(format!("{src}: {e}")))
    };
    let scope = ["x", "y", "k", "j"];
    let arg = if inst.var == "a" {
        match parse_expr(inst.arg, Sort::CoTerm, &scope)? {
            Expr::CoTerm(k) => Arg::CoTerm(k),
            _ => unreachable!("parsed as a co-term"),
        }
    } else {
        match parse_expr(inst.arg, Sort::Term, &scope)? {
            Expr::Term(m) => Arg::Term(m),
            _ => unreachable!("parsed as a term"),
        }
    };
    let j = parse_judgment(inst.judgment);
    let inner = ["x", "y", "k", "j", inst.var];
    let v = parse_expr(inst.v, j.sort(), &inner)?;
    let mut used = crate::syntax::free_names(&v);
    used.extend(crate::syntax::free_names(&arg.expr()));
    let gamma = Context::new(gamma.hyps().iter().filter(|h| used.contains(&h.name)).cloned().collect())
        .expect("subset of distinct names");
    let d = Delayed::new(sem, gamma, Name::new(inst.var), crate::syntax::TypeExpr::base("A"), arg);
    let (iota, theta) = d.parts(&v, &j)?;
    let natural = validate_nat(&theta).is_ok() && validate_nat(&iota).is_ok() && validate_nat(&iota.vcomp(&theta)?).is_ok();
    let bijective = (inst.class == "bound-var").then(|| theta.is_iso());
    let coincides = if j == Judgment::Absurd { None } else { Some(d.coincidence(&v, &j)?.equal) };
    Ok(GbetaOutcome { class: inst.class, v: inst.v.to_string(), natural, iota_iso: iota.is_iso(), bijective, coincides })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{random_presheaf, rng, small_categories};
    use crate::fincat::file::BaseAssignment;
    use crate::parser::{parse, Declaration};
    use std::sync::Arc;

    #[test]
    fn coyoneda_on_presheaves() {
        let mut r = rng(5);
        for (_, c) in small_categories().into_iter().take(8) {
            let c = Arc::new(c);
            let f = random_presheaf(&c, &mut r);
            let p = Profunctor::new(vec![Coord::Result], f).unwrap();
            assert!(coyoneda_holds(&p, &Coord::Result).unwrap());
        }
    }

    #[test]
    fn gbeta_instances_hold_over_mixed_bases() {
        let sem = Semantics::new(crate::models::demo_bases());
        for inst in gbeta_instances() {
            let o = check_gbeta(&sem, &inst).unwrap_or_else(|e| panic!("{inst:?}: {e}"));
            assert!(o.ok(), "{o:?}");
        }
    }

    #[test]
    fn declarations_pass_every_property() {
        let file = parse(
            "term t [x:+A, k:-A] : # = <x | k : A>
             term u [x:+A] : +A = mu b. <x | b : A>
             red r [x:+A, k:-A] : # = beta_mu(k; a. <x | a : A>)",
        )
        .unwrap();
        let model = Model::new(BaseAssignment::uniform(crate::fincat::FinCat::walking_arrow()), Mode::Prof).unwrap();
        for d in &file.declarations {
            let props = match d {
                Declaration::TermDecl { context, judgment, expr, .. } => verify_expr(&model, context, expr, judgment),
                Declaration::ReductionDecl { context, judgment, reduction, .. } => {
                    verify_reduction(&model, context, reduction, judgment)
                }
                _ => continue,
            }
            .unwrap();
            assert!(props.iter().all(|p| p.passed), "{props:?}");
        }
    }
}
