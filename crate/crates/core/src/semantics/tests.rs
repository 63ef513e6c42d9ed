use super::*;
use crate::fincat::validate_functor;
use crate::parser::{parse, parse_expr, Declaration};
use crate::profunctor::{nat_eq, validate_nat};
use crate::syntax::{Expr, Name, Sort, TypeExpr};
use crate::typing::{Context, Hyp, Judgment, Polarity};

fn mixed() -> Semantics {
    Semantics::new(
        BaseAssignment::default()
            .with("A", FinCat::walking_arrow())
            .with("B", FinCat::discrete(2))
            .with("C", FinCat::z2()),
    )
}

fn bases() -> Vec<Semantics> {
    vec![
        Semantics::default(),
        Semantics::new(BaseAssignment::uniform(FinCat::discrete(2))),
        mixed(),
    ]
}

const REDUCTIONS: &str = "
red bmu [x:+A, k:-A] : # = beta_mu(k; a. <x | a : A>)
red bmut [x:+A, k:-A] : # = beta_mu~(x; y. <y | k : A>)
red bfst [x:+A, y:+B, k:-A] : # = beta_fst(x, y, k)
red bsnd [x:+A, y:+B, k:-B] : # = beta_snd(x, y, k)
red binl [x:+A, j:-A, k:-B] : # = beta_inl(j, k, x)
red binr [y:+B, j:-A, k:-B] : # = beta_inr(j, k, y)
red bnot [x:+A, k:-A] : # = beta_not(x, k)
red pairs [x:+A, y:+B, k:-A /\\ B] : # = beta_mu(k; a. <(x, mu b. <y | b : B>) | a : A /\\ B>)
red projs [x:+A, y:+B, k:-A] : # = beta_mu(k; a. <(x, y) | fst a : A /\\ B>)
red cases [x:+A, k:-A, j:-B] : # = beta_mu(k; a. <inl x | case(a, j) : A \\/ B>)
red negs [x:+A, k:-A] : # = beta_mu(k; a. <not+ a | not- x : ~A>)
red units [x:+Top, k:-Top] : # = beta_mu~(x; z. <() | mu~ w. <z | k : Top> : Top>)
red inner [x:+A, k:-A] : # = cong_cut(refl(x), cong_mu~(y. beta_mu(k; a. <y | a : A>)) : A)
";

#[test]
fn every_cell_is_natural_between_its_endpoints() {
    let file = parse(REDUCTIONS).unwrap();
    for sem in bases() {
        for d in &file.declarations {
            let Declaration::ReductionDecl { name, context, judgment, reduction } = d else { continue };
            let c = sem.reduction(context, reduction, Some(judgment)).unwrap_or_else(|e| panic!("{name}: {e}"));
            validate_functor(c.source.body()).unwrap();
            validate_functor(c.target.body()).unwrap();
            validate_nat(&c.cell).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert!(c.endpoints_match(), "{name}");
        }
    }
}

#[test]
fn variables_are_representable() {
    let sem = mixed();
    let ctx = Context::new(vec![Hyp::new("x", Polarity::Plus, TypeExpr::base("A"))]).unwrap();
    let p = sem.interp(&ctx, &parse_expr("x", Sort::Term, &["x"]).unwrap(), &Judgment::TermAt(TypeExpr::base("A"))).unwrap();
    // walking arrow: hom(r, x) has 1 + 1 + 0 + 1 elements over the four points
    let sizes: Vec<usize> = (0..p.n_points()).map(|i| p.value(i).len()).collect();
    assert_eq!(sizes.iter().sum::<usize>(), 3);
    validate_functor(p.body()).unwrap();
}

#[test]
fn ill_typed_input_is_refused() {
    let sem = Semantics::default();
    let e = parse_expr("()", Sort::Term, &[]).unwrap();
    assert!(matches!(sem.interp(&Context::empty(), &e, &Judgment::CoTermAt(TypeExpr::Top)), Err(SemError::Type(_))));
}

fn witness(sem: &Semantics) -> (ReductionCell, ReductionCell) {
    let file = parse(
        "red l [z:+C, k:-C] : # = beta_mu(mu~ x. <z | k : C>; a. <z | k : C> : Top)
         red r [z:+C, k:-C] : # = beta_mu~(mu a. <z | k : C>; x. <z | k : C> : Top)",
    )
    .unwrap();
    let cells: Vec<ReductionCell> = file
        .declarations
        .iter()
        .map(|d| {
            let Declaration::ReductionDecl { context, judgment, reduction, .. } = d else { unreachable!() };
            sem.reduction(context, reduction, Some(judgment)).unwrap()
        })
        .collect();
    (cells[0].clone(), cells[1].clone())
}

#[test]
fn critical_pair_is_separated_over_a_group() {
    let (l, r) = witness(&mixed());
    assert_eq!(l.source, r.source);
    assert_eq!(l.target, r.target);
    assert!(!nat_eq(&l.cell, &r.cell));
}

#[test]
fn critical_pair_collapses_over_the_point() {
    let (l, r) = witness(&Semantics::default());
    assert!(nat_eq(&l.cell, &r.cell));
}

fn ctx(hyps: &[(&str, Polarity, &str)]) -> Context {
    Context::new(hyps.iter().map(|(n, p, t)| Hyp::new(n, *p, crate::parser::parse_type(t).unwrap())).collect()).unwrap()
}

fn delayed<'a>(sem: &'a Semantics, gamma: &Context, var: &str, ty: &str, arg: &str) -> Delayed<'a> {
    let names: Vec<String> = gamma.names().iter().map(|n| n.to_string()).collect();
    let scope: Vec<&str> = names.iter().map(String::as_str).collect();
    let ty = crate::parser::parse_type(ty).unwrap();
    let head = gamma.lookup(&Name::new(arg.trim())).map(|h| h.polarity);
    let arg = match head {
        Some(Polarity::Minus) => match parse_expr(arg, Sort::CoTerm, &scope).unwrap() {
            Expr::CoTerm(k) => Arg::CoTerm(k),
            _ => unreachable!(),
        },
        _ => match parse_expr(arg, Sort::Term, &scope).unwrap() {
            Expr::Term(m) => Arg::Term(m),
            _ => unreachable!(),
        },
    };
    Delayed::new(sem, gamma.clone(), Name::new(var), ty, arg)
}

fn parse_in(gamma: &Context, extra: &str, src: &str, sort: Sort) -> Expr {
    let mut names: Vec<String> = gamma.names().iter().map(|n| n.to_string()).collect();
    names.push(extra.into());
    let scope: Vec<&str> = names.iter().map(String::as_str).collect();
    parse_expr(src, sort, &scope).unwrap()
}

#[test]
fn delayed_redex_matches_the_composite_and_theta_is_natural() {
    let sem = mixed();
    let gamma = ctx(&[("x", Polarity::Plus, "A"), ("y", Polarity::Plus, "B"), ("k", Polarity::Minus, "A")]);
    let d = delayed(&sem, &gamma, "a", "A", "k");
    let cases = [
        ("a", Sort::CoTerm, "-A"),
        ("x", Sort::Term, "+A"),
        ("mu b. <x | a : A>", Sort::Term, "+A"),
        ("(x, y)", Sort::Term, "+A /\\ B"),
        ("inl x", Sort::Term, "+A \\/ B"),
        ("fst a", Sort::CoTerm, "-A /\\ B"),
        ("case(a, mu~ w. <x | a : A>)", Sort::CoTerm, "-A \\/ B"),
        ("not+ a", Sort::Term, "+~A"),
        ("not- x", Sort::CoTerm, "-~A"),
    ];
    for (src, sort, j) in cases {
        let v = parse_in(&gamma, "a", src, sort);
        let j = judgment(j);
        let (iota, theta) = d.parts(&v, &j).unwrap_or_else(|e| panic!("{src}: {e}"));
        validate_nat(&iota).unwrap();
        assert!(iota.is_iso(), "{src}");
        validate_nat(&theta).unwrap_or_else(|e| panic!("{src}: {e}"));
        if src == "a" {
            assert!(theta.is_iso());
        }
    }
}

fn judgment(s: &str) -> Judgment {
    let t = crate::parser::parse_type(&s[1..]).unwrap();
    if s.starts_with('+') {
        Judgment::TermAt(t)
    } else {
        Judgment::CoTermAt(t)
    }
}

#[test]
fn generalized_beta_agrees_with_the_statement_case() {
    let sem = mixed();
    let gamma = ctx(&[("x", Polarity::Plus, "A"), ("k", Polarity::Minus, "A")]);
    let d = delayed(&sem, &gamma, "a", "A", "k");
    for (src, sort, j) in [("mu b. <x | a : A>", Sort::Term, "+A"), ("a", Sort::CoTerm, "-A"), ("inr x", Sort::Term, "+B \\/ A")] {
        let v = parse_in(&gamma, "a", src, sort);
        let r = d.coincidence(&v, &judgment(j)).unwrap();
        assert!(r.equal, "{src}");
    }
    let e = delayed(&sem, &gamma, "z", "A", "x");
    let v = parse_in(&gamma, "z", "mu~ w. <z | k : A>", Sort::CoTerm);
    assert!(e.coincidence(&v, &judgment("-A")).unwrap().equal);
}
