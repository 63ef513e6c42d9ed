use std::fmt::{self, Write};

use super::{Declaration, SourceFile};
use crate::syntax::{CoTermExpr, Expr, ReductionExpr, StatementExpr, TermExpr, TypeExpr};
use crate::typing::{Context, Polarity};

fn prec(t: &TypeExpr) -> u8 {
    match t {
        TypeExpr::Or(..) => 1,
        TypeExpr::And(..) => 2,
        TypeExpr::Not(_) => 3,
        _ => 4,
    }
}

fn write_type(out: &mut String, t: &TypeExpr, min: u8) {
    let paren = prec(t) < min;
    if paren {
        out.push('(');
    }
    match t {
        TypeExpr::Top => out.push_str("Top"),
        TypeExpr::Bot => out.push_str("Bot"),
        TypeExpr::Base(n) => out.push_str(n.as_str()),
        TypeExpr::Not(a) => {
            out.push('~');
            write_type(out, a, 3);
        }
        TypeExpr::And(a, b) => {
            write_type(out, a, 2);
            out.push_str(" /\\ ");
            write_type(out, b, 3);
        }
        TypeExpr::Or(a, b) => {
            write_type(out, a, 1);
            out.push_str(" \\/ ");
            write_type(out, b, 2);
        }
    }
    if paren {
        out.push(')');
    }
}

pub fn pretty_type(t: &TypeExpr) -> String {
    let mut s = String::new();
    write_type(&mut s, t, 0);
    s
}

/// Like [`pretty_type`], parenthesized unless atomic or negated.
pub fn pretty_type_atomic(t: &TypeExpr) -> String {
    let mut s = String::new();
    write_type(&mut s, t, 3);
    s
}

impl fmt::Display for TypeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&pretty_type(self))
    }
}

fn write_term(out: &mut String, t: &TermExpr) {
    match t {
        TermExpr::Var(x) => out.push_str(x.as_str()),
        TermExpr::Mu(a, s) => {
            let _ = write!(out, "mu {a}. ");
            write_stmt(out, s);
        }
        TermExpr::Unit => out.push_str("()"),
        TermExpr::Pair(m, n) => {
            out.push('(');
            write_term(out, m);
            out.push_str(", ");
            write_term(out, n);
            out.push(')');
        }
        TermExpr::Inl(m) => {
            out.push_str("inl ");
            write_term(out, m);
        }
        TermExpr::Inr(m) => {
            out.push_str("inr ");
            write_term(out, m);
        }
        TermExpr::NotIntro(k) => {
            out.push_str("not+ ");
            write_coterm(out, k);
        }
    }
}

fn write_coterm(out: &mut String, k: &CoTermExpr) {
    match k {
        CoTermExpr::CoVar(a) => out.push_str(a.as_str()),
        CoTermExpr::MuTilde(x, s) => {
            let _ = write!(out, "mu~ {x}. ");
            write_stmt(out, s);
        }
        CoTermExpr::CoUnit => out.push_str("[]"),
        CoTermExpr::Fst(k) => {
            out.push_str("fst ");
            write_coterm(out, k);
        }
        CoTermExpr::Snd(k) => {
            out.push_str("snd ");
            write_coterm(out, k);
        }
        CoTermExpr::Case(j, k) => {
            out.push_str("case(");
            write_coterm(out, j);
            out.push_str(", ");
            write_coterm(out, k);
            out.push(')');
        }
        CoTermExpr::NotElim(m) => {
            out.push_str("not- ");
            write_term(out, m);
        }
    }
}

fn write_stmt(out: &mut String, s: &StatementExpr) {
    out.push('<');
    write_term(out, &s.term);
    out.push_str(" | ");
    write_coterm(out, &s.coterm);
    out.push_str(" : ");
    write_type(out, &s.cut_type, 0);
    out.push('>');
}

fn write_expr(out: &mut String, e: &Expr) {
    match e {
        Expr::Term(t) => write_term(out, t),
        Expr::CoTerm(k) => write_coterm(out, k),
        Expr::Statement(s) => write_stmt(out, s),
    }
}

pub fn pretty_expr(e: &Expr) -> String {
    let mut s = String::new();
    write_expr(&mut s, e);
    s
}

fn write_ann(out: &mut String, ann: &Option<TypeExpr>) {
    if let Some(t) = ann {
        out.push_str(" : ");
        write_type(out, t, 0);
    }
}

fn write_red(out: &mut String, r: &ReductionExpr) {
    use ReductionExpr as R;
    let call = |out: &mut String, name: &str, args: &[&ReductionExpr]| {
        out.push_str(name);
        out.push('(');
        for (i, a) in args.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            write_red(out, a);
        }
        out.push(')');
    };
    match r {
        R::Refl(e) => {
            out.push_str("refl(");
            write_expr(out, e);
            out.push(')');
        }
        R::Trans(p, q) => call(out, "trans", &[p, q]),
        R::BetaMu { coterm, binder, body, ann } => {
            out.push_str("beta_mu(");
            write_coterm(out, coterm);
            let _ = write!(out, "; {binder}. ");
            write_stmt(out, body);
            write_ann(out, ann);
            out.push(')');
        }
        R::BetaMuTilde { term, binder, body, ann } => {
            out.push_str("beta_mu~(");
            write_term(out, term);
            let _ = write!(out, "; {binder}. ");
            write_stmt(out, body);
            write_ann(out, ann);
            out.push(')');
        }
        R::BetaFst { first, second, coterm, ann } | R::BetaSnd { first, second, coterm, ann } => {
            out.push_str(if matches!(r, R::BetaFst { .. }) { "beta_fst(" } else { "beta_snd(" });
            write_term(out, first);
            out.push_str(", ");
            write_term(out, second);
            out.push_str(", ");
            write_coterm(out, coterm);
            write_ann(out, ann);
            out.push(')');
        }
        R::BetaInl { left, right, term, ann } | R::BetaInr { left, right, term, ann } => {
            out.push_str(if matches!(r, R::BetaInl { .. }) { "beta_inl(" } else { "beta_inr(" });
            write_coterm(out, left);
            out.push_str(", ");
            write_coterm(out, right);
            out.push_str(", ");
            write_term(out, term);
            write_ann(out, ann);
            out.push(')');
        }
        R::BetaNot { term, coterm, ann } => {
            out.push_str("beta_not(");
            write_term(out, term);
            out.push_str(", ");
            write_coterm(out, coterm);
            write_ann(out, ann);
            out.push(')');
        }
        R::CongMu(b, p) | R::CongMuTilde(b, p) => {
            out.push_str(if matches!(r, R::CongMu(..)) { "cong_mu(" } else { "cong_mu~(" });
            let _ = write!(out, "{b}. ");
            write_red(out, p);
            out.push(')');
        }
        R::CongCut(p, q, t) => {
            out.push_str("cong_cut(");
            write_red(out, p);
            out.push_str(", ");
            write_red(out, q);
            out.push_str(" : ");
            write_type(out, t, 0);
            out.push(')');
        }
        R::CongPair(p, q) => call(out, "cong_pair", &[p, q]),
        R::CongCase(p, q) => call(out, "cong_case", &[p, q]),
        R::CongInl(p) => call(out, "cong_inl", &[p]),
        R::CongInr(p) => call(out, "cong_inr", &[p]),
        R::CongFst(p) => call(out, "cong_fst", &[p]),
        R::CongSnd(p) => call(out, "cong_snd", &[p]),
        R::CongNotIntro(p) => call(out, "cong_not+", &[p]),
        R::CongNotElim(p) => call(out, "cong_not-", &[p]),
    }
}

pub fn pretty_reduction(r: &ReductionExpr) -> String {
    let mut s = String::new();
    write_red(&mut s, r);
    s
}

fn write_context(out: &mut String, ctx: &Context) {
    out.push('[');
    for (i, h) in ctx.hyps().iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        let sign = match h.polarity {
            Polarity::Plus => '+',
            Polarity::Minus => '-',
        };
        let _ = write!(out, "{}:{sign}", h.name);
        write_type(out, &h.ty, 0);
    }
    out.push(']');
}

pub fn pretty_declaration(d: &Declaration) -> String {
    let mut out = String::new();
    match d {
        Declaration::TypeDef { name, ty } => {
            let _ = write!(out, "type {name} = ");
            write_type(&mut out, ty, 0);
        }
        Declaration::TermDecl { name, context, judgment, expr } => {
            let _ = write!(out, "term {name} ");
            write_context(&mut out, context);
            let _ = write!(out, " : {judgment} = ");
            write_expr(&mut out, expr);
        }
        Declaration::ReductionDecl { name, context, judgment, reduction } => {
            let _ = write!(out, "red {name} ");
            write_context(&mut out, context);
            let _ = write!(out, " : {judgment} = ");
            write_red(&mut out, reduction);
        }
    }
    out
}

pub fn pretty_file(f: &SourceFile) -> String {
    let mut out = String::new();
    for d in &f.declarations {
        out.push_str(&pretty_declaration(d));
        out.push('\n');
    }
    out
}
