use std::collections::{BTreeMap, BTreeSet};

use super::lexer::{Tok, Token};
use super::{Declaration, ParseError, ParseErrorKind, Pos, SourceFile, MAX_DEPTH};
use crate::syntax::{CoTermExpr, Expr, Name, ReductionExpr, Sort, StatementExpr, TermExpr, TypeExpr};
use crate::typing::{Context, Hyp, Judgment, Polarity};

type PResult<T> = Result<T, ParseError>;

pub struct Parser {
    tokens: Vec<Token>,
    at: usize,
    scope: Vec<Name>,
    depth: usize,
    typedefs: BTreeMap<Name, TypeExpr>,
    bases_used: BTreeSet<Name>,
}

impl Parser {
    pub fn new(tokens: Vec<Token>) -> Self {
        Parser { tokens, at: 0, scope: Vec::new(), depth: 0, typedefs: BTreeMap::new(), bases_used: BTreeSet::new() }
    }

    fn peek(&self) -> &Tok {
        &self.tokens[self.at].tok
    }

    fn pos(&self) -> Pos {
        self.tokens[self.at].pos
    }

    fn bump(&mut self) -> Tok {
        let t = self.tokens[self.at].tok.clone();
        if self.at + 1 < self.tokens.len() {
            self.at += 1;
        }
        t
    }

    fn error_at(&self, pos: Pos, kind: ParseErrorKind, message: String, expected: &[&str]) -> ParseError {
        ParseError {
            line: pos.line,
            column: pos.column,
            message,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            kind,
        }
    }

    fn unexpected(&self, expected: &[&str]) -> ParseError {
        self.error_at(self.pos(), ParseErrorKind::Syntax, format!("unexpected {}", self.peek().describe()), expected)
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(t) if *t == s)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: &'static str) -> PResult<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            let quoted = format!("`{s}`");
            Err(self.unexpected(&[quoted.as_str()]))
        }
    }

    fn name(&mut self) -> PResult<(Name, Pos)> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok((Name::new(s), pos))
            }
            Tok::Keyword(k) => Err(self.error_at(
                pos,
                ParseErrorKind::ReservedWord,
                format!("`{k}` is a reserved word and cannot be used as a name"),
                &["a name"],
            )),
            _ => Err(self.unexpected(&["a name"])),
        }
    }

    fn enter(&mut self) -> PResult<()> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(self.error_at(
                self.pos(),
                ParseErrorKind::NestingDepth,
                format!("expression nested deeper than {MAX_DEPTH} levels"),
                &[],
            ));
        }
        Ok(())
    }

    fn leave(&mut self) {
        self.depth -= 1;
    }

    fn nested<T>(&mut self, f: impl FnOnce(&mut Self) -> PResult<T>) -> PResult<T> {
        self.enter()?;
        let r = f(self);
        self.leave();
        r
    }

    pub fn with_scope<T>(&mut self, names: &[&str], f: impl FnOnce(&mut Self) -> PResult<T>) -> PResult<T> {
        let n = self.scope.len();
        self.scope.extend(names.iter().map(Name::new));
        let r = f(self);
        self.scope.truncate(n);
        r
    }

    fn bound<T>(&mut self, name: Name, f: impl FnOnce(&mut Self) -> PResult<T>) -> PResult<T> {
        self.scope.push(name);
        let r = f(self);
        self.scope.pop();
        r
    }

    fn use_name(&mut self) -> PResult<Name> {
        let (n, pos) = self.name()?;
        if !self.scope.contains(&n) {
            return Err(self.error_at(pos, ParseErrorKind::Scope, format!("`{n}` is not in scope"), &[]));
        }
        Ok(n)
    }

    fn expect_eof(&self) -> PResult<()> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.unexpected(&["end of input"]))
        }
    }

    pub fn file(&mut self) -> PResult<SourceFile> {
        let mut file = SourceFile::default();
        let mut names = BTreeSet::new();
        while *self.peek() != Tok::Eof {
            let pos = self.pos();
            let decl = self.declaration()?;
            if !names.insert(decl.name().clone()) {
                return Err(self.error_at(
                    pos,
                    ParseErrorKind::DuplicateDeclaration,
                    format!("`{}` is declared twice", decl.name()),
                    &[],
                ));
            }
            file.declarations.push(decl);
            file.positions.push(pos);
        }
        Ok(file)
    }

    fn declaration(&mut self) -> PResult<Declaration> {
        match self.peek() {
            Tok::Keyword("type") => {
                self.bump();
                let (name, pos) = self.name()?;
                self.expect_sym("=")?;
                let ty = self.ty()?;
                if self.bases_used.contains(&name) || self.typedefs.contains_key(&name) {
                    return Err(self.error_at(
                        pos,
                        ParseErrorKind::TypeShadowing,
                        format!("type name `{name}` is already in use"),
                        &[],
                    ));
                }
                self.typedefs.insert(name.clone(), ty.clone());
                Ok(Declaration::TypeDef { name, ty })
            }
            Tok::Keyword("term") => {
                self.bump();
                let (name, _) = self.name()?;
                let context = self.context()?;
                self.expect_sym(":")?;
                let judgment = self.judgment()?;
                self.expect_sym("=")?;
                let names: Vec<String> = context.hyps().iter().map(|h| h.name.to_string()).collect();
                let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
                let expr = self.with_scope(&refs, |p| p.expr(judgment.sort()))?;
                Ok(Declaration::TermDecl { name, context, judgment, expr })
            }
            Tok::Keyword("red") => {
                self.bump();
                let (name, _) = self.name()?;
                let context = self.context()?;
                self.expect_sym(":")?;
                let judgment = self.judgment()?;
                self.expect_sym("=")?;
                let names: Vec<String> = context.hyps().iter().map(|h| h.name.to_string()).collect();
                let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
                let reduction = self.with_scope(&refs, |p| p.reduction(judgment.sort()))?;
                Ok(Declaration::ReductionDecl { name, context, judgment, reduction })
            }
            _ => Err(self.unexpected(&["`type`", "`term`", "`red`"])),
        }
    }

    fn context(&mut self) -> PResult<Context> {
        self.expect_sym("[")?;
        let mut hyps: Vec<Hyp> = Vec::new();
        if !self.eat_sym("]") {
            loop {
                let (name, pos) = self.name()?;
                self.expect_sym(":")?;
                let polarity = if self.eat_sym("+") {
                    Polarity::Plus
                } else if self.eat_sym("-") {
                    Polarity::Minus
                } else {
                    return Err(self.unexpected(&["`+`", "`-`"]));
                };
                let ty = self.ty()?;
                if hyps.iter().any(|h| h.name == name) {
                    return Err(self.error_at(
                        pos,
                        ParseErrorKind::DuplicateHypothesis,
                        format!("hypothesis `{name}` is declared twice"),
                        &[],
                    ));
                }
                hyps.push(Hyp { name, polarity, ty });
                if self.eat_sym("]") {
                    break;
                }
                self.expect_sym(",")?;
            }
        }
        Ok(Context::new(hyps).expect("duplicates rejected above"))
    }

    fn judgment(&mut self) -> PResult<Judgment> {
        if self.eat_sym("+") {
            Ok(Judgment::TermAt(self.ty()?))
        } else if self.eat_sym("-") {
            Ok(Judgment::CoTermAt(self.ty()?))
        } else if self.eat_sym("#") {
            Ok(Judgment::Absurd)
        } else {
            Err(self.unexpected(&["`+`", "`-`", "`#`"]))
        }
    }

    pub fn type_eof(&mut self) -> PResult<TypeExpr> {
        let t = self.ty()?;
        self.expect_eof()?;
        Ok(t)
    }

    fn ty(&mut self) -> PResult<TypeExpr> {
        self.nested(|p| {
            let mut t = p.ty_and()?;
            while p.eat_sym("\\/") {
                t = TypeExpr::or(t, p.ty_and()?);
            }
            Ok(t)
        })
    }

    fn ty_and(&mut self) -> PResult<TypeExpr> {
        let mut t = self.ty_unary()?;
        while self.eat_sym("/\\") {
            t = TypeExpr::and(t, self.ty_unary()?);
        }
        Ok(t)
    }

    fn ty_unary(&mut self) -> PResult<TypeExpr> {
        self.nested(|p| {
            if p.eat_sym("~") {
                return Ok(TypeExpr::not(p.ty_unary()?));
            }
            match p.peek().clone() {
                Tok::Keyword("Top") => {
                    p.bump();
                    Ok(TypeExpr::Top)
                }
                Tok::Keyword("Bot") => {
                    p.bump();
                    Ok(TypeExpr::Bot)
                }
                Tok::Sym("(") => {
                    p.bump();
                    let t = p.ty()?;
                    p.expect_sym(")")?;
                    Ok(t)
                }
                Tok::Ident(_) | Tok::Keyword(_) => {
                    let (n, _) = p.name()?;
                    match p.typedefs.get(&n) {
                        Some(t) => Ok(t.clone()),
                        None => {
                            p.bases_used.insert(n.clone());
                            Ok(TypeExpr::Base(n))
                        }
                    }
                }
                _ => Err(p.unexpected(&["a type"])),
            }
        })
    }

    pub fn expr_eof(&mut self, sort: Sort) -> PResult<Expr> {
        let e = self.expr(sort)?;
        self.expect_eof()?;
        Ok(e)
    }

    fn expr(&mut self, sort: Sort) -> PResult<Expr> {
        Ok(match sort {
            Sort::Term => Expr::Term(self.term()?),
            Sort::CoTerm => Expr::CoTerm(self.coterm()?),
            Sort::Statement => Expr::Statement(self.statement()?),
        })
    }

    fn statement(&mut self) -> PResult<StatementExpr> {
        self.nested(|p| {
            p.expect_sym("<")?;
            let term = p.term()?;
            p.expect_sym("|")?;
            let coterm = p.coterm()?;
            p.expect_sym(":")?;
            let cut_type = p.ty()?;
            p.expect_sym(">")?;
            Ok(StatementExpr { term, coterm, cut_type })
        })
    }

    fn binder_body(&mut self) -> PResult<(Name, StatementExpr)> {
        let (b, _) = self.name()?;
        self.expect_sym(".")?;
        let body = self.bound(b.clone(), |p| p.statement())?;
        Ok((b, body))
    }

    fn term(&mut self) -> PResult<TermExpr> {
        self.nested(|p| match p.peek().clone() {
            Tok::Ident(_) => Ok(TermExpr::Var(p.use_name()?)),
            Tok::Keyword("mu") => {
                p.bump();
                let (a, s) = p.binder_body()?;
                Ok(TermExpr::Mu(a, Box::new(s)))
            }
            Tok::Keyword("inl") => {
                p.bump();
                Ok(TermExpr::Inl(Box::new(p.term()?)))
            }
            Tok::Keyword("inr") => {
                p.bump();
                Ok(TermExpr::Inr(Box::new(p.term()?)))
            }
            Tok::Keyword("not+") => {
                p.bump();
                Ok(TermExpr::NotIntro(Box::new(p.coterm()?)))
            }
            Tok::Sym("(") => {
                p.bump();
                if p.eat_sym(")") {
                    return Ok(TermExpr::Unit);
                }
                let m = p.term()?;
                if p.eat_sym(")") {
                    return Ok(m);
                }
                p.expect_sym(",")?;
                let n = p.term()?;
                p.expect_sym(")")?;
                Ok(TermExpr::Pair(Box::new(m), Box::new(n)))
            }
            Tok::Keyword(k) if !matches!(k, "mu~" | "fst" | "snd" | "case" | "not-") => {
                Err(p.name().map(|_| ()).unwrap_err())
            }
            _ => Err(p.unexpected(&["a term"])),
        })
    }

    fn coterm(&mut self) -> PResult<CoTermExpr> {
        self.nested(|p| match p.peek().clone() {
            Tok::Ident(_) => Ok(CoTermExpr::CoVar(p.use_name()?)),
            Tok::Keyword("mu~") => {
                p.bump();
                let (x, s) = p.binder_body()?;
                Ok(CoTermExpr::MuTilde(x, Box::new(s)))
            }
            Tok::Keyword("fst") => {
                p.bump();
                Ok(CoTermExpr::Fst(Box::new(p.coterm()?)))
            }
            Tok::Keyword("snd") => {
                p.bump();
                Ok(CoTermExpr::Snd(Box::new(p.coterm()?)))
            }
            Tok::Keyword("case") => {
                p.bump();
                p.expect_sym("(")?;
                let j = p.coterm()?;
                p.expect_sym(",")?;
                let k = p.coterm()?;
                p.expect_sym(")")?;
                Ok(CoTermExpr::Case(Box::new(j), Box::new(k)))
            }
            Tok::Keyword("not-") => {
                p.bump();
                Ok(CoTermExpr::NotElim(Box::new(p.term()?)))
            }
            Tok::Sym("[") => {
                p.bump();
                p.expect_sym("]")?;
                Ok(CoTermExpr::CoUnit)
            }
            Tok::Sym("(") => {
                p.bump();
                let k = p.coterm()?;
                p.expect_sym(")")?;
                Ok(k)
            }
            Tok::Keyword(k) if !matches!(k, "mu" | "inl" | "inr" | "not+") => {
                Err(p.name().map(|_| ()).unwrap_err())
            }
            _ => Err(p.unexpected(&["a co-term"])),
        })
    }

    pub fn reduction_eof(&mut self, sort: Sort) -> PResult<ReductionExpr> {
        let r = self.reduction(sort)?;
        self.expect_eof()?;
        Ok(r)
    }

    fn annotation(&mut self) -> PResult<Option<TypeExpr>> {
        if self.eat_sym(":") {
            Ok(Some(self.ty()?))
        } else {
            Ok(None)
        }
    }

    fn reduction(&mut self, sort: Sort) -> PResult<ReductionExpr> {
        use ReductionExpr as R;
        self.nested(|p| {
            let Tok::Keyword(k) = p.peek().clone() else {
                return Err(p.unexpected(&["a reduction"]));
            };
            let unary = |p: &mut Self, s: Sort| -> PResult<Box<R>> {
                p.expect_sym("(")?;
                let r = p.reduction(s)?;
                p.expect_sym(")")?;
                Ok(Box::new(r))
            };
            let binary = |p: &mut Self, s: Sort, t: Sort| -> PResult<(Box<R>, Box<R>)> {
                p.expect_sym("(")?;
                let a = p.reduction(s)?;
                p.expect_sym(",")?;
                let b = p.reduction(t)?;
                p.expect_sym(")")?;
                Ok((Box::new(a), Box::new(b)))
            };
            let r = match k {
                "refl" => {
                    p.bump();
                    p.expect_sym("(")?;
                    let e = p.expr(sort)?;
                    p.expect_sym(")")?;
                    R::Refl(e)
                }
                "trans" => {
                    p.bump();
                    let (a, b) = binary(p, sort, sort)?;
                    R::Trans(a, b)
                }
                "beta_mu" | "beta_mu~" => {
                    p.bump();
                    p.expect_sym("(")?;
                    let arg = if k == "beta_mu" { p.expr(Sort::CoTerm)? } else { p.expr(Sort::Term)? };
                    p.expect_sym(";")?;
                    let (binder, body) = p.binder_body()?;
                    let ann = p.annotation()?;
                    p.expect_sym(")")?;
                    match arg {
                        Expr::CoTerm(coterm) => R::BetaMu { coterm, binder, body, ann },
                        Expr::Term(term) => R::BetaMuTilde { term, binder, body, ann },
                        Expr::Statement(_) => unreachable!(),
                    }
                }
                "beta_fst" | "beta_snd" => {
                    p.bump();
                    p.expect_sym("(")?;
                    let first = p.term()?;
                    p.expect_sym(",")?;
                    let second = p.term()?;
                    p.expect_sym(",")?;
                    let coterm = p.coterm()?;
                    let ann = p.annotation()?;
                    p.expect_sym(")")?;
                    if k == "beta_fst" {
                        R::BetaFst { first, second, coterm, ann }
                    } else {
                        R::BetaSnd { first, second, coterm, ann }
                    }
                }
                "beta_inl" | "beta_inr" => {
                    p.bump();
                    p.expect_sym("(")?;
                    let left = p.coterm()?;
                    p.expect_sym(",")?;
                    let right = p.coterm()?;
                    p.expect_sym(",")?;
                    let term = p.term()?;
                    let ann = p.annotation()?;
                    p.expect_sym(")")?;
                    if k == "beta_inl" {
                        R::BetaInl { left, right, term, ann }
                    } else {
                        R::BetaInr { left, right, term, ann }
                    }
                }
                "beta_not" => {
                    p.bump();
                    p.expect_sym("(")?;
                    let term = p.term()?;
                    p.expect_sym(",")?;
                    let coterm = p.coterm()?;
                    let ann = p.annotation()?;
                    p.expect_sym(")")?;
                    R::BetaNot { term, coterm, ann }
                }
                "cong_mu" | "cong_mu~" => {
                    p.bump();
                    p.expect_sym("(")?;
                    let (b, _) = p.name()?;
                    p.expect_sym(".")?;
                    let inner = p.bound(b.clone(), |p| p.reduction(Sort::Statement))?;
                    p.expect_sym(")")?;
                    if k == "cong_mu" {
                        R::CongMu(b, Box::new(inner))
                    } else {
                        R::CongMuTilde(b, Box::new(inner))
                    }
                }
                "cong_cut" => {
                    p.bump();
                    p.expect_sym("(")?;
                    let a = p.reduction(Sort::Term)?;
                    p.expect_sym(",")?;
                    let b = p.reduction(Sort::CoTerm)?;
                    p.expect_sym(":")?;
                    let t = p.ty()?;
                    p.expect_sym(")")?;
                    R::CongCut(Box::new(a), Box::new(b), t)
                }
                "cong_pair" => {
                    p.bump();
                    let (a, b) = binary(p, Sort::Term, Sort::Term)?;
                    R::CongPair(a, b)
                }
                "cong_case" => {
                    p.bump();
                    let (a, b) = binary(p, Sort::CoTerm, Sort::CoTerm)?;
                    R::CongCase(a, b)
                }
                "cong_inl" => {
                    p.bump();
                    R::CongInl(unary(p, Sort::Term)?)
                }
                "cong_inr" => {
                    p.bump();
                    R::CongInr(unary(p, Sort::Term)?)
                }
                "cong_fst" => {
                    p.bump();
                    R::CongFst(unary(p, Sort::CoTerm)?)
                }
                "cong_snd" => {
                    p.bump();
                    R::CongSnd(unary(p, Sort::CoTerm)?)
                }
                "cong_not+" => {
                    p.bump();
                    R::CongNotIntro(unary(p, Sort::CoTerm)?)
                }
                "cong_not-" => {
                    p.bump();
                    R::CongNotElim(unary(p, Sort::Term)?)
                }
                _ => return Err(p.unexpected(&["a reduction"])),
            };
            Ok(r)
        })
    }
}
