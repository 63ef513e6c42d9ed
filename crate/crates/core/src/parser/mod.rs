//! Concrete syntax for `.c2` files.
//!
//! ```text
//! file   ::= decl*
//! decl   ::= "type" NAME "=" type
//!          | "term" NAME ctx ":" judg "=" expr
//!          | "red"  NAME ctx ":" judg "=" red
//! ctx    ::= "[" (NAME ":" ("+" | "-") type ("," ...)*)? "]"
//! judg   ::= "+" type | "-" type | "#"
//! type   ::= type "\/" type | type "/\" type | "~" type | "Top" | "Bot" | NAME | "(" type ")"
//! ```
//!
//! Names bound by `type` are expanded while parsing, and every name used in
//! an expression must be in scope.

mod grammar;
mod lexer;
mod pretty;

use std::fmt;

use thiserror::Error;

use crate::syntax::{Expr, Name, ReductionExpr, Sort, TypeExpr};
use crate::typing::{Context, Judgment};

pub use pretty::{pretty_declaration, pretty_expr, pretty_file, pretty_reduction, pretty_type, pretty_type_atomic};

/// Maximum nesting of brackets and prefix constructors.
pub const MAX_DEPTH: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: u32,
    pub column: u32,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Declaration {
    TypeDef { name: Name, ty: TypeExpr },
    TermDecl { name: Name, context: Context, judgment: Judgment, expr: Expr },
    ReductionDecl { name: Name, context: Context, judgment: Judgment, reduction: ReductionExpr },
}

impl Declaration {
    pub fn name(&self) -> &Name {
        match self {
            Declaration::TypeDef { name, .. }
            | Declaration::TermDecl { name, .. }
            | Declaration::ReductionDecl { name, .. } => name,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SourceFile {
    pub declarations: Vec<Declaration>,
    /// Position of each declaration's leading keyword.
    pub positions: Vec<Pos>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ParseErrorKind {
    Lex,
    Syntax,
    ReservedWord,
    Scope,
    DuplicateDeclaration,
    DuplicateHypothesis,
    TypeShadowing,
    Encoding,
    NestingDepth,
}

impl ParseErrorKind {
    pub fn class(self) -> &'static str {
        match self {
            ParseErrorKind::Lex => "lex",
            ParseErrorKind::Syntax => "syntax",
            ParseErrorKind::ReservedWord => "reserved-word",
            ParseErrorKind::Scope => "scope",
            ParseErrorKind::DuplicateDeclaration => "duplicate-declaration",
            ParseErrorKind::DuplicateHypothesis => "duplicate-hypothesis",
            ParseErrorKind::TypeShadowing => "type-shadowing",
            ParseErrorKind::Encoding => "encoding",
            ParseErrorKind::NestingDepth => "nesting-depth",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}{}", expected_suffix(.expected))]
pub struct ParseError {
    pub line: u32,
    pub column: u32,
    pub message: String,
    pub expected: Vec<String>,
    pub kind: ParseErrorKind,
}

fn expected_suffix(expected: &[String]) -> String {
    if expected.is_empty() {
        String::new()
    } else {
        format!(" (expected {})", expected.join(" or "))
    }
}

impl ParseError {
    pub fn class(&self) -> &'static str {
        self.kind.class()
    }
}

pub fn parse(source: &str) -> Result<SourceFile, ParseError> {
    let tokens = lexer::lex(source)?;
    grammar::Parser::new(tokens).file()
}

/// Parses raw bytes, reporting invalid UTF-8 as a parse error.
pub fn parse_bytes(bytes: &[u8]) -> Result<SourceFile, ParseError> {
    match std::str::from_utf8(bytes) {
        Ok(s) => parse(s),
        Err(e) => {
            let good = &bytes[..e.valid_up_to()];
            let text = std::str::from_utf8(good).expect("valid prefix");
            let line = text.matches('\n').count() as u32 + 1;
            let column = text.rsplit('\n').next().map_or(0, |l| l.chars().count()) as u32 + 1;
            Err(ParseError {
                line,
                column,
                message: "input is not valid UTF-8".into(),
                expected: Vec::new(),
                kind: ParseErrorKind::Encoding,
            })
        }
    }
}

/// Parses a single expression of the given sort with the given names in
/// scope.
pub fn parse_expr(source: &str, sort: Sort, scope: &[&str]) -> Result<Expr, ParseError> {
    let tokens = lexer::lex(source)?;
    let mut p = grammar::Parser::new(tokens);
    p.with_scope(scope, |p| p.expr_eof(sort))
}

/// Parses a single reduction witness of the given sort.
pub fn parse_reduction(source: &str, sort: Sort, scope: &[&str]) -> Result<ReductionExpr, ParseError> {
    let tokens = lexer::lex(source)?;
    let mut p = grammar::Parser::new(tokens);
    p.with_scope(scope, |p| p.reduction_eof(sort))
}

pub fn parse_type(source: &str) -> Result<TypeExpr, ParseError> {
    let tokens = lexer::lex(source)?;
    grammar::Parser::new(tokens).type_eof()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::build::*;
    use crate::syntax::{alpha_eq, Name, StatementExpr};

    #[test]
    fn unit_at_top() {
        let f = parse("term t [] : +Top = ()").unwrap();
        match &f.declarations[0] {
            Declaration::TermDecl { judgment, expr, .. } => {
                assert_eq!(*judgment, Judgment::TermAt(TypeExpr::Top));
                assert_eq!(*expr, Expr::Term(crate::syntax::TermExpr::Unit));
            }
            d => panic!("{d:?}"),
        }
    }

    #[test]
    fn undeclared_covariable_is_a_scope_error() {
        let e = parse("term w [x:+A] : # = <x | mu~ y. <y | a : A> : A>").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Scope);
        assert!(e.message.contains('a'));
    }

    #[test]
    fn beta_mu_tilde_declaration() {
        let f = parse("red r [x:+A, k:-A] : # = beta_mu~(x; y. <y|k:A>)").unwrap();
        let Declaration::ReductionDecl { reduction, .. } = &f.declarations[0] else { panic!() };
        assert_eq!(
            *reduction,
            ReductionExpr::BetaMuTilde {
                term: var("x"),
                binder: Name::new("y"),
                body: cut(var("y"), covar("k"), base("A")),
                ann: None
            }
        );
    }

    #[test]
    fn precedence() {
        assert_eq!(
            parse_type("~A /\\ B \\/ C").unwrap(),
            TypeExpr::or(TypeExpr::and(TypeExpr::not(base("A")), base("B")), base("C"))
        );
        assert_eq!(
            parse_type("A /\\ B /\\ C").unwrap(),
            TypeExpr::and(TypeExpr::and(base("A"), base("B")), base("C"))
        );
    }

    #[test]
    fn pretty_forms() {
        let s: Expr = StatementExpr::cut(var("x"), covar("a"), TypeExpr::Top).into();
        assert_eq!(pretty_expr(&s), "<x | a : Top>");
        assert_eq!(pretty_expr(&pair(crate::syntax::TermExpr::Unit, crate::syntax::TermExpr::Unit).into()), "((), ())");
        assert_eq!(pretty_type(&TypeExpr::not(TypeExpr::and(base("A"), base("B")))), "~(A /\\ B)");
    }

    #[test]
    fn type_definitions_expand() {
        let f = parse("type P = A /\\ B\nterm t [x:+P] : +P = x").unwrap();
        let Declaration::TermDecl { judgment, .. } = &f.declarations[1] else { panic!() };
        assert_eq!(*judgment, Judgment::TermAt(TypeExpr::and(base("A"), base("B"))));
    }

    #[test]
    fn round_trip_of_binders() {
        let src = "term t [x:+A] : +A = mu a. <mu b. <x | b : A> | mu~ y. <y | a : A> : A>";
        let f = parse(src).unwrap();
        let g = parse(&pretty_file(&f)).unwrap();
        assert_eq!(f.declarations, g.declarations);
        let (Declaration::TermDecl { expr: e1, .. }, Declaration::TermDecl { expr: e2, .. }) =
            (&f.declarations[0], &g.declarations[0])
        else {
            panic!()
        };
        assert!(alpha_eq(e1, e2));
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse("term t [] : +Top =\n  (").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(!e.expected.is_empty());
        let e = parse("term t [] : +Top = ()\nterm t [] : +Top = ()").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::DuplicateDeclaration);
        let e = parse("term t [x:+A, x:-A] : # = <x | x : A>").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::DuplicateHypothesis);
        let e = parse("term mu [] : +Top = ()").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::ReservedWord);
    }

    #[test]
    fn invalid_utf8() {
        let e = parse_bytes(b"term t [] :\n +Top = \xff").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Encoding);
        assert_eq!((e.line, e.column), (2, 9));
    }

    #[test]
    fn deep_nesting_is_rejected_not_overflowing() {
        let src = format!("term t [] : +Top = {}(){}", "inl ".repeat(10_000), "");
        assert_eq!(parse(&src).unwrap_err().kind, ParseErrorKind::NestingDepth);
        let src = format!("type T = {}Top", "~".repeat(100_000));
        assert_eq!(parse(&src).unwrap_err().kind, ParseErrorKind::NestingDepth);
    }

    #[test]
    fn annotated_beta() {
        let r = parse_reduction("beta_mu(mu~ x. <z | k : C>; a. <z | k : C> : Top)", Sort::Statement, &["z", "k"]).unwrap();
        let ReductionExpr::BetaMu { ann, .. } = r else { panic!() };
        assert_eq!(ann, Some(TypeExpr::Top));
    }
}
