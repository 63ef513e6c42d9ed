//! Whole-file checking: parse, then type every declaration in order.

use crate::parser::{parse_bytes, Declaration, ParseError, Pos, SourceFile};
use crate::typing::{Checker, TypeError};

/// The outcome of checking one declaration.
#[derive(Clone, Debug)]
pub struct Checked {
    pub name: String,
    pub kind: &'static str,
    pub pos: Pos,
    pub error: Option<TypeError>,
}

/// A file that parsed, with one outcome per declaration.
#[derive(Clone, Debug)]
pub struct FileReport {
    pub file: SourceFile,
    pub outcomes: Vec<Checked>,
}

impl FileReport {
    pub fn ok(&self) -> bool {
        self.outcomes.iter().all(|o| o.error.is_none())
    }

    /// Error class of the first failing declaration.
    pub fn first_class(&self) -> Option<&'static str> {
        self.outcomes.iter().find_map(|o| o.error.as_ref().map(TypeError::class))
    }
}

pub fn kind_of(d: &Declaration) -> &'static str {
    match d {
        Declaration::TypeDef { .. } => "type",
        Declaration::TermDecl { .. } => "term",
        Declaration::ReductionDecl { .. } => "red",
    }
}

pub fn check_declaration(checker: &Checker, d: &Declaration) -> Result<(), TypeError> {
    match d {
        Declaration::TypeDef { .. } => Ok(()),
        Declaration::TermDecl { context, judgment, expr, .. } => checker.check_expr(context, expr, judgment),
        Declaration::ReductionDecl { context, judgment, reduction, .. } => {
            checker.reduction(context, reduction, Some(judgment)).map(|_| ())
        }
    }
}

pub fn check_file(checker: &Checker, file: SourceFile) -> FileReport {
    let outcomes = file
        .declarations
        .iter()
        .zip(&file.positions)
        .map(|(d, pos)| Checked {
            name: d.name().to_string(),
            kind: kind_of(d),
            pos: *pos,
            error: check_declaration(checker, d).err(),
        })
        .collect();
    FileReport { file, outcomes }
}

pub fn check_bytes(checker: &Checker, bytes: &[u8]) -> Result<FileReport, ParseError> {
    Ok(check_file(checker, parse_bytes(bytes)?))
}

/// The class a source is rejected with, if any: a parse class, or the type
/// class of its first failing declaration.
pub fn rejection_class(checker: &Checker, bytes: &[u8]) -> Option<&'static str> {
    match check_bytes(checker, bytes) {
        Err(e) => Some(e.class()),
        Ok(r) => r.first_class(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_source_is_an_empty_report() {
        let r = check_bytes(&Checker::default(), b"").unwrap();
        assert!(r.outcomes.is_empty() && r.ok());
    }

    #[test]
    fn failures_are_reported_per_declaration() {
        let src = b"term a [x:+A] : +A = x\nterm b [x:+A] : +B = x\n";
        let r = check_bytes(&Checker::default(), src).unwrap();
        assert!(r.outcomes[0].error.is_none());
        assert_eq!(r.outcomes[1].error.as_ref().unwrap().class(), "type-mismatch");
        assert_eq!(r.outcomes[1].pos.line, 2);
    }
}
