//! Interpretation of checked expressions as profunctors and of reduction
//! witnesses as natural transformations between them.
//!
//! A type denotes a finite category: `Top` and `Bot` the terminal one,
//! both `/\` and `\/` the product, `~` the opposite. In a context the
//! positive hypotheses are inputs and the negative ones outputs; a term adds
//! an output for its own type and a co-term an input.

mod gbeta;
mod interp;
mod reduction;

use std::sync::Arc;

use thiserror::Error;

use crate::fincat::file::BaseAssignment;
use crate::fincat::{FinCat, FinError};
use crate::syntax::{SubstError, TypeExpr};
use crate::typing::TypeError;

pub use gbeta::{Arg, CoincidenceReport, Delayed};
pub use reduction::ReductionCell;

/// Products larger than this many elements are refused.
pub const DEFAULT_ELEMENT_LIMIT: usize = 4_000_000;

#[derive(Debug, Clone, Error)]
pub enum SemError {
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error(transparent)]
    Fin(#[from] FinError),
    #[error(transparent)]
    Subst(#[from] SubstError),
    #[error("interpretation too large: a composite would hold up to {size} elements (limit {limit})")]
    TooLarge { size: usize, limit: usize },
    #[error("{0}")]
    Mismatch(String),
}

pub type Result<T> = std::result::Result<T, SemError>;

/// An interpretation: a category for every base type.
#[derive(Clone, Debug)]
pub struct Semantics {
    bases: BaseAssignment,
    limit: usize,
}

impl Default for Semantics {
    fn default() -> Self {
        Semantics::new(BaseAssignment::default())
    }
}

impl Semantics {
    pub fn new(bases: BaseAssignment) -> Self {
        Semantics { bases, limit: DEFAULT_ELEMENT_LIMIT }
    }

    pub fn with_limit(mut self, limit: usize) -> Self {
        self.limit = limit;
        self
    }

    pub fn limit(&self) -> usize {
        self.limit
    }

    pub fn bases(&self) -> &BaseAssignment {
        &self.bases
    }

    pub fn type_cat(&self, t: &TypeExpr) -> Arc<FinCat> {
        match t {
            TypeExpr::Top | TypeExpr::Bot => Arc::new(FinCat::terminal()),
            TypeExpr::Base(n) => self.bases.get(n),
            TypeExpr::And(a, b) | TypeExpr::Or(a, b) => Arc::new(self.type_cat(a).product(&self.type_cat(b))),
            TypeExpr::Not(a) => Arc::new(self.type_cat(a).opposite()),
        }
    }
}

#[cfg(test)]
mod tests;
