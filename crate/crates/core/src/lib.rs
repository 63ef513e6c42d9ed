//! Proof checking and profunctor semantics for a two-dimensional classical
//! sequent calculus.
//!
//! Expressions are checked by [`typing`], interpreted by [`semantics`] as
//! profunctors between finite categories ([`fincat`], [`profunctor`]), and
//! reduction witnesses become natural transformations between them.

pub mod catalog;
pub mod check;
pub mod fincat;
pub mod models;
pub mod oracle;
pub mod par;
pub mod parser;
pub mod profunctor;
pub mod semantics;
pub mod syntax;
pub mod typing;
pub mod verify;
