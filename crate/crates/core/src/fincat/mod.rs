//! Finite categories, finite-set-valued functors on signed products of them,
//! and coends.

mod category;
mod coend;
pub mod file;
mod functor;
mod sets;

pub use category::{Arrow, FinCat};
pub use coend::{coend, CoendResult};
pub use functor::{hom_functor, validate_functor, SetFunctor, Slot, Variance};
pub use sets::{Elem, FinSet, SetMap};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FinError {
    #[error("arrow `{arrow}` has an endpoint {object} outside the {count} objects")]
    DanglingArrow { arrow: String, object: u32, count: usize },
    #[error("duplicate arrow name `{0}`")]
    DuplicateArrow(String),
    #[error("duplicate object name `{0}`")]
    DuplicateObject(String),
    #[error("identity of object `{object}` is `{arrow}`, which is not an endomorphism of it")]
    BadIdentity { object: String, arrow: String },
    #[error("identity law fails: `{arrow}` composed with `{identity}` is not `{arrow}`")]
    IdentityLaw { arrow: String, identity: String },
    #[error("composite of `{f}` then `{g}` is missing")]
    MissingComposite { f: String, g: String },
    #[error("composite of `{f}` then `{g}` is defined although they are not composable")]
    SpuriousComposite { f: String, g: String },
    #[error("composite of `{f}` then `{g}` is `{h}`, which has the wrong endpoints")]
    CompositeEndpoints { f: String, g: String, h: String },
    #[error("composition is not associative on `{f}`, `{g}`, `{h}`")]
    NonAssociative { f: String, g: String, h: String },
    #[error("malformed category: {0}")]
    Malformed(String),
    #[error("slot {slot}: arrow `{arrow}` at point {point:?} does not preserve identities")]
    FunctorIdentity { slot: usize, arrow: String, point: Vec<u32> },
    #[error("slot {slot}: arrows `{f}` then `{g}` at point {point:?} do not preserve composition")]
    FunctorComposition { slot: usize, f: String, g: String, point: Vec<u32> },
    #[error("slots {s} and {t}: arrows `{f}` and `{g}` at point {point:?} do not commute")]
    FunctorInterchange { s: usize, t: usize, f: String, g: String, point: Vec<u32> },
    #[error("slot {slot}: the action of `{arrow}` at point {point:?} is malformed: {detail}")]
    BadAction { slot: usize, arrow: String, point: Vec<u32>, detail: String },
    #[error("coend slots {cov} and {contra} are not a covariant/contravariant pair over one category")]
    CoendSlots { cov: usize, contra: usize },
    #[error("slot {slot}: the action of `{arrow}` on coend classes at point {point:?} is not well defined")]
    CoendAction { slot: usize, arrow: String, point: Vec<u32> },
    #[error("induced map splits a class at point {point:?}: `{left}` and `{right}` go to different elements")]
    SplitClass { point: Vec<u32>, left: String, right: String },
    #[error("element `{elem}` is not in the target set at point {point:?}")]
    NotInSet { elem: String, point: Vec<u32> },
    #[error("interface mismatch: {0}")]
    Interface(String),
    #[error("slot {slot}: naturality fails for arrow `{arrow}` at point {point:?} on `{elem}`")]
    NotNatural { slot: usize, arrow: String, point: Vec<u32>, elem: String },
}
