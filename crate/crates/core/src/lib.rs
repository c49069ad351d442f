//! Exact computation of arithmetic projections `{αa + βb : (a, b) ∈ G}` of a
//! relation `G ⊆ A × B` in an abelian group, together with executable
//! versions of the arguments bounding `#{a - b}` by `N^(11/6)` (when
//! `#A, #B, #{a + b} <= N`) and by `N^(7/4)` (when also `#{a + 2b} <= N`).
//!
//! Modules:
//! - [`group`]: the integers and `Z/m`, base-`M` digit vectors.
//! - [`instance`]: `(A, B, G)`, linear-form projections, hypothesis checks.
//! - [`chain`]: counting label-chains and the lower bound they satisfy.
//! - [`proof`]: the sets `V`, `S`, `T`, the injective maps and their inverses.
//! - [`constructions`]: carry-free digit constructions of large difference sets.
//! - [`search`]: search for digit patterns with large exponents.
//! - [`kakeya`]: dimension bounds for Besicovitch sets.

pub mod chain;
pub mod constructions;
pub mod error;
pub mod exact;
pub mod group;
pub mod instance;
pub mod kakeya;
pub mod proof;
pub mod sampling;
pub mod search;

pub use error::{Error, Result};
pub use group::{AmbientGroup, DigitVector, Elem};
pub use instance::{Instance, LinearForm};
