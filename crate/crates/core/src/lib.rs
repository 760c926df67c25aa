//! Membership checking for idempotent function spaces.
//!
//! A function `f : A → B` belongs to `O(A)` when `B ⊆ A` and `f(f(x)) = f(x)`
//! for every `x ∈ A`. The n-ary form asks for `f(f(x), …, f(x)) = f(x)` over
//! `Aⁿ`, and over a mixed product `A₁ × … × Aₙ` the outputs must lie in every
//! factor.
//!
//! The crate is `no_std` and needs only `alloc`.
//!
//! ```
//! use ouroboros_core::{catalog, checker::{check, CheckConfig, Status}};
//!
//! let mean3 = catalog::mean(3);
//! let verdict = check(&mean3, &CheckConfig::default()).unwrap();
//! assert_eq!(verdict.status, Status::HoldsProbably);
//! ```

#![no_std]

extern crate alloc;

pub mod analysis;
pub mod catalog;
pub mod checker;
pub mod domain;
pub mod expr;
pub mod scalar;
pub mod slln;

pub use checker::{CheckConfig, Status, Verdict};
pub use domain::{Domain, DomainSignature};
pub use expr::{Expr, FunctionDef};
pub use scalar::Scalar;
