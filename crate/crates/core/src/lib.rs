//! Exact dense linear algebra over word-size prime fields Z/pZ.
//!
//! The multiplication kernel accumulates over the integers and reduces
//! modulo p only where a proven bound guarantees the backend's exact
//! integer range is never left. A recursive seven-multiplication cascade
//! sits on top of the classical kernel, with the admissible depth derived
//! from the operand ranges. Triangular solving, an in-place rank-revealing
//! LQUP factorization, and the usual derived routines (rank, determinant,
//! nullspace, inverses, pseudo-inverses) reduce to that kernel.
//!
//! Two storage backends are supported: `f64` (exact integers up to 2^53)
//! and `i64` (up to 2^63). All routines are generic over the backend and
//! produce identical results where the capacities overlap.

pub mod bounds;
pub mod element;
pub mod error;
pub mod factor;
pub mod field;
pub mod highlevel;
pub mod matmul;
pub mod matrix;
pub mod oracle;
pub mod perm;
pub mod rng;
pub mod trsm;

pub use bounds::{Instr, OpCounter, OperandBounds, Thresholds};
pub use element::Element;
pub use error::{Error, Result};
pub use field::{PrimeField, Repr};
pub use matmul::{fgemm, fgemm_traced, Levels, MulConfig, TraceResult};
pub use matrix::{MatMut, MatRef, Matrix, Side};
pub use perm::{Direction, Permutation};
pub use rng::Rng64;
