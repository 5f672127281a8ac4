//! Exact-arithmetic engine for filtered, graded chain complexes over Z.
//!
//! The crate is organized around a small stack of layers:
//!
//! * [`algebra`] — sparse integer matrices, Smith/Hermite normal forms,
//!   kernels, and homology of composable pairs as finitely generated
//!   abelian groups with tracked generators.
//! * [`complex`] — graded chain complexes with relative Z/pZ gradings,
//!   signed tensor products, filtration sub/quotient complexes, long
//!   exact sequences, and algebraic Morse reduction.
//! * [`ocomplex`] — the explicit complex on handle labels (m, o) with the
//!   four-rule differential, its norm filtration, and direct-limit
//!   homology.
//! * [`hf`] — the input data model: a finite generator set with a
//!   translation-equivariant, filtration-preserving differential given by
//!   polynomials in one translation symbol.
//! * [`ech`] — the signed tensor assembly of an input complex with g
//!   handle factors, its translation action, norm filtration, and
//!   windowed flavor homology.
//! * [`verifier`] — machine checks of the structural statements: the
//!   limit homology of the handle complex, the commutative ladder of long
//!   exact sequences, the collapse to the two-class handle complex, and
//!   the module structure intertwining.
//!
//! All arithmetic is exact; there is no floating point anywhere.

pub mod algebra;
pub mod complex;
pub mod ech;
pub mod hf;
pub mod instances;
pub mod label;
pub mod ocomplex;
pub mod verifier;
