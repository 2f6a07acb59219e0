//! Decorated Temperley–Lieb diagrams for quantum circuits.
//!
//! A [`Diagram`] is a Brauer-style matching of boundary points whose strands
//! carry operator decorations, bends (cups and caps) and ket/bra terminals.
//! Diagrams compose vertically and horizontally, rewrite under the
//! bend-sliding moves in [`rewrite`], and lower to dense complex matrices in
//! [`numeric`]. The [`protocols`] module rebuilds teleportation, dense coding,
//! entanglement swapping and the TL algebra relations on top of that and
//! checks each identity against direct matrix arithmetic.
//!
//! Orientation: the top boundary is the domain, the bottom boundary the
//! codomain. `a.compose(&b)` means "apply `a`, then `b`" and evaluates to the
//! matrix product `eval(b) · eval(a)`.

pub mod diagram;
pub mod error;
pub mod numeric;
pub mod protocols;
pub mod registry;
pub mod rewrite;
pub mod sample;

pub use diagram::{Bead, Decoration, Diagram, DiagramSum, Endpoint, Flavor, Loop, Strand};
pub use error::{Error, Result};
pub use numeric::{evaluate, evaluate_sum, ComplexMatrix, FactoredTensor};
pub use registry::Registry;

pub use num_complex::Complex64;

/// Default max-abs tolerance for numeric identity checks.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;
