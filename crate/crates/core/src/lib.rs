//! Numerical toolkit for bipartite state extendibility.
//!
//! The crate builds the standard families of bipartite states (private
//! states, erased states, Werner and isotropic states), applies Kraus
//! channels to them, evaluates entropic quantities, and solves the
//! semidefinite programs that decide whether a state admits a symmetric
//! extension with support inside its own support. The headline quantity is
//! the min-unextendible entanglement of a bipartite state, computed by a
//! self-contained dense interior-point solver over complex Hermitian
//! variables.
//!
//! Modules mirror the layers of the computation:
//!
//! * [`linalg`] — dense complex matrices, Kronecker products, partial
//!   traces, Hermitian eigendecomposition, support projectors.
//! * [`states`] — constructors for every state family, with explicit
//!   erasure-symbol embedding.
//! * [`channels`] — Kraus channels: partial dephasing, flag retrieval,
//!   flag copy, failure randomization, and a catalogue of concrete
//!   one-way LOCC channels.
//! * [`entropy`] — von Neumann entropy, binary entropy, min-relative
//!   entropy, coherent information (numeric and closed form).
//! * [`sdp`] — primal-dual path-following interior-point solver with
//!   Nesterov-Todd scaling for Hermitian-variable SDPs.
//! * [`emin`] — min-unextendible entanglement, super two-extendibility,
//!   and the explicit extension witnesses.
//! * [`verify`] — batch suites that numerically confirm each labeled
//!   result and report measured slacks.

pub mod channels;
pub mod emin;
pub mod entropy;
pub mod exec;
pub mod linalg;
pub mod sdp;
pub mod states;
pub mod verify;

pub use linalg::{ComplexMatrix, HermitianEig, Part, Party, SystemDims};
pub use states::DensityOperator;
