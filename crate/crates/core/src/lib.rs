//! Exact numerics for resonating-valence-bond (RVB) states on small lattices.
//!
//! The pipeline is: pick a [`LatticeSpec`], enumerate a [`CoveringEnsemble`]
//! (all A↔B pairings for the gas, nearest-neighbour matchings for the
//! liquid), [`assemble`] the normalised state vector, then take reduced
//! density matrices and measure them.
//!
//! ```
//! use rvb_core::{assemble, enumerate_liquid, extract_werner_p, Boundary, LatticeSpec};
//!
//! let lattice = LatticeSpec::square(2, 2, Boundary::Open).unwrap();
//! let state = assemble(&enumerate_liquid(&lattice).unwrap()).unwrap();
//! let rho = state.reduced_density_matrix(&[0, 1]).unwrap();
//! let fit = extract_werner_p(&rho).unwrap();
//! assert!(fit.residual < 1e-12);
//! ```

pub mod bounds;
pub mod coverings;
pub mod density;
pub mod entanglement;
pub mod error;
pub mod lattice;
pub mod linalg;
pub mod loop_gas;
pub mod multipartite;
pub mod state;

pub use bounds::{
    compare, gas_monogamy_bound, monogamy_bound, telecloning_bound, BoundKind, BoundReport, PairClass,
};
pub use coverings::{
    custom_ensemble, enumerate_gas, enumerate_liquid, CoveringEnsemble, DimerCovering, Variant,
};
pub use density::DensityMatrix;
pub use entanglement::{
    concurrence, eof_two_qubit, extract_werner_p, is_separable_werner, monogamy_sum, tangle_two_qubit,
    tangle_werner, werner_state, MeasureRecord, WernerFit,
};
pub use error::{Result, RvbError};
pub use lattice::{parse_key_values, Boundary, LatticeKind, LatticeSpec, Sublattice};
pub use loop_gas::{build_transition_graph, loop_formula_p, LoopTable, LoopWeighting, TransitionGraph};
pub use multipartite::{
    even_subset_audit, genuine_multipartite_certificate, odd_subset_audit, BipartitionVerdict,
};
pub use state::{assemble, singlet_product, StateVector};
