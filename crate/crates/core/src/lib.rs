//! Decomposition of permutation-symmetric multiqubit states into
//! superpositions of spin coherent states, together with the Majorana
//! (stellar) representation, local-unitary and SLOCC canonical forms, and the
//! entanglement measures that can be read off them.
//!
//! States are stored in the Dicke basis with integer index `k` = number of
//! qubits in `|1>`, so `k = m + N/2`.

pub mod canonical;
pub mod cli;
pub mod decomp;
pub mod error;
pub mod majorana;
pub mod measures;
pub mod poly;
pub mod random;
pub mod sphere;
pub mod symstate;

pub use canonical::{
    balance, equivalent, il_canonical, lu_canonical, EquivalenceMode, ILCanonicalForm,
    LUCanonicalForm, ParametricInputs, ThreeQubitParams,
};
pub use decomp::{
    decompose, decompose_with, decomposition_candidates, moments, reconstruct, verify_conditions, CoherentDecomposition,
    DecomposeOptions, DecompositionDiagnostics, MomentVector, Term,
};
pub use error::{Error, Result};
pub use majorana::{
    genericity, majorana_polynomial, majorana_roots, mobius_on_roots, product_form,
    GenericityReport, MajoranaPoly, ProductForm, RootMultiset,
};
pub use measures::{
    lu_invariants, schmidt_measure, tangle_from_lu, tangle_from_lu_exact, tangle_oracle, three_tangle, InvariantSet,
    TangleReport,
};
pub use sphere::Extended;
pub use symstate::{
    apply_collective, coherent_state, dicke_weights, overlap, CollectiveMap, DickeWeights,
    MapKind, NodeState, Parity, SymmetricState,
};

pub use num_complex::Complex64;
