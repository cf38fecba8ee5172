//! Orthogonal product bases (OPBs) for few-qubit systems.
//!
//! The crate models OPBs through *orthogonal product matrices* (OPMs): rows
//! are product states, entries are computational kets, named qubit basis
//! pairs, or the star shorthand for a fresh pair. It ships the complete
//! catalog of two-, three- and four-qubit OPB families (`M2`, `M31`–`M33`,
//! `M41`–`M433`) and the machinery to work with them:
//!
//! - [`opm`] — the symbolic layer: text/JSON formats, star expansion, the
//!   catalog;
//! - [`instance`] — numerical instantiation with generic or degenerate
//!   parameters, Gram-matrix orthogonality and rank-based completeness
//!   checks;
//! - [`structure`] — reducibility graphs, decomposition into irreducible
//!   blocks, multiplicity bounds, equivalence transforms, and the local
//!   distinguishability decision;
//! - [`locc`] — measurement protocol trees, their simulation, and the
//!   non-disturbing first-round solver behind indistinguishability verdicts;
//! - [`teleport`] — teleportation merges with ebit accounting, the explicit
//!   merged protocols, and the minimal-merge sweep.
//!
//! Everything is deterministic given a seed, and every verdict carries the
//! numbers it was decided on.

pub mod instance;
pub mod linalg;
pub mod locc;
pub mod opm;
pub mod structure;
pub mod teleport;

pub use instance::{
    gram, realize, realize_seeded, sample_params, verify_opb, FamilyMode, FamilyParam,
    OpbInstance, OpbVerdict, ParamAssignment, ProductState, Provenance, Tolerances, DEFAULT_TOL,
    GENERICITY_MARGIN,
};
pub use locc::{
    certificate_protocol, first_round_triviality, nondisturbing_space, simulate,
    two_qubit_protocol, Povm, ProtocolNode, SimVerdict, Simulation, Transcript,
};
pub use opm::{catalog, catalog_entry, expand_stars, parse_opm, render_opm, ExpandedOpm, Opm};
pub use structure::{
    apply_equivalence, decide_local_distinguishability, decompose, multiplicity_check,
    reducibility, Decision, Distinguishability, EquivalenceTransform, IrreducibleBlock,
    ReducibilityReport, SplitTree,
};
pub use teleport::{
    apply_plan, distinguish_m49_family, distinguish_three_qubit_with_merge, ebit_sweep, merge,
    MergePlan, MergedInstance, SweepReport,
};
