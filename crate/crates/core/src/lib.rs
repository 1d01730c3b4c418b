//! Thermodynamic formalism on finite-alphabet Markov shifts.
//!
//! A finite directed graph presents a shift space: points are infinite
//! walks on the graph, the dynamics is the left shift. This crate builds
//! the standard analytic toolkit on top of that combinatorial picture:
//!
//! - graphs, admissible words, higher-block and power recodings
//!   ([`graph`]);
//! - locally constant potentials with exact variation and Birkhoff-sum
//!   arithmetic ([`potential`]);
//! - reduction of two-sided potentials to one-sided ones by a coboundary
//!   ([`sinai`]);
//! - the weighted transfer operator, its leading eigendata, and the
//!   normalized potential ([`transfer`]);
//! - stationary Markov chains as shift-invariant measures, equilibrium
//!   states, entropy, and the pressure functional ([`measure`]);
//! - Gibbs distortion certificates with explicit constants ([`gibbs`]);
//! - weak-Bernoulli mixing statistics and effective mixing thresholds
//!   ([`mixing`]);
//! - the cyclic rotation factor of a periodic graph and the product
//!   structure over it ([`rotation`]);
//! - JSON interchange for graphs and potentials ([`formats`]).
//!
//! Everything is deterministic: equal inputs give bit-identical outputs.

#![warn(missing_docs)]

mod exact;

pub mod error;
pub mod formats;
pub mod gibbs;
pub mod graph;
pub mod measure;
pub mod mixing;
pub mod potential;
pub mod rotation;
pub mod sinai;
pub mod transfer;
pub mod word;

pub use error::{Error, Result};
pub use formats::{
    load_graph, load_potential, parse_graph, parse_potential, potential_to_json, GraphFile,
    PotentialFile,
};
pub use gibbs::{
    distortion_constant, gibbs_ratio_bounds, phi_star_from_measure, ConcatCase, GibbsCertificate,
    WorstPair,
};
pub use graph::{higher_block, power_graph, BlockGraph, DirectedGraph, SpectralDecomposition};
pub use mixing::{
    find_k_delta, step1_pair_bound, weak_bernoulli_report, KDelta, WeakBernoulliReport, DELTA_MAX,
};
pub use measure::{
    entropy, equilibrium_measure, parry_measure, pressure_functional, MarkovMeasure,
};
pub use potential::LocallyConstantPotential;
pub use rotation::{
    build_rotation_factor, entropy_identity_check, power_potential_pressure_check,
    product_structure_witness, ProductStructureWitness, RotationFactor,
};
pub use sinai::{certify_one_sided, sinai_reduce, SinaiReduction};
pub use transfer::{
    apply_transfer, solve_rpf, solve_rpf_with, truncation_pressure_sequence, RpfSolution,
    SolverOptions, TransferMatrix, WordFunction,
};
pub use word::{comparison_range, natural_distance, Sidedness, Word};
