//! Numerics for dimension-free linear matrix inequalities.
//!
//! The crate evaluates monic matrix pencils on tuples of complex matrices,
//! decides spectraball and free-spectrahedron membership, analyses the
//! algebra generated by coefficient tuples (multiplication tables, minimal
//! and ball-minimal reductions, atom tests), builds and verifies the
//! rational changes of variables attached to those algebras, constructs
//! automorphisms of free polydiscs and matrix balls, and probes spectraball
//! boundaries with random and truncated-Fock-space witnesses.
//!
//! Sampling loops run data-parallel through rayon when the default
//! `parallel` feature is enabled and sequentially otherwise; results are
//! identical either way because every sample draws its own seeded stream.

pub mod algebra;
pub mod ballmaps;
pub mod boundary;
pub mod convexotonic;
pub mod error;
pub mod exec;
pub mod mat;
pub mod pencil;
pub mod random;
pub mod rational;
pub mod tol;
pub mod tuple;

pub use error::{Error, Result};
pub use mat::{
    c, condition_number, cr, defect, kernel_basis, kron, operator_norm, psd_check, CMatrix,
    CVector, PsdKind, PsdVerdict, C64,
};
pub use pencil::{HermitianPencil, Membership, Region, SpectraballPencil};
pub use tol::ToleranceProfile;
pub use tuple::{lambda_eval, MatrixTuple};

pub use algebra::{
    affine_apply, affine_change, atom_check, ball_equivalent, ball_minimal_reduction,
    centralizer_dim, dot_action, generated_algebra_basis, is_convexotonic,
    is_linearly_independent, minimal_reduction, solve_multiplication_table, AlgebraBasis,
    Decomposition, MinimalReduction, MultiplicationTable,
};
pub use ballmaps::{
    cartan_uniqueness_check, construct_ball_map, matrixball_automorphism, matt, only_c_condition,
    polydisc_automorphism, row_tuple, solve_e_from_c, verify_b2b, BallMap, BallMapData,
};
pub use boundary::{
    b_matrix, beta_dot_shift, boundary_scale, eig_generic_check, fock_boundary_witness,
    fock_shift_tuple, hair_span_rank, hairs_from_witnesses, hyperbasis_search,
    nullstellensatz_test, sample_detailed_boundary, BlockMatrix, BoundaryWitness, FockShiftTuple,
    FockWitnessSet, GenericityReport, HairSample, MatrixPolynomial,
};
pub use convexotonic::{
    boundary_transport_check, co_eval, nilpotent_lift, nstatz_residuals, pencil_pair_from_unitary,
    proper_map_to_ball, verify_inverse_pair, ConvexotonicMap, InverseCheck, PencilPair,
    ProperBallMap, Sign, TransportReport,
};
pub use rational::{convexotonic_to_realizations, in_domain, real_eval, Realization};
