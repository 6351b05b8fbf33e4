//! Persistent-homology tools for k-anonymity.
//!
//! Rows of a table become points of the unit cube. At radius `eps` the
//! anonymity complex holds a simplex for every set of rows whose closed
//! `eps`-balls share a point, which is the case exactly when their minimum
//! enclosing ball has radius at most `eps`. Sweeping `eps` gives a filtration
//! whose barcodes expose every radius interval where k-anonymity holds.

pub mod anonymity;
pub mod categorical;
pub mod complex;
pub mod error;
pub mod geometry;
mod gf2;
pub mod homology;
pub mod report;
mod union_find;

pub use anonymity::{
    check_k_anonymity, compute_regimes, generalize_table, grid_sweep, minimal_epsilon,
    satisfies_k_anonymity, AnonymityVerdict, FailureReason, GeneralizedTable, Objective, Regime,
};
pub use categorical::{
    build_lattice, chain_sweep, generalize_value, generalized_partition_at, lattice_search,
    validate_tree, ChainReport, GeneralizationLattice, GeneralizationTree, LatticeNode, Strategy,
    TreeSpec,
};
pub use complex::{
    build_anonymity_complex, build_filtration, is_anonymity_simplex, Filtration, Simplex,
    SimplicialComplex,
};
pub use error::{Error, Result};
pub use geometry::{
    balls_intersect, min_enclosing_ball, normalize_dataset, Ball, Column, ColumnRole,
    NormalizedDataset, NumericTable,
};
pub use homology::{
    barcode, boundary_matrix, homology_dims_at, persistence, reduce, weighted_h0_barcode, Barcode,
    WeightedBarcode,
};
