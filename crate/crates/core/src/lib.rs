//! Block-by-block embedding of degenerate, small-bandwidth graphs into dense hosts.
//!
//! The crate is organised around the pieces of a rolling embedding:
//!
//! - [`graph`]: dense-bitmap host graphs, vertex sets, labellings and the
//!   degeneracy/locality verifier.
//! - [`labelling`]: turning a local labelling of a degenerate graph into one that
//!   is simultaneously degenerate and local.
//! - [`density`]: dense pairs, degree-dense pairs and reduced graphs.
//! - [`potentials`]: tuple potentials, commonness, heavy cliques and crossing families.
//! - [`drc`]: dependent random choice selectors with checkable certificates.
//! - [`embed`]: greedy extension steps and the block pipelines built on them.
//! - [`structures`]: path powers, backbones, recolouring and the Ramsey pipeline.
//! - [`gen`] and [`experiment`]: seeded instance generators and the batch runner.
//!
//! Vertices are 0-based `usize` ids. Labels in a [`graph::Labelling`] are 1-based.

pub mod budget;
pub mod density;
pub mod drc;
pub mod embed;
pub mod error;
pub mod experiment;
pub mod gen;
pub mod graph;
pub mod labelling;
pub mod potentials;
pub mod rng;
pub mod structures;

pub use budget::{Budget, CheckMode};
pub use error::{Error, Result};
pub use graph::{Labelling, PartitionedGraph, VertexSet};
