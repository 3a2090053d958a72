//! Enumeration of the biggest caterpillar subtree in rooted binary trees.
//!
//! * [`tree`]: ordered and unordered full binary trees, gamma, Colless index,
//!   exhaustive generators.
//! * [`counts`]: exact big-integer coefficient engines and the exact mean of gamma.
//! * [`asymptotics`]: dominant singularities and coefficient asymptotics.
//! * [`perm`]: the bijection with 132-avoiding permutations.
//! * [`newick`]: Newick parsing and serialization.

pub mod asymptotics;
pub mod counts;
pub mod error;
pub mod newick;
pub mod perm;
pub mod real;
pub mod tree;

pub use error::{Error, Result};
pub use tree::{BinaryTree, NodeId, OrderedTree, Side, UnorderedTree};
