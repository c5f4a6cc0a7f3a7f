//! Binary classification when the misclassification costs are only known to
//! lie in a finite set of cost matrices.
//!
//! The goal is the classifier whose worst-case total cost over the set is
//! smallest. [`framework::solve_sp`] reduces that problem to ordinary
//! single-matrix training plus pairwise minimax training, which is exact on
//! convex fronts of operating points (see [`geometry`] and the randomized
//! checks in [`harness::verify`]). The learner behind every strategy is an
//! unweighted additive ensemble of decision stumps ([`learner`]).
//!
//! ```
//! use cost_minimax::cost::{CostMatrixSet, LabeledDataset};
//! use cost_minimax::framework::{solve_sp, FrameworkConfig};
//!
//! let data = LabeledDataset::from_rows(
//!     vec![vec![1.0], vec![2.0], vec![3.0], vec![4.0]],
//!     vec![0, 0, 1, 1],
//! ).unwrap();
//! let costs = CostMatrixSet::from_pairs(&[(1.0, 5.0), (3.0, 3.0), (5.0, 1.0)]).unwrap();
//! let best = solve_sp(&data, &costs, &FrameworkConfig::default()).unwrap();
//! assert_eq!(best.train_max_cost, 0.0);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cost;
pub mod error;
pub mod exec;
pub mod framework;
pub mod geometry;
pub mod harness;
pub mod learner;
pub mod stats;

pub use error::{Error, Result};
pub use exec::Exec;
