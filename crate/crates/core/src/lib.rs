//! Switched dynamical systems driven by walks on a directed graph: symbolic
//! sequences, switching signals, the skew-product flow and chain analysis.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` deliberately rejects NaN

pub mod error;
pub mod expr;
pub mod chain;
pub mod flow;
pub mod graph;
mod literal;
pub mod signal;
pub mod symbolic;

pub use chain::{ChainComponent, ChainGraph, ChainMode, ChainParams, Grid};
pub use error::{Error, Result};
pub use expr::Expression;
pub use flow::{product_metric, HybridState, StateBox, SwitchedSystem, VectorField};
pub use graph::{DirectedGraph, MorseOrder, SccDecomposition, ValidationReport};
pub use signal::{StitchedChain, SwitchingSignal};
pub use symbolic::{ChaosCertificate, SymbolicSequence};
