//! Exact k-selection on Cartesian sums `X1 + X2 + ... + Xm`.
//!
//! The crate provides five selectors over `m` arrays, from a direct soft-heap
//! walk of the sum tensor to a tree of layer-ordered-heap generators whose
//! propagation cost grows only as `m^(2 log2 alpha)`, together with the data
//! structures they are built from and a brute-force oracle.
//!
//! ```
//! use cartesian_topk::{keys, Algorithm};
//!
//! let arrays = vec![keys(&[1.0, 2.0]).unwrap(), keys(&[3.0, 4.0]).unwrap()];
//! let top = Algorithm::SortTree.select(&arrays, 3, 1.05).unwrap();
//! assert_eq!(top.values, keys(&[4.0, 5.0, 5.0]).unwrap());
//! ```

pub mod bench;
pub mod error;
pub mod loh;
pub mod pairwise;
pub mod score;
pub mod select;
pub mod selectors;
pub mod soft_heap;

pub use error::{Error, Result};
pub use loh::{layer_schedule, lohify, verify_loh, LayerOrderedHeap, LayerSchedule, LeafGenerator, LohGenerator};
pub use pairwise::{concatenation_select, soft_select_pairwise, AbNode};
pub use score::{keys, Multiset, ScoreKey};
pub use select::{select_k, select_k_loh};
pub use selectors::{
    brute_force_select, fast_soft_tree_select, soft_tensor_select, soft_tree_select, sort_tensor_select,
    sort_tree_select, theoretical_exponent, Algorithm, IndexTuple, RunStats, SelectionResult,
};
pub use soft_heap::{SoftHeap, SoftHeapEntry};
