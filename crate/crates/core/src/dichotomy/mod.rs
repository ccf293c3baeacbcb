//! The decision core: positivity kernels, the big-state fixpoint on pair
//! presentations, closure-containment games, the derivative sequence, and
//! the classification that ties them to certificates.

pub mod classify;
pub mod derive;
pub mod game;
pub mod kernel;

pub use classify::{classify, Classification, Diagnostics, Method, Verdict};
pub use derive::{derive_sequence, DerivativeTrace, Removal, RemovalReason};
pub use game::{closure_contained, GameResult};
pub use kernel::{big_states, kernel_oracle, positive_kernel, KernelResult};
