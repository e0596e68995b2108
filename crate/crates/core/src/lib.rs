//! Exact arithmetic for even integral lattices: discriminant forms, Kneser
//! neighbors, generalized p-adic neighbors and K3 lattice predicates.

pub mod arith;
pub mod corpus;
pub mod disc_form;
pub mod error;
pub mod lattice;
pub mod linalg;
pub mod isometry;
pub mod json;
pub mod k3;
pub mod kummer;
pub mod neighbors;
pub mod padic;

pub use error::{Error, Result};
pub use lattice::{EmbeddedLattice, Lattice};

/// Caps the worker threads used by parallel enumeration. Has an effect only
/// before the first parallel call, and only with the `parallel` feature.
pub fn configure_threads(n: usize) -> bool {
    #[cfg(feature = "parallel")]
    {
        rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global().is_ok()
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = n;
        false
    }
}
