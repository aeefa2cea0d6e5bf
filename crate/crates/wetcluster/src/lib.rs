//! Planar weighted minimal-cluster solver with a small unpenalized
//! "wetting" region.
//!
//! The library computes minimizers of the weighted perimeter energy
//! `F(S) = sum_l c_l P(S_l)` over partitions of the unit disk into chambers
//! `S_1..S_N` plus a free region `G` of area at most `delta`, with chamber
//! labels prescribed on the boundary circle. It has four layers:
//!
//! - exact arc geometry ([`geom`]) and the arc-level cluster model
//!   ([`cluster`]),
//! - a dry (`delta = 0`) network solver over straight-segment topologies
//!   ([`dry`]) and the closed-form wetted perturbation of its triple
//!   junctions ([`wetting`]),
//! - an independent lattice optimizer with a Cauchy-Crofton perimeter
//!   estimate ([`lattice`]), used as a brute-force oracle,
//! - structure checks that compare the two against each other
//!   ([`verify`]).
//!
//! Entry points for batch runs (instance files, artifact output, SVG
//! rendering) live in [`pipeline`]; the `wetcluster` binary is a thin
//! front-end over it. Each major capability also has a runnable example
//! under `examples/`.

pub mod cluster;
pub mod dry;
pub mod geom;
pub mod lattice;
pub mod pipeline;
pub mod svg;
pub mod verify;
pub mod wetting;

#[cfg(test)]
pub(crate) mod testutil {
    /// Minimal deterministic generator for seeded-loop tests.
    pub struct TestRng(u64);

    pub fn seeded(seed: u64) -> TestRng {
        TestRng(seed.wrapping_mul(0x9E3779B97F4A7C15).max(1))
    }

    impl TestRng {
        pub fn next_u64(&mut self) -> u64 {
            // xorshift64*
            let mut x = self.0;
            x ^= x >> 12;
            x ^= x << 25;
            x ^= x >> 27;
            self.0 = x;
            x.wrapping_mul(0x2545F4914F6CDD1D)
        }

        pub fn f64_in(&mut self, lo: f64, hi: f64) -> f64 {
            let u = (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
            lo + u * (hi - lo)
        }
    }
}

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid arc: {0}")]
    InvalidArc(String),
    #[error("invalid chain: {0}")]
    InvalidChain(String),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("solver failed: {0}")]
    Solver(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
