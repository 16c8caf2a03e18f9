pub mod burnup;
pub mod hfclock;
pub mod ladder;
pub mod nuclide;
pub mod rng;
pub mod scenario;
pub mod separation;
pub mod stats;
