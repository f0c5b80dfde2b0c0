pub mod analysis;
pub mod config;
pub mod error;
pub mod evolution;
pub mod linalg;
pub mod model;
pub mod observables;
pub mod output;
pub mod pipeline;
pub mod spin;
pub mod states;
