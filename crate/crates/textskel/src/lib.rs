pub mod allocation;
pub mod corpus;
pub mod decoder;
pub mod frequency;
pub mod metrics;
pub mod rng;
pub mod strategies;
pub mod text;
pub mod semantic;
pub mod harness;
