pub mod acquire;
pub mod config;
pub mod filter;
pub mod metrics;
pub mod packaging;
pub mod pipeline;
pub mod property;
pub mod resolve;
pub mod syntax;
pub mod transform;
