//! Campaign runner behind the `cmcsplit` binary: configuration, instance
//! construction, the verification campaigns, reports, fixtures and shrinking.

pub mod campaign;
pub mod config;
pub mod fixture;
pub mod instance;
pub mod report;
