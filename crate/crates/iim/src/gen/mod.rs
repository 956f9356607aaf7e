//! System generators: power-grid, geospatial interdependency, random.

pub mod geo;
pub mod power;
pub mod random;
