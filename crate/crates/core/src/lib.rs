//! Interval projections and inertia moments of planar self-similar sets.

pub mod error;
pub mod examples;
pub mod exec;
pub mod ifs;
pub mod linalg;
pub mod maxplus;
pub mod moments;
pub mod projection;
pub mod render;
pub mod report;
pub mod scalar;
pub mod scan;
pub mod witness;
