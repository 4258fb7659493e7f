//! Cellular integrals on the moduli space `M_{0,8}`: exact coefficient
//! sums, their symmetry group, high-precision evaluation and asymptotics.

pub mod asymptotics;
pub mod exact;
pub mod graph;
pub mod group;
pub mod highprec;
pub mod params;
