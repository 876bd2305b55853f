//! Frenet apparatus of timelike curves in semi-Euclidean spaces, curve
//! synthesis from prescribed curvatures, and Bertrand-type mate analysis in
//! `E^2_1`, `E^3_1` and `E^4_2`.

pub mod curve_dsl;
pub mod pseudo_linalg;
pub mod frenet_engine;
pub mod curve_synth;
pub mod bertrand;
pub mod cli_reports;
