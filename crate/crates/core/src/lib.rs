//! Pinning of lines by collections of balls and screens.

pub mod balls;
pub mod exact;
pub mod geometry;
pub mod linespace;
pub mod lp;
pub mod optim;
pub mod pattern2d;
pub mod sampling;
pub mod engine;
