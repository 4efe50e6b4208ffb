//! Command-line front end, configuration and file formats for the wrist
//! kinematics library.

pub mod calibrate;
pub mod cli;
pub mod config;
pub mod error;
pub mod export;
pub mod format;
pub mod parallel;
pub mod report;
