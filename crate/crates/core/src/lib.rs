#![no_std]
extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod constraints;
pub mod differential;
pub mod error;
pub mod kinematics;
pub mod linalg;
pub mod mechanism;
pub mod orientation;
pub mod workspace;
