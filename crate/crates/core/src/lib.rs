#![no_std]
extern crate alloc;

pub mod algebra;
pub mod classify2;
pub mod enveloping;
pub mod error;
pub mod linalg;
pub mod matrix;
pub mod normal_form;
pub mod period;
pub mod permutation;
pub mod scalar;
pub mod special;
