#![allow(dead_code)]

pub mod gen;
pub mod listings;
pub mod script;
