#![allow(dead_code)]

pub mod gradcheck;
pub mod magnus;
pub mod table;
