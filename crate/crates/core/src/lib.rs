pub mod bits;
pub mod dist;
pub mod error;
pub mod repr;
pub mod info;
pub mod codec;
pub mod prg;
pub mod learn;
pub mod experiment;
pub mod cli;
