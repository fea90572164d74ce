//! File formats, corpus loading and the command line around
//! `centering-core`.

pub mod cli;
pub mod conll;
pub mod corpus;
pub mod manifest;
