pub mod category;
pub mod cli;
pub mod diagram;
pub mod error;
pub mod frobenius;
pub mod fusion_ring;
pub mod io;
pub mod library;
mod linalg;
pub mod network;
pub mod observables;
pub mod rep;
pub mod report;
