pub mod binmaps;
pub mod cli;
pub mod counts;
pub mod families;
pub mod gateway;
pub mod homotopy;
pub mod linalg;
pub mod parse;
pub mod poly;
pub mod solio;
pub mod solver;
pub mod startsys;
pub mod tracker;
pub mod witness;
