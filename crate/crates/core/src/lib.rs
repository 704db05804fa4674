pub mod arith;
pub mod catalog;
pub mod cli;
pub mod coxeter;
pub mod diagrams;
pub mod fdeg;
pub mod finquot;
pub mod gamma;
pub mod hecke;
pub mod omega;
pub mod rootdata;
