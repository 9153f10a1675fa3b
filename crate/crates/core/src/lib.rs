pub mod action;
pub mod checker;
pub mod dot;
pub mod error;
pub mod expectation;
pub mod formula;
pub mod io;
pub mod model;
pub mod product;
pub mod rational;
pub mod reduction;
pub mod scenarios;
pub mod submodel;
pub mod symbol;
pub mod verify;
