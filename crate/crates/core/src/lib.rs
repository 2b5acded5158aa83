pub mod cli;
pub mod decide;
pub mod error;
pub mod exponents;
pub mod numeric;
pub mod profile;
pub mod ratlinalg;
pub mod selftest;
