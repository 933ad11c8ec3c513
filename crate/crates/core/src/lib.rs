pub mod casebook;
pub mod cli;
pub mod expr;
pub mod jet;
pub mod maxsym;
pub mod noether;
pub mod transform;
