//! Exact stability, wall-and-chamber structure and pointed-curve moduli for
//! the quivers `Q_n` and `P_n`.
pub mod catalog;
pub mod chambers;
pub mod configs;
pub mod curves;
pub mod error;
pub mod exec;
pub mod index;
pub mod limits;
pub mod lp;
pub mod projline;
pub mod quiverwt;
pub mod verify;

pub use error::{Error, Result};
