pub mod classify;
pub mod cli;
pub mod cyclotomic;
pub mod floer;
pub mod formats;
pub mod group;
pub mod intlat;
pub mod laurent;
pub mod monodromy;
pub(crate) mod qlinalg;
pub(crate) mod ser;
pub mod toric;
pub mod torussym;
