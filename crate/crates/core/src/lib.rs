pub mod cm;
pub mod distributions;
pub mod error;
pub mod gamma;
pub mod id;
pub mod ks;
pub mod num;
pub mod quad;
pub mod special;
pub mod stable;
pub mod suite;
pub mod transforms;
