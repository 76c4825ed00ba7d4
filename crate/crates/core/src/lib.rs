pub mod acceptance;
pub mod budget;
pub mod error;
pub mod exact;
pub mod families;
pub mod field;
pub mod fourier;
pub mod grassmannian;
pub mod pointsets;
pub mod projection;
pub mod report;
