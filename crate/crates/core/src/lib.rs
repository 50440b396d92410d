pub mod acceptance;
pub mod catalog;
pub mod kasteleyn;
pub mod lattice;
pub mod linalg;
pub mod modlab;
pub mod ncalg;
pub mod oracle;
pub mod render;
pub mod sampler;
pub mod scalar;
pub mod tiling;
