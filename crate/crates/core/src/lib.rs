pub mod code;
pub mod cyclo;
pub mod error;
pub mod families;
pub mod gate;
pub mod gencoeff;
pub mod gf2;
pub mod hierarchy;
pub mod oracle;
pub mod synth;

pub use code::CssCode;
pub use cyclo::Cyclo;
pub use error::{Error, Result};
pub use gate::{DiagonalGate, LiftPolicy, LocalDiag};
pub use gf2::{BitMat, BitVec, Distance, Subspace};
