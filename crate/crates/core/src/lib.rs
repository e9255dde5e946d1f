pub mod error;
pub mod family;
pub mod fspace;
pub mod budget;
pub mod bundled;
pub mod curve;
pub mod gf;
pub mod lfunction;
pub mod padic;
pub mod phi_nabla;
pub mod polygon;
pub mod selftest;
pub mod series;

pub use error::{Error, Result};
pub use gf::{Fe, Gf};
pub use padic::{Embedding, Frobenius, Matrix, Ring, RingSpec, Val, WittElement, WittMatrix};
pub use polygon::{NewtonPolygon, PointValue};
pub use fspace::FSpace;
pub use series::{Series, TruncSeriesRing};
pub use phi_nabla::{CertStatus, ExtractOptions, GenericCertificate, PhiNablaModule};
pub use curve::{ClosedPoint, CurveModel};
pub use family::{CrystalFamily, LocalFactor};
