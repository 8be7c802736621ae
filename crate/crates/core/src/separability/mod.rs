//! T-linear separability certificates and their data-space surfaces.

mod certify;
pub mod simplex;
mod surface;

pub use certify::{
    certify_partition, certify_t_linear, statistic_vectors, Certificate, CertificateTable, PairCertificate,
    Separation, MARGIN_THRESHOLD,
};
pub use surface::{decode_surface, proportionality_residual, DecodedSurface};
