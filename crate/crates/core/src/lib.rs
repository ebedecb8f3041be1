pub mod bounds;
pub mod error;
pub mod factorization;
pub mod form;
pub mod group;
pub mod lattice;
pub mod matrix;
pub mod pairs;
pub mod ring;
pub mod sampling;
pub mod transvection;

pub use error::{Error, Result};
pub use factorization::{factorize, verify_certificate, FactorizationCertificate, FactorizationInput};
pub use form::{NonsingularityCertificate, QuadraticModule, SearchBounds, Unimodularity};
pub use group::{DihedralWord, FiniteGroup, Group, GroupElement, Letter};
pub use matrix::{Matrix, ModuleVector};
pub use ring::{Coefficient, RingElement, UnitaryRing};
pub use transvection::{compose, compose_matrices, verify_isometry, IsometryReport, Transvection};
