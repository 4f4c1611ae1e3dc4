//! Super-isolated abelian varieties over prime fields.
//!
//! Elliptic curves of prime order whose isogeny class is a single
//! isomorphism class, and Weil numbers of abelian surfaces with the same
//! property, found by exact enumeration over quartic CM fields of class
//! number one.

pub mod arith;
pub mod cm;
pub mod ec;
pub mod quadratic;
pub mod weil;

pub use arith::{is_prime, split_near_prime, NearPrimeSplit, PrimalityPolicy};
pub use cm::{CmField, Registry, SearchPolynomials};
pub use ec::{CurveFamily, SuperIsolatedCurveRecord, WeierstrassCurve};
pub use quadratic::{BinaryQF, RealQuadElement, RealQuadIdeal};
pub use weil::{BoundCertificate, SuperIsolatedWeilRecord, WeilSearchParams};
