//! Mobility analysis of closed 6R linkages via dual quaternion factorization.

pub mod diagram;
pub mod dualquat;
pub mod families;
pub mod highfloat;
pub mod linkage;
pub mod mobility;
pub mod quadpoly;
pub mod scalar;
pub mod surd;
pub mod tpoly;

pub use diagram::{conditions_for, evaluate, rigidity_certificate, validate, BondHypothesis, ConditionSystem, RigidityCertificate, Verdict};
pub use dualquat::{AlgebraError, DualQuaternion};
pub use families::{builtin_instance, membership, sample, Builtin, Family, FamilyError, Membership};
pub use highfloat::{HighFloat, F256};
pub use linkage::{
    parse_params, Closure, ConfigurationPoint, JointTransfer, LinkageError, LinkageParams, ParamDocument, RawParams,
};
pub use quadpoly::{far_bound, gcd_degree, quad_minus, quad_plus, resultant, BennettData, FarBound, QuadPoly, QuadSign};
pub use scalar::{Cplx, Scalar};
pub use surd::{Surd, SurdError};
