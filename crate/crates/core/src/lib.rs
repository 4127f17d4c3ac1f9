//! Unipotent conjugation orbits in `M_2(R)` and the quaternion ring `H(R)`
//! over finite commutative local principal rings `R` of odd order.

pub mod atlas;
pub mod census;
pub mod classify;
pub mod enumerate;
pub mod error;
pub mod literal;
pub mod mat2;
pub mod quat;
pub mod ring;
pub mod selftest;

pub use classify::{Classifier, OrbitClass, OrbitType};
pub use enumerate::{partition_all, MatKey, OrbitPartition, PartitionOptions};
pub use error::{Error, Result};
pub use mat2::{ElementaryWord, Factor, Mat, MatRing};
pub use quat::{Quat, QuatMatIso, QuatRing};
pub use ring::{Elem, Family, Ring, RingSpec};
