//! Random instances, exhaustive stable-set enumeration, price-of-anarchy
//! measurement, sweeps and the property suite.

pub mod enumerate;
pub mod poa;
pub mod props;
pub mod random;
pub mod sweep;

pub use enumerate::{enumerate_concepts, enumerate_stable, EnumerateOptions, EnumerationLimits, StableSet};
pub use poa::{bound_checks, poa_point, poa_run, BoundCheck, PoaOptions, PoaPoint, PoaRun};
pub use props::{property_suite, PropertyResult, PropsConfig, PropsReport};
pub use random::{random_instance, RandomModel};
pub use sweep::{poa_sweep, SweepConfig, SweepFamily, SweepReport, SweepRow};
