//! Shared fixtures for the pipeline benchmarks. Fixtures come from the
//! standard catalog so benchmark inputs track the shipped solutions.

use fastdiff_core::{catalog, Field, SampleSpec, SolutionEntry};

pub fn entry(id: &str) -> SolutionEntry {
    catalog::find(id).unwrap_or_else(|| panic!("catalog entry `{id}` exists"))
}

pub fn field(id: &str) -> Field {
    entry(id).field
}

/// Sampling spec over an entry's own domain, fixed seed.
pub fn sweep_spec(id: &str, count: usize) -> SampleSpec {
    SampleSpec::new(entry(id).default_domain, count, 0xBE7C).expect("valid spec")
}
