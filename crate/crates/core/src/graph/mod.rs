//! Degree sequences, Configuration Model constructions and reference graphs.

pub mod coupling;
pub mod degrees;
pub mod matching;
pub mod multigraph;

pub use coupling::{CoupledCM, RedrawRule};
pub use degrees::{sample_degrees, sample_raw_degrees, DegreeDistribution, DegreeSequence};
pub use matching::{build_cm_dynamic, build_cm_static, GrowthScheme, StubMatching};
pub use multigraph::{
    build_er, build_reference_graph, edge_set_difference, is_connected, MultiGraph, ReferenceFamily,
};
