//! Data binning for choropleth maps.
//!
//! A [`FeatureSeries`] goes into any of the classification methods in
//! [`methods`] and comes out as a [`BinningResult`]: extents, bin sizes and
//! a bin per feature. Around that sit consensus binning across methods,
//! paint-mode reclassification, a rules linter, CSV/GeoJSON ingestion,
//! profiling, palettes and exports.

pub mod api;
pub mod consensus;
pub mod data;
pub mod error;
pub mod export;
pub mod methods;
pub mod palette;
pub mod profile;
pub mod reclassify;
pub mod result;
pub mod rules;
pub mod series;
pub mod spec;

pub use consensus::{build_matrix, majority, value_by_alpha, ConsensusMatrix};
pub use data::{
    join, parse_attributes, parse_geometry, AttributeTable, Dataset, GeometryCollection, JoinReport,
};
pub use error::{Error, ErrorKind, Result};
pub use export::{export_result, ExportContext, ExportOptions, ExportTarget};
pub use methods::{
    box_plot, catalog, ckmeans, default_members, defined_interval, equal_interval,
    exponential_bin_sizes, geometric_interval, head_tail_breaks, manual_interval, maximum_breaks,
    natural_breaks, percentile, pretty_breaks, quantile, resiliency, run_all, run_method, sdcm,
    std_deviation, unclassed, MethodDescriptor,
};
pub use palette::{Palette, PaletteFilter, PaletteStore};
pub use profile::{profile, Profile};
pub use reclassify::{
    apply_pins, edit_breaks, misuse_warning, BreakEdit, CustomMethod, CustomMethodStore,
    PinConstraint, Provenance,
};
pub use result::{assign, BinningResult};
pub use rules::{validate_rules, RuleViolation};
pub use series::FeatureSeries;
pub use spec::{MethodId, MethodSpec, StdDevStep};
