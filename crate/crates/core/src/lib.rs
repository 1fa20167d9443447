//! Dataset license compliance analysis.
//!
//! The pipeline: record each dataset's and data source's [provenance], link
//! them into a [lineage] DAG, decompose each license into a
//! [`RightsVector`](rights::RightsVector) (directly or from a [catalog]
//! template), resolve the root's effective license with the restrictive-wins
//! [engine], and [assess](assessment) commercial usage scenarios against it.
//! Completed verifications can be cached in an [store::AnalysisStore].

pub mod assessment;
pub mod bundle;
pub mod catalog;
pub mod document;
pub mod engine;
pub mod lineage;
pub mod provenance;
pub mod rights;
pub mod store;
pub mod validation;

pub use assessment::assess;
pub use assessment::assess_all;
pub use assessment::default_scenarios;
pub use assessment::AssessmentTable;
pub use assessment::UsageScenario;
pub use catalog::Catalog;
pub use document::Strictness;
pub use engine::diff_rights;
pub use engine::verify;
pub use engine::NodeInterpretation;
pub use engine::Policy;
pub use engine::VerifiedLicense;
pub use lineage::build_lineage;
pub use lineage::compute_license_range;
pub use lineage::select_capture;
pub use lineage::LicenseRange;
pub use lineage::LineageGraph;
pub use provenance::validate_provenance;
pub use provenance::ProvenanceRecord;
pub use rights::validate_rights_vector;
pub use rights::Grant;
pub use rights::RightName;
pub use rights::RightsVector;
pub use store::analysis_key;
pub use store::AnalysisStore;
