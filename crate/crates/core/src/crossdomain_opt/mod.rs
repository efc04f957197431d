//! Cross-domain resource allocation.
//!
//! Each domain `k` receives a scalar allocation `R_k` in `[R_min, R_max]` and
//! earns a sigmoid utility. Domains share capacity-limited links (flow
//! `a_{l,k} R_k` per domain) and energy-consuming nodes. Isolated mode
//! maximizes `sum U_k` with every domain seeing each link on its own;
//! coupled mode subtracts the pairwise interaction terms over the coupling
//! graph and enforces the joint capacity rows.

mod derive;
mod error;
mod model;
mod optimize;
pub mod sample;

pub use derive::derive_coupling;
pub use error::OptError;
pub use model::{
    phi_utility, utility, ComponentWeights, CouplingEdge, CouplingGraph, CouplingSign,
    CouplingSpec, DomainId, DomainSpec, LinkId, Mode, NodeId, NodeLink, Scenario, ScenarioFile,
    SharedLink, SharedNode,
};
pub use optimize::{
    compare, optimize, optimize_with, outcome, start_points, ModeOutcome, OptimizationReport,
    OptimizationResult, OptimizerConfig, TracePoint,
};
