//! Signed block beta-model: joint community detection and per-node
//! heterogeneity estimation for signed networks under strong/weak balance.
//!
//! A signed network stores +1/-1/0 entries for friendly, hostile and absent
//! ties. The model gives every node four log-odds parameters — positive and
//! negative tendencies within its own community (`beta± = gamma± + eta±`)
//! and across communities (`gamma±`) — and a community label. Fitting
//! alternates a projected-gradient solve of the convex continuous
//! subproblem with discrete per-node label updates.
//!
//! Modules:
//! - [`model`]: domain types and the parameter → log-odds → probability maps;
//! - [`likelihood`]: the normalized objective and its analytic gradient;
//! - [`projection`]: feasible-set projection and the K=2 gauge fix;
//! - [`fitter`]: spectral initialization, the SPG solver, label updates,
//!   the alternating loop and BIC selection of the community count;
//! - [`generators`]: seeded synthetic benchmark families;
//! - [`evaluation`]: partition/probability metrics, triad census, signed
//!   modularity and population balance checkers.

pub mod error;
pub mod evaluation;
pub mod fitter;
pub mod generators;
pub mod likelihood;
pub mod model;
pub mod projection;
pub mod rng;

pub use error::{Error, Result};
pub use evaluation::{
    check_balance_population, clustering_error, membership_error, prob_error, signed_modularity,
    slp_baseline, triad_census, BalanceClass, BalanceVerdict, BalanceWitness, TriadCensus,
};
pub use fitter::{
    bic_value, fit, label_update_batch, label_update_sequential, select_k_bic, spectral_init,
    spg_solve, FitConfig, FitReport, KCandidate, KSelection, SpgConfig,
};
pub use generators::{
    gen_example1, gen_example2, gen_example3, sample_sbbm, Example1Config, Example23Config,
    GroundTruth, SampleOutput,
};
pub use likelihood::{gradient, nll, nll_of_params, Gradient, NllValue};
pub use model::{
    build_theta, prob_matrices, prob_triple, DiagonalPolicy, Membership, NodeParams, ProbTriple,
    SignedAdjacency, ThetaPair,
};
pub use projection::{gauge_fix_k2, project_all, project_node, FeasibleSpec};
