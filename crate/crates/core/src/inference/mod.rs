//! The adversary: exact likelihoods, center recovery, Metropolis sampling with
//! diagnostics, a grid-quadrature reference, and the posterior-MSE privacy score.

pub mod attack;
pub mod mcmc;
pub mod quadrature;
pub mod targets;

pub use attack::{attack, mse_of_draws, posterior_mse, posterior_oracle, AttackConfig, AttackMethod, AttackReport, MseDecomposition};
pub use mcmc::{
    effective_sample_size, mixed_sample, mixed_sample_nd, rwm_sample, rwm_sample_nd, split_rhat, ChainSet, IndependenceProposal,
    PosteriorSamples, SamplerConfig, GLOBAL_MOVE_PROB,
};
pub use quadrature::{grid_quadrature, oracle_quadrature, GridProposal, OracleSummary, QuadratureSummary, Window};
pub use targets::{recover_center, rr_log_posterior, tb_log_posterior, CenterEstimate, RandomRadiusTarget, TwoBallsTarget};
