//! Sampling operators on the circle and the line, Banach-lattice norms,
//! Steklov-type smoothness measures and the experiment harness that checks
//! direct, inverse and strong-converse approximation estimates numerically.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod function;
pub mod harness;
pub mod lp;
pub mod norms;
pub mod quadrature;
pub mod sampling;
pub mod smoothness;
pub mod solvers;
pub mod steklov;
pub mod trig;

pub use error::{Error, Result};
pub use function::{
    build_cache, corpus, corpus_entry, make_jittered_nodes, make_uniform_nodes, DenseGridCache, NodeSet, PointwiseFunction,
};
pub use harness::{
    counterexample_run, equivalence_study, mz_probe, probe_assumptions, rate_study, EquivTable, ProbeReport, RateFit,
    Theorem,
};
pub use norms::{dilation_norm, discrete_seminorm, norm, NormSpec, StepFunction, Young};
pub use num_complex::Complex64;
pub use sampling::{Family, SamplingOperatorSpec};
pub use smoothness::{classical_modulus, kfunc_vp, omega2_star, realization, semidiscrete_modulus, ModulusReport};
pub use solvers::{besov_sum, best_approx, lemder_check, one_sided_best, BestApproxResult, OneSidedResult};
pub use steklov::{SteklovOps, SteklovPlan};
pub use trig::{analyze, apply_window, kernel_eval, partial_sum, vp_mean, TrigPoly, Window};

/// Library version, echoed into experiment summaries.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
