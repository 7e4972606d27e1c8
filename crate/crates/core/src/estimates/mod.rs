//! Runtime monitors for the energy and enstrophy inequalities, plus the
//! convergence-rate harness.

mod convergence;
mod dt_monitor;
mod hgamma;
mod identities;
mod ledger;
pub mod quadrature;

pub use convergence::{convergence_study, cosine_ubar_error, ubar_error_l2q, ConvergenceReport};
pub use dt_monitor::{dt_u_monitor, dt_u_monitor_snapshots, DtMonitor, DtMonitorSample};
pub use hgamma::{hgamma_diagnostic, hgamma_kernel, hgamma_scalar, HGammaDiagnostic};
pub use identities::{
    average_cs_check, energy_identity_residual, grad_vorticity_check, integrate,
    ladyzhenskaya_ratio, TimeRule, R3_LADYZHENSKAYA_CONSTANT,
};
pub use ledger::{enstrophy_ledger, gronwall_bound, EstimateLedger, LedgerRow};
