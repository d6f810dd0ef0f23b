//! Numerical verification of entropic inequalities and continuity bounds on
//! random finite-dimensional states, channels and ensembles.

pub mod channel;
pub mod random;
pub mod state;
pub mod suite;
pub mod transport;

pub use channel::{
    channel_ci, channel_mi, channel_mi_purified, holevo, holevo_quantity, privacy, privacy_qc, DiscreteEnsemble,
    KrausChannel,
};
pub use random::{energy_cap, energy_cap_first, perturb, random_channel, random_state};
pub use state::{cmi, cond_entropy, entropy, partial_trace, qcmi, trace_distance, DensityMatrix};
pub use suite::{run_all, run_suite, tightness_report, Suite, SuiteConfig, SuiteReport, TightnessRow};
pub use transport::{d0_distance, kantorovich, transport};
