//! Probabilistic sequence classification: exact, fuzzy and sd-DNNF belief
//! propagation through task automata, temperature calibration, oracle
//! noise, metrics, baselines and sweeps.

mod calibration;
mod engine;
mod metrics;
mod oracle;
mod sweep;

pub use calibration::{
    apply_temperature, apply_temperature_vector, calibrate_temperature, calibration_nll, Calibration, EPSILON,
};
pub use engine::{argmax, exact_step, BeliefState, Engine, EngineKind, Run, Step};
pub use metrics::{
    evaluate, mp_baselines, oracle_beliefs, semantic_loss, soft_xor, Evaluation, Metrics, THRESHOLD,
};
pub use oracle::{confidence_oracle, flip_oracle, OracleConfig, OracleKind, OracleTarget};
pub use sweep::{
    default_grid, oracle_sweep, read_report, summarize, sweep_seeds, write_report, OracleSetting, ReportRow, Stat,
    SummaryRow, DEFAULT_NOISE_LEVELS,
};
