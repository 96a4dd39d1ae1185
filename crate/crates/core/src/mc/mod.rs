//! Classical Monte Carlo model of the protocol: Gaussian modulation, the
//! beamsplitter channel, and Bob's homodyne or heterodyne outcomes.
//!
//! Eve's records hold her mode's quadrature values before any measurement.
//! A classical simulation cannot stand in for a collective measurement, so
//! this module only checks channel statistics and Shannon quantities.

mod dump;
mod moments;
mod sim;
mod validate;

pub use dump::{read_batch_csv, write_batch_csv, CsvRecord, BATCH_CSV_HEADER};
pub use moments::{
    conditional_variance, covariance, empirical_mi, estimate_moments, gaussian_mi,
    sample_variance, Estimate, MomentReport,
};
pub use sim::{
    simulate_batch, simulate_batch_capped, Detection, PulseRecord, Quadrature, SampleBatch,
    SimConfig, CHUNK_SIZE, DEFAULT_SAMPLE_CAP,
};
pub use validate::{validate_batch, validation_report, ValidationReport, ValidationRow, Z_FLAG};
