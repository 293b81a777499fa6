//! Measurable consequences of the convergence theory: gaps, ergodic averages,
//! Lyapunov energies, rate certificates, plus image-quality metrics.

mod certificate;
mod ergodic;
mod gaps;
mod image;
mod monitor;
mod record;

pub use certificate::{
    gap_bound_check, linear_rate_check, GapBoundParams, GapBoundReport, GapSample, LinearRateReport, RateCertificate,
};
pub use ergodic::ErgodicAccumulator;
pub use gaps::{dual_gap, gap, primal_gap};
pub use image::{psnr, ssim, SSIM_K1, SSIM_K2, SSIM_WINDOW};
pub use monitor::{EnergyMonitor, ErgodicGapMonitor, TraceRecorder};
pub use record::IterationRecord;
