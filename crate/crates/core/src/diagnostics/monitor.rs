//! Observers that can be plugged into any solver run.

use super::certificate::GapSample;
use super::ergodic::ErgodicAccumulator;
use super::gaps::{gap, primal_gap};
use super::record::IterationRecord;
use crate::error::{Error, Result};
use crate::problems::SaddleProblem;
use crate::solvers::IterationView;
use crate::vecops;

/// Keeps every record (or every `every`-th one plus `k = 1`).
#[derive(Debug, Clone)]
pub struct TraceRecorder {
    every: usize,
    records: Vec<IterationRecord>,
}

impl Default for TraceRecorder {
    fn default() -> Self {
        Self::new(1)
    }
}

impl TraceRecorder {
    pub fn new(every: usize) -> Self {
        Self {
            every: every.max(1),
            records: Vec::new(),
        }
    }

    pub fn observe(&mut self, view: &IterationView<'_>) {
        let k = view.record.k;
        if k == 1 || k.is_multiple_of(self.every) || view.next.is_none() {
            self.records.push(view.record.clone());
        }
    }

    /// Adds the record of the final iteration if sampling skipped it.
    pub fn push_final(&mut self, record: &IterationRecord) {
        if self.records.last().map(|r| r.k) != Some(record.k) {
            self.records.push(record.clone());
        }
    }

    pub fn records(&self) -> &[IterationRecord] {
        &self.records
    }

    pub fn into_records(self) -> Vec<IterationRecord> {
        self.records
    }
}

/// Tracks the ergodic averages `(X_k, Y_k)` and samples the gap at the
/// reference saddle point on a fixed schedule of iteration counts.
///
/// The first error (out-of-order record, negative weight, ...) is kept and
/// returned by [`ErgodicGapMonitor::finish`].
#[derive(Debug)]
pub struct ErgodicGapMonitor<'a> {
    problem: &'a SaddleProblem,
    acc: ErgodicAccumulator,
    schedule: Vec<usize>,
    samples: Vec<GapSample>,
    x1: Option<Vec<f64>>,
    y1: Option<Vec<f64>>,
    error: Option<Error>,
}

impl<'a> ErgodicGapMonitor<'a> {
    pub fn new(problem: &'a SaddleProblem, mut schedule: Vec<usize>) -> Result<Self> {
        if problem.reference.is_none() {
            return Err(Error::Missing("reference solution for gap monitoring"));
        }
        schedule.sort_unstable();
        schedule.dedup();
        Ok(Self {
            problem,
            acc: ErgodicAccumulator::new(problem.primal_dim(), problem.dual_dim()),
            schedule,
            samples: Vec::new(),
            x1: None,
            y1: None,
            error: None,
        })
    }

    /// Powers of two up to `max_k`.
    pub fn dyadic_schedule(max_k: usize) -> Vec<usize> {
        std::iter::successors(Some(1usize), |k| k.checked_mul(2))
            .take_while(|&k| k <= max_k)
            .collect()
    }

    pub fn observe(&mut self, view: &IterationView<'_>) {
        if self.error.is_some() {
            return;
        }
        if let Err(e) = self.try_observe(view) {
            self.error = Some(e);
        }
    }

    fn try_observe(&mut self, view: &IterationView<'_>) -> Result<()> {
        let r = view.record;
        if r.k == 1 {
            self.x1 = Some(view.x.to_vec());
            self.y1 = Some(view.y.to_vec());
        }
        let Some((_, y_next)) = view.next else {
            return Ok(());
        };
        let theta = r.theta.ok_or(Error::Missing("theta in iteration record"))?;
        self.acc.update(r.k, r.tau, theta, view.x, y_next)?;
        if self.schedule.binary_search(&r.k).is_ok() {
            let reference = self.problem.reference.as_ref().expect("checked in new");
            let g = gap(
                self.problem,
                &reference.x,
                &reference.y,
                &self.acc.x_bar(),
                &self.acc.y_bar(),
            )?;
            self.samples.push(GapSample {
                k: r.k,
                weight_sum: self.acc.weight_sum(),
                gap: g,
            });
        }
        Ok(())
    }

    pub fn x1(&self) -> Option<&[f64]> {
        self.x1.as_deref()
    }

    pub fn y1(&self) -> Option<&[f64]> {
        self.y1.as_deref()
    }

    pub fn accumulator(&self) -> &ErgodicAccumulator {
        &self.acc
    }

    pub fn finish(self) -> Result<Vec<GapSample>> {
        match self.error {
            Some(e) => Err(e),
            None => Ok(self.samples),
        }
    }
}

/// Records `(k, energy_k)` and the early iterates needed for the constant
///
/// ```text
/// M_2 = ||x_2 - x*||^2 + (1/beta + T) ||y_2 - y*||^2 + 1/2 ||x_2 - x_1||^2 + 2 tau_1 P_{x*,y*}(x_1)
/// ```
#[derive(Debug, Clone, Default)]
pub struct EnergyMonitor {
    energies: Vec<(usize, f64)>,
    x1: Option<Vec<f64>>,
    x2: Option<Vec<f64>>,
    y2: Option<Vec<f64>>,
    tau1: Option<f64>,
}

impl EnergyMonitor {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn observe(&mut self, view: &IterationView<'_>) {
        let r = view.record;
        if let Some(e) = r.energy {
            self.energies.push((r.k, e));
        }
        match r.k {
            1 => {
                self.x1 = Some(view.x.to_vec());
                self.tau1 = Some(r.tau);
            }
            2 => {
                self.x2 = Some(view.x.to_vec());
                self.y2 = Some(view.y.to_vec());
            }
            _ => {}
        }
    }

    pub fn energies(&self) -> &[(usize, f64)] {
        &self.energies
    }

    pub fn m2(&self, problem: &SaddleProblem, beta: f64, big_t: f64) -> Result<f64> {
        let reference = problem
            .reference
            .as_ref()
            .ok_or(Error::Missing("reference solution for the energy constant"))?;
        let missing = || Error::Missing("iterates x_1, x_2, y_2 (run shorter than two iterations)");
        let x1 = self.x1.as_ref().ok_or_else(missing)?;
        let x2 = self.x2.as_ref().ok_or_else(missing)?;
        let y2 = self.y2.as_ref().ok_or_else(missing)?;
        let tau1 = self.tau1.ok_or_else(missing)?;
        let p = primal_gap(problem, &reference.x, &reference.y, x1)?;
        Ok(vecops::dist_sq(x2, &reference.x)
            + (1.0 / beta + big_t) * vecops::dist_sq(y2, &reference.y)
            + 0.5 * vecops::dist_sq(x2, x1)
            + 2.0 * tau1 * p)
    }
}
