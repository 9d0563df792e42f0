//! Per-iteration records and the shared run controls.

use std::fmt;

use crate::oracle::OracleSuite;
use crate::scalar::Scalar;
use crate::vector::Vector;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Converged,
    BudgetExhausted,
    EarlyStopped,
    Diverged,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Converged => "converged",
            Status::BudgetExhausted => "budget_exhausted",
            Status::EarlyStopped => "early_stopped",
            Status::Diverged => "diverged",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "converged" => Status::Converged,
            "budget_exhausted" => Status::BudgetExhausted,
            "early_stopped" => Status::EarlyStopped,
            "diverged" => Status::Diverged,
            _ => return None,
        })
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceRow<F> {
    pub iter: usize,
    pub x: Option<Vector<F>>,
    pub f_value: F,
    pub f_gap: Option<F>,
    pub dist_to_opt: Option<F>,
    /// Norm of the (sub)gradient the method actually used, noisy if the oracle is.
    pub grad_norm: Option<F>,
    pub step_size: F,
    pub oracle_calls: u64,
    /// `||x^k − x⁰||`
    pub dist_from_start: F,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trace<F> {
    pub rows: Vec<TraceRow<F>>,
    pub status: Status,
}

impl<F: Scalar> Trace<F> {
    pub fn last(&self) -> Option<&TraceRow<F>> {
        self.rows.last()
    }

    pub fn first(&self) -> Option<&TraceRow<F>> {
        self.rows.first()
    }

    pub fn final_gap(&self) -> Option<F> {
        self.last().and_then(|r| r.f_gap)
    }

    pub fn final_dist(&self) -> Option<F> {
        self.last().and_then(|r| r.dist_to_opt)
    }

    /// Number of the last recorded iteration.
    pub fn iterations(&self) -> usize {
        self.last().map_or(0, |r| r.iter)
    }

    pub fn gaps(&self) -> Vec<Option<F>> {
        self.rows.iter().map(|r| r.f_gap).collect()
    }
}

/// Result of a run: the reported point and its trace.
#[derive(Clone, Debug)]
pub struct Outcome<F> {
    pub x: Vector<F>,
    pub trace: Trace<F>,
}

/// Recording and safety settings common to every method.
#[derive(Clone, Debug, PartialEq)]
pub struct RunControl<F> {
    /// Record every `k`-th iteration; the first and last are always kept.
    pub record_every: usize,
    pub record_x: bool,
    pub max_oracle_calls: Option<u64>,
    /// Diverged once `||x^k − x⁰||` exceeds this.
    pub divergence_radius: F,
}

impl<F: Scalar> Default for RunControl<F> {
    fn default() -> Self {
        Self {
            record_every: 1,
            record_x: false,
            max_oracle_calls: None,
            divergence_radius: F::lit(1e6),
        }
    }
}

impl<F: Scalar> RunControl<F> {
    pub fn with_record_x(mut self, on: bool) -> Self {
        self.record_x = on;
        self
    }

    pub fn with_record_every(mut self, every: usize) -> Self {
        self.record_every = every.max(1);
        self
    }

    pub fn with_divergence_radius(mut self, r: F) -> Self {
        self.divergence_radius = r;
        self
    }

    pub fn with_max_oracle_calls(mut self, calls: u64) -> Self {
        self.max_oracle_calls = Some(calls);
        self
    }

    /// Whether spending `cost` more calls would exceed the budget.
    pub fn would_exceed<G: Scalar>(&self, suite: &OracleSuite<G>, cost: u64) -> bool {
        self.max_oracle_calls
            .is_some_and(|cap| suite.total_calls() + cost > cap)
    }
}

/// Builds a [`Trace`], subsampling rows while always keeping the final one.
pub struct Recorder<F: Scalar> {
    x0: Vector<F>,
    control: RunControl<F>,
    rows: Vec<TraceRow<F>>,
    pending: Option<TraceRow<F>>,
}

impl<F: Scalar> Recorder<F> {
    pub fn new(x0: &Vector<F>, control: &RunControl<F>) -> Self {
        Self {
            x0: x0.clone(),
            control: control.clone(),
            rows: Vec::new(),
            pending: None,
        }
    }

    /// Builds the row for iterate `x` and keeps it if `iter` is on the recording grid.
    /// Returns `||x − x⁰||`.
    pub fn push(
        &mut self,
        suite: &OracleSuite<F>,
        iter: usize,
        x: &Vector<F>,
        f_value: F,
        grad_norm: Option<F>,
        step_size: F,
    ) -> F {
        let dist_from_start = x.dist(&self.x0);
        let row = TraceRow {
            iter,
            x: self.control.record_x.then(|| x.clone()),
            f_value,
            f_gap: suite.fstar.map(|fs| f_value - fs),
            dist_to_opt: suite.dist_to_opt(x),
            grad_norm,
            step_size,
            oracle_calls: suite.total_calls(),
            dist_from_start,
        };
        let keep = self.rows.is_empty() || iter.is_multiple_of(self.control.record_every);
        if keep {
            self.rows.push(row);
            self.pending = None;
        } else {
            self.pending = Some(row);
        }
        dist_from_start
    }

    /// Revise the most recent row, e.g. once the gradient at that point is known.
    pub fn amend_last(&mut self, f: impl FnOnce(&mut TraceRow<F>)) {
        if let Some(p) = self.pending.as_mut() {
            f(p);
        } else if let Some(r) = self.rows.last_mut() {
            f(r);
        }
    }

    pub fn diverged(&self, dist_from_start: F, f_value: F) -> bool {
        !f_value.is_finite()
            || !dist_from_start.is_finite()
            || dist_from_start > self.control.divergence_radius
    }

    pub fn len(&self) -> usize {
        self.rows.len() + usize::from(self.pending.is_some())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn finish(mut self, status: Status) -> Trace<F> {
        if let Some(p) = self.pending.take() {
            self.rows.push(p);
        }
        Trace {
            rows: self.rows,
            status,
        }
    }
}
