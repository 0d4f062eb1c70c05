//! Multiplicative search for a workable count threshold or grid step.
//!
//! The threshold that separates "real" structure from background is not known
//! up front. The search starts somewhere (a thousand, say), checks how many
//! balls clear it, and multiplies or divides by a fixed factor until the
//! retained count lands in `[k_min, k_max]`. Two termination rules keep it
//! honest:
//!
//! - the moment the search direction would reverse, the multiplicative grid
//!   provably has no in-range point, so it stops and returns the best probe
//!   seen before the reversal;
//! - a step budget bounds the walk, returning the probe whose retained count
//!   came closest to the target range (ties toward the smaller parameter).
//!
//! Every probe is recorded in a trace so a run can be audited afterwards.

use serde::{Deserialize, Serialize};

use crate::geometry::Dataset;
use crate::gridscan::{density_table, threshold_k, DensityOpts, DensityTable};
use crate::{Error, Result};

/// Acceptable range for the number of retained balls, plus search controls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TuneBounds {
    pub k_min: usize,
    pub k_max: usize,
    pub max_steps: usize,
    /// Multiplicative step; 10 suits the integer threshold, 2 suits the
    /// continuous grid step (where 10x jumps overshoot).
    pub factor: f64,
}

impl TuneBounds {
    pub const DEFAULT_K_MIN: usize = 5;
    pub const DEFAULT_K_MAX: usize = 100;
    pub const DEFAULT_MAX_STEPS: usize = 20;
    pub const THRESHOLD_FACTOR: f64 = 10.0;
    pub const RADIUS_FACTOR: f64 = 2.0;

    /// Defaults for threshold search.
    pub fn for_threshold() -> TuneBounds {
        TuneBounds {
            k_min: Self::DEFAULT_K_MIN,
            k_max: Self::DEFAULT_K_MAX,
            max_steps: Self::DEFAULT_MAX_STEPS,
            factor: Self::THRESHOLD_FACTOR,
        }
    }

    /// Defaults for grid-step search.
    pub fn for_radius() -> TuneBounds {
        TuneBounds {
            factor: Self::RADIUS_FACTOR,
            ..Self::for_threshold()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.k_min == 0 || self.k_min > self.k_max {
            return Err(Error::InvalidParam {
                name: "k_min/k_max",
                reason: format!("need 1 <= k_min <= k_max, got {}..{}", self.k_min, self.k_max),
            });
        }
        if !(self.factor.is_finite() && self.factor > 1.0) {
            return Err(Error::InvalidParam {
                name: "factor",
                reason: format!("must be > 1, got {}", self.factor),
            });
        }
        if self.max_steps == 0 {
            return Err(Error::InvalidParam {
                name: "max_steps",
                reason: "must be >= 1".into(),
            });
        }
        Ok(())
    }

    fn distance(&self, k: usize) -> usize {
        if k > self.k_max {
            k - self.k_max
        } else {
            self.k_min.saturating_sub(k)
        }
    }
}

/// How a search ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TuneOutcome {
    /// A probe landed inside `[k_min, k_max]`.
    InRange,
    /// The threshold reached 1 with still too few balls retained.
    FloorReached,
    /// The search direction reversed: no point of the multiplicative grid is
    /// in range.
    NoneInRange,
    /// The step budget ran out on one side of the range.
    StepsExhausted,
}

/// Result of a threshold search.
#[derive(Debug, Clone, Serialize)]
pub struct ThresholdTune {
    pub nu: usize,
    pub k: usize,
    /// Every `(nu, K)` probe in order.
    pub trace: Vec<(usize, usize)>,
    pub outcome: TuneOutcome,
}

/// Result of a grid-step search.
#[derive(Debug, Clone, Serialize)]
pub struct RadiusTune {
    pub r: f64,
    pub k: usize,
    #[serde(skip)]
    pub table: DensityTable,
    pub trace: Vec<(f64, usize)>,
    pub outcome: TuneOutcome,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Need {
    /// K below range: loosen (smaller threshold / larger step).
    Loosen,
    /// K above range: tighten (larger threshold / smaller step).
    Tighten,
}

fn best_probe<T: Copy + PartialOrd>(probes: &[(T, usize)], bounds: &TuneBounds) -> (T, usize) {
    let mut best = probes[0];
    for &(p, k) in &probes[1..] {
        let (bd, d) = (bounds.distance(best.1), bounds.distance(k));
        if d < bd || (d == bd && p < best.0) {
            best = (p, k);
        }
    }
    best
}

/// Search for a threshold whose retained-ball count lands in
/// `[k_min, k_max]`, starting from `nu0` and stepping by `bounds.factor`.
pub fn adapt_threshold(
    table: &DensityTable,
    nu0: usize,
    bounds: &TuneBounds,
) -> Result<ThresholdTune> {
    bounds.validate()?;
    if nu0 == 0 {
        return Err(Error::InvalidParam {
            name: "nu0",
            reason: "must be >= 1".into(),
        });
    }
    if table.is_empty() {
        return Err(Error::EmptyTable);
    }

    let mut trace: Vec<(usize, usize)> = Vec::new();
    let mut direction: Option<Need> = None;
    let mut nu = nu0;
    loop {
        let k = threshold_k(table, nu);
        trace.push((nu, k));
        if (bounds.k_min..=bounds.k_max).contains(&k) {
            return Ok(ThresholdTune {
                nu,
                k,
                trace,
                outcome: TuneOutcome::InRange,
            });
        }
        let needed = if k < bounds.k_min {
            Need::Loosen
        } else {
            Need::Tighten
        };
        match direction {
            None => direction = Some(needed),
            Some(d) if d != needed => {
                let (nu, k) = best_probe(&trace[..trace.len() - 1], bounds);
                return Ok(ThresholdTune {
                    nu,
                    k,
                    trace,
                    outcome: TuneOutcome::NoneInRange,
                });
            }
            _ => {}
        }
        if trace.len() >= bounds.max_steps {
            let (nu, k) = best_probe(&trace, bounds);
            return Ok(ThresholdTune {
                nu,
                k,
                trace,
                outcome: TuneOutcome::StepsExhausted,
            });
        }
        nu = match needed {
            Need::Loosen => {
                if nu == 1 {
                    return Ok(ThresholdTune {
                        nu: 1,
                        k,
                        trace,
                        outcome: TuneOutcome::FloorReached,
                    });
                }
                // Round to the nearest integer but always make progress.
                (((nu as f64 / bounds.factor).round() as usize).max(1)).min(nu - 1)
            }
            Need::Tighten => (((nu as f64 * bounds.factor).round()) as usize).max(nu + 1),
        };
    }
}

/// Search for a grid step whose retained-ball count at threshold `nu` lands
/// in `[k_min, k_max]`, rebuilding the density table at every probe.
pub fn adapt_radius(
    dataset: &Dataset,
    r0: f64,
    nu: usize,
    radius_scale: f64,
    bounds: &TuneBounds,
) -> Result<RadiusTune> {
    bounds.validate()?;
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if !(r0.is_finite() && r0 > 0.0) {
        return Err(Error::InvalidGridStep(r0));
    }
    let opts = DensityOpts {
        radius_scale,
        ..DensityOpts::default()
    };
    let build = |r: f64| density_table(dataset, r, &opts);

    let mut trace: Vec<(f64, usize)> = Vec::new();
    let mut direction: Option<Need> = None;
    let mut r = r0;
    let mut table = build(r)?;
    let finish = |r: f64,
                  k: usize,
                  trace: Vec<(f64, usize)>,
                  last: (f64, DensityTable),
                  outcome: TuneOutcome|
     -> Result<RadiusTune> {
        let table = if last.0 == r { last.1 } else { build(r)? };
        Ok(RadiusTune {
            r,
            k,
            table,
            trace,
            outcome,
        })
    };

    loop {
        let k = threshold_k(&table, nu);
        trace.push((r, k));
        if (bounds.k_min..=bounds.k_max).contains(&k) {
            return finish(r, k, trace, (r, table), TuneOutcome::InRange);
        }
        // Larger r pools more points per ball, so K grows with r: too few
        // retained balls means grow the step, too many means shrink it.
        let needed = if k < bounds.k_min {
            Need::Loosen
        } else {
            Need::Tighten
        };
        match direction {
            None => direction = Some(needed),
            Some(d) if d != needed => {
                let (br, bk) = best_probe(&trace[..trace.len() - 1], bounds);
                return finish(br, bk, trace, (r, table), TuneOutcome::NoneInRange);
            }
            _ => {}
        }
        if trace.len() >= bounds.max_steps {
            let (br, bk) = best_probe(&trace, bounds);
            return finish(br, bk, trace, (r, table), TuneOutcome::StepsExhausted);
        }
        r = match needed {
            Need::Loosen => r * bounds.factor,
            Need::Tighten => r / bounds.factor,
        };
        table = build(r)?;
    }
}
