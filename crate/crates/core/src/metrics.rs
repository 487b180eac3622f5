//! Packet delivery ratio, blockage rate and the blockage-discounted PDR.

use serde::{Deserialize, Serialize};

use crate::channel::LinkMatrix;
use crate::geometry::Snapshot;
use crate::mac::ReceptionOutcome;
use crate::{Error, Result};

/// 95% two-sided normal quantile.
pub const Z95: f64 = 1.96;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairClass {
    pub tx_id: usize,
    pub rx_id: usize,
    /// `d2d` within the awareness range.
    pub in_range: bool,
    /// A building interrupts the line of sight.
    pub blocked: bool,
}

impl PairClass {
    /// Counts toward the raw PDR denominator.
    pub fn eligible(&self) -> bool {
        self.in_range && !self.blocked
    }
}

/// Classifies every ordered pair of the snapshot.
pub fn classify_pairs(snapshot: &Snapshot, links: &LinkMatrix, awareness_range: f64) -> Result<Vec<PairClass>> {
    if !(awareness_range > 0.0) {
        return Err(Error::param("awareness_range", format!("must be > 0, got {awareness_range}")));
    }
    let n = snapshot.vehicles.len();
    if links.len() != n {
        return Err(Error::InvalidInput(format!("link matrix covers {} vehicles, snapshot has {n}", links.len())));
    }
    Ok(links
        .iter()
        .map(|l| PairClass {
            tx_id: l.tx_id,
            rx_id: l.rx_id,
            in_range: l.d2d <= awareness_range,
            blocked: l.blocked_by_building,
        })
        .collect())
}

/// A ratio that may have had nothing to count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ratio {
    pub value: f64,
    /// The denominator was zero and `value` is the conventional default.
    pub empty: bool,
}

/// Decoded fraction of receptions whose pair is in range and unblocked.
/// With no eligible reception the PDR is 1.0 (nothing failed).
pub fn raw_pdr(outcomes: &[ReceptionOutcome], pairs: &[PairClass]) -> Ratio {
    let n = pairs.iter().map(|p| p.tx_id.max(p.rx_id) + 1).max().unwrap_or(0);
    let mut eligible = vec![false; n * n];
    for p in pairs {
        eligible[p.tx_id * n + p.rx_id] = p.eligible();
    }
    let (mut num, mut den) = (0u64, 0u64);
    for o in outcomes {
        if o.tx_id < n && o.rx_id < n && eligible[o.tx_id * n + o.rx_id] {
            den += 1;
            num += o.decoded as u64;
        }
    }
    if den == 0 {
        Ratio { value: 1.0, empty: true }
    } else {
        Ratio { value: num as f64 / den as f64, empty: false }
    }
}

/// Blocked fraction of in-range ordered pairs; 0 without in-range pairs.
pub fn blockage_rate(pairs: &[PairClass]) -> f64 {
    let in_range = pairs.iter().filter(|p| p.in_range).count();
    if in_range == 0 {
        return 0.0;
    }
    let blocked = pairs.iter().filter(|p| p.in_range && p.blocked).count();
    blocked as f64 / in_range as f64
}

/// `raw · (1 − blockage)`.
pub fn discounted_pdr(raw: f64, blockage: f64) -> Result<f64> {
    for (name, v) in [("raw", raw), ("blockage", blockage)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::param(name, format!("{v} outside [0, 1]")));
        }
    }
    Ok(raw * (1.0 - blockage))
}

/// Per-snapshot metrics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnapshotMetrics {
    pub raw: f64,
    pub blockage: f64,
    pub discounted: f64,
    pub n_vehicles: usize,
    pub empty_denominator: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanCi {
    pub mean: f64,
    /// Half-width of the 95% normal confidence interval.
    pub ci95: f64,
}

/// Sample mean and `1.96·s/√n` half-width.
///
/// Values are summed in ascending order, which makes the result exactly
/// invariant to the order of the input.
pub fn mean_ci(values: &[f64]) -> Result<MeanCi> {
    if values.is_empty() {
        return Err(Error::param("per_snapshot", "at least one snapshot is required"));
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    if v[0] == v[v.len() - 1] {
        return Ok(MeanCi { mean: v[0], ci95: 0.0 });
    }
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let mut dev: Vec<f64> = v.iter().map(|x| (x - mean).powi(2)).collect();
    dev.sort_by(f64::total_cmp);
    let s = (dev.iter().sum::<f64>() / (n - 1.0)).sqrt();
    Ok(MeanCi { mean, ci95: Z95 * s / n.sqrt() })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aggregate {
    pub pdr_raw: MeanCi,
    pub blockage_rate: f64,
    pub pdr_discounted: MeanCi,
    pub snapshots: usize,
    pub empty_denominators: usize,
}

pub fn aggregate(per_snapshot: &[SnapshotMetrics]) -> Result<Aggregate> {
    let col = |f: fn(&SnapshotMetrics) -> f64| per_snapshot.iter().map(f).collect::<Vec<_>>();
    Ok(Aggregate {
        pdr_raw: mean_ci(&col(|m| m.raw))?,
        blockage_rate: mean_ci(&col(|m| m.blockage))?.mean,
        pdr_discounted: mean_ci(&col(|m| m.discounted))?,
        snapshots: per_snapshot.len(),
        empty_denominators: per_snapshot.iter().filter(|m| m.empty_denominator).count(),
    })
}

/// Campaign summary for one (scenario, cw, density) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PdrReport {
    pub scenario: String,
    pub cw: u32,
    pub density: f64,
    pub snapshots: usize,
    pub pdr_raw_mean: f64,
    pub pdr_raw_ci95: f64,
    pub blockage_rate: f64,
    pub pdr_discounted_mean: f64,
    pub pdr_discounted_ci95: f64,
    pub base_seed: u64,
    pub flags: Vec<String>,
}
