//! Seeded Monte Carlo campaigns: scene → placement → links → CSMA →
//! receptions → metrics, one independent work unit per snapshot.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::channel::{sample_links, LinkFlags, LinkMatrix, LinkStreams, RadioConfig};
use crate::geometry::{
    build_cloverleaf, build_cross_junction, build_urban_grid, place_vehicles, place_vehicles_fixed, Scene,
    Snapshot, VehicleTemplate,
};
use crate::mac::{evaluate_receptions, run_csma, schedule_bsm_offsets, MacConfig};
use crate::metrics::{aggregate, blockage_rate, classify_pairs, discounted_pdr, raw_pdr, PdrReport, SnapshotMetrics};
pub use crate::seed::derive_seed;
use crate::seed::{purpose_seed, rng_from_seed, Purpose};
use crate::{Error, Result};


#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ScenarioKind {
    SuburbanCross,
    SuburbanCloverleaf,
    UrbanGrid,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 3] = [Self::SuburbanCross, Self::SuburbanCloverleaf, Self::UrbanGrid];

    pub fn label(self) -> &'static str {
        match self {
            Self::SuburbanCross => "suburban-cross",
            Self::SuburbanCloverleaf => "suburban-cloverleaf",
            Self::UrbanGrid => "urban-grid",
        }
    }

    pub fn is_urban(self) -> bool {
        self == Self::UrbanGrid
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for ScenarioKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.label() == s)
            .ok_or_else(|| Error::param("kind", format!("unknown scenario `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub kind: ScenarioKind,
    /// Cross / cloverleaf arm length, m.
    pub arm_length: f64,
    /// Cross / cloverleaf carriageway width, m.
    pub road_width: f64,
    pub loop_radius: f64,
    pub blocks_per_side: usize,
    pub block_size: f64,
    pub street_width: f64,
    /// Vehicles per km² of bounding region.
    pub density: f64,
    /// m/s
    pub speed: f64,
    /// Fixed vehicle count instead of a Poisson draw.
    pub fixed_n: Option<usize>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            kind: ScenarioKind::SuburbanCross,
            arm_length: 500.0,
            road_width: 20.0,
            loop_radius: 50.0,
            blocks_per_side: 4,
            block_size: 250.0,
            street_width: 20.0,
            density: 100.0,
            speed: 0.0,
            fixed_n: None,
        }
    }
}

impl ScenarioConfig {
    pub fn build(&self) -> Result<Scene> {
        Ok(match self.kind {
            ScenarioKind::SuburbanCross => Scene::Suburban(build_cross_junction(self.arm_length, self.road_width)?),
            ScenarioKind::SuburbanCloverleaf => {
                Scene::Suburban(build_cloverleaf(self.arm_length, self.loop_radius, self.road_width)?)
            }
            ScenarioKind::UrbanGrid => {
                Scene::Urban(build_urban_grid(self.blocks_per_side, self.block_size, self.street_width)?)
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignConfig {
    pub scenario: ScenarioConfig,
    pub radio: RadioConfig,
    pub mac: MacConfig,
    pub snapshots: usize,
    /// Simulated slots per snapshot.
    pub horizon: u64,
    /// Receivers farther than this (m) do not count toward the PDR.
    pub awareness_range: f64,
    pub base_seed: u64,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        let mac = MacConfig::default();
        Self {
            scenario: ScenarioConfig::default(),
            radio: RadioConfig::default(),
            // ten BSM periods, about one second at 13 µs slots
            horizon: 10 * mac.bsm_period,
            mac,
            snapshots: 200,
            awareness_range: 300.0,
            base_seed: 0,
        }
    }
}

impl CampaignConfig {
    pub fn validate(&self) -> Result<()> {
        self.radio.validate()?;
        self.mac.validate()?;
        if self.snapshots < 1 {
            return Err(Error::param("snapshots", "must be at least 1"));
        }
        if self.horizon < self.mac.bsm_period {
            return Err(Error::param(
                "horizon",
                format!("must be at least bsm_period ({} < {})", self.horizon, self.mac.bsm_period),
            ));
        }
        if !(self.awareness_range > 0.0) {
            return Err(Error::param("awareness_range", "must be > 0"));
        }
        let s = &self.scenario;
        if !(s.density >= 0.0) || !s.density.is_finite() {
            return Err(Error::param("density", "must be >= 0"));
        }
        if !(s.speed >= 0.0) || !s.speed.is_finite() {
            return Err(Error::param("speed", "must be >= 0"));
        }
        s.build().map(|_| ())
    }
}

/// Everything one snapshot contributes to a campaign.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnapshotResult {
    pub metrics: SnapshotMetrics,
    pub link_flags: LinkFlags,
}

/// A validated campaign with its scene built once.
#[derive(Debug, Clone)]
pub struct Campaign {
    cfg: CampaignConfig,
    scene: Scene,
}

impl Campaign {
    pub fn new(cfg: CampaignConfig) -> Result<Self> {
        cfg.validate()?;
        let scene = cfg.scenario.build()?;
        Ok(Self { cfg, scene })
    }

    pub fn config(&self) -> &CampaignConfig {
        &self.cfg
    }

    pub fn scene(&self) -> &Scene {
        &self.scene
    }

    /// Seed of snapshot `index`.
    pub fn snapshot_seed(&self, index: usize) -> u64 {
        derive_seed(self.cfg.base_seed, index as u64)
    }

    /// Draws the vehicles of snapshot `index`.
    pub fn realize(&self, index: usize) -> Result<Snapshot> {
        let seed = self.snapshot_seed(index);
        let mut rng = rng_from_seed(purpose_seed(seed, Purpose::Placement));
        let template = VehicleTemplate { antenna_height: self.cfg.radio.h_ut, speed: self.cfg.scenario.speed };
        let network = self.scene.network();
        let vehicles = match self.cfg.scenario.fixed_n {
            Some(n) => place_vehicles_fixed(network, n, template, &mut rng),
            None => place_vehicles(network, self.cfg.scenario.density, template, &mut rng)?,
        };
        Snapshot::new(vehicles, self.scene.buildings().to_vec(), seed)
    }

    /// Channel states of every ordered pair of a realized snapshot.
    pub fn links(&self, snapshot: &Snapshot) -> Result<LinkMatrix> {
        let streams = LinkStreams {
            shadow: purpose_seed(snapshot.seed, Purpose::Shadow),
            los: purpose_seed(snapshot.seed, Purpose::LosBernoulli),
        };
        sample_links(snapshot, &self.scene, &self.cfg.radio, streams)
    }

    /// Runs snapshot `index` end to end. Depends only on `(config, index)`.
    pub fn run_snapshot(&self, index: usize) -> Result<SnapshotResult> {
        let cfg = &self.cfg;
        let snapshot = self.realize(index)?;
        let seed = snapshot.seed;
        let links = self.links(&snapshot)?;

        let n = snapshot.vehicles.len();
        let mut offset_rng = rng_from_seed(purpose_seed(seed, Purpose::Offsets));
        let offsets = schedule_bsm_offsets(n, cfg.mac.bsm_period, &mut offset_rng);
        let mut backoff_rng = rng_from_seed(purpose_seed(seed, Purpose::Backoff));
        let trace = run_csma(&snapshot, &links, &cfg.mac, cfg.horizon, &offsets, &mut backoff_rng)?;
        let outcomes = evaluate_receptions(&trace.attempts, &links, &cfg.radio);

        let pairs = classify_pairs(&snapshot, &links, cfg.awareness_range)?;
        let raw = raw_pdr(&outcomes, &pairs);
        let blockage = blockage_rate(&pairs);
        let discounted = discounted_pdr(raw.value, blockage)?;
        Ok(SnapshotResult {
            metrics: SnapshotMetrics {
                raw: raw.value,
                blockage,
                discounted,
                n_vehicles: n,
                empty_denominator: raw.empty,
            },
            link_flags: links.flags(),
        })
    }

    /// All snapshots, in index order, on the current rayon pool.
    pub fn run_snapshots(&self) -> Result<Vec<SnapshotResult>> {
        (0..self.cfg.snapshots)
            .into_par_iter()
            .map(|i| self.run_snapshot(i))
            .collect()
    }

    /// Runs and reduces the campaign on the current rayon pool.
    pub fn run(&self) -> Result<PdrReport> {
        let results = self.run_snapshots()?;
        self.reduce(&results)
    }

    /// Reduces per-snapshot results (in index order) into a report.
    pub fn reduce(&self, results: &[SnapshotResult]) -> Result<PdrReport> {
        let metrics: Vec<SnapshotMetrics> = results.iter().map(|r| r.metrics).collect();
        let agg = aggregate(&metrics)?;
        let flags = results.iter().fold(LinkFlags::default(), |acc, r| acc.union(r.link_flags));
        let mut labels = Vec::new();
        if flags.hbs_clamped {
            labels.push("hbs-clamped".to_string());
        }
        if flags.range_clamped {
            labels.push("range-clamped".to_string());
        }
        if agg.empty_denominators > 0 {
            labels.push(format!("empty-denominator={}", agg.empty_denominators));
        }
        let cfg = &self.cfg;
        Ok(PdrReport {
            scenario: cfg.scenario.kind.label().to_string(),
            cw: cfg.mac.cw,
            density: cfg.scenario.density,
            snapshots: agg.snapshots,
            pdr_raw_mean: agg.pdr_raw.mean,
            pdr_raw_ci95: agg.pdr_raw.ci95,
            blockage_rate: agg.blockage_rate,
            pdr_discounted_mean: agg.pdr_discounted.mean,
            pdr_discounted_ci95: agg.pdr_discounted.ci95,
            base_seed: cfg.base_seed,
            flags: labels,
        })
    }
}

/// Runs one snapshot of `cfg`.
pub fn run_snapshot(cfg: &CampaignConfig, index: usize) -> Result<SnapshotResult> {
    Campaign::new(cfg.clone())?.run_snapshot(index)
}

/// Runs a campaign on the global rayon pool.
pub fn run_campaign(cfg: &CampaignConfig) -> Result<PdrReport> {
    Campaign::new(cfg.clone())?.run()
}

/// Runs a campaign on a dedicated pool of `workers` threads.
pub fn run_campaign_with_workers(cfg: &CampaignConfig, workers: usize) -> Result<PdrReport> {
    let campaign = Campaign::new(cfg.clone())?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
    pool.install(|| campaign.run())
}
