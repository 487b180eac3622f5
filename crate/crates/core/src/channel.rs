//! 3GPP TR 38.901 Rural Macrocell (RMa) large-scale channel: breakpoint
//! distance, LOS probability, two-slope LOS path loss, NLOS path loss and
//! log-normal shadowing, applied to vehicle-to-vehicle links.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::geometry::{los_clear, Scene, Snapshot, VehicleNode};
use crate::seed::{pair_seed, rng_from_seed};
use crate::{Error, Result};

/// Propagation speed used by the breakpoint formula (m/s).
pub const SPEED_OF_LIGHT: f64 = 3.0e8;

/// Thermal noise power spectral density at 290 K (dBm/Hz).
pub const THERMAL_NOISE_DBM_HZ: f64 = -174.0;

/// Shortest 2-D distance the RMa formulas are defined for.
pub const MIN_D2D: f64 = 10.0;
/// Longest 2-D distance the RMa formulas are defined for.
pub const MAX_D2D: f64 = 10_000.0;
/// Lower end of the base-station height range of the NLOS formula.
pub const MIN_NLOS_HBS: f64 = 10.0;

pub const SIGMA_LOS_NEAR: f64 = 4.0;
pub const SIGMA_LOS_FAR: f64 = 6.0;
pub const SIGMA_NLOS: f64 = 8.0;

#[derive(Debug, Clone, PartialEq)]
pub struct RadioConfig {
    /// Carrier frequency, GHz.
    pub fc_ghz: f64,
    pub tx_power_dbm: f64,
    pub bandwidth_mhz: f64,
    pub noise_figure_db: f64,
    pub sinr_threshold_db: f64,
    /// "Base station" antenna height fed to the RMa formulas, m.
    pub h_bs: f64,
    /// "User terminal" antenna height, m. Also the antenna height of every vehicle.
    pub h_ut: f64,
    /// Average building height, m.
    pub building_height: f64,
    /// Average street width, m.
    pub avg_street_width: f64,
    /// Log-normal shadow fading on/off.
    pub shadowing: bool,
}

impl Default for RadioConfig {
    fn default() -> Self {
        Self {
            fc_ghz: 5.9,
            tx_power_dbm: 23.0,
            bandwidth_mhz: 10.0,
            noise_figure_db: 9.0,
            sinr_threshold_db: 10.0,
            h_bs: 1.5,
            h_ut: 1.5,
            building_height: 5.0,
            avg_street_width: 20.0,
            shadowing: true,
        }
    }
}

impl RadioConfig {
    pub fn validate(&self) -> Result<()> {
        let in_range = |name: &'static str, v: f64, lo: f64, hi: f64| {
            if (lo..=hi).contains(&v) {
                Ok(())
            } else {
                Err(Error::param(name, format!("{v} outside [{lo}, {hi}]")))
            }
        };
        in_range("fc_ghz", self.fc_ghz, 0.5, 30.0)?;
        in_range("building_height", self.building_height, 5.0, 50.0)?;
        in_range("avg_street_width", self.avg_street_width, 5.0, 50.0)?;
        if !(self.bandwidth_mhz > 0.0) || !self.bandwidth_mhz.is_finite() {
            return Err(Error::param("bandwidth_mhz", "must be > 0"));
        }
        for (name, h) in [("h_bs", self.h_bs), ("h_ut", self.h_ut)] {
            if !(h > 0.0) || !h.is_finite() {
                return Err(Error::param(name, format!("must be > 0, got {h}")));
            }
        }
        for (name, v) in [
            ("tx_power_dbm", self.tx_power_dbm),
            ("noise_figure_db", self.noise_figure_db),
            ("sinr_threshold_db", self.sinr_threshold_db),
        ] {
            if !v.is_finite() {
                return Err(Error::param(name, "must be finite"));
            }
        }
        Ok(())
    }

    pub fn noise_floor_dbm(&self) -> f64 {
        noise_floor_dbm(self.bandwidth_mhz, self.noise_figure_db)
    }
}

pub fn dbm_to_mw(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0)
}

pub fn mw_to_dbm(mw: f64) -> f64 {
    10.0 * mw.log10()
}

/// `-174 + 10·log10(B) + NF` dBm for a bandwidth given in MHz.
pub fn noise_floor_dbm(bandwidth_mhz: f64, noise_figure_db: f64) -> f64 {
    THERMAL_NOISE_DBM_HZ + 10.0 * (bandwidth_mhz * 1e6).log10() + noise_figure_db
}

/// `d_BP = 2π·h_BS·h_UT·f_c / c` with `f_c` in Hz.
pub fn breakpoint_distance(h_bs: f64, h_ut: f64, fc_hz: f64) -> f64 {
    2.0 * std::f64::consts::PI * h_bs * h_ut * fc_hz / SPEED_OF_LIGHT
}

/// RMa LOS probability.
pub fn los_probability_rma(d2d: f64) -> f64 {
    if d2d <= MIN_D2D {
        1.0
    } else {
        (-(d2d - MIN_D2D) / 1000.0).exp()
    }
}

/// Out-of-validity conditions met while evaluating a link.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LinkFlags {
    /// `d2d` fell outside `[10 m, 10 km]`; short links were evaluated at 10 m.
    pub range_clamped: bool,
    /// `h_bs` was raised to 10 m inside the NLOS formula.
    pub hbs_clamped: bool,
}

impl LinkFlags {
    pub fn union(self, other: Self) -> Self {
        Self {
            range_clamped: self.range_clamped || other.range_clamped,
            hbs_clamped: self.hbs_clamped || other.hbs_clamped,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathLoss {
    pub loss_db: f64,
    pub sigma_sf_db: f64,
    pub flags: LinkFlags,
}

/// Shared geometry of one evaluation after the short-distance clamp.
#[derive(Debug, Clone, Copy)]
struct Geometry {
    d2d: f64,
    d3d: f64,
    flags: LinkFlags,
}

fn clamp_geometry(d2d: f64, d3d: f64) -> Geometry {
    let mut flags = LinkFlags::default();
    let (mut d2, mut d3) = (d2d, d3d.max(d2d));
    if d2 < MIN_D2D {
        let dh2 = (d3 * d3 - d2 * d2).max(0.0);
        d2 = MIN_D2D;
        d3 = (d2 * d2 + dh2).sqrt();
        flags.range_clamped = true;
    } else if d2 > MAX_D2D {
        flags.range_clamped = true;
    }
    Geometry { d2d: d2, d3d: d3, flags }
}

/// First slope of the LOS model at 3-D distance `d3d`.
fn pl1(d3d: f64, fc_ghz: f64, h: f64) -> f64 {
    let hp = h.powf(1.72);
    20.0 * (40.0 * std::f64::consts::PI * d3d * fc_ghz / 3.0).log10()
        + (0.03 * hp).min(10.0) * d3d.log10()
        - (0.044 * hp).min(14.77)
        + 0.002 * h.log10() * d3d
}

/// RMa LOS path loss and its shadow-fading standard deviation.
///
/// The first slope applies up to the breakpoint (measured on `d2d`); beyond
/// it the loss grows by 40 dB/decade from its breakpoint value. Links
/// shorter than 10 m are evaluated at 10 m and flagged.
pub fn path_loss_rma_los(d2d: f64, d3d: f64, fc_ghz: f64, h: f64, h_bs: f64, h_ut: f64) -> PathLoss {
    let g = clamp_geometry(d2d, d3d);
    let d_bp = breakpoint_distance(h_bs, h_ut, fc_ghz * 1e9);
    if g.d2d <= d_bp {
        PathLoss { loss_db: pl1(g.d3d, fc_ghz, h), sigma_sf_db: SIGMA_LOS_NEAR, flags: g.flags }
    } else {
        PathLoss {
            loss_db: pl1(d_bp, fc_ghz, h) + 40.0 * (g.d3d / d_bp).log10(),
            sigma_sf_db: SIGMA_LOS_FAR,
            flags: g.flags,
        }
    }
}

/// Second-slope value evaluated directly, regardless of the breakpoint test.
pub fn path_loss_rma_los_far(d3d: f64, fc_ghz: f64, h: f64, h_bs: f64, h_ut: f64) -> f64 {
    let d_bp = breakpoint_distance(h_bs, h_ut, fc_ghz * 1e9);
    pl1(d_bp, fc_ghz, h) + 40.0 * (d3d / d_bp).log10()
}

/// First-slope value evaluated directly, regardless of the breakpoint test.
pub fn path_loss_rma_los_near(d3d: f64, fc_ghz: f64, h: f64) -> f64 {
    pl1(d3d, fc_ghz, h)
}

/// The dedicated NLOS closed form (before the max with LOS). `h_bs` is used as given.
fn pl_nlos_prime(d3d: f64, fc_ghz: f64, h: f64, w: f64, h_bs: f64, h_ut: f64) -> f64 {
    161.04 - 7.1 * w.log10() + 7.5 * h.log10() - (24.37 - 3.7 * (h / h_bs).powi(2)) * h_bs.log10()
        + (43.42 - 3.1 * h_bs.log10()) * (d3d.log10() - 3.0)
        + 20.0 * fc_ghz.log10()
        - (3.2 * (11.75 * h_ut).log10().powi(2) - 4.97)
}

/// RMa NLOS path loss: `max(PL_LOS, PL'_NLOS)` with σ_SF = 8 dB.
///
/// `h_bs` is raised to 10 m inside the NLOS term only (vehicle antennas sit
/// far below the formula's validity range); the LOS term keeps the actual
/// height.
pub fn path_loss_rma_nlos(
    d2d: f64,
    d3d: f64,
    fc_ghz: f64,
    h: f64,
    w: f64,
    h_bs: f64,
    h_ut: f64,
) -> PathLoss {
    let los = path_loss_rma_los(d2d, d3d, fc_ghz, h, h_bs, h_ut);
    let g = clamp_geometry(d2d, d3d);
    let hbs_eff = h_bs.max(MIN_NLOS_HBS);
    let prime = pl_nlos_prime(g.d3d, fc_ghz, h, w, hbs_eff, h_ut);
    PathLoss {
        loss_db: los.loss_db.max(prime),
        sigma_sf_db: SIGMA_NLOS,
        flags: los.flags.union(LinkFlags { range_clamped: false, hbs_clamped: h_bs < MIN_NLOS_HBS }),
    }
}

/// Channel state of one directed link.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkState {
    pub tx_id: usize,
    pub rx_id: usize,
    pub d2d: f64,
    pub d3d: f64,
    pub los: bool,
    pub blocked_by_building: bool,
    pub path_loss: f64,
    pub shadow: f64,
    pub rx_power: f64,
    pub flags: LinkFlags,
}

impl LinkState {
    /// Same channel seen from the other end.
    pub fn reversed(&self) -> Self {
        Self { tx_id: self.rx_id, rx_id: self.tx_id, ..self.clone() }
    }
}

/// Stream seeds for the pair-keyed randomness of one snapshot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LinkStreams {
    pub shadow: u64,
    pub los: u64,
}

/// Samples the channel from `tx` to `rx`.
///
/// LOS is geometric in urban scenes and a Bernoulli draw in suburban ones.
/// Both the LOS draw and the shadowing realization are keyed by the
/// unordered pair, so `sample_link(a, b)` and `sample_link(b, a)` agree.
pub fn sample_link(
    tx: &VehicleNode,
    rx: &VehicleNode,
    scene: &Scene,
    radio: &RadioConfig,
    streams: LinkStreams,
) -> Result<LinkState> {
    let d2d = tx.position.distance(rx.position);
    if !(d2d > 0.0) {
        return Err(Error::DegenerateLink { tx: tx.id, rx: rx.id });
    }
    let dh = tx.antenna_height - rx.antenna_height;
    let d3d = d2d.hypot(dh);

    let (los, blocked) = match scene {
        Scene::Urban(u) => {
            let clear = los_clear(tx.position, rx.position, &u.buildings);
            (clear, !clear)
        }
        Scene::Suburban(_) => {
            let p = los_probability_rma(d2d);
            let mut rng = rng_from_seed(pair_seed(streams.los, tx.id, rx.id));
            (p >= 1.0 || rng.random::<f64>() < p, false)
        }
    };

    let pl = if los {
        path_loss_rma_los(d2d, d3d, radio.fc_ghz, radio.building_height, radio.h_bs, radio.h_ut)
    } else {
        path_loss_rma_nlos(
            d2d,
            d3d,
            radio.fc_ghz,
            radio.building_height,
            radio.avg_street_width,
            radio.h_bs,
            radio.h_ut,
        )
    };

    let shadow = if radio.shadowing {
        let mut rng = rng_from_seed(pair_seed(streams.shadow, tx.id, rx.id));
        let z: f64 = rng.sample(StandardNormal);
        pl.sigma_sf_db * z
    } else {
        0.0
    };

    Ok(LinkState {
        tx_id: tx.id,
        rx_id: rx.id,
        d2d,
        d3d,
        los,
        blocked_by_building: blocked,
        path_loss: pl.loss_db,
        shadow,
        rx_power: radio.tx_power_dbm - pl.loss_db - shadow,
        flags: pl.flags,
    })
}

/// All ordered-pair link states of a snapshot, with received powers cached in mW.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkMatrix {
    n: usize,
    links: Vec<Option<LinkState>>,
    rx_mw: Vec<f64>,
}

impl LinkMatrix {
    /// Builds a matrix from explicit links; every ordered pair must be present exactly once.
    pub fn from_links(n: usize, links: Vec<LinkState>) -> Result<Self> {
        let mut slots: Vec<Option<LinkState>> = vec![None; n * n];
        for l in links {
            if l.tx_id >= n || l.rx_id >= n || l.tx_id == l.rx_id {
                return Err(Error::InvalidInput(format!("link {}→{} out of range", l.tx_id, l.rx_id)));
            }
            let k = l.tx_id * n + l.rx_id;
            if slots[k].is_some() {
                return Err(Error::InvalidInput(format!("duplicate link {}→{}", l.tx_id, l.rx_id)));
            }
            slots[k] = Some(l);
        }
        for i in 0..n {
            for j in 0..n {
                if i != j && slots[i * n + j].is_none() {
                    return Err(Error::InvalidInput(format!("missing link {i}→{j}")));
                }
            }
        }
        let rx_mw = slots
            .iter()
            .map(|l| l.as_ref().map_or(0.0, |l| dbm_to_mw(l.rx_power)))
            .collect();
        Ok(Self { n, links: slots, rx_mw })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, tx: usize, rx: usize) -> Option<&LinkState> {
        self.links.get(tx * self.n + rx).and_then(Option::as_ref)
    }

    /// Received power in mW; zero on the diagonal.
    #[inline]
    pub fn rx_mw(&self, tx: usize, rx: usize) -> f64 {
        self.rx_mw[tx * self.n + rx]
    }

    pub fn iter(&self) -> impl Iterator<Item = &LinkState> {
        self.links.iter().flatten()
    }

    /// Union of the flags of every link.
    pub fn flags(&self) -> LinkFlags {
        self.iter().fold(LinkFlags::default(), |acc, l| acc.union(l.flags))
    }
}

/// Samples every ordered pair of a snapshot. Each unordered pair is sampled
/// once and mirrored.
pub fn sample_links(
    snapshot: &Snapshot,
    scene: &Scene,
    radio: &RadioConfig,
    streams: LinkStreams,
) -> Result<LinkMatrix> {
    let vs = &snapshot.vehicles;
    let n = vs.len();
    let mut links = Vec::with_capacity(n * n.saturating_sub(1));
    for i in 0..n {
        for j in (i + 1)..n {
            let l = sample_link(&vs[i], &vs[j], scene, radio, streams)?;
            links.push(l.reversed());
            links.push(l);
        }
    }
    LinkMatrix::from_links(n, links)
}
