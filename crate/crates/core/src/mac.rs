//! Slotted CSMA/CA broadcast of periodic BSMs and SINR-based reception.
//!
//! Single-stage backoff: every frame that finds the medium idle for AIFS
//! slots draws a counter uniformly from `[0, cw]`, counts it down on idle
//! slots, freezes (and re-waits AIFS) on busy slots, and transmits when it
//! reaches zero. Broadcast frames are never acknowledged or retried; a
//! frame still queued when the next one is generated is replaced.

use rand::Rng;

use crate::channel::{dbm_to_mw, mw_to_dbm, LinkMatrix, RadioConfig};
use crate::geometry::Snapshot;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct MacConfig {
    /// Contention window: backoff is uniform on `[0, cw]` slots.
    pub cw: u32,
    pub slot_us: f64,
    pub aifs: u32,
    /// BSM generation period, slots.
    pub bsm_period: u64,
    /// Frame duration, slots.
    pub bsm_airtime: u64,
    pub cs_threshold_dbm: f64,
}

impl Default for MacConfig {
    fn default() -> Self {
        Self {
            cw: 31,
            slot_us: 13.0,
            aifs: 4,
            bsm_period: 7692,
            bsm_airtime: 34,
            cs_threshold_dbm: -85.0,
        }
    }
}

impl MacConfig {
    pub fn validate(&self) -> Result<()> {
        if self.bsm_airtime < 1 {
            return Err(Error::param("bsm_airtime", "must be at least 1 slot"));
        }
        if self.bsm_period <= self.bsm_airtime {
            return Err(Error::param(
                "bsm_period",
                format!("must exceed bsm_airtime ({} <= {})", self.bsm_period, self.bsm_airtime),
            ));
        }
        if !(self.slot_us > 0.0) || !self.slot_us.is_finite() {
            return Err(Error::param("slot_us", "must be > 0"));
        }
        if !self.cs_threshold_dbm.is_finite() {
            return Err(Error::param("cs_threshold_dbm", "must be finite"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TxAttempt {
    pub tx_id: usize,
    pub start: u64,
    pub duration: u64,
}

impl TxAttempt {
    /// One past the last occupied slot.
    pub fn end(&self) -> u64 {
        self.start + self.duration
    }

    pub fn overlaps(&self, other: &TxAttempt) -> bool {
        self.start < other.end() && other.start < self.end()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReceptionOutcome {
    pub tx_id: usize,
    pub rx_id: usize,
    pub attempt_start: u64,
    /// Minimum SINR over the frame airtime, dB.
    pub sinr_min: f64,
    /// The receiver was itself transmitting during the frame.
    pub half_duplex: bool,
    pub decoded: bool,
}

/// One uniform generation offset in `[0, period)` per vehicle.
pub fn schedule_bsm_offsets<R: Rng + ?Sized>(n_vehicles: usize, period: u64, rng: &mut R) -> Vec<u64> {
    assert!(period >= 1, "BSM period must be at least one slot");
    (0..n_vehicles).map(|_| rng.random_range(0..period)).collect()
}

/// Result of one CSMA run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CsmaTrace {
    /// Sorted by start slot, ties by transmitter id.
    pub attempts: Vec<TxAttempt>,
    /// Frames generated within the horizon.
    pub generated: u64,
    /// Frames replaced by a newer one before they could be sent.
    pub expired: u64,
    /// Every backoff counter drawn, in draw order.
    pub backoff_draws: Vec<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Phase {
    Idle,
    /// Waiting for `aifs` consecutive idle slots; holds the current idle run.
    Aifs(u32),
    Backoff,
    /// Transmitting until (exclusive) the given slot.
    Transmitting(u64),
}

#[derive(Debug, Clone)]
struct Station {
    phase: Phase,
    pending: bool,
    counter: Option<u32>,
}

struct Csma<'a, R: Rng + ?Sized> {
    links: &'a LinkMatrix,
    mac: &'a MacConfig,
    rng: &'a mut R,
    cs_threshold_mw: f64,
    stations: Vec<Station>,
    /// Transmitting stations, ascending id.
    active: Vec<usize>,
    /// Contending stations (AIFS or backoff), ascending id.
    contending: Vec<usize>,
    sensed_mw: Vec<f64>,
    trace: CsmaTrace,
}

impl<R: Rng + ?Sized> Csma<'_, R> {
    fn insert_sorted(v: &mut Vec<usize>, id: usize) {
        if let Err(pos) = v.binary_search(&id) {
            v.insert(pos, id);
        }
    }

    fn remove_sorted(v: &mut Vec<usize>, id: usize) {
        if let Ok(pos) = v.binary_search(&id) {
            v.remove(pos);
        }
    }

    fn start_backoff(&mut self, id: usize) {
        let st = &mut self.stations[id];
        if st.counter.is_none() {
            let b = self.rng.random_range(0..=self.mac.cw);
            self.trace.backoff_draws.push(b);
            st.counter = Some(b);
        }
        st.phase = Phase::Backoff;
    }

    fn enter_contention(&mut self, id: usize) {
        Self::insert_sorted(&mut self.contending, id);
        if self.mac.aifs == 0 {
            self.start_backoff(id);
        } else {
            self.stations[id].phase = Phase::Aifs(0);
        }
    }

    /// Recomputes sensed power for every station from the active set.
    fn refresh_sensing(&mut self) {
        for (i, s) in self.sensed_mw.iter_mut().enumerate() {
            *s = self.active.iter().filter(|&&k| k != i).map(|&k| self.links.rx_mw(k, i)).sum();
        }
    }

    fn step(&mut self, t: u64, generating: &[usize]) {
        let mut active_changed = false;

        // transmissions that ended with the previous slot
        let finished: Vec<usize> = self
            .active
            .iter()
            .copied()
            .filter(|&k| self.stations[k].phase == Phase::Transmitting(t))
            .collect();
        for k in finished {
            Self::remove_sorted(&mut self.active, k);
            active_changed = true;
            if self.stations[k].pending {
                self.enter_contention(k);
            } else {
                self.stations[k].phase = Phase::Idle;
            }
        }

        for &i in generating {
            self.trace.generated += 1;
            let st = &mut self.stations[i];
            if st.pending {
                // replaced by the fresh frame; contention state carries over
                self.trace.expired += 1;
                continue;
            }
            st.pending = true;
            if st.phase == Phase::Idle {
                self.enter_contention(i);
            }
        }

        // stations whose counter expired start transmitting in this slot
        let ready: Vec<usize> = self
            .contending
            .iter()
            .copied()
            .filter(|&i| {
                let st = &self.stations[i];
                st.phase == Phase::Backoff && st.counter == Some(0)
            })
            .collect();
        for i in ready {
            let duration = self.mac.bsm_airtime;
            self.trace.attempts.push(TxAttempt { tx_id: i, start: t, duration });
            let st = &mut self.stations[i];
            st.phase = Phase::Transmitting(t + duration);
            st.pending = false;
            st.counter = None;
            Self::remove_sorted(&mut self.contending, i);
            Self::insert_sorted(&mut self.active, i);
            active_changed = true;
        }

        if active_changed {
            self.refresh_sensing();
        }

        // carrier sense over this slot
        let contending = self.contending.clone();
        for i in contending {
            let busy = self.sensed_mw[i] >= self.cs_threshold_mw;
            match self.stations[i].phase {
                Phase::Aifs(run) => {
                    if busy {
                        self.stations[i].phase = Phase::Aifs(0);
                    } else if run + 1 >= self.mac.aifs {
                        self.start_backoff(i);
                    } else {
                        self.stations[i].phase = Phase::Aifs(run + 1);
                    }
                }
                Phase::Backoff => {
                    if busy {
                        // freeze; the counter resumes after the next AIFS
                        if self.mac.aifs > 0 {
                            self.stations[i].phase = Phase::Aifs(0);
                        }
                    } else if let Some(c) = self.stations[i].counter.as_mut() {
                        *c = c.saturating_sub(1);
                    }
                }
                Phase::Idle | Phase::Transmitting(_) => {}
            }
        }
    }
}

/// Runs the slotted broadcast CSMA/CA over `horizon` slots.
///
/// Station `i` generates frames at `offsets[i] + k·bsm_period` for every such
/// slot below `horizon`. Frames pending at the horizon are still carried to
/// completion so that every generated frame is either sent or expired.
/// Backoff counters are drawn from `rng` in ascending station order per slot.
pub fn run_csma<R: Rng + ?Sized>(
    snapshot: &Snapshot,
    links: &LinkMatrix,
    mac: &MacConfig,
    horizon: u64,
    offsets: &[u64],
    rng: &mut R,
) -> Result<CsmaTrace> {
    mac.validate()?;
    let n = snapshot.vehicles.len();
    if links.len() != n {
        return Err(Error::InvalidInput(format!(
            "link matrix covers {} vehicles, snapshot has {n}",
            links.len()
        )));
    }
    if offsets.len() != n {
        return Err(Error::InvalidInput(format!("{} offsets for {n} vehicles", offsets.len())));
    }
    if let Some(o) = offsets.iter().find(|&&o| o >= mac.bsm_period) {
        return Err(Error::InvalidInput(format!("offset {o} outside [0, {})", mac.bsm_period)));
    }
    if horizon < mac.bsm_period {
        return Err(Error::param("horizon", format!("must be at least bsm_period ({})", mac.bsm_period)));
    }
    run_csma_unchecked(links, mac, horizon, offsets, rng)
}

fn run_csma_unchecked<R: Rng + ?Sized>(
    links: &LinkMatrix,
    mac: &MacConfig,
    horizon: u64,
    offsets: &[u64],
    rng: &mut R,
) -> Result<CsmaTrace> {
    let n = offsets.len();
    let period = mac.bsm_period;
    // stations grouped by generation phase, ascending id within a group
    let mut by_phase: Vec<(u64, Vec<usize>)> = Vec::new();
    {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&i| (offsets[i], i));
        for i in order {
            match by_phase.last_mut() {
                Some((o, ids)) if *o == offsets[i] => ids.push(i),
                _ => by_phase.push((offsets[i], vec![i])),
            }
        }
    }

    let mut sim = Csma {
        links,
        mac,
        rng,
        cs_threshold_mw: dbm_to_mw(mac.cs_threshold_dbm),
        stations: vec![Station { phase: Phase::Idle, pending: false, counter: None }; n],
        active: Vec::new(),
        contending: Vec::new(),
        sensed_mw: vec![0.0; n],
        trace: CsmaTrace::default(),
    };

    // next generation slot at or after `t`, if any before the horizon
    let next_generation = |t: u64| -> Option<(u64, usize)> {
        if by_phase.is_empty() {
            return None;
        }
        let base = t - t % period;
        let phase = t % period;
        let (slot, idx) = match by_phase.iter().position(|(o, _)| *o >= phase) {
            Some(k) => (base + by_phase[k].0, k),
            None => (base + period + by_phase[0].0, 0),
        };
        (slot < horizon).then_some((slot, idx))
    };

    let empty: Vec<usize> = Vec::new();
    let mut t = 0u64;
    loop {
        let gen = next_generation(t);
        if sim.contending.is_empty() {
            // nothing senses the medium: jump to the next event
            let next_end = sim
                .active
                .iter()
                .filter_map(|&k| match sim.stations[k].phase {
                    Phase::Transmitting(until) => Some(until),
                    _ => None,
                })
                .min();
            let next = match (gen.map(|g| g.0), next_end) {
                (Some(a), Some(b)) => a.min(b),
                (Some(a), None) => a,
                (None, Some(b)) => b,
                (None, None) => break,
            };
            t = t.max(next);
        }
        let generating = match next_generation(t) {
            Some((slot, idx)) if slot == t => &by_phase[idx].1,
            _ => &empty,
        };
        sim.step(t, generating);
        t += 1;
    }
    Ok(sim.trace)
}

/// Evaluates every (attempt, receiver) pair.
///
/// The SINR of a frame at a receiver is evaluated per slot against the
/// noise floor plus every other concurrent transmission; the minimum over
/// the airtime decides decoding. A receiver that transmits during any slot
/// of the frame cannot decode it.
pub fn evaluate_receptions(
    attempts: &[TxAttempt],
    links: &LinkMatrix,
    radio: &RadioConfig,
) -> Vec<ReceptionOutcome> {
    let n = links.len();
    let noise_mw = dbm_to_mw(radio.noise_floor_dbm());
    let threshold = radio.sinr_threshold_db;

    let mut sorted: Vec<TxAttempt> = attempts.to_vec();
    sorted.sort_by_key(|a| (a.start, a.tx_id));
    let max_duration = sorted.iter().map(|a| a.duration).max().unwrap_or(0);

    let mut out = Vec::with_capacity(sorted.len() * n.saturating_sub(1));
    let mut interference = vec![0.0f64; n];
    let mut worst = vec![0.0f64; n];
    let mut transmitting = vec![false; n];

    for (idx, a) in sorted.iter().enumerate() {
        let lo = sorted.partition_point(|b| b.start + max_duration <= a.start);
        let hi = sorted.partition_point(|b| b.start < a.end());
        let overlapping: Vec<&TxAttempt> = sorted[lo..hi]
            .iter()
            .enumerate()
            .filter(|&(k, b)| lo + k != idx && b.overlaps(a))
            .map(|(_, b)| b)
            .collect();

        // piecewise-constant interference between consecutive breakpoints
        let mut cuts: Vec<u64> = vec![a.start, a.end()];
        for b in &overlapping {
            cuts.push(b.start.max(a.start));
            cuts.push(b.end().min(a.end()));
        }
        cuts.sort_unstable();
        cuts.dedup();

        worst.iter_mut().for_each(|w| *w = 0.0);
        transmitting.iter_mut().for_each(|f| *f = false);
        for b in &overlapping {
            transmitting[b.tx_id] = true;
        }
        for w in cuts.windows(2) {
            let (s, e) = (w[0], w[1]);
            interference.iter_mut().for_each(|x| *x = 0.0);
            for b in overlapping.iter().filter(|b| b.start < e && b.end() > s) {
                for (r, x) in interference.iter_mut().enumerate() {
                    *x += links.rx_mw(b.tx_id, r);
                }
            }
            for (w, &x) in worst.iter_mut().zip(&interference) {
                *w = w.max(x);
            }
        }

        for r in (0..n).filter(|&r| r != a.tx_id) {
            let signal = links.rx_mw(a.tx_id, r);
            let sinr_min = mw_to_dbm(signal) - mw_to_dbm(noise_mw + worst[r]);
            let half_duplex = transmitting[r];
            out.push(ReceptionOutcome {
                tx_id: a.tx_id,
                rx_id: r,
                attempt_start: a.start,
                sinr_min,
                half_duplex,
                decoded: !half_duplex && sinr_min >= threshold,
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{LinkFlags, LinkState};
    use crate::geometry::{Point2D, TrackPosition, VehicleNode};
    use crate::seed::rng_from_seed;

    fn snapshot(n: usize) -> Snapshot {
        let vehicles = (0..n)
            .map(|id| VehicleNode {
                id,
                position: Point2D::new(id as f64, 0.0),
                heading: 0.0,
                speed: 0.0,
                antenna_height: 1.5,
                track: TrackPosition { route: 0, arc: 0.0, lateral: 0.0, forward: true },
            })
            .collect();
        Snapshot::new(vehicles, vec![], 0).unwrap()
    }

    /// Links with received power `power(tx, rx)` dBm.
    fn links(n: usize, power: impl Fn(usize, usize) -> f64) -> LinkMatrix {
        let mut v = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    v.push(LinkState {
                        tx_id: i,
                        rx_id: j,
                        d2d: 50.0,
                        d3d: 50.0,
                        los: true,
                        blocked_by_building: false,
                        path_loss: 23.0 - power(i, j),
                        shadow: 0.0,
                        rx_power: power(i, j),
                        flags: LinkFlags::default(),
                    });
                }
            }
        }
        LinkMatrix::from_links(n, v).unwrap()
    }

    fn small_mac(cw: u32) -> MacConfig {
        MacConfig { cw, bsm_period: 200, ..MacConfig::default() }
    }

    #[test]
    fn offsets_in_range() {
        let mut rng = rng_from_seed(1);
        let o = schedule_bsm_offsets(3, 100, &mut rng);
        assert_eq!(o.len(), 3);
        assert!(o.iter().all(|&x| x < 100));
        assert!(schedule_bsm_offsets(0, 100, &mut rng).is_empty());
    }

    #[test]
    fn offsets_uniform_chi_square() {
        let mut rng = rng_from_seed(2);
        let period = 7692u64;
        let n = 10_000;
        let bins = 32usize;
        let mut counts = vec![0usize; bins];
        for o in schedule_bsm_offsets(n, period, &mut rng) {
            counts[(o as usize * bins) / period as usize] += 1;
        }
        // expected mass per bin from the exact number of integers it covers
        let chi2: f64 = (0..bins)
            .map(|b| {
                let width = (0..period).filter(|&o| (o as usize * bins) / period as usize == b).count();
                let e = n as f64 * width as f64 / period as f64;
                (counts[b] as f64 - e).powi(2) / e
            })
            .sum();
        // chi-square 95% quantile, 31 degrees of freedom
        assert!(chi2 < 44.985, "chi2 {chi2}");
    }

    #[test]
    fn lone_vehicle_sends_every_frame() {
        let snap = snapshot(1);
        let l = links(1, |_, _| 0.0);
        let mac = MacConfig::default();
        for seed in 0..20 {
            let mut rng = rng_from_seed(seed);
            let offsets = schedule_bsm_offsets(1, mac.bsm_period, &mut rng);
            let trace = run_csma(&snap, &l, &mac, 10 * mac.bsm_period, &offsets, &mut rng).unwrap();
            assert_eq!(trace.attempts.len(), 10);
            assert_eq!(trace.generated, 10);
            assert_eq!(trace.expired, 0);
            for (k, (a, &b)) in trace.attempts.iter().zip(&trace.backoff_draws).enumerate() {
                assert_eq!(a.start, offsets[0] + k as u64 * mac.bsm_period + mac.aifs as u64 + b as u64);
                assert_eq!(a.duration, mac.bsm_airtime);
            }
        }
    }

    #[test]
    fn zero_window_forces_collision() {
        let snap = snapshot(2);
        let l = links(2, |_, _| -60.0);
        let mac = small_mac(0);
        let trace = run_csma(&snap, &l, &mac, 200, &[7, 7], &mut rng_from_seed(3)).unwrap();
        assert_eq!(trace.attempts.len(), 2);
        assert_eq!(trace.attempts[0].start, trace.attempts[1].start);
        assert_eq!(trace.attempts[0].start, 7 + mac.aifs as u64);
    }

    #[test]
    fn same_slot_probability_matches_enumeration() {
        // enumerate all (b1, b2) pairs: the first to reach zero seizes the
        // medium and freezes the other, so starts coincide iff b1 == b2
        let cw = 31u32;
        let same = (0..=cw).flat_map(|a| (0..=cw).map(move |b| (a, b))).filter(|(a, b)| a == b).count();
        let p = same as f64 / ((cw + 1) * (cw + 1)) as f64;
        assert_eq!(p, 1.0 / 32.0);

        let snap = snapshot(2);
        let l = links(2, |_, _| -60.0);
        let mac = small_mac(cw);
        let trials = 20_000;
        let mut hits = 0;
        for s in 0..trials {
            let trace = run_csma(&snap, &l, &mac, 200, &[0, 0], &mut rng_from_seed(s)).unwrap();
            let (a, b) = (trace.attempts[0], trace.attempts[1]);
            assert_eq!(a.start == b.start, trace.backoff_draws[0] == trace.backoff_draws[1]);
            hits += (a.start == b.start) as u32;
        }
        let f = hits as f64 / trials as f64;
        assert!((f - p).abs() < 0.01, "{f}");
    }

    #[test]
    fn hidden_stations_do_not_defer() {
        // -100 dBm is below the -85 dBm sensing threshold
        let snap = snapshot(2);
        let l = links(2, |_, _| -100.0);
        let mac = small_mac(31);
        let mut rng = rng_from_seed(9);
        let trace = run_csma(&snap, &l, &mac, 200, &[0, 0], &mut rng).unwrap();
        // both draw in the same slot, in station order
        assert_eq!(trace.attempts.len(), 2);
        for a in &trace.attempts {
            assert_eq!(a.start, mac.aifs as u64 + trace.backoff_draws[a.tx_id] as u64);
        }
    }

    #[test]
    fn rejects_inconsistent_inputs() {
        let mac = small_mac(31);
        let l = links(2, |_, _| -60.0);
        let mut rng = rng_from_seed(0);
        assert!(run_csma(&snapshot(3), &l, &mac, 200, &[0, 0, 0], &mut rng).is_err());
        assert!(run_csma(&snapshot(2), &l, &mac, 200, &[0], &mut rng).is_err());
        assert!(run_csma(&snapshot(2), &l, &mac, 199, &[0, 0], &mut rng).is_err());
        assert!(run_csma(&snapshot(2), &l, &mac, 200, &[0, 200], &mut rng).is_err());
        let bad = MacConfig { bsm_period: 34, ..MacConfig::default() };
        assert!(run_csma(&snapshot(2), &l, &bad, 10_000, &[0, 0], &mut rng).is_err());
    }

    fn collision_fraction(attempts: &[TxAttempt]) -> f64 {
        if attempts.is_empty() {
            return 0.0;
        }
        let collided = attempts
            .iter()
            .enumerate()
            .filter(|&(i, a)| attempts.iter().enumerate().any(|(j, b)| i != j && a.overlaps(b)))
            .count();
        collided as f64 / attempts.len() as f64
    }

    #[test]
    fn saturated_invariants_and_cw_ordering() {
        let n = 50;
        let snap = snapshot(n);
        let l = links(n, |_, _| -60.0);
        let mut mean = [0.0; 2];
        for (k, cw) in [31u32, 127].into_iter().enumerate() {
            let mac = MacConfig { cw, bsm_period: 100, ..MacConfig::default() };
            for seed in 0..100 {
                let mut rng = rng_from_seed(seed);
                let offsets = schedule_bsm_offsets(n, mac.bsm_period, &mut rng);
                let trace = run_csma(&snap, &l, &mac, 2000, &offsets, &mut rng).unwrap();
                assert!(trace.attempts.len() as u64 <= trace.generated);
                assert!(trace.backoff_draws.iter().all(|&b| b <= cw));
                // no station overlaps itself
                for i in 0..n {
                    let own: Vec<_> = trace.attempts.iter().filter(|a| a.tx_id == i).collect();
                    for w in own.windows(2) {
                        assert!(w[0].end() <= w[1].start);
                    }
                }
                // transmissions never start right after a busy slot
                for a in &trace.attempts {
                    if a.start == 0 {
                        continue;
                    }
                    let prev = a.start - 1;
                    let busy = trace
                        .attempts
                        .iter()
                        .any(|b| b.tx_id != a.tx_id && b.start <= prev && prev < b.end());
                    assert!(!busy, "{a:?} started after a busy slot");
                }
                mean[k] += collision_fraction(&trace.attempts) / 100.0;
            }
        }
        assert!(mean[1] < mean[0], "collision fraction cw127 {} vs cw31 {}", mean[1], mean[0]);
    }

    #[test]
    fn backoff_draws_uniform() {
        // 10^5 draws through the simulator with a lone station
        let snap = snapshot(1);
        let l = links(1, |_, _| 0.0);
        let mac = MacConfig { cw: 31, bsm_period: 100, ..MacConfig::default() };
        let mut rng = rng_from_seed(77);
        let trace = run_csma(&snap, &l, &mac, 100 * 100_000, &[0], &mut rng).unwrap();
        assert_eq!(trace.backoff_draws.len(), 100_000);
        let mut counts = [0f64; 32];
        for &b in &trace.backoff_draws {
            counts[b as usize] += 1.0;
        }
        let e = 100_000.0 / 32.0;
        let chi2: f64 = counts.iter().map(|c| (c - e).powi(2) / e).sum();
        assert!(chi2 < 44.985, "chi2 {chi2}");
    }

    #[test]
    fn lone_attempt_sinr() {
        let radio = RadioConfig::default();
        let l = links(2, |_, _| -65.3);
        let attempts = [TxAttempt { tx_id: 0, start: 10, duration: 34 }];
        let out = evaluate_receptions(&attempts, &l, &radio);
        assert_eq!(out.len(), 1);
        assert!((out[0].sinr_min - 29.7).abs() < 1e-9);
        assert!(out[0].decoded);
    }

    #[test]
    fn equal_power_overlap_fails() {
        let radio = RadioConfig::default();
        let l = links(3, |_, _| -60.0);
        let attempts = [
            TxAttempt { tx_id: 0, start: 0, duration: 34 },
            TxAttempt { tx_id: 1, start: 0, duration: 34 },
        ];
        let out = evaluate_receptions(&attempts, &l, &radio);
        let at2: Vec<_> = out.iter().filter(|o| o.rx_id == 2).collect();
        assert_eq!(at2.len(), 2);
        for o in at2 {
            assert!(o.sinr_min.abs() < 0.01);
            assert!(!o.decoded);
        }
    }

    #[test]
    fn partial_overlap_counts() {
        let radio = RadioConfig::default();
        let l = links(3, |_, _| -60.0);
        let attempts = [
            TxAttempt { tx_id: 0, start: 0, duration: 34 },
            TxAttempt { tx_id: 1, start: 33, duration: 34 },
        ];
        let out = evaluate_receptions(&attempts, &l, &radio);
        assert!(out.iter().filter(|o| o.rx_id == 2).all(|o| !o.decoded));
        let apart = [
            TxAttempt { tx_id: 0, start: 0, duration: 34 },
            TxAttempt { tx_id: 1, start: 34, duration: 34 },
        ];
        assert!(evaluate_receptions(&apart, &l, &radio).iter().all(|o| o.decoded));
    }

    #[test]
    fn half_duplex_blocks_decoding() {
        let radio = RadioConfig::default();
        // the second transmitter is far weaker at the first's receiver, so SINR alone would pass
        let l = links(2, |_, _| -50.0);
        let attempts = [
            TxAttempt { tx_id: 0, start: 0, duration: 34 },
            TxAttempt { tx_id: 1, start: 20, duration: 34 },
        ];
        let out = evaluate_receptions(&attempts, &l, &radio);
        assert_eq!(out.len(), 2);
        for o in &out {
            assert!(o.half_duplex);
            assert!(!o.decoded);
        }
    }

    #[test]
    fn decoded_implies_threshold() {
        let n = 20;
        let snap = snapshot(n);
        let l = links(n, |i, j| -50.0 - 3.0 * (i as f64 - j as f64).abs());
        let radio = RadioConfig::default();
        let mac = small_mac(15);
        let mut rng = rng_from_seed(4);
        let offsets = schedule_bsm_offsets(n, mac.bsm_period, &mut rng);
        let trace = run_csma(&snap, &l, &mac, 4000, &offsets, &mut rng).unwrap();
        let out = evaluate_receptions(&trace.attempts, &l, &radio);
        assert_eq!(out.len(), trace.attempts.len() * (n - 1));
        for o in &out {
            if o.decoded {
                assert!(o.sinr_min >= radio.sinr_threshold_db);
            }
        }
    }
}
