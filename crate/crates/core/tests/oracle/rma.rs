// Direct transcription of the RMa rows of the 3GPP TR 38.901 path-loss
// table, kept deliberately separate from the crate's implementation.
// `rma_oracle.py` next to this file evaluates the same expressions and
// produced the frozen constants used by the unit tests.
#![allow(dead_code)]

pub fn d_bp(h_bs: f64, h_ut: f64, fc_hz: f64) -> f64 {
    2.0 * std::f64::consts::PI * h_bs * h_ut * fc_hz / 3.0e8
}

pub fn p_los(d2d: f64) -> f64 {
    if d2d <= 10.0 {
        1.0
    } else {
        ((10.0 - d2d) / 1000.0).exp()
    }
}

fn pl1(d: f64, fc: f64, h: f64) -> f64 {
    let a = 20.0 * f64::log10(40.0 * std::f64::consts::PI * d * fc / 3.0);
    let b = f64::min(0.03 * f64::powf(h, 1.72), 10.0) * f64::log10(d);
    let c = f64::min(0.044 * f64::powf(h, 1.72), 14.77);
    let e = 0.002 * f64::log10(h) * d;
    a + b - c + e
}

/// (loss dB, sigma dB) for 10 m <= d2d <= 10 km.
pub fn pl_los(d2d: f64, d3d: f64, fc: f64, h: f64, h_bs: f64, h_ut: f64) -> (f64, f64) {
    let bp = d_bp(h_bs, h_ut, fc * 1.0e9);
    if d2d <= bp {
        (pl1(d3d, fc, h), 4.0)
    } else {
        (pl1(bp, fc, h) + 40.0 * f64::log10(d3d / bp), 6.0)
    }
}

pub fn pl1_at(d3d: f64, fc: f64, h: f64) -> f64 {
    pl1(d3d, fc, h)
}

pub fn pl2_at(d3d: f64, fc: f64, h: f64, h_bs: f64, h_ut: f64) -> f64 {
    let bp = d_bp(h_bs, h_ut, fc * 1.0e9);
    pl1(bp, fc, h) + 40.0 * f64::log10(d3d / bp)
}

/// PL'_NLOS with the given h_bs (no clamping here).
pub fn pl_nlos_prime(d3d: f64, fc: f64, h: f64, w: f64, h_bs: f64, h_ut: f64) -> f64 {
    let lg = f64::log10;
    161.04 - 7.1 * lg(w) + 7.5 * lg(h) - (24.37 - 3.7 * (h / h_bs) * (h / h_bs)) * lg(h_bs)
        + (43.42 - 3.1 * lg(h_bs)) * (lg(d3d) - 3.0)
        + 20.0 * lg(fc)
        - (3.2 * lg(11.75 * h_ut) * lg(11.75 * h_ut) - 4.97)
}

/// (loss dB, sigma dB); h_bs is raised to 10 m inside PL' only.
pub fn pl_nlos(d2d: f64, d3d: f64, fc: f64, h: f64, w: f64, h_bs: f64, h_ut: f64) -> (f64, f64) {
    let los = pl_los(d2d, d3d, fc, h, h_bs, h_ut).0;
    let prime = pl_nlos_prime(d3d, fc, h, w, if h_bs < 10.0 { 10.0 } else { h_bs }, h_ut);
    (if los > prime { los } else { prime }, 8.0)
}
