//! First-order radio energy model: electronics cost per bit plus a
//! free-space (`d²`) or multipath (`d⁴`) amplifier term.

mod lifetime;

pub use lifetime::{simulate_rounds, RoundLog, RoundRecord};

use crate::error::{check, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyParams {
    /// Electronics energy, J/bit.
    pub e_elec: f64,
    /// Free-space amplifier energy, J/bit/m².
    pub eps_fs: f64,
    /// Multipath amplifier energy, J/bit/m⁴.
    pub eps_mp: f64,
    /// Aggregation energy, J/bit/signal.
    pub e_agg: f64,
    /// Packet size in bits.
    pub l_bits: f64,
    /// Crossover distance between the two amplifier laws, meters.
    pub tau0: f64,
}

impl Default for EnergyParams {
    fn default() -> Self {
        EnergyParams::new(50e-9, 10e-12, 0.0013e-12, 5e-9, 4000.0)
            .expect("default radio constants are valid")
    }
}

impl EnergyParams {
    /// Builds the parameters with `tau0 = sqrt(eps_fs / eps_mp)`, where both
    /// amplifier laws cost the same.
    pub fn new(e_elec: f64, eps_fs: f64, eps_mp: f64, e_agg: f64, l_bits: f64) -> Result<Self> {
        let p = EnergyParams {
            e_elec,
            eps_fs,
            eps_mp,
            e_agg,
            l_bits,
            tau0: libm::sqrt(eps_fs / eps_mp),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("e_elec", self.e_elec),
            ("eps_fs", self.eps_fs),
            ("eps_mp", self.eps_mp),
            ("e_agg", self.e_agg),
            ("l_bits", self.l_bits),
            ("tau0", self.tau0),
        ] {
            check(v > 0.0 && v.is_finite(), name, v, "> 0")?;
        }
        Ok(())
    }
}

/// Transmit cost over distance `d`.
pub fn e_tx(d: f64, p: &EnergyParams) -> f64 {
    if d < p.tau0 {
        p.l_bits * p.e_elec + p.l_bits * p.eps_fs * d * d
    } else {
        p.l_bits * p.e_elec + p.l_bits * p.eps_mp * d * d * d * d
    }
}

pub fn e_rx(p: &EnergyParams) -> f64 {
    p.l_bits * p.e_elec
}

/// Expected non-CH cost when `m` nodes are spread uniformly over a disk of
/// radius `r_corr` around the CH: `l E_elec + l eps_fs m r² / 2`.
pub fn e_non_ch_expected(m: usize, r_corr: f64, p: &EnergyParams) -> f64 {
    p.l_bits * p.e_elec + p.l_bits * p.eps_fs * (m as f64 * r_corr * r_corr / 2.0)
}

/// Non-CH cost at a known distance to the CH; always free-space.
pub fn e_non_ch_actual(d_to_ch: f64, p: &EnergyParams) -> f64 {
    p.l_bits * p.e_elec + p.l_bits * p.eps_fs * d_to_ch * d_to_ch
}

/// CH cost with `m` active nodes (CH included): receive `m - 1` packets,
/// aggregate `m` signals, send one packet to the sink over multipath.
pub fn e_ch(m: usize, d_to_bs: f64, p: &EnergyParams) -> f64 {
    debug_assert!(m >= 1);
    let m = m as f64;
    let d2 = d_to_bs * d_to_bs;
    p.l_bits * p.e_elec * (m - 1.0)
        + p.l_bits * p.e_agg * m
        + p.l_bits * p.e_elec
        + p.l_bits * p.eps_mp * d2 * d2
}

/// `E_CH + (m - 1) E_non-CH` with the expected non-CH cost.
pub fn e_cluster(m: usize, r_corr: f64, d_to_bs: f64, p: &EnergyParams) -> f64 {
    e_ch(m, d_to_bs, p) + (m as f64 - 1.0) * e_non_ch_expected(m, r_corr, p)
}
