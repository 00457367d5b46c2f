//! Pilot patterns, delay grids and the Fourier dictionary built from them.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Set of pilot subcarriers within an `N`-subcarrier OFDM symbol.
///
/// Indices are 1-based. Subcarrier `n` sits at frequency `(n - 1)·Δf`
/// relative to the first subcarrier.
#[derive(Debug, Clone, PartialEq)]
pub struct PilotPattern {
    num_subcarriers: usize,
    pilot_indices: Vec<usize>,
    subcarrier_spacing: f64,
}

impl PilotPattern {
    pub fn new(num_subcarriers: usize, pilot_indices: Vec<usize>, subcarrier_spacing: f64) -> Result<Self> {
        if num_subcarriers == 0 {
            return Err(Error::Argument("pilot pattern needs N > 0 subcarriers".into()));
        }
        if pilot_indices.is_empty() {
            return Err(Error::Argument("pilot pattern needs at least one pilot".into()));
        }
        if !(subcarrier_spacing.is_finite() && subcarrier_spacing > 0.0) {
            return Err(Error::Argument(format!(
                "subcarrier spacing must be > 0, got {subcarrier_spacing}"
            )));
        }
        if pilot_indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Argument("pilot indices must be strictly increasing".into()));
        }
        if pilot_indices[0] < 1 || *pilot_indices.last().unwrap() > num_subcarriers {
            return Err(Error::Argument(format!(
                "pilot indices must lie in 1..={num_subcarriers}"
            )));
        }
        Ok(PilotPattern {
            num_subcarriers,
            pilot_indices,
            subcarrier_spacing,
        })
    }

    pub fn num_subcarriers(&self) -> usize {
        self.num_subcarriers
    }

    pub fn num_pilots(&self) -> usize {
        self.pilot_indices.len()
    }

    pub fn pilot_indices(&self) -> &[usize] {
        &self.pilot_indices
    }

    pub fn subcarrier_spacing(&self) -> f64 {
        self.subcarrier_spacing
    }

    /// Frequency of 1-based subcarrier `n`.
    pub fn frequency(&self, n: usize) -> f64 {
        (n - 1) as f64 * self.subcarrier_spacing
    }

    pub fn pilot_frequencies(&self) -> Vec<f64> {
        self.pilot_indices.iter().map(|&n| self.frequency(n)).collect()
    }

    pub fn all_frequencies(&self) -> Vec<f64> {
        (1..=self.num_subcarriers).map(|n| self.frequency(n)).collect()
    }
}

/// `M` pilots with stride `floor(N/M)`, starting at subcarrier 1.
pub fn equispaced_pilots(num_subcarriers: usize, num_pilots: usize, subcarrier_spacing: f64) -> Result<PilotPattern> {
    if num_pilots == 0 || num_pilots > num_subcarriers {
        return Err(Error::Argument(format!(
            "need 1 <= M <= N, got M = {num_pilots}, N = {num_subcarriers}"
        )));
    }
    let stride = num_subcarriers / num_pilots;
    let indices = (0..num_pilots).map(|i| 1 + i * stride).collect();
    PilotPattern::new(num_subcarriers, indices, subcarrier_spacing)
}

/// Uniform grid of candidate path delays on `[0, tau_max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DelayGrid {
    delays: Vec<f64>,
    resolution: f64,
    tau_max: f64,
}

impl DelayGrid {
    pub fn delays(&self) -> &[f64] {
        &self.delays
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn tau_max(&self) -> f64 {
        self.tau_max
    }

    pub fn len(&self) -> usize {
        self.delays.len()
    }

    pub fn is_empty(&self) -> bool {
        self.delays.is_empty()
    }
}

/// `num_points` delays from 0 to `tau_max` inclusive.
pub fn build_delay_grid(tau_max: f64, num_points: usize) -> Result<DelayGrid> {
    if num_points < 2 {
        return Err(Error::Argument(format!(
            "delay grid needs at least 2 points, got {num_points}"
        )));
    }
    if !(tau_max.is_finite() && tau_max > 0.0) {
        return Err(Error::Argument(format!("tau_max must be > 0, got {tau_max}")));
    }
    let last = num_points - 1;
    let resolution = tau_max / last as f64;
    let delays = (0..num_points)
        .map(|k| if k == last { tau_max } else { k as f64 * resolution })
        .collect();
    Ok(DelayGrid {
        delays,
        resolution,
        tau_max,
    })
}

/// Which subcarriers become dictionary rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DictionaryRows {
    PilotsOnly,
    AllSubcarriers,
}

/// Matrix of phasors `exp(-j2π f_m τ_k)`, rows over subcarriers and columns
/// over grid delays.
#[derive(Debug, Clone)]
pub struct Dictionary {
    matrix: DMatrix<Complex64>,
    grid: DelayGrid,
    pattern: PilotPattern,
    rows: DictionaryRows,
}

impl Dictionary {
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn grid(&self) -> &DelayGrid {
        &self.grid
    }

    pub fn pattern(&self) -> &PilotPattern {
        &self.pattern
    }

    pub fn rows(&self) -> DictionaryRows {
        self.rows
    }

    pub fn nrows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.matrix.ncols()
    }
}

pub fn build_dictionary(pattern: &PilotPattern, grid: &DelayGrid, rows: DictionaryRows) -> Dictionary {
    let freqs = match rows {
        DictionaryRows::PilotsOnly => pattern.pilot_frequencies(),
        DictionaryRows::AllSubcarriers => pattern.all_frequencies(),
    };
    let matrix = DMatrix::from_fn(freqs.len(), grid.len(), |m, k| {
        Complex64::cis(-2.0 * std::f64::consts::PI * freqs[m] * grid.delays[k])
    });
    Dictionary {
        matrix,
        grid: grid.clone(),
        pattern: pattern.clone(),
        rows,
    }
}
