//! Random multipath channels, their frequency responses, and noisy pilot
//! observations.
//!
//! A channel has `K ~ Poisson(mean_paths)` paths with delays uniform on
//! `[0, tau_max]` and gains `β_k | τ_k ~ CN(0, u·exp(-τ_k/v))`. The scale
//! `u` is chosen so that the expected total path power is one.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};

use crate::dictionary::PilotPattern;
use crate::error::{Error, Result};

/// LTE 20 MHz sampling time, in seconds.
pub const SAMPLING_TIME: f64 = 32.55e-9;
/// Subcarrier spacing, in Hz.
pub const SUBCARRIER_SPACING: f64 = 15e3;
/// Cyclic prefix length in samples; bounds the path delays.
pub const CP_SAMPLES: f64 = 144.0;

/// `u = 1 / (K̄ · (v/τ_max) · (1 - exp(-τ_max/v)))`.
pub fn compute_power_scale(mean_paths: f64, tau_max: f64, decay: f64) -> Result<f64> {
    for (name, v) in [("mean_paths", mean_paths), ("tau_max", tau_max), ("decay", decay)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::Argument(format!("{name} must be finite and > 0, got {v}")));
        }
    }
    let ratio = decay / tau_max;
    Ok(1.0 / (mean_paths * ratio * (-(-1.0 / ratio).exp_m1())))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    pub mean_paths: f64,
    pub tau_max: f64,
    /// Decay constant `v` of the exponential power-delay profile.
    pub decay: f64,
    pub power_scale: f64,
    pub sampling_time: f64,
}

impl ChannelParams {
    pub fn new(mean_paths: f64, tau_max: f64, decay: f64, sampling_time: f64) -> Result<Self> {
        Ok(ChannelParams {
            mean_paths,
            tau_max,
            decay,
            power_scale: compute_power_scale(mean_paths, tau_max, decay)?,
            sampling_time,
        })
    }

    /// Ten paths on average, delays within the 144-sample cyclic prefix,
    /// decay constant of 20 samples.
    pub fn lte_default() -> Self {
        Self::new(
            10.0,
            CP_SAMPLES * SAMPLING_TIME,
            20.0 * SAMPLING_TIME,
            SAMPLING_TIME,
        )
        .expect("default channel parameters are valid")
    }

    /// Gain variance of a path at delay `tau`.
    pub fn path_variance(&self, tau: f64) -> f64 {
        self.power_scale * (-tau / self.decay).exp()
    }
}

/// Draws a circularly-symmetric complex Gaussian sample with total variance
/// `variance` (each of real and imaginary part gets half).
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> Complex64 {
    let s = (0.5 * variance).sqrt();
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(s * re, s * im)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub delays: Vec<f64>,
    pub gains: Vec<Complex64>,
}

impl ChannelRealization {
    pub fn new(delays: Vec<f64>, gains: Vec<Complex64>) -> Result<Self> {
        if delays.len() != gains.len() {
            return Err(Error::Argument(format!(
                "{} delays but {} gains",
                delays.len(),
                gains.len()
            )));
        }
        if delays.iter().any(|d| !d.is_finite() || *d < 0.0)
            || gains.iter().any(|g| !g.re.is_finite() || !g.im.is_finite())
        {
            return Err(Error::Argument("channel delays and gains must be finite".into()));
        }
        Ok(ChannelRealization { delays, gains })
    }

    pub fn num_paths(&self) -> usize {
        self.delays.len()
    }

    pub fn total_power(&self) -> f64 {
        self.gains.iter().map(|g| g.norm_sqr()).sum()
    }

    /// `h(f) = Σ_k β_k exp(-j2π f τ_k)` at each requested frequency.
    pub fn frequency_response(&self, freqs: &[f64]) -> DVector<Complex64> {
        DVector::from_iterator(
            freqs.len(),
            freqs.iter().map(|&f| {
                self.delays
                    .iter()
                    .zip(&self.gains)
                    .map(|(&tau, &g)| g * Complex64::cis(-2.0 * std::f64::consts::PI * f * tau))
                    .sum()
            }),
        )
    }

    /// CSV with header `path,delay_s,gain_re,gain_im`; values use the
    /// shortest representation that round-trips exactly.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("path,delay_s,gain_re,gain_im\n");
        for (k, (tau, g)) in self.delays.iter().zip(&self.gains).enumerate() {
            let _ = writeln!(out, "{k},{tau:e},{:e},{:e}", g.re, g.im);
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        match lines.next() {
            Some("path,delay_s,gain_re,gain_im") => {}
            other => {
                return Err(Error::Config(format!("unexpected channel CSV header {other:?}")))
            }
        }
        let mut delays = Vec::new();
        let mut gains = Vec::new();
        for (i, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let fields: Vec<&str> = line.split(',').collect();
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Config(format!("channel CSV line {}: {e}", i + 2)))
            };
            if fields.len() != 4 {
                return Err(Error::Config(format!(
                    "channel CSV line {} has {} fields",
                    i + 2,
                    fields.len()
                )));
            }
            delays.push(parse(fields[1])?);
            gains.push(Complex64::new(parse(fields[2])?, parse(fields[3])?));
        }
        Self::new(delays, gains)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }
}

pub fn sample_channel<R: Rng + ?Sized>(rng: &mut R, params: &ChannelParams) -> ChannelRealization {
    let poisson = Poisson::new(params.mean_paths).expect("mean_paths validated > 0");
    let num_paths = poisson.sample(rng) as usize;
    let mut delays = Vec::with_capacity(num_paths);
    let mut gains = Vec::with_capacity(num_paths);
    for _ in 0..num_paths {
        let tau = rng.gen_range(0.0..=params.tau_max);
        delays.push(tau);
        gains.push(complex_gaussian(rng, params.path_variance(tau)));
    }
    ChannelRealization { delays, gains }
}

/// Equalised pilot observations `y = h_P + w`.
#[derive(Debug, Clone)]
pub struct Observation {
    pub y: DVector<Complex64>,
    /// Precision `λ` the noise was drawn with; `∞` for noiseless data.
    pub noise_precision_true: f64,
    pub pattern: PilotPattern,
}

/// Adds circular complex Gaussian noise of total variance
/// `1/noise_precision` per pilot. `noise_precision = f64::INFINITY` adds
/// nothing and draws nothing from `rng`.
pub fn observe_pilots<R: Rng + ?Sized>(
    pattern: &PilotPattern,
    h_pilots: &DVector<Complex64>,
    noise_precision: f64,
    rng: &mut R,
) -> Result<Observation> {
    if h_pilots.len() != pattern.num_pilots() {
        return Err(Error::Argument(format!(
            "{} pilot responses for {} pilots",
            h_pilots.len(),
            pattern.num_pilots()
        )));
    }
    if !(noise_precision > 0.0) {
        return Err(Error::Argument(format!(
            "noise precision must be > 0, got {noise_precision}"
        )));
    }
    let y = if noise_precision.is_infinite() {
        h_pilots.clone()
    } else {
        let var = 1.0 / noise_precision;
        h_pilots.map(|h| h + complex_gaussian(rng, var))
    };
    Ok(Observation {
        y,
        noise_precision_true: noise_precision,
        pattern: pattern.clone(),
    })
}

/// Noise precision for a received-symbol SNR in dB, with unit channel power.
pub fn snr_db_to_precision(snr_db: f64) -> f64 {
    10f64.powf(snr_db / 10.0)
}
