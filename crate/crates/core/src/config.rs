//! System parameters: file format, validation, unit conversion, and the
//! constants derived from them.
//!
//! Configuration files are plain `key = value` text, one field per line,
//! `#` comments allowed. Keys match the struct field names exactly and
//! unknown or repeated keys are hard errors — a typo must never silently
//! fall back to a default. Densities are configured per km² and transmit
//! power in dBm (the conventional units for these quantities); everything
//! is converted to SI once, at validation time.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::scalar::Scalar;

/// Which closed form to use for the per-contender channel-access
/// probability. `Corrected` agrees with exact enumeration of the contention
/// process; `Paper` preserves a legacy algebraic variant that overshoots
/// (it can exceed 1 for sparse contention) and is kept for side-by-side
/// comparison. See `analytics::contention` for both formulas.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FormulaMode {
    Paper,
    Corrected,
}

impl fmt::Display for FormulaMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FormulaMode::Paper => write!(f, "paper"),
            FormulaMode::Corrected => write!(f, "corrected"),
        }
    }
}

impl FromStr for FormulaMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "paper" => Ok(FormulaMode::Paper),
            "corrected" => Ok(FormulaMode::Corrected),
            other => Err(format!(
                "unknown formula_mode `{other}` (expected `paper` or `corrected`)"
            )),
        }
    }
}

/// Raw system parameters, in the units a user writes them in.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemConfig<F> {
    /// User density λ₁, nodes per km².
    pub user_density: F,
    /// Access-point density λ₂, nodes per km².
    pub ap_density: F,
    /// Per-user per-slot request probability λ ∈ [0, 1].
    pub request_rate: F,
    /// Interference-suppression radius R, meters.
    pub suppression_radius: F,
    /// Slot duration τ, seconds.
    pub slot_duration: F,
    /// Channel bandwidth B, Hz.
    pub bandwidth: F,
    /// Packet size T, bits (one packet must fit in one slot).
    pub packet_size: F,
    /// Transmit power, dBm.
    pub tx_power: F,
    /// Path-loss exponent η (> 2 for a convergent far field).
    pub pathloss_exponent: F,
    /// Noise power σ², watts.
    pub noise_power: F,
    /// Shape constant K of the Voronoi cell-population law.
    pub voronoi_shape: F,
    pub formula_mode: FormulaMode,
    /// Rayleigh (unit-mean exponential) fading on links; off = pure path loss.
    pub fading_enabled: bool,
    /// Side length L of the square simulation region, meters (torus wrap).
    pub region_side: F,
}

impl<F: Scalar> Default for SystemConfig<F> {
    fn default() -> Self {
        SystemConfig {
            user_density: F::of(1000.0),
            ap_density: F::of(100.0),
            request_rate: F::of(0.03),
            suppression_radius: F::of(250.0),
            slot_duration: F::of(0.5),
            bandwidth: F::of(1e7),
            packet_size: F::of(1e7),
            tx_power: F::of(33.0),
            pathloss_exponent: F::of(4.0),
            noise_power: F::zero(),
            voronoi_shape: F::of(3.5),
            formula_mode: FormulaMode::Corrected,
            fading_enabled: true,
            region_side: F::of(2000.0),
        }
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Malformed { line: usize, text: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: key `{key}` given more than once")]
    DuplicateKey { line: usize, key: String },
    #[error("line {line}: cannot parse `{key}`: {message}")]
    BadValue {
        line: usize,
        key: String,
        message: String,
    },
    #[error("field `{field}`: {message}")]
    OutOfRange { field: &'static str, message: String },
}

impl<F: Scalar> SystemConfig<F> {
    /// Parses `key = value` text, starting from defaults. Fail-closed:
    /// unknown keys, duplicates, and malformed lines are all errors.
    pub fn from_key_values(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = SystemConfig::default();
        let mut seen: Vec<String> = Vec::new();
        for (idx, raw_line) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw_line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(ConfigError::Malformed {
                    line,
                    text: content.to_string(),
                });
            };
            let key = key.trim();
            let value = value.trim();
            if seen.iter().any(|k| k == key) {
                return Err(ConfigError::DuplicateKey {
                    line,
                    key: key.to_string(),
                });
            }
            seen.push(key.to_string());
            let bad = |message: String| ConfigError::BadValue {
                line,
                key: key.to_string(),
                message,
            };
            let parse_num = |value: &str| -> Result<F, ConfigError> {
                value
                    .parse::<f64>()
                    .map(F::of)
                    .map_err(|e| bad(e.to_string()))
            };
            match key {
                "user_density" => cfg.user_density = parse_num(value)?,
                "ap_density" => cfg.ap_density = parse_num(value)?,
                "request_rate" => cfg.request_rate = parse_num(value)?,
                "suppression_radius" => cfg.suppression_radius = parse_num(value)?,
                "slot_duration" => cfg.slot_duration = parse_num(value)?,
                "bandwidth" => cfg.bandwidth = parse_num(value)?,
                "packet_size" => cfg.packet_size = parse_num(value)?,
                "tx_power" => cfg.tx_power = parse_num(value)?,
                "pathloss_exponent" => cfg.pathloss_exponent = parse_num(value)?,
                "noise_power" => cfg.noise_power = parse_num(value)?,
                "voronoi_shape" => cfg.voronoi_shape = parse_num(value)?,
                "formula_mode" => cfg.formula_mode = value.parse().map_err(bad)?,
                "fading_enabled" => {
                    cfg.fading_enabled = match value {
                        "true" => true,
                        "false" => false,
                        other => {
                            return Err(bad(format!("expected `true` or `false`, got `{other}`")))
                        }
                    }
                }
                "region_side" => cfg.region_side = parse_num(value)?,
                _ => {
                    return Err(ConfigError::UnknownKey {
                        line,
                        key: key.to_string(),
                    })
                }
            }
        }
        Ok(cfg)
    }

    /// Checks every invariant and converts to SI units.
    pub fn validate(self) -> Result<ValidatedConfig<F>, ConfigError> {
        fn check<F: Scalar>(
            ok: bool,
            field: &'static str,
            message: impl FnOnce() -> String,
        ) -> Result<(), ConfigError> {
            if ok {
                Ok(())
            } else {
                Err(ConfigError::OutOfRange {
                    field,
                    message: message(),
                })
            }
        }
        let c = &self;
        let fin = |x: F| x.is_finite();
        check::<F>(
            fin(c.user_density) && c.user_density >= F::zero(),
            "user_density",
            || format!("must be finite and >= 0, got {}", c.user_density),
        )?;
        check::<F>(
            fin(c.ap_density) && c.ap_density > F::zero(),
            "ap_density",
            || format!("must be finite and > 0, got {}", c.ap_density),
        )?;
        check::<F>(
            fin(c.request_rate) && c.request_rate >= F::zero() && c.request_rate <= F::one(),
            "request_rate",
            || format!("must lie in [0, 1], got {}", c.request_rate),
        )?;
        check::<F>(
            fin(c.suppression_radius) && c.suppression_radius > F::zero(),
            "suppression_radius",
            || format!("must be finite and > 0, got {}", c.suppression_radius),
        )?;
        check::<F>(
            fin(c.slot_duration) && c.slot_duration > F::zero(),
            "slot_duration",
            || format!("must be finite and > 0, got {}", c.slot_duration),
        )?;
        check::<F>(fin(c.bandwidth) && c.bandwidth > F::zero(), "bandwidth", || {
            format!("must be finite and > 0, got {}", c.bandwidth)
        })?;
        check::<F>(
            fin(c.packet_size) && c.packet_size > F::zero(),
            "packet_size",
            || format!("must be finite and > 0, got {}", c.packet_size),
        )?;
        check::<F>(fin(c.tx_power), "tx_power", || {
            format!("must be finite, got {}", c.tx_power)
        })?;
        check::<F>(
            fin(c.pathloss_exponent) && c.pathloss_exponent > F::of(2.0),
            "pathloss_exponent",
            || {
                format!(
                    "must be > 2 for a convergent far field, got {}",
                    c.pathloss_exponent
                )
            },
        )?;
        check::<F>(
            fin(c.noise_power) && c.noise_power >= F::zero(),
            "noise_power",
            || format!("must be finite and >= 0, got {}", c.noise_power),
        )?;
        check::<F>(
            fin(c.voronoi_shape) && c.voronoi_shape > F::zero(),
            "voronoi_shape",
            || format!("must be finite and > 0, got {}", c.voronoi_shape),
        )?;
        check::<F>(
            fin(c.region_side) && c.region_side > F::zero(),
            "region_side",
            || format!("must be finite and > 0, got {}", c.region_side),
        )?;

        let per_km2 = F::of(1e-6); // nodes/km² → nodes/m²
        let lambda_u = self.user_density * per_km2;
        let lambda_a = self.ap_density * per_km2;
        let radius = self.suppression_radius;
        let suppression_area = F::PI() * radius * radius;
        let contention_mass = lambda_a * suppression_area;

        // T̄ = 2^{T/(τB)} − 1: the SINR a packet needs so that one slot of
        // the shared channel carries it.
        let bits_per_slot = self.slot_duration * self.bandwidth;
        let exponent = self.packet_size / bits_per_slot;
        let sinr_threshold = F::of(2.0).powf(exponent) - F::one();
        check::<F>(
            sinr_threshold.is_finite() && sinr_threshold > F::zero(),
            "packet_size",
            || {
                format!(
                    "packet_size/(slot_duration*bandwidth) = {} makes the SINR threshold \
                     degenerate or overflow",
                    exponent
                )
            },
        )?;

        let power_watts = F::of(10.0).powf((self.tx_power - F::of(30.0)) / F::of(10.0));

        Ok(ValidatedConfig {
            lambda_u,
            lambda_a,
            lambda: self.request_rate,
            radius,
            suppression_area,
            contention_mass,
            sinr_threshold,
            power_watts,
            eta: self.pathloss_exponent,
            noise: self.noise_power,
            shape_k: self.voronoi_shape,
            mode: self.formula_mode,
            fading: self.fading_enabled,
            side: self.region_side,
            source: self,
        })
    }
}

/// Validated parameters in SI units plus the derived constants every module
/// needs. Construct only through [`SystemConfig::validate`].
#[derive(Clone, Debug)]
pub struct ValidatedConfig<F> {
    /// λ₁, users per m².
    pub lambda_u: F,
    /// λ₂, APs per m².
    pub lambda_a: F,
    /// λ, per-user per-slot request probability.
    pub lambda: F,
    /// R, meters.
    pub radius: F,
    /// A = πR², m².
    pub suppression_area: F,
    /// ν = λ₂·A, the mean number of APs inside one suppression region.
    pub contention_mass: F,
    /// T̄ = 2^{T/(τB)} − 1.
    pub sinr_threshold: F,
    /// Transmit power, watts.
    pub power_watts: F,
    /// Path-loss exponent η.
    pub eta: F,
    /// Noise power σ², watts.
    pub noise: F,
    /// Voronoi population shape constant K.
    pub shape_k: F,
    pub mode: FormulaMode,
    pub fading: bool,
    /// Region side L, meters.
    pub side: F,
    /// The raw config this was validated from (original units).
    pub source: SystemConfig<F>,
}

impl<F: Scalar> ValidatedConfig<F> {
    /// Mean number of users per Voronoi cell, λ₁/λ₂.
    pub fn mean_cell_population(&self) -> F {
        self.lambda_u / self.lambda_a
    }

    /// Re-validates with a different formula mode (cheap; for mode sweeps).
    pub fn with_mode(&self, mode: FormulaMode) -> ValidatedConfig<F> {
        let mut raw = self.source.clone();
        raw.formula_mode = mode;
        raw.validate().expect("already-validated config")
    }
}
