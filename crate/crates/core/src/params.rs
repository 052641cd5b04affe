//! Physical constants, crystal/beam configuration, and the derived timing
//! and spectral-filter parameters.
//!
//! Internal units: time in femtoseconds, length in millimetres (crystal,
//! detector distance) or nanometres (wavelength), angular frequency in rad/fs.
//! Keeping τ₁ ≈ 70 and β = 50 near unity avoids mixing 1e-14 s with 1e15 rad/s
//! in the same expression.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Speed of light, exact SI value (m/s).
pub const SPEED_OF_LIGHT_M_PER_S: f64 = 299_792_458.0;

/// Speed of light in nm/fs.
pub const SPEED_OF_LIGHT_NM_PER_FS: f64 = SPEED_OF_LIGHT_M_PER_S * 1e9 / 1e15;

/// Delay-axis scale used for the unmodulated dip plot (0.14e14 s⁻¹, in fs⁻¹).
pub const DIP_DELAY_SCALE_PER_FS: f64 = 0.14e14 * 1e-15;

/// Delay-axis scale used for the shaped wave-packet plots (2e14 s⁻¹, in fs⁻¹).
pub const SHAPED_DELAY_SCALE_PER_FS: f64 = 2e14 * 1e-15;

fn require_positive<S: Scalar>(name: &'static str, value: S) -> Result<S> {
    if value.is_finite() && value > S::zero() {
        Ok(value)
    } else {
        Err(Error::param(
            name,
            format!("must be finite and > 0, got {value}"),
        ))
    }
}

/// Which optical frequency enters γ = 2α sin(βω/2).
///
/// The expansion is written with the pump frequency, but the only frequency
/// quoted alongside β is that of the degenerate photons. Both are offered;
/// [`FrequencyReading::Pump`] is the default.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FrequencyReading {
    #[default]
    Pump,
    Degenerate,
}

/// Crystal and beam constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpticalConfig<S> {
    /// Group-velocity mismatch 1/u_o − 1/u_e, fs/mm.
    pub inv_group_velocity_diff: S,
    /// Crystal length, mm.
    pub crystal_length: S,
    /// Distance of each detector from the crystal centre, mm.
    pub detector_distance: S,
    /// Wavelength of each photon at degeneracy, nm.
    pub degenerate_wavelength: S,
    /// Pump angular frequency, rad/fs.
    pub pump_angular_frequency: S,
}

impl<S: Scalar> OpticalConfig<S> {
    /// Builds a configuration whose pump frequency is twice the degenerate
    /// photon frequency: ω_p = 2πc / (λ/2).
    pub fn new(
        inv_group_velocity_diff: S,
        crystal_length: S,
        detector_distance: S,
        degenerate_wavelength: S,
    ) -> Result<Self> {
        let wavelength = require_positive("degenerate_wavelength", degenerate_wavelength)?;
        let pump = S::lit(4.0) * S::PI() * S::lit(SPEED_OF_LIGHT_NM_PER_FS) / wavelength;
        Self::with_pump_frequency(
            inv_group_velocity_diff,
            crystal_length,
            detector_distance,
            degenerate_wavelength,
            pump,
        )
    }

    /// Builds a configuration with an explicitly supplied pump frequency.
    pub fn with_pump_frequency(
        inv_group_velocity_diff: S,
        crystal_length: S,
        detector_distance: S,
        degenerate_wavelength: S,
        pump_angular_frequency: S,
    ) -> Result<Self> {
        let cfg = OpticalConfig {
            inv_group_velocity_diff,
            crystal_length,
            detector_distance,
            degenerate_wavelength,
            pump_angular_frequency,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// BBO-like parameter set: 2.5 ps/cm mismatch, 0.56 mm crystal, 700 nm
    /// degenerate photons, detectors 520 mm away (τ₂ = 130 ps).
    pub fn reference() -> Self {
        Self::new(S::lit(250.0), S::lit(0.56), S::lit(520.0), S::lit(700.0))
            .expect("reference parameters are valid")
    }

    pub fn validate(&self) -> Result<()> {
        require_positive("inv_group_velocity_diff", self.inv_group_velocity_diff)?;
        require_positive("crystal_length", self.crystal_length)?;
        require_positive("detector_distance", self.detector_distance)?;
        require_positive("degenerate_wavelength", self.degenerate_wavelength)?;
        require_positive("pump_angular_frequency", self.pump_angular_frequency)?;
        Ok(())
    }

    /// Angular frequency of one degenerate photon, rad/fs.
    pub fn degenerate_angular_frequency(&self) -> S {
        S::two() * S::PI() * S::lit(SPEED_OF_LIGHT_NM_PER_FS) / self.degenerate_wavelength
    }

    pub fn modulation_frequency(&self, reading: FrequencyReading) -> S {
        match reading {
            FrequencyReading::Pump => self.pump_angular_frequency,
            FrequencyReading::Degenerate => self.degenerate_angular_frequency(),
        }
    }
}

/// Delays derived from the crystal geometry, in fs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimingParams<S> {
    /// Half the o/e group-delay walk-off across the crystal; the half-base of
    /// the unmodulated dip.
    pub tau1: S,
    /// o/e walk-off accumulated over the crystal-to-detector distance.
    pub tau2: S,
}

impl<S: Scalar> TimingParams<S> {
    pub fn new(tau1: S, tau2: S) -> Result<Self> {
        Ok(TimingParams {
            tau1: require_positive("tau1", tau1)?,
            tau2: require_positive("tau2", tau2)?,
        })
    }
}

/// τ₁ = Δ·d/2 and τ₂ = Δ·z, with Δ = 1/u_o − 1/u_e.
pub fn derive_timing<S: Scalar>(cfg: &OpticalConfig<S>) -> Result<TimingParams<S>> {
    let mismatch = require_positive("inv_group_velocity_diff", cfg.inv_group_velocity_diff)?;
    let length = require_positive("crystal_length", cfg.crystal_length)?;
    let distance = require_positive("detector_distance", cfg.detector_distance)?;
    TimingParams::new(mismatch * length / S::two(), mismatch * distance)
}

/// γ = 2α sin(βω₀/2). No wrapping of the sine argument and the sign of α is
/// carried through.
pub fn modulation_gamma<S: Scalar>(alpha: S, beta: S, omega0: S) -> Result<S> {
    require_positive("beta", beta)?;
    require_positive("omega0", omega0)?;
    Ok(S::two() * alpha * (beta * omega0 / S::two()).sin())
}

/// Dimensionless plotting delay τ' = scale·(τ + τ₂).
pub fn effective_delay<S: Scalar>(tau_plus_tau2: S, scale: S) -> S {
    debug_assert!(scale > S::zero());
    scale * tau_plus_tau2
}

/// Spectral phase filter θ(ω) = α cos(βω), reduced to the single effective
/// depth γ that the coincidence rate depends on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseFilter<S> {
    alpha: Option<S>,
    beta: S,
    gamma: S,
}

impl<S: Scalar> PhaseFilter<S> {
    /// Sets γ directly.
    pub fn from_gamma(gamma: S, beta: S) -> Result<Self> {
        if !gamma.is_finite() {
            return Err(Error::param("gamma", "must be finite"));
        }
        Ok(PhaseFilter {
            alpha: None,
            beta: require_positive("beta", beta)?,
            gamma,
        })
    }

    /// Derives γ from the modulation depth α and the optical frequency ω₀;
    /// pick ω₀ with [`OpticalConfig::modulation_frequency`].
    pub fn from_alpha(alpha: S, beta: S, omega0: S) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::param("alpha", "must be finite"));
        }
        let gamma = modulation_gamma(alpha, beta, omega0)?;
        Ok(PhaseFilter {
            alpha: Some(alpha),
            beta,
            gamma,
        })
    }

    pub fn alpha(&self) -> Option<S> {
        self.alpha
    }

    pub fn beta(&self) -> S {
        self.beta
    }

    pub fn gamma(&self) -> S {
        self.gamma
    }

    /// A filter with γ = 0 leaves the two-photon state untouched.
    pub fn is_transparent(&self) -> bool {
        self.gamma == S::zero()
    }
}
