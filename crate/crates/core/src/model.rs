//! Problem configuration: media, geometry, modes, admissible spectral
//! parameters and search sectors, with all validation.
//!
//! Media are constant isotropic pairs (eps, mu) and (eps_hat, mu_hat) on a
//! ball of radius R. Validation enforces uniform ellipticity and the three
//! contrast clauses (permittivity, permeability, impedance ratio) that
//! guarantee a discrete transmission spectrum; each clause carries a relative
//! margin so near-degenerate media are rejected before they can starve the
//! dispersion determinant.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default relative margin for the three contrast clauses.
pub const DEFAULT_CONTRAST_MARGIN: f64 = 1e-6;

/// Relative slack for the sector inequality so that exact-equality
/// configurations (the 45-degree ray with gamma = 1) are accepted despite
/// floating-point trigonometry.
const SECTOR_SLACK: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("coefficient {name} = {value} is not a positive finite real (uniform ellipticity)")]
    NonElliptic { name: &'static str, value: f64 },
    #[error("contrast condition violated: {clause}")]
    ConditionHViolated { clause: ContrastClause },
    #[error("radius = {0} must be a positive finite real")]
    BadRadius(f64),
    #[error(
        "spectral parameter outside sector: |Im(k^2)| = {im_k2_abs:.6e} < gamma |k|^2 = {bound:.6e}"
    )]
    SectorViolation { im_k2_abs: f64, bound: f64 },
    #[error("|k| = {abs_k:.6e} below the magnitude floor k_min = {k_min:.6e}")]
    MagnitudeTooSmall { abs_k: f64, k_min: f64 },
    #[error("degree must be >= 1 (no monopole vector harmonics), got {0}")]
    BadDegree(usize),
    #[error("sector ratio gamma = {0} must lie in (0, 2]")]
    BadGamma(f64),
    #[error("sector cut radius omega0 = {0} must be positive")]
    BadOmega0(f64),
}

/// Which of the three contrast clauses failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ContrastClause {
    Permittivity,
    Permeability,
    ImpedanceRatio,
}

impl std::fmt::Display for ContrastClause {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ContrastClause::Permittivity => write!(f, "eps == eps_hat within margin"),
            ContrastClause::Permeability => write!(f, "mu == mu_hat within margin"),
            ContrastClause::ImpedanceRatio => {
                write!(f, "eps/mu == eps_hat/mu_hat within margin")
            }
        }
    }
}

/// Validated constant isotropic media on a ball.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MediaConfig {
    pub eps: f64,
    pub mu: f64,
    pub eps_hat: f64,
    pub mu_hat: f64,
    pub radius: f64,
}

impl MediaConfig {
    /// Validate the four coefficients and the radius. The contrast margin is
    /// relative (default [`DEFAULT_CONTRAST_MARGIN`]).
    pub fn new(
        eps: f64,
        mu: f64,
        eps_hat: f64,
        mu_hat: f64,
        radius: f64,
    ) -> Result<Self, ModelError> {
        Self::with_margin(eps, mu, eps_hat, mu_hat, radius, DEFAULT_CONTRAST_MARGIN)
    }

    pub fn with_margin(
        eps: f64,
        mu: f64,
        eps_hat: f64,
        mu_hat: f64,
        radius: f64,
        margin: f64,
    ) -> Result<Self, ModelError> {
        for (name, value) in [
            ("eps", eps),
            ("mu", mu),
            ("eps_hat", eps_hat),
            ("mu_hat", mu_hat),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(ModelError::NonElliptic { name, value });
            }
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(ModelError::BadRadius(radius));
        }
        let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs());
        if rel(eps, eps_hat) <= margin {
            return Err(ModelError::ConditionHViolated {
                clause: ContrastClause::Permittivity,
            });
        }
        if rel(mu, mu_hat) <= margin {
            return Err(ModelError::ConditionHViolated {
                clause: ContrastClause::Permeability,
            });
        }
        if rel(eps / mu, eps_hat / mu_hat) <= margin {
            return Err(ModelError::ConditionHViolated {
                clause: ContrastClause::ImpedanceRatio,
            });
        }
        Ok(MediaConfig {
            eps,
            mu,
            eps_hat,
            mu_hat,
            radius,
        })
    }

    /// Bypass validation. Diagnostic probes deliberately build degenerate
    /// media (e.g. matched impedance ratios) to show why the contrast clauses
    /// are needed; nothing else should use this.
    pub fn unvalidated(eps: f64, mu: f64, eps_hat: f64, mu_hat: f64, radius: f64) -> Self {
        MediaConfig {
            eps,
            mu,
            eps_hat,
            mu_hat,
            radius,
        }
    }

    /// Refractive rate of the unhatted medium: sqrt(eps mu).
    pub fn rate(&self) -> f64 {
        (self.eps * self.mu).sqrt()
    }

    /// Refractive rate of the hatted medium: sqrt(eps_hat mu_hat).
    pub fn rate_hat(&self) -> f64 {
        (self.eps_hat * self.mu_hat).sqrt()
    }

    pub fn max_rate(&self) -> f64 {
        self.rate().max(self.rate_hat())
    }

    pub fn min_rate(&self) -> f64 {
        self.rate().min(self.rate_hat())
    }

    /// Default magnitude floor standing in for the (unquantified) k0:
    /// 4 / (R sqrt(min(eps mu, eps_hat mu_hat))).
    pub fn default_k_min(&self) -> f64 {
        4.0 / (self.radius * self.min_rate())
    }

    /// Default spectral-parameter magnitude: 10 / (R sqrt(min eps mu)).
    pub fn default_k_abs(&self) -> f64 {
        10.0 / (self.radius * self.min_rate())
    }
}

/// Validate raw media input, mirroring [`MediaConfig::with_margin`].
pub fn validate_media(
    eps: f64,
    mu: f64,
    eps_hat: f64,
    mu_hat: f64,
    radius: f64,
    margin: f64,
) -> Result<MediaConfig, ModelError> {
    MediaConfig::with_margin(eps, mu, eps_hat, mu_hat, radius, margin)
}

/// Polarization family of a vector spherical-harmonic mode.
///
/// Convention used throughout this crate: TE means the *electric* field is
/// purely transverse (no radial E component); TM means the magnetic field is.
/// References differ on this naming, so it is fixed here once.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Polarization {
    Te,
    Tm,
}

impl std::fmt::Display for Polarization {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Polarization::Te => write!(f, "TE"),
            Polarization::Tm => write!(f, "TM"),
        }
    }
}

/// Spherical-harmonic mode index: degree n >= 1 plus polarization.
/// Each mode stands for 2n+1 azimuthal copies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ModeId {
    pub degree: usize,
    pub polarization: Polarization,
}

impl ModeId {
    pub fn new(degree: usize, polarization: Polarization) -> Result<Self, ModelError> {
        if degree < 1 {
            return Err(ModelError::BadDegree(degree));
        }
        Ok(ModeId {
            degree,
            polarization,
        })
    }

    /// Azimuthal multiplicity weight 2n + 1.
    pub fn multiplicity_weight(&self) -> usize {
        2 * self.degree + 1
    }
}

impl std::fmt::Display for ModeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "n={} {}", self.degree, self.polarization)
    }
}

/// A spectral parameter k admitted to the sector |Im(k^2)| >= gamma |k|^2
/// with |k| >= k_min.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralParameter {
    pub k: Complex64,
    pub gamma: f64,
}

impl SpectralParameter {
    pub fn validate(k: Complex64, gamma: f64, k_min: f64) -> Result<Self, ModelError> {
        assert!(gamma > 0.0, "gamma must be positive");
        let k2 = k * k;
        let bound = gamma * k.norm_sqr();
        // Equality configurations (45-degree ray, gamma = 1) must pass, hence
        // the tiny relative slack.
        if k2.im.abs() < bound * (1.0 - SECTOR_SLACK) {
            return Err(ModelError::SectorViolation {
                im_k2_abs: k2.im.abs(),
                bound,
            });
        }
        if k.norm() < k_min {
            return Err(ModelError::MagnitudeTooSmall {
                abs_k: k.norm(),
                k_min,
            });
        }
        Ok(SpectralParameter { k, gamma })
    }
}

/// Validate a spectral parameter; see [`SpectralParameter::validate`].
pub fn validate_k(k: Complex64, gamma: f64, k_min: f64) -> Result<SpectralParameter, ModelError> {
    SpectralParameter::validate(k, gamma, k_min)
}

/// Eigenvalue-free sector specification: ratio gamma and cut radius omega0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectorSpec {
    pub gamma: f64,
    pub omega0: f64,
}

impl SectorSpec {
    pub fn new(gamma: f64, omega0: f64) -> Result<Self, ModelError> {
        if !(gamma > 0.0 && gamma <= 2.0) {
            return Err(ModelError::BadGamma(gamma));
        }
        if !(omega0.is_finite() && omega0 > 0.0) {
            return Err(ModelError::BadOmega0(omega0));
        }
        Ok(SectorSpec { gamma, omega0 })
    }
}
