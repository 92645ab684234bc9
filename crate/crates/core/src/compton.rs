//! Recoil–scattering angular kinematics and the Monte Carlo coincidence
//! experiment separating exact conservation from merely statistical
//! conservation.
//!
//! Exact energy–momentum conservation ties the photon scattering angle φ
//! to the recoil-electron angle θ through
//! `tan(φ/2) = 1/((1+α)·tan θ)` with `α = h/(mcλ)`, the photon emerging on
//! the opposite side of the incident line from the recoil. Under the
//! statistical-conservation hypothesis the scattered direction is
//! uncorrelated with the recoil, i.e. uniform over the full plane of
//! directions. A coincidence count inside an angular window around the
//! predicted direction separates the two hypotheses.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use statrs::distribution::{Binomial, DiscreteCDF};

use crate::error::{CoreError, Result};

/// Default recoil-angle sampling range, in radians (5°..85°).
pub const DEFAULT_THETA_RANGE: (f64, f64) = (
    5.0 * std::f64::consts::PI / 180.0,
    85.0 * std::f64::consts::PI / 180.0,
);

/// Default coincidence window half-width (20°).
pub const DEFAULT_WINDOW_DEG: f64 = 20.0;

/// Kinematic parameter `α = h/(mcλ)` of the incident photon.
#[derive(Debug, Clone, Copy)]
pub struct KinematicsParams {
    alpha: f64,
}

impl KinematicsParams {
    pub fn from_alpha(alpha: f64) -> Result<Self> {
        if !(alpha >= 0.0) {
            return Err(CoreError::Contract {
                context: "KinematicsParams (α ≥ 0)",
                residual: alpha,
                tolerance: 0.0,
            });
        }
        Ok(Self { alpha })
    }

    /// From the incident wavelength expressed in units of `h/mc`.
    pub fn from_lambda(lambda_in_compton_units: f64) -> Result<Self> {
        Self::from_alpha(alpha_of_lambda(lambda_in_compton_units)?)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

/// `α = 1/λ` for λ in units of the reference wavelength `h/mc`.
pub fn alpha_of_lambda(lambda_in_compton_units: f64) -> Result<f64> {
    if lambda_in_compton_units <= 0.0 {
        return Err(CoreError::Contract {
            context: "alpha_of_lambda (λ > 0)",
            residual: lambda_in_compton_units,
            tolerance: 0.0,
        });
    }
    Ok(lambda_in_compton_units.recip())
}

/// Photon scattering angle predicted by exact conservation, in `(0, π)`.
///
/// The defining relation carries a sign encoding that the photon and the
/// recoil electron leave on opposite sides of the incident line; the angle
/// returned is the magnitude, with the side carried separately as
/// [`Side`].
pub fn phi_of_theta(theta: f64, params: &KinematicsParams) -> Result<f64> {
    if theta <= 0.0 || theta >= std::f64::consts::FRAC_PI_2 {
        return Err(CoreError::Contract {
            context: "phi_of_theta (θ strictly inside (0, π/2))",
            residual: theta,
            tolerance: std::f64::consts::FRAC_PI_2,
        });
    }
    Ok(2.0 * ((1.0 + params.alpha) * theta.tan()).recip().atan())
}

/// Which side of the incident line a deflected direction lies on; exact
/// kinematics puts the photon opposite the recoil electron.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Opposite,
    Same,
}

/// Which conservation hypothesis generated an event.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hypothesis {
    /// Exact conservation in each event: φ follows the kinematic relation
    /// (plus optional detection noise), always on the opposite side.
    Quantum,
    /// Statistical conservation only: the scattered direction is uniform
    /// over the whole plane, independent of θ.
    Bks,
}

/// One simulated scattering event.
#[derive(Debug, Clone, Copy)]
pub struct ScatterEvent {
    /// Recoil-electron angle, radians in (0, π/2).
    pub theta: f64,
    /// Photon angle magnitude, radians in (0, π).
    pub phi: f64,
    /// Side of the incident line the photon was observed on.
    pub side: Side,
    pub hypothesis: Hypothesis,
    /// Angular noise applied to φ at generation time (radians).
    pub noise_sigma: f64,
}

/// Simulation parameters beyond the kinematics.
#[derive(Debug, Clone, Copy)]
pub struct SimulationConfig {
    pub theta_range: (f64, f64),
    pub noise_sigma: f64,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            theta_range: DEFAULT_THETA_RANGE,
            noise_sigma: 0.0,
        }
    }
}

/// Generates `n` events, fully determined by `seed`.
///
/// θ is sampled uniformly on the configured range. Under
/// [`Hypothesis::Quantum`] the photon angle is the kinematic prediction
/// plus Gaussian noise (clamped into the open interval `(0, π)`), side
/// always opposite; under [`Hypothesis::Bks`] the photon angle is uniform
/// on `(0, π)` with a uniformly random side — a direction uniform over the
/// full plane.
pub fn simulate_events(
    n: usize,
    hypothesis: Hypothesis,
    params: &KinematicsParams,
    config: &SimulationConfig,
    seed: u64,
) -> Result<Vec<ScatterEvent>> {
    if n == 0 {
        return Err(CoreError::Contract {
            context: "simulate_events (n ≥ 1)",
            residual: 0.0,
            tolerance: 1.0,
        });
    }
    let (lo, hi) = config.theta_range;
    if !(0.0 < lo && lo < hi && hi < std::f64::consts::FRAC_PI_2) {
        return Err(CoreError::Contract {
            context: "simulate_events theta range (within (0, π/2))",
            residual: hi,
            tolerance: std::f64::consts::FRAC_PI_2,
        });
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut events = Vec::with_capacity(n);
    let clamp_lo = 1e-9;
    let clamp_hi = std::f64::consts::PI - 1e-9;
    for _ in 0..n {
        let theta = lo + (hi - lo) * rng.gen::<f64>();
        let event = match hypothesis {
            Hypothesis::Quantum => {
                let mut phi = phi_of_theta(theta, params)?;
                if config.noise_sigma > 0.0 {
                    phi += config.noise_sigma * standard_normal(&mut rng);
                }
                ScatterEvent {
                    theta,
                    phi: phi.clamp(clamp_lo, clamp_hi),
                    side: Side::Opposite,
                    hypothesis,
                    noise_sigma: config.noise_sigma,
                }
            }
            Hypothesis::Bks => ScatterEvent {
                theta,
                phi: (std::f64::consts::PI * rng.gen::<f64>()).clamp(clamp_lo, clamp_hi),
                side: if rng.gen::<bool>() {
                    Side::Opposite
                } else {
                    Side::Same
                },
                hypothesis,
                noise_sigma: 0.0,
            },
        };
        events.push(event);
    }
    Ok(events)
}

fn standard_normal(rng: &mut impl Rng) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Coincidence statistics of an event sample.
#[derive(Debug, Clone)]
pub struct CoincidenceReport {
    pub n_events: usize,
    /// Window half-width, degrees.
    pub window_deg: f64,
    pub hits: usize,
    /// Probability a direction uniform over the plane lands in the window:
    /// `2·window/360`.
    pub p_isotropic: f64,
    /// `n · p_isotropic`.
    pub expected_isotropic: f64,
    /// `hits / expected_isotropic`.
    pub ratio: f64,
    /// Exact binomial tail `P(X ≥ hits | n, p_isotropic)`.
    pub binomial_tail: f64,
    /// The tail above is an exact binomial computation; historically
    /// quoted chance estimates for this kind of coincidence count used
    /// unspecified statistics and are not comparable to it.
    pub tail_note: &'static str,
}

/// Counts events whose observed photon direction falls within the angular
/// window around the exact-conservation prediction (opposite side, angle
/// within `window_deg`).
pub fn coincidence_analysis(
    events: &[ScatterEvent],
    params: &KinematicsParams,
    window_deg: f64,
) -> Result<CoincidenceReport> {
    if events.is_empty() {
        return Err(CoreError::Contract {
            context: "coincidence_analysis (nonempty events)",
            residual: 0.0,
            tolerance: 1.0,
        });
    }
    if !(window_deg > 0.0 && window_deg < 180.0) {
        return Err(CoreError::Contract {
            context: "coincidence_analysis window (0° < w < 180°)",
            residual: window_deg,
            tolerance: 180.0,
        });
    }
    let window_rad = window_deg.to_radians();
    let mut hits = 0usize;
    for event in events {
        let predicted = phi_of_theta(event.theta, params)?;
        if event.side == Side::Opposite && (event.phi - predicted).abs() <= window_rad {
            hits += 1;
        }
    }
    let n = events.len();
    let p_isotropic = 2.0 * window_deg / 360.0;
    let expected_isotropic = n as f64 * p_isotropic;
    let ratio = hits as f64 / expected_isotropic;
    let binomial =
        Binomial::new(p_isotropic, n as u64).map_err(|e| CoreError::Backend(e.to_string()))?;
    let binomial_tail = if hits == 0 {
        1.0
    } else {
        binomial.sf(hits as u64 - 1)
    };
    Ok(CoincidenceReport {
        n_events: n,
        window_deg,
        hits,
        p_isotropic,
        expected_isotropic,
        ratio,
        binomial_tail,
        tail_note:
            "exact binomial tail; historically quoted chance estimates used unspecified statistics",
    })
}
