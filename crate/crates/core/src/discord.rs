//! Numerical quantum-discord baseline for two qubits: entropic discord with
//! a projective measurement on subsystem A, minimised by a refined grid
//! search over the Bloch sphere.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{entropy_from_spectrum, hermitian_eig};
use crate::state::DensityMatrix;
use crate::tol;

/// Resolution of the measurement-direction search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiscordGrid {
    /// Points along the polar angle in [0, pi].
    pub theta_steps: usize,
    /// Points along the azimuth in [0, 2 pi).
    pub phi_steps: usize,
    /// Zoom-in rounds after the full-sphere pass; each shrinks the search
    /// window by 4x around the best point found so far.
    pub refinement_rounds: usize,
}

impl Default for DiscordGrid {
    fn default() -> Self {
        Self {
            theta_steps: 64,
            phi_steps: 128,
            refinement_rounds: 3,
        }
    }
}

/// Binary-entropy-style entropy of a normalised 2x2 Hermitian matrix given
/// by its diagonal (a, c) and off-diagonal b; the eigenvalues are
/// 1/2 +/- sqrt((a - c)^2 / 4 + |b|^2).
fn qubit_entropy(a: f64, c: f64, b: Complex64) -> f64 {
    let radius = (0.25 * (a - c) * (a - c) + b.norm_sqr()).sqrt();
    let plus = (0.5 + radius).clamp(0.0, 1.0);
    let minus = (0.5 - radius).clamp(0.0, 1.0);
    let term = |x: f64| if x > 0.0 { -x * x.log2() } else { 0.0 };
    term(plus) + term(minus)
}

/// Average conditional entropy of B after projectively measuring A along
/// the Bloch direction (theta, phi).
fn conditional_entropy(rho: &DensityMatrix, theta: f64, phi: f64) -> f64 {
    let (sin_half, cos_half) = (theta / 2.0).sin_cos();
    let directions = [
        [
            Complex64::new(cos_half, 0.0),
            Complex64::from_polar(sin_half, phi),
        ],
        [
            Complex64::new(sin_half, 0.0),
            -Complex64::from_polar(cos_half, phi),
        ],
    ];
    let m = rho.matrix();
    let mut total = 0.0;
    for n in directions {
        // Unnormalised conditional B block: sum_ij conj(n_i) n_j rho[iA jA].
        let mut block = [[Complex64::ZERO; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                let coeff = n[i].conj() * n[j];
                for (a, row) in block.iter_mut().enumerate() {
                    for (b, entry) in row.iter_mut().enumerate() {
                        *entry += coeff * m.get(2 * i + a, 2 * j + b);
                    }
                }
            }
        }
        let p = (block[0][0].re + block[1][1].re).max(0.0);
        if p > 1e-12 {
            total += p * qubit_entropy(block[0][0].re / p, block[1][1].re / p, block[0][1] / p);
        }
    }
    total
}

/// Entropic discord with the measurement on subsystem A:
///
/// S(rho_A) - S(rho_AB) + min over projective measurements of the average
/// conditional entropy of B.
///
/// The minimisation is a full-sphere grid pass followed by
/// `refinement_rounds` zoomed passes around the running best; the running
/// best is carried across rounds, so more rounds never increase the
/// result. Grid search overestimates the minimum, which keeps the returned
/// discord nonnegative up to solver noise even at coarse resolutions.
pub fn discord_a(rho: &DensityMatrix, grid: &DiscordGrid) -> Result<f64> {
    if rho.dims() != [2, 2] {
        return Err(Error::UnsupportedDims {
            context: format!("discord baseline needs dims [2, 2], got {:?}", rho.dims()),
        });
    }
    if grid.theta_steps < 2 || grid.phi_steps < 2 {
        return Err(Error::InvalidParameter {
            context: "discord grid needs at least 2 steps per angle".into(),
        });
    }

    let (spectrum, _) = hermitian_eig(rho.matrix(), tol::STATE_CHECK)?;
    let s_ab = entropy_from_spectrum(&spectrum);
    let rho_a = rho.reduced(&[0])?;
    let ma = rho_a.matrix();
    let s_a = qubit_entropy(ma.get(0, 0).re, ma.get(1, 1).re, ma.get(0, 1));

    let pi = std::f64::consts::PI;
    let mut best_value = f64::INFINITY;
    let mut best_theta = 0.0;
    let mut best_phi = 0.0;
    let mut theta_window = pi / 2.0;
    let mut phi_window = pi;
    let mut theta_center = pi / 2.0;
    let mut phi_center = pi;
    for _ in 0..=grid.refinement_rounds {
        for i in 0..grid.theta_steps {
            let frac = i as f64 / (grid.theta_steps - 1) as f64;
            let theta = (theta_center - theta_window + 2.0 * theta_window * frac).clamp(0.0, pi);
            for j in 0..grid.phi_steps {
                // Exclusive upper end: the azimuth wraps.
                let frac = j as f64 / grid.phi_steps as f64;
                let phi = (phi_center - phi_window + 2.0 * phi_window * frac).rem_euclid(2.0 * pi);
                let value = conditional_entropy(rho, theta, phi);
                if value < best_value {
                    best_value = value;
                    best_theta = theta;
                    best_phi = phi;
                }
            }
        }
        theta_center = best_theta;
        phi_center = best_phi;
        theta_window /= 4.0;
        phi_window /= 4.0;
    }

    Ok(s_a - s_ab + best_value)
}
