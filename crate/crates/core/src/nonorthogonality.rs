//! Pairwise non-orthogonality functionals F over reduced eigenvector
//! states, and the weighted pair sums the measures minimise.

use crate::error::{Error, Result};
use crate::linalg::{entropy_from_spectrum, hermitian_eig, matrix_sqrt_psd};
use crate::state::DensityMatrix;
use crate::tol;

/// Whether the pair sum runs over unordered pairs i < j (default) or every
/// ordered pair i != j, which doubles each term for symmetric weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PairConvention {
    #[default]
    Unordered,
    Ordered,
}

/// Which two-state functional to apply to each pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NonOrthogonalityKind {
    /// F = 2 F_bar (1 - F_bar) on the Uhlmann fidelity F_bar. Vanishes
    /// exactly for identical and for orthogonal states.
    #[default]
    Fidelity,
    /// F = 2 S (1 - S) with S the entropy of the fidelity operator
    /// sqrt(sqrt(rho_i) rho_j sqrt(rho_i))^(1/2).
    ///
    /// Caveat: for generic *identical mixed* states S lands strictly
    /// between 0 and 1 and the functional comes out positive, so this
    /// variant fails the "identical states contribute nothing" requirement
    /// the default satisfies. It is kept behind this flag, not silently
    /// altered. Values are clamped at 0 because S itself may exceed 1 on
    /// subnormalised spectra.
    Entropy,
}

/// Functional plus pair convention, as carried in measure configs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct NonOrthogonalityChoice {
    pub kind: NonOrthogonalityKind,
    pub pairs: PairConvention,
}

fn check_same_dims(a: &DensityMatrix, b: &DensityMatrix) -> Result<()> {
    if a.dims() != b.dims() {
        return Err(Error::DimensionMismatch {
            context: format!("state dims {:?} vs {:?}", a.dims(), b.dims()),
        });
    }
    Ok(())
}

/// Eigenvalues of sqrt(rho_i) rho_j sqrt(rho_i), with sub-noise values
/// dropped.
///
/// The drop cut matters: eigenvalues that are really zero come back from
/// the solver as O(1e-15) junk, and taking square roots would turn that
/// into O(1e-7) errors in the fidelity — far above the accuracy the rest
/// of the pipeline holds.
fn fidelity_operator_spectrum(a: &DensityMatrix, b: &DensityMatrix) -> Result<Vec<f64>> {
    check_same_dims(a, b)?;
    let root = matrix_sqrt_psd(a.matrix(), tol::STATE_CHECK)?;
    let sandwich = root.matmul(b.matrix()).matmul(&root);
    let (values, _) = hermitian_eig(&sandwich, 1e-8)?;
    Ok(values
        .into_iter()
        .filter(|&w| w >= tol::FIDELITY_EIGENVALUE_FLOOR)
        .collect())
}

/// Uhlmann fidelity F_bar = Tr sqrt(sqrt(rho_i) rho_j sqrt(rho_i)),
/// clamped into [0, 1].
pub fn uhlmann_fidelity(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    let spectrum = fidelity_operator_spectrum(a, b)?;
    Ok(spectrum
        .iter()
        .map(|w| w.sqrt())
        .sum::<f64>()
        .clamp(0.0, 1.0))
}

/// F = 2 F_bar (1 - F_bar).
pub fn f_fidelity(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    let fbar = uhlmann_fidelity(a, b)?;
    Ok(2.0 * fbar * (1.0 - fbar))
}

/// F = 2 S (1 - S); see [`NonOrthogonalityKind::Entropy`] for the caveat.
pub fn f_entropy(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    let spectrum = fidelity_operator_spectrum(a, b)?;
    let roots: Vec<f64> = spectrum.iter().map(|w| w.sqrt()).collect();
    let s = entropy_from_spectrum(&roots);
    Ok((2.0 * s * (1.0 - s)).max(0.0))
}

fn pair_value(a: &DensityMatrix, b: &DensityMatrix, kind: NonOrthogonalityKind) -> Result<f64> {
    match kind {
        NonOrthogonalityKind::Fidelity => f_fidelity(a, b),
        NonOrthogonalityKind::Entropy => f_entropy(a, b),
    }
}

fn check_weights(weights: &[Vec<f64>], n: usize) -> Result<()> {
    if weights.len() != n || weights.iter().any(|row| row.len() != n) {
        return Err(Error::DimensionMismatch {
            context: format!("weight matrix must be {n}x{n}"),
        });
    }
    for (i, row) in weights.iter().enumerate() {
        for (j, &w) in row.iter().enumerate() {
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidParameter {
                    context: format!("weight w[{i}][{j}] = {w} must be finite and nonnegative"),
                });
            }
            if (w - weights[j][i]).abs() > 1e-9 {
                return Err(Error::InvalidParameter {
                    context: format!("weights must be symmetric; w[{i}][{j}] != w[{j}][{i}]"),
                });
            }
        }
    }
    Ok(())
}

/// Per-subsystem weighted pair sums.
///
/// `reduced[x]` holds subsystem x's reduced eigenvector states in
/// decomposition order, or `None` to skip that subsystem entirely (the
/// one-sided measures pass a placeholder for the side they ignore). The
/// diagonal i = j is always skipped: under the fidelity functional it is
/// identically zero, and the pair sums are over distinct decomposition
/// members.
///
/// Returns one sum per subsystem slot (0.0 for skipped slots).
pub fn pair_functional_terms(
    reduced: &[Option<Vec<DensityMatrix>>],
    weights: &[Vec<f64>],
    choice: NonOrthogonalityChoice,
) -> Result<Vec<f64>> {
    let n = weights.len();
    check_weights(weights, n)?;
    for states in reduced.iter().flatten() {
        if states.len() != n {
            return Err(Error::DimensionMismatch {
                context: format!(
                    "subsystem list has {} states for an {n}x{n} weight matrix",
                    states.len()
                ),
            });
        }
    }
    let mut terms = Vec::with_capacity(reduced.len());
    for slot in reduced {
        let Some(states) = slot else {
            terms.push(0.0);
            continue;
        };
        let mut sum = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                let w = weights[i][j];
                if w == 0.0 {
                    continue;
                }
                let f = pair_value(&states[i], &states[j], choice.kind)?;
                sum += match choice.pairs {
                    PairConvention::Unordered => w * f,
                    // w_ij F + w_ji F with symmetric weights.
                    PairConvention::Ordered => 2.0 * w * f,
                };
            }
        }
        terms.push(sum);
    }
    Ok(terms)
}

/// Total of [`pair_functional_terms`] across subsystems.
pub fn pair_functional(
    reduced: &[Option<Vec<DensityMatrix>>],
    weights: &[Vec<f64>],
    choice: NonOrthogonalityChoice,
) -> Result<f64> {
    Ok(pair_functional_terms(reduced, weights, choice)?
        .iter()
        .sum())
}
