//! Entanglement quantifiers for pure states, the Wootters concurrence for
//! mixed two-qubit states, and averages over degeneracy blocks.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    entropy_from_spectrum, hermitian_eig, matrix_sqrt_psd, tensor_product, ComplexMatrix,
};
use crate::state::{DegenerateBlock, DensityMatrix, PureState};
use crate::tol;

/// Which pure-state entanglement quantifier to run the measures on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntanglementChoice {
    /// Von Neumann entropy of a reduced state; bipartite splits only.
    EntropyOfEntanglement,
    /// Two-qubit concurrence.
    Concurrence,
    /// Mean generalised concurrence over every bipartition that contains
    /// subsystem 0; defined for any number of subsystems.
    MultipartiteBipartitionMean,
}

/// Concurrence of a pure two-qubit state: 2 |a00 a11 - a01 a10|.
pub fn concurrence_pure(phi: &PureState) -> Result<f64> {
    if phi.dims() != [2, 2] {
        return Err(Error::UnsupportedDims {
            context: format!("concurrence needs two qubits, got dims {:?}", phi.dims()),
        });
    }
    let a = phi.amplitudes();
    Ok(2.0 * (a[0] * a[3] - a[1] * a[2]).norm())
}

fn sigma_y_pair() -> ComplexMatrix {
    let y = ComplexMatrix::new(
        2,
        2,
        vec![
            Complex64::ZERO,
            Complex64::new(0.0, -1.0),
            Complex64::new(0.0, 1.0),
            Complex64::ZERO,
        ],
    )
    .expect("fixed 2x2 data");
    tensor_product(&y, &y)
}

/// Concurrence of a mixed two-qubit state.
///
/// Computed through the Hermitian form: with the spin-flipped state
/// rho~ = (sy (x) sy) rho* (sy (x) sy), the eigenvalues mu_i of the
/// positive matrix sqrt(rho) rho~ sqrt(rho) give
/// C = max(0, sqrt(mu_1) - sqrt(mu_2) - sqrt(mu_3) - sqrt(mu_4)).
pub fn concurrence_mixed(rho: &DensityMatrix) -> Result<f64> {
    if rho.dims() != [2, 2] {
        return Err(Error::UnsupportedDims {
            context: format!("concurrence needs two qubits, got dims {:?}", rho.dims()),
        });
    }
    let yy = sigma_y_pair();
    let flipped = yy.matmul(&rho.matrix().conjugate()).matmul(&yy);
    let root = matrix_sqrt_psd(rho.matrix(), tol::STATE_CHECK)?;
    let m = root.matmul(&flipped).matmul(&root);
    let (values, _) = hermitian_eig(&m, 1e-8)?;
    let lambdas: Vec<f64> = values.iter().map(|&w| w.max(0.0).sqrt()).collect();
    Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0))
}

/// Von Neumann entropy (base 2) of the reduction onto `keep`.
pub fn entanglement_entropy_pure(phi: &PureState, keep: &[usize]) -> Result<f64> {
    let reduced = phi.reduced(keep)?;
    let (values, _) = hermitian_eig(reduced.matrix(), tol::STATE_CHECK)?;
    Ok(entropy_from_spectrum(&values))
}

/// Mean generalised concurrence over all bipartitions containing
/// subsystem 0: for each such part K, C_K = sqrt(2 (1 - Tr rho_K^2)).
///
/// For two qubits this has a single bipartition and reduces exactly to the
/// pure-state concurrence, and is computed through the amplitude formula:
/// the purity route loses half the available precision to the square root
/// (an exactly-product state would come back with C ~ 1e-9 instead of
/// ~1e-16), which matters to the zero tests on classical states.
pub fn multipartite_pure_entanglement(phi: &PureState) -> Result<f64> {
    let n = phi.subsystem_count();
    if n < 2 {
        return Err(Error::UnsupportedDims {
            context: "multipartite entanglement needs at least two subsystems".into(),
        });
    }
    if phi.dims() == [2, 2] {
        return concurrence_pure(phi);
    }
    let full = (1usize << n) - 1;
    let mut sum = 0.0;
    let mut count = 0usize;
    for mask in 1..full {
        if mask & 1 == 0 {
            continue;
        }
        let keep: Vec<usize> = (0..n).filter(|k| mask >> k & 1 == 1).collect();
        let purity = phi.reduced(&keep)?.purity();
        // Purity deficits below the noise floor of the purity sum are
        // treated as exact zeros so the square root cannot inflate them.
        let deficit = 1.0 - purity;
        let squared = if deficit > tol::PURITY_NOISE {
            2.0 * deficit
        } else {
            0.0
        };
        sum += squared.sqrt();
        count += 1;
    }
    Ok(sum / count as f64)
}

/// Runs the selected quantifier on one pure state.
pub fn pure_entanglement(phi: &PureState, choice: EntanglementChoice) -> Result<f64> {
    match choice {
        EntanglementChoice::EntropyOfEntanglement => {
            if phi.subsystem_count() != 2 {
                return Err(Error::UnsupportedDims {
                    context: format!(
                        "entropy of entanglement needs a bipartite split, got dims {:?}",
                        phi.dims()
                    ),
                });
            }
            entanglement_entropy_pure(phi, &[0])
        }
        EntanglementChoice::Concurrence => concurrence_pure(phi),
        EntanglementChoice::MultipartiteBipartitionMean => multipartite_pure_entanglement(phi),
    }
}

/// Average entanglement of a degeneracy block remixed by `u`:
/// (1/f) sum_i E(sum_j u_ji |phi_j>).
///
/// `u` must be an f x f unitary (columns give the coefficients of the new
/// eigenvectors in the stored block basis).
pub fn block_average_entanglement(
    block: &DegenerateBlock,
    u: &ComplexMatrix,
    choice: EntanglementChoice,
) -> Result<f64> {
    let f = block.multiplicity();
    if u.rows() != f || u.cols() != f {
        return Err(Error::DimensionMismatch {
            context: format!(
                "{}x{} unitary for a block of multiplicity {}",
                u.rows(),
                u.cols(),
                f
            ),
        });
    }
    let gram = u.adjoint().matmul(u);
    let deviation = gram.max_abs_diff(&ComplexMatrix::identity(f));
    if deviation > tol::UNITARY_CHECK {
        return Err(Error::NotUnitary { deviation });
    }
    let mut sum = 0.0;
    for i in 0..f {
        let psi = remix_block_vector(block, u, i);
        sum += pure_entanglement(&psi, choice)?;
    }
    Ok(sum / f as f64)
}

/// The i-th remixed eigenvector sum_j u_ji |phi_j> of a block.
pub(crate) fn remix_block_vector(
    block: &DegenerateBlock,
    u: &ComplexMatrix,
    i: usize,
) -> PureState {
    let dim = block.eigenvectors[0].dimension();
    let mut amplitudes = vec![Complex64::ZERO; dim];
    for (j, phi) in block.eigenvectors.iter().enumerate() {
        let coeff = u.get(j, i);
        for (slot, &amp) in amplitudes.iter_mut().zip(phi.amplitudes()) {
            *slot += coeff * amp;
        }
    }
    PureState::from_column(&amplitudes, block.eigenvectors[0].dims())
}
