//! Deterministic random state generation for tests, benches, and the CLI.
//!
//! Everything is driven by a ChaCha8 stream cipher RNG so a given seed
//! produces the same states on every platform and every run. The classical
//! samplers reject draws whose spectra have near-degenerate eigenvalues;
//! the resulting states exercise the generic code paths while keeping
//! their spectral decompositions stable against floating-point noise.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::ComplexMatrix;
use crate::state::{
    make_semi_classical, make_strictly_classical, tensor_pure, DensityMatrix, PureState,
    SemiClassicalPart,
};

/// Minimum pairwise eigenvalue gap enforced by the rejection samplers.
const SPECTRAL_GAP: f64 = 0.02;

const MAX_REJECTION_ATTEMPTS: usize = 10_000;

/// A seeded, platform-independent RNG.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn standard_complex(rng: &mut impl Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

/// n x n matrix of independent standard complex Gaussians.
pub fn random_ginibre(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    let entries = (0..n * n).map(|_| standard_complex(rng)).collect();
    ComplexMatrix::new(n, n, entries).expect("gaussian entries are finite")
}

/// Random Hermitian matrix (G + G^dagger) / 2.
pub fn random_hermitian(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    let g = random_ginibre(rng, n);
    g.add(&g.adjoint()).scale(Complex64::new(0.5, 0.0))
}

/// Haar-distributed unitary via QR of a Ginibre matrix (modified
/// Gram-Schmidt with the usual phase fix on the diagonal).
pub fn random_unitary(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    let g = random_ginibre(rng, n);
    let mut cols: Vec<Vec<Complex64>> = (0..n).map(|j| g.column(j)).collect();
    for j in 0..n {
        for i in 0..j {
            let overlap: Complex64 = cols[i]
                .iter()
                .zip(cols[j].iter())
                .map(|(a, b)| a.conj() * b)
                .sum();
            let (settled, rest) = cols.split_at_mut(j);
            for (z, &a) in rest[0].iter_mut().zip(settled[i].iter()) {
                *z -= overlap * a;
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in cols[j].iter_mut() {
            *z /= norm;
        }
        // Fix the phase so the distribution matches Haar measure exactly.
        let pivot = cols[j][j];
        if pivot.norm() > 0.0 {
            let phase = pivot / pivot.norm();
            for z in cols[j].iter_mut() {
                *z /= phase;
            }
        }
    }
    ComplexMatrix::from_fn(n, n, |i, j| cols[j][i])
}

/// Haar-random pure state over the given subsystem dims.
pub fn random_pure(rng: &mut impl Rng, dims: &[usize]) -> PureState {
    let total: usize = dims.iter().product();
    let mut amplitudes: Vec<Complex64> = (0..total).map(|_| standard_complex(rng)).collect();
    let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in amplitudes.iter_mut() {
        *z /= norm;
    }
    PureState::new(amplitudes, dims.to_vec()).expect("normalised by construction")
}

/// Product of independent Haar-random pure states, one per subsystem.
pub fn random_product_pure(rng: &mut impl Rng, dims: &[usize]) -> PureState {
    let parts: Vec<PureState> = dims.iter().map(|&d| random_pure(rng, &[d])).collect();
    let refs: Vec<&PureState> = parts.iter().collect();
    tensor_pure(&refs)
}

/// Full-rank random density matrix G G^dagger / Tr(G G^dagger).
pub fn random_density(rng: &mut impl Rng, dims: &[usize]) -> DensityMatrix {
    let total: usize = dims.iter().product();
    let g = random_ginibre(rng, total);
    let m = g.matmul(&g.adjoint());
    let trace = m.trace().re;
    DensityMatrix::new(m.scale(Complex64::new(1.0 / trace, 0.0)), dims.to_vec())
        .expect("Wishart matrices are valid states")
}

fn gaps_ok(values: &[f64]) -> bool {
    for (i, a) in values.iter().enumerate() {
        for b in &values[i + 1..] {
            if (a - b).abs() < SPECTRAL_GAP {
                return false;
            }
        }
    }
    true
}

/// Probability vector of length `k` with all pairwise gaps at least 0.02
/// and every entry at least 0.05.
fn gapped_probabilities(rng: &mut impl Rng, k: usize) -> Vec<f64> {
    for _ in 0..MAX_REJECTION_ATTEMPTS {
        let raw: Vec<f64> = (0..k).map(|_| rng.gen_range(0.5..1.5)).collect();
        let sum: f64 = raw.iter().sum();
        let probs: Vec<f64> = raw.iter().map(|x| x / sum).collect();
        if probs.iter().all(|&p| p >= 0.05) && gaps_ok(&probs) {
            return probs;
        }
    }
    panic!("could not sample a gapped probability vector after many attempts");
}

/// Strictly classical state: a gapped probability mixture over products of
/// random orthonormal basis vectors, one fixed basis per subsystem. The
/// mixture length is the smallest subsystem dimension.
pub fn random_strictly_classical(rng: &mut impl Rng, dims: &[usize]) -> DensityMatrix {
    random_strictly_classical_with_bases(rng, dims).0
}

/// As [`random_strictly_classical`], also returning the per-subsystem basis
/// matrices (columns are the basis vectors actually mixed).
pub fn random_strictly_classical_with_bases(
    rng: &mut impl Rng,
    dims: &[usize],
) -> (DensityMatrix, Vec<ComplexMatrix>) {
    let k = *dims.iter().min().expect("dims must be non-empty");
    let probs = gapped_probabilities(rng, k);
    let bases: Vec<ComplexMatrix> = dims
        .iter()
        .map(|&d| {
            let u = random_unitary(rng, d);
            ComplexMatrix::from_fn(d, k, |i, j| u.get(i, j))
        })
        .collect();
    let rho = make_strictly_classical(&probs, &bases)
        .expect("constructed from orthonormal columns and gapped probabilities");
    (rho, bases)
}

/// Two-qubit state that is classical on subsystem A but quantum on B:
///
/// rho = p |a0><a0| (x) rho_B0 + (1 - p) |a1><a1| (x) rho_B1
///
/// with {|a0>, |a1>} a random orthonormal basis and rho_B0, rho_B1 random
/// mixed qubit states. Draws are rejected until all four eigenvalues of
/// rho (p mu_0i and (1-p) mu_1i) are pairwise separated by at least 0.02,
/// so the spectral decomposition has four clean one-dimensional blocks.
pub fn random_semi_classical_on_a(rng: &mut impl Rng) -> DensityMatrix {
    for _ in 0..MAX_REJECTION_ATTEMPTS {
        let p = rng.gen_range(0.25..0.45);
        let q0 = rng.gen_range(0.2..0.4);
        let q1 = rng.gen_range(0.2..0.4);
        let spectrum = [
            p * q0,
            p * (1.0 - q0),
            (1.0 - p) * q1,
            (1.0 - p) * (1.0 - q1),
        ];
        if !gaps_ok(&spectrum) {
            continue;
        }
        let a_basis = random_unitary(rng, 2);
        let b0 = mixed_qubit(rng, q0);
        let b1 = mixed_qubit(rng, q1);
        let rho = make_semi_classical(
            &[p, 1.0 - p],
            &[
                SemiClassicalPart::Classical(a_basis),
                SemiClassicalPart::Quantum(vec![b0, b1]),
            ],
        )
        .expect("constructed from a unitary basis and valid qubit states");
        return rho;
    }
    panic!("could not sample a gapped semi-classical state after many attempts");
}

/// Qubit state with spectrum {q, 1 - q} in a Haar-random basis.
fn mixed_qubit(rng: &mut impl Rng, q: f64) -> DensityMatrix {
    let u = random_unitary(rng, 2);
    let m = ComplexMatrix::from_fn(2, 2, |i, j| {
        u.get(i, 0) * u.get(j, 0).conj() * q + u.get(i, 1) * u.get(j, 1).conj() * (1.0 - q)
    });
    DensityMatrix::new(m, vec![2]).expect("spectrum {q, 1-q} in a unitary basis")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rng_is_deterministic() {
        let a: Vec<f64> = {
            let mut r = rng(7);
            (0..5).map(|_| r.gen_range(0.0..1.0)).collect()
        };
        let b: Vec<f64> = {
            let mut r = rng(7);
            (0..5).map(|_| r.gen_range(0.0..1.0)).collect()
        };
        assert_eq!(a, b);
    }

    #[test]
    fn unitary_is_unitary() {
        let mut r = rng(8);
        for n in [2usize, 3, 5] {
            let u = random_unitary(&mut r, n);
            let gram = u.adjoint().matmul(&u);
            assert!(gram.max_abs_diff(&ComplexMatrix::identity(n)) < 1e-12);
        }
    }

    #[test]
    fn density_samples_are_valid_states() {
        let mut r = rng(9);
        for _ in 0..10 {
            let rho = random_density(&mut r, &[2, 2]);
            assert!((rho.matrix().trace().re - 1.0).abs() < 1e-12);
            assert!(rho.purity() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn pure_samples_are_normalised() {
        let mut r = rng(10);
        for _ in 0..10 {
            let psi = random_pure(&mut r, &[2, 3]);
            let norm: f64 = psi.amplitudes().iter().map(|z| z.norm_sqr()).sum();
            assert!((norm - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn product_pure_has_pure_marginals() {
        let mut r = rng(11);
        let psi = random_product_pure(&mut r, &[2, 2, 2]);
        for k in 0..3 {
            let reduced = psi.reduced(&[k]).unwrap();
            assert!((reduced.purity() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn classical_sampler_produces_gapped_spectra() {
        use crate::state::spectral_decompose;
        use crate::tol;
        let mut r = rng(12);
        for _ in 0..10 {
            let rho = random_strictly_classical(&mut r, &[2, 2]);
            let d = spectral_decompose(&rho, tol::DEGENERACY).unwrap();
            assert!(d.blocks().iter().all(|b| b.multiplicity() == 1));
        }
    }

    #[test]
    fn semi_classical_sampler_produces_gapped_spectra() {
        use crate::state::spectral_decompose;
        use crate::tol;
        let mut r = rng(13);
        for _ in 0..10 {
            let rho = random_semi_classical_on_a(&mut r);
            let d = spectral_decompose(&rho, tol::DEGENERACY).unwrap();
            assert_eq!(d.rank(), 4);
            assert!(d.blocks().iter().all(|b| b.multiplicity() == 1));
        }
    }
}
