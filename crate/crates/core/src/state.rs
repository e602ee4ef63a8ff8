//! Quantum states: validated density matrices, pure states, spectral
//! structure with explicit degeneracy blocks, classification results, and
//! the constructors used throughout the tests and the CLI.

use std::path::Path;

use num_complex::Complex64;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, partial_trace, tensor_product, ComplexMatrix};
use crate::tol;

/// A normalised state vector over an explicit subsystem split.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Vec<Complex64>,
    dims: Vec<usize>,
}

impl PureState {
    /// Validates unit norm (within 1e-10), finite amplitudes, and that the
    /// subsystem dimensions compose to the vector length.
    pub fn new(amplitudes: Vec<Complex64>, dims: Vec<usize>) -> Result<Self> {
        check_dims(&dims, amplitudes.len())?;
        if !amplitudes
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
        {
            return Err(Error::NonFinite);
        }
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > tol::STATE_CHECK {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { amplitudes, dims })
    }

    /// Builds a state from an eigen-solver column, renormalising away the
    /// last few ulps so downstream projectors have exactly unit trace.
    pub(crate) fn from_column(column: &[Complex64], dims: &[usize]) -> Self {
        let norm = column.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        debug_assert!(
            (norm - 1.0).abs() < 1e-8,
            "column should be near-normalised"
        );
        Self {
            amplitudes: column.iter().map(|z| z / norm).collect(),
            dims: dims.to_vec(),
        }
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dimension(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn subsystem_count(&self) -> usize {
        self.dims.len()
    }

    /// The projector |psi><psi| as a dense matrix.
    pub fn projector(&self) -> ComplexMatrix {
        let n = self.amplitudes.len();
        ComplexMatrix::from_fn(n, n, |i, j| self.amplitudes[i] * self.amplitudes[j].conj())
    }

    /// Reduced density matrix of the projector on the kept subsystems.
    pub fn reduced(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let m = partial_trace(&self.projector(), &self.dims, keep)?;
        let mut keep: Vec<usize> = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        let dims = keep.iter().map(|&k| self.dims[k]).collect();
        Ok(DensityMatrix { matrix: m, dims })
    }
}

/// A validated density matrix over an explicit subsystem split.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    dims: Vec<usize>,
}

impl DensityMatrix {
    /// See [`validate`].
    pub fn new(matrix: ComplexMatrix, dims: Vec<usize>) -> Result<Self> {
        validate(matrix, dims)
    }

    /// Internal constructor for matrices that are valid by construction
    /// (partial traces of valid states, convex mixtures of projectors).
    pub(crate) fn from_parts_unchecked(matrix: ComplexMatrix, dims: Vec<usize>) -> Self {
        Self { matrix, dims }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dimension(&self) -> usize {
        self.matrix.rows()
    }

    pub fn subsystem_count(&self) -> usize {
        self.dims.len()
    }

    /// Partial trace onto the kept subsystems (original order preserved).
    pub fn reduced(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let m = partial_trace(&self.matrix, &self.dims, keep)?;
        let mut keep: Vec<usize> = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        let dims = keep.iter().map(|&k| self.dims[k]).collect();
        Ok(DensityMatrix { matrix: m, dims })
    }

    /// Purity Tr(rho^2).
    pub fn purity(&self) -> f64 {
        let n = self.matrix.rows();
        let mut sum = 0.0;
        for i in 0..n {
            for j in 0..n {
                // Tr(rho^2) = sum_ij |rho_ij|^2 for Hermitian rho.
                sum += self.matrix.get(i, j).norm_sqr();
            }
        }
        sum
    }
}

fn check_dims(dims: &[usize], total: usize) -> Result<()> {
    if dims.is_empty() || dims.iter().any(|&d| d < 2) {
        return Err(Error::UnsupportedDims {
            context: format!("subsystem dims {:?} must each be at least 2", dims),
        });
    }
    let product: usize = dims.iter().product();
    if product != total {
        return Err(Error::DimensionMismatch {
            context: format!(
                "dims {:?} compose to {}, state has dimension {}",
                dims, product, total
            ),
        });
    }
    Ok(())
}

/// Validates a candidate density matrix: square, Hermitian within 1e-10,
/// unit trace within 1e-10, eigenvalues above -1e-10, and subsystem
/// dimensions composing to the matrix dimension.
pub fn validate(matrix: ComplexMatrix, dims: Vec<usize>) -> Result<DensityMatrix> {
    if !matrix.is_square() {
        return Err(Error::NotSquare {
            rows: matrix.rows(),
            cols: matrix.cols(),
        });
    }
    check_dims(&dims, matrix.rows())?;
    let deviation = matrix.hermitian_deviation();
    if deviation > tol::STATE_CHECK {
        return Err(Error::NotHermitian {
            deviation,
            tol: tol::STATE_CHECK,
        });
    }
    let trace = matrix.trace();
    if (trace.re - 1.0).abs() > tol::STATE_CHECK || trace.im.abs() > tol::STATE_CHECK {
        return Err(Error::TraceNotOne { trace: trace.re });
    }
    let (values, _) = hermitian_eig(&matrix, tol::STATE_CHECK)?;
    if let Some(&smallest) = values.last() {
        if smallest < -tol::STATE_CHECK {
            return Err(Error::NotPositiveSemidefinite {
                eigenvalue: smallest,
                tol: tol::STATE_CHECK,
            });
        }
    }
    Ok(DensityMatrix { matrix, dims })
}

/// One eigenvalue together with the orthonormal eigenvectors sharing it.
#[derive(Debug, Clone)]
pub struct DegenerateBlock {
    pub eigenvalue: f64,
    pub eigenvectors: Vec<PureState>,
}

impl DegenerateBlock {
    pub fn multiplicity(&self) -> usize {
        self.eigenvectors.len()
    }

    /// The normalised projection onto the block: (1/f) sum_j |phi_j><phi_j|.
    /// This matrix is invariant under any unitary remix of the block.
    pub fn block_state(&self) -> DensityMatrix {
        let f = self.multiplicity() as f64;
        let dim = self.eigenvectors[0].dimension();
        let mut m = ComplexMatrix::zeros(dim, dim);
        for phi in &self.eigenvectors {
            m = m.add(&phi.projector());
        }
        DensityMatrix::from_parts_unchecked(
            m.scale(Complex64::new(1.0 / f, 0.0)),
            self.eigenvectors[0].dims().to_vec(),
        )
    }
}

/// Spectral decomposition of a density matrix with eigenvalues grouped into
/// degeneracy blocks (zero eigenvalues dropped).
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    blocks: Vec<DegenerateBlock>,
    degeneracy_tolerance: f64,
    dims: Vec<usize>,
}

impl SpectralDecomposition {
    pub fn blocks(&self) -> &[DegenerateBlock] {
        &self.blocks
    }

    pub fn degeneracy_tolerance(&self) -> f64 {
        self.degeneracy_tolerance
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Number of retained eigenvectors (the numerical rank).
    pub fn rank(&self) -> usize {
        self.blocks.iter().map(|b| b.multiplicity()).sum()
    }

    /// Eigenvalues repeated per eigenvector, flattened in block order.
    pub fn eigenvalues_flat(&self) -> Vec<f64> {
        self.blocks
            .iter()
            .flat_map(|b| std::iter::repeat(b.eigenvalue).take(b.multiplicity()))
            .collect()
    }

    /// Eigenvectors flattened in block order.
    pub fn eigenvectors_flat(&self) -> Vec<&PureState> {
        self.blocks
            .iter()
            .flat_map(|b| b.eigenvectors.iter())
            .collect()
    }

    pub fn has_degeneracy(&self) -> bool {
        self.blocks.iter().any(|b| b.multiplicity() > 1)
    }
}

/// Spectral decomposition with degeneracy grouping.
///
/// Eigenvalues below the zero cut (1e-10) are discarded; the remainder are
/// grouped into blocks whenever neighbouring eigenvalues differ by at most
/// `degeneracy_tolerance`. Within each block the eigenvectors are re-run
/// through Gram-Schmidt so they stay orthonormal to machine precision even
/// when the solver returns slightly mixed directions.
pub fn spectral_decompose(
    rho: &DensityMatrix,
    degeneracy_tolerance: f64,
) -> Result<SpectralDecomposition> {
    if !degeneracy_tolerance.is_finite() || degeneracy_tolerance <= 0.0 {
        return Err(Error::InvalidParameter {
            context: format!(
                "degeneracy tolerance must be positive and finite, got {degeneracy_tolerance}"
            ),
        });
    }
    let (values, vectors) = hermitian_eig(rho.matrix(), tol::STATE_CHECK)?;
    let kept: Vec<(f64, usize)> = values
        .iter()
        .enumerate()
        .filter(|(_, &w)| w >= tol::ZERO_EIGENVALUE)
        .map(|(k, &w)| (w, k))
        .collect();
    if kept.is_empty() {
        return Err(Error::InvalidParameter {
            context: "state has no eigenvalue above the zero cut".into(),
        });
    }

    let mut blocks: Vec<DegenerateBlock> = Vec::new();
    let mut group: Vec<(f64, usize)> = Vec::new();
    let flush = |group: &mut Vec<(f64, usize)>, blocks: &mut Vec<DegenerateBlock>| {
        if group.is_empty() {
            return;
        }
        let eigenvalue = group.iter().map(|(w, _)| w).sum::<f64>() / group.len() as f64;
        let mut cols: Vec<Vec<Complex64>> = group.iter().map(|&(_, k)| vectors.column(k)).collect();
        gram_schmidt(&mut cols);
        let eigenvectors = cols
            .iter()
            .map(|col| PureState::from_column(col, rho.dims()))
            .collect();
        blocks.push(DegenerateBlock {
            eigenvalue,
            eigenvectors,
        });
        group.clear();
    };
    for &(w, k) in &kept {
        if let Some(&(prev, _)) = group.last() {
            if prev - w > degeneracy_tolerance {
                flush(&mut group, &mut blocks);
            }
        }
        group.push((w, k));
    }
    flush(&mut group, &mut blocks);

    let mass: f64 = blocks
        .iter()
        .map(|b| b.eigenvalue * b.multiplicity() as f64)
        .sum();
    if (mass - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParameter {
            context: format!("retained spectral mass {mass:.12} is not 1 within 1e-9"),
        });
    }
    Ok(SpectralDecomposition {
        blocks,
        degeneracy_tolerance,
        dims: rho.dims().to_vec(),
    })
}

/// Modified Gram-Schmidt, in place. The inputs are already near-orthonormal;
/// this just polishes them to machine precision.
fn gram_schmidt(cols: &mut [Vec<Complex64>]) {
    for j in 0..cols.len() {
        for i in 0..j {
            let overlap: Complex64 = cols[i]
                .iter()
                .zip(cols[j].iter())
                .map(|(a, b)| a.conj() * b)
                .sum();
            for k in 0..cols[j].len() {
                let correction = overlap * cols[i][k];
                cols[j][k] -= correction;
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in cols[j].iter_mut() {
            *z /= norm;
        }
    }
}

/// Reduced density matrices of every eigenvector on subsystem `x`, in the
/// decomposition's flattened block order.
pub fn reduced_eigenvector_states(
    decomposition: &SpectralDecomposition,
    x: usize,
) -> Result<Vec<DensityMatrix>> {
    if x >= decomposition.dims().len() {
        return Err(Error::InvalidSubsystems {
            context: format!("subsystem {} of {}", x, decomposition.dims().len()),
        });
    }
    decomposition
        .eigenvectors_flat()
        .iter()
        .map(|phi| phi.reduced(&[x]))
        .collect()
}

/// How a state's correlations classify against a numerical threshold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CorrelationKind {
    StrictlyClassical,
    SemiClassical,
    Quantum,
}

/// The measure values a classification was decided on.
#[derive(Debug, Clone)]
pub struct WitnessValues {
    /// Total correlation measure of the full state.
    pub total: f64,
    /// One-sided (subject-to-subsystem) values, indexed by subsystem.
    pub per_subsystem: Vec<f64>,
}

/// Classification result: the kind, which subsystems look classical, and
/// the witness values behind the decision.
#[derive(Debug, Clone)]
pub struct CorrelationClass {
    pub kind: CorrelationKind,
    pub classical_subsystems: Vec<usize>,
    pub witness_values: WitnessValues,
}

// ---------------------------------------------------------------------------
// Constructors

/// |psi+> = (|01> + |10>)/sqrt(2).
pub fn psi_plus() -> PureState {
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    PureState {
        amplitudes: vec![Complex64::ZERO, h, h, Complex64::ZERO],
        dims: vec![2, 2],
    }
}

/// The two-qubit family a |psi+><psi+| + (1-a) |11><11| for a in [0, 1].
///
/// Its eigen-data is analytic -- eigenvalue `a` on |psi+> and `1 - a` on
/// |11> -- which makes it the main closed-form fixture for the measures:
/// the total measure evaluates to a + 2 (sqrt(2) - 1) a (1 - a).
pub fn bell_mixture(a: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&a) {
        return Err(Error::InvalidParameter {
            context: format!("mixture weight must lie in [0, 1], got {a}"),
        });
    }
    let plus = psi_plus().projector().scale(Complex64::new(a, 0.0));
    let mut m = plus;
    let one_one = m.get(3, 3) + Complex64::new(1.0 - a, 0.0);
    m.set(3, 3, one_one);
    validate(m, vec![2, 2])
}

/// N-party GHZ state (|0...0> + |1...1>)/sqrt(2).
pub fn ghz(parties: usize) -> PureState {
    assert!(parties >= 2, "ghz needs at least two parties");
    let dim = 1usize << parties;
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let mut amplitudes = vec![Complex64::ZERO; dim];
    amplitudes[0] = h;
    amplitudes[dim - 1] = h;
    PureState {
        amplitudes,
        dims: vec![2; parties],
    }
}

/// Computational basis state |i1 i2 ...> for the given subsystem dims.
pub fn basis_state(dims: &[usize], indices: &[usize]) -> Result<PureState> {
    if indices.len() != dims.len() || indices.iter().zip(dims).any(|(&i, &d)| i >= d) {
        return Err(Error::InvalidSubsystems {
            context: format!("indices {:?} out of range for dims {:?}", indices, dims),
        });
    }
    let total: usize = dims.iter().product();
    let mut position = 0;
    for (&i, &d) in indices.iter().zip(dims) {
        position = position * d + i;
    }
    let mut amplitudes = vec![Complex64::ZERO; total];
    amplitudes[position] = Complex64::ONE;
    PureState::new(amplitudes, dims.to_vec())
}

/// Tensor product of pure states.
pub fn tensor_pure(states: &[&PureState]) -> PureState {
    assert!(!states.is_empty());
    let mut amplitudes = vec![Complex64::ONE];
    let mut dims = Vec::new();
    for s in states {
        let mut next = Vec::with_capacity(amplitudes.len() * s.amplitudes.len());
        for &a in &amplitudes {
            for &b in &s.amplitudes {
                next.push(a * b);
            }
        }
        amplitudes = next;
        dims.extend_from_slice(s.dims());
    }
    PureState { amplitudes, dims }
}

/// Per-subsystem ingredient of [`make_semi_classical`]: either a fixed
/// orthonormal family (one column per mixture index) or an arbitrary state
/// per mixture index.
pub enum SemiClassicalPart {
    /// d x K matrix whose K columns are mutually orthonormal vectors.
    Classical(ComplexMatrix),
    /// K arbitrary single-subsystem density matrices.
    Quantum(Vec<DensityMatrix>),
}

/// A state that is classical on the `Classical` subsystems and arbitrary on
/// the `Quantum` ones:
///
/// rho = sum_k p_k (x)_parts [ |psi_k><psi_k|  or  rho_k ].
pub fn make_semi_classical(
    probabilities: &[f64],
    parts: &[SemiClassicalPart],
) -> Result<DensityMatrix> {
    let k_count = probabilities.len();
    if k_count == 0 || probabilities.iter().any(|&p| p <= 0.0) {
        return Err(Error::InvalidProbabilities {
            context: "probabilities must be non-empty and strictly positive".into(),
        });
    }
    let sum: f64 = probabilities.iter().sum();
    if (sum - 1.0).abs() > tol::STATE_CHECK {
        return Err(Error::InvalidProbabilities {
            context: format!("probabilities sum to {sum:.12}, expected 1"),
        });
    }
    if parts.is_empty() {
        return Err(Error::InvalidSubsystems {
            context: "no subsystems given".into(),
        });
    }

    let mut dims = Vec::with_capacity(parts.len());
    for part in parts {
        match part {
            SemiClassicalPart::Classical(basis) => {
                if basis.cols() != k_count {
                    return Err(Error::DimensionMismatch {
                        context: format!(
                            "classical basis has {} columns for {} probabilities",
                            basis.cols(),
                            k_count
                        ),
                    });
                }
                let gram = basis.adjoint().matmul(basis);
                let deviation = gram.max_abs_diff(&ComplexMatrix::identity(k_count));
                if deviation > 1e-8 {
                    return Err(Error::NotOrthonormal { deviation });
                }
                dims.push(basis.rows());
            }
            SemiClassicalPart::Quantum(states) => {
                if states.len() != k_count {
                    return Err(Error::DimensionMismatch {
                        context: format!(
                            "{} component states for {} probabilities",
                            states.len(),
                            k_count
                        ),
                    });
                }
                let d = states[0].dimension();
                if states.iter().any(|s| s.dimension() != d) {
                    return Err(Error::DimensionMismatch {
                        context: "component states disagree on subsystem dimension".into(),
                    });
                }
                dims.push(d);
            }
        }
    }

    let total: usize = dims.iter().product();
    let mut matrix = ComplexMatrix::zeros(total, total);
    for (k, &p) in probabilities.iter().enumerate() {
        let mut term: Option<ComplexMatrix> = None;
        for part in parts {
            let factor = match part {
                SemiClassicalPart::Classical(basis) => {
                    let col = basis.column(k);
                    let d = basis.rows();
                    ComplexMatrix::from_fn(d, d, |i, j| col[i] * col[j].conj())
                }
                SemiClassicalPart::Quantum(states) => states[k].matrix().clone(),
            };
            term = Some(match term {
                None => factor,
                Some(acc) => tensor_product(&acc, &factor),
            });
        }
        matrix = matrix.add(
            &term
                .expect("at least one part")
                .scale(Complex64::new(p, 0.0)),
        );
    }
    validate(matrix, dims)
}

/// A strictly classical state: a probability mixture of products of fixed
/// orthonormal vectors, rho = sum_k p_k (x)_s |psi_k^s><psi_k^s|.
///
/// `bases[s]` holds subsystem s's vectors as the columns of a d_s x K matrix
/// with orthonormal columns.
pub fn make_strictly_classical(
    probabilities: &[f64],
    bases: &[ComplexMatrix],
) -> Result<DensityMatrix> {
    let parts: Vec<SemiClassicalPart> = bases
        .iter()
        .map(|b| SemiClassicalPart::Classical(b.clone()))
        .collect();
    make_semi_classical(probabilities, &parts)
}

// ---------------------------------------------------------------------------
// State files

#[derive(Deserialize)]
struct RawStateFile {
    dims: Vec<usize>,
    matrix: Vec<Vec<[f64; 2]>>,
}

/// Parses the JSON state format:
/// `{"dims": [2, 2], "matrix": [[[re, im], ...], ...]}` (row-major).
pub fn parse_state_json(text: &str) -> Result<DensityMatrix> {
    let raw: RawStateFile = serde_json::from_str(text).map_err(|e| Error::InvalidStateFile {
        context: e.to_string(),
    })?;
    let n = raw.matrix.len();
    if raw.matrix.iter().any(|row| row.len() != n) {
        return Err(Error::InvalidStateFile {
            context: "matrix rows have inconsistent lengths".into(),
        });
    }
    let entries: Vec<Complex64> = raw
        .matrix
        .iter()
        .flatten()
        .map(|&[re, im]| Complex64::new(re, im))
        .collect();
    let matrix = ComplexMatrix::new(n, n, entries)?;
    validate(matrix, raw.dims)
}

/// Serialises a density matrix to the JSON state format with 17 significant
/// digits, which round-trips every f64 bit-exactly.
pub fn state_to_json(rho: &DensityMatrix) -> String {
    let mut out = String::from("{\n  \"dims\": [");
    for (i, d) in rho.dims().iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push_str(&d.to_string());
    }
    out.push_str("],\n  \"matrix\": [\n");
    let n = rho.dimension();
    for i in 0..n {
        out.push_str("    [");
        for j in 0..n {
            if j > 0 {
                out.push_str(", ");
            }
            let z = rho.matrix().get(i, j);
            out.push_str(&format!("[{:.16e}, {:.16e}]", z.re, z.im));
        }
        out.push(']');
        if i + 1 < n {
            out.push(',');
        }
        out.push('\n');
    }
    out.push_str("  ]\n}\n");
    out
}

/// Reads and validates a state file.
pub fn read_state_file(path: &Path) -> Result<DensityMatrix> {
    let text = std::fs::read_to_string(path)?;
    parse_state_json(&text)
}

/// Writes a state file (see [`state_to_json`]).
pub fn write_state_file(path: &Path, rho: &DensityMatrix) -> Result<()> {
    std::fs::write(path, state_to_json(rho))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn validates_bell_projector() {
        let rho = validate(psi_plus().projector(), vec![2, 2]).unwrap();
        let d = spectral_decompose(&rho, tol::DEGENERACY).unwrap();
        assert_eq!(d.rank(), 1);
        assert_eq!(d.blocks().len(), 1);
        assert!((d.blocks()[0].eigenvalue - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_wrong_trace() {
        let m = psi_plus().projector().scale(c(0.9, 0.0));
        assert!(matches!(
            validate(m, vec![2, 2]),
            Err(Error::TraceNotOne { .. })
        ));
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = psi_plus().projector();
        m.set(0, 1, c(0.3, 0.0));
        assert!(matches!(
            validate(m, vec![2, 2]),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn rejects_negative_eigenvalue() {
        let m = ComplexMatrix::from_fn(2, 2, |i, j| {
            if i == j {
                c(if i == 0 { 1.2 } else { -0.2 }, 0.0)
            } else {
                Complex64::ZERO
            }
        });
        assert!(matches!(
            validate(m, vec![2]),
            Err(Error::NotPositiveSemidefinite { .. })
        ));
    }

    #[test]
    fn rejects_dims_mismatch() {
        let m = ComplexMatrix::identity(4).scale(c(0.25, 0.0));
        assert!(matches!(
            validate(m, vec![2, 3]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn pure_state_norm_check() {
        let bad = PureState::new(vec![c(1.0, 0.0), c(0.1, 0.0)], vec![2]);
        assert!(matches!(bad, Err(Error::NotNormalized { .. })));
    }

    #[test]
    fn mixture_eigendata_is_analytic() {
        let a = 0.3;
        let rho = bell_mixture(a).unwrap();
        let d = spectral_decompose(&rho, tol::DEGENERACY).unwrap();
        assert_eq!(d.rank(), 2);
        assert_eq!(d.blocks().len(), 2);
        // Descending: 1 - a on |11>, then a on |psi+>.
        assert!((d.blocks()[0].eigenvalue - 0.7).abs() < 1e-12);
        assert!((d.blocks()[1].eigenvalue - 0.3).abs() < 1e-12);
        let top = &d.blocks()[0].eigenvectors[0];
        assert!((top.amplitudes()[3].norm() - 1.0).abs() < 1e-10);
        let bot = &d.blocks()[1].eigenvectors[0];
        let overlap: Complex64 = psi_plus()
            .amplitudes()
            .iter()
            .zip(bot.amplitudes())
            .map(|(x, y)| x.conj() * y)
            .sum();
        assert!((overlap.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn mixture_at_half_is_one_degenerate_block() {
        let rho = bell_mixture(0.5).unwrap();
        let d = spectral_decompose(&rho, tol::DEGENERACY).unwrap();
        assert_eq!(d.blocks().len(), 1);
        assert_eq!(d.blocks()[0].multiplicity(), 2);
        assert!((d.blocks()[0].eigenvalue - 0.5).abs() < 1e-12);
    }

    #[test]
    fn maximally_mixed_two_qubits_is_one_block() {
        let m = ComplexMatrix::identity(4).scale(c(0.25, 0.0));
        let rho = validate(m, vec![2, 2]).unwrap();
        let d = spectral_decompose(&rho, tol::DEGENERACY).unwrap();
        assert_eq!(d.blocks().len(), 1);
        assert_eq!(d.blocks()[0].multiplicity(), 4);
    }

    #[test]
    fn grouping_is_stable_under_tiny_eigenvalue_perturbations() {
        // Eigenvalues 0.5 +/- 4e-10 (well inside the 1e-8 tolerance) must
        // land in one block; 0.5 +/- 5e-8 (outside) must split.
        let build = |eps: f64| {
            let p1 = psi_plus().projector().scale(c(0.5 + eps, 0.0));
            let mut m = p1;
            let v = m.get(3, 3) + c(0.5 - eps, 0.0);
            m.set(3, 3, v);
            validate(m, vec![2, 2]).unwrap()
        };
        let near = spectral_decompose(&build(4e-10), tol::DEGENERACY).unwrap();
        assert_eq!(near.blocks().len(), 1);
        let split = spectral_decompose(&build(5e-8), tol::DEGENERACY).unwrap();
        assert_eq!(split.blocks().len(), 2);
    }

    #[test]
    fn decomposition_mass_and_orthonormality() {
        let mut rng = sampling::rng(21);
        for _ in 0..20 {
            let rho = sampling::random_density(&mut rng, &[2, 2]);
            let d = spectral_decompose(&rho, tol::DEGENERACY).unwrap();
            let mass: f64 = d
                .blocks()
                .iter()
                .map(|b| b.eigenvalue * b.multiplicity() as f64)
                .sum();
            assert!((mass - 1.0).abs() < 1e-9);
            let vecs = d.eigenvectors_flat();
            for (i, a) in vecs.iter().enumerate() {
                for (j, b) in vecs.iter().enumerate() {
                    let overlap: Complex64 = a
                        .amplitudes()
                        .iter()
                        .zip(b.amplitudes())
                        .map(|(x, y)| x.conj() * y)
                        .sum();
                    let expected = if i == j { 1.0 } else { 0.0 };
                    assert!((overlap.norm() - expected).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn reassembly_from_blocks() {
        let mut rng = sampling::rng(22);
        for _ in 0..10 {
            let rho = sampling::random_density(&mut rng, &[2, 2]);
            let d = spectral_decompose(&rho, tol::DEGENERACY).unwrap();
            let mut m = ComplexMatrix::zeros(4, 4);
            for b in d.blocks() {
                for phi in &b.eigenvectors {
                    m = m.add(&phi.projector().scale(c(b.eigenvalue, 0.0)));
                }
            }
            assert!(m.max_abs_diff(rho.matrix()) < 1e-9);
        }
    }

    #[test]
    fn reduced_eigenvector_states_follow_block_order() {
        let rho = bell_mixture(0.3).unwrap();
        let d = spectral_decompose(&rho, tol::DEGENERACY).unwrap();
        let reduced = reduced_eigenvector_states(&d, 0).unwrap();
        assert_eq!(reduced.len(), 2);
        // First: reduction of |11> -> |1><1|. Second: reduction of |psi+> -> I/2.
        assert!((reduced[0].matrix().get(1, 1).re - 1.0).abs() < 1e-10);
        assert!((reduced[1].matrix().get(0, 0).re - 0.5).abs() < 1e-10);
        assert!((reduced[1].matrix().get(1, 1).re - 0.5).abs() < 1e-10);
    }

    #[test]
    fn strictly_classical_computational_mixture() {
        let basis = ComplexMatrix::identity(2);
        let rho = make_strictly_classical(&[0.5, 0.5], &[basis.clone(), basis]).unwrap();
        let mut expected = ComplexMatrix::zeros(4, 4);
        expected.set(0, 0, c(0.5, 0.0));
        expected.set(3, 3, c(0.5, 0.0));
        assert!(rho.matrix().max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn strictly_classical_hadamard_mixture() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let hadamard =
            ComplexMatrix::new(2, 2, vec![c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)]).unwrap();
        let comp = ComplexMatrix::identity(2);
        let rho = make_strictly_classical(&[1.0 / 3.0, 2.0 / 3.0], &[hadamard, comp]).unwrap();

        let plus = PureState::new(vec![c(h, 0.0), c(h, 0.0)], vec![2]).unwrap();
        let minus = PureState::new(vec![c(h, 0.0), c(-h, 0.0)], vec![2]).unwrap();
        let zero = basis_state(&[2], &[0]).unwrap();
        let one = basis_state(&[2], &[1]).unwrap();
        let expected = tensor_product(&plus.projector(), &zero.projector())
            .scale(c(1.0 / 3.0, 0.0))
            .add(&tensor_product(&minus.projector(), &one.projector()).scale(c(2.0 / 3.0, 0.0)));
        assert!(rho.matrix().max_abs_diff(&expected) < 1e-12);
    }

    #[test]
    fn strictly_classical_commutes_with_its_basis_projectors() {
        let mut rng = sampling::rng(23);
        for _ in 0..10 {
            let (rho, bases) = sampling::random_strictly_classical_with_bases(&mut rng, &[2, 2]);
            for k in 0..2 {
                let mut proj: Option<ComplexMatrix> = None;
                for b in &bases {
                    let col = b.column(k);
                    let d = b.rows();
                    let p = ComplexMatrix::from_fn(d, d, |i, j| col[i] * col[j].conj());
                    proj = Some(match proj {
                        None => p,
                        Some(acc) => tensor_product(&acc, &p),
                    });
                }
                let p = proj.unwrap();
                let comm = rho.matrix().matmul(&p).sub(&p.matmul(rho.matrix()));
                assert!(comm.frobenius_norm() < 1e-10);
            }
        }
    }

    #[test]
    fn rejects_non_orthonormal_classical_basis() {
        let col = c(1.0, 0.0);
        let degenerate =
            ComplexMatrix::new(2, 2, vec![col, col, Complex64::ZERO, Complex64::ZERO]).unwrap();
        let err = make_strictly_classical(&[0.5, 0.5], &[degenerate, ComplexMatrix::identity(2)]);
        assert!(matches!(err, Err(Error::NotOrthonormal { .. })));
    }

    #[test]
    fn semi_classical_mixture_matches_hand_built_matrix() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let zero = basis_state(&[2], &[0]).unwrap();
        let plus = PureState::new(vec![c(h, 0.0), c(h, 0.0)], vec![2]).unwrap();
        let b0 = DensityMatrix::new(zero.projector(), vec![2]).unwrap();
        let b1 = DensityMatrix::new(plus.projector(), vec![2]).unwrap();
        let rho = make_semi_classical(
            &[0.5, 0.5],
            &[
                SemiClassicalPart::Classical(ComplexMatrix::identity(2)),
                SemiClassicalPart::Quantum(vec![b0.clone(), b1.clone()]),
            ],
        )
        .unwrap();
        let expected = tensor_product(&basis_state(&[2], &[0]).unwrap().projector(), b0.matrix())
            .scale(c(0.5, 0.0))
            .add(
                &tensor_product(&basis_state(&[2], &[1]).unwrap().projector(), b1.matrix())
                    .scale(c(0.5, 0.0)),
            );
        assert!(rho.matrix().max_abs_diff(&expected) < 1e-12);
    }

    #[test]
    fn probabilities_must_sum_to_one() {
        let basis = ComplexMatrix::identity(2);
        let err = make_strictly_classical(&[0.6, 0.6], &[basis.clone(), basis]);
        assert!(matches!(err, Err(Error::InvalidProbabilities { .. })));
    }

    #[test]
    fn state_file_round_trip_is_bit_exact() {
        let mut rng = sampling::rng(24);
        let rho = sampling::random_density(&mut rng, &[2, 2]);
        let text = state_to_json(&rho);
        let back = parse_state_json(&text).unwrap();
        assert_eq!(back.dims(), rho.dims());
        for (a, b) in back.matrix().entries().iter().zip(rho.matrix().entries()) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }

    #[test]
    fn state_file_rejects_malformed_input() {
        assert!(matches!(
            parse_state_json("{\"dims\": [2, 2]"),
            Err(Error::InvalidStateFile { .. })
        ));
        assert!(matches!(
            parse_state_json("{\"dims\": [2, 2], \"matrix\": [[[1.0, 0.0]]]}"),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            parse_state_json("{\"dims\": [2], \"matrix\": [[[1.0, 0.0], [0.0, 0.0]]]}"),
            Err(Error::InvalidStateFile { .. })
        ));
    }

    #[test]
    fn state_file_rejects_invalid_density() {
        // Valid JSON, but trace 2.
        let rho =
            "{\"dims\": [2], \"matrix\": [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]}";
        assert!(matches!(
            parse_state_json(rho),
            Err(Error::TraceNotOne { .. })
        ));
    }

    #[test]
    fn ghz_and_basis_states() {
        let g = ghz(3);
        assert_eq!(g.dims(), &[2, 2, 2]);
        assert!((g.amplitudes()[0].re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        let b = basis_state(&[2, 2], &[1, 0]).unwrap();
        assert!((b.amplitudes()[2].re - 1.0).abs() < 1e-15);
    }
}
