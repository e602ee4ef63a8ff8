//! Dense complex matrices and the handful of decompositions the measures need.
//!
//! Everything here is sized for density matrices of a few qubits (dimension
//! at most 16), so determinism and accuracy win over asymptotics. The
//! eigensolver is a cyclic Jacobi iteration: two-sided unitary two-level
//! rotations applied until the off-diagonal mass is at machine level, with a
//! fixed sweep order and a fixed phase convention so the same input always
//! produces bitwise the same output.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tol;

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries. Rejects shape mismatches and
    /// non-finite entries: nothing downstream ever checks for NaN again.
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                context: format!(
                    "{}x{} matrix needs {} entries, got {}",
                    rows,
                    cols,
                    rows * cols,
                    entries.len()
                ),
            });
        }
        if !entries.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![Complex64::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Complex64::ONE);
        }
        m
    }

    /// Builds a matrix by evaluating `f(row, col)` at every position.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Self {
            rows,
            cols,
            entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: Complex64) {
        self.entries[i * self.cols + j] = value;
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    /// Entrywise complex conjugate.
    pub fn conjugate(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        debug_assert!(self.is_square());
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|z| z * factor).collect(),
        }
    }

    /// Matrix product; shapes must agree (programming error otherwise).
    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self.get(i, k);
                if aik == Complex64::ZERO {
                    continue;
                }
                for j in 0..rhs.cols {
                    let v = out.get(i, j) + aik * rhs.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(
            (self.rows, self.cols),
            (rhs.rows, rhs.cols),
            "add shape mismatch"
        );
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!(
            (self.rows, self.cols),
            (rhs.rows, rhs.cols),
            "sub shape mismatch"
        );
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Largest entry magnitude of `self - rhs`.
    pub fn max_abs_diff(&self, rhs: &Self) -> f64 {
        assert_eq!(
            (self.rows, self.cols),
            (rhs.rows, rhs.cols),
            "diff shape mismatch"
        );
        self.entries
            .iter()
            .zip(&rhs.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest magnitude among the entries of `m - m^H`.
    pub fn hermitian_deviation(&self) -> f64 {
        debug_assert!(self.is_square());
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        dev
    }

    /// `(m + m^H) / 2`, exactly Hermitian by construction.
    pub fn hermitized(&self) -> Self {
        debug_assert!(self.is_square());
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self.get(i, j) + self.get(j, i).conj()) * 0.5
        })
    }
}

impl std::ops::Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl std::ops::Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix::add(self, rhs)
    }
}

impl std::ops::Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix::sub(self, rhs)
    }
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += a.get(i, j).norm_sqr();
            }
        }
    }
    sum.sqrt()
}

/// One two-sided Jacobi rotation annihilating the (p, q) entry of the
/// Hermitian matrix `a`, accumulated into the eigenvector matrix `v`.
///
/// The rotation is U = P * R on the (p, q) plane, where P = diag(1, e^{-i phi})
/// absorbs the phase of a[p][q] and R is the real Jacobi rotation for the
/// resulting real symmetric 2x2 block.
fn jacobi_rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let beta = a.get(p, q);
    let b = beta.norm();
    if b == 0.0 {
        return;
    }
    let n = a.rows();
    let phase = beta / b; // e^{i phi}
    let e = phase.conj(); // e^{-i phi}
    let alpha = a.get(p, p).re;
    let gamma = a.get(q, q).re;
    let tau = (alpha - gamma) / (2.0 * b);
    let t = if tau == 0.0 {
        1.0
    } else {
        tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // B = A * U   (columns p and q)
    for i in 0..n {
        let aip = a.get(i, p);
        let aiq = a.get(i, q);
        a.set(i, p, aip * c + aiq * (e * s));
        a.set(i, q, aip * (-s) + aiq * (e * c));
    }
    // A' = U^H * B  (rows p and q)
    let ec = phase; // conj(e)
    for j in 0..n {
        let apj = a.get(p, j);
        let aqj = a.get(q, j);
        a.set(p, j, apj * c + aqj * (ec * s));
        a.set(q, j, apj * (-s) + aqj * (ec * c));
    }
    // The rotation annihilates (p, q) analytically; clear the round-off.
    a.set(p, q, Complex64::ZERO);
    a.set(q, p, Complex64::ZERO);
    a.set(p, p, Complex64::new(a.get(p, p).re, 0.0));
    a.set(q, q, Complex64::new(a.get(q, q).re, 0.0));

    // V <- V * U
    for i in 0..n {
        let vip = v.get(i, p);
        let viq = v.get(i, q);
        v.set(i, p, vip * c + viq * (e * s));
        v.set(i, q, vip * (-s) + viq * (e * c));
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues sorted in descending order and the matching
/// eigenvectors as the columns of a unitary matrix. Each eigenvector is
/// phase-fixed so that its largest-magnitude component (smallest index on
/// ties) is real and positive, which makes the output deterministic.
///
/// `tol` bounds the accepted Hermiticity deviation of the input; the
/// reconstruction `V diag(w) V^H` matches the input well within `10 * tol`.
pub fn hermitian_eig(m: &ComplexMatrix, tol: f64) -> Result<(Vec<f64>, ComplexMatrix)> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let deviation = m.hermitian_deviation();
    if deviation > tol {
        return Err(Error::NotHermitian { deviation, tol });
    }
    let n = m.rows();
    let mut a = m.hermitized();
    let mut v = ComplexMatrix::identity(n);
    let target = tol::JACOBI_OFF_DIAGONAL * a.frobenius_norm().max(1.0);
    for _ in 0..tol::JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&a) <= target {
            break;
        }
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                jacobi_rotate(&mut a, &mut v, p, q);
            }
        }
    }

    // Sort descending; ties keep the sweep's own (deterministic) order.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a.get(j, j)
            .re
            .partial_cmp(&a.get(i, i).re)
            .expect("Jacobi diagonal is finite")
            .then(i.cmp(&j))
    });

    let values: Vec<f64> = order.iter().map(|&k| a.get(k, k).re).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let col = v.column(src);
        // Phase convention: largest-magnitude component real positive.
        let mut pivot = 0;
        for (i, z) in col.iter().enumerate() {
            if z.norm_sqr() > col[pivot].norm_sqr() {
                pivot = i;
            }
        }
        let mag = col[pivot].norm();
        let phase = if mag > 0.0 {
            col[pivot].conj() / mag
        } else {
            Complex64::ONE
        };
        for (i, &z) in col.iter().enumerate() {
            vectors.set(i, dst, z * phase);
        }
    }
    Ok((values, vectors))
}

/// Principal square root of a positive semidefinite Hermitian matrix.
///
/// Eigenvalues in `(-tol, 0)` are clamped to zero; anything below `-tol`
/// is rejected as genuinely non-PSD input.
pub fn matrix_sqrt_psd(m: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    let (values, vectors) = hermitian_eig(m, tol)?;
    let n = values.len();
    let mut roots = Vec::with_capacity(n);
    for &w in &values {
        if w < -tol {
            return Err(Error::NotPositiveSemidefinite { eigenvalue: w, tol });
        }
        roots.push(w.max(0.0).sqrt());
    }
    // V diag(sqrt(w)) V^H
    let mut scaled = vectors.clone();
    for (k, &r) in roots.iter().enumerate() {
        for i in 0..n {
            let z = scaled.get(i, k) * r;
            scaled.set(i, k, z);
        }
    }
    Ok(scaled.matmul(&vectors.adjoint()).hermitized())
}

/// Kronecker product `a (x) b`.
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(a.rows() * b.rows(), a.cols() * b.cols());
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let aij = a.get(i, j);
            if aij == Complex64::ZERO {
                continue;
            }
            for k in 0..b.rows() {
                for l in 0..b.cols() {
                    out.set(i * b.rows() + k, j * b.cols() + l, aij * b.get(k, l));
                }
            }
        }
    }
    out
}

/// Partial trace over every subsystem *not* listed in `keep`.
///
/// `dims` gives the per-subsystem dimensions in row-major composite order,
/// and the result keeps the selected subsystems in their original order.
pub fn partial_trace(m: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let total: usize = dims.iter().product();
    if dims.is_empty() || total != m.rows() {
        return Err(Error::DimensionMismatch {
            context: format!(
                "subsystem dims {:?} do not compose to matrix dimension {}",
                dims,
                m.rows()
            ),
        });
    }
    if dims.contains(&0) {
        return Err(Error::DimensionMismatch {
            context: "zero-dimensional subsystem".into(),
        });
    }
    let mut keep: Vec<usize> = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if keep.is_empty() {
        return Err(Error::InvalidSubsystems {
            context: "keep set is empty".into(),
        });
    }
    if keep.iter().any(|&k| k >= dims.len()) {
        return Err(Error::InvalidSubsystems {
            context: format!("keep set {:?} exceeds {} subsystems", keep, dims.len()),
        });
    }

    // Row-major strides for each subsystem in the composite index.
    let n_sub = dims.len();
    let mut strides = vec![1usize; n_sub];
    for k in (0..n_sub.saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * dims[k + 1];
    }
    let traced: Vec<usize> = (0..n_sub).filter(|k| !keep.contains(k)).collect();

    // Composite-index offsets contributed by each group of subsystems.
    let offsets = |subs: &[usize]| -> Vec<usize> {
        let count: usize = subs.iter().map(|&k| dims[k]).product();
        let mut out = Vec::with_capacity(count);
        for mut idx in 0..count {
            let mut offset = 0;
            for &k in subs.iter().rev() {
                offset += (idx % dims[k]) * strides[k];
                idx /= dims[k];
            }
            out.push(offset);
        }
        out
    };
    let kept_offsets = offsets(&keep);
    let traced_offsets = if traced.is_empty() {
        vec![0]
    } else {
        offsets(&traced)
    };

    let d_keep = kept_offsets.len();
    let mut out = ComplexMatrix::zeros(d_keep, d_keep);
    for (r, &ro) in kept_offsets.iter().enumerate() {
        for (c, &co) in kept_offsets.iter().enumerate() {
            let mut sum = Complex64::ZERO;
            for &to in &traced_offsets {
                sum += m.get(ro + to, co + to);
            }
            out.set(r, c, sum);
        }
    }
    Ok(out)
}

/// Von Neumann entropy (base 2) of a spectrum; non-positive entries are
/// treated as exact zeros (the 0 log 0 = 0 convention).
pub(crate) fn entropy_from_spectrum(spectrum: &[f64]) -> f64 {
    spectrum
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| -x * x.log2())
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn diag(values: &[f64]) -> ComplexMatrix {
        let n = values.len();
        ComplexMatrix::from_fn(n, n, |i, j| {
            if i == j {
                c(values[i], 0.0)
            } else {
                Complex64::ZERO
            }
        })
    }

    #[test]
    fn rejects_entry_count_mismatch() {
        assert!(ComplexMatrix::new(2, 2, vec![Complex64::ZERO; 3]).is_err());
    }

    #[test]
    fn rejects_non_finite_entries() {
        let err = ComplexMatrix::new(1, 2, vec![c(f64::NAN, 0.0), Complex64::ZERO]).unwrap_err();
        assert!(matches!(err, Error::NonFinite));
    }

    #[test]
    fn eig_pauli_z() {
        let m = diag(&[1.0, -1.0]);
        let (vals, vecs) = hermitian_eig(&m, 1e-10).unwrap();
        assert!((vals[0] - 1.0).abs() < 1e-14);
        assert!((vals[1] + 1.0).abs() < 1e-14);
        assert!(vecs.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-14);
    }

    #[test]
    fn eig_pauli_y_phase_convention() {
        let m = ComplexMatrix::new(
            2,
            2,
            vec![Complex64::ZERO, c(0.0, -1.0), c(0.0, 1.0), Complex64::ZERO],
        )
        .unwrap();
        let (vals, vecs) = hermitian_eig(&m, 1e-10).unwrap();
        assert!((vals[0] - 1.0).abs() < 1e-14 && (vals[1] + 1.0).abs() < 1e-14);
        // Largest-magnitude component is a tie; the first one wins and is made
        // real positive.
        let top = vecs.get(0, 0);
        assert!(top.im.abs() < 1e-14 && top.re > 0.0);
        // Check the eigen equation M v = v for the +1 eigenvector.
        let v0 = vecs.column(0);
        let mv0 = (
            m.get(0, 0) * v0[0] + m.get(0, 1) * v0[1],
            m.get(1, 0) * v0[0] + m.get(1, 1) * v0[1],
        );
        assert!((mv0.0 - v0[0]).norm() < 1e-12 && (mv0.1 - v0[1]).norm() < 1e-12);
    }

    #[test]
    fn eig_rejects_non_square_and_non_hermitian() {
        let rect = ComplexMatrix::zeros(2, 3);
        assert!(matches!(
            hermitian_eig(&rect, 1e-10),
            Err(Error::NotSquare { .. })
        ));
        let skew = ComplexMatrix::new(
            2,
            2,
            vec![Complex64::ZERO, c(1.0, 0.0), c(2.0, 0.0), Complex64::ZERO],
        )
        .unwrap();
        assert!(matches!(
            hermitian_eig(&skew, 1e-10),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn eig_reconstructs_random_hermitian_matrices() {
        let mut rng = sampling::rng(11);
        for trial in 0..100 {
            let n = 2 + trial % 7; // dimensions 2..=8
            let m = sampling::random_hermitian(&mut rng, n);
            let (vals, vecs) = hermitian_eig(&m, 1e-10).unwrap();
            // Descending order.
            for w in vals.windows(2) {
                assert!(w[0] >= w[1]);
            }
            // Reconstruction.
            let mut scaled = vecs.clone();
            for (k, &w) in vals.iter().enumerate() {
                for i in 0..n {
                    let z = scaled.get(i, k) * w;
                    scaled.set(i, k, z);
                }
            }
            let recon = scaled.matmul(&vecs.adjoint());
            assert!(
                recon.max_abs_diff(&m) < 1e-10,
                "reconstruction off at trial {trial}"
            );
            // Orthonormal columns.
            let gram = vecs.adjoint().matmul(&vecs);
            assert!(gram.max_abs_diff(&ComplexMatrix::identity(n)) < 1e-10);
        }
    }

    #[test]
    fn sqrt_of_diagonal_matrix() {
        let m = diag(&[0.25, 0.75]);
        let r = matrix_sqrt_psd(&m, 1e-10).unwrap();
        assert!((r.get(0, 0).re - 0.5).abs() < 1e-12);
        assert!((r.get(1, 1).re - 0.8660254037844386).abs() < 1e-12);
        assert!(r.get(0, 1).norm() < 1e-14);
    }

    #[test]
    fn sqrt_squares_back_to_input() {
        let mut rng = sampling::rng(12);
        for _ in 0..25 {
            let g = sampling::random_ginibre(&mut rng, 4);
            let psd = g.matmul(&g.adjoint());
            let psd = psd.scale(c(1.0 / psd.trace().re, 0.0));
            let r = matrix_sqrt_psd(&psd, 1e-10).unwrap();
            assert!(r.matmul(&r).max_abs_diff(&psd) < 1e-9);
        }
    }

    #[test]
    fn sqrt_clamps_tiny_negative_eigenvalues() {
        let m = diag(&[1.0, -1e-12]);
        let r = matrix_sqrt_psd(&m, 1e-10).unwrap();
        assert_eq!(r.get(1, 1), Complex64::ZERO);
    }

    #[test]
    fn sqrt_rejects_indefinite_input() {
        let m = diag(&[1.2, -0.2]);
        assert!(matches!(
            matrix_sqrt_psd(&m, 1e-10),
            Err(Error::NotPositiveSemidefinite { .. })
        ));
    }

    #[test]
    fn tensor_of_pauli_z_pair() {
        let z = diag(&[1.0, -1.0]);
        let zz = tensor_product(&z, &z);
        let expected = diag(&[1.0, -1.0, -1.0, 1.0]);
        assert!(zz.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn tensor_identity_sizes() {
        let i2 = ComplexMatrix::identity(2);
        let i3 = ComplexMatrix::identity(3);
        assert!(tensor_product(&i2, &i3).max_abs_diff(&ComplexMatrix::identity(6)) < 1e-15);
    }

    #[test]
    fn tensor_mixed_product_identity() {
        let mut rng = sampling::rng(13);
        let a = sampling::random_ginibre(&mut rng, 2);
        let b = sampling::random_ginibre(&mut rng, 3);
        let cm = sampling::random_ginibre(&mut rng, 2);
        let d = sampling::random_ginibre(&mut rng, 3);
        let lhs = tensor_product(&a, &b).matmul(&tensor_product(&cm, &d));
        let rhs = tensor_product(&a.matmul(&cm), &b.matmul(&d));
        assert!(lhs.max_abs_diff(&rhs) < 1e-12);
    }

    #[test]
    fn partial_trace_bell_gives_maximally_mixed() {
        // |psi+> = (|01> + |10>)/sqrt(2)
        let half = c(0.5, 0.0);
        let mut proj = ComplexMatrix::zeros(4, 4);
        for &i in &[1, 2] {
            for &j in &[1, 2] {
                proj.set(i, j, half);
            }
        }
        let reduced = partial_trace(&proj, &[2, 2], &[0]).unwrap();
        let expected = diag(&[0.5, 0.5]);
        assert!(reduced.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn partial_trace_of_mixture_keep_second() {
        // a * |psi+><psi+| + (1-a) * |11><11| traced over the first qubit
        // leaves diag(a/2, 1 - a/2).
        let a = 0.3;
        let mut m = ComplexMatrix::zeros(4, 4);
        for &i in &[1, 2] {
            for &j in &[1, 2] {
                m.set(i, j, c(a / 2.0, 0.0));
            }
        }
        m.set(3, 3, c(1.0 - a, 0.0));
        let reduced = partial_trace(&m, &[2, 2], &[1]).unwrap();
        let expected = diag(&[a / 2.0, 1.0 - a / 2.0]);
        assert!(reduced.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn partial_trace_keeps_product_factor() {
        let mut rng = sampling::rng(14);
        let g1 = sampling::random_ginibre(&mut rng, 2);
        let a = g1.matmul(&g1.adjoint());
        let a = a.scale(c(1.0 / a.trace().re, 0.0));
        let g2 = sampling::random_ginibre(&mut rng, 3);
        let b = g2.matmul(&g2.adjoint());
        let b = b.scale(c(1.0 / b.trace().re, 0.0));
        let ab = tensor_product(&a, &b);
        let back = partial_trace(&ab, &[2, 3], &[0]).unwrap();
        assert!(back.max_abs_diff(&a) < 1e-12);
    }

    #[test]
    fn partial_trace_composes_across_subsystems() {
        let mut rng = sampling::rng(15);
        let g = sampling::random_ginibre(&mut rng, 8);
        let m = g.matmul(&g.adjoint());
        let m = m.scale(c(1.0 / m.trace().re, 0.0));
        let step1 = partial_trace(&m, &[2, 2, 2], &[0, 1]).unwrap();
        let step2 = partial_trace(&step1, &[2, 2], &[0]).unwrap();
        let direct = partial_trace(&m, &[2, 2, 2], &[0]).unwrap();
        assert!(step2.max_abs_diff(&direct) < 1e-12);
        // Trace is preserved throughout.
        assert!((direct.trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn partial_trace_rejects_bad_selections() {
        let m = ComplexMatrix::identity(4);
        assert!(matches!(
            partial_trace(&m, &[2, 2], &[]),
            Err(Error::InvalidSubsystems { .. })
        ));
        assert!(matches!(
            partial_trace(&m, &[2, 2], &[2]),
            Err(Error::InvalidSubsystems { .. })
        ));
        assert!(matches!(
            partial_trace(&m, &[3, 2], &[0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn entropy_of_spectrum_handles_zeros() {
        assert_eq!(entropy_from_spectrum(&[1.0, 0.0, -1e-18]), 0.0);
        assert!((entropy_from_spectrum(&[0.5, 0.5]) - 1.0).abs() < 1e-15);
    }
}
