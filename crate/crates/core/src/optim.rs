//! Internal derivative-free minimiser and the parameter chart for unitary
//! matrices. Everything here is deterministic: given the same objective and
//! the same start, the same point comes back on every platform.

use num_complex::Complex64;

use crate::linalg::ComplexMatrix;

/// Default simplex edge for the rotation chart; roughly a quarter turn in
/// each Givens angle, wide enough to escape the identity when it is not the
/// minimiser.
pub(crate) const ROTATION_STEP: f64 = 0.4;

pub(crate) struct SimplexResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub converged: bool,
}

/// Nelder-Mead with the textbook coefficients (reflect 1, expand 2,
/// contract 1/2, shrink 1/2). Ties in the vertex ordering are broken by
/// vertex index so the walk is fully reproducible.
pub(crate) fn nelder_mead(
    f: &mut dyn FnMut(&[f64]) -> f64,
    x0: &[f64],
    step: f64,
    max_iterations: usize,
    ftol: f64,
) -> SimplexResult {
    let n = x0.len();
    if n == 0 {
        return SimplexResult {
            x: Vec::new(),
            value: f(x0),
            converged: true,
        };
    }
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += step;
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| f(v)).collect();

    let mut converged = false;
    for _ in 0..max_iterations {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
        let best = order[0];
        let second_worst = order[n - 1];
        let worst = order[n];
        if values[worst] - values[best] <= ftol {
            converged = true;
            break;
        }

        let mut centroid = vec![0.0; n];
        for &k in order.iter().take(n) {
            for (c, x) in centroid.iter_mut().zip(&simplex[k]) {
                *c += x / n as f64;
            }
        }
        let blend = |towards: &[f64], coeff: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(towards)
                .map(|(c, x)| c + coeff * (x - c))
                .collect()
        };

        let reflected = blend(&simplex[worst], -1.0);
        let fr = f(&reflected);
        if fr < values[best] {
            let expanded = blend(&simplex[worst], -2.0);
            let fe = f(&expanded);
            if fe < fr {
                simplex[worst] = expanded;
                values[worst] = fe;
            } else {
                simplex[worst] = reflected;
                values[worst] = fr;
            }
            continue;
        }
        if fr < values[second_worst] {
            simplex[worst] = reflected;
            values[worst] = fr;
            continue;
        }
        let (contracted, reference) = if fr < values[worst] {
            (blend(&reflected, 0.5), fr)
        } else {
            (blend(&simplex[worst], 0.5), values[worst])
        };
        let fc = f(&contracted);
        if fc < reference {
            simplex[worst] = contracted;
            values[worst] = fc;
            continue;
        }
        // Shrink toward the best vertex.
        let anchor = simplex[best].clone();
        for k in 0..=n {
            if k == best {
                continue;
            }
            for (x, a) in simplex[k].iter_mut().zip(&anchor) {
                *x = a + 0.5 * (*x - a);
            }
            values[k] = f(&simplex[k]);
        }
    }

    let mut best = 0;
    for k in 1..=n {
        if values[k] < values[best] {
            best = k;
        }
    }
    SimplexResult {
        x: simplex.swap_remove(best),
        value: values[best],
        converged,
    }
}

/// Number of real parameters the chart uses for an f x f unitary.
pub(crate) fn unitary_param_count(f: usize) -> usize {
    f * f
}

/// Builds an f x f unitary from f^2 real parameters: a product of Givens
/// rotations G_pq(theta, phi) over index pairs in lexicographic order,
/// followed by a diagonal of phases. All parameters zero gives the
/// identity, and the chart is surjective onto U(f).
pub(crate) fn unitary_from_params(f: usize, params: &[f64]) -> ComplexMatrix {
    assert_eq!(
        params.len(),
        unitary_param_count(f),
        "chart needs f^2 parameters"
    );
    let mut u = ComplexMatrix::identity(f);
    let mut idx = 0;
    for p in 0..f {
        for q in (p + 1)..f {
            let theta = params[idx];
            let phi = params[idx + 1];
            idx += 2;
            let (sin, cos) = theta.sin_cos();
            let mut g = ComplexMatrix::identity(f);
            g.set(p, p, Complex64::new(cos, 0.0));
            g.set(p, q, -Complex64::from_polar(sin, -phi));
            g.set(q, p, Complex64::from_polar(sin, phi));
            g.set(q, q, Complex64::new(cos, 0.0));
            u = u.matmul(&g);
        }
    }
    let phases: Vec<Complex64> = params[idx..]
        .iter()
        .map(|&d| Complex64::from_polar(1.0, d))
        .collect();
    ComplexMatrix::from_fn(f, f, |i, j| u.get(i, j) * phases[j])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn minimises_a_shifted_quadratic() {
        let mut f = |x: &[f64]| (x[0] - 1.0).powi(2) + (x[1] + 2.0).powi(2);
        let r = nelder_mead(&mut f, &[0.0, 0.0], 0.5, 500, 1e-12);
        assert!(r.converged);
        assert!((r.x[0] - 1.0).abs() < 1e-4);
        assert!((r.x[1] + 2.0).abs() < 1e-4);
        assert!(r.value < 1e-8);
    }

    #[test]
    fn minimises_a_periodic_objective() {
        let mut f = |x: &[f64]| (x[0].sin() - 1.0).powi(2);
        let r = nelder_mead(&mut f, &[0.0], 0.4, 500, 1e-12);
        assert!(r.value < 1e-8);
    }

    #[test]
    fn is_deterministic() {
        let mut f = |x: &[f64]| x.iter().map(|v| v.cos()).sum::<f64>();
        let a = nelder_mead(&mut f.clone(), &[0.1, 0.2, 0.3, 0.4], 0.4, 300, 1e-10);
        let b = nelder_mead(&mut f, &[0.1, 0.2, 0.3, 0.4], 0.4, 300, 1e-10);
        assert_eq!(a.x, b.x);
        assert_eq!(a.value.to_bits(), b.value.to_bits());
    }

    #[test]
    fn chart_gives_identity_at_zero() {
        for f in 1..=4usize {
            let u = unitary_from_params(f, &vec![0.0; f * f]);
            assert!(u.max_abs_diff(&ComplexMatrix::identity(f)) < 1e-15);
        }
    }

    #[test]
    fn chart_output_is_unitary() {
        let mut rng = crate::sampling::rng(51);
        for f in 1..=4usize {
            for _ in 0..10 {
                let params: Vec<f64> = (0..f * f).map(|_| rng.gen_range(-3.0..3.0)).collect();
                let u = unitary_from_params(f, &params);
                let gram = u.adjoint().matmul(&u);
                assert!(gram.max_abs_diff(&ComplexMatrix::identity(f)) < 1e-12);
            }
        }
    }
}
