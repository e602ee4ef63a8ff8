//! The correlation measures: decomposition-averaged entanglement plus
//! minimised pairwise non-orthogonality of the reduced eigenvector states,
//! in total, one-sided, strict, multipartite, and two-qubit-strict forms.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::entanglement::{
    concurrence_mixed, concurrence_pure, pure_entanglement, remix_block_vector, EntanglementChoice,
};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::nonorthogonality::{pair_functional_terms, NonOrthogonalityChoice};
use crate::optim::{nelder_mead, unitary_from_params, unitary_param_count, ROTATION_STEP};
use crate::state::{
    spectral_decompose, CorrelationClass, CorrelationKind, DensityMatrix, SpectralDecomposition,
    WitnessValues,
};
use crate::tol;

/// How the minimisation over block unitaries is staged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MinimizationMode {
    /// First pick a decomposition minimising the block-averaged
    /// entanglement, then minimise the pair functional over the residual
    /// freedom that preserves that minimum (within the convergence
    /// tolerance). This matches reading the minimisation as acting on the
    /// pair term only, with the decomposition itself fixed by
    /// entanglement-optimality.
    #[default]
    Sequential,
    /// Minimise entanglement term plus pair functional together.
    Joint,
}

/// Pair weights w_ij used in the non-orthogonality sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WeightRule {
    /// w_ij = lambda_i lambda_j (the default).
    #[default]
    EigenvalueProduct,
    /// w_ij = 1.
    Uniform,
}

/// Budget and seeding for the block-unitary search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig {
    /// Number of deterministic starts; the first is always the identity.
    pub multistart: usize,
    /// Simplex iterations per start.
    pub max_iterations: usize,
    /// Convergence tolerance on the simplex value spread.
    pub convergence_tolerance: f64,
    /// Seed for the non-identity starts.
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            multistart: 8,
            max_iterations: 2000,
            convergence_tolerance: 1e-9,
            seed: 42,
        }
    }
}

/// All the choices a measure evaluation depends on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureConfig {
    pub entanglement: EntanglementChoice,
    pub nonorthogonality: NonOrthogonalityChoice,
    pub weights: WeightRule,
    pub degeneracy_tolerance: f64,
    pub optimizer: OptimizerConfig,
    pub minimization_mode: MinimizationMode,
}

impl Default for MeasureConfig {
    fn default() -> Self {
        Self {
            // The bipartition-mean quantifier coincides with the two-qubit
            // concurrence on 2x2 systems and stays defined for any dims,
            // so it is the one default that works everywhere.
            entanglement: EntanglementChoice::MultipartiteBipartitionMean,
            nonorthogonality: NonOrthogonalityChoice::default(),
            weights: WeightRule::default(),
            degeneracy_tolerance: tol::DEGENERACY,
            optimizer: OptimizerConfig::default(),
            minimization_mode: MinimizationMode::default(),
        }
    }
}

/// The two sides of a bipartite state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

impl Side {
    pub fn index(self) -> usize {
        match self {
            Side::A => 0,
            Side::B => 1,
        }
    }
}

/// One unitary per degeneracy block (identity 1x1 blocks included).
#[derive(Debug, Clone)]
pub struct UnitaryBlockAssignment {
    unitaries: Vec<ComplexMatrix>,
}

impl UnitaryBlockAssignment {
    /// Validates one f_s x f_s unitary per block.
    pub fn new(d: &SpectralDecomposition, unitaries: Vec<ComplexMatrix>) -> Result<Self> {
        if unitaries.len() != d.blocks().len() {
            return Err(Error::DimensionMismatch {
                context: format!(
                    "{} unitaries for {} blocks",
                    unitaries.len(),
                    d.blocks().len()
                ),
            });
        }
        for (u, block) in unitaries.iter().zip(d.blocks()) {
            let f = block.multiplicity();
            if u.rows() != f || u.cols() != f {
                return Err(Error::DimensionMismatch {
                    context: format!(
                        "{}x{} unitary for a block of multiplicity {f}",
                        u.rows(),
                        u.cols()
                    ),
                });
            }
            let gram = u.adjoint().matmul(u);
            let deviation = gram.max_abs_diff(&ComplexMatrix::identity(f));
            if deviation > tol::UNITARY_CHECK {
                return Err(Error::NotUnitary { deviation });
            }
        }
        Ok(Self { unitaries })
    }

    /// The do-nothing assignment.
    pub fn identity_for(d: &SpectralDecomposition) -> Self {
        Self {
            unitaries: d
                .blocks()
                .iter()
                .map(|b| ComplexMatrix::identity(b.multiplicity()))
                .collect(),
        }
    }

    pub fn unitaries(&self) -> &[ComplexMatrix] {
        &self.unitaries
    }
}

/// What the block search did, as recorded in reports.
#[derive(Debug, Clone)]
pub struct OptimizerDiagnostics {
    /// Starts actually run (0 when the state had no degenerate block).
    pub starts_used: usize,
    /// Final value of the last optimisation stage's objective (the measure
    /// value itself when no optimisation ran).
    pub best_objective: f64,
    /// Average entanglement of each block at the chosen assignment.
    pub block_entanglement: Vec<f64>,
    /// Whether the winning start's simplex met the tolerance.
    pub converged: bool,
}

/// A measure value with its term-by-term breakdown.
#[derive(Debug, Clone)]
pub struct MeasureReport {
    /// entanglement_term + sum of nonorthogonality_terms.
    pub value: f64,
    /// Eigenvalue-weighted pure-state entanglement of the decomposition.
    pub entanglement_term: f64,
    /// Pair-functional sums, one slot per subsystem (zero for subsystems
    /// the measure does not look at).
    pub nonorthogonality_terms: Vec<f64>,
    pub optimizer_diagnostics: OptimizerDiagnostics,
    pub decomposition_used: SpectralDecomposition,
}

// ---------------------------------------------------------------------------
// Block-unitary search

/// Penalty weight keeping the second sequential pass on the entanglement-
/// optimal set. Large against the pair functional's O(1) scale.
const SEQUENTIAL_PENALTY: f64 = 1e6;

struct SearchOutcome {
    assignment: UnitaryBlockAssignment,
    value: f64,
    converged: bool,
    starts_used: usize,
}

/// Minimises `objective` over one unitary per degenerate block, composed on
/// top of `base` when given (so parameter zero means "keep base"). Blocks of
/// multiplicity 1 stay pinned to the identity: the only chart freedom they
/// carry is a global phase, which no objective here can see.
fn search_blocks(
    d: &SpectralDecomposition,
    base: Option<&UnitaryBlockAssignment>,
    objective: &dyn Fn(&UnitaryBlockAssignment) -> f64,
    cfg: &OptimizerConfig,
) -> SearchOutcome {
    let free: Vec<usize> = d
        .blocks()
        .iter()
        .enumerate()
        .filter(|(_, b)| b.multiplicity() > 1)
        .map(|(s, _)| s)
        .collect();
    let param_len: usize = free
        .iter()
        .map(|&s| unitary_param_count(d.blocks()[s].multiplicity()))
        .sum();

    let assemble = |params: &[f64]| -> UnitaryBlockAssignment {
        let mut unitaries: Vec<ComplexMatrix> = match base {
            Some(b) => b.unitaries().to_vec(),
            None => d
                .blocks()
                .iter()
                .map(|b| ComplexMatrix::identity(b.multiplicity()))
                .collect(),
        };
        let mut offset = 0;
        for &s in &free {
            let f = d.blocks()[s].multiplicity();
            let count = unitary_param_count(f);
            let v = unitary_from_params(f, &params[offset..offset + count]);
            offset += count;
            unitaries[s] = unitaries[s].matmul(&v);
        }
        UnitaryBlockAssignment { unitaries }
    };

    if free.is_empty() {
        let assignment = assemble(&[]);
        let value = objective(&assignment);
        return SearchOutcome {
            assignment,
            value,
            converged: true,
            starts_used: 0,
        };
    }

    let mut best: Option<(Vec<f64>, f64, bool)> = None;
    for k in 0..cfg.multistart.max(1) {
        let start: Vec<f64> = if k == 0 {
            vec![0.0; param_len]
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(
                cfg.seed
                    .wrapping_add((k as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)),
            );
            (0..param_len)
                .map(|_| rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI))
                .collect()
        };
        let mut f = |params: &[f64]| objective(&assemble(params));
        let run = nelder_mead(
            &mut f,
            &start,
            ROTATION_STEP,
            cfg.max_iterations,
            cfg.convergence_tolerance,
        );
        // Strict improvement only, so ties go to the earliest start and the
        // result is independent of evaluation order.
        let improves = match &best {
            None => true,
            Some((_, value, _)) => run.value < *value,
        };
        if improves {
            best = Some((run.x, run.value, run.converged));
        }
    }
    let (params, value, converged) = best.expect("at least one start runs");
    SearchOutcome {
        assignment: assemble(&params),
        value,
        converged,
        starts_used: cfg.multistart.max(1),
    }
}

/// Minimises an objective over the unitary freedom of the degenerate
/// blocks. The search is deterministic for a given config; the identity
/// assignment is always among the starting points, so the result is never
/// worse than leaving the decomposition alone.
pub fn optimize_blocks(
    d: &SpectralDecomposition,
    objective: impl Fn(&UnitaryBlockAssignment) -> f64,
    cfg: &OptimizerConfig,
) -> (UnitaryBlockAssignment, f64) {
    let outcome = search_blocks(d, None, &objective, cfg);
    (outcome.assignment, outcome.value)
}

// ---------------------------------------------------------------------------
// The measure engine

fn weight_matrix(lambdas: &[f64], rule: WeightRule) -> Vec<Vec<f64>> {
    let n = lambdas.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| match rule {
                    WeightRule::EigenvalueProduct => lambdas[i] * lambdas[j],
                    WeightRule::Uniform => 1.0,
                })
                .collect()
        })
        .collect()
}

struct Evaluation {
    entanglement_weighted: f64,
    entanglement_block_avg_sum: f64,
    block_entanglement: Vec<f64>,
    f_terms: Vec<f64>,
}

/// One full evaluation of the measure's ingredients at an assignment.
fn evaluate_assignment(
    d: &SpectralDecomposition,
    assignment: &UnitaryBlockAssignment,
    f_subsystems: &[usize],
    entanglement: EntanglementChoice,
    weights: &[Vec<f64>],
    nonorthogonality: NonOrthogonalityChoice,
) -> Result<Evaluation> {
    let n_subsystems = d.dims().len();
    let mut entanglement_weighted = 0.0;
    let mut entanglement_block_avg_sum = 0.0;
    let mut block_entanglement = Vec::with_capacity(d.blocks().len());
    let mut reduced: Vec<Option<Vec<DensityMatrix>>> = (0..n_subsystems)
        .map(|x| f_subsystems.contains(&x).then(Vec::new))
        .collect();

    for (s, block) in d.blocks().iter().enumerate() {
        let f = block.multiplicity();
        let mut block_sum = 0.0;
        for i in 0..f {
            let psi = remix_block_vector(block, &assignment.unitaries()[s], i);
            let e = pure_entanglement(&psi, entanglement)?;
            block_sum += e;
            entanglement_weighted += block.eigenvalue * e;
            for slot in reduced.iter_mut().enumerate() {
                if let (x, Some(list)) = slot {
                    list.push(psi.reduced(&[x])?);
                }
            }
        }
        block_entanglement.push(block_sum / f as f64);
        entanglement_block_avg_sum += block_sum / f as f64;
    }

    let f_terms = pair_functional_terms(&reduced, weights, nonorthogonality)?;
    Ok(Evaluation {
        entanglement_weighted,
        entanglement_block_avg_sum,
        block_entanglement,
        f_terms,
    })
}

/// Shared engine behind the Eq.-(5)-shaped measures: eigenvalue-weighted
/// entanglement plus the minimised pair functional over `f_subsystems`.
fn eval_measure(
    rho: &DensityMatrix,
    f_subsystems: &[usize],
    entanglement: EntanglementChoice,
    cfg: &MeasureConfig,
) -> Result<MeasureReport> {
    let n = rho.subsystem_count();
    match entanglement {
        EntanglementChoice::Concurrence if rho.dims() != [2, 2] => {
            return Err(Error::UnsupportedDims {
                context: format!("concurrence needs dims [2, 2], got {:?}", rho.dims()),
            });
        }
        EntanglementChoice::EntropyOfEntanglement if n != 2 => {
            return Err(Error::UnsupportedDims {
                context: format!("entropy of entanglement needs 2 subsystems, got {n}"),
            });
        }
        _ => {}
    }
    if f_subsystems.iter().any(|&x| x >= n) {
        return Err(Error::InvalidSubsystems {
            context: format!(
                "subsystem selection {:?} out of range for {n} subsystems",
                f_subsystems
            ),
        });
    }

    let d = spectral_decompose(rho, cfg.degeneracy_tolerance)?;
    let weights = weight_matrix(&d.eigenvalues_flat(), cfg.weights);

    // Fallible dry run at the identity; after it succeeds, evaluation
    // cannot fail (every later assignment only remixes within blocks).
    let identity = UnitaryBlockAssignment::identity_for(&d);
    evaluate_assignment(
        &d,
        &identity,
        f_subsystems,
        entanglement,
        &weights,
        cfg.nonorthogonality,
    )?;
    let eval = |assignment: &UnitaryBlockAssignment| -> Evaluation {
        evaluate_assignment(
            &d,
            assignment,
            f_subsystems,
            entanglement,
            &weights,
            cfg.nonorthogonality,
        )
        .expect("assignment evaluation is infallible after the identity dry run")
    };

    let (assignment, diagnostics_value, starts_used, converged) = if !d.has_degeneracy() {
        (identity, f64::NAN, 0, true)
    } else {
        match cfg.minimization_mode {
            MinimizationMode::Joint => {
                let outcome = search_blocks(
                    &d,
                    None,
                    &|a| {
                        let e = eval(a);
                        e.entanglement_weighted + e.f_terms.iter().sum::<f64>()
                    },
                    &cfg.optimizer,
                );
                (
                    outcome.assignment,
                    outcome.value,
                    outcome.starts_used,
                    outcome.converged,
                )
            }
            MinimizationMode::Sequential => {
                let pass1 = search_blocks(
                    &d,
                    None,
                    &|a| eval(a).entanglement_block_avg_sum,
                    &cfg.optimizer,
                );
                let e_min = pass1.value;
                let slack = cfg.optimizer.convergence_tolerance;
                let pass2 = search_blocks(
                    &d,
                    Some(&pass1.assignment),
                    &|a| {
                        let e = eval(a);
                        let drift = (e.entanglement_block_avg_sum - e_min - slack).max(0.0);
                        e.f_terms.iter().sum::<f64>() + SEQUENTIAL_PENALTY * drift
                    },
                    &cfg.optimizer,
                );
                let starts = pass1.starts_used + pass2.starts_used;
                (
                    pass2.assignment,
                    pass2.value,
                    starts,
                    pass1.converged && pass2.converged,
                )
            }
        }
    };

    let final_eval = eval(&assignment);
    let value = final_eval.entanglement_weighted + final_eval.f_terms.iter().sum::<f64>();
    let best_objective = if diagnostics_value.is_nan() {
        value
    } else {
        diagnostics_value
    };
    Ok(MeasureReport {
        value,
        entanglement_term: final_eval.entanglement_weighted,
        nonorthogonality_terms: final_eval.f_terms,
        optimizer_diagnostics: OptimizerDiagnostics {
            starts_used,
            best_objective,
            block_entanglement: final_eval.block_entanglement,
            converged,
        },
        decomposition_used: d,
    })
}

fn require_bipartite(rho: &DensityMatrix) -> Result<()> {
    if rho.subsystem_count() != 2 {
        return Err(Error::UnsupportedDims {
            context: format!("measure needs 2 subsystems, got dims {:?}", rho.dims()),
        });
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Public measures

/// Total quantum correlation of a bipartite state: eigenvalue-weighted
/// entanglement of the decomposition plus the minimised pair functional on
/// both subsystems.
pub fn q_total(rho: &DensityMatrix, cfg: &MeasureConfig) -> Result<MeasureReport> {
    require_bipartite(rho)?;
    eval_measure(rho, &[0, 1], cfg.entanglement, cfg)
}

/// One-sided correlation: the pair functional only sees the chosen side.
/// Vanishes exactly when the state is classical on that side.
pub fn q_one_sided(rho: &DensityMatrix, side: Side, cfg: &MeasureConfig) -> Result<MeasureReport> {
    require_bipartite(rho)?;
    eval_measure(rho, &[side.index()], cfg.entanglement, cfg)
}

/// Strict correlation: geometric mean of the two one-sided values. Zero as
/// soon as either side is classical.
pub fn q_strict(rho: &DensityMatrix, cfg: &MeasureConfig) -> Result<f64> {
    let a = q_one_sided(rho, Side::A, cfg)?.value;
    let b = q_one_sided(rho, Side::B, cfg)?.value;
    Ok((a * b).sqrt())
}

/// N-partite correlation: decomposition-averaged multipartite entanglement
/// plus the minimised pair functional over every subsystem. The
/// entanglement quantifier is always the bipartition mean, which is part of
/// this measure's definition (the configured choice is ignored).
pub fn q_multipartite(rho: &DensityMatrix, cfg: &MeasureConfig) -> Result<MeasureReport> {
    let all: Vec<usize> = (0..rho.subsystem_count()).collect();
    eval_measure(
        rho,
        &all,
        EntanglementChoice::MultipartiteBipartitionMean,
        cfg,
    )
}

/// Correlation subject to a subsystem set: the pair functional is
/// restricted to the listed subsystems (the rest enter as placeholders).
pub fn q_subject(
    rho: &DensityMatrix,
    subjects: &[usize],
    cfg: &MeasureConfig,
) -> Result<MeasureReport> {
    let mut subjects: Vec<usize> = subjects.to_vec();
    subjects.sort_unstable();
    subjects.dedup();
    if subjects.is_empty() {
        return Err(Error::InvalidSubsystems {
            context: "empty subject set".into(),
        });
    }
    eval_measure(
        rho,
        &subjects,
        EntanglementChoice::MultipartiteBipartitionMean,
        cfg,
    )
}

/// Strict N-partite correlation: N-th root of the product of the
/// single-subsystem values.
pub fn q_strict_multipartite(rho: &DensityMatrix, cfg: &MeasureConfig) -> Result<f64> {
    let n = rho.subsystem_count();
    let mut product = 1.0;
    for x in 0..n {
        product *= q_subject(rho, &[x], cfg)?.value;
    }
    Ok(product.max(0.0).powf(1.0 / n as f64))
}

/// Simplified two-qubit strict measure: non-degenerate eigenvectors
/// contribute lambda_i times their pure concurrence; every degenerate block
/// contributes lambda_s f_s times the Wootters concurrence of the block
/// state (1/f_s) sum |phi><phi|, which is what the best orthonormal remix
/// of the block attains. No numerical optimisation is involved.
pub fn q_strict_two_qubit(rho: &DensityMatrix, cfg: &MeasureConfig) -> Result<f64> {
    if rho.dims() != [2, 2] {
        return Err(Error::UnsupportedDims {
            context: format!("two-qubit measure got dims {:?}", rho.dims()),
        });
    }
    let d = spectral_decompose(rho, cfg.degeneracy_tolerance)?;
    let mut total = 0.0;
    for block in d.blocks() {
        let f = block.multiplicity();
        if f == 1 {
            total += block.eigenvalue * concurrence_pure(&block.eigenvectors[0])?;
        } else {
            total += block.eigenvalue * f as f64 * concurrence_mixed(&block.block_state())?;
        }
    }
    Ok(total)
}

/// Sorts a state into strictly classical / semi-classical / quantum by
/// thresholding the total and single-subsystem measures.
pub fn classify(
    rho: &DensityMatrix,
    cfg: &MeasureConfig,
    threshold: f64,
) -> Result<CorrelationClass> {
    if !threshold.is_finite() || threshold <= 0.0 {
        return Err(Error::InvalidParameter {
            context: format!(
                "classification threshold must be positive and finite, got {threshold}"
            ),
        });
    }
    let n = rho.subsystem_count();
    let total = if n == 2 {
        q_total(rho, cfg)?.value
    } else {
        q_multipartite(rho, cfg)?.value
    };
    let mut per_subsystem = Vec::with_capacity(n);
    for x in 0..n {
        let value = if n == 2 {
            let side = if x == 0 { Side::A } else { Side::B };
            q_one_sided(rho, side, cfg)?.value
        } else {
            q_subject(rho, &[x], cfg)?.value
        };
        per_subsystem.push(value);
    }

    let classical_subsystems: Vec<usize> = per_subsystem
        .iter()
        .enumerate()
        .filter(|(_, &v)| v < threshold)
        .map(|(x, _)| x)
        .collect();
    let kind = if total < threshold {
        CorrelationKind::StrictlyClassical
    } else if !classical_subsystems.is_empty() {
        CorrelationKind::SemiClassical
    } else {
        CorrelationKind::Quantum
    };
    let classical_subsystems = match kind {
        CorrelationKind::StrictlyClassical => (0..n).collect(),
        CorrelationKind::SemiClassical => classical_subsystems,
        CorrelationKind::Quantum => Vec::new(),
    };
    Ok(CorrelationClass {
        kind,
        classical_subsystems,
        witness_values: WitnessValues {
            total,
            per_subsystem,
        },
    })
}

/// Closed form of [`q_total`] on the `bell_mixture` family under the
/// default config: a + 2 (sqrt(2) - 1) a (1 - a).
pub fn bell_mixture_q_total(a: f64) -> f64 {
    a + 2.0 * (std::f64::consts::SQRT_2 - 1.0) * a * (1.0 - a)
}

/// Closed form of [`q_one_sided`] (either side) on the `bell_mixture`
/// family: a + (sqrt(2) - 1) a (1 - a).
pub fn bell_mixture_q_one_sided(a: f64) -> f64 {
    a + (std::f64::consts::SQRT_2 - 1.0) * a * (1.0 - a)
}
