//! Exact finite oracle for the enveloping-semigroup picture: transition maps
//! of a finite system, the stochastic matrices that measures on the group
//! induce on the measure simplex, and the equality check between the two
//! semigroups at grid resolution.
//!
//! Matrix convention, fixed once: matrices are column-stochastic, column `j`
//! is the weight vector of `μ∗δ_j`, and `P·ν` (weights as a column vector)
//! implements `ν ↦ μ∗ν`. With that convention `P_{μ₁∗μ₂} = P_{μ₁}·P_{μ₂}`.
//!
//! For a finite acting group every measure on `G` is already a finite convex
//! combination of Diracs, so the two Ellis semigroups coincide tautologically
//! at the level of sets; what the module checks is the algebraic skeleton:
//! every grid measure's matrix decomposes over the transition maps with an
//! exactly zero residual, and the measure-to-matrix assignment is a semigroup
//! homomorphism. The genuinely infinite side of the statement is exercised
//! statistically by the approximation module instead.

use serde::Serialize;
use thiserror::Error;

use crate::convolution::convolve;
use crate::group::GroupIndex;
use crate::measure::FiniteMeasure;
use crate::system::{FiniteSystem, PointIndex, System};
use crate::weight::Weight;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EllisError {
    #[error("group order {order} exceeds the configured bound {bound}")]
    BoundExceeded { order: usize, bound: usize },
    #[error("transition map entry {value} out of range for space size {space}")]
    EntryRange { value: usize, space: usize },
}

/// A total map `X → X`, encoded as an index vector.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct TransitionMap(Vec<usize>);

impl TransitionMap {
    pub fn new(images: Vec<usize>) -> Result<Self, EllisError> {
        let space = images.len();
        if let Some(&value) = images.iter().find(|&&v| v >= space) {
            return Err(EllisError::EntryRange { value, space });
        }
        Ok(Self(images))
    }

    pub fn apply(&self, x: PointIndex) -> PointIndex {
        PointIndex(self.0[x.0])
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }
}

/// The enveloping semigroup of a finite system: the set `{x ↦ g·x : g ∈ G}`,
/// deduplicated. Closure adds nothing when the acting group is finite, so
/// enumeration over `G` is the whole semigroup.
pub fn enveloping_semigroup(sys: &FiniteSystem) -> Vec<TransitionMap> {
    let mut maps: Vec<TransitionMap> = sys
        .group()
        .elements()
        .map(|g| transition_of(sys, g))
        .collect();
    maps.sort();
    maps.dedup();
    maps
}

fn transition_of(sys: &FiniteSystem, g: GroupIndex) -> TransitionMap {
    TransitionMap(sys.points().map(|x| sys.act(&g, &x).0).collect())
}

/// A column-stochastic matrix with exact entries.
#[derive(Clone, Debug, PartialEq)]
pub struct StochasticMatrix<W> {
    dim: usize,
    cols: Vec<Vec<W>>, // cols[j][i] = mass sent from point j to point i
}

impl<W: Weight> StochasticMatrix<W> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, row: usize, col: usize) -> &W {
        &self.cols[col][row]
    }

    /// The permutation matrix of one transition map.
    pub fn from_transition(map: &TransitionMap) -> Self {
        let dim = map.images().len();
        let mut cols = vec![vec![W::zero(); dim]; dim];
        for (j, col) in cols.iter_mut().enumerate() {
            col[map.images()[j]] = W::one();
        }
        Self { dim, cols }
    }

    /// Convex combination `Σ_T c_T · P_T` over transition maps.
    pub fn combination(terms: &[(TransitionMap, W)], dim: usize) -> Self {
        let mut cols = vec![vec![W::zero(); dim]; dim];
        for (map, weight) in terms {
            for (j, col) in cols.iter_mut().enumerate() {
                let i = map.images()[j];
                col[i] = col[i].clone() + weight.clone();
            }
        }
        Self { dim, cols }
    }

    /// `P·ν`: the weight vector of `μ∗ν` under this matrix's measure.
    pub fn apply(&self, nu: &FiniteMeasure<PointIndex, W>) -> FiniteMeasure<PointIndex, W> {
        let mut out = vec![W::zero(); self.dim];
        for (x, wx) in nu.entries() {
            for (i, slot) in out.iter_mut().enumerate() {
                *slot = slot.clone() + self.cols[x.0][i].clone() * wx.clone();
            }
        }
        FiniteMeasure::from_unchecked(
            out.into_iter().enumerate().map(|(i, w)| (PointIndex(i), w)).collect(),
        )
    }

    /// Matrix product: `(A·B)·ν = A·(B·ν)`.
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let cols = other
            .cols
            .iter()
            .map(|b_col| {
                let mut col = vec![W::zero(); self.dim];
                for (k, b_entry) in b_col.iter().enumerate() {
                    for (i, slot) in col.iter_mut().enumerate() {
                        *slot = slot.clone() + self.cols[k][i].clone() * b_entry.clone();
                    }
                }
                col
            })
            .collect();
        Self { dim: self.dim, cols }
    }

    pub fn is_column_stochastic(&self) -> bool {
        self.stochasticity_defect().is_zero()
    }

    /// How far the matrix is from column-stochastic: the worst column-sum gap
    /// from 1, or the magnitude of the most negative entry.
    pub fn stochasticity_defect(&self) -> W {
        let mut worst = W::zero();
        for col in &self.cols {
            let sum = col.iter().fold(W::zero(), |acc, w| acc + w.clone());
            let gap = (sum - W::one()).abs();
            if gap > worst {
                worst = gap;
            }
            for w in col {
                if *w < W::zero() {
                    let magnitude = w.abs();
                    if magnitude > worst {
                        worst = magnitude;
                    }
                }
            }
        }
        worst
    }

    /// Entrywise max |A − B|.
    pub fn max_abs_diff(&self, other: &Self) -> W {
        assert_eq!(self.dim, other.dim);
        let mut worst = W::zero();
        for (a_col, b_col) in self.cols.iter().zip(&other.cols) {
            for (a, b) in a_col.iter().zip(b_col) {
                let gap = (a.clone() - b.clone()).abs();
                if gap > worst {
                    worst = gap;
                }
            }
        }
        worst
    }
}

/// `P = Σ_g μ(g)·P_g`: the matrix through which `μ` acts on the simplex.
pub fn measure_action_matrix<W: Weight>(
    sys: &FiniteSystem,
    mu: &FiniteMeasure<GroupIndex, W>,
) -> StochasticMatrix<W> {
    let terms: Vec<(TransitionMap, W)> = mu
        .entries()
        .iter()
        .map(|(g, w)| (transition_of(sys, *g), w.clone()))
        .collect();
    StochasticMatrix::combination(&terms, sys.space_size())
}

#[derive(Clone, Copy, Debug)]
pub struct EllisCheckConfig {
    /// Grid step is `1/denominator` on the measure simplex over `G`.
    pub grid_denominator: u64,
    /// Refuse groups larger than this (the grid explodes combinatorially).
    pub max_group_order: usize,
}

impl Default for EllisCheckConfig {
    fn default() -> Self {
        Self { grid_denominator: 4, max_group_order: 16 }
    }
}

/// Outcome of the grid check. `max_residual` is the worst entrywise gap
/// between a grid matrix and its decomposition over transition maps — exactly
/// `"0"` in rational mode.
#[derive(Clone, Debug, Serialize)]
pub struct EllisReport {
    pub group_order: usize,
    pub space_size: usize,
    pub grid_denominator: u64,
    pub distinct_maps: usize,
    pub matrices_checked: usize,
    pub max_residual: String,
    pub all_decomposed: bool,
    /// Whether the transition-map matrices are linearly independent, making
    /// the decomposition recoverable from the matrix alone. (Not always true:
    /// distinct measures can induce the same matrix.)
    pub reconstruction_unique: bool,
    pub reconstructions_matched: bool,
}

/// Check, on the grid of rational measures with the configured denominator,
/// that every induced matrix is a convex combination of transition-map
/// matrices (zero residual), and — when the transition matrices are linearly
/// independent — that the combination is recoverable from the matrix alone.
pub fn ellis_equality_check<W: Weight>(
    sys: &FiniteSystem,
    config: EllisCheckConfig,
) -> Result<EllisReport, EllisError> {
    let order = sys.group().order();
    if order > config.max_group_order {
        return Err(EllisError::BoundExceeded { order, bound: config.max_group_order });
    }
    let maps = enveloping_semigroup(sys);
    let dim = sys.space_size();
    let map_matrices: Vec<StochasticMatrix<W>> =
        maps.iter().map(StochasticMatrix::from_transition).collect();
    let unique = transition_matrices_independent(&map_matrices, dim);

    let mut max_residual = W::zero();
    let mut all_decomposed = true;
    let mut reconstructions_matched = true;
    let grid = simplex_grid(order, config.grid_denominator);
    let checked = grid.len();
    for weights in &grid {
        let mu = grid_measure::<W>(weights, config.grid_denominator);
        let p = measure_action_matrix(sys, &mu);

        // witness decomposition: push μ's weights onto distinct maps
        let mut coefficients = vec![W::zero(); maps.len()];
        for (g, w) in mu.entries() {
            let t = transition_of(sys, *g);
            let slot = maps.binary_search(&t).expect("map enumerated");
            coefficients[slot] = coefficients[slot].clone() + w.clone();
        }
        let witness_terms: Vec<(TransitionMap, W)> = maps
            .iter()
            .cloned()
            .zip(coefficients.iter().cloned())
            .collect();
        let recombined = StochasticMatrix::combination(&witness_terms, dim);
        let residual = p.max_abs_diff(&recombined);
        let convex = coefficients.iter().all(|c| *c >= W::zero())
            && coefficients.iter().fold(W::zero(), |acc, c| acc + c.clone()) == W::one();
        if residual > W::zero() || !convex {
            all_decomposed = false;
        }
        if residual > max_residual {
            max_residual = residual;
        }

        // independent maps: recover the coefficients from P alone
        if unique {
            match solve_decomposition(&map_matrices, &p, dim) {
                Some(recovered) => {
                    if recovered != coefficients {
                        reconstructions_matched = false;
                    }
                }
                None => reconstructions_matched = false,
            }
        }
    }

    Ok(EllisReport {
        group_order: order,
        space_size: dim,
        grid_denominator: config.grid_denominator,
        distinct_maps: maps.len(),
        matrices_checked: checked,
        max_residual: max_residual.to_string(),
        all_decomposed,
        reconstruction_unique: unique,
        reconstructions_matched,
    })
}

/// All weight vectors `(k_1/d, .., k_n/d)` with `Σk_i = d`.
fn simplex_grid(parts: usize, denominator: u64) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    let mut current = vec![0u64; parts];
    fill_grid(&mut out, &mut current, 0, denominator);
    out
}

fn fill_grid(out: &mut Vec<Vec<u64>>, current: &mut Vec<u64>, index: usize, remaining: u64) {
    if index + 1 == current.len() {
        current[index] = remaining;
        out.push(current.clone());
        return;
    }
    for value in 0..=remaining {
        current[index] = value;
        fill_grid(out, current, index + 1, remaining - value);
    }
}

fn grid_measure<W: Weight>(weights: &[u64], denominator: u64) -> FiniteMeasure<GroupIndex, W> {
    FiniteMeasure::new(
        weights
            .iter()
            .enumerate()
            .map(|(g, &k)| (GroupIndex(g), W::from_ratio(k as i64, denominator)))
            .collect(),
    )
    .expect("grid weights sum to 1")
}

fn vectorize<W: Weight>(m: &StochasticMatrix<W>, dim: usize) -> Vec<W> {
    let mut v = Vec::with_capacity(dim * dim);
    for col in 0..dim {
        for row in 0..dim {
            v.push(m.entry(row, col).clone());
        }
    }
    v
}

/// Exact column-rank test of the vectorized transition matrices.
fn transition_matrices_independent<W: Weight>(
    map_matrices: &[StochasticMatrix<W>],
    dim: usize,
) -> bool {
    let columns: Vec<Vec<W>> = map_matrices.iter().map(|m| vectorize(m, dim)).collect();
    exact_rank(&columns, dim * dim) == map_matrices.len()
}

#[allow(clippy::needless_range_loop)] // in-place elimination reads one row while writing another
fn exact_rank<W: Weight>(columns: &[Vec<W>], rows: usize) -> usize {
    // Gaussian elimination on the column space
    let mut work: Vec<Vec<W>> = columns.to_vec();
    let mut rank = 0;
    for row in 0..rows {
        let Some(pivot) = (rank..work.len()).find(|&c| !work[c][row].is_zero()) else {
            continue;
        };
        work.swap(rank, pivot);
        let pivot_value = work[rank][row].clone();
        for c in (rank + 1)..work.len() {
            if work[c][row].is_zero() {
                continue;
            }
            let factor = work[c][row].clone() / pivot_value.clone();
            for r in 0..rows {
                let adjusted = work[c][r].clone() - factor.clone() * work[rank][r].clone();
                work[c][r] = adjusted;
            }
        }
        rank += 1;
        if rank == work.len() {
            break;
        }
    }
    rank
}

/// Solve `Σ c_T P_T = P` for the coefficients by exact elimination. Returns
/// `None` if the system is inconsistent or underdetermined.
#[allow(clippy::needless_range_loop)] // in-place elimination reads one row while writing another
fn solve_decomposition<W: Weight>(
    map_matrices: &[StochasticMatrix<W>],
    target: &StochasticMatrix<W>,
    dim: usize,
) -> Option<Vec<W>> {
    let unknowns = map_matrices.len();
    let rows = dim * dim;
    let map_vectors: Vec<Vec<W>> = map_matrices.iter().map(|m| vectorize(m, dim)).collect();
    let target_vector = vectorize(target, dim);
    // augmented rows: [A | b]
    let mut system: Vec<Vec<W>> = (0..rows)
        .map(|r| {
            let mut row: Vec<W> = map_vectors.iter().map(|v| v[r].clone()).collect();
            row.push(target_vector[r].clone());
            row
        })
        .collect();
    let mut pivot_rows = Vec::new();
    let mut row_cursor = 0;
    for col in 0..unknowns {
        let Some(pivot) = (row_cursor..rows).find(|&r| !system[r][col].is_zero()) else {
            return None; // rank-deficient: no unique solution
        };
        system.swap(row_cursor, pivot);
        let pivot_value = system[row_cursor][col].clone();
        for r in 0..rows {
            if r == row_cursor || system[r][col].is_zero() {
                continue;
            }
            let factor = system[r][col].clone() / pivot_value.clone();
            for c in col..=unknowns {
                let adjusted = system[r][c].clone() - factor.clone() * system[row_cursor][c].clone();
                system[r][c] = adjusted;
            }
        }
        pivot_rows.push(row_cursor);
        row_cursor += 1;
    }
    // consistency: the eliminated rows must have zero right-hand side
    for r in row_cursor..rows {
        if !system[r][unknowns].is_zero() {
            return None;
        }
    }
    Some(
        (0..unknowns)
            .map(|col| system[pivot_rows[col]][unknowns].clone() / system[pivot_rows[col]][col].clone())
            .collect(),
    )
}

/// The semigroup homomorphism: `P_{μ₁∗μ₂} = P_{μ₁}·P_{μ₂}`.
pub fn homomorphism_holds<W: Weight>(
    sys: &FiniteSystem,
    mu1: &FiniteMeasure<GroupIndex, W>,
    mu2: &FiniteMeasure<GroupIndex, W>,
) -> bool {
    let composed = measure_action_matrix(sys, &crate::convolution::convolve_group(sys.group(), mu1, mu2));
    let product = measure_action_matrix(sys, mu1).matmul(&measure_action_matrix(sys, mu2));
    composed == product
}

/// Agreement of the linearized action with the convolution module.
pub fn matrix_matches_convolution<W: Weight>(
    sys: &FiniteSystem,
    mu: &FiniteMeasure<GroupIndex, W>,
    nu: &FiniteMeasure<PointIndex, W>,
) -> bool {
    measure_action_matrix(sys, mu).apply(nu) == convolve(sys, mu, nu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;
    use crate::weight::{ratio, Rational};

    #[test]
    fn enveloping_semigroup_sizes() {
        assert_eq!(enveloping_semigroup(&builtin::z3_rotation()).len(), 3);
        assert_eq!(enveloping_semigroup(&builtin::z2_swap()).len(), 2);
        // trivial group: only the identity map
        let trivial = FiniteSystem::from_permutations(vec![vec![0, 1, 2]], 3).unwrap();
        let maps = enveloping_semigroup(&trivial);
        assert_eq!(maps.len(), 1);
        assert_eq!(maps[0].images(), &[0, 1, 2]);
    }

    #[test]
    fn transition_map_validates_range() {
        assert!(TransitionMap::new(vec![0, 2, 1]).is_ok());
        assert_eq!(
            TransitionMap::new(vec![0, 3, 1]).unwrap_err(),
            EllisError::EntryRange { value: 3, space: 3 }
        );
    }

    #[test]
    fn matrices_of_diracs_and_uniform() {
        let sys = builtin::z2_swap();
        // μ = δ₁ (identity) -> identity matrix
        let e: FiniteMeasure<GroupIndex, Rational> = FiniteMeasure::dirac(sys.group().identity());
        let p = measure_action_matrix(&sys, &e);
        for i in 0..2 {
            for j in 0..2 {
                let expected = if i == j { ratio(1, 1) } else { ratio(0, 1) };
                assert_eq!(*p.entry(i, j), expected);
            }
        }
        // μ = δ_swap -> the swap permutation matrix
        let swap: FiniteMeasure<GroupIndex, Rational> = FiniteMeasure::dirac(GroupIndex(1));
        let p = measure_action_matrix(&sys, &swap);
        assert_eq!(*p.entry(0, 1), ratio(1, 1));
        assert_eq!(*p.entry(1, 0), ratio(1, 1));
        assert_eq!(*p.entry(0, 0), ratio(0, 1));
        // uniform μ -> all entries ½ (½I + ½·swap)
        let uniform = FiniteMeasure::new(vec![
            (GroupIndex(0), ratio(1, 2)),
            (GroupIndex(1), ratio(1, 2)),
        ])
        .unwrap();
        let p = measure_action_matrix(&sys, &uniform);
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(*p.entry(i, j), ratio(1, 2));
            }
        }
        assert!(p.is_column_stochastic());
    }

    #[test]
    fn matrix_action_agrees_with_convolution() {
        let sys = builtin::dihedral_4();
        let mu = FiniteMeasure::new(vec![
            (GroupIndex(2), ratio(1, 5)),
            (GroupIndex(5), ratio(4, 5)),
        ])
        .unwrap();
        let nu = FiniteMeasure::new(vec![
            (PointIndex(0), ratio(1, 2)),
            (PointIndex(2), ratio(1, 4)),
            (PointIndex(3), ratio(1, 4)),
        ])
        .unwrap();
        assert!(matrix_matches_convolution(&sys, &mu, &nu));
    }

    #[test]
    fn affinity_of_the_matrix_action() {
        // P·(tν₁ + (1−t)ν₂) = t(P·ν₁) + (1−t)(P·ν₂), exact rationals
        let sys = builtin::s3_natural();
        let mu = FiniteMeasure::new(vec![
            (GroupIndex(1), ratio(1, 2)),
            (GroupIndex(3), ratio(1, 2)),
        ])
        .unwrap();
        let p = measure_action_matrix(&sys, &mu);
        let nu1: FiniteMeasure<PointIndex, Rational> = FiniteMeasure::dirac(PointIndex(0));
        let nu2 = FiniteMeasure::new(vec![
            (PointIndex(1), ratio(1, 3)),
            (PointIndex(2), ratio(2, 3)),
        ])
        .unwrap();
        let t = ratio(2, 7);
        let mixed = FiniteMeasure::new(
            nu1.entries()
                .iter()
                .map(|(x, w)| (*x, t.clone() * w.clone()))
                .chain(
                    nu2.entries()
                        .iter()
                        .map(|(x, w)| (*x, (ratio(1, 1) - t.clone()) * w.clone())),
                )
                .collect(),
        )
        .unwrap();
        let lhs = p.apply(&mixed);
        let rhs = FiniteMeasure::new(
            p.apply(&nu1)
                .entries()
                .iter()
                .map(|(x, w)| (*x, t.clone() * w.clone()))
                .chain(
                    p.apply(&nu2)
                        .entries()
                        .iter()
                        .map(|(x, w)| (*x, (ratio(1, 1) - t.clone()) * w.clone())),
                )
                .collect(),
        )
        .unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn homomorphism_and_stochasticity_under_products() {
        let sys = builtin::dihedral_4();
        let mu1 = FiniteMeasure::new(vec![
            (GroupIndex(0), ratio(1, 3)),
            (GroupIndex(6), ratio(2, 3)),
        ])
        .unwrap();
        let mu2 = FiniteMeasure::new(vec![
            (GroupIndex(1), ratio(3, 4)),
            (GroupIndex(4), ratio(1, 4)),
        ])
        .unwrap();
        assert!(homomorphism_holds(&sys, &mu1, &mu2));
        let product =
            measure_action_matrix(&sys, &mu1).matmul(&measure_action_matrix(&sys, &mu2));
        assert!(product.is_column_stochastic());
    }

    #[test]
    fn z3_grid_quarter_step_checks_out() {
        // 15 grid measures on the 3-simplex with step 1/4
        let report =
            ellis_equality_check::<Rational>(&builtin::z3_rotation(), EllisCheckConfig::default())
                .unwrap();
        assert_eq!(report.matrices_checked, 15);
        assert_eq!(report.max_residual, "0");
        assert!(report.all_decomposed);
        assert!(report.reconstruction_unique);
        assert!(report.reconstructions_matched);
    }

    #[test]
    fn trivial_group_is_trivially_equal() {
        let trivial = FiniteSystem::from_permutations(vec![vec![0, 1]], 2).unwrap();
        let report =
            ellis_equality_check::<Rational>(&trivial, EllisCheckConfig::default()).unwrap();
        assert_eq!(report.distinct_maps, 1);
        assert_eq!(report.matrices_checked, 1);
        assert!(report.all_decomposed);
    }

    #[test]
    fn s3_matrices_are_linearly_dependent_but_decompose() {
        // uniform on rotations and uniform on transpositions induce the same
        // matrix, so reconstruction from the matrix alone is not unique; the
        // witness decomposition still has zero residual
        let sys = builtin::s3_natural();
        let rotations = FiniteMeasure::<GroupIndex, Rational>::new(vec![
            (GroupIndex(0), ratio(1, 3)),
            (GroupIndex(3), ratio(1, 3)),
            (GroupIndex(4), ratio(1, 3)),
        ])
        .unwrap();
        let transpositions = FiniteMeasure::<GroupIndex, Rational>::new(vec![
            (GroupIndex(1), ratio(1, 3)),
            (GroupIndex(2), ratio(1, 3)),
            (GroupIndex(5), ratio(1, 3)),
        ])
        .unwrap();
        assert_eq!(
            measure_action_matrix(&sys, &rotations),
            measure_action_matrix(&sys, &transpositions)
        );
        let report =
            ellis_equality_check::<Rational>(&sys, EllisCheckConfig::default()).unwrap();
        assert!(!report.reconstruction_unique);
        assert!(report.all_decomposed);
        assert_eq!(report.max_residual, "0");
    }

    #[test]
    fn group_order_bound_is_enforced() {
        let sys = builtin::dihedral_4();
        let err = ellis_equality_check::<Rational>(
            &sys,
            EllisCheckConfig { grid_denominator: 4, max_group_order: 4 },
        )
        .unwrap_err();
        assert_eq!(err, EllisError::BoundExceeded { order: 8, bound: 4 });
    }
}
