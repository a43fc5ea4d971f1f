//! Kernel-weighted least squares over a chosen basis, with the fit pinned to
//! the true values at `∅` and `[d]`.
//!
//! The two boundary constraints `g(∅) = f(∅)` and `g([d]) = f([d])` are
//! eliminated exactly: a minimum-norm particular solution `x0` satisfies
//! them, the design is projected onto the null space of the constraint rows,
//! and the reduced problem is solved by a minimum-norm SVD least squares.
//! In the Fourier basis with `∅` plus odd terms this is the familiar
//! "fix the intercept, then project onto `⟨x, 1⟩ = c`" construction.

use std::collections::HashMap;

use faer::{Mat, MatRef};

use crate::coalition::{subsets_up_to, Coalition};
use crate::error::{Error, Result};
use crate::sampling::{kernel_weight, SampleSet};
use crate::transforms::{Basis, CoefficientMap};

/// Singular values below `SVD_CUTOFF * σ_max` are treated as zero.
pub const SVD_CUTOFF: f64 = 1e-10;

/// The regression basis: a tag plus the ordered term list.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisSpec {
    pub d: usize,
    pub basis: Basis,
    pub terms: Vec<Coalition>,
}

impl BasisSpec {
    pub fn new(d: usize, basis: Basis, terms: Vec<Coalition>) -> Result<Self> {
        let mut seen = std::collections::HashSet::with_capacity(terms.len());
        for t in &terms {
            if t.d() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    actual: t.d(),
                });
            }
            if !seen.insert(*t) {
                return Err(Error::DuplicateSupport(t.to_string()));
            }
        }
        Ok(BasisSpec { d, basis, terms })
    }

    /// Every term of cardinality at most `k`, ordered by size then bits.
    pub fn up_to_order(basis: Basis, d: usize, k: usize) -> Self {
        BasisSpec {
            d,
            basis,
            terms: subsets_up_to(d, k),
        }
    }

    /// Fourier basis `{∅} ∪ singletons ∪ extra`, where every extra term has
    /// odd cardinality of at least 3.
    pub fn fourier_odd(d: usize, extra: &[Coalition]) -> Result<Self> {
        if let Some(bad) = extra.iter().find(|t| t.len() < 3 || t.len() % 2 == 0) {
            return Err(Error::InvalidParameter(format!(
                "odd interaction terms need odd cardinality >= 3, got {bad}"
            )));
        }
        let mut terms = subsets_up_to(d, 1);
        terms.extend_from_slice(extra);
        BasisSpec::new(d, Basis::Fourier, terms)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    // Fourier terms other than ∅ all odd: every basis function except the
    // intercept flips sign under S -> S^c.
    fn is_odd_fourier(&self) -> bool {
        self.basis == Basis::Fourier && self.terms.iter().all(|t| t.is_empty() || t.len() % 2 == 1)
    }
}

/// Interior rows, their targets and kernel weights, plus the boundary values.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionProblem {
    pub d: usize,
    pub rows: Vec<Coalition>,
    pub targets: Vec<f64>,
    pub weights: Vec<f64>,
    pub basis: BasisSpec,
    /// `(f(∅), f([d]))`.
    pub boundary: (f64, f64),
}

impl RegressionProblem {
    /// Builds a problem from `(S, f(S))` pairs. Boundary coalitions in the
    /// input are skipped; a repeated coalition keeps its first value and a
    /// single weight.
    pub fn new(
        basis: BasisSpec,
        boundary: (f64, f64),
        samples: impl IntoIterator<Item = (Coalition, f64)>,
    ) -> Result<Self> {
        let d = basis.d;
        let mut seen = std::collections::HashSet::new();
        let (mut rows, mut targets, mut weights) = (Vec::new(), Vec::new(), Vec::new());
        for (s, v) in samples {
            if s.d() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    actual: s.d(),
                });
            }
            if s.is_empty() || s.is_full() || !seen.insert(s) {
                continue;
            }
            weights.push(kernel_weight(s.len(), d)?);
            rows.push(s);
            targets.push(v);
        }
        Ok(RegressionProblem {
            d,
            rows,
            targets,
            weights,
            basis,
            boundary,
        })
    }

    /// Uses `values[j]` as `f(samples.coalitions[j])`; the sample set must
    /// contain both boundary coalitions.
    pub fn from_samples(samples: &SampleSet, values: &[f64], basis: BasisSpec) -> Result<Self> {
        if values.len() != samples.len() {
            return Err(Error::DimensionMismatch {
                expected: samples.len(),
                actual: values.len(),
            });
        }
        let find = |target: Coalition| {
            samples
                .coalitions
                .iter()
                .position(|s| *s == target)
                .map(|j| values[j])
                .ok_or_else(|| {
                    Error::InvalidParameter(format!("sample set lacks boundary coalition {target}"))
                })
        };
        let boundary = (
            find(Coalition::empty(samples.d))?,
            find(Coalition::full(samples.d))?,
        );
        RegressionProblem::new(
            basis,
            boundary,
            samples
                .coalitions
                .iter()
                .copied()
                .zip(values.iter().copied()),
        )
    }
}

/// Unweighted design: entry `(j, t)` is basis function `t` evaluated at row `j`.
pub fn build_design(problem: &RegressionProblem) -> Mat<f64> {
    let spec = &problem.basis;
    Mat::from_fn(problem.rows.len(), spec.len(), |j, t| {
        spec.basis.eval(&spec.terms[t], &problem.rows[j])
    })
}

/// Minimum-norm least-squares solution of `A x ≈ b` by thin SVD, discarding
/// singular values below `SVD_CUTOFF * σ_max`.
pub fn min_norm_lstsq(a: MatRef<'_, f64>, b: &[f64]) -> Result<Vec<f64>> {
    let (m, n) = a.shape();
    if m != b.len() {
        return Err(Error::DimensionMismatch {
            expected: m,
            actual: b.len(),
        });
    }
    let mut x = vec![0.0; n];
    if m == 0 || n == 0 {
        return Ok(x);
    }
    let svd = a
        .thin_svd()
        .map_err(|e| Error::Numerical(format!("SVD did not converge: {e:?}")))?;
    let (u, v) = (svd.U(), svd.V());
    let sigma = svd.S().column_vector();
    let sigma_max = (0..sigma.nrows()).map(|k| sigma[k]).fold(0.0, f64::max);
    if sigma_max == 0.0 {
        return Ok(x);
    }
    let cut = SVD_CUTOFF * sigma_max;
    for k in 0..sigma.nrows() {
        let s = sigma[k];
        if s <= cut {
            continue;
        }
        let coef = (0..m).map(|i| u[(i, k)] * b[i]).sum::<f64>() / s;
        for (j, xj) in x.iter_mut().enumerate() {
            *xj += coef * v[(j, k)];
        }
    }
    Ok(x)
}

/// Constrained kernel-weighted least squares; returns the fitted
/// coefficients in the problem's basis.
///
/// The fit reproduces `f(∅)` and `f([d])` exactly whenever the basis can
/// represent them, for any number of interior rows. With no interior rows
/// the constraints alone determine the fit, which is only accepted for
/// `d <= 1`.
pub fn solve_constrained_wls(problem: &RegressionProblem) -> Result<CoefficientMap> {
    solve_with(problem, true)
}

fn solve_with(problem: &RegressionProblem, allow_fold: bool) -> Result<CoefficientMap> {
    let spec = &problem.basis;
    let d = problem.d;
    let n = spec.len();
    if n == 0 {
        return Err(Error::InvalidParameter("empty regression basis".into()));
    }
    if problem.rows.len() != problem.targets.len() || problem.rows.len() != problem.weights.len() {
        return Err(Error::DimensionMismatch {
            expected: problem.rows.len(),
            actual: problem.targets.len().min(problem.weights.len()),
        });
    }
    let (f_empty, f_full) = problem.boundary;
    if !(f_empty.is_finite() && f_full.is_finite())
        || problem.targets.iter().any(|v| !v.is_finite())
    {
        return Err(Error::NonFiniteTarget);
    }
    if problem.weights.iter().any(|&w| w.is_nan() || w <= 0.0) {
        return Err(Error::InvalidParameter("weights must be positive".into()));
    }
    if problem.rows.is_empty() && d > 1 {
        return Err(Error::NoInteriorSamples);
    }

    // Constraint rows: the basis evaluated at ∅ and at [d].
    let ends = [Coalition::empty(d), Coalition::full(d)];
    let c = Mat::from_fn(2, n, |r, t| spec.basis.eval(&spec.terms[t], &ends[r]));
    let (x0, q) = constraint_geometry(c.as_ref(), [f_empty, f_full])?;
    if problem.rows.is_empty() {
        return finish(spec, x0);
    }

    // Weighted design and residual target after the particular solution.
    let mut a = build_design(problem);
    let mut t = vec![0.0; problem.rows.len()];
    for j in 0..a.nrows() {
        let sw = problem.weights[j].sqrt();
        let mut fitted = 0.0;
        for k in 0..n {
            a[(j, k)] *= sw;
            fitted += a[(j, k)] * x0[k];
        }
        t[j] = sw * problem.targets[j] - fitted;
    }
    // Project every row onto the null space of the constraints.
    if q.ncols() > 0 {
        let aq = &a * &q;
        a -= &aq * q.transpose();
    }

    let (a, t) = if allow_fold && spec.is_odd_fourier() {
        fold_complement_pairs(&problem.rows, a, t)
    } else {
        (a, t)
    };
    let mut y = min_norm_lstsq(a.as_ref(), &t)?;
    // Remove any rounding drift out of the null space.
    for k in 0..q.ncols() {
        let dot: f64 = (0..n).map(|i| q[(i, k)] * y[i]).sum();
        for (i, yi) in y.iter_mut().enumerate() {
            *yi -= dot * q[(i, k)];
        }
    }
    let x: Vec<f64> = x0.iter().zip(&y).map(|(a, b)| a + b).collect();
    finish(spec, x)
}

fn finish(spec: &BasisSpec, x: Vec<f64>) -> Result<CoefficientMap> {
    CoefficientMap::from_entries(spec.d, spec.basis, spec.terms.iter().copied().zip(x))
}

/// Minimum-norm solution of `C x = rhs` and an orthonormal basis (columns)
/// of the row space of `C`.
fn constraint_geometry(c: MatRef<'_, f64>, rhs: [f64; 2]) -> Result<(Vec<f64>, Mat<f64>)> {
    let n = c.ncols();
    let ct = c.transpose().to_owned();
    let svd = ct
        .thin_svd()
        .map_err(|e| Error::Numerical(format!("SVD did not converge: {e:?}")))?;
    // C^T = U S V^T, so C = V S U^T and the row space of C is spanned by U.
    let (u, v) = (svd.U(), svd.V());
    let sigma = svd.S().column_vector();
    let sigma_max = (0..sigma.nrows()).map(|k| sigma[k]).fold(0.0, f64::max);
    let kept: Vec<usize> = (0..sigma.nrows())
        .filter(|&k| sigma_max > 0.0 && sigma[k] > SVD_CUTOFF * sigma_max)
        .collect();
    let mut x0 = vec![0.0; n];
    let q = Mat::from_fn(n, kept.len(), |i, r| u[(i, kept[r])]);
    for &k in &kept {
        let coef = (v[(0, k)] * rhs[0] + v[(1, k)] * rhs[1]) / sigma[k];
        for (i, xi) in x0.iter_mut().enumerate() {
            *xi += coef * u[(i, k)];
        }
    }
    Ok((x0, q))
}

// With only odd basis functions left after projection, the rows for S and
// S^c are negatives of each other and share a weight, so the pair's two
// squared residuals equal one row `√2·a_S` with target `(t_S - t_{S^c})/√2`
// up to a constant. Unpaired rows are kept as they are.
fn fold_complement_pairs(rows: &[Coalition], a: Mat<f64>, t: Vec<f64>) -> (Mat<f64>, Vec<f64>) {
    let index: HashMap<Coalition, usize> = rows.iter().enumerate().map(|(j, s)| (*s, j)).collect();
    let mut plan: Vec<(usize, Option<usize>)> = Vec::with_capacity(rows.len());
    for (j, s) in rows.iter().enumerate() {
        match index.get(&s.complement()) {
            Some(&k) if k < j => {}
            Some(&k) => plan.push((j, Some(k))),
            None => plan.push((j, None)),
        }
    }
    if plan.len() == rows.len() {
        return (a, t);
    }
    let root2 = std::f64::consts::SQRT_2;
    let folded = Mat::from_fn(plan.len(), a.ncols(), |r, k| match plan[r] {
        (j, Some(_)) => root2 * a[(j, k)],
        (j, None) => a[(j, k)],
    });
    let targets = plan
        .iter()
        .map(|&(j, pair)| match pair {
            Some(k) => (t[j] - t[k]) / root2,
            None => t[j],
        })
        .collect();
    (folded, targets)
}
