//! Truncated bosonic Fock-space algebra: ladder operators, tensor products,
//! beam-splitter rotations, density matrices, and partial traces.
//!
//! Everything is dense `Complex64`; the largest composite spaces in this crate
//! stay below a few hundred dimensions. Ladder operators are truncated hard:
//! the creation operator annihilates the top number state, so consumers must
//! watch the top-level population.

use ndarray::{linalg::kron, Array1, Array2};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg;

/// A truncated single-mode Fock space holding number states `|0..dim-1>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockSpace {
    dim: usize,
}

impl FockSpace {
    /// At least `|0>` and `|1>` are required for anything interesting.
    pub fn new(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidParameter(format!(
                "Fock space needs dim >= 2, got {dim}"
            )));
        }
        Ok(FockSpace { dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

/// A square complex matrix acting on a (possibly composite) truncated space.
///
/// The wrapper guarantees squareness and finite entries; unit bookkeeping is
/// the caller's job.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    matrix: Array2<C64>,
}

impl Operator {
    pub fn from_matrix(matrix: Array2<C64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "operator must be square, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        for ((r, c), z) in matrix.indexed_iter() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFinite { row: r, col: c });
            }
        }
        Ok(Operator { matrix })
    }

    pub fn identity(dim: usize) -> Self {
        Operator {
            matrix: Array2::eye(dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Operator {
            matrix: Array2::zeros((dim, dim)),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Array2<C64> {
        self.matrix
    }

    pub fn dagger(&self) -> Operator {
        Operator {
            matrix: self.matrix.t().mapv(|z| z.conj()),
        }
    }

    /// Hermiticity defect `max |M - M†|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let m = &self.matrix;
        let mut defect = 0.0f64;
        for r in 0..m.nrows() {
            for c in r..m.ncols() {
                defect = defect.max((m[(r, c)] - m[(c, r)].conj()).norm());
            }
        }
        defect
    }
}

/// Annihilation operator on the truncated space: `a |n> = sqrt(n) |n-1>`.
pub fn annihilation_op(space: FockSpace) -> Operator {
    let d = space.dim();
    let mut m = Array2::<C64>::zeros((d, d));
    for n in 1..d {
        m[(n - 1, n)] = C64::from((n as f64).sqrt());
    }
    Operator { matrix: m }
}

/// Number operator `a†a` with exact integer diagonal.
pub fn number_op(space: FockSpace) -> Operator {
    let d = space.dim();
    let mut m = Array2::<C64>::zeros((d, d));
    for n in 0..d {
        m[(n, n)] = C64::from(n as f64);
    }
    Operator { matrix: m }
}

/// Kronecker product with the first factor as the slowest-varying index.
pub fn tensor(a: &Operator, b: &Operator) -> Operator {
    Operator {
        matrix: kron(&a.matrix, &b.matrix),
    }
}

/// Two-mode beam-splitter rotation `U = exp(theta (d†a - a†d))` on the
/// composite space, with the first factor playing the role of `d`.
///
/// Convention: `U† d U = cos(theta) d + sin(theta) a` and
/// `U† a U = -sin(theta) d + cos(theta) a`. The generator commutes with total
/// photon number, so `U` is exact on every complete total-number block of the
/// truncated space (total n <= dim-1) and unitary as a matrix everywhere.
pub fn beam_splitter_unitary(
    space_a: FockSpace,
    space_b: FockSpace,
    theta: f64,
) -> Result<Operator> {
    if space_a.dim() != space_b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "beam-splitter modes must share a cutoff, got {} and {}",
            space_a.dim(),
            space_b.dim()
        )));
    }
    let a1 = annihilation_op(space_a);
    let a2 = annihilation_op(space_b);
    let eye = Operator::identity(space_a.dim());
    let d = tensor(&a1, &eye).into_matrix();
    let a = tensor(&eye, &a2).into_matrix();
    let d_dag = d.t().mapv(|z| z.conj());
    let a_dag = a.t().mapv(|z| z.conj());
    let generator = (d_dag.dot(&a) - a_dag.dot(&d)).mapv(|z| z * C64::from(theta));
    Ok(Operator {
        matrix: linalg::expm(&generator.view()),
    })
}

/// A density matrix validated at the boundary: Hermitian within 1e-10,
/// unit trace within 1e-8, smallest eigenvalue >= -1e-8.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    matrix: Array2<C64>,
}

const HERM_TOL: f64 = 1e-10;
const TRACE_TOL: f64 = 1e-8;
const PSD_TOL: f64 = 1e-8;

impl DensityMatrix {
    pub fn from_matrix(matrix: Array2<C64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "density matrix must be square, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        for ((r, c), z) in matrix.indexed_iter() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFinite { row: r, col: c });
            }
        }
        let mut herm = 0.0f64;
        for r in 0..matrix.nrows() {
            for c in r..matrix.ncols() {
                herm = herm.max((matrix[(r, c)] - matrix[(c, r)].conj()).norm());
            }
        }
        if herm > HERM_TOL {
            return Err(Error::InvalidDensityMatrix {
                property: "hermiticity",
                defect: herm,
            });
        }
        let trace: C64 = matrix.diag().iter().sum();
        if (trace - C64::from(1.0)).norm() > TRACE_TOL {
            return Err(Error::InvalidDensityMatrix {
                property: "unit trace",
                defect: (trace - C64::from(1.0)).norm(),
            });
        }
        let eigs = linalg::hermitian_eigenvalues(&matrix.view());
        let min_eig = eigs.first().copied().unwrap_or(0.0);
        if min_eig < -PSD_TOL {
            return Err(Error::InvalidDensityMatrix {
                property: "positivity",
                defect: -min_eig,
            });
        }
        Ok(DensityMatrix { matrix })
    }

    /// `|0><0|` on a `dim`-dimensional space.
    pub fn vacuum(dim: usize) -> Self {
        let mut m = Array2::<C64>::zeros((dim, dim));
        m[(0, 0)] = C64::from(1.0);
        DensityMatrix { matrix: m }
    }

    /// Rank-one projector onto a normalized state vector.
    pub fn pure(state: &Array1<C64>) -> Result<Self> {
        let norm_sq: f64 = state.iter().map(|z| z.norm_sqr()).sum();
        if norm_sq <= 0.0 {
            return Err(Error::InvalidParameter(
                "pure state must have nonzero norm".into(),
            ));
        }
        let d = state.len();
        let mut m = Array2::<C64>::zeros((d, d));
        for r in 0..d {
            for c in 0..d {
                m[(r, c)] = state[r] * state[c].conj() / C64::from(norm_sq);
            }
        }
        Ok(DensityMatrix { matrix: m })
    }

    /// Truncated (renormalized) coherent state `|alpha><alpha|`.
    pub fn coherent(space: FockSpace, alpha: C64) -> Self {
        let d = space.dim();
        let mut amp = Array1::<C64>::zeros(d);
        amp[0] = C64::from(1.0);
        for n in 1..d {
            amp[n] = amp[n - 1] * alpha / C64::from((n as f64).sqrt());
        }
        Self::pure(&amp).expect("coherent amplitudes are finite and nonzero")
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Array2<C64> {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.diag().iter().map(|z| z.re).sum()
    }

    /// Real diagonal in the computational (Fock) basis.
    pub fn diagonal(&self) -> Vec<f64> {
        self.matrix.diag().iter().map(|z| z.re).collect()
    }

    /// `Tr(op rho)`
    pub fn expectation(&self, op: &Operator) -> C64 {
        let m = op.matrix();
        let d = self.dim();
        let mut acc = C64::ZERO;
        for r in 0..d {
            for c in 0..d {
                acc += m[(r, c)] * self.matrix[(c, r)];
            }
        }
        acc
    }

    /// Trace distance `||rho - sigma||_1 / 2`.
    pub fn trace_distance(&self, other: &DensityMatrix) -> f64 {
        let diff = &self.matrix - &other.matrix;
        let eigs = linalg::hermitian_eigenvalues(&diff.view());
        0.5 * eigs.iter().map(|e| e.abs()).sum::<f64>()
    }
}

/// Reduced density matrix of factor `keep` of a composite state.
///
/// `dims` lists the factor dimensions slowest-varying first, matching
/// [`tensor`]. The trace of the input is preserved exactly.
pub fn partial_trace(rho: &DensityMatrix, dims: &[usize], keep: usize) -> Result<DensityMatrix> {
    let total: usize = dims.iter().product();
    if total != rho.dim() {
        return Err(Error::DimensionMismatch(format!(
            "partial_trace: factors give dim {total}, state has dim {}",
            rho.dim()
        )));
    }
    if keep >= dims.len() {
        return Err(Error::InvalidParameter(format!(
            "partial_trace: keep index {keep} out of range for {} factors",
            dims.len()
        )));
    }
    let d_keep = dims[keep];
    let stride: usize = dims[keep + 1..].iter().product();
    let pre_count: usize = dims[..keep].iter().product();
    let m = rho.matrix();
    let mut out = Array2::<C64>::zeros((d_keep, d_keep));
    for pre in 0..pre_count {
        for post in 0..stride {
            let base = pre * d_keep * stride + post;
            for ik in 0..d_keep {
                let row = base + ik * stride;
                for jk in 0..d_keep {
                    let col = base + jk * stride;
                    out[(ik, jk)] += m[(row, col)];
                }
            }
        }
    }
    DensityMatrix::from_matrix(out)
}
