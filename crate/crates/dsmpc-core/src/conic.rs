//! Small-scale numerical kernels: symmetric eigendecomposition, PSD
//! projection, discrete Lyapunov/Riccati solves, spectral radius, and an
//! ADMM-based solver for structured semidefinite programs.
//!
//! Everything here targets matrices of a few dozen rows at most, so the
//! implementations favour robustness and determinism over asymptotics:
//! cyclic Jacobi for symmetric eigenproblems, Smith doubling for Lyapunov
//! equations, a fixed-point iteration for the Riccati equation, and a
//! two-block ADMM loop for the SDPs.

use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};
// Float supplies sqrt/abs on f64 in no_std builds; std's inherent methods
// shadow it under test.
#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

/// Off-diagonal Frobenius tolerance for the Jacobi sweep, relative to the
/// matrix scale.
const JACOBI_TOL: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Eigendecomposition `A = V diag(values) V^T` of a symmetric matrix.
/// Eigenvalues are sorted ascending, columns of `vectors` match.
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub values: DVector<f64>,
    pub vectors: DMatrix<f64>,
}

fn check_finite(a: &DMatrix<f64>, what: &str) -> Result<()> {
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite(what.to_string()));
    }
    Ok(())
}

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
///
/// The input is symmetrized internally; it must be symmetric up to roundoff
/// for the result to be meaningful.
pub fn sym_eigen(a: &DMatrix<f64>) -> Result<SymEigen> {
    check_finite(a, "symmetric eigendecomposition input")?;
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "sym_eigen requires a square matrix");
    let mut m = 0.5 * (a + a.transpose());
    let mut v = DMatrix::<f64>::identity(n, n);
    let scale = 1.0 + m.norm();
    let tol = JACOBI_TOL * scale;

    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += m[(p, q)] * m[(p, q)];
            }
        }
        if (2.0 * off).sqrt() <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq.abs() <= tol * 1e-4 {
                    continue;
                }
                let app = m[(p, p)];
                let aqq = m[(q, q)];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].partial_cmp(&m[(j, j)]).expect("finite eigenvalues"));
    let values = DVector::from_iterator(n, order.iter().map(|&i| m[(i, i)]));
    let mut vectors = DMatrix::<f64>::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &v.column(src));
    }
    Ok(SymEigen { values, vectors })
}

/// Frobenius-nearest positive semidefinite matrix: symmetrize, then clamp
/// negative eigenvalues at zero.
pub fn project_psd(s: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let eig = sym_eigen(s)?;
    let n = s.nrows();
    let mut out = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        let lam = eig.values[k];
        if lam <= 0.0 {
            continue;
        }
        let col = eig.vectors.column(k);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] += lam * col[i] * col[j];
            }
        }
    }
    // exact symmetry despite accumulation order
    Ok(0.5 * (&out + out.transpose()))
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(s: &DMatrix<f64>) -> Result<f64> {
    let eig = sym_eigen(s)?;
    Ok(eig.values[0])
}

/// Largest absolute eigenvalue of a general square matrix.
pub fn spectral_radius(a: &DMatrix<f64>) -> Result<f64> {
    check_finite(a, "spectral radius input")?;
    assert_eq!(a.nrows(), a.ncols(), "spectral_radius requires a square matrix");
    if a.nrows() == 0 {
        return Ok(0.0);
    }
    let eigs = a.clone().complex_eigenvalues();
    Ok(eigs.iter().map(|z| z.norm_sqr().sqrt()).fold(0.0, f64::max))
}

/// Solve `Psi^T P Psi - P = -Qrhs` for `P` by Smith doubling.
///
/// Requires `rho(Psi) < 1`; the result satisfies the equation to a relative
/// residual of `1e-9` and is symmetric PSD whenever `Qrhs` is.
pub fn solve_discrete_lyapunov(psi: &DMatrix<f64>, qrhs: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    check_finite(psi, "Lyapunov Psi")?;
    check_finite(qrhs, "Lyapunov right-hand side")?;
    let n = psi.nrows();
    assert_eq!(n, psi.ncols(), "Psi must be square");
    assert_eq!(qrhs.nrows(), n, "Qrhs dimension mismatch");
    let rho = spectral_radius(psi)?;
    if rho >= 1.0 {
        return Err(Error::SpectralRadius { rho, context: "discrete Lyapunov solve".to_string() });
    }

    let mut p = 0.5 * (qrhs + qrhs.transpose());
    let mut m = psi.transpose();
    let qscale = 1.0 + qrhs.norm();
    for _ in 0..200 {
        let term = &m * &p * m.transpose();
        if term.norm() <= 1e-16 * qscale {
            break;
        }
        p += term;
        m = &m * m.clone();
        if m.norm() < 1e-200 {
            break;
        }
    }
    let p = 0.5 * (&p + p.transpose());
    let residual = (psi.transpose() * &p * psi - &p + qrhs).norm();
    if residual > 1e-9 * qscale {
        return Err(Error::Numerical(format!(
            "Lyapunov residual {residual:.3e} exceeds tolerance (rho = {rho:.6})"
        )));
    }
    Ok(p)
}

/// Relative-change convergence threshold for the Riccati fixed point.
const DARE_TOL: f64 = 1e-12;
const DARE_MAX_ITER: usize = 1_000_000;

/// Stabilizing solution of the discrete algebraic Riccati equation by
/// fixed-point iteration, together with the LQR gain
/// `K = -(R + B^T P B)^{-1} B^T P A`.
pub fn solve_dare(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    q: &DMatrix<f64>,
    r: &DMatrix<f64>,
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    check_finite(a, "DARE A")?;
    check_finite(b, "DARE B")?;
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "A must be square");
    assert_eq!(b.nrows(), n, "B row count must match A");

    let mut p = 0.5 * (q + q.transpose());
    let mut residual = f64::INFINITY;
    for _ in 0..DARE_MAX_ITER {
        let btp = b.transpose() * &p;
        let s = r + &btp * b;
        let chol = nalgebra::Cholesky::new(0.5 * (&s + s.transpose()))
            .ok_or_else(|| Error::Numerical("R + B^T P B not positive definite".to_string()))?;
        let gain_term = chol.solve(&(&btp * a));
        let next = q + a.transpose() * &p * a - (a.transpose() * btp.transpose()) * &gain_term;
        let next = 0.5 * (&next + next.transpose());
        residual = (&next - &p).norm() / (1.0 + next.norm());
        p = next;
        if residual <= DARE_TOL {
            break;
        }
    }
    if residual > DARE_TOL {
        return Err(Error::RiccatiDiverged { residual });
    }
    let btp = b.transpose() * &p;
    let s = r + &btp * b;
    let chol = nalgebra::Cholesky::new(0.5 * (&s + s.transpose()))
        .ok_or_else(|| Error::Numerical("R + B^T P B not positive definite".to_string()))?;
    let k = -chol.solve(&(&btp * a));
    Ok((p, k))
}

/// Dual (estimation) Riccati solve: returns the predictor-form injection
/// gain `L = A P C^T (C P C^T + Sigma_D)^{-1}` along with `P`.
pub fn solve_dare_observer(
    a: &DMatrix<f64>,
    c: &DMatrix<f64>,
    sigma_w: &DMatrix<f64>,
    sigma_d: &DMatrix<f64>,
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let (p, k) = solve_dare(&a.transpose(), &c.transpose(), sigma_w, sigma_d)?;
    Ok((p, -k.transpose()))
}

// ---------------------------------------------------------------------------
// SDP: structured semidefinite feasibility/minimization via two-block ADMM.
// ---------------------------------------------------------------------------

/// Identifier of a matrix variable block within an [`SdpProblem`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockId(pub usize);

#[derive(Debug, Clone)]
enum BlockShape {
    /// Symmetric `d x d` block stored as its upper triangle.
    Symmetric(usize),
    /// General rectangular block (used for gain-synthesis variables).
    Rectangular(usize, usize),
}

#[derive(Debug, Clone)]
struct Block {
    shape: BlockShape,
    weight: f64,
    offset: usize,
}

/// One scalar term `coeff * X_block[var_row, var_col]` contributing to entry
/// `(row, col)` of a constraint expression.
#[derive(Debug, Clone)]
pub struct SdpTerm {
    pub row: usize,
    pub col: usize,
    pub block: BlockId,
    pub var_row: usize,
    pub var_col: usize,
    pub coeff: f64,
}

/// Symmetric matrix expression, affine in the variable blocks, that is
/// required to be PSD.
#[derive(Debug, Clone)]
pub struct AffineMatrixExpr {
    pub dim: usize,
    pub constant: DMatrix<f64>,
    pub terms: Vec<SdpTerm>,
}

impl AffineMatrixExpr {
    pub fn new(dim: usize) -> Self {
        Self { dim, constant: DMatrix::zeros(dim, dim), terms: Vec::new() }
    }

    /// Add `coeff * X_b[var_row, var_col]` to entry `(row, col)` and, when
    /// off-diagonal, its mirror entry, keeping the expression symmetric.
    pub fn add_term(
        &mut self,
        row: usize,
        col: usize,
        block: BlockId,
        var_row: usize,
        var_col: usize,
        coeff: f64,
    ) {
        if coeff == 0.0 {
            return;
        }
        self.terms.push(SdpTerm { row, col, block, var_row, var_col, coeff });
        if row != col {
            self.terms.push(SdpTerm { row: col, col: row, block, var_row, var_col, coeff });
        }
    }

    /// Add a constant symmetric matrix at block position `(row0, col0)`.
    pub fn add_const_block(&mut self, row0: usize, col0: usize, m: &DMatrix<f64>) {
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                self.constant[(row0 + i, col0 + j)] += m[(i, j)];
            }
        }
    }
}

/// SDP with block matrix variables, a weighted squared-Frobenius objective,
/// PSD constraints affine in the variables, and structural equalities.
#[derive(Debug, Clone, Default)]
pub struct SdpProblem {
    blocks: Vec<Block>,
    constraints: Vec<AffineMatrixExpr>,
    /// Entries pinned to fixed values: `(block, row, col, value)`.
    pins: Vec<(BlockId, usize, usize, f64)>,
    /// Entries tied equal across blocks.
    ties: Vec<((BlockId, usize, usize), (BlockId, usize, usize))>,
    num_vars: usize,
}

impl SdpProblem {
    pub fn new() -> Self {
        Self::default()
    }

    /// Add a symmetric `dim x dim` variable block with objective weight
    /// `weight * ||X||_F^2`.
    pub fn add_symmetric_block(&mut self, dim: usize, weight: f64) -> BlockId {
        let offset = self.num_vars;
        self.num_vars += dim * (dim + 1) / 2;
        self.blocks.push(Block { shape: BlockShape::Symmetric(dim), weight, offset });
        BlockId(self.blocks.len() - 1)
    }

    /// Add a general `rows x cols` variable block.
    pub fn add_rectangular_block(&mut self, rows: usize, cols: usize, weight: f64) -> BlockId {
        let offset = self.num_vars;
        self.num_vars += rows * cols;
        self.blocks.push(Block { shape: BlockShape::Rectangular(rows, cols), weight, offset });
        BlockId(self.blocks.len() - 1)
    }

    pub fn add_psd_constraint(&mut self, expr: AffineMatrixExpr) {
        self.constraints.push(expr);
    }

    /// Pin `X_b[row, col]` to `value`.
    pub fn pin(&mut self, block: BlockId, row: usize, col: usize, value: f64) {
        self.pins.push((block, row, col, value));
    }

    /// Tie two entries to be equal.
    pub fn tie(&mut self, a: (BlockId, usize, usize), b: (BlockId, usize, usize)) {
        self.ties.push((a, b));
    }

    fn var_index(&self, block: BlockId, row: usize, col: usize) -> usize {
        let b = &self.blocks[block.0];
        match b.shape {
            BlockShape::Symmetric(d) => {
                let (i, j) = if row <= col { (row, col) } else { (col, row) };
                debug_assert!(j < d);
                // upper-triangle row-major: row i starts at i*d - i(i-1)/2
                b.offset + i * d - i * (i - 1) / 2 + (j - i)
            }
            BlockShape::Rectangular(_, cols) => b.offset + row * cols + col,
        }
    }

    fn materialize(&self, x: &DVector<f64>) -> Vec<DMatrix<f64>> {
        self.blocks
            .iter()
            .enumerate()
            .map(|(bi, b)| match b.shape {
                BlockShape::Symmetric(d) => {
                    let mut m = DMatrix::zeros(d, d);
                    for i in 0..d {
                        for j in i..d {
                            let v = x[self.var_index(BlockId(bi), i, j)];
                            m[(i, j)] = v;
                            m[(j, i)] = v;
                        }
                    }
                    m
                }
                BlockShape::Rectangular(r, c) => {
                    let mut m = DMatrix::zeros(r, c);
                    for i in 0..r {
                        for j in 0..c {
                            m[(i, j)] = x[self.var_index(BlockId(bi), i, j)];
                        }
                    }
                    m
                }
            })
            .collect()
    }

    fn evaluate_constraint(&self, c: &AffineMatrixExpr, x: &DVector<f64>) -> DMatrix<f64> {
        let mut m = c.constant.clone();
        for t in &c.terms {
            m[(t.row, t.col)] += t.coeff * x[self.var_index(t.block, t.var_row, t.var_col)];
        }
        m
    }
}

/// Termination status of [`solve_sdp`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SdpStatus {
    Optimal,
    MaxIterations,
    InfeasibleSuspected,
}

/// Solver diagnostics.
///
/// `primal_residual` is the Frobenius norm of `A(x) - S` stacked over all
/// PSD constraints (`S` the PSD slack); `dual_residual` is
/// `rho * ||A^T vec(S - S_prev)||`. Both are compared against
/// `eps * max(1, scale)` with `scale` the running magnitude of the
/// constraint values.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub status: SdpStatus,
    pub iterations: usize,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub min_constraint_eig: f64,
}

/// ADMM options.
#[derive(Debug, Clone)]
pub struct SdpOptions {
    pub rho: f64,
    pub max_iter: usize,
    pub eps: f64,
    pub feas_tol: f64,
}

impl Default for SdpOptions {
    fn default() -> Self {
        Self { rho: 1.0, max_iter: 20_000, eps: 1e-7, feas_tol: 1e-6 }
    }
}

struct ConstraintMap {
    /// For each constraint, for each of the `dim*dim` entries, the list of
    /// `(variable index, coefficient)` pairs.
    rows: Vec<Vec<Vec<(usize, f64)>>>,
}

impl ConstraintMap {
    fn build(p: &SdpProblem) -> Self {
        let rows = p
            .constraints
            .iter()
            .map(|c| {
                let mut entries = vec![Vec::new(); c.dim * c.dim];
                for t in &c.terms {
                    let vi = p.var_index(t.block, t.var_row, t.var_col);
                    entries[t.row * c.dim + t.col].push((vi, t.coeff));
                }
                entries
            })
            .collect();
        Self { rows }
    }

    /// Accumulate `A^T vec(M_c)` over all constraints into `out`.
    fn accumulate_adjoint(&self, mats: &[DMatrix<f64>], out: &mut DVector<f64>) {
        out.fill(0.0);
        for (ci, entries) in self.rows.iter().enumerate() {
            let m = &mats[ci];
            let d = m.nrows();
            for (ei, list) in entries.iter().enumerate() {
                if list.is_empty() {
                    continue;
                }
                let val = m[(ei / d, ei % d)];
                if val == 0.0 {
                    continue;
                }
                for &(vi, coeff) in list {
                    out[vi] += coeff * val;
                }
            }
        }
    }
}

/// Solve the SDP by two-block ADMM: an affine least-squares step over the
/// variables, a PSD projection of per-constraint slacks, and a dual update,
/// with residual balancing of the penalty.
pub fn solve_sdp(problem: &SdpProblem, opts: &SdpOptions) -> Result<(Vec<DMatrix<f64>>, SolveReport)> {
    let nv = problem.num_vars;
    let map = ConstraintMap::build(problem);

    // Equality rows from pins and ties.
    let mut eq_rows: Vec<(Vec<(usize, f64)>, f64)> = Vec::new();
    for &(b, i, j, v) in &problem.pins {
        eq_rows.push((vec![(problem.var_index(b, i, j), 1.0)], v));
    }
    for &((b1, i1, j1), (b2, i2, j2)) in &problem.ties {
        let v1 = problem.var_index(b1, i1, j1);
        let v2 = problem.var_index(b2, i2, j2);
        if v1 != v2 {
            eq_rows.push((vec![(v1, 1.0), (v2, -1.0)], 0.0));
        }
    }
    let neq = eq_rows.len();

    // Objective weights per scalar variable (off-diagonal symmetric entries
    // appear twice in the Frobenius norm).
    let mut w = DVector::<f64>::zeros(nv);
    for (bi, b) in problem.blocks.iter().enumerate() {
        match b.shape {
            BlockShape::Symmetric(d) => {
                for i in 0..d {
                    for j in i..d {
                        let vi = problem.var_index(BlockId(bi), i, j);
                        w[vi] = b.weight * if i == j { 1.0 } else { 2.0 };
                    }
                }
            }
            BlockShape::Rectangular(r, c) => {
                for i in 0..r {
                    for j in 0..c {
                        w[problem.var_index(BlockId(bi), i, j)] = b.weight;
                    }
                }
            }
        }
    }

    // Gram matrix A^T A of the stacked constraint map (constant across
    // iterations).
    let mut ata = DMatrix::<f64>::zeros(nv, nv);
    for entries in &map.rows {
        for list in entries {
            for &(vi, ci) in list {
                for &(vj, cj) in list {
                    ata[(vi, vj)] += ci * cj;
                }
            }
        }
    }

    let kkt_dim = nv + neq;
    let build_kkt = |rho: f64| -> DMatrix<f64> {
        let mut kkt = DMatrix::<f64>::zeros(kkt_dim, kkt_dim);
        for i in 0..nv {
            kkt[(i, i)] = 2.0 * w[i];
            for j in 0..nv {
                kkt[(i, j)] += rho * ata[(i, j)];
            }
        }
        for (r, (row, _)) in eq_rows.iter().enumerate() {
            for &(vi, c) in row {
                kkt[(nv + r, vi)] = c;
                kkt[(vi, nv + r)] = c;
            }
        }
        kkt
    };

    let mut rho = opts.rho;
    let mut kkt_lu = nalgebra::LU::new(build_kkt(rho));

    let mut x = DVector::<f64>::zeros(nv);
    let mut slacks: Vec<DMatrix<f64>> =
        problem.constraints.iter().map(|c| DMatrix::zeros(c.dim, c.dim)).collect();
    let mut duals = slacks.clone();
    let mut adj = DVector::<f64>::zeros(nv);
    let mut rhs = DVector::<f64>::zeros(kkt_dim);

    let mut primal = 0.0f64;
    let mut dual = 0.0f64;
    let mut iterations = 0;
    let mut initial_primal: Option<f64> = None;
    let mut status = SdpStatus::MaxIterations;

    for iter in 0..opts.max_iter {
        iterations = iter + 1;

        // x-step: minimize x' W x + (rho/2) || A x + const - (S - U) ||^2
        // subject to the pin/tie equalities.
        let targets: Vec<DMatrix<f64>> = problem
            .constraints
            .iter()
            .enumerate()
            .map(|(ci, c)| &slacks[ci] - &duals[ci] - &c.constant)
            .collect();
        map.accumulate_adjoint(&targets, &mut adj);
        for i in 0..nv {
            rhs[i] = rho * adj[i];
        }
        for (r, (_, val)) in eq_rows.iter().enumerate() {
            rhs[nv + r] = *val;
        }
        let sol = kkt_lu
            .solve(&rhs)
            .ok_or_else(|| Error::Numerical("singular KKT system in SDP ADMM".to_string()))?;
        for i in 0..nv {
            x[i] = sol[i];
        }

        // s-step: PSD projection of A(x) + U per constraint, then dual update.
        let mut primal_sq = 0.0;
        let mut scale: f64 = 1.0;
        let mut diffs: Vec<DMatrix<f64>> = Vec::with_capacity(problem.constraints.len());
        for (ci, c) in problem.constraints.iter().enumerate() {
            let mxc = problem.evaluate_constraint(c, &x);
            let prev = slacks[ci].clone();
            let s = project_psd(&(&mxc + &duals[ci]))?;
            duals[ci] += &mxc - &s;
            primal_sq += (&mxc - &s).norm_squared();
            scale = scale.max(mxc.norm()).max(s.norm());
            diffs.push(&s - &prev);
            slacks[ci] = s;
        }
        primal = primal_sq.sqrt();
        map.accumulate_adjoint(&diffs, &mut adj);
        dual = rho * adj.norm();

        if initial_primal.is_none() {
            initial_primal = Some(primal);
        }

        let tol = opts.eps * scale.max(1.0);
        if primal <= tol && dual <= tol {
            status = SdpStatus::Optimal;
            break;
        }
        if !primal.is_finite() || primal > 1e8 * (1.0 + initial_primal.unwrap()) {
            status = SdpStatus::InfeasibleSuspected;
            break;
        }

        // Residual balancing.
        if iter % 50 == 49 {
            if primal > 10.0 * dual && rho < 1e6 {
                rho *= 2.0;
                for u in duals.iter_mut() {
                    *u *= 0.5;
                }
                kkt_lu = nalgebra::LU::new(build_kkt(rho));
            } else if dual > 10.0 * primal && rho > 1e-6 {
                rho *= 0.5;
                for u in duals.iter_mut() {
                    *u *= 2.0;
                }
                kkt_lu = nalgebra::LU::new(build_kkt(rho));
            }
        }
    }

    let values = problem.materialize(&x);
    let mut min_eig = f64::INFINITY;
    for c in &problem.constraints {
        let m = problem.evaluate_constraint(c, &x);
        min_eig = min_eig.min(min_eigenvalue(&(0.5 * (&m + m.transpose())))?);
    }
    if problem.constraints.is_empty() {
        min_eig = 0.0;
    }
    if status == SdpStatus::Optimal && min_eig < -opts.feas_tol {
        status = SdpStatus::MaxIterations;
    }
    Ok((
        values,
        SolveReport { status, iterations, primal_residual: primal, dual_residual: dual, min_constraint_eig: min_eig },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn dm(rows: usize, cols: usize, data: &[f64]) -> DMatrix<f64> {
        DMatrix::from_row_slice(rows, cols, data)
    }

    #[test]
    fn jacobi_recovers_known_eigenvalues() {
        let a = dm(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let e = sym_eigen(&a).unwrap();
        assert_abs_diff_eq!(e.values[0], -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(e.values[1], 1.0, epsilon = 1e-12);
        let recon = &e.vectors * DMatrix::from_diagonal(&e.values) * e.vectors.transpose();
        assert!((recon - a).norm() < 1e-12);
    }

    #[test]
    fn jacobi_reconstructs_random_symmetric() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let n = rng.gen_range(1..8);
            let raw = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
            let a = 0.5 * (&raw + raw.transpose());
            let e = sym_eigen(&a).unwrap();
            let recon = &e.vectors * DMatrix::from_diagonal(&e.values) * e.vectors.transpose();
            assert!((recon - &a).norm() < 1e-10, "n = {n}");
            let orth = e.vectors.transpose() * &e.vectors - DMatrix::identity(n, n);
            assert!(orth.norm() < 1e-10);
        }
    }

    #[test]
    fn project_psd_identity_is_fixed_point() {
        let id = DMatrix::<f64>::identity(3, 3);
        assert!((project_psd(&id).unwrap() - &id).norm() < 1e-12);
    }

    #[test]
    fn project_psd_clamps_negative_eigenvalue() {
        let a = dm(2, 2, &[1.0, 0.0, 0.0, -2.0]);
        let p = project_psd(&a).unwrap();
        assert!((p - dm(2, 2, &[1.0, 0.0, 0.0, 0.0])).norm() < 1e-12);
    }

    #[test]
    fn project_psd_offdiagonal_case() {
        // eigenvalues of [[0,1],[1,0]] are +-1; clamping -1 leaves 0.5*ones,
        // checked against the direct decomposition.
        let a = dm(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let p = project_psd(&a).unwrap();
        assert!((p - dm(2, 2, &[0.5, 0.5, 0.5, 0.5])).norm() < 1e-12);
    }

    #[test]
    fn project_psd_rejects_non_finite() {
        let a = dm(2, 2, &[f64::NAN, 0.0, 0.0, 1.0]);
        assert!(matches!(project_psd(&a), Err(Error::NonFinite(_))));
    }

    #[test]
    fn spectral_radius_examples() {
        assert_abs_diff_eq!(spectral_radius(&DMatrix::identity(3, 3)).unwrap(), 1.0, epsilon = 1e-12);
        // upper-triangular: eigenvalues on the diagonal
        let a = dm(2, 2, &[1.0, 1.0, 0.0, 1.0]);
        assert_abs_diff_eq!(spectral_radius(&a).unwrap(), 1.0, epsilon = 1e-9);
        let nilpotent = dm(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(spectral_radius(&nilpotent).unwrap() < 1e-9);
    }

    #[test]
    fn lyapunov_scalar_fixed_point() {
        let psi = dm(1, 1, &[0.5]);
        let q = dm(1, 1, &[0.75]);
        let p = solve_discrete_lyapunov(&psi, &q).unwrap();
        assert_abs_diff_eq!(p[(0, 0)], 1.0, epsilon = 1e-10);
    }

    #[test]
    fn lyapunov_zero_psi_returns_q() {
        let psi = DMatrix::zeros(3, 3);
        let q = dm(3, 3, &[2.0, 0.1, 0.0, 0.1, 1.0, 0.2, 0.0, 0.2, 3.0]);
        let p = solve_discrete_lyapunov(&psi, &q).unwrap();
        assert!((p - q).norm() < 1e-12);
    }

    #[test]
    fn lyapunov_matches_power_series_oracle() {
        let psi = dm(2, 2, &[0.5, 0.1, 0.0, 0.5]);
        let q = DMatrix::identity(2, 2);
        let p = solve_discrete_lyapunov(&psi, &q).unwrap();
        // independent oracle: truncated series sum_k Psi^k' Q Psi^k
        let mut oracle = DMatrix::<f64>::zeros(2, 2);
        let mut pk = DMatrix::<f64>::identity(2, 2);
        for _ in 0..2000 {
            oracle += pk.transpose() * &q * &pk;
            pk = &pk * &psi;
            if pk.norm() < 1e-18 {
                break;
            }
        }
        assert!((p - oracle).norm() < 1e-8);
    }

    #[test]
    fn lyapunov_dominates_rhs() {
        let psi = dm(2, 2, &[0.3, 0.2, -0.1, 0.4]);
        let q = dm(2, 2, &[1.0, 0.2, 0.2, 0.5]);
        let p = solve_discrete_lyapunov(&psi, &q).unwrap();
        assert!(min_eigenvalue(&(p - q)).unwrap() >= -1e-12);
    }

    #[test]
    fn lyapunov_rejects_unstable() {
        let psi = dm(1, 1, &[1.0]);
        let q = dm(1, 1, &[1.0]);
        assert!(matches!(solve_discrete_lyapunov(&psi, &q), Err(Error::SpectralRadius { .. })));
    }

    #[test]
    fn dare_zero_a_gives_q_and_zero_gain() {
        let a = DMatrix::zeros(2, 2);
        let b = dm(2, 1, &[0.0, 1.0]);
        let q = dm(2, 2, &[1.0, 0.0, 0.0, 2.0]);
        let r = dm(1, 1, &[1.0]);
        let (p, k) = solve_dare(&a, &b, &q, &r).unwrap();
        assert!((p - q).norm() < 1e-10);
        assert!(k.norm() < 1e-12);
    }

    #[test]
    fn dare_scalar_matches_fixed_point_oracle() {
        let (p, _) =
            solve_dare(&dm(1, 1, &[1.0]), &dm(1, 1, &[1.0]), &dm(1, 1, &[1.0]), &dm(1, 1, &[1.0]))
                .unwrap();
        // oracle: iterate p <- q + p - p^2 / (r + p) to convergence
        let mut po = 1.0f64;
        for _ in 0..200 {
            po = 1.0 + po - po * po / (1.0 + po);
        }
        assert_abs_diff_eq!(p[(0, 0)], po, epsilon = 1e-9);
        // closed form is the golden ratio
        assert_abs_diff_eq!(p[(0, 0)], (1.0 + 5.0f64.sqrt()) / 2.0, epsilon = 1e-9);
    }

    #[test]
    fn dare_residual_is_small() {
        let a = dm(2, 2, &[1.0, 1.0, 0.0, 1.0]);
        let b = dm(2, 1, &[0.0, 1.0]);
        let q = dm(2, 2, &[1.0, 0.0, 0.0, 0.1]);
        let r = dm(1, 1, &[0.1]);
        let (p, k) = solve_dare(&a, &b, &q, &r).unwrap();
        let s = &r + b.transpose() * &p * &b;
        let res = &q + a.transpose() * &p * &a
            - a.transpose() * &p * &b * s.clone().try_inverse().unwrap() * b.transpose() * &p * &a
            - &p;
        assert!(res.norm() <= 1e-9 * p.norm());
        let acl = &a + &b * &k;
        assert!(spectral_radius(&acl).unwrap() < 1.0);
    }

    #[test]
    fn sdp_minimal_dominating_matrix_is_identity() {
        // minimize ||X||_F^2 s.t. X - I >= 0
        let mut p = SdpProblem::new();
        let x = p.add_symmetric_block(3, 1.0);
        let mut expr = AffineMatrixExpr::new(3);
        expr.add_const_block(0, 0, &(-DMatrix::<f64>::identity(3, 3)));
        for i in 0..3 {
            for j in i..3 {
                expr.add_term(i, j, x, i, j, 1.0);
            }
        }
        p.add_psd_constraint(expr);
        let (vals, rep) = solve_sdp(&p, &SdpOptions::default()).unwrap();
        assert_eq!(rep.status, SdpStatus::Optimal);
        assert!((&vals[0] - DMatrix::<f64>::identity(3, 3)).norm() < 1e-5, "{}", &vals[0]);
    }

    #[test]
    fn sdp_pin_forces_entry() {
        // minimize ||X||_F^2 s.t. X >= 0, X11 = 2
        let mut p = SdpProblem::new();
        let x = p.add_symmetric_block(2, 1.0);
        let mut expr = AffineMatrixExpr::new(2);
        for i in 0..2 {
            for j in i..2 {
                expr.add_term(i, j, x, i, j, 1.0);
            }
        }
        p.add_psd_constraint(expr);
        p.pin(x, 0, 0, 2.0);
        let (vals, rep) = solve_sdp(&p, &SdpOptions::default()).unwrap();
        assert_eq!(rep.status, SdpStatus::Optimal);
        assert_abs_diff_eq!(vals[0][(0, 0)], 2.0, epsilon = 1e-6);
        assert!(vals[0][(0, 1)].abs() < 1e-5 && vals[0][(1, 1)].abs() < 1e-5);
    }

    #[test]
    fn sdp_scalar_stationary_covariance() {
        // Schur-form stationary covariance for psi = 0.5, noise 0.75:
        // [[s - 0.75, 0.5 s], [0.5 s, s]] >= 0  =>  s >= 1, minimized at 1.
        let mut p = SdpProblem::new();
        let s = p.add_symmetric_block(1, 1.0);
        let mut expr = AffineMatrixExpr::new(2);
        expr.constant[(0, 0)] = -0.75;
        expr.add_term(0, 0, s, 0, 0, 1.0);
        expr.add_term(0, 1, s, 0, 0, 0.5);
        expr.add_term(1, 1, s, 0, 0, 1.0);
        p.add_psd_constraint(expr);
        let (vals, rep) = solve_sdp(&p, &SdpOptions::default()).unwrap();
        assert_eq!(rep.status, SdpStatus::Optimal);
        assert_abs_diff_eq!(vals[0][(0, 0)], 1.0, epsilon = 1e-5);
    }

    #[test]
    fn sdp_reports_constraint_eig() {
        let mut p = SdpProblem::new();
        let x = p.add_symmetric_block(1, 1.0);
        let mut expr = AffineMatrixExpr::new(1);
        expr.constant[(0, 0)] = -1.0;
        expr.add_term(0, 0, x, 0, 0, 1.0);
        p.add_psd_constraint(expr);
        let (_, rep) = solve_sdp(&p, &SdpOptions::default()).unwrap();
        assert!(rep.min_constraint_eig >= -1e-6);
        assert!(rep.primal_residual >= 0.0 && rep.dual_residual >= 0.0);
    }
}
