//! Small dense semidefinite programs.
//!
//! Problems are stated over a complex Hermitian variable and solved through
//! the real-symmetric embedding `X ↦ [[Re X, -Im X], [Im X, Re X]]` with a
//! primal-dual infeasible-start interior-point method (Nesterov-Todd scaling,
//! Mehrotra predictor-corrector). Inequalities become equalities with
//! nonnegative slacks, i.e. 1x1 PSD blocks.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::eigen::hermitian_eigh;
use super::matrix::{CMatrix, HermitianMatrix};
use crate::error::{invalid, Result};

/// Relative primal/dual residual required for [`SdpStatus::Solved`].
pub const FEASIBILITY_TOL: f64 = 1e-8;
/// Required `|primal - dual| / (1 + |primal|)` for [`SdpStatus::Solved`].
pub const GAP_TOL: f64 = 1e-7;
pub const MAX_ITERATIONS: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TracedFactor {
    First,
    Second,
}

/// `Tr_{traced}(X) = target` for `X` on `C^{dims.0} ⊗ C^{dims.1}`.
#[derive(Debug, Clone)]
pub struct PartialTraceConstraint {
    pub dims: (usize, usize),
    pub traced: TracedFactor,
    pub target: HermitianMatrix,
}

#[derive(Debug, Clone)]
pub struct SdpProblem {
    pub objective: HermitianMatrix,
    pub sense: Sense,
    /// `Tr(A_i X) = b_i`
    pub eq_constraints: Vec<(HermitianMatrix, f64)>,
    /// `Tr(C_j X) <= d_j`
    pub ineq_constraints: Vec<(HermitianMatrix, f64)>,
    pub partial_trace_eq: Option<PartialTraceConstraint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SdpStatus {
    Solved,
    Infeasible,
    MaxIterations,
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub x: HermitianMatrix,
    pub primal_value: f64,
    pub dual_value: f64,
    /// `|primal_value - dual_value|`
    pub gap: f64,
    pub status: SdpStatus,
    pub iterations: usize,
    /// Relative primal residual `‖b - A(X)‖ / (1 + ‖b‖)`.
    pub primal_residual: f64,
    /// Relative dual residual `‖C - A*(y) - S‖ / (1 + ‖C‖)`.
    pub dual_residual: f64,
    /// Multipliers of the minimization form, one per expanded equality row
    /// (explicit equalities, then inequalities, then partial-trace rows).
    pub multipliers: Vec<f64>,
}

/// Independent check of a returned dual point, recomputed in complex arithmetic.
#[derive(Debug, Clone, Copy)]
pub struct DualCertificate {
    /// Smallest eigenvalue of the dual slack `S`.
    pub slack_min_eigenvalue: f64,
    /// Largest multiplier of a `<=` row with the wrong sign (0 when all are valid).
    pub sign_violation: f64,
    /// Dual objective in the problem's own sense.
    pub dual_value: f64,
}

impl DualCertificate {
    pub fn is_valid(&self, tol: f64) -> bool {
        self.slack_min_eigenvalue >= -tol && self.sign_violation <= tol
    }
}

impl SdpSolution {
    pub fn relative_gap(&self) -> f64 {
        self.gap / (1.0 + self.primal_value.abs())
    }

    /// Rebuilds `S = s·C - Σ y_k A_k` for the problem this solution came from
    /// (`s = ±1` by sense) and checks `S ⪰ 0` with a Jacobi eigensolve.
    pub fn certificate(&self, problem: &SdpProblem) -> Result<DualCertificate> {
        let rows = problem.expanded_rows()?;
        let sign = problem.sign();
        let n = problem.dim();
        let mut s = problem
            .objective
            .as_cmatrix()
            .scale(Complex64::new(sign, 0.0));
        let mut dual = 0.0;
        for (row, &y) in rows.iter().zip(&self.multipliers) {
            for &(i, j, v) in &row.entries {
                s.add_at(i, j, -v * y);
            }
            dual += y * row.rhs;
        }
        let n_eq = problem.eq_constraints.len();
        let sign_violation = self.multipliers[n_eq..n_eq + problem.ineq_constraints.len()]
            .iter()
            .fold(0.0_f64, |acc, &z| acc.max(z));
        debug_assert_eq!(s.dim(), n);
        let slack = HermitianMatrix::symmetrized(s);
        let slack_min_eigenvalue = hermitian_eigh(&slack)?.values[0];
        Ok(DualCertificate {
            slack_min_eigenvalue,
            sign_violation,
            dual_value: sign * dual,
        })
    }
}

/// A constraint row `Tr(A X) = rhs` with `A` stored as its nonzero entries
/// (both triangles).
#[derive(Debug, Clone)]
struct SparseRow {
    entries: Vec<(usize, usize, Complex64)>,
    rhs: f64,
}

impl SparseRow {
    fn from_dense(a: &HermitianMatrix, rhs: f64) -> Self {
        let n = a.dim();
        let mut entries = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let v = a.get(i, j);
                if v.re != 0.0 || v.im != 0.0 {
                    entries.push((i, j, v));
                }
            }
        }
        Self { entries, rhs }
    }
}

impl SdpProblem {
    pub fn new(objective: HermitianMatrix, sense: Sense) -> Self {
        Self {
            objective,
            sense,
            eq_constraints: Vec::new(),
            ineq_constraints: Vec::new(),
            partial_trace_eq: None,
        }
    }

    pub fn eq(mut self, a: HermitianMatrix, b: f64) -> Self {
        self.eq_constraints.push((a, b));
        self
    }

    pub fn le(mut self, c: HermitianMatrix, d: f64) -> Self {
        self.ineq_constraints.push((c, d));
        self
    }

    pub fn partial_trace(mut self, constraint: PartialTraceConstraint) -> Self {
        self.partial_trace_eq = Some(constraint);
        self
    }

    pub fn dim(&self) -> usize {
        self.objective.dim()
    }

    fn sign(&self) -> f64 {
        match self.sense {
            Sense::Minimize => 1.0,
            Sense::Maximize => -1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.dim();
        for (k, (a, _)) in self
            .eq_constraints
            .iter()
            .chain(&self.ineq_constraints)
            .enumerate()
        {
            if a.dim() != n {
                return invalid(format!(
                    "constraint {k} has dimension {} but the variable has {n}",
                    a.dim()
                ));
            }
        }
        if let Some(pt) = &self.partial_trace_eq {
            let (da, db) = pt.dims;
            if da * db != n {
                return invalid(format!(
                    "partial trace split {da}x{db} does not match variable dimension {n}"
                ));
            }
            let kept = match pt.traced {
                TracedFactor::First => db,
                TracedFactor::Second => da,
            };
            if pt.target.dim() != kept {
                return invalid(format!(
                    "partial trace target has dimension {} but kept factor has {kept}",
                    pt.target.dim()
                ));
            }
        }
        Ok(())
    }

    /// All constraints as equality rows; inequalities keep their position
    /// after the explicit equalities and receive a slack in the solver.
    fn expanded_rows(&self) -> Result<Vec<SparseRow>> {
        self.validate()?;
        let mut rows: Vec<SparseRow> = self
            .eq_constraints
            .iter()
            .chain(&self.ineq_constraints)
            .map(|(a, b)| SparseRow::from_dense(a, *b))
            .collect();
        if let Some(pt) = &self.partial_trace_eq {
            rows.extend(partial_trace_rows(pt));
        }
        Ok(rows)
    }
}

/// One real row per independent real parameter of the kept-factor matrix:
/// diagonal entries, then real and imaginary parts above the diagonal.
fn partial_trace_rows(pt: &PartialTraceConstraint) -> Vec<SparseRow> {
    let (da, db) = pt.dims;
    let (traced, kept) = match pt.traced {
        TracedFactor::First => (da, db),
        TracedFactor::Second => (db, da),
    };
    let index = |t: usize, k: usize| match pt.traced {
        TracedFactor::First => t * db + k,
        TracedFactor::Second => k * db + t,
    };
    let half = Complex64::new(0.5, 0.0);
    let ihalf = Complex64::new(0.0, 0.5);
    let mut rows = Vec::with_capacity(kept * kept);
    for i in 0..kept {
        let entries = (0..traced)
            .map(|t| (index(t, i), index(t, i), Complex64::new(1.0, 0.0)))
            .collect();
        rows.push(SparseRow {
            entries,
            rhs: pt.target.get(i, i).re,
        });
    }
    for i in 0..kept {
        for j in (i + 1)..kept {
            let target = pt.target.get(i, j);
            let mut re = Vec::with_capacity(2 * traced);
            let mut im = Vec::with_capacity(2 * traced);
            for t in 0..traced {
                let (p, q) = (index(t, i), index(t, j));
                re.push((p, q, half));
                re.push((q, p, half));
                // Tr(A X) = Im X[p][q] for A[q][p] = i/2, A[p][q] = -i/2
                im.push((q, p, ihalf));
                im.push((p, q, -ihalf));
            }
            rows.push(SparseRow {
                entries: re,
                rhs: target.re,
            });
            rows.push(SparseRow {
                entries: im,
                rhs: target.im,
            });
        }
    }
    rows
}

/// Real symmetric coefficient matrix of the embedded problem.
#[derive(Debug, Clone)]
enum RealSym {
    Sparse(Vec<(usize, usize, f64)>),
    Dense(DMatrix<f64>),
}

impl RealSym {
    fn build(entries: Vec<(usize, usize, f64)>, n: usize) -> Self {
        if entries.len() > 4 * n {
            let mut m = DMatrix::zeros(n, n);
            for (i, j, v) in entries {
                m[(i, j)] += v;
            }
            RealSym::Dense(m)
        } else {
            RealSym::Sparse(entries)
        }
    }

    fn inner(&self, x: &DMatrix<f64>) -> f64 {
        match self {
            RealSym::Sparse(e) => e.iter().map(|&(i, j, v)| v * x[(i, j)]).sum(),
            RealSym::Dense(m) => m.dot(x),
        }
    }

    fn axpy_into(&self, alpha: f64, out: &mut DMatrix<f64>) {
        match self {
            RealSym::Sparse(e) => {
                for &(i, j, v) in e {
                    out[(i, j)] += alpha * v;
                }
            }
            RealSym::Dense(m) => *out += m * alpha,
        }
    }

    fn frobenius(&self) -> f64 {
        match self {
            RealSym::Sparse(e) => e.iter().map(|t| t.2 * t.2).sum::<f64>().sqrt(),
            RealSym::Dense(m) => m.norm(),
        }
    }
}

/// `min <C, X>  s.t.  <A_k, X> + [slack_k] = b_k,  X ⪰ 0,  slacks >= 0`.
struct RealSdp {
    n: usize,
    c: RealSym,
    a: Vec<RealSym>,
    b: DVector<f64>,
    /// Constraint row carrying each slack variable.
    slack_rows: Vec<usize>,
}

fn embed(
    entries: &[(usize, usize, Complex64)],
    n: usize,
    complex: bool,
    scale: f64,
) -> Vec<(usize, usize, f64)> {
    let mut out = Vec::with_capacity(entries.len() * if complex { 4 } else { 1 });
    for &(i, j, v) in entries {
        let re = v.re * scale;
        let im = v.im * scale;
        if re != 0.0 {
            out.push((i, j, re));
            if complex {
                out.push((n + i, n + j, re));
            }
        }
        if complex && im != 0.0 {
            out.push((i, n + j, -im));
            out.push((n + i, j, im));
        }
    }
    out
}

impl RealSdp {
    fn from_problem(problem: &SdpProblem, rows: &[SparseRow]) -> (Self, bool) {
        let n = problem.dim();
        let obj = SparseRow::from_dense(&problem.objective, 0.0);
        let complex = rows
            .iter()
            .chain(std::iter::once(&obj))
            .any(|r| r.entries.iter().any(|e| e.2.im != 0.0));
        let (rn, scale) = if complex { (2 * n, 0.5) } else { (n, 1.0) };
        let sign = problem.sign();
        let c = RealSym::build(embed(&obj.entries, n, complex, scale * sign), rn);
        let a = rows
            .iter()
            .map(|r| RealSym::build(embed(&r.entries, n, complex, scale), rn))
            .collect();
        let b = DVector::from_iterator(rows.len(), rows.iter().map(|r| r.rhs));
        let n_eq = problem.eq_constraints.len();
        let slack_rows = (n_eq..n_eq + problem.ineq_constraints.len()).collect();
        (
            Self {
                n: rn,
                c,
                a,
                b,
                slack_rows,
            },
            complex,
        )
    }

    fn apply(&self, x: &DMatrix<f64>) -> DVector<f64> {
        DVector::from_iterator(self.a.len(), self.a.iter().map(|a| a.inner(x)))
    }

    fn adjoint(&self, y: &DVector<f64>) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.n, self.n);
        for (a, &yk) in self.a.iter().zip(y.iter()) {
            if yk != 0.0 {
                a.axpy_into(yk, &mut out);
            }
        }
        out
    }

    /// `M[i][j] = <A_i, W A_j W>`
    fn schur(&self, w: &DMatrix<f64>) -> DMatrix<f64> {
        let m = self.a.len();
        let mut out = DMatrix::zeros(m, m);
        let dense: Vec<usize> = (0..m)
            .filter(|&k| matches!(self.a[k], RealSym::Dense(_)))
            .collect();
        for &j in &dense {
            let RealSym::Dense(aj) = &self.a[j] else {
                unreachable!()
            };
            let g = w * aj * w;
            for i in 0..m {
                let v = self.a[i].inner(&g);
                out[(i, j)] = v;
                out[(j, i)] = v;
            }
        }
        let sparse: Vec<usize> = (0..m)
            .filter(|&k| matches!(self.a[k], RealSym::Sparse(_)))
            .collect();
        for (si, &i) in sparse.iter().enumerate() {
            let RealSym::Sparse(ei) = &self.a[i] else {
                unreachable!()
            };
            for &j in &sparse[si..] {
                let RealSym::Sparse(ej) = &self.a[j] else {
                    unreachable!()
                };
                let mut acc = 0.0;
                for &(p, q, a) in ei {
                    for &(r, s, b) in ej {
                        acc += a * b * w[(q, r)] * w[(s, p)];
                    }
                }
                out[(i, j)] = acc;
                out[(j, i)] = acc;
            }
        }
        out
    }
}

struct Direction {
    dx: DMatrix<f64>,
    dy: DVector<f64>,
    ds: DMatrix<f64>,
    dxl: DVector<f64>,
    dsl: DVector<f64>,
}

fn sym(m: DMatrix<f64>) -> DMatrix<f64> {
    (&m + m.transpose()) * 0.5
}

fn max_step_psd(v: &DVector<f64>, d_scaled: &DMatrix<f64>) -> f64 {
    let n = v.len();
    let inv_sqrt: Vec<f64> = v.iter().map(|x| 1.0 / x.sqrt()).collect();
    let t = DMatrix::from_fn(n, n, |i, j| d_scaled[(i, j)] * inv_sqrt[i] * inv_sqrt[j]);
    let t = sym(t);
    let lmin = t.symmetric_eigenvalues().min();
    if lmin < 0.0 {
        -1.0 / lmin
    } else {
        f64::INFINITY
    }
}

fn max_step_lp(x: &DVector<f64>, dx: &DVector<f64>) -> f64 {
    x.iter()
        .zip(dx.iter())
        .filter(|(_, &d)| d < 0.0)
        .map(|(&xi, &d)| -xi / d)
        .fold(f64::INFINITY, f64::min)
}

pub fn sdp_solve(problem: &SdpProblem) -> Result<SdpSolution> {
    let rows = problem.expanded_rows()?;
    let (real, complex) = RealSdp::from_problem(problem, &rows);
    let out = solve_real(&real);
    let n = problem.dim();
    let x = if complex {
        HermitianMatrix::symmetrized(CMatrix::from_fn(n, |i, j| {
            Complex64::new(
                0.5 * (out.x[(i, j)] + out.x[(n + i, n + j)]),
                0.5 * (out.x[(n + i, j)] - out.x[(i, n + j)]),
            )
        }))
    } else {
        HermitianMatrix::symmetrized(CMatrix::from_fn(n, |i, j| {
            Complex64::new(out.x[(i, j)], 0.0)
        }))
    };
    let sign = problem.sign();
    let primal_value = sign * out.pobj;
    let dual_value = sign * out.dobj;
    Ok(SdpSolution {
        x,
        primal_value,
        dual_value,
        gap: (primal_value - dual_value).abs(),
        status: out.status,
        iterations: out.iterations,
        primal_residual: out.pinf,
        dual_residual: out.dinf,
        multipliers: out.y.iter().copied().collect(),
    })
}

struct RealOutcome {
    x: DMatrix<f64>,
    y: DVector<f64>,
    pobj: f64,
    dobj: f64,
    pinf: f64,
    dinf: f64,
    status: SdpStatus,
    iterations: usize,
}

fn solve_real(p: &RealSdp) -> RealOutcome {
    let n = p.n;
    let m = p.a.len();
    let nl = p.slack_rows.len();
    let nf = n as f64;

    let norm_b = p.b.norm();
    let norm_c = p.c.frobenius();
    let max_a = p.a.iter().map(|a| a.frobenius()).fold(0.0, f64::max);
    let xi =
        p.a.iter()
            .zip(p.b.iter())
            .map(|(a, &bk)| nf * (1.0 + bk.abs()) / (1.0 + a.frobenius()))
            .fold(10.0_f64.max(nf.sqrt()), f64::max);
    let zeta = 10.0_f64.max(nf.sqrt()).max(norm_c).max(max_a);

    let mut x = DMatrix::identity(n, n) * xi;
    let mut s = DMatrix::identity(n, n) * zeta;
    let mut y = DVector::zeros(m);
    let mut xl = DVector::from_element(nl, xi);
    let mut sl = DVector::from_element(nl, zeta);

    let c_dense = {
        let mut c = DMatrix::zeros(n, n);
        p.c.axpy_into(1.0, &mut c);
        c
    };

    let mut best: Option<RealOutcome> = None;
    let mut status = SdpStatus::MaxIterations;
    let mut iterations = 0;

    for iter in 0..=MAX_ITERATIONS {
        iterations = iter;
        let mut ax = p.apply(&x);
        for (j, &row) in p.slack_rows.iter().enumerate() {
            ax[row] += xl[j];
        }
        let rp = &p.b - &ax;
        let rd = sym(&c_dense - p.adjoint(&y) - &s);
        let rdl = DVector::from_iterator(
            nl,
            p.slack_rows
                .iter()
                .enumerate()
                .map(|(j, &row)| -y[row] - sl[j]),
        );
        let pobj = c_dense.dot(&x);
        let dobj = p.b.dot(&y);
        let mu = (x.dot(&s) + xl.dot(&sl)) / (nf + nl as f64);
        let pinf = rp.norm() / (1.0 + norm_b);
        let dinf = (rd.norm() + rdl.norm()) / (1.0 + norm_c);
        let gap_ok = (pobj - dobj).abs() <= 0.1 * GAP_TOL * (1.0 + pobj.abs());

        let snapshot = |status| RealOutcome {
            x: x.clone(),
            y: y.clone(),
            pobj,
            dobj,
            pinf,
            dinf,
            status,
            iterations: iter,
        };
        if pinf <= 0.1 * FEASIBILITY_TOL && dinf <= 0.1 * FEASIBILITY_TOL && gap_ok {
            return snapshot(SdpStatus::Solved);
        }
        if meets_contract(pinf, dinf, pobj, dobj) {
            best = Some(snapshot(SdpStatus::Solved));
        }
        // Farkas-type evidence: iterates diverge while the other side stays feasible.
        let xnorm = x.norm() + xl.norm();
        let ynorm = y.norm();
        if (dobj > 1e8 * (1.0 + pobj.abs()) && dinf < 1e-6 && ynorm > 1e8)
            || (pobj < -1e8 * (1.0 + dobj.abs()) && pinf < 1e-6 && xnorm > 1e8)
        {
            status = SdpStatus::Infeasible;
            break;
        }
        if iter == MAX_ITERATIONS {
            break;
        }

        // Nesterov-Todd scaling W = G Gᵀ with Gᵀ S G = G⁻¹ X G⁻ᵀ = diag(v).
        let (Some(lx), Some(ls)) = (x.clone().cholesky(), s.clone().cholesky()) else {
            break;
        };
        let lx = lx.l();
        let ls = ls.l();
        let svd = (ls.transpose() * &lx).svd(true, true);
        let (Some(u), Some(vt)) = (svd.u, svd.v_t) else {
            break;
        };
        let v = svd.singular_values.clone();
        if v.iter().any(|&vi| !(vi > 0.0) || !vi.is_finite()) {
            break;
        }
        let vinv_sqrt = v.map(|vi| 1.0 / vi.sqrt());
        let g = &lx * vt.transpose() * DMatrix::from_diagonal(&vinv_sqrt);
        let ginv = DMatrix::from_diagonal(&vinv_sqrt) * u.transpose() * ls.transpose();
        let w = &g * g.transpose();
        let dl = DVector::from_iterator(nl, xl.iter().zip(sl.iter()).map(|(a, b)| a / b));

        let mut schur = p.schur(&w);
        for (j, &row) in p.slack_rows.iter().enumerate() {
            schur[(row, row)] += dl[j];
        }
        let factor = match schur.clone().cholesky() {
            Some(f) => Factor::Chol(f),
            None => {
                let reg = 1e-14 * schur.diagonal().amax().max(1.0);
                let mut shifted = schur.clone();
                for k in 0..m {
                    shifted[(k, k)] += reg;
                }
                match shifted.cholesky() {
                    Some(f) => Factor::Chol(f),
                    None => Factor::Lu(schur.lu()),
                }
            }
        };

        let wrdw = &w * &rd * &w;
        let solve = |rc: &DMatrix<f64>, rcl: &DVector<f64>| -> Option<Direction> {
            let mut h = &rp - p.apply(&(rc - &wrdw));
            for (j, &row) in p.slack_rows.iter().enumerate() {
                h[row] -= rcl[j] - dl[j] * rdl[j];
            }
            let dy = factor.solve(&h)?;
            let ds = sym(&rd - p.adjoint(&dy));
            let dx = sym(rc - &w * &ds * &w);
            let dsl = DVector::from_iterator(
                nl,
                p.slack_rows
                    .iter()
                    .enumerate()
                    .map(|(j, &row)| rdl[j] - dy[row]),
            );
            let dxl = DVector::from_iterator(nl, (0..nl).map(|j| rcl[j] - dl[j] * dsl[j]));
            Some(Direction {
                dx,
                dy,
                ds,
                dxl,
                dsl,
            })
        };

        let steps = |d: &Direction| -> (f64, f64, DMatrix<f64>, DMatrix<f64>) {
            let dxs = sym(&ginv * &d.dx * ginv.transpose());
            let dss = sym(g.transpose() * &d.ds * &g);
            let ap = max_step_psd(&v, &dxs).min(max_step_lp(&xl, &d.dxl));
            let ad = max_step_psd(&v, &dss).min(max_step_lp(&sl, &d.dsl));
            (ap, ad, dxs, dss)
        };

        // predictor
        let Some(aff) = solve(&(-&x), &(-&xl)) else {
            break;
        };
        let (ap_max, ad_max, dxs, dss) = steps(&aff);
        let ap = ap_max.min(1.0);
        let ad = ad_max.min(1.0);
        let mu_aff = ((&x + &aff.dx * ap).dot(&(&s + &aff.ds * ad))
            + (&xl + &aff.dxl * ap).dot(&(&sl + &aff.dsl * ad)))
            / (nf + nl as f64);
        let expon = if mu > 1e-6 {
            (3.0 * ap.min(ad).powi(2)).max(1.0)
        } else {
            3.0
        };
        let sigma = (mu_aff / mu).max(0.0).powf(expon).min(1.0);

        // corrector: Lyapunov solve in the scaled space, where X̃ = S̃ = diag(v)
        let cross = &dxs * &dss + &dss * &dxs;
        let rt = DMatrix::from_fn(n, n, |i, j| {
            let diag = if i == j {
                2.0 * sigma * mu - 2.0 * v[i] * v[i]
            } else {
                0.0
            };
            (diag - cross[(i, j)]) / (v[i] + v[j])
        });
        let rc = sym(&g * rt * g.transpose());
        let rcl = DVector::from_iterator(
            nl,
            (0..nl).map(|j| (sigma * mu - xl[j] * sl[j] - aff.dxl[j] * aff.dsl[j]) / sl[j]),
        );
        let Some(dir) = solve(&rc, &rcl) else { break };
        let (ap_max, ad_max, _, _) = steps(&dir);
        let gamma = 0.9 + 0.09 * ap.min(ad);
        let ap = (gamma * ap_max).min(1.0);
        let ad = (gamma * ad_max).min(1.0);
        if ap < 1e-12 && ad < 1e-12 {
            break;
        }

        x = sym(&x + &dir.dx * ap);
        xl += &dir.dxl * ap;
        y += &dir.dy * ad;
        s = sym(&s + &dir.ds * ad);
        sl += &dir.dsl * ad;
    }

    if let Some(b) = best {
        return b;
    }
    let pobj = c_dense.dot(&x);
    let dobj = p.b.dot(&y);
    let mut ax = p.apply(&x);
    for (j, &row) in p.slack_rows.iter().enumerate() {
        ax[row] += xl[j];
    }
    let pinf = (&p.b - ax).norm() / (1.0 + norm_b);
    let rd = &c_dense - p.adjoint(&y) - &s;
    let dinf = rd.norm() / (1.0 + norm_c);
    RealOutcome {
        x,
        y,
        pobj,
        dobj,
        pinf,
        dinf,
        status,
        iterations,
    }
}

fn meets_contract(pinf: f64, dinf: f64, pobj: f64, dobj: f64) -> bool {
    pinf <= FEASIBILITY_TOL
        && dinf <= FEASIBILITY_TOL
        && (pobj - dobj).abs() <= GAP_TOL * (1.0 + pobj.abs())
}

enum Factor {
    Chol(nalgebra::Cholesky<f64, nalgebra::Dyn>),
    Lu(nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>),
}

impl Factor {
    fn solve(&self, h: &DVector<f64>) -> Option<DVector<f64>> {
        let out = match self {
            Factor::Chol(c) => c.solve(h),
            Factor::Lu(l) => l.solve(h)?,
        };
        out.iter().all(|v| v.is_finite()).then_some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trace_one(n: usize) -> (HermitianMatrix, f64) {
        (HermitianMatrix::identity(n), 1.0)
    }

    #[test]
    fn min_diagonal_entry() {
        let (a, b) = trace_one(2);
        let p = SdpProblem::new(HermitianMatrix::diag(&[1.0, 2.0]), Sense::Minimize).eq(a, b);
        let s = sdp_solve(&p).unwrap();
        assert_eq!(s.status, SdpStatus::Solved);
        assert!((s.primal_value - 1.0).abs() < 1e-7, "{}", s.primal_value);
    }

    #[test]
    fn max_diagonal_entry() {
        let (a, b) = trace_one(2);
        let p = SdpProblem::new(HermitianMatrix::diag(&[1.0, 2.0]), Sense::Maximize).eq(a, b);
        let s = sdp_solve(&p).unwrap();
        assert_eq!(s.status, SdpStatus::Solved);
        assert!((s.primal_value - 2.0).abs() < 1e-7);
        assert!(s.certificate(&p).unwrap().is_valid(1e-9));
    }

    #[test]
    fn pauli_x_ground_state() {
        let (a, b) = trace_one(2);
        let p = SdpProblem::new(HermitianMatrix::pauli_x(), Sense::Minimize).eq(a, b);
        let s = sdp_solve(&p).unwrap();
        assert_eq!(s.status, SdpStatus::Solved);
        assert!((s.primal_value + 1.0).abs() < 1e-7);
    }

    #[test]
    fn complex_objective_uses_embedding() {
        // σ_y has eigenvalues ±1
        let sy = HermitianMatrix::zeros(2).with_entry(0, 1, Complex64::new(0.0, -1.0));
        let (a, b) = trace_one(2);
        let p = SdpProblem::new(sy, Sense::Minimize).eq(a, b);
        let s = sdp_solve(&p).unwrap();
        assert_eq!(s.status, SdpStatus::Solved);
        assert!((s.primal_value + 1.0).abs() < 1e-7);
        let cert = s.certificate(&p).unwrap();
        assert!(cert.is_valid(1e-9), "{cert:?}");
        assert!(s.x.trace() - 1.0 < 1e-8);
    }

    #[test]
    fn inequality_slack() {
        // min -X00 s.t. Tr X = 1, X00 <= 0.3
        let p = SdpProblem::new(HermitianMatrix::diag(&[-1.0, 0.0]), Sense::Minimize)
            .eq(HermitianMatrix::identity(2), 1.0)
            .le(HermitianMatrix::diag(&[1.0, 0.0]), 0.3);
        let s = sdp_solve(&p).unwrap();
        assert_eq!(s.status, SdpStatus::Solved);
        assert!((s.primal_value + 0.3).abs() < 1e-7);
        let cert = s.certificate(&p).unwrap();
        assert!(cert.is_valid(1e-8), "{cert:?}");
        assert!((cert.dual_value - s.dual_value).abs() < 1e-9);
    }

    #[test]
    fn partial_trace_constraint() {
        // maximize <Φ+|X|Φ+> over X on C2⊗C2 with Tr_1 X = 1/2·I: optimum 1 (X = |Φ+><Φ+|)
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let z = Complex64::new(0.0, 0.0);
        let phi = [Complex64::new(r, 0.0), z, z, Complex64::new(r, 0.0)];
        let p = SdpProblem::new(HermitianMatrix::projector(&phi), Sense::Maximize).partial_trace(
            PartialTraceConstraint {
                dims: (2, 2),
                traced: TracedFactor::First,
                target: HermitianMatrix::identity(2).scale(0.5),
            },
        );
        let s = sdp_solve(&p).unwrap();
        assert_eq!(s.status, SdpStatus::Solved);
        assert!((s.primal_value - 1.0).abs() < 1e-7, "{}", s.primal_value);
        assert!(s.certificate(&p).unwrap().is_valid(1e-8));
    }

    #[test]
    fn infeasible_is_reported() {
        // X00 = -1 has no PSD solution
        let p = SdpProblem::new(HermitianMatrix::identity(2), Sense::Minimize)
            .eq(HermitianMatrix::diag(&[1.0, 0.0]), -1.0);
        let s = sdp_solve(&p).unwrap();
        assert_ne!(s.status, SdpStatus::Solved);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let p = SdpProblem::new(HermitianMatrix::identity(2), Sense::Minimize)
            .eq(HermitianMatrix::identity(3), 1.0);
        assert!(sdp_solve(&p).is_err());
    }
}
