//! Sparse matrices and Krylov solvers.
//!
//! The finite-volume and finite-element assemblies all target [`CsrMatrix`]
//! with a fixed sparsity pattern so per-step refills are allocation-free.
//! Momentum systems (mildly asymmetric) are solved with ILU(0)-preconditioned
//! BiCGStab; pressure-Poisson and diffusion systems with conjugate gradients
//! preconditioned by an aggregation-based algebraic multigrid V-cycle.

use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("linear solver diverged after {iterations} iterations (residual {final_residual:.3e}, target {target:.3e})")]
    Diverged {
        iterations: usize,
        final_residual: f64,
        target: f64,
        history: Vec<f64>,
    },
    #[error("matrix breakdown: {0}")]
    Breakdown(&'static str),
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub iterations: usize,
    pub final_residual: f64,
    pub history: Vec<f64>,
}

/// Compressed sparse row matrix with sorted column indices per row.
#[derive(Debug, Clone)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    pub vals: Vec<f64>,
}

impl CsrMatrix {
    /// Builds the pattern from an adjacency list (diagonal inserted
    /// automatically); all values start at zero.
    pub fn from_adjacency(n: usize, neighbours: impl Fn(usize) -> Vec<usize>) -> CsrMatrix {
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        row_ptr.push(0);
        for i in 0..n {
            let mut row = neighbours(i);
            row.push(i);
            row.sort_unstable();
            row.dedup();
            cols.extend_from_slice(&row);
            row_ptr.push(cols.len());
        }
        let nnz = cols.len();
        CsrMatrix {
            n,
            row_ptr,
            cols,
            vals: vec![0.0; nnz],
        }
    }

    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> CsrMatrix {
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &(i, j, _) in triplets {
            adj[i].push(j);
        }
        let mut m = CsrMatrix::from_adjacency(n, |i| adj[i].clone());
        for &(i, j, v) in triplets {
            m.add(i, j, v);
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.cols.len()
    }

    pub fn zero(&mut self) {
        self.vals.iter_mut().for_each(|v| *v = 0.0);
    }

    fn idx(&self, i: usize, j: usize) -> Option<usize> {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        self.cols[lo..hi].binary_search(&j).ok().map(|k| lo + k)
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self
            .idx(i, j)
            .unwrap_or_else(|| panic!("entry ({i},{j}) outside sparsity pattern"));
        self.vals[k] += v;
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self
            .idx(i, j)
            .unwrap_or_else(|| panic!("entry ({i},{j}) outside sparsity pattern"));
        self.vals[k] = v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.idx(i, j).map_or(0.0, |k| self.vals[k])
    }

    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        (&self.cols[lo..hi], &self.vals[lo..hi])
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        y.par_iter_mut().enumerate().for_each(|(i, yi)| {
            let lo = self.row_ptr[i];
            let hi = self.row_ptr[i + 1];
            let mut s = 0.0;
            for k in lo..hi {
                s += self.vals[k] * x[self.cols[k]];
            }
            *yi = s;
        });
    }

    pub fn residual(&self, x: &[f64], b: &[f64], r: &mut [f64]) {
        self.matvec(x, r);
        for i in 0..self.n {
            r[i] = b[i] - r[i];
        }
    }

    /// Infinity-norm asymmetry |A - A^T| relative to |A|.
    pub fn asymmetry(&self) -> f64 {
        let mut num: f64 = 0.0;
        let mut den: f64 = 0.0;
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                den = den.max(v.abs());
                num = num.max((v - self.get(j, i)).abs());
            }
        }
        if den == 0.0 {
            0.0
        } else {
            num / den
        }
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let mut m = nalgebra::DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                m[(i, j)] = v;
            }
        }
        m
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    // sequential accumulation keeps results bitwise reproducible
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Preconditioner choices named after the schemes they implement.
pub enum Preconditioner {
    Identity,
    Jacobi(Vec<f64>),
    Ilu0(Ilu0),
    Amg(Amg),
}

impl Preconditioner {
    pub fn jacobi(a: &CsrMatrix) -> Preconditioner {
        Preconditioner::Jacobi(a.diag().iter().map(|&d| if d != 0.0 { 1.0 / d } else { 1.0 }).collect())
    }

    pub fn apply(&self, r: &[f64], z: &mut [f64]) {
        match self {
            Preconditioner::Identity => z.copy_from_slice(r),
            Preconditioner::Jacobi(dinv) => {
                for i in 0..r.len() {
                    z[i] = dinv[i] * r[i];
                }
            }
            Preconditioner::Ilu0(ilu) => ilu.apply(r, z),
            Preconditioner::Amg(amg) => amg.apply(r, z),
        }
    }
}

/// Incomplete LU factorization with zero fill-in, stored in the pattern of A.
pub struct Ilu0 {
    lu: CsrMatrix,
    diag_idx: Vec<usize>,
}

impl Ilu0 {
    pub fn factor(a: &CsrMatrix) -> Result<Ilu0, SolverError> {
        let mut lu = a.clone();
        let n = lu.n;
        let mut diag_idx = vec![0usize; n];
        for i in 0..n {
            diag_idx[i] = lu
                .idx(i, i)
                .ok_or(SolverError::Breakdown("missing diagonal entry"))?;
        }
        // IKJ variant restricted to the sparsity pattern
        for i in 0..n {
            let row_start = lu.row_ptr[i];
            let row_end = lu.row_ptr[i + 1];
            for kk in row_start..row_end {
                let k = lu.cols[kk];
                if k >= i {
                    break;
                }
                let pivot = lu.vals[diag_idx[k]];
                if pivot == 0.0 {
                    return Err(SolverError::Breakdown("zero pivot in ILU(0)"));
                }
                let factor = lu.vals[kk] / pivot;
                lu.vals[kk] = factor;
                // subtract factor * U(k, j) for j in row i beyond k
                let krow_start = lu.row_ptr[k];
                let krow_end = lu.row_ptr[k + 1];
                let mut jj = kk + 1;
                for kj in krow_start..krow_end {
                    let j = lu.cols[kj];
                    if j <= k {
                        continue;
                    }
                    while jj < row_end && lu.cols[jj] < j {
                        jj += 1;
                    }
                    if jj < row_end && lu.cols[jj] == j {
                        lu.vals[jj] -= factor * lu.vals[kj];
                    }
                }
            }
        }
        Ok(Ilu0 { lu, diag_idx })
    }

    pub fn apply(&self, r: &[f64], z: &mut [f64]) {
        let n = self.lu.n;
        // forward solve L y = r (unit diagonal)
        for i in 0..n {
            let mut s = r[i];
            let lo = self.lu.row_ptr[i];
            for k in lo..self.diag_idx[i] {
                s -= self.lu.vals[k] * z[self.lu.cols[k]];
            }
            z[i] = s;
        }
        // backward solve U z = y
        for i in (0..n).rev() {
            let mut s = z[i];
            let hi = self.lu.row_ptr[i + 1];
            for k in self.diag_idx[i] + 1..hi {
                s -= self.lu.vals[k] * z[self.lu.cols[k]];
            }
            z[i] = s / self.lu.vals[self.diag_idx[i]];
        }
    }
}

/// Aggregation-based algebraic multigrid hierarchy, used as a V-cycle
/// preconditioner with symmetric Gauss-Seidel smoothing.
pub struct Amg {
    levels: Vec<AmgLevel>,
    coarse_lu: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    coarse_n: usize,
}

struct AmgLevel {
    a: CsrMatrix,
    /// fine index -> coarse aggregate
    agg: Vec<usize>,
    n_coarse: usize,
}

impl Amg {
    pub fn setup(a: &CsrMatrix) -> Amg {
        let mut levels = Vec::new();
        let mut current = a.clone();
        while current.n() > 400 && levels.len() < 12 {
            let (agg, n_coarse) = aggregate(&current, 0.08);
            if n_coarse == 0 || n_coarse >= current.n() * 9 / 10 {
                break;
            }
            let coarse = galerkin_coarse(&current, &agg, n_coarse);
            levels.push(AmgLevel {
                a: current,
                agg,
                n_coarse,
            });
            current = coarse;
        }
        let coarse_n = current.n();
        let coarse_lu = current.to_dense().lu();
        Amg {
            levels,
            coarse_lu,
            coarse_n,
        }
    }

    pub fn apply(&self, r: &[f64], z: &mut [f64]) {
        z.iter_mut().for_each(|v| *v = 0.0);
        self.cycle(0, r, z);
    }

    fn cycle(&self, level: usize, r: &[f64], z: &mut [f64]) {
        if level == self.levels.len() {
            let rhs = nalgebra::DVector::from_column_slice(r);
            if let Some(sol) = self.coarse_lu.solve(&rhs) {
                z.copy_from_slice(sol.as_slice());
            } else {
                z.copy_from_slice(r);
            }
            debug_assert_eq!(r.len(), self.coarse_n);
            return;
        }
        let lvl = &self.levels[level];
        let n = lvl.a.n();
        // pre-smooth (one symmetric Gauss-Seidel sweep on A z = r, z0 = 0)
        gauss_seidel(&lvl.a, r, z, 1);
        // restrict residual
        let mut res = vec![0.0; n];
        lvl.a.residual(z, r, &mut res);
        let mut rc = vec![0.0; lvl.n_coarse];
        for i in 0..n {
            rc[lvl.agg[i]] += res[i];
        }
        let mut zc = vec![0.0; lvl.n_coarse];
        self.cycle(level + 1, &rc, &mut zc);
        for i in 0..n {
            z[i] += zc[lvl.agg[i]];
        }
        gauss_seidel(&lvl.a, r, z, 1);
    }
}

fn gauss_seidel(a: &CsrMatrix, b: &[f64], x: &mut [f64], sweeps: usize) {
    let n = a.n();
    for _ in 0..sweeps {
        for i in 0..n {
            let (cols, vals) = a.row(i);
            let mut s = b[i];
            let mut d = 0.0;
            for (&j, &v) in cols.iter().zip(vals) {
                if j == i {
                    d = v;
                } else {
                    s -= v * x[j];
                }
            }
            if d != 0.0 {
                x[i] = s / d;
            }
        }
        for i in (0..n).rev() {
            let (cols, vals) = a.row(i);
            let mut s = b[i];
            let mut d = 0.0;
            for (&j, &v) in cols.iter().zip(vals) {
                if j == i {
                    d = v;
                } else {
                    s -= v * x[j];
                }
            }
            if d != 0.0 {
                x[i] = s / d;
            }
        }
    }
}

/// Greedy strength-based aggregation. Returns (aggregate id per node, count).
fn aggregate(a: &CsrMatrix, theta: f64) -> (Vec<usize>, usize) {
    let n = a.n();
    let diag = a.diag();
    let strong = |i: usize, j: usize, v: f64| -> bool {
        i != j && v.abs() >= theta * (diag[i].abs() * diag[j].abs()).sqrt()
    };
    let mut agg = vec![usize::MAX; n];
    let mut count = 0;
    // pass 1: seed aggregates from fully unaggregated strong neighbourhoods
    for i in 0..n {
        if agg[i] != usize::MAX {
            continue;
        }
        let (cols, vals) = a.row(i);
        let neighbourhood: Vec<usize> = cols
            .iter()
            .zip(vals)
            .filter(|&(&j, &v)| strong(i, j, v))
            .map(|(&j, _)| j)
            .collect();
        if neighbourhood.iter().all(|&j| agg[j] == usize::MAX) {
            agg[i] = count;
            for &j in &neighbourhood {
                agg[j] = count;
            }
            count += 1;
        }
    }
    // pass 2: attach leftovers to the strongest aggregated neighbour
    for i in 0..n {
        if agg[i] != usize::MAX {
            continue;
        }
        let (cols, vals) = a.row(i);
        let mut best: Option<(f64, usize)> = None;
        for (&j, &v) in cols.iter().zip(vals) {
            if j != i && agg[j] != usize::MAX {
                let w = v.abs();
                if best.map_or(true, |(bw, _)| w > bw) {
                    best = Some((w, agg[j]));
                }
            }
        }
        match best {
            Some((_, g)) => agg[i] = g,
            None => {
                agg[i] = count;
                count += 1;
            }
        }
    }
    (agg, count)
}

fn galerkin_coarse(a: &CsrMatrix, agg: &[usize], n_coarse: usize) -> CsrMatrix {
    use std::collections::BTreeMap;
    let mut rows: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); n_coarse];
    for i in 0..a.n() {
        let (cols, vals) = a.row(i);
        let ci = agg[i];
        for (&j, &v) in cols.iter().zip(vals) {
            *rows[ci].entry(agg[j]).or_insert(0.0) += v;
        }
    }
    let mut row_ptr = Vec::with_capacity(n_coarse + 1);
    let mut cols = Vec::new();
    let mut vals = Vec::new();
    row_ptr.push(0);
    for row in rows {
        for (j, v) in row {
            cols.push(j);
            vals.push(v);
        }
        row_ptr.push(cols.len());
    }
    CsrMatrix {
        n: n_coarse,
        row_ptr,
        cols,
        vals,
    }
}

/// Stopping rule: ||r|| <= max(rel_tol * ||r0||, abs_tol).
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
    pub max_iterations: usize,
}

impl Tolerance {
    pub fn rel(rel: f64) -> Tolerance {
        Tolerance {
            rel,
            abs: 0.0,
            max_iterations: 2000,
        }
    }

    fn target(&self, r0: f64) -> f64 {
        (self.rel * r0).max(self.abs)
    }
}

/// Preconditioned BiCGStab; right preconditioning keeps the monitored
/// residual equal to the true residual.
pub fn bicgstab(
    a: &CsrMatrix,
    b: &[f64],
    x: &mut [f64],
    m: &Preconditioner,
    tol: Tolerance,
) -> Result<SolveReport, SolverError> {
    let n = a.n();
    let mut r = vec![0.0; n];
    a.residual(x, b, &mut r);
    let r0 = r.clone();
    let mut rho = 1.0;
    let mut alpha = 1.0;
    let mut omega = 1.0;
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut phat = vec![0.0; n];
    let mut s = vec![0.0; n];
    let mut shat = vec![0.0; n];
    let mut t = vec![0.0; n];

    let r0_norm = norm(&r);
    let target = tol.target(r0_norm);
    let mut history = vec![r0_norm];
    if r0_norm <= target {
        return Ok(SolveReport {
            iterations: 0,
            final_residual: r0_norm,
            history,
        });
    }

    for it in 1..=tol.max_iterations {
        let rho_new = dot(&r0, &r);
        if rho_new.abs() < f64::MIN_POSITIVE {
            return Err(SolverError::Breakdown("rho underflow in BiCGStab"));
        }
        let beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        for i in 0..n {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
        m.apply(&p, &mut phat);
        a.matvec(&phat, &mut v);
        alpha = rho / dot(&r0, &v);
        for i in 0..n {
            s[i] = r[i] - alpha * v[i];
        }
        let s_norm = norm(&s);
        if s_norm <= target {
            for i in 0..n {
                x[i] += alpha * phat[i];
            }
            history.push(s_norm);
            return Ok(SolveReport {
                iterations: it,
                final_residual: s_norm,
                history,
            });
        }
        m.apply(&s, &mut shat);
        a.matvec(&shat, &mut t);
        let tt = dot(&t, &t);
        if tt == 0.0 {
            return Err(SolverError::Breakdown("t = 0 in BiCGStab"));
        }
        omega = dot(&t, &s) / tt;
        for i in 0..n {
            x[i] += alpha * phat[i] + omega * shat[i];
            r[i] = s[i] - omega * t[i];
        }
        let rn = norm(&r);
        history.push(rn);
        if rn <= target {
            return Ok(SolveReport {
                iterations: it,
                final_residual: rn,
                history,
            });
        }
        if omega.abs() < f64::MIN_POSITIVE {
            return Err(SolverError::Breakdown("omega underflow in BiCGStab"));
        }
    }
    let final_residual = *history.last().unwrap();
    Err(SolverError::Diverged {
        iterations: tol.max_iterations,
        final_residual,
        target,
        history,
    })
}

/// Preconditioned conjugate gradients for symmetric positive definite
/// systems.
pub fn pcg(
    a: &CsrMatrix,
    b: &[f64],
    x: &mut [f64],
    m: &Preconditioner,
    tol: Tolerance,
) -> Result<SolveReport, SolverError> {
    let n = a.n();
    let mut r = vec![0.0; n];
    a.residual(x, b, &mut r);
    let mut z = vec![0.0; n];
    m.apply(&r, &mut z);
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut rz = dot(&r, &z);

    let r0_norm = norm(&r);
    let target = tol.target(r0_norm);
    let mut history = vec![r0_norm];
    if r0_norm <= target {
        return Ok(SolveReport {
            iterations: 0,
            final_residual: r0_norm,
            history,
        });
    }

    for it in 1..=tol.max_iterations {
        a.matvec(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            return Err(SolverError::Breakdown("non-positive curvature in PCG"));
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rn = norm(&r);
        history.push(rn);
        if rn <= target {
            return Ok(SolveReport {
                iterations: it,
                final_residual: rn,
                history,
            });
        }
        m.apply(&r, &mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    let final_residual = *history.last().unwrap();
    Err(SolverError::Diverged {
        iterations: tol.max_iterations,
        final_residual,
        target,
        history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poisson_1d(n: usize) -> CsrMatrix {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            if i > 0 {
                t.push((i, i - 1, -1.0));
            }
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
            }
        }
        CsrMatrix::from_triplets(n, &t)
    }

    fn poisson_3d(nx: usize) -> CsrMatrix {
        let id = |i: usize, j: usize, k: usize| (k * nx + j) * nx + i;
        let n = nx * nx * nx;
        let mut t = Vec::new();
        for k in 0..nx {
            for j in 0..nx {
                for i in 0..nx {
                    let c = id(i, j, k);
                    let mut diag = 0.0;
                    let mut push = |other: usize, t: &mut Vec<(usize, usize, f64)>| {
                        t.push((c, other, -1.0));
                    };
                    if i > 0 {
                        push(id(i - 1, j, k), &mut t);
                        diag += 1.0;
                    }
                    if i + 1 < nx {
                        push(id(i + 1, j, k), &mut t);
                        diag += 1.0;
                    }
                    if j > 0 {
                        push(id(i, j - 1, k), &mut t);
                        diag += 1.0;
                    }
                    if j + 1 < nx {
                        push(id(i, j + 1, k), &mut t);
                        diag += 1.0;
                    }
                    if k > 0 {
                        push(id(i, j, k - 1), &mut t);
                        diag += 1.0;
                    }
                    if k + 1 < nx {
                        push(id(i, j, k + 1), &mut t);
                        diag += 1.0;
                    }
                    // Dirichlet-style diagonal keeps the matrix SPD
                    t.push((c, c, diag + 1.0));
                }
            }
        }
        CsrMatrix::from_triplets(n, &t)
    }

    #[test]
    fn identity_solves_in_zero_or_one_iteration() {
        let n = 17;
        let t: Vec<_> = (0..n).map(|i| (i, i, 1.0)).collect();
        let a = CsrMatrix::from_triplets(n, &t);
        let b: Vec<f64> = (0..n).map(|i| i as f64 - 3.5).collect();
        let mut x = vec![0.0; n];
        let rep = bicgstab(&a, &b, &mut x, &Preconditioner::Identity, Tolerance::rel(1e-12)).unwrap();
        assert!(rep.iterations <= 1);
        for i in 0..n {
            assert!((x[i] - b[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn tridiagonal_matches_dense_direct_solve() {
        let n = 100;
        let a = poisson_1d(n);
        let b: Vec<f64> = (0..n).map(|i| ((i * 7919) % 13) as f64 / 13.0 - 0.5).collect();

        // dense direct-solve oracle
        let dense = a.to_dense();
        let exact = dense
            .lu()
            .solve(&nalgebra::DVector::from_column_slice(&b))
            .unwrap();

        let mut x = vec![0.0; n];
        let ilu = Preconditioner::Ilu0(Ilu0::factor(&a).unwrap());
        bicgstab(&a, &b, &mut x, &ilu, Tolerance::rel(1e-12)).unwrap();
        for i in 0..n {
            assert!((x[i] - exact[i]).abs() < 1e-8, "i={i}: {} vs {}", x[i], exact[i]);
        }

        let mut y = vec![0.0; n];
        let amg = Preconditioner::Amg(Amg::setup(&a));
        pcg(&a, &b, &mut y, &amg, Tolerance::rel(1e-12)).unwrap();
        for i in 0..n {
            assert!((y[i] - exact[i]).abs() < 1e-8);
        }
    }

    #[test]
    fn ilu0_on_tridiagonal_is_exact_factorization() {
        // zero fill-in is exact for tridiagonal matrices, so a single
        // preconditioner application solves the system
        let n = 50;
        let a = poisson_1d(n);
        let b = vec![1.0; n];
        let ilu = Ilu0::factor(&a).unwrap();
        let mut z = vec![0.0; n];
        ilu.apply(&b, &mut z);
        let mut r = vec![0.0; n];
        a.residual(&z, &b, &mut r);
        assert!(norm(&r) < 1e-10 * norm(&b));
    }

    #[test]
    fn amg_iterations_grow_sublinearly_versus_plain_cg() {
        let mut plain_iters = Vec::new();
        let mut amg_iters = Vec::new();
        for nx in [8usize, 16, 32] {
            let a = poisson_3d(nx);
            let n = a.n();
            let b = vec![1.0; n];
            let tol = Tolerance {
                rel: 1e-8,
                abs: 0.0,
                max_iterations: 10_000,
            };
            let mut x = vec![0.0; n];
            let rep = pcg(&a, &b, &mut x, &Preconditioner::Identity, tol).unwrap();
            plain_iters.push(rep.iterations as f64);
            let mut y = vec![0.0; n];
            let amg = Preconditioner::Amg(Amg::setup(&a));
            let rep = pcg(&a, &b, &mut y, &amg, tol).unwrap();
            amg_iters.push(rep.iterations as f64);
        }
        // preconditioned growth must be slower than unpreconditioned growth
        let plain_growth = plain_iters[2] / plain_iters[0];
        let amg_growth = amg_iters[2] / amg_iters[0];
        assert!(
            amg_growth < plain_growth,
            "amg growth {amg_growth} vs plain {plain_growth}",
        );
        assert!(amg_iters[2] < plain_iters[2]);
    }

    #[test]
    fn divergence_error_carries_history() {
        let a = poisson_1d(64);
        let b = vec![1.0; 64];
        let mut x = vec![0.0; 64];
        let tol = Tolerance {
            rel: 1e-14,
            abs: 0.0,
            max_iterations: 2,
        };
        let err = pcg(&a, &b, &mut x, &Preconditioner::Identity, tol).unwrap_err();
        match err {
            SolverError::Diverged { history, .. } => assert_eq!(history.len(), 3),
            other => panic!("unexpected error {other:?}"),
        }
    }
}
