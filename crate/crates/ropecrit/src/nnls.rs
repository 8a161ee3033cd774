//! Nonnegative least squares by the Lawson–Hanson active-set method.
//!
//! Deterministic: fixed iteration order, ties broken by lowest column
//! index, no randomized pivoting. The passive-set triangularization is
//! maintained incrementally by Householder reflectors; column removals
//! (rare in our feasibility problems) rebuild it from scratch.

/// Dense column-major matrix.
#[derive(Debug, Clone)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    #[inline]
    pub fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    #[inline]
    pub fn col_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[j * self.rows + i] = v;
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        self.data[j * self.rows + i] += v;
    }

    /// y = Aᵀ r
    fn t_mul(&self, r: &[f64], y: &mut [f64]) {
        for j in 0..self.cols {
            let c = self.col(j);
            y[j] = c.iter().zip(r).map(|(a, b)| a * b).sum();
        }
    }

    /// r = b − A x
    fn residual(&self, x: &[f64], b: &[f64], r: &mut [f64]) {
        r.copy_from_slice(b);
        for j in 0..self.cols {
            let xj = x[j];
            if xj != 0.0 {
                for (ri, aij) in r.iter_mut().zip(self.col(j)) {
                    *ri -= aij * xj;
                }
            }
        }
    }
}

/// Incremental QR over the passive columns.
struct PassiveQr {
    m: usize,
    /// Householder vectors; reflector k acts on rows k..m.
    reflectors: Vec<Vec<f64>>,
    /// Upper-triangular columns of R (column k has k+1 entries).
    r_cols: Vec<Vec<f64>>,
    /// Qᵀ b, kept in sync with the reflectors.
    qtb: Vec<f64>,
    /// Passive column indices in insertion order.
    passive: Vec<usize>,
}

impl PassiveQr {
    fn new(b: &[f64]) -> Self {
        Self {
            m: b.len(),
            reflectors: Vec::new(),
            r_cols: Vec::new(),
            qtb: b.to_vec(),
            passive: Vec::new(),
        }
    }

    fn apply_reflector(v: &[f64], x: &mut [f64], offset: usize) {
        let dot: f64 = v.iter().zip(&x[offset..]).map(|(a, b)| a * b).sum();
        let beta = 2.0 * dot;
        for (vi, xi) in v.iter().zip(&mut x[offset..]) {
            *xi -= beta * vi;
        }
    }

    /// Returns false if the new column is numerically dependent.
    fn push(&mut self, j: usize, a_col: &[f64]) -> bool {
        let k = self.passive.len();
        let mut c = a_col.to_vec();
        for (i, v) in self.reflectors.iter().enumerate() {
            Self::apply_reflector(v, &mut c, i);
        }
        let tail_norm: f64 = c[k..].iter().map(|x| x * x).sum::<f64>().sqrt();
        let head_norm: f64 = c[..k].iter().map(|x| x * x).sum::<f64>().sqrt();
        if tail_norm <= 1e-13 * (head_norm + tail_norm) {
            return false;
        }
        // Householder annihilating c[k+1..].
        let alpha = if c[k] >= 0.0 { -tail_norm } else { tail_norm };
        let mut v = c[k..].to_vec();
        v[0] -= alpha;
        let vnorm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if vnorm > 0.0 {
            for vi in &mut v {
                *vi /= vnorm;
            }
        }
        Self::apply_reflector(&v, &mut self.qtb, k);
        let mut r_col = c[..k].to_vec();
        r_col.push(alpha);
        self.reflectors.push(v);
        self.r_cols.push(r_col);
        self.passive.push(j);
        true
    }

    /// Solve R z = (Qᵀb)[..k] by back substitution.
    fn solve(&self) -> Vec<f64> {
        let k = self.passive.len();
        let mut z = self.qtb[..k].to_vec();
        for i in (0..k).rev() {
            for l in (i + 1)..k {
                z[i] -= self.r_cols[l][i] * z[l];
            }
            z[i] /= self.r_cols[i][i];
        }
        z
    }

    fn rebuild(&mut self, a: &Mat, b: &[f64], keep: &[usize]) {
        let passive = keep.to_vec();
        self.reflectors.clear();
        self.r_cols.clear();
        self.passive.clear();
        self.qtb = b.to_vec();
        for &j in &passive {
            let ok = self.push(j, a.col(j));
            debug_assert!(ok, "column became dependent during rebuild");
        }
        let _ = self.m;
    }
}

#[derive(Debug, Clone)]
pub struct NnlsResult {
    pub x: Vec<f64>,
    pub residual_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Largest scaled gradient over the active set at exit (optimality
    /// certificate: ≤ the dual tolerance when converged).
    pub max_gradient: f64,
    /// Columns in the passive (support) set at exit.
    pub support: usize,
}

/// Minimize ‖A x − b‖₂ subject to x ≥ 0.
pub fn nnls(a: &Mat, b: &[f64]) -> NnlsResult {
    let (m, n) = (a.rows, a.cols);
    assert_eq!(b.len(), m);
    let col_scale: Vec<f64> = (0..n)
        .map(|j| a.col(j).iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();
    let b_norm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    let w_tol = 1e-12 * b_norm.max(1e-300);

    let mut x = vec![0.0; n];
    let mut in_passive = vec![false; n];
    let mut dependent = vec![false; n];
    let mut qr = PassiveQr::new(b);
    let mut r = vec![0.0; m];
    let mut w = vec![0.0; n];
    let max_outer = 6 * n + 30;
    let mut iterations = 0;

    loop {
        iterations += 1;
        if iterations > max_outer {
            a.residual(&x, b, &mut r);
            let rn = r.iter().map(|v| v * v).sum::<f64>().sqrt();
            return NnlsResult {
                x,
                residual_norm: rn,
                iterations,
                converged: false,
                max_gradient: f64::NAN,
                support: in_passive.iter().filter(|&&p| p).count(),
            };
        }
        a.residual(&x, b, &mut r);
        a.t_mul(&r, &mut w);

        // Most negative-gradient candidate among the active set.
        let mut best: Option<(usize, f64)> = None;
        for j in 0..n {
            if in_passive[j] || dependent[j] || col_scale[j] == 0.0 {
                continue;
            }
            let wj = w[j] / col_scale[j];
            if wj > w_tol {
                match best {
                    Some((_, bw)) if bw >= wj => {}
                    _ => best = Some((j, wj)),
                }
            }
        }
        let Some((j_new, _)) = best else {
            let rn = r.iter().map(|v| v * v).sum::<f64>().sqrt();
            let max_gradient = (0..n)
                .filter(|&j| col_scale[j] > 0.0)
                .map(|j| (w[j] / col_scale[j]).abs())
                .fold(0.0, f64::max);
            let support = in_passive.iter().filter(|&&p| p).count();
            return NnlsResult { x, residual_norm: rn, iterations, converged: true, max_gradient, support };
        };

        if !qr.push(j_new, a.col(j_new)) {
            // Dependent w.r.t. the current passive set only; the flag is
            // cleared whenever a removal changes the basis.
            dependent[j_new] = true;
            continue;
        }
        in_passive[j_new] = true;
        for d in dependent.iter_mut() {
            *d = false;
        }

        // Inner loop: restore feasibility of the passive solve.
        loop {
            let z = qr.solve();
            if z.last().copied().unwrap_or(1.0) <= 0.0 && qr.passive.len() == 1 {
                // Sole passive column wants a nonpositive coefficient.
                let j = qr.passive[0];
                in_passive[j] = false;
                dependent[j] = true;
                qr.rebuild(a, b, &[]);
                break;
            }
            if z.iter().all(|&v| v > 0.0) {
                for (idx, &j) in qr.passive.iter().enumerate() {
                    x[j] = z[idx];
                }
                break;
            }
            // Step toward z until the first passive coefficient hits zero.
            let mut alpha = f64::INFINITY;
            for (idx, &j) in qr.passive.iter().enumerate() {
                if z[idx] <= 0.0 {
                    let t = x[j] / (x[j] - z[idx]);
                    if t < alpha {
                        alpha = t;
                    }
                }
            }
            let alpha = alpha.clamp(0.0, 1.0);
            for (idx, &j) in qr.passive.iter().enumerate() {
                x[j] += alpha * (z[idx] - x[j]);
            }
            let keep: Vec<usize> = qr
                .passive
                .iter()
                .copied()
                .filter(|&j| x[j] > 1e-15)
                .collect();
            for &j in qr.passive.iter() {
                if !keep.contains(&j) {
                    x[j] = 0.0;
                    in_passive[j] = false;
                }
            }
            // The basis shrank: previously dependent columns may have
            // become independent again.
            for d in dependent.iter_mut() {
                *d = false;
            }
            qr.rebuild(a, b, &keep);
            if keep.is_empty() {
                break;
            }
        }
    }
}
