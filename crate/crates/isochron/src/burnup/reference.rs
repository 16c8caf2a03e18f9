//! Fixed-step RK4 integrator for dN/dt = A·N.
//!
//! Deliberately naive: no closed forms, no adaptivity. It exists purely as
//! an independent numerical cross-check of the exact solver, stepped well
//! inside the stability region of the stiffest mode.

/// Largest step that keeps classical RK4 comfortably stable and accurate
/// for this matrix: 1e-3 / max|a_ii|. Infinite for an all-zero matrix.
pub fn max_stable_step(a: &[Vec<f64>]) -> f64 {
    let fastest = (0..a.len())
        .map(|i| a[i][i].abs())
        .fold(0.0_f64, f64::max);
    if fastest == 0.0 {
        f64::INFINITY
    } else {
        1e-3 / fastest
    }
}

struct SparseMatrix {
    n: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl SparseMatrix {
    fn new(a: &[Vec<f64>]) -> Self {
        let n = a.len();
        let mut entries = Vec::new();
        for (i, row) in a.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if v != 0.0 {
                    entries.push((i, j, v));
                }
            }
        }
        SparseMatrix { n, entries }
    }

    fn apply(&self, y: &[f64], out: &mut [f64]) {
        out[..self.n].fill(0.0);
        for &(i, j, v) in &self.entries {
            out[i] += v * y[j];
        }
    }
}

fn rk4_steps(m: &SparseMatrix, y: &mut [f64], h: f64, steps: u64) {
    let n = m.n;
    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut tmp = vec![0.0; n];
    for _ in 0..steps {
        m.apply(y, &mut k1);
        for i in 0..n {
            tmp[i] = y[i] + 0.5 * h * k1[i];
        }
        m.apply(&tmp, &mut k2);
        for i in 0..n {
            tmp[i] = y[i] + 0.5 * h * k2[i];
        }
        m.apply(&tmp, &mut k3);
        for i in 0..n {
            tmp[i] = y[i] + h * k3[i];
        }
        m.apply(&tmp, &mut k4);
        for i in 0..n {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
}

/// Integrate from t=0 to `t` with steps no larger than `max_step`.
pub fn rk4_evolve(a: &[Vec<f64>], n0: &[f64], t: f64, max_step: f64) -> Vec<f64> {
    let mut y = n0.to_vec();
    if t == 0.0 {
        return y;
    }
    let m = SparseMatrix::new(a);
    let steps = (t / max_step).ceil().max(1.0) as u64;
    let h = t / steps as f64;
    rk4_steps(&m, &mut y, h, steps);
    y
}

/// Integrate continuously, recording the state at each requested time.
/// `times` must be non-decreasing and start at or after 0.
pub fn rk4_at_times(a: &[Vec<f64>], n0: &[f64], times: &[f64], max_step: f64) -> Vec<Vec<f64>> {
    let m = SparseMatrix::new(a);
    let mut y = n0.to_vec();
    let mut out = Vec::with_capacity(times.len());
    let mut t_now = 0.0;
    for &t in times {
        let span = t - t_now;
        if span > 0.0 {
            let steps = (span / max_step).ceil().max(1.0) as u64;
            let h = span / steps as f64;
            rk4_steps(&m, &mut y, h, steps);
            t_now = t;
        }
        out.push(y.clone());
    }
    out
}
