//! Exact minimizer of small box-constrained SVM duals by active-set
//! enumeration. Shared by the core SVM tests and the acceptance suite.
//!
//! Every coordinate is either pinned at 0, pinned at the upper bound, or free.
//! For each of the 3^n assignments the free block is solved exactly from its
//! stationarity equations; feasible solutions are evaluated and the smallest
//! objective wins. Whenever a minimizer has a singular free block, moving along
//! the null direction keeps the objective constant until another coordinate
//! hits a bound, so some minimizer always has a nonsingular free block and is
//! reached by the enumeration.

#![allow(clippy::needless_range_loop)]

#![allow(dead_code)]

/// A tiny problem: boolean examples as active-index lists plus `±1` labels.
#[derive(Debug, Clone)]
pub struct TinyProblem {
    pub dim: usize,
    pub points: Vec<Vec<usize>>,
    pub labels: Vec<i8>,
}

/// `Q_ij = y_i y_j (x_i.x_j + 1) + diag * [i == j]`
pub fn gram(p: &TinyProblem, diag: f64) -> Vec<Vec<f64>> {
    let n = p.points.len();
    let mut q = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            let common = p.points[i].iter().filter(|a| p.points[j].contains(a)).count();
            q[i][j] = f64::from(p.labels[i]) * f64::from(p.labels[j]) * (common as f64 + 1.0);
        }
        q[i][i] += diag;
    }
    q
}

pub fn objective(q: &[Vec<f64>], alpha: &[f64]) -> f64 {
    let n = alpha.len();
    let mut quad = 0.0;
    for i in 0..n {
        for j in 0..n {
            quad += alpha[i] * q[i][j] * alpha[j];
        }
    }
    0.5 * quad - alpha.iter().sum::<f64>()
}

fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs()))?;
        if a[piv][col].abs() < 1e-10 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for c in col..n {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

/// Minimum of `1/2 a'Qa - e'a` over `0 <= a_i <= upper` (upper may be
/// infinite). Returns `(objective, alpha)`.
pub fn minimize(q: &[Vec<f64>], upper: f64) -> (f64, Vec<f64>) {
    let n = q.len();
    let states: usize = if upper.is_finite() { 3 } else { 2 };
    let mut best: Option<(f64, Vec<f64>)> = None;
    for code in 0..states.pow(n as u32) {
        let mut c = code;
        let mut state = vec![0usize; n];
        for s in state.iter_mut() {
            *s = c % states;
            c /= states;
        }
        let mut alpha = vec![0.0; n];
        for i in 0..n {
            if state[i] == 2 {
                alpha[i] = upper;
            }
        }
        let free: Vec<usize> = (0..n).filter(|&i| state[i] == 1).collect();
        if !free.is_empty() {
            let a: Vec<Vec<f64>> = free.iter().map(|&i| free.iter().map(|&j| q[i][j]).collect()).collect();
            let b: Vec<f64> = free
                .iter()
                .map(|&i| 1.0 - (0..n).filter(|j| state[*j] != 1).map(|j| q[i][j] * alpha[j]).sum::<f64>())
                .collect();
            let Some(x) = solve(a, b) else { continue };
            for (k, &i) in free.iter().enumerate() {
                alpha[i] = x[k];
            }
        }
        if alpha.iter().any(|&v| v < -1e-12 || v > upper + 1e-12) {
            continue;
        }
        let f = objective(q, &alpha);
        if best.as_ref().is_none_or(|(bf, _)| f < *bf) {
            best = Some((f, alpha));
        }
    }
    best.expect("alpha = 0 is always a candidate")
}

/// Random problem with `n` points in `dim` boolean dimensions, both labels
/// present. `next` yields uniform `u64`s.
pub fn random_problem(next: &mut impl FnMut() -> u64, n: usize, dim: usize) -> TinyProblem {
    loop {
        let points: Vec<Vec<usize>> = (0..n)
            .map(|_| (0..dim).filter(|_| next() % 2 == 1).collect())
            .collect();
        let labels: Vec<i8> = (0..n).map(|_| if next() % 2 == 1 { 1 } else { -1 }).collect();
        if labels.contains(&1) && labels.contains(&-1) {
            return TinyProblem { dim, points, labels };
        }
    }
}
