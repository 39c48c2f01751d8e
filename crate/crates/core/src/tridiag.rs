//! Thomas algorithm for tridiagonal systems.

/// Solves `lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i]` in place.
///
/// `lower[0]` and `upper[n-1]` are ignored. `scratch` must have length `n`.
/// No pivoting: callers supply diagonally dominant (or M-matrix) systems.
pub fn solve_in_place(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &mut [f64], scratch: &mut [f64]) {
    let n = diag.len();
    debug_assert!(lower.len() == n && upper.len() == n && rhs.len() == n && scratch.len() >= n);
    if n == 0 {
        return;
    }
    let mut beta = diag[0];
    rhs[0] /= beta;
    for i in 1..n {
        scratch[i] = upper[i - 1] / beta;
        beta = diag[i] - lower[i] * scratch[i];
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= scratch[i + 1] * rhs[i + 1];
    }
}

/// Allocating convenience wrapper around [`solve_in_place`].
pub fn solve(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Vec<f64> {
    let mut x = rhs.to_vec();
    let mut scratch = vec![0.0; diag.len()];
    solve_in_place(lower, diag, upper, &mut x, &mut scratch);
    x
}

/// A tridiagonal matrix factored once for repeated solves.
#[derive(Debug, Clone)]
pub struct Factored {
    lower: Vec<f64>,
    inv_pivot: Vec<f64>,
    /// Normalized superdiagonal `upper[i-1] / pivot[i-1]`, stored at `i`.
    ratio: Vec<f64>,
}

impl Factored {
    pub fn new(lower: &[f64], diag: &[f64], upper: &[f64]) -> Self {
        let n = diag.len();
        let mut inv_pivot = vec![0.0; n];
        let mut ratio = vec![0.0; n];
        if n > 0 {
            let mut beta = diag[0];
            inv_pivot[0] = 1.0 / beta;
            for i in 1..n {
                ratio[i] = upper[i - 1] / beta;
                beta = diag[i] - lower[i] * ratio[i];
                inv_pivot[i] = 1.0 / beta;
            }
        }
        Factored { lower: lower.to_vec(), inv_pivot, ratio }
    }

    pub fn len(&self) -> usize {
        self.inv_pivot.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inv_pivot.is_empty()
    }

    pub fn solve_in_place(&self, rhs: &mut [f64]) {
        let n = self.len();
        if n == 0 {
            return;
        }
        rhs[0] *= self.inv_pivot[0];
        for i in 1..n {
            rhs[i] = (rhs[i] - self.lower[i] * rhs[i - 1]) * self.inv_pivot[i];
        }
        for i in (0..n - 1).rev() {
            rhs[i] -= self.ratio[i + 1] * rhs[i + 1];
        }
    }

    /// Solves `len()` coupled rows at once: `rows` holds `len()` contiguous
    /// blocks of `width` values, and the system acts across blocks.
    pub fn solve_blocks(&self, rows: &mut [f64], width: usize) {
        let n = self.len();
        debug_assert_eq!(rows.len(), n * width);
        if n == 0 {
            return;
        }
        for v in &mut rows[..width] {
            *v *= self.inv_pivot[0];
        }
        for i in 1..n {
            let (done, rest) = rows.split_at_mut(i * width);
            let prev = &done[(i - 1) * width..];
            let (l, p) = (self.lower[i], self.inv_pivot[i]);
            for (v, q) in rest[..width].iter_mut().zip(prev) {
                *v = (*v - l * q) * p;
            }
        }
        for i in (0..n - 1).rev() {
            let (head, tail) = rows.split_at_mut((i + 1) * width);
            let r = self.ratio[i + 1];
            for (v, q) in head[i * width..].iter_mut().zip(&tail[..width]) {
                *v -= r * q;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_system() {
        // [2 1 0; 1 3 1; 0 1 2] x = [3 5 3] -> x = [1 1 1]
        let x = solve(&[0.0, 1.0, 1.0], &[2.0, 3.0, 2.0], &[1.0, 1.0, 0.0], &[3.0, 5.0, 3.0]);
        for v in x {
            assert!((v - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn matches_dense_residual() {
        let n = 50;
        let lower: Vec<f64> = (0..n).map(|i| -1.0 - 0.01 * i as f64).collect();
        let upper: Vec<f64> = (0..n).map(|i| -0.5 + 0.02 * i as f64).collect();
        let diag: Vec<f64> = (0..n).map(|i| 4.0 + (i % 3) as f64).collect();
        let rhs: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let x = solve(&lower, &diag, &upper, &rhs);
        for i in 0..n {
            let mut r = diag[i] * x[i];
            if i > 0 {
                r += lower[i] * x[i - 1];
            }
            if i + 1 < n {
                r += upper[i] * x[i + 1];
            }
            assert!((r - rhs[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn factored_matches_thomas_and_blocks() {
        let lower = [0.0, -1.0, -1.0, -2.0];
        let diag = [3.0, 4.0, 5.0, 3.5];
        let upper = [-1.0, -0.5, -1.0, 0.0];
        let rhs = [1.0, 2.0, -1.0, 0.5];
        let f = Factored::new(&lower, &diag, &upper);
        let mut x = rhs;
        f.solve_in_place(&mut x);
        let y = solve(&lower, &diag, &upper, &rhs);
        for (a, b) in x.iter().zip(&y) {
            assert!((a - b).abs() < 1e-15);
        }
        let mut blocks: Vec<f64> = rhs.iter().flat_map(|&r| [r, 2.0 * r]).collect();
        f.solve_blocks(&mut blocks, 2);
        for i in 0..4 {
            assert!((blocks[2 * i] - y[i]).abs() < 1e-15);
            assert!((blocks[2 * i + 1] - 2.0 * y[i]).abs() < 1e-14);
        }
    }
}
