//! Direct solvers for the banded systems produced by the difference
//! schemes. No pivoting: every matrix assembled here is strictly or
//! near-strictly diagonally dominant, so elimination is stable as is.

use crate::error::{Error, Result};

/// Thomas elimination for a tridiagonal system. `lower[0]` and
/// `upper[n-1]` are ignored.
pub fn solve_tridiagonal(
    lower: &[f64],
    diag: &[f64],
    upper: &[f64],
    rhs: &[f64],
) -> Result<Vec<f64>> {
    let n = diag.len();
    if n == 0 || lower.len() != n || upper.len() != n || rhs.len() != n {
        return Err(Error::LinearSolve(format!(
            "inconsistent tridiagonal shapes: {} {} {} {}",
            lower.len(),
            diag.len(),
            upper.len(),
            rhs.len()
        )));
    }
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut pivot = diag[0];
    if pivot.abs() < 1e-300 {
        return Err(Error::LinearSolve("zero pivot in row 0".into()));
    }
    c[0] = upper[0] / pivot;
    d[0] = rhs[0] / pivot;
    for i in 1..n {
        pivot = diag[i] - lower[i] * c[i - 1];
        if pivot.abs() < 1e-300 || !pivot.is_finite() {
            return Err(Error::LinearSolve(format!("bad pivot {pivot} in row {i}")));
        }
        c[i] = upper[i] / pivot;
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / pivot;
    }
    let mut x = d;
    for i in (0..n - 1).rev() {
        x[i] -= c[i] * x[i + 1];
    }
    Ok(x)
}

/// Square banded matrix with equal lower and upper bandwidth, stored by
/// rows: entry (i, j) lives at `data[i * width + (j - i + bw)]` for
/// |i − j| ≤ bw.
#[derive(Debug, Clone)]
pub struct BandedMatrix {
    n: usize,
    bw: usize,
    data: Vec<f64>,
}

impl BandedMatrix {
    pub fn zeros(n: usize, bw: usize) -> BandedMatrix {
        BandedMatrix {
            n,
            bw,
            data: vec![0.0; n * (2 * bw + 1)],
        }
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        let b = self.bw as isize;
        let off = j as isize - i as isize;
        if off < -b || off > b {
            return None;
        }
        Some(i * (2 * self.bw + 1) + (off + b) as usize)
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let slot = self
            .slot(i, j)
            .unwrap_or_else(|| panic!("({i}, {j}) outside bandwidth {}", self.bw));
        self.data[slot] = v;
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let slot = self
            .slot(i, j)
            .unwrap_or_else(|| panic!("({i}, {j}) outside bandwidth {}", self.bw));
        self.data[slot] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.slot(i, j).map_or(0.0, |s| self.data[s])
    }

    /// Solves A x = rhs by banded LU without pivoting, consuming the
    /// assembled coefficients.
    pub fn solve(mut self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.n;
        if rhs.len() != n {
            return Err(Error::LinearSolve(format!(
                "rhs length {} does not match n = {n}",
                rhs.len()
            )));
        }
        let bw = self.bw;
        let mut x = rhs.to_vec();
        // Elimination: for each pivot row k, clear rows k+1..=k+bw.
        for k in 0..n {
            let pk = self.get(k, k);
            if pk.abs() < 1e-300 || !pk.is_finite() {
                return Err(Error::LinearSolve(format!("bad pivot {pk} in row {k}")));
            }
            let last = (k + bw).min(n - 1);
            for i in (k + 1)..=last {
                let factor = self.get(i, k) / pk;
                if factor == 0.0 {
                    continue;
                }
                let jmax = (k + bw).min(n - 1);
                for j in k..=jmax {
                    let v = self.get(k, j);
                    if v != 0.0 {
                        self.add(i, j, -factor * v);
                    }
                }
                x[i] -= factor * x[k];
            }
        }
        // Back substitution.
        for i in (0..n).rev() {
            let jmax = (i + bw).min(n - 1);
            let mut s = x[i];
            for j in (i + 1)..=jmax {
                s -= self.get(i, j) * x[j];
            }
            x[i] = s / self.get(i, i);
        }
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn thomas_solves_a_known_system() {
        // [2 1 0; 1 3 1; 0 1 2] x = [4, 10, 8] has x = [1, 2, 3].
        let x = solve_tridiagonal(
            &[0.0, 1.0, 1.0],
            &[2.0, 3.0, 2.0],
            &[1.0, 1.0, 0.0],
            &[4.0, 10.0, 8.0],
        )
        .unwrap();
        for (a, b) in x.iter().zip([1.0, 2.0, 3.0]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn banded_matches_dense_elimination_on_random_dominant_systems() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for trial in 0..5 {
            let n = 20 + 3 * trial;
            let bw = 4;
            let mut a = BandedMatrix::zeros(n, bw);
            let mut dense = vec![vec![0.0f64; n]; n];
            for i in 0..n {
                let mut off_sum = 0.0;
                for j in i.saturating_sub(bw)..=(i + bw).min(n - 1) {
                    if i == j {
                        continue;
                    }
                    let v: f64 = rng.random_range(-1.0..1.0);
                    a.set(i, j, v);
                    dense[i][j] = v;
                    off_sum += v.abs();
                }
                let d = off_sum + rng.random_range(0.5..1.5);
                a.set(i, i, d);
                dense[i][i] = d;
            }
            let xs: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin() + 1.2).collect();
            let rhs: Vec<f64> = dense
                .iter()
                .map(|row| row.iter().zip(&xs).map(|(a, x)| a * x).sum())
                .collect();
            let got = a.solve(&rhs).unwrap();
            for (g, want) in got.iter().zip(&xs) {
                assert!((g - want).abs() < 1e-10, "{g} vs {want}");
            }
        }
    }

    #[test]
    fn singular_systems_are_reported() {
        let mut a = BandedMatrix::zeros(3, 1);
        a.set(0, 0, 1.0);
        a.set(1, 1, 0.0);
        a.set(2, 2, 1.0);
        assert!(matches!(
            a.solve(&[1.0, 1.0, 1.0]),
            Err(Error::LinearSolve(_))
        ));
    }

    #[test]
    fn single_unknown_three_by_three_laplacian() {
        // One interior unknown of the 5-point Laplacian on a 3x3 grid with
        // zero boundary: -4/h^2 * u = rhs.
        let h: f64 = 0.5;
        let mut a = BandedMatrix::zeros(1, 1);
        a.set(0, 0, -4.0 / (h * h));
        let x = a.solve(&[2.0]).unwrap();
        assert!((x[0] + 2.0 * h * h / 4.0).abs() < 1e-15);
    }
}
