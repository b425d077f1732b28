use crate::error::{Error, Result};

/// Dense row-major matrix of `f64` values.
///
/// This is the one container every batch, weight tensor and data partition
/// in the crate is built from. Values are double precision throughout.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::config(format!(
                "matrix data length {} does not match shape {}x{}",
                data.len(),
                rows,
                cols
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    /// Build from a slice of equally sized rows. Empty input yields a 0x0 matrix.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(nrows * ncols);
        for row in rows {
            if row.len() != ncols {
                return Err(Error::config("rows have unequal lengths"));
            }
            data.extend_from_slice(row);
        }
        Ok(Matrix {
            rows: nrows,
            cols: ncols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// New matrix holding the given rows, in the given order.
    pub fn select_rows(&self, indices: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(indices.len() * self.cols);
        for &i in indices {
            data.extend_from_slice(self.row(i));
        }
        Matrix {
            rows: indices.len(),
            cols: self.cols,
            data,
        }
    }

    /// Stack matrices vertically. All inputs must have equal column counts;
    /// the column count of an empty stack is taken from the first operand.
    pub fn vstack(parts: &[&Matrix]) -> Result<Matrix> {
        let cols = parts.first().map_or(0, |m| m.cols);
        let mut data = Vec::new();
        let mut rows = 0;
        for m in parts {
            if m.cols != cols {
                return Err(Error::config("vstack column mismatch"));
            }
            data.extend_from_slice(&m.data);
            rows += m.rows;
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.data[c * self.rows + r] = self.data[r * self.cols + c];
            }
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Standard matrix product `self * other`.
    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::config(format!(
                "matmul shape mismatch: {}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let (n, k, m) = (self.rows, self.cols, other.cols);
        let mut out = vec![0.0; n * m];
        for i in 0..n {
            let a_row = &self.data[i * k..(i + 1) * k];
            let out_row = &mut out[i * m..(i + 1) * m];
            for (p, &a_ip) in a_row.iter().enumerate() {
                let b_row = &other.data[p * m..(p + 1) * m];
                for (o, &b) in out_row.iter_mut().zip(b_row) {
                    *o += a_ip * b;
                }
            }
        }
        Ok(Matrix {
            rows: n,
            cols: m,
            data: out,
        })
    }

    /// Product with a transposed right operand: `self * other^T`.
    ///
    /// Both operands are walked row-wise, which keeps the inner loop on
    /// contiguous memory; layer forward passes use this shape.
    pub fn matmul_nt(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.cols {
            return Err(Error::config(format!(
                "matmul_nt shape mismatch: {}x{} * ({}x{})^T",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let (n, k, m) = (self.rows, self.cols, other.rows);
        let mut out = Vec::with_capacity(n * m);
        for i in 0..n {
            let a_row = &self.data[i * k..(i + 1) * k];
            for j in 0..m {
                let b_row = &other.data[j * k..(j + 1) * k];
                let dot: f64 = a_row.iter().zip(b_row).map(|(a, b)| a * b).sum();
                out.push(dot);
            }
        }
        Ok(Matrix {
            rows: n,
            cols: m,
            data: out,
        })
    }

    /// Product with a transposed left operand: `self^T * other`.
    pub fn matmul_tn(&self, other: &Matrix) -> Result<Matrix> {
        if self.rows != other.rows {
            return Err(Error::config(format!(
                "matmul_tn shape mismatch: ({}x{})^T * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let (n, k, m) = (self.rows, self.cols, other.cols);
        let mut out = vec![0.0; k * m];
        for i in 0..n {
            let a_row = &self.data[i * k..(i + 1) * k];
            let b_row = &other.data[i * m..(i + 1) * m];
            for (p, &a_ip) in a_row.iter().enumerate() {
                let out_row = &mut out[p * m..(p + 1) * m];
                for (o, &b) in out_row.iter_mut().zip(b_row) {
                    *o += a_ip * b;
                }
            }
        }
        Ok(Matrix {
            rows: k,
            cols: m,
            data: out,
        })
    }

    /// Per-column mean and population standard deviation (divide by n).
    pub fn col_mean_std(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        if self.rows == 0 {
            return Err(Error::config("col_mean_std on empty matrix"));
        }
        let n = self.rows as f64;
        let mut means = vec![0.0; self.cols];
        for r in 0..self.rows {
            for (m, &v) in means.iter_mut().zip(self.row(r)) {
                *m += v;
            }
        }
        for m in &mut means {
            *m /= n;
        }
        let mut vars = vec![0.0; self.cols];
        for r in 0..self.rows {
            for ((var, &mean), &v) in vars.iter_mut().zip(&means).zip(self.row(r)) {
                let d = v - mean;
                *var += d * d;
            }
        }
        let stds = vars.into_iter().map(|v| (v / n).sqrt()).collect();
        Ok((means, stds))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: usize, cols: usize, data: &[f64]) -> Matrix {
        Matrix::new(rows, cols, data.to_vec()).unwrap()
    }

    /// Naive triple-loop product, kept independent of the implementation.
    fn reference_matmul(a: &Matrix, b: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(a.rows(), b.cols());
        for i in 0..a.rows() {
            for j in 0..b.cols() {
                let mut acc = 0.0;
                for p in 0..a.cols() {
                    acc += a.get(i, p) * b.get(p, j);
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    fn pseudo_random(n: usize, seed: u64) -> Vec<f64> {
        // LCG is enough for shape tests; RngStream is exercised elsewhere.
        let mut state = seed;
        (0..n)
            .map(|_| {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
            })
            .collect()
    }

    #[test]
    fn matmul_identity() {
        let eye = mat(2, 2, &[1.0, 0.0, 0.0, 1.0]);
        let m = mat(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(eye.matmul(&m).unwrap(), m);
    }

    #[test]
    fn matmul_hand_case() {
        let a = mat(1, 2, &[1.0, 2.0]);
        let b = mat(2, 1, &[3.0, 4.0]);
        let c = a.matmul(&b).unwrap();
        assert_eq!(c.data(), &[11.0]);
    }

    #[test]
    fn matmul_matches_triple_loop_reference() {
        let a = mat(5, 4, &pseudo_random(20, 1));
        let b = mat(4, 3, &pseudo_random(12, 2));
        let got = a.matmul(&b).unwrap();
        let want = reference_matmul(&a, &b);
        for (g, w) in got.data().iter().zip(want.data()) {
            assert!((g - w).abs() < 1e-12, "{g} vs {w}");
        }
    }

    #[test]
    fn matmul_dimension_mismatch_is_config_error() {
        let a = mat(2, 3, &[0.0; 6]);
        let b = mat(2, 2, &[0.0; 4]);
        assert!(matches!(a.matmul(&b), Err(Error::Config(_))));
    }

    #[test]
    fn transposed_products_match_explicit_transpose() {
        let a = mat(4, 3, &pseudo_random(12, 3));
        let b = mat(5, 3, &pseudo_random(15, 4));
        let nt = a.matmul_nt(&b).unwrap();
        let want_nt = a.matmul(&b.transpose()).unwrap();
        for (g, w) in nt.data().iter().zip(want_nt.data()) {
            assert!((g - w).abs() < 1e-12);
        }

        let c = mat(4, 6, &pseudo_random(24, 5));
        let tn = a.matmul_tn(&c).unwrap();
        let want_tn = a.transpose().matmul(&c).unwrap();
        for (g, w) in tn.data().iter().zip(want_tn.data()) {
            assert!((g - w).abs() < 1e-12);
        }
    }

    #[test]
    fn col_mean_std_constant_column() {
        let m = mat(3, 1, &[1.0, 1.0, 1.0]);
        let (means, stds) = m.col_mean_std().unwrap();
        assert_eq!(means, vec![1.0]);
        assert_eq!(stds, vec![0.0]);
    }

    #[test]
    fn col_mean_std_population_formula() {
        let m = mat(2, 1, &[0.0, 2.0]);
        let (means, stds) = m.col_mean_std().unwrap();
        assert_eq!(means, vec![1.0]);
        assert_eq!(stds, vec![1.0]);
    }

    #[test]
    fn col_mean_std_matches_two_pass_reference() {
        let m = mat(100, 3, &pseudo_random(300, 6));
        let (means, stds) = m.col_mean_std().unwrap();
        for c in 0..3 {
            let col: Vec<f64> = (0..100).map(|r| m.get(r, c)).collect();
            let mean: f64 = col.iter().sum::<f64>() / 100.0;
            let var: f64 = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / 100.0;
            assert!((means[c] - mean).abs() < 1e-12);
            assert!((stds[c] - var.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn col_mean_std_empty_is_config_error() {
        let m = Matrix::zeros(0, 4);
        assert!(matches!(m.col_mean_std(), Err(Error::Config(_))));
    }

    #[test]
    fn select_rows_and_vstack() {
        let m = mat(3, 2, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let picked = m.select_rows(&[2, 0]);
        assert_eq!(picked.data(), &[5.0, 6.0, 1.0, 2.0]);
        let stacked = Matrix::vstack(&[&picked, &m]).unwrap();
        assert_eq!(stacked.rows(), 5);
        assert_eq!(stacked.row(1), &[1.0, 2.0]);
    }
}
