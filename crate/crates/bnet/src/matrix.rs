//! Exact matrix algebra: logical matrices in δ-notation, integer dense
//! matrices, and the semi-tensor product.
//!
//! # Logical matrices and δ-notation
//!
//! A *logical matrix* is a 0/1 matrix in which every column is a standard
//! basis vector. Writing `δ_n^i` for the `i`-th column of the `n × n`
//! identity, a logical matrix is fully described by its row count and the
//! list of basis indices of its columns, written
//!
//! ```text
//! δ_n[i1, i2, …, ik]   =   [δ_n^i1  δ_n^i2  …  δ_n^ik]
//! ```
//!
//! [`LogicalMatrix`] stores exactly that index list (**1-based**, matching
//! the notation) and never materializes the dense 0/1 form except on
//! explicit request via [`LogicalMatrix::to_dense`]. All algorithms in this
//! crate work on the index form; state counts up to 2^20 stay cheap.
//!
//! Boolean values are encoded as the two columns of the 2 × 2 identity:
//! `true ↦ δ_2^1`, `false ↦ δ_2^2`.
//!
//! # Semi-tensor product
//!
//! The semi-tensor product (STP) `A ⋉ B` of an `m × n` matrix `A` and a
//! `p × q` matrix `B` is
//!
//! ```text
//! A ⋉ B = (A ⊗ I_{t/n}) · (B ⊗ I_{t/p}),    t = lcm(n, p),
//! ```
//!
//! which coincides with the ordinary product when `n = p` and is
//! associative in general. [`stp`] implements it over exact `i64`
//! arithmetic; no floating point appears anywhere in this crate.
//!
//! Two structured relatives get dedicated fast paths on the index form:
//!
//! - [`LogicalMatrix::compose`] — the ordinary product of two logical
//!   matrices (itself logical): column `j` of `A·B` is column
//!   `B[j]` of `A`, i.e. plain index composition.
//! - [`LogicalMatrix::khatri_rao`] — the column-wise STP of two logical
//!   matrices with equal column counts: column `j` is
//!   `δ^{(a_j − 1)·q + b_j}` where `a_j`, `b_j` are the factors' column
//!   indices and `q` is the right factor's row count.
//!
//! The *swap matrix* `W_[m,n]` ([`swap_matrix`]) is the logical matrix that
//! transposes an STP of two vector factors: `W_[m,n] ⋉ X ⋉ Y = Y ⋉ X` for
//! `X ∈ R^m`, `Y ∈ R^n`.

use std::fmt;

use num_integer::lcm;

use crate::error::{Error, Result};

// ============================================================================
// LogicalMatrix
// ============================================================================

/// A matrix whose columns are standard basis vectors, stored as the 1-based
/// indices of those columns (δ-notation).
///
/// The display form is the δ-string, e.g. `δ4[1,3,2,4]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LogicalMatrix {
    rows: usize,
    col_index: Vec<usize>,
}

impl LogicalMatrix {
    /// Builds `δ_rows[col_index…]`.
    ///
    /// # Errors
    ///
    /// Rejects a zero row count and any column index outside `1..=rows`.
    pub fn new(rows: usize, col_index: Vec<usize>) -> Result<Self> {
        if rows == 0 {
            return Err(Error::InvalidStructure(
                "logical matrix must have at least one row".into(),
            ));
        }
        if let Some(&bad) = col_index.iter().find(|&&i| i == 0 || i > rows) {
            return Err(Error::InvalidStructure(format!(
                "column index {bad} out of range 1..={rows}"
            )));
        }
        Ok(LogicalMatrix { rows, col_index })
    }

    /// The `n × n` identity `δ_n[1,…,n]`.
    pub fn identity(n: usize) -> Self {
        LogicalMatrix {
            rows: n,
            col_index: (1..=n).collect(),
        }
    }

    /// The basis column vector `δ_n^i` as an `n × 1` matrix.
    ///
    /// # Errors
    ///
    /// Rejects `i` outside `1..=n`.
    pub fn basis(n: usize, i: usize) -> Result<Self> {
        Self::new(n, vec![i])
    }

    /// Number of rows.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Number of columns.
    pub fn cols(&self) -> usize {
        self.col_index.len()
    }

    /// The 1-based basis index of column `j` (columns are 1-based too).
    ///
    /// # Panics
    ///
    /// Panics if `j` is outside `1..=cols()`.
    pub fn col(&self, j: usize) -> usize {
        assert!(
            j >= 1 && j <= self.col_index.len(),
            "column {j} out of range 1..={}",
            self.col_index.len()
        );
        self.col_index[j - 1]
    }

    /// All column indices in order (1-based values).
    pub fn col_indices(&self) -> &[usize] {
        &self.col_index
    }

    /// Ordinary matrix product `self · other` of two logical matrices.
    ///
    /// The product of logical matrices is again logical; on the index form
    /// it is composition: column `j` of the result is column
    /// `other[j]` of `self`.
    ///
    /// # Errors
    ///
    /// Requires `self.cols() == other.rows()`.
    pub fn compose(&self, other: &LogicalMatrix) -> Result<LogicalMatrix> {
        if self.cols() != other.rows() {
            return Err(Error::Dimension(format!(
                "cannot compose {}x{} with {}x{}",
                self.rows,
                self.cols(),
                other.rows,
                other.cols()
            )));
        }
        let col_index = other
            .col_index
            .iter()
            .map(|&j| self.col_index[j - 1])
            .collect();
        Ok(LogicalMatrix {
            rows: self.rows,
            col_index,
        })
    }

    /// Column-wise semi-tensor product (Khatri–Rao product) of two logical
    /// matrices with the same number of columns.
    ///
    /// Column `j` of the result is `stp(a_j, b_j)` of the factors' `j`-th
    /// columns: with `a_j`, `b_j` the column indices and `q = other.rows()`,
    /// the result column index is `(a_j − 1)·q + b_j` and the result has
    /// `self.rows() · other.rows()` rows.
    ///
    /// # Errors
    ///
    /// Requires equal column counts.
    pub fn khatri_rao(&self, other: &LogicalMatrix) -> Result<LogicalMatrix> {
        if self.cols() != other.cols() {
            return Err(Error::Dimension(format!(
                "column-wise product needs equal column counts, got {} and {}",
                self.cols(),
                other.cols()
            )));
        }
        let q = other.rows;
        let col_index = self
            .col_index
            .iter()
            .zip(&other.col_index)
            .map(|(&a, &b)| (a - 1) * q + b)
            .collect();
        Ok(LogicalMatrix {
            rows: self.rows * q,
            col_index,
        })
    }

    /// Rank of the matrix: the number of distinct basis vectors among its
    /// columns (each column is a basis vector, so this equals the linear
    /// rank).
    pub fn logical_rank(&self) -> usize {
        let mut seen = vec![false; self.rows + 1];
        let mut count = 0;
        for &i in &self.col_index {
            if !seen[i] {
                seen[i] = true;
                count += 1;
            }
        }
        count
    }

    /// Expands to the dense 0/1 form. Intended for cross-checks and small
    /// matrices; the algorithms in this crate never call it.
    pub fn to_dense(&self) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.rows, self.cols());
        for (j, &i) in self.col_index.iter().enumerate() {
            m.set(i - 1, j, 1);
        }
        m
    }
}

impl fmt::Display for LogicalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "δ{}[", self.rows)?;
        for (k, i) in self.col_index.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "]")
    }
}

/// The swap matrix `W_[m,n]`: the `mn × mn` logical matrix with
/// `W_[m,n] ⋉ X ⋉ Y = Y ⋉ X` for all `X ∈ R^m`, `Y ∈ R^n`.
///
/// On basis columns: column `(i−1)·n + j` is `δ_{mn}^{(j−1)·m + i}` for
/// `i ∈ 1..=m`, `j ∈ 1..=n`. Equivalently `W_[m,n]` is the block row
/// `[I_n ⊗ δ_m^1, …, I_n ⊗ δ_m^m]`. `W_[1,n]` and `W_[m,1]` are identities.
pub fn swap_matrix(m: usize, n: usize) -> LogicalMatrix {
    let mut col_index = vec![0; m * n];
    for i in 1..=m {
        for j in 1..=n {
            col_index[(i - 1) * n + (j - 1)] = (j - 1) * m + i;
        }
    }
    LogicalMatrix {
        rows: m * n,
        col_index,
    }
}

// ============================================================================
// DenseMatrix
// ============================================================================

/// A dense matrix over exact `i64` integers, row-major.
///
/// This is the general-arithmetic companion to [`LogicalMatrix`]: the
/// semi-tensor product, Kronecker product, and ordinary product are defined
/// here for arbitrary integer matrices. Entry accessors use zero-based row
/// and column positions, as usual for a plain numeric container.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl DenseMatrix {
    /// Builds a matrix from row-major data.
    ///
    /// # Errors
    ///
    /// Requires `data.len() == rows * cols`.
    pub fn new(rows: usize, cols: usize, data: Vec<i64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "expected {rows}x{cols} = {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    /// The all-zero `rows × cols` matrix.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    /// The `n × n` identity.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Number of rows.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Number of columns.
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Entry at zero-based `(i, j)`.
    ///
    /// # Panics
    ///
    /// Panics when out of range.
    pub fn get(&self, i: usize, j: usize) -> i64 {
        assert!(
            i < self.rows && j < self.cols,
            "entry ({i},{j}) out of range"
        );
        self.data[i * self.cols + j]
    }

    /// Sets entry at zero-based `(i, j)`.
    ///
    /// # Panics
    ///
    /// Panics when out of range.
    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        assert!(
            i < self.rows && j < self.cols,
            "entry ({i},{j}) out of range"
        );
        self.data[i * self.cols + j] = v;
    }

    /// Ordinary matrix product.
    ///
    /// # Errors
    ///
    /// Requires `self.cols() == other.rows()`.
    pub fn mul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = DenseMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let cur = out.get(i, j);
                    out.set(i, j, cur + a * other.get(k, j));
                }
            }
        }
        Ok(out)
    }

    /// Transpose.
    pub fn transpose(&self) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }
}

/// Kronecker product `a ⊗ b` over exact integers.
pub fn kron(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    let mut out = DenseMatrix::zeros(a.rows * b.rows, a.cols * b.cols);
    for i in 0..a.rows {
        for j in 0..a.cols {
            let v = a.get(i, j);
            if v == 0 {
                continue;
            }
            for k in 0..b.rows {
                for l in 0..b.cols {
                    out.set(i * b.rows + k, j * b.cols + l, v * b.get(k, l));
                }
            }
        }
    }
    out
}

/// Semi-tensor product `a ⋉ b = (a ⊗ I_{t/n})·(b ⊗ I_{t/p})` with
/// `t = lcm(n, p)`, `n = a.cols()`, `p = b.rows()`.
///
/// Coincides with the ordinary product when the inner dimensions already
/// match, and is associative in general.
pub fn stp(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    let n = a.cols;
    let p = b.rows;
    let t = lcm(n, p);
    let left = if t == n {
        a.clone()
    } else {
        kron(a, &DenseMatrix::identity(t / n))
    };
    let right = if t == p {
        b.clone()
    } else {
        kron(b, &DenseMatrix::identity(t / p))
    };
    left.mul(&right)
        .expect("inflated factors always have matching inner dimension")
}
