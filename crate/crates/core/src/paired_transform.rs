//! The discrete paired transform for power-of-two lengths.
//!
//! For `N = 2^r` the integer transform has a simple block structure: the first
//! `N/2` outputs are the differences `x_j - x_{j+N/2}`, and the remaining
//! outputs are the transform of size `N/2` applied to the half-sums
//! `x_j + x_{j+N/2}`. The smallest case is `[[1, -1], [1, 1]]`.
//!
//! The fast path follows that recursion and uses `2N - 2` additions and no
//! multiplications. Scaling row blocks by `1/sqrt(2)`, `1/2`, ... `1/sqrt(N)`
//! gives the orthonormal form used by the quantum circuits.

use std::ops::{Add, Sub};

use crate::error::{Error, Result};

/// True if `n` is a power of two and at least 2.
pub fn is_valid_size(n: usize) -> bool {
    n >= 2 && n.is_power_of_two()
}

fn check_size(n: usize) -> Result<()> {
    if is_valid_size(n) {
        Ok(())
    } else {
        Err(Error::InvalidSize(n, 2))
    }
}

/// Real-valued periodic signal of length `2^r`, `r >= 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    values: Vec<f64>,
}

impl Signal {
    pub const MIN_LEN: usize = 4;

    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < Self::MIN_LEN || !values.len().is_power_of_two() {
            return Err(Error::InvalidSize(values.len(), Self::MIN_LEN));
        }
        Ok(Signal { values })
    }

    /// Zero-pads `values` on the right to the next admissible length.
    pub fn zero_padded(mut values: Vec<f64>) -> Self {
        let n = values.len().next_power_of_two().max(Self::MIN_LEN);
        values.resize(n, 0.0);
        Signal { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Number of qubits needed to index the samples (`log2 N`).
    pub fn qubits(&self) -> usize {
        self.values.len().trailing_zeros() as usize
    }

    /// Sample at `i` taken modulo `N`; negative indices wrap.
    #[inline]
    pub fn at(&self, i: isize) -> f64 {
        let n = self.values.len() as isize;
        self.values[i.rem_euclid(n) as usize]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Cyclic shift: `out[n] = self[n - s]`.
    pub fn shifted(&self, s: isize) -> Signal {
        let n = self.len() as isize;
        let values = (0..n).map(|i| self.at(i - s)).collect();
        Signal { values }
    }
}

/// Integer DPT matrix with entries in {-1, 0, 1}, stored row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairedMatrix {
    size: usize,
    entries: Vec<i8>,
}

impl PairedMatrix {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, row: usize, col: usize) -> i8 {
        self.entries[row * self.size + col]
    }

    pub fn row(&self, row: usize) -> &[i8] {
        &self.entries[row * self.size..(row + 1) * self.size]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[i8]> {
        self.entries.chunks_exact(self.size)
    }

    /// Plain `O(N^2)` matrix-vector product.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.size, "vector length must match matrix size");
        self.rows()
            .map(|row| {
                row.iter()
                    .zip(x)
                    .map(|(&m, &v)| f64::from(m) * v)
                    .sum::<f64>()
            })
            .collect()
    }
}

/// Orthonormal DPT matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryPairedMatrix {
    size: usize,
    entries: Vec<f64>,
}

impl UnitaryPairedMatrix {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.size + col]
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.size, "vector length must match matrix size");
        self.entries
            .chunks_exact(self.size)
            .map(|row| row.iter().zip(x).map(|(m, v)| m * v).sum::<f64>())
            .collect()
    }

    /// Largest entry of `|M M^T - I|`.
    pub fn orthonormality_error(&self) -> f64 {
        let n = self.size;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let dot: f64 = (0..n).map(|c| self.get(i, c) * self.get(j, c)).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }
}

/// Builds the integer DPT matrix of size `n` from its recursive row structure.
pub fn dpt_matrix(n: usize) -> Result<PairedMatrix> {
    check_size(n)?;
    Ok(build_matrix(n))
}

fn build_matrix(n: usize) -> PairedMatrix {
    let mut entries = vec![0i8; n * n];
    if n == 1 {
        entries[0] = 1;
        return PairedMatrix { size: 1, entries };
    }
    let half = n / 2;
    for j in 0..half {
        entries[j * n + j] = 1;
        entries[j * n + j + half] = -1;
    }
    let sub = build_matrix(half);
    for i in 0..half {
        for c in 0..n {
            entries[(half + i) * n + c] = sub.get(i, c % half);
        }
    }
    PairedMatrix { size: n, entries }
}

/// Normalizing factor of each DPT row: `1/sqrt(2)` for the first `N/2` rows,
/// `1/2` for the next `N/4`, and so on down to `1/sqrt(N)` for the last two.
pub fn row_weights(n: usize) -> Result<Vec<f64>> {
    check_size(n)?;
    let mut weights = Vec::with_capacity(n);
    let mut block = n / 2;
    let mut support = 2.0f64;
    while block >= 1 {
        weights.extend(std::iter::repeat_n(support.recip().sqrt(), block));
        if block == 1 {
            // the last row (all ones) shares the weight of its partner
            weights.push(support.recip().sqrt());
        }
        block /= 2;
        support *= 2.0;
    }
    Ok(weights)
}

/// The orthonormal DPT: [`dpt_matrix`] with each row scaled by [`row_weights`].
pub fn dpt_unitary(n: usize) -> Result<UnitaryPairedMatrix> {
    let m = dpt_matrix(n)?;
    let w = row_weights(n)?;
    let entries = m
        .rows()
        .zip(&w)
        .flat_map(|(row, &s)| row.iter().map(move |&v| f64::from(v) * s))
        .collect();
    Ok(UnitaryPairedMatrix { size: n, entries })
}

/// Fast integer DPT over any additive scalar.
///
/// Performs exactly `2N - 2` additions/subtractions and no multiplications.
pub fn dpt_forward_in<T>(x: &[T]) -> Result<Vec<T>>
where
    T: Copy + Add<Output = T> + Sub<Output = T>,
{
    check_size(x.len())?;
    let mut sums = x.to_vec();
    let mut out = Vec::with_capacity(x.len());
    let mut len = x.len();
    while len >= 2 {
        let half = len / 2;
        for j in 0..half {
            let (a, b) = (sums[j], sums[j + half]);
            out.push(a - b);
            sums[j] = a + b;
        }
        len = half;
    }
    out.push(sums[0]);
    Ok(out)
}

/// Fast integer-weighted DPT of a real vector; equals `dpt_matrix(N) * x`.
pub fn dpt_forward(x: &[f64]) -> Result<Vec<f64>> {
    dpt_forward_in(x)
}

/// Orthonormal DPT of `x`; preserves the Euclidean norm.
pub fn dpt_forward_unitary(x: &[f64]) -> Result<Vec<f64>> {
    let mut c = dpt_forward(x)?;
    for (v, w) in c.iter_mut().zip(row_weights(x.len())?) {
        *v *= w;
    }
    Ok(c)
}

/// Inverse of [`dpt_forward_unitary`], applied as the transpose.
pub fn dpt_inverse_unitary(c: &[f64]) -> Result<Vec<f64>> {
    let weights = row_weights(c.len())?;
    let scaled: Vec<f64> = c.iter().zip(&weights).map(|(v, w)| v * w).collect();
    Ok(transpose_apply(&scaled))
}

// x = P^T y, following the same recursion as the forward transform.
fn transpose_apply(y: &[f64]) -> Vec<f64> {
    let n = y.len();
    if n == 1 {
        return y.to_vec();
    }
    let half = n / 2;
    let tail = transpose_apply(&y[half..]);
    let mut x = vec![0.0; n];
    for j in 0..half {
        x[j] = y[j] + tail[j];
        x[j + half] = tail[j] - y[j];
    }
    x
}
