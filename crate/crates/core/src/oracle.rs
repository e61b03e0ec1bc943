//! Brute-force references: direct periodic convolution and the naive
//! matrix-product DPT. Kept in the library so the `verify` command can run
//! them against the fast paths on a user's machine.

use std::fmt;

use crate::error::{Error, Result};
use crate::paired_transform::dpt_matrix;

/// Exact rational factor `num/den`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Scale {
    pub num: i64,
    pub den: i64,
}

impl Scale {
    pub const ONE: Scale = Scale { num: 1, den: 1 };

    pub const fn recip(den: i64) -> Scale {
        Scale { num: 1, den }
    }

    pub fn as_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl fmt::Display for Scale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

/// Short mask with an explicit center tap.
///
/// Taps are listed in window order: `taps[j]` multiplies `f[n + j - center]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaskSpec {
    taps: Vec<i64>,
    center: usize,
    scale: Scale,
}

impl MaskSpec {
    pub fn new(taps: Vec<i64>, center: usize, scale: Scale) -> Result<Self> {
        if center >= taps.len() {
            return Err(Error::MaskCenter {
                center,
                taps: taps.len(),
            });
        }
        Ok(MaskSpec {
            taps,
            center,
            scale,
        })
    }

    pub fn taps(&self) -> &[i64] {
        &self.taps
    }

    pub fn center(&self) -> usize {
        self.center
    }

    pub fn scale(&self) -> Scale {
        self.scale
    }
}

/// `out[n] = scale * sum_j taps[j] * f[(n + j - center) mod N]`.
pub fn direct_convolution(f: &[f64], mask: &MaskSpec) -> Result<Vec<f64>> {
    let len = f.len();
    if mask.taps.len() > len {
        return Err(Error::MaskTooLong {
            taps: mask.taps.len(),
            len,
        });
    }
    let n_i = len as isize;
    let center = mask.center as isize;
    let scale = mask.scale.as_f64();
    Ok((0..n_i)
        .map(|n| {
            let acc: f64 = mask
                .taps
                .iter()
                .enumerate()
                .map(|(j, &t)| t as f64 * f[(n + j as isize - center).rem_euclid(n_i) as usize])
                .sum();
            acc * scale
        })
        .collect())
}

/// DPT by explicit multiplication with [`dpt_matrix`].
pub fn dpt_naive(x: &[f64]) -> Result<Vec<f64>> {
    Ok(dpt_matrix(x.len())?.apply(x))
}
