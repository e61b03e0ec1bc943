//! Row-wise application of convolution schemes to grayscale images.
//!
//! Every row is an independent periodic signal. Rows run in parallel; the
//! randomized measurement image draws from a per-row ChaCha stream
//! (`seed`, stream = row index), so the output depends only on the input and
//! the seed, never on scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::conv_schemes::{analyze_signal, ConvolutionScheme, SchemeId};
use crate::error::{Error, Result};
use crate::paired_transform::Signal;

/// Row-major grayscale image with real-valued pixels.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<f64>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize) -> Self {
        GrayImage {
            width,
            height,
            pixels: vec![0.0; width * height],
        }
    }

    pub fn from_pixels(width: usize, height: usize, pixels: Vec<f64>) -> Result<Self> {
        if pixels.len() != width * height {
            return Err(Error::PixelCount {
                expected: width * height,
                got: pixels.len(),
            });
        }
        Ok(GrayImage {
            width,
            height,
            pixels,
        })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        GrayImage {
            width,
            height,
            pixels,
        }
    }

    fn from_rows(width: usize, rows: Vec<Vec<f64>>) -> Self {
        let height = rows.len();
        let pixels: Vec<f64> = rows.into_iter().flatten().collect();
        debug_assert_eq!(pixels.len(), width * height);
        GrayImage {
            width,
            height,
            pixels,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.pixels[y * self.width + x]
    }

    pub fn row(&self, y: usize) -> &[f64] {
        &self.pixels[y * self.width..(y + 1) * self.width]
    }

    /// `(min, max)` over all pixels; `(0, 0)` for an empty image.
    pub fn range(&self) -> (f64, f64) {
        if self.pixels.is_empty() {
            return (0.0, 0.0);
        }
        self.pixels
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            })
    }
}

/// What to do with rows whose width is not a power of two (at least 4).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WidthPolicy {
    #[default]
    Reject,
    /// Zero-pad on the right, process, then crop back.
    Pad,
}

fn padded_width(width: usize, policy: WidthPolicy) -> Result<usize> {
    let ok = width >= Signal::MIN_LEN && width.is_power_of_two();
    match (ok, policy) {
        (true, _) => Ok(width),
        (false, WidthPolicy::Pad) if width > 0 => {
            Ok(width.next_power_of_two().max(Signal::MIN_LEN))
        }
        _ => Err(Error::WidthNotPowerOfTwo(width)),
    }
}

fn row_signal(img: &GrayImage, y: usize, padded: usize) -> Signal {
    let mut values = img.row(y).to_vec();
    values.resize(padded, 0.0);
    Signal::new(values).expect("padded width is an admissible signal length")
}

/// Per-channel images produced by [`process_rows`].
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelImageSet {
    pub scheme: SchemeId,
    /// Indexed by channel number.
    pub images: Vec<GrayImage>,
}

impl ChannelImageSet {
    pub fn channel(&self, k: usize) -> &GrayImage {
        &self.images[k]
    }

    /// `(min, max)` of channel `k`, as used by the affine display.
    pub fn range(&self, k: usize) -> (f64, f64) {
        self.images[k].range()
    }

    pub fn display(&self, k: usize, policy: DisplayPolicy) -> GrayImage {
        to_display(&self.images[k], policy)
    }
}

/// Row `y` of channel image `k` is channel `k` of [`analyze_signal`] on row `y`.
/// Values are raw paired-transform coefficients (no channel scale applied).
pub fn process_rows(
    img: &GrayImage,
    scheme: &ConvolutionScheme,
    policy: WidthPolicy,
) -> Result<ChannelImageSet> {
    let padded = padded_width(img.width, policy)?;
    let width = img.width;
    let per_row: Vec<Vec<Vec<f64>>> = (0..img.height)
        .into_par_iter()
        .map(|y| {
            let mut channels = analyze_signal(scheme, &row_signal(img, y, padded));
            for c in &mut channels {
                c.truncate(width);
            }
            channels
        })
        .collect();

    let mut rows_by_channel: Vec<Vec<Vec<f64>>> =
        vec![Vec::with_capacity(img.height); scheme.len()];
    for channels in per_row {
        for (dst, row) in rows_by_channel.iter_mut().zip(channels) {
            dst.push(row);
        }
    }
    Ok(ChannelImageSet {
        scheme: scheme.id,
        images: rows_by_channel
            .into_iter()
            .map(|rows| GrayImage::from_rows(width, rows))
            .collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DisplayPolicy {
    /// `[min, max]` onto `[0, 255]`.
    #[default]
    Affine,
    /// `|v|` with `max |v|` onto 255.
    Abs,
}

/// Maps a real image to 8-bit intensities. Rounding is half away from zero;
/// an image with a degenerate range maps to all zeros.
pub fn to_display(img: &GrayImage, policy: DisplayPolicy) -> GrayImage {
    let map: Box<dyn Fn(f64) -> f64 + Sync> = match policy {
        DisplayPolicy::Affine => {
            let (lo, hi) = img.range();
            if hi > lo {
                let k = 255.0 / (hi - lo);
                Box::new(move |v| ((v - lo) * k).round())
            } else {
                Box::new(|_| 0.0)
            }
        }
        DisplayPolicy::Abs => {
            let peak = img.pixels.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if peak > 0.0 {
                let k = 255.0 / peak;
                Box::new(move |v| (v.abs() * k).round())
            } else {
                Box::new(|_| 0.0)
            }
        }
    };
    GrayImage {
        width: img.width,
        height: img.height,
        pixels: img.pixels.iter().map(|&v| map(v)).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Selection {
    /// Channel `k` with probability `c_k^2 / sum c^2`.
    #[default]
    Weighted,
    /// Any nonzero-kind channel with equal probability.
    Uniform,
}

/// Draws one channel index from `candidates` for a pixel with coefficients
/// `spectrum`. Weighted selection of an all-zero spectrum yields `None`.
pub fn select_channel<R: Rng + ?Sized>(
    spectrum: &[f64],
    candidates: &[usize],
    mode: Selection,
    rng: &mut R,
) -> Option<usize> {
    if candidates.is_empty() {
        return None;
    }
    match mode {
        Selection::Uniform => Some(candidates[rng.random_range(0..candidates.len())]),
        Selection::Weighted => {
            let total: f64 = candidates.iter().map(|&k| spectrum[k] * spectrum[k]).sum();
            if total == 0.0 {
                return None;
            }
            let u = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut last = None;
            for &k in candidates {
                let w = spectrum[k] * spectrum[k];
                if w == 0.0 {
                    continue;
                }
                acc += w;
                last = Some(k);
                if u < acc {
                    return last;
                }
            }
            last
        }
    }
}

/// Per-row generator for the measurement simulation.
pub fn row_rng(seed: u64, row: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(row as u64);
    rng
}

/// Simulated measurement image: every pixel emits `|c_k(n)|` for one channel
/// `k` drawn among the scheme's nonzero-kind channels. Output is raw (not
/// display-normalized).
pub fn simulate_measured_image(
    img: &GrayImage,
    scheme: &ConvolutionScheme,
    mode: Selection,
    seed: u64,
    policy: WidthPolicy,
) -> Result<GrayImage> {
    let padded = padded_width(img.width, policy)?;
    let candidates = scheme.nonzero_channels();
    let width = img.width;
    let rows: Vec<Vec<f64>> = (0..img.height)
        .into_par_iter()
        .map(|y| {
            let channels = analyze_signal(scheme, &row_signal(img, y, padded));
            let mut rng = row_rng(seed, y);
            let mut spectrum = vec![0.0; channels.len()];
            (0..width)
                .map(|n| {
                    for (s, c) in spectrum.iter_mut().zip(&channels) {
                        *s = c[n];
                    }
                    select_channel(&spectrum, &candidates, mode, &mut rng)
                        .map_or(0.0, |k| spectrum[k].abs())
                })
                .collect()
        })
        .collect();
    Ok(GrayImage::from_rows(width, rows))
}
