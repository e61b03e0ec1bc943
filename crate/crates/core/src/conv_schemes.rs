//! Convolution schemes: lift a signal window into `2^k` amplitudes, apply the
//! paired transform, and read convolutions and gradients off the outputs.
//!
//! Every scheme is fixed data. A lift term `(offset, weight)` contributes
//! `weight * f[n + offset]` to one amplitude. Each output coefficient `c_k`
//! (a channel) equals an integer mask dotted with the window
//! `f[n-2] .. f[n+2]`; the channel's `scale` turns it into the normalized
//! operator (e.g. `c3 / 6` is the `[1 2 2 1]/6` smoothing).

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use crate::oracle::{direct_convolution, MaskSpec, Scale};
use crate::paired_transform::{dpt_forward, Signal};

/// Offsets covered by a channel mask, `-2..=2`.
pub const WINDOW_RADIUS: isize = 2;
pub const WINDOW_LEN: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SchemeId {
    /// Mask `[1 2 2 1]/6` with a 4-level gradient, 2 qubits.
    S4Smooth,
    /// Mask `[1 -2 1]/2` with `[1 2 1]/4` smoothing, 2 qubits.
    S3Laplace,
    /// 5-level Sobel, `[1 2 6 2 1]/12` and two 2-level gradients, 3 qubits.
    S8A,
    /// 5-level Sobel on two outputs, 3 qubits.
    S8B,
    /// Mask `[1 1 -4 1 1]`, three zero outputs, 3 qubits.
    S8C,
}

impl SchemeId {
    pub const ALL: [SchemeId; 5] = [
        SchemeId::S4Smooth,
        SchemeId::S3Laplace,
        SchemeId::S8A,
        SchemeId::S8B,
        SchemeId::S8C,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SchemeId::S4Smooth => "s4-smooth",
            SchemeId::S3Laplace => "s3-laplace",
            SchemeId::S8A => "s8-a",
            SchemeId::S8B => "s8-b",
            SchemeId::S8C => "s8-c",
        }
    }

    pub fn scheme(self) -> &'static ConvolutionScheme {
        let all = catalog();
        &all[self as usize]
    }
}

impl fmt::Display for SchemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown scheme `{0}` (expected one of s4-smooth, s3-laplace, s8-a, s8-b, s8-c)")]
pub struct UnknownScheme(pub String);

impl FromStr for SchemeId {
    type Err = UnknownScheme;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SchemeId::ALL
            .into_iter()
            .find(|id| id.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| UnknownScheme(s.to_owned()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelKind {
    /// Unit-gain smoothing mask (taps sum to the scale denominator).
    Convolution,
    /// Difference operator: vanishes on constant signals.
    Gradient,
    /// Identically zero for every signal.
    Zero,
    /// Any other combination, including mixed average/gradient terms.
    Auxiliary,
}

impl ChannelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ChannelKind::Convolution => "convolution",
            ChannelKind::Gradient => "gradient",
            ChannelKind::Zero => "zero",
            ChannelKind::Auxiliary => "auxiliary",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LiftTerm {
    pub offset: isize,
    pub weight: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChannelSpec {
    pub index: usize,
    pub name: &'static str,
    /// Integer weights on `f[n-2] .. f[n+2]`.
    pub mask: [i64; WINDOW_LEN],
    pub scale: Scale,
    pub kind: ChannelKind,
}

impl ChannelSpec {
    /// The channel's scaled mask as an oracle [`MaskSpec`] centered on `f[n]`.
    pub fn mask_spec(&self) -> MaskSpec {
        MaskSpec::new(self.mask.to_vec(), WINDOW_RADIUS as usize, self.scale)
            .expect("center 2 lies inside a 5-tap mask")
    }

    /// Mask with zero taps at both ends trimmed, e.g. `[1 2 (2) 1]`.
    pub fn mask_display(&self) -> String {
        let first = self.mask.iter().position(|&t| t != 0);
        let Some(first) = first else {
            return "[0]".to_owned();
        };
        let last = self.mask.iter().rposition(|&t| t != 0).unwrap();
        let lo = first.min(WINDOW_RADIUS as usize);
        let hi = last.max(WINDOW_RADIUS as usize);
        let taps: Vec<String> = (lo..=hi)
            .map(|j| {
                if j == WINDOW_RADIUS as usize {
                    format!("({})", self.mask[j])
                } else {
                    self.mask[j].to_string()
                }
            })
            .collect();
        format!("[{}]", taps.join(" "))
    }
}

/// Exact relation between channels that holds for every signal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Identity {
    /// `c_k(n) = 0`.
    Zero(usize),
    /// `c_a(n) = c_b(n)`.
    Equal(usize, usize),
    /// `c_a(n) = c_b(n + shift)`.
    Shifted { a: usize, b: usize, shift: isize },
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Identity::Zero(k) => write!(f, "c{k} = 0"),
            Identity::Equal(a, b) => write!(f, "c{a} = c{b}"),
            Identity::Shifted { a, b, shift } => write!(f, "c{a}(n) = c{b}(n{shift:+})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvolutionScheme {
    pub id: SchemeId,
    pub qubits: usize,
    pub lift: Vec<LiftTerm>,
    pub channels: Vec<ChannelSpec>,
    pub identities: Vec<Identity>,
}

impl ConvolutionScheme {
    pub fn len(&self) -> usize {
        1 << self.qubits
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn channel(&self, index: usize) -> &ChannelSpec {
        &self.channels[index]
    }

    /// Channels that can carry nonzero amplitude.
    pub fn nonzero_channels(&self) -> Vec<usize> {
        self.channels
            .iter()
            .filter(|c| c.kind != ChannelKind::Zero)
            .map(|c| c.index)
            .collect()
    }
}

/// The unnormalized lifted vector `y_n` and its length `A(n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedWindow {
    pub point: usize,
    pub amplitudes: Vec<f64>,
    pub norm: f64,
}

impl LiftedWindow {
    /// `amplitudes / norm`, or `None` for an all-zero window.
    pub fn normalized(&self) -> Option<Vec<f64>> {
        (self.norm > 0.0).then(|| self.amplitudes.iter().map(|a| a / self.norm).collect())
    }
}

/// Paired-transform coefficients `c_0 .. c_{2^k - 1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedSpectrum(Vec<f64>);

impl PairedSpectrum {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `sum_k c_k^2`.
    pub fn energy(&self) -> f64 {
        self.0.iter().map(|c| c * c).sum()
    }
}

impl std::ops::Index<usize> for PairedSpectrum {
    type Output = f64;
    fn index(&self, k: usize) -> &f64 {
        &self.0[k]
    }
}

pub fn lift_window(scheme: &ConvolutionScheme, f: &Signal, n: usize) -> LiftedWindow {
    let n_i = n as isize;
    let amplitudes: Vec<f64> = scheme
        .lift
        .iter()
        .map(|t| t.weight as f64 * f.at(n_i + t.offset))
        .collect();
    let norm = amplitudes.iter().map(|a| a * a).sum::<f64>().sqrt();
    LiftedWindow {
        point: n,
        amplitudes,
        norm,
    }
}

pub fn analyze_point(scheme: &ConvolutionScheme, f: &Signal, n: usize) -> PairedSpectrum {
    let lifted = lift_window(scheme, f, n);
    PairedSpectrum(dpt_forward(&lifted.amplitudes).expect("lift length is a power of two"))
}

/// One output sequence per channel: `out[k][n] = analyze_point(.., n)[k]`.
pub fn analyze_signal(scheme: &ConvolutionScheme, f: &Signal) -> Vec<Vec<f64>> {
    let mut out = vec![Vec::with_capacity(f.len()); scheme.len()];
    for n in 0..f.len() {
        let c = analyze_point(scheme, f, n);
        for (channel, v) in out.iter_mut().zip(c.as_slice()) {
            channel.push(*v);
        }
    }
    out
}

/// First point where a channel disagrees with its oracle.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{scheme} channel c{channel} at n = {n}: got {got}, oracle {expected}")]
pub struct ChannelMismatch {
    pub scheme: SchemeId,
    pub channel: usize,
    pub n: usize,
    pub got: f64,
    pub expected: f64,
}

pub const ORACLE_TOLERANCE: f64 = 1e-12;

/// Checks every channel (scaled) against a direct periodic convolution with
/// its mask, and every zero-kind channel against 0.
pub fn channel_oracle_check(scheme: &ConvolutionScheme, f: &Signal) -> Result<(), ChannelMismatch> {
    let outputs = analyze_signal(scheme, f);
    // Whole periods leave a periodic convolution unchanged; tile short
    // signals so a 5-tap mask fits.
    let periods = WINDOW_LEN.div_ceil(f.len());
    let tiled = f.values().repeat(periods);
    for spec in &scheme.channels {
        let scale = spec.scale.as_f64();
        let expected =
            direct_convolution(&tiled, &spec.mask_spec()).expect("tiled signal covers the window");
        for (n, (&c, &e)) in outputs[spec.index].iter().zip(&expected).enumerate() {
            let got = c * scale;
            let zero_violation = spec.kind == ChannelKind::Zero && c != 0.0;
            if zero_violation || (got - e).abs() > ORACLE_TOLERANCE {
                return Err(ChannelMismatch {
                    scheme: scheme.id,
                    channel: spec.index,
                    n,
                    got,
                    expected: if zero_violation { 0.0 } else { e },
                });
            }
        }
    }
    Ok(())
}

/// A scheme identity that failed on a signal.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{scheme}: identity `{identity}` fails at n = {n}")]
pub struct IdentityViolation {
    pub scheme: SchemeId,
    pub identity: Identity,
    pub n: usize,
}

/// Checks the scheme's exact channel identities on `f` (no tolerance).
pub fn check_identities(scheme: &ConvolutionScheme, f: &Signal) -> Result<(), IdentityViolation> {
    let out = analyze_signal(scheme, f);
    let len = f.len() as isize;
    for &identity in &scheme.identities {
        for n in 0..f.len() {
            let holds = match identity {
                Identity::Zero(k) => out[k][n] == 0.0,
                Identity::Equal(a, b) => out[a][n] == out[b][n],
                Identity::Shifted { a, b, shift } => {
                    out[a][n] == out[b][(n as isize + shift).rem_euclid(len) as usize]
                }
            };
            if !holds {
                return Err(IdentityViolation {
                    scheme: scheme.id,
                    identity,
                    n,
                });
            }
        }
    }
    Ok(())
}

fn lift(terms: &[(isize, i64)]) -> Vec<LiftTerm> {
    terms
        .iter()
        .map(|&(offset, weight)| LiftTerm { offset, weight })
        .collect()
}

fn ch(
    index: usize,
    name: &'static str,
    mask: [i64; WINDOW_LEN],
    den: i64,
    kind: ChannelKind,
) -> ChannelSpec {
    ChannelSpec {
        index,
        name,
        mask,
        scale: Scale::recip(den),
        kind,
    }
}

fn catalog() -> &'static [ConvolutionScheme; 5] {
    use ChannelKind::*;
    static CATALOG: OnceLock<[ConvolutionScheme; 5]> = OnceLock::new();
    CATALOG.get_or_init(|| {
        [
            ConvolutionScheme {
                id: SchemeId::S4Smooth,
                qubits: 2,
                lift: lift(&[(-2, 1), (-1, 2), (0, 2), (1, 1)]),
                channels: vec![
                    ch(0, "f(n-2) - 2f(n)", [1, 0, -2, 0, 0], 1, Auxiliary),
                    ch(1, "2f(n-1) - f(n+1)", [0, 2, 0, -1, 0], 1, Auxiliary),
                    ch(2, "4-level gradient", [1, -2, 2, -1, 0], 3, Gradient),
                    ch(3, "smoothing [1 2 2 1]/6", [1, 2, 2, 1, 0], 6, Convolution),
                ],
                identities: vec![],
            },
            ConvolutionScheme {
                id: SchemeId::S3Laplace,
                qubits: 2,
                lift: lift(&[(-1, 1), (0, -1), (1, 1), (0, -1)]),
                channels: vec![
                    ch(0, "central difference", [0, 1, 0, -1, 0], 1, Auxiliary),
                    ch(1, "zero", [0; 5], 1, Zero),
                    ch(2, "smoothing [1 2 1]/4", [0, 1, 2, 1, 0], 4, Convolution),
                    ch(3, "gradient [1 -2 1]/2", [0, 1, -2, 1, 0], 2, Gradient),
                ],
                identities: vec![Identity::Zero(1)],
            },
            ConvolutionScheme {
                id: SchemeId::S8A,
                qubits: 3,
                lift: lift(&[
                    (-2, 1),
                    (0, -1),
                    (-1, 2),
                    (0, -2),
                    (0, 2),
                    (1, -2),
                    (0, 1),
                    (2, -1),
                ]),
                channels: vec![
                    ch(0, "f(n-2) - 2f(n)", [1, 0, -2, 0, 0], 1, Auxiliary),
                    ch(1, "2f(n+1) - f(n)", [0, 0, -1, 2, 0], 1, Auxiliary),
                    ch(2, "2f(n-1) - f(n)", [0, 2, -1, 0, 0], 1, Auxiliary),
                    ch(3, "f(n+2) - 2f(n)", [0, 0, -2, 0, 1], 1, Auxiliary),
                    ch(4, "2-level gradient at n-1", [1, -2, 1, 0, 0], 2, Gradient),
                    ch(5, "2-level gradient at n+1", [0, 0, 1, -2, 1], 2, Gradient),
                    ch(
                        6,
                        "smoothing [1 2 6 2 1]/12",
                        [1, 2, 6, 2, 1],
                        12,
                        Convolution,
                    ),
                    ch(7, "5-level Sobel gradient", [1, 2, 0, -2, -1], 3, Gradient),
                ],
                identities: vec![],
            },
            ConvolutionScheme {
                id: SchemeId::S8B,
                qubits: 3,
                lift: lift(&[
                    (-2, 1),
                    (0, -1),
                    (-1, 2),
                    (0, -2),
                    (1, -2),
                    (0, 2),
                    (2, -1),
                    (0, 1),
                ]),
                channels: vec![
                    ch(0, "f(n-2) + 2f(n+1)", [1, 0, 0, 2, 0], 1, Auxiliary),
                    ch(1, "-3f(n)", [0, 0, -3, 0, 0], 1, Auxiliary),
                    ch(2, "2f(n-1) + f(n+2)", [0, 2, 0, 0, 1], 1, Auxiliary),
                    ch(3, "-3f(n)", [0, 0, -3, 0, 0], 1, Auxiliary),
                    ch(4, "average and gradient", [1, -2, 0, -2, 1], 2, Auxiliary),
                    ch(5, "2f(n)", [0, 0, 2, 0, 0], 1, Auxiliary),
                    ch(6, "5-level Sobel gradient", [1, 2, 0, -2, -1], 3, Gradient),
                    ch(7, "5-level Sobel gradient", [1, 2, 0, -2, -1], 3, Gradient),
                ],
                identities: vec![Identity::Equal(6, 7), Identity::Equal(1, 3)],
            },
            ConvolutionScheme {
                id: SchemeId::S8C,
                qubits: 3,
                lift: lift(&[
                    (-2, 1),
                    (0, -1),
                    (-1, 1),
                    (0, -1),
                    (1, 1),
                    (0, -1),
                    (2, 1),
                    (0, -1),
                ]),
                channels: vec![
                    ch(0, "f(n-2) - f(n+1)", [1, 0, 0, -1, 0], 1, Gradient),
                    ch(1, "zero", [0; 5], 1, Zero),
                    ch(2, "f(n-1) - f(n+2)", [0, 1, 0, 0, -1], 1, Gradient),
                    ch(3, "zero", [0; 5], 1, Zero),
                    ch(
                        4,
                        "gradient [1 -1 0 1 -1]/2",
                        [1, -1, 0, 1, -1],
                        2,
                        Gradient,
                    ),
                    ch(5, "zero", [0; 5], 1, Zero),
                    ch(
                        6,
                        "smoothing [1 1 4 1 1]/8",
                        [1, 1, 4, 1, 1],
                        8,
                        Convolution,
                    ),
                    ch(7, "gradient [1 1 -4 1 1]/2", [1, 1, -4, 1, 1], 2, Gradient),
                ],
                identities: vec![
                    Identity::Zero(1),
                    Identity::Zero(3),
                    Identity::Zero(5),
                    Identity::Shifted {
                        a: 2,
                        b: 0,
                        shift: 1,
                    },
                ],
            },
        ]
    })
}
