//! Short-length convolutions and edge gradients computed through the discrete
//! paired transform (DPT).
//!
//! Each convolution scheme lifts a small window of a periodic signal into a
//! 4- or 8-amplitude vector. One pass of the paired transform over that vector
//! yields a convolution together with several gradients, one per output
//! coefficient ("channel"). The same computation is available at gate level:
//! [`qsim`] simulates the quantum paired transform circuits on state vectors
//! and samples measurements from them.
//!
//! ```
//! use pairedconv::conv_schemes::{analyze_point, SchemeId};
//! use pairedconv::paired_transform::Signal;
//!
//! let f = Signal::new(vec![1.0, 2.0, 3.0, 4.0]).unwrap();
//! let spectrum = analyze_point(SchemeId::S4Smooth.scheme(), &f, 2);
//! // c3 / 6 is the [1 2 2 1]/6 smoothing at n = 2
//! assert_eq!(spectrum[3] / 6.0, 2.5);
//! ```

pub mod conv_schemes;
pub mod error;
pub mod image_pipeline;
pub mod instrument;
pub mod oracle;
pub mod paired_transform;
pub mod pgm;
pub mod qsim;

pub use error::{Error, Result};
