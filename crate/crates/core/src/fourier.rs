//! Unitary discrete Fourier transform over `Z/L`.
//!
//! Lengths up to [`DENSE_LIMIT`] use a direct transform against a
//! precomputed twiddle table; longer inputs go through `rustfft`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

pub const DENSE_LIMIT: usize = 4096;

enum Kernel {
    Dense(Vec<Complex64>),
    Fast {
        forward: Arc<dyn Fft<f64>>,
        inverse: Arc<dyn Fft<f64>>,
    },
}

/// Forward convention: `F(v)_w = L^{-1/2} sum_x v_x exp(-2 pi i w x / L)`.
pub struct Dft {
    len: usize,
    kernel: Kernel,
}

impl Dft {
    pub fn new(len: usize) -> Self {
        Self::with_limit(len, DENSE_LIMIT)
    }

    /// Chooses the dense kernel iff `len <= limit`.
    pub fn with_limit(len: usize, limit: usize) -> Self {
        let kernel = if len <= limit {
            Kernel::Dense(
                (0..len)
                    .map(|s| Complex64::from_polar(1.0, -2.0 * PI * s as f64 / len as f64))
                    .collect(),
            )
        } else {
            let mut planner = FftPlanner::new();
            Kernel::Fast {
                forward: planner.plan_fft_forward(len),
                inverse: planner.plan_fft_inverse(len),
            }
        };
        Self { len, kernel }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn forward(&self, v: &[Complex64]) -> Vec<Complex64> {
        self.transform(v, false)
    }

    pub fn inverse(&self, v: &[Complex64]) -> Vec<Complex64> {
        self.transform(v, true)
    }

    fn transform(&self, v: &[Complex64], inverse: bool) -> Vec<Complex64> {
        assert_eq!(v.len(), self.len, "DFT length mismatch");
        let norm = 1.0 / (self.len as f64).sqrt();
        match &self.kernel {
            Kernel::Dense(tw) => (0..self.len)
                .map(|w| {
                    let acc: Complex64 = v
                        .iter()
                        .enumerate()
                        .map(|(x, a)| {
                            let t = tw[(w * x) % self.len];
                            a * if inverse { t.conj() } else { t }
                        })
                        .sum();
                    acc * norm
                })
                .collect(),
            Kernel::Fast { forward, inverse: inv } => {
                let mut buf = v.to_vec();
                if inverse {
                    inv.process(&mut buf);
                } else {
                    forward.process(&mut buf);
                }
                buf.iter_mut().for_each(|a| *a *= norm);
                buf
            }
        }
    }
}
