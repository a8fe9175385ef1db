//! Radix-2 discrete Fourier transform used for the register QFT.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::scalar::Real;

/// `Forward` maps `|j>` to `M^{-1/2} sum_k e^{+2 pi i jk/M} |k>`; `Inverse`
/// uses the opposite sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QftDirection {
    #[default]
    Forward,
    Inverse,
}

impl QftDirection {
    fn sign<T: Real>(self) -> T {
        match self {
            Self::Forward => T::one(),
            Self::Inverse => -T::one(),
        }
    }
}

/// Unitary DFT of a power-of-two-length buffer, in place. Summation order is
/// fixed, so results are reproducible bit for bit.
pub fn dft_in_place<T: Real>(buf: &mut [Complex<T>], direction: QftDirection) {
    let n = buf.len();
    assert!(n.is_power_of_two(), "DFT length must be a power of two");
    if n == 1 {
        return;
    }
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if i < j {
            buf.swap(i, j);
        }
    }
    let two_pi = T::PI() + T::PI();
    let sign = direction.sign::<T>();
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let twiddles: Vec<Complex<T>> = (0..half)
            .map(|t| {
                let angle = sign * two_pi * T::lit(t as f64) / T::lit(len as f64);
                Complex::new(angle.cos(), angle.sin())
            })
            .collect();
        for start in (0..n).step_by(len) {
            for t in 0..half {
                let u = buf[start + t];
                let v = buf[start + t + half] * twiddles[t];
                buf[start + t] = u + v;
                buf[start + t + half] = u - v;
            }
        }
        len *= 2;
    }
    let scale = T::one() / T::lit(n as f64).sqrt();
    for z in buf.iter_mut() {
        *z = *z * scale;
    }
}
