//! Exact amplitudes in `Z[w] / 2^(h/2)`, `w = exp(i*pi/4)`.

use std::fmt;

use num_complex::Complex64;

use crate::counting::scale_by_sqrt2_power;

/// `(c0 + c1*w + c2*w^2 + c3*w^3) / 2^(half_power/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CyclotomicValue {
    pub coeffs: [i64; 4],
    pub half_power: u32,
}

impl CyclotomicValue {
    pub fn zero(half_power: u32) -> Self {
        CyclotomicValue {
            coeffs: [0; 4],
            half_power,
        }
    }

    /// Folds the tallies `N_k = #{y : phase(y) = k mod 8}` using `w^4 = -1`.
    pub fn from_phase_counts(counts: &[u64; 8], half_power: u32) -> Self {
        let mut coeffs = [0i64; 4];
        for (k, c) in coeffs.iter_mut().enumerate() {
            *c = counts[k] as i64 - counts[k + 4] as i64;
        }
        CyclotomicValue { coeffs, half_power }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs == [0; 4]
    }

    /// Lossy conversion.
    pub fn to_complex(&self) -> Complex64 {
        // w = (1 + i)/sqrt2, w^2 = i, w^3 = (-1 + i)/sqrt2
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let [c0, c1, c2, c3] = self.coeffs.map(|c| c as f64);
        let re = c0 + (c1 - c3) * s;
        let im = c2 + (c1 + c3) * s;
        Complex64::new(
            scale_by_sqrt2_power(re, self.half_power),
            scale_by_sqrt2_power(im, self.half_power),
        )
    }

    /// `|c0 + c1*w + c2*w^2 + c3*w^3|^2` as `(rational, sqrt2)` meaning
    /// `rational + sqrt2 * sqrt(2)`. The normalization `2^(-half_power)` is
    /// not applied.
    pub fn norm_sqr_numerator(&self) -> (i128, i128) {
        let [c0, c1, c2, c3] = self.coeffs.map(i128::from);
        (
            c0 * c0 + c1 * c1 + c2 * c2 + c3 * c3,
            c0 * c1 + c1 * c2 + c2 * c3 - c3 * c0,
        )
    }
}

impl fmt::Display for CyclotomicValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        f.write_str("(")?;
        let mut first = true;
        for (k, &c) in self.coeffs.iter().enumerate().filter(|(_, &c)| c != 0) {
            let sign = match (first, c < 0) {
                (true, true) => "-",
                (true, false) => "",
                (false, true) => " - ",
                (false, false) => " + ",
            };
            let mag = c.unsigned_abs();
            let power = ["", "w", "w^2", "w^3"][k];
            match (k, mag) {
                (0, _) => write!(f, "{sign}{mag}")?,
                (_, 1) => write!(f, "{sign}{power}")?,
                _ => write!(f, "{sign}{mag}{power}")?,
            }
            first = false;
        }
        write!(f, ")/2^({}/2)", self.half_power)
    }
}
