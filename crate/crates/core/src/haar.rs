//! Haar basis matrices and the discrete wavelet transform.
//!
//! A basis of dimension `2^n` is built by the recurrence
//!
//! ```text
//! H(n) = ( H(n-1) ⊗ (1, 1)ᵀ  |  I(n-1) ⊗ (1, -1)ᵀ ),   H(0) = (1)
//! ```
//!
//! where `⊗` is the Kronecker product. Columns are mutually orthogonal, so the
//! inverse is obtained analytically as `diag(1/‖col‖²) · Hᵀ` instead of a
//! general matrix inversion. The forward transform `w = H⁻¹x` is lossless:
//! `x = Hw` recovers the series exactly.
//!
//! The first coefficient is the global mean of the series; later columns are
//! difference wavelets at successively finer resolutions, so the coefficients
//! capture frequency and position at the same time.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};

/// Largest supported exponent: dense bases are capped at 2^16 x 2^16.
pub const MAX_EXPONENT: usize = 16;

/// Haar basis matrix of dimension `2^n`, with its analytically derived inverse.
#[derive(Debug, Clone)]
pub struct HaarBasis {
    n: usize,
    dim: usize,
    /// Row-major `dim x dim`; entries are exactly -1, 0 or 1.
    h: Vec<f64>,
    /// Row-major `dim x dim`; row j equals column j of `h` scaled by `1/col_sq_norms[j]`.
    h_inv: Vec<f64>,
    /// Squared Euclidean norm of each column of `h`.
    col_sq_norms: Vec<u64>,
}

/// A real-valued series zero-padded to a power-of-two length.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub values: Vec<f64>,
    /// Length before zero-padding; entries at or past this index are zero.
    pub original_len: usize,
}

/// Wavelet coefficients of a series, same dimension as its basis.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletVector {
    pub coeffs: Vec<f64>,
}

impl HaarBasis {
    fn build(n: usize) -> Result<HaarBasis> {
        if n > MAX_EXPONENT {
            return Err(Error::DimensionTooLarge(n));
        }
        let dim = 1usize << n;
        let mut h = vec![1.0f64];
        for k in 1..=n {
            let prev_dim = 1usize << (k - 1);
            let cur_dim = 1usize << k;
            let mut next = vec![0.0f64; cur_dim * cur_dim];
            for r in 0..cur_dim {
                // Left half: each row of H(k-1) duplicated.
                for c in 0..prev_dim {
                    next[r * cur_dim + c] = h[(r / 2) * prev_dim + c];
                }
                // Right half: identity columns expanded to (1, -1) pairs.
                let c = prev_dim + r / 2;
                next[r * cur_dim + c] = if r % 2 == 0 { 1.0 } else { -1.0 };
            }
            h = next;
        }

        let mut col_sq_norms = vec![0u64; dim];
        for c in 0..dim {
            let mut s = 0u64;
            for r in 0..dim {
                let v = h[r * dim + c];
                s += (v * v) as u64;
            }
            col_sq_norms[c] = s;
        }

        let mut h_inv = vec![0.0f64; dim * dim];
        for j in 0..dim {
            let inv_norm = 1.0 / col_sq_norms[j] as f64;
            for i in 0..dim {
                h_inv[j * dim + i] = h[i * dim + j] * inv_norm;
            }
        }

        Ok(HaarBasis {
            n,
            dim,
            h,
            h_inv,
            col_sq_norms,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Dimension `2^n`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Entry `H[r][c]`.
    pub fn h(&self, r: usize, c: usize) -> f64 {
        self.h[r * self.dim + c]
    }

    /// Entry `H⁻¹[r][c]`.
    pub fn h_inv(&self, r: usize, c: usize) -> f64 {
        self.h_inv[r * self.dim + c]
    }

    pub fn col_sq_norms(&self) -> &[u64] {
        &self.col_sq_norms
    }

    /// Forward transform `w = H⁻¹x`.
    ///
    /// Zero entries of `x` are skipped, so the cost is proportional to the
    /// number of nonzeros times the dimension — binarized traces are sparse.
    pub fn dwt(&self, x: &TimeSeries) -> Result<WaveletVector> {
        if x.values.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.values.len(),
            });
        }
        let mut coeffs = vec![0.0f64; self.dim];
        for (p, &v) in x.values.iter().enumerate() {
            if v == 0.0 {
                continue;
            }
            // Add v times column p of H⁻¹, i.e. row p of H scaled per-row.
            for j in 0..self.dim {
                coeffs[j] += v * self.h_inv[j * self.dim + p];
            }
        }
        Ok(WaveletVector { coeffs })
    }

    /// Inverse transform `x = Hw`.
    pub fn idwt(&self, w: &WaveletVector) -> Result<TimeSeries> {
        if w.coeffs.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: w.coeffs.len(),
            });
        }
        let mut values = vec![0.0f64; self.dim];
        for (j, &c) in w.coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            for r in 0..self.dim {
                values[r] += c * self.h[r * self.dim + j];
            }
        }
        Ok(TimeSeries {
            original_len: values.len(),
            values,
        })
    }
}

/// Memoized basis lookup; bases are immutable and shared.
pub fn basis(n: usize) -> Result<Arc<HaarBasis>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<HaarBasis>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("basis cache poisoned");
    if let Some(b) = guard.get(&n) {
        return Ok(Arc::clone(b));
    }
    let built = Arc::new(HaarBasis::build(n)?);
    guard.insert(n, Arc::clone(&built));
    Ok(built)
}

/// Smallest exponent `n` with `2^n >= len`.
pub fn next_pow2_exp(len: usize) -> usize {
    let mut n = 0;
    while (1usize << n) < len {
        n += 1;
    }
    n
}

/// Zero-pad a raw series to the next power-of-two length.
pub fn pad_pow2(raw: &[f64]) -> Result<TimeSeries> {
    if raw.is_empty() {
        return Err(Error::EmptySeries);
    }
    let n = next_pow2_exp(raw.len());
    if n > MAX_EXPONENT {
        return Err(Error::DimensionTooLarge(n));
    }
    let mut values = raw.to_vec();
    values.resize(1 << n, 0.0);
    Ok(TimeSeries {
        values,
        original_len: raw.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ts(values: &[f64]) -> TimeSeries {
        TimeSeries {
            values: values.to_vec(),
            original_len: values.len(),
        }
    }

    #[test]
    fn h1_matches_display() {
        let b = basis(1).unwrap();
        let expected = [[1.0, 1.0], [1.0, -1.0]];
        for r in 0..2 {
            for c in 0..2 {
                assert_eq!(b.h(r, c), expected[r][c]);
            }
        }
    }

    #[test]
    fn h2_matches_display() {
        let b = basis(2).unwrap();
        let expected = [
            [1.0, 1.0, 1.0, 0.0],
            [1.0, 1.0, -1.0, 0.0],
            [1.0, -1.0, 0.0, 1.0],
            [1.0, -1.0, 0.0, -1.0],
        ];
        for r in 0..4 {
            for c in 0..4 {
                assert_eq!(b.h(r, c), expected[r][c]);
            }
        }
    }

    #[test]
    fn h2_inverse_matches_display() {
        let b = basis(2).unwrap();
        let expected = [
            [0.25, 0.25, 0.25, 0.25],
            [0.25, 0.25, -0.25, -0.25],
            [0.5, -0.5, 0.0, 0.0],
            [0.0, 0.0, 0.5, -0.5],
        ];
        for r in 0..4 {
            for c in 0..4 {
                assert_eq!(b.h_inv(r, c), expected[r][c]);
            }
        }
        assert_eq!(b.col_sq_norms(), &[4, 4, 2, 2]);
    }

    #[test]
    fn dwt_worked_example() {
        let b = basis(2).unwrap();
        let w = b.dwt(&ts(&[3.0, 5.0, 9.0, 1.0])).unwrap();
        assert_eq!(w.coeffs, vec![4.5, -0.5, -1.0, 4.0]);
    }

    #[test]
    fn dwt_binary_example() {
        let b = basis(2).unwrap();
        let w = b.dwt(&ts(&[1.0, 0.0, 1.0, 1.0])).unwrap();
        assert_eq!(w.coeffs, vec![0.75, -0.25, 0.5, 0.0]);
    }

    #[test]
    fn dwt_zero_series() {
        let b = basis(2).unwrap();
        let w = b.dwt(&ts(&[0.0; 4])).unwrap();
        assert_eq!(w.coeffs, vec![0.0; 4]);
    }

    #[test]
    fn first_coefficient_is_global_mean() {
        let b = basis(3).unwrap();
        let x = [2.0, 4.0, 6.0, 8.0, 1.0, 3.0, 5.0, 7.0];
        let w = b.dwt(&ts(&x)).unwrap();
        let mean = x.iter().sum::<f64>() / x.len() as f64;
        assert_abs_diff_eq!(w.coeffs[0], mean, epsilon = 1e-12);
    }

    #[test]
    fn idwt_recovers_worked_example() {
        let b = basis(2).unwrap();
        let x = b
            .idwt(&WaveletVector {
                coeffs: vec![4.5, -0.5, -1.0, 4.0],
            })
            .unwrap();
        assert_eq!(x.values, vec![3.0, 5.0, 9.0, 1.0]);
    }

    #[test]
    fn idwt_unit_first_coefficient_is_constant_series() {
        let b = basis(3).unwrap();
        let mut coeffs = vec![0.0; 8];
        coeffs[0] = 1.0;
        let x = b.idwt(&WaveletVector { coeffs }).unwrap();
        assert_eq!(x.values, vec![1.0; 8]);
    }

    #[test]
    fn dimension_mismatch_errors() {
        let b = basis(2).unwrap();
        assert!(matches!(
            b.dwt(&ts(&[1.0, 2.0])),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            b.idwt(&WaveletVector { coeffs: vec![1.0] }),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn basis_cap_enforced() {
        assert!(matches!(
            HaarBasis::build(MAX_EXPONENT + 1),
            Err(Error::DimensionTooLarge(_))
        ));
    }

    #[test]
    fn pad_pow2_cases() {
        let t = pad_pow2(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(t.values, vec![1.0, 2.0, 3.0, 0.0]);
        assert_eq!(t.original_len, 3);

        let t = pad_pow2(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(t.values.len(), 4);
        assert_eq!(t.original_len, 4);

        let t = pad_pow2(&[1.0; 5]).unwrap();
        assert_eq!(t.values.len(), 8);
        assert_eq!(&t.values[5..], &[0.0, 0.0, 0.0]);

        assert!(matches!(pad_pow2(&[]), Err(Error::EmptySeries)));
    }

    #[test]
    fn identity_up_to_n10() {
        for n in 0..=10usize {
            let b = basis(n).unwrap();
            let dim = b.dim();
            for r in 0..dim {
                for c in 0..dim {
                    let mut acc = 0.0;
                    for k in 0..dim {
                        acc += b.h(r, k) * b.h_inv(k, c);
                    }
                    let expect = if r == c { 1.0 } else { 0.0 };
                    assert!(
                        (acc - expect).abs() < 1e-12,
                        "H*Hinv deviates at n={n} ({r},{c}): {acc}"
                    );
                }
            }
        }
    }

    #[test]
    fn difference_columns_sum_to_zero() {
        for n in 1..=8usize {
            let b = basis(n).unwrap();
            for c in 1..b.dim() {
                let s: f64 = (0..b.dim()).map(|r| b.h(r, c)).sum();
                assert_eq!(s, 0.0, "column {c} of H({n}) should sum to 0");
            }
        }
    }

    #[test]
    fn round_trip_random_binary_series() {
        // Independent round-trip oracle: 1,000 random binary series of
        // lengths 1..=256, padded, transformed and reconstructed.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let len = rng.random_range(1..=256usize);
            let raw: Vec<f64> = (0..len)
                .map(|_| if rng.random::<bool>() { 1.0 } else { 0.0 })
                .collect();
            let padded = pad_pow2(&raw).unwrap();
            let b = basis(next_pow2_exp(len)).unwrap();
            let w = b.dwt(&padded).unwrap();
            let back = b.idwt(&w).unwrap();
            for (a, e) in back.values.iter().zip(padded.values.iter()) {
                assert!((a - e).abs() < 1e-9);
            }
        }
    }

    proptest! {
        #[test]
        fn energy_is_preserved(values in proptest::collection::vec(-10.0f64..10.0, 1..200)) {
            let t = pad_pow2(&values).unwrap();
            let b = basis(next_pow2_exp(values.len())).unwrap();
            let w = b.dwt(&t).unwrap();
            let direct: f64 = t.values.iter().map(|v| v * v).sum();
            let via_coeffs: f64 = w
                .coeffs
                .iter()
                .zip(b.col_sq_norms())
                .map(|(c, &n)| n as f64 * c * c)
                .sum();
            let scale = direct.abs().max(1.0);
            prop_assert!((direct - via_coeffs).abs() / scale < 1e-9);
        }

        #[test]
        fn transform_is_bijective(coeffs in proptest::collection::vec(-5.0f64..5.0, 16)) {
            let b = basis(4).unwrap();
            let x = b.idwt(&WaveletVector { coeffs: coeffs.clone() }).unwrap();
            let back = b.dwt(&x).unwrap();
            for (a, e) in back.coeffs.iter().zip(coeffs.iter()) {
                prop_assert!((a - e).abs() < 1e-9);
            }
        }
    }
}
