//! Type-I cosine and sine transforms on collocated grids, built on a complex FFT of the
//! reflected sequence (length `2(N-1)`).

use rustfft::num_complex::Complex;

use super::{GridField, Parity, SpectralField};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// In-place raw transform of every row of an `rows x n` block.
///
/// `Even`: `out_k = Σ''_j f_j cos(π j k / m)` (endpoints halved), `k = 0..=m`.
/// `Odd`:  `out_k = Σ_j f_j sin(π j k / m)` over interior `j`, zero at `k = 0, m`.
pub(crate) fn transform_rows<T: Real>(data: &mut [T], n: usize, parity: Parity) {
    let m = n - 1;
    let len = 2 * m;
    let plan = T::fft_plan(len);
    let mut buf = vec![Complex::new(T::zero(), T::zero()); len];
    let mut scratch = vec![Complex::new(T::zero(), T::zero()); plan.scratch_len()];
    let half = T::lit(0.5);
    let rows = data.len() / n;
    let mut r = 0;
    while r < rows {
        let paired = r + 1 < rows;
        {
            let a = &data[r * n..(r + 1) * n];
            let b = if paired { Some(&data[(r + 1) * n..(r + 2) * n]) } else { None };
            let value = |j: usize| Complex::new(a[j], b.map_or(T::zero(), |b| b[j]));
            match parity {
                Parity::Even => {
                    for j in 0..=m {
                        buf[j] = value(j);
                    }
                    for j in 1..m {
                        buf[len - j] = buf[j];
                    }
                }
                Parity::Odd => {
                    buf[0] = Complex::new(T::zero(), T::zero());
                    buf[m] = buf[0];
                    for j in 1..m {
                        let v = value(j);
                        buf[j] = v;
                        buf[len - j] = -v;
                    }
                }
            }
        }
        plan.forward_with_scratch(&mut buf, &mut scratch);
        match parity {
            Parity::Even => {
                for k in 0..=m {
                    data[r * n + k] = buf[k].re * half;
                    if paired {
                        data[(r + 1) * n + k] = buf[k].im * half;
                    }
                }
            }
            Parity::Odd => {
                data[r * n] = T::zero();
                data[r * n + m] = T::zero();
                for k in 1..m {
                    data[r * n + k] = -buf[k].im * half;
                }
                if paired {
                    data[(r + 1) * n] = T::zero();
                    data[(r + 1) * n + m] = T::zero();
                    for k in 1..m {
                        data[(r + 1) * n + k] = buf[k].re * half;
                    }
                }
            }
        }
        r += if paired { 2 } else { 1 };
    }
}

pub(crate) fn transpose<T: Copy>(data: &[T], n: usize) -> Vec<T> {
    const TILE: usize = 32;
    let mut out = data.to_vec();
    for ib in (0..n).step_by(TILE) {
        for jb in (0..n).step_by(TILE) {
            for i in ib..(ib + TILE).min(n) {
                for j in jb..(jb + TILE).min(n) {
                    out[j * n + i] = data[i * n + j];
                }
            }
        }
    }
    out
}

/// Raw separable transform along both axes.
pub(crate) fn transform_2d<T: Real>(values: &[T], n: usize, parity: [Parity; 2]) -> Vec<T> {
    let mut work = values.to_vec();
    transform_rows(&mut work, n, parity[1]);
    let mut cols = transpose(&work, n);
    transform_rows(&mut cols, n, parity[0]);
    transpose(&cols, n)
}

/// Normalisation of the 1D orthonormal mode `k` at lattice sites, as a multiple of the
/// raw trigonometric function.
fn mode_amplitude(parity: Parity, k: usize, side: f64) -> f64 {
    match (parity, k) {
        (Parity::Even, 0) => (1.0 / side).sqrt(),
        _ => (2.0 / side).sqrt(),
    }
}

fn axis_scales(n: usize, parity: Parity, side: f64, forward: bool) -> Vec<f64> {
    let m = n - 1;
    let h = side / m as f64;
    (0..n)
        .map(|k| {
            if !parity.carries(k, m) {
                return 0.0;
            }
            let amp = mode_amplitude(parity, k, side);
            let endpoint = parity == Parity::Even && (k == 0 || k == m);
            if forward {
                let norm = if parity == Parity::Even && k == m { 2.0 } else { 1.0 };
                h * amp / norm
            } else if endpoint {
                2.0 * amp
            } else {
                amp
            }
        })
        .collect()
}

fn scale_separable<T: Real>(data: &mut [T], n: usize, s0: &[f64], s1: &[f64]) {
    for k1 in 0..n {
        for k2 in 0..n {
            data[k1 * n + k2] = data[k1 * n + k2] * T::lit(s0[k1] * s1[k2]);
        }
    }
}

/// Coefficients against the orthonormal cosine/sine basis of the field's parity,
/// using the trapezoid rule (exact for lattice trigonometric polynomials).
pub fn forward_transform<T: Real>(field: &GridField<T>) -> Result<SpectralField<T>> {
    let spec = *field.spec();
    let n = spec.points();
    if field.values().len() != n * n {
        return Err(Error::DimensionMismatch { expected: n * n, found: field.values().len() });
    }
    let parity = field.parity();
    let mut raw = transform_2d(field.values(), n, parity);
    let s0 = axis_scales(n, parity[0], spec.side(), true);
    let s1 = axis_scales(n, parity[1], spec.side(), true);
    scale_separable(&mut raw, n, &s0, &s1);
    Ok(SpectralField::from_parts(spec, parity, raw))
}

/// Exact inverse of [`forward_transform`].
pub fn inverse_transform<T: Real>(spectral: &SpectralField<T>) -> GridField<T> {
    let spec = *spectral.spec();
    let n = spec.points();
    let parity = spectral.parity();
    let mut coeffs = spectral.coeffs().to_vec();
    let s0 = axis_scales(n, parity[0], spec.side(), false);
    let s1 = axis_scales(n, parity[1], spec.side(), false);
    scale_separable(&mut coeffs, n, &s0, &s1);
    let values = transform_2d(&coeffs, n, parity);
    GridField::from_parts(spec, parity, values)
}
