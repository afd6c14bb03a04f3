//! Products of spectra as Fourier-side convolutions.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::spectrum::{DiracSpectrum, Frequency, GridSpectrum};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// All pairwise frequency sums with weight products, merged.
pub(crate) fn dirac_convolve(w: &DiracSpectrum, u: &DiracSpectrum) -> DiracSpectrum {
    let mut map: BTreeMap<Frequency, Complex64> = BTreeMap::new();
    for (xi, a) in w.atoms() {
        for (eta, b) in u.atoms() {
            *map.entry(xi.add(eta)).or_insert(ZERO) += a * b;
        }
    }
    DiracSpectrum::from_merged(w.dim(), map)
}

/// `Σ_η Ŵ(η) û(ξ-η) h^d` on the nodes of `w`'s grid via a zero-padded FFT.
/// Linear-convolution outputs that fall outside `[-Ξ, Ξ]^d` are dropped;
/// their `𝓑⁰` mass is returned alongside the result.
pub(crate) fn grid_convolve(w: &GridSpectrum, u: &GridSpectrum) -> (GridSpectrum, f64) {
    let d = w.dim();
    let n = w.points_per_axis();
    let c = w.center_index();
    let m = (2 * n - 1).next_power_of_two();
    let total = m.pow(d as u32);

    let mut planner = FftPlanner::<f64>::new();
    let forward = planner.plan_fft_forward(m);
    let inverse = planner.plan_fft_inverse(m);

    let pad = |g: &GridSpectrum| {
        let mut buf = vec![ZERO; total];
        for (flat, v) in g.values().iter().enumerate() {
            buf[padded_index(&g.unravel(flat), m)] = *v;
        }
        buf
    };
    let mut a = pad(w);
    let mut b = pad(u);
    transform_nd(&mut a, d, m, forward.as_ref());
    transform_nd(&mut b, d, m, forward.as_ref());
    for (x, y) in a.iter_mut().zip(&b) {
        *x *= y;
    }
    transform_nd(&mut a, d, m, inverse.as_ref());

    let cell = w.cell_measure();
    let norm = cell / total as f64;
    let mut values = vec![ZERO; n.pow(d as u32)];
    let mut lost = 0.0;
    let mut idx = vec![0usize; d];
    for (p, v) in a.iter().enumerate() {
        let mut rem = p;
        for k in (0..d).rev() {
            idx[k] = rem % m;
            rem /= m;
        }
        // Linear convolution support is [0, 2N-2] per axis.
        if idx.iter().any(|&i| i > 2 * n - 2) {
            continue;
        }
        let val = *v * norm;
        if idx.iter().all(|&i| i >= c && i < c + n) {
            let out: Vec<usize> = idx.iter().map(|&i| i - c).collect();
            values[w.ravel(&out)] = val;
        } else {
            lost += val.norm() * cell;
        }
    }
    (
        GridSpectrum::from_raw(d, w.cutoff(), n, values),
        lost,
    )
}

fn padded_index(idx: &[usize], m: usize) -> usize {
    idx.iter().fold(0, |acc, &i| acc * m + i)
}

fn transform_nd(buf: &mut [Complex64], d: usize, m: usize, fft: &dyn rustfft::Fft<f64>) {
    let mut line = vec![ZERO; m];
    let mut scratch = vec![ZERO; fft.get_inplace_scratch_len()];
    for axis in 0..d {
        let stride = m.pow((d - 1 - axis) as u32);
        let outer = buf.len() / (m * stride);
        for o in 0..outer {
            for inner in 0..stride {
                let base = o * m * stride + inner;
                for (k, slot) in line.iter_mut().enumerate() {
                    *slot = buf[base + k * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (k, v) in line.iter().enumerate() {
                    buf[base + k * stride] = *v;
                }
            }
        }
    }
}
