//! Stride kernels over flat amplitude buffers. Bit `q` of a buffer index is
//! qubit `q`; buffers are always a power of two long.

use num_complex::Complex;

use crate::scalar::Scalar;

pub(crate) type Mat2<T> = [[Complex<T>; 2]; 2];

pub(crate) fn apply_1q<T: Scalar>(buf: &mut [Complex<T>], q: usize, m: &Mat2<T>) {
    let half = 1usize << q;
    for chunk in buf.chunks_exact_mut(half << 1) {
        let (lo, hi) = chunk.split_at_mut(half);
        for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
            let (x, y) = (*a, *b);
            *a = m[0][0] * x + m[0][1] * y;
            *b = m[1][0] * x + m[1][1] * y;
        }
    }
}

pub(crate) fn apply_x<T: Scalar>(buf: &mut [Complex<T>], q: usize) {
    let half = 1usize << q;
    for chunk in buf.chunks_exact_mut(half << 1) {
        let (lo, hi) = chunk.split_at_mut(half);
        lo.swap_with_slice(hi);
    }
}

/// Multiplies amplitudes whose bit `q` is set by `phase`.
pub(crate) fn apply_phase<T: Scalar>(buf: &mut [Complex<T>], q: usize, phase: Complex<T>) {
    let half = 1usize << q;
    for chunk in buf.chunks_exact_mut(half << 1) {
        for z in &mut chunk[half..] {
            *z = *z * phase;
        }
    }
}

/// Flips bit `target` on every index where all `control_mask` bits are set.
pub(crate) fn apply_controlled_x<T: Scalar>(
    buf: &mut [Complex<T>],
    control_mask: usize,
    target: usize,
) {
    let half = 1usize << target;
    for (k, chunk) in buf.chunks_exact_mut(half << 1).enumerate() {
        let base = k * (half << 1);
        let (lo, hi) = chunk.split_at_mut(half);
        for (j, (a, b)) in lo.iter_mut().zip(hi.iter_mut()).enumerate() {
            if (base + j) & control_mask == control_mask {
                std::mem::swap(a, b);
            }
        }
    }
}

pub(crate) fn apply_cz<T: Scalar>(buf: &mut [Complex<T>], a: usize, b: usize) {
    let mask = (1usize << a) | (1usize << b);
    for (i, z) in buf.iter_mut().enumerate() {
        if i & mask == mask {
            *z = -*z;
        }
    }
}

pub(crate) fn apply_swap<T: Scalar>(buf: &mut [Complex<T>], a: usize, b: usize) {
    let (ma, mb) = (1usize << a, 1usize << b);
    for i in 0..buf.len() {
        if i & ma != 0 && i & mb == 0 {
            buf.swap(i, i ^ ma ^ mb);
        }
    }
}

/// Dense k-qubit gate. Bit `j` of the gate's local index is `targets[j]`.
pub(crate) fn apply_dense<T: Scalar>(
    buf: &mut [Complex<T>],
    matrix: &[Complex<T>],
    targets: &[usize],
) {
    let dim = 1usize << targets.len();
    let offsets: Vec<usize> = (0..dim)
        .map(|local| {
            targets
                .iter()
                .enumerate()
                .filter(|(j, _)| local >> j & 1 == 1)
                .map(|(_, &t)| 1usize << t)
                .sum()
        })
        .collect();
    let target_mask: usize = targets.iter().map(|&t| 1usize << t).sum();
    let mut gathered = vec![Complex::new(T::zero(), T::zero()); dim];
    for base in 0..buf.len() {
        if base & target_mask != 0 {
            continue;
        }
        for (g, off) in gathered.iter_mut().zip(&offsets) {
            *g = buf[base + off];
        }
        for (row, off) in offsets.iter().enumerate() {
            let mut acc = Complex::new(T::zero(), T::zero());
            for (col, g) in gathered.iter().enumerate() {
                acc = acc + matrix[row * dim + col] * *g;
            }
            buf[base + off] = acc;
        }
    }
}
