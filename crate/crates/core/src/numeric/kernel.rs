//! Hot-loop kernels for the coordinate-descent solvers. Written with
//! independent accumulator chains so LLVM can vectorize them.

/// Dense dot product.
#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0.0f64; 8];
    let ca = a.chunks_exact(8);
    let cb = b.chunks_exact(8);
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (xa, xb) in ca.zip(cb) {
        for k in 0..8 {
            acc[k] += xa[k] * xb[k];
        }
    }
    let mut s: f64 = acc.iter().sum();
    for (x, y) in ra.iter().zip(rb) {
        s += x * y;
    }
    s
}

/// `y += alpha * x`.
#[inline]
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// `y += alpha * w .* x` (elementwise weight).
#[inline]
pub fn axpy_weighted(alpha: f64, w: &[f64], x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    debug_assert_eq!(w.len(), y.len());
    for i in 0..y.len() {
        y[i] += alpha * w[i] * x[i];
    }
}

/// `sum(w .* x .* x)`.
#[inline]
pub fn weighted_sq_norm(w: &[f64], x: &[f64]) -> f64 {
    debug_assert_eq!(w.len(), x.len());
    let mut acc = [0.0f64; 8];
    let cw = w.chunks_exact(8);
    let cx = x.chunks_exact(8);
    let (rw, rx) = (cw.remainder(), cx.remainder());
    for (ww, xx) in cw.zip(cx) {
        for k in 0..8 {
            acc[k] += ww[k] * xx[k] * xx[k];
        }
    }
    let mut s: f64 = acc.iter().sum();
    for (wv, xv) in rw.iter().zip(rx) {
        s += wv * xv * xv;
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn dot_matches_naive() {
        let a: Vec<f64> = (0..37).map(|i| (i as f64).sin()).collect();
        let b: Vec<f64> = (0..37).map(|i| (i as f64).cos()).collect();
        let naive: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
        assert_abs_diff_eq!(dot(&a, &b), naive, epsilon = 1e-12);
    }

    #[test]
    fn axpy_accumulates() {
        let x = vec![1.0, 2.0, 3.0];
        let mut y = vec![10.0, 10.0, 10.0];
        axpy(-2.0, &x, &mut y);
        assert_eq!(y, vec![8.0, 6.0, 4.0]);
    }

    #[test]
    fn weighted_ops() {
        let w = vec![0.5, 2.0];
        let x = vec![3.0, -1.0];
        assert_abs_diff_eq!(weighted_sq_norm(&w, &x), 0.5 * 9.0 + 2.0, epsilon = 1e-14);
        let mut y = vec![0.0, 0.0];
        axpy_weighted(2.0, &w, &x, &mut y);
        assert_eq!(y, vec![3.0, -4.0]);
    }
}
