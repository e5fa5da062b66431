use super::DesignSpec;

/// Centered (and optionally unit-variance) working copy of a design.
/// Constant columns are dropped; `kept` maps working columns back to the
/// original indices so reported coefficient vectors stay dense.
pub(crate) struct Prepared {
    pub n: usize,
    pub d: usize,
    pub d_orig: usize,
    pub xs: Vec<Vec<f64>>,
    pub means: Vec<f64>,
    /// Divisor applied to each kept column (1.0 when standardization is off).
    pub scales: Vec<f64>,
    /// `(1/n) <x_j, x_j>` on the working scale (1.0 when standardized).
    pub sq_norm_over_n: Vec<f64>,
    pub kept: Vec<usize>,
}

impl Prepared {
    pub fn from_design(design: &DesignSpec) -> Prepared {
        let n = design.n();
        let nf = n as f64;
        let d_orig = design.d();
        let mut xs = Vec::new();
        let mut means = Vec::new();
        let mut scales = Vec::new();
        let mut sq_norm_over_n = Vec::new();
        let mut kept = Vec::new();
        for (j, col) in design.cols().iter().enumerate() {
            let mean = col.iter().sum::<f64>() / nf;
            let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / nf;
            if var <= 1e-12 * mean.mul_add(mean, 1.0) {
                continue; // constant column
            }
            let scale = if design.standardize() { var.sqrt() } else { 1.0 };
            let centered: Vec<f64> = col.iter().map(|v| (v - mean) / scale).collect();
            sq_norm_over_n.push(if design.standardize() { 1.0 } else { var });
            xs.push(centered);
            means.push(mean);
            scales.push(scale);
            kept.push(j);
        }
        Prepared { n, d: xs.len(), d_orig, xs, means, scales, sq_norm_over_n, kept }
    }

    /// Map working-scale coefficients to the original scale, returning the
    /// dense coefficient vector and the intercept adjustment
    /// `sum_j beta_orig_j * mean_j`.
    pub fn unstandardize(&self, beta_std: &[f64]) -> (Vec<f64>, f64) {
        let mut beta = vec![0.0; self.d_orig];
        let mut mean_shift = 0.0;
        for (k, &orig) in self.kept.iter().enumerate() {
            let b = beta_std[k] / self.scales[k];
            beta[orig] = b;
            mean_shift += b * self.means[k];
        }
        (beta, mean_shift)
    }
}
