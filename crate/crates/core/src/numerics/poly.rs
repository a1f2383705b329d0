//! Dense real polynomials indexed by power.

/// Real polynomial with `coefficients()[p]` the coefficient of the p-th
/// power. The zero polynomial has no coefficients; otherwise the trailing
/// coefficient is nonzero.
#[derive(Clone, Debug, PartialEq)]
pub struct RealPolynomial {
    coeffs: Vec<f64>,
}

impl RealPolynomial {
    /// Build from coefficients (index = power), trimming trailing zeros.
    pub fn from_coefficients(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        RealPolynomial { coeffs }
    }

    /// The constant polynomial 1.
    pub fn one() -> Self {
        RealPolynomial { coeffs: vec![1.0] }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    /// Coefficient of the p-th power (0 beyond the degree).
    pub fn coefficient(&self, p: usize) -> f64 {
        self.coeffs.get(p).copied().unwrap_or(0.0)
    }
}

/// Exact convolution of coefficient lists.
pub fn poly_mul(a: &RealPolynomial, b: &RealPolynomial) -> RealPolynomial {
    if a.is_zero() || b.is_zero() {
        return RealPolynomial::from_coefficients(Vec::new());
    }
    let mut out = vec![0.0; a.coeffs.len() + b.coeffs.len() - 1];
    for (i, &ai) in a.coeffs.iter().enumerate() {
        for (j, &bj) in b.coeffs.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    RealPolynomial::from_coefficients(out)
}

/// In-place truncated product `acc *= other`, keeping only powers below
/// `acc.len()`. `other[0]` must be 1 (a monic constant term), which lets
/// the update run in place from the top power down.
///
/// The discarded powers never feed back into the kept ones, so the kept
/// coefficients are exactly those of the full product.
#[inline]
pub(crate) fn mul_monic_truncated_in_place(acc: &mut [f64], other: &[f64]) {
    debug_assert!(other.first() == Some(&1.0));
    for d in (1..acc.len()).rev() {
        let mut s = acc[d];
        for j in 1..=d.min(other.len() - 1) {
            s += acc[d - j] * other[j];
        }
        acc[d] = s;
    }
}
