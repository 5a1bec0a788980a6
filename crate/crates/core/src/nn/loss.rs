//! Scalar losses with analytic gradients.

/// Binary cross-entropy of a predicted probability against a 0/1 target.
/// `p` is clamped to `[1e-7, 1-1e-7]` before the logs; returns `(loss, dloss/dp)`.
pub fn bce_loss(p: f64, target: f64) -> (f64, f64) {
    debug_assert!(target == 0.0 || target == 1.0, "target must be 0 or 1");
    let p = p.clamp(1e-7, 1.0 - 1e-7);
    let loss = -(target * p.ln() + (1.0 - target) * (1.0 - p).ln());
    let grad = -target / p + (1.0 - target) / (1.0 - p);
    (loss, grad)
}

/// Mean squared componentwise difference; returns `(loss, dloss/da)`.
pub fn mse_loss(a: &[f64], b: &[f64]) -> (f64, Vec<f64>) {
    assert_eq!(a.len(), b.len(), "mse operands must have equal length");
    let n = a.len() as f64;
    let mut loss = 0.0;
    let mut grad = Vec::with_capacity(a.len());
    for (&x, &y) in a.iter().zip(b) {
        let d = x - y;
        loss += d * d;
        grad.push(2.0 * d / n);
    }
    (loss / n, grad)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bce_at_half_is_ln_two() {
        let (loss, _) = bce_loss(0.5, 1.0);
        assert!((loss - std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn bce_confident_wrong_is_costly() {
        // -ln(0.1) = 2.302585...
        let (loss, grad) = bce_loss(0.9, 0.0);
        assert!((loss - 2.302_585_092_994_046).abs() < 1e-12);
        assert!(grad > 0.0);
    }

    #[test]
    fn bce_clamps_extreme_probabilities() {
        let (loss, grad) = bce_loss(0.0, 1.0);
        assert!(loss.is_finite() && grad.is_finite());
        let (loss, grad) = bce_loss(1.0, 0.0);
        assert!(loss.is_finite() && grad.is_finite());
    }

    #[test]
    fn mse_of_identical_vectors_is_zero() {
        let x = [0.5, -2.0, 3.25];
        let (loss, grad) = mse_loss(&x, &x);
        assert_eq!(loss, 0.0);
        assert!(grad.iter().all(|&g| g == 0.0));
    }

    #[test]
    fn mse_gradient_matches_finite_differences() {
        let a = [0.3, -1.2, 0.7];
        let b = [0.1, 0.4, -0.9];
        let (_, grad) = mse_loss(&a, &b);
        let h = 1e-6;
        for i in 0..a.len() {
            let mut ap = a;
            let mut am = a;
            ap[i] += h;
            am[i] -= h;
            let numeric = (mse_loss(&ap, &b).0 - mse_loss(&am, &b).0) / (2.0 * h);
            assert!((grad[i] - numeric).abs() < 1e-8);
        }
    }
}
