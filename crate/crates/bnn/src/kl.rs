//! Closed-form KL divergence between univariate Gaussians.

/// `KL(N(mu, sigma²) ‖ N(mu_p, sigma_p²))`.
pub fn kl_gaussian(mu: f64, sigma: f64, mu_p: f64, sigma_p: f64) -> f64 {
    (sigma_p / sigma).ln() + (sigma * sigma + (mu - mu_p).powi(2)) / (2.0 * sigma_p * sigma_p) - 0.5
}

/// Partial derivatives of [`kl_gaussian`] with respect to `mu` and `sigma`.
pub fn kl_gaussian_grad(mu: f64, sigma: f64, mu_p: f64, sigma_p: f64) -> (f64, f64) {
    let vp = sigma_p * sigma_p;
    ((mu - mu_p) / vp, -1.0 / sigma + sigma / vp)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `∫ q log(q/p)` by composite Simpson over ±14σ of `q`.
    fn kl_quadrature(mu: f64, sigma: f64, mu_p: f64, sigma_p: f64) -> f64 {
        let log_pdf = |x: f64, m: f64, s: f64| -0.5 * ((x - m) / s).powi(2) - s.ln() - 0.5 * (2.0 * std::f64::consts::PI).ln();
        let (a, b) = (mu - 14.0 * sigma, mu + 14.0 * sigma);
        let n = 40_000;
        let h = (b - a) / n as f64;
        let f = |x: f64| {
            let lq = log_pdf(x, mu, sigma);
            lq.exp() * (lq - log_pdf(x, mu_p, sigma_p))
        };
        let mut sum = f(a) + f(b);
        for i in 1..n {
            sum += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        sum * h / 3.0
    }

    #[test]
    fn closed_form_matches_quadrature() {
        for mu in [-2.0, -0.7, 0.0, 0.4, 1.5] {
            for sigma in [0.1, 0.5, 1.0, 2.0, std::f64::consts::E] {
                let exact = kl_gaussian(mu, sigma, 0.0, 1.0);
                let quad = kl_quadrature(mu, sigma, 0.0, 1.0);
                assert!((exact - quad).abs() < 1e-6, "mu {mu} sigma {sigma}: {exact} vs {quad}");
                assert!(exact >= 0.0);
            }
        }
    }

    #[test]
    fn zero_only_at_the_prior() {
        assert_eq!(kl_gaussian(0.3, 1.7, 0.3, 1.7), 0.0);
        assert_eq!(kl_gaussian(0.0, 1.0, 0.0, 1.0), 0.0);
        assert!(kl_gaussian(1e-3, 1.0, 0.0, 1.0) > 0.0);
        assert!(kl_gaussian(0.0, 1.0 + 1e-3, 0.0, 1.0) > 0.0);
    }

    #[test]
    fn scaled_sigma_against_direct_formula() {
        let e = std::f64::consts::E;
        let direct = -1.0 + e * e / 2.0 - 0.5;
        assert!((kl_gaussian(0.2, e * 0.5, 0.2, 0.5) - direct).abs() < 1e-12);
        assert!((kl_quadrature(0.2, e * 0.5, 0.2, 0.5) - direct).abs() < 1e-6);
    }

    #[test]
    fn gradient_matches_differences() {
        let (mu, s, h) = (0.7, 0.3, 1e-6);
        let (dm, ds) = kl_gaussian_grad(mu, s, 0.1, 1.3);
        let nm = (kl_gaussian(mu + h, s, 0.1, 1.3) - kl_gaussian(mu - h, s, 0.1, 1.3)) / (2.0 * h);
        let ns = (kl_gaussian(mu, s + h, 0.1, 1.3) - kl_gaussian(mu, s - h, 0.1, 1.3)) / (2.0 * h);
        assert!((dm - nm).abs() < 1e-8 && (ds - ns).abs() < 1e-8);
    }
}
