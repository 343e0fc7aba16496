//! Legendre polynomials, normalized associated Legendre functions and
//! Gauss–Legendre rules on [−1, 1].

use std::f64::consts::PI;

use crate::error::{Error, Result};

const DOMAIN_SLACK: f64 = 1e-12;
const MAX_NEWTON_ITERATIONS: usize = 100;

fn check_domain(x: f64) -> Result<f64> {
    if !(x.abs() <= 1.0 + DOMAIN_SLACK) {
        return Err(Error::Domain(format!("|x| = {} exceeds 1", x.abs())));
    }
    Ok(x.clamp(-1.0, 1.0))
}

/// P_l(x) and P_l'(x) by the three-term recurrence.
pub fn legendre_eval(l: usize, x: f64) -> Result<(f64, f64)> {
    let x = check_domain(x)?;
    Ok(legendre_unchecked(l, x))
}

fn legendre_unchecked(l: usize, x: f64) -> (f64, f64) {
    if l == 0 {
        return (1.0, 0.0);
    }
    let mut p_prev = 1.0;
    let mut p = x;
    for k in 2..=l {
        let kf = k as f64;
        let next = ((2.0 * kf - 1.0) * x * p - (kf - 1.0) * p_prev) / kf;
        p_prev = p;
        p = next;
    }
    let lf = l as f64;
    let dp = if x.abs() == 1.0 {
        let sign = if x > 0.0 || l % 2 == 1 { 1.0 } else { -1.0 };
        sign * lf * (lf + 1.0) / 2.0
    } else {
        lf * (x * p - p_prev) / (x * x - 1.0)
    };
    (p, dp)
}

/// Coefficients of the fixed-m upward recurrence
/// P̄_l^m = a·x·P̄_{l−1}^m − b·P̄_{l−2}^m.
#[inline]
pub(crate) fn upward_coefficients(l: usize, m: usize) -> (f64, f64) {
    let lf = l as f64;
    let mf = m as f64;
    let denom = lf * lf - mf * mf;
    let a = ((4.0 * lf * lf - 1.0) / denom).sqrt();
    let b = ((2.0 * lf + 1.0) * ((lf - 1.0) * (lf - 1.0) - mf * mf) / ((2.0 * lf - 3.0) * denom))
        .sqrt();
    (a, b)
}

/// Sectoral seed P̄_m^m(x) given s = sqrt(1 − x²).
#[inline]
pub(crate) fn sectoral(m: usize, s: f64) -> f64 {
    let mut p = 0.5 / PI.sqrt();
    for k in 1..=m {
        let kf = k as f64;
        p *= ((2.0 * kf + 1.0) / (2.0 * kf)).sqrt() * s;
    }
    p
}

/// Associated Legendre function normalized so that P̄_l^m(cos θ) e^{imφ} is
/// orthonormal over the full solid angle:
///
/// P̄_l^m = sqrt((2l+1)/(4π) · (l−m)!/(l+m)!) · (1−x²)^{m/2} d^m P_l/dx^m.
///
/// No Condon–Shortley phase is included. Evaluated by the fixed-m upward
/// recurrence, which never forms the raw (overflowing) P_l^m.
pub fn assoc_legendre(l: usize, m: usize, x: f64) -> Result<f64> {
    if m > l {
        return Err(Error::Domain(format!("m = {m} exceeds l = {l}")));
    }
    let x = check_domain(x)?;
    let s = ((1.0 - x) * (1.0 + x)).sqrt();
    let mut p_prev = 0.0;
    let mut p = sectoral(m, s);
    for k in (m + 1)..=l {
        let (a, b) = upward_coefficients(k, m);
        let next = a * x * p - b * p_prev;
        p_prev = p;
        p = next;
    }
    Ok(p)
}

/// Nodes and weights of the n-point Gauss–Legendre rule; exact for
/// polynomials of degree up to 2n − 1.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendreRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendreRule {
    pub fn new(n: usize) -> Result<Self> {
        gauss_legendre_rule(n)
    }

    pub fn degree(&self) -> usize {
        self.nodes.len()
    }

    /// Ascending nodes in (−1, 1).
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.iter().map(|(x, w)| w * f(x)).sum()
    }
}

/// Builds the n-point rule. Only the ⌈n/2⌉ non-negative roots of P_n are
/// found by Newton's method, starting from x = cos(π(i − 1/4)/(n + 1/2));
/// the rest follow by symmetry.
pub fn gauss_legendre_rule(n: usize) -> Result<GaussLegendreRule> {
    if n == 0 {
        return Err(Error::Domain("Gauss-Legendre rule needs n >= 1".into()));
    }
    let nf = n as f64;
    let half = n.div_ceil(2);
    let mut upper = Vec::with_capacity(half);
    for i in 1..=half {
        let mut x = (PI * (i as f64 - 0.25) / (nf + 0.5)).cos();
        if n % 2 == 1 && i == half {
            // middle root of an odd-degree polynomial
            x = 0.0;
        } else {
            let mut converged = false;
            for _ in 0..MAX_NEWTON_ITERATIONS {
                let (p, dp) = legendre_unchecked(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() <= 1e-15 {
                    converged = true;
                    break;
                }
            }
            if !converged {
                return Err(Error::Convergence {
                    degree: n,
                    index: i - 1,
                });
            }
        }
        let (_, dp) = legendre_unchecked(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        upper.push((x, w));
    }
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    // upper holds descending non-negative roots
    for &(x, w) in &upper {
        if x != 0.0 {
            nodes.push(-x);
            weights.push(w);
        }
    }
    for &(x, w) in upper.iter().rev() {
        nodes.push(x);
        weights.push(w);
    }
    debug_assert_eq!(nodes.len(), n);
    Ok(GaussLegendreRule { nodes, weights })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn legendre_examples() {
        assert_eq!(legendre_eval(0, 0.3).unwrap(), (1.0, 0.0));
        assert_abs_diff_eq!(legendre_eval(2, 0.0).unwrap().0, -0.5, epsilon = 1e-16);
        assert_eq!(legendre_eval(5, 1.0).unwrap().0, 1.0);
        assert!(matches!(legendre_eval(3, 1.1), Err(Error::Domain(_))));
    }

    #[test]
    fn legendre_derivative_at_endpoints() {
        for l in 0..12 {
            let lf = l as f64;
            let (_, d1) = legendre_eval(l, 1.0).unwrap();
            let (_, dm1) = legendre_eval(l, -1.0).unwrap();
            assert_abs_diff_eq!(d1, lf * (lf + 1.0) / 2.0, epsilon = 1e-12);
            let sign = if l % 2 == 0 { -1.0 } else { 1.0 };
            assert_abs_diff_eq!(dm1, sign * lf * (lf + 1.0) / 2.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn legendre_matches_explicit_forms() {
        for i in 0..=1000 {
            let x = -1.0 + 2.0 * i as f64 / 1000.0;
            let p2 = (3.0 * x * x - 1.0) / 2.0;
            let p3 = (5.0 * x.powi(3) - 3.0 * x) / 2.0;
            let p4 = (35.0 * x.powi(4) - 30.0 * x * x + 3.0) / 8.0;
            assert_abs_diff_eq!(legendre_eval(2, x).unwrap().0, p2, epsilon = 1e-14);
            assert_abs_diff_eq!(legendre_eval(3, x).unwrap().0, p3, epsilon = 1e-14);
            assert_abs_diff_eq!(legendre_eval(4, x).unwrap().0, p4, epsilon = 1e-14);
            let dp3 = (15.0 * x * x - 3.0) / 2.0;
            assert_abs_diff_eq!(legendre_eval(3, x).unwrap().1, dp3, epsilon = 1e-12);
        }
    }

    #[test]
    fn legendre_is_bounded() {
        for l in [1, 7, 50, 200] {
            for i in 0..=500 {
                let x = -1.0 + 2.0 * i as f64 / 500.0;
                assert!(legendre_eval(l, x).unwrap().0.abs() <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn assoc_legendre_examples() {
        let y00 = 1.0 / (4.0 * PI).sqrt();
        assert_abs_diff_eq!(assoc_legendre(0, 0, 0.7).unwrap(), y00, epsilon = 1e-16);
        assert_eq!(assoc_legendre(3, 3, 1.0).unwrap(), 0.0);
        assert_eq!(assoc_legendre(3, 3, -1.0).unwrap(), 0.0);
        assert!(matches!(assoc_legendre(2, 3, 0.0), Err(Error::Domain(_))));
        assert!(matches!(assoc_legendre(2, 1, -1.5), Err(Error::Domain(_))));
    }

    #[test]
    fn assoc_legendre_matches_closed_forms() {
        // sqrt((2l+1)/(4π) (l-m)!/(l+m)!) times the raw function
        let n = |l: f64, ratio: f64| ((2.0 * l + 1.0) / (4.0 * PI) * ratio).sqrt();
        for i in 0..=100 {
            let x = -1.0 + 2.0 * i as f64 / 100.0;
            let s = (1.0 - x * x).sqrt();
            assert_abs_diff_eq!(
                assoc_legendre(1, 1, x).unwrap(),
                n(1.0, 0.5) * s,
                epsilon = 1e-15
            );
            assert_abs_diff_eq!(
                assoc_legendre(2, 1, x).unwrap(),
                n(2.0, 1.0 / 6.0) * 3.0 * x * s,
                epsilon = 1e-14
            );
            assert_abs_diff_eq!(
                assoc_legendre(3, 2, x).unwrap(),
                n(3.0, 1.0 / 120.0) * 15.0 * x * s * s,
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn p11_square_integrates_to_one_over_sphere() {
        // 2π ∫ P̄_1^1(x)² dx by composite Simpson on [-1, 1]
        let m = 2000;
        let h = 2.0 / m as f64;
        let mut acc = 0.0;
        for i in 0..=m {
            let x = -1.0 + i as f64 * h;
            let w = if i == 0 || i == m {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            acc += w * assoc_legendre(1, 1, x).unwrap().powi(2);
        }
        let integral = 2.0 * PI * acc * h / 3.0;
        assert_abs_diff_eq!(integral, 1.0, epsilon = 1e-10);
        // value at the equator: sqrt(3/(8π))
        assert_abs_diff_eq!(
            assoc_legendre(1, 1, 0.0).unwrap(),
            (3.0 / (8.0 * PI)).sqrt(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn assoc_legendre_large_degree_is_finite() {
        for x in [-0.999, -0.3, 0.0, 0.5, 0.9999] {
            for m in [0, 10, 100, 150] {
                let v = assoc_legendre(160, m, x).unwrap();
                assert!(v.is_finite());
                assert!(v.abs() < 10.0);
            }
        }
    }

    #[test]
    fn small_rules() {
        let r1 = gauss_legendre_rule(1).unwrap();
        assert_eq!(r1.nodes(), &[0.0]);
        assert_eq!(r1.weights(), &[2.0]);

        let r2 = gauss_legendre_rule(2).unwrap();
        let a = 1.0 / 3f64.sqrt();
        assert_abs_diff_eq!(r2.nodes()[0], -a, epsilon = 1e-15);
        assert_abs_diff_eq!(r2.nodes()[1], a, epsilon = 1e-15);
        assert_abs_diff_eq!(r2.weights()[0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r2.weights()[1], 1.0, epsilon = 1e-15);

        let r3 = gauss_legendre_rule(3).unwrap();
        assert_abs_diff_eq!(r3.integrate(|x| x.powi(4)), 0.4, epsilon = 1e-14);

        assert!(matches!(gauss_legendre_rule(0), Err(Error::Domain(_))));
    }

    #[test]
    fn rule_invariants() {
        for n in 1..=200 {
            let r = gauss_legendre_rule(n).unwrap();
            let x = r.nodes();
            let w = r.weights();
            assert!(x.windows(2).all(|p| p[0] < p[1]), "n={n} not ascending");
            assert!(x[0] > -1.0 && x[n - 1] < 1.0);
            assert!(w.iter().all(|&v| v > 0.0));
            for i in 0..n {
                assert!((x[i] + x[n - 1 - i]).abs() <= 1e-14);
                assert!((w[i] - w[n - 1 - i]).abs() <= 1e-14);
                assert!(legendre_eval(n, x[i]).unwrap().0.abs() < 1e-12);
            }
            assert!((w.iter().sum::<f64>() - 2.0).abs() <= 1e-13, "n={n}");
        }
    }

    #[test]
    fn roots_interlace() {
        for n in 1..60 {
            let a = gauss_legendre_rule(n).unwrap();
            let b = gauss_legendre_rule(n + 1).unwrap();
            for i in 0..n {
                assert!(b.nodes()[i] < a.nodes()[i] && a.nodes()[i] < b.nodes()[i + 1]);
            }
        }
    }
}
