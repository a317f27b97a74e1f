//! Toy double-well potential `V(x) = εx + ηx² + x⁴`.
//!
//! Its critical points mirror the mean-field branches: one minimum for
//! η > 0, a tilted double well for η < 0 that loses its shallow minimum at
//! the saddle-node tilt.

use serde::Serialize;

use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalPoint<T = f64> {
    pub x: T,
    /// `V''(x) = 12x² + 2η`.
    pub curvature: T,
    pub potential: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuarticWell<T = f64> {
    pub eta: T,
    pub tilt: T,
    pub minima: Vec<CriticalPoint<T>>,
    pub maxima: Vec<CriticalPoint<T>>,
    /// Critical points with vanishing curvature (double roots of `V'`).
    pub inflections: Vec<CriticalPoint<T>>,
}

impl<T: Real> QuarticWell<T> {
    pub fn potential(&self, x: T) -> T {
        potential(self.eta, self.tilt, x)
    }

    pub fn critical_point_count(&self) -> usize {
        self.minima.len() + self.maxima.len() + self.inflections.len()
    }
}

fn potential<T: Real>(eta: T, tilt: T, x: T) -> T {
    let x2 = x * x;
    tilt * x + eta * x2 + x2 * x2
}

/// Critical points of `V` from the closed-form roots of
/// `V'(x) = 4x³ + 2ηx + ε`, each polished by two Newton steps.
pub fn quartic_stationary_points<T: Real>(eta: T, tilt: T) -> QuarticWell<T> {
    // Depressed cubic x³ + px + q.
    let p = eta / T::lit(2.0);
    let q = tilt / T::lit(4.0);
    let roots = depressed_cubic_roots(p, q);

    let dv = |x: T| T::lit(4.0) * x * x * x + T::lit(2.0) * eta * x + tilt;
    let ddv = |x: T| T::lit(12.0) * x * x + T::lit(2.0) * eta;
    let scale = T::one() + eta.abs();
    let tol = T::lit(1e3) * T::epsilon() * scale;

    let mut well = QuarticWell {
        eta,
        tilt,
        minima: Vec::new(),
        maxima: Vec::new(),
        inflections: Vec::new(),
    };
    for mut x in roots {
        for _ in 0..2 {
            let c = ddv(x);
            if c.abs() > tol {
                x = x - dv(x) / c;
            }
        }
        let point = CriticalPoint {
            x,
            curvature: ddv(x),
            potential: potential(eta, tilt, x),
        };
        if point.curvature > tol {
            well.minima.push(point);
        } else if point.curvature < -tol {
            well.maxima.push(point);
        } else {
            well.inflections.push(point);
        }
    }
    well
}

/// Real roots of `x³ + px + q`, ascending, double roots reported once.
fn depressed_cubic_roots<T: Real>(p: T, q: T) -> Vec<T> {
    let three = T::lit(3.0);
    let two = T::lit(2.0);
    // Discriminant of the cubic is −(4p³ + 27q²).
    let disc = -(T::lit(4.0) * p * p * p + T::lit(27.0) * q * q);
    let tol = T::lit(64.0) * T::epsilon() * (T::one() + (p * p * p).abs() + q * q);

    if p == T::zero() && q == T::zero() {
        return vec![T::zero()];
    }
    if disc.abs() <= tol && p != T::zero() {
        // Simple root 3q/p and double root −3q/(2p).
        let simple = three * q / p;
        let double = -three * q / (two * p);
        let mut r = vec![simple, double];
        r.sort_by(|a, b| a.partial_cmp(b).unwrap());
        return r;
    }
    if disc > T::zero() {
        let m = two * (-p / three).sqrt();
        let arg = (three * q / (two * p) * (-three / p).sqrt()).max(-T::one()).min(T::one());
        let phi = arg.acos() / three;
        let tau = T::TAU() / three;
        let mut r: Vec<T> = (0..3)
            .map(|k| m * (phi - tau * T::from_usize(k).unwrap()).cos())
            .collect();
        r.sort_by(|a, b| a.partial_cmp(b).unwrap());
        return r;
    }
    let s = (q * q / T::lit(4.0) + p * p * p / T::lit(27.0)).sqrt();
    vec![(-q / two + s).cbrt() + (-q / two - s).cbrt()]
}

/// Positive tilt at which `V'` acquires a double root, `4√(−η³/54)`;
/// zero for η ≥ 0.
pub fn quartic_saddle_node_tilt<T: Real>(eta: T) -> T {
    if eta >= T::zero() {
        return T::zero();
    }
    // 27q² = −4p³ with p = η/2, q = ε/4.
    T::lit(4.0) * (-eta * eta * eta / T::lit(54.0)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn single_well() {
        let w = quartic_stationary_points(1.0f64, 0.0);
        assert_eq!(w.minima.len(), 1);
        assert!(w.maxima.is_empty());
        assert_eq!(w.minima[0].x, 0.0);
    }

    #[test]
    fn symmetric_double_well() {
        let w = quartic_stationary_points(-1.0f64, 0.0);
        assert_eq!((w.minima.len(), w.maxima.len()), (2, 1));
        let x0 = 0.5f64.sqrt();
        assert_relative_eq!(w.minima[0].x, -x0, epsilon = 1e-15);
        assert_relative_eq!(w.minima[1].x, x0, epsilon = 1e-15);
        assert_relative_eq!(w.minima[0].curvature, w.minima[1].curvature, epsilon = 1e-14);
        assert!(w.maxima[0].x.abs() < 1e-15);
    }

    #[test]
    fn tilted_double_well() {
        let w = quartic_stationary_points(-1.0f64, -0.3);
        assert_eq!((w.minima.len(), w.maxima.len()), (2, 1));
        let (deep, shallow) = if w.minima[0].potential < w.minima[1].potential {
            (w.minima[0], w.minima[1])
        } else {
            (w.minima[1], w.minima[0])
        };
        // Negative tilt lowers the x > 0 well.
        assert!(deep.x > 0.0);
        assert!(shallow.curvature < deep.curvature);
        for p in w.minima.iter().chain(&w.maxima) {
            assert!((4.0 * p.x.powi(3) - 2.0 * p.x - 0.3).abs() < 1e-14);
        }
    }

    #[test]
    fn strongly_tilted_single_well() {
        let w = quartic_stationary_points(-1.0f64, -0.6);
        assert_eq!(w.minima.len(), 1);
        assert!(w.maxima.is_empty());
    }

    #[test]
    fn saddle_node_tilt() {
        let t = quartic_saddle_node_tilt(-1.0f64);
        assert_relative_eq!(t, 4.0 / (3.0 * 6f64.sqrt()), epsilon = 1e-15);
        assert_relative_eq!(t, 0.544_331_053_951_817_4, epsilon = 1e-15);
        assert_eq!(quartic_saddle_node_tilt(0.0f64), 0.0);
        assert_eq!(quartic_saddle_node_tilt(0.5f64), 0.0);
        // Brackets: −0.3 bistable, −0.6 monostable.
        assert!(0.3 < t && t < 0.6);
        // Double-root condition: V'' = 0 at x² = −η/6 and V'(x) = 0 there.
        let x = (1.0f64 / 6.0).sqrt();
        assert_relative_eq!(-(4.0 * x.powi(3) - 2.0 * x), t, epsilon = 1e-15);
        let w = quartic_stationary_points(-1.0f64, t);
        assert_eq!(w.minima.len(), 1);
        assert_eq!(w.critical_point_count(), 2);
    }
}
