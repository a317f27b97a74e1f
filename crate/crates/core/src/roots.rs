//! One-dimensional bracketing root finders used by the mean-field solvers.

use crate::scalar::Real;

const MAX_BISECTIONS: usize = 400;

/// Bisection on `[a, b]` where `f(a)` and `f(b)` have opposite signs (or one
/// of them is zero). Runs until the midpoint is no longer distinct from an
/// endpoint, so the result is accurate to the last bit of `T`.
pub fn bisect<T: Real>(f: impl Fn(T) -> T, mut a: T, mut b: T) -> T {
    let mut fa = f(a);
    let fb = f(b);
    if fa == T::zero() {
        return a;
    }
    if fb == T::zero() {
        return b;
    }
    debug_assert!(fa.signum() != fb.signum(), "bisect: root not bracketed");
    let two = T::lit(2.0);
    for _ in 0..MAX_BISECTIONS {
        let mid = a + (b - a) / two;
        if mid == a || mid == b {
            break;
        }
        let fm = f(mid);
        if fm == T::zero() {
            return mid;
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    // Return the endpoint with the smaller residual.
    if fa.abs() <= f(b).abs() {
        a
    } else {
        b
    }
}

/// A root located by [`scan_roots`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScannedRoot<T> {
    pub x: T,
    /// Set when the root was found as a tangency of `f` (a double root).
    pub tangent: bool,
}

/// Dense sign scan of `f` over `[lo, hi]` followed by bisection.
///
/// Intervals without a sign change but with a sign change of `df` are
/// refined: the extremum of `f` is located by bisection on `df`. If `f`
/// changes sign at the extremum the interval holds two roots; if `|f|` at
/// the extremum is below `tangent_tol` it holds one double root.
pub fn scan_roots<T: Real>(
    f: impl Fn(T) -> T,
    df: impl Fn(T) -> T,
    lo: T,
    hi: T,
    samples: usize,
    tangent_tol: T,
) -> Vec<ScannedRoot<T>> {
    assert!(samples >= 2 && hi > lo);
    let n = T::from_usize(samples - 1).unwrap();
    let grid: Vec<T> = (0..samples)
        .map(|i| lo + (hi - lo) * T::from_usize(i).unwrap() / n)
        .collect();
    let values: Vec<T> = grid.iter().map(|&x| f(x)).collect();
    let slopes: Vec<T> = grid.iter().map(|&x| df(x)).collect();

    let mut roots = Vec::new();
    let mut push = |x: T, tangent: bool| {
        if let Some(last) = roots.last() {
            let last: &ScannedRoot<T> = last;
            if last.x == x {
                return;
            }
        }
        roots.push(ScannedRoot { x, tangent });
    };

    for i in 0..samples - 1 {
        let (a, b) = (grid[i], grid[i + 1]);
        let (fa, fb) = (values[i], values[i + 1]);
        if fa == T::zero() {
            push(a, slopes[i].abs() <= tangent_tol);
            // A second root may hide in the same cell behind an extremum.
            if fb != T::zero() && slopes[i].signum() != slopes[i + 1].signum() {
                let ext = bisect(&df, a, b);
                let fe = f(ext);
                if ext > a && fe.abs() > tangent_tol && fe.signum() != fb.signum() {
                    push(bisect(&f, ext, b), false);
                }
            }
            continue;
        }
        if fb == T::zero() {
            // Picked up as the left endpoint of the next interval.
            if i + 1 == samples - 1 {
                push(b, slopes[i + 1].abs() <= tangent_tol);
            }
            continue;
        }
        if fa.signum() != fb.signum() {
            push(bisect(&f, a, b), false);
            continue;
        }
        if slopes[i].signum() == slopes[i + 1].signum() {
            continue;
        }
        // f has an extremum in (a, b).
        let ext = bisect(&df, a, b);
        let fe = f(ext);
        if fe.abs() <= tangent_tol {
            push(ext, true);
        } else if fe.signum() != fa.signum() {
            push(bisect(&f, a, ext), false);
            push(bisect(&f, ext, b), false);
        }
    }
    roots
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_finds_sqrt_two() {
        let r = bisect(|x: f64| x * x - 2.0, 0.0, 2.0);
        assert!((r - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn bisect_accepts_reversed_signs() {
        let r = bisect(|x: f64| 1.0 - x, 0.0, 3.0);
        assert!((r - 1.0).abs() < 1e-15);
    }

    #[test]
    fn scan_finds_three_simple_roots() {
        let f = |x: f64| x * x * x - x;
        let df = |x: f64| 3.0 * x * x - 1.0;
        let roots = scan_roots(f, df, -2.0, 2.0, 101, 1e-14);
        let xs: Vec<f64> = roots.iter().map(|r| r.x).collect();
        assert_eq!(xs.len(), 3);
        for (x, want) in xs.iter().zip([-1.0, 0.0, 1.0]) {
            assert!((x - want).abs() < 1e-14, "{x}");
        }
    }

    #[test]
    fn scan_resolves_close_pair_inside_one_cell() {
        // Roots at 0.5 and 0.5 + 1e-6, far below the grid spacing.
        let f = |x: f64| (x - 0.5) * (x - 0.500001);
        let df = |x: f64| 2.0 * x - 1.000001;
        let roots = scan_roots(f, df, 0.0, 1.0, 11, 1e-18);
        assert_eq!(roots.len(), 2);
        assert!((roots[0].x - 0.5).abs() < 1e-12);
        assert!((roots[1].x - 0.500001).abs() < 1e-12);
    }

    #[test]
    fn scan_flags_tangency() {
        let f = |x: f64| (x - 0.3) * (x - 0.3);
        let df = |x: f64| 2.0 * (x - 0.3);
        let roots = scan_roots(f, df, 0.0, 1.0, 16, 1e-14);
        assert_eq!(roots.len(), 1);
        assert!(roots[0].tangent);
        assert!((roots[0].x - 0.3).abs() < 1e-7);
    }
}
