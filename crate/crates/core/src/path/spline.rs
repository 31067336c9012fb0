//! Clamped uniform cubic B-spline smoothing, evaluated span by span in
//! Bezier form.

use crate::Point3;

/// Bernstein polynomial `C(big_n, n) s^n (1 - s)^(big_n - n)`.
pub fn bernstein_basis(n: usize, big_n: usize, s: f64) -> f64 {
    debug_assert!(n <= big_n);
    let mut c = 1.0;
    for i in 0..n.min(big_n - n) {
        c = c * (big_n - i) as f64 / (i + 1) as f64;
    }
    c * s.powi(n as i32) * (1.0 - s).powi((big_n - n) as i32)
}

/// Point on the cubic Bezier curve with control points `b` at parameter `s`.
#[inline]
pub fn bezier_point(b: &[Point3; 4], s: f64) -> Point3 {
    let t = 1.0 - s;
    let w0 = t * t * t;
    let w1 = 3.0 * s * t * t;
    let w2 = 3.0 * s * s * t;
    let w3 = s * s * s;
    b[0] * w0 + b[1] * w1 + b[2] * w2 + b[3] * w3
}

/// Number of cubic spans the smoothed curve through `n` control points has.
#[inline]
pub fn span_count(n: usize) -> usize {
    if n <= 4 {
        1
    } else {
        n - 3
    }
}

/// Knot `j` of the clamped uniform knot vector for `n >= 4` points. Knots at
/// or beyond `n` are clamped to `n - 3`; `n = usize::MAX` gives the
/// unclamped tail used for prefixes whose end is not yet known.
#[inline]
fn knot(j: usize, n: usize) -> f64 {
    let t = j.saturating_sub(3);
    let end = n.saturating_sub(3);
    t.min(end) as f64
}

/// Bezier control points of span `s` of the curve through `p`, where `p`
/// holds at least the four points `P_s..P_{s+3}` starting at `p[0]`, and `n`
/// is the total control-point count (or `usize::MAX` when the curve
/// continues for at least two more points past `P_{s+3}`).
///
/// Curves with fewer than four points are single Bezier curves of lower
/// degree, raised to cubic here.
pub fn span_bezier(p: &[Point3], s: usize, n: usize) -> [Point3; 4] {
    match n {
        2 => {
            let d = (p[1] - p[0]) / 3.0;
            return [p[0], p[0] + d, p[0] + d * 2.0, p[1]];
        }
        3 => {
            return [
                p[0],
                (p[0] + p[1] * 2.0) / 3.0,
                (p[1] * 2.0 + p[2]) / 3.0,
                p[2],
            ];
        }
        _ => {}
    }
    let k: [f64; 6] = std::array::from_fn(|i| knot(s + 1 + i, n));
    let d = [p[0], p[1], p[2], p[3]];
    let (u0, u1) = (k[2], k[3]);
    let blossom = |x: [f64; 3]| {
        let mut level = d;
        for r in 1..=3 {
            for i in (r..=3).rev() {
                let lo = k[i - 1];
                let hi = k[i + 3 - r];
                let a = (x[r - 1] - lo) / (hi - lo);
                level[i] = level[i - 1] * (1.0 - a) + level[i] * a;
            }
        }
        level[3]
    };
    let mut b = [
        blossom([u0, u0, u0]),
        blossom([u0, u0, u1]),
        blossom([u0, u1, u1]),
        blossom([u1, u1, u1]),
    ];
    if s == 0 {
        b[0] = p[0];
    }
    if n != usize::MAX && s + 4 == n {
        b[3] = p[3];
    }
    b
}

/// All Bezier spans of the smoothed curve through `points`.
pub fn bezier_spans(points: &[Point3]) -> Vec<[Point3; 4]> {
    let n = points.len();
    if n < 2 {
        return Vec::new();
    }
    if n <= 3 {
        return vec![span_bezier(points, 0, n)];
    }
    (0..n - 3).map(|s| span_bezier(&points[s..], s, n)).collect()
}

/// Appends samples of the span to `out`, excluding its start point, so that
/// consecutive samples (starting from `b[0]`) are at most `ds_max` apart.
pub fn sample_span(b: &[Point3; 4], ds_max: f64, out: &mut Vec<Point3>) {
    let poly = (b[1] - b[0]).norm() + (b[2] - b[1]).norm() + (b[3] - b[2]).norm();
    let n = ((poly / ds_max).ceil() as usize).max(1);
    let mut prev = (0.0, b[0]);
    for i in 1..=n {
        let s = i as f64 / n as f64;
        let p = if i == n { b[3] } else { bezier_point(b, s) };
        refine(b, prev, (s, p), ds_max, out, 0);
        out.push(p);
        prev = (s, p);
    }
}

// Bisects chords longer than ds_max, pushing interior points in order.
fn refine(b: &[Point3; 4], a: (f64, Point3), c: (f64, Point3), ds_max: f64, out: &mut Vec<Point3>, depth: u32) {
    if (c.1 - a.1).norm() <= ds_max || depth > 40 {
        return;
    }
    let sm = 0.5 * (a.0 + c.0);
    let m = (sm, bezier_point(b, sm));
    refine(b, a, m, ds_max, out, depth + 1);
    out.push(m.1);
    refine(b, m, c, ds_max, out, depth + 1);
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn bernstein_values() {
        assert_eq!(bernstein_basis(0, 3, 0.0), 1.0);
        assert_eq!(bernstein_basis(3, 3, 1.0), 1.0);
        assert_relative_eq!(bernstein_basis(1, 3, 0.5), 0.375, epsilon = 1e-15);
        assert_relative_eq!(bernstein_basis(2, 5, 0.3), 10.0 * 0.09 * 0.343, epsilon = 1e-15);
    }

    #[test]
    fn bezier_point_matches_bernstein_sum() {
        let b = [
            Point3::new(0.0, 1.0, 2.0),
            Point3::new(3.0, -1.0, 0.5),
            Point3::new(2.0, 7.0, 1.0),
            Point3::new(9.0, 4.0, -3.0),
        ];
        for s in [0.0, 0.1, 0.5, 0.77, 1.0] {
            let direct: Point3 = (0..4).map(|i| b[i] * bernstein_basis(i, 3, s)).sum();
            assert!((bezier_point(&b, s) - direct).norm() < 1e-12);
        }
    }

    /// Cox-de Boor evaluation of the clamped spline, used as an oracle.
    fn de_boor_reference(p: &[Point3], u: f64) -> Point3 {
        let n = p.len();
        let knots: Vec<f64> = (0..n + 4).map(|j| knot(j, n)).collect();
        fn basis(knots: &[f64], i: usize, d: usize, u: f64, end: f64) -> f64 {
            if d == 0 {
                let inside = knots[i] <= u && u < knots[i + 1];
                let last = u == end && knots[i] < knots[i + 1] && knots[i + 1] == end;
                return if inside || last { 1.0 } else { 0.0 };
            }
            let mut v = 0.0;
            let a = knots[i + d] - knots[i];
            if a > 0.0 {
                v += (u - knots[i]) / a * basis(knots, i, d - 1, u, end);
            }
            let c = knots[i + d + 1] - knots[i + 1];
            if c > 0.0 {
                v += (knots[i + d + 1] - u) / c * basis(knots, i + 1, d - 1, u, end);
            }
            v
        }
        let end = (n - 3) as f64;
        (0..n).map(|i| p[i] * basis(&knots, i, 3, u, end)).sum()
    }

    #[test]
    fn spans_match_cox_de_boor() {
        let p: Vec<Point3> = (0..8)
            .map(|i| Point3::new(i as f64 * 10.0, ((i * 7) % 5) as f64 * 13.0, ((i * 3) % 4) as f64 - 2.0))
            .collect();
        let spans = bezier_spans(&p);
        assert_eq!(spans.len(), 5);
        for (s, b) in spans.iter().enumerate() {
            for f in [0.0, 0.25, 0.5, 0.9] {
                let got = bezier_point(b, f);
                let expect = de_boor_reference(&p, s as f64 + f);
                assert!((got - expect).norm() < 1e-9, "span {s} at {f}: {got:?} vs {expect:?}");
            }
        }
        assert_eq!(spans[0][0], p[0]);
        assert_eq!(spans[4][3], p[7]);
    }

    #[test]
    fn prefix_spans_do_not_depend_on_the_end() {
        let p: Vec<Point3> = (0..9).map(|i| Point3::new(i as f64, (i * i) as f64, 0.0)).collect();
        for n in 6..=9 {
            let full = bezier_spans(&p[..n]);
            for s in 0..=n - 6 {
                assert_eq!(span_bezier(&p[s..], s, usize::MAX), full[s], "n={n} s={s}");
            }
        }
    }

    #[test]
    fn low_point_counts_are_single_beziers() {
        let a = Point3::new(0.0, 0.0, 0.0);
        let b = Point3::new(3.0, 6.0, 9.0);
        let line = bezier_spans(&[a, b]);
        assert_eq!(line.len(), 1);
        for s in [0.1, 0.5, 0.9] {
            let q = bezier_point(&line[0], s);
            assert!((q - b * s).norm() < 1e-12);
        }
        let c = Point3::new(6.0, 0.0, 0.0);
        let quad = bezier_spans(&[a, b, c]);
        let q = bezier_point(&quad[0], 0.5);
        assert!((q - (a * 0.25 + b * 0.5 + c * 0.25)).norm() < 1e-12);
    }

    #[test]
    fn sampling_respects_spacing() {
        let b = [
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1000.0, 0.0, 0.0),
            Point3::new(1000.0, 0.0, 0.0),
        ];
        let mut out = Vec::new();
        sample_span(&b, 25.0, &mut out);
        assert_eq!(*out.last().unwrap(), b[3]);
        let mut prev = b[0];
        for p in &out {
            assert!((p - prev).norm() <= 25.0 + 1e-9);
            prev = *p;
        }
    }
}
