//! Bezier evaluation, curve flattening and the composition rules that lower
//! high-level primitives (arrows, rectangles, arbitrary-slope segments,
//! optionally circles) to emitter-ready parts.

use thiserror::Error;

use crate::scalar::{cast, Scalar};
use crate::scene::Point;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum CurveError {
    #[error("bernstein index {i} out of range for degree {n}")]
    IndexOutOfRange { i: u32, n: u32 },
    #[error("parameter t = {0} outside [0,1]")]
    ParamOutOfRange(f64),
    #[error("direction vector is zero")]
    ZeroDirection,
}

/// Ordered point chain produced by flattening.
///
/// Stroked geometry always yields two or more points; a single point is
/// allowed for anchor-only geometry (labels), which compares by position.
#[derive(Clone, Debug, PartialEq)]
pub struct Polyline<T> {
    pub points: Vec<Point<T>>,
}

impl<T: Scalar> Polyline<T> {
    pub fn new(points: Vec<Point<T>>) -> Self {
        Polyline { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Flattening parameters.
///
/// `t_step` sweeps the curve parameter from 0 and the final sample is forced
/// to exactly `t = 1`, so curve endpoints are always exact even when
/// `1/t_step` is not integral.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlattenPolicy<T> {
    /// Parameter increment in `(0, 1]`.
    pub t_step: T,
    /// Number of polygon sides a circle flattens to (at least 8).
    pub circle_segments: usize,
}

impl<T: Scalar> FlattenPolicy<T> {
    pub fn new(t_step: T, circle_segments: usize) -> Option<Self> {
        let policy = FlattenPolicy {
            t_step,
            circle_segments,
        };
        policy.is_valid().then_some(policy)
    }

    pub fn is_valid(&self) -> bool {
        self.t_step > T::zero() && self.t_step <= T::one() && self.circle_segments >= 8
    }
}

impl<T: Scalar> Default for FlattenPolicy<T> {
    fn default() -> Self {
        FlattenPolicy {
            t_step: cast(0.01),
            circle_segments: 100,
        }
    }
}

/// Arrowhead shape: two barbs splayed around the reversed shaft direction.
///
/// The defaults put the barb offsets for a horizontal shaft at exactly
/// `(-7, +-3)` from the tip.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ArrowStyle<T> {
    pub barb_length: T,
    pub barb_half_angle: T,
}

impl<T: Scalar> Default for ArrowStyle<T> {
    fn default() -> Self {
        ArrowStyle {
            barb_length: cast::<T>(58.0).sqrt(),
            barb_half_angle: (cast::<T>(3.0) / cast::<T>(7.0)).atan(),
        }
    }
}

/// Bernstein basis polynomial `C(n,i) * t^i * (1-t)^(n-i)`.
pub fn bernstein<T: Scalar>(i: u32, n: u32, t: T) -> Result<T, CurveError> {
    if i > n {
        return Err(CurveError::IndexOutOfRange { i, n });
    }
    check_param(t)?;
    let c = cast::<T>(binomial(n, i));
    Ok(c * t.powi(i as i32) * (T::one() - t).powi((n - i) as i32))
}

fn binomial(n: u32, i: u32) -> f64 {
    let i = i.min(n - i);
    let mut c = 1.0;
    for k in 1..=i {
        c = c * (n - i + k) as f64 / k as f64;
    }
    c
}

fn check_param<T: Scalar>(t: T) -> Result<(), CurveError> {
    if t < T::zero() || t > T::one() {
        return Err(CurveError::ParamOutOfRange(t.to_f64().unwrap_or(f64::NAN)));
    }
    Ok(())
}

/// Point on the quadratic Bezier through `p0`, `c`, `p1` at parameter `t`,
/// evaluated with the expanded three-term form.
pub fn quad_point<T: Scalar>(
    p0: Point<T>,
    c: Point<T>,
    p1: Point<T>,
    t: T,
) -> Result<Point<T>, CurveError> {
    check_param(t)?;
    Ok(quad_point_unchecked(p0, c, p1, t))
}

fn quad_point_unchecked<T: Scalar>(p0: Point<T>, c: Point<T>, p1: Point<T>, t: T) -> Point<T> {
    let one = T::one();
    let two = one + one;
    let u = one - t;
    Point::new(
        u * u * p0.x + two * t * u * c.x + t * t * p1.x,
        u * u * p0.y + two * t * u * c.y + t * t * p1.y,
    )
}

/// Samples the curve at `t = 0, step, 2*step, ...` with the final sample
/// forced to exactly `t = 1`; yields `ceil(1/step) + 1` points.
pub fn flatten_quad<T: Scalar>(
    p0: Point<T>,
    c: Point<T>,
    p1: Point<T>,
    policy: &FlattenPolicy<T>,
) -> Polyline<T> {
    assert!(policy.is_valid(), "invalid flatten policy");
    let inv = T::one() / policy.t_step;
    // Guard against 1/step landing a hair off an integer.
    let tol = inv.round().max(T::one()) * T::epsilon() * cast(8.0);
    let steps = if (inv - inv.round()).abs() <= tol {
        inv.round()
    } else {
        inv.ceil()
    };
    let n = steps.to_usize().unwrap_or(1).max(1);
    let mut points = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let t = if k == n {
            T::one()
        } else {
            cast::<T>(k as f64) * policy.t_step
        };
        points.push(quad_point_unchecked(p0, c, p1, t));
    }
    Polyline::new(points)
}

/// Represents a straight segment as the pointwise-identical degenerate
/// quadratic: the interior control is the exact midpoint.
pub fn segment_as_quad<T: Scalar>(p0: Point<T>, p1: Point<T>) -> (Point<T>, Point<T>, Point<T>) {
    (p0, p0.midpoint(p1), p1)
}

/// Far endpoints of the two arrowhead barbs at `tip`; both barbs start at
/// the tip. The first endpoint lies to the left of the shaft direction, the
/// second to the right, matching emission order.
pub fn arrowhead<T: Scalar>(
    tip: Point<T>,
    direction: (T, T),
    style: &ArrowStyle<T>,
) -> Result<(Point<T>, Point<T>), CurveError> {
    let (dx, dy) = direction;
    let norm = (dx * dx + dy * dy).sqrt();
    if norm == T::zero() || !norm.is_finite() {
        return Err(CurveError::ZeroDirection);
    }
    // Reversed unit direction, then rotated by -+ the half angle.
    let vx = -dx / norm;
    let vy = -dy / norm;
    let (sin, cos) = style.barb_half_angle.sin_cos();
    let len = style.barb_length;
    let left = Point::new(
        tip.x + len * (vx * cos + vy * sin),
        tip.y + len * (vy * cos - vx * sin),
    );
    let right = Point::new(
        tip.x + len * (vx * cos - vy * sin),
        tip.y + len * (vy * cos + vx * sin),
    );
    Ok((left, right))
}

/// The four rectangle edges in order bottom, right, top, left, walking
/// counterclockwise from the minimum corner; each edge starts where the
/// previous one ended.
pub fn rect_as_segments<T: Scalar>(
    corner: Point<T>,
    width: T,
    height: T,
) -> [(Point<T>, Point<T>); 4] {
    let bl = corner;
    let br = Point::new(corner.x + width, corner.y);
    let tr = Point::new(corner.x + width, corner.y + height);
    let tl = Point::new(corner.x, corner.y + height);
    [(bl, br), (br, tr), (tr, tl), (tl, bl)]
}

/// Approximates a circle by `n_arcs` quadratic arcs.
///
/// Arc endpoints lie exactly on the circle at angles `2*pi*k/n_arcs`;
/// interior controls sit at the tangent-line intersections, so the maximum
/// radial deviation is `r * (1/cos(pi/n_arcs) - 1)`.
pub fn circle_as_quads<T: Scalar>(
    center: Point<T>,
    diameter: T,
    n_arcs: usize,
) -> Vec<(Point<T>, Point<T>, Point<T>)> {
    assert!(n_arcs >= 4, "need at least 4 arcs");
    let r = diameter / (T::one() + T::one());
    let tau = cast::<T>(2.0 * std::f64::consts::PI);
    let n = cast::<T>(n_arcs as f64);
    let control_r = r / (tau / (n + n)).cos();
    let on_circle = |k: T, radius: T| {
        let angle = tau * k / n;
        Point::new(
            center.x + radius * angle.cos(),
            center.y + radius * angle.sin(),
        )
    };
    let half = cast::<T>(0.5);
    (0..n_arcs)
        .map(|k| {
            let k = cast::<T>(k as f64);
            (
                on_circle(k, r),
                on_circle(k + half, control_r),
                on_circle(k + T::one(), r),
            )
        })
        .collect()
}
