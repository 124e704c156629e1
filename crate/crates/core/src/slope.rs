//! Rational slope machinery for native `\line` and `\vector` arguments:
//! reduction to coprime pairs, bounded best-rational direction approximation
//! and validation.
//!
//! The picture environment only accepts integer direction pairs with
//! components up to 6 for lines and 4 for vectors, with no common divisor.

use thiserror::Error;

use crate::diag::{Diagnostic, Rule};
use crate::scalar::{cast, Scalar};
use crate::scene::Point;

/// Tolerance for treating a real coordinate delta as an integer; transforms
/// keep coordinates real-valued so exact integers can carry float dust.
const INT_EPS: f64 = 1e-9;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum SlopeError {
    #[error("direction vector is zero")]
    ZeroDirection,
    #[error("direction is not an integer ratio")]
    NotRational,
    #[error("slope pair does not match the segment direction")]
    InconsistentSlope,
}

/// Coprime integer direction pair `(a, b)`: `a` horizontal, `b` vertical.
///
/// Constructed values are guaranteed non-zero and reduced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SlopePair {
    a: i64,
    b: i64,
}

impl SlopePair {
    /// Validates that `(a, b)` is non-zero and coprime.
    pub fn new(a: i64, b: i64) -> Result<Self, SlopeError> {
        if a == 0 && b == 0 {
            return Err(SlopeError::ZeroDirection);
        }
        if gcd(a, b) != 1 {
            return Err(SlopeError::NotRational);
        }
        Ok(SlopePair { a, b })
    }

    pub fn a(&self) -> i64 {
        self.a
    }

    pub fn b(&self) -> i64 {
        self.b
    }

    /// Largest component magnitude, the quantity the bounds apply to.
    pub fn max_abs(&self) -> i64 {
        self.a.abs().max(self.b.abs())
    }
}

/// Which command the pair is destined for; determines the magnitude bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SlopeKind {
    Line,
    Vector,
}

impl SlopeKind {
    pub fn bound(self) -> i64 {
        match self {
            SlopeKind::Line => 6,
            SlopeKind::Vector => 4,
        }
    }
}

pub(crate) fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Reduces an integer-valued direction to its coprime pair, signs preserved.
///
/// Both components must be within `1e-9` of an integer; otherwise the
/// direction has no exact slope-pair representation and `NotRational` is
/// returned. `(0, 0)` is `ZeroDirection`.
pub fn reduce_direction<T: Scalar>(dx: T, dy: T) -> Result<SlopePair, SlopeError> {
    if dx == T::zero() && dy == T::zero() {
        return Err(SlopeError::ZeroDirection);
    }
    let eps = cast::<T>(INT_EPS);
    let rx = dx.round();
    let ry = dy.round();
    if (dx - rx).abs() > eps || (dy - ry).abs() > eps {
        return Err(SlopeError::NotRational);
    }
    let ix = rx.to_i64().ok_or(SlopeError::NotRational)?;
    let iy = ry.to_i64().ok_or(SlopeError::NotRational)?;
    if ix == 0 && iy == 0 {
        // Sub-integer dust rounds to zero; treat as a zero direction.
        return Err(SlopeError::ZeroDirection);
    }
    let g = gcd(ix, iy);
    Ok(SlopePair {
        a: ix / g,
        b: iy / g,
    })
}

/// Absolute angular distance between two directions, wrapped into `[0, pi]`.
fn angular_distance(theta_a: f64, theta_b: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut d = (theta_a - theta_b) % two_pi;
    if d > std::f64::consts::PI {
        d -= two_pi;
    } else if d < -std::f64::consts::PI {
        d += two_pi;
    }
    d.abs()
}

/// True when `(a, b)` beats the incumbent under the deterministic tie-break:
/// smaller error, then smaller `|a|+|b|`, then larger `a`, then larger `b`.
fn beats(err: f64, a: i64, b: i64, best_err: f64, best_a: i64, best_b: i64) -> bool {
    if err != best_err {
        return err < best_err;
    }
    let s = a.abs() + b.abs();
    let bs = best_a.abs() + best_b.abs();
    if s != bs {
        return s < bs;
    }
    if a != best_a {
        return a > best_a;
    }
    b > best_b
}

/// Best bounded coprime approximation of a direction.
///
/// Returns the coprime pair with `max(|a|,|b|) <= bound(kind)` minimizing the
/// angular distance to `atan2(dy, dx)`, together with the achieved error in
/// radians. The winning pair always points into the input's half plane. The
/// candidate grid is tiny (at most 13x13), so the search is exhaustive.
pub fn rationalize_slope<T: Scalar>(
    dx: T,
    dy: T,
    kind: SlopeKind,
) -> Result<(SlopePair, T), SlopeError> {
    if dx == T::zero() && dy == T::zero() {
        return Err(SlopeError::ZeroDirection);
    }
    let bound = kind.bound();
    // Exactly representable directions short-circuit with a zero error, which
    // keeps the result scale-invariant without trusting atan2 rounding.
    if let Ok(pair) = reduce_direction(dx, dy) {
        if pair.max_abs() <= bound {
            return Ok((pair, T::zero()));
        }
    }
    let target = dy
        .to_f64()
        .unwrap_or(f64::NAN)
        .atan2(dx.to_f64().unwrap_or(f64::NAN));
    if !target.is_finite() {
        return Err(SlopeError::ZeroDirection);
    }
    let mut best: Option<(i64, i64, f64)> = None;
    for a in -bound..=bound {
        for b in -bound..=bound {
            if (a == 0 && b == 0) || gcd(a, b) != 1 {
                continue;
            }
            let err = angular_distance(target, (b as f64).atan2(a as f64));
            let better = match best {
                None => true,
                Some((ba, bb, be)) => beats(err, a, b, be, ba, bb),
            };
            if better {
                best = Some((a, b, err));
            }
        }
    }
    let (a, b, err) = best.expect("candidate grid is never empty");
    Ok((SlopePair { a, b }, cast::<T>(err)))
}

/// Validates a raw pair against the picture-environment constraints.
///
/// Emits E01 when a component exceeds the bound for `kind`, E02 when the
/// components share a divisor, E03 for the zero pair. Valid pairs produce an
/// empty list. Diagnostics carry no span; the linter attaches one.
pub fn validate_slope(a: i64, b: i64, kind: SlopeKind) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let bound = kind.bound();
    let what = match kind {
        SlopeKind::Line => "line",
        SlopeKind::Vector => "vector",
    };
    if a.abs().max(b.abs()) > bound {
        out.push(Diagnostic::new(
            Rule::SlopeBound,
            format!("{what} slope ({a},{b}) exceeds the magnitude bound {bound}"),
        ));
    }
    let g = gcd(a, b);
    if g > 1 {
        out.push(Diagnostic::new(
            Rule::CommonDivisor,
            format!("{what} slope ({a},{b}) has common divisor {g}"),
        ));
    }
    if a == 0 && b == 0 {
        out.push(Diagnostic::new(
            Rule::ZeroSlope,
            format!("{what} slope (0,0) has no direction"),
        ));
    }
    out
}

/// The `{l}` argument for a native line or vector from `p0` to `p1`.
///
/// For non-vertical pairs this is the rounded horizontal extent of the
/// stroke; for vertical pairs (`a == 0`) it is the rounded vertical extent.
/// The pair must match `reduce_direction(p1 - p0)` exactly.
pub fn line_length_arg<T: Scalar>(
    p0: Point<T>,
    p1: Point<T>,
    pair: SlopePair,
) -> Result<i64, SlopeError> {
    let reduced = reduce_direction(p1.x - p0.x, p1.y - p0.y)?;
    if reduced != pair {
        return Err(SlopeError::InconsistentSlope);
    }
    Ok(projection_length(p0, p1, pair))
}

/// Length argument without the consistency check, for approximate emission.
pub(crate) fn projection_length<T: Scalar>(p0: Point<T>, p1: Point<T>, pair: SlopePair) -> i64 {
    let extent = if pair.a != 0 {
        (p1.x - p0.x).abs()
    } else {
        (p1.y - p0.y).abs()
    };
    extent.round().to_i64().unwrap_or(i64::MAX)
}
