//! Values that are either exactly known rationals or certified enclosures.
//!
//! Evaluators in the terminating regimes produce [`Value::Exact`]; evaluators
//! that must truncate an infinite series produce [`Value::Interval`], a pair
//! of rational endpoints that the true value is proven to lie between. The
//! comparison rule used throughout the crate is the honest one: exact values
//! must be equal, an exact value must lie inside an interval, and two
//! intervals must overlap. No floating-point sneaks in at any point.

use std::fmt;

use serde_json::json;

use crate::arith::Rational;

/// An exact rational or a certified two-sided enclosure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    Exact(Rational),
    Interval { lo: Rational, hi: Rational },
}

impl Value {
    pub fn exact(v: Rational) -> Self {
        Value::Exact(v)
    }

    /// Builds an interval; panics if `lo > hi` (an enclosure that excludes
    /// everything is a bug at the construction site, not a data state).
    pub fn interval(lo: Rational, hi: Rational) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        Value::Interval { lo, hi }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Value::Exact(_))
    }

    pub fn lo(&self) -> &Rational {
        match self {
            Value::Exact(v) => v,
            Value::Interval { lo, .. } => lo,
        }
    }

    pub fn hi(&self) -> &Rational {
        match self {
            Value::Exact(v) => v,
            Value::Interval { hi, .. } => hi,
        }
    }

    pub fn width(&self) -> Rational {
        self.hi() - self.lo()
    }

    /// Midpoint, for presentation only.
    pub fn midpoint(&self) -> Rational {
        (self.lo() + self.hi()) * Rational::new(1, 2)
    }

    pub fn add(&self, other: &Value) -> Value {
        match (self.is_exact(), other.is_exact()) {
            (true, true) => Value::exact(self.lo() + other.lo()),
            _ => Value::interval(self.lo() + other.lo(), self.hi() + other.hi()),
        }
    }

    pub fn sub(&self, other: &Value) -> Value {
        match (self.is_exact(), other.is_exact()) {
            (true, true) => Value::exact(self.lo() - other.lo()),
            _ => Value::interval(self.lo() - other.hi(), self.hi() - other.lo()),
        }
    }

    /// Multiplication by an exact scalar; flips endpoints for negative
    /// factors.
    pub fn scale(&self, factor: &Rational) -> Value {
        match self {
            Value::Exact(v) => Value::exact(v * factor),
            Value::Interval { lo, hi } => {
                if factor.is_negative() {
                    Value::interval(hi * factor, lo * factor)
                } else {
                    Value::interval(lo * factor, hi * factor)
                }
            }
        }
    }

    pub fn contains(&self, point: &Rational) -> bool {
        self.lo() <= point && point <= self.hi()
    }

    /// The consistency predicate: equality for two exact values, containment
    /// for exact-vs-interval, nonempty intersection for two intervals.
    pub fn consistent_with(&self, other: &Value) -> bool {
        self.lo() <= other.hi() && other.lo() <= self.hi()
    }

    /// Squared distance from a point to this set (zero when contained).
    /// Squared so that everything stays rational.
    pub fn distance_sq(&self, point: &Rational) -> Rational {
        if self.contains(point) {
            return Rational::zero();
        }
        let gap = if point < self.lo() {
            self.lo() - point
        } else {
            point - self.hi()
        };
        &gap * &gap
    }

    /// JSON form: `"p/q"` for exact values, `{"lo": "...", "hi": "..."}` for
    /// intervals.
    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Value::Exact(v) => json!(v.to_string()),
            Value::Interval { lo, hi } => json!({
                "lo": lo.to_string(),
                "hi": hi.to_string(),
            }),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Exact(v) => write!(f, "{v}"),
            Value::Interval { lo, hi } => write!(f, "{lo}..{hi}"),
        }
    }
}

impl From<Rational> for Value {
    fn from(v: Rational) -> Self {
        Value::Exact(v)
    }
}
