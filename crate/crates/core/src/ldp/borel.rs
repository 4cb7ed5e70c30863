use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One interval of a [`BorelSubset`]. `high` may be `+inf`, in which case it
/// is always open.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub low: f64,
    pub high: f64,
    pub low_closed: bool,
    pub high_closed: bool,
}

impl Interval {
    pub fn new(low: f64, high: f64, low_closed: bool, high_closed: bool) -> Self {
        Interval {
            low,
            high,
            low_closed,
            high_closed: high_closed && high.is_finite(),
        }
    }

    pub fn open(low: f64, high: f64) -> Self {
        Self::new(low, high, false, false)
    }

    pub fn closed(low: f64, high: f64) -> Self {
        Self::new(low, high, true, true)
    }

    /// `(low, +inf)`.
    pub fn above(low: f64) -> Self {
        Self::new(low, f64::INFINITY, false, false)
    }

    pub fn point(x: f64) -> Self {
        Self::closed(x, x)
    }

    /// Lebesgue-null: a single point.
    pub fn is_degenerate(&self) -> bool {
        self.low == self.high
    }

    fn is_empty(&self) -> bool {
        self.is_degenerate() && !(self.low_closed && self.high_closed)
    }

    pub fn contains(&self, z: f64) -> bool {
        let above = if self.low_closed {
            z >= self.low
        } else {
            z > self.low
        };
        let below = if self.high_closed {
            z <= self.high
        } else {
            z < self.high
        };
        above && below
    }

    fn validate(&self) -> Result<()> {
        if self.low.is_nan() || self.high.is_nan() {
            return Err(Error::domain("interval endpoint is NaN"));
        }
        if !self.low.is_finite() {
            return Err(Error::domain(format!(
                "interval low end must be finite, got {}",
                self.low
            )));
        }
        if self.low < 1.0 {
            return Err(Error::domain(format!(
                "sets must lie in [1, inf), interval starts at {}",
                self.low
            )));
        }
        if self.low > self.high {
            return Err(Error::domain(format!(
                "interval has low {} > high {}",
                self.low, self.high
            )));
        }
        Ok(())
    }
}

/// A finite union of intervals in `[1, +inf)`, kept sorted and pairwise
/// disjoint.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct BorelSubset {
    intervals: Vec<Interval>,
}

impl BorelSubset {
    /// Validates and normalizes: empty pieces dropped, overlapping or touching
    /// pieces merged, result sorted by left endpoint.
    pub fn new(intervals: impl IntoIterator<Item = Interval>) -> Result<Self> {
        let mut pieces = Vec::new();
        for iv in intervals {
            let iv = Interval::new(iv.low, iv.high, iv.low_closed, iv.high_closed);
            iv.validate()?;
            if !iv.is_empty() {
                pieces.push(iv);
            }
        }
        // closed left ends sort first so merging keeps them
        pieces.sort_by(|a, b| {
            a.low
                .total_cmp(&b.low)
                .then_with(|| b.low_closed.cmp(&a.low_closed))
        });
        let mut merged: Vec<Interval> = Vec::with_capacity(pieces.len());
        for iv in pieces {
            match merged.last_mut() {
                Some(last) if joins(last, &iv) => {
                    if iv.high > last.high {
                        last.high = iv.high;
                        last.high_closed = iv.high_closed;
                    } else if iv.high == last.high {
                        last.high_closed |= iv.high_closed;
                    }
                }
                _ => merged.push(iv),
            }
        }
        Ok(BorelSubset { intervals: merged })
    }

    pub fn single(iv: Interval) -> Result<Self> {
        Self::new([iv])
    }

    /// `(low, +inf)`.
    pub fn above(low: f64) -> Result<Self> {
        Self::single(Interval::above(low))
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    /// Intervals of positive length.
    pub fn solid_intervals(&self) -> impl Iterator<Item = &Interval> {
        self.intervals.iter().filter(|iv| !iv.is_degenerate())
    }

    pub fn is_null(&self) -> bool {
        self.solid_intervals().next().is_none()
    }

    pub fn contains(&self, z: f64) -> bool {
        self.intervals.iter().any(|iv| iv.contains(z))
    }
}

/// Whether `next` (sorted after `last`) overlaps or touches `last` with no gap.
fn joins(last: &Interval, next: &Interval) -> bool {
    next.low < last.high || (next.low == last.high && (next.low_closed || last.high_closed))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merges_overlaps() {
        let a = BorelSubset::new([
            Interval::new(1.0, 2.0, true, false),
            Interval::open(1.5, 3.0),
        ])
        .unwrap();
        assert_eq!(a.intervals(), &[Interval::new(1.0, 3.0, true, false)]);
    }

    #[test]
    fn touching_open_ends_stay_apart() {
        let a = BorelSubset::new([Interval::open(2.0, 3.0), Interval::open(1.0, 2.0)]).unwrap();
        assert_eq!(a.intervals().len(), 2);
        assert!(!a.contains(2.0));
        let b = BorelSubset::new([
            Interval::new(1.0, 2.0, false, true),
            Interval::open(2.0, 3.0),
        ])
        .unwrap();
        assert_eq!(b.intervals(), &[Interval::open(1.0, 3.0)]);
    }

    #[test]
    fn contained_piece_is_absorbed() {
        let a = BorelSubset::new([Interval::closed(1.0, 10.0), Interval::open(2.0, 3.0)]).unwrap();
        assert_eq!(a.intervals(), &[Interval::closed(1.0, 10.0)]);
    }

    #[test]
    fn point_inside_interval_merges() {
        let a = BorelSubset::new([Interval::point(2.0), Interval::open(1.0, 5.0)]).unwrap();
        assert_eq!(a.intervals(), &[Interval::open(1.0, 5.0)]);
    }

    #[test]
    fn null_sets() {
        assert!(BorelSubset::single(Interval::point(2.0)).unwrap().is_null());
        assert!(BorelSubset::new([]).unwrap().is_null());
        // (2,2) is empty and dropped
        let e = BorelSubset::single(Interval::open(2.0, 2.0)).unwrap();
        assert!(e.intervals().is_empty());
        assert!(!BorelSubset::above(1.0).unwrap().is_null());
    }

    #[test]
    fn rejects_below_one_and_reversed() {
        assert!(BorelSubset::single(Interval::open(0.5, 2.0)).is_err());
        assert!(BorelSubset::single(Interval::open(3.0, 2.0)).is_err());
        assert!(BorelSubset::single(Interval::open(f64::NAN, 2.0)).is_err());
    }

    #[test]
    fn infinite_end_is_open() {
        let iv = Interval::new(2.0, f64::INFINITY, true, true);
        assert!(!iv.high_closed);
        assert!(iv.contains(1e300));
        assert!(iv.contains(2.0));
    }
}
