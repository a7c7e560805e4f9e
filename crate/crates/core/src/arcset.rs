//! Counting windows: finite unions of half-open intervals.
//!
//! An [`ArcSet`] on the circle lives in `[-π, π)`; windows for the sine
//! kernel process live on the real line and only need finite endpoints.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Domain {
    /// Eigenangles, endpoints in `[-π, π]`.
    Circle,
    /// Unbounded real line.
    Line,
}

/// Disjoint, sorted half-open intervals `[lo, hi)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<[f64; 2]>", into = "Vec<[f64; 2]>")]
pub struct ArcSet {
    intervals: Vec<(f64, f64)>,
    domain: Domain,
}

impl ArcSet {
    /// Canonical window on the circle. Overlapping and touching inputs are merged.
    pub fn new(intervals: &[(f64, f64)]) -> Result<Self> {
        Self::build(intervals, Domain::Circle)
    }

    /// Window on the real line (used with the sine kernel).
    pub fn on_line(intervals: &[(f64, f64)]) -> Result<Self> {
        Self::build(intervals, Domain::Line)
    }

    pub fn empty() -> Self {
        ArcSet {
            intervals: Vec::new(),
            domain: Domain::Circle,
        }
    }

    /// `[-θ, θ)`; empty when `θ = 0`.
    pub fn symmetric(theta: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::OutOfRange {
                name: "theta",
                value: theta,
                reason: "must lie in [0, π]",
            });
        }
        if theta == 0.0 {
            return Ok(Self::empty());
        }
        Self::new(&[(-theta, theta)])
    }

    fn build(intervals: &[(f64, f64)], domain: Domain) -> Result<Self> {
        for &(lo, hi) in intervals {
            if !(lo.is_finite() && hi.is_finite()) {
                return Err(Error::InvalidInterval {
                    lo,
                    hi,
                    reason: "endpoints must be finite",
                });
            }
            if lo >= hi {
                return Err(Error::InvalidInterval {
                    lo,
                    hi,
                    reason: "require lo < hi",
                });
            }
            if domain == Domain::Circle && (lo < -PI || hi > PI) {
                return Err(Error::InvalidInterval {
                    lo,
                    hi,
                    reason: "endpoints must lie in [-π, π]",
                });
            }
        }
        let mut sorted = intervals.to_vec();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(sorted.len());
        for (lo, hi) in sorted {
            match merged.last_mut() {
                Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
                _ => merged.push((lo, hi)),
            }
        }
        Ok(ArcSet {
            intervals: merged,
            domain,
        })
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Lebesgue measure.
    pub fn measure(&self) -> f64 {
        self.intervals.iter().map(|(lo, hi)| hi - lo).sum()
    }

    /// Linear span `max hi - min lo` (not circular distance).
    pub fn diameter(&self) -> f64 {
        match (self.intervals.first(), self.intervals.last()) {
            (Some(first), Some(last)) => last.1 - first.0,
            _ => 0.0,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        // intervals are sorted, so a binary search would do; windows are tiny
        self.intervals.iter().any(|&(lo, hi)| lo <= x && x < hi)
    }

    /// Dilate by `c > 0`. The result is a circle window and must fit in `[-π, π]`.
    pub fn scale(&self, c: f64) -> Result<ArcSet> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::OutOfRange {
                name: "c",
                value: c,
                reason: "scale factor must be positive",
            });
        }
        let scaled: Vec<(f64, f64)> = self.intervals.iter().map(|&(lo, hi)| (c * lo, c * hi)).collect();
        ArcSet::new(&scaled)
    }

    /// Serialized form: JSON array of `[lo, hi]` pairs.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("finite floats serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let pairs: Vec<[f64; 2]> = serde_json::from_str(s).map_err(|_| Error::InvalidInterval {
            lo: f64::NAN,
            hi: f64::NAN,
            reason: "expected a JSON array of [lo, hi] pairs",
        })?;
        ArcSet::try_from(pairs)
    }
}

impl TryFrom<Vec<[f64; 2]>> for ArcSet {
    type Error = Error;

    fn try_from(pairs: Vec<[f64; 2]>) -> Result<Self> {
        let intervals: Vec<(f64, f64)> = pairs.into_iter().map(|[lo, hi]| (lo, hi)).collect();
        ArcSet::new(&intervals)
    }
}

impl From<ArcSet> for Vec<[f64; 2]> {
    fn from(a: ArcSet) -> Self {
        a.intervals.into_iter().map(|(lo, hi)| [lo, hi]).collect()
    }
}

impl fmt::Display for ArcSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "∅");
        }
        let parts: Vec<String> = self.intervals.iter().map(|(lo, hi)| format!("[{lo}, {hi})")).collect();
        write!(f, "{}", parts.join(" ∪ "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn single_interval() {
        let a = ArcSet::new(&[(-0.2, 0.2)]).unwrap();
        assert_eq!(a.intervals().len(), 1);
        assert!((a.measure() - 0.4).abs() < 1e-15);
    }

    #[test]
    fn two_intervals_are_sorted() {
        let a = ArcSet::new(&[(0.1, 0.2), (-0.2, -0.1)]).unwrap();
        assert_eq!(a.intervals(), &[(-0.2, -0.1), (0.1, 0.2)]);
        assert!((a.measure() - 0.2).abs() < 1e-15);
        assert!((a.diameter() - 0.4).abs() < 1e-15);
    }

    #[test]
    fn empty_set() {
        let a = ArcSet::new(&[]).unwrap();
        assert!(a.is_empty());
        assert_eq!(a.measure(), 0.0);
        assert_eq!(a.diameter(), 0.0);
    }

    #[test]
    fn touching_and_overlapping_merge() {
        let a = ArcSet::new(&[(0.0, 0.5), (0.5, 1.0), (0.8, 1.2), (-1.0, -0.5)]).unwrap();
        assert_eq!(a.intervals(), &[(-1.0, -0.5), (0.0, 1.2)]);
    }

    #[test]
    fn rejects_bad_intervals() {
        assert!(ArcSet::new(&[(0.2, 0.1)]).is_err());
        assert!(ArcSet::new(&[(0.2, 0.2)]).is_err());
        assert!(ArcSet::new(&[(-4.0, 0.0)]).is_err());
        assert!(ArcSet::new(&[(0.0, 3.2)]).is_err());
        assert!(ArcSet::on_line(&[(-4.0, 0.0)]).is_ok());
    }

    #[test]
    fn symmetric_arcs() {
        let a = ArcSet::symmetric(0.2).unwrap();
        assert_eq!(a.intervals(), &[(-0.2, 0.2)]);
        assert!((a.measure() - 0.4).abs() < 1e-15);
        assert!(ArcSet::symmetric(0.0).unwrap().is_empty());
        let h = ArcSet::symmetric(PI / 2.0).unwrap();
        assert!((h.measure() - PI).abs() < 1e-15);
        assert!((h.diameter() - PI).abs() < 1e-15);
        assert!(ArcSet::symmetric(-0.1).is_err());
        assert!(ArcSet::symmetric(3.5).is_err());
    }

    #[test]
    fn scaling() {
        let a = ArcSet::symmetric(0.2).unwrap().scale(0.5).unwrap();
        assert!((a.intervals()[0].0 + 0.1).abs() < 1e-15);
        assert!((a.intervals()[0].1 - 0.1).abs() < 1e-15);
        assert!(ArcSet::empty().scale(3.0).unwrap().is_empty());

        let line = ArcSet::on_line(&[(-1.0, 1.0)]).unwrap();
        let c = 2.0 * PI / 100.0;
        let s = line.scale(c).unwrap();
        assert_eq!(s.domain(), Domain::Circle);
        assert!((s.intervals()[0].1 - 0.06283185307179587).abs() < 1e-15);
        assert!((s.measure() - 4.0 * PI / 100.0).abs() < 1e-15);

        assert!(ArcSet::symmetric(2.0).unwrap().scale(2.0).is_err());
        assert!(a.scale(0.0).is_err());
    }

    #[test]
    fn json_round_trip() {
        let a = ArcSet::from_json("[[-0.3,-0.1],[0.1,0.3]]").unwrap();
        assert_eq!(a.intervals().len(), 2);
        assert_eq!(ArcSet::from_json(&a.to_json()).unwrap(), a);
        assert!(ArcSet::from_json("[[0.3, 0.1]]").is_err());
        assert!(ArcSet::from_json("{}").is_err());
    }

    fn arb_intervals() -> impl Strategy<Value = Vec<(f64, f64)>> {
        prop::collection::vec((-PI..PI, 0.001f64..1.0), 0..6).prop_map(|v| {
            v.into_iter()
                .map(|(lo, len)| (lo, (lo + len).min(PI)))
                .filter(|(lo, hi)| lo < hi)
                .collect()
        })
    }

    proptest! {
        #[test]
        fn construction_is_idempotent(iv in arb_intervals()) {
            let a = ArcSet::new(&iv).unwrap();
            let b = ArcSet::new(a.intervals()).unwrap();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn canonical_form_is_disjoint_and_sorted(iv in arb_intervals()) {
            let a = ArcSet::new(&iv).unwrap();
            for w in a.intervals().windows(2) {
                prop_assert!(w[0].1 < w[1].0);
            }
        }

        #[test]
        fn diameter_dominates_measure(iv in arb_intervals()) {
            let a = ArcSet::new(&iv).unwrap();
            prop_assert!(a.diameter() >= a.measure() - 1e-12);
            if a.intervals().len() == 1 {
                prop_assert!((a.diameter() - a.measure()).abs() < 1e-12);
            }
            if a.intervals().len() > 1 {
                prop_assert!(a.diameter() > a.measure());
            }
        }

        #[test]
        fn measure_scales_linearly(iv in arb_intervals(), c in 0.01f64..1.0) {
            let a = ArcSet::new(&iv).unwrap();
            let s = a.scale(c).unwrap();
            let expected = c * a.measure();
            prop_assert!((s.measure() - expected).abs() <= 1e-12 * expected.max(1e-300));
        }
    }
}
