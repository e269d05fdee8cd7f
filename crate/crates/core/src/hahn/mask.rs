use std::cmp::Ordering;
use std::fmt;

use num_traits::Signed;

use crate::fields::Rational;

/// Endpoint of a mask interval on the extended rational line.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Bound {
    NegInf,
    Finite(Rational),
    PosInf,
}

impl Bound {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            Bound::Finite(q) => Some(q),
            _ => None,
        }
    }

    fn add(&self, other: &Bound) -> Bound {
        match (self, other) {
            (Bound::Finite(a), Bound::Finite(b)) => Bound::Finite(a + b),
            (Bound::NegInf, Bound::PosInf) | (Bound::PosInf, Bound::NegInf) => {
                unreachable!("indeterminate bound sum")
            }
            (Bound::NegInf, _) | (_, Bound::NegInf) => Bound::NegInf,
            _ => Bound::PosInf,
        }
    }

    fn shift(&self, d: &Rational) -> Bound {
        match self {
            Bound::Finite(a) => Bound::Finite(a + d),
            other => other.clone(),
        }
    }

    fn scale(&self, s: &Rational) -> Bound {
        debug_assert!(s.is_positive());
        match self {
            Bound::Finite(a) => Bound::Finite(a * s),
            other => other.clone(),
        }
    }

    fn as_json(&self) -> serde_json::Value {
        match self {
            Bound::NegInf => "-inf".into(),
            Bound::PosInf => "inf".into(),
            Bound::Finite(q) => q.to_string().into(),
        }
    }
}

impl PartialOrd for Bound {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Bound {
    fn cmp(&self, other: &Self) -> Ordering {
        use Bound::*;
        match (self, other) {
            (NegInf, NegInf) | (PosInf, PosInf) => Ordering::Equal,
            (NegInf, _) | (_, PosInf) => Ordering::Less,
            (_, NegInf) | (PosInf, _) => Ordering::Greater,
            (Finite(a), Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::NegInf => f.write_str("-inf"),
            Bound::PosInf => f.write_str("inf"),
            Bound::Finite(q) => write!(f, "{q}"),
        }
    }
}

/// Half-open interval `[lo, hi)` (open at `-inf`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    pub lo: Bound,
    pub hi: Bound,
}

impl Interval {
    pub fn new(lo: Bound, hi: Bound) -> Self {
        Interval { lo, hi }
    }

    pub fn contains(&self, x: &Rational) -> bool {
        let b = Bound::Finite(x.clone());
        self.lo <= b && b < self.hi
    }

    fn is_empty(&self) -> bool {
        self.lo >= self.hi
    }

    /// Width of a bounded interval.
    pub fn width(&self) -> Option<Rational> {
        match (&self.lo, &self.hi) {
            (Bound::Finite(a), Bound::Finite(b)) => Some(b - a),
            _ => None,
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.lo {
            Bound::NegInf => write!(f, "(-inf, {})", self.hi),
            _ => write!(f, "[{}, {})", self.lo, self.hi),
        }
    }
}

/// Guarantee mask: a finite union of disjoint, sorted half-open intervals of
/// exponents where a truncated series' coefficients are exact. Nothing is
/// claimed outside the mask.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mask {
    intervals: Vec<Interval>,
}

impl Mask {
    /// Normalizes an arbitrary interval list (sorts, drops empties, merges
    /// overlapping or touching intervals).
    pub fn from_intervals(mut v: Vec<Interval>) -> Self {
        v.retain(|i| !i.is_empty());
        v.sort_by(|a, b| a.lo.cmp(&b.lo));
        let mut out: Vec<Interval> = Vec::with_capacity(v.len());
        for iv in v {
            if let Some(last) = out.last_mut() {
                if iv.lo <= last.hi {
                    if iv.hi > last.hi {
                        last.hi = iv.hi;
                    }
                    continue;
                }
            }
            out.push(iv);
        }
        Mask { intervals: out }
    }

    pub fn full() -> Self {
        Mask {
            intervals: vec![Interval::new(Bound::NegInf, Bound::PosInf)],
        }
    }

    pub fn empty() -> Self {
        Mask { intervals: Vec::new() }
    }

    /// `(-inf, hi)`.
    pub fn below(hi: Rational) -> Self {
        Mask {
            intervals: vec![Interval::new(Bound::NegInf, Bound::Finite(hi))],
        }
    }

    /// `[lo, inf)`.
    pub fn at_least(lo: Rational) -> Self {
        Mask {
            intervals: vec![Interval::new(Bound::Finite(lo), Bound::PosInf)],
        }
    }

    pub fn interval(lo: Rational, hi: Rational) -> Self {
        Self::from_intervals(vec![Interval::new(Bound::Finite(lo), Bound::Finite(hi))])
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn is_full(&self) -> bool {
        self.intervals.len() == 1 && self.intervals[0].lo == Bound::NegInf && self.intervals[0].hi == Bound::PosInf
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn contains(&self, x: &Rational) -> bool {
        let b = Bound::Finite(x.clone());
        // intervals are sorted: binary search on lo
        let idx = self.intervals.partition_point(|iv| iv.lo <= b);
        idx > 0 && b < self.intervals[idx - 1].hi
    }

    /// Whether `[lo, hi)` lies entirely inside the mask.
    pub fn covers(&self, lo: &Bound, hi: &Bound) -> bool {
        if lo >= hi {
            return true;
        }
        self.intervals.iter().any(|iv| iv.lo <= *lo && *hi <= iv.hi)
    }

    /// Upper end of the initial segment `(-inf, h)` contained in the mask, if any.
    pub fn prefix_end(&self) -> Option<&Bound> {
        match self.intervals.first() {
            Some(iv) if iv.lo == Bound::NegInf => Some(&iv.hi),
            _ => None,
        }
    }

    /// Supremum of the mask (`NegInf` when empty).
    pub fn sup(&self) -> Bound {
        self.intervals.last().map(|iv| iv.hi.clone()).unwrap_or(Bound::NegInf)
    }

    pub fn complement(&self) -> Mask {
        let mut out = Vec::new();
        let mut cur = Bound::NegInf;
        for iv in &self.intervals {
            if cur < iv.lo {
                out.push(Interval::new(cur.clone(), iv.lo.clone()));
            }
            cur = iv.hi.clone();
        }
        if cur < Bound::PosInf {
            out.push(Interval::new(cur, Bound::PosInf));
        }
        Mask { intervals: out }
    }

    pub fn intersect(&self, other: &Mask) -> Mask {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.intervals.len() && j < other.intervals.len() {
            let a = &self.intervals[i];
            let b = &other.intervals[j];
            let lo = a.lo.clone().max(b.lo.clone());
            let hi = a.hi.clone().min(b.hi.clone());
            if lo < hi {
                out.push(Interval::new(lo, hi));
            }
            if a.hi < b.hi {
                i += 1;
            } else {
                j += 1;
            }
        }
        Mask { intervals: out }
    }

    pub fn union(&self, other: &Mask) -> Mask {
        let mut v = self.intervals.clone();
        v.extend(other.intervals.iter().cloned());
        Mask::from_intervals(v)
    }

    /// Removes the exponents `>= hi`.
    pub fn truncate(&self, hi: &Rational) -> Mask {
        self.intersect(&Mask::below(hi.clone()))
    }

    pub fn shift(&self, d: &Rational) -> Mask {
        Mask {
            intervals: self
                .intervals
                .iter()
                .map(|iv| Interval::new(iv.lo.shift(d), iv.hi.shift(d)))
                .collect(),
        }
    }

    /// Image under `x ↦ s·x` for `s > 0`.
    pub fn scale(&self, s: &Rational) -> Mask {
        Mask {
            intervals: self
                .intervals
                .iter()
                .map(|iv| Interval::new(iv.lo.scale(s), iv.hi.scale(s)))
                .collect(),
        }
    }

    /// Minkowski sum with a finite point set.
    pub fn plus_points<'a>(&self, points: impl IntoIterator<Item = &'a Rational> + Clone) -> Mask {
        let mut v = Vec::new();
        let min_point = points.clone().into_iter().min();
        for iv in &self.intervals {
            if iv.hi == Bound::PosInf {
                // only the smallest translate matters for an unbounded interval
                if let Some(m) = min_point {
                    v.push(Interval::new(iv.lo.shift(m), Bound::PosInf));
                }
                continue;
            }
            for t in points.clone() {
                v.push(Interval::new(iv.lo.shift(t), iv.hi.shift(t)));
            }
        }
        Mask::from_intervals(v)
    }

    /// Minkowski sum of two interval unions.
    pub fn plus_mask(&self, other: &Mask) -> Mask {
        let mut v = Vec::new();
        for a in &self.intervals {
            for b in &other.intervals {
                v.push(Interval::new(a.lo.add(&b.lo), a.hi.add(&b.hi)));
            }
        }
        Mask::from_intervals(v)
    }

    /// Bounded gaps of the mask strictly below `ceiling`.
    pub fn gaps_below(&self, ceiling: &Rational) -> Vec<Interval> {
        let c = Bound::Finite(ceiling.clone());
        self.complement()
            .intervals
            .into_iter()
            .filter(|iv| iv.lo < c && iv.lo != Bound::NegInf)
            .map(|iv| Interval::new(iv.lo, iv.hi.min(c.clone())))
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        self.intervals
            .iter()
            .map(|iv| serde_json::json!({ "lo": iv.lo.as_json(), "hi": iv.hi.as_json() }))
            .collect()
    }
}

impl fmt::Display for Mask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.intervals.is_empty() {
            return f.write_str("∅");
        }
        let parts: Vec<String> = self.intervals.iter().map(|i| i.to_string()).collect();
        f.write_str(&parts.join(" ∪ "))
    }
}
