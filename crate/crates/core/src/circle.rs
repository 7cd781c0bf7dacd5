//! The unit circle as `[0, 1)` with addition mod 1, and its measurable sets:
//! finite unions of half-open arcs `[a, b)`.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ArcError {
    #[error("arc endpoint {0} is not a finite number")]
    NonFinite(f64),
    #[error("arc endpoint {0} lies outside [0, 1)")]
    OutOfRange(f64),
}

/// A point on the circle, canonically in `[0, 1)`.
///
/// Total order is safe: the constructor rejects non-finite input and maps
/// negative zero to zero.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Angle(FiniteF64);

// f64 restricted to finite, non-negative-zero values, so Eq/Ord are total.
#[derive(Clone, Copy, PartialEq, PartialOrd)]
struct FiniteF64(f64);

impl Eq for FiniteF64 {}
#[allow(clippy::derive_ord_xor_partial_ord)]
impl Ord for FiniteF64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.partial_cmp(&other.0).expect("finite by construction")
    }
}

impl Angle {
    /// Reduce any finite real mod 1 into `[0, 1)`.
    pub fn new(value: f64) -> Self {
        assert!(value.is_finite(), "angle must be finite, got {value}");
        let mut reduced = value.rem_euclid(1.0);
        if reduced >= 1.0 {
            // rem_euclid(x, 1.0) can round up to exactly 1.0 for tiny negatives
            reduced = 0.0;
        }
        if reduced == 0.0 {
            reduced = 0.0; // normalize -0.0
        }
        Angle(FiniteF64(reduced))
    }

    pub fn value(self) -> f64 {
        self.0 .0
    }

    /// Rotation: `self + delta` mod 1.
    pub fn rotate(self, delta: Angle) -> Angle {
        Angle::new(self.value() + delta.value())
    }

    /// The inverse rotation angle: `-self` mod 1.
    pub fn negate(self) -> Angle {
        if self.value() == 0.0 {
            self
        } else {
            Angle::new(1.0 - self.value())
        }
    }
}

impl fmt::Debug for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Angle({})", self.value())
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

/// One half-open arc `[start, end)` with `0 <= start < end <= 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Arc {
    start: f64,
    end: f64,
}

impl Arc {
    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn end(&self) -> f64 {
        self.end
    }

    pub fn length(&self) -> f64 {
        self.end - self.start
    }

    fn contains(&self, t: f64) -> bool {
        self.start <= t && t < self.end
    }
}

/// A finite union of half-open arcs; canonical form is sorted, disjoint, and
/// merged (no two arcs touch), so two equal sets have equal representations.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct ArcUnion {
    arcs: Vec<Arc>,
}

impl ArcUnion {
    pub fn empty() -> Self {
        Self { arcs: Vec::new() }
    }

    /// The whole circle `[0, 1)`.
    pub fn full() -> Self {
        Self {
            arcs: vec![Arc { start: 0.0, end: 1.0 }],
        }
    }

    /// Build from raw `(start, end)` pairs in circle coordinates. An arc with
    /// `start > end` wraps through 1 and is split; `start == end` is empty.
    /// Overlapping input arcs are merged during normalization.
    pub fn new(raw: impl IntoIterator<Item = (f64, f64)>) -> Result<Self, ArcError> {
        let mut pieces: Vec<Arc> = Vec::new();
        for (a, b) in raw {
            for v in [a, b] {
                if !v.is_finite() {
                    return Err(ArcError::NonFinite(v));
                }
                if !(0.0..1.0).contains(&v) && v != 1.0 {
                    return Err(ArcError::OutOfRange(v));
                }
            }
            if a == b {
                continue; // empty arc
            }
            if a < b {
                pieces.push(Arc { start: a, end: b });
            } else {
                // wraps around 1
                pieces.push(Arc { start: a, end: 1.0 });
                if b > 0.0 {
                    pieces.push(Arc { start: 0.0, end: b });
                }
            }
        }
        Ok(Self::normalize(pieces))
    }

    fn normalize(mut pieces: Vec<Arc>) -> Self {
        pieces.retain(|p| p.length() > 0.0);
        pieces.sort_by(|p, q| p.start.total_cmp(&q.start));
        let mut merged: Vec<Arc> = Vec::with_capacity(pieces.len());
        for piece in pieces {
            match merged.last_mut() {
                Some(last) if piece.start <= last.end => {
                    last.end = last.end.max(piece.end);
                }
                _ => merged.push(piece),
            }
        }
        Self { arcs: merged }
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn contains(&self, point: Angle) -> bool {
        let t = point.value();
        self.arcs.iter().any(|arc| arc.contains(t))
    }

    /// Total arc length = the uniform (Haar) measure of the set.
    pub fn total_length(&self) -> f64 {
        self.arcs.iter().map(Arc::length).sum()
    }

    /// The set shifted by `delta`: `{t + delta : t in self}`.
    pub fn rotate(&self, delta: Angle) -> Self {
        let d = delta.value();
        let shifted = self.arcs.iter().map(|arc| {
            if arc.length() >= 1.0 {
                // the whole circle is rotation-invariant; shifting would
                // collapse it to the degenerate span (d, d)
                return (0.0, 1.0);
            }
            let s = arc.start + d;
            let e = arc.end + d;
            if e <= 1.0 {
                (s, e)
            } else if s >= 1.0 {
                (s - 1.0, e - 1.0)
            } else {
                (s, e - 1.0) // wraps; constructor splits it
            }
        });
        Self::new(shifted).expect("rotation preserves validity")
    }

    pub fn complement(&self) -> Self {
        let mut arcs = Vec::new();
        let mut cursor = 0.0;
        for arc in &self.arcs {
            if arc.start > cursor {
                arcs.push(Arc { start: cursor, end: arc.start });
            }
            cursor = arc.end;
        }
        if cursor < 1.0 {
            arcs.push(Arc { start: cursor, end: 1.0 });
        }
        Self { arcs }
    }

    pub fn intersects(&self, other: &Self) -> bool {
        // both lists sorted: sweep
        let (mut i, mut j) = (0, 0);
        while i < self.arcs.len() && j < other.arcs.len() {
            let (a, b) = (&self.arcs[i], &other.arcs[j]);
            if a.end <= b.start {
                i += 1;
            } else if b.end <= a.start {
                j += 1;
            } else {
                return true;
            }
        }
        false
    }
}

impl fmt::Display for ArcUnion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self
            .arcs
            .iter()
            .map(|a| format!("[{},{})", a.start, a.end))
            .collect();
        write!(f, "{}", items.join("∪"))
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum RectError {
    #[error(transparent)]
    Arc(#[from] ArcError),
    #[error("rectangles {0} and {1} overlap")]
    Overlap(usize, usize),
}

/// A finite union of pairwise disjoint rectangles `A_j × B_j` in the product
/// of two circles, with arc-union sides.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct RectUnion {
    rects: Vec<(ArcUnion, ArcUnion)>,
}

impl RectUnion {
    pub fn empty() -> Self {
        Self { rects: Vec::new() }
    }

    /// The whole product.
    pub fn full() -> Self {
        Self {
            rects: vec![(ArcUnion::full(), ArcUnion::full())],
        }
    }

    /// Build from rectangle sides. Empty rectangles are dropped; overlapping
    /// rectangles are rejected rather than re-partitioned.
    pub fn new(rects: impl IntoIterator<Item = (ArcUnion, ArcUnion)>) -> Result<Self, RectError> {
        let mut kept: Vec<(ArcUnion, ArcUnion)> = rects
            .into_iter()
            .filter(|(a, b)| !a.is_empty() && !b.is_empty())
            .collect();
        for i in 0..kept.len() {
            for j in (i + 1)..kept.len() {
                if kept[i].0.intersects(&kept[j].0) && kept[i].1.intersects(&kept[j].1) {
                    return Err(RectError::Overlap(i, j));
                }
            }
        }
        kept.sort_by(|(a, _), (b, _)| {
            let ka = a.arcs().first().map_or(2.0, Arc::start);
            let kb = b.arcs().first().map_or(2.0, Arc::start);
            ka.total_cmp(&kb)
        });
        Ok(Self { rects: kept })
    }

    /// Convenience constructor from raw arc endpoints.
    pub fn from_spans(
        spans: impl IntoIterator<Item = ((f64, f64), (f64, f64))>,
    ) -> Result<Self, RectError> {
        let mut rects = Vec::new();
        for (a, b) in spans {
            rects.push((ArcUnion::new([a])?, ArcUnion::new([b])?));
        }
        Self::new(rects)
    }

    pub fn rects(&self) -> &[(ArcUnion, ArcUnion)] {
        &self.rects
    }

    pub fn contains(&self, first: Angle, second: Angle) -> bool {
        self.rects
            .iter()
            .any(|(a, b)| a.contains(first) && b.contains(second))
    }

    /// `{y : (x, y) ∈ W}` — union of second sides whose first side holds `x`.
    pub fn slice_at_first(&self, x: Angle) -> ArcUnion {
        let spans = self
            .rects
            .iter()
            .filter(|(a, _)| a.contains(x))
            .flat_map(|(_, b)| b.arcs().iter().map(|arc| (arc.start(), arc.end())));
        ArcUnion::new(spans).expect("slices of valid rectangles are valid")
    }

    /// `{x : (x, y) ∈ W}` — union of first sides whose second side holds `y`.
    pub fn slice_at_second(&self, y: Angle) -> ArcUnion {
        let spans = self
            .rects
            .iter()
            .filter(|(_, b)| b.contains(y))
            .flat_map(|(a, _)| a.arcs().iter().map(|arc| (arc.start(), arc.end())));
        ArcUnion::new(spans).expect("slices of valid rectangles are valid")
    }
}
