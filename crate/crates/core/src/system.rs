//! Group actions π : G × X → X behind one interface, with two concrete kinds:
//! finite table-based systems and the circle rotating itself.
//!
//! Action axioms (identity and compatibility) are validated exhaustively at
//! construction for finite systems; the circle action satisfies them by the
//! arithmetic of addition mod 1 (spot-checked in tests by sampling).

use std::collections::BTreeSet;
use std::fmt::{self, Debug, Display};

use thiserror::Error;

use crate::circle::{Angle, ArcUnion, RectUnion};
use crate::group::{FiniteGroup, GroupIndex};
use crate::sets::IndexSet;

/// Point of a finite space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PointIndex(pub usize);

impl fmt::Display for PointIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Anything usable as a support point: ordered, printable, thread-safe.
pub trait Point: Clone + Ord + Eq + Debug + Display + Send + Sync + 'static {}
impl<T: Clone + Ord + Eq + Debug + Display + Send + Sync + 'static> Point for T {}

/// Membership test of a measurable set over points of type `P`.
pub trait PointSet<P> {
    fn contains_point(&self, point: &P) -> bool;
}

impl PointSet<GroupIndex> for IndexSet {
    fn contains_point(&self, point: &GroupIndex) -> bool {
        self.contains(point.0)
    }
}

impl PointSet<PointIndex> for IndexSet {
    fn contains_point(&self, point: &PointIndex) -> bool {
        self.contains(point.0)
    }
}

impl PointSet<Angle> for ArcUnion {
    fn contains_point(&self, point: &Angle) -> bool {
        self.contains(*point)
    }
}

/// An explicit set of `(group element, point)` pairs in a finite product.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PairSet<G: Ord, X: Ord> {
    pairs: BTreeSet<(G, X)>,
}

impl<G: Ord + Clone, X: Ord + Clone> PairSet<G, X> {
    pub fn new(pairs: impl IntoIterator<Item = (G, X)>) -> Self {
        Self { pairs: pairs.into_iter().collect() }
    }

    pub fn empty() -> Self {
        Self { pairs: BTreeSet::new() }
    }

    pub fn contains(&self, g: &G, x: &X) -> bool {
        self.pairs.contains(&(g.clone(), x.clone()))
    }

    pub fn iter(&self) -> impl Iterator<Item = &(G, X)> {
        self.pairs.iter()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// A group acting on a space. `GroupSet`/`SpaceSet` are the measurable-set
/// kinds the system supports; `ProductSet` the measurable subsets of `G × X`.
pub trait System {
    type GroupElem: Point;
    type SpacePoint: Point;
    type GroupSet: Clone + Debug + PointSet<Self::GroupElem>;
    type SpaceSet: Clone + Debug + PointSet<Self::SpacePoint>;
    type ProductSet: Clone + Debug;

    fn identity(&self) -> Self::GroupElem;
    fn compose(&self, g: &Self::GroupElem, h: &Self::GroupElem) -> Self::GroupElem;
    fn inverse(&self, g: &Self::GroupElem) -> Self::GroupElem;

    /// The action `g · x`.
    fn act(&self, g: &Self::GroupElem, x: &Self::SpacePoint) -> Self::SpacePoint;

    /// `g⁻¹E = {x : g·x ∈ E}`.
    fn preimage(&self, g: &Self::GroupElem, set: &Self::SpaceSet) -> Self::SpaceSet;

    /// The section `E:x = {g : g·x ∈ E}`.
    fn section(&self, set: &Self::SpaceSet, x: &Self::SpacePoint) -> Self::GroupSet;

    fn pair_in(&self, w: &Self::ProductSet, g: &Self::GroupElem, x: &Self::SpacePoint) -> bool;

    /// `{x : (g, x) ∈ W}`.
    fn slice_at_group(&self, w: &Self::ProductSet, g: &Self::GroupElem) -> Self::SpaceSet;

    /// `{g : (g, x) ∈ W}`.
    fn slice_at_point(&self, w: &Self::ProductSet, x: &Self::SpacePoint) -> Self::GroupSet;
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ActionError {
    #[error("space must have at least one point")]
    EmptySpace,
    #[error("action table must have {expected} rows, found {found}")]
    RowCount { expected: usize, found: usize },
    #[error("action row {row} must have {expected} entries, found {found}")]
    RowShape { row: usize, expected: usize, found: usize },
    #[error("action entry {value} at ({row}, {col}) out of range for space size {space}")]
    EntryRange { row: usize, col: usize, value: usize, space: usize },
    #[error("identity axiom fails: e·{x} = {image}")]
    IdentityAxiom { x: usize, image: usize },
    #[error("compatibility axiom fails at g={g}, h={h}, x={x}")]
    CompatibilityAxiom { g: usize, h: usize, x: usize },
}

/// A finite group acting on a finite space through a lookup table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteSystem {
    group: FiniteGroup,
    space_size: usize,
    action: Vec<usize>, // row-major: action[g * space_size + x] = g·x
}

impl FiniteSystem {
    pub fn new(
        group: FiniteGroup,
        space_size: usize,
        action_rows: Vec<Vec<usize>>,
    ) -> Result<Self, ActionError> {
        if space_size == 0 {
            return Err(ActionError::EmptySpace);
        }
        let order = group.order();
        if action_rows.len() != order {
            return Err(ActionError::RowCount { expected: order, found: action_rows.len() });
        }
        let mut action = Vec::with_capacity(order * space_size);
        for (row, entries) in action_rows.iter().enumerate() {
            if entries.len() != space_size {
                return Err(ActionError::RowShape {
                    row,
                    expected: space_size,
                    found: entries.len(),
                });
            }
            for (col, &value) in entries.iter().enumerate() {
                if value >= space_size {
                    return Err(ActionError::EntryRange { row, col, value, space: space_size });
                }
                action.push(value);
            }
        }
        let system = Self { group, space_size, action };
        let e = system.group.identity();
        for x in 0..space_size {
            let image = system.action[e.0 * space_size + x];
            if image != x {
                return Err(ActionError::IdentityAxiom { x, image });
            }
        }
        for g in system.group.elements() {
            for h in system.group.elements() {
                let gh = system.group.compose(g, h);
                for x in 0..space_size {
                    let via_product = system.action[gh.0 * space_size + x];
                    let step = system.action[h.0 * space_size + x];
                    let via_steps = system.action[g.0 * space_size + step];
                    if via_product != via_steps {
                        return Err(ActionError::CompatibilityAxiom { g: g.0, h: h.0, x });
                    }
                }
            }
        }
        Ok(system)
    }

    /// Build a system from an explicit list of permutations of `{0..m-1}`,
    /// closed under composition. Element `i` acts by `perms[i]`; the group
    /// table is derived by composing and locating the result.
    pub fn from_permutations(perms: Vec<Vec<usize>>, space_size: usize) -> Result<Self, ActionError> {
        let n = perms.len();
        let locate = |p: &[usize]| perms.iter().position(|q| q == p);
        let identity: Vec<usize> = (0..space_size).collect();
        let e = locate(&identity).ok_or(ActionError::IdentityAxiom { x: 0, image: 0 })?;
        let mut rows = Vec::with_capacity(n);
        for (g, perm_g) in perms.iter().enumerate() {
            let mut row = Vec::with_capacity(n);
            for (h, perm_h) in perms.iter().enumerate() {
                // composition g∘h: apply h first, then g
                let composed: Vec<usize> = (0..space_size).map(|x| perm_g[perm_h[x]]).collect();
                let idx = locate(&composed).ok_or(ActionError::CompatibilityAxiom {
                    g,
                    h,
                    x: 0,
                })?;
                row.push(idx);
            }
            rows.push(row);
        }
        let group = FiniteGroup::from_table(rows, e).map_err(|_| ActionError::CompatibilityAxiom {
            g: 0,
            h: 0,
            x: 0,
        })?;
        Self::new(group, space_size, perms)
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn space_size(&self) -> usize {
        self.space_size
    }

    pub fn points(&self) -> impl Iterator<Item = PointIndex> {
        (0..self.space_size).map(PointIndex)
    }

    pub fn action_rows(&self) -> impl Iterator<Item = &[usize]> {
        self.action.chunks(self.space_size)
    }

    /// All `2^m` subsets of the space (for exhaustive desk-scale checks).
    pub fn all_space_subsets(&self) -> Vec<IndexSet> {
        assert!(self.space_size <= 16, "exhaustive subsets only at desk scale");
        (0u64..(1 << self.space_size))
            .map(|mask| IndexSet::from_mask(self.space_size, mask))
            .collect()
    }

    pub fn all_pairs(&self) -> PairSet<GroupIndex, PointIndex> {
        PairSet::new(
            self.group
                .elements()
                .flat_map(|g| self.points().map(move |x| (g, x))),
        )
    }
}

impl System for FiniteSystem {
    type GroupElem = GroupIndex;
    type SpacePoint = PointIndex;
    type GroupSet = IndexSet;
    type SpaceSet = IndexSet;
    type ProductSet = PairSet<GroupIndex, PointIndex>;

    fn identity(&self) -> GroupIndex {
        self.group.identity()
    }

    fn compose(&self, g: &GroupIndex, h: &GroupIndex) -> GroupIndex {
        self.group.compose(*g, *h)
    }

    fn inverse(&self, g: &GroupIndex) -> GroupIndex {
        self.group.inverse(*g)
    }

    fn act(&self, g: &GroupIndex, x: &PointIndex) -> PointIndex {
        PointIndex(self.action[g.0 * self.space_size + x.0])
    }

    fn preimage(&self, g: &GroupIndex, set: &IndexSet) -> IndexSet {
        IndexSet::from_indices(
            self.space_size,
            self.points().filter(|x| set.contains_point(&self.act(g, x))).map(|x| x.0),
        )
    }

    fn section(&self, set: &IndexSet, x: &PointIndex) -> IndexSet {
        IndexSet::from_indices(
            self.group.order(),
            self.group
                .elements()
                .filter(|g| set.contains_point(&self.act(g, x)))
                .map(|g| g.0),
        )
    }

    fn pair_in(&self, w: &Self::ProductSet, g: &GroupIndex, x: &PointIndex) -> bool {
        w.contains(g, x)
    }

    fn slice_at_group(&self, w: &Self::ProductSet, g: &GroupIndex) -> IndexSet {
        IndexSet::from_indices(
            self.space_size,
            w.iter().filter(|(h, _)| h == g).map(|(_, x)| x.0),
        )
    }

    fn slice_at_point(&self, w: &Self::ProductSet, x: &PointIndex) -> IndexSet {
        IndexSet::from_indices(
            self.group.order(),
            w.iter().filter(|(_, y)| y == x).map(|(g, _)| g.0),
        )
    }
}

/// A finite group acting on itself by left translation. This is the system
/// behind group convolution: measures on `G` convolve through it.
#[derive(Clone, Debug)]
pub struct FiniteSelfAction<'a> {
    group: &'a FiniteGroup,
}

impl<'a> FiniteSelfAction<'a> {
    pub fn new(group: &'a FiniteGroup) -> Self {
        Self { group }
    }
}

impl System for FiniteSelfAction<'_> {
    type GroupElem = GroupIndex;
    type SpacePoint = GroupIndex;
    type GroupSet = IndexSet;
    type SpaceSet = IndexSet;
    type ProductSet = PairSet<GroupIndex, GroupIndex>;

    fn identity(&self) -> GroupIndex {
        self.group.identity()
    }

    fn compose(&self, g: &GroupIndex, h: &GroupIndex) -> GroupIndex {
        self.group.compose(*g, *h)
    }

    fn inverse(&self, g: &GroupIndex) -> GroupIndex {
        self.group.inverse(*g)
    }

    fn act(&self, g: &GroupIndex, x: &GroupIndex) -> GroupIndex {
        self.group.compose(*g, *x)
    }

    fn preimage(&self, g: &GroupIndex, set: &IndexSet) -> IndexSet {
        IndexSet::from_indices(
            self.group.order(),
            self.group
                .elements()
                .filter(|h| set.contains_point(&self.group.compose(*g, *h)))
                .map(|h| h.0),
        )
    }

    fn section(&self, set: &IndexSet, x: &GroupIndex) -> IndexSet {
        IndexSet::from_indices(
            self.group.order(),
            self.group
                .elements()
                .filter(|g| set.contains_point(&self.group.compose(*g, *x)))
                .map(|g| g.0),
        )
    }

    fn pair_in(&self, w: &Self::ProductSet, g: &GroupIndex, x: &GroupIndex) -> bool {
        w.contains(g, x)
    }

    fn slice_at_group(&self, w: &Self::ProductSet, g: &GroupIndex) -> IndexSet {
        IndexSet::from_indices(
            self.group.order(),
            w.iter().filter(|(h, _)| h == g).map(|(_, x)| x.0),
        )
    }

    fn slice_at_point(&self, w: &Self::ProductSet, x: &GroupIndex) -> IndexSet {
        IndexSet::from_indices(
            self.group.order(),
            w.iter().filter(|(_, y)| y == x).map(|(g, _)| g.0),
        )
    }
}

/// The circle group rotating itself: `g · x = g + x` mod 1.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CircleRotation;

impl System for CircleRotation {
    type GroupElem = Angle;
    type SpacePoint = Angle;
    type GroupSet = ArcUnion;
    type SpaceSet = ArcUnion;
    type ProductSet = RectUnion;

    fn identity(&self) -> Angle {
        Angle::new(0.0)
    }

    fn compose(&self, g: &Angle, h: &Angle) -> Angle {
        g.rotate(*h)
    }

    fn inverse(&self, g: &Angle) -> Angle {
        g.negate()
    }

    fn act(&self, g: &Angle, x: &Angle) -> Angle {
        x.rotate(*g)
    }

    fn preimage(&self, g: &Angle, set: &ArcUnion) -> ArcUnion {
        // {x : g + x ∈ E} = E - g
        set.rotate(g.negate())
    }

    fn section(&self, set: &ArcUnion, x: &Angle) -> ArcUnion {
        // {g : g + x ∈ E} = E - x
        set.rotate(x.negate())
    }

    fn pair_in(&self, w: &RectUnion, g: &Angle, x: &Angle) -> bool {
        w.contains(*g, *x)
    }

    fn slice_at_group(&self, w: &RectUnion, g: &Angle) -> ArcUnion {
        w.slice_at_first(*g)
    }

    fn slice_at_point(&self, w: &RectUnion, x: &Angle) -> ArcUnion {
        w.slice_at_second(*x)
    }
}
