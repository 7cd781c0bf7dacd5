//! Finite groups given by multiplication tables, validated eagerly.

use std::fmt;

use thiserror::Error;

/// Largest group order for which the `O(n^3)` associativity scan runs.
pub const MAX_FINITE_ORDER: usize = 256;

/// Index of an element of a finite group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupIndex(pub usize);

impl fmt::Display for GroupIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GroupError {
    #[error("group order must be at least 1")]
    Empty,
    #[error("group order {0} exceeds the validation bound {MAX_FINITE_ORDER}")]
    OrderBound(usize),
    #[error("operation table must be {expected}x{expected}, row {row} has {found} entries")]
    TableShape { expected: usize, row: usize, found: usize },
    #[error("table entry {value} at ({row}, {col}) out of range for order {order}")]
    EntryRange { row: usize, col: usize, value: usize, order: usize },
    #[error("identity index {0} out of range for order {1}")]
    IdentityRange(usize, usize),
    #[error("identity law fails: e*{0} or {0}*e differs from {0}")]
    IdentityLaw(usize),
    #[error("element {0} has no inverse")]
    MissingInverse(usize),
    #[error("associativity fails at ({g}, {h}, {k})")]
    NotAssociative { g: usize, h: usize, k: usize },
}

/// A finite group: order, flat multiplication table, inverse table, identity.
///
/// Construction checks the identity law, the existence of two-sided inverses,
/// and full associativity (bounded to order [`MAX_FINITE_ORDER`]).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    order: usize,
    table: Vec<usize>, // row-major: table[g * order + h] = g*h
    inverse: Vec<usize>,
    identity: usize,
}

impl FiniteGroup {
    pub fn from_table(rows: Vec<Vec<usize>>, identity: usize) -> Result<Self, GroupError> {
        let order = rows.len();
        if order == 0 {
            return Err(GroupError::Empty);
        }
        if order > MAX_FINITE_ORDER {
            return Err(GroupError::OrderBound(order));
        }
        let mut table = Vec::with_capacity(order * order);
        for (row_idx, row) in rows.iter().enumerate() {
            if row.len() != order {
                return Err(GroupError::TableShape {
                    expected: order,
                    row: row_idx,
                    found: row.len(),
                });
            }
            for (col, &value) in row.iter().enumerate() {
                if value >= order {
                    return Err(GroupError::EntryRange { row: row_idx, col, value, order });
                }
                table.push(value);
            }
        }
        if identity >= order {
            return Err(GroupError::IdentityRange(identity, order));
        }
        for g in 0..order {
            if table[identity * order + g] != g || table[g * order + identity] != g {
                return Err(GroupError::IdentityLaw(g));
            }
        }
        let mut inverse = vec![usize::MAX; order];
        for g in 0..order {
            match (0..order).find(|&h| table[g * order + h] == identity && table[h * order + g] == identity)
            {
                Some(h) => inverse[g] = h,
                None => return Err(GroupError::MissingInverse(g)),
            }
        }
        for g in 0..order {
            for h in 0..order {
                let gh = table[g * order + h];
                for k in 0..order {
                    let hk = table[h * order + k];
                    if table[gh * order + k] != table[g * order + hk] {
                        return Err(GroupError::NotAssociative { g, h, k });
                    }
                }
            }
        }
        Ok(Self { order, table, inverse, identity })
    }

    /// The cyclic group of the given order.
    pub fn cyclic(order: usize) -> Result<Self, GroupError> {
        let rows = (0..order)
            .map(|g| (0..order).map(|h| (g + h) % order).collect())
            .collect();
        Self::from_table(rows, 0)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> GroupIndex {
        GroupIndex(self.identity)
    }

    pub fn compose(&self, g: GroupIndex, h: GroupIndex) -> GroupIndex {
        GroupIndex(self.table[g.0 * self.order + h.0])
    }

    pub fn inverse(&self, g: GroupIndex) -> GroupIndex {
        GroupIndex(self.inverse[g.0])
    }

    pub fn elements(&self) -> impl Iterator<Item = GroupIndex> {
        (0..self.order).map(GroupIndex)
    }

    /// Rows of the multiplication table (for serialization).
    pub fn table_rows(&self) -> impl Iterator<Item = &[usize]> {
        self.table.chunks(self.order)
    }
}
