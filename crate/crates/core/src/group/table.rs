use super::{AbelianGroup, GroupElement};
use crate::error::{Error, Result};

/// Dense index form of a finite group: elements are numbered in lexicographic
/// order and addition is a lookup table.
#[derive(Debug, Clone)]
pub struct FiniteTable {
    group: AbelianGroup,
    elements: Vec<GroupElement>,
    add: Vec<u32>,
    order: usize,
}

/// Largest group the dense table is built for.
pub const MAX_TABLE_ORDER: u64 = 4096;

impl FiniteTable {
    pub fn new(group: &AbelianGroup) -> Result<Self> {
        let order = group
            .order()
            .ok_or_else(|| Error::Unsupported("addition table for an infinite group".into()))?;
        if order > MAX_TABLE_ORDER {
            return Err(Error::Infeasible(format!(
                "group of order {order} exceeds the table limit {MAX_TABLE_ORDER}"
            )));
        }
        let elements = group.elements().expect("finite group");
        let order = elements.len();
        let mut table = Self { group: group.clone(), elements, add: Vec::new(), order };
        let mut add = Vec::with_capacity(order * order);
        for x in &table.elements {
            for y in &table.elements {
                let s = group.add(x, y)?;
                add.push(table.index_of(&s) as u32);
            }
        }
        table.add = add;
        Ok(table)
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn element(&self, i: usize) -> &GroupElement {
        &self.elements[i]
    }

    /// Mixed-radix index, matching the lexicographic element order.
    pub fn index_of(&self, x: &GroupElement) -> usize {
        x.coords()
            .iter()
            .zip(self.group.torsion_factors())
            .fold(0usize, |acc, (&c, &n)| acc * n as usize + c as usize)
    }

    #[inline]
    pub fn add(&self, i: usize, j: usize) -> usize {
        self.add[i * self.order + j] as usize
    }

    /// `c * x` by repeated addition in index form.
    pub fn scale(&self, c: u64, i: usize) -> usize {
        let mut acc = 0usize;
        for _ in 0..c {
            acc = self.add(acc, i);
        }
        acc
    }
}
