use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A set of offered product ids, kept sorted and free of duplicates.
///
/// The no-purchase option 0 is never a member.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Assortment {
    members: Vec<usize>,
}

impl Assortment {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn new(ids: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut members: Vec<usize> = ids.into_iter().collect();
        if members.contains(&0) {
            return Err(Error::Domain("product id 0 is the no-purchase option".into()));
        }
        members.sort_unstable();
        let before = members.len();
        members.dedup();
        if members.len() != before {
            return Err(Error::Domain("assortment contains duplicate product ids".into()));
        }
        Ok(Self { members })
    }

    /// Every product `1..=n`.
    pub fn full(n: usize) -> Self {
        Self { members: (1..=n).collect() }
    }

    pub fn from_mask(offered: &[bool]) -> Self {
        Self {
            members: offered
                .iter()
                .enumerate()
                .filter_map(|(i, &b)| b.then_some(i + 1))
                .collect(),
        }
    }

    /// Zero-based membership mask over `n` products; fails on out-of-range ids.
    pub fn to_mask(&self, n: usize) -> Result<Vec<bool>> {
        let mut mask = vec![false; n];
        for &id in &self.members {
            if id > n {
                return Err(Error::Domain(format!("product id {id} out of range 1..={n}")));
            }
            mask[id - 1] = true;
        }
        Ok(mask)
    }

    pub fn contains(&self, id: usize) -> bool {
        self.members.binary_search(&id).is_ok()
    }
    pub fn len(&self) -> usize {
        self.members.len()
    }
    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
    pub fn ids(&self) -> &[usize] {
        &self.members
    }
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().copied()
    }

    /// Number of products in exactly one of the two assortments.
    pub fn symmetric_difference_len(&self, other: &Assortment) -> usize {
        let (a, b) = (&self.members, &other.members);
        let (mut i, mut j, mut common) = (0, 0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    common += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        a.len() + b.len() - 2 * common
    }
}

impl TryFrom<Vec<usize>> for Assortment {
    type Error = Error;
    fn try_from(ids: Vec<usize>) -> Result<Self> {
        Assortment::new(ids)
    }
}

impl From<Assortment> for Vec<usize> {
    fn from(a: Assortment) -> Self {
        a.members
    }
}

impl fmt::Display for Assortment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, id) in self.members.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{id}")?;
        }
        write!(f, "}}")
    }
}
