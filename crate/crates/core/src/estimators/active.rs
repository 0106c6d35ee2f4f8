use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// How active elements are placed on the surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlacementPolicy {
    /// Uniformly random subset, drawn without replacement.
    Random,
    /// Evenly strided indices starting at element 1.
    UniformGrid,
}

/// Ordered set of 1-based active element indices out of `total` elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActiveSet {
    indices: Vec<usize>,
    total: usize,
    policy: PlacementPolicy,
}

impl ActiveSet {
    pub fn new(indices: Vec<usize>, total: usize, policy: PlacementPolicy) -> Result<Self> {
        if indices.is_empty() || indices.len() > total {
            return Err(Error::argument(format!(
                "active set size {} must be in 1..={total}",
                indices.len()
            )));
        }
        let mut seen = vec![false; total];
        for &i in &indices {
            if i == 0 || i > total {
                return Err(Error::argument(format!("active index {i} outside 1..={total}")));
            }
            if std::mem::replace(&mut seen[i - 1], true) {
                return Err(Error::argument(format!("duplicate active index {i}")));
            }
        }
        Ok(Self { indices, total, policy })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Total element count `L` the set was drawn from.
    pub fn total(&self) -> usize {
        self.total
    }

    pub fn policy(&self) -> PlacementPolicy {
        self.policy
    }

    /// `mask[ℓ-1]` is true when element `ℓ` is active.
    pub fn mask(&self) -> Vec<bool> {
        let mut m = vec![false; self.total];
        for &i in &self.indices {
            m[i - 1] = true;
        }
        m
    }

    /// Passive element indices in ascending order.
    pub fn passive(&self) -> Vec<usize> {
        let mask = self.mask();
        (1..=self.total).filter(|&l| !mask[l - 1]).collect()
    }
}

/// Chooses `l_act` of `total_l` elements. Random placements are reported in
/// ascending index order.
pub fn select_active<R: Rng + ?Sized>(
    total_l: usize,
    l_act: usize,
    policy: PlacementPolicy,
    rng: &mut R,
) -> Result<ActiveSet> {
    if l_act == 0 || l_act > total_l {
        return Err(Error::argument(format!("cannot choose {l_act} active elements out of {total_l}")));
    }
    let indices = match policy {
        PlacementPolicy::Random => {
            let mut v: Vec<usize> = rand::seq::index::sample(rng, total_l, l_act)
                .into_iter()
                .map(|i| i + 1)
                .collect();
            v.sort_unstable();
            v
        }
        PlacementPolicy::UniformGrid => {
            let stride = total_l / l_act;
            (0..l_act).map(|k| 1 + k * stride).collect()
        }
    };
    ActiveSet::new(indices, total_l, policy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn full_selection() {
        for policy in [PlacementPolicy::Random, PlacementPolicy::UniformGrid] {
            let s = select_active(10, 10, policy, &mut seeded(0)).unwrap();
            assert_eq!(s.indices(), (1..=10).collect::<Vec<_>>().as_slice());
            assert!(s.passive().is_empty());
        }
    }

    #[test]
    fn grid_stride() {
        let s = select_active(256, 16, PlacementPolicy::UniformGrid, &mut seeded(0)).unwrap();
        let expected: Vec<usize> = (0..16).map(|k| 1 + 16 * k).collect();
        assert_eq!(s.indices(), expected.as_slice());
        assert_eq!(*s.indices().last().unwrap(), 241);
    }

    #[test]
    fn random_is_seeded() {
        let a = select_active(256, 16, PlacementPolicy::Random, &mut seeded(5)).unwrap();
        let b = select_active(256, 16, PlacementPolicy::Random, &mut seeded(5)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 16);
        assert_eq!(a.passive().len(), 240);
    }

    #[test]
    fn invalid_sets() {
        assert!(select_active(4, 5, PlacementPolicy::Random, &mut seeded(0)).is_err());
        assert!(select_active(4, 0, PlacementPolicy::Random, &mut seeded(0)).is_err());
        assert!(ActiveSet::new(vec![1, 1], 4, PlacementPolicy::Random).is_err());
        assert!(ActiveSet::new(vec![5], 4, PlacementPolicy::Random).is_err());
        assert!(ActiveSet::new(vec![0], 4, PlacementPolicy::Random).is_err());
    }
}
