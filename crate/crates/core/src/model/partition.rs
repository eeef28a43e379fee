use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

use super::RollbackUnionFind;

/// Partition of an ordered vertex list, kept in canonical form: elements sorted inside
/// each block, blocks sorted by their minimum element.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    ground: Vec<usize>,
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    pub fn new(ground: Vec<usize>, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut sorted_ground = ground.clone();
        sorted_ground.sort_unstable();
        if sorted_ground.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter("ground set has repeats".into()));
        }
        let mut covered: Vec<usize> = blocks.iter().flatten().copied().collect();
        covered.sort_unstable();
        if covered != sorted_ground {
            return Err(Error::InvalidParameter(
                "blocks must be disjoint, non-empty and cover the ground set".into(),
            ));
        }
        if blocks.iter().any(|b| b.is_empty()) {
            return Err(Error::InvalidParameter("empty block".into()));
        }
        Ok(Self::canonical(ground, blocks))
    }

    fn canonical(ground: Vec<usize>, mut blocks: Vec<Vec<usize>>) -> Self {
        for b in &mut blocks {
            b.sort_unstable();
        }
        blocks.sort_unstable_by_key(|b| b[0]);
        Self { ground, blocks }
    }

    /// Partition of `ground` where `labels[i]` names the block of `ground[i]`.
    pub fn from_labels(ground: Vec<usize>, labels: &[usize]) -> Self {
        let mut by_label: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (&v, &l) in ground.iter().zip(labels) {
            by_label.entry(l).or_default().push(v);
        }
        Self::canonical(ground, by_label.into_values().collect())
    }

    /// All singletons (⊥).
    pub fn finest(ground: Vec<usize>) -> Self {
        let blocks = ground.iter().map(|&v| vec![v]).collect();
        Self::canonical(ground, blocks)
    }

    /// One block (⊤).
    pub fn coarsest(ground: Vec<usize>) -> Self {
        if ground.is_empty() {
            return Self {
                ground,
                blocks: Vec::new(),
            };
        }
        let blocks = vec![ground.clone()];
        Self::canonical(ground, blocks)
    }

    pub fn ground(&self) -> &[usize] {
        &self.ground
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    fn sorted_ground(&self) -> Vec<usize> {
        let mut g = self.ground.clone();
        g.sort_unstable();
        g
    }

    /// Adds the missing elements of `ground` as singleton blocks; the result is a
    /// partition of `ground`.
    pub fn extend_to(&self, ground: &[usize]) -> Result<Self> {
        let mut blocks = self.blocks.clone();
        for &v in ground {
            if !self.ground.contains(&v) {
                blocks.push(vec![v]);
            }
        }
        Partition::new(ground.to_vec(), blocks)
            .map_err(|_| Error::MismatchedGround("partition is not contained in ground".into()))
    }

    /// Finest common coarsening (`self ∨ other`).
    pub fn join(&self, other: &Partition) -> Result<Partition> {
        if self.sorted_ground() != other.sorted_ground() {
            return Err(Error::MismatchedGround(format!(
                "{:?} vs {:?}",
                self.ground, other.ground
            )));
        }
        let index: BTreeMap<usize, usize> =
            self.ground.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut uf = RollbackUnionFind::new(self.ground.len());
        for block in self.blocks.iter().chain(&other.blocks) {
            for w in block.windows(2) {
                uf.union(index[&w[0]], index[&w[1]]);
            }
        }
        Ok(Partition::from_labels(self.ground.clone(), &uf.labels()))
    }

    /// Whether every block of `self` lies inside a block of `coarser`.
    pub fn refines(&self, coarser: &Partition) -> bool {
        let block_of: BTreeMap<usize, usize> = coarser
            .blocks
            .iter()
            .enumerate()
            .flat_map(|(i, b)| b.iter().map(move |&v| (v, i)))
            .collect();
        self.blocks.iter().all(|b| {
            let first = block_of.get(&b[0]);
            first.is_some() && b.iter().all(|v| block_of.get(v) == first)
        })
    }

    /// Every partition of `ground`, in restricted-growth order.
    pub fn all(ground: &[usize]) -> Vec<Partition> {
        let n = ground.len();
        let mut out = Vec::new();
        let mut labels = vec![0usize; n];
        fn rec(
            i: usize,
            max: usize,
            labels: &mut Vec<usize>,
            ground: &[usize],
            out: &mut Vec<Partition>,
        ) {
            if i == labels.len() {
                out.push(Partition::from_labels(ground.to_vec(), labels));
                return;
            }
            for l in 0..=max {
                labels[i] = l;
                rec(i + 1, max.max(l + 1), labels, ground, out);
            }
        }
        if n == 0 {
            out.push(Partition::finest(Vec::new()));
        } else {
            rec(1, 1, &mut labels, ground, &mut out);
        }
        out
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{{")?;
            for (j, v) in b.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{v}")?;
            }
            write!(f, "}}")?;
        }
        write!(f, "}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(ground: &[usize], blocks: &[&[usize]]) -> Partition {
        Partition::new(ground.to_vec(), blocks.iter().map(|b| b.to_vec()).collect()).unwrap()
    }

    #[test]
    fn chain_closure() {
        let g = [1, 2, 3];
        let a = p(&g, &[&[1, 2], &[3]]);
        let b = p(&g, &[&[2, 3], &[1]]);
        assert_eq!(a.join(&b).unwrap(), p(&g, &[&[1, 2, 3]]));
    }

    #[test]
    fn identity_and_idempotence() {
        let g = vec![0, 1, 2, 3];
        let pi = p(&g, &[&[0, 3], &[1], &[2]]);
        assert_eq!(pi.join(&pi).unwrap(), pi);
        assert_eq!(Partition::finest(g.clone()).join(&pi).unwrap(), pi);
        assert_eq!(
            Partition::coarsest(g.clone()).join(&pi).unwrap(),
            Partition::coarsest(g)
        );
    }

    #[test]
    fn mismatched_ground_is_error() {
        let a = Partition::finest(vec![0, 1]);
        let b = Partition::finest(vec![0, 2]);
        assert!(matches!(a.join(&b), Err(Error::MismatchedGround(_))));
    }

    #[test]
    fn extension_adds_singletons() {
        let a = p(&[1, 2], &[&[1, 2]]);
        let e = a.extend_to(&[0, 1, 2, 3]).unwrap();
        assert_eq!(e.block_count(), 3);
        assert_eq!(e.blocks()[1], vec![1, 2]);
    }

    #[test]
    fn bell_numbers() {
        let counts: Vec<usize> = (0..=5)
            .map(|n| Partition::all(&(0..n).collect::<Vec<_>>()).len())
            .collect();
        assert_eq!(counts, vec![1, 1, 2, 5, 15, 52]);
    }

    #[test]
    fn invalid_blocks_rejected() {
        assert!(Partition::new(vec![0, 1], vec![vec![0]]).is_err());
        assert!(Partition::new(vec![0, 1], vec![vec![0, 1], vec![1]]).is_err());
    }

    fn partitions_of_five() -> Vec<Partition> {
        Partition::all(&[0, 1, 2, 3, 4])
    }

    proptest! {
        #[test]
        fn join_is_a_semilattice(a in 0usize..52, b in 0usize..52, c in 0usize..52) {
            let all = partitions_of_five();
            let (a, b, c) = (&all[a], &all[b], &all[c]);
            let ab = a.join(b).unwrap();
            prop_assert_eq!(&ab, &b.join(a).unwrap());
            prop_assert_eq!(ab.join(c).unwrap(), a.join(&b.join(c).unwrap()).unwrap());
            prop_assert_eq!(&a.join(a).unwrap(), a);
            prop_assert!(a.refines(&ab) && b.refines(&ab));
        }
    }
}
