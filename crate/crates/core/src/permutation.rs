//! Permutations of `{0..n}` and their cycle structure.
//!
//! Indices are 0-based internally; `from_one_based` and `one_based` convert
//! at the boundary.

use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    image: Vec<usize>,
}

impl Permutation {
    pub fn new(image: Vec<usize>) -> Result<Self> {
        let n = image.len();
        let mut seen = alloc::vec![false; n];
        for &x in &image {
            if x >= n || seen[x] {
                return Err(Error::InvalidPermutation(format!("{image:?} is not a bijection on 0..{n}")));
            }
            seen[x] = true;
        }
        Ok(Permutation { image })
    }

    pub fn from_one_based(image: &[usize]) -> Result<Self> {
        let shifted = image
            .iter()
            .map(|&x| x.checked_sub(1).ok_or_else(|| Error::InvalidPermutation(format!("{image:?} contains 0"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(shifted)
    }

    /// Builds a permutation from 0-based cycles; unmentioned points are fixed.
    pub fn from_cycles(n: usize, cycles: &[&[usize]]) -> Result<Self> {
        let mut image: Vec<usize> = (0..n).collect();
        let mut touched = alloc::vec![false; n];
        for c in cycles {
            for (k, &x) in c.iter().enumerate() {
                if x >= n || touched[x] {
                    return Err(Error::InvalidPermutation(format!("cycles {cycles:?} overlap or leave 0..{n}")));
                }
                touched[x] = true;
                image[x] = c[(k + 1) % c.len()];
            }
        }
        Self::new(image)
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            image: (0..n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.image[i]
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.image.iter().map(|x| x + 1).collect()
    }

    pub fn inverse(&self) -> Self {
        let mut inv = alloc::vec![0; self.len()];
        for (i, &x) in self.image.iter().enumerate() {
            inv[x] = i;
        }
        Permutation { image: inv }
    }

    /// `self ∘ other`, i.e. apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Self {
        assert_eq!(self.len(), other.len());
        Permutation {
            image: other.image.iter().map(|&x| self.image[x]).collect(),
        }
    }

    /// `g ∘ self ∘ g⁻¹`.
    pub fn conjugate_by(&self, g: &Permutation) -> Self {
        g.compose(self).compose(&g.inverse())
    }

    /// Cycle lengths in decreasing order.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut t: Vec<usize> = cycle_decomposition(self).cycles.iter().map(Vec::len).collect();
        t.sort_unstable_by(|a, b| b.cmp(a));
        t
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", cycle_decomposition(self))
    }
}

/// Disjoint cycles, fixed points included, each starting at its minimum and
/// sorted by that minimum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleDecomposition {
    cycles: Vec<Vec<usize>>,
}

impl CycleDecomposition {
    pub fn cycles(&self) -> &[Vec<usize>] {
        &self.cycles
    }

    pub fn one_based(&self) -> Vec<Vec<usize>> {
        self.cycles.iter().map(|c| c.iter().map(|x| x + 1).collect()).collect()
    }
}

impl fmt::Display for CycleDecomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.cycles {
            write!(f, "(")?;
            for (k, x) in c.iter().enumerate() {
                if k > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", x + 1)?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

pub fn cycle_decomposition(p: &Permutation) -> CycleDecomposition {
    let n = p.len();
    let mut seen = alloc::vec![false; n];
    let mut cycles = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut c = Vec::new();
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            c.push(x);
            x = p.apply(x);
        }
        cycles.push(c);
    }
    CycleDecomposition { cycles }
}

/// A `g` with `g ∘ p = q ∘ g` when `p` and `q` have the same cycle type.
pub fn conjugate_in_sn(p: &Permutation, q: &Permutation) -> Result<Option<Permutation>> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch {
            expected: p.len(),
            found: q.len(),
        });
    }
    let by_length = |perm: &Permutation| {
        let mut cs = cycle_decomposition(perm).cycles;
        cs.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));
        cs
    };
    let (cp, cq) = (by_length(p), by_length(q));
    if cp.len() != cq.len() || cp.iter().zip(&cq).any(|(a, b)| a.len() != b.len()) {
        return Ok(None);
    }
    let mut image = alloc::vec![0; p.len()];
    for (x, y) in cp.iter().zip(&cq) {
        for (&xi, &yi) in x.iter().zip(y) {
            image[xi] = yi;
        }
    }
    Ok(Some(Permutation { image }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;
    use proptest::prelude::*;

    fn perm1(image: &[usize]) -> Permutation {
        Permutation::from_one_based(image).unwrap()
    }

    #[test]
    fn decomposition_examples() {
        assert_eq!(cycle_decomposition(&Permutation::identity(3)).one_based(), vec![vec![1], vec![2], vec![3]]);
        assert_eq!(cycle_decomposition(&perm1(&[2, 1, 4, 3])).one_based(), vec![vec![1, 2], vec![3, 4]]);
        assert_eq!(cycle_decomposition(&perm1(&[2, 3, 4, 1])).one_based(), vec![vec![1, 2, 3, 4]]);
        assert_eq!(perm1(&[3, 1, 2]).to_string(), "(1 3 2)");
    }

    #[test]
    fn rejects_non_bijections() {
        assert!(Permutation::from_one_based(&[1, 1]).is_err());
        assert!(Permutation::from_one_based(&[0, 1]).is_err());
        assert!(Permutation::from_one_based(&[1, 3]).is_err());
    }

    #[test]
    fn conjugacy_examples() {
        let t12 = Permutation::from_cycles(3, &[&[0, 1]]).unwrap();
        let t23 = Permutation::from_cycles(3, &[&[1, 2]]).unwrap();
        let c123 = Permutation::from_cycles(3, &[&[0, 1, 2]]).unwrap();
        let g = conjugate_in_sn(&t12, &t23).unwrap().unwrap();
        assert_eq!(g.compose(&t12), t23.compose(&g));
        assert_eq!(conjugate_in_sn(&c123, &t12).unwrap(), None);
        assert_eq!(conjugate_in_sn(&c123, &c123).unwrap(), Some(Permutation::identity(3)));
        assert!(conjugate_in_sn(&c123, &Permutation::identity(2)).is_err());
    }

    #[test]
    fn conjugation_by_transposition() {
        let c123 = Permutation::from_cycles(3, &[&[0, 1, 2]]).unwrap();
        let g = Permutation::from_cycles(3, &[&[1, 2]]).unwrap();
        assert_eq!(c123.conjugate_by(&g), Permutation::from_cycles(3, &[&[0, 2, 1]]).unwrap());
    }

    fn any_perm() -> impl Strategy<Value = Permutation> {
        (1usize..=7)
            .prop_flat_map(|n| Just((0..n).collect::<Vec<_>>()).prop_shuffle())
            .prop_map(|v| Permutation::new(v).unwrap())
    }

    fn perm_pair() -> impl Strategy<Value = (Permutation, Permutation)> {
        (1usize..=7).prop_flat_map(|n| {
            let s = Just((0..n).collect::<Vec<_>>());
            (s.clone().prop_shuffle(), s.prop_shuffle())
                .prop_map(|(a, b)| (Permutation::new(a).unwrap(), Permutation::new(b).unwrap()))
        })
    }

    proptest! {
        #[test]
        fn decomposition_is_canonical_partition(p in any_perm()) {
            let d = cycle_decomposition(&p);
            let mut all: Vec<usize> = d.cycles().concat();
            all.sort_unstable();
            prop_assert_eq!(all, (0..p.len()).collect::<Vec<_>>());
            for c in d.cycles() {
                prop_assert_eq!(c[0], *c.iter().min().unwrap());
                for k in 0..c.len() {
                    prop_assert_eq!(p.apply(c[k]), c[(k + 1) % c.len()]);
                }
            }
            prop_assert!(d.cycles().windows(2).all(|w| w[0][0] < w[1][0]));
        }

        #[test]
        fn conjugacy_iff_same_cycle_type((p, q) in perm_pair()) {
            match conjugate_in_sn(&p, &q).unwrap() {
                Some(g) => {
                    prop_assert_eq!(p.cycle_type(), q.cycle_type());
                    prop_assert_eq!(g.compose(&p), q.compose(&g));
                }
                None => prop_assert_ne!(p.cycle_type(), q.cycle_type()),
            }
            // a conjugate always shares the cycle type
            prop_assert_eq!(p.conjugate_by(&q).cycle_type(), p.cycle_type());
        }
    }
}
