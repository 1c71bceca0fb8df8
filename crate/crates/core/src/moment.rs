//! Moment map of a finitely supported weight function on the lattice.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use crate::exact::{int, Scalar};
use crate::polytope::LatticeVector;
use crate::{Error, Result};

/// Positive weights on finitely many lattice points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedSupport {
    entries: BTreeMap<LatticeVector, Scalar>,
}

impl WeightedSupport {
    /// Repeated points have their weights added.
    pub fn new(entries: impl IntoIterator<Item = (LatticeVector, Scalar)>) -> Result<Self> {
        let mut map: BTreeMap<LatticeVector, Scalar> = BTreeMap::new();
        let mut dim = None;
        for (x, w) in entries {
            if !w.is_positive() {
                return Err(Error::InvalidInput(format!(
                    "weight at {x:?} is not positive"
                )));
            }
            if *dim.get_or_insert(x.len()) != x.len() {
                return Err(Error::DimensionMismatch(
                    "support points of different lengths".into(),
                ));
            }
            *map.entry(x).or_insert_with(Scalar::zero) += w;
        }
        if map.is_empty() {
            return Err(Error::EmptySupport);
        }
        Ok(WeightedSupport { entries: map })
    }

    pub fn dim(&self) -> usize {
        self.entries.keys().next().map_or(0, Vec::len)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&LatticeVector, &Scalar)> {
        self.entries.iter()
    }

    pub fn support(&self) -> Vec<LatticeVector> {
        self.entries.keys().cloned().collect()
    }
}

/// `Σ w_x x / Σ w_x`.
pub fn moment_point(s: &WeightedSupport) -> Vec<Scalar> {
    let mut total = Scalar::zero();
    let mut acc = alloc::vec![Scalar::zero(); s.dim()];
    for (x, w) in s.entries() {
        total += w;
        for (a, &xi) in acc.iter_mut().zip(x) {
            *a += w * int(xi);
        }
    }
    acc.into_iter().map(|a| a / &total).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;
    use alloc::vec;

    #[test]
    fn examples() {
        let one = WeightedSupport::new([(vec![3, -1], ratio(5, 7))]).unwrap();
        assert_eq!(moment_point(&one), vec![int(3), int(-1)]);
        let square =
            WeightedSupport::new([[0, 0], [1, 0], [0, 1], [1, 1]].map(|p| (p.to_vec(), int(1))))
                .unwrap();
        assert_eq!(moment_point(&square), vec![ratio(1, 2), ratio(1, 2)]);
        let two = WeightedSupport::new([(vec![0, 0], int(3)), (vec![2, 0], int(1))]).unwrap();
        assert_eq!(moment_point(&two), vec![ratio(1, 2), int(0)]);
    }

    #[test]
    fn rejects_bad_supports() {
        assert_eq!(WeightedSupport::new([]), Err(Error::EmptySupport));
        assert!(matches!(
            WeightedSupport::new([(vec![0], int(0))]),
            Err(Error::InvalidInput(_))
        ));
    }
}
