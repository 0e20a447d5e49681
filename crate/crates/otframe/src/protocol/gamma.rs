use std::collections::BTreeSet;

use crate::math::OtRng;

use super::SetupError;

/// A bijection on `{0, .., n-1}`. Applying it moves the element at position
/// `i` to position `image(i)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    map: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            map: (0..n).collect(),
        }
    }

    /// Uniform permutation by Fisher-Yates.
    pub fn random(n: usize, rng: &mut OtRng) -> Self {
        let mut map: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = rng.index(i + 1);
            map.swap(i, j);
        }
        Permutation { map }
    }

    pub fn from_images(map: Vec<usize>) -> Result<Self, SetupError> {
        let n = map.len();
        let mut seen = vec![false; n];
        for &img in &map {
            if img >= n || seen[img] {
                return Err(SetupError::Parameter(
                    "permutation images must be a bijection".into(),
                ));
            }
            seen[img] = true;
        }
        Ok(Permutation { map })
    }

    pub fn n(&self) -> usize {
        self.map.len()
    }

    pub fn image(&self, i: usize) -> usize {
        self.map[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.map
    }

    /// `out[image(i)] = xs[i]`.
    pub fn apply<T: Clone>(&self, xs: &[T]) -> Vec<T> {
        assert_eq!(xs.len(), self.map.len());
        let mut out: Vec<Option<T>> = vec![None; xs.len()];
        for (i, x) in xs.iter().enumerate() {
            out[self.map[i]] = Some(x.clone());
        }
        out.into_iter().map(|x| x.unwrap()).collect()
    }

    pub fn image_of_set(&self, s: &BTreeSet<usize>) -> BTreeSet<usize> {
        s.iter().map(|&i| self.map[i]).collect()
    }
}

/// Uniform permutation mapping the set `b1` onto `b2`: each target in `b2`
/// draws its source from `b1` without replacement, then the complements are
/// matched the same way.
pub fn gamma_sample(
    b1: &BTreeSet<usize>,
    b2: &BTreeSet<usize>,
    n: usize,
    rng: &mut OtRng,
) -> Result<Permutation, SetupError> {
    if b1.len() != b2.len() {
        return Err(SetupError::Parameter(
            "gamma: source and target sets must have equal size".into(),
        ));
    }
    if b1.iter().chain(b2.iter()).any(|&i| i >= n) {
        return Err(SetupError::Parameter(
            "gamma: set element out of range".into(),
        ));
    }
    let mut map = vec![usize::MAX; n];
    let mut sources: Vec<usize> = b1.iter().copied().collect();
    for &target in b2 {
        let pick = rng.index(sources.len());
        let source = sources.swap_remove(pick);
        map[source] = target;
    }
    let mut rest_sources: Vec<usize> = (0..n).filter(|i| !b1.contains(i)).collect();
    for target in (0..n).filter(|j| !b2.contains(j)) {
        let pick = rng.index(rest_sources.len());
        let source = rest_sources.swap_remove(pick);
        map[source] = target;
    }
    Ok(Permutation { map })
}
