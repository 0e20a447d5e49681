use crate::math::OtRng;

use super::{Family, InstancePair, Kind, SphError};

/// Composite family over `n = h + t` instances: vectors sampled with the
/// first `h` entries projective and the last `t` smooth, plus a cheating
/// sampler that makes every entry projective. Each entry draws from its own
/// forked generator, so entries are independent given the parameters.
pub struct Sphdhc<F: Family> {
    pub params: F::Params,
    pub n: usize,
    pub h: usize,
}

impl<F: Family> Sphdhc<F> {
    pub fn new(params: F::Params, n: usize, h: usize) -> Result<Self, SphError> {
        if h < 1 {
            return Err(SphError::Parameter("composite: h must be >= 1".into()));
        }
        if h >= n {
            return Err(SphError::Parameter(
                "composite: h must be < n (t >= 1)".into(),
            ));
        }
        Ok(Sphdhc { params, n, h })
    }

    pub fn t(&self) -> usize {
        self.n - self.h
    }

    /// Vector sampler: entries `1..=h` projective, `h+1..=n` smooth.
    pub fn sample_vector(&self, rng: &mut OtRng) -> Vec<InstancePair<F>> {
        let seeds: Vec<[u8; 32]> = (0..self.n).map(|_| rng.seed32()).collect();
        self.sample_vector_from_seeds(&seeds)
    }

    /// Deterministic form of [`sample_vector`]: entry `j` is a function of
    /// the parameters and seed `j` alone.
    pub fn sample_vector_from_seeds(&self, seeds: &[[u8; 32]]) -> Vec<InstancePair<F>> {
        assert_eq!(seeds.len(), self.n);
        seeds
            .iter()
            .enumerate()
            .map(|(j, seed)| {
                let kind = if j < self.h {
                    Kind::Projective
                } else {
                    Kind::Smooth
                };
                F::is(&self.params, kind, &mut OtRng::from_seed_bytes(*seed))
            })
            .collect()
    }

    /// Cheating sampler: all `n` entries projective.
    pub fn cheat(&self, rng: &mut OtRng) -> Vec<InstancePair<F>> {
        (0..self.n)
            .map(|_| {
                let mut child = rng.fork();
                F::is(&self.params, Kind::Projective, &mut child)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ddh::DdhFamily;
    use crate::sph::Profile;

    fn toy_composite(n: usize, h: usize) -> Sphdhc<DdhFamily> {
        let mut rng = OtRng::seeded(17);
        let params = DdhFamily::pg(Profile::Toy, &mut rng).unwrap();
        Sphdhc::new(params, n, h).unwrap()
    }

    #[test]
    fn rejects_degenerate_splits() {
        let mut rng = OtRng::seeded(17);
        let params = DdhFamily::pg(Profile::Toy, &mut rng).unwrap();
        assert!(Sphdhc::<DdhFamily>::new(params.clone(), 3, 3).is_err());
        assert!(Sphdhc::<DdhFamily>::new(params.clone(), 3, 0).is_err());
        assert!(Sphdhc::<DdhFamily>::new(params, 2, 1).is_ok());
    }

    #[test]
    fn vector_kinds_follow_the_split() {
        let fam = toy_composite(2, 1);
        let mut rng = OtRng::seeded(3);
        let v = fam.sample_vector(&mut rng);
        assert_eq!(v.len(), 2);
        assert_eq!(
            DdhFamily::di(&fam.params, &v[0].instance, &v[0].witness).unwrap(),
            Kind::Projective
        );
        assert_eq!(
            DdhFamily::di(&fam.params, &v[1].instance, &v[1].witness).unwrap(),
            Kind::Smooth
        );
    }

    #[test]
    fn di_matches_requested_kind_always() {
        let fam = toy_composite(5, 2);
        let mut rng = OtRng::seeded(4);
        for _ in 0..50 {
            let v = fam.sample_vector(&mut rng);
            for (j, pair) in v.iter().enumerate() {
                let expect = if j < fam.h {
                    Kind::Projective
                } else {
                    Kind::Smooth
                };
                assert_eq!(pair.kind, expect);
                assert_eq!(
                    DdhFamily::di(&fam.params, &pair.instance, &pair.witness).unwrap(),
                    expect
                );
            }
        }
    }

    #[test]
    fn cheat_vectors_are_all_projective() {
        let fam = toy_composite(3, 1);
        let mut rng = OtRng::seeded(5);
        for _ in 0..20 {
            let v = fam.cheat(&mut rng);
            assert_eq!(v.len(), 3);
            for pair in &v {
                assert_eq!(
                    DdhFamily::di(&fam.params, &pair.instance, &pair.witness).unwrap(),
                    Kind::Projective
                );
            }
        }
    }

    #[test]
    fn entries_depend_only_on_their_seed_segment() {
        let fam = toy_composite(4, 2);
        let mut rng = OtRng::seeded(6);
        let seeds: Vec<[u8; 32]> = (0..4).map(|_| rng.seed32()).collect();
        let v = fam.sample_vector_from_seeds(&seeds);
        // Swapping the seeds of two same-kind entries swaps exactly those
        // entries.
        let mut swapped = seeds.clone();
        swapped.swap(0, 1); // both projective
        let v2 = fam.sample_vector_from_seeds(&swapped);
        assert_eq!(v2[0].instance, v[1].instance);
        assert_eq!(v2[1].instance, v[0].instance);
        assert_eq!(v2[2].instance, v[2].instance);
        assert_eq!(v2[3].instance, v[3].instance);
        let mut swapped = seeds;
        swapped.swap(2, 3); // both smooth
        let v3 = fam.sample_vector_from_seeds(&swapped);
        assert_eq!(v3[2].instance, v[3].instance);
        assert_eq!(v3[3].instance, v[2].instance);
        assert_eq!(v3[0].instance, v[0].instance);
    }
}
