#![allow(dead_code)]

use destab::arith::{int, rat};
use destab::poset::ordered_tuples;
use destab::stability::WeightVector;
use destab::{FiltrationSpec, PivotSet, Rat, SheafData, StabilityParam};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Debug)]
pub struct Instance {
    pub fs: FiltrationSpec,
    pub ps: PivotSet,
    pub sp: StabilityParam,
    pub weights: WeightVector,
}

pub struct Shape {
    pub max_rank: usize,
    pub max_arity: usize,
    pub max_len: usize,
    pub max_pivots: usize,
}

pub const SMALL: Shape = Shape {
    max_rank: 8,
    max_arity: 4,
    max_len: 4,
    max_pivots: 4,
};

pub fn random_rat(rng: &mut ChaCha8Rng, lo: i64, hi: i64, max_den: i64) -> Rat {
    rat(rng.gen_range(lo..=hi), rng.gen_range(1..=max_den))
}

pub fn random_filtration(rng: &mut ChaCha8Rng, shape: &Shape) -> FiltrationSpec {
    let r = rng.gen_range(2..=shape.max_rank);
    let a = rng.gen_range(1..=shape.max_arity);
    let s = rng.gen_range(1..=shape.max_len.min(r - 1));
    let mut ranks: Vec<usize> = (1..r)
        .collect::<Vec<_>>()
        .choose_multiple(rng, s)
        .copied()
        .collect();
    ranks.sort_unstable();
    let steps = ranks
        .into_iter()
        .map(|k| SheafData::new(k, rng.gen_range(-12..=12)))
        .collect();
    FiltrationSpec::new(a, SheafData::new(r, rng.gen_range(-12..=12)), steps)
}

pub fn random_pivots(rng: &mut ChaCha8Rng, arity: usize, t: usize, max_pivots: usize) -> PivotSet {
    let all = ordered_tuples(arity, t);
    let n = rng.gen_range(1..=max_pivots.min(all.len()));
    PivotSet::new(t, arity, all.choose_multiple(rng, n).cloned())
        .expect("sampled tuples are in range")
}

pub fn random_weights(rng: &mut ChaCha8Rng, s: usize) -> WeightVector {
    WeightVector::new((0..s).map(|_| random_rat(rng, 1, 12, 4)).collect()).unwrap()
}

pub fn random_instance(rng: &mut ChaCha8Rng, shape: &Shape) -> Instance {
    let fs = random_filtration(rng, shape);
    let ps = random_pivots(rng, fs.arity, fs.levels(), shape.max_pivots);
    let sp = StabilityParam::slope(random_rat(rng, 1, 6, 3)).unwrap();
    let weights = random_weights(rng, fs.len());
    Instance {
        fs,
        ps,
        sp,
        weights,
    }
}

/// The rank-six bundle `O(1)^6` with three steps and three pivots.
pub fn rank6() -> (FiltrationSpec, PivotSet, StabilityParam, WeightVector) {
    let fs = FiltrationSpec::new(
        4,
        SheafData::new(6, 6),
        vec![
            SheafData::new(1, 1),
            SheafData::new(3, 3),
            SheafData::new(5, 5),
        ],
    );
    let ps = PivotSet::from_vecs(
        4,
        4,
        &[vec![1, 1, 4, 4], vec![2, 2, 2, 4], vec![3, 3, 3, 3]],
    )
    .unwrap();
    (
        fs,
        ps,
        StabilityParam::slope(int(1)).unwrap(),
        WeightVector::from_ints(&[4, 2, 6]).unwrap(),
    )
}
