//! Fixtures shared by the benchmarks.

use destab::arith::int;
use destab::poset::ordered_tuples;
use destab::stability::WeightVector;
use destab::{FiltrationSpec, PivotSet, SheafData, StabilityParam};

pub struct Fixture {
    pub fs: FiltrationSpec,
    pub ps: PivotSet,
    pub sp: StabilityParam,
    pub weights: WeightVector,
}

/// The rank-six bundle `O(1)^6` with three steps and three pivots.
pub fn rank6() -> Fixture {
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
    Fixture {
        fs,
        ps,
        sp: StabilityParam::slope(int(1)).unwrap(),
        weights: WeightVector::from_ints(&[4, 2, 6]).unwrap(),
    }
}

/// A trivial bundle of rank `s + 1` with steps of rank `1..=s`, arity `a`,
/// and the middle level set as its pivots (the largest antichain).
pub fn middle_level(s: usize, a: usize) -> Fixture {
    let t = s + 1;
    let steps = (1..=s).map(|k| SheafData::new(k, 0)).collect();
    let fs = FiltrationSpec::new(a, SheafData::new(t, 0), steps);
    let target = a * (t + 1) / 2;
    let ps = PivotSet::new(
        t,
        a,
        ordered_tuples(a, t)
            .into_iter()
            .filter(|p| p.sum() == target),
    )
    .unwrap();
    let weights = WeightVector::from_ints(&(1..=s as i64).collect::<Vec<_>>()).unwrap();
    Fixture {
        fs,
        ps,
        sp: StabilityParam::slope(int(1)).unwrap(),
        weights,
    }
}
