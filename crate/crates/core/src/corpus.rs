//! Seeded random measures and step functions.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::constructions::{dyadic_epsilon_recipe, poisson_epsilon_recipe, poisson_staircase};
use crate::dyadic::DyadicRational;
use crate::measure::{Atom, Measure, Segment};
use crate::rational::{q, qi, Q};
use crate::step::StepFunction;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn ratio<R: Rng>(rng: &mut R, lo: i64, hi: i64, den: i64) -> Q {
    q(rng.random_range(lo..=hi), den)
}

/// One to four atoms and up to three segments with `x ∈ [-4, 4]`,
/// `y ∈ [1/16, 3]` and masses in `[1/4, 2]`, all on coarse rational grids.
pub fn random_measure<R: Rng>(rng: &mut R) -> Measure {
    let atoms = (0..rng.random_range(1..=4))
        .map(|_| Atom {
            x: ratio(rng, -96, 96, 24),
            y: ratio(rng, 1, 48, 16),
            mass: ratio(rng, 1, 8, 4),
        })
        .collect();
    let segments = (0..rng.random_range(0..=3))
        .map(|_| {
            let a = ratio(rng, -32, 31, 8);
            let len = ratio(rng, 1, 24, 8);
            Segment {
                b: &a + len,
                a,
                y: ratio(rng, 1, 48, 16),
                density: ratio(rng, 1, 8, 4),
            }
        })
        .collect();
    Measure { atoms, segments }
}

pub fn random_measures(seed: u64, n: usize) -> Vec<Measure> {
    let mut r = rng(seed);
    (0..n).map(|_| random_measure(&mut r)).collect()
}

/// Step function on `(-1, 1]` constant on cells of length `2^{-depth}`, with
/// integer values in `[-4, 4]`, about a third of them zero.
pub fn random_step<R: Rng>(rng: &mut R, depth: u32) -> StepFunction {
    let cells: Vec<Q> = (0..2 << depth)
        .map(|_| {
            if rng.random_bool(1.0 / 3.0) {
                qi(0)
            } else {
                qi(rng.random_range(-4..=4))
            }
        })
        .collect();
    StepFunction::from_cells(DyadicRational::from_int(-1), -(depth as i32), &cells)
}

/// Named measures used for regression: staircases, single atoms, the
/// epsilon-recipe measures and `random` seeded random measures.
pub fn regression_corpus(seed: u64, random: usize) -> Vec<(String, Measure)> {
    let mut out = Vec::new();
    for m in 0..=6 {
        out.push((format!("staircase m={m}"), poisson_staircase(m, &qi(1)).expect("h > 0")));
    }
    out.push((
        "staircase m=3 h=1/8".into(),
        poisson_staircase(3, &q(1, 8)).expect("h > 0"),
    ));
    for (x, y, w) in [(q(1, 2), q(1, 2), qi(1)), (q(1, 2), q(1, 4), qi(1)), (q(-7, 3), q(1, 32), qi(5))] {
        out.push((format!("atom ({x}, {y}, {w})"), Measure::atom(x, y, w)));
    }
    for eps in [4.0, 2.0] {
        let d = dyadic_epsilon_recipe(eps).and_then(|r| r.measure());
        let p = poisson_epsilon_recipe(eps).and_then(|r| r.measure());
        out.push((format!("dyadic recipe eps={eps}"), d.expect("valid ε")));
        out.push((format!("poisson recipe eps={eps}"), p.expect("valid ε")));
    }
    for (n, m) in random_measures(seed, random).into_iter().enumerate() {
        out.push((format!("random #{n}"), m));
    }
    out
}
