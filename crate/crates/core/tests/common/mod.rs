#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use ontosymm::numerics::{Scalar, Tolerance};
use ontosymm::ontological::{swap_and_relabel, Bijection, OntModel, OnticLabel, OnticSpace};
use ontosymm::operational::{LabelSet, Signature};

/// A distribution over `n` outcomes with small integer weights, some of them
/// zero. Returns exact rationals.
pub fn random_distribution(rng: &mut ChaCha8Rng, n: usize) -> Vec<Scalar> {
    loop {
        let w: Vec<i64> = (0..n).map(|_| rng.random_range(0..=3)).collect();
        let total: i64 = w.iter().sum();
        if total > 0 {
            return w.iter().map(|&k| Scalar::ratio(k, total)).collect();
        }
    }
}

pub fn labels(prefix: &str, n: usize) -> LabelSet {
    LabelSet::new((0..n).map(|i| format!("{prefix}{i}"))).unwrap()
}

/// Shape of a random model: `(|A|, |B|, |X|, |Y|, |Λ|)`.
pub fn random_shape(rng: &mut ChaCha8Rng) -> (usize, usize, usize, usize, usize) {
    (
        rng.random_range(1..=4),
        rng.random_range(1..=4),
        rng.random_range(1..=4),
        rng.random_range(1..=4),
        rng.random_range(1..=6),
    )
}

/// Raw factor tables of a general model, kept so tests can recompute sums
/// without going through the library.
pub struct RawModel {
    pub na: usize,
    pub nb: usize,
    pub nx: usize,
    pub ny: usize,
    pub nl: usize,
    /// `[x][a]`
    pub prep_out: Vec<Vec<Scalar>>,
    /// `[a][x][λ]`
    pub prep_ontic: Vec<Vec<Vec<Scalar>>>,
    /// `[λ][y][b]`
    pub meas: Vec<Vec<Vec<Scalar>>>,
}

impl RawModel {
    pub fn random(rng: &mut ChaCha8Rng) -> RawModel {
        let (na, nb, nx, ny, nl) = random_shape(rng);
        let prep_out = (0..nx).map(|_| random_distribution(rng, na)).collect();
        let prep_ontic = (0..na)
            .map(|_| (0..nx).map(|_| random_distribution(rng, nl)).collect())
            .collect();
        let meas = (0..nl)
            .map(|_| (0..ny).map(|_| random_distribution(rng, nb)).collect())
            .collect();
        RawModel {
            na,
            nb,
            nx,
            ny,
            nl,
            prep_out,
            prep_ontic,
            meas,
        }
    }

    pub fn signature(&self) -> Signature {
        Signature::new(
            labels("a", self.na),
            labels("b", self.nb),
            labels("x", self.nx),
            labels("y", self.ny),
        )
    }

    pub fn build(&self) -> OntModel {
        OntModel::with_induced_experiment(
            "random",
            self.signature(),
            OnticSpace::numbered(self.nl).unwrap(),
            |a, x| self.prep_out[x][a].clone(),
            |l, a, x| self.prep_ontic[a][x][l].clone(),
            |b, l, y| self.meas[l][y][b].clone(),
        )
        .unwrap()
    }
}

/// A model whose ontic distribution does not depend on the preparation
/// input, together with a random bijection onto renamed states and the
/// partner built from it.
pub struct SymmetrizablePair {
    pub m1: OntModel,
    pub m2: OntModel,
    pub f: Bijection,
}

/// `p(λ)` and response functions `p(a | λ, x)`, `p(b | λ, y)` with small
/// denominators; the preparation is obtained from them by Bayes' rule.
pub fn random_symmetrizable(rng: &mut ChaCha8Rng) -> SymmetrizablePair {
    let (na, nb, nx, ny, nl) = random_shape(rng);
    let prior = random_distribution(rng, nl);
    // [λ][x][a]
    let respond_a: Vec<Vec<Vec<Scalar>>> = (0..nl)
        .map(|_| (0..nx).map(|_| random_distribution(rng, na)).collect())
        .collect();
    // [λ][y][b]
    let respond_b: Vec<Vec<Vec<Scalar>>> = (0..nl)
        .map(|_| (0..ny).map(|_| random_distribution(rng, nb)).collect())
        .collect();
    let out = |a: usize, x: usize| -> Scalar {
        let mut s = Scalar::ratio(0, 1);
        for l in 0..nl {
            s = &s + &(&prior[l] * &respond_a[l][x][a]);
        }
        s
    };
    let sig = Signature::new(
        labels("a", na),
        labels("b", nb),
        labels("x", nx),
        labels("y", ny),
    );
    let m1 = OntModel::with_induced_experiment(
        "forward",
        sig,
        OnticSpace::numbered(nl).unwrap(),
        out,
        |l, a, x| {
            let norm = out(a, x);
            if norm.is_zero(Tolerance::DEFAULT) {
                prior[l].clone()
            } else {
                &(&prior[l] * &respond_a[l][x][a]) / &norm
            }
        },
        |b, l, y| respond_b[l][y][b].clone(),
    )
    .unwrap();

    let mut perm: Vec<usize> = (0..nl).collect();
    for i in (1..nl).rev() {
        perm.swap(i, rng.random_range(0..=i));
    }
    let renamed = OnticSpace::new(
        (0..nl)
            .map(|i| OnticLabel::single(format!("μ{i}")))
            .collect(),
    )
    .unwrap();
    let f = Bijection::new(m1.lambda().clone(), renamed, perm).unwrap();
    let m2 = swap_and_relabel(&m1, &f, "backward", Tolerance::DEFAULT).unwrap();
    SymmetrizablePair { m1, m2, f }
}
