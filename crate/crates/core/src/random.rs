//! Seeded generator of operators given in factored form
//! `a(z)·Π (z^{ν_i} φ - c_{i,l}) h_{i,l}^{-1}`, used by the self-test and the
//! property suites.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::factorize::FirstOrderFactor;
use crate::fields::{q, qi, Field, RatFun, Rational};
use crate::hahn::QSeries;
use crate::operator::MahlerOperator;

/// Operator data before expansion. Layers are listed smallest twist first;
/// inside a layer the rightmost factor comes first.
#[derive(Clone, Debug)]
pub struct FactoredOperator {
    pub p: u32,
    pub a: QSeries,
    pub layers: Vec<Vec<FirstOrderFactor>>,
}

impl FactoredOperator {
    pub fn order(&self) -> usize {
        self.layers.iter().map(Vec::len).sum()
    }

    /// The expanded operator, with `h^{-1}` certified below `ceiling`.
    pub fn expand(&self, ceiling: &Rational) -> Result<MahlerOperator<Rational>> {
        let mut acc = MahlerOperator::multiplication(self.p, self.a.clone());
        for layer in self.layers.iter().rev() {
            for f in layer.iter().rev() {
                acc = acc.mul(&f.operator(self.p, ceiling)?)?;
            }
        }
        Ok(acc)
    }

    pub fn nus(&self) -> Vec<Rational> {
        self.layers.iter().map(|l| l[0].nu.clone()).collect()
    }
}

#[derive(Clone, Debug)]
pub struct GeneratorConfig {
    pub max_order: usize,
    pub max_h_terms: usize,
    pub radices: Vec<u32>,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            max_order: 4,
            max_h_terms: 5,
            radices: vec![2, 3],
        }
    }
}

pub struct OperatorGenerator {
    rng: ChaCha8Rng,
    cfg: GeneratorConfig,
}

const EXPONENTS: [(i64, i64); 8] = [(1, 1), (1, 1), (2, 1), (3, 1), (1, 2), (3, 2), (5, 2), (4, 1)];
const CONSTANTS: [(i64, i64); 7] = [(1, 1), (-1, 1), (2, 1), (1, 2), (-2, 1), (3, 1), (-1, 3)];

impl OperatorGenerator {
    pub fn new(seed: u64, cfg: GeneratorConfig) -> Self {
        OperatorGenerator {
            rng: ChaCha8Rng::seed_from_u64(seed),
            cfg,
        }
    }

    fn small_int(&mut self) -> i64 {
        *[-2i64, -1, 1, 1, 2, 3].choose(&mut self.rng).expect("nonempty")
    }

    fn constant(&mut self) -> Rational {
        let (n, d) = *CONSTANTS.choose(&mut self.rng).expect("nonempty");
        q(n, d)
    }

    /// Tangent-to-identity series with at most `max_h_terms` terms.
    pub fn tangent(&mut self) -> QSeries {
        let extra = self.rng.gen_range(0..self.cfg.max_h_terms);
        let mut terms = vec![(qi(0), qi(1))];
        for _ in 0..extra {
            let (n, d) = *EXPONENTS.choose(&mut self.rng).expect("nonempty");
            terms.push((q(n, d), qi(self.small_int())));
        }
        QSeries::exact(terms)
    }

    /// Unit `c z^v (1 + …)` with at most two extra terms.
    pub fn unit(&mut self) -> QSeries {
        let v = qi(self.rng.gen_range(-2..=2));
        let c = self.constant();
        let mut terms = vec![(v.clone(), c)];
        for _ in 0..self.rng.gen_range(0..3) {
            let (n, d) = *EXPONENTS.choose(&mut self.rng).expect("nonempty");
            terms.push((&v + q(n, d), qi(self.small_int())));
        }
        QSeries::exact(terms)
    }

    pub fn factored(&mut self) -> FactoredOperator {
        let p = *self.cfg.radices.choose(&mut self.rng).expect("nonempty");
        let n = self.rng.gen_range(1..=self.cfg.max_order);
        let mut sizes = Vec::new();
        let mut left = n;
        while left > 0 {
            let r = self.rng.gen_range(1..=left);
            sizes.push(r);
            left -= r;
        }
        let pm1 = (p - 1) as i64;
        let mut nu = self.rng.gen_range(-2..=1) * pm1;
        let mut layers = Vec::new();
        // a small pool makes repeated exponents likely
        let pool: Vec<Rational> = (0..2).map(|_| self.constant()).collect();
        for r in sizes {
            let mut layer = Vec::new();
            for _ in 0..r {
                let c = if self.rng.gen_bool(0.7) {
                    pool.choose(&mut self.rng).expect("nonempty").clone()
                } else {
                    self.constant()
                };
                layer.push(FirstOrderFactor {
                    nu: qi(nu),
                    c,
                    h: self.tangent(),
                });
            }
            layers.push(layer);
            nu += self.rng.gen_range(1..=2) * pm1;
        }
        FactoredOperator {
            p,
            a: self.unit(),
            layers,
        }
    }

    /// `(μ, c, g)` for the first-order solver, with `g` a finite sum of
    /// parametric monomials.
    pub fn order1_case(&mut self) -> (u32, Rational, Rational, crate::hahn::ParametricSeries) {
        let p = *self.cfg.radices.choose(&mut self.rng).expect("nonempty");
        let mu = q(
            self.rng.gen_range(-4..=4),
            *[1i64, 2].choose(&mut self.rng).expect("nonempty"),
        );
        let c = self.constant();
        let mut terms = Vec::new();
        for _ in 0..self.rng.gen_range(1..=4) {
            let e = q(self.rng.gen_range(-8..=8), 2);
            let coeff = match self.rng.gen_range(0..4) {
                0 => RatFun::constant(qi(self.small_int())),
                1 => RatFun::lambda_minus_pow(&c, 1).scaled(&qi(self.small_int())),
                2 => RatFun::lambda_pow(self.rng.gen_range(-2..=2)),
                _ => RatFun::lambda_minus_pow(&self.constant(), self.rng.gen_range(1..=2))
                    .inverse()
                    .expect("nonzero"),
            };
            terms.push((e, coeff));
        }
        (p, mu, c, crate::hahn::ParametricSeries::exact(terms))
    }
}
