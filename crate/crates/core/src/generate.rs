//! Seeded random instances: products of `m` reflectors whose directions come
//! from one of several distributions, and Haar-random orthogonal matrices.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::orthogonal::DenseOrthogonal;
use crate::reflector::{HouseholderProduct, Reflector};
use crate::{Error, Result};

pub const DEFAULT_SPARSE_FRACTION: f64 = 0.02;

/// How reflector directions are drawn. Every direction is normalized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Distribution {
    /// i.i.d. standard normal entries.
    Gaussian,
    /// `⌈fraction·n⌉` random positions with normal entries, zeros elsewhere.
    Sparse { fraction: f64 },
    /// Gaussian first vector; each next one keeps a random half of the
    /// previous entries and redraws the rest.
    Correlated,
    /// Entries `±1` with probability ½.
    Bernoulli,
    /// i.i.d. `Exp(1)` entries.
    Exponential,
    /// `m` orthonormal directions from a Haar-random basis, so `V` is
    /// symmetric with eigenvalue -1 of multiplicity `m`.
    Symmetric,
}

impl Distribution {
    pub const NAMES: [&'static str; 6] = [
        "gaussian",
        "sparse",
        "correlated",
        "bernoulli",
        "exponential",
        "symmetric",
    ];

    pub fn all() -> [Distribution; 6] {
        [
            Distribution::Gaussian,
            Distribution::Sparse {
                fraction: DEFAULT_SPARSE_FRACTION,
            },
            Distribution::Correlated,
            Distribution::Bernoulli,
            Distribution::Exponential,
            Distribution::Symmetric,
        ]
    }

    pub fn name(&self) -> &'static str {
        match self {
            Distribution::Gaussian => "gaussian",
            Distribution::Sparse { .. } => "sparse",
            Distribution::Correlated => "correlated",
            Distribution::Bernoulli => "bernoulli",
            Distribution::Exponential => "exponential",
            Distribution::Symmetric => "symmetric",
        }
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distribution::Sparse { fraction } => write!(f, "sparse:{fraction}"),
            other => f.write_str(other.name()),
        }
    }
}

/// Parses `gaussian`, `sparse`, `sparse:0.05`, `correlated`, `bernoulli`,
/// `exponential` or `symmetric`.
impl FromStr for Distribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        let dist = match (name.to_ascii_lowercase().as_str(), arg) {
            ("gaussian", None) => Distribution::Gaussian,
            ("sparse", None) => Distribution::Sparse {
                fraction: DEFAULT_SPARSE_FRACTION,
            },
            ("sparse", Some(a)) => Distribution::Sparse {
                fraction: a
                    .parse()
                    .map_err(|_| Error::InvalidArgument(format!("bad sparse fraction {a:?}")))?,
            },
            ("correlated", None) => Distribution::Correlated,
            ("bernoulli", None) => Distribution::Bernoulli,
            ("exponential", None) => Distribution::Exponential,
            ("symmetric", None) => Distribution::Symmetric,
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "unknown distribution {s:?}; expected one of {}",
                    Distribution::NAMES.join(", ")
                )))
            }
        };
        Ok(dist)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorSpec {
    pub distribution: Distribution,
    pub n: usize,
    pub m: usize,
    pub seed: u64,
}

/// A generated matrix together with the factors it was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub factors: HouseholderProduct,
    pub matrix: DenseOrthogonal,
}

impl GeneratorSpec {
    pub fn new(distribution: Distribution, n: usize, m: usize, seed: u64) -> Result<Self> {
        let spec = Self {
            distribution,
            n,
            m,
            seed,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m < 1 || self.m > self.n {
            return Err(Error::InvalidArgument(format!(
                "need 1 <= m <= n, got m = {}, n = {}",
                self.m, self.n
            )));
        }
        if let Distribution::Sparse { fraction } = self.distribution {
            if !(fraction > 0.0 && fraction <= 1.0) {
                return Err(Error::InvalidArgument(format!(
                    "sparse fraction must lie in (0, 1], got {fraction}"
                )));
            }
        }
        Ok(())
    }

    pub fn directions(&self) -> Result<Vec<Reflector>> {
        self.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let n = self.n;
        let raw: Vec<DVector<f64>> = match self.distribution {
            Distribution::Gaussian => (0..self.m).map(|_| gaussian(&mut rng, n)).collect(),
            Distribution::Sparse { fraction } => {
                // guard against 0.07 * 100 = 7.000000000000001
                let nnz = ((fraction * n as f64 - 1e-9).ceil() as usize).clamp(1, n);
                (0..self.m)
                    .map(|_| {
                        let mut u = DVector::zeros(n);
                        for pos in index::sample(&mut rng, n, nnz) {
                            u[pos] = rng.sample(StandardNormal);
                        }
                        u
                    })
                    .collect()
            }
            Distribution::Correlated => {
                let mut out = Vec::with_capacity(self.m);
                let mut prev = gaussian(&mut rng, n);
                out.push(prev.clone());
                for _ in 1..self.m {
                    let mut next = gaussian(&mut rng, n);
                    for pos in index::sample(&mut rng, n, n / 2) {
                        next[pos] = prev[pos];
                    }
                    out.push(next.clone());
                    prev = next;
                }
                out
            }
            Distribution::Bernoulli => (0..self.m)
                .map(|_| DVector::from_fn(n, |_, _| if rng.random_bool(0.5) { 1.0 } else { -1.0 }))
                .collect(),
            Distribution::Exponential => (0..self.m)
                .map(|_| DVector::from_fn(n, |_, _| rng.sample(Exp1)))
                .collect(),
            Distribution::Symmetric => {
                let q = haar_orthogonal(&mut rng, n);
                (0..self.m).map(|j| q.column(j).into_owned()).collect()
            }
        };
        raw.into_iter().map(Reflector::new).collect()
    }

    pub fn generate(&self) -> Result<Instance> {
        let factors = HouseholderProduct::new(self.n, self.directions()?)?;
        let matrix = factors.materialize();
        Ok(Instance { factors, matrix })
    }
}

fn gaussian<R: Rng>(rng: &mut R, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.sample(StandardNormal))
}

/// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the
/// signs of `R`'s diagonal folded into `Q`.
fn haar_orthogonal<R: Rng>(rng: &mut R, n: usize) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| rng.sample(StandardNormal));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for (j, mut col) in q.column_iter_mut().enumerate() {
        if r[(j, j)] < 0.0 {
            col.neg_mut();
        }
    }
    q
}

/// Haar-random `n × n` orthogonal matrix from a seed.
pub fn random_orthogonal(n: usize, seed: u64) -> DenseOrthogonal {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DenseOrthogonal::new(haar_orthogonal(&mut rng, n)).expect("QR factor is orthogonal")
}
