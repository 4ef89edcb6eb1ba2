//! Reference generators for the artificial corpus.
//!
//! Every recursive model starts from zero initial conditions and discards
//! `burn_in` leading points. Innovations are standard normal except where the
//! model is count-valued (Poisson emissions and innovations).

use rand::Rng;
use rand_distr::{Binomial, Distribution, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;
use crate::series::TimeSeries;

pub const DEFAULT_BURN_IN: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Model {
    WhiteNoise,
    Ar1 { phi: f64 },
    Ar2 { phi1: f64, phi2: f64 },
    /// Integrated AR(1).
    Arima110 { phi: f64 },
    /// AR(1) driven by fractionally integrated noise of order `d`.
    Arfima { phi: f64, d: f64 },
    Garch11 { omega: f64, alpha: f64, beta: f64 },
    /// Two-regime threshold AR: `alpha * y + e` while `y <= threshold`,
    /// `gamma + beta * y + e` above it.
    Setar { alpha: f64, beta: f64, gamma: f64, threshold: f64 },
    PoissonHmm { transition: Vec<Vec<f64>>, lambdas: Vec<f64> },
    /// Binomial thinning with Poisson innovations.
    Inar1 { alpha: f64, innovation_mean: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    #[serde(flatten)]
    pub model: Model,
    pub burn_in: usize,
}

impl ModelSpec {
    pub fn new(model: Model) -> Self {
        Self {
            model,
            burn_in: DEFAULT_BURN_IN,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |msg: &str| Err(Error::InvalidSpec(msg.to_string()));
        let finite = |xs: &[f64]| xs.iter().all(|x| x.is_finite());
        match &self.model {
            Model::WhiteNoise => Ok(()),
            Model::Ar1 { phi } | Model::Arima110 { phi } => {
                if finite(&[*phi]) && phi.abs() < 1.0 {
                    Ok(())
                } else {
                    invalid("AR(1) requires |phi| < 1")
                }
            }
            Model::Ar2 { phi1, phi2 } => {
                if !finite(&[*phi1, *phi2]) {
                    invalid("AR(2) coefficients must be finite")
                } else if phi2 + phi1 >= 1.0 || phi2 - phi1 >= 1.0 || phi2.abs() >= 1.0 {
                    invalid("AR(2) coefficients outside the stationarity triangle")
                } else {
                    Ok(())
                }
            }
            Model::Arfima { phi, d } => {
                if !finite(&[*phi, *d]) || phi.abs() >= 1.0 {
                    invalid("ARFIMA requires |phi| < 1")
                } else if !(*d > 0.0 && *d < 0.5) {
                    invalid("ARFIMA requires 0 < d < 0.5")
                } else {
                    Ok(())
                }
            }
            Model::Garch11 { omega, alpha, beta } => {
                if !finite(&[*omega, *alpha, *beta]) || *omega <= 0.0 {
                    invalid("GARCH requires omega > 0")
                } else if *alpha < 0.0 || *beta < 0.0 {
                    invalid("GARCH requires alpha_1, beta_1 >= 0")
                } else if alpha + beta >= 1.0 {
                    invalid("GARCH requires alpha_1 + beta_1 < 1")
                } else {
                    Ok(())
                }
            }
            Model::Setar { alpha, beta, gamma, threshold } => {
                if finite(&[*alpha, *beta, *gamma, *threshold]) {
                    Ok(())
                } else {
                    invalid("SETAR parameters must be finite")
                }
            }
            Model::PoissonHmm { transition, lambdas } => {
                let n = lambdas.len();
                if n == 0 {
                    return invalid("HMM needs at least one state");
                }
                if transition.len() != n || transition.iter().any(|r| r.len() != n) {
                    return invalid("HMM transition matrix must be square with one row per state");
                }
                if transition.iter().flatten().any(|&p| !(0.0..=1.0).contains(&p)) {
                    return invalid("HMM transition probabilities must lie in [0, 1]");
                }
                if transition.iter().any(|r| (r.iter().sum::<f64>() - 1.0).abs() > 1e-9) {
                    return invalid("HMM transition rows must sum to 1");
                }
                if lambdas.iter().any(|&l| !(l.is_finite() && l > 0.0)) {
                    return invalid("HMM emission means must be positive");
                }
                Ok(())
            }
            Model::Inar1 { alpha, innovation_mean } => {
                if !(0.0..1.0).contains(alpha) {
                    invalid("INAR requires 0 <= alpha < 1")
                } else if !(innovation_mean.is_finite() && *innovation_mean > 0.0) {
                    invalid("INAR innovation mean must be positive")
                } else {
                    Ok(())
                }
            }
        }
    }
}

/// The eleven reference models with their corpus labels.
pub fn reference_models() -> Vec<(&'static str, ModelSpec)> {
    let m = |model| ModelSpec::new(model);
    vec![
        ("WN", m(Model::WhiteNoise)),
        ("AR1_neg0.5", m(Model::Ar1 { phi: -0.5 })),
        ("AR1_0.5", m(Model::Ar1 { phi: 0.5 })),
        ("AR1_0.9", m(Model::Ar1 { phi: 0.9 })),
        ("AR2", m(Model::Ar2 { phi1: 1.5, phi2: -0.75 })),
        ("ARIMA", m(Model::Arima110 { phi: 0.7 })),
        ("ARFIMA", m(Model::Arfima { phi: 0.9, d: 0.4 })),
        ("GARCH", m(Model::Garch11 { omega: 1e-6, alpha: 0.1, beta: 0.8 })),
        (
            "SETAR",
            m(Model::Setar { alpha: 0.5, beta: -1.8, gamma: 2.0, threshold: -1.0 }),
        ),
        (
            "HMM",
            m(Model::PoissonHmm {
                transition: vec![vec![0.9, 0.1], vec![0.1, 0.9]],
                lambdas: vec![10.0, 15.0],
            }),
        ),
        ("INAR", m(Model::Inar1 { alpha: 0.5, innovation_mean: 1.0 })),
    ]
}

pub fn reference_model(label: &str) -> Option<ModelSpec> {
    reference_models()
        .into_iter()
        .find(|(l, _)| *l == label)
        .map(|(_, s)| s)
}

/// A realisation together with the hidden state path, for models that have one.
#[derive(Debug, Clone)]
pub struct Simulation {
    pub series: TimeSeries,
    pub states: Option<Vec<usize>>,
}

pub fn simulate(spec: &ModelSpec, length: usize, seed: u64) -> Result<TimeSeries> {
    simulate_with_states(spec, length, seed).map(|s| s.series)
}

pub fn simulate_with_states(spec: &ModelSpec, length: usize, seed: u64) -> Result<Simulation> {
    spec.validate()?;
    if length == 0 {
        return Err(Error::InvalidArgument("length must be positive".into()));
    }
    let total = length + spec.burn_in;
    let mut rng = rng::stream(seed, 0);

    let (raw, states): (Vec<f64>, Option<Vec<usize>>) = match &spec.model {
        Model::WhiteNoise => ((0..total).map(|_| gauss(&mut rng)).collect(), None),
        Model::Ar1 { phi } => (ar_filter(&[*phi], (0..total).map(|_| gauss(&mut rng))), None),
        Model::Ar2 { phi1, phi2 } => (ar_filter(&[*phi1, *phi2], (0..total).map(|_| gauss(&mut rng))), None),
        Model::Arima110 { phi } => {
            let ar = ar_filter(&[*phi], (0..total).map(|_| gauss(&mut rng)));
            let mut level = 0.0;
            (ar.into_iter().map(|x| {
                level += x;
                level
            }).collect(), None)
        }
        Model::Arfima { phi, d } => {
            let eps: Vec<f64> = (0..total).map(|_| gauss(&mut rng)).collect();
            let noise = fractional_noise(&eps, *d);
            (ar_filter(&[*phi], noise.into_iter()), None)
        }
        Model::Garch11 { omega, alpha, beta } => {
            let mut y_prev = 0.0;
            let mut var_prev = 0.0;
            let out = (0..total)
                .map(|_| {
                    let var = omega + alpha * y_prev * y_prev + beta * var_prev;
                    let y = var.sqrt() * gauss(&mut rng);
                    y_prev = y;
                    var_prev = var;
                    y
                })
                .collect();
            (out, None)
        }
        Model::Setar { alpha, beta, gamma, threshold } => {
            let mut y = 0.0;
            let out = (0..total)
                .map(|_| {
                    let e = gauss(&mut rng);
                    y = if y <= *threshold { alpha * y + e } else { gamma + beta * y + e };
                    y
                })
                .collect();
            (out, None)
        }
        Model::PoissonHmm { transition, lambdas } => {
            let (values, states) = poisson_hmm(transition, lambdas, total, &mut rng)?;
            (values, Some(states))
        }
        Model::Inar1 { alpha, innovation_mean } => (inar1(*alpha, *innovation_mean, total, &mut rng)?, None),
    };

    let series = TimeSeries::new(raw[spec.burn_in..].to_vec())?;
    let states = states.map(|s| s[spec.burn_in..].to_vec());
    Ok(Simulation { series, states })
}

fn gauss<R: Rng>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

fn ar_filter(coefs: &[f64], innovations: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::with_capacity(innovations.size_hint().0);
    for e in innovations {
        let t = out.len();
        let ar: f64 = coefs
            .iter()
            .enumerate()
            .filter(|(i, _)| *i < t)
            .map(|(i, c)| c * out[t - 1 - i])
            .sum();
        out.push(ar + e);
    }
    out
}

/// Solves `(1 - B)^d x_t = e_t` through its AR(inf) expansion, truncated at
/// the sample length: `x_t = e_t - sum_{j>=1} pi_j x_{t-j}` with
/// `pi_0 = 1`, `pi_j = pi_{j-1} (j - 1 - d) / j`.
pub fn fractional_noise(innovations: &[f64], d: f64) -> Vec<f64> {
    let n = innovations.len();
    let mut pi = Vec::with_capacity(n);
    pi.push(1.0);
    for j in 1..n {
        let prev: f64 = pi[j - 1];
        pi.push(prev * (j as f64 - 1.0 - d) / j as f64);
    }
    let mut x = vec![0.0; n];
    for t in 0..n {
        let mut acc = innovations[t];
        for j in 1..=t {
            acc -= pi[j] * x[t - j];
        }
        x[t] = acc;
    }
    x
}

fn poisson_hmm<R: Rng>(
    transition: &[Vec<f64>],
    lambdas: &[f64],
    total: usize,
    rng: &mut R,
) -> Result<(Vec<f64>, Vec<usize>)> {
    let emitters = lambdas
        .iter()
        .map(|&l| Poisson::new(l).map_err(|e| Error::InvalidSpec(e.to_string())))
        .collect::<Result<Vec<_>>>()?;
    let mut state = 0usize;
    let mut values = Vec::with_capacity(total);
    let mut states = Vec::with_capacity(total);
    for _ in 0..total {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let row = &transition[state];
        state = row
            .iter()
            .position(|&p| {
                acc += p;
                u < acc
            })
            .unwrap_or(row.len() - 1);
        states.push(state);
        values.push(emitters[state].sample(rng));
    }
    Ok((values, states))
}

fn inar1<R: Rng>(alpha: f64, innovation_mean: f64, total: usize, rng: &mut R) -> Result<Vec<f64>> {
    let innov = Poisson::new(innovation_mean).map_err(|e| Error::InvalidSpec(e.to_string()))?;
    let mut y: u64 = 0;
    let mut out = Vec::with_capacity(total);
    for _ in 0..total {
        let survivors = if y == 0 || alpha == 0.0 {
            0
        } else {
            Binomial::new(y, alpha)
                .map_err(|e| Error::InvalidSpec(e.to_string()))?
                .sample(rng)
        };
        let arrivals: f64 = innov.sample(rng);
        y = survivors + arrivals as u64;
        out.push(y as f64);
    }
    Ok(out)
}
