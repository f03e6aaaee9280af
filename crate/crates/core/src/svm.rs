//! Linear SVM trained by dual coordinate descent.
//!
//! The bias is learned as the weight of a constant feature appended to every
//! example, so it is regularized together with the other weights. For the
//! hinge loss the dual is
//!
//! ```text
//! min_a  1/2 a'Qa - e'a   s.t. 0 <= a_i <= C,   Q_ij = y_i y_j (x_i.x_j + 1)
//! ```
//!
//! and for the squared hinge the box becomes `[0, inf)` with `1/(2C)` added to
//! the diagonal of `Q`. Coordinates are visited in a seeded random order each
//! epoch; training stops once the largest projected-gradient violation in an
//! epoch falls below `tol`.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::features::{FeatureSpace, SparseBooleanVector};
use crate::label::StanceLabel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Loss {
    Hinge,
    SquaredHinge,
}

impl fmt::Display for Loss {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Loss::Hinge => "hinge",
            Loss::SquaredHinge => "squared_hinge",
        })
    }
}

impl FromStr for Loss {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "hinge" | "l1" => Ok(Loss::Hinge),
            "squared_hinge" | "squared-hinge" | "l2" => Ok(Loss::SquaredHinge),
            other => Err(Error::InvalidConfig(alloc::format!("unknown loss '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub c: f64,
    pub tol: f64,
    /// Maximum number of passes over the data.
    pub max_iter: usize,
    pub seed: u64,
    pub loss: Loss,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            c: 1.0,
            tol: 1e-4,
            max_iter: 1000,
            seed: 0,
            loss: Loss::Hinge,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::InvalidConfig(alloc::format!("C must be positive, got {}", self.c)));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidConfig(alloc::format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidConfig("max_iter must be at least 1".to_string()));
        }
        Ok(())
    }

    fn upper_bound(&self) -> f64 {
        match self.loss {
            Loss::Hinge => self.c,
            Loss::SquaredHinge => f64::INFINITY,
        }
    }

    fn diagonal(&self) -> f64 {
        match self.loss {
            Loss::Hinge => 0.0,
            Loss::SquaredHinge => 0.5 / self.c,
        }
    }
}

/// Result of a single binary fit.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryFit {
    pub weights: Vec<f64>,
    pub bias: f64,
    /// Dual coefficients, one per training example.
    pub alpha: Vec<f64>,
    pub epochs: usize,
    pub converged: bool,
    /// Dual objective `1/2 a'Qa - e'a` at the returned `alpha`.
    pub objective: f64,
}

impl BinaryFit {
    pub fn decision(&self, x: &SparseBooleanVector) -> f64 {
        x.dot(&self.weights) + self.bias
    }
}

fn check_dimensions(vectors: &[SparseBooleanVector]) -> Result<usize> {
    let dim = vectors.first().map(|v| v.dimension()).unwrap_or(0);
    for v in vectors {
        if v.dimension() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: v.dimension() });
        }
    }
    Ok(dim)
}

/// Trains a binary linear SVM on labels in `{-1, +1}`.
pub fn train_binary(
    vectors: &[SparseBooleanVector],
    labels: &[i8],
    config: &TrainConfig,
) -> Result<BinaryFit> {
    config.validate()?;
    if vectors.len() != labels.len() {
        return Err(Error::LengthMismatch { left: vectors.len(), right: labels.len() });
    }
    if let Some(&bad) = labels.iter().find(|&&y| y != 1 && y != -1) {
        return Err(Error::InvalidLabel(bad));
    }
    if !(labels.contains(&1) && labels.contains(&-1)) {
        return Err(Error::DegenerateTrainingSet);
    }
    let dim = check_dimensions(vectors)?;

    let n = vectors.len();
    let upper = config.upper_bound();
    let diag = config.diagonal();
    let qd: Vec<f64> = vectors.iter().map(|v| v.nnz() as f64 + 1.0 + diag).collect();

    let mut alpha = vec![0.0; n];
    let mut w = vec![0.0; dim];
    let mut b = 0.0;
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut epochs = 0;
    let mut converged = false;

    while epochs < config.max_iter {
        order.shuffle(&mut rng);
        let mut max_violation = 0.0f64;
        for &i in &order {
            let x = &vectors[i];
            let y = f64::from(labels[i]);
            let g = y * (x.dot(&w) + b) - 1.0 + diag * alpha[i];
            let pg = if alpha[i] <= 0.0 {
                g.min(0.0)
            } else if alpha[i] >= upper {
                g.max(0.0)
            } else {
                g
            };
            max_violation = max_violation.max(pg.abs());
            if pg.abs() > 1e-12 {
                let old = alpha[i];
                alpha[i] = (old - g / qd[i]).clamp(0.0, upper);
                let step = (alpha[i] - old) * y;
                for &j in x.indices() {
                    w[j] += step;
                }
                b += step;
            }
        }
        epochs += 1;
        if max_violation < config.tol {
            converged = true;
            break;
        }
    }

    let objective = dual_objective(vectors, labels, &alpha, config);
    Ok(BinaryFit { weights: w, bias: b, alpha, epochs, converged, objective })
}

fn dual_objective_from_primal(w: &[f64], b: f64, alpha: &[f64], diag: f64) -> f64 {
    let wsq: f64 = w.iter().map(|v| v * v).sum::<f64>() + b * b;
    let asum: f64 = alpha.iter().sum();
    let asq: f64 = alpha.iter().map(|a| a * a).sum();
    0.5 * wsq - asum + 0.5 * diag * asq
}

/// Dual objective of an arbitrary `alpha`, recomputing `w` from scratch.
pub fn dual_objective(
    vectors: &[SparseBooleanVector],
    labels: &[i8],
    alpha: &[f64],
    config: &TrainConfig,
) -> f64 {
    let dim = vectors.first().map(|v| v.dimension()).unwrap_or(0);
    let mut w = vec![0.0; dim];
    let mut b = 0.0;
    for ((x, &y), &a) in vectors.iter().zip(labels).zip(alpha) {
        let s = a * f64::from(y);
        for &j in x.indices() {
            w[j] += s;
        }
        b += s;
    }
    dual_objective_from_primal(&w, b, alpha, config.diagonal())
}

/// Class layout of a [`LinearModel`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// One-vs-rest over Against, Favor and None.
    Ternary,
    /// Against vs Favor; None examples are dropped before training.
    Binary,
}

impl Mode {
    pub fn classes(self) -> &'static [StanceLabel] {
        match self {
            Mode::Ternary => &StanceLabel::ALL,
            Mode::Binary => &[StanceLabel::Against, StanceLabel::Favor],
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Ternary => "ternary",
            Mode::Binary => "binary",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ternary" | "three" | "3" => Ok(Mode::Ternary),
            "binary" | "two" | "2" => Ok(Mode::Binary),
            other => Err(Error::InvalidConfig(alloc::format!("unknown mode '{other}'"))),
        }
    }
}

/// A trained stance classifier together with the feature space it expects.
///
/// Ternary models hold one weight vector per class. Binary models hold a
/// single vector `w` whose margin `s` scores Favor as `s` and Against as `-s`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    topic: String,
    mode: Mode,
    weights: Vec<Vec<f64>>,
    biases: Vec<f64>,
    space: FeatureSpace,
    config: TrainConfig,
}

impl LinearModel {
    /// Assembles a model from stored parts, checking shapes and finiteness.
    pub fn from_parts(
        topic: String,
        mode: Mode,
        weights: Vec<Vec<f64>>,
        biases: Vec<f64>,
        space: FeatureSpace,
        config: TrainConfig,
    ) -> Result<Self> {
        let expected = match mode {
            Mode::Ternary => 3,
            Mode::Binary => 1,
        };
        if weights.len() != expected || biases.len() != expected {
            return Err(Error::LengthMismatch { left: weights.len(), right: expected });
        }
        for w in &weights {
            if w.len() != space.len() {
                return Err(Error::DimensionMismatch { expected: space.len(), found: w.len() });
            }
        }
        if weights.iter().flatten().chain(&biases).any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig("non-finite weight".to_string()));
        }
        Ok(LinearModel { topic, mode, weights, biases, space, config })
    }

    pub fn topic(&self) -> &str {
        &self.topic
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn classes(&self) -> &'static [StanceLabel] {
        self.mode.classes()
    }

    pub fn space(&self) -> &FeatureSpace {
        &self.space
    }

    pub fn config(&self) -> &TrainConfig {
        &self.config
    }

    /// Raw stored weight vectors: three (A, F, N) for ternary, one (the Favor
    /// margin) for binary.
    pub fn raw_weights(&self) -> &[Vec<f64>] {
        &self.weights
    }

    pub fn raw_biases(&self) -> &[f64] {
        &self.biases
    }

    /// Score per class, aligned with [`classes`](Self::classes).
    pub fn decision_values(&self, x: &SparseBooleanVector) -> Result<Vec<f64>> {
        if x.dimension() != self.space.len() {
            return Err(Error::DimensionMismatch { expected: self.space.len(), found: x.dimension() });
        }
        Ok(match self.mode {
            Mode::Ternary => self
                .weights
                .iter()
                .zip(&self.biases)
                .map(|(w, b)| x.dot(w) + b)
                .collect(),
            Mode::Binary => {
                let s = x.dot(&self.weights[0]) + self.biases[0];
                vec![-s, s]
            }
        })
    }

    /// Argmax class; ties go to the class earliest in canonical order.
    pub fn predict(&self, x: &SparseBooleanVector) -> Result<StanceLabel> {
        let scores = self.decision_values(x)?;
        Ok(self.classes()[argmax_first(&scores)])
    }

    /// Weight vector and bias oriented toward `class`.
    pub fn class_vector(&self, class: StanceLabel) -> Result<(Vec<f64>, f64)> {
        match (self.mode, class) {
            (Mode::Ternary, c) => Ok((self.weights[c.index()].clone(), self.biases[c.index()])),
            (Mode::Binary, StanceLabel::Favor) => Ok((self.weights[0].clone(), self.biases[0])),
            (Mode::Binary, StanceLabel::Against) => {
                Ok((self.weights[0].iter().map(|w| -w).collect(), -self.biases[0]))
            }
            (Mode::Binary, StanceLabel::None) => Err(Error::UnknownClass(class)),
        }
    }

    /// Feature string to weight, oriented toward `class`.
    pub fn class_weights(&self, class: StanceLabel) -> Result<BTreeMap<String, f64>> {
        let (w, _) = self.class_vector(class)?;
        Ok(self.space.names().iter().cloned().zip(w).collect())
    }
}

fn argmax_first(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, s) in scores.iter().enumerate().skip(1) {
        if *s > scores[best] {
            best = i;
        }
    }
    best
}

/// Trains a stance model on vectors drawn from `space`.
///
/// In ternary mode each class is fitted against the rest. In binary mode
/// None-labeled examples are removed and a single Favor(+1) vs Against(-1)
/// separator is fitted.
pub fn train_ovr(
    vectors: &[SparseBooleanVector],
    labels: &[StanceLabel],
    mode: Mode,
    config: &TrainConfig,
    space: &FeatureSpace,
    topic: &str,
) -> Result<LinearModel> {
    config.validate()?;
    if vectors.len() != labels.len() {
        return Err(Error::LengthMismatch { left: vectors.len(), right: labels.len() });
    }
    for v in vectors {
        if v.dimension() != space.len() {
            return Err(Error::DimensionMismatch { expected: space.len(), found: v.dimension() });
        }
    }
    for &class in mode.classes() {
        if !labels.contains(&class) {
            return Err(Error::MissingClass { class, topic: topic.to_string() });
        }
    }
    let (weights, biases) = match mode {
        Mode::Ternary => {
            let mut ws = Vec::with_capacity(3);
            let mut bs = Vec::with_capacity(3);
            for &class in mode.classes() {
                let ys: Vec<i8> = labels.iter().map(|&l| if l == class { 1 } else { -1 }).collect();
                let fit = train_binary(vectors, &ys, config)?;
                ws.push(fit.weights);
                bs.push(fit.bias);
            }
            (ws, bs)
        }
        Mode::Binary => {
            let mut xs = Vec::new();
            let mut ys = Vec::new();
            for (v, &l) in vectors.iter().zip(labels) {
                match l {
                    StanceLabel::Favor => ys.push(1),
                    StanceLabel::Against => ys.push(-1),
                    StanceLabel::None => continue,
                }
                xs.push(v.clone());
            }
            let fit = train_binary(&xs, &ys, config)?;
            (vec![fit.weights], vec![fit.bias])
        }
    };
    LinearModel::from_parts(topic.to_string(), mode, weights, biases, space.clone(), *config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::{Family, FeatureSetSelector};
    use alloc::collections::BTreeSet;

    fn space(n: usize) -> FeatureSpace {
        let names = (0..n).map(|i| alloc::format!("f{i:03}")).collect();
        FeatureSpace::from_names(names, FeatureSetSelector::single(Family::Txt)).unwrap()
    }

    fn v(idx: &[usize], dim: usize) -> SparseBooleanVector {
        SparseBooleanVector::new(idx.to_vec(), dim).unwrap()
    }

    #[test]
    fn separable_pair() {
        let xs = [v(&[0], 2), v(&[1], 2)];
        let fit = train_binary(&xs, &[1, -1], &TrainConfig::default()).unwrap();
        assert!(fit.converged);
        assert!(fit.decision(&xs[0]) > 0.0);
        assert!(fit.decision(&xs[1]) < 0.0);
    }

    #[test]
    fn rejects_degenerate_and_mismatched() {
        let xs = [v(&[0], 2), v(&[1], 2)];
        let cfg = TrainConfig::default();
        assert_eq!(train_binary(&xs, &[1, 1], &cfg), Err(Error::DegenerateTrainingSet));
        assert_eq!(train_binary(&xs, &[1, 0], &cfg), Err(Error::InvalidLabel(0)));
        let ys = [v(&[0], 2), v(&[1], 3)];
        assert!(matches!(
            train_binary(&ys, &[1, -1], &cfg),
            Err(Error::DimensionMismatch { .. })
        ));
        let bad = TrainConfig { c: 0.0, ..cfg };
        assert!(matches!(train_binary(&xs, &[1, -1], &bad), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn dual_feasibility_and_kkt() {
        let xs = [v(&[0, 1], 3), v(&[1], 3), v(&[2], 3), v(&[0, 2], 3), v(&[1, 2], 3)];
        let ys = [1, 1, -1, -1, 1];
        for loss in [Loss::Hinge, Loss::SquaredHinge] {
            let cfg = TrainConfig { c: 0.7, tol: 1e-8, loss, ..TrainConfig::default() };
            let fit = train_binary(&xs, &ys, &cfg).unwrap();
            assert!(fit.converged);
            for (i, a) in fit.alpha.iter().enumerate() {
                assert!(*a >= 0.0);
                if loss == Loss::Hinge {
                    assert!(*a <= cfg.c);
                }
                if *a == 0.0 {
                    // kappa = 1: at a_i = 0 the projected gradient is min(G, 0).
                    assert!(f64::from(ys[i]) * fit.decision(&xs[i]) >= 1.0 - cfg.tol);
                }
            }
            let recomputed = dual_objective(&xs, &ys, &fit.alpha, &cfg);
            assert!((recomputed - fit.objective).abs() < 1e-9);
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let xs: Vec<_> = (0..12).map(|i| v(&[i % 4, 4 + i % 3], 7)).collect();
        let ys: Vec<i8> = (0..12).map(|i| if i % 3 == 0 { 1 } else { -1 }).collect();
        let cfg = TrainConfig { seed: 7, ..TrainConfig::default() };
        let a = train_binary(&xs, &ys, &cfg).unwrap();
        let b = train_binary(&xs, &ys, &cfg).unwrap();
        assert_eq!(
            a.weights.iter().map(|w| w.to_bits()).collect::<Vec<_>>(),
            b.weights.iter().map(|w| w.to_bits()).collect::<Vec<_>>()
        );
        assert_eq!(a.bias.to_bits(), b.bias.to_bits());
    }

    #[test]
    fn max_iter_caps_epochs() {
        let xs: Vec<_> = (0..12).map(|i| v(&[i % 4, 4 + i % 3], 7)).collect();
        let ys: Vec<i8> = (0..12).map(|i| if i % 2 == 0 { 1 } else { -1 }).collect();
        let cfg = TrainConfig { max_iter: 1, tol: 1e-12, ..TrainConfig::default() };
        let fit = train_binary(&xs, &ys, &cfg).unwrap();
        assert_eq!(fit.epochs, 1);
        assert!(!fit.converged);
    }

    #[test]
    fn ternary_shape() {
        let sp = space(3);
        let xs = [v(&[0], 3), v(&[1], 3), v(&[2], 3)];
        let labels = [StanceLabel::Against, StanceLabel::Favor, StanceLabel::None];
        let m = train_ovr(&xs, &labels, Mode::Ternary, &TrainConfig::default(), &sp, "T").unwrap();
        assert_eq!(m.classes(), &StanceLabel::ALL);
        assert_eq!(m.raw_weights().len(), 3);
        for (x, l) in xs.iter().zip(labels) {
            assert_eq!(m.predict(x).unwrap(), l);
        }
    }

    #[test]
    fn binary_drops_none() {
        let sp = space(3);
        let xs = [v(&[0], 3), v(&[1], 3), v(&[2], 3), v(&[0, 2], 3)];
        let labels = [StanceLabel::Against, StanceLabel::Favor, StanceLabel::None, StanceLabel::Against];
        let m = train_ovr(&xs, &labels, Mode::Binary, &TrainConfig::default(), &sp, "T").unwrap();
        assert_eq!(m.mode(), Mode::Binary);
        assert_eq!(m.classes(), &[StanceLabel::Against, StanceLabel::Favor]);
        let kept = [xs[0].clone(), xs[1].clone(), xs[3].clone()];
        let direct = train_binary(&kept, &[-1, 1, -1], &TrainConfig::default()).unwrap();
        assert_eq!(m.raw_weights()[0], direct.weights);
        assert_eq!(m.raw_biases()[0], direct.bias);
        let only_none = train_ovr(
            &xs[2..3],
            &[StanceLabel::None],
            Mode::Binary,
            &TrainConfig::default(),
            &sp,
            "T",
        );
        assert!(only_none.is_err());
    }

    #[test]
    fn binary_all_favor_is_error() {
        let sp = space(2);
        let xs = [v(&[0], 2), v(&[1], 2)];
        let err = train_ovr(
            &xs,
            &[StanceLabel::Favor, StanceLabel::Favor],
            Mode::Binary,
            &TrainConfig::default(),
            &sp,
            "Climate",
        )
        .unwrap_err();
        assert_eq!(
            err,
            Error::MissingClass { class: StanceLabel::Against, topic: "Climate".into() }
        );
    }

    #[test]
    fn decision_value_examples() {
        let sp = space(2);
        let cfg = TrainConfig::default();
        let zero = LinearModel::from_parts("T".into(), Mode::Ternary, vec![vec![0.0; 2]; 3], vec![0.0; 3], sp.clone(), cfg).unwrap();
        assert_eq!(zero.decision_values(&SparseBooleanVector::zeros(2)).unwrap(), vec![0.0; 3]);
        assert_eq!(zero.predict(&SparseBooleanVector::zeros(2)).unwrap(), StanceLabel::Against);

        let m = LinearModel::from_parts(
            "T".into(),
            Mode::Ternary,
            vec![vec![2.0, 0.0], vec![0.0, 0.0], vec![0.0, 0.0]],
            vec![0.0; 3],
            sp.clone(),
            cfg,
        )
        .unwrap();
        assert_eq!(m.decision_values(&v(&[0], 2)).unwrap()[0], 2.0);
        assert!(matches!(
            m.decision_values(&SparseBooleanVector::zeros(3)),
            Err(Error::DimensionMismatch { .. })
        ));

        let b = LinearModel::from_parts("T".into(), Mode::Binary, vec![vec![0.0, 0.0]], vec![-1.5], sp, cfg).unwrap();
        assert_eq!(b.decision_values(&SparseBooleanVector::zeros(2)).unwrap(), vec![1.5, -1.5]);
        assert_eq!(b.predict(&SparseBooleanVector::zeros(2)).unwrap(), StanceLabel::Against);
    }

    #[test]
    fn argmax_examples() {
        assert_eq!(argmax_first(&[0.2, 0.9, 0.1]), 1);
        assert_eq!(argmax_first(&[0.5, 0.5, 0.5]), 0);
        assert_eq!(argmax_first(&[0.1, 0.5, 0.5]), 1);
    }

    #[test]
    fn class_weight_examples() {
        let sel = FeatureSetSelector::single(Family::Txt);
        let names: BTreeSet<String> = ["a", "b"].iter().map(|s| s.to_string()).collect();
        let sp = FeatureSpace::build(&[names], sel, 1).unwrap();
        let cfg = TrainConfig::default();
        let m = LinearModel::from_parts("T".into(), Mode::Binary, vec![vec![0.5, -0.9]], vec![0.0], sp, cfg).unwrap();
        let fav = m.class_weights(StanceLabel::Favor).unwrap();
        assert_eq!(fav["a"], 0.5);
        assert_eq!(fav["b"], -0.9);
        let ag = m.class_weights(StanceLabel::Against).unwrap();
        for (k, w) in &fav {
            assert_eq!(ag[k], -w);
        }
        assert_eq!(m.class_weights(StanceLabel::None), Err(Error::UnknownClass(StanceLabel::None)));
    }

    #[test]
    fn from_parts_rejects_bad_shapes() {
        let sp = space(2);
        let cfg = TrainConfig::default();
        assert!(LinearModel::from_parts("T".into(), Mode::Binary, vec![vec![0.0; 2]; 3], vec![0.0; 3], sp.clone(), cfg).is_err());
        assert!(LinearModel::from_parts("T".into(), Mode::Binary, vec![vec![0.0; 3]], vec![0.0], sp.clone(), cfg).is_err());
        assert!(LinearModel::from_parts("T".into(), Mode::Binary, vec![vec![f64::NAN, 0.0]], vec![0.0], sp, cfg).is_err());
    }

    #[test]
    fn mode_and_loss_parse() {
        assert_eq!("Binary".parse::<Mode>().unwrap(), Mode::Binary);
        assert_eq!("ternary".parse::<Mode>().unwrap(), Mode::Ternary);
        assert!("quaternary".parse::<Mode>().is_err());
        assert_eq!("squared_hinge".parse::<Loss>().unwrap(), Loss::SquaredHinge);
        assert_eq!(Loss::Hinge.to_string().parse::<Loss>().unwrap(), Loss::Hinge);
    }
}
