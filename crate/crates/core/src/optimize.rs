//! Projected gradient descent with momentum on a product of unit spheres,
//! minimizing smooth surrogates of the largest pairwise cosine.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sphere_map::{gram_of_rows, random_unit_rows, Codebook, Scheme};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LossKind {
    /// Log-sum-exp over all off-diagonal cosines.
    Lse,
    /// Mean over prototypes of the largest cosine to any other prototype.
    Avg,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub loss: LossKind,
    pub epochs: usize,
    pub learning_rate: f64,
    pub momentum: f64,
    pub t_start: f64,
    /// `None` means `t_end = K`.
    pub t_end: Option<f64>,
    pub seed: u64,
    /// Project each gradient onto the tangent space of its sphere before the
    /// momentum update.
    pub tangent_gradient: bool,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            loss: LossKind::Lse,
            epochs: 1000,
            learning_rate: 0.1,
            momentum: 0.9,
            t_start: 1.0,
            t_end: None,
            seed: 0,
            tangent_gradient: false,
        }
    }
}

impl OptimizerConfig {
    pub fn with_loss(loss: LossKind) -> Self {
        OptimizerConfig {
            loss,
            ..Default::default()
        }
    }

    fn validate(&self, classes: usize) -> Result<()> {
        let t_end = self.t_end.unwrap_or(classes as f64);
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(Error::InvalidParameter(format!(
                "momentum must lie in [0, 1), got {}",
                self.momentum
            )));
        }
        if self.epochs == 0 {
            return Err(Error::InvalidParameter("epochs must be >= 1".into()));
        }
        if !(self.t_start > 0.0 && t_end > 0.0 && self.t_start.is_finite() && t_end.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "temperatures must be positive, got {} -> {t_end}",
                self.t_start
            )));
        }
        Ok(())
    }

    /// Temperature at `epoch`, linear from `t_start` to `t_end` inclusive.
    pub fn temperature(&self, epoch: usize, classes: usize) -> f64 {
        let t_end = self.t_end.unwrap_or(classes as f64);
        if self.epochs <= 1 {
            return self.t_start;
        }
        let frac = epoch as f64 / (self.epochs - 1) as f64;
        self.t_start + (t_end - self.t_start) * frac
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub loss: f64,
    /// Largest off-diagonal Gram entry of the iterate the loss was evaluated on.
    pub max_cosine: f64,
    /// `None` for the AVG loss, which has no temperature.
    pub temperature: Option<f64>,
    pub best_max_cosine: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerTrace {
    pub epochs: Vec<EpochRecord>,
    /// Max cosine of the iterate left after the last step.
    pub final_max_cosine: f64,
    /// Number of steps taken before the returned iterate (`epochs` means the
    /// final iterate).
    pub best_epoch: usize,
    pub best_max_cosine: f64,
}

/// Loss value and gradient with respect to the raw rows.
#[derive(Clone, Debug, PartialEq)]
pub struct LossEval {
    pub value: f64,
    pub gradient: Vec<f64>,
    pub max_cosine: f64,
}

fn check_shape(rows: &[f64], classes: usize, dim: usize) {
    assert!(classes >= 2 && dim >= 1, "need K >= 2 and n >= 1");
    assert_eq!(rows.len(), classes * dim, "rows must be K x n");
}

fn max_offdiag(gram: &[f64], classes: usize) -> f64 {
    let mut m = f64::NEG_INFINITY;
    for i in 0..classes {
        for j in i + 1..classes {
            m = m.max(gram[i * classes + j]);
        }
    }
    m
}

fn axpy(out: &mut [f64], a: f64, x: &[f64]) {
    for (o, v) in out.iter_mut().zip(x) {
        *o += a * v;
    }
}

/// `(1/K) sum_i max_{j != i} <c_i, c_j>` with the subgradient of the lowest
/// maximizing index.
pub fn loss_avg(rows: &[f64], classes: usize, dim: usize) -> LossEval {
    check_shape(rows, classes, dim);
    let gram = gram_of_rows(rows, classes, dim);
    let kf = classes as f64;
    let mut value = 0.0;
    let mut gradient = vec![0.0; rows.len()];
    for i in 0..classes {
        let mut arg = usize::MAX;
        let mut best = f64::NEG_INFINITY;
        for j in (0..classes).filter(|&j| j != i) {
            if gram[i * classes + j] > best {
                best = gram[i * classes + j];
                arg = j;
            }
        }
        value += best;
        let (ri, rj) = (i * dim, arg * dim);
        let cj = rows[rj..rj + dim].to_vec();
        axpy(&mut gradient[ri..ri + dim], 1.0 / kf, &cj);
        let ci = rows[ri..ri + dim].to_vec();
        axpy(&mut gradient[rj..rj + dim], 1.0 / kf, &ci);
    }
    LossEval {
        value: value / kf,
        gradient,
        max_cosine: max_offdiag(&gram, classes),
    }
}

/// `(1/t) log sum_{i != j} exp(t <c_i, c_j>)`, evaluated as twice the sum over
/// `i < j` with the largest term factored out.
pub fn loss_lse(rows: &[f64], classes: usize, dim: usize, temperature: f64) -> LossEval {
    check_shape(rows, classes, dim);
    assert!(temperature > 0.0, "temperature must be positive");
    let gram = gram_of_rows(rows, classes, dim);
    let max = max_offdiag(&gram, classes);
    let mut weights = vec![0.0; classes * classes];
    let mut total = 0.0;
    for i in 0..classes {
        for j in i + 1..classes {
            let e = (temperature * (gram[i * classes + j] - max)).exp();
            weights[i * classes + j] = e;
            total += e;
        }
    }
    let value = max + (2.0 * total).ln() / temperature;
    let mut gradient = vec![0.0; rows.len()];
    for i in 0..classes {
        for j in i + 1..classes {
            let w = weights[i * classes + j] / total;
            let (ri, rj) = (i * dim, j * dim);
            for p in 0..dim {
                let (a, b) = (rows[ri + p], rows[rj + p]);
                gradient[ri + p] += w * b;
                gradient[rj + p] += w * a;
            }
        }
    }
    LossEval {
        value,
        gradient,
        max_cosine: max,
    }
}

/// Divides each row by its Euclidean norm.
pub fn project_rows_to_sphere(rows: &mut [f64], dim: usize) -> Result<()> {
    assert!(dim >= 1 && rows.len().is_multiple_of(dim), "rows must be K x n");
    for (i, row) in rows.chunks_exact_mut(dim).enumerate() {
        let norm = row.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::DegeneratePrototype { row: i });
        }
        row.iter_mut().for_each(|x| *x /= norm);
    }
    Ok(())
}

fn evaluate(rows: &[f64], classes: usize, dim: usize, cfg: &OptimizerConfig, t: f64) -> LossEval {
    match cfg.loss {
        LossKind::Lse => loss_lse(rows, classes, dim, t),
        LossKind::Avg => loss_avg(rows, classes, dim),
    }
}

/// Minimizes the configured loss from a seeded uniform initialization and
/// returns the iterate with the smallest max cosine seen.
pub fn optimize_prototypes(
    classes: usize,
    dim: usize,
    cfg: &OptimizerConfig,
) -> Result<(Codebook, OptimizerTrace)> {
    if classes < 2 || dim == 0 {
        return Err(Error::InvalidParameter(format!(
            "need K >= 2 and n >= 1, got K={classes}, n={dim}"
        )));
    }
    cfg.validate(classes)?;
    let mut rows = random_unit_rows(classes, dim, cfg.seed)?;
    let mut velocity = vec![0.0; rows.len()];
    let mut best_rows = rows.clone();
    let mut best_max = f64::INFINITY;
    let mut best_epoch = 0;
    let mut records = Vec::with_capacity(cfg.epochs);

    for epoch in 0..cfg.epochs {
        let t = cfg.temperature(epoch, classes);
        let LossEval {
            value,
            mut gradient,
            max_cosine,
        } = evaluate(&rows, classes, dim, cfg, t);
        if !value.is_finite() || gradient.iter().any(|g| !g.is_finite()) {
            return Err(Error::NonFiniteLoss { epoch });
        }
        if max_cosine < best_max {
            best_max = max_cosine;
            best_rows.copy_from_slice(&rows);
            best_epoch = epoch;
        }
        records.push(EpochRecord {
            epoch,
            loss: value,
            max_cosine,
            temperature: (cfg.loss == LossKind::Lse).then_some(t),
            best_max_cosine: best_max,
        });

        if cfg.tangent_gradient {
            for (g, c) in gradient.chunks_exact_mut(dim).zip(rows.chunks_exact(dim)) {
                let radial: f64 = g.iter().zip(c).map(|(a, b)| a * b).sum();
                axpy(g, -radial, c);
            }
        }
        for ((v, g), x) in velocity.iter_mut().zip(&gradient).zip(rows.iter_mut()) {
            *v = cfg.momentum * *v + g;
            *x -= cfg.learning_rate * *v;
        }
        project_rows_to_sphere(&mut rows, dim)?;
    }

    let final_max = max_offdiag(&gram_of_rows(&rows, classes, dim), classes);
    if !final_max.is_finite() {
        return Err(Error::NonFiniteLoss { epoch: cfg.epochs });
    }
    if final_max < best_max {
        best_max = final_max;
        best_rows.copy_from_slice(&rows);
        best_epoch = cfg.epochs;
    }
    let scheme = match cfg.loss {
        LossKind::Lse => Scheme::OptimizedLse,
        LossKind::Avg => Scheme::OptimizedAvg,
    };
    let codebook = Codebook::new(classes, dim, best_rows, scheme)?;
    Ok((
        codebook,
        OptimizerTrace {
            epochs: records,
            final_max_cosine: final_max,
            best_epoch,
            best_max_cosine: best_max,
        },
    ))
}
