//! Conjugate laws used by the samplers, parameterised as they appear in the
//! full conditionals.

use rand::Rng;
use rand_distr::{Beta, Distribution, Gamma, StandardNormal};
use serde::Serialize;

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormalLaw {
    pub mean: f64,
    pub var: f64,
}

impl NormalLaw {
    pub fn new(mean: f64, var: f64) -> Result<Self> {
        if !(var > 0.0 && var.is_finite()) || !mean.is_finite() {
            return Err(invalid(format!("invalid normal law N({mean}, {var})")));
        }
        Ok(Self { mean, var })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let z: f64 = rng.sample(StandardNormal);
        self.mean + self.var.sqrt() * z
    }
}

/// `IG(shape, scale)` with density proportional to `x^(-shape-1) exp(-scale/x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InverseGamma {
    pub shape: f64,
    pub scale: f64,
}

impl InverseGamma {
    pub fn new(shape: f64, scale: f64) -> Result<Self> {
        if !(shape > 0.0 && scale > 0.0 && shape.is_finite() && scale.is_finite()) {
            return Err(invalid(format!(
                "invalid inverse-gamma IG({shape}, {scale})"
            )));
        }
        Ok(Self { shape, scale })
    }

    /// Finite only for `shape > 1`.
    pub fn mean(&self) -> f64 {
        if self.shape > 1.0 {
            self.scale / (self.shape - 1.0)
        } else {
            f64::INFINITY
        }
    }

    pub fn mode(&self) -> f64 {
        self.scale / (self.shape + 1.0)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        // 1/X with X ~ Gamma(shape, rate = scale)
        let g = Gamma::new(self.shape, 1.0 / self.scale).expect("validated parameters");
        loop {
            let x = 1.0 / g.sample(rng);
            if x.is_finite() && x > 0.0 {
                return x;
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BetaLaw {
    pub alpha: f64,
    pub beta: f64,
}

impl BetaLaw {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && beta > 0.0 && alpha.is_finite() && beta.is_finite()) {
            return Err(invalid(format!("invalid beta law Beta({alpha}, {beta})")));
        }
        Ok(Self { alpha, beta })
    }

    pub fn mean(&self) -> f64 {
        self.alpha / (self.alpha + self.beta)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        Beta::new(self.alpha, self.beta)
            .expect("validated parameters")
            .sample(rng)
            .clamp(0.0, 1.0)
    }
}
