use crate::error::{Error, Result};

/// Isotropic linear elasticity (plane strain in 2D).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearMaterial {
    pub young: f64,
    pub poisson: f64,
}

/// Compressible Neo-Hookean solid with the same elastic constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeoHookeanMaterial {
    pub young: f64,
    pub poisson: f64,
}

fn check(young: f64, poisson: f64) -> Result<()> {
    if !(young > 0.0) || !(0.0..0.5).contains(&poisson) {
        return Err(Error::InvalidArgument(format!("material E={young}, nu={poisson}")));
    }
    Ok(())
}

/// `(mu, lambda)`.
fn lame(young: f64, poisson: f64) -> (f64, f64) {
    let mu = young / (2.0 * (1.0 + poisson));
    let lambda = young * poisson / ((1.0 + poisson) * (1.0 - 2.0 * poisson));
    (mu, lambda)
}

impl LinearMaterial {
    pub fn new(young: f64, poisson: f64) -> Result<Self> {
        check(young, poisson)?;
        Ok(LinearMaterial { young, poisson })
    }

    pub fn lame(&self) -> (f64, f64) {
        lame(self.young, self.poisson)
    }
}

impl NeoHookeanMaterial {
    pub fn new(young: f64, poisson: f64) -> Result<Self> {
        check(young, poisson)?;
        Ok(NeoHookeanMaterial { young, poisson })
    }

    pub fn lame(&self) -> (f64, f64) {
        lame(self.young, self.poisson)
    }

    pub fn linearized(&self) -> LinearMaterial {
        LinearMaterial { young: self.young, poisson: self.poisson }
    }

    /// `W(F) = mu/2 (tr F^T F - d) - mu ln J + lambda/2 (ln J)^2`.
    pub fn energy_density(&self, d: usize, f: &[[f64; 3]; 3]) -> Result<f64> {
        let (mu, lambda) = self.lame();
        let j = crate::small::det(d, f);
        if !(j > 0.0) {
            return Err(Error::ElementInversion(j));
        }
        let mut i1 = 0.0;
        for row in f.iter().take(d) {
            for v in row.iter().take(d) {
                i1 += v * v;
            }
        }
        let lnj = j.ln();
        Ok(0.5 * mu * (i1 - d as f64) - mu * lnj + 0.5 * lambda * lnj * lnj)
    }
}
