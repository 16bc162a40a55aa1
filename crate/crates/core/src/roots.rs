//! Polynomial roots: exact zero factoring, closed-form linears, and companion
//! matrix eigenvalues (complex Schur) polished by Newton steps.

use nalgebra::{DMatrix, Schur};

use crate::scalar::{C64, ZERO};
use crate::{Error, Result};

const NEWTON_STEPS: usize = 8;

fn horner(coeffs: &[C64], z: C64) -> (C64, C64) {
    let mut p = ZERO;
    let mut dp = ZERO;
    for c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// All roots of `Σ aₖzᵏ`, with multiplicity. Trailing zero coefficients are
/// ignored; roots at the origin are factored out exactly.
pub fn roots(coeffs: &[C64]) -> Result<Vec<C64>> {
    let deg = coeffs.iter().rposition(|c| *c != ZERO);
    let Some(deg) = deg else {
        return Err(Error::InvalidSymbol("zero polynomial has no isolated roots".into()));
    };
    let low = coeffs.iter().position(|c| *c != ZERO).unwrap();
    let mut out = vec![ZERO; low];
    let reduced = &coeffs[low..=deg];
    match reduced.len() {
        1 => {}
        2 => out.push(-reduced[0] / reduced[1]),
        n => {
            let d = n - 1;
            let lead = reduced[d];
            let mut m = DMatrix::<C64>::zeros(d, d);
            for j in 0..d {
                m[(0, j)] = -reduced[d - 1 - j] / lead;
            }
            for i in 1..d {
                m[(i, i - 1)] = C64::new(1.0, 0.0);
            }
            let eig = Schur::new(m)
                .eigenvalues()
                .ok_or_else(|| Error::InvalidSymbol("companion eigenvalue iteration failed".into()))?;
            for mut z in eig.iter().copied() {
                for _ in 0..NEWTON_STEPS {
                    let (p, dp) = horner(reduced, z);
                    if p == ZERO || dp == ZERO {
                        break;
                    }
                    let next = z - p / dp;
                    if !(next.re.is_finite() && next.im.is_finite()) {
                        break;
                    }
                    // keep the polish only while it improves the residual
                    if horner(reduced, next).0.norm() > p.norm() {
                        break;
                    }
                    z = next;
                }
                out.push(z);
            }
        }
    }
    Ok(out)
}

/// Residual `|a(z)|` scaled by `Σ|aₖ||z|ᵏ`.
pub fn relative_residual(coeffs: &[C64], z: C64) -> f64 {
    let scale: f64 = coeffs.iter().enumerate().map(|(k, c)| c.norm() * z.norm().powi(k as i32)).sum();
    if scale == 0.0 {
        return 0.0;
    }
    horner(coeffs, z).0.norm() / scale
}
