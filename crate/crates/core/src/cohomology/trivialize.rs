use num_traits::Zero;

use crate::error::{Error, Result};
use crate::poly::Var;
use crate::rat::Rat;

use super::cocycle::{coboundary_value, CochainMap, TwoCocycle};

/// `φ` with `c = dφ` on every pair `i + j ≤ n`, read off from `c(L₀, L_i)` at
/// `λ = 0`: `φ_i = (αp)⁻¹ c(0,i)(∂, 0)`.
pub fn trivialize(c: &TwoCocycle, n: usize) -> Result<CochainMap> {
    let module = c.module();
    if module.is_trivial() {
        return Err(Error::InvalidModule("trivial coefficients have nonzero cohomology".into()));
    }
    let p = module.params().rational_p("trivialize")?;
    let alpha = module
        .alpha()
        .rational()
        .filter(|a| !a.is_zero())
        .ok_or_else(|| Error::InvalidModule("trivialize needs a rational α ≠ 0".into()))?;
    let inv = Rat::from_integer(1.into()) / (alpha * p);
    let phi = CochainMap::new((0..=n).map(|i| (i, c.value(0, i).eval(Var::Lambda, &Rat::zero()).scale(&inv))));
    for i in 0..=n {
        for j in i..=n - i {
            let r = &c.value(i, j) - &coboundary_value(&phi, module, i, j);
            if !r.is_zero() {
                return Err(Error::NotACocycle(format!("c − dφ at ({i},{j}) is {r}")));
            }
        }
    }
    Ok(phi)
}
