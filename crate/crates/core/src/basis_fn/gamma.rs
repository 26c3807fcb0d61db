use crate::error::{Error, Result};
use crate::scalar::Real;

/// Gamma function for positive real arguments.
pub fn gamma_real<T: Real>(x: &T) -> Result<T> {
    if !(*x > T::zero()) {
        return Err(Error::NonpositiveArgument(x.to_f64()));
    }
    Ok(x.gamma())
}
