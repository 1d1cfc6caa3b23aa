use crate::error::{Error, Result};

/// First derivative by central differences at `step` and `step / 2`,
/// combined as `(4 D(h/2) − D(h)) / 3`.
pub fn central_derivative<F: Fn(f64) -> f64>(f: F, x: f64, step: f64) -> Result<f64> {
    if !(step > 0.0) {
        return Err(Error::InvalidInput(format!("step must be positive (got {step})")));
    }
    let eval = |t: f64| {
        let y = f(t);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(Error::NonFiniteEvaluation { x: t })
        }
    };
    let diff = |h: f64| -> Result<f64> { Ok((eval(x + h)? - eval(x - h)?) / (2.0 * h)) };
    let coarse = diff(step)?;
    let fine = diff(0.5 * step)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_derivatives() {
        let h = 1e-3;
        assert!((central_derivative(f64::exp, 0.0, h).unwrap() - 1.0).abs() <= 10.0 * h * h);
        assert!((central_derivative(|x| x * x * x, 2.0, h).unwrap() - 12.0).abs() <= 10.0 * h * h);
        let h = 1e-2;
        assert!((central_derivative(f64::sin, 0.0, h).unwrap() - 1.0).abs() <= 10.0 * h.powi(4));
    }

    #[test]
    fn non_finite_is_an_error() {
        let r = central_derivative(|x: f64| if x > 0.0 { f64::INFINITY } else { 0.0 }, 0.0, 1e-3);
        assert!(matches!(r, Err(Error::NonFiniteEvaluation { .. })));
        assert!(central_derivative(f64::exp, 0.0, 0.0).is_err());
    }
}
