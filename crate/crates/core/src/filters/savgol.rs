use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Least-squares projector for a window: row `j` maps window samples to the
/// coefficient of `t^j`, with `t` measured from the window center.
fn projector(window: usize, polyorder: usize) -> Result<DMatrix<f64>> {
    let half = (window / 2) as f64;
    let design = DMatrix::from_fn(window, polyorder + 1, |i, j| (i as f64 - half).powi(j as i32));
    design
        .svd(true, true)
        .pseudo_inverse(1e-12)
        .map_err(|e| Error::InvalidParameter(format!("Savitzky-Golay design: {e}")))
}

fn eval_poly(coeffs: &[f64], t: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c)
}

/// Savitzky-Golay smoothing. Interior samples use the centered convolution
/// kernel; the first and last `window / 2` samples are evaluated on the
/// polynomial fitted to the first or last full window, so any polynomial of
/// degree <= `polyorder` passes through unchanged.
pub fn savitzky_golay(x: &[f64], window: usize, polyorder: usize) -> Result<Vec<f64>> {
    if window % 2 == 0 || window < polyorder + 2 {
        return Err(Error::InvalidWindowOrder { window, polyorder });
    }
    let n = x.len();
    if n < window {
        return Err(Error::SeriesTooShort { needed: window, got: n });
    }
    let proj = projector(window, polyorder)?;
    let half = window / 2;
    let kernel: Vec<f64> = proj.row(0).iter().copied().collect();
    let mut out = vec![0.0; n];
    for i in half..n - half {
        out[i] = kernel
            .iter()
            .zip(&x[i - half..=i + half])
            .map(|(k, v)| k * v)
            .sum();
    }
    let fit = |start: usize| -> Vec<f64> {
        (0..=polyorder)
            .map(|j| {
                proj.row(j)
                    .iter()
                    .zip(&x[start..start + window])
                    .map(|(k, v)| k * v)
                    .sum()
            })
            .collect()
    };
    let head = fit(0);
    for (i, v) in out.iter_mut().enumerate().take(half) {
        *v = eval_poly(&head, i as f64 - half as f64);
    }
    let tail = fit(n - window);
    for i in n - half..n {
        out[i] = eval_poly(&tail, (i - (n - window)) as f64 - half as f64);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_polynomials() {
        for (deg, coeffs) in [(2, vec![0.3, -1.2, 0.8]), (3, vec![1.0, 0.5, -2.0, 1.5])] {
            let x: Vec<f64> = (0..60)
                .map(|i| eval_poly(&coeffs, i as f64 / 50.0))
                .collect();
            let y = savitzky_golay(&x, 11, 3).unwrap();
            for (a, b) in x.iter().zip(&y) {
                assert!((a - b).abs() < 1e-9, "degree {deg}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn kernel_matches_tabulated_values() {
        // classic 5-point quadratic smoother: (-3, 12, 17, 12, -3) / 35
        let p = projector(5, 2).unwrap();
        let expected = [-3.0, 12.0, 17.0, 12.0, -3.0].map(|v| v / 35.0);
        for (a, b) in p.row(0).iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn validates_arguments() {
        assert!(matches!(
            savitzky_golay(&[0.0; 20], 10, 3),
            Err(Error::InvalidWindowOrder { .. })
        ));
        assert!(matches!(
            savitzky_golay(&[0.0; 20], 3, 3),
            Err(Error::InvalidWindowOrder { .. })
        ));
        assert!(matches!(
            savitzky_golay(&[0.0; 5], 11, 3),
            Err(Error::SeriesTooShort { .. })
        ));
    }
}
