use crate::error::{Error, Result};
use crate::stats::median_sorted;

/// Centered running median with replicate padding at both edges.
pub fn median_filter(x: &[f64], window: usize) -> Result<Vec<f64>> {
    if window < 3 || window % 2 == 0 {
        return Err(Error::EvenWindow(window));
    }
    let n = x.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let half = window / 2;
    let mut buf = Vec::with_capacity(window);
    let out = (0..n)
        .map(|i| {
            buf.clear();
            buf.extend((0..window).map(|j| {
                let idx = (i + j).saturating_sub(half).min(n - 1);
                x[idx]
            }));
            buf.sort_by(f64::total_cmp);
            median_sorted(&buf)
        })
        .collect();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn removes_isolated_spike() {
        assert_eq!(median_filter(&[1.0, 5.0, 1.0, 1.0, 1.0], 3).unwrap(), vec![1.0; 5]);
    }

    #[test]
    fn monotone_and_constant_unchanged() {
        let ramp: Vec<f64> = (0..20).map(|i| (i * i) as f64).collect();
        assert_eq!(median_filter(&ramp, 5).unwrap(), ramp);
        assert_eq!(median_filter(&[2.0; 7], 5).unwrap(), vec![2.0; 7]);
    }

    #[test]
    fn replicate_padding_at_edges() {
        // window 5 at index 0 sees [9, 9, 9, 0, 0]
        assert_eq!(median_filter(&[9.0, 0.0, 0.0, 0.0], 5).unwrap()[0], 9.0);
    }

    #[test]
    fn rejects_even_or_tiny_window() {
        assert!(matches!(median_filter(&[1.0; 5], 4), Err(Error::EvenWindow(4))));
        assert!(matches!(median_filter(&[1.0; 5], 1), Err(Error::EvenWindow(1))));
    }
}
