//! Sample statistics over per-path values.

/// Pairwise summation.
pub fn sum(xs: &[f64]) -> f64 {
    if xs.len() <= 16 {
        return xs.iter().sum();
    }
    let (a, b) = xs.split_at(xs.len() / 2);
    sum(a) + sum(b)
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    sum(xs) / xs.len() as f64
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    let sq: Vec<f64> = xs.iter().map(|x| (x - m) * (x - m)).collect();
    sum(&sq) / (xs.len() - 1) as f64
}

/// Standard error of the mean.
pub fn se_mean(xs: &[f64]) -> f64 {
    (variance(xs) / xs.len() as f64).sqrt()
}

/// Standard error of the sample variance, from the fourth central moment.
pub fn se_variance(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    let c2: Vec<f64> = xs.iter().map(|x| (x - m).powi(2)).collect();
    let c4: Vec<f64> = c2.iter().map(|v| v * v).collect();
    let m2 = sum(&c2) / n;
    let m4 = sum(&c4) / n;
    ((m4 - m2 * m2).max(0.0) / n).sqrt()
}

/// Averages of consecutive antithetic pairs.
pub fn pair_means(xs: &[f64]) -> Vec<f64> {
    xs.chunks(2).map(|c| c.iter().sum::<f64>() / c.len() as f64).collect()
}

pub fn rms(xs: &[f64]) -> f64 {
    let sq: Vec<f64> = xs.iter().map(|x| x * x).collect();
    mean(&sq).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moments() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(mean(&xs), 2.5);
        assert!((variance(&xs) - 5.0 / 3.0).abs() < 1e-15);
        assert!((se_mean(&xs) - (5.0 / 12.0f64).sqrt()).abs() < 1e-15);
        // central moments 1.25 and 2.5625 for the population
        assert!((se_variance(&xs) - ((2.5625 - 1.5625) / 4.0f64).sqrt()).abs() < 1e-15);
        assert_eq!(pair_means(&xs), vec![1.5, 3.5]);
        assert!((rms(&[3.0, -4.0]) - 12.5f64.sqrt()).abs() < 1e-15);
        let long: Vec<f64> = (0..1000).map(|i| i as f64).collect();
        assert_eq!(sum(&long), 499_500.0);
    }
}
