//! Small dense-vector helpers. Everything here works on plain `&[f64]`.

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn scaled(a: &[f64], c: f64) -> Vec<f64> {
    a.iter().map(|x| c * x).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// `a + c * b`.
pub fn axpy(a: &[f64], c: f64, b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + c * y).collect()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Compensated (Kahan-Neumaier) sum; keeps long quadrature reductions
/// deterministic and accurate in one sequential pass.
pub fn kahan_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut c = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            c += (sum - t) + v;
        } else {
            c += (v - t) + sum;
        }
        sum = t;
    }
    sum + c
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_ops() {
        let a = [1.0, 2.0];
        let b = [3.0, -1.0];
        assert_eq!(dot(&a, &b), 1.0);
        assert_eq!(norm2(&[3.0, 4.0]), 5.0);
        assert_eq!(axpy(&a, 2.0, &b), vec![7.0, 0.0]);
        assert_eq!(sub(&a, &b), vec![-2.0, 3.0]);
    }

    #[test]
    fn kahan_beats_naive_on_adversarial_sum() {
        let vals = vec![1e16, 1.0, -1e16, 1.0];
        assert_eq!(kahan_sum(vals.into_iter()), 2.0);
    }
}
