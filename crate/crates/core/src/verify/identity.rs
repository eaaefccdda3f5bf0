use crate::nth::root_sum;
use crate::spectra::roots_of_unity;
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct IdentityReport {
    pub n_max: usize,
    pub cases: usize,
    /// `max |sum - (nu - (n-1)/2)|` over all `n, k, nu`.
    pub max_deviation: f64,
}

/// Brute-force check of `sum_{j != k} R_j^{nu+1} R_k^{-nu} / (R_k - R_j) = nu - (n-1)/2`
/// for every `n <= n_max`, every root `k` and `nu = 0..n-1`.
pub fn identity_suite(n_max: usize) -> Result<IdentityReport> {
    if n_max < 2 {
        return Err(Error::InvalidSpec(format!(
            "n_max = {n_max} must be at least 2"
        )));
    }
    let (mut cases, mut worst) = (0, 0.0f64);
    for n in 2..=n_max {
        let roots = roots_of_unity(n)?;
        for k in 0..n {
            for nu in 0..n {
                let want = nu as f64 - (n as f64 - 1.0) / 2.0;
                worst = worst.max((root_sum(&roots, k, nu) - want).norm());
                cases += 1;
            }
        }
    }
    Ok(IdentityReport {
        n_max,
        cases,
        max_deviation: worst,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cases() {
        let r = roots_of_unity(2).unwrap();
        assert!((root_sum(&r, 0, 0) + 0.5).norm() < 1e-15);
        assert!((root_sum(&r, 0, 1) - 0.5).norm() < 1e-15);
        let rep = identity_suite(8).unwrap();
        assert_eq!(rep.cases, (2..=8).map(|n| n * n).sum::<usize>());
        assert!(rep.max_deviation < 1e-12);
        assert!(identity_suite(1).is_err());
    }
}
