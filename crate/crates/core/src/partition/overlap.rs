use statrs::function::gamma::ln_gamma;

use super::Partition;
use crate::assignment::max_weight_assignment;
use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;

/// `α_rs = (k/n) |σ⁻¹(r) ∩ τ⁻¹(s)|`.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapMatrix(pub SquareMatrix);

impl std::ops::Deref for OverlapMatrix {
    type Target = SquareMatrix;

    fn deref(&self) -> &SquareMatrix {
        &self.0
    }
}

fn check_compatible(sigma: &Partition, tau: &Partition) -> Result<()> {
    if sigma.n() != tau.n() || sigma.k() != tau.k() {
        return Err(Error::Dimension(format!(
            "partitions (n={}, k={}) and (n={}, k={})",
            sigma.n(),
            sigma.k(),
            tau.n(),
            tau.k()
        )));
    }
    Ok(())
}

/// Raw intersection counts `|σ⁻¹(r) ∩ τ⁻¹(s)|`, row-major.
pub fn overlap_counts(sigma: &Partition, tau: &Partition) -> Result<Vec<i64>> {
    check_compatible(sigma, tau)?;
    let k = sigma.k();
    let mut counts = vec![0i64; k * k];
    for (&r, &s) in sigma.labels().iter().zip(tau.labels()) {
        counts[r * k + s] += 1;
    }
    Ok(counts)
}

pub fn overlap_matrix(sigma: &Partition, tau: &Partition) -> Result<OverlapMatrix> {
    let counts = overlap_counts(sigma, tau)?;
    let k = sigma.k();
    let scale = k as f64 / sigma.n().max(1) as f64;
    Ok(OverlapMatrix(SquareMatrix::from_fn(k, |r, s| scale * counts[r * k + s] as f64)))
}

/// Fraction of vertices labeled correctly, maximized over relabelings.
///
/// Solved exactly as an integer assignment problem on the intersection
/// counts, so the result is `max_count / n` with no rounding in the search.
pub fn overlap(sigma: &Partition, tau: &Partition) -> Result<f64> {
    check_compatible(sigma, tau)?;
    if !sigma.is_balanced() || !tau.is_balanced() {
        return Err(Error::Precondition("overlap needs two balanced partitions".into()));
    }
    let k = sigma.k();
    let counts = overlap_counts(sigma, tau)?;
    let perm = max_weight_assignment(&counts, k);
    let matched: i64 = perm.iter().enumerate().map(|(r, &s)| counts[r * k + s]).sum();
    Ok(matched as f64 / sigma.n() as f64)
}

pub fn frobenius_sq(alpha: &SquareMatrix) -> f64 {
    alpha.frobenius_sq()
}

/// Probability `(1 + (|α|² - 1) λ) / k` that a planted-model edge is
/// within-group with respect to a partition with overlap matrix `α`.
pub fn within_prob(alpha: &SquareMatrix, lambda: f64, k: usize) -> Result<f64> {
    if alpha.dim() != k {
        return Err(Error::Dimension(format!("{}x{} matrix for k = {k}", alpha.dim(), alpha.dim())));
    }
    if !alpha.is_doubly_stochastic(1e-9) {
        return Err(Error::domain("overlap matrix is not doubly stochastic"));
    }
    Ok((1.0 + (alpha.frobenius_sq() - 1.0) * lambda) / k as f64)
}

/// Natural log of the number of balanced `τ` whose overlap matrix with a
/// fixed balanced `σ` equals `α`: `Σ_r [ln (n/k)! - Σ_s ln (α_rs n/k)!]`.
pub fn count_with_overlap(alpha: &SquareMatrix, n: usize, k: usize) -> Result<f64> {
    if alpha.dim() != k {
        return Err(Error::Dimension(format!("{}x{} matrix for k = {k}", alpha.dim(), alpha.dim())));
    }
    if n % k != 0 {
        return Err(Error::Divisibility { n, k });
    }
    if !alpha.is_doubly_stochastic(1e-9) {
        return Err(Error::domain("overlap matrix is not doubly stochastic"));
    }
    let group = (n / k) as f64;
    let mut log_count = 0.0;
    for row in alpha.rows() {
        log_count += ln_gamma(group + 1.0);
        for &a in row {
            let cell = a * group;
            let rounded = cell.round();
            if (cell - rounded).abs() > 1e-9 || rounded < 0.0 {
                return Err(Error::domain(format!("cell count {cell} is not a nonnegative integer")));
            }
            log_count -= ln_gamma(rounded + 1.0);
        }
    }
    Ok(log_count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RandomStream;

    fn part(k: usize, labels: &[usize]) -> Partition {
        Partition::new(k, labels.to_vec()).unwrap()
    }

    #[test]
    fn overlap_matrix_examples() {
        let sigma = part(2, &[0, 0, 1, 1]);
        assert_eq!(overlap_matrix(&sigma, &sigma).unwrap().0, SquareMatrix::identity(2));
        let swapped = overlap_matrix(&sigma, &part(2, &[1, 1, 0, 0])).unwrap();
        assert_eq!(swapped.to_rows(), vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
        let mixed = overlap_matrix(&sigma, &part(2, &[0, 1, 0, 1])).unwrap();
        assert_eq!(mixed.to_rows(), vec![vec![0.5, 0.5], vec![0.5, 0.5]]);
        assert!(matches!(overlap_matrix(&sigma, &part(2, &[0, 1])), Err(Error::Dimension(_))));
    }

    #[test]
    fn overlap_examples() {
        let sigma = part(3, &[0, 1, 2, 0, 1, 2]);
        assert_eq!(overlap(&sigma, &sigma).unwrap(), 1.0);
        let permuted = sigma.relabel(&[2, 0, 1]).unwrap();
        assert_eq!(overlap(&sigma, &permuted).unwrap(), 1.0);
        assert_eq!(overlap(&part(2, &[0, 0, 1, 1]), &part(2, &[0, 1, 0, 1])).unwrap(), 0.5);
        assert!(matches!(
            overlap(&part(2, &[0, 0, 0, 1]), &part(2, &[0, 0, 1, 1])),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn overlap_is_symmetric_and_label_invariant() {
        let mut rng = RandomStream::from_seed(17).rng();
        for _ in 0..300 {
            let a = Partition::random_balanced(12, 3, &mut rng).unwrap();
            let b = Partition::random_balanced(12, 3, &mut rng).unwrap();
            let beta = overlap(&a, &b).unwrap();
            assert_eq!(beta, overlap(&b, &a).unwrap());
            assert_eq!(beta, overlap(&a.relabel(&[1, 2, 0]).unwrap(), &b).unwrap());
            assert_eq!(beta, overlap(&a, &b.relabel(&[2, 1, 0]).unwrap()).unwrap());
            assert!(beta >= 1.0 / 3.0 && beta <= 1.0);
        }
    }

    #[test]
    fn frobenius_examples() {
        assert!((frobenius_sq(&SquareMatrix::flat(5)) - 1.0).abs() < 1e-15);
        assert_eq!(frobenius_sq(&SquareMatrix::identity(5)), 5.0);
        assert_eq!(frobenius_sq(&SquareMatrix::from_rows(&[vec![0.5, 0.5], vec![0.5, 0.5]])), 1.0);
    }

    #[test]
    fn within_prob_examples() {
        for k in 2..6 {
            let flat = within_prob(&SquareMatrix::flat(k), 0.7, k).unwrap();
            assert!((flat - 1.0 / k as f64).abs() < 1e-15);
            let id = within_prob(&SquareMatrix::identity(k), 0.7, k).unwrap();
            assert!((id - (1.0 + (k as f64 - 1.0) * 0.7) / k as f64).abs() < 1e-15);
        }
        // ρ = 1.5 at k = 2: rows (a, 1-a) with 2(a² + (1-a)²) = 1.5
        let a = (2.0 + 2f64.sqrt()) / 4.0;
        let alpha = SquareMatrix::from_rows(&[vec![a, 1.0 - a], vec![1.0 - a, a]]);
        assert!((alpha.frobenius_sq() - 1.5).abs() < 1e-12);
        assert!((within_prob(&alpha, 0.5, 2).unwrap() - 0.625).abs() < 1e-12);
        let bad = SquareMatrix::from_rows(&[vec![1.0, 1.0], vec![0.0, 0.0]]);
        assert!(matches!(within_prob(&bad, 0.5, 2), Err(Error::Domain(_))));
    }

    #[test]
    fn count_examples() {
        assert!(count_with_overlap(&SquareMatrix::identity(3), 9, 3).unwrap().abs() < 1e-12);
        let half = SquareMatrix::from_rows(&[vec![0.5, 0.5], vec![0.5, 0.5]]);
        assert!((count_with_overlap(&half, 4, 2).unwrap() - 4f64.ln()).abs() < 1e-12);
        assert!(matches!(count_with_overlap(&half, 6, 2), Err(Error::Domain(_))));
    }
}
