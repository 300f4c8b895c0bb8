//! Gauss–Hermite rules for the standard normal measure.

use crate::charpoly::eigenvalues_bisection;
use crate::error::{Error, Result};
use crate::lattice::TridiagonalSymmetric;
use crate::scalar::Real;

/// One-dimensional Gauss rule for `N(0, 1)`: `E f(Z) ≈ Σ w_k f(x_k)`.
/// Exact for polynomials of degree `< 2 · nodes_per_dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureGrid<T> {
    pub nodes_per_dim: usize,
    pub nodes: Vec<(T, T)>,
}

impl<T: Real> QuadratureGrid<T> {
    /// Golub–Welsch: nodes are the eigenvalues of the Jacobi matrix of the
    /// monic Hermite polynomials (off-diagonal `sqrt(k)`), weights the
    /// reciprocal Christoffel sums of the orthonormal polynomials.
    pub fn gauss_hermite(nodes_per_dim: usize) -> Result<Self> {
        if nodes_per_dim == 0 {
            return Err(Error::InvalidArgument("quadrature needs at least one node".into()));
        }
        let jacobi = TridiagonalSymmetric::new(
            vec![T::zero(); nodes_per_dim],
            (1..nodes_per_dim).map(|k| T::from_count(k).sqrt()).collect(),
        )?;
        let xs = eigenvalues_bisection(&jacobi);
        let nodes = xs
            .into_iter()
            .map(|x| {
                let mut prev = T::zero();
                let mut cur = T::one();
                let mut christoffel = T::one();
                for k in 0..nodes_per_dim - 1 {
                    let kf = T::from_count(k);
                    let next = (x * cur - kf.sqrt() * prev) / (kf + T::one()).sqrt();
                    prev = cur;
                    cur = next;
                    christoffel = christoffel + cur * cur;
                }
                (x, T::one() / christoffel)
            })
            .collect();
        Ok(Self {
            nodes_per_dim,
            nodes,
        })
    }

    pub fn total_weight(&self) -> T {
        self.nodes.iter().fold(T::zero(), |acc, &(_, w)| acc + w)
    }

    /// `E f(Z)` for `Z ~ N(0, 1)`.
    pub fn expect(&self, mut f: impl FnMut(T) -> T) -> T {
        self.nodes.iter().fold(T::zero(), |acc, &(x, w)| acc + w * f(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_normalised_and_positive() {
        for n in [1usize, 2, 5, 20, 40, 48] {
            let g = QuadratureGrid::<f64>::gauss_hermite(n).unwrap();
            assert!((g.total_weight() - 1.0).abs() < 1e-12, "n={n}");
            assert!(g.nodes.iter().all(|&(_, w)| w > 0.0));
        }
    }

    #[test]
    fn gaussian_moments_exact() {
        let g = QuadratureGrid::<f64>::gauss_hermite(10).unwrap();
        // E Z^{2k} = (2k-1)!!
        let mut dfact = 1.0;
        for k in 0..10 {
            if k > 0 {
                dfact *= (2 * k - 1) as f64;
            }
            let m = g.expect(|x| x.powi(2 * k as i32));
            assert!((m - dfact).abs() < 1e-11 * dfact, "k={k}: {m}");
            let odd = g.expect(|x| x.powi(2 * k as i32 + 1));
            assert!(odd.abs() < 1e-9 * dfact.max(1.0));
        }
    }

    #[test]
    fn characteristic_function() {
        // E cos(tZ) = exp(-t²/2)
        let g = QuadratureGrid::<f64>::gauss_hermite(40).unwrap();
        for &t in &[0.5, 1.7, 3.0] {
            let v = g.expect(|x| (t * x).cos());
            assert!((v - (-t * t / 2.0f64).exp()).abs() < 1e-13);
        }
    }

    #[test]
    fn zero_nodes_rejected() {
        assert!(QuadratureGrid::<f64>::gauss_hermite(0).is_err());
    }
}
