use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Dense complex Hermitian matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix<T> {
    dim: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> HermitianMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex::new(T::zero(), T::zero()); dim * dim],
        }
    }

    /// Fills the upper triangle (`i <= j`) from `entry` and mirrors it.
    /// Imaginary parts returned for diagonal positions are dropped.
    pub fn from_upper(dim: usize, mut entry: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in i..dim {
                let v = entry(i, j);
                if i == j {
                    m.data[i * dim + i] = Complex::new(v.re, T::zero());
                } else {
                    m.data[i * dim + j] = v;
                    m.data[j * dim + i] = v.conj();
                }
            }
        }
        m
    }

    /// Checks exact Hermiticity of a row-major buffer.
    pub fn from_dense(dim: usize, data: Vec<Complex<T>>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::InvalidArgument("matrix buffer has wrong length".into()));
        }
        for i in 0..dim {
            for j in i..dim {
                if data[i * dim + j] != data[j * dim + i].conj() {
                    return Err(Error::InvalidArgument(format!(
                        "entry ({i}, {j}) breaks Hermitian symmetry"
                    )));
                }
            }
        }
        Ok(Self { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.data[i * self.dim + j]
    }

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn trace(&self) -> T {
        (0..self.dim).fold(T::zero(), |acc, i| acc + self.data[i * self.dim + i].re)
    }

    /// `Tr H^2 = ‖H‖_F^2`.
    pub fn frobenius_sq(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr())
    }
}
