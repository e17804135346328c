//! Small dense symmetric matrices and a cyclic Jacobi eigen-solver.

use crate::scalar::Real;

/// Row-major dense square matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SquareMatrix<T> {
    dim: usize,
    data: Vec<T>,
}

impl<T: Real> SquareMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![T::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut m = Self::zeros(dim);
        for r in 0..dim {
            for c in 0..dim {
                m[(r, c)] = f(r, c);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn trace(&self) -> T {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.dim).map(|i| self[(i, i)]).collect()
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|&x| x * x).sum::<T>().sqrt()
    }

    fn off_diagonal_norm(&self) -> T {
        let mut s = T::zero();
        for r in 0..self.dim {
            for c in 0..self.dim {
                if r != c {
                    s = s + self[(r, c)] * self[(r, c)];
                }
            }
        }
        s.sqrt()
    }

    /// Largest `|a_rc - a_cr|`.
    pub fn asymmetry(&self) -> T {
        let mut worst = T::zero();
        for r in 0..self.dim {
            for c in r + 1..self.dim {
                worst = worst.max((self[(r, c)] - self[(c, r)]).abs());
            }
        }
        worst
    }

    pub fn column(&self, c: usize) -> Vec<T> {
        (0..self.dim).map(|r| self[(r, c)]).collect()
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|r| (0..self.dim).map(|c| self[(r, c)] * v[c]).sum())
            .collect()
    }

    /// `uᵀ · self · v`.
    pub fn bilinear(&self, u: &[T], v: &[T]) -> T {
        u.iter().zip(self.mul_vec(v)).map(|(&a, b)| a * b).sum()
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        Self::from_fn(self.dim, |r, c| {
            (0..self.dim).map(|k| self[(r, k)] * other[(k, c)]).sum()
        })
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self[(c, r)])
    }
}

impl<T> std::ops::Index<(usize, usize)> for SquareMatrix<T> {
    type Output = T;
    fn index(&self, (r, c): (usize, usize)) -> &T {
        &self.data[r * self.dim + c]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for SquareMatrix<T> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut T {
        &mut self.data[r * self.dim + c]
    }
}

/// Eigenvalues and orthonormal eigenvectors (columns of `vectors`), in the
/// order the solver left them; callers sort as needed.
#[derive(Clone, Debug)]
pub struct Eigen<T> {
    pub values: Vec<T>,
    /// `values[k] - A[k][k]`, accumulated directly so that small shifts of
    /// large diagonal entries keep their relative precision.
    pub shifts: Vec<T>,
    pub vectors: SquareMatrix<T>,
    pub sweeps: usize,
}

const MAX_SWEEPS: usize = 64;

/// Cyclic Jacobi diagonalization of a symmetric matrix.
///
/// Sweeps until the off-diagonal Frobenius norm drops below
/// `max(1e-13, 8ε)·‖A‖_F`. Only the upper triangle is read.
pub fn symmetric_eigen<T: Real>(matrix: &SquareMatrix<T>) -> Eigen<T> {
    let n = matrix.dim();
    let mut a = SquareMatrix::from_fn(n, |r, c| if r <= c { matrix[(r, c)] } else { matrix[(c, r)] });
    let mut v = SquareMatrix::identity(n);
    let base = a.diagonal();
    let mut shifts = vec![T::zero(); n];

    let rel = T::lit(1e-13).max(T::epsilon() * T::lit(8.0));
    let threshold = rel * a.frobenius_norm();
    let mut sweeps = 0;

    while sweeps < MAX_SWEEPS && a.off_diagonal_norm() > threshold {
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == T::zero() {
                    continue;
                }
                let gap = (base[q] - base[p]) + (shifts[q] - shifts[p]);
                let theta = gap / (T::lit(2.0) * apq);
                let t = if theta.abs() > T::lit(1e150) {
                    T::one() / (T::lit(2.0) * theta)
                } else {
                    theta.signum() / (theta.abs() + (T::one() + theta * theta).sqrt())
                };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = t * c;
                shifts[p] = shifts[p] - t * apq;
                shifts[q] = shifts[q] + t * apq;
                rotate(&mut a, &mut v, p, q, c, s);
            }
        }
    }

    Eigen {
        values: base.iter().zip(&shifts).map(|(&b, &d)| b + d).collect(),
        shifts,
        vectors: v,
        sweeps,
    }
}

fn rotate<T: Real>(
    a: &mut SquareMatrix<T>,
    v: &mut SquareMatrix<T>,
    p: usize,
    q: usize,
    c: T,
    s: T,
) {
    let n = a.dim();
    a[(p, q)] = T::zero();
    a[(q, p)] = T::zero();
    for k in 0..n {
        if k != p && k != q {
            let akp = a[(k, p)];
            let akq = a[(k, q)];
            let new_kp = c * akp - s * akq;
            let new_kq = s * akp + c * akq;
            a[(k, p)] = new_kp;
            a[(p, k)] = new_kp;
            a[(k, q)] = new_kq;
            a[(q, k)] = new_kq;
        }
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = c * vkp - s * vkq;
        v[(k, q)] = s * vkp + c * vkq;
    }
}
