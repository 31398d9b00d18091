use num_complex::Complex64;

pub type C64 = Complex64;

/// Dense square complex matrix stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |r, c| {
            if r == c {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                data.push(f(r, c));
            }
        }
        Self { dim, data }
    }

    /// Builds from row-major entries. Panics if the length is not a square.
    pub fn from_row_major(dim: usize, data: Vec<C64>) -> Self {
        assert_eq!(data.len(), dim * dim, "entry count must be dim^2");
        Self { dim, data }
    }

    /// |a><b|
    pub fn outer(a: &[C64], b: &[C64]) -> Self {
        assert_eq!(a.len(), b.len());
        Self::from_fn(a.len(), |r, c| a[r] * b[c].conj())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.data[r * self.dim + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: C64) {
        self.data[r * self.dim + c] = value;
    }

    #[inline]
    pub fn add_at(&mut self, r: usize, c: usize, value: C64) {
        self.data[r * self.dim + c] += value;
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self.get(c, r).conj())
    }

    pub fn mul(&self, other: &CMatrix) -> Self {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        Self::from_fn(n, |r, c| (0..n).map(|k| self.get(r, k) * other.get(k, c)).sum())
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|r| (0..self.dim).map(|c| self.get(r, c) * v[c]).sum())
            .collect()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn add_scaled(&mut self, other: &CMatrix, s: f64) {
        assert_eq!(self.dim, other.dim);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b * s;
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|k| self.get(k, k)).sum()
    }

    /// <v|M|v>
    pub fn expectation(&self, v: &[C64]) -> C64 {
        let mv = self.apply(v);
        v.iter().zip(&mv).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn unitarity_defect(&self) -> f64 {
        self.mul(&self.adjoint()).max_abs_diff(&Self::identity(self.dim))
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let n = self.dim;
        let m = nalgebra::DMatrix::from_fn(n, n, |r, c| (self.get(r, c) + self.get(c, r).conj()) * 0.5);
        let mut eig: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        eig.sort_by(|a, b| a.total_cmp(b));
        eig
    }
}

pub(crate) fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub(crate) fn kron(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(x * y);
        }
    }
    out
}

/// e^{i theta}
#[inline]
pub(crate) fn cis(theta: f64) -> C64 {
    C64::from_polar(1.0, theta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_unitary_and_hermitian() {
        let id = CMatrix::identity(3);
        assert!(id.unitarity_defect() < 1e-15);
        assert!(id.hermiticity_defect() < 1e-15);
        assert_eq!(id.trace(), C64::new(3.0, 0.0));
    }

    #[test]
    fn eigenvalues_of_projector() {
        let v = [C64::new(0.6, 0.0), C64::new(0.0, 0.8), C64::new(0.0, 0.0)];
        let p = CMatrix::outer(&v, &v);
        let eig = p.hermitian_eigenvalues();
        assert!(eig[0].abs() < 1e-12 && eig[1].abs() < 1e-12);
        assert!((eig[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn kron_orders_first_factor_slowest() {
        let a = [C64::new(1.0, 0.0), C64::new(2.0, 0.0)];
        let b = [C64::new(3.0, 0.0), C64::new(5.0, 0.0)];
        let k = kron(&a, &b);
        assert_eq!(k.iter().map(|z| z.re).collect::<Vec<_>>(), vec![3.0, 5.0, 6.0, 10.0]);
    }
}
