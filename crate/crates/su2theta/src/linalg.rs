//! Dense real symmetric matrices and a cyclic Jacobi eigensolver.
//!
//! Basis dimensions stay below a few hundred, so dense storage and the
//! plain Jacobi iteration are exact enough and simpler than anything
//! iterative. Eigenvectors follow a fixed sign convention to keep fidelity
//! comparisons reproducible.

use crate::Error;

/// Row-major square matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DMat {
    n: usize,
    a: Vec<f64>,
}

impl DMat {
    pub fn zeros(n: usize) -> DMat {
        DMat { n, a: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> DMat {
        let mut m = DMat::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[&[f64]]) -> DMat {
        let n = rows.len();
        let mut m = DMat::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n);
            m.a[i * n..(i + 1) * n].copy_from_slice(row);
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.a[i * self.n..(i + 1) * self.n]
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        (0..self.n)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// xᵀ A x.
    pub fn quad_form(&self, x: &[f64]) -> f64 {
        self.matvec(x).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        for i in 0..self.n {
            for j in 0..i {
                if (self[(i, j)] - self[(j, i)]).abs() > tol {
                    return false;
                }
            }
        }
        true
    }

    pub fn frob_norm(&self) -> f64 {
        self.a.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Scaled addition `self += c · other`.
    pub fn add_scaled(&mut self, c: f64, other: &DMat) {
        assert_eq!(self.n, other.n);
        for (a, b) in self.a.iter_mut().zip(&other.a) {
            *a += c * b;
        }
    }

    pub fn scale(&mut self, c: f64) {
        for a in &mut self.a {
            *a *= c;
        }
    }

    /// Matrix product `self · other`.
    pub fn matmul(&self, other: &DMat) -> DMat {
        assert_eq!(self.n, other.n);
        let mut out = DMat::zeros(self.n);
        for i in 0..self.n {
            for k in 0..self.n {
                let aik = self[(i, k)];
                if aik == 0.0 {
                    continue;
                }
                for j in 0..self.n {
                    out.a[i * self.n + j] += aik * other.a[k * self.n + j];
                }
            }
        }
        out
    }
}

impl std::ops::Index<(usize, usize)> for DMat {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.a[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.a[i * self.n + j]
    }
}

/// Eigendecomposition of a real symmetric matrix, energies ascending.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub energies: Vec<f64>,
    /// Eigenvectors as rows, matching `energies` order.
    vectors: Vec<Vec<f64>>,
}

impl Spectrum {
    pub fn ground_energy(&self) -> f64 {
        self.energies[0]
    }

    /// Gap E1 − E0, clamped at zero against solver noise.
    pub fn gap(&self) -> f64 {
        (self.energies[1] - self.energies[0]).max(0.0)
    }

    pub fn vector(&self, k: usize) -> &[f64] {
        &self.vectors[k]
    }

    pub fn ground_state(&self) -> (f64, &[f64]) {
        (self.energies[0], &self.vectors[0])
    }
}

/// Cyclic Jacobi diagonalization.
///
/// Sweeps rotate away off-diagonal entries until their square sum falls
/// below machine precision relative to ‖A‖. The residual ‖Av − λv‖ stays
/// within 1e−10·‖A‖ for every pair. Each eigenvector's largest-magnitude
/// component is made positive.
pub fn eigh(m: &DMat) -> Result<Spectrum, Error> {
    if !m.is_symmetric(1e-12) {
        return Err(Error::NotSymmetric);
    }
    let n = m.n;
    let mut a = m.clone();
    let mut v = DMat::identity(n);
    let norm = a.frob_norm().max(f64::MIN_POSITIVE);

    for _sweep in 0..64 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)] * a[(i, j)])
            .sum();
        if off.sqrt() <= 1e-15 * norm {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].partial_cmp(&a[(j, j)]).unwrap());

    let energies: Vec<f64> = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors: Vec<Vec<f64>> = order
        .iter()
        .map(|&col| {
            let mut vec: Vec<f64> = (0..n).map(|row| v[(row, col)]).collect();
            let lead = vec
                .iter()
                .enumerate()
                .max_by(|(_, a), (_, b)| a.abs().partial_cmp(&b.abs()).unwrap())
                .map(|(i, _)| i)
                .unwrap_or(0);
            if vec[lead] < 0.0 {
                for x in &mut vec {
                    *x = -*x;
                }
            }
            vec
        })
        .collect();

    Ok(Spectrum { energies, vectors })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn two_by_two_exchange() {
        let m = DMat::from_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let s = eigh(&m).unwrap();
        assert_abs_diff_eq!(s.energies[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.energies[1], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn identity_is_degenerate() {
        let s = eigh(&DMat::identity(5)).unwrap();
        for e in &s.energies {
            assert_abs_diff_eq!(*e, 1.0, epsilon = 1e-14);
        }
        assert_eq!(s.gap(), 0.0);
    }

    #[test]
    fn rejects_non_symmetric() {
        let m = DMat::from_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(eigh(&m).is_err());
    }

    #[test]
    fn residuals_and_orthonormality_on_random_matrix() {
        // Deterministic pseudo-random symmetric matrix.
        let n = 40;
        let mut m = DMat::zeros(n);
        let mut x = 0.5f64;
        for i in 0..n {
            for j in 0..=i {
                x = (x * 997.0 + 0.1234).fract();
                m[(i, j)] = x - 0.5;
                m[(j, i)] = x - 0.5;
            }
        }
        let s = eigh(&m).unwrap();
        let norm = m.frob_norm();
        for k in 0..n {
            let v = s.vector(k);
            let hv = m.matvec(v);
            let res: f64 = hv
                .iter()
                .zip(v)
                .map(|(hv, v)| (hv - s.energies[k] * v).powi(2))
                .sum::<f64>()
                .sqrt();
            assert!(res <= 1e-10 * norm, "residual {res} too large");
            let nrm: f64 = v.iter().map(|x| x * x).sum::<f64>();
            assert_abs_diff_eq!(nrm, 1.0, epsilon = 1e-12);
        }
        for k in 1..n {
            assert!(s.energies[k] >= s.energies[k - 1]);
        }
    }

    #[test]
    fn sign_convention_fixes_leading_component() {
        let m = DMat::from_rows(&[&[2.0, 0.0], &[0.0, 1.0]]);
        let s = eigh(&m).unwrap();
        assert!(s.vector(0)[1] > 0.0);
        assert!(s.vector(1)[0] > 0.0);
    }
}
