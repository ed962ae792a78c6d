//! Thin singular value decompositions on nalgebra matrices, computed by faer.

use faer::{Mat, MatRef};
use nalgebra::{ComplexField, DMatrix};

use crate::error::{KitaevError, Result};
use crate::C64;

/// `m = U diag(s) V†` with `s` non-increasing; `U` is `r × k`, `V` is `c × k`
/// for `k = min(r, c)`.
pub(crate) struct Svd<T: ComplexField> {
    pub u: DMatrix<T>,
    pub s: Vec<f64>,
    pub v: DMatrix<T>,
}

fn to_nalgebra<T: ComplexField + Copy>(m: MatRef<'_, T>) -> DMatrix<T> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |r, c| m[(r, c)])
}

fn check(s: &[f64]) -> Result<()> {
    if s.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(KitaevError::Numerical("non-finite singular value".into()))
    }
}

pub(crate) fn svd_real(m: &DMatrix<f64>) -> Result<Svd<f64>> {
    let fm = Mat::<f64>::from_fn(m.nrows(), m.ncols(), |r, c| m[(r, c)]);
    let svd = fm
        .thin_svd()
        .map_err(|e| KitaevError::Numerical(format!("SVD did not converge: {e:?}")))?;
    let s: Vec<f64> = svd.S().column_vector().iter().copied().collect();
    check(&s)?;
    Ok(Svd { u: to_nalgebra(svd.U()), s, v: to_nalgebra(svd.V()) })
}

pub(crate) fn svd_complex(m: &DMatrix<C64>) -> Result<Svd<C64>> {
    let fm = Mat::<C64>::from_fn(m.nrows(), m.ncols(), |r, c| m[(r, c)]);
    let svd = fm
        .thin_svd()
        .map_err(|e| KitaevError::Numerical(format!("SVD did not converge: {e:?}")))?;
    let s: Vec<f64> = svd.S().column_vector().iter().map(|z| z.re).collect();
    check(&s)?;
    Ok(Svd { u: to_nalgebra(svd.U()), s, v: to_nalgebra(svd.V()) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reconstructs_real_and_complex_inputs() {
        let m = DMatrix::from_fn(5, 3, |r, c| ((r * 7 + c * 3) % 5) as f64 - 2.0);
        let d = svd_real(&m).unwrap();
        assert_eq!(d.u.shape(), (5, 3));
        assert_eq!(d.v.shape(), (3, 3));
        let rec = &d.u * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(d.s.clone())) * d.v.transpose();
        assert!((rec - &m).amax() < 1e-13);
        assert!(d.s.windows(2).all(|p| p[0] >= p[1]));

        let z = DMatrix::from_fn(3, 4, |r, c| C64::new(r as f64 - c as f64, (r * c) as f64 * 0.5));
        let d = svd_complex(&z).unwrap();
        let sd = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(3, d.s.iter().map(|&x| C64::new(x, 0.0))));
        let rec = &d.u * sd * d.v.adjoint();
        assert!((rec - &z).iter().map(|x| x.norm()).fold(0.0, f64::max) < 1e-13);
    }
}
