//! Characteristic roots, sectors of the rho-plane and eigen-decompositions.

use std::f64::consts::PI;

use nalgebra::{Schur, SVD};

use crate::{CMatrix, Error, Result, C64};

/// The n-th roots of unity `exp(2 pi i (k-1) / n)`, k = 1..n, unordered.
pub fn roots_of_unity(n: usize) -> Result<Vec<C64>> {
    if n < 2 {
        return Err(Error::InvalidSpec(format!(
            "order n = {n} must be at least 2"
        )));
    }
    Ok((0..n)
        .map(|k| {
            let (s, c) = (2.0 * PI * k as f64 / n as f64).sin_cos();
            // exact zeros for the axis-aligned roots
            let snap = |v: f64| if v.abs() < 1e-15 { 0.0 } else { v };
            C64::new(snap(c), snap(s))
        })
        .collect())
}

/// One of the 2n sectors `arg rho in (mu pi / n, (mu + 1) pi / n)` together
/// with the order of the roots inside it.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorFrame {
    pub n: usize,
    pub sector_index: usize,
    pub ray_angle: f64,
    /// `ordering[i]` is the index (into the unordered roots) of `R_{i+1}`,
    /// so `Re(rho R_1) < ... < Re(rho R_n)`.
    pub ordering: Vec<usize>,
}

impl SectorFrame {
    /// Unit vector on the midpoint ray.
    pub fn ray(&self) -> C64 {
        C64::from_polar(1.0, self.ray_angle)
    }

    /// `|rho|` on the midpoint ray.
    pub fn rho(&self, modulus: f64) -> C64 {
        C64::from_polar(modulus, self.ray_angle)
    }

    /// Angular bounds of the open sector.
    pub fn bounds(&self) -> (f64, f64) {
        let w = PI / self.n as f64;
        (
            self.sector_index as f64 * w,
            (self.sector_index + 1) as f64 * w,
        )
    }

    pub fn ordered<T: Clone>(&self, items: &[T]) -> Vec<T> {
        self.ordering.iter().map(|&i| items[i].clone()).collect()
    }

    /// Checks that `rho` keeps the roots (already in frame order) strictly ordered.
    pub fn check(&self, ordered_roots: &[C64], rho: C64) -> Result<()> {
        let re: Vec<f64> = ordered_roots.iter().map(|r| (rho * r).re).collect();
        let scale = rho.norm() * ordered_roots.iter().map(|r| r.norm()).fold(0.0, f64::max);
        for w in re.windows(2) {
            if w[1] - w[0] <= 1e-12 * scale {
                return Err(Error::DegenerateSector(format!(
                    "rho = {rho} does not order the roots strictly for sector {}",
                    self.sector_index
                )));
            }
        }
        Ok(())
    }
}

/// Orders `roots` by `Re(rho R)` on the midpoint ray of sector `mu`.
pub fn sector_ordering(roots: &[C64], sector_index: usize) -> Result<SectorFrame> {
    let n = roots.len();
    if n < 2 {
        return Err(Error::InvalidSpec("need at least two roots".into()));
    }
    if sector_index >= 2 * n {
        return Err(Error::DegenerateSector(format!(
            "sector index {sector_index} out of range 0..{}",
            2 * n
        )));
    }
    let ray_angle = (sector_index as f64 + 0.5) * PI / n as f64;
    let ray = C64::from_polar(1.0, ray_angle);
    let mut ordering: Vec<usize> = (0..n).collect();
    ordering.sort_by(|&a, &b| (ray * roots[a]).re.total_cmp(&(ray * roots[b]).re));
    let frame = SectorFrame {
        n,
        sector_index,
        ray_angle,
        ordering,
    };
    let ordered = frame.ordered(roots);
    frame.check(&ordered, ray).map_err(|_| {
        Error::DegenerateSector(format!(
            "two roots tie in Re(rho R) on the midpoint ray of sector {sector_index}"
        ))
    })?;
    Ok(frame)
}

/// Roots `R_k`, optionally with `F'(R_k)` and eigenvectors `Omega`.
#[derive(Debug, Clone, PartialEq)]
pub struct RootSystem {
    pub roots: Vec<C64>,
    pub derivative_values: Option<Vec<C64>>,
    pub eigenvectors: Option<CMatrix>,
}

impl RootSystem {
    /// Reorders roots, derivative values and eigenvector columns per `frame`.
    pub fn ordered(&self, frame: &SectorFrame) -> RootSystem {
        RootSystem {
            roots: frame.ordered(&self.roots),
            derivative_values: self.derivative_values.as_ref().map(|d| frame.ordered(d)),
            eigenvectors: self
                .eigenvectors
                .as_ref()
                .map(|o| CMatrix::from_fn(o.nrows(), o.ncols(), |r, c| o[(r, frame.ordering[c])])),
        }
    }
}

/// Roots of `F(R) = sum_k p_kk R^k + R^n` (with `p_diag = [p_00, ..., p_{n-1,n-1}]`).
pub fn char_poly_roots(p_diag: &[C64]) -> Result<RootSystem> {
    let n = p_diag.len();
    if n < 2 {
        return Err(Error::InvalidSpec(
            "characteristic polynomial must have degree >= 2".into(),
        ));
    }
    if p_diag[0].norm() == 0.0 {
        return Err(Error::ConditionI1("p_00 = 0".into()));
    }
    let comp = companion(p_diag);
    let mut roots = eigenvalues(&comp)?;
    let f = |r: C64| {
        p_diag
            .iter()
            .rev()
            .fold(C64::new(1.0, 0.0), |acc, &c| acc * r + c)
    };
    let df = |r: C64| {
        let mut acc = C64::new(n as f64, 0.0);
        for k in (1..n).rev() {
            acc = acc * r + p_diag[k] * k as f64;
        }
        acc
    };
    for r in roots.iter_mut() {
        for _ in 0..3 {
            let d = df(*r);
            if d.norm() == 0.0 {
                break;
            }
            let next = *r - f(*r) / d;
            if f(next).norm() >= f(*r).norm() {
                break;
            }
            *r = next;
        }
    }
    check_simple(&roots)?;
    let derivative_values = roots.iter().map(|&r| df(r)).collect();
    Ok(RootSystem {
        roots,
        derivative_values: Some(derivative_values),
        eigenvectors: None,
    })
}

/// Companion matrix: ones on the superdiagonal, last row `-p_00 .. -p_{n-1,n-1}`.
pub fn companion(p_diag: &[C64]) -> CMatrix {
    let n = p_diag.len();
    let mut m = CMatrix::zeros(n, n);
    for r in 0..n - 1 {
        m[(r, r + 1)] = C64::new(1.0, 0.0);
    }
    for c in 0..n {
        m[(n - 1, c)] = -p_diag[c];
    }
    m
}

/// Eigenvalues and eigenvectors of a constant matrix satisfying (i1).
///
/// Each eigenvector is scaled so its largest-modulus entry equals 1.
pub fn eigen_system(a0: &CMatrix) -> Result<RootSystem> {
    if a0.nrows() != a0.ncols() || a0.nrows() < 2 {
        return Err(Error::InvalidSpec(format!(
            "A0 must be square of size >= 2, got {}x{}",
            a0.nrows(),
            a0.ncols()
        )));
    }
    let n = a0.nrows();
    let roots = eigenvalues(a0)?;
    let scale = roots
        .iter()
        .map(|r| r.norm())
        .fold(0.0, f64::max)
        .max(a0.norm());
    if let Some(z) = roots.iter().find(|r| r.norm() <= 1e-12 * scale) {
        return Err(Error::ConditionI1(format!(
            "A0 has the zero eigenvalue {z}"
        )));
    }
    check_simple(&roots)?;
    let mut omega = CMatrix::zeros(n, n);
    for (k, &r) in roots.iter().enumerate() {
        let shifted = a0 - CMatrix::identity(n, n) * r;
        let svd = SVD::new(shifted, false, true);
        let v_t = svd
            .v_t
            .ok_or_else(|| Error::Singular("SVD failed".into()))?;
        let (imin, _) = svd
            .singular_values
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .unwrap();
        let mut v: Vec<C64> = v_t.row(imin).iter().map(|c| c.conj()).collect();
        let pivot = v
            .iter()
            .copied()
            .max_by(|a, b| a.norm().total_cmp(&b.norm()))
            .unwrap();
        v.iter_mut().for_each(|c| *c /= pivot);
        for (i, c) in v.into_iter().enumerate() {
            omega[(i, k)] = c;
        }
    }
    let svd = SVD::new(omega.clone(), false, false);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if smin <= 1e-10 * smax {
        return Err(Error::ConditionI1(
            "A0 is defective (eigenvectors are dependent)".into(),
        ));
    }
    Ok(RootSystem {
        roots,
        derivative_values: None,
        eigenvectors: Some(omega),
    })
}

fn eigenvalues(m: &CMatrix) -> Result<Vec<C64>> {
    let diag = |t: CMatrix| (0..t.nrows()).map(|i| t[(i, i)]).collect();
    if let Some(schur) = Schur::try_new(m.clone(), f64::EPSILON, 10_000) {
        return Ok(diag(schur.unpack().1));
    }
    // Shifted QR can stall when all eigenvalues share a modulus (cyclic
    // permutations, companion matrices of R^n - c). A fixed non-unitary
    // similarity breaks the symmetry without moving the spectrum.
    let n = m.nrows();
    let s = CMatrix::from_fn(n, n, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Equal => C64::new(1.0, 0.0),
        std::cmp::Ordering::Less => C64::new(0.5 / (1 + i + 2 * j) as f64, 0.0),
        std::cmp::Ordering::Greater => C64::default(),
    });
    let s_inv = s.clone().try_inverse().expect("unit upper triangular");
    Schur::try_new(&s * m * s_inv, f64::EPSILON, 10_000)
        .map(|schur| diag(schur.unpack().1))
        .ok_or_else(|| Error::Singular("Schur decomposition did not converge".into()))
}

fn check_simple(roots: &[C64]) -> Result<()> {
    let scale = roots.iter().map(|r| r.norm()).fold(0.0, f64::max);
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            if (roots[i] - roots[j]).norm() < 1e-8 * scale {
                return Err(Error::ConditionI1(format!(
                    "repeated root near {} (roots must be simple)",
                    roots[i]
                )));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_companions() {
        for n in 2..=8 {
            let mut p = vec![C64::default(); n];
            p[0] = C64::new(-1.0, 0.0);
            let rs = eigen_system(&companion(&p)).unwrap();
            for r in &rs.roots {
                assert!((r.powu(n as u32) - 1.0).norm() < 1e-12, "n={n} {r}");
            }
        }
    }
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn unity_roots() {
        let r = roots_of_unity(4).unwrap();
        let expect = [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)];
        for (a, b) in r.iter().zip(expect) {
            assert!((a - b).norm() < 1e-15);
        }
        assert!(roots_of_unity(1).is_err());
    }

    #[test]
    fn n2_orderings() {
        let r = roots_of_unity(2).unwrap();
        let f0 = sector_ordering(&r, 0).unwrap();
        assert_eq!(f0.ordered(&r), vec![c(-1.0, 0.0), c(1.0, 0.0)]);
        let f1 = sector_ordering(&r, 1).unwrap();
        assert_eq!(f1.ordered(&r), vec![c(1.0, 0.0), c(-1.0, 0.0)]);
    }

    #[test]
    fn n4_sector0_by_direct_evaluation() {
        let r = roots_of_unity(4).unwrap();
        let f = sector_ordering(&r, 0).unwrap();
        // e^{i pi/8} R: Re for 1, i, -1, -i is cos(pi/8), -sin(pi/8), -cos(pi/8), sin(pi/8)
        assert_eq!(f.ordering, vec![2, 1, 3, 0]);
    }

    #[test]
    fn characteristic_polynomials() {
        let rs = char_poly_roots(&[c(-1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let mut pairs: Vec<(f64, f64)> = rs
            .roots
            .iter()
            .zip(rs.derivative_values.unwrap())
            .map(|(r, d)| (r.re, d.re))
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        assert!((pairs[0].0 + 1.0).abs() < 1e-14 && (pairs[0].1 + 2.0).abs() < 1e-14);
        assert!((pairs[1].0 - 1.0).abs() < 1e-14 && (pairs[1].1 - 2.0).abs() < 1e-14);

        let cube = char_poly_roots(&[c(-1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        for (r, d) in cube.roots.iter().zip(cube.derivative_values.unwrap()) {
            assert!((r.powu(3) - 1.0).norm() < 1e-14);
            assert!((d - 3.0 * r * r).norm() < 1e-13);
        }
        let double = char_poly_roots(&[c(1.0, 0.0), c(-2.0, 0.0)]);
        assert!(matches!(double, Err(Error::ConditionI1(_))), "{double:?}");
        assert!(char_poly_roots(&[c(0.0, 0.0), c(1.0, 0.0)]).is_err());
    }

    #[test]
    fn eigen_systems() {
        let d = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            c(1.0, 0.0),
            c(-1.0, 0.0),
        ]));
        let rs = eigen_system(&d).unwrap();
        let om = rs.eigenvectors.unwrap();
        for k in 0..2 {
            let col = om.column(k);
            let e = d.clone() * col - col * rs.roots[k];
            assert!(e.norm() < 1e-12);
            assert!((col.iter().map(|z| z.norm()).fold(0.0, f64::max) - 1.0).abs() < 1e-15);
        }

        let comp = companion(&[c(-1.0, 0.0), c(0.0, 0.0)]);
        let rs = eigen_system(&comp).unwrap();
        let om = rs.eigenvectors.unwrap();
        for k in 0..2 {
            let (r, col) = (rs.roots[k], om.column(k));
            assert!((&comp * col - col * r).norm() < 1e-12);
            // proportional to [1, R_k]
            assert!((col[1] - col[0] * r).norm() < 1e-12);
        }

        let singular =
            CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(
            eigen_system(&singular),
            Err(Error::ConditionI1(_))
        ));
        let jordan =
            CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(eigen_system(&jordan).is_err());
    }

    #[test]
    fn conjugation_diagonalizes() {
        let a0 = CMatrix::from_row_slice(
            3,
            3,
            &[
                c(2.0, 0.0),
                c(1.0, 0.5),
                c(0.0, 0.0),
                c(0.0, 0.0),
                c(-1.0, 0.0),
                c(0.3, 0.0),
                c(0.2, 0.0),
                c(0.0, 0.0),
                c(0.5, 1.0),
            ],
        );
        let rs = eigen_system(&a0).unwrap();
        let om = rs.eigenvectors.unwrap();
        let d = om.clone().try_inverse().unwrap() * a0 * om;
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { rs.roots[i] } else { C64::default() };
                assert!((d[(i, j)] - expect).norm() < 1e-10);
            }
        }
    }

    proptest! {
        #[test]
        fn ordering_holds_inside_sector(n in 2usize..=8, mu_seed in 0usize..1000, u in 0.001f64..0.999) {
            let mu = mu_seed % (2 * n);
            let r = roots_of_unity(n).unwrap();
            let f = sector_ordering(&r, mu).unwrap();
            let (lo, hi) = f.bounds();
            let rho = C64::from_polar(1.0, lo + u * (hi - lo));
            let ordered = f.ordered(&r);
            prop_assert!(ordered.windows(2).all(|w| (rho * w[0]).re < (rho * w[1]).re));
            for z in &r {
                prop_assert!((z.powu(n as u32) - 1.0).norm() < 1e-12);
            }
        }
    }
}
