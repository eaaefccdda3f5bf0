use crate::funcspace::quad::gauss_legendre;
use crate::funcspace::{Grid, NODES_PER_CELL};
use crate::C64;

const P: usize = NODES_PER_CELL;

/// Exponential convolutions `int e^{lambda (x - t)} f(t) dt` on a [`Grid`].
///
/// `f` is known at the grid nodes and interpolated by the cubic through the
/// four Gauss points of each cell; the exponential is integrated exactly
/// against that interpolant (product integration), so accuracy does not
/// degrade when `|lambda| h` is large. Integrals are accumulated cell by
/// cell, splitting exactly at the evaluation node, which is where the
/// kernels of the integral equations jump.
#[derive(Debug, Clone)]
pub struct ExpConvolution {
    lambda: C64,
    sets: Vec<WeightSet>,
    cell_set: Vec<usize>,
}

#[derive(Debug, Clone)]
struct WeightSet {
    width: f64,
    step: C64,
    back_step: C64,
    from_start: [C64; P],
    to_end: [C64; P],
    full_fwd: [C64; P],
    part_fwd: [[C64; P]; P],
    full_bwd: [C64; P],
    part_bwd: [[C64; P]; P],
}

impl ExpConvolution {
    pub fn new(grid: &Grid, lambda: C64) -> Self {
        let mut sets: Vec<WeightSet> = Vec::new();
        let mut cell_set = Vec::with_capacity(grid.cell_count());
        for c in 0..grid.cell_count() {
            let h = grid.cell_width(c);
            let found = sets.iter().position(|s| (s.width - h).abs() <= 1e-14 * h);
            let idx = match found {
                Some(i) => i,
                None => {
                    sets.push(WeightSet::new(h, lambda));
                    sets.len() - 1
                }
            };
            cell_set.push(idx);
        }
        ExpConvolution {
            lambda,
            sets,
            cell_set,
        }
    }

    pub fn lambda(&self) -> C64 {
        self.lambda
    }

    /// `out[i] = int_a^{x_i} e^{lambda (x_i - t)} f(t) dt`; returns the same
    /// integral taken up to the right end `b`.
    pub fn forward(&self, f: &[C64], out: &mut [C64]) -> C64 {
        let mut acc = C64::default();
        for (c, &s) in self.cell_set.iter().enumerate() {
            let w = &self.sets[s];
            let fc = &f[c * P..(c + 1) * P];
            for p in 0..P {
                let local: C64 = (0..P).map(|q| w.part_fwd[p][q] * fc[q]).sum();
                out[c * P + p] = w.from_start[p] * acc + local;
            }
            let cell: C64 = (0..P).map(|q| w.full_fwd[q] * fc[q]).sum();
            acc = w.step * acc + cell;
        }
        acc
    }

    /// `out[i] = int_{x_i}^b e^{lambda (x_i - t)} f(t) dt`; returns the same
    /// integral taken from the left end `a`.
    pub fn backward(&self, f: &[C64], out: &mut [C64]) -> C64 {
        let mut acc = C64::default();
        for (c, &s) in self.cell_set.iter().enumerate().rev() {
            let w = &self.sets[s];
            let fc = &f[c * P..(c + 1) * P];
            for p in 0..P {
                let local: C64 = (0..P).map(|q| w.part_bwd[p][q] * fc[q]).sum();
                out[c * P + p] = w.to_end[p] * acc + local;
            }
            let cell: C64 = (0..P).map(|q| w.full_bwd[q] * fc[q]).sum();
            acc = w.back_step * acc + cell;
        }
        acc
    }
}

impl WeightSet {
    fn new(h: f64, lambda: C64) -> Self {
        let rule = gauss_legendre(P);
        let s: Vec<f64> = rule.iter().map(|&(xi, _)| 0.5 * h * (xi + 1.0)).collect();
        let basis = |q: usize, x: f64| -> f64 {
            (0..P)
                .filter(|&r| r != q)
                .map(|r| (x - s[r]) / (s[q] - s[r]))
                .product()
        };
        // int_{u0}^{u1} e^{lambda (c - t)} l_q(t) dt
        let moment = |q: usize, c: f64, u0: f64, u1: f64| -> C64 {
            exp_integral(lambda, c, u0, u1, |t| basis(q, t))
        };
        let mut full_fwd = [C64::default(); P];
        let mut full_bwd = [C64::default(); P];
        let mut part_fwd = [[C64::default(); P]; P];
        let mut part_bwd = [[C64::default(); P]; P];
        let mut from_start = [C64::default(); P];
        let mut to_end = [C64::default(); P];
        for q in 0..P {
            full_fwd[q] = moment(q, h, 0.0, h);
            full_bwd[q] = moment(q, 0.0, 0.0, h);
        }
        for p in 0..P {
            from_start[p] = (lambda * s[p]).exp();
            to_end[p] = (lambda * (s[p] - h)).exp();
            for q in 0..P {
                part_fwd[p][q] = moment(q, s[p], 0.0, s[p]);
                part_bwd[p][q] = moment(q, s[p], s[p], h);
            }
        }
        WeightSet {
            width: h,
            step: (lambda * h).exp(),
            back_step: (-lambda * h).exp(),
            from_start,
            to_end,
            full_fwd,
            part_fwd,
            full_bwd,
            part_bwd,
        }
    }
}

/// `int_{u0}^{u1} e^{lambda (c - t)} g(t) dt` for smooth real `g`, by
/// composite 16-point Gauss-Legendre with panels resolving the exponential.
pub(crate) fn exp_integral(lambda: C64, c: f64, u0: f64, u1: f64, g: impl Fn(f64) -> f64) -> C64 {
    if u1 <= u0 {
        return C64::default();
    }
    let rule = gauss_legendre(16);
    let panels = ((lambda.norm() * (u1 - u0) / 3.0).ceil() as usize).max(1);
    let ph = (u1 - u0) / panels as f64;
    let mut total = C64::default();
    for k in 0..panels {
        let lo = u0 + k as f64 * ph;
        for &(xi, w) in rule {
            let t = lo + 0.5 * ph * (xi + 1.0);
            total += (lambda * (c - t)).exp() * (0.5 * ph * w * g(t));
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(lambda: C64, cells: usize) {
        let grid = Grid::uniform(0.0, 1.0, cells).unwrap();
        // f(t) = t^2: closed forms of both convolutions
        let f: Vec<C64> = grid.nodes().iter().map(|&t| C64::new(t * t, 0.0)).collect();
        let conv = ExpConvolution::new(&grid, lambda);
        let mut fw = vec![C64::default(); f.len()];
        let mut bw = vec![C64::default(); f.len()];
        conv.forward(&f, &mut fw);
        conv.backward(&f, &mut bw);
        // antiderivative of e^{-lambda t} t^2
        let prim = |t: f64| -> C64 {
            let l = lambda;
            -(-l * t).exp() * (l * l * t * t + 2.0 * l * t + 2.0) / (l * l * l)
        };
        for (i, &x) in grid.nodes().iter().enumerate() {
            let exact_f = (lambda * x).exp() * (prim(x) - prim(0.0));
            let exact_b = (lambda * x).exp() * (prim(1.0) - prim(x));
            let scale = 1.0 + exact_f.norm();
            assert!(
                (fw[i] - exact_f).norm() < 1e-12 * scale,
                "fwd {lambda} {x}: {} vs {}",
                fw[i],
                exact_f
            );
            assert!(
                (bw[i] - exact_b).norm() < 1e-12 * (1.0 + exact_b.norm()),
                "bwd {lambda} {x}"
            );
        }
    }

    #[test]
    fn exact_for_quadratic_data() {
        check(C64::new(-3.0, 2.0), 8);
        check(C64::new(-300.0, 150.0), 8);
        check(C64::new(40.0, -7.0), 16);
        check(C64::new(0.5, 0.5), 3);
    }

    #[test]
    fn zero_lambda_is_plain_quadrature() {
        let grid = Grid::uniform(0.0, 2.0, 4).unwrap();
        let f: Vec<C64> = grid
            .nodes()
            .iter()
            .map(|&t| C64::new(t.cos(), 0.0))
            .collect();
        let conv = ExpConvolution::new(&grid, C64::default());
        let mut out = vec![C64::default(); f.len()];
        let total = conv.forward(&f, &mut out);
        assert!((total.re - 2f64.sin()).abs() < 1e-6);
        assert!(total.im.abs() < 1e-15);
    }
}
