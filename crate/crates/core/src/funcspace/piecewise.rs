use std::fmt;

use serde::{Deserialize, Serialize};

use crate::funcspace::quad::gauss_legendre;
use crate::{Error, Result, C64};

/// Smoothness index meaning "no interior breakpoint limits the class".
pub const INFINITE_SMOOTHNESS: u32 = u32::MAX;

const MATCH_TOL: f64 = 1e-12;
const SIGN_SAMPLES: usize = 1024;

/// Complex-valued piecewise polynomial on `[breakpoints[0], breakpoints[last]]`.
///
/// Each piece stores ascending monomial coefficients in the global variable
/// `x` (not shifted to the piece start). At an interior breakpoint the value
/// of the right piece is used; at the right end, the last piece.
///
/// `smoothness` is the index `N` of the class `W_N`: derivatives up to
/// `N - 1` are continuous across every interior breakpoint. It is detected
/// on construction and may be lowered explicitly, never raised.
#[derive(Clone, PartialEq)]
pub struct PiecewisePoly {
    breakpoints: Vec<f64>,
    pieces: Vec<Vec<C64>>,
    smoothness: u32,
}

impl fmt::Debug for PiecewisePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PiecewisePoly")
            .field("breakpoints", &self.breakpoints)
            .field("pieces", &self.pieces)
            .field("smoothness", &self.smoothness)
            .finish()
    }
}

impl PiecewisePoly {
    pub fn new(breakpoints: Vec<f64>, pieces: Vec<Vec<C64>>) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(Error::InvalidFunction(
                "need at least two breakpoints".into(),
            ));
        }
        if pieces.len() + 1 != breakpoints.len() {
            return Err(Error::InvalidFunction(format!(
                "{} breakpoints require {} pieces, got {}",
                breakpoints.len(),
                breakpoints.len() - 1,
                pieces.len()
            )));
        }
        if breakpoints.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidFunction("non-finite breakpoint".into()));
        }
        if breakpoints.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidFunction(
                "breakpoints must be strictly increasing".into(),
            ));
        }
        if pieces
            .iter()
            .flatten()
            .any(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(Error::InvalidFunction("non-finite coefficient".into()));
        }
        let pieces = pieces.into_iter().map(trim).collect();
        let mut f = PiecewisePoly {
            breakpoints,
            pieces,
            smoothness: INFINITE_SMOOTHNESS,
        };
        f.smoothness = f.detect_smoothness();
        Ok(f)
    }

    /// Lowers the declared smoothness class. Raising above the detected
    /// class is rejected.
    pub fn with_smoothness(mut self, class: u32) -> Result<Self> {
        if class > self.smoothness {
            return Err(Error::Smoothness(format!(
                "declared class W_{} exceeds detected class W_{}",
                class,
                fmt_class(self.smoothness)
            )));
        }
        self.smoothness = class;
        Ok(self)
    }

    pub fn polynomial(coeffs: Vec<C64>, a: f64, b: f64) -> Result<Self> {
        Self::new(vec![a, b], vec![coeffs])
    }

    pub fn constant(c: C64, a: f64, b: f64) -> Result<Self> {
        Self::polynomial(vec![c], a, b)
    }

    pub fn zero(a: f64, b: f64) -> Result<Self> {
        Self::constant(C64::new(0.0, 0.0), a, b)
    }

    /// Real polynomial shortcut.
    pub fn real(coeffs: &[f64], a: f64, b: f64) -> Result<Self> {
        Self::polynomial(coeffs.iter().map(|&c| C64::new(c, 0.0)).collect(), a, b)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[Vec<C64>] {
        &self.pieces
    }

    pub fn smoothness(&self) -> u32 {
        self.smoothness
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.breakpoints[0], *self.breakpoints.last().unwrap())
    }

    pub fn degree(&self) -> usize {
        self.pieces
            .iter()
            .map(|p| p.len().saturating_sub(1))
            .max()
            .unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.iter().flatten().all(|c| c.norm_sqr() == 0.0)
    }

    /// Value at `x`, rejecting points outside the domain.
    pub fn eval(&self, x: f64) -> Result<C64> {
        let (a, b) = self.domain();
        if !(a..=b).contains(&x) {
            return Err(Error::OutOfDomain { x, a, b });
        }
        Ok(self.value(x))
    }

    /// Value at `x`; points outside the domain are evaluated on the nearest
    /// end piece.
    pub fn value(&self, x: f64) -> C64 {
        horner(&self.pieces[self.piece_index(x)], x)
    }

    /// Value of the `order`-th derivative at `x`, computed piecewise without
    /// any smoothness check.
    pub fn derivative_value(&self, order: usize, x: f64) -> C64 {
        derivative_at(&self.pieces[self.piece_index(x)], order, x)
    }

    /// Index of the piece holding `x` (right piece at breakpoints).
    pub fn piece_index(&self, x: f64) -> usize {
        let np = self.pieces.len();
        // partition_point gives the count of breakpoints <= x
        let idx = self.breakpoints.partition_point(|&b| b <= x);
        idx.saturating_sub(1).min(np - 1)
    }

    pub fn derivative(&self) -> Result<Self> {
        if self.smoothness == 0 {
            return Err(Error::Smoothness(
                "derivative of a function of class W_0".into(),
            ));
        }
        let pieces = self.pieces.iter().map(|p| differentiate(p)).collect();
        let mut d = Self::new(self.breakpoints.clone(), pieces)?;
        if self.smoothness != INFINITE_SMOOTHNESS {
            d.smoothness = d.smoothness.min(self.smoothness - 1);
        }
        Ok(d)
    }

    pub fn nth_derivative(&self, order: usize) -> Result<Self> {
        let mut d = self.clone();
        for _ in 0..order {
            d = d.derivative()?;
        }
        Ok(d)
    }

    /// Continuous antiderivative vanishing at `base`.
    pub fn antiderivative(&self, base: f64) -> Result<Self> {
        let (a, b) = self.domain();
        if !(a..=b).contains(&base) {
            return Err(Error::OutOfDomain { x: base, a, b });
        }
        let mut pieces: Vec<Vec<C64>> = self.pieces.iter().map(|p| integrate(p)).collect();
        // glue pieces left to right
        for i in 1..pieces.len() {
            let x = self.breakpoints[i];
            let jump = horner(&pieces[i - 1], x) - horner(&pieces[i], x);
            pieces[i][0] += jump;
        }
        let shift = horner(&pieces[self.piece_index(base)], base);
        for p in &mut pieces {
            p[0] -= shift;
        }
        let mut f = Self::new(self.breakpoints.clone(), pieces)?;
        if self.smoothness != INFINITE_SMOOTHNESS {
            f.smoothness = f.smoothness.min(self.smoothness + 1);
        }
        Ok(f)
    }

    /// Definite integral over `[lo, hi]` (any order of the limits).
    pub fn integral(&self, lo: f64, hi: f64) -> Result<C64> {
        let (a, _) = self.domain();
        let anti = self.antiderivative(a)?;
        Ok(anti.eval(hi)? - anti.eval(lo)?)
    }

    /// `int_lo^hi |f(x)| dx`.
    ///
    /// Each piece is split at the real zeros of `f` (sign changes of the real
    /// or imaginary part located by dense sampling and bisection), and the
    /// smooth remainder integrated with composite Gauss-Legendre.
    pub fn l1_norm(&self, lo: f64, hi: f64) -> Result<f64> {
        let (a, b) = self.domain();
        for x in [lo, hi] {
            if !(a..=b).contains(&x) {
                return Err(Error::OutOfDomain { x, a, b });
            }
        }
        if hi < lo {
            return Err(Error::InvalidFunction(format!(
                "l1_norm needs lo <= hi, got [{lo}, {hi}]"
            )));
        }
        let mut total = 0.0;
        for (i, p) in self.pieces.iter().enumerate() {
            let left = self.breakpoints[i].max(lo);
            let right = self.breakpoints[i + 1].min(hi);
            if right <= left {
                continue;
            }
            let mut cuts = vec![left];
            cuts.extend(real_zeros(p, left, right));
            cuts.push(right);
            for w in cuts.windows(2) {
                total += abs_integral(p, w[0], w[1]);
            }
        }
        Ok(total)
    }

    pub fn scale(&self, c: C64) -> Self {
        let pieces = self
            .pieces
            .iter()
            .map(|p| trim(p.iter().map(|&v| v * c).collect()))
            .collect();
        PiecewisePoly {
            breakpoints: self.breakpoints.clone(),
            pieces,
            smoothness: if c.norm_sqr() == 0.0 {
                INFINITE_SMOOTHNESS
            } else {
                self.smoothness
            },
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(other, |p, q| {
            let n = p.len().max(q.len());
            (0..n)
                .map(|i| {
                    p.get(i).copied().unwrap_or_default() + q.get(i).copied().unwrap_or_default()
                })
                .collect()
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.combine(other, |p, q| {
            let mut out = vec![C64::default(); p.len() + q.len() - 1];
            for (i, &a) in p.iter().enumerate() {
                for (j, &b) in q.iter().enumerate() {
                    out[i + j] += a * b;
                }
            }
            out
        })
    }

    pub fn add_constant(&self, c: C64) -> Self {
        let mut f = self.clone();
        for p in &mut f.pieces {
            p[0] += c;
        }
        f
    }

    /// `sum_i c_i f_i`; all terms must share one domain.
    pub fn linear_combination(terms: &[(C64, &PiecewisePoly)]) -> Result<Self> {
        let Some((_, first)) = terms.first() else {
            return Err(Error::InvalidFunction("empty linear combination".into()));
        };
        let (a, b) = first.domain();
        let mut acc = PiecewisePoly::zero(a, b)?;
        for (c, f) in terms {
            if c.norm_sqr() == 0.0 || f.is_zero() {
                continue;
            }
            acc = acc.add(&f.scale(*c))?;
        }
        Ok(acc)
    }

    fn combine<F>(&self, other: &Self, op: F) -> Result<Self>
    where
        F: Fn(&[C64], &[C64]) -> Vec<C64>,
    {
        let (a, b) = self.domain();
        let (c, d) = other.domain();
        if (a - c).abs() > 1e-12 * (1.0 + a.abs()) || (b - d).abs() > 1e-12 * (1.0 + b.abs()) {
            return Err(Error::Mismatch(format!(
                "domains [{a}, {b}] and [{c}, {d}] differ"
            )));
        }
        let breaks = merge_breakpoints(&self.breakpoints, &other.breakpoints);
        let pieces = breaks
            .windows(2)
            .map(|w| {
                let mid = 0.5 * (w[0] + w[1]);
                op(
                    &self.pieces[self.piece_index(mid)],
                    &other.pieces[other.piece_index(mid)],
                )
            })
            .collect();
        let mut f = Self::new(breaks, pieces)?;
        f.smoothness = f.smoothness.min(self.smoothness.min(other.smoothness));
        Ok(f)
    }

    fn detect_smoothness(&self) -> u32 {
        let mut class = INFINITE_SMOOTHNESS;
        for i in 1..self.pieces.len() {
            let x = self.breakpoints[i];
            let (l, r) = (&self.pieces[i - 1], &self.pieces[i]);
            let max_order = l.len().max(r.len());
            for order in 0..max_order {
                let lv = derivative_at(l, order, x);
                let rv = derivative_at(r, order, x);
                let scale = 1.0_f64.max(lv.norm()).max(rv.norm());
                if (lv - rv).norm() > MATCH_TOL * scale {
                    class = class.min(order as u32);
                    break;
                }
            }
        }
        class
    }
}

/// Renders a class index, spelling out the unbounded case.
pub fn fmt_class(class: u32) -> String {
    if class == INFINITE_SMOOTHNESS {
        "inf".to_string()
    } else {
        class.to_string()
    }
}

fn trim(mut p: Vec<C64>) -> Vec<C64> {
    while p.len() > 1 && p.last().is_some_and(|c| c.norm_sqr() == 0.0) {
        p.pop();
    }
    if p.is_empty() {
        p.push(C64::default());
    }
    p
}

fn horner(p: &[C64], x: f64) -> C64 {
    p.iter().rev().fold(C64::default(), |acc, &c| acc * x + c)
}

fn differentiate(p: &[C64]) -> Vec<C64> {
    if p.len() <= 1 {
        return vec![C64::default()];
    }
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| c * i as f64)
        .collect()
}

fn integrate(p: &[C64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(p.len() + 1);
    out.push(C64::default());
    out.extend(p.iter().enumerate().map(|(i, &c)| c / (i + 1) as f64));
    out
}

fn derivative_at(p: &[C64], order: usize, x: f64) -> C64 {
    if order >= p.len() {
        return C64::default();
    }
    // sum_i c_i * i!/(i-order)! * x^(i-order)
    let mut acc = C64::default();
    for i in (order..p.len()).rev() {
        let falling: f64 = ((i - order + 1)..=i).map(|v| v as f64).product();
        acc = acc * x + p[i] * falling;
    }
    acc
}

fn merge_breakpoints(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut all: Vec<f64> = a.iter().chain(b.iter()).copied().collect();
    all.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let span = all.last().unwrap() - all[0];
    let tol = 1e-13 * span.max(1.0);
    let mut out: Vec<f64> = Vec::with_capacity(all.len());
    for x in all {
        match out.last() {
            Some(&last) if x - last <= tol => {}
            _ => out.push(x),
        }
    }
    // keep the exact end points of the first operand
    out[0] = a[0];
    *out.last_mut().unwrap() = *a.last().unwrap();
    out
}

/// Real points in `(lo, hi)` where `p` vanishes, found from sign changes of
/// the real part (or of the imaginary part when the real part is identically
/// zero).
fn real_zeros(p: &[C64], lo: f64, hi: f64) -> Vec<f64> {
    let re: Vec<f64> = p.iter().map(|c| c.re).collect();
    let im: Vec<f64> = p.iter().map(|c| c.im).collect();
    let (primary, secondary) = if re.iter().any(|&c| c != 0.0) {
        (re, im)
    } else {
        (im, re)
    };
    let eval = |q: &[f64], x: f64| q.iter().rev().fold(0.0, |acc, &c| acc * x + c);
    let scale = p.iter().map(|c| c.norm()).fold(0.0, f64::max)
        * (1.0 + lo.abs().max(hi.abs())).powi(p.len() as i32);
    let mut zeros = Vec::new();
    let h = (hi - lo) / SIGN_SAMPLES as f64;
    let mut x0 = lo;
    let mut f0 = eval(&primary, x0);
    for i in 1..=SIGN_SAMPLES {
        let x1 = if i == SIGN_SAMPLES {
            hi
        } else {
            lo + i as f64 * h
        };
        let f1 = eval(&primary, x1);
        if f0 == 0.0 && x0 > lo {
            push_zero(&mut zeros, x0, &secondary, scale, eval);
        } else if f0 * f1 < 0.0 {
            let (mut a, mut b, mut fa) = (x0, x1, f0);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if m <= a || m >= b {
                    break;
                }
                let fm = eval(&primary, m);
                if fm == 0.0 {
                    a = m;
                    b = m;
                    break;
                }
                if fa * fm < 0.0 {
                    b = m;
                } else {
                    a = m;
                    fa = fm;
                }
            }
            push_zero(&mut zeros, 0.5 * (a + b), &secondary, scale, eval);
        }
        x0 = x1;
        f0 = f1;
    }
    zeros
}

fn push_zero(
    zeros: &mut Vec<f64>,
    x: f64,
    secondary: &[f64],
    scale: f64,
    eval: impl Fn(&[f64], f64) -> f64,
) {
    if eval(secondary, x).abs() <= 1e-12 * scale.max(1e-300) {
        zeros.push(x);
    }
}

fn abs_integral(p: &[C64], a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let whole = gl16_abs(p, a, b);
    adaptive_abs(p, a, b, whole, 1e-15 * (1.0 + whole), 0)
}

// |p| is only Lipschitz near complex zeros close to the real axis, so
// refine where two half-panels disagree with the whole panel.
fn adaptive_abs(p: &[C64], a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let left = gl16_abs(p, a, m);
    let right = gl16_abs(p, m, b);
    if (left + right - whole).abs() <= tol || depth >= 50 {
        return left + right;
    }
    adaptive_abs(p, a, m, left, 0.5 * tol, depth + 1)
        + adaptive_abs(p, m, b, right, 0.5 * tol, depth + 1)
}

fn gl16_abs(p: &[C64], a: f64, b: f64) -> f64 {
    let h = b - a;
    gauss_legendre(16)
        .iter()
        .map(|&(xi, w)| 0.5 * h * w * horner(p, a + 0.5 * h * (xi + 1.0)).norm())
        .sum()
}

#[derive(Serialize, Deserialize)]
struct RawPoly {
    breakpoints: Vec<f64>,
    pieces: Vec<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    smoothness_class: Option<u32>,
}

impl Serialize for PiecewisePoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let detected = self.detect_smoothness();
        RawPoly {
            breakpoints: self.breakpoints.clone(),
            pieces: self
                .pieces
                .iter()
                .map(|p| p.iter().map(|c| [c.re, c.im]).collect())
                .collect(),
            smoothness_class: (self.smoothness != detected).then_some(self.smoothness),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PiecewisePoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawPoly::deserialize(d)?;
        let pieces = raw
            .pieces
            .into_iter()
            .map(|p| p.into_iter().map(|[re, im]| C64::new(re, im)).collect())
            .collect();
        let f = PiecewisePoly::new(raw.breakpoints, pieces).map_err(serde::de::Error::custom)?;
        match raw.smoothness_class {
            Some(c) => f.with_smoothness(c).map_err(serde::de::Error::custom),
            None => Ok(f),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn tent() -> PiecewisePoly {
        // x on [0,1], 2 - x on [1,2]
        PiecewisePoly::new(
            vec![0.0, 1.0, 2.0],
            vec![vec![c(0.0), c(1.0)], vec![c(2.0), c(-1.0)]],
        )
        .unwrap()
    }

    #[test]
    fn eval_examples() {
        let k = PiecewisePoly::constant(C64::new(2.0, 0.0), 0.0, 1.0).unwrap();
        assert_eq!(k.eval(0.37).unwrap(), C64::new(2.0, 0.0));
        let id = PiecewisePoly::real(&[0.0, 1.0], 0.0, 1.0).unwrap();
        assert_eq!(id.eval(0.5).unwrap(), c(0.5));
        assert_eq!(tent().eval(1.0).unwrap(), c(1.0));
        assert_eq!(tent().piece_index(1.0), 1);
        assert_eq!(tent().piece_index(2.0), 1);
        assert!(matches!(id.eval(1.5), Err(Error::OutOfDomain { .. })));
    }

    #[test]
    fn calculus_examples() {
        let sq = PiecewisePoly::real(&[0.0, 0.0, 1.0], 0.0, 1.0).unwrap();
        let d = sq.derivative().unwrap();
        assert_eq!(d.pieces()[0], vec![c(0.0), c(2.0)]);

        let k = PiecewisePoly::constant(C64::new(3.0, -1.0), 0.0, 2.0).unwrap();
        let anti = k.antiderivative(0.0).unwrap();
        assert_abs_diff_eq!(
            (anti.eval(1.5).unwrap() - C64::new(4.5, -1.5)).norm(),
            0.0,
            epsilon = 1e-15
        );

        let shifted = PiecewisePoly::real(&[-0.5, 1.0], 0.0, 1.0).unwrap();
        assert_abs_diff_eq!(shifted.l1_norm(0.0, 1.0).unwrap(), 0.25, epsilon = 1e-14);
    }

    #[test]
    fn smoothness_detection() {
        assert_eq!(tent().smoothness(), 1);
        let step =
            PiecewisePoly::new(vec![0.0, 0.5, 1.0], vec![vec![c(0.0)], vec![c(1.0)]]).unwrap();
        assert_eq!(step.smoothness(), 0);
        assert!(matches!(step.derivative(), Err(Error::Smoothness(_))));
        let d = tent().derivative().unwrap();
        assert_eq!(d.smoothness(), 0);
        assert_eq!(tent().antiderivative(0.0).unwrap().smoothness(), 2);
        let poly = PiecewisePoly::real(&[1.0, 2.0, 3.0], 0.0, 1.0).unwrap();
        assert_eq!(poly.smoothness(), INFINITE_SMOOTHNESS);
        assert!(poly.clone().with_smoothness(2).is_ok());
        assert!(tent().with_smoothness(3).is_err());
    }

    #[test]
    fn rejects_bad_breakpoints() {
        let r = PiecewisePoly::new(vec![0.0, 0.7, 0.5], vec![vec![c(1.0)], vec![c(1.0)]]);
        assert!(matches!(r, Err(Error::InvalidFunction(_))));
        let r = PiecewisePoly::new(vec![0.0, 1.0], vec![vec![c(1.0)], vec![c(1.0)]]);
        assert!(r.is_err());
    }

    #[test]
    fn l1_norm_handles_complex_kinks() {
        // (1+i)(x - 1/3) has a real zero at 1/3
        let f = PiecewisePoly::polynomial(
            vec![C64::new(-1.0 / 3.0, -1.0 / 3.0), C64::new(1.0, 1.0)],
            0.0,
            1.0,
        )
        .unwrap();
        let exact = 2f64.sqrt() * (1.0 / 18.0 + 2.0 / 9.0);
        assert_abs_diff_eq!(f.l1_norm(0.0, 1.0).unwrap(), exact, epsilon = 1e-14);
        // x - 1/3 + i has no real zero; |f| smooth
        let g =
            PiecewisePoly::polynomial(vec![C64::new(-1.0 / 3.0, 1.0), c(1.0)], 0.0, 1.0).unwrap();
        let h = g.l1_norm(0.0, 1.0).unwrap();
        let exact = {
            let prim = |u: f64| 0.5 * (u * (u * u + 1.0).sqrt() + (u + (u * u + 1.0).sqrt()).ln());
            prim(2.0 / 3.0) - prim(-1.0 / 3.0)
        };
        assert_abs_diff_eq!(h, exact, epsilon = 1e-13);
    }

    #[test]
    fn product_merges_breakpoints() {
        let p = tent().mul(&tent()).unwrap();
        assert_eq!(p.breakpoints(), &[0.0, 1.0, 2.0]);
        assert_abs_diff_eq!((p.value(1.5) - c(0.25)).norm(), 0.0, epsilon = 1e-15);
        let q = PiecewisePoly::new(
            vec![0.0, 0.5, 2.0],
            vec![vec![c(1.0)], vec![c(1.0), c(1.0)]],
        )
        .unwrap();
        let s = tent().add(&q).unwrap();
        assert_eq!(s.breakpoints(), &[0.0, 0.5, 1.0, 2.0]);
        assert_eq!(s.smoothness(), 0);
    }

    #[test]
    fn json_schema() {
        let f: PiecewisePoly = serde_json::from_str(
            r#"{"breakpoints":[0,1,2],"pieces":[[[0,0],[1,0]],[[2,0],[-1,0]]]}"#,
        )
        .unwrap();
        assert_eq!(f, tent());
        let back: PiecewisePoly =
            serde_json::from_str(&serde_json::to_string(&f).unwrap()).unwrap();
        assert_eq!(back, f);
        let bad = serde_json::from_str::<PiecewisePoly>(
            r#"{"breakpoints":[0,2,1],"pieces":[[[1,0]],[[1,0]]]}"#,
        );
        assert!(bad.is_err());
    }

    fn arb_poly() -> impl Strategy<Value = PiecewisePoly> {
        (
            1usize..4,
            prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 12),
        )
            .prop_map(|(npieces, c)| {
                let breaks: Vec<f64> = (0..=npieces).map(|i| i as f64 / npieces as f64).collect();
                let pieces = (0..npieces)
                    .map(|i| {
                        (0..3)
                            .map(|j| C64::new(c[3 * i + j].0, c[3 * i + j].1))
                            .collect()
                    })
                    .collect();
                PiecewisePoly::new(breaks, pieces).unwrap()
            })
    }

    proptest! {
        #[test]
        fn derivative_inverts_antiderivative(f in arb_poly(), base in 0.0f64..1.0, x in 0.0f64..1.0) {
            let back = f.antiderivative(base).unwrap().derivative().unwrap();
            prop_assert!((back.value(x) - f.value(x)).norm() <= 1e-12);
            prop_assert!(f.antiderivative(base).unwrap().value(base).norm() <= 1e-12);
        }

        #[test]
        fn l1_norm_is_additive(f in arb_poly(), a in 0.0f64..0.3, b in 0.3f64..0.6, c2 in 0.6f64..1.0) {
            let whole = f.l1_norm(a, c2).unwrap();
            let parts = f.l1_norm(a, b).unwrap() + f.l1_norm(b, c2).unwrap();
            prop_assert!((whole - parts).abs() <= 1e-12);
        }
    }
}
