use crate::coeffs::{GTable, SystemSpec};
use crate::par::Execution;
use crate::{CMatrix, Error, Result, C64};

/// Per-node tables built from the formal solution `U`, all with the
/// exponential factors `exp(rho R_k x)` stripped from the columns.
#[derive(Debug, Clone)]
pub struct UVFrame {
    pub rho: C64,
    pub nodes: Vec<f64>,
    /// `U~ = [sum_mu g_(mu)k / rho^mu]_k`
    pub u: Vec<CMatrix>,
    /// exact `x`-derivative of `U~`
    pub u_prime: Vec<CMatrix>,
    /// `U~^{-1}`
    pub v: Vec<CMatrix>,
    /// `(1/rho) U~' + U~ diag(R) - A U~`, the stripped `LU`
    pub lu: Vec<CMatrix>,
    /// `-V LU V`
    pub lstar_v: Vec<CMatrix>,
}

impl UVFrame {
    /// Kernel matrix `L*V U~ = -V LU` at node `i`.
    pub fn kernel(&self, i: usize) -> CMatrix {
        &self.lstar_v[i] * &self.u[i]
    }
}

/// Assembles `U`, `U'`, `V`, `LU` and `L*V` at `nodes` for a system whose
/// `A_(0)` is diagonal. `LU` uses every `A_(mu)` present in the spec.
pub fn build_uv(
    spec: &SystemSpec,
    g: &GTable,
    rho: C64,
    nodes: &[f64],
    exec: Execution,
) -> Result<UVFrame> {
    if !spec.is_diagonal() {
        return Err(Error::InvalidSpec("build_uv needs a diagonal A_(0)".into()));
    }
    let n = spec.n;
    let d = CMatrix::from_diagonal(&spec.a0.diagonal());
    let inv = rho.inv();
    let rows = exec.map(nodes, |&x| {
        let mut u = CMatrix::zeros(n, n);
        let mut du = CMatrix::zeros(n, n);
        let mut pw = C64::new(1.0, 0.0);
        for mu in 0..=g.big_n {
            for k in 0..n {
                let col = g.value(mu, k, x) * pw;
                let dcol = g.derivative(mu, k, x) * pw;
                for r in 0..n {
                    u[(r, k)] += col[r];
                    du[(r, k)] += dcol[r];
                }
            }
            pw *= inv;
        }
        let v = u.clone().try_inverse().ok_or_else(|| {
            Error::Singular(format!(
                "U is singular at x = {x} for |rho| = {}",
                rho.norm()
            ))
        })?;
        let lu = &du * inv + &u * &d - spec.a_full(x, rho) * &u;
        let lstar_v = -(&v * &lu * &v);
        Ok::<_, Error>((u, du, v, lu, lstar_v))
    });
    let mut frame = UVFrame {
        rho,
        nodes: nodes.to_vec(),
        u: Vec::with_capacity(nodes.len()),
        u_prime: Vec::with_capacity(nodes.len()),
        v: Vec::with_capacity(nodes.len()),
        lu: Vec::with_capacity(nodes.len()),
        lstar_v: Vec::with_capacity(nodes.len()),
    };
    for row in rows {
        let (u, du, v, lu, lsv) = row?;
        frame.u.push(u);
        frame.u_prime.push(du);
        frame.v.push(v);
        frame.lu.push(lu);
        frame.lstar_v.push(lsv);
    }
    Ok(frame)
}
