use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::legendre::GaussLegendre;

/// Gauss-Legendre nodes and weights on `[-1, 1]`, ascending nodes.
///
/// Only the orders used by the crate are cached: 4, 8, 16 and 24.
pub fn gauss_legendre(order: usize) -> &'static [(f64, f64)] {
    static RULES: [OnceLock<Vec<(f64, f64)>>; 4] = [
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
    ];
    let slot = match order {
        4 => 0,
        8 => 1,
        16 => 2,
        24 => 3,
        _ => panic!("unsupported Gauss-Legendre order {order}"),
    };
    RULES[slot].get_or_init(|| {
        let rule = GaussLegendre::new(NonZeroUsize::new(order).unwrap());
        let mut pairs = rule.as_node_weight_pairs().to_vec();
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        pairs
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rules_are_exact_for_polynomials() {
        for order in [4, 8, 16, 24] {
            let rule = gauss_legendre(order);
            let deg = 2 * order - 1;
            let q: f64 = rule.iter().map(|&(x, w)| w * x.powi(deg as i32 - 1)).sum();
            let exact = 2.0 / deg as f64;
            assert!((q - exact).abs() < 1e-13, "order {order}: {q} vs {exact}");
            assert!(rule.windows(2).all(|w| w[0].0 < w[1].0));
        }
    }
}
