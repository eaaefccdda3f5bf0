use crate::funcspace::quad::gauss_legendre;
use crate::{Error, Result};

/// Gauss-Legendre points per cell.
pub const NODES_PER_CELL: usize = 4;

/// Composite 4-point Gauss-Legendre discretization of `[a, b]`.
///
/// Cells are uniform except where coefficient breakpoints are forced onto
/// cell edges, so every integrand is polynomial-smooth inside each cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    edges: Vec<f64>,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Grid {
    pub fn uniform(a: f64, b: f64, cells: usize) -> Result<Self> {
        Self::with_breaks(a, b, cells, &[])
    }

    /// Uniform cells on `[a, b]` with every point of `breaks` lying strictly
    /// inside `(a, b)` made a cell edge (the nearest uniform edge is moved
    /// onto it when close, otherwise the cell is split).
    pub fn with_breaks(a: f64, b: f64, cells: usize, breaks: &[f64]) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::InvalidSpec(format!("bad grid interval [{a}, {b}]")));
        }
        if cells == 0 {
            return Err(Error::InvalidSpec("grid needs at least one cell".into()));
        }
        let h = (b - a) / cells as f64;
        let mut edges: Vec<f64> = (0..=cells).map(|i| a + i as f64 * h).collect();
        edges[cells] = b;
        let mut sorted: Vec<f64> = breaks
            .iter()
            .copied()
            .filter(|&x| x > a + 1e-12 * h && x < b - 1e-12 * h)
            .collect();
        sorted.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let mut fixed = vec![false; edges.len()];
        fixed[0] = true;
        fixed[cells] = true;
        for x in sorted {
            let pos = edges.partition_point(|&v| v < x);
            let candidates = [pos.checked_sub(1), Some(pos).filter(|&p| p < edges.len())];
            let (j, dist) = candidates
                .into_iter()
                .flatten()
                .map(|j| (j, (edges[j] - x).abs()))
                .min_by(|p, q| p.1.partial_cmp(&q.1).unwrap())
                .unwrap();
            if dist <= 1e-12 * h {
                fixed[j] = true;
            } else if dist < 0.25 * h && !fixed[j] {
                edges[j] = x;
                fixed[j] = true;
            } else {
                edges.insert(pos, x);
                fixed.insert(pos, true);
            }
        }
        Ok(Self::from_edges(edges))
    }

    fn from_edges(edges: Vec<f64>) -> Self {
        let rule = gauss_legendre(NODES_PER_CELL);
        let mut nodes = Vec::with_capacity(NODES_PER_CELL * (edges.len() - 1));
        let mut weights = Vec::with_capacity(nodes.capacity());
        for w in edges.windows(2) {
            let half = 0.5 * (w[1] - w[0]);
            for &(xi, wi) in rule {
                nodes.push(w[0] + half * (xi + 1.0));
                weights.push(half * wi);
            }
        }
        Grid {
            edges,
            nodes,
            weights,
        }
    }

    /// Same cells split in half.
    pub fn refined(&self) -> Self {
        let mut edges = Vec::with_capacity(2 * self.edges.len());
        for w in self.edges.windows(2) {
            edges.push(w[0]);
            edges.push(0.5 * (w[0] + w[1]));
        }
        edges.push(self.end());
        Self::from_edges(edges)
    }

    pub fn start(&self) -> f64 {
        self.edges[0]
    }

    pub fn end(&self) -> f64 {
        *self.edges.last().unwrap()
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn cell_count(&self) -> usize {
        self.edges.len() - 1
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn cell_width(&self, cell: usize) -> f64 {
        self.edges[cell + 1] - self.edges[cell]
    }

    /// Indices of nodes inside `[a + f (b - a), b - f (b - a)]`.
    pub fn interior_nodes(&self, fraction: f64) -> Vec<usize> {
        let span = self.end() - self.start();
        let lo = self.start() + fraction * span;
        let hi = self.end() - fraction * span;
        (0..self.nodes.len())
            .filter(|&i| self.nodes[i] >= lo && self.nodes[i] <= hi)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_length() {
        let g = Grid::with_breaks(0.25, 1.0, 37, &[0.5, 0.6001]).unwrap();
        let s: f64 = g.weights().iter().sum();
        assert!((s - 0.75).abs() < 1e-12);
        assert!(g.weights().iter().all(|&w| w > 0.0));
        assert!(g.edges().contains(&0.5));
        assert!(g.edges().contains(&0.6001));
        assert!(g.nodes().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn aligned_breaks_keep_uniform_cells() {
        let g = Grid::with_breaks(0.0, 1.0, 8, &[0.5]).unwrap();
        assert_eq!(g.cell_count(), 8);
        let r = g.refined();
        assert_eq!(r.cell_count(), 16);
        assert_eq!(r.len(), 64);
    }

    #[test]
    fn integrates_smooth_functions() {
        let g = Grid::uniform(0.0, 2.0, 16).unwrap();
        let q: f64 = g
            .nodes()
            .iter()
            .zip(g.weights())
            .map(|(x, w)| w * x.exp())
            .sum();
        assert!((q - (2f64.exp() - 1.0)).abs() < 1e-13);
    }
}
