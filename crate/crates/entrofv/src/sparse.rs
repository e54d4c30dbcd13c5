//! Direct sparse linear solver used by the Newton iteration: a reverse
//! Cuthill–McKee reordering computed once per sparsity pattern, followed by
//! banded Gaussian elimination with partial pivoting on each solve.
//!
//! The systems arising here are small (≲ 5·10³ unknowns) with a local,
//! structurally symmetric coupling pattern (cell adjacency or diamond
//! corners), for which a banded factorization after RCM is close to optimal
//! and entirely dependency-free.

use crate::{Error, Result};

/// Triplet (COO) accumulator for assembling a sparse matrix; duplicate
/// entries are summed on scatter.
#[derive(Debug, Clone)]
pub struct Triplets {
    pub n: usize,
    pub entries: Vec<(u32, u32, f64)>,
}

impl Triplets {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            entries: Vec::new(),
        }
    }

    #[inline]
    pub fn push(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i < self.n && j < self.n);
        self.entries.push((i as u32, j as u32, v));
    }
}

/// Reverse Cuthill–McKee ordering of an undirected adjacency structure.
/// Returns `perm` with `perm[new] = old`.
pub fn rcm_ordering(adjacency: &[Vec<usize>]) -> Vec<usize> {
    let n = adjacency.len();
    let degree: Vec<usize> = adjacency.iter().map(|a| a.len()).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    // Process every connected component, seeding each BFS at a minimum-degree
    // node (a cheap pseudo-peripheral choice, adequate for mesh graphs).
    loop {
        let start = match (0..n)
            .filter(|&i| !visited[i])
            .min_by_key(|&i| degree[i])
        {
            Some(s) => s,
            None => break,
        };
        visited[start] = true;
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            order.push(u);
            let mut nbrs: Vec<usize> = adjacency[u]
                .iter()
                .copied()
                .filter(|&v| !visited[v])
                .collect();
            nbrs.sort_by_key(|&v| degree[v]);
            for v in nbrs {
                visited[v] = true;
                queue.push_back(v);
            }
        }
    }
    order.reverse();
    order
}

/// Banded LU solver bound to a fixed sparsity pattern.
pub struct BandSolver {
    n: usize,
    /// Half bandwidth after reordering.
    band: usize,
    /// `perm[new] = old` (RCM).
    perm: Vec<usize>,
    /// `inv[old] = new`.
    inv: Vec<usize>,
}

impl BandSolver {
    /// Build from the (structurally symmetric) adjacency of the matrix,
    /// including diagonal coupling implicitly.
    pub fn from_adjacency(adjacency: &[Vec<usize>]) -> Self {
        let n = adjacency.len();
        let perm = rcm_ordering(adjacency);
        let mut inv = vec![0usize; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let mut band = 0usize;
        for (i, nbrs) in adjacency.iter().enumerate() {
            for &j in nbrs {
                band = band.max(inv[i].abs_diff(inv[j]));
            }
        }
        Self { n, band, perm, inv }
    }

    pub fn bandwidth(&self) -> usize {
        self.band
    }

    /// Solve `A x = rhs` for the matrix given in triplet form. The pattern
    /// must be contained in the adjacency this solver was built from.
    pub fn solve(&self, a: &Triplets, rhs: &[f64]) -> Result<Vec<f64>> {
        assert_eq!(a.n, self.n);
        assert_eq!(rhs.len(), self.n);
        let n = self.n;
        let b = self.band.min(n.saturating_sub(1));
        // Row i stores logical columns i-b .. i+2b (pivoting can push fill
        // up to one extra half-band to the right).
        let w = 3 * b + 1;
        let mut band = vec![0.0f64; n * w];
        for &(i, j, v) in &a.entries {
            let (r, c) = (self.inv[i as usize], self.inv[j as usize]);
            debug_assert!(r.abs_diff(c) <= b, "entry outside declared pattern");
            band[r * w + (c + b - r)] += v;
        }
        let mut y: Vec<f64> = (0..n).map(|r| rhs[self.perm[r]]).collect();

        // Elimination with partial pivoting, applied to y on the fly.
        for k in 0..n {
            let imax = (k + b).min(n - 1);
            let mut p = k;
            let mut best = 0.0f64;
            for i in k..=imax {
                let v = band[i * w + (k + b - i)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 {
                return Err(Error::SingularMatrix(k));
            }
            if p != k {
                let cmax = (k + 2 * b).min(n - 1);
                for c in k..=cmax {
                    band.swap(k * w + (c + b - k), p * w + (c + b - p));
                }
                y.swap(k, p);
            }
            let piv = band[k * w + b];
            let cmax = (k + 2 * b).min(n - 1);
            for i in (k + 1)..=imax {
                let m = band[i * w + (k + b - i)] / piv;
                if m != 0.0 {
                    for c in (k + 1)..=cmax {
                        band[i * w + (c + b - i)] -= m * band[k * w + (c + b - k)];
                    }
                    band[i * w + (k + b - i)] = 0.0;
                    y[i] -= m * y[k];
                }
            }
        }
        // Back substitution.
        for k in (0..n).rev() {
            let cmax = (k + 2 * b).min(n - 1);
            let mut s = y[k];
            for c in (k + 1)..=cmax {
                s -= band[k * w + (c + b - k)] * y[c];
            }
            y[k] = s / band[k * w + b];
        }
        // Undo the ordering.
        let mut x = vec![0.0f64; n];
        for r in 0..n {
            x[self.perm[r]] = y[r];
        }
        Ok(x)
    }
}
