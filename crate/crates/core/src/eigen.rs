//! Second-smallest eigenvector of the symmetric normalized Laplacian. Small
//! systems go through a dense solver; large ones use deflated power
//! iteration, exploiting that the bottom eigenvector is known analytically.

use nalgebra::DMatrix;

/// Above this size the dense eigendecomposition is replaced by the matrix-free
/// iterative path.
const DENSE_CUTOFF: usize = 1024;

const RESIDUAL_TOL: f64 = 1e-10;
const MAX_ITERS: usize = 400_000;

/// Weighted undirected edges (u, v, w) with the per-node degree sums.
pub(crate) struct LaplacianSystem<'a> {
    pub n: usize,
    pub edges: &'a [(usize, usize, f64)],
    pub degrees: &'a [f64],
}

impl LaplacianSystem<'_> {
    /// w = L_sym v with L_sym = I - D^{-1/2} W D^{-1/2}.
    fn apply(&self, v: &[f64], out: &mut [f64]) {
        let inv_sqrt: Vec<f64> = self
            .degrees
            .iter()
            .map(|&d| if d > 0.0 { 1.0 / d.sqrt() } else { 0.0 })
            .collect();
        out.copy_from_slice(v);
        for &(u, w, weight) in self.edges {
            let s = weight * inv_sqrt[u] * inv_sqrt[w];
            out[u] -= s * v[w];
            out[w] -= s * v[u];
        }
    }

    fn dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::identity(self.n, self.n);
        let inv_sqrt: Vec<f64> = self
            .degrees
            .iter()
            .map(|&d| if d > 0.0 { 1.0 / d.sqrt() } else { 0.0 })
            .collect();
        for &(u, w, weight) in self.edges {
            let s = weight * inv_sqrt[u] * inv_sqrt[w];
            m[(u, w)] -= s;
            m[(w, u)] -= s;
        }
        m
    }
}

/// Eigenvectors for the second-smallest eigenvalue of L_sym. When that
/// eigenvalue is numerically degenerate, every vector of the eigenspace is
/// equally "the" second eigenvector, so a small deterministic set of
/// candidates spanning the cluster is returned; callers pick whichever
/// optimizes their objective. Non-degenerate spectra yield one vector.
pub(crate) fn second_smallest_eigenvectors(system: &LaplacianSystem) -> Vec<Vec<f64>> {
    if system.n <= DENSE_CUTOFF {
        dense_second_smallest(system)
    } else {
        vec![iterative_second_smallest(system)]
    }
}

/// Eigenvalues within this relative tolerance of lambda_2 count as degenerate
/// with it.
const DEGENERACY_TOL: f64 = 1e-8;

/// At most this many eigenvectors of a degenerate cluster are considered.
const MAX_CLUSTER: usize = 4;

fn dense_second_smallest(system: &LaplacianSystem) -> Vec<Vec<f64>> {
    let m = system.dense();
    let eig = m.symmetric_eigen();
    let mut order: Vec<usize> = (0..system.n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));

    let lambda2 = eig.eigenvalues[order[1]];
    let tol = DEGENERACY_TOL * lambda2.abs().max(1.0);
    let cluster: Vec<usize> = order[1..]
        .iter()
        .copied()
        .take_while(|&i| (eig.eigenvalues[i] - lambda2).abs() <= tol)
        .take(MAX_CLUSTER)
        .collect();

    let column = |i: usize| -> Vec<f64> { eig.eigenvectors.column(i).iter().copied().collect() };
    let mut candidates: Vec<Vec<f64>> = cluster.iter().map(|&i| column(i)).collect();
    if candidates.len() > 1 {
        // Axis-aligned structure often hides in mixtures of the cluster.
        let base = candidates[0].clone();
        for k in 1..candidates.len() {
            let other = candidates[k].clone();
            let inv = 0.5f64.sqrt();
            candidates.push(base.iter().zip(&other).map(|(a, b)| (a + b) * inv).collect());
            candidates.push(base.iter().zip(&other).map(|(a, b)| (a - b) * inv).collect());
        }
    }
    candidates
}

fn iterative_second_smallest(system: &LaplacianSystem) -> Vec<f64> {
    let n = system.n;

    // The bottom eigenvector of L_sym is D^{1/2} 1, known exactly.
    let mut u0: Vec<f64> = system.degrees.iter().map(|&d| d.max(0.0).sqrt()).collect();
    normalize(&mut u0);

    // Deterministic start vector, orthogonal to u0.
    let mut v: Vec<f64> = (0..n).map(|i| ((i as f64) * 0.7390851332151607).sin()).collect();
    deflate(&mut v, &u0);
    if normalize(&mut v) < 1e-12 {
        v = (0..n).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        deflate(&mut v, &u0);
        normalize(&mut v);
    }

    // Power iteration on 2I - L_sym; the Fiedler direction dominates once u0
    // is projected out.
    let mut lv = vec![0.0; n];
    let mut next = vec![0.0; n];
    for iter in 0..MAX_ITERS {
        system.apply(&v, &mut lv);
        for i in 0..n {
            next[i] = 2.0 * v[i] - lv[i];
        }
        deflate(&mut next, &u0);
        if normalize(&mut next) < 1e-15 {
            break; // spectrum collapsed; current v is as good as it gets
        }
        std::mem::swap(&mut v, &mut next);

        if iter % 32 == 31 {
            system.apply(&v, &mut lv);
            let lambda: f64 = v.iter().zip(&lv).map(|(a, b)| a * b).sum();
            let residual: f64 = lv
                .iter()
                .zip(&v)
                .map(|(l, x)| (l - lambda * x).powi(2))
                .sum::<f64>()
                .sqrt();
            if residual <= RESIDUAL_TOL.max(1e-8 * lambda.abs()) {
                break;
            }
        }
    }
    v
}

fn deflate(v: &mut [f64], u: &[f64]) {
    let dot: f64 = v.iter().zip(u).map(|(a, b)| a * b).sum();
    for (x, y) in v.iter_mut().zip(u) {
        *x -= dot * y;
    }
}

fn normalize(v: &mut [f64]) -> f64 {
    let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        for x in v.iter_mut() {
            *x /= norm;
        }
    }
    norm
}
