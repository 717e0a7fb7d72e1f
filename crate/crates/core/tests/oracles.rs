//! Independent dense constructions checked against the matrix-free
//! implementations on instances small enough to enumerate or factor
//! exactly.

use csrec::operators::{
    compose, materialize, make_sensing_operator, Dct2Operator, LinearOperator, SensingSpec,
};
use csrec::rng::SplitMix64;
use csrec::solvers::{omp, spgl1, SolverConfig};
use csrec::SignalVector;

// ---------------------------------------------------------------------------
// Dense helpers local to this suite. They deliberately share nothing with the
// library implementations beyond the PRNG contract.
// ---------------------------------------------------------------------------

/// Dense row-major matrix as an operator.
struct DenseOperator {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

impl DenseOperator {
    fn entry(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.cols + j]
    }
}

impl LinearOperator for DenseOperator {
    fn rows(&self) -> usize {
        self.rows
    }

    fn cols(&self) -> usize {
        self.cols
    }

    fn forward(&self, x: &[f64]) -> Vec<f64> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.entry(i, j) * x[j]).sum())
            .collect()
    }

    fn adjoint(&self, y: &[f64]) -> Vec<f64> {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self.entry(i, j) * y[i]).sum())
            .collect()
    }
}

/// Solves the symmetric positive definite system `mat x = rhs` by an
/// unpivoted Cholesky factorization. None if the matrix is not positive
/// definite.
fn cholesky_solve(mat: &[Vec<f64>], rhs: &[f64]) -> Option<Vec<f64>> {
    let n = rhs.len();
    let mut lower = vec![vec![0.0; n]; n];
    for j in 0..n {
        let mut pivot = mat[j][j];
        for k in 0..j {
            pivot -= lower[j][k] * lower[j][k];
        }
        if pivot <= 0.0 {
            return None;
        }
        lower[j][j] = pivot.sqrt();
        for i in j + 1..n {
            let mut v = mat[i][j];
            for k in 0..j {
                v -= lower[i][k] * lower[j][k];
            }
            lower[i][j] = v / lower[j][j];
        }
    }
    let mut forward = vec![0.0; n];
    for i in 0..n {
        let mut v = rhs[i];
        for k in 0..i {
            v -= lower[i][k] * forward[k];
        }
        forward[i] = v / lower[i][i];
    }
    let mut solution = vec![0.0; n];
    for i in (0..n).rev() {
        let mut v = forward[i];
        for k in i + 1..n {
            v -= lower[k][i] * solution[k];
        }
        solution[i] = v / lower[i][i];
    }
    Some(solution)
}

/// Unnormalised Sylvester-ordered Hadamard matrix of size n (power of two),
/// built by the doubling recursion rather than any butterfly network.
fn hadamard_dense(n: usize) -> Vec<Vec<i64>> {
    assert!(n.is_power_of_two());
    let mut h = vec![vec![1i64]];
    let mut size = 1;
    while size < n {
        let mut next = vec![vec![0i64; 2 * size]; 2 * size];
        for i in 0..size {
            for j in 0..size {
                next[i][j] = h[i][j];
                next[i][j + size] = h[i][j];
                next[i + size][j] = h[i][j];
                next[i + size][j + size] = -h[i][j];
            }
        }
        h = next;
        size *= 2;
    }
    h
}

fn matmul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let rows = a.len();
    let inner = b.len();
    let cols = b[0].len();
    let mut out = vec![vec![0.0; cols]; rows];
    for i in 0..rows {
        for k in 0..inner {
            let aik = a[i][k];
            if aik != 0.0 {
                for j in 0..cols {
                    out[i][j] += aik * b[k][j];
                }
            }
        }
    }
    out
}

fn max_abs_diff(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    let mut worst = 0.0f64;
    for (ra, rb) in a.iter().zip(b) {
        for (va, vb) in ra.iter().zip(rb) {
            worst = worst.max((va - vb).abs());
        }
    }
    worst
}

// ---------------------------------------------------------------------------
// Sensing ensemble vs an explicit dense reconstruction of its definition.
// ---------------------------------------------------------------------------

#[test]
fn sensing_operator_matches_independent_dense_construction() {
    let (n, m, scramble_seed, row_seed) = (16usize, 8usize, 5u64, 9u64);
    let spec = SensingSpec::new(n, m, scramble_seed, row_seed).unwrap();
    let op = make_sensing_operator(&spec);

    // Signs: one generator draw per entry, top bit picks the sign.
    let mut sign_rng = SplitMix64::new(scramble_seed);
    let signs: Vec<f64> = (0..n)
        .map(|_| if sign_rng.next_u64() >> 63 == 0 { 1.0 } else { -1.0 })
        .collect();

    // Rows: first m entries of a Fisher-Yates shuffle walking from the top
    // index down, with the bounded draw done by widening multiply.
    let mut row_rng = SplitMix64::new(row_seed);
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let draw = row_rng.next_u64();
        let j = ((draw as u128 * (i as u128 + 1)) >> 64) as usize;
        perm.swap(i, j);
    }
    let selected = &perm[..m];

    let hadamard = hadamard_dense(n);
    let scale = 1.0 / (n as f64).sqrt();
    let mut expected = vec![vec![0.0; n]; m];
    for (k, &row) in selected.iter().enumerate() {
        for j in 0..n {
            expected[k][j] = scale * hadamard[row][j] as f64 * signs[j];
        }
    }

    let got = materialize(&op);
    assert!(
        max_abs_diff(&got, &expected) <= 1e-12,
        "worst entry deviation {}",
        max_abs_diff(&got, &expected)
    );

    // The dense oracle also confirms row orthonormality exactly.
    for i in 0..m {
        for j in 0..m {
            let g: f64 = (0..n).map(|c| expected[i][c] * expected[j][c]).sum();
            let want = if i == j { 1.0 } else { 0.0 };
            assert!((g - want).abs() <= 1e-12, "gram[{i}][{j}] = {g}");
        }
    }
}

// ---------------------------------------------------------------------------
// 2-D DCT vs the explicit tensor-product matrix.
// ---------------------------------------------------------------------------

#[test]
fn dct2_matches_tensor_product_oracle() {
    let (w, h) = (4usize, 4usize);
    let op = Dct2Operator::new(w, h).unwrap();

    let basis = |n: usize, k: usize, j: usize| -> f64 {
        let c = if k == 0 {
            (1.0 / n as f64).sqrt()
        } else {
            (2.0 / n as f64).sqrt()
        };
        c * (std::f64::consts::PI * (2 * j + 1) as f64 * k as f64 / (2 * n) as f64).cos()
    };

    let mut expected = vec![vec![0.0; w * h]; w * h];
    for ky in 0..h {
        for kx in 0..w {
            for y in 0..h {
                for x in 0..w {
                    expected[ky * w + kx][y * w + x] = basis(h, ky, y) * basis(w, kx, x);
                }
            }
        }
    }
    let got = materialize(&op);
    assert!(max_abs_diff(&got, &expected) <= 1e-12);
}

// ---------------------------------------------------------------------------
// Operator composition vs the dense matrix product.
// ---------------------------------------------------------------------------

#[test]
fn composition_materializes_to_the_matrix_product() {
    let spec = SensingSpec::new(16, 8, 21, 22).unwrap();
    let sense = make_sensing_operator(&spec);
    let transform = Dct2Operator::new(4, 4).unwrap();
    let sense_dense = materialize(&sense);
    let transform_dense = materialize(&transform);
    let composed = compose(sense, transform).unwrap();
    let got = materialize(&composed);
    let expected = matmul(&sense_dense, &transform_dense);
    assert!(max_abs_diff(&got, &expected) <= 1e-12);
}

// ---------------------------------------------------------------------------
// OMP vs exhaustive support enumeration.
// ---------------------------------------------------------------------------

/// Best least-squares fit of y on the columns `support` of the dense matrix,
/// via the normal equations. None when the Gram matrix is singular.
fn dense_support_fit(
    matrix: &[Vec<f64>],
    y: &[f64],
    support: &[usize],
) -> Option<(Vec<f64>, f64)> {
    let k = support.len();
    let mut gram = vec![vec![0.0; k]; k];
    let mut rhs = vec![0.0; k];
    for a in 0..k {
        for b in 0..k {
            gram[a][b] = matrix.iter().map(|row| row[support[a]] * row[support[b]]).sum();
        }
        rhs[a] = matrix.iter().zip(y).map(|(row, &v)| row[support[a]] * v).sum();
    }
    let coeffs = cholesky_solve(&gram, &rhs)?;
    let mut residual_sq = 0.0;
    for (row, &v) in matrix.iter().zip(y) {
        let fit: f64 = support.iter().zip(&coeffs).map(|(&j, &c)| row[j] * c).sum();
        residual_sq += (v - fit) * (v - fit);
    }
    Some((coeffs, residual_sq.sqrt()))
}

#[test]
fn omp_matches_exhaustive_support_enumeration() {
    let (n, m) = (16usize, 10usize);
    let spec = SensingSpec::new(n, m, 7, 8).unwrap();
    let op = make_sensing_operator(&spec);
    let dense = materialize(&op);

    let planted = [2usize, 7, 13];
    let values = [1.0, -1.3, 0.7];
    let mut x = vec![0.0; n];
    for (&s, &v) in planted.iter().zip(&values) {
        x[s] = v;
    }
    let y = op.forward(&x);

    // Every 3-element support, fitted densely.
    let mut best: Option<(Vec<usize>, Vec<f64>, f64)> = None;
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let support = [i, j, k];
                if let Some((coeffs, residual)) = dense_support_fit(&dense, &y, &support) {
                    if best.as_ref().is_none_or(|(_, _, r)| residual < *r) {
                        best = Some((support.to_vec(), coeffs, residual));
                    }
                }
            }
        }
    }
    let (best_support, best_coeffs, best_residual) = best.unwrap();
    assert_eq!(best_support, planted, "enumeration should find the plant");
    assert!(best_residual <= 1e-10);

    let y_vec = SignalVector::new(y).unwrap();
    let report = omp(&op, &y_vec, Some(3), &SolverConfig::default()).unwrap();
    let mut omp_support: Vec<usize> = report
        .solution
        .iter()
        .enumerate()
        .filter(|(_, &v)| v != 0.0)
        .map(|(i, _)| i)
        .collect();
    omp_support.sort_unstable();
    assert_eq!(omp_support, best_support);
    for (&s, &c) in best_support.iter().zip(&best_coeffs) {
        assert!(
            (report.solution[s] - c).abs() <= 1e-10,
            "coefficient at {s}: {} vs {c}",
            report.solution[s]
        );
    }
}

// ---------------------------------------------------------------------------
// SPGL1 vs a dense interior-point oracle for the residual-constrained
// problem min ||x||_1 s.t. ||Ax - y|| <= sigma.
// ---------------------------------------------------------------------------

/// High-precision dense oracle by a log-barrier interior-point method on
/// the epigraph form: minimize sum(t) over |x_i| <= t_i inside the residual
/// ball. Newton steps on the barrier objective, path parameter multiplied
/// by 10 per round up to 1e8, which brings the duality gap around 1e-7.
fn log_barrier_bpdn(a: &DenseOperator, y: &[f64], sigma: f64) -> Vec<f64> {
    let n = a.cols();
    let m = a.rows();

    // Strictly feasible start: the minimum-norm interpolant has zero
    // residual; its pairs get slack 1.
    let mut gram = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in 0..m {
            gram[i][j] = (0..n).map(|c| a.entry(i, c) * a.entry(j, c)).sum();
        }
    }
    let multipliers = cholesky_solve(&gram, y).expect("sensing rows are independent");
    let mut x = a.adjoint(&multipliers);
    let mut t: Vec<f64> = x.iter().map(|v| v.abs() + 1.0).collect();

    let feasible = |x: &[f64], t: &[f64]| -> bool {
        let r = {
            let mut r = a.forward(x);
            for (rv, yv) in r.iter_mut().zip(y) {
                *rv -= yv;
            }
            r
        };
        let ball = sigma * sigma - r.iter().map(|v| v * v).sum::<f64>();
        // tv > |xv|, not merely tv^2 > xv^2: the barrier is also finite on
        // the negative-t branch, where the objective is unbounded below.
        ball > 0.0 && x.iter().zip(t).all(|(xv, tv)| *tv > xv.abs())
    };
    assert!(feasible(&x, &t));

    let barrier = |c: f64, x: &[f64], t: &[f64]| -> f64 {
        let mut value = c * t.iter().sum::<f64>();
        for (xv, tv) in x.iter().zip(t) {
            value -= (tv * tv - xv * xv).ln();
        }
        let mut r = a.forward(x);
        for (rv, yv) in r.iter_mut().zip(y) {
            *rv -= yv;
        }
        value -= (sigma * sigma - r.iter().map(|v| v * v).sum::<f64>()).ln();
        value
    };

    let mut c = 1.0;
    while c <= 1e8 {
        for _ in 0..60 {
            // Gradient and Hessian of the barrier objective at (x, t).
            let mut r = a.forward(&x);
            for (rv, yv) in r.iter_mut().zip(y) {
                *rv -= yv;
            }
            let slack = sigma * sigma - r.iter().map(|v| v * v).sum::<f64>();
            let at_r = a.adjoint(&r);
            let dim = 2 * n;
            let mut grad = vec![0.0; dim];
            let mut hess = vec![vec![0.0; dim]; dim];
            for i in 0..n {
                let d = t[i] * t[i] - x[i] * x[i];
                grad[i] = 2.0 * x[i] / d + 2.0 * at_r[i] / slack;
                grad[n + i] = c - 2.0 * t[i] / d;
                hess[i][i] += 2.0 / d + 4.0 * x[i] * x[i] / (d * d);
                hess[n + i][n + i] += -2.0 / d + 4.0 * t[i] * t[i] / (d * d);
                hess[i][n + i] += -4.0 * x[i] * t[i] / (d * d);
                hess[n + i][i] += -4.0 * x[i] * t[i] / (d * d);
            }
            for i in 0..n {
                for j in 0..n {
                    let mut ata = 0.0;
                    for row in 0..m {
                        ata += a.entry(row, i) * a.entry(row, j);
                    }
                    hess[i][j] += 2.0 * ata / slack + 4.0 * at_r[i] * at_r[j] / (slack * slack);
                }
            }
            let neg_grad: Vec<f64> = grad.iter().map(|g| -g).collect();
            // The Hessian is PD in exact arithmetic but close to singular
            // near the end of the path; retry with growing ridge terms.
            let mut ridge = 0.0f64;
            let step = loop {
                let mut damped = hess.clone();
                if ridge > 0.0 {
                    for (i, row) in damped.iter_mut().enumerate() {
                        row[i] += ridge * (1.0 + hess[i][i].abs());
                    }
                }
                match cholesky_solve(&damped, &neg_grad) {
                    Some(s) => break s,
                    None => {
                        ridge = if ridge == 0.0 { 1e-14 } else { ridge * 100.0 };
                        assert!(ridge <= 1e-2, "barrier Hessian unusable");
                    }
                }
            };
            let decrement: f64 = step.iter().zip(&grad).map(|(s, g)| -s * g).sum();
            if decrement <= 1e-18 {
                break;
            }
            // Backtrack to strict feasibility plus plain decrease.
            let value = barrier(c, &x, &t);
            let mut scale = 1.0;
            for _ in 0..80 {
                let cand_x: Vec<f64> =
                    x.iter().zip(&step[..n]).map(|(v, s)| v + scale * s).collect();
                let cand_t: Vec<f64> = t
                    .iter()
                    .zip(&step[n..])
                    .map(|(v, s)| v + scale * s)
                    .collect();
                if feasible(&cand_x, &cand_t) && barrier(c, &cand_x, &cand_t) <= value {
                    x = cand_x;
                    t = cand_t;
                    break;
                }
                scale *= 0.5;
            }
        }
        c *= 10.0;
    }
    x
}

#[test]
fn spgl1_objective_matches_dense_interior_point_oracle() {
    let (n, m) = (12usize, 8usize);
    let mut rng = SplitMix64::new(2024);
    let entries: Vec<f64> = (0..n * m)
        .map(|_| rng.next_gaussian() / (m as f64).sqrt())
        .collect();
    let a = DenseOperator {
        rows: m,
        cols: n,
        entries,
    };
    let mut x_true = vec![0.0; n];
    x_true[2] = 1.0;
    x_true[9] = -0.7;
    let mut y = a.forward(&x_true);
    let noise: Vec<f64> = (0..m).map(|_| rng.next_gaussian()).collect();
    let noise_norm = noise.iter().map(|v| v * v).sum::<f64>().sqrt();
    for (yv, nv) in y.iter_mut().zip(&noise) {
        *yv += 0.05 * nv / noise_norm;
    }
    let sigma = 0.1;

    let oracle = log_barrier_bpdn(&a, &y, sigma);
    let oracle_objective: f64 = oracle.iter().map(|v| v.abs()).sum();

    let mut cfg = SolverConfig::default();
    cfg.sigma = sigma;
    let y_vec = SignalVector::new(y.clone()).unwrap();
    let report = spgl1(&a, &y_vec, &cfg).unwrap();
    assert!(report.converged, "stop {:?}", report.stop_reason);
    let objective: f64 = report.solution.iter().map(|v| v.abs()).sum();

    let rel = (objective - oracle_objective).abs() / oracle_objective.max(1.0);
    assert!(
        rel <= 1e-4,
        "objective {objective} vs oracle {oracle_objective} (rel {rel})"
    );
    // Both solutions must sit on the residual ball boundary.
    let residual: f64 = {
        let r = a.forward(&report.solution);
        r.iter()
            .zip(&y)
            .map(|(rv, yv)| (rv - yv) * (rv - yv))
            .sum::<f64>()
            .sqrt()
    };
    assert!((residual - sigma).abs() <= 1e-4);
}
