//! Test oracles that share no code with the library under test.

#![allow(dead_code)]

/// Solves `a x = b` by Gaussian elimination with partial pivoting; `None`
/// when a pivot falls below `1e-12` relative to the largest entry.
pub fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    let scale = a.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-12 * scale {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| a[i][k] * x[k]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    Some(x)
}

fn subsets(n: usize, max_size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for mask in 1u32..(1 << n) {
        if mask.count_ones() as usize <= max_size {
            out.push((0..n).filter(|i| mask & (1 << i) != 0).collect());
        }
    }
    out
}

/// Hard-margin SVM through the origin by enumerating active sets.
///
/// For every candidate support `S` with `|S| ≤ d`, solves `G α = 1` on
/// `zᵢ = yᵢxᵢ`, keeps solutions with `α ≥ 0` that satisfy every margin
/// constraint, and returns the smallest `½‖w‖²` with its `w`.
pub fn brute_force_svm(points: &[Vec<f64>], labels: &[f64]) -> Option<(f64, Vec<f64>)> {
    let d = points[0].len();
    let z: Vec<Vec<f64>> = points.iter().zip(labels).map(|(x, y)| x.iter().map(|v| y * v).collect()).collect();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for s in subsets(points.len(), d) {
        let g: Vec<Vec<f64>> = s.iter().map(|&i| s.iter().map(|&j| dot(&z[i], &z[j])).collect()).collect();
        let Some(alpha) = solve_dense(g, vec![1.0; s.len()]) else { continue };
        if alpha.iter().any(|&a| a < -1e-10) {
            continue;
        }
        let mut w = vec![0.0; d];
        for (a, &i) in alpha.iter().zip(&s) {
            for k in 0..d {
                w[k] += a * z[i][k];
            }
        }
        if z.iter().any(|zi| dot(zi, &w) < 1.0 - 1e-9) {
            continue;
        }
        let obj = 0.5 * dot(&w, &w);
        if best.as_ref().is_none_or(|(b, _)| obj < *b) {
            best = Some((obj, w));
        }
    }
    best
}
