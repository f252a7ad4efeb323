//! Dense Gaussian elimination over F_p. Matrices here are small (one degree at a time).

use crate::fp::Prime;

/// Row echelon form in place; returns pivot columns.
pub fn row_reduce(rows: &mut [Vec<u32>], p: Prime) -> Vec<usize> {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(piv) = (r..rows.len()).find(|&i| rows[i][c] != 0) else { continue };
        rows.swap(r, piv);
        let inv = p.inv(rows[r][c]);
        for v in rows[r].iter_mut() {
            *v = p.mul(*v, inv);
        }
        for i in 0..rows.len() {
            if i != r && rows[i][c] != 0 {
                let f = rows[i][c];
                for j in c..ncols {
                    let t = p.mul(f, rows[r][j]);
                    rows[i][j] = p.sub(rows[i][j], t);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(mut rows: Vec<Vec<u32>>, p: Prime) -> usize {
    row_reduce(&mut rows, p).len()
}

pub fn determinant(mut a: Vec<Vec<u32>>, p: Prime) -> u32 {
    let n = a.len();
    let mut det = 1u32;
    for c in 0..n {
        let Some(piv) = (c..n).find(|&i| a[i][c] != 0) else { return 0 };
        if piv != c {
            a.swap(c, piv);
            det = p.neg(det);
        }
        det = p.mul(det, a[c][c]);
        let inv = p.inv(a[c][c]);
        for i in c + 1..n {
            if a[i][c] != 0 {
                let f = p.mul(a[i][c], inv);
                for j in c..n {
                    let t = p.mul(f, a[c][j]);
                    a[i][j] = p.sub(a[i][j], t);
                }
            }
        }
    }
    det
}

/// Whether `v` lies in the row span of `rows`.
pub fn in_span(rows: &[Vec<u32>], v: &[u32], p: Prime) -> bool {
    let base = rank(rows.to_vec(), p);
    let mut ext = rows.to_vec();
    ext.push(v.to_vec());
    rank(ext, p) == base
}

/// Solves x·A = v for a row vector x (A given by rows); None if v is not in the span.
pub fn solve_left(rows: &[Vec<u32>], v: &[u32], p: Prime) -> Option<Vec<u32>> {
    let m = rows.len();
    let n = v.len();
    // columns of the augmented system: A^T x = v
    let mut aug: Vec<Vec<u32>> = (0..n)
        .map(|j| {
            let mut r: Vec<u32> = (0..m).map(|i| rows[i][j]).collect();
            r.push(v[j]);
            r
        })
        .collect();
    let pivots = row_reduce(&mut aug, p);
    if pivots.contains(&m) {
        return None;
    }
    let mut x = vec![0; m];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = aug[r][m];
    }
    Some(x)
}
