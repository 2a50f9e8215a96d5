//! Exact linear algebra over Q and Z on small dense matrices.

use crate::rational::{int_rat, Int, Rat};
use itertools::Itertools;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Row-major rational matrix.
pub type Mat = Vec<Vec<Rat>>;
/// Row-major integer matrix.
pub type IMat = Vec<Vec<Int>>;

pub fn zeros(rows: usize, cols: usize) -> Mat {
    vec![vec![Rat::zero(); cols]; rows]
}

pub fn identity(n: usize) -> Mat {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Rat::one();
    }
    m
}

pub fn transpose(m: &[Vec<Rat>], cols: usize) -> Mat {
    (0..cols).map(|j| m.iter().map(|r| r[j].clone()).collect()).collect()
}

pub fn mat_vec(m: &[Vec<Rat>], v: &[Rat]) -> Vec<Rat> {
    m.iter().map(|row| crate::rational::dot(row, v)).collect()
}

pub fn mat_mul(a: &[Vec<Rat>], b: &[Vec<Rat>], b_cols: usize) -> Mat {
    a.iter()
        .map(|row| {
            (0..b_cols)
                .map(|j| row.iter().zip(b).fold(Rat::zero(), |acc, (x, br)| acc + x * &br[j]))
                .collect()
        })
        .collect()
}

pub fn to_rat_mat(m: &[Vec<Int>]) -> Mat {
    m.iter().map(|r| r.iter().map(int_rat).collect()).collect()
}

/// Reduced row echelon form together with the pivot columns.
pub fn rref(m: &[Vec<Rat>], cols: usize) -> (Mat, Vec<usize>) {
    let mut a: Mat = m.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == a.len() {
            break;
        }
        let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for x in a[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..a.len() {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..cols {
                    let d = &f * &a[r][j];
                    a[i][j] -= d;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    a.truncate(r);
    (a, pivots)
}

pub fn rank(m: &[Vec<Rat>], cols: usize) -> usize {
    rref(m, cols).1.len()
}

/// Basis of `{x : m x = 0}`.
pub fn nullspace(m: &[Vec<Rat>], cols: usize) -> Vec<Vec<Rat>> {
    let (r, pivots) = rref(m, cols);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rat::zero(); cols];
            v[f] = Rat::one();
            for (row, &p) in r.iter().zip(&pivots) {
                v[p] = -row[f].clone();
            }
            v
        })
        .collect()
}

/// Some solution of `m x = b`, if one exists.
pub fn solve(m: &[Vec<Rat>], b: &[Rat], cols: usize) -> Option<Vec<Rat>> {
    let aug: Mat = m
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let (r, pivots) = rref(&aug, cols + 1);
    if pivots.last() == Some(&cols) {
        return None;
    }
    let mut x = vec![Rat::zero(); cols];
    for (row, &p) in r.iter().zip(&pivots) {
        x[p] = row[cols].clone();
    }
    Some(x)
}

pub fn det(m: &[Vec<Rat>]) -> Rat {
    let n = m.len();
    let mut a = m.to_vec();
    let mut d = Rat::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return Rat::zero();
        };
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        d *= &a[c][c];
        let inv = a[c][c].recip();
        for i in c + 1..n {
            if !a[i][c].is_zero() {
                let f = &a[i][c] * &inv;
                for j in c..n {
                    let t = &f * &a[c][j];
                    a[i][j] -= t;
                }
            }
        }
    }
    d
}

pub fn inverse(m: &[Vec<Rat>]) -> Option<Mat> {
    let n = m.len();
    let aug: Mat = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }));
            r
        })
        .collect();
    let (r, pivots) = rref(&aug, 2 * n);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(r.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Column-style integer echelon form: returns `(h, u, pivot_rows)` with `a u = h`,
/// `u` unimodular and the columns of `h` past `pivot_rows.len()` zero.
pub fn int_column_echelon(a: &[Vec<Int>], cols: usize) -> (IMat, IMat, Vec<usize>) {
    let mut h: IMat = a.to_vec();
    let mut u: IMat = (0..cols)
        .map(|i| (0..cols).map(|j| if i == j { Int::one() } else { Int::zero() }).collect())
        .collect();
    let mut pivot_rows = Vec::new();
    let mut p = 0;
    let col_op = |m: &mut IMat, dst: usize, src: usize, f: &Int| {
        for row in m.iter_mut() {
            let t = &row[src] * f;
            row[dst] -= t;
        }
    };
    let swap_cols = |m: &mut IMat, i: usize, j: usize| {
        for row in m.iter_mut() {
            row.swap(i, j);
        }
    };
    for i in 0..h.len() {
        if p == cols {
            break;
        }
        loop {
            // Column with the smallest nonzero entry in row i goes to position p.
            let best = (p..cols)
                .filter(|&j| !h[i][j].is_zero())
                .min_by(|&x, &y| h[i][x].abs().cmp(&h[i][y].abs()));
            let Some(b) = best else { break };
            swap_cols(&mut h, p, b);
            swap_cols(&mut u, p, b);
            let mut done = true;
            for j in p + 1..cols {
                if !h[i][j].is_zero() {
                    let q = h[i][j].div_floor(&h[i][p]);
                    col_op(&mut h, j, p, &q);
                    col_op(&mut u, j, p, &q);
                    if !h[i][j].is_zero() {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if !h[i][p].is_zero() {
            pivot_rows.push(i);
            p += 1;
        }
    }
    (h, u, pivot_rows)
}

/// Column-vector basis of the integer kernel `{z in Z^cols : a z = 0}`.
pub fn integer_kernel(a: &[Vec<Int>], cols: usize) -> Vec<Vec<Int>> {
    let (_, u, piv) = int_column_echelon(a, cols);
    (piv.len()..cols).map(|j| u.iter().map(|row| row[j].clone()).collect()).collect()
}

/// Integer solutions of `a z = b` as `z0 + span_Z(kernel)`.
pub fn integer_solve(a: &[Vec<Int>], b: &[Int], cols: usize) -> Option<(Vec<Int>, Vec<Vec<Int>>)> {
    let (h, u, piv) = int_column_echelon(a, cols);
    let p = piv.len();
    let mut w = vec![Int::zero(); cols];
    for k in 0..p {
        let r = piv[k];
        let mut rhs = b[r].clone();
        for j in 0..k {
            rhs -= &h[r][j] * &w[j];
        }
        if !(&rhs % &h[r][k]).is_zero() {
            return None;
        }
        w[k] = rhs / &h[r][k];
    }
    for (i, row) in h.iter().enumerate() {
        let lhs = (0..p).fold(Int::zero(), |acc, j| acc + &row[j] * &w[j]);
        if lhs != b[i] {
            return None;
        }
    }
    let z0 = u.iter().map(|row| (0..p).fold(Int::zero(), |acc, j| acc + &row[j] * &w[j])).collect();
    let kernel = (p..cols).map(|j| u.iter().map(|row| row[j].clone()).collect()).collect();
    Some((z0, kernel))
}

/// Z-basis of `span(vectors) ∩ Z^n`.
pub fn saturated_basis(vectors: &[Vec<Rat>], n: usize) -> Vec<Vec<Int>> {
    let comp = nullspace(vectors, n);
    let rows: IMat = comp.iter().map(|v| crate::rational::primitive(v)).collect();
    integer_kernel(&rows, n)
}

/// Index of the lattice generated by `gens` inside `span(gens) ∩ Z^n`: the gcd of the
/// maximal minors. Generators must be linearly independent.
pub fn lattice_index(gens: &[Vec<Int>], n: usize) -> Int {
    let r = gens.len();
    if r == 0 {
        return Int::one();
    }
    let mut g = Int::zero();
    for rows in (0..n).combinations(r) {
        let m: Mat = rows.iter().map(|&i| gens.iter().map(|v| int_rat(&v[i])).collect()).collect();
        let d = det(&m);
        g = g.gcd(d.numer());
    }
    g
}

/// Coordinates of `v` in the basis `basis` (columns), when it lies in their span.
pub fn coordinates(basis: &[Vec<Rat>], v: &[Rat]) -> Option<Vec<Rat>> {
    let n = v.len();
    let m: Mat = (0..n).map(|i| basis.iter().map(|b| b[i].clone()).collect()).collect();
    solve(&m, v, basis.len())
}

/// A left inverse `l` (r x n) of the injective n x r matrix whose columns are `basis`.
pub fn left_inverse(basis: &[Vec<Rat>], n: usize) -> Option<Mat> {
    let r = basis.len();
    let b: Mat = (0..n).map(|i| basis.iter().map(|c| c[i].clone()).collect()).collect();
    let bt = transpose(&b, r);
    let gram = mat_mul(&bt, &b, r);
    let inv = inverse(&gram)?;
    Some(mat_mul(&inv, &bt, n))
}
