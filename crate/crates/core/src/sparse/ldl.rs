//! Up-looking sparse LDL^T factorization without pivoting, for symmetric
//! positive definite or quasi-definite matrices.

use super::csr::CsrMatrix;
use crate::error::{Error, Result};

const NONE: usize = usize::MAX;

/// Elimination tree, column counts and the permuted upper-triangular layout.
#[derive(Debug, Clone)]
pub struct LdlSymbolic {
    n: usize,
    perm: Vec<usize>,
    etree: Vec<usize>,
    lp: Vec<usize>,
    ap: Vec<usize>,
    ai: Vec<usize>,
    // position in the permuted upper layout for each stored entry of the
    // source matrix (NONE for the strictly lower part)
    source_map: Vec<usize>,
}

impl LdlSymbolic {
    /// `a` must have a symmetric sparsity pattern; `perm[k]` is the row
    /// eliminated at step `k`.
    pub fn analyze(a: &CsrMatrix, perm: Vec<usize>) -> Result<Self> {
        let n = a.n_rows();
        if a.n_cols() != n || perm.len() != n {
            return Err(Error::InvalidArgument("LDL^T needs a square matrix and a full permutation".into()));
        }
        let mut pinv = vec![NONE; n];
        for (k, &p) in perm.iter().enumerate() {
            if p >= n || pinv[p] != NONE {
                return Err(Error::InvalidArgument("ordering is not a permutation".into()));
            }
            pinv[p] = k;
        }
        let mut ap = vec![0usize; n + 1];
        let mut source_map = vec![NONE; a.nnz()];
        let rp = a.row_ptr();
        let ci = a.col_idx();
        for j in 0..n {
            let o = perm[j];
            let mut cnt = 0;
            for &c in &ci[rp[o]..rp[o + 1]] {
                if pinv[c] <= j {
                    cnt += 1;
                }
            }
            ap[j + 1] = ap[j] + cnt;
        }
        let mut ai = vec![0usize; ap[n]];
        for j in 0..n {
            let o = perm[j];
            let mut next = ap[j];
            for (pos, &c) in ci.iter().enumerate().take(rp[o + 1]).skip(rp[o]) {
                let i = pinv[c];
                if i <= j {
                    ai[next] = i;
                    source_map[pos] = next;
                    next += 1;
                }
            }
        }
        // elimination tree and column counts
        let mut etree = vec![NONE; n];
        let mut lnz = vec![0usize; n];
        let mut work = vec![NONE; n];
        for j in 0..n {
            work[j] = j;
            for &row in &ai[ap[j]..ap[j + 1]] {
                let mut i = row;
                while work[i] != j {
                    if etree[i] == NONE {
                        etree[i] = j;
                    }
                    lnz[i] += 1;
                    work[i] = j;
                    i = etree[i];
                }
            }
        }
        let mut lp = vec![0usize; n + 1];
        for i in 0..n {
            lp[i + 1] = lp[i] + lnz[i];
        }
        Ok(LdlSymbolic { n, perm, etree, lp, ap, ai, source_map })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Number of strictly lower entries of `L`.
    pub fn factor_nnz(&self) -> usize {
        self.lp[self.n]
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }
}

/// Numeric factor `P A P^T = L D L^T`.
#[derive(Debug, Clone)]
pub struct LdlFactor {
    sym: LdlSymbolic,
    li: Vec<usize>,
    lx: Vec<f64>,
    d: Vec<f64>,
    // dense Schur complement of the trailing rows (partial factorizations)
    split: usize,
    schur: Vec<f64>,
}

impl LdlFactor {
    /// `min_pivot[r]` is the smallest acceptable `|D|` for original row `r`;
    /// a smaller pivot reports `SingularMatrix(r)`.
    pub fn factor(sym: LdlSymbolic, a: &CsrMatrix, min_pivot: &[f64]) -> Result<Self> {
        let n = sym.n;
        Self::partial(sym, a, n, min_pivot)
    }

    /// Eliminates only the first `split` permuted rows and keeps the dense
    /// Schur complement of the remaining ones (see [`LdlFactor::schur`]).
    pub fn partial(sym: LdlSymbolic, a: &CsrMatrix, split: usize, min_pivot: &[f64]) -> Result<Self> {
        let n = sym.n;
        let split = split.min(n);
        let t = n - split;
        let mut ax = vec![0.0; sym.ai.len()];
        for (pos, &v) in a.values().iter().enumerate() {
            let p = sym.source_map[pos];
            if p != NONE {
                ax[p] += v;
            }
        }
        let nnz = sym.lp[n];
        let mut li = vec![0usize; nnz];
        let mut lx = vec![0.0; nnz];
        let mut d = vec![0.0; n];
        let mut dinv = vec![0.0; n];
        let mut schur = vec![0.0; t * t];
        let mut y = vec![0.0; n];
        let mut used = vec![false; n];
        let mut y_idx = vec![0usize; n];
        let mut buffer = vec![0usize; n];
        let mut next_space: Vec<usize> = sym.lp[..n].to_vec();

        for k in 0..n {
            let mut n_y = 0;
            d[k] = 0.0;
            for p in sym.ap[k]..sym.ap[k + 1] {
                let b = sym.ai[p];
                if b == k {
                    d[k] += ax[p];
                    continue;
                }
                y[b] += ax[p];
                if !used[b] {
                    used[b] = true;
                    buffer[0] = b;
                    let mut n_e = 1;
                    let mut next = sym.etree[b];
                    while next != NONE && next < k {
                        if used[next] {
                            break;
                        }
                        used[next] = true;
                        buffer[n_e] = next;
                        n_e += 1;
                        next = sym.etree[next];
                    }
                    while n_e > 0 {
                        n_e -= 1;
                        y_idx[n_y] = buffer[n_e];
                        n_y += 1;
                    }
                }
            }
            for i in (0..n_y).rev() {
                let c = y_idx[i];
                let yc = y[c];
                y[c] = 0.0;
                used[c] = false;
                if c >= split {
                    // trailing column: what is left is a Schur complement entry
                    schur[(k - split) * t + (c - split)] = yc;
                    schur[(c - split) * t + (k - split)] = yc;
                    continue;
                }
                let tmp = next_space[c];
                for j in sym.lp[c]..tmp {
                    y[li[j]] -= lx[j] * yc;
                }
                li[tmp] = k;
                lx[tmp] = yc * dinv[c];
                d[k] -= yc * lx[tmp];
                next_space[c] += 1;
            }
            if k >= split {
                schur[(k - split) * (t + 1)] = d[k];
                continue;
            }
            let orig = sym.perm[k];
            if !(d[k].abs() > min_pivot[orig]) || !d[k].is_finite() {
                return Err(Error::SingularMatrix(orig));
            }
            dinv[k] = 1.0 / d[k];
        }
        d.truncate(split);
        Ok(LdlFactor { sym, li, lx, d, split, schur })
    }

    /// Number of eliminated (leading) rows.
    pub fn split(&self) -> usize {
        self.split
    }

    /// Dense, symmetric, row-major Schur complement of the trailing
    /// `dim - split` permuted rows (empty for a complete factorization).
    pub fn schur(&self) -> &[f64] {
        &self.schur
    }

    pub fn symbolic(&self) -> &LdlSymbolic {
        &self.sym
    }

    /// Number of negative pivots.
    pub fn negative_pivots(&self) -> usize {
        self.d.iter().filter(|v| **v < 0.0).count()
    }

    /// Solves with a complete factorization.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        self.solve_with(b, |_| {})
    }

    /// Solves `A x = b` where `tail` solves the Schur complement system in
    /// place (trailing permuted rows).
    pub fn solve_with(&self, b: &[f64], tail: impl FnOnce(&mut [f64])) -> Vec<f64> {
        let n = self.sym.n;
        let split = self.split;
        let mut x: Vec<f64> = (0..n).map(|k| b[self.sym.perm[k]]).collect();
        for i in 0..split {
            let xi = x[i];
            if xi != 0.0 {
                for j in self.sym.lp[i]..self.sym.lp[i + 1] {
                    x[self.li[j]] -= self.lx[j] * xi;
                }
            }
        }
        for i in 0..split {
            x[i] /= self.d[i];
        }
        tail(&mut x[split..]);
        for i in (0..split).rev() {
            let mut s = x[i];
            for j in self.sym.lp[i]..self.sym.lp[i + 1] {
                s -= self.lx[j] * x[self.li[j]];
            }
            x[i] = s;
        }
        let mut out = vec![0.0; n];
        for (k, v) in x.into_iter().enumerate() {
            out[self.sym.perm[k]] = v;
        }
        out
    }
}

/// Dense `L D L^T` without pivoting.
#[derive(Debug, Clone)]
pub struct DenseLdl {
    n: usize,
    l: Vec<f64>,
    d: Vec<f64>,
}

impl DenseLdl {
    /// Factors the row-major symmetric `a`; a pivot with `|D| <= min_pivot[i]`
    /// reports `SingularMatrix(i)` (local index).
    pub fn factor(n: usize, mut a: Vec<f64>, min_pivot: &[f64]) -> Result<Self> {
        let mut d = vec![0.0; n];
        for j in 0..n {
            let (_, rest) = a.split_at_mut(j * n);
            let row_j = &mut rest[..n];
            let mut dj = row_j[j];
            for k in 0..j {
                let ljk = row_j[k];
                dj -= ljk * ljk * d[k];
            }
            if !(dj.abs() > min_pivot[j]) || !dj.is_finite() {
                return Err(Error::SingularMatrix(j));
            }
            d[j] = dj;
            // scaled column j below the diagonal, stored in the rows
            let wj: Vec<f64> = (0..j).map(|k| row_j[k] * d[k]).collect();
            for i in j + 1..n {
                let row_i = &mut rest[(i - j) * n..(i - j + 1) * n];
                let mut v = row_i[j];
                for k in 0..j {
                    v -= row_i[k] * wj[k];
                }
                row_i[j] = v / dj;
            }
        }
        Ok(DenseLdl { n, l: a, d })
    }

    pub fn solve(&self, x: &mut [f64]) {
        let n = self.n;
        for i in 0..n {
            let row = &self.l[i * n..i * n + i];
            let s: f64 = row.iter().zip(&x[..i]).map(|(l, v)| l * v).sum();
            x[i] -= s;
        }
        for i in 0..n {
            x[i] /= self.d[i];
        }
        for i in (0..n).rev() {
            let xi = x[i];
            for k in 0..i {
                x[k] -= self.l[i * n + k] * xi;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::ordering::nested_dissection;

    fn laplacian(n: usize) -> CsrMatrix {
        let mut t = Vec::new();
        for j in 0..n {
            for i in 0..n {
                let v = i + n * j;
                t.push((v, v, 4.0 + 1e-3 * v as f64));
                if i + 1 < n {
                    t.push((v, v + 1, -1.0));
                    t.push((v + 1, v, -1.0));
                }
                if j + 1 < n {
                    t.push((v, v + n, -1.0));
                    t.push((v + n, v, -1.0));
                }
            }
        }
        CsrMatrix::from_triplets(n * n, n * n, &t)
    }

    fn adjacency(a: &CsrMatrix) -> Vec<Vec<usize>> {
        (0..a.n_rows()).map(|r| a.row(r).0.iter().copied().filter(|&c| c != r).collect()).collect()
    }

    #[test]
    fn spd_solve_with_nested_dissection() {
        let a = laplacian(30);
        let perm = nested_dissection(&adjacency(&a));
        let sym = LdlSymbolic::analyze(&a, perm).unwrap();
        let f = LdlFactor::factor(sym, &a, &vec![0.0; a.n_rows()]).unwrap();
        let x_true: Vec<f64> = (0..a.n_rows()).map(|i| (i as f64 * 0.37).sin()).collect();
        let b = a.mul_vec(&x_true);
        let x = f.solve(&b);
        let err = x.iter().zip(&x_true).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-12, "{err}");
        assert_eq!(f.negative_pivots(), 0);
    }

    #[test]
    fn quasi_definite_saddle() {
        // [K B^T; B -d] with K SPD
        let dense = vec![
            vec![4.0, 1.0, 0.0, 1.0],
            vec![1.0, 3.0, 1.0, 0.0],
            vec![0.0, 1.0, 2.0, 1.0],
            vec![1.0, 0.0, 1.0, -1e-3],
        ];
        let a = CsrMatrix::from_dense(&dense);
        for perm in [vec![0, 1, 2, 3], vec![3, 2, 1, 0], vec![1, 3, 0, 2]] {
            let f = LdlFactor::factor(LdlSymbolic::analyze(&a, perm).unwrap(), &a, &[0.0; 4]).unwrap();
            let b = vec![1.0, -2.0, 0.5, 3.0];
            let x = f.solve(&b);
            let r = a.mul_vec(&x);
            for (ri, bi) in r.iter().zip(&b) {
                assert!((ri - bi).abs() < 1e-12);
            }
            assert_eq!(f.negative_pivots(), 1);
        }
    }

    #[test]
    fn singular_matrix_is_reported() {
        let a = CsrMatrix::from_dense(&[vec![1.0, -1.0], vec![-1.0, 1.0]]);
        let sym = LdlSymbolic::analyze(&a, vec![0, 1]).unwrap();
        assert_eq!(LdlFactor::factor(sym, &a, &[1e-12, 1e-12]).unwrap_err(), Error::SingularMatrix(1));
    }

    #[test]
    fn schur_complement_solve_matches_full() {
        let a = laplacian(12);
        let n = a.n_rows();
        let mut perm = nested_dissection(&adjacency(&a));
        let tail: Vec<usize> = (n - 12..n).collect();
        perm.retain(|v| !tail.contains(v));
        perm.extend(&tail);
        let sym = LdlSymbolic::analyze(&a, perm).unwrap();
        let full = LdlFactor::factor(sym.clone(), &a, &vec![0.0; n]).unwrap();
        let part = LdlFactor::partial(sym, &a, n - 12, &vec![0.0; n]).unwrap();
        let dense = DenseLdl::factor(12, part.schur().to_vec(), &[0.0; 12]).unwrap();
        let rhs: Vec<f64> = (0..n).map(|i| (i as f64).cos()).collect();
        let x = full.solve(&rhs);
        let y = part.solve_with(&rhs, |t| dense.solve(t));
        assert!(x.iter().zip(&y).all(|(p, q)| (p - q).abs() < 1e-13));
        let s = part.schur();
        assert!((0..12).all(|i| (0..12).all(|j| s[i * 12 + j] == s[j * 12 + i])));
    }

    #[test]
    fn dense_ldl_indefinite() {
        let a = vec![4.0, 1.0, 1.0, 1.0, 3.0, 0.5, 1.0, 0.5, -2.0];
        let f = DenseLdl::factor(3, a.clone(), &[0.0; 3]).unwrap();
        let mut x = vec![1.0, 2.0, 3.0];
        f.solve(&mut x);
        for i in 0..3 {
            let r: f64 = (0..3).map(|j| a[i * 3 + j] * x[j]).sum();
            assert!((r - [1.0, 2.0, 3.0][i]).abs() < 1e-13);
        }
        assert!(matches!(DenseLdl::factor(2, vec![1.0, 1.0, 1.0, 1.0], &[1e-12; 2]), Err(Error::SingularMatrix(1))));
    }
}
