use crate::error::{Error, Result};
use crate::sparse::{nested_dissection_blocks, CsrMatrix, DenseLdl, LdlFactor, LdlSymbolic};

/// Solution of one saddle-point system.
#[derive(Debug, Clone)]
pub struct SaddleSolution {
    pub u: Vec<f64>,
    /// One entry per multiplier row; zero for inactive rows.
    pub lambda: Vec<f64>,
    /// `|| [K B^T; B 0] x - rhs || / || rhs ||` over the active rows.
    pub residual: f64,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `[K B_A^T; B_A 0]` for a changing subset `A` of the rows of `B`.
///
/// The system is augmented to `K + rho B_A^T B_A` (same solution, positive
/// definite whenever the active rows remove the kernel of `K`); inactive
/// multipliers get the trivial equation `-lambda_K = 0`. Unknowns of nodes
/// that do not touch `B` are ordered by nested dissection and eliminated
/// once; the nodes touched by `B` and the multipliers form a small dense
/// Schur complement that is refactored for every new active set, without
/// pivoting: displacement pivots are positive, multiplier pivots are minus
/// the Schur complement of the constraints. `block` is the number of
/// consecutive unknowns per node.
pub struct SaddleSystem {
    n: usize,
    m: usize,
    k: CsrMatrix,
    b: CsrMatrix,
    bt: CsrMatrix,
    rho: f64,
    a: CsrMatrix,
    k_pos: Vec<usize>,
    sym: LdlSymbolic,
    split: usize,
    // position in the dense tail of every original row (NONE: interior)
    tail_index: Vec<usize>,
    interior: Option<LdlFactor>,
    tail: Option<(Vec<bool>, DenseLdl)>,
}

const NONE: usize = usize::MAX;

impl SaddleSystem {
    pub fn new(k: &CsrMatrix, b: &CsrMatrix, block: usize) -> Result<Self> {
        let n = k.n_rows();
        let m = b.n_rows();
        if k.n_cols() != n || (m > 0 && b.n_cols() != n) || block == 0 {
            return Err(Error::InvalidArgument("saddle system dimensions do not match".into()));
        }
        let bt = b.transpose();
        let kd = k.diagonal().iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let bd = (0..n).map(|i| bt.row(i).1.iter().map(|v| v * v).sum::<f64>()).fold(0.0f64, f64::max);
        let rho = if bd > 0.0 && kd > 0.0 { kd / bd } else { 0.0 };

        let n_blocks = n.div_ceil(block);
        let mut touched = vec![false; n_blocks];
        for i in 0..n {
            if !bt.row(i).0.is_empty() {
                touched[i / block] = true;
            }
        }
        // interior rows keep the stiffness pattern, the rest is dense anyway
        let mut rows: Vec<Vec<(usize, f64)>> = Vec::with_capacity(n + m);
        for i in 0..n {
            rows.push(k.row(i).0.iter().map(|&c| (c, 0.0)).chain(std::iter::once((i, 0.0))).collect());
        }
        for kk in 0..m {
            rows.push(vec![(n + kk, 0.0)]);
        }
        let a = CsrMatrix::from_rows(n + m, rows);
        let mut k_pos = Vec::with_capacity(k.nnz());
        for i in 0..n {
            for &c in k.row(i).0 {
                k_pos.push(a.position(i, c).expect("stiffness entry in saddle pattern"));
            }
        }

        let interior: Vec<usize> = (0..n).filter(|&i| !touched[i / block]).collect();
        let mut local = vec![NONE; n];
        for (li, &i) in interior.iter().enumerate() {
            local[i] = li;
        }
        let sub_rows = interior
            .iter()
            .map(|&i| k.row(i).0.iter().filter(|&&c| local[c] != NONE).map(|&c| (local[c], 1.0)).collect())
            .collect();
        let sub = CsrMatrix::from_rows(interior.len(), sub_rows);
        let mut compact = std::collections::HashMap::new();
        let block_ids: Vec<usize> = interior
            .iter()
            .map(|&i| {
                let next = compact.len();
                *compact.entry(i / block).or_insert(next)
            })
            .collect();
        let mut perm: Vec<usize> =
            nested_dissection_blocks(&sub, &block_ids, compact.len()).into_iter().map(|li| interior[li]).collect();
        let split = perm.len();
        perm.extend((0..n).filter(|&i| touched[i / block]));
        perm.extend(n..n + m);
        let mut tail_index = vec![NONE; n + m];
        for (j, &r) in perm[split..].iter().enumerate() {
            tail_index[r] = j;
        }
        let sym = LdlSymbolic::analyze(&a, perm)?;
        Ok(SaddleSystem {
            n,
            m,
            k: k.clone(),
            b: b.clone(),
            bt,
            rho,
            a,
            k_pos,
            sym,
            split,
            tail_index,
            interior: None,
            tail: None,
        })
    }

    /// Replaces the stiffness values (same sparsity pattern).
    pub fn set_stiffness(&mut self, k: &CsrMatrix) -> Result<()> {
        if k.n_rows() != self.n || k.nnz() != self.k.nnz() || k.col_idx() != self.k.col_idx() {
            return Err(Error::InvalidArgument("stiffness pattern changed".into()));
        }
        self.k = k.clone();
        self.interior = None;
        self.tail = None;
        Ok(())
    }

    fn singular(&self, r: usize) -> Error {
        if r < self.n {
            Error::ConstraintDeficiency
        } else {
            Error::RankDeficientActiveSet(vec![r - self.n])
        }
    }

    fn factorize(&mut self, active: &[bool]) -> Result<()> {
        let (n, m, rho) = (self.n, self.m, self.rho);
        if self.interior.is_none() {
            self.a.clear_values();
            let vals = self.a.values_mut();
            for (&p, &v) in self.k_pos.iter().zip(self.k.values()) {
                vals[p] += v;
            }
            for kk in 0..m {
                self.a.add(n + kk, n + kk, -1.0);
            }
            let min_pivot: Vec<f64> = self.a.diagonal().iter().map(|d| 1e-13 * d.abs()).collect();
            let fac = LdlFactor::partial(self.sym.clone(), &self.a, self.split, &min_pivot).map_err(|e| match e {
                Error::SingularMatrix(r) => self.singular(r),
                other => other,
            })?;
            self.interior = Some(fac);
        }
        if self.tail.as_ref().is_some_and(|(act, _)| act.as_slice() == active) {
            return Ok(());
        }
        self.tail = None;
        let fac = self.interior.as_ref().expect("interior factor");
        let t = self.sym.dim() - self.split;
        let mut s = fac.schur().to_vec();
        let mut diag: Vec<f64> = self.sym.perm()[self.split..].iter().map(|&r| if r < n { self.k.get(r, r) } else { 0.0 }).collect();
        for kk in (0..m).filter(|&kk| active[kk]) {
            let l = self.tail_index[n + kk];
            s[l * t + l] += 1.0;
            let (cols, vals) = self.b.row(kk);
            for (&i, &bi) in cols.iter().zip(vals) {
                let ti = self.tail_index[i];
                s[ti * t + l] += bi;
                s[l * t + ti] += bi;
                diag[ti] += rho * bi * bi;
                for (&j, &bj) in cols.iter().zip(vals) {
                    s[ti * t + self.tail_index[j]] += rho * bi * bj;
                }
            }
        }
        let lambda_floor = if rho > 0.0 { 1e-11 / rho } else { 0.0 };
        let perm = self.sym.perm();
        let min_pivot: Vec<f64> =
            (0..t).map(|j| if perm[self.split + j] < n { 1e-13 * diag[j].abs() } else { lambda_floor }).collect();
        let dense = DenseLdl::factor(t, s, &min_pivot).map_err(|e| match e {
            Error::SingularMatrix(j) => self.singular(perm[self.split + j]),
            other => other,
        })?;
        self.tail = Some((active.to_vec(), dense));
        Ok(())
    }

    /// Solves with the rows `active` of `B` enforced as `B_K u = g_K`.
    pub fn solve(&mut self, f: &[f64], g: &[f64], active: &[bool]) -> Result<SaddleSolution> {
        let (n, m, rho) = (self.n, self.m, self.rho);
        if f.len() != n || g.len() != m || active.len() != m {
            return Err(Error::InvalidArgument("saddle right-hand side dimensions do not match".into()));
        }
        self.factorize(active)?;
        let fac = self.interior.as_ref().expect("interior factor");
        let dense = &self.tail.as_ref().expect("tail factor").1;

        let g_act: Vec<f64> = (0..m).map(|kk| if active[kk] { g[kk] } else { 0.0 }).collect();
        let btg = self.bt.mul_vec(&g_act);
        let mut rhs: Vec<f64> = f.iter().zip(&btg).map(|(fi, bg)| fi + rho * bg).collect();
        rhs.extend_from_slice(&g_act);
        let rhs_norm = norm(&rhs);
        let scale = norm(f).hypot(norm(&g_act));
        // residuals of the augmented and of the plain system
        let residual_of = |x: &[f64]| -> (Vec<f64>, f64) {
            let (u, l) = x.split_at(n);
            let bu: Vec<f64> = self.b.mul_vec(u).iter().zip(active).map(|(v, &a)| if a { *v } else { 0.0 }).collect();
            let ku = self.k.mul_vec(u);
            let btl = self.bt.mul_vec(l);
            let btbu = self.bt.mul_vec(&bu);
            let mut aug: Vec<f64> = (0..n).map(|i| rhs[i] - ku[i] - rho * btbu[i] - btl[i]).collect();
            aug.extend((0..m).map(|j| if active[j] { g[j] - bu[j] } else { l[j] }));
            let plain = (0..n)
                .map(|i| (f[i] - ku[i] - btl[i]).powi(2))
                .chain((0..m).filter(|&j| active[j]).map(|j| (g[j] - bu[j]).powi(2)))
                .sum::<f64>()
                .sqrt();
            (aug, if scale > 0.0 { plain / scale } else { plain })
        };
        let solve = |r: &[f64]| fac.solve_with(r, |t| dense.solve(t));
        let mut x = vec![0.0; n + m];
        let mut plain_res = 0.0;
        if rhs_norm > 0.0 {
            x = solve(&rhs);
            let mut last = f64::INFINITY;
            for _ in 0..10 {
                let (r, plain) = residual_of(&x);
                plain_res = plain;
                let rn = norm(&r);
                if rn <= 1e-14 * rhs_norm || rn > 0.5 * last {
                    break;
                }
                last = rn;
                let dx = solve(&r);
                x.iter_mut().zip(&dx).for_each(|(xi, d)| *xi += d);
            }
            plain_res = plain_res.min(residual_of(&x).1);
        }
        let mut lambda = x.split_off(n);
        for (l, &a) in lambda.iter_mut().zip(active) {
            if !a {
                *l = 0.0;
            }
        }
        Ok(SaddleSolution { u: x, lambda, residual: plain_res })
    }
}

/// Solves `[K B^T; B 0] [u; lambda] = [f; g]` with every row of `B` active.
pub fn saddle_solve(k: &CsrMatrix, f: &[f64], b: &CsrMatrix, g: &[f64], block: usize) -> Result<SaddleSolution> {
    if g.len() != b.n_rows() {
        return Err(Error::InvalidArgument("saddle system dimensions do not match".into()));
    }
    SaddleSystem::new(k, b, block)?.solve(f, g, &vec![true; b.n_rows()])
}
