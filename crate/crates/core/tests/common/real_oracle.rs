//! Real-coordinate Bismut connection from the Koszul formula, independent of
//! the complex-frame coefficient formulas.

use lie_hermitian::{Algebra, C64};

pub struct RealStructure {
    pub dim: usize,
    /// `c[a][b][c]`: coefficient of basis vector `c` in `[x_a, x_b]`.
    pub c: Vec<Vec<Vec<f64>>>,
    /// Complex structure matrix, `J x_a = sum_b j[b][a] x_b`.
    pub j: Vec<Vec<f64>>,
}

/// Real basis `x_i = e_i + conj(e_i)`, `y_i = sqrt(-1)(e_i - conj(e_i))`,
/// ordered `x_1, y_1, x_2, y_2, ...`; orthonormal for the metric.
pub fn real_structure(a: &Algebra) -> RealStructure {
    let n = a.n();
    let dim = 2 * n;
    let table = a.bracket_table();
    // complex coordinates (e, conj e) of each real basis vector
    let coords = |r: usize| -> Vec<C64> {
        let mut v = vec![C64::new(0.0, 0.0); dim];
        let i = r / 2;
        if r % 2 == 0 {
            v[i] = C64::new(1.0, 0.0);
            v[n + i] = C64::new(1.0, 0.0);
        } else {
            v[i] = C64::new(0.0, 1.0);
            v[n + i] = C64::new(0.0, -1.0);
        }
        v
    };
    let mut c = vec![vec![vec![0.0; dim]; dim]; dim];
    for ra in 0..dim {
        for rb in 0..dim {
            let (u, w) = (coords(ra), coords(rb));
            let mut out = vec![C64::new(0.0, 0.0); dim];
            for p in 0..dim {
                for q in 0..dim {
                    let f = u[p] * w[q];
                    if f.norm() == 0.0 {
                        continue;
                    }
                    for s in 0..dim {
                        out[s] += f * table[p][q][s];
                    }
                }
            }
            // c e + conj(c) conj(e) = Re(c) x + Im(c) y
            for i in 0..n {
                c[ra][rb][2 * i] = out[i].re;
                c[ra][rb][2 * i + 1] = out[i].im;
            }
        }
    }
    let mut j = vec![vec![0.0; dim]; dim];
    for i in 0..n {
        j[2 * i + 1][2 * i] = 1.0;
        j[2 * i][2 * i + 1] = -1.0;
    }
    RealStructure { dim, c, j }
}

/// `gamma[a][b][c] = g(nabla_a x_b, x_c)` for the Bismut connection, and the
/// max-abs of `nabla J` (should vanish).
pub fn bismut(rs: &RealStructure) -> (Vec<Vec<Vec<f64>>>, f64) {
    let m = rs.dim;
    let c = &rs.c;
    let mut lc = vec![vec![vec![0.0; m]; m]; m];
    for a in 0..m {
        for b in 0..m {
            for k in 0..m {
                lc[a][b][k] = 0.5 * (c[a][b][k] - c[b][k][a] + c[k][a][b]);
            }
        }
    }
    // omega(x_a, x_b) = g(J x_a, x_b) = j[b][a]
    let omega = |a: usize, b: usize| rs.j[b][a];
    let bracket_omega = |a: usize, b: usize, k: usize| -> f64 { (0..m).map(|s| c[a][b][s] * omega(s, k)).sum() };
    let domega =
        |a: usize, b: usize, k: usize| -bracket_omega(a, b, k) + bracket_omega(a, k, b) - bracket_omega(b, k, a);
    let jv =
        |a: usize| -> Vec<(usize, f64)> { (0..m).filter(|&s| rs.j[s][a] != 0.0).map(|s| (s, rs.j[s][a])).collect() };
    let h = |a: usize, b: usize, k: usize| -> f64 {
        let mut t = 0.0;
        for (pa, fa) in jv(a) {
            for (pb, fb) in jv(b) {
                for (pk, fk) in jv(k) {
                    t += fa * fb * fk * domega(pa, pb, pk);
                }
            }
        }
        t
    };
    let mut best: Option<(Vec<Vec<Vec<f64>>>, f64)> = None;
    for sign in [1.0, -1.0] {
        let mut g = lc.clone();
        for a in 0..m {
            for b in 0..m {
                for k in 0..m {
                    g[a][b][k] += 0.5 * sign * h(a, b, k);
                }
            }
        }
        // (nabla_a J) x_b = nabla_a (J x_b) - J nabla_a x_b
        let mut res: f64 = 0.0;
        for a in 0..m {
            for b in 0..m {
                for k in 0..m {
                    let lhs: f64 = (0..m).map(|s| rs.j[s][b] * g[a][s][k]).sum();
                    let rhs: f64 = (0..m).map(|s| g[a][b][s] * rs.j[k][s]).sum();
                    res = res.max((lhs - rhs).abs());
                }
            }
        }
        if best.as_ref().map_or(true, |(_, r)| res < *r) {
            best = Some((g, res));
        }
    }
    best.expect("two candidates")
}

/// Max-abs of `nabla^b T^b` in real coordinates.
pub fn btp_residual(a: &Algebra) -> f64 {
    let rs = real_structure(a);
    let m = rs.dim;
    let (g, _) = bismut(&rs);
    // T(x_a, x_b)_k = g_ab^k - g_ba^k - c_ab^k
    let mut t = vec![vec![vec![0.0; m]; m]; m];
    for a in 0..m {
        for b in 0..m {
            for k in 0..m {
                t[a][b][k] = g[a][b][k] - g[b][a][k] - rs.c[a][b][k];
            }
        }
    }
    let mut res: f64 = 0.0;
    for x in 0..m {
        for a in 0..m {
            for b in 0..m {
                for k in 0..m {
                    let mut v: f64 = (0..m).map(|s| t[a][b][s] * g[x][s][k]).sum();
                    v -= (0..m).map(|s| g[x][a][s] * t[s][b][k]).sum::<f64>();
                    v -= (0..m).map(|s| g[x][b][s] * t[a][s][k]).sum::<f64>();
                    res = res.max(v.abs());
                }
            }
        }
    }
    res
}
