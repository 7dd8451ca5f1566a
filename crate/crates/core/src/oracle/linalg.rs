//! Small dense complex linear algebra for the oracles: LU determinant and
//! solve with partial pivoting, and a one-sided Jacobi SVD.

use num_complex::Complex;

use crate::dirac::{Matrix4C, Spinor4};
use crate::num::{re, Real};

/// Row-reduces `a` in place with partial pivoting, applying the same row
/// operations to `rhs`. Returns the determinant.
fn eliminate<T: Real>(a: &mut Matrix4C<T>, rhs: &mut Spinor4<T>) -> Complex<T> {
    let mut det = re(T::one());
    for col in 0..4 {
        let pivot = (col..4)
            .max_by(|&x, &y| a.e[x][col].norm().partial_cmp(&a.e[y][col].norm()).unwrap())
            .unwrap();
        if pivot != col {
            a.e.swap(pivot, col);
            rhs.c.swap(pivot, col);
            det = -det;
        }
        let p = a.e[col][col];
        det = det * p;
        if p.norm() == T::zero() {
            return re(T::zero());
        }
        for row in col + 1..4 {
            let f = a.e[row][col] / p;
            for k in col..4 {
                let sub = f * a.e[col][k];
                a.e[row][k] = a.e[row][k] - sub;
            }
            let sub = f * rhs.c[col];
            rhs.c[row] = rhs.c[row] - sub;
        }
    }
    det
}

pub fn determinant<T: Real>(m: &Matrix4C<T>) -> Complex<T> {
    let mut a = *m;
    eliminate(&mut a, &mut Spinor4::zero())
}

/// Solves `m x = b`; `None` when `m` is singular to working precision.
pub fn solve<T: Real>(m: &Matrix4C<T>, b: &Spinor4<T>) -> Option<Spinor4<T>> {
    let mut a = *m;
    let mut x = *b;
    let det = eliminate(&mut a, &mut x);
    if det.norm() <= T::epsilon() * m.max_abs().powi(4) {
        return None;
    }
    for row in (0..4).rev() {
        let mut acc = x.c[row];
        for k in row + 1..4 {
            acc = acc - a.e[row][k] * x.c[k];
        }
        x.c[row] = acc / a.e[row][row];
    }
    Some(x)
}

/// Singular values in descending order with the matching right singular
/// vectors as the columns of `v`.
#[derive(Clone, Copy, Debug)]
pub struct Svd<T> {
    pub singular_values: [T; 4],
    pub v: Matrix4C<T>,
}

impl<T: Real> Svd<T> {
    pub fn right_vector(&self, k: usize) -> Spinor4<T> {
        Spinor4::new(std::array::from_fn(|r| self.v.e[r][k]))
    }
}

fn column<T: Real>(m: &Matrix4C<T>, k: usize) -> [Complex<T>; 4] {
    std::array::from_fn(|r| m.e[r][k])
}

/// One-sided (Hestenes) Jacobi SVD. Columns of `a` are orthogonalised by
/// plane rotations; a preliminary phase makes each pair's inner product
/// real so the rotation itself is real.
pub fn jacobi_svd<T: Real>(m: &Matrix4C<T>) -> Svd<T> {
    let mut a = *m;
    let mut v = Matrix4C::<T>::identity();
    let eps = T::epsilon();

    for _sweep in 0..64 {
        let mut rotated = false;
        for p in 0..3 {
            for q in p + 1..4 {
                let (cp, cq) = (column(&a, p), column(&a, q));
                let alpha = cp.iter().fold(T::zero(), |s, z| s + z.norm_sqr());
                let beta = cq.iter().fold(T::zero(), |s, z| s + z.norm_sqr());
                let gamma = cp
                    .iter()
                    .zip(cq.iter())
                    .fold(re(T::zero()), |s, (x, y)| s + x.conj() * *y);
                let g = gamma.norm();
                if g <= eps * (alpha * beta).sqrt() || g == T::zero() {
                    continue;
                }
                rotated = true;
                let unphase = gamma.conj() / g;
                let zeta = (beta - alpha) / (T::lit(2.0) * g);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let cs = T::one() / (T::one() + t * t).sqrt();
                let sn = cs * t;
                for mat in [&mut a, &mut v] {
                    for r in 0..4 {
                        let xp = mat.e[r][p];
                        let xq = mat.e[r][q] * unphase;
                        mat.e[r][p] = xp * cs - xq * sn;
                        mat.e[r][q] = xp * sn + xq * cs;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: [T; 4] = std::array::from_fn(|k| {
        column(&a, k)
            .iter()
            .fold(T::zero(), |s, z| s + z.norm_sqr())
            .sqrt()
    });
    let mut order = [0usize, 1, 2, 3];
    order.sort_by(|&x, &y| norms[y].partial_cmp(&norms[x]).unwrap());
    let mut sorted_v = Matrix4C::zero();
    for (dst, &src) in order.iter().enumerate() {
        for r in 0..4 {
            sorted_v.e[r][dst] = v.e[r][src];
        }
    }
    Svd {
        singular_values: order.map(|k| norms[k]),
        v: sorted_v,
    }
}
