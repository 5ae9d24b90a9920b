use super::BigReal;
use rug::Float;

#[inline]
fn packed(i: usize, j: usize) -> usize {
    i * (i + 1) / 2 + j
}

/// Symmetric matrix holding a single copy of each off-diagonal pair
/// (packed lower triangle, row major).
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    dim: usize,
    data: Vec<BigReal>,
}

impl SymMatrix {
    pub fn zeros(dim: usize, bits: u32) -> Self {
        SymMatrix {
            dim,
            data: vec![Float::new(bits); dim * (dim + 1) / 2],
        }
    }

    /// Builds from `f(i, j)` evaluated for `j <= i`.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> BigReal) -> Self {
        let mut data = Vec::with_capacity(dim * (dim + 1) / 2);
        for i in 0..dim {
            for j in 0..=i {
                data.push(f(i, j));
            }
        }
        SymMatrix { dim, data }
    }

    pub fn identity(dim: usize, bits: u32) -> Self {
        Self::from_fn(dim, |i, j| Float::with_val(bits, u32::from(i == j)))
    }

    pub fn diagonal(d: &[BigReal]) -> Self {
        let bits = d.first().map(|x| x.prec()).unwrap_or(64);
        Self::from_fn(d.len(), |i, j| {
            if i == j {
                d[i].clone()
            } else {
                Float::new(bits)
            }
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn prec(&self) -> u32 {
        self.data.first().map(|x| x.prec()).unwrap_or(64)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &BigReal {
        if j <= i {
            &self.data[packed(i, j)]
        } else {
            &self.data[packed(j, i)]
        }
    }

    #[inline]
    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut BigReal {
        if j <= i {
            &mut self.data[packed(i, j)]
        } else {
            &mut self.data[packed(j, i)]
        }
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigReal) {
        *self.get_mut(i, j) = v;
    }

    /// Principal submatrix on the index set `idx`.
    pub fn submatrix(&self, idx: &[usize]) -> Self {
        Self::from_fn(idx.len(), |a, b| self.get(idx[a], idx[b]).clone())
    }

    /// `self - sigma * I`
    pub fn shifted(&self, sigma: &BigReal) -> Self {
        let mut out = self.clone();
        for i in 0..self.dim {
            *out.get_mut(i, i) -= sigma;
        }
        out
    }

    pub fn mul_vec(&self, x: &[BigReal]) -> Vec<BigReal> {
        let bits = self.prec();
        (0..self.dim)
            .map(|i| {
                let mut acc = Float::new(bits);
                for (j, xj) in x.iter().enumerate().take(self.dim) {
                    acc += self.get(i, j) * xj;
                }
                acc
            })
            .collect()
    }

    /// `xᵀ A x`
    pub fn quadratic_form(&self, x: &[BigReal]) -> BigReal {
        super::dot(x, &self.mul_vec(x))
    }

    /// `‖A‖∞` (maximum absolute row sum).
    pub fn norm_inf(&self) -> BigReal {
        let bits = self.prec();
        let mut best = Float::new(bits);
        for i in 0..self.dim {
            let mut row = Float::new(bits);
            for j in 0..self.dim {
                row += &*self.get(i, j).as_abs();
            }
            if row > best {
                best = row;
            }
        }
        best
    }
}

/// Lower triangular matrix, packed by rows.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerTriangular {
    dim: usize,
    data: Vec<BigReal>,
}

impl LowerTriangular {
    pub(crate) fn from_packed(dim: usize, data: Vec<BigReal>) -> Self {
        debug_assert_eq!(data.len(), dim * (dim + 1) / 2);
        LowerTriangular { dim, data }
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> BigReal) -> Self {
        let mut data = Vec::with_capacity(dim * (dim + 1) / 2);
        for i in 0..dim {
            for j in 0..=i {
                data.push(f(i, j));
            }
        }
        LowerTriangular { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn prec(&self) -> u32 {
        self.data.first().map(|x| x.prec()).unwrap_or(64)
    }

    /// Entry `(i, j)` for `j <= i`.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &BigReal {
        debug_assert!(j <= i);
        &self.data[packed(i, j)]
    }

    /// Row `i`, entries `0..=i`.
    #[inline]
    pub fn row(&self, i: usize) -> &[BigReal] {
        let start = packed(i, 0);
        &self.data[start..start + i + 1]
    }

    /// Leading `dim × dim` block. For Cholesky factors and their inverses
    /// this is the factor (inverse) of the leading principal submatrix.
    pub fn leading(&self, dim: usize) -> Self {
        assert!(dim <= self.dim);
        LowerTriangular {
            dim,
            data: self.data[..dim * (dim + 1) / 2].to_vec(),
        }
    }

    /// `L Lᵀ`
    pub fn gram(&self) -> SymMatrix {
        let bits = self.prec();
        SymMatrix::from_fn(self.dim, |i, j| {
            let mut acc = Float::new(bits);
            for (a, b) in self.row(i).iter().zip(self.row(j)) {
                acc += a * b;
            }
            acc
        })
    }

    pub fn mul_vec(&self, x: &[BigReal]) -> Vec<BigReal> {
        (0..self.dim).map(|i| super::dot(self.row(i), &x[..=i])).collect()
    }

    /// `L A Lᵀ` for symmetric `A`.
    pub fn congruence(&self, a: &SymMatrix) -> SymMatrix {
        let bits = self.prec();
        let n = self.dim;
        // Lower part of T = L A; entry (i, j) of the result only reads T(i, k ≤ j ≤ i).
        let t: Vec<Vec<BigReal>> = (0..n)
            .map(|i| {
                (0..=i)
                    .map(|k| {
                        let mut acc = Float::new(bits);
                        for (j, lij) in self.row(i).iter().enumerate() {
                            acc += lij * a.get(j, k);
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        SymMatrix::from_fn(n, |i, j| {
            let mut acc = Float::new(bits);
            for (k, ljk) in self.row(j).iter().enumerate() {
                acc += &t[i][k] * ljk;
            }
            acc
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_storage_is_single_copy() {
        let mut m = SymMatrix::zeros(3, 64);
        m.set(0, 2, Float::with_val(64, 5));
        assert_eq!(*m.get(2, 0), 5);
        assert_eq!(m.get(0, 2), m.get(2, 0));
        assert_eq!(m.data.len(), 6);
    }

    #[test]
    fn norms_and_products() {
        let m = SymMatrix::from_fn(2, |i, j| Float::with_val(64, (i + j + 1) as u32));
        // [[1,2],[2,3]]
        assert_eq!(m.norm_inf(), 5);
        let x = vec![Float::with_val(64, 1), Float::with_val(64, -1)];
        let y = m.mul_vec(&x);
        assert_eq!(y[0], -1);
        assert_eq!(y[1], -1);
        assert_eq!(m.quadratic_form(&x), 0);
    }
}
