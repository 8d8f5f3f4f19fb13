//! Dense tensors with every axis of size q, axis 0 varying fastest.

use num_complex::Complex64;

type C = Complex64;

#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Tensor {
    pub q: usize,
    pub rank: usize,
    pub data: Vec<C>,
    /// multiply-adds spent producing this tensor and its ancestors
    pub cost: u64,
}

impl Tensor {
    pub fn new(q: usize, rank: usize, data: Vec<C>) -> Self {
        debug_assert_eq!(data.len(), q.pow(rank as u32));
        Tensor { q, rank, data, cost: 0 }
    }

    fn stride(&self, axis: usize) -> usize {
        self.q.pow(axis as u32)
    }

    fn digit(&self, idx: usize, axis: usize) -> usize {
        (idx / self.stride(axis)) % self.q
    }

    fn derive(&self, rank: usize, data: Vec<C>, work: usize) -> Tensor {
        Tensor { q: self.q, rank, data, cost: self.cost + work as u64 }
    }

    pub fn scale(mut self, s: f64) -> Self {
        for z in &mut self.data {
            *z *= s;
        }
        self.cost += self.data.len() as u64;
        self
    }

    /// `out[.., t, ..] = sum_s in[.., s, ..] * w[s*q + t]` along `axis`.
    pub fn contract(&self, axis: usize, w: &[C]) -> Tensor {
        let q = self.q;
        let inner = self.stride(axis);
        let outer = self.data.len() / (inner * q);
        let mut out = vec![C::new(0.0, 0.0); self.data.len()];
        for o in 0..outer {
            let base = o * inner * q;
            for s in 0..q {
                let row = &w[s * q..(s + 1) * q];
                let src = &self.data[base + s * inner..base + (s + 1) * inner];
                for (t, &wst) in row.iter().enumerate() {
                    let dst = &mut out[base + t * inner..base + (t + 1) * inner];
                    for (d, &x) in dst.iter_mut().zip(src) {
                        *d += x * wst;
                    }
                }
            }
        }
        self.derive(self.rank, out, self.data.len() * q)
    }

    /// Multiply every entry by `v[x_a*q + x_c]`.
    pub fn mul_pair(&self, a: usize, c: usize, v: &[C]) -> Tensor {
        let q = self.q;
        let data = self
            .data
            .iter()
            .enumerate()
            .map(|(i, &x)| x * v[self.digit(i, a) * q + self.digit(i, c)])
            .collect();
        self.derive(self.rank, data, self.data.len())
    }

    /// Zero every entry whose digits on axes `a` and `c` differ.
    pub fn mask_equal(&self, a: usize, c: usize) -> Tensor {
        let data = self
            .data
            .iter()
            .enumerate()
            .map(|(i, &x)| if self.digit(i, a) == self.digit(i, c) { x } else { C::new(0.0, 0.0) })
            .collect();
        self.derive(self.rank, data, self.data.len())
    }

    /// New axis at position `a+1` carrying a copy of axis `a`.
    pub fn insert_copy(&self, a: usize) -> Tensor {
        let q = self.q;
        let lo = self.stride(a + 1);
        let mut out = vec![C::new(0.0, 0.0); self.data.len() * q];
        for (i, &x) in self.data.iter().enumerate() {
            let xa = self.digit(i, a);
            out[i % lo + lo * (xa + q * (i / lo))] = x;
        }
        self.derive(self.rank + 1, out, self.data.len())
    }

    /// New axis at position `pos` on which the tensor is constant.
    pub fn insert_free(&self, pos: usize) -> Tensor {
        let q = self.q;
        let lo = self.stride(pos);
        let mut out = vec![C::new(0.0, 0.0); self.data.len() * q];
        for (i, &x) in self.data.iter().enumerate() {
            for y in 0..q {
                out[i % lo + lo * (y + q * (i / lo))] = x;
            }
        }
        self.derive(self.rank + 1, out, self.data.len() * q)
    }

    /// Copy of axis 0 appended as the last axis.
    pub fn append_copy_of_first(&self) -> Tensor {
        let n = self.data.len();
        let mut out = vec![C::new(0.0, 0.0); n * self.q];
        for (i, &x) in self.data.iter().enumerate() {
            out[i + n * (i % self.q)] = x;
        }
        self.derive(self.rank + 1, out, n)
    }

    pub fn sum_axis(&self, axis: usize) -> Tensor {
        let q = self.q;
        let inner = self.stride(axis);
        let outer = self.data.len() / (inner * q);
        let mut out = vec![C::new(0.0, 0.0); inner * outer];
        for o in 0..outer {
            for s in 0..q {
                let src = &self.data[(o * q + s) * inner..(o * q + s + 1) * inner];
                for (d, &x) in out[o * inner..(o + 1) * inner].iter_mut().zip(src) {
                    *d += x;
                }
            }
        }
        self.derive(self.rank - 1, out, self.data.len())
    }

    /// Restrict to `x_a == x_c` (a < c) and drop axis `c`.
    pub fn diagonal(&self, a: usize, c: usize) -> Tensor {
        debug_assert!(a < c);
        let q = self.q;
        let lo = self.stride(c);
        let n = self.data.len() / q;
        let out = (0..n)
            .map(|i| {
                let xa = (i / self.stride(a)) % q;
                self.data[i % lo + lo * (xa + q * (i / lo))]
            })
            .collect();
        self.derive(self.rank - 1, out, n)
    }
}
