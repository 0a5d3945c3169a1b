//! Dense matrices with context-driven arithmetic, and twisted-polynomial matrices over A.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{Fe, Field};
use crate::poly::{TPoly, ThetaPoly};
use crate::scalar::Scalars;

#[derive(Clone, PartialEq, Eq)]
pub struct Mat<E> {
    rows: usize,
    cols: usize,
    data: Vec<E>,
}

impl<E: Clone> Mat<E> {
    pub fn filled(rows: usize, cols: usize, value: E) -> Self {
        Mat { rows, cols, data: vec![value; rows * cols] }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> E) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn try_from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Result<E>) -> Result<Self> {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c)?);
            }
        }
        Ok(Mat { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &E {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: E) {
        self.data[r * self.cols + c] = value;
    }

    pub fn row(&self, r: usize) -> &[E] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn map<F: Clone>(&self, f: impl FnMut(&E) -> F) -> Mat<F> {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn try_map<F: Clone>(&self, f: impl FnMut(&E) -> Result<F>) -> Result<Mat<F>> {
        Ok(Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect::<Result<_>>()? })
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &E)> {
        self.data.iter().enumerate().map(move |(k, e)| (k / self.cols, k % self.cols, e))
    }
}

impl<E: fmt::Debug> fmt::Debug for Mat<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<&[E]> = self.data.chunks(self.cols.max(1)).collect();
        f.debug_list().entries(rows).finish()
    }
}

/// Matrix arithmetic over a scalar context.
pub fn identity<S: Scalars>(s: &S, d: usize) -> Mat<S::Elem> {
    Mat::from_fn(d, d, |r, c| if r == c { s.one() } else { s.zero() })
}

pub fn embed_matrix<S: Scalars>(s: &S, m: &Mat<ThetaPoly>) -> Mat<S::Elem> {
    m.map(|p| if p.is_zero() { s.zero() } else { s.embed(p) })
}

pub fn embed_twisted_matrix<S: Scalars>(s: &S, m: &Mat<ThetaPoly>, i: u32) -> Result<Mat<S::Elem>> {
    m.try_map(|p| if p.is_zero() { Ok(s.zero()) } else { s.embed_twisted(p, i) })
}

pub fn mat_mul<S: Scalars>(s: &S, a: &Mat<S::Elem>, b: &Mat<S::Elem>) -> Result<Mat<S::Elem>> {
    if a.cols != b.rows {
        return Err(Error::Dimension(format!("{}x{} times {}x{}", a.rows, a.cols, b.rows, b.cols)));
    }
    Mat::try_from_fn(a.rows, b.cols, |r, c| {
        let mut acc = s.zero();
        for k in 0..a.cols {
            let (x, y) = (a.get(r, k), b.get(k, c));
            // Approximate zeros still carry a precision floor and must be multiplied.
            if !(s.is_exact_zero(x) || s.is_exact_zero(y)) {
                acc = s.add(&acc, &s.mul(x, y)?);
            }
        }
        Ok(acc)
    })
}

pub fn mat_add<S: Scalars>(s: &S, a: &Mat<S::Elem>, b: &Mat<S::Elem>) -> Mat<S::Elem> {
    Mat::from_fn(a.rows, a.cols, |r, c| s.add(a.get(r, c), b.get(r, c)))
}

pub fn mat_sub<S: Scalars>(s: &S, a: &Mat<S::Elem>, b: &Mat<S::Elem>) -> Mat<S::Elem> {
    Mat::from_fn(a.rows, a.cols, |r, c| s.sub(a.get(r, c), b.get(r, c)))
}

pub fn mat_twist<S: Scalars>(s: &S, a: &Mat<S::Elem>, i: u32) -> Result<Mat<S::Elem>> {
    a.try_map(|x| s.twist(x, i))
}

pub fn mat_vec<S: Scalars>(s: &S, a: &Mat<S::Elem>, x: &[S::Elem]) -> Result<Vec<S::Elem>> {
    if a.cols != x.len() {
        return Err(Error::Dimension(format!("{}x{} times vector of {}", a.rows, a.cols, x.len())));
    }
    (0..a.rows)
        .map(|r| {
            (0..a.cols).try_fold(s.zero(), |acc, k| {
                if s.is_exact_zero(a.get(r, k)) || s.is_exact_zero(&x[k]) {
                    Ok(acc)
                } else {
                    Ok(s.add(&acc, &s.mul(a.get(r, k), &x[k])?))
                }
            })
        })
        .collect()
}

/// F_q-matrix N acting on the left: (N·X)[a][b] = Σ_k N[a][k] X[k][b].
pub fn fq_left_mul<S: Scalars>(s: &S, n: &Mat<Fe>, x: &Mat<S::Elem>) -> Mat<S::Elem> {
    Mat::from_fn(n.rows, x.cols, |r, c| {
        (0..n.cols).fold(s.zero(), |acc, k| {
            let coef = *n.get(r, k);
            if coef.is_zero() {
                acc
            } else {
                s.add(&acc, &s.scale(x.get(k, c), coef))
            }
        })
    })
}

/// X·N for an F_q-matrix N.
pub fn fq_right_mul<S: Scalars>(s: &S, x: &Mat<S::Elem>, n: &Mat<Fe>) -> Mat<S::Elem> {
    Mat::from_fn(x.rows, n.cols, |r, c| {
        (0..x.cols).fold(s.zero(), |acc, k| {
            let coef = *n.get(k, c);
            if coef.is_zero() {
                acc
            } else {
                s.add(&acc, &s.scale(x.get(r, k), coef))
            }
        })
    })
}

/// Σ_i A_i τ^i with A_i over A, multiplied by (Aτ^i)(Bτ^j) = A·B^{(i)}τ^{i+j}.
#[derive(Clone, PartialEq, Eq)]
pub struct TwistedMatrix {
    field: Field,
    rows: usize,
    cols: usize,
    /// Coefficient of τ^i at index i; trailing zero matrices are dropped.
    coeffs: Vec<Mat<ThetaPoly>>,
}

impl TwistedMatrix {
    pub fn new(field: &Field, rows: usize, cols: usize, mut coeffs: Vec<Mat<ThetaPoly>>) -> Self {
        while coeffs.last().is_some_and(|m| m.data.iter().all(|p| p.is_zero())) {
            coeffs.pop();
        }
        TwistedMatrix { field: field.clone(), rows, cols, coeffs }
    }

    pub fn zero(field: &Field, rows: usize, cols: usize) -> Self {
        Self::new(field, rows, cols, Vec::new())
    }

    pub fn identity(field: &Field, d: usize) -> Self {
        Self::scalar(field, d, &ThetaPoly::one(field))
    }

    pub fn scalar(field: &Field, d: usize, c: &ThetaPoly) -> Self {
        let m = Mat::from_fn(d, d, |r, k| if r == k { c.clone() } else { ThetaPoly::zero(field) });
        Self::new(field, d, d, vec![m])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn tau_degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> Mat<ThetaPoly> {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(|| Mat::filled(self.rows, self.cols, ThetaPoly::zero(&self.field)))
    }

    pub fn coeffs(&self) -> &[Mat<ThetaPoly>] {
        &self.coeffs
    }

    /// Entry (r, c) as the list of (τ-degree, coefficient) pairs with nonzero coefficient.
    pub fn entry_terms(&self, r: usize, c: usize) -> Vec<(usize, ThetaPoly)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, m)| !m.get(r, c).is_zero())
            .map(|(i, m)| (i, m.get(r, c).clone()))
            .collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len)
            .map(|i| {
                let (a, b) = (self.coeff(i), other.coeff(i));
                Mat::from_fn(self.rows, self.cols, |r, c| a.get(r, c) + b.get(r, c))
            })
            .collect();
        Self::new(&self.field, self.rows, self.cols, coeffs)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension("twisted matrix product".into()));
        }
        let zero = ThetaPoly::zero(&self.field);
        let len = (self.coeffs.len() + other.coeffs.len()).saturating_sub(1);
        let mut out = vec![Mat::filled(self.rows, other.cols, zero.clone()); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                let bt = b.try_map(|p| p.twist(i as i64))?;
                let target = &mut out[i + j];
                for r in 0..self.rows {
                    for c in 0..other.cols {
                        let mut acc = target.get(r, c).clone();
                        for k in 0..self.cols {
                            let (x, y) = (a.get(r, k), bt.get(k, c));
                            if !x.is_zero() && !y.is_zero() {
                                acc = &acc + &(x * y);
                            }
                        }
                        target.set(r, c, acc);
                    }
                }
            }
        }
        Ok(Self::new(&self.field, self.rows, other.cols, out))
    }

    /// Σ_i A_i·x^{(i)}.
    pub fn apply(&self, x: &[ThetaPoly]) -> Result<Vec<ThetaPoly>> {
        self.apply_reduced(x, None)
    }

    /// Like [`apply`](Self::apply), reducing every entry modulo `modulus` when given.
    pub fn apply_reduced(&self, x: &[ThetaPoly], modulus: Option<&ThetaPoly>) -> Result<Vec<ThetaPoly>> {
        if x.len() != self.cols {
            return Err(Error::Dimension(format!("point of length {} for {} columns", x.len(), self.cols)));
        }
        let reduce = |p: ThetaPoly| -> Result<ThetaPoly> {
            match modulus {
                Some(m) => p.rem(m),
                None => Ok(p),
            }
        };
        let mut out = vec![ThetaPoly::zero(&self.field); self.rows];
        let mut twisted: Vec<ThetaPoly> = x.iter().map(|p| reduce(p.clone())).collect::<Result<_>>()?;
        for (i, a) in self.coeffs.iter().enumerate() {
            if i > 0 {
                twisted = match modulus {
                    // Frobenius is the q-th power map on A/(m).
                    Some(m) => twisted.iter().map(|p| p.pow_mod(self.field.q() as u128, m)).collect::<Result<_>>()?,
                    None => twisted.iter().map(|p| p.twist(1)).collect::<Result<_>>()?,
                };
            }
            for (r, slot) in out.iter_mut().enumerate() {
                for (c, xc) in twisted.iter().enumerate() {
                    let entry = a.get(r, c);
                    if !entry.is_zero() && !xc.is_zero() {
                        *slot = reduce(&*slot + &(entry * xc))?;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Horner evaluation a(M) = Σ a_k M^k for a ∈ F_q[t].
    pub fn eval_poly(&self, a: &TPoly) -> Result<Self> {
        let d = self.rows;
        let mut acc = Self::zero(&self.field, d, d);
        for &c in a.coeffs().iter().rev() {
            acc = acc.mul(self)?.add(&Self::scalar(&self.field, d, &ThetaPoly::constant(&self.field, c)));
        }
        Ok(acc)
    }
}

impl fmt::Debug for TwistedMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|c| {
                    let terms = self.entry_terms(r, c);
                    if terms.is_empty() {
                        return "0".to_string();
                    }
                    terms
                        .iter()
                        .map(|(i, p)| match i {
                            0 => format!("({p})"),
                            1 => format!("({p})τ"),
                            _ => format!("({p})τ^{i}"),
                        })
                        .collect::<Vec<_>>()
                        .join(" + ")
                })
                .collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}
