//! Placing a token sequence on hypercube vertices so that sequence neighbors
//! are cube neighbors.
//!
//! Code words are written `X^{k-1} ... X^0` and read as unsigned integers.

use serde::Serialize;

use crate::error::{NipError, Result};

const MISSING: u32 = u32::MAX;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CubeMapping {
    n: usize,
    k: u32,
    codes: Vec<u32>,
    /// Code value -> sequence index, `MISSING` for codes cut off by truncation.
    #[serde(skip)]
    index_of: Vec<u32>,
}

/// Smallest `k` with `2^k >= n`.
fn code_width(n: usize) -> u32 {
    n.next_power_of_two().trailing_zeros()
}

/// Iterative doubling: start from `(0, 1)`, then each round maps `X` to
/// `[i<<1 for i in X] ++ [(i<<1)+1 for i in reversed X]`, and finally cut to
/// the first `n` codes.
pub fn build_mapping(n: usize) -> Result<CubeMapping> {
    if n < 2 {
        return Err(NipError::TooSmall { n, min: 2 });
    }
    if n > 1 << 31 {
        return Err(NipError::IndexOutOfRange {
            index: n,
            len: 1 << 31,
        });
    }
    let mut x: Vec<u32> = vec![0, 1];
    while x.len() < n {
        let doubled = x
            .iter()
            .map(|&i| i << 1)
            .chain(x.iter().rev().map(|&i| (i << 1) + 1))
            .collect();
        x = doubled;
    }
    x.truncate(n);
    let k = code_width(n);
    let mut index_of = vec![MISSING; 1 << k];
    for (i, &c) in x.iter().enumerate() {
        index_of[c as usize] = i as u32;
    }
    Ok(CubeMapping {
        n,
        k,
        codes: x,
        index_of,
    })
}

/// Closed-form digit `X_i^d = (floor((i mod 2^{k-d+1}) / 2^{k-d}) +
/// floor((i mod 2^{k-d}) / 2^{k-d-1})) mod 2`, i.e. bit `k-d` of `i` xor bit
/// `k-d-1`.
pub fn digit(i: usize, d: u32, k: u32) -> Result<u8> {
    if k == 0 || k > 31 || d >= k {
        return Err(NipError::IndexOutOfRange {
            index: d as usize,
            len: k as usize,
        });
    }
    if i >= 1usize << k {
        return Err(NipError::IndexOutOfRange {
            index: i,
            len: 1 << k,
        });
    }
    let bit = |j: u32| (i >> j) & 1;
    Ok((bit(k - d) ^ bit(k - d - 1)) as u8)
}

/// Code of `i` assembled from [`digit`].
pub fn closed_form_code(i: usize, k: u32) -> Result<u32> {
    (0..k).try_fold(0u32, |acc, d| Ok(acc | (u32::from(digit(i, d, k)?) << d)))
}

impl CubeMapping {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn codes(&self) -> &[u32] {
        &self.codes
    }

    pub fn code(&self, i: usize) -> Result<u32> {
        self.codes
            .get(i)
            .copied()
            .ok_or(NipError::IndexOutOfRange { index: i, len: self.n })
    }

    /// `k`-character binary word, most significant digit first.
    pub fn code_binary(&self, i: usize) -> Result<String> {
        Ok(format!("{:0width$b}", self.code(i)?, width = self.k as usize))
    }

    /// Sequence index holding code value `c`, if any.
    pub fn index_of(&self, c: u32) -> Option<usize> {
        match self.index_of.get(c as usize) {
            Some(&i) if i != MISSING => Some(i as usize),
            _ => None,
        }
    }

    /// Indices whose code differs from `X_i` in exactly one digit, ascending.
    pub fn cube_neighbors(&self, i: usize) -> Result<Vec<u32>> {
        let c = self.code(i)?;
        let mut out: Vec<u32> = (0..self.k)
            .filter_map(|d| self.index_of(c ^ (1 << d)))
            .map(|j| j as u32)
            .collect();
        out.sort_unstable();
        Ok(out)
    }

    pub fn token_mask(&self) -> TokenMask {
        let rows = (0..self.n)
            .map(|i| {
                let mut row = self.cube_neighbors(i).expect("index in range");
                row.push(i as u32);
                row.sort_unstable();
                row
            })
            .collect();
        TokenMask { n: self.n, rows }
    }
}

/// Token-level relation `Hamming(X_i, X_j) <= 1`, stored as sorted rows.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TokenMask {
    n: usize,
    rows: Vec<Vec<u32>>,
}

impl TokenMask {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.rows[i]
    }

    pub fn allowed(&self, i: usize, j: usize) -> bool {
        i < self.n && j < self.n && self.rows[i].binary_search(&(j as u32)).is_ok()
    }

    pub fn count(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn to_dense(&self) -> Vec<Vec<bool>> {
        self.rows
            .iter()
            .map(|row| {
                let mut dense = vec![false; self.n];
                for &j in row {
                    dense[j as usize] = true;
                }
                dense
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_mappings() {
        assert_eq!(build_mapping(2).unwrap().codes(), &[0, 1]);
        assert_eq!(build_mapping(4).unwrap().codes(), &[0, 2, 3, 1]);
        assert_eq!(build_mapping(8).unwrap().codes(), &[0, 4, 6, 2, 3, 7, 5, 1]);
        assert_eq!(build_mapping(5).unwrap().codes(), &[0, 4, 6, 2, 3]);
        assert_eq!(build_mapping(5).unwrap().k(), 3);
        assert!(build_mapping(1).is_err());
    }

    #[test]
    fn digits() {
        for k in 1..6 {
            for d in 0..k {
                assert_eq!(digit(0, d, k).unwrap(), 0);
            }
        }
        assert_eq!(digit(3, 0, 2).unwrap(), 1);
        assert_eq!(digit(3, 1, 2).unwrap(), 0);
        assert_eq!(
            (0..3).map(|d| digit(5, d, 3).unwrap()).collect::<Vec<_>>(),
            vec![1, 1, 1]
        );
        assert!(digit(4, 0, 2).is_err());
        assert!(digit(1, 2, 2).is_err());
    }

    #[test]
    fn neighbors() {
        let m = build_mapping(8).unwrap();
        assert_eq!(m.cube_neighbors(0).unwrap(), vec![1, 3, 7]);
        assert_eq!(build_mapping(2).unwrap().cube_neighbors(0).unwrap(), vec![1]);
        assert_eq!(build_mapping(4).unwrap().cube_neighbors(1).unwrap(), vec![0, 2]);
        assert!(m.cube_neighbors(8).is_err());
        assert_eq!(m.code_binary(1).unwrap(), "100");
    }

    #[test]
    fn mask_counts() {
        assert_eq!(build_mapping(2).unwrap().token_mask().count(), 4);
        assert_eq!(build_mapping(4).unwrap().token_mask().count(), 12);
        let m8 = build_mapping(8).unwrap().token_mask();
        assert_eq!(m8.count(), 32);
        assert!(m8.allowed(0, 7) && m8.allowed(7, 0) && m8.allowed(3, 3));
        assert!(!m8.allowed(0, 2));
        assert!(!m8.allowed(0, 9));
    }
}
