use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// Bijective index map together with its inverse.
///
/// `forward[old] = new`. Applying a permutation to a vector moves entry `i`
/// to position `forward[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Permutation {
    forward: Vec<usize>,
    inverse: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        let forward: Vec<usize> = (0..n).collect();
        Permutation { inverse: forward.clone(), forward }
    }

    /// `i -> n-1-i`.
    pub fn reversal(n: usize) -> Self {
        let forward: Vec<usize> = (0..n).rev().collect();
        Permutation { inverse: forward.clone(), forward }
    }

    /// Builds from the forward map, checking that it is a bijection.
    pub fn from_forward(forward: Vec<usize>) -> Result<Self> {
        let n = forward.len();
        let mut inverse = vec![usize::MAX; n];
        for (i, &f) in forward.iter().enumerate() {
            if f >= n || inverse[f] != usize::MAX {
                return Err(Error::invalid(format!("not a permutation: index {f} at position {i}")));
            }
            inverse[f] = i;
        }
        Ok(Permutation { forward, inverse })
    }

    /// Builds from an elimination order (`order[new] = old`).
    pub fn from_order(order: Vec<usize>) -> Result<Self> {
        let p = Self::from_forward(order)?;
        Ok(p.inverted())
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    pub fn forward(&self) -> &[usize] {
        &self.forward
    }

    pub fn inverse(&self) -> &[usize] {
        &self.inverse
    }

    pub fn is_identity(&self) -> bool {
        self.forward.iter().enumerate().all(|(i, &f)| i == f)
    }

    pub fn inverted(&self) -> Self {
        Permutation { forward: self.inverse.clone(), inverse: self.forward.clone() }
    }

    /// `self` applied after `first`.
    pub fn compose(&self, first: &Permutation) -> Result<Self> {
        if self.len() != first.len() {
            return Err(Error::LengthMismatch { expected: self.len(), found: first.len() });
        }
        Self::from_forward(first.forward.iter().map(|&i| self.forward[i]).collect())
    }

    /// `out[forward[i]] = x[i]`.
    pub fn apply<T: Copy>(&self, x: &[T]) -> Vec<T> {
        debug_assert_eq!(x.len(), self.len());
        self.inverse.iter().map(|&old| x[old]).collect()
    }

    /// `out[i] = y[forward[i]]`, undoing [`Permutation::apply`].
    pub fn apply_inverse<T: Copy>(&self, y: &[T]) -> Vec<T> {
        debug_assert_eq!(y.len(), self.len());
        self.forward.iter().map(|&new| y[new]).collect()
    }

    /// Writes the forward map as newline-delimited integers.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        for f in &self.forward {
            writeln!(w, "{f}")?;
        }
        Ok(())
    }

    /// Reads a newline-delimited forward map. Blank lines are ignored.
    pub fn read_from<R: BufRead>(r: R) -> Result<Self> {
        let mut forward = Vec::new();
        for (lineno, line) in r.lines().enumerate() {
            let line = line?;
            let t = line.trim();
            if t.is_empty() {
                continue;
            }
            let v = t.parse::<usize>().map_err(|e| Error::Parse { line: lineno + 1, message: e.to_string() })?;
            forward.push(v);
        }
        Self::from_forward(forward)
    }
}
