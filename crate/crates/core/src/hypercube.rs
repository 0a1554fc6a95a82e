//! Vertices of the hypercube `Q_n` and the elementary maps on them.
//!
//! A vertex is a bitmask together with its dimension. Coordinate `i` is bit `i`,
//! and the textual form lists coordinates left to right starting at 0, so
//! `"1010"` has `α(0) = 1` and `α(3) = 0`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Largest supported dimension.
pub const MAX_DIM: u8 = 30;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HypercubeError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(u8, u8),
    #[error("dimension {0} outside 1..={MAX_DIM}")]
    BadDimension(u32),
    #[error("bits {bits:#x} do not fit in dimension {dim}")]
    BitsOutOfRange { bits: u64, dim: u8 },
    #[error("coordinate {coord} out of range for dimension {dim}")]
    BadCoordinate { coord: usize, dim: u8 },
    #[error("projection undefined: coordinate {coord} of {vertex} is not {k}")]
    UndefinedProjection { coord: usize, k: u8, vertex: String },
    #[error("cannot parse vertex {0:?}")]
    Parse(String),
}

/// A vertex of `Q_dim`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vertex {
    bits: u32,
    dim: u8,
}

#[inline]
pub(crate) fn rho_bits(bits: u32, i: usize) -> u32 {
    let low = (1u32 << i) - 1;
    (bits & low) | ((bits >> (i + 1)) << i)
}

#[inline]
pub(crate) fn iota_bits(bits: u32, i: usize, k: u32) -> u32 {
    let low = (1u32 << i) - 1;
    (bits & low) | (k << i) | ((bits & !low) << 1)
}

#[inline]
pub(crate) fn parity_bits(bits: u32) -> i32 {
    if bits.count_ones().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

fn check_dim(dim: u32) -> Result<u8, HypercubeError> {
    if (1..=MAX_DIM as u32).contains(&dim) {
        Ok(dim as u8)
    } else {
        Err(HypercubeError::BadDimension(dim))
    }
}

impl Vertex {
    pub fn new(bits: u64, dim: u32) -> Result<Self, HypercubeError> {
        let dim = check_dim(dim)?;
        if bits >> dim != 0 {
            return Err(HypercubeError::BitsOutOfRange { bits, dim });
        }
        Ok(Vertex { bits: bits as u32, dim })
    }

    /// Caller guarantees `bits < 2^dim` and a valid dimension.
    #[inline]
    pub(crate) fn from_raw(bits: u32, dim: u8) -> Self {
        debug_assert!((1..=MAX_DIM).contains(&dim) && (bits as u64) >> dim == 0);
        Vertex { bits, dim }
    }

    /// The zero vector ε.
    pub fn zero(dim: u32) -> Result<Self, HypercubeError> {
        Vertex::new(0, dim)
    }

    /// The unit vector `e_i`.
    pub fn unit(i: usize, dim: u32) -> Result<Self, HypercubeError> {
        let d = check_dim(dim)?;
        if i >= d as usize {
            return Err(HypercubeError::BadCoordinate { coord: i, dim: d });
        }
        Ok(Vertex { bits: 1 << i, dim: d })
    }

    #[inline]
    pub fn bits(self) -> u32 {
        self.bits
    }

    #[inline]
    pub fn dim(self) -> u8 {
        self.dim
    }

    /// `α(i)`.
    #[inline]
    pub fn coord(self, i: usize) -> u8 {
        ((self.bits >> i) & 1) as u8
    }

    pub fn weight(self) -> u32 {
        self.bits.count_ones()
    }

    /// `χ(α)`: +1 for even weight, -1 for odd weight.
    #[inline]
    pub fn parity(self) -> i32 {
        parity_bits(self.bits)
    }

    pub fn xor(self, other: Vertex) -> Result<Vertex, HypercubeError> {
        same_dim(self, other)?;
        Ok(Vertex { bits: self.bits ^ other.bits, dim: self.dim })
    }

    pub fn hamming(self, other: Vertex) -> Result<u32, HypercubeError> {
        same_dim(self, other)?;
        Ok((self.bits ^ other.bits).count_ones())
    }

    /// `α ⊕ e_i`.
    #[inline]
    pub fn flip(self, i: usize) -> Vertex {
        debug_assert!(i < self.dim as usize);
        Vertex { bits: self.bits ^ (1 << i), dim: self.dim }
    }

    pub fn is_adjacent(self, other: Vertex) -> bool {
        self.dim == other.dim && (self.bits ^ other.bits).count_ones() == 1
    }

    /// The `n` neighbours, ordered by the flipped coordinate.
    pub fn neighbors(self) -> Vec<Vertex> {
        (0..self.dim as usize).map(|i| self.flip(i)).collect()
    }

    /// `ρ_{i=k}(α)`: delete coordinate `i`, which must equal `k`.
    pub fn rho(self, i: usize, k: u8) -> Result<Vertex, HypercubeError> {
        if i >= self.dim as usize || self.dim < 2 {
            return Err(HypercubeError::BadCoordinate { coord: i, dim: self.dim });
        }
        if self.coord(i) != k {
            return Err(HypercubeError::UndefinedProjection {
                coord: i,
                k,
                vertex: self.to_string(),
            });
        }
        Ok(Vertex { bits: rho_bits(self.bits, i), dim: self.dim - 1 })
    }

    /// `ι_{i=k}(α)`: insert value `k` at coordinate `i`.
    pub fn iota(self, i: usize, k: u8) -> Result<Vertex, HypercubeError> {
        if i > self.dim as usize || self.dim >= MAX_DIM {
            return Err(HypercubeError::BadCoordinate { coord: i, dim: self.dim });
        }
        Ok(Vertex { bits: iota_bits(self.bits, i, (k & 1) as u32), dim: self.dim + 1 })
    }

    /// Parse a bitstring such as `"1010"`; its length is the dimension.
    pub fn parse_bitstring(s: &str) -> Result<Vertex, HypercubeError> {
        let dim = check_dim(s.len() as u32).map_err(|_| HypercubeError::Parse(s.to_string()))?;
        let mut bits = 0u32;
        for (j, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => bits |= 1 << j,
                _ => return Err(HypercubeError::Parse(s.to_string())),
            }
        }
        Ok(Vertex { bits, dim })
    }

    /// Parse either a bitstring or, when `dim` is given, a decimal integer.
    pub fn parse_with_dim(s: &str, dim: Option<u32>) -> Result<Vertex, HypercubeError> {
        let s = s.trim();
        match dim {
            Some(d) if s.len() != d as usize || s.chars().any(|c| c != '0' && c != '1') => {
                let bits: u64 = s.parse().map_err(|_| HypercubeError::Parse(s.to_string()))?;
                Vertex::new(bits, d)
            }
            Some(d) => {
                let v = Vertex::parse_bitstring(s)?;
                debug_assert_eq!(v.dim as u32, d);
                Ok(v)
            }
            None => Vertex::parse_bitstring(s),
        }
    }
}

fn same_dim(u: Vertex, v: Vertex) -> Result<(), HypercubeError> {
    if u.dim == v.dim {
        Ok(())
    } else {
        Err(HypercubeError::DimensionMismatch(u.dim, v.dim))
    }
}

/// Every vertex of `Q_dim` in increasing bitmask order.
pub fn all_vertices(dim: u8) -> impl Iterator<Item = Vertex> {
    (0..1u32 << dim).map(move |bits| Vertex { bits, dim })
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for j in 0..self.dim as usize {
            f.write_str(if self.coord(j) == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Vertex({self})")
    }
}

impl FromStr for Vertex {
    type Err = HypercubeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Vertex::parse_bitstring(s.trim())
    }
}

impl Serialize for Vertex {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Vertex {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Vertex::parse_bitstring(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(s: &str) -> Vertex {
        s.parse().unwrap()
    }

    #[test]
    fn parity_examples() {
        assert_eq!(v("0000").parity(), 1);
        assert_eq!(v("1110").parity(), -1);
        assert_eq!(Vertex::unit(3, 5).unwrap().parity(), -1);
    }

    #[test]
    fn xor_and_hamming() {
        assert_eq!(v("1010").xor(v("0110")).unwrap(), v("1100"));
        let a = v("10110");
        assert_eq!(a.xor(Vertex::zero(5).unwrap()).unwrap(), a);
        assert_eq!(a.xor(a).unwrap(), Vertex::zero(5).unwrap());
        assert_eq!(v("0000").hamming(v("1110")).unwrap(), 3);
        assert_eq!(a.hamming(a).unwrap(), 0);
        assert!(matches!(v("10").xor(v("100")), Err(HypercubeError::DimensionMismatch(2, 3))));
        assert!(v("10").hamming(v("100")).is_err());
    }

    #[test]
    fn neighbor_lists() {
        let n = Vertex::zero(2).unwrap().neighbors();
        assert_eq!(n.iter().map(|x| x.bits()).collect::<Vec<_>>(), vec![1, 2]);
        assert_eq!(Vertex::zero(1).unwrap().neighbors(), vec![v("1")]);
    }

    #[test]
    fn rho_examples() {
        assert_eq!(v("1001").rho(1, 0).unwrap(), v("101"));
        assert_eq!(v("11").rho(0, 1).unwrap(), v("1"));
        assert!(matches!(v("1100").rho(2, 1), Err(HypercubeError::UndefinedProjection { .. })));
        assert!(v("1").rho(0, 1).is_err());
    }

    #[test]
    fn iota_examples() {
        assert_eq!(v("101").iota(1, 0).unwrap(), v("1001"));
        assert_eq!(v("0").iota(0, 1).unwrap(), v("10"));
        assert_eq!(v("01").iota(2, 1).unwrap(), v("011"));
        assert!(v("01").iota(3, 1).is_err());
    }

    #[test]
    fn parsing() {
        assert_eq!(Vertex::parse_with_dim("5", Some(4)).unwrap(), v("1010"));
        assert_eq!(Vertex::parse_with_dim("0110", Some(4)).unwrap(), v("0110"));
        assert!(Vertex::parse_with_dim("16", Some(4)).is_err());
        assert!(Vertex::parse_bitstring("01a").is_err());
        assert!(Vertex::parse_bitstring("").is_err());
        assert!(Vertex::new(0, 31).is_err());
        assert!(Vertex::new(4, 2).is_err());
        let json = serde_json::to_string(&v("0011")).unwrap();
        assert_eq!(json, "\"0011\"");
        assert_eq!(serde_json::from_str::<Vertex>(&json).unwrap(), v("0011"));
    }

    fn vertex() -> impl Strategy<Value = Vertex> {
        (1u32..=30).prop_flat_map(|d| (0u64..(1u64 << d)).prop_map(move |b| Vertex::new(b, d).unwrap()))
    }

    fn vertex_pair() -> impl Strategy<Value = (Vertex, Vertex)> {
        (1u32..=30).prop_flat_map(|d| {
            (0u64..(1u64 << d), 0u64..(1u64 << d))
                .prop_map(move |(a, b)| (Vertex::new(a, d).unwrap(), Vertex::new(b, d).unwrap()))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn rho_iota_round_trip(w in vertex(), i in any::<prop::sample::Index>(), k in 0u8..2) {
            prop_assume!(w.dim() < MAX_DIM);
            let i = i.index(w.dim() as usize + 1);
            let up = w.iota(i, k).unwrap();
            prop_assert_eq!(up.coord(i), k);
            prop_assert_eq!(up.rho(i, k).unwrap(), w);
        }

        #[test]
        fn iota_rho_round_trip(w in vertex(), i in any::<prop::sample::Index>()) {
            prop_assume!(w.dim() >= 2);
            let i = i.index(w.dim() as usize);
            let k = w.coord(i);
            prop_assert_eq!(w.rho(i, k).unwrap().iota(i, k).unwrap(), w);
        }

        #[test]
        fn parity_is_multiplicative((u, w) in vertex_pair()) {
            prop_assert_eq!(u.xor(w).unwrap().parity(), u.parity() * w.parity());
            let d = u.hamming(w).unwrap();
            prop_assert_eq!(d % 2 == 1, u.parity() != w.parity());
            prop_assert_eq!(u.parity() == 1, u.weight() % 2 == 0);
        }

        #[test]
        fn neighbors_are_distinct_and_adjacent(u in vertex()) {
            let ns = u.neighbors();
            prop_assert_eq!(ns.len(), u.dim() as usize);
            let set: std::collections::HashSet<_> = ns.iter().copied().collect();
            prop_assert_eq!(set.len(), ns.len());
            for w in ns {
                prop_assert_eq!(u.hamming(w).unwrap(), 1);
            }
        }

        #[test]
        fn bitstring_round_trip(u in vertex()) {
            prop_assert_eq!(u.to_string().parse::<Vertex>().unwrap(), u);
        }
    }

    #[test]
    fn hamming_triangle_inequality() {
        for a in all_vertices(4) {
            for b in all_vertices(4) {
                for c in all_vertices(4) {
                    let ab = a.hamming(b).unwrap();
                    assert!(ab <= a.hamming(c).unwrap() + c.hamming(b).unwrap());
                    assert_eq!(ab, b.hamming(a).unwrap());
                }
            }
        }
    }
}
