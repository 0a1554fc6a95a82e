use serde::{Deserialize, Serialize};

use crate::hypercube::{HypercubeError, Vertex};

/// A family of paths, one per pair of some pair-set, stored as raw bitmasks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Connector {
    dim: u8,
    pub(crate) paths: Vec<Vec<u32>>,
}

impl Connector {
    pub fn new(dim: u8, paths: Vec<Vec<Vertex>>) -> Result<Connector, HypercubeError> {
        let mut raw = Vec::with_capacity(paths.len());
        for p in paths {
            let mut r = Vec::with_capacity(p.len());
            for v in p {
                if v.dim() != dim {
                    return Err(HypercubeError::DimensionMismatch(dim, v.dim()));
                }
                r.push(v.bits());
            }
            raw.push(r);
        }
        Ok(Connector { dim, paths: raw })
    }

    pub(crate) fn from_raw(dim: u8, paths: Vec<Vec<u32>>) -> Connector {
        Connector { dim, paths }
    }

    pub fn dim(&self) -> u8 {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn path(&self, j: usize) -> Vec<Vertex> {
        self.paths[j].iter().map(|&b| Vertex::from_raw(b, self.dim)).collect()
    }

    pub fn paths(&self) -> Vec<Vec<Vertex>> {
        (0..self.len()).map(|j| self.path(j)).collect()
    }

    pub fn raw_paths(&self) -> &[Vec<u32>] {
        &self.paths
    }

    pub fn vertex_count(&self) -> usize {
        self.paths.iter().map(Vec::len).sum()
    }
}

impl Serialize for Connector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        crate::io::ConnectorJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Connector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        crate::io::ConnectorJson::deserialize(d)?.try_into().map_err(serde::de::Error::custom)
    }
}
