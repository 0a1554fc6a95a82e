//! JSON wire formats. Every top-level document carries `schema_version`.
//!
//! Vertices are bitstrings (`"0110"`); pair-set inputs may instead give
//! decimal integers, interpreted in dimension `n`.

use serde::{Deserialize, Serialize};

use crate::connector::Connector;
use crate::hypercube::{HypercubeError, Vertex};
use crate::pairset::{Pair, PairSet, PairSetError};

pub const SCHEMA_VERSION: u32 = 1;

fn schema_version() -> u32 {
    SCHEMA_VERSION
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum VertexRepr {
    Bits(String),
    Int(u64),
}

impl VertexRepr {
    fn resolve(&self, n: u8) -> Result<Vertex, HypercubeError> {
        let v = match self {
            VertexRepr::Bits(s) => Vertex::parse_bitstring(s)?,
            VertexRepr::Int(x) => Vertex::new(*x, n as u32)?,
        };
        if v.dim() != n {
            return Err(HypercubeError::DimensionMismatch(n, v.dim()));
        }
        Ok(v)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairSetJson {
    #[serde(default = "schema_version")]
    pub schema_version: u32,
    pub n: u8,
    pub pairs: Vec<[VertexRepr; 2]>,
}

impl From<&PairSet> for PairSetJson {
    fn from(a: &PairSet) -> Self {
        PairSetJson {
            schema_version: SCHEMA_VERSION,
            n: a.dim(),
            pairs: a
                .pairs()
                .iter()
                .map(|p| [VertexRepr::Bits(p.a().to_string()), VertexRepr::Bits(p.b().to_string())])
                .collect(),
        }
    }
}

impl TryFrom<PairSetJson> for PairSet {
    type Error = PairSetError;

    fn try_from(j: PairSetJson) -> Result<Self, Self::Error> {
        let mut pairs = Vec::with_capacity(j.pairs.len());
        for [x, y] in &j.pairs {
            pairs.push(Pair::new(x.resolve(j.n)?, y.resolve(j.n)?)?);
        }
        PairSet::new(j.n, pairs)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConnectorJson {
    #[serde(default = "schema_version")]
    pub schema_version: u32,
    pub n: u8,
    pub paths: Vec<Vec<VertexRepr>>,
}

impl From<&Connector> for ConnectorJson {
    fn from(c: &Connector) -> Self {
        ConnectorJson {
            schema_version: SCHEMA_VERSION,
            n: c.dim(),
            paths: c
                .paths()
                .into_iter()
                .map(|p| p.into_iter().map(|v| VertexRepr::Bits(v.to_string())).collect())
                .collect(),
        }
    }
}

impl TryFrom<ConnectorJson> for Connector {
    type Error = HypercubeError;

    fn try_from(j: ConnectorJson) -> Result<Self, Self::Error> {
        let paths = j
            .paths
            .iter()
            .map(|p| p.iter().map(|v| v.resolve(j.n)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        Connector::new(j.n, paths)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_set_round_trip() {
        let a = PairSet::parse(&[("0000", "1110"), ("0100", "0111")]).unwrap();
        let text = serde_json::to_string(&a).unwrap();
        assert_eq!(text, r#"{"schema_version":1,"n":4,"pairs":[["0000","1110"],["0100","0111"]]}"#);
        assert_eq!(serde_json::from_str::<PairSet>(&text).unwrap(), a);
    }

    #[test]
    fn decimal_vertices_and_missing_version() {
        let a: PairSet = serde_json::from_str(r#"{"n":4,"pairs":[[0,7],["0100","0111"]]}"#).unwrap();
        assert_eq!(a, PairSet::parse(&[("0000", "1110"), ("0100", "0111")]).unwrap());
    }

    #[test]
    fn rejects_bad_documents() {
        for bad in [
            r#"{"n":4,"pairs":[["000","1110"]]}"#,
            r#"{"n":4,"pairs":[["0000","0000"]]}"#,
            r#"{"n":4,"pairs":[["0000","1110"],["0000","0111"]]}"#,
            r#"{"n":4,"pairs":[[0,16]]}"#,
            r#"{"n":4,"pairs":[["0000"]]}"#,
            r#"{"n":4,"pairs":[],"extra":1}"#,
        ] {
            assert!(serde_json::from_str::<PairSet>(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn connector_round_trip() {
        let c = Connector::new(2, vec![vec!["00".parse().unwrap(), "10".parse().unwrap()]]).unwrap();
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(text, r#"{"schema_version":1,"n":2,"paths":[["00","10"]]}"#);
        assert_eq!(serde_json::from_str::<Connector>(&text).unwrap(), c);
    }
}
