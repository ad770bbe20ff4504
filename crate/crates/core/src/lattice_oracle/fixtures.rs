//! Golden oracle values for regression tests.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{correlation_brute, partition_function_brute, partition_function_transfer, trotter_error, LatticeSpec};
use crate::error::Result;

/// One exported oracle value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleRecord {
    pub spec: BTreeMap<String, f64>,
    pub quantity: String,
    pub value: f64,
    pub tolerance: f64,
}

fn spec_map(spec: &LatticeSpec) -> BTreeMap<String, f64> {
    BTreeMap::from([
        ("m".to_string(), spec.m as f64),
        ("n".to_string(), spec.n as f64),
        ("k1".to_string(), spec.k1),
        ("k2".to_string(), spec.k2),
    ])
}

/// The fixed set of oracle quantities exported as golden data.
pub fn oracle_fixtures() -> Result<Vec<OracleRecord>> {
    let mut out = Vec::new();
    for (m, n) in [(1, 1), (1, 2), (2, 1)] {
        for k in [0.1, 0.4407, 1.0] {
            let spec = LatticeSpec::new(m, n, k, k)?;
            let z = partition_function_brute(&spec)?;
            out.push(OracleRecord {
                spec: spec_map(&spec),
                quantity: "partition_function_brute".into(),
                value: z,
                tolerance: 1e-12 * z,
            });
            let zt = partition_function_transfer(&spec)?;
            out.push(OracleRecord {
                spec: spec_map(&spec),
                quantity: "partition_function_transfer".into(),
                value: zt,
                tolerance: 1e-12 * zt,
            });
        }
    }
    let spec = LatticeSpec::new(2, 2, 0.4407, 0.4407)?;
    for (label, ins) in [
        ("nn_row_correlation", vec![(0i64, 0usize), (1, 0)]),
        ("nn_column_correlation", vec![(0, 0), (0, 1)]),
        ("diagonal_correlation", vec![(-1, 0), (0, 1)]),
    ] {
        out.push(OracleRecord {
            spec: spec_map(&spec),
            quantity: label.into(),
            value: correlation_brute(&spec, &ins)?,
            tolerance: 1e-12,
        });
    }
    for n in [8, 16, 32, 64] {
        out.push(OracleRecord {
            spec: BTreeMap::from([
                ("m".to_string(), 2.0),
                ("beta".to_string(), 1.0),
                ("t1".to_string(), 1.0),
                ("t3".to_string(), 1.0),
                ("trotter_n".to_string(), n as f64),
            ]),
            quantity: "trotter_error".into(),
            value: trotter_error(2, 1.0, 1.0, 1.0, n)?,
            tolerance: 1e-10,
        });
    }
    Ok(out)
}
