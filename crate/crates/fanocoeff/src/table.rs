use anyhow::Result;
use fanocoeff_core::{d_from_b, Coefficients, Method, Rational, TripleIndex};
use serde::{Deserialize, Serialize};

/// One exported coefficient. `b` and `d` serialize as exact `p/q` strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRow {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub b: Rational,
    pub d: Rational,
    pub method: Method,
}

impl TableRow {
    pub fn compute(
        engine: &mut Coefficients,
        i: usize,
        j: usize,
        k: usize,
        method: Method,
    ) -> Result<TableRow> {
        let idx = TripleIndex::new(i, j, k)?;
        let b = engine.b(idx, method)?;
        let d = d_from_b(idx, &b);
        Ok(TableRow {
            i,
            j,
            k,
            b,
            d,
            method,
        })
    }
}

/// All rows with `1 <= i <= i_max`, `0 <= j <= j_max`, `1 <= k <= i + j`.
pub fn build_table(i_max: usize, j_max: usize, method: Method) -> Result<Vec<TableRow>> {
    build_table_with(Coefficients::new(), i_max, j_max, method)
}

pub fn build_table_with(
    mut engine: Coefficients,
    i_max: usize,
    j_max: usize,
    method: Method,
) -> Result<Vec<TableRow>> {
    engine.prepare(i_max, j_max, method);
    let mut rows = Vec::new();
    for i in 1..=i_max {
        for j in 0..=j_max {
            for k in 1..=i + j {
                rows.push(TableRow::compute(&mut engine, i, j, k, method)?);
            }
        }
    }
    Ok(rows)
}

pub fn to_csv(rows: &[TableRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

pub fn from_csv(text: &str) -> Result<Vec<TableRow>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    Ok(r.deserialize().collect::<Result<Vec<TableRow>, _>>()?)
}
