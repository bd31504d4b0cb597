//! The JSON form description shared with the command line.
//!
//! ```json
//! {"diag": [1, 1, 3, 3]}
//! {"gram2": [[2, 1], [1, 2]]}
//! {"blocks": ["Ahat", "A", {"diag": [1]}, {"scale": 4, "of": "A"}]}
//! ```

use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::Value;

use super::form::FormMatrix;
use crate::error::{Error, Result};

pub(crate) fn parse(value: &Value) -> Result<FormMatrix> {
    parse_at(value, "<root>")
}

fn parse_at(value: &Value, path: &str) -> Result<FormMatrix> {
    match value {
        Value::String(tok) => token(tok, path),
        Value::Object(map) => {
            let keys: Vec<&str> = map.keys().map(|k| k.as_str()).collect();
            if let Some(d) = map.get("diag") {
                only_keys(&keys, &["diag"], path)?;
                parse_diag(d, &join(path, "diag"))
            } else if let Some(g) = map.get("gram2") {
                only_keys(&keys, &["gram2"], path)?;
                parse_gram2(g, &join(path, "gram2"))
            } else if let Some(b) = map.get("blocks") {
                only_keys(&keys, &["blocks"], path)?;
                parse_blocks(b, &join(path, "blocks"))
            } else if let Some(s) = map.get("scale") {
                only_keys(&keys, &["scale", "of"], path)?;
                let of = map.get("of").ok_or_else(|| {
                    Error::description(join(path, "of"), "missing block to scale")
                })?;
                let c = parse_rational(s, &join(path, "scale"))?;
                let inner = parse_at(of, &join(path, "of"))?;
                inner
                    .scaled(&c)
                    .map_err(|e| Error::description(join(path, "scale"), e.to_string()))
            } else {
                Err(Error::description(
                    path,
                    "expected one of \"diag\", \"gram2\", \"blocks\" or \"scale\"",
                ))
            }
        }
        _ => Err(Error::description(
            path,
            "expected an object or a block name",
        )),
    }
}

fn join(path: &str, field: &str) -> String {
    if path == "<root>" {
        field.to_string()
    } else {
        format!("{path}.{field}")
    }
}

fn only_keys(keys: &[&str], allowed: &[&str], path: &str) -> Result<()> {
    match keys.iter().find(|k| !allowed.contains(k)) {
        Some(k) => Err(Error::description(join(path, k), "unexpected field")),
        None => Ok(()),
    }
}

fn token(tok: &str, path: &str) -> Result<FormMatrix> {
    match tok {
        "H" => Ok(FormMatrix::hyperbolic()),
        "A" => Ok(FormMatrix::a_plane()),
        "Hhat" => Ok(FormMatrix::hyperbolic_hat()),
        "Ahat" => Ok(FormMatrix::a_plane_hat()),
        other => Err(Error::description(
            path,
            format!("unknown block {other:?} (expected H, A, Hhat or Ahat)"),
        )),
    }
}

fn parse_blocks(value: &Value, path: &str) -> Result<FormMatrix> {
    let items = value
        .as_array()
        .ok_or_else(|| Error::description(path, "expected an array of blocks"))?;
    let mut acc: Option<FormMatrix> = None;
    for (i, item) in items.iter().enumerate() {
        let block = parse_at(item, &format!("{path}[{i}]"))?;
        acc = Some(match acc {
            None => block,
            Some(a) => a.orthogonal_sum(&block),
        });
    }
    acc.ok_or_else(|| Error::description(path, "empty block list"))
}

fn parse_diag(value: &Value, path: &str) -> Result<FormMatrix> {
    let items = value
        .as_array()
        .ok_or_else(|| Error::description(path, "expected an array"))?;
    if items.is_empty() {
        return Err(Error::description(path, "empty diagonal"));
    }
    let n = items.len();
    let mut g2 = vec![vec![BigInt::from(0); n]; n];
    for (i, item) in items.iter().enumerate() {
        let field = format!("{path}[{i}]");
        let a = parse_rational(item, &field)?;
        let doubled = a * BigRational::from_integer(BigInt::from(2));
        if !doubled.is_integer() {
            return Err(Error::description(field, "diagonal entries must lie in ½Z"));
        }
        g2[i][i] = doubled.to_integer();
    }
    FormMatrix::from_gram2(g2).map_err(|e| Error::description(path, e.to_string()))
}

fn parse_gram2(value: &Value, path: &str) -> Result<FormMatrix> {
    let rows = value
        .as_array()
        .ok_or_else(|| Error::description(path, "expected an array of rows"))?;
    let mut g2 = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let row_path = format!("{path}[{i}]");
        let cells = row
            .as_array()
            .ok_or_else(|| Error::description(&row_path, "expected an array"))?;
        let mut out = Vec::with_capacity(cells.len());
        for (j, cell) in cells.iter().enumerate() {
            out.push(parse_integer(cell, &format!("{row_path}[{j}]"))?);
        }
        g2.push(out);
    }
    FormMatrix::from_gram2(g2).map_err(|e| Error::description(path, e.to_string()))
}

fn parse_integer(value: &Value, path: &str) -> Result<BigInt> {
    let r = parse_rational(value, path)?;
    if r.is_integer() {
        Ok(r.to_integer())
    } else {
        Err(Error::description(path, "expected an integer"))
    }
}

pub(crate) fn parse_rational(value: &Value, path: &str) -> Result<BigRational> {
    match value {
        Value::Number(n) => match n.as_i64() {
            Some(v) => Ok(BigRational::from_integer(BigInt::from(v))),
            None => Err(Error::description(
                path,
                "expected an integer or a \"p/q\" string",
            )),
        },
        Value::String(s) => parse_rational_str(s).ok_or_else(|| {
            Error::description(path, format!("cannot parse {s:?} as a rational number"))
        }),
        _ => Err(Error::description(path, "expected a number")),
    }
}

/// Parses `"12"`, `"-3/4"` or `"2^-1"`.
pub(crate) fn parse_rational_str(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((base, exp)) = s.split_once('^') {
        let base: BigInt = base.trim().parse().ok()?;
        let exp: i32 = exp.trim().parse().ok()?;
        let b = BigRational::from_integer(base);
        if exp >= 0 {
            return Some(num_traits::pow(b, exp as usize));
        }
        return Some(num_traits::pow(b.recip(), (-exp) as usize));
    }
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d == BigInt::from(0) {
                return None;
            }
            Some(BigRational::new(n, d))
        }
        None => s.parse::<BigInt>().ok().map(BigRational::from_integer),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_each_shape() {
        let d = FormMatrix::from_description(r#"{"diag":[1,1,3,3]}"#).unwrap();
        assert_eq!(d, FormMatrix::diagonal(&[1, 1, 3, 3]).unwrap());
        let g = FormMatrix::from_description(r#"{"gram2":[[2,1],[1,2]]}"#).unwrap();
        assert_eq!(g, FormMatrix::a_plane_hat());
        let b = FormMatrix::from_description(r#"{"blocks":["Ahat","A"]}"#).unwrap();
        assert_eq!(
            b,
            FormMatrix::a_plane_hat().orthogonal_sum(&FormMatrix::a_plane())
        );
        let s = FormMatrix::from_description(r#"{"blocks":[{"scale":4,"of":"A"}]}"#).unwrap();
        assert_eq!(s, FormMatrix::a_plane().scaled_by_int(4));
        let h = FormMatrix::from_description(r#"{"scale":"1/2","of":"H"}"#).unwrap();
        assert_eq!(h, FormMatrix::hyperbolic_hat());
        let h = FormMatrix::from_description(r#"{"scale":"2^-1","of":"A"}"#).unwrap();
        assert_eq!(h, FormMatrix::a_plane_hat());
    }

    #[test]
    fn description_round_trip() {
        let l = FormMatrix::from_description(r#"{"blocks":["Hhat",{"diag":[2, 5]}]}"#).unwrap();
        let text = l.to_description().to_string();
        assert_eq!(FormMatrix::from_description(&text).unwrap(), l);
    }

    #[test]
    fn diagnostics_name_the_field() {
        let err = FormMatrix::from_description(r#"{"diag":[1,"x",3]}"#).unwrap_err();
        assert!(
            matches!(&err, Error::Description { field, .. } if field == "diag[1]"),
            "{err}"
        );
        let err =
            FormMatrix::from_description(r#"{"blocks":["A",{"scale":2,"off":"A"}]}"#).unwrap_err();
        assert!(
            matches!(&err, Error::Description { field, .. } if field == "blocks[1].off"),
            "{err}"
        );
        let err = FormMatrix::from_description(r#"{"blocks":["B"]}"#).unwrap_err();
        assert!(
            matches!(&err, Error::Description { field, .. } if field == "blocks[0]"),
            "{err}"
        );
        let err = FormMatrix::from_description(r#"{"gram2":[[2,2],[2,2]]}"#).unwrap_err();
        assert!(err.to_string().contains("singular"), "{err}");
        assert!(FormMatrix::from_description("{").is_err());
    }
}
