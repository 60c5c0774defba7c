use std::io::{BufRead, Write};

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::RcLabel;
use crate::error::{Error, Result};
use crate::graph::EntityId;

pub const DEFAULT_MAX_SEQ_LEN: usize = 300;

/// One drug pair in one sentence. Row 0 of `hidden` is the sequence-start
/// token; spans are inclusive token ranges that never include row 0.
#[derive(Debug, Clone, PartialEq)]
pub struct RcInstance {
    pub id: String,
    pub hidden: Array2<f64>,
    pub span1: (usize, usize),
    pub span2: (usize, usize),
    pub drug1: Option<EntityId>,
    pub drug2: Option<EntityId>,
    pub mention1: String,
    pub mention2: String,
    pub label: Option<RcLabel>,
}

impl RcInstance {
    pub fn seq_len(&self) -> usize {
        self.hidden.nrows()
    }

    pub fn dim(&self) -> usize {
        self.hidden.ncols()
    }

    pub fn validate(&self, max_seq_len: usize) -> Result<()> {
        let t = self.seq_len();
        if t == 0 || t > max_seq_len {
            return Err(Error::Validation(format!(
                "instance {}: sequence length {t} outside 1..={max_seq_len}",
                self.id
            )));
        }
        for (name, (a, b)) in [("span1", self.span1), ("span2", self.span2)] {
            if a == 0 || a > b || b >= t {
                return Err(Error::Bounds(format!(
                    "instance {}: {name} ({a}, {b}) must satisfy 0 < start <= end < {t}",
                    self.id
                )));
            }
        }
        if self.hidden.iter().any(|v| !v.is_finite()) {
            return Err(Error::Validation(format!(
                "instance {}: hidden states contain non-finite values",
                self.id
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    dim: usize,
    classes: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
struct Record {
    id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
    hidden: Vec<Vec<f64>>,
    span1: [usize; 2],
    span2: [usize; 2],
    #[serde(default)]
    drug1: Option<String>,
    #[serde(default)]
    drug2: Option<String>,
    #[serde(default)]
    mention1: String,
    #[serde(default)]
    mention2: String,
}

/// Contents of an `instances.jsonl` file.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceSet {
    pub dim: usize,
    pub classes: Vec<RcLabel>,
    pub instances: Vec<RcInstance>,
}

/// Reads `instances.jsonl`: a `{"dim": d, "classes": [...]}` header line, then
/// one instance object per line.
pub fn read_instances<R: BufRead>(source: R, source_name: &str, max_seq_len: usize) -> Result<InstanceSet> {
    let mut lines = source.lines().enumerate().filter_map(|(i, l)| match l {
        Ok(l) if l.trim().is_empty() => None,
        other => Some((i + 1, other)),
    });
    let (hline, header) = lines
        .next()
        .ok_or_else(|| Error::parse(source_name, 1, "missing header line"))?;
    let header: Header = serde_json::from_str(&header?)
        .map_err(|e| Error::parse(source_name, hline, format!("bad header: {e}")))?;
    if header.dim == 0 {
        return Err(Error::parse(source_name, hline, "header dim must be positive"));
    }
    let mut classes = Vec::new();
    for c in &header.classes {
        let label: RcLabel = c.parse().map_err(|e: Error| Error::parse(source_name, hline, e.to_string()))?;
        if classes.contains(&label) {
            return Err(Error::parse(source_name, hline, format!("class `{c}` listed twice")));
        }
        classes.push(label);
    }

    let mut instances = Vec::new();
    for (lineno, line) in lines {
        let record: Record = serde_json::from_str(&line?)
            .map_err(|e| Error::parse(source_name, lineno, e.to_string()))?;
        let at = |e: Error| Error::parse(source_name, lineno, e.to_string());
        let t = record.hidden.len();
        let mut flat = Vec::with_capacity(t * header.dim);
        for (r, row) in record.hidden.iter().enumerate() {
            if row.len() != header.dim {
                return Err(Error::parse(
                    source_name,
                    lineno,
                    format!("hidden row {r} has {} values, header declares {}", row.len(), header.dim),
                ));
            }
            flat.extend_from_slice(row);
        }
        let label = record
            .label
            .as_deref()
            .map(str::parse::<RcLabel>)
            .transpose()
            .map_err(at)?;
        let parse_id = |v: Option<String>| v.map(|s| EntityId::new(&s)).transpose();
        let instance = RcInstance {
            id: record.id,
            hidden: Array2::from_shape_vec((t, header.dim), flat).expect("row lengths checked"),
            span1: (record.span1[0], record.span1[1]),
            span2: (record.span2[0], record.span2[1]),
            drug1: parse_id(record.drug1).map_err(at)?,
            drug2: parse_id(record.drug2).map_err(at)?,
            mention1: record.mention1,
            mention2: record.mention2,
            label,
        };
        instance.validate(max_seq_len).map_err(at)?;
        instances.push(instance);
    }
    Ok(InstanceSet {
        dim: header.dim,
        classes,
        instances,
    })
}

/// Writes the `instances.jsonl` format read by [`read_instances`].
pub fn write_instances<W: Write>(set: &InstanceSet, mut sink: W) -> Result<()> {
    let header = Header {
        dim: set.dim,
        classes: set.classes.iter().map(|c| c.as_str().to_string()).collect(),
    };
    serde_json::to_writer(&mut sink, &header)?;
    writeln!(sink)?;
    for inst in &set.instances {
        if inst.dim() != set.dim {
            return Err(Error::Shape(format!(
                "instance {} has dim {}, set declares {}",
                inst.id,
                inst.dim(),
                set.dim
            )));
        }
        let record = Record {
            id: inst.id.clone(),
            label: inst.label.map(|l| l.as_str().to_string()),
            hidden: inst.hidden.rows().into_iter().map(|r| r.to_vec()).collect(),
            span1: [inst.span1.0, inst.span1.1],
            span2: [inst.span2.0, inst.span2.1],
            drug1: inst.drug1.as_ref().map(|d| d.to_string()),
            drug2: inst.drug2.as_ref().map(|d| d.to_string()),
            mention1: inst.mention1.clone(),
            mention2: inst.mention2.clone(),
        };
        serde_json::to_writer(&mut sink, &record)?;
        writeln!(sink)?;
    }
    sink.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = r#"{"dim": 2, "classes": ["Mechanism", "Effect", "Advice", "Int", "Other"]}"#;

    fn parse(body: &str) -> Result<InstanceSet> {
        read_instances(format!("{HEADER}\n{body}").as_bytes(), "inst", DEFAULT_MAX_SEQ_LEN)
    }

    #[test]
    fn reads_minimal_instance() {
        let set = parse(
            r#"{"id":"s1","label":"advice","hidden":[[0,0],[1,1],[3,-1]],"span1":[1,1],"span2":[2,2],"drug1":"DB1","drug2":null,"mention1":"a","mention2":"b"}"#,
        )
        .unwrap();
        assert_eq!(set.dim, 2);
        assert_eq!(set.classes.len(), 5);
        let inst = &set.instances[0];
        assert_eq!(inst.label, Some(RcLabel::Advice));
        assert_eq!(inst.drug1.as_ref().unwrap().as_str(), "DB1");
        assert!(inst.drug2.is_none());
        assert_eq!(inst.hidden[[2, 1]], -1.0);
    }

    #[test]
    fn rejects_span_covering_first_row() {
        let err = parse(r#"{"id":"s","hidden":[[0,0],[1,1]],"span1":[0,1],"span2":[1,1]}"#).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err:?}");
        assert!(err.to_string().contains("span1"));
    }

    #[test]
    fn rejects_span_past_end_and_ragged_rows() {
        assert!(parse(r#"{"id":"s","hidden":[[0,0],[1,1]],"span1":[1,1],"span2":[1,2]}"#).is_err());
        assert!(parse(r#"{"id":"s","hidden":[[0,0],[1]],"span1":[1,1],"span2":[1,1]}"#).is_err());
    }

    #[test]
    fn enforces_max_sequence_length() {
        let rows = vec!["[0,0]"; 4].join(",");
        let line = format!(r#"{{"id":"s","hidden":[{rows}],"span1":[1,1],"span2":[2,3]}}"#);
        let text = format!("{HEADER}\n{line}\n");
        assert!(read_instances(text.as_bytes(), "inst", 3).is_err());
        assert!(read_instances(text.as_bytes(), "inst", 4).is_ok());
    }

    #[test]
    fn rejects_unknown_label_and_header_class() {
        assert!(parse(r#"{"id":"s","label":"boost","hidden":[[0,0],[1,1]],"span1":[1,1],"span2":[1,1]}"#).is_err());
        let bad = r#"{"dim": 2, "classes": ["Boost"]}"#;
        assert!(read_instances(bad.as_bytes(), "inst", 300).is_err());
    }

    #[test]
    fn write_then_read_is_byte_stable() {
        let set = parse(
            r#"{"id":"s1","label":"Int","hidden":[[0.1,-0.2],[1e-7,1],[3,-1]],"span1":[1,1],"span2":[1,2],"drug1":"DB1","drug2":"DB2","mention1":"a","mention2":"b c"}
{"id":"s2","hidden":[[0,0],[1,1]],"span1":[1,1],"span2":[1,1],"drug1":null,"drug2":null,"mention1":"x","mention2":"y"}"#,
        )
        .unwrap();
        let mut first = Vec::new();
        write_instances(&set, &mut first).unwrap();
        let back = read_instances(first.as_slice(), "again", 300).unwrap();
        assert_eq!(back, set);
        let mut second = Vec::new();
        write_instances(&back, &mut second).unwrap();
        assert_eq!(first, second);
    }
}
