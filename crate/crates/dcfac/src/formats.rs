//! Text formats: weighted edge lists, OR-Library UBQP files, the canonical
//! JSON instance format and benchmark manifests.
//!
//! Lines whose first non-blank character is `#` or `%` are comments in every
//! line-oriented format.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use dcfac_core::generators::gen_product_maxcut;
use dcfac_core::model::{build_maxcut, build_product, build_ubqp, ProblemKind, ProductFactor};
use dcfac_core::rng::GENERATOR_ID;
use dcfac_core::{EdgeList, Instance, Problem, SparseSymMatrix};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unexpected end of input: {0}")]
    Truncated(String),
    #[error("field `{field}`: {msg}")]
    Field { field: String, msg: String },
    #[error("unsupported schema version {0}")]
    SchemaVersion(u64),
    #[error(transparent)]
    Model(#[from] dcfac_core::Error),
}

pub type Result<T> = std::result::Result<T, FormatError>;

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let t = l.trim();
        (!t.is_empty() && !t.starts_with('#') && !t.starts_with('%')).then_some((i + 1, t))
    })
}

fn parse_field<T: FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| FormatError::Parse {
        line,
        msg: format!("missing {what}"),
    })?;
    tok.parse().map_err(|_| FormatError::Parse {
        line,
        msg: format!("invalid {what} `{tok}`"),
    })
}

fn one_based(idx: usize, n: usize, line: usize) -> Result<usize> {
    if idx == 0 || idx > n {
        return Err(FormatError::Parse {
            line,
            msg: format!("index {idx} out of range 1..={n}"),
        });
    }
    Ok(idx - 1)
}

/// Parses `n m` followed by `m` lines `i j w` (1-based; `w` defaults to 1).
pub fn parse_edgelist(text: &str) -> Result<EdgeList> {
    let mut lines = data_lines(text);
    let (hl, header) = lines
        .next()
        .ok_or_else(|| FormatError::Truncated("missing `n m` header".into()))?;
    let mut toks = header.split_whitespace();
    let n: usize = parse_field(toks.next(), hl, "vertex count")?;
    let m: usize = parse_field(toks.next(), hl, "edge count")?;
    let mut edges = Vec::with_capacity(m);
    for (line, l) in lines {
        if edges.len() == m {
            return Err(FormatError::Parse {
                line,
                msg: format!("more than the declared {m} edges"),
            });
        }
        let mut toks = l.split_whitespace();
        let i = one_based(parse_field(toks.next(), line, "vertex")?, n, line)?;
        let j = one_based(parse_field(toks.next(), line, "vertex")?, n, line)?;
        let w: f64 = match toks.next() {
            Some(t) => parse_field(Some(t), line, "weight")?,
            None => 1.0,
        };
        if i == j {
            return Err(FormatError::Parse {
                line,
                msg: format!("self-loop at vertex {}", i + 1),
            });
        }
        edges.push((i, j, w));
    }
    if edges.len() < m {
        return Err(FormatError::Truncated(format!(
            "expected {m} edges, found {}",
            edges.len()
        )));
    }
    Ok(EdgeList { n, edges })
}

pub fn write_edgelist(el: &EdgeList) -> String {
    let mut out = format!("{} {}\n", el.n, el.edges.len());
    for (i, j, w) in &el.edges {
        let _ = writeln!(out, "{} {} {}", i + 1, j + 1, w);
    }
    out
}

/// Parses an OR-Library UBQP file: the problem count, then per problem
/// `n m` and `m` lines `i j q`. A diagonal entry sets `A_ii = q`; an
/// off-diagonal entry sets both `A_ij` and `A_ji` to `q`.
pub fn parse_orlib(text: &str) -> Result<Vec<SparseSymMatrix>> {
    let mut lines = data_lines(text);
    let (hl, header) = lines
        .next()
        .ok_or_else(|| FormatError::Truncated("missing problem count".into()))?;
    let count: usize = parse_field(header.split_whitespace().next(), hl, "problem count")?;
    let mut problems = Vec::with_capacity(count);
    for k in 0..count {
        let (line, l) = lines
            .next()
            .ok_or_else(|| FormatError::Truncated(format!("problem {} header", k + 1)))?;
        let mut toks = l.split_whitespace();
        let n: usize = parse_field(toks.next(), line, "dimension")?;
        let m: usize = parse_field(toks.next(), line, "entry count")?;
        let mut entries = BTreeMap::new();
        for e in 0..m {
            let (line, l) = lines.next().ok_or_else(|| {
                FormatError::Truncated(format!("problem {}: entry {} of {m}", k + 1, e + 1))
            })?;
            let mut toks = l.split_whitespace();
            let i = one_based(parse_field(toks.next(), line, "row")?, n, line)?;
            let j = one_based(parse_field(toks.next(), line, "column")?, n, line)?;
            let q: f64 = parse_field(toks.next(), line, "value")?;
            entries.insert((i.min(j), i.max(j)), q);
        }
        problems.push(SparseSymMatrix::from_sym_triplets(
            n,
            entries.into_iter().map(|((i, j), q)| (i, j, q)),
        )?);
    }
    Ok(problems)
}

pub fn write_orlib(problems: &[SparseSymMatrix]) -> String {
    let mut out = format!("{}\n", problems.len());
    for a in problems {
        let entries: Vec<_> = a.upper_triplets().collect();
        let _ = writeln!(out, "{} {}", a.dim(), entries.len());
        for (i, j, q) in entries {
            let _ = writeln!(out, "{} {} {}", i + 1, j + 1, q);
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Maxcut,
    Ubqp,
    Product,
}

impl From<ProblemKind> for Kind {
    fn from(k: ProblemKind) -> Self {
        match k {
            ProblemKind::MaxCut => Kind::Maxcut,
            ProblemKind::Ubqp => Kind::Ubqp,
            ProblemKind::Product => Kind::Product,
        }
    }
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Maxcut => "maxcut",
            Kind::Ubqp => "ubqp",
            Kind::Product => "product",
        }
    }
}

impl FromStr for Kind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "maxcut" => Ok(Kind::Maxcut),
            "ubqp" => Ok(Kind::Ubqp),
            "product" => Ok(Kind::Product),
            other => Err(format!("unknown kind `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Edgelist,
    Orlib,
    Canonical,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "edgelist" => Ok(Format::Edgelist),
            "orlib" => Ok(Format::Orlib),
            "canonical" => Ok(Format::Canonical),
            other => Err(format!("unknown format `{other}`")),
        }
    }
}

pub const SCHEMA: &str = "dcfac-instance";
pub const SCHEMA_VERSION: u64 = 1;

/// Where a generated instance came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    pub family: String,
    pub generator: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sources: Vec<String>,
}

impl Provenance {
    pub fn product_random(l: usize, seed: u64) -> Self {
        Self {
            family: "product-random".into(),
            generator: GENERATOR_ID.into(),
            seed: Some(seed),
            l: Some(l),
            sources: Vec::new(),
        }
    }
}

/// `(i, j, value)` with 0-based `i ≤ j`.
pub type Entry = (usize, usize, f64);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CanonicalFactor {
    pub q: Vec<Entry>,
    pub c: Vec<f64>,
    pub a: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CanonicalInstance {
    pub schema: String,
    pub version: u64,
    pub name: String,
    pub kind: Kind,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub known_best: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
    #[serde(default)]
    pub entries: Vec<Entry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub factors: Vec<CanonicalFactor>,
}

fn field_err(field: impl Into<String>, msg: impl Into<String>) -> FormatError {
    FormatError::Field {
        field: field.into(),
        msg: msg.into(),
    }
}

fn check_entries(entries: &[Entry], n: usize, field: &str, strict_upper: bool) -> Result<()> {
    for (k, &(i, j, v)) in entries.iter().enumerate() {
        let name = format!("{field}[{k}]");
        if i >= n || j >= n {
            return Err(field_err(name, format!("index out of range for n = {n}")));
        }
        if i > j || (strict_upper && i == j) {
            return Err(field_err(
                name,
                "entries must satisfy i < j (i <= j for matrices)",
            ));
        }
        if !v.is_finite() {
            return Err(field_err(name, "value is not finite"));
        }
    }
    Ok(())
}

impl CanonicalInstance {
    pub fn from_instance(inst: &Instance, provenance: Option<Provenance>) -> Self {
        let (n, entries, factors) = match &inst.problem {
            Problem::MaxCut { weights } => (
                weights.dim(),
                weights.upper_triplets().collect(),
                Vec::new(),
            ),
            Problem::Ubqp { a } => (a.dim(), a.upper_triplets().collect(), Vec::new()),
            Problem::Product { factors } => (
                factors[0].q.dim(),
                Vec::new(),
                factors
                    .iter()
                    .map(|f| CanonicalFactor {
                        q: f.q.upper_triplets().collect(),
                        c: f.c.clone(),
                        a: f.a,
                    })
                    .collect(),
            ),
        };
        Self {
            schema: SCHEMA.into(),
            version: SCHEMA_VERSION,
            name: inst.name.clone(),
            kind: inst.kind().into(),
            n,
            known_best: inst.known_best,
            provenance,
            entries,
            factors,
        }
    }

    pub fn to_instance(&self) -> Result<Instance> {
        let n = self.n;
        let inst = match self.kind {
            Kind::Maxcut | Kind::Ubqp => {
                if !self.factors.is_empty() {
                    return Err(field_err(
                        "factors",
                        format!("not allowed for kind {}", self.kind.as_str()),
                    ));
                }
                let maxcut = self.kind == Kind::Maxcut;
                check_entries(&self.entries, n, "entries", maxcut)?;
                let m = SparseSymMatrix::from_sym_triplets(n, self.entries.iter().copied())?;
                if maxcut {
                    build_maxcut(&m)?
                } else {
                    build_ubqp(&m)?
                }
            }
            Kind::Product => {
                if !self.entries.is_empty() {
                    return Err(field_err("entries", "not allowed for kind product"));
                }
                let mut factors = Vec::with_capacity(self.factors.len());
                for (k, f) in self.factors.iter().enumerate() {
                    check_entries(&f.q, n, &format!("factors[{k}].q"), false)?;
                    if f.c.len() != n {
                        return Err(field_err(
                            format!("factors[{k}].c"),
                            format!("expected {n} values, found {}", f.c.len()),
                        ));
                    }
                    if !f.a.is_finite() || f.c.iter().any(|v| !v.is_finite()) {
                        return Err(field_err(format!("factors[{k}]"), "value is not finite"));
                    }
                    factors.push(ProductFactor {
                        q: SparseSymMatrix::from_sym_triplets(n, f.q.iter().copied())?,
                        c: f.c.clone(),
                        a: f.a,
                    });
                }
                if factors.len() < 2 {
                    return Err(field_err("factors", "at least two factors are required"));
                }
                build_product(factors)?
            }
        };
        Ok(inst
            .with_name(self.name.clone())
            .with_known_best(self.known_best))
    }
}

pub fn write_canonical(inst: &CanonicalInstance) -> String {
    let mut s = serde_json::to_string_pretty(inst).expect("instance serializes");
    s.push('\n');
    s
}

pub fn read_canonical(text: &str) -> Result<CanonicalInstance> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| FormatError::Parse {
        line: e.line(),
        msg: e.to_string(),
    })?;
    match value.get("schema").and_then(|s| s.as_str()) {
        Some(SCHEMA) => {}
        Some(other) => {
            return Err(field_err(
                "schema",
                format!("expected `{SCHEMA}`, found `{other}`"),
            ))
        }
        None => return Err(field_err("schema", "missing")),
    }
    match value.get("version").and_then(|v| v.as_u64()) {
        Some(SCHEMA_VERSION) => {}
        Some(v) => return Err(FormatError::SchemaVersion(v)),
        None => return Err(field_err("version", "missing or not an integer")),
    }
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        field_err(
            if path == "." {
                "<root>".to_string()
            } else {
                path
            },
            e.into_inner().to_string(),
        )
    })
}

/// Product-of-cuts instance from two edge-list files, with the file names
/// recorded as provenance.
pub fn product_maxcut_from_files(w1: &Path, w2: &Path) -> anyhow::Result<CanonicalInstance> {
    let g1 = parse_edgelist(&std::fs::read_to_string(w1)?)?;
    let g2 = parse_edgelist(&std::fs::read_to_string(w2)?)?;
    let inst = gen_product_maxcut(&g1, &g2)?.with_name(format!(
        "product-maxcut-{}-{}",
        stem(w1),
        stem(w2)
    ));
    let prov = Provenance {
        family: "product-maxcut".into(),
        generator: GENERATOR_ID.into(),
        seed: None,
        l: None,
        sources: vec![w1.display().to_string(), w2.display().to_string()],
    };
    Ok(CanonicalInstance::from_instance(&inst, Some(prov)))
}

pub fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// Reads one instance. For OR-Library files `index` selects the problem
/// (1-based). `kind` must match what the format can express.
pub fn load_instance(
    path: &Path,
    format: Format,
    kind: Option<Kind>,
    index: usize,
) -> anyhow::Result<Instance> {
    let text =
        std::fs::read_to_string(path).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
    let ctx = |e: FormatError| anyhow::anyhow!("{}: {e}", path.display());
    let inst = match format {
        Format::Edgelist => {
            if !matches!(kind, None | Some(Kind::Maxcut)) {
                anyhow::bail!("edge-list files hold max-cut instances only");
            }
            let el = parse_edgelist(&text).map_err(ctx)?;
            build_maxcut(&el.weight_matrix()?)?.with_name(stem(path))
        }
        Format::Orlib => {
            if !matches!(kind, None | Some(Kind::Ubqp)) {
                anyhow::bail!("OR-Library files hold UBQP instances only");
            }
            let problems = parse_orlib(&text).map_err(ctx)?;
            if index == 0 || index > problems.len() {
                anyhow::bail!(
                    "{}: problem {index} requested, file has {}",
                    path.display(),
                    problems.len()
                );
            }
            let name = if problems.len() > 1 {
                format!("{}#{index}", stem(path))
            } else {
                stem(path)
            };
            build_ubqp(&problems[index - 1])?.with_name(name)
        }
        Format::Canonical => {
            let doc = read_canonical(&text).map_err(ctx)?;
            if let Some(k) = kind {
                if k != doc.kind {
                    anyhow::bail!(
                        "{}: file holds a {} instance, not {}",
                        path.display(),
                        doc.kind.as_str(),
                        k.as_str()
                    );
                }
            }
            let inst = doc.to_instance().map_err(ctx)?;
            if inst.name.is_empty() {
                inst.with_name(stem(path))
            } else {
                inst
            }
        }
    };
    Ok(inst)
}

/// One benchmark manifest line: `path, format, kind[, bval]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ManifestEntry {
    pub path: PathBuf,
    /// OR-Library problem index from a `path#k` suffix.
    pub index: usize,
    pub format: Format,
    pub kind: Kind,
    pub bval: Option<f64>,
}

/// Parses a manifest; relative paths are resolved against `base`.
pub fn parse_manifest(text: &str, base: &Path) -> Result<Vec<ManifestEntry>> {
    let mut out = Vec::new();
    for (line, l) in data_lines(text) {
        let fields: Vec<&str> = l.split(',').map(str::trim).collect();
        if !(3..=4).contains(&fields.len()) {
            return Err(FormatError::Parse {
                line,
                msg: "expected `path, format, kind[, bval]`".into(),
            });
        }
        let (raw_path, index) = match fields[0].rsplit_once('#') {
            Some((p, k)) => (p, parse_field(Some(k), line, "problem index")?),
            None => (fields[0], 1),
        };
        let path = Path::new(raw_path);
        let path = if path.is_absolute() {
            path.to_path_buf()
        } else {
            base.join(path)
        };
        let format = fields[1]
            .parse()
            .map_err(|msg| FormatError::Parse { line, msg })?;
        let kind = fields[2]
            .parse()
            .map_err(|msg| FormatError::Parse { line, msg })?;
        let bval = match fields.get(3) {
            Some(s) if !s.is_empty() => Some(parse_field(Some(s), line, "bval")?),
            _ => None,
        };
        out.push(ManifestEntry {
            path,
            index,
            format,
            kind,
            bval,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edgelist_examples() {
        let el = parse_edgelist("2 1\n1 2 1").unwrap();
        assert_eq!(
            el,
            EdgeList {
                n: 2,
                edges: vec![(0, 1, 1.0)]
            }
        );
        let tri = parse_edgelist("# header\n3 3\n1 2 1\n2 3 1\n% note\n1 3 1\n").unwrap();
        assert_eq!(tri.edges.len(), 3);
        let err = parse_edgelist("2 1\n1 3 1").unwrap_err();
        assert!(matches!(err, FormatError::Parse { line: 2, .. }), "{err}");
        assert!(matches!(
            parse_edgelist("3 2\n1 2 1"),
            Err(FormatError::Truncated(_))
        ));
        assert!(matches!(
            parse_edgelist("3 1\n1 x 1"),
            Err(FormatError::Parse { line: 2, .. })
        ));
        assert!(parse_edgelist("3 1\n2 2 1").is_err());
    }

    #[test]
    fn orlib_examples() {
        let one = parse_orlib("1\n1 1\n1 1 5").unwrap();
        assert_eq!(one[0].to_dense(), vec![5.0]);
        let two = parse_orlib("1\n2 2\n1 1 1\n1 2 3").unwrap();
        assert_eq!(two[0].to_dense(), vec![1.0, 3.0, 3.0, 0.0]);
        let many = parse_orlib("2\n1 1\n1 1 2\n1 1\n1 1 -4\n").unwrap();
        assert_eq!(many.len(), 2);
        assert_eq!(many[1].get(0, 0), -4.0);
        assert!(parse_orlib("0").unwrap().is_empty());
        assert!(matches!(
            parse_orlib("1\n2 2\n1 1 1"),
            Err(FormatError::Truncated(_))
        ));
    }

    #[test]
    fn manifest_lines() {
        let m = parse_manifest("# comment\na.txt, edgelist, maxcut, 564\nb.txt#2, orlib, ubqp,\n/abs/c.json, canonical, product\n", Path::new("/base")).unwrap();
        assert_eq!(m.len(), 3);
        assert_eq!(m[0].path, Path::new("/base/a.txt"));
        assert_eq!(m[0].bval, Some(564.0));
        assert_eq!(m[1].index, 2);
        assert_eq!(m[1].bval, None);
        assert_eq!(m[2].path, Path::new("/abs/c.json"));
        assert!(parse_manifest("a.txt, nope, maxcut", Path::new(".")).is_err());
    }

    #[test]
    fn canonical_errors_name_fields() {
        let good = CanonicalInstance::from_instance(
            &build_maxcut(&SparseSymMatrix::from_sym_triplets(2, [(0, 1, 1.0)]).unwrap()).unwrap(),
            None,
        );
        let text = write_canonical(&good);
        assert_eq!(read_canonical(&text).unwrap(), good);
        let bad = text.replace("\"n\": 2", "\"n\": \"two\"");
        let err = read_canonical(&bad).unwrap_err();
        assert!(
            matches!(&err, FormatError::Field { field, .. } if field == "n"),
            "{err}"
        );
        let bumped = text.replace("\"version\": 1", "\"version\": 9");
        assert!(matches!(
            read_canonical(&bumped),
            Err(FormatError::SchemaVersion(9))
        ));
        let out_of_range = text.replace("[\n      0,\n      1,", "[\n      0,\n      7,");
        let err = read_canonical(&out_of_range)
            .unwrap()
            .to_instance()
            .unwrap_err();
        assert!(
            matches!(&err, FormatError::Field { field, .. } if field == "entries[0]"),
            "{err}"
        );
    }
}
