//! The `gpsmesh v1` text format.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use super::{BoundaryEdge, BoundaryTag, Mesh};
use crate::error::{Error, Result};
use crate::geometry::Point2;

const HEADER: &str = "gpsmesh v1";

/// Serializes a mesh; coordinates carry 17 significant digits, so reading
/// the text back reproduces every coordinate bit for bit.
pub fn write_mesh(mesh: &Mesh, mut out: impl Write) -> Result<()> {
    let mut s = String::with_capacity(64 * (mesh.nodes.len() + mesh.triangles.len()));
    writeln!(s, "{HEADER}").unwrap();
    writeln!(s, "nodes {}", mesh.nodes.len()).unwrap();
    for (i, p) in mesh.nodes.iter().enumerate() {
        writeln!(s, "{i} {:.16e} {:.16e}", p.x1, p.x2).unwrap();
    }
    writeln!(s, "triangles {}", mesh.triangles.len()).unwrap();
    for (i, (t, r)) in mesh.triangles.iter().zip(&mesh.regions).enumerate() {
        writeln!(s, "{i} {} {} {} {r}", t[0], t[1], t[2]).unwrap();
    }
    writeln!(s, "edges {}", mesh.boundary_edges.len()).unwrap();
    for (i, e) in mesh.boundary_edges.iter().enumerate() {
        writeln!(s, "{i} {} {} {}", e.nodes[0], e.nodes[1], e.tag).unwrap();
    }
    out.write_all(s.as_bytes())?;
    Ok(())
}

struct Lines<R> {
    inner: std::io::Lines<BufReader<R>>,
    line: usize,
}

impl<R: Read> Lines<R> {
    fn next_fields(&mut self) -> Result<Vec<String>> {
        loop {
            self.line += 1;
            let text = match self.inner.next() {
                Some(t) => t?,
                None => return Err(self.err("unexpected end of file")),
            };
            let body = text.split('#').next().unwrap_or("").trim();
            if !body.is_empty() {
                return Ok(body.split_whitespace().map(str::to_owned).collect());
            }
        }
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            msg: msg.into(),
        }
    }

    fn section(&mut self, name: &str) -> Result<usize> {
        let f = self.next_fields()?;
        if f.len() != 2 || f[0] != name {
            return Err(self.err(format!("expected `{name} <count>`")));
        }
        f[1].parse().map_err(|_| self.err(format!("invalid {name} count `{}`", f[1])))
    }

    fn record(&mut self, expected_index: usize, arity: usize) -> Result<Vec<String>> {
        let f = self.next_fields()?;
        if f.len() != arity + 1 {
            return Err(self.err(format!("expected {} fields, found {}", arity + 1, f.len())));
        }
        if f[0].parse::<usize>().ok() != Some(expected_index) {
            return Err(self.err(format!("expected record index {expected_index}, found `{}`", f[0])));
        }
        Ok(f[1..].to_vec())
    }

    fn parse<T: std::str::FromStr>(&self, s: &str, what: &str) -> Result<T> {
        s.parse().map_err(|_| self.err(format!("invalid {what} `{s}`")))
    }
}

/// Parses a `gpsmesh v1` file; every failure names its line.
pub fn read_mesh(input: impl Read) -> Result<Mesh> {
    let mut r = Lines {
        inner: BufReader::new(input).lines(),
        line: 0,
    };
    let head = r.next_fields()?;
    if head.join(" ") != HEADER {
        return Err(r.err(format!("expected header `{HEADER}`")));
    }
    let n = r.section("nodes")?;
    let mut nodes = Vec::with_capacity(n);
    for i in 0..n {
        let f = r.record(i, 2)?;
        let p = Point2::new(r.parse(&f[0], "coordinate")?, r.parse(&f[1], "coordinate")?);
        if !p.is_finite() {
            return Err(r.err("non-finite coordinate"));
        }
        nodes.push(p);
    }
    let m = r.section("triangles")?;
    let mut triangles = Vec::with_capacity(m);
    let mut regions = Vec::with_capacity(m);
    for i in 0..m {
        let f = r.record(i, 4)?;
        let mut t = [0usize; 3];
        for k in 0..3 {
            t[k] = r.parse(&f[k], "node index")?;
            if t[k] >= n {
                return Err(r.err(format!("triangle {i} references missing node {}", t[k])));
            }
        }
        triangles.push(t);
        regions.push(r.parse(&f[3], "region")?);
    }
    let k = r.section("edges")?;
    let mut edges = Vec::with_capacity(k);
    let mut seen = HashSet::with_capacity(k);
    for i in 0..k {
        let f = r.record(i, 3)?;
        let a: usize = r.parse(&f[0], "node index")?;
        let b: usize = r.parse(&f[1], "node index")?;
        if a >= n || b >= n {
            return Err(r.err(format!("edge {i} references a missing node")));
        }
        let tag: BoundaryTag = f[2].parse().map_err(|e: String| r.err(e))?;
        if !seen.insert((a.min(b), a.max(b))) {
            return Err(r.err(format!("duplicate boundary tag for edge ({a}, {b})")));
        }
        edges.push(BoundaryEdge { nodes: [a, b], tag });
    }
    let end = r.line;
    Mesh::new(nodes, triangles, regions, edges).map_err(|e| Error::Parse {
        line: end,
        msg: e.to_string(),
    })
}

/// Writes `mesh` to `path` and reads it back.
pub fn mesh_roundtrip(mesh: &Mesh, path: &Path) -> Result<Mesh> {
    let mut f = std::fs::File::create(path)?;
    write_mesh(mesh, &mut f)?;
    f.flush()?;
    drop(f);
    read_mesh(std::fs::File::open(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQUARE: &str = "gpsmesh v1
nodes 4
0 0 0
1 1 0
2 1 1
3 0 1
triangles 2
0 0 1 2 0
1 0 2 3 0
edges 4
0 0 1 outer
1 1 2 sigma
2 2 3 sigma
3 3 0 outer
";

    #[test]
    fn parses_and_roundtrips() {
        let m = read_mesh(SQUARE.as_bytes()).unwrap();
        assert_eq!(m.boundary_edges[1].tag, BoundaryTag::Sigma);
        let mut buf = Vec::new();
        write_mesh(&m, &mut buf).unwrap();
        let back = read_mesh(buf.as_slice()).unwrap();
        assert_eq!(back, m);
        let mut buf2 = Vec::new();
        write_mesh(&back, &mut buf2).unwrap();
        assert_eq!(buf, buf2);
    }

    #[test]
    fn missing_node_is_reported_with_line() {
        let bad = SQUARE.replace("1 0 2 3 0", "1 0 2 9 0");
        match read_mesh(bad.as_bytes()) {
            Err(Error::Parse { line, msg }) => {
                assert_eq!(line, 9);
                assert!(msg.contains("missing node"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn duplicate_edge_tag_is_rejected() {
        let bad = SQUARE.replace("edges 4", "edges 5") + "4 1 0 outer\n";
        match read_mesh(bad.as_bytes()) {
            Err(Error::Parse { line, msg }) => {
                assert_eq!(line, 15);
                assert!(msg.contains("duplicate"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bad_header_and_tag() {
        assert!(matches!(read_mesh("gpsmesh v2\n".as_bytes()), Err(Error::Parse { line: 1, .. })));
        let bad = SQUARE.replace("3 3 0 outer", "3 3 0 lid");
        assert!(matches!(read_mesh(bad.as_bytes()), Err(Error::Parse { line: 14, .. })));
    }
}
