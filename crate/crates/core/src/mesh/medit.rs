//! ASCII MEDIT (`.mesh`) reader and writer for 2D triangle meshes.
//!
//! Only `Vertices` and `Triangles` define the mesh. Reference tags are kept
//! for round trips but never used for topology: boundaries are recomputed
//! from edge adjacency. `Edges`, `Corners`, `Ridges` and the `Required*`
//! sections are parsed and index-checked, then dropped.

use std::fmt::Write as _;

use super::Mesh;
use crate::{Error, Point, Result};

struct Tokens<'a> {
    items: Vec<(usize, &'a str)>,
    pos: usize,
    last_line: usize,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Self {
        let mut items = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("");
            items.extend(line.split_whitespace().map(|t| (ln + 1, t)));
        }
        let last_line = text.lines().count().max(1);
        Self { items, pos: 0, last_line }
    }

    fn line(&self) -> usize {
        self.items.get(self.pos).map_or(self.last_line, |t| t.0)
    }

    fn err<T>(&self, line: usize, msg: impl Into<String>) -> Result<T> {
        Err(Error::Medit { line, msg: msg.into() })
    }

    fn next(&mut self, what: &str) -> Result<(usize, &'a str)> {
        match self.items.get(self.pos) {
            Some(&t) => {
                self.pos += 1;
                Ok(t)
            }
            None => self.err(self.last_line, format!("unexpected end of file, expected {what}")),
        }
    }

    fn int(&mut self, what: &str) -> Result<(usize, i64)> {
        let (ln, tok) = self.next(what)?;
        match tok.parse::<i64>() {
            Ok(v) => Ok((ln, v)),
            Err(_) => self.err(ln, format!("expected integer {what}, found `{tok}`")),
        }
    }

    fn count(&mut self, section: &str) -> Result<usize> {
        let (ln, v) = self.int(&format!("{section} count"))?;
        usize::try_from(v).or_else(|_| self.err(ln, format!("negative {section} count")))
    }

    fn float(&mut self, what: &str) -> Result<f64> {
        let (ln, tok) = self.next(what)?;
        match tok.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => self.err(ln, format!("expected real {what}, found `{tok}`")),
        }
    }

    /// 1-based index into a table of `len` entries, returned 0-based.
    fn index(&mut self, len: usize, what: &str) -> Result<usize> {
        let (ln, v) = self.int(what)?;
        if v < 1 || v as usize > len {
            return self.err(ln, format!("{what} index {v} out of range 1..={len}"));
        }
        Ok(v as usize - 1)
    }
}

pub fn read_medit(text: &str) -> Result<Mesh> {
    let mut tk = Tokens::new(text);
    let mut dimension = None;
    let mut vertices: Option<(Vec<Point>, Vec<i64>)> = None;
    let mut triangles: Option<(Vec<[usize; 3]>, Vec<i64>, Vec<usize>)> = None;
    let mut saw_version = false;

    loop {
        let (ln, kw) = match tk.next("keyword") {
            Ok(t) => t,
            Err(_) => return tk.err(tk.last_line, "missing `End` keyword"),
        };
        match kw {
            "MeshVersionFormatted" => {
                let (ln, v) = tk.int("version")?;
                if !(1..=3).contains(&v) {
                    return tk.err(ln, format!("unsupported MeshVersionFormatted {v}"));
                }
                saw_version = true;
            }
            "Dimension" => {
                let (ln, d) = tk.int("dimension")?;
                if d != 2 {
                    return tk.err(ln, format!("only Dimension 2 is supported, found {d}"));
                }
                dimension = Some(2);
            }
            "Vertices" => {
                if dimension.is_none() {
                    return tk.err(ln, "`Vertices` before `Dimension`");
                }
                let n = tk.count("Vertices")?;
                let mut xs = Vec::with_capacity(n);
                let mut refs = Vec::with_capacity(n);
                for _ in 0..n {
                    let x = tk.float("x coordinate")?;
                    let y = tk.float("y coordinate")?;
                    xs.push([x, y]);
                    refs.push(tk.int("vertex reference")?.1);
                }
                vertices = Some((xs, refs));
            }
            "Triangles" => {
                let Some((xs, _)) = vertices.as_ref() else {
                    return tk.err(ln, "`Triangles` before `Vertices`");
                };
                let nv = xs.len();
                let n = tk.count("Triangles")?;
                let mut tris = Vec::with_capacity(n);
                let mut refs = Vec::with_capacity(n);
                let mut lines = Vec::with_capacity(n);
                for _ in 0..n {
                    let line = tk.line();
                    let a = tk.index(nv, "vertex")?;
                    let b = tk.index(nv, "vertex")?;
                    let c = tk.index(nv, "vertex")?;
                    refs.push(tk.int("triangle reference")?.1);
                    tris.push([a, b, c]);
                    lines.push(line);
                }
                triangles = Some((tris, refs, lines));
            }
            "Edges" | "RequiredEdges" | "Ridges" | "Corners" | "RequiredVertices" => {
                let nv = vertices.as_ref().map_or(0, |v| v.0.len());
                let n = tk.count(kw)?;
                for _ in 0..n {
                    match kw {
                        "Edges" => {
                            tk.index(nv, "vertex")?;
                            tk.index(nv, "vertex")?;
                            tk.int("edge reference")?;
                        }
                        "RequiredEdges" | "Ridges" => {
                            tk.int("edge index")?;
                        }
                        _ => {
                            tk.index(nv, "vertex")?;
                        }
                    }
                }
            }
            "End" => break,
            other => return tk.err(ln, format!("unknown keyword `{other}`")),
        }
    }
    if !saw_version {
        return tk.err(1, "missing MeshVersionFormatted header");
    }
    let Some((xs, vrefs)) = vertices else {
        return tk.err(tk.last_line, "missing `Vertices` section");
    };
    let Some((tris, trefs, lines)) = triangles else {
        return tk.err(tk.last_line, "missing `Triangles` section");
    };
    for (t, tri) in tris.iter().enumerate() {
        let [a, b, c] = tri.map(|v| xs[v]);
        if super::signed_area(a, b, c) <= 0.0 {
            return tk.err(lines[t], format!("triangle {} has nonpositive area", t + 1));
        }
    }
    Mesh::with_refs(xs, tris, vrefs, trefs)
}

pub fn write_medit(mesh: &Mesh) -> String {
    let mut out = String::new();
    out.push_str("MeshVersionFormatted 2\n\nDimension 2\n\nVertices\n");
    let _ = writeln!(out, "{}", mesh.n_vertices());
    for (p, r) in mesh.vertices().iter().zip(mesh.vertex_refs()) {
        let _ = writeln!(out, "{:?} {:?} {}", p[0], p[1], r);
    }
    out.push_str("\nTriangles\n");
    let _ = writeln!(out, "{}", mesh.n_triangles());
    for (t, r) in mesh.triangles().iter().zip(mesh.triangle_refs()) {
        let _ = writeln!(out, "{} {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1, r);
    }
    out.push_str("\nEnd\n");
    out
}
