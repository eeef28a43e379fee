//! Line-oriented instance format.
//!
//! ```text
//! # comments start with '#'
//! graph <n> <m>
//! u v gamma            (m lines)
//! hypergraph <n> <m>
//! k v1 .. vk gamma     (m lines)
//! bipartite <nL> <nR> <m>
//! u v                  (m lines)
//! ```
//!
//! Weights are exact rationals written `p/q`, integers or finite decimals.

use std::fmt::Write as _;

use crate::error::{Error, Result};

use super::number::parse_rational;
use super::{BipartiteGraph, WeightedGraph, WeightedHypergraph};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Instance {
    Graph(WeightedGraph),
    Hypergraph(WeightedHypergraph),
    Bipartite(BipartiteGraph),
}

impl Instance {
    pub fn kind(&self) -> &'static str {
        match self {
            Instance::Graph(_) => "graph",
            Instance::Hypergraph(_) => "hypergraph",
            Instance::Bipartite(_) => "bipartite",
        }
    }

    pub fn to_text(&self) -> String {
        match self {
            Instance::Graph(g) => graph_to_text(g),
            Instance::Hypergraph(h) => hypergraph_to_text(h),
            Instance::Bipartite(b) => bipartite_to_text(b),
        }
    }
}

pub fn graph_to_text(g: &WeightedGraph) -> String {
    let mut s = format!("graph {} {}\n", g.n(), g.m());
    for (&(u, v), w) in g.edges().iter().zip(g.weights()) {
        writeln!(s, "{u} {v} {w}").unwrap();
    }
    s
}

pub fn hypergraph_to_text(h: &WeightedHypergraph) -> String {
    let mut s = format!("hypergraph {} {}\n", h.n(), h.m());
    for (f, w) in h.hyperedges().iter().zip(h.weights()) {
        write!(s, "{}", f.len()).unwrap();
        for v in f {
            write!(s, " {v}").unwrap();
        }
        writeln!(s, " {w}").unwrap();
    }
    s
}

pub fn bipartite_to_text(b: &BipartiteGraph) -> String {
    let mut s = format!("bipartite {} {} {}\n", b.left(), b.right(), b.edges().len());
    for &(u, v) in b.edges() {
        writeln!(s, "{u} {v}").unwrap();
    }
    s
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn next_tokens(&mut self) -> Option<(usize, Vec<&'a str>)> {
        for (i, raw) in self.inner.by_ref() {
            let line = raw.split('#').next().unwrap_or("");
            let tokens: Vec<&str> = line.split_whitespace().collect();
            self.last = i + 1;
            if !tokens.is_empty() {
                return Some((i + 1, tokens));
            }
        }
        None
    }
}

fn num(line: usize, tok: &str) -> Result<usize> {
    tok.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("expected a non-negative integer, found `{tok}`"),
    })
}

fn at(line: usize) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::Parse { .. } => e,
        other => Error::Parse {
            line,
            msg: other.to_string(),
        },
    }
}

pub fn parse(text: &str) -> Result<Instance> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
        last: 0,
    };
    let (hl, header) = lines.next_tokens().ok_or(Error::Parse {
        line: 0,
        msg: "empty input".into(),
    })?;
    let arity = |want: usize| -> Result<()> {
        if header.len() != want {
            return Err(Error::Parse {
                line: hl,
                msg: format!("`{}` header takes {} numbers", header[0], want - 1),
            });
        }
        Ok(())
    };
    let mut body = |m: usize| -> Result<Vec<(usize, Vec<&str>)>> {
        let mut rows = Vec::with_capacity(m);
        for _ in 0..m {
            rows.push(lines.next_tokens().ok_or(Error::Parse {
                line: lines.last,
                msg: format!("expected {m} rows, found {}", rows.len()),
            })?);
        }
        if let Some((l, _)) = lines.next_tokens() {
            return Err(Error::Parse {
                line: l,
                msg: "trailing data after the declared rows".into(),
            });
        }
        Ok(rows)
    };
    match header[0] {
        "graph" => {
            arity(3)?;
            let (n, m) = (num(hl, header[1])?, num(hl, header[2])?);
            let mut g = WeightedGraph::new(n);
            for (l, row) in body(m)? {
                if row.len() != 3 {
                    return Err(Error::Parse {
                        line: l,
                        msg: "edge rows are `u v gamma`".into(),
                    });
                }
                let w = parse_rational(row[2]).map_err(at(l))?;
                g.add_edge(num(l, row[0])?, num(l, row[1])?, w)
                    .map_err(at(l))?;
            }
            Ok(Instance::Graph(g))
        }
        "hypergraph" => {
            arity(3)?;
            let (n, m) = (num(hl, header[1])?, num(hl, header[2])?);
            let mut h = WeightedHypergraph::new(n);
            for (l, row) in body(m)? {
                let k = num(l, row[0])?;
                if row.len() != k + 2 {
                    return Err(Error::Parse {
                        line: l,
                        msg: format!("hyperedge row declares {k} vertices plus a weight"),
                    });
                }
                let vs = row[1..=k]
                    .iter()
                    .map(|t| num(l, t))
                    .collect::<Result<Vec<_>>>()?;
                let w = parse_rational(row[k + 1]).map_err(at(l))?;
                h.add_hyperedge(vs, w).map_err(at(l))?;
            }
            Ok(Instance::Hypergraph(h))
        }
        "bipartite" => {
            arity(4)?;
            let (nl, nr, m) = (
                num(hl, header[1])?,
                num(hl, header[2])?,
                num(hl, header[3])?,
            );
            let mut edges = Vec::with_capacity(m);
            for (l, row) in body(m)? {
                if row.len() != 2 {
                    return Err(Error::Parse {
                        line: l,
                        msg: "bipartite rows are `u v`".into(),
                    });
                }
                edges.push((num(l, row[0])?, num(l, row[1])?));
            }
            BipartiteGraph::new(nl, nr, edges)
                .map(Instance::Bipartite)
                .map_err(at(hl))
        }
        other => Err(Error::Parse {
            line: hl,
            msg: format!("unknown instance kind `{other}`"),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::number::rat;

    #[test]
    fn round_trips() {
        let src = "# triangle\ngraph 3 3\n0 1 1\n1 2 1/2\n0 2 2.5 # decimal\n";
        let inst = parse(src).unwrap();
        let Instance::Graph(g) = &inst else { panic!() };
        assert_eq!(g.weight(2), &rat(5, 2));
        let text = inst.to_text();
        assert_eq!(parse(&text).unwrap(), inst);
        assert_eq!(parse(&text).unwrap().to_text(), text);

        let h = parse("hypergraph 4 2\n3 0 1 2 2\n1 3 1/3\n").unwrap();
        assert_eq!(parse(&h.to_text()).unwrap(), h);

        let b = parse("bipartite 2 1 2\n0 0\n1 0\n").unwrap();
        assert_eq!(parse(&b.to_text()).unwrap(), b);
    }

    #[test]
    fn reports_lines() {
        assert!(matches!(
            parse("graph 2 1\n0 5 1\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse("graph 2 2\n0 1 1\n"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(parse("tree 3"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(
            parse("graph 2 1\n0 1 x\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(parse("").is_err());
    }
}
