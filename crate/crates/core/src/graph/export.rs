//! DOT, GraphML and edge-list serialisation of movement graphs.
//!
//! Node attributes: `name`, `support`, `mainstream`. Arc attribute: `weight`,
//! written in shortest round-trip form so that re-import is exact.

use std::collections::{BTreeMap, HashMap};
use std::io::{Read, Write};

use quick_xml::events::Event;
use quick_xml::escape::escape;

use super::{MainstreamSelection, MovementGraph, Node};
use crate::error::{Error, Result};

/// A graph read back from disk together with its mainstream flags.
#[derive(Debug, Clone, PartialEq)]
pub struct ImportedGraph {
    pub graph: MovementGraph,
    /// Flagged nodes ordered by support descending, then id.
    pub mainstream: Vec<String>,
}

impl ImportedGraph {
    fn new(graph: MovementGraph, flagged: Vec<String>) -> Self {
        let mut mainstream = flagged;
        mainstream.sort_by(|a, b| {
            let (na, nb) = (graph.node(a).unwrap(), graph.node(b).unwrap());
            nb.support.cmp(&na.support).then_with(|| a.cmp(b))
        });
        ImportedGraph { graph, mainstream }
    }
}

fn dot_quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

pub fn write_dot<W: Write>(
    graph: &MovementGraph,
    selection: Option<&MainstreamSelection>,
    mut sink: W,
) -> Result<()> {
    writeln!(sink, "digraph movement {{")?;
    for n in graph.nodes() {
        let flag = selection.is_some_and(|s| s.is_mainstream(&n.id));
        writeln!(
            sink,
            "  {} [label={}, support={}, mainstream={}];",
            dot_quote(&n.id),
            dot_quote(&n.name),
            n.support,
            flag
        )?;
    }
    for (s, t, w) in graph.arc_triples() {
        writeln!(sink, "  {} -> {} [weight={}];", dot_quote(s), dot_quote(t), w)?;
    }
    writeln!(sink, "}}")?;
    sink.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Id(String),
    Arrow,
    Punct(char),
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            chars: src.chars().peekable(),
            line: 1,
        }
    }

    fn error(&self, reason: impl Into<String>) -> Error {
        Error::Format {
            format: "DOT",
            line: self.line,
            reason: reason.into(),
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next();
        if c == Some('\n') {
            self.line += 1;
        }
        c
    }

    fn skip_trivia(&mut self) -> Result<()> {
        loop {
            match self.chars.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('#') => {
                    while !matches!(self.bump(), Some('\n') | None) {}
                }
                Some('/') => {
                    self.bump();
                    match self.bump() {
                        Some('/') => while !matches!(self.bump(), Some('\n') | None) {},
                        Some('*') => {
                            let mut prev = ' ';
                            loop {
                                match self.bump() {
                                    Some('/') if prev == '*' => break,
                                    Some(c) => prev = c,
                                    None => return Err(self.error("unterminated comment")),
                                }
                            }
                        }
                        _ => return Err(self.error("stray `/`")),
                    }
                }
                _ => return Ok(()),
            }
        }
    }

    fn next_token(&mut self) -> Result<Option<(Token, usize)>> {
        self.skip_trivia()?;
        let line = self.line;
        let Some(&c) = self.chars.peek() else {
            return Ok(None);
        };
        let token = match c {
            '"' => {
                self.bump();
                let mut s = String::new();
                loop {
                    match self.bump() {
                        Some('"') => break,
                        Some('\\') => match self.bump() {
                            Some('n') => s.push('\n'),
                            Some(e) => s.push(e),
                            None => return Err(self.error("unterminated string")),
                        },
                        Some(ch) => s.push(ch),
                        None => return Err(self.error("unterminated string")),
                    }
                }
                Token::Id(s)
            }
            '{' | '}' | '[' | ']' | '=' | ',' | ';' => {
                self.bump();
                Token::Punct(c)
            }
            _ => {
                let mut s = String::new();
                while let Some(&ch) = self.chars.peek() {
                    if ch.is_alphanumeric() || ch == '_' || ch == '.' || ch == '+' {
                        s.push(ch);
                        self.bump();
                    } else if ch == '-' {
                        let mut ahead = self.chars.clone();
                        ahead.next();
                        if ahead.peek() == Some(&'>') {
                            if s.is_empty() {
                                self.bump();
                                self.bump();
                                return Ok(Some((Token::Arrow, line)));
                            }
                            break;
                        }
                        s.push('-');
                        self.bump();
                    } else {
                        break;
                    }
                }
                if s.is_empty() {
                    return Err(self.error(format!("unexpected character `{c}`")));
                }
                Token::Id(s)
            }
        };
        Ok(Some((token, line)))
    }

    fn tokens(mut self) -> Result<Vec<(Token, usize)>> {
        let mut out = Vec::new();
        while let Some(t) = self.next_token()? {
            out.push(t);
        }
        Ok(out)
    }
}

struct DotParser {
    tokens: Vec<(Token, usize)>,
    pos: usize,
}

impl DotParser {
    fn line(&self) -> usize {
        self.tokens
            .get(self.pos)
            .or(self.tokens.last())
            .map_or(1, |t| t.1)
    }

    fn error(&self, reason: impl Into<String>) -> Error {
        Error::Format {
            format: "DOT",
            line: self.line(),
            reason: reason.into(),
        }
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|t| &t.0)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).map(|t| t.0.clone());
        self.pos += 1;
        t
    }

    fn expect_punct(&mut self, p: char) -> Result<()> {
        match self.next() {
            Some(Token::Punct(c)) if c == p => Ok(()),
            other => Err(self.error(format!("expected `{p}`, found {other:?}"))),
        }
    }

    fn expect_id(&mut self) -> Result<String> {
        match self.next() {
            Some(Token::Id(s)) => Ok(s),
            other => Err(self.error(format!("expected identifier, found {other:?}"))),
        }
    }

    fn attr_list(&mut self) -> Result<Vec<(String, String)>> {
        let mut attrs = Vec::new();
        while self.peek() == Some(&Token::Punct('[')) {
            self.next();
            loop {
                match self.peek() {
                    Some(Token::Punct(']')) => {
                        self.next();
                        break;
                    }
                    Some(Token::Punct(',')) | Some(Token::Punct(';')) => {
                        self.next();
                    }
                    _ => {
                        let key = self.expect_id()?;
                        self.expect_punct('=')?;
                        let value = self.expect_id()?;
                        attrs.push((key, value));
                    }
                }
            }
        }
        Ok(attrs)
    }
}

/// Reads a graph written by [`write_dot`]. Comments are allowed; every arc
/// endpoint must be declared as a node and every arc must carry a weight.
pub fn read_dot<R: Read>(mut source: R) -> Result<ImportedGraph> {
    let mut text = String::new();
    source.read_to_string(&mut text)?;
    let mut p = DotParser {
        tokens: Lexer::new(&text).tokens()?,
        pos: 0,
    };
    match p.next() {
        Some(Token::Id(kw)) if kw.eq_ignore_ascii_case("digraph") => {}
        Some(Token::Id(kw)) if kw.eq_ignore_ascii_case("strict") => {
            match p.next() {
                Some(Token::Id(kw)) if kw.eq_ignore_ascii_case("digraph") => {}
                _ => return Err(p.error("expected `digraph`")),
            }
        }
        _ => return Err(p.error("expected `digraph`")),
    }
    if let Some(Token::Id(_)) = p.peek() {
        p.next();
    }
    p.expect_punct('{')?;

    let mut nodes: BTreeMap<String, Node> = BTreeMap::new();
    let mut flagged = Vec::new();
    let mut arcs = Vec::new();
    loop {
        match p.next() {
            Some(Token::Punct('}')) => break,
            Some(Token::Punct(';')) => continue,
            Some(Token::Id(id)) => {
                if matches!(id.as_str(), "graph" | "node" | "edge")
                    && p.peek() == Some(&Token::Punct('['))
                {
                    p.attr_list()?;
                    continue;
                }
                match p.peek() {
                    Some(Token::Arrow) => {
                        p.next();
                        let target = p.expect_id()?;
                        let attrs = p.attr_list()?;
                        let weight = attrs
                            .iter()
                            .find(|(k, _)| k == "weight")
                            .ok_or_else(|| p.error(format!("arc `{id}` -> `{target}` has no weight")))?
                            .1
                            .parse::<f64>()
                            .map_err(|e| p.error(format!("bad weight: {e}")))?;
                        arcs.push((id, target, weight));
                    }
                    Some(Token::Punct('=')) => {
                        p.next();
                        p.expect_id()?;
                    }
                    _ => {
                        let attrs = p.attr_list()?;
                        let mut node = Node {
                            id: id.clone(),
                            name: id.clone(),
                            support: 0,
                        };
                        for (k, v) in attrs {
                            match k.as_str() {
                                "label" | "name" => node.name = v,
                                "support" => {
                                    node.support = v
                                        .parse()
                                        .map_err(|e| p.error(format!("bad support: {e}")))?
                                }
                                "mainstream" if v == "true" => flagged.push(id.clone()),
                                _ => {}
                            }
                        }
                        if nodes.insert(id.clone(), node).is_some() {
                            return Err(p.error(format!("node `{id}` declared twice")));
                        }
                    }
                }
            }
            None => return Err(p.error("missing closing `}`")),
            Some(other) => return Err(p.error(format!("unexpected {other:?}"))),
        }
    }
    let graph = MovementGraph::new(nodes.into_values().collect(), arcs)?;
    Ok(ImportedGraph::new(graph, flagged))
}

pub fn write_graphml<W: Write>(
    graph: &MovementGraph,
    selection: Option<&MainstreamSelection>,
    mut sink: W,
) -> Result<()> {
    writeln!(sink, r#"<?xml version="1.0" encoding="UTF-8"?>"#)?;
    writeln!(sink, r#"<graphml xmlns="http://graphml.graphdrawing.org/xmlns">"#)?;
    writeln!(sink, r#"  <key id="name" for="node" attr.name="name" attr.type="string"/>"#)?;
    writeln!(sink, r#"  <key id="support" for="node" attr.name="support" attr.type="long"/>"#)?;
    writeln!(sink, r#"  <key id="mainstream" for="node" attr.name="mainstream" attr.type="boolean"/>"#)?;
    writeln!(sink, r#"  <key id="weight" for="edge" attr.name="weight" attr.type="double"/>"#)?;
    writeln!(sink, r#"  <graph id="movement" edgedefault="directed">"#)?;
    for n in graph.nodes() {
        let flag = selection.is_some_and(|s| s.is_mainstream(&n.id));
        writeln!(
            sink,
            r#"    <node id="{}"><data key="name">{}</data><data key="support">{}</data><data key="mainstream">{}</data></node>"#,
            escape(n.id.as_str()),
            escape(n.name.as_str()),
            n.support,
            flag
        )?;
    }
    for (s, t, w) in graph.arc_triples() {
        writeln!(
            sink,
            r#"    <edge source="{}" target="{}"><data key="weight">{}</data></edge>"#,
            escape(s),
            escape(t),
            w
        )?;
    }
    writeln!(sink, "  </graph>")?;
    writeln!(sink, "</graphml>")?;
    sink.flush()?;
    Ok(())
}

fn xml_error(reason: impl Into<String>) -> Error {
    Error::Format {
        format: "GraphML",
        line: 0,
        reason: reason.into(),
    }
}

enum Element {
    Node(String),
    Edge(String, String),
}

/// Reads a graph written by [`write_graphml`].
pub fn read_graphml<R: Read>(mut source: R) -> Result<ImportedGraph> {
    let mut text = String::new();
    source.read_to_string(&mut text)?;
    let mut reader = quick_xml::Reader::from_str(&text);
    reader.config_mut().trim_text(true);

    let mut key_names: HashMap<String, String> = HashMap::new();
    let mut nodes: Vec<Node> = Vec::new();
    let mut flagged = Vec::new();
    let mut arcs: Vec<(String, String, f64)> = Vec::new();
    let mut current: Option<Element> = None;
    let mut current_weight: Option<f64> = None;
    let mut data_key: Option<String> = None;

    loop {
        let event = reader
            .read_event()
            .map_err(|e| xml_error(format!("at byte {}: {e}", reader.buffer_position())))?;
        match event {
            Event::Start(e) | Event::Empty(e) => {
                let mut attrs: HashMap<String, String> = HashMap::new();
                for a in e.attributes() {
                    let a = a.map_err(|e| xml_error(e.to_string()))?;
                    let key = String::from_utf8_lossy(a.key.as_ref()).into_owned();
                    let value = a
                        .unescape_value()
                        .map_err(|e| xml_error(e.to_string()))?
                        .into_owned();
                    attrs.insert(key, value);
                }
                let get = |k: &str| {
                    attrs
                        .get(k)
                        .cloned()
                        .ok_or_else(|| xml_error(format!("missing attribute `{k}`")))
                };
                match e.name().as_ref() {
                    b"key" => {
                        key_names.insert(get("id")?, get("attr.name")?);
                    }
                    b"node" => {
                        let id = get("id")?;
                        nodes.push(Node {
                            id: id.clone(),
                            name: id.clone(),
                            support: 0,
                        });
                        current = Some(Element::Node(id));
                    }
                    b"edge" => {
                        current = Some(Element::Edge(get("source")?, get("target")?));
                        current_weight = None;
                    }
                    b"data" => data_key = Some(get("key")?),
                    _ => {}
                }
            }
            Event::Text(t) => {
                let (Some(key), Some(element)) = (&data_key, &current) else {
                    continue;
                };
                let value = t.unescape().map_err(|e| xml_error(e.to_string()))?;
                let attr = key_names.get(key).map_or(key.as_str(), String::as_str);
                match (element, attr) {
                    (Element::Node(_), "name") => nodes.last_mut().unwrap().name = value.into_owned(),
                    (Element::Node(_), "support") => {
                        nodes.last_mut().unwrap().support = value
                            .parse()
                            .map_err(|e| xml_error(format!("bad support: {e}")))?
                    }
                    (Element::Node(id), "mainstream") if value == "true" => flagged.push(id.clone()),
                    (Element::Edge(..), "weight") => {
                        current_weight = Some(
                            value
                                .parse()
                                .map_err(|e| xml_error(format!("bad weight: {e}")))?,
                        )
                    }
                    _ => {}
                }
            }
            Event::End(e) => match e.name().as_ref() {
                b"data" => data_key = None,
                b"node" => current = None,
                b"edge" => {
                    if let Some(Element::Edge(s, t)) = current.take() {
                        let w = current_weight
                            .take()
                            .ok_or_else(|| xml_error(format!("edge `{s}` -> `{t}` has no weight")))?;
                        arcs.push((s, t, w));
                    }
                }
                _ => {}
            },
            Event::Eof => break,
            _ => {}
        }
    }
    let graph = MovementGraph::new(nodes, arcs)?;
    Ok(ImportedGraph::new(graph, flagged))
}

/// `source,target,weight` rows.
pub fn write_edge_csv<W: Write>(graph: &MovementGraph, sink: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(["source", "target", "weight"])?;
    for (s, t, weight) in graph.arc_triples() {
        w.write_record([s, t, &weight.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads an edge list. Nodes are the arc endpoints, named by id, with zero support.
pub fn read_edge_csv<R: Read>(source: R) -> Result<MovementGraph> {
    let mut reader = csv::Reader::from_reader(source);
    let mut arcs = Vec::new();
    let mut ids = std::collections::BTreeSet::new();
    for row in reader.deserialize::<(String, String, f64)>() {
        let (s, t, w) = row?;
        ids.insert(s.clone());
        ids.insert(t.clone());
        arcs.push((s, t, w));
    }
    let nodes = ids
        .into_iter()
        .map(|id| Node {
            name: id.clone(),
            id,
            support: 0,
        })
        .collect();
    MovementGraph::new(nodes, arcs)
}
