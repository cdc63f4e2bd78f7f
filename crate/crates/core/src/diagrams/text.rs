//! Text form of a single diagram:
//! `strands:[[h1,h2],[h3]]; vertices:[[h4,h5,h6]]; edges:[[h1,h4],...]`,
//! or `colors:{h1:a,...}; ...` for colored diagrams.

use std::collections::HashMap;

use super::elt::Signature;
use super::{JDiagram, Raw};
use crate::error::{Error, Result};

pub fn format_diagram(d: &JDiagram, sig: &Signature) -> String {
    let raw = d.to_raw();
    let name = |t: u32| format!("h{t}");
    let list = |v: &[u32]| v.iter().map(|&t| name(t)).collect::<Vec<_>>().join(",");
    let head = if d.colored {
        let names: Vec<String> = match sig {
            Signature::Colors(cs) => cs.clone(),
            _ => Vec::new(),
        };
        let items: Vec<String> = raw
            .colors
            .iter()
            .map(|&(t, c)| {
                format!(
                    "{}:{}",
                    name(t),
                    names
                        .get(c as usize)
                        .cloned()
                        .unwrap_or_else(|| c.to_string())
                )
            })
            .collect();
        format!("colors:{{{}}}", items.join(","))
    } else {
        let items: Vec<String> = raw
            .strands
            .iter()
            .map(|s| format!("[{}]", list(s)))
            .collect();
        format!("strands:[{}]", items.join(","))
    };
    let verts: Vec<String> = raw
        .vertices
        .iter()
        .map(|v| format!("[{}]", list(v)))
        .collect();
    let edges: Vec<String> = raw
        .edges
        .iter()
        .map(|&(a, b)| format!("[{},{}]", name(a), name(b)))
        .collect();
    format!(
        "{head}; vertices:[{}]; edges:[{}]",
        verts.join(","),
        edges.join(",")
    )
}

struct Names(HashMap<String, u32>);

impl Names {
    fn id(&mut self, s: &str) -> Result<u32> {
        let s = s.trim();
        if s.is_empty() || !s.chars().all(|c| c.is_alphanumeric() || c == '_') {
            return Err(Error::Parse(format!("bad half-edge name {s:?}")));
        }
        let n = self.0.len() as u32;
        Ok(*self.0.entry(s.to_string()).or_insert(n))
    }
}

/// Split `[[x,y],[z]]` into inner groups.
fn groups(s: &str) -> Result<Vec<Vec<String>>> {
    let s = s.trim();
    let inner = s
        .strip_prefix('[')
        .and_then(|t| t.strip_suffix(']'))
        .ok_or_else(|| Error::Parse(format!("expected [...], got {s:?}")))?
        .trim();
    let mut out = Vec::new();
    let mut rest = inner;
    while !rest.is_empty() {
        let r = rest
            .strip_prefix('[')
            .ok_or_else(|| Error::Parse(format!("expected [ at {rest:?}")))?;
        let end = r
            .find(']')
            .ok_or_else(|| Error::Parse("unclosed [".into()))?;
        let items: Vec<String> = r[..end]
            .split(',')
            .map(|x| x.trim().to_string())
            .filter(|x| !x.is_empty())
            .collect();
        out.push(items);
        rest = r[end + 1..].trim_start();
        if let Some(t) = rest.strip_prefix(',') {
            rest = t.trim_start();
        } else if !rest.is_empty() {
            return Err(Error::Parse(format!("expected , at {rest:?}")));
        }
    }
    Ok(out)
}

/// Parse the text form. Colors are resolved against `colors` (as in a `Colors` signature).
pub fn parse_diagram(s: &str, colors: &[String]) -> Result<Raw> {
    let mut names = Names(HashMap::new());
    let mut raw = Raw::default();
    let mut seen_head = false;
    for part in s.split(';') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (key, val) = part
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("expected key:value in {part:?}")))?;
        match key.trim() {
            "strands" => {
                seen_head = true;
                for g in groups(val)? {
                    raw.strands
                        .push(g.iter().map(|x| names.id(x)).collect::<Result<_>>()?);
                }
            }
            "colors" => {
                seen_head = true;
                raw.colored = true;
                let v = val.trim();
                let inner = v
                    .strip_prefix('{')
                    .and_then(|t| t.strip_suffix('}'))
                    .ok_or_else(|| Error::Parse(format!("expected {{...}}, got {v:?}")))?;
                for item in inner.split(',').map(str::trim).filter(|x| !x.is_empty()) {
                    let (h, c) = item
                        .split_once(':')
                        .ok_or_else(|| Error::Parse(format!("expected h:color in {item:?}")))?;
                    let ci = colors
                        .iter()
                        .position(|x| x == c.trim())
                        .ok_or_else(|| Error::UnknownLetter(c.trim().to_string()))?;
                    raw.colors.push((names.id(h)?, ci as u8));
                }
            }
            "vertices" => {
                for g in groups(val)? {
                    if g.len() != 3 {
                        return Err(Error::Parse(format!(
                            "vertex needs 3 half-edges, got {}",
                            g.len()
                        )));
                    }
                    raw.vertices
                        .push([names.id(&g[0])?, names.id(&g[1])?, names.id(&g[2])?]);
                }
            }
            "edges" => {
                for g in groups(val)? {
                    if g.len() != 2 {
                        return Err(Error::Parse(format!(
                            "edge needs 2 half-edges, got {}",
                            g.len()
                        )));
                    }
                    raw.edges.push((names.id(&g[0])?, names.id(&g[1])?));
                }
            }
            k => return Err(Error::Parse(format!("unknown section {k:?}"))),
        }
    }
    if !seen_head {
        return Err(Error::Parse("missing strands: or colors: section".into()));
    }
    Ok(raw)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let d = super::super::make_jn(4).unwrap();
        let sig = Signature::Strands(2);
        let s = format_diagram(&d, &sig);
        let back = parse_diagram(&s, &[]).unwrap().labeled().unwrap();
        assert_eq!(back.canonical().unwrap(), d.canonical().unwrap());
        let c = parse_diagram(
            "colors:{x:a,y:b}; vertices:[]; edges:[[x,y]]",
            &["a".into(), "b".into()],
        )
        .unwrap();
        let cd = c.labeled().unwrap();
        assert_eq!(
            format_diagram(&cd, &Signature::ab()),
            "colors:{h0:a,h1:b}; vertices:[]; edges:[[h0,h1]]"
        );
        assert!(parse_diagram("strands:[[x]]; edges:[[x]]", &[]).is_err());
        assert!(parse_diagram("colors:{x:q}; edges:[]", &["a".into()]).is_err());
        assert!(parse_diagram("strands:[[x,y]]; edges:[[x,y]]", &[])
            .unwrap()
            .labeled()
            .is_ok());
        assert!(parse_diagram("strands:[[x,y]]; edges:[[x,z]]", &[])
            .unwrap()
            .labeled()
            .is_err());
    }
}
