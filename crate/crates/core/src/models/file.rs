//! Line-oriented text formats for MCMs and MDMs.
//!
//! ```text
//! # comment
//! val: 0 1
//! atoms: p q
//! states: all            # or `states:` followed by one `{p,q}` per line
//! functions:
//! constraint: p -> =1    # either constraint lines ...
//! f: {}=0; {p}=1; ...    # ... or explicit rows, every state exactly once
//! point: state={p} function=f
//! ```
//!
//! Functions defined by constraints are named `f0, f1, …` in table order.
//! A `functions:` section with no rows denotes the inconsistent knowledge left
//! by an update that discarded every classifier.
//!
//! MDM files replace `states`/`functions` by `worlds:` (lines `w: {p} =1`),
//! `relI:` and `relF:` (classes as `{w0,w1}`; unlisted worlds are
//! singletons) and an optional `point: w`.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::models::mcm::{
    build_mcm, ClassifierFn, ExplicitFn, FunctionSpec, InputInstance, Knowledge, Mcm, Point,
    StateSpec,
};
use crate::models::mdm::{Mdm, Partition};
use crate::signature::Signature;
use crate::syntax::parse_formula;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelDoc {
    pub knowledge: Knowledge,
    pub point: Option<Point>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MdmDoc {
    pub mdm: Mdm,
    pub point: Option<usize>,
}

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::ModelFile {
        line,
        msg: msg.into(),
    }
}

fn at_line(line: usize) -> impl Fn(Error) -> Error {
    move |e| match e {
        e @ Error::ModelFile { .. } => e,
        e => err(line, e.to_string()),
    }
}

/// Non-empty lines with comments removed, numbered from 1.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

fn split_list(s: &str) -> Vec<&str> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .collect()
}

/// Parses `{a,b}` at the start of `s`, returning the names and the rest.
fn take_set(s: &str) -> Option<(Vec<&str>, &str)> {
    let s = s.trim_start();
    let rest = s.strip_prefix('{')?;
    let close = rest.find('}')?;
    Some((split_list(&rest[..close]), &rest[close + 1..]))
}

fn parse_set(sig: &Signature, s: &str, line: usize) -> Result<InputInstance> {
    match take_set(s) {
        Some((names, rest)) if rest.trim().is_empty() => names
            .iter()
            .try_fold(0u64, |m, n| Ok(m | 1 << sig.atom(n)?))
            .map_err(at_line(line)),
        _ => Err(err(line, format!("expected a set like {{p,q}}, got `{s}`"))),
    }
}

fn is_name(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

struct Header {
    values: Option<Vec<String>>,
    atoms: Option<Vec<String>>,
}

impl Header {
    fn take(&mut self, key: &str, rest: &str, line: usize) -> Result<bool> {
        let slot = match key {
            "val" => &mut self.values,
            "atoms" => &mut self.atoms,
            _ => return Ok(false),
        };
        if slot.is_some() {
            return Err(err(line, format!("`{key}:` given twice")));
        }
        *slot = Some(split_list(rest).into_iter().map(String::from).collect());
        Ok(true)
    }

    fn sig(&self, line: usize) -> Result<Signature> {
        match (&self.atoms, &self.values) {
            (Some(a), Some(v)) => Signature::new(a.clone(), v.clone()).map_err(at_line(line)),
            _ => Err(err(line, "`val:` and `atoms:` must come first")),
        }
    }
}

#[derive(PartialEq)]
enum Section {
    Header,
    States,
    Functions,
    Done,
}

pub fn parse_model_file(text: &str) -> Result<ModelDoc> {
    let mut header = Header {
        values: None,
        atoms: None,
    };
    let mut sig: Option<Signature> = None;
    let mut section = Section::Header;
    let mut states: Option<StateSpec> = None;
    let mut listed: Vec<InputInstance> = Vec::new();
    let mut constraints = Vec::new();
    let mut explicit: Vec<ExplicitFn> = Vec::new();
    let mut saw_functions = false;
    let mut point_line: Option<(usize, String)> = None;
    let mut last_line = 0;

    for (n, l) in lines(text) {
        last_line = n;
        let (key, rest) = match l.split_once(':') {
            Some((k, r)) if !l.starts_with('{') => (k.trim(), r.trim()),
            _ => ("", l),
        };
        if section == Section::Done {
            return Err(err(n, "nothing may follow the `point:` line"));
        }
        if header.take(key, rest, n)? {
            if section != Section::Header {
                return Err(err(n, format!("`{key}:` must precede states and functions")));
            }
            continue;
        }
        match key {
            "states" => {
                if states.is_some() {
                    return Err(err(n, "`states:` given twice"));
                }
                sig = Some(header.sig(n)?);
                if rest == "all" {
                    states = Some(StateSpec::All);
                    section = Section::Header;
                } else if rest.is_empty() {
                    states = Some(StateSpec::List(Vec::new()));
                    section = Section::States;
                } else {
                    return Err(err(n, "expected `states: all` or `states:` on its own line"));
                }
            }
            "functions" => {
                if states.is_none() {
                    return Err(err(n, "`states:` must precede `functions:`"));
                }
                if saw_functions {
                    return Err(err(n, "`functions:` given twice"));
                }
                if !rest.is_empty() {
                    return Err(err(n, "`functions:` must be on its own line"));
                }
                saw_functions = true;
                section = Section::Functions;
            }
            "point" => {
                point_line = Some((n, rest.to_string()));
                section = Section::Done;
            }
            "constraint" if section == Section::Functions => {
                let sig = sig.as_ref().expect("signature set with states");
                constraints.push(parse_formula(rest, sig).map_err(at_line(n))?);
            }
            "" if section == Section::States => {
                let sig = sig.as_ref().expect("signature set with states");
                listed.push(parse_set(sig, l, n)?);
            }
            name if section == Section::Functions && is_name(name) => {
                let sig = sig.as_ref().expect("signature set with states");
                let mut rows = Vec::new();
                for entry in rest.split(';').map(str::trim).filter(|e| !e.is_empty()) {
                    let (set, value) = entry
                        .split_once('=')
                        .ok_or_else(|| err(n, format!("expected `{{..}}=value`, got `{entry}`")))?;
                    let s = parse_set(sig, set, n)?;
                    let v = sig.value(value.trim()).map_err(at_line(n))?;
                    rows.push((s, v));
                }
                if explicit.iter().any(|f| f.name.as_deref() == Some(name)) {
                    return Err(err(n, format!("duplicate function name `{name}`")));
                }
                explicit.push(ExplicitFn {
                    name: Some(name.to_string()),
                    rows,
                });
            }
            _ => return Err(err(n, format!("unexpected line `{l}`"))),
        }
    }

    let sig = sig.ok_or_else(|| err(last_line, "missing `states:`"))?;
    if !saw_functions {
        return Err(err(last_line, "missing `functions:`"));
    }
    let states = match states.expect("set with sig") {
        StateSpec::List(_) => {
            let set: BTreeSet<u64> = listed.iter().copied().collect();
            if set.len() != listed.len() {
                return Err(err(last_line, "a state is listed twice"));
            }
            if listed.is_empty() {
                return Err(err(last_line, "the state list is empty"));
            }
            StateSpec::List(listed)
        }
        all => all,
    };
    if !constraints.is_empty() && !explicit.is_empty() {
        return Err(err(last_line, "mix of constraint and explicit function lines"));
    }
    let knowledge = if constraints.is_empty() && explicit.is_empty() {
        let states = match states {
            StateSpec::All => (0..1u64 << sig.num_atoms()).collect(),
            StateSpec::List(mut l) => {
                l.sort_unstable();
                l
            }
        };
        Knowledge::Inconsistent { sig, states }
    } else {
        let spec = if constraints.is_empty() {
            FunctionSpec::Explicit(explicit)
        } else {
            FunctionSpec::Constraints(constraints)
        };
        let model = build_mcm(&sig, &states, &spec).map_err(at_line(last_line))?;
        Knowledge::Consistent(with_auto_names(model))
    };

    let point = match point_line {
        None => None,
        Some((n, text)) => {
            let model = knowledge.model().map_err(at_line(n))?;
            Some(parse_point(model, &text, n)?)
        }
    };
    Ok(ModelDoc { knowledge, point })
}

fn parse_point(model: &Mcm, text: &str, line: usize) -> Result<Point> {
    let rest = text
        .trim()
        .strip_prefix("state=")
        .ok_or_else(|| err(line, "expected `point: state={..} function=name`"))?;
    let (names, rest) =
        take_set(rest).ok_or_else(|| err(line, "expected a state set after `state=`"))?;
    let mask = names
        .iter()
        .try_fold(0u64, |m, n| Ok(m | 1 << model.sig().atom(n)?))
        .map_err(at_line(line))?;
    let fname = rest
        .trim()
        .strip_prefix("function=")
        .ok_or_else(|| err(line, "expected `function=name`"))?
        .trim();
    let state = model
        .state_index(mask)
        .ok_or_else(|| err(line, format!("{} is not a state", model.sig().render_set(mask))))?;
    let function = model
        .function_index(fname)
        .ok_or_else(|| err(line, format!("no function named `{fname}`")))?;
    Ok(Point { state, function })
}

/// Names every unnamed function `f<k>` by table order, skipping names
/// already taken.
pub fn with_auto_names(model: Mcm) -> Mcm {
    if model.functions().iter().all(|f| f.name.is_some()) {
        return model;
    }
    let taken: BTreeSet<String> = model
        .functions()
        .iter()
        .filter_map(|f| f.name.clone())
        .collect();
    let mut unnamed: Vec<usize> = (0..model.num_functions())
        .filter(|&i| model.functions()[i].name.is_none())
        .collect();
    unnamed.sort_by(|&a, &b| model.functions()[a].table.cmp(&model.functions()[b].table));
    let width = (unnamed.len().saturating_sub(1)).to_string().len();
    let mut fns: Vec<ClassifierFn> = model.functions().to_vec();
    for (k, &i) in unnamed.iter().enumerate() {
        let mut name = format!("f{k:0width$}");
        while taken.contains(&name) {
            name.push('_');
        }
        fns[i].name = Some(name);
    }
    Mcm::new(model.sig().clone(), model.states().to_vec(), fns).expect("renaming keeps validity")
}

fn header_text(sig: &Signature) -> String {
    format!("val: {}\natoms: {}\n", sig.values().join(" "), sig.atoms().join(" "))
}

fn states_text(sig: &Signature, states: &[InputInstance]) -> String {
    let full = sig.num_atoms() < 64 && states.len() == 1usize << sig.num_atoms();
    if full {
        return "states: all\n".into();
    }
    let mut out = String::from("states:\n");
    for &s in states {
        out.push_str(&sig.render_set(s));
        out.push('\n');
    }
    out
}

/// Canonical text of a model: functions sorted by name then table, every
/// function written as explicit rows in state order.
pub fn render_model_file(knowledge: &Knowledge, point: Option<Point>) -> String {
    let sig = knowledge.sig();
    let mut out = header_text(sig);
    out.push_str(&states_text(sig, knowledge.states()));
    out.push_str("functions:\n");
    if let Knowledge::Consistent(model) = knowledge {
        let model = with_auto_names(model.clone());
        let mut order: Vec<usize> = (0..model.num_functions()).collect();
        order.sort_by(|&a, &b| model.functions()[a].cmp(&model.functions()[b]));
        for &f in &order {
            let rows: Vec<String> = model
                .states()
                .iter()
                .enumerate()
                .map(|(s, &mask)| {
                    format!("{}={}", sig.render_set(mask), sig.values()[model.value(f, s)])
                })
                .collect();
            let _ = writeln!(out, "{}: {}", model.function_label(f), rows.join("; "));
        }
        if let Some(p) = point {
            let _ = writeln!(
                out,
                "point: state={} function={}",
                sig.render_set(model.states()[p.state]),
                model.function_label(p.function)
            );
        }
    }
    out
}

pub fn parse_mdm_file(text: &str) -> Result<MdmDoc> {
    let mut header = Header {
        values: None,
        atoms: None,
    };
    let mut sig: Option<Signature> = None;
    let mut in_worlds = false;
    let mut names: Vec<String> = Vec::new();
    let mut labels = Vec::new();
    let mut decisions = Vec::new();
    let mut rel_i: Option<(usize, String)> = None;
    let mut rel_f: Option<(usize, String)> = None;
    let mut point: Option<(usize, String)> = None;
    let mut last_line = 0;

    for (n, l) in lines(text) {
        last_line = n;
        let (key, rest) = l
            .split_once(':')
            .map(|(k, r)| (k.trim(), r.trim()))
            .ok_or_else(|| err(n, format!("unexpected line `{l}`")))?;
        if header.take(key, rest, n)? {
            if sig.is_some() {
                return Err(err(n, format!("`{key}:` must precede `worlds:`")));
            }
            continue;
        }
        match key {
            "worlds" => {
                if sig.is_some() {
                    return Err(err(n, "`worlds:` given twice"));
                }
                sig = Some(header.sig(n)?);
                in_worlds = true;
            }
            "relI" | "relF" | "point" => {
                in_worlds = false;
                let slot = match key {
                    "relI" => &mut rel_i,
                    "relF" => &mut rel_f,
                    _ => &mut point,
                };
                if slot.is_some() {
                    return Err(err(n, format!("`{key}:` given twice")));
                }
                *slot = Some((n, rest.to_string()));
            }
            name if in_worlds && is_name(name) => {
                let sig = sig.as_ref().expect("set with worlds");
                let (set, value) = take_set(rest)
                    .ok_or_else(|| err(n, "expected `w: {..} =value`"))?;
                let mask = set
                    .iter()
                    .try_fold(0u64, |m, a| Ok(m | 1 << sig.atom(a)?))
                    .map_err(at_line(n))?;
                let value = value
                    .trim()
                    .strip_prefix('=')
                    .ok_or_else(|| err(n, "expected `=value` after the input set"))?;
                let v = sig.value(value.trim()).map_err(at_line(n))?;
                if names.iter().any(|w| w == name) {
                    return Err(err(n, format!("duplicate world `{name}`")));
                }
                names.push(name.to_string());
                labels.push(mask);
                decisions.push(v);
            }
            _ => return Err(err(n, format!("unexpected line `{l}`"))),
        }
    }
    let sig = sig.ok_or_else(|| err(last_line, "missing `worlds:`"))?;
    let world = |name: &str, line: usize| {
        names
            .iter()
            .position(|w| w == name)
            .ok_or_else(|| err(line, format!("unknown world `{name}`")))
    };
    let relation = |spec: &Option<(usize, String)>| -> Result<Partition> {
        let Some((line, text)) = spec else {
            return Ok(Partition::identity(names.len()));
        };
        let mut classes = Vec::new();
        let mut rest = text.as_str();
        while !rest.trim().is_empty() {
            let (members, tail) = take_set(rest)
                .ok_or_else(|| err(*line, "expected classes like {w0,w1} {w2}"))?;
            classes.push(
                members
                    .iter()
                    .map(|m| world(m, *line))
                    .collect::<Result<Vec<_>>>()?,
            );
            rest = tail;
        }
        Partition::from_classes(names.len(), &classes).map_err(at_line(*line))
    };
    let rel_i_p = relation(&rel_i)?;
    let rel_f_p = relation(&rel_f)?;
    let mut mdm = Mdm::new(sig, labels, decisions, rel_i_p, rel_f_p).map_err(at_line(last_line))?;
    let point = point.map(|(n, p)| world(p.trim(), n)).transpose()?;
    mdm.names = Some(names);
    Ok(MdmDoc { mdm, point })
}

pub fn render_mdm_file(m: &Mdm, point: Option<usize>) -> String {
    let mut out = header_text(&m.sig);
    out.push_str("worlds:\n");
    for w in 0..m.num_worlds() {
        let _ = writeln!(
            out,
            "{}: {} ={}",
            m.world_name(w),
            m.sig.render_set(m.labels[w]),
            m.sig.values()[m.decisions[w]]
        );
    }
    for (key, rel) in [("relI", &m.rel_i), ("relF", &m.rel_f)] {
        let classes: Vec<String> = rel
            .classes()
            .iter()
            .map(|c| {
                let ws: Vec<String> = c.iter().map(|&w| m.world_name(w)).collect();
                format!("{{{}}}", ws.join(","))
            })
            .collect();
        let _ = writeln!(out, "{key}: {}", classes.join(" "));
    }
    if let Some(w) = point {
        let _ = writeln!(out, "point: {}", m.world_name(w));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXPLICIT: &str = "\
val: 0 1
atoms: p q
states:
{}
{p}
functions:
g: {}=0; {p}=1
h: {p}=0; {}=0   # order of rows is free
point: state={p} function=g
";

    #[test]
    fn explicit_file_round_trips() {
        let doc = parse_model_file(EXPLICIT).unwrap();
        let m = doc.knowledge.model().unwrap();
        assert_eq!(m.states(), &[0, 1]);
        assert_eq!(doc.point, Some(Point { state: 1, function: 0 }));
        let text = render_model_file(&doc.knowledge, doc.point);
        assert_eq!(
            text,
            "val: 0 1\natoms: p q\nstates:\n{}\n{p}\nfunctions:\n\
             g: {}=0; {p}=1\nh: {}=0; {p}=0\npoint: state={p} function=g\n"
        );
        let again = parse_model_file(&text).unwrap();
        assert_eq!(render_model_file(&again.knowledge, again.point), text);
    }

    #[test]
    fn constraint_functions_get_names() {
        let text = "val: 0 1\natoms: p\nstates: all\nfunctions:\nconstraint: p -> =1\n\
                    point: state={p} function=f1\n";
        let doc = parse_model_file(text).unwrap();
        let m = doc.knowledge.model().unwrap();
        assert_eq!(m.num_functions(), 2);
        assert_eq!(m.function_index("f0"), Some(0));
        assert_eq!(doc.point.unwrap().function, 1);
    }

    #[test]
    fn errors_report_lines() {
        let bad = "val: 0 1\natoms: p\nstates: all\nfunctions:\nf: {}=0; {q}=1\n";
        match parse_model_file(bad) {
            Err(Error::ModelFile { line, .. }) => assert_eq!(line, 5),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_model_file("atoms: p\nstates: all\nfunctions:\n").is_err());
    }

    #[test]
    fn empty_function_section_is_inconsistent() {
        let doc = parse_model_file("val: 0 1\natoms: p\nstates: all\nfunctions:\n").unwrap();
        assert!(!doc.knowledge.is_consistent());
        assert_eq!(
            render_model_file(&doc.knowledge, None),
            "val: 0 1\natoms: p\nstates: all\nfunctions:\n"
        );
    }

    #[test]
    fn mdm_file_round_trips() {
        let text = "val: 0 1\natoms: p\nworlds:\nu: {p} =1\nv: {p} =0\nrelI: {u,v}\nrelF: {u} {v}\npoint: v\n";
        let doc = parse_mdm_file(text).unwrap();
        assert_eq!(doc.mdm.num_worlds(), 2);
        assert!(doc.mdm.rel_i.related(0, 1));
        assert_eq!(doc.point, Some(1));
        assert_eq!(render_mdm_file(&doc.mdm, doc.point), text);
    }
}
