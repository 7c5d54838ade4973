// SPDX-License-Identifier: Apache-2.0

//! ISCAS `.bench` reader and writer.

use std::collections::HashMap;
use std::fmt::Write;

use super::{Circuit, Gate, GateId, GateKind, NetlistError};

enum Decl {
    Input(String),
    Output(String),
    Gate {
        name: String,
        kind: GateKind,
        args: Vec<String>,
    },
    Dff {
        name: String,
        arg: String,
    },
}

/// Parses ISCAS `.bench` text into a validated, levelized [`Circuit`].
///
/// Gate ids follow declaration order. `DFF` cells are cut for full-scan
/// operation: the flop output becomes a pseudo primary input and the data pin
/// a pseudo primary output.
pub fn parse_bench(text: &str) -> Result<Circuit, NetlistError> {
    let mut gates: Vec<Gate> = Vec::new();
    let mut lines: Vec<usize> = Vec::new();
    let mut pending: Vec<(usize, Vec<String>)> = Vec::new();
    let mut names: HashMap<String, GateId> = HashMap::new();
    let mut outputs_seen: HashMap<String, ()> = HashMap::new();

    let add = |gates: &mut Vec<Gate>,
                   lines: &mut Vec<usize>,
                   pending: &mut Vec<(usize, Vec<String>)>,
                   line: usize,
                   name: String,
                   kind: GateKind,
                   args: Vec<String>| {
        let id = GateId::new(gates.len());
        gates.push(Gate {
            id,
            kind,
            fanin: Vec::new(),
            fanout: Vec::new(),
            name,
        });
        lines.push(line);
        pending.push((line, args));
        id
    };

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let Some(decl) = parse_line(raw, line)? else {
            continue;
        };
        let define = |names: &mut HashMap<String, GateId>, name: &str, id: GateId| {
            if names.insert(name.to_string(), id).is_some() {
                return Err(NetlistError::Syntax {
                    line,
                    message: format!("net '{name}' defined twice"),
                });
            }
            Ok(())
        };
        match decl {
            Decl::Input(name) => {
                let id = add(&mut gates, &mut lines, &mut pending, line, name.clone(), GateKind::Input, vec![]);
                define(&mut names, &name, id)?;
            }
            Decl::Output(name) => {
                if outputs_seen.insert(name.clone(), ()).is_none() {
                    add(&mut gates, &mut lines, &mut pending, line, name.clone(), GateKind::Output, vec![name]);
                }
            }
            Decl::Gate { name, kind, args } => {
                let id = add(&mut gates, &mut lines, &mut pending, line, name.clone(), kind, args);
                define(&mut names, &name, id)?;
            }
            Decl::Dff { name, arg } => {
                let id = add(&mut gates, &mut lines, &mut pending, line, name.clone(), GateKind::Input, vec![]);
                define(&mut names, &name, id)?;
                if outputs_seen.insert(arg.clone(), ()).is_none() {
                    add(&mut gates, &mut lines, &mut pending, line, arg.clone(), GateKind::Output, vec![arg]);
                }
            }
        }
    }

    for (gate, (line, args)) in gates.iter_mut().zip(pending) {
        gate.fanin = args
            .iter()
            .map(|a| {
                names.get(a).copied().ok_or_else(|| NetlistError::UndefinedNet {
                    line,
                    name: a.clone(),
                })
            })
            .collect::<Result<_, _>>()?;
    }
    Circuit::from_parts(gates, &lines)
}

fn syntax(line: usize, message: impl Into<String>) -> NetlistError {
    NetlistError::Syntax {
        line,
        message: message.into(),
    }
}

fn valid_name(name: &str) -> bool {
    !name.is_empty()
        && !name
            .chars()
            .any(|c| c.is_whitespace() || matches!(c, '(' | ')' | ',' | '=' | '#'))
}

/// Splits `KEYWORD(a, b, ...)` into the keyword and its trimmed arguments.
fn call(text: &str, line: usize) -> Result<(&str, Vec<String>), NetlistError> {
    let open = text.find('(').ok_or_else(|| syntax(line, "expected '('"))?;
    let close = text.rfind(')').ok_or_else(|| syntax(line, "expected ')'"))?;
    if close < open || !text[close + 1..].trim().is_empty() {
        return Err(syntax(line, "unbalanced parentheses"));
    }
    let keyword = text[..open].trim();
    let inner = &text[open + 1..close];
    let args: Vec<String> = inner.split(',').map(|a| a.trim().to_string()).collect();
    if let Some(bad) = args.iter().find(|a| !valid_name(a)) {
        return Err(syntax(line, format!("bad net name '{bad}'")));
    }
    Ok((keyword, args))
}

fn parse_line(raw: &str, line: usize) -> Result<Option<Decl>, NetlistError> {
    let text = raw.split('#').next().unwrap_or("").trim();
    if text.is_empty() {
        return Ok(None);
    }
    if let Some((lhs, rhs)) = text.split_once('=') {
        let name = lhs.trim();
        if !valid_name(name) {
            return Err(syntax(line, format!("bad net name '{name}'")));
        }
        let (keyword, mut args) = call(rhs, line)?;
        if keyword.eq_ignore_ascii_case("DFF") {
            if args.len() != 1 {
                return Err(syntax(line, "DFF takes exactly one input"));
            }
            return Ok(Some(Decl::Dff {
                name: name.to_string(),
                arg: args.remove(0),
            }));
        }
        let kind = GateKind::from_keyword(keyword)
            .ok_or_else(|| syntax(line, format!("unknown gate type '{keyword}'")))?;
        return Ok(Some(Decl::Gate {
            name: name.to_string(),
            kind,
            args,
        }));
    }
    let (keyword, mut args) = call(text, line)?;
    if args.len() != 1 {
        return Err(syntax(line, format!("{keyword} takes exactly one net")));
    }
    if keyword.eq_ignore_ascii_case("INPUT") {
        Ok(Some(Decl::Input(args.remove(0))))
    } else if keyword.eq_ignore_ascii_case("OUTPUT") {
        Ok(Some(Decl::Output(args.remove(0))))
    } else {
        Err(syntax(line, format!("unknown declaration '{keyword}'")))
    }
}

/// Serializes a circuit back to `.bench` text. Logic gates are emitted in
/// topological order.
pub fn write_bench(circuit: &Circuit) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# {} inputs, {} outputs, {} gates",
        circuit.primary_inputs().len(),
        circuit.primary_outputs().len(),
        circuit.gates().len() - circuit.primary_inputs().len() - circuit.primary_outputs().len()
    );
    for &pi in circuit.primary_inputs() {
        let _ = writeln!(out, "INPUT({})", circuit.name(pi));
    }
    for &po in circuit.primary_outputs() {
        let _ = writeln!(out, "OUTPUT({})", circuit.name(circuit.fanin(po)[0]));
    }
    for &id in circuit.topo_order() {
        let gate = circuit.gate(id);
        if matches!(gate.kind, GateKind::Input | GateKind::Output) {
            continue;
        }
        let args: Vec<&str> = gate.fanin.iter().map(|&f| circuit.name(f)).collect();
        let _ = writeln!(out, "{} = {}({})", gate.name, gate.kind, args.join(", "));
    }
    out
}
