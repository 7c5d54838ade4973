// SPDX-License-Identifier: Apache-2.0

use super::{Circuit, GateId, NetlistError};

/// The part of a circuit relevant to one fault: everything that can observe
/// the fault site plus everything needed to justify those observation points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cone {
    fault_site: GateId,
    members: Vec<GateId>,
    pis: Vec<GateId>,
    pos: Vec<GateId>,
    member_mask: Vec<bool>,
    effect_mask: Vec<bool>,
}

impl Cone {
    pub fn fault_site(&self) -> GateId {
        self.fault_site
    }

    /// Member gates in ascending id order.
    pub fn members(&self) -> &[GateId] {
        &self.members
    }

    /// Primary inputs feeding the cone, in circuit input order.
    pub fn pis(&self) -> &[GateId] {
        &self.pis
    }

    /// Primary outputs reachable from the fault site, in circuit output order.
    pub fn pos(&self) -> &[GateId] {
        &self.pos
    }

    #[inline]
    pub fn contains(&self, id: GateId) -> bool {
        self.member_mask[id.index()]
    }

    /// True for the fault site and every member it can reach. Only these
    /// gates can ever carry a fault effect; everything else in the cone has
    /// identical good and faulty values.
    #[inline]
    pub fn in_effect_region(&self, id: GateId) -> bool {
        self.effect_mask[id.index()]
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Computes the cone for a fault at `fault_site`: the transitive fanin of the
/// site together with the transitive fanin of every primary output the site
/// can reach.
pub fn extract_cone(circuit: &Circuit, fault_site: GateId) -> Result<Cone, NetlistError> {
    let n = circuit.len();
    let mut reach = vec![false; n];
    let mut stack = vec![fault_site];
    reach[fault_site.index()] = true;
    while let Some(g) = stack.pop() {
        for &h in circuit.fanout(g) {
            if !reach[h.index()] {
                reach[h.index()] = true;
                stack.push(h);
            }
        }
    }
    let pos: Vec<GateId> = circuit
        .primary_outputs()
        .iter()
        .copied()
        .filter(|po| reach[po.index()])
        .collect();
    if pos.is_empty() {
        return Err(NetlistError::UnreachableFault {
            gate: circuit.name(fault_site).to_string(),
        });
    }

    let mut member_mask = vec![false; n];
    let mut stack: Vec<GateId> = pos.clone();
    stack.push(fault_site);
    for &g in &stack {
        member_mask[g.index()] = true;
    }
    while let Some(g) = stack.pop() {
        for &f in circuit.fanin(g) {
            if !member_mask[f.index()] {
                member_mask[f.index()] = true;
                stack.push(f);
            }
        }
    }
    let members: Vec<GateId> = (0..n)
        .filter(|&i| member_mask[i])
        .map(GateId::new)
        .collect();
    let pis = circuit
        .primary_inputs()
        .iter()
        .copied()
        .filter(|pi| member_mask[pi.index()])
        .collect();
    let effect_mask = reach
        .iter()
        .zip(&member_mask)
        .map(|(&r, &m)| r && m)
        .collect();
    Ok(Cone {
        fault_site,
        members,
        pis,
        pos,
        member_mask,
        effect_mask,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::parse_bench;

    #[test]
    fn tree_cone_is_whole_fanin() {
        let c = parse_bench(
            "INPUT(a)\nINPUT(b)\nINPUT(c)\nOUTPUT(y)\nn = AND(a, b)\ny = OR(n, c)\n",
        )
        .unwrap();
        let y = c.find("y").unwrap();
        let cone = extract_cone(&c, y).unwrap();
        let mut expected: Vec<GateId> = c.gates().iter().map(|g| g.id).collect();
        expected.sort();
        assert_eq!(cone.members(), expected.as_slice());
        assert_eq!(cone.pis().len(), 3);
        assert_eq!(cone.pos(), c.primary_outputs());
        assert!(cone.in_effect_region(y));
        assert!(!cone.in_effect_region(c.find("n").unwrap()));
    }

    #[test]
    fn dangling_gate_is_unreachable() {
        let c = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(y)\ny = AND(a, b)\nd = NOT(a)\n").unwrap();
        let err = extract_cone(&c, c.find("d").unwrap()).unwrap_err();
        assert_eq!(err, NetlistError::UnreachableFault { gate: "d".into() });
    }

    #[test]
    fn side_outputs_excluded() {
        // y2 cannot observe n, so its private logic stays outside the cone.
        let c = parse_bench(
            "INPUT(a)\nINPUT(b)\nINPUT(c)\nOUTPUT(y1)\nOUTPUT(y2)\nn = NOT(a)\ny1 = AND(n, b)\nm = NOT(c)\ny2 = AND(m, b)\n",
        )
        .unwrap();
        let cone = extract_cone(&c, c.find("n").unwrap()).unwrap();
        assert!(!cone.contains(c.find("m").unwrap()));
        assert!(!cone.contains(c.find("c").unwrap()));
        assert!(cone.contains(c.find("b").unwrap()));
        assert_eq!(cone.pos().len(), 1);
    }
}
