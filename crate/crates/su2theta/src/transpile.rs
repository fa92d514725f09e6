//! Lowering of logical circuits to the native gate set {RZ, RY, X, CZ,
//! Measure} and SWAP routing onto a fixed-topology chip.
//!
//! Decomposition is exact up to a global phase; routing additionally permutes
//! qubits, and the permutation is recorded so measurements and post-selection
//! can be relabeled. The bundled 17-qubit `square17` chip is an L-shaped
//! square-lattice patch with 24 couplers (the published device diagram gives
//! only the node and coupler counts, so the edge list here is a
//! reconstruction).

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, GateKind, Param};
use crate::Error;

/// Undirected chip connectivity.
#[derive(Clone, Debug)]
pub struct CouplingMap {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct ChipFile {
    qubits: usize,
    edges: Vec<[usize; 2]>,
}

impl CouplingMap {
    /// Builds a map from an undirected edge list; the graph must be
    /// connected and edges must stay within `n` nodes.
    pub fn new(n: usize, edge_list: &[(usize, usize)]) -> Result<CouplingMap, Error> {
        let mut edges = BTreeSet::new();
        let mut adjacency = vec![Vec::new(); n];
        for &(a, b) in edge_list {
            if a >= n || b >= n || a == b {
                return Err(Error::BadLayout { msg: format!("bad edge ({a}, {b})") });
            }
            if edges.insert((a.min(b), a.max(b))) {
                adjacency[a].push(b);
                adjacency[b].push(a);
            }
        }
        adjacency.iter_mut().for_each(|v| v.sort_unstable());
        let map = CouplingMap { n, edges, adjacency };
        let reached = map.bfs_distances(0).iter().filter(|d| d.is_some()).count();
        if n == 0 || reached != n {
            return Err(Error::DisconnectedMap);
        }
        Ok(map)
    }

    /// The default 17-node, 24-coupler chip: an L-shaped square-lattice
    /// patch of two 7-node rows over a 3-node row, numbered row-major.
    ///
    /// ```text
    ///  0 — 1 — 2 — 3 — 4 — 5 — 6
    ///  |   |   |   |   |   |   |
    ///  7 — 8 — 9 —10 —11 —12 —13
    ///  |   |   |
    /// 14 —15 —16
    /// ```
    pub fn square17() -> CouplingMap {
        let mut edges = Vec::new();
        for x in 0..6 {
            edges.push((x, x + 1));
            edges.push((7 + x, 8 + x));
        }
        for x in 0..7 {
            edges.push((x, 7 + x));
        }
        for x in 0..2 {
            edges.push((14 + x, 15 + x));
        }
        for x in 0..3 {
            edges.push((7 + x, 14 + x));
        }
        CouplingMap::new(17, &edges).expect("the bundled chip is well-formed")
    }

    /// Parses `{"qubits": n, "edges": [[a,b], ...]}`.
    pub fn from_json(text: &str) -> Result<CouplingMap, Error> {
        let chip: ChipFile = serde_json::from_str(text)
            .map_err(|e| Error::BadLayout { msg: format!("chip file: {e}") })?;
        let edges: Vec<(usize, usize)> = chip.edges.iter().map(|e| (e[0], e[1])).collect();
        CouplingMap::new(chip.qubits, &edges)
    }

    pub fn to_json(&self) -> String {
        let chip = ChipFile {
            qubits: self.n,
            edges: self.edges.iter().map(|&(a, b)| [a, b]).collect(),
        };
        serde_json::to_string_pretty(&chip).expect("chip serialization cannot fail")
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn is_edge(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    pub fn neighbors(&self, q: usize) -> &[usize] {
        &self.adjacency[q]
    }

    fn bfs_distances(&self, from: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        dist[from] = Some(0);
        let mut frontier = vec![from];
        while let Some(q) = frontier.pop() {
            let d = dist[q].unwrap();
            for &r in &self.adjacency[q] {
                if dist[r].is_none() {
                    dist[r] = Some(d + 1);
                    frontier.insert(0, r);
                }
            }
        }
        dist
    }

    /// All-pairs shortest-path distances.
    pub fn distances(&self) -> Vec<Vec<usize>> {
        (0..self.n)
            .map(|q| self.bfs_distances(q).into_iter().map(|d| d.unwrap()).collect())
            .collect()
    }
}

fn scale_param(p: Param, k: f64) -> Param {
    match p {
        Param::Slot(s) => Param::ScaledSlot(s, k),
        Param::ScaledSlot(s, k0) => Param::ScaledSlot(s, k0 * k),
        Param::Fixed(x) => Param::Fixed(k * x),
        Param::None => Param::None,
    }
}

const PI: f64 = std::f64::consts::PI;
const FRAC_PI_2: f64 = std::f64::consts::FRAC_PI_2;
const FRAC_PI_4: f64 = std::f64::consts::FRAC_PI_4;

/// H up to a global phase: RZ(π) then RY(π/2).
fn emit_h(out: &mut Circuit, q: usize) {
    out.rz(q, Param::Fixed(PI));
    out.ry(q, Param::Fixed(FRAC_PI_2));
}

fn emit_cnot(out: &mut Circuit, c: usize, t: usize) {
    emit_h(out, t);
    out.cz(c, t);
    emit_h(out, t);
}

fn emit_cry(out: &mut Circuit, c: usize, t: usize, p: Param) {
    out.ry(t, scale_param(p, 0.5));
    emit_cnot(out, c, t);
    out.ry(t, scale_param(p, -0.5));
    emit_cnot(out, c, t);
}

/// Textbook six-CNOT Toffoli with T ≡ RZ(π/4) up to global phase.
fn emit_toffoli(out: &mut Circuit, c1: usize, c2: usize, t: usize) {
    emit_h(out, t);
    emit_cnot(out, c2, t);
    out.rz(t, Param::Fixed(-FRAC_PI_4));
    emit_cnot(out, c1, t);
    out.rz(t, Param::Fixed(FRAC_PI_4));
    emit_cnot(out, c2, t);
    out.rz(t, Param::Fixed(-FRAC_PI_4));
    emit_cnot(out, c1, t);
    out.rz(t, Param::Fixed(FRAC_PI_4));
    out.rz(c2, Param::Fixed(FRAC_PI_4));
    emit_h(out, t);
    emit_cnot(out, c1, c2);
    out.rz(c2, Param::Fixed(-FRAC_PI_4));
    out.rz(c1, Param::Fixed(FRAC_PI_4));
    emit_cnot(out, c1, c2);
}

/// Three-CNOT relative-phase Toffoli; equals the exact Toffoli except for a
/// −1 on the (c1=1, c2=0, t=1) branch, matching [`GateKind::PhasedToffoli`].
fn emit_margolus(out: &mut Circuit, c1: usize, c2: usize, t: usize) {
    out.ry(t, Param::Fixed(FRAC_PI_4));
    emit_cnot(out, c2, t);
    out.ry(t, Param::Fixed(FRAC_PI_4));
    emit_cnot(out, c1, t);
    out.ry(t, Param::Fixed(-FRAC_PI_4));
    emit_cnot(out, c2, t);
    out.ry(t, Param::Fixed(-FRAC_PI_4));
}

fn emit_cswap(out: &mut Circuit, c: usize, a: usize, b: usize) {
    emit_cnot(out, b, a);
    emit_toffoli(out, c, a, b);
    emit_cnot(out, b, a);
}

/// Rewrites every gate into the native set, preserving width, slot layout,
/// and measurement order. The result equals the input up to a global phase.
pub fn decompose_to_native(c: &Circuit) -> Circuit {
    let mut out = Circuit::new(c.n_data(), c.n_ancillas());
    for _ in 0..c.n_slots() {
        out.alloc_slot();
    }
    for g in c.gates() {
        let q = &g.qubits;
        match g.kind {
            GateKind::Ry => out.ry(q[0], g.param),
            GateKind::Rz => out.rz(q[0], g.param),
            GateKind::X => out.x(q[0]),
            GateKind::Cz => out.cz(q[0], q[1]),
            GateKind::Measure => out.measure(q[0]),
            GateKind::H => emit_h(&mut out, q[0]),
            GateKind::Cnot => emit_cnot(&mut out, q[0], q[1]),
            GateKind::ControlledRy => emit_cry(&mut out, q[0], q[1], g.param),
            GateKind::Toffoli => emit_toffoli(&mut out, q[0], q[1], q[2]),
            GateKind::PhasedToffoli => emit_margolus(&mut out, q[0], q[1], q[2]),
            GateKind::Cswap => emit_cswap(&mut out, q[0], q[1], q[2]),
        }
    }
    out
}

/// A routed circuit on physical chip qubits, with the logical→physical
/// mapping at entry and exit.
#[derive(Clone, Debug)]
pub struct NativeCircuit {
    /// Native gates on physical wires, width = chip size.
    pub circuit: Circuit,
    /// Logical qubit → physical wire before the first gate.
    pub initial: Vec<usize>,
    /// Logical qubit → physical wire after the last gate.
    pub final_map: Vec<usize>,
    /// Data-qubit count of the logical circuit (its ancillas follow).
    pub n_logical_data: usize,
    /// Inserted SWAP count.
    pub swaps: usize,
}

/// A routed circuit squeezed onto its used wires only, for simulation.
///
/// Wires are renamed so that logical data qubit `i` *ends* on wire `i`; all
/// remaining wires (logical ancillas and SWAP transit nodes) follow and hold
/// `|0⟩` on the post-selected branch, so [`crate::sim::post_select_zeros`]
/// recovers the data state directly.
#[derive(Clone, Debug)]
pub struct CompactCircuit {
    pub circuit: Circuit,
    /// Logical qubit → compact wire before the first gate.
    pub initial: Vec<usize>,
    /// Logical qubit → compact wire after the last gate.
    pub final_map: Vec<usize>,
}

impl NativeCircuit {
    /// Physical wires touched by gates or holding logical qubits.
    pub fn used_wires(&self) -> BTreeSet<usize> {
        let mut used: BTreeSet<usize> = self.initial.iter().copied().collect();
        for g in self.circuit.gates() {
            used.extend(g.qubits.iter().copied());
        }
        used
    }

    pub fn compact(&self) -> CompactCircuit {
        let used = self.used_wires();
        let nd = self.n_logical_data;
        let mut order: Vec<usize> = self.final_map[..nd].to_vec();
        for &w in &used {
            if !order.contains(&w) {
                order.push(w);
            }
        }
        let mut rename = vec![usize::MAX; self.circuit.n_qubits()];
        for (new, &old) in order.iter().enumerate() {
            rename[old] = new;
        }
        let mut c = Circuit::new(nd, order.len() - nd);
        for _ in 0..self.circuit.n_slots() {
            c.alloc_slot();
        }
        for g in self.circuit.gates() {
            let qubits: Vec<usize> = g.qubits.iter().map(|&q| rename[q]).collect();
            c.push(g.kind, qubits, g.param);
        }
        CompactCircuit {
            circuit: c,
            initial: self.initial.iter().map(|&w| rename[w]).collect(),
            final_map: self.final_map.iter().map(|&w| rename[w]).collect(),
        }
    }
}

/// Interaction weights between logical qubit pairs.
fn pair_weights(c: &Circuit) -> Vec<((usize, usize), usize)> {
    let mut weights: Vec<Vec<usize>> = vec![vec![0; c.n_qubits()]; c.n_qubits()];
    for g in c.gates() {
        if g.qubits.len() == 2 {
            let (a, b) = (g.qubits[0].min(g.qubits[1]), g.qubits[0].max(g.qubits[1]));
            weights[a][b] += 1;
        }
    }
    let mut pairs = Vec::new();
    for a in 0..c.n_qubits() {
        for b in a + 1..c.n_qubits() {
            if weights[a][b] > 0 {
                pairs.push(((a, b), weights[a][b]));
            }
        }
    }
    pairs
}

/// One-step greedy placement: logical qubits in order of total interaction
/// weight, each onto the free node minimizing the weighted distance to its
/// already-placed partners. Deterministic; ties break toward lower indices.
fn default_layout(c: &Circuit, map: &CouplingMap, dist: &[Vec<usize>]) -> Vec<usize> {
    let nl = c.n_qubits();
    let pairs = pair_weights(c);
    let mut strength = vec![0usize; nl];
    for &((a, b), w) in &pairs {
        strength[a] += w;
        strength[b] += w;
    }
    let mut order: Vec<usize> = (0..nl).collect();
    order.sort_by_key(|&q| (usize::MAX - strength[q], q));

    let mut layout = vec![usize::MAX; nl];
    let mut free: Vec<bool> = vec![true; map.n_qubits()];
    for &q in &order {
        let placed_partners: Vec<(usize, usize)> = pairs
            .iter()
            .filter_map(|&((a, b), w)| {
                let other = if a == q { b } else if b == q { a } else { return None };
                (layout[other] != usize::MAX).then_some((layout[other], w))
            })
            .collect();
        let best = (0..map.n_qubits())
            .filter(|&p| free[p])
            .min_by_key(|&p| {
                let cost: usize =
                    placed_partners.iter().map(|&(pp, w)| w * dist[p][pp]).sum();
                // Unconstrained qubits prefer central, well-connected nodes.
                let degree_bias = map.n_qubits() - map.neighbors(p).len();
                (cost, degree_bias, p)
            })
            .expect("chip has at least as many nodes as the circuit");
        layout[q] = best;
        free[best] = false;
    }

    // Local refinement: while some exchange (relocating one logical qubit to
    // a free node, or swapping two assignments) lowers the weighted distance
    // sum, apply the best one. Deterministic; bounded by a fixed pass count.
    let cost_of = |layout: &[usize]| -> usize {
        pairs.iter().map(|&((a, b), w)| w * dist[layout[a]][layout[b]]).sum()
    };
    let mut cost = cost_of(&layout);
    for _ in 0..100 {
        let mut best: Option<(usize, usize, usize)> = None;
        for q in 0..nl {
            for p in 0..map.n_qubits() {
                if p == layout[q] {
                    continue;
                }
                let mut trial = layout.clone();
                if let Some(r) = (0..nl).find(|&r| layout[r] == p) {
                    trial[r] = layout[q];
                }
                trial[q] = p;
                let c = cost_of(&trial);
                if c < cost && best.map_or(true, |(bc, _, _)| c < bc) {
                    best = Some((c, q, p));
                }
            }
        }
        let Some((c, q, p)) = best else { break };
        if let Some(r) = (0..nl).find(|&r| layout[r] == p) {
            layout[r] = layout[q];
        }
        layout[q] = p;
        cost = c;
    }
    layout
}

fn emit_swap(out: &mut Circuit, a: usize, b: usize) {
    emit_cnot(out, a, b);
    emit_cnot(out, b, a);
    emit_cnot(out, a, b);
}

/// How many upcoming 2-qubit gates the router weighs when picking a SWAP.
const ROUTE_LOOKAHEAD: usize = 8;

/// Routes a native circuit onto the chip. For each 2-qubit gate on
/// non-adjacent wires, SWAPs (3 CZ + singles each) walk one operand a step
/// along a BFS shortest path toward the other; among such steps the router
/// picks the one minimizing the distance sum of the next few 2-qubit gates,
/// ties broken toward the lowest physical index, then the first operand.
pub fn route(
    c: &Circuit,
    map: &CouplingMap,
    initial_layout: Option<&[usize]>,
) -> Result<NativeCircuit, Error> {
    if let Some(g) = c.gates().iter().find(|g| {
        !matches!(
            g.kind,
            GateKind::Ry | GateKind::Rz | GateKind::X | GateKind::Cz | GateKind::Measure
        )
    }) {
        return Err(Error::NotTranspiled { kind: g.kind.name() });
    }
    let nl = c.n_qubits();
    if nl > map.n_qubits() {
        return Err(Error::BadLayout {
            msg: format!("{nl} logical qubits exceed {} physical", map.n_qubits()),
        });
    }
    let dist = map.distances();
    let initial = match initial_layout {
        Some(l) => {
            let distinct: BTreeSet<usize> = l.iter().copied().collect();
            if l.len() != nl || distinct.len() != nl || l.iter().any(|&p| p >= map.n_qubits()) {
                return Err(Error::BadLayout { msg: "layout must injectively map logical qubits".into() });
            }
            l.to_vec()
        }
        None => default_layout(c, map, &dist),
    };

    let mut pos = initial.clone();
    let mut occupant: Vec<Option<usize>> = vec![None; map.n_qubits()];
    for (l, &p) in pos.iter().enumerate() {
        occupant[p] = Some(l);
    }

    let upcoming: Vec<(usize, usize)> = c
        .gates()
        .iter()
        .filter(|g| g.qubits.len() == 2)
        .map(|g| (g.qubits[0], g.qubits[1]))
        .collect();

    let mut out = Circuit::new(map.n_qubits(), 0);
    for _ in 0..c.n_slots() {
        out.alloc_slot();
    }
    let mut swaps = 0;
    let mut gate_2q = 0;
    for g in c.gates() {
        match g.qubits.len() {
            1 => out.push(g.kind, vec![pos[g.qubits[0]]], g.param),
            2 => {
                let (la, lb) = (g.qubits[0], g.qubits[1]);
                while dist[pos[la]][pos[lb]] > 1 {
                    let window = &upcoming[gate_2q..upcoming.len().min(gate_2q + ROUTE_LOOKAHEAD)];
                    // Candidate steps: either operand moves one node along a
                    // shortest path to the other. Score each by the weighted
                    // distance sum of the upcoming window (nearer gates count
                    // more) under the hypothetical exchange.
                    let mut best: Option<(usize, usize, usize, usize)> = None;
                    for (side, (lm, lo)) in [(0usize, (la, lb)), (1, (lb, la))] {
                        let (pm, po) = (pos[lm], pos[lo]);
                        for &p in map.neighbors(pm) {
                            if dist[p][po] + 1 != dist[pm][po] {
                                continue;
                            }
                            let at = |l: usize| -> usize {
                                if l == lm {
                                    p
                                } else if pos[l] == p {
                                    pm
                                } else {
                                    pos[l]
                                }
                            };
                            let score: usize = window
                                .iter()
                                .enumerate()
                                .map(|(k, &(a, b))| (ROUTE_LOOKAHEAD - k) * dist[at(a)][at(b)])
                                .sum();
                            if best.map_or(true, |b| (score, p, side) < (b.0, b.1, b.2)) {
                                best = Some((score, p, side, pm));
                            }
                        }
                    }
                    let (_, step, side, from) =
                        best.expect("non-adjacent operands always admit a shortest-path step");
                    let mover = if side == 0 { la } else { lb };
                    emit_swap(&mut out, from, step);
                    swaps += 1;
                    let displaced = occupant[step];
                    occupant[step] = Some(mover);
                    occupant[from] = displaced;
                    pos[mover] = step;
                    if let Some(l) = displaced {
                        pos[l] = from;
                    }
                }
                out.push(g.kind, vec![pos[la], pos[lb]], g.param);
                gate_2q += 1;
            }
            _ => unreachable!("native gates are at most 2-qubit"),
        }
    }
    Ok(NativeCircuit {
        circuit: out,
        initial,
        final_map: pos,
        n_logical_data: c.n_data(),
        swaps,
    })
}

/// Decomposes to the native set and routes onto the chip in one call.
pub fn transpile(
    c: &Circuit,
    map: &CouplingMap,
    initial_layout: Option<&[usize]>,
) -> Result<NativeCircuit, Error> {
    route(&decompose_to_native(c), map, initial_layout)
}
