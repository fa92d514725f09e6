//! Gate-level circuit representation with deterministic text serialization.
//!
//! A circuit owns `n_data` data qubits (indices `0..n_data`) followed by
//! ancillas. Parameterized gates reference either a dense optimization slot
//! or a fixed angle, so one circuit object serves every parameter vector.

use crate::Error;

/// Supported gate kinds.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum GateKind {
    Ry,
    Rz,
    H,
    X,
    Cnot,
    Cz,
    Toffoli,
    PhasedToffoli,
    Cswap,
    ControlledRy,
    Measure,
}

impl GateKind {
    pub const ALL: [GateKind; 11] = [
        GateKind::Ry,
        GateKind::Rz,
        GateKind::H,
        GateKind::X,
        GateKind::Cnot,
        GateKind::Cz,
        GateKind::Toffoli,
        GateKind::PhasedToffoli,
        GateKind::Cswap,
        GateKind::ControlledRy,
        GateKind::Measure,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GateKind::Ry => "RY",
            GateKind::Rz => "RZ",
            GateKind::H => "H",
            GateKind::X => "X",
            GateKind::Cnot => "CNOT",
            GateKind::Cz => "CZ",
            GateKind::Toffoli => "Toffoli",
            GateKind::PhasedToffoli => "PhasedToffoli",
            GateKind::Cswap => "CSWAP",
            GateKind::ControlledRy => "ControlledRY",
            GateKind::Measure => "Measure",
        }
    }

    fn from_name(s: &str) -> Option<GateKind> {
        GateKind::ALL.into_iter().find(|k| k.name() == s)
    }

    pub fn arity(self) -> usize {
        match self {
            GateKind::Ry | GateKind::Rz | GateKind::H | GateKind::X | GateKind::Measure => 1,
            GateKind::Cnot | GateKind::Cz | GateKind::ControlledRy => 2,
            GateKind::Toffoli | GateKind::PhasedToffoli | GateKind::Cswap => 3,
        }
    }

    pub fn takes_angle(self) -> bool {
        matches!(self, GateKind::Ry | GateKind::Rz | GateKind::ControlledRy)
    }
}

/// Angle source of a parameterized gate.
#[derive(Clone, Copy, PartialEq, Debug)]
pub enum Param {
    None,
    Slot(usize),
    /// Slot value times a fixed factor, for decompositions that need
    /// half-angle sub-rotations of one logical parameter.
    ScaledSlot(usize, f64),
    Fixed(f64),
}

impl Param {
    /// Concrete angle under a parameter vector.
    pub fn angle(self, params: &[f64]) -> f64 {
        match self {
            Param::None => 0.0,
            Param::Slot(s) => params[s],
            Param::ScaledSlot(s, k) => k * params[s],
            Param::Fixed(x) => x,
        }
    }

    pub fn slot(self) -> Option<usize> {
        match self {
            Param::Slot(s) | Param::ScaledSlot(s, _) => Some(s),
            _ => None,
        }
    }
}

/// One gate application.
#[derive(Clone, PartialEq, Debug)]
pub struct Gate {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
    pub param: Param,
}

/// Ordered gate list over data qubits and trailing ancillas.
#[derive(Clone, PartialEq, Debug)]
pub struct Circuit {
    n_data: usize,
    n_ancillas: usize,
    gates: Vec<Gate>,
    n_slots: usize,
}

impl Circuit {
    pub fn new(n_data: usize, n_ancillas: usize) -> Circuit {
        Circuit { n_data, n_ancillas, gates: Vec::new(), n_slots: 0 }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_data + self.n_ancillas
    }

    pub fn n_data(&self) -> usize {
        self.n_data
    }

    pub fn n_ancillas(&self) -> usize {
        self.n_ancillas
    }

    pub fn ancilla_qubits(&self) -> std::ops::Range<usize> {
        self.n_data..self.n_qubits()
    }

    pub fn n_slots(&self) -> usize {
        self.n_slots
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Reserves the next dense optimization slot.
    pub fn alloc_slot(&mut self) -> usize {
        self.n_slots += 1;
        self.n_slots - 1
    }

    /// Appends a gate, enforcing the structural invariants.
    pub fn push(&mut self, kind: GateKind, qubits: Vec<usize>, param: Param) {
        assert_eq!(qubits.len(), kind.arity(), "{} takes {} qubits", kind.name(), kind.arity());
        for (i, &q) in qubits.iter().enumerate() {
            assert!(q < self.n_qubits(), "qubit {q} out of range for {} qubits", self.n_qubits());
            assert!(!qubits[..i].contains(&q), "duplicate qubit {q} on {}", kind.name());
        }
        match param {
            Param::None => assert!(!kind.takes_angle(), "{} needs an angle", kind.name()),
            Param::Slot(s) => {
                assert!(kind.takes_angle(), "{} takes no angle", kind.name());
                assert!(s < self.n_slots, "slot {s} not allocated");
            }
            Param::ScaledSlot(s, k) => {
                assert!(kind.takes_angle(), "{} takes no angle", kind.name());
                assert!(s < self.n_slots, "slot {s} not allocated");
                assert!(k.is_finite());
            }
            Param::Fixed(x) => {
                assert!(kind.takes_angle(), "{} takes no angle", kind.name());
                assert!(x.is_finite());
            }
        }
        if kind != GateKind::Measure {
            assert!(
                self.gates.iter().all(|g| g.kind != GateKind::Measure),
                "unitary gate after a measurement"
            );
        }
        self.gates.push(Gate { kind, qubits, param });
    }

    pub fn ry(&mut self, q: usize, p: Param) {
        self.push(GateKind::Ry, vec![q], p);
    }

    pub fn rz(&mut self, q: usize, p: Param) {
        self.push(GateKind::Rz, vec![q], p);
    }

    pub fn h(&mut self, q: usize) {
        self.push(GateKind::H, vec![q], Param::None);
    }

    pub fn x(&mut self, q: usize) {
        self.push(GateKind::X, vec![q], Param::None);
    }

    pub fn cnot(&mut self, control: usize, target: usize) {
        self.push(GateKind::Cnot, vec![control, target], Param::None);
    }

    pub fn cz(&mut self, a: usize, b: usize) {
        self.push(GateKind::Cz, vec![a, b], Param::None);
    }

    pub fn toffoli(&mut self, c1: usize, c2: usize, target: usize) {
        self.push(GateKind::Toffoli, vec![c1, c2, target], Param::None);
    }

    pub fn phased_toffoli(&mut self, c1: usize, c2: usize, target: usize) {
        self.push(GateKind::PhasedToffoli, vec![c1, c2, target], Param::None);
    }

    pub fn cswap(&mut self, control: usize, a: usize, b: usize) {
        self.push(GateKind::Cswap, vec![control, a, b], Param::None);
    }

    pub fn cry(&mut self, control: usize, target: usize, p: Param) {
        self.push(GateKind::ControlledRy, vec![control, target], p);
    }

    pub fn measure(&mut self, q: usize) {
        self.push(GateKind::Measure, vec![q], Param::None);
    }

    /// Counts of (single-qubit, two-qubit, three-qubit) gates, excluding
    /// measurements.
    pub fn gate_census(&self) -> (usize, usize, usize) {
        let mut census = (0, 0, 0);
        for g in &self.gates {
            if g.kind == GateKind::Measure {
                continue;
            }
            match g.kind.arity() {
                1 => census.0 += 1,
                2 => census.1 += 1,
                _ => census.2 += 1,
            }
        }
        census
    }

    /// Whether every gate is in the native set {RZ, RY, X, CZ, Measure}.
    pub fn is_native(&self) -> bool {
        self.gates.iter().all(|g| {
            matches!(
                g.kind,
                GateKind::Rz | GateKind::Ry | GateKind::X | GateKind::Cz | GateKind::Measure
            )
        })
    }

    /// Line-oriented text form: a header, then one gate per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("circuit data={} ancillas={}\n", self.n_data, self.n_ancillas);
        for g in &self.gates {
            out.push_str(g.kind.name());
            out.push(' ');
            let qs: Vec<String> = g.qubits.iter().map(usize::to_string).collect();
            out.push_str(&qs.join(","));
            match g.param {
                Param::None => {}
                Param::Slot(s) => out.push_str(&format!(" slot={s}")),
                Param::ScaledSlot(s, k) => out.push_str(&format!(" slot={s}*{k}")),
                Param::Fixed(x) => out.push_str(&format!(" theta={x}")),
            }
            out.push('\n');
        }
        out
    }

    /// Parses the `to_text` form; slot ids must be dense.
    pub fn from_text(text: &str) -> Result<Circuit, Error> {
        let parse_err = |line: usize, msg: &str| Error::CircuitParse { line, msg: msg.into() };
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
        let mut n_data = None;
        let mut n_ancillas = None;
        let mut fields = header.split_whitespace();
        if fields.next() != Some("circuit") {
            return Err(parse_err(1, "expected `circuit` header"));
        }
        for f in fields {
            if let Some(v) = f.strip_prefix("data=") {
                n_data = v.parse().ok();
            } else if let Some(v) = f.strip_prefix("ancillas=") {
                n_ancillas = v.parse().ok();
            }
        }
        let (Some(n_data), Some(n_ancillas)) = (n_data, n_ancillas) else {
            return Err(parse_err(1, "header needs data= and ancillas="));
        };
        let mut c = Circuit::new(n_data, n_ancillas);
        let mut max_slot = None;
        let mut raw = Vec::new();
        for (i, line) in lines {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let lineno = i + 1;
            let mut parts = line.split_whitespace();
            let kind = parts
                .next()
                .and_then(GateKind::from_name)
                .ok_or_else(|| parse_err(lineno, "unknown gate kind"))?;
            let qubits: Vec<usize> = parts
                .next()
                .ok_or_else(|| parse_err(lineno, "missing qubits"))?
                .split(',')
                .map(|q| q.parse().map_err(|_| parse_err(lineno, "bad qubit index")))
                .collect::<Result<_, _>>()?;
            let param = match parts.next() {
                None => Param::None,
                Some(p) => {
                    if let Some(v) = p.strip_prefix("slot=") {
                        let (id, scale) = match v.split_once('*') {
                            None => (v, None),
                            Some((id, k)) => (
                                id,
                                Some(k.parse().map_err(|_| parse_err(lineno, "bad slot scale"))?),
                            ),
                        };
                        let s: usize =
                            id.parse().map_err(|_| parse_err(lineno, "bad slot id"))?;
                        max_slot = Some(max_slot.map_or(s, |m: usize| m.max(s)));
                        match scale {
                            None => Param::Slot(s),
                            Some(k) => Param::ScaledSlot(s, k),
                        }
                    } else if let Some(v) = p.strip_prefix("theta=") {
                        Param::Fixed(v.parse().map_err(|_| parse_err(lineno, "bad angle"))?)
                    } else {
                        return Err(parse_err(lineno, "expected slot= or theta="));
                    }
                }
            };
            if parts.next().is_some() {
                return Err(parse_err(lineno, "trailing tokens"));
            }
            raw.push((kind, qubits, param, lineno));
        }
        c.n_slots = max_slot.map_or(0, |m| m + 1);
        let mut used = vec![false; c.n_slots];
        for (kind, qubits, param, lineno) in raw {
            if kind.arity() != qubits.len()
                || qubits.iter().any(|&q| q >= n_data + n_ancillas)
                || kind.takes_angle() == matches!(param, Param::None)
            {
                return Err(parse_err(lineno, "malformed gate"));
            }
            if let Some(s) = param.slot() {
                used[s] = true;
            }
            c.gates.push(Gate { kind, qubits, param });
        }
        if used.iter().any(|u| !u) {
            return Err(Error::CircuitParse { line: 0, msg: "slot ids are not dense".into() });
        }
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_circuit() -> Circuit {
        let mut c = Circuit::new(6, 2);
        let s0 = c.alloc_slot();
        let s1 = c.alloc_slot();
        c.ry(0, Param::Slot(s0));
        c.cnot(0, 1);
        c.phased_toffoli(6, 0, 1);
        c.cry(6, 2, Param::Slot(s1));
        c.rz(3, Param::Fixed(std::f64::consts::FRAC_PI_4));
        c.h(6);
        c.measure(6);
        c
    }

    #[test]
    fn text_round_trip() {
        let c = sample_circuit();
        let text = c.to_text();
        let back = Circuit::from_text(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.to_text(), text);
    }

    #[test]
    fn census_excludes_measurements() {
        let c = sample_circuit();
        assert_eq!(c.gate_census(), (3, 2, 1));
        assert!(!c.is_native());
    }

    #[test]
    #[should_panic(expected = "duplicate qubit")]
    fn rejects_duplicate_qubits() {
        let mut c = Circuit::new(2, 0);
        c.cnot(1, 1);
    }

    #[test]
    #[should_panic(expected = "out of range")]
    fn rejects_out_of_range() {
        let mut c = Circuit::new(2, 0);
        c.x(2);
    }

    #[test]
    #[should_panic(expected = "unitary gate after a measurement")]
    fn rejects_gates_after_measurement() {
        let mut c = Circuit::new(1, 1);
        c.measure(1);
        c.x(0);
    }

    #[test]
    fn parse_rejects_sparse_slots() {
        let text = "circuit data=2 ancillas=0\nRY 0 slot=1\n";
        assert!(Circuit::from_text(text).is_err());
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(Circuit::from_text("").is_err());
        assert!(Circuit::from_text("circuit data=2 ancillas=0\nFOO 0\n").is_err());
        assert!(Circuit::from_text("circuit data=2 ancillas=0\nRY 0\n").is_err());
        assert!(Circuit::from_text("circuit data=2 ancillas=0\nCNOT 0,5\n").is_err());
    }
}
