//! Trotterized gate circuits for the chain Hamiltonian.
//!
//! Each bond `b` contributes the two-qubit block
//! `T(a, b, g) = exp[-i(a XX + b YY + g ZZ)]` on qubits `(b, b + 1)`. A
//! block is a logical gate; [`lower`] expands it into three CNOTs and five
//! rotations with `theta = pi/2 - 2g`, `phi = 2a - pi/2`, `lambda = pi/2 - 2b`.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::lattice::{bond_profile, Flavor, ModelParams};
use crate::{Error, Result};

/// Largest circuit expanded to a dense unitary.
pub const MAX_UNITARY_QUBITS: usize = 6;

/// Rotations use `R_P(theta) = exp(-i theta P / 2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    X(usize),
    Rx(usize, f64),
    Ry(usize, f64),
    Rz(usize, f64),
    Cnot {
        control: usize,
        target: usize,
    },
    Block {
        first: usize,
        second: usize,
        alpha: f64,
        beta: f64,
        gamma: f64,
    },
}

impl Gate {
    pub fn name(&self) -> &'static str {
        match self {
            Gate::X(_) => "x",
            Gate::Rx(..) => "rx",
            Gate::Ry(..) => "ry",
            Gate::Rz(..) => "rz",
            Gate::Cnot { .. } => "cx",
            Gate::Block { .. } => "tblock",
        }
    }

    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::X(q) | Gate::Rx(q, _) | Gate::Ry(q, _) | Gate::Rz(q, _) => vec![q],
            Gate::Cnot { control, target } => vec![control, target],
            Gate::Block { first, second, .. } => vec![first, second],
        }
    }

    pub fn is_lowered(&self) -> bool {
        !matches!(self, Gate::Block { .. })
    }

    fn check(&self, sites: usize) -> Result<()> {
        let qs = self.qubits();
        if let Some(&q) = qs.iter().find(|&&q| q >= sites) {
            return Err(Error::index("qubit", q, sites));
        }
        if qs.len() == 2 && qs[0] == qs[1] {
            return Err(Error::Validation(format!(
                "{} acts twice on qubit {}",
                self.name(),
                qs[0]
            )));
        }
        Ok(())
    }

    /// 2x2 matrix of a single-qubit gate, `None` otherwise.
    pub fn single_qubit_matrix(&self) -> Option<[[Complex64; 2]; 2]> {
        let c = Complex64::new;
        let m = match *self {
            Gate::X(_) => [[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]],
            Gate::Rx(_, t) => {
                let (s, co) = (t / 2.0).sin_cos();
                [[c(co, 0.0), c(0.0, -s)], [c(0.0, -s), c(co, 0.0)]]
            }
            Gate::Ry(_, t) => {
                let (s, co) = (t / 2.0).sin_cos();
                [[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]]
            }
            Gate::Rz(_, t) => [
                [Complex64::from_polar(1.0, -t / 2.0), c(0.0, 0.0)],
                [c(0.0, 0.0), Complex64::from_polar(1.0, t / 2.0)],
            ],
            _ => return None,
        };
        Some(m)
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gate::X(q) => write!(f, "x q[{q}]"),
            Gate::Rx(q, t) => write!(f, "rx({t}) q[{q}]"),
            Gate::Ry(q, t) => write!(f, "ry({t}) q[{q}]"),
            Gate::Rz(q, t) => write!(f, "rz({t}) q[{q}]"),
            Gate::Cnot { control, target } => write!(f, "cx q[{control}],q[{target}]"),
            Gate::Block {
                first,
                second,
                alpha,
                beta,
                gamma,
            } => write!(f, "tblock({alpha},{beta},{gamma}) q[{first}],q[{second}]"),
        }
    }
}

/// Bond ordering inside one Trotter step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Bonds `0, 1, ..., L-2` in order (first order, direction-biased).
    #[default]
    Sequential,
    /// All even bonds, then all odd bonds (first order).
    #[serde(rename = "even-odd-1")]
    EvenOdd1,
    /// Odd half step, even full step, odd half step (second order).
    #[serde(rename = "strang-2")]
    Strang2,
}

impl Scheme {
    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Sequential => "sequential",
            Scheme::EvenOdd1 => "even-odd-1",
            Scheme::Strang2 => "strang-2",
        }
    }

    pub fn order(self) -> u8 {
        match self {
            Scheme::Strang2 => 2,
            _ => 1,
        }
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sequential" => Ok(Scheme::Sequential),
            "even-odd-1" => Ok(Scheme::EvenOdd1),
            "strang-2" => Ok(Scheme::Strang2),
            other => Err(Error::Validation(format!("unknown Trotter scheme '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CircuitMeta {
    pub steps: usize,
    pub scheme: Option<Scheme>,
    pub time: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    sites: usize,
    gates: Vec<Gate>,
    pub meta: CircuitMeta,
}

impl Circuit {
    pub fn new(sites: usize) -> Self {
        Self {
            sites,
            gates: Vec::new(),
            meta: CircuitMeta::default(),
        }
    }

    pub fn from_gates(sites: usize, gates: impl IntoIterator<Item = Gate>) -> Result<Self> {
        let mut c = Self::new(sites);
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.check(self.sites)?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn extend(&mut self, other: &Circuit) -> Result<()> {
        if other.sites != self.sites {
            return Err(Error::Validation("circuits on different qubit counts".into()));
        }
        self.gates.extend_from_slice(&other.gates);
        Ok(())
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn is_lowered(&self) -> bool {
        self.gates.iter().all(Gate::is_lowered)
    }

    pub fn count(&self, name: &str) -> usize {
        self.gates.iter().filter(|g| g.name() == name).count()
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# {} qubits, {} gates", self.sites, self.gates.len())?;
        for g in &self.gates {
            writeln!(f, "{g}")?;
        }
        Ok(())
    }
}

/// Three-CNOT realization of `exp[-i(alpha XX + beta YY + gamma ZZ)]` on
/// `(first, second)`, exact up to a global phase.
pub fn two_qubit_block(alpha: f64, beta: f64, gamma: f64, qubits: (usize, usize)) -> Vec<Gate> {
    let (a, b) = qubits;
    let theta = FRAC_PI_2 - 2.0 * gamma;
    let phi = 2.0 * alpha - FRAC_PI_2;
    let lambda = FRAC_PI_2 - 2.0 * beta;
    vec![
        Gate::Rz(b, FRAC_PI_2),
        Gate::Cnot { control: b, target: a },
        Gate::Rz(a, -theta),
        Gate::Ry(b, phi),
        Gate::Cnot { control: a, target: b },
        Gate::Ry(b, lambda),
        Gate::Cnot { control: b, target: a },
        Gate::Rz(a, -FRAC_PI_2),
    ]
}

/// Replaces every block with its gate decomposition.
pub fn lower(c: &Circuit) -> Circuit {
    let mut gates = Vec::with_capacity(c.gates.len() * 8);
    for g in &c.gates {
        match *g {
            Gate::Block {
                first,
                second,
                alpha,
                beta,
                gamma,
            } => gates.extend(two_qubit_block(alpha, beta, gamma, (first, second))),
            other => gates.push(other),
        }
    }
    Circuit {
        sites: c.sites,
        gates,
        meta: c.meta,
    }
}

/// Gates for `exp(-i h_b tau)` of bond `b` under the model's flavor.
fn bond_gates(params: &ModelParams, bond: usize, coupling: f64, tau: f64, out: &mut Vec<Gate>) {
    let v = params.interaction;
    let half = coupling * tau / 2.0;
    match params.flavor {
        Flavor::PaperLiteral => out.push(Gate::Block {
            first: bond,
            second: bond + 1,
            alpha: half,
            beta: half,
            gamma: v * tau / 2.0,
        }),
        Flavor::ExactJw => {
            // V n n = V/4 (I - Z - Z + ZZ); the linear part commutes with the block.
            out.push(Gate::Block {
                first: bond,
                second: bond + 1,
                alpha: half,
                beta: half,
                gamma: v * tau / 4.0,
            });
            if v != 0.0 {
                out.push(Gate::Rz(bond, -v * tau / 2.0));
                out.push(Gate::Rz(bond + 1, -v * tau / 2.0));
            }
        }
    }
}

/// Unlowered gates of a single step of length `dt`.
pub fn trotter_step(params: &ModelParams, dt: f64, scheme: Scheme) -> Vec<Gate> {
    let profile = bond_profile(params);
    let mut gates = Vec::new();
    let layer = |parity: Option<usize>, tau: f64, gates: &mut Vec<Gate>| {
        for (b, &jb) in profile.iter().enumerate() {
            if parity.is_none_or(|p| b % 2 == p) {
                bond_gates(params, b, jb, tau, gates);
            }
        }
    };
    match scheme {
        Scheme::Sequential => layer(None, dt, &mut gates),
        Scheme::EvenOdd1 => {
            layer(Some(0), dt, &mut gates);
            layer(Some(1), dt, &mut gates);
        }
        Scheme::Strang2 => {
            layer(Some(1), dt / 2.0, &mut gates);
            layer(Some(0), dt, &mut gates);
            layer(Some(1), dt / 2.0, &mut gates);
        }
    }
    gates
}

/// `steps` identical Trotter steps approximating `exp(-iHt)`. The result
/// holds logical blocks; call [`lower`] before simulation or export.
pub fn trotter_circuit(params: &ModelParams, t: f64, steps: usize, scheme: Scheme) -> Result<Circuit> {
    if steps == 0 {
        return Err(Error::Validation("Trotter step count must be >= 1".into()));
    }
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::Validation(format!("time must be finite and >= 0, got {t}")));
    }
    params.validate()?;
    let step = trotter_step(params, t / steps as f64, scheme);
    let mut c = Circuit::new(params.sites);
    for _ in 0..steps {
        for &g in &step {
            c.push(g)?;
        }
    }
    c.meta = CircuitMeta {
        steps,
        scheme: Some(scheme),
        time: t,
    };
    Ok(c)
}

/// X gates preparing the Fock state with the listed sites occupied.
pub fn preparation(sites: usize, occupied: &[usize]) -> Result<Circuit> {
    crate::state::fock_index(sites, occupied)?;
    Circuit::from_gates(sites, occupied.iter().map(|&q| Gate::X(q)))
}

fn kron2(a: &[[Complex64; 4]; 4], b: &[[Complex64; 4]; 4]) -> [[Complex64; 4]; 4] {
    let mut out = [[Complex64::new(0.0, 0.0); 4]; 4];
    for (r, row) in out.iter_mut().enumerate() {
        for (c, v) in row.iter_mut().enumerate() {
            *v = (0..4).map(|k| a[r][k] * b[k][c]).sum();
        }
    }
    out
}

/// Closed form of `exp[-i(alpha XX + beta YY + gamma ZZ)]` in the local basis
/// `bit(first) + 2 bit(second)`; the three terms commute.
pub fn block_matrix(alpha: f64, beta: f64, gamma: f64) -> [[Complex64; 4]; 4] {
    use crate::pauli::Pauli;
    let factor = |p: Pauli, angle: f64| {
        let pm = p.matrix();
        let (s, c) = angle.sin_cos();
        let mut out = [[Complex64::new(0.0, 0.0); 4]; 4];
        for (r, row) in out.iter_mut().enumerate() {
            for (col, v) in row.iter_mut().enumerate() {
                let pp = pm[r & 1][col & 1] * pm[r >> 1][col >> 1];
                let id = if r == col { c } else { 0.0 };
                *v = Complex64::new(id, 0.0) - Complex64::new(0.0, s) * pp;
            }
        }
        out
    };
    kron2(
        &kron2(&factor(Pauli::X, alpha), &factor(Pauli::Y, beta)),
        &factor(Pauli::Z, gamma),
    )
}

/// Dense unitary of the circuit (product of gate matrices in application
/// order). Blocks enter through their closed-form exponential.
pub fn circuit_unitary(c: &Circuit) -> Result<DMatrix<Complex64>> {
    if c.sites > MAX_UNITARY_QUBITS {
        return Err(Error::Resource(format!(
            "circuit unitary on {} qubits exceeds the {MAX_UNITARY_QUBITS}-qubit limit",
            c.sites
        )));
    }
    let dim = 1usize << c.sites;
    let mut u = DMatrix::identity(dim, dim);
    for g in &c.gates {
        u = gate_matrix(g, c.sites) * u;
    }
    Ok(u)
}

fn gate_matrix(g: &Gate, sites: usize) -> DMatrix<Complex64> {
    let dim = 1usize << sites;
    let bit = |k: usize, q: usize| (k >> q) & 1;
    if let Some(m) = g.single_qubit_matrix() {
        let q = g.qubits()[0];
        return DMatrix::from_fn(dim, dim, |r, col| {
            if (r ^ col) & !(1 << q) == 0 {
                m[bit(r, q)][bit(col, q)]
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
    }
    let (m, a, b) = match *g {
        Gate::Cnot { control, target } => {
            let one = Complex64::new(1.0, 0.0);
            let zero = Complex64::new(0.0, 0.0);
            // Local index bit(control) + 2 bit(target).
            let mut m = [[zero; 4]; 4];
            m[0][0] = one;
            m[2][2] = one;
            m[3][1] = one;
            m[1][3] = one;
            (m, control, target)
        }
        Gate::Block {
            first,
            second,
            alpha,
            beta,
            gamma,
        } => (block_matrix(alpha, beta, gamma), first, second),
        _ => unreachable!("single-qubit gates handled above"),
    };
    let mask = !((1 << a) | (1 << b));
    DMatrix::from_fn(dim, dim, |r, col| {
        if (r ^ col) & mask == 0 {
            m[bit(r, a) + 2 * bit(r, b)][bit(col, a) + 2 * bit(col, b)]
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// OpenQASM 2.0 text of a lowered circuit, ending with a full measurement.
pub fn export_qasm(c: &Circuit) -> Result<String> {
    let mut out = String::new();
    writeln!(out, "OPENQASM 2.0;").unwrap();
    writeln!(out, "include \"qelib1.inc\";").unwrap();
    writeln!(out, "qreg q[{}];", c.sites).unwrap();
    writeln!(out, "creg c[{}];", c.sites).unwrap();
    for g in &c.gates {
        if !g.is_lowered() {
            return Err(Error::LoweringRequired(g.name()));
        }
        writeln!(out, "{g};").unwrap();
    }
    writeln!(out, "measure q -> c;").unwrap();
    Ok(out)
}

/// Reads back the QASM subset written by [`export_qasm`].
pub fn import_qasm(text: &str) -> Result<Circuit> {
    let bad = |line: &str| Error::Validation(format!("unsupported QASM line: {line}"));
    let qubit = |tok: &str| -> Result<usize> {
        tok.trim()
            .strip_prefix("q[")
            .and_then(|s| s.strip_suffix(']'))
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Validation(format!("bad qubit operand '{tok}'")))
    };
    let mut circuit: Option<Circuit> = None;
    for raw in text.lines() {
        let line = raw.trim();
        if line.is_empty()
            || line.starts_with("//")
            || line.starts_with("OPENQASM")
            || line.starts_with("include")
            || line.starts_with("creg")
            || line.starts_with("measure")
        {
            continue;
        }
        let line = line.strip_suffix(';').ok_or_else(|| bad(line))?;
        if let Some(rest) = line.strip_prefix("qreg ") {
            circuit = Some(Circuit::new(qubit(rest)?));
            continue;
        }
        let c = circuit.as_mut().ok_or_else(|| bad(line))?;
        let (head, operands) = line.split_once(' ').ok_or_else(|| bad(line))?;
        let (name, angle) = match head.split_once('(') {
            Some((n, rest)) => {
                let a: f64 = rest
                    .strip_suffix(')')
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| bad(line))?;
                (n, Some(a))
            }
            None => (head, None),
        };
        let ops: Vec<&str> = operands.split(',').collect();
        let gate = match (name, angle, ops.as_slice()) {
            ("x", None, [q]) => Gate::X(qubit(q)?),
            ("rx", Some(a), [q]) => Gate::Rx(qubit(q)?, a),
            ("ry", Some(a), [q]) => Gate::Ry(qubit(q)?, a),
            ("rz", Some(a), [q]) => Gate::Rz(qubit(q)?, a),
            ("cx", None, [a, b]) => Gate::Cnot {
                control: qubit(a)?,
                target: qubit(b)?,
            },
            _ => return Err(bad(line)),
        };
        c.push(gate)?;
    }
    circuit.ok_or_else(|| Error::Validation("QASM text declares no qreg".into()))
}
