//! MIP and CP formulations, built into a solver-neutral [`MipModel`] and
//! written as LP-style text.
//!
//! File layout: a block of `\ key: value` header comments, then the usual
//! `Minimize` / `Subject To` / `Bounds` / `Binaries` / `Generals` / `End`
//! sections. Anything an LP reader cannot express goes into trailing comment
//! sections that LP readers skip:
//!
//! * `\LAZY`: constraint families separated at solve time, one `\ ` line each.
//! * `\CONDITIONAL`: native constraints, either `\ name: | a - b | >= r` or
//!   `\ name: x = 1 -> row`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{induce_order, EdgeId, Instance, Objective, ScanCover, VertexId};

/// Decimal digits kept by the integerized CP models.
pub const DEFAULT_SCALE: u32 = 8;

/// Subsets of family (4) are written out for vertices of at most this degree.
pub const DANTZIG_MATERIALIZE_DEGREE: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Formulation {
    Mip1,
    Mip2,
    Mip3,
    Cp1,
    Cp2,
}

impl Formulation {
    pub const ALL: [Formulation; 5] = [
        Formulation::Mip1,
        Formulation::Mip2,
        Formulation::Mip3,
        Formulation::Cp1,
        Formulation::Cp2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Formulation::Mip1 => "mip1",
            Formulation::Mip2 => "mip2",
            Formulation::Mip3 => "mip3",
            Formulation::Cp1 => "cp1",
            Formulation::Cp2 => "cp2",
        }
    }
}

impl std::str::FromStr for Formulation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Formulation::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown formulation `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum VarKind {
    /// Real, bounded below by 0.
    Continuous,
    Binary,
    Integer { lb: i64, ub: i64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum VarRole {
    T(EdgeId),
    /// Ordered adjacent pair: `e` scanned directly before `f` at their shared vertex.
    X(EdgeId, EdgeId),
    O(EdgeId),
    AuxMax,
    /// Orientation of an unordered pair `e < f` in the absolute-value linearization (1 when `e` goes first).
    Disjunction(EdgeId, EdgeId),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub role: VarRole,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl Sense {
    fn symbol(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub terms: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

impl Row {
    fn lhs(&self, values: &[f64]) -> f64 {
        self.terms.iter().map(|&(i, c)| c * values[i]).sum()
    }

    fn satisfied(&self, values: &[f64], tol: f64) -> bool {
        let lhs = self.lhs(values);
        match self.sense {
            Sense::Le => lhs <= self.rhs + tol,
            Sense::Ge => lhs >= self.rhs - tol,
            Sense::Eq => (lhs - self.rhs).abs() <= tol,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Body {
    Linear(Row),
    /// `|v[a] - v[b]| >= rhs`, kept native.
    Abs { a: usize, b: usize, rhs: f64 },
    /// `row` must hold when binary `indicator` is 1.
    Conditional { indicator: usize, row: Row },
}

impl Body {
    pub fn is_native(&self) -> bool {
        !matches!(self, Body::Linear(_))
    }
}

/// Family tags: `bigm` (1), `hamil1` (2), `hamil2` (3), `dantzig` (4),
/// `disjunction` and `abs` for the pairwise gap, `mtz` (9), `minmax` for
/// objective linearization rows.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Constraint {
    pub name: String,
    pub family: &'static str,
    pub body: Body,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LazyFamily {
    pub family: &'static str,
    /// One line per annotated item (vertex or global note).
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MipModel {
    pub formulation: Formulation,
    pub objective: Objective,
    pub variables: Vec<Variable>,
    pub constraints: Vec<Constraint>,
    /// Always minimized.
    pub objective_terms: Vec<(usize, f64)>,
    /// Degrees; `None` for the CP models, which need no big-M.
    pub big_m: Option<f64>,
    /// Coefficients are `round(value * 10^scale)` when set.
    pub scale: Option<u32>,
    pub lazy_families: Vec<LazyFamily>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ModelCounts {
    pub variables: usize,
    pub constraints: usize,
    pub t_vars: usize,
    pub x_vars: usize,
    pub o_vars: usize,
    pub native: usize,
}

impl MipModel {
    fn new(formulation: Formulation, objective: Objective, big_m: Option<f64>, scale: Option<u32>) -> Self {
        MipModel {
            formulation,
            objective,
            variables: Vec::new(),
            constraints: Vec::new(),
            objective_terms: Vec::new(),
            big_m,
            scale,
            lazy_families: Vec::new(),
        }
    }

    fn var(&mut self, name: String, kind: VarKind, role: VarRole) -> usize {
        self.variables.push(Variable { name, kind, role });
        self.variables.len() - 1
    }

    fn add(&mut self, family: &'static str, body: Body) {
        let name = format!("{family}_{}", self.constraints.len());
        self.constraints.push(Constraint { name, family, body });
    }

    fn linear(&mut self, family: &'static str, terms: Vec<(usize, f64)>, sense: Sense, rhs: f64) {
        self.add(family, Body::Linear(Row { terms, sense, rhs }));
    }

    pub fn counts(&self) -> ModelCounts {
        let role = |p: fn(&VarRole) -> bool| self.variables.iter().filter(|v| p(&v.role)).count();
        ModelCounts {
            variables: self.variables.len(),
            constraints: self.constraints.len(),
            t_vars: role(|r| matches!(r, VarRole::T(_))),
            x_vars: role(|r| matches!(r, VarRole::X(..))),
            o_vars: role(|r| matches!(r, VarRole::O(_))),
            native: self.constraints.iter().filter(|c| c.body.is_native()).count(),
        }
    }

    fn factor(&self) -> f64 {
        self.scale.map_or(1.0, |s| 10f64.powi(s as i32))
    }

    /// Angle or time in model units.
    fn coef(&self, degrees: f64) -> f64 {
        match self.scale {
            Some(_) => (degrees * self.factor()).round(),
            None => degrees,
        }
    }

    /// Objective value in degrees for a full assignment.
    pub fn objective_value(&self, values: &[f64]) -> f64 {
        let raw: f64 = self.objective_terms.iter().map(|&(i, c)| c * values[i]).sum();
        raw / self.factor()
    }

    /// Names of violated constraints and bounds; `tol` is in degrees.
    pub fn violations(&self, values: &[f64], tol: f64) -> Vec<String> {
        let tol = tol * self.factor();
        let mut out = Vec::new();
        for (v, &x) in self.variables.iter().zip(values) {
            let ok = match v.kind {
                VarKind::Continuous => x >= -tol,
                VarKind::Binary => x == 0.0 || x == 1.0,
                VarKind::Integer { lb, ub } => x.fract() == 0.0 && x >= lb as f64 && x <= ub as f64,
            };
            if !ok {
                out.push(format!("bound {}", v.name));
            }
        }
        for c in &self.constraints {
            let ok = match &c.body {
                Body::Linear(row) => row.satisfied(values, tol),
                Body::Abs { a, b, rhs } => (values[*a] - values[*b]).abs() >= rhs - tol,
                Body::Conditional { indicator, row } => values[*indicator] < 0.5 || row.satisfied(values, tol),
            };
            if !ok {
                out.push(c.name.clone());
            }
        }
        out
    }

    /// Maps a valid schedule onto the model variables: `t` from the scan
    /// times, `x` from consecutive pairs of the induced order, `o` from the
    /// global scan sequence, and every auxiliary max at its tightest value.
    pub fn assignment_from_schedule(&self, inst: &Instance, sc: &ScanCover) -> Result<Vec<f64>> {
        let order = induce_order(inst, sc)?;
        let mut next = vec![false; 0];
        let m = inst.num_edges();
        next.resize(m * m, false);
        for seq in &order.sequences {
            for w in seq.windows(2) {
                next[w[0] * m + w[1]] = true;
            }
        }
        let mut position = vec![0usize; m];
        for (k, e) in sc.sequence().into_iter().enumerate() {
            position[e] = k;
        }
        let time = |e: EdgeId| self.coef(sc.time(e));
        let mut values: Vec<f64> = self
            .variables
            .iter()
            .map(|v| match v.role {
                VarRole::T(e) => time(e),
                VarRole::X(e, f) => f64::from(u8::from(next[e * m + f])),
                VarRole::O(e) => position[e] as f64,
                VarRole::Disjunction(e, f) => f64::from(u8::from(time(e) <= time(f))),
                VarRole::AuxMax => 0.0,
            })
            .collect();
        if let Some(z) = self.variables.iter().position(|v| v.role == VarRole::AuxMax) {
            let tightest = self
                .constraints
                .iter()
                .filter(|c| c.family == "minmax")
                .filter_map(|c| match &c.body {
                    Body::Linear(row) => Some(
                        row.terms.iter().filter(|&&(i, _)| i != z).map(|&(i, c)| -c * values[i]).sum::<f64>(),
                    ),
                    _ => None,
                })
                .fold(0.0, f64::max);
            values[z] = tightest;
        }
        Ok(values)
    }
}

/// `⌈log₂ n⌉ · 360`.
pub fn big_m1(n: usize) -> f64 {
    let bits = if n <= 1 { 0 } else { usize::BITS - (n - 1).leading_zeros() };
    f64::from(bits) * 360.0
}

/// `|E| · 180`.
pub fn big_m2(m: usize) -> f64 {
    m as f64 * 180.0
}

fn t_vars(model: &mut MipModel, inst: &Instance, kind: VarKind) -> Vec<usize> {
    (0..inst.num_edges())
        .map(|e| model.var(format!("t_{e}"), kind, VarRole::T(e)))
        .collect()
}

/// Ordered adjacent pairs grouped by shared vertex, with their x variables.
struct PairVars {
    by_vertex: Vec<Vec<(EdgeId, EdgeId, usize)>>,
    index: BTreeMap<(EdgeId, EdgeId), usize>,
}

fn x_vars(model: &mut MipModel, inst: &Instance) -> PairVars {
    let mut by_vertex = vec![Vec::new(); inst.num_vertices()];
    let mut index = BTreeMap::new();
    for (v, slot) in by_vertex.iter_mut().enumerate() {
        for &e in inst.incident(v) {
            for &f in inst.incident(v) {
                if e != f {
                    let id = model.var(format!("x_{e}_{f}"), VarKind::Binary, VarRole::X(e, f));
                    slot.push((e, f, id));
                    index.insert((e, f), id);
                }
            }
        }
    }
    PairVars { by_vertex, index }
}

/// Families (2) and (3).
fn hamiltonian_rows(model: &mut MipModel, inst: &Instance, px: &PairVars) {
    for v in 0..inst.num_vertices() {
        let inc = inst.incident(v);
        if inc.len() < 2 {
            continue;
        }
        for &e in inc {
            let out: Vec<_> = inc.iter().filter(|&&f| f != e).map(|&f| (px.index[&(e, f)], 1.0)).collect();
            let inn: Vec<_> = inc.iter().filter(|&&f| f != e).map(|&f| (px.index[&(f, e)], 1.0)).collect();
            model.linear("hamil1", out, Sense::Le, 1.0);
            model.linear("hamil1", inn, Sense::Le, 1.0);
        }
        let all: Vec<_> = px.by_vertex[v].iter().map(|&(_, _, id)| (id, 1.0)).collect();
        model.linear("hamil2", all, Sense::Eq, (inc.len() - 1) as f64);
    }
}

/// Family (4): cut rows for low-degree vertices, annotations for the rest.
fn dantzig_rows(model: &mut MipModel, inst: &Instance, px: &PairVars) {
    let mut deferred = Vec::new();
    let mut written = Vec::new();
    for v in 0..inst.num_vertices() {
        let inc = inst.incident(v);
        let d = inc.len();
        if d < 2 {
            continue;
        }
        if d > DANTZIG_MATERIALIZE_DEGREE {
            let list: Vec<String> = inc.iter().map(|e| e.to_string()).collect();
            deferred.push(format!("vertex {v} edges {}", list.join(" ")));
            continue;
        }
        written.push(v.to_string());
        // S and its complement give the same row, so the last edge stays outside S
        for mask in 1u32..(1 << (d - 1)) {
            let mut terms = Vec::new();
            for (i, &e) in inc.iter().enumerate() {
                if mask & (1 << i) == 0 {
                    continue;
                }
                for (j, &f) in inc.iter().enumerate() {
                    if j == d - 1 || mask & (1 << j) == 0 {
                        terms.push((px.index[&(e, f)], 1.0));
                        terms.push((px.index[&(f, e)], 1.0));
                    }
                }
            }
            model.linear("dantzig", terms, Sense::Ge, 1.0);
        }
    }
    if !written.is_empty() || !deferred.is_empty() {
        let mut notes = vec![format!(
            "cuts over nonempty proper subsets of E(v), written out for degree <= {DANTZIG_MATERIALIZE_DEGREE} (vertices: {})",
            if written.is_empty() { "none".to_string() } else { written.join(" ") }
        )];
        notes.extend(deferred);
        model.lazy_families.push(LazyFamily { family: "dantzig", notes });
    }
}

fn aux(model: &mut MipModel, kind: VarKind) -> usize {
    let z = model.var("z".into(), kind, VarRole::AuxMax);
    model.objective_terms = vec![(z, 1.0)];
    z
}

/// Objective over x: TE sums all pair angles, BE bounds each vertex sum by an auxiliary max.
fn energy_objective(model: &mut MipModel, inst: &Instance, px: &PairVars, objective: Objective, aux_kind: VarKind) {
    let weight = |model: &MipModel, v: VertexId, e: EdgeId, f: EdgeId| model.coef(inst.alpha_at(v, e, f));
    match objective {
        Objective::TotalEnergy => {
            let mut terms = Vec::new();
            for (v, pairs) in px.by_vertex.iter().enumerate() {
                for &(e, f, id) in pairs {
                    terms.push((id, weight(model, v, e, f)));
                }
            }
            model.objective_terms = terms;
        }
        Objective::BottleneckEnergy => {
            if inst.num_edges() == 0 {
                return;
            }
            let z = aux(model, aux_kind);
            for (v, pairs) in px.by_vertex.iter().enumerate() {
                if pairs.is_empty() {
                    continue;
                }
                let mut terms = vec![(z, 1.0)];
                terms.extend(pairs.iter().map(|&(e, f, id)| (id, -weight(model, v, e, f))));
                model.linear("minmax", terms, Sense::Ge, 0.0);
            }
        }
        Objective::Makespan => unreachable!("energy objective requested for makespan"),
    }
}

fn makespan_objective(model: &mut MipModel, t: &[usize], aux_kind: VarKind) {
    if t.is_empty() {
        return;
    }
    let z = aux(model, aux_kind);
    for &te in t {
        model.linear("minmax", vec![(z, 1.0), (te, -1.0)], Sense::Ge, 0.0);
    }
}

fn unsupported(formulation: &'static str, objective: Objective) -> Error {
    Error::RequestedObjectiveUnsupported { formulation, objective }
}

/// MIP-1: times, ordered-pair successor binaries and big-M linking rows.
pub fn build_mip1(inst: &Instance, objective: Objective) -> MipModel {
    let big_m = match objective {
        Objective::Makespan => big_m1(inst.num_vertices()),
        _ => big_m2(inst.num_edges()),
    };
    let mut model = MipModel::new(Formulation::Mip1, objective, Some(big_m), None);
    let t = t_vars(&mut model, inst, VarKind::Continuous);
    let px = x_vars(&mut model, inst);
    for (v, pairs) in px.by_vertex.iter().enumerate() {
        for &(e, f, id) in pairs {
            // t_f - t_e - M x >= α - M
            let alpha = inst.alpha_at(v, e, f);
            model.linear("bigm", vec![(t[f], 1.0), (t[e], -1.0), (id, -big_m)], Sense::Ge, alpha - big_m);
        }
    }
    hamiltonian_rows(&mut model, inst, &px);
    dantzig_rows(&mut model, inst, &px);
    match objective {
        Objective::Makespan => makespan_objective(&mut model, &t, VarKind::Continuous),
        _ => energy_objective(&mut model, inst, &px, objective, VarKind::Continuous),
    }
    model
}

/// MIP-2: pairwise absolute gaps linearized with one orientation binary each.
pub fn build_mip2(inst: &Instance, objective: Objective) -> Result<MipModel> {
    if objective != Objective::Makespan {
        return Err(unsupported("mip2", objective));
    }
    let big_m = big_m1(inst.num_vertices());
    let mut model = MipModel::new(Formulation::Mip2, objective, Some(big_m), None);
    let t = t_vars(&mut model, inst, VarKind::Continuous);
    for (v, e, f) in inst.adjacent_pairs() {
        let alpha = inst.alpha_at(v, e, f);
        let b = model.var(format!("b_{e}_{f}"), VarKind::Binary, VarRole::Disjunction(e, f));
        model.linear("disjunction", vec![(t[f], 1.0), (t[e], -1.0), (b, -big_m)], Sense::Ge, alpha - big_m);
        model.linear("disjunction", vec![(t[e], 1.0), (t[f], -1.0), (b, big_m)], Sense::Ge, alpha);
    }
    makespan_objective(&mut model, &t, VarKind::Continuous);
    Ok(model)
}

/// MIP-3: successor binaries only; cycle families are separated lazily.
pub fn build_mip3(inst: &Instance, objective: Objective) -> Result<MipModel> {
    if objective == Objective::Makespan {
        return Err(unsupported("mip3", objective));
    }
    let mut model = MipModel::new(Formulation::Mip3, objective, None, None);
    let px = x_vars(&mut model, inst);
    hamiltonian_rows(&mut model, inst, &px);
    dantzig_rows(&mut model, inst, &px);
    if !px.index.is_empty() {
        model.lazy_families.push(LazyFamily {
            family: "global_cycle",
            notes: vec!["every directed cycle e_0 .. e_(k-1) over x: sum of its x <= k - 1; separated by DFS on integral solutions".into()],
        });
    }
    energy_objective(&mut model, inst, &px, objective, VarKind::Continuous);
    Ok(model)
}

fn scaled_bound(inst: &Instance, scale: u32) -> i64 {
    (big_m2(inst.num_edges()) * 10f64.powi(scale as i32)).round() as i64
}

/// CP-1: the MIP-2 structure on integers scaled by `10^scale`, with native absolute values.
pub fn build_cp1(inst: &Instance, scale: u32) -> MipModel {
    let mut model = MipModel::new(Formulation::Cp1, Objective::Makespan, None, Some(scale));
    let kind = VarKind::Integer { lb: 0, ub: scaled_bound(inst, scale) };
    let t = t_vars(&mut model, inst, kind);
    for (v, e, f) in inst.adjacent_pairs() {
        let rhs = model.coef(inst.alpha_at(v, e, f));
        model.add("abs", Body::Abs { a: t[e], b: t[f], rhs });
    }
    makespan_objective(&mut model, &t, kind);
    model
}

/// CP-2 at the default scale.
pub fn build_cp2(inst: &Instance, objective: Objective) -> Result<MipModel> {
    build_cp2_scaled(inst, objective, DEFAULT_SCALE)
}

/// CP-2: successor binaries plus order variables linked by conditional rows.
pub fn build_cp2_scaled(inst: &Instance, objective: Objective, scale: u32) -> Result<MipModel> {
    if objective == Objective::Makespan {
        return Err(unsupported("cp2", objective));
    }
    let m = inst.num_edges();
    let mut model = MipModel::new(Formulation::Cp2, objective, None, Some(scale));
    let px = x_vars(&mut model, inst);
    let ub = m.saturating_sub(1) as i64;
    let o: Vec<usize> = (0..m)
        .map(|e| model.var(format!("o_{e}"), VarKind::Integer { lb: 0, ub }, VarRole::O(e)))
        .collect();
    hamiltonian_rows(&mut model, inst, &px);
    for pairs in &px.by_vertex {
        for &(e, f, id) in pairs {
            let row = Row { terms: vec![(o[f], 1.0), (o[e], -1.0)], sense: Sense::Ge, rhs: 1.0 };
            model.add("mtz", Body::Conditional { indicator: id, row });
        }
    }
    let aux_kind = VarKind::Integer { lb: 0, ub: scaled_bound(inst, scale) };
    energy_objective(&mut model, inst, &px, objective, aux_kind);
    Ok(model)
}

/// Dispatch by formulation; CP-1 uses [`DEFAULT_SCALE`].
pub fn build(inst: &Instance, formulation: Formulation, objective: Objective) -> Result<MipModel> {
    match formulation {
        Formulation::Mip1 => Ok(build_mip1(inst, objective)),
        Formulation::Mip2 => build_mip2(inst, objective),
        Formulation::Mip3 => build_mip3(inst, objective),
        Formulation::Cp1 if objective == Objective::Makespan => Ok(build_cp1(inst, DEFAULT_SCALE)),
        Formulation::Cp1 => Err(unsupported("cp1", objective)),
        Formulation::Cp2 => build_cp2(inst, objective),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Format {
    /// Plain LP; fails on native constraints and drops lazy annotations.
    Lp,
    /// LP plus the `\LAZY` and `\CONDITIONAL` sections.
    LpWithSidecar,
}

fn num(x: f64) -> String {
    if x == x.trunc() && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{x}")
    }
}

fn expr(model: &MipModel, terms: &[(usize, f64)]) -> String {
    let mut s = String::new();
    for (k, &(i, c)) in terms.iter().enumerate() {
        let sign = if c < 0.0 { "-" } else { "+" };
        if k == 0 {
            if c < 0.0 {
                s.push_str("- ");
            }
        } else {
            let _ = write!(s, " {sign} ");
        }
        let _ = write!(s, "{} {}", num(c.abs()), model.variables[i].name);
    }
    if s.is_empty() {
        s.push('0');
    }
    s
}

fn row_text(model: &MipModel, row: &Row) -> String {
    format!("{} {} {}", expr(model, &row.terms), row.sense.symbol(), num(row.rhs))
}

/// Serializes a model. Output depends only on the model.
pub fn emit(model: &MipModel, format: Format) -> Result<String> {
    if format == Format::Lp {
        if let Some(c) = model.constraints.iter().find(|c| c.body.is_native()) {
            return Err(Error::UnrepresentableConstraint(c.family.to_string()));
        }
    }
    let counts = model.counts();
    let mut out = String::new();
    let _ = writeln!(out, "\\ scancover model");
    let _ = writeln!(out, "\\ formulation: {}", model.formulation.name());
    let _ = writeln!(out, "\\ objective: {}", model.objective.short());
    let _ = writeln!(out, "\\ variables: {}", counts.variables);
    let _ = writeln!(out, "\\ constraints: {}", counts.constraints);
    let _ = writeln!(out, "\\ big_M: {}", model.big_m.map_or("none".into(), num));
    let _ = writeln!(out, "\\ scale: {}", model.scale.map_or("none".into(), |s| s.to_string()));
    if model.variables.is_empty() && model.constraints.is_empty() {
        return Ok(out);
    }
    let _ = writeln!(out, "Minimize\n obj: {}", expr(model, &model.objective_terms));
    out.push_str("Subject To\n");
    for c in &model.constraints {
        if let Body::Linear(row) = &c.body {
            let _ = writeln!(out, " {}: {}", c.name, row_text(model, row));
        }
    }
    out.push_str("Bounds\n");
    for v in &model.variables {
        match v.kind {
            VarKind::Continuous => {
                let _ = writeln!(out, " {} >= 0", v.name);
            }
            VarKind::Binary => {
                let _ = writeln!(out, " 0 <= {} <= 1", v.name);
            }
            VarKind::Integer { lb, ub } => {
                let _ = writeln!(out, " {lb} <= {} <= {ub}", v.name);
            }
        }
    }
    for (title, pick) in [
        ("Binaries", (|k: &VarKind| matches!(k, VarKind::Binary)) as fn(&VarKind) -> bool),
        ("Generals", |k: &VarKind| matches!(k, VarKind::Integer { .. })),
    ] {
        let names: Vec<&str> = model.variables.iter().filter(|v| pick(&v.kind)).map(|v| v.name.as_str()).collect();
        if !names.is_empty() {
            let _ = writeln!(out, "{title}\n {}", names.join(" "));
        }
    }
    out.push_str("End\n");
    if format == Format::LpWithSidecar {
        if !model.lazy_families.is_empty() {
            out.push_str("\\LAZY\n");
            for fam in &model.lazy_families {
                for note in &fam.notes {
                    let _ = writeln!(out, "\\ {}: {note}", fam.family);
                }
            }
        }
        if counts.native > 0 {
            out.push_str("\\CONDITIONAL\n");
            for c in &model.constraints {
                let text = match &c.body {
                    Body::Linear(_) => continue,
                    Body::Abs { a, b, rhs } => format!(
                        "| {} - {} | >= {}",
                        model.variables[*a].name,
                        model.variables[*b].name,
                        num(*rhs)
                    ),
                    Body::Conditional { indicator, row } => {
                        format!("{} = 1 -> {}", model.variables[*indicator].name, row_text(model, row))
                    }
                };
                let _ = writeln!(out, "\\ {}: {text}", c.name);
            }
        }
    }
    Ok(out)
}

/// Counts recovered from emitted text.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ParsedCounts {
    pub variables: usize,
    pub constraints: usize,
    pub native: usize,
    pub lazy_notes: usize,
}

/// Reads back an emitted file: variables from `Bounds`, constraints from
/// `Subject To` plus the `\CONDITIONAL` section.
pub fn parse_counts(text: &str) -> Result<ParsedCounts> {
    #[derive(PartialEq)]
    enum Section {
        Header,
        Objective,
        Rows,
        Bounds,
        Kinds,
        Lazy,
        Native,
        Done,
    }
    let mut section = Section::Header;
    let mut counts = ParsedCounts::default();
    for (i, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        match trimmed {
            "Minimize" => section = Section::Objective,
            "Subject To" => section = Section::Rows,
            "Bounds" => section = Section::Bounds,
            "Binaries" | "Generals" => section = Section::Kinds,
            "End" => section = Section::Done,
            "\\LAZY" => section = Section::Lazy,
            "\\CONDITIONAL" => section = Section::Native,
            "" => {}
            _ => match section {
                Section::Rows => counts.constraints += 1,
                Section::Bounds => counts.variables += 1,
                Section::Lazy => counts.lazy_notes += 1,
                Section::Native => {
                    counts.constraints += 1;
                    counts.native += 1;
                }
                Section::Header | Section::Done if trimmed.starts_with('\\') => {}
                Section::Objective | Section::Kinds => {}
                _ => {
                    return Err(Error::Parse {
                        line: i + 1,
                        column: 1,
                        message: format!("unexpected line `{trimmed}`"),
                    })
                }
            },
        }
    }
    Ok(counts)
}
