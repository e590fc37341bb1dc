//! Mixed-integer linear program representation.

use std::collections::HashMap;
use std::fmt;

use crate::error::ModelError;

/// Dense index of a variable inside a [`Model`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub usize);

/// Dense index of a constraint inside a [`Model`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConstrId(pub usize);

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Continuous,
    Binary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Var {
    pub name: String,
    pub kind: VarKind,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstrSense {
    Le,
    Ge,
    Eq,
}

impl ConstrSense {
    pub fn symbol(self) -> &'static str {
        match self {
            ConstrSense::Le => "<=",
            ConstrSense::Ge => ">=",
            ConstrSense::Eq => "=",
        }
    }
}

/// A linear constraint `Σ coef·x sense rhs`. Terms are coalesced and sorted by variable id.
#[derive(Debug, Clone, PartialEq)]
pub struct LinConstraint {
    pub terms: Vec<(f64, VarId)>,
    pub sense: ConstrSense,
    pub rhs: f64,
    pub name: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjSense {
    Maximize,
    Minimize,
}

/// A linear expression `Σ coef·x + constant`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LinExpr {
    pub terms: Vec<(f64, VarId)>,
    pub constant: f64,
}

impl LinExpr {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn var(v: VarId) -> Self {
        Self { terms: vec![(1.0, v)], constant: 0.0 }
    }

    pub fn term(mut self, coef: f64, v: VarId) -> Self {
        self.terms.push((coef, v));
        self
    }

    pub fn add_term(&mut self, coef: f64, v: VarId) {
        self.terms.push((coef, v));
    }

    pub fn plus(mut self, c: f64) -> Self {
        self.constant += c;
        self
    }

    pub fn evaluate(&self, values: &[f64]) -> f64 {
        self.constant + self.terms.iter().map(|&(c, v)| c * values[v.0]).sum::<f64>()
    }
}

/// Single blended objective. Weighted sub-objectives are flattened into `expr` as they are added.
#[derive(Debug, Clone, PartialEq)]
pub struct Objective {
    pub sense: ObjSense,
    pub expr: LinExpr,
}

/// Result of [`Model::add_abs_link`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AbsLink {
    pub selector: VarId,
    pub constraints: [ConstrId; 4],
}

#[derive(Debug, Clone, Default)]
pub struct Model {
    vars: Vec<Var>,
    constrs: Vec<LinConstraint>,
    objective: Option<Objective>,
    var_names: HashMap<String, VarId>,
    constr_names: HashMap<String, ConstrId>,
}

fn coalesce(terms: impl IntoIterator<Item = (f64, VarId)>) -> Vec<(f64, VarId)> {
    let mut out: Vec<(f64, VarId)> = terms.into_iter().collect();
    out.sort_by_key(|&(_, v)| v);
    let mut merged: Vec<(f64, VarId)> = Vec::with_capacity(out.len());
    for (c, v) in out {
        match merged.last_mut() {
            Some(last) if last.1 == v => last.0 += c,
            _ => merged.push((c, v)),
        }
    }
    merged
}

impl Model {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn num_constrs(&self) -> usize {
        self.constrs.len()
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn var(&self, id: VarId) -> &Var {
        &self.vars[id.0]
    }

    pub fn var_by_name(&self, name: &str) -> Option<VarId> {
        self.var_names.get(name).copied()
    }

    pub fn constrs(&self) -> &[LinConstraint] {
        &self.constrs
    }

    pub fn objective(&self) -> Option<&Objective> {
        self.objective.as_ref()
    }

    pub fn binaries(&self) -> impl Iterator<Item = VarId> + '_ {
        self.vars.iter().enumerate().filter(|(_, v)| v.kind == VarKind::Binary).map(|(i, _)| VarId(i))
    }

    pub fn num_binaries(&self) -> usize {
        self.binaries().count()
    }

    pub fn add_var(
        &mut self,
        name: impl Into<String>,
        kind: VarKind,
        lower: f64,
        upper: f64,
    ) -> Result<VarId, ModelError> {
        let name = name.into();
        if self.var_names.contains_key(&name) {
            return Err(ModelError::DuplicateName(name));
        }
        let bad = lower.is_nan()
            || upper.is_nan()
            || lower > upper
            || lower == f64::INFINITY
            || upper == f64::NEG_INFINITY
            || (kind == VarKind::Binary && (lower < 0.0 || upper > 1.0));
        if bad {
            return Err(ModelError::BadBounds { name, lower, upper });
        }
        let id = VarId(self.vars.len());
        self.var_names.insert(name.clone(), id);
        self.vars.push(Var { name, kind, lower, upper });
        Ok(id)
    }

    pub fn add_continuous(&mut self, name: impl Into<String>, lower: f64, upper: f64) -> Result<VarId, ModelError> {
        self.add_var(name, VarKind::Continuous, lower, upper)
    }

    pub fn add_binary(&mut self, name: impl Into<String>) -> Result<VarId, ModelError> {
        self.add_var(name, VarKind::Binary, 0.0, 1.0)
    }

    /// Tightens or relaxes the bounds of an existing variable.
    pub fn set_bounds(&mut self, id: VarId, lower: f64, upper: f64) -> Result<(), ModelError> {
        let var = self.vars.get_mut(id.0).ok_or(ModelError::UnknownVar(id.0))?;
        if lower.is_nan() || upper.is_nan() || lower > upper {
            return Err(ModelError::BadBounds { name: var.name.clone(), lower, upper });
        }
        var.lower = lower;
        var.upper = upper;
        Ok(())
    }

    /// Adds `Σ terms sense rhs`. An empty `name` is replaced by `c<id>`.
    pub fn add_constr(
        &mut self,
        terms: impl IntoIterator<Item = (f64, VarId)>,
        sense: ConstrSense,
        rhs: f64,
        name: impl Into<String>,
    ) -> Result<ConstrId, ModelError> {
        let terms = coalesce(terms);
        for &(c, v) in &terms {
            if v.0 >= self.vars.len() {
                return Err(ModelError::UnknownVar(v.0));
            }
            if !c.is_finite() {
                return Err(ModelError::NonFinite);
            }
        }
        if rhs.is_nan() {
            return Err(ModelError::NonFinite);
        }
        let id = ConstrId(self.constrs.len());
        let mut name = name.into();
        if name.is_empty() {
            name = format!("c{}", id.0);
        }
        if self.constr_names.contains_key(&name) {
            return Err(ModelError::DuplicateName(name));
        }
        self.constr_names.insert(name.clone(), id);
        self.constrs.push(LinConstraint { terms, sense, rhs, name });
        Ok(id)
    }

    /// Adds `expr sense rhs`, moving the expression's constant to the right-hand side.
    pub fn add_expr_constr(
        &mut self,
        expr: &LinExpr,
        sense: ConstrSense,
        rhs: f64,
        name: impl Into<String>,
    ) -> Result<ConstrId, ModelError> {
        self.add_constr(expr.terms.iter().copied(), sense, rhs - expr.constant, name)
    }

    pub fn set_objective(&mut self, sense: ObjSense, expr: LinExpr) -> Result<(), ModelError> {
        for &(c, v) in &expr.terms {
            if v.0 >= self.vars.len() {
                return Err(ModelError::UnknownVar(v.0));
            }
            if !c.is_finite() {
                return Err(ModelError::NonFinite);
            }
        }
        let expr = LinExpr { terms: coalesce(expr.terms), constant: expr.constant };
        self.objective = Some(Objective { sense, expr });
        Ok(())
    }

    /// Adds `weight · expr` to the current objective.
    pub fn add_objective_term(&mut self, weight: f64, expr: &LinExpr) -> Result<(), ModelError> {
        let obj = self.objective.as_mut().ok_or(ModelError::NoObjective)?;
        let mut terms = std::mem::take(&mut obj.expr.terms);
        terms.extend(expr.terms.iter().map(|&(c, v)| (weight * c, v)));
        let sense = obj.sense;
        let constant = obj.expr.constant + weight * expr.constant;
        self.set_objective(sense, LinExpr { terms, constant })
    }

    /// Links `aux = |source|` exactly with one fresh binary selector `σ`:
    /// `aux ≥ source`, `aux ≥ −source`, `aux ≤ source + 2M(1−σ)`, `aux ≤ −source + 2Mσ`,
    /// where `M = max(|lb|, |ub|)` of the source.
    pub fn add_abs_link(&mut self, source: VarId, aux: VarId) -> Result<AbsLink, ModelError> {
        let n = self.vars.len();
        if source.0 >= n {
            return Err(ModelError::UnknownVar(source.0));
        }
        if aux.0 >= n {
            return Err(ModelError::UnknownVar(aux.0));
        }
        let src = &self.vars[source.0];
        if !src.lower.is_finite() || !src.upper.is_finite() {
            return Err(ModelError::UnboundedSource(src.name.clone()));
        }
        let aux_var = &self.vars[aux.0];
        if aux_var.lower < 0.0 {
            return Err(ModelError::BadBounds {
                name: aux_var.name.clone(),
                lower: aux_var.lower,
                upper: aux_var.upper,
            });
        }
        let big_m = src.lower.abs().max(src.upper.abs());
        let sel_name = format!("{}_sgn", aux_var.name);
        let selector = self.add_binary(sel_name)?;
        let two_m = 2.0 * big_m;
        let c0 = self.add_constr([(1.0, aux), (-1.0, source)], ConstrSense::Ge, 0.0, "")?;
        let c1 = self.add_constr([(1.0, aux), (1.0, source)], ConstrSense::Ge, 0.0, "")?;
        let c2 = self.add_constr([(1.0, aux), (-1.0, source), (two_m, selector)], ConstrSense::Le, two_m, "")?;
        let c3 = self.add_constr([(1.0, aux), (1.0, source), (-two_m, selector)], ConstrSense::Le, 0.0, "")?;
        Ok(AbsLink { selector, constraints: [c0, c1, c2, c3] })
    }

    /// Largest absolute constraint violation of `values`, ignoring variable bounds.
    pub fn max_constraint_violation(&self, values: &[f64]) -> f64 {
        self.constrs
            .iter()
            .map(|c| {
                let lhs: f64 = c.terms.iter().map(|&(a, v)| a * values[v.0]).sum();
                match c.sense {
                    ConstrSense::Le => (lhs - c.rhs).max(0.0),
                    ConstrSense::Ge => (c.rhs - lhs).max(0.0),
                    ConstrSense::Eq => (lhs - c.rhs).abs(),
                }
            })
            .fold(0.0, f64::max)
    }

    /// Largest absolute bound violation of `values`.
    pub fn max_bound_violation(&self, values: &[f64]) -> f64 {
        self.vars.iter().zip(values).map(|(v, &x)| (v.lower - x).max(x - v.upper).max(0.0)).fold(0.0, f64::max)
    }

    pub fn objective_value(&self, values: &[f64]) -> f64 {
        self.objective.as_ref().map_or(0.0, |o| o.expr.evaluate(values))
    }
}
