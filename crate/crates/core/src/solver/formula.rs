use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::lenset::LenSet;
use super::prepared::Prepared;
use crate::sketch::SymId;

/// A length variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LenVar(pub u32);

impl fmt::Display for LenVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Operand {
    Var(LenVar),
    Const(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Coef {
    Const(u64),
    Sym(SymId),
}

/// `sum(coef_i * operand_i) + constant`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LenTerm {
    pub parts: Vec<(Coef, Operand)>,
    pub constant: u64,
}

impl LenTerm {
    pub fn constant(c: u64) -> LenTerm {
        LenTerm { parts: Vec::new(), constant: c }
    }

    pub fn var(v: LenVar) -> LenTerm {
        LenTerm { parts: vec![(Coef::Const(1), Operand::Var(v))], constant: 0 }
    }

    pub fn scaled(v: LenVar, k: Coef) -> LenTerm {
        LenTerm { parts: vec![(k, Operand::Var(v))], constant: 0 }
    }

    pub fn sum(vars: &[LenVar]) -> LenTerm {
        LenTerm { parts: vars.iter().map(|&v| (Coef::Const(1), Operand::Var(v))).collect(), constant: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rel {
    Eq,
    Ge,
    Le,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SymRel {
    Eq,
    Ne,
    Ge,
    Le,
}

/// Constraint over length variables and symbolic integers.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum LenFormula {
    True,
    False,
    And(Vec<LenFormula>),
    Or(Vec<LenFormula>),
    Exists(Vec<LenVar>, Box<LenFormula>),
    /// `lhs rel rhs`
    Len { lhs: Operand, rel: Rel, rhs: LenTerm },
    /// `sym rel value`
    Sym { sym: SymId, rel: SymRel, value: u32 },
    /// `a <= b`
    SymLe(SymId, SymId),
}

impl LenFormula {
    pub fn and(parts: Vec<LenFormula>) -> LenFormula {
        let mut out = Vec::with_capacity(parts.len());
        for p in parts {
            match p {
                LenFormula::True => {}
                LenFormula::False => return LenFormula::False,
                LenFormula::And(inner) => out.extend(inner),
                p => out.push(p),
            }
        }
        match out.len() {
            0 => LenFormula::True,
            1 => out.pop().unwrap(),
            _ => LenFormula::And(out),
        }
    }

    pub fn or(parts: Vec<LenFormula>) -> LenFormula {
        let mut out = Vec::with_capacity(parts.len());
        for p in parts {
            match p {
                LenFormula::False => {}
                LenFormula::True => return LenFormula::True,
                LenFormula::Or(inner) => out.extend(inner),
                p => out.push(p),
            }
        }
        match out.len() {
            0 => LenFormula::False,
            1 => out.pop().unwrap(),
            _ => LenFormula::Or(out),
        }
    }

    pub fn exists(vars: Vec<LenVar>, body: LenFormula) -> LenFormula {
        match body {
            LenFormula::True | LenFormula::False => body,
            body => LenFormula::Exists(vars, Box::new(body)),
        }
    }

    pub fn len(lhs: LenVar, rel: Rel, rhs: LenTerm) -> LenFormula {
        LenFormula::Len { lhs: Operand::Var(lhs), rel, rhs }
    }

    pub fn sym(sym: SymId, rel: SymRel, value: u32) -> LenFormula {
        LenFormula::Sym { sym, rel, value }
    }

    /// Free length variables.
    pub fn free_vars(&self) -> BTreeSet<LenVar> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<LenVar>, out: &mut BTreeSet<LenVar>) {
        let mut note = |o: &Operand, bound: &Vec<LenVar>| {
            if let Operand::Var(v) = o {
                if !bound.contains(v) {
                    out.insert(*v);
                }
            }
        };
        match self {
            LenFormula::True | LenFormula::False | LenFormula::Sym { .. } | LenFormula::SymLe(..) => {}
            LenFormula::Len { lhs, rhs, .. } => {
                note(lhs, bound);
                for (_, o) in &rhs.parts {
                    note(o, bound);
                }
            }
            LenFormula::And(ps) | LenFormula::Or(ps) => {
                for p in ps {
                    p.collect_free(bound, out);
                }
            }
            LenFormula::Exists(vs, body) => {
                let n = bound.len();
                bound.extend_from_slice(vs);
                body.collect_free(bound, out);
                bound.truncate(n);
            }
        }
    }

    /// Symbolic integers mentioned anywhere in the formula.
    pub fn syms(&self) -> BTreeSet<SymId> {
        let mut out = BTreeSet::new();
        self.collect_syms(&mut out);
        out
    }

    fn collect_syms(&self, out: &mut BTreeSet<SymId>) {
        match self {
            LenFormula::True | LenFormula::False => {}
            LenFormula::Sym { sym, .. } => {
                out.insert(*sym);
            }
            LenFormula::SymLe(a, b) => {
                out.insert(*a);
                out.insert(*b);
            }
            LenFormula::Len { rhs, .. } => {
                for (c, _) in &rhs.parts {
                    if let Coef::Sym(k) = c {
                        out.insert(*k);
                    }
                }
            }
            LenFormula::And(ps) | LenFormula::Or(ps) => ps.iter().for_each(|p| p.collect_syms(out)),
            LenFormula::Exists(_, body) => body.collect_syms(out),
        }
    }

    /// Replaces free occurrences of `v` by the constant `c`.
    pub fn subst_var(&self, v: LenVar, c: u64) -> LenFormula {
        let op = |o: &Operand| match o {
            Operand::Var(w) if *w == v => Operand::Const(c),
            o => *o,
        };
        match self {
            LenFormula::True | LenFormula::False | LenFormula::Sym { .. } | LenFormula::SymLe(..) => self.clone(),
            LenFormula::Len { lhs, rel, rhs } => LenFormula::Len {
                lhs: op(lhs),
                rel: *rel,
                rhs: LenTerm { parts: rhs.parts.iter().map(|(k, o)| (*k, op(o))).collect(), constant: rhs.constant },
            },
            LenFormula::And(ps) => LenFormula::And(ps.iter().map(|p| p.subst_var(v, c)).collect()),
            LenFormula::Or(ps) => LenFormula::Or(ps.iter().map(|p| p.subst_var(v, c)).collect()),
            LenFormula::Exists(vs, body) => {
                if vs.contains(&v) {
                    self.clone()
                } else {
                    LenFormula::Exists(vs.clone(), Box::new(body.subst_var(v, c)))
                }
            }
        }
    }

    /// Replaces the symbolic integer `k` by `value`, folding atoms that
    /// become closed.
    pub fn subst_sym(&self, k: SymId, value: u32) -> LenFormula {
        match self {
            LenFormula::True | LenFormula::False => self.clone(),
            LenFormula::Sym { sym, rel, value: v } if *sym == k => bool_formula(sym_rel_holds(value, *rel, *v)),
            LenFormula::Sym { .. } => self.clone(),
            LenFormula::SymLe(a, b) => match (*a == k, *b == k) {
                (true, true) => LenFormula::True,
                (true, false) => LenFormula::sym(*b, SymRel::Ge, value),
                (false, true) => LenFormula::sym(*a, SymRel::Le, value),
                (false, false) => self.clone(),
            },
            LenFormula::Len { lhs, rel, rhs } => LenFormula::Len {
                lhs: *lhs,
                rel: *rel,
                rhs: LenTerm {
                    parts: rhs
                        .parts
                        .iter()
                        .map(|(c, o)| match c {
                            Coef::Sym(s) if *s == k => (Coef::Const(value as u64), *o),
                            c => (*c, *o),
                        })
                        .collect(),
                    constant: rhs.constant,
                },
            },
            LenFormula::And(ps) => LenFormula::and(ps.iter().map(|p| p.subst_sym(k, value)).collect()),
            LenFormula::Or(ps) => LenFormula::or(ps.iter().map(|p| p.subst_sym(k, value)).collect()),
            LenFormula::Exists(vs, body) => LenFormula::exists(vs.clone(), body.subst_sym(k, value)),
        }
    }

    /// Copy with every bound variable renamed to a fresh one and the free
    /// variables renamed through `map`.
    pub(crate) fn rename(&self, map: &mut BTreeMap<LenVar, LenVar>, next: &mut u32) -> LenFormula {
        let var = |o: &Operand, map: &BTreeMap<LenVar, LenVar>| match o {
            Operand::Var(v) => Operand::Var(*map.get(v).unwrap_or(v)),
            o => *o,
        };
        match self {
            LenFormula::True | LenFormula::False | LenFormula::Sym { .. } | LenFormula::SymLe(..) => self.clone(),
            LenFormula::Len { lhs, rel, rhs } => LenFormula::Len {
                lhs: var(lhs, map),
                rel: *rel,
                rhs: LenTerm { parts: rhs.parts.iter().map(|(k, o)| (*k, var(o, map))).collect(), constant: rhs.constant },
            },
            LenFormula::And(ps) => LenFormula::And(ps.iter().map(|p| p.rename(map, next)).collect()),
            LenFormula::Or(ps) => LenFormula::Or(ps.iter().map(|p| p.rename(map, next)).collect()),
            LenFormula::Exists(vs, body) => {
                let saved: Vec<(LenVar, Option<LenVar>)> = vs.iter().map(|v| (*v, map.get(v).copied())).collect();
                let fresh: Vec<LenVar> = vs
                    .iter()
                    .map(|v| {
                        let w = LenVar(*next);
                        *next += 1;
                        map.insert(*v, w);
                        w
                    })
                    .collect();
                let body = body.rename(map, next);
                for (v, old) in saved {
                    match old {
                        Some(o) => map.insert(v, o),
                        None => map.remove(&v),
                    };
                }
                LenFormula::Exists(fresh, Box::new(body))
            }
        }
    }

    /// Over-approximate satisfiability under a partial assignment: false
    /// means no completion of `env` satisfies the formula.
    pub fn possibly_sat(&self, env: &SymEnv<'_>, cap: Option<u64>) -> bool {
        Prepared::new(self).possibly_sat(env, cap)
    }

    /// Values of the free variable `x` that possibly satisfy the formula.
    pub fn values_of(&self, x: LenVar, env: &SymEnv<'_>) -> LenSet {
        Prepared::new(self).values_of(x, env)
    }
}




fn bool_formula(b: bool) -> LenFormula {
    if b {
        LenFormula::True
    } else {
        LenFormula::False
    }
}

fn sym_rel_holds(a: u32, rel: SymRel, b: u32) -> bool {
    match rel {
        SymRel::Eq => a == b,
        SymRel::Ne => a != b,
        SymRel::Ge => a >= b,
        SymRel::Le => a <= b,
    }
}


/// A partial assignment to symbolic integers; unassigned ones range over
/// their domain.
#[derive(Debug, Clone)]
pub struct SymEnv<'a> {
    pub values: BTreeMap<SymId, u32>,
    pub domains: &'a BTreeMap<SymId, (u32, u32)>,
    pub default_domain: (u32, u32),
}

impl SymEnv<'_> {
    pub fn range(&self, k: SymId) -> (u64, u64) {
        match self.values.get(&k) {
            Some(&v) => (v as u64, v as u64),
            None => {
                let (lo, hi) = self.domains.get(&k).copied().unwrap_or(self.default_domain);
                (lo as u64, hi as u64)
            }
        }
    }

    pub(crate) fn possibly(&self, k: SymId, rel: SymRel, value: u32) -> bool {
        let (lo, hi) = self.range(k);
        let v = value as u64;
        match rel {
            SymRel::Eq => lo <= v && v <= hi,
            SymRel::Ne => !(lo == v && hi == v),
            SymRel::Ge => hi >= v,
            SymRel::Le => lo <= v,
        }
    }
}

impl fmt::Display for Operand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operand::Var(v) => write!(f, "{v}"),
            Operand::Const(c) => write!(f, "{c}"),
        }
    }
}

impl fmt::Display for LenTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (coef, op) in &self.parts {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match coef {
                Coef::Const(1) => write!(f, "{op}")?,
                Coef::Const(c) => write!(f, "{op}*{c}")?,
                Coef::Sym(k) => write!(f, "{op}*{k}")?,
            }
        }
        if first || self.constant != 0 {
            if !first {
                write!(f, " + ")?;
            }
            write!(f, "{}", self.constant)?;
        }
        Ok(())
    }
}

impl fmt::Display for LenFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |f: &mut fmt::Formatter<'_>, ps: &[LenFormula], sep: &str| -> fmt::Result {
            write!(f, "(")?;
            for (i, p) in ps.iter().enumerate() {
                if i > 0 {
                    write!(f, " {sep} ")?;
                }
                write!(f, "{p}")?;
            }
            write!(f, ")")
        };
        match self {
            LenFormula::True => write!(f, "true"),
            LenFormula::False => write!(f, "false"),
            LenFormula::And(ps) => join(f, ps, "&&"),
            LenFormula::Or(ps) => join(f, ps, "||"),
            LenFormula::Exists(vs, body) => {
                write!(f, "exists ")?;
                for (i, v) in vs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{v}")?;
                }
                write!(f, ". {body}")
            }
            LenFormula::Len { lhs, rel, rhs } => {
                let r = match rel {
                    Rel::Eq => "=",
                    Rel::Ge => ">=",
                    Rel::Le => "<=",
                };
                write!(f, "{lhs} {r} {rhs}")
            }
            LenFormula::Sym { sym, rel, value } => {
                let r = match rel {
                    SymRel::Eq => "=",
                    SymRel::Ne => "!=",
                    SymRel::Ge => ">=",
                    SymRel::Le => "<=",
                };
                write!(f, "{sym} {r} {value}")
            }
            LenFormula::SymLe(a, b) => write!(f, "{a} <= {b}"),
        }
    }
}
