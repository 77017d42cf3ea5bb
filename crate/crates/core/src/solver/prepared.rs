use super::formula::{Coef, LenFormula, LenTerm, LenVar, Operand, Rel, SymEnv, SymRel};
use super::lenset::LenSet;
use crate::sketch::SymId;

/// A formula with the conjuncts of every existential split into those that
/// define a single bound variable and the rest, so evaluation does not have
/// to recompute free variables.
#[derive(Debug, Clone)]
pub(crate) enum Prepared {
    True,
    False,
    And(Vec<Prepared>),
    Or(Vec<Prepared>),
    Exists { bound: Vec<LenVar>, defs: Vec<Vec<Prepared>>, rest: Vec<Prepared> },
    Len { lhs: Operand, rel: Rel, rhs: LenTerm },
    Sym { sym: SymId, rel: SymRel, value: u32 },
    SymLe(SymId, SymId),
}

fn flatten<'a>(f: &'a LenFormula, out: &mut Vec<&'a LenFormula>) {
    match f {
        LenFormula::And(ps) => ps.iter().for_each(|p| flatten(p, out)),
        f => out.push(f),
    }
}

fn lookup(scope: &[(LenVar, LenSet)], v: LenVar) -> Option<&LenSet> {
    scope.iter().rev().find(|(w, _)| *w == v).map(|(_, s)| s)
}

fn truth(b: bool) -> LenSet {
    if b {
        LenSet::all()
    } else {
        LenSet::empty()
    }
}

fn term_set(t: &LenTerm, scope: &[(LenVar, LenSet)], env: &SymEnv<'_>) -> LenSet {
    let mut acc = LenSet::point(t.constant);
    for (coef, op) in &t.parts {
        let base = match op {
            Operand::Const(c) => LenSet::point(*c),
            Operand::Var(v) => lookup(scope, *v).cloned().unwrap_or_else(LenSet::all),
        };
        let (lo, hi) = match coef {
            Coef::Const(c) => (*c, *c),
            Coef::Sym(k) => env.range(*k),
        };
        acc = acc.add(&base.scale(lo, hi));
        if acc.is_empty() {
            break;
        }
    }
    acc
}

impl Prepared {
    pub fn new(f: &LenFormula) -> Prepared {
        match f {
            LenFormula::True => Prepared::True,
            LenFormula::False => Prepared::False,
            LenFormula::And(ps) => Prepared::And(ps.iter().map(Prepared::new).collect()),
            LenFormula::Or(ps) => Prepared::Or(ps.iter().map(Prepared::new).collect()),
            LenFormula::Len { lhs, rel, rhs } => Prepared::Len { lhs: *lhs, rel: *rel, rhs: rhs.clone() },
            LenFormula::Sym { sym, rel, value } => Prepared::Sym { sym: *sym, rel: *rel, value: *value },
            LenFormula::SymLe(a, b) => Prepared::SymLe(*a, *b),
            LenFormula::Exists(vs, body) => {
                let mut conjuncts = Vec::new();
                flatten(body, &mut conjuncts);
                let fvs: Vec<_> = conjuncts.iter().map(|c| c.free_vars()).collect();
                let mut used = vec![false; conjuncts.len()];
                let mut defs = Vec::with_capacity(vs.len());
                for w in vs {
                    let mut mine = Vec::new();
                    for (i, c) in conjuncts.iter().enumerate() {
                        if !used[i] && fvs[i].len() == 1 && fvs[i].contains(w) {
                            used[i] = true;
                            mine.push(Prepared::new(c));
                        }
                    }
                    defs.push(mine);
                }
                let rest = conjuncts.iter().zip(&used).filter(|(_, u)| !**u).map(|(c, _)| Prepared::new(c)).collect();
                Prepared::Exists { bound: vs.clone(), defs, rest }
            }
        }
    }

    pub fn possibly_sat(&self, env: &SymEnv<'_>, cap: Option<u64>) -> bool {
        !self.lengths(None, &mut Vec::new(), env, cap).is_empty()
    }

    pub fn values_of(&self, x: LenVar, env: &SymEnv<'_>) -> LenSet {
        self.lengths(Some(x), &mut Vec::new(), env, None)
    }

    /// Values of `target` that possibly satisfy the formula, given the sets
    /// of the enclosing bound variables; all or nothing when `target` is
    /// absent.
    fn lengths(
        &self,
        target: Option<LenVar>,
        scope: &mut Vec<(LenVar, LenSet)>,
        env: &SymEnv<'_>,
        cap: Option<u64>,
    ) -> LenSet {
        match self {
            Prepared::True => LenSet::all(),
            Prepared::False => LenSet::empty(),
            Prepared::Sym { sym, rel, value } => truth(env.possibly(*sym, *rel, *value)),
            Prepared::SymLe(a, b) => {
                let (alo, _) = env.range(*a);
                let (_, bhi) = env.range(*b);
                truth(alo <= bhi)
            }
            Prepared::Len { lhs, rel, rhs } => {
                let r = term_set(rhs, scope, env);
                let s = match rel {
                    Rel::Eq => r,
                    Rel::Ge => r.min().map_or(LenSet::empty(), LenSet::at_least),
                    Rel::Le => match r.sup() {
                        None => LenSet::empty(),
                        Some(None) => LenSet::all(),
                        Some(Some(h)) => LenSet::at_most(h),
                    },
                };
                match lhs {
                    Operand::Const(c) => truth(s.contains(*c)),
                    Operand::Var(u) if Some(*u) == target && lookup(scope, *u).is_none() => s,
                    Operand::Var(u) => match lookup(scope, *u) {
                        Some(set) => truth(!set.intersect(&s).is_empty()),
                        None => truth(!s.is_empty()),
                    },
                }
            }
            Prepared::And(ps) => {
                let mut acc = LenSet::all();
                for p in ps {
                    acc = acc.intersect(&p.lengths(target, scope, env, cap));
                    if acc.is_empty() {
                        break;
                    }
                }
                acc
            }
            Prepared::Or(ps) => {
                let mut acc = LenSet::empty();
                for p in ps {
                    acc = acc.union(&p.lengths(target, scope, env, cap));
                }
                acc
            }
            Prepared::Exists { bound, defs, rest } => {
                let depth = scope.len();
                let mut dead = false;
                for (w, mine) in bound.iter().zip(defs) {
                    let mut set = match cap {
                        Some(c) => LenSet::at_most(c),
                        None => LenSet::all(),
                    };
                    for c in mine {
                        set = set.intersect(&c.lengths(Some(*w), scope, env, cap));
                        if set.is_empty() {
                            break;
                        }
                    }
                    if set.is_empty() {
                        dead = true;
                        break;
                    }
                    scope.push((*w, set));
                }
                let target = target.filter(|t| !bound.contains(t));
                let mut acc = if dead { LenSet::empty() } else { LenSet::all() };
                if !dead {
                    for c in rest {
                        acc = acc.intersect(&c.lengths(target, scope, env, cap));
                        if acc.is_empty() {
                            break;
                        }
                    }
                }
                scope.truncate(depth);
                acc
            }
        }
    }
}
