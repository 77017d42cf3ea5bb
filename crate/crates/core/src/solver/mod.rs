//! Length constraints for symbolic regexes and inference of their integer
//! constants.

mod encode;
mod formula;
mod lenset;
mod prepared;

use std::collections::{BTreeMap, VecDeque};
use std::sync::Arc;
use std::time::Instant;

pub use encode::encode;
pub use formula::{Coef, LenFormula, LenTerm, LenVar, Operand, Rel, SymEnv, SymRel};
pub use lenset::LenSet;

use prepared::Prepared;

use crate::regex::Regex;
use crate::sketch::{IntSlot, SymId};
use crate::synthesis::{Checker, Examples, Node, PartialRegex};

/// Values chosen for symbolic integers.
pub type Assignment = BTreeMap<SymId, u32>;

/// Domains of the symbolic integers a solution must assign.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bounds {
    /// Explicit domains; symbols only mentioned in the formula get `[1, max]`.
    pub domains: BTreeMap<SymId, (u32, u32)>,
    pub max: u32,
    /// Upper bound for existential length variables.
    pub len_cap: Option<u64>,
}

impl Bounds {
    pub fn new(max: u32) -> Bounds {
        Bounds { domains: BTreeMap::new(), max, len_cap: None }
    }

    pub fn with_syms<I: IntoIterator<Item = SymId>>(syms: I, max: u32) -> Bounds {
        Bounds { domains: syms.into_iter().map(|k| (k, (1, max))).collect(), max, len_cap: None }
    }
}

/// `phi[len(s)/x]` conjoined over every positive example.
pub fn instantiate_positives(phi: &LenFormula, x: LenVar, ex: &Examples) -> LenFormula {
    LenFormula::and(ex.positives().iter().map(|s| phi.subst_var(x, s.len() as u64)).collect())
}

/// Smallest model in lexicographic order of symbol id then value.
pub fn solve(phi: &LenFormula, bounds: &Bounds) -> Option<Assignment> {
    let mut syms: Vec<SymId> = bounds.domains.keys().copied().collect();
    syms.extend(phi.syms());
    syms.sort();
    syms.dedup();
    let mut env = SymEnv { values: BTreeMap::new(), domains: &bounds.domains, default_domain: (1, bounds.max) };
    let phi = Prepared::new(phi);
    if search(&|env: &SymEnv<'_>| phi.possibly_sat(env, bounds.len_cap), &syms, &[], &mut env) {
        Some(env.values)
    } else {
        None
    }
}

/// `blocked` lists excluded values, the same as conjoining `k != v` for
/// each pair but checked before the formula is evaluated.
fn search(feasible: &dyn Fn(&SymEnv<'_>) -> bool, syms: &[SymId], blocked: &[(SymId, u32)], env: &mut SymEnv<'_>) -> bool {
    if !feasible(env) {
        return false;
    }
    let Some((&k, rest)) = syms.split_first() else {
        return true;
    };
    let (lo, hi) = env.range(k);
    for v in lo as u32..=hi as u32 {
        if blocked.contains(&(k, v)) {
            continue;
        }
        env.values.insert(k, v);
        if search(feasible, rest, blocked, env) {
            return true;
        }
    }
    env.values.remove(&k);
    false
}

/// A length formula instantiated with the positive lengths, with some
/// symbols substituted and some values blocked. The instantiation holds iff
/// every length is a possible value of `x`, which needs one evaluation
/// instead of one per example.
#[derive(Clone)]
struct Constraint {
    phi: Arc<Prepared>,
    x: LenVar,
    lengths: Arc<Vec<u64>>,
    fixed: Assignment,
    blocked: Vec<(SymId, u32)>,
}

impl Constraint {
    fn model(&self, syms: &[SymId], max: u32) -> Option<Assignment> {
        let mut syms = syms.to_vec();
        syms.sort();
        let domains = BTreeMap::new();
        let mut env = SymEnv { values: self.fixed.clone(), domains: &domains, default_domain: (1, max) };
        let feasible = |env: &SymEnv<'_>| {
            let set = self.phi.values_of(self.x, env);
            self.lengths.iter().all(|&l| set.contains(l))
        };
        if search(&feasible, &syms, &self.blocked, &mut env) {
            Some(env.values)
        } else {
            None
        }
    }

    fn block(&self, k: SymId, v: u32) -> Constraint {
        let mut c = self.clone();
        c.blocked.push((k, v));
        c
    }

    fn fix(&self, k: SymId, v: u32) -> Constraint {
        let mut c = self.clone();
        c.fixed.insert(k, v);
        c.blocked.retain(|&(s, _)| s != k);
        c
    }
}

#[derive(Debug, Clone)]
pub struct InferOptions {
    pub max: u32,
    /// Drop partial assignments whose approximations contradict the examples.
    pub prune: bool,
    pub deadline: Option<Instant>,
}

impl InferOptions {
    pub fn new(max: u32) -> InferOptions {
        InferOptions { max, prune: true, deadline: None }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Inferred {
    /// Concrete candidates in discovery order; not yet checked against the examples.
    pub regexes: Vec<Regex>,
    /// False if the deadline cut the search short.
    pub complete: bool,
    pub solver_calls: usize,
}

/// Concrete instantiations of a symbolic regex that agree with the length
/// constraints of the positive examples.
pub fn infer_constants(p: &PartialRegex, ex: &Examples, opts: &InferOptions) -> Inferred {
    infer_constants_with(p, ex, &mut Checker::new(ex), opts)
}

/// First symbolic integer in preorder, preferring lower bounds of ranges
/// over upper bounds: once a lower bound is known the range has a useful
/// under-approximation.
fn choose_sym(root: &Node) -> Option<SymId> {
    fn walk(n: &Node, lower: &mut Option<SymId>, upper: &mut Option<SymId>) {
        match n {
            Node::Class(_) | Node::Epsilon | Node::EmptySet | Node::Open(_) => {}
            Node::Unary(_, a) => walk(a, lower, upper),
            Node::Binary(_, a, b) => {
                walk(a, lower, upper);
                walk(b, lower, upper);
            }
            Node::Repeat(a, rep) => {
                let slots = rep.ints();
                for (i, slot) in slots.iter().enumerate() {
                    if let IntSlot::Sym(k) = slot {
                        let dst = if i == 1 { &mut *upper } else { &mut *lower };
                        dst.get_or_insert(*k);
                    }
                }
                walk(a, lower, upper);
            }
        }
    }
    let (mut lower, mut upper) = (None, None);
    walk(root, &mut lower, &mut upper);
    lower.or(upper)
}

pub fn infer_constants_with(p: &PartialRegex, ex: &Examples, checker: &mut Checker, opts: &InferOptions) -> Inferred {
    let (phi, x) = encode(p, opts.max);
    let mut lengths: Vec<u64> = ex.positives().iter().map(|s| s.len() as u64).collect();
    lengths.sort_unstable();
    lengths.dedup();
    let psi = Constraint {
        phi: Arc::new(Prepared::new(&phi)),
        x,
        lengths: Arc::new(lengths),
        fixed: Assignment::new(),
        blocked: Vec::new(),
    };
    let mut out = Inferred { complete: true, ..Default::default() };
    let mut work = VecDeque::from([(p.clone(), psi)]);
    while let Some((p, phi)) = work.pop_front() {
        if opts.deadline.is_some_and(|d| Instant::now() >= d) {
            out.complete = false;
            break;
        }
        let syms = p.syms();
        let Some(k) = choose_sym(&p.root) else {
            continue;
        };
        out.solver_calls += 1;
        let Some(model) = phi.model(&syms, opts.max) else {
            continue;
        };
        let v = model[&k];
        let next = p.assign(k, v);
        work.push_back((p, phi.block(k, v)));
        if next.is_concrete() {
            if next.root.ranges_valid() {
                out.regexes.push(next.to_regex().expect("concrete"));
            }
        } else if !opts.prune || !checker.infeasible(&next) {
            work.push_back((next, phi.fix(k, v)));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_models() {
        let k = SymId(0);
        let both = LenFormula::and(vec![LenFormula::sym(k, SymRel::Eq, 1), LenFormula::sym(k, SymRel::Eq, 2)]);
        assert_eq!(solve(&both, &Bounds::new(5)), None);
        let model = solve(&LenFormula::True, &Bounds::with_syms([k], 3)).unwrap();
        assert_eq!(model, BTreeMap::from([(k, 1)]));
    }

    #[test]
    fn blocking_clauses_advance() {
        let k = SymId(0);
        let phi = LenFormula::and(vec![LenFormula::sym(k, SymRel::Ne, 1), LenFormula::sym(k, SymRel::Ne, 2)]);
        assert_eq!(solve(&phi, &Bounds::with_syms([k], 4)).unwrap()[&k], 3);
    }
}
