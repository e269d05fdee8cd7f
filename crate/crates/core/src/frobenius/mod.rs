//! Frobenius-type basis of solutions: the parametric series `g_{c,j}`, their
//! specializations `y_{c,j,m}` and the checks run on them.

mod gcj;
mod order1;
mod solution;
mod verify;

pub use gcj::{solve_gcj, GcjChecks};
pub use order1::{apply_order1_param, solve_order1_param};
pub use solution::{apply_to_solution, phi_power, phi_step, specialize_solutions, SolutionObject};
pub use verify::{
    check_gcj_residual, check_solution, verify_independence, ExponentIndependence, GcjResidual, IndependenceReport,
    SolutionCheck, SolutionLabel,
};

use crate::error::Result;
use crate::factorize::{factor_reconstruct, factorize_traced, Factorization};
use crate::fields::{pow_int, Rational};
use crate::hahn::ParametricSeries;
use crate::newton::{analyze, frobenius_plan, FrobeniusPlan, NewtonData, PlanEntry};
use crate::operator::MahlerOperator;

type Op = MahlerOperator<Rational>;

#[derive(Clone, Debug)]
pub struct BasisOptions {
    /// Exponent ceiling below which the solutions are certified.
    pub ceiling: Rational,
    /// Number of terms kept in each `k ≤ -1` geometric sum.
    pub depth: usize,
    pub verify: bool,
    /// Largest admissible width of an uncertified gap; defaults to `p^{-depth/2}`.
    pub epsilon: Option<Rational>,
}

impl BasisOptions {
    pub fn new(ceiling: Rational, depth: usize) -> Self {
        BasisOptions {
            ceiling,
            depth,
            verify: true,
            epsilon: None,
        }
    }

    pub fn epsilon_for(&self, p: u32) -> Rational {
        self.epsilon
            .clone()
            .unwrap_or_else(|| pow_int(&Rational::from_integer(p.into()), -((self.depth / 2) as i64)))
    }
}

/// Everything computed for one pair `(c, j)`.
#[derive(Clone, Debug)]
pub struct GcjBlock {
    pub entry: PlanEntry,
    pub mu: Rational,
    pub g: ParametricSeries,
    pub checks: GcjChecks,
    pub solutions: Vec<SolutionObject>,
}

impl GcjBlock {
    pub fn labels(&self) -> impl Iterator<Item = SolutionLabel> + '_ {
        (0..self.solutions.len()).map(|m| SolutionLabel {
            c: self.entry.c.clone(),
            j: self.entry.j,
            m,
        })
    }
}

/// Set when some exponent is not rational: only the right factor built from
/// the rational exponents is solved.
#[derive(Clone, Debug)]
pub struct PartialBasis {
    /// First slope of `L` carrying a non-rational exponent.
    pub slope: Option<Rational>,
    /// Order of the right factor whose full basis was computed.
    pub solved_order: usize,
}

#[derive(Clone, Debug)]
pub struct VerificationReport {
    pub epsilon: Rational,
    pub gcj_structure: Vec<(Rational, usize, bool)>,
    pub gcj_residuals: Vec<GcjResidual>,
    pub solutions: Vec<SolutionCheck>,
    pub independence: IndependenceReport,
    pub expected_count: usize,
    pub count: usize,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.count == self.expected_count
            && self.gcj_structure.iter().all(|t| t.2)
            && self.gcj_residuals.iter().all(|r| r.ok)
            && self.solutions.iter().all(SolutionCheck::ok)
            && self.independence.passed()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let structure: Vec<_> = self
            .gcj_structure
            .iter()
            .map(|(c, j, ok)| serde_json::json!({ "c": c.to_string(), "j": j + 1, "ok": ok }))
            .collect();
        serde_json::json!({
            "epsilon": self.epsilon.to_string(),
            "gcj_structure": structure,
            "gcj_residuals": self.gcj_residuals.iter().map(GcjResidual::to_json).collect::<Vec<_>>(),
            "solutions": self.solutions.iter().map(SolutionCheck::to_json).collect::<Vec<_>>(),
            "independence": self.independence.to_json(),
            "expected_count": self.expected_count,
            "count": self.count,
            "passed": self.passed(),
        })
    }
}

#[derive(Clone, Debug)]
pub struct FrobeniusOutput {
    pub p: u32,
    pub order: usize,
    pub ceiling: Rational,
    pub depth: usize,
    /// Newton data of the input operator.
    pub newton: NewtonData,
    /// Plan of the operator actually solved (the input, or its rational
    /// right factor for a partial basis).
    pub plan: FrobeniusPlan,
    pub factorization: Factorization,
    pub blocks: Vec<GcjBlock>,
    pub partial: Option<PartialBasis>,
    pub verification: Option<VerificationReport>,
}

impl FrobeniusOutput {
    pub fn solution_count(&self) -> usize {
        self.blocks.iter().map(|b| b.solutions.len()).sum()
    }

    pub fn labeled_solutions(&self) -> Vec<(SolutionLabel, Rational, SolutionObject)> {
        self.blocks
            .iter()
            .flat_map(|b| b.labels().zip(&b.solutions).map(|(l, y)| (l, b.mu.clone(), y.clone())))
            .collect()
    }
}

/// Extra room given to the factorization so that the `h`'s and `a^{-1}`
/// stay certified through the gauges of the triangular solve.
fn factorization_ceiling(ceiling: &Rational, plan: &FrobeniusPlan) -> Rational {
    let zero = Rational::from_integer(0.into());
    let pm1 = Rational::from_integer((plan.p - 1).into());
    let top = plan
        .nus
        .iter()
        .max()
        .cloned()
        .unwrap_or_else(|| zero.clone())
        .max(zero.clone());
    ceiling + top / pm1 + plan.val_a0.clone().max(zero) + Rational::from_integer(1.into())
}

/// Runs plan, factorization, the triangular solves and the specializations.
pub fn frobenius_basis(l: &Op, opts: &BasisOptions) -> Result<FrobeniusOutput> {
    let p = l.radix();
    let newton = analyze(l)?;
    let full_plan = frobenius_plan(l, &newton)?;
    let fceil = factorization_ceiling(&opts.ceiling, &full_plan);
    let trace = factorize_traced(l, &fceil)?;

    let (solved, plan, partial) = if trace.is_complete() {
        (l.clone(), full_plan, None)
    } else {
        let right = factor_reconstruct(&trace.factorization, &fceil)?;
        let data = analyze(&right)?;
        let plan = frobenius_plan(&right, &data)?;
        let slope = newton.slopes.iter().find(|s| !s.splits()).map(|s| s.slope.mu.clone());
        let partial = PartialBasis {
            slope,
            solved_order: right.order(),
        };
        (right, plan, Some(partial))
    };
    let factorization = trace.factorization;

    let mut blocks = Vec::with_capacity(plan.entries.len());
    for entry in &plan.entries {
        let (g, checks) = solve_gcj(&solved, &plan, &factorization, entry, &opts.ceiling, opts.depth)?;
        let solutions = specialize_solutions(p, &g, &entry.c, entry.s, entry.m)?;
        blocks.push(GcjBlock {
            entry: entry.clone(),
            mu: plan.mus[entry.j].clone(),
            g,
            checks,
            solutions,
        });
    }

    let mut out = FrobeniusOutput {
        p,
        order: l.order(),
        ceiling: opts.ceiling.clone(),
        depth: opts.depth,
        newton,
        plan,
        factorization,
        blocks,
        partial,
        verification: None,
    };
    if opts.verify {
        out.verification = Some(verify_basis(l, &solved, &out, opts));
    }
    Ok(out)
}

/// Full verification report. Residuals of the solutions are taken against
/// the input operator `l`; the `g_{c,j}` residuals against the operator that
/// was actually solved.
pub fn verify_basis(l: &Op, solved: &Op, out: &FrobeniusOutput, opts: &BasisOptions) -> VerificationReport {
    let epsilon = opts.epsilon_for(out.p);
    let gcj_structure = out
        .blocks
        .iter()
        .map(|b| (b.entry.c.clone(), b.entry.j, b.checks.all_ok()))
        .collect();
    let gcj_residuals = out
        .blocks
        .iter()
        .map(|b| check_gcj_residual(solved, out.p, &out.plan.val_a0, b, &out.ceiling))
        .collect();
    let labeled = out.labeled_solutions();
    let solutions = labeled
        .iter()
        .map(|(label, _, y)| check_solution(l, label.clone(), y, &out.ceiling, &epsilon))
        .collect();
    let independence = verify_independence(&labeled);
    let expected_count = out.partial.as_ref().map_or(out.order, |pb| pb.solved_order);
    VerificationReport {
        epsilon,
        gcj_structure,
        gcj_residuals,
        solutions,
        independence,
        expected_count,
        count: labeled.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{q, qi};
    use crate::hahn::QSeries;

    fn s(terms: &[(Rational, i64)]) -> QSeries {
        QSeries::exact(terms.iter().map(|(e, c)| (e.clone(), qi(*c))))
    }

    fn worked_example(p: u32, nu: i64, ceiling: &Rational) -> Op {
        let h = s(&[(qi(0), 1), (q(-nu, p as i64 - 1), 1)]);
        let left = Op::new(p, vec![s(&[(qi(nu), -1)]), QSeries::one()]).unwrap();
        let right = Op::new(p, vec![s(&[(qi(0), -1)]), QSeries::one()]).unwrap();
        left.mul(&Op::multiplication(p, h.invert(ceiling).unwrap()))
            .unwrap()
            .mul(&right)
            .unwrap()
    }

    #[test]
    fn worked_example_basis() {
        for (p, nu) in [(2u32, -2i64), (3, -3)] {
            let l = worked_example(p, nu, &qi(20));
            let out = frobenius_basis(&l, &BasisOptions::new(qi(8), 8)).unwrap();
            let v = out.verification.as_ref().unwrap();
            assert!(v.passed());
        }
    }
}
