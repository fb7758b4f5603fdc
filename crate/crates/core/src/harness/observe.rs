use std::sync::Arc;

use num_integer::Integer;

use super::{ExperimentConfig, Filter, Outcome, Statistic};
use crate::curvemodel::{local_normalization_count, SuperellipticModel};
use crate::ff::{FieldElement as Fe, FieldSpec};
use crate::polyring::{kernel, MultiplicityEngine, Poly};
use crate::theorydist::Variant;

/// What a scan does with one polynomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Observation {
    /// Divisible by an n-th power.
    NotPowerFree,
    /// Power-free but outside the configured subset.
    Filtered,
    Admitted {
        outcome: Outcome,
        /// `y^m - f` factors over the algebraic closure.
        geometrically_reducible: bool,
    },
}

/// Classifies polynomials and computes the configured statistic from
/// their per-x counts.
pub struct SiteObserver {
    field: Arc<FieldSpec>,
    engine: MultiplicityEngine,
    m: u32,
    n: u32,
    variant: Variant,
    statistic: Statistic,
    filter: Filter,
}

impl SiteObserver {
    pub fn new(field: Arc<FieldSpec>, config: &ExperimentConfig) -> SiteObserver {
        SiteObserver {
            engine: MultiplicityEngine::new(field.clone()),
            field,
            m: config.m,
            n: config.n,
            variant: config.variant,
            statistic: config.statistic,
            filter: config.filter,
        }
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    /// `coeffs` is low-to-high with a nonzero leading term and degree >= 1.
    pub fn observe(&self, coeffs: &[Fe]) -> Observation {
        let (max_mult, common) = self.engine.profile(coeffs);
        if max_mult >= self.n {
            return Observation::NotPowerFree;
        }
        let geometrically_reducible = common.gcd(&self.m) != 1;
        let keep = match self.filter {
            Filter::All => true,
            Filter::GeometricallyIrreducible => !geometrically_reducible,
            // square-free f always gives an irreducible curve
            Filter::Irreducible => max_mult <= 1 || self.irreducible_over_fq(coeffs),
        };
        if !keep {
            return Observation::Filtered;
        }
        Observation::Admitted { outcome: self.outcome(coeffs), geometrically_reducible }
    }

    fn irreducible_over_fq(&self, coeffs: &[Fe]) -> bool {
        let f = Poly::new(self.field.clone(), coeffs.to_vec()).expect("coefficients lie in the field");
        SuperellipticModel::new(self.m, f)
            .and_then(|model| model.is_irreducible_over_fq())
            .unwrap_or(false)
    }

    /// Points over `x = x0`: affine solutions for the singular model, the
    /// local branch rule for the normalization.
    pub fn site_count(&self, coeffs: &[Fe], x0: Fe) -> u32 {
        let v = kernel::eval(&self.field, coeffs, x0);
        if !v.is_zero() {
            return self.field.root_count(v, self.m as u64) as u32;
        }
        match self.variant {
            Variant::Singular => 1,
            Variant::Normalization => {
                let (s, a) = kernel::valuation_and_unit(&self.field, coeffs, x0);
                local_normalization_count(&self.field, self.m, s, a)
            }
        }
    }

    pub fn outcome(&self, coeffs: &[Fe]) -> Outcome {
        let q = self.field.q();
        match self.statistic {
            Statistic::Total => {
                Outcome::Scalar((0..q).map(|x| self.site_count(coeffs, Fe(x)) as u64).sum())
            }
            Statistic::Joint => Outcome::Vector((0..q).map(|x| self.site_count(coeffs, Fe(x))).collect()),
            Statistic::Marginal { x } => Outcome::Scalar(self.site_count(coeffs, Fe(x)) as u64),
        }
    }
}
