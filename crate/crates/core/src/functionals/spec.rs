//! Serializable descriptions of test functionals.
//!
//! The functions `χ`, `ψ`, `φ` come from small parametric families that
//! satisfy the structural constraints by construction: every `χ` vanishes
//! at 0 and is bounded, every `ψ` vanishes when one of its arguments is 0,
//! every `φ` is bounded.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TfKind {
    /// `χ(‖ν‖)`
    TF1,
    /// `χ(‖ν‖) ∫ ψ(‖μ‖) dν̄^{⊗m}`
    TF2,
    /// `χ(‖ν‖) ∫ ψ(‖μ‖) ∫ φ∘R dμ̄^{⊗n} dν̄^{⊗m}`
    TF3,
    /// `∫ ψ(‖μ‖) ∫ φ∘R dμ̄^{⊗n} dν^{⊗m}`, with the unnormalized `ν`
    TF4,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum ChiSpec {
    /// `min(x, C) + offset`; only `offset = 0` is admissible.
    Clip {
        #[serde(rename = "C")]
        c: f64,
        #[serde(default)]
        offset: f64,
    },
    /// `C (1 - e^{-x/C})`
    Saturating {
        #[serde(rename = "C")]
        c: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum PsiSpec {
    /// `Π min(a_i, C) · C^{-(m-1)}`
    ClipProduct {
        #[serde(rename = "C")]
        c: f64,
    },
    /// `Π (1 - e^{-λ a_i})`
    ExpProduct { lambda: f64 },
}

/// One monomial `coef · Π R_{ij}^{power}` of a clipped polynomial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyTerm {
    pub coef: f64,
    /// `[i, j, power]` triples, 0-based indices into the flattened sample.
    pub factors: Vec<(usize, usize, u32)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum PhiSpec {
    /// `min(C, min_{i≠j} R_ij)`, and 0 for a single sample.
    ClipMinEntry {
        #[serde(rename = "C")]
        c: f64,
    },
    /// `min(R_ij, C)`
    ClipEntry {
        i: usize,
        j: usize,
        #[serde(rename = "C")]
        c: f64,
    },
    /// A polynomial in the entries of `R`, clamped to `[-C, C]`.
    ClipPolynomial {
        terms: Vec<PolyTerm>,
        #[serde(rename = "C")]
        c: f64,
    },
    /// `exp(-Σ λ_ij R_ij)` with `λ ≥ 0`.
    ExpLinear {
        lambda: Vec<Vec<f64>>,
    },
    Constant {
        value: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TestFunctionalSpec {
    pub kind: TfKind,
    #[serde(default = "one")]
    pub m: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub n: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chi: Option<ChiSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi: Option<PsiSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<PhiSpec>,
}

fn one() -> usize {
    1
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidSpec(format!("{name} must be positive and finite, got {v}")))
    }
}

impl ChiSpec {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            ChiSpec::Clip { c, offset } => x.min(c) + offset,
            ChiSpec::Saturating { c } => c * -(-x / c).exp_m1(),
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            ChiSpec::Clip { c, offset } => {
                positive("chi.C", c)?;
                if offset != 0.0 {
                    return Err(Error::InvalidSpec(format!("chi(0) must be 0, clip offset is {offset}")));
                }
                Ok(())
            }
            ChiSpec::Saturating { c } => positive("chi.C", c),
        }
    }
}

impl PsiSpec {
    pub fn eval(&self, masses: &[f64]) -> f64 {
        match *self {
            PsiSpec::ClipProduct { c } => {
                let p: f64 = masses.iter().map(|a| a.min(c)).product();
                p / c.powi(masses.len() as i32 - 1)
            }
            PsiSpec::ExpProduct { lambda } => masses.iter().map(|a| -(-lambda * a).exp_m1()).product(),
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            PsiSpec::ClipProduct { c } => positive("psi.C", c),
            PsiSpec::ExpProduct { lambda } => positive("psi.lambda", lambda),
        }
    }
}

impl PhiSpec {
    /// Evaluates on the `k x k` row-major distance matrix `r`.
    pub fn eval(&self, r: &[f64], k: usize) -> f64 {
        match self {
            PhiSpec::ClipMinEntry { c } => {
                let mut m = f64::INFINITY;
                for i in 0..k {
                    for j in (i + 1)..k {
                        m = m.min(r[i * k + j]);
                    }
                }
                if k < 2 {
                    0.0
                } else {
                    m.min(*c)
                }
            }
            PhiSpec::ClipEntry { i, j, c } => r[i * k + j].min(*c),
            PhiSpec::ClipPolynomial { terms, c } => {
                let v: f64 = terms
                    .iter()
                    .map(|t| t.coef * t.factors.iter().map(|&(i, j, p)| r[i * k + j].powi(p as i32)).product::<f64>())
                    .sum();
                v.clamp(-c, *c)
            }
            PhiSpec::ExpLinear { lambda } => {
                let mut s = 0.0;
                for (i, row) in lambda.iter().enumerate() {
                    for (j, l) in row.iter().enumerate() {
                        s += l * r[i * k + j];
                    }
                }
                (-s).exp()
            }
            PhiSpec::Constant { value } => *value,
        }
    }

    fn validate(&self, k: usize) -> Result<()> {
        let index = |i: usize, j: usize| {
            if i < k && j < k {
                Ok(())
            } else {
                Err(Error::InvalidSpec(format!("phi entry ({i}, {j}) outside a {k}x{k} matrix")))
            }
        };
        match self {
            PhiSpec::ClipMinEntry { c } => positive("phi.C", *c),
            PhiSpec::ClipEntry { i, j, c } => {
                index(*i, *j)?;
                positive("phi.C", *c)
            }
            PhiSpec::ClipPolynomial { terms, c } => {
                positive("phi.C", *c)?;
                for t in terms {
                    if !t.coef.is_finite() {
                        return Err(Error::InvalidSpec(format!("polynomial coefficient {}", t.coef)));
                    }
                    for &(i, j, _) in &t.factors {
                        index(i, j)?;
                    }
                }
                Ok(())
            }
            PhiSpec::ExpLinear { lambda } => {
                if lambda.len() != k || lambda.iter().any(|r| r.len() != k) {
                    return Err(Error::InvalidSpec(format!("phi.lambda must be {k}x{k}")));
                }
                if lambda.iter().flatten().any(|l| !(l.is_finite() && *l >= 0.0)) {
                    return Err(Error::InvalidSpec("phi.lambda entries must be finite and nonnegative".into()));
                }
                Ok(())
            }
            PhiSpec::Constant { value } => {
                if value.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidSpec(format!("phi constant {value}")))
                }
            }
        }
    }
}

impl TestFunctionalSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    /// Total number of sampled points `|n|`.
    pub fn sample_size(&self) -> usize {
        self.n.iter().sum()
    }

    pub fn validate(&self) -> Result<()> {
        let needs_chi = matches!(self.kind, TfKind::TF1 | TfKind::TF2 | TfKind::TF3);
        let needs_psi = self.kind != TfKind::TF1;
        let needs_phi = matches!(self.kind, TfKind::TF3 | TfKind::TF4);
        let missing = |name: &str| Error::InvalidSpec(format!("{:?} requires {name}", self.kind));

        match (&self.chi, needs_chi) {
            (Some(chi), true) => chi.validate()?,
            (None, true) => return Err(missing("chi")),
            (Some(_), false) => return Err(Error::InvalidSpec(format!("{:?} takes no chi", self.kind))),
            (None, false) => {}
        }
        if !needs_psi {
            return Ok(());
        }
        if self.m == 0 {
            return Err(Error::InvalidSpec("m must be positive".into()));
        }
        self.psi.as_ref().ok_or_else(|| missing("psi"))?.validate()?;
        if !needs_phi {
            return Ok(());
        }
        if self.n.len() != self.m || self.n.contains(&0) {
            return Err(Error::InvalidSpec(format!("n must hold {} positive entries, got {:?}", self.m, self.n)));
        }
        self.phi.as_ref().ok_or_else(|| missing("phi"))?.validate(self.sample_size())
    }
}

/// A fixed library of twelve specs covering all four kinds and every
/// function family.
pub fn builtin_library() -> Vec<TestFunctionalSpec> {
    let clip = |c| Some(ChiSpec::Clip { c, offset: 0.0 });
    let spec = |kind, m, n: &[usize], chi, psi, phi| TestFunctionalSpec { kind, m, n: n.to_vec(), chi, psi, phi };
    let cp = |c| Some(PsiSpec::ClipProduct { c });
    vec![
        spec(TfKind::TF1, 1, &[], clip(10.0), None, None),
        spec(TfKind::TF1, 1, &[], Some(ChiSpec::Saturating { c: 2.0 }), None, None),
        spec(TfKind::TF2, 1, &[], clip(10.0), cp(10.0), None),
        spec(TfKind::TF2, 2, &[], clip(10.0), Some(PsiSpec::ExpProduct { lambda: 1.0 }), None),
        spec(TfKind::TF3, 1, &[2], clip(10.0), cp(10.0), Some(PhiSpec::ClipMinEntry { c: 10.0 })),
        spec(TfKind::TF3, 1, &[2], clip(10.0), cp(10.0), Some(PhiSpec::ClipEntry { i: 0, j: 1, c: 1.5 })),
        spec(TfKind::TF3, 1, &[3], clip(10.0), cp(10.0), Some(PhiSpec::ClipMinEntry { c: 10.0 })),
        spec(
            TfKind::TF3,
            2,
            &[1, 1],
            clip(10.0),
            cp(10.0),
            Some(PhiSpec::ExpLinear { lambda: vec![vec![0.0, 1.0], vec![0.0, 0.0]] }),
        ),
        spec(
            TfKind::TF3,
            1,
            &[2],
            clip(10.0),
            Some(PsiSpec::ExpProduct { lambda: 0.5 }),
            Some(PhiSpec::ClipPolynomial { terms: vec![PolyTerm { coef: 1.0, factors: vec![(0, 1, 2)] }], c: 10.0 }),
        ),
        spec(TfKind::TF3, 2, &[2, 1], clip(10.0), cp(10.0), Some(PhiSpec::ClipEntry { i: 0, j: 2, c: 10.0 })),
        spec(TfKind::TF4, 1, &[2], None, cp(10.0), Some(PhiSpec::ClipMinEntry { c: 10.0 })),
        spec(TfKind::TF4, 1, &[1], None, cp(10.0), Some(PhiSpec::Constant { value: 1.0 })),
    ]
}
