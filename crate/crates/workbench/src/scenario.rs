//! Scenario files: a coefficient ring, an algebra `R`, modules `B` and `C`,
//! hints, strategies, window, seed and testset. Integers are decimal strings
//! so that arbitrary-precision data survives the round trip.

use std::collections::BTreeMap;
use std::fmt;
use std::marker::PhantomData;
use std::str::FromStr;
use std::sync::Arc;

use recollement_core::dg::{direct_sum, shift, Action, DgAlgebra, DgModule};
use recollement_core::kernel::{DegreeWindow, Domain, GradedModule, Matrix, PrimeSet, Scalar, Vector};
use recollement_core::recollement::builtins::{projective, residue, simple};
use recollement_core::recollement::conditions::{DescentHint, DEFAULT_BUILD_DEPTH};
use recollement_core::recollement::data::free_module;
use recollement_core::recollement::{Hints, JointStrategy, TestObject};
use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::WorkbenchError;

pub const SCHEMA: u32 = 1;

/// An integer written as a decimal string.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Dec<T>(pub T);

impl<T: fmt::Display> Serialize for Dec<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(&self.0)
    }
}

impl<'de, T: FromStr> Deserialize<'de> for Dec<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V<T>(PhantomData<T>);
        impl<T: FromStr> Visitor<'_> for V<T> {
            type Value = Dec<T>;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                write!(f, "an integer written as a decimal string")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Dec<T>, E> {
                v.parse().map(Dec).map_err(|_| E::invalid_value(de::Unexpected::Str(v), &self))
            }
        }
        d.deserialize_str(V(PhantomData))
    }
}

/// `a..b`, normalized on output.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Window(pub DegreeWindow);

impl Serialize for Window {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(&format_args!("{}..{}", self.0.lo, self.0.hi))
    }
}

impl<'de> Deserialize<'de> for Window {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        DegreeWindow::parse(&s).map(Window).map_err(de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "ring", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DomainSpec {
    Integers,
    Rationals,
    PrimeField { p: Dec<u64> },
}

impl DomainSpec {
    pub fn domain(&self) -> Result<Domain, WorkbenchError> {
        Ok(match self {
            DomainSpec::Integers => Domain::Integer,
            DomainSpec::Rationals => Domain::Rational,
            DomainSpec::PrimeField { p } => Domain::prime(p.0)?,
        })
    }
}

/// Sparse matrix entry `[row, column, coefficient]`.
pub type Entry = (Dec<usize>, Dec<usize>, String);

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum AlgebraSpec {
    /// The coefficient ring itself: the integers, a prime field or ℚ.
    Ground,
    /// `k[x]/(x^n)` with `x` in the given degree.
    TruncatedPolynomial { n: Dec<usize>, x_degree: Dec<i32> },
    /// Path algebra of an acyclic quiver, arrows as `[source, target]`.
    PathAlgebra { vertices: Dec<usize>, arrows: Vec<(Dec<usize>, Dec<usize>)> },
    /// Structure constants: `products` lists `[a, b, [[k, coefficient], ..]]`
    /// for `e_a e_b = Σ coefficient · e_k`.
    Presentation {
        labels: Vec<String>,
        degrees: Vec<Dec<i32>>,
        unit: Vec<(Dec<usize>, String)>,
        products: Vec<(Dec<usize>, Dec<usize>, Vec<(Dec<usize>, String)>)>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        differential: Vec<Entry>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModuleSpec {
    Zero,
    /// `R` as a left module over itself.
    Free,
    Simple {
        vertex: Dec<usize>,
    },
    Projective {
        vertex: Dec<usize>,
    },
    /// `ℤ/n` as the complex `ℤ --n--> ℤ`.
    Residue {
        n: Dec<i64>,
    },
    /// `ℤ[S⁻¹]` in degree 0.
    Localization {
        invert: Vec<Dec<u64>>,
    },
    Shift {
        by: Dec<i32>,
        of: Box<ModuleSpec>,
    },
    Sum {
        summands: Vec<ModuleSpec>,
    },
    /// A complex over a ground algebra; `invert` localizes the coefficients.
    Complex {
        degrees: Vec<Dec<i32>>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        differential: Vec<Entry>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        invert: Vec<Dec<u64>>,
    },
    /// Underlying graded module, differential and one action matrix per
    /// basis element of `R`.
    Presentation {
        degrees: Vec<Dec<i32>>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        differential: Vec<Entry>,
        action: Vec<Vec<Entry>>,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct HintsSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub localization_descent: Option<DescentSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DescentSpec {
    pub invert: Vec<Dec<u64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategySpec {
    /// `finite-build`, `hereditary-localization` or `witness`.
    pub joint: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<Dec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<LabeledModule>,
}

impl Default for StrategySpec {
    fn default() -> Self {
        StrategySpec { joint: "finite-build".into(), depth: None, witness: None }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabeledModule {
    pub label: String,
    pub module: ModuleSpec,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TestsetSpec {
    /// Generated objects per side.
    pub size: Dec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub extras: Vec<LabeledModule>,
}

impl Default for TestsetSpec {
    fn default() -> Self {
        TestsetSpec { size: Dec(20), extras: vec![] }
    }
}

/// Deliberate corruption of one structure constant of `ℱ`, for negative
/// controls. Without `constant`, the last nonzero one is used.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MutationSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constant: Option<(Dec<usize>, Dec<usize>, Dec<usize>)>,
    pub delta: Dec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModulePair {
    #[serde(rename = "B")]
    pub b: ModuleSpec,
    #[serde(rename = "C")]
    pub c: ModuleSpec,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema: u32,
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    pub domain: DomainSpec,
    pub algebra: AlgebraSpec,
    pub modules: ModulePair,
    #[serde(default)]
    pub hints: HintsSpec,
    #[serde(default)]
    pub strategies: StrategySpec,
    pub window: Window,
    pub seed: Dec<u64>,
    #[serde(default)]
    pub testset: TestsetSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mutation: Option<MutationSpec>,
}

impl Scenario {
    /// Parses a scenario, reporting the offending field and line on failure.
    pub fn parse(text: &str) -> Result<Scenario, WorkbenchError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let scenario: Scenario = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            WorkbenchError::Parse { path, line: inner.line(), column: inner.column(), message: inner.to_string() }
        })?;
        if scenario.schema != SCHEMA {
            return Err(WorkbenchError::Parse {
                path: "schema".into(),
                line: 0,
                column: 0,
                message: format!("unsupported schema {}, expected {SCHEMA}", scenario.schema),
            });
        }
        Ok(scenario)
    }

    /// Normal form: pretty JSON with defaults filled in.
    pub fn emit(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("scenarios serialize");
        s.push('\n');
        s
    }

    pub fn instantiate(&self) -> Result<Instance, WorkbenchError> {
        let domain = self.domain.domain()?;
        let r = Arc::new(build_algebra(&self.algebra, &domain)?);
        let b = Arc::new(build_module(&self.modules.b, &r)?.named("B"));
        let c = Arc::new(build_module(&self.modules.c, &r)?.named("C"));
        let hints = Hints {
            localization_descent: self
                .hints
                .localization_descent
                .as_ref()
                .map(|d| DescentHint { invert: d.invert.iter().map(|p| p.0).collect() }),
        };
        let depth = self.strategies.depth.map_or(DEFAULT_BUILD_DEPTH, |d| d.0);
        let strategy = match (self.strategies.joint.as_str(), &self.strategies.witness) {
            ("witness", Some(w)) => {
                JointStrategy::Witness { label: w.label.clone(), module: Arc::new(build_module(&w.module, &r)?) }
            }
            ("finite-build", _) => JointStrategy::FiniteBuild { depth },
            (name, _) => name.parse()?,
        };
        let extras = self
            .testset
            .extras
            .iter()
            .map(|e| Ok(TestObject::new(&e.label, Arc::new(build_module(&e.module, &r)?.named(&e.label)))))
            .collect::<Result<Vec<_>, WorkbenchError>>()?;
        Ok(Instance {
            r,
            b,
            c,
            hints,
            strategy,
            depth,
            window: self.window.0,
            seed: self.seed.0,
            testset_size: self.testset.size.0,
            extras,
        })
    }
}

/// A scenario with its algebra and modules constructed.
#[derive(Clone, Debug)]
pub struct Instance {
    pub r: Arc<DgAlgebra>,
    pub b: Arc<DgModule>,
    pub c: Arc<DgModule>,
    pub hints: Hints,
    pub strategy: JointStrategy,
    pub depth: usize,
    pub window: DegreeWindow,
    pub seed: u64,
    pub testset_size: usize,
    pub extras: Vec<TestObject>,
}

fn scalar(dom: &Domain, s: &str) -> Result<Scalar, WorkbenchError> {
    let x = Scalar::parse(s).ok_or_else(|| WorkbenchError::Scenario(format!("bad coefficient `{s}`")))?;
    Ok(dom.element(&x)?)
}

fn sparse(dom: &Domain, n: usize, entries: &[(Dec<usize>, String)]) -> Result<Vector, WorkbenchError> {
    let mut v = Vector::new();
    for (k, x) in entries {
        if k.0 >= n {
            return Err(WorkbenchError::Scenario(format!("index {} out of range (rank {n})", k.0)));
        }
        let x = scalar(dom, x)?;
        if !x.is_zero() {
            v.insert(k.0, x);
        }
    }
    Ok(v)
}

fn matrix(dom: &Domain, n: usize, entries: &[Entry]) -> Result<Matrix, WorkbenchError> {
    let mut m = Matrix::zeros(n, n);
    for (r, c, x) in entries {
        if r.0 >= n || c.0 >= n {
            return Err(WorkbenchError::Scenario(format!("entry ({}, {}) out of range (rank {n})", r.0, c.0)));
        }
        m.set(r.0, c.0, scalar(dom, x)?);
    }
    Ok(m)
}

fn build_algebra(spec: &AlgebraSpec, dom: &Domain) -> Result<DgAlgebra, WorkbenchError> {
    Ok(match spec {
        AlgebraSpec::Ground => DgAlgebra::ground(dom.clone()),
        AlgebraSpec::TruncatedPolynomial { n, x_degree } => {
            DgAlgebra::truncated_polynomial(dom.clone(), n.0, x_degree.0)?
        }
        AlgebraSpec::PathAlgebra { vertices, arrows } => {
            let arrows: Vec<(usize, usize)> = arrows.iter().map(|(s, t)| (s.0, t.0)).collect();
            DgAlgebra::path_algebra(dom.clone(), vertices.0, &arrows)?
        }
        AlgebraSpec::Presentation { labels, degrees, unit, products, differential } => {
            let n = labels.len();
            if degrees.len() != n {
                return Err(WorkbenchError::Scenario("algebra labels and degrees differ in length".into()));
            }
            let module = GradedModule::new(dom.clone(), degrees.iter().map(|d| d.0).collect(), labels.clone());
            let mut table = BTreeMap::new();
            for (a, b, v) in products {
                table.insert((a.0, b.0), sparse(dom, n, v)?);
            }
            let alg = DgAlgebra::from_table("R", module, &table, sparse(dom, n, unit)?, matrix(dom, n, differential)?)?;
            let rep = alg.check();
            if !rep.failures.is_empty() {
                return Err(WorkbenchError::Scenario(format!("algebra is not a DGA: {}", rep.failures.join("; "))));
            }
            alg
        }
    })
}

fn labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("m{i}")).collect()
}

fn require_ground_integers(r: &DgAlgebra, what: &str) -> Result<(), WorkbenchError> {
    if r.is_ground() && matches!(r.domain(), Domain::Integer) {
        Ok(())
    } else {
        Err(WorkbenchError::Scenario(format!("{what} needs R = the integers")))
    }
}

fn checked(m: DgModule) -> Result<DgModule, WorkbenchError> {
    let rep = m.check();
    if rep.failures.is_empty() {
        Ok(m)
    } else {
        Err(WorkbenchError::Scenario(format!("module is not a DG module: {}", rep.failures.join("; "))))
    }
}

pub fn build_module(spec: &ModuleSpec, r: &Arc<DgAlgebra>) -> Result<DgModule, WorkbenchError> {
    let vertex = |v: usize| {
        if v < r.idempotents.len().max(1) {
            Ok(v)
        } else {
            Err(WorkbenchError::Scenario(format!("vertex {v} does not exist")))
        }
    };
    Ok(match spec {
        ModuleSpec::Zero => DgModule::zero(r.clone(), r.domain().clone()),
        ModuleSpec::Free => (*free_module(r)?).clone().named("R"),
        ModuleSpec::Simple { vertex: v } => (*simple(r, vertex(v.0)?)).clone(),
        ModuleSpec::Projective { vertex: v } => (*projective(r, vertex(v.0)?)?).clone(),
        ModuleSpec::Residue { n } => {
            require_ground_integers(r, "a residue class")?;
            (*residue(r, n.0)?).clone()
        }
        ModuleSpec::Localization { invert } => {
            require_ground_integers(r, "a localization")?;
            let primes: PrimeSet = invert.iter().map(|p| p.0).collect();
            if primes.is_empty() {
                return Err(WorkbenchError::Scenario("a localization must invert at least one prime".into()));
            }
            let dom = Domain::localized(primes);
            let name = format!("{dom}");
            let module = GradedModule::new(dom, vec![0], vec!["1".into()]);
            DgModule::over_ground(&name, r.clone(), module, Matrix::zeros(1, 1))?
        }
        ModuleSpec::Shift { by, of } => shift(&build_module(of, r)?, by.0),
        ModuleSpec::Sum { summands } => {
            let family = summands.iter().map(|s| build_module(s, r).map(Arc::new)).collect::<Result<Vec<_>, _>>()?;
            (*direct_sum(&family, r.domain().clone())?.sum).clone()
        }
        ModuleSpec::Complex { degrees, differential, invert } => {
            if !r.is_ground() {
                return Err(WorkbenchError::Scenario("a plain complex needs a ground algebra".into()));
            }
            let dom = if invert.is_empty() {
                r.domain().clone()
            } else {
                require_ground_integers(r, "a localized complex")?;
                Domain::localized(invert.iter().map(|p| p.0).collect())
            };
            let n = degrees.len();
            let module = GradedModule::new(dom.clone(), degrees.iter().map(|d| d.0).collect(), labels(n));
            checked(DgModule::over_ground("X", r.clone(), module, matrix(&dom, n, differential)?)?)?
        }
        ModuleSpec::Presentation { degrees, differential, action } => {
            let dom = r.domain().clone();
            let n = degrees.len();
            if action.len() != r.dim() {
                return Err(WorkbenchError::Scenario(format!(
                    "module presentation gives {} action matrices, R has rank {}",
                    action.len(),
                    r.dim()
                )));
            }
            let mats = action.iter().map(|a| matrix(&dom, n, a)).collect::<Result<Vec<_>, _>>()?;
            checked(DgModule {
                name: "M".into(),
                module: GradedModule::new(dom.clone(), degrees.iter().map(|d| d.0).collect(), labels(n)),
                d: matrix(&dom, n, differential)?,
                left: Some(Action { alg: r.clone(), mats }),
                right: None,
                cells: None,
            })?
        }
    })
}
