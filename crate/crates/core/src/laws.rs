//! The law catalog: identities and inequalities between Schatten norms and
//! Schatten p-numerical radii of block matrices, each checkable on concrete
//! inputs with explicit error accounting.
//!
//! Every evaluated quantity ("side") is carried as an enclosure `[lo, hi]`.
//! Plain Schatten norms are points. A certified radius `omega` contributes
//! `[value, value + eps]`, and combinations are monotone so enclosures
//! propagate by evaluating at both ends. A link `lhs <= rhs` (or `lhs = rhs`)
//! has slack `rhs.lo - lhs.lo`. The error budget is the total width of the
//! sides in play plus `1e-8 * max(1, |side|)` for floating-point error. If
//! the true values satisfy the link, the slack is at least `-budget`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{BlockPartition, ComplexMatrix};
use crate::optimize::OptimizerConfig;
use crate::radius;
use crate::spectral::{schatten, PNorm};

/// Relative allowance for singular value and rounding error.
pub const NUMERICAL_TOLERANCE: f64 = 1e-8;

/// Angles used for the off-diagonal phase-invariance law.
pub const PHASE_ANGLES: [f64; 5] = [PI / 7.0, PI / 3.0, PI / 2.0, PI, 5.0 * PI / 3.0];

macro_rules! law_ids {
    ($($variant:ident => $name:literal),* $(,)?) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum LawId { $($variant),* }

        impl LawId {
            pub const ALL: &'static [LawId] = &[$(LawId::$variant),*];

            pub fn as_str(self) -> &'static str {
                match self { $(LawId::$variant => $name),* }
            }
        }

        impl FromStr for LawId {
            type Err = Error;
            fn from_str(s: &str) -> Result<Self> {
                match s.to_ascii_uppercase().as_str() {
                    $($name => Ok(LawId::$variant),)*
                    _ => Err(Error::UnknownLaw(s.to_string())),
                }
            }
        }
    };
}

law_ids! {
    Eq1 => "EQ1",
    Eq2 => "EQ2",
    Eq3 => "EQ3",
    Eq4 => "EQ4",
    BkUpper => "BK-UPPER",
    BkLower => "BK-LOWER",
    L14 => "L14",
    L21 => "L21",
    P22 => "P22",
    T23Hi => "T23-HI",
    T23Lo => "T23-LO",
    L31a => "L31A",
    L31b => "L31B",
    T32 => "T32",
    C33 => "C33",
    R34 => "R34",
    R35 => "R35",
    T36 => "T36",
    R41a => "R41A",
    R41b => "R41B",
    T42 => "T42",
}

impl fmt::Display for LawId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for LawId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for LawId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LawKind {
    Equality,
    InequalityChain,
}

/// Range of exponents on which a law is asserted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PDomain {
    /// `1 <= p <= inf`
    All,
    /// `1 <= p <= 2`
    UpToTwo,
    /// `2 <= p < inf`
    TwoToFinite,
}

impl PDomain {
    pub fn contains(self, p: PNorm) -> bool {
        match self {
            PDomain::All => true,
            PDomain::UpToTwo => p.value() <= 2.0,
            PDomain::TwoToFinite => p.value() >= 2.0 && !p.is_infinite(),
        }
    }
}

impl fmt::Display for PDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PDomain::All => "[1, inf]",
            PDomain::UpToTwo => "[1, 2]",
            PDomain::TwoToFinite => "[2, inf)",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Law {
    pub id: LawId,
    pub kind: LawKind,
    /// Number of input matrices.
    pub arity: usize,
    pub p_domain: PDomain,
    pub description: &'static str,
    /// The statement being checked.
    pub anchor: &'static str,
}

impl Law {
    pub fn is_equality(&self) -> bool {
        self.kind == LawKind::Equality
    }

    /// Dimension of each input matrix when the law is run at block size `n`.
    pub fn input_dim(&self, n: usize, grid: usize) -> usize {
        match self.id {
            LawId::T23Hi | LawId::T23Lo => 2 * n,
            LawId::BkUpper | LawId::BkLower => grid * n,
            _ => n,
        }
    }

    /// Whether evaluation is possible at all at `p`, inside or outside the
    /// asserted domain. Laws written with `p`-th powers need finite `p`.
    pub fn evaluable_at(&self, p: PNorm) -> bool {
        !(p.is_infinite() && matches!(self.id, LawId::BkUpper | LawId::BkLower | LawId::T23Hi | LawId::T23Lo))
    }
}

use LawKind::{Equality, InequalityChain};

const CATALOG: [Law; 21] = [
    Law {
        id: LawId::Eq1,
        kind: Equality,
        arity: 1,
        p_domain: PDomain::All,
        description: "direct sum with the adjoint",
        anchor: "||A (+) A*||_p = ||A (+) A||_p",
    },
    Law {
        id: LawId::Eq2,
        kind: Equality,
        arity: 2,
        p_domain: PDomain::All,
        description: "direct sum versus off-diagonal block matrix",
        anchor: "||A (+) B||_p = ||[[0, A], [B, 0]]||_p",
    },
    Law {
        id: LawId::Eq3,
        kind: Equality,
        arity: 2,
        p_domain: PDomain::All,
        description: "Schatten norm of a direct sum (max form at p = inf)",
        anchor: "||A (+) B||_p = (||A||_p^p + ||B||_p^p)^{1/p}",
    },
    Law {
        id: LawId::Eq4,
        kind: Equality,
        arity: 1,
        p_domain: PDomain::All,
        description: "Schatten norm of A (+) A",
        anchor: "||A (+) A||_p = 2^{1/p} ||A||_p",
    },
    Law {
        id: LawId::BkUpper,
        kind: InequalityChain,
        arity: 1,
        p_domain: PDomain::TwoToFinite,
        description: "Bhatia-Kittaneh block chain for p >= 2",
        anchor: "n^{2-p} ||T||_p^p <= sum_ij ||T_ij||_p^p <= ||T||_p^p",
    },
    Law {
        id: LawId::BkLower,
        kind: InequalityChain,
        arity: 1,
        p_domain: PDomain::UpToTwo,
        description: "Bhatia-Kittaneh block chain for p <= 2",
        anchor: "||T||_p^p <= sum_ij ||T_ij||_p^p <= n^{2-p} ||T||_p^p",
    },
    Law {
        id: LawId::L14,
        kind: Equality,
        arity: 1,
        p_domain: PDomain::All,
        description: "radius of the symmetric off-diagonal block",
        anchor: "omega_p([[0, B], [B, 0]]) = 2^{1/p} omega_p(B)",
    },
    Law {
        id: LawId::L21,
        kind: Equality,
        arity: 2,
        p_domain: PDomain::All,
        description: "off-diagonal radius as a rotating sum",
        anchor: "omega_p([[0, A], [B, 0]]) = 2^{1/p-1} sup_t ||e^{it} A + e^{-it} B*||_p",
    },
    Law {
        id: LawId::P22,
        kind: InequalityChain,
        arity: 2,
        p_domain: PDomain::All,
        description: "radius of a direct sum (max form at p = inf)",
        anchor: "omega_p(A (+) B) <= (omega_p^p(A) + omega_p^p(B))^{1/p}",
    },
    Law {
        id: LawId::T23Hi,
        kind: InequalityChain,
        arity: 1,
        p_domain: PDomain::TwoToFinite,
        description: "general 2x2 block bound, p >= 2",
        anchor: "omega_p^p(A) <= 2^{2-p} sum_ij omega_p^p(a_ij), a_ii = A_ii, a_ij = 2^{-1/p} [[0, A_ij], [A_ji, 0]]",
    },
    Law {
        id: LawId::T23Lo,
        kind: InequalityChain,
        arity: 1,
        p_domain: PDomain::UpToTwo,
        description: "general 2x2 block bound, p <= 2",
        anchor: "omega_p^p(A) <= sum_ij omega_p^p(a_ij), a_ii = A_ii, a_ij = 2^{-1/p} [[0, A_ij], [A_ji, 0]]",
    },
    Law {
        id: LawId::L31a,
        kind: Equality,
        arity: 2,
        p_domain: PDomain::All,
        description: "phase invariance of the off-diagonal radius",
        anchor: "omega_p([[0, A], [e^{it} B, 0]]) = omega_p([[0, A], [B, 0]])",
    },
    Law {
        id: LawId::L31b,
        kind: Equality,
        arity: 2,
        p_domain: PDomain::All,
        description: "swap invariance of the off-diagonal radius",
        anchor: "omega_p([[0, A], [B, 0]]) = omega_p([[0, B], [A, 0]])",
    },
    Law {
        id: LawId::T32,
        kind: InequalityChain,
        arity: 2,
        p_domain: PDomain::All,
        description: "off-diagonal radius between sum and difference radii",
        anchor: "max(omega_p(A+B), omega_p(A-B)) / 2^{1-1/p} <= omega_p([[0, A], [B, 0]]) <= (omega_p(A+B) + omega_p(A-B)) / 2^{1-1/p}",
    },
    Law {
        id: LawId::C33,
        kind: InequalityChain,
        arity: 1,
        p_domain: PDomain::All,
        description: "Cartesian parts in off-diagonal position",
        anchor: "omega_p(T)/2 <= 2^{-1/p} omega_p([[0, Re T], [Im T, 0]]) <= omega_p(T)",
    },
    Law {
        id: LawId::R34,
        kind: Equality,
        arity: 1,
        p_domain: PDomain::All,
        description: "radius through imaginary parts",
        anchor: "sup_t ||Im(e^{it} A)||_p = omega_p(A)",
    },
    Law {
        id: LawId::R35,
        kind: InequalityChain,
        arity: 1,
        p_domain: PDomain::TwoToFinite,
        description: "radius of [[X, X], [-X, -X]]",
        anchor: "omega_p([[X, X], [-X, -X]]) <= 2 omega_p(X)",
    },
    Law {
        id: LawId::T36,
        kind: InequalityChain,
        arity: 2,
        p_domain: PDomain::TwoToFinite,
        description: "off-diagonal radius upper bound with minima",
        anchor: "omega_p([[0, A], [B, 0]]) <= 2^{1/p} min(omega_p(A), omega_p(B)) + min(omega_p(A+B), omega_p(A-B))",
    },
    Law {
        id: LawId::R41a,
        kind: Equality,
        arity: 1,
        p_domain: PDomain::All,
        description: "radius as a supremum over the unit circle",
        anchor: "omega_p(T) = sup_{a^2+b^2=1} ||a Re T + b Im T||_p",
    },
    Law {
        id: LawId::R41b,
        kind: InequalityChain,
        arity: 1,
        p_domain: PDomain::All,
        description: "Hermitian part bounded by the radius",
        anchor: "||T + T*||_p <= 2 omega_p(T)",
    },
    Law {
        id: LawId::T42,
        kind: InequalityChain,
        arity: 2,
        p_domain: PDomain::All,
        description: "refined triangle inequality",
        anchor: "||A + B||_p <= 2^{1-1/p} omega_p([[0, A], [B*, 0]]) <= ||A||_p + ||B||_p",
    },
];

/// The full catalog in stable order.
pub fn list_laws() -> &'static [Law] {
    &CATALOG
}

pub fn law(id: LawId) -> &'static Law {
    CATALOG.iter().find(|l| l.id == id).expect("every id is in the catalog")
}

pub fn find_law(id: &str) -> Result<&'static Law> {
    Ok(law(id.parse()?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Pass,
    Fail,
    /// Passing inequality whose slack is within the error budget of zero.
    EqualityWitness,
}

impl Verdict {
    pub fn passed(self) -> bool {
        self != Verdict::Fail
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::EqualityWitness => "EQUALITY_WITNESS",
        })
    }
}

/// One evaluated quantity, known to lie in `[value, value + width]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Side {
    pub name: String,
    pub value: f64,
    pub width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Link {
    pub lhs: String,
    pub rhs: String,
    /// `rhs - lhs` on the lower ends of the enclosures.
    pub slack: f64,
}

/// How the inputs of a check were obtained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum InputDescriptor {
    Generated {
        kind: crate::random::MatrixKind,
        dim: usize,
        trial_seed: u64,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        grid: Option<usize>,
    },
    Explicit {
        matrices: Vec<serde_json::Value>,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        grid: Option<usize>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LawCheck {
    pub law_id: LawId,
    pub p: PNorm,
    pub input: InputDescriptor,
    pub sides: Vec<Side>,
    pub links: Vec<Link>,
    pub slack: f64,
    pub eps_budget: f64,
    pub verdict: Verdict,
    /// Evaluated outside the law's asserted p-domain. Never a failure.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub exploratory: bool,
}

impl LawCheck {
    pub fn side(&self, name: &str) -> Option<&Side> {
        self.sides.iter().find(|s| s.name == name)
    }
}

/// Input matrices for a law, plus the block grid for the block-partition laws.
#[derive(Debug, Clone, PartialEq)]
pub struct LawInput {
    pub matrices: Vec<ComplexMatrix>,
    pub grid: Option<usize>,
}

impl LawInput {
    pub fn new(matrices: Vec<ComplexMatrix>) -> Self {
        Self { matrices, grid: None }
    }

    pub fn with_grid(mut self, grid: usize) -> Self {
        self.grid = Some(grid);
        self
    }
}

/// Enclosure `[lo, hi]` of a real quantity.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Encl {
    lo: f64,
    hi: f64,
}

impl Encl {
    fn point(x: f64) -> Self {
        Self { lo: x, hi: x }
    }

    /// Image under a nondecreasing map.
    fn map(self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            lo: f(self.lo),
            hi: f(self.hi),
        }
    }

    /// Image under a map nondecreasing in both arguments.
    fn zip(self, o: Self, f: impl Fn(f64, f64) -> f64) -> Self {
        Self {
            lo: f(self.lo, o.lo),
            hi: f(self.hi, o.hi),
        }
    }

    fn scale(self, c: f64) -> Self {
        debug_assert!(c >= 0.0);
        self.map(|x| c * x)
    }
}

/// `(sum x^p)^{1/p}`, or the maximum at `p = inf`.
fn power_mean(p: PNorm, xs: &[f64]) -> f64 {
    let top = xs.iter().copied().fold(0.0, f64::max);
    if p.is_infinite() || top == 0.0 {
        return top;
    }
    let q = p.value();
    top * xs.iter().map(|x| (x / top).powf(q)).sum::<f64>().powf(1.0 / q)
}

fn power_mean_encl(p: PNorm, xs: &[Encl]) -> Encl {
    let lo: Vec<f64> = xs.iter().map(|e| e.lo).collect();
    let hi: Vec<f64> = xs.iter().map(|e| e.hi).collect();
    Encl {
        lo: power_mean(p, &lo),
        hi: power_mean(p, &hi),
    }
}

struct Eval<'a> {
    p: PNorm,
    cfg: &'a OptimizerConfig,
    sides: Vec<(String, Encl)>,
    links: Vec<(usize, usize)>,
}

impl<'a> Eval<'a> {
    fn new(p: PNorm, cfg: &'a OptimizerConfig) -> Self {
        Self {
            p,
            cfg,
            sides: Vec::new(),
            links: Vec::new(),
        }
    }

    fn norm(&self, m: &ComplexMatrix) -> Result<Encl> {
        Ok(Encl::point(schatten(m, self.p)?))
    }

    fn omega(&self, m: &ComplexMatrix) -> Result<Encl> {
        let c = radius::omega(m, self.p, self.cfg)?;
        Ok(Encl { lo: c.value, hi: c.upper() })
    }

    fn side(&mut self, name: impl Into<String>, e: Encl) -> usize {
        self.sides.push((name.into(), e));
        self.sides.len() - 1
    }

    /// Records `sides[lhs] <= sides[rhs]` (or `=` for equality laws).
    fn link(&mut self, lhs: usize, rhs: usize) {
        self.links.push((lhs, rhs));
    }

    fn p_pow(&self, e: Encl) -> Encl {
        let q = self.p.value();
        e.map(|x| x.powf(q))
    }

    fn finish(self, law: &Law, input: InputDescriptor) -> LawCheck {
        let links: Vec<Link> = self
            .links
            .iter()
            .map(|&(l, r)| Link {
                lhs: self.sides[l].0.clone(),
                rhs: self.sides[r].0.clone(),
                slack: self.sides[r].1.lo - self.sides[l].1.lo,
            })
            .collect();
        let mut used = vec![false; self.sides.len()];
        for &(l, r) in &self.links {
            used[l] = true;
            used[r] = true;
        }
        let widths: f64 = self
            .sides
            .iter()
            .zip(&used)
            .filter(|(_, &u)| u)
            .map(|((_, e), _)| e.hi - e.lo)
            .sum();
        let magnitude = self
            .sides
            .iter()
            .zip(&used)
            .filter(|(_, &u)| u)
            .map(|((_, e), _)| e.hi.abs())
            .fold(1.0, f64::max);
        let eps_budget = widths + NUMERICAL_TOLERANCE * magnitude;

        let (slack, verdict) = if law.is_equality() {
            let slack = links
                .iter()
                .map(|l| l.slack)
                .max_by(|a, b| a.abs().total_cmp(&b.abs()))
                .unwrap_or(0.0);
            let v = if slack.abs() <= eps_budget { Verdict::Pass } else { Verdict::Fail };
            (slack, v)
        } else {
            let slack = links.iter().map(|l| l.slack).fold(f64::INFINITY, f64::min);
            let v = if slack < -eps_budget {
                Verdict::Fail
            } else if slack <= eps_budget {
                Verdict::EqualityWitness
            } else {
                Verdict::Pass
            };
            (slack, v)
        };

        LawCheck {
            law_id: law.id,
            p: self.p,
            input,
            sides: self
                .sides
                .into_iter()
                .map(|(name, e)| Side {
                    name,
                    value: e.lo,
                    width: e.hi - e.lo,
                })
                .collect(),
            links,
            slack,
            eps_budget,
            verdict,
            exploratory: false,
        }
    }
}

/// Evaluates `law` on `input` at exponent `p`.
///
/// Fails with [`Error::OutOfDomain`] when `p` is outside the law's asserted
/// range, and with [`Error::Uncertified`] when a radius cannot be certified
/// within the optimizer budget.
pub fn evaluate_law(law: &Law, input: &LawInput, p: PNorm, cfg: &OptimizerConfig) -> Result<LawCheck> {
    if !law.p_domain.contains(p) {
        return Err(out_of_domain(law, p));
    }
    evaluate_any(law, input, p, cfg)
}

/// Like [`evaluate_law`], but also runs outside the asserted p-domain. Such
/// results are marked exploratory.
pub fn evaluate_law_exploratory(law: &Law, input: &LawInput, p: PNorm, cfg: &OptimizerConfig) -> Result<LawCheck> {
    let mut check = evaluate_any(law, input, p, cfg)?;
    check.exploratory = !law.p_domain.contains(p);
    Ok(check)
}

fn out_of_domain(law: &Law, p: PNorm) -> Error {
    Error::OutOfDomain {
        law: law.id.as_str(),
        p: p.to_string(),
    }
}

fn evaluate_any(law: &Law, input: &LawInput, p: PNorm, cfg: &OptimizerConfig) -> Result<LawCheck> {
    if !law.evaluable_at(p) {
        return Err(out_of_domain(law, p));
    }
    let ms = &input.matrices;
    if ms.len() != law.arity {
        return Err(Error::Arity {
            law: law.id.as_str(),
            expected: law.arity,
            got: ms.len(),
        });
    }
    for m in ms {
        if !m.is_square() {
            return Err(Error::NotSquare {
                rows: m.rows(),
                cols: m.cols(),
            });
        }
        if m.dim() != ms[0].dim() {
            return Err(Error::DimensionMismatch(format!(
                "law {} needs inputs of one size, got {} and {}",
                law.id,
                ms[0].dim(),
                m.dim()
            )));
        }
    }
    cfg.validate()?;

    let mut ev = Eval::new(p, cfg);
    let inv_p = p.recip();
    let two_inv_p = p.two_pow_recip();
    let a = &ms[0];
    let b = ms.get(1);
    let snd = || b.expect("arity checked");

    match law.id {
        LawId::Eq1 => {
            let l = ev.norm(&a.direct_sum(&a.adjoint())?)?;
            let r = ev.norm(&a.direct_sum(a)?)?;
            let (l, r) = (ev.side("||A (+) A*||", l), ev.side("||A (+) A||", r));
            ev.link(l, r);
        }
        LawId::Eq2 => {
            let b = snd();
            let l = ev.norm(&a.direct_sum(b)?)?;
            let r = ev.norm(&ComplexMatrix::off_diag(a, b)?)?;
            let (l, r) = (ev.side("||A (+) B||", l), ev.side("||[[0,A],[B,0]]||", r));
            ev.link(l, r);
        }
        LawId::Eq3 => {
            let b = snd();
            let l = ev.norm(&a.direct_sum(b)?)?;
            let r = power_mean_encl(p, &[ev.norm(a)?, ev.norm(b)?]);
            let (l, r) = (ev.side("||A (+) B||", l), ev.side("(||A||^p + ||B||^p)^(1/p)", r));
            ev.link(l, r);
        }
        LawId::Eq4 => {
            let l = ev.norm(&a.direct_sum(a)?)?;
            let r = ev.norm(a)?.scale(two_inv_p);
            let (l, r) = (ev.side("||A (+) A||", l), ev.side("2^(1/p) ||A||", r));
            ev.link(l, r);
        }
        LawId::BkUpper | LawId::BkLower => {
            let grid = input.grid.unwrap_or(2);
            if grid == 0 || !a.dim().is_multiple_of(grid) {
                return Err(Error::DimensionMismatch(format!(
                    "a {0}x{0} matrix cannot be split into a {grid}x{grid} block grid",
                    a.dim()
                )));
            }
            let part = BlockPartition::new(grid, a.dim() / grid)?;
            let full = ev.p_pow(ev.norm(a)?);
            let mut sum = Encl::point(0.0);
            for blk in a.extract_blocks(part)?.iter().flatten() {
                sum = sum.zip(ev.p_pow(ev.norm(blk)?), |x, y| x + y);
            }
            let scaled = full.scale((grid as f64).powf(2.0 - p.value()));
            let s = ev.side("sum ||T_ij||^p", sum);
            if law.id == LawId::BkUpper {
                let lo = ev.side("n^(2-p) ||T||^p", scaled);
                let hi = ev.side("||T||^p", full);
                ev.link(lo, s);
                ev.link(s, hi);
            } else {
                let lo = ev.side("||T||^p", full);
                let hi = ev.side("n^(2-p) ||T||^p", scaled);
                ev.link(lo, s);
                ev.link(s, hi);
            }
        }
        LawId::L14 => {
            let l = ev.omega(&ComplexMatrix::off_diag(a, a)?)?;
            let r = ev.omega(a)?.scale(two_inv_p);
            let (l, r) = (ev.side("omega([[0,B],[B,0]])", l), ev.side("2^(1/p) omega(B)", r));
            ev.link(l, r);
        }
        LawId::L21 => {
            let b = snd();
            let l = ev.omega(&ComplexMatrix::off_diag(a, b)?)?;
            let rs = radius::rotating_sum_sup(a, b, p, cfg)?;
            let r = Encl { lo: rs.value, hi: rs.upper() }.scale(2f64.powf(inv_p - 1.0));
            let (l, r) = (
                ev.side("omega([[0,A],[B,0]])", l),
                ev.side("2^(1/p-1) sup ||e^(it)A + e^(-it)B*||", r),
            );
            ev.link(l, r);
        }
        LawId::P22 => {
            let b = snd();
            let l = ev.omega(&a.direct_sum(b)?)?;
            let r = power_mean_encl(p, &[ev.omega(a)?, ev.omega(b)?]);
            let (l, r) = (ev.side("omega(A (+) B)", l), ev.side("(omega^p(A) + omega^p(B))^(1/p)", r));
            ev.link(l, r);
        }
        LawId::T23Hi | LawId::T23Lo => {
            if !a.dim().is_multiple_of(2) {
                return Err(Error::DimensionMismatch(format!(
                    "a {0}x{0} matrix has no 2x2 block partition",
                    a.dim()
                )));
            }
            let blocks = a.extract_blocks(BlockPartition::new(2, a.dim() / 2)?)?;
            let w = 2f64.powf(-inv_p);
            let a11 = ev.omega(&blocks[0][0])?;
            let a22 = ev.omega(&blocks[1][1])?;
            let a12 = ev.omega(&ComplexMatrix::off_diag(&blocks[0][1], &blocks[1][0])?)?.scale(w);
            let a21 = ev.omega(&ComplexMatrix::off_diag(&blocks[1][0], &blocks[0][1])?)?.scale(w);
            let mut sum = Encl::point(0.0);
            for e in [a11, a12, a21, a22] {
                sum = sum.zip(ev.p_pow(e), |x, y| x + y);
            }
            let factor = if law.id == LawId::T23Hi { 2f64.powf(2.0 - p.value()) } else { 1.0 };
            let lhs = ev.p_pow(ev.omega(a)?);
            let l = ev.side("omega^p(A)", lhs);
            let r = ev.side(
                if law.id == LawId::T23Hi {
                    "2^(2-p) sum omega^p(a_ij)"
                } else {
                    "sum omega^p(a_ij)"
                },
                sum.scale(factor),
            );
            ev.link(l, r);
            ev.side("omega(a_11)", a11);
            ev.side("omega(a_12)", a12);
            ev.side("omega(a_21)", a21);
            ev.side("omega(a_22)", a22);
        }
        LawId::L31a => {
            let b = snd();
            let base = ev.omega(&ComplexMatrix::off_diag(a, b)?)?;
            let base = ev.side("omega([[0,A],[B,0]])", base);
            for (k, &t) in PHASE_ANGLES.iter().enumerate() {
                let e = ev.omega(&ComplexMatrix::off_diag(a, &b.rotate(t))?)?;
                let s = ev.side(format!("omega([[0,A],[e^(i t{k})B,0]])"), e);
                ev.link(s, base);
            }
        }
        LawId::L31b => {
            let b = snd();
            let l = ev.omega(&ComplexMatrix::off_diag(a, b)?)?;
            let r = ev.omega(&ComplexMatrix::off_diag(b, a)?)?;
            let (l, r) = (ev.side("omega([[0,A],[B,0]])", l), ev.side("omega([[0,B],[A,0]])", r));
            ev.link(l, r);
        }
        LawId::T32 => {
            let b = snd();
            let c = 2f64.powf(1.0 - inv_p);
            let sum = ev.omega(&a.try_add(b)?)?;
            let diff = ev.omega(&a.try_sub(b)?)?;
            let mid = ev.omega(&ComplexMatrix::off_diag(a, b)?)?;
            let lo = sum.zip(diff, f64::max).scale(1.0 / c);
            let hi = sum.zip(diff, |x, y| x + y).scale(1.0 / c);
            let lo = ev.side("max(omega(A+B), omega(A-B)) / 2^(1-1/p)", lo);
            let mid = ev.side("omega([[0,A],[B,0]])", mid);
            let hi = ev.side("(omega(A+B) + omega(A-B)) / 2^(1-1/p)", hi);
            ev.link(lo, mid);
            ev.link(mid, hi);
        }
        LawId::C33 => {
            let w = ev.omega(a)?;
            let mid = ev.omega(&ComplexMatrix::off_diag(&a.re_part()?, &a.im_part()?)?)?;
            let lo = ev.side("omega(T)/2", w.scale(0.5));
            let mid = ev.side("2^(-1/p) omega([[0,Re T],[Im T,0]])", mid.scale(1.0 / two_inv_p));
            let hi = ev.side("omega(T)", w);
            ev.link(lo, mid);
            ev.link(mid, hi);
        }
        LawId::R34 => {
            let im = radius::im_sup(a, p, cfg)?;
            let l = ev.side("sup ||Im(e^(it)A)||", Encl { lo: im.value, hi: im.upper() });
            let r = ev.omega(a)?;
            let r = ev.side("omega(A)", r);
            ev.link(l, r);
        }
        LawId::R35 => {
            let neg = -a;
            let l = ev.omega(&ComplexMatrix::block2(a, a, &neg, &neg)?)?;
            let r = ev.omega(a)?.scale(2.0);
            let (l, r) = (ev.side("omega([[X,X],[-X,-X]])", l), ev.side("2 omega(X)", r));
            ev.link(l, r);
        }
        LawId::T36 => {
            let b = snd();
            let l = ev.omega(&ComplexMatrix::off_diag(a, b)?)?;
            let wa = ev.omega(a)?;
            let wb = ev.omega(b)?;
            let sum = ev.omega(&a.try_add(b)?)?;
            let diff = ev.omega(&a.try_sub(b)?)?;
            let r = wa
                .zip(wb, f64::min)
                .scale(two_inv_p)
                .zip(sum.zip(diff, f64::min), |x, y| x + y);
            let (l, r) = (
                ev.side("omega([[0,A],[B,0]])", l),
                ev.side("2^(1/p) min(omega(A), omega(B)) + min(omega(A+B), omega(A-B))", r),
            );
            ev.link(l, r);
        }
        LawId::R41a => {
            let c = radius::circle_sup(a, p, cfg)?;
            let l = ev.side("sup ||a Re T + b Im T||", Encl { lo: c.value, hi: c.upper() });
            let r = ev.omega(a)?;
            let r = ev.side("omega(T)", r);
            ev.link(l, r);
        }
        LawId::R41b => {
            let l = ev.norm(&a.try_add(&a.adjoint())?)?;
            let r = ev.omega(a)?.scale(2.0);
            let (l, r) = (ev.side("||T + T*||", l), ev.side("2 omega(T)", r));
            ev.link(l, r);
        }
        LawId::T42 => {
            let b = snd();
            let lo = ev.norm(&a.try_add(b)?)?;
            let mid = ev.omega(&ComplexMatrix::off_diag(a, &b.adjoint())?)?;
            let hi = ev.norm(a)?.zip(ev.norm(b)?, |x, y| x + y);
            let lo = ev.side("||A + B||", lo);
            let mid = ev.side("2^(1-1/p) omega([[0,A],[B*,0]])", mid.scale(2f64.powf(1.0 - inv_p)));
            let hi = ev.side("||A|| + ||B||", hi);
            ev.link(lo, mid);
            ev.link(mid, hi);
        }
    }

    let descriptor = InputDescriptor::Explicit {
        matrices: ms.iter().map(ComplexMatrix::to_json).collect(),
        grid: input.grid.filter(|_| matches!(law.id, LawId::BkUpper | LawId::BkLower)),
    };
    Ok(ev.finish(law, descriptor))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_matrix, MatrixKind};

    fn cfg() -> OptimizerConfig {
        OptimizerConfig::default()
    }

    fn ginibre(n: usize, seed: u64) -> ComplexMatrix {
        random_matrix(MatrixKind::Ginibre, n, seed).unwrap()
    }

    #[test]
    fn catalog_shape() {
        let laws = list_laws();
        assert_eq!(laws.len(), 21);
        let mut ids: Vec<_> = laws.iter().map(|l| l.id).collect();
        ids.dedup();
        assert_eq!(ids.len(), 21);
        assert!(laws.iter().all(|l| !l.anchor.is_empty() && !l.description.is_empty()));
        assert_eq!(LawId::ALL.len(), 21);
        for l in laws {
            assert_eq!(l.id.as_str().parse::<LawId>().unwrap(), l.id);
        }
        let eq: Vec<_> = laws.iter().filter(|l| l.is_equality()).map(|l| l.id.as_str()).collect();
        assert_eq!(eq, ["EQ1", "EQ2", "EQ3", "EQ4", "L14", "L21", "L31A", "L31B", "R34", "R41A"]);
        assert!(matches!("T99".parse::<LawId>(), Err(Error::UnknownLaw(_))));
    }

    #[test]
    fn domains() {
        let p = |x: f64| PNorm::new(x).unwrap();
        assert!(PDomain::TwoToFinite.contains(p(2.0)));
        assert!(!PDomain::TwoToFinite.contains(p(f64::INFINITY)));
        assert!(!PDomain::TwoToFinite.contains(p(1.5)));
        assert!(PDomain::UpToTwo.contains(p(2.0)) && !PDomain::UpToTwo.contains(p(3.0)));
        let r35 = law(LawId::R35);
        let x = LawInput::new(vec![ginibre(2, 1)]);
        assert!(matches!(evaluate_law(r35, &x, p(1.5), &cfg()), Err(Error::OutOfDomain { .. })));
        let explored = evaluate_law_exploratory(r35, &x, p(1.5), &cfg()).unwrap();
        assert!(explored.exploratory);
        let bk = law(LawId::BkUpper);
        assert!(evaluate_law_exploratory(bk, &x, PNorm::INFINITY, &cfg()).is_err());
    }

    #[test]
    fn arity_and_shape_errors() {
        let l21 = law(LawId::L21);
        let one = LawInput::new(vec![ginibre(2, 1)]);
        assert!(matches!(evaluate_law(l21, &one, PNorm::TWO, &cfg()), Err(Error::Arity { .. })));
        let mixed = LawInput::new(vec![ginibre(2, 1), ginibre(3, 2)]);
        assert!(matches!(
            evaluate_law(l21, &mixed, PNorm::TWO, &cfg()),
            Err(Error::DimensionMismatch(_))
        ));
        let t23 = law(LawId::T23Lo);
        let odd = LawInput::new(vec![ginibre(3, 1)]);
        assert!(evaluate_law(t23, &odd, PNorm::TWO, &cfg()).is_err());
    }

    #[test]
    fn l14_on_jordan_block() {
        let j = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        let c = evaluate_law(law(LawId::L14), &LawInput::new(vec![j]), PNorm::TWO, &cfg()).unwrap();
        assert_eq!(c.verdict, Verdict::Pass);
        assert!((c.sides[0].value - 1.0).abs() <= 1e-6);
        assert!((c.sides[1].value - 1.0).abs() <= 1e-6);
    }

    #[test]
    fn t32_with_equal_inputs_is_tight_below() {
        let a = random_matrix(MatrixKind::Hermitian, 3, 5).unwrap();
        let c = evaluate_law(law(LawId::T32), &LawInput::new(vec![a.clone(), a]), PNorm::TWO, &cfg()).unwrap();
        assert_eq!(c.verdict, Verdict::EqualityWitness);
        // omega(A - B) = 0, so both bounds collapse onto 2^{1/p} omega(A)
        assert!(c.links[0].slack.abs() <= c.eps_budget);
        assert!(c.links[1].slack.abs() <= c.eps_budget);
    }

    #[test]
    fn t42_with_zero_second_input_is_tight_twice() {
        let a = ginibre(3, 9);
        let z = ComplexMatrix::zeros(3);
        for p in [1.0, 2.0, 3.5, f64::INFINITY] {
            let c = evaluate_law(law(LawId::T42), &LawInput::new(vec![a.clone(), z.clone()]), PNorm::new(p).unwrap(), &cfg())
                .unwrap();
            assert_eq!(c.verdict, Verdict::EqualityWitness, "p={p}");
            for l in &c.links {
                assert!(l.slack.abs() <= c.eps_budget);
            }
        }
    }

    #[test]
    fn bk_identity_example() {
        let c = evaluate_law(
            law(LawId::BkUpper),
            &LawInput::new(vec![ComplexMatrix::identity(4)]).with_grid(2),
            PNorm::TWO,
            &cfg(),
        )
        .unwrap();
        let vals: Vec<f64> = c.sides.iter().map(|s| s.value).collect();
        assert_eq!(vals.len(), 3);
        for v in vals {
            assert!((v - 4.0).abs() < 1e-12);
        }
        assert!(c.verdict.passed());
    }

    #[test]
    fn t23_off_diagonal_terms_agree() {
        for p in [2.0, 3.0, 4.0] {
            let a = ginibre(4, 17);
            let id = if p <= 2.0 { LawId::T23Lo } else { LawId::T23Hi };
            let c = evaluate_law(law(id), &LawInput::new(vec![a]), PNorm::new(p).unwrap(), &cfg()).unwrap();
            let x = c.side("omega(a_12)").unwrap();
            let y = c.side("omega(a_21)").unwrap();
            assert!((x.value - y.value).abs() <= x.width + y.width + 1e-10, "p={p}");
        }
    }

    #[test]
    fn equality_laws_hold_on_random_inputs() {
        for (k, l) in list_laws().iter().filter(|l| l.is_equality()).enumerate() {
            let ms: Vec<_> = (0..l.arity).map(|i| ginibre(3, 100 + 10 * k as u64 + i as u64)).collect();
            for p in [1.0, 2.0, 3.0, f64::INFINITY] {
                let c = evaluate_law(l, &LawInput::new(ms.clone()), PNorm::new(p).unwrap(), &cfg()).unwrap();
                assert_eq!(c.verdict, Verdict::Pass, "{} p={p}: slack {} budget {}", l.id, c.slack, c.eps_budget);
            }
        }
    }

    #[test]
    fn power_mean_at_infinity_is_max() {
        assert_eq!(power_mean(PNorm::INFINITY, &[1.0, 3.0, 2.0]), 3.0);
        assert!((power_mean(PNorm::TWO, &[3.0, 4.0]) - 5.0).abs() < 1e-15);
        assert_eq!(power_mean(PNorm::ONE, &[0.0, 0.0]), 0.0);
    }
}
