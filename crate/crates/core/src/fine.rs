//! Fine-structure operators μ, λ, χ, ϱ, bar, hat, localization, sk, mts and
//! h_β.
//!
//! Only the points fixed by the υ-hierarchy extension, a few derived pins and
//! the trivially determined regions are evaluated. Everything else returns
//! [`OpError::Unsupported`] so that callers never see a guessed value.

use std::collections::HashMap;
use std::fmt;
use std::sync::Mutex;

use crate::error::OpError;
use crate::notation::{split_limit, upsilon_floor};
use crate::ord::{Node, Ordinal};

/// ε_0 = ϑ_0(Ω_1).
pub fn epsilon_zero() -> Ordinal {
    Ordinal::theta(0, None, &Ordinal::big_omega(1)).expect("ε0 is a valid term")
}

/// α^∞: the least υ-constant above α.
pub fn upsilon_above(a: &Ordinal) -> Result<Ordinal, OpError> {
    let i = upsilon_floor(a)?;
    Ok(Ordinal::upsilon(&i.succ())?)
}

/// Countable epsilon numbers occurring hereditarily in the term of `a`,
/// `a` itself included when it is one.
pub fn epsilon_subterms(a: &Ordinal, out: &mut Vec<Ordinal>) {
    match a.node() {
        Node::Zero => {}
        Node::Sum(v) => v.iter().for_each(|(p, _)| epsilon_subterms(p, out)),
        Node::Pow(e) => epsilon_subterms(e, out),
        Node::Theta { rel, arg, .. } => {
            if a.is_countable() {
                out.push(a.clone());
            }
            epsilon_subterms(rel, out);
            epsilon_subterms(arg, out);
        }
        Node::Upsilon(i) => {
            out.push(a.clone());
            epsilon_subterms(i, out);
        }
    }
}

/// The largest epsilon parameter of `a` other than `a` itself.
pub fn top_parameter(a: &Ordinal) -> Option<Ordinal> {
    let mut v = Vec::new();
    epsilon_subterms(a, &mut v);
    v.into_iter().filter(|e| e != a).max()
}

/// μ_τ, or μ^ρ_τ when a relativizer ρ is given.
pub fn mu(tau: &Ordinal, rel: Option<&Ordinal>) -> Result<Ordinal, OpError> {
    if let Some(r) = rel {
        if r.is_epsilon_or_one() && *tau == upsilon_above(r)? {
            return upsilon_above(tau);
        }
    }
    match tau.node() {
        Node::Zero => Err(OpError::undefined("mu", tau)),
        Node::Upsilon(i) => {
            let (_, k) = split_limit(i);
            if k > 0 {
                Ok(Ordinal::upsilon(&i.succ())?)
            } else {
                Err(OpError::undefined("mu", tau))
            }
        }
        Node::Theta { .. } if tau.is_countable() => {
            if *tau == epsilon_zero() {
                Ok(Ordinal::omega())
            } else {
                Err(OpError::unsupported("mu", tau))
            }
        }
        _ => Err(OpError::domain("mu", format!("{tau} is not an epsilon number"))),
    }
}

/// λ_τ.
pub fn lambda_op(tau: &Ordinal) -> Result<Ordinal, OpError> {
    match tau.node() {
        Node::Zero => Err(OpError::undefined("lambda", tau)),
        Node::Upsilon(i) => Ok(Ordinal::upsilon(&i.succ())?),
        Node::Theta { level: 0, rel, arg } if rel.is_one() => {
            // ε_η = ϑ_0(Ω_1+η): λ = ε_η + logend(η) for η below ε_0.
            let eta = Ordinal::big_omega(1)
                .lsub(arg)
                .map_err(|_| OpError::unsupported("lambda", tau))?;
            if !eta.is_countable() || top_parameter(&eta).is_some() || eta.is_epsilon() {
                return Err(OpError::unsupported("lambda", tau));
            }
            Ok(tau.add(&eta.logend()))
        }
        Node::Theta { .. } => Err(OpError::unsupported("lambda", tau)),
        _ => Err(OpError::domain("lambda", format!("{tau} is not an epsilon number"))),
    }
}

/// λ^ρ_τ: agrees with λ except at τ = ρ^∞, where it is (ρ^∞)^∞.
pub fn lambda_rel(tau: &Ordinal, rel: &Ordinal) -> Result<Ordinal, OpError> {
    if rel.is_epsilon_or_one() && *tau == upsilon_above(rel)? {
        return upsilon_above(tau);
    }
    lambda_op(tau)
}

/// A 0/1 flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub struct Bit(pub bool);

impl Bit {
    pub fn as_u64(self) -> u64 {
        self.0 as u64
    }
}

impl fmt::Display for Bit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_u64())
    }
}

/// χ^τ(ξ). Zero at ξ = 0 and below τ.
pub fn chi(tau: &Ordinal, xi: &Ordinal) -> Result<Bit, OpError> {
    if !tau.is_epsilon() {
        return Err(OpError::domain("chi", format!("base {tau} is not an epsilon number")));
    }
    if xi.is_zero() || xi < tau {
        return Ok(Bit(false));
    }
    Err(OpError::unsupported("chi", format!("{tau}, {xi}")))
}

/// χ̌^τ(ξ) = 1 − χ^τ(ξ).
pub fn chi_check(tau: &Ordinal, xi: &Ordinal) -> Result<Bit, OpError> {
    chi(tau, xi).map(|b| Bit(!b.0))
}

/// ϱ^τ_ξ = τ·(λ'+q ∸ χ^τ(λ')) where logend(ξ) = λ'+q; ϱ^τ_0 = 0.
pub fn varrho(tau: &Ordinal, xi: &Ordinal) -> Result<Ordinal, OpError> {
    if *tau <= Ordinal::one() {
        return Err(OpError::domain("varrho", format!("base {tau} must exceed 1")));
    }
    if xi.is_zero() {
        return Ok(Ordinal::zero());
    }
    let le = xi.logend();
    let (lim, q) = split_limit(&le);
    let factor = if q > 0 && chi(tau, &lim)?.0 {
        le.pred().expect("q > 0")
    } else {
        le
    };
    Ok(tau.mul(&factor))
}

/// The ·̄-operator. Undefined on υ-constants.
pub fn bar(tau: &Ordinal) -> Result<Ordinal, OpError> {
    if tau.is_upsilon() {
        return Err(OpError::undefined("bar", tau));
    }
    Err(OpError::unsupported("bar", tau))
}

/// γ̂ for γ ∉ Im(υ).
pub fn hat(gamma: &Ordinal) -> Result<Ordinal, OpError> {
    if gamma.is_upsilon() || !gamma.is_epsilon() {
        return Err(OpError::domain("hat", format!("{gamma} is not an epsilon outside Im(υ)")));
    }
    Err(OpError::unsupported("hat", gamma))
}

/// The α-localization α = α_0 < … < α_n = β of β.
pub fn localize(alpha: &Ordinal, beta: &Ordinal) -> Result<Vec<Ordinal>, OpError> {
    if beta < alpha || !beta.is_principal() {
        return Err(OpError::domain("localize", format!("{beta} ∉ ℙ ∩ [{alpha}, ∞)")));
    }
    if beta == alpha {
        return Ok(vec![alpha.clone()]);
    }
    let mut params = Vec::new();
    epsilon_subterms(beta, &mut params);
    let inner: Vec<Ordinal> = params
        .into_iter()
        .filter(|e| e > alpha && e < beta)
        .collect();
    if inner.is_empty() {
        return Ok(vec![alpha.clone(), beta.clone()]);
    }
    Err(OpError::unsupported("localize", format!("{alpha}, {beta}")))
}

/// sk_β(γ).
pub fn sk(beta: &Ordinal, gamma: &Ordinal) -> Result<Vec<Ordinal>, OpError> {
    if !gamma.is_epsilon() || gamma.is_upsilon() {
        return Err(OpError::domain("sk", format!("{gamma} ∉ 𝔼 ∖ Im(υ)")));
    }
    let mut out = vec![gamma.clone()];
    loop {
        let d = out.last().unwrap().clone();
        let prev = if out.len() >= 2 {
            out[out.len() - 2].clone()
        } else {
            Ordinal::one()
        };
        if !(d.is_epsilon() && d > prev) {
            break;
        }
        let m = mu(&d, None)?;
        if *beta > m {
            break;
        }
        let next = bar(&m.mul(beta))?;
        if next <= d && out.len() > 64 {
            return Err(OpError::domain("sk", "no termination"));
        }
        out.push(next);
    }
    Ok(out)
}

/// mts^α(β), relative to the base τ.
pub fn mts(tau: &Ordinal, alpha: &Ordinal, beta: &Ordinal) -> Result<Vec<Ordinal>, OpError> {
    let loc = localize(alpha, beta)?;
    let n = loc.len() - 1;
    for (i, ai) in loc.iter().enumerate().take(n) {
        if ai < beta && *beta <= mu(ai, Some(tau))? {
            let mut head = mts(tau, alpha, ai)?;
            head.push(beta.clone());
            return Ok(head);
        }
        let _ = i;
    }
    Ok(vec![alpha.clone()])
}

/// h_β(α⃗⌢γ).
pub fn h_beta(prefix: &[Ordinal], gamma: &Ordinal, beta: &Ordinal) -> Result<Vec<Ordinal>, OpError> {
    if gamma.is_upsilon() {
        return Err(OpError::domain("h", format!("{gamma} ∈ Im(υ)")));
    }
    let mut out = prefix.to_vec();
    if beta > gamma {
        let top = hat(gamma)?;
        if *beta >= top {
            return Err(OpError::domain("h", format!("{beta} ≥ hat({gamma})")));
        }
        let m = mts(gamma, gamma, beta)?;
        if m.len() < 2 {
            return Err(OpError::domain("h", "mts too short"));
        }
        let eps = m[m.len() - 2].clone();
        out.extend(m[..m.len() - 2].iter().cloned());
        out.extend(sk(beta, &eps)?);
        return Ok(out);
    }
    if *beta <= Ordinal::one() {
        return Err(OpError::domain("h", format!("{beta} ≤ 1")));
    }
    if *beta <= mu(gamma, None)? {
        out.extend(sk(beta, gamma)?);
    } else {
        out.push(gamma.clone());
    }
    Ok(out)
}

/// Operators recorded in the golden corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Op {
    Mu,
    Lambda,
    Chi,
    Varrho,
    Bar,
    Localize,
}

impl Op {
    pub const ALL: [Op; 6] = [Op::Mu, Op::Lambda, Op::Chi, Op::Varrho, Op::Bar, Op::Localize];

    pub fn name(self) -> &'static str {
        match self {
            Op::Mu => "mu",
            Op::Lambda => "lambda",
            Op::Chi => "chi",
            Op::Varrho => "varrho",
            Op::Bar => "bar",
            Op::Localize => "localize",
        }
    }

    pub fn from_name(s: &str) -> Option<Op> {
        Op::ALL.into_iter().find(|o| o.name() == s)
    }

    pub fn arity(self) -> usize {
        match self {
            Op::Mu | Op::Lambda | Op::Bar => 1,
            Op::Chi | Op::Varrho | Op::Localize => 2,
        }
    }

    /// Evaluates the operator, rendering the result in the term grammar.
    pub fn eval(self, args: &[Ordinal]) -> Result<String, OpError> {
        match (self, args) {
            (Op::Mu, [t]) => mu(t, None).map(|v| v.to_string()),
            (Op::Lambda, [t]) => lambda_op(t).map(|v| v.to_string()),
            (Op::Bar, [t]) => bar(t).map(|v| v.to_string()),
            (Op::Chi, [t, x]) => chi(t, x).map(|b| b.to_string()),
            (Op::Varrho, [t, x]) => varrho(t, x).map(|v| v.to_string()),
            (Op::Localize, [a, b]) => localize(a, b).map(|v| {
                v.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(",")
            }),
            _ => Err(OpError::domain(self.name(), "wrong number of arguments")),
        }
    }
}

/// Memoizing front end to the operators. Results are identical to direct
/// evaluation; the cache is safe to share between threads.
#[derive(Default)]
pub struct OperatorTable {
    memo: Mutex<HashMap<(Op, Vec<Ordinal>), Result<String, OpError>>>,
}

impl OperatorTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn eval(&self, op: Op, args: &[Ordinal]) -> Result<String, OpError> {
        let key = (op, args.to_vec());
        if let Some(v) = self.memo.lock().unwrap().get(&key) {
            return v.clone();
        }
        let v = op.eval(args);
        self.memo.lock().unwrap().insert(key, v.clone());
        v
    }

    pub fn len(&self) -> usize {
        self.memo.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// One line of the golden corpus: `op<TAB>args…<TAB>result`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldenRecord {
    pub op: Op,
    pub args: Vec<Ordinal>,
    /// A term, a bit, a comma-separated sequence, or `!undefined` /
    /// `!unsupported` / `!domain`.
    pub result: String,
}

fn render_result(r: Result<String, OpError>) -> String {
    match r {
        Ok(s) => s,
        Err(OpError::Undefined { .. }) => "!undefined".into(),
        Err(OpError::Unsupported { .. }) => "!unsupported".into(),
        Err(_) => "!domain".into(),
    }
}

impl GoldenRecord {
    pub fn compute(op: Op, args: Vec<Ordinal>) -> Self {
        let result = render_result(op.eval(&args));
        GoldenRecord { op, args, result }
    }

    pub fn to_line(&self) -> String {
        let mut cols = vec![self.op.name().to_string()];
        cols.extend(self.args.iter().map(|a| a.to_string()));
        cols.push(self.result.clone());
        cols.join("\t")
    }

    pub fn parse_line(line: &str) -> Result<Self, String> {
        let cols: Vec<&str> = line.split('\t').collect();
        let op = Op::from_name(cols[0]).ok_or_else(|| format!("unknown operator {}", cols[0]))?;
        if cols.len() != op.arity() + 2 {
            return Err(format!("expected {} columns", op.arity() + 2));
        }
        let args = cols[1..cols.len() - 1]
            .iter()
            .map(|s| s.parse::<Ordinal>().map_err(|e| e.to_string()))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(GoldenRecord {
            op,
            args,
            result: cols[cols.len() - 1].to_string(),
        })
    }

    /// Recomputes the record; `None` when it still matches.
    pub fn recheck(&self) -> Option<String> {
        let now = render_result(self.op.eval(&self.args));
        (now != self.result).then_some(now)
    }
}

/// The fixed seed corpus whose outputs are frozen as golden values.
pub fn seed_corpus() -> Vec<GoldenRecord> {
    let p = |s: &str| s.parse::<Ordinal>().expect("seed term");
    let taus = [
        "v[1]", "v[2]", "v[w]", "v[w+1]", "v[w*2+3]", "v[w^2+1]", "th_0(th_1(0))",
        "th_0(th_1(0)+1)", "th_0(th_1(0)+w)", "th_0(th_1(0)+w^2)", "th_0(th_1(0)+w^w)",
        "th_0(th_1(0)+th_0(th_1(0)))", "0", "1", "w",
    ];
    let xis = ["0", "1", "2", "w", "w+1", "w*2", "w^2", "w^2+w+3", "w^w", "v[1]"];
    let mut out = Vec::new();
    for t in taus {
        for op in [Op::Mu, Op::Lambda, Op::Bar] {
            out.push(GoldenRecord::compute(op, vec![p(t)]));
        }
        for x in xis {
            out.push(GoldenRecord::compute(Op::Chi, vec![p(t), p(x)]));
            out.push(GoldenRecord::compute(Op::Varrho, vec![p(t), p(x)]));
        }
    }
    for (a, b) in [
        ("v[1]", "v[1]"),
        ("v[1]", "v[1]*w"),
        ("v[1]", "w^(v[1]*2)"),
        ("th_0(th_1(0))", "th_0(th_1(0))*w"),
        ("1", "th_0(th_1(0)+th_0(th_1(0)))"),
    ] {
        out.push(GoldenRecord::compute(Op::Localize, vec![p(a), p(b)]));
    }
    out
}
