//! The enumeration functions κ^α⃗ and ν^α⃗ and the padding function dp_α⃗.
//!
//! An empty context stands for the global functions. On additive principal
//! indices these delegate to the υ-segment context of the index.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use crate::error::OpError;
use crate::fine::{chi_check, lambda_op, lambda_rel, mu, varrho};
use crate::notation::split_limit;
use crate::ord::Ordinal;
use crate::ts::{eval_o_ts, is_lambda_rs, TrackingSequence};

/// A λ-RS sequence α⃗ together with its derived data.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EnumContext {
    avec: Vec<Ordinal>,
    /// Length of the υ-prefix of α⃗.
    m: usize,
    /// α_0 = 1+υ_{λ+m}.
    alpha0: Ordinal,
    /// True for the global functions; false for a segment-local empty α⃗.
    global: bool,
}

impl EnumContext {
    pub fn global() -> Self {
        EnumContext {
            avec: Vec::new(),
            m: 0,
            alpha0: Ordinal::one(),
            global: true,
        }
    }

    /// Context for a nonempty α⃗ ∈ λ-RS; the empty sequence yields the
    /// global context.
    pub fn new(avec: &[Ordinal]) -> Result<Self, OpError> {
        if avec.is_empty() {
            return Ok(Self::global());
        }
        let w = is_lambda_rs(avec)?
            .ok_or_else(|| OpError::domain("kappa", format!("{avec:?} ∉ λ-RS")))?;
        let floor = Ordinal::upsilon(&w.lambda.add(&Ordinal::nat(w.prefix_len)))?;
        Ok(EnumContext {
            avec: avec.to_vec(),
            m: w.prefix_len as usize,
            alpha0: Ordinal::one().add(&floor),
            global: false,
        })
    }

    /// The segment context for a principal β: (λ, m) lexicographically
    /// least with β ≤ υ_{λ+m+1}, α⃗ = (υ_{λ+1},…,υ_{λ+m}).
    fn segment_of(beta: &Ordinal) -> Result<Self, OpError> {
        let (lambda, m) = least_upsilon_bound(beta)?;
        let avec: Vec<Ordinal> = (1..=m)
            .map(|k| Ordinal::upsilon(&lambda.add(&Ordinal::nat(k))))
            .collect::<Result<_, _>>()?;
        let floor = Ordinal::upsilon(&lambda.add(&Ordinal::nat(m)))?;
        Ok(EnumContext {
            avec,
            m: m as usize,
            alpha0: Ordinal::one().add(&floor),
            global: false,
        })
    }

    pub fn avec(&self) -> &[Ordinal] {
        &self.avec
    }

    pub fn is_global(&self) -> bool {
        self.global
    }

    pub fn alpha0(&self) -> &Ordinal {
        &self.alpha0
    }

    /// α_n, or α_0 when α⃗ is empty.
    pub fn last(&self) -> &Ordinal {
        self.avec.last().unwrap_or(&self.alpha0)
    }

    /// Number of non-υ entries α_1,…,α_n.
    fn tail_len(&self) -> usize {
        self.avec.len() - self.m
    }

    /// α_i counted after the υ-prefix, α_0 being 1+υ_{λ+m}.
    fn alpha(&self, i: usize) -> &Ordinal {
        if i == 0 {
            &self.alpha0
        } else {
            &self.avec[self.m + i - 1]
        }
    }

    /// ο(α⃗) for nonempty α⃗.
    pub fn o_avec(&self) -> Result<Ordinal, OpError> {
        let s = TrackingSequence::new(self.avec.clone())
            .ok_or_else(|| OpError::domain("nu", "empty context"))?;
        eval_o_ts(&s)
    }

    /// The context for α⃗ with its last entry removed.
    fn drop_last(&self) -> Result<Self, OpError> {
        Self::new(&self.avec[..self.avec.len() - 1])
    }

    /// Upper end of dom(κ^α⃗): λ_{α_n}, or υ_1 for the empty segment at 0.
    fn kappa_bound(&self) -> Result<Ordinal, OpError> {
        let last = self.last();
        if last.is_one() {
            return Ok(Ordinal::upsilon(&Ordinal::one())?);
        }
        lambda_op(last)
    }
}

/// (λ, m) lexicographically least with β ≤ υ_{λ+m+1}.
pub fn least_upsilon_bound(beta: &Ordinal) -> Result<(Ordinal, u64), OpError> {
    let iota = crate::notation::upsilon_floor(beta)?;
    // β ≤ υ_{ι+1} always; β = υ_ι with ι a successor also fits υ_{(ι-1)+1}.
    let target = if Ordinal::upsilon(&iota)? == *beta && iota.is_successor() {
        iota.pred().unwrap()
    } else {
        iota
    };
    Ok(split_limit(&target))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Fn3 {
    Kappa,
    Dp,
    Nu,
}

type Key = (Fn3, EnumContext, Ordinal);

fn memo() -> &'static Mutex<HashMap<Key, Result<Ordinal, OpError>>> {
    static M: OnceLock<Mutex<HashMap<Key, Result<Ordinal, OpError>>>> = OnceLock::new();
    M.get_or_init(Default::default)
}

fn cached(
    f: Fn3,
    ctx: &EnumContext,
    beta: &Ordinal,
    compute: impl FnOnce() -> Result<Ordinal, OpError>,
) -> Result<Ordinal, OpError> {
    let key = (f, ctx.clone(), beta.clone());
    if let Some(v) = memo().lock().unwrap().get(&key) {
        return v.clone();
    }
    let v = compute();
    memo().lock().unwrap().insert(key, v.clone());
    v
}

/// Splits β =NF γ+δ with δ = end(β).
fn split_end(beta: &Ordinal) -> (Ordinal, Ordinal) {
    let mut parts = beta.anf();
    let d = parts.pop().expect("nonzero");
    (Ordinal::sum_of(parts), d)
}

/// κ^α⃗_β.
pub fn kappa(ctx: &EnumContext, beta: &Ordinal) -> Result<Ordinal, OpError> {
    cached(Fn3::Kappa, ctx, beta, || kappa_uncached(ctx, beta))
}

fn kappa_uncached(ctx: &EnumContext, beta: &Ordinal) -> Result<Ordinal, OpError> {
    if beta.is_zero() || beta.is_one() {
        return Ok(beta.clone());
    }
    if !beta.is_countable() {
        return Err(OpError::domain("kappa", format!("{beta} is uncountable")));
    }
    if !beta.is_principal() {
        let (g, d) = split_end(beta);
        return Ok(kappa(ctx, &g)?.add(&dp(ctx, &g)?).add(&kappa(ctx, &d)?));
    }
    if ctx.global {
        return kappa_principal(&EnumContext::segment_of(beta)?, beta);
    }
    kappa_principal(ctx, beta)
}

fn kappa_principal(ctx: &EnumContext, beta: &Ordinal) -> Result<Ordinal, OpError> {
    let bound = ctx.kappa_bound()?;
    if *beta > bound {
        return Err(OpError::domain("kappa", format!("{beta} > {bound}")));
    }
    let an = ctx.last();
    let gvec: Vec<Ordinal> = if beta <= an {
        let n = ctx.tail_len();
        match (0..n).rev().find(|&i| ctx.alpha(i) < beta) {
            Some(i) if n > 0 => ctx.avec[..ctx.m + i].to_vec(),
            _ => {
                let (xi, l) = least_upsilon_bound(beta)?;
                (1..=l)
                    .map(|k| Ordinal::upsilon(&xi.add(&Ordinal::nat(k))))
                    .collect::<Result<_, _>>()?
            }
        }
    } else {
        ctx.avec.clone()
    };
    if gvec.is_empty() {
        return eval_o_ts(&TrackingSequence::single(beta.clone()));
    }
    let f = beta.mnf()?;
    if f.len() > 1 && f[0] == *gvec.last().unwrap() {
        let rest = Ordinal::left_div(&f[0], beta)?;
        let head = eval_o_ts(&TrackingSequence::new(gvec).unwrap())?;
        return Ok(head.mul(&rest));
    }
    let mut s = gvec;
    s.push(beta.clone());
    eval_o_ts(&TrackingSequence::new(s).unwrap())
}

/// dp_α⃗(β).
pub fn dp(ctx: &EnumContext, beta: &Ordinal) -> Result<Ordinal, OpError> {
    cached(Fn3::Dp, ctx, beta, || dp_uncached(ctx, beta))
}

fn dp_uncached(ctx: &EnumContext, beta: &Ordinal) -> Result<Ordinal, OpError> {
    if beta.is_zero() || beta.is_one() {
        return Ok(Ordinal::zero());
    }
    if !beta.is_countable() {
        return Err(OpError::domain("dp", format!("{beta} is uncountable")));
    }
    if ctx.global && beta.is_upsilon() {
        return Ok(Ordinal::zero());
    }
    if !ctx.global && !ctx.avec.is_empty() && beta == ctx.last() {
        return Ok(Ordinal::zero());
    }
    if !beta.is_principal() {
        return dp(ctx, &beta.end());
    }
    if ctx.global {
        return dp_principal(&EnumContext::segment_of(beta)?, beta);
    }
    dp_principal(ctx, beta)
}

fn dp_principal(ctx: &EnumContext, beta: &Ordinal) -> Result<Ordinal, OpError> {
    let an = ctx.last().clone();
    if *beta == an && !ctx.avec.is_empty() {
        return Ok(Ordinal::zero());
    }
    // Recursive calls on a segment-local empty α⃗ go back to the global functions.
    let here = if ctx.avec.is_empty() {
        EnumContext::global()
    } else {
        ctx.clone()
    };
    if *beta < an {
        if ctx.avec.is_empty() {
            return dp(&here, beta);
        }
        return dp(&ctx.drop_last()?, beta);
    }
    if !beta.is_epsilon() {
        let g = Ordinal::left_div(&an, beta)?;
        let mut acc = Ordinal::zero();
        for gi in g.log()?.anf() {
            acc = acc.add(&kappa(&here, &gi)?).add(&dp(&here, &gi)?);
        }
        return Ok(acc);
    }
    let mut gvec = ctx.avec.clone();
    gvec.push(beta.clone());
    let gctx = EnumContext::new(&gvec)?;
    let mu_b = mu(beta, Some(&an))?;
    let lam_b = lambda_rel(beta, &an)?;
    Ok(nu(&gctx, &mu_b)?
        .add(&kappa(&gctx, &lam_b)?)
        .add(&dp(&gctx, &lam_b)?))
}

/// ν^α⃗_β for nonempty α⃗ and β ≤ μ_{α_n}.
pub fn nu(ctx: &EnumContext, beta: &Ordinal) -> Result<Ordinal, OpError> {
    cached(Fn3::Nu, ctx, beta, || nu_uncached(ctx, beta))
}

fn nu_uncached(ctx: &EnumContext, beta: &Ordinal) -> Result<Ordinal, OpError> {
    if ctx.avec.is_empty() {
        return Err(OpError::domain("nu", "ν needs a nonempty α⃗"));
    }
    let an = ctx.last().clone();
    let bound = mu(&an, None)?;
    if *beta > bound {
        return Err(OpError::domain("nu", format!("{beta} > μ = {bound}")));
    }
    let alpha = ctx.o_avec()?;
    if beta.is_zero() {
        return Ok(alpha);
    }
    if beta.is_principal() && !beta.is_one() {
        let mut s = ctx.avec.clone();
        s.push(beta.clone());
        return eval_o_ts(&TrackingSequence::new(s).unwrap());
    }
    if let Some(g) = beta.pred() {
        let r = varrho(&an, &g)?;
        let tail = if chi_check(&an, &g)?.0 {
            alpha
        } else {
            Ordinal::zero()
        };
        return Ok(nu(ctx, &g)?
            .add(&kappa(ctx, &r)?)
            .add(&dp(ctx, &r)?)
            .add(&tail));
    }
    let (g, d) = split_end(beta);
    let r = varrho(&an, &g)?;
    Ok(nu(ctx, &g)?
        .add(&kappa(ctx, &r)?)
        .add(&dp(ctx, &r)?)
        .add(&nu(ctx, &d)?))
}

/// Global κ.
pub fn kappa_global(beta: &Ordinal) -> Result<Ordinal, OpError> {
    kappa(&EnumContext::global(), beta)
}

/// Global dp.
pub fn dp_global(beta: &Ordinal) -> Result<Ordinal, OpError> {
    dp(&EnumContext::global(), beta)
}
