//! Leading-order closed forms for mean degree, diameter and payload of each
//! topology, all in natural-log form with `L = log2 N` taken as real.

use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::error::{NipError, Result};
use crate::logp::Prob;
use crate::nip::{Method, NipReport};
use crate::topology::{default_window, Topology};

/// Log components of the estimate on `n` nodes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AsymptoticTerms {
    pub rho: f64,
    pub kappa: f64,
    pub ln_ip: f64,
}

impl AsymptoticTerms {
    pub fn ln_nip(&self) -> f64 {
        self.ln_ip - self.rho.ln() - self.kappa.ln()
    }
}

/// `ln((N-2)! / (N-L)!)`
fn ln_falling(n: f64, l: f64) -> f64 {
    ln_gamma(n - 1.0) - ln_gamma(n - l + 1.0)
}

/// Closed-form terms for real `n >= 2`. The bare ring has no closed form.
pub fn asymptotic_terms(t: Topology, n: f64, w: f64, refined_star: bool) -> Result<AsymptoticTerms> {
    let l = n.log2();
    let ln_n = n.ln();
    let (rho, kappa, ln_ip) = match t {
        Topology::Complete => (n, 1.0, -ln_n),
        Topology::ErRandom => (l, l, ln_falling(n, l) - l * ln_n),
        Topology::Tree => (1.0, l, -9f64.log2() * ln_n),
        Topology::Star if refined_star => (1.0, 1.0, -2.0 * ln_n),
        Topology::Star => (1.0, 1.0, -ln_n),
        Topology::RingEr => (l + w, l, ln_falling(n, l) - l * (n + w / l).ln()),
        Topology::Longformer => (w, 1.0, -ln_n - w.ln()),
        Topology::BigBird => (l + w, 1.0, -ln_n - (l + w).ln()),
        Topology::Hypercube => (l, l, ln_gamma(l + 1.0) - l * l.ln()),
        Topology::RingLattice => {
            return Err(NipError::UnsupportedFamily(
                "ring lattice has no closed-form estimate".into(),
            ))
        }
    };
    Ok(AsymptoticTerms { rho, kappa, ln_ip })
}

fn window_or_default(t: Topology, n: usize, w: Option<usize>) -> Result<usize> {
    let w = w.unwrap_or_else(|| default_window(n));
    if t.uses_window() && (w % 2 == 1 || w == 0) {
        return Err(NipError::OddWindow { w });
    }
    if t.uses_window() && w >= n {
        return Err(NipError::WindowOutOfRange { w, n });
    }
    Ok(w)
}

/// Closed-form estimate of NIP on `n >= 4` tokens. `w` defaults to
/// [`default_window`]. The report's `ln_nip` is authoritative.
pub fn asymptotic_nip(
    t: Topology,
    n: usize,
    w: Option<usize>,
    refined_star: bool,
) -> Result<NipReport> {
    if n < 4 {
        return Err(NipError::TooSmall { n, min: 4 });
    }
    let w = window_or_default(t, n, w)?;
    let terms = asymptotic_terms(t, n as f64, w as f64, refined_star)?;
    let ip = Prob::from_ln(terms.ln_ip);
    let nip = Prob::from_ln(terms.ln_nip());
    Ok(NipReport {
        family: t.name().to_string(),
        n,
        method: Method::Asymptotic,
        rho: terms.rho,
        kappa: terms.kappa,
        cc: terms.rho * terms.kappa,
        ip: ip.linear,
        ln_ip: ip.ln,
        nip: nip.linear,
        ln_nip: nip.ln,
        refined: refined_star && t.has_hub(),
        argmin_pair: None,
        samples: 0,
        asymmetric: false,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioRow {
    pub family: Topology,
    pub ln_ratio: f64,
    pub ratio: f64,
}

/// Closed-form NIP of every scored topology relative to the complete graph.
pub fn nip_ratio_table(n: usize, w: Option<usize>, refined_star: bool) -> Result<Vec<RatioRow>> {
    if !n.is_power_of_two() {
        return Err(NipError::NonPowerOfTwo { n });
    }
    let base = asymptotic_nip(Topology::Complete, n, w, refined_star)?.ln_nip;
    Topology::SCORED
        .iter()
        .map(|&t| {
            let ln_ratio = asymptotic_nip(t, n, w, refined_star)?.ln_nip - base;
            Ok(RatioRow {
                family: t,
                ln_ratio,
                ratio: ln_ratio.exp(),
            })
        })
        .collect()
}

/// Hop depth of the unblocked pattern on `n0` tokens, the exponent in the
/// block scaling law.
pub fn scaling_depth(t: Topology, n0: usize) -> f64 {
    let l = (n0 as f64).log2();
    match t {
        Topology::Complete => 1.0,
        Topology::Star | Topology::Longformer | Topology::BigBird => 2.0,
        Topology::Tree => 2.0 * l,
        Topology::ErRandom | Topology::RingEr | Topology::RingLattice | Topology::Hypercube => l,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BlockScaled {
    pub n0: usize,
    pub b: usize,
    pub depth: f64,
    pub nip: f64,
    pub ln_nip: f64,
}

/// NIP of the pattern on `n0` tokens grouped into blocks of `b`: the
/// closed form on `n0/b` nodes divided by `b^(depth + 1)`.
pub fn block_scaled_nip(
    t: Topology,
    n0: usize,
    b: usize,
    w: Option<usize>,
    refined_star: bool,
) -> Result<BlockScaled> {
    if b == 0 || !n0.is_multiple_of(b) || n0 / b < 2 {
        return Err(NipError::IndivisibleBlock { n: n0, b });
    }
    let m = n0 / b;
    let w = window_or_default(t, n0, w)?;
    // The window is counted in tokens; the reduced graph sees it in blocks.
    let w_blocks = (w as f64 / b as f64).max(1.0);
    let depth = scaling_depth(t, n0);
    let ln_nip = if b == 1 {
        asymptotic_terms(t, n0 as f64, w as f64, refined_star)?.ln_nip()
    } else {
        asymptotic_terms(t, m as f64, w_blocks, refined_star)?.ln_nip()
            - (depth + 1.0) * (b as f64).ln()
    };
    Ok(BlockScaled {
        n0,
        b,
        depth,
        nip: Prob::from_ln(ln_nip).linear,
        ln_nip,
    })
}
