//! Built-in normal forms: the Abel equation `u' = u³ − z`, Painlevé I, and
//! two normalizations of Painlevé II.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{Float, Zero};

use super::maps::{CoordinateMap, MapKind};
use super::NormalSystem;
use crate::error::{Error, Result};
use crate::series::{AnalyticGerm, DEFAULT_DEGREE_CAP};
use crate::C64;

/// Parsed builtin identifier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BuiltinLabel {
    Abel,
    P1,
    /// Normalization around `y ~ −ν/x`, parameter `ν`.
    P2a(f64),
    /// Normalization around `y ~ ±sqrt(−x/2)`, parameter `ν` and root signs of `A`, `B`.
    P2b { nu: f64, a_sign: f64, b_sign: f64 },
}

/// Accepts `abel`, `p1`, `p2a`, `p2a(ν)`, `p2a:ν`, `p2b`, `p2b(ν)`, `p2b:ν`,
/// and `p2b:ν:±:±` for the signs of `B` and `A`.
pub fn parse_label(label: &str) -> Result<BuiltinLabel> {
    let l = label.trim();
    let unknown = || Error::UnknownLabel(String::from(label));
    let (head, params): (&str, Vec<&str>) = if let Some(open) = l.find('(') {
        let inner = l[open + 1..].strip_suffix(')').ok_or_else(unknown)?;
        (&l[..open], inner.split(',').map(str::trim).collect())
    } else if let Some(colon) = l.find(':') {
        (&l[..colon], l[colon + 1..].split(':').map(str::trim).collect())
    } else {
        (l, Vec::new())
    };
    let num = |s: &str| s.parse::<f64>().map_err(|_| unknown());
    let sign = |s: &str| match s {
        "+" | "+1" | "1" => Ok(1.0),
        "-" | "-1" => Ok(-1.0),
        _ => Err(unknown()),
    };
    match (head, params.len()) {
        ("abel", 0) => Ok(BuiltinLabel::Abel),
        ("p1", 0) => Ok(BuiltinLabel::P1),
        ("p2a", 0) => Ok(BuiltinLabel::P2a(0.0)),
        ("p2a", 1) => Ok(BuiltinLabel::P2a(num(params[0])?)),
        ("p2b", 0) => Ok(BuiltinLabel::P2b { nu: 0.0, a_sign: 1.0, b_sign: 1.0 }),
        ("p2b", 1) => Ok(BuiltinLabel::P2b { nu: num(params[0])?, a_sign: 1.0, b_sign: 1.0 }),
        ("p2b", 3) => Ok(BuiltinLabel::P2b {
            nu: num(params[0])?,
            b_sign: sign(params[1])?,
            a_sign: sign(params[2])?,
        }),
        _ => Err(unknown()),
    }
}

fn r(v: f64) -> C64 {
    C64::new(v, 0.0)
}

/// Normal form and coordinate map for a builtin label.
pub fn builtin(label: &str) -> Result<(NormalSystem, CoordinateMap)> {
    match parse_label(label)? {
        BuiltinLabel::Abel => Ok((abel()?, CoordinateMap::new("abel", MapKind::Abel, 0))),
        BuiltinLabel::P1 => Ok((p1()?, CoordinateMap::new("p1", MapKind::P1, 0))),
        BuiltinLabel::P2a(nu) => Ok((p2a(nu)?, CoordinateMap::new(&format!("p2a({nu})"), MapKind::P2a { nu }, 0))),
        BuiltinLabel::P2b { nu, a_sign, b_sign } => {
            let (sys, a, b) = p2b(nu, a_sign, b_sign)?;
            Ok((sys, CoordinateMap::new(&format!("p2b({nu})"), MapKind::P2b { nu, a, b }, 0)))
        }
    }
}

/// `h' + h/(5x) + 3h³ − 1/9 = 0` shifted by `h = y + 1/3 − 1/(15x)`.
fn abel() -> Result<NormalSystem> {
    let g = AnalyticGerm::new(1, DEFAULT_DEGREE_CAP)
        .with_term(0, &[2], -3.0)?
        .with_term(0, &[3], -3.0)?
        .with_term(1, &[2], 3.0 / 5.0)?
        .with_term(2, &[0], -1.0 / 15.0)?
        .with_term(2, &[1], -1.0 / 25.0)?
        .with_term(3, &[0], 1.0 / 1125.0)?;
    NormalSystem::new("abel", vec![r(1.0)], vec![r(0.2)], vec![g], vec![r(1.0)])
}

/// Term `c z^i h^p` of the forcing in `h'' = −h'/x + h + P(1/x, h)`.
struct Forcing {
    i: u32,
    p: u32,
    c: C64,
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// Diagonalizes `h'' = −h'/x + h + P` with `v₁ = (h − h')/2`, `v₂ = (h + h')/2`.
///
/// The diagonal `z·v_j` coefficients become `α_j`; everything else stays in `g`.
fn second_order(label: &str, forcing: &[Forcing]) -> Result<NormalSystem> {
    let half = r(0.5);
    let mut g1 = AnalyticGerm::new(2, DEFAULT_DEGREE_CAP);
    let mut g2 = AnalyticGerm::new(2, DEFAULT_DEGREE_CAP);
    g1.add_term(1, vec![0, 1], half)?;
    g1.add_term(1, vec![1, 0], -half)?;
    g2.add_term(1, vec![1, 0], half)?;
    g2.add_term(1, vec![0, 1], -half)?;
    for f in forcing {
        for a in 0..=f.p {
            let c = f.c * binomial(f.p, a) * 0.5;
            g1.add_term(f.i, vec![a, f.p - a], -c)?;
            g2.add_term(f.i, vec![a, f.p - a], c)?;
        }
    }
    let a1 = g1.coeff(1, &[1, 0]);
    let a2 = g2.coeff(1, &[0, 1]);
    g1.add_term(1, vec![1, 0], -a1)?;
    g2.add_term(1, vec![0, 1], -a2)?;
    NormalSystem::new(label, vec![r(1.0), r(-1.0)], vec![a1, a2], vec![g1, g2], vec![r(1.0), r(1.0)])
}

/// `h'' + h'/x − h − h²/2 − 392/(625x⁴) = 0`.
fn p1() -> Result<NormalSystem> {
    second_order(
        "p1",
        &[Forcing { i: 0, p: 2, c: r(0.5) }, Forcing { i: 4, p: 0, c: r(392.0 / 625.0) }],
    )
}

fn p2a(nu: f64) -> Result<NormalSystem> {
    let terms: Vec<Forcing> = vec![
        Forcing { i: 2, p: 1, c: r((24.0 * nu * nu + 1.0) / 9.0) },
        Forcing { i: 0, p: 3, c: r(8.0 / 9.0) },
        Forcing { i: 1, p: 2, c: r(-8.0 * nu / 3.0) },
        Forcing { i: 3, p: 0, c: r(-8.0 * (nu * nu * nu - nu) / 9.0) },
    ];
    let terms: Vec<Forcing> = terms.into_iter().filter(|f| !f.c.is_zero()).collect();
    second_order(&format!("p2a({nu})"), &terms)
}

/// Returns the system together with the chosen `A` (`A² = −9/8`) and `B` (`B² = −1/2`).
fn p2b(nu: f64, a_sign: f64, b_sign: f64) -> Result<(NormalSystem, C64, C64)> {
    let a = C64::new(0.0, a_sign * 3.0 / (2.0 * 2.0.sqrt()));
    let b = C64::new(0.0, b_sign / 2.0.sqrt());
    let kappa = b * (3.0 * nu) / a;
    let s = 1.0 + 6.0 * nu * nu;
    let terms: Vec<Forcing> = vec![
        Forcing { i: 1, p: 1, c: kappa },
        Forcing { i: 2, p: 1, c: r(s / 9.0) },
        Forcing { i: 0, p: 2, c: b * 3.0 },
        Forcing { i: 1, p: 2, c: -(a.inv()) * (1.5 * nu) },
        Forcing { i: 0, p: 3, c: r(-1.0) },
        Forcing { i: 2, p: 0, c: -b * (s / 9.0) },
        Forcing { i: 3, p: 0, c: -(a * 9.0).inv() * (nu * (nu * nu - 4.0)) },
    ];
    let terms: Vec<Forcing> = terms.into_iter().filter(|f| !f.c.is_zero()).collect();
    Ok((second_order(&format!("p2b({nu})"), &terms)?, a, b))
}
