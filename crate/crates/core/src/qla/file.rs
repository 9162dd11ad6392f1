//! QLA definition files.
//!
//! ```text
//! dim 2
//! parities even odd          # optional, default all even
//! sigma = superperm          # or sparse entries: sigma k1 k2 i1 i2 = coeff
//! c 2 1 2 = 1                # C^k_{ij}: c k i j = coeff
//! phi = explicit             # superperm | sigma | explicit
//! phi 1 1 1 1 = 1            # phi k1 k2 i1 i2 = coeff
//! ```
//!
//! Indices are 1-based, upper indices first. Absent entries are zero.

use super::{super_permutation, QlaData, QlaError, Tensor, TwistData};
use crate::ope::Parity;
use crate::syntax::{parse_scalar, ParseError};

#[derive(Clone, Debug, PartialEq)]
pub struct QlaFile {
    pub data: QlaData,
    pub twist: TwistData,
}

pub const BUNDLED: [(&str, &str); 3] = [
    ("so3", include_str!("../../data/so3.qla")),
    ("super_ef", include_str!("../../data/super_ef.qla")),
    ("lyubashenko", include_str!("../../data/lyubashenko.qla")),
];

pub fn bundled(name: &str) -> Option<QlaFile> {
    BUNDLED
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, src)| parse_qla(src).expect("bundled QLA file parses"))
}

enum PhiChoice {
    SuperPerm,
    Sigma,
    Explicit,
}

pub fn parse_qla(src: &str) -> Result<QlaFile, QlaError> {
    let mut n: Option<usize> = None;
    let mut parities: Option<Vec<Parity>> = None;
    let mut sigma_superperm = false;
    let mut phi_choice: Option<PhiChoice> = None;
    let mut entries: Vec<(usize, &str, Vec<usize>, String)> = Vec::new();

    for (idx, raw) in src.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let err = |m: String| QlaError::Parse(ParseError::new(line, 1, m));
        let (kw, rest) = body.split_once(char::is_whitespace).unwrap_or((body, ""));
        let rest = rest.trim();
        match kw {
            "dim" => {
                let d: usize = rest.parse().map_err(|_| err(format!("bad dimension '{rest}'")))?;
                if d == 0 {
                    return Err(err("dimension must be positive".into()));
                }
                n = Some(d);
            }
            "parities" => {
                let ps = rest
                    .split_whitespace()
                    .map(|p| match p {
                        "even" => Ok(Parity::Even),
                        "odd" => Ok(Parity::Odd),
                        _ => Err(err(format!("unknown parity '{p}'"))),
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                parities = Some(ps);
            }
            "sigma" | "c" | "phi" => {
                if let Some(choice) = rest.strip_prefix('=') {
                    let choice = choice.trim();
                    match (kw, choice) {
                        ("sigma", "superperm") => sigma_superperm = true,
                        ("phi", "superperm") => phi_choice = Some(PhiChoice::SuperPerm),
                        ("phi", "sigma") => phi_choice = Some(PhiChoice::Sigma),
                        ("phi", "explicit") => phi_choice = Some(PhiChoice::Explicit),
                        _ => return Err(err(format!("unknown choice '{kw} = {choice}'"))),
                    }
                    continue;
                }
                let (idx, coeff) = rest
                    .split_once('=')
                    .ok_or_else(|| err(format!("expected '{kw} INDICES = COEFF'")))?;
                let want = if kw == "c" { 3 } else { 4 };
                let ix = idx
                    .split_whitespace()
                    .map(|t| t.parse::<usize>().map_err(|_| err(format!("bad index '{t}'"))))
                    .collect::<Result<Vec<_>, _>>()?;
                if ix.len() != want {
                    return Err(err(format!("'{kw}' takes {want} indices")));
                }
                entries.push((line, kw, ix, coeff.trim().to_string()));
            }
            _ => return Err(err(format!("unknown keyword '{kw}'"))),
        }
    }

    let n = n.ok_or_else(|| QlaError::Parse(ParseError::new(1, 1, "missing 'dim'")))?;
    let parities = parities.unwrap_or_else(|| vec![Parity::Even; n]);
    if parities.len() != n {
        return Err(QlaError::Parse(ParseError::new(1, 1, format!("expected {n} parities"))));
    }
    let mut sigma = if sigma_superperm {
        super_permutation(&parities)
    } else {
        Tensor::zeros(n, 2, 2)
    };
    let mut c = Tensor::zeros(n, 1, 2);
    let mut phi = Tensor::zeros(n, 2, 2);
    let explicit_phi = matches!(phi_choice, Some(PhiChoice::Explicit));
    for (line, kw, ix, coeff) in entries {
        let err = |m: String| QlaError::Parse(ParseError::new(line, 1, m));
        if ix.iter().any(|&i| i == 0 || i > n) {
            return Err(err(format!("index out of range 1..={n}")));
        }
        let ix: Vec<usize> = ix.iter().map(|i| i - 1).collect();
        let v = parse_scalar(&coeff, &[], true).map_err(|e| err(e.msg))?;
        let (target, up) = match kw {
            "sigma" if sigma_superperm => return Err(err("sigma entries conflict with 'sigma = superperm'".into())),
            "sigma" => (&mut sigma, 2),
            "c" => (&mut c, 1),
            _ if !explicit_phi => return Err(err("phi entries need 'phi = explicit'".into())),
            _ => (&mut phi, 2),
        };
        target.set(&ix[..up], &ix[up..], v);
    }
    let phi = match phi_choice {
        None => return Err(QlaError::Parse(ParseError::new(1, 1, "missing 'phi = ...'"))),
        Some(PhiChoice::SuperPerm) => super_permutation(&parities),
        Some(PhiChoice::Sigma) => sigma.clone(),
        Some(PhiChoice::Explicit) => phi,
    };
    Ok(QlaFile {
        data: QlaData::new(parities, sigma, c)?,
        twist: TwistData::new(phi)?,
    })
}
