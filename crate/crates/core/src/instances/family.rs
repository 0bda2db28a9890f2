use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::generators::*;
use super::{Certificate, Instance};
use crate::error::{domain, Error, Result};
use crate::grid::{ConvexSubgrid, GridKind, Node};

/// Named instance generators, as used by the CLI and sweep specs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    RandomPerm,
    LineAdversarial,
    XAdversarial,
    RCentral,
    RectangleLk,
    LkLine,
    LkAdversarial,
    RandomLk,
}

impl Family {
    pub const ALL: [Family; 8] = [
        Family::RandomPerm,
        Family::LineAdversarial,
        Family::XAdversarial,
        Family::RCentral,
        Family::RectangleLk,
        Family::LkLine,
        Family::LkAdversarial,
        Family::RandomLk,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::RandomPerm => "random_perm",
            Family::LineAdversarial => "line_adversarial",
            Family::XAdversarial => "x_adversarial",
            Family::RCentral => "r_central",
            Family::RectangleLk => "rectangle_lk",
            Family::LkLine => "lk_line",
            Family::LkAdversarial => "lk_adversarial",
            Family::RandomLk => "random_lk",
        }
    }

    /// Families whose worst case the (ℓ,k) lemma bounds describe.
    pub fn is_lk_adversarial(self) -> bool {
        matches!(self, Family::LkLine | Family::LkAdversarial | Family::RectangleLk)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Family::ALL.into_iter().find(|f| f.name() == s).ok_or_else(|| Error::Domain(format!("unknown family `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyParams {
    pub kind: GridKind,
    /// Window size for random families: side of the rectangle/rhombus, or ball radius on the honeycomb.
    pub size: i64,
    pub l_max: u64,
    pub l: u64,
    pub k: u64,
    pub r: i64,
    pub seed: u64,
}

impl Default for FamilyParams {
    fn default() -> Self {
        FamilyParams { kind: GridKind::Triangular, size: 8, l_max: 4, l: 1, k: 1, r: 2, seed: 0 }
    }
}

impl FamilyParams {
    /// Window used by the random families.
    pub fn window(&self) -> ConvexSubgrid {
        match self.kind {
            GridKind::Hexagonal => ConvexSubgrid::ball(self.kind, Node::hex(0, 0, 0), self.size),
            _ => ConvexSubgrid::rect(self.kind, 0, 0, self.size, self.size),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Generated {
    pub instance: Instance,
    pub certificates: Vec<Certificate>,
}

pub fn generate(family: Family, p: &FamilyParams) -> Result<Generated> {
    let plain = |instance: Instance| Generated { instance, certificates: Vec::new() };
    let with = |(instance, certificates): (Instance, Vec<Certificate>)| Generated { instance, certificates };
    Ok(match family {
        Family::RandomPerm => plain(gen_random_permutation(&p.window(), p.seed)?),
        Family::RandomLk => plain(gen_random_lk(&p.window(), p.l as u32, p.k as u32, p.seed)?),
        Family::LineAdversarial => {
            if p.kind != GridKind::Triangular {
                return domain("line_adversarial is defined on the triangular grid");
            }
            with(gen_line_adversarial_tri(p.l_max)?)
        }
        Family::XAdversarial => {
            if p.kind != GridKind::Hexagonal {
                return domain("x_adversarial is defined on the hexagonal grid");
            }
            with(gen_x_adversarial_hex(p.l_max)?)
        }
        Family::RCentral => {
            let instance = gen_r_central(p.kind, p.r)?;
            let cut = r_central_cut(p.kind, Node::new(0, 0));
            let value = crate::analysis::bisection_bound(&instance, &cut, instance.duplex)?;
            let cert = Certificate::new(super::CertificateKind::Bisection, instance.duplex, p.kind, &cut, value);
            Generated { instance, certificates: vec![cert] }
        }
        Family::RectangleLk => {
            let (instance, certificates, _) = gen_rectangle_lk(p.kind, p.l, p.k, p.l_max)?;
            Generated { instance, certificates }
        }
        Family::LkLine => with(gen_lk_line(p.kind, p.l, p.k, p.l_max)?),
        Family::LkAdversarial => with(gen_lk_adversarial(p.kind, p.l, p.k, p.l_max)?),
    })
}
