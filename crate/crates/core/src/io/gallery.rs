//! Small worked-example atlases used throughout the tests and the CLI.

use num_integer::Integer;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::atlas::{Atlas, AtlasParts, Chart, Embedding, OracleSpec};
use crate::error::{Error, Result};
use crate::numerics::{AffineMap, Ball, CycNum, PointC};

/// Rotation orders the gallery accepts.
pub const SUPPORTED_ORDERS: [u32; 7] = [1, 2, 3, 4, 6, 8, 12];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GalleryName {
    Cone,
    Football,
    Teardrop,
    GlobalQuotient,
    Point,
}

impl std::str::FromStr for GalleryName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "cone" => GalleryName::Cone,
            "football" => GalleryName::Football,
            "teardrop" => GalleryName::Teardrop,
            "global_quotient" => GalleryName::GlobalQuotient,
            "point" => GalleryName::Point,
            _ => return Err(Error::UnsupportedParams(format!("unknown gallery atlas {s:?}"))),
        })
    }
}

/// `p` is the cone order (north pole for football/teardrop, group order for
/// global_quotient), `q` the south pole order, `dim` the dimension of a global
/// quotient, `radius` the chart radius for cones or the bridge radius otherwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GalleryParams {
    pub name: GalleryName,
    pub p: u32,
    pub q: u32,
    pub dim: usize,
    pub radius: Option<BigRational>,
}

impl GalleryParams {
    pub fn new(name: GalleryName) -> Self {
        GalleryParams {
            name,
            p: 1,
            q: 1,
            dim: 1,
            radius: None,
        }
    }

    pub fn cone(p: u32) -> Self {
        GalleryParams { p, ..Self::new(GalleryName::Cone) }
    }

    pub fn football(p: u32, q: u32) -> Self {
        GalleryParams {
            p,
            q,
            ..Self::new(GalleryName::Football)
        }
    }

    pub fn teardrop(p: u32) -> Self {
        GalleryParams { p, ..Self::new(GalleryName::Teardrop) }
    }

    pub fn global_quotient(order: u32, dim: usize) -> Self {
        GalleryParams {
            p: order,
            dim,
            ..Self::new(GalleryName::GlobalQuotient)
        }
    }

    pub fn point() -> Self {
        GalleryParams {
            dim: 0,
            ..Self::new(GalleryName::Point)
        }
    }

    pub fn with_radius(mut self, r: BigRational) -> Self {
        self.radius = Some(r);
        self
    }
}

fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(p.into(), q.into())
}

/// Conductor for a set of rotation orders: always divisible by 4 so that i is available.
pub fn conductor_for(orders: &[u32]) -> u32 {
    orders.iter().fold(4u32, |acc, &p| acc.lcm(&p))
}

fn check_order(p: u32) -> Result<()> {
    if !SUPPORTED_ORDERS.contains(&p) {
        return Err(Error::UnsupportedParams(format!("rotation order {p} not in {SUPPORTED_ORDERS:?}")));
    }
    Ok(())
}

fn scalar(m: u32, p: i64, q: i64) -> PointC {
    PointC::scalar(CycNum::from_ratio(m, p, q))
}

fn positive(r: &BigRational, limit: &BigRational) -> Result<()> {
    if *r <= BigRational::from_integer(0.into()) || r > limit {
        return Err(Error::UnsupportedParams(format!("radius must lie in (0, {limit}]")));
    }
    Ok(())
}

/// Builds a gallery atlas. Results always pass `validate_atlas`.
pub fn gallery(g: &GalleryParams) -> Result<Atlas> {
    match g.name {
        GalleryName::Cone => {
            check_order(g.p)?;
            let r = g.radius.clone().unwrap_or_else(|| ratio(1, 1));
            positive(&r, &ratio(1, 1))?;
            cone_atlas(g.p, &r)
        }
        GalleryName::Football => {
            check_order(g.p)?;
            check_order(g.q)?;
            let r = g.radius.clone().unwrap_or_else(|| ratio(1, 10));
            positive(&r, &ratio(1, 10))?;
            glued_poles(g.p, g.q, &r)
        }
        GalleryName::Teardrop => {
            check_order(g.p)?;
            let r = g.radius.clone().unwrap_or_else(|| ratio(1, 10));
            positive(&r, &ratio(1, 10))?;
            glued_poles(g.p, 1, &r)
        }
        GalleryName::GlobalQuotient => {
            if g.dim == 0 {
                return Err(Error::UnsupportedParams("global quotient needs dim >= 1".into()));
            }
            check_order(g.p)?;
            if g.dim > 1 && g.p > 2 {
                return Err(Error::UnsupportedParams("only ±Id acts in dim > 1".into()));
            }
            global_quotient(g.p, g.dim)
        }
        GalleryName::Point => {
            if g.dim != 0 {
                return Err(Error::UnsupportedParams("the point atlas has dim 0".into()));
            }
            point_atlas()
        }
    }
}

/// Cone(p): one chart B(0, r) with rotations of order p.
pub fn cone_atlas(p: u32, r: &BigRational) -> Result<Atlas> {
    let m = conductor_for(&[p]);
    let ball = Ball::new(PointC::zero(m, 1), CycNum::from_rational(m, &(r * r)));
    let probes = vec![
        (0, PointC::zero(m, 1)),
        (0, PointC::scalar(CycNum::from_rational(m, &(r / BigRational::from_integer(4.into()))))),
        (0, PointC::scalar(CycNum::from_rational(m, &(r / BigRational::from_integer(2.into()))))),
    ];
    Atlas::new(AtlasParts {
        conductor: m,
        dim: 1,
        charts: vec![Chart::cyclic("cone", ball, p)],
        embeddings: vec![],
        oracle: OracleSpec::Gluing,
        witnesses: vec![],
        probes,
    })
}

/// Cone(p) with a second chart B(0, 1/2) included in B(0, 1).
pub fn cone_pair(p: u32) -> Result<Atlas> {
    check_order(p)?;
    let m = conductor_for(&[p]);
    let big = Chart::cyclic("cone", Ball::new(PointC::zero(m, 1), CycNum::one(m)), p);
    let small = Chart::cyclic("cone_inner", Ball::new(PointC::zero(m, 1), CycNum::from_ratio(m, 1, 4)), p);
    Atlas::new(AtlasParts {
        conductor: m,
        dim: 1,
        charts: vec![big, small],
        embeddings: vec![Embedding {
            src: 1,
            dst: 0,
            map: AffineMap::identity(m, 1),
        }],
        oracle: OracleSpec::Gluing,
        witnesses: vec![],
        probes: vec![(0, PointC::zero(m, 1)), (0, scalar(m, 1, 4)), (0, scalar(m, 3, 4)), (1, scalar(m, 1, 8))],
    })
}

/// North pole B(0,1)/Z_p and south pole B(3/2,1)/Z_q glued along two small
/// trivial-group bridge balls of radius r centred at 3/4 and 3/4 + i/4.
fn glued_poles(p: u32, q: u32, r: &BigRational) -> Result<Atlas> {
    let m = conductor_for(&[p, q]);
    let i = CycNum::zeta(m, (m / 4) as i64);
    let r2 = CycNum::from_rational(m, &(r * r));
    let north = Chart::cyclic("north", Ball::new(PointC::zero(m, 1), CycNum::one(m)), p);
    let south = Chart::cyclic("south", Ball::new(scalar(m, 3, 2), CycNum::one(m)), q);
    let c0 = CycNum::from_ratio(m, 3, 4);
    let c1 = &c0 + &(&i * &CycNum::from_ratio(m, 1, 4));
    let k0 = Chart::trivial("bridge0", Ball::new(PointC::scalar(c0.clone()), r2.clone()));
    let k1 = Chart::trivial("bridge1", Ball::new(PointC::scalar(c1.clone()), r2));
    let id = AffineMap::identity(m, 1);
    let emb = |src, dst| Embedding { src, dst, map: id.clone() };
    let witnesses = vec![crate::atlas::SpanWitness {
        i: 0,
        j: 1,
        span: crate::atlas::Span {
            k: 2,
            x_k: PointC::scalar(c0.clone()),
            left: id.clone(),
            right: id.clone(),
        },
    }];
    Atlas::new(AtlasParts {
        conductor: m,
        dim: 1,
        charts: vec![north, south, k0, k1],
        embeddings: vec![emb(2, 0), emb(2, 1), emb(3, 0), emb(3, 1)],
        oracle: OracleSpec::Gluing,
        witnesses,
        probes: vec![
            (0, PointC::zero(m, 1)),
            (0, scalar(m, 1, 4)),
            (0, PointC::scalar(c0)),
            (1, scalar(m, 3, 2)),
            (1, scalar(m, 7, 4)),
            (3, PointC::scalar(c1)),
        ],
    })
}

/// B^n(0,1) with the cyclic group of order p (scalar roots of unity; ±Id when n > 1).
fn global_quotient(p: u32, n: usize) -> Result<Atlas> {
    let m = conductor_for(&[p]);
    let group = (0..p as i64)
        .map(|k| AffineMap::scalar(&CycNum::zeta(m, k * (m / p) as i64), n))
        .collect();
    let chart = Chart::new("quotient", Ball::new(PointC::zero(m, n), CycNum::one(m)), group);
    let mut off = PointC::zero(m, n);
    off.0[0] = CycNum::from_ratio(m, 1, 4);
    let mut off2 = PointC::zero(m, n);
    off2.0[n - 1] = &CycNum::from_ratio(m, 1, 3) * &CycNum::zeta(m, (m / 4) as i64);
    Atlas::new(AtlasParts {
        conductor: m,
        dim: n,
        charts: vec![chart],
        embeddings: vec![],
        oracle: OracleSpec::GlobalQuotient,
        witnesses: vec![],
        probes: vec![(0, PointC::zero(m, n)), (0, off), (0, off2)],
    })
}

/// The one-point orbifold: a dim-0 chart with trivial group.
fn point_atlas() -> Result<Atlas> {
    let m = 4;
    Atlas::new(AtlasParts {
        conductor: m,
        dim: 0,
        charts: vec![Chart::trivial("point", Ball::new(PointC::zero(m, 0), CycNum::one(m)))],
        embeddings: vec![],
        oracle: OracleSpec::Gluing,
        witnesses: vec![],
        probes: vec![(0, PointC::zero(m, 0))],
    })
}

/// Every gallery atlas used by the acceptance suite, with a short name.
pub fn standard_gallery() -> Vec<(String, Atlas)> {
    let mut out = Vec::new();
    for p in [2, 3, 4, 6] {
        out.push((format!("cone{p}"), gallery(&GalleryParams::cone(p)).expect("gallery")));
    }
    out.push(("football23".into(), gallery(&GalleryParams::football(2, 3)).expect("gallery")));
    out.push(("teardrop3".into(), gallery(&GalleryParams::teardrop(3)).expect("gallery")));
    out.push(("global_quotient2".into(), gallery(&GalleryParams::global_quotient(2, 2)).expect("gallery")));
    out.push(("point".into(), gallery(&GalleryParams::point()).expect("gallery")));
    out
}
