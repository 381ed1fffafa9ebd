//! JSON body descriptions.
//!
//! ```json
//! {"type": "section", "body": {"type": "cube", "dim": 3}, "normal": ["1", "1", "1"]}
//! ```
//!
//! Numbers are JSON integers, decimals, or strings such as `"3/4"`; `p` may
//! be `"inf"`. A `product` is the Lagrangian product with `q` in the
//! q-coordinates and `p` (default: the polar of `q`) in the p-coordinates.

use serde::{Deserialize, Serialize};

use super::{ConvexBody, HannerTree, Rep};
use crate::error::{Error, Result};
use crate::exact::{self, Q};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Num {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Num {
    pub fn to_q(&self) -> Result<Q> {
        match self {
            Num::Int(i) => Ok(exact::q(*i)),
            Num::Float(f) => num::BigRational::from_float(*f).ok_or_else(|| Error::Malformed(format!("number {f}"))),
            Num::Text(s) => exact::parse_q(s),
        }
    }

    fn to_p(&self) -> Result<f64> {
        match self {
            Num::Text(s) if matches!(s.trim(), "inf" | "infinity" | "Infinity") => Ok(f64::INFINITY),
            Num::Float(f) => Ok(*f),
            _ => Ok(exact::to_f64(&self.to_q()?)),
        }
    }

    fn exact(x: &Q) -> Num {
        Num::Text(exact::fmt_q(x))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum BodyDescription {
    Cube { dim: usize },
    Cross { dim: usize },
    LpBall { p: Num, dim: usize },
    /// Rows `a_i · x <= b_i`; `b` defaults to all ones.
    Hpoly {
        a: Vec<Vec<Num>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        b: Option<Vec<Num>>,
    },
    Vpoly { vertices: Vec<Vec<Num>> },
    Hanner { expr: String },
    Polar { body: Box<BodyDescription> },
    Section { body: Box<BodyDescription>, normal: Vec<Num> },
    Projection { body: Box<BodyDescription>, normal: Vec<Num> },
    Linimg { body: Box<BodyDescription>, matrix: Vec<Vec<Num>> },
    Product {
        q: Box<BodyDescription>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        p: Option<Box<BodyDescription>>,
    },
}

fn qvec(v: &[Num]) -> Result<Vec<Q>> {
    v.iter().map(Num::to_q).collect()
}

fn qmat(m: &[Vec<Num>]) -> Result<Vec<Vec<Q>>> {
    m.iter().map(|r| qvec(r)).collect()
}

fn row_dim(rows: &[Vec<Q>]) -> Result<usize> {
    let d = rows.first().map(Vec::len).ok_or_else(|| Error::Malformed("empty point list".into()))?;
    if d == 0 || rows.iter().any(|r| r.len() != d) {
        return Err(Error::Malformed("rows of unequal or zero length".into()));
    }
    Ok(d)
}

fn positive_dim(dim: usize) -> Result<usize> {
    if dim == 0 {
        return Err(Error::Malformed("dimension must be positive".into()));
    }
    Ok(dim)
}

impl BodyDescription {
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Malformed(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }

    pub fn build(&self) -> Result<ConvexBody> {
        match self {
            BodyDescription::Cube { dim } => Ok(ConvexBody::cube(positive_dim(*dim)?)),
            BodyDescription::Cross { dim } => Ok(ConvexBody::cross(positive_dim(*dim)?)),
            BodyDescription::LpBall { p, dim } => {
                let dim = positive_dim(*dim)?;
                match p {
                    Num::Float(_) => ConvexBody::lp_ball(p.to_p()?, dim),
                    _ => {
                        let pf = p.to_p()?;
                        if pf.is_infinite() {
                            ConvexBody::lp_ball(pf, dim)
                        } else {
                            ConvexBody::lp_ball_exact(&p.to_q()?, dim)
                        }
                    }
                }
            }
            BodyDescription::Hpoly { a, b } => {
                let mut rows = qmat(a)?;
                let d = row_dim(&rows)?;
                if let Some(b) = b {
                    if b.len() != rows.len() {
                        return Err(Error::Malformed("hpoly: a and b differ in length".into()));
                    }
                    for (row, bi) in rows.iter_mut().zip(b) {
                        let bi = bi.to_q()?;
                        if bi <= exact::q(0) {
                            return Err(Error::Malformed("hpoly: right-hand sides must be positive".into()));
                        }
                        row.iter_mut().for_each(|x| *x /= &bi);
                    }
                }
                ConvexBody::from_h(d, &rows)
            }
            BodyDescription::Vpoly { vertices } => {
                let pts = qmat(vertices)?;
                ConvexBody::from_v(row_dim(&pts)?, &pts)
            }
            BodyDescription::Hanner { expr } => Ok(ConvexBody::hanner(HannerTree::parse(expr)?)),
            BodyDescription::Polar { body } => Ok(body.build()?.polar()),
            BodyDescription::Section { body, normal } => Ok(body.build()?.hyperplane_section(&qvec(normal)?)?.body),
            BodyDescription::Projection { body, normal } => {
                Ok(body.build()?.hyperplane_projection(&qvec(normal)?)?.body)
            }
            BodyDescription::Linimg { body, matrix } => body.build()?.linear_image(&qmat(matrix)?),
            BodyDescription::Product { q, p } => {
                let q = q.build()?;
                let p = match p {
                    Some(p) => p.build()?,
                    None => q.polar(),
                };
                Ok(ConvexBody::product(p, q))
            }
        }
    }

    /// A description that rebuilds to the same body.
    pub fn of(body: &ConvexBody) -> BodyDescription {
        let qrows = |rows: &[Vec<Q>]| rows.iter().map(|r| r.iter().map(Num::exact).collect()).collect();
        match body.rep() {
            Rep::Polytope(p) => BodyDescription::Vpoly { vertices: qrows(p.vertices()) },
            Rep::Hanner { tree, .. } => BodyDescription::Hanner { expr: tree.to_string() },
            Rep::LpBall { p, exact_p } => BodyDescription::LpBall {
                p: exact_p.as_ref().map(Num::exact).unwrap_or(Num::Float(*p)),
                dim: body.dim(),
            },
            Rep::Section { parent, frame } => BodyDescription::Section {
                body: Box::new(Self::of(parent)),
                normal: frame.normal().iter().map(Num::exact).collect(),
            },
            Rep::Projection { parent, frame } => BodyDescription::Projection {
                body: Box::new(Self::of(parent)),
                normal: frame.normal().iter().map(Num::exact).collect(),
            },
            Rep::LinearImage { parent, map } => {
                BodyDescription::Linimg { body: Box::new(Self::of(parent)), matrix: qrows(map.matrix()) }
            }
            Rep::Product(p, q) => {
                BodyDescription::Product { q: Box::new(Self::of(q)), p: Some(Box::new(Self::of(p))) }
            }
            // conv(A ∪ B) = (A° × B°)°
            Rep::L1Sum(a, b) => BodyDescription::Polar {
                body: Box::new(BodyDescription::Product {
                    q: Box::new(Self::of(&b.polar())),
                    p: Some(Box::new(Self::of(&a.polar()))),
                }),
            },
        }
    }
}

/// Parses and validates a JSON body description.
pub fn parse_body(json: &str) -> Result<ConvexBody> {
    BodyDescription::from_json(json)?.build()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_has_six_facets() {
        let k = parse_body(r#"{"type":"cube","dim":3}"#).unwrap();
        assert_eq!(k.as_polytope().unwrap().facets().len(), 6);
    }

    #[test]
    fn hanner_counts_from_description() {
        let k = parse_body(r#"{"type":"hanner","expr":"X(S, L(S,S))"}"#).unwrap();
        let p = k.as_polytope().unwrap();
        assert_eq!((k.dim(), p.vertices().len(), p.facets().len()), (3, 8, 6));
    }

    #[test]
    fn lp_ball_gauge() {
        let k = parse_body(r#"{"type":"lp_ball","p":"3/2","dim":4}"#).unwrap();
        let x = [0.1, 0.2, -0.3, 0.4];
        let direct = x.iter().map(|v: &f64| v.abs().powf(1.5)).sum::<f64>().powf(2.0 / 3.0);
        assert!((k.gauge(&x) - direct).abs() < 1e-14);
        assert!(parse_body(r#"{"type":"lp_ball","p":"inf","dim":2}"#).unwrap().as_polytope().is_some());
    }

    #[test]
    fn errors() {
        assert!(matches!(parse_body(r#"{"type":"lp_ball","p":0.5,"dim":2}"#), Err(Error::ExponentBelowOne(_))));
        assert!(matches!(parse_body(r#"{"type":"vpoly","vertices":[[1,0],[0,1],[-1,0],[0,-2]]}"#), Err(Error::NotSymmetric(_))));
        // origin on the boundary
        assert!(matches!(parse_body(r#"{"type":"vpoly","vertices":[[1,0],[0,1],[-1,0]]}"#), Err(Error::Unbounded)));
        assert!(matches!(parse_body(r#"{"type":"dodecahedron"}"#), Err(Error::Malformed(_))));
        assert!(matches!(parse_body(r#"{"type":"cube","dim":0}"#), Err(Error::Malformed(_))));
    }

    #[test]
    fn hpoly_with_right_hand_side() {
        let k = parse_body(r#"{"type":"hpoly","a":[[1,0],[-1,0],[0,1],[0,-1]],"b":[2,2,"1/2","1/2"]}"#).unwrap();
        assert_eq!(k.as_polytope().unwrap().bounding_box(), vec![2.0, 0.5]);
    }

    #[test]
    fn emitted_descriptions_round_trip() {
        let ball = ConvexBody::lp_ball(3.0, 3).unwrap();
        let cases = vec![
            ConvexBody::cube(3).hyperplane_section(&[exact::q(1), exact::q(1), exact::q(1)]).unwrap().body,
            ConvexBody::hanner(HannerTree::parse("L(S,X(S,S))").unwrap()),
            ball.hyperplane_projection(&[exact::q(1), exact::q(2), exact::q(0)]).unwrap().body,
            ConvexBody::product(ball.polar(), ball.clone()).polar(),
        ];
        let pts = [[0.3, -0.2, 0.1, 0.5, -0.4, 0.2], [0.9, 0.1, -0.7, 0.0, 0.3, 0.3]];
        for k in cases {
            let desc = BodyDescription::of(&k);
            let back = parse_body(&desc.to_json()).unwrap();
            assert_eq!(back.dim(), k.dim());
            for x in &pts {
                let x = &x[..k.dim()];
                assert!((back.gauge(x) - k.gauge(x)).abs() < 1e-12, "{}", desc.to_json());
            }
        }
    }
}
