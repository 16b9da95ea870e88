//! JSON forms of templates, masks, negotiation outcomes and reports.
//!
//! Vertices are written as their labels: the vertex name when the game
//! file gives one, the index otherwise.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::csm::{Csm, ParityTempResult};
use crate::game::{Edge, EdgeSet, GameGraph, Player, Vertex, VertexSet};
use crate::negotiation::{IterationRecord, NegotiationOutcome};
use crate::templates::{CondLiveGroup, Lasso, LiveGroup, Template, TemplateCheck};
use crate::verification::ProfileReport;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JsonError {
    #[error("unknown vertex {0:?}")]
    UnknownVertex(String),
    #[error("({0}, {1}) is not an edge of the game")]
    NotAnEdge(String, String),
    #[error("owner must be 0 or 1, got {0}")]
    BadOwner(u8),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CondLiveJson {
    pub cond: Vec<String>,
    pub groups: Vec<Vec<[String; 2]>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TemplateJson {
    #[serde(rename = "unsafe", default)]
    pub unsafe_edges: Vec<[String; 2]>,
    #[serde(default)]
    pub colive: Vec<[String; 2]>,
    #[serde(default)]
    pub cond_live: Vec<CondLiveJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CsmJson {
    pub owner: u8,
    pub assumption: TemplateJson,
    pub strategy: TemplateJson,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupConflictJson {
    pub group: Vec<[String; 2]>,
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckJson {
    pub conflict_free: bool,
    pub bad_vertices: Vec<String>,
    pub bad_groups: Vec<GroupConflictJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UpdateJson {
    pub joint_region: Vec<String>,
    pub colive_core: Vec<String>,
    pub next_region: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IterationJson {
    pub index: usize,
    pub regions: [Vec<String>; 2],
    pub colive_cores: [Vec<String>; 2],
    pub checks: [CheckJson; 2],
    pub measure: [usize; 2],
    pub update: Option<UpdateJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutcomeJson {
    pub status: String,
    pub priorities0: Vec<u32>,
    pub priorities1: Vec<u32>,
    /// Objectives added after the initial negotiation.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub added0: Vec<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub added1: Vec<Vec<u32>>,
    pub live_region: Vec<String>,
    pub winning_region: Vec<String>,
    pub csm0: CsmJson,
    pub csm1: CsmJson,
    pub iterations: Vec<IterationJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveJson {
    pub player: u8,
    pub region: Vec<String>,
    pub colive_core: Vec<String>,
    pub assumption: TemplateJson,
    pub strategy: TemplateJson,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LassoJson {
    pub stem: Vec<String>,
    pub cycle: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerdictJson {
    pub vertex: String,
    pub in_coop_region: bool,
    pub profile_wins: bool,
    pub objectives_met: [bool; 2],
    pub lasso: Option<LassoJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportJson {
    pub sound: bool,
    pub complete: bool,
    pub oracle: String,
    pub verdicts: Vec<VerdictJson>,
}

fn edge(g: &GameGraph, (u, v): Edge) -> [String; 2] {
    [g.label(u), g.label(v)]
}

fn edges(g: &GameGraph, es: &EdgeSet) -> Vec<[String; 2]> {
    es.iter().map(|&e| edge(g, e)).collect()
}

pub fn vertices(g: &GameGraph, vs: impl IntoIterator<Item = Vertex>) -> Vec<String> {
    vs.into_iter().map(|v| g.label(v)).collect()
}

fn set(g: &GameGraph, s: &VertexSet) -> Vec<String> {
    vertices(g, s.iter())
}

pub fn template_json(g: &GameGraph, t: &Template) -> TemplateJson {
    TemplateJson {
        unsafe_edges: edges(g, &t.unsafe_edges),
        colive: edges(g, &t.colive),
        cond_live: t
            .cond_live
            .iter()
            .map(|c| CondLiveJson {
                cond: set(g, &c.cond),
                groups: c.groups.iter().map(|grp| edges(g, &grp.edges)).collect(),
            })
            .collect(),
    }
}

pub fn csm_json(g: &GameGraph, c: &Csm) -> CsmJson {
    CsmJson {
        owner: c.owner.into(),
        assumption: template_json(g, &c.assumption),
        strategy: template_json(g, &c.strategy),
    }
}

pub fn check_json(g: &GameGraph, c: &TemplateCheck) -> CheckJson {
    CheckJson {
        conflict_free: c.conflict_free,
        bad_vertices: set(g, &c.bad_vertices),
        bad_groups: c
            .bad_groups
            .iter()
            .map(|b| GroupConflictJson {
                group: edges(g, &b.group.edges),
                source: g.label(b.source),
            })
            .collect(),
    }
}

fn iteration_json(g: &GameGraph, r: &IterationRecord) -> IterationJson {
    let (w, rest) = r.measure();
    IterationJson {
        index: r.index,
        regions: [set(g, &r.regions[0]), set(g, &r.regions[1])],
        colive_cores: [set(g, &r.colive_cores[0]), set(g, &r.colive_cores[1])],
        checks: [check_json(g, &r.checks[0]), check_json(g, &r.checks[1])],
        measure: [w, rest],
        update: r.update.as_ref().map(|u| UpdateJson {
            joint_region: set(g, &u.joint_region),
            colive_core: set(g, &u.colive_core),
            next_region: set(g, &u.next_region),
        }),
    }
}

pub fn outcome_json(g: &GameGraph, o: &NegotiationOutcome) -> OutcomeJson {
    let added = |i: usize| {
        o.objectives[i][1..]
            .iter()
            .map(|p| p.as_slice().to_vec())
            .collect()
    };
    OutcomeJson {
        status: o.status.as_str().to_owned(),
        priorities0: o.objectives[0][0].as_slice().to_vec(),
        priorities1: o.objectives[1][0].as_slice().to_vec(),
        added0: added(0),
        added1: added(1),
        live_region: set(g, &o.live_region),
        winning_region: set(g, &o.winning_region()),
        csm0: csm_json(g, &o.csms[0]),
        csm1: csm_json(g, &o.csms[1]),
        iterations: o.iterations.iter().map(|r| iteration_json(g, r)).collect(),
    }
}

pub fn solve_json(g: &GameGraph, player: Player, r: &ParityTempResult) -> SolveJson {
    SolveJson {
        player: player.into(),
        region: set(g, &r.region),
        colive_core: set(g, &r.colive_core),
        assumption: template_json(g, &r.csm.assumption),
        strategy: template_json(g, &r.csm.strategy),
    }
}

pub fn lasso_json(g: &GameGraph, l: &Lasso) -> LassoJson {
    LassoJson {
        stem: vertices(g, l.stem.iter().copied()),
        cycle: vertices(g, l.cycle.iter().copied()),
    }
}

pub fn report_json(g: &GameGraph, r: &ProfileReport) -> ReportJson {
    ReportJson {
        sound: r.sound,
        complete: r.complete,
        oracle: r.oracle.to_owned(),
        verdicts: r
            .verdicts
            .iter()
            .map(|v| VerdictJson {
                vertex: g.label(v.vertex),
                in_coop_region: v.in_coop_region,
                profile_wins: v.profile_wins,
                objectives_met: v.objectives_met,
                lasso: v.lasso.as_ref().map(|l| lasso_json(g, l)),
            })
            .collect(),
    }
}

/// Resolves a label: a vertex name first, then a plain index.
pub fn resolve(g: &GameGraph, label: &str) -> Result<Vertex, JsonError> {
    g.find(label)
        .or_else(|| {
            label
                .parse::<Vertex>()
                .ok()
                .filter(|&v| v < g.vertex_count() && g.name(v).is_none())
        })
        .ok_or_else(|| JsonError::UnknownVertex(label.to_owned()))
}

fn parse_edges(g: &GameGraph, es: &[[String; 2]]) -> Result<EdgeSet, JsonError> {
    es.iter()
        .map(|[u, v]| {
            let e = (resolve(g, u)?, resolve(g, v)?);
            if g.has_edge(e.0, e.1) {
                Ok(e)
            } else {
                Err(JsonError::NotAnEdge(u.clone(), v.clone()))
            }
        })
        .collect()
}

pub fn parse_template(g: &GameGraph, t: &TemplateJson) -> Result<Template, JsonError> {
    let cond_live = t
        .cond_live
        .iter()
        .map(|c| {
            let cond = c
                .cond
                .iter()
                .map(|v| resolve(g, v))
                .collect::<Result<Vec<_>, _>>()?;
            let groups = c
                .groups
                .iter()
                .map(|grp| parse_edges(g, grp).map(LiveGroup::new))
                .collect::<Result<_, _>>()?;
            Ok(CondLiveGroup {
                cond: g.vertex_set(cond),
                groups,
            })
        })
        .collect::<Result<_, JsonError>>()?;
    Ok(Template {
        unsafe_edges: parse_edges(g, &t.unsafe_edges)?,
        colive: parse_edges(g, &t.colive)?,
        cond_live,
    })
}

pub fn parse_csm(g: &GameGraph, c: &CsmJson) -> Result<Csm, JsonError> {
    Ok(Csm {
        owner: Player::try_from(c.owner).map_err(|_| JsonError::BadOwner(c.owner))?,
        assumption: parse_template(g, &c.assumption)?,
        strategy: parse_template(g, &c.strategy)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csm::parity_temp;
    use crate::game::fixtures::*;
    use crate::game::{buchi_to_parity, cobuchi_to_parity};
    use crate::negotiation::negotiate;

    fn named_example() -> GameGraph {
        let g = example();
        let succ = g.vertices().map(|v| g.successors(v).to_vec()).collect();
        let owner = g.vertices().map(|v| g.owner(v)).collect();
        let names = ["a", "b", "c", "d"].map(|s| Some(s.to_owned())).to_vec();
        GameGraph::with_names(owner, succ, names).unwrap()
    }

    #[test]
    fn template_shape() {
        let g = named_example();
        let t = Template::colive_only(EdgeSet::from([(B, D)]))
            .with_cond_live(g.vertex_set([A]), vec![LiveGroup::from([(A, C)])]);
        let text = serde_json::to_string(&template_json(&g, &t)).unwrap();
        assert_eq!(
            text,
            r#"{"unsafe":[],"colive":[["b","d"]],"cond_live":[{"cond":["a"],"groups":[[["a","c"]]]}]}"#
        );
        let back: TemplateJson = serde_json::from_str(&text).unwrap();
        assert_eq!(parse_template(&g, &back).unwrap(), t);
    }

    #[test]
    fn rejects_unknown_fields_and_vertices() {
        let g = named_example();
        assert!(serde_json::from_str::<TemplateJson>(r#"{"colive":[],"extra":1}"#).is_err());
        let t: TemplateJson = serde_json::from_str(r#"{"colive":[["a","z"]]}"#).unwrap();
        assert_eq!(
            parse_template(&g, &t),
            Err(JsonError::UnknownVertex("z".into()))
        );
        let t: TemplateJson = serde_json::from_str(r#"{"colive":[["a","d"]]}"#).unwrap();
        assert_eq!(
            parse_template(&g, &t),
            Err(JsonError::NotAnEdge("a".into(), "d".into()))
        );
    }

    #[test]
    fn solve_output() {
        let g = named_example();
        let p = cobuchi_to_parity(&g, &g.vertex_set([A, B, C]));
        let r = parity_temp(&g.full(), &p, Player::One).unwrap();
        let j = solve_json(&g, Player::One, &r);
        assert_eq!(j.strategy.colive, vec![["b".to_owned(), "d".to_owned()]]);
        assert_eq!(j.region.len(), 4);
    }

    #[test]
    fn outcome_round_trip() {
        let g = named_example();
        let p0 = buchi_to_parity(&g, &g.vertex_set([C]));
        let p1 = cobuchi_to_parity(&g, &g.vertex_set([A, B, C]));
        let o = negotiate(&g, &p0, &p1, None).unwrap();
        let j = outcome_json(&g, &o);
        let text = serde_json::to_string(&j).unwrap();
        for key in [
            "\"priorities0\"",
            "\"priorities1\"",
            "\"live_region\"",
            "\"iterations\"",
            "\"status\"",
        ] {
            assert!(text.contains(key), "{key}");
        }
        let back: OutcomeJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back, j);
        assert_eq!(parse_csm(&g, &back.csm1).unwrap(), o.csms[1]);
        assert_eq!(back.iterations.len(), o.iterations.len());
    }
}
