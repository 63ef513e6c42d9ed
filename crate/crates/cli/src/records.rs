//! Output records. In `json-lines` format each one is printed as a single
//! JSON object tagged by `record`; `schema/records.json` describes them.

use serde::Serialize;

use c2_core::fincat::Variance;
use c2_core::profunctor::{NatTrans, Profunctor};

#[derive(Clone, Debug, Serialize)]
pub struct CoordInfo {
    pub name: String,
    pub variance: &'static str,
    pub objects: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PointRow {
    pub at: Vec<String>,
    pub elements: Vec<String>,
}

/// A profunctor as a table from points to element lists.
#[derive(Clone, Debug, Serialize)]
pub struct Table {
    pub coords: Vec<CoordInfo>,
    pub points: Vec<PointRow>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ComponentRow {
    pub at: Vec<String>,
    pub map: Vec<[String; 2]>,
}

fn point_names(p: &Profunctor, i: usize) -> Vec<String> {
    p.body().coords(i).iter().enumerate().map(|(s, &o)| p.slot(s).cat.object_name(o).to_string()).collect()
}

impl Table {
    pub fn of(p: &Profunctor) -> Table {
        let coords = p
            .coords()
            .iter()
            .zip(p.slots())
            .map(|(c, s)| CoordInfo {
                name: c.to_string(),
                variance: match s.variance {
                    Variance::Covariant => "covariant",
                    Variance::Contravariant => "contravariant",
                },
                objects: s.cat.object_names().iter().map(|o| o.to_string()).collect(),
            })
            .collect();
        let points = (0..p.n_points())
            .map(|i| PointRow { at: point_names(p, i), elements: p.value(i).elems().iter().map(|e| e.to_string()).collect() })
            .collect();
        Table { coords, points }
    }
}

pub fn components(t: &NatTrans) -> Vec<ComponentRow> {
    let s = t.source();
    (0..s.n_points())
        .map(|i| ComponentRow {
            at: point_names(s, i),
            map: s
                .value(i)
                .elems()
                .iter()
                .map(|e| [e.to_string(), t.apply(i, e).map_or_else(String::new, |x| x.to_string())])
                .collect(),
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Error,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "record", rename_all = "kebab-case")]
pub enum Record {
    ParseError {
        file: String,
        class: &'static str,
        line: u32,
        column: u32,
        message: String,
    },
    Declaration {
        file: String,
        name: String,
        kind: &'static str,
        line: u32,
        column: u32,
        status: Status,
        #[serde(skip_serializing_if = "Option::is_none")]
        class: Option<&'static str>,
        #[serde(skip_serializing_if = "Option::is_none")]
        message: Option<String>,
    },
    Profunctor {
        file: String,
        name: String,
        judgment: String,
        table: Table,
    },
    Cell {
        file: String,
        name: String,
        judgment: String,
        source: Table,
        target: Table,
        components: Vec<ComponentRow>,
    },
    Property {
        file: String,
        name: String,
        property: &'static str,
        passed: bool,
        #[serde(skip_serializing_if = "Option::is_none")]
        detail: Option<String>,
    },
    Category {
        file: String,
        valid: bool,
        objects: usize,
        arrows: usize,
        #[serde(skip_serializing_if = "Option::is_none")]
        witness: Option<String>,
    },
    Lafont {
        source: String,
        via_mu: String,
        via_mu_tilde: String,
        well_typed: bool,
        distinct_reducts: bool,
    },
    Nondegeneracy {
        witness_left: String,
        witness_right: String,
        parallel: bool,
        distinct: bool,
        searched: usize,
        from_corpus: usize,
        searched_distinct: usize,
    },
    RelCollapse {
        examined: usize,
        parallel: usize,
        distinct: usize,
        prof_distinct: usize,
        and_or_coincide: bool,
        negation_preserves_cardinality: bool,
    },
    Summary {
        command: &'static str,
        items: usize,
        failures: usize,
    },
}
