use std::fmt::{self, Write};

use serde::de::{MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{Marking, PetriNet, Place, PnError, Transition};

/// Arc weights keyed by place name, kept in place declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
struct ArcMap(Vec<(String, u32)>);

impl Serialize for ArcMap {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for ArcMap {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct ArcVisitor;
        impl<'de> Visitor<'de> for ArcVisitor {
            type Value = ArcMap;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a map from place names to arc weights")
            }
            fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> Result<ArcMap, A::Error> {
                let mut arcs = Vec::new();
                while let Some((k, v)) = access.next_entry::<String, u32>()? {
                    arcs.push((k, v));
                }
                Ok(ArcMap(arcs))
            }
        }
        deserializer.deserialize_map(ArcVisitor)
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct PlaceJson {
    name: String,
    capacity: u32,
    initial: u32,
}

#[derive(Debug, Serialize, Deserialize)]
struct TransitionJson {
    name: String,
    consume: ArcMap,
    produce: ArcMap,
}

#[derive(Debug, Serialize, Deserialize)]
struct NetJson {
    places: Vec<PlaceJson>,
    transitions: Vec<TransitionJson>,
}

/// Pretty-printed JSON description of the net. Output is byte-deterministic.
pub fn to_json(net: &PetriNet) -> String {
    let arcs = |a: &[(usize, u32)]| {
        ArcMap(
            a.iter()
                .map(|&(p, w)| (net.places[p].name.clone(), w))
                .collect(),
        )
    };
    let doc = NetJson {
        places: net
            .places
            .iter()
            .zip(&net.initial.0)
            .map(|(p, &initial)| PlaceJson {
                name: p.name.clone(),
                capacity: p.capacity,
                initial,
            })
            .collect(),
        transitions: net
            .transitions
            .iter()
            .map(|t| TransitionJson {
                name: t.name.clone(),
                consume: arcs(&t.consume),
                produce: arcs(&t.produce),
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("net serializes");
    s.push('\n');
    s
}

/// Reads a net written by [`to_json`]. The JSON carries no net name, so the
/// caller supplies one.
pub fn from_json(name: &str, text: &str) -> Result<PetriNet, PnError> {
    let doc: NetJson = serde_json::from_str(text).map_err(|e| PnError::Format(e.to_string()))?;
    let places: Vec<Place> = doc
        .places
        .iter()
        .map(|p| Place {
            name: p.name.clone(),
            capacity: p.capacity,
        })
        .collect();
    let initial = Marking(doc.places.iter().map(|p| p.initial).collect());
    let lookup = |t: &str, arcs: &ArcMap| -> Result<Vec<(usize, u32)>, PnError> {
        arcs.0
            .iter()
            .map(|(k, w)| {
                places
                    .iter()
                    .position(|p| &p.name == k)
                    .map(|p| (p, *w))
                    .ok_or_else(|| PnError::Format(format!("transition `{t}` uses unknown place `{k}`")))
            })
            .collect()
    };
    let transitions = doc
        .transitions
        .iter()
        .map(|t| {
            Ok(Transition {
                name: t.name.clone(),
                consume: lookup(&t.name, &t.consume)?,
                produce: lookup(&t.name, &t.produce)?,
            })
        })
        .collect::<Result<Vec<_>, PnError>>()?;
    PetriNet::new(name, places, transitions, initial)
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Graphviz rendering: places are circles labelled with their initial
/// tokens, transitions are boxes, arcs carry their weights.
pub fn to_dot(net: &PetriNet) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph \"{}\" {{", escape(&net.name));
    out.push_str("  rankdir=LR;\n");
    for (i, p) in net.places.iter().enumerate() {
        let _ = writeln!(
            out,
            "  p{i} [shape=circle, label=\"{}\\n{}\"];",
            escape(&p.name),
            net.initial.0[i]
        );
    }
    for (i, t) in net.transitions.iter().enumerate() {
        let _ = writeln!(out, "  t{i} [shape=box, label=\"{}\"];", escape(&t.name));
    }
    for (i, t) in net.transitions.iter().enumerate() {
        for &(p, w) in &t.consume {
            let _ = writeln!(out, "  p{p} -> t{i} [label=\"{w}\"];");
        }
        for &(p, w) in &t.produce {
            let _ = writeln!(out, "  t{i} -> p{p} [label=\"{w}\"];");
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> PetriNet {
        let places = vec![
            Place {
                name: "P_x".into(),
                capacity: 1,
            },
            Place {
                name: "Q_x".into(),
                capacity: 1,
            },
        ];
        let ts = vec![Transition {
            name: "inc_x@0".into(),
            consume: vec![(1, 1)],
            produce: vec![(0, 1)],
        }];
        PetriNet::new("Small \"net\"", places, ts, Marking(vec![0, 1])).unwrap()
    }

    #[test]
    fn json_layout() {
        let json = to_json(&small());
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["places"][1]["name"], "Q_x");
        assert_eq!(v["places"][1]["initial"], 1);
        assert_eq!(v["transitions"][0]["consume"]["Q_x"], 1);
        let name_pos = json.find("\"name\"").unwrap();
        assert!(name_pos < json.find("\"capacity\"").unwrap());
        assert!(json.find("\"places\"").unwrap() < json.find("\"transitions\"").unwrap());
        let back = from_json("Small \"net\"", &json).unwrap();
        assert_eq!(back, small());
    }

    #[test]
    fn json_rejects_unknown_places() {
        let text = r#"{"places":[],"transitions":[{"name":"t","consume":{"z":1},"produce":{}}]}"#;
        assert!(matches!(from_json("x", text), Err(PnError::Format(_))));
    }

    #[test]
    fn dot_layout() {
        let dot = to_dot(&small());
        assert!(dot.starts_with("digraph \"Small \\\"net\\\"\" {\n"));
        assert!(dot.contains("p0 [shape=circle, label=\"P_x\\n0\"];"));
        assert!(dot.contains("t0 [shape=box, label=\"inc_x@0\"];"));
        assert!(dot.contains("p1 -> t0 [label=\"1\"];"));
        assert!(dot.ends_with("}\n"));
    }

    #[test]
    fn transitionless_dot_has_only_places() {
        let net = PetriNet::new(
            "e",
            vec![Place {
                name: "P".into(),
                capacity: 1,
            }],
            vec![],
            Marking(vec![1]),
        )
        .unwrap();
        let dot = to_dot(&net);
        assert_eq!(dot.matches("shape=").count(), 1);
        assert!(!dot.contains("->"));
    }
}
