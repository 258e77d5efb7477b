//! Seeded random graphs and formulas for property checks.

use crate::graph::LabeledGraph;
use crate::logic::Formula;
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const DEFAULT_SEED: u64 = 0x5eed_2019;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// G(n, p) with each named label holding a random subset.
pub fn random_graph(rng: &mut impl Rng, n: usize, p: f64, labels: &[&str]) -> LabeledGraph {
    let mut g = LabeledGraph::new(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                g.add_edge(u, v).expect("in range");
            }
        }
    }
    for l in labels {
        let set = (0..n).filter(|_| rng.gen_bool(0.5)).collect::<Vec<_>>();
        g.set_label(l, set).expect("in range");
    }
    g
}

/// Graphs on `1..=max_n` vertices, `per_size` of each, with mixed densities.
pub fn graph_corpus(seed: u64, max_n: usize, per_size: usize, labels: &[&str]) -> Vec<LabeledGraph> {
    let mut r = rng(seed);
    let mut out = Vec::new();
    for n in 1..=max_n {
        for i in 0..per_size {
            let p = [0.2, 0.4, 0.6][i % 3];
            out.push(random_graph(&mut r, n, p, labels));
        }
    }
    out
}

/// Random formula generator.
#[derive(Clone, Debug)]
pub struct FormulaGen {
    pub depth: usize,
    pub labels: Vec<String>,
    pub set_quantifiers: bool,
    pub closures: bool,
}

impl Default for FormulaGen {
    fn default() -> Self {
        FormulaGen {
            depth: 3,
            labels: vec!["a".into()],
            set_quantifiers: true,
            closures: false,
        }
    }
}

const VERTEX_NAMES: [&str; 4] = ["x", "y", "z", "w"];
const SET_NAMES: [&str; 2] = ["S", "T"];

impl FormulaGen {
    /// A sentence: every variable is bound.
    pub fn sentence(&self, rng: &mut impl Rng) -> Formula {
        self.gen(rng, self.depth, &mut Vec::new(), &mut Vec::new())
    }

    /// A formula whose free vertex variables are among `free`.
    pub fn open(&self, rng: &mut impl Rng, free: &[&str]) -> Formula {
        let mut vs: Vec<String> = free.iter().map(|s| s.to_string()).collect();
        self.gen(rng, self.depth, &mut vs, &mut Vec::new())
    }

    fn atom(&self, rng: &mut impl Rng, vs: &[String], ss: &[String]) -> Formula {
        if vs.is_empty() {
            return Formula::Bool(rng.gen());
        }
        let x = vs.choose(rng).expect("nonempty").clone();
        let y = vs.choose(rng).expect("nonempty").clone();
        match rng.gen_range(0..4) {
            0 => Formula::Edge(x, y),
            1 => Formula::Eq(x, y),
            2 if !ss.is_empty() => Formula::InSet(ss.choose(rng).expect("nonempty").clone(), x),
            _ if !self.labels.is_empty() => {
                Formula::Label(self.labels.choose(rng).expect("nonempty").clone(), x)
            }
            _ => Formula::Edge(x, y),
        }
    }

    fn gen(&self, rng: &mut impl Rng, depth: usize, vs: &mut Vec<String>, ss: &mut Vec<String>) -> Formula {
        if depth == 0 || (!vs.is_empty() && rng.gen_bool(0.2)) {
            return self.atom(rng, vs, ss);
        }
        let choice = rng.gen_range(0..10);
        match choice {
            0 => Formula::not(self.gen(rng, depth - 1, vs, ss)),
            1 | 2 => {
                let a = self.gen(rng, depth - 1, vs, ss);
                let b = self.gen(rng, depth - 1, vs, ss);
                match rng.gen_range(0..3) {
                    0 => Formula::and(a, b),
                    1 => Formula::or(a, b),
                    _ => Formula::implies(a, b),
                }
            }
            7 if self.set_quantifiers => {
                let s = SET_NAMES.choose(rng).expect("nonempty").to_string();
                ss.push(s.clone());
                let body = self.gen(rng, depth - 1, vs, ss);
                ss.pop();
                if rng.gen() {
                    Formula::exists_s(&s, body)
                } else {
                    Formula::forall_s(&s, body)
                }
            }
            8 if self.closures && !vs.is_empty() => {
                let a = vs.choose(rng).expect("nonempty").clone();
                let b = vs.choose(rng).expect("nonempty").clone();
                let mut inner = vs.clone();
                inner.extend(["u".to_string(), "v".to_string()]);
                let body = self.gen(rng, depth.min(2) - 1, &mut inner, &mut Vec::new());
                Formula::Tc {
                    u: "u".into(),
                    v: "v".into(),
                    body: Box::new(body),
                    a,
                    b,
                }
            }
            _ => {
                let x = VERTEX_NAMES.choose(rng).expect("nonempty").to_string();
                vs.push(x.clone());
                let body = self.gen(rng, depth - 1, vs, ss);
                vs.pop();
                if rng.gen() {
                    Formula::exists_v(&x, body)
                } else {
                    Formula::forall_v(&x, body)
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_is_deterministic() {
        let a = graph_corpus(7, 5, 2, &["a"]);
        let b = graph_corpus(7, 5, 2, &["a"]);
        assert_eq!(a.len(), 10);
        for (g, h) in a.iter().zip(&b) {
            assert_eq!(g.to_json_string(), h.to_json_string());
        }
    }

    #[test]
    fn sentences_are_closed_and_shallow() {
        let gen = FormulaGen::default();
        let mut r = rng(1);
        for _ in 0..200 {
            let f = gen.sentence(&mut r);
            let (fv, fs) = f.free_vars();
            assert!(fv.is_empty() && fs.is_empty(), "{f}");
            assert!(f.depth() <= 3, "{f}");
        }
    }
}
