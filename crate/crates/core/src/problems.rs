//! Benchmark objectives, TSP instances, and an exhaustive TSP oracle.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use crate::aco::{DistanceGraph, Tour};
use crate::error::{Error, Result};
use crate::objective::ObjectiveSpec;
use crate::rng::UniformSource;

/// `sum x[i]^2`
pub fn sphere(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

/// `10 d + sum (x[i]^2 - 10 cos(2 pi x[i]))`
pub fn rastrigin(x: &[f64]) -> f64 {
    10.0 * x.len() as f64
        + x.iter()
            .map(|v| v * v - 10.0 * (2.0 * PI * v).cos())
            .sum::<f64>()
}

/// `sum_{i < d-1} 100 (x[i+1] - x[i]^2)^2 + (1 - x[i])^2`
pub fn rosenbrock(x: &[f64]) -> f64 {
    x.windows(2)
        .map(|w| {
            let a = w[1] - w[0] * w[0];
            let b = 1.0 - w[0];
            100.0 * a * a + b * b
        })
        .sum()
}

pub const SPHERE_BOUND: f64 = 5.12;
pub const RASTRIGIN_BOUND: f64 = 5.12;
pub const ROSENBROCK_BOUND: f64 = 2.048;

/// Names accepted by [`benchmark`].
pub const BENCHMARK_NAMES: [&str; 3] = ["sphere", "rastrigin", "rosenbrock"];

#[derive(Debug, Clone)]
pub struct BenchmarkFunction {
    pub name: &'static str,
    pub spec: ObjectiveSpec,
    pub optimum_position: Vec<f64>,
    pub optimum_fitness: f64,
}

impl BenchmarkFunction {
    pub fn sphere(dim: usize) -> Result<Self> {
        Self::build("sphere", dim, SPHERE_BOUND, sphere, 0.0)
    }

    pub fn rastrigin(dim: usize) -> Result<Self> {
        Self::build("rastrigin", dim, RASTRIGIN_BOUND, rastrigin, 0.0)
    }

    pub fn rosenbrock(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::config("rosenbrock needs dim >= 2"));
        }
        Self::build("rosenbrock", dim, ROSENBROCK_BOUND, rosenbrock, 1.0)
    }

    fn build(
        name: &'static str,
        dim: usize,
        bound: f64,
        f: fn(&[f64]) -> f64,
        optimum_coord: f64,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::config(format!("{name} needs dim >= 1")));
        }
        Ok(BenchmarkFunction {
            name,
            spec: ObjectiveSpec::uniform_bounds(dim, -bound, bound, f)?,
            optimum_position: vec![optimum_coord; dim],
            optimum_fitness: 0.0,
        })
    }
}

/// Looks a benchmark up by name.
pub fn benchmark(name: &str, dim: usize) -> Result<BenchmarkFunction> {
    match name {
        "sphere" => BenchmarkFunction::sphere(dim),
        "rastrigin" => BenchmarkFunction::rastrigin(dim),
        "rosenbrock" => BenchmarkFunction::rosenbrock(dim),
        other => Err(Error::config(format!(
            "unknown benchmark {other} (expected one of {})",
            BENCHMARK_NAMES.join(", ")
        ))),
    }
}

/// Sphere on its standard box; panics only for `dim == 0`.
pub fn sphere_objective(dim: usize) -> ObjectiveSpec {
    BenchmarkFunction::sphere(dim).expect("dim >= 1").spec
}

#[derive(Debug, Clone, PartialEq)]
pub enum TspSource {
    Coordinates(Vec<(f64, f64)>),
    Explicit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TspInstance {
    pub name: String,
    pub source: TspSource,
    pub graph: DistanceGraph,
}

impl TspInstance {
    pub fn from_points(name: impl Into<String>, points: Vec<(f64, f64)>) -> Result<Self> {
        let graph = DistanceGraph::from_points(&points)?;
        Ok(TspInstance {
            name: name.into(),
            source: TspSource::Coordinates(points),
            graph,
        })
    }

    pub fn from_graph(name: impl Into<String>, graph: DistanceGraph) -> Self {
        TspInstance {
            name: name.into(),
            source: TspSource::Explicit,
            graph,
        }
    }

    pub fn len(&self) -> usize {
        self.graph.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graph.is_empty()
    }

    /// Instance file text; `None` for explicit-matrix instances.
    pub fn to_text(&self) -> Option<String> {
        let TspSource::Coordinates(points) = &self.source else {
            return None;
        };
        let mut out = String::new();
        let _ = writeln!(out, "# {}", self.name);
        let _ = writeln!(out, "{}", points.len());
        for (i, (x, y)) in points.iter().enumerate() {
            let _ = writeln!(out, "{i} {x:?} {y:?}");
        }
        Some(out)
    }
}

/// Parses the plain-text instance format:
///
/// ```text
/// # comment
/// 4
/// 0 0.0 0.0
/// 1 0.0 1.0
/// 2 1.0 1.0
/// 3 1.0 0.0
/// ```
///
/// Blank lines and lines starting with `#` are skipped. The first remaining
/// line is the node count; each following line is `index x y` with indices
/// `0..n` in order. Errors carry the 1-based line number.
pub fn load_tsp_instance(text: &str) -> Result<TspInstance> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (count_line, count_text) = lines
        .next()
        .ok_or_else(|| Error::parse(text.lines().count().max(1), "missing node count"))?;
    let n: usize = count_text
        .parse()
        .map_err(|_| Error::parse(count_line, format!("invalid node count {count_text:?}")))?;
    if n < DistanceGraph::MIN_NODES {
        return Err(Error::parse(count_line, "n < 3"));
    }

    let mut points: Vec<Option<(f64, f64)>> = vec![None; n];
    let mut last_line = count_line;
    for expected in 0..n {
        let (line_no, line) = lines.next().ok_or_else(|| {
            Error::parse(last_line, format!("expected {n} points, found {expected}"))
        })?;
        last_line = line_no;
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [idx, x, y] = fields[..] else {
            return Err(Error::parse(line_no, "expected \"index x y\""));
        };
        let idx: usize = idx
            .parse()
            .map_err(|_| Error::parse(line_no, format!("invalid index {idx:?}")))?;
        let coord = |s: &str| {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::parse(line_no, format!("invalid coordinate {s:?}")))
        };
        let point = (coord(x)?, coord(y)?);
        if idx < n && points[idx].is_some() {
            return Err(Error::parse(
                line_no,
                format!("duplicate point index {idx}"),
            ));
        }
        if idx != expected {
            return Err(Error::parse(
                line_no,
                format!("expected index {expected}, found {idx}"),
            ));
        }
        points[idx] = Some(point);
    }
    if let Some((line_no, _)) = lines.next() {
        return Err(Error::parse(
            line_no,
            format!("unexpected data after {n} points"),
        ));
    }
    let points: Vec<(f64, f64)> = points.into_iter().map(|p| p.expect("filled")).collect();
    TspInstance::from_points("unnamed", points).map_err(|e| Error::parse(count_line, e.to_string()))
}

/// Reads an instance file, naming the instance after the file stem.
pub fn load_tsp_file(path: &Path) -> Result<TspInstance> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut inst = load_tsp_instance(&text)?;
    if let Some(stem) = path.file_stem() {
        inst.name = stem.to_string_lossy().into_owned();
    }
    Ok(inst)
}

/// `n` points uniform in the unit square.
pub fn random_tsp_instance(n: usize, rng: &mut impl UniformSource) -> Result<TspInstance> {
    if n < DistanceGraph::MIN_NODES {
        return Err(Error::config(format!("n < 3 (got {n})")));
    }
    let points = (0..n)
        .map(|_| {
            let x = rng.next_uniform();
            (x, rng.next_uniform())
        })
        .collect();
    TspInstance::from_points(format!("random{n}"), points)
}

/// Largest instance [`brute_force_tsp`] accepts.
pub const BRUTE_FORCE_MAX_NODES: usize = 11;

/// Calls `visit` with every distinct undirected closed tour on `n` nodes,
/// in lexicographic order.
///
/// Node 0 is fixed first and of each tour/reversal pair only the orientation
/// with `order[1] < order[n - 1]` is produced, giving `(n-1)!/2` tours.
pub fn for_each_distinct_tour(n: usize, mut visit: impl FnMut(&[usize])) {
    fn extend(order: &mut Vec<usize>, used: &mut [bool], visit: &mut dyn FnMut(&[usize])) {
        let n = used.len();
        if order.len() == n {
            if order[1] < order[n - 1] {
                visit(order);
            }
            return;
        }
        for v in 1..n {
            if !used[v] {
                used[v] = true;
                order.push(v);
                extend(order, used, visit);
                order.pop();
                used[v] = false;
            }
        }
    }
    if n < DistanceGraph::MIN_NODES {
        return;
    }
    let mut used = vec![false; n];
    used[0] = true;
    let mut order = vec![0];
    extend(&mut order, &mut used, &mut visit);
}

/// Exact shortest tour by enumeration; ties go to the lexicographically
/// smallest order.
pub fn brute_force_tsp(instance: &TspInstance) -> Result<Tour> {
    let graph = &instance.graph;
    let n = graph.len();
    if n > BRUTE_FORCE_MAX_NODES {
        return Err(Error::config(format!(
            "brute force refused: {n} nodes exceeds the limit of {BRUTE_FORCE_MAX_NODES}"
        )));
    }
    let mut best: Option<(f64, Vec<usize>)> = None;
    for_each_distinct_tour(n, |order| {
        let len: f64 = (0..n)
            .map(|k| graph.distance(order[k], order[(k + 1) % n]))
            .sum();
        if best.as_ref().is_none_or(|(b, _)| len < *b) {
            best = Some((len, order.to_vec()));
        }
    });
    let (length, order) = best.expect("n >= 3 has at least one tour");
    Ok(Tour { order, length })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::derive_stream;

    const SQUARE: &str = "4\n0 0 0\n1 0 1\n2 1 1\n3 1 0\n";

    #[test]
    fn sphere_values() {
        assert_eq!(sphere(&[0.0; 5]), 0.0);
        assert_eq!(sphere(&[1.0, 2.0]), 5.0);
        assert_eq!(sphere(&[0.3, -1.7]), sphere(&[-0.3, 1.7]));
    }

    #[test]
    fn rastrigin_values() {
        assert_eq!(rastrigin(&[0.0; 4]), 0.0);
        assert!((rastrigin(&[1.0, 1.0]) - 2.0).abs() < 1e-12);
        assert_eq!(rastrigin(&[0.3, -1.7]), rastrigin(&[-0.3, 1.7]));
    }

    #[test]
    fn rosenbrock_values() {
        assert_eq!(rosenbrock(&[1.0; 6]), 0.0);
        assert_eq!(rosenbrock(&[0.0, 0.0]), 1.0);
        assert_eq!(rosenbrock(&[1.0, 2.0]), 100.0);
        assert!(BenchmarkFunction::rosenbrock(1).is_err());
    }

    #[test]
    fn known_optima_hold() {
        for name in BENCHMARK_NAMES {
            for dim in [2, 5, 30] {
                let b = benchmark(name, dim).unwrap();
                let f = b.spec.evaluate(&b.optimum_position);
                assert!((f - b.optimum_fitness).abs() < 1e-12, "{name} d={dim}: {f}");
            }
        }
        assert!(benchmark("ackley", 2).is_err());
        assert_eq!(benchmark("rosenbrock", 3).unwrap().spec.upper()[0], 2.048);
    }

    #[test]
    fn parses_square() {
        let inst = load_tsp_instance(SQUARE).unwrap();
        assert_eq!(inst.len(), 4);
        assert_eq!(inst.graph.distance(0, 2), 2f64.sqrt());
        assert_eq!(inst.graph.distance(0, 1), 1.0);
    }

    #[test]
    fn skips_comments_and_blank_lines() {
        let text = "# unit square\n\n4\n# points follow\n0 0 0\n\n1 0 1\n2 1 1\n3 1 0";
        assert_eq!(
            load_tsp_instance(text).unwrap().graph,
            load_tsp_instance(SQUARE).unwrap().graph
        );
    }

    fn parse_err(text: &str) -> (usize, String) {
        match load_tsp_instance(text) {
            Err(Error::Parse { line, message }) => (line, message),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn parse_errors_name_lines() {
        assert_eq!(parse_err("2\n0 0 0\n1 1 1\n"), (1, "n < 3".into()));
        assert_eq!(parse_err("3\n0 0 0\n0 1 1\n2 1 0\n").0, 3);
        assert!(parse_err("3\n0 0 0\n0 1 1\n2 1 0\n")
            .1
            .contains("duplicate"));
        assert_eq!(parse_err("3\n0 0 0\n1 x 1\n2 1 0\n").0, 3);
        assert_eq!(parse_err("3\n0 0 0\n1 1\n2 1 0\n").0, 3);
        assert_eq!(parse_err("3\n0 0 0\n2 1 1\n1 1 0\n").0, 3);
        assert_eq!(parse_err("3\n0 0 0\n1 1 1\n").0, 3);
        assert_eq!(parse_err("3\n0 0 0\n1 1 1\n2 1 0\n3 5 5\n").0, 5);
        assert_eq!(parse_err("three\n").0, 1);
        assert_eq!(parse_err("# only a comment\n").1, "missing node count");
    }

    #[test]
    fn coincident_points_rejected() {
        assert!(load_tsp_instance("3\n0 0 0\n1 0 0\n2 1 0\n").is_err());
    }

    #[test]
    fn serialize_round_trips() {
        let mut rng = derive_stream(17, 0);
        let inst = random_tsp_instance(9, &mut rng).unwrap();
        let back = load_tsp_instance(&inst.to_text().unwrap()).unwrap();
        assert_eq!(back.source, inst.source);
        assert_eq!(back.graph, inst.graph);
        let explicit = TspInstance::from_graph("m", inst.graph.clone());
        assert!(explicit.to_text().is_none());
    }

    #[test]
    fn random_instances() {
        let a = random_tsp_instance(8, &mut derive_stream(1, 0)).unwrap();
        let b = random_tsp_instance(8, &mut derive_stream(1, 0)).unwrap();
        assert_eq!(a, b);
        let TspSource::Coordinates(pts) = &a.source else {
            panic!()
        };
        assert!(pts
            .iter()
            .all(|&(x, y)| (0.0..1.0).contains(&x) && (0.0..1.0).contains(&y)));
        for i in 0..8 {
            for j in 0..8 {
                assert_eq!(a.graph.distance(i, j), a.graph.distance(j, i));
            }
        }
        assert!(random_tsp_instance(2, &mut derive_stream(1, 0)).is_err());
    }

    #[test]
    fn distinct_tour_counts() {
        for (n, expected) in [(3, 1), (4, 3), (5, 12), (6, 60), (7, 360)] {
            let mut count = 0;
            for_each_distinct_tour(n, |_| count += 1);
            assert_eq!(count, expected, "n={n}");
        }
    }

    #[test]
    fn brute_force_square_and_triangle() {
        let sq = load_tsp_instance(SQUARE).unwrap();
        let mut lengths = Vec::new();
        for_each_distinct_tour(4, |o| {
            lengths.push(crate::aco::tour_length(&sq.graph, o).unwrap())
        });
        assert_eq!(lengths.len(), 3);
        let best = brute_force_tsp(&sq).unwrap();
        assert_eq!(best.length, 4.0);
        assert_eq!(best.order, vec![0, 1, 2, 3]);

        let tri = TspInstance::from_points("t", vec![(0.0, 0.0), (3.0, 0.0), (0.0, 4.0)]).unwrap();
        assert_eq!(brute_force_tsp(&tri).unwrap().length, 12.0);
    }

    #[test]
    fn brute_force_refuses_large_instances() {
        let inst = random_tsp_instance(12, &mut derive_stream(3, 0)).unwrap();
        assert!(brute_force_tsp(&inst).is_err());
    }
}
