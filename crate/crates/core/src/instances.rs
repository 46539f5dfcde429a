//! Instance generators and the plain-text instance and schedule formats.
//!
//! Randomness comes from ChaCha8 seeded with `seed_from_u64(seed)`; point
//! coordinates and angles are drawn from stream 0, edge coin flips from
//! stream 1. Edge candidates are visited in lexicographic `(i, j)`, `i < j`
//! order and kept when a uniform draw in `[0, 1)` is below `p`.

use std::fmt::Write as _;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Dimension, Instance, ModelError, Point, ScanCover, VertexId};

const POINT_STREAM: u64 = 0;
const EDGE_STREAM: u64 = 1;

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RandomParams {
    pub n: usize,
    pub p: f64,
    pub seed: u64,
}

impl RandomParams {
    fn check(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidParams("n must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::InvalidParams(format!("p = {} is outside [0, 1]", self.p)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CelestialParams {
    pub n: usize,
    pub orbit_radius: f64,
    pub obstacle_radius: f64,
    pub seed: u64,
}

impl CelestialParams {
    pub fn new(n: usize, seed: u64) -> Self {
        CelestialParams {
            n,
            orbit_radius: 1.0,
            obstacle_radius: 0.5,
            seed,
        }
    }

    fn check(&self) -> Result<()> {
        if !(self.obstacle_radius > 0.0 && self.obstacle_radius < self.orbit_radius) {
            return Err(Error::InvalidParams(format!(
                "need 0 < obstacle_radius ({}) < orbit_radius ({})",
                self.obstacle_radius, self.orbit_radius
            )));
        }
        Ok(())
    }
}

fn coin_flip_edges(n: usize, p: f64, seed: u64) -> Vec<(VertexId, VertexId)> {
    let mut r = rng(seed, EDGE_STREAM);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if r.gen::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    edges
}

/// `n` uniform points in the unit square with independent edges of probability `p`.
pub fn gen_random(params: RandomParams) -> Result<Instance> {
    params.check()?;
    let mut r = rng(params.seed, POINT_STREAM);
    let points: Vec<Point> = (0..params.n)
        .map(|_| {
            let x = r.gen::<f64>();
            let y = r.gen::<f64>();
            Point::new(x, y)
        })
        .collect();
    let mut edges = coin_flip_edges(params.n, params.p, params.seed);
    // coincident points are measure-zero; drop such edges rather than fail
    edges.retain(|&(i, j)| points[i] != points[j]);
    let inst = Instance::new(Dimension::Two, points, edges)?;
    Ok(inst.with_name(format!("random-n{}-p{}-s{}", params.n, params.p, params.seed)))
}

/// Random 1D instance: `n` uniform coordinates in `[0, 1)` with coin-flip edges.
pub fn gen_line(params: RandomParams) -> Result<Instance> {
    params.check()?;
    let mut r = rng(params.seed, POINT_STREAM);
    let coords: Vec<f64> = (0..params.n).map(|_| r.gen::<f64>()).collect();
    let mut edges = coin_flip_edges(params.n, params.p, params.seed);
    edges.retain(|&(i, j)| coords[i] != coords[j]);
    let inst = Instance::line(&coords, edges)?;
    Ok(inst.with_name(format!("line-n{}-p{}-s{}", params.n, params.p, params.seed)))
}

/// Distance from the origin to the segment `ab`.
pub fn origin_segment_distance(a: Point, b: Point) -> f64 {
    let d = b.sub(a);
    let len2 = d.x * d.x + d.y * d.y;
    if len2 == 0.0 {
        return a.norm();
    }
    let t = (-(a.x * d.x + a.y * d.y) / len2).clamp(0.0, 1.0);
    a.add(d.scale(t)).norm()
}

/// Points on a circle around a disk obstacle; `uv` is an edge iff the chord keeps
/// distance at least `obstacle_radius` from the centre (tangency counts as visible).
pub fn gen_celestial(params: CelestialParams) -> Result<Instance> {
    params.check()?;
    let mut r = rng(params.seed, POINT_STREAM);
    let mut angles: Vec<f64> = Vec::with_capacity(params.n);
    while angles.len() < params.n {
        let a = r.gen::<f64>() * std::f64::consts::TAU;
        if angles.iter().all(|&b| (a - b).abs() > 1e-12) {
            angles.push(a);
        }
    }
    let points: Vec<Point> = angles
        .iter()
        .map(|&a| Point::new(params.orbit_radius * a.cos(), params.orbit_radius * a.sin()))
        .collect();
    let mut edges = Vec::new();
    for i in 0..params.n {
        for j in i + 1..params.n {
            if origin_segment_distance(points[i], points[j]) >= params.obstacle_radius {
                edges.push((i, j));
            }
        }
    }
    let inst = Instance::new(Dimension::Two, points, edges)?;
    Ok(inst.with_name(format!(
        "celestial-n{}-r{}-s{}",
        params.n, params.obstacle_radius, params.seed
    )))
}

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

/// Non-empty, comment-stripped lines with 1-based numbers; `# name:` is captured.
struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    name: Option<String>,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Lines {
            inner: text.lines().enumerate(),
            name: None,
        }
    }
}

impl<'a> Iterator for Lines<'a> {
    // (line number, tokens with 1-based column)
    type Item = (usize, Vec<(usize, &'a str)>);

    fn next(&mut self) -> Option<Self::Item> {
        for (i, raw) in self.inner.by_ref() {
            let (body, comment) = match raw.find('#') {
                Some(k) => (&raw[..k], Some(&raw[k + 1..])),
                None => (raw, None),
            };
            if let Some(c) = comment {
                if let Some(rest) = c.trim_start().strip_prefix("name:") {
                    self.name = Some(rest.trim().to_string());
                }
            }
            let tokens: Vec<(usize, &str)> = body
                .split_whitespace()
                .map(|t| (t.as_ptr() as usize - raw.as_ptr() as usize + 1, t))
                .collect();
            if !tokens.is_empty() {
                return Some((i + 1, tokens));
            }
        }
        None
    }
}

fn num<T: std::str::FromStr>(line: usize, tok: (usize, &str), what: &str) -> Result<T> {
    tok.1
        .parse()
        .map_err(|_| parse_err(line, tok.0, format!("expected {what}, found `{}`", tok.1)))
}

fn expect_arity(line: usize, toks: &[(usize, &str)], n: usize, what: &str) -> Result<()> {
    if toks.len() != n {
        let col = toks.get(n).or(toks.last()).map_or(1, |t| t.0);
        return Err(parse_err(
            line,
            col,
            format!("{what} needs {n} field(s), found {}", toks.len()),
        ));
    }
    Ok(())
}

pub fn read_instance(text: &str) -> Result<Instance> {
    let mut lines = Lines::new(text);
    let (hl, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, 1, "missing `msc <dim> <n> <m>` header"))?;
    expect_arity(hl, &header, 4, "header")?;
    if header[0].1 != "msc" {
        return Err(parse_err(hl, header[0].0, "header must start with `msc`"));
    }
    let dim = match header[1].1 {
        "1" => Dimension::One,
        "2" => Dimension::Two,
        other => return Err(parse_err(hl, header[1].0, format!("dimension must be 1 or 2, found `{other}`"))),
    };
    let n: usize = num(hl, header[2], "vertex count")?;
    let m: usize = num(hl, header[3], "edge count")?;
    let arity = dim.as_u8() as usize;
    let mut points = Vec::with_capacity(n);
    for _ in 0..n {
        let (l, toks) = lines
            .next()
            .ok_or_else(|| parse_err(hl, 1, format!("expected {n} coordinate lines")))?;
        expect_arity(l, &toks, arity, "coordinate line")?;
        let x: f64 = num(l, toks[0], "a number")?;
        let y: f64 = if arity == 2 { num(l, toks[1], "a number")? } else { 0.0 };
        points.push(Point::new(x, y));
    }
    let mut edges = Vec::with_capacity(m);
    for _ in 0..m {
        let (l, toks) = lines
            .next()
            .ok_or_else(|| parse_err(hl, 1, format!("expected {m} edge lines")))?;
        expect_arity(l, &toks, 2, "edge line")?;
        edges.push((num(l, toks[0], "a vertex id")?, num(l, toks[1], "a vertex id")?));
    }
    if let Some((l, toks)) = lines.next() {
        return Err(parse_err(l, toks[0].0, "unexpected content after the edge list"));
    }
    let mut inst = Instance::new(dim, points, edges)?;
    inst.set_name(lines.name.take());
    Ok(inst)
}

pub fn write_instance(inst: &Instance) -> String {
    let mut s = String::new();
    if let Some(name) = inst.name() {
        let _ = writeln!(s, "# name: {name}");
    }
    let _ = writeln!(
        s,
        "msc {} {} {}",
        inst.dimension().as_u8(),
        inst.num_vertices(),
        inst.num_edges()
    );
    for p in inst.points() {
        match inst.dimension() {
            Dimension::One => {
                let _ = writeln!(s, "{}", p.x);
            }
            Dimension::Two => {
                let _ = writeln!(s, "{} {}", p.x, p.y);
            }
        }
    }
    for e in inst.edges() {
        let _ = writeln!(s, "{} {}", e.u, e.v);
    }
    s
}

/// Parses `u v t` lines; every edge must appear exactly once.
pub fn read_schedule(text: &str, inst: &Instance) -> Result<ScanCover> {
    let mut times: Vec<Option<f64>> = vec![None; inst.num_edges()];
    for (l, toks) in Lines::new(text) {
        expect_arity(l, &toks, 3, "schedule line")?;
        let u: usize = num(l, toks[0], "a vertex id")?;
        let v: usize = num(l, toks[1], "a vertex id")?;
        let t: f64 = num(l, toks[2], "a time")?;
        let e = inst
            .edge_id(u, v)
            .filter(|_| u < inst.num_vertices() && v < inst.num_vertices())
            .ok_or_else(|| parse_err(l, toks[0].0, format!("({u}, {v}) is not an edge")))?;
        if times[e].replace(t).is_some() {
            return Err(parse_err(l, toks[0].0, format!("edge ({u}, {v}) scheduled twice")));
        }
    }
    let got = times.iter().filter(|t| t.is_some()).count();
    if got != times.len() {
        return Err(ModelError::MissingEdgeTime {
            expected: times.len(),
            got,
        }
        .into());
    }
    Ok(ScanCover::new(times.into_iter().map(Option::unwrap).collect())?)
}

pub fn write_schedule(inst: &Instance, sc: &ScanCover) -> String {
    let mut s = String::new();
    for (e, edge) in inst.edges().iter().enumerate() {
        let _ = writeln!(s, "{} {} {}", edge.u, edge.v, sc.time(e));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate;

    #[test]
    fn tiny_random_graphs() {
        let one = gen_random(RandomParams { n: 1, p: 1.0, seed: 3 }).unwrap();
        assert_eq!(one.num_edges(), 0);
        let k5 = gen_random(RandomParams { n: 5, p: 1.0, seed: 3 }).unwrap();
        assert_eq!(k5.num_edges(), 10);
        assert!(gen_random(RandomParams { n: 0, p: 0.5, seed: 0 }).is_err());
        assert!(gen_random(RandomParams { n: 3, p: 1.5, seed: 0 }).is_err());
    }

    #[test]
    fn random_is_deterministic_and_in_square() {
        let a = gen_random(RandomParams { n: 12, p: 0.4, seed: 99 }).unwrap();
        let b = gen_random(RandomParams { n: 12, p: 0.4, seed: 99 }).unwrap();
        assert_eq!(a, b);
        assert!(a.points().iter().all(|p| (0.0..1.0).contains(&p.x) && (0.0..1.0).contains(&p.y)));
    }

    #[test]
    fn random_edge_count_matches_binomial_mean() {
        // n = 15, p = 0.67: mean 70.35 per instance
        let trials = 200;
        let (n, p) = (15usize, 0.67f64);
        let pairs = (n * (n - 1) / 2) as f64;
        let total: usize = (0..trials)
            .map(|s| gen_random(RandomParams { n, p, seed: s }).unwrap().num_edges())
            .sum();
        let mean = total as f64 / trials as f64;
        let sigma_of_mean = (pairs * p * (1.0 - p) / trials as f64).sqrt();
        assert!((mean - pairs * p).abs() <= 3.0 * sigma_of_mean, "mean {mean}");
        assert!((pairs * p - 70.35).abs() < 1e-9);
    }

    #[test]
    fn celestial_examples() {
        let a = Point::new(1.0, 0.0);
        assert_eq!(origin_segment_distance(a, Point::new(-1.0, 0.0)), 0.0);
        let b = Point::polar(1.0);
        let d = origin_segment_distance(a, b);
        assert!((d - 0.5f64.to_radians().cos()).abs() < 1e-12);

        let all = gen_celestial(CelestialParams {
            n: 9,
            orbit_radius: 1.0,
            obstacle_radius: 1e-300,
            seed: 5,
        })
        .unwrap();
        assert_eq!(all.num_edges(), 36);

        let inst = gen_celestial(CelestialParams::new(14, 2)).unwrap();
        for i in 0..14 {
            for j in i + 1..14 {
                let vis = origin_segment_distance(inst.point(i), inst.point(j)) >= 0.5;
                assert_eq!(vis, inst.edge_id(i, j).is_some());
            }
        }
        assert!(gen_celestial(CelestialParams { obstacle_radius: 1.0, ..CelestialParams::new(3, 0) }).is_err());
    }

    #[test]
    fn instance_round_trip() {
        let text = "msc 2 2 1\n0 0\n1 0.5\n0 1\n";
        let inst = read_instance(text).unwrap();
        assert_eq!((inst.num_vertices(), inst.num_edges()), (2, 1));

        let dup = "msc 2 2 2\n0 0\n1 1\n0 1\n1 0\n";
        assert!(matches!(read_instance(dup), Err(Error::Model(ModelError::DuplicateEdge { .. }))));

        let k5 = gen_random(RandomParams { n: 5, p: 1.0, seed: 7 }).unwrap();
        assert_eq!(read_instance(&write_instance(&k5)).unwrap(), k5);

        let line = gen_line(RandomParams { n: 6, p: 0.5, seed: 1 }).unwrap();
        assert_eq!(read_instance(&write_instance(&line)).unwrap(), line);
    }

    #[test]
    fn parse_errors_carry_position() {
        let err = read_instance("msc 2 1 0\n0 abc\n").unwrap_err();
        assert_eq!(err, Error::Parse { line: 2, column: 3, message: "expected a number, found `abc`".into() });
        assert!(matches!(read_instance("# only comments\n"), Err(Error::Parse { .. })));
        assert!(matches!(read_instance("msc 3 0 0\n"), Err(Error::Parse { line: 1, column: 5, .. })));
    }

    #[test]
    fn schedule_round_trip() {
        let empty = Instance::plane(&[(0.0, 0.0)], vec![]).unwrap();
        assert!(read_schedule("", &empty).unwrap().is_empty());

        let path = Instance::line(&[0.0, 1.0, 2.0], vec![(0, 1), (1, 2)]).unwrap();
        assert!(matches!(
            read_schedule("0 1 0\n", &path),
            Err(Error::Model(ModelError::MissingEdgeTime { expected: 2, got: 1 }))
        ));
        assert!(matches!(read_schedule("0 2 0\n", &path), Err(Error::Parse { .. })));

        let sc = ScanCover::new(vec![0.0, 180.0]).unwrap();
        let back = read_schedule(&write_schedule(&path, &sc), &path).unwrap();
        assert_eq!(back, sc);
        assert!(validate(&path, &back).unwrap().is_ok());
    }
}
