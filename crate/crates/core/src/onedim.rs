//! Exact solver for total and bottleneck energy on instances embedded on a line.
//!
//! Vertices with neighbours on both sides must turn around once (180°); all
//! others face their neighbours from the start. Sweeping the two-sided
//! vertices left to right, one after another, meets that bound.

use crate::error::{Error, Result};
use crate::model::{evaluate_unchecked, Dimension, Evaluation, Instance, ScanCover, VertexId};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SideClassification {
    /// Vertices with neighbours on both sides, sorted by coordinate (ties by id).
    pub both_side_vertices: Vec<VertexId>,
    pub k: usize,
}

fn require_line(inst: &Instance) -> Result<()> {
    if inst.dimension() != Dimension::One {
        return Err(Error::WrongDimension {
            expected: 1,
            got: inst.dimension().as_u8(),
        });
    }
    Ok(())
}

pub fn classify(inst: &Instance) -> Result<SideClassification> {
    require_line(inst)?;
    let x = |v: VertexId| inst.point(v).x;
    let mut both: Vec<VertexId> = (0..inst.num_vertices())
        .filter(|&v| {
            let left = inst.neighbors(v).any(|w| x(w) < x(v));
            let right = inst.neighbors(v).any(|w| x(w) > x(v));
            left && right
        })
        .collect();
    both.sort_by(|&a, &b| x(a).total_cmp(&x(b)).then(a.cmp(&b)));
    let k = both.len();
    Ok(SideClassification {
        both_side_vertices: both,
        k,
    })
}

/// Optimal schedule for total and bottleneck energy; makespan is `180 k`.
pub fn solve(inst: &Instance) -> Result<(ScanCover, Evaluation)> {
    let cls = classify(inst)?;
    let mut index = vec![0usize; inst.num_vertices()];
    for (i, &v) in cls.both_side_vertices.iter().enumerate() {
        index[v] = i + 1;
    }
    let times = inst
        .edges()
        .iter()
        .map(|e| {
            let left = if inst.point(e.u).x < inst.point(e.v).x { e.u } else { e.v };
            180.0 * index[left] as f64
        })
        .collect();
    let sc = ScanCover::from_times_unchecked(times);
    let ev = evaluate_unchecked(inst, &sc);
    Ok((sc, ev))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate;

    fn path(n: usize) -> Instance {
        let xs: Vec<f64> = (0..n).map(|i| i as f64).collect();
        Instance::line(&xs, (1..n).map(|i| (i - 1, i)).collect()).unwrap()
    }

    #[test]
    fn classification_examples() {
        assert_eq!(classify(&path(3)).unwrap().both_side_vertices, vec![1]);
        let star = Instance::line(&[0.0, 1.0, 2.0, 3.0], vec![(0, 1), (0, 2), (0, 3)]).unwrap();
        assert_eq!(classify(&star).unwrap().k, 0);
        assert_eq!(classify(&path(5)).unwrap().both_side_vertices, vec![1, 2, 3]);
        let plane = Instance::plane(&[(0.0, 0.0)], vec![]).unwrap();
        assert_eq!(classify(&plane), Err(Error::WrongDimension { expected: 1, got: 2 }));
    }

    #[test]
    fn solve_examples() {
        let star = Instance::line(&[0.0, 1.0, 2.0, 3.0], vec![(0, 1), (0, 2), (0, 3)]).unwrap();
        let (sc, ev) = solve(&star).unwrap();
        assert!(sc.times().iter().all(|&t| t == 0.0));
        assert_eq!((ev.total_energy, ev.bottleneck_energy), (0.0, 0.0));

        let (_, ev) = solve(&path(3)).unwrap();
        assert_eq!((ev.total_energy, ev.bottleneck_energy), (180.0, 180.0));

        let (sc, ev) = solve(&path(5)).unwrap();
        assert_eq!((ev.total_energy, ev.bottleneck_energy, ev.makespan), (540.0, 180.0, 540.0));
        assert!(validate(&path(5), &sc).unwrap().is_ok());
    }

    #[test]
    fn unsorted_ids_and_shared_coordinates() {
        // vertices 2 and 3 share x = 1 but are not adjacent
        let inst = Instance::line(&[2.0, 0.0, 1.0, 1.0, 3.0], vec![(1, 2), (2, 0), (0, 4), (1, 3), (3, 0)]).unwrap();
        let cls = classify(&inst).unwrap();
        assert_eq!(cls.both_side_vertices, vec![2, 3, 0]);
        let (sc, ev) = solve(&inst).unwrap();
        assert!(validate(&inst, &sc).unwrap().is_ok());
        assert_eq!(ev.total_energy, 540.0);
        assert_eq!(ev.bottleneck_energy, 180.0);
    }
}
