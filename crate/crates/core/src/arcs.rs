//! Arcs, coverage maps, completeness and completion search.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::make_field;
use crate::plane::{Plane, PlaneError, ProjPoint};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArcError {
    #[error("points {0}, {1}, {2} are collinear")]
    Collinear(ProjPoint, ProjPoint, ProjPoint),
    #[error("point {0} is listed twice")]
    Duplicate(ProjPoint),
    #[error("{size} points exceed the arc bound q + 1 = {bound}")]
    TooLarge { size: usize, bound: usize },
    #[error("point {0} is not free, so it cannot extend the arc")]
    NotFree(ProjPoint),
    #[error(transparent)]
    Plane(#[from] PlaneError),
}

/// A set of points, no three collinear, in insertion order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arc {
    plane: Plane,
    points: Vec<ProjPoint>,
}

impl Arc {
    pub fn new(plane: &Plane, points: Vec<ProjPoint>) -> Result<Self, ArcError> {
        let mut seen = vec![false; plane.len()];
        for &p in &points {
            let i = plane.index_of(p);
            if seen[i] {
                return Err(ArcError::Duplicate(p));
            }
            seen[i] = true;
        }
        for (i, &a) in points.iter().enumerate() {
            for (j, &b) in points.iter().enumerate().skip(i + 1) {
                for &c in &points[j + 1..] {
                    if plane.collinear(a, b, c) {
                        return Err(ArcError::Collinear(a, b, c));
                    }
                }
            }
        }
        let bound = plane.q() as usize + 1;
        if points.len() > bound {
            return Err(ArcError::TooLarge {
                size: points.len(),
                bound,
            });
        }
        Ok(Arc {
            plane: plane.clone(),
            points,
        })
    }

    pub fn plane(&self) -> &Plane {
        &self.plane
    }

    pub fn points(&self) -> &[ProjPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, p: ProjPoint) -> bool {
        self.points.contains(&p)
    }

    /// Adds a point that is free with respect to the arc.
    pub fn extend(&self, p: ProjPoint) -> Result<Arc, ArcError> {
        let map = coverage(self);
        if map.flag(p) != Coverage::Free {
            return Err(ArcError::NotFree(p));
        }
        let mut points = self.points.clone();
        points.push(p);
        Ok(Arc {
            plane: self.plane.clone(),
            points,
        })
    }

    pub fn to_file(&self) -> ArcFile {
        ArcFile {
            q: self.plane.q(),
            points: self.points.iter().map(|p| p.encoded()).collect(),
            h: None,
            r0: None,
        }
    }
}

pub fn make_arc(plane: &Plane, points: Vec<ProjPoint>) -> Result<Arc, ArcError> {
    Arc::new(plane, points)
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Coverage {
    InArc,
    Covered,
    Free,
}

/// Per-point coverage flags, indexed by the plane's enumeration order.
#[derive(Clone, Debug)]
pub struct CoverageMap {
    plane: Plane,
    flags: Vec<Coverage>,
}

impl CoverageMap {
    pub fn flag(&self, p: ProjPoint) -> Coverage {
        self.flags[self.plane.index_of(p)]
    }

    pub fn flags(&self) -> &[Coverage] {
        &self.flags
    }

    pub fn free_points(&self) -> Vec<ProjPoint> {
        self.with_flag(Coverage::Free)
    }

    pub fn with_flag(&self, flag: Coverage) -> Vec<ProjPoint> {
        self.flags
            .iter()
            .enumerate()
            .filter(|(_, &f)| f == flag)
            .map(|(i, _)| self.plane.point_at(i))
            .collect()
    }

    pub fn count(&self, flag: Coverage) -> usize {
        self.flags.iter().filter(|&&f| f == flag).count()
    }

    pub fn export(&self) -> CoverageExport {
        CoverageExport {
            q: self.plane.q(),
            free: self.free_points().iter().map(|p| p.encoded()).collect(),
            covered_count: self.count(Coverage::Covered),
        }
    }
}

/// Marks every point on a line through two arc points.
pub fn coverage(arc: &Arc) -> CoverageMap {
    let plane = arc.plane();
    let mut flags = vec![Coverage::Free; plane.len()];
    for &p in arc.points() {
        flags[plane.index_of(p)] = Coverage::InArc;
    }
    let pts = arc.points();
    for (i, &a) in pts.iter().enumerate() {
        for &b in &pts[i + 1..] {
            for x in plane.points_between(a, b) {
                let f = &mut flags[plane.index_of(x)];
                if *f == Coverage::Free {
                    *f = Coverage::Covered;
                }
            }
        }
    }
    CoverageMap {
        plane: plane.clone(),
        flags,
    }
}

pub fn free_points(arc: &Arc) -> Vec<ProjPoint> {
    coverage(arc).free_points()
}

pub fn is_complete(arc: &Arc) -> bool {
    coverage(arc).count(Coverage::Free) == 0
}

/// Adds the first free point in enumeration order until none remain.
pub fn greedy_complete(arc: &Arc) -> Arc {
    let mut state = SearchState::new(arc);
    let plane = arc.plane();
    while let Some(i) = (0..plane.len()).find(|&i| state.is_free(i)) {
        state.push(i);
    }
    let mut points = arc.points().to_vec();
    points.extend(state.added.iter().map(|&i| plane.point_at(i)));
    Arc {
        plane: plane.clone(),
        points,
    }
}

/// Order in which free points are tried by [`all_completions`].
#[derive(Copy, Clone, Debug, PartialEq, Eq, Default)]
pub enum SearchOrder {
    #[default]
    Forward,
    Reverse,
}

/// Every complete extension of an arc by at most `cap` points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Completions {
    pub base_size: usize,
    pub cap: usize,
    /// Complete-arc size → the sets of added points, each sorted, the list sorted.
    pub by_size: BTreeMap<usize, Vec<Vec<ProjPoint>>>,
    /// Branches that still had free points after `cap` additions.
    pub truncated_branches: usize,
}

impl Completions {
    pub fn min_additions(&self) -> Option<usize> {
        self.by_size.keys().next().map(|s| s - self.base_size)
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.by_size.keys().copied().collect()
    }

    pub fn total(&self) -> usize {
        self.by_size.values().map(Vec::len).sum()
    }
}

/// Incremental coverage: how many secants pass through each point.
struct SearchState<'a> {
    plane: &'a Plane,
    arc: Vec<ProjPoint>,
    in_arc: Vec<bool>,
    cover: Vec<u32>,
    added: Vec<usize>,
}

impl<'a> SearchState<'a> {
    fn new(arc: &'a Arc) -> Self {
        let plane = arc.plane();
        let mut state = SearchState {
            plane,
            arc: Vec::new(),
            in_arc: vec![false; plane.len()],
            cover: vec![0; plane.len()],
            added: Vec::new(),
        };
        for &p in arc.points() {
            state.insert(p);
        }
        state
    }

    fn insert(&mut self, p: ProjPoint) {
        let plane = self.plane;
        for &a in &self.arc {
            for x in plane.points_between(a, p) {
                self.cover[plane.index_of(x)] += 1;
            }
        }
        self.in_arc[plane.index_of(p)] = true;
        self.arc.push(p);
    }

    fn push(&mut self, i: usize) {
        let p = self.plane.point_at(i);
        self.insert(p);
        self.added.push(i);
    }

    fn pop(&mut self) {
        let i = self.added.pop().expect("pop without push");
        let p = self.arc.pop().expect("arc is nonempty");
        self.in_arc[i] = false;
        let plane = self.plane;
        for &a in &self.arc {
            for x in plane.points_between(a, p) {
                self.cover[plane.index_of(x)] -= 1;
            }
        }
    }

    #[inline]
    fn is_free(&self, i: usize) -> bool {
        !self.in_arc[i] && self.cover[i] == 0
    }
}

/// Exhaustive backtracking over free points. Points are only added in
/// increasing search rank, so each added set is produced once; a leaf counts
/// as complete only when no free point at all remains.
pub fn all_completions(arc: &Arc, cap: usize, order: SearchOrder) -> Completions {
    let plane = arc.plane();
    let n = plane.len();
    let rank_to_index = |r: usize| match order {
        SearchOrder::Forward => r,
        SearchOrder::Reverse => n - 1 - r,
    };
    let mut state = SearchState::new(arc);
    let mut out = Completions {
        base_size: arc.len(),
        cap,
        by_size: BTreeMap::new(),
        truncated_branches: 0,
    };

    fn recurse(
        state: &mut SearchState<'_>,
        out: &mut Completions,
        next_rank: usize,
        cap: usize,
        n: usize,
        rank_to_index: &dyn Fn(usize) -> usize,
    ) {
        let any_free = (0..n).any(|i| state.is_free(i));
        if !any_free {
            let mut added: Vec<ProjPoint> =
                state.added.iter().map(|&i| state.plane.point_at(i)).collect();
            added.sort();
            out.by_size.entry(state.arc.len()).or_default().push(added);
            return;
        }
        if state.added.len() == cap {
            out.truncated_branches += 1;
            return;
        }
        for r in next_rank..n {
            let i = rank_to_index(r);
            if state.is_free(i) {
                state.push(i);
                recurse(state, out, r + 1, cap, n, rank_to_index);
                state.pop();
            }
        }
    }

    recurse(&mut state, &mut out, 0, cap, n, &rank_to_index);
    for sets in out.by_size.values_mut() {
        sets.sort();
    }
    out
}

/// Completions of `arc` that contain at least one of `seeds`, reported
/// relative to `arc` (each seed that is used appears among the added points).
/// Seeds that are not free for `arc` are ignored.
pub fn completions_through(
    arc: &Arc,
    seeds: &[ProjPoint],
    cap: usize,
    order: SearchOrder,
) -> Completions {
    let mut out = Completions {
        base_size: arc.len(),
        cap,
        by_size: BTreeMap::new(),
        truncated_branches: 0,
    };
    if cap == 0 {
        return out;
    }
    let map = coverage(arc);
    for &seed in seeds.iter().filter(|&&s| map.flag(s) == Coverage::Free) {
        let seeded = arc.extend(seed).expect("seed is free");
        let sub = all_completions(&seeded, cap - 1, order);
        out.truncated_branches += sub.truncated_branches;
        for (size, sets) in sub.by_size {
            let entry = out.by_size.entry(size).or_default();
            for mut set in sets {
                set.push(seed);
                set.sort();
                entry.push(set);
            }
        }
    }
    for sets in out.by_size.values_mut() {
        sets.sort();
        sets.dedup();
    }
    out
}

/// File form of an arc: `{q, points: [[x,y,z],…]}` with encoded coordinates.
/// Arcs built from the conic also carry `h` and `r0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArcFile {
    pub q: u32,
    pub points: Vec<[u32; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<Vec<[u32; 3]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r0: Option<[u32; 3]>,
}

impl ArcFile {
    pub fn to_arc(&self) -> Result<Arc, ArcError> {
        let field = make_field(self.q as u64).map_err(PlaneError::from)?;
        let plane = Plane::new(field);
        let points = self
            .points
            .iter()
            .map(|&[x, y, z]| plane.point([x as u64, y as u64, z as u64]))
            .collect::<Result<Vec<_>, _>>()?;
        Arc::new(&plane, points)
    }
}

/// `{free: [...], covered_count: n}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverageExport {
    pub q: u32,
    pub free: Vec<[u32; 3]>,
    pub covered_count: usize,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conic::ConicContext;
    use crate::field::make_field;

    fn setup(q: u64) -> (ConicContext, Plane) {
        let c = ConicContext::new(make_field(q).unwrap());
        let pl = c.plane().clone();
        (c, pl)
    }

    #[test]
    fn make_arc_examples() {
        let (c, pl) = setup(7);
        let hs = c.build_h();
        assert_eq!(make_arc(&pl, hs.h.clone()).unwrap().len(), 4);
        let pt = |e| pl.point(e).unwrap();
        let err = make_arc(&pl, vec![pt([1, 0, 0]), pt([0, 1, 0]), pt([1, 1, 0])]).unwrap_err();
        assert!(matches!(err, ArcError::Collinear(..)));
        assert_eq!(
            make_arc(&pl, vec![pt([1, 0, 0]), pt([1, 0, 0])]),
            Err(ArcError::Duplicate(pt([1, 0, 0])))
        );

        let (c, pl) = setup(19);
        let mut k = c.build_h().h;
        k.push(c.choose_r0());
        assert_eq!(make_arc(&pl, k).unwrap().len(), 11);
    }

    #[test]
    fn full_conic_is_complete() {
        for q in [3, 5, 7, 9] {
            let (c, pl) = setup(q);
            let arc = make_arc(&pl, c.conic_points().to_vec()).unwrap();
            assert!(is_complete(&arc));
        }
    }

    #[test]
    fn coverage_of_h_q19() {
        let (c, pl) = setup(19);
        let arc = make_arc(&pl, c.build_h().h).unwrap();
        let map = coverage(&arc);
        assert_eq!(map.flag(pl.point([1, 1, 0]).unwrap()), Coverage::Free);
        assert_eq!(map.count(Coverage::InArc), arc.len());
        assert_eq!(
            map.count(Coverage::InArc) + map.count(Coverage::Covered) + map.count(Coverage::Free),
            pl.len()
        );
    }

    #[test]
    fn coverage_brute_force_oracle() {
        let (c, pl) = setup(9);
        let mut pts = c.build_h().h;
        pts.push(c.choose_r0());
        let arc = make_arc(&pl, pts.clone()).unwrap();
        let map = coverage(&arc);
        for x in pl.points() {
            let expect = if pts.contains(&x) {
                Coverage::InArc
            } else if pts
                .iter()
                .enumerate()
                .any(|(i, &a)| pts[i + 1..].iter().any(|&b| pl.collinear(a, b, x)))
            {
                Coverage::Covered
            } else {
                Coverage::Free
            };
            assert_eq!(map.flag(x), expect);
        }
        // ordering of the arc does not matter
        pts.reverse();
        let rev = coverage(&make_arc(&pl, pts).unwrap());
        assert_eq!(rev.flags(), map.flags());
    }

    #[test]
    fn completeness_examples() {
        let (c, pl) = setup(17);
        let mut k = c.build_h().h;
        k.push(c.choose_r0());
        assert!(is_complete(&make_arc(&pl, k).unwrap()));

        let (c, pl) = setup(9);
        let mut k = c.build_h().h;
        k.push(c.choose_r0());
        assert!(!is_complete(&make_arc(&pl, k).unwrap()));

        let (_, pl) = setup(3);
        let two = make_arc(&pl, vec![pl.point_at(0), pl.point_at(1)]).unwrap();
        assert!(!is_complete(&two));
    }

    #[test]
    fn greedy_examples() {
        let (c, pl) = setup(19);
        let mut k = c.build_h().h;
        k.push(c.choose_r0());
        let arc = make_arc(&pl, k).unwrap();
        assert_eq!(greedy_complete(&arc), arc);
        for q in [5, 7, 9, 11] {
            let (c, pl) = setup(q);
            let arc = make_arc(&pl, c.build_h().h).unwrap();
            let done = greedy_complete(&arc);
            assert!(is_complete(&done));
            assert!(make_arc(&pl, done.points().to_vec()).is_ok());
        }
    }

    #[test]
    fn extend_requires_free_point() {
        let (c, pl) = setup(7);
        let arc = make_arc(&pl, c.build_h().h).unwrap();
        let covered = coverage(&arc).with_flag(Coverage::Covered)[0];
        assert_eq!(arc.extend(covered), Err(ArcError::NotFree(covered)));
        let free = free_points(&arc)[0];
        assert_eq!(arc.extend(free).unwrap().len(), 5);
    }

    #[test]
    fn completions_are_order_independent() {
        let (c, pl) = setup(9);
        let arc = make_arc(&pl, c.build_h().h).unwrap();
        let fwd = all_completions(&arc, 4, SearchOrder::Forward);
        let rev = all_completions(&arc, 4, SearchOrder::Reverse);
        assert_eq!(fwd, rev);
        for sets in fwd.by_size.values() {
            for added in sets {
                let mut pts = arc.points().to_vec();
                pts.extend(added);
                assert!(is_complete(&make_arc(&pl, pts).unwrap()));
            }
        }
    }

    #[test]
    fn seeded_completions_contain_a_seed() {
        let (c, pl) = setup(11);
        let arc = make_arc(&pl, c.build_h().h).unwrap();
        let all = all_completions(&arc, 4, SearchOrder::Forward);
        let seeds: Vec<_> = free_points(&arc)
            .into_iter()
            .filter(|&p| c.classify_point(p) == crate::conic::PointClass::Internal)
            .collect();
        let through = completions_through(&arc, &seeds, 4, SearchOrder::Forward);
        // same as filtering the unrestricted search
        let mut filtered = all.by_size.clone();
        for sets in filtered.values_mut() {
            sets.retain(|set| set.iter().any(|p| seeds.contains(p)));
        }
        filtered.retain(|_, sets| !sets.is_empty());
        assert_eq!(through.by_size, filtered);
    }

    #[test]
    fn arc_file_round_trip() {
        let (c, pl) = setup(11);
        let arc = make_arc(&pl, c.build_h().h).unwrap();
        let json = serde_json::to_string(&arc.to_file()).unwrap();
        let back: ArcFile = serde_json::from_str(&json).unwrap();
        assert_eq!(back.to_arc().unwrap(), arc);
    }
}
