//! Sampling, nearest-node and neighborhood primitives shared by the tree
//! planners.

use rand::Rng;

use crate::env::InfoMap;
use crate::{Error, Point3, Result};

/// Draws `m` grid points uniformly (with replacement) and keeps the one with
/// the highest information value; the first drawn wins ties. Returns the flat
/// index and the point.
pub fn tournament_sample<R: Rng + ?Sized>(im: &InfoMap, m: usize, rng: &mut R) -> (usize, Point3) {
    let len = im.values().len();
    let mut best = rng.gen_range(0..len);
    for _ in 1..m.max(1) {
        let c = rng.gen_range(0..len);
        if im.value(c) > im.value(best) {
            best = c;
        }
    }
    let ws = im.workspace();
    let (i, j, k) = ws.ijk(best);
    (best, ws.grid_point(i, j, k))
}

/// Moves from `from` toward `to` by at most `delta`.
#[inline]
pub fn steer(from: &Point3, to: &Point3, delta: f64) -> Point3 {
    let d = to - from;
    let len = d.norm();
    if len > delta {
        from + d * (delta / len)
    } else {
        *to
    }
}

/// Brute-force nearest node; ties go to the lowest index.
pub fn nearest(q: &Point3, vertex: &[Point3]) -> Result<usize> {
    let mut best: Option<(f64, usize)> = None;
    for (i, p) in vertex.iter().enumerate() {
        let d = (p - q).norm_squared();
        if best.is_none_or(|(bd, _)| d < bd) {
            best = Some((d, i));
        }
    }
    best.map(|(_, i)| i).ok_or(Error::EmptyVertexSet)
}

/// Brute-force neighborhood: indices of all nodes strictly closer than `r`.
pub fn near(vertex: &[Point3], q: &Point3, r: f64) -> Vec<usize> {
    let r2 = r * r;
    (0..vertex.len()).filter(|&i| (vertex[i] - q).norm_squared() < r2).collect()
}

/// Uniform bucket grid over node positions for nearest and radius queries.
/// Answers match [`nearest`] and [`near`] over the inserted nodes.
#[derive(Clone, Debug)]
pub struct SpatialHash {
    origin: Point3,
    h: f64,
    dims: [usize; 3],
    buckets: Vec<Vec<u32>>,
    points: Vec<(u32, Point3)>,
}

impl SpatialHash {
    /// Covers the box `lo..hi` with cubes of edge `h`.
    pub fn new(lo: Point3, hi: Point3, h: f64) -> Self {
        let dims = std::array::from_fn(|a| (((hi[a] - lo[a]) / h).floor() as usize + 1).max(1));
        SpatialHash {
            origin: lo,
            h,
            dims,
            buckets: vec![Vec::new(); dims[0] * dims[1] * dims[2]],
            points: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    #[inline]
    fn cell_of(&self, p: &Point3) -> [isize; 3] {
        std::array::from_fn(|a| {
            let c = ((p[a] - self.origin[a]) / self.h).floor() as isize;
            c.clamp(0, self.dims[a] as isize - 1)
        })
    }

    #[inline]
    fn bucket(&self, c: [isize; 3]) -> Option<&Vec<u32>> {
        if (0..3).any(|a| c[a] < 0 || c[a] >= self.dims[a] as isize) {
            return None;
        }
        let [x, y, z] = c.map(|v| v as usize);
        Some(&self.buckets[x + self.dims[0] * (y + self.dims[1] * z)])
    }

    /// Adds node `id` at `p`. Ids must be inserted in increasing order.
    pub fn insert(&mut self, id: usize, p: Point3) {
        let slot = self.points.len() as u32;
        self.points.push((id as u32, p));
        let [x, y, z] = self.cell_of(&p).map(|v| v as usize);
        self.buckets[x + self.dims[0] * (y + self.dims[1] * z)].push(slot);
    }

    /// Id of the stored node nearest to `q`, lowest id on ties.
    pub fn nearest(&self, q: &Point3) -> Option<usize> {
        if self.points.is_empty() {
            return None;
        }
        let c = self.cell_of(q);
        let max_ring = *self.dims.iter().max().unwrap() as isize;
        let mut best: Option<(f64, u32)> = None;
        for ring in 0..=max_ring {
            self.for_ring(c, ring, |slot| {
                let (id, p) = self.points[slot as usize];
                let d = (p - q).norm_squared();
                if best.is_none_or(|(bd, bid)| d < bd || (d == bd && id < bid)) {
                    best = Some((d, id));
                }
            });
            // Every node outside rings 0..=ring lies at least `ring * h` away.
            if let Some((bd, _)) = best {
                let bound = ring as f64 * self.h;
                if bd < bound * bound {
                    break;
                }
            }
        }
        best.map(|(_, id)| id as usize)
    }

    fn for_ring(&self, c: [isize; 3], ring: isize, mut f: impl FnMut(u32)) {
        for dz in -ring..=ring {
            for dy in -ring..=ring {
                for dx in -ring..=ring {
                    if dx.abs().max(dy.abs()).max(dz.abs()) != ring {
                        continue;
                    }
                    if let Some(b) = self.bucket([c[0] + dx, c[1] + dy, c[2] + dz]) {
                        b.iter().for_each(|&s| f(s));
                    }
                }
            }
        }
    }

    /// Ids of stored nodes strictly within `r` of `q`, ascending. With a cap,
    /// only the `cap` closest are kept (ties to lower ids).
    pub fn near(&self, q: &Point3, r: f64, cap: Option<usize>, out: &mut Vec<usize>) {
        out.clear();
        let r2 = r * r;
        let lo = self.cell_of(&(q - Point3::repeat(r)));
        let hi = self.cell_of(&(q + Point3::repeat(r)));
        let mut found: Vec<(f64, u32)> = Vec::new();
        for z in lo[2]..=hi[2] {
            for y in lo[1]..=hi[1] {
                for x in lo[0]..=hi[0] {
                    if let Some(b) = self.bucket([x, y, z]) {
                        for &slot in b {
                            let (id, p) = self.points[slot as usize];
                            let d = (p - q).norm_squared();
                            if d < r2 {
                                found.push((d, id));
                            }
                        }
                    }
                }
            }
        }
        if let Some(cap) = cap {
            if found.len() > cap {
                found.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                found.truncate(cap);
            }
        }
        out.extend(found.iter().map(|&(_, id)| id as usize));
        out.sort_unstable();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{DegenerateSides, Workspace};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_points(rng: &mut ChaCha8Rng, n: usize) -> Vec<Point3> {
        (0..n)
            .map(|_| Point3::new(rng.gen_range(0.0..5000.0), rng.gen_range(0.0..5000.0), rng.gen_range(-300.0..300.0)))
            .collect()
    }

    #[test]
    fn steer_examples() {
        let o = Point3::zeros();
        assert_eq!(steer(&o, &Point3::new(10.0, 0.0, 0.0), 5.0), Point3::new(5.0, 0.0, 0.0));
        assert_eq!(steer(&o, &Point3::new(3.0, 0.0, 4.0), 5.0), Point3::new(3.0, 0.0, 4.0));
        assert_eq!(steer(&o, &o, 5.0), o);
    }

    #[test]
    fn brute_force_queries() {
        let pts = vec![Point3::new(1.0, 0.0, 0.0), Point3::new(-1.0, 0.0, 0.0), Point3::new(5.0, 5.0, 5.0)];
        assert_eq!(nearest(&Point3::zeros(), &pts).unwrap(), 0);
        assert_eq!(nearest(&pts[2], &pts).unwrap(), 2);
        assert!(matches!(nearest(&Point3::zeros(), &[]), Err(Error::EmptyVertexSet)));
        assert_eq!(near(&pts, &Point3::zeros(), 1.0), Vec::<usize>::new());
        assert_eq!(near(&pts, &Point3::zeros(), 1.0 + 1e-12), vec![0, 1]);
        assert_eq!(near(&pts, &pts[2], 0.1), vec![2]);
    }

    #[test]
    fn hash_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let pts = random_points(&mut rng, 400);
        let mut hash = SpatialHash::new(Point3::new(0.0, 0.0, -300.0), Point3::new(5000.0, 5000.0, 300.0), 500.0);
        for (i, p) in pts.iter().enumerate() {
            hash.insert(i, *p);
        }
        let mut out = Vec::new();
        for q in random_points(&mut rng, 200) {
            assert_eq!(hash.nearest(&q).unwrap(), nearest(&q, &pts).unwrap());
            hash.near(&q, 500.0, None, &mut out);
            assert_eq!(out, near(&pts, &q, 500.0));
        }
        // duplicate positions resolve to the lower id
        hash.insert(400, pts[17]);
        assert_eq!(hash.nearest(&pts[17]), Some(17));
    }

    #[test]
    fn capped_neighborhood_keeps_the_closest() {
        let pts: Vec<Point3> = (0..10).map(|i| Point3::new(100.0 + 10.0 * i as f64, 100.0, 0.0)).collect();
        let mut hash = SpatialHash::new(Point3::new(0.0, 0.0, -300.0), Point3::new(5000.0, 5000.0, 300.0), 500.0);
        for (i, p) in pts.iter().enumerate() {
            hash.insert(i, *p);
        }
        let mut out = Vec::new();
        hash.near(&Point3::new(190.0, 100.0, 0.0), 500.0, Some(3), &mut out);
        assert_eq!(out, vec![7, 8, 9]);
    }

    #[test]
    fn tournament_rules() {
        let ws = Workspace::new(4, 4, 2, 10.0, 0).unwrap();
        let flat = InfoMap::from_normalized(ws.clone(), vec![0.5; ws.len()], 1.0, 1.0, DegenerateSides::default()).unwrap();
        let mut a = ChaCha8Rng::seed_from_u64(1);
        let mut b = ChaCha8Rng::seed_from_u64(1);
        let (idx, _) = tournament_sample(&flat, 10, &mut a);
        assert_eq!(idx, b.gen_range(0..ws.len()), "ties keep the first draw");

        let mut values = vec![0.1; ws.len()];
        values[7] = 0.9;
        let peaked = InfoMap::from_normalized(ws.clone(), values, 1.0, 1.0, DegenerateSides::default()).unwrap();
        let mut counts = vec![0usize; ws.len()];
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10_000 {
            counts[tournament_sample(&peaked, ws.len(), &mut rng).0] += 1;
        }
        assert!(counts.iter().all(|&c| c <= counts[7]));
    }
}
