//! Environmental selection: NSGA-II crowding truncation and NSGA-III
//! reference-direction niching over uniform simplex directions.

use rand::Rng;

use crate::pareto::{crowding_distance, fast_nondominated_sort};

/// Uniformly spaced weight vectors on the unit simplex: all
/// `(k_1/p, ..., k_m/p)` with non-negative integers summing to `p`,
/// `C(p + m - 1, m - 1)` vectors in lexicographic order.
pub fn reference_directions(objectives: usize, divisions: usize) -> Vec<Vec<f64>> {
    assert!(objectives >= 2 && divisions >= 1);
    let mut out = Vec::new();
    let mut prefix = Vec::with_capacity(objectives);
    fill_directions(objectives, divisions, divisions, &mut prefix, &mut out);
    out
}

fn fill_directions(
    dims_left: usize,
    units_left: usize,
    divisions: usize,
    prefix: &mut Vec<f64>,
    out: &mut Vec<Vec<f64>>,
) {
    if dims_left == 1 {
        let mut v = prefix.clone();
        v.push(units_left as f64 / divisions as f64);
        out.push(v);
        return;
    }
    for units in 0..=units_left {
        prefix.push(units as f64 / divisions as f64);
        fill_directions(dims_left - 1, units_left - units, divisions, prefix, out);
        prefix.pop();
    }
}

/// Per-individual rank and crowding distance, the mating-selection key.
pub struct RankedPopulation {
    pub rank: Vec<usize>,
    pub crowding: Vec<f64>,
    pub fronts: Vec<Vec<usize>>,
}

pub fn rank_population(points: &[Vec<f64>]) -> RankedPopulation {
    let fronts = fast_nondominated_sort(points);
    let mut rank = vec![0usize; points.len()];
    let mut crowding = vec![0f64; points.len()];
    for (level, front) in fronts.iter().enumerate() {
        let members: Vec<Vec<f64>> = front.iter().map(|&i| points[i].clone()).collect();
        let d = crowding_distance(&members);
        for (&i, dist) in front.iter().zip(d) {
            rank[i] = level;
            crowding[i] = dist;
        }
    }
    RankedPopulation { rank, crowding, fronts }
}

/// Binary tournament on (rank ascending, crowding descending); the first
/// contender wins ties.
pub fn binary_tournament(ranked: &RankedPopulation, rng: &mut impl Rng) -> usize {
    let n = ranked.rank.len();
    let a = rng.random_range(0..n);
    let b = rng.random_range(0..n);
    if ranked.rank[b] < ranked.rank[a]
        || (ranked.rank[b] == ranked.rank[a] && ranked.crowding[b] > ranked.crowding[a])
    {
        b
    } else {
        a
    }
}

/// NSGA-II environmental selection: fill whole fronts, then truncate the
/// overflowing front by descending crowding distance (stable, so equal
/// crowding keeps ascending index order).
pub fn nsga2_select(points: &[Vec<f64>], take: usize) -> Vec<usize> {
    let fronts = fast_nondominated_sort(points);
    let mut selected = Vec::with_capacity(take);
    for front in fronts {
        if selected.len() == take {
            break;
        }
        if selected.len() + front.len() <= take {
            selected.extend(front);
            continue;
        }
        let members: Vec<Vec<f64>> = front.iter().map(|&i| points[i].clone()).collect();
        let d = crowding_distance(&members);
        let mut order: Vec<usize> = (0..front.len()).collect();
        order.sort_by(|&x, &y| d[y].partial_cmp(&d[x]).expect("crowding is never NaN"));
        selected.extend(order[..take - selected.len()].iter().map(|&k| front[k]));
        break;
    }
    selected.sort_unstable();
    selected
}

/// NSGA-III environmental selection: fronts fill as in NSGA-II, and the
/// overflowing front is resolved by reference-direction niching over
/// objectives normalized with ideal point and extreme-point intercepts.
pub fn nsga3_select(
    points: &[Vec<f64>],
    take: usize,
    directions: &[Vec<f64>],
    rng: &mut impl Rng,
) -> Vec<usize> {
    let fronts = fast_nondominated_sort(points);
    let mut selected: Vec<usize> = Vec::with_capacity(take);
    let mut overflow: Option<Vec<usize>> = None;
    for front in fronts {
        if selected.len() + front.len() <= take {
            selected.extend(front);
            if selected.len() == take {
                break;
            }
        } else {
            overflow = Some(front);
            break;
        }
    }
    let Some(last_front) = overflow else {
        selected.sort_unstable();
        return selected;
    };

    // Normalize over everything under consideration.
    let pool: Vec<usize> = selected.iter().chain(&last_front).copied().collect();
    let normalized = normalize(points, &pool);
    let by_pool: std::collections::HashMap<usize, usize> =
        pool.iter().enumerate().map(|(k, &i)| (i, k)).collect();

    // Associate each pool member with its closest reference direction.
    let assoc: Vec<(usize, f64)> = pool
        .iter()
        .map(|&i| closest_direction(&normalized[by_pool[&i]], directions))
        .collect();

    let mut niche_count = vec![0usize; directions.len()];
    for &i in &selected {
        niche_count[assoc[by_pool[&i]].0] += 1;
    }
    // Remaining candidates per direction.
    let mut per_direction: Vec<Vec<(usize, f64)>> = vec![Vec::new(); directions.len()];
    for &i in &last_front {
        let (dir, dist) = assoc[by_pool[&i]];
        per_direction[dir].push((i, dist));
    }
    let mut active: Vec<usize> = (0..directions.len()).collect();

    while selected.len() < take {
        // direction with the smallest niche count; random tie-break
        let min_count = active
            .iter()
            .map(|&d| niche_count[d])
            .min()
            .expect("niching always has an active direction while under-filled");
        let minimal: Vec<usize> = active
            .iter()
            .copied()
            .filter(|&d| niche_count[d] == min_count)
            .collect();
        let dir = minimal[rng.random_range(0..minimal.len())];
        let bucket = &mut per_direction[dir];
        if bucket.is_empty() {
            active.retain(|&d| d != dir);
            continue;
        }
        let pick = if niche_count[dir] == 0 {
            // empty niche: take the member closest to the direction
            let (k, _) = bucket
                .iter()
                .enumerate()
                .min_by(|(_, a), (_, b)| a.1.partial_cmp(&b.1).expect("no NaN"))
                .unwrap();
            k
        } else {
            rng.random_range(0..bucket.len())
        };
        let (chosen, _) = bucket.swap_remove(pick);
        selected.push(chosen);
        niche_count[dir] += 1;
    }
    selected.sort_unstable();
    selected
}

/// Ideal-point translation and intercept scaling per the NSGA-III
/// normalization: extreme points found by the achievement scalarizing
/// function span a hyperplane whose axis intercepts divide each objective;
/// degenerate hyperplanes fall back to the pool's per-objective range.
fn normalize(points: &[Vec<f64>], pool: &[usize]) -> Vec<Vec<f64>> {
    let dim = points[pool[0]].len();
    let mut ideal = vec![f64::INFINITY; dim];
    let mut worst = vec![f64::NEG_INFINITY; dim];
    for &i in pool {
        for m in 0..dim {
            ideal[m] = ideal[m].min(points[i][m]);
            worst[m] = worst[m].max(points[i][m]);
        }
    }
    let translated: Vec<Vec<f64>> = pool
        .iter()
        .map(|&i| (0..dim).map(|m| points[i][m] - ideal[m]).collect())
        .collect();

    // Extreme point per axis: minimal ASF with weights favoring that axis.
    let mut extremes = Vec::with_capacity(dim);
    for axis in 0..dim {
        let asf = |f: &[f64]| {
            (0..dim)
                .map(|m| f[m] / if m == axis { 1.0 } else { 1e-6 })
                .fold(f64::NEG_INFINITY, f64::max)
        };
        let best = translated
            .iter()
            .min_by(|a, b| asf(a).partial_cmp(&asf(b)).expect("no NaN"))
            .expect("pool is never empty");
        extremes.push(best.clone());
    }

    let intercepts = hyperplane_intercepts(&extremes).unwrap_or_else(|| {
        (0..dim).map(|m| worst[m] - ideal[m]).collect()
    });
    translated
        .into_iter()
        .map(|f| {
            f.into_iter()
                .zip(&intercepts)
                .map(|(v, &a)| if a > 1e-12 { v / a } else { v })
                .collect()
        })
        .collect()
}

/// Axis intercepts of the hyperplane through the extreme points. `None`
/// when the points are degenerate (singular system or non-positive
/// intercepts).
fn hyperplane_intercepts(extremes: &[Vec<f64>]) -> Option<Vec<f64>> {
    let dim = extremes.len();
    // Solve E * beta = 1; intercept along axis m is 1 / beta_m.
    let mut a: Vec<Vec<f64>> = extremes.to_vec();
    let mut b = vec![1.0f64; dim];
    for col in 0..dim {
        let pivot = (col..dim).max_by(|&r, &s| {
            a[r][col].abs().partial_cmp(&a[s][col].abs()).expect("no NaN")
        })?;
        if a[pivot][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..dim {
            let factor = a[row][col] / a[col][col];
            for k in col..dim {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut beta = vec![0.0f64; dim];
    for row in (0..dim).rev() {
        let mut sum = b[row];
        for k in row + 1..dim {
            sum -= a[row][k] * beta[k];
        }
        beta[row] = sum / a[row][row];
    }
    let intercepts: Vec<f64> = beta
        .iter()
        .map(|&bm| if bm.abs() < 1e-12 { f64::NAN } else { 1.0 / bm })
        .collect();
    intercepts.iter().all(|&v| v.is_finite() && v > 1e-12).then_some(intercepts)
}

/// Index of the closest reference direction by perpendicular distance, and
/// that distance.
fn closest_direction(point: &[f64], directions: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0usize, f64::INFINITY);
    for (d, dir) in directions.iter().enumerate() {
        let norm2: f64 = dir.iter().map(|v| v * v).sum();
        let dot: f64 = point.iter().zip(dir).map(|(p, v)| p * v).sum();
        let t = dot / norm2;
        let dist2: f64 = point
            .iter()
            .zip(dir)
            .map(|(p, v)| (p - t * v).powi(2))
            .sum();
        if dist2 < best.1 {
            best = (d, dist2);
        }
    }
    (best.0, best.1.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn direction_counts_match_the_simplex_lattice() {
        assert_eq!(reference_directions(5, 6).len(), 210, "C(10,4)");
        assert_eq!(reference_directions(3, 4).len(), 15, "C(6,2)");
        let two = reference_directions(2, 2);
        assert_eq!(two, vec![vec![0.0, 1.0], vec![0.5, 0.5], vec![1.0, 0.0]]);
    }

    #[test]
    fn directions_lie_on_the_unit_simplex() {
        for dir in reference_directions(5, 6) {
            let sum: f64 = dir.iter().sum();
            assert!((sum - 1.0).abs() < 1e-12);
            assert!(dir.iter().all(|&v| (0.0..=1.0).contains(&v)));
        }
    }

    #[test]
    fn nsga2_keeps_whole_antichains_that_fit() {
        let points = vec![vec![1.0, 4.0], vec![2.0, 3.0], vec![3.0, 2.0], vec![4.0, 1.0]];
        assert_eq!(nsga2_select(&points, 4), vec![0, 1, 2, 3]);
    }

    #[test]
    fn nsga2_prefers_lower_fronts_then_spread() {
        let points = vec![
            vec![0.0, 3.0], // front 0 boundary
            vec![1.0, 1.0], // front 0 interior, well spread
            vec![3.0, 0.0], // front 0 boundary
            vec![1.01, 0.99], // front 0 interior, crowded corner
            vec![5.0, 5.0], // dominated
        ];
        let picked = nsga2_select(&points, 4);
        assert!(!picked.contains(&4), "dominated point enters last");
        assert_eq!(picked.len(), 4);
        let picked = nsga2_select(&points, 3);
        assert!(picked.contains(&0) && picked.contains(&2), "boundaries survive truncation");
    }

    #[test]
    fn selections_agree_on_a_fitting_antichain() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        // antichain of 6 points in 2d
        let points: Vec<Vec<f64>> = (0..6)
            .map(|i| vec![f64::from(i), f64::from(5 - i)])
            .collect();
        let dirs = reference_directions(2, 6);
        let a = nsga2_select(&points, 6);
        let b = nsga3_select(&points, 6, &dirs, &mut rng);
        assert_eq!(a, b);
        assert_eq!(a, (0..6).collect::<Vec<_>>());
    }

    #[test]
    fn nsga3_niching_spreads_across_directions() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        // one crowded cluster near the f1 axis and two isolated points
        let points = vec![
            vec![0.00, 1.00],
            vec![0.01, 0.99],
            vec![0.02, 0.98],
            vec![0.03, 0.97],
            vec![1.00, 0.00],
            vec![0.50, 0.50],
            vec![2.0, 2.0], // dominated filler
            vec![3.0, 3.0], // dominated filler
        ];
        let dirs = reference_directions(2, 4);
        let picked = nsga3_select(&points, 3, &dirs, &mut rng);
        assert_eq!(picked.len(), 3);
        assert!(picked.contains(&4), "isolated extreme survives");
        assert!(picked.contains(&5), "middle direction survives");
        assert!(!picked.contains(&6) && !picked.contains(&7));
    }

    #[test]
    fn nsga3_is_deterministic_per_seed() {
        let mut points = Vec::new();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        use rand::Rng as _;
        for _ in 0..40 {
            points.push((0..5).map(|_| rng.random_range(0.0..1.0)).collect::<Vec<f64>>());
        }
        let dirs = reference_directions(5, 4);
        let a = nsga3_select(&points, 20, &dirs, &mut ChaCha8Rng::seed_from_u64(7));
        let b = nsga3_select(&points, 20, &dirs, &mut ChaCha8Rng::seed_from_u64(7));
        assert_eq!(a, b);
    }

    #[test]
    fn selected_counts_are_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        use rand::Rng as _;
        let points: Vec<Vec<f64>> = (0..50)
            .map(|_| (0..5).map(|_| rng.random_range(0.0..1.0)).collect())
            .collect();
        let dirs = reference_directions(5, 3);
        for take in [1, 7, 25, 49, 50] {
            assert_eq!(nsga2_select(&points, take).len(), take);
            assert_eq!(nsga3_select(&points, take, &dirs, &mut rng).len(), take);
        }
    }

    #[test]
    fn intercept_solver_handles_the_regular_simplex() {
        let extremes = vec![
            vec![2.0, 0.0, 0.0],
            vec![0.0, 4.0, 0.0],
            vec![0.0, 0.0, 8.0],
        ];
        let intercepts = hyperplane_intercepts(&extremes).unwrap();
        assert!((intercepts[0] - 2.0).abs() < 1e-9);
        assert!((intercepts[1] - 4.0).abs() < 1e-9);
        assert!((intercepts[2] - 8.0).abs() < 1e-9);
        // degenerate: coincident extremes
        let degenerate = vec![vec![1.0, 1.0], vec![1.0, 1.0]];
        assert!(hyperplane_intercepts(&degenerate).is_none());
    }

    #[test]
    fn tournament_prefers_rank_then_crowding() {
        // better rank beats infinite crowding; index 1 only wins the (1,1) draw
        let by_rank = RankedPopulation {
            rank: vec![0, 1],
            crowding: vec![1.0, f64::INFINITY],
            fronts: vec![vec![0], vec![1]],
        };
        // equal rank: higher crowding wins
        let by_crowding = RankedPopulation {
            rank: vec![0, 0],
            crowding: vec![f64::INFINITY, 1.0],
            fronts: vec![vec![0, 1]],
        };
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for ranked in [&by_rank, &by_crowding] {
            let wins0 = (0..4000)
                .filter(|_| binary_tournament(ranked, &mut rng) == 0)
                .count();
            // 0 wins all pairs except the (1,1) self-draw: expect about 3/4
            assert!((2700..=3300).contains(&wins0), "wins0 = {wins0}");
        }
    }
}
