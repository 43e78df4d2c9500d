//! Dominance under (minimize mass, maximize R_w): filtering, ranking, crowding, hypervolume.

/// Anything carrying the two objectives.
pub trait Objectives {
    fn mass(&self) -> f64;
    fn workspace_radius(&self) -> f64;
}

impl Objectives for (f64, f64) {
    fn mass(&self) -> f64 {
        self.0
    }

    fn workspace_radius(&self) -> f64 {
        self.1
    }
}

/// `a` dominates `b`: no worse in both objectives, strictly better in one.
pub fn dominates<A: Objectives + ?Sized, B: Objectives + ?Sized>(a: &A, b: &B) -> bool {
    let (ma, ra, mb, rb) = (a.mass(), a.workspace_radius(), b.mass(), b.workspace_radius());
    ma <= mb && ra >= rb && (ma < mb || ra > rb)
}

fn finite<T: Objectives>(p: &T) -> bool {
    p.mass().is_finite() && p.workspace_radius().is_finite()
}

/// Indices of the non-dominated points, sorted by R_w ascending.
/// Of several points with identical objectives only the earliest is kept; non-finite points are ignored.
pub fn front_indices<T: Objectives>(points: &[T]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..points.len()).filter(|&i| finite(&points[i])).collect();
    order.sort_by(|&i, &j| {
        let (a, b) = (&points[i], &points[j]);
        a.mass()
            .total_cmp(&b.mass())
            .then(b.workspace_radius().total_cmp(&a.workspace_radius()))
            .then(i.cmp(&j))
    });
    let mut kept = Vec::new();
    let mut best = f64::NEG_INFINITY;
    for i in order {
        let r = points[i].workspace_radius();
        if r > best {
            best = r;
            kept.push(i);
        }
    }
    kept
}

/// Non-dominated subset of `points`, sorted by R_w ascending (and therefore by mass ascending).
pub fn pareto_filter<T: Objectives + Clone>(points: &[T]) -> Vec<T> {
    front_indices(points).into_iter().map(|i| points[i].clone()).collect()
}

/// Non-domination rank of every point, 0 for the first front.
pub fn nondominated_ranks<T: Objectives>(points: &[T]) -> Vec<usize> {
    let n = points.len();
    let mut rank = vec![usize::MAX; n];
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut level = 0;
    while !remaining.is_empty() {
        let (front, rest): (Vec<usize>, Vec<usize>) = remaining
            .iter()
            .partition(|&&i| !remaining.iter().any(|&j| j != i && dominates(&points[j], &points[i])));
        for &i in &front {
            rank[i] = level;
        }
        remaining = rest;
        level += 1;
    }
    rank
}

/// Crowding distance of each member of `subset` (indices into `points`); boundary points get infinity.
pub fn crowding_distances<T: Objectives>(points: &[T], subset: &[usize]) -> Vec<f64> {
    let n = subset.len();
    let mut dist = vec![0.0; n];
    if n <= 2 {
        return vec![f64::INFINITY; n];
    }
    let objectives: [fn(&T) -> f64; 2] = [|p| p.mass(), |p| p.workspace_radius()];
    for f in objectives {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| f(&points[subset[a]]).total_cmp(&f(&points[subset[b]])));
        let lo = f(&points[subset[order[0]]]);
        let hi = f(&points[subset[order[n - 1]]]);
        dist[order[0]] = f64::INFINITY;
        dist[order[n - 1]] = f64::INFINITY;
        if hi > lo {
            for k in 1..n - 1 {
                let gap = f(&points[subset[order[k + 1]]]) - f(&points[subset[order[k - 1]]]);
                dist[order[k]] += gap / (hi - lo);
            }
        }
    }
    dist
}

/// Area dominated by `points` and bounded by the reference `(mass_ref, 0)`.
pub fn hypervolume<T: Objectives>(points: &[T], mass_ref: f64) -> f64 {
    let clipped: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| finite(*p) && p.mass() < mass_ref && p.workspace_radius() > 0.0)
        .map(|p| (p.mass(), p.workspace_radius()))
        .collect();
    let front = pareto_filter(&clipped);
    let mut area = 0.0;
    let mut prev = 0.0;
    for (m, r) in front {
        area += (mass_ref - m) * (r - prev);
        prev = r;
    }
    area
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_filter() {
        let pts = [(1.0, 1.0), (2.0, 2.0), (2.0, 0.5)];
        assert_eq!(pareto_filter(&pts), vec![(1.0, 1.0), (2.0, 2.0)]);
        assert_eq!(pareto_filter(&[(3.0, 0.2)]), vec![(3.0, 0.2)]);
        assert!(pareto_filter::<(f64, f64)>(&[]).is_empty());
    }

    #[test]
    fn ties_keep_one() {
        let pts = [(1.0, 1.0), (1.0, 1.0), (1.0, 0.5), (0.5, 1.0)];
        assert_eq!(front_indices(&pts), vec![3]);
        let pts = [(2.0, 1.0), (2.0, 1.0)];
        assert_eq!(front_indices(&pts), vec![0]);
    }

    #[test]
    fn ranks() {
        let pts = [(1.0, 1.0), (2.0, 2.0), (2.0, 0.5), (3.0, 0.1)];
        assert_eq!(nondominated_ranks(&pts), vec![0, 0, 1, 2]);
    }

    #[test]
    fn crowding_marks_extremes() {
        let pts = [(1.0, 1.0), (2.0, 2.0), (3.0, 3.0), (4.0, 3.5)];
        let d = crowding_distances(&pts, &[0, 1, 2, 3]);
        assert!(d[0].is_infinite() && d[3].is_infinite());
        assert!((d[1] - (2.0 / 3.0 + 2.0 / 2.5)).abs() < 1e-12);
    }

    #[test]
    fn hypervolume_staircase() {
        let pts = [(1.0, 1.0), (3.0, 2.0)];
        // (10-1)*1 + (10-3)*1
        assert!((hypervolume(&pts, 10.0) - 16.0).abs() < 1e-12);
        assert_eq!(hypervolume(&[(20.0, 1.0)], 10.0), 0.0);
    }
}
