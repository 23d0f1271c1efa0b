//! Hand-built reward states. Expected values are worked out by hand (largest
//! component by inspection, centroid distance in closed form).

pub struct Case {
    pub agents: [(f64, f64); 3],
    pub targets: [(f64, f64); 2],
    /// `None` when the targets are connected.
    pub expected: Option<f64>,
}

fn case(agents: [(f64, f64); 3], targets: [(f64, f64); 2], expected: Option<f64>) -> Case {
    Case { agents, targets, expected }
}

pub fn cases() -> Vec<Case> {
    let sqrt = f64::sqrt;
    vec![
        // straight relay chain, gaps 0.2
        case([(0.3, 0.5), (0.5, 0.5), (0.7, 0.5)], [(0.1, 0.5), (0.9, 0.5)], None),
        // agent chain of 3, centroids (0.3,0.2) vs (0.3,0.4)
        case([(0.2, 0.2), (0.3, 0.2), (0.4, 0.2)], [(0.0, 0.4), (0.6, 0.4)], Some(3.0 / 5.0 - 0.2)),
        // everything isolated, both centroids at (0.5,0.3)
        case([(0.0, 0.0), (1.0, 0.0), (0.5, 0.9)], [(0.2, 0.3), (0.8, 0.3)], Some(1.0 / 5.0)),
        // two relays suffice, third agent idle
        case([(0.4, 0.5), (0.6, 0.5), (0.9, 0.9)], [(0.2, 0.5), (0.8, 0.5)], None),
        // vertical chain
        case([(0.5, 0.3), (0.5, 0.5), (0.5, 0.7)], [(0.5, 0.1), (0.5, 0.9)], None),
        // targets within range of each other, no agent involved
        case([(0.9, 0.9), (0.9, 0.0), (0.0, 0.9)], [(0.5, 0.5), (0.6, 0.5)], None),
        // centroids (0.2,0.1) vs (0.4,0.9)
        case([(0.1, 0.1), (0.2, 0.1), (0.3, 0.1)], [(0.1, 0.9), (0.7, 0.9)], Some(3.0 / 5.0 - sqrt(0.68))),
        // base-station starts, centroids (0.1,0.52) vs (0.6,0.5)
        case([(0.1, 0.42), (0.1, 0.52), (0.1, 0.62)], [(0.6, 0.2), (0.6, 0.8)], Some(3.0 / 5.0 - sqrt(0.2504))),
        // agents reach T1 only; centroids (0.3,0.5) vs (0.75,0.5)
        case([(0.2, 0.5), (0.3, 0.5), (0.4, 0.5)], [(0.5, 0.5), (1.0, 0.5)], Some(4.0 / 5.0 - 0.45)),
        // {A0,A1,T1} and {A2,T2}; centroids (0.3,1/3) vs (0.4,0.5)
        case([(0.0, 0.0), (0.0, 0.1), (0.9, 0.9)], [(0.0, 0.2), (0.8, 0.8)], Some(3.0 / 5.0 - sqrt(0.01 + 1.0 / 36.0))),
        // all isolated; centroids (0.2,0.2) vs (0.7,1.0)
        case([(0.0, 0.0), (0.6, 0.0), (0.0, 0.6)], [(1.0, 1.0), (0.4, 1.0)], Some(1.0 / 5.0 - sqrt(0.89))),
        // stacked agents; centroids (0,0) vs (0.75,1)
        case([(0.0, 0.0), (0.0, 0.0), (0.0, 0.0)], [(1.0, 1.0), (0.5, 1.0)], Some(3.0 / 5.0 - 1.25)),
        // centroid offset (7/30, 1/30)
        case([(0.0, 0.0), (0.1, 0.0), (1.0, 1.0)], [(0.6, 0.0), (0.6, 0.6)], Some(2.0 / 5.0 - sqrt(50.0) / 30.0)),
        // {A0,A1} and {A2,T1}; centroid offset (11/30, 20/30)
        case([(0.0, 0.0), (0.1, 0.0), (0.9, 1.0)], [(1.0, 1.0), (0.4, 1.0)], Some(2.0 / 5.0 - sqrt(521.0) / 30.0)),
        // every gap exactly r
        case([(0.25, 0.5), (0.5, 0.5), (0.75, 0.5)], [(0.0, 0.5), (1.0, 0.5)], None),
        // one gap just over r: {T1,A0,A1} and {A2,T2}
        case([(0.25, 0.5), (0.5, 0.5), (0.76, 0.5)], [(0.0, 0.5), (1.0, 0.5)], Some(3.0 / 5.0 - 0.01 / 3.0)),
        // diagonal chain
        case([(0.3, 0.3), (0.45, 0.45), (0.6, 0.6)], [(0.15, 0.15), (0.75, 0.75)], None),
        // diagonal chain broken between A1 and A2; centroid offset (1/30, 1/30)
        case([(0.3, 0.3), (0.45, 0.45), (0.8, 0.8)], [(0.15, 0.15), (0.95, 0.95)], Some(3.0 / 5.0 - sqrt(2.0) / 30.0)),
        // agents stacked at the targets' midpoint, targets 0.3 away
        case([(0.5, 0.5), (0.5, 0.5), (0.5, 0.5)], [(0.2, 0.5), (0.8, 0.5)], Some(3.0 / 5.0)),
        // centroids (0.1,0.3) vs (0.9,0.3)
        case([(0.1, 0.1), (0.1, 0.3), (0.1, 0.5)], [(0.9, 0.1), (0.9, 0.5)], Some(3.0 / 5.0 - 0.8)),
        // centroids (0.3,0.9) vs (0.3,0.3): 3/5 minus a distance of 0.6
        case([(0.1, 0.9), (0.3, 0.9), (0.5, 0.9)], [(0.3, 0.6), (0.3, 0.0)], Some(0.0)),
        // agents far away in a corner, targets adjacent
        case([(1.0, 1.0), (1.0, 0.8), (0.8, 1.0)], [(0.0, 0.0), (0.1, 0.0)], None),
    ]
}
