//! Small hand-checked matrices used throughout tests, docs and the CLI.

use crate::matrix::PowerCostMatrix;

const INF: f64 = f64::INFINITY;

/// Two mobiles, two stations; optimum 3 + 1 = 4.
pub fn two_by_two() -> PowerCostMatrix {
    PowerCostMatrix::from_f64(&[[3.0, 6.0], [5.0, 1.0]]).unwrap()
}

/// Three mobiles, three stations; optimum 31 with everyone on station 2.
pub fn three_by_three() -> PowerCostMatrix {
    PowerCostMatrix::from_f64(&[[10.0, 15.0, 25.0], [27.0, 20.0, 33.0], [32.0, 31.0, 30.0]])
        .unwrap()
}

/// Three mobiles, two stations; optimum 5 via clusters {2,3} on 1 and {1} on 2.
pub fn three_by_two() -> PowerCostMatrix {
    PowerCostMatrix::from_f64(&[[9.0, 3.0], [1.0, 4.0], [2.0, 8.0]]).unwrap()
}

/// Five mobiles, four small cells with 12 W operational cost folded in.
pub fn cc_example() -> PowerCostMatrix {
    PowerCostMatrix::from_f64(&[
        [12.50, 12.40, 12.32, INF],
        [12.30, 12.30, 12.43, INF],
        [12.20, 12.45, 12.15, 12.23],
        [INF, 12.43, 12.25, 12.35],
        [INF, INF, INF, 12.29],
    ])
    .unwrap()
}
