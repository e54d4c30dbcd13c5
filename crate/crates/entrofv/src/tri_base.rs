//! Hardcoded coarsest mesh of the structured triangular family
//! (h = 0.25, 56 acute triangles on the unit square); finer levels are
//! produced by midpoint refinement.

pub(crate) const BASE_TRI_VERTICES: [[f64; 2]; 37] = [
    [0.0, 0.0],
    [0.0, 0.25],
    [0.0, 0.5],
    [0.0, 0.75],
    [0.0, 1.0],
    [0.14999999999999999, 0.14999999999999999],
    [0.14999999999999999, 0.65000000000000002],
    [0.17499999999999999, 0.32500000000000001],
    [0.17499999999999999, 0.82499999999999996],
    [0.25, 0.0],
    [0.25, 0.5],
    [0.25, 1.0],
    [0.32500000000000001, 0.17499999999999999],
    [0.32500000000000001, 0.67500000000000004],
    [0.34999999999999998, 0.34999999999999998],
    [0.34999999999999998, 0.84999999999999998],
    [0.5, 0.0],
    [0.5, 0.25],
    [0.5, 0.5],
    [0.5, 0.75],
    [0.5, 1.0],
    [0.65000000000000002, 0.14999999999999999],
    [0.65000000000000002, 0.65000000000000002],
    [0.67500000000000004, 0.32500000000000001],
    [0.67500000000000004, 0.82499999999999996],
    [0.75, 0.0],
    [0.75, 0.5],
    [0.75, 1.0],
    [0.82499999999999996, 0.17499999999999999],
    [0.82499999999999996, 0.67500000000000004],
    [0.84999999999999998, 0.34999999999999998],
    [0.84999999999999998, 0.84999999999999998],
    [1.0, 0.0],
    [1.0, 0.25],
    [1.0, 0.5],
    [1.0, 0.75],
    [1.0, 1.0],
];

pub(crate) const BASE_TRI_CELLS: [[usize; 3]; 56] = [
    [26, 30, 34],
    [25, 32, 28],
    [18, 26, 22],
    [22, 26, 29],
    [0, 5, 1],
    [17, 21, 23],
    [28, 30, 23],
    [7, 10, 2],
    [18, 19, 13],
    [3, 6, 8],
    [29, 34, 35],
    [5, 12, 7],
    [8, 11, 4],
    [17, 23, 18],
    [13, 19, 15],
    [6, 13, 8],
    [7, 12, 14],
    [3, 8, 4],
    [20, 24, 27],
    [14, 17, 18],
    [9, 12, 5],
    [0, 9, 5],
    [16, 17, 12],
    [7, 14, 10],
    [18, 23, 26],
    [5, 7, 1],
    [21, 25, 28],
    [31, 35, 36],
    [27, 31, 36],
    [29, 31, 24],
    [9, 16, 12],
    [19, 20, 15],
    [28, 32, 33],
    [16, 21, 17],
    [26, 34, 29],
    [12, 17, 14],
    [8, 13, 15],
    [1, 7, 2],
    [2, 6, 3],
    [19, 22, 24],
    [29, 35, 31],
    [8, 15, 11],
    [19, 24, 20],
    [30, 33, 34],
    [15, 20, 11],
    [14, 18, 10],
    [23, 30, 26],
    [2, 10, 6],
    [6, 10, 13],
    [21, 28, 23],
    [22, 29, 24],
    [10, 18, 13],
    [28, 33, 30],
    [16, 25, 21],
    [18, 22, 19],
    [24, 31, 27],
];
