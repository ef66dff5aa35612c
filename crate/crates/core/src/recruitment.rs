//! Manager recruitment case: 17 candidates scored by 4 experts on a panel
//! interview and a one-on-one interview, with the published intermediate
//! tables used as reference values.
//!
//! Published numbers are copied verbatim, rounding and typos included.

use crate::error::Result;
use crate::linguistic::DecisionMatrix;
use crate::matrix::Matrix;

pub const EXPERTS: [&str; 4] = ["u1", "u2", "u3", "u4"];
pub const ATTRIBUTES: [&str; 2] = ["panel", "one_on_one"];
pub const CANDIDATES: usize = 17;

/// Raw scores per candidate: (panel, one-on-one) for u1..u4.
pub const SCORES: [[[f64; 2]; 4]; CANDIDATES] = [
    [[80., 75.], [85., 80.], [75., 70.], [90., 85.]],
    [[65., 75.], [60., 70.], [70., 77.], [60., 70.]],
    [[90., 85.], [80., 85.], [80., 90.], [90., 95.]],
    [[65., 70.], [55., 60.], [68., 72.], [62., 72.]],
    [[75., 80.], [75., 80.], [50., 55.], [70., 75.]],
    [[80., 80.], [75., 85.], [77., 82.], [75., 75.]],
    [[65., 70.], [70., 60.], [65., 72.], [67., 75.]],
    [[70., 60.], [75., 65.], [75., 67.], [82., 85.]],
    [[80., 85.], [95., 85.], [90., 85.], [90., 92.]],
    [[70., 75.], [75., 80.], [68., 78.], [65., 70.]],
    [[50., 60.], [62., 65.], [60., 65.], [65., 70.]],
    [[60., 65.], [65., 75.], [50., 60.], [45., 50.]],
    [[75., 75.], [80., 80.], [65., 75.], [70., 75.]],
    [[80., 70.], [75., 72.], [80., 70.], [75., 75.]],
    [[70., 65.], [75., 70.], [65., 70.], [60., 65.]],
    [[90., 95.], [92., 90.], [85., 80.], [88., 90.]],
    [[80., 85.], [70., 75.], [75., 80.], [70., 75.]],
];

pub fn candidate_labels() -> Vec<String> {
    (1..=CANDIDATES).map(|i| format!("C{i}")).collect()
}

/// The four experts' raw decision matrices.
pub fn decision_matrices() -> Result<Vec<DecisionMatrix>> {
    EXPERTS
        .iter()
        .enumerate()
        .map(|(k, id)| {
            let rows: Vec<[f64; 2]> = SCORES.iter().map(|c| c[k]).collect();
            DecisionMatrix::new(
                *id,
                candidate_labels(),
                ATTRIBUTES.iter().map(|s| s.to_string()).collect(),
                Matrix::from_rows(&rows)?,
            )
        })
        .collect()
}

/// Published u1 memberships: panel terms 1..5 then one-on-one terms 1..5.
pub const U1_MEMBERSHIP: [[f64; 10]; CANDIDATES] = [
    [0.2500, 0.3333, 0.5000, 1.000, 0.7500, 0.5714, 0.7619, 0.8571, 0.5714, 0.4286],
    [0.6250, 0.8333, 0.7500, 0.5000, 0.3750, 0.5714, 0.7619, 0.8571, 0.5714, 0.4286],
    [0.0000, 0.0000, 0.0000, 0.0000, 1.0000, 0.2857, 0.3809, 0.5714, 0.9523, 0.7142],
    [0.6250, 0.8333, 0.7500, 0.5000, 0.3750, 0.7142, 0.9523, 0.5714, 0.3809, 0.2857],
    [0.3750, 0.5000, 0.7500, 0.8333, 0.6250, 0.4285, 0.5714, 0.8571, 0.7619, 0.5714],
    [0.2500, 0.3333, 0.5000, 1.0000, 0.7500, 0.4285, 0.5714, 0.8571, 0.7619, 0.5714],
    [0.6250, 0.8333, 0.7500, 0.5000, 0.3750, 0.7143, 0.9523, 0.5714, 0.3809, 0.2857],
    [0.5000, 0.6667, 1.0000, 0.6667, 0.5000, 1.0000, 0.0000, 0.0000, 0.0000, 0.0000],
    [0.2500, 0.3333, 0.5000, 1.0000, 0.7500, 0.2857, 0.3809, 0.5714, 0.9523, 0.7143],
    [0.5000, 0.6667, 1.0000, 0.667, 0.5000, 0.5714, 0.7619, 0.8571, 0.5714, 0.4286],
    [1.0000, 0.0000, 0.0000, 0.0000, 0.0000, 1.0000, 0.0000, 0.0000, 0.0000, 0.0000],
    [0.7500, 1.0000, 0.5000, 0.3333, 0.2500, 0.8571, 0.5714, 0.2857, 0.1904, 0.1428],
    [0.3750, 0.5000, 0.7500, 0.8333, 0.6250, 0.5714, 0.7619, 0.8571, 0.5714, 0.3809],
    [0.2500, 0.3333, 0.5000, 1.0000, 0.7500, 0.7142, 0.9523, 0.5714, 0.3809, 0.2857],
    [0.5000, 0.6667, 1.0000, 0.6667, 0.5000, 0.8571, 0.5714, 0.2857, 0.1905, 0.1428],
    [0.0000, 0.0000, 0.0000, 0.0000, 1.0000, 0.0000, 0.0000, 0.0000, 0.0000, 1.0000],
    [0.2500, 0.3333, 0.5000, 1.0000, 0.7500, 0.2857, 0.3809, 0.5714, 0.9523, 0.7143],
];

/// Published u1 masses, same layout as [`U1_MEMBERSHIP`].
pub const U1_BPA: [[f64; 10]; CANDIDATES] = [
    [0.0351, 0.0408, 0.0513, 0.0952, 0.0759, 0.0579, 0.0816, 0.0937, 0.0697, 0.0600],
    [0.0877, 0.1021, 0.0769, 0.0476, 0.0379, 0.0579, 0.0816, 0.0937, 0.0697, 0.0600],
    [0.0000, 0.0000, 0.0000, 0.0000, 0.1012, 0.0289, 0.0408, 0.0625, 0.1163, 0.1000],
    [0.0877, 0.1021, 0.0769, 0.0476, 0.0379, 0.0725, 0.1021, 0.0625, 0.0465, 0.0400],
    [0.0526, 0.0612, 0.0769, 0.0793, 0.0633, 0.0435, 0.0612, 0.0937, 0.0931, 0.0800],
    [0.0351, 0.0408, 0.0512, 0.0952, 0.0759, 0.0435, 0.0612, 0.0937, 0.0931, 0.0800],
    [0.0877, 0.1021, 0.0769, 0.0476, 0.0379, 0.0725, 0.1021, 0.0625, 0.0465, 0.0400],
    [0.0702, 0.0816, 0.1026, 0.0635, 0.0506, 0.1014, 0.0000, 0.0000, 0.0000, 0.0000],
    [0.0351, 0.0408, 0.0512, 0.0952, 0.0759, 0.0289, 0.0408, 0.0625, 0.1162, 0.1000],
    [0.0702, 0.0816, 0.1026, 0.0635, 0.0506, 0.0579, 0.0816, 0.0938, 0.0697, 0.0600],
    [0.1404, 0.0000, 0.0000, 0.0000, 0.0000, 0.1015, 0.0000, 0.0000, 0.0000, 0.0000],
    [0.1053, 0.1224, 0.0513, 0.0317, 0.0253, 0.0869, 0.0612, 0.0313, 0.0233, 0.0200],
    [0.0526, 0.0612, 0.0769, 0.0794, 0.0633, 0.0579, 0.0816, 0.0938, 0.0698, 0.0600],
    [0.0351, 0.0408, 0.0513, 0.0952, 0.0759, 0.0724, 0.1021, 0.0625, 0.0465, 0.0400],
    [0.0702, 0.0816, 0.1026, 0.0635, 0.0506, 0.0869, 0.0612, 0.0313, 0.0233, 0.0200],
    [0.0000, 0.0000, 0.0000, 0.0000, 0.1013, 0.0000, 0.0000, 0.0000, 0.0000, 0.1400],
    [0.0351, 0.0408, 0.0512, 0.0952, 0.0759, 0.0289, 0.0408, 0.0625, 0.1163, 0.1000],
];

/// Expert pairs in the column order of [`PAIR_DIVERGENCE`], 0-based.
pub const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Published per-candidate pairwise divergences.
pub const PAIR_DIVERGENCE: [[f64; 6]; CANDIDATES] = [
    [0.0006, 0.0000, 0.0002, 0.0007, 0.0016, 0.0003],
    [0.0031, 0.0004, 0.0009, 0.0059, 0.0074, 0.0001],
    [0.0036, 0.0058, 0.0029, 0.0003, 0.0001, 0.0005],
    [0.0003, 0.0001, 0.0009, 0.0006, 0.0001, 0.0013],
    [0.0004, 0.0009, 0.0049, 0.0001, 0.0026, 0.0016],
    [0.0000, 0.0001, 0.0032, 0.0001, 0.0034, 0.0026],
    [0.0000, 0.0001, 0.0020, 0.0000, 0.0022, 0.0004],
    [0.0005, 0.0034, 0.0015, 0.0012, 0.0002, 0.0004],
    [0.0039, 0.0037, 0.0017, 0.0001, 0.0005, 0.0004],
    [0.0011, 0.0001, 0.0000, 0.0009, 0.0010, 0.0000],
    [0.0036, 0.0025, 0.0029, 0.0001, 0.0001, 0.0000],
    [0.0093, 0.0053, 0.0045, 0.0006, 0.0009, 0.0000],
    [0.0004, 0.0040, 0.0044, 0.0019, 0.0021, 0.0001],
    [0.0002, 0.0021, 0.0041, 0.0035, 0.0060, 0.0003],
    [0.0065, 0.0003, 0.0008, 0.0041, 0.0028, 0.0001],
    [0.0045, 0.0044, 0.0045, 0.0000, 0.0000, 0.0000],
    [0.0001, 0.0007, 0.0061, 0.0014, 0.0081, 0.0027],
];

/// Published per-pair averages over candidates.
pub const PAIR_AVERAGE: [f64; 6] = [0.0023, 0.0021, 0.0027, 0.0012, 0.0023, 0.0007];

/// Published expert-level divergence matrix. The upper triangle repeats
/// [`PAIR_AVERAGE`]; the (u2, u1) entry is printed as 0.0021.
pub const DIVERGENCE_MATRIX: [[f64; 4]; 4] = [
    [0.0000, 0.0023, 0.0021, 0.0027],
    [0.0021, 0.0000, 0.0012, 0.0023],
    [0.0021, 0.0012, 0.0000, 0.0007],
    [0.0027, 0.0023, 0.0007, 0.0000],
];

pub const EXPERT_AVERAGE: [f64; 4] = [0.0017, 0.0014, 0.0010, 0.0014];
pub const EXPERT_SUPPORT: [f64; 4] = [573.03, 691.65, 997.56, 704.38];
pub const EXPERT_WEIGHT: [f64; 4] = [0.1932, 0.2331, 0.3362, 0.2374];
/// Experts from most to least supported, 0-based.
pub const EXPERT_ORDER: [usize; 4] = [2, 3, 1, 0];

/// Published fused (panel, one-on-one) values.
pub const FUSED: [[f64; 2]; CANDIDATES] = [
    [0.2715, 0.2474],
    [0.2137, 0.2364],
    [0.2797, 0.2869],
    [0.2093, 0.2218],
    [0.2164, 0.2264],
    [0.2544, 0.2599],
    [0.2211, 0.2241],
    [0.2513, 0.2235],
    [0.2961, 0.2791],
    [0.2299, 0.2449],
    [0.1982, 0.2101],
    [0.1796, 0.2002],
    [0.2373, 0.2454],
    [0.2578, 0.2308],
    [0.2225, 0.2187],
    [0.2929, 0.2821],
    [0.2444, 0.2534],
];

pub const IDEAL: [f64; 2] = [0.2961, 0.2869];

/// Published "Weights" column next to the ranking.
pub const PRINTED_SCORES: [f64; CANDIDATES] = [
    0.4809, 0.4166, 0.5247, 0.3991, 0.4101, 0.4763, 0.4122, 0.4402, 0.5331, 0.4396, 0.3781, 0.3515,
    0.4470, 0.4530, 0.4087, 0.5328, 0.4609,
];

/// Published rank per candidate (1 = best). Candidates 2 and 7 share rank 12
/// and no candidate has rank 11.
pub const RANKS: [usize; CANDIDATES] = [4, 12, 3, 15, 13, 5, 12, 9, 1, 10, 16, 17, 8, 7, 14, 2, 6];

/// Candidates best-first, 0-based, resolving the shared rank 12 as
/// candidate 2 before candidate 7.
pub const ORDER: [usize; CANDIDATES] = [8, 15, 2, 0, 5, 16, 13, 12, 7, 9, 1, 6, 4, 14, 3, 10, 11];
