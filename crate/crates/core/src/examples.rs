//! Built-in example systems.

use std::fmt;
use std::str::FromStr;

use crate::error::ParseError;
use crate::ifs::{Ifs, Similarity};
use crate::linalg::{Mat2, Vec2};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExampleId {
    SierpinskiEquilateral,
    SierpinskiRight,
    FourCorner,
    RhombusSquare,
    Segment,
    IrrationalRotationDemo,
}

impl ExampleId {
    pub const ALL: [ExampleId; 6] = [
        ExampleId::SierpinskiEquilateral,
        ExampleId::SierpinskiRight,
        ExampleId::FourCorner,
        ExampleId::RhombusSquare,
        ExampleId::Segment,
        ExampleId::IrrationalRotationDemo,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExampleId::SierpinskiEquilateral => "sierpinski_equilateral",
            ExampleId::SierpinskiRight => "sierpinski_right",
            ExampleId::FourCorner => "four_corner",
            ExampleId::RhombusSquare => "rhombus_square",
            ExampleId::Segment => "segment",
            ExampleId::IrrationalRotationDemo => "irrational_rotation_demo",
        }
    }
}

impl fmt::Display for ExampleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExampleId {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ExampleId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| ParseError::UnknownExample(s.to_string()))
    }
}

/// Known answers for an example, used by the test suites.
#[derive(Clone, Debug, PartialEq)]
pub struct ExampleMeta {
    /// Number of interval projections; `None` when every direction is one.
    pub ip_count: Option<usize>,
    /// Interval directions as slope strings, when they are rational.
    pub slopes: Vec<&'static str>,
    /// Squared normalized lengths of the projections, in the order of `slopes`.
    pub lengths_sq: Vec<&'static str>,
    /// Centered covariance `[C_xx, C_xy, C_yy]` of the natural measure.
    pub covariance: Option<[&'static str; 3]>,
    pub note: &'static str,
}

fn q(n: i64, d: i64) -> Scalar {
    Scalar::ratio(n, d)
}

fn homothety(r: &Scalar, x: Scalar, y: Scalar) -> Similarity {
    Similarity::homothety(r.clone(), Vec2::new(x, y))
}

pub fn build_example(id: ExampleId) -> Ifs {
    let maps = match id {
        ExampleId::SierpinskiEquilateral => {
            let r = q(1, 3);
            let h = Scalar::Approx(3f64.sqrt() / 3.0);
            vec![
                homothety(&r, q(0, 1), q(0, 1)),
                homothety(&r, q(2, 3), q(0, 1)),
                homothety(&r, q(1, 3), h),
            ]
        }
        ExampleId::SierpinskiRight => {
            let r = q(1, 3);
            vec![
                homothety(&r, q(0, 1), q(0, 1)),
                homothety(&r, q(2, 3), q(0, 1)),
                homothety(&r, q(0, 1), q(2, 3)),
            ]
        }
        ExampleId::FourCorner => {
            let r = q(1, 4);
            [(0, 0), (3, 0), (0, 3), (3, 3)]
                .iter()
                .map(|&(x, y)| homothety(&r, q(x, 4), q(y, 4)))
                .collect()
        }
        ExampleId::RhombusSquare => {
            let r = q(1, 4);
            [(0, 3), (1, 1), (2, 2), (3, 0)]
                .iter()
                .map(|&(x, y)| homothety(&r, q(x, 4), q(y, 4)))
                .collect()
        }
        ExampleId::Segment => {
            let r = q(1, 2);
            vec![homothety(&r, q(0, 1), q(0, 1)), homothety(&r, q(1, 2), q(0, 1))]
        }
        ExampleId::IrrationalRotationDemo => {
            let r = q(1, 2);
            vec![
                Similarity {
                    ratio: r.clone(),
                    rotation: Mat2::rotation(Scalar::Approx(1f64.cos()), Scalar::Approx(1f64.sin())),
                    translation: Vec2::zero(),
                },
                homothety(&r, q(1, 2), q(0, 1)),
            ]
        }
    };
    Ifs::new(id.as_str(), maps).expect("built-in examples are valid")
}

pub fn example_metadata(id: ExampleId) -> ExampleMeta {
    match id {
        ExampleId::SierpinskiEquilateral => ExampleMeta {
            ip_count: Some(3),
            slopes: vec![],
            lengths_sq: vec![],
            covariance: None,
            note: "r = 1/3 homotheties fixing the corners of the unit equilateral triangle; \
                   float data, interval directions are the side directions 0, π/3, 2π/3",
        },
        ExampleId::SierpinskiRight => ExampleMeta {
            ip_count: Some(3),
            slopes: vec!["-1", "1/2", "2"],
            lengths_sq: vec!["2", "4/5", "4/5"],
            covariance: None,
            note: "rational affine image of the equilateral Sierpinski system",
        },
        ExampleId::FourCorner => ExampleMeta {
            ip_count: Some(4),
            slopes: vec!["-2", "-1/2", "1/2", "2"],
            lengths_sq: vec!["9/5", "9/5", "9/5", "9/5"],
            covariance: Some(["3/20", "0", "3/20"]),
            note: "r = 1/4 homotheties fixing the corners of the unit square",
        },
        ExampleId::RhombusSquare => ExampleMeta {
            ip_count: Some(4),
            slopes: vec!["0", "4/5", "5/4", "vertical"],
            lengths_sq: vec!["1", "9/41", "9/41", "1"],
            covariance: Some(["1/12", "-1/15", "1/12"]),
            note: "r = 1/4 homotheties whose fixed points (0,1), (1/3,1/3), (2/3,2/3), (1,0) \
                   span a rhombus; both axis projections tile [0,1]",
        },
        ExampleId::Segment => ExampleMeta {
            ip_count: None,
            slopes: vec!["0"],
            lengths_sq: vec!["1"],
            covariance: Some(["1/12", "0", "0"]),
            note: "the unit segment; every projection is an interval",
        },
        ExampleId::IrrationalRotationDemo => ExampleMeta {
            ip_count: Some(0),
            slopes: vec![],
            lengths_sq: vec![],
            covariance: None,
            note: "one map rotates by 1 radian, so the rotation group is infinite",
        },
    }
}
