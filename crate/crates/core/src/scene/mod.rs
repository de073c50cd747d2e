//! Bookshelf scene model: books, poses, instances drawn from the problem
//! distribution, feature encoding and solver-independent validation.

mod sampler;
mod validate;

pub use sampler::{sample_instance, SampledScene, SamplerConfig};
pub use validate::{validate_core, validate_solution, CheckResult, ValidationReport, Walls};

use crate::geometry::{Point2, Rotation};
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;
use std::fmt;

/// Default geometric tolerance for all scene checks, in length units.
pub const GEOM_TOL: f64 = 1e-6;

/// Stored-book count assumed by the default feature layout.
pub const DEFAULT_STORED_COUNT: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Book {
    pub width: f64,
    pub height: f64,
}

impl Book {
    pub fn new(width: f64, height: f64) -> Self {
        Book { width, height }
    }

    /// Constant offsets from the centroid to the four vertices at zero
    /// rotation: 1 = top-right, 2 = bottom-right, 3 = bottom-left,
    /// 4 = top-left. Vertex 2 is the support when leaning rightward and
    /// vertex 3 when leaning leftward.
    pub fn vertex_offsets(&self) -> [Point2; 4] {
        let w = 0.5 * self.width;
        let h = 0.5 * self.height;
        [
            Point2::new(w, h),
            Point2::new(w, -h),
            Point2::new(-w, -h),
            Point2::new(-w, h),
        ]
    }
}

/// The five exclusive book states. Lean states tilt the top of the book
/// toward the neighbor they rest against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BookState {
    LayLeft,
    Upright,
    LayRight,
    LeanLeft,
    LeanRight,
}

impl BookState {
    pub const ALL: [BookState; 5] = [
        BookState::LayLeft,
        BookState::Upright,
        BookState::LayRight,
        BookState::LeanLeft,
        BookState::LeanRight,
    ];

    /// Classify an angle in [-pi/2, pi/2]. Positive angles tilt the top
    /// of the book to the left.
    pub fn from_angle(theta: f64, tol: f64) -> BookState {
        if theta.abs() <= tol {
            BookState::Upright
        } else if (theta - FRAC_PI_2).abs() <= tol {
            BookState::LayLeft
        } else if (theta + FRAC_PI_2).abs() <= tol {
            BookState::LayRight
        } else if theta > 0.0 {
            BookState::LeanLeft
        } else {
            BookState::LeanRight
        }
    }

    pub fn matches_angle(&self, theta: f64, tol: f64) -> bool {
        *self == BookState::from_angle(theta, tol)
    }

    pub fn index(&self) -> usize {
        match self {
            BookState::LayLeft => 0,
            BookState::Upright => 1,
            BookState::LayRight => 2,
            BookState::LeanLeft => 3,
            BookState::LeanRight => 4,
        }
    }
}

impl fmt::Display for BookState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            BookState::LayLeft => "lay_left",
            BookState::Upright => "upright",
            BookState::LayRight => "lay_right",
            BookState::LeanLeft => "lean_left",
            BookState::LeanRight => "lean_right",
        };
        f.write_str(name)
    }
}

/// Pose of one book: centroid, rotation (both as angle and as the matrix
/// entries the solver works with) and the four world-space vertices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BookPose {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
    pub cos_t: f64,
    pub sin_t: f64,
    pub vertices: [Point2; 4],
    pub vertex_offsets: [Point2; 4],
}

impl BookPose {
    pub fn new(book: &Book, x: f64, y: f64, theta: f64) -> Self {
        let rot = Rotation::from_angle(theta);
        Self::from_rotation(book, x, y, rot)
    }

    /// Build a pose from possibly-unnormalized (cos, sin) values, e.g.
    /// out of a relaxed solve. The rotation is renormalized so the pose
    /// is internally consistent.
    pub fn from_cos_sin(book: &Book, x: f64, y: f64, cos_t: f64, sin_t: f64) -> Self {
        let norm = cos_t.hypot(sin_t);
        let rot = if norm > 1e-12 {
            Rotation { cos: cos_t / norm, sin: sin_t / norm }
        } else {
            Rotation { cos: 1.0, sin: 0.0 }
        };
        Self::from_rotation(book, x, y, rot)
    }

    fn from_rotation(book: &Book, x: f64, y: f64, rot: Rotation) -> Self {
        let centroid = Point2::new(x, y);
        let offsets = book.vertex_offsets();
        let mut vertices = [Point2::new(0.0, 0.0); 4];
        for (v, h) in vertices.iter_mut().zip(offsets.iter()) {
            *v = centroid.add(rot.apply(*h));
        }
        BookPose {
            x,
            y,
            theta: rot.angle(),
            cos_t: rot.cos,
            sin_t: rot.sin,
            vertices,
            vertex_offsets: offsets,
        }
    }

    pub fn centroid(&self) -> Point2 {
        Point2::new(self.x, self.y)
    }

    pub fn polygon(&self) -> Vec<Point2> {
        self.vertices.to_vec()
    }

    /// Vertex by the 1-based numbering used throughout the constraint
    /// families (1 = top-right ... 4 = top-left).
    pub fn vertex(&self, k: usize) -> Point2 {
        self.vertices[k - 1]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StoredBook {
    pub book: Book,
    pub pose: BookPose,
}

/// One problem instance: the shelf, the stored books ordered left to
/// right, and the book to insert. `insert_slot` is the position of the
/// inserted book in the final left-to-right order; the generator records
/// the slot the removed book came from. `insert_reference_pose` is the
/// removed book's original pose, kept so the known-feasible arrangement
/// can be reconstructed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShelfInstance {
    pub shelf_width: f64,
    pub shelf_height: f64,
    pub stored_books: Vec<StoredBook>,
    pub insert_book: Book,
    pub insert_slot: usize,
    pub insert_reference_pose: Option<BookPose>,
}

impl ShelfInstance {
    pub fn book_count(&self) -> usize {
        self.stored_books.len() + 1
    }

    pub fn stored_ordered(&self) -> bool {
        self.stored_books
            .windows(2)
            .all(|w| w[0].pose.x <= w[1].pose.x)
    }

    /// All books in the final left-to-right order, with the inserted book
    /// spliced in at its slot. Returns (book, stored index or None).
    pub fn books_in_order(&self) -> Vec<(Book, Option<usize>)> {
        let mut out = Vec::with_capacity(self.book_count());
        let mut stored = self.stored_books.iter().enumerate();
        for slot in 0..self.book_count() {
            if slot == self.insert_slot {
                out.push((self.insert_book, None));
            } else {
                let (idx, sb) = stored.next().expect("slot bookkeeping");
                out.push((sb.book, Some(idx)));
            }
        }
        out
    }

    /// The known-feasible arrangement: stored books unchanged and the
    /// inserted book restored to its recorded pose.
    pub fn restore_solution(&self) -> Option<SceneSolution> {
        let insert_pose = self.insert_reference_pose?;
        let mut poses: Vec<BookPose> = self.stored_books.iter().map(|sb| sb.pose).collect();
        poses.push(insert_pose);
        Some(SceneSolution::from_poses(poses, GEOM_TOL))
    }

    /// Scene before insertion: stored books only.
    pub fn pre_insertion_solution(&self) -> SceneSolution {
        SceneSolution::from_poses(self.stored_books.iter().map(|sb| sb.pose).collect(), GEOM_TOL)
    }
}

/// Final poses for every book, stored books first (in their left-to-right
/// order) and the inserted book last, plus per-book state labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneSolution {
    pub poses: Vec<BookPose>,
    pub state_labels: Vec<BookState>,
}

impl SceneSolution {
    /// Labels are derived from the pose angles so they are consistent by
    /// construction.
    pub fn from_poses(poses: Vec<BookPose>, tol: f64) -> Self {
        let state_labels = poses
            .iter()
            .map(|p| BookState::from_angle(p.theta, tol))
            .collect();
        SceneSolution { poses, state_labels }
    }
}

/// Flat feature layout: per stored book (x, y, theta, height, width),
/// then (height, width) of the book to insert.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub values: Vec<f64>,
}

impl FeatureVector {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

pub fn feature_dimension(stored_count: usize) -> usize {
    5 * stored_count + 2
}

#[derive(Debug, Clone, PartialEq)]
pub enum SceneError {
    RetryExhausted { attempts: usize },
    WrongBookCount { expected: usize, got: usize },
}

impl fmt::Display for SceneError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SceneError::RetryExhausted { attempts } => {
                write!(f, "no valid scene found after {attempts} attempts; sampler config is too tight")
            }
            SceneError::WrongBookCount { expected, got } => {
                write!(f, "feature layout expects {expected} stored books, instance has {got}")
            }
        }
    }
}

impl std::error::Error for SceneError {}

/// Encode an instance into the fixed feature layout. `expected_stored`
/// pins the layout width; the default configuration uses
/// [`DEFAULT_STORED_COUNT`].
pub fn encode_features(
    instance: &ShelfInstance,
    expected_stored: usize,
) -> Result<FeatureVector, SceneError> {
    if instance.stored_books.len() != expected_stored {
        return Err(SceneError::WrongBookCount {
            expected: expected_stored,
            got: instance.stored_books.len(),
        });
    }
    let mut values = Vec::with_capacity(feature_dimension(expected_stored));
    for sb in &instance.stored_books {
        values.push(sb.pose.x);
        values.push(sb.pose.y);
        values.push(sb.pose.theta);
        values.push(sb.book.height);
        values.push(sb.book.width);
    }
    values.push(instance.insert_book.height);
    values.push(instance.insert_book.width);
    Ok(FeatureVector { values })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn upright(book: &Book, x: f64) -> BookPose {
        BookPose::new(book, x, 0.5 * book.height, 0.0)
    }

    fn toy_instance(stored: usize) -> ShelfInstance {
        let book = Book::new(40.0, 150.0);
        let stored_books = (0..stored)
            .map(|i| StoredBook {
                book,
                pose: upright(&book, 50.0 + 60.0 * i as f64),
            })
            .collect();
        ShelfInstance {
            shelf_width: 360.0,
            shelf_height: 220.0,
            stored_books,
            insert_book: Book::new(35.0, 120.0),
            insert_slot: stored,
            insert_reference_pose: None,
        }
    }

    #[test]
    fn feature_layout_has_dimension_17_for_three_stored_books() {
        let v = encode_features(&toy_instance(3), 3).unwrap();
        assert_eq!(v.len(), 17);
    }

    #[test]
    fn wrong_stored_count_is_rejected() {
        let err = encode_features(&toy_instance(2), DEFAULT_STORED_COUNT).unwrap_err();
        assert_eq!(err, SceneError::WrongBookCount { expected: 3, got: 2 });
    }

    #[test]
    fn reordered_stored_books_encode_identically() {
        let instance = toy_instance(3);
        let mut shuffled = instance.clone();
        shuffled.stored_books.swap(0, 2);
        shuffled.stored_books.swap(1, 2);
        shuffled
            .stored_books
            .sort_by(|a, b| a.pose.x.partial_cmp(&b.pose.x).unwrap());
        assert_eq!(encode_features(&instance, 3).unwrap(), encode_features(&shuffled, 3).unwrap());
    }

    #[test]
    fn state_labels_follow_angles() {
        assert_eq!(BookState::from_angle(0.0, 1e-9), BookState::Upright);
        assert_eq!(BookState::from_angle(std::f64::consts::FRAC_PI_2, 1e-9), BookState::LayLeft);
        assert_eq!(BookState::from_angle(-std::f64::consts::FRAC_PI_2, 1e-9), BookState::LayRight);
        assert_eq!(BookState::from_angle(0.4, 1e-9), BookState::LeanLeft);
        assert_eq!(BookState::from_angle(-0.4, 1e-9), BookState::LeanRight);
    }

    #[test]
    fn books_in_order_splices_insert_slot() {
        let mut instance = toy_instance(3);
        instance.insert_slot = 1;
        let order = instance.books_in_order();
        assert_eq!(order.len(), 4);
        assert_eq!(order[1].1, None);
        assert_eq!(order[0].1, Some(0));
        assert_eq!(order[2].1, Some(1));
        assert_eq!(order[3].1, Some(2));
    }
}
