//! Solver-independent physical validation of scenes. Each rule becomes a
//! named pass/fail entry; failures are data, not errors.

use super::{Book, BookPose, BookState, SceneSolution, ShelfInstance};
use crate::geometry::polygons_overlap;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;

/// Shelf side walls; the ground is always y = 0 and the ceiling the shelf
/// height. Kept explicit so every geometric rule is translation-equivariant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Walls {
    pub left: f64,
    pub right: f64,
    pub height: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }

    fn push(&mut self, name: String, passed: bool, detail: String) {
        self.checks.push(CheckResult { name, passed, detail });
    }
}

/// Validate a full solution against an instance: one pose per book, stored
/// books first and the inserted book last.
pub fn validate_solution(
    instance: &ShelfInstance,
    sol: &SceneSolution,
    tol: f64,
) -> ValidationReport {
    let mut books: Vec<Book> = instance.stored_books.iter().map(|sb| sb.book).collect();
    books.push(instance.insert_book);
    let walls = Walls {
        left: 0.0,
        right: instance.shelf_width,
        height: instance.shelf_height,
    };
    validate_core(walls, &books, &sol.poses, Some(&sol.state_labels), tol)
}

/// Core rules over explicit wall positions. All checks depend only on
/// pose geometry relative to the walls, so shifting walls and poses by the
/// same offset yields an identical report.
pub fn validate_core(
    walls: Walls,
    books: &[Book],
    poses: &[BookPose],
    labels: Option<&[BookState]>,
    tol: f64,
) -> ValidationReport {
    let mut report = ValidationReport::default();
    if books.len() != poses.len() {
        report.push(
            "pose_count".into(),
            false,
            format!("{} books but {} poses", books.len(), poses.len()),
        );
        return report;
    }
    let n = books.len();

    for i in 0..n {
        let pose = &poses[i];
        let book = &books[i];

        // A: vertices equal centroid plus rotated offsets.
        let rebuilt = BookPose::from_cos_sin(book, pose.x, pose.y, pose.cos_t, pose.sin_t);
        let max_dev = pose
            .vertices
            .iter()
            .zip(rebuilt.vertices.iter())
            .map(|(a, b)| a.sub(*b).norm())
            .fold(0.0_f64, f64::max);
        report.push(
            format!("vertex_consistency[{i}]"),
            max_dev <= tol,
            format!("max vertex deviation {max_dev:.3e}"),
        );

        // B: containment between the walls, ground and ceiling.
        let inside = pose.vertices.iter().all(|v| {
            v.x >= walls.left - tol
                && v.x <= walls.right + tol
                && v.y >= -tol
                && v.y <= walls.height + tol
        });
        report.push(
            format!("containment[{i}]"),
            inside,
            format!("walls [{}, {}] x [0, {}]", walls.left, walls.right, walls.height),
        );

        // C: rotation orthogonality.
        let orth = (pose.cos_t * pose.cos_t + pose.sin_t * pose.sin_t - 1.0).abs();
        report.push(
            format!("rotation_orthogonality[{i}]"),
            orth <= tol,
            format!("|cos^2+sin^2-1| = {orth:.3e}"),
        );

        // D: angle within [-pi/2, pi/2].
        let in_range = pose.theta.abs() <= FRAC_PI_2 + tol;
        report.push(
            format!("angle_range[{i}]"),
            in_range,
            format!("theta = {:.4}", pose.theta),
        );

        // Ground contact: at least one vertex on the ground.
        let min_y = pose.vertices.iter().map(|v| v.y).fold(f64::INFINITY, f64::min);
        report.push(
            format!("ground_contact[{i}]"),
            min_y.abs() <= tol,
            format!("lowest vertex y = {min_y:.3e}"),
        );
    }

    // Pairwise non-overlap by exact polygon intersection.
    for i in 0..n {
        for j in (i + 1)..n {
            let overlap = polygons_overlap(&poses[i].vertices, &poses[j].vertices, tol);
            report.push(
                format!("non_overlap[{i},{j}]"),
                !overlap,
                String::new(),
            );
        }
    }

    // Stability: leaning books keep their centroid between the support
    // vertex and the neighbor they lean onto. Neighbors come from the
    // left-to-right order of centroids.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| poses[a].x.partial_cmp(&poses[b].x).unwrap());
    let mut rank = vec![0usize; n];
    for (r, &i) in order.iter().enumerate() {
        rank[i] = r;
    }
    for i in 0..n {
        let pose = &poses[i];
        let state = BookState::from_angle(pose.theta, tol);
        let (passed, detail) = match state {
            BookState::LeanLeft => {
                // Support is vertex 3; the book leans onto its left neighbor.
                let support_x = pose.vertex(3).x;
                match rank[i].checked_sub(1).map(|r| order[r]) {
                    Some(j) => {
                        let ok = poses[j].x <= pose.x + tol && pose.x <= support_x + tol;
                        (ok, format!("need x in [{:.3}, {:.3}], got {:.3}", poses[j].x, support_x, pose.x))
                    }
                    None => (false, "leaning left with no book on the left".into()),
                }
            }
            BookState::LeanRight => {
                let support_x = pose.vertex(2).x;
                match order.get(rank[i] + 1).copied() {
                    Some(j) => {
                        let ok = support_x <= pose.x + tol && pose.x <= poses[j].x + tol;
                        (ok, format!("need x in [{:.3}, {:.3}], got {:.3}", support_x, poses[j].x, pose.x))
                    }
                    None => (false, "leaning right with no book on the right".into()),
                }
            }
            // Upright and laying books rest flat on the ground; the
            // ground-contact check already covers them.
            _ => (true, String::new()),
        };
        report.push(format!("stability[{i}]"), passed, detail);
    }

    if let Some(labels) = labels {
        for i in 0..n.min(labels.len()) {
            let ok = labels[i].matches_angle(poses[i].theta, tol.max(1e-9));
            report.push(
                format!("state_consistency[{i}]"),
                ok,
                format!("label {} vs theta {:.4}", labels[i], poses[i].theta),
            );
        }
    }

    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::StoredBook;

    fn instance_with(books: Vec<(Book, BookPose)>, insert: Book, w: f64, h: f64) -> ShelfInstance {
        let slot = books.len();
        ShelfInstance {
            shelf_width: w,
            shelf_height: h,
            stored_books: books
                .into_iter()
                .map(|(book, pose)| StoredBook { book, pose })
                .collect(),
            insert_book: insert,
            insert_slot: slot,
            insert_reference_pose: None,
        }
    }

    #[test]
    fn canonical_upright_pose_passes_all_checks() {
        let book = Book::new(40.0, 150.0);
        let pose = BookPose::new(&book, 100.0, 75.0, 0.0);
        let instance = instance_with(vec![], book, 360.0, 220.0);
        let sol = SceneSolution::from_poses(vec![pose], 1e-6);
        let report = validate_solution(&instance, &sol, 1e-6);
        assert!(report.all_passed(), "failures: {:?}", report.failures().collect::<Vec<_>>());
    }

    #[test]
    fn coincident_books_fail_non_overlap() {
        let book = Book::new(40.0, 150.0);
        let pose = BookPose::new(&book, 100.0, 75.0, 0.0);
        let instance = instance_with(vec![(book, pose)], book, 360.0, 220.0);
        let sol = SceneSolution::from_poses(vec![pose, pose], 1e-6);
        let report = validate_solution(&instance, &sol, 1e-6);
        let overlap = report.checks.iter().find(|c| c.name == "non_overlap[0,1]").unwrap();
        assert!(!overlap.passed);
    }

    /// Oracle: the gravity moment about the support vertex must pull the
    /// book toward its neighbor. A leaning book whose centroid sits on the
    /// tipping side of the support has a moment of the opposite sign and
    /// the interval rule must reject it.
    #[test]
    fn leaning_book_past_support_fails_stability() {
        let neighbor = Book::new(40.0, 160.0);
        let neighbor_pose = BookPose::new(&neighbor, 60.0, 80.0, 0.0);
        let book = Book::new(30.0, 150.0);

        // Tilt far enough leftward that the centroid crosses to the left
        // of the support vertex 3.
        let theta = 1.2;
        let pose = BookPose::new(&book, 130.0, 40.0, theta);
        let support_x = pose.vertex(3).x;
        let moment = pose.x - support_x; // > 0 tips right, away from the left neighbor
        assert!(moment > 0.0, "construction should tip away from support");

        let instance = instance_with(vec![(neighbor, neighbor_pose)], book, 360.0, 220.0);
        let sol = SceneSolution::from_poses(vec![neighbor_pose, pose], 1e-6);
        let report = validate_solution(&instance, &sol, 1e-6);
        let stab = report.checks.iter().find(|c| c.name == "stability[1]").unwrap();
        assert!(!stab.passed, "centroid outside support interval must fail: {}", stab.detail);
    }

    #[test]
    fn report_is_translation_equivariant() {
        let book = Book::new(40.0, 150.0);
        let other = Book::new(35.0, 120.0);
        let poses = vec![
            BookPose::new(&book, 100.0, 75.0, 0.0),
            BookPose::new(&other, 200.0, 60.0, 0.0),
        ];
        let books = vec![book, other];
        let base = validate_core(
            Walls { left: 0.0, right: 360.0, height: 220.0 },
            &books,
            &poses,
            None,
            1e-6,
        );
        let delta = 37.5;
        let shifted_poses: Vec<BookPose> = poses
            .iter()
            .zip(books.iter())
            .map(|(p, b)| BookPose::new(b, p.x + delta, p.y, p.theta))
            .collect();
        let shifted = validate_core(
            Walls { left: delta, right: 360.0 + delta, height: 220.0 },
            &books,
            &shifted_poses,
            None,
            1e-6,
        );
        for (a, b) in base.checks.iter().zip(shifted.checks.iter()) {
            assert_eq!(a.name, b.name);
            assert_eq!(a.passed, b.passed, "check {} changed under translation", a.name);
        }
    }
}
