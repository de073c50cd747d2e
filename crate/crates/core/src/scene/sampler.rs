//! Instance generator: randomly sized books are placed left to right on
//! the shelf, one is removed and becomes the book to insert. The
//! pre-removal arrangement is kept as a known-feasible reference.

use super::validate::{validate_core, Walls};
use super::{Book, BookPose, BookState, SceneError, ShelfInstance, StoredBook};
use crate::geometry::{plane_through, polygons_overlap, separation_gap, Rotation};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub shelf_width: f64,
    pub shelf_height: f64,
    /// Books placed before removal; the instance keeps one fewer.
    pub book_count: usize,
    pub width_range: (f64, f64),
    pub height_range: (f64, f64),
    pub lean_prob: f64,
    pub lay_prob: f64,
    pub max_retries: usize,
    pub tol: f64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        // Tuned so that the default four-book scene is found within a few
        // attempts roughly half the time.
        SamplerConfig {
            shelf_width: 360.0,
            shelf_height: 220.0,
            book_count: 4,
            width_range: (28.0, 72.0),
            height_range: (100.0, 200.0),
            lean_prob: 0.30,
            lay_prob: 0.12,
            max_retries: 400,
            tol: 1e-6,
        }
    }
}

/// A freshly placed scene before removal.
#[derive(Debug, Clone)]
pub struct SampledScene {
    pub books: Vec<Book>,
    pub poses: Vec<BookPose>,
}

/// Draw one instance from the problem distribution. Deterministic in the
/// seed; retries internally until a valid scene and a removable book are
/// found, up to `max_retries`.
pub fn sample_instance(rng_seed: u64, config: &SamplerConfig) -> Result<ShelfInstance, SceneError> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    for _ in 0..config.max_retries {
        let Some(scene) = try_place_scene(&mut rng, config) else {
            continue;
        };
        if !scene_valid(&scene, config) {
            continue;
        }
        if let Some(instance) = try_remove_one(&scene, &mut rng, config) {
            return Ok(instance);
        }
    }
    Err(SceneError::RetryExhausted { attempts: config.max_retries })
}

fn scene_valid(scene: &SampledScene, config: &SamplerConfig) -> bool {
    let walls = Walls {
        left: 0.0,
        right: config.shelf_width,
        height: config.shelf_height,
    };
    let report = validate_core(walls, &scene.books, &scene.poses, None, config.tol);
    if !report.all_passed() {
        return false;
    }
    lean_contacts_ok(&scene.poses, config.tol)
}

/// Leaning books must actually touch their left neighbor and the contact
/// plane through vertex 1 of the left book and vertex 4 of the right book
/// must support both, so the arrangement stays expressible by the
/// constraint families.
fn lean_contacts_ok(poses: &[BookPose], tol: f64) -> bool {
    for i in 0..poses.len() {
        if BookState::from_angle(poses[i].theta, tol) != BookState::LeanLeft {
            continue;
        }
        if i == 0 {
            return false;
        }
        let prev = &poses[i - 1];
        if separation_gap(&prev.vertices, &poses[i].vertices) > 1e-7 {
            return false;
        }
        let Some(plane) = plane_through(prev.vertex(1), poses[i].vertex(4), prev.centroid()) else {
            return false;
        };
        let left_ok = prev.vertices.iter().all(|v| plane.eval(*v) <= 1e-7);
        let right_ok = poses[i].vertices.iter().all(|v| plane.eval(*v) >= -1e-7);
        if !left_ok || !right_ok {
            return false;
        }
    }
    true
}

fn try_place_scene(rng: &mut ChaCha8Rng, config: &SamplerConfig) -> Option<SampledScene> {
    let n = config.book_count;
    let books: Vec<Book> = (0..n)
        .map(|_| {
            Book::new(
                rng.gen_range(config.width_range.0..=config.width_range.1),
                rng.gen_range(config.height_range.0..=config.height_range.1),
            )
        })
        .collect();

    let mut poses: Vec<BookPose> = Vec::with_capacity(n);
    let mut cursor = 0.0_f64;
    for i in 0..n {
        let book = &books[i];
        let rest_need: f64 = books[i + 1..].iter().map(|b| b.width).sum();
        let draw = rng.gen::<f64>();
        let want_lean = i > 0 && draw < config.lean_prob;
        let want_lay = !want_lean && draw < config.lean_prob + config.lay_prob;

        let pose = if want_lean {
            match try_lean_left(book, &poses[i - 1], rng) {
                Some(p) => p,
                None => place_flat(book, BookState::Upright, cursor, rest_need, rng, config)?,
            }
        } else if want_lay {
            let state = if rng.gen::<bool>() { BookState::LayLeft } else { BookState::LayRight };
            place_flat(book, state, cursor, rest_need, rng, config)?
        } else {
            place_flat(book, BookState::Upright, cursor, rest_need, rng, config)?
        };

        let max_x = pose.vertices.iter().map(|v| v.x).fold(f64::NEG_INFINITY, f64::max);
        if max_x > config.shelf_width + config.tol {
            return None;
        }
        cursor = cursor.max(max_x);
        poses.push(pose);
    }
    Some(SampledScene { books, poses })
}

fn place_flat(
    book: &Book,
    state: BookState,
    cursor: f64,
    rest_need: f64,
    rng: &mut ChaCha8Rng,
    config: &SamplerConfig,
) -> Option<BookPose> {
    let (extent, y, theta) = match state {
        BookState::Upright => (book.width, 0.5 * book.height, 0.0),
        BookState::LayLeft => (book.height, 0.5 * book.width, FRAC_PI_2),
        BookState::LayRight => (book.height, 0.5 * book.width, -FRAC_PI_2),
        _ => unreachable!("leaning placement handled separately"),
    };
    let slack = config.shelf_width - cursor - extent - rest_need;
    if slack < 0.0 {
        return None;
    }
    let gap = rng.gen_range(0.0..=(0.45 * slack).max(1e-9));
    Some(BookPose::new(book, cursor + gap + 0.5 * extent, y, theta))
}

/// Lean the book leftward against the previous one: pivot on vertex 3 at
/// the ground, slide toward the neighbor until touching. The lean angle is
/// sampled above the tipping threshold atan(w/h) so the centroid stays on
/// the stable side of the support.
fn try_lean_left(book: &Book, prev: &BookPose, rng: &mut ChaCha8Rng) -> Option<BookPose> {
    let min_theta = (book.width / book.height).atan() + 0.04;
    let max_theta = (min_theta + 0.75).min(FRAC_PI_2 - 0.12);
    if min_theta >= max_theta {
        return None;
    }
    let theta = rng.gen_range(min_theta..=max_theta);
    let rot = Rotation::from_angle(theta);
    let rh3 = rot.apply(book.vertex_offsets()[2]);
    let pose_at = |s: f64| BookPose::new(book, s - rh3.x, -rh3.y, theta);

    let prev_max_x = prev.vertices.iter().map(|v| v.x).fold(f64::NEG_INFINITY, f64::max);
    let diag = book.width.hypot(book.height);
    let mut hi = prev_max_x + diag + 1.0;
    if polygons_overlap(&prev.vertices, &pose_at(hi).vertices, 0.0) {
        return None;
    }
    let mut lo = prev.x;
    if !polygons_overlap(&prev.vertices, &pose_at(lo).vertices, 0.0) {
        return None;
    }
    for _ in 0..90 {
        let mid = 0.5 * (lo + hi);
        if polygons_overlap(&prev.vertices, &pose_at(mid).vertices, 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let pose = pose_at(hi);

    // Contact and stability interval, with a small margin so downstream
    // tolerance checks are not borderline.
    if separation_gap(&prev.vertices, &pose.vertices) > 1e-8 {
        return None;
    }
    let support_x = pose.vertex(3).x;
    if !(prev.x + 1e-3 <= pose.x && pose.x <= support_x - 1e-3) {
        return None;
    }
    Some(pose)
}

fn try_remove_one(
    scene: &SampledScene,
    rng: &mut ChaCha8Rng,
    config: &SamplerConfig,
) -> Option<ShelfInstance> {
    let n = scene.books.len();
    let mut candidates: Vec<usize> = (0..n).collect();
    // Seeded shuffle so the removed book is random but reproducible.
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        candidates.swap(i, j);
    }
    let walls = Walls {
        left: 0.0,
        right: config.shelf_width,
        height: config.shelf_height,
    };
    for &r in &candidates {
        let books: Vec<Book> = scene
            .books
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != r)
            .map(|(_, b)| *b)
            .collect();
        let poses: Vec<BookPose> = scene
            .poses
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != r)
            .map(|(_, p)| *p)
            .collect();
        let report = validate_core(walls, &books, &poses, None, config.tol);
        if !report.all_passed() || !lean_contacts_ok(&poses, config.tol) {
            continue;
        }
        let stored_books = books
            .iter()
            .zip(poses.iter())
            .map(|(b, p)| StoredBook { book: *b, pose: *p })
            .collect();
        return Some(ShelfInstance {
            shelf_width: config.shelf_width,
            shelf_height: config.shelf_height,
            stored_books,
            insert_book: scene.books[r],
            insert_slot: r,
            insert_reference_pose: Some(scene.poses[r]),
        });
    }
    None
}
