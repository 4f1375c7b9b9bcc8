use std::fmt;

use num_rational::Ratio;
use num_traits::ToPrimitive;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::word::{sphere_size, words_of_length, BoundaryWord, Letter, ReducedWord};
use crate::error::{domain, Error, Result};
use crate::exact::ExactScalar;
use crate::space::{BallMeasure, Ideal, ModelSampler, SpaceModel};

/// Rational edge length of the Cayley tree.
pub type EdgeLength = Ratio<i64>;

/// The free group `F_k` acting on its Cayley tree, basepoint at the identity.
///
/// All lengths are `edge_length` times a combinatorial length; the critical
/// exponent is `log(2k−1)/edge_length`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeModel {
    rank: u8,
    edge_length: EdgeLength,
}

/// A point of the tree: the point at combinatorial distance `depth` from the
/// identity along `path` (`path.len() == ceil(depth)`).
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct TreePoint {
    path: ReducedWord,
    depth: f64,
}

impl TreePoint {
    pub fn vertex(w: ReducedWord) -> Self {
        let depth = w.len() as f64;
        Self { path: w, depth }
    }

    /// The point at combinatorial distance `depth` along `path`.
    pub fn along(path: ReducedWord, depth: f64) -> Result<Self> {
        if !(depth >= 0.0) || depth.ceil() as usize != path.len() {
            return domain(format!("depth {depth} does not match path {path}"));
        }
        Ok(Self { path, depth })
    }

    pub fn path(&self) -> &ReducedWord {
        &self.path
    }

    /// Combinatorial distance from the identity.
    pub fn depth(&self) -> f64 {
        self.depth
    }

    pub fn is_vertex(&self) -> bool {
        self.depth.fract() == 0.0
    }
}

impl fmt::Debug for TreePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_vertex() {
            write!(f, "{}", self.path)
        } else {
            write!(f, "{}@{}", self.path, self.depth)
        }
    }
}

pub type TreeIdeal = Ideal<TreePoint, BoundaryWord>;

impl TreeModel {
    pub fn new(rank: u8, edge_length: EdgeLength) -> Result<Self> {
        if !(2..=13).contains(&rank) {
            return domain(format!("rank must be in 2..=13, got {rank}"));
        }
        if edge_length <= Ratio::from_integer(0) {
            return domain("edge length must be positive");
        }
        Ok(Self { rank, edge_length })
    }

    /// Rank `k` with unit edges.
    pub fn free(rank: u8) -> Result<Self> {
        Self::new(rank, Ratio::from_integer(1))
    }

    pub fn rank(&self) -> u8 {
        self.rank
    }

    pub fn edge_length(&self) -> EdgeLength {
        self.edge_length
    }

    pub fn edge_f64(&self) -> f64 {
        self.edge_length.to_f64().unwrap()
    }

    /// Branching number `m = 2k − 1`; the quadratic field is `Q(√m)`.
    pub fn branching(&self) -> u64 {
        2 * self.rank as u64 - 1
    }

    pub fn num_letters(&self) -> u8 {
        2 * self.rank
    }

    pub fn check_word(&self, w: &ReducedWord) -> Result<()> {
        if w.min_rank() > self.rank {
            return domain(format!(
                "word {w} uses generators beyond rank {}",
                self.rank
            ));
        }
        Ok(())
    }

    /// Exact length `edge_length · |w|`.
    pub fn length(&self, w: &ReducedWord) -> EdgeLength {
        self.edge_length * Ratio::from_integer(w.len() as i64)
    }

    /// Meeting depth (combinatorial) of two geodesics issued from the identity.
    fn meet(&self, x: &TreeIdeal, y: &TreeIdeal) -> Result<f64> {
        match (x, y) {
            (Ideal::Point(a), Ideal::Point(b)) => Ok(a
                .depth
                .min(b.depth)
                .min(a.path.common_prefix(&b.path) as f64)),
            (Ideal::Point(a), Ideal::Boundary(c)) | (Ideal::Boundary(c), Ideal::Point(a)) => {
                Ok(a.depth.min(c.match_length(&a.path)? as f64))
            }
            (Ideal::Boundary(b), Ideal::Boundary(c)) => Ok(b.common_prefix(c)? as f64),
        }
    }

    /// Combinatorial Gromov product `(x|y)_w = |w| + m(x,y) − m(x,w) − m(y,w)`.
    fn gromov_units(&self, x: &TreeIdeal, y: &TreeIdeal, base: &TreePoint) -> Result<f64> {
        let w = Ideal::Point(base.clone());
        Ok(base.depth + self.meet(x, y)? - self.meet(x, &w)? - self.meet(y, &w)?)
    }

    /// Exact Busemann cocycle `β_b(p, γp)` in combinatorial units:
    /// `|γ| − 2·(match length)`.
    pub fn busemann_units(&self, b: &BoundaryWord, g: &ReducedWord) -> Result<i64> {
        let j = b.match_length(g)?;
        Ok(g.len() as i64 - 2 * j as i64)
    }

    /// Exact `β_b(p, γp)` in length units.
    pub fn busemann_exact(&self, b: &BoundaryWord, g: &ReducedWord) -> Result<EdgeLength> {
        Ok(self.edge_length * Ratio::from_integer(self.busemann_units(b, g)?))
    }

    /// `e^{−s·η·β}` for an exact β (length units) and a rational multiplier
    /// `s`: `η·β = log(m)·β/edge` so the result is `m^{−s·β/edge}`, exact
    /// whenever `2·s·β/edge` is an integer.
    pub fn exp_eta(&self, beta: EdgeLength, s: Ratio<i64>) -> Result<ExactScalar> {
        let units = beta / self.edge_length * s * Ratio::from_integer(2);
        if !units.is_integer() {
            return domain(format!("exponent {units}/2 is not a half-integer"));
        }
        Ok(ExactScalar::half_power(
            self.branching(),
            -units.to_integer(),
        ))
    }

    /// Length `n` of the words in `S_t`, if any: `n·c ∈ (t − c/2, t + c/2)`.
    pub fn annulus_length(&self, t: f64) -> Result<Option<usize>> {
        let r = self.quotient_radius();
        if !(t > r) {
            return domain(format!("annulus needs t > R = {r}, got {t}"));
        }
        let c = self.edge_f64();
        let n = (t / c).round();
        let nc = n * c;
        Ok((nc > t - r && nc < t + r && n >= 1.0).then_some(n as usize))
    }

    /// `S_t`: all reduced words `γ` with `d(p, γp) ∈ (t − R, t + R)`,
    /// lexicographically ordered.
    pub fn enumerate_annulus(&self, t: f64) -> Result<Vec<ReducedWord>> {
        Ok(match self.annulus_length(t)? {
            Some(n) => words_of_length(self.rank, n),
            None => Vec::new(),
        })
    }

    pub fn annulus_size(&self, t: f64) -> Result<u128> {
        Ok(self
            .annulus_length(t)?
            .map_or(0, |n| sphere_size(self.rank, n)))
    }

    /// `ν_p(C(w)) = (1/2k)·(2k−1)^{1−|w|}`.
    pub fn cylinder_measure(&self, prefix: &ReducedWord) -> Result<ExactScalar> {
        if prefix.is_empty() {
            return domain("cylinder prefix must be nonempty");
        }
        self.check_word(prefix)?;
        Ok(self.depth_measure(prefix.len()))
    }

    /// Measure of any single cylinder of the given depth (≥ 1); depth 0 is
    /// the whole boundary.
    pub fn depth_measure(&self, depth: usize) -> ExactScalar {
        if depth == 0 {
            return ExactScalar::one();
        }
        let m = self.branching() as i64;
        ExactScalar::ratio(1, 2 * self.rank as i64)
            * ExactScalar::half_power(m as u64, -2 * (depth as i64 - 1))
    }

    /// `dν_q/dν_p(b) = e^{−η β_b(p,q)} = m^{2j − |q|}` for a vertex `q`.
    pub fn radon_nikodym(&self, q: &ReducedWord, b: &BoundaryWord) -> Result<ExactScalar> {
        self.check_word(q)?;
        let beta = self.busemann_exact(b, q)?;
        self.exp_eta(beta, Ratio::from_integer(1))
    }

    pub fn vertex(&self, w: ReducedWord) -> TreePoint {
        TreePoint::vertex(w)
    }

    /// Depth of the cylinder that the open ball `B(b, r)` equals, `None` for
    /// the whole boundary (`r > 1`). Points agreeing with `b` for `j`
    /// letters are at distance `e^{−j·edge}`.
    pub fn ball_depth(&self, r: f64) -> Result<Option<usize>> {
        if !(r > 0.0) {
            return domain(format!("ball radius must be positive, got {r}"));
        }
        if r > 1.0 {
            return Ok(None);
        }
        Ok(Some((-r.ln() / self.edge_f64()).floor() as usize + 1))
    }

    /// Exact `ν_p(B(b, r))`.
    pub fn ball_measure_exact(&self, b: &BoundaryWord, r: f64) -> Result<ExactScalar> {
        match self.ball_depth(r)? {
            None => Ok(ExactScalar::one()),
            Some(d) => self.cylinder_measure(&b.head(d)?),
        }
    }
}

impl SpaceModel for TreeModel {
    type Point = TreePoint;
    type Boundary = BoundaryWord;

    fn basepoint(&self) -> TreePoint {
        TreePoint::vertex(ReducedWord::identity())
    }

    fn delta(&self) -> f64 {
        0.0
    }

    fn quotient_radius(&self) -> f64 {
        self.edge_f64() / 2.0
    }

    fn critical_exponent(&self) -> f64 {
        (self.branching() as f64).ln() / self.edge_f64()
    }

    fn contains(&self, x: &TreePoint) -> bool {
        x.path.min_rank() <= self.rank && x.depth.ceil() as usize == x.path.len()
    }

    fn distance(&self, x: &TreePoint, y: &TreePoint) -> f64 {
        let m = x
            .depth
            .min(y.depth)
            .min(x.path.common_prefix(&y.path) as f64);
        (x.depth + y.depth - 2.0 * m) * self.edge_f64()
    }

    fn gromov_oracle(&self, x: &TreeIdeal, y: &TreeIdeal, base: &TreePoint) -> Result<f64> {
        Ok(self.gromov_units(x, y, base)? * self.edge_f64())
    }

    fn direction(&self, q: &TreePoint) -> Result<BoundaryWord> {
        BoundaryWord::extend_word(&q.path)
    }

    fn ray_point(&self, b: &BoundaryWord, s: f64) -> Result<TreePoint> {
        if !(s >= 0.0) {
            return domain("ray parameter must be nonnegative");
        }
        let depth = s / self.edge_f64();
        let path = b.head(depth.ceil() as usize)?;
        TreePoint::along(path, depth)
    }

    fn same_boundary(&self, b: &BoundaryWord, c: &BoundaryWord) -> bool {
        matches!(b.common_prefix(c), Err(Error::InfiniteProduct))
    }
}

impl ModelSampler for TreeModel {
    fn sample_point<R: Rng>(&self, rng: &mut R) -> TreePoint {
        let n = rng.gen_range(0..9usize);
        let w = random_word(self.rank, n, rng);
        if n > 0 && rng.gen_bool(0.4) {
            let depth = n as f64 - rng.gen_range(1..4) as f64 / 4.0;
            TreePoint::along(w, depth).unwrap()
        } else {
            TreePoint::vertex(w)
        }
    }

    fn sample_boundary<R: Rng>(&self, rng: &mut R) -> BoundaryWord {
        loop {
            let p = rng.gen_range(0..7usize);
            let c = rng.gen_range(1..4usize);
            let w = random_word(self.rank, p + c, rng);
            let l = w.letters();
            if let Ok(b) = BoundaryWord::new(l[..p].to_vec(), l[p..].to_vec()) {
                return b;
            }
        }
    }

    fn sample_near<R: Rng>(&self, b: &BoundaryWord, r: f64, rng: &mut R) -> Result<BoundaryWord> {
        if r >= 1.0 {
            return Ok(self.sample_boundary(rng));
        }
        // σ = e^{−edge·lcp} ≤ r needs lcp ≥ −log(r)/edge.
        let keep = (-r.ln() / self.edge_f64() - 1e-12).ceil().max(0.0) as usize;
        let head = b.head(keep)?;
        loop {
            let extra = rng.gen_range(0..4usize);
            let mut letters = head.letters().to_vec();
            while letters.len() < keep + extra + 1 {
                let l = Letter(rng.gen_range(0..2 * self.rank));
                if letters.last().is_some_and(|p| p.is_inverse_of(l)) {
                    continue;
                }
                letters.push(l);
            }
            let cycle = vec![letters.pop().unwrap()];
            if let Ok(c) = BoundaryWord::new(letters, cycle) {
                return Ok(c);
            }
        }
    }
}

impl BallMeasure for TreeModel {
    fn ball_measure(&self, b: &BoundaryWord, r: f64) -> Result<f64> {
        Ok(self.ball_measure_exact(b, r)?.to_f64())
    }
}

/// Uniformly random reduced word of length `n`.
pub fn random_word<R: Rng>(rank: u8, n: usize, rng: &mut R) -> ReducedWord {
    let mut out: Vec<Letter> = Vec::with_capacity(n);
    while out.len() < n {
        let l = Letter(rng.gen_range(0..2 * rank));
        if out.last().is_some_and(|p| p.is_inverse_of(l)) {
            continue;
        }
        out.push(l);
    }
    ReducedWord::new(out).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{
        annulus_cone_membership, busemann_cocycle, check_hyperbolicity, chopped_product,
        gromov_product, shadow, visual_distance, BoundaryBall,
    };
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f2() -> TreeModel {
        TreeModel::free(2).unwrap()
    }
    fn w(s: &str) -> ReducedWord {
        s.parse().unwrap()
    }
    fn v(s: &str) -> Ideal<TreePoint, BoundaryWord> {
        Ideal::Point(TreePoint::vertex(w(s)))
    }
    fn bd(s: &str) -> BoundaryWord {
        s.parse().unwrap()
    }
    fn e() -> TreePoint {
        TreePoint::vertex(ReducedWord::identity())
    }

    #[test]
    fn gromov_product_examples() {
        let m = f2();
        assert_eq!(gromov_product(&m, &v("ab"), &v("aB"), &e()).unwrap(), 1.0);
        let q = TreePoint::vertex(w("abA"));
        assert_eq!(
            gromov_product(&m, &Ideal::Point(q.clone()), &Ideal::Point(q), &e()).unwrap(),
            3.0
        );
        let g = gromov_product(
            &m,
            &Ideal::Boundary(bd("(a)")),
            &Ideal::Boundary(bd("(b)")),
            &e(),
        )
        .unwrap();
        assert_eq!(g, 0.0);
        assert_eq!(
            gromov_product(
                &m,
                &Ideal::Boundary(bd("(a)")),
                &Ideal::Boundary(bd("a(a)")),
                &e()
            ),
            Err(Error::InfiniteProduct)
        );
        // Non-identity base: (ab | aB)_a = 0.
        let a = TreePoint::vertex(w("a"));
        assert_eq!(gromov_product(&m, &v("ab"), &v("aB"), &a).unwrap(), 0.0);
    }

    #[test]
    fn busemann_examples() {
        let m = f2();
        let ab = TreePoint::vertex(w("ab"));
        assert_eq!(busemann_cocycle(&m, &bd("(a)"), &e(), &ab).unwrap(), 0.0);
        assert_eq!(busemann_cocycle(&m, &bd("a(b)"), &e(), &ab).unwrap(), -2.0);
        assert_eq!(busemann_cocycle(&m, &bd("a(b)"), &ab, &ab).unwrap(), 0.0);
        assert_eq!(m.busemann_units(&bd("a(b)"), &w("ab")).unwrap(), -2);
    }

    #[test]
    fn visual_distance_examples() {
        let m = f2();
        let d = visual_distance(&m, &bd("(a)"), &bd("a(b)"), &e()).unwrap();
        assert!((d - (-1f64).exp()).abs() < 1e-15);
        assert_eq!(
            visual_distance(&m, &bd("(a)"), &bd("(a)"), &e()).unwrap(),
            0.0
        );
        assert_eq!(
            visual_distance(&m, &bd("(a)"), &bd("(b)"), &e()).unwrap(),
            1.0
        );
    }

    #[test]
    fn shadow_of_a_vertex() {
        let m = f2();
        let s = shadow(&m, &TreePoint::vertex(w("ab"))).unwrap();
        match &s {
            BoundaryBall::Ball { center, radius } => {
                assert_eq!(center.to_string(), "ab(b)");
                assert!((radius - (-2f64).exp()).abs() < 1e-15);
            }
            _ => panic!("expected a ball"),
        }
        // Open ball of radius e^{-2} around abbb… is the cylinder C(abb).
        assert!(!s.contains(&m, &bd("aB(B)")).unwrap());
        assert!(s.contains(&m, &bd("abb(a)")).unwrap());
        assert!(!s.contains(&m, &bd("aba(a)")).unwrap());
        assert_eq!(shadow(&m, &e()).unwrap(), BoundaryBall::Whole);
    }

    #[test]
    fn chopped_equals_plain_on_tree() {
        let m = f2();
        let ab = TreePoint::vertex(w("ab"));
        assert_eq!(chopped_product(&m, &ab, &bd("(ab)"), &e()).unwrap(), 2.0);
        assert_eq!(chopped_product(&m, &ab, &bd("(b)"), &e()).unwrap(), 0.0);
        assert!(chopped_product(&m, &e(), &bd("(b)"), &e()).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..2000 {
            let q = m.sample_point(&mut rng);
            if q.depth() == 0.0 {
                continue;
            }
            let b = m.sample_boundary(&mut rng);
            let plain = gromov_product(
                &m,
                &Ideal::Point(q.clone()),
                &Ideal::Boundary(b.clone()),
                &e(),
            )
            .unwrap();
            assert_eq!(chopped_product(&m, &q, &b, &e()).unwrap(), plain);
        }
    }

    #[test]
    fn annulus_cone_examples() {
        let m = f2();
        let q = TreePoint::vertex(w("a"));
        // q′ sits at distance 1.5 along aaa…; the window is the open (1, 2).
        let inner = TreePoint::along(w("aa"), 1.75).unwrap();
        assert!(annulus_cone_membership(&m, &inner, &q).unwrap());
        let qp = crate::space::cone_center(&m, &q).unwrap();
        assert_eq!(m.distance(&e(), &qp), 1.5);
        assert!(annulus_cone_membership(&m, &qp, &q).unwrap());
        // |aa| − |q′| = R exactly: outside the open window.
        assert!(!annulus_cone_membership(&m, &TreePoint::vertex(w("aa")), &q).unwrap());
        assert!(
            !annulus_cone_membership(&m, &TreePoint::along(w("ba"), 1.75).unwrap(), &q).unwrap()
        );
    }

    #[test]
    fn annulus_enumeration() {
        let m = f2();
        assert_eq!(m.enumerate_annulus(1.0).unwrap().len(), 4);
        assert_eq!(m.enumerate_annulus(3.0).unwrap().len(), 36);
        assert!(m.enumerate_annulus(0.4).is_err());
        assert!(m.enumerate_annulus(1.5).unwrap().is_empty());
        for n in 1..=14 {
            assert_eq!(sphere_size(2, n), 4 * 3u128.pow(n as u32 - 1));
        }
    }

    #[test]
    fn cylinder_measures() {
        let m = f2();
        assert_eq!(
            m.cylinder_measure(&w("a")).unwrap(),
            ExactScalar::ratio(1, 4)
        );
        assert_eq!(
            m.cylinder_measure(&w("ab")).unwrap(),
            ExactScalar::ratio(1, 12)
        );
        let total: ExactScalar = words_of_length(2, 2)
            .iter()
            .map(|x| m.cylinder_measure(x).unwrap())
            .sum();
        assert_eq!(total, ExactScalar::one());
    }

    #[test]
    fn radon_nikodym_examples() {
        let m = f2();
        assert_eq!(
            m.radon_nikodym(&w("ab"), &bd("(ab)")).unwrap(),
            ExactScalar::from_integer(9)
        );
        assert_eq!(
            m.radon_nikodym(&w("ab"), &bd("(b)")).unwrap(),
            ExactScalar::ratio(1, 9)
        );
        assert_eq!(
            m.radon_nikodym(&ReducedWord::identity(), &bd("(b)"))
                .unwrap(),
            ExactScalar::one()
        );
        assert!(matches!(
            m.radon_nikodym(&w("ab"), &bd("a")),
            Err(Error::InsufficientDepth { .. })
        ));
    }

    #[test]
    fn radon_nikodym_integrates_to_one() {
        // ν_q(B) = ∫ dν_q/dν_p dν_p = 1 for every vertex q.
        let m = f2();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 0..6 {
            let q = random_word(2, n, &mut rng);
            let depth = n + 1;
            let total: ExactScalar = words_of_length(2, depth)
                .iter()
                .map(|c| {
                    let b = BoundaryWord::truncated(c.letters().to_vec()).unwrap();
                    m.radon_nikodym(&q, &b).unwrap() * m.depth_measure(depth)
                })
                .sum();
            assert_eq!(total, ExactScalar::one(), "q = {q}");
        }
    }

    #[test]
    fn hyperbolicity_and_cocycle() {
        let m = f2();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let audit = check_hyperbolicity(&m, 20_000, 0.0, &mut rng).unwrap();
        assert!(audit.max_defect <= 0.0);
        for _ in 0..2000 {
            let b = m.sample_boundary(&mut rng);
            let (x, y, z) = (
                m.sample_point(&mut rng),
                m.sample_point(&mut rng),
                m.sample_point(&mut rng),
            );
            let lhs = busemann_cocycle(&m, &b, &x, &y).unwrap()
                + busemann_cocycle(&m, &b, &y, &z).unwrap();
            assert_eq!(lhs, busemann_cocycle(&m, &b, &x, &z).unwrap());
            assert_eq!(
                busemann_cocycle(&m, &b, &x, &y).unwrap(),
                -busemann_cocycle(&m, &b, &y, &x).unwrap()
            );
        }
    }

    #[test]
    fn rescaled_model_scales_lengths() {
        let m = TreeModel::new(2, Ratio::new(3, 2)).unwrap();
        assert_eq!(m.quotient_radius(), 0.75);
        assert!((m.critical_exponent() - 3f64.ln() / 1.5).abs() < 1e-15);
        assert_eq!(m.annulus_length(3.0).unwrap(), Some(2));
        assert_eq!(
            m.busemann_exact(&bd("a(b)"), &w("ab")).unwrap(),
            Ratio::from_integer(-3)
        );
        assert_eq!(
            m.radon_nikodym(&w("ab"), &bd("(ab)")).unwrap(),
            ExactScalar::from_integer(9)
        );
    }
}
