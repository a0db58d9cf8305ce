//! Difference bound matrices over integer constants.
//!
//! A zone over clocks `x1..xn` is stored as an (n+1)×(n+1) matrix of
//! [`Bound`]s where index 0 is the reference clock (constant 0) and entry
//! `(i, j)` bounds `x_i − x_j`. All mutating operations leave the matrix in
//! canonical (all-pairs-tightest) form; an inconsistent constraint system
//! collapses to a dedicated empty value rather than a half-tightened matrix.
//!
//! The algorithms are the classical ones (Floyd–Warshall closure, free-future
//! `up`, single-bound tightening with incremental closure, max-constant
//! extrapolation); see Bengtsson & Yi's survey on timed-automata analysis for
//! the textbook treatment.

use std::fmt;

/// One difference bound: either `< v` / `≤ v`, or unbounded (`∞`).
///
/// Encoded in a single integer as `v << 1 | 1` for `≤ v` and `v << 1` for
/// `< v`, which makes the natural integer order coincide with bound
/// tightness (`< v` is tighter than `≤ v`, both tighter than any bound on a
/// larger constant) and keeps addition branch-free.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bound(i64);

impl Bound {
    /// Unbounded entry.
    pub const INF: Bound = Bound(i64::MAX);
    /// `≤ 0`, the diagonal/default entry.
    pub const LE_ZERO: Bound = Bound(1);

    pub fn le(v: i64) -> Bound {
        Bound((v << 1) | 1)
    }

    pub fn lt(v: i64) -> Bound {
        Bound(v << 1)
    }

    pub fn is_inf(self) -> bool {
        self == Bound::INF
    }

    /// Bound constant; meaningless for `INF`.
    pub fn value(self) -> i64 {
        self.0 >> 1
    }

    /// True for `< v`, false for `≤ v`.
    pub fn is_strict(self) -> bool {
        !self.is_inf() && self.0 & 1 == 0
    }

    /// Bound addition: constants add, strictness is contagious, `∞` absorbs.
    pub fn add(self, other: Bound) -> Bound {
        if self.is_inf() || other.is_inf() {
            Bound::INF
        } else {
            // (a<<1|sa) + (b<<1|sb) − (sa|sb) = (a+b)<<1 | (sa & sb)
            Bound(self.0 + other.0 - ((self.0 & 1) | (other.0 & 1)))
        }
    }
}

impl fmt::Debug for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_inf() {
            write!(f, "<inf")
        } else if self.is_strict() {
            write!(f, "<{}", self.value())
        } else {
            write!(f, "<={}", self.value())
        }
    }
}

/// A canonical difference bound matrix, or the distinguished empty zone.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dbm {
    /// Number of real clocks; the matrix is `(clocks+1)²`.
    clocks: usize,
    /// Row-major `(clocks+1)²` entries; fixed all-`≤0` pattern when `empty`.
    m: Vec<Bound>,
    empty: bool,
}

impl Dbm {
    /// The zone containing exactly the zero point (all clocks = 0).
    pub fn init(clocks: usize) -> Dbm {
        let dim = clocks + 1;
        Dbm { clocks, m: vec![Bound::LE_ZERO; dim * dim], empty: false }
    }

    /// The distinguished empty zone over the same clock set.
    pub fn empty(clocks: usize) -> Dbm {
        let dim = clocks + 1;
        Dbm { clocks, m: vec![Bound::LE_ZERO; dim * dim], empty: true }
    }

    pub fn clocks(&self) -> usize {
        self.clocks
    }

    fn dim(&self) -> usize {
        self.clocks + 1
    }

    pub fn is_empty(&self) -> bool {
        self.empty
    }

    /// Entry `(i, j)` bounding `x_i − x_j` (index 0 is the reference clock).
    pub fn get(&self, i: usize, j: usize) -> Bound {
        self.m[i * self.dim() + j]
    }

    fn set(&mut self, i: usize, j: usize, b: Bound) {
        let d = self.dim();
        self.m[i * d + j] = b;
    }

    fn collapse_empty(&mut self) {
        self.m = vec![Bound::LE_ZERO; self.dim() * self.dim()];
        self.empty = true;
    }

    /// Floyd–Warshall all-pairs tightening. Detects inconsistency via a
    /// negative diagonal and collapses to the empty value in that case.
    pub fn canonicalize(&mut self) {
        if self.empty {
            return;
        }
        let d = self.dim();
        for k in 0..d {
            for i in 0..d {
                let mik = self.get(i, k);
                if mik.is_inf() {
                    continue;
                }
                for j in 0..d {
                    let via = mik.add(self.get(k, j));
                    if via < self.get(i, j) {
                        self.set(i, j, via);
                    }
                }
            }
        }
        for i in 0..d {
            if self.get(i, i) < Bound::LE_ZERO {
                self.collapse_empty();
                return;
            }
        }
        // The closure can only tighten diagonals downward; pin them at ≤0.
        for i in 0..d {
            self.set(i, i, Bound::LE_ZERO);
        }
    }

    /// Delay closure: erase all upper bounds (`x_i − 0`), letting time pass.
    /// Preserves canonical form.
    pub fn up(&mut self) {
        if self.empty {
            return;
        }
        for i in 1..self.dim() {
            self.set(i, 0, Bound::INF);
        }
    }

    /// Tighten entry `(i, j)` to at most `b` and restore canonical form
    /// incrementally. Collapses to empty when the system becomes infeasible.
    pub fn tighten(&mut self, i: usize, j: usize, b: Bound) {
        if self.empty || b >= self.get(i, j) {
            return;
        }
        if b.add(self.get(j, i)) < Bound::LE_ZERO {
            self.collapse_empty();
            return;
        }
        self.set(i, j, b);
        let d = self.dim();
        for a in 0..d {
            let ai = self.get(a, i);
            if ai.is_inf() {
                continue;
            }
            for c in 0..d {
                let via = ai.add(b).add(self.get(j, c));
                if via < self.get(a, c) {
                    self.set(a, c, via);
                }
            }
        }
    }

    pub fn constrain_le(&mut self, x: usize, c: i64) {
        self.tighten(x, 0, Bound::le(c));
    }

    pub fn constrain_lt(&mut self, x: usize, c: i64) {
        self.tighten(x, 0, Bound::lt(c));
    }

    pub fn constrain_ge(&mut self, x: usize, c: i64) {
        self.tighten(0, x, Bound::le(-c));
    }

    pub fn constrain_gt(&mut self, x: usize, c: i64) {
        self.tighten(0, x, Bound::lt(-c));
    }

    pub fn constrain_eq(&mut self, x: usize, c: i64) {
        self.constrain_le(x, c);
        self.constrain_ge(x, c);
    }

    /// Reset clock `x` to the constant `c ≥ 0`. Preserves canonical form.
    pub fn reset(&mut self, x: usize, c: i64) {
        debug_assert!(c >= 0, "clock resets take nonnegative constants");
        if self.empty {
            return;
        }
        let d = self.dim();
        for j in 0..d {
            if j != x {
                let b = Bound::le(c).add(self.get(0, j));
                self.set(x, j, b);
                let b = self.get(j, 0).add(Bound::le(-c));
                self.set(j, x, b);
            }
        }
        self.set(x, x, Bound::LE_ZERO);
    }

    /// True iff `other`'s solution set is contained in `self`'s. Both sides
    /// must be canonical; decided entrywise.
    pub fn includes(&self, other: &Dbm) -> bool {
        debug_assert_eq!(self.clocks, other.clocks);
        if other.empty {
            return true;
        }
        if self.empty {
            return false;
        }
        self.m.iter().zip(other.m.iter()).all(|(a, b)| b <= a)
    }

    /// Classic max-constant extrapolation. `maxc[x]` is the largest constant
    /// clock `x` is ever compared against (index 0 unused). Upper bounds above
    /// the max become `∞`; lower bounds below `−max` clamp to `(−max, <)`.
    /// Re-canonicalizes, so the result is idempotent under re-application.
    pub fn extrapolate(&mut self, maxc: &[i64]) {
        if self.empty {
            return;
        }
        debug_assert_eq!(maxc.len(), self.dim());
        let d = self.dim();
        let mut changed = false;
        for i in 0..d {
            for j in 0..d {
                if i == j {
                    continue;
                }
                let b = self.get(i, j);
                if i != 0 && !b.is_inf() && b > Bound::le(maxc[i]) {
                    self.set(i, j, Bound::INF);
                    changed = true;
                } else if j != 0 && b < Bound::lt(-maxc[j]) {
                    self.set(i, j, Bound::lt(-maxc[j]));
                    changed = true;
                }
            }
        }
        if changed {
            self.canonicalize();
        }
    }
}

impl fmt::Debug for Dbm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.empty {
            return write!(f, "Dbm(empty, {} clocks)", self.clocks);
        }
        writeln!(f, "Dbm({} clocks)", self.clocks)?;
        for i in 0..self.dim() {
            let row: Vec<String> =
                (0..self.dim()).map(|j| format!("{:?}", self.get(i, j))).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // ---- independent oracles -------------------------------------------

    /// Bellman–Ford all-pairs shortest paths over the bound graph: per
    /// source, |V|−1 relaxation rounds plus a negative-cycle probe. Written
    /// against the same (value, strict) arithmetic but sharing no code with
    /// `canonicalize`.
    fn shortest_path_oracle(raw: &[Vec<Bound>]) -> Option<Vec<Vec<Bound>>> {
        let n = raw.len();
        let mut dist = vec![vec![Bound::INF; n]; n];
        for (s, row) in dist.iter_mut().enumerate() {
            row[s] = Bound::LE_ZERO;
            for _ in 0..n {
                let mut improved = false;
                for u in 0..n {
                    if row[u].is_inf() {
                        continue;
                    }
                    for v in 0..n {
                        let cand = row[u].add(raw[u][v]);
                        if cand < row[v] {
                            row[v] = cand;
                            improved = true;
                        }
                    }
                }
                if !improved {
                    break;
                }
            }
            // one more sweep: any improvement means a negative cycle
            for u in 0..n {
                if row[u].is_inf() {
                    continue;
                }
                for v in 0..n {
                    if row[u].add(raw[u][v]) < row[v] {
                        return None;
                    }
                }
            }
            if row[s] < Bound::LE_ZERO {
                return None;
            }
        }
        Some(dist)
    }

    fn raw_entries(d: &Dbm) -> Vec<Vec<Bound>> {
        (0..d.dim()).map(|i| (0..d.dim()).map(|j| d.get(i, j)).collect()).collect()
    }

    /// Integer points of the box `[0, hi]^clocks` satisfying every non-strict
    /// constraint of a closed DBM.
    fn lattice_points(d: &Dbm, hi: i64) -> Vec<Vec<i64>> {
        assert!(!d.is_empty());
        let n = d.clocks();
        let mut pts = Vec::new();
        let total = (hi + 1).pow(n as u32);
        'outer: for code in 0..total {
            let mut p = vec![0i64; n + 1];
            let mut c = code;
            for x in 1..=n {
                p[x] = c % (hi + 1);
                c /= hi + 1;
            }
            for i in 0..=n {
                for j in 0..=n {
                    let b = d.get(i, j);
                    if b.is_inf() {
                        continue;
                    }
                    assert!(!b.is_strict(), "lattice oracle only handles closed DBMs");
                    if p[i] - p[j] > b.value() {
                        continue 'outer;
                    }
                }
            }
            pts.push(p);
        }
        pts
    }

    /// Deterministic splitmix64 stream so the oracle corpus is stable across
    /// runs and platforms.
    struct Mix(u64);
    impl Mix {
        fn next(&mut self) -> u64 {
            // splitmix64 step
            self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
            let mut z = self.0;
            z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
            z ^ (z >> 31)
        }
        fn below(&mut self, n: u64) -> u64 {
            self.next() % n
        }
    }

    /// A random raw (possibly inconsistent, possibly strict) DBM: diagonal
    /// ≤0, clocks nonneg via row 0 ≤ 0, other entries drawn from
    /// {∞} ∪ {<c, ≤c : |c| ≤ 8}.
    fn random_raw(rng: &mut Mix, clocks: usize, strict_allowed: bool) -> Dbm {
        let mut d = Dbm::init(clocks);
        let n = clocks + 1;
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let b = if rng.below(4) == 0 {
                    Bound::INF
                } else {
                    let c = rng.below(17) as i64 - 8;
                    if strict_allowed && rng.below(3) == 0 {
                        Bound::lt(c)
                    } else {
                        Bound::le(c)
                    }
                };
                // keep clocks nonnegative: row 0 entries stay ≤ 0
                let b = if i == 0 && b > Bound::LE_ZERO { Bound::LE_ZERO } else { b };
                d.set(i, j, b);
            }
        }
        d
    }

    // ---- canonical form vs shortest paths ------------------------------

    #[test]
    fn canonicalize_matches_shortest_path_oracle() {
        let mut rng = Mix(0xdb31);
        for case in 0..1000 {
            let clocks = 1 + (case % 5);
            let raw = random_raw(&mut rng, clocks, true);
            let entries = raw_entries(&raw);
            let mut closed = raw.clone();
            closed.canonicalize();
            match shortest_path_oracle(&entries) {
                None => assert!(closed.is_empty(), "case {case}: oracle says empty"),
                Some(apsp) => {
                    assert!(!closed.is_empty(), "case {case}: oracle says nonempty");
                    for i in 0..=clocks {
                        for j in 0..=clocks {
                            let want = if i == j { Bound::LE_ZERO } else { apsp[i][j] };
                            assert_eq!(
                                closed.get(i, j),
                                want,
                                "case {case}: entry ({i},{j}) diverges from oracle"
                            );
                        }
                    }
                }
            }
        }
    }

    // ---- emptiness and inclusion vs lattice enumeration -----------------

    #[test]
    fn emptiness_matches_lattice_enumeration() {
        let mut rng = Mix(0x1a77);
        let mut nonempty_seen = 0;
        for case in 0..300 {
            let clocks = 1 + (case % 3);
            let mut d = random_raw(&mut rng, clocks, false);
            // bound the zone inside the box so enumeration is conclusive
            for x in 1..=clocks {
                let cur = d.get(x, 0);
                if cur > Bound::le(16) {
                    d.set(x, 0, Bound::le(16));
                }
            }
            let raw = d.clone();
            d.canonicalize();
            if d.is_empty() {
                assert!(
                    lattice_points(&raw, 16).is_empty(),
                    "case {case}: canonical says empty but lattice found a point"
                );
            } else {
                nonempty_seen += 1;
                assert!(
                    !lattice_points(&d, 16).is_empty(),
                    "case {case}: canonical says nonempty but lattice is bare"
                );
            }
        }
        assert!(nonempty_seen > 50, "corpus degenerated to empty zones");
    }

    /// Mostly-satisfiable closed DBM: sparse constraints, forward-biased
    /// differences. Suited to inclusion testing where empty zones teach
    /// nothing.
    fn random_mild(rng: &mut Mix, clocks: usize) -> Dbm {
        let mut d = Dbm::init(clocks);
        d.up();
        for x in 1..=clocks {
            if rng.below(2) == 0 {
                d.constrain_le(x, rng.below(9) as i64 + rng.below(9) as i64);
            }
            if rng.below(2) == 0 {
                d.constrain_ge(x, rng.below(9) as i64);
            }
        }
        if clocks >= 2 && rng.below(2) == 0 {
            let i = 1 + rng.below(clocks as u64) as usize;
            let mut j = 1 + rng.below(clocks as u64) as usize;
            if i == j {
                j = 1 + (j % clocks);
            }
            d.tighten(i, j, Bound::le(rng.below(17) as i64 - 4));
        }
        d
    }

    #[test]
    fn inclusion_matches_lattice_enumeration() {
        let mut rng = Mix(0xbeef);
        let mut checked = 0;
        let mut included = 0;
        for case in 0..400 {
            let clocks = 1 + (case % 3);
            let mut a = random_mild(&mut rng, clocks);
            let mut b = if rng.below(2) == 0 {
                // tightened copy: inclusion should usually hold
                let mut t = a.clone();
                let x = 1 + rng.below(clocks as u64) as usize;
                t.constrain_le(x, rng.below(12) as i64);
                t
            } else {
                random_mild(&mut rng, clocks)
            };
            for d in [&mut a, &mut b] {
                for x in 1..=clocks {
                    if d.get(x, 0) > Bound::le(16) {
                        d.constrain_le(x, 16);
                    }
                }
            }
            if b.is_empty() {
                assert!(a.includes(&b), "case {case}: empty ⊆ anything");
                continue;
            }
            if a.is_empty() {
                assert!(!a.includes(&b), "case {case}: nonempty ⊄ empty");
                continue;
            }
            checked += 1;
            let pa = lattice_points(&a, 16);
            let pb = lattice_points(&b, 16);
            let lattice_subset = pb.iter().all(|p| pa.contains(p));
            assert_eq!(
                a.includes(&b),
                lattice_subset,
                "case {case}: includes() disagrees with pointwise subset"
            );
            if lattice_subset {
                included += 1;
            }
        }
        assert!(checked > 200, "corpus degenerated to empty zones");
        assert!(included > 50, "corpus produced too few true inclusions");
    }

    // ---- targeted operation checks --------------------------------------

    #[test]
    fn init_is_the_zero_point() {
        let d = Dbm::init(3);
        let pts = lattice_points(&d, 4);
        assert_eq!(pts, vec![vec![0, 0, 0, 0]]);
    }

    #[test]
    fn up_frees_upper_bounds_only() {
        let mut d = Dbm::init(2);
        d.up();
        assert!(d.get(1, 0).is_inf() && d.get(2, 0).is_inf());
        // differences still pinned at 0
        assert_eq!(d.get(1, 2), Bound::LE_ZERO);
        assert_eq!(d.get(2, 1), Bound::LE_ZERO);
        // ... and the zone now holds every diagonal point in the box
        for p in lattice_points(&d, 5) {
            assert_eq!(p[1], p[2]);
        }
        assert_eq!(lattice_points(&d, 5).len(), 6);
    }

    #[test]
    fn constrain_carves_the_expected_interval() {
        let mut d = Dbm::init(1);
        d.up();
        d.constrain_ge(1, 3);
        d.constrain_le(1, 5);
        let pts: Vec<i64> = lattice_points(&d, 8).iter().map(|p| p[1]).collect();
        assert_eq!(pts, vec![3, 4, 5]);
        d.constrain_gt(1, 5);
        assert!(d.is_empty());
    }

    #[test]
    fn contradictory_constraint_collapses_to_the_sentinel() {
        let mut d = Dbm::init(1);
        d.up();
        d.constrain_lt(1, 3);
        d.constrain_ge(1, 3);
        assert!(d.is_empty());
        assert_eq!(d, Dbm::empty(1), "empty must be a single distinguished value");
    }

    #[test]
    fn reset_pins_one_clock_and_keeps_the_rest() {
        let mut d = Dbm::init(2);
        d.up();
        d.constrain_ge(2, 4);
        d.constrain_le(2, 6);
        d.reset(1, 0);
        for p in lattice_points(&d, 8) {
            assert_eq!(p[1], 0);
            assert!((4..=6).contains(&p[2]));
        }
        // reset to a nonzero constant as well
        d.reset(1, 2);
        for p in lattice_points(&d, 8) {
            assert_eq!(p[1], 2);
        }
    }

    #[test]
    fn extrapolation_widens_past_the_max_constant() {
        // zone: x1 == 10 exactly; with max constant 3 the upper bound opens
        // up and the lower bound clamps to > 3.
        let mut d = Dbm::init(1);
        d.up();
        d.constrain_eq(1, 10);
        let maxc = [0, 3];
        d.extrapolate(&maxc);
        assert!(d.get(1, 0).is_inf());
        assert_eq!(d.get(0, 1), Bound::lt(-3));
        // idempotent
        let again = {
            let mut e = d.clone();
            e.extrapolate(&maxc);
            e
        };
        assert_eq!(d, again);
    }

    #[test]
    fn extrapolation_preserves_bounds_at_or_below_max() {
        let mut d = Dbm::init(1);
        d.up();
        d.constrain_ge(1, 1);
        d.constrain_le(1, 3);
        let before = d.clone();
        d.extrapolate(&[0, 3]);
        assert_eq!(d, before, "nothing above the max constant, nothing to widen");
    }

    // ---- property tests --------------------------------------------------

    use proptest::prelude::*;

    fn arb_ops() -> impl Strategy<Value = Vec<(u8, usize, i64)>> {
        proptest::collection::vec((0u8..5, 1usize..4, 0i64..8), 0..12)
    }

    fn apply_ops(clocks: usize, ops: &[(u8, usize, i64)]) -> Dbm {
        let mut d = Dbm::init(clocks);
        d.up();
        for &(kind, x, c) in ops {
            let x = 1 + (x - 1) % clocks;
            match kind {
                0 => d.constrain_le(x, c),
                1 => d.constrain_ge(x, c),
                2 => d.reset(x, c.min(3)),
                3 => d.up(),
                _ => d.extrapolate(&vec![8; clocks + 1]),
            }
        }
        d
    }

    proptest! {
        #[test]
        fn canonicalize_is_idempotent(ops in arb_ops()) {
            let d = apply_ops(3, &ops);
            let mut again = d.clone();
            again.canonicalize();
            prop_assert_eq!(d, again);
        }

        #[test]
        fn includes_is_reflexive(ops in arb_ops()) {
            let d = apply_ops(3, &ops);
            prop_assert!(d.includes(&d));
        }

        #[test]
        fn constraining_shrinks(ops in arb_ops(), x in 1usize..4, c in 0i64..8) {
            let d = apply_ops(3, &ops);
            let mut tighter = d.clone();
            tighter.constrain_le(x, c);
            prop_assert!(d.includes(&tighter));
        }

        #[test]
        fn up_grows(ops in arb_ops()) {
            let d = apply_ops(3, &ops);
            let mut freed = d.clone();
            freed.up();
            prop_assert!(freed.includes(&d));
        }

        #[test]
        fn extrapolation_grows_and_is_idempotent(ops in arb_ops()) {
            let d = apply_ops(3, &ops);
            let maxc = vec![5i64; 4];
            let mut wide = d.clone();
            wide.extrapolate(&maxc);
            prop_assert!(wide.includes(&d));
            let mut again = wide.clone();
            again.extrapolate(&maxc);
            prop_assert_eq!(wide, again);
        }

        #[test]
        fn includes_is_transitive(a in arb_ops(), b in arb_ops(), c in arb_ops()) {
            let da = apply_ops(2, &a);
            let db = apply_ops(2, &b);
            let dc = apply_ops(2, &c);
            if da.includes(&db) && db.includes(&dc) {
                prop_assert!(da.includes(&dc));
            }
        }
    }
}
