//! Continuous piecewise-linear functions over a closed rational interval.
//!
//! A [`Pwl`] is stored as its breakpoints with strictly increasing
//! abscissae. Collinear interior breakpoints are always pruned, so two
//! functions are equal exactly when they have the same representation.

use std::cmp::Ordering;
use std::fmt;

use num_traits::{Signed, Zero};

use crate::envelope;
use crate::error::{ensure, Error, Result};
use crate::rational::{format_rational, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Pwl {
    points: Vec<(Rational, Rational)>,
}

fn collinear(p: &(Rational, Rational), q: &(Rational, Rational), r: &(Rational, Rational)) -> bool {
    (&q.1 - &p.1) * (&r.0 - &q.0) == (&r.1 - &q.1) * (&q.0 - &p.0)
}

/// Drops interior points lying on the segment between their neighbours.
fn prune(points: Vec<(Rational, Rational)>) -> Vec<(Rational, Rational)> {
    let mut out: Vec<(Rational, Rational)> = Vec::with_capacity(points.len());
    for p in points {
        if let Some(last) = out.last() {
            if last.0 == p.0 {
                continue;
            }
        }
        while out.len() >= 2 && collinear(&out[out.len() - 2], &out[out.len() - 1], &p) {
            out.pop();
        }
        out.push(p);
    }
    out
}

fn interpolate(p: &(Rational, Rational), q: &(Rational, Rational), b: &Rational) -> Rational {
    &p.1 + (&q.1 - &p.1) * (b - &p.0) / (&q.0 - &p.0)
}

impl Pwl {
    /// Builds a function from breakpoints with strictly increasing `b`.
    pub fn new(points: Vec<(Rational, Rational)>) -> Result<Self> {
        ensure!(!points.is_empty(), "a piecewise-linear function needs at least one breakpoint");
        for w in points.windows(2) {
            ensure!(
                w[0].0 < w[1].0,
                "breakpoints must be strictly increasing, got {} then {}",
                format_rational(&w[0].0),
                format_rational(&w[1].0)
            );
        }
        Ok(Self::from_sorted(points))
    }

    /// Caller guarantees nonempty input with nondecreasing abscissae;
    /// repeated abscissae keep their first value.
    pub(crate) fn from_sorted(points: Vec<(Rational, Rational)>) -> Self {
        debug_assert!(!points.is_empty());
        Pwl { points: prune(points) }
    }

    /// The function defined only at `b`.
    pub fn point(b: Rational, v: Rational) -> Self {
        Pwl { points: vec![(b, v)] }
    }

    pub fn breakpoints(&self) -> &[(Rational, Rational)] {
        &self.points
    }

    pub fn into_breakpoints(self) -> Vec<(Rational, Rational)> {
        self.points
    }

    pub fn lo(&self) -> &Rational {
        &self.points[0].0
    }

    pub fn hi(&self) -> &Rational {
        &self.points[self.points.len() - 1].0
    }

    pub fn is_point(&self) -> bool {
        self.points.len() == 1
    }

    pub fn contains(&self, b: &Rational) -> bool {
        self.lo() <= b && b <= self.hi()
    }

    fn out_of_domain(&self, b: &Rational) -> Error {
        Error::OutOfDomain {
            value: format_rational(b),
            lo: format_rational(self.lo()),
            hi: format_rational(self.hi()),
        }
    }

    /// Index of the segment `[points[i], points[i + 1]]` holding `b`, with
    /// breakpoints assigned to the segment on their right (the last
    /// breakpoint to the last segment).
    fn segment_index(&self, b: &Rational) -> usize {
        let idx = self.points.partition_point(|p| &p.0 <= b);
        idx.saturating_sub(1).min(self.points.len().saturating_sub(2))
    }

    pub fn eval(&self, b: &Rational) -> Result<Rational> {
        if !self.contains(b) {
            return Err(self.out_of_domain(b));
        }
        if self.is_point() {
            return Ok(self.points[0].1.clone());
        }
        let i = self.segment_index(b);
        let (p, q) = (&self.points[i], &self.points[i + 1]);
        if &p.0 == b {
            return Ok(p.1.clone());
        }
        if &q.0 == b {
            return Ok(q.1.clone());
        }
        Ok(interpolate(p, q, b))
    }

    /// Evaluates at every element of the sorted slice `xs`, all of which
    /// must lie in the domain.
    fn eval_sorted(&self, xs: &[Rational]) -> Vec<Rational> {
        let mut out = Vec::with_capacity(xs.len());
        let mut i = 0;
        for x in xs {
            while i + 1 < self.points.len() && &self.points[i + 1].0 <= x {
                i += 1;
            }
            if &self.points[i].0 == x || i + 1 == self.points.len() {
                out.push(self.points[i].1.clone());
            } else {
                out.push(interpolate(&self.points[i], &self.points[i + 1], x));
            }
        }
        out
    }

    /// Slope of the linear piece directly right of `b`. At the right end of
    /// the domain the slope of the last piece is returned; a point function
    /// has slope zero.
    pub fn slope_right(&self, b: &Rational) -> Result<Rational> {
        if !self.contains(b) {
            return Err(self.out_of_domain(b));
        }
        if self.is_point() {
            return Ok(Rational::zero());
        }
        let i = self.segment_index(b);
        let (p, q) = (&self.points[i], &self.points[i + 1]);
        Ok((&q.1 - &p.1) / (&q.0 - &p.0))
    }

    /// The restriction to `[lo, hi]`, which must lie inside the domain.
    pub fn restrict(&self, lo: &Rational, hi: &Rational) -> Result<Pwl> {
        ensure!(
            lo <= hi,
            "empty range [{}, {}]",
            format_rational(lo),
            format_rational(hi)
        );
        if !self.contains(lo) {
            return Err(self.out_of_domain(lo));
        }
        if !self.contains(hi) {
            return Err(self.out_of_domain(hi));
        }
        let mut pts = vec![(lo.clone(), self.eval(lo)?)];
        let start = self.points.partition_point(|p| &p.0 <= lo);
        for p in &self.points[start..] {
            if &p.0 >= hi {
                break;
            }
            pts.push(p.clone());
        }
        if hi > lo {
            pts.push((hi.clone(), self.eval(hi)?));
        }
        Ok(Pwl::from_sorted(pts))
    }

    /// Translates the graph by `(db, dv)`.
    pub fn shift(&self, db: &Rational, dv: &Rational) -> Pwl {
        Pwl {
            points: self.points.iter().map(|(b, v)| (b + db, v + dv)).collect(),
        }
    }

    /// Maximum over `[lo, hi]` and the smallest point attaining it.
    pub fn maximize(&self, lo: &Rational, hi: &Rational) -> Result<(Rational, Rational)> {
        ensure!(
            lo <= hi,
            "empty range [{}, {}]",
            format_rational(lo),
            format_rational(hi)
        );
        let mut best = (lo.clone(), self.eval(lo)?);
        let start = self.points.partition_point(|p| &p.0 <= lo);
        for (b, v) in &self.points[start..] {
            if b >= hi {
                break;
            }
            if v > &best.1 {
                best = (b.clone(), v.clone());
            }
        }
        let top = self.eval(hi)?;
        if top > best.1 {
            best = (hi.clone(), top);
        }
        Ok(best)
    }

    /// Every point of `[lo, hi]` where the maximum is attained, as the
    /// disjoint closed intervals of the maximizer set (point intervals for
    /// isolated maximizers).
    pub fn argmax_set(&self, lo: &Rational, hi: &Rational) -> Result<Vec<(Rational, Rational)>> {
        let (_, best) = self.maximize(lo, hi)?;
        let f = self.restrict(lo, hi)?;
        let mut out: Vec<(Rational, Rational)> = Vec::new();
        let pts = f.breakpoints();
        for (i, (b, v)) in pts.iter().enumerate() {
            if v != &best {
                continue;
            }
            let joined = i > 0 && pts[i - 1].1 == best;
            match out.last_mut() {
                Some(last) if joined => last.1 = b.clone(),
                _ => out.push((b.clone(), b.clone())),
            }
        }
        Ok(out)
    }
}

impl fmt::Display for Pwl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, (b, v)) in self.points.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "({}, {})", format_rational(b), format_rational(v))?;
        }
        write!(f, "]")
    }
}

fn merged_abscissae(f: &Pwl, g: &Pwl) -> Vec<Rational> {
    let (a, b) = (f.breakpoints(), g.breakpoints());
    let mut xs = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let next = match (a.get(i), b.get(j)) {
            (Some(p), Some(q)) => match p.0.cmp(&q.0) {
                Ordering::Less => {
                    i += 1;
                    p.0.clone()
                }
                Ordering::Greater => {
                    j += 1;
                    q.0.clone()
                }
                Ordering::Equal => {
                    i += 1;
                    j += 1;
                    p.0.clone()
                }
            },
            (Some(p), None) => {
                i += 1;
                p.0.clone()
            }
            (None, Some(q)) => {
                j += 1;
                q.0.clone()
            }
            (None, None) => unreachable!(),
        };
        xs.push(next);
    }
    xs
}

/// Pointwise minimum of two functions on the same domain.
fn min_pair(f: &Pwl, g: &Pwl) -> Pwl {
    let xs = merged_abscissae(f, g);
    let vf = f.eval_sorted(&xs);
    let vg = g.eval_sorted(&xs);
    let mut out = Vec::with_capacity(xs.len() + xs.len() / 2);
    for t in 0..xs.len() {
        out.push((xs[t].clone(), vf[t].clone().min(vg[t].clone())));
        if t + 1 < xs.len() {
            let d0 = &vf[t] - &vg[t];
            let d1 = &vf[t + 1] - &vg[t + 1];
            if (d0.is_positive() && d1.is_negative()) || (d0.is_negative() && d1.is_positive()) {
                let frac = &d0 / (&d0 - &d1);
                let x = &xs[t] + (&xs[t + 1] - &xs[t]) * &frac;
                let v = &vf[t] + (&vf[t + 1] - &vf[t]) * &frac;
                out.push((x, v));
            }
        }
    }
    Pwl::from_sorted(out)
}

fn envelope_rec(fs: &[Pwl]) -> Pwl {
    match fs.len() {
        1 => fs[0].clone(),
        2 => min_pair(&fs[0], &fs[1]),
        n => {
            let (left, right) = fs.split_at(n / 2);
            min_pair(&envelope_rec(left), &envelope_rec(right))
        }
    }
}

/// Pointwise minimum of functions sharing one domain, merged by divide and
/// conquer.
pub fn lower_envelope(fs: &[Pwl]) -> Result<Pwl> {
    check_shared_domain(fs)?;
    if let Some((leaves, sb, sv)) = envelope::leaves_of(fs) {
        if let Some(r) = envelope::envelope_of_leaves(leaves, fs[0].lo(), fs[0].hi(), &sb, &sv) {
            return r;
        }
    }
    Ok(envelope_rec(fs))
}

fn check_shared_domain(fs: &[Pwl]) -> Result<()> {
    ensure!(!fs.is_empty(), "lower envelope of an empty family");
    let (lo, hi) = (fs[0].lo(), fs[0].hi());
    for f in fs {
        ensure!(
            f.lo() == lo && f.hi() == hi,
            "domain mismatch: [{}, {}] vs [{}, {}]",
            format_rational(f.lo()),
            format_rational(f.hi()),
            format_rational(lo),
            format_rational(hi)
        );
    }
    Ok(())
}

/// A function defined on a union of closed intervals: continuous pieces
/// sorted by domain, disjoint except for shared endpoints, plus isolated
/// point values lying strictly below every piece defined there.
#[derive(Clone, Debug)]
struct Partial {
    pieces: Vec<Pwl>,
    points: Vec<(Rational, Rational)>,
}

impl Partial {
    fn of(f: Pwl) -> Self {
        if f.is_point() {
            Partial {
                pieces: Vec::new(),
                points: f.into_breakpoints(),
            }
        } else {
            Partial {
                pieces: vec![f],
                points: Vec::new(),
            }
        }
    }

    /// Minimum of the pieces defined at `b`.
    fn piece_value(&self, b: &Rational) -> Option<Rational> {
        let from = self.pieces.partition_point(|f| f.hi() < b);
        self.pieces[from..]
            .iter()
            .take_while(|f| f.lo() <= b)
            .map(|f| f.eval(b).expect("piece covers b"))
            .min()
    }

    fn point_value(&self, b: &Rational) -> Option<&Rational> {
        self.points
            .binary_search_by(|p| p.0.cmp(b))
            .ok()
            .map(|i| &self.points[i].1)
    }

    fn value(&self, b: &Rational) -> Option<Rational> {
        match (self.piece_value(b), self.point_value(b)) {
            (Some(x), Some(y)) => Some(x.min(y.clone())),
            (x, y) => x.or_else(|| y.cloned()),
        }
    }
}

fn push_piece(out: &mut Vec<Pwl>, piece: Pwl) {
    if let Some(last) = out.last_mut() {
        let (b, v) = &piece.breakpoints()[0];
        if let Some((lb, lv)) = last.breakpoints().last() {
            if lb == b && lv == v {
                let mut pts = std::mem::take(&mut last.points);
                pts.extend(piece.into_breakpoints().into_iter().skip(1));
                *last = Pwl::from_sorted(pts);
                return;
            }
        }
    }
    out.push(piece);
}

fn min_partial(f: &Partial, g: &Partial) -> Partial {
    let mut cuts: Vec<Rational> = Vec::new();
    for p in f.pieces.iter().chain(&g.pieces) {
        cuts.push(p.lo().clone());
        cuts.push(p.hi().clone());
    }
    cuts.sort();
    cuts.dedup();
    let covering = |pieces: &[Pwl], idx: &mut usize, l: &Rational, r: &Rational| -> Option<Pwl> {
        while *idx < pieces.len() && pieces[*idx].hi() <= l {
            *idx += 1;
        }
        let p = pieces.get(*idx)?;
        (p.lo() <= l && r <= p.hi()).then(|| p.restrict(l, r).expect("covered"))
    };
    let mut pieces = Vec::new();
    let (mut i, mut j) = (0, 0);
    for w in cuts.windows(2) {
        let piece = match (covering(&f.pieces, &mut i, &w[0], &w[1]), covering(&g.pieces, &mut j, &w[0], &w[1])) {
            (Some(x), Some(y)) => min_pair(&x, &y),
            (Some(x), None) | (None, Some(x)) => x,
            (None, None) => continue,
        };
        push_piece(&mut pieces, piece);
    }
    let mut out = Partial {
        pieces,
        points: Vec::new(),
    };
    let mut points: Vec<(Rational, Rational)> = f.points.iter().chain(&g.points).cloned().collect();
    points.sort();
    points.dedup_by(|later, earlier| later.0 == earlier.0);
    let kept = points
        .into_iter()
        .filter(|(b, v)| out.piece_value(b).map_or(true, |w| v < &w))
        .collect();
    out.points = kept;
    out
}

fn envelope_partial_rec(fs: &[Partial]) -> Partial {
    match fs.len() {
        1 => fs[0].clone(),
        n => {
            let (left, right) = fs.split_at(n / 2);
            min_partial(&envelope_partial_rec(left), &envelope_partial_rec(right))
        }
    }
}

/// Pointwise minimum over `[lo, hi]` of functions defined on sub-intervals,
/// taken at each `b` over the functions defined there.
///
/// The family must cover `[lo, hi]` and its minimum must be continuous;
/// a gap is an input error, a jump an invariant violation.
pub fn lower_envelope_partial(fs: &[Pwl], lo: &Rational, hi: &Rational) -> Result<Pwl> {
    ensure!(
        lo <= hi,
        "empty range [{}, {}]",
        format_rational(lo),
        format_rational(hi)
    );
    if let Some((leaves, sb, sv)) = envelope::leaves_of(fs) {
        if let Some(r) = envelope::envelope_of_leaves(leaves, lo, hi, &sb, &sv) {
            return r;
        }
    }
    lower_envelope_partial_big(fs, lo, hi)
}

/// [`lower_envelope_partial`] in big-rational arithmetic throughout.
pub(crate) fn lower_envelope_partial_big(fs: &[Pwl], lo: &Rational, hi: &Rational) -> Result<Pwl> {
    let mut clipped: Vec<Pwl> = Vec::new();
    for f in fs {
        if f.lo() <= hi && f.hi() >= lo {
            clipped.push(f.restrict(f.lo().max(lo), f.hi().min(hi))?);
        }
    }
    clipped.sort_by(|x, y| x.lo().cmp(y.lo()).then_with(|| x.hi().cmp(y.hi())));
    let gap = |l: &Rational, r: &Rational| {
        Error::invalid(format!(
            "no function is defined on ({}, {})",
            format_rational(l),
            format_rational(r)
        ))
    };
    if clipped.is_empty() {
        return Err(gap(lo, hi));
    }
    let leaves: Vec<Partial> = clipped.into_iter().map(Partial::of).collect();
    let env = envelope_partial_rec(&leaves);

    if lo == hi {
        let v = env.value(lo).ok_or_else(|| gap(lo, hi))?;
        return Ok(Pwl::point(lo.clone(), v));
    }
    let jump = |b: &Rational| Error::invariant(format!("partial envelope jumps at {}", format_rational(b)));
    let mut reach = lo;
    for p in &env.pieces {
        if p.lo() > reach {
            return Err(gap(reach, p.lo()));
        }
        reach = p.hi();
    }
    if reach < hi {
        return Err(gap(reach, hi));
    }
    // Touching pieces that were not joined disagree at the junction.
    if env.pieces.len() > 1 {
        return Err(jump(env.pieces[1].lo()));
    }
    if let Some((b, _)) = env.points.first() {
        return Err(jump(b));
    }
    Ok(env.pieces.into_iter().next().expect("range is covered"))
}

/// `Σ weights[i] · fs[i]` on the shared domain, built by sweeping slope
/// changes from left to right.
pub fn weighted_sum(fs: &[Pwl], weights: &[Rational]) -> Result<Pwl> {
    ensure!(!fs.is_empty(), "weighted sum of an empty family");
    ensure!(
        fs.len() == weights.len(),
        "{} functions but {} weights",
        fs.len(),
        weights.len()
    );
    let (lo, hi) = (fs[0].lo().clone(), fs[0].hi().clone());
    for f in fs {
        ensure!(
            f.lo() == &lo && f.hi() == &hi,
            "domain mismatch: [{}, {}] vs [{}, {}]",
            format_rational(f.lo()),
            format_rational(f.hi()),
            format_rational(&lo),
            format_rational(&hi)
        );
    }
    for w in weights {
        ensure!(!w.is_negative(), "negative weight {}", format_rational(w));
    }

    let mut value = Rational::zero();
    for (f, w) in fs.iter().zip(weights) {
        value += w * &f.breakpoints()[0].1;
    }
    if lo == hi {
        return Ok(Pwl::point(lo, value));
    }

    let mut slope = Rational::zero();
    let mut events: Vec<(Rational, Rational)> = Vec::new();
    for (f, w) in fs.iter().zip(weights) {
        if w.is_zero() {
            continue;
        }
        let pts = f.breakpoints();
        let mut prev: Option<Rational> = None;
        for seg in pts.windows(2) {
            let s = (&seg[1].1 - &seg[0].1) / (&seg[1].0 - &seg[0].0);
            match &prev {
                None => slope += w * &s,
                Some(p) => events.push((seg[0].0.clone(), w * (&s - p))),
            }
            prev = Some(s);
        }
    }
    events.sort_by(|x, y| x.0.cmp(&y.0));

    let mut out = vec![(lo.clone(), value.clone())];
    let mut x = lo;
    let mut i = 0;
    while i < events.len() {
        let at = events[i].0.clone();
        value += &slope * (&at - &x);
        while i < events.len() && events[i].0 == at {
            slope += &events[i].1;
            i += 1;
        }
        out.push((at.clone(), value.clone()));
        x = at;
    }
    value += &slope * (&hi - &x);
    out.push((hi, value));
    Ok(Pwl::from_sorted(out))
}
