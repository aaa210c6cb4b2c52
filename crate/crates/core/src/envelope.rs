//! Lower envelopes of piecewise-linear functions whose vertices become
//! integers after scaling both axes, computed in checked `i128`
//! arithmetic. Every step reports overflow, and callers then fall back to
//! big rationals, so results are exact either way.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};
use crate::pwl::Pwl;
use crate::rational::{format_rational, Rational};

#[derive(Debug)]
pub(crate) struct Overflow;

type Fx<T> = std::result::Result<T, Overflow>;

fn mul(a: i128, b: i128) -> Fx<i128> {
    a.checked_mul(b).ok_or(Overflow)
}

fn add(a: i128, b: i128) -> Fx<i128> {
    a.checked_add(b).ok_or(Overflow)
}

fn sub(a: i128, b: i128) -> Fx<i128> {
    a.checked_sub(b).ok_or(Overflow)
}

/// Reduced fraction with positive denominator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Q {
    num: i128,
    den: i128,
}

impl Q {
    pub(crate) fn int(v: i128) -> Q {
        Q { num: v, den: 1 }
    }

    fn new(num: i128, den: i128) -> Fx<Q> {
        debug_assert!(den != 0);
        let (num, den) = if den < 0 {
            (num.checked_neg().ok_or(Overflow)?, den.checked_neg().ok_or(Overflow)?)
        } else {
            (num, den)
        };
        let g = num.gcd(&den);
        Ok(Q {
            num: num / g,
            den: den / g,
        })
    }

    /// `r * scale` as a fixed-width fraction.
    pub(crate) fn scaled(r: &Rational, scale: &BigInt) -> Fx<Q> {
        let num = (r.numer() * scale).to_i128().ok_or(Overflow)?;
        let den = r.denom().to_i128().ok_or(Overflow)?;
        Q::new(num, den)
    }

    fn cmp(&self, other: &Q) -> Fx<Ordering> {
        Ok(mul(self.num, other.den)?.cmp(&mul(other.num, self.den)?))
    }

    fn le(&self, other: &Q) -> Fx<bool> {
        Ok(self.cmp(other)? != Ordering::Greater)
    }

    pub(crate) fn lt(&self, other: &Q) -> Fx<bool> {
        Ok(self.cmp(other)? == Ordering::Less)
    }

    fn unscale(&self, scale: &BigInt) -> Rational {
        Rational::new(BigInt::from(self.num), BigInt::from(self.den) * scale)
    }
}

/// The line `y = (c + dv x) / db` with `db > 0`, stored with the three
/// coefficients coprime so equal lines compare equal.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Line {
    c: i128,
    dv: i128,
    db: i128,
}

impl Line {
    fn normalized(c: i128, dv: i128, db: i128) -> Line {
        let g = c.gcd(&dv).gcd(&db);
        Line {
            c: c / g,
            dv: dv / g,
            db: db / g,
        }
    }

    fn through(p: (i128, i128), q: (i128, i128)) -> Fx<Line> {
        let db = sub(q.0, p.0)?;
        let dv = sub(q.1, p.1)?;
        let c = sub(mul(db, p.1)?, mul(dv, p.0)?)?;
        Ok(Line::normalized(c, dv, db))
    }

    fn constant(v: i128) -> Line {
        Line { c: v, dv: 0, db: 1 }
    }

    fn numerator_at(&self, x: &Q) -> Fx<i128> {
        add(mul(self.c, x.den)?, mul(self.dv, x.num)?)
    }

    fn at(&self, x: &Q) -> Fx<Q> {
        Q::new(self.numerator_at(x)?, mul(self.db, x.den)?)
    }

    /// Sign of `self(x) - other(x)`.
    fn compare_at(&self, other: &Line, x: &Q) -> Fx<Ordering> {
        if self == other {
            return Ok(Ordering::Equal);
        }
        let l = mul(self.numerator_at(x)?, other.db)?;
        let r = mul(other.numerator_at(x)?, self.db)?;
        Ok(l.cmp(&r))
    }

    fn crossing(&self, other: &Line) -> Fx<Q> {
        let num = sub(mul(other.c, self.db)?, mul(self.c, other.db)?)?;
        let den = sub(mul(self.dv, other.db)?, mul(other.dv, self.db)?)?;
        Q::new(num, den)
    }
}

#[derive(Clone, Copy, Debug)]
struct Run {
    x0: Q,
    x1: Q,
    line: Line,
}

/// Continuous runs sorted by `x`, disjoint except for shared endpoints,
/// plus isolated point values strictly below every run defined there.
#[derive(Clone, Debug, Default)]
struct Partial {
    runs: Vec<Run>,
    points: Vec<Run>,
}

/// A function given by integer vertices, taken only on `[lo, hi]`.
pub(crate) struct Leaf {
    pub vertices: Vec<(i128, i128)>,
    pub lo: Q,
    pub hi: Q,
}

impl Leaf {
    fn into_partial(self) -> Fx<Partial> {
        let mut out = Partial::default();
        let vs = &self.vertices;
        if self.lo == self.hi {
            let line = if vs.len() == 1 {
                Line::constant(vs[0].1)
            } else {
                let t = vs.windows(2).position(|w| Q::int(w[1].0).le(&self.lo).map_or(true, |before| !before));
                let t = t.unwrap_or(vs.len() - 2);
                Line::through(vs[t], vs[t + 1])?
            };
            out.points.push(Run {
                x0: self.lo,
                x1: self.lo,
                line,
            });
            return Ok(out);
        }
        for w in vs.windows(2) {
            let (b0, b1) = (Q::int(w[0].0), Q::int(w[1].0));
            if b1.le(&self.lo)? {
                continue;
            }
            if self.hi.le(&b0)? {
                break;
            }
            let x0 = if b0.lt(&self.lo)? { self.lo } else { b0 };
            let x1 = if self.hi.lt(&b1)? { self.hi } else { b1 };
            push_run(&mut out.runs, Run { x0, x1, line: Line::through(w[0], w[1])? });
        }
        Ok(out)
    }
}

fn push_run(runs: &mut Vec<Run>, run: Run) {
    if let Some(last) = runs.last_mut() {
        if last.line == run.line && last.x1 == run.x0 {
            last.x1 = run.x1;
            return;
        }
    }
    runs.push(run);
}

fn merge_cuts(f: &Partial, g: &Partial) -> Fx<Vec<Q>> {
    let xs = |p: &Partial| -> Vec<Q> { p.runs.iter().flat_map(|r| [r.x0, r.x1]).collect() };
    let (a, b) = (xs(f), xs(g));
    let mut out: Vec<Q> = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = match (a.get(i), b.get(j)) {
            (Some(x), Some(y)) => x.le(y)?,
            (Some(_), None) => true,
            _ => false,
        };
        let next = if take_a {
            i += 1;
            a[i - 1]
        } else {
            j += 1;
            b[j - 1]
        };
        if out.last() != Some(&next) {
            out.push(next);
        }
    }
    Ok(out)
}

fn covering(runs: &[Run], idx: &mut usize, l: &Q) -> Fx<Option<Line>> {
    while *idx < runs.len() && runs[*idx].x1.le(l)? {
        *idx += 1;
    }
    match runs.get(*idx) {
        Some(r) if r.x0.le(l)? => Ok(Some(r.line)),
        _ => Ok(None),
    }
}

/// Whether `line` lies strictly below every run defined at `x`.
fn below_runs(runs: &[Run], x: &Q, line: &Line) -> Fx<bool> {
    let (mut lo, mut hi) = (0, runs.len());
    while lo < hi {
        let mid = (lo + hi) / 2;
        if runs[mid].x1.lt(x)? {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    for r in &runs[lo..] {
        if x.lt(&r.x0)? {
            break;
        }
        if r.x1.lt(x)? {
            continue;
        }
        if line.compare_at(&r.line, x)? != Ordering::Less {
            return Ok(false);
        }
    }
    Ok(true)
}

fn min_partial(f: &Partial, g: &Partial) -> Fx<Partial> {
    let cuts = merge_cuts(f, g)?;
    let mut runs: Vec<Run> = Vec::new();
    let (mut i, mut j) = (0, 0);
    for w in cuts.windows(2) {
        let (l, r) = (w[0], w[1]);
        match (covering(&f.runs, &mut i, &l)?, covering(&g.runs, &mut j, &l)?) {
            (Some(p), Some(q)) => {
                let s0 = p.compare_at(&q, &l)?;
                let s1 = p.compare_at(&q, &r)?;
                if s0 != Ordering::Greater && s1 != Ordering::Greater {
                    push_run(&mut runs, Run { x0: l, x1: r, line: p });
                } else if s0 != Ordering::Less && s1 != Ordering::Less {
                    push_run(&mut runs, Run { x0: l, x1: r, line: q });
                } else {
                    let x = p.crossing(&q)?;
                    let (first, second) = if s0 == Ordering::Less { (p, q) } else { (q, p) };
                    push_run(&mut runs, Run { x0: l, x1: x, line: first });
                    push_run(&mut runs, Run { x0: x, x1: r, line: second });
                }
            }
            (Some(p), None) | (None, Some(p)) => push_run(&mut runs, Run { x0: l, x1: r, line: p }),
            (None, None) => {}
        }
    }
    let mut candidates: Vec<Run> = Vec::with_capacity(f.points.len() + g.points.len());
    let (mut i, mut j) = (0, 0);
    while i < f.points.len() || j < g.points.len() {
        let next = match (f.points.get(i), g.points.get(j)) {
            (Some(p), Some(q)) => match p.x0.cmp(&q.x0)? {
                Ordering::Less => {
                    i += 1;
                    *p
                }
                Ordering::Greater => {
                    j += 1;
                    *q
                }
                Ordering::Equal => {
                    i += 1;
                    j += 1;
                    if p.line.compare_at(&q.line, &p.x0)? == Ordering::Greater {
                        *q
                    } else {
                        *p
                    }
                }
            },
            (Some(p), None) => {
                i += 1;
                *p
            }
            (None, Some(q)) => {
                j += 1;
                *q
            }
            (None, None) => unreachable!(),
        };
        candidates.push(next);
    }
    let mut points = Vec::new();
    for p in candidates {
        if below_runs(&runs, &p.x0, &p.line)? {
            points.push(p);
        }
    }
    Ok(Partial { runs, points })
}

fn envelope_rec(fs: &[Partial]) -> Fx<Partial> {
    match fs.len() {
        0 => Ok(Partial::default()),
        1 => Ok(fs[0].clone()),
        n => {
            let (left, right) = fs.split_at(n / 2);
            min_partial(&envelope_rec(left)?, &envelope_rec(right)?)
        }
    }
}

/// Envelope of the leaves on `[lo, hi]`, with the same gap and jump
/// contract as [`crate::pwl::lower_envelope_partial`]. Coordinates are
/// divided by the scales on output. `None` means the fixed-width
/// arithmetic overflowed.
pub(crate) fn envelope_of_leaves(
    leaves: Vec<Leaf>,
    lo: &Rational,
    hi: &Rational,
    scale_b: &BigInt,
    scale_v: &BigInt,
) -> Option<Result<Pwl>> {
    let run = || -> Fx<Result<Pwl>> {
        let (qlo, qhi) = (Q::scaled(lo, scale_b)?, Q::scaled(hi, scale_b)?);
        let mut parts = Vec::with_capacity(leaves.len());
        for mut leaf in leaves {
            if qhi.lt(&leaf.lo)? || leaf.hi.lt(&qlo)? {
                continue;
            }
            if leaf.lo.lt(&qlo)? {
                leaf.lo = qlo;
            }
            if qhi.lt(&leaf.hi)? {
                leaf.hi = qhi;
            }
            parts.push(leaf.into_partial()?);
        }
        let env = envelope_rec(&parts)?;
        finish(env, qlo, qhi, scale_b, scale_v)
    };
    run().ok()
}

fn finish(env: Partial, lo: Q, hi: Q, scale_b: &BigInt, scale_v: &BigInt) -> Fx<Result<Pwl>> {
    let b = |x: &Q| x.unscale(scale_b);
    let gap = |l: &Q, r: &Q| {
        Error::invalid(format!(
            "no function is defined on ({}, {})",
            format_rational(&b(l)),
            format_rational(&b(r))
        ))
    };
    let jump = |x: &Q| Error::invariant(format!("partial envelope jumps at {}", format_rational(&b(x))));

    if lo == hi {
        let mut best: Option<Q> = None;
        for r in env.runs.iter().chain(&env.points) {
            if r.x0.le(&lo)? && lo.le(&r.x1)? {
                let v = r.line.at(&lo)?;
                if best.map_or(Ok(true), |w| v.lt(&w))? {
                    best = Some(v);
                }
            }
        }
        return Ok(match best {
            Some(v) => Ok(Pwl::point(b(&lo), v.unscale(scale_v))),
            None => Err(gap(&lo, &hi)),
        });
    }
    let mut reach = lo;
    for r in &env.runs {
        if reach.lt(&r.x0)? {
            return Ok(Err(gap(&reach, &r.x0)));
        }
        reach = r.x1;
    }
    if reach.lt(&hi)? {
        return Ok(Err(gap(&reach, &hi)));
    }
    for w in env.runs.windows(2) {
        if w[0].line.compare_at(&w[1].line, &w[1].x0)? != Ordering::Equal {
            return Ok(Err(jump(&w[1].x0)));
        }
    }
    if let Some(p) = env.points.first() {
        return Ok(Err(jump(&p.x0)));
    }
    let mut pts = Vec::with_capacity(env.runs.len() + 1);
    for r in &env.runs {
        pts.push((b(&r.x0), r.line.at(&r.x0)?.unscale(scale_v)));
    }
    let last = env.runs.last().expect("range is covered");
    pts.push((b(&last.x1), last.line.at(&last.x1)?.unscale(scale_v)));
    Ok(Ok(Pwl::from_sorted(pts)))
}

/// Least common multiple of the denominators, if it stays small enough to
/// leave headroom in `i128` products.
pub(crate) fn common_scale<'a>(values: impl IntoIterator<Item = &'a Rational>) -> Option<BigInt> {
    let limit = BigInt::one() << 40;
    let mut l = BigInt::one();
    for v in values {
        if !v.denom().is_one() {
            l = l.lcm(v.denom());
            if l > limit {
                return None;
            }
        }
    }
    Some(l)
}

/// `r * scale` when it is an integer that fits.
pub(crate) fn scaled_int(r: &Rational, scale: &BigInt) -> Option<i128> {
    let s = r * Rational::from_integer(scale.clone());
    if s.is_integer() {
        s.to_integer().to_i128()
    } else {
        None
    }
}

/// Converts whole functions into leaves, if every vertex scales to an
/// integer of moderate size.
pub(crate) fn leaves_of(fs: &[Pwl]) -> Option<(Vec<Leaf>, BigInt, BigInt)> {
    let sb = common_scale(fs.iter().flat_map(|f| f.breakpoints().iter().map(|p| &p.0)))?;
    let sv = common_scale(fs.iter().flat_map(|f| f.breakpoints().iter().map(|p| &p.1)))?;
    let bound = 1i128 << 60;
    let mut leaves = Vec::with_capacity(fs.len());
    for f in fs {
        let mut vertices = Vec::with_capacity(f.breakpoints().len());
        for (b, v) in f.breakpoints() {
            let (x, y) = (scaled_int(b, &sb)?, scaled_int(v, &sv)?);
            if x.abs() > bound || y.abs() > bound {
                return None;
            }
            vertices.push((x, y));
        }
        let lo = Q::int(vertices[0].0);
        let hi = Q::int(vertices[vertices.len() - 1].0);
        leaves.push(Leaf { vertices, lo, hi });
    }
    Some((leaves, sb, sv))
}
