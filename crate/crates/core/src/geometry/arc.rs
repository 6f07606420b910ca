use num_complex::Complex;

use crate::error::{Error, Result};
use crate::real::{cis, from_usize, lit, Real};

/// One analytic piece of an arc, parametrized by `s ∈ [0, 1]` proportionally
/// to arclength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Piece<T> {
    Segment { a: Complex<T>, b: Complex<T> },
    /// Points `center + radius·e^{i(start + s·sweep)}`; `sweep` is signed.
    CircularArc { center: Complex<T>, radius: T, start: T, sweep: T },
}

impl<T: Real> Piece<T> {
    pub fn point(&self, s: T) -> Complex<T> {
        match *self {
            Piece::Segment { a, b } => a + (b - a) * s,
            Piece::CircularArc { center, radius, start, sweep } => center + cis(start + sweep * s) * radius,
        }
    }

    /// `d point / ds`.
    pub fn derivative(&self, s: T) -> Complex<T> {
        match *self {
            Piece::Segment { a, b } => b - a,
            Piece::CircularArc { radius, start, sweep, .. } => {
                cis(start + sweep * s) * Complex::new(T::zero(), radius * sweep)
            }
        }
    }

    pub fn start(&self) -> Complex<T> {
        self.point(T::zero())
    }

    pub fn end(&self) -> Complex<T> {
        self.point(T::one())
    }

    pub fn length(&self) -> T {
        match *self {
            Piece::Segment { a, b } => (b - a).norm(),
            Piece::CircularArc { radius, sweep, .. } => radius * sweep.abs(),
        }
    }

    pub fn is_segment(&self) -> bool {
        matches!(self, Piece::Segment { .. })
    }

    /// Closest point parameter and distance.
    pub fn nearest(&self, z: Complex<T>) -> (T, T) {
        match *self {
            Piece::Segment { a, b } => {
                let d = b - a;
                let s = (((z - a) * d.conj()).re / d.norm_sqr()).max(T::zero()).min(T::one());
                (s, (z - self.point(s)).norm())
            }
            Piece::CircularArc { center, start, sweep, .. } => {
                let mut best = (T::zero(), (z - self.start()).norm());
                let e = (z - self.end()).norm();
                if e < best.1 {
                    best = (T::one(), e);
                }
                let w = z - center;
                if w.norm() > T::zero() {
                    // angle of z measured along the sweep direction from start
                    let phi = w.arg() - start;
                    let tau = T::TAU();
                    let mut rel = if sweep >= T::zero() { phi } else { -phi };
                    rel = rel - (rel / tau).floor() * tau;
                    let s = rel / sweep.abs();
                    if s <= T::one() {
                        let d = (z - self.point(s)).norm();
                        if d < best.1 {
                            best = (s, d);
                        }
                    }
                }
                best
            }
        }
    }

    /// Chords approximating the piece (exact for segments).
    fn chords(&self) -> Vec<(Complex<T>, Complex<T>)> {
        let k = if self.is_segment() { 1 } else { 64 };
        (0..k)
            .map(|i| {
                let s0 = from_usize::<T>(i) / from_usize::<T>(k);
                let s1 = from_usize::<T>(i + 1) / from_usize::<T>(k);
                (self.point(s0), self.point(s1))
            })
            .collect()
    }
}

/// Oriented piecewise analytic Jordan arc. Piece `i` occupies the parameter
/// interval `[i, i+1]`; integer parameters are the breakpoints.
#[derive(Debug, Clone)]
pub struct Arc<T> {
    pieces: Vec<Piece<T>>,
    cumulative: Vec<T>,
}

impl<T: Real> Arc<T> {
    /// Validates closure, positive piece lengths and absence of
    /// self-intersections; consecutive endpoints closer than `1e-12·diameter`
    /// are identified.
    pub fn new(mut pieces: Vec<Piece<T>>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::DegenerateArc("arc has no pieces".into()));
        }
        let pts: Vec<Complex<T>> = pieces.iter().flat_map(|p| [p.start(), p.end()]).collect();
        let mut diam = T::zero();
        for a in &pts {
            for b in &pts {
                diam = diam.max((a - b).norm());
            }
        }
        for p in &pieces {
            let l = p.length();
            if !(l > T::zero()) || !l.is_finite() {
                return Err(Error::DegenerateArc("piece of zero or non-finite length".into()));
            }
            diam = diam.max(l);
        }
        let close = diam * lit(1e-12);
        for i in 1..pieces.len() {
            let gap = (pieces[i - 1].end() - pieces[i].start()).norm();
            if gap > close {
                return Err(Error::InvalidArc(format!(
                    "pieces {} and {} do not meet (gap {:e})",
                    i - 1,
                    i,
                    gap.to_f64().unwrap_or(f64::NAN)
                )));
            }
            // snap segment starts onto the previous end so joints are exact
            let joint = pieces[i - 1].end();
            if let Piece::Segment { a, .. } = &mut pieces[i] {
                *a = joint;
            }
        }
        let chords: Vec<(usize, Complex<T>, Complex<T>)> = pieces
            .iter()
            .enumerate()
            .flat_map(|(i, p)| p.chords().into_iter().map(move |(a, b)| (i, a, b)))
            .collect();
        for i in 0..chords.len() {
            for j in i + 2..chords.len() {
                let (_, a, b) = chords[i];
                let (_, c, d) = chords[j];
                if segments_intersect(a, b, c, d, close) {
                    return Err(Error::InvalidArc("arc intersects itself".into()));
                }
            }
        }
        let mut cumulative = vec![T::zero()];
        for p in &pieces {
            let last = *cumulative.last().unwrap();
            cumulative.push(last + p.length());
        }
        Ok(Self { pieces, cumulative })
    }

    pub fn segment(a: Complex<T>, b: Complex<T>) -> Result<Self> {
        Self::new(vec![Piece::Segment { a, b }])
    }

    /// Polyline through the given vertices.
    pub fn polyline(vertices: &[Complex<T>]) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::DegenerateArc("polyline needs at least two vertices".into()));
        }
        Self::new(vertices.windows(2).map(|w| Piece::Segment { a: w[0], b: w[1] }).collect())
    }

    pub fn pieces(&self) -> &[Piece<T>] {
        &self.pieces
    }

    pub fn is_polyline(&self) -> bool {
        self.pieces.iter().all(Piece::is_segment)
    }

    /// Vertices of a polyline: the first point followed by every piece end.
    pub fn vertices(&self) -> Vec<Complex<T>> {
        std::iter::once(self.pieces[0].start()).chain(self.pieces.iter().map(Piece::end)).collect()
    }

    /// Parameter range `[0, number of pieces]`.
    pub fn t_max(&self) -> T {
        from_usize(self.pieces.len())
    }

    pub fn start(&self) -> Complex<T> {
        self.pieces[0].start()
    }

    pub fn end(&self) -> Complex<T> {
        self.pieces[self.pieces.len() - 1].end()
    }

    pub fn length(&self) -> T {
        self.cumulative[self.pieces.len()]
    }

    fn locate(&self, t: T) -> Result<(usize, T)> {
        let hi = self.t_max();
        if !(t >= T::zero() && t <= hi) {
            return Err(Error::ParameterOutOfRange {
                t: t.to_f64().unwrap_or(f64::NAN),
                lo: 0.0,
                hi: hi.to_f64().unwrap_or(f64::NAN),
            });
        }
        let i = t.floor().to_usize().unwrap_or(0).min(self.pieces.len() - 1);
        Ok((i, t - from_usize(i)))
    }

    pub fn eval(&self, t: T) -> Result<Complex<T>> {
        let (i, s) = self.locate(t)?;
        Ok(self.pieces[i].point(s))
    }

    /// `dz/dt` (one-sided from the right at breakpoints, from the left at the end).
    pub fn derivative(&self, t: T) -> Result<Complex<T>> {
        let (i, s) = self.locate(t)?;
        Ok(self.pieces[i].derivative(s))
    }

    /// Arclength from the start to parameter `t`.
    pub fn length_to(&self, t: T) -> Result<T> {
        let (i, s) = self.locate(t)?;
        Ok(self.cumulative[i] + self.pieces[i].length() * s)
    }

    /// Parameter at arclength `len` from the start (clamped).
    pub fn param_at_length(&self, len: T) -> T {
        let len = len.max(T::zero()).min(self.length());
        let i = match self.cumulative[1..].iter().position(|&c| len <= c) {
            Some(i) => i,
            None => self.pieces.len() - 1,
        };
        let s = (len - self.cumulative[i]) / self.pieces[i].length();
        from_usize::<T>(i) + s.max(T::zero()).min(T::one())
    }

    /// Length of the subarc between parameters `t1 ≤ t2`.
    pub fn subarc_length(&self, t1: T, t2: T) -> Result<T> {
        if t1 > t2 {
            return Err(Error::InvalidArgument("subarc parameters reversed".into()));
        }
        Ok(self.length_to(t2)? - self.length_to(t1)?)
    }

    /// Closest arc point: `(t, distance)`.
    pub fn nearest(&self, z: Complex<T>) -> (T, T) {
        self.pieces
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let (s, d) = p.nearest(z);
                (from_usize::<T>(i) + s, d)
            })
            .fold((T::zero(), T::infinity()), |b, c| if c.1 < b.1 { c } else { b })
    }

    pub fn distance(&self, z: Complex<T>) -> T {
        self.nearest(z).1
    }

    /// Nested dyadic parameter grid with at least `count` points, containing
    /// every breakpoint.
    pub fn dyadic_params(&self, count: usize) -> Vec<T> {
        let np = self.pieces.len();
        let mut per = 1usize;
        while np * per + 1 < count {
            per *= 2;
        }
        let total = np * per;
        (0..=total).map(|k| from_usize::<T>(k) / from_usize::<T>(per)).collect()
    }

    /// `sup |L(z,ζ)| / |z−ζ|` over pairs of a nested dyadic sample.
    pub fn quasi_smoothness_constant(&self, sample_count: usize) -> Result<T> {
        if sample_count < 2 {
            return Err(Error::InvalidArgument("sample count must be at least 2".into()));
        }
        if !(self.length() > T::zero()) {
            return Err(Error::DegenerateArc("zero length".into()));
        }
        let params = self.dyadic_params(sample_count);
        let pts: Vec<(Complex<T>, T)> = params
            .iter()
            .map(|&t| Ok((self.eval(t)?, self.length_to(t)?)))
            .collect::<Result<_>>()?;
        let mut best = T::one();
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                let chord = (pts[i].0 - pts[j].0).norm();
                let along = pts[j].1 - pts[i].1;
                if chord == T::zero() {
                    return Err(Error::InvalidArc("coincident sample points".into()));
                }
                best = best.max(along / chord);
            }
        }
        Ok(best)
    }
}

fn segments_intersect<T: Real>(a: Complex<T>, b: Complex<T>, c: Complex<T>, d: Complex<T>, tol: T) -> bool {
    let cross = |u: Complex<T>, v: Complex<T>| u.re * v.im - u.im * v.re;
    let d1 = cross(b - a, c - a);
    let d2 = cross(b - a, d - a);
    let d3 = cross(d - c, a - c);
    let d4 = cross(d - c, b - c);
    if ((d1 > T::zero() && d2 < T::zero()) || (d1 < T::zero() && d2 > T::zero()))
        && ((d3 > T::zero() && d4 < T::zero()) || (d3 < T::zero() && d4 > T::zero()))
    {
        return true;
    }
    // touching within tolerance
    let near = |p: Complex<T>, u: Complex<T>, v: Complex<T>| {
        let d = v - u;
        let s = (((p - u) * d.conj()).re / d.norm_sqr()).max(T::zero()).min(T::one());
        (p - (u + d * s)).norm() <= tol
    };
    near(a, c, d) || near(b, c, d) || near(c, a, b) || near(d, a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, SQRT_2};

    fn corner() -> Arc<f64> {
        Arc::polyline(&[C::new(1.0, 0.0), C::new(0.0, 0.0), C::new(0.0, 1.0)]).unwrap()
    }

    fn quarter() -> Arc<f64> {
        Arc::new(vec![Piece::CircularArc { center: C::new(0.0, 0.0), radius: 1.0, start: 0.0, sweep: FRAC_PI_2 }])
            .unwrap()
    }

    #[test]
    fn evaluation_and_breakpoints() {
        let seg = Arc::segment(C::new(-1.0, 0.0), C::new(1.0, 0.0)).unwrap();
        assert_eq!(seg.eval(0.5).unwrap(), C::new(0.0, 0.0));
        assert_eq!(seg.eval(0.0).unwrap(), C::new(-1.0, 0.0));
        let c = corner();
        assert_eq!(c.eval(1.0).unwrap(), C::new(0.0, 0.0));
        assert_eq!(c.pieces()[0].end(), c.pieces()[1].start());
        assert!(matches!(c.eval(2.5), Err(Error::ParameterOutOfRange { .. })));
    }

    #[test]
    fn lengths() {
        let seg = Arc::segment(C::new(-1.0, 0.0), C::new(1.0, 0.0)).unwrap();
        assert_eq!(seg.subarc_length(0.0, 1.0).unwrap(), 2.0);
        assert!((quarter().subarc_length(0.0, 0.5).unwrap() - FRAC_PI_4).abs() < 1e-15);
        assert_eq!(corner().subarc_length(0.7, 0.7).unwrap(), 0.0);
        assert!(corner().subarc_length(1.0, 0.5).is_err());
    }

    #[test]
    fn quasi_smoothness_oracles() {
        let seg = Arc::segment(C::new(-1.0, 0.0), C::new(1.0, 0.0)).unwrap();
        assert!((seg.quasi_smoothness_constant(64).unwrap() - 1.0).abs() < 1e-12);
        // exhaustive search over (a, b) arm distances: (a+b)/hypot(a,b) is maximal at a = b
        let mut brute: f64 = 0.0;
        for i in 1..=200 {
            for j in 1..=200 {
                let (a, b) = (i as f64 / 200.0, j as f64 / 200.0);
                brute = brute.max((a + b) / a.hypot(b));
            }
        }
        let q = corner().quasi_smoothness_constant(257).unwrap();
        assert!((q - brute).abs() < 1e-12 && (q - SQRT_2).abs() < 1e-12);
        let expected = FRAC_PI_4 / FRAC_PI_4.sin();
        assert!((quarter().quasi_smoothness_constant(129).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn self_intersection_rejected() {
        let bow = Arc::polyline(&[C::new(0.0, 0.0), C::new(1.0, 1.0), C::new(1.0, 0.0), C::new(0.0, 1.0)]);
        assert!(matches!(bow, Err(Error::InvalidArc(_))));
        let gap = Arc::new(vec![
            Piece::Segment { a: C::new(0.0, 0.0), b: C::new(1.0, 0.0) },
            Piece::Segment { a: C::new(1.0, 0.1), b: C::new(2.0, 0.0) },
        ]);
        assert!(matches!(gap, Err(Error::InvalidArc(_))));
    }

    #[test]
    fn nearest_point() {
        let (t, d) = corner().nearest(C::new(0.5, 0.3));
        assert!((t - 0.5).abs() < 1e-15 && (d - 0.3).abs() < 1e-15);
        let (t, d) = quarter().nearest(C::new(2.0, 2.0));
        assert!((t - 0.5).abs() < 1e-14 && (d - (8f64.sqrt() - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn length_parameter_inverse() {
        let c = corner();
        for &t in &[0.0, 0.3, 1.0, 1.75, 2.0] {
            let l = c.length_to(t).unwrap();
            assert!((c.param_at_length(l) - t).abs() < 1e-14);
        }
    }
}
