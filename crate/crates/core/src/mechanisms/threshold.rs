use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::spaces::{Point, Space};
use crate::welfare::LocationProfile;

/// Threshold mechanism `T_k^{r,s}` on the segment.
///
/// Returns `r` iff at most `k` agents lie at or below `v = (r + s)/2`, else `s`.
pub fn threshold_mechanism<S: Scalar>(k: usize, r: S, s: S, profile: &LocationProfile<S>) -> Result<Point<S>> {
    let space = Space::<S>::Segment;
    space.canonicalize(&Point::Segment(r))?;
    space.canonicalize(&Point::Segment(s))?;
    if !(r < s) {
        return Err(Error::domain("r", r, "r < s"));
    }
    if k > profile.len() {
        return Err(Error::domain("k", k, "[0, n]"));
    }
    let v = (r + s) * S::half();
    let mut below = 0;
    for p in &profile.points {
        let Point::Segment(x) = space.canonicalize(p)? else {
            unreachable!("canonicalize keeps the kind")
        };
        below += usize::from(x <= v);
    }
    Ok(Point::Segment(if below <= k { r } else { s }))
}
