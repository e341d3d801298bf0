#pragma once

#include <span>
#include <string>
#include <vector>

#include "kalman/matrix.hpp"

namespace kalman {

/// Speed of light in vacuum, m/s.
inline constexpr double kSpeedOfLight = 299792458.0;

/// A fixed transmitter with a known planar position in meters.
struct Anchor {
  std::string id;
  Matrix position;  // 2 x 1
};

/// Time of arrival (seconds) of a ranging signal from one anchor.
struct ToaObservation {
  std::string anchor_id;
  double toa = 0.0;
};

/// c * toa. DomainError on negative or non-finite toa.
double toa_to_range(const ToaObservation& obs);

/// Planar position from ranges to >= 3 anchors by linear least squares.
///
/// Subtracting the first circle equation from the others gives, for i >= 1,
///   2 (a_i - a_0)^T x = r_0^2 - r_i^2 + |a_i|^2 - |a_0|^2
/// which is solved through the normal equations. Throws ArityError for fewer
/// than three anchors and SingularMatrixError when the anchors are collinear.
Matrix trilaterate(std::span<const Anchor> anchors, std::span<const double> ranges);

/// Matches observations to anchors by id and trilaterates. Anchors are used
/// in their listed order, so the result does not depend on the order of
/// `observations`. Throws LookupError for an unknown id and AmbiguityError
/// when an anchor is observed twice.
Matrix fix_position(std::span<const Anchor> anchors,
                    std::span<const ToaObservation> observations);

}  // namespace kalman
