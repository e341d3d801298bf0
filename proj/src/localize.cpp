#include "kalman/localize.hpp"

#include <cmath>
#include <optional>

#include "kalman/error.hpp"

namespace kalman {

double toa_to_range(const ToaObservation& obs) {
  if (!std::isfinite(obs.toa) || obs.toa < 0.0) {
    throw DomainError("toa_to_range: invalid time of arrival " + std::to_string(obs.toa) +
                      " s for anchor '" + obs.anchor_id + "'");
  }
  return kSpeedOfLight * obs.toa;
}

Matrix trilaterate(std::span<const Anchor> anchors, std::span<const double> ranges) {
  if (anchors.size() < 3) {
    throw ArityError("trilaterate: need at least 3 anchors, got " +
                     std::to_string(anchors.size()));
  }
  if (ranges.size() != anchors.size()) {
    throw ShapeError("trilaterate: " + std::to_string(ranges.size()) + " ranges for " +
                     std::to_string(anchors.size()) + " anchors");
  }
  for (const auto& a : anchors) {
    if (a.position.rows() != 2 || a.position.cols() != 1) {
      throw ShapeError("trilaterate: anchor '" + a.id + "' position is " + a.position.shape());
    }
  }

  const std::size_t rows = anchors.size() - 1;
  const double x0 = anchors[0].position(0, 0);
  const double y0 = anchors[0].position(1, 0);
  const double k0 = x0 * x0 + y0 * y0;
  Matrix G(rows, 2);
  Matrix b(rows, 1);
  for (std::size_t i = 1; i < anchors.size(); ++i) {
    const double xi = anchors[i].position(0, 0);
    const double yi = anchors[i].position(1, 0);
    G(i - 1, 0) = 2.0 * (xi - x0);
    G(i - 1, 1) = 2.0 * (yi - y0);
    b(i - 1, 0) = ranges[0] * ranges[0] - ranges[i] * ranges[i] + (xi * xi + yi * yi) - k0;
  }

  const Matrix Gt = mat_transpose(G);
  try {
    return mat_inverse(Gt * G) * (Gt * b);
  } catch (const SingularMatrixError& e) {
    throw SingularMatrixError(
        "trilaterate: anchors are collinear, least-squares system is singular (" +
            std::string(e.what()) + ")",
        e.column());
  }
}

Matrix fix_position(std::span<const Anchor> anchors,
                    std::span<const ToaObservation> observations) {
  std::vector<std::optional<double>> by_anchor(anchors.size());
  for (const auto& obs : observations) {
    std::size_t idx = anchors.size();
    for (std::size_t i = 0; i < anchors.size(); ++i) {
      if (anchors[i].id == obs.anchor_id) {
        idx = i;
        break;
      }
    }
    if (idx == anchors.size()) {
      throw LookupError("fix_position: unknown anchor id '" + obs.anchor_id + "'");
    }
    if (by_anchor[idx].has_value()) {
      throw AmbiguityError("fix_position: anchor '" + obs.anchor_id + "' observed more than once");
    }
    by_anchor[idx] = toa_to_range(obs);
  }

  std::vector<Anchor> used;
  std::vector<double> ranges;
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    if (by_anchor[i]) {
      used.push_back(anchors[i]);
      ranges.push_back(*by_anchor[i]);
    }
  }
  return trilaterate(used, ranges);
}

}  // namespace kalman
