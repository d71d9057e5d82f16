#pragma once

#include <map>
#include <string>
#include <vector>

#include "macopt/mac_two_user.hpp"

namespace macopt {

struct RatePoint {
  double r1 = 0.0;
  double r2 = 0.0;
};

/// Ordered boundary from (0, C2) to (C1, 0). Labels name special vertices.
struct RegionBoundary {
  std::vector<RatePoint> points;
  std::map<std::string, std::size_t> labels;

  /// Largest r2 on the boundary at abscissa r1; -inf outside [0, max r1].
  double height_at(double r1) const;
  RegionBoundary scaled(double factor) const;
};

enum class Strategy { Noma, Tdma, Hybrid };

const char* to_string(Strategy s) noexcept;

/// Which user is decoded first in the shared phase while tracing a curved arc.
/// SecondUserFirst gives the arc between C and D (targets are user 1 rates);
/// FirstUserFirst gives the arc between A and B (targets are user 2 rates).
enum class DecodeOrder { SecondUserFirst, FirstUserFirst };

/// Rates on the maximum-sum segment: a fraction alpha of the shared phase
/// decodes user 1 first, the rest decodes user 2 first. alpha = 1 is B and
/// alpha = 0 is C.
RatePoint sum_segment_point(const TwoUserInstance& instance, const FrameAllocation& optimum,
                            double alpha);

/// Corner where one user keeps its single-user optimum and the other
/// maximizes its rate around it. maximizing_user 0 gives A, 1 gives D.
/// Throws PeerInfeasible if the other user cannot power its circuit.
RatePoint corner_peer_max(const TwoUserInstance& instance, int maximizing_user,
                          double tol = 1e-6);

struct TargetRange {
  double lo = 0.0;
  double hi = 0.0;
};

/// Admissible targets of boundary_arc for the given decode order.
TargetRange arc_target_range(const TwoUserInstance& instance, DecodeOrder order);

/// Points of a curved arc: for each target rate of the favoured user, the
/// largest sum-rate with that user at or above the target. Throws
/// TargetOutOfRange for targets outside arc_target_range.
std::vector<RatePoint> boundary_arc(const TwoUserInstance& instance, DecodeOrder order,
                                    const std::vector<double>& targets, double tol = 1e-6);

/// Upper concave envelope of points that span (0, y) to (x, 0). Collinear
/// points are kept. Labels follow their points, or move to the nearest
/// surviving vertex.
RegionBoundary upper_concave_envelope(const RegionBoundary& raw);

RegionBoundary trace_region(const TwoUserInstance& instance, Strategy strategy,
                            int n_arc_points = 25);

/// Largest amount by which inner rises above outer over samples abscissas
/// evenly spread over inner's r1 range. Non-positive means contained.
double containment_excess(const RegionBoundary& inner, const RegionBoundary& outer,
                          int samples = 50);

}  // namespace macopt
