#include "macopt/battery_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "macopt/convex_core.hpp"
#include "macopt/errors.hpp"

namespace macopt {
namespace {

void require_nonnegative(double d) {
  if (!(d >= 0.0)) {
    throw Error(ErrorCode::NegativeDischarge, "discharge power must be >= 0, got " + std::to_string(d));
  }
}

double interpolate(const std::vector<DischargeSample>& s, double d, bool* extrapolated) {
  if (extrapolated) *extrapolated = false;
  if (d <= s.back().drawn) {
    auto it = std::upper_bound(s.begin(), s.end(), d,
                               [](double v, const DischargeSample& p) { return v < p.drawn; });
    if (it == s.begin()) return s.front().delivered;
    if (it == s.end()) return s.back().delivered;
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    const double w = (d - lo.drawn) / (hi.drawn - lo.drawn);
    return lo.delivered + w * (hi.delivered - lo.delivered);
  }
  // Past the table: continue the last segment, floored at zero.
  if (extrapolated) *extrapolated = true;
  const auto& a = s[s.size() - 2];
  const auto& b = s.back();
  const double slope = (b.delivered - a.delivered) / (b.drawn - a.drawn);
  return std::max(0.0, b.delivered + slope * (d - b.drawn));
}

}  // namespace

DischargeModel DischargeModel::ideal() {
  DischargeModel m;
  m.kind_ = DischargeKind::Ideal;
  m.peak_ = kUnbounded;
  return m;
}

DischargeModel DischargeModel::quadratic(double resistance, double coefficient) {
  if (!(resistance >= 0.0) || !std::isfinite(resistance)) {
    throw Error(ErrorCode::InvalidModel, "resistance must be finite and >= 0");
  }
  if (!(coefficient >= 0.0) || !std::isfinite(coefficient)) {
    throw Error(ErrorCode::InvalidModel, "loss coefficient must be finite and >= 0");
  }
  DischargeModel m;
  m.kind_ = DischargeKind::Quadratic;
  m.resistance_ = resistance;
  m.coefficient_ = coefficient;
  const double a = resistance * coefficient;
  m.peak_ = a > 0.0 ? 1.0 / (2.0 * a) : kUnbounded;
  return m;
}

DischargeModel DischargeModel::tabulated(std::vector<DischargeSample> samples) {
  if (samples.empty()) throw Error(ErrorCode::InvalidModel, "tabulated model needs samples");
  for (const auto& s : samples) {
    if (!std::isfinite(s.drawn) || !std::isfinite(s.delivered) || s.drawn < 0.0) {
      throw Error(ErrorCode::InvalidModel, "samples must be finite with drawn >= 0");
    }
  }
  for (std::size_t k = 1; k < samples.size(); ++k) {
    if (!(samples[k].drawn > samples[k - 1].drawn)) {
      throw Error(ErrorCode::InvalidModel, "sample drain levels must be strictly increasing");
    }
  }
  if (samples.front().drawn > 0.0) {
    samples.insert(samples.begin(), DischargeSample{0.0, 0.0});
  } else if (std::abs(samples.front().delivered) > 1e-12) {
    throw Error(ErrorCode::InvalidModel, "g(0) must be 0");
  }
  if (samples.size() < 2) throw Error(ErrorCode::InvalidModel, "tabulated model needs a nonzero sample");

  double prev_slope = kUnbounded;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const auto& s = samples[k];
    if (s.delivered > s.drawn + 1e-12 * std::max(1.0, s.drawn)) {
      throw Error(ErrorCode::InvalidModel, "g(d) must not exceed d");
    }
    if (k == 0) continue;
    const double slope = (s.delivered - samples[k - 1].delivered) / (s.drawn - samples[k - 1].drawn);
    if (slope > prev_slope + 1e-12 * std::max(1.0, std::abs(prev_slope))) {
      throw Error(ErrorCode::InvalidModel, "samples are not concave at d = " + std::to_string(s.drawn));
    }
    prev_slope = slope;
  }

  DischargeModel m;
  m.kind_ = DischargeKind::Tabulated;
  m.samples_ = std::move(samples);

  // Grid argmax, then golden section on the interpolant around it.
  const auto& s = m.samples_;
  std::size_t best = 0;
  for (std::size_t k = 1; k < s.size(); ++k) {
    if (s[k].delivered > s[best].delivered) best = k;
  }
  const double lo = s[best == 0 ? 0 : best - 1].drawn;
  const double hi = s[std::min(best + 1, s.size() - 1)].drawn;
  const auto refined = maximize_concave_1d(
      [&s](double d) { return interpolate(s, d, nullptr); }, lo, hi, 1e-12 * std::max(1.0, hi));
  m.peak_ = refined.value >= s[best].delivered ? refined.argmax : s[best].drawn;
  return m;
}

double DischargeModel::loss_factor() const noexcept {
  return kind_ == DischargeKind::Quadratic ? resistance_ * coefficient_ : 0.0;
}

DischargeValue evaluate_discharge(const DischargeModel& model, double d) {
  require_nonnegative(d);
  switch (model.kind()) {
    case DischargeKind::Ideal:
      return {d, false};
    case DischargeKind::Quadratic: {
      const double a = model.loss_factor();
      const double g = d - a * d * d;
      if (g < 0.0) return {0.0, true};
      return {g, false};
    }
    case DischargeKind::Tabulated: {
      bool extrapolated = false;
      const double g = interpolate(model.samples(), d, &extrapolated);
      return {g, extrapolated};
    }
  }
  return {0.0, false};
}

double eval_discharge(const DischargeModel& model, double d) {
  return evaluate_discharge(model, d).power;
}

double eval_derivative(const DischargeModel& model, double d) {
  require_nonnegative(d);
  switch (model.kind()) {
    case DischargeKind::Ideal:
      return 1.0;
    case DischargeKind::Quadratic: {
      const double a = model.loss_factor();
      if (a > 0.0 && d > 1.0 / a) return 0.0;
      return 1.0 - 2.0 * a * d;
    }
    case DischargeKind::Tabulated: {
      const double h = 1e-7 * std::max(1.0, d);
      const auto& s = model.samples();
      if (d < h) return (interpolate(s, d + h, nullptr) - interpolate(s, d, nullptr)) / h;
      return (interpolate(s, d + h, nullptr) - interpolate(s, d - h, nullptr)) / (2.0 * h);
    }
  }
  return 0.0;
}

double eval_second_derivative(const DischargeModel& model, double d) {
  require_nonnegative(d);
  if (model.kind() != DischargeKind::Quadratic) return 0.0;
  const double a = model.loss_factor();
  if (a > 0.0 && d > 1.0 / a) return 0.0;
  return -2.0 * a;
}

double peak_discharge(const DischargeModel& model) { return model.peak_; }

double max_delivered_power(const DischargeModel& model) {
  const double d0 = peak_discharge(model);
  if (!std::isfinite(d0)) return kUnbounded;
  return eval_discharge(model, d0);
}

std::optional<double> lowest_discharge_for(const DischargeModel& model, double level) {
  if (level <= 0.0) return 0.0;
  switch (model.kind()) {
    case DischargeKind::Ideal:
      return level;
    case DischargeKind::Quadratic: {
      const double a = model.loss_factor();
      if (a == 0.0) return level;
      const double disc = 1.0 - 4.0 * a * level;
      if (disc < 0.0) return std::nullopt;
      // Smaller root of a d^2 - d + level = 0 in the cancellation-free form.
      return 2.0 * level / (1.0 + std::sqrt(disc));
    }
    case DischargeKind::Tabulated: {
      const auto& s = model.samples();
      const double d0 = peak_discharge(model);
      for (std::size_t k = 1; k < s.size() && s[k - 1].drawn < d0; ++k) {
        if (s[k].delivered >= level) {
          const double w = (level - s[k - 1].delivered) / (s[k].delivered - s[k - 1].delivered);
          return std::min(d0, s[k - 1].drawn + w * (s[k].drawn - s[k - 1].drawn));
        }
      }
      if (max_delivered_power(model) >= level) return d0;
      return std::nullopt;
    }
  }
  return std::nullopt;
}

void UserParams::validate() const {
  if (!(battery_energy > 0.0) || !std::isfinite(battery_energy)) {
    throw Error(ErrorCode::InvalidParameters, "battery_energy must be finite and > 0");
  }
  if (!(circuit_cost >= 0.0) || !std::isfinite(circuit_cost)) {
    throw Error(ErrorCode::InvalidParameters, "circuit_cost must be finite and >= 0");
  }
}

bool can_power_circuit(const UserParams& user) {
  return max_delivered_power(user.model) > user.circuit_cost;
}

double circuit_threshold(const UserParams& user) {
  const auto root = lowest_discharge_for(user.model, user.circuit_cost);
  if (!root) {
    throw Error(ErrorCode::PreconditionViolated, "battery cannot deliver the circuit cost");
  }
  return *root;
}

}  // namespace macopt
