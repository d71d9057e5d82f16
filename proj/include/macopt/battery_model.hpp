#pragma once

#include <limits>
#include <optional>
#include <vector>

namespace macopt {

/// Loss coefficient that reproduces the published sum-rate and region data.
inline constexpr double kDefaultLossCoefficient = 4.0 / 9.0;

/// Sentinel for "no cap", used for the peak discharge of a lossless battery.
inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();

enum class DischargeKind { Ideal, Quadratic, Tabulated };

struct DischargeSample {
  double drawn;      // d, watts
  double delivered;  // g(d), watts
};

/// Power delivered to the load, g(d), when the battery is drained at d watts.
///
/// Three shapes are supported:
///  - Ideal: g(d) = d.
///  - Quadratic: g(d) = d - coefficient * resistance * d^2, clamped at 0 past
///    the second root.
///  - Tabulated: piecewise-linear interpolation of concave samples.
///
/// Instances are immutable and validated on construction.
class DischargeModel {
 public:
  static DischargeModel ideal();
  static DischargeModel quadratic(double resistance,
                                  double coefficient = kDefaultLossCoefficient);
  static DischargeModel tabulated(std::vector<DischargeSample> samples);

  DischargeKind kind() const noexcept { return kind_; }
  double resistance() const noexcept { return resistance_; }
  double coefficient() const noexcept { return coefficient_; }
  const std::vector<DischargeSample>& samples() const noexcept { return samples_; }

  /// kappa * r for the quadratic shape, 0 otherwise.
  double loss_factor() const noexcept;

 private:
  DischargeModel() = default;

  DischargeKind kind_ = DischargeKind::Ideal;
  double resistance_ = 0.0;
  double coefficient_ = kDefaultLossCoefficient;
  std::vector<DischargeSample> samples_;
  double peak_ = kUnbounded;

  friend double peak_discharge(const DischargeModel& model);
};

struct DischargeValue {
  double power;
  bool extrapolated;  // d lies past the modelled range and the value was clamped
};

DischargeValue evaluate_discharge(const DischargeModel& model, double d);

/// g(d). Throws NegativeDischarge for d < 0.
double eval_discharge(const DischargeModel& model, double d);

/// g'(d). Throws NegativeDischarge for d < 0.
double eval_derivative(const DischargeModel& model, double d);

/// g''(d); zero for the ideal and tabulated shapes.
double eval_second_derivative(const DischargeModel& model, double d);

/// D0 = argmax g. Returns kUnbounded when g is strictly increasing.
double peak_discharge(const DischargeModel& model);

/// g(D0), the largest power the battery can deliver.
double max_delivered_power(const DischargeModel& model);

/// Smallest d >= 0 with g(d) >= level, if it exists below D0.
std::optional<double> lowest_discharge_for(const DischargeModel& model, double level);

/// One transmitter: battery budget B (J), circuit cost gamma (W) and battery.
struct UserParams {
  double battery_energy = 0.0;
  double circuit_cost = 0.0;
  DischargeModel model = DischargeModel::ideal();

  void validate() const;
};

/// True when the battery can deliver strictly more than the circuit cost.
bool can_power_circuit(const UserParams& user);

/// Drain level at which the delivered power equals the circuit cost. Only
/// meaningful when can_power_circuit(user) holds.
double circuit_threshold(const UserParams& user);

}  // namespace macopt
