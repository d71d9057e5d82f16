#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "macopt/errors.hpp"
#include "macopt/mac_multi_user.hpp"
#include "macopt/rate_region.hpp"
#include "macopt/scenario.hpp"
#include "macopt/single_user.hpp"
#include "macopt/verification.hpp"

namespace py = pybind11;
using namespace macopt;

namespace {

MultiUserInstance instance(const std::vector<UserParams>& users, double horizon) {
  MultiUserInstance inst;
  inst.users = users;
  inst.horizon = horizon;
  return inst;
}

Strategy strategy_from(const std::string& name) {
  if (name == "noma") return Strategy::Noma;
  if (name == "tdma") return Strategy::Tdma;
  if (name == "hybrid") return Strategy::Hybrid;
  throw Error(ErrorCode::InvalidParameters, "strategy must be noma, tdma or hybrid");
}

py::dict region_dict(const RegionBoundary& b) {
  py::list points;
  for (const auto& p : b.points) points.append(py::make_tuple(p.r1, p.r2));
  py::dict labels;
  for (const auto& [name, index] : b.labels) labels[py::str(name)] = index;
  py::dict out;
  out["points"] = points;
  out["labels"] = labels;
  return out;
}

}  // namespace

PYBIND11_MODULE(macopt, m) {
  m.doc() = "Sum-rates and rate regions for multiple-access channels with lossy batteries. "
            "Rates are in nats.";

  py::register_exception<Error>(m, "MacoptError", PyExc_ValueError);

  py::class_<DischargeModel>(m, "DischargeModel")
      .def_static("ideal", &DischargeModel::ideal)
      .def_static("quadratic", &DischargeModel::quadratic, py::arg("resistance"),
                  py::arg("coefficient") = kDefaultLossCoefficient)
      .def_static(
          "tabulated",
          [](const std::vector<std::pair<double, double>>& samples) {
            std::vector<DischargeSample> s;
            for (const auto& [d, g] : samples) s.push_back({d, g});
            return DischargeModel::tabulated(std::move(s));
          },
          py::arg("samples"))
      .def_property_readonly("resistance", &DischargeModel::resistance)
      .def_property_readonly("coefficient", &DischargeModel::coefficient);

  m.def("eval_discharge", &eval_discharge, py::arg("model"), py::arg("drain"));
  m.def("eval_derivative", &eval_derivative, py::arg("model"), py::arg("drain"));
  m.def("peak_discharge", &peak_discharge, py::arg("model"));

  py::class_<UserParams>(m, "UserParams")
      .def(py::init([](double b, double gamma, const DischargeModel& model) {
             UserParams u{b, gamma, model};
             u.validate();
             return u;
           }),
           py::arg("battery_energy"), py::arg("circuit_cost") = 0.0,
           py::arg("model") = DischargeModel::ideal())
      .def_readonly("battery_energy", &UserParams::battery_energy)
      .def_readonly("circuit_cost", &UserParams::circuit_cost)
      .def_readonly("model", &UserParams::model);

  py::class_<SingleUserSolution>(m, "SingleUserSolution")
      .def_readonly("duration", &SingleUserSolution::duration)
      .def_readonly("discharge", &SingleUserSolution::discharge)
      .def_readonly("transmit_power", &SingleUserSolution::transmit_power)
      .def_readonly("rate", &SingleUserSolution::rate)
      .def_readonly("feasible", &SingleUserSolution::feasible);

  m.def(
      "solve_single_user",
      [](const UserParams& u, double horizon) { return solve_p2({u, horizon}); },
      py::arg("user"), py::arg("horizon") = 1.0);
  m.def(
      "grid_single_user",
      [](const UserParams& u, double horizon, int grid) { return brute_force_p1({u, horizon}, grid); },
      py::arg("user"), py::arg("horizon") = 1.0, py::arg("grid") = 400);

  m.def(
      "noma_sum_rate",
      [](const std::vector<UserParams>& users, double horizon) {
        return noma_sum_rate_multi(instance(users, horizon));
      },
      py::arg("users"), py::arg("horizon") = 1.0);
  m.def(
      "tdma_sum_rate",
      [](const std::vector<UserParams>& users, double horizon) {
        return tdma_sum_rate_multi(instance(users, horizon)).rate;
      },
      py::arg("users"), py::arg("horizon") = 1.0);
  m.def(
      "hybrid_sum_rate",
      [](const std::vector<UserParams>& users, double horizon, double tol) {
        py::gil_scoped_release release;
        return hybrid_sum_rate_multi(instance(users, horizon), tol).rate;
      },
      py::arg("users"), py::arg("horizon") = 1.0, py::arg("tol") = 1e-6);

  m.def(
      "trace_region",
      [](const std::vector<UserParams>& users, double horizon, const std::string& strategy,
         int points) {
        const auto inst = as_two_user(instance(users, horizon));
        RegionBoundary b;
        {
          py::gil_scoped_release release;
          b = trace_region(inst, strategy_from(strategy), points);
        }
        return region_dict(b);
      },
      py::arg("users"), py::arg("horizon") = 1.0, py::arg("strategy") = "hybrid",
      py::arg("points") = 25);

  m.def("suite_names", &suite_names);
  m.def(
      "run_suite",
      [](const std::string& name) {
        SuiteReport rep;
        {
          py::gil_scoped_release release;
          rep = run_suite(name);
        }
        return py::module_::import("json").attr("loads")(rep.to_json());
      },
      py::arg("name"));
}
