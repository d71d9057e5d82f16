// macopt command-line front end.
//
// Exit codes: 0 ok, 1 bad config or usage, 2 infeasible, 3 solver failure,
// 4 verification failure.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "macopt/errors.hpp"
#include "macopt/mac_multi_user.hpp"
#include "macopt/parallel.hpp"
#include "macopt/rate_region.hpp"
#include "macopt/scenario.hpp"
#include "macopt/single_user.hpp"
#include "macopt/verification.hpp"

using namespace macopt;

namespace {

enum Exit { kOk = 0, kConfig = 1, kInfeasible = 2, kSolver = 3, kVerify = 4 };

struct Options {
  std::string config;
  std::string out;
  std::string unit;
  std::optional<double> tol;
  int points = 25;
  std::string r_range;
  std::vector<double> r_list;
  std::string suite;
};

int exit_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::InvalidConfig:
    case ErrorCode::InvalidParameters:
    case ErrorCode::InvalidModel:
    case ErrorCode::NegativeDischarge:
    case ErrorCode::TooManyUsers:
      return kConfig;
    case ErrorCode::PeerInfeasible:
    case ErrorCode::PreconditionViolated:
      return kInfeasible;
    default:
      return kSolver;
  }
}

void report_failure(const Error& e) {
  std::cerr << "error: " << e.what() << "\n";
  if (const auto* f = dynamic_cast<const SolverFailure*>(&e)) {
    const auto& r = f->report();
    nlohmann::json j{{"status", to_string(r.status)},
                     {"objective", r.objective},
                     {"stationarity_residual", r.stationarity_residual},
                     {"feasibility_residual", r.feasibility_residual},
                     {"iterations", r.iterations}};
    std::cerr << j.dump(2) << "\n";
  }
}

ScenarioConfig load(const Options& o) {
  if (o.config.empty()) throw Error(ErrorCode::InvalidConfig, "--config is required");
  auto cfg = load_scenario(o.config);
  if (o.unit == "bits") cfg.unit = RateUnit::Bits;
  if (o.unit == "nats") cfg.unit = RateUnit::Nats;
  if (o.tol) cfg.solver.tolerance = *o.tol;
  return cfg;
}

// Writes to --out when given, stdout otherwise.
void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::InvalidConfig, "cannot write " + path);
  f << text;
}

std::string num(double nats, RateUnit unit) { return format_number(in_unit(nats, unit)); }

std::vector<double> parse_range(const std::string& spec) {
  std::vector<double> parts;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ':')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidConfig, "--r-range expects LO:HI:STEP, got " + spec);
    }
  }
  if (parts.size() != 3 || !(parts[2] > 0) || parts[1] < parts[0]) {
    throw Error(ErrorCode::InvalidConfig, "--r-range expects LO:HI:STEP with STEP > 0, got " + spec);
  }
  std::vector<double> out;
  const long n = std::lround(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9));
  for (long k = 0; k <= n; ++k) out.push_back(parts[0] + k * parts[2]);
  return out;
}

int cmd_single_user(const Options& o) {
  const auto cfg = load(o);
  const auto p = cfg.single_user();
  const auto s = solve_p2(p, std::min(1e-12, cfg.solver.tolerance));
  if (!s.feasible) {
    std::cout << "infeasible: delivered power never covers the circuit cost\n";
    return kInfeasible;
  }
  std::string residual = "n/a (boundary optimum)";
  try {
    residual = format_number(stationarity_residual_p2(p, s.duration));
  } catch (const Error&) {
  }
  const char* u = to_string(cfg.unit);
  std::ostringstream text;
  text << "duration_s " << format_number(s.duration) << "\n"
       << "discharge_w " << format_number(s.discharge) << "\n"
       << "transmit_power_w " << format_number(s.transmit_power) << "\n"
       << "rate_" << u << " " << num(s.rate, cfg.unit) << "\n"
       << "feasible true\n"
       << "stationarity_residual " << residual << "\n";
  std::cout << text.str();
  if (!o.out.empty()) {
    std::ostringstream csv;
    csv << "duration_s,discharge_w,transmit_power_w,rate_" << u << ",feasible\n"
        << format_number(s.duration) << "," << format_number(s.discharge) << ","
        << format_number(s.transmit_power) << "," << num(s.rate, cfg.unit) << ",true\n";
    emit(o.out, csv.str());
  }
  return kOk;
}

int cmd_sum_rate(const Options& o) {
  const auto cfg = load(o);
  const auto inst = cfg.multi_user();
  inst.validate();
  const bool all = cfg.strategy == StrategyChoice::All;
  std::vector<std::pair<std::string, double>> rows;
  if (all || cfg.strategy == StrategyChoice::Noma) rows.emplace_back("noma", noma_sum_rate_multi(inst));
  if (all || cfg.strategy == StrategyChoice::Tdma) {
    rows.emplace_back("tdma", tdma_sum_rate_multi(inst).rate);
  }
  if (all || cfg.strategy == StrategyChoice::Hybrid) {
    rows.emplace_back("hybrid", hybrid_sum_rate_multi(inst, cfg.solver.tolerance).rate);
  }
  std::ostringstream table, csv;
  csv << "strategy,rate_" << to_string(cfg.unit) << "\n";
  for (const auto& [name, rate] : rows) {
    table << name << " " << num(rate, cfg.unit) << " " << to_string(cfg.unit) << "\n";
    csv << name << "," << num(rate, cfg.unit) << "\n";
  }
  int code = kOk;
  if (all) {
    const double gap = std::max(rows[0].second, rows[1].second) - rows[2].second;
    const bool ok = gap <= cfg.solver.tolerance;
    table << "dominance hybrid >= max(noma, tdma): " << (ok ? "ok" : "VIOLATED") << "\n";
    if (!ok) code = kSolver;
  }
  std::cout << table.str();
  if (!o.out.empty()) emit(o.out, csv.str());
  return code;
}

int cmd_sweep(const Options& o) {
  const auto cfg = load(o);
  std::vector<double> rs = o.r_list;
  if (!o.r_range.empty()) {
    const auto extra = parse_range(o.r_range);
    rs.insert(rs.end(), extra.begin(), extra.end());
  }
  for (double r : rs) {
    if (!(r >= 0) || !std::isfinite(r)) {
      throw Error(ErrorCode::InvalidConfig, "resistances must be finite and >= 0");
    }
  }
  cfg.multi_user().validate();

  struct Row {
    double noma = NAN, tdma = NAN, hybrid = NAN;
    std::string error;
  };
  std::vector<Row> rows(rs.size());
  parallel_for(rs.size(), [&](std::size_t k) {
    const auto inst = cfg.with_resistance(rs[k]).multi_user();
    Row& row = rows[k];
    try {
      row.noma = noma_sum_rate_multi(inst);
      row.tdma = tdma_sum_rate_multi(inst).rate;
      row.hybrid = hybrid_sum_rate_multi(inst, cfg.solver.tolerance).rate;
    } catch (const Error& e) {
      row.error = e.what();
    }
  });

  const char* u = to_string(cfg.unit);
  std::ostringstream csv;
  csv << "r,noma_" << u << ",tdma_" << u << ",hybrid_" << u << "\n";
  int code = kOk;
  for (std::size_t k = 0; k < rs.size(); ++k) {
    const Row& row = rows[k];
    csv << format_number(rs[k]) << "," << num(row.noma, cfg.unit) << ","
        << num(row.tdma, cfg.unit) << "," << num(row.hybrid, cfg.unit) << "\n";
    if (!row.error.empty()) {
      std::cerr << "r=" << format_number(rs[k]) << ": " << row.error << "\n";
      code = kSolver;
    }
  }
  emit(o.out, csv.str());
  return code;
}

std::string region_csv(const RegionBoundary& b, RateUnit unit) {
  std::vector<std::string> label(b.points.size());
  for (const auto& [name, index] : b.labels) {
    label[index] += label[index].empty() ? name : "/" + name;
  }
  const char* u = to_string(unit);
  std::ostringstream csv;
  csv << "r1_" << u << ",r2_" << u << ",label\n";
  for (std::size_t k = 0; k < b.points.size(); ++k) {
    csv << num(b.points[k].r1, unit) << "," << num(b.points[k].r2, unit) << "," << label[k] << "\n";
  }
  return csv.str();
}

std::string region_json(const RegionBoundary& b, Strategy s, RateUnit unit) {
  nlohmann::json j;
  j["strategy"] = to_string(s);
  j["unit"] = to_string(unit);
  j["points"] = nlohmann::json::array();
  for (const auto& p : b.points) j["points"].push_back({in_unit(p.r1, unit), in_unit(p.r2, unit)});
  j["labels"] = nlohmann::json::object();
  for (const auto& [name, index] : b.labels) j["labels"][name] = index;
  return j.dump(2) + "\n";
}

int cmd_region(const Options& o) {
  const auto cfg = load(o);
  const auto inst = cfg.two_user();
  inst.validate();
  if (o.points < 2) throw Error(ErrorCode::InvalidConfig, "--points must be at least 2");
  std::vector<Strategy> wanted;
  switch (cfg.strategy) {
    case StrategyChoice::Noma: wanted = {Strategy::Noma}; break;
    case StrategyChoice::Tdma: wanted = {Strategy::Tdma}; break;
    case StrategyChoice::Hybrid: wanted = {Strategy::Hybrid}; break;
    case StrategyChoice::All: wanted = {Strategy::Noma, Strategy::Tdma, Strategy::Hybrid}; break;
  }
  for (Strategy s : wanted) {
    const auto b = trace_region(inst, s, o.points);
    if (o.out.empty()) {
      std::cout << "# " << to_string(s) << "\n" << region_csv(b, cfg.unit);
      continue;
    }
    std::filesystem::path path(o.out);
    if (wanted.size() > 1) {
      path.replace_filename(path.stem().string() + "_" + to_string(s) + path.extension().string());
    }
    emit(path.string(), region_csv(b, cfg.unit));
    emit(std::filesystem::path(path).replace_extension(".json").string(),
         region_json(b, s, cfg.unit));
  }
  return kOk;
}

int cmd_verify(const Options& o) {
  std::vector<std::string> names;
  if (o.suite == "all") {
    names = suite_names();
  } else {
    names = {o.suite};
  }
  bool ok = true;
  nlohmann::json summary = nlohmann::json::array();
  for (const auto& name : names) {
    const auto rep = run_suite(name);
    ok = ok && rep.passed();
    summary.push_back(nlohmann::json::parse(rep.to_json()));
    std::cerr << (rep.passed() ? "PASS " : "FAIL ") << name << " ("
              << format_number(rep.seconds) << " s)\n";
  }
  const std::string text = (names.size() == 1 ? summary[0] : summary).dump(2) + "\n";
  emit(o.out, text);
  return ok ? kOk : kVerify;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sum-rates and rate regions for multiple-access channels with lossy batteries"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* cmd, bool needs_config) {
    auto* c = cmd->add_option("--config", o.config, "Scenario JSON file");
    if (needs_config) c->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", o.out, "Output file (stdout when omitted)");
    cmd->add_option("--unit", o.unit, "Rate unit, overrides the config")
        ->check(CLI::IsMember({"bits", "nats"}));
    cmd->add_option("--tol", o.tol, "Solver tolerance, overrides the config")
        ->check(CLI::PositiveNumber);
  };

  auto* single = app.add_subcommand("single-user", "Best schedule for one user");
  common(single, true);
  auto* sum = app.add_subcommand("sum-rate", "Maximum sum-rate per strategy");
  common(sum, true);
  auto* sweep = app.add_subcommand("sweep", "Sum-rates over a range of battery resistances");
  common(sweep, true);
  sweep->add_option("--r-range", o.r_range, "Resistances as LO:HI:STEP");
  sweep->add_option("--r-list", o.r_list, "Explicit resistances")->delimiter(',');
  auto* region = app.add_subcommand("region", "Two-user rate region boundaries");
  common(region, true);
  region->add_option("--points", o.points, "Points per curved arc")->check(CLI::Range(2, 100000));
  auto* verify = app.add_subcommand("verify", "Run a built-in property suite");
  common(verify, false);
  std::vector<std::string> suites = suite_names();
  suites.push_back("all");
  verify->add_option("suite", o.suite, "Suite name")->required()->check(CLI::IsMember(suites));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*single) return cmd_single_user(o);
    if (*sum) return cmd_sum_rate(o);
    if (*sweep) return cmd_sweep(o);
    if (*region) return cmd_region(o);
    if (*verify) return cmd_verify(o);
  } catch (const Error& e) {
    report_failure(e);
    return exit_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSolver;
  }
  return kConfig;
}
