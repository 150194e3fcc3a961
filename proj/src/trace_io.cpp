#include "greedy_sparse/trace_io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gsparse {

std::string format_double(double v) {
  std::array<char, 64> buf;
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                                 std::chars_format::general, 17);
  return std::string(buf.data(), res.ptr);
}

namespace {

constexpr const char* kCsvHeader =
    "m,residual_norm,atom_label,sign,greedy_value,defect,apriori_bound,"
    "aposteriori_bound,exact_formula";

std::string cell(double v) {
  return std::isnan(v) ? std::string() : format_double(v);
}

void require_emittable(const GreedyTrace& trace) {
  if (trace.rows.empty()) {
    throw std::invalid_argument("trace emission: empty trace");
  }
  for (const auto& row : trace.rows) {
    if (row.atom_label.find(',') != std::string::npos) {
      throw std::invalid_argument("trace emission: comma in atom label");
    }
  }
}

nlohmann::json num_or_null(double v) {
  if (std::isnan(v)) return nullptr;
  return v;
}

double num_from(const nlohmann::json& j) {
  if (j.is_null()) return kAbsent;
  return j.get<double>();
}

bool same(double a, double b) {
  if (std::isnan(a) && std::isnan(b)) return true;
  return a == b;
}

}  // namespace

void write_trace_csv(const GreedyTrace& trace, std::ostream& out) {
  require_emittable(trace);
  out << kCsvHeader << "\n";
  for (const auto& row : trace.rows) {
    out << row.m << ',' << format_double(row.residual_norm) << ','
        << row.atom_label << ',' << (row.sign >= 0 ? "+1" : "-1") << ','
        << format_double(row.greedy_value) << ',' << cell(row.defect) << ','
        << cell(row.apriori_bound) << ',' << cell(row.aposteriori_bound)
        << ',' << cell(row.exact_formula) << "\n";
  }
}

void write_trace_csv(const GreedyTrace& trace,
                     const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  write_trace_csv(trace, out);
}

std::string trace_to_csv(const GreedyTrace& trace) {
  std::ostringstream ss;
  write_trace_csv(trace, ss);
  return ss.str();
}

nlohmann::json trace_to_json(const GreedyTrace& trace,
                             const nlohmann::json& config_echo) {
  require_emittable(trace);
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : trace.rows) {
    rows.push_back({{"m", row.m},
                    {"residual_norm", row.residual_norm},
                    {"atom_index", row.atom_index},
                    {"atom_label", row.atom_label},
                    {"sign", row.sign},
                    {"greedy_value", row.greedy_value},
                    {"tk", row.tk},
                    {"defect", num_or_null(row.defect)},
                    {"apriori_bound", num_or_null(row.apriori_bound)},
                    {"aposteriori_bound", num_or_null(row.aposteriori_bound)},
                    {"exact_formula", num_or_null(row.exact_formula)},
                    {"wall_clock_s", row.wall_clock_s}});
  }
  nlohmann::json combo = nlohmann::json::array();
  for (const auto& [idx, coeff] : trace.combination) {
    combo.push_back({idx, coeff});
  }
  nlohmann::json j{
      {"algorithm", trace.algorithm},
      {"initial_residual_norm", trace.initial_residual_norm},
      {"rows", std::move(rows)},
      {"final_approximant",
       std::vector<double>(trace.final_approximant.begin(),
                           trace.final_approximant.end())},
      {"final_residual", std::vector<double>(trace.final_residual.begin(),
                                             trace.final_residual.end())},
      {"combination", std::move(combo)},
      {"converged_exactly", trace.converged_exactly},
      {"truncated", trace.truncated},
      {"diagnostic", trace.diagnostic}};
  if (!config_echo.is_null()) j["config"] = config_echo;
  return j;
}

GreedyTrace trace_from_json(const nlohmann::json& j) {
  GreedyTrace trace;
  trace.algorithm = j.at("algorithm").get<std::string>();
  trace.initial_residual_norm = j.at("initial_residual_norm").get<double>();
  for (const auto& rj : j.at("rows")) {
    TraceRow row;
    row.m = rj.at("m").get<int>();
    row.residual_norm = rj.at("residual_norm").get<double>();
    row.atom_index = rj.at("atom_index").get<std::size_t>();
    row.atom_label = rj.at("atom_label").get<std::string>();
    row.sign = rj.at("sign").get<int>();
    row.greedy_value = rj.at("greedy_value").get<double>();
    row.tk = rj.at("tk").get<double>();
    row.defect = num_from(rj.at("defect"));
    row.apriori_bound = num_from(rj.at("apriori_bound"));
    row.aposteriori_bound = num_from(rj.at("aposteriori_bound"));
    row.exact_formula = num_from(rj.at("exact_formula"));
    row.wall_clock_s = rj.at("wall_clock_s").get<double>();
    trace.rows.push_back(std::move(row));
  }
  const auto approx = j.at("final_approximant").get<std::vector<double>>();
  const auto resid = j.at("final_residual").get<std::vector<double>>();
  trace.final_approximant =
      Eigen::Map<const Eigen::VectorXd>(approx.data(), Eigen::Index(approx.size()));
  trace.final_residual =
      Eigen::Map<const Eigen::VectorXd>(resid.data(), Eigen::Index(resid.size()));
  for (const auto& cj : j.at("combination")) {
    trace.combination.emplace_back(cj.at(0).get<std::size_t>(),
                                   cj.at(1).get<double>());
  }
  trace.converged_exactly = j.at("converged_exactly").get<bool>();
  trace.truncated = j.at("truncated").get<bool>();
  trace.diagnostic = j.at("diagnostic").get<std::string>();
  return trace;
}

void write_trace_json(const GreedyTrace& trace,
                      const std::filesystem::path& path,
                      const nlohmann::json& config_echo) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  out << trace_to_json(trace, config_echo).dump(2) << "\n";
}

bool trace_equal(const GreedyTrace& a, const GreedyTrace& b) {
  if (a.algorithm != b.algorithm ||
      !same(a.initial_residual_norm, b.initial_residual_norm) ||
      a.rows.size() != b.rows.size() ||
      a.combination != b.combination ||
      a.converged_exactly != b.converged_exactly ||
      a.truncated != b.truncated || a.diagnostic != b.diagnostic) {
    return false;
  }
  if (a.final_approximant.size() != b.final_approximant.size() ||
      a.final_residual.size() != b.final_residual.size()) {
    return false;
  }
  for (Eigen::Index i = 0; i < a.final_approximant.size(); ++i) {
    if (!same(a.final_approximant[i], b.final_approximant[i])) return false;
  }
  for (Eigen::Index i = 0; i < a.final_residual.size(); ++i) {
    if (!same(a.final_residual[i], b.final_residual[i])) return false;
  }
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    const TraceRow& x = a.rows[i];
    const TraceRow& y = b.rows[i];
    if (x.m != y.m || x.atom_index != y.atom_index ||
        x.atom_label != y.atom_label || x.sign != y.sign ||
        !same(x.residual_norm, y.residual_norm) ||
        !same(x.greedy_value, y.greedy_value) || !same(x.tk, y.tk) ||
        !same(x.defect, y.defect) ||
        !same(x.apriori_bound, y.apriori_bound) ||
        !same(x.aposteriori_bound, y.aposteriori_bound) ||
        !same(x.exact_formula, y.exact_formula) ||
        !same(x.wall_clock_s, y.wall_clock_s)) {
      return false;
    }
  }
  return true;
}

}  // namespace gsparse
