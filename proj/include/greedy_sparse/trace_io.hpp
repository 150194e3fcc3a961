/**
 * @file trace_io.hpp
 * @brief Trace emission: CSV with a fixed column schema and full double
 *        precision, and a JSON mirror that round-trips losslessly.
 */
#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "greedy_sparse/greedy.hpp"

namespace gsparse {

/// Locale-independent shortest-faithful rendering, 17 significant digits.
std::string format_double(double v);

/// Columns: m,residual_norm,atom_label,sign,greedy_value,defect,
/// apriori_bound,aposteriori_bound,exact_formula. Absent values are empty
/// cells. Throws on an empty trace. Byte-deterministic.
void write_trace_csv(const GreedyTrace& trace, std::ostream& out);
void write_trace_csv(const GreedyTrace& trace,
                     const std::filesystem::path& path);
std::string trace_to_csv(const GreedyTrace& trace);

/// Same schema per row plus the run metadata; `config_echo` is attached
/// verbatim under "config" when non-null.
nlohmann::json trace_to_json(const GreedyTrace& trace,
                             const nlohmann::json& config_echo = nullptr);
GreedyTrace trace_from_json(const nlohmann::json& j);

void write_trace_json(const GreedyTrace& trace,
                      const std::filesystem::path& path,
                      const nlohmann::json& config_echo = nullptr);

/// Field-by-field equality; NaN compares equal to NaN.
bool trace_equal(const GreedyTrace& a, const GreedyTrace& b);

}  // namespace gsparse
