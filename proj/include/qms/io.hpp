#pragma once

// JSON / CSV encodings of spaces, measured spaces and transport problems, plus the
// report writers shared by the CLI. Numbers are rounded to 12 significant digits.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "qms/cd.hpp"
#include "qms/space.hpp"
#include "qms/transport.hpp"

namespace qms::io {

using Json = nlohmann::ordered_json;

/// x rounded to 12 significant digits; non-finite values pass through.
double round12(double x);
/// JSON number rounded to 12 digits, or the string "inf" / "-inf" / "nan".
Json number(double x);
Json numbers(const std::vector<double>& xs);
/// Inverse of number(): accepts numbers and the strings above.
double to_double(const Json& j);

Json to_json(const QuasiMetricSpace& space);
Json to_json(const MeasuredSpace& mspace);
Json to_json(const transport::Coupling& coupling);
Json to_json(const cd::FunctionalReport& report);

QuasiMetricSpace space_from_json(const Json& j);
/// Weights default to uniform 1/n when absent.
MeasuredSpace measured_from_json(const Json& j);
/// The problem's space with "mu", "nu" and "p" (default 1).
transport::TransportProblem problem_from_json(const Json& j);

/// Square matrix, one row per line, comma or whitespace separated.
QuasiMetricSpace space_from_csv(const std::string& text);

/// Parses JSON (first non-blank character '{') or CSV. Throws ParseError.
Json parse_document(const std::string& text);
std::string read_file(const std::filesystem::path& path);
/// Reads a space file; CSV input becomes {"n", "dist"}.
Json load_document(const std::filesystem::path& path);

/// Writes via a temporary sibling and rename.
void write_atomic(const std::filesystem::path& path, const std::string& content);

std::string reports_csv(const std::vector<cd::FunctionalReport>& reports);

}  // namespace qms::io
