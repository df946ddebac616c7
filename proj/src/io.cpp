#include "qms/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "qms/error.hpp"

namespace qms::io {

double round12(double x) {
  if (!std::isfinite(x) || x == 0.0) return x == 0.0 ? 0.0 : x;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

Json number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return round12(x);
}

Json numbers(const std::vector<double>& xs) {
  Json a = Json::array();
  for (double x : xs) a.push_back(number(x));
  return a;
}

double to_double(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "Infinity") return std::numeric_limits<double>::infinity();
    if (s == "-inf" || s == "-Infinity") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw ParseError("expected a number, got " + j.dump());
}

namespace {

std::vector<double> vector_of(const Json& j, const char* what) {
  if (!j.is_array()) throw ParseError(std::string(what) + " must be an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) out.push_back(to_double(v));
  return out;
}

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

}  // namespace

Json to_json(const QuasiMetricSpace& space) {
  Json j;
  j["n"] = space.size();
  Json rows = Json::array();
  for (Index i = 0; i < space.size(); ++i) {
    Json row = Json::array();
    for (Index k = 0; k < space.size(); ++k) row.push_back(number(space(i, k)));
    rows.push_back(std::move(row));
  }
  j["dist"] = std::move(rows);
  if (!space.labels().empty()) j["labels"] = space.labels();
  if (space.has_coords()) {
    Json c = Json::array();
    for (const auto& p : space.coords()) c.push_back(numbers(p));
    j["coords"] = std::move(c);
  }
  return j;
}

Json to_json(const MeasuredSpace& mspace) {
  Json j = to_json(mspace.space);
  j["weights"] = numbers(mspace.weights);
  if (mspace.basepoint) j["basepoint"] = *mspace.basepoint;
  return j;
}

Json to_json(const transport::Coupling& coupling) {
  Json a = Json::array();
  for (const auto& e : coupling.entries) a.push_back(Json::array({e.from, e.to, number(e.mass)}));
  return a;
}

Json to_json(const cd::FunctionalReport& r) {
  Json j;
  j["name"] = r.name;
  j["lhs"] = number(r.lhs);
  j["rhs"] = number(r.rhs);
  j["slack"] = number(r.slack);
  j["tolerance"] = number(r.tolerance);
  j["pass"] = r.pass;
  j["verdict"] = cd::verdict_name(r.verdict);
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

QuasiMetricSpace space_from_json(const Json& j) {
  const Json& rows = field(j, "dist");
  if (!rows.is_array()) throw ParseError("\"dist\" must be an array of rows");
  const std::size_t n = rows.size();
  if (j.contains("n") && j.at("n").get<std::size_t>() != n) throw ParseError("\"n\" disagrees with \"dist\"");
  Matrix d(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::vector<double> row = vector_of(rows[i], "dist row");
    if (row.size() != n) throw StructureError("distance matrix is not square");
    for (std::size_t k = 0; k < n; ++k) d(i, k) = row[k];
  }
  std::vector<std::string> labels;
  if (j.contains("labels")) labels = j.at("labels").get<std::vector<std::string>>();
  std::vector<std::vector<double>> coords;
  if (j.contains("coords"))
    for (const auto& p : j.at("coords")) coords.push_back(vector_of(p, "coords"));
  return QuasiMetricSpace(std::move(d), std::move(labels), std::move(coords));
}

MeasuredSpace measured_from_json(const Json& j) {
  QuasiMetricSpace space = space_from_json(j);
  const std::size_t n = space.size();
  std::vector<double> w = j.contains("weights") ? vector_of(j.at("weights"), "weights")
                                                : std::vector<double>(n, n ? 1.0 / static_cast<double>(n) : 0.0);
  std::optional<Index> star;
  if (j.contains("basepoint") && !j.at("basepoint").is_null()) star = j.at("basepoint").get<Index>();
  return MeasuredSpace(std::move(space), std::move(w), star);
}

transport::TransportProblem problem_from_json(const Json& j) {
  transport::TransportProblem prob;
  prob.space = space_from_json(j);
  prob.mu = vector_of(field(j, "mu"), "mu");
  prob.nu = vector_of(field(j, "nu"), "nu");
  prob.p = j.contains("p") ? to_double(j.at("p")) : 1.0;
  return prob;
}

QuasiMetricSpace space_from_csv(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    for (char& c : line)
      if (c == ',' || c == ';') c = ' ';
    std::istringstream ls(line);
    std::vector<double> row;
    std::string tok;
    while (ls >> tok) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw ParseError("bad CSV number " + tok);
      } catch (const std::logic_error&) {
        throw ParseError("bad CSV number " + tok);
      }
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }
  const std::size_t n = rows.size();
  if (n == 0) throw ParseError("empty CSV matrix");
  Matrix d(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != n) throw StructureError("CSV distance matrix is not square");
    for (std::size_t k = 0; k < n; ++k) d(i, k) = rows[i][k];
  }
  return QuasiMetricSpace(std::move(d));
}

Json parse_document(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) throw ParseError("empty input");
  if (text[first] == '{') {
    try {
      return Json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("invalid JSON: ") + e.what());
    }
  }
  return to_json(space_from_csv(text));
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json load_document(const std::filesystem::path& path) { return parse_document(read_file(path)); }

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ParseError("cannot write " + tmp.string());
    out << content;
    if (!out) throw ParseError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string reports_csv(const std::vector<cd::FunctionalReport>& reports) {
  std::ostringstream os;
  os << "name,lhs,rhs,slack,tolerance,pass,verdict\n";
  for (const auto& r : reports) {
    os << r.name << ',' << number(r.lhs).dump() << ',' << number(r.rhs).dump() << ',' << number(r.slack).dump()
       << ',' << number(r.tolerance).dump() << ',' << (r.pass ? "true" : "false") << ',' << cd::verdict_name(r.verdict)
       << '\n';
  }
  return os.str();
}

}  // namespace qms::io
