#include "qms/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "qms/cd.hpp"
#include "qms/error.hpp"
#include "qms/gh.hpp"
#include "qms/io.hpp"
#include "qms/models.hpp"
#include "qms/space.hpp"
#include "qms/transport.hpp"

namespace qms {
namespace {

using io::Json;
using io::number;

struct Common {
  std::string format = "json";
  std::string output;
};

std::uint64_t default_seed() {
  if (const char* s = std::getenv("QMS_SEED")) {
    try {
      return std::stoull(s);
    } catch (const std::exception&) {
      throw ParseError(std::string("QMS_SEED is not an unsigned integer: ") + s);
    }
  }
  return 0;
}

double parse_real(const std::string& s) {
  if (s == "inf" || s == "infinity" || s == "Inf") return std::numeric_limits<double>::infinity();
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::logic_error&) {
    throw ParseError("not a number: " + s);
  }
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::string tok;
  std::istringstream in(s);
  while (std::getline(in, tok, ',')) {
    if (!tok.empty()) out.push_back(parse_real(tok));
  }
  return out;
}

std::vector<double> field_vector(const Json& j, const char* key) {
  std::vector<double> v;
  for (const auto& x : j.at(key)) v.push_back(io::to_double(x));
  return v;
}

std::optional<std::vector<double>> first_field(const Json& j, std::initializer_list<const char*> keys) {
  for (const char* k : keys)
    if (j.contains(k)) return field_vector(j, k);
  return std::nullopt;
}

void emit(const Common& c, const std::string& text, std::ostream& out) {
  if (c.output.empty())
    out << text;
  else
    io::write_atomic(c.output, text);
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json reports_json(const std::vector<cd::FunctionalReport>& reports) {
  Json a = Json::array();
  for (const auto& r : reports) a.push_back(io::to_json(r));
  return a;
}

bool all_pass(const std::vector<cd::FunctionalReport>& reports) {
  return std::all_of(reports.begin(), reports.end(), [](const auto& r) { return r.pass; });
}

// --- gen ----------------------------------------------------------------------

struct GenArgs {
  std::string model;
  int dim = 2;
  double b = 0.0;
  std::vector<double> drift;
  int member = -1;
  double side = 1.0;
  double grid = 0.0;
  std::size_t shells = 0;
  std::size_t directions = 16;
  std::size_t uniform = 0;
  std::optional<double> clip_r;
  std::optional<double> max_norm;
  std::string weights = "lebesgue";
  bool normalize = false;
  double K = 1.0;
  double half_width = 4.0;
};

int cmd_gen(const GenArgs& g, std::uint64_t seed, const Common& c, std::ostream& out) {
  Json meta;
  meta["model"] = g.model;
  MeasuredSpace ms;
  if (g.model == "gaussian") {
    if (g.grid <= 0) throw DomainError("gaussian needs --grid > 0");
    ms = models::gaussian_line(g.K, g.half_width, g.grid);
    meta["K"] = number(g.K);
    meta["half_width"] = number(g.half_width);
    meta["pitch"] = number(g.grid);
  } else {
    models::Model model;
    if (g.model == "funk") {
      model = models::FunkBall{g.dim};
    } else if (g.model == "randers-torus") {
      model = models::RandersTorus{g.dim, g.b};
      meta["b"] = number(g.b);
    } else if (g.model == "randers-ball") {
      models::RandersBall rb = g.member >= 0 ? models::randers_ball_member(g.dim, g.member) : models::RandersBall{g.drift};
      if (g.member < 0 && g.drift.empty()) rb.drift.assign(static_cast<std::size_t>(g.dim), 0.0);
      meta["drift"] = io::numbers(rb.drift);
      model = rb;
    } else if (g.model == "box") {
      model = models::EuclideanBox{g.dim, g.side};
      meta["side"] = number(g.side);
    } else {
      throw DomainError("unknown model " + g.model);
    }
    models::check_model(model);
    meta["dim"] = models::model_dim(model);

    models::SampleSpec spec;
    spec.seed = seed;
    spec.clip_radius = g.clip_r;
    spec.max_norm = g.max_norm;
    const int chosen = (g.grid > 0) + (g.shells > 0) + (g.uniform > 0);
    if (chosen != 1) throw DomainError("choose exactly one of --grid, --shells, --uniform");
    if (g.grid > 0) {
      spec.strategy = models::SampleStrategy::grid;
      spec.pitch = g.grid;
      meta["strategy"] = "grid";
      meta["pitch"] = number(g.grid);
    } else if (g.shells > 0) {
      spec.strategy = models::SampleStrategy::radial_shells;
      spec.shells = g.shells;
      spec.directions = g.directions;
      meta["strategy"] = "radial-shells";
      meta["shells"] = g.shells;
      meta["directions"] = g.directions;
    } else {
      spec.strategy = models::SampleStrategy::seeded_uniform;
      spec.count = g.uniform;
      meta["strategy"] = "seeded-uniform";
      meta["count"] = g.uniform;
    }
    if (g.clip_r) meta["clip_radius"] = number(*g.clip_r);
    meta["seed"] = seed;
    models::WeightModel wm;
    if (g.weights == "lebesgue")
      wm = models::WeightModel::lebesgue;
    else if (g.weights == "uniform")
      wm = models::WeightModel::uniform;
    else
      throw DomainError("weights must be lebesgue or uniform");
    meta["weights"] = g.weights;
    ms = models::sample(model, spec, wm, g.normalize);
    if (const auto* t = std::get_if<models::RandersTorus>(&model))
      meta["model_reversibility"] = number(models::randers_torus_reversibility(*t));
    if (std::holds_alternative<models::FunkBall>(model) && g.clip_r)
      meta["model_reversibility"] = number(models::funk_ball_reversibility(*g.clip_r));
  }
  meta["points"] = ms.size();
  meta["reversibility"] = number(reversibility(ms.space));

  if (c.format == "csv") {
    std::ostringstream os;
    for (Index i = 0; i < ms.size(); ++i) {
      for (Index k = 0; k < ms.size(); ++k) os << (k ? "," : "") << number(ms.space(i, k)).dump();
      os << '\n';
    }
    emit(c, os.str(), out);
  } else {
    Json j = io::to_json(ms);
    j["metadata"] = std::move(meta);
    emit(c, dump(j), out);
  }
  return 0;
}

// --- validate / report -----------------------------------------------------------

int cmd_validate(const std::string& file, double tol, const Common& c, std::ostream& out) {
  const Json doc = io::load_document(file);
  const QuasiMetricSpace space = io::space_from_json(doc);
  const ValidationReport rep = validate(space, tol, 1000);
  bool weights_ok = true;
  if (doc.contains("weights")) {
    for (const auto& w : doc.at("weights"))
      if (!(io::to_double(w) >= 0.0)) weights_ok = false;
    if (doc.at("weights").size() != space.size()) weights_ok = false;
  }
  const bool valid = rep.valid && weights_ok;
  if (c.format == "csv") {
    std::ostringstream os;
    os << "i,j,k,excess\n";
    for (const auto& v : rep.triangle) os << v.i << ',' << v.j << ',' << v.k << ',' << number(v.excess).dump() << '\n';
    emit(c, os.str(), out);
  } else {
    Json j;
    j["valid"] = valid;
    j["points"] = space.size();
    j["tolerance"] = number(tol);
    j["weights_ok"] = weights_ok;
    j["triangle_violations"] = rep.triangle_count;
    Json tri = Json::array();
    for (std::size_t a = 0; a < std::min<std::size_t>(rep.triangle.size(), 20); ++a) {
      const auto& v = rep.triangle[a];
      tri.push_back(Json{{"i", v.i}, {"j", v.j}, {"k", v.k}, {"excess", number(v.excess)}});
    }
    j["triangle_examples"] = std::move(tri);
    Json zeros = Json::array();
    for (const auto& [a, b] : rep.zero_off_diagonal) zeros.push_back(Json::array({a, b}));
    j["zero_off_diagonal"] = std::move(zeros);
    Json neg = Json::array();
    for (const auto& [a, b] : rep.negative) neg.push_back(Json::array({a, b}));
    j["negative"] = std::move(neg);
    j["nonzero_diagonal"] = rep.nonzero_diagonal;
    emit(c, dump(j), out);
  }
  return valid ? 0 : 1;
}

int cmd_report(const std::string& file, const std::vector<double>& eps, const std::vector<double>& radii,
               const Common& c, std::ostream& out) {
  const Json doc = io::load_document(file);
  const MeasuredSpace ms = io::measured_from_json(doc);
  const ValidationReport rep = validate(ms.space);
  Json j;
  j["points"] = ms.size();
  j["valid"] = rep.valid;
  j["total_mass"] = number(ms.total_mass());
  j["reversibility"] = number(reversibility(ms.space));
  j["diameter"] = number(diameter(ms.space));
  j["symmetrized_diameter"] = number(diameter(symmetrize(ms.space)));
  if (ms.basepoint) j["basepoint"] = *ms.basepoint;
  Json cov = Json::array();
  for (double e : eps) {
    const CountBounds cv = covering_number(ms.space, e);
    const CountBounds cp = capacity(ms.space, e);
    cov.push_back(Json{{"eps", number(e)},
                       {"cov_lower", cv.lower},
                       {"cov_upper", cv.upper},
                       {"cov_exact", cv.exact},
                       {"cap_lower", cp.lower},
                       {"cap_upper", cp.upper},
                       {"cap_exact", cp.exact}});
  }
  j["covering"] = std::move(cov);
  if (!radii.empty()) {
    const DoublingResult d = doubling_constant(ms, radii);
    j["doubling"] = Json{{"value", number(d.value)},
                         {"witness_point", d.witness_point},
                         {"witness_radius", number(d.witness_radius)}};
  }
  if (doc.contains("metadata")) j["metadata"] = doc.at("metadata");
  if (c.format == "csv") {
    std::ostringstream os;
    os << "eps,cov_lower,cov_upper,cap_lower,cap_upper\n";
    for (const auto& row : j["covering"])
      os << row["eps"].dump() << ',' << row["cov_lower"] << ',' << row["cov_upper"] << ',' << row["cap_lower"] << ','
         << row["cap_upper"] << '\n';
    emit(c, os.str(), out);
  } else {
    emit(c, dump(j), out);
  }
  return 0;
}

// --- dist ---------------------------------------------------------------------------

Json map_json(const gh::PointMap& f) { return Json(f.assignment); }

int cmd_dist(const std::string& kind, const std::vector<std::string>& files, std::optional<double> theta,
             std::optional<double> p, const std::string& a_list, const std::string& b_list, std::uint64_t limit,
             bool force_local, std::uint64_t seed, const Common& c, std::ostream& out) {
  gh::IsoDefectOptions iso;
  iso.seed = seed;
  iso.exhaustive_limit = limit;
  iso.force_local_search = force_local;
  auto need_files = [&](std::size_t k) {
    if (files.size() != k) throw ParseError("dist " + kind + " expects " + std::to_string(k) + " input file(s)");
  };
  Json j;
  j["kind"] = kind;
  if (kind == "gh" || kind == "ghp") {
    need_files(2);
    if (!theta) throw ParseError("dist " + kind + " requires --theta");
    const Json dx = io::load_document(files[0]);
    const Json dy = io::load_document(files[1]);
    if (kind == "gh") {
      const gh::GhBracket br = gh::gh_bracket(io::space_from_json(dx), io::space_from_json(dy), *theta, iso);
      j["lower"] = number(br.lower);
      j["upper"] = number(br.upper);
      j["theta"] = number(br.theta);
      j["heuristic"] = br.heuristic;
      j["witness_from_x"] = br.witness_from_x;
      j["witness_map"] = map_json(br.witness_map);
    } else {
      const gh::GhpResult r = gh::ghp_upper(io::measured_from_json(dx), io::measured_from_json(dy), *theta, iso);
      j["upper"] = number(r.upper);
      j["hausdorff"] = number(r.hausdorff);
      j["prokhorov"] = number(r.prokhorov);
      j["map_defect"] = number(r.map_defect);
      j["glued_reversibility"] = number(r.glued_reversibility);
      j["heuristic"] = r.heuristic;
      j["map"] = map_json(r.map);
    }
  } else if (kind == "hausdorff") {
    need_files(1);
    const QuasiMetricSpace space = io::space_from_json(io::load_document(files[0]));
    auto indices = [](const std::string& s) {
      IndexSet out;
      for (double v : parse_list(s)) {
        if (v < 0 || v != std::floor(v)) throw ParseError("index lists hold nonnegative integers");
        out.push_back(static_cast<Index>(v));
      }
      return out;
    };
    const IndexSet a = indices(a_list), b = indices(b_list);
    if (a.empty() || b.empty()) throw ParseError("dist hausdorff requires --a and --b");
    const gh::HausdorffResult h = gh::hausdorff(space, a, b);
    j["value"] = number(h.value);
    j["a_into_b"] = number(h.a_into_b);
    j["b_into_a"] = number(h.b_into_a);
  } else if (kind == "prokhorov") {
    need_files(1);
    const transport::TransportProblem prob = io::problem_from_json(io::load_document(files[0]));
    j["value"] = number(gh::prokhorov(prob.space, prob.mu, prob.nu));
  } else if (kind == "w") {
    need_files(1);
    transport::TransportProblem prob = io::problem_from_json(io::load_document(files[0]));
    if (p) prob.p = *p;
    const transport::WassersteinResult w = transport::wasserstein(prob);
    if (c.format == "csv") {
      std::ostringstream os;
      os << "from,to,mass\n";
      for (const auto& e : w.coupling.entries) os << e.from << ',' << e.to << ',' << number(e.mass).dump() << '\n';
      emit(c, os.str(), out);
      return 0;
    }
    j["p"] = number(prob.p);
    j["value"] = number(w.value);
    j["cost"] = number(w.cost);
    j["dual_value"] = number(w.dual_value);
    j["pivots"] = w.pivots;
    j["plan"] = io::to_json(w.coupling);
  } else {
    throw ParseError("unknown distance kind " + kind);
  }
  if (c.format == "csv") {
    std::ostringstream os;
    std::vector<std::string> keys;
    for (auto it = j.begin(); it != j.end(); ++it)
      if (!it->is_array()) keys.push_back(it.key());
    for (std::size_t k = 0; k < keys.size(); ++k) os << (k ? "," : "") << keys[k];
    os << '\n';
    for (std::size_t k = 0; k < keys.size(); ++k) {
      const Json& v = j[keys[k]];
      os << (k ? "," : "") << (v.is_string() ? v.get<std::string>() : v.dump());
    }
    os << '\n';
    emit(c, os.str(), out);
  } else {
    emit(c, dump(j), out);
  }
  return 0;
}

// --- cd-check / ineq ------------------------------------------------------------------

struct CdArgs {
  std::string file;
  double K = 0.0;
  std::string N = "inf";
  std::string U = "entropy";
  std::string ts = "0.25,0.5,0.75";
  double pitch = 0.0;
  double slack_factor = 5.0;
  std::optional<double> hop_radius;
  double chain_rel = 0.5;
};

int cmd_cd(const CdArgs& a, const Common& c, std::ostream& out) {
  const std::vector<double> ts = parse_list(a.ts);
  if (ts.empty()) throw ParseError("empty --t list");
  for (double t : ts)
    if (!(t >= 0.0 && t <= 1.0)) throw ParseError("--t values must lie in [0, 1]");
  const double N = parse_real(a.N);
  const cd::Nonlinearity u = cd::Nonlinearity::parse(a.U);
  const Json doc = io::load_document(a.file);
  const MeasuredSpace ms = io::measured_from_json(doc);
  const auto mu0 = first_field(doc, {"mu0", "mu"});
  const auto mu1 = first_field(doc, {"mu1", "nu"});
  if (!mu0 || !mu1) throw ParseError("cd-check needs \"mu0\"/\"mu1\" (or \"mu\"/\"nu\") in the input");
  double pitch = a.pitch;
  if (pitch <= 0 && doc.contains("metadata") && doc["metadata"].contains("pitch"))
    pitch = io::to_double(doc["metadata"]["pitch"]);
  cd::CdOptions opts;
  opts.pitch = pitch;
  opts.slack_factor = a.slack_factor;
  opts.hop_radius = a.hop_radius;
  opts.chain_tol.rel = a.chain_rel;
  const auto reports = cd::cd_check(ms, *mu0, *mu1, a.K, N, u, ts, opts);
  if (c.format == "csv" && reports.size() == ts.size() && reports.front().name != "diameter") {
    std::ostringstream os;
    os << "t,lhs,rhs,slack,tolerance,pass,verdict\n";
    for (std::size_t k = 0; k < ts.size(); ++k) {
      const auto& r = reports[k];
      os << number(ts[k]).dump() << ',' << number(r.lhs).dump() << ',' << number(r.rhs).dump() << ','
         << number(r.slack).dump() << ',' << number(r.tolerance).dump() << ',' << (r.pass ? "true" : "false") << ','
         << cd::verdict_name(r.verdict) << '\n';
    }
    emit(c, os.str(), out);
  } else if (c.format == "csv") {
    emit(c, io::reports_csv(reports), out);
  } else {
    emit(c, dump(reports_json(reports)), out);
  }
  return all_pass(reports) ? 0 : 1;
}

struct IneqArgs {
  std::string file;
  double K = 1.0;
  std::string N = "inf";
  bool hwi = false, log_sobolev = false, poincare = false, lichnerowicz = false;
  std::string doubling;
  double pitch = 0.0;
  std::optional<double> neighbor_radius;
  double relative_tol = 0.10;
};

int cmd_ineq(const IneqArgs& a, const Common& c, std::ostream& out, std::ostream& err) {
  const double N = parse_real(a.N);
  const bool any = a.hwi || a.log_sobolev || a.poincare || a.lichnerowicz || !a.doubling.empty();
  const bool want_entropy = !any || a.hwi || a.log_sobolev;
  const bool want_f = !any || a.poincare || a.lichnerowicz;
  if ((a.poincare || a.lichnerowicz) && !(a.K > 0)) throw ParseError("--poincare and --lichnerowicz need K > 0");
  if (a.log_sobolev && !(a.K > 0)) throw ParseError("--log-sobolev needs K > 0");

  const Json doc = io::load_document(a.file);
  const MeasuredSpace ms = io::measured_from_json(doc);
  cd::SuiteInput in;
  if (want_entropy) {
    in.mu0 = first_field(doc, {"mu0", "mu"});
    in.mu1 = first_field(doc, {"mu1"});
    if (any && !in.mu0) throw ParseError("the input has no \"mu0\" for the entropy inequalities");
  }
  if (want_f && a.K > 0) {
    in.f = first_field(doc, {"f"});
    if (any && !in.f) throw ParseError("the input has no \"f\" for the spectral inequalities");
  }
  in.doubling_radii = parse_list(a.doubling);
  cd::SuiteOptions opts;
  opts.pitch = a.pitch;
  if (opts.pitch <= 0 && doc.contains("metadata") && doc["metadata"].contains("pitch"))
    opts.pitch = io::to_double(doc["metadata"]["pitch"]);
  opts.neighbor_radius = a.neighbor_radius;
  opts.relative_tol = a.relative_tol;

  auto reports = cd::functional_inequality_suite(ms, a.K, N, in, opts);
  if (any) {
    std::erase_if(reports, [&](const cd::FunctionalReport& r) {
      if (r.name == "diameter") return false;
      if (r.name == "hwi") return !a.hwi;
      if (r.name == "log-sobolev") return !a.log_sobolev;
      if (r.name == "poincare") return !a.poincare;
      if (r.name == "lichnerowicz") return !a.lichnerowicz;
      if (r.name == "doubling") return a.doubling.empty();
      return false;
    });
  }
  for (const auto& r : reports)
    if (r.note.find("centred") != std::string::npos) {
      err << "warning: " << r.note << '\n';
      break;
    }
  emit(c, c.format == "csv" ? io::reports_csv(reports) : dump(reports_json(reports)), out);
  return all_pass(reports) ? 0 : 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Finite quasi-metric measure spaces: models, distances and curvature checks", "qms"};
  app.require_subcommand(1);
  Common common;
  std::uint64_t seed = 0;
  try {
    seed = default_seed();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--format", common.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("-o,--output", common.output, "write to this file instead of stdout");
  };

  GenArgs g;
  auto* gen = app.add_subcommand("gen", "sample a model space");
  gen->add_option("model", g.model, "funk | randers-torus | randers-ball | box | gaussian")
      ->required()
      ->check(CLI::IsMember({"funk", "randers-torus", "randers-ball", "box", "gaussian"}));
  gen->add_option("--dim", g.dim);
  gen->add_option("--b", g.b, "Randers torus drift");
  gen->add_option("--drift", g.drift, "Randers ball drift vector")->delimiter(',');
  gen->add_option("--member", g.member, "Randers ball family member i (drift e/(i^2+1))");
  gen->add_option("--side", g.side);
  gen->add_option("--grid", g.grid, "grid pitch");
  gen->add_option("--shells", g.shells);
  gen->add_option("--directions", g.directions);
  gen->add_option("--uniform", g.uniform, "seeded uniform sample size");
  gen->add_option("--clip-r", g.clip_r, "restrict to the closed forward ball of this radius");
  gen->add_option("--max-norm", g.max_norm);
  gen->add_option("--weights", g.weights)->check(CLI::IsMember({"lebesgue", "uniform"}));
  gen->add_flag("--normalize", g.normalize);
  gen->add_option("--K", g.K, "gaussian curvature parameter");
  gen->add_option("--half-width", g.half_width);
  gen->add_option("--seed", seed);
  add_common(gen);

  std::string vfile;
  double vtol = kUserTolerance;
  auto* val = app.add_subcommand("validate", "check the quasi-metric axioms");
  val->add_option("file", vfile)->required();
  val->add_option("--tol", vtol);
  add_common(val);

  std::string rfile, reps, rradii;
  auto* rep = app.add_subcommand("report", "summary statistics of a space");
  rep->add_option("file", rfile)->required();
  rep->add_option("--eps", reps, "comma-separated covering radii");
  rep->add_option("--doubling", rradii, "comma-separated doubling radii");
  add_common(rep);

  std::string dkind, alist, blist;
  std::vector<std::string> dfiles;
  std::optional<double> theta, p;
  std::uint64_t limit = 1'000'000;
  bool force_local = false;
  auto* dist = app.add_subcommand("dist", "distances between spaces or measures");
  dist->add_option("kind", dkind, "gh | hausdorff | prokhorov | ghp | w")
      ->required()
      ->check(CLI::IsMember({"gh", "hausdorff", "prokhorov", "ghp", "w"}));
  dist->add_option("files", dfiles)->required();
  dist->add_option("--theta", theta);
  dist->add_option("-p", p, "transport exponent, overrides the file");
  dist->add_option("--a", alist, "comma-separated indices");
  dist->add_option("--b", blist, "comma-separated indices");
  dist->add_option("--exhaustive-limit", limit);
  dist->add_flag("--local-search", force_local);
  dist->add_option("--seed", seed);
  add_common(dist);

  CdArgs ca;
  auto* cdc = app.add_subcommand("cd-check", "displacement convexity along the optimal plan");
  cdc->add_option("file", ca.file)->required();
  cdc->add_option("--K", ca.K);
  cdc->add_option("--N", ca.N, "dimension bound, inf allowed");
  cdc->add_option("--U", ca.U, "entropy | un:N | power:m");
  cdc->add_option("--t", ca.ts, "comma-separated times in [0, 1]");
  cdc->add_option("--pitch", ca.pitch);
  cdc->add_option("--slack-factor", ca.slack_factor);
  cdc->add_option("--hop-radius", ca.hop_radius);
  cdc->add_option("--chain-rel", ca.chain_rel);
  add_common(cdc);

  IneqArgs ia;
  auto* ineq = app.add_subcommand("ineq", "functional inequalities");
  ineq->add_option("file", ia.file)->required();
  ineq->add_option("--K", ia.K);
  ineq->add_option("--N", ia.N);
  ineq->add_flag("--hwi", ia.hwi);
  ineq->add_flag("--log-sobolev", ia.log_sobolev);
  ineq->add_flag("--poincare", ia.poincare);
  ineq->add_flag("--lichnerowicz", ia.lichnerowicz);
  ineq->add_option("--doubling", ia.doubling, "comma-separated radii");
  ineq->add_option("--pitch", ia.pitch);
  ineq->add_option("--neighbor-radius", ia.neighbor_radius);
  ineq->add_option("--relative-tol", ia.relative_tol);
  add_common(ineq);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (*gen) return cmd_gen(g, seed, common, out);
    if (*val) return cmd_validate(vfile, vtol, common, out);
    if (*rep) return cmd_report(rfile, parse_list(reps), parse_list(rradii), common, out);
    if (*dist) return cmd_dist(dkind, dfiles, theta, p, alist, blist, limit, force_local, seed, common, out);
    if (*cdc) return cmd_cd(ca, common, out);
    if (*ineq) return cmd_ineq(ia, common, out, err);
  } catch (const ComputationError& e) {
    err << "computation failed: " << e.what() << '\n';
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const nlohmann::json::exception& e) {
    err << "error: malformed input: " << e.what() << '\n';
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}

}  // namespace qms
