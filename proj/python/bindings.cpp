#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qms/cd.hpp"
#include "qms/error.hpp"
#include "qms/gh.hpp"
#include "qms/models.hpp"
#include "qms/space.hpp"
#include "qms/transport.hpp"

namespace py = pybind11;
using namespace qms;

namespace {

using Rows = std::vector<std::vector<double>>;

QuasiMetricSpace space_from_rows(const Rows& rows, std::vector<std::string> labels, Rows coords) {
  Matrix m(rows.size(), rows.empty() ? 0 : rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != m.cols()) throw StructureError("distance rows have different lengths");
    for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
  }
  return QuasiMetricSpace(std::move(m), std::move(labels), std::move(coords));
}

Rows rows_of(const QuasiMetricSpace& s) {
  Rows out(s.size(), std::vector<double>(s.size()));
  for (Index i = 0; i < s.size(); ++i)
    for (Index j = 0; j < s.size(); ++j) out[i][j] = s(i, j);
  return out;
}

py::list plan_list(const transport::Coupling& c) {
  py::list out;
  for (const auto& e : c.entries) out.append(py::make_tuple(e.from, e.to, e.mass));
  return out;
}

py::dict report_dict(const cd::FunctionalReport& r) {
  py::dict d;
  d["name"] = r.name;
  d["lhs"] = r.lhs;
  d["rhs"] = r.rhs;
  d["slack"] = r.slack;
  d["tolerance"] = r.tolerance;
  d["pass"] = r.pass;
  d["verdict"] = cd::verdict_name(r.verdict);
  d["note"] = r.note;
  return d;
}

py::list report_list(const std::vector<cd::FunctionalReport>& reps) {
  py::list out;
  for (const auto& r : reps) out.append(report_dict(r));
  return out;
}

models::WeightModel weight_model(const std::string& name) {
  if (name == "lebesgue") return models::WeightModel::lebesgue;
  if (name == "uniform") return models::WeightModel::uniform;
  throw DomainError("weights must be 'lebesgue' or 'uniform', got '" + name + "'");
}

}  // namespace

PYBIND11_MODULE(_qms, m) {
  m.doc() = "Finite quasi-metric measure spaces: distances, optimal transport and curvature-dimension checks.";

  auto base = py::register_exception<Error>(m, "Error", PyExc_ValueError);
  py::register_exception<StructureError>(m, "StructureError", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<ComputationError>(m, "ComputationError", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());

  py::class_<QuasiMetricSpace>(m, "QuasiMetricSpace")
      .def(py::init(&space_from_rows), py::arg("dist"), py::arg("labels") = std::vector<std::string>{},
           py::arg("coords") = Rows{})
      .def("__len__", &QuasiMetricSpace::size)
      .def("__call__", [](const QuasiMetricSpace& s, Index i, Index j) {
        if (i >= s.size() || j >= s.size()) throw py::index_error("point index out of range");
        return s(i, j);
      })
      .def("dist", &rows_of)
      .def_property_readonly("labels", &QuasiMetricSpace::labels)
      .def_property_readonly("coords", &QuasiMetricSpace::coords);

  py::class_<MeasuredSpace>(m, "MeasuredSpace")
      .def(py::init<QuasiMetricSpace, std::vector<double>, std::optional<Index>>(), py::arg("space"),
           py::arg("weights"), py::arg("basepoint") = std::nullopt)
      .def_readonly("space", &MeasuredSpace::space)
      .def_readonly("weights", &MeasuredSpace::weights)
      .def_readonly("basepoint", &MeasuredSpace::basepoint)
      .def("__len__", &MeasuredSpace::size)
      .def("total_mass", &MeasuredSpace::total_mass)
      .def("normalized", &MeasuredSpace::normalized);

  m.def(
      "validate",
      [](const QuasiMetricSpace& s, double tol) {
        const auto r = validate(s, tol);
        py::dict d;
        d["valid"] = r.valid;
        d["triangle_violations"] = r.triangle_count;
        py::list tri;
        for (const auto& t : r.triangle) tri.append(py::make_tuple(t.i, t.j, t.k));
        d["triangle_examples"] = tri;
        d["zero_off_diagonal"] = r.zero_off_diagonal;
        d["negative"] = r.negative;
        d["nonzero_diagonal"] = r.nonzero_diagonal;
        return d;
      },
      py::arg("space"), py::arg("tol") = kUserTolerance);
  m.def("reversibility", py::overload_cast<const QuasiMetricSpace&>(&reversibility));
  m.def("symmetrize", &symmetrize);
  m.def("diameter", py::overload_cast<const QuasiMetricSpace&>(&diameter));

  // models
  py::class_<models::FunkBall>(m, "FunkBall").def(py::init<int>(), py::arg("dim") = 2);
  py::class_<models::RandersTorus>(m, "RandersTorus")
      .def(py::init([](int dim, double b) { return models::RandersTorus{dim, b}; }), py::arg("dim") = 2,
           py::arg("b") = 0.0);
  py::class_<models::RandersBall>(m, "RandersBall")
      .def(py::init([](std::vector<double> drift) { return models::RandersBall{std::move(drift)}; }),
           py::arg("drift"));
  py::class_<models::EuclideanBox>(m, "EuclideanBox")
      .def(py::init([](int dim, double side) { return models::EuclideanBox{dim, side}; }), py::arg("dim") = 1,
           py::arg("side") = 1.0);

  m.def(
      "sample",
      [](const models::Model& model, std::optional<double> grid, std::optional<std::size_t> shells,
         std::size_t directions, std::optional<std::size_t> uniform, std::uint64_t seed,
         std::optional<double> clip_radius, std::optional<double> max_norm, const std::string& weights,
         bool normalize) {
        models::SampleSpec spec;
        const int chosen = (grid ? 1 : 0) + (shells ? 1 : 0) + (uniform ? 1 : 0);
        if (chosen != 1) throw DomainError("give exactly one of grid, shells, uniform");
        if (grid) {
          spec.strategy = models::SampleStrategy::grid;
          spec.pitch = *grid;
        } else if (shells) {
          spec.strategy = models::SampleStrategy::radial_shells;
          spec.shells = *shells;
          spec.directions = directions;
        } else {
          spec.strategy = models::SampleStrategy::seeded_uniform;
          spec.count = *uniform;
        }
        spec.seed = seed;
        spec.clip_radius = clip_radius;
        spec.max_norm = max_norm;
        return models::sample(model, spec, weight_model(weights), normalize);
      },
      py::arg("model"), py::kw_only(), py::arg("grid") = std::nullopt, py::arg("shells") = std::nullopt,
      py::arg("directions") = 16, py::arg("uniform") = std::nullopt, py::arg("seed") = 0,
      py::arg("clip_radius") = std::nullopt, py::arg("max_norm") = std::nullopt, py::arg("weights") = "lebesgue",
      py::arg("normalize") = false);
  m.def("gaussian_line", &models::gaussian_line, py::arg("K"), py::arg("half_width"), py::arg("pitch"));
  m.def("funk_distance", [](std::vector<double> x, std::vector<double> y) { return models::funk_distance(x, y); });
  m.def("randers_torus_distance", [](const models::RandersTorus& t, std::vector<double> p, std::vector<double> q) {
    return models::randers_torus_distance(t, p, q);
  });

  // transport
  m.def(
      "wasserstein",
      [](const QuasiMetricSpace& s, std::vector<double> mu, std::vector<double> nu, double p) {
        const auto w = transport::wasserstein({s, std::move(mu), std::move(nu), p});
        py::dict d;
        d["value"] = w.value;
        d["cost"] = w.cost;
        d["dual_value"] = w.dual_value;
        d["plan"] = plan_list(w.coupling);
        return d;
      },
      py::arg("space"), py::arg("mu"), py::arg("nu"), py::arg("p") = 1.0);

  // Gromov-Hausdorff
  m.def("prokhorov", [](const QuasiMetricSpace& s, std::vector<double> mu, std::vector<double> nu) {
    return gh::prokhorov(s, mu, nu);
  });
  m.def(
      "hausdorff",
      [](const QuasiMetricSpace& s, std::vector<Index> a, std::vector<Index> b) { return gh::hausdorff(s, a, b).value; },
      py::arg("space"), py::arg("a"), py::arg("b"));
  m.def(
      "iso_defect",
      [](const QuasiMetricSpace& x, const QuasiMetricSpace& y, bool local_search, std::uint64_t seed) {
        gh::IsoDefectOptions opts;
        opts.force_local_search = local_search;
        opts.seed = seed;
        const auto r = gh::iso_defect(x, y, opts);
        return py::make_tuple(r.value, r.map.assignment, r.heuristic);
      },
      py::arg("x"), py::arg("y"), py::arg("local_search") = false, py::arg("seed") = 0);
  m.def(
      "gh_bracket",
      [](const QuasiMetricSpace& x, const QuasiMetricSpace& y, double theta) {
        const auto r = gh::gh_bracket(x, y, theta);
        py::dict d;
        d["lower"] = r.lower;
        d["upper"] = r.upper;
        d["theta"] = r.theta;
        d["heuristic"] = r.heuristic;
        return d;
      },
      py::arg("x"), py::arg("y"), py::arg("theta"));
  m.def(
      "ghp_upper",
      [](const MeasuredSpace& x, const MeasuredSpace& y, double theta) {
        const auto r = gh::ghp_upper(x, y, theta);
        py::dict d;
        d["upper"] = r.upper;
        d["hausdorff"] = r.hausdorff;
        d["prokhorov"] = r.prokhorov;
        d["map_defect"] = r.map_defect;
        return d;
      },
      py::arg("x"), py::arg("y"), py::arg("theta"));

  // curvature-dimension
  m.def(
      "beta", [](double K, double N, double t, double d) { return cd::beta({K, N, t}, d); }, py::arg("K"),
      py::arg("N"), py::arg("t"), py::arg("d"));
  m.def(
      "cd_check",
      [](const MeasuredSpace& ms, std::vector<double> mu0, std::vector<double> mu1, double K, double N,
         const std::string& U, std::vector<double> ts, double pitch) {
        cd::CdOptions opts;
        opts.pitch = pitch;
        return report_list(cd::cd_check(ms, mu0, mu1, K, N, cd::Nonlinearity::parse(U), ts, opts));
      },
      py::arg("space"), py::arg("mu0"), py::arg("mu1"), py::arg("K"), py::arg("N"), py::arg("U") = "entropy",
      py::arg("ts") = std::vector<double>{0.25, 0.5, 0.75}, py::arg("pitch") = 0.0);
  m.def(
      "functional_inequality_suite",
      [](const MeasuredSpace& ms, double K, double N, std::optional<std::vector<double>> mu0,
         std::optional<std::vector<double>> mu1, std::optional<std::vector<double>> f,
         std::vector<double> doubling_radii, double pitch) {
        cd::SuiteInput in{std::move(mu0), std::move(mu1), std::move(f), std::move(doubling_radii)};
        cd::SuiteOptions opts;
        opts.pitch = pitch;
        return report_list(cd::functional_inequality_suite(ms, K, N, in, opts));
      },
      py::arg("space"), py::arg("K"), py::arg("N") = cd::kInfiniteN, py::arg("mu0") = std::nullopt,
      py::arg("mu1") = std::nullopt, py::arg("f") = std::nullopt,
      py::arg("doubling_radii") = std::vector<double>{}, py::arg("pitch") = 0.0);
}
