#include <optional>
#include <string>

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "rbfpu/bench.hpp"
#include "rbfpu/errors.hpp"
#include "rbfpu/loocv.hpp"
#include "rbfpu/model_io.hpp"
#include "rbfpu/optimizer.hpp"
#include "rbfpu/pu.hpp"

namespace py = pybind11;
using namespace rbfpu;

namespace {

KernelFamily family_arg(const std::string& s) { return parse_kernel_family(s); }

BoxDomain domain_arg(const std::optional<std::pair<Point, Point>>& d, Index dim) {
  if (!d) return BoxDomain::unit(dim);
  return BoxDomain{d->first, d->second};
}

LabeledPointSet data_arg(const PointMatrix& points, const Eigen::VectorXd& values) {
  return LabeledPointSet{points, values};
}

LoocvSettings loocv_settings(double overlap_factor, double eps_min, double fill_ratio, int max_iterations,
                             double x_tolerance, double f_tolerance) {
  LoocvSettings s;
  s.overlap_factor = overlap_factor;
  s.eps_min = eps_min;
  s.fill_ratio = fill_ratio;
  s.nm.max_iterations = max_iterations;
  s.nm.x_tolerance = x_tolerance;
  s.nm.f_tolerance = f_tolerance;
  return s;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Partition-of-unity RBF interpolation with LOOCV-optimized ellipsoidal patches";

  auto numerical = py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);
  py::register_exception<NotNumericallyPD>(m, "NotNumericallyPD", numerical.ptr());
  py::register_exception<CoveringError>(m, "CoveringError", numerical.ptr());
  py::register_exception<CoverageError>(m, "CoverageError", numerical.ptr());
  auto validation = py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", validation.ptr());
  py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);

  // Kernels and local systems.
  m.def(
      "phi", [](const std::string& family, double s) { return base_phi(family_arg(family), s); }, py::arg("family"),
      py::arg("s"));
  m.def(
      "kernel_matrix",
      [](const std::string& family, const Point& eps, const PointMatrix& points) {
        return kernel_matrix(family_arg(family), AnisotropicScale(eps), points);
      },
      py::arg("family"), py::arg("eps"), py::arg("points"));
  m.def(
      "rippa_loocv", [](const Eigen::MatrixXd& a, const Eigen::VectorXd& f) { return rippa_loocv(a, f); },
      py::arg("a"), py::arg("f"));
  m.def(
      "brute_force_loocv",
      [](const PointMatrix& points, const Eigen::VectorXd& values, const std::string& family, const Point& eps) {
        return brute_force_loocv(points, values, family_arg(family), AnisotropicScale(eps));
      },
      py::arg("points"), py::arg("values"), py::arg("family"), py::arg("eps"));

  m.def(
      "nelder_mead",
      [](const std::function<double(const Eigen::VectorXd&)>& fun, const Eigen::VectorXd& x0,
         std::optional<Eigen::VectorXd> lower, std::optional<Eigen::VectorXd> upper, int max_iterations,
         double x_tolerance, double f_tolerance) {
        BoxBounds b = BoxBounds::unbounded(x0.size());
        if (lower) b.lower = *lower;
        if (upper) b.upper = *upper;
        NmOptions opts;
        opts.max_iterations = max_iterations;
        opts.x_tolerance = x_tolerance;
        opts.f_tolerance = f_tolerance;
        const NmResult r = nelder_mead(fun, x0, b, opts);
        py::dict out;
        out["x"] = r.x;
        out["f"] = r.f;
        out["iterations"] = r.iterations;
        out["evaluations"] = r.evaluations;
        out["converged"] = r.converged;
        out["best_trace"] = r.best_trace;
        return out;
      },
      py::arg("fun"), py::arg("x0"), py::arg("lower") = py::none(), py::arg("upper") = py::none(),
      py::arg("max_iterations") = 0, py::arg("x_tolerance") = 1e-3, py::arg("f_tolerance") = 1e-6);

  // Data.
  m.def(
      "gen_tracks",
      [](Index tracks, Index per_track, std::optional<double> jitter, std::uint64_t seed) {
        TrackSpec spec = TrackSpec::with_default_jitter(tracks, per_track, seed);
        if (jitter) spec.jitter = *jitter;
        return gen_tracks(spec, BoxDomain::unit(2));
      },
      py::arg("tracks"), py::arg("per_track"), py::arg("jitter") = py::none(), py::arg("seed") = 1);
  m.def(
      "sample",
      [](const std::string& function, const PointMatrix& points) {
        return sample(parse_test_function(function), points);
      },
      py::arg("function"), py::arg("points"));
  m.def(
      "eval_grid", [](Index n, Index dim) { return eval_grid(BoxDomain::unit(dim), n); }, py::arg("n") = 40,
      py::arg("dim") = 2);
  m.def("rmse", &rmse, py::arg("pred"), py::arg("truth"));
  m.def("mae", &mae, py::arg("pred"), py::arg("truth"));

  // Models.
  py::class_<PatchModel>(m, "Patch")
      .def_property_readonly("center", [](const PatchModel& p) { return p.ellipsoid.center; })
      .def_property_readonly("semi_axes", [](const PatchModel& p) { return p.ellipsoid.semi_axes; })
      .def_property_readonly("eps", [](const PatchModel& p) { return p.scale.values(); })
      .def_readonly("node_indices", &PatchModel::node_indices)
      .def_readonly("coefficients", &PatchModel::coefficients)
      .def_readonly("loocv_error", &PatchModel::loocv_error)
      .def_readonly("rcond", &PatchModel::rcond)
      .def_readonly("optimizer_iterations", &PatchModel::optimizer_iterations)
      .def_property_readonly("n_points", &PatchModel::n_points);

  py::class_<PUModel>(m, "PUModel")
      .def_property_readonly("family", [](const PUModel& pu) { return std::string(to_string(pu.family())); })
      .def_property_readonly("mode", [](const PUModel& pu) { return std::string(to_string(pu.mode())); })
      .def_property_readonly("delta_star", &PUModel::delta_star)
      .def_property_readonly("delta_plus", &PUModel::delta_plus)
      .def_property_readonly("patches", &PUModel::patches, py::return_value_policy::reference_internal)
      .def_property_readonly("mean_points", [](const PUModel& pu) { return patch_stats(pu).mean_points; })
      .def(
          "evaluate", [](const PUModel& pu, const PointMatrix& x) { return evaluate(pu, x); }, py::arg("points"),
          py::call_guard<py::gil_scoped_release>())
      .def(
          "weights",
          [](const PUModel& pu, const Point& x) {
            const ShepardWeights w = shepard_weights(pu, x);
            return std::make_pair(w.patches, w.weights);
          },
          py::arg("x"))
      .def("save", [](const PUModel& pu, const std::filesystem::path& path) { save_model(pu, path); },
           py::arg("path"))
      .def_static("load", &load_model, py::arg("path"));

  m.def(
      "fit_classic",
      [](const PointMatrix& points, const Eigen::VectorXd& values, Index t, const std::string& family, double eps,
         double radius_factor, std::optional<std::pair<Point, Point>> domain) {
        const LabeledPointSet data = data_arg(points, values);
        py::gil_scoped_release release;
        return fit_classic(data, domain_arg(domain, points.cols()), t, family_arg(family), eps, radius_factor);
      },
      py::arg("points"), py::arg("values"), py::arg("t"), py::arg("family") = "imq", py::arg("eps") = 1.0,
      py::arg("radius_factor") = 1.0, py::arg("domain") = py::none());

  m.def(
      "fit_loocv",
      [](const PointMatrix& points, const Eigen::VectorXd& values, Index t, const std::string& family,
         double overlap_factor, double eps_min, double fill_ratio, int max_iterations, double x_tolerance,
         double f_tolerance, std::optional<std::pair<Point, Point>> domain) {
        const LabeledPointSet data = data_arg(points, values);
        const LoocvSettings s =
            loocv_settings(overlap_factor, eps_min, fill_ratio, max_iterations, x_tolerance, f_tolerance);
        py::gil_scoped_release release;
        return fit_loocv(data, domain_arg(domain, points.cols()), t, family_arg(family), s);
      },
      py::arg("points"), py::arg("values"), py::arg("t"), py::arg("family") = "imq", py::arg("overlap_factor") = 3.0,
      py::arg("eps_min") = kEpsMin, py::arg("fill_ratio") = 1.0, py::arg("max_iterations") = 0,
      py::arg("x_tolerance") = 1e-3, py::arg("f_tolerance") = 1e-6, py::arg("domain") = py::none());

  m.def(
      "bench_row",
      [](Index tracks, Index per_track, const std::string& family, const std::string& function, std::uint64_t seed,
         double classic_eps, double classic_radius_factor) {
        BenchSettings s;
        s.family = family_arg(family);
        s.function = parse_test_function(function);
        s.seed = seed;
        s.classic_eps = classic_eps;
        s.classic_radius_factor = classic_radius_factor;
        BenchRow row;
        {
          py::gil_scoped_release release;
          row = run_bench_row({tracks, per_track}, s);
        }
        return py::module_::import("json").attr("loads")(bench_row_to_json(row).dump());
      },
      py::arg("tracks"), py::arg("per_track"), py::arg("family") = "imq", py::arg("function") = "franke",
      py::arg("seed") = 1, py::arg("classic_eps") = 1.0, py::arg("classic_radius_factor") = 1.0);
}
