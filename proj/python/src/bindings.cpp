#include "steincmp/harness.hpp"
#include "steincmp/oracles.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace steincmp;

namespace {

SteinGram as_gram(const Matrix& h) {
  if (h.rows() != h.cols()) throw std::invalid_argument("gram must be square");
  SteinGram g;
  g.h = h;
  g.diag_valid = true;
  return g;
}

py::dict report_dict(const TestReport& r) {
  py::dict d;
  d["n"] = r.n;
  d["alpha"] = r.alpha;
  d["variance_method"] = to_string(r.variance_method);
  d["u_diff"] = r.u_diff;
  d["sigma"] = r.sigma;
  d["sigma_sq_raw"] = r.sigma_sq_raw;
  d["statistic"] = r.statistic;
  d["threshold"] = r.threshold;
  d["reject"] = r.reject;
  d["degenerate"] = r.degenerate;
  d["p_value"] = r.p_value;
  return d;
}

Vector vec(Point p) { return Eigen::Map<const Vector>(p.data(), static_cast<Eigen::Index>(p.size())); }
Point pt(const Vector& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

// Stein gram of a model (given as JSON text) on a data matrix, using the default kernel
// unless a bandwidth is given.
Matrix model_gram(const std::string& model_json, const RowMatrix& data, int m, int t,
                  std::uint64_t seed, double bandwidth, bool ppca_exact) {
  const AnyModel model = model_from_json(nlohmann::json::parse(model_json));
  int vocab = 0;
  if (const auto* lda = std::get_if<LdaModel>(&model)) vocab = lda->vocab_size();
  const Dataset ds(data, vocab);
  const KernelSpec kernel = bandwidth > 0.0 && !ds.discrete()
                                ? KernelSpec::gaussian_sq(Bandwidth(bandwidth))
                                : default_kernel(ds);
  const auto latents = draw_latents(model, ds, SamplerSettings{m, t, ppca_exact}, seed);
  return stein_gram(average_scores(score_function(model, ds), ds, latents), ds, kernel).h;
}

}  // namespace

PYBIND11_MODULE(_steincmp, mod) {
  mod.doc() = "Relative kernel Stein tests for latent-variable models";

  py::register_exception<ConfigError>(mod, "ConfigError", PyExc_ValueError);

  mod.def("normal_quantile", &normal_quantile, py::arg("p"));

  mod.def("ksd_ustat", [](const Matrix& h) { return ksd_ustat(as_gram(h)).u_stat; }, py::arg("gram"));
  mod.def(
      "variance",
      [](const Matrix& h, const std::string& method) {
        const VarianceEstimate v = estimate_variance(as_gram(h), variance_method_from_string(method));
        return py::make_tuple(v.sigma_sq, v.a, v.b, v.c);
      },
      py::arg("gram"), py::arg("method") = "vstat",
      "Returns (sigma_sq, a, b, c) for method 'ustat' or 'vstat'.");

  mod.def(
      "relative_test",
      [](const Matrix& gram_p, const Matrix& gram_q, double alpha, const std::string& method) {
        return report_dict(relative_test(as_gram(gram_p), as_gram(gram_q),
                                         TestConfig{alpha, variance_method_from_string(method)}));
      },
      py::arg("gram_p"), py::arg("gram_q"), py::arg("alpha") = 0.05, py::arg("variance") = "vstat");

  mod.def(
      "kernel",
      [](const std::string& kind, const Vector& x, const Vector& y, double lambda, int vocab) {
        const KernelKind k = kernel_kind_from_string(kind);
        KernelSpec spec{k, lambda, vocab};
        if (k == KernelKind::GaussianSq || k == KernelKind::GaussianHalf) {
          spec = KernelSpec{k, Bandwidth(lambda).value(), 0};
        } else {
          spec = k == KernelKind::BoWGaussian ? KernelSpec::bow_gaussian(vocab) : KernelSpec::exp_hamming(vocab);
        }
        return eval(spec, pt(x), pt(y));
      },
      py::arg("kind"), py::arg("x"), py::arg("y"), py::arg("bandwidth") = 1.0, py::arg("vocab_size") = 0);

  mod.def(
      "gaussian_mmd_sq_diff",
      [](const Matrix& p, const Matrix& q, const Matrix& r, double lambda) {
        return gaussian_mmd_sq_diff(GaussianSpec(p), GaussianSpec(q), GaussianSpec(r), Bandwidth(lambda));
      },
      py::arg("cov_p"), py::arg("cov_q"), py::arg("cov_r"), py::arg("bandwidth"));

  py::class_<PpcaModel>(mod, "PpcaModel")
      .def(py::init<Matrix, double>(), py::arg("weights"), py::arg("psi"))
      .def_static("random_uniform", &PpcaModel::random_uniform, py::arg("data_dim"),
                  py::arg("latent_dim"), py::arg("psi"), py::arg("seed"))
      .def("perturb", &PpcaModel::perturb, py::arg("delta"))
      .def_property_readonly("weights", &PpcaModel::weights)
      .def_property_readonly("psi", &PpcaModel::psi)
      .def("marginal_cov", &PpcaModel::marginal_cov)
      .def("sample", [](const PpcaModel& m, Eigen::Index n, std::uint64_t seed) { return m.sample(n, seed).points; },
           py::arg("n"), py::arg("seed"))
      .def("cond_score", [](const PpcaModel& m, const Vector& x, const Vector& z) { return m.cond_score(pt(x), pt(z)); },
           py::arg("x"), py::arg("z"))
      .def("marginal_score", [](const PpcaModel& m, const Vector& x) { return m.marginal_score(pt(x)); },
           py::arg("x"))
      .def("posterior_exact",
           [](const PpcaModel& m, const Vector& x, Eigen::Index draws, std::uint64_t seed) {
             return m.posterior_exact(pt(x), draws, seed).draws;
           },
           py::arg("x"), py::arg("m"), py::arg("seed"))
      .def("to_json", [](const PpcaModel& m) { return model_to_json(m).dump(); });

  py::class_<LdaModel>(mod, "LdaModel")
      .def(py::init<Vector, Matrix>(), py::arg("concentration"), py::arg("topics"))
      .def_static("with_random_topics", &LdaModel::with_random_topics, py::arg("topics"),
                  py::arg("vocab_size"), py::arg("a0"), py::arg("seed"))
      .def("perturb", &LdaModel::perturb, py::arg("delta"))
      .def_property_readonly("concentration", &LdaModel::concentration)
      .def_property_readonly("topics", &LdaModel::topics)
      .def("sample",
           [](const LdaModel& m, Eigen::Index n, int words, std::uint64_t seed) { return m.sample(n, words, seed).points; },
           py::arg("n"), py::arg("words"), py::arg("seed"))
      .def("cond_score", [](const LdaModel& m, const Vector& x, const Vector& z) { return m.cond_score(pt(x), pt(z)); },
           py::arg("x"), py::arg("z"))
      .def("to_json", [](const LdaModel& m) { return model_to_json(m).dump(); });

  py::class_<GdpmModel>(mod, "GdpmModel")
      .def(py::init([](const Vector& mu, double phi_sq, std::optional<RowMatrix> training) {
             return GdpmModel(mu, phi_sq, std::move(training));
           }),
           py::arg("mu"), py::arg("phi_sq"), py::arg("training") = py::none())
      .def_property_readonly("mu", &GdpmModel::mu)
      .def_property_readonly("phi_sq", &GdpmModel::phi_sq)
      .def("marginal_sample",
           [](const GdpmModel& m, Eigen::Index n, std::uint64_t seed) { return m.marginal_sample(n, seed).points; },
           py::arg("n"), py::arg("seed"))
      .def("posterior_sampler",
           [](const GdpmModel& m, const Vector& x, Eigen::Index draws, int burn_in, std::uint64_t seed) {
             return m.posterior_sampler(pt(x), draws, burn_in, seed).draws;
           },
           py::arg("x"), py::arg("m"), py::arg("burn_in"), py::arg("seed"))
      .def("to_json", [](const GdpmModel& m) { return model_to_json(m).dump(); });

  mod.def("model_gram", &model_gram, py::arg("model_json"), py::arg("data"), py::arg("m") = 200,
          py::arg("t") = 100, py::arg("seed") = 1, py::arg("bandwidth") = 0.0, py::arg("ppca_exact") = false,
          "Stein gram of a JSON-described model on the rows of `data`.");

  mod.def(
      "run_experiment",
      [](const std::string& config_json) {
        const ExperimentConfig cfg = config_from_json(nlohmann::json::parse(config_json));
        py::gil_scoped_release release;
        const RejectionTable table =
            cfg.scenario == Scenario::Identical ? run_identical_models(cfg) : run_experiment(cfg);
        return table.to_csv();
      },
      py::arg("config_json"), "Runs an experiment config (JSON text) and returns the CSV table.");
}
