#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "budgetid/bounds.hpp"
#include "budgetid/difficulty.hpp"
#include "budgetid/error.hpp"
#include "budgetid/exp_family.hpp"
#include "budgetid/simulator.hpp"
#include "budgetid/tasks.hpp"

namespace py = pybind11;
using namespace budgetid;

namespace {

std::vector<double> vec(std::span<const double> s) { return {s.begin(), s.end()}; }

BanditInstance make_instance(const Family& family, std::vector<double> means) {
  return BanditInstance(family, std::move(means));
}

py::dict ratio_dict(const RatioResult& r) {
  py::dict d;
  d["lower_bound"] = r.lower_bound;
  d["omega"] = r.omega ? py::cast(vec(r.omega->values())) : py::none();
  d["contributions"] = r.contributions;
  return d;
}

}  // namespace

PYBIND11_MODULE(_budgetid, m) {
  m.doc() = "Fixed-budget identification: difficulties, lower bounds, simulation";

  static py::exception<Error> error(m, "BudgetIdError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      PyErr_SetString(error.ptr(), (std::string(to_string(e.kind())) + ": " + e.what()).c_str());
    }
  });

  py::class_<Family>(m, "Family")
      .def_static("gaussian", &Family::gaussian, py::arg("variance") = 1.0)
      .def_static("bernoulli", &Family::bernoulli)
      .def_property_readonly("kind", [](const Family& f) { return to_string(f.kind()); })
      .def_property_readonly("variance", &Family::variance)
      .def("__eq__", [](const Family& a, const Family& b) { return a == b; });

  m.def("kl", &kl, py::arg("family"), py::arg("x"), py::arg("y"));

  py::class_<BanditInstance>(m, "BanditInstance")
      .def(py::init(&make_instance), py::arg("family"), py::arg("means"))
      .def(py::init<std::vector<Family>, std::vector<double>>(), py::arg("families"), py::arg("means"))
      .def_property_readonly("means", [](const BanditInstance& b) { return vec(b.means()); })
      .def("__len__", &BanditInstance::size);

  py::class_<TaskSpec>(m, "TaskSpec")
      .def_static("best_arm", &TaskSpec::best_arm)
      .def_static("thresholding", &TaskSpec::thresholding, py::arg("theta"))
      .def_static("positivity", &TaskSpec::positivity, py::arg("theta"))
      .def_static("half_space", &TaskSpec::half_space, py::arg("normal"), py::arg("offset") = 0.0)
      .def("normalized_for", &TaskSpec::normalized_for)
      .def_property_readonly("kind", [](const TaskSpec& t) { return to_string(t.kind()); })
      .def_property_readonly("normal", [](const TaskSpec& t) { return vec(t.normal()); })
      .def_property_readonly("offset", &TaskSpec::offset);

  py::class_<Weights>(m, "Weights")
      .def(py::init<std::vector<double>>())
      .def_static("uniform", &Weights::uniform)
      .def_property_readonly("values", [](const Weights& w) { return vec(w.values()); });

  py::class_<DifficultyResult>(m, "DifficultyResult")
      .def_readonly("H", &DifficultyResult::H)
      .def_readonly("inverse_rate", &DifficultyResult::inverse_rate)
      .def_property_readonly("omega_star", [](const DifficultyResult& r) { return vec(r.omega_star.values()); })
      .def_readonly("lambda_star", &DifficultyResult::lambda_star)
      .def_property_readonly("method", [](const DifficultyResult& r) { return to_string(r.method); })
      .def_readonly("x_star", &DifficultyResult::x_star);

  m.def("correct_answer", [](const TaskSpec& t, const BanditInstance& b) { return to_string(correct_answer(t, b)); });
  m.def(
      "oracle_difficulty",
      [](const TaskSpec& t, const BanditInstance& b, double min_weight, bool force_optimizer) {
        OracleOptions o;
        o.min_weight = min_weight;
        o.force_optimizer = force_optimizer;
        return oracle_difficulty_sp(t, b, o);
      },
      py::arg("task"), py::arg("instance"), py::arg("min_weight") = 0.0, py::arg("force_optimizer") = false);
  m.def("sp_rate", &sp_rate, py::arg("task"), py::arg("instance"), py::arg("omega"));
  m.def("h_delta", &h_delta, py::arg("instance"));
  m.def("grid_oracle", &grid_oracle, py::arg("task"), py::arg("instance"), py::arg("resolution"));

  m.def("bernoulli_two_arm_bound", [](double x) { return ratio_dict(bernoulli_two_arm_bound(x)); });
  m.def("bernoulli_two_arm_limits", &bernoulli_two_arm_limits);
  m.def(
      "gaussian_bai_bound",
      [](std::size_t K, double delta) {
        const auto r = gaussian_bai_bound(K, delta);
        py::dict d = ratio_dict(r.ratio);
        d["floor"] = r.floor;
        d["csp_bound"] = r.csp_bound;
        return d;
      },
      py::arg("K"), py::arg("delta") = 1.0);
  m.def(
      "positivity_bound",
      [](const Family& f, std::size_t K, double m_, double ell, double theta) {
        return ratio_dict(positivity_bound(f, K, m_, ell, theta));
      },
      py::arg("family"), py::arg("K"), py::arg("m"), py::arg("ell"), py::arg("theta"));

  m.def(
      "estimate_error",
      [](const std::string& algorithm, const TaskSpec& t, const BanditInstance& b, std::size_t T,
         std::uint64_t n_reps, std::uint64_t seed, std::optional<std::vector<double>> weights, unsigned workers) {
        AlgorithmFamily alg = AlgorithmFamily::uniform();
        if (algorithm == "static_proportions") {
          if (!weights) throw Error(ErrorKind::InvalidInput, "static_proportions needs weights");
          alg = AlgorithmFamily::static_proportions(Weights(*weights));
        } else if (algorithm == "successive_rejects") {
          alg = AlgorithmFamily::successive_rejects();
        } else if (algorithm == "successive_halving") {
          alg = AlgorithmFamily::successive_halving();
        } else if (algorithm != "uniform") {
          throw Error(ErrorKind::InvalidInput, "unknown algorithm " + algorithm);
        }
        SimOptions o;
        o.workers = workers;
        SimResult r;
        {
          py::gil_scoped_release release;
          r = estimate_error(alg, t, b, T, n_reps, seed, o);
        }
        py::dict d;
        d["T"] = r.T;
        d["replications"] = r.replications;
        d["errors"] = r.errors;
        d["p_hat"] = r.p_hat;
        d["ci_low"] = r.ci_low;
        d["ci_high"] = r.ci_high;
        d["h_hat"] = r.h_hat;
        d["mean_pull_fractions"] = r.mean_pull_fractions;
        return d;
      },
      py::arg("algorithm"), py::arg("task"), py::arg("instance"), py::arg("T"), py::arg("n_reps"),
      py::arg("seed"), py::arg("weights") = py::none(), py::arg("workers") = 0);
}
