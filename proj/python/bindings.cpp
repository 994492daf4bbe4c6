#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "zmpl/cli.hpp"
#include "zmpl/datasets.hpp"
#include "zmpl/errors.hpp"
#include "zmpl/estimation.hpp"
#include "zmpl/inference.hpp"
#include "zmpl/simulation.hpp"

namespace py = pybind11;
using namespace zmpl;

namespace {

CountSample to_sample(const py::object& data) {
  if (py::isinstance<py::dict>(data)) {
    std::map<Count, Count> freq;
    for (const auto& [k, v] : data.cast<py::dict>()) freq[k.cast<Count>()] = v.cast<Count>();
    return CountSample::from_frequencies(freq);
  }
  return CountSample::from_values(data.cast<std::vector<Count>>());
}

py::dict fit_dict(const FitResult& f) {
  py::dict d;
  d["theta"] = f.theta_hat;
  d["pi"] = f.pi_hat;
  d["se_theta"] = f.se_theta;
  d["se_pi"] = f.se_pi;
  d["log_lik"] = f.log_lik;
  d["method"] = estimator_name(f.method);
  d["converged"] = f.converged;
  d["iterations"] = f.iterations;
  d["at_boundary"] = f.at_boundary;
  d["projected"] = f.projected;
  d["bootstrap_failures"] = f.bootstrap_failures;
  return d;
}

py::dict interval_dict(const IntervalEstimate& iv) {
  py::dict d;
  d["parameter"] = parameter_name(iv.parameter);
  d["method"] = interval_method_name(iv.method);
  d["level"] = iv.level;
  d["lower"] = iv.lower;
  d["upper"] = iv.upper;
  return d;
}

py::dict model_fit_dict(const ModelFit& f) {
  py::dict d;
  d["model"] = model_name(f.kind());
  py::dict est, se;
  for (std::size_t i = 0; i < f.names.size(); ++i) {
    est[py::str(f.names[i])] = f.estimates[i];
    se[py::str(f.names[i])] = f.std_errors[i];
  }
  d["estimates"] = est;
  d["std_errors"] = se;
  d["log_lik"] = f.log_lik;
  d["at_boundary"] = f.at_boundary;
  return d;
}

SupportSpec support_for(const CountSample& s, const std::string& tail, std::optional<Count> max_value) {
  if (tail != "open" && tail != "closed") throw InvalidParameter("tail must be 'open' or 'closed'");
  return {max_value.value_or(s.max_value()), tail == "open" ? TailCell::open : TailCell::closed};
}

McScenario make_scenario(Count n, double theta, double pi, int reps, int boot, std::uint64_t seed) {
  return cli::expand_scenario_grid({n}, {theta}, {pi}, reps, boot, seed).front();
}

}  // namespace

PYBIND11_MODULE(_zmpl, m) {
  m.doc() = "Zero-modified Poisson-Lindley distribution: probabilities, estimation and inference";

  py::register_exception<DegenerateSample>(m, "DegenerateSample", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<NumericalFailure>(m, "NumericalFailure", PyExc_ArithmeticError);

  m.def("pmf", [](Count k, double theta, double pi) { return zmpl_pmf(ZmplParams(theta, pi), k); },
        py::arg("k"), py::arg("theta"), py::arg("pi"));
  m.def("cdf", [](double x, double theta, double pi) { return zmpl_cdf(ZmplParams(theta, pi), x); },
        py::arg("x"), py::arg("theta"), py::arg("pi"));
  m.def("survival",
        [](double x, double theta, double pi) { return zmpl_survival(ZmplParams(theta, pi), x); },
        py::arg("x"), py::arg("theta"), py::arg("pi"));
  m.def("quantile",
        [](double p, double theta, double pi) { return zmpl_quantile(ZmplParams(theta, pi), p); },
        py::arg("p"), py::arg("theta"), py::arg("pi"));
  m.def("sample",
        [](double theta, double pi, Count n, std::uint64_t seed) {
          return zmpl_sample(ZmplParams(theta, pi), n, seed).values();
        },
        py::arg("theta"), py::arg("pi"), py::arg("n"), py::arg("seed"));
  m.def("moments",
        [](double theta, double pi) {
          const auto mo = zmpl_moments(ZmplParams(theta, pi));
          py::dict d;
          d["mean"] = mo.mean;
          d["second_raw_moment"] = mo.second_raw_moment;
          d["variance"] = mo.variance;
          d["fisher_index"] = mo.fisher_index;
          return d;
        },
        py::arg("theta"), py::arg("pi"));
  m.def("pi_lower_bound", &pi_lower_bound, py::arg("theta"));

  m.def("moment_estimate", [](const py::object& data) { return fit_dict(moment_estimate(to_sample(data))); },
        py::arg("data"), "Data is a list of counts or a {value: frequency} dict.");
  m.def("mle", [](const py::object& data) { return fit_dict(mle_fit(to_sample(data))); },
        py::arg("data"));
  m.def("log_likelihood",
        [](double theta, double pi, const py::object& data) {
          return log_likelihood(ZmplParams(theta, pi), to_sample(data));
        },
        py::arg("theta"), py::arg("pi"), py::arg("data"));
  m.def("fisher_info",
        [](double theta, double pi, Count n) {
          const auto fi = expected_fisher_info(ZmplParams(theta, pi), n);
          return std::vector<std::vector<double>>{{fi.i_tt, fi.i_tp}, {fi.i_tp, fi.i_pp}};
        },
        py::arg("theta"), py::arg("pi"), py::arg("n"));
  m.def("fit_model",
        [](const std::string& model, const py::object& data) {
          return model_fit_dict(fit_model(parse_model_kind(model), to_sample(data)));
        },
        py::arg("model"), py::arg("data"));

  m.def("asymptotic_ci",
        [](const py::object& data, double level) {
          const auto s = to_sample(data);
          const auto fit = mle_fit(s);
          const auto [t, p] = asymptotic_ci(fit, expected_fisher_info(fit.params(), s.n()), level);
          return py::make_tuple(interval_dict(t), interval_dict(p));
        },
        py::arg("data"), py::arg("level") = 0.95);
  m.def("bootstrap",
        [](const py::object& data, int replicates, std::uint64_t seed, double level, int workers) {
          const auto s = to_sample(data);
          const auto ml = mle_fit(s);
          BootstrapConfig cfg;
          cfg.replicates = replicates;
          cfg.seed = seed;
          cfg.workers = workers;
          const auto reps = bootstrap_replicates(s, ml, cfg);
          const auto [t, p] = percentile_ci(reps, level);
          py::dict d;
          d["bias_corrected"] = fit_dict(bias_correct(ml, reps));
          d["pci"] = py::make_tuple(interval_dict(t), interval_dict(p));
          d["successes"] = reps.successes();
          d["failures"] = reps.failures;
          return d;
        },
        py::arg("data"), py::arg("replicates") = 1000, py::arg("seed") = 1,
        py::arg("level") = 0.95, py::arg("workers") = 1);
  m.def("gradient_test",
        [](const py::object& data) {
          const auto s = to_sample(data);
          const auto g = gradient_test(mle_fit(s), s.n());
          return py::make_tuple(g.statistic, g.p_value);
        },
        py::arg("data"));
  m.def("goodness_of_fit",
        [](const std::string& model, const py::object& data, const std::string& tail,
           std::optional<Count> max_value) {
          const auto s = to_sample(data);
          const auto fit = fit_model(parse_model_kind(model), s);
          const auto g = goodness_of_fit(s, fit.model, support_for(s, tail, max_value));
          py::list cells;
          for (const auto& c : g.cells) {
            py::dict d;
            d["cell"] = c.label;
            d["observed"] = c.observed;
            d["expected"] = c.expected;
            d["contribution"] = c.contribution;
            cells.append(d);
          }
          py::dict d;
          d["cells"] = cells;
          d["chi_square"] = g.chi_square;
          d["dof"] = g.dof;
          d["p_value"] = g.p_value;
          return d;
        },
        py::arg("model"), py::arg("data"), py::arg("tail") = "closed",
        py::arg("max_value") = py::none());
  m.def("dataset",
        [](const std::string& spec) {
          const auto d = parse_dataset(spec);
          std::map<Count, Count> freq = d.sample.frequencies();
          return freq;
        },
        py::arg("spec"), "Frequency table of a dataset file or 'builtin:<name>'.");

  m.def("point_study",
        [](Count n, double theta, double pi, int reps, int boot, std::uint64_t seed, int workers) {
          RunOptions opt;
          opt.workers = workers;
          const std::vector<McPointReport> r{
              run_point_study(make_scenario(n, theta, pi, reps, boot, seed), opt)};
          return point_csv(r);
        },
        py::arg("n"), py::arg("theta"), py::arg("pi"), py::arg("reps") = 2000,
        py::arg("boot") = 250, py::arg("seed") = 1, py::arg("workers") = 0,
        "Bias and MSE study; returns the point CSV.");
  m.def("coverage_study",
        [](Count n, double theta, double pi, std::vector<double> levels, int reps, int boot,
           std::uint64_t seed, int workers) {
          RunOptions opt;
          opt.workers = workers;
          const std::vector<McCoverageReport> r{
              run_coverage_study(make_scenario(n, theta, pi, reps, boot, seed), levels, opt)};
          return coverage_csv(r);
        },
        py::arg("n"), py::arg("theta"), py::arg("pi"),
        py::arg("levels") = std::vector<double>{0.90, 0.95, 0.99}, py::arg("reps") = 2000,
        py::arg("boot") = 250, py::arg("seed") = 1, py::arg("workers") = 0,
        "Coverage study; returns the coverage CSV.");

  m.def("run_cli",
        [](const std::vector<std::string>& args) {
          std::ostringstream out, err;
          int code = 0;
          {
            py::gil_scoped_release release;
            code = cli::run(args, out, err);
          }
          return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs the command line tool in-process; returns (code, stdout, stderr).");
}
