#include "zmpl/cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <variant>

#include "CLI11.hpp"
#include "json.hpp"
#include "zmpl/datasets.hpp"
#include "zmpl/errors.hpp"

namespace zmpl::cli {

namespace {

using Value = std::variant<std::string, double, std::int64_t, bool>;

struct Record {
  std::string type;
  std::vector<std::pair<std::string, Value>> fields;

  Record& add(std::string key, Value v) {
    fields.emplace_back(std::move(key), std::move(v));
    return *this;
  }
  const Value& at(const std::string& key) const {
    for (const auto& [k, v] : fields)
      if (k == key) return v;
    throw std::logic_error("record field missing: " + key);
  }
  double number(const std::string& key) const {
    const Value& v = at(key);
    if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
    return std::get<double>(v);
  }
  std::string text(const std::string& key) const { return std::get<std::string>(at(key)); }
};

std::string full(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string f4(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

std::string value_string(const Value& v) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, std::string>) return x;
        else if constexpr (std::is_same_v<T, double>) return full(x);
        else if constexpr (std::is_same_v<T, bool>) return x ? "true" : "false";
        else return std::to_string(x);
      },
      v);
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + '"';
}

std::string render_csv(const std::vector<Record>& records) {
  std::string out = "index,record,field,value\n";
  for (std::size_t i = 0; i < records.size(); ++i)
    for (const auto& [k, v] : records[i].fields)
      out += std::to_string(i) + ',' + records[i].type + ',' + k + ',' + csv_quote(value_string(v)) +
             '\n';
  return out;
}

std::string render_json_lines(const std::vector<Record>& records) {
  std::string out;
  for (const auto& r : records) {
    nlohmann::ordered_json j;
    j["record"] = r.type;
    for (const auto& [k, v] : r.fields) {
      std::visit(
          [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, double>) {
              if (std::isfinite(x)) j[k] = x;
              else j[k] = nullptr;
            } else {
              j[k] = x;
            }
          },
          v);
    }
    out += j.dump() + '\n';
  }
  return out;
}

// ---- flags -----------------------------------------------------------------------

struct DataFlags {
  std::string data;
  std::string gof_cells = "auto";
  std::string dof = "cells-1";
};

struct OutputFlags {
  std::string format = "text";
  std::string out;
};

void add_data_flags(CLI::App* cmd, DataFlags& f) {
  cmd->add_option("--data", f.data, "Dataset file or builtin:cytogenetic / builtin:strikes")
      ->required();
  cmd->add_option("--gof-cells", f.gof_cells, "Last goodness-of-fit cell: auto, open (=K) or closed (>=K)")
      ->check(CLI::IsMember({"auto", "open", "closed"}));
  cmd->add_option("--dof-convention", f.dof,
                  "Chi-square degrees of freedom: cells-1 or cells-1-params")
      ->check(CLI::IsMember({"cells-1", "cells-1-params"}));
}

void add_output_flags(CLI::App* cmd, OutputFlags& f) {
  cmd->add_option("--format", f.format, "text, csv or json-lines")
      ->check(CLI::IsMember({"text", "csv", "json-lines"}));
  cmd->add_option("--out", f.out, "Write to this file instead of standard output");
}

SupportSpec support_for(const Dataset& d, const std::string& cells) {
  SupportSpec s;
  s.max_value = d.sample.max_value();
  if (cells == "open") s.tail = TailCell::open;
  else if (cells == "closed") s.tail = TailCell::closed;
  else s.tail = d.preferred_tail.value_or(TailCell::closed);
  return s;
}

DofConvention dof_for(const std::string& s) {
  return s == "cells-1" ? DofConvention::cells_minus_one
                        : DofConvention::cells_minus_one_minus_params;
}

std::vector<ModelKind> parse_models(const std::vector<std::string>& names) {
  std::vector<ModelKind> out;
  for (const auto& n : names) out.push_back(parse_model_kind(n));
  if (out.empty()) throw InvalidParameter("at least one model is required");
  return out;
}

void emit(const std::string& text, const OutputFlags& f, std::ostream& out) {
  if (f.out.empty()) {
    out << text;
    return;
  }
  std::ofstream file(f.out);
  if (!file) throw DataError("cannot write '" + f.out + "'");
  file << text;
}

// ---- fit / gof -------------------------------------------------------------------

void gof_records(const CountSample& sample, const ModelFit& fit, SupportSpec support,
                 DofConvention dof, std::vector<Record>& records) {
  const GofReport gof = goodness_of_fit(sample, fit.model, support, dof);
  const std::string model = model_name(fit.kind());
  for (const auto& c : gof.cells)
    records.push_back(Record{"gof_cell", {}}
                          .add("model", model)
                          .add("cell", c.label)
                          .add("observed", c.observed)
                          .add("expected", c.expected)
                          .add("contribution", c.contribution));
  records.push_back(Record{"gof", {}}
                        .add("model", model)
                        .add("tail", std::string(support.tail == TailCell::open ? "open" : "closed"))
                        .add("chi_square", gof.chi_square)
                        .add("dof", static_cast<std::int64_t>(gof.dof))
                        .add("p_value", gof.p_value));
}

Record dataset_record(const Dataset& d) {
  return Record{"dataset", {}}
      .add("name", d.name)
      .add("n", static_cast<std::int64_t>(d.sample.n()))
      .add("zeros", static_cast<std::int64_t>(d.sample.n0()))
      .add("mean", d.sample.mean());
}

void fit_records(const Dataset& d, ModelKind kind, double level, int boot, std::uint64_t seed,
                 SupportSpec support, DofConvention dof, std::vector<Record>& records) {
  const CountSample& sample = d.sample;
  const ModelFit fit = fit_model(kind, sample);
  if (!fit.converged) throw NumericalFailure(model_name(kind) + " fit did not converge");
  const std::string model = model_name(kind);
  records.push_back(Record{"fit", {}}
                        .add("model", model)
                        .add("log_lik", fit.log_lik)
                        .add("converged", fit.converged)
                        .add("at_boundary", fit.at_boundary));
  const auto cis = asymptotic_ci(fit, level);
  for (std::size_t i = 0; i < fit.estimates.size(); ++i)
    records.push_back(Record{"estimate", {}}
                          .add("model", model)
                          .add("parameter", fit.names[i])
                          .add("estimate", fit.estimates[i])
                          .add("se", fit.std_errors[i])
                          .add("method", interval_method_name(IntervalMethod::asymptotic))
                          .add("level", level)
                          .add("lower", cis[i].lower)
                          .add("upper", cis[i].upper));

  if (kind == ModelKind::zmpl) {
    FitResult ml;
    ml.theta_hat = fit.estimates[0];
    ml.pi_hat = fit.estimates[1];
    const auto g = gradient_test(ml, sample.n());
    records.push_back(Record{"gradient_test", {}}
                          .add("statistic", g.statistic)
                          .add("dof", static_cast<std::int64_t>(g.dof))
                          .add("p_value", g.p_value));
    if (boot > 0) {
      const FitResult full_ml = mle_fit(sample);
      BootstrapConfig cfg;
      cfg.replicates = boot;
      cfg.seed = seed;
      const auto reps = bootstrap_replicates(sample, full_ml, cfg);
      const FitResult bc = bias_correct(full_ml, reps);
      const auto [p_theta, p_pi] = percentile_ci(reps, level);
      const double bc_values[] = {bc.theta_hat, bc.pi_hat};
      const IntervalEstimate pcis[] = {p_theta, p_pi};
      for (int i = 0; i < 2; ++i)
        records.push_back(Record{"bootstrap", {}}
                              .add("parameter", fit.names[i])
                              .add("bias_corrected", bc_values[i])
                              .add("method", interval_method_name(IntervalMethod::percentile))
                              .add("level", level)
                              .add("lower", pcis[i].lower)
                              .add("upper", pcis[i].upper)
                              .add("replicates", static_cast<std::int64_t>(reps.successes()))
                              .add("failures", static_cast<std::int64_t>(reps.failures)));
    }
  }
  gof_records(sample, fit, support, dof, records);
}

std::string render_text(const std::vector<Record>& records) {
  std::ostringstream os;
  bool gof_header = false;
  bool estimate_header = false;
  for (const auto& r : records) {
    if (r.type != "gof_cell") gof_header = false;
    if (r.type != "estimate") estimate_header = false;
    if (r.type == "dataset") {
      os << "Dataset " << r.text("name") << ": n = " << value_string(r.at("n"))
         << ", zeros = " << value_string(r.at("zeros")) << ", mean = " << f4(r.number("mean"))
         << '\n';
    } else if (r.type == "fit") {
      os << "\nModel " << r.text("model") << ": log-likelihood = " << f4(r.number("log_lik"))
         << (std::get<bool>(r.at("at_boundary")) ? "  (boundary fit)" : "") << '\n';
    } else if (r.type == "estimate") {
      if (!estimate_header) {
        os << "  " << pad("parameter", 10) << pad("estimate", 11) << pad("std.err", 10)
           << "aCI(" << f4(r.number("level")) << ")\n";
        estimate_header = true;
      }
      os << "  " << pad(r.text("parameter"), 10) << pad(f4(r.number("estimate")), 11)
         << pad(f4(r.number("se")), 10) << '(' << f4(r.number("lower")) << "; "
         << f4(r.number("upper")) << ")\n";
    } else if (r.type == "gradient_test") {
      os << "  gradient test of pi = 0: S_g = " << f4(r.number("statistic"))
         << ", p-value = " << f4(r.number("p_value")) << '\n';
    } else if (r.type == "bootstrap") {
      os << "  bootstrap " << pad(r.text("parameter"), 6)
         << "bias-corrected = " << f4(r.number("bias_corrected")) << ", pCI("
         << f4(r.number("level")) << ") = (" << f4(r.number("lower")) << "; "
         << f4(r.number("upper")) << "), replicates " << value_string(r.at("replicates"))
         << ", failures " << value_string(r.at("failures")) << '\n';
    } else if (r.type == "gof_cell") {
      if (!gof_header) {
        os << "  goodness of fit, " << r.text("model") << ":\n";
        os << "  " << pad("cell", 6) << pad("observed", 10) << pad("expected", 11)
           << "(O-E)^2/E\n";
        gof_header = true;
      }
      os << "  " << pad(r.text("cell"), 6) << pad(value_string(r.at("observed")), 10)
         << pad(f4(r.number("expected")), 11) << f4(r.number("contribution")) << '\n';
    } else if (r.type == "gof") {
      os << "  chi-square = " << f4(r.number("chi_square")) << ", d.f. = "
         << value_string(r.at("dof")) << ", p-value = " << f4(r.number("p_value")) << " ("
         << r.text("tail") << " last cell)\n";
    }
  }
  return os.str();
}

std::string render(const std::vector<Record>& records, const std::string& format) {
  if (format == "csv") return render_csv(records);
  if (format == "json-lines") return render_json_lines(records);
  return render_text(records);
}

// ---- sdplot ----------------------------------------------------------------------

std::vector<Record> sd_records(const SdPlotData& data) {
  std::vector<Record> out;
  for (std::size_t j = 0; j < data.support.size(); ++j)
    for (std::size_t i = 0; i < data.models.size(); ++i)
      out.push_back(Record{"sd", {}}
                        .add("support", static_cast<std::int64_t>(data.support[j]))
                        .add("model", data.models[i])
                        .add("observed", data.observed[j])
                        .add("expected", data.expected[i][j])
                        .add("delta", data.delta[i][j])
                        .add("delta_std", data.delta_std[i][j]));
  return out;
}

std::string sd_text(const SdPlotData& data) {
  std::ostringstream os;
  os << pad("support", 9) << pad("model", 8) << pad("observed", 10) << pad("expected", 11)
     << pad("delta", 11) << "delta_std\n";
  for (const auto& r : sd_records(data))
    os << pad(value_string(r.at("support")), 9) << pad(r.text("model"), 8)
       << pad(value_string(r.at("observed")), 10) << pad(f4(r.number("expected")), 11)
       << pad(f4(r.number("delta")), 11) << f4(r.number("delta_std")) << '\n';
  return os.str();
}

// ---- simulate --------------------------------------------------------------------

std::vector<Record> point_records(const std::vector<McPointReport>& reports) {
  std::vector<Record> out;
  for (const auto& r : reports)
    for (const auto& c : r.cells)
      out.push_back(Record{"point", {}}
                        .add("scenario_id", r.scenario.id)
                        .add("n", static_cast<std::int64_t>(r.scenario.n))
                        .add("theta_true", r.scenario.theta_true)
                        .add("pi_true", r.scenario.pi_true)
                        .add("estimator", estimator_name(c.estimator))
                        .add("parameter", parameter_name(c.parameter))
                        .add("mean", c.mean)
                        .add("bias", c.bias)
                        .add("variance", c.variance)
                        .add("mse", c.mse)
                        .add("mc_se", c.mc_se)
                        .add("failures", static_cast<std::int64_t>(c.failures)));
  return out;
}

std::vector<Record> coverage_records(const std::vector<McCoverageReport>& reports) {
  std::vector<Record> out;
  for (const auto& r : reports)
    for (const auto& c : r.cells)
      out.push_back(Record{"coverage", {}}
                        .add("scenario_id", r.scenario.id)
                        .add("n", static_cast<std::int64_t>(r.scenario.n))
                        .add("theta_true", r.scenario.theta_true)
                        .add("pi_true", r.scenario.pi_true)
                        .add("method", interval_method_name(c.method))
                        .add("parameter", parameter_name(c.parameter))
                        .add("level", c.level)
                        .add("coverage", c.coverage)
                        .add("left_tail", c.left_tail)
                        .add("right_tail", c.right_tail)
                        .add("mc_se", c.mc_se));
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream file(path);
  if (!file) throw DataError("cannot write '" + path.string() + "'");
  file << text;
}

}  // namespace

std::vector<McScenario> expand_scenario_grid(const std::vector<Count>& ns,
                                             const std::vector<double>& thetas,
                                             const std::vector<double>& pis, int mc_reps,
                                             int boot_reps, std::uint64_t seed) {
  std::vector<McScenario> out;
  for (Count n : ns)
    for (double theta : thetas)
      for (double pi : pis) {
        McScenario sc;
        sc.id = "n" + std::to_string(n) + "_theta" + full(theta) + "_pi" + full(pi);
        sc.n = n;
        sc.theta_true = theta;
        sc.pi_true = pi;
        sc.mc_reps = mc_reps;
        sc.boot_reps = boot_reps;
        sc.seed = seed;
        out.push_back(std::move(sc));
      }
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Zero-modified Poisson-Lindley models for count data", "zmpl"};
  app.require_subcommand(1);

  DataFlags fit_data, gof_data, sd_data;
  OutputFlags fit_out, gof_out, sd_out, sim_out;
  std::string fit_model_name = "zmpl";
  double level = 0.95;
  int boot = 0;
  std::uint64_t seed = 1;

  auto* fit_cmd = app.add_subcommand("fit", "Fit one model, with intervals and goodness of fit");
  add_data_flags(fit_cmd, fit_data);
  add_output_flags(fit_cmd, fit_out);
  fit_cmd->add_option("--model", fit_model_name, "poisson, zmp, pl or zmpl")
      ->check(CLI::IsMember({"poisson", "zmp", "pl", "zmpl"}));
  fit_cmd->add_option("--level", level, "Confidence level")->check(CLI::Range(0.0, 1.0));
  fit_cmd->add_option("--boot", boot, "Bootstrap replicates for bias correction and pCI (zmpl)")
      ->check(CLI::NonNegativeNumber);
  fit_cmd->add_option("--seed", seed, "Bootstrap seed");

  std::vector<std::string> gof_models{"poisson", "zmp", "pl", "zmpl"};
  auto* gof_cmd = app.add_subcommand("gof", "Compare goodness of fit across models");
  add_data_flags(gof_cmd, gof_data);
  add_output_flags(gof_cmd, gof_out);
  gof_cmd->add_option("--model", gof_models, "Comma-separated models")
      ->delimiter(',')
      ->check(CLI::IsMember({"poisson", "zmp", "pl", "zmpl"}));

  std::vector<std::string> sd_models{"poisson", "zmp", "pl", "zmpl"};
  std::string sd_norm = "point";
  auto* sd_cmd = app.add_subcommand("sdplot", "Standardized observed-minus-expected differences");
  add_data_flags(sd_cmd, sd_data);
  add_output_flags(sd_cmd, sd_out);
  sd_out.format = "csv";
  sd_cmd->add_option("--model", sd_models, "Comma-separated models")
      ->delimiter(',')
      ->check(CLI::IsMember({"poisson", "zmp", "pl", "zmpl"}));
  sd_cmd->add_option("--sd-norm", sd_norm,
                     "point: scale by max |delta| across models at each value; model: per model")
      ->check(CLI::IsMember({"point", "model"}));

  std::vector<Count> sim_n{35, 60, 90, 120};
  std::vector<double> sim_theta{1.5, 2.0};
  std::vector<double> sim_pi{-0.1, 0.0, 0.1};
  std::vector<double> sim_levels{0.90, 0.95, 0.99};
  int sim_reps = 2000;
  int sim_boot = 250;
  std::uint64_t sim_seed = 1;
  int workers = 0;
  std::string study = "both";
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo bias, MSE and coverage study");
  sim_cmd->add_option("--n", sim_n, "Comma-separated sample sizes")->delimiter(',');
  sim_cmd->add_option("--theta", sim_theta, "Comma-separated theta values")->delimiter(',');
  sim_cmd->add_option("--pi", sim_pi, "Comma-separated pi values")->delimiter(',');
  sim_cmd->add_option("--reps", sim_reps, "Monte Carlo replicates per scenario");
  sim_cmd->add_option("--boot", sim_boot, "Bootstrap replicates per Monte Carlo replicate");
  sim_cmd->add_option("--levels", sim_levels, "Comma-separated confidence levels")->delimiter(',');
  sim_cmd->add_option("--seed", sim_seed, "Base seed");
  sim_cmd->add_option("--workers", workers, "Worker threads (0 = all cores)")
      ->check(CLI::NonNegativeNumber);
  sim_cmd->add_option("--study", study, "point, coverage or both")
      ->check(CLI::IsMember({"point", "coverage", "both"}));
  sim_cmd->add_option("--format", sim_out.format, "text, csv or json-lines")
      ->check(CLI::IsMember({"text", "csv", "json-lines"}));
  sim_cmd->add_option("--out", sim_out.out,
                      "Directory for point.csv and coverage.csv (CSV is always used there)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (*fit_cmd) {
      const ModelKind kind = parse_model_kind(fit_model_name);
      const Dataset d = parse_dataset(fit_data.data);
      std::vector<Record> records{dataset_record(d)};
      fit_records(d, kind, level, boot, seed, support_for(d, fit_data.gof_cells),
                  dof_for(fit_data.dof), records);
      emit(render(records, fit_out.format), fit_out, out);
    } else if (*gof_cmd) {
      const auto kinds = parse_models(gof_models);
      const Dataset d = parse_dataset(gof_data.data);
      const SupportSpec support = support_for(d, gof_data.gof_cells);
      std::vector<Record> records{dataset_record(d)};
      for (ModelKind kind : kinds) {
        const ModelFit fit = fit_model(kind, d.sample);
        if (!fit.converged) throw NumericalFailure(model_name(kind) + " fit did not converge");
        gof_records(d.sample, fit, support, dof_for(gof_data.dof), records);
      }
      emit(render(records, gof_out.format), gof_out, out);
    } else if (*sd_cmd) {
      const auto kinds = parse_models(sd_models);
      const Dataset d = parse_dataset(sd_data.data);
      const SupportSpec support = support_for(d, sd_data.gof_cells);
      std::vector<Count> values;
      for (Count k = 0; k <= support.max_value; ++k) values.push_back(k);
      std::vector<std::string> names;
      std::vector<std::vector<double>> expected;
      for (ModelKind kind : kinds) {
        const ModelFit fit = fit_model(kind, d.sample);
        if (!fit.converged) throw NumericalFailure(model_name(kind) + " fit did not converge");
        names.push_back(model_name(kind));
        expected.push_back(expected_frequencies(fit.model, d.sample.n(), support));
      }
      const auto observed = observed_frequencies(d.sample, support);
      const SdPlotData data = standardized_differences(
          values, observed, names, expected,
          sd_norm == "point" ? SdNormalization::per_point : SdNormalization::per_model);
      std::string text;
      if (sd_out.format == "csv") text = sd_plot_csv(data);
      else if (sd_out.format == "json-lines") text = render_json_lines(sd_records(data));
      else text = sd_text(data);
      emit(text, sd_out, out);
    } else if (*sim_cmd) {
      const auto scenarios =
          expand_scenario_grid(sim_n, sim_theta, sim_pi, sim_reps, sim_boot, sim_seed);
      if (scenarios.empty()) throw InvalidParameter("empty scenario grid");
      for (const auto& sc : scenarios) validate_scenario(sc);
      for (double l : sim_levels)
        if (!(l > 0.0 && l < 1.0)) throw InvalidParameter("coverage levels must lie in (0, 1)");

      RunOptions options;
      options.workers = workers;
      std::vector<McPointReport> points;
      std::vector<McCoverageReport> coverages;
      for (const auto& sc : scenarios) {
        if (study == "point") {
          points.push_back(run_point_study(sc, options));
        } else if (study == "coverage") {
          coverages.push_back(run_coverage_study(sc, sim_levels, options));
        } else {
          auto [p, c] = run_full_study(sc, sim_levels, options);
          points.push_back(std::move(p));
          coverages.push_back(std::move(c));
        }
      }
      if (!sim_out.out.empty()) {
        std::filesystem::create_directories(sim_out.out);
        const std::filesystem::path dir(sim_out.out);
        if (!points.empty()) write_file(dir / "point.csv", point_csv(points));
        if (!coverages.empty()) write_file(dir / "coverage.csv", coverage_csv(coverages));
      } else if (sim_out.format == "csv") {
        if (!points.empty()) out << point_csv(points);
        if (!points.empty() && !coverages.empty()) out << '\n';
        if (!coverages.empty()) out << coverage_csv(coverages);
      } else if (sim_out.format == "json-lines") {
        out << render_json_lines(point_records(points))
            << render_json_lines(coverage_records(coverages));
      } else {
        if (!points.empty()) out << point_table(points);
        if (!coverages.empty()) out << coverage_table(coverages);
      }
    }
  } catch (const InvalidParameter& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const DegenerateSample& e) {
    err << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const NumericalFailure& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kNumericalFailure;
  }
  return kSuccess;
}

}  // namespace zmpl::cli
