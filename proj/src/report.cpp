#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "zmpl/errors.hpp"
#include "zmpl/simulation.hpp"

namespace zmpl {

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s) {
  if (s == "nan") return std::nan("");
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw DataError("malformed number in report CSV: '" + s + "'");
  return v;
}

long long parse_int(const std::string& s) {
  long long v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw DataError("malformed integer in report CSV: '" + s + "'");
  return v;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& csv, const char* header,
                                               std::size_t columns) {
  std::istringstream is(csv);
  std::string line;
  if (!std::getline(is, line) || line != header) throw DataError("report CSV header mismatch");
  std::vector<std::vector<std::string>> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != columns) throw DataError("report CSV row has the wrong column count");
    rows.push_back(std::move(fields));
  }
  return rows;
}

EstimatorKind parse_estimator(const std::string& s) {
  if (s == "ml") return EstimatorKind::mle;
  if (s == "bias_corrected") return EstimatorKind::mle_bias_corrected;
  if (s == "moments") return EstimatorKind::moments;
  throw DataError("unknown estimator '" + s + "'");
}

Parameter parse_parameter(const std::string& s) {
  if (s == "theta") return Parameter::theta;
  if (s == "pi") return Parameter::pi;
  throw DataError("unknown parameter '" + s + "'");
}

IntervalMethod parse_method(const std::string& s) {
  if (s == "aCI") return IntervalMethod::asymptotic;
  if (s == "pCI") return IntervalMethod::percentile;
  throw DataError("unknown interval method '" + s + "'");
}

std::string scenario_prefix(const McScenario& sc) {
  return sc.id + ',' + std::to_string(sc.n) + ',' + num(sc.theta_true) + ',' + num(sc.pi_true);
}

}  // namespace

std::string point_csv(std::span<const McPointReport> reports) {
  std::string out = std::string(kPointCsvHeader) + '\n';
  for (const auto& r : reports)
    for (const auto& c : r.cells)
      out += scenario_prefix(r.scenario) + ',' + estimator_name(c.estimator) + ',' +
             parameter_name(c.parameter) + ',' + num(c.mean) + ',' + num(c.bias) + ',' +
             num(c.variance) + ',' + num(c.mse) + ',' + num(c.mc_se) + ',' +
             std::to_string(c.failures) + '\n';
  return out;
}

std::string coverage_csv(std::span<const McCoverageReport> reports) {
  std::string out = std::string(kCoverageCsvHeader) + '\n';
  for (const auto& r : reports)
    for (const auto& c : r.cells)
      out += scenario_prefix(r.scenario) + ',' + interval_method_name(c.method) + ',' +
             parameter_name(c.parameter) + ',' + num(c.level) + ',' + num(c.coverage) + ',' +
             num(c.left_tail) + ',' + num(c.right_tail) + ',' + num(c.mc_se) + '\n';
  return out;
}

std::string point_table(std::span<const McPointReport> reports) {
  std::ostringstream os;
  os << "Empirical bias and MSE (MC standard error of the bias in brackets)\n";
  os << "  n   theta     pi  | theta_ml              theta_bc              | pi_ml                 pi_bc\n";
  for (const auto& r : reports) {
    auto entry = [&](EstimatorKind e, Parameter p) {
      const auto& c = r.cell(e, p);
      return fixed(c.bias, 4) + " (" + fixed(c.mse, 4) + ") [" + fixed(c.bias_se, 4) + "]";
    };
    char head[64];
    std::snprintf(head, sizeof head, "%4lld  %5.2f  %5.2f  | ", static_cast<long long>(r.scenario.n),
                  r.scenario.theta_true, r.scenario.pi_true);
    os << head << entry(EstimatorKind::mle, Parameter::theta) << "  "
       << entry(EstimatorKind::mle_bias_corrected, Parameter::theta) << " | "
       << entry(EstimatorKind::mle, Parameter::pi) << "  "
       << entry(EstimatorKind::mle_bias_corrected, Parameter::pi) << "   used " << r.replicates_used
       << ", failures " << r.redraws + r.dropped << '\n';
  }
  return os.str();
}

std::string coverage_table(std::span<const McCoverageReport> reports) {
  std::ostringstream os;
  os << "Empirical coverage (left tail; right tail)\n";
  for (const auto& r : reports) {
    os << "n=" << r.scenario.n << " theta=" << fixed(r.scenario.theta_true, 2)
       << " pi=" << fixed(r.scenario.pi_true, 2) << " (used " << r.replicates_used << ")\n";
    for (const auto& c : r.cells)
      os << "  " << interval_method_name(c.method) << '(' << parameter_name(c.parameter) << ';'
         << fixed(c.level, 2) << ")  " << fixed(c.coverage, 4) << "  (" << fixed(c.left_tail, 4)
         << ';' << fixed(c.right_tail, 4) << ")\n";
  }
  return os.str();
}

std::vector<McPointReport> parse_point_csv(const std::string& csv) {
  std::vector<McPointReport> reports;
  std::map<std::string, std::size_t> index;
  for (const auto& f : csv_rows(csv, kPointCsvHeader, 12)) {
    auto [it, inserted] = index.try_emplace(f[0], reports.size());
    if (inserted) {
      McPointReport r;
      r.scenario.id = f[0];
      r.scenario.n = parse_int(f[1]);
      r.scenario.theta_true = parse_double(f[2]);
      r.scenario.pi_true = parse_double(f[3]);
      reports.push_back(std::move(r));
    }
    PointCell c;
    c.estimator = parse_estimator(f[4]);
    c.parameter = parse_parameter(f[5]);
    c.mean = parse_double(f[6]);
    c.bias = parse_double(f[7]);
    c.variance = parse_double(f[8]);
    c.mse = parse_double(f[9]);
    c.mc_se = parse_double(f[10]);
    c.failures = static_cast<std::size_t>(parse_int(f[11]));
    reports[it->second].cells.push_back(c);
  }
  return reports;
}

std::vector<McCoverageReport> parse_coverage_csv(const std::string& csv) {
  std::vector<McCoverageReport> reports;
  std::map<std::string, std::size_t> index;
  for (const auto& f : csv_rows(csv, kCoverageCsvHeader, 11)) {
    auto [it, inserted] = index.try_emplace(f[0], reports.size());
    if (inserted) {
      McCoverageReport r;
      r.scenario.id = f[0];
      r.scenario.n = parse_int(f[1]);
      r.scenario.theta_true = parse_double(f[2]);
      r.scenario.pi_true = parse_double(f[3]);
      reports.push_back(std::move(r));
    }
    CoverageCell c;
    c.method = parse_method(f[4]);
    c.parameter = parse_parameter(f[5]);
    c.level = parse_double(f[6]);
    c.coverage = parse_double(f[7]);
    c.left_tail = parse_double(f[8]);
    c.right_tail = parse_double(f[9]);
    c.mc_se = parse_double(f[10]);
    reports[it->second].cells.push_back(c);
  }
  return reports;
}

}  // namespace zmpl
