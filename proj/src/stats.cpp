#include "dialeval/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include <json.hpp>

#include "dialeval/errors.hpp"

namespace dialeval {

using ojson = nlohmann::ordered_json;

std::string_view to_string(CorrelationMethod m) {
  return m == CorrelationMethod::Pearson ? "pearson" : "spearman";
}
std::string_view to_string(CorrelationLevel l) { return l == CorrelationLevel::System ? "system" : "dialog"; }

CorrelationLevel parse_level(std::string_view s) {
  if (s == "system") return CorrelationLevel::System;
  if (s == "dialog") return CorrelationLevel::Dialog;
  throw ConfigError("unknown level '" + std::string(s) + "' (expected system or dialog)");
}

CorrelationMethod parse_method(std::string_view s) {
  if (s == "pearson") return CorrelationMethod::Pearson;
  if (s == "spearman") return CorrelationMethod::Spearman;
  throw ConfigError("unknown method '" + std::string(s) + "' (expected pearson or spearman)");
}

namespace {

// Modified Lentz evaluation of the continued fraction for I_x(a, b).
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIterations = 10000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  return h;
}

void check_series(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw DegenerateSeries("series lengths differ (" + std::to_string(x.size()) + " vs " +
                           std::to_string(y.size()) + ")");
  }
  if (x.size() < 3) throw DegenerateSeries("need at least 3 points, got " + std::to_string(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) {
      throw DegenerateSeries("non-finite value at point " + std::to_string(i));
    }
  }
}

double product_moment(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0;
  double syy = 0;
  double sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0 || syy == 0) throw DegenerateSeries("series has zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0) || !(b > 0)) throw DegenerateSeries("incomplete beta needs a, b > 0");
  if (x <= 0) return 0.0;
  if (x >= 1) return 1.0;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_two_tailed_p(double t, double df) {
  if (!(df > 0)) throw DegenerateSeries("degrees of freedom must be positive");
  if (std::isinf(t)) return 0.0;
  return incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
}

double correlation_p_value(double r, std::size_t n) {
  if (n < 3) throw DegenerateSeries("need at least 3 points for a p-value");
  const double df = static_cast<double>(n - 2);
  const double denom = 1.0 - r * r;
  if (denom <= 0) return 0.0;
  return std::min(1.0, student_t_two_tailed_p(r * std::sqrt(df) / std::sqrt(denom), df));
}

Correlation pearson(std::span<const double> x, std::span<const double> y) {
  check_series(x, y);
  const double r = product_moment(x, y);
  return {r, correlation_p_value(r, x.size()), x.size()};
}

std::vector<double> average_ranks(std::span<const double> x) {
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && x[idx[j + 1]] == x[idx[i]]) ++j;
    const double r = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
    i = j + 1;
  }
  return ranks;
}

Correlation spearman(std::span<const double> x, std::span<const double> y) {
  check_series(x, y);
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double rho = product_moment(rx, ry);
  return {rho, correlation_p_value(rho, x.size()), x.size()};
}

std::string format_p(double p) {
  if (p < 0.001) return "< 0.001";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", p);
  return buf;
}

CorrelationMethod default_method(CorrelationLevel level) {
  return level == CorrelationLevel::System ? CorrelationMethod::Pearson : CorrelationMethod::Spearman;
}

CorrelationResult correlate(const std::map<std::string, double>& machine,
                            const std::map<std::string, double>& human, CorrelationLevel level,
                            std::optional<CorrelationMethod> method) {
  std::vector<std::string> only_machine;
  std::vector<std::string> only_human;
  for (const auto& [k, _] : machine) {
    if (!human.count(k)) only_machine.push_back(k);
  }
  for (const auto& [k, _] : human) {
    if (!machine.count(k)) only_human.push_back(k);
  }
  if (!only_machine.empty() || !only_human.empty()) {
    throw KeyMismatch(std::move(only_machine), std::move(only_human));
  }

  CorrelationResult out;
  std::vector<double> x;
  std::vector<double> y;
  for (const auto& [k, v] : machine) {
    out.points.push_back({k, v, human.at(k)});
    x.push_back(v);
    y.push_back(human.at(k));
  }
  out.report.level = level;
  out.report.method = method.value_or(default_method(level));
  out.report.result = out.report.method == CorrelationMethod::Pearson ? pearson(x, y) : spearman(x, y);
  return out;
}

std::map<std::string, double> rating_map(std::span<const SystemRating> ratings) {
  std::map<std::string, double> m;
  for (const auto& r : ratings) m[r.key.label()] = r.mean;
  return m;
}

std::map<std::string, double> score_map(std::span<const DialogScore> scores) {
  std::map<std::string, double> m;
  for (const auto& s : scores) m[s.dialog_id] = s.value;
  return m;
}

std::string scatter_table(std::span<const ScatterPoint> points) {
  std::string out = "id\tmachine\thuman\n";
  char buf[64];
  for (const auto& p : points) {
    out += p.id;
    std::snprintf(buf, sizeof buf, "\t%.17g\t%.17g\n", p.machine, p.human);
    out += buf;
  }
  return out;
}

std::string correlation_text(const CorrelationReport& report, const std::string& title) {
  std::string out;
  if (!title.empty()) out += title + "\n";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", report.result.coefficient);
  out += "method: " + std::string(to_string(report.method)) + "\n";
  out += "level: " + std::string(to_string(report.level)) + "\n";
  out += "n: " + std::to_string(report.result.n) + "\n";
  out += "coefficient: " + std::string(buf) + "\n";
  out += "p: " + format_p(report.result.p_value) + "\n";
  return out;
}

std::string correlation_record(const CorrelationReport& report, const std::string& config_fingerprint) {
  ojson o;
  o["kind"] = "correlation";
  o["config"] = config_fingerprint;
  o["method"] = to_string(report.method);
  o["level"] = to_string(report.level);
  o["n"] = report.result.n;
  o["coefficient"] = report.result.coefficient;
  o["p_value"] = report.result.p_value;
  o["p"] = format_p(report.result.p_value);
  return o.dump() + "\n";
}

}  // namespace dialeval
