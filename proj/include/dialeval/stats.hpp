#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dialeval/ranker.hpp"

namespace dialeval {

enum class CorrelationMethod { Pearson, Spearman };
enum class CorrelationLevel { System, Dialog };

std::string_view to_string(CorrelationMethod m);
std::string_view to_string(CorrelationLevel l);
CorrelationLevel parse_level(std::string_view s);  // "system" | "dialog"
CorrelationMethod parse_method(std::string_view s);  // "pearson" | "spearman"

struct Correlation {
  double coefficient = 0;
  double p_value = 1;  // two-tailed
  std::size_t n = 0;
};

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double incomplete_beta(double a, double b, double x);

// Two-tailed p of Student's t with `df` degrees of freedom.
double student_t_two_tailed_p(double t, double df);

// p for a correlation coefficient r over n points, via t = r*sqrt(n-2)/sqrt(1-r^2).
double correlation_p_value(double r, std::size_t n);

// Both throw DegenerateSeries for n < 3, length mismatch, non-finite input
// or a zero-variance series.
Correlation pearson(std::span<const double> x, std::span<const double> y);
Correlation spearman(std::span<const double> x, std::span<const double> y);

// 1-based ranks; tied values share the mean of the ranks they span.
std::vector<double> average_ranks(std::span<const double> x);

// "0.033", or "< 0.001" below that.
std::string format_p(double p);

struct CorrelationReport {
  CorrelationMethod method = CorrelationMethod::Pearson;
  CorrelationLevel level = CorrelationLevel::System;
  Correlation result;
};

struct ScatterPoint {
  std::string id;
  double machine = 0;
  double human = 0;
};

struct CorrelationResult {
  CorrelationReport report;
  std::vector<ScatterPoint> points;  // sorted by id
};

// Pearson at system level and Spearman at dialog level unless overridden.
CorrelationMethod default_method(CorrelationLevel level);

// Keys must match one-to-one; KeyMismatch lists the difference otherwise.
CorrelationResult correlate(const std::map<std::string, double>& machine,
                            const std::map<std::string, double>& human, CorrelationLevel level,
                            std::optional<CorrelationMethod> method = std::nullopt);

std::map<std::string, double> rating_map(std::span<const SystemRating> ratings);
std::map<std::string, double> score_map(std::span<const DialogScore> scores);

std::string scatter_table(std::span<const ScatterPoint> points);  // tab-separated, with header
std::string correlation_text(const CorrelationReport& report, const std::string& title = {});
std::string correlation_record(const CorrelationReport& report, const std::string& config_fingerprint);

}  // namespace dialeval
