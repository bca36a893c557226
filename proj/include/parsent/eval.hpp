#pragma once

// Confusion matrices, accuracy / precision / recall / F1 with support-weighted
// averaging, and TSV / JSON report rendering.

#include <charconv>
#include <cmath>
#include <cstddef>
#include <string>
#include <system_error>
#include <utility>
#include <vector>

#include <json.hpp>

#include "parsent/error.hpp"

namespace parsent {

/// counts[true][predicted].
struct ConfusionMatrix {
  std::vector<std::string> class_names;
  std::vector<std::vector<std::size_t>> counts;

  std::size_t num_classes() const noexcept { return class_names.size(); }

  std::size_t total() const {
    std::size_t n = 0;
    for (const auto& row : counts)
      for (auto v : row) n += v;
    return n;
  }
  std::size_t trace() const {
    std::size_t n = 0;
    for (std::size_t c = 0; c < counts.size(); ++c) n += counts[c][c];
    return n;
  }
  std::size_t row_sum(std::size_t c) const {
    std::size_t n = 0;
    for (auto v : counts[c]) n += v;
    return n;
  }
  std::size_t col_sum(std::size_t c) const {
    std::size_t n = 0;
    for (const auto& row : counts) n += row[c];
    return n;
  }
};

inline ConfusionMatrix confusion_matrix(const std::vector<std::size_t>& preds,
                                        const std::vector<std::size_t>& labels,
                                        std::vector<std::string> class_names) {
  if (preds.size() != labels.size())
    throw LengthMismatch(std::to_string(preds.size()) + " predictions vs " +
                         std::to_string(labels.size()) + " labels");
  if (preds.empty()) throw LengthMismatch("nothing to evaluate");
  const std::size_t c = class_names.size();
  ConfusionMatrix cm{std::move(class_names), std::vector<std::vector<std::size_t>>(c, std::vector<std::size_t>(c, 0))};
  for (std::size_t k = 0; k < preds.size(); ++k) {
    if (preds[k] >= c || labels[k] >= c) throw ConfigError("class index out of range");
    ++cm.counts[labels[k]][preds[k]];
  }
  return cm;
}

inline double accuracy(const ConfusionMatrix& cm) {
  const auto n = cm.total();
  return n == 0 ? 0.0 : static_cast<double>(cm.trace()) / static_cast<double>(n);
}

struct ClassScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

namespace detail {
inline double ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }
}  // namespace detail

/// One-vs-rest scores of class `c`; any 0/0 is reported as 0.
inline ClassScores per_class_prf(const ConfusionMatrix& cm, std::size_t c) {
  const double tp = static_cast<double>(cm.counts[c][c]);
  const double fp = static_cast<double>(cm.col_sum(c)) - tp;
  const double fn = static_cast<double>(cm.row_sum(c)) - tp;
  ClassScores s;
  s.precision = detail::ratio(tp, tp + fp);
  s.recall = detail::ratio(tp, tp + fn);
  s.f1 = detail::ratio(2.0 * s.precision * s.recall, s.precision + s.recall);
  s.support = cm.row_sum(c);
  return s;
}

struct MetricsReport {
  std::vector<std::string> class_names;
  std::vector<ClassScores> per_class;
  double accuracy = 0.0;
  double precision = 0.0;  // support-weighted
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t total = 0;
};

inline MetricsReport weighted_metrics(const ConfusionMatrix& cm) {
  MetricsReport r;
  r.class_names = cm.class_names;
  r.total = cm.total();
  r.accuracy = accuracy(cm);
  const double n = static_cast<double>(r.total);
  for (std::size_t c = 0; c < cm.num_classes(); ++c) {
    const auto s = per_class_prf(cm, c);
    r.per_class.push_back(s);
    const double w = static_cast<double>(s.support);
    r.precision += w * s.precision;
    r.f1 += w * s.f1;
  }
  if (n > 0) {
    r.precision /= n;
    r.f1 /= n;
  }
  // support_c * (TP_c / support_c) == TP_c, so the weighted recall sums the
  // true positives directly and equals accuracy bit for bit.
  double tp_sum = 0.0;
  for (std::size_t c = 0; c < cm.num_classes(); ++c)
    if (r.per_class[c].support > 0) tp_sum += static_cast<double>(cm.counts[c][c]);
  r.recall = n > 0 ? tp_sum / n : 0.0;
  return r;
}

/// Rounds half-up at `decimals` places using the value's shortest decimal
/// representation, so 0.8915 prints as 0.892.
inline std::string format_fixed(double value, int decimals = 3) {
  if (!std::isfinite(value)) return value != value ? "nan" : (value > 0 ? "inf" : "-inf");
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed);
  if (ec != std::errc()) return "nan";
  std::string s(buf, end);
  bool neg = false;
  if (!s.empty() && s[0] == '-') {
    neg = true;
    s.erase(0, 1);
  }
  auto dot = s.find('.');
  std::string ip = dot == std::string::npos ? s : s.substr(0, dot);
  std::string fp = dot == std::string::npos ? "" : s.substr(dot + 1);
  const bool round_up = fp.size() > static_cast<std::size_t>(decimals) &&
                        fp[static_cast<std::size_t>(decimals)] >= '5';
  fp.resize(static_cast<std::size_t>(decimals), '0');
  std::string digits = ip + fp;
  if (round_up) {
    std::size_t i = digits.size();
    while (i > 0) {
      --i;
      if (digits[i] == '9') {
        digits[i] = '0';
      } else {
        ++digits[i];
        break;
      }
      if (i == 0) digits.insert(digits.begin(), '1');
    }
  }
  const std::size_t int_len = digits.size() - static_cast<std::size_t>(decimals);
  std::string out = digits.substr(0, int_len);
  if (decimals > 0) out += "." + digits.substr(int_len);
  const bool zero = out.find_first_not_of("0.") == std::string::npos;
  return (neg && !zero ? "-" : "") + out;
}

enum class ReportFormat { Tsv, Json };

inline ReportFormat parse_report_format(const std::string& s) {
  if (s == "tsv") return ReportFormat::Tsv;
  if (s == "json") return ReportFormat::Json;
  throw ConfigError("unknown report format '" + s + "' (expected tsv or json)");
}

using NamedReport = std::pair<std::string, MetricsReport>;

inline nlohmann::json report_to_json(const std::vector<NamedReport>& reports) {
  nlohmann::json models = nlohmann::json::array();
  for (const auto& [name, r] : reports) {
    nlohmann::json per_class = nlohmann::json::array();
    for (std::size_t c = 0; c < r.per_class.size(); ++c)
      per_class.push_back({{"class", r.class_names[c]},
                           {"precision", r.per_class[c].precision},
                           {"recall", r.per_class[c].recall},
                           {"f1", r.per_class[c].f1},
                           {"support", r.per_class[c].support}});
    models.push_back({{"model", name},
                      {"accuracy", r.accuracy},
                      {"precision", r.precision},
                      {"recall", r.recall},
                      {"f1", r.f1},
                      {"support", r.total},
                      {"per_class", per_class}});
  }
  return {{"models", models}};
}

/// TSV table (Model, Accuracy, Precision, Recall, F1-score; 3 decimals) or
/// a JSON document with per-class detail. Rows keep the given order.
inline std::string render_report(const std::vector<NamedReport>& reports, ReportFormat format) {
  if (reports.empty()) throw ConfigError("report needs at least one model");
  if (format == ReportFormat::Json) return report_to_json(reports).dump(2) + "\n";
  std::string out = "Model\tAccuracy\tPrecision\tRecall\tF1-score\n";
  for (const auto& [name, r] : reports)
    out += name + "\t" + format_fixed(r.accuracy) + "\t" + format_fixed(r.precision) + "\t" +
           format_fixed(r.recall) + "\t" + format_fixed(r.f1) + "\n";
  return out;
}

}  // namespace parsent
