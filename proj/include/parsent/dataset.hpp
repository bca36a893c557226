#pragma once

// Labeled datasets stored as UTF-8 CSV with a `text,label` header
// (RFC-4180 quoting).

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "parsent/error.hpp"
#include "parsent/preprocess.hpp"
#include "parsent/utf8.hpp"

namespace parsent {

struct LabeledDataset {
  std::vector<RawDocument> documents;
  std::vector<std::string> class_names;  // sorted, distinct

  std::size_t num_classes() const noexcept { return class_names.size(); }

  std::size_t class_index(const std::string& label) const {
    auto it = std::lower_bound(class_names.begin(), class_names.end(), label);
    if (it == class_names.end() || *it != label) throw FormatError("unknown label '" + label + "'");
    return static_cast<std::size_t>(it - class_names.begin());
  }

  std::vector<std::size_t> label_indices() const {
    std::vector<std::size_t> out;
    out.reserve(documents.size());
    for (const auto& d : documents) out.push_back(class_index(d.label));
    return out;
  }
};

namespace detail {

/// RFC-4180 record reader. Returns false at end of input.
class CsvReader {
 public:
  CsvReader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

  std::size_t line() const noexcept { return record_line_; }

  bool next(std::vector<std::string>& fields) {
    fields.clear();
    int ch = in_.get();
    if (ch == EOF) return false;
    record_line_ = line_ + 1;
    std::string field;
    bool quoted = false, after_quote = false, field_started = false;
    for (;; ch = in_.get()) {
      if (quoted) {
        if (ch == EOF) throw FormatError(where() + ": unterminated quoted field");
        if (ch == '"') {
          if (in_.peek() == '"') {
            in_.get();
            field.push_back('"');
          } else {
            quoted = false;
            after_quote = true;
          }
        } else {
          if (ch == '\n') ++line_;
          field.push_back(static_cast<char>(ch));
        }
        continue;
      }
      if (ch == EOF || ch == '\n' || (ch == '\r' && in_.peek() == '\n')) {
        if (ch == '\r') in_.get();
        if (ch != EOF) ++line_;
        fields.push_back(std::move(field));
        return true;
      }
      if (ch == ',') {
        fields.push_back(std::move(field));
        field.clear();
        after_quote = field_started = false;
        continue;
      }
      if (after_quote) throw FormatError(where() + ": characters after closing quote");
      if (ch == '"') {
        if (field_started) throw FormatError(where() + ": quote inside unquoted field");
        quoted = true;
        field_started = true;
        continue;
      }
      field_started = true;
      field.push_back(static_cast<char>(ch));
    }
  }

  std::string where() const { return source_ + ":" + std::to_string(record_line_); }

 private:
  std::istream& in_;
  std::string source_;
  std::size_t line_ = 0;
  std::size_t record_line_ = 0;
};

inline bool needs_quotes(const std::string& s) {
  return s.find_first_of(",\"\r\n") != std::string::npos || (!s.empty() && (s.front() == ' ' || s.back() == ' '));
}

inline std::string csv_field(const std::string& s) {
  if (!needs_quotes(s)) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace detail

inline LabeledDataset read_dataset(std::istream& in, const std::string& source = "<dataset>") {
  detail::CsvReader reader(in, source);
  std::vector<std::string> fields;
  if (!reader.next(fields)) throw FormatError(source + ": missing header");
  if (!fields.empty() && fields[0].starts_with("\xEF\xBB\xBF")) fields[0].erase(0, 3);
  long text_col = -1, label_col = -1;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (fields[i] == "text") text_col = static_cast<long>(i);
    if (fields[i] == "label") label_col = static_cast<long>(i);
  }
  if (text_col < 0 || label_col < 0)
    throw FormatError(source + ":1: header must contain 'text' and 'label' columns");
  const std::size_t width = fields.size();

  LabeledDataset ds;
  std::set<std::string> labels;
  while (reader.next(fields)) {
    if (fields.size() == 1 && fields[0].empty()) continue;  // blank line
    if (fields.size() != width)
      throw FormatError(reader.where() + ": expected " + std::to_string(width) + " fields, got " +
                        std::to_string(fields.size()));
    RawDocument doc{fields[static_cast<std::size_t>(text_col)], fields[static_cast<std::size_t>(label_col)]};
    if (!utf8::is_valid(doc.text) || !utf8::is_valid(doc.label))
      throw FormatError(reader.where() + ": invalid UTF-8");
    if (doc.label.empty()) throw FormatError(reader.where() + ": empty label");
    labels.insert(doc.label);
    ds.documents.push_back(std::move(doc));
  }
  if (ds.documents.empty()) throw EmptyDataset(source + ": no data rows");
  ds.class_names.assign(labels.begin(), labels.end());
  return ds;
}

inline LabeledDataset load_dataset(const std::string& path) {
  auto in = detail::open_input(path);
  return read_dataset(in, path);
}

inline void write_dataset(std::ostream& out, const std::vector<RawDocument>& docs) {
  out << "text,label\n";
  for (const auto& d : docs) out << detail::csv_field(d.text) << ',' << detail::csv_field(d.label) << '\n';
}

}  // namespace parsent
