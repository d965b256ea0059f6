#include "milda/csv_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <string_view>

namespace milda {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::optional<double> parse_double(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    // from_chars rejects "nan"/"inf" spellings only on some toolchains; keep
    // them parseable so validation can report NonFiniteEntry.
    if (s == "nan" || s == "NaN") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf" || s == "Inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf" || s == "-Inf") return -std::numeric_limits<double>::infinity();
    return std::nullopt;
  }
  return v;
}

long parse_int(std::string_view s, std::size_t line_no) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    raise(ErrorCode::ParseError, "line " + std::to_string(line_no) +
                                     ": expected integer, got '" +
                                     std::string(s) + "'");
  }
  return v;
}

}  // namespace

LabeledSampleSet CsvDataset::labeled() const {
  if (!labels) raise(ErrorCode::ParseError, "dataset has no label column");
  return LabeledSampleSet(samples, *labels);
}

CsvDataset read_dataset_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  long label_col = -1;
  long epoch_col = -1;
  long n_cols = -1;
  std::vector<std::vector<double>> rows;
  std::vector<Label> labels;
  std::vector<int> epochs;

  while (std::getline(in, line)) {
    ++line_no;
    const auto view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    const auto fields = split(view);

    if (!header_seen && rows.empty()) {
      header_seen = true;
      if (!parse_double(fields.front())) {
        n_cols = static_cast<long>(fields.size());
        for (long c = 0; c < n_cols; ++c) {
          if (fields[c] == "label") label_col = c;
          if (fields[c] == "epoch") epoch_col = c;
        }
        continue;
      }
    }
    if (n_cols < 0) n_cols = static_cast<long>(fields.size());
    if (static_cast<long>(fields.size()) != n_cols) {
      raise(ErrorCode::ParseError, "line " + std::to_string(line_no) +
                                       ": expected " + std::to_string(n_cols) +
                                       " fields");
    }
    std::vector<double> row;
    for (long c = 0; c < n_cols; ++c) {
      if (c == label_col) {
        labels.push_back(label_from_int(parse_int(fields[c], line_no)));
      } else if (c == epoch_col) {
        epochs.push_back(static_cast<int>(parse_int(fields[c], line_no)));
      } else {
        auto v = parse_double(fields[c]);
        if (!v) {
          raise(ErrorCode::ParseError, "line " + std::to_string(line_no) +
                                           ": bad number '" +
                                           std::string(fields[c]) + "'");
        }
        row.push_back(*v);
      }
    }
    rows.push_back(std::move(row));
  }

  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index d = n == 0 ? 0 : static_cast<Eigen::Index>(rows.front().size());
  Matrix data(n, d);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < d; ++j) data(i, j) = rows[i][j];

  CsvDataset out{SampleSet(std::move(data)), std::nullopt, std::nullopt};
  if (label_col >= 0) out.labels = std::move(labels);
  if (epoch_col >= 0) out.epochs = std::move(epochs);
  return out;
}

CsvDataset read_dataset_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::ConfigError, "cannot open '" + path + "'");
  return read_dataset_csv(in);
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ec == std::errc() ? ptr : buf);
}

void write_dataset_csv(std::ostream& out, const SampleSet& samples,
                       const CsvWriteOptions& opts) {
  const auto& x = samples.data();
  for (const auto& c : opts.comments) out << "# " << c << '\n';
  for (Eigen::Index j = 0; j < x.cols(); ++j) out << (j ? "," : "") << 'x' << j;
  if (opts.labels) out << ",label";
  if (opts.epochs) out << ",epoch";
  out << '\n';
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      out << (j ? "," : "") << format_double(x(i, j));
    }
    if (opts.labels) out << ',' << to_int((*opts.labels)[i]);
    if (opts.epochs) out << ',' << (*opts.epochs)[i];
    out << '\n';
  }
}

}  // namespace milda
