#include "mkmmd/data.hpp"

#include "mkmmd/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace mkmmd {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_number(std::string_view token, std::size_t line_no) {
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size() || token.empty()) {
    throw DataError("line " + std::to_string(line_no) + ": cannot parse number '" + std::string(token) + "'");
  }
  if (!std::isfinite(value)) {
    throw DataError("line " + std::to_string(line_no) + ": non-finite value '" + std::string(token) + "'");
  }
  return value;
}

// Maps raw label values onto {-1, +1}; {0, 1} input is remapped.
Labels normalize_labels(const std::vector<double>& raw, bool& remapped) {
  std::set<double> alphabet(raw.begin(), raw.end());
  const bool plus_minus = std::all_of(alphabet.begin(), alphabet.end(), [](double v) { return v == 1.0 || v == -1.0; });
  const bool zero_one = std::all_of(alphabet.begin(), alphabet.end(), [](double v) { return v == 0.0 || v == 1.0; });
  remapped = false;
  if (!plus_minus && !zero_one) {
    std::ostringstream msg;
    msg << "labels must be in {-1,+1} or {0,1}; found";
    for (double v : alphabet) msg << ' ' << v;
    throw DataError(msg.str());
  }
  remapped = !plus_minus && alphabet.count(0.0) > 0;
  Labels labels(static_cast<Index>(raw.size()));
  for (std::size_t i = 0; i < raw.size(); ++i) labels(static_cast<Index>(i)) = raw[i] > 0.0 ? 1 : -1;
  return labels;
}

}  // namespace

FileFormat format_from_path(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".csv") return FileFormat::csv;
  return FileFormat::libsvm;
}

LabeledDataset load_dataset(const std::filesystem::path& path, FileFormat format, const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open data file: " + path.string());
  return format == FileFormat::csv ? parse_csv(in, options) : parse_libsvm(in, options);
}

LabeledDataset parse_csv(std::istream& in, const LoadOptions& options) {
  LabeledDataset ds;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::ptrdiff_t label_col = -1;
  std::size_t columns = 0;
  std::vector<double> values;
  std::vector<double> raw_labels;

  while (std::getline(in, line)) {
    ++line_no;
    const auto content = trim(line);
    if (content.empty()) continue;
    const auto fields = split(content, ',');
    if (!have_header) {
      have_header = true;
      columns = fields.size();
      for (std::size_t c = 0; c < fields.size(); ++c) {
        if (fields[c] == "label") {
          label_col = static_cast<std::ptrdiff_t>(c);
        } else {
          ds.feature_names.emplace_back(fields[c]);
        }
      }
      if (label_col < 0 && options.labels_required) throw DataError("line 1: CSV header has no 'label' column");
      continue;
    }
    if (fields.size() != columns) {
      throw DataError("line " + std::to_string(line_no) + ": expected " + std::to_string(columns) + " fields, found " +
                      std::to_string(fields.size()));
    }
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const double v = parse_number(fields[c], line_no);
      if (static_cast<std::ptrdiff_t>(c) == label_col) {
        raw_labels.push_back(v);
      } else {
        values.push_back(v);
      }
    }
  }

  const auto d = static_cast<Index>(ds.feature_names.size());
  const auto n = d > 0 ? static_cast<Index>(values.size()) / d : static_cast<Index>(raw_labels.size());
  ds.features = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(values.data(), n, d);
  ds.labels = normalize_labels(raw_labels, ds.labels_remapped);
  return ds;
}

LabeledDataset parse_libsvm(std::istream& in, const LoadOptions& options) {
  struct Entry {
    Index row;
    Index col;
    double value;
  };
  std::vector<Entry> entries;
  std::vector<double> raw_labels;
  Index max_col = 0;
  std::string line;
  std::size_t line_no = 0;

  while (std::getline(in, line)) {
    ++line_no;
    auto content = trim(line);
    if (const auto hash = content.find('#'); hash != std::string_view::npos) content = trim(content.substr(0, hash));
    if (content.empty()) continue;
    std::vector<std::string_view> tokens;
    for (auto tok : split(content, ' ')) {
      for (auto t : split(tok, '\t')) {
        if (!t.empty()) tokens.push_back(t);
      }
    }
    const auto row = static_cast<Index>(raw_labels.size());
    raw_labels.push_back(parse_number(tokens.front(), line_no));
    Index prev = 0;
    for (std::size_t t = 1; t < tokens.size(); ++t) {
      const auto colon = tokens[t].find(':');
      if (colon == std::string_view::npos) {
        throw DataError("line " + std::to_string(line_no) + ": expected idx:value, found '" + std::string(tokens[t]) + "'");
      }
      const double idx = parse_number(tokens[t].substr(0, colon), line_no);
      if (idx < 1 || idx != std::floor(idx)) {
        throw DataError("line " + std::to_string(line_no) + ": feature index must be a positive integer");
      }
      const auto col = static_cast<Index>(idx);
      if (col <= prev) throw DataError("line " + std::to_string(line_no) + ": feature indices must be increasing");
      if (options.dim && col > *options.dim) {
        throw DataError("line " + std::to_string(line_no) + ": feature index " + std::to_string(col) + " exceeds dimension " +
                        std::to_string(*options.dim));
      }
      prev = col;
      max_col = std::max(max_col, col);
      entries.push_back({row, col - 1, parse_number(tokens[t].substr(colon + 1), line_no)});
    }
  }

  LabeledDataset ds;
  const Index d = options.dim.value_or(max_col);
  ds.features = Eigen::MatrixXd::Zero(static_cast<Index>(raw_labels.size()), d);
  for (const auto& e : entries) ds.features(e.row, e.col) = e.value;
  for (Index c = 0; c < d; ++c) ds.feature_names.push_back("f" + std::to_string(c + 1));
  ds.labels = normalize_labels(raw_labels, ds.labels_remapped);
  return ds;
}

void write_csv(std::ostream& out, const LabeledDataset& ds) {
  for (Index c = 0; c < ds.dim(); ++c) {
    out << (c < static_cast<Index>(ds.feature_names.size()) ? ds.feature_names[static_cast<std::size_t>(c)]
                                                             : "f" + std::to_string(c + 1))
        << ',';
  }
  out << "label\n";
  char buf[32];
  for (Index i = 0; i < ds.size(); ++i) {
    for (Index c = 0; c < ds.dim(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", ds.features(i, c));
      out << buf << ',';
    }
    out << ds.labels(i) << '\n';
  }
}

void validate(const LabeledDataset& ds) {
  if (ds.labels.size() != ds.size()) throw DataError("label count does not match row count");
  if (!ds.features.allFinite()) throw DataError("features contain non-finite values");
  for (Index i = 0; i < ds.labels.size(); ++i) {
    if (ds.labels(i) != 1 && ds.labels(i) != -1) throw DataError("labels must be -1 or +1");
  }
}

ClassSplit split_by_label(const LabeledDataset& ds) {
  ClassSplit split;
  for (Index i = 0; i < ds.size(); ++i) (ds.labels(i) > 0 ? split.positive_rows : split.negative_rows).push_back(i);
  if (split.positive_rows.empty() || split.negative_rows.empty()) {
    throw DataError("both classes must be nonempty (n+ = " + std::to_string(split.positive_rows.size()) +
                    ", n- = " + std::to_string(split.negative_rows.size()) + ")");
  }
  split.positives = ds.features(split.positive_rows, Eigen::all);
  split.negatives = ds.features(split.negative_rows, Eigen::all);
  return split;
}

std::pair<LabeledDataset, DatasetStats> standardize(const LabeledDataset& ds) {
  DatasetStats stats;
  const Index n = ds.size();
  stats.mean = ds.features.colwise().mean().transpose();
  stats.stddev = ((ds.features.rowwise() - stats.mean.transpose()).array().square().colwise().sum() / static_cast<double>(n))
                     .sqrt()
                     .transpose();
  LabeledDataset out = ds;
  out.features = apply_standardization(ds.features, stats);
  const auto diam = diameter(out.features);
  stats.diameter = diam.value;
  stats.diameter_is_bound = diam.is_bound;
  return {std::move(out), std::move(stats)};
}

Eigen::MatrixXd apply_standardization(const Eigen::MatrixXd& features, const DatasetStats& stats) {
  if (features.cols() != stats.mean.size()) throw std::invalid_argument("standardization dimension mismatch");
  Eigen::MatrixXd out = features.rowwise() - stats.mean.transpose();
  for (Index c = 0; c < out.cols(); ++c) {
    if (stats.stddev(c) > 0.0) {
      out.col(c) /= stats.stddev(c);
    } else {
      out.col(c).setZero();
    }
  }
  return out;
}

std::vector<Fold> kfold_split(const LabeledDataset& ds, int k, std::uint64_t seed) {
  const Index n = ds.size();
  if (k < 2 || k > n) throw ConfigError("fold count " + std::to_string(k) + " outside [2, " + std::to_string(n) + "]");
  std::vector<Index> pos, neg;
  for (Index i = 0; i < n; ++i) (ds.labels(i) > 0 ? pos : neg).push_back(i);
  auto rng = CounterRng::stream(seed, 0x6b666f6c64ULL);
  rng.shuffle(pos.begin(), pos.end());
  rng.shuffle(neg.begin(), neg.end());

  std::vector<Fold> folds(static_cast<std::size_t>(k));
  std::vector<int> owner(static_cast<std::size_t>(n));
  std::size_t deal = 0;
  for (const auto* cls : {&pos, &neg}) {
    for (Index i : *cls) owner[static_cast<std::size_t>(i)] = static_cast<int>(deal++ % static_cast<std::size_t>(k));
  }
  for (Index i = 0; i < n; ++i) {
    const auto f = static_cast<std::size_t>(owner[static_cast<std::size_t>(i)]);
    for (std::size_t g = 0; g < folds.size(); ++g) (g == f ? folds[g].validation : folds[g].train).push_back(i);
  }
  return folds;
}

Fold holdout_split(const LabeledDataset& ds, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw ConfigError("test fraction must lie in (0, 1)");
  std::vector<Index> pos, neg;
  for (Index i = 0; i < ds.size(); ++i) (ds.labels(i) > 0 ? pos : neg).push_back(i);
  auto rng = CounterRng::stream(seed, 0x686f6c646f7574ULL);
  rng.shuffle(pos.begin(), pos.end());
  rng.shuffle(neg.begin(), neg.end());
  std::vector<char> is_test(static_cast<std::size_t>(ds.size()), 0);
  for (const auto* cls : {&pos, &neg}) {
    const auto take = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(cls->size())));
    for (std::size_t t = 0; t < take; ++t) is_test[static_cast<std::size_t>((*cls)[t])] = 1;
  }
  Fold fold;
  for (Index i = 0; i < ds.size(); ++i) (is_test[static_cast<std::size_t>(i)] ? fold.validation : fold.train).push_back(i);
  return fold;
}

LabeledDataset subset(const LabeledDataset& ds, const std::vector<Index>& rows) {
  LabeledDataset out;
  out.features = ds.features(rows, Eigen::all);
  out.labels = ds.labels(rows);
  out.feature_names = ds.feature_names;
  out.labels_remapped = ds.labels_remapped;
  return out;
}

Diameter diameter(const Eigen::MatrixXd& points) {
  const Index n = points.rows();
  if (n <= 1) return {0.0, false};
  if (n > kExactDiameterLimit) {
    const Eigen::RowVectorXd extent = points.colwise().maxCoeff() - points.colwise().minCoeff();
    return {extent.norm(), true};
  }
  double best = 0.0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) best = std::max(best, (points.row(i) - points.row(j)).squaredNorm());
  }
  return {std::sqrt(best), false};
}

LabeledDataset make_two_gaussians(Index n, const Eigen::VectorXd& mean, double stddev, std::uint64_t seed) {
  const Index d = mean.size();
  LabeledDataset ds;
  ds.features.resize(n, d);
  ds.labels.resize(n);
  auto rng = CounterRng::stream(seed, 0x7467617573ULL);
  for (Index i = 0; i < n; ++i) {
    const int y = i % 2 == 0 ? 1 : -1;
    ds.labels(i) = y;
    for (Index c = 0; c < d; ++c) ds.features(i, c) = y * mean(c) + stddev * rng.normal();
  }
  for (Index c = 0; c < d; ++c) ds.feature_names.push_back("f" + std::to_string(c + 1));
  return ds;
}

LabeledDataset make_planted_feature(Index n, Index d, std::uint64_t seed) {
  LabeledDataset ds;
  ds.features.resize(n, d);
  ds.labels.resize(n);
  auto rng = CounterRng::stream(seed, 0x706c616e74ULL);
  for (Index i = 0; i < n; ++i) {
    for (Index c = 0; c < d; ++c) ds.features(i, c) = rng.normal();
    ds.labels(i) = ds.features(i, 0) >= 0.0 ? 1 : -1;
  }
  for (Index c = 0; c < d; ++c) ds.feature_names.push_back("f" + std::to_string(c + 1));
  return ds;
}

}  // namespace mkmmd
