#include "utr/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

#include "rng.hpp"

namespace utr {

void Dataset::validate() const {
  if (features.size() != labels.size()) {
    throw DataError("feature and label counts differ");
  }
  if (labels.empty()) throw DataError("dataset is empty");
  if (n < 1) throw DataError("dataset dimension must be positive");
  for (int b : labels) {
    if (b != -1 && b != 1) throw DataError("labels must be -1 or +1");
  }
  for (const auto& row : features) {
    int prev = 0;
    for (const auto& e : row) {
      if (e.index < 1 || e.index > n) {
        throw DataError("feature index " + std::to_string(e.index) +
                        " outside [1, " + std::to_string(n) + "]");
      }
      if (e.index <= prev) throw DataError("feature indices not increasing");
      prev = e.index;
    }
  }
}

namespace {

bool parse_double(std::string_view s, double& out) {
  // std::from_chars for double is available in libstdc++ 11.
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && std::isfinite(out);
}

bool parse_int(std::string_view s, int& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

Dataset parse_libsvm(std::istream& in, std::optional<int> n_override) {
  Dataset data;
  std::vector<double> raw_labels;
  std::string line;
  std::size_t lineno = 0;
  int max_index = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream tokens(line);
    std::string tok;
    if (!(tokens >> tok)) continue;  // blank line
    double label = 0.0;
    if (!parse_double(tok, label)) {
      throw ParseError(lineno, "bad label '" + tok + "'");
    }
    SparseRow row;
    int prev = 0;
    while (tokens >> tok) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos) {
        throw ParseError(lineno, "expected index:value, got '" + tok + "'");
      }
      int idx = 0;
      double val = 0.0;
      if (!parse_int(std::string_view(tok).substr(0, colon), idx) || idx < 1) {
        throw ParseError(lineno, "bad feature index in '" + tok + "'");
      }
      if (!parse_double(std::string_view(tok).substr(colon + 1), val)) {
        throw ParseError(lineno, "bad feature value in '" + tok + "'");
      }
      if (idx <= prev) {
        throw ParseError(lineno, "indices must be strictly increasing");
      }
      prev = idx;
      max_index = std::max(max_index, idx);
      row.push_back({idx, val});
    }
    raw_labels.push_back(label);
    data.features.push_back(std::move(row));
  }
  if (raw_labels.empty()) throw DataError("no samples in LIBSVM input");

  std::set<double> distinct(raw_labels.begin(), raw_labels.end());
  const bool zero_one = std::all_of(distinct.begin(), distinct.end(),
                                    [](double v) { return v == 0.0 || v == 1.0; });
  const bool pm_one = std::all_of(distinct.begin(), distinct.end(),
                                  [](double v) { return v == -1.0 || v == 1.0; });
  if (!zero_one && !pm_one) {
    throw DataError("labels must be binary ({0,1} or {-1,+1})");
  }
  data.labels.reserve(raw_labels.size());
  for (double v : raw_labels) data.labels.push_back(v > 0.0 ? 1 : -1);

  if (n_override) {
    if (*n_override < max_index) {
      throw DataError("dimension override " + std::to_string(*n_override) +
                      " is below the largest index " +
                      std::to_string(max_index));
    }
    data.n = *n_override;
  } else {
    data.n = std::max(max_index, 1);
  }
  data.validate();
  return data;
}

Dataset load_libsvm(const std::string& path, std::optional<int> n_override) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return parse_libsvm(in, n_override);
}

void write_libsvm(std::ostream& out, const Dataset& data) {
  out << std::setprecision(17);
  for (std::size_t i = 0; i < data.size(); ++i) {
    out << (data.labels[i] > 0 ? "+1" : "-1");
    for (const auto& e : data.features[i]) out << ' ' << e.index << ':' << e.value;
    out << '\n';
  }
}

Dataset synthetic_classification(int rows, int dim, std::uint64_t seed,
                                 double margin) {
  if (rows < 1 || dim < 1) throw ConfigError("synthetic data needs rows, dim >= 1");
  detail::NormalStream rng(seed);
  Vector w(dim);
  for (int j = 0; j < dim; ++j) w[j] = rng();
  w.normalize();

  Dataset data;
  data.n = dim;
  Vector a(dim);
  while (static_cast<int>(data.size()) < rows) {
    for (int j = 0; j < dim; ++j) a[j] = rng();
    const double s = a.dot(w);
    if (std::abs(s) < margin || s == 0.0) continue;
    SparseRow row;
    row.reserve(dim);
    for (int j = 0; j < dim; ++j) row.push_back({j + 1, a[j]});
    data.features.push_back(std::move(row));
    data.labels.push_back(s > 0.0 ? 1 : -1);
  }
  return data;
}

// --- logistic ---------------------------------------------------------------

double log1pexp_neg(double t) {
  if (t >= 0.0) return std::log1p(std::exp(-t));
  return -t + std::log1p(std::exp(t));
}

namespace {

// 1 / (1 + e^t), evaluated without overflow.
double sigmoid_neg(double t) {
  if (t >= 0.0) {
    const double e = std::exp(-t);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(t));
}

}  // namespace

LogisticObjective::LogisticObjective(Dataset data, double gamma)
    : data_(std::move(data)), gamma_(gamma) {
  if (data_.size() == 0) throw ConfigError("logistic oracle needs data");
  if (!(gamma_ >= 0.0)) throw ConfigError("logistic gamma must be >= 0");
  data_.validate();
}

Vector LogisticObjective::margins(const Vector& x) const {
  Vector m(data_.size());
  for (std::size_t i = 0; i < data_.size(); ++i) {
    double s = 0.0;
    for (const auto& e : data_.features[i]) s += e.value * x[e.index - 1];
    m[i] = data_.labels[i] * s;
  }
  return m;
}

double LogisticObjective::evaluate_value(const Vector& x) const {
  const Vector m = margins(x);
  double loss = 0.0;
  for (Eigen::Index i = 0; i < m.size(); ++i) loss += log1pexp_neg(m[i]);
  return loss / static_cast<double>(m.size()) + 0.5 * gamma_ * x.squaredNorm();
}

Vector LogisticObjective::evaluate_gradient(const Vector& x) const {
  const Vector m = margins(x);
  const double inv_n = 1.0 / static_cast<double>(m.size());
  Vector g = gamma_ * x;
  for (std::size_t i = 0; i < data_.size(); ++i) {
    const double c = -data_.labels[i] * sigmoid_neg(m[i]) * inv_n;
    for (const auto& e : data_.features[i]) g[e.index - 1] += c * e.value;
  }
  return g;
}

Matrix LogisticObjective::evaluate_hessian(const Vector& x) const {
  const Vector m = margins(x);
  const double inv_n = 1.0 / static_cast<double>(m.size());
  Matrix h = Matrix::Zero(data_.n, data_.n);
  for (std::size_t i = 0; i < data_.size(); ++i) {
    const double s = sigmoid_neg(m[i]);
    const double w = s * (1.0 - s) * inv_n;
    if (w == 0.0) continue;
    const auto& row = data_.features[i];
    for (const auto& p : row) {
      for (const auto& q : row) {
        if (q.index < p.index) continue;
        h(p.index - 1, q.index - 1) += w * p.value * q.value;
      }
    }
  }
  h.triangularView<Eigen::StrictlyLower>() = h.transpose();
  h.diagonal().array() += gamma_;
  return h;
}

Vector LogisticObjective::evaluate_hessian_vector(const Vector& x,
                                                  const Vector& v) const {
  const Vector m = margins(x);
  const double inv_n = 1.0 / static_cast<double>(m.size());
  Vector out = gamma_ * v;
  for (std::size_t i = 0; i < data_.size(); ++i) {
    const double s = sigmoid_neg(m[i]);
    const double w = s * (1.0 - s) * inv_n;
    double av = 0.0;
    for (const auto& e : data_.features[i]) av += e.value * v[e.index - 1];
    const double c = w * av;
    for (const auto& e : data_.features[i]) out[e.index - 1] += c * e.value;
  }
  return out;
}

double LogisticObjective::lipschitz_bound() const {
  double mean_cube = 0.0;
  for (const auto& row : data_.features) {
    double sq = 0.0;
    for (const auto& e : row) sq += e.value * e.value;
    mean_cube += sq * std::sqrt(sq);
  }
  mean_cube /= static_cast<double>(data_.size());
  const double max_third = 1.0 / (6.0 * std::sqrt(3.0));
  return max_third * mean_cube;
}

}  // namespace utr
