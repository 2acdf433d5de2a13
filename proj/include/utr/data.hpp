#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "utr/problem.hpp"

namespace utr {

struct SparseEntry {
  int index = 0;  // 1-based feature index
  double value = 0.0;
};

using SparseRow = std::vector<SparseEntry>;

// Binary classification data. Labels are exactly -1 or +1; feature indices
// lie in [1, n].
struct Dataset {
  std::vector<SparseRow> features;
  std::vector<int> labels;
  int n = 0;

  std::size_t size() const { return labels.size(); }
  void validate() const;
};

// LIBSVM text format: "label idx:val idx:val ...", 1-based strictly
// increasing indices. Labels {0,1} or {-1,+1} are normalized to {-1,+1}.
// `n_override` fixes the dimension (must cover every observed index).
Dataset load_libsvm(const std::string& path,
                    std::optional<int> n_override = std::nullopt);
Dataset parse_libsvm(std::istream& in,
                     std::optional<int> n_override = std::nullopt);
void write_libsvm(std::ostream& out, const Dataset& data);

// Dense standard-normal features labelled by a random unit hyperplane w.
// Samples with |a'w| < margin are redrawn, so the data are separable with
// margin at least `margin`.
Dataset synthetic_classification(int rows, int dim, std::uint64_t seed,
                                 double margin = 0.0);

inline constexpr double kDefaultLogisticGamma = 1e-8;

// f(x) = (1/N) sum log(1 + exp(-b_i a_i'x)) + gamma/2 ||x||^2
class LogisticObjective final : public Objective {
 public:
  LogisticObjective(Dataset data, double gamma = kDefaultLogisticGamma);

  int dimension() const override { return data_.n; }
  const Dataset& data() const { return data_; }
  double gamma() const { return gamma_; }

  // Global Hessian Lipschitz constant: max|l'''| * mean ||a_i||^3 with
  // l(t) = log(1 + e^{-t}) and max|l'''| = 1/(6 sqrt 3).
  double lipschitz_bound() const;

 protected:
  double evaluate_value(const Vector& x) const override;
  Vector evaluate_gradient(const Vector& x) const override;
  Matrix evaluate_hessian(const Vector& x) const override;
  Vector evaluate_hessian_vector(const Vector& x,
                                 const Vector& v) const override;

 private:
  Vector margins(const Vector& x) const;  // b_i a_i'x

  Dataset data_;
  double gamma_;
};

// Stable log(1 + exp(-t)).
double log1pexp_neg(double t);

}  // namespace utr
