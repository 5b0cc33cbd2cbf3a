#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"

namespace embedkit::num {

using Vector = std::vector<double>;

// Dense row-major matrix of 64-bit reals.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  std::span<double> flat() { return {data_.data(), data_.size()}; }
  std::span<const double> flat() const { return {data_.data(), data_.size()}; }

  void fill(double v) { data_.assign(data_.size(), v); }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> data_;
};

// Mutable and read-only views used to iterate parameter sets uniformly
// (Adam updates, gradient checks, checkpoint serialization).
struct TensorView {
  std::string name;
  std::span<double> data;
  std::vector<std::uint32_t> dims;
};

struct ConstTensorView {
  std::string name;
  std::span<const double> data;
  std::vector<std::uint32_t> dims;

  ConstTensorView() = default;
  ConstTensorView(std::string n, std::span<const double> d, std::vector<std::uint32_t> dd)
      : name(std::move(n)), data(d), dims(std::move(dd)) {}
  ConstTensorView(const TensorView& t) : name(t.name), data(t.data), dims(t.dims) {}
};

inline TensorView view(const std::string& name, Matrix& m) {
  return {name, m.flat(), {static_cast<std::uint32_t>(m.rows()), static_cast<std::uint32_t>(m.cols())}};
}
inline TensorView view(const std::string& name, Vector& v) {
  return {name, {v.data(), v.size()}, {static_cast<std::uint32_t>(v.size())}};
}
inline ConstTensorView view(const std::string& name, const Matrix& m) {
  return {name, m.flat(), {static_cast<std::uint32_t>(m.rows()), static_cast<std::uint32_t>(m.cols())}};
}
inline ConstTensorView view(const std::string& name, const Vector& v) {
  return {name, {v.data(), v.size()}, {static_cast<std::uint32_t>(v.size())}};
}

// xoshiro256++ seeded through splitmix64. Chosen over <random> engines so the
// stream is bit-identical across platforms and the state serializes as four
// words in checkpoints.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();
  double uniform();                          // [0, 1)
  double uniform(double lo, double hi);      // [lo, hi)
  std::size_t uniform_index(std::size_t n);  // unbiased in [0, n)
  double normal();                           // standard normal (Box-Muller)

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[uniform_index(i)]);
    }
  }

  std::array<std::uint64_t, 4> state() const { return s_; }
  void set_state(const std::array<std::uint64_t, 4>& s) { s_ = s; }

 private:
  std::array<std::uint64_t, 4> s_{};
};

enum class Mode { Train, Infer };

double sigmoid(double x);
bool all_finite(std::span<const double> x);
void require_finite(std::span<const double> x, std::string_view what);

// y = W x
Vector matvec(const Matrix& w, std::span<const double> x);
// y = W^T x
Vector matvec_transposed(const Matrix& w, std::span<const double> x);
// y = W x + b
Vector affine(const Matrix& w, const Vector& b, std::span<const double> x);
// y = tanh(W x + b); every output coordinate lies strictly inside (-1, 1)
Vector affine_tanh(const Matrix& w, const Vector& b, std::span<const double> x);
// acc += u v^T
void add_outer(Matrix& acc, std::span<const double> u, std::span<const double> v);
void add_scaled(std::span<double> acc, std::span<const double> x, double s);
double dot(std::span<const double> a, std::span<const double> b);
double squared_distance(std::span<const double> a, std::span<const double> b);

struct AdamConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// First/second moment buffers over the concatenation of a fixed tensor list.
class AdamState {
 public:
  AdamState() = default;
  explicit AdamState(AdamConfig cfg) : cfg_(cfg) {}

  void step(std::span<const TensorView> params, std::span<const ConstTensorView> grads);

  std::int64_t step_count() const { return step_; }
  const AdamConfig& config() const { return cfg_; }
  std::vector<double>& m() { return m_; }
  std::vector<double>& v() { return v_; }
  const std::vector<double>& m() const { return m_; }
  const std::vector<double>& v() const { return v_; }
  void restore(std::vector<double> m, std::vector<double> v, std::int64_t step);

 private:
  AdamConfig cfg_;
  std::vector<double> m_, v_;
  std::int64_t step_ = 0;
};

// Inverted dropout. Train mode zeroes each entry with probability `ratio` and
// scales survivors by 1/(1-ratio); infer mode is the identity.
Vector dropout(const Vector& x, double ratio, Mode mode, Rng& rng);

// Writes the per-coordinate multipliers (0 or 1/(1-ratio)) drawn from `rng`.
// An entry is dropped when rng.uniform() < ratio.
void dropout_mask(Rng& rng, double ratio, std::span<double> mask);

// Central-difference gradient check. Returns
//   max_i |g_fd,i - g_an,i| / max(|g_fd,i| + |g_an,i|, 1e-12).
// `f` is re-evaluated with coordinates of `x` perturbed in place.
double grad_check(const std::function<double(std::span<const double>)>& f, std::span<double> x,
                  std::span<const double> analytic, double h);

// Same check over a parameter set; `f` re-runs the forward pass against the
// (perturbed) tensors. Reports the worst relative error per tensor name.
struct GradCheckReport {
  double max_rel_err = 0.0;
  std::vector<std::pair<std::string, double>> per_tensor;
};
GradCheckReport grad_check_params(const std::function<double()>& f,
                                  std::span<const TensorView> params,
                                  std::span<const ConstTensorView> analytic, double h);

}  // namespace embedkit::num
