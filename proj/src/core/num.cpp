#include "num.hpp"

#include <cmath>

namespace embedkit::num {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Rng::Rng(std::uint64_t seed) {
  std::uint64_t x = seed;
  for (auto& w : s_) w = splitmix64(x);
}

std::uint64_t Rng::next_u64() {
  const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

std::size_t Rng::uniform_index(std::size_t n) {
  if (n == 0) fail(ErrCode::InvalidArgument, "uniform_index: n must be positive");
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t threshold = (0ULL - bound) % bound;
  for (;;) {
    const std::uint64_t r = next_u64();
    if (r >= threshold) return static_cast<std::size_t>(r % bound);
  }
}

double Rng::normal() {
  // Box-Muller without a cached spare so the draw count stays predictable.
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

bool all_finite(std::span<const double> x) {
  for (double v : x) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

void require_finite(std::span<const double> x, std::string_view what) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i])) {
      fail(ErrCode::Numeric, "non-finite value in ", what, " at index ", i);
    }
  }
}

namespace {
void require_matvec_shapes(const Matrix& w, std::span<const double> x, const char* op) {
  if (w.cols() != x.size()) {
    fail(ErrCode::Shape, op, ": W is ", w.rows(), "x", w.cols(), " but x has length ", x.size());
  }
}
}  // namespace

Vector matvec(const Matrix& w, std::span<const double> x) {
  require_matvec_shapes(w, x, "matvec");
  Vector y(w.rows(), 0.0);
  for (std::size_t i = 0; i < w.rows(); ++i) {
    const double* row = w.flat().data() + i * w.cols();
    double acc = 0.0;
    for (std::size_t j = 0; j < w.cols(); ++j) acc += row[j] * x[j];
    y[i] = acc;
  }
  return y;
}

Vector matvec_transposed(const Matrix& w, std::span<const double> x) {
  if (w.rows() != x.size()) {
    fail(ErrCode::Shape, "matvec_transposed: W is ", w.rows(), "x", w.cols(), " but x has length ",
         x.size());
  }
  Vector y(w.cols(), 0.0);
  for (std::size_t i = 0; i < w.rows(); ++i) {
    const double* row = w.flat().data() + i * w.cols();
    const double xi = x[i];
    for (std::size_t j = 0; j < w.cols(); ++j) y[j] += row[j] * xi;
  }
  return y;
}

Vector affine(const Matrix& w, const Vector& b, std::span<const double> x) {
  require_matvec_shapes(w, x, "affine");
  if (b.size() != w.rows()) {
    fail(ErrCode::Shape, "affine: W is ", w.rows(), "x", w.cols(), " but b has length ", b.size());
  }
  Vector y = matvec(w, x);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += b[i];
  return y;
}

Vector affine_tanh(const Matrix& w, const Vector& b, std::span<const double> x) {
  Vector y = affine(w, b, x);
  for (double& v : y) v = std::tanh(v);
  return y;
}

void add_outer(Matrix& acc, std::span<const double> u, std::span<const double> v) {
  if (acc.rows() != u.size() || acc.cols() != v.size()) {
    fail(ErrCode::Shape, "add_outer: acc is ", acc.rows(), "x", acc.cols(), " but u,v have lengths ",
         u.size(), ",", v.size());
  }
  for (std::size_t i = 0; i < u.size(); ++i) {
    double* row = acc.flat().data() + i * acc.cols();
    const double ui = u[i];
    for (std::size_t j = 0; j < v.size(); ++j) row[j] += ui * v[j];
  }
}

void add_scaled(std::span<double> acc, std::span<const double> x, double s) {
  if (acc.size() != x.size()) {
    fail(ErrCode::Shape, "add_scaled: lengths ", acc.size(), " and ", x.size(), " differ");
  }
  for (std::size_t i = 0; i < x.size(); ++i) acc[i] += s * x[i];
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    fail(ErrCode::Shape, "dot: lengths ", a.size(), " and ", b.size(), " differ");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    fail(ErrCode::Shape, "squared_distance: lengths ", a.size(), " and ", b.size(), " differ");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

void AdamState::restore(std::vector<double> m, std::vector<double> v, std::int64_t step) {
  if (m.size() != v.size()) {
    fail(ErrCode::Shape, "AdamState::restore: m and v sizes differ (", m.size(), " vs ", v.size(), ")");
  }
  m_ = std::move(m);
  v_ = std::move(v);
  step_ = step;
}

void AdamState::step(std::span<const TensorView> params, std::span<const ConstTensorView> grads) {
  if (params.size() != grads.size()) {
    fail(ErrCode::Shape, "adam_step: ", params.size(), " parameter tensors vs ", grads.size(),
         " gradient tensors");
  }
  std::size_t total = 0;
  for (std::size_t t = 0; t < params.size(); ++t) {
    if (params[t].data.size() != grads[t].data.size()) {
      fail(ErrCode::Shape, "adam_step: tensor ", params[t].name, " has ", params[t].data.size(),
           " parameters but gradient ", grads[t].name, " has ", grads[t].data.size());
    }
    total += params[t].data.size();
  }
  if (m_.empty()) {
    m_.assign(total, 0.0);
    v_.assign(total, 0.0);
  } else if (m_.size() != total) {
    fail(ErrCode::Shape, "adam_step: state holds ", m_.size(), " moments but parameters have ",
         total, " entries");
  }

  ++step_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(step_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(step_));

  std::size_t k = 0;
  for (std::size_t t = 0; t < params.size(); ++t) {
    auto p = params[t].data;
    auto g = grads[t].data;
    for (std::size_t i = 0; i < p.size(); ++i, ++k) {
      if (!std::isfinite(g[i])) {
        fail(ErrCode::Numeric, "adam_step: non-finite gradient in ", params[t].name, " at index ", i);
      }
      m_[k] = cfg_.beta1 * m_[k] + (1.0 - cfg_.beta1) * g[i];
      v_[k] = cfg_.beta2 * v_[k] + (1.0 - cfg_.beta2) * g[i] * g[i];
      const double mhat = m_[k] / bc1;
      const double vhat = v_[k] / bc2;
      p[i] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
    }
  }
}

Vector dropout(const Vector& x, double ratio, Mode mode, Rng& rng) {
  if (ratio < 0.0 || ratio >= 1.0) {
    fail(ErrCode::Config, "dropout: ratio must lie in [0, 1), got ", ratio);
  }
  if (mode == Mode::Infer || ratio == 0.0) return x;
  Vector y(x.size());
  const double scale = 1.0 / (1.0 - ratio);
  for (std::size_t i = 0; i < x.size(); ++i) {
    y[i] = rng.uniform() < ratio ? 0.0 : x[i] * scale;
  }
  return y;
}

void dropout_mask(Rng& rng, double ratio, std::span<double> mask) {
  if (ratio < 0.0 || ratio >= 1.0) {
    fail(ErrCode::Config, "dropout_mask: ratio must lie in [0, 1), got ", ratio);
  }
  const double scale = 1.0 / (1.0 - ratio);
  for (double& m : mask) m = rng.uniform() < ratio ? 0.0 : scale;
}

namespace {
double rel_err(double fd, double an) {
  const double denom = std::max(std::abs(fd) + std::abs(an), 1e-12);
  return std::abs(fd - an) / denom;
}
}  // namespace

double grad_check(const std::function<double(std::span<const double>)>& f, std::span<double> x,
                  std::span<const double> analytic, double h) {
  if (x.size() != analytic.size()) {
    fail(ErrCode::Shape, "grad_check: x has ", x.size(), " coordinates but analytic gradient has ",
         analytic.size());
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = x[i];
    x[i] = saved + h;
    const double fp = f(x);
    x[i] = saved - h;
    const double fm = f(x);
    x[i] = saved;
    if (!std::isfinite(fp) || !std::isfinite(fm)) {
      fail(ErrCode::Numeric, "grad_check: non-finite function value at coordinate ", i);
    }
    const double fd = (fp - fm) / (2.0 * h);
    worst = std::max(worst, rel_err(fd, analytic[i]));
  }
  return worst;
}

GradCheckReport grad_check_params(const std::function<double()>& f,
                                  std::span<const TensorView> params,
                                  std::span<const ConstTensorView> analytic, double h) {
  if (params.size() != analytic.size()) {
    fail(ErrCode::Shape, "grad_check_params: ", params.size(), " tensors vs ", analytic.size(),
         " gradients");
  }
  GradCheckReport report;
  for (std::size_t t = 0; t < params.size(); ++t) {
    auto p = params[t].data;
    auto g = analytic[t].data;
    if (p.size() != g.size()) {
      fail(ErrCode::Shape, "grad_check_params: tensor ", params[t].name, " size mismatch");
    }
    double tensor_worst = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double saved = p[i];
      p[i] = saved + h;
      const double fp = f();
      p[i] = saved - h;
      const double fm = f();
      p[i] = saved;
      if (!std::isfinite(fp) || !std::isfinite(fm)) {
        fail(ErrCode::Numeric, "grad_check_params: non-finite value perturbing ", params[t].name,
             " at index ", i);
      }
      const double fd = (fp - fm) / (2.0 * h);
      tensor_worst = std::max(tensor_worst, rel_err(fd, g[i]));
    }
    report.per_tensor.emplace_back(params[t].name, tensor_worst);
    report.max_rel_err = std::max(report.max_rel_err, tensor_worst);
  }
  return report;
}

}  // namespace embedkit::num
