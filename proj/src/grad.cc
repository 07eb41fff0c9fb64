#include "redsum/grad.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace redsum::grad {

namespace {

std::size_t product(const std::vector<std::size_t>& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::string shape_str(const Tensor& t) { return std::to_string(t.rows()) + "x" + std::to_string(t.cols()); }

void require_same(const Tensor& a, const Tensor& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument(std::string(op) + ": shape mismatch " + shape_str(a) + " vs " + shape_str(b));
}

Tensor matmul_values(const Tensor& a, const Tensor& b) {
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  Tensor c({m, n});
  for (std::size_t i = 0; i < m; ++i) {
    double* crow = &c.values[i * n];
    for (std::size_t p = 0; p < k; ++p) {
      const double av = a.values[i * k + p];
      if (av == 0.0) continue;
      const double* brow = &b.values[p * n];
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
  return c;
}

Tensor transpose_values(const Tensor& a) {
  const std::size_t r = a.rows(), c = a.cols();
  Tensor t({c, r});
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) t.values[j * r + i] = a.values[i * c + j];
  return t;
}

}  // namespace

Tensor::Tensor(std::vector<std::size_t> s, double fill) : shape(std::move(s)), values(product(shape), fill) {}

Tensor::Tensor(std::vector<std::size_t> s, std::vector<double> v) : shape(std::move(s)), values(std::move(v)) {
  if (values.size() != product(shape)) throw std::invalid_argument("tensor values do not match shape");
}

Tensor Tensor::matrix(std::size_t rows, std::size_t cols, std::vector<double> values) {
  return Tensor({rows, cols}, std::move(values));
}

Tensor Tensor::column(std::vector<double> values) {
  const std::size_t n = values.size();
  return Tensor({n, 1}, std::move(values));
}

Tensor Tensor::row(std::vector<double> values) {
  const std::size_t n = values.size();
  return Tensor({1, n}, std::move(values));
}

Tensor Tensor::scalar(double v) { return Tensor({1, 1}, std::vector<double>{v}); }

std::size_t Tensor::rows() const {
  if (shape.empty()) return 1;
  if (shape.size() == 1) return shape[0];
  return product(shape) / shape.back();
}

std::size_t Tensor::cols() const {
  if (shape.size() < 2) return 1;
  return shape.back();
}

Parameter::Parameter(std::string n, Tensor v) : name(std::move(n)), value(std::move(v)), grad(value.shape) {}

void Parameter::zero_grad() {
  if (!grad.same_shape(value)) grad = Tensor(value.shape);
  std::fill(grad.values.begin(), grad.values.end(), 0.0);
}

void zero_grad(std::span<Parameter* const> params) {
  for (auto* p : params) p->zero_grad();
}

Var Tape::push(Node n) {
  for (double v : n.value.values)
    if (!std::isfinite(v)) throw std::domain_error("non-finite value produced on tape");
  nodes_.push_back(std::move(n));
  return Var(nodes_.size() - 1);
}

const Tensor& Tape::val(Var v) const {
  if (v.id() >= nodes_.size()) throw std::out_of_range("Var does not belong to this tape");
  return nodes_[v.id()].value;
}

Var Tape::constant(Tensor t) { return push({Op::kConstant, {}, std::move(t)}); }

Var Tape::param(Parameter& p) {
  Node n{Op::kParam, {}, p.value};
  n.param = &p;
  return push(std::move(n));
}

Var Tape::matmul(Var a, Var b) {
  const Tensor& av = val(a);
  const Tensor& bv = val(b);
  if (av.cols() != bv.rows())
    throw std::invalid_argument("matmul: inner dimension mismatch " + shape_str(av) + " * " + shape_str(bv));
  return push({Op::kMatmul, {a.id(), b.id()}, matmul_values(av, bv)});
}

Var Tape::transpose(Var a) { return push({Op::kTranspose, {a.id()}, transpose_values(val(a))}); }

Var Tape::add(Var a, Var b) {
  require_same(val(a), val(b), "add");
  Tensor out({val(a).rows(), val(a).cols()});
  for (std::size_t i = 0; i < out.size(); ++i) out.values[i] = val(a).values[i] + val(b).values[i];
  return push({Op::kAdd, {a.id(), b.id()}, std::move(out)});
}

Var Tape::sub(Var a, Var b) {
  require_same(val(a), val(b), "sub");
  Tensor out({val(a).rows(), val(a).cols()});
  for (std::size_t i = 0; i < out.size(); ++i) out.values[i] = val(a).values[i] - val(b).values[i];
  return push({Op::kSub, {a.id(), b.id()}, std::move(out)});
}

Var Tape::mul(Var a, Var b) {
  require_same(val(a), val(b), "mul");
  Tensor out({val(a).rows(), val(a).cols()});
  for (std::size_t i = 0; i < out.size(); ++i) out.values[i] = val(a).values[i] * val(b).values[i];
  return push({Op::kMul, {a.id(), b.id()}, std::move(out)});
}

Var Tape::scale(Var a, double c) {
  Tensor out({val(a).rows(), val(a).cols()});
  for (std::size_t i = 0; i < out.size(); ++i) out.values[i] = c * val(a).values[i];
  Node n{Op::kScale, {a.id()}, std::move(out)};
  n.scalar = c;
  return push(std::move(n));
}

Var Tape::tanh(Var a) {
  Tensor out({val(a).rows(), val(a).cols()});
  for (std::size_t i = 0; i < out.size(); ++i) out.values[i] = std::tanh(val(a).values[i]);
  return push({Op::kTanh, {a.id()}, std::move(out)});
}

Var Tape::log(Var a) {
  Tensor out({val(a).rows(), val(a).cols()});
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!(val(a).values[i] > 0.0)) throw std::domain_error("log of a non-positive value");
    out.values[i] = std::log(val(a).values[i]);
  }
  return push({Op::kLog, {a.id()}, std::move(out)});
}

Var Tape::softmax(Var a) {
  const Tensor& x = val(a);
  if (x.size() == 0) throw std::invalid_argument("softmax of an empty tensor");
  Tensor out({x.rows(), x.cols()});
  const double hi = *std::max_element(x.values.begin(), x.values.end());
  double z = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) z += (out.values[i] = std::exp(x.values[i] - hi));
  for (auto& v : out.values) v /= z;
  return push({Op::kSoftmax, {a.id()}, std::move(out)});
}

Var Tape::log_softmax(Var a) {
  const Tensor& x = val(a);
  if (x.size() == 0) throw std::invalid_argument("log_softmax of an empty tensor");
  Tensor out({x.rows(), x.cols()});
  const double hi = *std::max_element(x.values.begin(), x.values.end());
  double z = 0.0;
  for (double v : x.values) z += std::exp(v - hi);
  const double lse = hi + std::log(z);
  for (std::size_t i = 0; i < x.size(); ++i) out.values[i] = x.values[i] - lse;
  return push({Op::kLogSoftmax, {a.id()}, std::move(out)});
}

Var Tape::concat(std::span<const Var> parts) {
  if (parts.empty()) throw std::invalid_argument("concat of nothing");
  const std::size_t cols = val(parts[0]).cols();
  std::size_t rows = 0;
  Node n{Op::kConcat, {}, {}};
  for (Var p : parts) {
    if (val(p).cols() != cols) throw std::invalid_argument("concat: column mismatch");
    rows += val(p).rows();
    n.inputs.push_back(p.id());
  }
  n.value = Tensor({rows, cols});
  std::size_t off = 0;
  for (Var p : parts) {
    const auto& v = val(p).values;
    std::copy(v.begin(), v.end(), n.value.values.begin() + static_cast<std::ptrdiff_t>(off));
    off += v.size();
  }
  return push(std::move(n));
}

Var Tape::index_select(Var a, std::span<const std::size_t> rows) {
  const Tensor& x = val(a);
  const std::size_t c = x.cols();
  Node n{Op::kIndexSelect, {a.id()}, Tensor({rows.size(), c})};
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] >= x.rows()) throw std::out_of_range("index_select: row out of range");
    std::copy_n(x.values.begin() + static_cast<std::ptrdiff_t>(rows[r] * c), c,
                n.value.values.begin() + static_cast<std::ptrdiff_t>(r * c));
  }
  n.rows.assign(rows.begin(), rows.end());
  return push(std::move(n));
}

Var Tape::sum(Var a) {
  const auto& v = val(a).values;
  return push({Op::kSum, {a.id()}, Tensor::scalar(std::accumulate(v.begin(), v.end(), 0.0))});
}

void Tape::backward(Var loss) {
  if (val(loss).size() != 1) throw std::invalid_argument("backward: loss must be a scalar");
  std::vector<Tensor> g(nodes_.size());
  auto grad_of = [&](std::size_t id) -> Tensor& {
    if (g[id].size() == 0) g[id] = Tensor(nodes_[id].value.shape);
    return g[id];
  };
  grad_of(loss.id()).values[0] = 1.0;

  for (std::size_t id = loss.id() + 1; id-- > 0;) {
    if (g[id].size() == 0) continue;
    const Node& n = nodes_[id];
    const Tensor& dy = g[id];
    switch (n.op) {
      case Op::kConstant:
        break;
      case Op::kParam: {
        Parameter& p = *n.param;
        if (!p.grad.same_shape(p.value)) p.zero_grad();
        for (std::size_t i = 0; i < dy.size(); ++i) p.grad.values[i] += dy.values[i];
        break;
      }
      case Op::kMatmul: {
        const Tensor& a = nodes_[n.inputs[0]].value;
        const Tensor& b = nodes_[n.inputs[1]].value;
        Tensor da = matmul_values(dy, transpose_values(b));
        Tensor db = matmul_values(transpose_values(a), dy);
        Tensor& ga = grad_of(n.inputs[0]);
        for (std::size_t i = 0; i < da.size(); ++i) ga.values[i] += da.values[i];
        Tensor& gb = grad_of(n.inputs[1]);
        for (std::size_t i = 0; i < db.size(); ++i) gb.values[i] += db.values[i];
        break;
      }
      case Op::kTranspose: {
        Tensor dt = transpose_values(dy);
        Tensor& ga = grad_of(n.inputs[0]);
        for (std::size_t i = 0; i < dt.size(); ++i) ga.values[i] += dt.values[i];
        break;
      }
      case Op::kAdd:
      case Op::kSub: {
        const double sign = n.op == Op::kAdd ? 1.0 : -1.0;
        Tensor& ga = grad_of(n.inputs[0]);
        for (std::size_t i = 0; i < dy.size(); ++i) ga.values[i] += dy.values[i];
        Tensor& gb = grad_of(n.inputs[1]);
        for (std::size_t i = 0; i < dy.size(); ++i) gb.values[i] += sign * dy.values[i];
        break;
      }
      case Op::kMul: {
        const auto& a = nodes_[n.inputs[0]].value.values;
        const auto& b = nodes_[n.inputs[1]].value.values;
        Tensor& ga = grad_of(n.inputs[0]);
        for (std::size_t i = 0; i < dy.size(); ++i) ga.values[i] += dy.values[i] * b[i];
        Tensor& gb = grad_of(n.inputs[1]);
        for (std::size_t i = 0; i < dy.size(); ++i) gb.values[i] += dy.values[i] * a[i];
        break;
      }
      case Op::kScale: {
        Tensor& ga = grad_of(n.inputs[0]);
        for (std::size_t i = 0; i < dy.size(); ++i) ga.values[i] += n.scalar * dy.values[i];
        break;
      }
      case Op::kTanh: {
        Tensor& ga = grad_of(n.inputs[0]);
        for (std::size_t i = 0; i < dy.size(); ++i) {
          const double y = n.value.values[i];
          ga.values[i] += dy.values[i] * (1.0 - y * y);
        }
        break;
      }
      case Op::kLog: {
        const auto& x = nodes_[n.inputs[0]].value.values;
        Tensor& ga = grad_of(n.inputs[0]);
        for (std::size_t i = 0; i < dy.size(); ++i) ga.values[i] += dy.values[i] / x[i];
        break;
      }
      case Op::kSoftmax: {
        const auto& y = n.value.values;
        double dot = 0.0;
        for (std::size_t i = 0; i < dy.size(); ++i) dot += dy.values[i] * y[i];
        Tensor& ga = grad_of(n.inputs[0]);
        for (std::size_t i = 0; i < dy.size(); ++i) ga.values[i] += y[i] * (dy.values[i] - dot);
        break;
      }
      case Op::kLogSoftmax: {
        const auto& y = n.value.values;
        const double total = std::accumulate(dy.values.begin(), dy.values.end(), 0.0);
        Tensor& ga = grad_of(n.inputs[0]);
        for (std::size_t i = 0; i < dy.size(); ++i) ga.values[i] += dy.values[i] - std::exp(y[i]) * total;
        break;
      }
      case Op::kConcat: {
        std::size_t off = 0;
        for (std::size_t in : n.inputs) {
          Tensor& gi = grad_of(in);
          for (std::size_t i = 0; i < gi.size(); ++i) gi.values[i] += dy.values[off + i];
          off += gi.size();
        }
        break;
      }
      case Op::kIndexSelect: {
        Tensor& ga = grad_of(n.inputs[0]);
        const std::size_t c = ga.cols();
        for (std::size_t r = 0; r < n.rows.size(); ++r)
          for (std::size_t j = 0; j < c; ++j) ga.values[n.rows[r] * c + j] += dy.values[r * c + j];
        break;
      }
      case Op::kSum: {
        Tensor& ga = grad_of(n.inputs[0]);
        for (auto& v : ga.values) v += dy.values[0];
        break;
      }
    }
  }
}

double evaluate(const LossBuilder& f) {
  Tape tape;
  Var loss = f(tape);
  if (tape.value(loss).size() != 1) throw std::invalid_argument("loss must be a scalar");
  return tape.value(loss).values[0];
}

double finite_diff_check(const LossBuilder& f, std::span<Parameter* const> params, double h) {
  if (h < 1e-6 || h > 1e-3) throw std::invalid_argument("finite difference step must lie in [1e-6, 1e-3]");
  zero_grad(params);
  {
    Tape tape;
    tape.backward(f(tape));
  }
  double worst = 0.0;
  for (Parameter* p : params) {
    for (std::size_t i = 0; i < p->value.size(); ++i) {
      const double orig = p->value.values[i];
      p->value.values[i] = orig + h;
      const double up = evaluate(f);
      p->value.values[i] = orig - h;
      const double down = evaluate(f);
      p->value.values[i] = orig;
      const double numeric = (up - down) / (2.0 * h);
      const double analytic = p->grad.values[i];
      const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
      worst = std::max(worst, std::abs(analytic - numeric) / denom);
    }
  }
  return worst;
}

void adam_step(OptimizerState& state, std::span<Parameter* const> params, double lr) {
  if (state.first_moment.empty()) {
    for (auto* p : params) {
      state.first_moment.emplace_back(p->value.shape);
      state.second_moment.emplace_back(p->value.shape);
    }
  }
  if (state.first_moment.size() != params.size())
    throw std::invalid_argument("adam_step: parameter count changed between steps");
  for (std::size_t k = 0; k < params.size(); ++k) {
    const Parameter& p = *params[k];
    if (!p.grad.same_shape(p.value) || !state.first_moment[k].same_shape(p.value))
      throw std::invalid_argument("adam_step: shape mismatch for parameter '" + p.name + "'");
  }
  ++state.step;
  const auto& c = state.config;
  const double t = static_cast<double>(state.step);
  const double bc1 = 1.0 - std::pow(c.beta1, t);
  const double bc2 = 1.0 - std::pow(c.beta2, t);
  for (std::size_t k = 0; k < params.size(); ++k) {
    Parameter& p = *params[k];
    auto& m = state.first_moment[k].values;
    auto& v = state.second_moment[k].values;
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const double g = p.grad.values[i];
      m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * g;
      v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * g * g;
      const double mhat = m[i] / bc1;
      const double vhat = v[i] / bc2;
      p.value.values[i] -= lr * mhat / (std::sqrt(vhat) + c.eps);
    }
  }
}

double lr_at(std::size_t step, double init, std::size_t warmup) {
  if (step == 0) throw std::invalid_argument("lr_at: step counts from 1");
  if (warmup == 0) throw std::invalid_argument("lr_at: warmup must be positive");
  const double s = static_cast<double>(step);
  const double w = static_cast<double>(warmup);
  return init * std::min(1.0 / std::sqrt(s), s * std::pow(w, -1.5));
}

}  // namespace redsum::grad
