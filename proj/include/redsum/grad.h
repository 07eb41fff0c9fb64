#ifndef REDSUM_GRAD_H_
#define REDSUM_GRAD_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace redsum::grad {

/// Dense row-major tensor. Operations see it as a matrix: rank 0 is 1x1,
/// rank 1 {n} is an n x 1 column, and higher ranks fold every leading
/// dimension into rows (so {d, 1, k} is d x k).
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> values;

  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> shape, double fill = 0.0);
  Tensor(std::vector<std::size_t> shape, std::vector<double> values);

  static Tensor matrix(std::size_t rows, std::size_t cols, std::vector<double> values);
  static Tensor column(std::vector<double> values);
  static Tensor row(std::vector<double> values);
  static Tensor scalar(double v);

  std::size_t rows() const;
  std::size_t cols() const;
  std::size_t size() const { return values.size(); }
  bool same_shape(const Tensor& o) const { return shape == o.shape; }

  double& at(std::size_t r, std::size_t c) { return values[r * cols() + c]; }
  double at(std::size_t r, std::size_t c) const { return values[r * cols() + c]; }
};

/// A trainable leaf. `grad` accumulates across backward calls until zeroed.
struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;

  Parameter() = default;
  Parameter(std::string name, Tensor value);
  void zero_grad();
};

void zero_grad(std::span<Parameter* const> params);

/// Handle to a node recorded on a Tape.
class Var {
 public:
  Var() = default;
  std::size_t id() const { return id_; }

 private:
  friend class Tape;
  explicit Var(std::size_t id) : id_(id) {}
  std::size_t id_ = 0;
};

/// Reverse-mode tape. Nodes are appended in evaluation order, so insertion
/// order is already a topological order and backward is one reverse sweep.
class Tape {
 public:
  Var constant(Tensor t);
  Var param(Parameter& p);

  Var matmul(Var a, Var b);
  Var transpose(Var a);
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);  // elementwise
  Var scale(Var a, double c);
  Var tanh(Var a);
  Var log(Var a);
  /// Softmax and log-softmax over every entry of `a`.
  Var softmax(Var a);
  Var log_softmax(Var a);
  /// Stacks row blocks; all parts need the same column count.
  Var concat(std::span<const Var> parts);
  Var index_select(Var a, std::span<const std::size_t> rows);
  Var sum(Var a);

  const Tensor& value(Var v) const { return nodes_.at(v.id()).value; }
  std::size_t size() const { return nodes_.size(); }

  /// Accumulates d(loss)/d(p) into every Parameter reached from `loss`.
  /// Throws std::invalid_argument unless loss holds exactly one value.
  void backward(Var loss);

 private:
  enum class Op {
    kConstant, kParam, kMatmul, kTranspose, kAdd, kSub, kMul, kScale,
    kTanh, kLog, kSoftmax, kLogSoftmax, kConcat, kIndexSelect, kSum
  };
  struct Node {
    Node(Op o, std::vector<std::size_t> in, Tensor v) : op(o), inputs(std::move(in)), value(std::move(v)) {}
    Op op;
    std::vector<std::size_t> inputs;
    Tensor value;
    double scalar = 0.0;
    std::vector<std::size_t> rows;
    Parameter* param = nullptr;
  };

  Var push(Node n);
  const Tensor& val(Var v) const;

  std::vector<Node> nodes_;
};

/// Builds a scalar loss on the supplied tape from the parameters it closes over.
using LossBuilder = std::function<Var(Tape&)>;

/// Evaluates the loss without recording gradients for later use.
double evaluate(const LossBuilder& f);

/// Compares backward() against central differences (f(x+h) - f(x-h)) / 2h for
/// every coordinate of `params`. Returns the max relative error with
/// denominator max(|analytic|, |numeric|, 1e-8). Parameter values are
/// restored and their grads are left holding the analytic gradient.
double finite_diff_check(const LossBuilder& f, std::span<Parameter* const> params, double h = 1e-5);

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct OptimizerState {
  AdamConfig config;
  std::vector<Tensor> first_moment;
  std::vector<Tensor> second_moment;
  std::size_t step = 0;
};

/// Bias-corrected Adam update from each parameter's accumulated grad.
/// Moments are created on the first call; throws on shape mismatch.
void adam_step(OptimizerState& state, std::span<Parameter* const> params, double lr);

/// Warmup schedule: init * min(step^-0.5, step * warmup^-1.5).
double lr_at(std::size_t step, double init, std::size_t warmup);

/// Optimization settings shared by every trainer. One Adam step per document.
struct TrainSchedule {
  std::size_t epochs = 2;
  double lr = 2e-3;
  std::size_t warmup = 100;
  std::uint64_t seed = 1;
};

}  // namespace redsum::grad

#endif  // REDSUM_GRAD_H_
