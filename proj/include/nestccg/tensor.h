#ifndef NESTCCG_TENSOR_H_
#define NESTCCG_TENSOR_H_

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace nestccg {

// Dense row-major matrix of doubles. Vectors are 1×d matrices.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static Matrix identity(std::size_t n);
  static Matrix row(std::vector<double> values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  std::span<double> row_span(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row_span(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  void fill(double v);
  bool same_shape(const Matrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }
  bool all_finite() const;

  Matrix transpose() const;
  Matrix& operator+=(const Matrix& o);
  Matrix& operator*=(double s);

  bool operator==(const Matrix& o) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// A trainable value with its accumulated gradient.
struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;

  Parameter() = default;
  Parameter(std::string n, Matrix v)
      : name(std::move(n)), value(std::move(v)), grad(value.rows(), value.cols()) {}

  void zero_grad() { grad.fill(0.0); }
};

constexpr double kLayerNormEps = 1e-5;

// ---- forward kernels ----

Matrix matmul(const Matrix& a, const Matrix& b);
// a · bᵀ
Matrix matmul_nt(const Matrix& a, const Matrix& b);
// aᵀ · b
Matrix matmul_tn(const Matrix& a, const Matrix& b);
Matrix add(const Matrix& a, const Matrix& b);
// Adds the 1×c row `bias` to every row of `x`.
Matrix add_bias(const Matrix& x, const Matrix& bias);
Matrix relu(const Matrix& x);

std::vector<double> layer_norm(std::span<const double> x, std::span<const double> gain,
                               std::span<const double> bias, double eps = kLayerNormEps);

// out[j] = mask[j]·exp(logits[j]) / Σ_k mask[k]·exp(logits[k]), stabilized by
// subtracting the max over unmasked entries. Throws if the mask is all zero.
std::vector<double> masked_softmax(std::span<const double> logits, std::span<const double> mask);
std::vector<double> softmax(std::span<const double> logits);

// −log softmax(logits)[gold]
double cross_entropy_row(std::span<const double> logits, std::size_t gold);

// ---- backward kernels ----

struct MatmulGrads {
  Matrix da;
  Matrix db;
};
MatmulGrads matmul_backward(const Matrix& a, const Matrix& b, const Matrix& dout);
// Gradient of add_bias with respect to the bias row (column sums of dout).
Matrix add_bias_backward(const Matrix& dout);
Matrix relu_backward(const Matrix& x, const Matrix& dout);

struct LayerNormGrads {
  std::vector<double> dx;
  std::vector<double> dgain;
  std::vector<double> dbias;
};
LayerNormGrads layer_norm_backward(std::span<const double> x, std::span<const double> gain,
                                   std::span<const double> dout, double eps = kLayerNormEps);

// Gradient through softmax given its output `probs`; masked entries get zero.
std::vector<double> softmax_backward(std::span<const double> probs, std::span<const double> dout);

std::vector<double> cross_entropy_row_backward(std::span<const double> logits, std::size_t gold);

// ---- reverse-mode tape ----

// Handle to a value recorded on a Tape.
struct Var {
  std::size_t id = std::numeric_limits<std::size_t>::max();
  bool valid() const { return id != std::numeric_limits<std::size_t>::max(); }
};

// Records one forward pass as a sequence of operations and replays it in
// reverse to accumulate gradients into the bound Parameters. Rebuilt per pass.
class Tape {
 public:
  explicit Tape(bool record_gradients = true) : record_(record_gradients) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Matrix value);
  // Gradients reach `p.grad` on backward().
  Var param(Parameter& p);
  // Read-only use: recorded as a constant.
  Var param(const Parameter& p) { return constant(p.value); }

  Var matmul(Var a, Var b);
  Var matmul_nt(Var a, Var b);
  Var add(Var a, Var b);
  Var add_bias(Var x, Var bias);
  Var relu(Var x);
  Var layer_norm_rows(Var x, Var gain, Var bias, double eps = kLayerNormEps);
  Var scale_const(Var x, const Matrix& factors);
  Var gather_rows(Var table, std::vector<std::size_t> rows);
  // out[i][j] = left[i][j] if j<i, right[i][j] if j>i, self[i][j] if j==i
  Var positional_select(Var left, Var right, Var self);
  Var masked_softmax_rows(Var logits, const Matrix& mask);
  // Mean token cross-entropy, 1×1.
  Var mean_cross_entropy(Var logits, std::vector<std::size_t> gold);

  const Matrix& value(Var v) const { return nodes_[v.id].value; }
  // Seeds d(scalar) with `seed` and accumulates into bound Parameters.
  void backward(Var scalar, double seed = 1.0);

  // Smallest |input| seen by any relu on this tape; +inf if none.
  double min_relu_margin() const { return min_relu_margin_; }
  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    Parameter* param = nullptr;
    std::function<void()> backward;
  };

  Var push(Matrix value);
  Matrix& grad(Var v) { return nodes_[v.id].grad; }

  bool record_;
  std::vector<Node> nodes_;
  double min_relu_margin_ = std::numeric_limits<double>::infinity();
};

// ---- finite-difference checking ----

struct Evaluation {
  double value = 0.0;
  double relu_margin = std::numeric_limits<double>::infinity();
};

// Evaluates the objective at the current parameter values. When
// `with_gradients` is set it must also accumulate d(value)/d(param) into the
// grads of the parameters (which grad_check zeroes beforehand).
using Objective = std::function<Evaluation(bool with_gradients)>;

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::string worst_parameter;
  std::size_t worst_index = 0;
  std::size_t coordinates = 0;
  // Base point has a relu input closer to its kink than the step can tolerate.
  bool near_kink = false;
  bool passed = false;
};

// Relative error used per coordinate: |a − n| / max(|a|, |n|, floor).
double relative_error(double analytic, double numeric, double floor = 1e-6);

// Central differences over every coordinate of every parameter.
GradCheckReport grad_check(const Objective& f, std::span<Parameter* const> params,
                           double step = 1e-5, double tol = 1e-4, double kink_margin = 1e-3);

}  // namespace nestccg

#endif  // NESTCCG_TENSOR_H_
