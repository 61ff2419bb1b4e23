#include "nestccg/tensor.h"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace nestccg {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw std::invalid_argument("Matrix: data size does not match shape");
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::row(std::vector<double> values) {
  const std::size_t n = values.size();
  return Matrix(1, n, std::move(values));
}

void Matrix::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

bool Matrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

Matrix& Matrix::operator+=(const Matrix& o) {
  if (!same_shape(o)) throw std::invalid_argument("Matrix +=: shape mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

Matrix& Matrix::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

Matrix matmul(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.rows(), "matmul: inner dimensions differ");
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  }
  return out;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.cols(), "matmul_nt: inner dimensions differ");
  Matrix out(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto ar = a.row_span(i);
    for (std::size_t j = 0; j < b.rows(); ++j) {
      auto br = b.row_span(j);
      double s = 0.0;
      for (std::size_t k = 0; k < ar.size(); ++k) s += ar[k] * br[k];
      out(i, j) = s;
    }
  }
  return out;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows(), "matmul_tn: inner dimensions differ");
  Matrix out(a.cols(), b.cols());
  for (std::size_t k = 0; k < a.rows(); ++k) {
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double aki = a(k, i);
      if (aki == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aki * b(k, j);
    }
  }
  return out;
}

Matrix add(const Matrix& a, const Matrix& b) {
  Matrix out = a;
  out += b;
  return out;
}

Matrix add_bias(const Matrix& x, const Matrix& bias) {
  require(bias.rows() == 1 && bias.cols() == x.cols(), "add_bias: bias must be 1×cols");
  Matrix out = x;
  for (std::size_t r = 0; r < x.rows(); ++r)
    for (std::size_t c = 0; c < x.cols(); ++c) out(r, c) += bias[c];
  return out;
}

Matrix relu(const Matrix& x) {
  Matrix out = x;
  for (double& v : out.data()) v = v > 0.0 ? v : 0.0;
  return out;
}

std::vector<double> layer_norm(std::span<const double> x, std::span<const double> gain,
                               std::span<const double> bias, double eps) {
  const std::size_t d = x.size();
  require(d >= 1 && gain.size() == d && bias.size() == d, "layer_norm: shape mismatch");
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(d);
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  var /= static_cast<double>(d);
  const double inv = 1.0 / std::sqrt(var + eps);
  std::vector<double> out(d);
  for (std::size_t i = 0; i < d; ++i) out[i] = (x[i] - mean) * inv * gain[i] + bias[i];
  return out;
}

std::vector<double> masked_softmax(std::span<const double> logits, std::span<const double> mask) {
  require(logits.size() == mask.size(), "masked_softmax: mask length differs");
  double mx = -std::numeric_limits<double>::infinity();
  bool any = false;
  for (std::size_t j = 0; j < logits.size(); ++j) {
    if (mask[j] != 0.0) {
      mx = std::max(mx, logits[j]);
      any = true;
    }
  }
  if (!any) throw std::invalid_argument("masked_softmax: mask has no unmasked entry");
  std::vector<double> out(logits.size(), 0.0);
  double z = 0.0;
  for (std::size_t j = 0; j < logits.size(); ++j) {
    if (mask[j] != 0.0) {
      out[j] = mask[j] * std::exp(logits[j] - mx);
      z += out[j];
    }
  }
  for (double& v : out) v /= z;
  return out;
}

std::vector<double> softmax(std::span<const double> logits) {
  std::vector<double> ones(logits.size(), 1.0);
  return masked_softmax(logits, ones);
}

double cross_entropy_row(std::span<const double> logits, std::size_t gold) {
  require(gold < logits.size(), "cross_entropy_row: gold index out of range");
  double mx = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (double v : logits) z += std::exp(v - mx);
  return std::log(z) + mx - logits[gold];
}

MatmulGrads matmul_backward(const Matrix& a, const Matrix& b, const Matrix& dout) {
  return {matmul_nt(dout, b), matmul_tn(a, dout)};
}

Matrix add_bias_backward(const Matrix& dout) {
  Matrix g(1, dout.cols());
  for (std::size_t r = 0; r < dout.rows(); ++r)
    for (std::size_t c = 0; c < dout.cols(); ++c) g[c] += dout(r, c);
  return g;
}

Matrix relu_backward(const Matrix& x, const Matrix& dout) {
  Matrix g(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.size(); ++i) g[i] = x[i] > 0.0 ? dout[i] : 0.0;
  return g;
}

LayerNormGrads layer_norm_backward(std::span<const double> x, std::span<const double> gain,
                                   std::span<const double> dout, double eps) {
  const std::size_t d = x.size();
  const double dd = static_cast<double>(d);
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= dd;
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  var /= dd;
  const double inv = 1.0 / std::sqrt(var + eps);

  LayerNormGrads g{std::vector<double>(d), std::vector<double>(d), std::vector<double>(d)};
  std::vector<double> xhat(d), dxhat(d);
  double sum_dxhat = 0.0, sum_dxhat_xhat = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    xhat[i] = (x[i] - mean) * inv;
    dxhat[i] = dout[i] * gain[i];
    g.dgain[i] = dout[i] * xhat[i];
    g.dbias[i] = dout[i];
    sum_dxhat += dxhat[i];
    sum_dxhat_xhat += dxhat[i] * xhat[i];
  }
  for (std::size_t i = 0; i < d; ++i) {
    g.dx[i] = inv * (dxhat[i] - sum_dxhat / dd - xhat[i] * sum_dxhat_xhat / dd);
  }
  return g;
}

std::vector<double> softmax_backward(std::span<const double> probs, std::span<const double> dout) {
  double dot = 0.0;
  for (std::size_t j = 0; j < probs.size(); ++j) dot += probs[j] * dout[j];
  std::vector<double> g(probs.size());
  for (std::size_t j = 0; j < probs.size(); ++j) g[j] = probs[j] * (dout[j] - dot);
  return g;
}

std::vector<double> cross_entropy_row_backward(std::span<const double> logits, std::size_t gold) {
  std::vector<double> g = softmax(logits);
  g[gold] -= 1.0;
  return g;
}

// ---- Tape ----

Var Tape::push(Matrix value) {
  Node n;
  if (record_) n.grad = Matrix(value.rows(), value.cols());
  n.value = std::move(value);
  nodes_.push_back(std::move(n));
  return Var{nodes_.size() - 1};
}

Var Tape::constant(Matrix value) { return push(std::move(value)); }

Var Tape::param(Parameter& p) {
  Var v = push(p.value);
  nodes_[v.id].param = &p;
  return v;
}

Var Tape::matmul(Var a, Var b) {
  Var out = push(nestccg::matmul(value(a), value(b)));
  if (record_) {
    nodes_[out.id].backward = [this, a, b, out] {
      auto g = matmul_backward(value(a), value(b), grad(out));
      grad(a) += g.da;
      grad(b) += g.db;
    };
  }
  return out;
}

Var Tape::matmul_nt(Var a, Var b) {
  Var out = push(nestccg::matmul_nt(value(a), value(b)));
  if (record_) {
    nodes_[out.id].backward = [this, a, b, out] {
      // out = a·bᵀ → da = dout·b, db = doutᵀ·a
      grad(a) += nestccg::matmul(grad(out), value(b));
      grad(b) += matmul_tn(grad(out), value(a));
    };
  }
  return out;
}

Var Tape::add(Var a, Var b) {
  Var out = push(nestccg::add(value(a), value(b)));
  if (record_) {
    nodes_[out.id].backward = [this, a, b, out] {
      grad(a) += grad(out);
      grad(b) += grad(out);
    };
  }
  return out;
}

Var Tape::add_bias(Var x, Var bias) {
  Var out = push(nestccg::add_bias(value(x), value(bias)));
  if (record_) {
    nodes_[out.id].backward = [this, x, bias, out] {
      grad(x) += grad(out);
      grad(bias) += add_bias_backward(grad(out));
    };
  }
  return out;
}

Var Tape::relu(Var x) {
  for (double v : value(x).data()) min_relu_margin_ = std::min(min_relu_margin_, std::abs(v));
  Var out = push(nestccg::relu(value(x)));
  if (record_) {
    nodes_[out.id].backward = [this, x, out] { grad(x) += relu_backward(value(x), grad(out)); };
  }
  return out;
}

Var Tape::layer_norm_rows(Var x, Var gain, Var bias, double eps) {
  const Matrix& xv = value(x);
  const Matrix& gv = value(gain);
  const Matrix& bv = value(bias);
  require(gv.rows() == 1 && gv.cols() == xv.cols() && bv.same_shape(gv),
          "layer_norm_rows: gain/bias must be 1×cols");
  Matrix y(xv.rows(), xv.cols());
  for (std::size_t r = 0; r < xv.rows(); ++r) {
    auto row = layer_norm(xv.row_span(r), gv.row_span(0), bv.row_span(0), eps);
    std::copy(row.begin(), row.end(), y.row_span(r).begin());
  }
  Var out = push(std::move(y));
  if (record_) {
    nodes_[out.id].backward = [this, x, gain, bias, out, eps] {
      const Matrix& xv = value(x);
      for (std::size_t r = 0; r < xv.rows(); ++r) {
        auto g = layer_norm_backward(xv.row_span(r), value(gain).row_span(0),
                                     grad(out).row_span(r), eps);
        for (std::size_t c = 0; c < xv.cols(); ++c) {
          grad(x)(r, c) += g.dx[c];
          grad(gain)[c] += g.dgain[c];
          grad(bias)[c] += g.dbias[c];
        }
      }
    };
  }
  return out;
}

Var Tape::scale_const(Var x, const Matrix& factors) {
  require(value(x).same_shape(factors), "scale_const: shape mismatch");
  Matrix y = value(x);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] *= factors[i];
  Var out = push(std::move(y));
  if (record_) {
    nodes_[out.id].backward = [this, x, factors, out] {
      for (std::size_t i = 0; i < factors.size(); ++i) grad(x)[i] += grad(out)[i] * factors[i];
    };
  }
  return out;
}

Var Tape::gather_rows(Var table, std::vector<std::size_t> rows) {
  const Matrix& t = value(table);
  Matrix y(rows.size(), t.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    require(rows[r] < t.rows(), "gather_rows: row index out of range");
    auto src = t.row_span(rows[r]);
    std::copy(src.begin(), src.end(), y.row_span(r).begin());
  }
  Var out = push(std::move(y));
  if (record_) {
    nodes_[out.id].backward = [this, table, rows = std::move(rows), out] {
      for (std::size_t r = 0; r < rows.size(); ++r) {
        auto g = grad(out).row_span(r);
        auto dst = grad(table).row_span(rows[r]);
        for (std::size_t c = 0; c < g.size(); ++c) dst[c] += g[c];
      }
    };
  }
  return out;
}

Var Tape::positional_select(Var left, Var right, Var self) {
  const Matrix& l = value(left);
  require(l.rows() == l.cols() && l.same_shape(value(right)) && l.same_shape(value(self)),
          "positional_select: operands must be equal square matrices");
  Matrix y(l.rows(), l.cols());
  for (std::size_t i = 0; i < l.rows(); ++i)
    for (std::size_t j = 0; j < l.cols(); ++j)
      y(i, j) = j < i ? l(i, j) : (j > i ? value(right)(i, j) : value(self)(i, j));
  Var out = push(std::move(y));
  if (record_) {
    nodes_[out.id].backward = [this, left, right, self, out] {
      const Matrix& g = grad(out);
      for (std::size_t i = 0; i < g.rows(); ++i)
        for (std::size_t j = 0; j < g.cols(); ++j) {
          if (j < i) grad(left)(i, j) += g(i, j);
          else if (j > i) grad(right)(i, j) += g(i, j);
          else grad(self)(i, j) += g(i, j);
        }
    };
  }
  return out;
}

Var Tape::masked_softmax_rows(Var logits, const Matrix& mask) {
  const Matrix& z = value(logits);
  require(z.same_shape(mask), "masked_softmax_rows: mask shape mismatch");
  Matrix p(z.rows(), z.cols());
  for (std::size_t r = 0; r < z.rows(); ++r) {
    auto row = masked_softmax(z.row_span(r), mask.row_span(r));
    std::copy(row.begin(), row.end(), p.row_span(r).begin());
  }
  Var out = push(std::move(p));
  if (record_) {
    nodes_[out.id].backward = [this, logits, out] {
      const Matrix& p = value(out);
      for (std::size_t r = 0; r < p.rows(); ++r) {
        auto g = softmax_backward(p.row_span(r), grad(out).row_span(r));
        auto dst = grad(logits).row_span(r);
        for (std::size_t c = 0; c < g.size(); ++c) dst[c] += g[c];
      }
    };
  }
  return out;
}

Var Tape::mean_cross_entropy(Var logits, std::vector<std::size_t> gold) {
  const Matrix& z = value(logits);
  require(gold.size() == z.rows() && !gold.empty(), "mean_cross_entropy: one gold per row");
  double loss = 0.0;
  for (std::size_t r = 0; r < z.rows(); ++r) loss += cross_entropy_row(z.row_span(r), gold[r]);
  const double n = static_cast<double>(z.rows());
  Var out = push(Matrix(1, 1, loss / n));
  if (record_) {
    nodes_[out.id].backward = [this, logits, gold = std::move(gold), out, n] {
      const double scale = grad(out)[0] / n;
      const Matrix& z = value(logits);
      for (std::size_t r = 0; r < z.rows(); ++r) {
        auto g = cross_entropy_row_backward(z.row_span(r), gold[r]);
        auto dst = grad(logits).row_span(r);
        for (std::size_t c = 0; c < g.size(); ++c) dst[c] += scale * g[c];
      }
    };
  }
  return out;
}

void Tape::backward(Var scalar, double seed) {
  if (!record_) throw std::logic_error("Tape::backward on a tape without gradients");
  require(value(scalar).size() == 1, "Tape::backward: output must be a scalar");
  for (Node& n : nodes_) n.grad.fill(0.0);
  grad(scalar)[0] = seed;
  for (std::size_t i = scalar.id + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (n.backward) n.backward();
    if (n.param != nullptr) n.param->grad += n.grad;
  }
}

// ---- gradient checking ----

double relative_error(double analytic, double numeric, double floor) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / denom;
}

GradCheckReport grad_check(const Objective& f, std::span<Parameter* const> params, double step,
                           double tol, double kink_margin) {
  for (Parameter* p : params) p->zero_grad();
  GradCheckReport report;
  const Evaluation base = f(true);
  report.near_kink = base.relu_margin < kink_margin;

  for (Parameter* p : params) {
    const Matrix analytic = p->grad;
    for (std::size_t i = 0; i < p->value.size(); ++i) {
      const double saved = p->value[i];
      p->value[i] = saved + step;
      const double up = f(false).value;
      p->value[i] = saved - step;
      const double down = f(false).value;
      p->value[i] = saved;
      const double numeric = (up - down) / (2.0 * step);
      const double err = relative_error(analytic[i], numeric);
      ++report.coordinates;
      if (err > report.max_rel_error) {
        report.max_rel_error = err;
        report.worst_parameter = p->name;
        report.worst_index = i;
      }
    }
  }
  report.passed = report.max_rel_error <= tol;
  return report;
}

}  // namespace nestccg
