#include "crepair/nn/autodiff.hpp"

#include <cmath>
#include <limits>

#include "crepair/error.hpp"

namespace crepair::nn {

std::size_t ParameterStore::add(const std::string& name, Mat value) {
  if (by_name_.count(name)) throw Error(ErrorCode::InvalidInput, "duplicate parameter " + name);
  by_name_[name] = names_.size();
  names_.push_back(name);
  values_.push_back(std::move(value));
  return names_.size() - 1;
}

std::size_t ParameterStore::index(const std::string& name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) throw Error(ErrorCode::InvalidInput, "unknown parameter " + name);
  return it->second;
}

std::size_t ParameterStore::scalar_count() const {
  std::size_t n = 0;
  for (const auto& v : values_) n += static_cast<std::size_t>(v.size());
  return n;
}

void GradStore::accumulate(std::size_t i, const Mat& g) {
  if (grads_[i].size() == 0) grads_[i] = g;
  else grads_[i] += g;
}

void GradStore::add(const GradStore& other) {
  for (std::size_t i = 0; i < grads_.size(); ++i)
    if (other.has(i)) accumulate(i, other.grad(i));
}

void GradStore::scale(double factor) {
  for (auto& g : grads_)
    if (g.size()) g *= factor;
}

double GradStore::squared_norm() const {
  double s = 0.0;
  for (const auto& g : grads_)
    if (g.size()) s += g.squaredNorm();
  return s;
}

void GradStore::clear() {
  for (auto& g : grads_) g.resize(0, 0);
}

Tape::Tape(const ParameterStore* params, GradStore* grads) : params_(params), grads_(grads) {
  nodes_.reserve(256);
}

const Mat& Tape::value(Var v) const {
  const Node& n = nodes_[v.id];
  return n.ref ? *n.ref : n.own;
}

Var Tape::push(Mat value, bool needs_grad) {
  Node n;
  n.own = std::move(value);
  n.needs_grad = needs_grad;
  nodes_.push_back(std::move(n));
  return Var{static_cast<int>(nodes_.size() - 1)};
}

Mat& Tape::grad_of(Var v) {
  Node& n = nodes_[v.id];
  if (n.grad.size() == 0) {
    const Mat& val = value(v);
    n.grad = Mat::Zero(val.rows(), val.cols());
  }
  return n.grad;
}

void Tape::accumulate(Var v, const Mat& g) {
  if (!nodes_[v.id].needs_grad) return;
  Node& n = nodes_[v.id];
  if (n.grad.size() == 0) n.grad = g;
  else n.grad += g;
}

bool Tape::any_grad(std::initializer_list<Var> vars) const {
  for (Var v : vars)
    if (nodes_[v.id].needs_grad) return true;
  return false;
}

Var Tape::constant(Mat m) { return push(std::move(m), false); }

Var Tape::param(std::size_t index) {
  Node n;
  n.ref = &params_->value(index);
  n.needs_grad = grads_ != nullptr;
  n.param = static_cast<long>(index);
  nodes_.push_back(std::move(n));
  return Var{static_cast<int>(nodes_.size() - 1)};
}

Var Tape::param(const std::string& name) { return param(params_->index(name)); }

void Tape::backward(Var loss) {
  grad_of(loss).setOnes();
  for (std::size_t i = static_cast<std::size_t>(loss.id) + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.needs_grad || n.grad.size() == 0) continue;
    if (n.back) n.back();
    if (n.param >= 0 && grads_) grads_->accumulate(static_cast<std::size_t>(n.param), n.grad);
  }
}

Var Tape::matmul(Var a, Var b) {
  Mat out;
  out.noalias() = value(a) * value(b);
  Var o = push(std::move(out), any_grad({a, b}));
  if (nodes_[o.id].needs_grad)
    nodes_[o.id].back = [this, a, b, o] {
      const Mat& g = out_grad(o);
      if (needs_grad(a)) accumulate(a, g * value(b).transpose());
      if (needs_grad(b)) accumulate(b, value(a).transpose() * g);
    };
  return o;
}

Var Tape::matmul_nt(Var a, Var b) {
  Mat out;
  out.noalias() = value(a) * value(b).transpose();
  Var o = push(std::move(out), any_grad({a, b}));
  if (nodes_[o.id].needs_grad)
    nodes_[o.id].back = [this, a, b, o] {
      const Mat& g = out_grad(o);
      if (needs_grad(a)) accumulate(a, g * value(b));
      if (needs_grad(b)) accumulate(b, g.transpose() * value(a));
    };
  return o;
}

Var Tape::add(Var a, Var b) {
  Var o = push(value(a) + value(b), any_grad({a, b}));
  if (nodes_[o.id].needs_grad)
    nodes_[o.id].back = [this, a, b, o] {
      accumulate(a, out_grad(o));
      accumulate(b, out_grad(o));
    };
  return o;
}

Var Tape::add_row(Var a, Var row) {
  Mat out = value(a);
  out.rowwise() += value(row).row(0);
  Var o = push(std::move(out), any_grad({a, row}));
  if (nodes_[o.id].needs_grad)
    nodes_[o.id].back = [this, a, row, o] {
      accumulate(a, out_grad(o));
      if (needs_grad(row)) accumulate(row, out_grad(o).colwise().sum());
    };
  return o;
}

Var Tape::mul(Var a, Var b) {
  Var o = push(value(a).cwiseProduct(value(b)), any_grad({a, b}));
  if (nodes_[o.id].needs_grad)
    nodes_[o.id].back = [this, a, b, o] {
      if (needs_grad(a)) accumulate(a, out_grad(o).cwiseProduct(value(b)));
      if (needs_grad(b)) accumulate(b, out_grad(o).cwiseProduct(value(a)));
    };
  return o;
}

Var Tape::mul_col(Var a, Var col) {
  Mat out = value(a).array().colwise() * value(col).col(0).array();
  Var o = push(std::move(out), any_grad({a, col}));
  if (nodes_[o.id].needs_grad)
    nodes_[o.id].back = [this, a, col, o] {
      const Mat& g = out_grad(o);
      if (needs_grad(a)) accumulate(a, g.array().colwise() * value(col).col(0).array());
      if (needs_grad(col)) accumulate(col, g.cwiseProduct(value(a)).rowwise().sum());
    };
  return o;
}

Var Tape::scale(Var a, double c) {
  Var o = push(value(a) * c, any_grad({a}));
  if (nodes_[o.id].needs_grad)
    nodes_[o.id].back = [this, a, c, o] { accumulate(a, out_grad(o) * c); };
  return o;
}

Var Tape::one_minus(Var a) {
  Var o = push((1.0 - value(a).array()).matrix(), any_grad({a}));
  if (nodes_[o.id].needs_grad)
    nodes_[o.id].back = [this, a, o] { accumulate(a, -out_grad(o)); };
  return o;
}

Var Tape::tanh(Var a) {
  Var o = push(value(a).array().tanh().matrix(), any_grad({a}));
  if (nodes_[o.id].needs_grad)
    nodes_[o.id].back = [this, a, o] {
      const Mat& y = value(o);
      accumulate(a, (out_grad(o).array() * (1.0 - y.array().square())).matrix());
    };
  return o;
}

Var Tape::sigmoid(Var a) {
  Mat y = value(a).unaryExpr([](double x) {
    if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
  });
  Var o = push(std::move(y), any_grad({a}));
  if (nodes_[o.id].needs_grad)
    nodes_[o.id].back = [this, a, o] {
      const Mat& y = value(o);
      accumulate(a, (out_grad(o).array() * y.array() * (1.0 - y.array())).matrix());
    };
  return o;
}

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;
}  // namespace

Var Tape::gelu(Var a) {
  Var o = push(value(a).unaryExpr([](double x) { return 0.5 * x * (1.0 + std::erf(x * kInvSqrt2)); }),
               any_grad({a}));
  if (nodes_[o.id].needs_grad)
    nodes_[o.id].back = [this, a, o] {
      Mat d = value(a).unaryExpr([](double x) {
        return 0.5 * (1.0 + std::erf(x * kInvSqrt2)) + x * kInvSqrt2Pi * std::exp(-0.5 * x * x);
      });
      accumulate(a, out_grad(o).cwiseProduct(d));
    };
  return o;
}

Var Tape::softmax_rows(Var a) {
  const Mat& x = value(a);
  Mat y(x.rows(), x.cols());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const double m = x.row(r).maxCoeff();
    y.row(r) = (x.row(r).array() - m).exp();
    y.row(r) /= y.row(r).sum();
  }
  Var o = push(std::move(y), any_grad({a}));
  if (nodes_[o.id].needs_grad)
    nodes_[o.id].back = [this, a, o] {
      const Mat& y = value(o);
      const Mat& g = out_grad(o);
      Eigen::VectorXd dot = g.cwiseProduct(y).rowwise().sum();
      Mat d = y.array() * (g.array().colwise() - dot.array());
      accumulate(a, d);
    };
  return o;
}

Var Tape::log_softmax_rows(Var a) {
  const Mat& x = value(a);
  Mat y(x.rows(), x.cols());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const double m = x.row(r).maxCoeff();
    const double lse = m + std::log((x.row(r).array() - m).exp().sum());
    y.row(r) = x.row(r).array() - lse;
  }
  Var o = push(std::move(y), any_grad({a}));
  if (nodes_[o.id].needs_grad)
    nodes_[o.id].back = [this, a, o] {
      const Mat& g = out_grad(o);
      Mat p = value(o).array().exp();
      Eigen::VectorXd total = g.rowwise().sum();
      Mat d = g - Mat(p.array().colwise() * total.array());
      accumulate(a, d);
    };
  return o;
}

Var Tape::transpose(Var a) {
  Var o = push(value(a).transpose(), any_grad({a}));
  if (nodes_[o.id].needs_grad)
    nodes_[o.id].back = [this, a, o] { accumulate(a, out_grad(o).transpose()); };
  return o;
}

Var Tape::layer_norm(Var x, Var gamma, Var beta, double eps) {
  const Mat& in = value(x);
  const Eigen::Index cols = in.cols();
  Mat xhat(in.rows(), cols);
  Eigen::VectorXd inv_std(in.rows());
  for (Eigen::Index r = 0; r < in.rows(); ++r) {
    const double mean = in.row(r).mean();
    const double var = (in.row(r).array() - mean).square().mean();
    inv_std(r) = 1.0 / std::sqrt(var + eps);
    xhat.row(r) = (in.row(r).array() - mean) * inv_std(r);
  }
  Mat out = xhat.array().rowwise() * value(gamma).row(0).array();
  out.rowwise() += value(beta).row(0);
  Var o = push(std::move(out), any_grad({x, gamma, beta}));
  if (nodes_[o.id].needs_grad)
    nodes_[o.id].back = [this, x, gamma, beta, o, xhat = std::move(xhat),
                         inv_std = std::move(inv_std)] {
      const Mat& g = out_grad(o);
      if (needs_grad(gamma)) accumulate(gamma, g.cwiseProduct(xhat).colwise().sum());
      if (needs_grad(beta)) accumulate(beta, g.colwise().sum());
      if (needs_grad(x)) {
        Mat dxhat = g.array().rowwise() * value(gamma).row(0).array();
        Eigen::VectorXd mean_d = dxhat.rowwise().mean();
        Eigen::VectorXd mean_dx = dxhat.cwiseProduct(xhat).rowwise().mean();
        Mat dx = dxhat;
        dx.array().colwise() -= mean_d.array();
        dx -= Mat(xhat.array().colwise() * mean_dx.array());
        dx.array().colwise() *= inv_std.array();
        accumulate(x, dx);
      }
    };
  return o;
}

Var Tape::gather_rows(Var a, const std::vector<std::size_t>& rows) {
  const Mat& src = value(a);
  Mat out(static_cast<Eigen::Index>(rows.size()), src.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = src.row(static_cast<Eigen::Index>(rows[i]));
  Var o = push(std::move(out), any_grad({a}));
  if (nodes_[o.id].needs_grad)
    nodes_[o.id].back = [this, a, o, rows] {
      Mat& g = grad_of(a);
      const Mat& go = out_grad(o);
      for (std::size_t i = 0; i < rows.size(); ++i)
        g.row(static_cast<Eigen::Index>(rows[i])) += go.row(static_cast<Eigen::Index>(i));
    };
  return o;
}

Var Tape::concat_cols(Var a, Var b) {
  const Mat& x = value(a);
  const Mat& y = value(b);
  Mat out(x.rows(), x.cols() + y.cols());
  out << x, y;
  Var o = push(std::move(out), any_grad({a, b}));
  if (nodes_[o.id].needs_grad)
    nodes_[o.id].back = [this, a, b, o] {
      const Mat& g = out_grad(o);
      const Eigen::Index ca = value(a).cols();
      if (needs_grad(a)) accumulate(a, g.leftCols(ca));
      if (needs_grad(b)) accumulate(b, g.rightCols(g.cols() - ca));
    };
  return o;
}

Var Tape::pad_cols(Var a, std::size_t cols) {
  const Mat& x = value(a);
  Mat out = Mat::Zero(x.rows(), static_cast<Eigen::Index>(cols));
  out.leftCols(x.cols()) = x;
  Var o = push(std::move(out), any_grad({a}));
  if (nodes_[o.id].needs_grad)
    nodes_[o.id].back = [this, a, o] { accumulate(a, out_grad(o).leftCols(value(a).cols())); };
  return o;
}

Var Tape::dropout(Var a, double rate, Rng& rng) {
  if (rate <= 0.0) return a;
  const Mat& x = value(a);
  Mat mask(x.rows(), x.cols());
  const double keep = 1.0 / (1.0 - rate);
  for (Eigen::Index i = 0; i < mask.size(); ++i) mask.data()[i] = rng.uniform01() < rate ? 0.0 : keep;
  Var o = push(x.cwiseProduct(mask), any_grad({a}));
  if (nodes_[o.id].needs_grad)
    nodes_[o.id].back = [this, a, o, mask = std::move(mask)] {
      accumulate(a, out_grad(o).cwiseProduct(mask));
    };
  return o;
}

Var Tape::attention(Var q, Var k, Var v, const AttentionSpec& spec) {
  const Mat& Q = value(q);
  const Mat& K = value(k);
  const Mat& V = value(v);
  const Eigen::Index d = Q.cols();
  const Eigen::Index heads = static_cast<Eigen::Index>(spec.heads);
  const Eigen::Index dh = d / heads;
  const double inv = 1.0 / std::sqrt(static_cast<double>(dh));
  Mat out = Mat::Zero(Q.rows(), d);
  // probs[segment * heads + h] is q_len x k_len.
  std::vector<Mat> probs(spec.segments.size() * static_cast<std::size_t>(heads));
  for (std::size_t s = 0; s < spec.segments.size(); ++s) {
    const auto& seg = spec.segments[s];
    const auto qb = static_cast<Eigen::Index>(seg.q_begin), ql = static_cast<Eigen::Index>(seg.q_len);
    const auto kb = static_cast<Eigen::Index>(seg.k_begin), kl = static_cast<Eigen::Index>(seg.k_len);
    for (Eigen::Index h = 0; h < heads; ++h) {
      Mat scores = Q.block(qb, h * dh, ql, dh) * K.block(kb, h * dh, kl, dh).transpose() * inv;
      for (Eigen::Index i = 0; i < ql; ++i)
        for (Eigen::Index j = 0; j < kl; ++j) {
          const bool masked = (spec.causal && j > i) ||
                              (!spec.key_mask.empty() && spec.key_mask[static_cast<std::size_t>(kb + j)]);
          if (masked) scores(i, j) = -std::numeric_limits<double>::infinity();
        }
      for (Eigen::Index i = 0; i < ql; ++i) {
        const double m = scores.row(i).maxCoeff();
        if (!std::isfinite(m)) {
          scores.row(i).setZero();
          continue;
        }
        scores.row(i) = (scores.row(i).array() - m).exp();
        scores.row(i) /= scores.row(i).sum();
      }
      out.block(qb, h * dh, ql, dh).noalias() = scores * V.block(kb, h * dh, kl, dh);
      probs[s * static_cast<std::size_t>(heads) + static_cast<std::size_t>(h)] = std::move(scores);
    }
  }
  Var o = push(std::move(out), any_grad({q, k, v}));
  if (nodes_[o.id].needs_grad)
    nodes_[o.id].back = [this, q, k, v, o, spec, probs = std::move(probs), dh, heads, inv] {
      const Mat& G = out_grad(o);
      const Mat& Q = value(q);
      const Mat& K = value(k);
      const Mat& V = value(v);
      Mat dQ = Mat::Zero(Q.rows(), Q.cols());
      Mat dK = Mat::Zero(K.rows(), K.cols());
      Mat dV = Mat::Zero(V.rows(), V.cols());
      for (std::size_t s = 0; s < spec.segments.size(); ++s) {
        const auto& seg = spec.segments[s];
        const auto qb = static_cast<Eigen::Index>(seg.q_begin), ql = static_cast<Eigen::Index>(seg.q_len);
        const auto kb = static_cast<Eigen::Index>(seg.k_begin), kl = static_cast<Eigen::Index>(seg.k_len);
        for (Eigen::Index h = 0; h < heads; ++h) {
          const Mat& P = probs[s * static_cast<std::size_t>(heads) + static_cast<std::size_t>(h)];
          auto g = G.block(qb, h * dh, ql, dh);
          Mat dP = g * V.block(kb, h * dh, kl, dh).transpose();
          dV.block(kb, h * dh, kl, dh).noalias() += P.transpose() * g;
          Eigen::VectorXd dot = dP.cwiseProduct(P).rowwise().sum();
          Mat dS = P.array() * (dP.array().colwise() - dot.array());
          dS *= inv;
          dQ.block(qb, h * dh, ql, dh).noalias() += dS * K.block(kb, h * dh, kl, dh);
          dK.block(kb, h * dh, kl, dh).noalias() += dS.transpose() * Q.block(qb, h * dh, ql, dh);
        }
      }
      accumulate(q, dQ);
      accumulate(k, dK);
      accumulate(v, dV);
    };
  return o;
}

Var Tape::mean_neg_pick(Var a, const std::vector<int>& targets) {
  const Mat& x = value(a);
  const double n = static_cast<double>(targets.size());
  double total = 0.0;
  for (std::size_t t = 0; t < targets.size(); ++t)
    if (targets[t] >= 0) total -= x(static_cast<Eigen::Index>(t), targets[t]);
  Mat out(1, 1);
  out(0, 0) = total / n;
  Var o = push(std::move(out), any_grad({a}));
  if (nodes_[o.id].needs_grad)
    nodes_[o.id].back = [this, a, o, targets, n] {
      Mat& g = grad_of(a);
      const double go = out_grad(o)(0, 0);
      for (std::size_t t = 0; t < targets.size(); ++t)
        if (targets[t] >= 0) g(static_cast<Eigen::Index>(t), targets[t]) -= go / n;
    };
  return o;
}

Var Tape::mean_neg_log_pick(Var a, const std::vector<int>& targets, double floor) {
  const Mat& x = value(a);
  const double n = static_cast<double>(targets.size());
  double total = 0.0;
  for (std::size_t t = 0; t < targets.size(); ++t) {
    const double p = targets[t] >= 0 ? x(static_cast<Eigen::Index>(t), targets[t]) : 0.0;
    total -= std::log(std::max(p, floor));
  }
  Mat out(1, 1);
  out(0, 0) = total / n;
  Var o = push(std::move(out), any_grad({a}));
  if (nodes_[o.id].needs_grad)
    nodes_[o.id].back = [this, a, o, targets, n, floor] {
      Mat& g = grad_of(a);
      const Mat& x = value(a);
      const double go = out_grad(o)(0, 0);
      for (std::size_t t = 0; t < targets.size(); ++t) {
        if (targets[t] < 0) continue;
        const double p = x(static_cast<Eigen::Index>(t), targets[t]);
        if (p > floor) g(static_cast<Eigen::Index>(t), targets[t]) -= go / (n * p);
      }
    };
  return o;
}

}  // namespace crepair::nn
