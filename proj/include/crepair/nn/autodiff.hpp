#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "crepair/rng.hpp"

namespace crepair::nn {

using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Named parameter tensors in registration order. Order is part of the
// checkpoint format and of every loop over parameters.
class ParameterStore {
 public:
  std::size_t add(const std::string& name, Mat value);
  std::size_t size() const { return values_.size(); }
  std::size_t index(const std::string& name) const;
  bool contains(const std::string& name) const { return by_name_.count(name) > 0; }
  const std::string& name(std::size_t i) const { return names_[i]; }
  Mat& value(std::size_t i) { return values_[i]; }
  const Mat& value(std::size_t i) const { return values_[i]; }
  Mat& value(const std::string& name) { return values_[index(name)]; }
  const Mat& value(const std::string& name) const { return values_[index(name)]; }
  std::size_t scalar_count() const;

 private:
  std::vector<std::string> names_;
  std::vector<Mat> values_;
  std::unordered_map<std::string, std::size_t> by_name_;
};

// Gradients aligned with a ParameterStore; empty matrices stand for zero.
class GradStore {
 public:
  explicit GradStore(std::size_t n = 0) : grads_(n) {}
  void resize(std::size_t n) { grads_.resize(n); }
  std::size_t size() const { return grads_.size(); }
  void accumulate(std::size_t i, const Mat& g);
  void add(const GradStore& other);
  void scale(double factor);
  double squared_norm() const;
  const Mat& grad(std::size_t i) const { return grads_[i]; }
  bool has(std::size_t i) const { return grads_[i].size() > 0; }
  void clear();

 private:
  std::vector<Mat> grads_;
};

struct Var {
  int id = -1;
  bool valid() const { return id >= 0; }
};

// One query segment attending to one key segment. Segments let many short
// sequences share a single packed matrix.
struct AttentionSegment {
  std::size_t q_begin = 0, q_len = 0;
  std::size_t k_begin = 0, k_len = 0;
};

struct AttentionSpec {
  std::vector<AttentionSegment> segments;
  std::size_t heads = 1;
  bool causal = false;
  // Key rows excluded from every softmax (e.g. PAD positions).
  std::vector<char> key_mask;
};

// Reverse-mode tape over dense row-major matrices. Parameters are read from
// the store by reference; their gradients are flushed into `grads` by
// backward(). Without a GradStore no backward closures are recorded.
class Tape {
 public:
  explicit Tape(const ParameterStore* params = nullptr, GradStore* grads = nullptr);

  const Mat& value(Var v) const;
  double scalar(Var v) const { return value(v)(0, 0); }
  bool needs_grad(Var v) const { return nodes_[v.id].needs_grad; }
  std::size_t node_count() const { return nodes_.size(); }

  Var constant(Mat m);
  Var param(std::size_t index);
  Var param(const std::string& name);

  void backward(Var loss);

  Var matmul(Var a, Var b);
  Var matmul_nt(Var a, Var b);  // a * b^T
  Var add(Var a, Var b);
  Var add_row(Var a, Var row);  // row broadcast over rows of a
  Var mul(Var a, Var b);
  Var mul_col(Var a, Var col);  // col (r x 1) broadcast over columns of a
  Var scale(Var a, double c);
  Var one_minus(Var a);
  Var tanh(Var a);
  Var sigmoid(Var a);
  Var gelu(Var a);
  Var softmax_rows(Var a);
  Var log_softmax_rows(Var a);
  Var transpose(Var a);
  Var layer_norm(Var x, Var gamma, Var beta, double eps = 1e-5);
  Var gather_rows(Var a, const std::vector<std::size_t>& rows);
  Var concat_cols(Var a, Var b);
  Var pad_cols(Var a, std::size_t cols);
  Var dropout(Var a, double rate, Rng& rng);
  Var attention(Var q, Var k, Var v, const AttentionSpec& spec);
  // -(1/T) sum_t a(t, target_t). Negative targets contribute nothing.
  Var mean_neg_pick(Var a, const std::vector<int>& targets);
  // -(1/T) sum_t log(max(a(t, target_t), floor)); a negative target counts
  // as log(floor) with no gradient.
  Var mean_neg_log_pick(Var a, const std::vector<int>& targets, double floor);

 private:
  struct Node {
    Mat own;
    const Mat* ref = nullptr;
    Mat grad;
    bool needs_grad = false;
    long param = -1;
    std::function<void()> back;
  };

  Var push(Mat value, bool needs_grad);
  Mat& grad_of(Var v);
  void accumulate(Var v, const Mat& g);
  const Mat& out_grad(Var v) const { return nodes_[v.id].grad; }
  bool any_grad(std::initializer_list<Var> vars) const;

  const ParameterStore* params_;
  GradStore* grads_;
  std::vector<Node> nodes_;
};

}  // namespace crepair::nn
