#pragma once

// Minimal reverse-mode differentiation over dense row-major matrices.
//
// Every operation appends a node holding its forward value and a closure that
// pushes the node's gradient to its inputs. backward() walks the nodes in
// reverse creation order once; a second call throws.

#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Sparse>

#include "splinecolloc/abd.hpp"

namespace splinecolloc::surrogate {

using Matrix = RowMatrix;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct Var {
  std::size_t id = 0;
};

class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  /// Leaves. Constants never receive gradients.
  Var constant(Matrix value);
  Var parameter(Matrix value);

  const Matrix& value(Var v) const { return nodes_.at(v.id).value; }
  /// Gradient of the last backward() root with respect to v (zero if v does
  /// not influence it).
  Matrix grad(Var v) const;
  std::size_t size() const noexcept { return nodes_.size(); }

  Var matmul(Var a, Var b);
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var scale(Var a, double s);
  /// a (n x c) plus a 1 x c row broadcast over rows.
  Var add_bias(Var a, Var bias);
  Var relu(Var a);
  Var concat_cols(const std::vector<Var>& parts);
  Var concat_rows(const std::vector<Var>& parts);
  Var transpose(Var a);
  /// Row-major reshape; rows * cols must equal a's size.
  Var reshape(Var a, Eigen::Index rows, Eigen::Index cols);
  /// out.row(k) = a.row(index[k]).
  Var gather_rows(Var a, std::shared_ptr<const std::vector<std::size_t>> index);
  /// out = zeros(rows, a.cols()); out.row(index[k]) += a.row(k), k ascending.
  Var scatter_add_rows(Var a, std::shared_ptr<const std::vector<std::size_t>> index,
                       std::size_t rows);
  /// out = S a for a fixed sparse S.
  Var sparse_map(Var a, std::shared_ptr<const SparseMatrix> s);
  /// Linear solve x = A^-1 f, where f has dimension rows and receives row k
  /// of `a` at rows[k] (all other rows zero). The adjoint is one transpose
  /// solve; A itself is a constant.
  Var osc_solve(Var a, std::shared_ptr<const abd::AbdFactorization> fac,
                std::shared_ptr<const std::vector<std::size_t>> rows);
  /// 1 x 1 sum of (a - target)^2.
  Var sum_squared_error(Var a, const Matrix& target);

  /// Seeds d(root)/d(root) = 1 for a 1 x 1 root and propagates.
  void backward(Var root);
  bool consumed() const noexcept { return consumed_; }

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    bool needs_grad = false;
    std::function<void(Tape&, const Matrix&)> back;
  };

  Var push(Matrix value, bool needs_grad, std::function<void(Tape&, const Matrix&)> back);
  bool needs(Var v) const { return nodes_[v.id].needs_grad; }
  void accumulate(Var v, const Matrix& g);
  template <class Expr>
  void accumulate_expr(Var v, const Expr& g);

  std::vector<Node> nodes_;
  bool consumed_ = false;
};

}  // namespace splinecolloc::surrogate
