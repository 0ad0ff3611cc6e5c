#include "splinecolloc/surrogate/tape.hpp"

#include "splinecolloc/errors.hpp"

namespace splinecolloc::surrogate {

Var Tape::push(Matrix value, bool needs_grad, std::function<void(Tape&, const Matrix&)> back) {
  if (consumed_) throw InvalidArgument("Tape: cannot record after backward()");
  Node n;
  n.value = std::move(value);
  n.needs_grad = needs_grad;
  if (needs_grad) n.back = std::move(back);
  nodes_.push_back(std::move(n));
  return Var{nodes_.size() - 1};
}

void Tape::accumulate(Var v, const Matrix& g) { accumulate_expr(v, g); }

template <class Expr>
void Tape::accumulate_expr(Var v, const Expr& g) {
  Node& n = nodes_[v.id];
  if (!n.needs_grad) return;
  if (n.grad.size() == 0)
    n.grad = g;
  else
    n.grad += g;
}

Var Tape::constant(Matrix value) { return push(std::move(value), false, {}); }

Var Tape::parameter(Matrix value) {
  return push(std::move(value), true, [](Tape&, const Matrix&) {});
}

Matrix Tape::grad(Var v) const {
  const Node& n = nodes_.at(v.id);
  if (n.grad.size() == 0) return Matrix::Zero(n.value.rows(), n.value.cols());
  return n.grad;
}

Var Tape::matmul(Var a, Var b) {
  const Matrix& A = value(a);
  const Matrix& B = value(b);
  if (A.cols() != B.rows()) throw DimensionMismatch("Tape::matmul: inner dimensions differ");
  Matrix out = A * B;
  return push(std::move(out), needs(a) || needs(b), [a, b](Tape& t, const Matrix& g) {
    if (t.needs(a)) t.accumulate(a, g * t.value(b).transpose());
    if (t.needs(b)) t.accumulate(b, t.value(a).transpose() * g);
  });
}

Var Tape::add(Var a, Var b) {
  if (value(a).rows() != value(b).rows() || value(a).cols() != value(b).cols())
    throw DimensionMismatch("Tape::add: shapes differ");
  return push(value(a) + value(b), needs(a) || needs(b), [a, b](Tape& t, const Matrix& g) {
    t.accumulate(a, g);
    t.accumulate(b, g);
  });
}

Var Tape::sub(Var a, Var b) {
  if (value(a).rows() != value(b).rows() || value(a).cols() != value(b).cols())
    throw DimensionMismatch("Tape::sub: shapes differ");
  return push(value(a) - value(b), needs(a) || needs(b), [a, b](Tape& t, const Matrix& g) {
    t.accumulate(a, g);
    t.accumulate_expr(b, -g);
  });
}

Var Tape::scale(Var a, double s) {
  return push(s * value(a), needs(a), [a, s](Tape& t, const Matrix& g) { t.accumulate_expr(a, s * g); });
}

Var Tape::add_bias(Var a, Var bias) {
  const Matrix& A = value(a);
  const Matrix& b = value(bias);
  if (b.rows() != 1 || b.cols() != A.cols())
    throw DimensionMismatch("Tape::add_bias: bias must be 1 x cols");
  Matrix out = A.rowwise() + b.row(0);
  return push(std::move(out), needs(a) || needs(bias), [a, bias](Tape& t, const Matrix& g) {
    t.accumulate(a, g);
    if (t.needs(bias)) t.accumulate(bias, g.colwise().sum());
  });
}

Var Tape::relu(Var a) {
  Matrix out = value(a).cwiseMax(0.0);
  return push(std::move(out), needs(a), [a](Tape& t, const Matrix& g) {
    t.accumulate_expr(a, (t.value(a).array() > 0.0).select(g, 0.0).matrix());
  });
}

Var Tape::concat_cols(const std::vector<Var>& parts) {
  if (parts.empty()) throw InvalidArgument("Tape::concat_cols: nothing to concatenate");
  const Eigen::Index rows = value(parts[0]).rows();
  Eigen::Index cols = 0;
  bool ng = false;
  for (Var p : parts) {
    if (value(p).rows() != rows) throw DimensionMismatch("Tape::concat_cols: row counts differ");
    cols += value(p).cols();
    ng = ng || needs(p);
  }
  Matrix out(rows, cols);
  Eigen::Index c = 0;
  for (Var p : parts) {
    out.middleCols(c, value(p).cols()) = value(p);
    c += value(p).cols();
  }
  return push(std::move(out), ng, [parts](Tape& t, const Matrix& g) {
    Eigen::Index c0 = 0;
    for (Var p : parts) {
      const Eigen::Index w = t.value(p).cols();
      if (t.needs(p)) t.accumulate(p, g.middleCols(c0, w));
      c0 += w;
    }
  });
}

Var Tape::concat_rows(const std::vector<Var>& parts) {
  if (parts.empty()) throw InvalidArgument("Tape::concat_rows: nothing to concatenate");
  const Eigen::Index cols = value(parts[0]).cols();
  Eigen::Index rows = 0;
  bool ng = false;
  for (Var p : parts) {
    if (value(p).cols() != cols) throw DimensionMismatch("Tape::concat_rows: column counts differ");
    rows += value(p).rows();
    ng = ng || needs(p);
  }
  Matrix out(rows, cols);
  Eigen::Index r = 0;
  for (Var p : parts) {
    out.middleRows(r, value(p).rows()) = value(p);
    r += value(p).rows();
  }
  return push(std::move(out), ng, [parts](Tape& t, const Matrix& g) {
    Eigen::Index r0 = 0;
    for (Var p : parts) {
      const Eigen::Index h = t.value(p).rows();
      if (t.needs(p)) t.accumulate(p, g.middleRows(r0, h));
      r0 += h;
    }
  });
}

Var Tape::transpose(Var a) {
  Matrix out = value(a).transpose();
  return push(std::move(out), needs(a),
              [a](Tape& t, const Matrix& g) { t.accumulate(a, Matrix(g.transpose())); });
}

Var Tape::reshape(Var a, Eigen::Index rows, Eigen::Index cols) {
  const Matrix& A = value(a);
  if (rows * cols != A.size()) throw DimensionMismatch("Tape::reshape: size changes");
  Matrix out = Eigen::Map<const Matrix>(A.data(), rows, cols);
  return push(std::move(out), needs(a), [a](Tape& t, const Matrix& g) {
    const Matrix& v = t.value(a);
    t.accumulate(a, Matrix(Eigen::Map<const Matrix>(g.data(), v.rows(), v.cols())));
  });
}

Var Tape::gather_rows(Var a, std::shared_ptr<const std::vector<std::size_t>> index) {
  const Matrix& A = value(a);
  Matrix out(static_cast<Eigen::Index>(index->size()), A.cols());
  for (std::size_t k = 0; k < index->size(); ++k) {
    if ((*index)[k] >= static_cast<std::size_t>(A.rows()))
      throw DimensionMismatch("Tape::gather_rows: index out of range");
    out.row(static_cast<Eigen::Index>(k)) = A.row(static_cast<Eigen::Index>((*index)[k]));
  }
  return push(std::move(out), needs(a), [a, index](Tape& t, const Matrix& g) {
    Matrix ga = Matrix::Zero(t.value(a).rows(), t.value(a).cols());
    for (std::size_t k = 0; k < index->size(); ++k)
      ga.row(static_cast<Eigen::Index>((*index)[k])) += g.row(static_cast<Eigen::Index>(k));
    t.accumulate(a, ga);
  });
}

Var Tape::scatter_add_rows(Var a, std::shared_ptr<const std::vector<std::size_t>> index,
                           std::size_t rows) {
  const Matrix& A = value(a);
  if (index->size() != static_cast<std::size_t>(A.rows()))
    throw DimensionMismatch("Tape::scatter_add_rows: one index per row required");
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(rows), A.cols());
  for (std::size_t k = 0; k < index->size(); ++k) {
    if ((*index)[k] >= rows) throw DimensionMismatch("Tape::scatter_add_rows: index out of range");
    out.row(static_cast<Eigen::Index>((*index)[k])) += A.row(static_cast<Eigen::Index>(k));
  }
  return push(std::move(out), needs(a), [a, index](Tape& t, const Matrix& g) {
    Matrix ga(static_cast<Eigen::Index>(index->size()), g.cols());
    for (std::size_t k = 0; k < index->size(); ++k)
      ga.row(static_cast<Eigen::Index>(k)) = g.row(static_cast<Eigen::Index>((*index)[k]));
    t.accumulate(a, ga);
  });
}

Var Tape::sparse_map(Var a, std::shared_ptr<const SparseMatrix> s) {
  if (s->cols() != value(a).rows()) throw DimensionMismatch("Tape::sparse_map: shape mismatch");
  Matrix out = (*s) * value(a);
  return push(std::move(out), needs(a), [a, s](Tape& t, const Matrix& g) {
    t.accumulate(a, Matrix(s->transpose() * g));
  });
}

Var Tape::osc_solve(Var a, std::shared_ptr<const abd::AbdFactorization> fac,
                    std::shared_ptr<const std::vector<std::size_t>> rows) {
  const Matrix& A = value(a);
  if (rows->size() != static_cast<std::size_t>(A.rows()))
    throw DimensionMismatch("Tape::osc_solve: one target row per input row required");
  const auto n = static_cast<Eigen::Index>(fac->dimension());
  Matrix x = Matrix::Zero(n, A.cols());
  for (std::size_t k = 0; k < rows->size(); ++k)
    x.row(static_cast<Eigen::Index>((*rows)[k])) = A.row(static_cast<Eigen::Index>(k));
  fac->solve_in_place(x);
  return push(std::move(x), needs(a), [a, fac, rows](Tape& t, const Matrix& g) {
    Matrix adj = g;
    fac->solve_transpose_in_place(adj);
    Matrix ga(static_cast<Eigen::Index>(rows->size()), g.cols());
    for (std::size_t k = 0; k < rows->size(); ++k)
      ga.row(static_cast<Eigen::Index>(k)) = adj.row(static_cast<Eigen::Index>((*rows)[k]));
    t.accumulate(a, ga);
  });
}

Var Tape::sum_squared_error(Var a, const Matrix& target) {
  const Matrix& A = value(a);
  if (A.rows() != target.rows() || A.cols() != target.cols())
    throw DimensionMismatch("Tape::sum_squared_error: shapes differ");
  Matrix diff = A - target;
  Matrix out(1, 1);
  out(0, 0) = diff.squaredNorm();
  return push(std::move(out), needs(a), [a, diff = std::move(diff)](Tape& t, const Matrix& g) {
    t.accumulate_expr(a, (2.0 * g(0, 0)) * diff);
  });
}

void Tape::backward(Var root) {
  if (consumed_) throw InvalidArgument("Tape: backward() already ran on this tape");
  if (value(root).size() != 1) throw DimensionMismatch("Tape::backward: root must be 1 x 1");
  consumed_ = true;
  if (!needs(root)) return;
  nodes_[root.id].grad = Matrix::Ones(1, 1);
  for (std::size_t k = root.id + 1; k-- > 0;) {
    Node& n = nodes_[k];
    if (!n.needs_grad || n.grad.size() == 0 || !n.back) continue;
    n.back(*this, n.grad);
  }
}

}  // namespace splinecolloc::surrogate
