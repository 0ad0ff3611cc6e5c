#include <functional>
#include <random>

#include <gtest/gtest.h>

#include "splinecolloc/errors.hpp"
#include "splinecolloc/surrogate/tape.hpp"

using namespace splinecolloc;
using namespace splinecolloc::surrogate;

namespace {

Matrix random_matrix(Eigen::Index r, Eigen::Index c, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
  return m;
}

// Builds a scalar from the given leaves; used for both the tape gradient and
// the central differences.
using Builder = std::function<Var(Tape&, const std::vector<Var>&)>;

void check_gradient(const std::vector<Matrix>& inputs, const Builder& build, double tol = 1e-7) {
  Tape tape;
  std::vector<Var> leaves;
  for (const auto& m : inputs) leaves.push_back(tape.parameter(m));
  const Var out = build(tape, leaves);
  tape.backward(out);
  auto eval = [&](const std::vector<Matrix>& in) {
    Tape t;
    std::vector<Var> l;
    for (const auto& m : in) l.push_back(t.parameter(m));
    return t.value(build(t, l))(0, 0);
  };
  for (std::size_t a = 0; a < inputs.size(); ++a) {
    const Matrix g = tape.grad(leaves[a]);
    for (Eigen::Index i = 0; i < inputs[a].size(); ++i) {
      auto plus = inputs, minus = inputs;
      const double h = 1e-6;
      plus[a].data()[i] += h;
      minus[a].data()[i] -= h;
      const double fd = (eval(plus) - eval(minus)) / (2 * h);
      EXPECT_NEAR(g.data()[i], fd, tol * std::max(1.0, std::abs(fd))) << "input " << a << " entry " << i;
    }
  }
}

Var loss(Tape& t, Var v) {
  return t.sum_squared_error(v, Matrix::Constant(t.value(v).rows(), t.value(v).cols(), 0.3));
}

}  // namespace

TEST(Tape, LinearAlgebraOps) {
  check_gradient({random_matrix(3, 4, 1), random_matrix(4, 2, 2), random_matrix(1, 2, 3)},
                 [](Tape& t, const std::vector<Var>& v) {
                   const Var m = t.matmul(v[0], v[1]);
                   return loss(t, t.scale(t.add_bias(m, v[2]), -1.7));
                 });
  check_gradient({random_matrix(3, 3, 4), random_matrix(3, 3, 5)}, [](Tape& t, const std::vector<Var>& v) {
    return loss(t, t.sub(t.add(v[0], t.transpose(v[1])), v[1]));
  });
}

TEST(Tape, ShapeOps) {
  check_gradient({random_matrix(2, 6, 6), random_matrix(2, 3, 7)}, [](Tape& t, const std::vector<Var>& v) {
    const Var c = t.concat_cols({v[0], v[1], v[0]});
    return loss(t, t.scale(t.reshape(c, 3, 10), 0.7));
  });
  check_gradient({random_matrix(2, 3, 8), random_matrix(4, 3, 9)}, [](Tape& t, const std::vector<Var>& v) {
    return loss(t, t.concat_rows({v[0], v[1], v[0]}));
  });
}

TEST(Tape, ReshapeIsRowMajor) {
  Tape t;
  Matrix m(2, 3);
  m << 1, 2, 3, 4, 5, 6;
  const Matrix r = t.value(t.reshape(t.constant(m), 3, 2));
  EXPECT_EQ(r(0, 1), 2.0);
  EXPECT_EQ(r(1, 0), 3.0);
  EXPECT_EQ(r(2, 1), 6.0);
}

TEST(Tape, ReluAwayFromKinks) {
  Matrix m = random_matrix(4, 4, 10);
  for (Eigen::Index i = 0; i < m.size(); ++i)
    if (std::abs(m.data()[i]) < 0.05) m.data()[i] = 0.5;
  check_gradient({m}, [](Tape& t, const std::vector<Var>& v) { return loss(t, t.relu(v[0])); });
}

TEST(Tape, GatherScatter) {
  auto idx = std::make_shared<const std::vector<std::size_t>>(std::vector<std::size_t>{2, 0, 2, 1, 3, 2});
  check_gradient({random_matrix(4, 3, 11)}, [idx](Tape& t, const std::vector<Var>& v) {
    const Var g = t.gather_rows(v[0], idx);
    return loss(t, t.scatter_add_rows(t.scale(g, 1.3), idx, 5));
  });
}

TEST(Tape, SparseMapAndSolve) {
  auto s = std::make_shared<SparseMatrix>(3, 5);
  s->insert(0, 1) = 2.0;
  s->insert(1, 0) = -1.0;
  s->insert(1, 4) = 0.5;
  s->insert(2, 2) = 3.0;
  s->makeCompressed();
  const auto m = abd::random_abd(abd::BlockStructure::colrow(1, 4, 3, 4), 2);
  auto fac = std::make_shared<const abd::AbdFactorization>(abd::factorize(m));
  const std::size_t n = m.dimension();
  // Four data rows land on a subset of the system rows.
  auto rows = std::make_shared<const std::vector<std::size_t>>(std::vector<std::size_t>{0, 3, 5, n - 1});
  check_gradient({random_matrix(5, 2, 12), random_matrix(4, 2, 13)},
                 [s, fac, rows](Tape& t, const std::vector<Var>& v) {
                   const Var a = t.sparse_map(v[0], s);
                   const Var x = t.osc_solve(v[1], fac, rows);
                   return t.add(loss(t, a), loss(t, x));
                 });
}

TEST(Tape, OscSolveForwardMatchesSolve) {
  const auto m = abd::random_abd(abd::BlockStructure::colrow(1, 3, 4, 3), 8);
  auto fac = std::make_shared<const abd::AbdFactorization>(abd::factorize(m));
  const auto n = static_cast<Eigen::Index>(m.dimension());
  std::vector<std::size_t> all(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  Tape t;
  const Matrix f = random_matrix(n, 1, 14);
  const Var x = t.osc_solve(t.constant(f), fac, std::make_shared<const std::vector<std::size_t>>(all));
  EXPECT_LT((Eigen::VectorXd(t.value(x).col(0)) - fac->solve(f.col(0))).norm(), 1e-14);
}

TEST(Tape, UnusedParameterHasZeroGradient) {
  Tape t;
  const Var a = t.parameter(random_matrix(2, 2, 15));
  const Var b = t.parameter(random_matrix(2, 2, 16));
  t.backward(loss(t, a));
  EXPECT_TRUE((t.grad(b).array() == 0.0).all());
}

TEST(Tape, SecondBackwardThrows) {
  Tape t;
  const Var a = t.parameter(random_matrix(2, 2, 17));
  const Var l = loss(t, a);
  t.backward(l);
  EXPECT_TRUE(t.consumed());
  EXPECT_THROW(t.backward(l), Error);
}

TEST(Tape, ShapeErrors) {
  Tape t;
  const Var a = t.constant(Matrix::Zero(2, 3));
  EXPECT_THROW(t.matmul(a, a), DimensionMismatch);
  EXPECT_THROW(t.add(a, t.constant(Matrix::Zero(3, 2))), DimensionMismatch);
  EXPECT_THROW(t.reshape(a, 4, 2), DimensionMismatch);
  EXPECT_THROW(t.backward(a), Error);
}
