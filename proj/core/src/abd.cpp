#include "splinecolloc/abd.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <utility>

#include "splinecolloc/errors.hpp"

namespace splinecolloc::abd {

namespace {

// Row kernels on row-major right-hand-side storage with `k` columns.
inline void sub_scaled(double* dst, const double* src, double a, Eigen::Index k) {
  for (Eigen::Index j = 0; j < k; ++j) dst[j] -= a * src[j];
}

inline void swap_rows(double* a, double* b, Eigen::Index k) {
  for (Eigen::Index j = 0; j < k; ++j) std::swap(a[j], b[j]);
}

inline void scale_row(double* a, double s, Eigen::Index k) {
  for (Eigen::Index j = 0; j < k; ++j) a[j] *= s;
}

std::string join(const std::vector<std::size_t>& v) {
  std::ostringstream os;
  os << '{';
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  os << '}';
  return os.str();
}

}  // namespace

// --- BlockStructure ----------------------------------------------------------

BlockStructure::BlockStructure(std::vector<std::size_t> rows, std::vector<std::size_t> cols,
                               std::vector<std::size_t> overlap)
    : rows_(std::move(rows)), cols_(std::move(cols)), overlap_(std::move(overlap)) {
  const std::size_t nb = rows_.size();
  auto fail = [&](const std::string& why) {
    throw InvalidArgument("invalid ABD block structure rows=" + join(rows_) +
                          " cols=" + join(cols_) + " overlap=" + join(overlap_) + ": " + why);
  };
  if (nb == 0) fail("no blocks");
  if (cols_.size() != nb) fail("rows and cols differ in length");
  if (overlap_.size() + 1 != nb) fail("overlap needs block_count - 1 entries");
  for (std::size_t i = 0; i < nb; ++i) {
    if (rows_[i] == 0 || cols_[i] == 0) fail("empty block " + std::to_string(i));
  }
  for (std::size_t i = 0; i + 1 < nb; ++i) {
    if (overlap_[i] > std::min(cols_[i], cols_[i + 1]))
      fail("overlap " + std::to_string(i) + " exceeds a neighbouring block width");
  }
  for (std::size_t i = 1; i + 1 < nb; ++i) {
    if (overlap_[i - 1] + overlap_[i] > cols_[i])
      fail("blocks " + std::to_string(i - 1) + " and " + std::to_string(i + 1) + " share columns");
  }

  row_offset_.resize(nb);
  col_offset_.resize(nb);
  carry_.resize(nb);
  std::size_t r = 0, c = 0;
  for (std::size_t i = 0; i < nb; ++i) {
    row_offset_[i] = r;
    col_offset_[i] = c;
    r += rows_[i];
    if (i + 1 < nb) c += cols_[i] - overlap_[i];
  }
  dimension_ = r;
  if (c + cols_.back() != r)
    fail("not square (" + std::to_string(r) + " rows, " + std::to_string(c + cols_.back()) +
         " columns)");

  for (std::size_t i = 0; i < nb; ++i) {
    const std::size_t p = i == 0 ? 0 : carry_[i - 1];
    const std::size_t ov = this->overlap(i);
    if (p + ov > cols_[i]) fail("carried rows of block " + std::to_string(i) + " do not fit");
    const std::size_t q = cols_[i] - ov - p;
    if (q > rows_[i])
      fail("block " + std::to_string(i) + " has fewer rows than exclusive columns");
    carry_[i] = rows_[i] - q;
    if (carry_[i] > ov)
      fail("block " + std::to_string(i) + " leaves more rows than shared columns");
  }
}

BlockStructure BlockStructure::colrow(std::size_t top_rows, std::size_t block_rows,
                                      std::size_t blocks, std::size_t overlap) {
  if (top_rows > overlap) throw InvalidArgument("colrow: top_rows exceeds overlap");
  std::vector<std::size_t> rows, cols, ov;
  if (top_rows > 0) {
    rows.push_back(top_rows);
    cols.push_back(overlap);
  }
  for (std::size_t b = 0; b < blocks; ++b) {
    rows.push_back(block_rows);
    cols.push_back(block_rows + overlap);
  }
  if (overlap - top_rows > 0) {
    rows.push_back(overlap - top_rows);
    cols.push_back(overlap);
  }
  ov.assign(rows.empty() ? 0 : rows.size() - 1, overlap);
  return BlockStructure(std::move(rows), std::move(cols), std::move(ov));
}

std::size_t BlockStructure::overlap(std::size_t block) const {
  if (block >= rows_.size()) throw InvalidArgument("block index out of range");
  return block + 1 < rows_.size() ? overlap_[block] : 0;
}

std::size_t BlockStructure::max_block_cols() const {
  return *std::max_element(cols_.begin(), cols_.end());
}

// --- AbdMatrix ---------------------------------------------------------------

AbdMatrix::AbdMatrix(BlockStructure structure) : structure_(std::move(structure)) {
  blocks_.reserve(structure_.block_count());
  for (std::size_t i = 0; i < structure_.block_count(); ++i) {
    blocks_.push_back(RowMatrix::Zero(static_cast<Eigen::Index>(structure_.rows(i)),
                                      static_cast<Eigen::Index>(structure_.cols(i))));
  }
}

AbdMatrix assemble(BlockStructure structure, std::vector<RowMatrix> blocks) {
  if (blocks.size() != structure.block_count()) {
    throw DimensionMismatch("assemble: expected " + std::to_string(structure.block_count()) +
                            " blocks, got " + std::to_string(blocks.size()));
  }
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (static_cast<std::size_t>(blocks[i].rows()) != structure.rows(i) ||
        static_cast<std::size_t>(blocks[i].cols()) != structure.cols(i)) {
      std::ostringstream os;
      os << "assemble: block " << i << " is " << blocks[i].rows() << "x" << blocks[i].cols()
         << ", structure expects " << structure.rows(i) << "x" << structure.cols(i);
      throw DimensionMismatch(os.str());
    }
  }
  AbdMatrix m(std::move(structure));
  m.blocks_ = std::move(blocks);
  return m;
}

namespace {

std::size_t owning_block(const BlockStructure& s, std::size_t row) {
  std::size_t lo = 0, hi = s.block_count();
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    if (s.row_offset(mid) <= row) lo = mid; else hi = mid;
  }
  return lo;
}

}  // namespace

void AbdMatrix::set(std::size_t row, std::size_t col, double value) {
  if (row >= dimension() || col >= dimension())
    throw DimensionMismatch("AbdMatrix::set: index out of range");
  const std::size_t b = owning_block(structure_, row);
  const std::size_t c0 = structure_.col_offset(b);
  if (col < c0 || col >= c0 + structure_.cols(b)) {
    throw InvalidArgument("AbdMatrix::set: (" + std::to_string(row) + ", " + std::to_string(col) +
                          ") is outside block " + std::to_string(b));
  }
  blocks_[b](static_cast<Eigen::Index>(row - structure_.row_offset(b)),
             static_cast<Eigen::Index>(col - c0)) = value;
}

double AbdMatrix::get(std::size_t row, std::size_t col) const {
  if (row >= dimension() || col >= dimension())
    throw DimensionMismatch("AbdMatrix::get: index out of range");
  const std::size_t b = owning_block(structure_, row);
  const std::size_t c0 = structure_.col_offset(b);
  if (col < c0 || col >= c0 + structure_.cols(b)) return 0.0;
  return blocks_[b](static_cast<Eigen::Index>(row - structure_.row_offset(b)),
                    static_cast<Eigen::Index>(col - c0));
}

Eigen::MatrixXd AbdMatrix::to_dense() const {
  const auto n = static_cast<Eigen::Index>(dimension());
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    d.block(static_cast<Eigen::Index>(structure_.row_offset(i)),
            static_cast<Eigen::Index>(structure_.col_offset(i)), blocks_[i].rows(),
            blocks_[i].cols()) = blocks_[i];
  }
  return d;
}

Eigen::MatrixXd to_dense(const AbdMatrix& m) { return m.to_dense(); }

Eigen::VectorXd AbdMatrix::multiply(const Eigen::VectorXd& x) const {
  if (static_cast<std::size_t>(x.size()) != dimension())
    throw DimensionMismatch("AbdMatrix::multiply: length mismatch");
  Eigen::VectorXd y(x.size());
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    y.segment(static_cast<Eigen::Index>(structure_.row_offset(i)), blocks_[i].rows()) =
        blocks_[i] * x.segment(static_cast<Eigen::Index>(structure_.col_offset(i)),
                               blocks_[i].cols());
  }
  return y;
}

Eigen::VectorXd AbdMatrix::multiply_transpose(const Eigen::VectorXd& y) const {
  if (static_cast<std::size_t>(y.size()) != dimension())
    throw DimensionMismatch("AbdMatrix::multiply_transpose: length mismatch");
  Eigen::VectorXd x = Eigen::VectorXd::Zero(y.size());
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    x.segment(static_cast<Eigen::Index>(structure_.col_offset(i)), blocks_[i].cols()) +=
        blocks_[i].transpose() *
        y.segment(static_cast<Eigen::Index>(structure_.row_offset(i)), blocks_[i].rows());
  }
  return x;
}

double AbdMatrix::max_abs() const {
  double m = 0.0;
  for (const auto& b : blocks_) m = std::max(m, b.cwiseAbs().maxCoeff());
  return m;
}

double AbdMatrix::norm1() const {
  Eigen::VectorXd colsum = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dimension()));
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    colsum.segment(static_cast<Eigen::Index>(structure_.col_offset(i)), blocks_[i].cols()) +=
        blocks_[i].cwiseAbs().colwise().sum().transpose();
  }
  return colsum.size() ? colsum.maxCoeff() : 0.0;
}

// --- factorization -----------------------------------------------------------
//
// Stage i first takes p = carry_rows(i-1) column pivots: carried row t of
// block i-1 picks the largest entry among the still-free shared columns, the
// column is swapped into position t and the remaining shared columns are
// eliminated against it. Block i then takes q = row_pivots(i) row pivots in
// its exclusive columns p..p+q-1 with partial pivoting over its rows.
//
// Multipliers are stored in the eliminated positions: column multipliers to
// the right of the pivot in the carried row, row multipliers below the pivot.
// Swaps never touch positions already holding multipliers, so both kinds of
// operation are replayed in chronological order by the solves.

AbdFactorization::AbdFactorization(const AbdMatrix& m)
    : structure_(m.structure()), panels_(m.blocks()) {
  const BlockStructure& s = structure_;
  const std::size_t nb = s.block_count();
  const double tol = kSingularityThreshold * m.max_abs();
  column_pivot_.resize(nb);
  row_pivot_.resize(nb);

  for (std::size_t i = 0; i < nb; ++i) {
    RowMatrix& cur = panels_[i];
    const auto R = static_cast<Eigen::Index>(s.rows(i));
    const auto C = static_cast<Eigen::Index>(s.cols(i));
    const auto p = static_cast<Eigen::Index>(s.column_pivots(i));

    if (p > 0) {
      RowMatrix& prev = panels_[i - 1];
      const auto ov = static_cast<Eigen::Index>(s.overlap(i - 1));
      const Eigen::Index pc0 = prev.cols() - ov;
      const auto qprev = static_cast<Eigen::Index>(s.row_pivots(i - 1));
      for (Eigen::Index t = 0; t < p; ++t) {
        const Eigen::Index row = qprev + t;
        Eigen::Index best = t;
        double bv = std::abs(prev(row, pc0 + t));
        for (Eigen::Index u = t + 1; u < ov; ++u) {
          const double v = std::abs(prev(row, pc0 + u));
          if (v > bv) { bv = v; best = u; }
        }
        if (!(bv > tol)) {
          throw SingularMatrix("ABD factorization: no admissible column pivot for row " +
                                   std::to_string(s.row_offset(i - 1) + static_cast<std::size_t>(row)) +
                                   " (block " + std::to_string(i - 1) + ")",
                               i - 1);
        }
        column_pivot_[i].push_back(s.col_offset(i) + static_cast<std::size_t>(best));
        if (best != t) {
          for (Eigen::Index r = 0; r < prev.rows(); ++r) {
            if (r >= qprev && r < qprev + t) continue;
            std::swap(prev(r, pc0 + t), prev(r, pc0 + best));
          }
          for (Eigen::Index r = 0; r < R; ++r) std::swap(cur(r, t), cur(r, best));
        }
        const double inv = 1.0 / prev(row, pc0 + t);
        for (Eigen::Index u = t + 1; u < ov; ++u) prev(row, pc0 + u) *= inv;
        const double* mult = &prev(row, pc0);
        for (Eigen::Index r = 0; r < prev.rows(); ++r) {
          if (r >= qprev && r <= row) continue;
          double* pr = &prev(r, pc0);
          const double a = pr[t];
          if (a == 0.0) continue;
          for (Eigen::Index u = t + 1; u < ov; ++u) pr[u] -= mult[u] * a;
        }
        for (Eigen::Index r = 0; r < R; ++r) {
          double* cr = &cur(r, 0);
          const double a = cr[t];
          if (a == 0.0) continue;
          for (Eigen::Index u = t + 1; u < ov; ++u) cr[u] -= mult[u] * a;
        }
      }
    }

    const auto q = static_cast<Eigen::Index>(s.row_pivots(i));
    for (Eigen::Index k = 0; k < q; ++k) {
      const Eigen::Index lc = p + k;
      Eigen::Index best = k;
      double bv = std::abs(cur(k, lc));
      for (Eigen::Index r = k + 1; r < R; ++r) {
        const double v = std::abs(cur(r, lc));
        if (v > bv) { bv = v; best = r; }
      }
      if (!(bv > tol)) {
        throw SingularMatrix("ABD factorization: no admissible row pivot for column " +
                                 std::to_string(s.col_offset(i) + static_cast<std::size_t>(lc)) +
                                 " (block " + std::to_string(i) + ")",
                             i);
      }
      row_pivot_[i].push_back(static_cast<std::size_t>(best));
      if (best != k) {
        double* a = &cur(k, 0);
        double* b = &cur(best, 0);
        for (Eigen::Index j = 0; j < p; ++j) std::swap(a[j], b[j]);
        for (Eigen::Index j = lc; j < C; ++j) std::swap(a[j], b[j]);
      }
      const double* prow = &cur(k, 0);
      const double inv = 1.0 / prow[lc];
      for (Eigen::Index r = k + 1; r < R; ++r) {
        double* rr = &cur(r, 0);
        const double mlt = rr[lc] * inv;
        rr[lc] = mlt;
        if (mlt == 0.0) continue;
        for (Eigen::Index j = 0; j < p; ++j) rr[j] -= mlt * prow[j];
        for (Eigen::Index j = lc + 1; j < C; ++j) rr[j] -= mlt * prow[j];
      }
    }
  }
}

AbdFactorization factorize(const AbdMatrix& m) { return AbdFactorization(m); }

void AbdFactorization::check_rows(std::size_t rows) const {
  if (rows != dimension()) {
    throw DimensionMismatch("ABD solve: right-hand side has " + std::to_string(rows) +
                            " rows, system dimension is " + std::to_string(dimension()));
  }
}

void AbdFactorization::solve_in_place(RowMatrix& rhs) const {
  check_rows(static_cast<std::size_t>(rhs.rows()));
  const BlockStructure& s = structure_;
  const std::size_t nb = s.block_count();
  const Eigen::Index k = rhs.cols();
  if (k == 0) return;
  RowMatrix y(rhs.rows(), k);
  auto G = [&](std::size_t r) { return &rhs(static_cast<Eigen::Index>(r), 0); };
  auto Y = [&](std::size_t c) { return &y(static_cast<Eigen::Index>(c), 0); };

  // Row operations in the order they were performed.
  for (std::size_t i = 0; i < nb; ++i) {
    const RowMatrix& P = panels_[i];
    const std::size_t ri = s.row_offset(i);
    const auto p = static_cast<Eigen::Index>(s.column_pivots(i));
    for (Eigen::Index kk = 0; kk < static_cast<Eigen::Index>(row_pivot_[i].size()); ++kk) {
      const auto piv = static_cast<Eigen::Index>(row_pivot_[i][static_cast<std::size_t>(kk)]);
      if (piv != kk) swap_rows(G(ri + static_cast<std::size_t>(kk)), G(ri + static_cast<std::size_t>(piv)), k);
      const double* src = G(ri + static_cast<std::size_t>(kk));
      for (Eigen::Index r = kk + 1; r < P.rows(); ++r) {
        const double mlt = P(r, p + kk);
        if (mlt != 0.0) sub_scaled(G(ri + static_cast<std::size_t>(r)), src, mlt, k);
      }
    }
  }

  // Forward sweep over the column pivots (carried rows).
  for (std::size_t i = 1; i < nb; ++i) {
    const RowMatrix& P = panels_[i - 1];
    const std::size_t rprev = s.row_offset(i - 1);
    const std::size_t cprev = s.col_offset(i - 1);
    const std::size_t ci = s.col_offset(i);
    const auto qprev = static_cast<Eigen::Index>(s.row_pivots(i - 1));
    const auto pprev = static_cast<Eigen::Index>(s.column_pivots(i - 1));
    const Eigen::Index pc0 = P.cols() - static_cast<Eigen::Index>(s.overlap(i - 1));
    const auto p = static_cast<Eigen::Index>(s.column_pivots(i));
    for (Eigen::Index t = 0; t < p; ++t) {
      const Eigen::Index row = qprev + t;
      double* dst = Y(ci + static_cast<std::size_t>(t));
      std::copy_n(G(rprev + static_cast<std::size_t>(row)), k, dst);
      for (Eigen::Index j = 0; j < pprev; ++j) {
        const double a = P(row, j);
        if (a != 0.0) sub_scaled(dst, Y(cprev + static_cast<std::size_t>(j)), a, k);
      }
      for (Eigen::Index u = 0; u < t; ++u) {
        const double a = P(row, pc0 + u);
        if (a != 0.0) sub_scaled(dst, Y(ci + static_cast<std::size_t>(u)), a, k);
      }
      scale_row(dst, 1.0 / P(row, pc0 + t), k);
    }
  }

  // Backward sweep over the row pivots.
  for (std::size_t ii = nb; ii-- > 0;) {
    const RowMatrix& P = panels_[ii];
    const std::size_t ri = s.row_offset(ii);
    const std::size_t ci = s.col_offset(ii);
    const auto p = static_cast<Eigen::Index>(s.column_pivots(ii));
    const auto q = static_cast<Eigen::Index>(s.row_pivots(ii));
    for (Eigen::Index kk = q; kk-- > 0;) {
      const Eigen::Index lc = p + kk;
      double* dst = Y(ci + static_cast<std::size_t>(lc));
      std::copy_n(G(ri + static_cast<std::size_t>(kk)), k, dst);
      for (Eigen::Index j = 0; j < p; ++j) {
        const double a = P(kk, j);
        if (a != 0.0) sub_scaled(dst, Y(ci + static_cast<std::size_t>(j)), a, k);
      }
      for (Eigen::Index j = lc + 1; j < P.cols(); ++j) {
        const double a = P(kk, j);
        if (a != 0.0) sub_scaled(dst, Y(ci + static_cast<std::size_t>(j)), a, k);
      }
      scale_row(dst, 1.0 / P(kk, lc), k);
    }
  }

  // Undo the column operations, last first.
  for (std::size_t i = nb; i-- > 1;) {
    const RowMatrix& P = panels_[i - 1];
    const std::size_t ci = s.col_offset(i);
    const auto qprev = static_cast<Eigen::Index>(s.row_pivots(i - 1));
    const auto ov = static_cast<Eigen::Index>(s.overlap(i - 1));
    const Eigen::Index pc0 = P.cols() - ov;
    for (Eigen::Index t = static_cast<Eigen::Index>(column_pivot_[i].size()); t-- > 0;) {
      const Eigen::Index row = qprev + t;
      double* dst = Y(ci + static_cast<std::size_t>(t));
      for (Eigen::Index u = t + 1; u < ov; ++u) {
        const double mlt = P(row, pc0 + u);
        if (mlt != 0.0) sub_scaled(dst, Y(ci + static_cast<std::size_t>(u)), mlt, k);
      }
      const std::size_t piv = column_pivot_[i][static_cast<std::size_t>(t)];
      if (piv != ci + static_cast<std::size_t>(t)) swap_rows(dst, Y(piv), k);
    }
  }
  rhs = std::move(y);
}

void AbdFactorization::solve_transpose_in_place(RowMatrix& rhs) const {
  check_rows(static_cast<std::size_t>(rhs.rows()));
  const BlockStructure& s = structure_;
  const std::size_t nb = s.block_count();
  const Eigen::Index k = rhs.cols();
  if (k == 0) return;
  RowMatrix v(rhs.rows(), k);
  auto H = [&](std::size_t c) { return &rhs(static_cast<Eigen::Index>(c), 0); };
  auto V = [&](std::size_t r) { return &v(static_cast<Eigen::Index>(r), 0); };

  // Transposed column operations, in the order they were performed.
  for (std::size_t i = 1; i < nb; ++i) {
    const RowMatrix& P = panels_[i - 1];
    const std::size_t ci = s.col_offset(i);
    const auto qprev = static_cast<Eigen::Index>(s.row_pivots(i - 1));
    const auto ov = static_cast<Eigen::Index>(s.overlap(i - 1));
    const Eigen::Index pc0 = P.cols() - ov;
    for (Eigen::Index t = 0; t < static_cast<Eigen::Index>(column_pivot_[i].size()); ++t) {
      const std::size_t piv = column_pivot_[i][static_cast<std::size_t>(t)];
      double* src = H(ci + static_cast<std::size_t>(t));
      if (piv != ci + static_cast<std::size_t>(t)) swap_rows(src, H(piv), k);
      const Eigen::Index row = qprev + t;
      for (Eigen::Index u = t + 1; u < ov; ++u) {
        const double mlt = P(row, pc0 + u);
        if (mlt != 0.0) sub_scaled(H(ci + static_cast<std::size_t>(u)), src, mlt, k);
      }
    }
  }

  // Forward sweep over the row pivots (transposed upper part).
  for (std::size_t i = 0; i < nb; ++i) {
    const RowMatrix& P = panels_[i];
    const std::size_t ri = s.row_offset(i);
    const std::size_t ci = s.col_offset(i);
    const auto p = static_cast<Eigen::Index>(s.column_pivots(i));
    const auto q = static_cast<Eigen::Index>(s.row_pivots(i));
    const RowMatrix* prev = i > 0 ? &panels_[i - 1] : nullptr;
    const auto ovprev = i > 0 ? static_cast<Eigen::Index>(s.overlap(i - 1)) : Eigen::Index{0};
    const auto qprev = i > 0 ? static_cast<Eigen::Index>(s.row_pivots(i - 1)) : Eigen::Index{0};
    const std::size_t rprev = i > 0 ? s.row_offset(i - 1) : 0;
    const Eigen::Index pc0 = prev ? prev->cols() - ovprev : 0;
    for (Eigen::Index kk = 0; kk < q; ++kk) {
      const Eigen::Index lc = p + kk;
      double* dst = V(ri + static_cast<std::size_t>(kk));
      std::copy_n(H(ci + static_cast<std::size_t>(lc)), k, dst);
      for (Eigen::Index r = 0; r < kk; ++r) {
        const double a = P(r, lc);
        if (a != 0.0) sub_scaled(dst, V(ri + static_cast<std::size_t>(r)), a, k);
      }
      if (prev && lc < ovprev) {
        for (Eigen::Index r = 0; r < qprev; ++r) {
          const double a = (*prev)(r, pc0 + lc);
          if (a != 0.0) sub_scaled(dst, V(rprev + static_cast<std::size_t>(r)), a, k);
        }
      }
      scale_row(dst, 1.0 / P(kk, lc), k);
    }
  }

  // Backward sweep over the column pivots.
  for (std::size_t i = nb; i-- > 1;) {
    const RowMatrix& P = panels_[i - 1];
    const RowMatrix& cur = panels_[i];
    const std::size_t rprev = s.row_offset(i - 1);
    const std::size_t ri = s.row_offset(i);
    const std::size_t ci = s.col_offset(i);
    const auto qprev = static_cast<Eigen::Index>(s.row_pivots(i - 1));
    const Eigen::Index pc0 = P.cols() - static_cast<Eigen::Index>(s.overlap(i - 1));
    const auto p = static_cast<Eigen::Index>(s.column_pivots(i));
    for (Eigen::Index t = p; t-- > 0;) {
      const Eigen::Index row = qprev + t;
      double* dst = V(rprev + static_cast<std::size_t>(row));
      std::copy_n(H(ci + static_cast<std::size_t>(t)), k, dst);
      for (Eigen::Index r = 0; r < qprev; ++r) {
        const double a = P(r, pc0 + t);
        if (a != 0.0) sub_scaled(dst, V(rprev + static_cast<std::size_t>(r)), a, k);
      }
      for (Eigen::Index u = t + 1; u < p; ++u) {
        const double a = P(qprev + u, pc0 + t);
        if (a != 0.0) sub_scaled(dst, V(rprev + static_cast<std::size_t>(qprev + u)), a, k);
      }
      for (Eigen::Index r = 0; r < cur.rows(); ++r) {
        const double a = cur(r, t);
        if (a != 0.0) sub_scaled(dst, V(ri + static_cast<std::size_t>(r)), a, k);
      }
      scale_row(dst, 1.0 / P(row, pc0 + t), k);
    }
  }

  // Transposed row operations, last first.
  for (std::size_t i = nb; i-- > 0;) {
    const RowMatrix& P = panels_[i];
    const std::size_t ri = s.row_offset(i);
    const auto p = static_cast<Eigen::Index>(s.column_pivots(i));
    for (Eigen::Index kk = static_cast<Eigen::Index>(row_pivot_[i].size()); kk-- > 0;) {
      double* dst = V(ri + static_cast<std::size_t>(kk));
      for (Eigen::Index r = P.rows(); r-- > kk + 1;) {
        const double mlt = P(r, p + kk);
        if (mlt != 0.0) sub_scaled(dst, V(ri + static_cast<std::size_t>(r)), mlt, k);
      }
      const auto piv = row_pivot_[i][static_cast<std::size_t>(kk)];
      if (piv != static_cast<std::size_t>(kk)) swap_rows(dst, V(ri + piv), k);
    }
  }
  rhs = std::move(v);
}

Eigen::VectorXd AbdFactorization::solve(const Eigen::VectorXd& f) const {
  check_rows(static_cast<std::size_t>(f.size()));
  RowMatrix x = f;
  solve_in_place(x);
  return x.col(0);
}

Eigen::VectorXd AbdFactorization::solve_transpose(const Eigen::VectorXd& g) const {
  check_rows(static_cast<std::size_t>(g.size()));
  RowMatrix x = g;
  solve_transpose_in_place(x);
  return x.col(0);
}

Eigen::VectorXd solve(const AbdFactorization& fac, const Eigen::VectorXd& f) {
  return fac.solve(f);
}

Eigen::VectorXd solve_transpose(const AbdFactorization& fac, const Eigen::VectorXd& g) {
  return fac.solve_transpose(g);
}

double condition_estimate(const AbdMatrix& m, const AbdFactorization& fac) {
  const auto n = static_cast<Eigen::Index>(m.dimension());
  Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  double est = 0.0;
  Eigen::Index last = -1;
  for (int iter = 0; iter < 5; ++iter) {
    const Eigen::VectorXd y = fac.solve(x);
    est = y.lpNorm<1>();
    const Eigen::VectorXd xi = y.unaryExpr([](double a) { return a >= 0.0 ? 1.0 : -1.0; });
    const Eigen::VectorXd z = fac.solve_transpose(xi);
    Eigen::Index j = 0;
    const double zmax = z.cwiseAbs().maxCoeff(&j);
    if (zmax <= z.dot(x) || j == last) break;
    x.setZero();
    x(j) = 1.0;
    last = j;
  }
  return est * m.norm1();
}

AbdMatrix random_abd(const BlockStructure& structure, std::uint64_t seed, double diagonal_boost) {
  AbdMatrix m(structure);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (std::size_t i = 0; i < structure.block_count(); ++i) {
    RowMatrix& b = m.block(i);
    for (Eigen::Index r = 0; r < b.rows(); ++r)
      for (Eigen::Index c = 0; c < b.cols(); ++c) b(r, c) = unif(rng);
    const std::size_t r0 = structure.row_offset(i);
    const std::size_t c0 = structure.col_offset(i);
    for (std::size_t r = 0; r < structure.rows(i); ++r) {
      const std::size_t g = r0 + r;
      if (g >= c0 && g < c0 + structure.cols(i))
        b(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(g - c0)) += diagonal_boost;
    }
  }
  return m;
}

}  // namespace splinecolloc::abd
