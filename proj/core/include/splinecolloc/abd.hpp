#pragma once

// Almost-block-diagonal (ABD) linear systems.
//
// An ABD matrix is a staircase of dense blocks: block i owns a contiguous
// range of rows and a contiguous range of columns, and consecutive blocks
// share `overlap(i)` columns.  The factorization follows the alternate
// column/row elimination scheme used by COLROW: rows carried over from block
// i-1 are eliminated by column operations restricted to the shared columns,
// then block i is eliminated by row operations restricted to the columns it
// does not share with block i+1.  Neither step creates fill outside the block
// footprints, so storage and work stay O(n * w^2) for block width w.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace splinecolloc {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace splinecolloc

namespace splinecolloc::abd {

class BlockStructure {
 public:
  /// `overlap` has one entry per consecutive pair (block_count - 1 entries).
  /// Throws InvalidArgument if the layout is not square or cannot be
  /// eliminated without fill.
  BlockStructure(std::vector<std::size_t> rows, std::vector<std::size_t> cols,
                 std::vector<std::size_t> overlap);

  /// Classic COLROW layout: a TOP block (top_rows x overlap), `blocks` blocks
  /// of block_rows x (block_rows + overlap) shifted by block_rows columns, and
  /// a BOTTOM block (overlap - top_rows) x overlap.
  static BlockStructure colrow(std::size_t top_rows, std::size_t block_rows,
                               std::size_t blocks, std::size_t overlap);

  std::size_t block_count() const noexcept { return rows_.size(); }
  std::size_t dimension() const noexcept { return dimension_; }

  std::size_t rows(std::size_t block) const { return rows_.at(block); }
  std::size_t cols(std::size_t block) const { return cols_.at(block); }
  /// Columns shared with the next block; 0 for the last block.
  std::size_t overlap(std::size_t block) const;
  std::size_t row_offset(std::size_t block) const { return row_offset_.at(block); }
  std::size_t col_offset(std::size_t block) const { return col_offset_.at(block); }

  /// Rows of `block` left for column elimination in the next stage.
  std::size_t carry_rows(std::size_t block) const { return carry_.at(block); }
  /// Column pivots taken at the start of the stage for `block`.
  std::size_t column_pivots(std::size_t block) const {
    return block == 0 ? 0 : carry_.at(block - 1);
  }
  /// Row pivots taken inside `block`.
  std::size_t row_pivots(std::size_t block) const {
    return rows_.at(block) - carry_.at(block);
  }

  std::size_t max_block_cols() const;

  bool operator==(const BlockStructure&) const = default;

 private:
  std::vector<std::size_t> rows_;
  std::vector<std::size_t> cols_;
  std::vector<std::size_t> overlap_;
  std::vector<std::size_t> row_offset_;
  std::vector<std::size_t> col_offset_;
  std::vector<std::size_t> carry_;
  std::size_t dimension_ = 0;
};

class AbdMatrix {
 public:
  /// All-zero blocks with the shapes given by `structure`.
  explicit AbdMatrix(BlockStructure structure);

  const BlockStructure& structure() const noexcept { return structure_; }
  std::size_t dimension() const noexcept { return structure_.dimension(); }

  RowMatrix& block(std::size_t i) { return blocks_.at(i); }
  const RowMatrix& block(std::size_t i) const { return blocks_.at(i); }
  const std::vector<RowMatrix>& blocks() const noexcept { return blocks_; }

  /// Set entry (row, col) in global coordinates; throws if it is outside
  /// the footprint of the block owning `row`.
  void set(std::size_t row, std::size_t col, double value);
  double get(std::size_t row, std::size_t col) const;

  Eigen::MatrixXd to_dense() const;
  Eigen::VectorXd multiply(const Eigen::VectorXd& x) const;
  Eigen::VectorXd multiply_transpose(const Eigen::VectorXd& y) const;
  double max_abs() const;
  /// Maximum absolute column sum.
  double norm1() const;

 private:
  friend AbdMatrix assemble(BlockStructure, std::vector<RowMatrix>);

  BlockStructure structure_;
  std::vector<RowMatrix> blocks_;
};

/// Throws DimensionMismatch if a block's shape disagrees with `structure`.
AbdMatrix assemble(BlockStructure structure, std::vector<RowMatrix> blocks);

Eigen::MatrixXd to_dense(const AbdMatrix& m);

class AbdFactorization {
 public:
  const BlockStructure& structure() const noexcept { return structure_; }
  std::size_t dimension() const noexcept { return structure_.dimension(); }

  Eigen::VectorXd solve(const Eigen::VectorXd& f) const;
  Eigen::VectorXd solve_transpose(const Eigen::VectorXd& g) const;

  /// Multiple right-hand sides, one per column; overwritten with A^-1 F.
  void solve_in_place(RowMatrix& rhs) const;
  /// Overwritten with A^-T G.
  void solve_transpose_in_place(RowMatrix& rhs) const;

 private:
  friend AbdFactorization factorize(const AbdMatrix&);
  explicit AbdFactorization(const AbdMatrix& m);

  void check_rows(std::size_t rows) const;

  BlockStructure structure_;
  std::vector<RowMatrix> panels_;
  // column_pivot_[i][t]: global column swapped into position col_offset(i)+t.
  std::vector<std::vector<std::size_t>> column_pivot_;
  // row_pivot_[i][k]: local row of block i swapped into local row k.
  std::vector<std::vector<std::size_t>> row_pivot_;
};

/// Pivots with magnitude below 1e-13 * max|entry| raise SingularMatrix.
AbdFactorization factorize(const AbdMatrix& m);

Eigen::VectorXd solve(const AbdFactorization& fac, const Eigen::VectorXd& f);
Eigen::VectorXd solve_transpose(const AbdFactorization& fac, const Eigen::VectorXd& g);

inline constexpr double kSingularityThreshold = 1e-13;

/// Hager/Higham estimate of the 1-norm condition number using only solves
/// with A and A^T.
double condition_estimate(const AbdMatrix& m, const AbdFactorization& fac);

/// Random ABD matrix with entries uniform in [-1, 1] plus `diagonal_boost`
/// added to every (i, i) entry inside the footprint.
AbdMatrix random_abd(const BlockStructure& structure, std::uint64_t seed,
                     double diagonal_boost = 1.0);

// --- scaling benchmark -------------------------------------------------------

enum class WidthRule { SqrtN, Fixed };

struct ScalingRow {
  std::size_t requested_n = 0;
  std::size_t n = 0;  // actual dimension after rounding to whole blocks
  std::size_t block_rows = 0;
  double time_factorize_s = 0.0;
  double time_solve_s = 0.0;
};

struct ScalingTable {
  std::vector<ScalingRow> rows;
  /// Least-squares slope of log(factorize + solve time) against log(n);
  /// empty for fewer than two sizes.
  std::optional<double> fitted_exponent;

  void write_csv(std::ostream& out) const;
};

struct ScalingOptions {
  WidthRule width = WidthRule::SqrtN;
  std::size_t fixed_width = 8;
  /// Each size is timed until at least this much wall time has accumulated.
  double min_time_s = 0.05;
  std::size_t min_repeats = 5;
  std::uint64_t seed = 0;
};

/// Times factorize + solve on random ABD systems. Sizes must be strictly
/// increasing and at least 64.
ScalingTable benchmark_scaling(const std::vector<std::size_t>& sizes,
                               const ScalingOptions& options = {});

/// The COLROW layout used by benchmark_scaling for a requested size.
BlockStructure scaling_structure(std::size_t n, const ScalingOptions& options);

}  // namespace splinecolloc::abd
