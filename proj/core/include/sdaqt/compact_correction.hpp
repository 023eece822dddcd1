#pragma once

#include <Eigen/Dense>
#include <vector>

namespace sdaqt {

// Finite correction block anchored at the top-left corner of a semi-infinite
// matrix.  Small blocks (short side <= 64) are stored dense, large ones as a
// low-rank product U * W^T whose factors come out of an SVD recompression,
// so U has orthogonal columns scaled by the singular values and W has
// orthonormal columns.
class CompactCorrection {
 public:
  static constexpr Eigen::Index kDenseSide = 64;

  CompactCorrection() = default;  // empty block
  static CompactCorrection from_dense(Eigen::MatrixXd d);
  static CompactCorrection from_factors(Eigen::MatrixXd u, Eigen::MatrixXd w);

  bool empty() const { return rows_ == 0 || cols_ == 0; }
  bool factored() const { return factored_; }
  Eigen::Index rows() const { return rows_; }
  Eigen::Index cols() const { return cols_; }
  // columns of the stored factors; min(rows, cols) for dense storage
  Eigen::Index stored_rank() const;

  const Eigen::MatrixXd& dense() const { return dense_; }
  const Eigen::MatrixXd& u() const { return u_; }
  const Eigen::MatrixXd& w() const { return w_; }

  // entries as an r x c block, zero padded beyond the stored extent
  Eigen::MatrixXd materialize(Eigen::Index r, Eigen::Index c) const;
  // rows [i0, i0+n) of the block at its own width
  Eigen::MatrixXd row_block(Eigen::Index i0, Eigen::Index n) const;

  // E x where x is truncated or zero padded to the stored width
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  // E^T y with y truncated or padded to the stored height
  Eigen::VectorXd apply_transpose(const Eigen::VectorXd& y) const;
  Eigen::VectorXd row_sums() const;  // E * ones

  double max_abs() const;

  // factor view: (U, W) with E = U W^T even for dense storage
  std::pair<Eigen::MatrixXd, Eigen::MatrixXd> factor_view() const;

  // largest row/column index carrying an entry >= cut, plus one
  Eigen::Index row_extent(double cut) const;
  Eigen::Index col_extent(double cut) const;
  // numerical rank at relative tolerance rel (singular values of the block)
  Eigen::Index numerical_rank(double rel) const;

 private:
  friend class CorrectionBuilder;
  bool factored_ = false;
  Eigen::Index rows_ = 0, cols_ = 0;
  Eigen::MatrixXd dense_;  // rows_ x cols_ when !factored_
  Eigen::MatrixXd u_, w_;  // rows_ x k and cols_ x k when factored_
};

// Accumulates correction contributions (all anchored at the top-left corner)
// and recompresses them into a single block: large blocks are reduced to
// their numerical rank at the given threshold by thin QR plus a small SVD,
// and rows/columns that sit entirely below machine precision are trimmed.
// Entries are never zeroed one by one, which would perturb the singular
// spectrum by more than the rank cut itself.
class CorrectionBuilder {
 public:
  void add(const CompactCorrection& c);
  void add_dense(const Eigen::MatrixXd& d);
  void add_factors(Eigen::MatrixXd u, Eigen::MatrixXd w);
  void add_outer(const Eigen::VectorXd& u, const Eigen::VectorXd& v);

  bool empty() const { return pieces_.empty(); }
  CompactCorrection finalize(double threshold) const;

 private:
  struct Piece {
    Eigen::MatrixXd u, w;
  };
  std::vector<Piece> pieces_;
  Eigen::Index rows_ = 0, cols_ = 0, rank_ = 0;
};

}  // namespace sdaqt
