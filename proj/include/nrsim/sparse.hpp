#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "model.hpp"

namespace nrsim
{

//! Compressed sparse row complex matrix. Rows keep columns sorted.
class CsrMatrix
{
  public:
    CsrMatrix() = default;
    //! Duplicate (row, col) triplets are summed.
    CsrMatrix(std::size_t dim, std::vector<Triplet> triplets);

    std::size_t dim() const { return dim_; }
    std::size_t nonzeros() const { return values_.size(); }

    //! y = M x
    void apply(std::span<Complex const> x, std::span<Complex> y) const;

    Complex at(std::size_t row, std::size_t col) const;
    std::vector<Triplet> triplets() const;
    bool is_hermitian(double tol = kHermitianTolerance) const;

    //! Entries of one row as (col, value) spans.
    std::span<std::size_t const> row_cols(std::size_t row) const;
    std::span<Complex const> row_values(std::size_t row) const;

  private:
    std::size_t dim_ = 0;
    std::vector<std::size_t> row_ptr_{0};
    std::vector<std::size_t> cols_;
    std::vector<Complex> values_;
};

}  // namespace nrsim
