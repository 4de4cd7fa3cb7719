#include "nrsim/sparse.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace nrsim
{

CsrMatrix::CsrMatrix(std::size_t dim, std::vector<Triplet> triplets) : dim_(dim)
{
    std::stable_sort(triplets.begin(), triplets.end(), [](Triplet const& a, Triplet const& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    row_ptr_.assign(dim + 1, 0);
    std::size_t last_row = dim;
    for (auto const& t : triplets)
    {
        if (t.row >= dim || t.col >= dim)
            throw std::out_of_range("CsrMatrix: triplet index out of range");
        if (t.row == last_row && cols_.back() == t.col)
        {
            values_.back() += t.value;
            continue;
        }
        cols_.push_back(t.col);
        values_.push_back(t.value);
        ++row_ptr_[t.row + 1];
        last_row = t.row;
    }
    for (std::size_t r = 1; r <= dim; ++r)
        row_ptr_[r] += row_ptr_[r - 1];
}

void CsrMatrix::apply(std::span<Complex const> x, std::span<Complex> y) const
{
    assert(x.size() == dim_ && y.size() == dim_);
    for (std::size_t r = 0; r < dim_; ++r)
    {
        Complex acc{};
        for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
            acc += values_[k] * x[cols_[k]];
        y[r] = acc;
    }
}

Complex CsrMatrix::at(std::size_t row, std::size_t col) const
{
    auto cols = this->row_cols(row);
    auto it = std::lower_bound(cols.begin(), cols.end(), col);
    if (it == cols.end() || *it != col)
        return {};
    return values_[row_ptr_[row] + static_cast<std::size_t>(it - cols.begin())];
}

std::vector<Triplet> CsrMatrix::triplets() const
{
    std::vector<Triplet> out;
    out.reserve(values_.size());
    for (std::size_t r = 0; r < dim_; ++r)
    {
        for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
            out.push_back({r, cols_[k], values_[k]});
    }
    return out;
}

bool CsrMatrix::is_hermitian(double tol) const
{
    for (auto const& t : this->triplets())
    {
        if (std::abs(this->at(t.col, t.row) - std::conj(t.value)) > tol)
            return false;
    }
    return true;
}

std::span<std::size_t const> CsrMatrix::row_cols(std::size_t row) const
{
    return {cols_.data() + row_ptr_[row], row_ptr_[row + 1] - row_ptr_[row]};
}

std::span<Complex const> CsrMatrix::row_values(std::size_t row) const
{
    return {values_.data() + row_ptr_[row], row_ptr_[row + 1] - row_ptr_[row]};
}

}  // namespace nrsim
