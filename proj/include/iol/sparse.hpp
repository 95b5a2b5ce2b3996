#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace iol {

// Compressed sparse rows; column indices within a row are strictly increasing.
struct CsrMatrix {
  std::size_t cols = 0;
  std::vector<std::size_t> row_ptr{0};
  std::vector<std::uint32_t> col;
  std::vector<double> val;

  std::size_t rows() const noexcept { return row_ptr.size() - 1; }
  std::size_t nnz() const noexcept { return col.size(); }

  std::span<const std::uint32_t> row_cols(std::size_t r) const noexcept {
    return {col.data() + row_ptr[r], row_ptr[r + 1] - row_ptr[r]};
  }
  std::span<const double> row_vals(std::size_t r) const noexcept {
    return {val.data() + row_ptr[r], row_ptr[r + 1] - row_ptr[r]};
  }

  void append_row(std::span<const std::uint32_t> cols_in, std::span<const double> vals_in) {
    col.insert(col.end(), cols_in.begin(), cols_in.end());
    val.insert(val.end(), vals_in.begin(), vals_in.end());
    row_ptr.push_back(col.size());
  }
};

}  // namespace iol
