// Copyright 2026 the shardattn authors
// SPDX-License-Identifier: Apache-2.0

#include "shardattn/csr.hpp"

#include <stdexcept>
#include <string>

namespace shardattn {

void CsrMask::validate() const {
    if (num_blocks < 1) throw std::invalid_argument("csr num_blocks must be positive");
    if (row_ptr.size() != static_cast<std::size_t>(num_blocks) + 1)
        throw std::invalid_argument("row_ptr must have num_blocks + 1 entries");
    if (row_ptr.front() != 0) throw std::invalid_argument("row_ptr[0] must be 0");
    if (row_ptr.back() != static_cast<int>(col_idx.size()))
        throw std::invalid_argument("row_ptr[B] must equal col_idx length");
    for (int i = 0; i < num_blocks; ++i) {
        if (row_ptr[i] > row_ptr[i + 1])
            throw std::invalid_argument("row_ptr must be non-decreasing");
        for (int p = row_ptr[i]; p < row_ptr[i + 1]; ++p) {
            const int col = col_idx[p];
            if (col < 0 || col >= num_blocks)
                throw std::invalid_argument("column index " + std::to_string(col) +
                                            " outside [0, num_blocks)");
            if (col > i)
                throw std::invalid_argument("column " + std::to_string(col) +
                                            " above the diagonal in row " + std::to_string(i));
            if (p > row_ptr[i] && col_idx[p - 1] >= col)
                throw std::invalid_argument("columns must be strictly ascending within a row");
        }
    }
}

CsrMask to_csr(const HeadBlockMask& mask) {
    CsrMask csr;
    csr.head_index = mask.head_index();
    csr.num_blocks = mask.num_blocks();
    csr.row_ptr.reserve(csr.num_blocks + 1);
    csr.row_ptr.push_back(0);
    for (int i = 0; i < csr.num_blocks; ++i) {
        for (int j = 0; j <= i; ++j)
            if (mask.at(i, j)) csr.col_idx.push_back(j);
        csr.row_ptr.push_back(static_cast<int>(csr.col_idx.size()));
    }
    return csr;
}

std::vector<CsrMask> to_csr(const std::vector<HeadBlockMask>& masks) {
    std::vector<CsrMask> out;
    out.reserve(masks.size());
    for (const HeadBlockMask& m : masks) out.push_back(to_csr(m));
    return out;
}

HeadBlockMask from_csr(const CsrMask& csr, int num_blocks) {
    if (csr.num_blocks != num_blocks)
        throw std::invalid_argument("csr block count does not match requested num_blocks");
    csr.validate();
    HeadBlockMask mask(csr.head_index, num_blocks);
    for (int i = 0; i < num_blocks; ++i)
        for (int p = csr.row_ptr[i]; p < csr.row_ptr[i + 1]; ++p)
            mask.set(i, csr.col_idx[p], true);
    return mask;
}

std::size_t nnz(const CsrMask& csr) { return csr.col_idx.size(); }

}  // namespace shardattn
