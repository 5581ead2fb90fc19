// Copyright 2026 the shardattn authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <vector>

#include "shardattn/pattern.hpp"

namespace shardattn {

/// Compressed-row form of a block mask: row i's attended key blocks are
/// col_idx[row_ptr[i] .. row_ptr[i+1]), strictly ascending and <= i.
struct CsrMask {
    int head_index = 0;
    int num_blocks = 0;
    std::vector<int> row_ptr;
    std::vector<int> col_idx;

    /// Throws std::invalid_argument on malformed row_ptr, out-of-range or
    /// non-ascending columns, or a column above the diagonal.
    void validate() const;
};

CsrMask to_csr(const HeadBlockMask& mask);
std::vector<CsrMask> to_csr(const std::vector<HeadBlockMask>& masks);

/// Inverse of to_csr; from_csr(to_csr(m), m.num_blocks()) == m bit-exactly.
HeadBlockMask from_csr(const CsrMask& csr, int num_blocks);

std::size_t nnz(const CsrMask& csr);

}  // namespace shardattn
