// Copyright 2026 the shardattn authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "shardattn/pattern.hpp"

namespace shardattn {

/// One line per query block, '#' attended / '.' not, newline-terminated.
std::string render_text(const HeadBlockMask& mask);

/// Inverse of render_text. Throws on ragged lines or unknown characters.
HeadBlockMask parse_text(const std::string& text, int head_index = 0);

/// Binary P5 graymap, one byte per block, 0 = attended, 255 = not.
std::string render_pgm(const HeadBlockMask& mask);

}  // namespace shardattn
