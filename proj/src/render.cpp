// Copyright 2026 the shardattn authors
// SPDX-License-Identifier: Apache-2.0

#include "shardattn/render.hpp"

#include <sstream>
#include <stdexcept>
#include <vector>

namespace shardattn {

std::string render_text(const HeadBlockMask& mask) {
    std::string out;
    const int blocks = mask.num_blocks();
    out.reserve(static_cast<std::size_t>(blocks) * (blocks + 1));
    for (int i = 0; i < blocks; ++i) {
        for (int j = 0; j < blocks; ++j) out.push_back(mask.at(i, j) ? '#' : '.');
        out.push_back('\n');
    }
    return out;
}

HeadBlockMask parse_text(const std::string& text, int head_index) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);)
        if (!line.empty()) lines.push_back(line);
    if (lines.empty()) throw std::invalid_argument("empty mask text");

    const int blocks = static_cast<int>(lines.size());
    HeadBlockMask mask(head_index, blocks);
    for (int i = 0; i < blocks; ++i) {
        if (static_cast<int>(lines[i].size()) != blocks)
            throw std::invalid_argument("mask text line " + std::to_string(i) +
                                        " has wrong length");
        for (int j = 0; j < blocks; ++j) {
            const char c = lines[i][j];
            if (c == '#')
                mask.set(i, j, true);
            else if (c != '.')
                throw std::invalid_argument("unexpected character in mask text");
        }
    }
    return mask;
}

std::string render_pgm(const HeadBlockMask& mask) {
    const int blocks = mask.num_blocks();
    std::string out = "P5\n" + std::to_string(blocks) + " " + std::to_string(blocks) + "\n255\n";
    for (int i = 0; i < blocks; ++i)
        for (int j = 0; j < blocks; ++j)
            out.push_back(mask.at(i, j) ? '\0' : static_cast<char>(255));
    return out;
}

}  // namespace shardattn
