// Copyright 2026 qsegsim Contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <bit>
#include <cstdint>
#include <cstddef>
#include <vector>

namespace qsegsim {

// Dense word-packed bit vector over a fixed number of bits. Qubit counts in
// this project stay below a few thousand, so dense packing wins over sparse.
class BitVec {
   public:
    BitVec() : num_bits_(0) {}
    explicit BitVec(size_t num_bits) : num_bits_(num_bits), words_((num_bits + 63) / 64, 0) {}

    size_t size() const {
        return num_bits_;
    }

    bool get(size_t i) const {
        return (words_[i >> 6] >> (i & 63)) & 1;
    }
    void set(size_t i, bool v) {
        uint64_t mask = uint64_t{1} << (i & 63);
        if (v) {
            words_[i >> 6] |= mask;
        } else {
            words_[i >> 6] &= ~mask;
        }
    }
    void flip(size_t i) {
        words_[i >> 6] ^= uint64_t{1} << (i & 63);
    }

    void clear() {
        for (auto &w : words_) {
            w = 0;
        }
    }

    bool any() const {
        for (auto w : words_) {
            if (w) {
                return true;
            }
        }
        return false;
    }

    size_t popcount() const {
        size_t n = 0;
        for (auto w : words_) {
            n += std::popcount(w);
        }
        return n;
    }

    BitVec &operator^=(const BitVec &other) {
        for (size_t k = 0; k < words_.size(); k++) {
            words_[k] ^= other.words_[k];
        }
        return *this;
    }

    // Parity of the AND of two vectors, i.e. <a, b> over GF(2).
    static bool and_parity(const BitVec &a, const BitVec &b) {
        uint64_t acc = 0;
        for (size_t k = 0; k < a.words_.size(); k++) {
            acc ^= a.words_[k] & b.words_[k];
        }
        return std::popcount(acc) & 1;
    }

    bool operator==(const BitVec &other) const {
        return num_bits_ == other.num_bits_ && words_ == other.words_;
    }
    bool operator!=(const BitVec &other) const {
        return !(*this == other);
    }

    // First set bit index, or size() if none.
    size_t lowest_set() const {
        for (size_t k = 0; k < words_.size(); k++) {
            if (words_[k]) {
                return (k << 6) + std::countr_zero(words_[k]);
            }
        }
        return num_bits_;
    }

    std::vector<size_t> set_bits() const {
        std::vector<size_t> out;
        for (size_t k = 0; k < words_.size(); k++) {
            uint64_t w = words_[k];
            while (w) {
                out.push_back((k << 6) + std::countr_zero(w));
                w &= w - 1;
            }
        }
        return out;
    }

   private:
    size_t num_bits_;
    std::vector<uint64_t> words_;
};

}  // namespace qsegsim
