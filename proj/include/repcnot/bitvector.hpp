// Copyright 2026 The repcnot Authors
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
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace repcnot {

/// Fixed-length bit vector packed into 64-bit words. Bits past `size()` are always zero.
class BitVector {
   public:
    BitVector() = default;
    explicit BitVector(size_t num_bits) : num_bits_(num_bits), words_((num_bits + 63) / 64, 0) {
    }

    size_t size() const {
        return num_bits_;
    }
    bool get(size_t k) const {
        return (words_[k >> 6] >> (k & 63)) & 1;
    }
    void set(size_t k, bool value) {
        uint64_t mask = uint64_t{1} << (k & 63);
        if (value) {
            words_[k >> 6] |= mask;
        } else {
            words_[k >> 6] &= ~mask;
        }
    }
    void flip(size_t k) {
        words_[k >> 6] ^= uint64_t{1} << (k & 63);
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
    std::vector<uint32_t> set_bits() const {
        std::vector<uint32_t> out;
        for (size_t w = 0; w < words_.size(); w++) {
            uint64_t v = words_[w];
            while (v) {
                out.push_back(static_cast<uint32_t>(w * 64 + std::countr_zero(v)));
                v &= v - 1;
            }
        }
        return out;
    }

    BitVector &operator^=(const BitVector &other) {
        for (size_t w = 0; w < words_.size(); w++) {
            words_[w] ^= other.words_[w];
        }
        return *this;
    }
    friend BitVector operator^(BitVector a, const BitVector &b) {
        a ^= b;
        return a;
    }
    bool operator==(const BitVector &other) const = default;

    std::span<uint64_t> words() {
        return words_;
    }
    std::span<const uint64_t> words() const {
        return words_;
    }

   private:
    size_t num_bits_ = 0;
    std::vector<uint64_t> words_;
};

/// Row-major bit matrix; each row is padded to a whole number of 64-bit words.
class BitMatrix {
   public:
    BitMatrix() = default;
    BitMatrix(size_t rows, size_t cols)
        : rows_(rows), cols_(cols), stride_((cols + 63) / 64), words_(rows * ((cols + 63) / 64), 0) {
    }

    size_t rows() const {
        return rows_;
    }
    size_t cols() const {
        return cols_;
    }
    size_t stride() const {
        return stride_;
    }
    bool get(size_t r, size_t c) const {
        return (words_[r * stride_ + (c >> 6)] >> (c & 63)) & 1;
    }
    void set(size_t r, size_t c, bool value) {
        uint64_t mask = uint64_t{1} << (c & 63);
        uint64_t &w = words_[r * stride_ + (c >> 6)];
        w = value ? (w | mask) : (w & ~mask);
    }
    void flip(size_t r, size_t c) {
        words_[r * stride_ + (c >> 6)] ^= uint64_t{1} << (c & 63);
    }
    std::span<uint64_t> row_words(size_t r) {
        return {words_.data() + r * stride_, stride_};
    }
    std::span<const uint64_t> row_words(size_t r) const {
        return {words_.data() + r * stride_, stride_};
    }
    BitVector row(size_t r) const {
        BitVector v(cols_);
        auto src = row_words(r);
        auto dst = v.words();
        for (size_t w = 0; w < stride_; w++) {
            dst[w] = src[w];
        }
        return v;
    }
    bool row_any(size_t r) const {
        for (auto w : row_words(r)) {
            if (w) {
                return true;
            }
        }
        return false;
    }
    bool operator==(const BitMatrix &other) const = default;

   private:
    size_t rows_ = 0;
    size_t cols_ = 0;
    size_t stride_ = 0;
    std::vector<uint64_t> words_;
};

}  // namespace repcnot
