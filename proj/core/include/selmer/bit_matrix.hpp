#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "selmer/random.hpp"

namespace selmer::f2 {

using Word = std::uint64_t;
inline constexpr std::size_t kWordBits = 64;

constexpr std::size_t words_for(std::size_t bits) noexcept { return (bits + kWordBits - 1) / kWordBits; }

/// Fixed-length vector over F2, packed 64 bits per word. Bits past size() are kept zero.
class BitVec {
public:
    BitVec() = default;
    explicit BitVec(std::size_t n) : size_(n), words_(words_for(n), 0) {}
    BitVec(std::initializer_list<int> bits);

    [[nodiscard]] std::size_t size() const noexcept { return size_; }
    [[nodiscard]] bool get(std::size_t i) const noexcept { return (words_[i / kWordBits] >> (i % kWordBits)) & 1U; }
    void set(std::size_t i, bool v) noexcept {
        const Word mask = Word{1} << (i % kWordBits);
        if (v) words_[i / kWordBits] |= mask; else words_[i / kWordBits] &= ~mask;
    }
    void flip(std::size_t i) noexcept { words_[i / kWordBits] ^= Word{1} << (i % kWordBits); }

    [[nodiscard]] bool any() const noexcept;
    [[nodiscard]] std::size_t count() const noexcept;

    BitVec& operator^=(const BitVec& other) noexcept;
    friend bool operator==(const BitVec&, const BitVec&) = default;

    [[nodiscard]] std::span<const Word> words() const noexcept { return words_; }
    [[nodiscard]] std::span<Word> words() noexcept { return words_; }

    [[nodiscard]] std::string to_string() const;

private:
    std::size_t size_ = 0;
    std::vector<Word> words_;
};

/// Dense F2 matrix with bit-packed rows and opaque 64-bit row/column labels.
///
/// Labels travel with their rows and columns through erase/select so callers
/// can track which basis element or character each line stands for.
class BitMatrix {
public:
    using Label = std::uint64_t;

    BitMatrix() = default;
    BitMatrix(std::size_t rows, std::size_t cols);

    static BitMatrix identity(std::size_t n);
    static BitMatrix from_rows(std::initializer_list<std::initializer_list<int>> rows);

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] std::size_t stride() const noexcept { return stride_; }

    [[nodiscard]] bool get(std::size_t r, std::size_t c) const noexcept {
        return (data_[r * stride_ + c / kWordBits] >> (c % kWordBits)) & 1U;
    }
    void set(std::size_t r, std::size_t c, bool v) noexcept {
        Word& w = data_[r * stride_ + c / kWordBits];
        const Word mask = Word{1} << (c % kWordBits);
        if (v) w |= mask; else w &= ~mask;
    }
    void flip(std::size_t r, std::size_t c) noexcept {
        data_[r * stride_ + c / kWordBits] ^= Word{1} << (c % kWordBits);
    }

    [[nodiscard]] std::span<const Word> row_words(std::size_t r) const noexcept {
        return {data_.data() + r * stride_, stride_};
    }
    [[nodiscard]] std::span<Word> row_words(std::size_t r) noexcept { return {data_.data() + r * stride_, stride_}; }
    [[nodiscard]] BitVec row(std::size_t r) const;
    [[nodiscard]] bool row_is_zero(std::size_t r) const noexcept;

    /// row[dst] += row[src]
    void add_row(std::size_t dst, std::size_t src) noexcept;
    void swap_rows(std::size_t a, std::size_t b) noexcept;
    void erase_row(std::size_t r);
    void erase_col(std::size_t c);
    void append_row(const BitVec& bits, Label label = 0);
    void append_col(const BitVec& bits, Label label = 0);

    [[nodiscard]] BitMatrix select(std::span<const std::size_t> row_idx, std::span<const std::size_t> col_idx) const;

    [[nodiscard]] const std::vector<Label>& row_labels() const noexcept { return row_labels_; }
    [[nodiscard]] const std::vector<Label>& col_labels() const noexcept { return col_labels_; }
    void set_row_label(std::size_t r, Label l) { row_labels_.at(r) = l; }
    void set_col_label(std::size_t c, Label l) { col_labels_.at(c) = l; }

    /// v * M for a row vector v of length rows().
    [[nodiscard]] BitVec left_multiply(const BitVec& v) const;
    /// M * c for a column vector c of length cols().
    [[nodiscard]] BitVec right_multiply(const BitVec& c) const;

    /// Entry-wise equality; labels are not compared.
    [[nodiscard]] bool same_entries(const BitMatrix& other) const noexcept;
    friend bool operator==(const BitMatrix&, const BitMatrix&) = default;

    [[nodiscard]] std::string to_string() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::size_t stride_ = 0;
    std::vector<Word> data_;
    std::vector<Label> row_labels_;
    std::vector<Label> col_labels_;
};

[[nodiscard]] std::size_t rank(const BitMatrix& m);

[[nodiscard]] inline std::size_t left_nullity(const BitMatrix& m) { return m.rows() - rank(m); }

/// Basis of { v : v * m = 0 }, each vector of length m.rows().
[[nodiscard]] std::vector<BitVec> left_nullspace_basis(const BitMatrix& m);

/// Every entry an independent fair bit drawn from `rng`.
[[nodiscard]] BitMatrix sample_uniform(std::size_t rows, std::size_t cols, CounterRng& rng);

struct NullityHistogram {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::uint64_t trials = 0;
    std::map<std::size_t, std::uint64_t> counts;

    [[nodiscard]] double frequency(std::size_t nullity) const;
};

/// Trial t draws its matrix from CounterRng(seed, t), so the histogram is the
/// same for any worker count. `workers == 0` uses the default worker count.
[[nodiscard]] NullityHistogram nullity_histogram(std::size_t rows, std::size_t cols, std::uint64_t trials,
                                                 std::uint64_t seed, unsigned workers = 0);

}  // namespace selmer::f2
