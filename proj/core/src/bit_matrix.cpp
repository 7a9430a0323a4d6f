#include "selmer/bit_matrix.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <utility>

#include "selmer/parallel.hpp"

namespace selmer::f2 {

BitVec::BitVec(std::initializer_list<int> bits) : BitVec(bits.size()) {
    std::size_t i = 0;
    for (int b : bits) set(i++, (b & 1) != 0);
}

bool BitVec::any() const noexcept {
    for (Word w : words_)
        if (w) return true;
    return false;
}

std::size_t BitVec::count() const noexcept {
    std::size_t c = 0;
    for (Word w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
}

BitVec& BitVec::operator^=(const BitVec& other) noexcept {
    const std::size_t n = std::min(words_.size(), other.words_.size());
    for (std::size_t i = 0; i < n; ++i) words_[i] ^= other.words_[i];
    return *this;
}

std::string BitVec::to_string() const {
    std::string s(size_, '0');
    for (std::size_t i = 0; i < size_; ++i)
        if (get(i)) s[i] = '1';
    return s;
}

BitMatrix::BitMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), stride_(words_for(cols)), data_(rows * words_for(cols), 0),
      row_labels_(rows, 0), col_labels_(cols, 0) {}

BitMatrix BitMatrix::identity(std::size_t n) {
    BitMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.set(i, i, true);
    return m;
}

BitMatrix BitMatrix::from_rows(std::initializer_list<std::initializer_list<int>> rows) {
    const std::size_t cols = rows.size() ? rows.begin()->size() : 0;
    BitMatrix m(rows.size(), cols);
    std::size_t r = 0;
    for (const auto& row : rows) {
        if (row.size() != cols) throw std::invalid_argument("from_rows: ragged rows");
        std::size_t c = 0;
        for (int b : row) m.set(r, c++, (b & 1) != 0);
        ++r;
    }
    return m;
}

BitVec BitMatrix::row(std::size_t r) const {
    BitVec v(cols_);
    auto src = row_words(r);
    std::copy(src.begin(), src.end(), v.words().begin());
    return v;
}

bool BitMatrix::row_is_zero(std::size_t r) const noexcept {
    for (Word w : row_words(r))
        if (w) return false;
    return true;
}

void BitMatrix::add_row(std::size_t dst, std::size_t src) noexcept {
    Word* d = data_.data() + dst * stride_;
    const Word* s = data_.data() + src * stride_;
    for (std::size_t k = 0; k < stride_; ++k) d[k] ^= s[k];
}

void BitMatrix::swap_rows(std::size_t a, std::size_t b) noexcept {
    if (a == b) return;
    Word* x = data_.data() + a * stride_;
    Word* y = data_.data() + b * stride_;
    for (std::size_t k = 0; k < stride_; ++k) std::swap(x[k], y[k]);
    std::swap(row_labels_[a], row_labels_[b]);
}

void BitMatrix::erase_row(std::size_t r) {
    if (r >= rows_) throw std::out_of_range("erase_row");
    data_.erase(data_.begin() + static_cast<std::ptrdiff_t>(r * stride_),
                data_.begin() + static_cast<std::ptrdiff_t>((r + 1) * stride_));
    row_labels_.erase(row_labels_.begin() + static_cast<std::ptrdiff_t>(r));
    --rows_;
}

void BitMatrix::erase_col(std::size_t c) {
    if (c >= cols_) throw std::out_of_range("erase_col");
    BitMatrix out(rows_, cols_ - 1);
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t j = 0, k = 0; j < cols_; ++j) {
            if (j == c) continue;
            if (get(r, j)) out.set(r, k, true);
            ++k;
        }
    }
    out.row_labels_ = std::move(row_labels_);
    out.col_labels_ = std::move(col_labels_);
    out.col_labels_.erase(out.col_labels_.begin() + static_cast<std::ptrdiff_t>(c));
    *this = std::move(out);
}

void BitMatrix::append_row(const BitVec& bits, Label label) {
    if (bits.size() != cols_) throw std::invalid_argument("append_row: length mismatch");
    auto w = bits.words();
    data_.insert(data_.end(), w.begin(), w.end());
    row_labels_.push_back(label);
    ++rows_;
}

void BitMatrix::append_col(const BitVec& bits, Label label) {
    if (bits.size() != rows_) throw std::invalid_argument("append_col: length mismatch");
    BitMatrix out(rows_, cols_ + 1);
    for (std::size_t r = 0; r < rows_; ++r) {
        auto src = row_words(r);
        std::copy(src.begin(), src.end(), out.row_words(r).begin());
        out.set(r, cols_, bits.get(r));
    }
    out.row_labels_ = std::move(row_labels_);
    out.col_labels_ = std::move(col_labels_);
    out.col_labels_.push_back(label);
    *this = std::move(out);
}

BitMatrix BitMatrix::select(std::span<const std::size_t> row_idx, std::span<const std::size_t> col_idx) const {
    BitMatrix out(row_idx.size(), col_idx.size());
    for (std::size_t i = 0; i < row_idx.size(); ++i) {
        out.row_labels_[i] = row_labels_.at(row_idx[i]);
        for (std::size_t j = 0; j < col_idx.size(); ++j)
            if (get(row_idx[i], col_idx[j])) out.set(i, j, true);
    }
    for (std::size_t j = 0; j < col_idx.size(); ++j) out.col_labels_[j] = col_labels_.at(col_idx[j]);
    return out;
}

BitVec BitMatrix::left_multiply(const BitVec& v) const {
    if (v.size() != rows_) throw std::invalid_argument("left_multiply: length mismatch");
    BitVec out(cols_);
    auto o = out.words();
    for (std::size_t r = 0; r < rows_; ++r) {
        if (!v.get(r)) continue;
        auto src = row_words(r);
        for (std::size_t k = 0; k < stride_; ++k) o[k] ^= src[k];
    }
    return out;
}

BitVec BitMatrix::right_multiply(const BitVec& c) const {
    if (c.size() != cols_) throw std::invalid_argument("right_multiply: length mismatch");
    BitVec out(rows_);
    auto cw = c.words();
    for (std::size_t r = 0; r < rows_; ++r) {
        auto src = row_words(r);
        unsigned parity = 0;
        for (std::size_t k = 0; k < stride_; ++k) parity ^= static_cast<unsigned>(std::popcount(src[k] & cw[k]));
        out.set(r, parity & 1U);
    }
    return out;
}

bool BitMatrix::same_entries(const BitMatrix& other) const noexcept {
    return rows_ == other.rows_ && cols_ == other.cols_ && data_ == other.data_;
}

std::string BitMatrix::to_string() const {
    std::string s;
    s.reserve(rows_ * (cols_ + 1));
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t c = 0; c < cols_; ++c) s.push_back(get(r, c) ? '1' : '0');
        s.push_back('\n');
    }
    return s;
}

namespace {

// Forward elimination in place on a packed copy; returns the rank. Columns are
// taken in strips of up to 8 inside one word: pivots for the strip are found
// (and kept reduced against each other), then every remaining row is cleared
// with one lookup in a table of all combinations of the strip's pivot rows.
// Rows rank..rows-1 end up zero in the first `cols` columns.
std::size_t eliminate(std::vector<Word>& a, std::size_t rows, std::size_t cols, std::size_t stride) {
    constexpr std::size_t kStrip = 6;
    std::vector<Word> table((std::size_t{1} << kStrip) * stride);
    std::size_t rank = 0;
    std::size_t c = 0;
    while (c < cols && rank < rows) {
        const std::size_t wi = c / kWordBits;
        const std::size_t off = c % kWordBits;
        const std::size_t width = std::min({kStrip, kWordBits - off, cols - c});

        std::size_t piv_bit[kStrip];
        std::size_t found = 0;
        auto reduce = [&](Word* x) {
            for (std::size_t i = 0; i < found; ++i)
                if ((x[wi] >> piv_bit[i]) & 1U) {
                    const Word* p = a.data() + (rank + i) * stride;
                    for (std::size_t k = wi; k < stride; ++k) x[k] ^= p[k];
                }
        };
        for (std::size_t j = 0; j < width && rank + found < rows; ++j) {
            const std::size_t bit = off + j;
            std::size_t r = rank + found;
            for (; r < rows; ++r) {
                Word* x = a.data() + r * stride;
                reduce(x);
                if ((x[wi] >> bit) & 1U) break;
            }
            if (r == rows) continue;
            const std::size_t dst = rank + found;
            Word* p = a.data() + r * stride;
            if (r != dst) {
                Word* q = a.data() + dst * stride;
                for (std::size_t k = wi; k < stride; ++k) std::swap(p[k], q[k]);
                p = q;
            }
            for (std::size_t i = 0; i < found; ++i) {
                Word* q = a.data() + (rank + i) * stride;
                if ((q[wi] >> bit) & 1U)
                    for (std::size_t k = wi; k < stride; ++k) q[k] ^= p[k];
            }
            piv_bit[found++] = bit;
        }
        if (found == 0) {
            c += width;
            continue;
        }

        // table[s] = sum of pivot rows i with bit i of s set
        const std::size_t span = stride - wi;
        std::fill(table.begin(), table.begin() + static_cast<std::ptrdiff_t>(span), 0);
        for (std::size_t s = 1; s < (std::size_t{1} << found); ++s) {
            const std::size_t low = static_cast<std::size_t>(std::countr_zero(s));
            const Word* prev = table.data() + (s & (s - 1)) * span;
            const Word* p = a.data() + (rank + low) * stride + wi;
            Word* t = table.data() + s * span;
            for (std::size_t k = 0; k < span; ++k) t[k] = prev[k] ^ p[k];
        }
        const bool contiguous = found == width;  // pivot i sits at bit off + i
        const Word strip_mask = (Word{1} << found) - 1;
        for (std::size_t r = rank + found; r < rows; ++r) {
            Word* x = a.data() + r * stride;
            std::size_t s = 0;
            if (contiguous)
                s = static_cast<std::size_t>((x[wi] >> off) & strip_mask);
            else
                for (std::size_t i = 0; i < found; ++i) s |= static_cast<std::size_t>((x[wi] >> piv_bit[i]) & 1U) << i;
            if (s == 0) continue;
            const Word* t = table.data() + s * span;
            for (std::size_t k = 0; k < span; ++k) x[wi + k] ^= t[k];
        }
        rank += found;
        c += width;
    }
    return rank;
}

}  // namespace

std::size_t rank(const BitMatrix& m) {
    if (m.rows() == 0 || m.cols() == 0) return 0;
    std::vector<Word> a(m.rows() * m.stride());
    for (std::size_t r = 0; r < m.rows(); ++r) {
        auto src = m.row_words(r);
        std::copy(src.begin(), src.end(), a.begin() + static_cast<std::ptrdiff_t>(r * m.stride()));
    }
    return eliminate(a, m.rows(), m.cols(), m.stride());
}

std::vector<BitVec> left_nullspace_basis(const BitMatrix& m) {
    // Augment [m | I] and reduce; rows whose m-part vanishes carry the combination.
    const std::size_t n = m.rows();
    const std::size_t total = m.cols() + n;
    const std::size_t stride = words_for(total);
    std::vector<Word> a(n * stride, 0);
    for (std::size_t r = 0; r < n; ++r) {
        Word* row = a.data() + r * stride;
        for (std::size_t c = 0; c < m.cols(); ++c)
            if (m.get(r, c)) row[c / kWordBits] |= Word{1} << (c % kWordBits);
        const std::size_t id = m.cols() + r;
        row[id / kWordBits] |= Word{1} << (id % kWordBits);
    }
    const std::size_t rk = eliminate(a, n, m.cols(), stride);

    std::vector<BitVec> basis;
    basis.reserve(n - rk);
    for (std::size_t r = rk; r < n; ++r) {
        BitVec v(n);
        const Word* row = a.data() + r * stride;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t bit = m.cols() + i;
            if ((row[bit / kWordBits] >> (bit % kWordBits)) & 1U) v.set(i, true);
        }
        basis.push_back(std::move(v));
    }
    return basis;
}

BitMatrix sample_uniform(std::size_t rows, std::size_t cols, CounterRng& rng) {
    BitMatrix m(rows, cols);
    const std::size_t tail = cols % kWordBits;
    const Word tail_mask = tail ? (Word{1} << tail) - 1 : ~Word{0};
    for (std::size_t r = 0; r < rows; ++r) {
        auto w = m.row_words(r);
        for (std::size_t k = 0; k < w.size(); ++k) w[k] = rng();
        if (!w.empty()) w.back() &= tail_mask;
    }
    return m;
}

double NullityHistogram::frequency(std::size_t nullity) const {
    if (trials == 0) return 0.0;
    auto it = counts.find(nullity);
    return it == counts.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(trials);
}

NullityHistogram nullity_histogram(std::size_t rows, std::size_t cols, std::uint64_t trials, std::uint64_t seed,
                                   unsigned workers) {
    if (trials == 0) throw std::invalid_argument("nullity_histogram: trials must be >= 1");
    using Counts = std::map<std::size_t, std::uint64_t>;
    Counts counts = chunked_map_reduce<Counts>(
        trials, 2048, workers, Counts{},
        [&](std::uint64_t b, std::uint64_t e) {
            Counts local;
            for (std::uint64_t t = b; t < e; ++t) {
                CounterRng rng(seed, t);
                ++local[left_nullity(sample_uniform(rows, cols, rng))];
            }
            return local;
        },
        [](Counts& acc, Counts part) {
            for (auto [k, v] : part) acc[k] += v;
        });
    return NullityHistogram{rows, cols, trials, std::move(counts)};
}

}  // namespace selmer::f2
