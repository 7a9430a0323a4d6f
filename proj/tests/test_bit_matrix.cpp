#include "doctest.h"

#include <stdexcept>
#include <vector>

#include "selmer/bit_matrix.hpp"
#include "selmer/cl_constants.hpp"
#include "selmer/random.hpp"

using namespace selmer;
using f2::BitMatrix;
using f2::BitVec;

namespace {

// Dense reference: Gauss-Jordan one bit at a time.
std::size_t slow_rank(BitMatrix a) {
    std::size_t rk = 0;
    for (std::size_t c = 0; c < a.cols() && rk < a.rows(); ++c) {
        std::size_t p = rk;
        while (p < a.rows() && !a.get(p, c)) ++p;
        if (p == a.rows()) continue;
        a.swap_rows(p, rk);
        for (std::size_t r = 0; r < a.rows(); ++r)
            if (r != rk && a.get(r, c)) a.add_row(r, rk);
        ++rk;
    }
    return rk;
}

BitMatrix random_matrix(CounterRng& g, std::size_t max_dim) {
    const std::size_t R = g.below(max_dim + 1), C = g.below(max_dim + 1);
    BitMatrix m = f2::sample_uniform(R, C, g);
    // sparsify or duplicate rows now and then so low ranks show up
    const auto mode = g.below(3);
    for (std::size_t r = 0; r < R; ++r)
        for (std::size_t c = 0; c < C; ++c) {
            if (mode == 1 && g.below(4) != 0) m.set(r, c, false);
            if (mode == 2 && r > 0 && c == 0 && g.bit())
                for (std::size_t k = 0; k < C; ++k) m.set(r, k, m.get(r - 1, k));
        }
    return m;
}

}  // namespace

TEST_CASE("rank of small matrices") {
    CHECK(f2::rank(BitMatrix::identity(5)) == 5);
    CHECK(f2::rank(BitMatrix(3, 7)) == 0);
    CHECK(f2::rank(BitMatrix::from_rows({{1, 1, 0}, {0, 1, 1}, {1, 0, 1}})) == 2);
    CHECK(f2::rank(BitMatrix(0, 0)) == 0);
    CHECK(f2::rank(BitMatrix(0, 4)) == 0);
}

TEST_CASE("left nullity") {
    CHECK(f2::left_nullity(BitMatrix::identity(5)) == 0);
    CHECK(f2::left_nullity(BitMatrix(1, 2)) == 1);
    CHECK(f2::left_nullity(BitMatrix::from_rows({{1, 1, 0}, {0, 1, 1}, {1, 0, 1}})) == 1);
    CHECK(f2::left_nullity(BitMatrix(2, 0)) == 2);
}

TEST_CASE("left nullspace basis") {
    CHECK(f2::left_nullspace_basis(BitMatrix::identity(2)).empty());

    auto eq = f2::left_nullspace_basis(BitMatrix::from_rows({{1, 0, 1}, {1, 0, 1}}));
    REQUIRE(eq.size() == 1);
    CHECK(eq[0] == BitVec{1, 1});

    auto tri = f2::left_nullspace_basis(BitMatrix::from_rows({{1, 1, 0}, {0, 1, 1}, {1, 0, 1}}));
    REQUIRE(tri.size() == 1);
    CHECK(tri[0] == BitVec{1, 1, 1});
}

TEST_CASE("rank agrees with a bitwise reference across word boundaries") {
    for (std::uint64_t t = 0; t < 3000; ++t) {
        CounterRng g(91, t);
        const BitMatrix m = random_matrix(g, t % 2 ? 150 : 20);
        const std::size_t rk = f2::rank(m);
        REQUIRE(rk == slow_rank(m));
        CHECK(rk <= std::min(m.rows(), m.cols()));

        const auto basis = f2::left_nullspace_basis(m);
        CHECK(basis.size() == m.rows() - rk);
        for (const auto& v : basis) {
            CHECK(v.any());
            CHECK_FALSE(m.left_multiply(v).any());
        }
    }
}

TEST_CASE("row operations and elimination keep the rank") {
    for (std::uint64_t t = 0; t < 300; ++t) {
        CounterRng g(5, t);
        BitMatrix m = random_matrix(g, 40);
        if (m.rows() < 2) continue;
        const std::size_t before = f2::rank(m);
        for (int k = 0; k < 10; ++k) {
            const auto a = g.below(m.rows()), b = g.below(m.rows());
            if (a != b) m.add_row(a, b);
            m.swap_rows(g.below(m.rows()), g.below(m.rows()));
        }
        CHECK(f2::rank(m) == before);
    }
}

TEST_CASE("labels follow rows and columns") {
    BitMatrix m(0, 3);
    m.append_row(BitVec{1, 0, 1}, 10);
    m.append_row(BitVec{0, 1, 1}, 11);
    m.append_row(BitVec{1, 1, 0}, 12);
    for (std::size_t c = 0; c < 3; ++c) m.set_col_label(c, 100 + c);

    m.erase_row(1);
    REQUIRE(m.rows() == 2);
    CHECK(m.row_labels() == std::vector<BitMatrix::Label>{10, 12});
    CHECK(m.row(1) == BitVec{1, 1, 0});

    m.erase_col(0);
    CHECK(m.col_labels() == std::vector<BitMatrix::Label>{101, 102});
    CHECK(m.row(0) == BitVec{0, 1});

    const std::vector<std::size_t> rows{1}, cols{0};
    const BitMatrix s = m.select(rows, cols);
    CHECK(s.rows() == 1);
    CHECK(s.cols() == 1);
    CHECK(s.row_labels()[0] == 12);
    CHECK(s.col_labels()[0] == 101);
    CHECK(s.get(0, 0));

    BitVec col(2);
    col.set(0, true);
    m.append_col(col, 7);
    CHECK(m.cols() == 3);
    CHECK(m.col_labels().back() == 7);
    CHECK(m.get(0, 2));
    CHECK_FALSE(m.get(1, 2));
}

TEST_CASE("products") {
    const BitMatrix m = BitMatrix::from_rows({{1, 1, 0}, {0, 1, 1}});
    CHECK(m.left_multiply(BitVec{1, 1}) == BitVec{1, 0, 1});
    CHECK(m.right_multiply(BitVec{1, 1, 1}) == BitVec{0, 0});
    CHECK(m.right_multiply(BitVec{1, 0, 0}) == BitVec{1, 0});
}

TEST_CASE("sample_uniform") {
    CounterRng g0(3, 0);
    CHECK(f2::sample_uniform(0, 0, g0).rows() == 0);

    CounterRng a(42, 7), b(42, 7);
    CHECK(f2::sample_uniform(77, 130, a) == f2::sample_uniform(77, 130, b));

    // padding bits stay clear, so same_entries is a real comparison
    CounterRng c(1, 1);
    const BitMatrix m = f2::sample_uniform(3, 70, c);
    for (std::size_t r = 0; r < 3; ++r) CHECK((m.row_words(r)[1] >> 6) == 0);

    std::uint64_t ones = 0;
    for (std::uint64_t s = 0; s < 100; ++s) {
        CounterRng g(s, 0);
        const BitMatrix x = f2::sample_uniform(100, 100, g);
        for (std::size_t r = 0; r < 100; ++r) ones += x.row(r).count();
    }
    CHECK(static_cast<double>(ones) / 1e6 == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("nullity histogram") {
    const auto one = f2::nullity_histogram(1, 1, 100000, 11);
    CHECK(one.frequency(0) == doctest::Approx(0.5).epsilon(0.02));

    const auto no_cols = f2::nullity_histogram(2, 0, 1000, 1);
    CHECK(no_cols.frequency(2) == 1.0);

    const auto sq = f2::nullity_histogram(200, 200, 100000, 2024);
    CHECK(std::abs(sq.frequency(0) - static_cast<double>(cl::alpha_prime(2, 0, 0))) <= 0.01);

    CHECK_THROWS_AS((void)f2::nullity_histogram(2, 2, 0, 1), std::invalid_argument);
}

TEST_CASE("nullity histogram does not depend on the worker count") {
    const auto a = f2::nullity_histogram(30, 31, 5000, 9, 1);
    const auto b = f2::nullity_histogram(30, 31, 5000, 9, 3);
    CHECK(a.counts == b.counts);
}
