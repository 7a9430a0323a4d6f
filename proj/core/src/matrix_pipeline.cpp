#include "selmer/matrix_pipeline.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>

namespace selmer {

using arith::i64;
using arith::Place;
using arith::SquareClass;
using arith::u64;
using f2::BitMatrix;
using f2::BitVec;

std::uint64_t LineLabel::encode() const noexcept {
    return static_cast<std::uint64_t>(kind) | (static_cast<std::uint64_t>(site.twisted) << 2) |
           (static_cast<std::uint64_t>(passenger) << 3) | (static_cast<std::uint64_t>(character) << 4) |
           (static_cast<std::uint64_t>(basis) << 8) | (static_cast<std::uint64_t>(site.index) << 16);
}

LineLabel LineLabel::decode(std::uint64_t b) noexcept {
    LineLabel l;
    l.kind = static_cast<LineKind>(b & 3U);
    l.site.twisted = (b >> 2) & 1U;
    l.passenger = (b >> 3) & 1U;
    l.character = static_cast<Character>((b >> 4) & 3U);
    l.basis = static_cast<std::uint8_t>((b >> 8) & 0xFFU);
    l.site.index = static_cast<std::uint32_t>((b >> 16) & 0xFFFFFFFFU);
    return l;
}

std::string LineLabel::to_string(const CurveContext& ctx) const {
    const std::string where = site.twisted ? "p" + std::to_string(site.index)
                                           : ctx.bad_places().at(site.index).to_string();
    switch (kind) {
        case LineKind::URow:
            if (passenger) return "passenger[" + std::to_string(basis) + "]";
            return "U(" + (!site.twisted && site.index == 0 ? std::string("-1") : where) + ")";
        case LineKind::WRow: return "W(" + where + "," + std::to_string(basis) + ")";
        case LineKind::Column: {
            static const char* names[] = {"ord", "chi", "chi'"};
            return std::string(names[static_cast<int>(character)]) + "_" + where;
        }
    }
    return "?";
}

unsigned character_value(Character c, const SquareClass& x) {
    switch (c) {
        case Character::Ord: return x.bits & 1U;
        case Character::Chi: return (x.bits >> 1) & 1U;
        case Character::ChiPrime: return ((x.bits >> 1) ^ (x.bits >> 2)) & 1U;
    }
    return 0;
}

std::vector<Character> characters_at(Place v) {
    switch (v.kind()) {
        case Place::Kind::Infinity: return {Character::Ord};
        case Place::Kind::Two: return {Character::Ord, Character::Chi, Character::ChiPrime};
        case Place::Kind::Odd: return {Character::Ord, Character::Chi};
    }
    return {};
}

std::vector<unsigned> hilbert_character_expansion(const CurveContext& ctx, Place v) {
    const auto chars = characters_at(v);
    const SquareClass dp = arith::square_class(ctx.delta_prime(), v);
    for (unsigned mask = 0; mask < (1U << chars.size()); ++mask) {
        bool ok = true;
        for (const auto& x : arith::all_classes(v)) {
            unsigned s = 0;
            for (std::size_t k = 0; k < chars.size(); ++k)
                if ((mask >> k) & 1U) s ^= character_value(chars[k], x);
            if (s != arith::hilbert_additive(x, dp)) {
                ok = false;
                break;
            }
        }
        if (ok) {
            std::vector<unsigned> out;
            for (std::size_t k = 0; k < chars.size(); ++k) out.push_back((mask >> k) & 1U);
            return out;
        }
    }
    throw std::logic_error("hilbert_character_expansion: characters do not span the dual");
}

Place pivot_place(const CurveContext& ctx) {
    if (ctx.delta() < 0) return Place::infinity();
    return Place::prime(arith::prime_divisors(static_cast<u64>(ctx.delta())).front());
}

namespace {

std::uint64_t col_label(Site s, Character c) {
    return LineLabel{LineKind::Column, s, c, 0, false}.encode();
}
std::uint64_t urow_label(Site s) { return LineLabel{LineKind::URow, s, Character::Ord, 0, false}.encode(); }
std::uint64_t wrow_label(Site s, unsigned b) {
    return LineLabel{LineKind::WRow, s, Character::Ord, static_cast<std::uint8_t>(b), false}.encode();
}

i64 orig_generator(const CurveContext& ctx, std::uint32_t k) {
    return k == 0 ? -1 : static_cast<i64>(ctx.bad_places()[k].p());
}

// Twisted basis of W at p_i as class bits (bit0 ord, bit1 chi).
std::vector<unsigned> twisted_basis(const TwistData& td, const SymbolOracle& oracle, std::size_t i) {
    const unsigned cof = td.d_cofactor_symbol[i];
    switch (td.types[i]) {
        case PrimeType::Type1: return {1U | ((cof ^ oracle.lambda(i)) << 1)};
        case PrimeType::Type2: return {};
        case PrimeType::Type3: return {2U, 1U | ((cof ^ oracle.type3_twist_bit(i)) << 1)};
        case PrimeType::Type4: return {2U};
    }
    return {};
}

struct Layout {
    std::vector<std::uint64_t> cols;
    std::map<std::uint64_t, std::size_t> col_index;
};

Layout orig_layout(const CurveContext& ctx) {
    Layout l;
    for (std::uint32_t k = 0; k < ctx.bad_places().size(); ++k)
        for (Character c : characters_at(ctx.bad_places()[k])) {
            l.col_index[col_label({false, k}, c)] = l.cols.size();
            l.cols.push_back(col_label({false, k}, c));
        }
    return l;
}

// Fill the bad-place part of `row` with the characters of the classes `cls` (one per bad place).
void put_orig(BitVec& row, const Layout& l, const CurveContext& ctx, const std::vector<SquareClass>& cls) {
    for (std::uint32_t k = 0; k < ctx.bad_places().size(); ++k)
        for (Character c : characters_at(ctx.bad_places()[k]))
            if (character_value(c, cls[k])) row.set(l.col_index.at(col_label({false, k}, c)), true);
}

std::vector<SquareClass> classes_of(const CurveContext& ctx, i64 g) {
    std::vector<SquareClass> out;
    for (const Place& v : ctx.bad_places()) out.push_back(arith::square_class(g, v));
    return out;
}

std::vector<SquareClass> residue_classes(const CurveContext& ctx, u64 r) {
    std::vector<SquareClass> out;
    for (const Place& v : ctx.bad_places()) out.push_back(residue_class(v, r));
    return out;
}

}  // namespace

struct Pipeline::Memo {
    std::mutex mu;
    std::map<std::vector<unsigned>, std::shared_ptr<const OrigReduction>> reductions;
};

Pipeline::Pipeline(const CurveContext& ctx) : ctx_(&ctx), memo_(std::make_shared<Memo>()) {}

BitMatrix Pipeline::build_M(const SymbolOracle& oracle) const { return build_M(analyze(*ctx_, oracle), oracle); }

BitMatrix Pipeline::build_M(const TwistData& td, const SymbolOracle& oracle) const {
    const CurveContext& ctx = *ctx_;
    Layout l = orig_layout(ctx);
    for (std::uint32_t i = 0; i < td.n; ++i)
        for (Character c : {Character::Ord, Character::Chi}) {
            l.col_index[col_label({true, i}, c)] = l.cols.size();
            l.cols.push_back(col_label({true, i}, c));
        }
    const std::size_t ncols = l.cols.size();
    const std::size_t nbad = ctx.bad_places().size();
    auto tw = [&](std::uint32_t i, Character c) { return l.col_index.at(col_label({true, i}, c)); };

    BitMatrix m(0, ncols);
    for (std::size_t c = 0; c < ncols; ++c) m.set_col_label(c, l.cols[c]);

    const Place vstar = pivot_place(ctx);
    // B_U: bad-place generators
    for (std::uint32_t k = 0; k < nbad; ++k) {
        if (ctx.bad_places()[k] == vstar) continue;
        const i64 g = orig_generator(ctx, k);
        BitVec row(ncols);
        put_orig(row, l, ctx, classes_of(ctx, g));
        for (std::uint32_t i = 0; i < td.n; ++i)
            if (generator_symbol(g, td.residues[i])) row.set(tw(i, Character::Chi), true);
        m.append_row(row, urow_label({false, k}));
    }
    // B_U: twisted primes
    for (std::uint32_t i = 0; i < td.n; ++i) {
        BitVec row(ncols);
        put_orig(row, l, ctx, residue_classes(ctx, td.residues[i]));
        for (std::uint32_t j = 0; j < td.n; ++j) {
            if (j == i) row.set(tw(i, Character::Ord), true);
            else if (oracle.pair_symbol(i, j)) row.set(tw(j, Character::Chi), true);
        }
        m.append_row(row, urow_label({true, i}));
    }
    // B_W: local vectors
    for (std::uint32_t k = 0; k < nbad; ++k) {
        const LocalSubgroup w = ctx.bad_place_image(td.d_classes[k]);
        const auto chars = characters_at(ctx.bad_places()[k]);
        for (unsigned b = 0; b < w.dim(); ++b) {
            BitVec row(ncols);
            for (Character c : chars)
                if (character_value(c, w.basis()[b])) row.set(l.col_index.at(col_label({false, k}, c)), true);
            m.append_row(row, wrow_label({false, k}, b));
        }
    }
    for (std::uint32_t i = 0; i < td.n; ++i) {
        const auto basis = twisted_basis(td, oracle, i);
        for (unsigned b = 0; b < basis.size(); ++b) {
            BitVec row(ncols);
            if (basis[b] & 1U) row.set(tw(i, Character::Ord), true);
            if (basis[b] & 2U) row.set(tw(i, Character::Chi), true);
            m.append_row(row, wrow_label({true, i}, b));
        }
    }
    return m;
}

BitVec Pipeline::right_nullvector(const BitMatrix& m, const TwistData& td) const {
    std::vector<std::vector<unsigned>> expansions;
    for (const Place& v : ctx_->bad_places()) expansions.push_back(hilbert_character_expansion(*ctx_, v));
    BitVec out(m.cols());
    for (std::size_t c = 0; c < m.cols(); ++c) {
        const LineLabel l = LineLabel::decode(m.col_labels()[c]);
        if (!l.site.twisted) {
            const auto chars = characters_at(ctx_->bad_places()[l.site.index]);
            const auto pos = std::find(chars.begin(), chars.end(), l.character) - chars.begin();
            out.set(c, expansions[l.site.index][static_cast<std::size_t>(pos)]);
        } else if (l.character == Character::Ord) {
            const PrimeType t = td.types.at(l.site.index);
            out.set(c, t == PrimeType::Type2 || t == PrimeType::Type4);
        }
    }
    return out;
}

std::shared_ptr<const OrigReduction> Pipeline::orig_reduction(const std::vector<SquareClass>& d_classes,
                                                              bool check) const {
    std::vector<unsigned> key;
    for (const auto& c : d_classes) key.push_back(c.bits);
    {
        std::lock_guard lk(memo_->mu);
        auto it = memo_->reductions.find(key);
        if (it != memo_->reductions.end()) return it->second;
    }

    const CurveContext& ctx = *ctx_;
    const Layout l = orig_layout(ctx);
    const std::size_t ncols = l.cols.size();
    const std::size_t nbad = ctx.bad_places().size();
    BitMatrix m(0, ncols);
    for (std::size_t c = 0; c < ncols; ++c) m.set_col_label(c, l.cols[c]);

    const Place vstar = pivot_place(ctx);
    for (std::uint32_t k = 0; k < nbad; ++k) {
        if (ctx.bad_places()[k] == vstar) continue;
        BitVec row(ncols);
        put_orig(row, l, ctx, classes_of(ctx, orig_generator(ctx, k)));
        m.append_row(row, urow_label({false, k}));
    }
    for (std::uint32_t k = 0; k < nbad; ++k) {
        const LocalSubgroup w = ctx.bad_place_image(d_classes[k]);
        for (unsigned b = 0; b < w.dim(); ++b) {
            BitVec row(ncols);
            for (Character c : characters_at(ctx.bad_places()[k]))
                if (character_value(c, w.basis()[b])) row.set(l.col_index.at(col_label({false, k}, c)), true);
            m.append_row(row, wrow_label({false, k}, b));
        }
    }
    // one passenger per unit vector; twisted rows transform linearly
    for (std::size_t c = 0; c < ncols; ++c) {
        BitVec row(ncols);
        row.set(c, true);
        m.append_row(row, LineLabel{LineKind::URow, {true, 0}, Character::Ord, static_cast<std::uint8_t>(c), true}.encode());
    }

    SurgeryResult res = surgery(std::move(m), ctx, SurgeryOptions{check, false});
    auto red = std::make_shared<OrigReduction>();
    red->psi_orig = l.cols;
    red->dependent_column = res.dependent_column;
    red->transform.resize(ncols);
    std::vector<std::size_t> keep_rows, all_cols(res.mhat.cols());
    std::iota(all_cols.begin(), all_cols.end(), std::size_t{0});
    for (std::size_t r = 0; r < res.mhat.rows(); ++r) {
        const LineLabel lab = LineLabel::decode(res.mhat.row_labels()[r]);
        if (lab.passenger) red->transform[lab.basis] = res.mhat.row(r);
        else keep_rows.push_back(r);
    }
    red->a11 = res.mhat.select(keep_rows, all_cols);

    std::lock_guard lk(memo_->mu);
    return memo_->reductions.emplace(std::move(key), std::move(red)).first->second;
}

BitMatrix Pipeline::build_Mhat_direct(const SymbolOracle& oracle, bool check) const {
    return build_Mhat_direct(analyze(*ctx_, oracle), oracle, check);
}

BitMatrix Pipeline::build_Mhat_direct(const TwistData& td, const SymbolOracle& oracle, bool check) const {
    const CurveContext& ctx = *ctx_;
    const auto red = orig_reduction(td.d_classes, check);
    const BitMatrix& a = red->a11;

    std::vector<std::uint32_t> rows_t, cols_t;  // twisted rows (type 1 then 3), twisted columns (type 1 then 2)
    for (PrimeType want : {PrimeType::Type1, PrimeType::Type3})
        for (std::uint32_t i = 0; i < td.n; ++i)
            if (td.types[i] == want) rows_t.push_back(i);
    for (PrimeType want : {PrimeType::Type1, PrimeType::Type2})
        for (std::uint32_t i = 0; i < td.n; ++i)
            if (td.types[i] == want) cols_t.push_back(i);

    const std::size_t R = a.rows() + rows_t.size();
    const std::size_t C = a.cols() + cols_t.size();
    BitMatrix m(R, C);
    for (std::size_t c = 0; c < a.cols(); ++c) m.set_col_label(c, a.col_labels()[c]);
    for (std::size_t c = 0; c < cols_t.size(); ++c) m.set_col_label(a.cols() + c, col_label({true, cols_t[c]}, Character::Chi));

    // bad-place rows
    for (std::size_t r = 0; r < a.rows(); ++r) {
        m.set_row_label(r, a.row_labels()[r]);
        for (std::size_t c = 0; c < a.cols(); ++c)
            if (a.get(r, c)) m.set(r, c, true);
        const LineLabel lab = LineLabel::decode(a.row_labels()[r]);
        if (lab.kind != LineKind::URow) continue;
        const i64 g = orig_generator(ctx, lab.site.index);
        for (std::size_t c = 0; c < cols_t.size(); ++c)
            if (generator_symbol(g, td.residues[cols_t[c]])) m.set(r, a.cols() + c, true);
    }

    // twisted rows
    const Layout l = orig_layout(ctx);
    for (std::size_t k = 0; k < rows_t.size(); ++k) {
        const std::uint32_t i = rows_t[k];
        const std::size_t r = a.rows() + k;
        m.set_row_label(r, urow_label({true, i}));
        BitVec init(l.cols.size());
        put_orig(init, l, ctx, residue_classes(ctx, td.residues[i]));
        BitVec img(a.cols());
        for (std::size_t j = 0; j < init.size(); ++j)
            if (init.get(j)) img ^= red->transform[j];
        for (std::size_t c = 0; c < a.cols(); ++c)
            if (img.get(c)) m.set(r, c, true);
        for (std::size_t c = 0; c < cols_t.size(); ++c) {
            const std::uint32_t j = cols_t[c];
            const unsigned bit = j == i ? (td.d_cofactor_symbol[i] ^ oracle.lambda(i)) : oracle.pair_symbol(i, j);
            if (bit) m.set(r, a.cols() + c, true);
        }
    }
    return m;
}

BitMatrix Pipeline::canonical_layout(const BitMatrix& m, const TwistData& td) const {
    auto row_group = [&](std::uint64_t lab) {
        const LineLabel l = LineLabel::decode(lab);
        if (!l.site.twisted) return 0;
        return td.types.at(l.site.index) == PrimeType::Type1 ? 1 : 2;
    };
    auto col_group = [&](std::uint64_t lab) {
        const LineLabel l = LineLabel::decode(lab);
        if (!l.site.twisted) return 0;
        return td.types.at(l.site.index) == PrimeType::Type1 ? 1 : 2;
    };
    std::vector<std::size_t> rows(m.rows()), cols(m.cols());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    std::iota(cols.begin(), cols.end(), std::size_t{0});
    std::stable_sort(rows.begin(), rows.end(), [&](std::size_t a, std::size_t b) {
        return row_group(m.row_labels()[a]) < row_group(m.row_labels()[b]);
    });
    std::stable_sort(cols.begin(), cols.end(), [&](std::size_t a, std::size_t b) {
        return col_group(m.col_labels()[a]) < col_group(m.col_labels()[b]);
    });
    return m.select(rows, cols);
}

unsigned Pipeline::selmer_rank(const SymbolOracle& oracle) const {
    return static_cast<unsigned>(f2::left_nullity(build_Mhat_direct(oracle))) + 1;
}

unsigned Pipeline::selmer_rank(i64 d) const { return selmer_rank(ArithmeticOracle(*ctx_, d)); }

}  // namespace selmer
