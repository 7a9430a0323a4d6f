#include "selmer/matrix_pipeline.hpp"

#include <optional>

namespace selmer {

using arith::Place;
using f2::BitMatrix;

namespace {

class Engine {
public:
    Engine(BitMatrix m, const CurveContext& ctx, const SurgeryOptions& opt)
        : m_(std::move(m)), ctx_(ctx), opt_(opt) {
        if (opt_.check) base_ = nullity();
    }

    SurgeryResult run() {
        SurgeryResult out;
        out.dependent_column = remove_dependent_column();
        remove_special_column();
        remove_valuation_columns();
        remove_w_rows();
        out.mhat = std::move(m_);
        out.steps = std::move(steps_);
        return out;
    }

private:
    LineLabel row(std::size_t r) const { return LineLabel::decode(m_.row_labels()[r]); }
    LineLabel col(std::size_t c) const { return LineLabel::decode(m_.col_labels()[c]); }

    std::size_t nullity() const {
        std::vector<std::size_t> rows, cols;
        for (std::size_t r = 0; r < m_.rows(); ++r)
            if (!row(r).passenger) rows.push_back(r);
        for (std::size_t c = 0; c < m_.cols(); ++c) cols.push_back(c);
        return rows.size() - f2::rank(m_.select(rows, cols));
    }

    void record(const std::string& action, std::uint64_t rl, std::uint64_t cl) {
        std::size_t nl = 0;
        if (opt_.check) {
            nl = nullity();
            if (nl != base_)
                throw SurgeryError("surgery step '" + action + "' changed the left nullity from " +
                                   std::to_string(base_) + " to " + std::to_string(nl));
        }
        if (opt_.trace) steps_.push_back(SurgeryStep{action, rl, cl, nl});
    }

    std::optional<std::size_t> find_col(Site s, Character c) const {
        for (std::size_t j = 0; j < m_.cols(); ++j) {
            const LineLabel l = col(j);
            if (l.site == s && l.character == c) return j;
        }
        return std::nullopt;
    }

    std::optional<std::size_t> find_row(LineKind kind, Site s, std::size_t c) const {
        for (std::size_t r = 0; r < m_.rows(); ++r) {
            const LineLabel l = row(r);
            if (!l.passenger && l.kind == kind && l.site == s && m_.get(r, c)) return r;
        }
        return std::nullopt;
    }

    void pivot(std::size_t r, std::size_t c, const std::string& action) {
        const std::uint64_t rl = m_.row_labels()[r], cl = m_.col_labels()[c];
        for (std::size_t i = 0; i < m_.rows(); ++i)
            if (i != r && m_.get(i, c)) m_.add_row(i, r);
        m_.erase_row(r);
        m_.erase_col(c);
        record(action, rl, cl);
    }

    std::uint64_t remove_dependent_column() {
        const auto& places = ctx_.bad_places();
        const Place vstar = pivot_place(ctx_);
        std::optional<std::size_t> chosen;
        // preferred: ord at a place where delta' has odd and delta even valuation
        for (int pass = 0; pass < 2 && !chosen; ++pass) {
            for (std::uint32_t k = 0; k < places.size() && !chosen; ++k) {
                const Place v = places[k];
                if (v == vstar) continue;
                if (pass == 0) {
                    const auto dp = arith::square_class(ctx_.delta_prime(), v);
                    const auto dd = arith::square_class(ctx_.delta(), v);
                    if (dp.val_parity() != 1 || dd.val_parity() != 0) continue;
                }
                if (hilbert_character_expansion(ctx_, v).front() != 1) continue;
                chosen = find_col(Site{false, k}, Character::Ord);
            }
        }
        // otherwise any bad-place character the nullvector uses, except ord at the pivot place
        for (std::uint32_t k = 0; k < places.size() && !chosen; ++k) {
            const auto coeff = hilbert_character_expansion(ctx_, places[k]);
            const auto chars = characters_at(places[k]);
            for (std::size_t j = 0; j < chars.size() && !chosen; ++j) {
                if (!coeff[j] || (places[k] == vstar && chars[j] == Character::Ord)) continue;
                chosen = find_col(Site{false, k}, chars[j]);
            }
        }
        if (!chosen) throw SurgeryError("surgery: no bad-place column carries the right nullvector");
        const std::uint64_t cl = m_.col_labels()[*chosen];
        m_.erase_col(*chosen);
        record("dependent column", 0, cl);
        return cl;
    }

    void remove_special_column() {
        const auto& places = ctx_.bad_places();
        const Place vstar = pivot_place(ctx_);
        for (std::uint32_t k = 0; k < places.size(); ++k) {
            if (!(places[k] == vstar)) continue;
            const auto c = find_col(Site{false, k}, Character::Ord);
            if (!c) throw SurgeryError("surgery: special column missing");
            const auto r = find_row(LineKind::WRow, Site{false, k}, *c);
            if (!r) throw SurgeryError("surgery: no local row at the pivot place has odd valuation");
            pivot(*r, *c, "special column");
            return;
        }
        throw SurgeryError("surgery: pivot place is not a bad place");
    }

    std::vector<Site> sites() const {
        std::vector<Site> out;
        for (std::size_t j = 0; j < m_.cols(); ++j) {
            const Site s = col(j).site;
            if (out.empty() || !(out.back() == s)) out.push_back(s);
        }
        return out;
    }

    void remove_valuation_columns() {
        for (const Site s : sites()) {
            const auto c = find_col(s, Character::Ord);
            if (!c) continue;
            if (auto r = find_row(LineKind::WRow, s, *c)) {
                pivot(*r, *c, "valuation column via local row");
            } else if (auto u = find_row(LineKind::URow, s, *c)) {
                pivot(*u, *c, "valuation column via generator row");
            } else {
                throw SurgeryError("surgery: valuation column has no pivot");
            }
        }
    }

    void remove_w_rows() {
        for (std::size_t r = 0; r < m_.rows();) {
            const LineLabel l = row(r);
            if (l.passenger || l.kind != LineKind::WRow) {
                ++r;
                continue;
            }
            std::optional<std::size_t> c;
            for (Character ch : {Character::ChiPrime, Character::Chi}) {
                auto j = find_col(l.site, ch);
                if (j && m_.get(r, *j)) {
                    c = j;
                    break;
                }
            }
            if (!c) {
                ++r;  // nothing left to pivot on; the row stays as a zero row
                continue;
            }
            pivot(r, *c, "local row");
        }
    }

    BitMatrix m_;
    const CurveContext& ctx_;
    SurgeryOptions opt_;
    std::size_t base_ = 0;
    std::vector<SurgeryStep> steps_;
};

}  // namespace

SurgeryResult surgery(BitMatrix m, const CurveContext& ctx, const SurgeryOptions& opt) {
    return Engine(std::move(m), ctx, opt).run();
}

}  // namespace selmer
