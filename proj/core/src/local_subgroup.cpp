#include "selmer/local_subgroup.hpp"

#include <stdexcept>

namespace selmer {

using arith::Place;
using arith::SquareClass;

namespace {

unsigned closure(unsigned n_classes, const std::vector<unsigned>& gens) {
    unsigned mask = 1;  // identity
    for (unsigned g : gens) {
        unsigned add = 0;
        for (unsigned x = 0; x < n_classes; ++x)
            if ((mask >> x) & 1U) add |= 1U << (x ^ g);
        mask |= add;
    }
    return mask;
}

}  // namespace

LocalSubgroup::LocalSubgroup(Place v, unsigned mask) : place_(v), mask_(mask) {
    const unsigned n = 1U << v.ambient_dim();
    // valuation-zero part first, greedily in increasing order
    unsigned spanned = 1;
    for (unsigned x = 0; x < n; ++x) {
        if (!((mask_ >> x) & 1U) || (x & 1U) || ((spanned >> x) & 1U)) continue;
        basis_.push_back(SquareClass{v, x});
        spanned = closure(n, [&] {
            std::vector<unsigned> g;
            for (auto& b : basis_) g.push_back(b.bits);
            return g;
        }());
    }
    if (v.is_infinite()) {
        // the single coordinate is the sign; treat it like a valuation
        basis_.clear();
        if (mask_ & 2U) basis_.push_back(SquareClass{v, 1});
        return;
    }
    for (unsigned x = 1; x < n; x += 2) {
        if ((mask_ >> x) & 1U) {
            basis_.push_back(SquareClass{v, x});
            break;
        }
    }
}

LocalSubgroup LocalSubgroup::trivial(Place v) { return LocalSubgroup(v, 1); }

LocalSubgroup LocalSubgroup::full(Place v) { return LocalSubgroup(v, (1U << (1U << v.ambient_dim())) - 1U); }

LocalSubgroup LocalSubgroup::units(Place v) {
    if (v.is_infinite()) return trivial(v);
    unsigned mask = 0;
    for (unsigned x = 0; x < (1U << v.ambient_dim()); x += 2) mask |= 1U << x;
    return LocalSubgroup(v, mask);
}

LocalSubgroup LocalSubgroup::span(Place v, const std::vector<SquareClass>& gens) {
    std::vector<unsigned> g;
    for (const auto& c : gens) {
        if (!(c.place == v)) throw std::invalid_argument("LocalSubgroup::span: place mismatch");
        g.push_back(c.bits);
    }
    return LocalSubgroup(v, closure(1U << v.ambient_dim(), g));
}

LocalSubgroup LocalSubgroup::from_mask(Place v, unsigned mask) {
    const unsigned n = 1U << v.ambient_dim();
    if (!(mask & 1U)) throw std::invalid_argument("LocalSubgroup::from_mask: identity missing");
    for (unsigned x = 0; x < n; ++x)
        for (unsigned y = 0; y < n; ++y)
            if (((mask >> x) & 1U) && ((mask >> y) & 1U) && !((mask >> (x ^ y)) & 1U))
                throw std::invalid_argument("LocalSubgroup::from_mask: not closed");
    return LocalSubgroup(v, mask);
}

std::vector<SquareClass> LocalSubgroup::elements() const {
    std::vector<SquareClass> out;
    for (unsigned x = 0; x < (1U << place_.ambient_dim()); ++x)
        if ((mask_ >> x) & 1U) out.push_back(SquareClass{place_, x});
    return out;
}

LocalSubgroup LocalSubgroup::annihilator() const {
    unsigned mask = 0;
    for (const auto& y : all_classes(place_)) {
        bool ok = true;
        for (const auto& b : basis_)
            if (arith::hilbert_additive(b, y)) ok = false;
        if (ok) mask |= 1U << y.bits;
    }
    return LocalSubgroup(place_, mask);
}

bool LocalSubgroup::orthogonal_to(const LocalSubgroup& other) const {
    for (const auto& a : basis_)
        for (const auto& b : other.basis_)
            if (arith::hilbert_additive(a, b)) return false;
    return true;
}

std::string LocalSubgroup::to_string() const {
    std::string s = "<";
    for (std::size_t i = 0; i < basis_.size(); ++i) {
        if (i) s += ", ";
        s += std::to_string(arith::representative(basis_[i]));
    }
    return s + ">@" + place_.to_string();
}

}  // namespace selmer
