#pragma once

#include <stdexcept>

#include "selmer/arithmetic.hpp"
#include "selmer/local_subgroup.hpp"

namespace selmer::local {

/// Local images of the two Kummer maps attached to the 2-isogeny
///   E: y^2 = x(x^2 + a x + b)  ->  E': Y^2 = X(X^2 - 2a X + a^2 - 4b)
/// and its dual, at one place.
///
/// `image` is the set of classes of X over points (X, Y) of E'(Q_v) and
/// `dual` the same for E' -> E. The two are exact annihilators of each other
/// under the Hilbert pairing; the search below uses that as its stopping rule.
struct KummerPair {
    LocalSubgroup image;
    LocalSubgroup dual;
};

struct SearchFailed : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Exact at the real place.
LocalSubgroup real_image(arith::i64 a, arith::i64 b);

/// Classes of X found by scanning X = p^k m over units m < p^digits and a
/// window of k. Every class returned is in the true image; the search may
/// miss classes when `digits` is too small.
LocalSubgroup search_image(arith::i64 a, arith::i64 b, arith::Place v, unsigned digits);

/// Both images at v, with the search depth raised until the found subgroups
/// are orthogonal and their dimensions add up to the ambient dimension.
/// Throws SearchFailed if that does not happen within the depth cap.
KummerPair kummer_pair(arith::i64 a, arith::i64 b, arith::Place v);

}  // namespace selmer::local
