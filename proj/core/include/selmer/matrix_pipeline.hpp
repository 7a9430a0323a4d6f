#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "selmer/bit_matrix.hpp"
#include "selmer/curve.hpp"
#include "selmer/symbols.hpp"

namespace selmer {

/// Local characters used as columns.
enum class Character : std::uint8_t {
    Ord = 0,       // valuation parity (sign at infinity)
    Chi = 1,       // Legendre symbol of the unit part (odd p), or chi_2 with kernel {1, 5} at 2
    ChiPrime = 2,  // chi_2' with kernel {1, 3} at 2
};

enum class LineKind : std::uint8_t { URow = 0, WRow = 1, Column = 2 };

/// A site is a bad place (index into ctx.bad_places()) or a twisted prime p_i.
struct Site {
    bool twisted = false;
    std::uint32_t index = 0;
    friend auto operator<=>(const Site&, const Site&) = default;
};

/// Decoded form of the 64-bit labels carried by matrix rows and columns.
///   URow:   generator at `site` (-1 for the real place, otherwise the prime of the site)
///   WRow:   basis element `basis` of the local image at `site`
///   Column: character `character` at `site`
struct LineLabel {
    LineKind kind = LineKind::URow;
    Site site;
    Character character = Character::Ord;
    std::uint8_t basis = 0;
    bool passenger = false;

    [[nodiscard]] std::uint64_t encode() const noexcept;
    static LineLabel decode(std::uint64_t bits) noexcept;
    [[nodiscard]] std::string to_string(const CurveContext& ctx) const;
    friend bool operator==(const LineLabel&, const LineLabel&) = default;
};

/// Value of character `c` on a local class.
unsigned character_value(Character c, const arith::SquareClass& x);
/// Characters at a place in column order.
std::vector<Character> characters_at(arith::Place v);

/// Coefficients of x -> (x, delta')_v in the characters at bad place v.
std::vector<unsigned> hilbert_character_expansion(const CurveContext& ctx, arith::Place v);

/// Real place if delta < 0, else the smallest prime with odd valuation in delta.
arith::Place pivot_place(const CurveContext& ctx);

struct SurgeryError : std::logic_error {
    using std::logic_error::logic_error;
};

struct SurgeryStep {
    std::string action;
    std::uint64_t row_label = 0;
    std::uint64_t col_label = 0;
    std::size_t nullity_after = 0;
};

struct SurgeryOptions {
    /// Recompute the left nullity after every step and throw SurgeryError on change.
    bool check = true;
    /// Keep a log of steps.
    bool trace = false;
};

struct SurgeryResult {
    f2::BitMatrix mhat;
    std::vector<SurgeryStep> steps;
    std::uint64_t dependent_column = 0;
};

/// Nullity-preserving reduction of a matrix built by build_M (or of its
/// bad-place part with passenger rows). Rows flagged passenger take part in
/// row additions but are never pivots and are ignored by the nullity checks.
SurgeryResult surgery(f2::BitMatrix m, const CurveContext& ctx, const SurgeryOptions& opt = {});

/// Which of the bad-place rows/columns the reduced matrix keeps, and how
/// twisted rows transform. Depends only on the classes of d at the bad places.
struct OrigReduction {
    f2::BitMatrix a11;                       // surviving bad-place rows x surviving bad-place columns
    std::vector<std::uint64_t> psi_orig;     // labels of all bad-place columns of M (before surgery)
    std::vector<f2::BitVec> transform;       // image of each unit vector of psi_orig, over a11's columns
    std::uint64_t dependent_column = 0;
};

/// Build-and-reduce pipeline for one curve. Copies share a memo of OrigReduction
/// keyed by the bad-place classes of d; the memo is internally locked.
class Pipeline {
public:
    explicit Pipeline(const CurveContext& ctx);
    explicit Pipeline(CurveContext&&) = delete;  // keeps a pointer to the context

    [[nodiscard]] const CurveContext& curve() const noexcept { return *ctx_; }

    /// Full presentation matrix: rows B_U then B_W, columns all characters at T_d.
    [[nodiscard]] f2::BitMatrix build_M(const SymbolOracle& oracle) const;
    [[nodiscard]] f2::BitMatrix build_M(const TwistData& td, const SymbolOracle& oracle) const;

    /// Right nullvector of build_M from the expansion of (x, delta')_v.
    [[nodiscard]] f2::BitVec right_nullvector(const f2::BitMatrix& m, const TwistData& td) const;

    /// Reduced matrix without running surgery on the twisted part.
    [[nodiscard]] f2::BitMatrix build_Mhat_direct(const SymbolOracle& oracle, bool check = false) const;
    [[nodiscard]] f2::BitMatrix build_Mhat_direct(const TwistData& td, const SymbolOracle& oracle,
                                                  bool check = false) const;

    /// dim Sel_phi = left nullity of the reduced matrix + 1.
    [[nodiscard]] unsigned selmer_rank(const SymbolOracle& oracle) const;
    [[nodiscard]] unsigned selmer_rank(arith::i64 d) const;

    /// The bad-place block and the passenger transform for these classes of d.
    [[nodiscard]] std::shared_ptr<const OrigReduction> orig_reduction(const std::vector<arith::SquareClass>& d_classes,
                                                                      bool check = true) const;

    /// Rows: bad-place rows, then type 1, then type 3 (index order). Columns:
    /// bad-place columns, then type 1, then type 2. Within the bad-place part
    /// lines keep the order of build_M.
    [[nodiscard]] f2::BitMatrix canonical_layout(const f2::BitMatrix& m, const TwistData& td) const;

private:
    struct Memo;
    const CurveContext* ctx_;
    std::shared_ptr<Memo> memo_;
};

}  // namespace selmer
