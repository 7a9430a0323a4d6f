#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "selmer/arithmetic.hpp"
#include "selmer/curve.hpp"

namespace selmer {

struct MissingSymbol : std::out_of_range {
    using std::out_of_range::out_of_range;
};

/// Everything the matrix construction needs to know about d = sign * p_1 ... p_n
/// (good primes p_i), without access to the primes themselves.
class SymbolOracle {
public:
    virtual ~SymbolOracle() = default;

    [[nodiscard]] virtual int sign() const = 0;
    [[nodiscard]] virtual std::size_t size() const = 0;
    /// p_i mod D.
    [[nodiscard]] virtual arith::u64 residue(std::size_t i) const = 0;
    /// Additive Legendre symbol (p_i / p_j), i != j.
    [[nodiscard]] virtual unsigned pair_symbol(std::size_t i, std::size_t j) const = 0;
    /// Additive Legendre symbol of A + 2 sqrt(B) at p_i; defined on type 1 primes only.
    [[nodiscard]] virtual unsigned lambda(std::size_t i) const = 0;
    /// Same symbol at a type 3 prime for a fixed choice of root. It only picks
    /// one of two bases of the full local group, so the reduced matrix does not see it.
    [[nodiscard]] virtual unsigned type3_twist_bit(std::size_t /*i*/) const { return 0; }
};

/// Symbols of an actual squarefree integer d prime to the bad primes of the curve.
class ArithmeticOracle final : public SymbolOracle {
public:
    /// Throws std::invalid_argument when d shares a prime with the bad primes.
    ArithmeticOracle(const CurveContext& ctx, arith::i64 d);

    [[nodiscard]] int sign() const override { return sign_; }
    [[nodiscard]] std::size_t size() const override { return primes_.size(); }
    [[nodiscard]] arith::u64 residue(std::size_t i) const override { return primes_.at(i) % D_; }
    [[nodiscard]] unsigned pair_symbol(std::size_t i, std::size_t j) const override;
    [[nodiscard]] unsigned lambda(std::size_t i) const override;
    [[nodiscard]] unsigned type3_twist_bit(std::size_t i) const override;

    [[nodiscard]] const std::vector<arith::u64>& primes() const noexcept { return primes_; }

private:
    const CurveContext* ctx_;
    int sign_;
    arith::u64 D_;
    std::vector<arith::u64> primes_;
    std::vector<PrimeType> types_;
};

/// Stored symbol data: a transcript of another oracle, a sampled draw, or a
/// hand-edited table. Serialises to a versioned JSON object.
class SymbolTable final : public SymbolOracle {
public:
    static constexpr int kVersion = 1;

    SymbolTable() = default;
    SymbolTable(int sign, std::vector<arith::u64> residues);

    /// Copies every symbol `src` exposes; lambda only where the type is 1.
    static SymbolTable record(const CurveContext& ctx, const SymbolOracle& src);

    [[nodiscard]] int sign() const override { return sign_; }
    [[nodiscard]] std::size_t size() const override { return residues_.size(); }
    [[nodiscard]] arith::u64 residue(std::size_t i) const override { return residues_.at(i); }
    [[nodiscard]] unsigned pair_symbol(std::size_t i, std::size_t j) const override;
    [[nodiscard]] unsigned lambda(std::size_t i) const override;
    [[nodiscard]] unsigned type3_twist_bit(std::size_t i) const override;

    void set_sign(int s) { sign_ = s < 0 ? -1 : 1; }
    void set_pair_symbol(std::size_t i, std::size_t j, unsigned bit);
    void set_lambda(std::size_t i, unsigned bit) { lambda_[i] = bit & 1U; }
    void set_type3_twist_bit(std::size_t i, unsigned bit) { type3_[i] = bit & 1U; }

    /// Fault injection: flip (p_i/p_j) and (p_j/p_i) together, keeping reciprocity.
    void flip_pair(std::size_t i, std::size_t j);
    void flip_lambda(std::size_t i);

    /// True iff every pair satisfies quadratic reciprocity given the residues.
    [[nodiscard]] bool reciprocity_holds() const;

    /// JSON text with keys version, sign, D, types, residues_mod_D, pair_symbols
    /// ("i,j" -> bit for i != j), lambda (index -> bit), type3_bits, d_local_classes.
    [[nodiscard]] std::string to_json(const CurveContext& ctx) const;
    /// Inverse of to_json; throws std::invalid_argument on malformed input or a
    /// version / modulus mismatch.
    static SymbolTable from_json(const CurveContext& ctx, const std::string& text);

private:
    int sign_ = 1;
    std::vector<arith::u64> residues_;
    std::vector<unsigned char> pairs_;  // row-major n x n
    std::map<std::size_t, unsigned> lambda_;
    std::map<std::size_t, unsigned> type3_;
};

/// Quantities derived from a curve and a symbol oracle.
struct TwistData {
    int sign = 1;
    std::size_t n = 0;
    std::vector<arith::u64> residues;
    std::vector<PrimeType> types;
    /// Class of d at each bad place, ordered as ctx.bad_places().
    std::vector<arith::SquareClass> d_classes;
    /// Additive Legendre symbol of d / p_i at p_i.
    std::vector<unsigned> d_cofactor_symbol;
    int counts[5] = {0, 0, 0, 0, 0};  // counts[t] for type t = 1..4

    [[nodiscard]] int c() const noexcept { return c_d; }
    [[nodiscard]] int u() const noexcept { return c_d + counts[3] - counts[2]; }
    int c_d = 0;
};

TwistData analyze(const CurveContext& ctx, const SymbolOracle& oracle);

/// Additive Legendre symbol (g / p) of a bad-place generator g (-1 or a bad prime)
/// at a good prime p with the given residue mod D.
unsigned generator_symbol(arith::i64 g, arith::u64 residue_mod_D);

/// Class at bad place v of a good prime with the given residue mod D.
arith::SquareClass residue_class(arith::Place v, arith::u64 residue_mod_D);

}  // namespace selmer
