#include "selmer/symbols.hpp"

#include <algorithm>
#include <numeric>

#include "json.hpp"

namespace selmer {

using arith::i64;
using arith::Place;
using arith::SquareClass;
using arith::u64;
using json = nlohmann::json;

unsigned generator_symbol(i64 g, u64 r) {
    if (g == -1) return arith::eps(r);
    if (g == 2) return arith::omega(r);
    const u64 l = static_cast<u64>(g);
    const unsigned base = arith::jacobi(static_cast<i64>(r % l), l) == -1 ? 1U : 0U;
    return base ^ (arith::eps(r) & arith::eps(l));
}

SquareClass residue_class(Place v, u64 r) {
    switch (v.kind()) {
        case Place::Kind::Infinity: return SquareClass{v, 0};
        case Place::Kind::Two: return SquareClass::from_parts(v, 0, static_cast<i64>(r % 8));
        case Place::Kind::Odd: return SquareClass::from_parts(v, 0, static_cast<i64>(r % v.p()));
    }
    return SquareClass{v, 0};
}

ArithmeticOracle::ArithmeticOracle(const CurveContext& ctx, i64 d) : ctx_(&ctx), D_(ctx.D()) {
    const auto f = arith::factor_squarefree(d);
    sign_ = f.sign;
    for (u64 p : f.primes) {
        if (ctx.is_bad_prime(p))
            throw std::invalid_argument("ArithmeticOracle: d = " + std::to_string(d) + " shares the bad prime " +
                                        std::to_string(p));
        primes_.push_back(p);
        types_.push_back(ctx.classify_prime(p));
    }
}

unsigned ArithmeticOracle::pair_symbol(std::size_t i, std::size_t j) const {
    if (i == j) throw std::invalid_argument("pair_symbol: i == j");
    return *arith::legendre_additive(static_cast<i64>(primes_.at(i)), primes_.at(j));
}

unsigned ArithmeticOracle::lambda(std::size_t i) const {
    if (types_.at(i) != PrimeType::Type1) throw MissingSymbol("lambda: prime " + std::to_string(i) + " is not type 1");
    return ctx_->lambda(primes_[i]);
}

unsigned ArithmeticOracle::type3_twist_bit(std::size_t i) const {
    if (types_.at(i) != PrimeType::Type3) return 0;
    return ctx_->lambda(primes_[i]);
}

SymbolTable::SymbolTable(int sign, std::vector<u64> residues)
    : sign_(sign < 0 ? -1 : 1), residues_(std::move(residues)), pairs_(residues_.size() * residues_.size(), 0) {}

SymbolTable SymbolTable::record(const CurveContext& ctx, const SymbolOracle& src) {
    std::vector<u64> res;
    for (std::size_t i = 0; i < src.size(); ++i) res.push_back(src.residue(i));
    SymbolTable t(src.sign(), res);
    for (std::size_t i = 0; i < src.size(); ++i) {
        for (std::size_t j = 0; j < src.size(); ++j)
            if (i != j) t.set_pair_symbol(i, j, src.pair_symbol(i, j));
        const PrimeType ty = ctx.classify_residue(res[i]);
        if (ty == PrimeType::Type1) t.set_lambda(i, src.lambda(i));
        if (ty == PrimeType::Type3) t.set_type3_twist_bit(i, src.type3_twist_bit(i));
    }
    return t;
}

unsigned SymbolTable::pair_symbol(std::size_t i, std::size_t j) const {
    const std::size_t n = residues_.size();
    if (i >= n || j >= n || i == j) throw MissingSymbol("pair_symbol: bad index pair");
    return pairs_[i * n + j];
}

unsigned SymbolTable::lambda(std::size_t i) const {
    auto it = lambda_.find(i);
    if (it == lambda_.end()) throw MissingSymbol("lambda: no value for index " + std::to_string(i));
    return it->second;
}

unsigned SymbolTable::type3_twist_bit(std::size_t i) const {
    auto it = type3_.find(i);
    return it == type3_.end() ? 0U : it->second;
}

void SymbolTable::set_pair_symbol(std::size_t i, std::size_t j, unsigned bit) {
    const std::size_t n = residues_.size();
    if (i >= n || j >= n || i == j) throw std::out_of_range("set_pair_symbol: bad index pair");
    pairs_[i * n + j] = static_cast<unsigned char>(bit & 1U);
}

void SymbolTable::flip_pair(std::size_t i, std::size_t j) {
    set_pair_symbol(i, j, pair_symbol(i, j) ^ 1U);
    set_pair_symbol(j, i, pair_symbol(j, i) ^ 1U);
}

void SymbolTable::flip_lambda(std::size_t i) { set_lambda(i, lambda(i) ^ 1U); }

bool SymbolTable::reciprocity_holds() const {
    const std::size_t n = residues_.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if ((pair_symbol(i, j) ^ pair_symbol(j, i)) != (arith::eps(residues_[i]) & arith::eps(residues_[j])))
                return false;
    return true;
}

std::string SymbolTable::to_json(const CurveContext& ctx) const {
    json j;
    j["version"] = kVersion;
    j["sign"] = sign_;
    j["D"] = ctx.D();
    j["residues_mod_D"] = residues_;
    json types = json::array();
    for (u64 r : residues_) types.push_back(type_index(ctx.classify_residue(r)));
    j["types"] = types;
    json pairs = json::object();
    for (std::size_t a = 0; a < residues_.size(); ++a)
        for (std::size_t b = 0; b < residues_.size(); ++b)
            if (a != b) pairs[std::to_string(a) + "," + std::to_string(b)] = pair_symbol(a, b);
    j["pair_symbols"] = pairs;
    json lam = json::object();
    for (auto [i, bit] : lambda_) lam[std::to_string(i)] = bit;
    j["lambda"] = lam;
    json t3 = json::object();
    for (auto [i, bit] : type3_) t3[std::to_string(i)] = bit;
    j["type3_bits"] = t3;
    json classes = json::object();
    const TwistData td = analyze(ctx, *this);
    for (std::size_t k = 0; k < td.d_classes.size(); ++k)
        classes[ctx.bad_places()[k].to_string()] = arith::representative(td.d_classes[k]);
    j["d_local_classes"] = classes;
    return j.dump(2);
}

SymbolTable SymbolTable::from_json(const CurveContext& ctx, const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("symbol transcript: ") + e.what());
    }
    try {
        if (j.at("version").get<int>() != kVersion) throw std::invalid_argument("symbol transcript: unsupported version");
        if (j.contains("D") && j.at("D").get<u64>() != ctx.D())
            throw std::invalid_argument("symbol transcript: modulus does not match the curve");
        SymbolTable t(j.at("sign").get<int>(), j.at("residues_mod_D").get<std::vector<u64>>());
        const std::size_t n = t.size();
        for (auto& [key, bit] : j.at("pair_symbols").items()) {
            const auto comma = key.find(',');
            if (comma == std::string::npos) throw std::invalid_argument("symbol transcript: bad pair key " + key);
            t.set_pair_symbol(std::stoul(key.substr(0, comma)), std::stoul(key.substr(comma + 1)), bit.get<unsigned>());
        }
        for (auto& [key, bit] : j.at("lambda").items()) {
            const std::size_t i = std::stoul(key);
            if (i >= n) throw std::invalid_argument("symbol transcript: lambda index out of range");
            t.set_lambda(i, bit.get<unsigned>());
        }
        if (j.contains("type3_bits"))
            for (auto& [key, bit] : j.at("type3_bits").items()) t.set_type3_twist_bit(std::stoul(key), bit.get<unsigned>());
        if (j.contains("types")) {
            auto types = j.at("types").get<std::vector<int>>();
            if (types.size() != n) throw std::invalid_argument("symbol transcript: types length mismatch");
            for (std::size_t i = 0; i < n; ++i)
                if (types[i] != type_index(ctx.classify_residue(t.residue(i))))
                    throw std::invalid_argument("symbol transcript: type disagrees with residue");
        }
        return t;
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("symbol transcript: ") + e.what());
    }
}

TwistData analyze(const CurveContext& ctx, const SymbolOracle& oracle) {
    TwistData td;
    td.sign = oracle.sign();
    td.n = oracle.size();
    for (std::size_t i = 0; i < td.n; ++i) {
        const u64 r = oracle.residue(i);
        if (std::gcd(r, ctx.D()) != 1) throw std::invalid_argument("analyze: residue not prime to D");
        td.residues.push_back(r);
        td.types.push_back(ctx.classify_residue(r));
        ++td.counts[type_index(td.types.back())];
    }
    for (const Place& v : ctx.bad_places()) {
        SquareClass c = arith::square_class(td.sign, v);
        for (u64 r : td.residues) c = c + residue_class(v, r);
        td.d_classes.push_back(c);
    }
    for (std::size_t i = 0; i < td.n; ++i) {
        unsigned s = td.sign < 0 ? arith::eps(td.residues[i]) : 0U;
        for (std::size_t j = 0; j < td.n; ++j)
            if (j != i) s ^= oracle.pair_symbol(j, i);
        td.d_cofactor_symbol.push_back(s);
    }
    td.c_d = ctx.c_from_classes(td.d_classes);
    return td;
}

}  // namespace selmer
