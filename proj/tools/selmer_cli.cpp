// selmer: command line front end for the twist sweeps and simulations.
//
// Exit codes: 0 ok, 1 a verification failed, 2 bad input or rejected curve.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "selmer/cl_constants.hpp"
#include "selmer/curve.hpp"
#include "selmer/harness.hpp"
#include "selmer/matrix_pipeline.hpp"
#include "selmer/model_p.hpp"
#include "selmer/parallel.hpp"
#include "selmer/report_io.hpp"
#include "selmer/selmer_oracle.hpp"

using namespace selmer;

namespace {

constexpr int kOk = 0;
constexpr int kVerifyFailed = 1;
constexpr int kBadInput = 2;

struct BadInput : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

std::pair<arith::i64, arith::i64> parse_curve(const std::string& s) {
    const auto comma = s.find(',');
    if (comma == std::string::npos) throw BadInput("--curve expects A,B");
    try {
        std::size_t used = 0;
        const long long a = std::stoll(s.substr(0, comma), &used);
        if (used != comma) throw BadInput("--curve: bad A");
        const std::string rest = s.substr(comma + 1);
        const long long b = std::stoll(rest, &used);
        if (used != rest.size()) throw BadInput("--curve: bad B");
        return {a, b};
    } catch (const std::logic_error&) {
        throw BadInput("--curve expects two integers A,B, got '" + s + "'");
    }
}

void emit(const std::string& text, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw BadInput("cannot write " + path);
    out << text;
}

// key=value lines; '#' starts a comment. Each key becomes --key value unless
// the command line already has --key; "true"/"false" toggle a flag.
std::vector<std::string> apply_config(std::vector<std::string> args) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            path = args[i + 1];
            args.erase(args.begin() + static_cast<long>(i), args.begin() + static_cast<long>(i) + 2);
            break;
        }
        if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
            args.erase(args.begin() + static_cast<long>(i));
            break;
        }
    }
    if (path.empty()) return args;

    std::ifstream in(path);
    if (!in) throw BadInput("cannot read config file " + path);
    auto given = [&](const std::string& key) {
        for (const auto& a : args)
            if (a == "--" + key || a.rfind("--" + key + "=", 0) == 0) return true;
        return false;
    };
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw BadInput(path + ":" + std::to_string(lineno) + ": expected key=value");
        const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        if (given(key)) continue;
        if (value == "true") {
            args.push_back("--" + key);
        } else if (value != "false") {
            args.push_back("--" + key + "=" + value);
        }
    }
    return args;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Selmer ranks of quadratic twists by F2 matrices"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Help for every subcommand");
    app.footer("Any flag may also come from --config FILE (key=value lines); command line flags win.\n"
               "SELMER_WORKERS sets the number of worker threads.");

    std::string curve_s = "1,-1", out_path, csv_dir, mode_s = "coprime", path_s = "both";
    int u = 0, r_max = 12;
    std::uint64_t p = 0, X = 2000, seed = 1, trials = 100000;
    std::int64_t d = 1;
    std::size_t n = 60, rows = 200, cols = 200;
    std::vector<std::uint64_t> primes;
    std::vector<int> us;
    bool records = false;
    std::string stratum = "all";

    auto* constants = app.add_subcommand("constants", "Table of alpha(r,u), or alpha'(p,u,r) with --p");
    constants->add_option("--u", u, "Tamagawa exponent u")->required();
    constants->add_option("--rmax", r_max, "Largest r")->required();
    constants->add_option("--p", p, "Prime for the u-probabilities (omit for alpha)");
    constants->add_option("--out", out_path, "Output file (default stdout)");

    auto* classify = app.add_subcommand("classify", "Curve data and prime types");
    classify->add_option("--curve", curve_s, "A,B")->required();
    classify->add_option("--primes", primes, "Primes to classify")->delimiter(',');

    auto* rank = app.add_subcommand("rank", "Selmer ranks of one twist");
    rank->add_option("--curve", curve_s, "A,B")->required();
    rank->add_option("--d", d, "Squarefree twist")->required();
    rank->add_option("--path", path_s, "matrix|oracle|both")->check(CLI::IsMember({"matrix", "oracle", "both"}));

    auto* sweep = app.add_subcommand("sweep", "Every squarefree twist with |d| <= X");
    sweep->add_option("--curve", curve_s, "A,B")->required();
    sweep->add_option("--X", X, "Bound on |d|")->required()->check(CLI::PositiveNumber);
    sweep->add_option("--mode", mode_s, "coprime|full")->check(CLI::IsMember({"coprime", "full"}));
    sweep->add_option("--out", out_path, "JSON report (default stdout)");
    sweep->add_option("--csv", csv_dir, "Directory for per-u CSV histograms");
    sweep->add_option("--stratum", stratum, "Stratum for the CSV files")
        ->check(CLI::IsMember({"all", "positive", "s_double_prime", "s_prime"}));
    sweep->add_flag("--records", records, "Include one entry per twist in the JSON");

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo over random symbol data");
    simulate->add_option("--curve", curve_s, "A,B")->required();
    simulate->add_option("--n", n, "Number of good primes")->required();
    simulate->add_option("--trials", trials, "Number of draws")->required();
    simulate->add_option("--u", us, "Exponents to report (default -2..2)")->delimiter(',');
    simulate->add_option("--seed", seed, "Seed");
    simulate->add_option("--out", out_path, "JSON report (default stdout)");

    auto* randmat = app.add_subcommand("randmat", "Nullity histogram of uniform F2 matrices");
    randmat->add_option("--rows", rows, "Rows")->required();
    randmat->add_option("--cols", cols, "Columns")->required();
    randmat->add_option("--trials", trials, "Number of matrices")->required();
    randmat->add_option("--seed", seed, "Seed");
    randmat->add_option("--out", out_path, "JSON report (default stdout)");

    auto* verify = app.add_subcommand("verify", "Cross-checks on every coprime twist with |d| <= X");
    verify->add_option("--curve", curve_s, "A,B")->required();
    verify->add_option("--X", X, "Bound on |d|")->required()->check(CLI::PositiveNumber);
    verify->add_option("--out", out_path, "JSON summary");

    std::vector<std::string> args;
    try {
        args = apply_config(std::vector<std::string>(argv + 1, argv + argc));
    } catch (const BadInput& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kBadInput;
    }
    std::reverse(args.begin(), args.end());  // CLI11 consumes a reversed vector
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kBadInput;
    }

    const unsigned workers = default_workers();
    try {
        if (*constants) {
            emit(report::constants_json(u, r_max, p), out_path);
            return kOk;
        }

        if (*randmat) {
            const auto t0 = std::chrono::steady_clock::now();
            const auto h = f2::nullity_histogram(rows, cols, trials, seed, workers);
            std::fprintf(stderr, "randmat: %.2fs\n", seconds_since(t0));
            emit(report::randmat_json(h, seed), out_path);
            return kOk;
        }

        const auto [A, B] = parse_curve(curve_s);
        const CurveContext ctx(A, B);

        if (*classify) {
            std::printf("curve %s\n", ctx.to_string().c_str());
            std::printf("delta %lld delta' %lld D %llu\n", static_cast<long long>(ctx.delta()),
                        static_cast<long long>(ctx.delta_prime()), static_cast<unsigned long long>(ctx.D()));
            std::printf("bad primes");
            for (auto q : ctx.bad_primes()) std::printf(" %llu", static_cast<unsigned long long>(q));
            std::printf("\n");
            for (auto q : primes) {
                if (!arith::is_prime(q)) throw BadInput(std::to_string(q) + " is not prime");
                if (ctx.is_bad_prime(q)) {
                    std::printf("%llu bad\n", static_cast<unsigned long long>(q));
                    continue;
                }
                const auto t = ctx.classify_prime(q);
                std::printf("%llu type %d", static_cast<unsigned long long>(q), type_index(t));
                if (t == PrimeType::Type1) std::printf(" lambda %u", ctx.lambda(q));
                std::printf("\n");
            }
            return kOk;
        }

        if (*rank) {
            if (d == 0 || arith::squarefree_kernel(d) != d) throw BadInput("--d must be a nonzero squarefree integer");
            std::optional<unsigned> via_matrix;
            std::optional<SelmerResult> via_oracle;
            if (path_s != "oracle") {
                for (auto q : arith::prime_divisors(static_cast<arith::u64>(d < 0 ? -d : d)))
                    if (ctx.is_bad_prime(q))
                        throw BadInput("matrix path needs d prime to the bad primes; use --path oracle");
                via_matrix = Pipeline(ctx).selmer_rank(d);
            }
            if (path_s != "matrix") via_oracle = brute_force_selmer(ctx, d);
            std::printf("d %lld\n", static_cast<long long>(d));
            if (via_matrix) std::printf("phi (matrix) %u\n", *via_matrix);
            if (via_oracle) {
                std::printf("phi (oracle) %u\nphihat (oracle) %u\nu %d\n", via_oracle->phi.dim, via_oracle->phihat.dim,
                            via_oracle->u());
                std::printf("basis");
                for (const auto& g : via_oracle->phi.basis) std::printf(" %s", g.to_string().c_str());
                std::printf("\n");
            }
            if (via_matrix && via_oracle && *via_matrix != via_oracle->phi.dim) {
                std::fprintf(stderr, "MISMATCH at d=%lld\n", static_cast<long long>(d));
                return kVerifyFailed;
            }
            return kOk;
        }

        if (*sweep) {
            const auto t0 = std::chrono::steady_clock::now();
            const auto rep = harness::sweep(ctx, X, harness::parse_mode(mode_s), workers);
            std::fprintf(stderr, "sweep: %zu twists in %.2fs (%u workers)\n", rep.records.size(), seconds_since(t0),
                         workers);
            emit(report::sweep_json(rep, records), out_path);
            if (!csv_dir.empty())
                for (const auto& f : report::write_sweep_csv(rep, csv_dir, stratum))
                    std::fprintf(stderr, "wrote %s\n", f.string().c_str());
            if (rep.matrix_mismatches || rep.tamagawa_mismatches || rep.m_twist_mismatches || rep.support_violations) {
                std::fprintf(stderr, "sweep: consistency failures (matrix %llu, tamagawa %llu, m-twist %llu, support %llu)\n",
                             static_cast<unsigned long long>(rep.matrix_mismatches),
                             static_cast<unsigned long long>(rep.tamagawa_mismatches),
                             static_cast<unsigned long long>(rep.m_twist_mismatches),
                             static_cast<unsigned long long>(rep.support_violations));
                return kVerifyFailed;
            }
            return kOk;
        }

        if (*simulate) {
            if (us.empty()) us = {-2, -1, 0, 1, 2};
            const auto t0 = std::chrono::steady_clock::now();
            const Pipeline pipeline(ctx);
            const auto est = model::estimate_alpha_n(pipeline, n, trials, seed, workers);
            std::fprintf(stderr, "simulate: %llu draws in %.2fs (%u workers)\n", static_cast<unsigned long long>(trials),
                         seconds_since(t0), workers);
            emit(report::simulate_json(ctx, est, us), out_path);
            return kOk;
        }

        if (*verify) {
            const auto t0 = std::chrono::steady_clock::now();
            const auto sum = harness::verify(ctx, X, workers);
            std::fprintf(stderr, "verify: %.2fs\n", seconds_since(t0));
            for (const auto& c : sum.checks) {
                std::printf("%-26s %s  tested %llu failures %llu", c.name.c_str(), c.passed() ? "PASS" : "FAIL",
                            static_cast<unsigned long long>(c.tested), static_cast<unsigned long long>(c.failures));
                if (c.first_failure) std::printf("  first d=%lld", static_cast<long long>(*c.first_failure));
                if (!c.detail.empty()) std::printf("  (%s)", c.detail.c_str());
                std::printf("\n");
            }
            if (!out_path.empty()) emit(report::verify_json(sum), out_path);
            return sum.passed() ? kOk : kVerifyFailed;
        }
    } catch (const BadInput& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kBadInput;
    } catch (const CurveRejected& e) {
        std::cerr << "curve rejected: " << e.what() << "\n";
        return kBadInput;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kBadInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kVerifyFailed;
    }

    return kOk;
}
