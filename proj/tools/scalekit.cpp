// scalekit <command> --config <path> [--out <prefix>] [--threads N]
//
// Exit status: 0 ok, 2 config/validation, 3 inadmissible h, 4 range, 1 anything else.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "scalekit/applications.hpp"
#include "scalekit/config.hpp"
#include "scalekit/convergence.hpp"

using namespace scalekit;

namespace {

class Csv {
public:
    using Cell = std::variant<double, long long, std::string>;

    explicit Csv(const std::vector<std::string>& header) {
        buf_ = "# schema-version: " + std::to_string(kSchemaVersion) + "\n";
        std::vector<Cell> cells(header.begin(), header.end());
        row(cells);
    }

    void row(const std::vector<Cell>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) buf_ += ',';
            std::visit([this](const auto& v) { put(v); }, cells[i]);
        }
        buf_ += '\n';
    }

    const std::string& str() const { return buf_; }

private:
    void put(double v) {
        char tmp[40];
        std::snprintf(tmp, sizeof tmp, "%.17g", v);
        buf_ += tmp;
    }
    void put(long long v) { buf_ += std::to_string(v); }
    void put(const std::string& s) {
        if (s.find_first_of(",\"\n") == std::string::npos) {
            buf_ += s;
            return;
        }
        buf_ += '"';
        for (char c : s) {
            if (c == '"') buf_ += '"';
            buf_ += c;
        }
        buf_ += '"';
    }

    std::string buf_;
};

// Runs fn(i) for i < count on up to `threads` workers; results keep index order.
template <typename T, typename F>
std::vector<T> parallel_map(std::size_t count, int threads, F fn) {
    std::vector<std::optional<T>> out(count);
    std::vector<std::exception_ptr> errs(count);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                out[i].emplace(fn(i));
            } catch (...) {
                errs[i] = std::current_exception();
            }
        }
    };
    const int n = std::clamp<int>(threads, 1, static_cast<int>(std::max<std::size_t>(count, 1)));
    if (n == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (int k = 0; k < n; ++k) pool.emplace_back(work);
    }
    for (auto& e : errs) {
        if (e) std::rethrow_exception(e);
    }
    std::vector<T> res;
    res.reserve(count);
    for (auto& o : out) res.push_back(std::move(*o));
    return res;
}

struct Output {
    std::string suffix;
    Csv csv;
};

RecursionOptions recursion_options(const RunConfig& c) {
    RecursionOptions r;
    r.compensated = c.compensated;
    return r;
}

void warn_half_grid(const ChainModel& chain) {
    for (double loc : chain.half_grid_atoms) {
        std::cerr << "scalekit: warning: atom at " << loc << " sits on a bin boundary at h = " << chain.h
                  << "; it is assigned to the bin nearer zero\n";
    }
}

ScaleTable checked_table(const LevyTriplet& triplet, const RunConfig& c, double q, double x_max) {
    const Eigen::Index n = grid_index(x_max, c.h);
    const ChainModel chain = build_chain(triplet, c.h, std::max<Eigen::Index>(n, 1));
    ScaleTable t = compute_scale_table(gamma_coefficients(chain), q, n, recursion_options(c));
    if (c.cross_check) {
        const Eigen::VectorXd ide = ide_recursion_W(chain, q, n);
        const Eigen::VectorXd z = z_from_w(t);
        for (Eigen::Index m = 0; m <= n; ++m) {
            if (std::abs(ide(m) - t.W(m)) > 1e-10 * std::abs(t.W(m))) {
                throw ConsistencyError("cross-check failed: IDE form disagrees with the recursion at index " +
                                       std::to_string(m));
            }
            if (std::abs(z(m) - 1.0 - t.Ztilde(m)) > 1e-10 * z(m)) {
                throw ConsistencyError("cross-check failed: Z from W disagrees at index " + std::to_string(m));
            }
        }
    }
    return t;
}

std::vector<Output> run_scale(const RunConfig& c, const LevyTriplet& triplet, int threads) {
    {
        const ChainModel probe = build_chain(triplet, c.h, 1);
        warn_half_grid(probe);
    }
    auto tables = parallel_map<ScaleTable>(c.q.size(), threads,
                                           [&](std::size_t i) { return checked_table(triplet, c, c.q[i], c.x_max); });
    Csv csv({"q", "x", "W", "Z"});
    for (const auto& t : tables) {
        for (Eigen::Index m = 0; m <= t.n; ++m) {
            const Eigen::Index s = m - t.delta0;
            csv.row({t.q, static_cast<double>(m) * t.h, s < 0 ? 0.0 : t.W(s), 1.0 + t.Ztilde(m)});
        }
    }
    return {{"scale", csv}};
}

bool is_cp_fixture(const TripletSpec& t) {
    return t.sigma2 == 0.0 && t.mu == 1.0 && t.densities.empty() && t.atoms.size() == 1 &&
           t.atoms[0].location == -1.0 && t.atoms[0].mass == 1.0;
}

bool is_stable_fixture(const TripletSpec& t) {
    return t.sigma2 == 0.0 && t.mu == 2.0 && t.atoms.empty() && t.densities.size() == 1 &&
           t.densities[0].kind == "power_law" && t.densities[0].coef == 1.0 && t.densities[0].beta == 1.5 &&
           t.densities[0].lo == -kInf && t.densities[0].hi == 0.0;
}

Oracle make_oracle(const RunConfig& c, const LevyTriplet& triplet, double q, const RecursionOptions& ro) {
    const auto& s = *c.sweep;
    if (s.oracle == "bm") {
        if (!triplet.measure().is_zero() || !(triplet.sigma2() > 0.0)) {
            throw ConfigError("sweep.oracle: 'bm' needs a Brownian triplet (sigma2 > 0, no jumps)");
        }
        const auto f = bm_closed_form(triplet.sigma2(), triplet.mu(), q);
        return closed_form_oracle(
            "bm", [f](double x) { return bm_W(f, x); }, [f](double x) { return bm_Z(f, x); });
    }
    if (s.oracle == "cp") {
        if (!is_cp_fixture(c.triplet)) throw ConfigError("sweep.oracle: 'cp' needs the triplet (0, delta_{-1}, 1)");
        for (double x : s.K) {
            if (!(x < 1.0)) throw ConfigError("sweep.oracle: 'cp' closed form holds for x < 1 only");
        }
        return closed_form_oracle(
            "cp", [q](double x) { return cp_W(q, x); }, [q](double x) { return cp_Z(q, x); });
    }
    if (s.oracle == "stable") {
        if (!is_stable_fixture(c.triplet) || q != 0.0) {
            throw ConfigError("sweep.oracle: 'stable' needs the |y|^{-5/2} triplet with mu = 2 and q = 0");
        }
        return closed_form_oracle("stable", stable_W0, [](double) { return 1.0; });
    }
    return benchmark_oracle(fine_grid_benchmark(triplet, q, s.K, s.benchmark_h, ro), "benchmark");
}

std::optional<SharpnessCase> sharpness_case(const std::string& s) {
    if (s == "bm_w") return SharpnessCase::BmW;
    if (s == "bm_z") return SharpnessCase::BmZ;
    if (s == "cp_w") return SharpnessCase::CpW;
    if (s == "cp_z") return SharpnessCase::CpZ;
    return std::nullopt;
}

std::vector<Output> run_sweep(const RunConfig& c, const LevyTriplet& triplet, int threads) {
    const auto& s = *c.sweep;
    SweepOptions so;
    so.threads = threads;
    so.recursion = recursion_options(c);

    double exp_w = std::nan(""), exp_z = std::nan("");
    try {
        const auto r = rate_expectation(triplet);
        exp_w = r.w;
        exp_z = r.z;
    } catch (const ConsistencyError& e) {
        std::cerr << "scalekit: warning: " << e.what() << "\n";
    }
    const auto sharp = sharpness_case(s.sharpness);
    if (sharp && (*sharp == SharpnessCase::CpW || *sharp == SharpnessCase::CpZ) && !is_cp_fixture(c.triplet)) {
        throw ConfigError("sweep.sharpness: CP limits apply to the triplet (0, delta_{-1}, 1) only");
    }
    if (sharp && (*sharp == SharpnessCase::BmW || *sharp == SharpnessCase::BmZ) && !triplet.measure().is_zero()) {
        throw ConfigError("sweep.sharpness: BM limits apply to Brownian triplets only");
    }

    Csv errs({"q", "h", "errW", "errZ"});
    std::vector<std::string> point_cols{"q", "h", "x", "deltaW", "deltaZ"};
    if (sharp) point_cols.push_back("ratio");
    Csv points(point_cols);
    Csv summary({"q", "oracle", "slope_W", "r2_W", "dropped_W", "exact_W", "slope_Z", "r2_Z", "dropped_Z", "exact_Z",
                 "expected_W", "expected_Z"});

    for (double q : c.q) {
        const Oracle oracle = make_oracle(c, triplet, q, so.recursion);
        const SweepReport rep = error_sweep(triplet, q, s.K, s.hs, oracle, so, "config");
        Eigen::MatrixXd ratio;
        if (sharp) {
            const bool w = *sharp == SharpnessCase::BmW || *sharp == SharpnessCase::CpW;
            const int power = *sharp == SharpnessCase::BmW ? 2 : 1;
            ratio = asymptotic_ratios(rep, w, power, [&](double x) {
                return sharpness_limit(*sharp, q, x, triplet.sigma2(), triplet.mu());
            });
        }
        for (std::size_t i = 0; i < rep.hs.size(); ++i) {
            errs.row({q, rep.hs[i], rep.errW[i], rep.errZ[i]});
            for (std::size_t j = 0; j < rep.K.size(); ++j) {
                const auto ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j);
                std::vector<Csv::Cell> row{q, rep.hs[i], rep.K[j], rep.deltaW(ii, jj), rep.deltaZ(ii, jj)};
                if (sharp) row.emplace_back(ratio(ii, jj));
                points.row(row);
            }
        }
        const FitResult fz = rep.fitZ.value_or(FitResult{});
        summary.row({q, rep.oracle, rep.fitW.exact ? std::nan("") : rep.fitW.slope, rep.fitW.r2,
                     static_cast<long long>(rep.fitW.dropped), static_cast<long long>(rep.fitW.exact),
                     fz.exact || !rep.fitZ ? std::nan("") : fz.slope, fz.r2, static_cast<long long>(fz.dropped),
                     static_cast<long long>(fz.exact), exp_w, exp_z});
    }
    return {{"sweep", errs}, {"sweep_points", points}, {"sweep_summary", summary}};
}

std::vector<Output> run_ruin(const RunConfig& c, const LevyTriplet& triplet, int threads) {
    const auto& r = *c.ruin;
    DeficitDensityRequest req{r.x, r.a, r.y, named_density(r.claim_density)};
    auto dens = parallel_map<DeficitDensity>(c.q.size(), threads, [&](std::size_t i) {
        return ruin_deficit_density(checked_table(triplet, c, c.q[i], r.a), req);
    });
    Csv csv({"q", "y", "k", "negative"});
    for (std::size_t i = 0; i < dens.size(); ++i) {
        if (!dens[i].negative_at.empty()) {
            std::cerr << "scalekit: warning: " << dens[i].negative_at.size()
                      << " negative deficit density values reported unclamped (q = " << c.q[i] << ")\n";
        }
        for (std::size_t j = 0; j < dens[i].y.size(); ++j) {
            csv.row({c.q[i], dens[i].y[j], dens[i].k[j], static_cast<long long>(dens[i].k[j] < 0.0)});
        }
    }
    return {{"ruin", csv}};
}

std::vector<Output> run_cbi(const RunConfig& c, const LevyTriplet& triplet, int threads) {
    const auto& b = *c.cbi;
    const PositiveMeasure m = b.measure == "zero" ? PositiveMeasure::zero()
                                                  : PositiveMeasure::exponential(b.intensity, b.rate);
    const double x_max = *std::max_element(b.xs.begin(), b.xs.end());
    auto ks = parallel_map<CbiK>(c.q.size(), threads, [&](std::size_t i) {
        return cbi_k(checked_table(triplet, c, c.q[i], x_max), b.b, m, b.xs);
    });
    if (!ks.empty() && ks[0].delta0_warning) {
        std::cerr << "scalekit: warning: finite-variation paths; the linear term b*W(0) does not vanish\n";
    }
    Csv csv({"q", "x", "k"});
    for (std::size_t i = 0; i < ks.size(); ++i) {
        for (std::size_t j = 0; j < ks[i].x.size(); ++j) csv.row({c.q[i], ks[i].x[j], ks[i].k[j]});
    }
    return {{"cbi", csv}};
}

std::vector<Output> run_diagnose(const RunConfig& c, const LevyTriplet& triplet) {
    const auto& d = *c.diagnose;
    Csv csv({"quantity", "argument", "value"});
    const auto diag = small_jump_diagnostics(triplet.measure(), d.deltas);
    const auto choice = select_scheme(triplet);
    csv.row({std::string("path_class"), std::string(""), std::string(to_string(diag.path_class))});
    csv.row({std::string("scheme"), std::string(""), std::string(to_string(choice.scheme))});
    csv.row({std::string("cutoff"), std::string(""), static_cast<long long>(choice.cutoff)});
    csv.row({std::string("delta0"), std::string(""), static_cast<long long>(triplet.delta0())});
    if (triplet.measure().finite_variation()) {
        csv.row({std::string("drift_fv"), std::string(""), triplet.drift_fv()});
    }
    for (std::size_t i = 0; i < diag.deltas.size(); ++i) {
        const double dl = diag.deltas[i];
        csv.row({std::string("kappa"), dl, diag.kappa[i]});
        csv.row({std::string("xi"), dl, diag.xi[i]});
        csv.row({std::string("zeta"), dl, diag.zeta[i]});
        csv.row({std::string("gamma_small"), dl, diag.gamma_small[i]});
    }
    const auto& a = diag.assumption;
    if (a.epsilon) {
        csv.row({std::string("epsilon"), std::string(""), *a.epsilon});
        csv.row({std::string("fit_residual"), std::string(""), a.fit_residual});
        csv.row({std::string("bounded_limsup"), std::string(""), static_cast<long long>(a.bounded_limsup)});
        csv.row({std::string("positive_liminf"), std::string(""), static_cast<long long>(a.positive_liminf)});
    }
    try {
        const auto r = rate_expectation(triplet, d.deltas);
        csv.row({std::string("expected_rate_W"), std::string(""), r.w});
        csv.row({std::string("expected_rate_Z"), std::string(""), r.z});
    } catch (const ConsistencyError& e) {
        csv.row({std::string("expected_rate_W"), std::string(""), std::string(e.what())});
    }
    std::optional<double> best;
    for (double h : d.candidates) {
        try {
            const ChainModel chain = build_chain(triplet, h, 1);
            csv.row({std::string("admissible"), h, std::string("yes")});
            if (!best) {
                best = h;
                for (double loc : chain.half_grid_atoms) csv.row({std::string("half_grid_atom"), h, loc});
            }
        } catch (const InadmissibleStepError& e) {
            csv.row({std::string("admissible"), h, std::string(e.what())});
        }
    }
    if (best) {
        csv.row({std::string("max_admissible_h"), std::string(""), *best});
    } else {
        csv.row({std::string("max_admissible_h"), std::string(""), std::string("none")});
    }
    return {{"diagnose", csv}};
}

int exit_code(const Error& e) {
    switch (e.category()) {
        case ErrorCategory::Config: return 2;
        case ErrorCategory::InadmissibleStep: return 3;
        case ErrorCategory::Range: return 4;
        default: return 1;
    }
}

int resolve_threads(std::optional<int> flag) {
    if (flag) {
        if (*flag < 1) throw ConfigError("--threads must be at least 1");
        return *flag;
    }
    if (const char* env = std::getenv("SCALEKIT_THREADS"); env && *env) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (*end != '\0' || v < 1 || v > 1024) throw ConfigError("SCALEKIT_THREADS must be a positive integer");
        return static_cast<int>(v);
    }
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Scale functions of spectrally negative Levy processes"};
    std::string command, config_path, out;
    std::optional<int> threads;
    app.add_option("command", command, "scale | sweep | ruin | cbi | diagnose")
        ->required()
        ->check(CLI::IsMember({"scale", "sweep", "ruin", "cbi", "diagnose"}));
    app.add_option("--config", config_path, "JSON run configuration")->required();
    app.add_option("--out", out, "output path prefix (overrides the config)");
    app.add_option("--threads", threads, "worker threads (default: SCALEKIT_THREADS or 1)");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        RunConfig cfg = load_config(config_path, command);
        if (!out.empty()) cfg.output = out;
        const int nthreads = resolve_threads(threads);
        const LevyTriplet triplet = build_triplet(cfg.triplet);

        std::vector<Output> outputs;
        if (command == "scale") outputs = run_scale(cfg, triplet, nthreads);
        if (command == "sweep") outputs = run_sweep(cfg, triplet, nthreads);
        if (command == "ruin") outputs = run_ruin(cfg, triplet, nthreads);
        if (command == "cbi") outputs = run_cbi(cfg, triplet, nthreads);
        if (command == "diagnose") outputs = run_diagnose(cfg, triplet);

        for (const auto& o : outputs) {
            const std::string path = cfg.output + "_" + o.suffix + ".csv";
            std::ofstream f(path, std::ios::binary | std::ios::trunc);
            f << o.csv.str();
            if (!f) throw Error(ErrorCategory::Argument, "cannot write " + path);
            std::cout << path << "\n";
        }
        return 0;
    } catch (const Error& e) {
        std::cerr << "scalekit: error[" << to_string(e.category()) << "]: " << e.what() << "\n";
        return exit_code(e);
    } catch (const std::exception& e) {
        std::cerr << "scalekit: error[internal]: " << e.what() << "\n";
        return 1;
    }
}
