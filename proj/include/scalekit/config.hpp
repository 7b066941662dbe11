#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "scalekit/levy_triplet.hpp"

namespace scalekit {

inline constexpr int kSchemaVersion = 1;

// One density piece. Only the fields of its kind are read or written.
struct DensitySpec {
    std::string kind;  // power_law | shifted_power | exponential | log_normal | named
    double coef = 1.0;
    double beta = 1.0;
    double exponent = -1.0;
    double anchor = 0.0;
    double a = 1.0;
    double rho = 1.0;
    double weight = 1.0;
    std::string name;
    double lo = -kInf;
    double hi = 0.0;
    bool operator==(const DensitySpec&) const = default;
};

struct TripletSpec {
    double sigma2 = 0.0;
    double mu = 0.0;
    std::vector<Atom> atoms;
    std::vector<DensitySpec> densities;
    bool operator==(const TripletSpec&) const;
};

struct SweepSpec {
    std::vector<double> hs;
    std::vector<double> K;
    std::string oracle = "benchmark";  // bm | cp | stable | benchmark
    double benchmark_h = 0.0;          // 0: min(hs) / 16
    std::string sharpness;             // optional: bm_w | bm_z | cp_w | cp_z
    bool operator==(const SweepSpec&) const = default;
};

struct RuinSpec {
    double x = 0.0;
    double a = 0.0;
    std::vector<double> y;
    std::string claim_density = "log_normal";
    bool operator==(const RuinSpec&) const = default;
};

struct CbiSpec {
    double b = 1.0;
    std::string measure = "exponential";  // exponential | zero
    double intensity = 1.0;
    double rate = 1.0;
    std::vector<double> xs;
    bool operator==(const CbiSpec&) const = default;
};

struct DiagnoseSpec {
    std::vector<double> deltas;
    std::vector<double> candidates;
    bool operator==(const DiagnoseSpec&) const = default;
};

struct RunConfig {
    int schema_version = kSchemaVersion;
    std::string command;  // scale | sweep | ruin | cbi | diagnose
    TripletSpec triplet;
    std::vector<double> q{0.0};
    double h = 0.0;
    double x_max = 0.0;
    bool compensated = false;
    bool cross_check = false;
    std::string output = "scalekit";
    std::optional<SweepSpec> sweep;
    std::optional<RuinSpec> ruin;
    std::optional<CbiSpec> cbi;
    std::optional<DiagnoseSpec> diagnose;
    bool operator==(const RunConfig&) const = default;
};

// Parse and validate; every failure is a ConfigError. A nonempty command fills
// in a missing "command" key and must match a present one.
RunConfig parse_config(const std::string& text, const std::string& command = "");
RunConfig load_config(const std::string& path, const std::string& command = "");
std::string serialize_config(const RunConfig& config);

LevyTriplet build_triplet(const TripletSpec& spec);

// Named densities usable by "named" pieces and claim densities.
std::function<double(double)> named_density(const std::string& name);

}  // namespace scalekit
