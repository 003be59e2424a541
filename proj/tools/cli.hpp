#ifndef DCKM_TOOLS_CLI_HPP
#define DCKM_TOOLS_CLI_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dckm/core_types.hpp"

namespace dckm::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kDataError = 2, kSolverError = 3 };

inline constexpr const char* kResultHeader = "# dckm-result v1";
inline constexpr const char* kBenchHeader = "# dckm-bench v1";
inline constexpr const char* kWeightsHeader = "# dckm-weights v1";

/// Ordered key = value lines under a versioned header.
struct Record {
    std::string header;
    std::vector<std::pair<std::string, std::string>> entries;

    void add(const std::string& key, const std::string& value);
    void add(const std::string& key, double value);
    void add_int(const std::string& key, long long value);
    std::optional<std::string> get(const std::string& key) const;
    std::string str() const;
};

/// 17 significant digits, so every double round-trips.
std::string fmt(double v);

Record read_record(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

void write_weights(const std::filesystem::path& path, const Vector& w);
Vector read_weights(const std::filesystem::path& path);

struct MethodConfig {
    std::string method = "dckm";
    std::size_t k = 2;
    double lambda1 = 1.0;
    double lambda2 = 1.0;
    double lambda3 = 1.0;
    std::size_t restarts = 20;
    std::uint64_t seed = 0;
    std::size_t max_iters = 100;
    std::size_t w_iters = 5;
    double tol = 1e-6;
    double threshold = 0.7;
    std::optional<std::size_t> pca_dims;
};

struct RunSummary {
    std::uint64_t seed = 0;
    double objective = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    std::optional<double> nmi;
    std::optional<double> ari;
};

struct MethodOutcome {
    std::vector<RunSummary> runs;
    std::size_t best = 0;
    std::optional<Vector> weights;  // best run, weighted methods only
    std::optional<std::size_t> kept_features;
    std::optional<std::size_t> pca_components;
    double correlation_before = 0.0;
    std::optional<double> correlation_after;
    std::optional<double> nmi_mean, nmi_std, ari_mean, ari_std;
};

bool is_method(const std::string& name);
bool is_weighted_method(const std::string& name);

/// Runs `restarts` seeds seed, seed+1, ... of one method. Shared by fit and bench.
MethodOutcome run_method(const DataMatrix& x, const std::optional<Labels>& labels, const MethodConfig& cfg);

Record run_record(const MethodConfig& cfg, const std::string& data_path, const MethodOutcome& outcome);

/// Entry point; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dckm::cli

#endif  // DCKM_TOOLS_CLI_HPP
