#include "cli.hpp"

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "dckm/baselines.hpp"
#include "dckm/data_io.hpp"
#include "dckm/errors.hpp"
#include "dckm/metrics.hpp"
#include "dckm/solver.hpp"

namespace dckm::cli {

namespace {

const std::vector<std::string> kMethods{"dckm", "kmeans", "deckm", "pcakm", "dropkm"};

std::string join(const std::vector<std::string>& items, const char* sep = ",") {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += sep;
        out += items[i];
    }
    return out;
}

std::string join(const std::vector<double>& items) {
    std::vector<std::string> parts;
    for (double v : items) parts.push_back(fmt(v));
    return join(parts);
}

std::uint64_t default_seed() {
    const char* env = std::getenv("DCKM_SEED");
    if (env == nullptr || *env == '\0') return 0;
    char* end = nullptr;
    errno = 0;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (errno != 0 || *end != '\0' || env[0] == '-') throw InvalidArgument("DCKM_SEED is not an unsigned integer");
    return v;
}

std::pair<double, double> mean_std(const std::vector<double>& v) {
    double mean = 0.0;
    for (double e : v) mean += e;
    mean /= static_cast<double>(v.size());
    double var = 0.0;
    for (double e : v) var += (e - mean) * (e - mean);
    return {mean, std::sqrt(var / static_cast<double>(v.size()))};
}

HyperParams hyper_params(const MethodConfig& cfg) {
    HyperParams hp;
    hp.k = cfg.k;
    hp.lambda1 = cfg.lambda1;
    hp.lambda2 = cfg.lambda2;
    hp.lambda3 = cfg.lambda3;
    hp.restarts = cfg.restarts;
    hp.seed = cfg.seed;
    hp.max_outer_iters = cfg.max_iters;
    hp.max_w_iters = cfg.w_iters;
    hp.outer_tol = cfg.tol;
    hp.validate();
    return hp;
}

RunSummary summarize(std::uint64_t seed, double objective, std::size_t iterations, bool converged,
                     const Labels& assignment, const std::optional<Labels>& truth) {
    RunSummary s{seed, objective, iterations, converged, std::nullopt, std::nullopt};
    if (truth) {
        s.nmi = nmi(assignment, *truth);
        s.ari = ari(assignment, *truth);
    }
    return s;
}

std::size_t lowest_objective(const std::vector<RunSummary>& runs) {
    std::size_t best = 0;
    for (std::size_t r = 1; r < runs.size(); ++r) {
        if (runs[r].objective < runs[best].objective) best = r;
    }
    return best;
}

LabeledDataset load_dataset(const std::string& path, const std::optional<std::string>& label_column) {
    auto ds = load_csv(path, label_column);
    const auto report = validate_data(ds.x);
    for (const auto& flag : report.flags) {
        if (!flag.fatal) std::cerr << "warning: " << path << ": column " << flag.column << " is constant\n";
    }
    if (!report.ok) throw DataError(path + ": " + report.messages.front());
    return ds;
}

std::size_t resolve_k(std::optional<std::size_t> k, const LabeledDataset& ds) {
    if (k) return *k;
    if (ds.labels) return ds.num_classes();
    throw InvalidArgument("--k is required when the data has no labels");
}

void add_common_run_flags(CLI::App* cmd, MethodConfig& cfg, std::optional<std::size_t>& k) {
    cmd->add_option("--k", k, "Number of clusters (default: number of label classes)")->check(CLI::PositiveNumber);
    cmd->add_option("--l3", cfg.lambda3, "Weight-sum penalty")->capture_default_str();
    cmd->add_option("--restarts", cfg.restarts, "Independent runs per method")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--seed", cfg.seed, "Base seed (default: $DCKM_SEED or 0)");
    cmd->add_option("--max-iters", cfg.max_iters, "Outer sweeps / Lloyd iterations")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--w-iters", cfg.w_iters, "Weight descent steps per sweep")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--tol", cfg.tol, "Relative objective tolerance")->capture_default_str();
    cmd->add_option("--threshold", cfg.threshold, "dropkm correlation threshold")->capture_default_str();
    cmd->add_option("--pca-dims", cfg.pca_dims, "pcakm dimensions (default k-1)");
}

int cmd_gen(const BiasSpec& spec, const std::string& out_path, std::ostream& out) {
    const auto ds = generate_biased(spec);
    save_dataset(ds, out_path);
    out << "wrote " << ds.x.n() << " rows x " << ds.x.d() << " features to " << out_path << "\n";
    for (const auto& [key, value] : ds.provenance) out << key << " = " << value << "\n";
    return kOk;
}

int cmd_fit(const MethodConfig& cfg_in, std::optional<std::size_t> k, const std::string& data,
            const std::optional<std::string>& label_column, const std::optional<std::string>& out_path,
            const std::optional<std::string>& weights_out, std::ostream& out) {
    if (!is_method(cfg_in.method)) throw InvalidArgument("unknown method: " + cfg_in.method);
    const auto ds = load_dataset(data, label_column);
    MethodConfig cfg = cfg_in;
    cfg.k = resolve_k(k, ds);

    const auto start = std::chrono::steady_clock::now();
    const auto outcome = run_method(ds.x, ds.labels, cfg);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const Record rec = run_record(cfg, data, outcome);
    if (out_path) write_text(*out_path, rec.str());
    if (weights_out) {
        if (!outcome.weights) throw InvalidArgument("--weights-out needs a weighted method (dckm, deckm)");
        write_weights(*weights_out, *outcome.weights);
    }
    out << rec.str();
    out << "wall_time_s = " << fmt(wall) << "\n";
    return kOk;
}

struct BenchCell {
    bool ok = false;
    std::string error;
    MethodConfig cfg;
    MethodOutcome outcome;
    std::vector<std::pair<MethodConfig, MethodOutcome>> grid;
};

int cmd_bench(const MethodConfig& base, std::optional<std::size_t> k, const std::vector<std::string>& datasets,
              const std::vector<std::string>& methods, const std::string& label_column,
              const std::vector<double>& grid, const std::optional<std::string>& out_path, std::ostream& out) {
    if (methods.empty()) throw InvalidArgument("--methods needs at least one method");
    if (datasets.empty()) throw InvalidArgument("--data needs at least one dataset");
    if (grid.empty()) throw InvalidArgument("--grid needs at least one value");
    for (const auto& m : methods) {
        if (!is_method(m)) throw InvalidArgument("unknown method: " + m);
    }

    Record rec{kBenchHeader, {}};
    rec.add("datasets", join(datasets));
    rec.add("methods", join(methods));
    rec.add("grid", join(grid));
    rec.add("lambda3", base.lambda3);
    rec.add_int("restarts", static_cast<long long>(base.restarts));
    rec.add_int("seed", static_cast<long long>(base.seed));
    rec.add("selection", "max mean nmi, ties to first grid point");

    std::vector<std::vector<BenchCell>> table(datasets.size(), std::vector<BenchCell>(methods.size()));
    for (std::size_t di = 0; di < datasets.size(); ++di) {
        std::optional<LabeledDataset> ds;
        std::string load_error;
        try {
            ds = load_dataset(datasets[di], label_column);
            if (!ds->labels) throw DataError(datasets[di] + ": bench needs labels");
        } catch (const std::exception& e) {
            load_error = e.what();
            ds.reset();
        }
        for (std::size_t mi = 0; mi < methods.size(); ++mi) {
            BenchCell& cell = table[di][mi];
            if (!ds) {
                cell.error = load_error;
                continue;
            }
            std::vector<std::pair<double, double>> points{{base.lambda1, base.lambda2}};
            if (is_weighted_method(methods[mi])) {
                points.clear();
                for (double l1 : grid) {
                    for (double l2 : grid) points.emplace_back(l1, l2);
                }
            }
            for (const auto& [l1, l2] : points) {
                MethodConfig cfg = base;
                cfg.method = methods[mi];
                cfg.lambda1 = l1;
                cfg.lambda2 = l2;
                try {
                    cfg.k = resolve_k(k, *ds);
                    cell.grid.emplace_back(cfg, run_method(ds->x, ds->labels, cfg));
                } catch (const std::exception& e) {
                    if (cell.error.empty()) cell.error = e.what();
                }
            }
            if (cell.grid.empty()) continue;
            std::size_t best = 0;
            for (std::size_t g = 1; g < cell.grid.size(); ++g) {
                if (*cell.grid[g].second.nmi_mean > *cell.grid[best].second.nmi_mean) best = g;
            }
            cell.ok = true;
            cell.cfg = cell.grid[best].first;
            cell.outcome = cell.grid[best].second;
        }
    }

    std::ostringstream table_text;
    table_text << "dataset";
    for (const auto& m : methods) table_text << "\t" << m << " (nmi/ari)";
    table_text << "\n";
    for (std::size_t di = 0; di < datasets.size(); ++di) {
        table_text << datasets[di];
        for (std::size_t mi = 0; mi < methods.size(); ++mi) {
            const BenchCell& cell = table[di][mi];
            const std::string key = "cell." + std::to_string(di) + "." + methods[mi];
            if (!cell.ok) {
                rec.add(key + ".status", "error");
                rec.add(key + ".error", cell.error);
                table_text << "\terror";
                continue;
            }
            rec.add(key + ".status", "ok");
            if (!cell.error.empty()) rec.add(key + ".partial_error", cell.error);
            rec.add(key + ".lambda1", cell.cfg.lambda1);
            rec.add(key + ".lambda2", cell.cfg.lambda2);
            rec.add(key + ".nmi.mean", *cell.outcome.nmi_mean);
            rec.add(key + ".nmi.std", *cell.outcome.nmi_std);
            rec.add(key + ".ari.mean", *cell.outcome.ari_mean);
            rec.add(key + ".ari.std", *cell.outcome.ari_std);
            if (cell.grid.size() > 1) {
                for (std::size_t g = 0; g < cell.grid.size(); ++g) {
                    const std::string gk = key + ".grid." + std::to_string(g);
                    rec.add(gk + ".lambda1", cell.grid[g].first.lambda1);
                    rec.add(gk + ".lambda2", cell.grid[g].first.lambda2);
                    rec.add(gk + ".nmi.mean", *cell.grid[g].second.nmi_mean);
                    rec.add(gk + ".ari.mean", *cell.grid[g].second.ari_mean);
                }
            }
            char buf[64];
            std::snprintf(buf, sizeof buf, "\t%.4f/%.4f", *cell.outcome.nmi_mean, *cell.outcome.ari_mean);
            table_text << buf;
        }
        table_text << "\n";

        const auto dckm_it = std::find(methods.begin(), methods.end(), "dckm");
        if (dckm_it == methods.end()) continue;
        const BenchCell& dckm_cell = table[di][static_cast<std::size_t>(dckm_it - methods.begin())];
        std::optional<std::size_t> best_nmi, best_ari;
        for (std::size_t mi = 0; mi < methods.size(); ++mi) {
            if (methods[mi] == "dckm" || !table[di][mi].ok) continue;
            const auto& o = table[di][mi].outcome;
            if (!best_nmi || *o.nmi_mean > *table[di][*best_nmi].outcome.nmi_mean) best_nmi = mi;
            if (!best_ari || *o.ari_mean > *table[di][*best_ari].outcome.ari_mean) best_ari = mi;
        }
        if (!dckm_cell.ok || !best_nmi) continue;
        const std::string key = "improvement." + std::to_string(di);
        const double nmi_base = *table[di][*best_nmi].outcome.nmi_mean;
        const double ari_base = *table[di][*best_ari].outcome.ari_mean;
        const double nmi_pct = 100.0 * (*dckm_cell.outcome.nmi_mean - nmi_base) / std::abs(nmi_base);
        const double ari_pct = 100.0 * (*dckm_cell.outcome.ari_mean - ari_base) / std::abs(ari_base);
        rec.add(key + ".nmi.baseline", methods[*best_nmi]);
        rec.add(key + ".nmi.pct", nmi_pct);
        rec.add(key + ".ari.baseline", methods[*best_ari]);
        rec.add(key + ".ari.pct", ari_pct);
        char buf[160];
        std::snprintf(buf, sizeof buf, "  dckm vs best baseline: nmi %+.2f%% (%s), ari %+.2f%% (%s)\n", nmi_pct,
                      methods[*best_nmi].c_str(), ari_pct, methods[*best_ari].c_str());
        table_text << buf;
    }

    if (out_path) write_text(*out_path, rec.str());
    out << table_text.str();
    return kOk;
}

int cmd_corr(const std::string& data, const std::optional<std::string>& label_column,
             const std::optional<std::string>& weights_path, std::ostream& out) {
    const auto ds = load_csv(data, label_column);
    const double before = correlation_amount(ds.x);
    out << "correlation.unweighted = " << fmt(before) << "\n";
    if (weights_path) {
        const Vector w = read_weights(*weights_path);
        if (static_cast<std::size_t>(w.size()) != ds.x.n()) {
            throw ShapeMismatch("weights file has " + std::to_string(w.size()) + " entries, data has " +
                                std::to_string(ds.x.n()) + " rows");
        }
        const double after = correlation_amount(ds.x, w);
        out << "correlation.weighted = " << fmt(after) << "\n";
        out << "reduction_ratio = " << fmt(before > 0.0 ? after / before : std::nan("")) << "\n";
    }
    return kOk;
}

}  // namespace

void Record::add(const std::string& key, const std::string& value) { entries.emplace_back(key, value); }
void Record::add(const std::string& key, double value) { entries.emplace_back(key, fmt(value)); }
void Record::add_int(const std::string& key, long long value) { entries.emplace_back(key, std::to_string(value)); }

std::optional<std::string> Record::get(const std::string& key) const {
    for (const auto& [k, v] : entries) {
        if (k == key) return v;
    }
    return std::nullopt;
}

std::string Record::str() const {
    std::string s = header + "\n";
    for (const auto& [k, v] : entries) s += k + " = " + v + "\n";
    return s;
}

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Record read_record(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    Record rec;
    std::string line;
    if (!std::getline(in, line) || line.rfind("# dckm-", 0) != 0) throw DataError(path.string() + ": missing header");
    rec.header = line;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        const auto pos = line.find(" = ");
        if (pos == std::string::npos) throw DataError(path.string() + ": malformed line " + std::to_string(lineno));
        rec.entries.emplace_back(line.substr(0, pos), line.substr(pos + 3));
    }
    return rec;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw DataError("cannot write " + path.string());
    f << text;
    if (!f) throw DataError("write failed: " + path.string());
}

void write_weights(const std::filesystem::path& path, const Vector& w) {
    std::string text = std::string(kWeightsHeader) + "\n";
    for (double v : w) text += fmt(v) + "\n";
    write_text(path, text);
}

Vector read_weights(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    std::vector<double> values;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        char* end = nullptr;
        const double v = std::strtod(line.c_str(), &end);
        if (end == line.c_str() || *end != '\0' || !std::isfinite(v) || v < 0.0) {
            throw DataError(path.string() + ": bad weight on line " + std::to_string(lineno));
        }
        values.push_back(v);
    }
    return Eigen::Map<Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

bool is_method(const std::string& name) { return std::ranges::find(kMethods, name) != kMethods.end(); }

bool is_weighted_method(const std::string& name) { return name == "dckm" || name == "deckm"; }

MethodOutcome run_method(const DataMatrix& x, const std::optional<Labels>& labels, const MethodConfig& cfg) {
    if (!is_method(cfg.method)) throw InvalidArgument("unknown method: " + cfg.method);
    if (cfg.restarts == 0) throw InvalidArgument("restarts must be positive");
    if (labels && labels->size() != x.n()) throw ShapeMismatch("label count does not match rows");
    const HyperParams hp = hyper_params(cfg);
    if (cfg.k > x.n()) throw InvalidArgument("k exceeds the number of samples");

    MethodOutcome out;
    const KMeansOptions opts{cfg.max_iters, false};
    auto add_clustering = [&](std::uint64_t seed, const ClusteringResult& c) {
        out.runs.push_back(summarize(seed, c.loss, c.iterations, c.converged, c.assignment.labels(), labels));
    };

    if (cfg.method == "dckm") {
        const auto rr = fit_restarts(x, hp);
        for (const auto& r : rr.runs) {
            out.runs.push_back(
                summarize(r.seed, r.final_objective(), r.iterations, r.converged, r.assignment.labels(), labels));
        }
        out.weights = rr.best_fit().weights.w();
    } else if (cfg.method == "kmeans") {
        for (std::size_t r = 0; r < cfg.restarts; ++r) add_clustering(cfg.seed + r, kmeans(x, cfg.k, cfg.seed + r, opts));
    } else if (cfg.method == "deckm") {
        // stage 1 is seed independent
        const auto first = dec_km(x, hp);
        add_clustering(cfg.seed, first.clustering);
        for (std::size_t r = 1; r < cfg.restarts; ++r) {
            add_clustering(cfg.seed + r, weighted_kmeans(x, first.weights, cfg.k, cfg.seed + r, opts));
        }
        out.weights = first.weights.w();
    } else if (cfg.method == "pcakm") {
        BaselineSpec{BaselineSpec::Kind::PcaKM, cfg.threshold, cfg.pca_dims}.validate(x.d());
        for (std::size_t r = 0; r < cfg.restarts; ++r) {
            const auto res = pca_km(x, cfg.k, cfg.seed + r, cfg.pca_dims, opts);
            add_clustering(cfg.seed + r, res.clustering);
            out.pca_components = res.components;
        }
    } else {
        BaselineSpec{BaselineSpec::Kind::DropKM, cfg.threshold, std::nullopt}.validate(x.d());
        for (std::size_t r = 0; r < cfg.restarts; ++r) {
            const auto res = drop_km(x, cfg.k, cfg.threshold, cfg.seed + r, opts);
            add_clustering(cfg.seed + r, res.clustering);
            out.kept_features = res.kept.size();
        }
    }

    out.best = lowest_objective(out.runs);
    out.correlation_before = correlation_amount(x);
    if (out.weights) out.correlation_after = correlation_amount(x, *out.weights);
    if (labels) {
        std::vector<double> nmis, aris;
        for (const auto& r : out.runs) {
            nmis.push_back(*r.nmi);
            aris.push_back(*r.ari);
        }
        std::tie(out.nmi_mean, out.nmi_std) = mean_std(nmis);
        std::tie(out.ari_mean, out.ari_std) = mean_std(aris);
    }
    return out;
}

Record run_record(const MethodConfig& cfg, const std::string& data_path, const MethodOutcome& o) {
    Record rec{kResultHeader, {}};
    rec.add("method", cfg.method);
    rec.add("data", data_path);
    rec.add_int("k", static_cast<long long>(cfg.k));
    if (is_weighted_method(cfg.method)) {
        rec.add("lambda1", cfg.lambda1);
        rec.add("lambda2", cfg.lambda2);
        rec.add("lambda3", cfg.lambda3);
        rec.add_int("w_iters", static_cast<long long>(cfg.w_iters));
        rec.add("tol", cfg.tol);
    }
    if (cfg.method == "dropkm") rec.add("threshold", cfg.threshold);
    rec.add_int("max_iters", static_cast<long long>(cfg.max_iters));
    rec.add_int("restarts", static_cast<long long>(cfg.restarts));
    rec.add_int("seed", static_cast<long long>(cfg.seed));
    for (std::size_t r = 0; r < o.runs.size(); ++r) {
        const auto& run = o.runs[r];
        const std::string key = "run." + std::to_string(r);
        rec.add_int(key + ".seed", static_cast<long long>(run.seed));
        rec.add(key + ".objective", run.objective);
        rec.add_int(key + ".iterations", static_cast<long long>(run.iterations));
        rec.add(key + ".converged", run.converged ? "true" : "false");
        if (run.nmi) rec.add(key + ".nmi", *run.nmi);
        if (run.ari) rec.add(key + ".ari", *run.ari);
    }
    if (o.nmi_mean) {
        rec.add("nmi.mean", *o.nmi_mean);
        rec.add("nmi.std", *o.nmi_std);
        rec.add("ari.mean", *o.ari_mean);
        rec.add("ari.std", *o.ari_std);
    }
    rec.add_int("best_run", static_cast<long long>(o.best));
    rec.add("objective.final", o.runs[o.best].objective);
    rec.add_int("iterations", static_cast<long long>(o.runs[o.best].iterations));
    rec.add("correlation.before", o.correlation_before);
    if (o.correlation_after) rec.add("correlation.after", *o.correlation_after);
    if (o.kept_features) rec.add_int("kept_features", static_cast<long long>(*o.kept_features));
    if (o.pca_components) rec.add_int("pca_components", static_cast<long long>(*o.pca_components));
    return rec;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Decorrelation-regularized k-means"};
    app.require_subcommand(1);

    BiasSpec spec;
    std::optional<std::size_t> bias_features;
    std::string gen_out;
    auto* gen = app.add_subcommand("gen", "Generate a synthetic selection-bias dataset");
    gen->add_option("--n", spec.n, "Samples")->capture_default_str();
    gen->add_option("--d", spec.d, "Features")->capture_default_str();
    gen->add_option("--k", spec.k, "Clusters")->capture_default_str();
    gen->add_option("--core", spec.core_per_cluster, "Core features per cluster")->capture_default_str();
    gen->add_option("--bias-features", bias_features, "Bias features (default min(12, d - k*core))");
    gen->add_option("--blocks", spec.bias_blocks, "Bias blocks")->capture_default_str();
    gen->add_option("--bias", spec.bias_strength, "Bias strength in [0.5, 1)")->capture_default_str();
    gen->add_option("--noise", spec.noise_flip, "Bit flip probability")->capture_default_str();
    gen->add_option("--seed", spec.seed, "Seed (default: $DCKM_SEED or 0)");
    gen->add_option("--out", gen_out, "Output CSV")->required();

    MethodConfig fit_cfg;
    std::optional<std::size_t> fit_k;
    std::string fit_data;
    std::optional<std::string> fit_labels, fit_out, fit_weights_out;
    auto* fit = app.add_subcommand("fit", "Run one method with restarts");
    fit->add_option("--method", fit_cfg.method, "dckm|kmeans|deckm|pcakm|dropkm")
        ->capture_default_str()
        ->check(CLI::IsMember(kMethods));
    fit->add_option("--data", fit_data, "Input CSV")->required();
    fit->add_option("--labels", fit_labels, "Label column name or index");
    fit->add_option("--l1", fit_cfg.lambda1, "Balance weight")->capture_default_str();
    fit->add_option("--l2", fit_cfg.lambda2, "Weight norm penalty")->capture_default_str();
    add_common_run_flags(fit, fit_cfg, fit_k);
    fit->add_option("--out", fit_out, "Result file");
    fit->add_option("--weights-out", fit_weights_out, "Write best-run sample weights");

    MethodConfig bench_cfg;
    std::optional<std::size_t> bench_k;
    std::vector<std::string> bench_data, bench_methods;
    std::string bench_labels = "label";
    std::vector<double> bench_grid{1e-2, 1e-1, 1.0, 10.0, 1e2, 1e3};
    std::optional<std::string> bench_out;
    auto* bench = app.add_subcommand("bench", "Compare methods across datasets");
    bench->add_option("--data", bench_data, "Input CSVs")->required();
    bench->add_option("--methods", bench_methods, "Methods to compare")->expected(0, -1)->required();
    bench->add_option("--labels", bench_labels, "Label column")->capture_default_str();
    bench->add_option("--grid", bench_grid, "lambda1/lambda2 values for dckm and deckm")->capture_default_str();
    add_common_run_flags(bench, bench_cfg, bench_k);
    bench->add_option("--out", bench_out, "Result file");

    std::string corr_data;
    std::optional<std::string> corr_labels, corr_weights;
    auto* corr = app.add_subcommand("corr", "Feature correlation amount, optionally weighted");
    corr->add_option("--data", corr_data, "Input CSV")->required();
    corr->add_option("--labels", corr_labels, "Label column to exclude");
    corr->add_option("--weights", corr_weights, "Weights file from fit --weights-out");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        const std::uint64_t env_seed = default_seed();
        if (*gen) {
            if (gen->count("--seed") == 0) spec.seed = env_seed;
            if (bias_features) {
                spec.bias_features = *bias_features;
            } else {
                const std::size_t core = spec.k * spec.core_per_cluster;
                spec.bias_features = spec.d > core ? std::min<std::size_t>(12, spec.d - core) : 0;
            }
            return cmd_gen(spec, gen_out, out);
        }
        if (*fit) {
            if (fit->count("--seed") == 0) fit_cfg.seed = env_seed;
            return cmd_fit(fit_cfg, fit_k, fit_data, fit_labels, fit_out, fit_weights_out, out);
        }
        if (*bench) {
            if (bench->count("--seed") == 0) bench_cfg.seed = env_seed;
            std::erase(bench_methods, std::string());
            return cmd_bench(bench_cfg, bench_k, bench_data, bench_methods, bench_labels, bench_grid, bench_out,
                             out);
        }
        return cmd_corr(corr_data, corr_labels, corr_weights, out);
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const DataError& e) {
        err << "data error: " << e.what() << "\n";
        return kDataError;
    } catch (const ShapeMismatch& e) {
        err << "data error: " << e.what() << "\n";
        return kDataError;
    } catch (const std::exception& e) {
        err << "solver error: " << e.what() << "\n";
        return kSolverError;
    }
}

}  // namespace dckm::cli
