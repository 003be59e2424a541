#include "dckm/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "dckm/errors.hpp"
#include "dckm/rng.hpp"

namespace dckm {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        cells.push_back(trim(std::string_view(line).substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return cells;
}

std::optional<double> parse_number(const std::string& cell) {
    if (cell.empty()) return std::nullopt;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    if (*first == '+') ++first;
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) return std::nullopt;
    return value;
}

std::optional<long long> parse_integer(const std::string& cell) {
    long long value = 0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc() || ptr != cell.data() + cell.size()) return std::nullopt;
    return value;
}

Labels encode_labels(const std::vector<std::string>& raw) {
    Labels out;
    out.reserve(raw.size());
    bool verbatim = true;
    for (const auto& r : raw) {
        const auto v = parse_integer(r);
        if (!v || *v < 0 || *v > std::numeric_limits<int>::max()) {
            verbatim = false;
            break;
        }
        out.push_back(static_cast<int>(*v));
    }
    if (verbatim) return out;

    out.clear();
    const std::set<std::string> distinct(raw.begin(), raw.end());
    std::map<std::string, int> ids;
    int next = 0;
    for (const auto& s : distinct) ids[s] = next++;
    for (const auto& r : raw) out.push_back(ids.at(r));
    return out;
}

}  // namespace

std::size_t LabeledDataset::num_classes() const {
    if (!labels || labels->empty()) return 0;
    return static_cast<std::size_t>(*std::max_element(labels->begin(), labels->end())) + 1;
}

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) throw Error("could not format number");
    return std::string(buf, ptr);
}

LabeledDataset load_csv(const std::filesystem::path& path, const std::optional<std::string>& label_column) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());

    std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        rows.emplace_back(line_no, split_csv_line(line));
    }
    if (rows.empty()) throw DataError(path.string() + ": file is empty");

    const std::size_t width = rows.front().second.size();
    for (const auto& [no, cells] : rows) {
        if (cells.size() != width) {
            throw DataError(path.string() + ": line " + std::to_string(no) + " has " +
                            std::to_string(cells.size()) + " fields, expected " + std::to_string(width));
        }
    }

    std::vector<std::string> header;
    const bool has_header = std::any_of(rows.front().second.begin(), rows.front().second.end(),
                                        [](const std::string& c) { return !parse_number(c); });
    if (has_header) {
        header = rows.front().second;
        rows.erase(rows.begin());
    }
    if (rows.empty()) throw DataError(path.string() + ": no data rows");

    std::optional<std::size_t> label_idx;
    if (label_column) {
        const auto it = std::find(header.begin(), header.end(), *label_column);
        if (it != header.end()) {
            label_idx = static_cast<std::size_t>(it - header.begin());
        } else if (const auto idx = parse_integer(*label_column); idx && *idx >= 0 &&
                                                                   static_cast<std::size_t>(*idx) < width) {
            label_idx = static_cast<std::size_t>(*idx);
        } else {
            throw DataError(path.string() + ": label column '" + *label_column + "' not found");
        }
    }

    const std::size_t d = width - (label_idx ? 1 : 0);
    if (d == 0) throw DataError(path.string() + ": no feature columns");
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(d));
    std::vector<std::string> raw_labels;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto& [no, cells] = rows[r];
        Eigen::Index out_col = 0;
        for (std::size_t c = 0; c < width; ++c) {
            if (label_idx && c == *label_idx) {
                raw_labels.push_back(cells[c]);
                continue;
            }
            const auto v = parse_number(cells[c]);
            if (!v) {
                throw DataError(path.string() + ": line " + std::to_string(no) + ", column " +
                                std::to_string(c + 1) + ": non-numeric value '" + cells[c] + "'");
            }
            m(static_cast<Eigen::Index>(r), out_col++) = *v;
        }
    }

    LabeledDataset ds{DataMatrix(std::move(m))};
    if (label_idx) ds.labels = encode_labels(raw_labels);
    for (std::size_t c = 0; c < width; ++c) {
        if (label_idx && c == *label_idx) continue;
        ds.feature_names.push_back(has_header ? header[c] : "f" + std::to_string(ds.feature_names.size()));
    }
    ds.provenance = {{"source", "csv"}, {"path", path.string()}};
    if (label_column) ds.provenance.emplace_back("label_column", *label_column);
    return ds;
}

void save_dataset(const LabeledDataset& ds, const std::filesystem::path& path, const std::string& label_name) {
    std::ostringstream out;
    const auto& v = ds.x.values();
    for (Eigen::Index j = 0; j < v.cols(); ++j) {
        if (j > 0) out << ',';
        const auto idx = static_cast<std::size_t>(j);
        out << (idx < ds.feature_names.size() ? ds.feature_names[idx] : "f" + std::to_string(idx));
    }
    if (ds.labels) out << ',' << label_name;
    out << '\n';
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
        for (Eigen::Index j = 0; j < v.cols(); ++j) {
            if (j > 0) out << ',';
            out << format_double(v(i, j));
        }
        if (ds.labels) out << ',' << (*ds.labels)[static_cast<std::size_t>(i)];
        out << '\n';
    }
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw DataError("cannot open " + path.string() + " for writing");
    file << out.str();
    file.flush();
    if (!file) throw DataError("write to " + path.string() + " failed");
}

Binarized binarize(const Matrix& raw, std::size_t bins, const std::vector<std::string>& names) {
    if (bins < 2) throw InvalidArgument("bins must be at least 2");
    if (raw.rows() < 1 || raw.cols() < 1) throw InvalidArgument("cannot binarize an empty matrix");
    const auto n = static_cast<std::size_t>(raw.rows());

    std::vector<ColumnBinning> columns;
    std::vector<std::string> warnings;
    std::vector<std::string> out_names;
    std::size_t total = 0;
    for (Eigen::Index j = 0; j < raw.cols(); ++j) {
        const auto col = static_cast<std::size_t>(j);
        const std::string base = col < names.size() ? names[col] : "f" + std::to_string(col);
        if (!raw.col(j).allFinite()) throw DataError("column " + std::to_string(col) + " has non-finite values");
        ColumnBinning cb;
        cb.source_column = col;
        cb.first_output = total;
        if ((raw.col(j).array() == 0.0 || raw.col(j).array() == 1.0).all()) {
            cb.passthrough = true;
            cb.output_count = 1;
            out_names.push_back(base);
        } else {
            std::vector<double> sorted(raw.col(j).data(), raw.col(j).data() + raw.rows());
            std::sort(sorted.begin(), sorted.end());
            std::vector<double> uniq(sorted);
            uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
            if (uniq.size() < bins) {
                // One bin per distinct value.
                cb.edges.assign(uniq.begin(), uniq.end() - 1);
                warnings.push_back("column " + base + ": " + std::to_string(uniq.size()) +
                                   " distinct value(s) for " + std::to_string(bins) + " bins");
            } else {
                for (std::size_t b = 1; b < bins; ++b) {
                    const double edge = sorted[(b * n) / bins - ((b * n) / bins > 0 ? 1 : 0)];
                    if (edge < sorted.back() && (cb.edges.empty() || edge > cb.edges.back())) {
                        cb.edges.push_back(edge);
                    }
                }
            }
            cb.output_count = cb.edges.size() + 1;
            for (std::size_t b = 0; b < cb.output_count; ++b) out_names.push_back(base + "_bin" + std::to_string(b));
        }
        total += cb.output_count;
        columns.push_back(std::move(cb));
    }

    Matrix out = Matrix::Zero(raw.rows(), static_cast<Eigen::Index>(total));
    for (const auto& cb : columns) {
        const auto src = static_cast<Eigen::Index>(cb.source_column);
        for (Eigen::Index i = 0; i < raw.rows(); ++i) {
            const double v = raw(i, src);
            if (cb.passthrough) {
                out(i, static_cast<Eigen::Index>(cb.first_output)) = v;
                continue;
            }
            const auto bin = static_cast<std::size_t>(
                std::count_if(cb.edges.begin(), cb.edges.end(), [v](double e) { return v > e; }));
            out(i, static_cast<Eigen::Index>(cb.first_output + bin)) = 1.0;
        }
    }
    return Binarized{DataMatrix(std::move(out)), std::move(columns), std::move(out_names), std::move(warnings)};
}

void BiasSpec::validate() const {
    auto fail = [](const std::string& msg) { throw InvalidArgument("bias spec: " + msg); };
    if (n < 2) fail("n must be at least 2");
    if (k < 2) fail("k must be at least 2");
    if (k > n) fail("k must not exceed n");
    if (core_per_cluster < 1) fail("core_per_cluster must be at least 1");
    if (k * core_per_cluster + bias_features > d) fail("k*core_per_cluster + bias_features exceeds d");
    if (!(bias_strength >= 0.5 && bias_strength < 1.0)) fail("bias_strength must lie in [0.5, 1)");
    if (!(noise_flip >= 0.0 && noise_flip < 0.5)) fail("noise_flip must lie in [0, 0.5)");
    if (bias_features > 0 && (bias_blocks < 1 || bias_blocks > k || bias_blocks > bias_features)) {
        fail("bias_blocks must lie in [1, min(k, bias_features)]");
    }
}

std::pair<std::size_t, std::size_t> bias_block(const BiasSpec& spec, std::size_t block) {
    if (block >= spec.bias_blocks) throw InvalidArgument("bias block index out of range");
    const std::size_t offset = spec.k * spec.core_per_cluster;
    const std::size_t base = spec.bias_features / spec.bias_blocks;
    const std::size_t extra = spec.bias_features % spec.bias_blocks;
    const std::size_t begin = offset + block * base + std::min(block, extra);
    return {begin, begin + base + (block < extra ? 1 : 0)};
}

LabeledDataset generate_biased(const BiasSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);
    const auto n = static_cast<Eigen::Index>(spec.n);
    const auto d = static_cast<Eigen::Index>(spec.d);
    Matrix x = Matrix::Zero(n, d);
    Labels labels(spec.n);
    const std::size_t core_end = spec.k * spec.core_per_cluster;
    const std::size_t bias_end = core_end + spec.bias_features;

    for (Eigen::Index i = 0; i < n; ++i) {
        const std::size_t cluster = rng.index(spec.k);
        labels[static_cast<std::size_t>(i)] = static_cast<int>(cluster);
        for (std::size_t m = 0; m < spec.core_per_cluster; ++m) {
            x(i, static_cast<Eigen::Index>(cluster * spec.core_per_cluster + m)) = 1.0;
        }
        for (std::size_t b = 0; spec.bias_features > 0 && b < spec.bias_blocks; ++b) {
            const auto [begin, end] = bias_block(spec, b);
            const double p = b == cluster ? spec.bias_strength : 1.0 - spec.bias_strength;
            const bool on = rng.bernoulli(p);
            for (std::size_t j = begin; j < end; ++j) x(i, static_cast<Eigen::Index>(j)) = on ? 1.0 : 0.0;
        }
        for (std::size_t j = bias_end; j < spec.d; ++j) {
            x(i, static_cast<Eigen::Index>(j)) = rng.bernoulli(0.5) ? 1.0 : 0.0;
        }
        for (Eigen::Index j = 0; j < d; ++j) {
            if (rng.bernoulli(spec.noise_flip)) x(i, j) = 1.0 - x(i, j);
        }
    }

    LabeledDataset ds{DataMatrix(std::move(x)), std::move(labels)};
    for (std::size_t c = 0; c < spec.k; ++c) {
        for (std::size_t m = 0; m < spec.core_per_cluster; ++m) {
            ds.feature_names.push_back("core" + std::to_string(c) + "_" + std::to_string(m));
        }
    }
    for (std::size_t b = 0; spec.bias_features > 0 && b < spec.bias_blocks; ++b) {
        const auto [begin, end] = bias_block(spec, b);
        for (std::size_t j = begin; j < end; ++j) {
            ds.feature_names.push_back("bias" + std::to_string(b) + "_" + std::to_string(j - begin));
        }
    }
    for (std::size_t j = bias_end; j < spec.d; ++j) ds.feature_names.push_back("noise" + std::to_string(j - bias_end));
    ds.provenance = {{"source", "generate_biased"},
                     {"n", std::to_string(spec.n)},
                     {"d", std::to_string(spec.d)},
                     {"k", std::to_string(spec.k)},
                     {"core_per_cluster", std::to_string(spec.core_per_cluster)},
                     {"bias_features", std::to_string(spec.bias_features)},
                     {"bias_blocks", std::to_string(spec.bias_blocks)},
                     {"bias_strength", format_double(spec.bias_strength)},
                     {"noise_flip", format_double(spec.noise_flip)},
                     {"seed", std::to_string(spec.seed)}};
    return ds;
}

}  // namespace dckm
