#ifndef DCKM_DATA_IO_HPP
#define DCKM_DATA_IO_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dckm/core_types.hpp"

namespace dckm {

struct LabeledDataset {
    DataMatrix x;
    std::optional<Labels> labels;
    std::vector<std::string> feature_names;
    /// Ordered key/value record of how the dataset was produced.
    std::vector<std::pair<std::string, std::string>> provenance;

    std::size_t num_classes() const;
};

/**
 * Parses a numeric CSV. A first row containing any non-numeric cell is
 * treated as a header. `label_column` is a header name or a 0-based column
 * index; non-negative integer labels are kept verbatim, anything else is
 * mapped to 0..m-1 in sorted order. CRLF line endings are accepted.
 *
 * Throws DataError on ragged rows, non-numeric cells or a missing label
 * column (messages name the offending line).
 */
LabeledDataset load_csv(const std::filesystem::path& path,
                        const std::optional<std::string>& label_column = std::nullopt);

/// Header row, LF endings, shortest round-trip float formatting; labels (if
/// any) go in a trailing column named `label_name`.
void save_dataset(const LabeledDataset& ds, const std::filesystem::path& path,
                  const std::string& label_name = "label");

struct ColumnBinning {
    std::size_t source_column = 0;
    bool passthrough = false;     // column was already 0/1
    std::vector<double> edges;    // value v goes to bin #{e in edges : v > e}
    std::size_t first_output = 0;
    std::size_t output_count = 0;
};

struct Binarized {
    DataMatrix x;
    std::vector<ColumnBinning> columns;
    std::vector<std::string> feature_names;
    std::vector<std::string> warnings;
};

/// Equal-frequency binning plus one-hot encoding of every non-binary column.
Binarized binarize(const Matrix& raw, std::size_t bins,
                   const std::vector<std::string>& names = {});

/**
 * Synthetic selection-bias data. Each cluster owns `core_per_cluster`
 * indicator features that are on for its members. The bias features are
 * split into `bias_blocks` contiguous blocks, block b linked to cluster b.
 * For every sample a block is switched on as a whole with probability
 * `bias_strength` if the sample belongs to the linked cluster and
 * 1 - `bias_strength` otherwise. Leftover columns are fair coin flips.
 * Every bit is finally flipped with probability `noise_flip`.
 */
struct BiasSpec {
    std::size_t n = 500;
    std::size_t d = 24;
    std::size_t k = 3;
    std::size_t core_per_cluster = 4;
    std::size_t bias_features = 12;
    std::size_t bias_blocks = 1;
    double bias_strength = 0.9;
    double noise_flip = 0.02;
    std::uint64_t seed = 0;

    void validate() const;
};

LabeledDataset generate_biased(const BiasSpec& spec);

/// Column index range [begin, end) of bias block `block` (linked to cluster `block`).
std::pair<std::size_t, std::size_t> bias_block(const BiasSpec& spec, std::size_t block);

/// Format a double with the shortest representation that round-trips.
std::string format_double(double v);

}  // namespace dckm

#endif  // DCKM_DATA_IO_HPP
