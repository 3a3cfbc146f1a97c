#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "syncomm/evaluation.hpp"
#include "syncomm/graph.hpp"
#include "syncomm/partition.hpp"

namespace syncomm {

/// Splits one CSV record. Fields may be double-quoted ("" escapes a quote);
/// unquoted fields are trimmed.
std::vector<std::string> split_csv_line(std::string_view line);

/// `node,label` rows. A first row whose first field is a column name
/// (node, node_id, id, user, user_id) is skipped, as are `#` lines.
GroundTruth read_ground_truth(const std::filesystem::path& path);

/// `user,item` rows; header handling as for ground truth.
ActivityLog read_activity_log(const std::filesystem::path& path);

/// Header row `node,feature...` required; empty cells are missing values.
AttributeTable read_attribute_table(const std::filesystem::path& path);

/// {"nodes": [...], "communities": [[ids...], ...]} plus any extra fields.
std::string partition_json(const Partition& p, const NodeLabeling& labels,
                           const std::string& config_hash = {});
Partition read_partition_json(const std::filesystem::path& path, const NodeLabeling& labels);

/// Fixed, locale-independent rendering of a double that round-trips.
std::string format_double(double value);

/// Writes `text` to `path`, creating parent directories.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace syncomm
