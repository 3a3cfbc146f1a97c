#include "syncomm/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cctype>
#include <fstream>

#include <json.hpp>

#include "syncomm/error.hpp"

namespace syncomm {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

bool is_header_name(const std::string& field) {
  static constexpr std::array<std::string_view, 5> kNames = {"node", "node_id", "id", "user",
                                                             "user_id"};
  std::string lower = field;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return std::find(kNames.begin(), kNames.end(), lower) != kNames.end();
}

std::ifstream open(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return in;
}

/// Calls `row(fields, line_no)` for each data row of a two-column file.
template <typename Fn>
void for_each_pair_row(const std::filesystem::path& path, Fn&& row) {
  std::ifstream in = open(path);
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto fields = split_csv_line(t);
    if (first) {
      first = false;
      if (!fields.empty() && is_header_name(fields[0])) continue;
    }
    if (fields.size() != 2 || fields[0].empty() || fields[1].empty()) {
      throw Error(ErrorCode::kParse, path.string() + ":" + std::to_string(line_no) +
                                         ": expected two non-empty fields");
    }
    row(fields, line_no);
  }
}

}  // namespace

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false, was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"' && trim(field).empty()) {
      field.clear();
      quoted = was_quoted = true;
    } else if (c == ',') {
      out.push_back(was_quoted ? field : trim(field));
      field.clear();
      was_quoted = false;
    } else if (c != '\r') {
      field += c;
    }
  }
  out.push_back(was_quoted ? field : trim(field));
  return out;
}

GroundTruth read_ground_truth(const std::filesystem::path& path) {
  GroundTruth truth;
  for_each_pair_row(path, [&](const std::vector<std::string>& f, std::size_t line_no) {
    auto [it, inserted] = truth.label_of.emplace(f[0], f[1]);
    if (!inserted && it->second != f[1]) {
      throw Error(ErrorCode::kParse, path.string() + ":" + std::to_string(line_no) +
                                         ": node '" + f[0] + "' has two labels");
    }
  });
  return truth;
}

ActivityLog read_activity_log(const std::filesystem::path& path) {
  ActivityLog log;
  for_each_pair_row(path, [&](const std::vector<std::string>& f, std::size_t) { log.add(f[0], f[1]); });
  return log;
}

AttributeTable read_attribute_table(const std::filesystem::path& path) {
  std::ifstream in = open(path);
  AttributeTable table;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto fields = split_csv_line(t);
    if (!have_header) {
      if (fields.size() < 2) {
        throw Error(ErrorCode::kParse, path.string() + ": header needs a node column and features");
      }
      table.features.assign(fields.begin() + 1, fields.end());
      have_header = true;
      continue;
    }
    if (fields.size() != table.features.size() + 1) {
      throw Error(ErrorCode::kParse, path.string() + ":" + std::to_string(line_no) + ": expected " +
                                         std::to_string(table.features.size() + 1) + " fields");
    }
    std::string node = fields[0];
    fields.erase(fields.begin());
    if (!table.rows.emplace(node, std::move(fields)).second) {
      throw Error(ErrorCode::kParse, path.string() + ":" + std::to_string(line_no) +
                                         ": duplicate node '" + node + "'");
    }
  }
  if (!have_header) throw Error(ErrorCode::kParse, path.string() + ": missing header row");
  return table;
}

std::string partition_json(const Partition& p, const NodeLabeling& labels,
                           const std::string& config_hash) {
  nlohmann::ordered_json j;
  if (!config_hash.empty()) j["config_hash"] = config_hash;
  j["node_count"] = p.node_count();
  j["community_count"] = p.community_count();
  auto& groups = j["communities"] = nlohmann::ordered_json::array();
  for (const auto& members : p.groups()) {
    auto g = nlohmann::ordered_json::array();
    for (NodeId v : members) g.push_back(labels.id(v));
    groups.push_back(std::move(g));
  }
  return j.dump(2) + "\n";
}

Partition read_partition_json(const std::filesystem::path& path, const NodeLabeling& labels) {
  std::ifstream in = open(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, path.string() + ": " + e.what());
  }
  if (!j.contains("communities") || !j["communities"].is_array()) {
    throw Error(ErrorCode::kParse, path.string() + ": missing 'communities' array");
  }
  const std::size_t unset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> assignment(labels.size(), unset);
  std::size_t c = 0;
  for (const auto& group : j["communities"]) {
    for (const auto& id : group) {
      const std::string name = id.is_string() ? id.get<std::string>() : id.dump();
      auto node = labels.find(name);
      if (!node) throw Error(ErrorCode::kNodeSetMismatch, "partition names unknown node '" + name + "'");
      if (assignment[*node] != unset) {
        throw Error(ErrorCode::kParse, "node '" + name + "' appears in two communities");
      }
      assignment[*node] = c;
    }
    ++c;
  }
  for (NodeId v = 0; v < assignment.size(); ++v) {
    if (assignment[v] == unset) {
      throw Error(ErrorCode::kNodeSetMismatch, "partition omits node '" + labels.id(v) + "'");
    }
  }
  return Partition(assignment);
}

std::string format_double(double value) {
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), end);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

}  // namespace syncomm
