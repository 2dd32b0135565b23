#pragma once

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "advlb/classifier.hpp"
#include "advlb/errors.hpp"

namespace advlb {

struct ManifestEntry {
  std::filesystem::path path;  // resolved against the manifest's directory
  LabelId label = 0;
  std::vector<std::string> extra;  // columns after path,label
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;
  std::vector<std::string> class_names;  // may be empty when unknown
  std::size_t num_classes = 0;
};

namespace detail {

// One CSV record; double-quoted fields may contain commas and "" escapes.
inline std::vector<std::string> split_csv_line(const std::string& line, std::size_t line_no,
                                               const std::string& origin) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (quoted) {
    throw DomainError(origin + ":" + std::to_string(line_no) + ": unterminated quoted field");
  }
  fields.push_back(std::move(cur));
  return fields;
}

}  // namespace detail

inline DatasetManifest parse_manifest(std::istream& in, std::size_t num_classes,
                                      const std::filesystem::path& base_dir,
                                      const std::string& origin = "manifest") {
  DatasetManifest m;
  m.num_classes = num_classes;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::set<std::string> seen;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (line.empty()) continue;
    const auto fields = detail::split_csv_line(line, line_no, origin);
    const auto where = origin + ":" + std::to_string(line_no) + ": ";

    if (!header_seen) {
      if (fields.size() < 2 || fields[0] != "path" || fields[1] != "label") {
        throw DomainError(where + "expected header 'path,label'");
      }
      header_seen = true;
      continue;
    }
    if (fields.size() < 2) throw DomainError(where + "expected at least 2 columns (path,label)");
    if (fields[0].empty()) throw DomainError(where + "empty path");

    std::size_t consumed = 0;
    long long label = -1;
    try {
      label = std::stoll(fields[1], &consumed);
    } catch (const std::exception&) {
      consumed = 0;
    }
    if (consumed == 0 || consumed != fields[1].size()) {
      throw DomainError(where + "label '" + fields[1] + "' is not an integer");
    }
    if (label < 0 || static_cast<std::size_t>(label) >= num_classes) {
      throw DomainError(where + "label " + fields[1] + " out of range [0, " +
                        std::to_string(num_classes) + ")");
    }

    std::filesystem::path p = std::filesystem::u8path(fields[0]);
    if (p.is_relative()) p = base_dir / p;
    p = p.lexically_normal();
    if (!seen.insert(p.string()).second) {
      throw DomainError(where + "duplicate path '" + fields[0] + "'");
    }
    m.entries.push_back({p, static_cast<LabelId>(label),
                         std::vector<std::string>(fields.begin() + 2, fields.end())});
  }
  if (m.entries.empty()) throw DomainError(origin + ": empty manifest");
  return m;
}

// CSV with header `path,label`; relative paths resolve against the
// manifest's own directory.
inline DatasetManifest load_manifest(const std::filesystem::path& path, std::size_t num_classes) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError("cannot open manifest " + path.string());
  return parse_manifest(in, num_classes, path.parent_path(), path.string());
}

// One class name per line, index order.
inline std::vector<std::string> load_class_names(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError("cannot open class name table " + path.string());
  std::vector<std::string> names;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    names.push_back(line);
  }
  while (!names.empty() && names.back().empty()) names.pop_back();
  return names;
}

}  // namespace advlb
