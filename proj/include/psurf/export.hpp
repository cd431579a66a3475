#pragma once

// Mesh, table and report writers.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "psurf/surface.hpp"

namespace psurf {

struct ObjOptions {
  bool drop_degenerate_faces = false;  // vertices are always kept
};

/// v / vn per node in lattice order, then one quad per cell (1-based, v//vn).
void write_obj(std::ostream& os, const SurfaceGrid& s, const ObjOptions& opt = {});
void write_obj(const std::filesystem::path& path, const SurfaceGrid& s, const ObjOptions& opt = {});

/// Header x,y,fx,fy,fz,phi,degenerate; CRLF records; degenerate as 0/1.
void write_csv(std::ostream& os, const SurfaceGrid& s);
void write_csv(const std::filesystem::path& path, const SurfaceGrid& s);

/// Ordered flat key/value report.
class Report {
 public:
  void add(const std::string& key, double v);
  void add(const std::string& key, bool v);
  void add(const std::string& key, std::size_t v);
  void add(const std::string& key, int v);
  void add(const std::string& key, const std::string& v);
  void add(const std::string& key, const char* v) { add(key, std::string(v)); }
  void append(const std::vector<std::pair<std::string, std::string>>& kv, const std::string& prefix = "");

  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }
  const std::string* find(const std::string& key) const;

  /// "key: value" lines.
  void write_text(std::ostream& os) const;
  /// One flat JSON object; numbers and booleans unquoted.
  void write_json(std::ostream& os) const;
  void save(const std::filesystem::path& text_path, const std::filesystem::path& json_path) const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

std::string format_number(double v);

/// Parses "key: value" lines as written by Report::write_text.
std::vector<std::pair<std::string, std::string>> read_report(std::istream& is);

}  // namespace psurf
