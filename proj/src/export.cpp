#include "psurf/export.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include <json.hpp>

#include "psurf/errors.hpp"

namespace psurf {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  return os;
}

std::string full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void write_obj(std::ostream& os, const SurfaceGrid& s, const ObjOptions& opt) {
  os << "# lambda " << full(s.lambda) << " grid " << s.nx << " x " << s.ny << "\n";
  for (const Vec3& p : s.points) os << "v " << full(p.x()) << ' ' << full(p.y()) << ' ' << full(p.z()) << "\n";
  for (const Vec3& n : s.normals) os << "vn " << full(n.x()) << ' ' << full(n.y()) << ' ' << full(n.z()) << "\n";
  for (std::size_t j = 0; j + 1 < s.ny; ++j) {
    for (std::size_t i = 0; i + 1 < s.nx; ++i) {
      const std::size_t q[4] = {s.index(i, j), s.index(i + 1, j), s.index(i + 1, j + 1), s.index(i, j + 1)};
      if (opt.drop_degenerate_faces &&
          (s.degenerate[q[0]] || s.degenerate[q[1]] || s.degenerate[q[2]] || s.degenerate[q[3]]))
        continue;
      os << 'f';
      for (std::size_t k : q) os << ' ' << k + 1 << "//" << k + 1;
      os << "\n";
    }
  }
}

void write_obj(const std::filesystem::path& path, const SurfaceGrid& s, const ObjOptions& opt) {
  auto os = open_out(path);
  write_obj(os, s, opt);
}

void write_csv(std::ostream& os, const SurfaceGrid& s) {
  os << "x,y,fx,fy,fz,phi,degenerate\r\n";
  for (std::size_t j = 0; j < s.ny; ++j) {
    for (std::size_t i = 0; i < s.nx; ++i) {
      const std::size_t k = s.index(i, j);
      const Vec3& p = s.points[k];
      os << full(s.xs[i]) << ',' << full(s.ys[j]) << ',' << full(p.x()) << ',' << full(p.y()) << ','
         << full(p.z()) << ',' << full(s.phi[k]) << ',' << (s.degenerate[k] ? 1 : 0) << "\r\n";
    }
  }
}

void write_csv(const std::filesystem::path& path, const SurfaceGrid& s) {
  auto os = open_out(path);
  write_csv(os, s);
}

void Report::add(const std::string& key, double v) { entries_.emplace_back(key, format_number(v)); }
void Report::add(const std::string& key, bool v) { entries_.emplace_back(key, v ? "true" : "false"); }
void Report::add(const std::string& key, std::size_t v) { entries_.emplace_back(key, std::to_string(v)); }
void Report::add(const std::string& key, int v) { entries_.emplace_back(key, std::to_string(v)); }
void Report::add(const std::string& key, const std::string& v) { entries_.emplace_back(key, v); }

void Report::append(const std::vector<std::pair<std::string, std::string>>& kv, const std::string& prefix) {
  for (const auto& [k, v] : kv) entries_.emplace_back(prefix + k, v);
}

const std::string* Report::find(const std::string& key) const {
  for (const auto& [k, v] : entries_)
    if (k == key) return &v;
  return nullptr;
}

void Report::write_text(std::ostream& os) const {
  for (const auto& [k, v] : entries_) os << k << ": " << v << "\n";
}

void Report::write_json(std::ostream& os) const {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [k, v] : entries_) {
    if (v == "true" || v == "false") {
      j[k] = (v == "true");
      continue;
    }
    std::size_t used = 0;
    double d = 0.0;
    try {
      d = std::stod(v, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == v.size() && !v.empty() && std::isfinite(d))
      j[k] = d;
    else
      j[k] = v;
  }
  os << j.dump(2) << "\n";
}

void Report::save(const std::filesystem::path& text_path, const std::filesystem::path& json_path) const {
  {
    auto os = open_out(text_path);
    write_text(os);
  }
  auto os = open_out(json_path);
  write_json(os);
}

std::vector<std::pair<std::string, std::string>> read_report(std::istream& is) {
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  while (std::getline(is, line)) {
    const auto c = line.find(": ");
    if (c == std::string::npos) continue;
    out.emplace_back(line.substr(0, c), line.substr(c + 2));
  }
  return out;
}

}  // namespace psurf
