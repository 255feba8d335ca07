#include "fastlim/snapshot.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fastlim {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void atomic_write_file(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + tmp);
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

std::uint64_t parameter_hash(const Parameters& prm) {
  const double vals[] = {prm.d1, prm.d2, prm.d3, prm.r0, prm.eta, prm.alpha,
                         prm.xi, prm.gamma, prm.Gamma, prm.mu, prm.eps, prm.p_energy};
  std::uint64_t h = 1469598103934665603ull;
  for (double v : vals) {
    for (char c : fmt17(v)) {
      h ^= static_cast<unsigned char>(c);
      h *= 1099511628211ull;
    }
    h ^= static_cast<unsigned char>(';');
    h *= 1099511628211ull;
  }
  return h;
}

namespace {

std::string header_text(const Grid& g, double t, const Parameters& prm,
                        const std::vector<std::string>& fields) {
  std::ostringstream out;
  out << "fastlim_snapshot,v1\n";
  out << "t," << fmt17(t) << "\n";
  out << "dim," << g.dim << "\n";
  out << "cells_x," << g.nx << "\n";
  out << "cells_y," << g.ny << "\n";
  out << "extent_x," << fmt17(g.Lx) << "\n";
  out << "extent_y," << fmt17(g.Ly) << "\n";
  char hash[20];
  std::snprintf(hash, sizeof(hash), "%016llx",
                static_cast<unsigned long long>(parameter_hash(prm)));
  out << "param_hash," << hash << "\n";
  out << "fields";
  for (const std::string& f : fields) out << "," << f;
  out << "\n";
  return out.str();
}

void append_rows(std::ostringstream& out, const std::vector<const Field*>& cols,
                 std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      if (c) out << ",";
      out << fmt17((*cols[c])[i]);
    }
    out << "\n";
  }
}

struct RawSnapshot {
  SnapshotHeader header;
  std::vector<Field> columns;
};

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

RawSnapshot read_snapshot_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open snapshot: " + path);

  auto next_line = [&](std::string& line) {
    if (!std::getline(in, line)) throw std::runtime_error("snapshot truncated in header: " + path);
  };

  std::string line;
  next_line(line);
  if (split_csv(line) != std::vector<std::string>{"fastlim_snapshot", "v1"}) {
    throw std::runtime_error("not a fastlim snapshot: " + path);
  }

  RawSnapshot snap;
  Grid& g = snap.header.grid;
  auto expect = [&](const char* key) -> std::string {
    next_line(line);
    const std::vector<std::string> kv = split_csv(line);
    if (kv.size() < 2 || kv[0] != key) {
      throw std::runtime_error(std::string("snapshot header: expected '") + key + "' in " + path);
    }
    return kv[1];
  };
  snap.header.t = std::strtod(expect("t").c_str(), nullptr);
  g.dim = std::atoi(expect("dim").c_str());
  g.nx = std::atoi(expect("cells_x").c_str());
  g.ny = std::atoi(expect("cells_y").c_str());
  g.Lx = std::strtod(expect("extent_x").c_str(), nullptr);
  g.Ly = std::strtod(expect("extent_y").c_str(), nullptr);
  snap.header.param_hash = std::strtoull(expect("param_hash").c_str(), nullptr, 16);
  g.validate();

  next_line(line);
  std::vector<std::string> fields = split_csv(line);
  if (fields.size() < 2 || fields[0] != "fields") {
    throw std::runtime_error("snapshot header: missing field list in " + path);
  }
  fields.erase(fields.begin());
  snap.header.field_names = fields;

  const std::size_t n = g.size();
  snap.columns.assign(fields.size(), Field(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::getline(in, line)) {
      throw std::runtime_error("snapshot truncated: expected " + std::to_string(n) +
                               " data rows in " + path);
    }
    const std::vector<std::string> cells = split_csv(line);
    if (cells.size() != fields.size()) {
      throw std::runtime_error("snapshot row " + std::to_string(i) + ": expected " +
                               std::to_string(fields.size()) + " values in " + path);
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      char* end = nullptr;
      snap.columns[c][i] = std::strtod(cells[c].c_str(), &end);
      if (end == cells[c].c_str()) {
        throw std::runtime_error("snapshot row " + std::to_string(i) + ": bad number '" +
                                 cells[c] + "' in " + path);
      }
    }
  }
  return snap;
}

} // namespace

void write_fast_snapshot(const std::string& path, const Grid& g,
                         const FastState& st, const Parameters& prm) {
  std::ostringstream out;
  out << header_text(g, st.t, prm, {"N", "ps", "ph"});
  append_rows(out, {&st.N, &st.ps, &st.ph}, g.size());
  atomic_write_file(path, out.str());
}

void write_limit_snapshot(const std::string& path, const Grid& g,
                          const LimitState& st, const Parameters& prm) {
  std::ostringstream out;
  out << header_text(g, st.t, prm, {"N", "P"});
  append_rows(out, {&st.N, &st.P}, g.size());
  atomic_write_file(path, out.str());
}

FastState read_fast_snapshot(const std::string& path, SnapshotHeader* header) {
  RawSnapshot snap = read_snapshot_file(path);
  if (snap.header.field_names != std::vector<std::string>{"N", "ps", "ph"}) {
    throw std::runtime_error("snapshot has wrong field set for a fast state: " + path);
  }
  if (header) *header = snap.header;
  FastState st;
  st.t = snap.header.t;
  st.N = std::move(snap.columns[0]);
  st.ps = std::move(snap.columns[1]);
  st.ph = std::move(snap.columns[2]);
  return st;
}

LimitState read_limit_snapshot(const std::string& path, SnapshotHeader* header) {
  RawSnapshot snap = read_snapshot_file(path);
  if (snap.header.field_names != std::vector<std::string>{"N", "P"}) {
    throw std::runtime_error("snapshot has wrong field set for a limit state: " + path);
  }
  if (header) *header = snap.header;
  LimitState st;
  st.t = snap.header.t;
  st.N = std::move(snap.columns[0]);
  st.P = std::move(snap.columns[1]);
  return st;
}

} // namespace fastlim
