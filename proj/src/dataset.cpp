#include "pwshape/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "pwshape/errors.hpp"

namespace pwshape {

const std::vector<LandmarkConfig>& Dataset::group(const std::string& label) const {
  auto it = groups.find(label);
  if (it == groups.end()) throw DataError("unknown group '" + label + "'");
  return it->second;
}

std::size_t Dataset::size() const {
  std::size_t n = 0;
  for (const auto& [label, specs] : groups) n += specs.size();
  return n;
}

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find('\t', start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_double(const std::string& s, int line) {
  double v = 0.0;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || p != e || !std::isfinite(v)) throw DataError("bad number '" + s + "'", line);
  return v;
}

struct RawSpecimen {
  std::string group, id;
  std::vector<std::pair<int, std::vector<double>>> points;
  int first_line = 0;
};

}  // namespace

Dataset read_landmarks(std::istream& in) {
  std::vector<RawSpecimen> raw;
  std::map<std::pair<std::string, std::string>, std::size_t> index;
  std::string line;
  int lineno = 0, K = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto f = split_tabs(line);
    if (f.size() != 5 && f.size() != 6) throw DataError("expected 5 or 6 tab-separated fields", lineno);
    if (f[0].empty() || f[1].empty()) throw DataError("empty group or specimen id", lineno);
    const int k = static_cast<int>(f.size()) - 3;
    if (K == 0) K = k;
    if (k != K) throw DataError("inconsistent K: expected " + std::to_string(K) + " coordinates", lineno);
    int li = 0;
    auto [p, ec] = std::from_chars(f[2].data(), f[2].data() + f[2].size(), li);
    if (ec != std::errc() || p != f[2].data() + f[2].size()) throw DataError("bad landmark index '" + f[2] + "'", lineno);
    std::vector<double> xyz;
    for (int j = 0; j < k; ++j) xyz.push_back(parse_double(f[3 + j], lineno));
    auto key = std::make_pair(f[0], f[1]);
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, raw.size()).first;
      raw.push_back({f[0], f[1], {}, lineno});
    }
    auto& pts = raw[it->second].points;
    if (std::any_of(pts.begin(), pts.end(), [&](const auto& q) { return q.first == li; }))
      throw DataError("duplicate landmark " + f[2] + " for specimen " + f[1], lineno);
    pts.emplace_back(li, std::move(xyz));
  }
  if (raw.empty()) throw DataError("no landmark records found", lineno);

  // N is the most common landmark count; any other count is reported by specimen
  std::map<std::size_t, int> counts;
  for (const auto& r : raw) ++counts[r.points.size()];
  std::size_t N = 0;
  int best = -1;
  for (const auto& [n, c] : counts)
    if (c > best) {
      best = c;
      N = n;
    }
  for (const auto& r : raw)
    if (r.points.size() != N)
      throw DataError("inconsistent N: specimen " + r.id + " (group " + r.group + ") has " +
                          std::to_string(r.points.size()) + " landmarks, expected " + std::to_string(N),
                      r.first_line);

  Dataset ds;
  ds.N = static_cast<int>(N);
  ds.K = K;
  for (auto& r : raw) {
    std::sort(r.points.begin(), r.points.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    LandmarkConfig c;
    c.id = r.id;
    c.group = r.group;
    c.X.resize(N, K);
    for (std::size_t i = 0; i < N; ++i)
      for (int j = 0; j < K; ++j) c.X(i, j) = r.points[i].second[j];
    ds.groups[r.group].push_back(std::move(c));
  }
  return ds;
}

Dataset read_landmarks(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return read_landmarks(in);
}

void write_landmarks(const Dataset& data, std::ostream& out) {
  out << std::setprecision(17);
  for (const auto& [label, specs] : data.groups)
    for (const auto& c : specs)
      for (Eigen::Index i = 0; i < c.X.rows(); ++i) {
        out << label << '\t' << c.id << '\t' << (i + 1);
        for (Eigen::Index j = 0; j < c.X.cols(); ++j) out << '\t' << c.X(i, j);
        out << '\n';
      }
}

void write_landmarks(const Dataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  write_landmarks(data, out);
}

}  // namespace pwshape
