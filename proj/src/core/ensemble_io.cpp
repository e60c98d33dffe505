#include "fracnelson/core/ensemble_io.h"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "fracnelson/core/errors.h"

namespace fracnelson::core {

std::string format_double(double x) {
  std::array<char, 64> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x, std::chars_format::general, 17);
  return std::string(buf.data(), res.ptr);
}

namespace {

double parse_double(const std::string& s) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw FormatError("not a number: '" + s + "'");
  return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  fields.push_back(cur);
  return fields;
}

template <class T>
void put(std::ostream& out, T v) {
  static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);
  std::array<char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  out.write(bytes.data(), sizeof(T));
}

template <class T>
T get(std::istream& in) {
  std::array<char, sizeof(T)> bytes;
  if (!in.read(bytes.data(), sizeof(T))) throw FormatError("FNE1 file truncated");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T v;
  std::memcpy(&v, bytes.data(), sizeof(T));
  return v;
}

constexpr std::array<char, 4> kMagic{'F', 'N', 'E', '1'};

}  // namespace

void write_csv(std::ostream& out, const PathEnsemble& e) {
  const bool dw = e.has_driver();
  out << "path_id,t,value" << (dw ? ",dW" : "") << "\r\n";
  const auto& g = e.grid();
  for (std::size_t i = 0; i < e.n_paths(); ++i) {
    for (std::size_t k = 0; k < g.size(); ++k) {
      out << i << ',' << format_double(g[k]) << ',' << format_double(e.value(i, k));
      if (dw) {
        out << ',';
        if (k > 0) out << format_double(e.driver(i)[k - 1]);
      }
      out << "\r\n";
    }
  }
}

PathEnsemble read_csv(std::istream& in, const std::string& label) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty CSV");
  auto header = split_csv_line(line);
  bool dw = header.size() == 4 && header[3] == "dW";
  if (header.size() < 3 || header[0] != "path_id" || header[1] != "t" || header[2] != "value" ||
      (header.size() == 4 && !dw) || header.size() > 4) {
    throw FormatError("CSV header must be path_id,t,value[,dW]");
  }
  std::vector<double> times, values, driver;
  std::size_t n_paths = 0;
  long current = -1;
  std::size_t k = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto f = split_csv_line(line);
    if (f.size() != header.size()) throw FormatError("CSV line " + std::to_string(line_no) + ": wrong field count");
    long id = std::stol(f[0]);
    if (id != current) {
      if (current >= 0 && k != times.size()) throw FormatError("CSV paths have different lengths");
      if (id != current + 1) throw FormatError("CSV path ids must be consecutive from 0");
      current = id;
      ++n_paths;
      k = 0;
    }
    double t = parse_double(f[1]);
    if (n_paths == 1) {
      times.push_back(t);
    } else if (k >= times.size() || times[k] != t) {
      throw FormatError("CSV line " + std::to_string(line_no) + ": time does not match first path");
    }
    values.push_back(parse_double(f[2]));
    if (dw && k > 0) driver.push_back(parse_double(f[3]));
    ++k;
  }
  if (n_paths == 0) throw FormatError("CSV has no data rows");
  if (k != times.size()) throw FormatError("CSV paths have different lengths");
  std::optional<std::vector<double>> drv;
  if (dw) drv = std::move(driver);
  return PathEnsemble(TimeGrid(std::move(times)), n_paths, std::move(values), std::move(drv), label);
}

void write_binary(std::ostream& out, const PathEnsemble& e) {
  out.write(kMagic.data(), kMagic.size());
  put<std::uint64_t>(out, e.n_points());
  put<std::uint64_t>(out, e.n_paths());
  put<std::uint8_t>(out, e.has_driver() ? 1 : 0);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(e.label().size()));
  out.write(e.label().data(), static_cast<std::streamsize>(e.label().size()));
  for (double t : e.grid().points()) put<double>(out, t);
  for (double v : e.values()) put<double>(out, v);
  if (e.has_driver())
    for (double v : e.driver_values()) put<double>(out, v);
}

PathEnsemble read_binary(std::istream& in) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), 4) || magic != kMagic) {
    throw FormatError("not an ensemble file: missing magic header \"FNE1\"");
  }
  auto n_points = get<std::uint64_t>(in);
  auto n_paths = get<std::uint64_t>(in);
  auto has_driver = get<std::uint8_t>(in);
  auto label_len = get<std::uint32_t>(in);
  if (n_points < 2 || n_paths == 0 || has_driver > 1 || n_points > (1ULL << 32) || n_paths > (1ULL << 40)) {
    throw FormatError("FNE1 header is corrupted");
  }
  std::string label(label_len, '\0');
  if (label_len > 0 && !in.read(label.data(), label_len)) throw FormatError("FNE1 file truncated");
  std::vector<double> times(n_points);
  for (auto& t : times) t = get<double>(in);
  std::vector<double> values(n_points * n_paths);
  for (auto& v : values) v = get<double>(in);
  std::optional<std::vector<double>> driver;
  if (has_driver) {
    driver.emplace((n_points - 1) * n_paths);
    for (auto& v : *driver) v = get<double>(in);
  }
  return PathEnsemble(TimeGrid(std::move(times)), n_paths, std::move(values), std::move(driver), std::move(label));
}

void save(const std::string& path, const PathEnsemble& e) {
  bool csv = path.size() >= 4 && path.substr(path.size() - 4) == ".csv";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  if (csv) write_csv(out, e); else write_binary(out, e);
}

PathEnsemble load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  bool csv = path.size() >= 4 && path.substr(path.size() - 4) == ".csv";
  return csv ? read_csv(in) : read_binary(in);
}

}  // namespace fracnelson::core
