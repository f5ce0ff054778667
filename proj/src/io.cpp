#include "anisotex/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <system_error>
#include <unistd.h>

namespace anisotex {

static_assert(std::endian::native == std::endian::little, "ANIF i/o assumes a little-endian host");

Json field_spec_to_json(const FieldSpec& s) {
  const Anisotropy& a = s.anisotropy;
  return Json{{"rho", s.rho},
              {"alpha0", s.alpha0()},
              {"hurst", s.hurst},
              {"grid_n", s.grid_n},
              {"seed", s.seed},
              {"padding", s.padding},
              {"alias_terms", s.alias_terms},
              {"anisotropy",
               {{"lambda1", a.lambda1()}, {"lambda2", a.lambda2()}, {"e1", {a.e1()[0], a.e1()[1]}}, {"e2", {a.e2()[0], a.e2()[1]}}}}};
}

FieldSpec field_spec_from_json(const Json& j) {
  if (!j.is_object()) throw DomainError("field spec must be a JSON object");
  static const std::vector<std::string> known{"rho", "alpha0", "hurst", "grid_n", "seed",
                                               "padding", "alias_terms", "anisotropy"};
  for (const auto& [k, v] : j.items())
    if (std::find(known.begin(), known.end(), k) == known.end()) throw DomainError("unknown spec key '" + k + "'");
  try {
    FieldSpec s;
    s.anisotropy = Anisotropy::diagonal(j.at("alpha0").get<double>());
    s.hurst = j.at("hurst").get<double>();
    s.rho = j.value("rho", std::string("power_sum"));
    s.grid_n = j.at("grid_n").get<int>();
    s.seed = j.value("seed", std::uint64_t{0});
    s.padding = j.value("padding", 4);
    s.alias_terms = j.value("alias_terms", 2);
    require_valid(s);
    return s;
  } catch (const Json::exception& e) {
    throw DomainError(std::string("malformed field spec: ") + e.what());
  }
}

namespace {

void put_u32(std::string& out, std::uint32_t v) {
  char b[4];
  std::memcpy(b, &v, 4);
  out.append(b, 4);
}

std::uint32_t get_u32(const std::string& in, size_t& pos) {
  if (pos + 4 > in.size()) throw DomainError("truncated ANIF data");
  std::uint32_t v;
  std::memcpy(&v, in.data() + pos, 4);
  pos += 4;
  return v;
}

}  // namespace

std::string encode_anif(const SampledField& f) {
  const std::string js = field_spec_to_json(f.spec).dump();
  std::string out = "ANIF";
  put_u32(out, kAnifVersion);
  put_u32(out, static_cast<std::uint32_t>(f.n));
  put_u32(out, static_cast<std::uint32_t>(js.size()));
  out += js;
  const size_t off = out.size();
  out.resize(off + f.values.size() * sizeof(double));
  std::memcpy(out.data() + off, f.values.data(), f.values.size() * sizeof(double));
  return out;
}

SampledField decode_anif(const std::string& in) {
  if (in.size() < 4 || in.compare(0, 4, "ANIF") != 0) throw DomainError("not an ANIF file (bad magic)");
  size_t pos = 4;
  const std::uint32_t version = get_u32(in, pos);
  if (version != kAnifVersion) throw DomainError("unsupported ANIF version " + std::to_string(version));
  const std::uint32_t n = get_u32(in, pos);
  const std::uint32_t len = get_u32(in, pos);
  if (pos + len > in.size()) throw DomainError("truncated ANIF header");
  Json j;
  try {
    j = Json::parse(in.substr(pos, len));
  } catch (const Json::exception& e) {
    throw DomainError(std::string("bad ANIF header JSON: ") + e.what());
  }
  pos += len;
  SampledField f;
  f.spec = field_spec_from_json(j);
  f.n = static_cast<int>(n);
  if (f.spec.grid_n != f.n) throw DomainError("ANIF size disagrees with its spec");
  const size_t count = static_cast<size_t>(n) * n;
  if (in.size() - pos != count * sizeof(double)) throw DomainError("ANIF payload has the wrong length");
  f.values.resize(count);
  std::memcpy(f.values.data(), in.data() + pos, count * sizeof(double));
  for (double v : f.values)
    if (!std::isfinite(v)) throw DomainError("ANIF payload contains non-finite values");
  return f;
}

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DomainError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void atomic_write(const std::string& path, const std::string& bytes) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw DomainError("cannot write '" + tmp.string() + "'");
    os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    os.flush();
    if (!os) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw NumericalError("write to '" + tmp.string() + "' failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw DomainError("cannot rename onto '" + path + "'");
  }
}

void write_anif(const std::string& path, const SampledField& f) { atomic_write(path, encode_anif(f)); }
SampledField read_anif(const std::string& path) { return decode_anif(read_file(path)); }

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

size_t CsvTable::column(const std::string& name) const {
  for (size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw DomainError("csv has no column '" + name + "'");
}

double CsvTable::number(size_t row, const std::string& name) const {
  const std::string& s = rows.at(row).at(column(name));
  if (s == "nan") return std::nan("");
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  double v = 0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw DomainError("bad number '" + s + "' in csv");
  return v;
}

std::string encode_csv(const CsvTable& t) {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(t.header);
  for (const auto& r : t.rows) {
    if (r.size() != t.header.size()) throw NumericalError("csv row width mismatch");
    line(r);
  }
  return out;
}

CsvTable decode_csv(const std::string& text) {
  CsvTable t;
  std::istringstream is(text);
  std::string line;
  bool first = true;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (line.back() == ',') cells.emplace_back();
    if (first) {
      t.header = std::move(cells);
      first = false;
    } else {
      if (cells.size() != t.header.size()) throw DomainError("csv row width differs from header");
      t.rows.push_back(std::move(cells));
    }
  }
  if (first) throw DomainError("empty csv");
  return t;
}

}  // namespace anisotex
