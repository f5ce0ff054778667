#pragma once

#include <string>
#include <vector>

#include "anisotex/core.hpp"
#include "json.hpp"

namespace anisotex {

using Json = nlohmann::ordered_json;

Json field_spec_to_json(const FieldSpec& spec);
// rejects unknown keys and inadmissible specs with DomainError
FieldSpec field_spec_from_json(const Json& j);

inline constexpr std::uint32_t kAnifVersion = 1;

// "ANIF", u32 version, u32 n, u32 json length, json, n*n f64; all little-endian
std::string encode_anif(const SampledField& f);
SampledField decode_anif(const std::string& bytes);

void write_anif(const std::string& path, const SampledField& f);
SampledField read_anif(const std::string& path);

// writes to a sibling temp file, then renames over `path`
void atomic_write(const std::string& path, const std::string& bytes);
std::string read_file(const std::string& path);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  size_t column(const std::string& name) const;  // throws DomainError when absent
  double number(size_t row, const std::string& name) const;
};

std::string format_number(double v);  // shortest round-trip form, '.' separator
std::string encode_csv(const CsvTable& t);
CsvTable decode_csv(const std::string& text);

}  // namespace anisotex
