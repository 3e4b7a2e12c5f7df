#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace multcorr::cli {

// All floats on the primary output stream carry 12 significant digits with
// trailing zeros kept, so byte-identical reruns are trivial to diff.
std::string format_float(double v);

// Integer-valued sizes accepting scientific notation ("1e7", "2.5e6");
// rejects non-integral or out-of-range (> 2^53) values.
std::uint64_t parse_count(const std::string& text, const std::string& what);

double parse_real(const std::string& text, const std::string& what);
std::int64_t parse_int(const std::string& text, const std::string& what);

// FNV-1a 64-bit checksum of a byte string, and its fixed-width hex form.
std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t v);

std::string json_escape(const std::string& text);

// Minimal ordered-field JSON writers; field order is insertion order, which
// keeps every output stream deterministic.
class JsonObject {
 public:
  JsonObject& num(const std::string& name, double v);
  JsonObject& integer(const std::string& name, std::int64_t v);
  JsonObject& unsigned_integer(const std::string& name, std::uint64_t v);
  JsonObject& str(const std::string& name, const std::string& v);
  JsonObject& boolean(const std::string& name, bool v);
  JsonObject& null_field(const std::string& name);
  JsonObject& raw(const std::string& name, const std::string& json_text);
  std::string done();

 private:
  void key(const std::string& name);
  std::string body_ = "{";
  bool first_ = true;
};

class JsonArray {
 public:
  JsonArray& push_raw(const std::string& json_text);
  JsonArray& push_str(const std::string& v);
  JsonArray& push_num(double v);
  std::string done();

 private:
  void sep();
  std::string body_ = "[";
  bool first_ = true;
};

// Nearest command name by edit distance, or empty when nothing is close.
std::string suggest(const std::string& token,
                    const std::vector<std::string>& candidates);

}  // namespace multcorr::cli
