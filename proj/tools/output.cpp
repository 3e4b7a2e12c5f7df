#include "output.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace multcorr::cli {

std::string format_float(double v) {
  if (!std::isfinite(v)) return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
  if (v == 0.0) v = 0.0;  // normalize -0
  char buf[64];
  std::snprintf(buf, sizeof buf, "%#.12g", v);
  std::string s = buf;
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

namespace {

double parse_double_full(const std::string& text, const std::string& what) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw std::invalid_argument(what + " is not a number: '" + text + "'");
  }
  return v;
}

}  // namespace

std::uint64_t parse_count(const std::string& text, const std::string& what) {
  std::uint64_t direct = 0;
  {
    const char* first = text.data();
    const char* last = first + text.size();
    auto [ptr, ec] = std::from_chars(first, last, direct);
    if (ec == std::errc() && ptr == last) {
      if (direct > (std::uint64_t{1} << 53)) {
        throw std::invalid_argument(what + " exceeds 2^53: '" + text + "'");
      }
      return direct;
    }
  }
  const double v = parse_double_full(text, what);
  if (v < 0.0 || v > 9007199254740992.0 /* 2^53 */) {
    throw std::invalid_argument(what + " out of range [0, 2^53]: '" + text +
                                "'");
  }
  if (v != std::nearbyint(v)) {
    throw std::invalid_argument(what + " must be an integer: '" + text + "'");
  }
  return static_cast<std::uint64_t>(v);
}

double parse_real(const std::string& text, const std::string& what) {
  return parse_double_full(text, what);
}

std::int64_t parse_int(const std::string& text, const std::string& what) {
  std::int64_t v = 0;
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw std::invalid_argument(what + " is not an integer: '" + text + "'");
  }
  return v;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(v));
  return buf;
}

std::string json_escape(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (unsigned char c : text) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (c < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += static_cast<char>(c);
        }
    }
  }
  return out;
}

void JsonObject::key(const std::string& name) {
  if (!first_) body_ += ',';
  first_ = false;
  body_ += '"';
  body_ += json_escape(name);
  body_ += "\":";
}

JsonObject& JsonObject::num(const std::string& name, double v) {
  key(name);
  body_ += std::isfinite(v) ? format_float(v) : std::string("null");
  return *this;
}

JsonObject& JsonObject::integer(const std::string& name, std::int64_t v) {
  key(name);
  body_ += std::to_string(v);
  return *this;
}

JsonObject& JsonObject::unsigned_integer(const std::string& name,
                                         std::uint64_t v) {
  key(name);
  body_ += std::to_string(v);
  return *this;
}

JsonObject& JsonObject::str(const std::string& name, const std::string& v) {
  key(name);
  body_ += '"';
  body_ += json_escape(v);
  body_ += '"';
  return *this;
}

JsonObject& JsonObject::boolean(const std::string& name, bool v) {
  key(name);
  body_ += v ? "true" : "false";
  return *this;
}

JsonObject& JsonObject::null_field(const std::string& name) {
  key(name);
  body_ += "null";
  return *this;
}

JsonObject& JsonObject::raw(const std::string& name,
                            const std::string& json_text) {
  key(name);
  body_ += json_text;
  return *this;
}

std::string JsonObject::done() {
  body_ += '}';
  return std::move(body_);
}

void JsonArray::sep() {
  if (!first_) body_ += ',';
  first_ = false;
}

JsonArray& JsonArray::push_raw(const std::string& json_text) {
  sep();
  body_ += json_text;
  return *this;
}

JsonArray& JsonArray::push_str(const std::string& v) {
  sep();
  body_ += '"';
  body_ += json_escape(v);
  body_ += '"';
  return *this;
}

JsonArray& JsonArray::push_num(double v) {
  sep();
  body_ += std::isfinite(v) ? format_float(v) : std::string("null");
  return *this;
}

std::string JsonArray::done() {
  body_ += ']';
  return std::move(body_);
}

std::string suggest(const std::string& token,
                    const std::vector<std::string>& candidates) {
  auto edit_distance = [](const std::string& a, const std::string& b) {
    std::vector<std::size_t> row(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
      std::size_t prev = row[0];
      row[0] = i;
      for (std::size_t j = 1; j <= b.size(); ++j) {
        const std::size_t cur = row[j];
        const std::size_t subst = prev + (a[i - 1] == b[j - 1] ? 0 : 1);
        row[j] = std::min({row[j] + 1, row[j - 1] + 1, subst});
        prev = cur;
      }
    }
    return row[b.size()];
  };
  std::string best;
  std::size_t best_dist = 4;  // only offer reasonably close names
  for (const std::string& c : candidates) {
    const std::size_t d = edit_distance(token, c);
    if (d < best_dist) {
      best_dist = d;
      best = c;
    }
  }
  return best;
}

}  // namespace multcorr::cli
