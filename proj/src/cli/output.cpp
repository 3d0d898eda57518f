#include <cmath>
#include <cstdio>
#include <sstream>

#include "hamel/cli.hpp"

namespace hamel::cli {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) v = 0.0;  // drop the sign of negative zero
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

void indent(std::ostringstream& os, int depth) {
  for (int i = 0; i < depth; ++i) os << "  ";
}

void emit(std::ostringstream& os, const nlohmann::json& j, int depth) {
  switch (j.type()) {
    case nlohmann::json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) os << ",\n";
        first = false;
        indent(os, depth + 1);
        os << nlohmann::json(key).dump() << ": ";
        emit(os, value, depth + 1);
      }
      os << "\n";
      indent(os, depth);
      os << "}";
      return;
    }
    case nlohmann::json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      bool scalars = true;
      for (const auto& v : j) scalars = scalars && !v.is_structured();
      os << "[";
      bool first = true;
      for (const auto& v : j) {
        if (!first) os << (scalars ? ", " : ",");
        first = false;
        if (!scalars) {
          os << "\n";
          indent(os, depth + 1);
        }
        emit(os, v, depth + 1);
      }
      if (!scalars) {
        os << "\n";
        indent(os, depth);
      }
      os << "]";
      return;
    }
    case nlohmann::json::value_t::number_float: {
      const double v = j.get<double>();
      os << (std::isfinite(v) ? format_number(v) : "null");
      return;
    }
    default:
      os << j.dump();
  }
}

}  // namespace

std::string dump_json(const nlohmann::json& j) {
  std::ostringstream os;
  emit(os, j, 0);
  os << "\n";
  return os.str();
}

}  // namespace hamel::cli
