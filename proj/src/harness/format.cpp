#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "smallcap/harness.hpp"

namespace smallcap::harness {

namespace {

void trim_fraction_zeros(std::string& digits) {
  if (digits.find('.') == std::string::npos) return;
  while (!digits.empty() && digits.back() == '0') digits.pop_back();
  if (!digits.empty() && digits.back() == '.') digits.pop_back();
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.11e", v);
  std::string sci(buf);
  const auto epos = sci.find('e');
  const int exponent = std::atoi(sci.c_str() + epos + 1);
  if (exponent >= 9 || exponent < -9) {
    std::string mantissa = sci.substr(0, epos);
    trim_fraction_zeros(mantissa);
    return mantissa + sci.substr(epos);
  }
  const int decimals = std::max(0, 11 - exponent);
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  std::string fixed(buf);
  trim_fraction_zeros(fixed);
  return fixed;
}

double rounded(double v) {
  if (!std::isfinite(v)) return v;
  return std::strtod(format_number(v).c_str(), nullptr);
}

std::string CsvTable::str() const {
  auto field = [](const std::string& f) {
    if (f.find_first_of(",\"\n") == std::string::npos) return f;
    std::string q = "\"";
    for (char c : f) {
      if (c == '"') q += '"';
      q += c;
    }
    return q + "\"";
  };
  auto line = [&](const std::vector<std::string>& cells) {
    std::string out;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += field(cells[i]);
    }
    return out + "\n";
  };
  std::string out = line(header);
  for (const auto& r : rows) out += line(r);
  return out;
}

}  // namespace smallcap::harness
