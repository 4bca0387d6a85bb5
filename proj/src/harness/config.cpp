#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "smallcap/error.hpp"
#include "smallcap/harness.hpp"

namespace smallcap::harness {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string unquote(std::string v) {
  if (v.size() >= 2 && (v.front() == '"' || v.front() == '\'') && v.back() == v.front()) {
    return v.substr(1, v.size() - 2);
  }
  return v;
}

std::vector<std::string> split_commas(std::string_view text) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : text) {
    if (c == ',') {
      parts.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(trim(cur));
  std::erase_if(parts, [](const std::string& p) { return p.empty(); });
  return parts;
}

}  // namespace

double parse_real(std::string_view text) {
  const std::string s = trim(text);
  if (s.empty()) throw ValidationError("expected a number, got an empty value");
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v)) {
    throw ValidationError("not a finite number: '" + s + "'");
  }
  return v;
}

std::int64_t parse_int(std::string_view text) {
  const std::string s = trim(text);
  char* end = nullptr;
  errno = 0;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE) {
    throw ValidationError("not an integer: '" + s + "'");
  }
  return v;
}

std::vector<std::int64_t> parse_int_list(std::string_view text) {
  std::vector<std::int64_t> out;
  for (const auto& part : split_commas(text)) {
    const auto dots = part.find("..");
    if (dots == std::string::npos) {
      out.push_back(parse_int(part));
      continue;
    }
    const auto lo = parse_int(part.substr(0, dots));
    const auto hi = parse_int(part.substr(dots + 2));
    if (hi < lo || hi - lo > 1'000'000) throw ValidationError("bad range: '" + part + "'");
    for (auto v = lo; v <= hi; ++v) out.push_back(v);
  }
  if (out.empty()) throw ValidationError("empty list");
  return out;
}

std::vector<double> parse_real_list(std::string_view text) {
  std::vector<double> out;
  for (const auto& part : split_commas(text)) out.push_back(parse_real(part));
  if (out.empty()) throw ValidationError("empty list");
  return out;
}

ConfigDoc ConfigDoc::parse(std::string_view text) {
  ConfigDoc doc;
  std::string section;
  doc.sections[section];
  std::istringstream in{std::string(text)};
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const std::string where = "config line " + std::to_string(lineno);
    if (line.front() == '[') {
      if (line.back() != ']') throw ValidationError(where + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) throw ValidationError(where + ": empty section name");
      doc.sections[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ValidationError(where + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = unquote(trim(line.substr(eq + 1)));
    if (key.empty()) throw ValidationError(where + ": empty key");
    if (!doc.sections[section].emplace(key, value).second) {
      throw ValidationError(where + ": duplicate key '" + key + "'");
    }
  }
  return doc;
}

ConfigDoc ConfigDoc::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

bool ConfigDoc::has(const std::string& section, const std::string& key) const {
  const auto it = sections.find(section);
  return it != sections.end() && it->second.count(key) > 0;
}

const std::string& ConfigDoc::get(const std::string& section, const std::string& key) const {
  if (!has(section, key)) throw ValidationError("missing [" + section + "] " + key);
  return sections.at(section).at(key);
}

SweepPlan SweepPlan::from_doc(const ConfigDoc& doc, const std::string& default_name) {
  for (const auto& [name, keys] : doc.sections) {
    if (name.empty() && keys.empty()) continue;
    if (name != "sweep" && name != "budget") {
      throw ValidationError("unknown config section [" + name + "]");
    }
  }
  SweepPlan plan;
  plan.kind = doc.get("sweep", "kind");
  plan.name = doc.has("sweep", "name") ? doc.get("sweep", "name") : default_name;
  if (plan.name.empty() ||
      plan.name.find_first_of("/\\ ") != std::string::npos) {
    throw ValidationError("sweep name must be a nonempty word");
  }

  std::set<std::string> allowed{"kind", "name", "tolerance"};
  if (plan.kind == "mainexp") {
    allowed.insert({"N", "sigma", "s", "coeffs", "seeds", "h0", "h0_policy", "method",
                    "oversample"});
  } else if (plan.kind == "maincor") {
    allowed.insert({"R", "beta", "p", "coeffs", "seeds", "oversample", "translates",
                    "cell_side"});
  } else if (plan.kind == "synthetic") {
    allowed.insert({"N", "exponent", "scale"});
  } else {
    throw ValidationError("unknown sweep kind '" + plan.kind + "'");
  }
  for (const auto& [key, value] : doc.sections.at("sweep")) {
    if (!allowed.count(key)) {
      throw ValidationError("key '" + key + "' is not valid for a " + plan.kind + " sweep");
    }
  }
  if (doc.sections.count("budget")) {
    for (const auto& [key, value] : doc.sections.at("budget")) {
      if (key != "tuples" && key != "cells") {
        throw ValidationError("unknown [budget] key '" + key + "'");
      }
    }
  }
  auto opt_real = [&](const std::string& key, double fallback) {
    return doc.has("sweep", key) ? parse_real(doc.get("sweep", key)) : fallback;
  };
  auto seeds = [&]() {
    std::vector<std::uint64_t> out;
    if (!doc.has("sweep", "seeds")) return std::vector<std::uint64_t>{1};
    for (auto v : parse_int_list(doc.get("sweep", "seeds"))) {
      if (v < 0) throw ValidationError("seeds must be nonnegative");
      out.push_back(static_cast<std::uint64_t>(v));
    }
    return out;
  };
  auto budget = [&](const std::string& key, double fallback) {
    if (!doc.has("budget", key)) return fallback;
    const double v = parse_real(doc.get("budget", key));
    if (!(v >= 1.0)) throw ValidationError("budgets must be >= 1");
    return v;
  };

  if (plan.kind == "mainexp") {
    auto& c = plan.mainexp;
    c.N = parse_int_list(doc.get("sweep", "N"));
    c.sigma = opt_real("sigma", c.sigma);
    c.s = static_cast<int>(doc.has("sweep", "s") ? parse_int(doc.get("sweep", "s")) : c.s);
    if (doc.has("sweep", "coeffs")) c.family = parse_family(doc.get("sweep", "coeffs"));
    c.seeds = seeds();
    c.h0 = opt_real("h0", c.h0);
    if (doc.has("sweep", "h0_policy")) {
      const auto& pol = doc.get("sweep", "h0_policy");
      if (pol == "random") {
        c.random_h0 = true;
      } else if (pol != "fixed") {
        throw ValidationError("h0_policy must be fixed or random");
      }
    }
    if (doc.has("sweep", "method")) {
      const auto& m = doc.get("sweep", "method");
      if (m == "exact") {
        c.method = MomentMethod::exact;
      } else if (m == "brute") {
        c.method = MomentMethod::brute;
      } else if (m == "quad" || m == "quadrature") {
        c.method = MomentMethod::quadrature;
      } else {
        throw ValidationError("unknown method '" + m + "'");
      }
    }
    c.oversample = opt_real("oversample", c.oversample);
    c.tolerance = opt_real("tolerance", c.tolerance);
    c.max_tuples = static_cast<std::uint64_t>(budget("tuples", static_cast<double>(c.max_tuples)));
    c.max_cells = static_cast<std::size_t>(budget("cells", static_cast<double>(c.max_cells)));
    c.validate();
  } else if (plan.kind == "maincor") {
    auto& c = plan.maincor;
    c.R = parse_real_list(doc.get("sweep", "R"));
    c.beta = opt_real("beta", c.beta);
    c.p = opt_real("p", c.p);
    if (doc.has("sweep", "coeffs")) c.family = parse_family(doc.get("sweep", "coeffs"));
    c.seeds = seeds();
    c.oversample = opt_real("oversample", c.oversample);
    const double translates = opt_real("translates", static_cast<double>(c.translates));
    if (!(translates >= 2.0)) throw ValidationError("translates must be >= 2");
    c.translates = static_cast<std::size_t>(translates);
    c.cell_side = opt_real("cell_side", c.cell_side);
    c.tolerance = opt_real("tolerance", c.tolerance);
    c.max_cells = static_cast<std::size_t>(budget("cells", static_cast<double>(c.max_cells)));
    c.validate();
  } else {
    for (auto n : parse_int_list(doc.get("sweep", "N"))) {
      if (n < 1) throw ValidationError("N values must be >= 1");
      plan.synthetic_x.push_back(static_cast<double>(n));
    }
    std::set<double> distinct(plan.synthetic_x.begin(), plan.synthetic_x.end());
    if (distinct.size() < 3) throw ValidationError("a sweep needs at least 3 distinct N values");
    plan.synthetic_exponent = opt_real("exponent", plan.synthetic_exponent);
    plan.synthetic_scale = opt_real("scale", plan.synthetic_scale);
    if (!(plan.synthetic_scale > 0.0)) throw ValidationError("scale must be positive");
    plan.synthetic_tolerance = opt_real("tolerance", plan.synthetic_tolerance);
  }
  return plan;
}

}  // namespace smallcap::harness
