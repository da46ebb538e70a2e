#ifndef MINSURF_SCENARIO_IO_HPP
#define MINSURF_SCENARIO_IO_HPP

// Flat key-value scenario files:
//
//   [surface]    name, builtin, f, r_max, neck_centered, growth, stable_claim
//   [extrinsic]  h_sq, ric_nn, scalar
//   [ambient]    scalar_floor, sectional_floor, dimension, space_form
//
// Values may be wrapped in double quotes. A positive floor value is read as
// the curvature scale alpha (floor -alpha, resp. -6 alpha); zero or negative
// values are the floor itself.

#include <cctype>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "minsurf/errors.hpp"
#include "minsurf/surface_models.hpp"

namespace minsurf {

/// Parsed `[section]` / `key = value` text with source locations.
class KeyValueDocument {
 public:
  struct Entry {
    std::string value;
    int line = 0;
    int value_column = 0;
  };

  static KeyValueDocument parse(std::string_view text) {
    KeyValueDocument doc;
    std::string section;
    int line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
      auto end = text.find('\n', start);
      if (end == std::string_view::npos) end = text.size();
      ++line_no;
      std::string_view line = text.substr(start, end - start);
      start = end + 1;
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      const auto first = line.find_first_not_of(" \t");
      if (first == std::string_view::npos || line[first] == '#' || line[first] == ';') {
        if (end == text.size()) break;
        continue;
      }
      if (line[first] == '[') {
        const auto close = line.find(']', first);
        if (close == std::string_view::npos) {
          throw ConfigError("unterminated section header", line_no, static_cast<int>(first) + 1);
        }
        section = std::string(trim(line.substr(first + 1, close - first - 1)));
        if (section.empty()) throw ConfigError("empty section name", line_no, static_cast<int>(first) + 2);
        doc.sections_.push_back(section);
      } else {
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
          throw ConfigError("expected 'key = value'", line_no, static_cast<int>(first) + 1);
        }
        const std::string key(trim(line.substr(0, eq)));
        if (key.empty()) throw ConfigError("missing key", line_no, static_cast<int>(first) + 1);
        auto raw = line.substr(eq + 1);
        const auto vfirst = raw.find_first_not_of(" \t");
        int col = static_cast<int>(eq) + 2 + (vfirst == std::string_view::npos ? 0 : static_cast<int>(vfirst));
        std::string_view value = trim(raw);
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
          value = value.substr(1, value.size() - 2);
          ++col;
        } else if (!value.empty() && value.front() == '"') {
          throw ConfigError("unterminated string", line_no, col);
        }
        const std::string full = section.empty() ? key : section + "." + key;
        if (doc.entries_.count(full)) throw ConfigError("duplicate key '" + full + "'", line_no, static_cast<int>(first) + 1);
        doc.entries_[full] = Entry{std::string(value), line_no, col};
      }
      if (end == text.size()) break;
    }
    return doc;
  }

  const Entry* find(const std::string& key) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : &it->second;
  }

  const std::map<std::string, Entry>& entries() const { return entries_; }

  static double to_double(const Entry& e, const std::string& key) {
    try {
      std::size_t used = 0;
      const double v = std::stod(e.value, &used);
      if (used != e.value.size()) throw std::invalid_argument(key);
      return v;
    } catch (const std::exception&) {
      throw ConfigError("'" + key + "' expects a number, got '" + e.value + "'", e.line, e.value_column);
    }
  }

  static bool to_bool(const Entry& e, const std::string& key) {
    if (e.value == "true" || e.value == "1" || e.value == "yes") return true;
    if (e.value == "false" || e.value == "0" || e.value == "no") return false;
    throw ConfigError("'" + key + "' expects true/false, got '" + e.value + "'", e.line, e.value_column);
  }

 private:
  static std::string_view trim(std::string_view s) {
    const auto a = s.find_first_not_of(" \t");
    if (a == std::string_view::npos) return {};
    const auto b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
  }

  std::map<std::string, Entry> entries_;
  std::vector<std::string> sections_;
};

namespace detail {

inline GrowthClass parse_growth(const KeyValueDocument::Entry& e) {
  const auto colon = e.value.find(':');
  const std::string kind = e.value.substr(0, colon);
  if (kind == "unknown" && colon == std::string::npos) return {};
  if (colon == std::string::npos) throw ConfigError("growth expects poly:<degree> or exp:<rate>", e.line, e.value_column);
  KeyValueDocument::Entry num{e.value.substr(colon + 1), e.line, e.value_column + static_cast<int>(colon) + 1};
  const double rate = KeyValueDocument::to_double(num, "growth");
  if (kind == "poly") return GrowthClass::polynomial(rate);
  if (kind == "exp") return GrowthClass::exponential(rate);
  throw ConfigError("unknown growth class '" + kind + "'", e.line, e.value_column);
}

inline Expression parse_expr_entry(const KeyValueDocument::Entry& e) {
  return Expression::parse(e.value, e.line, e.value_column - 1);
}

}  // namespace detail

/// Parses and validates a scenario. Invariant violations surface as
/// InvariantError carrying the failing residual.
inline Scenario parse_scenario(std::string_view config_text) {
  const auto doc = KeyValueDocument::parse(config_text);
  static const char* kKnown[] = {"surface.name",       "surface.builtin",     "surface.f",
                                 "surface.r_max",      "surface.neck_centered", "surface.growth",
                                 "surface.stable_claim", "stable_claim",       "extrinsic.h_sq",
                                 "extrinsic.ric_nn",   "extrinsic.scalar",    "ambient.scalar_floor",
                                 "ambient.sectional_floor", "ambient.dimension", "ambient.space_form"};
  for (const auto& [key, entry] : doc.entries()) {
    bool ok = false;
    for (const char* k : kKnown) ok = ok || key == k;
    if (!ok) throw ConfigError("unknown key '" + key + "'", entry.line, 1);
  }

  const auto* stable_entry = doc.find("surface.stable_claim");
  if (!stable_entry) stable_entry = doc.find("stable_claim");

  Scenario sc;
  if (const auto* b = doc.find("surface.builtin")) {
    for (const char* k : {"surface.f", "extrinsic.h_sq", "extrinsic.ric_nn", "extrinsic.scalar"}) {
      if (const auto* e = doc.find(k)) {
        throw ConfigError(std::string("'") + k + "' cannot override a builtin scenario", e->line, 1);
      }
    }
    auto found = find_builtin(b->value);
    if (!found) throw ConfigError("unknown builtin scenario '" + b->value + "'", b->line, b->value_column);
    sc = std::move(*found);
  } else {
    const auto* f = doc.find("surface.f");
    if (!f) throw ConfigError("missing [surface] f");
    const auto* h = doc.find("extrinsic.h_sq");
    const auto* ric = doc.find("extrinsic.ric_nn");
    if (!h || !ric) throw ConfigError("missing [extrinsic] h_sq / ric_nn");
    detail::parse_expr_entry(*f);
    detail::parse_expr_entry(*h);
    detail::parse_expr_entry(*ric);
    std::optional<std::string> scalar;
    if (const auto* s = doc.find("extrinsic.scalar")) {
      detail::parse_expr_entry(*s);
      scalar = s->value;
    }
    const double r_max = doc.find("surface.r_max") ? KeyValueDocument::to_double(*doc.find("surface.r_max"), "r_max") : 10.0;
    const bool neck = doc.find("surface.neck_centered") ? KeyValueDocument::to_bool(*doc.find("surface.neck_centered"), "neck_centered") : false;
    const GrowthClass growth = doc.find("surface.growth") ? detail::parse_growth(*doc.find("surface.growth")) : GrowthClass{};
    const std::string name = doc.find("surface.name") ? doc.find("surface.name")->value : std::string("custom");
    auto surf = WarpedSurface::from_expression(name, f->value, r_max, growth, neck);
    sc = make_scenario(std::move(surf), h->value, ric->value, scalar, AmbientBounds{}, false);
  }

  if (const auto* e = doc.find("surface.name")) sc.surface.name = e->value;
  if (const auto* e = doc.find("surface.r_max")) sc.surface.r_max = KeyValueDocument::to_double(*e, "r_max");
  if (stable_entry) sc.stable_claim = KeyValueDocument::to_bool(*stable_entry, "stable_claim");

  auto floor_alpha = [](const KeyValueDocument::Entry& e, const std::string& key, double scale) {
    const double v = KeyValueDocument::to_double(e, key);
    return v > 0.0 ? v : -v / scale;
  };
  const auto* sf = doc.find("ambient.scalar_floor");
  const auto* kf = doc.find("ambient.sectional_floor");
  if (sf || kf || !doc.find("surface.builtin")) {
    if (doc.find("surface.builtin")) {
      // explicit floors replace the builtin's
      sc.ambient.scalar_alpha.reset();
      sc.ambient.sectional_alpha.reset();
    }
    if (sf) sc.ambient.scalar_alpha = floor_alpha(*sf, "scalar_floor", 6.0);
    if (kf) sc.ambient.sectional_alpha = floor_alpha(*kf, "sectional_floor", 1.0);
  }
  if (const auto* e = doc.find("ambient.dimension")) {
    sc.ambient.dimension = static_cast<int>(KeyValueDocument::to_double(*e, "dimension"));
  }
  if (const auto* e = doc.find("ambient.space_form")) sc.ambient.space_form = e->value;

  validate(sc);
  return sc;
}

/// Byte-deterministic text form; parse_scenario(serialize_scenario(s))
/// reproduces s. Requires expression-backed surfaces.
inline std::string serialize_scenario(const Scenario& sc) {
  const auto& s = sc.surface;
  const auto& ex = sc.extrinsic;
  if (!s.warp_text || !ex.h_sq_text || !ex.ric_nn_text) {
    throw ConfigError("scenario " + s.name + " is not expression-backed and cannot be serialized");
  }
  std::ostringstream out;
  out << "[surface]\n";
  out << "name = \"" << s.name << "\"\n";
  out << "f = \"" << *s.warp_text << "\"\n";
  out << "r_max = " << format_number(s.r_max) << "\n";
  out << "neck_centered = " << (s.neck_centered ? "true" : "false") << "\n";
  out << "growth = " << s.growth.to_string() << "\n";
  out << "stable_claim = " << (sc.stable_claim ? "true" : "false") << "\n";
  out << "\n[extrinsic]\n";
  out << "h_sq = \"" << *ex.h_sq_text << "\"\n";
  out << "ric_nn = \"" << *ex.ric_nn_text << "\"\n";
  if (ex.scalar_text) out << "scalar = \"" << *ex.scalar_text << "\"\n";
  out << "\n[ambient]\n";
  if (auto v = sc.ambient.scalar_floor()) out << "scalar_floor = " << format_number(*v == 0.0 ? 0.0 : *v) << "\n";
  if (auto v = sc.ambient.sectional_floor()) out << "sectional_floor = " << format_number(*v == 0.0 ? 0.0 : *v) << "\n";
  out << "dimension = " << sc.ambient.dimension << "\n";
  if (!sc.ambient.space_form.empty()) out << "space_form = " << sc.ambient.space_form << "\n";
  return out.str();
}

}  // namespace minsurf

#endif  // MINSURF_SCENARIO_IO_HPP
