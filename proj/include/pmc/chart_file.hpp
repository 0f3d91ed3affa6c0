#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "pmc/bundle.hpp"
#include "pmc/error.hpp"
#include "pmc/expr.hpp"

namespace pmc {

namespace chart_file_detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::vector<std::string_view> words(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

inline double parse_number(std::string_view s, int line) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end || !std::isfinite(v))
    throw ParseError(ErrorCode::SyntaxError, line, "expected a number, got '" + std::string(s) + "'");
  return v;
}

inline int parse_int(std::string_view s, int line) {
  int v = 0;
  const auto* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end)
    throw ParseError(ErrorCode::SyntaxError, line, "expected an integer, got '" + std::string(s) + "'");
  return v;
}

inline void append_number(std::string& out, double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

/// Recursive-descent parser for the expression surface syntax:
///   expr   := term (('+' | '-') term)*
///   term   := unary (('*' | '/') unary)*
///   unary  := '-' unary | power
///   power  := atom ('^' int)?        int := ['-'] digits | '(' ['-'] digits ')'
///   atom   := number | name | func '(' expr ')' | '(' expr ')'
class ExprParser {
 public:
  ExprParser(std::string_view text, const std::vector<std::string>& coords, const std::map<std::string, double>& params,
             int line)
      : s_(text), coords_(coords), params_(params), line_(line) {}

  ScalarExpr parse() {
    ScalarExpr e = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(ErrorCode::SyntaxError, line_, what + " at column " + std::to_string(pos_ + 1));
  }
  void skip() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }
  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  ScalarExpr expr() {
    ScalarExpr e = term();
    while (true) {
      if (accept('+'))
        e = e + term();
      else if (accept('-'))
        e = e - term();
      else
        return e;
    }
  }
  ScalarExpr term() {
    ScalarExpr e = unary();
    while (true) {
      if (accept('*'))
        e = e * unary();
      else if (accept('/'))
        e = e / unary();
      else
        return e;
    }
  }
  ScalarExpr unary() {
    if (accept('-')) return -unary();
    return power();
  }
  ScalarExpr power() {
    ScalarExpr base = atom();
    if (!accept('^')) return base;
    const bool paren = accept('(');
    skip();
    const std::size_t start = pos_;
    if (pos_ < s_.size() && s_[pos_] == '-') ++pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (pos_ == start || (pos_ == start + 1 && s_[start] == '-')) fail("exponent must be an integer");
    int n = 0;
    const auto res = std::from_chars(s_.data() + start, s_.data() + pos_, n);
    if (res.ec != std::errc()) fail("exponent out of range");
    if (pos_ < s_.size() && (s_[pos_] == '.' || s_[pos_] == 'e' || s_[pos_] == 'E')) fail("exponent must be an integer");
    if (paren && !accept(')')) fail("expected ')'");
    return pow(base, n);
  }
  ScalarExpr atom() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of expression");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      ScalarExpr e = expr();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
      if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
        std::size_t p = pos_ + 1;
        if (p < s_.size() && (s_[p] == '+' || s_[p] == '-')) ++p;
        if (p < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p]))) {
          pos_ = p;
          while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        }
      }
      double v = 0.0;
      const auto res = std::from_chars(s_.data() + start, s_.data() + pos_, v);
      if (res.ec != std::errc() || res.ptr != s_.data() + pos_) fail("malformed number");
      return ScalarExpr(v);
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      const std::string name(s_.substr(start, pos_ - start));
      if (name == "sin" || name == "cos" || name == "exp" || name == "sqrt") {
        if (!accept('(')) fail("expected '(' after " + name);
        ScalarExpr arg = expr();
        if (!accept(')')) fail("expected ')'");
        if (name == "sin") return sin(arg);
        if (name == "cos") return cos(arg);
        if (name == "exp") return exp(arg);
        return sqrt(arg);
      }
      for (std::size_t k = 0; k < coords_.size(); ++k)
        if (coords_[k] == name) return ScalarExpr::coordinate(static_cast<int>(k));
      if (const auto it = params_.find(name); it != params_.end()) return ScalarExpr(it->second);
      throw ParseError(ErrorCode::UnknownCoordinate, line_, "unknown name '" + name + "'");
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  const std::vector<std::string>& coords_;
  const std::map<std::string, double>& params_;
  int line_;
};

struct Line {
  int number;
  std::string_view text;
};

}  // namespace chart_file_detail

/// Parses one expression against coordinate names and named constants.
inline ScalarExpr parse_expression(std::string_view text, const std::vector<std::string>& coords,
                                   const std::map<std::string, double>& params = {}, int line = 0) {
  return chart_file_detail::ExprParser(text, coords, params, line).parse();
}

/// Parses a chart file (format documented in docs/chart_format.md).
inline Bundle parse_chart_file(std::string_view text) {
  using namespace chart_file_detail;
  std::map<std::string, std::vector<Line>> sections;
  std::vector<std::string> order;
  {
    std::string current;
    int number = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
      const auto end = text.find('\n', start);
      std::string_view raw = text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
      ++number;
      if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
      const auto ln = trim(raw);
      if (!ln.empty()) {
        if (ln.front() == '[') {
          if (ln.back() != ']') throw ParseError(ErrorCode::SyntaxError, number, "malformed section header");
          current = std::string(trim(ln.substr(1, ln.size() - 2)));
          static const std::vector<std::string> known = {"chart",  "params",  "metric",
                                                         "poisson", "volume", "killing", "flat_frame"};
          if (std::find(known.begin(), known.end(), current) == known.end())
            throw ParseError(ErrorCode::SyntaxError, number, "unknown section [" + current + "]");
          if (sections.count(current)) throw ParseError(ErrorCode::SyntaxError, number, "duplicate section [" + current + "]");
          sections[current];
          order.push_back(current);
        } else {
          if (current.empty()) throw ParseError(ErrorCode::SyntaxError, number, "entry outside of any section");
          sections[current].push_back({number, ln});
        }
      }
      if (end == std::string_view::npos) break;
      start = end + 1;
    }
  }
  auto key_value = [](const Line& l) {
    const auto eq = l.text.find('=');
    if (eq == std::string_view::npos) throw ParseError(ErrorCode::SyntaxError, l.number, "expected 'key = value'");
    return std::pair{trim(l.text.substr(0, eq)), trim(l.text.substr(eq + 1))};
  };

  Bundle b;
  if (!sections.count("chart")) throw ParseError(ErrorCode::SyntaxError, 0, "missing [chart] section");
  std::optional<int> dim;
  for (const auto& l : sections["chart"]) {
    const auto [key, value] = key_value(l);
    if (key == "name") {
      b.name = std::string(value);
    } else if (key == "dim") {
      dim = parse_int(value, l.number);
      if (*dim < 1 || *dim > kMaxDim) throw ParseError(ErrorCode::DimensionMismatch, l.number, "dim must be in [1, 6]");
    } else if (key == "coords") {
      for (auto w : words(value)) b.chart.coord_names.emplace_back(w);
    } else if (key == "sample_points") {
      for (auto pt : split(value, ';')) {
        Point p;
        for (auto w : words(pt)) p.push_back(parse_number(w, l.number));
        if (!p.empty()) b.chart.sample_points.push_back(std::move(p));
      }
    } else if (key == "sample_box") {
      for (auto iv : split(value, ';')) {
        const auto w = words(iv);
        if (w.size() != 2) throw ParseError(ErrorCode::SyntaxError, l.number, "sample_box intervals are 'lo hi'");
        b.chart.sample_box.push_back({parse_number(w[0], l.number), parse_number(w[1], l.number)});
      }
    } else if (key == "seed") {
      std::uint64_t s = 0;
      const auto res = std::from_chars(value.data(), value.data() + value.size(), s);
      if (res.ec != std::errc() || res.ptr != value.data() + value.size())
        throw ParseError(ErrorCode::SyntaxError, l.number, "seed must be a non-negative integer");
      b.chart.seed = s;
    } else {
      throw ParseError(ErrorCode::SyntaxError, l.number, "unknown [chart] key '" + std::string(key) + "'");
    }
  }
  if (!dim) throw ParseError(ErrorCode::SyntaxError, 0, "[chart] needs dim");
  b.chart.dim = *dim;
  if (b.chart.coord_names.empty())
    for (int i = 0; i < *dim; ++i) b.chart.coord_names.push_back("x" + std::to_string(i + 1));
  try {
    b.chart.validate();
  } catch (const Error& e) {
    throw ParseError(e.code(), 0, e.what());
  }
  const int n = *dim;
  const auto& coords = b.chart.coord_names;

  std::map<std::string, double> params;
  for (const auto& l : sections["params"]) {
    const auto [key, value] = key_value(l);
    const std::string name(key);
    if (std::find(coords.begin(), coords.end(), name) != coords.end())
      throw ParseError(ErrorCode::SyntaxError, l.number, "parameter '" + name + "' shadows a coordinate");
    const ScalarExpr e = parse_expression(value, {}, params, l.number);
    params[name] = evaluate(e, std::vector<double>{});
  }
  auto expression = [&](std::string_view text, int line) { return parse_expression(text, coords, params, line); };
  auto index_pair = [&](std::string_view lhs, std::string_view tag, int line) {
    const auto w = words(lhs);
    if (w.size() != 3 || w[0] != tag)
      throw ParseError(ErrorCode::SyntaxError, line, "expected '" + std::string(tag) + " i j = <expr>'");
    const int i = parse_int(w[1], line), j = parse_int(w[2], line);
    if (i < 1 || i > n || j < 1 || j > n) throw ParseError(ErrorCode::SyntaxError, line, "index out of range");
    return std::pair{i - 1, j - 1};
  };

  // metric
  if (!sections.count("metric")) throw ParseError(ErrorCode::SyntaxError, 0, "missing [metric] section");
  b.metric = MetricField(n);
  {
    std::map<std::pair<int, int>, std::pair<ScalarExpr, int>> seen;
    bool identity = false;
    for (const auto& l : sections["metric"]) {
      if (l.text == "identity") {
        identity = true;
        continue;
      }
      const auto [lhs, rhs] = key_value(l);
      const auto [i, j] = index_pair(lhs, "g", l.number);
      const ScalarExpr e = expression(rhs, l.number);
      const std::pair key{std::min(i, j), std::max(i, j)};
      if (const auto it = seen.find(key); it != seen.end()) {
        if (!(it->second.first == e))
          throw ParseError(ErrorCode::AsymmetryError, l.number,
                           "g " + std::to_string(j + 1) + " " + std::to_string(i + 1) + " differs from line " +
                               std::to_string(it->second.second));
        continue;
      }
      seen.emplace(key, std::pair{e, l.number});
    }
    if (identity)
      for (int i = 0; i < n; ++i) b.metric.set(i, i, ScalarExpr(1.0));
    for (const auto& [key, v] : seen) b.metric.set(key.first, key.second, v.first);
  }

  // poisson
  b.poisson = PoissonField(n);
  {
    std::map<std::pair<int, int>, std::pair<ScalarExpr, int>> seen;  // stored as the (i<j) entry
    for (const auto& l : sections["poisson"]) {
      const auto [lhs, rhs] = key_value(l);
      const auto [i, j] = index_pair(lhs, "pi", l.number);
      const ScalarExpr e = expression(rhs, l.number);
      if (i == j) {
        if (e.is_zero()) continue;
        throw ParseError(ErrorCode::SymmetryError, l.number, "diagonal Poisson entry must vanish");
      }
      const ScalarExpr upper = i < j ? e : -e;
      const std::pair key{std::min(i, j), std::max(i, j)};
      if (const auto it = seen.find(key); it != seen.end()) {
        const ScalarExpr& prev = it->second.first;
        const bool consistent = prev == upper || (i > j && -prev == e) || (i > j && prev == -e);
        if (!consistent)
          throw ParseError(ErrorCode::AsymmetryError, l.number,
                           "pi entries are not antisymmetric with line " + std::to_string(it->second.second));
        continue;
      }
      seen.emplace(key, std::pair{upper, l.number});
    }
    for (const auto& [key, v] : seen) b.poisson.set(key.first, key.second, v.first);
  }

  // volume
  b.volume = VolumeField::from_metric(b.metric);
  for (const auto& l : sections["volume"]) {
    if (l.text == "riemannian") {
      b.volume = VolumeField::from_metric(b.metric);
      continue;
    }
    const auto [key, value] = key_value(l);
    if (key != "density") throw ParseError(ErrorCode::SyntaxError, l.number, "expected 'density = <expr>' or 'riemannian'");
    b.volume = VolumeField{expression(value, l.number), false};
  }

  // killing
  if (sections.count("killing")) {
    std::map<int, MultivectorField> vecs;
    std::map<std::pair<int, int>, double> pis;
    for (const auto& l : sections["killing"]) {
      const auto [lhs, rhs] = key_value(l);
      const auto w = words(lhs);
      if (w.size() == 2 && w[0] == "X") {
        const int a = parse_int(w[1], l.number);
        if (a < 1) throw ParseError(ErrorCode::SyntaxError, l.number, "Killing vector index must be >= 1");
        const auto comps = split(rhs, ',');
        if (static_cast<int>(comps.size()) != n)
          throw ParseError(ErrorCode::DimensionMismatch, l.number, "Killing vector needs " + std::to_string(n) + " components");
        MultivectorField v(n, 1);
        for (std::size_t k = 0; k < comps.size(); ++k) v[k] = expression(comps[k], l.number);
        if (vecs.count(a - 1)) throw ParseError(ErrorCode::SyntaxError, l.number, "duplicate Killing vector");
        vecs.emplace(a - 1, std::move(v));
      } else if (w.size() == 3 && w[0] == "Pi") {
        const int a = parse_int(w[1], l.number), c = parse_int(w[2], l.number);
        if (a < 1 || c < 1) throw ParseError(ErrorCode::SyntaxError, l.number, "Pi indices must be >= 1");
        const double v = evaluate(parse_expression(rhs, {}, params, l.number), std::vector<double>{});
        if (a == c) {
          if (v != 0.0) throw ParseError(ErrorCode::SymmetryError, l.number, "diagonal Pi entry must vanish");
          continue;
        }
        const std::pair key{std::min(a, c) - 1, std::max(a, c) - 1};
        const double upper = a < c ? v : -v;
        if (const auto it = pis.find(key); it != pis.end() && it->second != upper)
          throw ParseError(ErrorCode::AsymmetryError, l.number, "Pi entries are not antisymmetric");
        pis[key] = upper;
      } else {
        throw ParseError(ErrorCode::SyntaxError, l.number, "expected 'X A = e1, ..., en' or 'Pi A B = c'");
      }
    }
    KillingSystem ks;
    const int r = static_cast<int>(vecs.size());
    for (int a = 0; a < r; ++a) {
      const auto it = vecs.find(a);
      if (it == vecs.end()) throw ParseError(ErrorCode::SyntaxError, 0, "Killing vectors must be numbered 1..r");
      ks.vectors.push_back(it->second);
    }
    ks.Pi.assign(static_cast<std::size_t>(r * r), 0.0);
    for (const auto& [key, v] : pis) {
      if (key.second >= r) throw ParseError(ErrorCode::SyntaxError, 0, "Pi index exceeds the number of Killing vectors");
      ks.Pi[static_cast<std::size_t>(key.first * r + key.second)] = v;
      ks.Pi[static_cast<std::size_t>(key.second * r + key.first)] = -v;
    }
    b.killing = std::move(ks);
  }

  // flat frame
  for (const auto& l : sections["flat_frame"]) {
    const auto [key, value] = key_value(l);
    if (key != "affine" || value != "coordinates")
      throw ParseError(ErrorCode::SyntaxError, l.number, "only 'affine = coordinates' is supported");
    b.flat_frame = true;
  }

  try {
    b.validate();
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(e.code(), 0, e.what());
  }
  return b;
}

inline Bundle load_chart_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidInput, "cannot open chart file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_chart_file(ss.str());
}

/// Writes a bundle in chart-file syntax; parse_chart_file reads it back to
/// an equal bundle.
inline std::string export_chart_file(const Bundle& b) {
  using chart_file_detail::append_number;
  const int n = b.chart.dim;
  const auto& names = b.chart.coord_names;
  std::string out;
  out += "[chart]\n";
  if (!b.name.empty()) out += "name = " + b.name + "\n";
  out += "dim = " + std::to_string(n) + "\ncoords =";
  for (const auto& c : names) out += " " + c;
  out += "\n";
  if (!b.chart.sample_points.empty()) {
    out += "sample_points =";
    for (std::size_t k = 0; k < b.chart.sample_points.size(); ++k) {
      if (k > 0) out += ";";
      for (double v : b.chart.sample_points[k]) {
        out += " ";
        append_number(out, v);
      }
    }
    out += "\n";
  }
  if (!b.chart.sample_box.empty()) {
    out += "sample_box =";
    for (std::size_t k = 0; k < b.chart.sample_box.size(); ++k) {
      if (k > 0) out += ";";
      out += " ";
      append_number(out, b.chart.sample_box[k][0]);
      out += " ";
      append_number(out, b.chart.sample_box[k][1]);
    }
    out += "\n";
  }
  if (b.chart.seed) out += "seed = " + std::to_string(*b.chart.seed) + "\n";

  out += "\n[metric]\n";
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      if (!b.metric(i, j).is_zero())
        out += "g " + std::to_string(i + 1) + " " + std::to_string(j + 1) + " = " + b.metric(i, j).to_string(names) + "\n";

  out += "\n[poisson]\n";
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (!b.poisson(i, j).is_zero())
        out += "pi " + std::to_string(i + 1) + " " + std::to_string(j + 1) + " = " + b.poisson(i, j).to_string(names) + "\n";

  out += "\n[volume]\n";
  if (b.volume.riemannian && b.volume == VolumeField::from_metric(b.metric))
    out += "riemannian\n";
  else
    out += "density = " + b.volume.density.to_string(names) + "\n";

  if (b.killing) {
    out += "\n[killing]\n";
    const auto& ks = *b.killing;
    for (int a = 0; a < ks.rank(); ++a) {
      out += "X " + std::to_string(a + 1) + " =";
      const auto& v = ks.vectors[static_cast<std::size_t>(a)];
      for (std::size_t c = 0; c < v.size(); ++c) out += (c ? ", " : " ") + v[c].to_string(names);
      out += "\n";
    }
    for (int a = 0; a < ks.rank(); ++a)
      for (int c = a + 1; c < ks.rank(); ++c)
        if (ks.pi(a, c) != 0.0) {
          out += "Pi " + std::to_string(a + 1) + " " + std::to_string(c + 1) + " = ";
          const double v = ks.pi(a, c);
          if (v < 0) out += "(";
          append_number(out, v);
          if (v < 0) out += ")";
          out += "\n";
        }
  }
  if (b.flat_frame) out += "\n[flat_frame]\naffine = coordinates\n";
  return out;
}

}  // namespace pmc
