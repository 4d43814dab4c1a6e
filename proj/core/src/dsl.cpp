#include "qdn/dsl.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

namespace qdn::dsl {
namespace {

struct Token {
  std::string_view text;
  std::size_t column;  // 1-based
};

std::vector<Token> tokenize(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i >= line.size() || line[i] == '#') break;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])) && line[i] != '#') ++i;
    out.push_back({line.substr(start, i - start), start + 1});
  }
  return out;
}

bool is_identifier(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  }
  return true;
}

// [+-]? (digits (. digits?)? | . digits) ([eE] [+-]? digits)?
bool is_real_literal(std::string_view s) {
  std::size_t i = 0;
  auto digits = [&] {
    const std::size_t start = i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    return i - start;
  };
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
  const std::size_t whole = digits();
  std::size_t frac = 0;
  if (i < s.size() && s[i] == '.') {
    ++i;
    frac = digits();
  }
  if (whole == 0 && frac == 0) return false;
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    ++i;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
    if (digits() == 0) return false;
  }
  return i == s.size();
}

double parse_real(std::string_view s, const SourceLocation& where) {
  if (!is_real_literal(s)) {
    throw LiteralError("malformed real literal '" + std::string(s) + "'", where);
  }
  if (s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(value)) {
    throw LiteralError("real literal '" + std::string(s) + "' is out of range", where);
  }
  return value;
}

// Splits "a,b" inside a parenthesized literal body.
std::pair<std::string_view, std::string_view> split_pair(std::string_view body, std::string_view whole,
                                                         const SourceLocation& where) {
  const auto comma = body.find(',');
  if (comma == std::string_view::npos || body.find(',', comma + 1) != std::string_view::npos) {
    throw LiteralError("malformed complex literal '" + std::string(whole) + "'", where);
  }
  return {body.substr(0, comma), body.substr(comma + 1)};
}

std::string format_double(double x) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  std::string out(buf.data(), ptr);
  // to_chars may print integral values without a decimal point; that is
  // still a valid real literal.
  return out;
}

SourceLocation at(const std::string& file, std::size_t line, std::size_t column) {
  return SourceLocation{file, line, column};
}

Endpoint parse_endpoint(const Token& tok, const SourceLocation& where) {
  const auto dot = tok.text.find('.');
  if (dot == std::string_view::npos) {
    throw SyntaxError("expected NODE.PORT, got '" + std::string(tok.text) + "'", where);
  }
  const auto node = tok.text.substr(0, dot);
  const auto port = tok.text.substr(dot + 1);
  if (!is_identifier(node) || !is_identifier(port)) {
    throw SyntaxError("expected NODE.PORT, got '" + std::string(tok.text) + "'", where);
  }
  return {std::string(node), std::string(port)};
}

void require_name(const Token& tok, const SourceLocation& where) {
  if (!is_identifier(tok.text)) {
    throw SyntaxError("'" + std::string(tok.text) + "' is not a valid name", where);
  }
}

}  // namespace

ParamValue parse_literal(std::string_view token, const SourceLocation& where) {
  if (token.empty()) throw LiteralError("empty literal", where);
  if (token.front() == '$') {
    const auto name = token.substr(1);
    if (!is_identifier(name)) {
      throw LiteralError("malformed parameter reference '" + std::string(token) + "'", where);
    }
    return ParamRef{std::string(name)};
  }
  if (token.front() == '(') {
    if (token.back() != ')') throw LiteralError("unterminated complex literal '" + std::string(token) + "'", where);
    const auto [re, im] = split_pair(token.substr(1, token.size() - 2), token, where);
    return Amplitude{parse_real(re, where), parse_real(im, where)};
  }
  if (token.starts_with("polar(")) {
    if (token.back() != ')') throw LiteralError("unterminated polar literal '" + std::string(token) + "'", where);
    const auto [r, phi] = split_pair(token.substr(6, token.size() - 7), token, where);
    return std::polar(parse_real(r, where), parse_real(phi, where));
  }
  return parse_real(token, where);
}

std::string format_literal(const ParamValue& v) {
  if (const auto* d = std::get_if<double>(&v)) return format_double(*d);
  if (const auto* c = std::get_if<Amplitude>(&v)) {
    return "(" + format_double(c->real()) + "," + format_double(c->imag()) + ")";
  }
  return "$" + std::get<ParamRef>(v).name;
}

std::pair<std::string, ParamValue> parse_binding(std::string_view text) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos || !is_identifier(text.substr(0, eq))) {
    throw SyntaxError("expected name=literal, got '" + std::string(text) + "'");
  }
  auto value = parse_literal(text.substr(eq + 1));
  if (std::holds_alternative<ParamRef>(value)) {
    throw LiteralError("binding for '" + std::string(text.substr(0, eq)) + "' must be a literal");
  }
  return {std::string(text.substr(0, eq)), std::move(value)};
}

NetworkGraph parse(std::string_view text, const std::string& file_name) {
  NetworkGraph g;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = text.find('\n', pos);
    std::string_view line = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++line_no;
    pos = end == std::string_view::npos ? text.size() + 1 : end + 1;

    const auto tokens = tokenize(line);
    if (tokens.empty()) continue;
    const auto loc = [&](const Token& t) { return at(file_name, line_no, t.column); };
    const auto& head = tokens[0];

    // Errors raised by the graph get the location of the statement's name token.
    auto with_location = [&](const Token& t, auto&& fn) {
      try {
        fn();
      } catch (Error& e) {
        if (!e.location()) e.set_location(loc(t));
        throw;
      }
    };

    if (head.text == "source" || head.text == "detector") {
      if (tokens.size() != 2) {
        throw SyntaxError("'" + std::string(head.text) + "' takes exactly one name", loc(head));
      }
      require_name(tokens[1], loc(tokens[1]));
      with_location(tokens[1], [&] {
        if (head.text == "source") {
          g.add_source(std::string(tokens[1].text));
        } else {
          g.add_detector(std::string(tokens[1].text));
        }
      });
    } else if (head.text == "module") {
      if (tokens.size() < 3) throw SyntaxError("expected 'module TYPE NAME key=value ...'", loc(head));
      const auto& type_tok = tokens[1];
      const auto& name_tok = tokens[2];
      if (!find_module_type(type_tok.text)) {
        throw UnknownModuleError("unknown module type '" + std::string(type_tok.text) + "'", loc(type_tok));
      }
      require_name(name_tok, loc(name_tok));
      std::map<std::string, ParamValue> params;
      for (std::size_t i = 3; i < tokens.size(); ++i) {
        const auto& tok = tokens[i];
        const auto eq = tok.text.find('=');
        if (eq == std::string_view::npos || !is_identifier(tok.text.substr(0, eq))) {
          throw SyntaxError("expected key=value, got '" + std::string(tok.text) + "'", loc(tok));
        }
        const std::string key(tok.text.substr(0, eq));
        if (params.count(key)) throw ArityError("parameter '" + key + "' given twice", loc(tok));
        const SourceLocation value_loc = at(file_name, line_no, tok.column + eq + 1);
        auto value = parse_literal(tok.text.substr(eq + 1), value_loc);
        // Kind and key checks happen in add_module; point them at this token.
        with_location(tok, [&] {
          const ModuleType& type = *find_module_type(type_tok.text);
          auto spec = std::find_if(type.params.begin(), type.params.end(),
                                   [&key](const ParamSpec& p) { return p.key == key; });
          if (spec == type.params.end()) {
            throw ArityError("module type '" + type.name + "' has no parameter '" + key + "'");
          }
          if (spec->kind == ParamKind::Real && std::holds_alternative<Amplitude>(value)) {
            throw LiteralError("parameter '" + key + "' expects a real literal");
          }
        });
        params.emplace(key, std::move(value));
      }
      with_location(name_tok, [&] {
        g.add_module(std::string(name_tok.text), std::string(type_tok.text), std::move(params));
      });
    } else if (head.text == "wire") {
      if (tokens.size() != 4 || tokens[2].text != "->") {
        throw SyntaxError("expected 'wire NODE.PORT -> NODE.PORT'", loc(head));
      }
      const Endpoint from = parse_endpoint(tokens[1], loc(tokens[1]));
      const Endpoint to = parse_endpoint(tokens[3], loc(tokens[3]));
      with_location(tokens[1], [&] { g.add_wire(from, to); });
    } else {
      throw SyntaxError("unknown statement '" + std::string(head.text) + "'", loc(head));
    }
  }
  return g;
}

NetworkGraph parse_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("error reading '" + path.string() + "'");
  return parse(buf.str(), path.filename().string());
}

std::string serialize(const NetworkGraph& g) {
  std::string out;
  for (const auto& s : g.sources()) out += "source " + s + "\n";
  for (const auto& [name, decl] : g.modules()) {
    out += "module " + decl.type + " " + name;
    const ModuleType& type = *find_module_type(decl.type);
    for (const auto& spec : type.params) {
      auto it = decl.params.find(spec.key);
      if (it != decl.params.end()) out += " " + spec.key + "=" + format_literal(it->second);
    }
    out += "\n";
  }
  for (const auto& d : g.detectors()) out += "detector " + d + "\n";
  for (const auto& w : g.wires()) out += "wire " + w.from.to_string() + " -> " + w.to.to_string() + "\n";
  return out;
}

}  // namespace qdn::dsl
