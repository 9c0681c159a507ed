#include "mregen/polysys.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <sstream>

namespace mregen {

namespace {

Complex ipow(Complex base, int e) {
  Complex r{1.0, 0.0};
  while (e > 0) {
    if (e & 1) r *= base;
    base *= base;
    e >>= 1;
  }
  return r;
}

}  // namespace

// --- VariableGroups ----------------------------------------------------------

VariableGroups::VariableGroups(std::vector<VariableGroup> groups)
    : groups_(std::move(groups)) {
  if (groups_.empty()) throw ParseError("no variable groups declared");
  for (int j = 0; j < group_count(); ++j) {
    const auto& g = groups_[j];
    if (g.names.empty()) throw ParseError("empty variable group");
    if (g.projective && g.names.size() < 2)
      throw ParseError("projective group '" + g.names[0] +
                       "' needs at least two variables");
    offsets_.push_back(total_);
    for (const auto& name : g.names) {
      if (!index_.emplace(name, total_).second)
        throw ParseError("duplicate variable name '" + name + "'");
      var_group_.push_back(j);
      ++total_;
    }
  }
}

bool VariableGroups::all_projective() const {
  return std::all_of(groups_.begin(), groups_.end(),
                     [](const VariableGroup& g) { return g.projective; });
}

int VariableGroups::var_index(const std::string& name) const {
  auto it = index_.find(name);
  return it == index_.end() ? -1 : it->second;
}

const std::string& VariableGroups::var_name(int v) const {
  int j = var_group_[v];
  return groups_[j].names[v - offsets_[j]];
}

// --- Polynomial --------------------------------------------------------------

Polynomial Polynomial::constant(int nvars, Complex c) {
  Polynomial p(nvars);
  p.add_term(std::vector<int>(nvars, 0), c);
  return p;
}

Polynomial Polynomial::variable(int nvars, int v) {
  Polynomial p(nvars);
  std::vector<int> e(nvars, 0);
  e[v] = 1;
  p.add_term(e, {1.0, 0.0});
  return p;
}

void Polynomial::add_term(const std::vector<int>& exponents, Complex coeff) {
  if (coeff == Complex{0.0, 0.0}) return;
  auto [it, inserted] = terms_.emplace(exponents, coeff);
  if (!inserted) {
    it->second += coeff;
    if (it->second == Complex{0.0, 0.0}) terms_.erase(it);
  }
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  Polynomial r = *this;
  for (const auto& [e, c] : o.terms_) r.add_term(e, c);
  return r;
}

Polynomial Polynomial::operator-(const Polynomial& o) const {
  Polynomial r = *this;
  for (const auto& [e, c] : o.terms_) r.add_term(e, -c);
  return r;
}

Polynomial Polynomial::operator-() const {
  Polynomial r(nvars_);
  for (const auto& [e, c] : terms_) r.terms_.emplace(e, -c);
  return r;
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
  Polynomial r(nvars_);
  std::vector<int> e(nvars_);
  for (const auto& [ea, ca] : terms_)
    for (const auto& [eb, cb] : o.terms_) {
      for (int v = 0; v < nvars_; ++v) e[v] = ea[v] + eb[v];
      r.add_term(e, ca * cb);
    }
  return r;
}

Polynomial Polynomial::pow(int k) const {
  Polynomial r = Polynomial::constant(nvars_, {1.0, 0.0});
  for (int i = 0; i < k; ++i) r = r * (*this);
  return r;
}

Complex Polynomial::eval(const Vector& x) const {
  Complex sum{0.0, 0.0};
  for (const auto& [e, c] : terms_) {
    Complex t = c;
    for (int v = 0; v < nvars_; ++v)
      if (e[v] > 0) t *= ipow(x[v], e[v]);
    sum += t;
  }
  return sum;
}

Eigen::RowVectorXcd Polynomial::gradient(const Vector& x) const {
  Eigen::RowVectorXcd g = Eigen::RowVectorXcd::Zero(nvars_);
  for (const auto& [e, c] : terms_) {
    for (int v = 0; v < nvars_; ++v) {
      if (e[v] == 0) continue;
      Complex t = c * static_cast<double>(e[v]) * ipow(x[v], e[v] - 1);
      for (int w = 0; w < nvars_; ++w)
        if (w != v && e[w] > 0) t *= ipow(x[w], e[w]);
      g[v] += t;
    }
  }
  return g;
}

double Polynomial::term_scale(const Vector& x) const {
  double scale = 0.0;
  for (const auto& [e, c] : terms_) {
    Complex t = c;
    for (int v = 0; v < nvars_; ++v)
      if (e[v] > 0) t *= ipow(x[v], e[v]);
    scale = std::max(scale, std::abs(t));
  }
  return scale;
}

std::vector<int> Polynomial::group_degrees(const VariableGroups& groups) const {
  if (terms_.empty()) return std::vector<int>(groups.group_count(), 0);
  std::vector<int> deg(groups.group_count(), -1);
  for (const auto& [e, c] : terms_) {
    (void)c;
    for (int j = 0; j < groups.group_count(); ++j) {
      int d = 0;
      for (int v = groups.group_offset(j); v < groups.group_offset(j) + groups.group_size(j); ++v)
        d += e[v];
      if (deg[j] < 0) {
        deg[j] = d;
      } else if (groups.group(j).projective && deg[j] != d) {
        throw NonHomogeneousError(
            "terms disagree in group-" + std::to_string(j) + " degree (" +
            std::to_string(deg[j]) + " vs " + std::to_string(d) + ")");
      } else {
        deg[j] = std::max(deg[j], d);
      }
    }
  }
  return deg;
}

// --- points ------------------------------------------------------------------

Vector flatten(const MultiprojectivePoint& p) {
  int n = 0;
  for (const auto& b : p.blocks) n += static_cast<int>(b.size());
  Vector x(n);
  int at = 0;
  for (const auto& b : p.blocks) {
    x.segment(at, b.size()) = b;
    at += static_cast<int>(b.size());
  }
  return x;
}

MultiprojectivePoint unflatten(const Vector& x, const VariableGroups& groups) {
  if (x.size() != groups.total_vars())
    throw std::invalid_argument("coordinate count does not match variable groups");
  MultiprojectivePoint p;
  for (int j = 0; j < groups.group_count(); ++j)
    p.blocks.push_back(x.segment(groups.group_offset(j), groups.group_size(j)));
  return p;
}

MultiprojectivePoint canonical_normalize(const MultiprojectivePoint& p,
                                         const VariableGroups& groups) {
  MultiprojectivePoint q = p;
  for (int j = 0; j < groups.group_count(); ++j) {
    if (!groups.group(j).projective) continue;
    auto& b = q.blocks[j];
    int best = 0;
    for (int v = 1; v < b.size(); ++v)
      if (std::abs(b[v]) > std::abs(b[best])) best = v;
    if (std::abs(b[best]) == 0.0)
      throw std::invalid_argument("zero projective block");
    b /= b[best];
  }
  return q;
}

// --- variable-group parser ---------------------------------------------------

namespace {

std::string strip_comments(const std::string& text) {
  std::string out;
  bool comment = false;
  for (char ch : text) {
    if (ch == '#') comment = true;
    if (ch == '\n') comment = false;
    out.push_back(comment ? ' ' : ch);
  }
  return out;
}

std::string trim(const std::string& s) {
  auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

// Splits on ';', requiring every nonempty statement to be terminated.
std::vector<std::string> statements(const std::string& text) {
  std::string clean = strip_comments(text);
  std::vector<std::string> out;
  std::string cur;
  for (char ch : clean) {
    if (ch == ';') {
      if (!trim(cur).empty()) out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!trim(cur).empty())
    throw ParseError("missing ';' after '" + trim(cur).substr(0, 40) + "'");
  return out;
}

std::vector<std::string> split_names(const std::string& s) {
  std::vector<std::string> names;
  std::string cur;
  for (char ch : s + ",") {
    if (ch == ',') {
      cur = trim(cur);
      if (cur.empty()) throw ParseError("empty name in list");
      names.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  return names;
}

}  // namespace

VariableGroups parse_variables(const std::string& text) {
  std::vector<VariableGroup> groups;
  for (const auto& stmt : statements(text)) {
    std::istringstream in(stmt);
    std::string keyword;
    in >> keyword;
    bool projective;
    if (keyword == "hom_variable_group") {
      projective = true;
    } else if (keyword == "variable_group") {
      projective = false;
    } else {
      throw ParseError("unknown keyword '" + keyword + "'");
    }
    std::string rest;
    std::getline(in, rest);
    VariableGroup g;
    g.projective = projective;
    g.names = split_names(rest);
    for (const auto& name : g.names)
      for (char ch : name)
        if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '_')
          throw ParseError("invalid variable name '" + name + "'");
    groups.push_back(std::move(g));
  }
  return VariableGroups(std::move(groups));
}

// --- equation parser ---------------------------------------------------------

namespace {

struct Token {
  enum Kind { Ident, Number, Imag, Plus, Minus, Star, Caret, LParen, RParen, Comma, Assign, End };
  Kind kind;
  std::string text;
  double value = 0.0;
};

class Lexer {
 public:
  explicit Lexer(std::string s) : s_(std::move(s)) {}

  Token next() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (pos_ >= s_.size()) return {Token::End, ""};
    char ch = s_[pos_];
    switch (ch) {
      case '+': ++pos_; return {Token::Plus, "+"};
      case '-': ++pos_; return {Token::Minus, "-"};
      case '*': ++pos_; return {Token::Star, "*"};
      case '^': ++pos_; return {Token::Caret, "^"};
      case '(': ++pos_; return {Token::LParen, "("};
      case ')': ++pos_; return {Token::RParen, ")"};
      case ',': ++pos_; return {Token::Comma, ","};
      case '=': ++pos_; return {Token::Assign, "="};
      default: break;
    }
    if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') {
      std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.'))
        ++pos_;
      if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
        std::size_t mark = pos_ + 1;
        if (mark < s_.size() && (s_[mark] == '+' || s_[mark] == '-')) ++mark;
        if (mark < s_.size() && std::isdigit(static_cast<unsigned char>(s_[mark]))) {
          pos_ = mark;
          while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        }
      }
      Token t{Token::Number, s_.substr(start, pos_ - start)};
      t.value = std::stod(t.text);
      return t;
    }
    if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
      std::size_t start = pos_;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
        ++pos_;
      std::string word = s_.substr(start, pos_ - start);
      if (word == "I") return {Token::Imag, word};
      return {Token::Ident, word};
    }
    throw ParseError(std::string("unexpected character '") + ch + "'");
  }

 private:
  std::string s_;
  std::size_t pos_ = 0;
};

// Recursive-descent expression parser producing expanded polynomials.
class ExprParser {
 public:
  ExprParser(const std::string& text, const VariableGroups& groups,
             const std::map<std::string, Polynomial>& env)
      : lex_(text), groups_(groups), env_(env) {
    advance();
  }

  Polynomial parse() {
    Polynomial p = expression();
    if (tok_.kind != Token::End)
      throw ParseError("trailing input near '" + tok_.text + "'");
    return p;
  }

 private:
  void advance() { tok_ = lex_.next(); }

  Polynomial expression() {
    Polynomial p(groups_.total_vars());
    bool negate = false;
    if (tok_.kind == Token::Minus) {
      negate = true;
      advance();
    } else if (tok_.kind == Token::Plus) {
      advance();
    }
    p = term();
    if (negate) p = -p;
    while (tok_.kind == Token::Plus || tok_.kind == Token::Minus) {
      bool minus = tok_.kind == Token::Minus;
      advance();
      Polynomial q = term();
      p = minus ? p - q : p + q;
    }
    return p;
  }

  Polynomial term() {
    Polynomial p = factor();
    while (tok_.kind == Token::Star) {
      advance();
      p = p * factor();
    }
    return p;
  }

  Polynomial factor() {
    Polynomial base = primary();
    while (tok_.kind == Token::Caret) {
      advance();
      bool neg = false;
      if (tok_.kind == Token::Minus) {
        neg = true;
        advance();
      }
      if (tok_.kind != Token::Number || tok_.text.find('.') != std::string::npos)
        throw ParseError("exponent must be an integer literal");
      if (neg) throw ParseError("negative exponent");
      base = base.pow(static_cast<int>(tok_.value));
      advance();
    }
    return base;
  }

  Polynomial primary() {
    const int n = groups_.total_vars();
    switch (tok_.kind) {
      case Token::Number: {
        Polynomial p = Polynomial::constant(n, {tok_.value, 0.0});
        advance();
        return p;
      }
      case Token::Imag: {
        advance();
        return Polynomial::constant(n, {0.0, 1.0});
      }
      case Token::Ident: {
        std::string name = tok_.text;
        advance();
        int v = groups_.var_index(name);
        if (v >= 0) return Polynomial::variable(n, v);
        auto it = env_.find(name);
        if (it != env_.end()) return it->second;
        throw ParseError("undeclared identifier '" + name + "'");
      }
      case Token::LParen: {
        advance();
        Polynomial p = expression();
        if (tok_.kind != Token::RParen) throw ParseError("expected ')'");
        advance();
        return p;
      }
      case Token::Minus: {
        advance();
        return -factor();
      }
      default:
        throw ParseError("unexpected token '" + tok_.text + "'");
    }
  }

  Lexer lex_;
  Token tok_;
  const VariableGroups& groups_;
  const std::map<std::string, Polynomial>& env_;
};

}  // namespace

PolySystem parse_equations(const std::string& text, const VariableGroups& groups) {
  std::vector<std::string> declared;
  std::map<std::string, Polynomial> env;
  std::set<std::string> assigned;

  for (const auto& stmt : statements(text)) {
    if (stmt.rfind("function", 0) == 0 &&
        (stmt.size() == 8 || std::isspace(static_cast<unsigned char>(stmt[8])))) {
      for (const auto& name : split_names(trim(stmt.substr(8)))) {
        if (groups.var_index(name) >= 0)
          throw ParseError("function name '" + name + "' clashes with a variable");
        declared.push_back(name);
      }
      continue;
    }
    auto eq = stmt.find('=');
    if (eq == std::string::npos)
      throw ParseError("expected assignment in '" + stmt.substr(0, 40) + "'");
    std::string name = trim(stmt.substr(0, eq));
    if (name.empty() || groups.var_index(name) >= 0)
      throw ParseError("invalid assignment target '" + name + "'");
    if (!assigned.insert(name).second)
      throw ParseError("'" + name + "' assigned more than once");
    ExprParser parser(stmt.substr(eq + 1), groups, env);
    env[name] = parser.parse();
  }

  if (declared.empty()) throw ParseError("no function declaration");
  PolySystem sys;
  sys.groups = groups;
  for (const auto& name : declared) {
    auto it = env.find(name);
    if (it == env.end())
      throw ParseError("declared function '" + name + "' is never assigned");
    sys.names.push_back(name);
    sys.polys.push_back(it->second);
    try {
      sys.degrees.push_back(it->second.group_degrees(groups));
    } catch (const NonHomogeneousError& e) {
      throw ParseError("polynomial '" + name + "' is not multihomogeneous: " + e.what());
    }
  }
  return sys;
}

// --- evaluation --------------------------------------------------------------

namespace {

void check_point(const PolySystem& sys, const MultiprojectivePoint& p) {
  if (static_cast<int>(p.blocks.size()) != sys.groups.group_count())
    throw std::invalid_argument("point block count does not match groups");
  for (int j = 0; j < sys.groups.group_count(); ++j)
    if (p.blocks[j].size() != sys.groups.group_size(j))
      throw std::invalid_argument("point block size mismatch in group " + std::to_string(j));
}

}  // namespace

Vector evaluate(const PolySystem& sys, const MultiprojectivePoint& p) {
  check_point(sys, p);
  Vector x = flatten(p);
  Vector out(static_cast<int>(sys.polys.size()));
  for (std::size_t i = 0; i < sys.polys.size(); ++i)
    out[static_cast<int>(i)] = sys.polys[i].eval(x);
  return out;
}

Matrix jacobian(const PolySystem& sys, const MultiprojectivePoint& p) {
  check_point(sys, p);
  Vector x = flatten(p);
  Matrix out(static_cast<int>(sys.polys.size()), sys.groups.total_vars());
  for (std::size_t i = 0; i < sys.polys.size(); ++i)
    out.row(static_cast<int>(i)) = sys.polys[i].gradient(x);
  return out;
}

std::vector<int> multidegree_of(const Polynomial& poly, const VariableGroups& groups) {
  if (poly.is_zero()) throw std::invalid_argument("multidegree of zero polynomial");
  return poly.group_degrees(groups);
}

Polynomial random_linear(int group_index, const VariableGroups& groups, Rng& rng) {
  if (group_index < 0 || group_index >= groups.group_count())
    throw std::invalid_argument("group index out of range");
  Polynomial p(groups.total_vars());
  std::vector<int> e(groups.total_vars(), 0);
  for (int v = groups.group_offset(group_index);
       v < groups.group_offset(group_index) + groups.group_size(group_index); ++v) {
    e[v] = 1;
    p.add_term(e, rng.unit());
    e[v] = 0;
  }
  return p;
}

}  // namespace mregen
