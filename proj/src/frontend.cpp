#include "dbkit/frontend.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

namespace dbkit {

namespace {

enum class Tok { End, Ident, Number, Plus, Minus, Star, Slash, Caret, LParen, RParen, Semi, Eq };

struct Lexer {
  const std::string& src;
  size_t pos = 0;
  int line = 1, col = 1;
  Tok tok = Tok::End;
  std::string text;
  int tok_line = 1, tok_col = 1;

  explicit Lexer(const std::string& s) : src(s) { next(); }

  void advance() {
    if (pos < src.size() && src[pos] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++pos;
  }

  void next() {
    while (pos < src.size()) {
      char c = src[pos];
      if (c == '#') {
        while (pos < src.size() && src[pos] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
    tok_line = line;
    tok_col = col;
    if (pos >= src.size()) {
      tok = Tok::End;
      text.clear();
      return;
    }
    char c = src[pos];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      text.clear();
      while (pos < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_')) {
        text += src[pos];
        advance();
      }
      tok = Tok::Ident;
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      text.clear();
      while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) {
        text += src[pos];
        advance();
      }
      tok = Tok::Number;
      return;
    }
    advance();
    switch (c) {
      case '+': tok = Tok::Plus; return;
      case '-': tok = Tok::Minus; return;
      case '*': tok = Tok::Star; return;
      case '/': tok = Tok::Slash; return;
      case '^': tok = Tok::Caret; return;
      case '(': tok = Tok::LParen; return;
      case ')': tok = Tok::RParen; return;
      case ';': tok = Tok::Semi; return;
      case '=': tok = Tok::Eq; return;
      default: throw ParseError(std::string("unexpected character '") + c + "'", tok_line, tok_col);
    }
  }
};

// Polynomial in first-order field atoms with ParamRat coefficients.  The key
// is the sorted multiset of atoms in a monomial; the empty key is the
// parameter-only part.
struct FieldExpr {
  int nvars = 0;
  std::map<std::vector<Atom>, ParamRat> terms;

  static FieldExpr scalar(const ParamRat& c) {
    FieldExpr e;
    e.nvars = c.nvars();
    if (!c.is_zero()) e.terms[{}] = c;
    return e;
  }
  static FieldExpr atom(int nvars, Atom a) {
    FieldExpr e;
    e.nvars = nvars;
    e.terms[{a}] = ParamRat::constant(nvars, 1);
    return e;
  }

  void add(const std::vector<Atom>& key, const ParamRat& c) {
    if (c.is_zero()) return;
    auto it = terms.find(key);
    if (it == terms.end()) {
      terms.emplace(key, c);
    } else {
      it->second = it->second + c;
      if (it->second.is_zero()) terms.erase(it);
    }
  }

  FieldExpr operator+(const FieldExpr& o) const {
    FieldExpr r = *this;
    for (auto& [k, c] : o.terms) r.add(k, c);
    return r;
  }
  FieldExpr operator-() const {
    FieldExpr r = *this;
    for (auto& [k, c] : r.terms) c = -c;
    return r;
  }
  FieldExpr operator*(const FieldExpr& o) const {
    FieldExpr r;
    r.nvars = nvars;
    for (auto& [k1, c1] : terms)
      for (auto& [k2, c2] : o.terms) {
        std::vector<Atom> k = k1;
        k.insert(k.end(), k2.begin(), k2.end());
        std::sort(k.begin(), k.end());
        r.add(k, c1 * c2);
      }
    return r;
  }
  bool is_scalar() const {
    return terms.empty() || (terms.size() == 1 && terms.begin()->first.empty());
  }
  ParamRat scalar_value() const {
    if (terms.empty()) return ParamRat(nvars);
    return terms.begin()->second;
  }
};

struct ModelBuilder {
  std::vector<std::string> params;
  std::vector<std::string> fields;

  int param_index(const std::string& s) const {
    auto it = std::find(params.begin(), params.end(), s);
    return it == params.end() ? -1 : static_cast<int>(it - params.begin());
  }
  int field_index(const std::string& s) const {
    auto it = std::find(fields.begin(), fields.end(), s);
    return it == fields.end() ? -1 : static_cast<int>(it - fields.begin());
  }
};

std::string monomial_str(const ModelIR& m, const std::vector<Atom>& key) {
  std::string s;
  for (size_t i = 0; i < key.size(); ++i) {
    if (i) s += "*";
    s += m.atom_str(key[i]);
  }
  return s.empty() ? "1" : s;
}

class ExprParser {
 public:
  ExprParser(Lexer& lx, const ModelBuilder& mb) : lx_(lx), mb_(mb) {}

  FieldExpr parse() { return expr(); }

 private:
  Lexer& lx_;
  const ModelBuilder& mb_;

  [[noreturn]] void fail(const std::string& m) { throw ParseError(m, lx_.tok_line, lx_.tok_col); }
  [[noreturn]] void sfail(const std::string& m) { throw SemanticError(m); }

  FieldExpr expr() {
    FieldExpr v = term();
    while (lx_.tok == Tok::Plus || lx_.tok == Tok::Minus) {
      bool minus = lx_.tok == Tok::Minus;
      lx_.next();
      FieldExpr r = term();
      v = minus ? v + (-r) : v + r;
    }
    return v;
  }

  FieldExpr term() {
    FieldExpr v = unary();
    while (lx_.tok == Tok::Star || lx_.tok == Tok::Slash) {
      bool div = lx_.tok == Tok::Slash;
      lx_.next();
      FieldExpr r = unary();
      if (div) {
        if (!r.is_scalar())
          sfail("division by a field-dependent expression");
        ParamRat d = r.scalar_value();
        if (d.is_zero()) sfail("division by zero");
        FieldExpr out;
        out.nvars = v.nvars;
        for (auto& [k, c] : v.terms) out.add(k, c / d);
        v = out;
      } else {
        v = v * r;
      }
    }
    return v;
  }

  FieldExpr unary() {
    if (lx_.tok == Tok::Minus) {
      lx_.next();
      return -unary();
    }
    return factor();
  }

  FieldExpr factor() {
    FieldExpr b = base();
    if (lx_.tok == Tok::Caret) {
      lx_.next();
      if (lx_.tok != Tok::Number) fail("expected integer exponent after '^'");
      long n = std::stol(lx_.text);
      lx_.next();
      FieldExpr r = FieldExpr::scalar(ParamRat::constant(b.nvars, 1));
      for (long i = 0; i < n; ++i) r = r * b;
      return r;
    }
    return b;
  }

  FieldExpr derivative(Atom::Tag tag) {
    lx_.next();
    if (lx_.tok != Tok::LParen) fail("expected '(' after derivative");
    lx_.next();
    FieldExpr arg = expr();
    if (lx_.tok != Tok::RParen) fail("expected ')'");
    lx_.next();
    FieldExpr out;
    out.nvars = arg.nvars;
    for (auto& [k, c] : arg.terms) {
      if (k.empty()) sfail("derivative of a field-free expression");
      if (k.size() > 1) sfail("non-quadratic: derivative of a nonlinear expression");
      Atom a = k[0];
      if (a.tag != Atom::Val) sfail("second derivative");
      out.add({Atom{a.field, tag}}, c);
    }
    return out;
  }

  FieldExpr base() {
    int nv = static_cast<int>(mb_.params.size());
    switch (lx_.tok) {
      case Tok::LParen: {
        lx_.next();
        FieldExpr v = expr();
        if (lx_.tok != Tok::RParen) fail("expected ')'");
        lx_.next();
        return v;
      }
      case Tok::Number: {
        Int n = std::stoll(lx_.text);
        lx_.next();
        return FieldExpr::scalar(ParamRat::constant(nv, n));
      }
      case Tok::Ident: {
        std::string id = lx_.text;
        if (id == "dt") return derivative(Atom::Dt);
        if (id == "dx") return derivative(Atom::Dx);
        lx_.next();
        int pi = mb_.param_index(id);
        if (pi >= 0) return FieldExpr::scalar(ParamRat::variable(nv, pi));
        int fi = mb_.field_index(id);
        if (fi >= 0) return FieldExpr::atom(nv, Atom{fi, Atom::Val});
        sfail("undeclared name '" + id + "'");
      }
      default:
        fail("expected expression");
    }
  }
};

void expect(Lexer& lx, Tok t, const char* what) {
  if (lx.tok != t) throw ParseError(std::string("expected ") + what, lx.tok_line, lx.tok_col);
  lx.next();
}

}  // namespace

ModelIR parse_model(const std::string& text, const std::string& name) {
  Lexer lx(text);
  ModelBuilder mb;
  bool have_l = false;
  FieldExpr lag;
  while (lx.tok != Tok::End) {
    if (lx.tok != Tok::Ident)
      throw ParseError("expected 'params', 'fields' or 'L'", lx.tok_line, lx.tok_col);
    std::string kw = lx.text;
    if (kw == "params" || kw == "fields") {
      lx.next();
      std::vector<std::string>& dst = (kw == "params") ? mb.params : mb.fields;
      if (lx.tok != Tok::Ident) throw ParseError("expected identifier", lx.tok_line, lx.tok_col);
      while (lx.tok == Tok::Ident) {
        if (lx.text == "dt" || lx.text == "dx" || lx.text == "L" || lx.text == "params" ||
            lx.text == "fields")
          throw ParseError("reserved word '" + lx.text + "'", lx.tok_line, lx.tok_col);
        if (mb.param_index(lx.text) >= 0 || mb.field_index(lx.text) >= 0)
          throw ParseError("duplicate name '" + lx.text + "'", lx.tok_line, lx.tok_col);
        dst.push_back(lx.text);
        lx.next();
      }
      expect(lx, Tok::Semi, "';'");
    } else if (kw == "L") {
      lx.next();
      expect(lx, Tok::Eq, "'='");
      ExprParser ep(lx, mb);
      lag = ep.parse();
      expect(lx, Tok::Semi, "';'");
      have_l = true;
    } else {
      throw ParseError("unknown statement '" + kw + "'", lx.tok_line, lx.tok_col);
    }
  }
  if (mb.fields.empty()) throw SemanticError("no fields declared");
  if (!have_l) throw SemanticError("no Lagrangian given");

  ModelIR m;
  m.name = name;
  m.params = mb.params;
  m.fields = mb.fields;
  for (auto& [key, c] : lag.terms) {
    if (key.size() != 2) {
      ModelIR probe;
      probe.fields = mb.fields;
      std::string t = key.empty() ? "constant term" : "'" + monomial_str(probe, key) + "'";
      if (key.size() < 2) throw SemanticError("non-quadratic (degree below two): " + t);
      throw SemanticError("non-quadratic: " + t);
    }
    m.add_term(key[0], key[1], c);
  }
  return m;
}

std::string print_model(const ModelIR& m) {
  std::ostringstream os;
  if (!m.params.empty()) {
    os << "params";
    for (auto& p : m.params) os << " " << p;
    os << ";\n";
  }
  os << "fields";
  for (auto& f : m.fields) os << " " << f;
  os << ";\nL =";
  bool first = true;
  for (auto& [key, c] : m.lagrangian) {
    std::string cs = c.str(m.params);
    bool neg = !cs.empty() && cs[0] == '-';
    if (neg) cs = cs.substr(1);
    os << (first ? (neg ? " -" : " ") : (neg ? " - " : " + "));
    if (cs != "1") {
      bool paren = cs.find_first_of("+- ") != std::string::npos;
      os << (paren ? "(" + cs + ")" : cs) << "*";
    }
    os << m.atom_str(key.first) << "*" << m.atom_str(key.second);
    first = false;
  }
  os << ";\n";
  return os.str();
}

PhaseDensity parse_phase_density(const std::string& text, const CoordSystem& cs) {
  // reuse the expression engine with phase coordinates in place of fields
  Lexer lx(text);
  ModelBuilder mb;
  mb.params = cs.params();
  for (int i = 0; i < cs.ncanonical(); ++i) mb.fields.push_back(cs.name(i));
  ExprParser ep(lx, mb);
  FieldExpr e = ep.parse();
  if (lx.tok != Tok::End) throw ParseError("trailing input", lx.tok_line, lx.tok_col);
  PhaseDensity d(&cs);
  for (auto& [key, c] : e.terms) {
    if (key.empty()) throw SemanticError("phase density has a field-free term");
    if (key.size() > 1) throw SemanticError("phase density must be linear");
    Atom a = key[0];
    if (a.tag == Atom::Dt) throw SemanticError("time derivative not allowed in a phase density");
    int pow = a.tag == Atom::Dx ? 1 : 0;
    OpPoly term = pow ? OpPoly::d(cs.nvars(), 1) : OpPoly::constant(cs.nvars(), 1);
    d.add(a.field, term * c);
  }
  return d;
}

GaugeSpec parse_gauge_file(const std::string& text) {
  GaugeSpec g;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    bool blank = std::all_of(line.begin(), line.end(),
                             [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
    if (!blank) g.sources.push_back(line);
  }
  return g;
}

std::vector<std::string> preset_names() {
  return {"jr-symbolic", "jr-a1", "jr-wz", "jr-wz-gaugefixed"};
}

Preset preset_model(const std::string& name) {
  // The vector-field variables are the covariant components A0 = A_0, A1 = A_1.
  static const char* kSymbolic =
      "params a e;\n"
      "fields phi A0 A1;\n"
      "L = 1/2*(dt(A1) - dx(A0))^2"
      " + 1/2*dt(phi)^2 - 1/2*dx(phi)^2"
      " + e*(dt(phi) + dx(phi))*(A0 - A1)"
      " + 1/2*a*e^2*(A0^2 - A1^2);\n";
  static const char* kA1 =
      "fields phi A0 A1;\n"
      "L = 1/2*(dt(phi)^2 - dx(phi)^2)"
      " + (dt(phi) + dx(phi))*(A0 - A1)"
      " + 1/2*(dt(A1) - dx(A0))^2"
      " + 1/2*(A0^2 - A1^2);\n";
  static const char* kWz =
      "fields phi A0 A1 theta;\n"
      "L = 1/2*(dt(phi)^2 - dx(phi)^2)"
      " + (dt(phi) + dx(phi))*(A0 - A1)"
      " + 1/2*(dt(A1) - dx(A0))^2"
      " + 1/2*(A0^2 - A1^2)"
      " + dx(phi)*dt(theta) - dt(phi)*dx(theta)"
      " + dt(theta)*A1 - dx(theta)*A0;\n";

  Preset p;
  if (name == "jr-symbolic") {
    p.model = parse_model(kSymbolic, name);
  } else if (name == "jr-a1") {
    p.model = parse_model(kA1, name);
  } else if (name == "jr-wz") {
    p.model = parse_model(kWz, name);
  } else if (name == "jr-wz-gaugefixed") {
    p.model = parse_model(kWz, name);
    p.gauge.sources = {"-dx(theta)", "-p_phi - dx(phi) - 2*A1 + A0 + dx(theta)"};
  } else {
    throw SemanticError("unknown preset '" + name + "'");
  }
  return p;
}

}  // namespace dbkit
