#include "wk4/formula.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <unordered_map>

namespace wk4 {

namespace {

size_t combine(size_t a, size_t b) { return a * 1099511628211ULL + b + 0x9e3779b9; }

}  // namespace

Formula Formula::make(Conn k, std::string v, NodePtr l, NodePtr r) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->var = std::move(v);
  n->lhs = std::move(l);
  n->rhs = std::move(r);
  size_t h = (size_t)k * 0x100000001b3ULL;
  if (k == Conn::Var) h = combine(h, std::hash<std::string>()(n->var));
  int sz = 1, md = 0;
  if (n->lhs) {
    h = combine(h, n->lhs->hash);
    sz += n->lhs->size;
    md = n->lhs->modal_depth;
  }
  if (n->rhs) {
    h = combine(h, n->rhs->hash);
    sz += n->rhs->size;
    md = std::max(md, n->rhs->modal_depth);
  }
  if (k == Conn::Diamond) md += 1;
  n->hash = h;
  n->size = sz;
  n->modal_depth = md;
  return Formula(std::move(n));
}

Formula Formula::ff() {
  static Formula f = make(Conn::False, "", nullptr, nullptr);
  return f;
}
Formula Formula::tt() {
  static Formula f = make(Conn::True, "", nullptr, nullptr);
  return f;
}
Formula Formula::var(const std::string& name) {
  require(!name.empty(), "variable name must be nonempty");
  return make(Conn::Var, name, nullptr, nullptr);
}
Formula Formula::nnot(Formula f) { return make(Conn::Not, "", f.node_, nullptr); }
Formula Formula::aand(Formula a, Formula b) {
  return make(Conn::And, "", a.node_, b.node_);
}
Formula Formula::diamond(Formula f) {
  return make(Conn::Diamond, "", f.node_, nullptr);
}
Formula Formula::oor(Formula a, Formula b) {
  return nnot(aand(nnot(a), nnot(b)));
}
Formula Formula::implies(Formula a, Formula b) { return nnot(aand(a, nnot(b))); }
Formula Formula::iff(Formula a, Formula b) {
  return aand(implies(a, b), implies(b, a));
}
Formula Formula::box(Formula f) { return nnot(diamond(nnot(f))); }
Formula Formula::diamond_plus(Formula f) { return oor(f, diamond(f)); }
Formula Formula::box_plus(Formula f) { return aand(f, box(f)); }

Formula Formula::conj(const std::vector<Formula>& fs) {
  if (fs.empty()) return tt();
  Formula r = fs[0];
  for (size_t i = 1; i < fs.size(); ++i) r = aand(r, fs[i]);
  return r;
}
Formula Formula::disj(const std::vector<Formula>& fs) {
  if (fs.empty()) return ff();
  Formula r = fs[0];
  for (size_t i = 1; i < fs.size(); ++i) r = oor(r, fs[i]);
  return r;
}

bool Formula::operator==(const Formula& o) const {
  const Node* a = node_.get();
  const Node* b = o.node_.get();
  if (a == b) return true;
  if (a->hash != b->hash || a->kind != b->kind || a->size != b->size) return false;
  if (a->kind == Conn::Var) return a->var == b->var;
  if (a->lhs && !(Formula(a->lhs) == Formula(b->lhs))) return false;
  if (a->rhs && !(Formula(a->rhs) == Formula(b->rhs))) return false;
  return true;
}

bool Formula::operator<(const Formula& o) const {
  if (size() != o.size()) return size() < o.size();
  return to_string() < o.to_string();
}

namespace {

// Precedence levels for printing: atoms 3, prefix 2, & 1.
void print_rec(const Formula& f, int min_prec, std::string& out) {
  switch (f.kind()) {
    case Conn::False: out += "false"; return;
    case Conn::True: out += "true"; return;
    case Conn::Var: out += f.var(); return;
    case Conn::Not:
    case Conn::Diamond: {
      bool paren = min_prec > 2;
      if (paren) out += '(';
      out += f.kind() == Conn::Not ? "~" : "<>";
      print_rec(f.child(), 2, out);
      if (paren) out += ')';
      return;
    }
    case Conn::And: {
      bool paren = min_prec > 1;
      if (paren) out += '(';
      print_rec(f.left(), 1, out);
      out += '&';
      print_rec(f.right(), 2, out);  // & is left-associative
      if (paren) out += ')';
      return;
    }
  }
}

void print_full(const Formula& f, std::string& out) {
  switch (f.kind()) {
    case Conn::False: out += "false"; return;
    case Conn::True: out += "true"; return;
    case Conn::Var: out += f.var(); return;
    case Conn::Not:
      out += "(~";
      print_full(f.child(), out);
      out += ')';
      return;
    case Conn::Diamond:
      out += "(<>";
      print_full(f.child(), out);
      out += ')';
      return;
    case Conn::And:
      out += '(';
      print_full(f.left(), out);
      out += '&';
      print_full(f.right(), out);
      out += ')';
      return;
  }
}

}  // namespace

std::string Formula::to_string() const {
  std::string s;
  print_rec(*this, 0, s);
  return s;
}

std::string Formula::to_string_parenthesized() const {
  std::string s;
  print_full(*this, s);
  return s;
}

ParseError::ParseError(int line_, int col_, std::string msg,
                       std::vector<std::string> expected_)
    : std::runtime_error(std::move(msg)), line(line_), col(col_),
      expected(std::move(expected_)) {}

namespace {

enum class Tok { End, True, False, Ident, Not, And, Or, Implies, Iff, Diamond, Box, LParen, RParen };

const char* tok_name(Tok t) {
  switch (t) {
    case Tok::End: return "end of input";
    case Tok::True: return "'true'";
    case Tok::False: return "'false'";
    case Tok::Ident: return "identifier";
    case Tok::Not: return "'~'";
    case Tok::And: return "'&'";
    case Tok::Or: return "'|'";
    case Tok::Implies: return "'->'";
    case Tok::Iff: return "'<->'";
    case Tok::Diamond: return "'<>'";
    case Tok::Box: return "'[]'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
  }
  return "?";
}

class Lexer {
public:
  explicit Lexer(const std::string& text) : text_(text) { advance(); }

  Tok tok() const { return tok_; }
  const std::string& ident() const { return ident_; }
  int line() const { return tok_line_; }
  int col() const { return tok_col_; }

  void advance() {
    skip_ws();
    tok_line_ = line_;
    tok_col_ = col_;
    if (pos_ >= text_.size()) {
      tok_ = Tok::End;
      return;
    }
    char c = text_[pos_];
    if (c == '~') { bump(); tok_ = Tok::Not; return; }
    if (c == '&') { bump(); tok_ = Tok::And; return; }
    if (c == '|') { bump(); tok_ = Tok::Or; return; }
    if (c == '(') { bump(); tok_ = Tok::LParen; return; }
    if (c == ')') { bump(); tok_ = Tok::RParen; return; }
    if (c == '-') {
      bump();
      if (pos_ < text_.size() && text_[pos_] == '>') { bump(); tok_ = Tok::Implies; return; }
      fail("'->'");
    }
    if (c == '<') {
      bump();
      if (pos_ < text_.size() && text_[pos_] == '>') { bump(); tok_ = Tok::Diamond; return; }
      if (pos_ + 1 < text_.size() && text_[pos_] == '-' && text_[pos_ + 1] == '>') {
        bump(); bump();
        tok_ = Tok::Iff;
        return;
      }
      fail("'<>' or '<->'");
    }
    if (c == '[') {
      bump();
      if (pos_ < text_.size() && text_[pos_] == ']') { bump(); tok_ = Tok::Box; return; }
      fail("'[]'");
    }
    if (isalpha((unsigned char)c) || c == '_') {
      std::string id;
      while (pos_ < text_.size() &&
             (isalnum((unsigned char)text_[pos_]) || text_[pos_] == '_')) {
        id += text_[pos_];
        bump();
      }
      if (id == "true") { tok_ = Tok::True; return; }
      if (id == "false") { tok_ = Tok::False; return; }
      tok_ = Tok::Ident;
      ident_ = std::move(id);
      return;
    }
    fail("a token");
  }

  [[noreturn]] void fail(const std::string& expected) const {
    throw ParseError(tok_line_, tok_col_,
                     "syntax error at line " + std::to_string(tok_line_) + ", column " +
                         std::to_string(tok_col_) + ": expected " + expected,
                     {expected});
  }

private:
  void skip_ws() {
    while (pos_ < text_.size() && isspace((unsigned char)text_[pos_])) bump();
  }
  void bump() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  const std::string& text_;
  size_t pos_ = 0;
  int line_ = 1, col_ = 1;
  Tok tok_ = Tok::End;
  std::string ident_;
  int tok_line_ = 1, tok_col_ = 1;
};

class Parser {
public:
  explicit Parser(const std::string& text) : lex_(text) {}

  Formula run() {
    Formula f = parse_iff();
    if (lex_.tok() != Tok::End) expect_failure({"'&'", "'|'", "'->'", "'<->'", "end of input"});
    return f;
  }

private:
  [[noreturn]] void expect_failure(std::vector<std::string> expected) {
    std::string msg = "syntax error at line " + std::to_string(lex_.line()) +
                      ", column " + std::to_string(lex_.col()) + ": unexpected " +
                      tok_name(lex_.tok()) + ", expected ";
    for (size_t i = 0; i < expected.size(); ++i) {
      if (i) msg += i + 1 == expected.size() ? " or " : ", ";
      msg += expected[i];
    }
    throw ParseError(lex_.line(), lex_.col(), msg, std::move(expected));
  }

  Formula parse_iff() {
    Formula a = parse_implies();
    if (lex_.tok() == Tok::Iff) {
      lex_.advance();
      Formula b = parse_iff();
      return Formula::iff(a, b);
    }
    return a;
  }

  Formula parse_implies() {
    Formula a = parse_or();
    if (lex_.tok() == Tok::Implies) {
      lex_.advance();
      Formula b = parse_implies();  // right-associative
      return Formula::implies(a, b);
    }
    return a;
  }

  Formula parse_or() {
    Formula a = parse_and();
    while (lex_.tok() == Tok::Or) {
      lex_.advance();
      a = Formula::oor(a, parse_and());
    }
    return a;
  }

  Formula parse_and() {
    Formula a = parse_unary();
    while (lex_.tok() == Tok::And) {
      lex_.advance();
      a = Formula::aand(a, parse_unary());
    }
    return a;
  }

  Formula parse_unary() {
    switch (lex_.tok()) {
      case Tok::Not: lex_.advance(); return Formula::nnot(parse_unary());
      case Tok::Diamond: lex_.advance(); return Formula::diamond(parse_unary());
      case Tok::Box: lex_.advance(); return Formula::box(parse_unary());
      case Tok::True: lex_.advance(); return Formula::tt();
      case Tok::False: lex_.advance(); return Formula::ff();
      case Tok::Ident: {
        Formula f = Formula::var(lex_.ident());
        lex_.advance();
        return f;
      }
      case Tok::LParen: {
        lex_.advance();
        Formula f = parse_iff();
        if (lex_.tok() != Tok::RParen) expect_failure({"')'"});
        lex_.advance();
        return f;
      }
      default:
        expect_failure({"'true'", "'false'", "identifier", "'~'", "'<>'", "'[]'", "'('"});
    }
  }

  Lexer lex_;
};

}  // namespace

Formula parse(const std::string& text) { return Parser(text).run(); }

Signature make_signature(std::vector<std::string> vars) {
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
  return vars;
}

namespace {
void collect_vars(const Formula& f, std::vector<std::string>& out) {
  switch (f.kind()) {
    case Conn::Var: out.push_back(f.var()); return;
    case Conn::Not:
    case Conn::Diamond: collect_vars(f.child(), out); return;
    case Conn::And:
      collect_vars(f.left(), out);
      collect_vars(f.right(), out);
      return;
    default: return;
  }
}
}  // namespace

Signature signature_of(const Formula& f) {
  std::vector<std::string> vars;
  collect_vars(f, vars);
  return make_signature(std::move(vars));
}

Signature signature_union(const Signature& a, const Signature& b) {
  Signature out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

Signature shared_signature(const Formula& phi, const Formula& psi) {
  Signature a = signature_of(phi), b = signature_of(psi), out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(out));
  return out;
}

bool signature_contains(const Signature& sig, const std::string& v) {
  return std::binary_search(sig.begin(), sig.end(), v);
}

bool signature_subset(const Signature& a, const Signature& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

SubClosure::SubClosure(Formula phi, Formula psi) : phi_(phi), psi_(psi) {
  collect(phi, true);
  phi_rep_count_ = (int)reps_.size();
  collect(psi, false);
  for (size_t i = 0; i < reps_.size(); ++i)
    if (in_psi_[i]) ++psi_rep_count_;
  for (int i = 0; i < (int)reps_.size(); ++i) {
    if (reps_[i].kind() == Conn::Diamond) {
      diamond_reps_.push_back(i);
      Lit l = normalize(reps_[i].child());
      require(l.idx >= 0, "closure must contain diamond children");
      diamond_child_[i] = l;
    }
  }
}

int SubClosure::add_rep(const Formula& f) {
  for (size_t i = 0; i < reps_.size(); ++i)
    if (reps_[i] == f) return (int)i;
  reps_.push_back(f);
  in_phi_.push_back(false);
  in_psi_.push_back(false);
  diamond_child_.push_back({-1, true});
  return (int)reps_.size() - 1;
}

void SubClosure::collect(const Formula& f, bool from_phi) {
  // Representative of this subtree: strip ~~ pairs.
  Formula core = f;
  while (core.kind() == Conn::Not && core.child().kind() == Conn::Not)
    core = core.child().child();
  if (core.kind() != Conn::Not) {
    int i = add_rep(core);
    (from_phi ? in_phi_ : in_psi_)[i] = true;
  }
  switch (f.kind()) {
    case Conn::Not:
    case Conn::Diamond: collect(f.child(), from_phi); break;
    case Conn::And:
      collect(f.left(), from_phi);
      collect(f.right(), from_phi);
      break;
    default: break;
  }
}

SubClosure::Lit SubClosure::normalize(const Formula& f) const {
  Formula core = f;
  bool pos = true;
  while (core.kind() == Conn::Not) {
    pos = !pos;
    core = core.child();
  }
  for (size_t i = 0; i < reps_.size(); ++i)
    if (reps_[i] == core) return {(int)i, pos};
  return {-1, pos};
}

std::optional<int> SubClosure::index_of(const Formula& f) const {
  for (size_t i = 0; i < reps_.size(); ++i)
    if (reps_[i] == f) return (int)i;
  return std::nullopt;
}

bool SubClosure::type_contains(const BitVec& type, const Formula& f) const {
  Lit l = normalize(f);
  require(l.idx >= 0, "formula is not a closure member: " + f.to_string());
  return type.get(l.idx) == l.pos;
}

}  // namespace wk4
