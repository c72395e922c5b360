#include "rtfx/parser.hpp"

#include <cctype>
#include <vector>

namespace rtfx {

namespace {

enum class Tok {
  Ident,
  Int,
  KwUnit,
  KwFun,
  KwTfun,
  KwRef,
  KwFree,
  KwMove,
  KwVal,
  KwForall,
  KwTyUnit,
  KwTyInt,
  KwTyTop,
  KwTyRef,
  LParen,
  RParen,
  LBrace,
  RBrace,
  LBracket,
  RBracket,
  Caret,
  Comma,
  Semi,
  Colon,
  ColonEq,
  Eq,
  Lt,
  Gt,
  SubtypeOf,
  Arrow,
  Bang,
  Star,
  End,
};

const char* tok_name(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::Int: return "integer";
    case Tok::KwUnit: return "'unit'";
    case Tok::KwFun: return "'fun'";
    case Tok::KwTfun: return "'tfun'";
    case Tok::KwRef: return "'ref'";
    case Tok::KwFree: return "'free'";
    case Tok::KwMove: return "'move'";
    case Tok::KwVal: return "'val'";
    case Tok::KwForall: return "'forall'";
    case Tok::KwTyUnit: return "'Unit'";
    case Tok::KwTyInt: return "'Int'";
    case Tok::KwTyTop: return "'Top'";
    case Tok::KwTyRef: return "'Ref'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::Caret: return "'^'";
    case Tok::Comma: return "','";
    case Tok::Semi: return "';'";
    case Tok::Colon: return "':'";
    case Tok::ColonEq: return "':='";
    case Tok::Eq: return "'='";
    case Tok::Lt: return "'<'";
    case Tok::Gt: return "'>'";
    case Tok::SubtypeOf: return "'<:'";
    case Tok::Arrow: return "'->'";
    case Tok::Bang: return "'!'";
    case Tok::Star: return "'*'";
    case Tok::End: return "end of input";
  }
  return "?";
}

struct Token {
  Tok kind;
  std::string text;
  int line;
  int col;
};

std::vector<Token> lex(const std::string& src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto push = [&](Tok k, std::string text, int l, int c) {
    out.push_back(Token{k, std::move(text), l, c});
  };
  while (i < src.size()) {
    char c = src[i];
    if (c == '\n') {
      ++line;
      col = 1;
      ++i;
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r') {
      ++col;
      ++i;
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') ++i;
      continue;
    }
    int l = line, co = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[j])) ||
              src[j] == '_' || src[j] == '\''))
        ++j;
      std::string word = src.substr(i, j - i);
      col += static_cast<int>(j - i);
      i = j;
      Tok k = Tok::Ident;
      if (word == "unit") k = Tok::KwUnit;
      else if (word == "fun") k = Tok::KwFun;
      else if (word == "tfun") k = Tok::KwTfun;
      else if (word == "ref") k = Tok::KwRef;
      else if (word == "free") k = Tok::KwFree;
      else if (word == "move") k = Tok::KwMove;
      else if (word == "val") k = Tok::KwVal;
      else if (word == "forall") k = Tok::KwForall;
      else if (word == "Unit") k = Tok::KwTyUnit;
      else if (word == "Int") k = Tok::KwTyInt;
      else if (word == "Top") k = Tok::KwTyTop;
      else if (word == "Ref") k = Tok::KwTyRef;
      push(k, std::move(word), l, co);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j])))
        ++j;
      push(Tok::Int, src.substr(i, j - i), l, co);
      col += static_cast<int>(j - i);
      i = j;
      continue;
    }
    auto two = [&](char a, char b) {
      return c == a && i + 1 < src.size() && src[i + 1] == b;
    };
    if (two(':', '=')) { push(Tok::ColonEq, ":=", l, co); i += 2; col += 2; continue; }
    if (two('<', ':')) { push(Tok::SubtypeOf, "<:", l, co); i += 2; col += 2; continue; }
    if (two('-', '>')) { push(Tok::Arrow, "->", l, co); i += 2; col += 2; continue; }
    Tok k;
    switch (c) {
      case '(': k = Tok::LParen; break;
      case ')': k = Tok::RParen; break;
      case '{': k = Tok::LBrace; break;
      case '}': k = Tok::RBrace; break;
      case '[': k = Tok::LBracket; break;
      case ']': k = Tok::RBracket; break;
      case '^': k = Tok::Caret; break;
      case ',': k = Tok::Comma; break;
      case ';': k = Tok::Semi; break;
      case ':': k = Tok::Colon; break;
      case '=': k = Tok::Eq; break;
      case '<': k = Tok::Lt; break;
      case '>': k = Tok::Gt; break;
      case '!': k = Tok::Bang; break;
      case '*': k = Tok::Star; break;
      default:
        throw ParseError(l, co, std::string("unexpected character '") + c +
                                    "'");
    }
    push(k, std::string(1, c), l, co);
    ++i;
    ++col;
  }
  out.push_back(Token{Tok::End, "", line, col});
  return out;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  TermPtr parse_program() {
    TermPtr t = parse_term();
    expect(Tok::End, "after the program");
    return t;
  }

  QualifiedType parse_type_entry() {
    QualifiedType q = parse_qualtype();
    expect(Tok::End, "after the type");
    return q;
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;

  const Token& peek(int ahead = 0) const {
    std::size_t i = pos_ + ahead;
    return i < toks_.size() ? toks_[i] : toks_.back();
  }
  bool at(Tok k) const { return peek().kind == k; }
  Token advance() { return toks_[pos_++]; }
  Token expect(Tok k, const std::string& where) {
    if (!at(k))
      throw ParseError(peek().line, peek().col,
                       std::string("expected ") + tok_name(k) + " " + where +
                           ", found " + tok_name(peek().kind));
    return advance();
  }
  Span span_here() const { return Span{peek().line, peek().col}; }

  // term := 'val' x '=' assign ';' term | assign (';' term)?
  TermPtr parse_term() {
    Span s = span_here();
    if (at(Tok::KwVal)) {
      advance();
      Token name = expect(Tok::Ident, "after 'val'");
      expect(Tok::Eq, "after the binder name");
      TermPtr bound = parse_assign();
      expect(Tok::Semi, "after the bound expression");
      TermPtr body = parse_term();
      return make_let(name.text, bound, body, s);
    }
    TermPtr first = parse_assign();
    if (at(Tok::Semi)) {
      advance();
      TermPtr rest = parse_term();
      return make_let("_", first, rest, s);
    }
    return first;
  }

  TermPtr parse_assign() {
    Span s = span_here();
    TermPtr lhs = parse_app();
    if (at(Tok::ColonEq)) {
      advance();
      TermPtr rhs = parse_app();
      return make_assign(lhs, rhs, s);
    }
    return lhs;
  }

  bool starts_prefix() const {
    switch (peek().kind) {
      case Tok::KwRef:
      case Tok::Bang:
      case Tok::KwFree:
      case Tok::KwMove:
      case Tok::KwUnit:
      case Tok::Int:
      case Tok::Ident:
      case Tok::KwFun:
      case Tok::KwTfun:
      case Tok::LParen:
        return true;
      default:
        return false;
    }
  }

  TermPtr parse_app() {
    Span s = span_here();
    TermPtr t = parse_prefix();
    for (;;) {
      if (at(Tok::LBracket)) {
        advance();
        QualifiedType arg = parse_qualtype();
        expect(Tok::RBracket, "after the type argument");
        t = make_tapp(t, arg, s);
      } else if (starts_prefix()) {
        TermPtr arg = parse_prefix();
        t = make_app(t, arg, s);
      } else {
        return t;
      }
    }
  }

  TermPtr parse_prefix() {
    Span s = span_here();
    if (at(Tok::KwRef)) {
      advance();
      if (at(Tok::Caret)) {
        advance();
        Qualifier referent = parse_qualifier();
        return make_ref_at(parse_prefix(), referent, s);
      }
      return make_ref(parse_prefix(), s);
    }
    if (at(Tok::Bang)) {
      advance();
      return make_deref(parse_prefix(), s);
    }
    if (at(Tok::KwFree)) {
      advance();
      return make_free(parse_prefix(), s);
    }
    if (at(Tok::KwMove)) {
      advance();
      return make_move(parse_prefix(), s);
    }
    return parse_atom();
  }

  TermPtr parse_atom() {
    Span s = span_here();
    switch (peek().kind) {
      case Tok::KwUnit:
        advance();
        return make_unit(s);
      case Tok::Int: {
        Token t = advance();
        try {
          return make_int(std::stol(t.text), s);
        } catch (const std::out_of_range&) {
          throw ParseError(t.line, t.col, "integer literal out of range");
        }
      }
      case Tok::Ident: {
        Token t = advance();
        return make_var(t.text, s);
      }
      case Tok::LParen: {
        advance();
        TermPtr t = parse_term();
        expect(Tok::RParen, "to close the parenthesized expression");
        return t;
      }
      case Tok::KwFun:
        return parse_fun(s);
      case Tok::KwTfun:
        return parse_tfun(s);
      default:
        throw ParseError(peek().line, peek().col,
                         std::string("expected a term, found ") +
                             tok_name(peek().kind));
    }
  }

  TermPtr parse_fun(Span s) {
    expect(Tok::KwFun, "");
    Token self = expect(Tok::Ident, "after 'fun'");
    expect(Tok::LParen, "after the function name");
    Token param = expect(Tok::Ident, "as the parameter name");
    expect(Tok::Colon, "after the parameter name");
    QualifiedType domain = parse_qualtype();
    expect(Tok::RParen, "after the parameter annotation");
    std::optional<Qualifier> capture;
    if (at(Tok::Caret)) {
      advance();
      capture = parse_qualifier();
    }
    std::optional<Effect> latent;
    if (at(Tok::Lt)) latent = parse_effect();
    if (param.text == self.text)
      throw ParseError(param.line, param.col,
                       "parameter name must differ from the function name");
    expect(Tok::LBrace, "to open the function body");
    TermPtr body = parse_term();
    expect(Tok::RBrace, "to close the function body");
    return make_abs(self.text, param.text, domain, capture, latent, body, s);
  }

  TermPtr parse_tfun(Span s) {
    expect(Tok::KwTfun, "");
    Token self = expect(Tok::Ident, "after 'tfun'");
    expect(Tok::LBracket, "after the abstraction name");
    Token tvar = expect(Tok::Ident, "as the type variable");
    expect(Tok::Caret, "after the type variable");
    Token qvar = expect(Tok::Ident, "as the qualifier variable");
    expect(Tok::SubtypeOf, "after the qualifier variable");
    QualifiedType bound = parse_qualtype();
    expect(Tok::RBracket, "after the bound");
    std::optional<Qualifier> capture;
    if (at(Tok::Caret)) {
      advance();
      capture = parse_qualifier();
    }
    std::optional<Effect> latent;
    if (at(Tok::Lt)) latent = parse_effect();
    if (qvar.text == self.text)
      throw ParseError(qvar.line, qvar.col,
                       "qualifier variable must differ from the abstraction "
                       "name");
    expect(Tok::LBrace, "to open the abstraction body");
    TermPtr body = parse_term();
    expect(Tok::RBrace, "to close the abstraction body");
    return make_tabs(self.text, tvar.text, qvar.text, bound, capture, latent,
                     body, s);
  }

  // qualtype := type ('^' qualifier)?
  QualifiedType parse_qualtype() {
    TypePtr ty = parse_type();
    Qualifier q;
    if (at(Tok::Caret)) {
      advance();
      q = parse_qualifier();
    }
    return QualifiedType{ty, q};
  }

  TypePtr parse_type() {
    switch (peek().kind) {
      case Tok::KwTyUnit:
        advance();
        return make_unit_type();
      case Tok::KwTyInt:
        advance();
        return make_int_type();
      case Tok::KwTyTop:
        advance();
        return make_top_type();
      case Tok::KwTyRef: {
        advance();
        expect(Tok::LBracket, "after 'Ref'");
        QualifiedType referent = parse_qualtype();
        expect(Tok::RBracket, "after the referent type");
        return make_ref_type(referent);
      }
      case Tok::KwForall: {
        advance();
        Token self = expect(Tok::Ident, "after 'forall'");
        expect(Tok::LBracket, "after the abstraction name");
        Token tvar = expect(Tok::Ident, "as the type variable");
        expect(Tok::Caret, "after the type variable");
        Token qvar = expect(Tok::Ident, "as the qualifier variable");
        expect(Tok::SubtypeOf, "after the qualifier variable");
        QualifiedType bound = parse_qualtype();
        expect(Tok::RBracket, "after the bound");
        expect(Tok::Arrow, "after the bound");
        Effect latent;
        if (at(Tok::Lt)) latent = parse_effect();
        QualifiedType body = parse_qualtype();
        return make_all_type(self.text, tvar.text, qvar.text, bound, latent,
                             body);
      }
      case Tok::LParen: {
        advance();
        TypePtr inner = parse_type();
        expect(Tok::RParen, "to close the parenthesized type");
        return inner;
      }
      case Tok::Ident: {
        Token name = advance();
        if (at(Tok::LParen)) {
          // function type: f(x: QT) -> eff? QT
          advance();
          Token param = expect(Tok::Ident, "as the parameter name");
          expect(Tok::Colon, "after the parameter name");
          QualifiedType domain = parse_qualtype();
          expect(Tok::RParen, "after the parameter annotation");
          expect(Tok::Arrow, "after the parameter list");
          Effect latent;
          if (at(Tok::Lt)) latent = parse_effect();
          QualifiedType codomain = parse_qualtype();
          return make_fun_type(name.text, param.text, domain, latent,
                               codomain);
        }
        return make_type_var(name.text);
      }
      default:
        throw ParseError(peek().line, peek().col,
                         std::string("expected a type, found ") +
                             tok_name(peek().kind));
    }
  }

  Qualifier parse_qualifier() {
    expect(Tok::LBrace, "to open the qualifier");
    Qualifier q;
    if (!at(Tok::RBrace)) {
      for (;;) {
        if (at(Tok::Star)) {
          advance();
          q.fresh = true;
        } else {
          Token name = expect(Tok::Ident, "in the qualifier");
          q.atoms.insert(Atom::var(name.text));
        }
        if (!at(Tok::Comma)) break;
        advance();
      }
    }
    expect(Tok::RBrace, "to close the qualifier");
    return q;
  }

  AtomSet parse_atom_set() {
    Qualifier q = parse_qualifier();
    if (q.fresh)
      throw ParseError(peek().line, peek().col,
                       "effect qualifiers may not contain '*'");
    return q.atoms;
  }

  // effect := '<' ('u' ':' set)? (',')? ('k' ':' set)? '>'
  Effect parse_effect() {
    expect(Tok::Lt, "to open the effect");
    Effect e;
    bool expect_more = !at(Tok::Gt);
    while (expect_more) {
      Token field = expect(Tok::Ident, "as the effect component ('u' or 'k')");
      expect(Tok::Colon, "after the effect component name");
      if (field.text == "u") {
        e.use = parse_atom_set();
      } else if (field.text == "k") {
        e.kill = parse_atom_set();
      } else {
        throw ParseError(field.line, field.col,
                         "expected effect component 'u' or 'k', found '" +
                             field.text + "'");
      }
      if (at(Tok::Comma)) {
        advance();
        continue;
      }
      expect_more = false;
    }
    expect(Tok::Gt, "to close the effect");
    return e;
  }
};

}  // namespace

SourceProgram parse(const std::string& text, const std::string& path) {
  Parser p(lex(text));
  return SourceProgram{path, text, p.parse_program()};
}

QualifiedType parse_qualified_type(const std::string& text) {
  Parser p(lex(text));
  return p.parse_type_entry();
}

}  // namespace rtfx
