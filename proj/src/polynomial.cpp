#include "qhyper/polynomial.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>

namespace qhyper {

FockWord adjoint(const FockWord& w) {
  FockWord out(w.rbegin(), w.rend());
  for (FockLetter& l : out) l.starred = !l.starred;
  return out;
}

std::string to_string(const FockWord& w) {
  std::string out;
  for (const FockLetter& l : w) {
    if (!out.empty()) out += ' ';
    out += 'g' + std::to_string(l.index);
    if (l.starred) out += '*';
  }
  return out;
}

int max_index(const FockWord& w) {
  int m = 0;
  for (const FockLetter& l : w) m = std::max(m, l.index);
  return m;
}

LinearForm LinearForm::adjoint() const {
  LinearForm out;
  for (const auto& [c, l] : terms) out.terms.emplace_back(std::conj(c), FockLetter{l.index, !l.starred});
  return out;
}

Polynomial Polynomial::letter(FockLetter l) {
  Polynomial p;
  p.terms_.push_back({Complex(1.0), {LinearForm{{{Complex(1.0), l}}}}});
  return p;
}

Polynomial Polynomial::scalar(Complex c) {
  Polynomial p;
  p.terms_.push_back({c, {}});
  return p;
}

Polynomial Polynomial::word(const FockWord& w) {
  Polynomial p;
  Term t;
  for (const FockLetter& l : w) t.factors.push_back(LinearForm{{{Complex(1.0), l}}});
  p.terms_.push_back(std::move(t));
  return p;
}

Polynomial Polynomial::form(const LinearForm& f) {
  Polynomial p;
  p.terms_.push_back({Complex(1.0), {f}});
  return p;
}

Polynomial Polynomial::adjoint() const {
  Polynomial out;
  for (const Term& t : terms_) {
    Term a;
    a.coef = std::conj(t.coef);
    for (auto it = t.factors.rbegin(); it != t.factors.rend(); ++it) a.factors.push_back(it->adjoint());
    out.terms_.push_back(std::move(a));
  }
  return out;
}

std::vector<std::pair<Complex, FockWord>> Polynomial::words() const {
  std::vector<std::pair<Complex, FockWord>> out;
  for (const Term& t : terms_) {
    std::vector<std::pair<Complex, FockWord>> partial{{t.coef, {}}};
    for (const LinearForm& f : t.factors) {
      std::vector<std::pair<Complex, FockWord>> next;
      for (const auto& [c, w] : partial)
        for (const auto& [fc, l] : f.terms) {
          FockWord extended = w;
          extended.push_back(l);
          next.emplace_back(c * fc, std::move(extended));
        }
      partial = std::move(next);
    }
    out.insert(out.end(), partial.begin(), partial.end());
  }
  return out;
}

std::size_t Polynomial::degree() const {
  std::size_t d = 0;
  for (const Term& t : terms_) d = std::max(d, t.factors.size());
  return d;
}

int Polynomial::max_index() const {
  int m = 0;
  for (const Term& t : terms_)
    for (const LinearForm& f : t.factors)
      for (const auto& entry : f.terms) m = std::max(m, entry.second.index);
  return m;
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
  return *this;
}

Polynomial& Polynomial::operator*=(Complex c) {
  for (Term& t : terms_) t.coef *= c;
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  Polynomial out;
  for (const Term& x : a.terms_)
    for (const Term& y : b.terms_) {
      Term t{x.coef * y.coef, x.factors};
      t.factors.insert(t.factors.end(), y.factors.begin(), y.factors.end());
      out.terms_.push_back(std::move(t));
    }
  return out;
}

Polynomial Polynomial::power(int k) const {
  require(k >= 0, "negative powers are not supported");
  Polynomial out = scalar(1.0);
  for (int i = 0; i < k; ++i) out = out * *this;
  return out;
}

namespace {

class Parser {
 public:
  explicit Parser(const std::string& text) : text_(text) {}

  Polynomial parse() {
    Polynomial p = expr();
    skip();
    if (pos_ != text_.size()) fail("unexpected character");
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw InvalidArgument("cannot parse polynomial '" + text_ + "' at position " + std::to_string(pos_) + ": " + what);
  }

  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool peek(char c) {
    skip();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  bool starts_number() {
    skip();
    return pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.');
  }

  bool starts_factor() {
    skip();
    if (pos_ >= text_.size()) return false;
    const char c = text_[pos_];
    return c == '(' || c == 'g' || c == 's' || c == 'x';
  }

  Polynomial expr() {
    double sign = 1.0;
    if (peek('-')) {
      sign = -1.0;
      ++pos_;
    } else if (peek('+')) {
      ++pos_;
    }
    Polynomial result = term();
    result *= sign;
    while (peek('+') || peek('-')) {
      const double s = text_[pos_] == '-' ? -1.0 : 1.0;
      ++pos_;
      Polynomial next = term();
      next *= s;
      result += next;
    }
    return result;
  }

  Polynomial term() {
    Polynomial result = Polynomial::scalar(1.0);
    bool any = false;
    if (starts_number()) {
      result = Polynomial::scalar(number());
      any = true;
    }
    while (starts_factor()) {
      result = result * factor();
      any = true;
    }
    if (!any) fail("expected a number, variable or '('");
    return result;
  }

  double number() {
    // Plain decimals only; strtod would also accept hex such as "0x1".
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) ++pos_;
    const std::string digits = text_.substr(start, pos_ - start);
    char* end = nullptr;
    const double value = std::strtod(digits.c_str(), &end);
    if (digits.empty() || end != digits.c_str() + digits.size()) fail("malformed number");
    return value;
  }

  Polynomial factor() {
    Polynomial base = primary();
    if (peek('*')) {
      ++pos_;
      base = base.adjoint();
    }
    if (peek('^')) {
      ++pos_;
      skip();
      const std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (pos_ == start) fail("expected an integer exponent");
      const int k = std::stoi(text_.substr(start, pos_ - start));
      if (k > 16) fail("exponent too large");
      base = base.power(k);
    }
    return base;
  }

  Polynomial primary() {
    skip();
    if (peek('(')) {
      ++pos_;
      Polynomial inner = expr();
      if (!peek(')')) fail("expected ')'");
      ++pos_;
      return merge_linear(inner);
    }
    ++pos_;  // variable name, checked by starts_factor
    int index = 1;
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ > start) index = std::stoi(text_.substr(start, pos_ - start));
    if (index < 1) fail("variable index must be >= 1");
    return Polynomial::letter({index, false});
  }

  // A group whose terms are all single letters collapses to one linear form.
  static Polynomial merge_linear(const Polynomial& p) {
    LinearForm merged;
    for (const Term& t : p.terms()) {
      if (t.factors.size() != 1) return p;
      for (const auto& [c, l] : t.factors.front().terms) merged.terms.emplace_back(t.coef * c, l);
    }
    return Polynomial::form(merged);
  }

  const std::string& text_;
  std::size_t pos_ = 0;
};

}  // namespace

Polynomial parse_polynomial(const std::string& text) { return Parser(text).parse(); }

}  // namespace qhyper
