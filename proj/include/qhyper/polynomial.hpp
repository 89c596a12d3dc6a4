#pragma once

#include <string>
#include <utility>
#include <vector>

#include "qhyper/common.hpp"

namespace qhyper {

/// g_i (starred = false) or g_i^* (starred = true), i >= 1.
struct FockLetter {
  int index = 1;
  bool starred = false;

  bool operator==(const FockLetter&) const = default;
};

using FockWord = std::vector<FockLetter>;

/// Reversed word with every star toggled.
FockWord adjoint(const FockWord& w);
/// "g1* g2 g1" style rendering.
std::string to_string(const FockWord& w);
int max_index(const FockWord& w);

/// sum_k coef_k * letter_k.
struct LinearForm {
  std::vector<std::pair<Complex, FockLetter>> terms;

  LinearForm adjoint() const;
};

/// coef * L_1 L_2 ... L_r
struct Term {
  Complex coef{1.0, 0.0};
  std::vector<LinearForm> factors;
};

/// Noncommutative polynomial kept as a sum of products of linear forms, so
/// (g + g*)^4 costs four operator applications instead of sixteen words.
class Polynomial {
 public:
  Polynomial() = default;
  static Polynomial letter(FockLetter l);
  static Polynomial scalar(Complex c);
  static Polynomial word(const FockWord& w);
  static Polynomial form(const LinearForm& f);

  const std::vector<Term>& terms() const { return terms_; }
  Polynomial adjoint() const;
  /// Expands into (coefficient, word) pairs; equal words are not merged.
  std::vector<std::pair<Complex, FockWord>> words() const;
  std::size_t degree() const;
  int max_index() const;

  Polynomial& operator+=(const Polynomial& other);
  Polynomial& operator*=(Complex c);
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  Polynomial power(int k) const;

 private:
  std::vector<Term> terms_;
};

/// Grammar (whitespace ignored):
///   expr   := term (('+' | '-') term)*
///   term   := [number] factor*           juxtaposition is the product
///   factor := primary ['*'] ['^' int]     '*' right after a factor is the adjoint
///   primary:= var | '(' expr ')'
///   var    := ('g' | 's' | 'x') [digits]   index defaults to 1
/// Throws InvalidArgument with the offending position on malformed input.
Polynomial parse_polynomial(const std::string& text);

}  // namespace qhyper
