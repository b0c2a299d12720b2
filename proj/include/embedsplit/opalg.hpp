#pragma once

// Truncated power series in noncommuting graded generators.
//
// A stage of a composition or splitting scheme acts on functions through an
// operator exp(Y), where Y is a series in generators carrying a power-of-h
// grade. Products of such exponentials, truncated at a total grade N, are all
// that is needed to write down order conditions and estimator conditions; no
// Lie-bracket normal forms are used. Words are kept as flat symbol sequences.

#include <compare>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace embedsplit {

/// Largest truncation grade the algebra supports.
inline constexpr int kMaxGrade = 9;

enum class Family { SS, MethodAdjoint, Splitting };

/// What a single stage of a scheme is: a symmetric second-order map (S2), a
/// first-order basic method or its adjoint, or one of the two exact subflows.
enum class Role { S2, BasicChi, AdjointChi, FlowA, FlowB };

std::string_view to_string(Family f);
std::string_view to_string(Role r);
Family family_from_string(std::string_view s);
Role role_from_string(std::string_view s);

/// Symbol ids are global so a word prints the same whatever family built it:
/// F = 0, Y_g = g - 1 for g = 2..kMaxGrade, then A and B.
using Symbol = std::uint8_t;

namespace sym {
inline constexpr Symbol F = 0;
inline constexpr Symbol A = kMaxGrade;
inline constexpr Symbol B = kMaxGrade + 1;
constexpr Symbol Y(int grade) { return static_cast<Symbol>(grade - 1); }
}  // namespace sym

int symbol_grade(Symbol s);
std::string symbol_name(Symbol s);

struct Generator {
  Symbol id;
  int grade;
};

/// The generators a family's stage exponents are written in, up to a grade.
class GeneratorSet {
 public:
  static GeneratorSet make(Family family, int max_grade);

  Family family() const { return family_; }
  int max_grade() const { return max_grade_; }
  std::span<const Generator> entries() const { return entries_; }

 private:
  GeneratorSet(Family family, int max_grade, std::vector<Generator> entries)
      : family_(family), max_grade_(max_grade), entries_(std::move(entries)) {}

  Family family_;
  int max_grade_;
  std::vector<Generator> entries_;
};

class Word {
 public:
  Word() = default;
  explicit Word(std::vector<Symbol> symbols);

  std::span<const Symbol> symbols() const { return symbols_; }
  int grade() const { return grade_; }
  bool empty() const { return symbols_.empty(); }
  std::size_t size() const { return symbols_.size(); }

  Word concat(const Word& rhs) const;
  std::string str() const;

  // Ordered by grade first, then lexicographically by symbol id.
  std::strong_ordering operator<=>(const Word& rhs) const;
  bool operator==(const Word& rhs) const = default;

 private:
  std::vector<Symbol> symbols_;
  int grade_ = 0;
};

/// All words of grade <= max_grade over the set, including the empty word,
/// in (grade, lexicographic) order.
std::vector<Word> enumerate_words(const GeneratorSet& gens, int max_grade);

class TruncatedSeries {
 public:
  using Terms = std::map<Word, double>;

  explicit TruncatedSeries(int order);

  static TruncatedSeries identity(int order);
  static TruncatedSeries monomial(const Word& w, double coeff, int order);

  int order() const { return order_; }
  const Terms& terms() const { return terms_; }
  double coeff(const Word& w) const;
  double constant_term() const { return coeff(Word{}); }

  /// Adds `c` to the coefficient of `w`; words above the order are ignored.
  void add_term(const Word& w, double c);

  /// Largest |coefficient| among words of exactly the given grade.
  double max_abs_at_grade(int grade) const;

  TruncatedSeries& operator+=(const TruncatedSeries& rhs);
  TruncatedSeries& operator-=(const TruncatedSeries& rhs);
  TruncatedSeries& operator*=(double s);

 private:
  int order_;
  Terms terms_;
};

TruncatedSeries series_add(const TruncatedSeries& a, const TruncatedSeries& b);
TruncatedSeries series_mul(const TruncatedSeries& a, const TruncatedSeries& b);
TruncatedSeries series_exp(const TruncatedSeries& x);

TruncatedSeries operator+(const TruncatedSeries& a, const TruncatedSeries& b);
TruncatedSeries operator-(const TruncatedSeries& a, const TruncatedSeries& b);
TruncatedSeries operator*(const TruncatedSeries& a, const TruncatedSeries& b);
TruncatedSeries operator*(double s, const TruncatedSeries& a);

/// Exponent of the operator of one stage with the given step coefficient:
///   S2:          c F + c^3 Y3 + c^5 Y5 + ...
///   BasicChi:    c F + c^2 Y2 + c^3 Y3 + ...
///   AdjointChi:  c F - c^2 Y2 + c^3 Y3 - ...
///   FlowA/FlowB: c A / c B
TruncatedSeries stage_series(Family family, Role role, double coeff, int order);

/// exp(F) for the composition families, exp(A + B) for splitting.
TruncatedSeries exact_flow_series(Family family, int order);

bool role_allowed(Family family, Role role);

}  // namespace embedsplit
