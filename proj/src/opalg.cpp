#include "embedsplit/opalg.hpp"

#include <algorithm>
#include <cmath>

#include "embedsplit/error.hpp"

namespace embedsplit {

std::string_view to_string(Family f) {
  switch (f) {
    case Family::SS: return "SS";
    case Family::MethodAdjoint: return "MethodAdjoint";
    case Family::Splitting: return "Splitting";
  }
  return "?";
}

std::string_view to_string(Role r) {
  switch (r) {
    case Role::S2: return "S2";
    case Role::BasicChi: return "BasicChi";
    case Role::AdjointChi: return "AdjointChi";
    case Role::FlowA: return "FlowA";
    case Role::FlowB: return "FlowB";
  }
  return "?";
}

Family family_from_string(std::string_view s) {
  if (s == "SS") return Family::SS;
  if (s == "MethodAdjoint") return Family::MethodAdjoint;
  if (s == "Splitting") return Family::Splitting;
  throw Error("unknown family '" + std::string(s) + "'");
}

Role role_from_string(std::string_view s) {
  if (s == "S2") return Role::S2;
  if (s == "BasicChi") return Role::BasicChi;
  if (s == "AdjointChi") return Role::AdjointChi;
  if (s == "FlowA") return Role::FlowA;
  if (s == "FlowB") return Role::FlowB;
  throw Error("unknown stage role '" + std::string(s) + "'");
}

int symbol_grade(Symbol s) {
  if (s == sym::A || s == sym::B) return 1;
  if (s < sym::A) return s + 1;
  throw Error("invalid symbol id " + std::to_string(s));
}

std::string symbol_name(Symbol s) {
  if (s == sym::F) return "F";
  if (s == sym::A) return "A";
  if (s == sym::B) return "B";
  return "Y" + std::to_string(symbol_grade(s));
}

GeneratorSet GeneratorSet::make(Family family, int max_grade) {
  if (max_grade < 0 || max_grade > kMaxGrade)
    throw Error("truncation grade " + std::to_string(max_grade) +
                " outside [0, " + std::to_string(kMaxGrade) + "]");
  std::vector<Generator> entries;
  switch (family) {
    case Family::SS:
      if (max_grade >= 1) entries.push_back({sym::F, 1});
      for (int g = 3; g <= max_grade; g += 2) entries.push_back({sym::Y(g), g});
      break;
    case Family::MethodAdjoint:
      if (max_grade >= 1) entries.push_back({sym::F, 1});
      for (int g = 2; g <= max_grade; ++g) entries.push_back({sym::Y(g), g});
      break;
    case Family::Splitting:
      if (max_grade >= 1) {
        entries.push_back({sym::A, 1});
        entries.push_back({sym::B, 1});
      }
      break;
  }
  return GeneratorSet(family, max_grade, std::move(entries));
}

Word::Word(std::vector<Symbol> symbols) : symbols_(std::move(symbols)) {
  for (Symbol s : symbols_) grade_ += symbol_grade(s);
}

Word Word::concat(const Word& rhs) const {
  Word out;
  out.symbols_.reserve(symbols_.size() + rhs.symbols_.size());
  out.symbols_ = symbols_;
  out.symbols_.insert(out.symbols_.end(), rhs.symbols_.begin(), rhs.symbols_.end());
  out.grade_ = grade_ + rhs.grade_;
  return out;
}

std::string Word::str() const {
  if (symbols_.empty()) return "I";
  std::string out;
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    if (i) out += '.';
    out += symbol_name(symbols_[i]);
  }
  return out;
}

std::strong_ordering Word::operator<=>(const Word& rhs) const {
  if (auto c = grade_ <=> rhs.grade_; c != 0) return c;
  return std::lexicographical_compare_three_way(symbols_.begin(), symbols_.end(),
                                                rhs.symbols_.begin(), rhs.symbols_.end());
}

std::vector<Word> enumerate_words(const GeneratorSet& gens, int max_grade) {
  if (max_grade > gens.max_grade())
    throw Error("generator set built for grade " + std::to_string(gens.max_grade()) +
                ", words requested up to " + std::to_string(max_grade));
  std::vector<Word> out;
  std::vector<Symbol> buf;
  auto rec = [&](auto&& self, int grade) -> void {
    out.emplace_back(buf);
    for (const Generator& g : gens.entries()) {
      if (grade + g.grade > max_grade) continue;
      buf.push_back(g.id);
      self(self, grade + g.grade);
      buf.pop_back();
    }
  };
  rec(rec, 0);
  std::sort(out.begin(), out.end());
  return out;
}

TruncatedSeries::TruncatedSeries(int order) : order_(order) {
  if (order < 0 || order > kMaxGrade)
    throw Error("truncation order " + std::to_string(order) + " outside [0, " +
                std::to_string(kMaxGrade) + "]");
}

TruncatedSeries TruncatedSeries::identity(int order) {
  TruncatedSeries s(order);
  s.add_term(Word{}, 1.0);
  return s;
}

TruncatedSeries TruncatedSeries::monomial(const Word& w, double coeff, int order) {
  TruncatedSeries s(order);
  s.add_term(w, coeff);
  return s;
}

double TruncatedSeries::coeff(const Word& w) const {
  auto it = terms_.find(w);
  return it == terms_.end() ? 0.0 : it->second;
}

void TruncatedSeries::add_term(const Word& w, double c) {
  if (w.grade() > order_ || c == 0.0) return;
  auto [it, inserted] = terms_.try_emplace(w, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0.0) terms_.erase(it);
  }
}

double TruncatedSeries::max_abs_at_grade(int grade) const {
  double m = 0.0;
  for (const auto& [w, c] : terms_)
    if (w.grade() == grade) m = std::max(m, std::abs(c));
  return m;
}

namespace {

void require_same_order(const TruncatedSeries& a, const TruncatedSeries& b) {
  if (a.order() != b.order())
    throw Error("truncation orders differ: " + std::to_string(a.order()) + " vs " +
                std::to_string(b.order()));
}

}  // namespace

TruncatedSeries& TruncatedSeries::operator+=(const TruncatedSeries& rhs) {
  require_same_order(*this, rhs);
  for (const auto& [w, c] : rhs.terms_) add_term(w, c);
  return *this;
}

TruncatedSeries& TruncatedSeries::operator-=(const TruncatedSeries& rhs) {
  require_same_order(*this, rhs);
  for (const auto& [w, c] : rhs.terms_) add_term(w, -c);
  return *this;
}

TruncatedSeries& TruncatedSeries::operator*=(double s) {
  if (s == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto& [w, c] : terms_) c *= s;
  return *this;
}

TruncatedSeries series_add(const TruncatedSeries& a, const TruncatedSeries& b) {
  TruncatedSeries out = a;
  out += b;
  return out;
}

TruncatedSeries series_mul(const TruncatedSeries& a, const TruncatedSeries& b) {
  require_same_order(a, b);
  const int n = a.order();
  TruncatedSeries out(n);
  for (const auto& [wa, ca] : a.terms()) {
    // terms are grade-ordered, so the inner loop can stop at the first overflow
    for (const auto& [wb, cb] : b.terms()) {
      if (wa.grade() + wb.grade() > n) break;
      out.add_term(wa.concat(wb), ca * cb);
    }
  }
  return out;
}

TruncatedSeries series_exp(const TruncatedSeries& x) {
  if (x.constant_term() != 0.0)
    throw Error("series_exp requires a zero constant term");
  const int n = x.order();
  TruncatedSeries result = TruncatedSeries::identity(n);
  TruncatedSeries power = TruncatedSeries::identity(n);
  for (int k = 1; k <= n; ++k) {
    power = series_mul(power, x);
    power *= 1.0 / k;
    if (power.terms().empty()) break;
    result += power;
  }
  return result;
}

TruncatedSeries operator+(const TruncatedSeries& a, const TruncatedSeries& b) {
  return series_add(a, b);
}

TruncatedSeries operator-(const TruncatedSeries& a, const TruncatedSeries& b) {
  TruncatedSeries out = a;
  out -= b;
  return out;
}

TruncatedSeries operator*(const TruncatedSeries& a, const TruncatedSeries& b) {
  return series_mul(a, b);
}

TruncatedSeries operator*(double s, const TruncatedSeries& a) {
  TruncatedSeries out = a;
  out *= s;
  return out;
}

bool role_allowed(Family family, Role role) {
  switch (family) {
    case Family::SS: return role == Role::S2;
    case Family::MethodAdjoint: return role == Role::BasicChi || role == Role::AdjointChi;
    case Family::Splitting: return role == Role::FlowA || role == Role::FlowB;
  }
  return false;
}

TruncatedSeries stage_series(Family family, Role role, double coeff, int order) {
  if (!role_allowed(family, role))
    throw Error("stage role " + std::string(to_string(role)) + " is not part of the " +
                std::string(to_string(family)) + " family");
  TruncatedSeries out(order);
  if (order < 1) return out;
  switch (role) {
    case Role::FlowA:
      out.add_term(Word({sym::A}), coeff);
      return out;
    case Role::FlowB:
      out.add_term(Word({sym::B}), coeff);
      return out;
    default:
      break;
  }
  out.add_term(Word({sym::F}), coeff);
  double power = coeff;
  for (int g = 2; g <= order; ++g) {
    power *= coeff;
    switch (role) {
      case Role::S2:
        if (g % 2 == 1) out.add_term(Word({sym::Y(g)}), power);
        break;
      case Role::BasicChi:
        out.add_term(Word({sym::Y(g)}), power);
        break;
      case Role::AdjointChi:
        out.add_term(Word({sym::Y(g)}), g % 2 == 0 ? -power : power);
        break;
      default:
        break;
    }
  }
  return out;
}

TruncatedSeries exact_flow_series(Family family, int order) {
  TruncatedSeries gen(order);
  if (order >= 1) {
    if (family == Family::Splitting) {
      gen.add_term(Word({sym::A}), 1.0);
      gen.add_term(Word({sym::B}), 1.0);
    } else {
      gen.add_term(Word({sym::F}), 1.0);
    }
  }
  return series_exp(gen);
}

}  // namespace embedsplit
