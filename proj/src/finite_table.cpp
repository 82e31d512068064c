#include "elts/finite_table.hpp"

#include "elts/errors.hpp"

#include <algorithm>
#include <set>

namespace elts {

namespace {
[[noreturn]] void axiom_violation(const std::string& axiom, const std::string& detail) {
  throw ValidationError("finite table rejected: " + axiom + " (" + detail + ")",
                        {{axiom, detail}});
}
}  // namespace

FiniteTable::FiniteTable(std::vector<std::string> carrier, std::string zero, std::string one,
                         std::map<std::pair<std::string, std::string>, std::string> sum,
                         std::map<std::string, std::string> complement)
    : carrier_(std::move(carrier)),
      zero_(std::move(zero)),
      one_(std::move(one)),
      sum_(std::move(sum)),
      complement_(std::move(complement)) {
  if (carrier_.empty()) axiom_violation("carrier", "empty carrier");
  std::set<std::string> seen(carrier_.begin(), carrier_.end());
  if (seen.size() != carrier_.size()) axiom_violation("carrier", "duplicate element names");
  if (!seen.count(zero_)) axiom_violation("zero", "zero element not in carrier");
  if (!seen.count(one_)) axiom_violation("one", "one element not in carrier");

  for (const auto& [pair, result] : sum_) {
    if (!seen.count(pair.first) || !seen.count(pair.second) || !seen.count(result))
      axiom_violation("sum", "entry mentions an element outside the carrier: " + pair.first +
                                 "+" + pair.second + "=" + result);
  }
  // Fill zero-sums and commutative mirrors.
  for (const auto& e : carrier_) {
    sum_.insert({{zero_, e}, e});
    sum_.insert({{e, zero_}, e});
  }
  auto snapshot = sum_;
  for (const auto& [pair, result] : snapshot) {
    auto mirrored = sum_.insert({{pair.second, pair.first}, result});
    if (!mirrored.second && mirrored.first->second != result)
      axiom_violation("commutativity", pair.first + "+" + pair.second + " = " + result +
                                           " but " + pair.second + "+" + pair.first + " = " +
                                           mirrored.first->second);
  }
  for (const auto& [elem, comp] : complement_) {
    if (!seen.count(elem) || !seen.count(comp))
      axiom_violation("complement", "entry mentions an element outside the carrier");
  }
  verify();
}

bool FiniteTable::has(const std::string& name) const {
  return std::find(carrier_.begin(), carrier_.end(), name) != carrier_.end();
}

std::optional<std::string> FiniteTable::sum(const std::string& a, const std::string& b) const {
  auto it = sum_.find({a, b});
  if (it == sum_.end()) return std::nullopt;
  return it->second;
}

const std::string& FiniteTable::complement(const std::string& a) const {
  auto it = complement_.find(a);
  if (it == complement_.end()) throw Error("element '" + a + "' has no complement entry");
  return it->second;
}

void FiniteTable::verify() const {
  // Zero law: 0 + a = a (guaranteed by the fill above unless an explicit
  // entry contradicts it).
  for (const auto& a : carrier_) {
    auto s = sum(zero_, a);
    if (!s || *s != a) axiom_violation("zero", "0+" + a + " != " + a);
  }

  // e orthogonal to 1 implies e = 0; checked early so tables built around a
  // bad 1-row are reported as such.
  for (const auto& e : carrier_) {
    if (sum(e, one_) && e != zero_)
      axiom_violation("zero-one", e + "+1 is defined but " + e + " != 0");
  }

  // Associativity, both directions of the PCM axiom.
  for (const auto& a : carrier_)
    for (const auto& b : carrier_)
      for (const auto& c : carrier_) {
        auto bc = sum(b, c);
        if (bc) {
          auto a_bc = sum(a, *bc);
          if (a_bc) {
            auto ab = sum(a, b);
            if (!ab) axiom_violation("associativity",
                                     a + "+(" + b + "+" + c + ") defined but " + a + "+" + b +
                                         " undefined");
            auto ab_c = sum(*ab, c);
            if (!ab_c || *ab_c != *a_bc)
              axiom_violation("associativity", "(" + a + "+" + b + ")+" + c + " != " + a + "+(" +
                                                   b + "+" + c + ")");
          }
        }
      }

  // Orthocomplement: a' is the unique element with a + a' = 1.
  for (const auto& a : carrier_) {
    auto it = complement_.find(a);
    if (it == complement_.end())
      axiom_violation("orthocomplement", "no complement entry for '" + a + "'");
    auto s = sum(a, it->second);
    if (!s || *s != one_)
      axiom_violation("orthocomplement", a + "+" + it->second + " != 1");
    for (const auto& x : carrier_) {
      if (x == it->second) continue;
      auto sx = sum(a, x);
      if (sx && *sx == one_)
        axiom_violation("orthocomplement",
                        "complement of '" + a + "' not unique: both '" + it->second + "' and '" +
                            x + "' reach 1");
    }
  }
  if (complement_.at(zero_) != one_) axiom_violation("orthocomplement", "0' != 1");
}

}  // namespace elts
