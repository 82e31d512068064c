#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace elts {

/**
 * A finite effect algebra given by tables. The constructor verifies every
 * axiom exhaustively and rejects the table with a named violation otherwise:
 * commutativity, associativity, the zero law, existence and uniqueness of the
 * orthocomplement, and e orthogonal to 1 implies e = 0.
 *
 * Zero-sums (0 + a = a) and commutative mirror entries may be omitted from
 * the input; they are filled in before checking. Conflicting mirror entries
 * are a commutativity violation.
 */
class FiniteTable {
 public:
  FiniteTable(std::vector<std::string> carrier, std::string zero, std::string one,
              std::map<std::pair<std::string, std::string>, std::string> sum,
              std::map<std::string, std::string> complement);

  const std::vector<std::string>& carrier() const { return carrier_; }
  const std::string& zero() const { return zero_; }
  const std::string& one() const { return one_; }

  bool has(const std::string& name) const;
  std::optional<std::string> sum(const std::string& a, const std::string& b) const;
  const std::string& complement(const std::string& a) const;

  // Raw table access for serialization.
  const std::map<std::pair<std::string, std::string>, std::string>& sums() const { return sum_; }
  const std::map<std::string, std::string>& complements() const { return complement_; }

  friend bool operator==(const FiniteTable& a, const FiniteTable& b) {
    return a.carrier_ == b.carrier_ && a.zero_ == b.zero_ && a.one_ == b.one_ &&
           a.sum_ == b.sum_ && a.complement_ == b.complement_;
  }

 private:
  void verify() const;

  std::vector<std::string> carrier_;
  std::string zero_, one_;
  std::map<std::pair<std::string, std::string>, std::string> sum_;
  std::map<std::string, std::string> complement_;
};

}  // namespace elts
