#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace rfw {

using Letter = int;
using Word = std::vector<Letter>;

/// Named finite alphabet; letters are indices into `names`.
class Alphabet {
public:
  Alphabet() = default;
  explicit Alphabet(const std::vector<std::string>& names);

  Letter intern(const std::string& name);
  Letter find(const std::string& name) const;  // throws if unknown
  bool contains(const std::string& name) const;
  const std::string& name(Letter a) const { return names_.at(static_cast<std::size_t>(a)); }
  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  bool single_char() const;

  std::string render(const Word& w) const;
  Word parse(const std::string& s) const;

private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, Letter> index_;
};

/// Ultimately periodic word prefix·period^ω, kept in canonical form.
struct UPWord {
  Word prefix;
  Word period;

  bool operator==(const UPWord& o) const { return prefix == o.prefix && period == o.period; }
  bool operator!=(const UPWord& o) const { return !(*this == o); }
};

struct InfiniteLcp : std::logic_error {
  InfiniteLcp() : std::logic_error("lcp of equal infinite words is infinite") {}
};

struct NotPrefix : std::invalid_argument {
  NotPrefix() : std::invalid_argument("argument is not a prefix") {}
};

Word primitive_root(const Word& v);
UPWord canonicalize(Word prefix, Word period);
bool up_equal(const UPWord& x, const UPWord& y);

Letter at(const UPWord& x, std::size_t i);  // 0-based
Word take(const UPWord& x, std::size_t n);

/// u[i:j] with 1-based inclusive bounds; empty when j < i, truncated at |u|.
Word slice(const Word& u, long i, long j);
Word drop(const Word& u, std::size_t n);
Word concat(const Word& u, const Word& v);
Word power(const Word& u, std::size_t n);
UPWord concat(const Word& u, const UPWord& x);

bool is_prefix(const Word& p, const Word& x);
bool is_prefix(const Word& p, const UPWord& x);

Word lcp(const Word& x, const Word& y);
Word lcp(const UPWord& x, const Word& y);
Word lcp(const Word& x, const UPWord& y);
Word lcp(const UPWord& x, const UPWord& y);
Word lcp(const std::vector<Word>& ws);

Word strip_prefix(const Word& x, const Word& p);
UPWord strip_prefix(const UPWord& x, const Word& p);

std::string render(const Alphabet& al, const UPWord& x);
UPWord parse_up(const Alphabet& al, const std::string& s);

}  // namespace rfw
