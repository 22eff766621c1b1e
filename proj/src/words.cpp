#include "rfw/words.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <sstream>

namespace rfw {

Alphabet::Alphabet(const std::vector<std::string>& names) {
  for (const auto& n : names) intern(n);
}

Letter Alphabet::intern(const std::string& name) {
  auto it = index_.find(name);
  if (it != index_.end()) return it->second;
  if (name.empty() || name.find_first_of(" \t\n()$\"") != std::string::npos)
    throw std::invalid_argument("invalid letter name '" + name + "'");
  Letter id = static_cast<Letter>(names_.size());
  names_.push_back(name);
  index_.emplace(name, id);
  return id;
}

Letter Alphabet::find(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw std::invalid_argument("unknown letter '" + name + "'");
  return it->second;
}

bool Alphabet::contains(const std::string& name) const { return index_.count(name) > 0; }

bool Alphabet::single_char() const {
  return std::all_of(names_.begin(), names_.end(), [](const std::string& n) { return n.size() == 1; });
}

std::string Alphabet::render(const Word& w) const {
  std::string s;
  bool sep = !single_char();
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (sep && i > 0) s += ' ';
    s += name(w[i]);
  }
  return s;
}

Word Alphabet::parse(const std::string& s) const {
  Word w;
  if (single_char() && s.find_first_of(" \t") == std::string::npos) {
    for (char c : s) w.push_back(find(std::string(1, c)));
    return w;
  }
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) {
    if (contains(tok)) {
      w.push_back(find(tok));
    } else if (single_char()) {
      for (char c : tok) w.push_back(find(std::string(1, c)));
    } else {
      w.push_back(find(tok));
    }
  }
  return w;
}

Word primitive_root(const Word& v) {
  std::size_t n = v.size();
  for (std::size_t p = 1; p <= n; ++p) {
    if (n % p != 0) continue;
    bool ok = true;
    for (std::size_t i = p; i < n && ok; ++i) ok = v[i] == v[i - p];
    if (ok) return Word(v.begin(), v.begin() + static_cast<long>(p));
  }
  return v;
}

UPWord canonicalize(Word prefix, Word period) {
  if (period.empty()) throw std::invalid_argument("empty period");
  period = primitive_root(period);
  while (!prefix.empty() && prefix.back() == period.back()) {
    std::rotate(period.begin(), period.end() - 1, period.end());
    prefix.pop_back();
  }
  return UPWord{std::move(prefix), std::move(period)};
}

Letter at(const UPWord& x, std::size_t i) {
  if (i < x.prefix.size()) return x.prefix[i];
  return x.period[(i - x.prefix.size()) % x.period.size()];
}

Word take(const UPWord& x, std::size_t n) {
  Word w;
  w.reserve(n);
  for (std::size_t i = 0; i < n; ++i) w.push_back(at(x, i));
  return w;
}

bool up_equal(const UPWord& x, const UPWord& y) {
  std::size_t bound = x.prefix.size() + y.prefix.size() + std::lcm(x.period.size(), y.period.size());
  for (std::size_t i = 0; i < bound; ++i)
    if (at(x, i) != at(y, i)) return false;
  return true;
}

Word slice(const Word& u, long i, long j) {
  if (i < 1) i = 1;
  if (j > static_cast<long>(u.size())) j = static_cast<long>(u.size());
  if (j < i) return {};
  return Word(u.begin() + (i - 1), u.begin() + j);
}

Word drop(const Word& u, std::size_t n) {
  if (n >= u.size()) return {};
  return Word(u.begin() + static_cast<long>(n), u.end());
}

Word concat(const Word& u, const Word& v) {
  Word w = u;
  w.insert(w.end(), v.begin(), v.end());
  return w;
}

Word power(const Word& u, std::size_t n) {
  Word w;
  w.reserve(u.size() * n);
  for (std::size_t i = 0; i < n; ++i) w.insert(w.end(), u.begin(), u.end());
  return w;
}

UPWord concat(const Word& u, const UPWord& x) { return canonicalize(concat(u, x.prefix), x.period); }

bool is_prefix(const Word& p, const Word& x) {
  return p.size() <= x.size() && std::equal(p.begin(), p.end(), x.begin());
}

bool is_prefix(const Word& p, const UPWord& x) {
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] != at(x, i)) return false;
  return true;
}

Word lcp(const Word& x, const Word& y) {
  std::size_t n = 0;
  while (n < x.size() && n < y.size() && x[n] == y[n]) ++n;
  return Word(x.begin(), x.begin() + static_cast<long>(n));
}

Word lcp(const UPWord& x, const Word& y) {
  std::size_t n = 0;
  while (n < y.size() && at(x, n) == y[n]) ++n;
  return Word(y.begin(), y.begin() + static_cast<long>(n));
}

Word lcp(const Word& x, const UPWord& y) { return lcp(y, x); }

Word lcp(const UPWord& x, const UPWord& y) {
  std::size_t bound = x.prefix.size() + y.prefix.size() + std::lcm(x.period.size(), y.period.size());
  Word w;
  for (std::size_t i = 0; i < bound; ++i) {
    if (at(x, i) != at(y, i)) return w;
    w.push_back(at(x, i));
  }
  throw InfiniteLcp();
}

Word lcp(const std::vector<Word>& ws) {
  if (ws.empty()) return {};
  Word c = ws.front();
  for (const auto& w : ws) c = lcp(c, w);
  return c;
}

Word strip_prefix(const Word& x, const Word& p) {
  if (!is_prefix(p, x)) throw NotPrefix();
  return drop(x, p.size());
}

UPWord strip_prefix(const UPWord& x, const Word& p) {
  if (!is_prefix(p, x)) throw NotPrefix();
  std::size_t n = p.size();
  if (n <= x.prefix.size()) return canonicalize(drop(x.prefix, n), x.period);
  std::size_t k = (n - x.prefix.size()) % x.period.size();
  Word per = x.period;
  std::rotate(per.begin(), per.begin() + static_cast<long>(k), per.end());
  return canonicalize({}, per);
}

std::string render(const Alphabet& al, const UPWord& x) {
  return al.render(x.prefix) + "(" + al.render(x.period) + ")^w";
}

UPWord parse_up(const Alphabet& al, const std::string& text) {
  std::string s = text;
  auto trim = [](std::string& t) {
    while (!t.empty() && std::isspace(static_cast<unsigned char>(t.back()))) t.pop_back();
    std::size_t k = 0;
    while (k < t.size() && std::isspace(static_cast<unsigned char>(t[k]))) ++k;
    t.erase(0, k);
  };
  trim(s);
  const std::string omega = "\xCF\x89";
  if (s.size() >= 2 && s.compare(s.size() - 2, 2, "^w") == 0) {
    s.resize(s.size() - 2);
  } else if (s.size() >= 3 && s.compare(s.size() - 3, 3, "^" + omega) == 0) {
    s.resize(s.size() - 3);
  } else {
    throw std::invalid_argument("ultimately periodic word must end with ^w: '" + text + "'");
  }
  trim(s);
  if (s.empty() || s.back() != ')') throw std::invalid_argument("missing period in '" + text + "'");
  std::size_t open = s.rfind('(');
  if (open == std::string::npos) throw std::invalid_argument("missing '(' in '" + text + "'");
  std::string pre = s.substr(0, open);
  std::string per = s.substr(open + 1, s.size() - open - 2);
  pre.erase(std::remove(pre.begin(), pre.end(), '"'), pre.end());
  trim(pre);
  Word period = al.parse(per);
  if (period.empty()) throw std::invalid_argument("empty period in '" + text + "'");
  return canonicalize(al.parse(pre), period);
}

}  // namespace rfw
