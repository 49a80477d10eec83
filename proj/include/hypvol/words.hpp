#ifndef HYPVOL_WORDS_HPP
#define HYPVOL_WORDS_HPP

// Freely reduced words in surface and free group presentations.

#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "hypvol/error.hpp"

namespace hypvol {

struct Letter {
  int gen = 0;
  int exp = 1;  // +1 or -1

  Letter inverse() const { return {gen, -exp}; }
  bool operator==(const Letter&) const = default;
};

/// Freely reduced word; every constructor reduces.
class Word {
 public:
  Word() = default;
  explicit Word(const std::vector<Letter>& letters) {
    for (const Letter& l : letters) push(l);
  }

  static Word generator(int gen, int exp = 1) { return Word({Letter{gen, exp}}); }

  const std::vector<Letter>& letters() const { return letters_; }
  std::size_t size() const { return letters_.size(); }
  bool empty() const { return letters_.empty(); }
  const Letter& operator[](std::size_t i) const { return letters_[i]; }

  Word inverse() const {
    Word w;
    for (auto it = letters_.rbegin(); it != letters_.rend(); ++it) w.letters_.push_back(it->inverse());
    return w;
  }

  Word operator*(const Word& o) const {
    Word w = *this;
    for (const Letter& l : o.letters_) w.push(l);
    return w;
  }

  bool operator==(const Word&) const = default;

  /// First and last letters are not mutually inverse.
  bool cyclically_reduced() const {
    return letters_.size() < 2 || !(letters_.front() == letters_.back().inverse());
  }

  /// Space-separated tokens "3+" / "0-".
  std::string to_string() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < letters_.size(); ++i) {
      if (i) os << ' ';
      os << letters_[i].gen << (letters_[i].exp > 0 ? '+' : '-');
    }
    return os.str();
  }

  static Word parse(const std::string& s) {
    std::istringstream is(s);
    std::vector<Letter> ls;
    std::string tok;
    while (is >> tok) {
      if (tok.size() < 2 || (tok.back() != '+' && tok.back() != '-'))
        throw ParseError("word: bad token '" + tok + "'");
      int g = 0;
      try {
        std::size_t used = 0;
        g = std::stoi(tok.substr(0, tok.size() - 1), &used);
        if (used != tok.size() - 1 || g < 0) throw ParseError("");
      } catch (const std::exception&) {
        throw ParseError("word: bad token '" + tok + "'");
      }
      ls.push_back({g, tok.back() == '+' ? 1 : -1});
    }
    return Word(ls);
  }

 private:
  void push(const Letter& l) {
    if (l.exp != 1 && l.exp != -1) throw PreconditionViolation("word: exponents must be +1 or -1");
    if (!letters_.empty() && letters_.back() == l.inverse())
      letters_.pop_back();
    else
      letters_.push_back(l);
  }

  std::vector<Letter> letters_;
};

/// Fundamental group of a genus-g surface with p punctures. Closed: 2g
/// generators a_1, b_1, ..., with relator [a_1,b_1]...[a_g,b_g]. Punctured:
/// free on the 2g + p - 1 generators left after eliminating the last loop.
class Presentation {
 public:
  static Presentation closed(int genus) {
    if (genus < 1) throw PreconditionViolation("presentation: need genus >= 1");
    Presentation p;
    p.genus_ = genus;
    p.punctures_ = 0;
    std::vector<Letter> r;
    for (int i = 0; i < genus; ++i) {
      const int a = 2 * i, b = 2 * i + 1;
      r.insert(r.end(), {{a, 1}, {b, 1}, {a, -1}, {b, -1}});
    }
    p.relator_ = Word(r);
    return p;
  }

  static Presentation punctured(int genus, int punctures) {
    if (genus < 0 || punctures < 1) throw PreconditionViolation("presentation: need genus >= 0, punctures >= 1");
    if (2 * genus + punctures - 1 < 1) throw PreconditionViolation("presentation: trivial group");
    Presentation p;
    p.genus_ = genus;
    p.punctures_ = punctures;
    return p;
  }

  /// Presentation matching the counts read from a file or config.
  static Presentation make(int genus, int punctures) {
    return punctures == 0 ? closed(genus) : punctured(genus, punctures);
  }

  int genus() const { return genus_; }
  int punctures() const { return punctures_; }
  bool is_closed() const { return punctures_ == 0; }
  int generator_count() const { return is_closed() ? 2 * genus_ : 2 * genus_ + punctures_ - 1; }
  const Word& relator() const { return relator_; }

  bool operator==(const Presentation&) const = default;

 private:
  int genus_ = 1;
  int punctures_ = 0;
  Word relator_;
};

/// Calls fn on every freely reduced word of length 1..max_len in `rank`
/// generators, in length-lexicographic order. With cyclic_only, words that
/// are not cyclically reduced are skipped (they are conjugate to shorter ones).
inline void for_each_word(int rank, int max_len, bool cyclic_only, const std::function<void(const Word&)>& fn) {
  if (rank < 1) throw PreconditionViolation("words: need rank >= 1");
  std::vector<Letter> alphabet;
  for (int g = 0; g < rank; ++g) {
    alphabet.push_back({g, 1});
    alphabet.push_back({g, -1});
  }
  std::vector<Letter> cur;
  std::function<void(int)> rec = [&](int len) {
    if (static_cast<int>(cur.size()) == len) {
      Word w(cur);
      if (!cyclic_only || w.cyclically_reduced()) fn(w);
      return;
    }
    for (const Letter& l : alphabet) {
      if (!cur.empty() && cur.back() == l.inverse()) continue;
      cur.push_back(l);
      rec(len);
      cur.pop_back();
    }
  };
  for (int len = 1; len <= max_len; ++len) rec(len);
}

/// Reduced words up to length L in the generators of the presentation.
inline std::vector<Word> words_up_to(const Presentation& p, int max_len, bool cyclic_only = false) {
  std::vector<Word> out;
  for_each_word(p.generator_count(), max_len, cyclic_only, [&](const Word& w) { out.push_back(w); });
  return out;
}

}  // namespace hypvol

#endif  // HYPVOL_WORDS_HPP
