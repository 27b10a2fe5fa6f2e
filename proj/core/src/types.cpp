#include "gwf/types.hpp"

#include "gwf/errors.hpp"

namespace gwf {

std::vector<Symbol> subset_members(Subset s) {
  std::vector<Symbol> out;
  out.reserve(static_cast<std::size_t>(subset_size(s)));
  while (s != 0) {
    out.push_back(static_cast<Symbol>(std::countr_zero(s)));
    s &= s - 1;
  }
  return out;
}

Subset subset_from(const std::vector<Symbol>& members) {
  Subset s = 0;
  for (Symbol m : members) {
    if (m >= kMaxAlphabet) throw Error(ErrorKind::InvalidArgument, "subset member out of range");
    s |= Subset{1} << m;
  }
  return s;
}

namespace {

constexpr char kDigits[] = "0123456789abcdefghijklmnopqrstuvwxyz";

}  // namespace

std::string format_word(const Word& word, std::size_t alphabet_size) {
  std::string out;
  if (alphabet_size <= 36) {
    out.reserve(word.size());
    for (Symbol s : word) out.push_back(kDigits[s]);
    return out;
  }
  for (std::size_t k = 0; k < word.size(); ++k) {
    if (k != 0) out.push_back('.');
    out += std::to_string(word[k]);
  }
  return out;
}

Word parse_word(const std::string& text, std::size_t alphabet_size) {
  Word word;
  if (text.empty()) return word;
  if (alphabet_size <= 36) {
    word.reserve(text.size());
    for (char c : text) {
      Symbol v;
      if (c >= '0' && c <= '9') {
        v = static_cast<Symbol>(c - '0');
      } else if (c >= 'a' && c <= 'z') {
        v = static_cast<Symbol>(c - 'a' + 10);
      } else {
        throw Error(ErrorKind::InvalidArgument, "bad symbol '" + std::string(1, c) + "' in word");
      }
      if (v >= alphabet_size) throw Error(ErrorKind::InvalidArgument, "symbol out of alphabet in word " + text);
      word.push_back(v);
    }
    return word;
  }
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t dot = text.find('.', start);
    std::string part = text.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    unsigned long v = 0;
    try {
      v = std::stoul(part);
    } catch (const std::exception&) {
      throw Error(ErrorKind::InvalidArgument, "bad symbol '" + part + "' in word");
    }
    if (v >= alphabet_size) throw Error(ErrorKind::InvalidArgument, "symbol out of alphabet in word " + text);
    word.push_back(static_cast<Symbol>(v));
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  return word;
}

std::string format_subset(Subset s) {
  std::string out = "{";
  bool first = true;
  for (Symbol m : subset_members(s)) {
    if (!first) out.push_back(',');
    out += std::to_string(m);
    first = false;
  }
  out.push_back('}');
  return out;
}

}  // namespace gwf
